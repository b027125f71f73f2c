mod common;

use common::*;
use maxplus_sync::dynamics::{heat_step, loss, rraggu, RunConfig};
use maxplus_sync::{ExtendedReal, GlobalState, Rational, Vector};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn heat_step_never_increases((spec, x, _y) in network_and_states(false)) {
        let net = spec.build::<f64>();
        let x = state::<f64>(spec.d, &x);
        prop_assert!(heat_step(&net, &x).unwrap().leq(&x));
    }

    #[test]
    fn heat_step_is_monotone((spec, x, y) in network_and_states(false)) {
        let net = spec.build::<f64>();
        let x = state::<f64>(spec.d, &x);
        let hi = x.join(&state(spec.d, &y)).unwrap();
        prop_assert!(heat_step(&net, &x).unwrap().leq(&heat_step(&net, &hi).unwrap()));
    }

    #[test]
    fn heat_step_commutes_with_shift((spec, x, _y) in network_and_states(false), c in -8i32..=8) {
        let net = spec.build::<f64>();
        let x = state::<f64>(spec.d, &x);
        let c = f64::from(c) / 4.0;
        prop_assert_eq!(heat_step(&net, &x.shift_by(c)).unwrap(), heat_step(&net, &x).unwrap().shift_by(c));
    }

    #[test]
    fn heat_step_is_nonexpansive((spec, x, y) in network_and_states(true)) {
        let net = spec.build::<f64>();
        let (x, y) = (state::<f64>(spec.d, &x), state::<f64>(spec.d, &y));
        let before = x.linf_distance(&y).unwrap();
        let after = heat_step(&net, &x).unwrap().linf_distance(&heat_step(&net, &y).unwrap()).unwrap();
        prop_assert!(after <= before, "{after} > {before}");
    }

    #[test]
    fn exact_and_float_heat_steps_agree((spec, x, _y) in network_and_states(false)) {
        let f = heat_step(&spec.build::<f64>(), &state::<f64>(spec.d, &x)).unwrap();
        let r = heat_step(&spec.build::<Rational>(), &state::<Rational>(spec.d, &x)).unwrap();
        for u in 0..spec.n {
            let back: Vector<f64> = r.block(u).iter().map(|e| ExtendedReal::from_f64(e.to_f64())).collect();
            prop_assert_eq!(f.block(u), &back);
        }
    }

    #[test]
    fn exact_alpha_never_increases((spec, x, _y) in network_and_states(true)) {
        let net = spec.build::<Rational>();
        let x = state::<Rational>(spec.d, &x);
        let out = rraggu(&net, &x, &RunConfig::fixed_steps(8)).unwrap();
        prop_assert_eq!(out.trace.check_alpha_monotone(Rational::from_integer(0)), Ok(()));
    }

    #[test]
    fn value_residual_is_symmetric((spec, x, _y) in network_and_states(false)) {
        let net = spec.build::<f64>();
        let x = state::<f64>(spec.d, &x);
        for &(u, v) in net.edges() {
            prop_assert_eq!(
                net.value_residual(u, v, x.block(u), x.block(v)).unwrap(),
                net.value_residual(v, u, x.block(v), x.block(u)).unwrap()
            );
        }
    }

    #[test]
    fn effective_value_is_monotone((spec, x, y) in network_and_states(false)) {
        let net = spec.build::<f64>();
        let x = state::<f64>(spec.d, &x);
        let hi = x.join(&state(spec.d, &y)).unwrap();
        for &(u, v) in net.edges() {
            for (a, b) in [(u, v), (v, u)] {
                let lo_val = net.effective_value(a, b, x.block(a)).unwrap();
                let hi_val = net.effective_value(a, b, hi.block(a)).unwrap();
                prop_assert!(lo_val.leq(&hi_val));
            }
        }
    }

    #[test]
    fn bottom_is_fixed_and_has_zero_loss(spec in network()) {
        let net = spec.build::<f64>();
        let bottom = GlobalState::bottom(spec.n, spec.d);
        prop_assert_eq!(heat_step(&net, &bottom).unwrap(), bottom.clone());
        prop_assert_eq!(loss(&net, &bottom).unwrap(), ExtendedReal::zero());
    }
}

#[test]
fn isolated_agent_keeps_its_values() {
    let spec = NetSpec {
        n: 3,
        d: 2,
        edges: vec![(0, 1, vec![Some(0), Some(-4), Some(4), Some(0)], vec![Some(0); 4], 0)],
    };
    let net = spec.build::<f64>();
    let x = state::<f64>(2, &[Some(1), Some(2), Some(3), Some(4), Some(5), None]);
    let next = heat_step(&net, &x).unwrap();
    assert_eq!(next.block(2), x.block(2));
}
