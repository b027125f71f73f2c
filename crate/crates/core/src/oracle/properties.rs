use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dynamics::{heat_step, is_solution};
use crate::error::{Error, Result};
use crate::generate::{derive_seed, random_state, Interval};
use crate::io::{state_from_json, state_to_json};
use crate::network::{GlobalState, TradeNetwork};
use crate::oracle::report::{run_trials, Violations};
use crate::oracle::{brute_force_greatest_subsolution, dense, linf, mp_apply, residuate, GridBox, PropertyReport};
use crate::tropical::{principal_solution, ExtendedReal, MatrixDoc, Semiring, TropicalMatrix, Vector};

pub(crate) const PRODUCT_LAWS: &str = "product_laws";
pub(crate) const RESIDUATION: &str = "residuation";
pub(crate) const NONEXPANSIVE: &str = "nonexpansive";
pub(crate) const CLOSURE: &str = "semimodule_closure";
pub(crate) const EQUILIBRIUM: &str = "equilibrium_bound";
pub(crate) const PRINCIPAL: &str = "principal_solution";
pub(crate) const MEMBERSHIP: &str = "solution_membership";

const NEG_INF_RATE: f64 = 0.2;
const ENTRY_RANGE: f64 = 5.0;

fn field<T: serde::de::DeserializeOwned>(w: &Value, key: &str) -> Result<T> {
    let v = w
        .get(key)
        .ok_or_else(|| Error::Oracle(format!("witness lacks `{key}`")))?;
    Ok(serde_json::from_value(v.clone())?)
}

fn state_field(w: &Value, key: &str) -> Result<GlobalState<f64>> {
    let v = w
        .get(key)
        .ok_or_else(|| Error::Oracle(format!("witness lacks `{key}`")))?;
    state_from_json(v.clone())
}

fn entry(rng: &mut ChaCha8Rng) -> ExtendedReal<f64> {
    if rng.gen_bool(NEG_INF_RATE) {
        ExtendedReal::NegInf
    } else {
        ExtendedReal::Finite(rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE))
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> TropicalMatrix<f64> {
    let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let data = (0..m * n).map(|_| entry(rng)).collect();
    TropicalMatrix::new(m, n, Semiring::MaxPlus, data).expect("max-plus entries")
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector<f64> {
    (0..n).map(|_| entry(rng)).collect()
}

fn check(out: &mut Violations, ok: bool, name: &str, detail: impl FnOnce() -> String) {
    if !ok {
        out.push((name.to_owned(), detail()));
    }
}

fn same_as_oracle(lib: &Vector<f64>, oracle: &[f64]) -> bool {
    lib.to_f64s() == oracle
}

/// Laws of the max-plus product on random matrices and vectors with `-inf`
/// entries: `A ⊞ ·` preserves joins, commutes with finite shifts and is
/// monotone. Also cross-checks `mp_matvec` against the oracle's own product.
pub fn check_product_laws(n_trials: usize, seed: u64, tol: f64) -> Result<PropertyReport> {
    run_trials(
        PRODUCT_LAWS,
        n_trials,
        seed,
        tol,
        |_, s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let a = random_matrix(&mut rng);
            let x = random_vector(&mut rng, a.cols());
            let y = random_vector(&mut rng, a.cols());
            let alpha: f64 = rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE);
            Ok(json!({ "a": a.to_doc(), "x": x, "y": y, "alpha": alpha }))
        },
        |w| eval_product_laws(w, tol),
    )
}

pub(crate) fn eval_product_laws(w: &Value, tol: f64) -> Result<Violations> {
    let a = TropicalMatrix::from_doc(field::<MatrixDoc<f64>>(w, "a")?, Semiring::MaxPlus)?;
    let x: Vector<f64> = field(w, "x")?;
    let y: Vector<f64> = field(w, "y")?;
    let alpha: f64 = field(w, "alpha")?;
    let ax = a.mp_matvec(&x)?;
    let ay = a.mp_matvec(&y)?;
    let mut out = Violations::new();

    check(
        &mut out,
        same_as_oracle(&ax, &mp_apply(&dense(&a), &x.to_f64s())),
        "oracle_product",
        || format!("A ⊞ x = {ax:?} disagrees with the oracle"),
    );
    let lhs = a.mp_matvec(&x.join(&y)?)?;
    let rhs = ax.join(&ay)?;
    check(&mut out, lhs.approx_eq(&rhs, tol), "join", || {
        format!("A ⊞ (x ∨ y) = {lhs:?}, (A ⊞ x) ∨ (A ⊞ y) = {rhs:?}")
    });
    let lhs = a.mp_matvec(&x.shift_by(alpha))?;
    let rhs = ax.shift_by(alpha);
    check(&mut out, lhs.approx_eq(&rhs, tol), "shift", || {
        format!("A ⊞ (x + α) = {lhs:?}, (A ⊞ x) + α = {rhs:?}")
    });
    let upper = x.join(&y)?;
    let a_upper = a.mp_matvec(&upper)?;
    check(&mut out, ax.leq_tol(&a_upper, tol), "monotone", || {
        format!("x ⪯ x ∨ y but A ⊞ x = {ax:?} exceeds A ⊞ (x ∨ y) = {a_upper:?}")
    });
    Ok(out)
}

/// Residuation as the adjoint of `A ⊞ ·`: the Galois connection
/// in both directions, and the two closure inequalities. Every other trial
/// draws `y` above `A ⊞ x` so the "true" side of the equivalence is hit too.
pub fn check_residuation(n_trials: usize, seed: u64, tol: f64) -> Result<PropertyReport> {
    run_trials(
        RESIDUATION,
        n_trials,
        seed,
        tol,
        |k, s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let a = random_matrix(&mut rng);
            let x = random_vector(&mut rng, a.cols());
            let y = if k % 2 == 0 {
                random_vector(&mut rng, a.rows())
            } else {
                let ax = a.mp_matvec(&x)?;
                ax.iter()
                    .map(|&e| match e {
                        ExtendedReal::Finite(v) => ExtendedReal::Finite(v + rng.gen_range(0.0..1.0)),
                        _ => entry(&mut rng),
                    })
                    .collect()
            };
            Ok(json!({ "a": a.to_doc(), "x": x, "y": y }))
        },
        |w| eval_residuation(w, tol),
    )
}

pub(crate) fn eval_residuation(w: &Value, tol: f64) -> Result<Violations> {
    let a = TropicalMatrix::from_doc(field::<MatrixDoc<f64>>(w, "a")?, Semiring::MaxPlus)?;
    let x: Vector<f64> = field(w, "x")?;
    let y: Vector<f64> = field(w, "y")?;
    let ax = a.mp_matvec(&x)?;
    let res_y = principal_solution(&a, &y)?;
    let mut out = Violations::new();

    check(
        &mut out,
        same_as_oracle(&res_y, &residuate(&dense(&a), &y.to_f64s())),
        "oracle_residuation",
        || format!("A⁻ ⊞' y = {res_y:?} disagrees with the oracle"),
    );
    check(
        &mut out,
        !ax.leq(&y) || x.leq_tol(&res_y, tol),
        "galois_forward",
        || format!("A ⊞ x ⪯ y but x = {x:?} exceeds A⁻ ⊞' y = {res_y:?}"),
    );
    check(
        &mut out,
        !x.leq(&res_y) || ax.leq_tol(&y, tol),
        "galois_backward",
        || format!("x ⪯ A⁻ ⊞' y but A ⊞ x = {ax:?} exceeds y = {y:?}"),
    );
    let round = principal_solution(&a, &ax)?;
    check(&mut out, x.leq_tol(&round, tol), "lower_closure", || {
        format!("x = {x:?} exceeds A⁻ ⊞' (A ⊞ x) = {round:?}")
    });
    let back = a.mp_matvec(&res_y)?;
    check(&mut out, back.leq_tol(&y, tol), "upper_closure", || {
        format!("A ⊞ (A⁻ ⊞' y) = {back:?} exceeds y = {y:?}")
    });
    Ok(out)
}

/// Half-width of the grid box around the principal solution.
const GRID_RANGE: f64 = 2.0;

/// Entries are multiples of 1/8 so that every sum below is exact in `f64`.
fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.gen_range(-16i32..=16)) / 8.0
}

/// Principal solution against the grid oracle on random square systems with
/// `d ≤ 3` and dyadic entries: it must match the exhaustive scan within
/// `grid_step`, satisfy `A ⊞ x̄ ⪯ b` exactly, be tight (raising any
/// coordinate by `grid_step` breaks feasibility) and agree with the exact
/// rational computation.
pub fn check_principal_solution(n_trials: usize, seed: u64, grid_step: f64) -> Result<PropertyReport> {
    run_trials(
        PRINCIPAL,
        n_trials,
        seed,
        grid_step,
        |_, s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let d = rng.gen_range(1..=3);
            let a: Vec<f64> = (0..d * d).map(|_| dyadic(&mut rng)).collect();
            let b: Vec<f64> = (0..d).map(|_| dyadic(&mut rng)).collect();
            Ok(json!({ "a": { "rows": d, "cols": d, "data": a }, "b": b }))
        },
        |w| eval_principal(w, grid_step),
    )
}

pub(crate) fn eval_principal(w: &Value, grid_step: f64) -> Result<Violations> {
    let a = TropicalMatrix::from_doc(field::<MatrixDoc<f64>>(w, "a")?, Semiring::MaxPlus)?;
    let b: Vector<f64> = field(w, "b")?;
    let x = principal_solution(&a, &b)?;
    let xs = x.to_f64s();
    let (da, bs) = (dense(&a), b.to_f64s());
    let feasible = |x: &[f64]| mp_apply(&da, x).iter().zip(&bs).all(|(l, r)| l <= r);
    let mut out = Violations::new();

    check(&mut out, feasible(&xs), "feasible", || format!("A ⊞ {xs:?} ⋠ b"));
    for j in 0..xs.len() {
        let mut up = xs.clone();
        up[j] += grid_step;
        check(&mut out, !feasible(&up), "tight", || {
            format!("raising coordinate {j} stays feasible")
        });
    }
    match brute_force_greatest_subsolution(&a, &b, grid_step, &GridBox::around(&xs, GRID_RANGE)) {
        Ok(g) => {
            let gap = linf(&g.to_f64s(), &xs);
            check(&mut out, gap <= grid_step, "grid_agreement", || {
                format!("grid maximiser {g:?} is {gap} away")
            });
        }
        Err(e) => out.push(("grid_agreement".to_owned(), e.to_string())),
    }
    let exact = |e: &ExtendedReal<f64>| e.map_scalar(|v| Ratio::<i64>::approximate_float(v).expect("dyadic"));
    let ra = TropicalMatrix::new(
        a.rows(),
        a.cols(),
        Semiring::MaxPlus,
        a.data().iter().map(exact).collect(),
    )?;
    let rb: Vector<Ratio<i64>> = b.iter().map(exact).collect();
    let rx = principal_solution(&ra, &rb)?;
    check(&mut out, rx.to_f64s() == xs, "exact_rational", || {
        format!("rational result {rx:?} differs from {xs:?}")
    });
    Ok(out)
}

/// Each state is a time-invariant solution within `tol`. One trial per state.
pub fn check_solution_membership(
    net: &TradeNetwork<f64>,
    states: &[GlobalState<f64>],
    tol: f64,
) -> Result<PropertyReport> {
    let mut failures = Vec::new();
    for (k, x) in states.iter().enumerate() {
        let witness = json!({ "x": state_to_json(x)? });
        for (check, detail) in eval_membership(net, &witness, tol)? {
            failures.push(super::Failure {
                trial: k,
                check,
                detail,
                witness: witness.clone(),
            });
        }
    }
    Ok(PropertyReport {
        property: MEMBERSHIP.to_owned(),
        trials: states.len(),
        tolerance: tol,
        seed: None,
        failures,
    })
}

pub(crate) fn eval_membership(net: &TradeNetwork<f64>, w: &Value, tol: f64) -> Result<Violations> {
    let x = state_field(w, "x")?;
    let step = heat_step(net, &x)?.linf_distance(&x)?;
    let mut out = Violations::new();
    check(&mut out, step.le_tol(ExtendedReal::zero(), tol), "fixed_point", || {
        format!("‖F(X) − X‖ = {step} exceeds {tol:e}")
    });
    Ok(out)
}

const STATE_RANGE: Interval = Interval { lo: -2.0, hi: 2.0 };

/// Non-expansiveness of the heat-equation map `F` in ℓ∞ on random finite
/// state pairs, plus its two premises: monotonicity (`X ⪯ X ∨ Y`) and
/// additive homogeneity (including `‖F(X) − F(X + α)‖ = |α|`).
pub fn check_nonexpansive(net: &TradeNetwork<f64>, n_trials: usize, seed: u64, tol: f64) -> Result<PropertyReport> {
    let (n, d) = (net.n_agents(), net.n_alternatives());
    run_trials(
        NONEXPANSIVE,
        n_trials,
        seed,
        tol,
        |_, s| {
            let x = random_state::<f64>(n, d, STATE_RANGE, derive_seed(s, 0))?;
            let y = random_state::<f64>(n, d, STATE_RANGE, derive_seed(s, 1))?;
            let alpha: f64 = ChaCha8Rng::seed_from_u64(s).gen_range(-ENTRY_RANGE..=ENTRY_RANGE);
            Ok(json!({ "x": state_to_json(&x)?, "y": state_to_json(&y)?, "alpha": alpha }))
        },
        |w| eval_nonexpansive(net, w, tol),
    )
}

pub(crate) fn eval_nonexpansive(net: &TradeNetwork<f64>, w: &Value, tol: f64) -> Result<Violations> {
    let x = state_field(w, "x")?;
    let y = state_field(w, "y")?;
    let alpha: f64 = field(w, "alpha")?;
    let fx = heat_step(net, &x)?;
    let fy = heat_step(net, &y)?;
    let mut out = Violations::new();

    let (before, after) = (x.linf_distance(&y)?, fx.linf_distance(&fy)?);
    check(&mut out, after.le_tol(before, tol), "nonexpansive", || {
        format!("‖F(X) − F(Y)‖ = {after} > ‖X − Y‖ = {before}")
    });
    let z = x.join(&y)?;
    let fz = heat_step(net, &z)?;
    check(&mut out, fx.leq_tol(&fz, tol), "monotone", || {
        "F(X) ⋠ F(X ∨ Y)".to_owned()
    });
    let shifted = heat_step(net, &x.shift_by(alpha))?;
    check(
        &mut out,
        shifted.approx_eq(&fx.shift_by(alpha), tol),
        "homogeneous",
        || format!("F(X + {alpha}) ≠ F(X) + {alpha}"),
    );
    let gap = fx.linf_distance(&shifted)?;
    check(
        &mut out,
        gap.approx_eq(ExtendedReal::Finite(alpha.abs()), tol),
        "shifted_pair",
        || format!("‖F(X) − F(X + α)‖ = {gap}, expected |α| = {}", alpha.abs()),
    );
    Ok(out)
}

/// Closure of the solution set under joins and finite shifts, on random
/// pairs drawn from `solutions`, plus the shift that makes a solution
/// positive. Every input must itself be a solution within `tol`, and so must
/// every derived state: `F` is monotone, so `F(X ∨ Y) ⪰ X ∨ Y − tol`.
pub fn check_semimodule_closure(
    net: &TradeNetwork<f64>,
    solutions: &[GlobalState<f64>],
    n_trials: usize,
    seed: u64,
    tol: f64,
) -> Result<PropertyReport> {
    if solutions.is_empty() {
        return Err(Error::Oracle("closure check needs at least one solution".into()));
    }
    for (i, x) in solutions.iter().enumerate() {
        if !is_solution(net, x, tol)? {
            return Err(Error::Oracle(format!("input {i} is not a solution within {tol:e}")));
        }
    }
    run_trials(
        CLOSURE,
        n_trials,
        seed,
        tol,
        |_, s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let i = rng.gen_range(0..solutions.len());
            let j = rng.gen_range(0..solutions.len());
            let alpha: f64 = rng.gen_range(-10.0..=10.0);
            Ok(json!({
                "x": state_to_json(&solutions[i])?,
                "y": state_to_json(&solutions[j])?,
                "alpha": alpha,
            }))
        },
        |w| eval_closure(net, w, tol),
    )
}

pub(crate) fn eval_closure(net: &TradeNetwork<f64>, w: &Value, tol: f64) -> Result<Violations> {
    let x = state_field(w, "x")?;
    let y = state_field(w, "y")?;
    let alpha: f64 = field(w, "alpha")?;
    let mut out = Violations::new();

    let join = x.join(&y)?;
    check(&mut out, is_solution(net, &join, tol)?, "join", || {
        "X ∨ Y is not a solution".to_owned()
    });
    check(&mut out, is_solution(net, &x.shift_by(alpha), tol)?, "shift", || {
        format!("X + {alpha} is not a solution")
    });
    if let Some(m) = x.min_finite() {
        let positive = x.shift_by(1.0 - m);
        let ok = positive.min_finite().is_some_and(|p| p > 0.0) && is_solution(net, &positive, tol)?;
        check(&mut out, ok, "positive", || {
            format!("X + {} is not a positive solution", 1.0 - m)
        });
    }
    Ok(out)
}

/// `b − a` with equal infinities at zero.
fn signed_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        b - a
    }
}

/// Per-edge, per-coordinate form of the equilibrium bound:
/// `−[W]_{u,v} ⪯ A_{v,u} ⊞ X_v − A_{u,v} ⊞ X_u ⪯ [W]_{v,u}` within `tol`.
/// One trial per edge. The bound is only guaranteed when `X` is a solution;
/// that precondition is the caller's to check.
pub fn check_equilibrium_bound(net: &TradeNetwork<f64>, x: &GlobalState<f64>, tol: f64) -> Result<PropertyReport> {
    net.check_state(x)?;
    let mut failures = Vec::new();
    for (k, &(u, v)) in net.edges().iter().enumerate() {
        let witness = json!({ "edge": [u, v], "x_u": x.block(u), "x_v": x.block(v) });
        for (check, detail) in eval_equilibrium(net, &witness, tol)? {
            failures.push(super::Failure {
                trial: k,
                check,
                detail,
                witness: witness.clone(),
            });
        }
    }
    Ok(PropertyReport {
        property: EQUILIBRIUM.to_owned(),
        trials: net.edges().len(),
        tolerance: tol,
        seed: None,
        failures,
    })
}

pub(crate) fn eval_equilibrium(net: &TradeNetwork<f64>, w: &Value, tol: f64) -> Result<Violations> {
    let [u, v]: [usize; 2] = field(w, "edge")?;
    let x_u: Vector<f64> = field(w, "x_u")?;
    let x_v: Vector<f64> = field(w, "x_v")?;
    let (a_uv, a_vu) = match (net.coupling(u, v), net.coupling(v, u)) {
        (Some(a), Some(b)) => (dense(a), dense(b)),
        _ => return Err(Error::NotAnEdge { u, v }),
    };
    let e_u = mp_apply(&a_uv, &x_u.to_f64s());
    let e_v = mp_apply(&a_vu, &x_v.to_f64s());
    let (lower, upper) = (net.weight(u, v).to_f64(), net.weight(v, u).to_f64());
    let mut out = Violations::new();
    for (i, (&l, &r)) in e_u.iter().zip(&e_v).enumerate() {
        let gap = signed_gap(l, r);
        let ok = (upper == f64::INFINITY || gap <= upper + tol) && (lower == f64::INFINITY || gap >= -lower - tol);
        check(&mut out, ok, "edge_bound", || {
            format!("edge ({u}, {v}), alternative {i}: gap {gap} outside [-{lower}, {upper}]")
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{rraggu, Epsilon, RunConfig};
    use crate::generate::{random_instance, InstanceParams};
    use crate::network::NetworkBuilder;
    use crate::oracle::replay;

    fn small_instance(seed: u64) -> TradeNetwork<f64> {
        random_instance(&InstanceParams {
            n_agents: 6,
            n_alternatives: 3,
            edge_prob: 0.5,
            seed,
            ..InstanceParams::default()
        })
        .unwrap()
    }

    #[test]
    fn principal_solution_matches_the_grid() {
        let r = check_principal_solution(60, 7, 0.25).unwrap();
        assert!(r.passed(), "{:?}", r.failures.first());
        let w = json!({ "a": {"rows": 2, "cols": 2, "data": [1, 2, 3, 4]}, "b": [5, 6] });
        assert!(eval_principal(&w, 0.25).unwrap().is_empty());
    }

    #[test]
    fn product_and_residuation_suites_pass() {
        let r1 = check_product_laws(300, 1, 1e-9).unwrap();
        let r2 = check_residuation(300, 2, 1e-9).unwrap();
        assert!(r1.passed(), "{:?}", r1.failures.first());
        assert!(r2.passed(), "{:?}", r2.failures.first());
        assert_eq!(r1.trials, 300);
    }

    #[test]
    fn reports_are_deterministic() {
        let net = small_instance(3);
        let a = check_nonexpansive(&net, 50, 9, 1e-9).unwrap();
        let b = check_nonexpansive(&net, 50, 9, 1e-9).unwrap();
        assert!(a.passed());
        assert_eq!(a, b);
    }

    #[test]
    fn identical_pair_has_zero_distance() {
        let net = small_instance(4);
        let x = random_state::<f64>(6, 3, STATE_RANGE, 1).unwrap();
        let w = json!({ "x": state_to_json(&x).unwrap(), "y": state_to_json(&x).unwrap(), "alpha": 0.0 });
        assert!(eval_nonexpansive(&net, &w, 0.0).unwrap().is_empty());
    }

    #[test]
    fn closure_on_converged_solutions() {
        let net = random_instance(&InstanceParams {
            n_agents: 6,
            n_alternatives: 3,
            edge_prob: 0.5,
            weight_range: Interval::new(0.0, 2.0).unwrap(),
            seed: 0,
            ..InstanceParams::default()
        })
        .unwrap();
        let cfg = RunConfig {
            epsilon: Epsilon::Value(0.0),
            ..RunConfig::default()
        };
        let sols: Vec<_> = (0..3)
            .map(|s| {
                let x0 = random_state(6, 3, Interval::new(-1.0, 1.0).unwrap(), derive_seed(0, s)).unwrap();
                rraggu(&net, &x0, &cfg).unwrap().state
            })
            .collect();
        assert!(sols.iter().all(|x| is_solution(&net, x, 1e-9).unwrap()));
        let report = check_semimodule_closure(&net, &sols, 40, 0, 1e-9).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
        for x in &sols {
            assert!(check_equilibrium_bound(&net, x, 1e-9).unwrap().passed());
        }
    }

    #[test]
    fn closure_rejects_non_solutions() {
        let net = NetworkBuilder::new(2, 1)
            .edge(
                0,
                1,
                TropicalMatrix::identity(1, Semiring::MaxPlus),
                TropicalMatrix::identity(1, Semiring::MaxPlus),
                0.0,
            )
            .build()
            .unwrap();
        let x = GlobalState::from_f64_rows(&[&[0.0], &[1.0]]).unwrap();
        assert!(check_semimodule_closure(&net, &[x], 1, 0, 1e-9).is_err());
        assert!(check_semimodule_closure(&net, &[], 1, 0, 1e-9).is_err());
    }

    #[test]
    fn equilibrium_bound_catches_a_bumped_entry_and_replays() {
        let id = TropicalMatrix::identity(2, Semiring::MaxPlus);
        let net = NetworkBuilder::new(2, 2)
            .edge(0, 1, id.clone(), id, 0.5)
            .build()
            .unwrap();
        let good = GlobalState::from_f64_rows(&[&[0.0, 1.0], &[0.5, 1.0]]).unwrap();
        assert!(check_equilibrium_bound(&net, &good, 0.0).unwrap().passed());
        let bad = good.with_entry(1, 1, ExtendedReal::Finite(1.75)).unwrap();
        let report = check_equilibrium_bound(&net, &bad, 1e-9).unwrap();
        assert_eq!(report.failures.len(), 1);
        let again = replay(&report.property, Some(&net), &report.failures[0], 1e-9).unwrap();
        assert_eq!(again.len(), 1);
        assert_eq!(again[0].1, report.failures[0].detail);
    }

    #[test]
    fn infinite_weight_never_constrains() {
        let id = TropicalMatrix::identity(1, Semiring::MaxPlus);
        let net = NetworkBuilder::new(2, 1)
            .edge(0, 1, id.clone(), id, f64::INFINITY)
            .build()
            .unwrap();
        let x = GlobalState::from_f64_rows(&[&[-100.0], &[100.0]]).unwrap();
        assert!(check_equilibrium_bound(&net, &x, 0.0).unwrap().passed());
    }

    #[test]
    fn zero_weight_requires_equality() {
        let id = TropicalMatrix::identity(1, Semiring::MaxPlus);
        let net = NetworkBuilder::new(2, 1)
            .edge(0, 1, id.clone(), id, 0.0)
            .build()
            .unwrap();
        let eq = GlobalState::from_f64_rows(&[&[2.0], &[2.0]]).unwrap();
        assert!(check_equilibrium_bound(&net, &eq, 0.0).unwrap().passed());
        let off = GlobalState::from_f64_rows(&[&[2.0], &[2.0 + 1e-6]]).unwrap();
        assert!(!check_equilibrium_bound(&net, &off, 1e-9).unwrap().passed());
    }

    #[test]
    fn witnesses_round_trip_through_json() {
        let report = check_product_laws(5, 3, 1e-9).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: PropertyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        // A hand-written witness replays through the same evaluator.
        let w = json!({
            "a": {"rows": 1, "cols": 1, "data": [0.1]},
            "x": [0.2], "y": [0.3], "alpha": 0.7
        });
        let f = crate::oracle::Failure {
            trial: 0,
            check: String::new(),
            detail: String::new(),
            witness: w,
        };
        assert!(replay(PRODUCT_LAWS, None, &f, 1e-9).unwrap().is_empty());
        assert!(replay(NONEXPANSIVE, None, &f, 1e-9).is_err());
    }
}
