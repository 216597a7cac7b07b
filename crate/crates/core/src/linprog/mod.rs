//! Bounded-variable linear-programming feasibility.
//!
//! One program per token: does any probability vector `p` exist with
//! `p[fixed_zero] = 0`, `0 <= p_j <= u_j`, and the equality rows satisfied?
//! Phase-1 simplex answers it; an exact rational twin ([`solve_feasibility_exact`])
//! serves as the arbiter for small instances.
//!
//! Variables are handled natively as bounded (no slack rows), so the basis
//! stays at `1 + c` rows regardless of the vocabulary size. That is the whole
//! performance story for per-token checks at large vocabularies.

mod exact;
mod simplex;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::prob::Distribution;
use std::sync::Arc;

/// Default tolerance for the floating-point solver.
pub const DEFAULT_TOL: f64 = 1e-8;

/// The per-token feasibility system: `sum p = 1`, optional moment rows,
/// box bounds `0 <= p_j <= u_j`, and one index pinned to zero.
///
/// The equality matrix is shared behind an `Arc`: enumerating a vocabulary
/// builds one matrix and varies only the pinned index.
#[derive(Debug, Clone)]
pub struct FeasibilityProgram {
    fixed_zero: usize,
    upper: Vec<f64>,
    eq_lhs: Arc<Mat>,
    eq_rhs: Vec<f64>,
}

impl FeasibilityProgram {
    pub fn new(
        fixed_zero: usize,
        upper: Vec<f64>,
        eq_lhs: Arc<Mat>,
        eq_rhs: Vec<f64>,
    ) -> Result<Self> {
        let v = upper.len();
        if v == 0 {
            return Err(Error::InvalidInput("program has no variables".into()));
        }
        if fixed_zero >= v {
            return Err(Error::InvalidInput(format!(
                "fixed_zero index {fixed_zero} out of range for {v} variables"
            )));
        }
        if eq_lhs.cols() != v {
            return Err(Error::InvalidInput(format!(
                "equality matrix has {} columns, expected {v}",
                eq_lhs.cols()
            )));
        }
        if eq_lhs.rows() != eq_rhs.len() || eq_lhs.rows() == 0 {
            return Err(Error::InvalidInput(
                "equality matrix and rhs shapes disagree".into(),
            ));
        }
        if eq_lhs.row(0).iter().any(|&x| x != 1.0) || eq_rhs[0] != 1.0 {
            return Err(Error::InvalidInput(
                "row 0 must be the simplex constraint (all ones = 1)".into(),
            ));
        }
        if !eq_lhs.is_finite() || eq_rhs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite equality data".into()));
        }
        if upper.iter().any(|&u| !u.is_finite() || u < 0.0) {
            return Err(Error::InvalidInput(
                "upper bounds must be finite and non-negative".into(),
            ));
        }
        Ok(FeasibilityProgram {
            fixed_zero,
            upper,
            eq_lhs,
            eq_rhs,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.upper.len()
    }

    /// Number of basis-aware rows (equality rows beyond the simplex row).
    pub fn n_moment_rows(&self) -> usize {
        self.eq_rhs.len() - 1
    }

    pub fn fixed_zero(&self) -> usize {
        self.fixed_zero
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Upper bound actually enforced for variable `j` (zero at the pinned
    /// index).
    pub fn effective_upper(&self, j: usize) -> f64 {
        if j == self.fixed_zero {
            0.0
        } else {
            self.upper[j]
        }
    }

    pub fn eq_lhs(&self) -> &Mat {
        &self.eq_lhs
    }

    pub fn eq_rhs(&self) -> &[f64] {
        &self.eq_rhs
    }

    /// Same rows and bounds with a different pinned index. Cheap: the
    /// equality matrix is shared.
    pub fn with_fixed_zero(&self, token: usize) -> Result<Self> {
        if token >= self.n_vars() {
            return Err(Error::InvalidInput(format!(
                "fixed_zero index {token} out of range"
            )));
        }
        Ok(FeasibilityProgram {
            fixed_zero: token,
            upper: self.upper.clone(),
            eq_lhs: Arc::clone(&self.eq_lhs),
            eq_rhs: self.eq_rhs.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
}

/// Outcome of one feasibility solve.
///
/// `residual` is an audit value with asymmetric meaning: for a feasible
/// program it is the maximum equality violation of the returned witness;
/// for an infeasible one it is the phase-1 objective, i.e. how far from
/// satisfiable the program is. Borderline values near the tolerance can be
/// inspected by tests.
#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    pub status: Status,
    pub witness: Option<Distribution>,
    pub residual: f64,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}

/// Phase-1 bounded-variable simplex with Bland's rule. Deterministic for
/// identical inputs. `tol` separates feasible (phase-1 optimum <= tol) from
/// infeasible (> tol); iteration overrun is an explicit error, never mapped
/// to either status.
pub fn solve_feasibility(prog: &FeasibilityProgram, tol: f64) -> Result<FeasibilityResult> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let cap = iteration_cap(prog);
    simplex::phase_one(prog, tol, cap)
}

/// Exact-rational twin of [`solve_feasibility`] for small instances
/// (`v <= 64`, `c <= 8`). Inputs are converted exactly (every finite f64 is
/// dyadic), so there is no tolerance anywhere: the verdict is arithmetic
/// truth for the program as given.
pub fn solve_feasibility_exact(prog: &FeasibilityProgram) -> Result<FeasibilityResult> {
    if prog.n_vars() > 64 || prog.n_moment_rows() > 8 {
        return Err(Error::Refused(format!(
            "exact solver limited to v <= 64, c <= 8; got v = {}, c = {}",
            prog.n_vars(),
            prog.n_moment_rows()
        )));
    }
    let cap = iteration_cap(prog);
    exact::phase_one_exact(prog, cap)
}

fn iteration_cap(prog: &FeasibilityProgram) -> usize {
    50 * (prog.n_vars() + prog.n_moment_rows())
}

/// Build a threshold-only program (no moment rows): `sum p = 1`,
/// `p_j <= upper_j`, `p[token] = 0`.
pub fn simplex_only_program(upper: Vec<f64>, token: usize) -> Result<FeasibilityProgram> {
    let v = upper.len();
    let eq = Arc::new(Mat::from_fn(1, v, |_, _| 1.0));
    FeasibilityProgram::new(token, upper, eq, vec![1.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng as _;

    fn toy_program(fixed_zero: usize) -> FeasibilityProgram {
        // W^T = [0.55, 0.71, 0.29], h = 2.55, delta = ln 1.9, one moment row
        // (the direction of W; scaling does not change the constraint set).
        let logits = [0.55 * 2.55, 0.71 * 2.55, 0.29 * 2.55];
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|x| (x - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let p_hat: Vec<f64> = exps.iter().map(|e| e / sum).collect();
        let upper: Vec<f64> = p_hat.iter().map(|p| p * 1.9).collect();
        let w = [0.55, 0.71, 0.29];
        let rhs1: f64 = w.iter().zip(&p_hat).map(|(a, p)| a * p).sum();
        let eq = Arc::new(
            Mat::from_rows(vec![vec![1.0, 1.0, 1.0], w.to_vec()]).unwrap(),
        );
        FeasibilityProgram::new(fixed_zero, upper, eq, vec![1.0, rhs1]).unwrap()
    }

    #[test]
    fn toy_token_zero_is_feasible_with_known_witness() {
        let res = solve_feasibility(&toy_program(0), DEFAULT_TOL).unwrap();
        assert_eq!(res.status, Status::Feasible);
        let w = res.witness.unwrap();
        let expected = [0.0, 0.70, 0.30];
        for (got, want) in w.probs().iter().zip(&expected) {
            assert!((got - want).abs() <= 0.02, "{got} vs {want}");
        }
        assert!(res.residual <= DEFAULT_TOL);
    }

    #[test]
    fn toy_tokens_one_and_two_are_infeasible() {
        // Pinning token 2: 0.55 p0 + 0.71 p1 = 0.58533 with p0 + p1 = 1
        // forces p0 ~ 0.779, above its cap of ~0.629.
        for token in [1, 2] {
            let res = solve_feasibility(&toy_program(token), DEFAULT_TOL).unwrap();
            assert_eq!(res.status, Status::Infeasible, "token {token}");
            assert!(res.residual > DEFAULT_TOL);
        }
    }

    #[test]
    fn threshold_only_matches_mass_argument() {
        // Without moment rows the program is feasible iff
        // (1 - p_hat_i) * exp(delta) >= 1.
        let mut rng = seeded(41);
        for _ in 0..300 {
            let v = 8;
            let w: Vec<f64> = (0..v).map(|_| rng.random_range(0.01f64..1.0)).collect();
            let total: f64 = w.iter().sum();
            let p_hat: Vec<f64> = w.iter().map(|x| x / total).collect();
            let delta: f64 = rng.random_range(0.01..2.5);
            let token = rng.random_range(0..v);
            let upper: Vec<f64> = p_hat.iter().map(|p| p * delta.exp()).collect();
            let prog = simplex_only_program(upper, token).unwrap();
            let res = solve_feasibility(&prog, DEFAULT_TOL).unwrap();
            let closed_form = (1.0 - p_hat[token]) * delta.exp() >= 1.0;
            assert_eq!(res.is_feasible(), closed_form, "p = {p_hat:?} delta = {delta}");
        }
    }

    #[test]
    fn zero_upper_bounds_are_infeasible() {
        let prog = simplex_only_program(vec![0.0; 5], 2).unwrap();
        let res = solve_feasibility(&prog, DEFAULT_TOL).unwrap();
        assert_eq!(res.status, Status::Infeasible);
        // The whole unit of mass is missing.
        assert!((res.residual - 1.0).abs() < 1e-12);

        let exact = solve_feasibility_exact(&prog).unwrap();
        assert_eq!(exact.status, Status::Infeasible);
    }

    #[test]
    fn boundary_sum_exactly_one_is_feasible() {
        // Bounds away from the pinned index sum to exactly 1 and one moment
        // row is consistent with the unique vertex u.
        let upper = vec![0.25, 0.5, 0.25, 0.0];
        let unique = [0.25, 0.5, 0.25, 0.0];
        let row = vec![0.5, 0.25, -0.25, 1.0];
        let rhs1: f64 = row.iter().zip(&unique).map(|(a, x)| a * x).sum();
        let eq = Arc::new(Mat::from_rows(vec![vec![1.0; 4], row]).unwrap());
        let prog = FeasibilityProgram::new(3, upper, eq, vec![1.0, rhs1]).unwrap();

        let res = solve_feasibility(&prog, DEFAULT_TOL).unwrap();
        assert_eq!(res.status, Status::Feasible);
        let w = res.witness.unwrap();
        for (got, want) in w.probs().iter().zip(&unique) {
            assert!((got - want).abs() < 1e-9);
        }
        let exact = solve_feasibility_exact(&prog).unwrap();
        assert_eq!(exact.status, Status::Feasible);
    }

    #[test]
    fn exact_and_float_agree_on_grid_programs() {
        // Coefficients snapped to multiples of 1/64 keep the rational oracle
        // fast and put programs on a grid where near-boundary cases are rare.
        let mut rng = seeded(7);
        let mut checked = 0;
        for _ in 0..200 {
            let v = rng.random_range(3..10usize);
            let c = rng.random_range(0..3usize);
            let upper: Vec<f64> = (0..v)
                .map(|_| rng.random_range(0..96u32) as f64 / 64.0)
                .collect();
            let mut rows = vec![vec![1.0; v]];
            let mut rhs = vec![1.0];
            for _ in 0..c {
                let row: Vec<f64> = (0..v)
                    .map(|_| rng.random_range(-64..65i32) as f64 / 64.0)
                    .collect();
                rhs.push(rng.random_range(-64..65i32) as f64 / 64.0);
                rows.push(row);
            }
            let token = rng.random_range(0..v);
            let prog = FeasibilityProgram::new(
                token,
                upper,
                Arc::new(Mat::from_rows(rows).unwrap()),
                rhs,
            )
            .unwrap();
            let float = solve_feasibility(&prog, DEFAULT_TOL).unwrap();
            let exact = solve_feasibility_exact(&prog).unwrap();
            // Skip the documented near-boundary band.
            if exact.status == Status::Infeasible && exact.residual <= 1e-6 {
                continue;
            }
            checked += 1;
            assert_eq!(float.status, exact.status, "program {prog:?}");
        }
        assert!(checked > 100, "only {checked} programs left after filtering");
    }

    #[test]
    fn monotone_in_rows_and_bounds() {
        let mut rng = seeded(13);
        for _ in 0..150 {
            let v = 6;
            let upper: Vec<f64> = (0..v).map(|_| rng.random_range(0.0f64..0.8)).collect();
            let row: Vec<f64> = (0..v).map(|_| rng.random_range(-1.0f64..1.0)).collect();
            let rhs1: f64 = rng.random_range(-0.5..0.5);
            let token = rng.random_range(0..v);

            let base = simplex_only_program(upper.clone(), token).unwrap();
            let more = FeasibilityProgram::new(
                token,
                upper.clone(),
                Arc::new(Mat::from_rows(vec![vec![1.0; v], row.clone()]).unwrap()),
                vec![1.0, rhs1],
            )
            .unwrap();
            let r_base = solve_feasibility(&base, DEFAULT_TOL).unwrap();
            let r_more = solve_feasibility(&more, DEFAULT_TOL).unwrap();
            // Adding a row never turns infeasible into feasible.
            if r_base.status == Status::Infeasible {
                assert_eq!(r_more.status, Status::Infeasible);
            }

            // Raising a bound never turns feasible into infeasible.
            if r_more.status == Status::Feasible {
                let mut raised = upper.clone();
                let j = rng.random_range(0..v);
                raised[j] += rng.random_range(0.0..1.0);
                let prog2 = FeasibilityProgram::new(
                    token,
                    raised,
                    Arc::new(Mat::from_rows(vec![vec![1.0; v], row]).unwrap()),
                    vec![1.0, rhs1],
                )
                .unwrap();
                let r2 = solve_feasibility(&prog2, DEFAULT_TOL).unwrap();
                assert_eq!(r2.status, Status::Feasible);
            }
        }
    }

    #[test]
    fn witness_is_a_valid_distribution() {
        let mut rng = seeded(29);
        for _ in 0..100 {
            let v = 12;
            let w: Vec<f64> = (0..v).map(|_| rng.random_range(0.01f64..1.0)).collect();
            let total: f64 = w.iter().sum();
            let upper: Vec<f64> = w.iter().map(|x| 1.6 * x / total).collect();
            let token = rng.random_range(0..v);
            let prog = simplex_only_program(upper.clone(), token).unwrap();
            let res = solve_feasibility(&prog, DEFAULT_TOL).unwrap();
            if let Some(wit) = res.witness {
                let sum: f64 = wit.probs().iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
                assert!(wit.probs().iter().all(|&p| p >= 0.0));
                assert_eq!(wit.get(token), 0.0);
                for (p, u) in wit.probs().iter().zip(&upper) {
                    assert!(p <= &(u + 1e-9));
                }
                assert!(res.residual <= DEFAULT_TOL);
            }
        }
    }

    #[test]
    fn iteration_cap_reports_unresolved() {
        let upper = vec![0.001; 200];
        let prog = simplex_only_program(upper, 0).unwrap();
        // With a cap of 1 the solver cannot even finish its bound flips.
        let err = simplex::phase_one(&prog, DEFAULT_TOL, 1).unwrap_err();
        match err {
            Error::Unresolved { iterations } => assert_eq!(iterations, 1),
            other => panic!("expected Unresolved, got {other:?}"),
        }
    }

    #[test]
    fn exact_solver_refuses_large_instances() {
        let prog = simplex_only_program(vec![0.5; 65], 0).unwrap();
        assert!(matches!(
            solve_feasibility_exact(&prog),
            Err(Error::Refused(_))
        ));
    }
}
