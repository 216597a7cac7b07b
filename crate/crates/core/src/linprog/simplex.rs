//! Floating-point phase-1 bounded-variable simplex (full tableau).
//!
//! Minimizes the sum of artificial variables starting from every structural
//! variable at its lower bound. Entering choice is Bland's rule (smallest
//! eligible index); ties in the ratio test leave the basic variable with the
//! smallest index. Bound flips do not change the basis, so the eligibility
//! scan resumes after the flipped column instead of restarting — with
//! reduced costs unchanged, every earlier column is still ineligible, which
//! keeps long flip runs (small-delta programs flip most of the vocabulary)
//! linear instead of quadratic.

use super::{FeasibilityProgram, FeasibilityResult, Status};
use crate::error::{Error, Result};
use crate::prob::Distribution;

const ELIGIBILITY_EPS: f64 = 1e-9;
// Entries below this never serve as pivots; inputs here are unit-scale
// (orthonormal rows plus the ones row), so anything smaller is noise.
const RATIO_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Pinned at zero (fixed index, hard-zero bound) or a retired artificial.
    Fixed,
}

pub(super) fn phase_one(
    prog: &FeasibilityProgram,
    tol: f64,
    iter_cap: usize,
) -> Result<FeasibilityResult> {
    let v = prog.n_vars();
    let m = prog.eq_rhs().len();
    let n_total = v + m;

    // Row signs make the initial residuals (= artificial values) non-negative.
    let sign: Vec<f64> = prog
        .eq_rhs()
        .iter()
        .map(|&b| if b >= 0.0 { 1.0 } else { -1.0 })
        .collect();

    // tab[i] = i-th row of B^-1 [A | I] (sign-fixed); starts as [A | I].
    let mut tab: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(n_total);
            row.extend(prog.eq_lhs().row(i).iter().map(|&x| sign[i] * x));
            for k in 0..m {
                row.push(if k == i { 1.0 } else { 0.0 });
            }
            row
        })
        .collect();
    let mut x_b: Vec<f64> = prog
        .eq_rhs()
        .iter()
        .zip(&sign)
        .map(|(&b, &s)| s * b)
        .collect();

    // Reduced costs: structural cost 0, artificial cost 1, artificials basic.
    let mut zrow: Vec<f64> = (0..n_total)
        .map(|j| {
            if j < v {
                -(0..m).map(|i| tab[i][j]).sum::<f64>()
            } else {
                0.0
            }
        })
        .collect();

    let mut state: Vec<VarState> = (0..n_total)
        .map(|j| {
            if j < v {
                if prog.effective_upper(j) <= 0.0 {
                    VarState::Fixed
                } else {
                    VarState::AtLower
                }
            } else {
                VarState::Basic(j - v)
            }
        })
        .collect();
    let mut basis: Vec<usize> = (v..n_total).collect();

    let ub = |j: usize| -> f64 {
        if j < v {
            prog.effective_upper(j)
        } else {
            f64::INFINITY
        }
    };
    let objective = |basis: &[usize], x_b: &[f64]| -> f64 {
        basis
            .iter()
            .zip(x_b)
            .filter(|(&col, _)| col >= v)
            .map(|(_, &val)| val.max(0.0))
            .sum()
    };

    let scale_b: f64 = 1.0 + prog.eq_rhs().iter().map(|b| b.abs()).sum::<f64>();
    let early_stop = 1e-13 * scale_b;

    let mut iters = 0usize;
    let mut scan_from = 0usize;

    loop {
        if objective(&basis, &x_b) <= early_stop {
            break;
        }

        // Bland: smallest eligible index. Columns before scan_from were
        // ineligible at the current basis and stay so across bound flips.
        let mut entering: Option<(usize, i8)> = None;
        for j in scan_from..n_total {
            match state[j] {
                VarState::AtLower => {
                    if zrow[j] < -ELIGIBILITY_EPS {
                        entering = Some((j, 1));
                        break;
                    }
                }
                VarState::AtUpper => {
                    if zrow[j] > ELIGIBILITY_EPS {
                        entering = Some((j, -1));
                        break;
                    }
                }
                _ => {}
            }
        }
        let Some((j, dir)) = entering else {
            if scan_from == 0 {
                break; // optimal
            }
            // Defensive: restart once from 0 in case a pivot was missed.
            scan_from = 0;
            continue;
        };

        iters += 1;
        if iters > iter_cap {
            return Err(Error::Unresolved { iterations: iter_cap });
        }

        // Ratio test. Entering moves by t >= 0 away from its current bound;
        // basic values change by -dir * t * tab[.][j].
        let dirf = dir as f64;
        let mut t_best = ub(j); // entering variable's own span
        let mut leave_row: Option<usize> = None;
        for (i, row) in tab.iter().enumerate() {
            let w = dirf * row[j];
            let t_i = if w > RATIO_EPS {
                // basic i travels toward its lower bound 0
                x_b[i].max(0.0) / w
            } else if w < -RATIO_EPS {
                let u_i = ub(basis[i]);
                if u_i.is_finite() {
                    (u_i - x_b[i]).max(0.0) / (-w)
                } else {
                    continue;
                }
            } else {
                continue;
            };
            let tie = 1e-10 * (1.0 + t_best.abs());
            if t_i < t_best - tie {
                t_best = t_i;
                leave_row = Some(i);
            } else if (t_i - t_best).abs() <= tie {
                // Bland tie-break: smallest basic variable index leaves.
                if let Some(r) = leave_row {
                    if basis[i] < basis[r] {
                        leave_row = Some(i);
                    }
                } else if t_i <= t_best {
                    t_best = t_best.min(t_i);
                    leave_row = Some(i);
                }
            }
        }

        if !t_best.is_finite() {
            return Err(Error::Numerical(
                "phase-1 direction unbounded; inconsistent program data".into(),
            ));
        }

        match leave_row {
            None => {
                // Bound flip: basis unchanged, reduced costs unchanged.
                let t = t_best;
                for (i, row) in tab.iter().enumerate() {
                    x_b[i] -= dirf * t * row[j];
                }
                state[j] = if dir > 0 {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
                scan_from = j + 1;
            }
            Some(r) => {
                let t = t_best.max(0.0);
                for (i, row) in tab.iter().enumerate() {
                    if i != r {
                        x_b[i] -= dirf * t * row[j];
                    }
                }
                let entering_value = if dir > 0 { t } else { ub(j) - t };

                // Leaving variable lands on whichever of its bounds the
                // ratio test hit.
                let leaving = basis[r];
                let w_r = dirf * tab[r][j];
                let hit_lower = w_r > 0.0;
                state[leaving] = if leaving >= v {
                    VarState::Fixed // retired artificial, never re-enters
                } else if hit_lower {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };

                // Row reduction.
                let piv = tab[r][j];
                let inv = 1.0 / piv;
                for x in tab[r].iter_mut() {
                    *x *= inv;
                }
                let pivot_row = tab[r].clone();
                for (i, row) in tab.iter_mut().enumerate() {
                    if i == r {
                        continue;
                    }
                    let factor = row[j];
                    if factor != 0.0 {
                        for (x, p) in row.iter_mut().zip(&pivot_row) {
                            *x -= factor * p;
                        }
                    }
                }
                let zfactor = zrow[j];
                if zfactor != 0.0 {
                    for (z, p) in zrow.iter_mut().zip(&pivot_row) {
                        *z -= zfactor * p;
                    }
                }

                basis[r] = j;
                state[j] = VarState::Basic(r);
                x_b[r] = entering_value;
                scan_from = 0;
            }
        }
    }

    let obj = objective(&basis, &x_b);
    if obj > tol {
        return Ok(FeasibilityResult {
            status: Status::Infeasible,
            witness: None,
            residual: obj,
        });
    }

    // Extract the witness and audit it against the original data.
    let mut x = vec![0.0; v];
    for j in 0..v {
        let raw = match state[j] {
            VarState::Basic(r) => x_b[r],
            VarState::AtLower | VarState::Fixed => 0.0,
            VarState::AtUpper => prog.effective_upper(j),
        };
        x[j] = raw.clamp(0.0, prog.effective_upper(j));
    }
    let mut residual = 0.0f64;
    for i in 0..prog.eq_rhs().len() {
        let lhs: f64 = prog
            .eq_lhs()
            .row(i)
            .iter()
            .zip(&x)
            .map(|(a, p)| a * p)
            .sum();
        residual = residual.max((lhs - prog.eq_rhs()[i]).abs());
    }
    let witness = Distribution::from_weights(x)
        .map_err(|e| Error::Numerical(format!("degenerate witness: {e}")))?;
    Ok(FeasibilityResult {
        status: Status::Feasible,
        witness: Some(witness),
        residual,
    })
}
