//! Exact-rational phase-1 simplex: the arbiter for the floating-point
//! solver on small instances.
//!
//! Same bounded-variable algorithm as the float engine but over
//! `Ratio<BigInt>` with strict comparisons and no tolerances anywhere.
//! Every finite f64 is a dyadic rational, so the conversion is exact and
//! the verdict is arithmetic truth for the program as given.

use super::{FeasibilityProgram, FeasibilityResult, Status};
use crate::error::{Error, Result};
use crate::prob::Distribution;
use num::{BigRational, FromPrimitive, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    Fixed,
}

fn rat(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x)
        .ok_or_else(|| Error::InvalidInput(format!("{x} is not representable as a rational")))
}

pub(super) fn phase_one_exact(
    prog: &FeasibilityProgram,
    iter_cap: usize,
) -> Result<FeasibilityResult> {
    let v = prog.n_vars();
    let m = prog.eq_rhs().len();
    let n_total = v + m;
    let zero = BigRational::zero();

    let upper: Vec<BigRational> = (0..v)
        .map(|j| rat(prog.effective_upper(j)))
        .collect::<Result<_>>()?;

    let sign: Vec<i32> = prog
        .eq_rhs()
        .iter()
        .map(|&b| if b >= 0.0 { 1 } else { -1 })
        .collect();

    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(n_total);
        for &a in prog.eq_lhs().row(i) {
            let r = rat(a)?;
            row.push(if sign[i] > 0 { r } else { -r });
        }
        for k in 0..m {
            row.push(if k == i {
                BigRational::from_integer(1.into())
            } else {
                zero.clone()
            });
        }
        tab.push(row);
    }
    let mut x_b: Vec<BigRational> = prog
        .eq_rhs()
        .iter()
        .zip(&sign)
        .map(|(&b, &s)| {
            let r = rat(b)?;
            Ok(if s > 0 { r } else { -r })
        })
        .collect::<Result<_>>()?;

    let mut zrow: Vec<BigRational> = (0..n_total)
        .map(|j| {
            if j < v {
                -tab.iter().fold(zero.clone(), |acc, row| acc + &row[j])
            } else {
                zero.clone()
            }
        })
        .collect();

    let mut state: Vec<VarState> = (0..n_total)
        .map(|j| {
            if j < v {
                if upper[j].is_zero() {
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

    let objective = |basis: &[usize], x_b: &[BigRational]| -> BigRational {
        basis
            .iter()
            .zip(x_b)
            .filter(|(&col, _)| col >= v)
            .fold(BigRational::zero(), |acc, (_, val)| acc + val)
    };

    let mut iters = 0usize;
    let mut scan_from = 0usize;

    loop {
        if objective(&basis, &x_b).is_zero() {
            break;
        }

        let mut entering: Option<(usize, i8)> = None;
        for j in scan_from..n_total {
            match state[j] {
                VarState::AtLower => {
                    if zrow[j] < zero {
                        entering = Some((j, 1));
                        break;
                    }
                }
                VarState::AtUpper => {
                    if zrow[j] > zero {
                        entering = Some((j, -1));
                        break;
                    }
                }
                _ => {}
            }
        }
        let Some((j, dir)) = entering else {
            if scan_from == 0 {
                break;
            }
            scan_from = 0;
            continue;
        };

        iters += 1;
        if iters > iter_cap {
            return Err(Error::Unresolved { iterations: iter_cap });
        }

        // Ratio test; None = unlimited.
        let mut t_best: Option<BigRational> = Some(upper[j].clone());
        let mut leave_row: Option<usize> = None;
        for i in 0..m {
            let w = if dir > 0 {
                tab[i][j].clone()
            } else {
                -tab[i][j].clone()
            };
            let t_i = if w > zero {
                &x_b[i] / &w
            } else if w < zero {
                let col = basis[i];
                if col < v {
                    (&upper[col] - &x_b[i]) / (-w)
                } else {
                    continue; // artificial: no upper bound
                }
            } else {
                continue;
            };
            let better = match &t_best {
                None => true,
                Some(t) => &t_i < t,
            };
            let tied = matches!(&t_best, Some(t) if &t_i == t);
            if better {
                t_best = Some(t_i);
                leave_row = Some(i);
            } else if tied {
                match leave_row {
                    Some(r) if basis[i] < basis[r] => leave_row = Some(i),
                    None => {} // tie with the entering span: prefer the flip
                    _ => {}
                }
            }
        }

        let Some(t) = t_best else {
            return Err(Error::Numerical(
                "exact phase-1 direction unbounded; inconsistent program data".into(),
            ));
        };

        match leave_row {
            None => {
                for i in 0..m {
                    let delta = if dir > 0 {
                        &t * &tab[i][j]
                    } else {
                        -(&t * &tab[i][j])
                    };
                    x_b[i] -= delta;
                }
                state[j] = if dir > 0 {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
                scan_from = j + 1;
            }
            Some(r) => {
                for i in 0..m {
                    if i != r {
                        let delta = if dir > 0 {
                            &t * &tab[i][j]
                        } else {
                            -(&t * &tab[i][j])
                        };
                        x_b[i] -= delta;
                    }
                }
                let entering_value = if dir > 0 {
                    t.clone()
                } else {
                    &upper[j] - &t
                };

                let leaving = basis[r];
                let w_r = if dir > 0 {
                    tab[r][j].clone()
                } else {
                    -tab[r][j].clone()
                };
                state[leaving] = if leaving >= v {
                    VarState::Fixed
                } else if w_r > zero {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };

                let piv = tab[r][j].clone();
                for x in tab[r].iter_mut() {
                    *x /= &piv;
                }
                let pivot_row = tab[r].clone();
                for (i, row) in tab.iter_mut().enumerate() {
                    if i == r {
                        continue;
                    }
                    let factor = row[j].clone();
                    if !factor.is_zero() {
                        for (x, p) in row.iter_mut().zip(&pivot_row) {
                            *x -= &factor * p;
                        }
                    }
                }
                let zfactor = zrow[j].clone();
                if !zfactor.is_zero() {
                    for (z, p) in zrow.iter_mut().zip(&pivot_row) {
                        *z -= &zfactor * p;
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
    if obj.is_zero() {
        let mut x = vec![0.0; v];
        for j in 0..v {
            let val = match state[j] {
                VarState::Basic(r) => x_b[r].clone(),
                VarState::AtLower | VarState::Fixed => zero.clone(),
                VarState::AtUpper => upper[j].clone(),
            };
            if val.is_negative() {
                return Err(Error::Numerical(
                    "exact witness has a negative component".into(),
                ));
            }
            x[j] = val.to_f64().ok_or_else(|| {
                Error::Numerical("exact witness does not fit in f64".into())
            })?;
        }
        let witness = Distribution::from_weights(x)
            .map_err(|e| Error::Numerical(format!("degenerate exact witness: {e}")))?;
        Ok(FeasibilityResult {
            status: Status::Feasible,
            witness: Some(witness),
            residual: 0.0,
        })
    } else {
        Ok(FeasibilityResult {
            status: Status::Infeasible,
            witness: None,
            residual: obj.to_f64().unwrap_or(f64::INFINITY),
        })
    }
}
