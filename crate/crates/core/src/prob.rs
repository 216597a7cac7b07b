//! Probability primitives shared by every other module: stable softmax,
//! entropy, cross-entropy, categorical sampling, and the conversion between
//! a log-underestimation budget and a probability threshold.
//!
//! All information quantities are in nats.

use crate::error::{Error, Result};
use rand::Rng;

/// Absolute tolerance for the sum-to-one invariant. One canonical value
/// so the policy cannot drift between modules.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A probability vector over a vocabulary. Entries are non-negative and sum
/// to one; entries that are exactly zero are treated as hard zeros
/// throughout (out of support, zero upper bound in feasibility programs).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validate and renormalize. The input must already sum to one within
    /// [`NORMALIZATION_TOL`]; anything further off is an error rather than
    /// something to silently repair.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        let mut sum = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "probability entry {i} is {p}, expected a finite non-negative value"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {sum}, outside 1 +/- {NORMALIZATION_TOL}"
            )));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Distribution { probs })
    }

    /// Normalize an arbitrary non-negative weight vector with positive mass.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "weight entry {i} is {w}, expected a finite non-negative value"
                )));
            }
            sum += w;
        }
        if sum <= 0.0 {
            return Err(Error::InvalidInput("weights have zero total mass".into()));
        }
        let probs = weights.into_iter().map(|w| w / sum).collect();
        Ok(Distribution { probs })
    }

    pub fn uniform(v: usize) -> Self {
        Distribution {
            probs: vec![1.0 / v as f64; v],
        }
    }

    pub fn one_hot(v: usize, index: usize) -> Self {
        let mut probs = vec![0.0; v];
        probs[index] = 1.0;
        Distribution { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Lowest index attaining the maximum probability.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Raw pre-softmax scores. Finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Logits {
    values: Vec<f64>,
}

impl Logits {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty logit vector".into()));
        }
        if let Some((i, &x)) = values.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("logit entry {i} is {x}")));
        }
        Ok(Logits { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Upper bound on log-probability underestimation, in nats. Non-negative;
/// positive infinity is allowed and means "behave greedily".
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Delta(f64);

impl Delta {
    pub const ZERO: Delta = Delta(0.0);
    pub const INFINITY: Delta = Delta(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidInput(format!(
                "delta must be >= 0 (or +inf), got {value}"
            )));
        }
        Ok(Delta(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// Numerically stable softmax via max subtraction. The argmax of the input
/// is preserved, and entries that underflow are exactly zero.
pub fn softmax(logits: &Logits) -> Distribution {
    let xs = logits.values();
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut exps: Vec<f64> = xs.iter().map(|&x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    for e in exps.iter_mut() {
        *e /= sum;
    }
    Distribution { probs: exps }
}

/// Column of log probabilities: `x - max - ln(sum(exp(x - max)))`.
/// No intermediate overflow for any finite input.
pub fn log_softmax(logits: &Logits) -> Vec<f64> {
    let xs = logits.values();
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse: f64 = xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln();
    xs.iter().map(|&x| x - max - lse).collect()
}

/// Shannon entropy in nats, with 0 * log 0 = 0.
pub fn entropy(d: &Distribution) -> f64 {
    d.probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Cross entropy H(p, q) = -sum_i p_i ln q_i in nats, over the support of
/// `p`. If `q` is zero anywhere `p` is positive the result is positive
/// infinity; the infinite value is the flag.
pub fn cross_entropy(p: &Distribution, q: &Distribution) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut ce = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            ce -= pi * qi.ln();
        }
    }
    ce
}

/// Draw one index with probability proportional to the entries.
/// Deterministic given the generator state.
pub fn sample_categorical<R: Rng + ?Sized>(d: &Distribution, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in d.probs().iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    // Rounding can leave acc marginally below 1; fall back to the last
    // positive-probability token.
    last_positive
}

/// tau = 1 - exp(-delta). Strictly increasing; maps 0 to 0 and +inf to 1.
pub fn tau_from_delta(delta: Delta) -> f64 {
    -(-delta.value()).exp_m1()
}

/// Inverse of [`tau_from_delta`] on [0, 1). tau >= 1 means greedy behavior
/// and has no finite delta, so the caller must handle it explicitly.
pub fn delta_from_tau(tau: f64) -> Result<Delta> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::Domain(format!(
            "tau = {tau} is outside [0, 1); tau >= 1 corresponds to greedy decoding"
        )));
    }
    Delta::new(-(-tau).ln_1p())
}
