//! Classical threshold heuristics: epsilon, eta, nucleus, top-k, and a fixed
//! threshold. Each rule reduces to a per-step threshold `tau`; truncation
//! keeps tokens at or above it and renormalizes.

use crate::error::{Error, Result};
use crate::prob::{entropy, sample_categorical, Distribution};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

/// Which heuristic a rule uses, without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Epsilon,
    Eta,
    Nucleus,
    TopK,
    FixedTau,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Epsilon => "epsilon",
            RuleKind::Eta => "eta",
            RuleKind::Nucleus => "nucleus",
            RuleKind::TopK => "topk",
            RuleKind::FixedTau => "tau",
        }
    }

    /// Instantiate a rule of this kind. For `TopK` the parameter is rounded
    /// to the nearest integer.
    pub fn with_param(self, param: f64) -> Result<TruncationRule> {
        let rule = match self {
            RuleKind::Epsilon => TruncationRule::Epsilon(param),
            RuleKind::Eta => TruncationRule::Eta(param),
            RuleKind::Nucleus => TruncationRule::Nucleus(param),
            RuleKind::TopK => TruncationRule::TopK(param.round() as usize),
            RuleKind::FixedTau => TruncationRule::FixedTau(param),
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl FromStr for RuleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon" => Ok(RuleKind::Epsilon),
            "eta" => Ok(RuleKind::Eta),
            "nucleus" => Ok(RuleKind::Nucleus),
            "topk" => Ok(RuleKind::TopK),
            "tau" => Ok(RuleKind::FixedTau),
            other => Err(Error::Config(format!(
                "unknown rule kind '{other}' (expected epsilon|eta|nucleus|topk|tau)"
            ))),
        }
    }
}

/// A truncation heuristic with its parameter.
///
/// Valid ranges: epsilon, eta and tau in [0, 1); nucleus in (0, 1];
/// top-k an integer >= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationRule {
    Epsilon(f64),
    Eta(f64),
    Nucleus(f64),
    TopK(usize),
    FixedTau(f64),
}

impl TruncationRule {
    pub fn kind(&self) -> RuleKind {
        match self {
            TruncationRule::Epsilon(_) => RuleKind::Epsilon,
            TruncationRule::Eta(_) => RuleKind::Eta,
            TruncationRule::Nucleus(_) => RuleKind::Nucleus,
            TruncationRule::TopK(_) => RuleKind::TopK,
            TruncationRule::FixedTau(_) => RuleKind::FixedTau,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            TruncationRule::Epsilon(p)
            | TruncationRule::Eta(p)
            | TruncationRule::Nucleus(p)
            | TruncationRule::FixedTau(p) => p,
            TruncationRule::TopK(k) => k as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationRule::Epsilon(p) | TruncationRule::Eta(p) | TruncationRule::FixedTau(p) => {
                if !(0.0..1.0).contains(&p) {
                    return Err(Error::Config(format!(
                        "{} parameter {p} outside [0, 1)",
                        self.kind().name()
                    )));
                }
            }
            TruncationRule::Nucleus(p) => {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::Config(format!(
                        "nucleus parameter {p} outside (0, 1]"
                    )));
                }
            }
            TruncationRule::TopK(k) => {
                if k < 1 {
                    return Err(Error::Config("topk parameter must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for TruncationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TruncationRule::TopK(k) => write!(f, "topk:{k}"),
            _ => write!(f, "{}:{}", self.kind().name(), self.parameter()),
        }
    }
}

impl FromStr for TruncationRule {
    type Err = Error;

    /// Parse the `kind:parameter` syntax, e.g. `epsilon:0.0009`, `eta:0.002`,
    /// `nucleus:0.95`, `topk:50`, `tau:0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("rule '{s}' is not in kind:parameter form")))?;
        let kind: RuleKind = kind.parse()?;
        if kind == RuleKind::TopK {
            let k: usize = param
                .parse()
                .map_err(|_| Error::Config(format!("topk parameter '{param}' is not an integer")))?;
            let rule = TruncationRule::TopK(k);
            rule.validate()?;
            return Ok(rule);
        }
        let p: f64 = param
            .parse()
            .map_err(|_| Error::Config(format!("rule parameter '{param}' is not a number")))?;
        kind.with_param(p)
    }
}

/// Result of truncating one distribution: the kept token set, the threshold
/// that produced it, and the renormalized distribution (zero outside the
/// accepted set).
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub accepted: Vec<usize>,
    pub threshold_used: f64,
    pub renormalized: Distribution,
}

impl CandidateSet {
    pub fn contains(&self, token: usize) -> bool {
        self.accepted.binary_search(&token).is_ok()
    }
}

/// Threshold implied by a rule on a concrete distribution.
///
/// Epsilon: tau = eps. Eta: tau = min(eta, sqrt(eta) * H(d)). Nucleus(p):
/// tau is the smallest probability whose greater-or-equal mass is still
/// within p; when even the top token's mass exceeds p the returned sentinel
/// sits strictly above every probability so that truncation falls back to
/// greedy. TopK(k): the k-th largest probability. FixedTau: the parameter.
pub fn threshold_for(rule: &TruncationRule, d: &Distribution) -> Result<f64> {
    rule.validate()?;
    Ok(match *rule {
        TruncationRule::Epsilon(eps) => eps,
        TruncationRule::FixedTau(tau) => tau,
        TruncationRule::Eta(eta) => eta.min(eta.sqrt() * entropy(d)),
        TruncationRule::TopK(k) => {
            let mut sorted: Vec<f64> = d.probs().to_vec();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            sorted[k.min(sorted.len()) - 1]
        }
        TruncationRule::Nucleus(p) => {
            // Sort descending, ascending index on ties, so candidate sets
            // are reproducible.
            let mut order: Vec<usize> = (0..d.len()).collect();
            order.sort_by(|&i, &j| {
                d.get(j)
                    .partial_cmp(&d.get(i))
                    .unwrap()
                    .then(i.cmp(&j))
            });
            // Mass of all tokens with probability >= the current value is
            // the cumulative sum through the end of that value's tie group.
            let mut tau = None;
            let mut cum = 0.0;
            let mut idx = 0;
            while idx < order.len() {
                let value = d.get(order[idx]);
                let mut end = idx;
                while end < order.len() && d.get(order[end]) == value {
                    cum += d.get(order[end]);
                    end += 1;
                }
                if cum <= p {
                    tau = Some(value);
                }
                idx = end;
            }
            match tau {
                Some(t) => t,
                // Degenerate case: the top token alone exceeds p. Sentinel
                // above every probability makes truncation greedy.
                None => (1.0 + d.get(d.argmax())) / 2.0,
            }
        }
    })
}

/// Keep tokens with probability at or above `tau`. Hard-zero tokens are
/// never accepted; an empty result falls back to the argmax.
pub fn truncate(d: &Distribution, tau: f64) -> CandidateSet {
    let mut accepted: Vec<usize> = d
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0 && p >= tau)
        .map(|(i, _)| i)
        .collect();
    if accepted.is_empty() {
        accepted.push(d.argmax());
    }
    let mut weights = vec![0.0; d.len()];
    for &i in &accepted {
        weights[i] = d.get(i);
    }
    let renormalized = Distribution::from_weights(weights)
        .expect("accepted set always carries positive mass");
    CandidateSet {
        accepted,
        threshold_used: tau,
        renormalized,
    }
}

/// Sample from the truncated, renormalized distribution.
pub fn truncation_sample<R: Rng + ?Sized>(
    d: &Distribution,
    rule: &TruncationRule,
    rng: &mut R,
) -> Result<usize> {
    let tau = threshold_for(rule, d)?;
    let set = truncate(d, tau);
    Ok(sample_categorical(&set.renormalized, rng))
}
