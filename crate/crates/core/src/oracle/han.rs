use std::collections::HashMap;

use super::OracleError;
use crate::network::binomial;

/// Largest number of variables [`han_profile`] accepts.
pub const MAX_VARIABLES: usize = 12;

const SUM_TOLERANCE: f64 = 1e-12;
const MONOTONE_TOLERANCE: f64 = 1e-9;

/// A finite joint distribution of `n` discrete variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    n: usize,
    rows: Vec<(Vec<u32>, f64)>,
}

impl ProbabilityTable {
    /// Rows may repeat an outcome; their masses add up.
    pub fn new(rows: Vec<(Vec<u32>, f64)>) -> Result<Self, OracleError> {
        let n = rows
            .first()
            .map(|r| r.0.len())
            .ok_or_else(|| OracleError::NotADistribution("empty table".into()))?;
        if n == 0 {
            return Err(OracleError::NotADistribution(
                "outcomes have no variables".into(),
            ));
        }
        if n > MAX_VARIABLES {
            return Err(OracleError::NotADistribution(format!(
                "{n} variables, at most {MAX_VARIABLES} supported"
            )));
        }
        if let Some((x, _)) = rows.iter().find(|r| r.0.len() != n) {
            return Err(OracleError::NotADistribution(format!(
                "outcome {x:?} does not have {n} variables"
            )));
        }
        if let Some((x, p)) = rows.iter().find(|r| !(r.1 >= 0.0 && r.1.is_finite())) {
            return Err(OracleError::NotADistribution(format!(
                "outcome {x:?} has probability {p}"
            )));
        }
        let sum: f64 = rows.iter().map(|r| r.1).sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(OracleError::NotADistribution(format!(
                "probabilities sum to {sum}"
            )));
        }
        Ok(Self { n, rows })
    }

    /// Parses lines `<x1> ... <xn> <prob>`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, OracleError> {
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| OracleError::Parse { line: i + 1, msg };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() < 2 {
                return Err(err("expected at least one value and a probability".into()));
            }
            let (values, prob) = tokens.split_at(tokens.len() - 1);
            let x = values
                .iter()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| err(format!("bad value `{t}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let p = prob[0]
                .parse::<f64>()
                .map_err(|_| err(format!("bad probability `{}`", prob[0])))?;
            rows.push((x, p));
        }
        Self::new(rows)
    }

    pub fn num_variables(&self) -> usize {
        self.n
    }

    /// Entropy in bits of the variables selected by `mask`.
    fn entropy(&self, mask: u32) -> f64 {
        let mut marginal: HashMap<Vec<u32>, f64> = HashMap::new();
        for (x, p) in &self.rows {
            let key: Vec<u32> = (0..self.n)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| x[j])
                .collect();
            *marginal.entry(key).or_default() += p;
        }
        marginal
            .values()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }
}

/// `h_r = (1 / C(n-1, r-1)) Σ_{|α|=r} H(X_α | X_ᾱ)` for `r = 1..n`, in units
/// of `log base`. Fails if the sequence decreases by more than `1e-9`.
pub fn han_profile(table: &ProbabilityTable, base: f64) -> Result<Vec<f64>, OracleError> {
    let n = table.n;
    let full = (1u32 << n) - 1;
    let entropies: Vec<f64> = (0..=full).map(|m| table.entropy(m)).collect();
    let scale = base.log2();
    let mut sums = vec![0.0; n + 1];
    for alpha in 1..=full {
        let r = alpha.count_ones() as usize;
        sums[r] += entropies[full as usize] - entropies[(full & !alpha) as usize];
    }
    let profile: Vec<f64> = (1..=n)
        .map(|r| sums[r] / binomial(n - 1, r - 1) as f64 / scale)
        .collect();
    for r in 1..n {
        if profile[r] < profile[r - 1] - MONOTONE_TOLERANCE {
            return Err(OracleError::MonotonicityViolated {
                r,
                lower: profile[r - 1],
                upper: profile[r],
            });
        }
    }
    Ok(profile)
}
