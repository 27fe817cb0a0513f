use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;
use rayon::prelude::*;

use super::{check_budget, with_jobs, OracleError, DEFAULT_ENUMERATION_BUDGET};
use crate::field::{Matrix, Symbol};
use crate::secure::SecureCodeBundle;

/// Exact joint counts of `(M, Y_A)` over all equiprobable `(m, k)` inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    q: u32,
    omega: usize,
    key_dim: usize,
    arity: usize,
    counts: BTreeMap<(Vec<Symbol>, Vec<Symbol>), u64>,
}

impl JointDistribution {
    /// Builds a distribution from raw counts, checking that every message
    /// appears exactly `q^key_dim` times.
    pub fn from_counts(
        q: u32,
        omega: usize,
        key_dim: usize,
        arity: usize,
        counts: BTreeMap<(Vec<Symbol>, Vec<Symbol>), u64>,
    ) -> Result<Self, OracleError> {
        let per_message = (q as u64).pow(key_dim as u32);
        let messages = (q as u64).pow(omega as u32);
        let mut marginal: BTreeMap<&Vec<Symbol>, u64> = BTreeMap::new();
        for ((m, y), &c) in &counts {
            if m.len() != omega || y.len() != arity || m.iter().chain(y).any(|&x| x >= q) {
                return Err(OracleError::InvalidDistribution(format!(
                    "outcome ({m:?}, {y:?}) is malformed"
                )));
            }
            *marginal.entry(m).or_default() += c;
        }
        if marginal.len() as u64 != messages || marginal.values().any(|&c| c != per_message) {
            return Err(OracleError::InvalidDistribution(format!(
                "each of the {messages} messages must occur {per_message} times"
            )));
        }
        Ok(Self {
            q,
            omega,
            key_dim,
            arity,
            counts,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn counts(&self) -> &BTreeMap<(Vec<Symbol>, Vec<Symbol>), u64> {
        &self.counts
    }

    /// Observation counts for one message.
    pub fn conditional(&self, m: &[Symbol]) -> BTreeMap<Vec<Symbol>, u64> {
        self.counts
            .iter()
            .filter(|((mm, _), _)| mm == m)
            .map(|((_, y), &c)| (y.clone(), c))
            .collect()
    }

    /// Whether every message induces the same observation table; this is
    /// exactly `I(M; Y_A) = 0`.
    pub fn is_independent(&self) -> bool {
        let mut tables = self
            .counts
            .iter()
            .chunk_by(|((m, _), _)| m.clone())
            .into_iter()
            .map(|(_, group)| group.map(|((_, y), c)| (y.clone(), *c)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .into_iter();
        let first = tables.next();
        tables.all(|t| Some(&t) == first.as_ref())
    }
}

/// Shannon entropy, in nats, of a count table summing to `total`.
fn entropy_nats<'a>(counts: impl Iterator<Item = &'a u64>, total: u64) -> f64 {
    let n = total as f64;
    counts
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// I(M; Y_A) in units of log q. Exactly zero when the per-message tables agree.
pub fn mutual_information(dist: &JointDistribution) -> f64 {
    if dist.is_independent() {
        return 0.0;
    }
    let total = dist.total();
    let mut m_counts: BTreeMap<&Vec<Symbol>, u64> = BTreeMap::new();
    let mut y_counts: BTreeMap<&Vec<Symbol>, u64> = BTreeMap::new();
    for ((m, y), &c) in &dist.counts {
        *m_counts.entry(m).or_default() += c;
        *y_counts.entry(y).or_default() += c;
    }
    let h_m = entropy_nats(m_counts.values(), total);
    let h_y = entropy_nats(y_counts.values(), total);
    let h_my = entropy_nats(dist.counts.values(), total);
    (h_m + h_y - h_my) / (dist.q as f64).ln()
}

/// Every `(m, k, symbols)` triple, in base-q order of `m` then `k`.
struct Transcript {
    rows: Vec<(Vec<Symbol>, Vec<Symbol>, Vec<Symbol>)>,
}

impl Transcript {
    fn enumerate(bundle: &SecureCodeBundle, budget: u64) -> Result<Self, OracleError> {
        let f = bundle.field();
        let (omega, kd) = (bundle.omega(), bundle.key_dim());
        let total = check_budget(f.space_size(omega + kd), budget)?;
        let keys = f.space_size(kd).expect("smaller than total");
        let mut rows = Vec::with_capacity(total as usize);
        for mi in 0..total / keys {
            let m = f.vector_from_index(mi, omega);
            for ki in 0..keys {
                let k = f.vector_from_index(ki, kd);
                let y = bundle.encode(&m, &k)?;
                rows.push((m.clone(), k, y));
            }
        }
        Ok(Self { rows })
    }

    fn distribution(&self, bundle: &SecureCodeBundle, set: &[usize]) -> JointDistribution {
        let mut counts = BTreeMap::new();
        for (m, _, y) in &self.rows {
            let obs: Vec<Symbol> = set.iter().map(|&e| y[e]).collect();
            *counts.entry((m.clone(), obs)).or_insert(0) += 1;
        }
        JointDistribution {
            q: bundle.field().order(),
            omega: bundle.omega(),
            key_dim: bundle.key_dim(),
            arity: set.len(),
            counts,
        }
    }
}

/// Exact distribution of `(M, Y_A)` for the edge ids in `set`.
pub fn observation_distribution<S: AsRef<str>>(
    bundle: &SecureCodeBundle,
    set: &[S],
    budget: u64,
) -> Result<JointDistribution, OracleError> {
    let idx = bundle.network().edge_indices(set)?;
    let transcript = Transcript::enumerate(bundle, budget)?;
    Ok(transcript.distribution(bundle, &idx))
}

/// Algebraic test for `I(M; Y_A) = 0`.
///
/// `Y_A = M·G_M + c·G_C + K·G_K` where the `G` blocks are row ranges of
/// `Q⁻¹ F_A`; the message is hidden iff `rowspace(G_M) ⊆ rowspace(G_K)`.
pub fn rank_security_criterion<S: AsRef<str>>(
    bundle: &SecureCodeBundle,
    set: &[S],
) -> Result<bool, OracleError> {
    let idx = bundle.network().edge_indices(set)?;
    Ok(criterion_for_indices(bundle, &idx))
}

pub(crate) fn criterion_for_indices(bundle: &SecureCodeBundle, set: &[usize]) -> bool {
    let g = bundle.channel_matrix().select_columns(set);
    let n = bundle.dimension();
    let g_m = g.row_range(0..bundle.omega());
    let g_k = g.row_range(n - bundle.key_dim()..n);
    row_space_contained(&g_m, &g_k)
}

/// `rowspace(inner) ⊆ rowspace(outer)`.
pub fn row_space_contained(inner: &Matrix, outer: &Matrix) -> bool {
    let stacked = outer.vstack(inner).expect("blocks share columns and field");
    stacked.rank() == outer.rank()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Only scan sets of size exactly `r`.
    pub fast: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
    /// Overrides [`DEFAULT_ENUMERATION_BUDGET`].
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetResult {
    pub set: Vec<String>,
    /// I(M; Y_A) in log-q units.
    pub mi: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub r: usize,
    pub i: usize,
    pub results: Vec<SetResult>,
    /// Sinks that failed to recover some input.
    pub undecodable_sinks: Vec<String>,
    /// Index into `results` of the largest leakage, first in scan order on ties.
    pub worst: Option<usize>,
    pub max_mi: f64,
    pub pass: bool,
}

impl SecurityReport {
    pub fn decodable(&self) -> bool {
        self.undecodable_sinks.is_empty()
    }

    pub fn worst_set(&self) -> Option<&SetResult> {
        self.worst.map(|w| &self.results[w])
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for res in &self.results {
            writeln!(
                out,
                "set {} mi={:.9} {}",
                res.set.join(" "),
                res.mi,
                if res.pass { "pass" } else { "fail" }
            )
            .unwrap();
        }
        let worst = self
            .worst_set()
            .map(|w| w.set.join(","))
            .unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "verdict {} worst={} maxmi={:.9}",
            if self.pass { "pass" } else { "fail" },
            worst,
            self.max_mi
        )
        .unwrap();
        out
    }
}

/// Leakage tolerance for imperfect security, in log-q units.
pub const LEAKAGE_TOLERANCE: f64 = 1e-9;

/// Scans every wiretap set with `1 ≤ |A| ≤ r` (or `|A| = r` with `fast`) and
/// every sink.
///
/// With `i = 0` a set passes iff its per-message observation tables are
/// identical. With `i > 0` it passes iff `I(M; Y_A) ≤ i + 1e-9`.
pub fn verify_security(
    bundle: &SecureCodeBundle,
    opts: VerifyOptions,
) -> Result<SecurityReport, OracleError> {
    let budget = opts.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    let transcript = Transcript::enumerate(bundle, budget)?;
    let net = bundle.network();
    let r = bundle.security_level();
    let i = bundle.imperfect_level();
    let sizes = if opts.fast { r..=r } else { 1..=r };

    let mut sets: Vec<Vec<usize>> = Vec::new();
    for size in sizes {
        let mut by_id: Vec<Vec<usize>> = (0..net.num_edges()).combinations(size).collect();
        by_id
            .iter_mut()
            .for_each(|s| s.sort_by(|&a, &b| net.edge(a).id.cmp(&net.edge(b).id)));
        by_id.sort_by(|a, b| {
            a.iter()
                .map(|&e| &net.edge(e).id)
                .cmp(b.iter().map(|&e| &net.edge(e).id))
        });
        sets.extend(by_id);
    }

    let results: Vec<SetResult> = with_jobs(opts.jobs, || {
        sets.par_iter()
            .map(|set| {
                let dist = transcript.distribution(bundle, set);
                let mi = mutual_information(&dist);
                let pass = if i == 0 {
                    dist.is_independent()
                } else {
                    mi <= i as f64 + LEAKAGE_TOLERANCE
                };
                SetResult {
                    set: set.iter().map(|&e| net.edge(e).id.clone()).collect(),
                    mi,
                    pass,
                }
            })
            .collect()
    });

    let mut undecodable_sinks = Vec::new();
    for &t in net.sinks() {
        let ok = transcript.rows.iter().all(|(m, k, y)| {
            let obs: Vec<Symbol> = net.in_edges(t).iter().map(|&e| y[e]).collect();
            matches!(bundle.decode_at_node(t, &obs), Ok((dm, dk)) if &dm == m && &dk == k)
        });
        if !ok {
            undecodable_sinks.push(net.node_name(t).to_string());
        }
    }

    let mut worst = None;
    let mut max_mi = 0.0f64;
    for (idx, res) in results.iter().enumerate() {
        if worst.is_none() || res.mi > max_mi {
            worst = Some(idx);
            max_mi = res.mi;
        }
    }
    let pass = results.iter().all(|r| r.pass) && undecodable_sinks.is_empty();
    Ok(SecurityReport {
        r,
        i,
        results,
        undecodable_sinks,
        worst,
        max_mi,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::lnc::GlobalCode;
    use crate::network::Network;

    fn fixture(name: &str) -> Network {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        Network::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn table(q: u32, omega: usize, kd: usize, rows: &[(&[u32], &[u32])]) -> JointDistribution {
        let mut counts = BTreeMap::new();
        for (m, y) in rows {
            *counts.entry((m.to_vec(), y.to_vec())).or_insert(0) += 1;
        }
        JointDistribution::from_counts(q, omega, kd, rows[0].1.len(), counts).unwrap()
    }

    #[test]
    fn mi_examples() {
        // Y = K
        let d = table(
            2,
            1,
            1,
            &[(&[0], &[0]), (&[0], &[1]), (&[1], &[0]), (&[1], &[1])],
        );
        assert_eq!(mutual_information(&d), 0.0);
        // Y = M
        let d = table(
            2,
            1,
            1,
            &[(&[0], &[0]), (&[0], &[0]), (&[1], &[1]), (&[1], &[1])],
        );
        assert!((mutual_information(&d) - 1.0).abs() < 1e-12);
        // Y = (M + K, K) over GF(2): (m, k) -> (m ^ k, k)
        let d = table(
            2,
            1,
            1,
            &[
                (&[0], &[0, 0]),
                (&[0], &[1, 1]),
                (&[1], &[1, 0]),
                (&[1], &[0, 1]),
            ],
        );
        assert!((mutual_information(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_distribution() {
        let mut counts = BTreeMap::new();
        counts.insert((vec![0], vec![0]), 2);
        assert!(JointDistribution::from_counts(2, 1, 1, 1, counts).is_err());
    }

    #[test]
    fn parallel3_gf2_single_edge_is_uniform() {
        let net = fixture("parallel3-gf2.net");
        let b = SecureCodeBundle::build(&net, 1, 1, 0).unwrap();
        let d = observation_distribution(&b, &["e1"], DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(d.total(), 4);
        for m in 0..2 {
            let cond = d.conditional(&[m]);
            assert_eq!(cond.values().sum::<u64>(), 2);
            assert_eq!(cond, BTreeMap::from([(vec![0], 1), (vec![1], 1)]));
        }
    }

    #[test]
    fn clear_message_edge() {
        // identity mixing: X = [m c k] lands on e1 unchanged
        let net = fixture("parallel3-gf5.net");
        let code = GlobalCode::construct(&net, 3).unwrap();
        let id = Matrix::identity(net.field(), 3);
        let b = SecureCodeBundle::new(code, id, 1, 1, 0).unwrap();
        let d = observation_distribution(&b, &["e1"], DEFAULT_ENUMERATION_BUDGET).unwrap();
        for ((m, y), &c) in d.counts() {
            assert_eq!(m, y);
            assert_eq!(c, 5);
        }
        assert!((mutual_information(&d) - 1.0).abs() < 1e-12);
        assert!(!rank_security_criterion(&b, &["e1"]).unwrap());
        assert!(rank_security_criterion(&b, &["e3"]).unwrap());
        let rep = verify_security(&b, VerifyOptions::default()).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.worst_set().unwrap().set, vec!["e1".to_string()]);
        assert!((rep.max_mi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_space_examples() {
        let f = FieldSpec::new(3).unwrap();
        let zero = Matrix::zeros(&f, 1, 2);
        let g = Matrix::from_rows(&f, &[vec![1, 2]]).unwrap();
        assert!(row_space_contained(&zero, &g));
        assert!(row_space_contained(&g, &g));
        assert!(!row_space_contained(&g, &zero));
    }

    #[test]
    fn butterfly_report() {
        let b = SecureCodeBundle::build(&fixture("butterfly.net"), 1, 1, 0).unwrap();
        let rep = verify_security(&b, VerifyOptions::default()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.results.len(), 9);
        assert!(rep.results.iter().all(|r| r.mi == 0.0 && r.pass));
        assert!(rep.decodable());
        let text = rep.to_text();
        assert!(text.starts_with("set e1 mi=0.000000000 pass\n"));
        assert!(text.ends_with("verdict pass worst=e1 maxmi=0.000000000\n"));
    }

    #[test]
    fn fast_scan_agrees_with_full_scan() {
        for (name, omega, r, i) in [
            ("parallel3-gf5.net", 1, 2, 0),
            ("parallel3-gf5.net", 2, 2, 1),
            ("diamond3.net", 1, 2, 0),
            ("diamond3.net", 1, 2, 1),
        ] {
            let b = SecureCodeBundle::build(&fixture(name), omega, r, i).unwrap();
            let full = verify_security(&b, VerifyOptions::default()).unwrap();
            let fast = verify_security(
                &b,
                VerifyOptions {
                    fast: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(full.pass, fast.pass, "{name}");
            assert!((full.max_mi - fast.max_mi).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn parallel_jobs_are_deterministic() {
        let b = SecureCodeBundle::build(&fixture("diamond3.net"), 1, 2, 0).unwrap();
        let serial = verify_security(&b, VerifyOptions::default()).unwrap();
        let par = verify_security(
            &b,
            VerifyOptions {
                jobs: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(serial.to_text(), par.to_text());
    }

    #[test]
    fn budget_is_enforced() {
        let b = SecureCodeBundle::build(&fixture("parallel3-gf5.net"), 1, 1, 0).unwrap();
        let opts = VerifyOptions {
            budget: Some(10),
            ..Default::default()
        };
        assert!(matches!(
            verify_security(&b, opts),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }
}
