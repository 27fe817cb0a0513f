//! Linear network codes in global/local form.
//!
//! A [`GlobalCode`] of dimension `n` assigns each channel a global kernel
//! `f_e ∈ GF(q)^n` and each adjacent channel pair `(d, e)` a local coefficient
//! `k_{d,e}`, with `f_e = Σ_{d ∈ In(tail(e))} k_{d,e} f_d`. The source's `n`
//! imaginary input channels carry the standard basis.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use itertools::Itertools;
use thiserror::Error;

use crate::field::{FieldError, FieldSpec, Matrix, Symbol};
use crate::network::{binomial, Network, NetworkError, WiretapCollection, WiretapKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("code dimension must be at least 1")]
    InvalidDimension,
    #[error("dimension {n} exceeds the multicast capacity {c_min}")]
    DimensionExceedsCapacity { n: usize, c_min: usize },
    #[error("GF({q}) is too small for {sinks} sinks")]
    FieldTooSmallForSinks { q: u32, sinks: usize },
    #[error("wiretap sets of size {r} exceed the code dimension {n}")]
    WiretapSizeTooLarge { r: usize, n: usize },
    #[error("no local coefficients for edge `{0}` keep every sink at full rank")]
    NoValidCoefficients(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> CodeError {
    CodeError::Parse {
        line,
        msg: msg.into(),
    }
}

/// An input channel of some edge: one of the source's imaginary channels or a real edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Imaginary(usize),
    Edge(usize),
}

impl Channel {
    pub fn name(&self, net: &Network) -> String {
        match *self {
            Channel::Imaginary(j) => format!("__s_{}", j + 1),
            Channel::Edge(e) => net.edge(e).id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalCode {
    network: Network,
    n: usize,
    kernels: Vec<Vec<Symbol>>,
    /// Per edge, coefficients aligned with [`GlobalCode::inputs`].
    locals: Vec<Vec<Symbol>>,
}

/// Violations of the code invariants. Empty iff the code is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidityReport {
    /// Edges whose kernel differs from the combination of its inputs.
    pub edge_residuals: Vec<String>,
    /// Sinks whose incoming kernels have rank below `n`, with the shortfall.
    pub sink_deficits: Vec<(String, usize)>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.edge_residuals.is_empty() && self.sink_deficits.is_empty()
    }
}

/// Outcome of comparing the rank-based and cut-based wiretap collections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetBoundReport {
    pub subset: bool,
    pub code_sets: usize,
    pub cut_sets: usize,
    pub all_sets: u128,
}

/// The `n` input channels of an edge: imaginary channels for source edges,
/// real incoming edges of the tail otherwise.
fn inputs_of(net: &Network, n: usize, e: usize) -> Vec<Channel> {
    let tail = net.edge(e).tail;
    if tail == net.source() {
        (0..n).map(Channel::Imaginary).collect()
    } else {
        net.in_edges(tail)
            .iter()
            .map(|&d| Channel::Edge(d))
            .collect()
    }
}

fn unit(n: usize, j: usize) -> Vec<Symbol> {
    let mut v = vec![0; n];
    v[j] = 1;
    v
}

impl GlobalCode {
    /// Deterministic flow-path construction of an `n`-dimensional code.
    ///
    /// Each sink gets `n` edge-disjoint paths. Edges are visited in topological
    /// order; an edge on some path receives the lexicographically smallest
    /// coefficients over its path predecessors that keep every affected sink's
    /// frontier at rank `n`. Edges on no path carry the zero kernel.
    pub fn construct(net: &Network, n: usize) -> Result<Self, CodeError> {
        if n == 0 {
            return Err(CodeError::InvalidDimension);
        }
        let c_min = net.c_min();
        if n > c_min {
            return Err(CodeError::DimensionExceedsCapacity { n, c_min });
        }
        let field = net.field().clone();
        let q = field.order();
        if (q as usize) < net.sinks().len() {
            return Err(CodeError::FieldTooSmallForSinks {
                q,
                sinks: net.sinks().len(),
            });
        }

        let ne = net.num_edges();
        // uses[e]: (sink position, path slot, predecessor channel)
        let mut uses: Vec<Vec<(usize, usize, Channel)>> = vec![Vec::new(); ne];
        for (ti, &t) in net.sinks().iter().enumerate() {
            for (slot, path) in net.edge_disjoint_paths(t, n).into_iter().enumerate() {
                let mut prev = Channel::Imaginary(slot);
                for e in path {
                    uses[e].push((ti, slot, prev));
                    prev = Channel::Edge(e);
                }
            }
        }

        let mut kernels = vec![vec![0; n]; ne];
        let mut locals: Vec<Vec<Symbol>> = (0..ne)
            .map(|e| vec![0; inputs_of(net, n, e).len()])
            .collect();
        let mut frontier: Vec<Vec<Vec<Symbol>>> =
            vec![(0..n).map(|j| unit(n, j)).collect(); net.sinks().len()];

        let kernel_of = |kernels: &Vec<Vec<Symbol>>, c: Channel| match c {
            Channel::Imaginary(j) => unit(n, j),
            Channel::Edge(d) => kernels[d].clone(),
        };

        for &e in net.topological_edges() {
            if uses[e].is_empty() {
                continue;
            }
            let preds: Vec<Channel> = uses[e]
                .iter()
                .map(|&(_, _, p)| p)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let pred_kernels: Vec<Vec<Symbol>> =
                preds.iter().map(|&c| kernel_of(&kernels, c)).collect();
            let total = field
                .space_size(preds.len())
                .ok_or_else(|| CodeError::NoValidCoefficients(net.edge(e).id.clone()))?;

            let mut chosen = None;
            for idx in 0..total {
                // first predecessor is the most significant digit
                let mut coeffs = field.vector_from_index(idx, preds.len());
                coeffs.reverse();
                let f = combine(&field, n, &coeffs, &pred_kernels);
                let keeps_rank = uses[e].iter().all(|&(ti, slot, _)| {
                    let mut cols = frontier[ti].clone();
                    cols[slot] = f.clone();
                    Matrix::from_columns(&field, n, &cols)
                        .expect("canonical entries")
                        .rank()
                        == n
                });
                if keeps_rank {
                    chosen = Some((coeffs, f));
                    break;
                }
            }
            let (coeffs, f) =
                chosen.ok_or_else(|| CodeError::NoValidCoefficients(net.edge(e).id.clone()))?;

            let inputs = inputs_of(net, n, e);
            for (c, k) in preds.iter().zip(&coeffs) {
                let pos = inputs
                    .iter()
                    .position(|x| x == c)
                    .expect("predecessor is an input");
                locals[e][pos] = *k;
            }
            for &(ti, slot, _) in &uses[e] {
                frontier[ti][slot] = f.clone();
            }
            kernels[e] = f;
        }

        Ok(Self {
            network: net.clone(),
            n,
            kernels,
            locals,
        })
    }

    /// Builds a code from local coefficients alone, propagating kernels in
    /// topological order. `locals[e]` is aligned with [`inputs`](Self::inputs).
    pub fn from_locals(
        net: &Network,
        n: usize,
        locals: Vec<Vec<Symbol>>,
    ) -> Result<Self, CodeError> {
        let field = net.field();
        let mut kernels = vec![vec![0; n]; net.num_edges()];
        for &e in net.topological_edges() {
            let inputs = inputs_of(net, n, e);
            if locals[e].len() != inputs.len() {
                return Err(FieldError::DimensionMismatch(format!(
                    "edge `{}` has {} local coefficients, expected {}",
                    net.edge(e).id,
                    locals[e].len(),
                    inputs.len()
                ))
                .into());
            }
            let mut f = vec![0; n];
            for (c, &k) in inputs.iter().zip(&locals[e]) {
                field.check(k)?;
                if k == 0 {
                    continue;
                }
                match *c {
                    Channel::Imaginary(j) => f[j] = field.add(f[j], k),
                    Channel::Edge(d) => {
                        for (x, &y) in f.iter_mut().zip(&kernels[d]) {
                            *x = field.add(*x, field.mul(k, y));
                        }
                    }
                }
            }
            kernels[e] = f;
        }
        Ok(Self {
            network: net.clone(),
            n,
            kernels,
            locals,
        })
    }

    /// Assembles a code without checking kernel/local consistency; see
    /// [`check_validity`](Self::check_validity).
    pub fn from_parts(
        net: &Network,
        n: usize,
        kernels: Vec<Vec<Symbol>>,
        locals: Vec<Vec<Symbol>>,
    ) -> Result<Self, CodeError> {
        let field = net.field();
        if kernels.len() != net.num_edges() || locals.len() != net.num_edges() {
            return Err(FieldError::DimensionMismatch("one entry per edge required".into()).into());
        }
        for (e, (f, k)) in kernels.iter().zip(&locals).enumerate() {
            if f.len() != n || k.len() != inputs_of(net, n, e).len() {
                return Err(FieldError::DimensionMismatch(format!(
                    "edge `{}` has malformed kernel or locals",
                    net.edge(e).id
                ))
                .into());
            }
            for &x in f.iter().chain(k) {
                field.check(x)?;
            }
        }
        Ok(Self {
            network: net.clone(),
            n,
            kernels,
            locals,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn field(&self) -> &FieldSpec {
        self.network.field()
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn kernel(&self, e: usize) -> &[Symbol] {
        &self.kernels[e]
    }

    pub fn kernels(&self) -> &[Vec<Symbol>] {
        &self.kernels
    }

    pub fn locals(&self, e: usize) -> &[Symbol] {
        &self.locals[e]
    }

    pub fn inputs(&self, e: usize) -> Vec<Channel> {
        inputs_of(&self.network, self.n, e)
    }

    /// k_{d,e} for an adjacent pair, `None` if `d` is not an input of `e`.
    pub fn local(&self, d: Channel, e: usize) -> Option<Symbol> {
        let pos = self.inputs(e).iter().position(|&c| c == d)?;
        Some(self.locals[e][pos])
    }

    pub fn kernel_of_channel(&self, c: Channel) -> Vec<Symbol> {
        match c {
            Channel::Imaginary(j) => unit(self.n, j),
            Channel::Edge(e) => self.kernels[e].clone(),
        }
    }

    /// F_A = [f_e : e ∈ A] as an `n × |A|` matrix.
    pub fn kernel_matrix(&self, edges: &[usize]) -> Matrix {
        let cols: Vec<Vec<Symbol>> = edges.iter().map(|&e| self.kernels[e].clone()).collect();
        Matrix::from_columns(self.field(), self.n, &cols).expect("kernels are canonical")
    }

    pub fn sink_matrix(&self, t: usize) -> Matrix {
        self.kernel_matrix(self.network.in_edges(t))
    }

    /// Every violated invariant: per-edge residuals and per-sink rank deficits.
    pub fn check_validity(&self) -> ValidityReport {
        let field = self.field();
        let mut report = ValidityReport::default();
        for e in 0..self.network.num_edges() {
            let pred: Vec<Vec<Symbol>> = self
                .inputs(e)
                .into_iter()
                .map(|c| self.kernel_of_channel(c))
                .collect();
            let expected = combine(field, self.n, &self.locals[e], &pred);
            if expected != self.kernels[e] {
                report.edge_residuals.push(self.network.edge(e).id.clone());
            }
        }
        for &t in self.network.sinks() {
            let rank = self.sink_matrix(t).rank();
            if rank < self.n {
                report
                    .sink_deficits
                    .push((self.network.node_name(t).to_string(), self.n - rank));
            }
        }
        report
    }

    /// Ẽ_r: size-`r` edge sets whose kernel matrix has rank `r`, for
    /// `1 ≤ r ≤ n`.
    pub fn enumerate_code_wiretap_sets(&self, r: usize) -> Result<WiretapCollection, CodeError> {
        if r == 0 {
            return Err(NetworkError::ZeroSecurityLevel.into());
        }
        if r > self.n {
            return Err(CodeError::WiretapSizeTooLarge { r, n: self.n });
        }
        let sets = (0..self.network.num_edges())
            .combinations(r)
            .filter(|a| self.kernel_matrix(a).rank() == r);
        Ok(WiretapCollection::from_index_sets(
            &self.network,
            r,
            WiretapKind::CodeRank,
            sets,
        ))
    }

    /// Compares Ẽ_r against the topology-only collection Ẽ_r^cut.
    pub fn verify_subset_bound(&self, r: usize) -> Result<SubsetBoundReport, CodeError> {
        let code_sets = self.enumerate_code_wiretap_sets(r)?;
        // Ẽ_r^cut is defined for any r; only the code dimension bounds r here.
        let cut_sets = WiretapCollection::from_index_sets(
            &self.network,
            r,
            WiretapKind::Topology,
            (0..self.network.num_edges())
                .combinations(r)
                .filter(|a| self.network.min_cut_to_edge_indices(a) == r),
        );
        let subset = code_sets.sets.iter().all(|s| cut_sets.contains(s));
        Ok(SubsetBoundReport {
            subset,
            code_sets: code_sets.len(),
            cut_sets: cut_sets.len(),
            all_sets: binomial(self.network.num_edges(), r),
        })
    }

    /// Code file: header, one kernel line per edge, then real-to-real local lines.
    pub fn to_text(&self) -> String {
        let net = &self.network;
        let mut out = String::new();
        writeln!(out, "code n={} q={}", self.n, self.field().order()).unwrap();
        for (e, edge) in net.edges().iter().enumerate() {
            write!(out, "kernel {}", edge.id).unwrap();
            for x in &self.kernels[e] {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
        for e in 0..net.num_edges() {
            for (c, k) in self.inputs(e).iter().zip(&self.locals[e]) {
                if let Channel::Edge(d) = c {
                    writeln!(out, "local {} {} {}", net.edge(*d).id, net.edge(e).id, k).unwrap();
                }
            }
        }
        out
    }

    /// Parses a code file against its network. Local coefficients on
    /// source edges are read off their kernels; absent local lines mean zero.
    pub fn parse(text: &str, net: &Network) -> Result<Self, CodeError> {
        let field = net.field();
        let mut n = None;
        let mut kernels: Vec<Option<Vec<Symbol>>> = vec![None; net.num_edges()];
        let mut local_lines = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let tokens: Vec<&str> = raw
                .split('#')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .collect();
            let Some((&kw, args)) = tokens.split_first() else {
                continue;
            };
            match kw {
                "code" => {
                    if n.is_some() {
                        return Err(parse_err(lineno, "duplicate `code` header"));
                    }
                    let (mut dim, mut q) = (None, None);
                    for a in args {
                        match a.split_once('=') {
                            Some(("n", v)) => dim = v.parse::<usize>().ok(),
                            Some(("q", v)) => q = v.parse::<u32>().ok(),
                            _ => return Err(parse_err(lineno, format!("bad header field `{a}`"))),
                        }
                    }
                    let dim = dim.ok_or_else(|| parse_err(lineno, "header needs n=<dim>"))?;
                    let q = q.ok_or_else(|| parse_err(lineno, "header needs q=<size>"))?;
                    if q != field.order() {
                        return Err(parse_err(
                            lineno,
                            format!("code is over GF({q}), network over GF({})", field.order()),
                        ));
                    }
                    if dim == 0 {
                        return Err(CodeError::InvalidDimension);
                    }
                    n = Some(dim);
                }
                "kernel" => {
                    let n = n.ok_or_else(|| parse_err(lineno, "`kernel` before `code` header"))?;
                    let (id, vals) = args
                        .split_first()
                        .ok_or_else(|| parse_err(lineno, "missing edge id"))?;
                    let e = net.edge_index(id)?;
                    if kernels[e].is_some() {
                        return Err(parse_err(lineno, format!("duplicate kernel for `{id}`")));
                    }
                    if vals.len() != n {
                        return Err(parse_err(lineno, format!("kernel needs {n} entries")));
                    }
                    let v = parse_symbols(vals, field, lineno)?;
                    kernels[e] = Some(v);
                }
                "local" => {
                    let [d, e, k] = args else {
                        return Err(parse_err(lineno, "expected `local <d> <e> <k>`"));
                    };
                    let k = parse_symbols(&[k], field, lineno)?[0];
                    local_lines.push((lineno, net.edge_index(d)?, net.edge_index(e)?, k));
                }
                _ => return Err(parse_err(lineno, format!("unknown directive `{kw}`"))),
            }
        }
        let n = n.ok_or_else(|| parse_err(0, "missing `code` header"))?;
        let kernels: Vec<Vec<Symbol>> = kernels
            .into_iter()
            .enumerate()
            .map(|(e, k)| {
                k.ok_or_else(|| parse_err(0, format!("no kernel for `{}`", net.edge(e).id)))
            })
            .collect::<Result<_, _>>()?;
        let mut locals: Vec<Vec<Symbol>> = (0..net.num_edges())
            .map(|e| {
                if net.edge(e).tail == net.source() {
                    kernels[e].clone()
                } else {
                    vec![0; net.in_edges(net.edge(e).tail).len()]
                }
            })
            .collect();
        for (lineno, d, e, k) in local_lines {
            let pos = net
                .in_edges(net.edge(e).tail)
                .iter()
                .position(|&x| x == d)
                .ok_or_else(|| {
                    parse_err(
                        lineno,
                        format!("`{}` does not feed `{}`", net.edge(d).id, net.edge(e).id),
                    )
                })?;
            locals[e][pos] = k;
        }
        Self::from_parts(net, n, kernels, locals)
    }
}

pub(crate) fn parse_symbols(
    tokens: &[&str],
    field: &FieldSpec,
    line: usize,
) -> Result<Vec<Symbol>, CodeError> {
    tokens
        .iter()
        .map(|t| {
            let v: Symbol = t
                .parse()
                .map_err(|_| parse_err(line, format!("bad field element `{t}`")))?;
            field
                .check(v)
                .map_err(|_| parse_err(line, format!("{v} is not in GF({})", field.order())))
        })
        .collect()
}

fn combine(field: &FieldSpec, n: usize, coeffs: &[Symbol], vectors: &[Vec<Symbol>]) -> Vec<Symbol> {
    let mut f = vec![0; n];
    for (&k, v) in coeffs.iter().zip(vectors) {
        if k == 0 {
            continue;
        }
        for (x, &y) in f.iter_mut().zip(v) {
            *x = field.add(*x, field.mul(k, y));
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> Network {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        Network::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn kernel_by_id(code: &GlobalCode, id: &str) -> Vec<Symbol> {
        code.kernel(code.network().edge_index(id).unwrap()).to_vec()
    }

    #[test]
    fn butterfly_gf3() {
        let net = fixture("butterfly.net");
        let code = GlobalCode::construct(&net, 2).unwrap();
        assert!(code.check_validity().is_valid());
        let rank = |ids: &[&str]| code.kernel_matrix(&net.edge_indices(ids).unwrap()).rank();
        assert_eq!(rank(&["e8", "e6"]), 2);
        assert_eq!(rank(&["e9", "e7"]), 2);
    }

    #[test]
    fn butterfly_gf2_is_classic() {
        let net = fixture("butterfly.net").with_field(FieldSpec::new(2).unwrap());
        let code = GlobalCode::construct(&net, 2).unwrap();
        assert!(code.check_validity().is_valid());
        let f = FieldSpec::new(2).unwrap();
        let sum: Vec<u32> = kernel_by_id(&code, "e3")
            .iter()
            .zip(kernel_by_id(&code, "e4"))
            .map(|(&a, b)| f.add(a, b))
            .collect();
        assert_eq!(kernel_by_id(&code, "e5"), sum);
        let e5 = net.edge_index("e5").unwrap();
        let e3 = net.edge_index("e3").unwrap();
        let e4 = net.edge_index("e4").unwrap();
        assert_eq!(code.local(Channel::Edge(e3), e5), Some(1));
        assert_eq!(code.local(Channel::Edge(e4), e5), Some(1));
    }

    #[test]
    fn parallel_identity() {
        let net = fixture("parallel3-gf2.net");
        let code = GlobalCode::construct(&net, 3).unwrap();
        let f = net.field();
        assert_eq!(code.kernel_matrix(&[0, 1, 2]), Matrix::identity(f, 3));
    }

    #[test]
    fn unused_edges_get_zero_kernels() {
        let net = fixture("parallel3-gf5.net");
        let code = GlobalCode::construct(&net, 2).unwrap();
        assert!(code.check_validity().is_valid());
        assert_eq!(kernel_by_id(&code, "e3"), vec![0, 0]);
        assert_eq!(code.locals(2), &[0, 0]);
        let w = code.enumerate_code_wiretap_sets(1).unwrap();
        assert_eq!(w.sets, vec![vec!["e1".to_string()], vec!["e2".to_string()]]);
    }

    #[test]
    fn construction_errors() {
        let net = fixture("butterfly.net");
        assert_eq!(
            GlobalCode::construct(&net, 3),
            Err(CodeError::DimensionExceedsCapacity { n: 3, c_min: 2 })
        );
        assert_eq!(
            GlobalCode::construct(&net, 0),
            Err(CodeError::InvalidDimension)
        );
        let comb = fixture("combination.net").with_field(FieldSpec::new(2).unwrap());
        assert_eq!(
            GlobalCode::construct(&comb, 2),
            Err(CodeError::FieldTooSmallForSinks { q: 2, sinks: 3 })
        );
    }

    #[test]
    fn all_fixtures_construct() {
        for name in [
            "butterfly.net",
            "combination.net",
            "diamond3.net",
            "mixed-sinks.net",
            "parallel2-gf2.net",
            "parallel3-gf2.net",
            "parallel3-gf5.net",
        ] {
            let net = fixture(name);
            for n in 1..=net.c_min() {
                let code = GlobalCode::construct(&net, n).unwrap();
                assert!(code.check_validity().is_valid(), "{name} n={n}");
                let again = GlobalCode::from_locals(&net, n, code.locals.clone()).unwrap();
                assert_eq!(again.kernels, code.kernels, "{name} n={n}");
            }
        }
    }

    #[test]
    fn corrupted_kernel_is_reported() {
        let net = fixture("butterfly.net");
        let code = GlobalCode::construct(&net, 2).unwrap();
        let e8 = net.edge_index("e8").unwrap();
        let mut kernels = code.kernels.clone();
        kernels[e8][1] = (kernels[e8][1] + 1) % 3;
        let bad = GlobalCode::from_parts(&net, 2, kernels, code.locals.clone()).unwrap();
        let report = bad.check_validity();
        assert_eq!(report.edge_residuals, vec!["e8".to_string()]);
    }

    #[test]
    fn repetition_code_has_sink_deficit() {
        let net = fixture("parallel2-gf2.net");
        // both edges carry the first imaginary channel
        let code = GlobalCode::from_locals(&net, 2, vec![vec![1, 0], vec![1, 0]]).unwrap();
        let report = code.check_validity();
        assert!(report.edge_residuals.is_empty());
        assert_eq!(report.sink_deficits, vec![("t".to_string(), 1)]);
    }

    #[test]
    fn code_wiretap_sets() {
        let net = fixture("butterfly.net");
        let code = GlobalCode::construct(&net, 2).unwrap();
        assert_eq!(code.enumerate_code_wiretap_sets(1).unwrap().len(), 9);
        // every pair except the ones with equal kernels
        assert_eq!(code.enumerate_code_wiretap_sets(2).unwrap().len(), 36 - 9);
        assert_eq!(
            code.enumerate_code_wiretap_sets(3).unwrap_err(),
            CodeError::WiretapSizeTooLarge { r: 3, n: 2 }
        );
        let p3 = GlobalCode::construct(&fixture("parallel3-gf2.net"), 3).unwrap();
        assert_eq!(p3.enumerate_code_wiretap_sets(2).unwrap().len(), 3);
    }

    #[test]
    fn subset_bound() {
        let code = GlobalCode::construct(&fixture("butterfly.net"), 2).unwrap();
        let r = code.verify_subset_bound(1).unwrap();
        assert_eq!(
            r,
            SubsetBoundReport {
                subset: true,
                code_sets: 9,
                cut_sets: 9,
                all_sets: 9
            }
        );
        let p3 = GlobalCode::construct(&fixture("parallel3-gf2.net"), 3).unwrap();
        let r = p3.verify_subset_bound(2).unwrap();
        assert_eq!(
            (r.subset, r.code_sets, r.cut_sets, r.all_sets),
            (true, 3, 3, 3)
        );
    }

    #[test]
    fn code_file_roundtrip() {
        let net = fixture("butterfly.net");
        let code = GlobalCode::construct(&net, 2).unwrap();
        let text = code.to_text();
        assert!(text.starts_with("code n=2 q=3\nkernel e1 "));
        assert!(!text.contains("__s_"));
        let back = GlobalCode::parse(&text, &net).unwrap();
        assert_eq!(back, code);
    }

    #[test]
    fn code_parse_errors() {
        let net = fixture("parallel2-gf2.net");
        assert!(GlobalCode::parse("kernel e1 1\n", &net).is_err());
        assert!(GlobalCode::parse("code n=1 q=3\nkernel e1 1\nkernel e2 1\n", &net).is_err());
        assert!(GlobalCode::parse("code n=1 q=2\nkernel e1 1\n", &net).is_err());
        assert!(GlobalCode::parse("code n=1 q=2\nkernel e1 2\nkernel e2 1\n", &net).is_err());
        assert!(GlobalCode::parse(
            "code n=1 q=2\nkernel e1 1\nkernel e2 1\nlocal e1 e2 1\n",
            &net
        )
        .is_err());
    }
}
