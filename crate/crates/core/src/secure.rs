//! Secure linear network codes.
//!
//! Given an `n`-dimensional base code with `n = C_min`, pick an invertible
//! `Q = [b_1 … b_n]` whose first `n − r` columns span a subspace meeting
//! `⟨f_e : e ∈ A⟩` only at zero for every `A ∈ Ẽ_r`. The source input is
//! `X = [M C K]` (message, constant padding, key) and channel `e` carries
//! `X · Q⁻¹ · f_e`. The padding block lets the message rate `ω` be anything
//! with `ω + r ≤ n` while the key stays at `r` symbols.

use std::fmt::Write as _;

use thiserror::Error;

use crate::field::{spans_intersect_trivially, FieldError, FieldSpec, Matrix, Symbol};
use crate::lnc::{parse_symbols, Channel, CodeError, GlobalCode};
use crate::network::{Network, NetworkError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SecureError {
    #[error("GF({q}) exhausted while choosing column {column} of the secure basis; retry with a larger field")]
    FieldTooSmall { q: u32, column: usize },
    #[error("information rate must be at least 1")]
    InvalidRate,
    #[error("rate too high: omega {omega} + key {key_dim} exceeds capacity {n}")]
    RateTooHigh {
        omega: usize,
        key_dim: usize,
        n: usize,
    },
    #[error("imperfect-security level {i} exceeds security level {r}")]
    ImperfectLevelTooLarge { i: usize, r: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sink cannot decode: incoming kernels have rank {rank} < {n}")]
    Undecodable { rank: usize, n: usize },
    #[error("observation is inconsistent with any valid input: {0}")]
    InconsistentObservation(String),
    #[error("local propagation disagrees with the global kernel on edge `{0}`")]
    PropagationMismatch(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> SecureError {
    SecureError::Parse {
        line,
        msg: msg.into(),
    }
}

/// How the security claim of a bundle is backed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guarantee {
    /// The leading columns of `Q` avoid every wiretap span at level `r` with `ω + r ≤ n`; leakage is bounded
    /// by construction.
    Constructive,
    /// Security must be established by the enumeration oracle.
    Empirical,
}

/// Greedy lexicographic basis; the first `n − level` columns satisfy the
/// wiretap-avoidance condition for every rank-`level` edge set of `code`.
fn greedy_basis(code: &GlobalCode, level: usize) -> Result<Matrix, SecureError> {
    let field = code.field();
    let n = code.dimension();
    let wiretaps: Vec<Matrix> = if level == 0 {
        Vec::new()
    } else {
        let net = code.network();
        code.enumerate_code_wiretap_sets(level)?
            .sets
            .iter()
            .map(|s| code.kernel_matrix(&net.edge_indices(s).expect("ids come from the network")))
            .collect()
    };
    let total = field.space_size(n).ok_or(SecureError::FieldTooSmall {
        q: field.order(),
        column: 1,
    })?;
    let constrained = n - level;

    let mut cols: Vec<Vec<Symbol>> = Vec::with_capacity(n);
    // A rejected candidate stays rejected for later columns of the same kind,
    // so each scan resumes after the previous pick.
    let mut start = 1u64;
    for j in 0..n {
        if j == constrained {
            start = 1;
        }
        let mut found = None;
        for idx in start..total {
            let v = field.vector_from_index(idx, n);
            let mut trial = cols.clone();
            trial.push(v);
            let b = Matrix::from_columns(field, n, &trial)?;
            if b.rank() != j + 1 {
                continue;
            }
            if j < constrained
                && !wiretaps
                    .iter()
                    .all(|fa| spans_intersect_trivially(&b, fa).expect("same shape"))
            {
                continue;
            }
            found = Some((idx, trial));
            break;
        }
        let (idx, trial) = found.ok_or(SecureError::FieldTooSmall {
            q: field.order(),
            column: j + 1,
        })?;
        cols = trial;
        start = idx + 1;
    }
    Ok(Matrix::from_columns(field, n, &cols)?)
}

/// Chooses `Q` for security level `r` by greedy lexicographic scan.
///
/// Vectors of GF(q)^n are visited in increasing base-q index with the first
/// coordinate as the least significant digit.
pub fn choose_secure_basis(code: &GlobalCode, r: usize) -> Result<Matrix, SecureError> {
    code.network().check_security_level(r, code.dimension())?;
    greedy_basis(code, r)
}

/// Whether the first `n − level` columns of `q` avoid every rank-`level` wiretap span.
pub fn condition_holds(code: &GlobalCode, q: &Matrix, level: usize) -> Result<bool, SecureError> {
    let n = code.dimension();
    if level == 0 || level >= n {
        return Ok(level == 0);
    }
    let lead: Vec<usize> = (0..n - level).collect();
    let lead = q.select_columns(&lead);
    let net = code.network();
    for set in code.enumerate_code_wiretap_sets(level)?.sets {
        let fa = code.kernel_matrix(&net.edge_indices(&set)?);
        if !spans_intersect_trivially(&lead, &fa)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecureCodeBundle {
    base: GlobalCode,
    mixing: Matrix,
    mixing_inv: Matrix,
    /// Q⁻¹ · F_E, one column per edge.
    channel_matrix: Matrix,
    omega: usize,
    r: usize,
    i: usize,
    key_dim: usize,
    constant: Vec<Symbol>,
}

impl SecureCodeBundle {
    /// Runs the whole construction on `net` with `n = C_min`.
    pub fn build(net: &Network, omega: usize, r: usize, i: usize) -> Result<Self, SecureError> {
        if r == 0 {
            return Err(NetworkError::ZeroSecurityLevel.into());
        }
        if omega == 0 {
            return Err(SecureError::InvalidRate);
        }
        if i > r {
            return Err(SecureError::ImperfectLevelTooLarge { i, r });
        }
        let n = net.c_min();
        net.check_security_level(r, n)?;
        let key_dim = r - i;
        if omega + key_dim > n {
            return Err(SecureError::RateTooHigh { omega, key_dim, n });
        }
        let code = GlobalCode::construct(net, n)?;
        let level = basis_level(n, omega, r, key_dim);
        let q = greedy_basis(&code, level)?;
        Self::new(code, q, omega, r, i)
    }

    /// Assembles a bundle around an arbitrary invertible `q`. Wiretap
    /// avoidance is not enforced here; see [`guarantee`](Self::guarantee).
    pub fn new(
        base: GlobalCode,
        q: Matrix,
        omega: usize,
        r: usize,
        i: usize,
    ) -> Result<Self, SecureError> {
        let n = base.dimension();
        if r == 0 {
            return Err(NetworkError::ZeroSecurityLevel.into());
        }
        if omega == 0 {
            return Err(SecureError::InvalidRate);
        }
        if i > r {
            return Err(SecureError::ImperfectLevelTooLarge { i, r });
        }
        let key_dim = r - i;
        if omega + key_dim > n {
            return Err(SecureError::RateTooHigh { omega, key_dim, n });
        }
        if q.rows() != n || q.cols() != n {
            return Err(SecureError::DimensionMismatch(format!(
                "Q is {}x{}, code dimension is {n}",
                q.rows(),
                q.cols()
            )));
        }
        if q.field() != base.field() {
            return Err(FieldError::FieldMismatch {
                left: q.field().order(),
                right: base.field().order(),
            }
            .into());
        }
        let mixing_inv = q.inverse()?;
        let all: Vec<usize> = (0..base.network().num_edges()).collect();
        let channel_matrix = mixing_inv.mul(&base.kernel_matrix(&all))?;
        Ok(Self {
            constant: vec![0; n - omega - key_dim],
            base,
            mixing: q,
            mixing_inv,
            channel_matrix,
            omega,
            r,
            i,
            key_dim,
        })
    }

    pub fn base(&self) -> &GlobalCode {
        &self.base
    }

    pub fn network(&self) -> &Network {
        self.base.network()
    }

    pub fn field(&self) -> &FieldSpec {
        self.base.field()
    }

    pub fn dimension(&self) -> usize {
        self.base.dimension()
    }

    /// Q
    pub fn mixing(&self) -> &Matrix {
        &self.mixing
    }

    pub fn mixing_inverse(&self) -> &Matrix {
        &self.mixing_inv
    }

    /// Q⁻¹ · F_E: column `e` maps an input `X` to the symbol on edge `e`.
    pub fn channel_matrix(&self) -> &Matrix {
        &self.channel_matrix
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn security_level(&self) -> usize {
        self.r
    }

    pub fn imperfect_level(&self) -> usize {
        self.i
    }

    pub fn key_dim(&self) -> usize {
        self.key_dim
    }

    /// H(K) / log q for a uniform key on GF(q)^key_dim.
    pub fn key_rate(&self) -> usize {
        self.key_dim
    }

    pub fn constant(&self) -> &[Symbol] {
        &self.constant
    }

    /// The wiretap level targeted by the basis choice: `r` when
    /// `ω + r ≤ n`, otherwise `r − i`.
    pub fn basis_level(&self) -> usize {
        basis_level(self.dimension(), self.omega, self.r, self.key_dim)
    }

    pub fn guarantee(&self) -> Result<Guarantee, SecureError> {
        let level_ok = self.omega + self.r <= self.dimension();
        if level_ok && condition_holds(&self.base, &self.mixing, self.r)? {
            Ok(Guarantee::Constructive)
        } else {
            Ok(Guarantee::Empirical)
        }
    }

    /// X = [m c k].
    pub fn input_vector(&self, m: &[Symbol], k: &[Symbol]) -> Result<Vec<Symbol>, SecureError> {
        if m.len() != self.omega || k.len() != self.key_dim {
            return Err(SecureError::DimensionMismatch(format!(
                "expected {} message and {} key symbols, got {} and {}",
                self.omega,
                self.key_dim,
                m.len(),
                k.len()
            )));
        }
        let field = self.field();
        let mut x = Vec::with_capacity(self.dimension());
        for &s in m.iter().chain(&self.constant).chain(k) {
            x.push(field.check(s)?);
        }
        Ok(x)
    }

    /// Channel symbols for one input, by the global formula only.
    pub fn transmit(&self, x: &[Symbol]) -> Result<Vec<Symbol>, SecureError> {
        Ok(self.channel_matrix.left_mul_vec(x)?)
    }

    /// Symbols on every real edge (declaration order) for message `m` and key `k`.
    ///
    /// The global formula `X·Q⁻¹·f_e` is cross-checked against hop-by-hop
    /// propagation through the local coefficients.
    pub fn encode(&self, m: &[Symbol], k: &[Symbol]) -> Result<Vec<Symbol>, SecureError> {
        let x = self.input_vector(m, k)?;
        let global = self.transmit(&x)?;
        let field = self.field();
        let source_in = self.mixing_inv.left_mul_vec(&x)?;
        let net = self.network();
        let mut local = vec![0; net.num_edges()];
        for &e in net.topological_edges() {
            let mut y = 0;
            for (c, &k) in self.base.inputs(e).iter().zip(self.base.locals(e)) {
                let d = match *c {
                    Channel::Imaginary(j) => source_in[j],
                    Channel::Edge(d) => local[d],
                };
                y = field.add(y, field.mul(k, d));
            }
            local[e] = y;
        }
        if let Some(e) = (0..net.num_edges()).find(|&e| local[e] != global[e]) {
            return Err(SecureError::PropagationMismatch(net.edge(e).id.clone()));
        }
        Ok(global)
    }

    /// Recovers `(m, k)` from the symbols on a sink's incoming edges
    /// (declaration order).
    pub fn decode_at_sink(
        &self,
        sink: &str,
        y: &[Symbol],
    ) -> Result<(Vec<Symbol>, Vec<Symbol>), SecureError> {
        let t = self.network().sink_index(sink)?;
        self.decode_at_node(t, y)
    }

    pub fn decode_at_node(
        &self,
        t: usize,
        y: &[Symbol],
    ) -> Result<(Vec<Symbol>, Vec<Symbol>), SecureError> {
        let incoming = self.network().in_edges(t);
        if y.len() != incoming.len() {
            return Err(SecureError::DimensionMismatch(format!(
                "sink has {} incoming edges, got {} symbols",
                incoming.len(),
                y.len()
            )));
        }
        for &s in y {
            self.field().check(s)?;
        }
        let g = self.channel_matrix.select_columns(incoming);
        let n = self.dimension();
        let rank = g.rank();
        if rank < n {
            return Err(SecureError::Undecodable { rank, n });
        }
        let x = g.solve_left(y)?.ok_or_else(|| {
            SecureError::InconsistentObservation("no input produces these symbols".into())
        })?;
        let c_range = self.omega..n - self.key_dim;
        if x[c_range.clone()] != self.constant[..] {
            return Err(SecureError::InconsistentObservation(
                "constant block does not match".into(),
            ));
        }
        Ok((x[..self.omega].to_vec(), x[c_range.end..].to_vec()))
    }

    /// Bundle file: network lines, code lines, then the secure section.
    pub fn to_text(&self) -> String {
        let mut out = self.network().to_text();
        out.push_str(&self.base.to_text());
        writeln!(
            out,
            "secure omega={} r={} i={} keydim={}",
            self.omega, self.r, self.i, self.key_dim
        )
        .unwrap();
        out.push_str("Q\n");
        out.push_str(&self.mixing.to_string());
        out.push_str("const");
        for c in &self.constant {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, SecureError> {
        // Split by directive while keeping line numbers: each section sees
        // the full line count with foreign lines blanked.
        let lines: Vec<&str> = text.lines().collect();
        let mut net_text = String::new();
        let mut code_text = String::new();
        let mut rest: Vec<(usize, Vec<&str>)> = Vec::new();
        for (i, raw) in lines.iter().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            let kw = tokens.first().copied().unwrap_or("");
            let (to_net, to_code) = match kw {
                "field" | "source" | "sink" | "edge" => (true, false),
                "code" | "kernel" | "local" => (false, true),
                _ => (false, false),
            };
            net_text.push_str(if to_net { body } else { "" });
            net_text.push('\n');
            code_text.push_str(if to_code { body } else { "" });
            code_text.push('\n');
            if !to_net && !to_code && !tokens.is_empty() {
                rest.push((i + 1, tokens));
            }
        }
        let net = Network::parse(&net_text)?;
        let code = GlobalCode::parse(&code_text, &net)?;
        let field = net.field().clone();
        let n = code.dimension();

        let mut header = None;
        let mut q_rows: Option<Vec<Vec<Symbol>>> = None;
        let mut constant = None;
        let mut iter = rest.into_iter();
        while let Some((line, tokens)) = iter.next() {
            match tokens[0] {
                "secure" => {
                    if header.is_some() {
                        return Err(parse_err(line, "duplicate `secure` header"));
                    }
                    let mut vals = [None; 4];
                    for t in &tokens[1..] {
                        let (k, v) = t
                            .split_once('=')
                            .ok_or_else(|| parse_err(line, format!("bad field `{t}`")))?;
                        let slot = match k {
                            "omega" => 0,
                            "r" => 1,
                            "i" => 2,
                            "keydim" => 3,
                            _ => return Err(parse_err(line, format!("unknown key `{k}`"))),
                        };
                        vals[slot] = Some(
                            v.parse::<usize>()
                                .map_err(|_| parse_err(line, format!("bad number `{v}`")))?,
                        );
                    }
                    let [Some(o), Some(r), Some(i), Some(kd)] = vals else {
                        return Err(parse_err(line, "header needs omega, r, i and keydim"));
                    };
                    if i > r || kd != r - i {
                        return Err(parse_err(line, "keydim must equal r - i"));
                    }
                    header = Some((line, o, r, i));
                }
                "Q" => {
                    if tokens.len() != 1 {
                        return Err(parse_err(line, "`Q` takes no arguments"));
                    }
                    let mut rows = Vec::with_capacity(n);
                    for _ in 0..n {
                        let (l, row) = iter
                            .next()
                            .ok_or_else(|| parse_err(line, format!("`Q` needs {n} rows")))?;
                        if row.len() != n {
                            return Err(parse_err(l, format!("Q row needs {n} entries")));
                        }
                        rows.push(parse_symbols(&row, &field, l)?);
                    }
                    q_rows = Some(rows);
                }
                "const" => {
                    constant = Some((line, parse_symbols(&tokens[1..], &field, line)?));
                }
                other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
            }
        }
        let (hline, omega, r, i) = header.ok_or_else(|| parse_err(0, "missing `secure` header"))?;
        let q = q_rows.ok_or_else(|| parse_err(0, "missing `Q` block"))?;
        let q = Matrix::from_rows(&field, &q)?;
        let bundle = Self::new(code, q, omega, r, i).map_err(|e| match e {
            SecureError::Field(FieldError::Singular) => parse_err(hline, "Q is singular"),
            other => other,
        })?;
        if let Some((line, c)) = constant {
            if c != bundle.constant {
                return Err(parse_err(
                    line,
                    format!("constant block must be {} zeros", bundle.constant.len()),
                ));
            }
        }
        Ok(bundle)
    }
}

fn basis_level(n: usize, omega: usize, r: usize, key_dim: usize) -> usize {
    if omega + r <= n {
        r
    } else {
        key_dim
    }
}
