use itertools::Itertools;
use rayon::prelude::*;

use super::{check_budget, with_jobs, OracleError};
use crate::field::{FieldSpec, Matrix, Symbol};
use crate::lnc::GlobalCode;
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No linear code with the requested key dimension is both decodable and secure.
    Refuted,
    /// A decodable, secure code exists; see [`RefutationResult::witness`].
    Counterexample,
}

#[derive(Debug, Clone)]
pub struct RefutationResult {
    /// Codes examined, including the witness if one was found.
    pub searched: u64,
    pub witness: Option<GlobalCode>,
    pub verdict: Verdict,
}

impl RefutationResult {
    pub fn to_text(&self) -> String {
        match &self.witness {
            None => format!("searched={} verdict=refuted\n", self.searched),
            Some(code) => format!(
                "searched={} verdict=counterexample\n{}",
                self.searched,
                code.to_text()
            ),
        }
    }
}

/// Precomputed shape of the search space.
struct Search<'a> {
    net: &'a Network,
    field: &'a FieldSpec,
    omega: usize,
    dim: usize,
    /// `(edge, number of local coefficients)` in topological order.
    slots: Vec<(usize, usize)>,
    num_coeffs: usize,
    sets: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Local coefficients for the `index`-th code; the first coefficient
    /// is the most significant base-q digit.
    fn locals(&self, mut index: u64) -> Vec<Vec<Symbol>> {
        let q = self.field.order() as u64;
        let mut digits = vec![0; self.num_coeffs];
        for d in digits.iter_mut().rev() {
            *d = (index % q) as Symbol;
            index /= q;
        }
        let mut locals = vec![Vec::new(); self.net.num_edges()];
        let mut at = 0;
        for &(e, len) in &self.slots {
            locals[e] = digits[at..at + len].to_vec();
            at += len;
        }
        locals
    }

    fn kernels(&self, locals: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
        let f = self.field;
        let mut kernels = vec![vec![0; self.dim]; self.net.num_edges()];
        for &(e, _) in &self.slots {
            let tail = self.net.edge(e).tail;
            let mut k = vec![0; self.dim];
            if tail == self.net.source() {
                k.copy_from_slice(&locals[e]);
            } else {
                for (&d, &c) in self.net.in_edges(tail).iter().zip(&locals[e]) {
                    if c != 0 {
                        for (x, &y) in k.iter_mut().zip(&kernels[d]) {
                            *x = f.add(*x, f.mul(c, y));
                        }
                    }
                }
            }
            kernels[e] = k;
        }
        kernels
    }

    fn columns(&self, kernels: &[Vec<Symbol>], edges: &[usize]) -> Matrix {
        let cols: Vec<Vec<Symbol>> = edges.iter().map(|&e| kernels[e].clone()).collect();
        Matrix::from_columns(self.field, self.dim, &cols).expect("kernels have length dim")
    }

    /// Every sink can recover the message: no left-null vector of `F_In(t)`
    /// touches the message coordinates.
    fn decodable(&self, kernels: &[Vec<Symbol>]) -> bool {
        self.net.sinks().iter().all(|&t| {
            let null = self
                .columns(kernels, self.net.in_edges(t))
                .left_null_space();
            (0..null.rows()).all(|r| null.row(r)[..self.omega].iter().all(|&x| x == 0))
        })
    }

    fn secure(&self, kernels: &[Vec<Symbol>]) -> bool {
        self.sets.iter().all(|set| {
            let g = self.columns(kernels, set);
            let g_k = g.row_range(self.omega..self.dim);
            super::row_space_contained(&g.row_range(0..self.omega), &g_k)
        })
    }

    fn is_counterexample(&self, index: u64) -> bool {
        let kernels = self.kernels(&self.locals(index));
        self.secure(&kernels) && self.decodable(&kernels)
    }
}

/// Exhaustively searches all linear codes of dimension `omega + key_dim`
/// whose first `omega` inputs carry the message and the rest a uniform key,
/// looking for one that is decodable at every sink and leaks nothing to any
/// set of at most `r` edges.
///
/// The search order is fixed, so `searched` and the witness do not depend on
/// `jobs`.
pub fn refute_key_rate(
    net: &Network,
    omega: usize,
    r: usize,
    key_dim: usize,
    budget: u64,
    jobs: Option<usize>,
) -> Result<RefutationResult, OracleError> {
    if omega == 0 {
        return Err(OracleError::InvalidRate);
    }
    if key_dim >= r {
        return Err(OracleError::InvalidKeyDim { key_dim, r });
    }
    search_codes(net, omega, r, key_dim, budget, jobs)
}

/// The search behind [`refute_key_rate`] without the key-length restriction.
fn search_codes(
    net: &Network,
    omega: usize,
    r: usize,
    key_dim: usize,
    budget: u64,
    jobs: Option<usize>,
) -> Result<RefutationResult, OracleError> {
    let dim = omega + key_dim;
    let slots: Vec<(usize, usize)> = net
        .topological_edges()
        .iter()
        .map(|&e| {
            let tail = net.edge(e).tail;
            let len = if tail == net.source() {
                dim
            } else {
                net.in_edges(tail).len()
            };
            (e, len)
        })
        .collect();
    let num_coeffs: usize = slots.iter().map(|s| s.1).sum();
    let total = check_budget(net.field().space_size(num_coeffs), budget)?;
    let sets = (1..=r.min(net.num_edges()))
        .flat_map(|size| (0..net.num_edges()).combinations(size))
        .collect();
    let search = Search {
        net,
        field: net.field(),
        omega,
        dim,
        slots,
        num_coeffs,
        sets,
    };

    let found = with_jobs(jobs, || {
        (0..total)
            .into_par_iter()
            .find_first(|&idx| search.is_counterexample(idx))
    });
    Ok(match found {
        None => RefutationResult {
            searched: total,
            witness: None,
            verdict: Verdict::Refuted,
        },
        Some(idx) => {
            let witness = GlobalCode::from_locals(net, dim, search.locals(idx))
                .expect("locals are well-formed");
            RefutationResult {
                searched: idx + 1,
                witness: Some(witness),
                verdict: Verdict::Counterexample,
            }
        }
    })
}
