use std::fmt;

use super::{FieldError, FieldSpec, Symbol};

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Symbol>,
    field: FieldSpec,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over {:?}",
            self.rows, self.cols, self.field
        )?;
        write!(f, "{self}")
    }
}

/// Row-major, space-separated, one row per line.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: &FieldSpec, rows: &[Vec<Symbol>]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "ragged rows: {} vs {}",
                    row.len(),
                    cols
                )));
            }
            for &x in row {
                entries.push(field.check(x)?);
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
            field: field.clone(),
        })
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(
        field: &FieldSpec,
        rows: usize,
        columns: &[Vec<Symbol>],
    ) -> Result<Self, FieldError> {
        let mut m = Self::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(FieldError::DimensionMismatch(format!(
                    "column {c} has length {}, expected {rows}",
                    col.len()
                )));
            }
            for (r, &x) in col.iter().enumerate() {
                m.entries[r * m.cols + c] = field.check(x)?;
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Symbol) -> Result<(), FieldError> {
        self.entries[r * self.cols + c] = self.field.check(value)?;
        Ok(())
    }

    pub fn row(&self, r: usize) -> &[Symbol] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Symbol> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch {
                left: self.field.order(),
                right: other.field.order(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.entries[idx] = f.add(out.entries[idx], f.mul(a, other.get(k, c)));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `x · self`.
    pub fn left_mul_vec(&self, x: &[Symbol]) -> Result<Vec<Symbol>, FieldError> {
        if x.len() != self.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "row vector of length {} times {}x{}",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![0; self.cols];
        for (r, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(a, self.get(r, c)));
            }
        }
        Ok(out)
    }

    /// Matrix times column vector: `self · x`.
    pub fn mul_vec(&self, x: &[Symbol]) -> Result<Vec<Symbol>, FieldError> {
        if x.len() != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} times column of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.field.dot(self.row(r), x))
            .collect())
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "hstack of {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend_from_slice(self.row(r));
            entries.extend_from_slice(other.row(r));
        }
        Ok(Self {
            rows: self.rows,
            cols,
            entries,
            field: self.field.clone(),
        })
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "vstack of {} cols with {} cols",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
            field: self.field.clone(),
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.entries[r * cols.len() + j] = self.get(r, c);
            }
        }
        m
    }

    pub fn row_range(&self, range: std::ops::Range<usize>) -> Self {
        let entries = self.entries[range.start * self.cols..range.end * self.cols].to_vec();
        Self {
            rows: range.len(),
            cols: self.cols,
            entries,
            field: self.field.clone(),
        }
    }

    /// Reduced row echelon form and pivot columns.
    ///
    /// Columns are scanned left to right; in each, the pivot is the first
    /// nonzero entry at or below the current pivot row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(pr) = (prow..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            if pr != prow {
                for k in 0..m.cols {
                    m.entries.swap(pr * m.cols + k, prow * m.cols + k);
                }
            }
            let inv = f.inv(m.get(prow, c)).expect("pivot is nonzero");
            for k in 0..m.cols {
                let idx = prow * m.cols + k;
                m.entries[idx] = f.mul(m.entries[idx], inv);
            }
            for r in 0..m.rows {
                if r == prow {
                    continue;
                }
                let factor = m.get(r, c);
                if factor == 0 {
                    continue;
                }
                for k in c..m.cols {
                    let v = f.mul(factor, m.get(prow, k));
                    let idx = r * m.cols + k;
                    m.entries[idx] = f.sub(m.entries[idx], v);
                }
            }
            pivots.push(c);
            prow += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(&self.field, n))?;
        let (red, pivots) = aug.rref();
        if pivots.iter().filter(|&&c| c < n).count() < n {
            return Err(FieldError::Singular);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Ok(red.select_columns(&cols))
    }

    /// Basis (as columns) of the right null space `{x : self · x = 0}`.
    pub fn null_space(&self) -> Self {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = &self.field;
        let mut basis = Self::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            basis.entries[fc * free.len() + j] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                basis.entries[pc * free.len() + j] = f.neg(red.get(i, fc));
            }
        }
        basis
    }

    /// Basis (as rows) of the left null space `{x : x · self = 0}`.
    pub fn left_null_space(&self) -> Self {
        self.transpose().null_space().transpose()
    }

    /// Some `x` with `x · self = y`, or `None` if the system is inconsistent.
    pub fn solve_left(&self, y: &[Symbol]) -> Result<Option<Vec<Symbol>>, FieldError> {
        if y.len() != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "right-hand side of length {}, matrix has {} columns",
                y.len(),
                self.cols
            )));
        }
        // self^T x^T = y^T, augmented with y as the last column.
        let t = self.transpose();
        let rhs = Self::from_columns(&self.field, self.cols, &[y.to_vec()])?;
        let (red, pivots) = t.hstack(&rhs)?.rref();
        if pivots.last() == Some(&self.rows) {
            return Ok(None);
        }
        let mut x = vec![0; self.rows];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = red.get(i, self.rows);
        }
        Ok(Some(x))
    }
}

/// Whether the column spans of `b1` and `b2` meet only in the zero vector.
///
/// Decided by rank additivity: `rank([b1 | b2]) = rank(b1) + rank(b2)`.
pub fn spans_intersect_trivially(b1: &Matrix, b2: &Matrix) -> Result<bool, FieldError> {
    let joined = b1.hstack(b2)?;
    Ok(joined.rank() == b1.rank() + b2.rank())
}
