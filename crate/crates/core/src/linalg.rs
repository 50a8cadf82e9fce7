//! Exact sparse linear algebra over the rationals.
//!
//! Every cohomology and duality computation in this crate reduces to ranks and
//! kernels of small-to-medium rational matrices. Two rank routes are provided:
//! fraction-free (Bareiss) elimination on a dense integer copy, and sparse
//! rational elimination with Markowitz-style pivot choice. [`ExactMatrix::rank`]
//! picks one by size; both are public so they can be checked against each other.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// The base field. Always reduced, denominator positive.
pub type Rational = BigRational;

/// Matrices with at most this many cells go through the dense Bareiss path.
const DENSE_RANK_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("complex condition violated: outgoing map composed with incoming map is nonzero")]
    ComplexConditionViolated,
    #[error("entry ({row}, {col}) out of bounds for {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
}

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let bad = || LinalgError::BadRational(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Sparse rational matrix. Immutable once built; no stored entry is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMatrix({}x{}", self.rows, self.cols)?;
        for ((r, c), v) in &self.entries {
            write!(f, " [{r},{c}]={}", format_rational(v))?;
        }
        write!(f, ")")
    }
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Rational::one())
    }

    /// `c` times the `n x n` identity.
    pub fn scalar(n: usize, c: &Rational) -> Self {
        let mut entries = BTreeMap::new();
        if !c.is_zero() {
            for i in 0..n {
                entries.insert((i, i), c.clone());
            }
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    /// Builds from `(row, col, value)` triplets. Repeated positions are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut entries: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (row, col, v) in triplets {
            if row >= rows || col >= cols {
                return Err(LinalgError::OutOfBounds {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
            *entries.entry((row, col)).or_insert_with(Rational::zero) += v;
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = BTreeMap::new();
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    entries.insert((r, c), v.clone());
                }
            }
        }
        Self {
            rows: nrows,
            cols: ncols,
            entries,
        }
    }

    /// Integer convenience constructor; `cols` is needed for 0-row matrices.
    pub fn from_ints(rows: &[&[i64]], cols: usize) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&v| rational(v)).collect()
            })
            .collect();
        let mut m = Self::from_dense(&dense);
        m.cols = cols;
        m
    }

    /// Column vector.
    pub fn column(v: &[Rational]) -> Self {
        let entries = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| ((i, 0), x.clone()))
            .collect();
        Self {
            rows: v.len(),
            cols: 1,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    /// Copy with one entry replaced.
    pub fn with_entry(&self, row: usize, col: usize, value: Rational) -> Self {
        assert!(row < self.rows && col < self.cols, "with_entry out of bounds");
        let mut out = self.clone();
        if value.is_zero() {
            out.entries.remove(&(row, col));
        } else {
            out.entries.insert((row, col), value);
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            out[r][c] = v.clone();
        }
        out
    }

    fn sparse_rows(&self) -> Vec<BTreeMap<usize, Rational>> {
        let mut out = vec![BTreeMap::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            out[r].insert(c, v.clone());
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, v * c))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            *entries.entry(*k).or_insert_with(Rational::zero) += v;
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.add(&other.neg())
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rhs = other.sparse_rows();
        let mut entries: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (&(r, k), a) in &self.entries {
            for (&c, b) in &rhs[k] {
                *entries.entry((r, c)).or_insert_with(Rational::zero) += a * b;
            }
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Rational::zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        Ok(out)
    }

    /// Side-by-side concatenation `[A | B | ...]`.
    pub fn hstack(blocks: &[&Self]) -> Result<Self, LinalgError> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut entries = BTreeMap::new();
        let mut offset = 0;
        for b in blocks {
            if b.rows != rows {
                return Err(LinalgError::ShapeMismatch(
                    "hstack blocks have different row counts".into(),
                ));
            }
            for (&(r, c), v) in &b.entries {
                entries.insert((r, c + offset), v.clone());
            }
            offset += b.cols;
        }
        Ok(Self {
            rows,
            cols: offset,
            entries,
        })
    }

    /// Vertical concatenation.
    pub fn vstack(blocks: &[&Self]) -> Result<Self, LinalgError> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut entries = BTreeMap::new();
        let mut offset = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(LinalgError::ShapeMismatch(
                    "vstack blocks have different column counts".into(),
                ));
            }
            for (&(r, c), v) in &b.entries {
                entries.insert((r + offset, c), v.clone());
            }
            offset += b.rows;
        }
        Ok(Self {
            rows: offset,
            cols,
            entries,
        })
    }

    /// Rank over ℚ. Small matrices use Bareiss, large ones sparse elimination.
    pub fn rank(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        if self.rows * self.cols <= DENSE_RANK_LIMIT {
            self.rank_bareiss()
        } else {
            self.rank_sparse()
        }
    }

    /// Fraction-free elimination on a dense integer copy.
    pub fn rank_bareiss(&self) -> usize {
        let mut a = integer_rows(self);
        let rows = a.len();
        let cols = self.cols;
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let (top, rest) = a.split_at_mut(rank + 1);
            let pivot_row = &top[rank];
            let pivot = &pivot_row[col];
            for row in rest.iter_mut() {
                let lead = row[col].clone();
                for j in col + 1..cols {
                    let v = pivot * &row[j] - &lead * &pivot_row[j];
                    debug_assert!(v.is_multiple_of(&prev));
                    row[j] = v / &prev;
                }
                row[col] = BigInt::zero();
            }
            prev = pivot.clone();
            rank += 1;
        }
        rank
    }

    /// Sparse rational elimination; pivots chosen to keep fill low.
    pub fn rank_sparse(&self) -> usize {
        let mut active: Vec<BTreeMap<usize, Rational>> = self
            .sparse_rows()
            .into_iter()
            .filter(|r| !r.is_empty())
            .collect();
        let mut rank = 0;
        while !active.is_empty() {
            let mut col_count: BTreeMap<usize, usize> = BTreeMap::new();
            for row in &active {
                for &c in row.keys() {
                    *col_count.entry(c).or_default() += 1;
                }
            }
            // Markowitz cost (r - 1)(c - 1), ties broken by position.
            let (pr, pc) = active
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    let rlen = row.len();
                    let cc = &col_count;
                    row.keys()
                        .map(move |&c| ((rlen - 1) * (cc[&c] - 1), i, c))
                })
                .min()
                .map(|(_, i, c)| (i, c))
                .expect("active rows are nonempty");
            let pivot_row = active.swap_remove(pr);
            let pivot = pivot_row[&pc].clone();
            for row in active.iter_mut() {
                if let Some(lead) = row.get(&pc) {
                    let factor = lead / &pivot;
                    axpy(row, &-factor, &pivot_row);
                }
            }
            active.retain(|r| !r.is_empty());
            rank += 1;
        }
        rank
    }

    /// Basis of the right kernel `{v : A v = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let rref = Rref::of(self);
        rref.kernel_basis(self.cols)
    }

    /// Basis of the column space, as columns of `self` (pivot columns).
    pub fn pivot_columns(&self) -> Vec<usize> {
        Rref::of(self).pivots.keys().copied().collect()
    }
}

/// `row += c * other`, dropping zeros.
fn axpy(row: &mut BTreeMap<usize, Rational>, c: &Rational, other: &BTreeMap<usize, Rational>) {
    for (&j, v) in other {
        let e = row.entry(j).or_insert_with(Rational::zero);
        *e += c * v;
        if e.is_zero() {
            row.remove(&j);
        }
    }
}

fn integer_rows(m: &ExactMatrix) -> Vec<Vec<BigInt>> {
    m.to_dense()
        .into_iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.into_iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        })
        .collect()
}

/// Incremental reduced row echelon form on sparse rows.
struct Rref {
    /// pivot column -> normalized row (pivot entry 1; no other row has this column)
    pivots: BTreeMap<usize, BTreeMap<usize, Rational>>,
}

impl Rref {
    fn of(m: &ExactMatrix) -> Self {
        let mut rref = Rref {
            pivots: BTreeMap::new(),
        };
        for row in m.sparse_rows() {
            rref.insert(row);
        }
        rref
    }

    fn insert(&mut self, mut row: BTreeMap<usize, Rational>) {
        let hits: Vec<usize> = row
            .keys()
            .copied()
            .filter(|c| self.pivots.contains_key(c))
            .collect();
        for pc in hits {
            if let Some(coef) = row.get(&pc).cloned() {
                axpy(&mut row, &-coef, &self.pivots[&pc]);
            }
        }
        let Some((&lead, lead_val)) = row.iter().next() else {
            return;
        };
        let inv = lead_val.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for prow in self.pivots.values_mut() {
            if let Some(coef) = prow.get(&lead).cloned() {
                axpy(prow, &-coef, &row);
            }
        }
        self.pivots.insert(lead, row);
    }

    fn kernel_basis(&self, cols: usize) -> Vec<Vec<Rational>> {
        let free: BTreeSet<usize> = (0..cols).filter(|c| !self.pivots.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); cols];
                v[f] = Rational::one();
                for (&pc, prow) in &self.pivots {
                    if let Some(x) = prow.get(&f) {
                        v[pc] = -x.clone();
                    }
                }
                v
            })
            .collect()
    }
}

/// Dimension of `ker(a_out) / im(a_in)` for a three-term complex
/// `U --a_in--> V --a_out--> W`.
pub fn cohomology_dim(a_in: &ExactMatrix, a_out: &ExactMatrix) -> Result<usize, LinalgError> {
    if a_in.rows() != a_out.cols() {
        return Err(LinalgError::ShapeMismatch(format!(
            "incoming map lands in dimension {} but outgoing map starts from dimension {}",
            a_in.rows(),
            a_out.cols()
        )));
    }
    if !a_out.mul(a_in)?.is_zero() {
        return Err(LinalgError::ComplexConditionViolated);
    }
    Ok(a_out.cols() - a_out.rank() - a_in.rank())
}

/// True when every entry is zero.
pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}
