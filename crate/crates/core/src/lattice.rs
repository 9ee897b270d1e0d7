//! Exact integer linear algebra: Smith and Hermite normal forms, integer
//! solvability, saturation and quotient lattices.
//!
//! Everything works over arbitrary-precision integers. Sizes are desk scale
//! (a few dozen rows and columns), so the algorithms are the plain
//! elementary-operation ones.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A point of `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        LatticeVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        LatticeVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &LatticeVector) -> BigInt {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in dot product");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Gcd of the entries; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in vector sum");
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, factor: &BigInt) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| a * factor).collect())
    }
}

impl Index<usize> for LatticeVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl LatticeMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LatticeMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the length is not
    /// `rows * cols`.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows * cols");
        LatticeMatrix { rows, cols, entries }
    }

    /// Builds a matrix from explicit rows; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors, all of dimension `dim`.
    pub fn from_columns(dim: usize, columns: &[&LatticeVector]) -> Self {
        let mut m = Self::zeros(dim, columns.len());
        for (j, v) in columns.iter().enumerate() {
            assert_eq!(v.dim(), dim, "column dimension mismatch");
            for i in 0..dim {
                m[(i, j)] = v[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> LatticeVector {
        LatticeVector(self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> LatticeVector {
        LatticeVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn transpose(&self) -> LatticeMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &LatticeMatrix) -> LatticeMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        LatticeVector(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
                .collect(),
        )
    }

    /// Submatrix made of the rows in `range`.
    pub fn select_rows(&self, range: std::ops::Range<usize>) -> LatticeMatrix {
        let mut out = Self::zeros(range.len(), self.cols);
        for (oi, i) in range.enumerate() {
            for j in 0..self.cols {
                out[(oi, j)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Submatrix made of the columns in `range`.
    pub fn select_columns(&self, range: std::ops::Range<usize>) -> LatticeMatrix {
        let mut out = Self::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (oj, j) in range.clone().enumerate() {
                out[(i, oj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination. Panics on
    /// non-square input.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = factor * &self[(source, j)];
            self[(target, j)] += delta;
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = factor * &self[(i, source)];
            self[(i, target)] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for LatticeMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for LatticeMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for LatticeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// `left * M * right = diag`, with `left`, `right` unimodular.
///
/// `left_inverse` is carried along so that saturations and quotient lattices
/// can be read off without a separate inversion.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub left: LatticeMatrix,
    pub left_inverse: LatticeMatrix,
    pub diag: Vec<BigInt>,
    pub right: LatticeMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }

    /// The diagonal matrix with the shape of the decomposed matrix.
    pub fn diagonal_matrix(&self) -> LatticeMatrix {
        let mut d = LatticeMatrix::zeros(self.left.rows(), self.right.rows());
        for (i, x) in self.diag.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }
}

struct SmithState {
    a: LatticeMatrix,
    left: LatticeMatrix,
    left_inverse: LatticeMatrix,
    right: LatticeMatrix,
}

impl SmithState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.left.swap_rows(i, j);
        self.left_inverse.swap_cols(i, j);
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        self.a.add_row_multiple(target, source, factor);
        self.left.add_row_multiple(target, source, factor);
        // (I + f e_t e_s^T)^{-1} = I - f e_t e_s^T, applied on the right
        self.left_inverse.add_col_multiple(source, target, &-factor);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.left.negate_row(i);
        self.left_inverse.negate_col(i);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.right.swap_cols(i, j);
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        self.a.add_col_multiple(target, source, factor);
        self.right.add_col_multiple(target, source, factor);
    }

    /// Clears row and column `t` outside the pivot, leaving a pivot that
    /// divides every remaining entry of the trailing block.
    fn reduce_pivot(&mut self, t: usize) {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        loop {
            // column t below the pivot
            let mut dirty = false;
            for i in t + 1..rows {
                if self.a[(i, t)].is_zero() {
                    continue;
                }
                let q = self.a[(i, t)].div_floor(&self.a[(t, t)]);
                self.add_row_multiple(i, t, &-q);
                if !self.a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                self.move_min_in_column(t);
                continue;
            }
            // row t right of the pivot
            for j in t + 1..cols {
                if self.a[(t, j)].is_zero() {
                    continue;
                }
                let q = self.a[(t, j)].div_floor(&self.a[(t, t)]);
                self.add_col_multiple(j, t, &-q);
                if !self.a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                self.move_min_in_row(t);
                continue;
            }
            // divisibility of the trailing block
            let pivot = self.a[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => self.add_row_multiple(t, i, &BigInt::one()),
                None => return,
            }
        }
    }

    fn move_min_in_column(&mut self, t: usize) {
        let best = (t..self.a.rows())
            .filter(|&i| !self.a[(i, t)].is_zero())
            .min_by_key(|&i| self.a[(i, t)].abs())
            .expect("column has a nonzero entry");
        self.swap_rows(t, best);
    }

    fn move_min_in_row(&mut self, t: usize) {
        let best = (t..self.a.cols())
            .filter(|&j| !self.a[(t, j)].is_zero())
            .min_by_key(|&j| self.a[(t, j)].abs())
            .expect("row has a nonzero entry");
        self.swap_cols(t, best);
    }
}

/// Smith normal form with unimodular transforms on both sides.
pub fn smith_normal_form(m: &LatticeMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut st = SmithState {
        a: m.clone(),
        left: LatticeMatrix::identity(rows),
        left_inverse: LatticeMatrix::identity(rows),
        right: LatticeMatrix::identity(cols),
    };
    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &st.a[(i, j)];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < st.a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        st.swap_rows(t, bi);
        st.swap_cols(t, bj);
        st.reduce_pivot(t);
        if st.a[(t, t)].is_negative() {
            st.negate_row(t);
        }
    }
    let diag = (0..rows.min(cols)).map(|i| st.a[(i, i)].clone()).collect();
    SmithDecomposition { left: st.left, left_inverse: st.left_inverse, diag, right: st.right }
}

/// Some integer solution of `m * x = b`, or `None` when there is none.
pub fn solve_integer(m: &LatticeMatrix, b: &LatticeVector) -> Option<LatticeVector> {
    assert_eq!(b.dim(), m.rows(), "right-hand side has wrong dimension");
    let snf = smith_normal_form(m);
    let c = snf.left.apply(b);
    let rank = snf.rank();
    let mut y = vec![BigInt::zero(); m.cols()];
    for i in 0..m.rows() {
        if i < rank {
            let (q, r) = c[i].div_rem(&snf.diag[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    Some(snf.right.apply(&LatticeVector(y)))
}

/// Basis (as columns) of the integer kernel `{x : m * x = 0}`.
pub fn kernel_basis(m: &LatticeMatrix) -> LatticeMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    snf.right.select_columns(rank..m.cols())
}

/// Basis (as columns) of the saturation of the column span of `m`.
pub fn saturation(m: &LatticeMatrix) -> LatticeMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    snf.left_inverse.select_columns(0..rank)
}

/// Index of a sublattice, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl LatticeIndex {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            LatticeIndex::Finite(d) => Some(d),
            LatticeIndex::Infinite => None,
        }
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(d) => write!(f, "{d}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// Order of `Z^rows / im(m)`.
pub fn cokernel_index(m: &LatticeMatrix) -> LatticeIndex {
    let snf = smith_normal_form(m);
    if snf.rank() < m.rows() {
        return LatticeIndex::Infinite;
    }
    LatticeIndex::Finite(snf.diag.iter().take(snf.rank()).product())
}

pub fn rank(m: &LatticeMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// The quotient `Z^n / S` where `S` is the saturation of a column span.
///
/// `projection` is a surjection `Z^n -> Z^(n-r)` with kernel `S`; `lift`
/// is a section of it (`projection * lift = I`).
#[derive(Clone, Debug)]
pub struct QuotientLattice {
    pub projection: LatticeMatrix,
    pub lift: LatticeMatrix,
}

impl QuotientLattice {
    pub fn of_span(m: &LatticeMatrix) -> Self {
        let snf = smith_normal_form(m);
        let rank = snf.rank();
        let n = m.rows();
        QuotientLattice {
            projection: snf.left.select_rows(rank..n),
            lift: snf.left_inverse.select_columns(rank..n),
        }
    }

    pub fn dim(&self) -> usize {
        self.projection.rows()
    }
}

/// Row-style Hermite normal form of the lattice spanned by a set of rows.
///
/// Rows are in echelon form with strictly increasing pivot columns, positive
/// pivots, and entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    ncols: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl HermiteForm {
    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Whether `v` lies in the integer span of the rows.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ncols, "vector has wrong length");
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[..p].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, r) = v[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            if !q.is_zero() {
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &q * y;
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }
}

/// Hermite normal form of the lattice spanned by `generators` (each of length `ncols`).
pub fn hermite_normal_form(generators: &[Vec<BigInt>], ncols: usize) -> HermiteForm {
    let mut rows: Vec<Vec<BigInt>> = generators
        .iter()
        .inspect(|g| assert_eq!(g.len(), ncols, "generator has wrong length"))
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        loop {
            let best = (top..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by_key(|&i| rows[i][col].abs());
            let Some(best) = best else { break };
            rows.swap(top, best);
            let mut clean = true;
            for i in top + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[top][col]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[top]) {
                    *x -= &q * y;
                }
                if !rows[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if top == rows.len() || rows[top][col].is_zero() {
            continue;
        }
        if rows[top][col].is_negative() {
            for x in rows[top].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        for i in 0..top {
            let q = rows[i][col].div_floor(&rows[top][col]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(top);
            for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
        pivots.push(col);
        top += 1;
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    rows.truncate(top);
    HermiteForm { ncols, rows, pivots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> LatticeMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        LatticeMatrix::from_rows(rows, cols)
    }

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_snf(m: &LatticeMatrix) -> SmithDecomposition {
        let snf = smith_normal_form(m);
        assert_eq!(snf.left.mul(m).mul(&snf.right), snf.diagonal_matrix());
        assert_eq!(snf.left.mul(&snf.left_inverse), LatticeMatrix::identity(m.rows()));
        assert!(snf.left.determinant().abs().is_one());
        assert!(snf.right.determinant().abs().is_one());
        snf
    }

    #[test]
    fn snf_of_two_by_two() {
        let m = mat(&[vec![2, 4], vec![6, 8]]);
        let snf = check_snf(&m);
        assert_eq!(snf.diag, ints(&[2, 4]));
        let prod: BigInt = snf.diag.iter().product();
        assert_eq!(prod, m.determinant().abs());
    }

    #[test]
    fn snf_identity_and_zero() {
        assert_eq!(check_snf(&LatticeMatrix::identity(3)).diag, ints(&[1, 1, 1]));
        assert_eq!(check_snf(&mat(&[vec![0]])).diag, ints(&[0]));
    }

    #[test]
    fn snf_degenerate_shapes() {
        let snf = check_snf(&LatticeMatrix::zeros(0, 3));
        assert!(snf.diag.is_empty());
        let snf = check_snf(&LatticeMatrix::zeros(2, 0));
        assert!(snf.diag.is_empty());
        let snf = check_snf(&mat(&[vec![4, 6, 10]]));
        assert_eq!(snf.diag, ints(&[2]));
    }

    #[test]
    fn snf_needs_divisibility_fix() {
        // diag(2,3) is diagonal but not in Smith form
        let snf = check_snf(&mat(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(snf.diag, ints(&[1, 6]));
    }

    #[test]
    fn solve_examples() {
        let two = mat(&[vec![2]]);
        assert_eq!(solve_integer(&two, &LatticeVector::from_i64s(&[4])), Some(LatticeVector::from_i64s(&[2])));
        assert_eq!(solve_integer(&two, &LatticeVector::from_i64s(&[3])), None);
        let m = mat(&[vec![1, 0], vec![1, 2]]);
        let x = solve_integer(&m, &LatticeVector::from_i64s(&[1, 3])).unwrap();
        assert_eq!(x, LatticeVector::from_i64s(&[1, 1]));
    }

    #[test]
    fn solve_inconsistent_rank_deficient() {
        let m = mat(&[vec![1, 1], vec![2, 2]]);
        assert!(solve_integer(&m, &LatticeVector::from_i64s(&[1, 3])).is_none());
        let x = solve_integer(&m, &LatticeVector::from_i64s(&[1, 2])).unwrap();
        assert_eq!(m.apply(&x), LatticeVector::from_i64s(&[1, 2]));
    }

    #[test]
    fn saturation_examples() {
        let sat = saturation(&mat(&[vec![2], vec![0]]));
        assert_eq!(sat.cols(), 1);
        assert_eq!(sat.column(0).content(), BigInt::one());
        assert!(sat[(1, 0)].is_zero());
        let id = saturation(&LatticeMatrix::identity(2));
        assert_eq!(id.cols(), 2);
        assert!(id.determinant().abs().is_one());
        let empty = saturation(&LatticeMatrix::zeros(2, 0));
        assert_eq!(empty.cols(), 0);
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel_index(&mat(&[vec![2]])), LatticeIndex::Finite(BigInt::from(2)));
        assert_eq!(cokernel_index(&LatticeMatrix::identity(3)), LatticeIndex::Finite(BigInt::one()));
        assert_eq!(cokernel_index(&mat(&[vec![0]])), LatticeIndex::Infinite);
        assert_eq!(cokernel_index(&LatticeMatrix::zeros(0, 2)), LatticeIndex::Finite(BigInt::one()));
    }

    #[test]
    fn quotient_lattice_kills_the_span() {
        let span = mat(&[vec![1], vec![1], vec![0]]);
        let q = QuotientLattice::of_span(&span);
        assert_eq!(q.dim(), 2);
        assert!(q.projection.mul(&span).entries().iter().all(Zero::is_zero));
        assert_eq!(q.projection.mul(&q.lift), LatticeMatrix::identity(2));
    }

    #[test]
    fn hermite_membership() {
        let h = hermite_normal_form(&[ints(&[2, 4]), ints(&[0, 6])], 2);
        assert!(h.contains(&ints(&[2, -2])));
        assert!(h.contains(&ints(&[0, 0])));
        assert!(!h.contains(&ints(&[1, 0])));
        assert!(!h.contains(&ints(&[0, 3])));
        assert_eq!(h.pivots(), &[0, 1]);
    }

    #[test]
    fn hermite_of_nothing() {
        let h = hermite_normal_form(&[], 3);
        assert_eq!(h.rank(), 0);
        assert!(h.contains(&ints(&[0, 0, 0])));
        assert!(!h.contains(&ints(&[0, 1, 0])));
    }

    #[test]
    fn determinant_small() {
        assert_eq!(mat(&[vec![0, 1], vec![1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(mat(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]).determinant(), BigInt::from(18));
    }
}
