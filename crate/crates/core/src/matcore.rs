//! Dense complex-matrix kernel.
//!
//! Only the primitives the capacity formulas need: products, adjoints,
//! Hermitian eigenvalues (cyclic Jacobi), and a Cholesky factorization used
//! for log-determinants, linear solves and noise whitening. Matrices in this
//! crate are tiny (M, N ≤ 8) so everything is dense and row-major.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance used by every Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("dimension mismatch: {op} of {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    BadLength {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} relative to scale {scale:.3e})")]
    NotHermitian { asymmetry: f64, scale: f64 },
    #[error("matrix is not positive definite: pivot {pivot} is {value:.3e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, MatError> {
        if data.len() != rows * cols {
            return Err(MatError::BadLength {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(MatError::NonFinite {
                row: idx / cols.max(1),
                col: idx % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience constructor from nested real rows (used heavily in tests).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, MatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Column vector from a slice.
    pub fn column(values: &[Complex64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, MatError> {
        if self.cols != rhs.rows {
            return Err(MatError::DimensionMismatch {
                op: "matmul",
                lhs: self.dims(),
                rhs: rhs.dims(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · rhs*` without materializing the adjoint.
    pub fn mul_adjoint(&self, rhs: &Self) -> Result<Self, MatError> {
        if self.cols != rhs.cols {
            return Err(MatError::DimensionMismatch {
                op: "mul_adjoint",
                lhs: self.dims(),
                rhs: rhs.dims(),
            });
        }
        Ok(Self::from_fn(self.rows, rhs.rows, |i, j| {
            let a = &self.data[i * self.cols..(i + 1) * self.cols];
            let b = &rhs.data[j * rhs.cols..(j + 1) * rhs.cols];
            a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
        }))
    }

    /// `self* · rhs` without materializing the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Result<Self, MatError> {
        if self.rows != rhs.rows {
            return Err(MatError::DimensionMismatch {
                op: "adjoint_mul",
                lhs: self.dims(),
                rhs: rhs.dims(),
            });
        }
        let mut out = Self::zeros(self.cols, rhs.cols);
        for l in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(l, i)].conj();
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(l, j)];
                }
            }
        }
        Ok(out)
    }

    /// Gram matrix `self · self*`, exactly Hermitian by construction.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            let a = &self.data[i * self.cols..(i + 1) * self.cols];
            for j in i..n {
                let b = &self.data[j * self.cols..(j + 1) * self.cols];
                let s: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    /// Gram matrix `self* · self`, exactly Hermitian by construction.
    pub fn gram_adjoint(&self) -> Self {
        self.adjoint().gram()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, MatError> {
        if self.cols != v.len() {
            return Err(MatError::DimensionMismatch {
                op: "matvec",
                lhs: self.dims(),
                rhs: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, MatError> {
        self.check_same(rhs, "add")?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, MatError> {
        self.check_same(rhs, "sub")?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// `self += factor · rhs`.
    pub fn add_scaled(&mut self, rhs: &Self, factor: f64) -> Result<(), MatError> {
        self.check_same(rhs, "add_scaled")?;
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * factor;
        }
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64, MatError> {
        self.check_same(rhs, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Result<Self, MatError> {
        self.require_square()?;
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            out[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        Ok(out)
    }

    /// Checks Hermitian symmetry at relative tolerance [`HERMITIAN_TOL`].
    pub fn check_hermitian(&self) -> Result<(), MatError> {
        self.require_square()?;
        let scale = self.max_abs();
        let mut asym = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                asym = asym.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL * scale {
            return Err(MatError::NotHermitian { asymmetry: asym, scale });
        }
        Ok(())
    }

    pub fn is_hermitian(&self) -> bool {
        self.check_hermitian().is_ok()
    }

    fn require_square(&self) -> Result<(), MatError> {
        if !self.is_square() {
            return Err(MatError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    fn check_same(&self, rhs: &Self, op: &'static str) -> Result<(), MatError> {
        if self.dims() != rhs.dims() {
            return Err(MatError::DimensionMismatch {
                op,
                lhs: self.dims(),
                rhs: rhs.dims(),
            });
        }
        Ok(())
    }
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum {
    values: Vec<f64>,
}

impl HermitianSpectrum {
    /// Wraps arbitrary real values, sorting them descending.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
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

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Multiplies every eigenvalue by a positive factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_values(self.values.iter().map(|v| v * factor).collect())
    }
}

/// Lower-triangular Cholesky factor `L` with `L L* = A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    /// Factors a Hermitian positive-definite matrix. Only the lower triangle
    /// is read once the Hermitian check has passed.
    pub fn factor(a: &CMatrix) -> Result<Self, MatError> {
        a.check_hermitian()?;
        let n = a.rows();
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 || !d.is_finite() {
                return Err(MatError::NotPositiveDefinite { pivot: j, value: d });
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor_matrix(&self) -> &CMatrix {
        &self.l
    }

    /// log₂ det A = 2 Σ log₂ L_ii.
    pub fn logdet2(&self) -> f64 {
        2.0 * (0..self.l.rows()).map(|i| self.l[(i, i)].re.log2()).sum::<f64>()
    }

    /// Solves `L Y = B` by forward substitution.
    pub fn solve_lower(&self, b: &CMatrix) -> Result<CMatrix, MatError> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(MatError::DimensionMismatch {
                op: "solve_lower",
                lhs: self.l.dims(),
                rhs: b.dims(),
            });
        }
        let mut y = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = y[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * y[(k, c)];
                }
                y[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        Ok(y)
    }

    /// Solves `L* X = Y` by back substitution.
    pub fn solve_upper(&self, y: &CMatrix) -> Result<CMatrix, MatError> {
        let n = self.l.rows();
        if y.rows() != n {
            return Err(MatError::DimensionMismatch {
                op: "solve_upper",
                lhs: self.l.dims(),
                rhs: y.dims(),
            });
        }
        let mut x = y.clone();
        for c in 0..y.cols() {
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.l[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        Ok(x)
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix, MatError> {
        self.solve_upper(&self.solve_lower(b)?)
    }
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, MatError> {
    a.matmul(b)
}

/// log₂ det of a Hermitian positive-definite matrix via Cholesky.
pub fn logdet_hpd(a: &CMatrix) -> Result<f64, MatError> {
    Ok(Cholesky::factor(a)?.logdet2())
}

/// Solves `A X = B` for Hermitian positive-definite `A`.
pub fn hpd_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, MatError> {
    Cholesky::factor(a)?.solve(b)
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is symmetrized first so round-off asymmetry cannot leak into
/// the rotations.
pub fn eigvals_hermitian(a: &CMatrix) -> Result<HermitianSpectrum, MatError> {
    a.check_hermitian()?;
    let mut m = a.hermitian_part()?;
    let n = m.rows();
    let scale = m.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        return Ok(HermitianSpectrum::from_values(
            (0..n).map(|i| m[(i, i)].re).collect(),
        ));
    }
    let threshold = 1e-15 * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, p, q);
            }
        }
    }
    Ok(HermitianSpectrum::from_values(
        (0..n).map(|i| m[(i, i)].re).collect(),
    ))
}

/// Annihilates entry (p, q) of a Hermitian matrix: a diagonal phase makes
/// it real, then a real Givens rotation removes it.
fn jacobi_rotate(m: &mut CMatrix, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    // Row q picks up conj(phase), column q picks up phase.
    let phase = (apq / mag).conj();
    for k in 0..n {
        m[(k, q)] *= phase;
    }
    for k in 0..n {
        m[(q, k)] *= phase.conj();
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let kp = m[(k, p)];
        let kq = m[(k, q)];
        m[(k, p)] = kp * c - kq * s;
        m[(k, q)] = kp * s + kq * c;
    }
    for k in 0..n {
        let pk = m[(p, k)];
        let qk = m[(q, k)];
        m[(p, k)] = pk * c - qk * s;
        m[(q, k)] = pk * s + qk * c;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn naive_matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = c(0.0, 0.0);
                for l in 0..a.cols() {
                    s += a[(i, l)] * b[(l, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            CMatrix::new(2, 2, vec![c(1.0, 0.0); 3]),
            Err(MatError::BadLength { .. })
        ));
        assert!(matches!(
            CMatrix::new(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(MatError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(CMatrix::identity(2).adjoint(), CMatrix::identity(2));
        let a = CMatrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(a.adjoint()[(0, 0)], c(0.0, -1.0));
        let r = random(3, 2, 1);
        assert_eq!(r.adjoint().dims(), (2, 3));
        assert_eq!(r.adjoint().adjoint(), r);
    }

    #[test]
    fn matmul_examples() {
        let a = random(3, 3, 2);
        assert_eq!(a.matmul(&CMatrix::identity(3)).unwrap(), a);
        let s = CMatrix::new(1, 1, vec![c(2.0, 1.0)]).unwrap();
        let t = CMatrix::new(1, 1, vec![c(3.0, 0.0)]).unwrap();
        assert_eq!(s.matmul(&t).unwrap()[(0, 0)], c(6.0, 3.0));

        let x = random(2, 3, 3);
        let y = random(3, 2, 4);
        let diff = x.matmul(&y).unwrap().max_abs_diff(&naive_matmul(&x, &y)).unwrap();
        assert!(diff < 1e-14);
        assert!(matches!(
            x.matmul(&x),
            Err(MatError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fused_products_match_explicit_adjoints() {
        let a = random(3, 4, 5);
        let b = random(2, 4, 6);
        let d = random(3, 2, 7);
        let expect = a.matmul(&b.adjoint()).unwrap();
        assert!(a.mul_adjoint(&b).unwrap().max_abs_diff(&expect).unwrap() < 1e-14);
        let expect = a.adjoint().matmul(&d).unwrap();
        assert!(a.adjoint_mul(&d).unwrap().max_abs_diff(&expect).unwrap() < 1e-14);
        let g = a.gram();
        assert!(g.is_hermitian());
        assert!(g.max_abs_diff(&a.mul_adjoint(&a).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn logdet_examples() {
        assert_eq!(logdet_hpd(&CMatrix::identity(3)).unwrap(), 0.0);
        let two = CMatrix::identity(2).scale(2.0);
        assert!((logdet_hpd(&two).unwrap() - 2.0).abs() < 1e-15);

        // Spectrum oracle: eigenvalues of B B* are the squared singular values of B.
        let b = random(3, 3, 8);
        let bb = b.gram();
        let a = bb.add(&CMatrix::identity(3)).unwrap();
        let expect: f64 = eigvals_hermitian(&bb)
            .unwrap()
            .values()
            .iter()
            .map(|s2| (1.0 + s2).log2())
            .sum();
        assert!((logdet_hpd(&a).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn logdet_errors() {
        let mut a = CMatrix::identity(2);
        a[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(logdet_hpd(&a), Err(MatError::NotHermitian { .. })));
        let indefinite = CMatrix::diag_real(&[1.0, -1.0, 2.0]);
        assert!(matches!(
            logdet_hpd(&indefinite),
            Err(MatError::NotPositiveDefinite { pivot: 1, .. })
        ));
        assert!(matches!(
            logdet_hpd(&CMatrix::zeros(2, 3)),
            Err(MatError::NotSquare { .. })
        ));
    }

    #[test]
    fn eigvals_examples() {
        assert_eq!(eigvals_hermitian(&CMatrix::identity(2)).unwrap().values(), &[1.0, 1.0]);
        let d = CMatrix::diag_real(&[1.0, 4.0]);
        assert_eq!(eigvals_hermitian(&d).unwrap().values(), &[4.0, 1.0]);

        let v = random(3, 1, 9);
        let norm2 = v.frobenius_norm().powi(2);
        let spec = eigvals_hermitian(&v.gram()).unwrap();
        assert!((spec.values()[0] - norm2).abs() < 1e-10);
        assert!(spec.values()[1].abs() < 1e-10);
        assert!(spec.values()[2].abs() < 1e-10);

        let mut bad = CMatrix::identity(2);
        bad[(1, 0)] = c(0.0, 1.0);
        assert!(eigvals_hermitian(&bad).is_err());
    }

    #[test]
    fn eigvals_of_complex_hermitian_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let a = CMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        let s = eigvals_hermitian(&a).unwrap();
        assert!((s.values()[0] - 3.0).abs() < 1e-13);
        assert!((s.values()[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn hpd_solve_examples() {
        let b = random(3, 2, 10);
        let x = hpd_solve(&CMatrix::identity(3), &b).unwrap();
        assert!(x.max_abs_diff(&b).unwrap() < 1e-15);

        let x = hpd_solve(&CMatrix::identity(2).scale(2.0), &CMatrix::identity(2)).unwrap();
        assert!(x.max_abs_diff(&CMatrix::identity(2).scale(0.5)).unwrap() < 1e-15);

        let g = random(3, 3, 11);
        let a = g.gram().add(&CMatrix::identity(3).scale(0.1)).unwrap();
        let rhs = random(3, 2, 12);
        let x = hpd_solve(&a, &rhs).unwrap();
        let resid = a.matmul(&x).unwrap().sub(&rhs).unwrap().frobenius_norm();
        assert!(resid <= 1e-9 * rhs.frobenius_norm());
    }

    fn arb_matrix(max_dim: usize) -> impl Strategy<Value = CMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, cc)| {
            prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), r * cc).prop_map(move |v| {
                CMatrix::new(r, cc, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn logdet_agrees_with_spectrum(a in arb_matrix(6)) {
            let h = a.gram().add(&CMatrix::identity(a.rows())).unwrap();
            let ld = logdet_hpd(&h).unwrap();
            let via_eig: f64 = eigvals_hermitian(&h).unwrap().values().iter().map(|v| v.log2()).sum();
            prop_assert!((ld - via_eig).abs() <= 1e-8 * ld.abs().max(1.0));
        }

        #[test]
        fn adjoint_reverses_products(a in arb_matrix(4), seed in any::<u64>()) {
            let b = random(a.cols(), 3, seed);
            let lhs = a.matmul(&b).unwrap().adjoint();
            let rhs = b.adjoint().matmul(&a.adjoint()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }

        #[test]
        fn gram_spectrum_is_psd_and_sums_to_trace(a in arb_matrix(8)) {
            let g = a.gram();
            let s = eigvals_hermitian(&g).unwrap();
            prop_assert_eq!(s.len(), g.rows());
            let tol = 1e-9 * s.max().max(f64::MIN_POSITIVE);
            prop_assert!(s.values().iter().all(|&v| v >= -tol));
            let tr = g.trace().re;
            prop_assert!((s.sum() - tr).abs() <= 1e-8 * tr.abs().max(1e-300));
            prop_assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
