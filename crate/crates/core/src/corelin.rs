//! Complex sequences and small dense matrices.
//!
//! Everything here is sized for per-frame work (tens of rows), so the
//! matrices are plain row-major buffers and the factorizations are the
//! textbook ones. Rank is the exception: it goes through a full SVD so that
//! near-dependent rows are judged by singular values rather than pivots.

use std::ops::{Deref, DerefMut, Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default relative tolerance for [`matrix_rank`].
pub const RANK_REL_TOL: f64 = 1e-9;

/// A stream of complex baseband samples.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexSeq(Vec<Complex64>);

impl ComplexSeq {
    pub fn new(samples: Vec<Complex64>) -> Self {
        ComplexSeq(samples)
    }

    pub fn zeros(len: usize) -> Self {
        ComplexSeq(vec![ZERO; len])
    }

    pub fn from_real(samples: &[f64]) -> Self {
        ComplexSeq(samples.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Prepends `n` zeros (a right shift in time).
    pub fn delayed(&self, n: usize) -> Self {
        let mut out = vec![ZERO; n];
        out.extend_from_slice(&self.0);
        ComplexSeq(out)
    }

    /// First `len` samples, zero-extended if the sequence is shorter.
    pub fn window(&self, len: usize) -> Self {
        let mut out: Vec<Complex64> = self.0.iter().take(len).copied().collect();
        out.resize(len, ZERO);
        ComplexSeq(out)
    }

    pub fn scaled(&self, g: Complex64) -> Self {
        ComplexSeq(self.0.iter().map(|&z| z * g).collect())
    }

    /// Nonzero taps as `(offset, value)` pairs.
    pub fn taps(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(i, &z)| (i, z))
    }

    pub fn max_abs_diff(&self, other: &ComplexSeq) -> f64 {
        let n = self.len().max(other.len());
        (0..n)
            .map(|i| {
                let a = self.0.get(i).copied().unwrap_or(ZERO);
                let b = other.0.get(i).copied().unwrap_or(ZERO);
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

impl Deref for ComplexSeq {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for ComplexSeq {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl From<Vec<Complex64>> for ComplexSeq {
    fn from(v: Vec<Complex64>) -> Self {
        ComplexSeq(v)
    }
}

impl FromIterator<Complex64> for ComplexSeq {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        ComplexSeq(iter.into_iter().collect())
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Stacks sequences as rows, zero-padding on the right to the longest.
    pub fn from_rows(rows: &[ComplexSeq]) -> Self {
        let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.row_mut(i)[..r.len()].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&mut self, g: Complex64) {
        self.data.iter_mut().for_each(|z| *z *= g);
    }

    pub fn add_assign(&mut self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b);
        Ok(())
    }

    pub fn add_diagonal(&mut self, v: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self[(i, i)] += v;
        }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(rhs.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<ComplexSeq> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "{}x{} * vector of {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self^H * self`, exploiting Hermitian symmetry of the result.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ai = row[i].conj();
                if ai == ZERO {
                    continue;
                }
                for j in i..n {
                    out.data[i * n + j] += ai * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[i * n + j] = out.data[j * n + i].conj();
            }
        }
        out
    }

    /// `self * self^H`.
    pub fn outer_gram(&self) -> ComplexMatrix {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: Complex64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                out.data[i * n + j] = v;
                out.data[j * n + i] = v.conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Full linear convolution, length `|a| + |b| - 1`.
pub fn convolve(a: &[Complex64], b: &[Complex64]) -> Result<ComplexSeq> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("convolve"));
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    Ok(ComplexSeq(out))
}

/// Convolution truncated to the first `len` outputs; zero-extends when the
/// full result is shorter. Empty inputs give all zeros.
pub fn convolve_window(a: &[Complex64], b: &[Complex64], len: usize) -> ComplexSeq {
    let mut out = vec![ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == ZERO {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    ComplexSeq(out)
}

/// Banded convolution matrix `T` with `T * s == convolve(h, s)`.
pub fn toeplitz_of(h: &[Complex64], input_len: usize) -> Result<ComplexMatrix> {
    if h.is_empty() {
        return Err(Error::EmptyInput("toeplitz_of: taps"));
    }
    if input_len == 0 {
        return Err(Error::EmptyInput("toeplitz_of: input length"));
    }
    let mut t = ComplexMatrix::zeros(h.len() + input_len - 1, input_len);
    for col in 0..input_len {
        for (k, &v) in h.iter().enumerate() {
            t[(col + k, col)] = v;
        }
    }
    Ok(t)
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn matrix_rank(m: &ComplexMatrix, rel_tol: f64) -> Result<usize> {
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix_rank"));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Invalid(format!("rank tolerance {rel_tol} outside (0, 1)")));
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0);
    }
    let sv = m.to_nalgebra().singular_values();
    let max = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * max).count())
}

/// Lower Cholesky factor `L` with `A = L L^H`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: ComplexMatrix,
}

impl Cholesky {
    /// Factors a Hermitian positive definite matrix; only the lower triangle
    /// of `a` is read.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::Dimension(format!("cholesky of {}x{}", n, a.cols())));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("cholesky"));
        }
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor(&self) -> &ComplexMatrix {
        &self.l
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [Complex64]) {
        let n = self.l.rows();
        for i in 0..n {
            let row = self.l.row(i);
            let mut s = b[i];
            for k in 0..i {
                s -= row[k] * b[k];
            }
            b[i] = s / row[i];
        }
    }

    /// Solves `L^H x = y` in place.
    pub fn solve_upper_in_place(&self, y: &mut [Complex64]) {
        let n = self.l.rows();
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[(k, i)].conj() * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
    }

    /// `L^{-1} B`, column by column.
    pub fn solve_lower_mat(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(Error::Dimension(format!("L^-1 with {} rows vs {n}", b.rows())));
        }
        let mut out = b.clone();
        // Forward substitution on all columns at once, row by row.
        for i in 0..n {
            let lii = self.l[(i, i)];
            for k in 0..i {
                let lik = self.l[(i, k)];
                if lik == ZERO {
                    continue;
                }
                let (head, tail) = out.data.split_at_mut(i * out.cols);
                let src = &head[k * out.cols..(k + 1) * out.cols];
                for (d, s) in tail[..out.cols].iter_mut().zip(src) {
                    *d -= lik * s;
                }
            }
            out.row_mut(i).iter_mut().for_each(|z| *z /= lii);
        }
        Ok(out)
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(Error::Dimension(format!("solve with {} rows vs {n}", b.rows())));
        }
        let mut x = ComplexMatrix::zeros(n, b.cols());
        let mut col = vec![ZERO; n];
        for j in 0..b.cols() {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            self.solve_lower_in_place(&mut col);
            self.solve_upper_in_place(&mut col);
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        Ok(x)
    }
}

/// Solves `A X = B` for Hermitian positive definite `A`.
pub fn hermitian_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !b.is_finite() {
        return Err(Error::NonFinite("hermitian_solve rhs"));
    }
    Cholesky::new(a)?.solve(b)
}

/// `A = L D L^H` with `L` unit lower triangular and `D` real positive.
#[derive(Clone, Debug)]
pub struct Ldl {
    pub l: ComplexMatrix,
    pub d: Vec<f64>,
}

pub fn ldl_hermitian(a: &ComplexMatrix) -> Result<Ldl> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Dimension(format!("ldl of {}x{}", n, a.cols())));
    }
    let mut l = ComplexMatrix::identity(n);
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = a[(j, j)].re;
        for k in 0..j {
            dj -= l[(j, k)].norm_sqr() * d[k];
        }
        if !(dj > 0.0) || !dj.is_finite() {
            return Err(Error::NotPositiveDefinite { index: j, pivot: dj });
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj() * d[k];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(Ldl { l, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_seq(rng: &mut ChaCha8Rng, n: usize) -> ComplexSeq {
        (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_row_major(r, k, random_seq(rng, r * k).into_inner()).unwrap()
    }

    #[test]
    fn convolve_delta_and_zero() {
        let out = convolve(&[ONE], &[c(2.0, 3.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(&*out, &[c(2.0, 3.0), c(4.0, 0.0)]);
        let out = convolve(&[ZERO, ZERO], &[ONE, ONE]).unwrap();
        assert_eq!(&*out, &[ZERO; 3]);
        assert!(matches!(convolve(&[], &[ONE]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn convolve_matches_double_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_seq(&mut rng, 5);
        let b = random_seq(&mut rng, 7);
        let out = convolve(&a, &b).unwrap();
        assert_eq!(out.len(), 11);
        for n in 0..11 {
            let mut s = ZERO;
            for i in 0..5 {
                for j in 0..7 {
                    if i + j == n {
                        s += a[i] * b[j];
                    }
                }
            }
            assert!((out[n] - s).norm() < 1e-12);
        }
    }

    #[test]
    fn toeplitz_layouts() {
        let t = toeplitz_of(&[ONE], 3).unwrap();
        assert_eq!(t, ComplexMatrix::identity(3));
        let t = toeplitz_of(&[ONE, c(2.0, 0.0)], 2).unwrap();
        let want = ComplexMatrix::from_row_major(
            3,
            2,
            vec![ONE, ZERO, c(2.0, 0.0), ONE, ZERO, c(2.0, 0.0)],
        )
        .unwrap();
        assert_eq!(t, want);
        assert!(toeplitz_of(&[ONE], 0).is_err());
    }

    #[test]
    fn toeplitz_agrees_with_convolve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_seq(&mut rng, 4);
        let s = random_seq(&mut rng, 6);
        let t = toeplitz_of(&h, 6).unwrap();
        let lhs = t.mul_vec(&s).unwrap();
        assert!(lhs.max_abs_diff(&convolve(&h, &s).unwrap()) < 1e-12);
    }

    #[test]
    fn rank_basic_cases() {
        assert_eq!(matrix_rank(&ComplexMatrix::identity(2), RANK_REL_TOL).unwrap(), 2);
        let m = ComplexMatrix::from_rows(&[
            ComplexSeq::from_real(&[1.0, 2.0, 3.0]),
            ComplexSeq::from_real(&[1.0, 2.0, 3.0]),
        ]);
        assert_eq!(matrix_rank(&m, RANK_REL_TOL).unwrap(), 1);
        assert_eq!(matrix_rank(&ComplexMatrix::zeros(3, 4), RANK_REL_TOL).unwrap(), 0);
        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matrix_rank(&bad, RANK_REL_TOL).is_err());
    }

    #[test]
    fn rank_of_random_two_row_matches_gram_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 2, 6);
            // Gram determinant |r0|^2 |r1|^2 - |<r0, r1>|^2 > 0 iff rank 2.
            let r0 = m.row(0);
            let r1 = m.row(1);
            let n0: f64 = r0.iter().map(|z| z.norm_sqr()).sum();
            let n1: f64 = r1.iter().map(|z| z.norm_sqr()).sum();
            let ip: Complex64 = r0.iter().zip(r1).map(|(a, b)| a.conj() * b).sum();
            let det = n0 * n1 - ip.norm_sqr();
            let expected = if det > 1e-9 * n0 * n1 { 2 } else { 1 };
            assert_eq!(matrix_rank(&m, RANK_REL_TOL).unwrap(), expected);
        }
    }

    #[test]
    fn rank_invariant_under_row_ops() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows = vec![
            random_seq(&mut rng, 5),
            random_seq(&mut rng, 5),
            random_seq(&mut rng, 5),
        ];
        let mut dep = rows.clone();
        dep[2] = dep[0].scaled(c(0.3, -1.2));
        for set in [rows, dep] {
            let base = matrix_rank(&ComplexMatrix::from_rows(&set), RANK_REL_TOL).unwrap();
            let mut swapped = set.clone();
            swapped.swap(0, 2);
            let mut scaled = set.clone();
            scaled[1] = scaled[1].scaled(c(-4.0, 0.5));
            assert_eq!(
                matrix_rank(&ComplexMatrix::from_rows(&swapped), RANK_REL_TOL).unwrap(),
                base
            );
            assert_eq!(
                matrix_rank(&ComplexMatrix::from_rows(&scaled), RANK_REL_TOL).unwrap(),
                base
            );
        }
    }

    #[test]
    fn hermitian_solve_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_matrix(&mut rng, 3, 2);
        let x = hermitian_solve(&ComplexMatrix::identity(3), &b).unwrap();
        assert!(x.max_abs_diff(&b) < 1e-15);

        let mut a = ComplexMatrix::identity(3);
        a.scale(c(2.0, 0.0));
        let x = hermitian_solve(&a, &ComplexMatrix::identity(3)).unwrap();
        let mut half = ComplexMatrix::identity(3);
        half.scale(c(0.5, 0.0));
        assert!(x.max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn hermitian_solve_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 4, 12] {
            let g = random_matrix(&mut rng, n, n);
            let mut a = g.matmul(&g.adjoint()).unwrap();
            a.add_diagonal(1.0);
            let b = random_matrix(&mut rng, n, 3);
            let x = hermitian_solve(&a, &b).unwrap();
            let mut r = a.matmul(&x).unwrap();
            r.scale(c(-1.0, 0.0));
            r.add_assign(&b).unwrap();
            let bound =
                1e-10 * (a.frobenius_norm() * x.frobenius_norm() + b.frobenius_norm());
            assert!(r.frobenius_norm() < bound);
        }
    }

    #[test]
    fn hermitian_solve_rejects_indefinite() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![ONE, ZERO, ZERO, c(-1.0, 0.0)]).unwrap();
        assert!(matches!(
            hermitian_solve(&a, &ComplexMatrix::identity(2)),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
    }

    #[test]
    fn ldl_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_matrix(&mut rng, 6, 6);
        let mut a = g.matmul(&g.adjoint()).unwrap();
        a.add_diagonal(0.5);
        let Ldl { l, d } = ldl_hermitian(&a).unwrap();
        let mut ld = l.clone();
        for i in 0..6 {
            for j in 0..6 {
                ld[(i, j)] *= d[j];
            }
        }
        let back = ld.matmul(&l.adjoint()).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-10);
    }

    #[test]
    fn whitening_solve_lower_mat() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = random_matrix(&mut rng, 5, 5);
        let mut a = g.matmul(&g.adjoint()).unwrap();
        a.add_diagonal(1.0);
        let ch = Cholesky::new(&a).unwrap();
        let b = random_matrix(&mut rng, 5, 3);
        let y = ch.solve_lower_mat(&b).unwrap();
        let back = ch.factor().matmul(&y).unwrap();
        assert!(back.max_abs_diff(&b) < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn seq(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
            proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..max)
        }

        fn to_seq(v: &[(f64, f64)]) -> ComplexSeq {
            v.iter().map(|&(a, b)| c(a, b)).collect()
        }

        proptest! {
            #[test]
            fn convolve_commutes(a in seq(9), b in seq(9)) {
                let a = to_seq(&a);
                let b = to_seq(&b);
                let ab = convolve(&a, &b).unwrap();
                let ba = convolve(&b, &a).unwrap();
                prop_assert!(ab.max_abs_diff(&ba) < 1e-12 * (1.0 + a.energy() * b.energy()).sqrt() * 10.0);
            }

            #[test]
            fn toeplitz_matches_convolve(h in seq(6), s in seq(8)) {
                let h = to_seq(&h);
                let s = to_seq(&s);
                let t = toeplitz_of(&h, s.len()).unwrap();
                let lhs = t.mul_vec(&s).unwrap();
                prop_assert!(lhs.max_abs_diff(&convolve(&h, &s).unwrap()) < 1e-10);
            }
        }
    }
}
