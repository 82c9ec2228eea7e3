//! Dense complex matrices for the small (d <= 8) operators used throughout
//! the crate.
//!
//! [`Mat`] is a general square complex matrix. [`HermMat`] wraps it with the
//! Hermitian invariant: every constructor replaces `m` by `(m + m†)/2`, so
//! round-off never accumulates an anti-Hermitian part.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative off-diagonal Frobenius norm at which Jacobi stops.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

#[inline]
fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![czero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data; `data.len()` must be a square.
    pub fn from_vec(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real(dim: usize, data: &[T]) -> Result<Self> {
        Self::from_vec(dim, data.iter().map(|&x| c(x, T::zero())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim)
            .map(|i| self[(i, i)])
            .fold(czero(), |a, b| a + b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let q = other.dim;
        Self::from_fn(self.dim * q, |r, s| {
            self[(r / q, s / q)] * other[(r % q, s % q)]
        })
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C<T> {
        let n = self.dim;
        let mut acc = czero();
        for i in 0..n {
            for k in 0..n {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self[(i, j)] * v[j])
                    .fold(czero(), |a, b| a + b)
            })
            .collect()
    }

    /// Hermitian part `(m + m†)/2`.
    pub fn hermitian_part(&self) -> HermMat<T> {
        HermMat::from_mat(self.clone())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        Mat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        Mat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Dense Hermitian matrix with value semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMat<T> {
    inner: Mat<T>,
}

/// Result of [`HermMat::eigh`]: ascending eigenvalues and the matching
/// orthonormal eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigh<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

impl<T: Real> Eigh<T> {
    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        (0..self.vectors.dim())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn map(&self, f: impl Fn(T) -> T) -> HermMat<T> {
        let n = self.values.len();
        let fl: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        HermMat::from_mat(Mat::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k])
                .fold(czero(), |a, b| a + b)
        }))
    }
}

impl<T: Real> HermMat<T> {
    /// Wraps `m`, replacing it by its Hermitian part.
    pub fn from_mat(m: Mat<T>) -> Self {
        let n = m.dim;
        let two = T::lit(2.0);
        let sym = Mat::from_fn(n, |i, j| {
            if i == j {
                c(m[(i, i)].re, T::zero())
            } else {
                (m[(i, j)] + m[(j, i)].conj()) / two
            }
        });
        Self { inner: sym }
    }

    /// Row-major complex entries.
    pub fn new(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        Mat::from_vec(dim, data).map(Self::from_mat)
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real(dim: usize, data: &[T]) -> Result<Self> {
        Mat::from_real(dim, data).map(Self::from_mat)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: Mat::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: Mat::identity(dim),
        }
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Mat::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, T::zero());
        }
        Self { inner: m }
    }

    /// Rank-one projector `|v⟩⟨v|` (no normalization applied).
    pub fn projector(v: &[C<T>]) -> Self {
        Self::from_mat(Mat::from_fn(v.len(), |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn as_mat(&self) -> &Mat<T> {
        &self.inner
    }

    pub fn into_mat(self) -> Mat<T> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.inner[(i, j)]
    }

    pub fn trace(&self) -> T {
        self.inner.trace().re
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.inner.frobenius_norm()
    }

    /// Real inner product `Tr(self · other)`.
    pub fn inner_product(&self, other: &Self) -> T {
        self.inner.trace_product(&other.inner).re
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_mat(self.inner.kron(&other.inner))
    }

    /// `u† · self · u`.
    pub fn conjugate_by(&self, u: &Mat<T>) -> Self {
        Self::from_mat(&(&u.adjoint() * &self.inner) * u)
    }

    /// `u · self · u†`.
    pub fn transform(&self, u: &Mat<T>) -> Self {
        Self::from_mat(&(u * &self.inner) * &u.adjoint())
    }

    /// Largest entrywise deviation `|m_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (&self.inner - &other.inner).max_abs()
    }

    /// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
    pub fn eigh(&self) -> Result<Eigh<T>> {
        jacobi_eigh(&self.inner)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        self.eigh().map(|e| e.values)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?[0])
    }

    /// Marginal on the factors listed in `keep` (in their original order).
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "factor dimensions {dims:?} do not multiply to {}",
                self.dim()
            )));
        }
        if keep.iter().any(|&k| k >= dims.len()) {
            return Err(Error::DimensionMismatch(format!(
                "kept factor index out of range in {keep:?}"
            )));
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        let compose = |kd: &[usize], td: &[usize]| -> usize {
            let mut digits = vec![0usize; dims.len()];
            for (slot, &f) in kept.iter().enumerate() {
                digits[f] = kd[slot];
            }
            for (slot, &f) in traced.iter().enumerate() {
                digits[f] = td[slot];
            }
            digits
                .iter()
                .zip(dims)
                .fold(0usize, |acc, (&d, &n)| acc * n + d)
        };

        let mut out = Mat::zeros(dk);
        for i in 0..dk {
            let di = split_index(i, &kept_dims);
            for j in 0..dk {
                let dj = split_index(j, &kept_dims);
                let mut acc = czero();
                for t in 0..dt {
                    let dtt = split_index(t, &traced_dims);
                    acc = acc + self.inner[(compose(&di, &dtt), compose(&dj, &dtt))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self::from_mat(out))
    }

    /// Transpose on factor `sys` of the tensor product described by `dims`.
    pub fn partial_transpose(&self, dims: &[usize], sys: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() || sys >= dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot transpose factor {sys} of {dims:?} on a {}-dimensional matrix",
                self.dim()
            )));
        }
        let n = self.dim();
        let mut out = Mat::zeros(n);
        for i in 0..n {
            let mut di = split_index(i, dims);
            for j in 0..n {
                let mut dj = split_index(j, dims);
                std::mem::swap(&mut di[sys], &mut dj[sys]);
                let r = join_index(&di, dims);
                let s = join_index(&dj, dims);
                std::mem::swap(&mut di[sys], &mut dj[sys]);
                out[(r, s)] = self.inner[(i, j)];
            }
        }
        Ok(Self::from_mat(out))
    }

    /// True when the smallest eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: T) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }

    /// Projection onto the PSD cone (negative eigenvalues clipped to zero).
    pub fn psd_part(&self) -> Result<Self> {
        Ok(self.eigh()?.map(|l| l.max(T::zero())))
    }

    /// Cholesky factorization `M = L L†`; `None` unless `M` is numerically
    /// positive definite.
    pub fn cholesky(&self) -> Option<Cholesky<T>> {
        let n = self.dim();
        let a = &self.inner;
        let mut l = Mat::zeros(n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = c(djj, T::zero());
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Cholesky { l })
    }
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Mat<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(&self) -> &Mat<T> {
        &self.l
    }

    pub fn log_det(&self) -> T {
        (0..self.l.dim).map(|i| self.l[(i, i)].re.ln()).sum::<T>() * T::lit(2.0)
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.l.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            let s = (0..i).fold(y[i], |s, k| s - self.l[(i, k)] * y[k]);
            y[i] = s / self.l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let s = (i + 1..n).fold(y[i], |s, k| s - self.l[(k, i)].conj() * y[k]);
            y[i] = s / self.l[(i, i)].re;
        }
        y
    }

    /// `L⁻¹ B` for a general square `B`.
    pub fn lower_solve(&self, b: &Mat<T>) -> Mat<T> {
        let n = self.l.dim;
        let mut out = b.clone();
        for j in 0..n {
            for i in 0..n {
                let mut s = out[(i, j)];
                for k in 0..i {
                    s = s - self.l[(i, k)] * out[(k, j)];
                }
                out[(i, j)] = s / self.l[(i, i)].re;
            }
        }
        out
    }

    /// `L⁻¹ M L⁻†`, the congruence that maps `M = L L†` to the identity.
    pub fn whiten(&self, m: &HermMat<T>) -> HermMat<T> {
        let y = self.lower_solve(m.as_mat());
        HermMat::from_mat(self.lower_solve(&y.adjoint()).adjoint())
    }

    pub fn inverse(&self) -> HermMat<T> {
        let n = self.l.dim;
        let mut inv = Mat::zeros(n);
        let mut e = vec![czero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = czero());
            e[j] = c(T::one(), T::zero());
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        HermMat::from_mat(inv)
    }
}

impl<T: Real> Add for &HermMat<T> {
    type Output = HermMat<T>;
    fn add(self, rhs: &HermMat<T>) -> HermMat<T> {
        HermMat {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl<T: Real> Sub for &HermMat<T> {
    type Output = HermMat<T>;
    fn sub(self, rhs: &HermMat<T>) -> HermMat<T> {
        HermMat {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl<T: Real> Neg for &HermMat<T> {
    type Output = HermMat<T>;
    fn neg(self) -> HermMat<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for &HermMat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &HermMat<T>) -> Mat<T> {
        &self.inner * &rhs.inner
    }
}

fn split_index(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        digits[k] = idx % dims[k];
        idx /= dims[k];
    }
    digits
}

fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

fn jacobi_eigh<T: Real>(m: &Mat<T>) -> Result<Eigh<T>> {
    let n = m.dim();
    let mut a = HermMat::from_mat(m.clone()).into_mat();
    let mut v = Mat::identity(n);
    let scale = a.frobenius_norm();
    let tol = T::tol(JACOBI_OFF_TOL) * scale;

    let off_norm = |a: &Mat<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == T::zero() || off_norm(&a) <= tol;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs == T::zero() {
                    continue;
                }
                let phase = b / babs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (T::lit(2.0) * babs);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;
                // W = D·J with D = diag(.., conj(phase) at q, ..), J the real rotation.
                let w_pp = c(cs, T::zero());
                let w_pq = c(sn, T::zero());
                let w_qp = phase.conj() * (-sn);
                let w_qq = phase.conj() * cs;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * w_pp + akq * w_qp;
                    a[(k, q)] = akp * w_pq + akq * w_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
                    a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)] = c(a[(p, p)].re, T::zero());
                a[(q, q)] = c(a[(q, q)].re, T::zero());

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * w_pp + vkq * w_qp;
                    v[(k, q)] = vkp * w_pq + vkq * w_qq;
                }
            }
        }
        converged = off_norm(&a) <= tol;
    }
    if !converged {
        return Err(Error::EigenNotConverged {
            sweeps,
            off_norm: off_norm(&a).to_f64_lossy(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Mat::from_fn(n, |r, k| v[(r, order[k])]);
    Ok(Eigh { values, vectors })
}

/// Single-qubit Pauli matrix: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub fn pauli<T: Real>(i: usize) -> HermMat<T> {
    let (o, z) = (T::one(), T::zero());
    let data = match i {
        0 => [c(o, z), c(z, z), c(z, z), c(o, z)],
        1 => [c(z, z), c(o, z), c(o, z), c(z, z)],
        2 => [c(z, z), c(z, -o), c(z, o), c(z, z)],
        3 => [c(o, z), c(z, z), c(z, z), c(-o, z)],
        _ => panic!("Pauli index {i} out of range 0..4"),
    };
    HermMat::new(2, data.to_vec()).expect("2x2 data")
}

/// Tensor product of single-qubit Paulis, e.g. `[1, 1, 1]` for X⊗X⊗X.
pub fn pauli_string<T: Real>(indices: &[usize]) -> HermMat<T> {
    indices
        .iter()
        .fold(HermMat::identity(1), |acc, &i| acc.kron(&pauli(i)))
}

/// Serializable view of a matrix: `[[[re, im], ...], ...]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixRows(pub Vec<Vec<[f64; 2]>>);

impl<T: Real> From<&HermMat<T>> for MatrixRows {
    fn from(m: &HermMat<T>) -> Self {
        let n = m.dim();
        MatrixRows(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let z = m.get(i, j);
                            [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
                        })
                        .collect()
                })
                .collect(),
        )
    }
}
