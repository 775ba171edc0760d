//! Small dense complex linear algebra.
//!
//! Everything physical in this crate lives in the two-dimensional span of a
//! state pair, so the hot paths are 2x2. The Hermitian eigensolver has an
//! exact closed form for that case and falls back to cyclic Jacobi sweeps for
//! larger matrices, which only appear in cross-checks.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest vector dimension or matrix side allowed anywhere.
pub const DIMENSION_CAP: usize = 4096;

/// Max entry deviation from Hermiticity accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues down to this are clamped to zero in [`psd_sqrt`].
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues of magnitude below this are treated as exact zeros when taking
/// square roots. Rounding leaves O(1e-16) residue on exactly singular inputs,
/// and its square root (1e-8) would otherwise leak into failure operators.
pub const ZERO_SNAP: f64 = 1e-14;

const DENSITY_TRACE_TOL: f64 = 1e-8;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if entries.len() > DIMENSION_CAP {
            return Err(Error::DimensionCap {
                dim: entries.len(),
                cap: DIMENSION_CAP,
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut entries = vec![C64::default(); dim];
        entries[index] = c(1.0, 0.0);
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Ok(self.scale(c(1.0 / n, 0.0)))
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: C64, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product(a: &ComplexVector, b: &ComplexVector) -> Result<C64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

pub fn tensor_product(a: &ComplexVector, b: &ComplexVector) -> Result<ComplexVector> {
    tensor_product_capped(a, b, DIMENSION_CAP)
}

pub fn tensor_product_capped(
    a: &ComplexVector,
    b: &ComplexVector,
    cap: usize,
) -> Result<ComplexVector> {
    let dim = a.dim().checked_mul(b.dim()).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap,
    })?;
    if dim > cap.min(DIMENSION_CAP) {
        return Err(Error::DimensionCap { dim, cap });
    }
    let mut entries = Vec::with_capacity(dim);
    for x in &a.entries {
        entries.extend(b.entries.iter().map(|y| x * y));
    }
    ComplexVector::new(entries)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::Shape {
                rows,
                cols,
                entries: entries.len(),
            });
        }
        if rows > DIMENSION_CAP || cols > DIMENSION_CAP {
            return Err(Error::DimensionCap {
                dim: rows.max(cols),
                cap: DIMENSION_CAP,
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            rows: N,
            cols: N,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * n + i] = c(v, 0.0);
        }
        m
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &ComplexVector, b: &ComplexVector) -> Self {
        let (rows, cols) = (a.dim(), b.dim());
        let mut entries = Vec::with_capacity(rows * cols);
        for x in a.entries() {
            entries.extend(b.entries().iter().map(|y| x * y.conj()));
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dims(self.cols, rhs.rows)?;
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::default() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.cols, v.dim())?;
        let entries = (0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v.entries())
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect();
        Ok(ComplexVector { entries })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                left: self.entries.len(),
                right: other.entries.len(),
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest `|m_ij - conj(m_ji)|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    fn binary(&self, rhs: &Self, op: impl Fn(C64, C64) -> C64) -> Self {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.entries.chunks(self.cols).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.binary(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.binary(rhs, |a, b| a - b)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("inner dimensions must agree")
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: ComplexVector,
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Vec<Eigenpair>> {
    check_hermitian(m)?;
    match m.rows {
        1 => Ok(vec![Eigenpair {
            value: m.get(0, 0).re,
            vector: ComplexVector::basis(1, 0)?,
        }]),
        2 => Ok(eigen_2x2(m)),
        _ => jacobi_eigensystem(m),
    }
}

fn eigen_2x2(m: &ComplexMatrix) -> Vec<Eigenpair> {
    // Average the off-diagonal pair so tiny non-Hermitian noise is symmetric.
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b.norm());
    let (hi, lo) = (mean + radius, mean - radius);

    let first = if b.norm() == 0.0 {
        if a >= d {
            vec![c(1.0, 0.0), C64::default()]
        } else {
            vec![C64::default(), c(1.0, 0.0)]
        }
    } else {
        // Two null vectors of (m - hi); take the better conditioned one.
        let u = [b, c(hi - a, 0.0)];
        let v = [c(hi - d, 0.0), b.conj()];
        let nu = u[0].norm_sqr() + u[1].norm_sqr();
        let nv = v[0].norm_sqr() + v[1].norm_sqr();
        let (w, n) = if nu >= nv { (u, nu) } else { (v, nv) };
        let s = 1.0 / n.sqrt();
        vec![w[0] * s, w[1] * s]
    };
    let second = vec![-first[1].conj(), first[0].conj()];
    vec![
        Eigenpair {
            value: hi,
            vector: ComplexVector { entries: first },
        },
        Eigenpair {
            value: lo,
            vector: ComplexVector { entries: second },
        },
    ]
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices of any size.
///
/// Used directly by tests to cross-check the closed-form 2x2 path.
pub fn jacobi_eigensystem(m: &ComplexMatrix) -> Result<Vec<Eigenpair>> {
    check_hermitian(m)?;
    let n = m.rows;
    let mut a = m.clone();
    // Symmetrize.
    for i in 0..n {
        let d = a.get(i, i).re;
        a.set(i, i, c(d, 0.0));
        for j in (i + 1)..n {
            let z = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, z);
            a.set(j, i, z.conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / g;
                let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = diag-phase * real rotation, restricted to (p, q).
                let jpp = c(cs, 0.0);
                let jpq = c(sn, 0.0);
                let jqp = phase.conj() * (-sn);
                let jqq = phase.conj() * cs;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * jpp + akq * jqp);
                    a.set(k, q, akp * jpq + akq * jqq);
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * jpp + vkq * jqp);
                    v.set(k, q, vkp * jpq + vkq * jqq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, jpp.conj() * apk + jqp.conj() * aqk);
                    a.set(q, k, jpq.conj() * apk + jqq.conj() * aqk);
                }
                a.set(p, q, C64::default());
                a.set(q, p, C64::default());
                let (dp, dq) = (a.get(p, p).re, a.get(q, q).re);
                a.set(p, p, c(dp, 0.0));
                a.set(q, q, c(dq, 0.0));
            }
        }
    }

    let mut pairs: Vec<Eigenpair> = (0..n)
        .map(|j| Eigenpair {
            value: a.get(j, j).re,
            vector: ComplexVector {
                entries: (0..n).map(|i| v.get(i, j)).collect(),
            },
        })
        .collect();
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

/// `Σ λ_i |v_i⟩⟨v_i|`
pub fn from_eigensystem(pairs: &[Eigenpair]) -> ComplexMatrix {
    let n = pairs.first().map_or(0, |p| p.vector.dim());
    let mut out = ComplexMatrix::zeros(n, n);
    for p in pairs {
        let proj = ComplexMatrix::outer(&p.vector, &p.vector).scale(c(p.value, 0.0));
        out = &out + &proj;
    }
    out
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut pairs = hermitian_eigensystem(m)?;
    for p in &mut pairs {
        if p.value < -PSD_TOL {
            return Err(Error::NotPsd {
                eigenvalue: p.value,
            });
        }
        p.value = if p.value < ZERO_SNAP {
            0.0
        } else {
            p.value.sqrt()
        };
    }
    Ok(from_eigensystem(&pairs))
}

/// Checks Hermiticity, unit trace and positivity of a density matrix.
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    let pairs = hermitian_eigensystem(rho).map_err(|e| Error::InvalidDensity(e.to_string()))?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DENSITY_TRACE_TOL || tr.im.abs() > DENSITY_TRACE_TOL {
        return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
    }
    if let Some(p) = pairs.iter().find(|p| p.value < -PSD_TOL) {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {:e}",
            p.value
        )));
    }
    Ok(())
}

/// `½ Σ |λ_i(r1 - r2)|`, clamped into [0, 1].
pub fn trace_distance(r1: &ComplexMatrix, r2: &ComplexMatrix) -> Result<f64> {
    validate_density(r1)?;
    validate_density(r2)?;
    if r1.rows != r2.rows {
        return Err(Error::DimensionMismatch {
            left: r1.rows,
            right: r2.rows,
        });
    }
    // Fixed argument order keeps the result exactly symmetric.
    let (r1, r2) = if entry_order(r1, r2).is_le() {
        (r1, r2)
    } else {
        (r2, r1)
    };
    let diff = r1 - r2;
    let d: f64 = hermitian_eigensystem(&diff)?
        .iter()
        .map(|p| p.value.abs())
        .sum();
    Ok((0.5 * d).clamp(0.0, 1.0))
}

fn entry_order(a: &ComplexMatrix, b: &ComplexMatrix) -> std::cmp::Ordering {
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// `|ψ⟩⟨ψ|` for a unit vector.
pub fn pure_density(v: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::outer(v, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn v(xs: &[(f64, f64)]) -> ComplexVector {
        ComplexVector::new(xs.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let e1 = ComplexVector::basis(2, 1).unwrap();
        assert_eq!(inner_product(&e0, &e0).unwrap(), c(1.0, 0.0));
        assert_eq!(inner_product(&e0, &e1).unwrap(), c(0.0, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = v(&[(s, 0.0), (0.0, s)]);
        let b = v(&[(s, 0.0), (0.0, -s)]);
        // (1)(1)/2 + conj(i)(-i)/2 = 1/2 + (-i)(-i)/2 = 1/2 - 1/2
        assert!(inner_product(&a, &b).unwrap().norm() < 1e-15);
        assert!(matches!(
            inner_product(&e0, &ComplexVector::basis(3, 0).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let a = v(&[(0.3, 0.1), (0.2, -0.7)]);
        let b = v(&[(-0.4, 0.5), (0.9, 0.2)]);
        let k = c(0.2, 1.3);
        let lhs = inner_product(&a.scale(k), &b).unwrap();
        let rhs = k.conj() * inner_product(&a, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
        let lhs = inner_product(&a, &b.scale(k)).unwrap();
        assert!((lhs - k * inner_product(&a, &b).unwrap()).norm() < 1e-15);
        let aa = inner_product(&a, &a).unwrap();
        assert_eq!(aa.im, 0.0);
        assert!(aa.re >= 0.0);
    }

    #[test]
    fn tensor_product_basis_and_cap() {
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let t = tensor_product(&e0, &e0).unwrap();
        assert_eq!(t, ComplexVector::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap());
        let big = ComplexVector::basis(64, 0).unwrap();
        let bigger = ComplexVector::basis(128, 0).unwrap();
        assert!(matches!(
            tensor_product(&big, &bigger),
            Err(Error::DimensionCap { dim: 8192, .. })
        ));
        assert!(tensor_product_capped(&e0, &e0, 3).is_err());
    }

    #[test]
    fn eigen_examples() {
        let id = ComplexMatrix::identity(2);
        let vals: Vec<f64> = hermitian_eigensystem(&id)
            .unwrap()
            .iter()
            .map(|p| p.value)
            .collect();
        assert_eq!(vals, vec![1.0, 1.0]);

        let d = ComplexMatrix::diag(&[3.0, -1.0]);
        let vals: Vec<f64> = hermitian_eigensystem(&d)
            .unwrap()
            .iter()
            .map(|p| p.value)
            .collect();
        assert_eq!(vals, vec![3.0, -1.0]);

        // [[0.5, 0.1], [0.1, 0.5]]: characteristic polynomial (0.5 - λ)^2 = 0.01
        let m = ComplexMatrix::from_rows([[c(0.5, 0.0), c(0.1, 0.0)], [c(0.1, 0.0), c(0.5, 0.0)]]);
        let pairs = hermitian_eigensystem(&m).unwrap();
        assert_abs_diff_eq!(pairs[0].value, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(pairs[1].value, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows([[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(1.0, 0.0)]]);
        assert!(matches!(
            hermitian_eigensystem(&m),
            Err(Error::NotHermitian { .. })
        ));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eigensystem(&rect),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn jacobi_matches_closed_form_on_2x2() {
        let m =
            ComplexMatrix::from_rows([[c(0.3, 0.0), c(0.2, -0.45)], [c(0.2, 0.45), c(-0.7, 0.0)]]);
        let a = hermitian_eigensystem(&m).unwrap();
        let b = jacobi_eigensystem(&m).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x.value, y.value, epsilon = 1e-13);
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let id = ComplexMatrix::identity(2);
        assert!(psd_sqrt(&id).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
        let r = psd_sqrt(&ComplexMatrix::diag(&[4.0, 9.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::diag(&[2.0, 3.0])).unwrap() < 1e-15);
        // Small negatives are clamped, larger ones rejected.
        assert!(psd_sqrt(&ComplexMatrix::diag(&[1.0, -1e-12])).is_ok());
        assert!(matches!(
            psd_sqrt(&ComplexMatrix::diag(&[1.0, -1e-6])),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn trace_distance_examples() {
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let e1 = ComplexVector::basis(2, 1).unwrap();
        let r0 = pure_density(&e0);
        assert_eq!(trace_distance(&r0, &r0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            trace_distance(&r0, &pure_density(&e1)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        // overlap 0.5: distance sqrt(1 - 0.25)
        let b = ComplexVector::from_real(&[0.5, 0.75_f64.sqrt()]).unwrap();
        assert_abs_diff_eq!(
            trace_distance(&r0, &pure_density(&b)).unwrap(),
            0.75_f64.sqrt(),
            epsilon = 1e-14
        );
        let bad = ComplexMatrix::diag(&[0.7, 0.7]);
        assert!(matches!(
            trace_distance(&r0, &bad),
            Err(Error::InvalidDensity(_))
        ));
        let negative = ComplexMatrix::diag(&[1.5, -0.5]);
        assert!(trace_distance(&negative, &r0).is_err());
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(matches!(ComplexVector::new(vec![]), Err(Error::Empty)));
        assert!(matches!(
            ComplexVector::from_real(&[f64::NAN]),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![C64::default(); 3]),
            Err(Error::Shape { .. })
        ));
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| c(r, i))
    }

    fn arb_unit(dim: usize) -> impl Strategy<Value = ComplexVector> {
        proptest::collection::vec(arb_c64(), dim)
            .prop_filter("nonzero", |xs| {
                xs.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
            })
            .prop_map(|xs| ComplexVector::new(xs).unwrap().normalized().unwrap())
    }

    fn arb_hermitian() -> impl Strategy<Value = ComplexMatrix> {
        (2usize..7).prop_flat_map(|n| {
            proptest::collection::vec(arb_c64(), n * n).prop_map(move |xs| {
                let g = ComplexMatrix::new(n, n, xs).unwrap();
                (&g + &g.adjoint()).scale(c(0.5, 0.0))
            })
        })
    }

    fn arb_density(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec(arb_c64(), dim * dim).prop_map(move |xs| {
            let g = ComplexMatrix::new(dim, dim, xs).unwrap();
            let p = g.matmul(&g.adjoint()).unwrap();
            let tr = p.trace().re;
            p.scale(c(1.0 / tr, 0.0))
        })
    }

    proptest! {
        #[test]
        fn eigen_reconstructs_random_hermitian(m in arb_hermitian()) {
            let pairs = hermitian_eigensystem(&m).unwrap();
            for w in pairs.windows(2) {
                prop_assert!(w[0].value >= w[1].value);
            }
            for (i, p) in pairs.iter().enumerate() {
                for q in &pairs[i..] {
                    let ip = inner_product(&p.vector, &q.vector).unwrap();
                    let expect = if std::ptr::eq(p, q) { 1.0 } else { 0.0 };
                    prop_assert!((ip - c(expect, 0.0)).norm() <= 1e-10);
                }
            }
            let back = from_eigensystem(&pairs);
            prop_assert!(back.max_abs_diff(&m).unwrap() <= 1e-9);
        }

        #[test]
        fn psd_sqrt_squares_back(g in proptest::collection::vec(arb_c64(), 9)) {
            let g = ComplexMatrix::new(3, 3, g).unwrap();
            let m = g.matmul(&g.adjoint()).unwrap();
            let r = psd_sqrt(&m).unwrap();
            prop_assert!(r.hermitian_deviation() <= 1e-12);
            prop_assert!((&r * &r).max_abs_diff(&m).unwrap() <= 1e-9);
        }

        #[test]
        fn tensor_overlap_is_multiplicative(
            a in arb_unit(2), b in arb_unit(3), x in arb_unit(2), y in arb_unit(3)
        ) {
            let lhs = inner_product(
                &tensor_product(&a, &b).unwrap(),
                &tensor_product(&x, &y).unwrap(),
            ).unwrap();
            let rhs = inner_product(&a, &x).unwrap() * inner_product(&b, &y).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
            prop_assert!((tensor_product(&a, &b).unwrap().norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn trace_distance_is_a_metric(
            r1 in arb_density(3), r2 in arb_density(3), r3 in arb_density(3)
        ) {
            let d12 = trace_distance(&r1, &r2).unwrap();
            let d21 = trace_distance(&r2, &r1).unwrap();
            let d13 = trace_distance(&r1, &r3).unwrap();
            let d23 = trace_distance(&r2, &r3).unwrap();
            prop_assert_eq!(d12, d21);
            prop_assert!(d13 <= d12 + d23 + 1e-10);
            prop_assert!(trace_distance(&r1, &r1).unwrap() <= 1e-12);
        }
    }
}
