//! Curves as coefficient vectors against an orthonormal Fourier basis.
//!
//! Basis ordering is fixed: constant, then `cos 2πku`, `sin 2πku` for
//! `k = 1, 2, …`, truncated at `J` functions, with `u = (x − a)/(b − a)`.
//! On `[a, b]` each function carries a `1/√(b − a)` factor so the family is
//! orthonormal under `∫_a^b f g dx`. Inner products between curves on a
//! shared basis are therefore plain dot products of coefficients.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::linalg::{Mat, Qr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    family: BasisFamily,
    dim: usize,
    lower: f64,
    upper: f64,
}

/// Fourier basis of dimension `dim` on `[lower, upper]`.
pub fn fourier_basis(dim: usize, domain: (f64, f64)) -> Result<BasisSpec> {
    BasisSpec::fourier(dim, domain.0, domain.1)
}

impl BasisSpec {
    pub fn fourier(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("basis dimension must be at least 1"));
        }
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(invalid(format!("degenerate domain [{lower}, {upper}]")));
        }
        Ok(Self { family: BasisFamily::Fourier, dim, lower, upper })
    }

    /// `J` Fourier functions on `[0, 1]`.
    pub fn unit_fourier(dim: usize) -> Result<Self> {
        Self::fourier(dim, 0.0, 1.0)
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    /// Value of basis function `j` (0-based) at `x`.
    pub fn eval(&self, j: usize, x: f64) -> f64 {
        assert!(j < self.dim, "basis index out of range");
        let len = self.upper - self.lower;
        let u = (x - self.lower) / len;
        let norm = 1.0 / libm::sqrt(len);
        if j == 0 {
            return norm;
        }
        let k = ((j + 1) / 2) as f64;
        let arg = 2.0 * PI * k * u;
        if j % 2 == 1 {
            norm * SQRT_2 * libm::cos(arg)
        } else {
            norm * SQRT_2 * libm::sin(arg)
        }
    }

    /// All `J` basis values at `x`.
    pub fn eval_all(&self, x: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.dim);
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.eval(j, x);
        }
    }

    /// `grid.len() × J` design matrix of basis values.
    pub fn design_matrix(&self, grid: &[f64]) -> Mat {
        Mat::from_fn(grid.len(), self.dim, |m, j| self.eval(j, grid[m]))
    }
}

/// A function stored as basis coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    basis: BasisSpec,
    coef: Vec<f64>,
}

impl Curve {
    pub fn new(basis: BasisSpec, coef: Vec<f64>) -> Result<Self> {
        if coef.len() != basis.dim() {
            return Err(invalid(format!(
                "curve has {} coefficients for a basis of dimension {}",
                coef.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, coef })
    }

    pub fn zero(basis: BasisSpec) -> Self {
        Self { basis, coef: vec![0.0; basis.dim()] }
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn coef(&self) -> &[f64] {
        &self.coef
    }

    pub fn into_coef(self) -> Vec<f64> {
        self.coef
    }

    /// Squared Hilbert norm; equals `Σ coef²` by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.coef.iter().map(|c| c * c).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coef.iter().enumerate().map(|(j, c)| c * self.basis.eval(j, x)).sum()
    }

    /// `alpha·self + beta·other`.
    pub fn combine(&self, alpha: f64, other: &Curve, beta: f64) -> Result<Curve> {
        if self.basis != other.basis {
            return Err(Error::IncompatibleBasis);
        }
        let coef = self.coef.iter().zip(&other.coef).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(Curve { basis: self.basis, coef })
    }
}

/// `∫ f g` over the shared domain.
pub fn inner_product(f: &Curve, g: &Curve) -> Result<f64> {
    if f.basis != g.basis {
        return Err(Error::IncompatibleBasis);
    }
    Ok(f.coef.iter().zip(&g.coef).map(|(a, b)| a * b).sum())
}

/// Integral operator `f ↦ ∫ B(·, v) f(v) dv` in coefficient form:
/// `B(u, v) = Σ matrix[j, k] φ_j(u) ψ_k(v)` maps coefficients by `matrix · c`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelOperator {
    matrix: Mat,
    in_basis: BasisSpec,
    out_basis: BasisSpec,
}

impl KernelOperator {
    pub fn new(matrix: Mat, in_basis: BasisSpec, out_basis: BasisSpec) -> Result<Self> {
        if matrix.rows() != out_basis.dim() || matrix.cols() != in_basis.dim() {
            return Err(invalid(format!(
                "kernel is {}x{} but bases have dimensions {} -> {}",
                matrix.rows(),
                matrix.cols(),
                in_basis.dim(),
                out_basis.dim()
            )));
        }
        Ok(Self { matrix, in_basis, out_basis })
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn in_basis(&self) -> &BasisSpec {
        &self.in_basis
    }

    pub fn out_basis(&self) -> &BasisSpec {
        &self.out_basis
    }

    /// Kernel value `B(u, v)`.
    pub fn kernel(&self, u: f64, v: f64) -> f64 {
        let mut s = 0.0;
        for j in 0..self.matrix.rows() {
            let pj = self.out_basis.eval(j, u);
            for k in 0..self.matrix.cols() {
                s += self.matrix[(j, k)] * pj * self.in_basis.eval(k, v);
            }
        }
        s
    }
}

pub fn apply_operator(op: &KernelOperator, f: &Curve) -> Result<Curve> {
    if f.basis != op.in_basis {
        return Err(Error::IncompatibleBasis);
    }
    Ok(Curve { basis: op.out_basis, coef: op.matrix.matvec(&f.coef) })
}

/// A `q`-vector of functions on one basis, stored as a `q × J` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCurve {
    basis: BasisSpec,
    coefs: Mat,
}

impl VectorCurve {
    pub fn new(basis: BasisSpec, coefs: Mat) -> Result<Self> {
        if coefs.cols() != basis.dim() {
            return Err(invalid(format!(
                "vector curve has {} columns for a basis of dimension {}",
                coefs.cols(),
                basis.dim()
            )));
        }
        Ok(Self { basis, coefs })
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn coefs(&self) -> &Mat {
        &self.coefs
    }

    /// Number of component functions.
    pub fn len(&self) -> usize {
        self.coefs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coefs.rows() == 0
    }

    pub fn component(&self, k: usize) -> Curve {
        Curve { basis: self.basis, coef: self.coefs.row(k).to_vec() }
    }

    /// `⟨Λ, Λᵀ⟩ = coefs · coefsᵀ`.
    pub fn gram(&self) -> Mat {
        self.coefs.matmul_t(&self.coefs)
    }

    /// `⟨self, otherᵀ⟩`, a `self.len() × other.len()` matrix.
    pub fn cross(&self, other: &VectorCurve) -> Result<Mat> {
        if self.basis != other.basis {
            return Err(Error::IncompatibleBasis);
        }
        Ok(self.coefs.matmul_t(&other.coefs))
    }

    /// The curve `selfᵀ · weights = Σ_k weights[k] · self_k`.
    pub fn combine(&self, weights: &[f64]) -> Curve {
        assert_eq!(weights.len(), self.len());
        let mut coef = vec![0.0; self.basis.dim()];
        for (k, w) in weights.iter().enumerate() {
            for (c, x) in coef.iter_mut().zip(self.coefs.row(k)) {
                *c += w * x;
            }
        }
        Curve { basis: self.basis, coef }
    }
}

fn check_grid(grid: &[f64], basis: &BasisSpec) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite() || !basis.contains(*x)) {
        return Err(invalid("grid points must lie inside the basis domain"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Least-squares projection of sampled values onto `basis`.
///
/// The QR factorization of the design matrix is computed once, so smoothing
/// many curves observed on the same grid costs one triangular solve each.
#[derive(Debug, Clone)]
pub struct Smoother {
    basis: BasisSpec,
    samples: usize,
    qr: Qr,
}

impl Smoother {
    pub fn new(grid: &[f64], basis: BasisSpec) -> Result<Self> {
        check_grid(grid, &basis)?;
        if grid.len() < basis.dim() {
            return Err(Error::UnderdeterminedFit { samples: grid.len(), dim: basis.dim() });
        }
        let qr = Qr::new(&basis.design_matrix(grid))?;
        Ok(Self { basis, samples: grid.len(), qr })
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn fit(&self, values: &[f64]) -> Result<Curve> {
        if values.len() != self.samples {
            return Err(invalid(format!(
                "expected {} values, got {}",
                self.samples,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values must be finite"));
        }
        Ok(Curve { basis: self.basis, coef: self.qr.solve_vec(values) })
    }
}

/// `argmin_c Σ_m (values_m − Σ_j c_j φ_j(grid_m))²`.
pub fn smooth_to_basis(grid: &[f64], values: &[f64], basis: BasisSpec) -> Result<Curve> {
    if grid.len() != values.len() {
        return Err(invalid("grid and values differ in length"));
    }
    Smoother::new(grid, basis)?.fit(values)
}

/// Fills missing samples by linear interpolation between the nearest
/// observed neighbours. Leading and trailing gaps take the nearest observed
/// value.
pub fn interpolate_gaps(grid: &[f64], values: &[Option<f64>]) -> Result<Vec<f64>> {
    if grid.len() != values.len() {
        return Err(invalid("grid and values differ in length"));
    }
    let observed: Vec<usize> = (0..values.len()).filter(|&m| values[m].is_some()).collect();
    if observed.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least two observed values, got {}",
            observed.len()
        )));
    }
    let first = observed[0];
    let last = observed[observed.len() - 1];
    let mut out = vec![0.0; values.len()];
    for m in 0..=first {
        out[m] = values[first].unwrap_or_default();
    }
    for m in last..values.len() {
        out[m] = values[last].unwrap_or_default();
    }
    for w in observed.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (ylo, yhi) = (values[lo].unwrap_or_default(), values[hi].unwrap_or_default());
        out[lo] = ylo;
        out[hi] = yhi;
        for m in (lo + 1)..hi {
            let frac = (grid[m] - grid[lo]) / (grid[hi] - grid[lo]);
            out[m] = ylo + frac * (yhi - ylo);
        }
    }
    Ok(out)
}
