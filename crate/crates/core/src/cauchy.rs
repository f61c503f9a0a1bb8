//! Scalar rational functions in general position and the Cauchy matrices
//! attached to them.
//!
//! A scalar function `r(z) = c·∏(z − μ_l)/∏(z − λ_j)` with simple, disjoint
//! poles `λ` and zeros `μ` is tied to the Cauchy matrix `s_{p,q} = 1/(μ_p − λ_q)`:
//! its inverse, its determinant and the system representations of `r` and
//! `r⁻¹` are all expressed through the derivatives of `r` at its zeros and of
//! `r⁻¹` at its poles. This is also the `k = 1` oracle for the matrix code.

use crate::error::{Error, Result};
use crate::linalg::{self, Complex, ComplexMatrix};

/// Minimum accepted separation between a zero and a pole.
pub const SEP_EPS: f64 = 1e-10;
/// Evaluation points closer than this to a pole are rejected.
pub const EVAL_EPS: f64 = 1e-12;
/// Derivative magnitudes below this are treated as zero.
pub const DERIV_EPS: f64 = 1e-200;

/// Poles, zeros and value at infinity of a scalar rational function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarZeroPole {
    poles: Vec<Complex>,
    zeros: Vec<Complex>,
    c: Complex,
}

impl ScalarZeroPole {
    pub fn new(poles: Vec<Complex>, zeros: Vec<Complex>, c: Complex) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::InvalidInput("at least one pole is required".into()));
        }
        if poles.len() != zeros.len() {
            return Err(Error::InvalidInput(format!(
                "{} poles but {} zeros",
                poles.len(),
                zeros.len()
            )));
        }
        if c.norm() == 0.0 || !c.is_finite() {
            return Err(Error::InvalidInput(
                "value at infinity must be finite and nonzero".into(),
            ));
        }
        let all: Vec<Complex> = poles.iter().chain(&zeros).copied().collect();
        check_separated(&all, SEP_EPS)?;
        Ok(Self { poles, zeros, c })
    }

    /// Normalized instance with `r(∞) = 1`.
    pub fn normalized(poles: Vec<Complex>, zeros: Vec<Complex>) -> Result<Self> {
        Self::new(poles, zeros, Complex::new(1.0, 0.0))
    }

    pub fn poles(&self) -> &[Complex] {
        &self.poles
    }

    pub fn zeros(&self) -> &[Complex] {
        &self.zeros
    }

    pub fn value_at_infinity(&self) -> Complex {
        self.c
    }

    pub fn n(&self) -> usize {
        self.poles.len()
    }
}

fn check_separated(points: &[Complex], eps: f64) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite point {a}")));
        }
        for b in &points[i + 1..] {
            let d = (a - b).norm();
            if d < eps {
                return Err(Error::Collision {
                    a: *a,
                    b: *b,
                    distance: d,
                });
            }
        }
    }
    Ok(())
}

fn check_disjoint(poles: &[Complex], zeros: &[Complex]) -> Result<()> {
    if poles.len() != zeros.len() {
        return Err(Error::InvalidInput(format!(
            "{} poles but {} zeros",
            poles.len(),
            zeros.len()
        )));
    }
    for z in zeros {
        for p in poles {
            let d = (z - p).norm();
            if d < SEP_EPS {
                return Err(Error::Collision {
                    a: *z,
                    b: *p,
                    distance: d,
                });
            }
        }
    }
    Ok(())
}

fn nearest(z: Complex, points: &[Complex]) -> Option<(Complex, f64)> {
    points
        .iter()
        .map(|p| (*p, (z - p).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

pub(crate) fn check_off(z: Complex, points: &[Complex], eps: f64) -> Result<()> {
    if let Some((p, d)) = nearest(z, points) {
        if d < eps {
            return Err(Error::PoleHit {
                point: z,
                singular: p,
                distance: d,
            });
        }
    }
    Ok(())
}

/// `r(z) = c·∏(z − μ_l)/∏(z − λ_j)`.
pub fn scalar_eval(d: &ScalarZeroPole, z: Complex) -> Result<Complex> {
    check_off(z, &d.poles, EVAL_EPS)?;
    // Pair numerator and denominator factors so large |z| stays well scaled.
    let ratio: Complex = d
        .zeros
        .iter()
        .zip(&d.poles)
        .map(|(mu, lambda)| (z - mu) / (z - lambda))
        .product();
    Ok(d.c * ratio)
}

/// Cauchy matrix `s_{p,q} = 1/(μ_p − λ_q)`.
pub fn cauchy_matrix(poles: &[Complex], zeros: &[Complex]) -> Result<ComplexMatrix> {
    check_disjoint(poles, zeros)?;
    let n = poles.len();
    Ok(ComplexMatrix::from_fn(n, n, |p, q| {
        Complex::new(1.0, 0.0) / (zeros[p] - poles[q])
    }))
}

/// `r′(μ_q)` for `r` with `r(∞) = c`.
///
/// At a simple zero the logarithmic derivative `r′/r` has residue one, so
/// `r′(μ_q) = lim r(z)/(z − μ_q) = c·∏_{l≠q}(μ_q − μ_l) / ∏_j(μ_q − λ_j)`.
fn derivative_at_zero(poles: &[Complex], zeros: &[Complex], q: usize, c: Complex) -> Complex {
    let mu = zeros[q];
    let mut v = c;
    for (l, (zl, pl)) in zeros.iter().zip(poles).enumerate() {
        if l != q {
            v *= mu - zl;
        }
        v /= mu - pl;
    }
    v
}

/// `(r⁻¹)′(λ_p) = c⁻¹·∏_{j≠p}(λ_p − λ_j) / ∏_l(λ_p − μ_l)`.
fn inverse_derivative_at_pole(poles: &[Complex], zeros: &[Complex], p: usize, c: Complex) -> Complex {
    derivative_at_zero(zeros, poles, p, Complex::new(1.0, 0.0) / c)
}

fn derivatives(poles: &[Complex], zeros: &[Complex], c: Complex) -> Result<(Vec<Complex>, Vec<Complex>)> {
    let n = poles.len();
    let at_poles: Vec<Complex> = (0..n).map(|p| inverse_derivative_at_pole(poles, zeros, p, c)).collect();
    let at_zeros: Vec<Complex> = (0..n).map(|q| derivative_at_zero(poles, zeros, q, c)).collect();
    for (point, v) in poles.iter().zip(&at_poles).chain(zeros.iter().zip(&at_zeros)) {
        if v.norm() < DERIV_EPS || !v.is_finite() {
            return Err(Error::DegenerateDerivative {
                point: *point,
                magnitude: v.norm(),
            });
        }
    }
    Ok((at_poles, at_zeros))
}

/// Closed-form inverse of the Cauchy matrix:
/// `h_{p,q} = 1 / [(r⁻¹)′(λ_p)·(λ_p − μ_q)·r′(μ_q)]`, i.e. `S⁻¹ = −D₁·Sᵀ·D₂`
/// with `D₁ = diag(1/(r⁻¹)′(λ))`, `D₂ = diag(1/r′(μ))`.
///
/// The constant `c` cancels; it is accepted so callers can confirm that.
pub fn cauchy_inverse_formula(poles: &[Complex], zeros: &[Complex], c: Complex) -> Result<ComplexMatrix> {
    check_disjoint(poles, zeros)?;
    if c.norm() == 0.0 {
        return Err(Error::InvalidInput("c must be nonzero".into()));
    }
    let (dp, dz) = derivatives(poles, zeros, c)?;
    let n = poles.len();
    Ok(ComplexMatrix::from_fn(n, n, |p, q| {
        Complex::new(1.0, 0.0) / (dp[p] * (poles[p] - zeros[q]) * dz[q])
    }))
}

/// `(det S)² = (−1)ⁿ·∏(r⁻¹)′(λ_p)·∏r′(μ_q)` with `c = 1`.
///
/// Follows from taking determinants in `S⁻¹ = −D₁·Sᵀ·D₂`.
pub fn cauchy_det_squared(poles: &[Complex], zeros: &[Complex]) -> Result<Complex> {
    check_disjoint(poles, zeros)?;
    let (dp, dz) = derivatives(poles, zeros, Complex::new(1.0, 0.0))?;
    let product: Complex = dp.iter().chain(&dz).product();
    Ok(if poles.len() % 2 == 1 { -product } else { product })
}

/// Coefficients of the additive forms `r(z) = 1 + Σ ξ_q/(z − λ_q)` and
/// `r⁻¹(z) = 1 + Σ η_p/(z − μ_p)`, obtained from `S·ξ = −e*` and `η·S = e`.
pub fn scalar_system_representation(d: &ScalarZeroPole) -> Result<(Vec<Complex>, Vec<Complex>)> {
    require_normalized(d)?;
    let s = cauchy_matrix(&d.poles, &d.zeros)?;
    let n = d.n();
    let ones = ComplexMatrix::column_vector(&vec![Complex::new(1.0, 0.0); n]);
    let xi = linalg::solve(&s, &(-&ones))?;
    let eta = linalg::solve(&s.transpose(), &ones)?;
    Ok((xi.column(0), eta.column(0)))
}

fn require_normalized(d: &ScalarZeroPole) -> Result<()> {
    if d.c != Complex::new(1.0, 0.0) {
        return Err(Error::InvalidInput("system representations require r(∞) = 1".into()));
    }
    Ok(())
}

/// Evaluates `1 + Σ coeff_q/(z − point_q)`.
pub fn eval_additive(points: &[Complex], coeffs: &[Complex], z: Complex) -> Result<Complex> {
    check_off(z, points, EVAL_EPS)?;
    Ok(Complex::new(1.0, 0.0) + points.iter().zip(coeffs).map(|(p, a)| a / (z - p)).sum::<Complex>())
}

/// `r(x)·r⁻¹(y) = 1 + (x − y)·e(xI − A_P)⁻¹S⁻¹(yI − A_N)⁻¹e*`.
pub fn scalar_joint_eval(d: &ScalarZeroPole, x: Complex, y: Complex) -> Result<Complex> {
    require_normalized(d)?;
    check_off(x, &d.poles, EVAL_EPS)?;
    check_off(y, &d.zeros, EVAL_EPS)?;
    let s = cauchy_matrix(&d.poles, &d.zeros)?;
    let u = ComplexMatrix::column_vector(
        &d.zeros
            .iter()
            .map(|mu| Complex::new(1.0, 0.0) / (y - mu))
            .collect::<Vec<_>>(),
    );
    let w = linalg::solve(&s, &u)?;
    let k: Complex = d
        .poles
        .iter()
        .enumerate()
        .map(|(p, lambda)| w[(p, 0)] / (x - lambda))
        .sum();
    Ok(Complex::new(1.0, 0.0) + (x - y) * k)
}
