//! Spectral (Wiener-Hopf) factorization with respect to a circle.
//!
//! For `Φ` in general position with no poles or zeros on the circle `Γ`,
//! order the indices so that poles and zeros inside `Γ` come first. `Φ` admits
//! `Φ = Φ₊·Φ₋`, with `Φ₊` and `Φ₊⁻¹` holomorphic outside `Γ` (`Φ₊(∞) = I`) and
//! `Φ₋`, `Φ₋⁻¹` holomorphic inside, exactly when the leading block `S^r₁₁` of
//! the right coupling matrix is invertible. The factors are
//!
//! ```text
//! Φ₊(z) = I − F_P,1 (zI − A_P,1)⁻¹ (S^r₁₁)⁻¹ G_N,1
//! Φ₋(z) = I + F_N,2 (S^l₂₂)⁻¹ (zI − A_P,2)⁻¹ G_P,2
//! ```
//!
//! Both are produced through the synthesis routines, so each factor is itself
//! a full [`RealizationBundle`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cauchy::{check_off, EVAL_EPS};
use crate::chain::{synthesize_hybrid_with, synthesize_with, SynthesisInput};
use crate::diagnostics::{scaled_residual, CheckReport};
use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix, Lu};
use crate::realization::{RealizationBundle, Tolerances};

/// Relative distance from the contour below which a point counts as on it.
pub const BOUNDARY_EPS: f64 = 1e-9;
/// Conditioning limit for the leading coupling block.
pub const COND_MAX: f64 = 1e8;
/// Report threshold for the product residual.
pub const PRODUCT_TOL: f64 = 1e-7;
/// Report threshold for agreement of the two `Φ₋` constructions.
pub const ALT_TOL: f64 = 1e-9;
/// Product residual above which the factorization is rejected.
pub const FAIL_TOL: f64 = 1e-6;
/// Number of verification samples (half on the contour).
pub const N_SAMPLES: usize = 40;
const SAMPLE_SEED: u64 = 0x5eed_f4c7;
const FAR: f64 = 1e8;

/// The circle `|z − center| = radius`; its interior is `G₊`, the exterior
/// together with `∞` is `G₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleContour {
    center: Complex,
    radius: f64,
}

impl CircleContour {
    pub fn new(center: Complex, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::Config(format!(
                "circle needs a finite center and positive radius, got {center}, {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self {
            center: Complex::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn inside(&self, z: Complex) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn point(&self, theta: f64) -> Complex {
        self.center + Complex::from_polar(self.radius, theta)
    }
}

/// Index split of poles and zeros into the inside (`+`) and outside (`−`)
/// groups, as indices into the original data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub poles_plus: Vec<usize>,
    pub poles_minus: Vec<usize>,
    pub zeros_plus: Vec<usize>,
    pub zeros_minus: Vec<usize>,
}

impl Partition {
    pub fn n_plus(&self) -> usize {
        self.poles_plus.len()
    }

    pub fn n_minus(&self) -> usize {
        self.poles_minus.len()
    }

    /// Pole order with the inside group first.
    pub fn pole_order(&self) -> Vec<usize> {
        self.poles_plus.iter().chain(&self.poles_minus).copied().collect()
    }

    /// Zero order with the inside group first.
    pub fn zero_order(&self) -> Vec<usize> {
        self.zeros_plus.iter().chain(&self.zeros_minus).copied().collect()
    }
}

fn split(points: &[Complex], c: &CircleContour, boundary_eps: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for (i, z) in points.iter().enumerate() {
        let distance = ((z - c.center).norm() - c.radius).abs();
        if distance < boundary_eps * c.radius {
            return Err(Error::OnContour { point: *z, distance });
        }
        if c.inside(*z) {
            plus.push(i);
        } else {
            minus.push(i);
        }
    }
    Ok((plus, minus))
}

/// Splits poles and zeros by the circle; the inside counts must agree.
pub fn partition(d: &crate::model::ZeroPoleData, c: &CircleContour, boundary_eps: f64) -> Result<Partition> {
    let (poles_plus, poles_minus) = split(d.poles(), c, boundary_eps)?;
    let (zeros_plus, zeros_minus) = split(d.zeros(), c, boundary_eps)?;
    if poles_plus.len() != zeros_plus.len() {
        return Err(Error::CardinalityMismatch {
            poles_inside: poles_plus.len(),
            zeros_inside: zeros_plus.len(),
        });
    }
    Ok(Partition {
        poles_plus,
        poles_minus,
        zeros_plus,
        zeros_minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    Exists,
    /// The conditioning measure lies in `[cond_max/10, cond_max]`, where
    /// floating point cannot settle invertibility.
    Boundary,
    NotExists,
}

/// Existence verdict with the quantities it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Existence {
    pub decision: Decision,
    /// `‖S^r‖_F·‖(S^r₁₁)⁻¹‖_F`, infinite when the block is singular.
    pub cond: f64,
    /// `1/‖(S^r₁₁)⁻¹‖_F`, a lower bound for the smallest singular value
    /// relative to `√n₊`; zero when the block is singular.
    pub sigma_proxy: f64,
    pub det: Complex,
}

/// The leading block `S^r₁₁` (inside zeros × inside poles).
pub fn leading_block(b: &RealizationBundle, p: &Partition) -> ComplexMatrix {
    b.sr().select(&p.zeros_plus, &p.poles_plus)
}

fn existence_of(b: &RealizationBundle, p: &Partition, cond_max: f64) -> Existence {
    if p.n_plus() == 0 {
        return Existence {
            decision: Decision::Exists,
            cond: 1.0,
            sigma_proxy: f64::INFINITY,
            det: Complex::new(1.0, 0.0),
        };
    }
    let s11 = leading_block(b, p);
    let scale = b.sr().frobenius_norm();
    match Lu::factor(&s11) {
        Ok(lu) => {
            let inv_norm = lu.inverse().frobenius_norm();
            let cond = scale * inv_norm;
            let decision = if cond.is_nan() || cond > cond_max {
                Decision::NotExists
            } else if cond >= cond_max / 10.0 {
                Decision::Boundary
            } else {
                Decision::Exists
            };
            Existence {
                decision,
                cond,
                sigma_proxy: 1.0 / inv_norm,
                det: lu.det(),
            }
        }
        Err(_) => Existence {
            decision: Decision::NotExists,
            cond: f64::INFINITY,
            sigma_proxy: 0.0,
            det: crate::linalg::det(&s11).unwrap_or(Complex::new(0.0, 0.0)),
        },
    }
}

/// Decides whether `Φ` factors with respect to `c`.
pub fn factorization_exists(b: &RealizationBundle, c: &CircleContour, cond_max: f64) -> Result<Existence> {
    let p = partition(b.data(), c, BOUNDARY_EPS)?;
    Ok(existence_of(b, &p, cond_max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOptions {
    pub boundary_eps: f64,
    pub cond_max: f64,
    pub fail_tol: f64,
    pub n_samples: usize,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            boundary_eps: BOUNDARY_EPS,
            cond_max: COND_MAX,
            fail_tol: FAIL_TOL,
            n_samples: N_SAMPLES,
        }
    }
}

/// `Φ₋` by the Schur-complement route:
/// `Φ₋(z) = I − F_P[−S₁₁⁻¹S₁₂; I](zI − A_P,2)⁻¹Δ⁻¹[−S₂₁S₁₁⁻¹, I]G_N`
/// with `S = S^r` and `Δ = S₂₂ − S₂₁S₁₁⁻¹S₁₂`.
#[derive(Debug, Clone)]
pub struct SchurMinus {
    left: ComplexMatrix,
    poles: Vec<Complex>,
    right: ComplexMatrix,
}

impl SchurMinus {
    fn new(b: &RealizationBundle, p: &Partition) -> Result<Self> {
        let d = b.data();
        let s11 = b.sr().select(&p.zeros_plus, &p.poles_plus);
        let s12 = b.sr().select(&p.zeros_plus, &p.poles_minus);
        let s21 = b.sr().select(&p.zeros_minus, &p.poles_plus);
        let s22 = b.sr().select(&p.zeros_minus, &p.poles_minus);
        let no_fact = |_| Error::NoFactorization { cond: f64::INFINITY };
        // X = S₁₁⁻¹S₁₂, Y = S₂₁S₁₁⁻¹
        let x = Lu::factor(&s11).map_err(no_fact)?.solve(&s12)?;
        let y = Lu::factor(&s11.transpose())
            .map_err(no_fact)?
            .solve(&s21.transpose())?
            .transpose();
        let delta = &s22 - &(&s21 * &x);
        let f1 = d.f_p().select_cols(&p.poles_plus);
        let f2 = d.f_p().select_cols(&p.poles_minus);
        let g1 = d.g_n().select_rows(&p.zeros_plus);
        let g2 = d.g_n().select_rows(&p.zeros_minus);
        let left = &f2 - &(&f1 * &x);
        let rt = &g2 - &(&y * &g1);
        let right = Lu::factor(&delta)
            .map_err(|_| Error::VerificationFailed {
                residual: f64::INFINITY,
                tol: 0.0,
            })?
            .solve(&rt)?;
        Ok(Self {
            left,
            poles: p.poles_minus.iter().map(|&i| d.poles()[i]).collect(),
            right,
        })
    }

    pub fn eval(&self, z: Complex) -> Result<ComplexMatrix> {
        check_off(z, &self.poles, EVAL_EPS)?;
        let w: Vec<Complex> = self.poles.iter().map(|p| (z - p).inv()).collect();
        let k = self.left.rows();
        Ok(&ComplexMatrix::identity(k) - &(&self.left.scale_cols(&w) * &self.right))
    }
}

#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub partition: Partition,
    pub existence: Existence,
    /// `Φ₊`, poles and zeros in the order `partition.poles_plus` / `zeros_plus`.
    pub plus: RealizationBundle,
    /// `Φ₋`, poles and zeros in the order `partition.poles_minus` / `zeros_minus`.
    pub minus: RealizationBundle,
    pub minus_alt: SchurMinus,
    pub report: CheckReport,
}

/// Deterministic verification points: half on the contour, half off it and
/// away from every pole and zero.
pub fn sample_points(b: &RealizationBundle, c: &CircleContour, n_samples: usize) -> Vec<Complex> {
    let on = n_samples / 2;
    let mut pts: Vec<Complex> = (0..on)
        .map(|j| c.point(std::f64::consts::TAU * (j as f64 + 0.25) / on as f64))
        .collect();
    let singular: Vec<Complex> = b.data().poles().iter().chain(b.data().zeros()).copied().collect();
    let keep_off = 0.05 * c.radius();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    while pts.len() < n_samples {
        let r = c.radius() * rng.random_range(0.1..3.0);
        let z = c.center() + Complex::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
        let on_contour = (r - c.radius()).abs() < keep_off;
        if !on_contour && singular.iter().all(|s| (s - z).norm() >= keep_off) {
            pts.push(z);
        }
    }
    pts
}

fn factor_err(e: Error, cond: f64, fail_tol: f64) -> Error {
    match e {
        Error::SingularCoupling { .. } => Error::NoFactorization { cond },
        Error::InconsistentData { residual, .. } => Error::VerificationFailed {
            residual,
            tol: fail_tol,
        },
        other => other,
    }
}

/// Computes `Φ = Φ₊·Φ₋` with respect to `c` and verifies it.
pub fn factorize(b: &RealizationBundle, c: &CircleContour, opts: FactorOptions) -> Result<FactorizationResult> {
    let d = b.data();
    let p = partition(d, c, opts.boundary_eps)?;
    let existence = existence_of(b, &p, opts.cond_max);
    if existence.decision == Decision::NotExists {
        return Err(Error::NoFactorization { cond: existence.cond });
    }
    let synth_cond = opts.cond_max.max(crate::chain::SYNTH_COND_MAX);
    let tol = Tolerances::default();

    let plus_input = SynthesisInput {
        f: d.f_p().select_cols(&p.poles_plus),
        g: d.g_n().select_rows(&p.zeros_plus),
        a: p.poles_plus.iter().map(|&i| d.poles()[i]).collect(),
        b: p.zeros_plus.iter().map(|&i| d.zeros()[i]).collect(),
    };
    let plus =
        synthesize_with(&plus_input, synth_cond, tol).map_err(|e| factor_err(e, existence.cond, opts.fail_tol))?;

    let minus_input = SynthesisInput {
        f: d.f_n().select_cols(&p.zeros_minus),
        g: d.g_p().select_rows(&p.poles_minus),
        a: p.poles_minus.iter().map(|&i| d.poles()[i]).collect(),
        b: p.zeros_minus.iter().map(|&i| d.zeros()[i]).collect(),
    };
    let minus = synthesize_hybrid_with(&minus_input, synth_cond, tol)
        .map_err(|e| factor_err(e, existence.cond, opts.fail_tol))?;
    let minus_alt = SchurMinus::new(b, &p)?;

    let mut report = CheckReport::new();
    let mut product = 0.0f64;
    let mut alt = 0.0f64;
    for z in sample_points(b, c, opts.n_samples) {
        let phi = b.eval_r(z)?;
        let fp = plus.eval_r(z)?;
        let fm = minus.eval_r(z)?;
        let prod = &fp * &fm;
        // Forward error of a product is bounded by ‖Φ₊‖·‖Φ₋‖, which is large
        // when the factors are large and Φ is not.
        let scale = (fp.frobenius_norm() * fm.frobenius_norm() + phi.frobenius_norm()).max(1.0);
        product = product.max(prod.distance(&phi) / scale);
        let fm_alt = minus_alt.eval(z)?;
        alt = alt.max(scaled_residual(&(&fm - &fm_alt), &[&fm, &fm_alt]));
    }
    report.push("product", product, PRODUCT_TOL);
    report.push("minus_formula_agreement", alt, ALT_TOL);

    let far = Complex::new(FAR, 0.0);
    let id = ComplexMatrix::identity(d.k());
    report.push("plus_at_infinity", plus.eval_r(far)?.distance(&id), 1e-6);
    report.push("minus_at_infinity", minus.eval_r(far)?.distance(&id), 1e-6);

    let misplaced = plus
        .data()
        .poles()
        .iter()
        .chain(plus.data().zeros())
        .filter(|z| !c.inside(**z))
        .count()
        + minus
            .data()
            .poles()
            .iter()
            .chain(minus.data().zeros())
            .filter(|z| c.inside(**z))
            .count();
    report.push("location_audit", misplaced as f64, 0.0);
    report.push("plus_bundle", plus.diagnostics().max_residual(), tol.report);
    report.push("minus_bundle", minus.diagnostics().max_residual(), tol.report);

    if product.is_nan() || product > opts.fail_tol {
        return Err(Error::VerificationFailed {
            residual: product,
            tol: opts.fail_tol,
        });
    }
    Ok(FactorizationResult {
        partition: p,
        existence,
        plus,
        minus,
        minus_alt,
        report,
    })
}
