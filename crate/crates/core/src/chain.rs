//! Synthesis of general-position functions from Sylvester data, chain
//! functions, and the seeded instance generator used throughout the tests.
//!
//! Given diagonal `A`, `B` with simple disjoint spectra, `F` without zero
//! columns and `G` without zero rows, the solution `S` of `B·X − X·A = G·F`
//! defines
//!
//! ```text
//! T(x, y) = I + (x − y)·F(xI − A)⁻¹S⁻¹(yI − B)⁻¹G,
//! ```
//!
//! which satisfies the chain identity `T(x, y)·T(y, z) = T(x, z)` and
//! factors as `R(x)·R⁻¹(y)` for a function `R` in general position.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cauchy::{check_off, EVAL_EPS};
use crate::diagnostics::{scaled_residual, CheckReport};
use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix, Lu, RANK_EPS};
use crate::model::{ZeroPoleData, SEP_MIN};
use crate::realization::{build_bundle, sylvester_diag_solve, RealizationBundle, Tolerances};

/// Default conditioning limit for [`synthesize`]. Factors produced by the
/// Wiener-Hopf step may legitimately approach the factorization limit, so
/// this is looser than the generator gate.
pub const SYNTH_COND_MAX: f64 = 1e12;
/// Conditioning gate applied by [`random_instance`].
pub const GEN_COND_MAX: f64 = 1e6;
pub const MAX_RETRIES: usize = 50;
const MAX_POINT_DRAWS: usize = 10_000;

/// Raw synthesis data `(F, G, A, B)` with diagonal `A` and `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisInput {
    pub f: ComplexMatrix,
    pub g: ComplexMatrix,
    pub a: Vec<Complex>,
    pub b: Vec<Complex>,
}

impl SynthesisInput {
    pub fn new(f: ComplexMatrix, g: ComplexMatrix, a: Vec<Complex>, b: Vec<Complex>) -> Result<Self> {
        let input = Self { f, g, a, b };
        input.validate()?;
        Ok(input)
    }

    /// The right-type data `(F_P, G_N, λ, μ)` of an existing bundle.
    pub fn from_bundle(b: &RealizationBundle) -> Self {
        let d = b.data();
        Self {
            f: d.f_p().clone(),
            g: d.g_n().clone(),
            a: d.poles().to_vec(),
            b: d.zeros().to_vec(),
        }
    }

    pub fn k(&self) -> usize {
        self.f.rows()
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    fn validate(&self) -> Result<()> {
        let (k, n) = (self.f.rows(), self.a.len());
        if k == 0 {
            return Err(Error::InvalidInput("matrix dimension k must be at least 1".into()));
        }
        if self.b.len() != n || self.f.cols() != n || self.g.shape() != (n, k) {
            return Err(Error::InvalidInput(format!(
                "inconsistent shapes: F {}x{}, G {}x{}, |A| = {}, |B| = {}",
                self.f.rows(),
                self.f.cols(),
                self.g.rows(),
                self.g.cols(),
                n,
                self.b.len()
            )));
        }
        for j in 0..n {
            if self.f.column(j).iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidInput(format!("column {j} of F is zero")));
            }
            if self.g.row(j).iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidInput(format!("row {j} of G is zero")));
            }
        }
        let all: Vec<Complex> = self.a.iter().chain(&self.b).copied().collect();
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                let d = (p - q).norm();
                if d < SEP_MIN {
                    return Err(Error::Collision {
                        a: *p,
                        b: *q,
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }
}

fn invert_gated(s: &ComplexMatrix, cond_max: f64) -> Result<ComplexMatrix> {
    let inv = Lu::factor(s)
        .map_err(|_| Error::SingularCoupling { cond: f64::INFINITY })?
        .inverse();
    let cond = if s.rows() == 0 {
        1.0
    } else {
        s.frobenius_norm() * inv.frobenius_norm()
    };
    if cond.is_nan() || cond > cond_max {
        return Err(Error::SingularCoupling { cond });
    }
    Ok(inv)
}

/// Builds the function with `S^r = S`, `B·S − S·A = G·F`:
/// `F_P = F`, `G_N = G`, `F_N = F·S⁻¹`, `G_P = −S⁻¹·G`, poles `A`, zeros `B`.
pub fn synthesize(input: &SynthesisInput) -> Result<RealizationBundle> {
    synthesize_with(input, SYNTH_COND_MAX, Tolerances::default())
}

pub fn synthesize_with(input: &SynthesisInput, cond_max: f64, tol: Tolerances) -> Result<RealizationBundle> {
    input.validate()?;
    let s = sylvester_diag_solve(&input.b, &input.a, &(&input.g * &input.f))?;
    let s_inv = invert_gated(&s, cond_max)?;
    let d = ZeroPoleData::new(
        input.a.clone(),
        input.b.clone(),
        input.f.clone(),
        -&(&s_inv * &input.g),
        &input.f * &s_inv,
        input.g.clone(),
    )?;
    build_bundle(&d, tol)
}

/// Mirror of [`synthesize`] with `S^l = S`, `A·S − S·B = G·F`:
/// `F_N = F`, `G_P = G`, `F_P = F·S⁻¹`, `G_N = −S⁻¹·G`, poles `A`, zeros `B`.
pub fn synthesize_hybrid(input: &SynthesisInput) -> Result<RealizationBundle> {
    synthesize_hybrid_with(input, SYNTH_COND_MAX, Tolerances::default())
}

pub fn synthesize_hybrid_with(input: &SynthesisInput, cond_max: f64, tol: Tolerances) -> Result<RealizationBundle> {
    input.validate()?;
    let s = sylvester_diag_solve(&input.a, &input.b, &(&input.g * &input.f))?;
    let s_inv = invert_gated(&s, cond_max)?;
    let d = ZeroPoleData::new(
        input.a.clone(),
        input.b.clone(),
        &input.f * &s_inv,
        input.g.clone(),
        input.f.clone(),
        -&(&s_inv * &input.g),
    )?;
    build_bundle(&d, tol)
}

/// A point of the extended plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint {
    Finite(Complex),
    Infinity,
}

impl From<Complex> for ExtPoint {
    fn from(z: Complex) -> Self {
        ExtPoint::Finite(z)
    }
}

impl std::fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtPoint::Finite(z) => write!(f, "{z}"),
            ExtPoint::Infinity => write!(f, "∞"),
        }
    }
}

/// A function `T(x, y)` on `𝒟₁ × 𝒟₂`.
pub trait ChainFunction {
    fn k(&self) -> usize;

    /// Whether `x` is in the first domain `𝒟₁`.
    fn in_first(&self, x: ExtPoint) -> bool;

    /// Whether `y` is in the second domain `𝒟₂`.
    fn in_second(&self, y: ExtPoint) -> bool;

    /// Evaluates `T(x, y)`; callers have checked the domains.
    fn eval_unchecked(&self, x: ExtPoint, y: ExtPoint) -> Result<ComplexMatrix>;

    fn eval(&self, x: ExtPoint, y: ExtPoint) -> Result<ComplexMatrix> {
        if !self.in_first(x) {
            return Err(Error::DomainViolation(format!("{x} is outside the first domain")));
        }
        if !self.in_second(y) {
            return Err(Error::DomainViolation(format!("{y} is outside the second domain")));
        }
        self.eval_unchecked(x, y)
    }
}

/// The constant chain function `T ≡ I`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityChain(pub usize);

impl ChainFunction for IdentityChain {
    fn k(&self) -> usize {
        self.0
    }

    fn in_first(&self, _: ExtPoint) -> bool {
        true
    }

    fn in_second(&self, _: ExtPoint) -> bool {
        true
    }

    fn eval_unchecked(&self, _: ExtPoint, _: ExtPoint) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::identity(self.0))
    }
}

fn off(p: ExtPoint, points: &[Complex]) -> bool {
    match p {
        ExtPoint::Infinity => true,
        ExtPoint::Finite(z) => z.is_finite() && check_off(z, points, EVAL_EPS).is_ok(),
    }
}

/// `T(x, y) = R(x)·R⁻¹(y)` from the right joint representation, with
/// `T(x, ∞) = R(x)`, `T(∞, y) = R⁻¹(y)` and `T(∞, ∞) = I` taken from the
/// explicit limit formulas.
#[derive(Debug, Clone, Copy)]
pub struct JointRight<'a>(pub &'a RealizationBundle);

impl ChainFunction for JointRight<'_> {
    fn k(&self) -> usize {
        self.0.k()
    }

    fn in_first(&self, x: ExtPoint) -> bool {
        off(x, self.0.data().poles())
    }

    fn in_second(&self, y: ExtPoint) -> bool {
        off(y, self.0.data().zeros())
    }

    fn eval_unchecked(&self, x: ExtPoint, y: ExtPoint) -> Result<ComplexMatrix> {
        use ExtPoint::*;
        match (x, y) {
            (Finite(x), Finite(y)) => self.0.eval_joint_right(x, y),
            (Finite(x), Infinity) => self.0.eval_r(x),
            (Infinity, Finite(y)) => self.0.eval_rinv(y),
            (Infinity, Infinity) => Ok(ComplexMatrix::identity(self.k())),
        }
    }
}

/// `T(x, y) = R⁻¹(x)·R(y)` from the left joint representation.
#[derive(Debug, Clone, Copy)]
pub struct JointLeft<'a>(pub &'a RealizationBundle);

impl ChainFunction for JointLeft<'_> {
    fn k(&self) -> usize {
        self.0.k()
    }

    fn in_first(&self, x: ExtPoint) -> bool {
        off(x, self.0.data().zeros())
    }

    fn in_second(&self, y: ExtPoint) -> bool {
        off(y, self.0.data().poles())
    }

    fn eval_unchecked(&self, x: ExtPoint, y: ExtPoint) -> Result<ComplexMatrix> {
        use ExtPoint::*;
        match (x, y) {
            (Finite(x), Finite(y)) => self.0.eval_joint_left(x, y),
            (Finite(x), Infinity) => self.0.eval_rinv_left(x),
            (Infinity, Finite(y)) => self.0.eval_r_left(y),
            (Infinity, Infinity) => Ok(ComplexMatrix::identity(self.k())),
        }
    }
}

/// Checks `T(x, y)·T(y, z) = T(x, z)` on the triples and `T(w, w) = I` on every
/// triple point lying in both domains.
///
/// Residuals are scaled by the magnitude of the terms involved.
pub fn chain_identity_check(
    t: &dyn ChainFunction,
    triples: &[(ExtPoint, ExtPoint, ExtPoint)],
    tol: f64,
) -> Result<CheckReport> {
    let mut chain = 0.0f64;
    let mut unity = 0.0f64;
    let id = ComplexMatrix::identity(t.k());
    for &(x, y, z) in triples {
        if !(t.in_first(y) && t.in_second(y)) {
            return Err(Error::DomainViolation(format!(
                "middle point {y} must lie in both domains"
            )));
        }
        let txy = t.eval(x, y)?;
        let tyz = t.eval(y, z)?;
        let txz = t.eval(x, z)?;
        let prod = &txy * &tyz;
        chain = chain.max(scaled_residual(&(&prod - &txz), &[&prod, &txz]));
        for w in [x, y, z] {
            if t.in_first(w) && t.in_second(w) {
                unity = unity.max(t.eval_unchecked(w, w)?.distance(&id));
            }
        }
    }
    let mut r = CheckReport::new();
    r.push("chain_identity", chain, tol);
    r.push("diagonal_unity", unity, tol);
    Ok(r)
}

/// `Φ(x) = T(x, a)` and `Φ⁻¹(y) = T(a, y)` for a distinguished point `a`.
pub struct Generator<'a> {
    t: &'a dyn ChainFunction,
    a: ExtPoint,
}

/// Splits `T` as `Φ(x)·Φ⁻¹(y)` around `a ∈ 𝒟₁ ∩ 𝒟₂`.
pub fn extract_generator(t: &dyn ChainFunction, a: ExtPoint) -> Result<Generator<'_>> {
    if !(t.in_first(a) && t.in_second(a)) {
        return Err(Error::DomainViolation(format!(
            "distinguished point {a} must lie in both domains"
        )));
    }
    Ok(Generator { t, a })
}

impl Generator<'_> {
    pub fn point(&self) -> ExtPoint {
        self.a
    }

    pub fn phi(&self, x: ExtPoint) -> Result<ComplexMatrix> {
        self.t.eval(x, self.a)
    }

    pub fn phi_inv(&self, y: ExtPoint) -> Result<ComplexMatrix> {
        self.t.eval(self.a, y)
    }
}

/// Rank of the row Krylov space `span{v·A^m}` generated by the rows of `f`,
/// built by repeated multiplication with reorthogonalization.
fn krylov_rank(rows: Vec<Vec<Complex>>, a: &[Complex], rank_eps: f64) -> usize {
    let n = a.len();
    let mut basis: Vec<Vec<Complex>> = Vec::new();
    let mut frontier: Vec<Vec<Complex>> = Vec::new();
    let dot = |u: &[Complex], v: &[Complex]| -> Complex { u.iter().zip(v).map(|(x, y)| x * y.conj()).sum() };
    let norm = |u: &[Complex]| u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let admit = |v: Vec<Complex>, basis: &mut Vec<Vec<Complex>>| -> Option<Vec<Complex>> {
        let scale = norm(&v);
        if scale == 0.0 {
            return None;
        }
        let mut w = v;
        for _ in 0..2 {
            for q in basis.iter() {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let r = norm(&w);
        if r <= rank_eps * scale {
            return None;
        }
        let q: Vec<Complex> = w.iter().map(|z| z / r).collect();
        basis.push(q.clone());
        Some(q)
    };

    for v in rows {
        if let Some(q) = admit(v, &mut basis) {
            frontier.push(q);
        }
    }
    while !frontier.is_empty() && basis.len() < n {
        let mut next = Vec::new();
        for q in frontier {
            let v: Vec<Complex> = q.iter().zip(a).map(|(x, s)| x * s).collect();
            if let Some(q) = admit(v, &mut basis) {
                next.push(q);
            }
        }
        frontier = next;
    }
    basis.len()
}

/// Whether the pair `(F, A)` is obstrollable: the stacked matrix
/// `[F; F·A; …; F·A^{n−1}]` has rank `n`.
pub fn obstrollable(f: &ComplexMatrix, a: &[Complex], rank_eps: f64) -> bool {
    if f.cols() != a.len() {
        return false;
    }
    let rows = (0..f.rows()).map(|i| f.row(i).to_vec()).collect();
    krylov_rank(rows, a, rank_eps) == a.len()
}

/// Column version: `[G, B·G, …, B^{n−1}·G]` has rank `n`.
pub fn obstrollable_cols(b: &[Complex], g: &ComplexMatrix, rank_eps: f64) -> bool {
    if g.rows() != b.len() {
        return false;
    }
    let cols = (0..g.cols()).map(|j| g.column(j)).collect();
    krylov_rank(cols, b, rank_eps) == b.len()
}

/// Placement of random poles and zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Uniform in `|z| ≤ radius`.
    Disk { radius: f64, min_sep: f64 },
    /// `inside` poles and `inside` zeros uniform in `|z − center| ≤ radius·(1 − margin)`,
    /// the rest uniform in the annulus `radius·(1 + margin) ≤ |z − center| ≤ radius·outer`.
    Split {
        center: Complex,
        radius: f64,
        inside: usize,
        margin: f64,
        outer: f64,
        min_sep: f64,
    },
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry::Disk {
            radius: 2.0,
            min_sep: 0.05,
        }
    }
}

impl Geometry {
    fn validate(&self, n: usize) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            Geometry::Disk { radius, min_sep } => {
                positive("radius", radius)?;
                positive("min_sep", min_sep)
            }
            Geometry::Split {
                center,
                radius,
                inside,
                margin,
                outer,
                min_sep,
            } => {
                positive("radius", radius)?;
                positive("min_sep", min_sep)?;
                if !center.is_finite() {
                    return Err(Error::Config("center must be finite".into()));
                }
                if !(margin > 0.0 && margin < 1.0) {
                    return Err(Error::Config(format!("margin must lie in (0, 1), got {margin}")));
                }
                if outer.is_nan() || outer <= 1.0 + margin {
                    return Err(Error::Config(format!(
                        "outer radius factor {outer} must exceed 1 + margin"
                    )));
                }
                if inside > n {
                    return Err(Error::Config(format!("inside count {inside} exceeds n = {n}")));
                }
                Ok(())
            }
        }
    }

    fn min_sep(&self) -> f64 {
        match *self {
            Geometry::Disk { min_sep, .. } | Geometry::Split { min_sep, .. } => min_sep,
        }
    }
}

fn unit_disk_point(rng: &mut ChaCha8Rng) -> Complex {
    loop {
        let z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

fn annulus_point(rng: &mut ChaCha8Rng, r0: f64, r1: f64) -> Complex {
    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    // Uniform in area.
    let r = (r0 * r0 + rng.random::<f64>() * (r1 * r1 - r0 * r0)).sqrt();
    Complex::from_polar(r, t)
}

fn place(
    rng: &mut ChaCha8Rng,
    taken: &mut Vec<Complex>,
    min_sep: f64,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Complex,
) -> Option<Complex> {
    for _ in 0..MAX_POINT_DRAWS {
        let z = draw(rng);
        if taken.iter().all(|p| (p - z).norm() >= min_sep) {
            taken.push(z);
            return Some(z);
        }
    }
    None
}

fn draw_points(rng: &mut ChaCha8Rng, n: usize, geometry: &Geometry) -> Option<(Vec<Complex>, Vec<Complex>)> {
    let sep = geometry.min_sep();
    let mut taken = Vec::with_capacity(2 * n);
    let mut poles = Vec::with_capacity(n);
    let mut zeros = Vec::with_capacity(n);
    match *geometry {
        Geometry::Disk { radius, .. } => {
            for _ in 0..n {
                poles.push(place(rng, &mut taken, sep, |r| unit_disk_point(r) * radius)?);
                zeros.push(place(rng, &mut taken, sep, |r| unit_disk_point(r) * radius)?);
            }
        }
        Geometry::Split {
            center,
            radius,
            inside,
            margin,
            outer,
            ..
        } => {
            let inner = |r: &mut ChaCha8Rng| center + unit_disk_point(r) * (radius * (1.0 - margin));
            let outer_pt = |r: &mut ChaCha8Rng| center + annulus_point(r, radius * (1.0 + margin), radius * outer);
            for j in 0..n {
                if j < inside {
                    poles.push(place(rng, &mut taken, sep, inner)?);
                    zeros.push(place(rng, &mut taken, sep, inner)?);
                } else {
                    poles.push(place(rng, &mut taken, sep, outer_pt)?);
                    zeros.push(place(rng, &mut taken, sep, outer_pt)?);
                }
            }
        }
    }
    Some((poles, zeros))
}

fn unit_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex> {
    loop {
        let v: Vec<Complex> = (0..len).map(|_| unit_disk_point(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Draws synthesis data from a seeded stream; the attempt index is part of the
/// stream, so a fixed seed always yields the same instance.
pub fn random_input(k: usize, n: usize, rng: &mut ChaCha8Rng, geometry: &Geometry) -> Option<SynthesisInput> {
    let (a, b) = draw_points(rng, n, geometry)?;
    let mut f = ComplexMatrix::zeros(k, n);
    for j in 0..n {
        for (i, v) in unit_vector(rng, k).into_iter().enumerate() {
            f[(i, j)] = v;
        }
    }
    let mut g = ComplexMatrix::zeros(n, k);
    for i in 0..n {
        for (j, v) in unit_vector(rng, k).into_iter().enumerate() {
            g[(i, j)] = v;
        }
    }
    Some(SynthesisInput { f, g, a, b })
}

/// A seeded random general-position instance with `cond(S^r) ≤ 10⁶`.
pub fn random_instance(k: usize, n: usize, seed: u64, geometry: &Geometry) -> Result<RealizationBundle> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput(format!(
            "random instances need k, n >= 1 (got k = {k}, n = {n})"
        )));
    }
    geometry.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let Some(input) = random_input(k, n, &mut rng, geometry) else {
            continue;
        };
        if let Ok(b) = synthesize_with(&input, GEN_COND_MAX, Tolerances::default()) {
            if b.diagnostics().passed() && obstrollable(b.data().f_p(), b.data().poles(), RANK_EPS) {
                return Ok(b);
            }
        }
    }
    Err(Error::GenerationFailed { retries: MAX_RETRIES })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_consistency;
    use crate::testutil::c;

    fn m(v: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[v]])
    }

    fn fin(re: f64, im: f64) -> ExtPoint {
        ExtPoint::Finite(c(re, im))
    }

    #[test]
    fn synthesize_d1() {
        let input = SynthesisInput::new(m(1.0), m(1.0), vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let b = synthesize(&input).unwrap();
        let d = b.data();
        assert_eq!(*b.sr(), m(1.0));
        assert_eq!(
            (d.f_p(), d.g_p(), d.f_n(), d.g_n()),
            (&m(1.0), &m(-1.0), &m(1.0), &m(1.0))
        );
    }

    #[test]
    fn synthesize_hybrid_d1() {
        let input = SynthesisInput::new(m(1.0), m(-1.0), vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let b = synthesize_hybrid(&input).unwrap();
        let d = b.data();
        assert_eq!(*b.sl(), m(1.0));
        assert_eq!(
            (d.f_p(), d.g_p(), d.f_n(), d.g_n()),
            (&m(1.0), &m(-1.0), &m(1.0), &m(1.0))
        );
    }

    #[test]
    fn zero_column_or_row_rejected() {
        let f = ComplexMatrix::from_real_rows(&[&[1.0, 0.0]]);
        let g = ComplexMatrix::from_real_rows(&[&[1.0], &[1.0]]);
        let a = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let b = vec![c(2.0, 0.0), c(3.0, 0.0)];
        assert!(matches!(
            SynthesisInput::new(f, g.clone(), a.clone(), b.clone()),
            Err(Error::InvalidInput(_))
        ));
        let f = ComplexMatrix::from_real_rows(&[&[1.0, 1.0]]);
        let g = ComplexMatrix::from_real_rows(&[&[1.0], &[0.0]]);
        assert!(matches!(SynthesisInput::new(f, g, a, b), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn hybrid_round_trip() {
        let b = random_instance(2, 5, 11, &Geometry::default()).unwrap();
        let input = SynthesisInput::from_bundle(&b);
        let s_inv = b.sr_inv();
        let tilde =
            SynthesisInput::new(&input.f * s_inv, -&(s_inv * &input.g), input.a.clone(), input.b.clone()).unwrap();
        let h = synthesize_hybrid(&tilde).unwrap();
        for (x, y) in [(c(0.1, 3.0), c(-2.5, 0.2)), (c(4.0, -1.0), c(0.0, -3.0))] {
            let d = h
                .eval_joint_right(x, y)
                .unwrap()
                .distance(&b.eval_joint_right(x, y).unwrap());
            assert!(d < 1e-8, "{d}");
        }
        assert!(h.sl().distance(s_inv) < 1e-8 * s_inv.frobenius_norm().max(1.0));
    }

    #[test]
    fn resynthesis_reproduces_coupling() {
        let b = random_instance(3, 6, 5, &Geometry::default()).unwrap();
        let again = synthesize(&SynthesisInput::from_bundle(&b)).unwrap();
        assert!(again.sr().distance(b.sr()) <= 1e-10 * b.sr().frobenius_norm().max(1.0));
    }

    #[test]
    fn generator_is_deterministic() {
        let a = random_instance(1, 1, 42, &Geometry::default()).unwrap();
        let b = random_instance(1, 1, 42, &Geometry::default()).unwrap();
        assert_eq!(a.data(), b.data());
        let c = random_instance(3, 8, 42, &Geometry::default()).unwrap();
        assert!(c.diagnostics().passed(), "{}", c.diagnostics());
        assert!(check_consistency(c.data(), 1e-8).passed());
    }

    #[test]
    fn generator_config_errors() {
        let bad = Geometry::Disk {
            radius: 2.0,
            min_sep: 0.0,
        };
        assert!(matches!(random_instance(1, 2, 0, &bad), Err(Error::Config(_))));
        assert!(matches!(
            random_instance(1, 0, 0, &Geometry::default()),
            Err(Error::InvalidInput(_))
        ));
        let crowded = Geometry::Disk {
            radius: 0.01,
            min_sep: 1.0,
        };
        assert!(matches!(
            random_instance(1, 2, 0, &crowded),
            Err(Error::GenerationFailed { .. })
        ));
    }

    #[test]
    fn split_geometry_places_points() {
        let g = Geometry::Split {
            center: c(0.5, -0.5),
            radius: 1.5,
            inside: 2,
            margin: 0.1,
            outer: 3.0,
            min_sep: 0.05,
        };
        let b = random_instance(2, 5, 3, &g).unwrap();
        let d = b.data();
        let inside = |z: &Complex| (z - c(0.5, -0.5)).norm() < 1.5;
        assert_eq!(d.poles().iter().filter(|z| inside(z)).count(), 2);
        assert_eq!(d.zeros().iter().filter(|z| inside(z)).count(), 2);
    }

    #[test]
    fn chain_identity_holds_for_synthesized() {
        let b = random_instance(2, 6, 9, &Geometry::default()).unwrap();
        let triples = [
            (fin(3.0, 0.5), fin(-2.5, 1.0), fin(0.2, 3.5)),
            (ExtPoint::Infinity, fin(2.7, -2.2), fin(-3.1, -0.4)),
            (fin(1.0, 2.9), ExtPoint::Infinity, ExtPoint::Infinity),
        ];
        let r = chain_identity_check(&JointRight(&b), &triples, 1e-8).unwrap();
        assert!(r.passed(), "{r}");
        let r = chain_identity_check(&JointLeft(&b), &triples, 1e-8).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn identity_chain_has_zero_residual() {
        let r = chain_identity_check(&IdentityChain(3), &[(fin(1.0, 0.0), fin(2.0, 0.0), fin(3.0, 0.0))], 0.0).unwrap();
        assert_eq!(r.max_residual(), 0.0);
    }

    struct PerturbedJoint {
        f: ComplexMatrix,
        g: ComplexMatrix,
        a: Vec<Complex>,
        b: Vec<Complex>,
        s_inv: ComplexMatrix,
    }

    impl ChainFunction for PerturbedJoint {
        fn k(&self) -> usize {
            self.f.rows()
        }
        fn in_first(&self, x: ExtPoint) -> bool {
            off(x, &self.a) && x != ExtPoint::Infinity
        }
        fn in_second(&self, y: ExtPoint) -> bool {
            off(y, &self.b) && y != ExtPoint::Infinity
        }
        fn eval_unchecked(&self, x: ExtPoint, y: ExtPoint) -> Result<ComplexMatrix> {
            let (ExtPoint::Finite(x), ExtPoint::Finite(y)) = (x, y) else {
                unreachable!()
            };
            let wx: Vec<Complex> = self.a.iter().map(|p| (x - p).inv()).collect();
            let wy: Vec<Complex> = self.b.iter().map(|p| (x - y) / (y - p)).collect();
            let core = &(&self.f.scale_cols(&wx) * &self.s_inv) * &self.g.scale_rows(&wy);
            Ok(&ComplexMatrix::identity(self.k()) + &core)
        }
    }

    #[test]
    fn perturbed_coupling_breaks_chain_identity() {
        let b = random_instance(2, 4, 21, &Geometry::default()).unwrap();
        let d = b.data();
        let sr = b.sr() + &ComplexMatrix::from_fn(4, 4, |_, _| c(1e-2, 0.0));
        let t = PerturbedJoint {
            f: d.f_p().clone(),
            g: d.g_n().clone(),
            a: d.poles().to_vec(),
            b: d.zeros().to_vec(),
            s_inv: crate::linalg::inverse(&sr).unwrap(),
        };
        let r = chain_identity_check(&t, &[(fin(3.0, 0.5), fin(-2.5, 1.0), fin(0.2, 3.5))], 1e-8).unwrap();
        assert!(r.residual("chain_identity").unwrap() > 1e-6);
    }

    #[test]
    fn domain_violations() {
        let b = random_instance(1, 2, 1, &Geometry::default()).unwrap();
        let pole = ExtPoint::Finite(b.data().poles()[0]);
        let t = JointRight(&b);
        assert!(matches!(t.eval(pole, fin(9.0, 0.0)), Err(Error::DomainViolation(_))));
        assert!(matches!(extract_generator(&t, pole), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn generator_at_infinity_recovers_r() {
        let b = random_instance(2, 3, 8, &Geometry::default()).unwrap();
        let t = JointRight(&b);
        let g = extract_generator(&t, ExtPoint::Infinity).unwrap();
        let x = c(2.5, 2.5);
        assert_eq!(g.phi(x.into()).unwrap(), b.eval_r(x).unwrap());
        assert_eq!(g.phi_inv(x.into()).unwrap(), b.eval_rinv(x).unwrap());
    }

    #[test]
    fn generator_at_finite_point_on_d1() {
        let input = SynthesisInput::new(m(1.0), m(1.0), vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let b = synthesize(&input).unwrap();
        let t = JointRight(&b);
        let a = c(-1.5, 0.5);
        let g = extract_generator(&t, a.into()).unwrap();
        assert_eq!(g.phi(a.into()).unwrap(), ComplexMatrix::identity(1));
        let r = |z: Complex| (z - 1.0) / z;
        for x in [c(2.0, 0.0), c(0.3, -0.7), c(-4.0, 1.0)] {
            let want = r(x) / r(a);
            assert!((g.phi(x.into()).unwrap()[(0, 0)] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn obstrollability() {
        let a = vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)];
        let f = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, -1.0]]);
        assert!(obstrollable(&f, &a, RANK_EPS));
        let f0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, -1.0]]);
        assert!(!obstrollable(&f0, &a, RANK_EPS));
        assert!(!obstrollable(&m(0.0), &[c(0.5, 0.0)], RANK_EPS));
        assert!(obstrollable_cols(&a, &f.transpose(), RANK_EPS));
        assert!(!obstrollable_cols(&a, &f0.transpose(), RANK_EPS));
    }

    #[test]
    fn random_instances_are_obstrollable() {
        for seed in 0..20 {
            let b = random_instance(1 + (seed as usize % 3), 12, seed, &Geometry::default()).unwrap();
            let d = b.data();
            assert!(obstrollable(d.f_p(), d.poles(), RANK_EPS));
            assert!(obstrollable_cols(d.zeros(), d.g_n(), RANK_EPS));
        }
    }
}
