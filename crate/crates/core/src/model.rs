//! Zero-pole data of a rational matrix function in general position.
//!
//! A `k×k` function `R` with `R(∞) = I`, simple poles `λ_j` and simple zeros
//! `μ_j` (poles of `R⁻¹`) is stored through its pole and zero locations and the
//! rank-one factors of its residues:
//!
//! ```text
//! R(z)  = I + F_P (zI − A_P)⁻¹ G_P,     res_{λ_j} R  = f_{λ_j} g_{λ_j}
//! R⁻¹(z) = I + F_N (zI − A_N)⁻¹ G_N,    res_{μ_j} R⁻¹ = f_{μ_j} g_{μ_j}
//! ```
//!
//! with `A_P = diag(λ)`, `A_N = diag(μ)`. The four semiresidual matrices are
//! over-determined: only pairs consistent with `R·R⁻¹ = I` describe a function,
//! which [`check_consistency`] measures.

use crate::cauchy::{check_off, scalar_system_representation, ScalarZeroPole, EVAL_EPS};
use crate::diagnostics::{scaled_residual, CheckReport};
use crate::error::{Error, Result};
use crate::linalg::{self, Complex, ComplexMatrix};

/// Minimum separation between any two of the poles and zeros.
pub const SEP_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPoleData {
    poles: Vec<Complex>,
    zeros: Vec<Complex>,
    f_p: ComplexMatrix,
    g_p: ComplexMatrix,
    f_n: ComplexMatrix,
    g_n: ComplexMatrix,
}

fn shape_err(name: &str, got: (usize, usize), want: (usize, usize)) -> Error {
    Error::InvalidInput(format!(
        "{name} has shape {}x{}, expected {}x{}",
        got.0, got.1, want.0, want.1
    ))
}

impl ZeroPoleData {
    /// Validates and stores normalized (`R(∞) = I`) zero-pole data.
    pub fn new(
        poles: Vec<Complex>,
        zeros: Vec<Complex>,
        f_p: ComplexMatrix,
        g_p: ComplexMatrix,
        f_n: ComplexMatrix,
        g_n: ComplexMatrix,
    ) -> Result<Self> {
        let n = poles.len();
        if zeros.len() != n {
            return Err(Error::InvalidInput(format!("{n} poles but {} zeros", zeros.len())));
        }
        let k = f_p.rows();
        if k == 0 {
            return Err(Error::InvalidInput("matrix dimension k must be at least 1".into()));
        }
        for (name, m, want) in [
            ("F_P", &f_p, (k, n)),
            ("G_P", &g_p, (n, k)),
            ("F_N", &f_n, (k, n)),
            ("G_N", &g_n, (n, k)),
        ] {
            if m.shape() != want {
                return Err(shape_err(name, m.shape(), want));
            }
            if !m.is_finite() {
                return Err(Error::InvalidInput(format!("{name} has non-finite entries")));
            }
        }
        let all: Vec<Complex> = poles.iter().chain(&zeros).copied().collect();
        for (i, a) in all.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite pole or zero {a}")));
            }
            for b in &all[i + 1..] {
                let d = (a - b).norm();
                if d < SEP_MIN {
                    return Err(Error::Collision {
                        a: *a,
                        b: *b,
                        distance: d,
                    });
                }
            }
        }
        for j in 0..n {
            if f_p.column(j).iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidInput(format!("column {j} of F_P is zero")));
            }
            if f_n.column(j).iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidInput(format!("column {j} of F_N is zero")));
            }
            if g_p.row(j).iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidInput(format!("row {j} of G_P is zero")));
            }
            if g_n.row(j).iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidInput(format!("row {j} of G_N is zero")));
            }
        }
        Ok(Self {
            poles,
            zeros,
            f_p,
            g_p,
            f_n,
            g_n,
        })
    }

    /// Normalizes data for `R(z) = D + F_P(zI − A_P)⁻¹G_P` with invertible
    /// `D = R(∞)`, where `R⁻¹(z) = D⁻¹ + F_N(zI − A_N)⁻¹G_N`.
    ///
    /// Returns the data of `D⁻¹R`, i.e. `F_P → D⁻¹F_P` and `G_N → G_N·D`.
    pub fn from_unnormalized(
        value_at_infinity: &ComplexMatrix,
        poles: Vec<Complex>,
        zeros: Vec<Complex>,
        f_p: ComplexMatrix,
        g_p: ComplexMatrix,
        f_n: ComplexMatrix,
        g_n: ComplexMatrix,
    ) -> Result<Self> {
        let k = f_p.rows();
        if value_at_infinity.shape() != (k, k) {
            return Err(shape_err("value at infinity", value_at_infinity.shape(), (k, k)));
        }
        if g_n.cols() != k {
            return Err(shape_err("G_N", g_n.shape(), (poles.len(), k)));
        }
        let f_p = linalg::solve(value_at_infinity, &f_p)?;
        let g_n = &g_n * value_at_infinity;
        Self::new(poles, zeros, f_p, g_p, f_n, g_n)
    }

    /// The constant function `I_k` (no poles, no zeros).
    pub fn identity(k: usize) -> Self {
        Self {
            poles: Vec::new(),
            zeros: Vec::new(),
            f_p: ComplexMatrix::zeros(k, 0),
            g_p: ComplexMatrix::zeros(0, k),
            f_n: ComplexMatrix::zeros(k, 0),
            g_n: ComplexMatrix::zeros(0, k),
        }
    }

    pub fn k(&self) -> usize {
        self.f_p.rows()
    }

    pub fn n(&self) -> usize {
        self.poles.len()
    }

    pub fn poles(&self) -> &[Complex] {
        &self.poles
    }

    pub fn zeros(&self) -> &[Complex] {
        &self.zeros
    }

    pub fn f_p(&self) -> &ComplexMatrix {
        &self.f_p
    }

    pub fn g_p(&self) -> &ComplexMatrix {
        &self.g_p
    }

    pub fn f_n(&self) -> &ComplexMatrix {
        &self.f_n
    }

    pub fn g_n(&self) -> &ComplexMatrix {
        &self.g_n
    }

    pub fn pole_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.poles)
    }

    pub fn zero_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.zeros)
    }

    /// Residue of `R` at pole `j`: `f_{λ_j}·g_{λ_j}`.
    pub fn pole_residue(&self, j: usize) -> ComplexMatrix {
        outer(&self.f_p.column(j), self.g_p.row(j))
    }

    /// Residue of `R⁻¹` at zero `j`: `f_{μ_j}·g_{μ_j}`.
    pub fn zero_residue(&self, j: usize) -> ComplexMatrix {
        outer(&self.f_n.column(j), self.g_n.row(j))
    }

    /// Scalar `r(z) = ∏(z − μ)/∏(z − λ)` in the gauge `f ≡ 1`, with the row
    /// coefficients taken from the Cauchy-matrix solves.
    pub fn from_scalar(poles: &[Complex], zeros: &[Complex]) -> Result<Self> {
        let sp = ScalarZeroPole::normalized(poles.to_vec(), zeros.to_vec())?;
        let (xi, eta) = scalar_system_representation(&sp)?;
        let ones = ComplexMatrix::row_vector(&vec![Complex::new(1.0, 0.0); poles.len()]);
        Self::new(
            poles.to_vec(),
            zeros.to_vec(),
            ones.clone(),
            ComplexMatrix::column_vector(&xi),
            ones,
            ComplexMatrix::column_vector(&eta),
        )
    }

    /// Restricts to the given pole and zero indices (in that order).
    pub fn select(&self, pole_idx: &[usize], zero_idx: &[usize]) -> Result<Self> {
        let poles = pole_idx.iter().map(|&i| self.poles[i]).collect();
        let zeros = zero_idx.iter().map(|&i| self.zeros[i]).collect();
        Self::new(
            poles,
            zeros,
            self.f_p.select_cols(pole_idx),
            self.g_p.select_rows(pole_idx),
            self.f_n.select_cols(zero_idx),
            self.g_n.select_rows(zero_idx),
        )
    }
}

fn outer(f: &[Complex], g: &[Complex]) -> ComplexMatrix {
    ComplexMatrix::from_fn(f.len(), g.len(), |i, j| f[i] * g[j])
}

/// Diagonal rescalings of the pole and zero semiresidual pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePair {
    d_p: Vec<Complex>,
    d_n: Vec<Complex>,
}

impl GaugePair {
    pub fn new(d_p: Vec<Complex>, d_n: Vec<Complex>) -> Result<Self> {
        for (index, d) in d_p.iter().chain(&d_n).enumerate() {
            if d.norm() == 0.0 || !d.is_finite() {
                return Err(Error::ZeroGaugeEntry { index });
            }
        }
        Ok(Self { d_p, d_n })
    }

    pub fn identity(n: usize) -> Self {
        let ones = vec![Complex::new(1.0, 0.0); n];
        Self {
            d_p: ones.clone(),
            d_n: ones,
        }
    }

    pub fn d_p(&self) -> &[Complex] {
        &self.d_p
    }

    pub fn d_n(&self) -> &[Complex] {
        &self.d_n
    }

    /// Entrywise reciprocal gauge.
    pub fn inverse(&self) -> Self {
        let inv = |v: &[Complex]| v.iter().map(|d| d.inv()).collect();
        Self {
            d_p: inv(&self.d_p),
            d_n: inv(&self.d_n),
        }
    }
}

/// Splits a rank-one matrix as `m = f·g`.
///
/// `f` is the column of `m` with largest norm, rescaled so that its
/// largest-magnitude entry equals one; `g` then follows by projection.
pub fn factor_rank_one(m: &ComplexMatrix, rank_eps: f64) -> Result<(Vec<Complex>, Vec<Complex>)> {
    let r = linalg::rank(m, rank_eps);
    if r != 1 {
        return Err(Error::NotRankOne { rank: r });
    }
    let best_col = (0..m.cols())
        .max_by(|&a, &b| {
            let na: f64 = m.column(a).iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = m.column(b).iter().map(|z| z.norm_sqr()).sum();
            na.total_cmp(&nb)
        })
        .expect("rank one implies at least one column");
    let col = m.column(best_col);
    let pivot = col
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonempty column");
    let f: Vec<Complex> = col.iter().map(|z| z / pivot).collect();
    let f_norm_sqr: f64 = f.iter().map(|z| z.norm_sqr()).sum();
    // g = f* m / (f* f)
    let g: Vec<Complex> = (0..m.cols())
        .map(|j| {
            f.iter()
                .enumerate()
                .map(|(i, fi)| fi.conj() * m[(i, j)])
                .sum::<Complex>()
                / f_norm_sqr
        })
        .collect();
    Ok((f, g))
}

/// Applies `F_P → F_P·D_P`, `G_P → D_P⁻¹·G_P`, `F_N → F_N·D_N`, `G_N → D_N⁻¹·G_N`.
pub fn gauge_transform(d: &ZeroPoleData, gauge: &GaugePair) -> Result<ZeroPoleData> {
    let n = d.n();
    if gauge.d_p.len() != n || gauge.d_n.len() != n {
        return Err(Error::InvalidInput(format!(
            "gauge has lengths {}/{}, expected {n}",
            gauge.d_p.len(),
            gauge.d_n.len()
        )));
    }
    let inv = gauge.inverse();
    Ok(ZeroPoleData {
        poles: d.poles.clone(),
        zeros: d.zeros.clone(),
        f_p: d.f_p.scale_cols(&gauge.d_p),
        g_p: d.g_p.scale_rows(&inv.d_p),
        f_n: d.f_n.scale_cols(&gauge.d_n),
        g_n: d.g_n.scale_rows(&inv.d_n),
    })
}

fn resolvent_sum(f: &ComplexMatrix, points: &[Complex], g: &ComplexMatrix, z: Complex, power: i32) -> ComplexMatrix {
    let weights: Vec<Complex> = points.iter().map(|p| (z - p).powi(-power)).collect();
    &f.scale_cols(&weights) * g
}

/// `R(z) = I + F_P(zI − A_P)⁻¹G_P`.
pub fn additive_eval_r(d: &ZeroPoleData, z: Complex) -> Result<ComplexMatrix> {
    check_off(z, &d.poles, EVAL_EPS)?;
    Ok(&ComplexMatrix::identity(d.k()) + &resolvent_sum(&d.f_p, &d.poles, &d.g_p, z, 1))
}

/// `R⁻¹(z) = I + F_N(zI − A_N)⁻¹G_N`.
pub fn additive_eval_rinv(d: &ZeroPoleData, z: Complex) -> Result<ComplexMatrix> {
    check_off(z, &d.zeros, EVAL_EPS)?;
    Ok(&ComplexMatrix::identity(d.k()) + &resolvent_sum(&d.f_n, &d.zeros, &d.g_n, z, 1))
}

/// `R′(z) = −F_P(zI − A_P)⁻²G_P`.
pub fn derivative_r(d: &ZeroPoleData, z: Complex) -> Result<ComplexMatrix> {
    check_off(z, &d.poles, EVAL_EPS)?;
    Ok(-&resolvent_sum(&d.f_p, &d.poles, &d.g_p, z, 2))
}

/// `(R⁻¹)′(z) = −F_N(zI − A_N)⁻²G_N`.
pub fn derivative_rinv(d: &ZeroPoleData, z: Complex) -> Result<ComplexMatrix> {
    check_off(z, &d.zeros, EVAL_EPS)?;
    Ok(-&resolvent_sum(&d.f_n, &d.zeros, &d.g_n, z, 2))
}

/// Deterministic evaluation points: eight on a circle enclosing all the data
/// and one beside each pole and zero.
pub fn sample_points(d: &ZeroPoleData) -> Vec<Complex> {
    let all: Vec<Complex> = d.poles.iter().chain(&d.zeros).copied().collect();
    let extent = all.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let big = 1.0 + 2.0 * extent;
    let mut pts: Vec<Complex> = (0..8)
        .map(|i| Complex::from_polar(big, 0.3 + i as f64 * std::f64::consts::FRAC_PI_4))
        .collect();
    for (i, a) in all.iter().enumerate() {
        let gap = all
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, b)| (a - b).norm())
            .fold(1.0, f64::min);
        pts.push(a + Complex::from_polar(gap / 3.0, 0.7));
    }
    pts
}

/// Measures how far the four semiresidual matrices are from describing a
/// pair of mutually inverse functions.
///
/// Checks, each reported as a scaled residual:
/// - `inverse_product`: `R(z)·R⁻¹(z) = I` at [`sample_points`];
/// - `pole_annihilation`: `R_λ·R⁻¹(λ) = 0` and `R⁻¹(λ)·R_λ = 0`;
/// - `pole_unit`: `R_λ·(R⁻¹)′(λ)·R_λ = R_λ`;
/// - `zero_annihilation` and `zero_unit`: the same at the zeros with the roles
///   of `R` and `R⁻¹` exchanged.
pub fn check_consistency(d: &ZeroPoleData, tol: f64) -> CheckReport {
    let mut report = CheckReport::new();
    let id = ComplexMatrix::identity(d.k());

    let mut worst = 0.0_f64;
    for z in sample_points(d) {
        match (additive_eval_r(d, z), additive_eval_rinv(d, z)) {
            (Ok(r), Ok(rinv)) => {
                let prod = &r * &rinv;
                let scale = r.frobenius_norm() * rinv.frobenius_norm();
                worst = worst.max((&prod - &id).frobenius_norm() / scale.max(1.0));
            }
            _ => worst = f64::INFINITY,
        }
    }
    report.push("inverse_product", worst, tol);

    let (pa, pu) = annihilation_checks(
        (0..d.n()).map(|j| (d.poles[j], d.pole_residue(j))),
        |z| additive_eval_rinv(d, z),
        |z| derivative_rinv(d, z),
    );
    report.push("pole_annihilation", pa, tol);
    report.push("pole_unit", pu, tol);

    let (za, zu) = annihilation_checks(
        (0..d.n()).map(|j| (d.zeros[j], d.zero_residue(j))),
        |z| additive_eval_r(d, z),
        |z| derivative_r(d, z),
    );
    report.push("zero_annihilation", za, tol);
    report.push("zero_unit", zu, tol);
    report
}

fn annihilation_checks(
    residues: impl Iterator<Item = (Complex, ComplexMatrix)>,
    value: impl Fn(Complex) -> Result<ComplexMatrix>,
    derivative: impl Fn(Complex) -> Result<ComplexMatrix>,
) -> (f64, f64) {
    let (mut annihilation, mut unit) = (0.0_f64, 0.0_f64);
    for (point, res) in residues {
        let (Ok(v), Ok(dv)) = (value(point), derivative(point)) else {
            return (f64::INFINITY, f64::INFINITY);
        };
        let left = &res * &v;
        let right = &v * &res;
        let scale = res.frobenius_norm() * v.frobenius_norm();
        annihilation = annihilation.max(left.frobenius_norm().max(right.frobenius_norm()) / scale.max(1.0));
        let sandwich = &(&res * &dv) * &res;
        let scale = res.frobenius_norm().powi(2) * dv.frobenius_norm() + res.frobenius_norm();
        unit = unit.max((&sandwich - &res).frobenius_norm() / scale.max(1.0));
    }
    (annihilation, unit)
}

/// Residues of the logarithmic derivative `R′·R⁻¹`.
///
/// At a pole, `P_λ = −R_λ·(R⁻¹)′(λ)`; at a zero, `P_μ = R′(μ)·(R⁻¹)_μ` where
/// `(R⁻¹)_μ` is the residue of `R⁻¹`. For valid data `P_λ² = −P_λ` with trace
/// −1, `P_μ² = P_μ` with trace +1, and all residues sum to zero.
pub fn log_derivative_residues(d: &ZeroPoleData) -> Result<(Vec<ComplexMatrix>, Vec<ComplexMatrix>)> {
    let at_poles = (0..d.n())
        .map(|j| Ok(-&(&d.pole_residue(j) * &derivative_rinv(d, d.poles[j])?)))
        .collect::<Result<Vec<_>>>()?;
    let at_zeros = (0..d.n())
        .map(|j| Ok(&derivative_r(d, d.zeros[j])? * &d.zero_residue(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok((at_poles, at_zeros))
}

/// Residuals of the projector identities for [`log_derivative_residues`].
pub fn check_log_derivative(d: &ZeroPoleData, tol: f64) -> Result<CheckReport> {
    let (pl, pm) = log_derivative_residues(d)?;
    let mut report = CheckReport::new();
    let one = Complex::new(1.0, 0.0);
    let trace_p = pl.iter().map(|p| (p.trace() + one).norm()).fold(0.0, f64::max);
    let trace_n = pm.iter().map(|p| (p.trace() - one).norm()).fold(0.0, f64::max);
    let idem_p = pl
        .iter()
        .map(|p| scaled_residual(&(&(p * p) + p), &[p]))
        .fold(0.0, f64::max);
    let idem_n = pm
        .iter()
        .map(|p| scaled_residual(&(&(p * p) - p), &[p]))
        .fold(0.0, f64::max);
    let mut total = ComplexMatrix::zeros(d.k(), d.k());
    let mut scale = 0.0;
    for p in pl.iter().chain(&pm) {
        total = &total + p;
        scale += p.frobenius_norm();
    }
    report.push("trace_pole_projectors", trace_p, tol);
    report.push("trace_zero_projectors", trace_n, tol);
    report.push("pole_projector_idempotence", idem_p, tol);
    report.push("zero_projector_idempotence", idem_n, tol);
    report.push("projector_sum", total.frobenius_norm() / scale.max(1.0), tol);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::{scalar_eval, ScalarZeroPole};
    use crate::linalg::RANK_EPS;
    use crate::testutil::{c, random_separated_points};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(v: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[v]])
    }

    pub(crate) fn d1() -> ZeroPoleData {
        ZeroPoleData::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], m(1.0), m(-1.0), m(1.0), m(1.0)).unwrap()
    }

    // Scalar instance from poles/zeros via residues of the product form.
    fn scalar_instance(poles: &[Complex], zeros: &[Complex]) -> ZeroPoleData {
        ZeroPoleData::from_scalar(poles, zeros).unwrap()
    }

    #[test]
    fn validation_rejects_bad_structure() {
        let zero = m(0.0);
        assert!(ZeroPoleData::new(
            vec![c(0.0, 0.0)],
            vec![c(1.0, 0.0)],
            zero.clone(),
            m(-1.0),
            m(1.0),
            m(1.0)
        )
        .is_err());
        assert!(ZeroPoleData::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], m(1.0), m(-1.0), m(1.0), zero).is_err());
        assert!(matches!(
            ZeroPoleData::new(vec![c(0.0, 0.0)], vec![c(1e-7, 0.0)], m(1.0), m(-1.0), m(1.0), m(1.0)),
            Err(Error::Collision { .. })
        ));
        assert!(ZeroPoleData::new(vec![c(0.0, 0.0)], vec![], m(1.0), m(-1.0), m(1.0), m(1.0)).is_err());
    }

    #[test]
    fn factor_rank_one_cases() {
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 4.0], &[1.0, 2.0]]);
        let (f, g) = factor_rank_one(&a, RANK_EPS).unwrap();
        assert!((f[0] - c(1.0, 0.0)).norm() < 1e-15 && (f[1] - c(0.5, 0.0)).norm() < 1e-15);
        let back = &ComplexMatrix::column_vector(&f) * &ComplexMatrix::row_vector(&g);
        assert!(back.distance(&a) < 1e-12);

        let e = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let (f, g) = factor_rank_one(&e, RANK_EPS).unwrap();
        assert_eq!(f, vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(g, vec![c(1.0, 0.0), c(0.0, 0.0)]);

        assert!(matches!(
            factor_rank_one(&ComplexMatrix::identity(2), RANK_EPS),
            Err(Error::NotRankOne { rank: 2 })
        ));
    }

    #[test]
    fn gauge_transform_cases() {
        let d = d1();
        let same = gauge_transform(&d, &GaugePair::identity(1)).unwrap();
        assert_eq!(same, d);

        let g = GaugePair::new(vec![c(2.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let t = gauge_transform(&d, &g).unwrap();
        assert_eq!(t.f_p()[(0, 0)], c(2.0, 0.0));
        assert_eq!(t.g_p()[(0, 0)], c(-0.5, 0.0));
        assert_eq!(t.pole_residue(0), d.pole_residue(0));

        let g = GaugePair::new(vec![c(0.3, 1.2)], vec![c(-2.0, 0.5)]).unwrap();
        let back = gauge_transform(&gauge_transform(&d, &g).unwrap(), &g.inverse()).unwrap();
        assert!(back.f_p().distance(d.f_p()) < 1e-14 && back.g_n().distance(d.g_n()) < 1e-14);

        assert!(matches!(
            GaugePair::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]),
            Err(Error::ZeroGaugeEntry { index: 0 })
        ));
    }

    #[test]
    fn additive_eval_d1() {
        let d = d1();
        assert!((additive_eval_r(&d, c(2.0, 0.0)).unwrap()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((additive_eval_rinv(&d, c(2.0, 0.0)).unwrap()[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
        let far = additive_eval_r(&d, c(1e8, 0.0)).unwrap();
        assert!(far.distance(&ComplexMatrix::identity(1)) < 1e-6);
        let far = additive_eval_rinv(&d, c(0.0, 1e8)).unwrap();
        assert!(far.distance(&ComplexMatrix::identity(1)) < 1e-6);
        assert!(matches!(additive_eval_r(&d, c(0.0, 0.0)), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn additive_eval_matches_scalar_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts = random_separated_points(&mut rng, 8, 2.0, 0.05);
        let d = scalar_instance(&pts[..4], &pts[4..]);
        let sp = ScalarZeroPole::normalized(pts[..4].to_vec(), pts[4..].to_vec()).unwrap();
        for _ in 0..10 {
            let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let oracle = scalar_eval(&sp, z).unwrap();
            let v = additive_eval_r(&d, z).unwrap()[(0, 0)];
            assert!((v - oracle).norm() <= 1e-8 * oracle.norm().max(1.0));
            let vi = additive_eval_rinv(&d, z).unwrap()[(0, 0)];
            assert!((v * vi - c(1.0, 0.0)).norm() <= 1e-8);
        }
    }

    #[test]
    fn consistency_d1_and_broken() {
        let report = check_consistency(&d1(), 1e-12);
        assert!(report.passed(), "{report}");
        let broken = ZeroPoleData::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], m(1.0), m(-1.0), m(1.0), m(-1.0)).unwrap();
        let report = check_consistency(&broken, 1e-8);
        assert!(!report.get("inverse_product").unwrap().passed());
    }

    #[test]
    fn log_derivative_d1() {
        let (pl, pm) = log_derivative_residues(&d1()).unwrap();
        assert!((pl[0][(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((pm[0][(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(check_log_derivative(&d1(), 1e-9).unwrap().passed());
    }

    #[test]
    fn log_derivative_residues_match_finite_differences() {
        // Residue of R'R⁻¹ at a pole via a small contour integral of the
        // finite-difference log derivative.
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let pts = random_separated_points(&mut rng, 6, 2.0, 0.2);
        let d = scalar_instance(&pts[..3], &pts[3..]);
        let (pl, _) = log_derivative_residues(&d).unwrap();
        let lambda = d.poles()[0];
        let radius = 0.05;
        let nodes = 64;
        let mut acc = c(0.0, 0.0);
        for i in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / nodes as f64;
            let z = lambda + Complex::from_polar(radius, theta);
            let h = 1e-6;
            let dr =
                (additive_eval_r(&d, z + h).unwrap()[(0, 0)] - additive_eval_r(&d, z - h).unwrap()[(0, 0)]) / (2.0 * h);
            let ld = dr * additive_eval_rinv(&d, z).unwrap()[(0, 0)];
            acc += ld * Complex::from_polar(radius, theta) / nodes as f64;
        }
        assert!((acc - pl[0][(0, 0)]).norm() < 1e-6, "{acc} vs {}", pl[0][(0, 0)]);
    }

    #[test]
    fn normalization_at_infinity() {
        // R(z) = 2 + 2·(−1)/z = 2(z − 1)/z, R⁻¹(z) = 1/2 + (1/2)/(z − 1).
        let d = ZeroPoleData::from_unnormalized(
            &m(2.0),
            vec![c(0.0, 0.0)],
            vec![c(1.0, 0.0)],
            m(2.0),
            m(-1.0),
            m(1.0),
            m(0.5),
        )
        .unwrap();
        assert_eq!(d, d1());
    }
}
