//! Core and coupling matrices, and the system representations built on them.
//!
//! For zero-pole data `(A_P, A_N, F_P, G_P, F_N, G_N)` the right and left
//! coupling matrices are the unique solutions of
//!
//! ```text
//! A_N·S^r − S^r·A_P = G_N·F_P,      A_P·S^l − S^l·A_N = G_P·F_N,
//! ```
//!
//! and for consistent data they are mutually inverse. They yield the joint
//! representation
//!
//! ```text
//! R(x)·R⁻¹(y) = I + (x − y)·F_P(xI − A_P)⁻¹(S^r)⁻¹(yI − A_N)⁻¹G_N
//! ```
//!
//! and its left, individual and hybrid variants. [`build_bundle`] computes
//! everything once and records residuals of every identity that ties the
//! pieces together.

use crate::cauchy::{check_off, EVAL_EPS};
use crate::diagnostics::{relative_distance, scaled_residual, CheckReport};
use crate::error::{Error, Result};
use crate::linalg::{self, Complex, ComplexMatrix, Lu};
use crate::model::{ZeroPoleData, SEP_MIN};

/// Tolerances used when building a bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Threshold for reported checks.
    pub report: f64,
    /// Threshold above which [`build_bundle`] refuses the data.
    pub fail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            report: 1e-8,
            fail: 1e-6,
        }
    }
}

/// Solves `diag(a)·X − X·diag(b) = C` entrywise: `x_{p,q} = c_{p,q}/(a_p − b_q)`.
pub fn sylvester_diag_solve(a: &[Complex], b: &[Complex], c: &ComplexMatrix) -> Result<ComplexMatrix> {
    if c.shape() != (a.len(), b.len()) {
        return Err(Error::InvalidInput(format!(
            "right-hand side is {}x{}, expected {}x{}",
            c.rows(),
            c.cols(),
            a.len(),
            b.len()
        )));
    }
    for ap in a {
        for bq in b {
            let d = (ap - bq).norm();
            if d < SEP_MIN {
                return Err(Error::SpectraOverlap {
                    a: *ap,
                    b: *bq,
                    distance: d,
                });
            }
        }
    }
    Ok(ComplexMatrix::from_fn(a.len(), b.len(), |p, q| {
        c[(p, q)] / (a[p] - b[q])
    }))
}

/// `m_{p,q} = g_p·f_q / (a_p − b_q)` with `g_p` the rows of `g` and `f_q` the
/// columns of `f`.
fn cauchy_like(g: &ComplexMatrix, f: &ComplexMatrix, a: &[Complex], b: &[Complex]) -> ComplexMatrix {
    let gf = g * f;
    ComplexMatrix::from_fn(a.len(), b.len(), |p, q| gf[(p, q)] / (a[p] - b[q]))
}

/// Right and left core matrices from their closed forms:
/// `h^r_{p,q} = g_{λ_p}·f_{μ_q}/(λ_p − μ_q)` and
/// `h^l_{p,q} = g_{μ_p}·f_{λ_q}/(μ_p − λ_q)`.
pub fn core_matrices(d: &ZeroPoleData) -> (ComplexMatrix, ComplexMatrix) {
    let hr = cauchy_like(d.g_p(), d.f_n(), d.poles(), d.zeros());
    let hl = cauchy_like(d.g_n(), d.f_p(), d.zeros(), d.poles());
    (hr, hl)
}

/// Right and left coupling matrices from their closed forms:
/// `s^r_{p,q} = g_{μ_p}·f_{λ_q}/(μ_p − λ_q)` and
/// `s^l_{p,q} = g_{λ_p}·f_{μ_q}/(λ_p − μ_q)`.
pub fn coupling_matrices(d: &ZeroPoleData) -> (ComplexMatrix, ComplexMatrix) {
    let sr = cauchy_like(d.g_n(), d.f_p(), d.zeros(), d.poles());
    let sl = cauchy_like(d.g_p(), d.f_n(), d.poles(), d.zeros());
    (sr, sl)
}

/// Coupling matrices as solutions of the two Sylvester equations.
pub fn coupling_matrices_sylvester(d: &ZeroPoleData) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let sr = sylvester_diag_solve(d.zeros(), d.poles(), &(d.g_n() * d.f_p()))?;
    let sl = sylvester_diag_solve(d.poles(), d.zeros(), &(d.g_p() * d.f_n()))?;
    Ok((sr, sl))
}

/// Zero-pole data together with its core and coupling matrices.
#[derive(Debug, Clone)]
pub struct RealizationBundle {
    data: ZeroPoleData,
    hr: ComplexMatrix,
    hl: ComplexMatrix,
    sr: ComplexMatrix,
    sl: ComplexMatrix,
    sr_inv: ComplexMatrix,
    sl_inv: ComplexMatrix,
    fp_sr_inv: ComplexMatrix,
    sr_inv_gn: ComplexMatrix,
    fn_sl_inv: ComplexMatrix,
    sl_inv_gp: ComplexMatrix,
    diagnostics: CheckReport,
    cond_sr: f64,
}

/// Computes core and coupling matrices and all diagnostics.
///
/// Fails with [`Error::InconsistentData`] when the (relative) mutual-inverse or
/// coupling residuals exceed `tol.fail`: inconsistent semiresidual matrices describe no
/// function at all.
pub fn build_bundle(d: &ZeroPoleData, tol: Tolerances) -> Result<RealizationBundle> {
    let (hr, hl) = core_matrices(d);
    let (sr, sl) = coupling_matrices(d);
    if !(sr.is_finite() && sl.is_finite()) {
        return Err(Error::SingularCoupling { cond: f64::INFINITY });
    }
    let sr_lu = Lu::factor(&sr).map_err(|_| Error::SingularCoupling { cond: f64::INFINITY })?;
    let sl_lu = Lu::factor(&sl).map_err(|_| Error::SingularCoupling { cond: f64::INFINITY })?;
    let sr_inv = sr_lu.inverse();
    let sl_inv = sl_lu.inverse();
    let cond_sr = if d.n() == 0 {
        1.0
    } else {
        sr.frobenius_norm() * sr_inv.frobenius_norm()
    };

    let mut bundle = RealizationBundle {
        fp_sr_inv: d.f_p() * &sr_inv,
        sr_inv_gn: &sr_inv * d.g_n(),
        fn_sl_inv: d.f_n() * &sl_inv,
        sl_inv_gp: &sl_inv * d.g_p(),
        data: d.clone(),
        hr,
        hl,
        sr,
        sl,
        sr_inv,
        sl_inv,
        diagnostics: CheckReport::new(),
        cond_sr,
    };
    bundle.diagnostics = bundle_diagnostics(&bundle, tol.report)?;

    // The mutual-inverse residual is judged relative to ‖S^r‖·‖S^l‖ here, so
    // that ill-conditioned but consistent data is not mistaken for
    // inconsistent data. The reported value stays absolute.
    let s_scale = (bundle.sr.frobenius_norm() * bundle.sl.frobenius_norm()).max(1.0);
    let gate = [
        ("mutual_inverse_s", s_scale),
        ("coupling_a", 1.0),
        ("coupling_b", 1.0),
        ("coupling_c", 1.0),
        ("coupling_d", 1.0),
    ];
    let worst = gate
        .iter()
        .filter_map(|(name, scale)| Some((*name, bundle.diagnostics.residual(name)? / scale)))
        .filter(|(_, r)| r.is_nan() || *r > tol.fail)
        .max_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((check, residual)) = worst {
        return Err(Error::InconsistentData {
            check: check.to_string(),
            residual,
            tol: tol.fail,
        });
    }
    Ok(bundle)
}

fn bundle_diagnostics(b: &RealizationBundle, tol: f64) -> Result<CheckReport> {
    let d = &b.data;
    let n = d.n();
    let id = ComplexMatrix::identity(n);
    let ap = d.pole_matrix();
    let an = d.zero_matrix();
    let mut r = CheckReport::new();

    let gnfp = d.g_n() * d.f_p();
    let gpfn = d.g_p() * d.f_n();
    let (l1, l2) = (&an * &b.sr, &b.sr * &ap);
    r.push(
        "sylvester_r",
        scaled_residual(&(&(&l1 - &l2) - &gnfp), &[&l1, &l2, &gnfp]),
        tol,
    );
    let (l1, l2) = (&ap * &b.sl, &b.sl * &an);
    r.push(
        "sylvester_l",
        scaled_residual(&(&(&l1 - &l2) - &gpfn), &[&l1, &l2, &gpfn]),
        tol,
    );

    let (t1, t2, t3) = (&b.hr * &an, &ap * &b.hr, &(&b.hr * &gnfp) * &b.hr);
    r.push(
        "core_sylvester_r",
        scaled_residual(&(&(&t1 - &t2) - &t3), &[&t1, &t2, &t3]),
        tol,
    );
    let (t1, t2, t3) = (&b.hl * &ap, &an * &b.hl, &(&b.hl * &gpfn) * &b.hl);
    r.push(
        "core_sylvester_l",
        scaled_residual(&(&(&t1 - &t2) - &t3), &[&t1, &t2, &t3]),
        tol,
    );

    let s_prod = (&b.sr * &b.sl).distance(&id).max((&b.sl * &b.sr).distance(&id));
    r.push("mutual_inverse_s", s_prod, tol);
    let h_prod = (&b.hr * &b.hl).distance(&id).max((&b.hl * &b.hr).distance(&id));
    r.push("mutual_inverse_h", h_prod, tol);
    // Closed-form H^r against the LU inverse of S^r.
    r.push("core_vs_lu_inverse", relative_distance(&b.hr, &b.sr_inv), tol);

    let (sr_syl, sl_syl) = coupling_matrices_sylvester(d)?;
    let route = relative_distance(&sr_syl, &b.sr).max(relative_distance(&sl_syl, &b.sl));
    r.push("coupling_sylvester_route", route, tol);

    r.extend(check_coupling_relations(b, tol));
    Ok(r)
}

/// The four zero-pole coupling relations:
/// a) `G_N = −S^r·G_P`, b) `G_P = −S^l·G_N`, c) `F_P = F_N·S^r`, d) `F_N = F_P·S^l`.
pub fn check_coupling_relations(b: &RealizationBundle, tol: f64) -> CheckReport {
    let d = &b.data;
    let mut r = CheckReport::new();
    let a = &b.sr * d.g_p();
    r.push("coupling_a", scaled_residual(&(d.g_n() + &a), &[d.g_n(), &a]), tol);
    let bb = &b.sl * d.g_n();
    r.push("coupling_b", scaled_residual(&(d.g_p() + &bb), &[d.g_p(), &bb]), tol);
    let c = d.f_n() * &b.sr;
    r.push("coupling_c", scaled_residual(&(d.f_p() - &c), &[d.f_p(), &c]), tol);
    let dd = d.f_p() * &b.sl;
    r.push("coupling_d", scaled_residual(&(d.f_n() - &dd), &[d.f_n(), &dd]), tol);
    r
}

fn resolvent_weights(points: &[Complex], z: Complex) -> Vec<Complex> {
    points.iter().map(|p| (z - p).inv()).collect()
}

impl RealizationBundle {
    pub fn data(&self) -> &ZeroPoleData {
        &self.data
    }

    pub fn k(&self) -> usize {
        self.data.k()
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn hr(&self) -> &ComplexMatrix {
        &self.hr
    }

    pub fn hl(&self) -> &ComplexMatrix {
        &self.hl
    }

    pub fn sr(&self) -> &ComplexMatrix {
        &self.sr
    }

    pub fn sl(&self) -> &ComplexMatrix {
        &self.sl
    }

    /// `(S^r)⁻¹` from LU.
    pub fn sr_inv(&self) -> &ComplexMatrix {
        &self.sr_inv
    }

    /// `(S^l)⁻¹` from LU.
    pub fn sl_inv(&self) -> &ComplexMatrix {
        &self.sl_inv
    }

    pub fn diagnostics(&self) -> &CheckReport {
        &self.diagnostics
    }

    /// `‖S^r‖_F·‖(S^r)⁻¹‖_F`.
    pub fn cond_sr(&self) -> f64 {
        self.cond_sr
    }

    fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.k())
    }

    /// `R(z) = I − F_P(zI − A_P)⁻¹(S^r)⁻¹G_N`.
    pub fn eval_r(&self, z: Complex) -> Result<ComplexMatrix> {
        check_off(z, self.data.poles(), EVAL_EPS)?;
        let w = resolvent_weights(self.data.poles(), z);
        Ok(&self.identity() - &(&self.data.f_p().scale_cols(&w) * &self.sr_inv_gn))
    }

    /// `R⁻¹(z) = I + F_P(S^r)⁻¹(zI − A_N)⁻¹G_N`.
    pub fn eval_rinv(&self, z: Complex) -> Result<ComplexMatrix> {
        check_off(z, self.data.zeros(), EVAL_EPS)?;
        let w = resolvent_weights(self.data.zeros(), z);
        Ok(&self.identity() + &(&self.fp_sr_inv.scale_cols(&w) * self.data.g_n()))
    }

    /// `R(z) = I + F_N(S^l)⁻¹(zI − A_P)⁻¹G_P`.
    pub fn eval_r_left(&self, z: Complex) -> Result<ComplexMatrix> {
        check_off(z, self.data.poles(), EVAL_EPS)?;
        let w = resolvent_weights(self.data.poles(), z);
        Ok(&self.identity() + &(&self.fn_sl_inv.scale_cols(&w) * self.data.g_p()))
    }

    /// `R⁻¹(z) = I − F_N(zI − A_N)⁻¹(S^l)⁻¹G_P`.
    pub fn eval_rinv_left(&self, z: Complex) -> Result<ComplexMatrix> {
        check_off(z, self.data.zeros(), EVAL_EPS)?;
        let w = resolvent_weights(self.data.zeros(), z);
        Ok(&self.identity() - &(&self.data.f_n().scale_cols(&w) * &self.sl_inv_gp))
    }

    /// `R(x)·R⁻¹(y) = I + (x − y)·F_P(xI − A_P)⁻¹(S^r)⁻¹(yI − A_N)⁻¹G_N`.
    pub fn eval_joint_right(&self, x: Complex, y: Complex) -> Result<ComplexMatrix> {
        check_off(x, self.data.poles(), EVAL_EPS)?;
        check_off(y, self.data.zeros(), EVAL_EPS)?;
        let wx = resolvent_weights(self.data.poles(), x);
        let wy: Vec<Complex> = resolvent_weights(self.data.zeros(), y)
            .into_iter()
            .map(|w| w * (x - y))
            .collect();
        let left = self.data.f_p().scale_cols(&wx);
        let right = self.data.g_n().scale_rows(&wy);
        Ok(&self.identity() + &(&(&left * &self.sr_inv) * &right))
    }

    /// `R⁻¹(x)·R(y) = I + (x − y)·F_N(xI − A_N)⁻¹(S^l)⁻¹(yI − A_P)⁻¹G_P`.
    pub fn eval_joint_left(&self, x: Complex, y: Complex) -> Result<ComplexMatrix> {
        check_off(x, self.data.zeros(), EVAL_EPS)?;
        check_off(y, self.data.poles(), EVAL_EPS)?;
        let wx = resolvent_weights(self.data.zeros(), x);
        let wy: Vec<Complex> = resolvent_weights(self.data.poles(), y)
            .into_iter()
            .map(|w| w * (x - y))
            .collect();
        let left = self.data.f_n().scale_cols(&wx);
        let right = self.data.g_p().scale_rows(&wy);
        Ok(&self.identity() + &(&(&left * &self.sl_inv) * &right))
    }

    /// `R(x)·R⁻¹(y)` from the left-type data `F_N`, `G_P`, `S^l`:
    /// `I − (x − y)·F_N(S^l)⁻¹(xI − A_P)⁻¹S^l(yI − A_N)⁻¹(S^l)⁻¹G_P`.
    pub fn eval_hybrid_right(&self, x: Complex, y: Complex) -> Result<ComplexMatrix> {
        check_off(x, self.data.poles(), EVAL_EPS)?;
        check_off(y, self.data.zeros(), EVAL_EPS)?;
        let wx = resolvent_weights(self.data.poles(), x);
        let wy: Vec<Complex> = resolvent_weights(self.data.zeros(), y)
            .into_iter()
            .map(|w| w * (x - y))
            .collect();
        let middle = self.sl.scale_rows(&wx).scale_cols(&wy);
        Ok(&self.identity() - &(&(&self.fn_sl_inv * &middle) * &self.sl_inv_gp))
    }

    /// `R⁻¹(x)·R(y)` from the right-type data `F_P`, `G_N`, `S^r`:
    /// `I − (x − y)·F_P(S^r)⁻¹(xI − A_N)⁻¹S^r(yI − A_P)⁻¹(S^r)⁻¹G_N`.
    pub fn eval_hybrid_left(&self, x: Complex, y: Complex) -> Result<ComplexMatrix> {
        check_off(x, self.data.zeros(), EVAL_EPS)?;
        check_off(y, self.data.poles(), EVAL_EPS)?;
        let wx = resolvent_weights(self.data.zeros(), x);
        let wy: Vec<Complex> = resolvent_weights(self.data.poles(), y)
            .into_iter()
            .map(|w| w * (x - y))
            .collect();
        let middle = self.sr.scale_rows(&wx).scale_cols(&wy);
        Ok(&self.identity() - &(&(&self.fp_sr_inv * &middle) * &self.sr_inv_gn))
    }
}

/// Condition estimate of an arbitrary square matrix, re-exported for reports.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    linalg::condition_number(m)
}
