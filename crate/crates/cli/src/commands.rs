use std::time::Instant;

use zpreal_core::cauchy::{cauchy_det_squared, cauchy_inverse_formula, cauchy_matrix};
use zpreal_core::chain::{chain_identity_check, random_instance, ExtPoint, Geometry, JointLeft, JointRight};
use zpreal_core::diagnostics::relative_distance;
use zpreal_core::model::{
    additive_eval_r, additive_eval_rinv, check_consistency, check_log_derivative, sample_points, ZeroPoleData,
};
use zpreal_core::realization::{build_bundle, RealizationBundle, Tolerances};
use zpreal_core::wiener_hopf::{factorize, CircleContour, Decision, FactorOptions};
use zpreal_core::{Complex, ComplexMatrix};

use crate::args::{
    CauchyArgs, CauchyOp, Cli, Command, EvalArgs, FactorizeArgs, GenerateArgs, ReportOpts, VerifyArgs, Which,
};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_VERIFICATION};
use crate::format;
use crate::instance::{InstanceFile, Metadata, PartitionMeta};
use crate::report::Report;

/// What a command printed and the exit code it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Verify(a) => verify(&a),
        Command::Eval(a) => eval(&a),
        Command::Factorize(a) => factorize_cmd(&a),
        Command::Cauchy(a) => cauchy(&a),
    }
}

fn finish(mut report: Report, opts: &ReportOpts, start: Instant) -> CliResult<Outcome> {
    if opts.timing {
        report.set_timing(start.elapsed());
    }
    if let Some(path) = &opts.report_out {
        report.write_json(path)?;
    }
    let code = if report.passed { EXIT_OK } else { EXIT_VERIFICATION };
    Ok(Outcome {
        stdout: report.text(),
        code,
    })
}

fn load(path: &std::path::Path) -> CliResult<ZeroPoleData> {
    InstanceFile::read(path)?.to_data()
}

pub fn generate(a: &GenerateArgs) -> CliResult<Outcome> {
    let geometry = Geometry::Disk {
        radius: a.radius,
        min_sep: a.min_sep,
    };
    let (k, n) = (a.k as usize, a.n as usize);
    let b = random_instance(k, n, a.seed, &geometry)?;
    let meta = Metadata {
        seed: Some(a.seed),
        geometry: Some(format!("disk radius={} min_sep={}", a.radius, a.min_sep)),
        description: Some(format!("random general-position instance, k={k}, n={n}")),
        partition: None,
    };
    InstanceFile::from_data(b.data(), meta).write(&a.out)?;
    let mut r = Report::new("generate");
    r.fact("k", k);
    r.fact("n", n);
    r.fact("seed", a.seed);
    r.value("cond_Sr", b.cond_sr());
    Ok(Outcome::ok(r.text()))
}

/// Every identity the library knows about, evaluated on one instance.
pub fn verify_suite(d: &ZeroPoleData, tol: f64) -> Report {
    let mut r = Report::new("verify");
    r.fact("k", d.k());
    r.fact("n", d.n());
    r.absorb("consistency", &check_consistency(d, tol));
    match check_log_derivative(d, tol) {
        Ok(c) => r.absorb("log_derivative", &c),
        Err(e) => r.failed("log_derivative", &e.to_string()),
    }
    let loose = Tolerances {
        report: tol,
        fail: f64::INFINITY,
    };
    let b = match build_bundle(d, loose) {
        Ok(b) => b,
        Err(e) => {
            r.failed("realization", &e.to_string());
            return r;
        }
    };
    r.value("cond_Sr", b.cond_sr());
    r.absorb("realization", b.diagnostics());
    if let Err(e) = evaluator_checks(&b, tol, &mut r) {
        r.failed("evaluators", &e.to_string());
    }
    let pts: Vec<ExtPoint> = sample_points(d).into_iter().map(ExtPoint::Finite).collect();
    let mut triples: Vec<(ExtPoint, ExtPoint, ExtPoint)> = (0..pts.len().saturating_sub(2))
        .map(|i| (pts[i], pts[i + 1], pts[i + 2]))
        .collect();
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        triples.push((ExtPoint::Infinity, *first, *last));
        triples.push((*last, *first, ExtPoint::Infinity));
    }
    for (name, result) in [
        ("chain_right", chain_identity_check(&JointRight(&b), &triples, tol)),
        ("chain_left", chain_identity_check(&JointLeft(&b), &triples, tol)),
    ] {
        match result {
            Ok(c) => r.absorb(name, &c),
            Err(e) => r.failed(name, &e.to_string()),
        }
    }
    r
}

fn evaluator_checks(b: &RealizationBundle, tol: f64, r: &mut Report) -> zpreal_core::Result<()> {
    let d = b.data();
    let pts = sample_points(d);
    let mut worst = [0.0f64; 8];
    for (i, &x) in pts.iter().enumerate() {
        let y = pts[(i + 1) % pts.len()];
        let rx = b.eval_r(x)?;
        let ri = b.eval_rinv(x)?;
        let ry = b.eval_r(y)?;
        let riy = b.eval_rinv(y)?;
        let joint_r = b.eval_joint_right(x, y)?;
        let joint_l = b.eval_joint_left(x, y)?;
        let vals = [
            relative_distance(&b.eval_r_left(x)?, &rx),
            relative_distance(&additive_eval_r(d, x)?, &rx),
            relative_distance(&b.eval_rinv_left(x)?, &ri),
            relative_distance(&additive_eval_rinv(d, x)?, &ri),
            relative_distance(&joint_r, &(&rx * &riy)),
            relative_distance(&joint_l, &(&ri * &ry)),
            relative_distance(&b.eval_hybrid_right(x, y)?, &joint_r),
            relative_distance(&b.eval_hybrid_left(x, y)?, &joint_l),
        ];
        for (w, v) in worst.iter_mut().zip(vals) {
            *w = w.max(v);
        }
    }
    let names = [
        "r_left_vs_r",
        "r_vs_additive",
        "rinv_left_vs_rinv",
        "rinv_vs_additive",
        "joint_right_vs_product",
        "joint_left_vs_product",
        "hybrid_right_vs_joint",
        "hybrid_left_vs_joint",
    ];
    for (name, w) in names.iter().zip(worst) {
        r.check(format!("evaluators/{name}"), w, tol);
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let start = Instant::now();
    let d = load(&a.path)?;
    finish(verify_suite(&d, a.tol), &a.report, start)
}

pub fn eval(a: &EvalArgs) -> CliResult<Outcome> {
    let y = match (a.which.needs_y(), a.y_re, a.y_im) {
        (true, Some(re), Some(im)) => Some(Complex::new(re, im)),
        (true, _, _) => return Err(CliError::usage("this formula needs a second point Y_RE Y_IM")),
        (false, None, None) => None,
        (false, _, _) => return Err(CliError::usage("R and Rinv take a single point")),
    };
    let d = load(&a.path)?;
    let b = build_bundle(&d, Tolerances::default())?;
    let x = Complex::new(a.x_re, a.x_im);
    let y = y.unwrap_or_default();
    let m = match a.which {
        Which::R => b.eval_r(x)?,
        Which::Rinv => b.eval_rinv(x)?,
        Which::JointR => b.eval_joint_right(x, y)?,
        Which::JointL => b.eval_joint_left(x, y)?,
        Which::HybridR => b.eval_hybrid_right(x, y)?,
        Which::HybridL => b.eval_hybrid_left(x, y)?,
    };
    Ok(Outcome::ok(format::matrix(&m)))
}

pub fn factorize_cmd(a: &FactorizeArgs) -> CliResult<Outcome> {
    let start = Instant::now();
    let d = load(&a.path)?;
    let b = build_bundle(&d, Tolerances::default())?;
    let center = Complex::new(a.center_re, a.center_im);
    let contour = CircleContour::new(center, a.radius)?;
    let opts = FactorOptions {
        cond_max: a.cond_max,
        fail_tol: a.tol,
        ..FactorOptions::default()
    };
    let f = factorize(&b, &contour, opts)?;

    let meta = |factor: &str, poles: &[usize], zeros: &[usize], description: &str| Metadata {
        seed: None,
        geometry: None,
        description: Some(description.to_string()),
        partition: Some(PartitionMeta {
            factor: factor.to_string(),
            center: [center.re, center.im],
            radius: a.radius,
            pole_indices: poles.to_vec(),
            zero_indices: zeros.to_vec(),
        }),
    };
    let p = &f.partition;
    InstanceFile::from_data(
        f.plus.data(),
        meta(
            "plus",
            &p.poles_plus,
            &p.zeros_plus,
            "Wiener-Hopf factor, singularities inside the circle",
        ),
    )
    .write(&a.out_plus)?;
    InstanceFile::from_data(
        f.minus.data(),
        meta(
            "minus",
            &p.poles_minus,
            &p.zeros_minus,
            "Wiener-Hopf factor, singularities outside the circle",
        ),
    )
    .write(&a.out_minus)?;

    let mut r = Report::new("factorize");
    r.fact("n_plus", p.n_plus());
    r.fact("n_minus", p.n_minus());
    r.fact(
        "existence",
        match f.existence.decision {
            Decision::Exists => "exists",
            Decision::Boundary => "boundary",
            Decision::NotExists => "not-exists",
        },
    );
    r.value("cond_Sr11", f.existence.cond);
    r.absorb("factorization", &f.report);
    finish(r, &a.report, start)
}

pub fn cauchy(a: &CauchyArgs) -> CliResult<Outcome> {
    let out = match a.op {
        CauchyOp::Matrix => format::matrix(&cauchy_matrix(&a.poles, &a.zeros)?),
        CauchyOp::Invert => format::matrix(&cauchy_inverse_formula(&a.poles, &a.zeros, Complex::new(1.0, 0.0))?),
        CauchyOp::Detsq => {
            let v = cauchy_det_squared(&a.poles, &a.zeros)?;
            format::matrix(&ComplexMatrix::from_fn(1, 1, |_, _| v))
        }
    };
    Ok(Outcome::ok(out))
}
