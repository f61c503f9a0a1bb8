use zpreal_core::chain::{random_instance, synthesize, Geometry, SynthesisInput};
use zpreal_core::linalg::det;
use zpreal_core::model::check_consistency;
use zpreal_core::wiener_hopf::{
    factorization_exists, factorize, leading_block, partition, CircleContour, Decision, FactorOptions, BOUNDARY_EPS,
    COND_MAX,
};
use zpreal_core::{Complex, ComplexMatrix, Error};

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// k = 2, n = 3 with two pole/zero pairs inside the unit circle; the first
/// zero `mu1` moves along the real axis.
fn family(mu1: f64) -> zpreal_core::realization::RealizationBundle {
    let f = ComplexMatrix::from_real_rows(&[&[1.0, 0.3, 0.6], &[0.5, -1.0, -0.8]]);
    let g = ComplexMatrix::from_real_rows(&[&[1.0, 0.2], &[0.4, 1.0], &[0.7, -0.5]]);
    let input = SynthesisInput::new(f, g, vec![c(0.2), c(-0.4), c(2.0)], vec![c(mu1), c(0.55), c(-2.5)]).unwrap();
    synthesize(&input).unwrap()
}

fn det11(mu1: f64) -> f64 {
    let b = family(mu1);
    let p = partition(b.data(), &CircleContour::unit(), BOUNDARY_EPS).unwrap();
    det(&leading_block(&b, &p)).unwrap().re
}

/// Root of `det S^r₁₁(mu1)` by bisection between two sign-opposite points.
fn critical_mu1() -> f64 {
    let (mut lo, mut hi) = (-0.35, -0.2);
    assert!(det11(lo).signum() != det11(hi).signum());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if det11(mid).signum() == det11(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn sweep_flips_existence() {
    let star = critical_mu1();
    let unit = CircleContour::unit();
    let mut seen = Vec::new();
    for step in 2..=24 {
        let offset = 10f64.powf(-(step as f64) / 2.0);
        let e = factorization_exists(&family(star + offset), &unit, COND_MAX).unwrap();
        seen.push(e.decision);
        if e.decision == Decision::Exists {
            let f = factorize(&family(star + offset), &unit, FactorOptions::default()).unwrap();
            assert!(
                f.report.get("product").unwrap().passed(),
                "offset {offset}: {}",
                f.report
            );
        }
    }
    assert_eq!(seen.first(), Some(&Decision::Exists));
    assert_eq!(seen.last(), Some(&Decision::NotExists));
    assert!(seen.contains(&Decision::Boundary));
    // monotone: once it leaves Exists it never returns
    let first_non = seen.iter().position(|d| *d != Decision::Exists).unwrap();
    assert!(seen[first_non..].iter().all(|d| *d != Decision::Exists));
    assert!(matches!(
        factorize(&family(star + 1e-11), &unit, FactorOptions::default()),
        Err(Error::NoFactorization { .. })
    ));
}

#[test]
fn balanced_instances_factor() {
    let unit = CircleContour::unit();
    for seed in 0..10u64 {
        let k = 1 + (seed as usize % 3);
        let n = 2 + (seed as usize % 4) * 2;
        let g = Geometry::Split {
            center: Complex::new(0.0, 0.0),
            radius: 1.0,
            inside: n / 2,
            margin: 0.15,
            outer: 2.5,
            min_sep: 0.08,
        };
        let b = random_instance(k, n, 100 + seed, &g).unwrap();
        let f = factorize(&b, &unit, FactorOptions::default()).unwrap();
        assert!(f.report.passed(), "seed {seed}: {}", f.report);
        for factor in [&f.plus, &f.minus] {
            assert!(factor.diagnostics().passed());
            assert!(check_consistency(factor.data(), 1e-8).passed());
        }
    }
}
