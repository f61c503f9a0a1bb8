//! Helpers shared by unit tests.

use rand::Rng;

use crate::linalg::Complex;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Rejection-samples `count` points in the disk `|z| ≤ radius` with pairwise
/// separation at least `min_sep`.
pub fn random_separated_points(rng: &mut impl Rng, count: usize, radius: f64, min_sep: f64) -> Vec<Complex> {
    let mut pts: Vec<Complex> = Vec::with_capacity(count);
    while pts.len() < count {
        let z = c(rng.random_range(-radius..radius), rng.random_range(-radius..radius));
        if z.norm() <= radius && pts.iter().all(|p| (p - z).norm() >= min_sep) {
            pts.push(z);
        }
    }
    pts
}
