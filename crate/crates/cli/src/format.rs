//! Fixed-precision number printing for stable text output.

use zpreal_core::{Complex, ComplexMatrix};

pub const SIG_DIGITS: usize = 15;

/// Shortest decimal form of `x` rounded to 15 significant digits.
pub fn real(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x);
    // -0 prints as 0
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    let a = rounded.abs();
    if a != 0.0 && !(1e-5..1e15).contains(&a) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// `a + bi` / `a - bi`.
pub fn complex(z: Complex) -> String {
    let im = real(z.im);
    match im.strip_prefix('-') {
        Some(abs) => format!("{} - {abs}i", real(z.re)),
        None => format!("{} + {im}i", real(z.re)),
    }
}

/// One row per line, entries separated by `, `.
pub fn matrix(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|z| complex(*z)).collect();
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}

/// Residuals and tolerances in reports: three significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(real(0.5), "0.5");
        assert_eq!(real(0.49999999999999994), "0.5");
        assert_eq!(real(-0.0), "0");
        assert_eq!(real(2.0), "2");
        assert_eq!(real(1.0 / 3.0), "0.333333333333333");
        assert_eq!(real(1.5e-20), "1.5e-20");
        assert_eq!(real(-2.5e17), "-2.5e17");
    }

    #[test]
    fn complexes() {
        assert_eq!(complex(Complex::new(0.5, 0.0)), "0.5 + 0i");
        assert_eq!(complex(Complex::new(1.0, -0.25)), "1 - 0.25i");
        assert_eq!(complex(Complex::new(0.0, -0.0)), "0 + 0i");
    }

    #[test]
    fn matrices() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(matrix(&m), "1 + 0i, 0 + 0i\n0 + 0i, 1 + 0i\n");
    }
}
