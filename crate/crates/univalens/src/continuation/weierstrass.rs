//! Weierstrass elliptic function evaluation from the invariants (g2, g3).
//!
//! The Laurent coefficients around 0 come from the classical recursion
//! c2 = g2/20, c3 = g3/28, c_k = 3/((2k+1)(k-3)) sum c_m c_{k-m}; arguments
//! are scaled into the series' comfort zone by halving and pushed back with
//! the duplication formulas, which are rational in (p, p').

use num_complex::Complex64;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Error)]
pub enum WpError {
    #[error("argument too close to a lattice point (|z| = {0:.3e})")]
    NearPole(f64),
    #[error("series did not reach the requested accuracy")]
    NoConvergence,
}

const MAX_SERIES_TERMS: usize = 96;

/// Evaluate p(z) and p'(z) for the invariants (g2, g3).
///
/// Truncation error of the series is bounded by twice the first omitted
/// term; the duplication steps are exact rational maps of the pair.
pub fn wp_and_prime(z: C, g2: C, g3: C) -> Result<(C, C), WpError> {
    if z.norm() < 1e-12 {
        return Err(WpError::NearPole(z.norm()));
    }
    // Dimensionless scale: lattice size ~ (invariant scale)^(-1/4 or -1/6).
    let scale = g2.norm().powf(0.25).max(g3.norm().powf(1.0 / 6.0)).max(1e-30);
    let target = 0.6 / scale.max(1e-30);
    let mut doublings = 0u32;
    let mut w = z;
    while w.norm() > target && doublings < 60 {
        w /= 2.0;
        doublings += 1;
    }
    let (mut p, mut dp) = series_eval(w, g2, g3)?;
    for _ in 0..doublings {
        let (pn, dpn) = duplicate(p, dp, g2);
        p = pn;
        dp = dpn;
        if !p.re.is_finite() || !dp.re.is_finite() {
            return Err(WpError::NearPole(z.norm()));
        }
    }
    Ok((p, dp))
}

fn series_eval(z: C, g2: C, g3: C) -> Result<(C, C), WpError> {
    // c_k for k >= 2; c[0], c[1] unused.
    let mut c = vec![C::new(0.0, 0.0); MAX_SERIES_TERMS + 1];
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for k in 4..=MAX_SERIES_TERMS {
        let mut s = C::new(0.0, 0.0);
        for m in 2..=(k - 2) {
            s += c[m] * c[k - m];
        }
        c[k] = s * (3.0 / ((2 * k + 1) as f64 * (k - 3) as f64));
    }
    let z2 = z * z;
    let mut p = 1.0 / z2;
    let mut dp = -2.0 / (z2 * z);
    let mut zpow = z2; // z^(2k-2) for k = 2
    // Coefficients vanish in runs when g2 = 0 or g3 = 0 (up to two zeros in
    // a row), so convergence requires three consecutive small terms.
    let mut recent = [f64::INFINITY; 3];
    for (k, ck) in c.iter().enumerate().take(MAX_SERIES_TERMS + 1).skip(2) {
        let term = ck * zpow;
        p += term;
        dp += ck * zpow / z * ((2 * k - 2) as f64);
        recent = [recent[1], recent[2], term.norm()];
        let thresh = 1e-18 * p.norm().max(1.0);
        if recent.iter().all(|&t| t < thresh) {
            return Ok((p, dp));
        }
        zpow *= z2;
    }
    if recent.iter().all(|&t| t < 1e-12 * p.norm().max(1.0)) {
        Ok((p, dp))
    } else {
        Err(WpError::NoConvergence)
    }
}

/// Duplication: p(2z) = -2 p + (p''/(2 p'))^2 and the derivative identity
/// p'(2z) = -p' + p''(12 p p'^2 - p''^2) / (4 p'^3), with p'' = 6p^2 - g2/2.
fn duplicate(p: C, dp: C, g2: C) -> (C, C) {
    let ddp = 6.0 * p * p - g2 / 2.0;
    let p2 = -2.0 * p + (ddp / (2.0 * dp)).powi(2);
    let dp2 = -dp + ddp * (12.0 * p * dp * dp - ddp * ddp) / (4.0 * dp * dp * dp);
    (p2, dp2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariant(z: C, g2: C, g3: C, tol: f64) {
        let (p, dp) = wp_and_prime(z, g2, g3).unwrap();
        let lhs = dp * dp;
        let rhs = 4.0 * p * p * p - g2 * p - g3;
        let rel = (lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm()));
        assert!(rel < tol, "invariant residual {:.3e} at z={}", rel, z);
    }

    #[test]
    fn satisfies_differential_equation() {
        let cases = [
            (C::new(0.0, 0.0), C::new(4.0, 0.0)),
            (C::new(4.0, 0.0), C::new(0.0, 0.0)),
            (C::new(1.0, 1.0), C::new(2.0, -1.0)),
        ];
        for (g2, g3) in cases {
            for &z in &[
                C::new(0.2, 0.0),
                C::new(0.2, 0.1),
                C::new(0.5, -0.3),
                C::new(1.1, 0.4),
                C::new(0.05, 0.02),
            ] {
                check_invariant(z, g2, g3, 1e-9);
            }
        }
    }

    #[test]
    fn even_oddness() {
        let g2 = C::new(0.0, 0.0);
        let g3 = C::new(4.0, 0.0);
        let z = C::new(0.31, 0.17);
        let (p1, dp1) = wp_and_prime(z, g2, g3).unwrap();
        let (p2, dp2) = wp_and_prime(-z, g2, g3).unwrap();
        assert!((p1 - p2).norm() < 1e-9 * p1.norm().max(1.0));
        assert!((dp1 + dp2).norm() < 1e-9 * dp1.norm().max(1.0));
    }

    #[test]
    fn laurent_leading_behavior() {
        // Near 0 the function behaves like 1/z^2.
        let g2 = C::new(4.0, 0.0);
        let g3 = C::new(0.0, 0.0);
        let z = C::new(1e-3, 0.0);
        let (p, _) = wp_and_prime(z, g2, g3).unwrap();
        let lead = 1.0 / (z * z);
        assert!((p - lead).norm() / lead.norm() < 1e-6);
    }
}
