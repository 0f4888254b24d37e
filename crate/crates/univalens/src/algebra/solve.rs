//! Common zeros of pairs of bivariate polynomials over Q(i).
//!
//! Elimination by resultants plus certified univariate root extraction.
//! Solutions with coordinates outside Q(i) are returned as numeric
//! approximations in `unresolved` rather than guessed.

use super::bipoly::{self, BiPoly, Var};
use super::gaussrat::GaussRat;
use super::unipoly;
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct SystemSolutions {
    pub exact: Vec<(GaussRat, GaussRat)>,
    /// Numeric witnesses of solutions that failed exact certification.
    pub unresolved: Vec<(Complex64, Complex64)>,
}

/// Isolated common zeros of `p` and `q`.
///
/// Requires gcd(p, q) constant (no shared curve); callers dealing with
/// saturated foliation generators satisfy this by construction. A shared
/// component is reported through the `Err` value.
pub fn common_zeros(p: &BiPoly, q: &BiPoly) -> Result<SystemSolutions, BiPoly> {
    let mut out = SystemSolutions {
        exact: vec![],
        unresolved: vec![],
    };
    if p.is_zero() || q.is_zero() {
        let nz = if p.is_zero() { q } else { p };
        if nz.is_constant() {
            return Ok(out);
        }
        return Err(nz.clone());
    }
    if p.is_constant() || q.is_constant() {
        return Ok(out);
    }
    let g = bipoly::gcd(p, q);
    if !g.is_constant() {
        return Err(g);
    }
    // Eliminate y: roots of Res_y(p, q) are the x-coordinates.
    let rx = bipoly::resultant_in(p, q, Var::Y);
    if rx.is_zero() {
        // Can happen when both are y-free; then eliminate x instead.
        let ry = bipoly::resultant_in(p, q, Var::X);
        if ry.is_zero() {
            return Err(bipoly::gcd(p, q));
        }
        let roots_y = unipoly::roots(&ry);
        for (y0, _) in roots_y.exact {
            let pu = p.specialize(Var::Y, &y0);
            let qu = q.specialize(Var::Y, &y0);
            let g = pu.gcd(&qu);
            let rs = unipoly::roots(&g);
            for (x0, _) in rs.exact {
                out.exact.push((x0, y0.clone()));
            }
            for z in rs.unresolved {
                out.unresolved.push((z, y0.to_complex()));
            }
        }
        for y0 in roots_y.unresolved {
            out.unresolved.push((Complex64::new(f64::NAN, 0.0), y0));
        }
        return Ok(out);
    }
    let roots_x = unipoly::roots(&rx);
    for (x0, _) in roots_x.exact {
        let pu = p.specialize(Var::X, &x0);
        let qu = q.specialize(Var::X, &x0);
        // Either may be identically zero after specialization only if a
        // vertical line is shared, excluded by coprimality -- but one factor
        // may vanish; use the other.
        let g = if pu.is_zero() {
            qu
        } else if qu.is_zero() {
            pu
        } else {
            pu.gcd(&qu)
        };
        let rs = unipoly::roots(&g);
        for (y0, _) in rs.exact {
            out.exact.push((x0.clone(), y0));
        }
        for z in rs.unresolved {
            out.unresolved.push((x0.to_complex(), z));
        }
    }
    for x0 in roots_x.unresolved {
        // y-coordinate left unresolved as well; recorded for reporting.
        out.unresolved.push((x0, Complex64::new(f64::NAN, 0.0)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    #[test]
    fn simple_systems() {
        let p = parse_poly("2*x", ("x", "y")).unwrap();
        let q = parse_poly("-y", ("x", "y")).unwrap();
        let s = common_zeros(&p, &q).unwrap();
        assert_eq!(s.exact.len(), 1);
        assert_eq!(s.exact[0], (GaussRat::zero(), GaussRat::zero()));

        // Circle-like pair with Gaussian-rational intersections:
        // x^2 + y^2 - 2 and x - y meet at (1,1) and (-1,-1)
        let p = parse_poly("x^2 + y^2 - 2", ("x", "y")).unwrap();
        let q = parse_poly("x - y", ("x", "y")).unwrap();
        let s = common_zeros(&p, &q).unwrap();
        assert_eq!(s.exact.len(), 2);
        assert!(s.unresolved.is_empty());

        // Irrational intersections reported as unresolved: x^2 - 2 = 0
        let p = parse_poly("x^2 - 2", ("x", "y")).unwrap();
        let q = parse_poly("y", ("x", "y")).unwrap();
        let s = common_zeros(&p, &q).unwrap();
        assert!(s.exact.is_empty());
        assert_eq!(s.unresolved.len(), 2);
    }

    #[test]
    fn shared_component_detected() {
        let p = parse_poly("x*(x-y)", ("x", "y")).unwrap();
        let q = parse_poly("y*(x-y)", ("x", "y")).unwrap();
        assert!(common_zeros(&p, &q).is_err());
    }
}
