//! Bundled example problems: Wittich's Riccati equation, the
//! four-maximal-solution field over an elliptic fibration, the E8 flow with
//! its Weierstrass solution, and the Briot-Bouquet family.

use crate::algebra::gaussrat::GaussRat;
use crate::algebra::parse::{parse_rational, parse_rational1, parse_vf};
use crate::algebra::rational::RationalFn1;
use crate::algebra::vf::RationalVF2;
use crate::continuation::weierstrass::wp_and_prime;
use crate::continuation::{FnField, LeafSpec, PathSpec, QuotientSpec, SampledCurve};
use crate::riccati::RiccatiEq;
use num_complex::Complex64;

type C = Complex64;

/// Wittich's equation w' = w^2 + (t^3+2)/(t(t^3-1)) w + (t^3-1)^2/t^4.
/// All its solutions are the single-valued family (t - 1/t^2) tan(t^2/2 +
/// 1/t + c), so the monodromy around every finite singular time is trivial.
pub fn wittich_equation() -> RiccatiEq {
    let a = parse_rational1("(t^3-1)^2/t^4", "t").unwrap();
    let b = parse_rational1("(t^3+2)/(t*(t^3-1))", "t").unwrap();
    let c = parse_rational1("1", "t").unwrap();
    RiccatiEq::new(a, b, c)
}

/// Loops around the finite singular times of Wittich's equation: t = 0 and
/// the three cube roots of unity.
pub fn wittich_loops() -> Vec<PathSpec> {
    let mut loops = vec![PathSpec::loop_around(C::new(0.0, 0.0), 0.4, 24)];
    for k in 0..3 {
        let th = 2.0 * std::f64::consts::PI * (k as f64) / 3.0;
        loops.push(PathSpec::loop_around(
            C::new(th.cos(), th.sin()),
            0.3,
            24,
        ));
    }
    loops
}

/// The Wittich solution (t, y(t)) with parameter `c`, as a curve tangent to
/// the autonomous field (1, R(t, y)).
pub struct WittichCurve {
    pub c: C,
}

impl SampledCurve for WittichCurve {
    fn dim(&self) -> usize {
        2
    }
    fn value_and_derivative(&self, t: C) -> Option<(Vec<C>, Vec<C>)> {
        if t.norm() < 1e-3 {
            return None;
        }
        let t2 = t * t;
        let amp = t - 1.0 / t2;
        let psi = t2 / 2.0 + 1.0 / t + self.c;
        let tanv = psi.tan();
        if !tanv.re.is_finite() || tanv.norm() > 1e6 {
            return None;
        }
        let y = amp * tanv;
        // y' = (1 + 2/t^3) tan(psi) + (t - 1/t^2)^2 (1 + tan^2 psi)
        let dy = (1.0 + 2.0 / (t2 * t)) * tanv + amp * amp * (1.0 + tanv * tanv);
        Some((vec![t, y], vec![C::new(1.0, 0.0), dy]))
    }
}

/// Wittich's equation as the autonomous planar field (1, R(t, y)).
pub fn wittich_field() -> FnField<impl Fn(&[C]) -> Option<Vec<C>>> {
    let eq = wittich_equation();
    let a = crate::riccati::compiled1(&eq.a);
    let b = crate::riccati::compiled1(&eq.b);
    let c = crate::riccati::compiled1(&eq.c);
    FnField {
        dim: 2,
        f: move |y: &[C]| -> Option<Vec<C>> {
            let t = y[0];
            let w = y[1];
            let av = a.eval(t)?;
            let bv = b.eval(t)?;
            let cv = c.eval(t)?;
            Some(vec![C::new(1.0, 0.0), av + bv * w + cv * w * w])
        },
    }
}

/// The field (1/(2x)) d/dx - (1/x^3) d/dy with first integral y - 2/x.
pub fn example4_field() -> RationalVF2 {
    parse_vf("(1/(2*x), -1/x^3)", ("x", "y")).unwrap()
}

/// Leaf y = c + 2/x of the four-maximal example, on the quotient of
/// C x (C/Lambda) by (x, y) -> (-x, -y), Lambda = Z + iZ.
pub fn example4_leaf(c: C, x0: C) -> LeafSpec {
    LeafSpec {
        start: (x0, c + 2.0 / x0),
        quotient: QuotientSpec::LatticeInY {
            periods: (C::new(1.0, 0.0), C::new(0.0, 1.0)),
            sign_involution: true,
        },
        first_integral: Some(parse_rational("y - 2/x", ("x", "y")).unwrap()),
    }
}

/// The generator loop of the leaf's fundamental group, seen in time: the
/// solution has x^2 = x0^2 + t, so the branch moment is t = -x0^2 and the
/// circle through 0 around it exchanges the two sheets.
pub fn example4_sheet_loop(x0: C) -> PathSpec {
    let center = -x0 * x0;
    let radius = (x0 * x0).norm();
    // Start the loop at t = 0 (on the circle) and close it.
    let mut pts = Vec::new();
    let sides = 48;
    for k in 0..=sides {
        let th = 2.0 * std::f64::consts::PI * (k as f64) / (sides as f64);
        let t = center + (C::new(0.0, 0.0) - center) * C::new(th.cos(), th.sin());
        pts.push((t.re, t.im));
    }
    let _ = radius;
    PathSpec {
        kind: crate::continuation::PathKind::Loop,
        waypoints: pts,
    }
}

/// The E8 flow (15x + 3y^2, 10y - 2x, 6z) on the singular surface
/// x^2 + y^3 + z^5 = 0.
pub fn e8_field() -> FnField<impl Fn(&[C]) -> Option<Vec<C>>> {
    FnField {
        dim: 3,
        f: |y: &[C]| -> Option<Vec<C>> {
            Some(vec![
                15.0 * y[0] + 3.0 * y[1] * y[1],
                10.0 * y[1] - 2.0 * y[0],
                6.0 * y[2],
            ])
        },
    }
}

/// The E8 maximal solution
/// ( e^{15t} p'(e^{5t}/5) / 2, -e^{10t} p(e^{5t}/5), e^{6t} )
/// with (p')^2 = 4 p^3 - 4.
pub struct E8Curve;

impl SampledCurve for E8Curve {
    fn dim(&self) -> usize {
        3
    }
    fn value_and_derivative(&self, t: C) -> Option<(Vec<C>, Vec<C>)> {
        let g2 = C::new(0.0, 0.0);
        let g3 = C::new(4.0, 0.0);
        let e5 = (5.0 * t).exp();
        let e10 = e5 * e5;
        let e15 = e10 * e5;
        let e6 = (6.0 * t).exp();
        let u = e5 / 5.0;
        let (p, dp) = wp_and_prime(u, g2, g3).ok()?;
        let ddp = 6.0 * p * p - g2 / 2.0;
        let x = e15 * dp / 2.0;
        let y = -e10 * p;
        let z = e6;
        // du/dt = e^{5t}
        let dx = 15.0 * x + e15 * ddp * e5 / 2.0;
        let dy = 10.0 * y - e10 * dp * e5;
        let dz = 6.0 * z;
        Some((vec![x, y, z], vec![dx, dy, dz]))
    }
}

/// The Briot-Bouquet field eta d/dzeta - Q(zeta) eta^2 d/deta for a
/// rational Q, as a two-dimensional closure field.
pub fn bb_field(q: &RationalFn1) -> FnField<impl Fn(&[C]) -> Option<Vec<C>>> {
    let qc = crate::riccati::compiled1(q);
    FnField {
        dim: 2,
        f: move |y: &[C]| -> Option<Vec<C>> {
            let qv = qc.eval(y[0])?;
            Some(vec![y[1], -qv * y[1] * y[1]])
        },
    }
}

/// Q giving the solution zeta = t^n: the defect coefficient of the time
/// chart t = zeta^(1/n), namely Q = (1/n - 1)/zeta.
pub fn bb_power_q(n: i64) -> RationalFn1 {
    let c = &(&GaussRat::one() / &GaussRat::from_int(n)) - &GaussRat::one();
    parse_rational1("1/t", "t").unwrap().scale(&c)
}

/// The constant printed for this family in the source text, (1 - n)/zeta;
/// kept for the documented discrepancy check (it fails the residual test by
/// a factor-n mismatch).
pub fn bb_power_q_misprint(n: i64) -> RationalFn1 {
    let c = &GaussRat::one() - &GaussRat::from_int(n);
    parse_rational1("1/t", "t").unwrap().scale(&c)
}

/// Q giving the Weierstrass solution p(t) with (p')^2 = S(p),
/// S = 4 zeta^3 - g2 zeta - g3: the time chart is the elliptic integral,
/// whose defect coefficient is Q = -S'/(2 S).
pub fn bb_weierstrass_q(g2: (i64, i64), g3: (i64, i64)) -> RationalFn1 {
    let s = s_poly(g2, g3);
    let ds = s.derivative();
    ds.div(&s).scale(&GaussRat::from_frac(-1, 2))
}

/// The misprinted variant -S'/S (fails by a factor-2 mismatch).
pub fn bb_weierstrass_q_misprint(g2: (i64, i64), g3: (i64, i64)) -> RationalFn1 {
    let s = s_poly(g2, g3);
    let ds = s.derivative();
    ds.div(&s).neg()
}

fn s_poly(g2: (i64, i64), g3: (i64, i64)) -> RationalFn1 {
    use crate::algebra::unipoly::UniPoly;
    let t = UniPoly::var();
    let t3 = t.mul(&t).mul(&t);
    let s = t3
        .scale(&GaussRat::from_int(4))
        .sub(&t.scale(&GaussRat::from_frac(g2.0, g2.1)))
        .sub(&UniPoly::constant(GaussRat::from_frac(g3.0, g3.1)));
    RationalFn1::from_poly(s)
}

/// The power solution zeta = t^n as a phase curve (zeta, zeta').
pub struct PowerCurve {
    pub n: i64,
}

impl SampledCurve for PowerCurve {
    fn dim(&self) -> usize {
        2
    }
    fn value_and_derivative(&self, t: C) -> Option<(Vec<C>, Vec<C>)> {
        if t.norm() < 1e-6 {
            return None;
        }
        let n = self.n as f64;
        let zeta = t.powf(self.n as f64);
        let dzeta = n * t.powf(n - 1.0);
        let ddzeta = n * (n - 1.0) * t.powf(n - 2.0);
        Some((vec![zeta, dzeta], vec![dzeta, ddzeta]))
    }
}

/// The Weierstrass solution (p(t), p'(t)) as a phase curve.
pub struct WeierstrassPhaseCurve {
    pub g2: C,
    pub g3: C,
}

impl SampledCurve for WeierstrassPhaseCurve {
    fn dim(&self) -> usize {
        2
    }
    fn value_and_derivative(&self, t: C) -> Option<(Vec<C>, Vec<C>)> {
        let (p, dp) = wp_and_prime(t, self.g2, self.g3).ok()?;
        let ddp = 6.0 * p * p - self.g2 / 2.0;
        Some((vec![p, dp], vec![dp, ddp]))
    }
}

/// Sample times on a ring, avoiding the origin and staying inside the
/// first lattice cell for the Weierstrass cases.
pub fn ring_samples(n: usize, r_min: f64, r_max: f64) -> Vec<C> {
    (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.37;
            let r = r_min + (r_max - r_min) * (k as f64) / (n.max(2) as f64 - 1.0);
            C::new(r * th.cos(), r * th.sin())
        })
        .collect()
}

/// The cusp field 2y d/dx + 3x^2 d/dy whose reduction takes three blow-ups.
pub fn cusp_field() -> RationalVF2 {
    parse_vf("(2*y, 3*x^2)", ("x", "y")).unwrap()
}

/// Ten fields whose single blow-up at the origin is non-dicritical with all
/// exceptional singularities classifiable; the Camacho-Sad contributions
/// along the exceptional divisor sum to -1 for each.
pub fn cs_corpus() -> Vec<RationalVF2> {
    [
        "(y, -x)",
        "(x, -y)",
        "(x, -2*y)",
        "(x, -3*y)",
        "(x, -5*y)",
        "(2*x, -3*y)",
        "(3*x, -2*y)",
        "(x, i*y)",
        "(x, (-1+i)*y)",
        "(x + y, -y)",
    ]
    .iter()
    .map(|s| parse_vf(s, ("x", "y")).unwrap())
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::verify_solution;

    #[test]
    fn wittich_solution_solves_equation() {
        let field = wittich_field();
        let curve = WittichCurve {
            c: C::new(0.3, 0.1),
        };
        let times = ring_samples(12, 1.6, 2.4);
        let rep = verify_solution(&curve, &field, &times, 1e-8);
        assert!(rep.samples_checked >= 8);
        assert!(rep.pass, "max residual {:.3e}", rep.max_residual);
    }

    #[test]
    fn e8_solution_residual() {
        let field = e8_field();
        let times = ring_samples(20, 0.05, 0.2);
        let rep = verify_solution(&E8Curve, &field, &times, 1e-8);
        assert_eq!(rep.samples_checked, 20);
        assert!(rep.pass, "max residual {:.3e}", rep.max_residual);
    }

    #[test]
    fn bb_power_solution_residual() {
        for n in [2i64, 3, 5] {
            let q = bb_power_q(n);
            let field = bb_field(&q);
            let times = ring_samples(16, 0.5, 1.5);
            let rep = verify_solution(&PowerCurve { n }, &field, &times, 1e-10);
            assert!(rep.pass, "n = {}: max residual {:.3e}", n, rep.max_residual);
            // The misprinted constant fails by a factor-n mismatch.
            let qm = bb_power_q_misprint(n);
            let fm = bb_field(&qm);
            let rm = verify_solution(&PowerCurve { n }, &fm, &times, 1e-10);
            assert!(
                rm.max_residual > 1e-3,
                "misprint unexpectedly close for n = {}",
                n
            );
        }
    }

    #[test]
    fn bb_weierstrass_solution_residual() {
        for (g2, g3) in [((4i64, 1i64), (0i64, 1i64)), ((0, 1), (4, 1))] {
            let q = bb_weierstrass_q(g2, g3);
            let field = bb_field(&q);
            let times = ring_samples(16, 0.25, 0.7);
            let curve = WeierstrassPhaseCurve {
                g2: C::new(g2.0 as f64 / g2.1 as f64, 0.0),
                g3: C::new(g3.0 as f64 / g3.1 as f64, 0.0),
            };
            let rep = verify_solution(&curve, &field, &times, 1e-8);
            assert!(
                rep.pass,
                "(g2,g3)=({:?},{:?}): max residual {:.3e}",
                g2, g3, rep.max_residual
            );
            let qm = bb_weierstrass_q_misprint(g2, g3);
            let fm = bb_field(&qm);
            let rm = verify_solution(&curve, &fm, &times, 1e-8);
            assert!(rm.max_residual > 1e-3);
        }
    }

    #[test]
    fn example4_determinations() {
        use crate::continuation::{count_determinations, CountValue};
        let vf = example4_field();
        let x0 = C::new(1.0, 0.0);
        let loops = vec![example4_sheet_loop(x0)];
        // Generic leaf: two determinations.
        let leaf = example4_leaf(C::new(0.31, 0.17), x0);
        let dc = count_determinations(&leaf, &vf, &loops, 1e-10).unwrap();
        assert_eq!(dc.count, CountValue::Finite(2));
        // The four special leaves c in (1/2) Lambda: single-valued.
        for c in [
            C::new(0.0, 0.0),
            C::new(0.5, 0.0),
            C::new(0.0, 0.5),
            C::new(0.5, 0.5),
        ] {
            let leaf = example4_leaf(c, x0);
            let dc = count_determinations(&leaf, &vf, &loops, 1e-10).unwrap();
            assert_eq!(dc.count, CountValue::Finite(1), "leaf c = {}", c);
        }
    }
}
