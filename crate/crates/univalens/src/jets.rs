//! Local-analysis toolbox: truncated invariant-curve jets, exact linear
//! changes of coordinates, and branch data for normal-crossing tests.
//!
//! Separatrices of reduced singularities and integral curves at regular
//! points are transcendental in general; this crate follows them as graph
//! jets `y = s(x)` up to a fixed order and reports inconclusive beyond, so
//! every published verdict is backed by an exact finite computation.

use crate::algebra::bipoly::BiPoly;
use crate::algebra::gaussrat::GaussRat;
use crate::algebra::unipoly::UniPoly;
use crate::algebra::vf::{FoliationGen, Mat2};
use thiserror::Error;

/// Default jet order for tangency/containment tests.
pub const JET_ORDER: usize = 8;

/// Jet order for formal normal-form verification.
pub const NORMAL_FORM_ORDER: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("no graph jet in this direction (resonant or inconsistent at order {0})")]
    NoGraphJet(usize),
    #[error("singular linear transform")]
    SingularTransform,
}

fn trunc(p: &UniPoly, order: usize) -> UniPoly {
    UniPoly::new(
        p.coeffs
            .iter()
            .take(order + 1)
            .cloned()
            .collect::<Vec<_>>(),
    )
}

/// Evaluate `p(x, s(x))` truncated at the given order in x.
pub fn eval_along_graph(p: &BiPoly, s: &UniPoly, order: usize) -> UniPoly {
    let mut acc = UniPoly::zero();
    let mut spow: Vec<UniPoly> = vec![UniPoly::one()];
    for (&(i, j), c) in &p.terms {
        if (i as usize) > order {
            continue;
        }
        while spow.len() <= j as usize {
            let nxt = trunc(&spow.last().unwrap().mul(s), order);
            spow.push(nxt);
        }
        let term = trunc(
            &spow[j as usize].scale(c).mul(&UniPoly::monomial(GaussRat::one(), i as usize)),
            order,
        );
        acc = acc.add(&term);
    }
    trunc(&acc, order)
}

/// Evaluate `p(c(y), y)` truncated at the given order in y.
pub fn eval_along_graph_x(p: &BiPoly, c: &UniPoly, order: usize) -> UniPoly {
    let swapped = swap_vars(p);
    eval_along_graph(&swapped, c, order)
}

pub fn swap_vars(p: &BiPoly) -> BiPoly {
    BiPoly {
        terms: p.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
    }
}

/// Solve for an invariant graph `y = s(x)` of the foliation, with prescribed
/// slope at the origin, up to the given jet order.
///
/// The invariance residual is `Q(x, s) - P(x, s) s'(x)`; its order-k
/// coefficient is affine in the unknown k-th jet coefficient, so each order
/// is one exact linear solve.
pub fn graph_jet_y_of_x(
    fol: &FoliationGen,
    slope: &GaussRat,
    order: usize,
) -> Result<UniPoly, JetError> {
    let mut s = UniPoly::new(vec![GaussRat::zero(), slope.clone()]);
    for k in 2..=order {
        // The unknown c enters the residual first at order k (singular
        // point, P(0,0) = 0) or k-1 (regular point, via P * s'); locate the
        // sensitivity index by differencing.
        let res0 = residual_y_of_x(fol, &s, k);
        let s1 = s.add(&UniPoly::monomial(GaussRat::one(), k));
        let res1 = residual_y_of_x(fol, &s1, k);
        let diff = res1.sub(&res0);
        match diff.valuation_at_zero() {
            None => {
                if res0.valuation_at_zero().is_none() || res0.valuation_at_zero() >= Some(k) {
                    // Flat continuation consistent so far.
                    continue;
                }
                return Err(JetError::NoGraphJet(k));
            }
            Some(j0) => {
                // Lower orders must already be consistent.
                if res0.valuation_at_zero().map(|v| v < j0).unwrap_or(false) {
                    return Err(JetError::NoGraphJet(k));
                }
                let a = diff.coeff(j0);
                let b = res0.coeff(j0);
                let c = -&(&b / &a);
                if !c.is_zero() {
                    s = s.add(&UniPoly::monomial(c, k));
                }
            }
        }
    }
    Ok(s)
}

fn residual_y_of_x(fol: &FoliationGen, s: &UniPoly, order: usize) -> UniPoly {
    let q = eval_along_graph(&fol.q, s, order);
    let p = eval_along_graph(&fol.p, s, order);
    let ds = s.derivative();
    q.sub(&trunc(&p.mul(&ds), order))
}

/// Invariant graph `x = c(y)` with prescribed slope dx/dy at the origin.
pub fn graph_jet_x_of_y(
    fol: &FoliationGen,
    slope: &GaussRat,
    order: usize,
) -> Result<UniPoly, JetError> {
    let swapped = FoliationGen {
        p: swap_vars(&fol.q),
        q: swap_vars(&fol.p),
    };
    graph_jet_y_of_x(&swapped, slope, order)
}

/// Apply the exact linear change of coordinates `(x, y) = T (X, Y)` to a
/// foliation generator, returning the generator in the new coordinates.
pub fn transform_foliation(fol: &FoliationGen, t: &Mat2) -> Result<FoliationGen, JetError> {
    let det = &(&t[0][0] * &t[1][1]) - &(&t[0][1] * &t[1][0]);
    if det.is_zero() {
        return Err(JetError::SingularTransform);
    }
    let sx = BiPoly::x()
        .scale(&t[0][0])
        .add(&BiPoly::y().scale(&t[0][1]));
    let sy = BiPoly::x()
        .scale(&t[1][0])
        .add(&BiPoly::y().scale(&t[1][1]));
    let p_sub = fol.p.subst(&sx, &sy);
    let q_sub = fol.q.subst(&sx, &sy);
    // (P', Q')^T = T^{-1} (P, Q)^T evaluated in new coordinates.
    let inv_det = det.inv();
    let new_p = p_sub
        .scale(&(&t[1][1] * &inv_det))
        .sub(&q_sub.scale(&(&t[0][1] * &inv_det)));
    let new_q = q_sub
        .scale(&(&t[0][0] * &inv_det))
        .sub(&p_sub.scale(&(&t[1][0] * &inv_det)));
    Ok(FoliationGen { p: new_p, q: new_q })
}

/// Apply the same linear change to a scalar (multiplier) polynomial.
pub fn transform_scalar(p: &BiPoly, t: &Mat2) -> BiPoly {
    let sx = BiPoly::x()
        .scale(&t[0][0])
        .add(&BiPoly::y().scale(&t[0][1]));
    let sy = BiPoly::x()
        .scale(&t[1][0])
        .add(&BiPoly::y().scale(&t[1][1]));
    p.subst(&sx, &sy)
}

/// Order in the jet parameter of `h` restricted to the graph `y = s(x)`;
/// `None` means "vanishes to every tested order" (contained, up to the jet
/// bound).
pub fn vanishing_order_along(h: &BiPoly, s: &UniPoly, order: usize) -> Option<usize> {
    let restricted = eval_along_graph(h, s, order);
    restricted.valuation_at_zero()
}

/// Valuation of a rational multiplier along a graph jet, as an i64.
/// Errors with `None` if numerator or denominator vanish beyond the jet
/// order (containment; the valuation is then not jet-resolvable).
pub fn multiplier_valuation_along(
    num: &BiPoly,
    den: &BiPoly,
    s: &UniPoly,
    order: usize,
) -> Option<i64> {
    let vn = vanishing_order_along(num, s, order)? as i64;
    let vd = vanishing_order_along(den, s, order)? as i64;
    Some(vn - vd)
}

/// Tangent-line data of a curve germ at the origin.
#[derive(Clone, Debug, PartialEq)]
pub enum TangentCone {
    /// Multiplicity 1: a smooth branch with tangent direction (dx, dy).
    Smooth((GaussRat, GaussRat)),
    /// Multiplicity 2 with two distinct tangent lines: an ordinary node.
    Node,
    /// Multiplicity 2 with a double tangent line (cusp or tacnode).
    DoubleTangent((GaussRat, GaussRat)),
    /// Multiplicity >= 3: more than two branches or worse.
    Higher(u32),
    /// Does not pass through the origin.
    Missing,
}

/// Classify the tangent cone at the origin of a (squarefree) curve equation.
pub fn tangent_cone_at_origin(h: &BiPoly) -> TangentCone {
    if h.is_zero() {
        return TangentCone::Missing;
    }
    let m = match h.order_at_origin() {
        None => return TangentCone::Missing,
        Some(0) => return TangentCone::Missing,
        Some(m) => m,
    };
    let low = h.lowest_form();
    match m {
        1 => {
            // a x + b y: tangent direction (-b, a)... direction of the line
            // a x + b y = 0 is (b, -a) up to sign; either representative
            // works for comparisons through the line form itself.
            let a = low.terms.get(&(1, 0)).cloned().unwrap_or_else(GaussRat::zero);
            let b = low.terms.get(&(0, 1)).cloned().unwrap_or_else(GaussRat::zero);
            TangentCone::Smooth((b, -&a))
        }
        2 => {
            // Binary quadratic a x^2 + b x y + c y^2; distinct lines iff the
            // discriminant b^2 - 4 a c is nonzero.
            let a = low.terms.get(&(2, 0)).cloned().unwrap_or_else(GaussRat::zero);
            let b = low.terms.get(&(1, 1)).cloned().unwrap_or_else(GaussRat::zero);
            let c = low.terms.get(&(0, 2)).cloned().unwrap_or_else(GaussRat::zero);
            let disc = &(&b * &b) - &(&GaussRat::from_int(4) * &(&a * &c));
            if disc.is_zero() {
                // Double line a x^2 + b x y + c y^2 = (ux + vy)^2 up to unit.
                let dir = if !a.is_zero() {
                    // u = sqrt(a) direction: line u x + v y with v = b/(2u)
                    match a.sqrt_exact() {
                        Some(u) => {
                            let v = &b / &(&GaussRat::from_int(2) * &u);
                            (v, -&u)
                        }
                        None => (GaussRat::one(), GaussRat::zero()),
                    }
                } else {
                    // a = 0, disc = 0 => b = 0: line is y^2
                    (GaussRat::one(), GaussRat::zero())
                };
                TangentCone::DoubleTangent(dir)
            } else {
                TangentCone::Node
            }
        }
        m => TangentCone::Higher(m),
    }
}

/// Does the Q(i) direction (dx, dy) lie on the tangent cone of `h` at 0?
pub fn direction_on_cone(h: &BiPoly, dir: &(GaussRat, GaussRat)) -> bool {
    let low = h.lowest_form();
    low.eval(&dir.0, &dir.1).is_zero()
}
