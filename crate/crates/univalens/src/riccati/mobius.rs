//! Mobius transformations, exact and numeric, with fixed-point machinery.
//!
//! A Mobius map fixes the roots of the binary quadratic c z^2 + (d-a) z w
//! - b w^2 on P^1; a nonzero binary quadratic has at most two roots, so
//! three common fixed points force every form to vanish identically, i.e.
//! every map to be a scalar matrix. That threshold drives the maximality
//! census.

use crate::algebra::gaussrat::GaussRat;
use num_complex::Complex64;

type C = Complex64;

/// Exact Mobius transformation over Q(i), as a 2x2 matrix mod scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusExact {
    pub m: [[GaussRat; 2]; 2],
}

/// A point of P^1 with exact coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum P1Exact {
    Finite(GaussRat),
    Infinity,
}

/// The fixed locus of a family of exact Mobius maps.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedLocus {
    /// Every map is scalar: all of P^1 is fixed.
    Whole,
    /// At most two points, counted without multiplicity. Points in Q(i) are
    /// listed; a conjugate quadratic pair outside Q(i) is reported by count.
    Points {
        count: usize,
        known: Vec<P1Exact>,
    },
}

impl MobiusExact {
    pub fn new(m: [[GaussRat; 2]; 2]) -> Self {
        let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        assert!(!det.is_zero(), "singular Mobius matrix");
        MobiusExact { m }
    }

    pub fn identity() -> Self {
        MobiusExact::new([
            [GaussRat::one(), GaussRat::zero()],
            [GaussRat::zero(), GaussRat::one()],
        ])
    }

    pub fn is_scalar(&self) -> bool {
        self.m[0][1].is_zero() && self.m[1][0].is_zero() && self.m[0][0] == self.m[1][1]
    }

    pub fn compose(&self, rhs: &MobiusExact) -> MobiusExact {
        let a = &self.m;
        let b = &rhs.m;
        MobiusExact::new([
            [
                &(&a[0][0] * &b[0][0]) + &(&a[0][1] * &b[1][0]),
                &(&a[0][0] * &b[0][1]) + &(&a[0][1] * &b[1][1]),
            ],
            [
                &(&a[1][0] * &b[0][0]) + &(&a[1][1] * &b[1][0]),
                &(&a[1][0] * &b[0][1]) + &(&a[1][1] * &b[1][1]),
            ],
        ])
    }

    pub fn inverse(&self) -> MobiusExact {
        let a = &self.m;
        MobiusExact::new([
            [a[1][1].clone(), -&a[0][1]],
            [-&a[1][0], a[0][0].clone()],
        ])
    }

    pub fn apply(&self, p: &P1Exact) -> P1Exact {
        let a = &self.m;
        let (z, w) = match p {
            P1Exact::Finite(z) => (z.clone(), GaussRat::one()),
            P1Exact::Infinity => (GaussRat::one(), GaussRat::zero()),
        };
        let nz = &(&a[0][0] * &z) + &(&a[0][1] * &w);
        let nw = &(&a[1][0] * &z) + &(&a[1][1] * &w);
        if nw.is_zero() {
            P1Exact::Infinity
        } else {
            P1Exact::Finite(&nz / &nw)
        }
    }

    /// Coefficients (alpha, beta, gamma) of the fixed-point binary quadratic
    /// alpha z^2 + beta z w + gamma w^2, namely (c, d - a, -b). The form is
    /// identically zero exactly for scalar matrices.
    pub fn fixed_point_form(&self) -> (GaussRat, GaussRat, GaussRat) {
        let a = &self.m;
        (
            a[1][0].clone(),
            &a[1][1] - &a[0][0],
            -&a[0][1],
        )
    }

    /// Exact fixed locus of this single map.
    pub fn fixed_locus(&self) -> FixedLocus {
        common_fixed_locus(std::slice::from_ref(self))
    }

    pub fn to_numeric(&self) -> MobiusNum {
        MobiusNum {
            m: [
                [self.m[0][0].to_complex(), self.m[0][1].to_complex()],
                [self.m[1][0].to_complex(), self.m[1][1].to_complex()],
            ],
        }
    }
}

/// Binary quadratic form (alpha, beta, gamma) utilities: roots on P^1.
fn form_is_zero(f: &(GaussRat, GaussRat, GaussRat)) -> bool {
    f.0.is_zero() && f.1.is_zero() && f.2.is_zero()
}

/// Gcd of binary forms of degree <= 2, tracked as (dehomogenized UniPoly,
/// multiplicity of the root at infinity).
fn form_gcd(
    acc: (crate::algebra::unipoly::UniPoly, usize),
    f: &(GaussRat, GaussRat, GaussRat),
) -> (crate::algebra::unipoly::UniPoly, usize) {
    use crate::algebra::unipoly::UniPoly;
    let poly = UniPoly::new(vec![f.2.clone(), f.1.clone(), f.0.clone()]);
    // Infinity multiplicity of the form: 2 - (degree in z) = leading zeros.
    let inf_mult = if f.0.is_zero() {
        if f.1.is_zero() {
            2
        } else {
            1
        }
    } else {
        0
    };
    let g = acc.0.gcd(&poly);
    (g, acc.1.min(inf_mult))
}

/// Common fixed locus of a family of exact Mobius maps.
pub fn common_fixed_locus(maps: &[MobiusExact]) -> FixedLocus {
    use crate::algebra::unipoly::{roots, UniPoly};
    let forms: Vec<_> = maps
        .iter()
        .map(|m| m.fixed_point_form())
        .filter(|f| !form_is_zero(f))
        .collect();
    if forms.is_empty() {
        return FixedLocus::Whole;
    }
    let mut acc = {
        let f = &forms[0];
        let poly = UniPoly::new(vec![f.2.clone(), f.1.clone(), f.0.clone()]);
        let inf = if f.0.is_zero() {
            if f.1.is_zero() {
                2
            } else {
                1
            }
        } else {
            0
        };
        (poly, inf)
    };
    for f in &forms[1..] {
        acc = form_gcd(acc, f);
    }
    let (g, inf_mult) = acc;
    let mut known = Vec::new();
    let mut count = 0usize;
    if inf_mult > 0 {
        known.push(P1Exact::Infinity);
        count += 1;
    }
    match g.degree() {
        None | Some(0) => {}
        Some(_) => {
            let rs = roots(&g.squarefree_part());
            let exact_n = rs.exact.len();
            for (r, _) in rs.exact {
                known.push(P1Exact::Finite(r));
            }
            // Unresolved roots of the squarefree gcd still count as common
            // fixed points (a conjugate quadratic pair).
            count += exact_n + rs.unresolved.len();
        }
    }
    FixedLocus::Points { count, known }
}

/// Numeric Mobius transformation.
#[derive(Clone, Copy, Debug)]
pub struct MobiusNum {
    pub m: [[C; 2]; 2],
}

/// A point of P^1 with floating coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum P1Num {
    Finite(C),
    Infinity,
}

impl P1Num {
    pub fn dist(&self, other: &P1Num) -> f64 {
        // Chordal metric on P^1.
        let lift = |p: &P1Num| -> (C, C) {
            match p {
                P1Num::Finite(z) => {
                    let n = (1.0 + z.norm_sqr()).sqrt();
                    (z / n, C::new(1.0 / n, 0.0))
                }
                P1Num::Infinity => (C::new(1.0, 0.0), C::new(0.0, 0.0)),
            }
        };
        let (a1, b1) = lift(self);
        let (a2, b2) = lift(other);
        (a1 * b2 - a2 * b1).norm()
    }
}

impl MobiusNum {
    pub fn identity() -> Self {
        MobiusNum {
            m: [
                [C::new(1.0, 0.0), C::new(0.0, 0.0)],
                [C::new(0.0, 0.0), C::new(1.0, 0.0)],
            ],
        }
    }

    pub fn det(&self) -> C {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Normalize to determinant one; the sign of the square root leaves the
    /// usual +-M ambiguity, which callers must treat symmetrically.
    pub fn det_normalized(&self) -> MobiusNum {
        let d = self.det().sqrt();
        MobiusNum {
            m: [
                [self.m[0][0] / d, self.m[0][1] / d],
                [self.m[1][0] / d, self.m[1][1] / d],
            ],
        }
    }

    pub fn compose(&self, rhs: &MobiusNum) -> MobiusNum {
        let a = &self.m;
        let b = &rhs.m;
        MobiusNum {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn inverse(&self) -> MobiusNum {
        let d = self.det();
        MobiusNum {
            m: [
                [self.m[1][1] / d, -self.m[0][1] / d],
                [-self.m[1][0] / d, self.m[0][0] / d],
            ],
        }
    }

    pub fn powi(&self, e: i64) -> MobiusNum {
        let base = if e >= 0 { *self } else { self.inverse() };
        let mut acc = MobiusNum::identity();
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    pub fn apply(&self, p: P1Num) -> P1Num {
        let (z, w) = match p {
            P1Num::Finite(z) => (z, C::new(1.0, 0.0)),
            P1Num::Infinity => (C::new(1.0, 0.0), C::new(0.0, 0.0)),
        };
        let nz = self.m[0][0] * z + self.m[0][1] * w;
        let nw = self.m[1][0] * z + self.m[1][1] * w;
        if nw.norm() <= 1e-14 * nz.norm() {
            P1Num::Infinity
        } else {
            P1Num::Finite(nz / nw)
        }
    }

    /// Distance to the identity in PSL(2, C) (minimum over both lifts),
    /// assuming determinant-normalized input.
    pub fn psl_distance_to_identity(&self) -> f64 {
        let mut dplus: f64 = 0.0;
        let mut dminus: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                dplus = dplus.max((self.m[i][j] - id).norm());
                dminus = dminus.max((self.m[i][j] + id).norm());
            }
        }
        dplus.min(dminus)
    }

    /// Fixed points on P^1: roots of c z^2 + (d - a) z - b.
    pub fn fixed_points(&self) -> Vec<P1Num> {
        let a = self.m[0][0];
        let b = self.m[0][1];
        let c = self.m[1][0];
        let d = self.m[1][1];
        let scale = a.norm() + b.norm() + c.norm() + d.norm();
        let alpha = c;
        let beta = d - a;
        let gamma = -b;
        let eps = 1e-12 * scale;
        if alpha.norm() <= eps {
            // Infinity is fixed.
            if beta.norm() <= eps {
                if gamma.norm() <= eps {
                    // Identity-like: callers should have handled this.
                    return vec![P1Num::Infinity];
                }
                return vec![P1Num::Infinity];
            }
            return vec![P1Num::Infinity, P1Num::Finite(-gamma / beta)];
        }
        let disc = beta * beta - 4.0 * alpha * gamma;
        let s = disc.sqrt();
        let r1 = (-beta + s) / (2.0 * alpha);
        let r2 = (-beta - s) / (2.0 * alpha);
        vec![P1Num::Finite(r1), P1Num::Finite(r2)]
    }
}

/// The Mobius map carrying (z1, z2, z3) to (w1, w2, w3), via the standard
/// map-to-(0, 1, infinity) construction.
pub fn mobius_from_three_points(zs: [P1Num; 3], ws: [P1Num; 3]) -> MobiusNum {
    let to_standard = |p: [P1Num; 3]| -> MobiusNum {
        // Sends p[0] -> 0, p[1] -> 1, p[2] -> infinity.
        let f = |x: P1Num| match x {
            P1Num::Finite(z) => (z, C::new(1.0, 0.0)),
            P1Num::Infinity => (C::new(1.0, 0.0), C::new(0.0, 0.0)),
        };
        let (z1, o1) = f(p[0]);
        let (z2, o2) = f(p[1]);
        let (z3, o3) = f(p[2]);
        // Homogeneous-safe construction through cross differences.
        let d21 = z2 * o1 - z1 * o2;
        let d23 = z2 * o3 - z3 * o2;
        MobiusNum {
            m: [
                [o1 * d23, -z1 * d23],
                [o3 * d21, -z3 * d21],
            ],
        }
    };
    let mz = to_standard(zs);
    let mw = to_standard(ws);
    mw.inverse().compose(&mz)
}
