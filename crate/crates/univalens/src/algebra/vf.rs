//! Planar vector fields with exact rational coefficients.

use super::bipoly::{self, AlgebraError, BiPoly, Var};
use super::gaussrat::GaussRat;
use super::rational::RationalFn2;
use num_rational::BigRational;
use serde::Serialize;

/// A vector field `px d/dx + py d/dy` with Gaussian-rational coefficients.
/// At least one component is nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalVF2 {
    pub px: RationalFn2,
    pub py: RationalFn2,
}

/// One irreducible component of the zero/pole divisor.
#[derive(Clone, Debug)]
pub struct DivisorComponent {
    pub curve: BiPoly,
    /// Positive on the zero divisor, negative on the pole divisor.
    pub multiplicity: i64,
}

/// Exact classification of an eigenvalue ratio of a 2x2 matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EigenRatioClass {
    BothZero,
    OneZeroNonNilpotent,
    Nilpotent,
    RatioPositiveRational(#[serde(serialize_with = "crate::report::ser_rational")] BigRational),
    RatioNegativeRational(#[serde(serialize_with = "crate::report::ser_rational")] BigRational),
    RatioIrrationalOrComplex,
}

impl EigenRatioClass {
    /// Seidenberg-reduced singularity classes: two nonzero eigenvalues with
    /// ratio outside Q+, or one zero eigenvalue with non-nilpotent linear
    /// part.
    pub fn is_reduced(&self) -> bool {
        matches!(
            self,
            EigenRatioClass::OneZeroNonNilpotent
                | EigenRatioClass::RatioNegativeRational(_)
                | EigenRatioClass::RatioIrrationalOrComplex
        )
    }
}

pub type Mat2 = [[GaussRat; 2]; 2];

impl RationalVF2 {
    pub fn new(px: RationalFn2, py: RationalFn2) -> Self {
        assert!(
            !(px.is_zero() && py.is_zero()),
            "vector field identically zero"
        );
        RationalVF2 { px, py }
    }

    pub fn from_polys(px: BiPoly, py: BiPoly) -> Self {
        Self::new(RationalFn2::from_poly(px), RationalFn2::from_poly(py))
    }

    pub fn scale(&self, f: &RationalFn2) -> Self {
        RationalVF2 {
            px: self.px.mul(f),
            py: self.py.mul(f),
        }
    }

    pub fn shift(&self, a: &GaussRat, b: &GaussRat) -> Self {
        RationalVF2 {
            px: self.px.shift(a, b),
            py: self.py.shift(a, b),
        }
    }

    /// Split off the rational multiplier: X = f * F where F is a polynomial
    /// vector field with coprime components (the saturated foliation
    /// generator) and f carries the full zero/pole divisor.
    pub fn multiplier_and_foliation(&self) -> (RationalFn2, FoliationGen) {
        let n1 = self.px.num().clone();
        let d1 = self.px.den().clone();
        let n2 = self.py.num().clone();
        let d2 = self.py.den().clone();
        // Common denominator: X = (n1 d2, n2 d1) / (d1 d2)
        let a = n1.mul(&d2);
        let b = n2.mul(&d1);
        let g = if a.is_zero() {
            b.clone()
        } else if b.is_zero() {
            a.clone()
        } else {
            bipoly::gcd(&a, &b)
        };
        let g = g.normalized();
        let p = if a.is_zero() {
            BiPoly::zero()
        } else {
            a.div_exact(&g).expect("gcd divides")
        };
        let q = if b.is_zero() {
            BiPoly::zero()
        } else {
            b.div_exact(&g).expect("gcd divides")
        };
        let f = RationalFn2::new(g, d1.mul(&d2));
        (f, FoliationGen { p, q })
    }

    /// The reduced (squarefree) equation of the zero/pole divisor.
    pub fn divisor_equation(&self) -> BiPoly {
        let (f, _) = self.multiplier_and_foliation();
        let zeros = bipoly::squarefree_part(f.num());
        let poles = bipoly::squarefree_part(f.den());
        let prod = zeros.mul(&poles);
        bipoly::squarefree_part(&prod)
    }

    /// Order of vanishing of the vector field along an irreducible curve:
    /// the minimum of the curve-adic valuations of the two components.
    pub fn order_along(&self, curve: &BiPoly) -> Result<i64, AlgebraError> {
        if curve.is_zero() {
            return Err(AlgebraError::ZeroInput("curve"));
        }
        if !bipoly::is_irreducible(curve)? {
            return Err(AlgebraError::NotIrreducible);
        }
        let vx = self.px.valuation_along(curve);
        let vy = self.py.valuation_along(curve);
        match (vx, vy) {
            (Some(a), Some(b)) => Ok(a.min(b)),
            (Some(a), None) => Ok(a),
            (None, Some(b)) => Ok(b),
            (None, None) => unreachable!("vector field nonzero"),
        }
    }

    /// Exact Jacobian of (px, py) at a point where the field is holomorphic.
    pub fn linear_part(&self, point: (&GaussRat, &GaussRat)) -> Result<Mat2, AlgebraError> {
        let (x, y) = point;
        for c in [&self.px, &self.py] {
            if c.den().eval(x, y).is_zero() {
                return Err(AlgebraError::PoleAtPoint);
            }
        }
        Ok([
            [
                self.px.derivative(Var::X).eval(x, y)?,
                self.px.derivative(Var::Y).eval(x, y)?,
            ],
            [
                self.py.derivative(Var::X).eval(x, y)?,
                self.py.derivative(Var::Y).eval(x, y)?,
            ],
        ])
    }

    pub fn eval(&self, x: &GaussRat, y: &GaussRat) -> Result<(GaussRat, GaussRat), AlgebraError> {
        Ok((self.px.eval(x, y)?, self.py.eval(x, y)?))
    }
}

impl std::fmt::Debug for RationalVF2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:?}] d/dx + [{:?}] d/dy", self.px, self.py)
    }
}

/// Saturated polynomial generator of the induced foliation.
#[derive(Clone, PartialEq, Eq)]
pub struct FoliationGen {
    pub p: BiPoly,
    pub q: BiPoly,
}

impl FoliationGen {
    pub fn is_singular_at(&self, x: &GaussRat, y: &GaussRat) -> bool {
        self.p.eval(x, y).is_zero() && self.q.eval(x, y).is_zero()
    }

    pub fn linear_part_at(&self, x: &GaussRat, y: &GaussRat) -> Mat2 {
        [
            [
                self.p.derivative(Var::X).eval(x, y),
                self.p.derivative(Var::Y).eval(x, y),
            ],
            [
                self.q.derivative(Var::X).eval(x, y),
                self.q.derivative(Var::Y).eval(x, y),
            ],
        ]
    }

    pub fn shift(&self, a: &GaussRat, b: &GaussRat) -> FoliationGen {
        FoliationGen {
            p: self.p.shift(a, b),
            q: self.q.shift(a, b),
        }
    }

    pub fn as_vf(&self) -> RationalVF2 {
        RationalVF2::from_polys(self.p.clone(), self.q.clone())
    }

    /// Derivative of a function along the foliation: p h_x + q h_y.
    pub fn lie(&self, h: &BiPoly) -> BiPoly {
        self.p
            .mul(&h.derivative(Var::X))
            .add(&self.q.mul(&h.derivative(Var::Y)))
    }

    /// Is the curve invariant? Exact ideal-membership test X(h) in (h).
    pub fn leaves_invariant(&self, h: &BiPoly) -> bool {
        let lie = self.lie(h);
        if lie.is_zero() {
            return true;
        }
        let hs = bipoly::squarefree_part(h);
        // For squarefree h, invariance of the curve {h=0} is h | X(h) after
        // reducing multiple factors.
        let lie_s = FoliationGen {
            p: self.p.clone(),
            q: self.q.clone(),
        }
        .lie(&hs);
        lie_s.is_zero() || lie_s.div_exact(&hs).is_some()
    }
}

pub fn mat2_trace(m: &Mat2) -> GaussRat {
    &m[0][0] + &m[1][1]
}

pub fn mat2_det(m: &Mat2) -> GaussRat {
    &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
}

pub fn mat2_is_zero(m: &Mat2) -> bool {
    m.iter().all(|row| row.iter().all(|c| c.is_zero()))
}

/// Exact eigenvalues when they lie in Q(i).
pub fn eigenvalues_exact(m: &Mat2) -> Option<(GaussRat, GaussRat)> {
    let t = mat2_trace(m);
    let d = mat2_det(m);
    let disc = &(&t * &t) - &(&GaussRat::from_int(4) * &d);
    let s = disc.sqrt_exact()?;
    let two = GaussRat::from_int(2);
    Some(((&(&t + &s)) / &two, (&(&t - &s)) / &two))
}

/// Eigenvector direction for an eigenvalue of a 2x2 matrix (not scalar).
pub fn eigenvector(m: &Mat2, lambda: &GaussRat) -> (GaussRat, GaussRat) {
    // Rows of (M - lambda I) annihilate the eigenvector.
    let a = &m[0][0] - lambda;
    let b = m[0][1].clone();
    let c = m[1][0].clone();
    let d = &m[1][1] - lambda;
    if !a.is_zero() || !b.is_zero() {
        (-&b, a)
    } else if !c.is_zero() || !d.is_zero() {
        (-&d, c)
    } else {
        (GaussRat::one(), GaussRat::zero())
    }
}

/// Exact classification of the eigenvalue ratio of a 2x2 matrix over Q(i).
///
/// When both eigenvalues are nonzero and the ratio lies in Q, the reported
/// value is lambda_y / lambda_x whenever the eigendirections can be tied to
/// the coordinate axes, so diagonal matrices report the ratio "second over
/// first".
pub fn eigen_ratio_class(m: &Mat2) -> EigenRatioClass {
    if mat2_is_zero(m) {
        return EigenRatioClass::BothZero;
    }
    let t = mat2_trace(m);
    let d = mat2_det(m);
    if d.is_zero() {
        if t.is_zero() {
            return EigenRatioClass::Nilpotent;
        }
        return EigenRatioClass::OneZeroNonNilpotent;
    }
    // r + 1/r = t^2/d - 2; r rational iff t^2/d in Q and s(s-4) a square in Q
    // for s = t^2/d.
    let s = &(&t * &t) / &d;
    if !s.is_rational() {
        return EigenRatioClass::RatioIrrationalOrComplex;
    }
    let four = GaussRat::from_int(4);
    let disc = &s * &(&s - &four);
    let sq = match disc.sqrt_exact() {
        None => return EigenRatioClass::RatioIrrationalOrComplex,
        Some(v) => v,
    };
    if !sq.is_rational() {
        // s(s-4) < 0: complex-conjugate ratio (not real).
        return EigenRatioClass::RatioIrrationalOrComplex;
    }
    let two = GaussRat::from_int(2);
    let r1 = &(&(&s - &two) + &sq) / &two;
    let r2 = &(&(&s - &two) - &sq) / &two;
    // Both roots are rational and reciprocal; choose lambda_y / lambda_x by
    // eigendirection when the eigenvalues themselves are exact.
    let ratio = match eigenvalues_exact(m) {
        Some((l1, l2)) if l1 != l2 => {
            let v1 = eigenvector(m, &l1);
            // If l1's eigendirection is the x-axis (second component zero),
            // then lambda_x = l1.
            let (lx, ly) = if v1.1.is_zero() {
                (l1, l2)
            } else if v1.0.is_zero() {
                (l2, l1)
            } else {
                let v2 = eigenvector(m, &l2);
                if v2.1.is_zero() {
                    (l2, l1)
                } else if v2.0.is_zero() {
                    (l1, l2)
                } else {
                    // No coordinate eigendirection: canonical choice.
                    (l1, l2)
                }
            };
            &ly / &lx
        }
        _ => r1.clone(),
    };
    debug_assert!(ratio == r1 || ratio == r2);
    debug_assert!(ratio.is_rational());
    let val = ratio.re.clone();
    if val > BigRational::from_integer(0.into()) {
        EigenRatioClass::RatioPositiveRational(val)
    } else {
        EigenRatioClass::RatioNegativeRational(val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

    fn mat(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        [[q(a), q(b)], [q(c), q(d)]]
    }

    #[test]
    fn eigen_ratio_examples() {
        // diag(1, 2) -> positive rational 2
        match eigen_ratio_class(&mat(1, 0, 0, 2)) {
            EigenRatioClass::RatioPositiveRational(r) => {
                assert_eq!(r, BigRational::from_integer(2.into()))
            }
            other => panic!("unexpected: {:?}", other),
        }
        // diag(2, -1) -> negative rational -1/2
        match eigen_ratio_class(&mat(2, 0, 0, -1)) {
            EigenRatioClass::RatioNegativeRational(r) => {
                assert_eq!(r, BigRational::new((-1).into(), 2.into()))
            }
            other => panic!("unexpected: {:?}", other),
        }
        // [[1,1],[0,0]] -> one zero eigenvalue, non-nilpotent
        assert_eq!(
            eigen_ratio_class(&mat(1, 1, 0, 0)),
            EigenRatioClass::OneZeroNonNilpotent
        );
        assert_eq!(eigen_ratio_class(&mat(0, 1, 0, 0)), EigenRatioClass::Nilpotent);
        assert_eq!(eigen_ratio_class(&mat(0, 0, 0, 0)), EigenRatioClass::BothZero);
        // rotation [[0,1],[-1,0]]: eigenvalues +-i, ratio -1
        match eigen_ratio_class(&mat(0, 1, -1, 0)) {
            EigenRatioClass::RatioNegativeRational(r) => {
                assert_eq!(r, BigRational::from_integer((-1).into()))
            }
            other => panic!("unexpected: {:?}", other),
        }
        // diag(1, i): complex ratio
        let m = [[q(1), q(0)], [q(0), GaussRat::i()]];
        assert_eq!(eigen_ratio_class(&m), EigenRatioClass::RatioIrrationalOrComplex);
        // [[1,1],[1,1]]: eigenvalues 0 and 2
        assert_eq!(
            eigen_ratio_class(&mat(1, 1, 1, 1)),
            EigenRatioClass::OneZeroNonNilpotent
        );
        // eigenvalues 1 and sqrt(2)-flavored: [[0,1],[2,0]] has +-sqrt2:
        // ratio -1 rational! use [[1,1],[0,2]]... that's ratio 2. Irrational
        // ratio: [[0,1],[1,1]] eigenvalues (1 +- sqrt5)/2, ratio irrational.
        assert_eq!(
            eigen_ratio_class(&mat(0, 1, 1, 1)),
            EigenRatioClass::RatioIrrationalOrComplex
        );
    }

    #[test]
    fn order_along_examples() {
        let x = BiPoly::x();
        let y = BiPoly::y();
        // x/y^3 d/dx along {y=0} -> -3
        let vf = RationalVF2::new(
            RationalFn2::new(x.clone(), y.pow(3)),
            RationalFn2::zero(),
        );
        assert_eq!(vf.order_along(&y).unwrap(), -3);
        // y^q d/dx along {y=0} -> q, q = 2
        let vf = RationalVF2::from_polys(y.pow(2), BiPoly::zero());
        assert_eq!(vf.order_along(&y).unwrap(), 2);
        // x y (2x d/dx - y d/dy) along {x=0} -> 1
        let m = x.mul(&y);
        let vf = RationalVF2::from_polys(
            m.mul(&x).scale(&q(2)),
            m.mul(&y).neg(),
        );
        assert_eq!(vf.order_along(&x).unwrap(), 1);
        // reducible curve rejected
        assert_eq!(
            vf.order_along(&x.mul(&y)),
            Err(AlgebraError::NotIrreducible)
        );
    }

    #[test]
    fn linear_part_examples() {
        let x = BiPoly::x();
        let y = BiPoly::y();
        let origin = (GaussRat::zero(), GaussRat::zero());
        // x d/dx - y d/dy
        let vf = RationalVF2::from_polys(x.clone(), y.neg());
        let m = vf.linear_part((&origin.0, &origin.1)).unwrap();
        assert_eq!(m, [[q(1), q(0)], [q(0), q(-1)]]);
        // y d/dx + x^2 d/dy: nilpotent
        let vf = RationalVF2::from_polys(y.clone(), x.pow(2));
        let m = vf.linear_part((&origin.0, &origin.1)).unwrap();
        assert_eq!(m, [[q(0), q(1)], [q(0), q(0)]]);
        assert_eq!(eigen_ratio_class(&m), EigenRatioClass::Nilpotent);
        // (2x+y) d/dx + 3y d/dy
        let vf = RationalVF2::from_polys(x.scale(&q(2)).add(&y), y.scale(&q(3)));
        let m = vf.linear_part((&origin.0, &origin.1)).unwrap();
        assert_eq!(m, [[q(2), q(1)], [q(0), q(3)]]);
        // pole rejected
        let vf = RationalVF2::new(
            RationalFn2::new(BiPoly::one(), x.clone()),
            RationalFn2::zero(),
        );
        assert_eq!(
            vf.linear_part((&origin.0, &origin.1)),
            Err(AlgebraError::PoleAtPoint)
        );
    }

    #[test]
    fn multiplier_split() {
        let x = BiPoly::x();
        let y = BiPoly::y();
        // x y (2x d/dx - y d/dy): multiplier xy, foliation (2x, -y)
        let m = x.mul(&y);
        let vf = RationalVF2::from_polys(m.mul(&x).scale(&q(2)), m.mul(&y).neg());
        let (f, fol) = vf.multiplier_and_foliation();
        assert_eq!(f.num().clone(), x.mul(&y));
        assert!(f.is_polynomial());
        assert_eq!(fol.p, x.scale(&q(2)));
        assert_eq!(fol.q, y.neg());
        assert!(fol.leaves_invariant(&x));
        assert!(fol.leaves_invariant(&y));
        assert!(!fol.leaves_invariant(&x.sub(&y)));
    }
}
