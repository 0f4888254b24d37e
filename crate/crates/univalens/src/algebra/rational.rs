//! Rational functions over Q(i), in one and two variables.

use super::bipoly::{self, AlgebraError, BiPoly, Var};
use super::gaussrat::GaussRat;
use super::unipoly::UniPoly;
use num_complex::Complex64;

/// A bivariate rational function `num / den`, kept normalized: the
/// denominator is nonzero, gcd(num, den) is a unit, and the denominator
/// carries lex-leading coefficient 1.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn2 {
    num: BiPoly,
    den: BiPoly,
}

impl RationalFn2 {
    pub fn new(num: BiPoly, den: BiPoly) -> Self {
        assert!(!den.is_zero(), "denominator identically zero");
        let mut f = RationalFn2 { num, den };
        f.normalize();
        f
    }

    pub fn from_poly(p: BiPoly) -> Self {
        RationalFn2 {
            num: p,
            den: BiPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(BiPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(BiPoly::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_poly(BiPoly::constant(c))
    }

    pub fn num(&self) -> &BiPoly {
        &self.num
    }

    pub fn den(&self) -> &BiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = BiPoly::one();
            return;
        }
        let g = bipoly::gcd(&self.num, &self.den);
        if !g.is_constant() {
            self.num = self.num.div_exact(&g).expect("gcd divides num");
            self.den = self.den.div_exact(&g).expect("gcd divides den");
        }
        // Make the denominator lex-monic so representations are canonical.
        let lead = self.den.terms.iter().next_back().unwrap().1.clone();
        if !lead.is_one() {
            let inv = lead.inv();
            self.den = self.den.scale(&inv);
            self.num = self.num.scale(&inv);
        }
    }

    pub fn add(&self, rhs: &RationalFn2) -> RationalFn2 {
        RationalFn2::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &RationalFn2) -> RationalFn2 {
        RationalFn2::new(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn mul(&self, rhs: &RationalFn2) -> RationalFn2 {
        RationalFn2::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &RationalFn2) -> RationalFn2 {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RationalFn2::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn neg(&self) -> RationalFn2 {
        RationalFn2 {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &GaussRat) -> RationalFn2 {
        RationalFn2::new(self.num.scale(c), self.den.clone())
    }

    pub fn derivative(&self, v: Var) -> RationalFn2 {
        let n = self
            .num
            .derivative(v)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(v)));
        RationalFn2::new(n, self.den.mul(&self.den))
    }

    /// Exact evaluation; errors when the point is a pole.
    pub fn eval(&self, x: &GaussRat, y: &GaussRat) -> Result<GaussRat, AlgebraError> {
        let d = self.den.eval(x, y);
        if d.is_zero() {
            return Err(AlgebraError::PoleAtPoint);
        }
        Ok(&self.num.eval(x, y) / &d)
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.num.eval_complex(x, y) / self.den.eval_complex(x, y)
    }

    /// Substitute polynomials for the variables.
    pub fn subst(&self, sx: &BiPoly, sy: &BiPoly) -> RationalFn2 {
        RationalFn2::new(self.num.subst(sx, sy), self.den.subst(sx, sy))
    }

    /// Substitute rational functions for the variables.
    pub fn subst_rational(&self, sx: &RationalFn2, sy: &RationalFn2) -> RationalFn2 {
        let mut acc = RationalFn2::zero();
        for (&(i, j), c) in &self.num.terms {
            let mut t = RationalFn2::constant(c.clone());
            for _ in 0..i {
                t = t.mul(sx);
            }
            for _ in 0..j {
                t = t.mul(sy);
            }
            acc = acc.add(&t);
        }
        let mut accd = RationalFn2::zero();
        for (&(i, j), c) in &self.den.terms {
            let mut t = RationalFn2::constant(c.clone());
            for _ in 0..i {
                t = t.mul(sx);
            }
            for _ in 0..j {
                t = t.mul(sy);
            }
            accd = accd.add(&t);
        }
        acc.div(&accd)
    }

    pub fn shift(&self, a: &GaussRat, b: &GaussRat) -> RationalFn2 {
        RationalFn2::new(self.num.shift(a, b), self.den.shift(a, b))
    }

    /// Curve-adic valuation: val(num) - val(den). `None` when identically 0.
    pub fn valuation_along(&self, curve: &BiPoly) -> Option<i64> {
        let vn = self.num.valuation_along(curve)? as i64;
        let vd = self.den.valuation_along(curve).expect("den nonzero") as i64;
        Some(vn - vd)
    }
}

impl std::fmt::Debug for RationalFn2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_polynomial() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

/// Univariate rational function, normalized like `RationalFn2`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn1 {
    num: UniPoly,
    den: UniPoly,
}

impl RationalFn1 {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "denominator identically zero");
        let mut f = RationalFn1 { num, den };
        f.normalize();
        f
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RationalFn1 {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(UniPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn var() -> Self {
        Self::from_poly(UniPoly::var())
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = UniPoly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree().unwrap_or(0) > 0 {
            self.num = self.num.div_exact(&g).expect("gcd divides");
            self.den = self.den.div_exact(&g).expect("gcd divides");
        }
        let lead = self.den.leading();
        if !lead.is_one() {
            let inv = lead.inv();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn add(&self, rhs: &RationalFn1) -> RationalFn1 {
        RationalFn1::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &RationalFn1) -> RationalFn1 {
        RationalFn1::new(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn mul(&self, rhs: &RationalFn1) -> RationalFn1 {
        RationalFn1::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &RationalFn1) -> RationalFn1 {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RationalFn1::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn neg(&self) -> RationalFn1 {
        RationalFn1 {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &GaussRat) -> RationalFn1 {
        RationalFn1::new(self.num.scale(c), self.den.clone())
    }

    pub fn derivative(&self) -> RationalFn1 {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RationalFn1::new(n, self.den.mul(&self.den))
    }

    pub fn eval(&self, x: &GaussRat) -> Result<GaussRat, AlgebraError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(AlgebraError::PoleAtPoint);
        }
        Ok(&self.num.eval(x) / &d)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// Order of vanishing at the point; negative at poles, `None` for 0.
    pub fn valuation_at(&self, a: &GaussRat) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let shifted_num = self.num.shift(a);
        let shifted_den = self.den.shift(a);
        let vn = shifted_num.valuation_at_zero().expect("num nonzero") as i64;
        let vd = shifted_den.valuation_at_zero().expect("den nonzero") as i64;
        Some(vn - vd)
    }

    /// Exact residue at a finite point.
    pub fn residue_at(&self, a: &GaussRat) -> GaussRat {
        // Shift the pole to 0, then read the coefficient of 1/z from the
        // Laurent expansion num/den = (sum n_k z^k)/(z^m * unit).
        let num = self.num.shift(a);
        let den = self.den.shift(a);
        let m = match den.valuation_at_zero() {
            None => unreachable!("den nonzero"),
            Some(m) => m,
        };
        if m == 0 {
            return GaussRat::zero();
        }
        // den = z^m * u with u(0) != 0. Laurent coefficients of num/u up to
        // degree m-1 determine the residue: coefficient of z^(m-1).
        let unit = UniPoly::new(den.coeffs[m..].to_vec());
        let u0 = unit.coeff(0);
        let mut inv = vec![GaussRat::zero(); m];
        inv[0] = u0.inv();
        for k in 1..m {
            let mut s = GaussRat::zero();
            for j in 1..=k {
                s += &(&unit.coeff(j) * &inv[k - j]);
            }
            inv[k] = -&(&s / &u0);
        }
        let mut res = GaussRat::zero();
        for k in 0..m {
            res += &(&num.coeff(k) * &inv[m - 1 - k]);
        }
        res
    }

    pub fn to_bivariate(&self, v: Var) -> RationalFn2 {
        RationalFn2::new(
            BiPoly::from_unipoly(&self.num, v),
            BiPoly::from_unipoly(&self.den, v),
        )
    }
}

impl std::fmt::Debug for RationalFn1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_polynomial() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_idempotent() {
        let x = BiPoly::x();
        let y = BiPoly::y();
        let f = RationalFn2::new(x.pow(2).sub(&y.pow(2)), x.sub(&y));
        assert!(f.is_polynomial());
        let again = RationalFn2::new(f.num().clone(), f.den().clone());
        assert_eq!(f, again);
    }

    #[test]
    fn residue_simple_and_higher() {
        // 1/z at 0: residue 1
        let f = RationalFn1::new(UniPoly::one(), UniPoly::var());
        assert_eq!(f.residue_at(&GaussRat::zero()), GaussRat::one());
        // (3 + z)/z^2 at 0: residue 1
        let g = RationalFn1::new(
            UniPoly::new(vec![GaussRat::from_int(3), GaussRat::one()]),
            UniPoly::var().mul(&UniPoly::var()),
        );
        assert_eq!(g.residue_at(&GaussRat::zero()), GaussRat::one());
        // 1/(z-2) at 2: residue 1; at 0: residue 0
        let h = RationalFn1::new(
            UniPoly::one(),
            UniPoly::new(vec![GaussRat::from_int(-2), GaussRat::one()]),
        );
        assert_eq!(h.residue_at(&GaussRat::from_int(2)), GaussRat::one());
        assert!(h.residue_at(&GaussRat::zero()).is_zero());
        // 1/(z^2(z-1)) at 0: expansion -1/z^2 - 1/z - ..., residue -1
        let k = RationalFn1::new(
            UniPoly::one(),
            UniPoly::var()
                .mul(&UniPoly::var())
                .mul(&UniPoly::new(vec![GaussRat::from_int(-1), GaussRat::one()])),
        );
        assert_eq!(k.residue_at(&GaussRat::zero()), GaussRat::from_int(-1));
    }

    #[test]
    fn valuation() {
        let f = RationalFn1::new(
            UniPoly::var().mul(&UniPoly::var()),
            UniPoly::new(vec![GaussRat::from_int(-1), GaussRat::one()]),
        );
        assert_eq!(f.valuation_at(&GaussRat::zero()), Some(2));
        assert_eq!(f.valuation_at(&GaussRat::one()), Some(-1));
    }
}
