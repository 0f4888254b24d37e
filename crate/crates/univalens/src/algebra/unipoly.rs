//! Dense univariate polynomials over Q(i).
//!
//! Backs the one-variable layer: coefficient arithmetic for blow-up charts
//! restricted to exceptional divisors, Riccati coefficient functions, chart
//! derivatives for defect forms, and exact-certified root extraction.

use super::gaussrat::GaussRat;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

/// Coefficients in increasing degree order; no trailing zeros stored.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<GaussRat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        UniPoly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        UniPoly::new(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: GaussRat, k: usize) -> Self {
        let mut v = vec![GaussRat::zero(); k + 1];
        v[k] = c;
        UniPoly::new(v)
    }

    pub fn var() -> Self {
        UniPoly::monomial(GaussRat::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> GaussRat {
        self.coeffs.last().cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Order of vanishing at 0; `None` for the zero polynomial.
    pub fn valuation_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(&self.coeff(k) + &rhs.coeff(k));
        }
        UniPoly::new(v)
    }

    pub fn sub(&self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(&self.coeff(k) - &rhs.coeff(k));
        }
        UniPoly::new(v)
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![GaussRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let p = a * b;
                v[i + j] += &p;
            }
        }
        UniPoly::new(v)
    }

    pub fn scale(&self, c: &GaussRat) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let mut v = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            v.push(c * &GaussRat::from_int(k as i64));
        }
        UniPoly::new(v)
    }

    pub fn eval(&self, x: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_complex();
        }
        acc
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lead_inv = d.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![GaussRat::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = rem[k].clone();
            if !c.is_zero() {
                let q = &c * &lead_inv;
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = &q * dc;
                    rem[k - dd + j] -= &t;
                }
                quo[k - dd] = q;
            }
            rem.pop();
        }
        (UniPoly::new(quo), UniPoly::new(rem))
    }

    /// Exact division; `None` when the remainder is nonzero.
    pub fn div_exact(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        self.scale(&self.leading().inv())
    }

    /// Monic gcd by the Euclidean algorithm over the field Q(i).
    pub fn gcd(&self, rhs: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        match g.degree() {
            Some(0) | None => self.monic(),
            _ => self.div_exact(&g).expect("gcd divides").monic(),
        }
    }

    /// Substitute `x -> x + a`.
    pub fn shift(&self, a: &GaussRat) -> UniPoly {
        let mut acc = UniPoly::zero();
        let lin = UniPoly::new(vec![a.clone(), GaussRat::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&UniPoly::constant(c.clone()));
        }
        acc
    }

    /// Exact polynomial square root when one exists.
    pub fn sqrt_exact(&self) -> Option<UniPoly> {
        if self.is_zero() {
            return Some(UniPoly::zero());
        }
        let deg = self.degree().unwrap();
        if deg % 2 != 0 {
            return None;
        }
        let half = deg / 2;
        let lead = self.leading().sqrt_exact()?;
        let mut root = vec![GaussRat::zero(); half + 1];
        root[half] = lead;
        // Descend from the top coefficient: the coefficient of x^(half+k) in
        // root^2 determines root[k] once all higher ones are known.
        for k in (0..half).rev() {
            let mut s = GaussRat::zero();
            for i in (k + 1)..=half {
                let j = half + k - i;
                if j > k && j <= half {
                    s += &(&root[i] * &root[j]);
                }
            }
            let target = self.coeff(half + k);
            let num = &target - &s;
            let two_lead = &GaussRat::from_int(2) * &root[half];
            root[k] = &num / &two_lead;
        }
        let cand = UniPoly::new(root);
        (cand.mul(&cand) == *self).then_some(cand)
    }

    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_complex()).collect()
    }
}

impl std::fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*x", c)?,
                _ => write!(f, "({})*x^{}", c, k)?,
            }
        }
        Ok(())
    }
}

/// Exact roots in Q(i) plus numeric approximations of the rest.
#[derive(Clone, Debug)]
pub struct RootSplit {
    /// Exactly verified roots with multiplicity.
    pub exact: Vec<(GaussRat, usize)>,
    /// Numeric approximations of roots with no certified Q(i) value.
    pub unresolved: Vec<Complex64>,
}

/// Find the roots of `p` over Q(i) where possible.
///
/// Degree <= 2 factors are solved exactly. For higher degree, numeric root
/// candidates are rationalized and verified by exact substitution; every root
/// reported as `exact` really is one, and anything that fails certification
/// lands in `unresolved` with its float approximation.
pub fn roots(p: &UniPoly) -> RootSplit {
    let mut exact = Vec::new();
    let mut unresolved = Vec::new();
    if p.is_zero() {
        return RootSplit { exact, unresolved };
    }
    let mut work = p.clone();
    // Strip x^k first.
    if let Some(v) = work.valuation_at_zero() {
        if v > 0 {
            exact.push((GaussRat::zero(), v));
            work = UniPoly::new(work.coeffs[v..].to_vec());
        }
    }
    loop {
        match work.degree() {
            None | Some(0) => break,
            Some(1) => {
                let r = -(&work.coeff(0) / &work.coeff(1));
                push_root(&mut exact, r);
                break;
            }
            Some(2) => {
                let a = work.coeff(2);
                let b = work.coeff(1);
                let c = work.coeff(0);
                let disc = &(&b * &b) - &(&GaussRat::from_int(4) * &(&a * &c));
                if let Some(s) = disc.sqrt_exact() {
                    let two_a = &GaussRat::from_int(2) * &a;
                    push_root(&mut exact, &(&(-&b) + &s) / &two_a);
                    push_root(&mut exact, &(&(-&b) - &s) / &two_a);
                } else {
                    let cs = numeric_roots(&work.to_complex_coeffs());
                    unresolved.extend(cs);
                }
                break;
            }
            Some(_) => {
                // Numeric candidates, rationalize, verify exactly.
                let cands = numeric_roots(&work.to_complex_coeffs());
                let mut found = None;
                for z in &cands {
                    if let Some(r) = rationalize(*z) {
                        if work.eval(&r).is_zero() {
                            found = Some(r);
                            break;
                        }
                    }
                }
                match found {
                    Some(r) => {
                        let lin = UniPoly::new(vec![-&r, GaussRat::one()]);
                        work = work.div_exact(&lin).expect("verified root divides");
                        push_root(&mut exact, r);
                    }
                    None => {
                        unresolved.extend(cands);
                        break;
                    }
                }
            }
        }
    }
    RootSplit { exact, unresolved }
}

fn push_root(acc: &mut Vec<(GaussRat, usize)>, r: GaussRat) {
    for (e, m) in acc.iter_mut() {
        if *e == r {
            *m += 1;
            return;
        }
    }
    acc.push((r, 1));
}

/// Durand-Kerner iteration on monic complex coefficients.
pub fn numeric_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return vec![];
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let mut zs: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::new(0.4, 0.9).powu(k as u32 + 1))
        .collect();
    for _ in 0..200 {
        let mut delta: f64 = 0.0;
        let old = zs.clone();
        for k in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for (j, zj) in old.iter().enumerate() {
                if j != k {
                    den *= old[k] - zj;
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = eval(old[k]) / den;
            zs[k] = old[k] - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    zs
}

/// Round a float to a small Gaussian rational suitable for exact verification.
fn rationalize(z: Complex64) -> Option<GaussRat> {
    let re = rationalize_f64(z.re)?;
    let im = rationalize_f64(z.im)?;
    Some(GaussRat::new(re, im))
}

fn rationalize_f64(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x.abs() < 1e-10 {
        return Some(BigRational::zero());
    }
    // Continued fraction with small denominators; exact verification happens
    // afterwards so a wrong guess is harmless.
    let mut a = x;
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (BigInt::from(a.round() as i64), BigInt::from(1));
    let mut frac = x - x.round();
    for _ in 0..24 {
        use num_traits::ToPrimitive;
        let approx = p1.to_f64().unwrap_or(f64::NAN) / q1.to_f64().unwrap_or(f64::NAN);
        if (approx - x).abs() < 1e-11 * (1.0 + x.abs()) {
            return Some(BigRational::new(p1, q1));
        }
        if frac.abs() < 1e-12 {
            break;
        }
        a = 1.0 / frac;
        let ai = a.round();
        if ai.abs() > 1e15 {
            break;
        }
        frac = a - ai;
        let ai = BigInt::from(ai as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    use num_traits::ToPrimitive;
    let approx = p1.to_f64().unwrap_or(f64::NAN) / q1.to_f64().unwrap_or(f64::NAN);
    if (approx - x).abs() < 1e-11 * (1.0 + x.abs()) {
        Some(BigRational::new(p1, q1))
    } else {
        None
    }
}

/// Resultant of two univariate polynomials over Q(i), by Euclidean reduction.
pub fn resultant(p: &UniPoly, q: &UniPoly) -> GaussRat {
    fn go(a: &UniPoly, b: &UniPoly) -> GaussRat {
        let da = match a.degree() {
            None => return GaussRat::zero(),
            Some(d) => d,
        };
        let db = match b.degree() {
            None => return GaussRat::zero(),
            Some(d) => d,
        };
        if da < db {
            let r = go(b, a);
            return if (da * db) % 2 == 1 { -r } else { r };
        }
        if db == 0 {
            return b.coeff(0).pow(da as u32);
        }
        let (_, r) = a.div_rem(b);
        if r.is_zero() {
            return GaussRat::zero();
        }
        // res(a, b) = (-1)^(da db) lc(b)^(da - deg r) res(b, r)
        let drop = (da - r.degree().unwrap()) as u32;
        let rec = &b.leading().pow(drop) * &go(b, &r);
        if (da * db) % 2 == 1 {
            -rec
        } else {
            rec
        }
    }
    go(p, q)
}
