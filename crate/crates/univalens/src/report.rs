//! Deterministic report serialization helpers.
//!
//! Floats are emitted with 17 significant digits through serde_json's
//! arbitrary-precision number type so identical inputs produce byte-identical
//! JSON. Complex numbers serialize as `[re, im]` pairs.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// Format a float with 17 significant digits, stable across runs.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    if !v.is_finite() {
        // JSON has no infinities; callers are expected to gate these, but a
        // stable stand-in beats a panic in report code.
        return if v.is_nan() {
            "0.0".to_string()
        } else if v > 0.0 {
            "1e999".to_string()
        } else {
            "-1e999".to_string()
        };
    }
    format!("{:.16e}", v)
}

/// Newtype that serializes an `f64` with the crate's fixed 17-digit format.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64R(pub f64);

impl Serialize for F64R {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_string_unchecked(fmt_f64(self.0));
        n.serialize(s)
    }
}

/// Complex number serialized as a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexR(pub Complex64);

impl Serialize for ComplexR {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&F64R(self.0.re))?;
        seq.serialize_element(&F64R(self.0.im))?;
        seq.end()
    }
}

impl From<Complex64> for ComplexR {
    fn from(z: Complex64) -> Self {
        ComplexR(z)
    }
}

pub fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&ComplexR(*z))?;
    }
    seq.end()
}

/// Sparse polynomial terms as `[[i, j, "re", "im"], ...]`.
pub fn poly_terms_json(p: &crate::algebra::bipoly::BiPoly) -> serde_json::Value {
    let mut terms = Vec::new();
    for (&(i, j), c) in &p.terms {
        terms.push(serde_json::json!([i, j, c.re.to_string(), c.im.to_string()]));
    }
    serde_json::Value::Array(terms)
}

/// Rational function as `{num: [[i,j,"re","im"],...], den: [...]}`.
pub fn rational_fn_json(f: &crate::algebra::rational::RationalFn2) -> serde_json::Value {
    serde_json::json!({
        "num": poly_terms_json(f.num()),
        "den": poly_terms_json(f.den()),
    })
}

/// Inverse of `poly_terms_json`.
pub fn poly_from_terms_json(
    v: &serde_json::Value,
) -> Result<crate::algebra::bipoly::BiPoly, String> {
    use crate::algebra::bipoly::BiPoly;
    use crate::algebra::gaussrat::GaussRat;
    use std::str::FromStr;
    let arr = v.as_array().ok_or("expected an array of terms")?;
    let mut out = BiPoly::zero();
    for t in arr {
        let quad = t.as_array().ok_or("term must be [i, j, re, im]")?;
        if quad.len() != 4 {
            return Err("term must have four entries".into());
        }
        let i = quad[0].as_u64().ok_or("exponent must be an integer")? as u32;
        let j = quad[1].as_u64().ok_or("exponent must be an integer")? as u32;
        let re = BigRational::from_str(quad[2].as_str().ok_or("re must be a string")?)
            .map_err(|e| e.to_string())?;
        let im = BigRational::from_str(quad[3].as_str().ok_or("im must be a string")?)
            .map_err(|e| e.to_string())?;
        out = out.add(&crate::algebra::bipoly::BiPoly::monomial(
            GaussRat::new(re, im),
            i,
            j,
        ));
    }
    Ok(out)
}

/// Inverse of `rational_fn_json`.
pub fn rational_fn_from_json(
    v: &serde_json::Value,
) -> Result<crate::algebra::rational::RationalFn2, String> {
    let num = poly_from_terms_json(v.get("num").ok_or("missing num")?)?;
    let den = poly_from_terms_json(v.get("den").ok_or("missing den")?)?;
    if den.is_zero() {
        return Err("denominator is zero".into());
    }
    Ok(crate::algebra::rational::RationalFn2::new(num, den))
}
