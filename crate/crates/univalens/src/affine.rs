//! Affine-structure calculus on curves.
//!
//! Two affine structures on a disk differ by the one-form (h''/h') dz for
//! the transition h between charts; the residue of that form at a puncture
//! determines the ramification index 1/(Res + 1). Multivalued model charts
//! (n-th roots, logarithms) are realized through their single-valued
//! inverses on covers and pushed down, fixing the sign conventions so the
//! root structure gets index n at 0, -n at infinity, and the log structure
//! gets infinity.

use crate::algebra::bipoly::AlgebraError;
use crate::algebra::gaussrat::GaussRat;
use crate::algebra::rational::RationalFn1;
use crate::algebra::unipoly::{self, UniPoly};
use crate::localmodels::IndexValue;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AffineError {
    #[error("chart has identically vanishing derivative")]
    DegenerateChart,
    #[error("vector field is identically zero")]
    ZeroField,
    #[error("algebra error: {0}")]
    Algebra(#[from] AlgebraError),
}

/// The defect form eta = (h''/h') dz between two affine structures, with its
/// exactly computed residues at Q(i)-rational poles.
#[derive(Clone, Debug)]
pub struct DefectForm {
    /// Coefficient of dz.
    pub form: RationalFn1,
    /// (pole, residue) pairs at certified poles.
    pub residues: Vec<(GaussRat, GaussRat)>,
    /// Numeric approximations of poles that resisted exact certification.
    pub unresolved_poles: Vec<num_complex::Complex64>,
}

/// Defect of the structure with chart `chart2` against the one with chart
/// `chart1`, computed in the common coordinate without inverting either:
/// (c2''/c2' - c1''/c1') dz.
pub fn defect_between(
    chart1: &RationalFn1,
    chart2: &RationalFn1,
) -> Result<DefectForm, AffineError> {
    let d1 = chart1.derivative();
    let d2 = chart2.derivative();
    if d1.is_zero() || d2.is_zero() {
        return Err(AffineError::DegenerateChart);
    }
    let part = |d: &RationalFn1| d.derivative().div(d);
    let form = part(&d2).sub(&part(&d1));
    Ok(finish_defect(form))
}

fn finish_defect(form: RationalFn1) -> DefectForm {
    let mut residues = Vec::new();
    let mut unresolved = Vec::new();
    if !form.is_zero() {
        let rs = unipoly::roots(form.den());
        for (pole, _) in rs.exact {
            let r = form.residue_at(&pole);
            residues.push((pole, r));
        }
        unresolved.extend(rs.unresolved);
    }
    DefectForm {
        form,
        residues,
        unresolved_poles: unresolved,
    }
}

impl DefectForm {
    pub fn residue_at(&self, p: &GaussRat) -> GaussRat {
        self.form.residue_at(p)
    }

    pub fn add(&self, other: &DefectForm) -> DefectForm {
        finish_defect(self.form.add(&other.form))
    }
}

/// Model charts with multivalued originals.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelChart {
    /// The structure whose charts are branches of z^(1/n), n in Z*.
    Root(i64),
    /// The structure whose chart is log z.
    Log,
}

/// Residue at 0 of the defect of a model structure against the regular one,
/// computed on the single-valued cover and pushed down.
///
/// For `Root(n)` the cover is z = zeta^n: upstairs the defect of the cover
/// coordinate against the pulled-back regular structure is -(n-1)/zeta dzeta
/// and the residue divides by the covering degree. For `Log` the cover is
/// z = exp(zeta) and the pushed-down form is -dz/z.
pub fn model_defect_residue(chart: &ModelChart) -> Result<GaussRat, AffineError> {
    match chart {
        ModelChart::Root(n) => {
            if *n == 0 {
                return Err(AffineError::DegenerateChart);
            }
            let k = n.unsigned_abs() as usize;
            // Cover z = zeta^k. The pulled-back regular structure has chart
            // c1 = zeta^k; the root structure trivializes upstairs to
            // c2 = zeta (n > 0) or c2 = 1/zeta (n < 0, the branch at
            // infinity of the inverted coordinate).
            let c1 = RationalFn1::from_poly(UniPoly::monomial(GaussRat::one(), k));
            let c2 = if *n > 0 {
                RationalFn1::var()
            } else {
                RationalFn1::new(UniPoly::one(), UniPoly::var())
            };
            let up = defect_between(&c1, &c2)?;
            let res_up = up.residue_at(&GaussRat::zero());
            Ok(&res_up / &GaussRat::from_int(k as i64))
        }
        ModelChart::Log => {
            // Upstairs z = e^zeta: the pulled-back regular chart c1 = e^zeta
            // has c1''/c1' = 1, the cover chart c2 = zeta has 0; the defect
            // is -d zeta = -(dz/z). Residue at z = 0:
            Ok(GaussRat::from_int(-1))
        }
    }
}

/// Ramification index 1/(residue + 1); infinity exactly when residue = -1.
pub fn ramification_index(residue: &GaussRat) -> IndexValue {
    let denom = residue + &GaussRat::one();
    if denom.is_zero() {
        IndexValue::Infinity
    } else {
        IndexValue::Finite(&GaussRat::one() / &denom)
    }
}

/// An entry of an orbifold signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SigIndex {
    Int(i64),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbifoldSignature {
    pub genus: u8,
    pub indices: Vec<SigIndex>,
}

impl OrbifoldSignature {
    pub fn new(genus: u8, mut indices: Vec<SigIndex>) -> Self {
        assert!(genus <= 1, "only genus 0 and 1 signatures are meaningful here");
        assert!(
            indices.iter().all(|i| *i != SigIndex::Int(0)),
            "indices must be nonzero"
        );
        indices.sort();
        OrbifoldSignature { genus, indices }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureVerdict {
    pub uniformizable: bool,
    pub class_label: String,
}

/// Uniformizability of a compact-curve affine structure by its signature.
pub fn uniformizable_signature(sig: &OrbifoldSignature) -> SignatureVerdict {
    use SigIndex::*;
    let yes = |label: &str| SignatureVerdict {
        uniformizable: true,
        class_label: label.to_string(),
    };
    let no = SignatureVerdict {
        uniformizable: false,
        class_label: "not uniformizable".to_string(),
    };
    if sig.genus == 1 {
        return if sig.indices.is_empty() {
            yes("elliptic or hyperbolic torus")
        } else {
            no
        };
    }
    let ix = &sig.indices;
    match ix.len() {
        0 => yes("rational orbifold"),
        2 => {
            match (ix[0], ix[1]) {
                (Infinity, Infinity) => yes("parabolic cylinder"),
                (Int(a), Int(b)) if a == -b && a != 0 => yes("rational orbifold"),
                _ => no,
            }
        }
        3 => {
            let mut v = ix.clone();
            v.sort();
            if v == vec![Int(2), Int(2), Infinity] {
                return yes("parabolic (2,2,infinity)");
            }
            let finite: Option<Vec<i64>> = v
                .iter()
                .map(|s| match s {
                    Int(k) => Some(*k),
                    Infinity => None,
                })
                .collect();
            if let Some(mut f) = finite {
                f.sort();
                if f == vec![2, 3, 6] || f == vec![2, 4, 4] || f == vec![3, 3, 3] {
                    return yes(&format!("elliptic orbifold ({},{},{})", f[0], f[1], f[2]));
                }
            }
            no
        }
        4 => {
            if ix.iter().all(|s| *s == Int(2)) {
                yes("elliptic orbifold (2,2,2,2)")
            } else {
                no
            }
        }
        _ => no,
    }
}

/// Status of the one-dimensional univalence test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum UnivalenceStatus {
    Maximal,
    NotMaximal,
    LowerBoundDeterminations(u32),
    InfiniteDeterminations,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnivalenceVerdict1D {
    pub status: UnivalenceStatus,
    pub reasons: Vec<String>,
}

impl UnivalenceVerdict1D {
    pub fn is_maximal(&self) -> bool {
        self.status == UnivalenceStatus::Maximal
    }
}

/// Univalence of the rational vector field `f(z) d/dz` on the projective
/// line: maximal solutions exist iff the field is holomorphic on all of P^1,
/// i.e. `f` is a polynomial of degree at most two.
pub fn univalence_1d(f: &RationalFn1) -> Result<UnivalenceVerdict1D, AffineError> {
    if f.is_zero() {
        return Err(AffineError::ZeroField);
    }
    let den_deg = f.den().degree().unwrap_or(0);
    if den_deg > 0 {
        let mut reasons = vec![
            "the field has affine poles; meromorphic fields on curves have no maximal solutions"
                .to_string(),
        ];
        let max_pole = f
            .den()
            .degree()
            .unwrap_or(0);
        reasons.push(format!(
            "a pole of order k gives local solutions with k+1 determinations (here up to {})",
            max_pole + 1
        ));
        return Ok(UnivalenceVerdict1D {
            status: UnivalenceStatus::NotMaximal,
            reasons,
        });
    }
    let deg = f.num().degree().unwrap_or(0);
    if deg > 2 {
        let zeros = deg as u32;
        let bound = zeros.div_ceil(2);
        return Ok(UnivalenceVerdict1D {
            status: UnivalenceStatus::LowerBoundDeterminations(bound),
            reasons: vec![
                format!(
                    "{} zeros counted with multiplicity exceed two; solutions have at least {} determinations",
                    zeros, bound
                ),
                "the field also has a pole at infinity".to_string(),
            ],
        });
    }
    // Polynomial of degree <= 2: holomorphic on P^1 with exactly two zeros
    // counted with multiplicity (including infinity).
    let reason = match deg {
        0 => "constant field: the flow is an entire translation".to_string(),
        1 => "simple zeros at the finite point and at infinity with eigenvalue ratio -1"
            .to_string(),
        _ => {
            let a = f.num().coeff(2);
            let b = f.num().coeff(1);
            let c = f.num().coeff(0);
            let disc = &(&b * &b) - &(&GaussRat::from_int(4) * &(&a * &c));
            if disc.is_zero() {
                "a single double zero: the flow is conjugate to z^2 d/dz".to_string()
            } else {
                "two simple zeros with eigenvalue ratio -1 (opposite signs certified exactly)"
                    .to_string()
            }
        }
    };
    Ok(UnivalenceVerdict1D {
        status: UnivalenceStatus::Maximal,
        reasons: vec![reason],
    })
}
