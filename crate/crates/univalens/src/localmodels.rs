//! Classification of reduced local models and their numerical data.
//!
//! A reduced vector field near a point where the divisor of zeros and poles
//! passes is, up to a unit factor, one of four semi-local models: regular
//! (`y^q d/dx`), finite ramification (`x^p y^q (m x d/dx - n y d/dy)` with
//! `pm - qn = +-1`), infinite ramification (eigenvalue ratio `-p/q` matching
//! the divisor orders) or saddle-node (`y^q ([x+..] d/dx + y^(k+1) d/dy)`).
//! Each invariant branch carries an order, a ramification index and a
//! Camacho-Sad contribution.

use crate::algebra::bipoly::{BiPoly, Var};
use crate::algebra::gaussrat::GaussRat;
use crate::algebra::rational::RationalFn2;
use crate::algebra::unipoly::UniPoly;
use crate::algebra::vf::{
    self, EigenRatioClass, FoliationGen, Mat2, RationalVF2,
};
use crate::jets::{
    self, graph_jet_x_of_y, graph_jet_y_of_x, tangent_cone_at_origin, transform_foliation,
    TangentCone, JET_ORDER, NORMAL_FORM_ORDER,
};
use crate::reduction::{self, BlowupTree};
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LocalModelError {
    #[error("run reduction first: {0}")]
    NotReduced(String),
    #[error("separatrix data unavailable: {0}")]
    SeparatrixUnavailable(String),
    #[error("mu lies in Q+, outside the Siegel/reduced range")]
    MuPositiveRational,
    #[error("(p, q) = (0, 0) not allowed here")]
    DegenerateOrders,
    #[error("divisor not invariant (dicritical): {0}")]
    DivisorNotInvariant(String),
    #[error("unclassifiable singularity on divisor: {0}")]
    Unclassifiable(String),
    #[error("algebra error: {0}")]
    Algebra(#[from] crate::algebra::bipoly::AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    Regular,
    FiniteRamification,
    InfiniteRamification,
    SaddleNode,
    NotAdmissible,
    Holomorphic,
}

/// A ramification index: a Gaussian rational or infinity. Infinity is a
/// distinguished value, never a sentinel.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexValue {
    Finite(GaussRat),
    Infinity,
}

impl IndexValue {
    pub fn finite_int(n: i64) -> Self {
        IndexValue::Finite(GaussRat::from_int(n))
    }

    pub fn as_rational(&self) -> Option<&GaussRat> {
        match self {
            IndexValue::Finite(v) => Some(v),
            IndexValue::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, IndexValue::Infinity)
    }
}

impl std::fmt::Display for IndexValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IndexValue::Finite(v) => write!(f, "{}", v),
            IndexValue::Infinity => write!(f, "inf"),
        }
    }
}

/// Which local branch a data row refers to, in the classifier's aligned
/// coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchId {
    /// The branch tangent to the y-axis, `{x = 0}` in the model.
    XZero,
    /// The branch tangent to the x-axis, `{y = 0}` in the model.
    YZero,
    /// The integral curve at a regular point (or strong separatrix when the
    /// model has a single distinguished branch).
    Leaf,
}

#[derive(Clone, Debug)]
pub struct BranchData {
    pub branch: BranchId,
    /// Tangent direction in the input coordinates.
    pub tangent: (GaussRat, GaussRat),
    pub ord: i64,
    pub ind: IndexValue,
    pub cs: GaussRat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Linearization {
    Exact,
    FormalToOrder(u32),
    NotApplicable,
}

#[derive(Clone, Debug)]
pub struct LocalModelReport {
    pub kind: ModelKind,
    pub p: i64,
    pub q: i64,
    pub m: i64,
    pub n: i64,
    pub k: i64,
    pub branches: Vec<BranchData>,
    pub linearization: Linearization,
    pub notes: Vec<String>,
}

impl LocalModelReport {
    fn bare(kind: ModelKind) -> Self {
        LocalModelReport {
            kind,
            p: 0,
            q: 0,
            m: 1,
            n: 1,
            k: 0,
            branches: vec![],
            linearization: Linearization::NotApplicable,
            notes: vec![],
        }
    }

    pub fn branch(&self, id: BranchId) -> Option<&BranchData> {
        self.branches.iter().find(|b| b.branch == id)
    }
}

/// Ramification indices of the separatrices of a Siegel-domain singularity
/// `x^p y^q (x f d/dx + mu y g d/dy)` normalized to lambda_x = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelIndexPair {
    pub ind_y0: IndexValue,
    pub ind_x0: IndexValue,
}

/// ind({y=0}, 0) = -1/(p + mu q) and ind({x=0}, 0) = -mu/(p + mu q),
/// both infinite when p + mu q = 0.
pub fn siegel_indices(
    p: i64,
    q: i64,
    mu: &GaussRat,
) -> Result<SiegelIndexPair, LocalModelError> {
    if mu.is_positive_rational() {
        return Err(LocalModelError::MuPositiveRational);
    }
    if p == 0 && q == 0 {
        return Err(LocalModelError::DegenerateOrders);
    }
    let d = &GaussRat::from_int(p) + &(mu * &GaussRat::from_int(q));
    if d.is_zero() {
        return Ok(SiegelIndexPair {
            ind_y0: IndexValue::Infinity,
            ind_x0: IndexValue::Infinity,
        });
    }
    Ok(SiegelIndexPair {
        ind_y0: IndexValue::Finite(-&(&GaussRat::one() / &d)),
        ind_x0: IndexValue::Finite(-&(mu / &d)),
    })
}

/// Build the literal normal form of a Table row. Negative divisor orders
/// produce poles.
pub fn normal_form(kind: &ModelKind, p: i64, q: i64, m: i64, n: i64, k: i64) -> RationalVF2 {
    let mono = |base: BiPoly, e: i64| -> RationalFn2 {
        if e >= 0 {
            RationalFn2::from_poly(base.pow(e as u32))
        } else {
            RationalFn2::new(BiPoly::one(), base.pow((-e) as u32))
        }
    };
    let x = BiPoly::x();
    let y = BiPoly::y();
    let xf = RationalFn2::from_poly(x.clone());
    let yf = RationalFn2::from_poly(y.clone());
    match kind {
        ModelKind::Regular => {
            RationalVF2::new(mono(y.clone(), q), RationalFn2::zero())
        }
        ModelKind::FiniteRamification => {
            let f = mono(x.clone(), p).mul(&mono(y.clone(), q));
            RationalVF2::new(
                f.mul(&xf).scale(&GaussRat::from_int(m)),
                f.mul(&yf).scale(&GaussRat::from_int(-n)),
            )
        }
        ModelKind::InfiniteRamification => {
            let f = mono(x.clone(), p).mul(&mono(y.clone(), q));
            RationalVF2::new(
                f.mul(&xf).scale(&GaussRat::from_int(q)),
                f.mul(&yf).scale(&GaussRat::from_int(-p)),
            )
        }
        ModelKind::SaddleNode => {
            let f = mono(y.clone(), q);
            RationalVF2::new(
                f.mul(&xf),
                f.mul(&RationalFn2::from_poly(y.pow((k + 1) as u32))),
            )
        }
        ModelKind::Holomorphic | ModelKind::NotAdmissible => {
            RationalVF2::from_polys(x, y.neg())
        }
    }
}

/// Classify a reduced local vector field against the semi-local model table.
pub fn classify_local(
    vf: &RationalVF2,
    point: (&GaussRat, &GaussRat),
) -> Result<LocalModelReport, LocalModelError> {
    let local = vf.shift(point.0, point.1);
    let (f, fol) = local.multiplier_and_foliation();
    let zero = GaussRat::zero();
    let singular = fol.is_singular_at(&zero, &zero);
    let h = local.divisor_equation();
    let h_through = !h.is_constant() && h.eval(&zero, &zero).is_zero();

    if !singular {
        return classify_regular(&f, &fol, &h, h_through);
    }

    let m = fol.linear_part_at(&zero, &zero);
    let class = vf::eigen_ratio_class(&m);
    if !class.is_reduced() {
        return Err(LocalModelError::NotReduced(format!(
            "eigenvalue class {:?}",
            class
        )));
    }
    match class {
        EigenRatioClass::OneZeroNonNilpotent => classify_saddle_node(&f, &fol, &h, h_through),
        _ => classify_nondegenerate(&f, &fol, &m, h_through),
    }
}

/// Valuations of the multiplier along the two separatrix branches of an
/// aligned singularity, where the branches are the graphs `x = c(y)` and
/// `y = s(x)` through the origin.
///
/// Each branch is straightened by its own triangular shear (an exact
/// polynomial automorphism), after which the valuation is a monomial read.
/// Exact whenever the separatrix agrees with its jet; tangency beyond the
/// jet order would be misread, which is the documented jet-bound regime.
fn divisor_valuations_aligned(
    num_a: &BiPoly,
    den_a: &BiPoly,
    jet_x_of_y: &UniPoly,
    jet_y_of_x: &UniPoly,
) -> Option<(i64, i64)> {
    let c = BiPoly::from_unipoly(jet_x_of_y, Var::Y);
    let s = BiPoly::from_unipoly(jet_y_of_x, Var::X);
    // Shear sending {x = c(y)} to {x = 0}: substitute x -> x + c(y).
    let shear_x = |g: &BiPoly| g.subst(&BiPoly::x().add(&c), &BiPoly::y());
    // Shear sending {y = s(x)} to {y = 0}: substitute y -> y + s(x).
    let shear_y = |g: &BiPoly| g.subst(&BiPoly::x(), &BiPoly::y().add(&s));
    let p = shear_x(num_a).valuation_in(Var::X)? as i64
        - shear_x(den_a).valuation_in(Var::X)? as i64;
    let q = shear_y(num_a).valuation_in(Var::Y)? as i64
        - shear_y(den_a).valuation_in(Var::Y)? as i64;
    Some((p, q))
}

fn classify_regular(
    f: &RationalFn2,
    fol: &FoliationGen,
    h: &BiPoly,
    h_through: bool,
) -> Result<LocalModelReport, LocalModelError> {
    let zero = GaussRat::zero();
    if !h_through {
        let mut rep = LocalModelReport::bare(ModelKind::Holomorphic);
        rep.notes.push("regular point off the divisor".into());
        return Ok(rep);
    }
    // Leaf jet through the origin.
    let (dx, dy) = (fol.p.eval(&zero, &zero), fol.q.eval(&zero, &zero));
    let (swapped, jet) = if !dx.is_zero() {
        let slope = &dy / &dx;
        (
            false,
            graph_jet_y_of_x(fol, &slope, JET_ORDER)
                .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?,
        )
    } else {
        let slope = &dx / &dy;
        (
            true,
            graph_jet_x_of_y(fol, &slope, JET_ORDER)
                .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?,
        )
    };
    let restrict = |p: &BiPoly| -> UniPoly {
        if swapped {
            jets::eval_along_graph_x(p, &jet, JET_ORDER)
        } else {
            jets::eval_along_graph(p, &jet, JET_ORDER)
        }
    };
    let h_leaf = restrict(h);
    if let Some(v) = h_leaf.valuation_at_zero() {
        // The divisor is not (to jet order) the integral curve.
        let mut rep = LocalModelReport::bare(ModelKind::NotAdmissible);
        if v >= 2 {
            return Err(LocalModelError::NotReduced(
                "divisor tangent to the integral curve".into(),
            ));
        }
        rep.notes
            .push("transverse divisor at a regular point".into());
        return Ok(rep);
    }
    match tangent_cone_at_origin(h) {
        TangentCone::Smooth(_) => {}
        other => {
            let mut rep = LocalModelReport::bare(ModelKind::NotAdmissible);
            rep.notes.push(format!(
                "divisor at a regular point is not a single smooth invariant branch ({:?})",
                other
            ));
            return Ok(rep);
        }
    }
    // q = order of the multiplier along the leaf: swap coordinates if needed
    // so the leaf is a graph over x, then shear it straight and read the
    // y-valuation.
    let t: Mat2 = if swapped {
        [
            [GaussRat::zero(), GaussRat::one()],
            [GaussRat::one(), GaussRat::zero()],
        ]
    } else {
        [
            [GaussRat::one(), GaussRat::zero()],
            [GaussRat::zero(), GaussRat::one()],
        ]
    };
    let fol_a = transform_foliation(fol, &t).expect("permutation invertible");
    let slope_a = {
        let dxa = fol_a.p.eval(&zero, &zero);
        let dya = fol_a.q.eval(&zero, &zero);
        &dya / &dxa
    };
    let jet_a = graph_jet_y_of_x(&fol_a, &slope_a, JET_ORDER)
        .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?;
    let num_a = jets::transform_scalar(f.num(), &t);
    let den_a = jets::transform_scalar(f.den(), &t);
    let (_, q) = divisor_valuations_aligned(&num_a, &den_a, &UniPoly::zero(), &jet_a)
        .ok_or_else(|| {
            LocalModelError::SeparatrixUnavailable("valuation beyond jet order".into())
        })?;
    let mut rep = LocalModelReport::bare(ModelKind::Regular);
    rep.q = q;
    let tangent = if swapped {
        (GaussRat::zero(), GaussRat::one())
    } else {
        (GaussRat::one(), jet_a.coeff(1))
    };
    rep.branches.push(BranchData {
        branch: BranchId::Leaf,
        tangent,
        ord: q,
        ind: IndexValue::finite_int(1),
        cs: GaussRat::zero(),
    });
    rep.linearization = Linearization::Exact;
    Ok(rep)
}

fn classify_saddle_node(
    f: &RationalFn2,
    fol: &FoliationGen,
    h: &BiPoly,
    h_through: bool,
) -> Result<LocalModelReport, LocalModelError> {
    let (fol_a, t) = reduction::align_saddle_node(fol)
        .ok_or_else(|| LocalModelError::SeparatrixUnavailable("saddle-node alignment".into()))?;
    let strong = graph_jet_y_of_x(&fol_a, &GaussRat::zero(), JET_ORDER)
        .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?;
    if !h_through {
        let mut rep = LocalModelReport::bare(ModelKind::Holomorphic);
        rep.notes
            .push("saddle-node foliation, no divisor through the point".into());
        return Ok(rep);
    }
    // Divisor must consist of the strong separatrix alone.
    let h_a = jets::transform_scalar(h, &t);
    let strong_only = match tangent_cone_at_origin(&h_a) {
        TangentCone::Smooth(dir) => {
            let strong_dir = (GaussRat::one(), GaussRat::zero());
            (&dir.0 * &strong_dir.1) == (&dir.1 * &strong_dir.0)
                && jets::eval_along_graph(&h_a, &strong, JET_ORDER)
                    .valuation_at_zero()
                    .is_none()
        }
        TangentCone::Missing => true,
        _ => false,
    };
    if !strong_only {
        let mut rep = LocalModelReport::bare(ModelKind::NotAdmissible);
        rep.notes.push("saddle-node with transverse divisor".into());
        return Ok(rep);
    }
    // q: valuation of the multiplier along the strong separatrix.
    let num_a = jets::transform_scalar(f.num(), &t);
    let den_a = jets::transform_scalar(f.den(), &t);
    let (_, q) = divisor_valuations_aligned(&num_a, &den_a, &UniPoly::zero(), &strong)
        .ok_or_else(|| {
            LocalModelError::SeparatrixUnavailable("valuation beyond jet order".into())
        })?;
    // k: vanishing order minus one of the restriction of the weak-direction
    // dynamics to the central manifold jet.
    let weak = graph_jet_x_of_y(&fol_a, &GaussRat::zero(), NORMAL_FORM_ORDER as usize)
        .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?;
    let restricted = jets::eval_along_graph_x(&fol_a.q, &weak, NORMAL_FORM_ORDER as usize);
    let k = match restricted.valuation_at_zero() {
        Some(v) if v >= 2 => (v - 1) as i64,
        Some(_) => {
            return Err(LocalModelError::NotReduced(
                "weak direction not degenerate enough for a saddle-node".into(),
            ))
        }
        None => {
            let mut rep = LocalModelReport::bare(ModelKind::NotAdmissible);
            rep.notes.push(format!(
                "weak multiplicity beyond jet bound {}",
                NORMAL_FORM_ORDER
            ));
            return Ok(rep);
        }
    };
    let mut rep = LocalModelReport::bare(ModelKind::SaddleNode);
    rep.q = q;
    rep.k = k;
    let strong_dir_orig = (t[0][0].clone(), t[1][0].clone());
    rep.branches.push(BranchData {
        branch: BranchId::YZero,
        tangent: strong_dir_orig,
        ord: q,
        ind: IndexValue::Infinity,
        cs: GaussRat::zero(),
    });
    rep.linearization = Linearization::FormalToOrder(NORMAL_FORM_ORDER);
    Ok(rep)
}

fn classify_nondegenerate(
    f: &RationalFn2,
    fol: &FoliationGen,
    m: &Mat2,
    h_through: bool,
) -> Result<LocalModelReport, LocalModelError> {
    let Some((l1, l2)) = vf::eigenvalues_exact(m) else {
        // Ratio exists but eigenvalues are irrational.
        if !h_through {
            let mut rep = LocalModelReport::bare(ModelKind::Holomorphic);
            rep.notes
                .push("non-degenerate singularity, no divisor; irrational eigenvalues".into());
            return Ok(rep);
        }
        return Err(LocalModelError::SeparatrixUnavailable(
            "irrational eigenvalues with divisor present".into(),
        ));
    };
    // Assign lambda_x / lambda_y by eigendirection.
    let v1 = vf::eigenvector(m, &l1);
    let v2 = vf::eigenvector(m, &l2);
    let (lx, vx, ly, vy) = if v1.1.is_zero() || (!v1.0.is_zero() && v2.0.is_zero()) {
        (l1, v1, l2, v2)
    } else {
        (l2, v2, l1, v1)
    };
    let mu = &ly / &lx;
    let t: Mat2 = [[vx.0.clone(), vy.0.clone()], [vx.1.clone(), vy.1.clone()]];
    let fol_a = transform_foliation(fol, &t)
        .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?;
    let jet_y = graph_jet_y_of_x(&fol_a, &GaussRat::zero(), JET_ORDER)
        .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?;
    let jet_x = graph_jet_x_of_y(&fol_a, &GaussRat::zero(), JET_ORDER)
        .map_err(|e| LocalModelError::SeparatrixUnavailable(e.to_string()))?;
    let num_a = jets::transform_scalar(f.num(), &t);
    let den_a = jets::transform_scalar(f.den(), &t);
    let (p, q) = divisor_valuations_aligned(&num_a, &den_a, &jet_x, &jet_y).ok_or_else(|| {
        LocalModelError::SeparatrixUnavailable("valuation beyond jet order".into())
    })?;

    let mk_branches = |ind_x0: IndexValue, ind_y0: IndexValue, p: i64, q: i64| -> Vec<BranchData> {
        vec![
            BranchData {
                branch: BranchId::XZero,
                tangent: vy.clone(),
                ord: p,
                ind: ind_x0,
                cs: &lx / &ly,
            },
            BranchData {
                branch: BranchId::YZero,
                tangent: vx.clone(),
                ord: q,
                ind: ind_y0,
                cs: &ly / &lx,
            },
        ]
    };

    if p == 0 && q == 0 {
        let mut rep = LocalModelReport::bare(ModelKind::Holomorphic);
        rep.branches = mk_branches(IndexValue::Infinity, IndexValue::Infinity, 0, 0);
        rep.notes
            .push("holomorphic non-degenerate singularity off the divisor".into());
        return Ok(rep);
    }

    // p + mu q = 0 detects infinite ramification (both indices infinite).
    let pq_combo = &GaussRat::from_int(p) + &(&mu * &GaussRat::from_int(q));
    if pq_combo.is_zero() {
        let mut rep = LocalModelReport::bare(ModelKind::InfiniteRamification);
        rep.p = p;
        rep.q = q;
        rep.branches = mk_branches(IndexValue::Infinity, IndexValue::Infinity, p, q);
        rep.notes.push(
            "higher-order terms accepted as long as they preserve the separatrices and orders"
                .into(),
        );
        rep.linearization = Linearization::NotApplicable;
        return Ok(rep);
    }

    if mu.is_negative_rational() {
        // mu = -n/m in lowest terms, m, n > 0.
        let r = mu.re.clone();
        let n_big = r.numer().abs();
        let m_big = r.denom().clone();
        use num_traits::ToPrimitive;
        let (mm, nn) = match (m_big.to_i64(), n_big.to_i64()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(LocalModelError::Unclassifiable(
                    "eigenvalue ratio too large".into(),
                ))
            }
        };
        let delta = p * mm - q * nn;
        if delta == 1 || delta == -1 {
            let lin = linearizable_to_order(&fol_a, &lx, &ly, NORMAL_FORM_ORDER);
            match lin {
                Some(true) => {}
                Some(false) => {
                    let mut rep = LocalModelReport::bare(ModelKind::NotAdmissible);
                    rep.notes.push(format!(
                        "resonant obstruction to linearization within jet order {}",
                        NORMAL_FORM_ORDER
                    ));
                    return Ok(rep);
                }
                None => {
                    return Err(LocalModelError::Unclassifiable(
                        "normal-form computation failed".into(),
                    ))
                }
            }
            let si = siegel_indices(p, q, &mu)?;
            let mut rep = LocalModelReport::bare(ModelKind::FiniteRamification);
            rep.p = p;
            rep.q = q;
            rep.m = mm;
            rep.n = nn;
            rep.branches = mk_branches(si.ind_x0, si.ind_y0, p, q);
            rep.linearization = if fol_is_linear(&fol_a) {
                Linearization::Exact
            } else {
                Linearization::FormalToOrder(NORMAL_FORM_ORDER)
            };
            return Ok(rep);
        }
        let mut rep = LocalModelReport::bare(ModelKind::NotAdmissible);
        rep.p = p;
        rep.q = q;
        rep.m = mm;
        rep.n = nn;
        rep.notes
            .push(format!("p m - q n = {} lies outside {{-1, +1}}", delta));
        return Ok(rep);
    }

    // Divisor present, ratio not in Q-: Poincare domain or complex ratio.
    let mut rep = LocalModelReport::bare(ModelKind::NotAdmissible);
    rep.p = p;
    rep.q = q;
    rep.notes
        .push("divisor at a singularity whose eigenvalue ratio lies outside Q-".into());
    Ok(rep)
}

fn fol_is_linear(fol: &FoliationGen) -> bool {
    fol.p.total_degree() == Some(1) && fol.q.total_degree() == Some(1)
}

fn truncate_total(p: &BiPoly, order: u32) -> BiPoly {
    BiPoly {
        terms: p
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j <= order)
            .map(|(k, c)| (*k, c.clone()))
            .collect(),
    }
}

/// Orbital formal linearizability of an aligned non-degenerate singular
/// foliation with linear part diag(a, b), checked through total degree
/// `order`. Returns None when the elimination cannot proceed.
fn linearizable_to_order(fol: &FoliationGen, a: &GaussRat, b: &GaussRat, order: u32) -> Option<bool> {
    let mut p = truncate_total(&fol.p, order);
    let mut q = truncate_total(&fol.q, order);
    // Normalize so the linear part is exactly (a x, b y).
    {
        let lp = p.lowest_form();
        let ca = lp.terms.get(&(1, 0))?;
        let scale = &(a.clone()) / ca;
        p = p.scale(&scale);
        q = q.scale(&scale);
    }
    for d in 2..=order {
        // Current homogeneous degree-d parts.
        let pd: Vec<((u32, u32), GaussRat)> = p
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j == d)
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        let qd: Vec<((u32, u32), GaussRat)> = q
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j == d)
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        if pd.is_empty() && qd.is_empty() {
            continue;
        }
        let mut ux = BiPoly::zero();
        let mut uy = BiPoly::zero();
        let mut res_x: Vec<((u32, u32), GaussRat)> = vec![];
        let mut res_y: Vec<((u32, u32), GaussRat)> = vec![];
        for ((i, j), c) in &pd {
            let w = &(&(a * &GaussRat::from_int(*i as i64))
                + &(b * &GaussRat::from_int(*j as i64)))
                - a;
            if w.is_zero() {
                res_x.push(((*i, *j), c.clone()));
            } else {
                ux = ux.add(&BiPoly::monomial(c / &w, *i, *j));
            }
        }
        for ((i, j), c) in &qd {
            let w = &(&(a * &GaussRat::from_int(*i as i64))
                + &(b * &GaussRat::from_int(*j as i64)))
                - b;
            if w.is_zero() {
                res_y.push(((*i, *j), c.clone()));
            } else {
                uy = uy.add(&BiPoly::monomial(c / &w, *i, *j));
            }
        }
        // Check resonant survivors: they must combine to a unit multiple of
        // the linear field, i.e. coefficients proportional to (a, b) termwise
        // along x (xy^..)^k x d/dx + .. y d/dy pairs.
        if !res_x.is_empty() || !res_y.is_empty() {
            // Pair up by the resonance monomial u^k: x-side key (1+kn, km),
            // y-side key (kn, 1+km).
            let mut resonance_ok = true;
            let mut paired: std::collections::BTreeMap<(u32, u32), (GaussRat, GaussRat)> =
                std::collections::BTreeMap::new();
            for ((i, j), c) in &res_x {
                if *i == 0 {
                    return Some(false);
                }
                // u^k = x^(i-1) y^j
                paired
                    .entry((*i - 1, *j))
                    .or_insert((GaussRat::zero(), GaussRat::zero()))
                    .0 = c.clone();
            }
            for ((i, j), c) in &res_y {
                if *j == 0 {
                    return Some(false);
                }
                paired
                    .entry((*i, *j - 1))
                    .or_insert((GaussRat::zero(), GaussRat::zero()))
                    .1 = c.clone();
            }
            for (_, (ca, cb)) in paired {
                // survivors c_a x u^k d/dx + c_b y u^k d/dy are a unit
                // multiple of (a x, b y) iff c_a b == c_b a.
                if &(&ca * b) - &(&cb * a) != GaussRat::zero() {
                    resonance_ok = false;
                }
            }
            if !resonance_ok {
                return Some(false);
            }
            // Unit-absorbable resonant terms: strip them (they do not affect
            // the foliation's linearizability) and continue.
            for ((i, j), c) in &res_x {
                p = p.sub(&BiPoly::monomial(c.clone(), *i, *j));
            }
            for ((i, j), c) in &res_y {
                q = q.sub(&BiPoly::monomial(c.clone(), *i, *j));
            }
        }
        if ux.is_zero() && uy.is_zero() {
            continue;
        }
        // Apply phi = id + U by pushforward, truncating above `order`.
        let phi_x = BiPoly::x().add(&ux);
        let phi_y = BiPoly::y().add(&uy);
        let p_comp = truncate_total(&p.subst(&phi_x, &phi_y), order);
        let q_comp = truncate_total(&q.subst(&phi_x, &phi_y), order);
        // Inverse Jacobian of phi as a truncated series: (I + DU)^{-1}.
        let du = [
            [ux.derivative(Var::X), ux.derivative(Var::Y)],
            [uy.derivative(Var::X), uy.derivative(Var::Y)],
        ];
        // Neumann series up to enough terms: DU has order d-1 >= 1, so
        // (order) terms suffice.
        let mut inv = [
            [BiPoly::one(), BiPoly::zero()],
            [BiPoly::zero(), BiPoly::one()],
        ];
        let mut power = [
            [BiPoly::one(), BiPoly::zero()],
            [BiPoly::zero(), BiPoly::one()],
        ];
        let steps = (order / (d - 1)).max(1);
        for s in 0..steps {
            // power <- power * (-DU)
            let a00 = truncate_total(
                &power[0][0].mul(&du[0][0]).add(&power[0][1].mul(&du[1][0])).neg(),
                order,
            );
            let a01 = truncate_total(
                &power[0][0].mul(&du[0][1]).add(&power[0][1].mul(&du[1][1])).neg(),
                order,
            );
            let a10 = truncate_total(
                &power[1][0].mul(&du[0][0]).add(&power[1][1].mul(&du[1][0])).neg(),
                order,
            );
            let a11 = truncate_total(
                &power[1][0].mul(&du[0][1]).add(&power[1][1].mul(&du[1][1])).neg(),
                order,
            );
            power = [[a00, a01], [a10, a11]];
            inv[0][0] = inv[0][0].add(&power[0][0]);
            inv[0][1] = inv[0][1].add(&power[0][1]);
            inv[1][0] = inv[1][0].add(&power[1][0]);
            inv[1][1] = inv[1][1].add(&power[1][1]);
            let _ = s;
        }
        let new_p = truncate_total(
            &inv[0][0].mul(&p_comp).add(&inv[0][1].mul(&q_comp)),
            order,
        );
        let new_q = truncate_total(
            &inv[1][0].mul(&p_comp).add(&inv[1][1].mul(&q_comp)),
            order,
        );
        p = new_p;
        q = new_q;
    }
    Some(true)
}

/// Sum of the Camacho-Sad contributions of the classified singularities on
/// an exceptional divisor of a blow-up tree.
pub fn cs_sum_check(tree: &BlowupTree, divisor_id: usize) -> Result<GaussRat, LocalModelError> {
    let div = tree
        .exceptional
        .iter()
        .find(|d| d.id == divisor_id)
        .ok_or_else(|| LocalModelError::Unclassifiable("no such divisor".into()))?;
    if !div.invariant {
        return Err(LocalModelError::DivisorNotInvariant(format!(
            "divisor {} is dicritical",
            divisor_id
        )));
    }
    let mut sum = GaussRat::zero();
    for sp in &tree.singular_points {
        if !sp.on_divisors.contains(&divisor_id) {
            continue;
        }
        let chart = &tree.charts[sp.chart];
        let report = classify_local(&chart.vf, (&sp.point.0, &sp.point.1))?;
        if report.kind == ModelKind::NotAdmissible {
            return Err(LocalModelError::Unclassifiable(format!(
                "point {:?} in chart {}: {:?}",
                sp.point, sp.chart, report.notes
            )));
        }
        // Identify which branch is the divisor: compare tangent directions
        // with the divisor's local equation.
        let eq = div
            .local_eqs
            .iter()
            .find(|(c, _)| *c == sp.chart)
            .map(|(_, e)| e.clone())
            .ok_or_else(|| {
                LocalModelError::Unclassifiable("divisor equation missing in chart".into())
            })?;
        let local_eq = eq.shift(&sp.point.0, &sp.point.1);
        let dir = match tangent_cone_at_origin(&local_eq) {
            TangentCone::Smooth(d) => d,
            other => {
                return Err(LocalModelError::Unclassifiable(format!(
                    "divisor not smooth at singular point: {:?}",
                    other
                )))
            }
        };
        let branch = report
            .branches
            .iter()
            .find(|b| (&b.tangent.0 * &dir.1) == (&b.tangent.1 * &dir.0))
            .ok_or_else(|| {
                LocalModelError::Unclassifiable(
                    "no classified branch tangent to the divisor".into(),
                )
            })?;
        sum += &branch.cs;
    }
    Ok(sum)
}

/// The `(m, n)` convention bridge: Table rows use `m, n > 0` with model
/// `m x d/dx - n y d/dy`; the Siegel-domain computation uses `mu = n'/m'`
/// with mixed signs. Convert a signed `mu = n'/m'` to the table's pair.
pub fn mu_to_table_mn(mu: &BigRational) -> Option<(i64, i64)> {
    use num_traits::ToPrimitive;
    if !mu.is_negative() {
        return None;
    }
    let n = mu.numer().abs().to_i64()?;
    let m = mu.denom().to_i64()?;
    Some((m, n))
}
