//! Blow-up reduction of plane vector-field singularities.
//!
//! Point blow-ups are applied until every singular point of the induced
//! foliation is reduced (two nonzero eigenvalues with ratio outside Q+, or
//! one zero eigenvalue with non-nilpotent linear part) and, additionally,
//! the union of the zero/pole divisor of the vector field with the local
//! separatrices (or integral curve) has normal crossings.

use crate::algebra::bipoly::{self, BiPoly, Var};
use crate::algebra::gaussrat::GaussRat;
use crate::algebra::rational::RationalFn2;
use crate::algebra::solve;
use crate::algebra::vf::{
    self, EigenRatioClass, FoliationGen, RationalVF2,
};
use crate::jets::{
    self, direction_on_cone, graph_jet_x_of_y, graph_jet_y_of_x, tangent_cone_at_origin,
    transform_foliation, TangentCone, JET_ORDER,
};
use num_complex::Complex64;
use thiserror::Error;

pub const DEFAULT_MAX_DEPTH: usize = 24;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("point is not a singular point of the induced foliation (pass override to blow up anyway)")]
    NotSingular,
    #[error("blow-up budget of {max_depth} exceeded; partial tree retained")]
    DepthExceeded {
        max_depth: usize,
        partial: Box<BlowupTree>,
    },
    #[error("algebra error: {0}")]
    Algebra(#[from] bipoly::AlgebraError),
}

/// Which substitution produced a chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum BlowupChartKind {
    /// (x, y) -> (x, x y); the exceptional divisor is {x = 0}.
    XMain,
    /// (x, y) -> (x y, y); the exceptional divisor is {y = 0}.
    YMain,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub id: usize,
    pub parent: Option<usize>,
    /// Blow-up center in the parent chart's coordinates (root: unused).
    pub center: (GaussRat, GaussRat),
    pub kind: Option<BlowupChartKind>,
    /// Vector field in this chart's coordinates (exact pullback, including
    /// any zeros/poles gained along the exceptional divisor).
    pub vf: RationalVF2,
}

impl Chart {
    /// Map a point in this chart to the parent chart.
    pub fn to_parent(&self, p: (&GaussRat, &GaussRat)) -> (GaussRat, GaussRat) {
        match self.kind {
            None => (p.0.clone(), p.1.clone()),
            Some(BlowupChartKind::XMain) => (
                &self.center.0 + p.0,
                &self.center.1 + &(p.0 * p.1),
            ),
            Some(BlowupChartKind::YMain) => (
                &self.center.0 + &(p.0 * p.1),
                &self.center.1 + p.1,
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExceptionalDivisor {
    pub id: usize,
    pub self_intersection: i64,
    /// Whether the divisor is invariant by the foliation (false = dicritical).
    pub invariant: bool,
    /// Order of the pulled-back vector field along the divisor.
    pub vf_multiplicity: i64,
    /// Local equations: (chart id, equation of the divisor in that chart).
    pub local_eqs: Vec<(usize, BiPoly)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PointStatus {
    Reduced,
    NonReduced,
}

#[derive(Clone, Debug)]
pub struct SingularPointRec {
    pub chart: usize,
    pub point: (GaussRat, GaussRat),
    pub status: PointStatus,
    pub eigen_class: EigenRatioClass,
    /// Exceptional divisors through the point.
    pub on_divisors: Vec<usize>,
}

/// A point that had to be excluded from automatic processing.
#[derive(Clone, Debug)]
pub struct ExcludedPoint {
    pub chart: usize,
    pub approx: (Complex64, Complex64),
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct BlowupTree {
    pub charts: Vec<Chart>,
    pub exceptional: Vec<ExceptionalDivisor>,
    pub singular_points: Vec<SingularPointRec>,
    pub excluded: Vec<ExcludedPoint>,
    pub blowup_count: usize,
}

impl BlowupTree {
    pub fn all_reduced(&self) -> bool {
        self.singular_points
            .iter()
            .all(|s| s.status == PointStatus::Reduced)
    }

    /// Divisors through a given point of a chart.
    fn divisors_through(&self, chart: usize, p: (&GaussRat, &GaussRat)) -> Vec<usize> {
        self.exceptional
            .iter()
            .filter(|d| {
                d.local_eqs
                    .iter()
                    .any(|(c, eq)| *c == chart && eq.eval(p.0, p.1).is_zero())
            })
            .map(|d| d.id)
            .collect()
    }
}

/// Result of a single blow-up at a point.
#[derive(Clone, Debug)]
pub struct BlowupCharts {
    /// Pullback in the chart (x, y) -> (x, x y); exceptional divisor {x=0}.
    pub chart_x: RationalVF2,
    /// Pullback in the chart (x, y) -> (x y, y); exceptional divisor {y=0}.
    pub chart_y: RationalVF2,
    /// False when the exceptional divisor is invariant (non-dicritical).
    pub dicritical: bool,
    /// Order of the pulled-back vector field along the exceptional divisor.
    pub vf_multiplicity: i64,
}

/// Blow up a vector field at a point.
///
/// The point must be a singular point of the induced foliation unless
/// `allow_regular` is set.
pub fn blow_up_at(
    vf: &RationalVF2,
    point: (&GaussRat, &GaussRat),
    allow_regular: bool,
) -> Result<BlowupCharts, ReductionError> {
    let local = vf.shift(point.0, point.1);
    let (_, fol) = local.multiplier_and_foliation();
    let on_pole = local.px.den().eval(&GaussRat::zero(), &GaussRat::zero()).is_zero()
        || local.py.den().eval(&GaussRat::zero(), &GaussRat::zero()).is_zero();
    if !allow_regular
        && !on_pole
        && !fol.is_singular_at(&GaussRat::zero(), &GaussRat::zero())
    {
        return Err(ReductionError::NotSingular);
    }
    Ok(blow_up_origin(&local))
}

fn blow_up_origin(local: &RationalVF2) -> BlowupCharts {
    let x = BiPoly::x();
    let y = BiPoly::y();
    let xy = x.mul(&y);
    // Chart X: (x, y) -> (x, x y)
    let px_a = local.px.subst(&x, &xy);
    let py_raw = local.py.subst(&x, &xy);
    let y_fn = RationalFn2::from_poly(y.clone());
    let x_fn = RationalFn2::from_poly(x.clone());
    let py_a = py_raw.sub(&y_fn.mul(&px_a)).div(&x_fn);
    let chart_x = RationalVF2::new(px_a, py_a);
    // Chart Y: (x, y) -> (x y, y)
    let py_b = local.py.subst(&xy, &y);
    let px_raw = local.px.subst(&xy, &y);
    let px_b = px_raw.sub(&x_fn.mul(&py_b)).div(&y_fn);
    let chart_y = RationalVF2::new(px_b, py_b);
    // Invariance of the exceptional divisor, tested on the saturated
    // foliation in chart X (chart Y agrees away from a single direction, and
    // at that direction chart Y's own test is used below when needed).
    let (_, fol_x) = chart_x.multiplier_and_foliation();
    let (_, fol_y) = chart_y.multiplier_and_foliation();
    let inv_x = fol_x.p.valuation_in(Var::X).map(|v| v >= 1).unwrap_or(true);
    let inv_y = fol_y.q.valuation_in(Var::Y).map(|v| v >= 1).unwrap_or(true);
    let dicritical = !(inv_x && inv_y);
    let vf_multiplicity = {
        let vx = chart_x.px.valuation_along(&x);
        let vy = chart_x.py.valuation_along(&x);
        match (vx, vy) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!("vf nonzero"),
        }
    };
    BlowupCharts {
        chart_x,
        chart_y,
        dicritical,
        vf_multiplicity,
    }
}

/// Verdict of the reduced-vector-field test at one point.
#[derive(Clone, Debug)]
pub struct ReducednessVerdict {
    pub foliation_reduced: bool,
    pub vf_reduced: bool,
    pub witnesses: Vec<String>,
    pub eigen_class: Option<EigenRatioClass>,
}

/// Test Seidenberg reducedness of the foliation plus normal crossings of the
/// divisor with the separatrices (or the integral curve) at a point.
pub fn check_reduced(vf: &RationalVF2, point: (&GaussRat, &GaussRat)) -> ReducednessVerdict {
    let local = vf.shift(point.0, point.1);
    let (f, fol) = local.multiplier_and_foliation();
    let zero = GaussRat::zero();
    let singular = fol.is_singular_at(&zero, &zero);
    let mut witnesses = Vec::new();
    let h = local.divisor_equation();
    let h_through = !h.is_constant() && h.eval(&zero, &zero).is_zero();

    if !singular {
        // Regular point: the relevant curve is the divisor plus the integral
        // curve of the foliation through the point.
        let (dirx, diry) = (fol.p.eval(&zero, &zero), fol.q.eval(&zero, &zero));
        let nc = normal_crossing_regular(&fol, &h, h_through, (&dirx, &diry), &mut witnesses);
        return ReducednessVerdict {
            foliation_reduced: true,
            vf_reduced: nc,
            witnesses,
            eigen_class: None,
        };
    }

    let m = fol.linear_part_at(&zero, &zero);
    let class = vf::eigen_ratio_class(&m);
    let fol_reduced = class.is_reduced();
    if !fol_reduced {
        witnesses.push(format!(
            "foliation not reduced: eigenvalue class {:?}",
            class
        ));
        return ReducednessVerdict {
            foliation_reduced: false,
            vf_reduced: false,
            witnesses,
            eigen_class: Some(class),
        };
    }
    let nc = normal_crossing_singular(&f, &fol, &class, &h, h_through, &mut witnesses);
    ReducednessVerdict {
        foliation_reduced: true,
        vf_reduced: nc,
        witnesses,
        eigen_class: Some(class),
    }
}

/// Local branch inventory at a regular point of the foliation.
fn normal_crossing_regular(
    fol: &FoliationGen,
    h: &BiPoly,
    h_through: bool,
    dirv: (&GaussRat, &GaussRat),
    witnesses: &mut Vec<String>,
) -> bool {
    if !h_through {
        return true;
    }
    // Integral-curve jet through the origin.
    let leaf = if !dirv.0.is_zero() {
        let slope = dirv.1 / dirv.0;
        graph_jet_y_of_x(fol, &slope, JET_ORDER).ok().map(|s| (false, s))
    } else {
        let slope = dirv.0 / dirv.1;
        graph_jet_x_of_y(fol, &slope, JET_ORDER).ok().map(|s| (true, s))
    };
    let Some((swapped, leafjet)) = leaf else {
        witnesses.push("could not compute leaf jet".to_string());
        return false;
    };
    let leaf_dir = (dirv.0.clone(), dirv.1.clone());
    let restricted = if swapped {
        jets::eval_along_graph_x(h, &leafjet, JET_ORDER)
    } else {
        jets::eval_along_graph(h, &leafjet, JET_ORDER)
    };
    let leaf_in_h = restricted.is_zero() || restricted.valuation_at_zero().is_none();
    match tangent_cone_at_origin(h) {
        TangentCone::Missing => true,
        TangentCone::Smooth(dir) => {
            if leaf_in_h {
                // The divisor branch is the integral curve itself.
                true
            } else if directions_parallel(&dir, &leaf_dir) {
                witnesses.push(
                    "divisor branch tangent to the integral curve (not a crossing)".to_string(),
                );
                false
            } else {
                // Transverse divisor branch and the leaf: two smooth
                // transversal curves.
                true
            }
        }
        TangentCone::Node => {
            if leaf_in_h {
                // Leaf is one of the two node branches; the other is
                // transverse: normal crossing.
                true
            } else {
                witnesses.push(
                    "two divisor branches and the integral curve meet at one point".to_string(),
                );
                false
            }
        }
        TangentCone::DoubleTangent(_) => {
            witnesses.push("divisor has a non-nodal double point".to_string());
            false
        }
        TangentCone::Higher(m) => {
            witnesses.push(format!("{} divisor branches through one point", m));
            false
        }
    }
}

fn directions_parallel(a: &(GaussRat, GaussRat), b: &(GaussRat, GaussRat)) -> bool {
    (&a.0 * &b.1) == (&a.1 * &b.0)
}

/// Branch inventory at a reduced singular point.
fn normal_crossing_singular(
    f: &RationalFn2,
    fol: &FoliationGen,
    class: &EigenRatioClass,
    h: &BiPoly,
    h_through: bool,
    witnesses: &mut Vec<String>,
) -> bool {
    let _ = f;
    if !h_through {
        return true;
    }
    // Split the divisor into invariant and transverse parts: an irreducible
    // component C divides X(h) iff it is invariant.
    let lie = fol.lie(h);
    let h_inv = if lie.is_zero() {
        h.clone()
    } else {
        bipoly::gcd(h, &lie)
    };
    let h_tr = h.div_exact(&h_inv).expect("gcd divides");
    let zero = GaussRat::zero();
    let tr_through = !h_tr.is_constant() && h_tr.eval(&zero, &zero).is_zero();

    match class {
        EigenRatioClass::OneZeroNonNilpotent => {
            // Saddle-node: strong separatrix plus possibly a transverse
            // branch is still a normal crossing; anything tangential fails.
            saddle_node_crossing(fol, h, &h_inv, h_tr.clone(), tr_through, witnesses)
        }
        _ => {
            // Non-degenerate: two separatrices through the point. Any
            // transverse divisor branch makes >= 3 curves through the point.
            if tr_through {
                witnesses.push(
                    "non-invariant divisor branch through a non-degenerate singular point"
                        .to_string(),
                );
                return false;
            }
            nondegenerate_crossing(fol, h, witnesses)
        }
    }
}

fn nondegenerate_crossing(
    fol: &FoliationGen,
    h: &BiPoly,
    witnesses: &mut Vec<String>,
) -> bool {
    let zero = GaussRat::zero();
    let m = fol.linear_part_at(&zero, &zero);
    let sep = separatrix_jets(fol, &m);
    match tangent_cone_at_origin(h) {
        TangentCone::Missing => true,
        TangentCone::Smooth(dir) => {
            // Single invariant branch: must be one of the separatrices. When
            // separatrix jets are available, check containment; tangency
            // without containment is a failure.
            match sep {
                Some(seps) => {
                    for s in &seps {
                        if directions_parallel(&dir, &s.dir) {
                            return if s.contains(h) {
                                true
                            } else {
                                witnesses.push(
                                    "divisor branch tangent to a separatrix but distinct from it"
                                        .to_string(),
                                );
                                false
                            };
                        }
                    }
                    witnesses.push(
                        "invariant divisor branch not aligned with any separatrix".to_string(),
                    );
                    false
                }
                None => {
                    // Irrational eigendirections; invariance of the branch
                    // was already established, and a smooth invariant curve
                    // through a reduced non-degenerate point is a separatrix.
                    true
                }
            }
        }
        TangentCone::Node => {
            // Two invariant branches: they must be the two separatrices.
            match sep {
                Some(seps) => {
                    let ok = seps.iter().all(|s| direction_on_cone(h, &s.dir) && s.contains(h));
                    if !ok {
                        witnesses.push(
                            "divisor node not formed by the two separatrices".to_string(),
                        );
                    }
                    ok
                }
                None => true,
            }
        }
        TangentCone::DoubleTangent(_) => {
            witnesses.push("divisor has a non-nodal double point at the singularity".to_string());
            false
        }
        TangentCone::Higher(m) => {
            witnesses.push(format!("{} divisor branches at the singularity", m));
            false
        }
    }
}

fn saddle_node_crossing(
    fol: &FoliationGen,
    h: &BiPoly,
    _h_inv: &BiPoly,
    _h_tr: BiPoly,
    _tr_through: bool,
    witnesses: &mut Vec<String>,
) -> bool {
    // Align coordinates so the strong separatrix is tangent to the x-axis.
    let aligned = align_saddle_node(fol);
    let Some((fol_a, t)) = aligned else {
        witnesses.push("saddle-node alignment failed".to_string());
        return false;
    };
    let h_a = jets::transform_scalar(h, &t);
    let strong = match graph_jet_y_of_x(&fol_a, &GaussRat::zero(), JET_ORDER) {
        Ok(s) => s,
        Err(_) => {
            witnesses.push("strong separatrix jet not solvable".to_string());
            return false;
        }
    };
    match tangent_cone_at_origin(&h_a) {
        TangentCone::Missing => true,
        TangentCone::Smooth(dir) => {
            let strong_dir = (GaussRat::one(), GaussRat::zero());
            if directions_parallel(&dir, &strong_dir) {
                let restricted = jets::eval_along_graph(&h_a, &strong, JET_ORDER);
                if restricted.valuation_at_zero().is_none() {
                    true
                } else {
                    witnesses.push(
                        "divisor branch tangent to the strong separatrix but distinct".to_string(),
                    );
                    false
                }
            } else {
                // A single branch transverse to the strong separatrix: two
                // smooth transversal curves (strong separatrix + branch).
                // Tangency against the formal weak manifold is noted but not
                // failed: convergence is undecidable from jets.
                if let Ok(weak) = graph_jet_x_of_y(&fol_a, &GaussRat::zero(), JET_ORDER) {
                    let hsw = jets::eval_along_graph_x(&h_a, &weak, JET_ORDER);
                    if directions_parallel(&dir, &(GaussRat::zero(), GaussRat::one()))
                        && hsw.valuation_at_zero().map(|v| v >= 2).unwrap_or(false)
                    {
                        witnesses.push(
                            "note: divisor branch tangent to the formal weak manifold".to_string(),
                        );
                    }
                }
                true
            }
        }
        TangentCone::Node => {
            // Strong separatrix + one transverse branch can form the node.
            let strong_dir = (GaussRat::one(), GaussRat::zero());
            if direction_on_cone(&h_a, &strong_dir) {
                true
            } else {
                witnesses.push(
                    "divisor node at a saddle-node not containing the strong separatrix"
                        .to_string(),
                );
                false
            }
        }
        TangentCone::DoubleTangent(_) => {
            witnesses.push("divisor has a non-nodal double point at the saddle-node".to_string());
            false
        }
        TangentCone::Higher(m) => {
            witnesses.push(format!("{} divisor branches at the saddle-node", m));
            false
        }
    }
}

pub(crate) struct SeparatrixJet {
    pub dir: (GaussRat, GaussRat),
    /// Jet as a graph in aligned coordinates together with the transform.
    pub jet: crate::algebra::unipoly::UniPoly,
    pub transform: crate::algebra::vf::Mat2,
    pub swapped: bool,
}

impl SeparatrixJet {
    /// Does the curve {h = 0} contain this separatrix to jet order?
    pub fn contains(&self, h: &BiPoly) -> bool {
        let h_a = jets::transform_scalar(h, &self.transform);
        let restricted = if self.swapped {
            jets::eval_along_graph_x(&h_a, &self.jet, JET_ORDER)
        } else {
            jets::eval_along_graph(&h_a, &self.jet, JET_ORDER)
        };
        restricted.valuation_at_zero().is_none()
    }
}

/// Separatrix jets of a reduced non-degenerate singularity, when the
/// eigenvalues (hence eigendirections) are exact.
pub(crate) fn separatrix_jets(
    fol: &FoliationGen,
    m: &crate::algebra::vf::Mat2,
) -> Option<Vec<SeparatrixJet>> {
    let (l1, l2) = vf::eigenvalues_exact(m)?;
    if l1 == l2 {
        return None;
    }
    let v1 = vf::eigenvector(m, &l1);
    let v2 = vf::eigenvector(m, &l2);
    // Transform sending the eigenframe to the axes: columns v1, v2.
    let t: crate::algebra::vf::Mat2 = [
        [v1.0.clone(), v2.0.clone()],
        [v1.1.clone(), v2.1.clone()],
    ];
    let fol_a = transform_foliation(fol, &t).ok()?;
    let sx = graph_jet_y_of_x(&fol_a, &GaussRat::zero(), JET_ORDER).ok()?;
    let sy = graph_jet_x_of_y(&fol_a, &GaussRat::zero(), JET_ORDER).ok()?;
    Some(vec![
        SeparatrixJet {
            dir: v1,
            jet: sx,
            transform: t.clone(),
            swapped: false,
        },
        SeparatrixJet {
            dir: v2,
            jet: sy,
            transform: t,
            swapped: true,
        },
    ])
}

/// Coordinates aligned so that the strong (nonzero-eigenvalue) direction of a
/// saddle-node is the x-axis and the kernel direction the y-axis.
pub(crate) fn align_saddle_node(
    fol: &FoliationGen,
) -> Option<(FoliationGen, crate::algebra::vf::Mat2)> {
    let zero = GaussRat::zero();
    let m = fol.linear_part_at(&zero, &zero);
    let trace = vf::mat2_trace(&m);
    if trace.is_zero() {
        return None;
    }
    let strong = vf::eigenvector(&m, &trace);
    let weak = vf::eigenvector(&m, &GaussRat::zero());
    let t: crate::algebra::vf::Mat2 = [
        [strong.0.clone(), weak.0.clone()],
        [strong.1.clone(), weak.1.clone()],
    ];
    let fol_a = transform_foliation(fol, &t).ok()?;
    Some((fol_a, t))
}

/// Full reduction by iterated blow-ups.
pub fn reduce(vf: &RationalVF2, max_depth: usize) -> Result<BlowupTree, ReductionError> {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    let mut tree = BlowupTree::default();
    tree.charts.push(Chart {
        id: 0,
        parent: None,
        center: (GaussRat::zero(), GaussRat::zero()),
        kind: None,
        vf: vf.clone(),
    });

    // Work queue of points to examine: (chart, point).
    let mut queue: Vec<(usize, (GaussRat, GaussRat))> = Vec::new();
    let initial = candidate_points(vf, None, &mut tree.excluded, 0);
    queue.extend(initial.into_iter().map(|p| (0usize, p)));

    let mut processed: Vec<(usize, (GaussRat, GaussRat))> = Vec::new();
    while let Some((chart_id, point)) = queue.pop() {
        if processed.iter().any(|(c, p)| *c == chart_id && *p == point) {
            continue;
        }
        processed.push((chart_id, point.clone()));
        let chart_vf = tree.charts[chart_id].vf.clone();
        let verdict = check_reduced(&chart_vf, (&point.0, &point.1));
        let local = chart_vf.shift(&point.0, &point.1);
        let (_, fol) = local.multiplier_and_foliation();
        let zero = GaussRat::zero();
        let singular = fol.is_singular_at(&zero, &zero);

        if verdict.foliation_reduced && verdict.vf_reduced {
            if singular {
                let on_divisors = tree.divisors_through(chart_id, (&point.0, &point.1));
                tree.singular_points.push(SingularPointRec {
                    chart: chart_id,
                    point,
                    status: PointStatus::Reduced,
                    eigen_class: verdict.eigen_class.unwrap(),
                    on_divisors,
                });
            }
            continue;
        }

        // Needs a blow-up.
        if tree.blowup_count >= max_depth {
            if singular {
                let on_divisors = tree.divisors_through(chart_id, (&point.0, &point.1));
                tree.singular_points.push(SingularPointRec {
                    chart: chart_id,
                    point,
                    status: PointStatus::NonReduced,
                    eigen_class: verdict
                        .eigen_class
                        .unwrap_or(EigenRatioClass::BothZero),
                    on_divisors,
                });
            }
            return Err(ReductionError::DepthExceeded {
                max_depth,
                partial: Box::new(tree),
            });
        }
        let outcome = blow_up_at(&chart_vf, (&point.0, &point.1), true)?;
        tree.blowup_count += 1;

        // New charts.
        let id_x = tree.charts.len();
        tree.charts.push(Chart {
            id: id_x,
            parent: Some(chart_id),
            center: point.clone(),
            kind: Some(BlowupChartKind::XMain),
            vf: outcome.chart_x.clone(),
        });
        let id_y = tree.charts.len();
        tree.charts.push(Chart {
            id: id_y,
            parent: Some(chart_id),
            center: point.clone(),
            kind: Some(BlowupChartKind::YMain),
            vf: outcome.chart_y.clone(),
        });

        // Update divisors passing through the center: their strict
        // transforms lose 1 from the self-intersection and get local
        // equations in the new charts.
        let through = tree.divisors_through(chart_id, (&point.0, &point.1));
        for d in &mut tree.exceptional {
            if !through.contains(&d.id) {
                continue;
            }
            d.self_intersection -= 1;
            let eq = d
                .local_eqs
                .iter()
                .find(|(c, _)| *c == chart_id)
                .map(|(_, e)| e.clone())
                .expect("equation in parent chart");
            let centered = eq.shift(&point.0, &point.1);
            // Strict transform in chart X: substitute and strip E-powers.
            let ex = centered.subst(&BiPoly::x(), &BiPoly::x().mul(&BiPoly::y()));
            if let Some(v) = ex.valuation_in(Var::X) {
                let mut strict = ex;
                for _ in 0..v {
                    strict = strict.div_exact(&BiPoly::x()).unwrap();
                }
                if !strict.is_constant() {
                    d.local_eqs.push((id_x, strict));
                }
            }
            let ey = centered.subst(&BiPoly::x().mul(&BiPoly::y()), &BiPoly::y());
            if let Some(v) = ey.valuation_in(Var::Y) {
                let mut strict = ey;
                for _ in 0..v {
                    strict = strict.div_exact(&BiPoly::y()).unwrap();
                }
                if !strict.is_constant() {
                    d.local_eqs.push((id_y, strict));
                }
            }
        }

        // The new exceptional divisor.
        let div_id = tree.exceptional.len();
        tree.exceptional.push(ExceptionalDivisor {
            id: div_id,
            self_intersection: -1,
            invariant: !outcome.dicritical,
            vf_multiplicity: outcome.vf_multiplicity,
            local_eqs: vec![(id_x, BiPoly::x()), (id_y, BiPoly::y())],
        });

        // Candidate points on the exceptional divisor in both charts.
        let cx = candidate_points(&outcome.chart_x, Some(Var::X), &mut tree.excluded, id_x);
        queue.extend(cx.into_iter().map(|p| (id_x, p)));
        let cy = candidate_points(&outcome.chart_y, Some(Var::Y), &mut tree.excluded, id_y);
        // Chart Y only contributes points not visible in chart X: on the
        // divisor {y=0} these are exactly the points with x = 0.
        queue.extend(
            cy.into_iter()
                .filter(|p| p.0.is_zero())
                .map(|p| (id_y, p)),
        );
    }
    Ok(tree)
}

/// Build the tree of exactly one blow-up at a point (override allowed),
/// recording the singular points on the exceptional divisor. Used for
/// Camacho-Sad bookkeeping on single blow-ups.
pub fn single_blowup_tree(
    vf: &RationalVF2,
    point: (&GaussRat, &GaussRat),
) -> Result<BlowupTree, ReductionError> {
    let out = blow_up_at(vf, point, true)?;
    let mut tree = BlowupTree {
        charts: vec![
            Chart {
                id: 0,
                parent: None,
                center: (GaussRat::zero(), GaussRat::zero()),
                kind: None,
                vf: vf.clone(),
            },
            Chart {
                id: 1,
                parent: Some(0),
                center: (point.0.clone(), point.1.clone()),
                kind: Some(BlowupChartKind::XMain),
                vf: out.chart_x.clone(),
            },
            Chart {
                id: 2,
                parent: Some(0),
                center: (point.0.clone(), point.1.clone()),
                kind: Some(BlowupChartKind::YMain),
                vf: out.chart_y.clone(),
            },
        ],
        exceptional: vec![ExceptionalDivisor {
            id: 0,
            self_intersection: -1,
            invariant: !out.dicritical,
            vf_multiplicity: out.vf_multiplicity,
            local_eqs: vec![(1, BiPoly::x()), (2, BiPoly::y())],
        }],
        singular_points: vec![],
        excluded: vec![],
        blowup_count: 1,
    };
    let record = |chart_id: usize, vfc: &RationalVF2, only: Var, tree: &mut BlowupTree| {
        let (_, fol) = vfc.multiplier_and_foliation();
        if let Ok(sols) = solve::common_zeros(&fol.p, &fol.q) {
            for (a, b) in sols.exact {
                let on_axis = match only {
                    Var::X => a.is_zero(),
                    Var::Y => b.is_zero(),
                };
                if !on_axis {
                    continue;
                }
                if chart_id == 2 && !a.is_zero() {
                    // Only the point missed by chart X (the y-direction).
                    continue;
                }
                let m = fol.linear_part_at(&a, &b);
                let class = vf::eigen_ratio_class(&m);
                let status = if class.is_reduced() {
                    PointStatus::Reduced
                } else {
                    PointStatus::NonReduced
                };
                tree.singular_points.push(SingularPointRec {
                    chart: chart_id,
                    point: (a, b),
                    status,
                    eigen_class: class,
                    on_divisors: vec![0],
                });
            }
            for (a, b) in sols.unresolved {
                tree.excluded.push(ExcludedPoint {
                    chart: chart_id,
                    approx: (a, b),
                    reason: "singular point at non-Q(i) coordinates".into(),
                });
            }
        }
    };
    let cx = out.chart_x.clone();
    let cy = out.chart_y.clone();
    record(1, &cx, Var::X, &mut tree);
    record(2, &cy, Var::Y, &mut tree);
    // Deduplicate the chart-Y record of points already seen in chart X:
    // handled by the x != 0 filter above.
    Ok(tree)
}

/// Points of interest of a vector field: singular points of the saturated
/// foliation plus candidate normal-crossing failures of the divisor
/// (singular points of the divisor curve and divisor-leaf tangencies).
/// With `only_on` set, restricts to points on that coordinate axis.
fn candidate_points(
    vf: &RationalVF2,
    only_on: Option<Var>,
    excluded: &mut Vec<ExcludedPoint>,
    chart_id: usize,
) -> Vec<(GaussRat, GaussRat)> {
    let (_, fol) = vf.multiplier_and_foliation();
    let mut pts: Vec<(GaussRat, GaussRat)> = Vec::new();
    let push = |p: (GaussRat, GaussRat), pts: &mut Vec<(GaussRat, GaussRat)>| {
        if let Some(v) = only_on {
            let coord = match v {
                Var::X => &p.0,
                Var::Y => &p.1,
            };
            if !coord.is_zero() {
                return;
            }
        }
        if !pts.contains(&p) {
            pts.push(p);
        }
    };

    let note_unresolved = |sols: &solve::SystemSolutions, what: &str, excluded: &mut Vec<ExcludedPoint>| {
        for &(a, b) in &sols.unresolved {
            excluded.push(ExcludedPoint {
                chart: chart_id,
                approx: (a, b),
                reason: format!("{} at non-Q(i) coordinates", what),
            });
        }
    };

    // Singular points of the foliation.
    match solve::common_zeros(&fol.p, &fol.q) {
        Ok(sols) => {
            note_unresolved(&sols, "singular point", excluded);
            for p in sols.exact {
                push(p, &mut pts);
            }
        }
        Err(_) => { /* one component identically zero: no isolated zeros */ }
    }

    // Divisor curve analysis.
    let h = vf.divisor_equation();
    if !h.is_constant() && !h.is_zero() {
        // Singular points of {h = 0}.
        if let Ok(sols) = solve::common_zeros(&h.derivative(Var::X), &h.derivative(Var::Y)) {
            note_unresolved(&sols, "divisor curve singularity", excluded);
            for p in sols.exact {
                if h.eval(&p.0, &p.1).is_zero() {
                    push(p, &mut pts);
                }
            }
        }
        // Tangency candidates of the non-invariant part with the foliation,
        // and crossings of the non-invariant with the invariant part.
        let lie = fol.lie(&h);
        let h_inv = if lie.is_zero() {
            h.clone()
        } else {
            bipoly::gcd(&h, &lie)
        };
        let h_tr = h.div_exact(&h_inv).expect("gcd divides");
        if !h_tr.is_constant() {
            let lie_tr = fol.lie(&h_tr);
            if let Ok(sols) = solve::common_zeros(&h_tr, &lie_tr) {
                note_unresolved(&sols, "divisor-leaf tangency", excluded);
                for p in sols.exact {
                    push(p, &mut pts);
                }
            }
            if !h_inv.is_constant() {
                if let Ok(sols) = solve::common_zeros(&h_tr, &h_inv) {
                    note_unresolved(&sols, "divisor crossing", excluded);
                    for p in sols.exact {
                        push(p, &mut pts);
                    }
                }
            }
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::{parse_poly, parse_vf};

    fn vf_of(src: &str) -> RationalVF2 {
        parse_vf(src, ("x", "y")).unwrap()
    }

    fn origin() -> (GaussRat, GaussRat) {
        (GaussRat::zero(), GaussRat::zero())
    }

    #[test]
    fn radial_blowup_is_dicritical() {
        let vf = vf_of("(x, y)");
        let o = origin();
        let out = blow_up_at(&vf, (&o.0, &o.1), false).unwrap();
        assert!(out.dicritical);
        // chart X pullback of the radial field: x d/dx + 0 d/dy
        assert_eq!(out.chart_x.px.num().clone(), BiPoly::x());
        assert!(out.chart_x.py.is_zero());
    }

    #[test]
    fn rotation_blowup_invariant_with_two_singularities() {
        let vf = vf_of("(y, -x)");
        let o = origin();
        let out = blow_up_at(&vf, (&o.0, &o.1), false).unwrap();
        assert!(!out.dicritical);
        // Singularities on the divisor at v = +-i (hand blow-up oracle:
        // pullback x v d/dx - (1 + v^2) d/dv).
        let (_, fol) = out.chart_x.multiplier_and_foliation();
        let on_divisor = fol.p.specialize(Var::X, &GaussRat::zero());
        let _ = on_divisor;
        let r = fol.q.specialize(Var::X, &GaussRat::zero());
        // q on x=0 vanishes at y = +-i
        assert!(r.eval(&GaussRat::i()).is_zero());
        assert!(r.eval(&(-GaussRat::i())).is_zero());
    }

    #[test]
    fn regular_point_rejected_without_override() {
        let vf = vf_of("(1, x)");
        let o = origin();
        assert!(matches!(
            blow_up_at(&vf, (&o.0, &o.1), false),
            Err(ReductionError::NotSingular)
        ));
        assert!(blow_up_at(&vf, (&o.0, &o.1), true).is_ok());
    }

    #[test]
    fn already_reduced_field_reduces_with_zero_blowups() {
        let vf = vf_of("(x, -y)");
        let tree = reduce(&vf, 10).unwrap();
        assert_eq!(tree.blowup_count, 0);
        assert!(tree.all_reduced());
        assert_eq!(tree.singular_points.len(), 1);
    }

    #[test]
    fn cusp_reduces_in_three_blowups() {
        // 2y d/dx + 3x^2 d/dy: first integral y^2 - x^3.
        let vf = vf_of("(2*y, 3*x^2)");
        let tree = reduce(&vf, 10).unwrap();
        assert_eq!(tree.blowup_count, 3);
        assert!(tree.all_reduced());
        // Hand oracle: final exceptional divisor carries three reduced
        // singularities; the full tree has exactly those three.
        assert_eq!(tree.singular_points.len(), 3);
        use num_rational::BigRational;
        let mut ratios: Vec<BigRational> = tree
            .singular_points
            .iter()
            .map(|s| match &s.eigen_class {
                EigenRatioClass::RatioNegativeRational(r) => {
                    // normalize representative to |r| <= 1
                    if r.numer().magnitude() > r.denom().magnitude() {
                        r.recip()
                    } else {
                        r.clone()
                    }
                }
                other => panic!("unexpected class {:?}", other),
            })
            .collect();
        ratios.sort();
        let expect = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(ratios, vec![expect(-1, 2), expect(-1, 3), expect(-1, 6)]);
    }

    #[test]
    fn positive_ratio_two_to_one_needs_two_blowups() {
        // x d/dx + 2y d/dy: ratio 2 in Q+; one blow-up leaves a radial point
        // whose own blow-up is dicritical.
        let vf = vf_of("(x, 2*y)");
        let tree = reduce(&vf, 10).unwrap();
        assert_eq!(tree.blowup_count, 2);
        assert!(tree.all_reduced());
        assert!(tree.exceptional.iter().any(|d| !d.invariant));
    }

    #[test]
    fn check_reduced_examples() {
        // y^2 d/dx at a point of {y=0}: reduced as a vector field.
        let vf = vf_of("(y^2, 0)");
        let o = origin();
        let v = check_reduced(&vf, (&o.0, &o.1));
        assert!(v.foliation_reduced);
        assert!(v.vf_reduced);

        // x y (2x d/dx - y d/dy): node divisor formed by the separatrices.
        let vf = vf_of("x*y*(2*x, -y)");
        let v = check_reduced(&vf, (&o.0, &o.1));
        assert!(v.foliation_reduced);
        assert!(v.vf_reduced);

        // (x - y^2)(x d/dx - y d/dy): zero curve tangent to separatrix x=0.
        let vf = vf_of("(x - y^2)*(x, -y)");
        let v = check_reduced(&vf, (&o.0, &o.1));
        assert!(v.foliation_reduced);
        assert!(!v.vf_reduced);
        assert!(!v.witnesses.is_empty());
    }

    #[test]
    fn chart_consistency_pushforward() {
        // Push the chart-X pullback forward and compare with the original.
        let vf = vf_of("(2*y, 3*x^2)");
        let o = origin();
        let out = blow_up_at(&vf, (&o.0, &o.1), false).unwrap();
        let xt = out.chart_x;
        // Inverse substitution: (x, y) with chart coords (x, y/x).
        let sx = RationalFn2::from_poly(BiPoly::x());
        let sy = RationalFn2::new(BiPoly::y(), BiPoly::x());
        let px = xt.px.subst_rational(&sx, &sy);
        let py_chart = xt.py.subst_rational(&sx, &sy);
        // y = x * v so py = v * px + x * pv with v = y/x.
        let v = RationalFn2::new(BiPoly::y(), BiPoly::x());
        let py = v.mul(&px).add(&RationalFn2::from_poly(BiPoly::x()).mul(&py_chart));
        assert_eq!(px, vf.px);
        assert_eq!(py, vf.py);
    }

    #[test]
    fn tangent_divisor_forces_extra_blowups() {
        let vf = vf_of("(x - y^2)*(x, -y)");
        let tree = reduce(&vf, 12).unwrap();
        assert!(tree.blowup_count >= 1);
        assert!(tree.all_reduced());
    }

    #[test]
    fn divisor_equation_squarefree() {
        let vf = vf_of("x^2*y*(1, x)");
        let h = vf.divisor_equation();
        let expect = parse_poly("x*y", ("x", "y")).unwrap().normalized();
        assert_eq!(h, expect);
    }
}
