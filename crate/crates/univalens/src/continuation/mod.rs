//! Numerical analytic continuation of vector-field solutions along paths in
//! complex time, determination counting on parametrized leaves, and residual
//! verification of closed-form solutions.

pub mod dopri;
pub mod weierstrass;

use crate::algebra::bipoly::BiPoly;
use crate::algebra::vf::RationalVF2;
use dopri::{integrate_segment, OdeRhs, SegmentOutcome, StepperOpts};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Error)]
pub enum ContinuationError {
    #[error("start point lies on the pole locus")]
    StartOnPoleLocus,
    #[error("path invalid: {0}")]
    BadPath(String),
    #[error("leaf specification inconsistent with the field (residual {0:.3e})")]
    InconsistentLeaf(f64),
    #[error("integration failed: {0}")]
    StepFailure(String),
    #[error("Weierstrass evaluation failed: {0}")]
    Weierstrass(#[from] weierstrass::WpError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathKind {
    Segment,
    Loop,
    LatticeLoop { period: (f64, f64) },
}

/// A path in the time plane, as straight segments between waypoints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathSpec {
    #[serde(flatten)]
    pub kind: PathKind,
    /// Waypoints as (re, im) pairs.
    pub waypoints: Vec<(f64, f64)>,
}

impl PathSpec {
    pub fn segment(from: C, to: C) -> Self {
        PathSpec {
            kind: PathKind::Segment,
            waypoints: vec![(from.re, from.im), (to.re, to.im)],
        }
    }

    /// Closed polygonal loop around a center (regular n-gon).
    pub fn loop_around(center: C, radius: f64, sides: usize) -> Self {
        let mut pts = Vec::with_capacity(sides + 1);
        for k in 0..=sides {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (sides as f64);
            let p = center + C::new(radius * th.cos(), radius * th.sin());
            pts.push((p.re, p.im));
        }
        PathSpec {
            kind: PathKind::Loop,
            waypoints: pts,
        }
    }

    pub fn points(&self) -> Vec<C> {
        self.waypoints.iter().map(|&(a, b)| C::new(a, b)).collect()
    }

    pub fn validate(&self) -> Result<(), ContinuationError> {
        if self.waypoints.len() < 2 {
            return Err(ContinuationError::BadPath("need at least two waypoints".into()));
        }
        if matches!(self.kind, PathKind::Loop | PathKind::LatticeLoop { .. }) {
            let pts = self.points();
            let first = pts.first().unwrap();
            let last = pts.last().unwrap();
            if (first - last).norm() > 1e-12 {
                return Err(ContinuationError::BadPath(
                    "loops must be closed (first = last waypoint)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Concatenate with another path starting where this one ends.
    pub fn then(&self, other: &PathSpec) -> PathSpec {
        let mut w = self.waypoints.clone();
        w.extend(other.waypoints.iter().skip(1).cloned());
        PathSpec {
            kind: PathKind::Segment,
            waypoints: w,
        }
    }

    pub fn reversed(&self) -> PathSpec {
        let mut w = self.waypoints.clone();
        w.reverse();
        PathSpec {
            kind: self.kind.clone(),
            waypoints: w,
        }
    }
}

/// A polynomial/rational planar field compiled to fast complex evaluation.
#[derive(Clone, Debug)]
pub struct CompiledVF {
    comps: Vec<CompiledRational>,
}

#[derive(Clone, Debug)]
struct CompiledRational {
    num: Vec<(C, u32, u32)>,
    den: Vec<(C, u32, u32)>,
}

fn compile_poly(p: &BiPoly) -> Vec<(C, u32, u32)> {
    p.terms
        .iter()
        .map(|(&(i, j), c)| (c.to_complex(), i, j))
        .collect()
}

fn eval_terms(terms: &[(C, u32, u32)], x: C, y: C) -> C {
    let mut acc = C::new(0.0, 0.0);
    for &(c, i, j) in terms {
        acc += c * x.powu(i) * y.powu(j);
    }
    acc
}

impl CompiledVF {
    pub fn new(vf: &RationalVF2) -> Self {
        CompiledVF {
            comps: vec![
                CompiledRational {
                    num: compile_poly(vf.px.num()),
                    den: compile_poly(vf.px.den()),
                },
                CompiledRational {
                    num: compile_poly(vf.py.num()),
                    den: compile_poly(vf.py.den()),
                },
            ],
        }
    }

    pub fn eval(&self, x: C, y: C) -> Option<(C, C)> {
        let mut out = [C::new(0.0, 0.0); 2];
        for (k, comp) in self.comps.iter().enumerate() {
            let d = eval_terms(&comp.den, x, y);
            if d.norm() < 1e-300 {
                return None;
            }
            out[k] = eval_terms(&comp.num, x, y) / d;
        }
        Some((out[0], out[1]))
    }

    /// Smallest denominator magnitude: the pole-proximity indicator.
    pub fn proximity(&self, x: C, y: C) -> f64 {
        self.comps
            .iter()
            .map(|c| eval_terms(&c.den, x, y).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Autonomous planar rhs: state (x, y), time unused.
struct PlanarRhs<'a> {
    vf: &'a CompiledVF,
}

impl<'a> OdeRhs for PlanarRhs<'a> {
    fn eval(&self, _t: C, y: &[C], out: &mut [C]) -> Option<()> {
        let (a, b) = self.vf.eval(y[0], y[1])?;
        out[0] = a;
        out[1] = b;
        Some(())
    }

    fn pole_proximity(&self, _t: C, y: &[C]) -> f64 {
        self.vf.proximity(y[0], y[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Outcome {
    Completed,
    EscapedToPoleLocus {
        point: (crate::report::ComplexR, crate::report::ComplexR),
        at_time: crate::report::ComplexR,
    },
    StepFailure {
        message: String,
    },
}

#[derive(Clone, Debug)]
pub struct ContinuationResult {
    pub endpoint: (C, C),
    pub error_estimate: f64,
    pub outcome: Outcome,
    /// Dense output nodes (t, state) when requested.
    pub samples: Option<Vec<(C, Vec<C>)>>,
}

/// Continue the solution of a planar field from `start` along `path`.
pub fn continue_solution(
    vf: &RationalVF2,
    start: (C, C),
    path: &PathSpec,
    tol: f64,
    record_samples: bool,
) -> Result<ContinuationResult, ContinuationError> {
    path.validate()?;
    let compiled = CompiledVF::new(vf);
    continue_compiled(&compiled, start, path, tol, record_samples)
}

pub fn continue_compiled(
    vf: &CompiledVF,
    start: (C, C),
    path: &PathSpec,
    tol: f64,
    record_samples: bool,
) -> Result<ContinuationResult, ContinuationError> {
    if vf.eval(start.0, start.1).is_none() {
        return Err(ContinuationError::StartOnPoleLocus);
    }
    let rhs = PlanarRhs { vf };
    let mut opts = StepperOpts::from_tol(tol);
    opts.record_samples = record_samples;
    let pts = path.points();
    let mut y = vec![start.0, start.1];
    let mut err = 0.0;
    let mut samples: Vec<(C, Vec<C>)> = Vec::new();
    for w in pts.windows(2) {
        let res = integrate_segment(&rhs, w[0], w[1], &y, &opts);
        err += res.error_estimate;
        if record_samples {
            samples.extend(res.samples.iter().cloned());
        }
        match res.outcome {
            SegmentOutcome::Completed => {
                y = res.y;
            }
            SegmentOutcome::Escaped { at_fraction } => {
                let t = w[0] + (w[1] - w[0]) * at_fraction;
                return Ok(ContinuationResult {
                    endpoint: (res.y[0], res.y[1]),
                    error_estimate: err,
                    outcome: Outcome::EscapedToPoleLocus {
                        point: (res.y[0].into(), res.y[1].into()),
                        at_time: t.into(),
                    },
                    samples: record_samples.then_some(samples),
                });
            }
            SegmentOutcome::StepFailure { message, .. } => {
                return Ok(ContinuationResult {
                    endpoint: (res.y[0], res.y[1]),
                    error_estimate: err,
                    outcome: Outcome::StepFailure { message },
                    samples: record_samples.then_some(samples),
                });
            }
        }
    }
    Ok(ContinuationResult {
        endpoint: (y[0], y[1]),
        error_estimate: err,
        outcome: Outcome::Completed,
        samples: record_samples.then_some(samples),
    })
}

/// Identification of leaf points under a deck/quotient group.
#[derive(Clone, Debug)]
pub enum QuotientSpec {
    Trivial,
    /// Points (x, y) with y taken modulo the lattice spanned by the two
    /// periods, optionally together with the involution (x, y) -> (-x, -y).
    LatticeInY {
        periods: (C, C),
        sign_involution: bool,
    },
}

impl QuotientSpec {
    /// Minimal distance between two points modulo the identification.
    fn distance(&self, a: (C, C), b: (C, C)) -> f64 {
        match self {
            QuotientSpec::Trivial => ((a.0 - b.0).norm_sqr() + (a.1 - b.1).norm_sqr()).sqrt(),
            QuotientSpec::LatticeInY {
                periods,
                sign_involution,
            } => {
                let mut best = f64::INFINITY;
                let mut candidates = vec![b];
                if *sign_involution {
                    candidates.push((-b.0, -b.1));
                }
                for cand in candidates {
                    let dx = (a.0 - cand.0).norm();
                    let dy = lattice_distance(a.1 - cand.1, periods.0, periods.1);
                    best = best.min((dx * dx + dy * dy).sqrt());
                }
                best
            }
        }
    }
}

fn lattice_distance(z: C, w1: C, w2: C) -> f64 {
    // Solve z = a w1 + b w2 over R, reduce a, b to nearest integers.
    let det = w1.re * w2.im - w1.im * w2.re;
    if det.abs() < 1e-14 {
        return z.norm();
    }
    let a = (z.re * w2.im - z.im * w2.re) / det;
    let b = (w1.re * z.im - w1.im * z.re) / det;
    let fa = a - a.round();
    let fb = b - b.round();
    let mut best = f64::INFINITY;
    // Check the four neighbouring lattice translates of the rounded point.
    for da in [-1.0, 0.0, 1.0] {
        for db in [-1.0, 0.0, 1.0] {
            let r = (fa + da) * w1.re + (fb + db) * w2.re;
            let i = (fa + da) * w1.im + (fb + db) * w2.im;
            best = best.min((r * r + i * i).sqrt());
        }
    }
    best
}

/// A leaf with a distinguished starting point and a quotient identification.
#[derive(Clone, Debug)]
pub struct LeafSpec {
    pub start: (C, C),
    pub quotient: QuotientSpec,
    /// Optional rational first integral used to check leaf consistency.
    pub first_integral: Option<crate::algebra::rational::RationalFn2>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CountValue {
    Finite(u32),
    /// The loop orbit did not close within the probe budget. `verified`
    /// marks a numerically certified irrational period ratio.
    Infinite { verified: bool },
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterminationCount {
    pub count: CountValue,
    pub certified_lower_bound: u32,
    pub loops_tested: u32,
}

/// Count determinations of the solution on a leaf by transporting the start
/// point around generator loops and clustering the endpoints modulo the
/// leaf's identification.
pub fn count_determinations(
    leaf: &LeafSpec,
    vf: &RationalVF2,
    generators: &[PathSpec],
    tol: f64,
) -> Result<DeterminationCount, ContinuationError> {
    let compiled = CompiledVF::new(vf);
    // Leaf consistency: the first integral must be constant along a short
    // integration.
    if let Some(fi) = &leaf.first_integral {
        let probe = PathSpec::segment(C::new(0.0, 0.0), C::new(1e-2, 7e-3));
        let res = continue_compiled(&compiled, leaf.start, &probe, tol.min(1e-9), false)?;
        if let Outcome::Completed = res.outcome {
            let v0 = fi.eval_complex(leaf.start.0, leaf.start.1);
            let v1 = fi.eval_complex(res.endpoint.0, res.endpoint.1);
            let drift = (v0 - v1).norm() / (1.0 + v0.norm());
            if drift > 1e-5_f64.max(100.0 * tol) {
                return Err(ContinuationError::InconsistentLeaf(drift));
            }
        }
    }
    let mut max_count: u32 = 1;
    let mut distinct_total: u32 = 1;
    let mut any_unclosed = false;
    for g in generators {
        g.validate()?;
        let mut endpoints: Vec<(C, C)> = vec![leaf.start];
        let mut current = leaf.start;
        let mut closed = false;
        let max_iters = 16;
        let mut acc_err = 0.0;
        for _ in 0..max_iters {
            let res = continue_compiled(&compiled, current, g, tol, false)?;
            match res.outcome {
                Outcome::Completed => {}
                Outcome::EscapedToPoleLocus { .. } => {
                    return Err(ContinuationError::StepFailure(
                        "loop ran into the pole locus".into(),
                    ))
                }
                Outcome::StepFailure { message } => {
                    return Err(ContinuationError::StepFailure(message))
                }
            }
            acc_err += res.error_estimate;
            current = res.endpoint;
            // Clustering tolerance per the determination rule.
            let cluster = 1e3 * acc_err.max(tol);
            if leaf.quotient.distance(leaf.start, current) < cluster {
                closed = true;
                break;
            }
            if endpoints
                .iter()
                .all(|e| leaf.quotient.distance(*e, current) >= cluster)
            {
                endpoints.push(current);
            }
        }
        let n = endpoints.len() as u32;
        distinct_total = distinct_total.max(n);
        if closed {
            max_count = max_count.max(n);
        } else {
            any_unclosed = true;
        }
    }
    let count = if any_unclosed {
        CountValue::Infinite { verified: false }
    } else {
        CountValue::Finite(max_count)
    };
    Ok(DeterminationCount {
        count,
        certified_lower_bound: distinct_total,
        loops_tested: generators.len() as u32,
    })
}

/// A closed-form parametrized curve with exact derivative data.
pub trait SampledCurve {
    fn dim(&self) -> usize;
    /// Value and derivative at a sample time; `None` to skip (near a pole of
    /// the parametrization).
    fn value_and_derivative(&self, t: C) -> Option<(Vec<C>, Vec<C>)>;
}

/// A vector field on C^n for residual checks.
pub trait FieldEval {
    fn dim(&self) -> usize;
    fn eval(&self, y: &[C]) -> Option<Vec<C>>;
}

impl FieldEval for CompiledVF {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, y: &[C]) -> Option<Vec<C>> {
        let (a, b) = CompiledVF::eval(self, y[0], y[1])?;
        Some(vec![a, b])
    }
}

/// Closure-backed field.
pub struct FnField<F: Fn(&[C]) -> Option<Vec<C>>> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[C]) -> Option<Vec<C>>> FieldEval for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, y: &[C]) -> Option<Vec<C>> {
        (self.f)(y)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub max_residual: f64,
    pub samples_checked: usize,
    pub samples_skipped: usize,
    pub pass: bool,
    pub tolerance: f64,
}

/// Max over sample times of the relative residual |phi'(t) - X(phi(t))|.
pub fn verify_solution(
    curve: &dyn SampledCurve,
    field: &dyn FieldEval,
    times: &[C],
    tol: f64,
) -> VerificationReport {
    assert_eq!(curve.dim(), field.dim(), "dimension mismatch");
    let mut max_res: f64 = 0.0;
    let mut checked = 0;
    let mut skipped = 0;
    for &t in times {
        let Some((val, der)) = curve.value_and_derivative(t) else {
            skipped += 1;
            continue;
        };
        let Some(fx) = field.eval(&val) else {
            skipped += 1;
            continue;
        };
        let mut num = 0.0_f64;
        let mut scale = 1.0_f64;
        for (d, f) in der.iter().zip(fx.iter()) {
            num += (d - f).norm_sqr();
            scale += f.norm_sqr();
        }
        let res = num.sqrt() / scale.sqrt();
        max_res = max_res.max(res);
        checked += 1;
    }
    VerificationReport {
        max_residual: max_res,
        samples_checked: checked,
        samples_skipped: skipped,
        pass: checked > 0 && max_res <= tol,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_vf;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn quadratic_field_closed_form() {
        // z^2 d/dz embedded as (x^2, 0): x(t) = 1/(1-t), endpoint 2 at 1/2.
        let vf = parse_vf("(x^2, 0)", ("x", "y")).unwrap();
        let path = PathSpec::segment(c(0.0, 0.0), c(0.5, 0.0));
        let res = continue_solution(&vf, (c(1.0, 0.0), c(0.0, 0.0)), &path, 1e-10, false).unwrap();
        assert_eq!(res.outcome, Outcome::Completed);
        assert!((res.endpoint.0 - c(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn example_leaf_first_integral_oracle() {
        // (1/(2x)) d/dx - (1/x^3) d/dy: x^2 = x0^2 + t and y - 2/x constant.
        let vf = parse_vf("(1/(2*x), -1/x^3)", ("x", "y")).unwrap();
        let path = PathSpec::segment(c(0.0, 0.0), c(1.5, 0.0));
        let res = continue_solution(&vf, (c(1.0, 0.0), c(2.0, 0.0)), &path, 1e-11, false).unwrap();
        assert_eq!(res.outcome, Outcome::Completed);
        let x_expect = (2.5_f64).sqrt();
        let y_expect = 2.0 / x_expect; // c = y0 - 2/x0 = 0
        assert!((res.endpoint.0 - c(x_expect, 0.0)).norm() < 1e-8);
        assert!((res.endpoint.1 - c(y_expect, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn escape_detected_at_pole_locus() {
        // x' = 1/(2x) from x=1 along t: 0 -> -2 hits x = 0 at t = -1.
        let vf = parse_vf("(1/(2*x), 0)", ("x", "y")).unwrap();
        let path = PathSpec::segment(c(0.0, 0.0), c(-2.0, 0.0));
        let res = continue_solution(&vf, (c(1.0, 0.0), c(0.0, 0.0)), &path, 1e-9, false).unwrap();
        match res.outcome {
            Outcome::EscapedToPoleLocus { at_time, .. } => {
                assert!((at_time.0 - c(-1.0, 0.0)).norm() < 1e-2);
            }
            other => panic!("expected escape, got {:?}", other),
        }
    }

    #[test]
    fn reversibility_and_concatenation() {
        let vf = parse_vf("(x^2 - y, x + y)", ("x", "y")).unwrap();
        let start = (c(0.3, 0.1), c(-0.2, 0.05));
        let tol = 1e-11;
        let p1 = PathSpec::segment(c(0.0, 0.0), c(0.4, 0.3));
        let p2 = PathSpec::segment(c(0.4, 0.3), c(0.1, 0.9));
        let r1 = continue_solution(&vf, start, &p1, tol, false).unwrap();
        let r2 = continue_solution(&vf, r1.endpoint, &p2, tol, false).unwrap();
        let joint = continue_solution(&vf, start, &p1.then(&p2), tol, false).unwrap();
        assert!((r2.endpoint.0 - joint.endpoint.0).norm() < 1e-8);
        assert!((r2.endpoint.1 - joint.endpoint.1).norm() < 1e-8);
        // There and back.
        let back = continue_solution(&vf, joint.endpoint, &p1.then(&p2).reversed(), tol, false)
            .unwrap();
        assert!((back.endpoint.0 - start.0).norm() < 1e-7);
        assert!((back.endpoint.1 - start.1).norm() < 1e-7);
    }

    #[test]
    fn refinement_convergence() {
        let vf = parse_vf("(x^2 - y, x + y)", ("x", "y")).unwrap();
        let start = (c(0.3, 0.1), c(-0.2, 0.05));
        let path = PathSpec::segment(c(0.0, 0.0), c(0.8, 0.5));
        let tol = 1e-7;
        let coarse = continue_solution(&vf, start, &path, tol, false).unwrap();
        let fine = continue_solution(&vf, start, &path, tol / 10.0, false).unwrap();
        let diff = (coarse.endpoint.0 - fine.endpoint.0).norm()
            + (coarse.endpoint.1 - fine.endpoint.1).norm();
        assert!(diff < 5.0 * tol, "diff = {:.3e}", diff);
    }

    #[test]
    fn homotopic_paths_agree() {
        let vf = parse_vf("(1/(2*x), -1/x^3)", ("x", "y")).unwrap();
        let start = (c(1.0, 0.0), c(0.5, 0.0));
        let tol = 1e-10;
        // Two routes from 0 to 1 staying far from the singular time t = -1.
        let upper = PathSpec {
            kind: PathKind::Segment,
            waypoints: vec![(0.0, 0.0), (0.5, 0.4), (1.0, 0.0)],
        };
        let lower = PathSpec {
            kind: PathKind::Segment,
            waypoints: vec![(0.0, 0.0), (0.5, -0.4), (1.0, 0.0)],
        };
        let a = continue_solution(&vf, start, &upper, tol, false).unwrap();
        let b = continue_solution(&vf, start, &lower, tol, false).unwrap();
        assert!((a.endpoint.0 - b.endpoint.0).norm() < 1e-8);
        assert!((a.endpoint.1 - b.endpoint.1).norm() < 1e-8);
    }

    #[test]
    fn determination_count_trivial() {
        // z^2 d/dz leaf: a small loop in time away from the blow-up moment
        // returns to the start: one determination.
        let vf = parse_vf("(x^2, 0)", ("x", "y")).unwrap();
        let leaf = LeafSpec {
            start: (c(1.0, 0.0), c(0.0, 0.0)),
            quotient: QuotientSpec::Trivial,
            first_integral: None,
        };
        let loops = vec![PathSpec::loop_around(c(0.0, 0.0), 0.25, 16)];
        let dc = count_determinations(&leaf, &vf, &loops, 1e-9).unwrap();
        assert_eq!(dc.count, CountValue::Finite(1));
        assert_eq!(dc.certified_lower_bound, 1);
    }
}
