//! Riccati-specific analysis: special-fiber classification in standard
//! form, flips, numerical monodromy in PSL(2, C) through a rank-2 linear
//! lift, the base-time period homomorphism, and the common-fixed-point
//! census that detects maximal solutions.

pub mod mobius;

use crate::algebra::bipoly::{BiPoly, Var};
use crate::algebra::gaussrat::GaussRat;
use crate::algebra::rational::{RationalFn1, RationalFn2};
use crate::algebra::unipoly::{self, UniPoly};
use crate::algebra::vf::{self, EigenRatioClass, RationalVF2};
use crate::continuation::dopri::{integrate_segment, OdeRhs, SegmentOutcome, StepperOpts};
use crate::continuation::PathSpec;
use mobius::{MobiusNum, P1Num};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Error)]
pub enum RiccatiError {
    #[error("fiber is not in a recognized standard form: {0}; apply a flip or reduce first")]
    NotStandardForm(String),
    #[error("loop {0} passes within {1:.3e} of a singular time (clearance {2:.3e})")]
    LoopTooClose(usize, f64, f64),
    #[error("fundamental matrix near-singular on loop {0}")]
    Conditioning(usize),
    #[error("integration failed on loop {loop_id}: {message}")]
    Integration { loop_id: usize, message: String },
    #[error("empty representation")]
    EmptyRep,
    #[error("algebra error: {0}")]
    Algebra(#[from] crate::algebra::bipoly::AlgebraError),
    #[error("continuation error: {0}")]
    Continuation(#[from] crate::continuation::ContinuationError),
}

/// The equation w' = a(t) + b(t) w + c(t) w^2.
#[derive(Clone, Debug)]
pub struct RiccatiEq {
    pub a: RationalFn1,
    pub b: RationalFn1,
    pub c: RationalFn1,
    /// Every pole of a, b, c plus any declared special fibers.
    pub singular_times: Vec<C>,
}

impl RiccatiEq {
    pub fn new(a: RationalFn1, b: RationalFn1, c: RationalFn1) -> Self {
        let mut singular_times: Vec<C> = Vec::new();
        for f in [&a, &b, &c] {
            let rs = unipoly::roots(f.den());
            for (r, _) in rs.exact {
                push_unique(&mut singular_times, r.to_complex());
            }
            for z in rs.unresolved {
                push_unique(&mut singular_times, z);
            }
        }
        RiccatiEq {
            a,
            b,
            c,
            singular_times,
        }
    }

    pub fn declare_singular(&mut self, t: C) {
        push_unique(&mut self.singular_times, t);
    }

    /// Trace-free linear lift: w = u1/u2 turns the equation into u' = M u
    /// with M = [[b/2, a], [-c, -b/2]].
    pub fn lift_matrix(&self) -> [[RationalFn1; 2]; 2] {
        let half = GaussRat::from_frac(1, 2);
        [
            [self.b.scale(&half), self.a.clone()],
            [self.c.neg(), self.b.scale(&half).neg()],
        ]
    }
}

fn push_unique(v: &mut Vec<C>, z: C) {
    if v.iter().all(|w| (w - z).norm() > 1e-9) {
        v.push(z);
    }
}

/// Classification of a special fiber of a Riccati foliation in standard
/// form, with its local monodromy.
#[derive(Clone, Debug)]
pub enum FiberKind {
    Transverse,
    NonDegenerateNonParabolic { lambda: LambdaValue },
    NonDegenerateParabolic,
    Dicritical { p: i64, q: i64 },
    Semidegenerate,
    Nilpotent,
}

#[derive(Clone, Debug)]
pub enum LambdaValue {
    Exact(GaussRat),
    Numeric(C),
}

impl LambdaValue {
    pub fn to_complex(&self) -> C {
        match self {
            LambdaValue::Exact(g) => g.to_complex(),
            LambdaValue::Numeric(z) => *z,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiberClass {
    pub kind: FiberKind,
    pub local_monodromy: MobiusNum,
}

/// Classify the special fiber {z = 0} of a fibered local vector field in
/// coordinates (z, w), z-projection the base.
pub fn classify_fiber(vf_local: &RationalVF2) -> Result<FiberClass, RiccatiError> {
    let (_, fol) = vf_local.multiplier_and_foliation();
    // Invariance of the fiber {z = 0}: z divides the z-component.
    let invariant = fol.p.valuation_in(Var::X).map(|v| v >= 1).unwrap_or(true);
    if !invariant {
        return Ok(FiberClass {
            kind: FiberKind::Transverse,
            local_monodromy: MobiusNum::identity(),
        });
    }
    // Singular points on the fiber: zeros of q(0, w), plus w = infinity.
    let q0 = fol.q.specialize(Var::X, &GaussRat::zero());
    let mut sing: Vec<SingOnFiber> = Vec::new();
    if q0.is_zero() {
        return Err(RiccatiError::NotStandardForm(
            "fiber consists of singular points".into(),
        ));
    }
    let rs = unipoly::roots(&q0);
    if !rs.unresolved.is_empty() {
        return Err(RiccatiError::NotStandardForm(
            "singular point at non-Q(i) position on the fiber".into(),
        ));
    }
    for (w0, _) in rs.exact {
        let m = fol.linear_part_at(&GaussRat::zero(), &w0);
        sing.push(analyze_fiber_singularity(&m, &w0)?);
    }
    // The point w = infinity, in the chart W = 1/w.
    {
        let inf = infinity_chart(&fol);
        let q0_inf = inf.q.specialize(Var::X, &GaussRat::zero());
        if q0_inf.eval(&GaussRat::zero()).is_zero() {
            let m = inf.linear_part_at(&GaussRat::zero(), &GaussRat::zero());
            sing.push(analyze_fiber_singularity(&m, &GaussRat::zero())?);
        }
    }

    match sing.len() {
        0 => Err(RiccatiError::NotStandardForm(
            "invariant fiber without singularities".into(),
        )),
        1 => {
            let s = &sing[0];
            match s.class {
                SingClass::SaddleNode { strong_along_fiber } => {
                    if strong_along_fiber {
                        Err(RiccatiError::NotStandardForm(
                            "single saddle-node with strong separatrix in the fiber".into(),
                        ))
                    } else {
                        // dz - z dw model: monodromy w -> w + 2 i pi.
                        Ok(FiberClass {
                            kind: FiberKind::NonDegenerateParabolic,
                            local_monodromy: MobiusNum {
                                m: [
                                    [C::new(1.0, 0.0), C::new(0.0, 2.0 * std::f64::consts::PI)],
                                    [C::new(0.0, 0.0), C::new(1.0, 0.0)],
                                ],
                            },
                        })
                    }
                }
                SingClass::Nilpotent => {
                    let mono = numeric_fiber_monodromy(&fol)?;
                    Ok(FiberClass {
                        kind: FiberKind::Nilpotent,
                        local_monodromy: mono,
                    })
                }
                SingClass::NonDegenerate { .. } => Err(RiccatiError::NotStandardForm(
                    "single non-degenerate singularity on a fiber".into(),
                )),
            }
        }
        2 => {
            let both_sn = sing.iter().all(|s| {
                matches!(
                    s.class,
                    SingClass::SaddleNode {
                        strong_along_fiber: true
                    }
                )
            });
            if both_sn {
                let mono = numeric_fiber_monodromy(&fol)?;
                return Ok(FiberClass {
                    kind: FiberKind::Semidegenerate,
                    local_monodromy: mono,
                });
            }
            let lams: Vec<&SingClass> = sing.iter().map(|s| &s.class).collect();
            match (lams[0], lams[1]) {
                (
                    SingClass::NonDegenerate { lambda: l1 },
                    SingClass::NonDegenerate { lambda: l2 },
                ) => {
                    // Model z dz/dz + lambda w d/dw: ratios lambda and
                    // -lambda at the two fiber singularities.
                    let consistent = match (l1, l2) {
                        (Some(a), Some(b)) => (a + b).is_zero(),
                        _ => true,
                    };
                    if !consistent {
                        return Err(RiccatiError::NotStandardForm(format!(
                            "fiber eigenvalue ratios {:?}, {:?} are not opposite",
                            l1, l2
                        )));
                    }
                    let lambda = match (l1, l2) {
                        (Some(a), _) => LambdaValue::Exact(pick_lambda(a, &sing[0], &sing[1])),
                        (_, Some(b)) => LambdaValue::Exact(pick_lambda(&(-b), &sing[0], &sing[1])),
                        _ => {
                            return Err(RiccatiError::NotStandardForm(
                                "irrational fiber eigenvalue data".into(),
                            ))
                        }
                    };
                    classify_nondegenerate_fiber(lambda)
                }
                _ => Err(RiccatiError::NotStandardForm(
                    "mixed singularity types on the fiber".into(),
                )),
            }
        }
        n => Err(RiccatiError::NotStandardForm(format!(
            "{} singular points on one fiber",
            n
        ))),
    }
}

/// The lambda convention: the ratio (eigenvalue along fiber)/(transverse)
/// at the singularity whose fiber coordinate is the base point w = 0 of the
/// model. With only ratio data the sign is fixed by the first singularity.
fn pick_lambda(r: &GaussRat, _s0: &SingOnFiber, _s1: &SingOnFiber) -> GaussRat {
    r.clone()
}

fn classify_nondegenerate_fiber(lambda: LambdaValue) -> Result<FiberClass, RiccatiError> {
    let lam_c = lambda.to_complex();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mult = (C::new(0.0, two_pi) * lam_c).exp();
    let mono = MobiusNum {
        m: [
            [mult, C::new(0.0, 0.0)],
            [C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ],
    };
    if let LambdaValue::Exact(l) = &lambda {
        if l.is_rational() {
            use num_traits::ToPrimitive;
            let r = &l.re;
            if r.is_integer() {
                return Err(RiccatiError::NotStandardForm(format!(
                    "integer lambda = {}; flips reduce this fiber to a transverse one",
                    r
                )));
            }
            let p = r.numer().to_i64().ok_or_else(|| {
                RiccatiError::NotStandardForm("lambda too large".into())
            })?;
            let q = r.denom().to_i64().ok_or_else(|| {
                RiccatiError::NotStandardForm("lambda too large".into())
            })?;
            if !(q > p && p > 0) {
                return Err(RiccatiError::NotStandardForm(format!(
                    "rational lambda = {}/{} outside 0 < p/q < 1; apply flips",
                    p, q
                )));
            }
            return Ok(FiberClass {
                kind: FiberKind::Dicritical { p, q },
                local_monodromy: mono,
            });
        }
    }
    Ok(FiberClass {
        kind: FiberKind::NonDegenerateNonParabolic { lambda },
        local_monodromy: mono,
    })
}

struct SingOnFiber {
    #[allow(dead_code)]
    w: GaussRat,
    class: SingClass,
}

enum SingClass {
    /// Ratio lambda_fiber / lambda_transverse when exactly computable.
    NonDegenerate { lambda: Option<GaussRat> },
    SaddleNode { strong_along_fiber: bool },
    Nilpotent,
}

fn analyze_fiber_singularity(
    m: &vf::Mat2,
    w0: &GaussRat,
) -> Result<SingOnFiber, RiccatiError> {
    let class = vf::eigen_ratio_class(m);
    let out = match class {
        EigenRatioClass::BothZero => {
            return Err(RiccatiError::NotStandardForm(
                "zero linear part on the fiber".into(),
            ))
        }
        EigenRatioClass::Nilpotent => SingClass::Nilpotent,
        EigenRatioClass::OneZeroNonNilpotent => {
            let t = vf::mat2_trace(m);
            let strong = vf::eigenvector(m, &t);
            // Fiber direction is d/dw = (0, 1) in (z, w).
            let along_fiber = strong.0.is_zero();
            SingClass::SaddleNode {
                strong_along_fiber: along_fiber,
            }
        }
        _ => {
            // Non-degenerate: lambda = eigenvalue along the fiber over the
            // transverse one, when exact.
            match vf::eigenvalues_exact(m) {
                Some((l1, l2)) => {
                    let v1 = vf::eigenvector(m, &l1);
                    // The fiber tangent is (0, 1): the eigenvector with zero
                    // z-component is the fiber eigenvalue.
                    let (lf, lt) = if v1.0.is_zero() { (l1, l2) } else { (l2, l1) };
                    SingClass::NonDegenerate {
                        lambda: Some(&lf / &lt),
                    }
                }
                None => SingClass::NonDegenerate { lambda: None },
            }
        }
    };
    Ok(SingOnFiber {
        w: w0.clone(),
        class: out,
    })
}

/// The (z, w) -> (z, 1/w) chart of a fibered field.
fn infinity_chart(fol: &vf::FoliationGen) -> vf::FoliationGen {
    // w = 1/W: dW/dt = -W^2 dw/dt. Substitute and clear denominators.
    let dw = fol.q.degree_in(Var::Y).unwrap_or(0);
    let dz = fol.p.degree_in(Var::Y).unwrap_or(0);
    let d = dw.max(dz) + 2;
    // p(z, 1/W) * W^d and -W^2 q(z, 1/W) * W^d share the factor W^(d - ..).
    let lift = |poly: &BiPoly, extra: u32| -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &poly.terms {
            // w^j -> W^(d - j), times W^extra
            out = out.add(&BiPoly::monomial(c.clone(), i, d - j + extra));
        }
        out
    };
    let p = lift(&fol.p, 0);
    let q = lift(&fol.q, 2).neg();
    // Saturate common W powers.
    let vp = p.valuation_in(Var::Y).unwrap_or(0);
    let vq = q.valuation_in(Var::Y).unwrap_or(0);
    let k = vp.min(vq);
    let strip = |poly: &BiPoly| {
        let mut out = poly.clone();
        for _ in 0..k {
            out = out.div_exact(&BiPoly::y()).unwrap();
        }
        out
    };
    vf::FoliationGen {
        p: strip(&p),
        q: strip(&q),
    }
}

/// Flip at a point of the fiber {z = 0}: pushforward under
/// (z, w) -> (z, z (w - w0)), saturated of common z powers.
pub fn flip(vf_local: &RationalVF2, at: &FlipPoint) -> RationalVF2 {
    match at {
        FlipPoint::Finite(w0) => {
            // New coordinate v = z (w - w0); inverse w = v/z + w0.
            let z = RationalFn2::from_poly(BiPoly::x());
            let w_of_new = RationalFn2::new(BiPoly::y(), BiPoly::x())
                .add(&RationalFn2::constant(w0.clone()));
            let p_new = vf_local
                .px
                .subst_rational(&RationalFn2::from_poly(BiPoly::x()), &w_of_new);
            // v' = z'(w - w0) + z w' = p * (w - w0) + z * q.
            let w_minus = w_of_new.sub(&RationalFn2::constant(w0.clone()));
            let q_orig = vf_local
                .py
                .subst_rational(&RationalFn2::from_poly(BiPoly::x()), &w_of_new);
            let q_new = p_new.mul(&w_minus).add(&z.mul(&q_orig));
            saturate_z(RationalVF2::new(p_new, q_new))
        }
        FlipPoint::Infinity => {
            let inverted = invert_w(vf_local);
            let flipped = flip(&inverted, &FlipPoint::Finite(GaussRat::zero()));
            invert_w(&flipped)
        }
    }
}

#[derive(Clone, Debug)]
pub enum FlipPoint {
    Finite(GaussRat),
    Infinity,
}

/// Inverse of `flip` at a finite point: pushforward under
/// (z, w) -> (z, w/z + w0).
pub fn flip_inverse(vf_local: &RationalVF2, at: &FlipPoint) -> RationalVF2 {
    match at {
        FlipPoint::Finite(w0) => {
            // New coordinate u = w/z + w0; inverse w = z (u - w0).
            let z = RationalFn2::from_poly(BiPoly::x());
            let u_minus = RationalFn2::from_poly(BiPoly::y())
                .sub(&RationalFn2::constant(w0.clone()));
            let w_of_new = z.mul(&u_minus);
            let subz = RationalFn2::from_poly(BiPoly::x());
            let p_new = vf_local.px.subst_rational(&subz, &w_of_new);
            let q_orig = vf_local.py.subst_rational(&subz, &w_of_new);
            // u' = w'/z - w z'/z^2 = q/z - (u - w0) p / z.
            let q_new = q_orig.div(&z).sub(&u_minus.mul(&p_new).div(&z));
            saturate_z(RationalVF2::new(p_new, q_new))
        }
        FlipPoint::Infinity => {
            let inverted = invert_w(vf_local);
            let unflipped = flip_inverse(&inverted, &FlipPoint::Finite(GaussRat::zero()));
            invert_w(&unflipped)
        }
    }
}

/// Conjugate by w -> 1/w.
fn invert_w(vf_local: &RationalVF2) -> RationalVF2 {
    let winv = RationalFn2::new(BiPoly::one(), BiPoly::y());
    let p = vf_local
        .px
        .subst_rational(&RationalFn2::from_poly(BiPoly::x()), &winv);
    let q_orig = vf_local
        .py
        .subst_rational(&RationalFn2::from_poly(BiPoly::x()), &winv);
    // W = 1/w: W' = -W^2 w'.
    let w2 = RationalFn2::from_poly(BiPoly::y().mul(&BiPoly::y()));
    let q = w2.mul(&q_orig).neg();
    saturate_z(RationalVF2::new(p, q))
}

fn saturate_z(vfin: RationalVF2) -> RationalVF2 {
    let vx = vfin.px.valuation_along(&BiPoly::x());
    let vy = vfin.py.valuation_along(&BiPoly::x());
    let k = match (vx, vy) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0,
    };
    if k == 0 {
        return vfin;
    }
    let factor = if k > 0 {
        RationalFn2::new(BiPoly::one(), BiPoly::x().pow(k as u32))
    } else {
        RationalFn2::from_poly(BiPoly::x().pow((-k) as u32))
    };
    RationalVF2::new(vfin.px.mul(&factor), vfin.py.mul(&factor))
}

/// One loop's contribution to a monodromy representation.
#[derive(Clone, Debug)]
pub struct LoopMonodromy {
    pub path: PathSpec,
    /// Determinant-normalized matrix; the PSL sign ambiguity is resolved by
    /// keeping both lifts +-matrix in comparisons.
    pub matrix: MobiusNum,
    pub error_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct MonodromyRep {
    pub generators: Vec<LoopMonodromy>,
    /// Values of the base-time period homomorphism on the same loops.
    pub time_periods: Vec<C>,
}

#[derive(Clone, Debug)]
pub struct MonodromyOpts {
    pub tol: f64,
    pub clearance: f64,
    /// Optional base vector field Y(t) d/dt whose time form is integrated
    /// for the period homomorphism; `None` means d/dt (all periods zero).
    pub base_field: Option<RationalFn1>,
}

impl MonodromyOpts {
    pub fn new(tol: f64) -> Self {
        MonodromyOpts {
            tol,
            clearance: 1e-2,
            base_field: None,
        }
    }
}

struct LiftRhs {
    m: [[CompiledRational1; 2]; 2],
    base: Option<CompiledRational1>,
}

/// A univariate rational function compiled for fast complex evaluation.
#[derive(Clone, Debug)]
pub struct CompiledRational1 {
    num: Vec<(C, u32)>,
    den: Vec<(C, u32)>,
}

/// Compile a univariate rational function for complex evaluation.
pub fn compiled1(f: &RationalFn1) -> CompiledRational1 {
    CompiledRational1::new(f)
}

impl CompiledRational1 {
    fn new(f: &RationalFn1) -> Self {
        let conv = |p: &UniPoly| -> Vec<(C, u32)> {
            p.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (c.to_complex(), k as u32))
                .collect()
        };
        CompiledRational1 {
            num: conv(f.num()),
            den: conv(f.den()),
        }
    }

    pub fn eval(&self, t: C) -> Option<C> {
        let ev = |terms: &[(C, u32)]| -> C {
            let mut acc = C::new(0.0, 0.0);
            for &(c, k) in terms {
                acc += c * t.powu(k);
            }
            acc
        };
        let d = ev(&self.den);
        if d.norm() < 1e-300 {
            return None;
        }
        Some(ev(&self.num) / d)
    }
}

impl OdeRhs for LiftRhs {
    fn eval(&self, t: C, y: &[C], out: &mut [C]) -> Option<()> {
        let m00 = self.m[0][0].eval(t)?;
        let m01 = self.m[0][1].eval(t)?;
        let m10 = self.m[1][0].eval(t)?;
        let m11 = self.m[1][1].eval(t)?;
        // y = [u00, u01, u10, u11] column-action U' = M U.
        out[0] = m00 * y[0] + m01 * y[2];
        out[1] = m00 * y[1] + m01 * y[3];
        out[2] = m10 * y[0] + m11 * y[2];
        out[3] = m10 * y[1] + m11 * y[3];
        if let Some(base) = &self.base {
            let v = base.eval(t)?;
            if v.norm() < 1e-300 {
                return None;
            }
            out[4] = 1.0 / v;
        }
        Some(())
    }
}

fn polyline_clearance(path: &PathSpec, times: &[C]) -> f64 {
    let pts = path.points();
    let mut best = f64::INFINITY;
    for w in pts.windows(2) {
        for &s in times {
            best = best.min(segment_distance(w[0], w[1], s));
        }
    }
    best
}

fn segment_distance(a: C, b: C, p: C) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Numerical monodromy of the Riccati equation around the given loops.
pub fn monodromy(
    eq: &RiccatiEq,
    loops: &[PathSpec],
    opts: &MonodromyOpts,
) -> Result<MonodromyRep, RiccatiError> {
    let lift = eq.lift_matrix();
    let rhs = LiftRhs {
        m: [
            [
                CompiledRational1::new(&lift[0][0]),
                CompiledRational1::new(&lift[0][1]),
            ],
            [
                CompiledRational1::new(&lift[1][0]),
                CompiledRational1::new(&lift[1][1]),
            ],
        ],
        base: opts.base_field.as_ref().map(CompiledRational1::new),
    };
    for (i, l) in loops.iter().enumerate() {
        l.validate()?;
        let dist = polyline_clearance(l, &eq.singular_times);
        if dist < opts.clearance {
            return Err(RiccatiError::LoopTooClose(i, dist, opts.clearance));
        }
    }
    let dim = if opts.base_field.is_some() { 5 } else { 4 };
    let worker_cap = crate::worker_count();
    let results: Vec<Result<(MobiusNum, f64, C), RiccatiError>> = run_parallel(
        loops,
        worker_cap,
        |idx, l| -> Result<(MobiusNum, f64, C), RiccatiError> {
            let mut y = vec![C::new(0.0, 0.0); dim];
            y[0] = C::new(1.0, 0.0);
            y[3] = C::new(1.0, 0.0);
            let stepper = StepperOpts::from_tol(opts.tol);
            let pts = l.points();
            let mut err = 0.0;
            for w in pts.windows(2) {
                let res = integrate_segment(&rhs, w[0], w[1], &y, &stepper);
                err += res.error_estimate;
                match res.outcome {
                    SegmentOutcome::Completed => y = res.y,
                    SegmentOutcome::Escaped { .. } => {
                        return Err(RiccatiError::Integration {
                            loop_id: idx,
                            message: "trajectory escaped".into(),
                        })
                    }
                    SegmentOutcome::StepFailure { message, .. } => {
                        return Err(RiccatiError::Integration {
                            loop_id: idx,
                            message,
                        })
                    }
                }
            }
            let mat = MobiusNum {
                m: [[y[0], y[1]], [y[2], y[3]]],
            };
            let det = mat.det();
            if det.norm() < 1e-10 {
                return Err(RiccatiError::Conditioning(idx));
            }
            let period = if dim == 5 { y[4] } else { C::new(0.0, 0.0) };
            Ok((mat.det_normalized(), err, period))
        },
    );
    let mut generators = Vec::with_capacity(loops.len());
    let mut time_periods = Vec::with_capacity(loops.len());
    for (l, r) in loops.iter().zip(results.into_iter()) {
        let (mat, err, period) = r?;
        generators.push(LoopMonodromy {
            path: l.clone(),
            matrix: mat,
            error_estimate: err,
        });
        time_periods.push(period);
    }
    Ok(MonodromyRep {
        generators,
        time_periods,
    })
}

/// Run a closure over items with at most `cap` OS threads; results are
/// merged deterministically in input order.
fn run_parallel<T: Sync, R: Send>(
    items: &[T],
    cap: usize,
    f: impl Fn(usize, &T) -> R + Sync,
) -> Vec<R> {
    let n = items.len();
    let workers = cap.max(1).min(n.max(1));
    if workers <= 1 || n <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let mut indexed: Vec<(usize, R)> = std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut i = w;
                    while i < n {
                        out.push((i, f(i, &items[i])));
                        i += workers;
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    indexed.into_iter().map(|(_, r)| r).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CensusVerdict {
    AllMaximal,
    ExactlyK(usize),
    NoneFound,
}

#[derive(Clone, Debug)]
pub struct FixedPointCensus {
    pub common_fixed_points: Vec<P1Num>,
    pub verdict: CensusVerdict,
    /// Kernel exponent vectors actually probed.
    pub kernel_words: Vec<Vec<i64>>,
    pub notes: Vec<String>,
}

/// Census of common fixed points of the restriction of the representation
/// to the kernel of the period homomorphism.
///
/// Kernel membership depends only on the exponent vector because the period
/// homomorphism lands in the abelian group (C, +); integer relations among
/// the periods are probed up to denominator 64 and the corresponding words
/// composed in generator order.
pub fn fixed_point_census(
    rep: &MonodromyRep,
    tol: f64,
) -> Result<FixedPointCensus, RiccatiError> {
    if rep.generators.is_empty() {
        return Err(RiccatiError::EmptyRep);
    }
    let n = rep.generators.len();
    let scale: f64 = rep
        .time_periods
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max);
    let ptol = tol.max(1e-12) * 1e3;
    let mut notes = Vec::new();
    let mut kernel_words: Vec<Vec<i64>> = Vec::new();
    if scale <= ptol {
        // All periods vanish: every loop is a kernel element.
        notes.push("all time periods vanish: treating all loops as kernel elements".into());
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            kernel_words.push(e);
        }
    } else {
        for i in 0..n {
            if rep.time_periods[i].norm() <= ptol * scale.max(1.0) {
                let mut e = vec![0i64; n];
                e[i] = 1;
                kernel_words.push(e);
            }
        }
        // Pairwise integer relations p mu_i + q mu_j = 0, |p|, |q| <= 64.
        for i in 0..n {
            for j in (i + 1)..n {
                let mi = rep.time_periods[i];
                let mj = rep.time_periods[j];
                if mi.norm() <= ptol || mj.norm() <= ptol {
                    continue;
                }
                let ratio = mi / mj;
                if ratio.im.abs() > 1e-6 * ratio.norm() {
                    continue;
                }
                if let Some((p, q)) = rationalize_small(ratio.re, 64) {
                    // p/q = -mu_j-coefficient ratio: q mu_i - p mu_j = 0.
                    let resid = (mj * p as f64 - mi * q as f64).norm();
                    if resid <= ptol * scale {
                        let mut e = vec![0i64; n];
                        e[i] = -q;
                        e[j] = p;
                        kernel_words.push(e);
                    }
                } else {
                    notes.push(format!(
                        "period ratio of loops {} and {} unresolved beyond denominator 64",
                        i, j
                    ));
                }
            }
        }
        if kernel_words.is_empty() {
            notes.push("no kernel elements resolved within the probe budget".into());
        }
    }

    // Compose the kernel words.
    let maps: Vec<MobiusNum> = kernel_words
        .iter()
        .map(|e| {
            let mut acc = MobiusNum::identity();
            for (i, &k) in e.iter().enumerate() {
                if k != 0 {
                    acc = acc.compose(&rep.generators[i].matrix.powi(k));
                }
            }
            acc.det_normalized()
        })
        .collect();
    let id_tol = (10.0 * tol).max(1e-9);
    let nontrivial: Vec<&MobiusNum> = maps
        .iter()
        .filter(|m| m.psl_distance_to_identity() > id_tol)
        .collect();
    if nontrivial.is_empty() {
        return Ok(FixedPointCensus {
            common_fixed_points: vec![],
            verdict: CensusVerdict::AllMaximal,
            kernel_words,
            notes,
        });
    }
    // Intersect fixed-point sets with tolerance clustering.
    let mut common: Vec<P1Num> = nontrivial[0].fixed_points();
    dedup_points(&mut common, id_tol);
    for m in &nontrivial[1..] {
        let fps = m.fixed_points();
        common.retain(|p| fps.iter().any(|q| p.dist(q) < id_tol));
        if common.is_empty() {
            break;
        }
    }
    if common.len() >= 3 {
        // Three common fixed points force the subgroup to be trivial; since
        // the maps were measured nontrivial this is a numerical
        // inconsistency worth surfacing rather than hiding.
        notes.push(
            "three common fixed points found for measurably nontrivial maps; \
             treating as AllMaximal per the threshold rule"
                .into(),
        );
        return Ok(FixedPointCensus {
            common_fixed_points: common,
            verdict: CensusVerdict::AllMaximal,
            kernel_words,
            notes,
        });
    }
    let verdict = if common.is_empty() {
        CensusVerdict::NoneFound
    } else {
        CensusVerdict::ExactlyK(common.len())
    };
    Ok(FixedPointCensus {
        common_fixed_points: common,
        verdict,
        kernel_words,
        notes,
    })
}

fn dedup_points(pts: &mut Vec<P1Num>, tol: f64) {
    let mut out: Vec<P1Num> = Vec::new();
    for p in pts.iter() {
        if out.iter().all(|q| p.dist(q) >= tol) {
            out.push(*p);
        }
    }
    *pts = out;
}

fn rationalize_small(x: f64, max_den: i64) -> Option<(i64, i64)> {
    let mut best: Option<(i64, i64)> = None;
    let mut best_err = f64::INFINITY;
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        if p.abs() > 1e6 {
            continue;
        }
        let err = (x - p / q as f64).abs();
        if err < best_err {
            best_err = err;
            best = Some((p as i64, q));
        }
    }
    if best_err < 1e-6 {
        best
    } else {
        None
    }
}

/// One row of the fiber/divisor compatibility table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Compatibility {
    Consistent,
    IncompatibleWithMaximal,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForbidReport {
    pub verdict: Compatibility,
    pub reason: String,
}

/// Coexistence test of fiber kinds with a transverse zero divisor: with at
/// least three leaf points on a generic fiber, either the field preserves
/// the fibration (no transverse divisor) or all special fibers are
/// non-degenerate parabolic or dicritical.
pub fn forbid_check(
    fibers: &[FiberKind],
    has_transverse_zero_divisor: bool,
    ell_size: usize,
) -> ForbidReport {
    if !has_transverse_zero_divisor {
        return ForbidReport {
            verdict: Compatibility::Consistent,
            reason: "no transverse zero divisor: the field preserves the fibration".into(),
        };
    }
    if ell_size < 3 {
        return ForbidReport {
            verdict: Compatibility::Consistent,
            reason: format!(
                "leaf meets the generic fiber in only {} points: no obstruction applies",
                ell_size
            ),
        };
    }
    for f in fibers {
        let bad = match f {
            FiberKind::NonDegenerateNonParabolic { .. } => Some("non-degenerate non-parabolic"),
            FiberKind::Semidegenerate => Some("semidegenerate"),
            FiberKind::Nilpotent => Some("nilpotent"),
            FiberKind::Transverse
            | FiberKind::NonDegenerateParabolic
            | FiberKind::Dicritical { .. } => None,
        };
        if let Some(name) = bad {
            return ForbidReport {
                verdict: Compatibility::IncompatibleWithMaximal,
                reason: format!(
                    "a {} special fiber coexists with a transverse zero divisor and >= 3 leaf points",
                    name
                ),
            };
        }
    }
    ForbidReport {
        verdict: Compatibility::Consistent,
        reason: "all special fibers are non-degenerate parabolic or dicritical".into(),
    }
}

/// Fiber holonomy by small-loop continuation.
///
/// When the foliation is fiber-wise Riccati (transverse component free of w,
/// w-component at most quadratic) the transport uses the projectivized 2x2
/// linear lift, which passes through infinity without incident; otherwise
/// three points are transported directly and the Mobius map interpolated.
fn numeric_fiber_monodromy(fol: &vf::FoliationGen) -> Result<MobiusNum, RiccatiError> {
    let radius = 0.2;
    let loop_path = PathSpec::loop_around(C::new(0.0, 0.0), radius, 24);
    let pts = loop_path.points();
    let p_w_free = fol.p.degree_in(Var::Y).unwrap_or(0) == 0;
    let q_quad = fol.q.degree_in(Var::Y).unwrap_or(0) <= 2;
    if p_w_free && q_quad {
        // dw/dz = (q0 + q1 w + q2 w^2)/p(z): matrix lift.
        let p1 = fol.p.coeffs_in(Var::X);
        let _ = p1;
        let p_uni = fol
            .p
            .as_univariate()
            .map(|(_, u)| u)
            .unwrap_or_else(|| UniPoly::one());
        let qc = fol.q.coeffs_in(Var::Y);
        let coeff = |k: usize| -> RationalFn1 {
            if k < qc.len() {
                RationalFn1::new(qc[k].clone(), p_uni.clone())
            } else {
                RationalFn1::zero()
            }
        };
        let eq = RiccatiEq::new(coeff(0), coeff(1), coeff(2));
        let rep = monodromy(
            &eq,
            std::slice::from_ref(&loop_path),
            &MonodromyOpts {
                tol: 1e-11,
                clearance: radius * 0.5,
                base_field: None,
            },
        )?;
        return Ok(rep.generators[0].matrix);
    }
    // Fallback: transport three probe points directly.
    let pc = crate::continuation::CompiledVF::new(&fol.as_vf());
    let probes = [C::new(1.7, 0.3), C::new(-0.9, 1.1), C::new(0.4, -2.2)];
    let mut images = [P1Num::Infinity; 3];
    for (k, w0) in probes.iter().enumerate() {
        struct Holonomy<'a> {
            vf: &'a crate::continuation::CompiledVF,
        }
        impl<'a> OdeRhs for Holonomy<'a> {
            fn eval(&self, z: C, y: &[C], out: &mut [C]) -> Option<()> {
                let (p, q) = self.vf.eval(z, y[0])?;
                if p.norm() < 1e-13 * (1.0 + q.norm()) {
                    return None;
                }
                out[0] = q / p;
                Some(())
            }
        }
        let rhs = Holonomy { vf: &pc };
        let mut y = vec![*w0];
        let stepper = StepperOpts::from_tol(1e-10);
        for seg in pts.windows(2) {
            let res = integrate_segment(&rhs, seg[0], seg[1], &y, &stepper);
            match res.outcome {
                SegmentOutcome::Completed => y = res.y,
                _ => {
                    return Err(RiccatiError::NotStandardForm(
                        "holonomy transport failed; fiber too degenerate for the probe".into(),
                    ))
                }
            }
        }
        images[k] = P1Num::Finite(y[0]);
    }
    let starts = [
        P1Num::Finite(probes[0]),
        P1Num::Finite(probes[1]),
        P1Num::Finite(probes[2]),
    ];
    Ok(mobius::mobius_from_three_points(starts, images).det_normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::{parse_rational1, parse_vf};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn zw(src: &str) -> RationalVF2 {
        parse_vf(src, ("z", "w")).unwrap()
    }

    #[test]
    fn classify_model_fibers() {
        // lambda = 3i model: z d/dz + 3i w d/dw.
        let f = classify_fiber(&zw("(z, 3*i*w)")).unwrap();
        match f.kind {
            FiberKind::NonDegenerateNonParabolic { lambda } => {
                assert!((lambda.to_complex() - c(0.0, 3.0)).norm() < 1e-12);
            }
            other => panic!("unexpected {:?}", other),
        }
        // Monodromy w -> e^{2 i pi (3i)} w = e^{-6 pi} w.
        let mult = f.local_monodromy.m[0][0] / f.local_monodromy.m[1][1];
        assert!((mult - c((-6.0 * std::f64::consts::PI).exp(), 0.0)).norm() < 1e-9);

        // Parabolic model dz - z dw: field z d/dz + 1 d/dw.
        let f = classify_fiber(&zw("(z, 1)")).unwrap();
        assert!(matches!(f.kind, FiberKind::NonDegenerateParabolic));
        let shift = f.local_monodromy.m[0][1];
        assert!((shift - c(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);

        // Dicritical lambda = 1/2.
        let f = classify_fiber(&zw("(2*z, w)")).unwrap();
        match f.kind {
            FiberKind::Dicritical { p, q } => assert_eq!((p, q), (1, 2)),
            other => panic!("unexpected {:?}", other),
        }

        // Transverse fiber: d/dz + 0: foliation dw = 0.
        let f = classify_fiber(&zw("(1, 0)")).unwrap();
        assert!(matches!(f.kind, FiberKind::Transverse));

        // Integer lambda: flip advice.
        assert!(matches!(
            classify_fiber(&zw("(z, 2*w)")),
            Err(RiccatiError::NotStandardForm(_))
        ));
    }

    #[test]
    fn flip_shifts_lambda() {
        // lambda = 3i -> 3i + 1 after a flip at w = 0.
        let model = zw("(z, 3*i*w)");
        let flipped = flip(&model, &FlipPoint::Finite(GaussRat::zero()));
        let f = classify_fiber(&flipped).unwrap();
        match f.kind {
            FiberKind::NonDegenerateNonParabolic { lambda } => {
                assert!((lambda.to_complex() - c(1.0, 3.0)).norm() < 1e-12);
            }
            other => panic!("unexpected {:?}", other),
        }
        // Twice: lambda + 2.
        let ff = flip(&flipped, &FlipPoint::Finite(GaussRat::zero()));
        let f = classify_fiber(&ff).unwrap();
        match f.kind {
            FiberKind::NonDegenerateNonParabolic { lambda } => {
                assert!((lambda.to_complex() - c(2.0, 3.0)).norm() < 1e-12);
            }
            other => panic!("unexpected {:?}", other),
        }
        // At infinity: lambda - 1.
        let fi = flip(&model, &FlipPoint::Infinity);
        let f = classify_fiber(&fi).unwrap();
        match f.kind {
            FiberKind::NonDegenerateNonParabolic { lambda } => {
                assert!((lambda.to_complex() - c(-1.0, 3.0)).norm() < 1e-12);
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn monodromy_of_regular_equation_is_identity() {
        // w' = w^2 has no singular time at 0: trivial monodromy around it.
        let eq = RiccatiEq::new(
            parse_rational1("0", "t").unwrap(),
            parse_rational1("0", "t").unwrap(),
            parse_rational1("1", "t").unwrap(),
        );
        let loops = vec![PathSpec::loop_around(c(0.0, 0.0), 0.5, 16)];
        let rep = monodromy(&eq, &loops, &MonodromyOpts::new(1e-10)).unwrap();
        assert!(rep.generators[0].matrix.psl_distance_to_identity() < 1e-8);
        assert!(rep.time_periods[0].norm() < 1e-12);
    }

    #[test]
    fn dicritical_linear_equation_monodromy() {
        // w' = (1/3) w / t: monodromy w -> e^{2 i pi/3} w, order 3.
        let eq = RiccatiEq::new(
            parse_rational1("0", "t").unwrap(),
            parse_rational1("1/(3*t)", "t").unwrap(),
            parse_rational1("0", "t").unwrap(),
        );
        let loops = vec![PathSpec::loop_around(c(0.0, 0.0), 1.0, 24)];
        let rep = monodromy(&eq, &loops, &MonodromyOpts::new(1e-11)).unwrap();
        let m = rep.generators[0].matrix;
        let ratio = m.m[0][0] / m.m[1][1];
        let expect = (C::new(0.0, 2.0 * std::f64::consts::PI / 3.0)).exp();
        assert!(
            (ratio - expect).norm() < 1e-7,
            "ratio {} vs {}",
            ratio,
            expect
        );
        // Order three in PSL: cube is the identity.
        let cube = m.compose(&m).compose(&m).det_normalized();
        assert!(cube.psl_distance_to_identity() < 1e-7);
        // Off-diagonal entries stay zero.
        assert!(m.m[0][1].norm() < 1e-8 && m.m[1][0].norm() < 1e-8);
    }

    #[test]
    fn census_examples() {
        // All generators identity: AllMaximal.
        let rep = MonodromyRep {
            generators: vec![LoopMonodromy {
                path: PathSpec::loop_around(c(0.0, 0.0), 1.0, 8),
                matrix: MobiusNum::identity(),
                error_estimate: 1e-12,
            }],
            time_periods: vec![c(0.0, 0.0)],
        };
        let census = fixed_point_census(&rep, 1e-9).unwrap();
        assert_eq!(census.verdict, CensusVerdict::AllMaximal);

        // Single loxodromic generator with zero period: {0, infinity}.
        let lam = c(0.3, 0.8).exp();
        let rep = MonodromyRep {
            generators: vec![LoopMonodromy {
                path: PathSpec::loop_around(c(0.0, 0.0), 1.0, 8),
                matrix: MobiusNum {
                    m: [[lam, c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
                }
                .det_normalized(),
                error_estimate: 1e-12,
            }],
            time_periods: vec![c(0.0, 0.0)],
        };
        let census = fixed_point_census(&rep, 1e-9).unwrap();
        assert_eq!(census.verdict, CensusVerdict::ExactlyK(2));

        // w -> w + 1 and w -> 2w share only infinity.
        let rep = MonodromyRep {
            generators: vec![
                LoopMonodromy {
                    path: PathSpec::loop_around(c(0.0, 0.0), 1.0, 8),
                    matrix: MobiusNum {
                        m: [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
                    }
                    .det_normalized(),
                    error_estimate: 1e-12,
                },
                LoopMonodromy {
                    path: PathSpec::loop_around(c(3.0, 0.0), 1.0, 8),
                    matrix: MobiusNum {
                        m: [[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
                    }
                    .det_normalized(),
                    error_estimate: 1e-12,
                },
            ],
            time_periods: vec![c(0.0, 0.0), c(0.0, 0.0)],
        };
        let census = fixed_point_census(&rep, 1e-9).unwrap();
        assert_eq!(census.verdict, CensusVerdict::ExactlyK(1));
        assert!(census.common_fixed_points[0].dist(&P1Num::Infinity) < 1e-9);
    }

    #[test]
    fn forbid_grid_cases() {
        let lam = LambdaValue::Numeric(c(0.0, 1.0));
        let r = forbid_check(
            &[FiberKind::NonDegenerateNonParabolic { lambda: lam }],
            true,
            3,
        );
        assert_eq!(r.verdict, Compatibility::IncompatibleWithMaximal);
        let r = forbid_check(
            &[
                FiberKind::Dicritical { p: 1, q: 2 },
                FiberKind::NonDegenerateParabolic,
            ],
            true,
            3,
        );
        assert_eq!(r.verdict, Compatibility::Consistent);
        let r = forbid_check(&[FiberKind::Nilpotent], false, 3);
        assert_eq!(r.verdict, Compatibility::Consistent);
        let r = forbid_check(&[FiberKind::Semidegenerate], true, 2);
        assert_eq!(r.verdict, Compatibility::Consistent);
    }

    #[test]
    fn semidegenerate_fiber_detected() {
        // Two saddle-nodes on the fiber with strong separatrices inside it:
        // z^2 d/dz + w(w-1) z-degenerate... build as z*(z d/dz) + ... use
        // the model z^2 d/dz + w (w - 1) d/dw? Check: foliation
        // (z^2, w(w-1)): on z=0: singular at w=0,1; linear parts
        // [[0,0],[0,+-1]]: one zero eigenvalue, strong separatrix along w.
        let f = classify_fiber(&zw("(z^2, w^2 - w)")).unwrap();
        assert!(matches!(f.kind, FiberKind::Semidegenerate));
    }
}
