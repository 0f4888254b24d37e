//! Property tests for the exact layer and the numeric transport.

use num_complex::Complex64;
use proptest::prelude::*;
use univalens::affine::{self, SigIndex};
use univalens::algebra::bipoly::BiPoly;
use univalens::algebra::gaussrat::GaussRat;
use univalens::algebra::parse::{parse_rational1, parse_vf};
use univalens::algebra::rational::{RationalFn1, RationalFn2};
use univalens::algebra::unipoly::UniPoly;
use univalens::algebra::vf::{self, EigenRatioClass, Mat2, RationalVF2};
use univalens::localmodels::{classify_local, normal_form, ModelKind};
use univalens::riccati::mobius::{MobiusExact, MobiusNum};
use univalens::riccati::{flip, flip_inverse, FlipPoint};

fn q(n: i64, d: i64) -> GaussRat {
    GaussRat::from_frac(n, d)
}

fn gauss_strategy() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, 1i64..=3, -6i64..=6, 1i64..=3)
        .prop_map(|(a, b, c, d)| GaussRat::from_parts(a, b, c, d))
}

fn mat_strategy() -> impl Strategy<Value = Mat2> {
    (
        gauss_strategy(),
        gauss_strategy(),
        gauss_strategy(),
        gauss_strategy(),
    )
        .prop_map(|(a, b, c, d)| [[a, b], [c, d]])
}

fn class_kind(c: &EigenRatioClass) -> &'static str {
    match c {
        EigenRatioClass::BothZero => "zero",
        EigenRatioClass::OneZeroNonNilpotent => "onezero",
        EigenRatioClass::Nilpotent => "nilpotent",
        EigenRatioClass::RatioPositiveRational(_) => "pos",
        EigenRatioClass::RatioNegativeRational(_) => "neg",
        EigenRatioClass::RatioIrrationalOrComplex => "irr",
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_along_is_additive(a in 0u32..4, b in 0u32..4, cn in -5i64..6, cd in 1i64..4) {
        prop_assume!(cn != 0);
        // Base field and curves.
        let vf0 = parse_vf("x*y*(2*x, -y)", ("x", "y")).unwrap();
        let coeff = GaussRat::from_frac(cn, cd);
        let f = RationalFn2::from_poly(BiPoly::monomial(coeff, a, b));
        let scaled = vf0.scale(&f);
        for curve in [BiPoly::x(), BiPoly::y()] {
            let v0 = vf0.order_along(&curve).unwrap();
            let v1 = scaled.order_along(&curve).unwrap();
            let val = f.valuation_along(&curve).unwrap();
            prop_assert_eq!(v1, v0 + val);
        }
    }

    #[test]
    fn eigen_class_is_conjugation_invariant(m in mat_strategy(), g in mat_strategy()) {
        let det = &(&g[0][0] * &g[1][1]) - &(&g[0][1] * &g[1][0]);
        prop_assume!(!det.is_zero());
        let inv = det.inv();
        let ginv: Mat2 = [
            [&g[1][1] * &inv, -&(&g[0][1] * &inv)],
            [-&(&g[1][0] * &inv), &g[0][0] * &inv],
        ];
        // g m g^{-1}
        let mul = |x: &Mat2, y: &Mat2| -> Mat2 {
            let e = |i: usize, j: usize| -> GaussRat {
                &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j])
            };
            [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
        };
        let conj = mul(&mul(&g, &m), &ginv);
        let c1 = vf::eigen_ratio_class(&m);
        let c2 = vf::eigen_ratio_class(&conj);
        prop_assert_eq!(class_kind(&c1), class_kind(&c2));
        // Rational ratios agree up to inversion (the coordinate convention
        // is lost under conjugation).
        if let (
            EigenRatioClass::RatioNegativeRational(r1),
            EigenRatioClass::RatioNegativeRational(r2),
        ) = (&c1, &c2)
        {
            prop_assert!(r1 == r2 || *r1 == r2.recip());
        }
    }

    #[test]
    fn rational_normalization_idempotent(
        an in -5i64..6, bn in -5i64..6, cn in 1i64..5
    ) {
        let x = BiPoly::x();
        let y = BiPoly::y();
        let num = x.scale(&GaussRat::from_int(an)).add(&y.pow(2).scale(&GaussRat::from_int(bn)));
        prop_assume!(!num.is_zero());
        let den = x.add(&y).mul(&BiPoly::constant(GaussRat::from_int(cn)));
        let f = RationalFn2::new(num.mul(&den), den.clone());
        let g = RationalFn2::new(f.num().clone(), f.den().clone());
        prop_assert_eq!(&f, &g);
        let h = RationalFn2::new(g.num().clone(), g.den().clone());
        prop_assert_eq!(&g, &h);
    }

    #[test]
    fn defect_cocycle(a1 in 1i64..5, a2 in -4i64..5, a3 in 1i64..4) {
        // Charts with nonvanishing derivative at generic points.
        let c_a = parse_rational1("z", "z").unwrap().scale(&q(a1, 1));
        let base = parse_rational1("z^2 + 1", "z").unwrap();
        let c_b = base.scale(&q(a2.max(1), 1)).add(&parse_rational1("z", "z").unwrap());
        let c_c = parse_rational1("(z^3 + 2)/(z + 5)", "z").unwrap().scale(&q(a3, 1));
        let dab = affine::defect_between(&c_a, &c_b).unwrap();
        let dbc = affine::defect_between(&c_b, &c_c).unwrap();
        let dac = affine::defect_between(&c_a, &c_c).unwrap();
        prop_assert_eq!(dac.form, dab.add(&dbc).form);
    }

    #[test]
    fn univalence_rescaling_invariant(
        deg in 0usize..6, lead in 1i64..4, scale_im in -3i64..4
    ) {
        let mut coeffs = vec![GaussRat::zero(); deg + 1];
        coeffs[deg] = GaussRat::from_int(lead);
        if deg >= 1 {
            coeffs[0] = GaussRat::from_int(1);
        }
        let f = RationalFn1::from_poly(UniPoly::new(coeffs));
        let lam = GaussRat::new(
            num_rational::BigRational::from_integer(2.into()),
            num_rational::BigRational::from_integer(scale_im.into()),
        );
        let v1 = affine::univalence_1d(&f).unwrap();
        let v2 = affine::univalence_1d(&f.scale(&lam)).unwrap();
        prop_assert_eq!(v1.status, v2.status);
    }

    #[test]
    fn mobius_fixed_points_are_fixed(m in mat_strategy()) {
        let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        prop_assume!(!det.is_zero());
        let num = MobiusNum {
            m: [
                [m[0][0].to_complex(), m[0][1].to_complex()],
                [m[1][0].to_complex(), m[1][1].to_complex()],
            ],
        }
        .det_normalized();
        for p in num.fixed_points() {
            let image = num.apply(p);
            prop_assert!(image.dist(&p) < 1e-8, "{:?} moved to {:?}", p, image);
        }
    }

    #[test]
    fn exact_threshold_soundness(
        ms in proptest::collection::vec(mat_strategy(), 2..4),
        make_scalar in proptest::bool::ANY
    ) {
        // Either random maps or a family of scalars; in every case, a
        // common fixed locus with three or more points implies all maps are
        // scalar (trivial in PSL(2, C)).
        let maps: Vec<MobiusExact> = if make_scalar {
            ms.iter()
                .map(|m| {
                    let mut s = m[0][0].clone();
                    if s.is_zero() {
                        s = GaussRat::one();
                    }
                    MobiusExact::new([
                        [s.clone(), GaussRat::zero()],
                        [GaussRat::zero(), s],
                    ])
                })
                .collect()
        } else {
            ms.iter()
                .filter(|m| {
                    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
                    !det.is_zero()
                })
                .map(|m| MobiusExact::new(m.clone()))
                .collect()
        };
        prop_assume!(!maps.is_empty());
        match univalens::riccati::mobius::common_fixed_locus(&maps) {
            univalens::riccati::mobius::FixedLocus::Whole => {
                for m in &maps {
                    prop_assert!(m.is_scalar());
                }
            }
            univalens::riccati::mobius::FixedLocus::Points { count, .. } => {
                prop_assert!(count <= 2);
            }
        }
    }
}

#[test]
fn signature_exhaustive_enumeration() {
    // All genus-0 signatures with indices in {+-2, +-3, +-4, +-6, inf} of
    // size <= 4: true exactly on the listed ones.
    let vals = [
        SigIndex::Int(2),
        SigIndex::Int(-2),
        SigIndex::Int(3),
        SigIndex::Int(-3),
        SigIndex::Int(4),
        SigIndex::Int(-4),
        SigIndex::Int(6),
        SigIndex::Int(-6),
        SigIndex::Infinity,
    ];
    let mut allowed: Vec<Vec<SigIndex>> = vec![
        vec![],
        vec![SigIndex::Infinity, SigIndex::Infinity],
        vec![SigIndex::Int(2), SigIndex::Int(2), SigIndex::Infinity],
        vec![SigIndex::Int(2), SigIndex::Int(3), SigIndex::Int(6)],
        vec![SigIndex::Int(2), SigIndex::Int(4), SigIndex::Int(4)],
        vec![SigIndex::Int(3), SigIndex::Int(3), SigIndex::Int(3)],
        vec![
            SigIndex::Int(2),
            SigIndex::Int(2),
            SigIndex::Int(2),
            SigIndex::Int(2),
        ],
    ];
    for n in [2, 3, 4, 6] {
        allowed.push(vec![SigIndex::Int(n), SigIndex::Int(-n)]);
    }
    let normalize = |mut v: Vec<SigIndex>| {
        v.sort();
        v
    };
    let allowed: Vec<Vec<SigIndex>> = allowed.into_iter().map(normalize).collect();

    // Enumerate multisets of size 0..=4 (combinations with repetition).
    fn multisets(vals: &[SigIndex], size: usize) -> Vec<Vec<SigIndex>> {
        let mut out = vec![vec![]];
        for _ in 0..size {
            let mut next = Vec::new();
            for m in &out {
                let start = m
                    .last()
                    .map(|l| vals.iter().position(|v| v == l).unwrap())
                    .unwrap_or(0);
                for v in &vals[start..] {
                    let mut mm = m.clone();
                    mm.push(*v);
                    next.push(mm);
                }
            }
            out = next;
        }
        out
    }
    let mut total = 0;
    let mut positives = 0;
    for size in 0..=4 {
        for ms in multisets(&vals, size) {
            let sig = affine::OrbifoldSignature::new(0, ms.clone());
            let verdict = affine::uniformizable_signature(&sig);
            let expected = allowed.contains(&normalize(ms.clone()));
            assert_eq!(
                verdict.uniformizable, expected,
                "signature {:?} misclassified",
                ms
            );
            total += 1;
            if expected {
                positives += 1;
            }
        }
    }
    assert!(total > 400);
    assert_eq!(positives, 11);
}

#[test]
fn table_models_are_already_reduced() {
    let cases = [
        (ModelKind::Regular, 0, 2, 1, 1, 0),
        (ModelKind::FiniteRamification, 1, 1, 2, 1, 0),
        (ModelKind::InfiniteRamification, 1, 1, 1, 1, 0),
        (ModelKind::SaddleNode, 0, 2, 1, 1, 1),
    ];
    for (kind, p, q, m, n, k) in cases {
        let vf = normal_form(&kind, p, q, m, n, k);
        let tree = univalens::reduction::reduce(&vf, 8).unwrap();
        assert_eq!(tree.blowup_count, 0, "{:?} asked for blow-ups", kind);
        assert!(tree.all_reduced());
    }
}

#[test]
fn flip_roundtrip_is_identity() {
    let models = [
        "(z, 3*i*w)",
        "(z, 3*i*w + z^2)",
        "(2*z, w + z*w^2)",
    ];
    for src in models {
        let vf = parse_vf(src, ("z", "w")).unwrap();
        let there = flip(&vf, &FlipPoint::Finite(GaussRat::zero()));
        let back = flip_inverse(&there, &FlipPoint::Finite(GaussRat::zero()));
        assert_eq!(back.px, vf.px, "px mismatch for {}", src);
        assert_eq!(back.py, vf.py, "py mismatch for {}", src);
    }
}

#[test]
fn monodromy_representation_property() {
    use univalens::continuation::PathSpec;
    use univalens::riccati::{monodromy, MonodromyOpts, RiccatiEq};
    type C = Complex64;
    // Two singular times: 0 and 2; w' = (1/3) w/t + w/(5(t-2)).
    let eq = RiccatiEq::new(
        parse_rational1("0", "t").unwrap(),
        parse_rational1("1/(3*t) + 1/(5*(t-2))", "t").unwrap(),
        parse_rational1("0", "t").unwrap(),
    );
    // Loops based at the common point t = 1.
    let base = C::new(1.0, 0.0);
    let mk_loop = |center: C, r: f64| -> PathSpec {
        // From the base point, travel to the circle, run it, come back.
        let mut pts = vec![(base.re, base.im)];
        let entry = center + (base - center) * C::new(r / (base - center).norm(), 0.0);
        pts.push((entry.re, entry.im));
        let phase0 = (base - center).arg();
        let sides = 24;
        for k in 1..=sides {
            let th = phase0 + 2.0 * std::f64::consts::PI * (k as f64) / (sides as f64);
            let p = center + C::new(r * th.cos(), r * th.sin());
            pts.push((p.re, p.im));
        }
        pts.push((entry.re, entry.im));
        pts.push((base.re, base.im));
        PathSpec {
            kind: univalens::continuation::PathKind::Loop,
            waypoints: pts,
        }
    };
    let g1 = mk_loop(C::new(0.0, 0.0), 0.4);
    let g2 = mk_loop(C::new(2.0, 0.0), 0.4);
    let joint = PathSpec {
        kind: univalens::continuation::PathKind::Loop,
        waypoints: {
            let mut w = g1.waypoints.clone();
            w.extend(g2.waypoints.iter().cloned());
            w
        },
    };
    let opts = MonodromyOpts::new(1e-11);
    let rep = monodromy(&eq, &[g1, g2, joint], &opts).unwrap();
    let m1 = rep.generators[0].matrix;
    let m2 = rep.generators[1].matrix;
    let m12 = rep.generators[2].matrix;
    // Concatenation acts by composing the second after the first; compare
    // modulo the PSL sign.
    let prod = m2.compose(&m1).det_normalized();
    let diff_plus: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (m12.m[i][j] - prod.m[i][j]).norm())
        .fold(0.0, f64::max);
    let diff_minus: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (m12.m[i][j] + prod.m[i][j]).norm())
        .fold(0.0, f64::max);
    assert!(
        diff_plus.min(diff_minus) < 1e-7,
        "representation property violated: {:.3e}",
        diff_plus.min(diff_minus)
    );
}

#[test]
fn classify_local_errors_on_nonreduced() {
    let vf = parse_vf("(2*y, 3*x^2)", ("x", "y")).unwrap();
    let z = GaussRat::zero();
    assert!(classify_local(&vf, (&z, &z)).is_err());
}
