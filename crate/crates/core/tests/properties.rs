use coorbit::levi::section_defect;
use coorbit::report::to_json_string;
use coorbit::sampler::{sample_orbit, WalkConfig};
use coorbit::{
    catalog, classify, flow, is_fixed_point, is_solvable, killing_form, orbit_dimension, radical, structure_report,
    validate_algebra, Covector, LieAlgebra, Subspace, Tolerances, Vector, Verdict,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn names() -> Vec<&'static str> {
    catalog::names().collect()
}

fn algebra_at(i: usize) -> LieAlgebra {
    let names = names();
    catalog::algebra(names[i % names.len()]).unwrap()
}

fn take(coords: &[f64], n: usize) -> DVector<f64> {
    DVector::from_iterator(n, coords.iter().copied().cycle().take(n))
}

fn coords() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 12)
}

fn bracket(g: &LieAlgebra, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    g.bracket(&Vector(x.clone()), &Vector(y.clone())).unwrap().0
}

fn span(g: &LieAlgebra, vs: &[DVector<f64>], tol: &Tolerances) -> Subspace {
    Subspace::from_vectors(g.dim(), vs, tol)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn jacobi_holds_on_random_triples(i in 0usize..64, a in coords(), b in coords(), c in coords()) {
        let g = algebra_at(i);
        let n = g.dim();
        let (x, y, z) = (take(&a, n), take(&b, n), take(&c, n));
        let cyclic = bracket(&g, &x, &bracket(&g, &y, &z))
            + bracket(&g, &y, &bracket(&g, &z, &x))
            + bracket(&g, &z, &bracket(&g, &x, &y));
        let scale = g.scale().max(1.0).powi(2) * x.norm() * y.norm() * z.norm();
        prop_assert!(cyclic.norm() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn coad_is_exact_negative_transpose(i in 0usize..64, a in coords()) {
        let g = algebra_at(i);
        let x = Vector(take(&a, g.dim()));
        prop_assert_eq!(g.coad(&x).unwrap(), -g.ad(&x).unwrap().transpose());
    }

    #[test]
    fn bracket_subspaces_is_monotone(i in 0usize..64, a in coords(), a2 in coords(), b in coords(), b2 in coords()) {
        let tol = Tolerances::default();
        let g = algebra_at(i);
        let n = g.dim();
        let small = span(&g, &[take(&a, n)], &tol);
        let large = span(&g, &[take(&a, n), take(&a2, n)], &tol);
        let other = span(&g, &[take(&b, n), take(&b2, n)], &tol);
        let lhs = g.bracket_subspaces(&small, &other, &tol).unwrap();
        let rhs = g.bracket_subspaces(&large, &other, &tol).unwrap();
        prop_assert!(rhs.containment_residual(&lhs).unwrap() < 1e-9);
    }

    #[test]
    fn flow_group_law(i in 0usize..64, a in coords(), b in coords(), s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let g = algebra_at(i);
        let n = g.dim();
        let f = Covector(take(&a, n));
        let x = Vector(take(&b, n).normalize());
        let two = flow(&g, &flow(&g, &f, &x, s).unwrap(), &x, t).unwrap();
        let one = flow(&g, &f, &x, s + t).unwrap();
        prop_assert!((&two.0 - &one.0).norm() <= 1e-9 * one.norm().max(f.norm()).max(1.0));
    }

    #[test]
    fn orbit_dimension_is_even_and_zero_exactly_at_fixed_points(i in 0usize..64, a in coords(), zero_mask in 0u32..16) {
        let tol = Tolerances::default();
        let g = algebra_at(i);
        let n = g.dim();
        let mut f = take(&a, n);
        // zero out some coordinates so fixed points show up too
        for k in 0..n {
            if zero_mask & (1 << (k % 4)) != 0 {
                f[k] = 0.0;
            }
        }
        let f = Covector(f);
        let d = orbit_dimension(&g, &f, &tol).unwrap();
        prop_assert_eq!(d % 2, 0);
        prop_assert_eq!(is_fixed_point(&g, &f, &tol).unwrap(), d == 0);
    }

    #[test]
    fn verdict_is_constant_along_orbits(i in 0usize..64, a in coords(), b in coords(), t in -1.0f64..1.0) {
        let tol = Tolerances::default();
        let g = algebra_at(i);
        let n = g.dim();
        let f = Covector(take(&a, n));
        let moved = flow(&g, &f, &Vector(take(&b, n).normalize()), t).unwrap();
        let before = classify(&g, &f, &tol).unwrap();
        let after = classify(&g, &moved, &tol).unwrap();
        prop_assert_eq!(before.verdict, after.verdict);
        prop_assert_eq!(before.orbit_dim, after.orbit_dim);
    }

    #[test]
    fn compact_orbits_keep_their_restriction_to_gn(i in 0usize..64, a in coords(), b in coords(), t in -10.0f64..10.0) {
        let tol = Tolerances::default();
        let g = algebra_at(i);
        let n = g.dim();
        let report = structure_report(&g, &tol).unwrap();
        // project a random covector onto the annihilator of [g, g_n]
        let crit = g.bracket_subspaces(&Subspace::full(n), &report.gn, &tol).unwrap();
        let raw = take(&a, n);
        let mut f = &raw - crit.basis() * (crit.basis().transpose() * &raw);
        if f.norm() < 1e-12 * raw.norm() {
            f.fill(0.0);
        }
        let f = Covector(f);
        let c = classify(&g, &f, &tol).unwrap();
        prop_assert!(c.verdict.is_bounded());
        let moved = flow(&g, &f, &Vector(take(&b, n).normalize()), t).unwrap();
        let gn = report.gn.basis();
        let drift = (gn.transpose() * (&moved.0 - &f.0)).norm();
        prop_assert!(drift < 1e-6, "drift {}", drift);
    }

    #[test]
    fn sampler_is_deterministic(i in 0usize..64, a in coords(), seed in any::<u64>()) {
        let g = algebra_at(i);
        let f = Covector(take(&a, g.dim()));
        let config = WalkConfig::new(seed).with_steps(200);
        prop_assert_eq!(sample_orbit(&g, &f, &config).unwrap(), sample_orbit(&g, &f, &config).unwrap());
    }

    #[test]
    fn report_floats_round_trip(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..20)) {
        let text = to_json_string(&xs);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, xs);
    }
}

#[test]
fn solvable_algebras_never_have_nontrivial_compact_orbits() {
    let tol = Tolerances::default();
    let mut checked = 0;
    for name in names() {
        let g = catalog::algebra(name).unwrap();
        if !is_solvable(&g, &tol).unwrap() {
            continue;
        }
        for k in 0..20 {
            let f = Covector(DVector::from_fn(g.dim(), |i, _| ((i * 7 + k * 13) % 11) as f64 - 5.0));
            let c = classify(&g, &f, &tol).unwrap();
            assert!(!(c.verdict == Verdict::Compact && c.orbit_dim > 0), "{name}");
            checked += 1;
        }
    }
    assert!(checked >= 80);
}

#[test]
fn is_solvable_matches_derived_series() {
    let tol = Tolerances::default();
    for name in names() {
        let g = catalog::algebra(name).unwrap();
        let series = g.derived_series(&tol);
        let reaches_zero = series.last().unwrap().is_zero();
        assert_eq!(is_solvable(&g, &tol).unwrap(), reaches_zero, "{name}");
    }
}

#[test]
fn quotients_are_lie_algebras_with_ideal_kernel() {
    let tol = Tolerances::default();
    for name in names() {
        let g = catalog::algebra(name).unwrap();
        let n = g.dim();
        let candidates = [g.derived_algebra(&tol), radical(&g, &tol).unwrap(), Subspace::zero(n)];
        for ideal in candidates {
            let q = g.quotient(&ideal, &tol).unwrap();
            assert_eq!(q.dim() + ideal.dim(), n, "{name}");
            let p = &q.projection;
            let m = q.dim();
            assert_eq!(p.nrows(), m);
            if m > 0 {
                assert_eq!(p.clone().svd(false, false).rank(1e-9), m, "{name}: projection not surjective");
                assert!((p * &q.section - DMatrix::identity(m, m)).amax() < 1e-9);
                let algebra = q.algebra.as_ref().unwrap();
                validate_algebra(&algebra.to_table(), &tol).unwrap();
            }
            assert!((p * ideal.basis()).amax() < 1e-9, "{name}: ideal not in kernel");
        }
    }
}

#[test]
fn structure_invariants_hold_across_the_catalog() {
    let tol = Tolerances::default();
    for name in names() {
        let g = catalog::algebra(name).unwrap();
        let n = g.dim();
        let r = structure_report(&g, &tol).unwrap();

        let full = Subspace::full(n);
        let rr = g.bracket_subspaces(&full, &r.radical, &tol).unwrap();
        assert!(r.radical.containment_residual(&rr).unwrap() < 1e-9, "{name}: radical not an ideal");

        let Some(s) = r.semisimple.algebra.as_ref() else {
            assert_eq!(r.radical.dim(), n, "{name}");
            continue;
        };
        assert!(radical(s, &tol).unwrap().is_zero(), "{name}: quotient by radical not semisimple");

        let total: usize = r.simple_ideals.iter().map(|i| i.subspace.dim()).sum();
        assert_eq!(total, s.dim(), "{name}");
        let b = killing_form(s);
        let bnorm = b.matrix().amax().max(1.0);
        for (a, i) in r.simple_ideals.iter().enumerate() {
            for j in r.simple_ideals.iter().skip(a + 1) {
                let ij = s.bracket_subspaces(&i.subspace, &j.subspace, &tol).unwrap();
                assert!(ij.is_zero(), "{name}: simple ideals do not commute");
                let cross = i.subspace.basis().transpose() * b.matrix() * j.subspace.basis();
                assert!(cross.amax() < 1e-9 * bnorm, "{name}: simple ideals not Killing-orthogonal");
            }
        }

        let levi = r.levi.as_ref().unwrap();
        assert_eq!(levi.subspace.dim() + r.radical.dim(), n, "{name}");
        assert!(section_defect(&g, s, &levi.section) < tol.levi_threshold(g.scale()), "{name}");
    }
}

#[test]
fn killing_dual_form_is_conserved_on_semisimple_algebras() {
    let tol = Tolerances::default();
    for name in names() {
        let g = catalog::algebra(name).unwrap();
        if !radical(&g, &tol).unwrap().is_zero() {
            continue;
        }
        let n = g.dim();
        let binv = killing_form(&g).matrix().clone().try_inverse().unwrap();
        for k in 0..10 {
            let f = Covector(DVector::from_fn(n, |i, _| ((i * 5 + k * 3) % 7) as f64 - 3.0));
            let x = Vector(DVector::from_fn(n, |i, _| ((i * 11 + k) % 5) as f64 - 2.0).normalize());
            let q0 = f.0.dot(&(&binv * &f.0));
            let moved = flow(&g, &f, &x, 0.9).unwrap();
            let q1 = moved.0.dot(&(&binv * &moved.0));
            assert!((q1 - q0).abs() <= 1e-8 * q0.abs().max(1.0), "{name}: {q0} -> {q1}");
        }
    }
}
