use std::f64::consts::PI;
use std::sync::Arc;

use angulus::angular::Composition;
use angulus::geometry::{BoundaryPoint, MobiusMap};
use angulus::koenigs::{build_koenigs_map, SemigroupElement, SlitStripDomain};
use angulus::moduli::{
    change_of_variable, disk_modulus, extremal_star_system, reduced_modulus, weighted_modulus_sum, Digon,
    DigonChart, DiskChart, ModulusOptions,
};
use angulus::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_automorphism(rng: &mut ChaCha8Rng) -> MobiusMap {
    let p = Complex64::from_polar(rng.random_range(0.0..0.7), rng.random_range(-PI..PI));
    MobiusMap::disk_automorphism(rng.random_range(-PI..PI), p).unwrap()
}

#[test]
fn mobius_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = ModulusOptions::default();
    let base_a = BoundaryPoint::from_angle(0.0);
    let base_b = BoundaryPoint::from_angle(PI);
    let base = Digon::new(Arc::new(DiskChart::new(base_a, base_b).unwrap()), base_a, base_b, PI, PI).unwrap();
    let m0 = reduced_modulus(&base, &opts).unwrap().value;
    for _ in 0..5 {
        let t = random_automorphism(&mut rng);
        let chart = DiskChart::from_mobius(t.compose(DiskChart::new(base_a, base_b).unwrap().mobius())).unwrap();
        let (ta, tb) = chart.vertices().unwrap();
        let image = Digon::new(Arc::new(chart), ta, tb, PI, PI).unwrap();
        let m = reduced_modulus(&image, &opts).unwrap().value;
        let da = t.derivative(base_a.value()).unwrap().norm();
        let db = t.derivative(base_b.value()).unwrap().norm();
        let predicted = change_of_variable(m0, PI, PI, da, db).unwrap();
        assert!((m - predicted).abs() < 1e-6, "{m} vs {predicted}");
        assert!((m - disk_modulus(ta, tb)).abs() < 1e-6);
    }
}

#[test]
fn rotation_invariance() {
    let opts = ModulusOptions::default();
    let a = BoundaryPoint::from_angle(0.7);
    let b = BoundaryPoint::from_angle(0.7 + PI);
    let d = Digon::new(Arc::new(DiskChart::new(a, b).unwrap()), a, b, PI, PI).unwrap();
    let m = reduced_modulus(&d, &opts).unwrap().value;
    assert!((m - 2.0 / PI * 2f64.ln()).abs() < 1e-7);
}

#[test]
fn semigroup_images_keep_the_weighted_sum() {
    let dom = SlitStripDomain::new(vec![0.4, 0.6], vec![-1.0]).unwrap();
    let map = build_koenigs_map(&dom, 1e-12).unwrap();
    let phi = SemigroupElement::new(&map, 1.0).unwrap();
    let opts = ModulusOptions::default();
    let sys = extremal_star_system(&map, &[0.4, 0.6], &opts).unwrap();
    let img = sys.image_under(&phi).unwrap().with_moduli(&opts).unwrap();
    let diff = weighted_modulus_sum(&img).unwrap() - weighted_modulus_sum(&sys).unwrap();
    assert!(diff.abs() < 1e-6, "{diff}");
}

#[test]
fn conjugated_mismatched_semigroup_increases_the_sum() {
    let dom = SlitStripDomain::new(vec![0.4, 0.6], vec![-1.0]).unwrap();
    let map = build_koenigs_map(&dom, 1e-12).unwrap();
    let other = build_koenigs_map(&SlitStripDomain::new(vec![0.5, 0.5], vec![-0.5]).unwrap(), 1e-12).unwrap();
    let fp = map.locate_fixed_points();
    let fq = other.locate_fixed_points();
    let triple = |f: &angulus::koenigs::FixedPoints| {
        [f.denjoy_wolff.value(), f.repulsive[0].value(), f.repulsive[1].value()]
    };
    let t = MobiusMap::from_triples(triple(&fq), triple(&fp)).unwrap();
    assert!(t.is_automorphism());
    let time = 0.5;
    let psi = Composition {
        outer: t,
        inner: Composition {
            outer: SemigroupElement::new(&other, time).unwrap(),
            inner: t.inverse(),
        },
    };
    let opts = ModulusOptions::default();
    let sys = extremal_star_system(&map, &[0.4, 0.6], &opts).unwrap();
    let img = sys.image_under(&psi).unwrap().with_moduli(&opts).unwrap();
    let diff = weighted_modulus_sum(&img).unwrap() - weighted_modulus_sum(&sys).unwrap();
    // (1/π)[log ψ'(a) + Σ α_k² log ψ'(ξ_k)] with the multipliers of the other domain
    let predicted = time * (0.16 / 0.5 + 0.36 / 0.5 - 1.0);
    assert!(diff >= -1e-6);
    assert!((diff - predicted).abs() < 1e-5, "{diff} vs {predicted}");
    for k in 0..2 {
        let before = sys.moduli()[k].as_ref().unwrap().value;
        let after = img.moduli()[k].as_ref().unwrap().value;
        let shift = change_of_variable(
            before,
            PI * dom.alphas()[k],
            PI,
            (-PI * time).exp(),
            (PI * time / 0.5).exp(),
        )
        .unwrap();
        assert!((after - shift).abs() < 1e-5, "{after} vs {shift}");
    }
}

#[test]
fn star_charts_report_membership() {
    let dom = SlitStripDomain::new(vec![0.3, 0.7], vec![-0.4]).unwrap();
    let map = build_koenigs_map(&dom, 1e-12).unwrap();
    let sys = extremal_star_system(&map, &[0.3, 0.7], &ModulusOptions::default()).unwrap();
    let d0 = &sys.digons()[0];
    let z = d0.chart().eval(Complex64::new(0.2, 0.5)).unwrap();
    assert_eq!(d0.chart().contains(z), Some(true));
    assert_eq!(sys.digons()[1].chart().contains(z), Some(false));
    let report = sys.report().unwrap();
    let json = serde_json::to_string(&report).unwrap();
    assert!(json.contains("weighted_sum"));
}
