//! Acceptance criteria 1-9, one line per criterion. Exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use std::time::Instant;

use angulus::angular::radial_angular_derivative;
use angulus::geometry::{BoundaryPoint, MobiusMap};
use angulus::inequality::{
    optimal_weights_for_costs, recover_unweighted, verify_weighted, FixedPointMultiplier, MultiplierData,
    WeightVector,
};
use angulus::koenigs::{build_koenigs_map, KoenigsMap, SemigroupElement, SlitStripDomain};
use angulus::moduli::laplace::{disk_digon_oracle, LaplaceOptions};
use angulus::moduli::{
    change_of_variable, extremal_star_system, reduced_modulus, regularized_modulus, weighted_modulus_sum, Digon,
    DiskChart, ModulusOptions,
};
use angulus::quaddiff::{
    circle_trajectory_residual, extremal_ode_residual, hausdorff_distance, heights, interior_grid, solve_parameters,
    trace_trajectory, zero_angles, StarQuadDiff, TraceOptions, TrajectoryKind,
};
use angulus::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRIP_TOL: f64 = 1e-10;
const MULTIPLIER_REL_TOL: f64 = 1e-5;
const EXACT_SLACK_TOL: f64 = 1e-12;
const ESTIMATED_SLACK_TOL: f64 = 1e-3;
const GRID_ORACLE_TOL: f64 = 1e-6;
const CONSISTENCY_TOL: f64 = 1e-12;
const COVARIANCE_TOL: f64 = 1e-6;
const LAPLACE_TOL: f64 = 1e-2;
const IDENTITY_TOL: f64 = 1e-3;
const CIRCLE_TOL: f64 = 1e-10;
const HEIGHT_TOL: f64 = 1e-8;
const ZERO_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-6;
const ODE_TOL: f64 = 1e-4;
const MISMATCH_FLOOR: f64 = 1e-2;
const HAUSDORFF_TOL: f64 = 1e-3;
const IDENTITY_AT_ZERO_TOL: f64 = 1e-12;
const SEMIGROUP_TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn map_of(alphas: &[f64], gammas: &[f64]) -> Result<KoenigsMap, String> {
    let dom = SlitStripDomain::new(alphas.to_vec(), gammas.to_vec()).map_err(|e| e.to_string())?;
    build_koenigs_map(&dom, 1e-12).map_err(|e| e.to_string())
}

fn estimated_data(map: &KoenigsMap, t: f64) -> Result<MultiplierData, String> {
    let phi = SemigroupElement::new(map, t).map_err(|e| e.to_string())?;
    let fp = map.locate_fixed_points();
    let est = |p: BoundaryPoint| -> Result<FixedPointMultiplier, String> {
        let d = radial_angular_derivative(&phi, p).map_err(|e| e.to_string())?;
        Ok(FixedPointMultiplier::estimated(Some(p), d.multiplier, d.error))
    };
    let repulsive = fp.repulsive.iter().map(|p| est(*p)).collect::<Result<Vec<_>, _>>()?;
    MultiplierData::new(est(fp.denjoy_wolff)?, repulsive).map_err(|e| e.to_string())
}

fn test_points() -> Vec<Complex64> {
    (0..20)
        .map(|j| Complex64::from_polar(0.05 + 0.045 * j as f64, 0.7 * j as f64))
        .collect()
}

fn strip_oracle() -> Outcome {
    let start = Instant::now();
    let map = map_of(&[1.0], &[])?;
    let closed = |z: Complex64| ((1.0 + z) / (1.0 - z)).ln() / PI;
    let mut h_err = 0.0f64;
    for z in test_points() {
        h_err = h_err.max((map.eval_h(z).map_err(|e| e.to_string())? - closed(z)).norm());
    }
    let mut mult_err = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let phi = SemigroupElement::new(&map, t).map_err(|e| e.to_string())?;
        for (xi, exact) in [(0.0, (-PI * t).exp()), (PI, (PI * t).exp())] {
            let d = radial_angular_derivative(&phi, BoundaryPoint::from_angle(xi)).map_err(|e| e.to_string())?;
            mult_err = mult_err.max((d.multiplier - exact).abs() / exact);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        h_err <= STRIP_TOL && mult_err <= MULTIPLIER_REL_TOL && secs < 5.0,
        format!("max |h - closed form| {h_err:.1e}, multiplier rel. error {mult_err:.1e}, {secs:.2} s"),
    )
}

fn sharpness() -> Outcome {
    let start = Instant::now();
    let map = map_of(&[0.4, 0.6], &[-1.0])?;
    let weights = WeightVector::new(vec![0.4, 0.6]).map_err(|e| e.to_string())?;
    let exact = map.exact_multipliers(1.0).map_err(|e| e.to_string())?;
    let formulas = [(-PI).exp(), (PI / 0.4).exp(), (PI / 0.6).exp()];
    let values = [
        exact.denjoy_wolff().multiplier(),
        exact.repulsive()[0].multiplier(),
        exact.repulsive()[1].multiplier(),
    ];
    let formula_err = values
        .iter()
        .zip(formulas)
        .map(|(v, f)| (v - f).abs() / f)
        .fold(0.0, f64::max);
    let exact_slack = verify_weighted(&exact, &weights).map_err(|e| e.to_string())?.slack;
    let est = verify_weighted(&estimated_data(&map, 1.0)?, &weights).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    check(
        formula_err <= 1e-14
            && exact_slack.abs() <= EXACT_SLACK_TOL
            && est.slack.abs() <= est.error_bound
            && est.slack.abs() <= ESTIMATED_SLACK_TOL
            && secs < 60.0,
        format!(
            "exact slack {exact_slack:.1e}, estimated slack {:.1e} within bound {:.1e}, {secs:.2} s",
            est.slack, est.error_bound
        ),
    )
}

fn strictness() -> Outcome {
    let map = map_of(&[0.5, 0.5], &[-1.0])?;
    let weights = WeightVector::new(vec![0.3, 0.7]).map_err(|e| e.to_string())?;
    let exact = verify_weighted(&map.exact_multipliers(1.0).map_err(|e| e.to_string())?, &weights)
        .map_err(|e| e.to_string())?;
    let est = verify_weighted(&estimated_data(&map, 1.0)?, &weights).map_err(|e| e.to_string())?;
    let target = 0.16 * PI;
    check(
        (exact.slack - target).abs() <= EXACT_SLACK_TOL && est.slack - est.error_bound > 0.0,
        format!(
            "exact slack - 0.16π = {:.1e}, estimated slack {:.6} ± {:.1e}",
            exact.slack - target,
            est.slack,
            est.error_bound
        ),
    )
}

fn recovery() -> Outcome {
    let costs = [1.0, 3.0];
    let opt = optimal_weights_for_costs(&costs).map_err(|e| e.to_string())?;
    let f = |a: f64| a * a * costs[0] + (1.0 - a) * (1.0 - a) * costs[1];
    let grid_best = (0..=1000)
        .map(|i| i as f64 * 1e-3)
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .expect("non-empty grid");
    let w = opt.weights.as_slice();
    let oracle_gap = (w[0] - grid_best).abs().max((w[0] - 0.75).abs()).max((w[1] - 0.25).abs());

    let data = MultiplierData::from_multipliers((-0.5f64).exp(), &[1f64.exp(), 3f64.exp()]).map_err(|e| e.to_string())?;
    let rec = recover_unweighted(&data).map_err(|e| e.to_string())?;
    let residual = rec.consistency_residual.unwrap_or(f64::INFINITY);
    let mut dominated = true;
    for i in 0..=100 {
        let a = i as f64 * 1e-2;
        let wv = WeightVector::new(vec![a, 1.0 - a]).map_err(|e| e.to_string())?;
        let slack = verify_weighted(&data, &wv).map_err(|e| e.to_string())?.slack;
        dominated &= slack >= rec.slack - 1e-12;
    }
    check(
        oracle_gap <= GRID_ORACLE_TOL && residual <= CONSISTENCY_TOL && dominated,
        format!("weights ({:.6}, {:.6}), grid gap {oracle_gap:.1e}, consistency {residual:.1e}, dominance {dominated}", w[0], w[1]),
    )
}

fn covariance() -> Outcome {
    let opts = ModulusOptions::default();
    let a = BoundaryPoint::from_angle(PI);
    let b = BoundaryPoint::from_angle(0.0);
    let base_chart = DiskChart::new(a, b).map_err(|e| e.to_string())?;
    let base = Digon::new(Arc::new(base_chart), a, b, PI, PI).map_err(|e| e.to_string())?;
    let m0 = reduced_modulus(&base, &opts).map_err(|e| e.to_string())?.value;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = Complex64::from_polar(rng.random_range(0.0..0.8), rng.random_range(-PI..PI));
        let t = MobiusMap::disk_automorphism(rng.random_range(-PI..PI), p).map_err(|e| e.to_string())?;
        let chart = DiskChart::from_mobius(t.compose(base_chart.mobius())).map_err(|e| e.to_string())?;
        let (ta, tb) = chart.vertices().map_err(|e| e.to_string())?;
        let image = Digon::new(Arc::new(chart), ta, tb, PI, PI).map_err(|e| e.to_string())?;
        let m = reduced_modulus(&image, &opts).map_err(|e| e.to_string())?.value;
        let da = t.derivative(a.value()).map_err(|e| e.to_string())?.norm();
        let db = t.derivative(b.value()).map_err(|e| e.to_string())?.norm();
        let predicted = change_of_variable(m0, PI, PI, da, db).map_err(|e| e.to_string())?;
        worst = worst.max((m - predicted).abs());
    }
    let eps = 0.1;
    let chart = regularized_modulus(&base, eps, opts.nodes).map_err(|e| e.to_string())?;
    let oracle = disk_digon_oracle(a, b, eps, &LaplaceOptions::default()).map_err(|e| e.to_string())?;
    let laplace_gap = (chart - oracle.regularized).abs();
    check(
        worst <= COVARIANCE_TOL && laplace_gap <= LAPLACE_TOL,
        format!("max covariance residual {worst:.1e} over 20 maps, Laplace gap {laplace_gap:.1e} at ε = {eps}"),
    )
}

fn end_to_end_identity() -> Outcome {
    let map = map_of(&[0.4, 0.6], &[-1.0])?;
    let opts = ModulusOptions::default();
    let sys = extremal_star_system(&map, &[0.4, 0.6], &opts).map_err(|e| e.to_string())?;
    let phi = SemigroupElement::new(&map, 1.0).map_err(|e| e.to_string())?;
    let img = sys
        .image_under(&phi)
        .and_then(|s| s.with_moduli(&opts))
        .map_err(|e| e.to_string())?;
    let diff = weighted_modulus_sum(&img).map_err(|e| e.to_string())?
        - weighted_modulus_sum(&sys).map_err(|e| e.to_string())?;
    let exact = map.exact_multipliers(1.0).map_err(|e| e.to_string())?;
    let predicted = exact.denjoy_wolff().log_multiplier
        + [0.4f64, 0.6].iter().zip(exact.costs()).map(|(a, c)| a * a * c).sum::<f64>();
    check(
        diff.abs() <= IDENTITY_TOL && predicted.abs() <= 1e-12,
        format!("weighted modulus difference {diff:.1e}, multiplier side {predicted:.1e}"),
    )
}

fn circle_deviation(qd: &StarQuadDiff) -> Result<f64, String> {
    let a = qd.denjoy_wolff();
    let gap = qd.repulsive().iter().map(|x| a.ccw_to(x)).fold(f64::INFINITY, f64::min);
    let start = BoundaryPoint::from_angle(a.angle() + 0.5 * gap).value();
    let tr = trace_trajectory(qd, start, &TraceOptions::new(TrajectoryKind::Trajectory, 1.0)).map_err(|e| e.to_string())?;
    Ok(tr.points.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max))
}

fn quadratic_differential() -> Outcome {
    let bp = BoundaryPoint::from_angle;
    let asym = map_of(&[0.4, 0.6], &[-1.0])?.locate_fixed_points();
    let cases: Vec<(&str, BoundaryPoint, Vec<BoundaryPoint>, Vec<f64>)> = vec![
        ("n=1", bp(0.0), vec![bp(PI)], vec![1.0]),
        ("symmetric", bp(0.0), vec![bp(PI / 2.0), bp(-PI / 2.0)], vec![0.5, 0.5]),
        ("asymmetric", asym.denjoy_wolff, asym.repulsive.clone(), vec![0.4, 0.6]),
    ];
    let (mut circle, mut height, mut trace, mut zero) = (0.0f64, 0.0f64, 0.0f64, f64::NAN);
    for (name, a, xis, alphas) in cases {
        let qd = solve_parameters(a, &xis, &alphas).map_err(|e| format!("{name}: {e}"))?;
        circle = circle.max(circle_trajectory_residual(&qd, 2000, 1e-3));
        let hs = heights(&qd).map_err(|e| e.to_string())?;
        height = height.max(hs.iter().zip(&alphas).map(|(h, a)| (h - a).abs()).fold(0.0, f64::max));
        trace = trace.max(circle_deviation(&qd)?);
        if name == "symmetric" {
            let d = (zero_angles(&qd)[0] - PI).rem_euclid(TAU);
            zero = d.min(TAU - d);
        }
    }
    check(
        circle <= CIRCLE_TOL && height <= HEIGHT_TOL && zero <= ZERO_TOL && trace <= TRACE_TOL,
        format!("circle residual {circle:.1e}, height error {height:.1e}, |β - π| {zero:.1e}, trace deviation {trace:.1e}"),
    )
}

fn coincidence() -> Outcome {
    let map = map_of(&[0.4, 0.6], &[-1.0])?;
    let fp = map.locate_fixed_points();
    let qd = solve_parameters(fp.denjoy_wolff, &fp.repulsive, &[0.4, 0.6]).map_err(|e| e.to_string())?;
    let wrong = solve_parameters(fp.denjoy_wolff, &fp.repulsive, &[0.5, 0.5]).map_err(|e| e.to_string())?;
    let phi = SemigroupElement::new(&map, 1.0).map_err(|e| e.to_string())?;
    let grid = interior_grid(8, 16, 0.9);
    let matched = extremal_ode_residual(&qd, &phi, &grid, 1e-2).map_err(|e| e.to_string())?.max_residual;
    let mismatched = extremal_ode_residual(&wrong, &phi, &grid, 1e-2).map_err(|e| e.to_string())?.max_residual;

    let (length, step) = (2.0, 0.002);
    let start = map.eval_h_inverse(Complex64::new(0.0, -0.3)).map_err(|e| e.to_string())?;
    let small = SemigroupElement::new(&map, step).map_err(|e| e.to_string())?;
    let mut orbit = vec![start];
    for _ in 0..(length / step).round() as usize {
        let z = small.apply(*orbit.last().expect("non-empty")).map_err(|e| e.to_string())?;
        orbit.push(z);
    }
    let tr = trace_trajectory(&qd, start, &TraceOptions::new(TrajectoryKind::Trajectory, length)).map_err(|e| e.to_string())?;
    let hd = hausdorff_distance(&orbit, &tr.points);
    check(
        matched <= ODE_TOL && mismatched >= MISMATCH_FLOOR && hd <= HAUSDORFF_TOL,
        format!("ODE residual {matched:.1e}, mismatched {mismatched:.1e}, orbit-trajectory Hausdorff {hd:.1e}"),
    )
}

fn semigroup_axioms() -> Outcome {
    let map = map_of(&[0.4, 0.6], &[-1.0])?;
    let grid = interior_grid(10, 10, 0.9);
    let el = |t: f64| SemigroupElement::new(&map, t).map_err(|e| e.to_string());
    let (mut id, mut law, mut koenigs) = (0.0f64, 0.0f64, 0.0f64);
    let phi0 = el(0.0)?;
    for &z in &grid {
        id = id.max((phi0.apply(z).map_err(|e| e.to_string())? - z).norm());
        for t in [0.3, 0.7] {
            let phi_t = el(t)?;
            let w = phi_t.apply(z).map_err(|e| e.to_string())?;
            let hz = map.eval_h(z).map_err(|e| e.to_string())?;
            let hw = map.eval_h(w).map_err(|e| e.to_string())?;
            koenigs = koenigs.max((hw - hz - t).norm());
            for s in [0.3, 0.7] {
                let both = el(s)?.apply(w).map_err(|e| e.to_string())?;
                let direct = el(t + s)?.apply(z).map_err(|e| e.to_string())?;
                law = law.max((both - direct).norm());
            }
        }
    }
    check(
        id <= IDENTITY_AT_ZERO_TOL && law <= SEMIGROUP_TOL && koenigs <= SEMIGROUP_TOL,
        format!("identity {id:.1e}, semigroup law {law:.1e}, Koenigs equation {koenigs:.1e} on {} points", grid.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("strip closed form and multipliers", strip_oracle),
        ("equality for matched weights", sharpness),
        ("strict inequality for mismatched weights", strictness),
        ("optimal weights and unweighted recovery", recovery),
        ("reduced modulus covariance and Laplace oracle", covariance),
        ("weighted modulus identity", end_to_end_identity),
        ("quadratic differential fit", quadratic_differential),
        ("semigroup and quadratic differential coincide", coincidence),
        ("semigroup axioms", semigroup_axioms),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
