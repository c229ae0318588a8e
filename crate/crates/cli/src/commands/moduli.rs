use std::f64::consts::PI;
use std::sync::Arc;

use angulus::geometry::{BoundaryPoint, MobiusMap};
use angulus::koenigs::SemigroupElement;
use angulus::moduli::laplace::{disk_digon_oracle, LaplaceOptions};
use angulus::moduli::{
    change_of_variable, extremal_star_system, reduced_modulus, regularized_modulus, weighted_modulus_sum, Digon,
    DigonSystemReport, DiskChart, ModulusOptions,
};
use angulus::Complex64;
use serde::Serialize;

use super::prepare;
use crate::output::write_json;
use crate::scenario::Scenario;
use crate::Outcome;

#[derive(Serialize)]
struct ImageRow {
    t: f64,
    system: DigonSystemReport,
    weighted_sum_before: f64,
    weighted_sum_after: f64,
    /// `(1/π)[log φ'(a) + Σ α_k² log φ'(ξ_k)]`.
    predicted_difference: f64,
    identity_residual: f64,
}

#[derive(Serialize)]
struct CovarianceRow {
    rotation: f64,
    center: Complex64,
    modulus: f64,
    predicted: f64,
    residual: f64,
}

#[derive(Serialize)]
struct LaplaceRow {
    eps: f64,
    chart: f64,
    laplace: f64,
    grid_change: f64,
    difference: f64,
}

#[derive(Serialize)]
struct ModuliReport {
    system: DigonSystemReport,
    images: Vec<ImageRow>,
    covariance: CovarianceRow,
    laplace: LaplaceRow,
}

fn base_disk_digon() -> anyhow::Result<(Digon<'static>, BoundaryPoint, BoundaryPoint)> {
    let a = BoundaryPoint::from_angle(0.0);
    let b = BoundaryPoint::from_angle(PI);
    Ok((Digon::new(Arc::new(DiskChart::new(a, b)?), a, b, PI, PI)?, a, b))
}

fn covariance(opts: &ModulusOptions) -> anyhow::Result<CovarianceRow> {
    let (rotation, center) = (0.7, Complex64::new(0.3, 0.2));
    let t = MobiusMap::disk_automorphism(rotation, center)?;
    let (base, a, b) = base_disk_digon()?;
    let m0 = reduced_modulus(&base, opts)?.value;
    let chart = DiskChart::from_mobius(t.compose(DiskChart::new(a, b)?.mobius()))?;
    let (ta, tb) = chart.vertices()?;
    let image = Digon::new(Arc::new(chart), ta, tb, PI, PI)?;
    let modulus = reduced_modulus(&image, opts)?.value;
    let predicted = change_of_variable(m0, PI, PI, t.derivative(a.value())?.norm(), t.derivative(b.value())?.norm())?;
    Ok(CovarianceRow {
        rotation,
        center,
        modulus,
        predicted,
        residual: (modulus - predicted).abs(),
    })
}

fn laplace(opts: &ModulusOptions) -> anyhow::Result<LaplaceRow> {
    let eps = 0.1;
    let (base, a, b) = base_disk_digon()?;
    let chart = regularized_modulus(&base, eps, opts.nodes)?;
    let oracle = disk_digon_oracle(a, b, eps, &LaplaceOptions::default())?;
    Ok(LaplaceRow {
        eps,
        chart,
        laplace: oracle.regularized,
        grid_change: oracle.grid_change,
        difference: (chart - oracle.regularized).abs(),
    })
}

pub fn moduli(s: &Scenario) -> anyhow::Result<Outcome> {
    let (dom, map) = prepare(s)?;
    let opts = ModulusOptions::default();
    let system = extremal_star_system(&map, dom.alphas(), &opts)?;
    let before = weighted_modulus_sum(&system)?;
    let mut images = Vec::new();
    for &t in &s.times {
        let phi = SemigroupElement::new(&map, t)?;
        let image = system.image_under(&phi)?.with_moduli(&opts)?;
        let after = weighted_modulus_sum(&image)?;
        let exact = map.exact_multipliers(t)?;
        let predicted = (exact.denjoy_wolff().log_multiplier
            + dom
                .alphas()
                .iter()
                .zip(exact.costs())
                .map(|(a, c)| a * a * c)
                .sum::<f64>())
            / PI;
        images.push(ImageRow {
            t,
            system: image.report()?,
            weighted_sum_before: before,
            weighted_sum_after: after,
            predicted_difference: predicted,
            identity_residual: (after - before - predicted).abs(),
        });
    }
    let report = ModuliReport {
        system: system.report()?,
        images,
        covariance: covariance(&opts)?,
        laplace: laplace(&opts)?,
    };
    write_json(&s.out.join("moduli_report.json"), &report)?;
    Ok(Outcome::Ok)
}
