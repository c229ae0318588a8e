use std::f64::consts::PI;

use angulus::geometry::BoundaryPoint;
use angulus::koenigs::{KoenigsMap, SemigroupElement};
use angulus::quaddiff::{
    circle_trajectory_residual, eval_Q, extremal_ode_residual, hausdorff_distance, heights, interior_grid,
    slit_arcs, solve_parameters, trace_trajectory, zero_angles, StarQuadDiff, TraceOptions, TrajectoryKind,
};
use angulus::Complex64;
use serde::Serialize;

use super::{channel_point, prepare};
use crate::output::{write_json, write_text};
use crate::scenario::Scenario;
use crate::svg::{circle, Frame, Svg};
use crate::{Coded, Outcome};

#[derive(Serialize)]
struct ClosedFormRow {
    points: usize,
    max_relative_error: f64,
}

#[derive(Serialize)]
struct OdeRow {
    t: f64,
    max_residual: f64,
    evaluated: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct MismatchRow {
    alphas: Vec<f64>,
    max_residual: f64,
}

#[derive(Serialize)]
struct CoincidenceRow {
    start: Complex64,
    length: f64,
    orbit_points: usize,
    hausdorff: f64,
}

#[derive(Serialize)]
struct QdReport {
    alphas: Vec<f64>,
    denjoy_wolff: f64,
    repulsive: Vec<f64>,
    zeros: Vec<f64>,
    constant: Complex64,
    residues: Vec<Complex64>,
    residue_at_denjoy_wolff: Complex64,
    warnings: Vec<String>,
    circle_residual: f64,
    circle_trace_deviation: f64,
    heights: Vec<f64>,
    height_error: f64,
    closed_form: Option<ClosedFormRow>,
    ode: OdeRow,
    mismatched: Option<MismatchRow>,
    coincidence: CoincidenceRow,
}

fn fit(a: BoundaryPoint, xis: &[BoundaryPoint], alphas: &[f64]) -> anyhow::Result<StarQuadDiff> {
    solve_parameters(a, xis, alphas).map_err(|e| Coded(4, format!("quadratic differential: {e}")).into())
}

/// `Q = 4a² / (π² (z² - a²)²)` at 20 interior points.
fn closed_form(qd: &StarQuadDiff) -> anyhow::Result<ClosedFormRow> {
    let a = qd.denjoy_wolff().value();
    let mut worst = 0.0f64;
    for j in 0..20 {
        let z = Complex64::from_polar(0.05 + 0.045 * j as f64, 0.7 * j as f64);
        let exact = 4.0 * a * a / (PI * PI * (z * z - a * a).powi(2));
        worst = worst.max((eval_Q(qd, z)? - exact).norm() / exact.norm());
    }
    Ok(ClosedFormRow {
        points: 20,
        max_relative_error: worst,
    })
}

/// Largest `||z| - 1|` along the circle trajectory started between `a` and
/// its counter-clockwise neighbour.
fn circle_trace(qd: &StarQuadDiff) -> anyhow::Result<f64> {
    let a = qd.denjoy_wolff();
    let next = qd
        .repulsive()
        .iter()
        .map(|x| a.ccw_to(x))
        .fold(f64::INFINITY, f64::min);
    let start = BoundaryPoint::from_angle(a.angle() + 0.5 * next).value();
    let tr = trace_trajectory(qd, start, &TraceOptions::new(TrajectoryKind::Trajectory, 1.0))?;
    Ok(tr.points.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max))
}

/// Orbit of `h^{-1}(i y)` under `φ_{0.002}` against the trajectory from the
/// same point, both of `h`-length 2.
fn coincidence(map: &KoenigsMap, qd: &StarQuadDiff) -> anyhow::Result<CoincidenceRow> {
    let (length, step) = (2.0, 0.002);
    let start = channel_point(map, 0, 0.0, 0.5)?;
    let phi = SemigroupElement::new(map, step)?;
    let steps = (length / step).round() as usize;
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(start);
    for _ in 0..steps {
        let z = phi.apply(*orbit.last().expect("non-empty"))?;
        orbit.push(z);
    }
    let tr = trace_trajectory(qd, start, &TraceOptions::new(TrajectoryKind::Trajectory, length))?;
    Ok(CoincidenceRow {
        start,
        length,
        orbit_points: orbit.len(),
        hausdorff: hausdorff_distance(&orbit, &tr.points),
    })
}

pub fn qd(s: &Scenario) -> anyhow::Result<Outcome> {
    let (dom, map) = prepare(s)?;
    let fp = map.locate_fixed_points();
    let alphas = dom.alphas().to_vec();
    let qd = fit(fp.denjoy_wolff, &fp.repulsive, &alphas)?;
    let hs = heights(&qd).map_err(|e| Coded(4, format!("heights: {e}")))?;
    let height_error = hs.iter().zip(&alphas).map(|(h, a)| (h - a).abs()).fold(0.0, f64::max);

    let t = s.times[0];
    let phi = SemigroupElement::new(&map, t)?;
    let grid = interior_grid(8, 16, 0.9);
    let ode = extremal_ode_residual(&qd, &phi, &grid, 1e-2)?;
    let mismatched = if dom.n() >= 2 {
        let shift = 0.25 * alphas.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut other = alphas.clone();
        other[0] += shift;
        other[dom.n() - 1] -= shift;
        let wrong = fit(fp.denjoy_wolff, &fp.repulsive, &other)?;
        let r = extremal_ode_residual(&wrong, &phi, &grid, 1e-2)?;
        Some(MismatchRow {
            alphas: other,
            max_residual: r.max_residual,
        })
    } else {
        None
    };

    let report = QdReport {
        denjoy_wolff: qd.denjoy_wolff().angle(),
        repulsive: qd.repulsive().iter().map(|x| x.angle()).collect(),
        zeros: zero_angles(&qd),
        constant: qd.constant(),
        residues: (0..dom.n()).map(|k| qd.residue(k)).collect(),
        residue_at_denjoy_wolff: qd.residue_at_denjoy_wolff(),
        warnings: qd.warnings().to_vec(),
        circle_residual: circle_trajectory_residual(&qd, 2000, 1e-2),
        circle_trace_deviation: circle_trace(&qd)?,
        heights: hs,
        height_error,
        closed_form: if dom.n() == 1 { Some(closed_form(&qd)?) } else { None },
        ode: OdeRow {
            t,
            max_residual: ode.max_residual,
            evaluated: ode.evaluated,
            skipped: ode.skipped.len(),
        },
        mismatched,
        coincidence: coincidence(&map, &qd)?,
        alphas,
    };
    write_json(&s.out.join("qd.json"), &report)?;
    write_text(&s.out.join("trajectories.svg"), &figure(&map, &qd)?)?;
    Ok(Outcome::Ok)
}

fn figure(map: &KoenigsMap, qd: &StarQuadDiff) -> anyhow::Result<String> {
    let frame = Frame {
        x0: -1.1,
        x1: 1.1,
        y0: -1.1,
        y1: 1.1,
        left: 20.0,
        top: 40.0,
        width: 560.0,
        height: 560.0,
    };
    let mut svg = Svg::new(600.0, 620.0);
    svg.text(20.0, 24.0, "Trajectories of the star quadratic differential");
    svg.polyline(&frame, &circle(Complex64::new(0.0, 0.0), 1.0, 720), "black", 1.5);
    let palette = ["#2471a3", "#229954", "#af601a", "#7d3c98", "#117a65", "#a93226"];
    for k in 0..map.domain().n() {
        for f in [0.2, 0.4, 0.6, 0.8] {
            let Ok(z0) = channel_point(map, k, 0.0, f) else { continue };
            for reverse in [false, true] {
                let opts = TraceOptions {
                    reverse,
                    ..TraceOptions::new(TrajectoryKind::Trajectory, 4.0)
                };
                if let Ok(tr) = trace_trajectory(qd, z0, &opts) {
                    svg.polyline(&frame, &tr.points, palette[k % palette.len()], 0.8);
                }
            }
        }
    }
    for arc in slit_arcs(qd, 3.0)? {
        svg.polyline(&frame, &arc.points, "black", 1.5);
    }
    svg.dot(&frame, qd.denjoy_wolff().value(), 4.0, "#c0392b");
    for x in qd.repulsive() {
        svg.dot(&frame, x.value(), 4.0, "#2471a3");
    }
    for b in qd.zeros() {
        svg.dot(&frame, b.value(), 4.0, "#229954");
    }
    Ok(svg.finish())
}
