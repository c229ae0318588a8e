use std::f64::consts::{PI, TAU};

use angulus::koenigs::{KoenigsMap, PrevertexKind};
use angulus::Complex64;

use super::{estimate_all, prepare};
use crate::output::{num, write_csv, write_json, write_text};
use crate::scenario::Scenario;
use crate::svg::{circle, Frame, Svg};
use crate::Outcome;

const FIXED_POINT_HEADER: [&str; 8] = [
    "t",
    "kind",
    "index",
    "angle",
    "exact_multiplier",
    "estimated_multiplier",
    "estimate_error",
    "relative_deviation",
];

pub fn semigroup(s: &Scenario) -> anyhow::Result<Outcome> {
    let (dom, map) = prepare(s)?;
    let cert = map.certificate();
    eprintln!(
        "certificate: max side residual {:.3e}, normalization {:.3e}",
        cert.max_residual, cert.normalization_residual
    );
    write_json(&s.out.join("certificate.json"), &map.certificate_view())?;

    let mut rows = Vec::new();
    for &t in &s.times {
        let exact = map.exact_multipliers(t)?;
        let exact_values: Vec<f64> = std::iter::once(exact.denjoy_wolff().multiplier())
            .chain(exact.repulsive().iter().map(|r| r.multiplier()))
            .collect();
        for (i, ((p, est), m)) in estimate_all(&map, t)?.into_iter().zip(exact_values).enumerate() {
            let (kind, index) = if i == 0 { ("denjoy_wolff", 0) } else { ("repulsive", i) };
            rows.push(vec![
                format!("{t}"),
                kind.to_string(),
                index.to_string(),
                num(p.angle()),
                num(m),
                num(est.multiplier),
                format!("{:.3e}", est.error),
                format!("{:.3e}", (est.multiplier - m).abs() / m),
            ]);
        }
    }
    write_csv(&s.out.join("fixed_points.csv"), &FIXED_POINT_HEADER, rows)?;

    if dom.n() == 1 {
        write_closed_form(s, &map)?;
    }
    write_text(&s.out.join("domain.svg"), &domain_figure(&map))?;
    Ok(Outcome::Ok)
}

/// `h` against `(1/π)[Log(1 + z conj a) - Log(1 - z conj a)]`.
fn write_closed_form(s: &Scenario, map: &KoenigsMap) -> anyhow::Result<()> {
    let a = map.locate_fixed_points().denjoy_wolff.value();
    let mut rows = Vec::new();
    for j in 0..20 {
        let z = Complex64::from_polar(0.05 + 0.045 * j as f64, 0.7 * j as f64);
        let h = map.eval_h(z)?;
        let one = Complex64::new(1.0, 0.0);
        let closed = ((one + z * a.conj()).ln() - (one - z * a.conj()).ln()) / PI;
        rows.push(vec![
            num(z.re),
            num(z.im),
            num(h.re),
            num(h.im),
            num(closed.re),
            num(closed.im),
            format!("{:.3e}", (h - closed).norm()),
        ]);
    }
    write_csv(
        &s.out.join("closed_form.csv"),
        &["re", "im", "h_re", "h_im", "closed_re", "closed_im", "abs_error"],
        rows,
    )
}

fn domain_figure(map: &KoenigsMap) -> String {
    let dom = map.domain();
    let levels = dom.levels();
    let left = dom.gammas().iter().cloned().fold(0.0, f64::min) - 2.0;
    let strip = Frame {
        x0: left,
        x1: 3.0,
        y0: -0.6,
        y1: 0.6,
        left: 20.0,
        top: 40.0,
        width: 560.0,
        height: 560.0 * 1.2 / (3.0 - left),
    };
    let disk = Frame {
        x0: -1.1,
        x1: 1.1,
        y0: -1.1,
        y1: 1.1,
        left: 620.0,
        top: 40.0,
        width: 300.0,
        height: 300.0,
    };
    let mut svg = Svg::new(940.0, 40.0 + strip.height.max(disk.height) + 20.0);
    svg.text(20.0, 24.0, "Koenigs domain with the image of a polar grid");
    svg.text(620.0, 24.0, "Prevertices on the unit circle");

    let (lo, hi) = (Complex64::new(left, 0.0), Complex64::new(3.0, 0.0));
    for y in [-0.5, 0.5] {
        let off = Complex64::new(0.0, y);
        svg.polyline(&strip, &[lo + off, hi + off], "black", 2.0);
    }
    for (k, tip) in dom.slit_tips().iter().enumerate() {
        let start = Complex64::new(left, levels[k + 1]);
        svg.polyline(&strip, &[start, *tip], "black", 2.0);
    }

    let grey = "#7a7a7a";
    for i in 1..=9 {
        let r = 0.1 * i as f64 + if i == 9 { 0.05 } else { 0.0 };
        let ring: Vec<Complex64> = (0..=720)
            .map(|j| map.eval_h(Complex64::from_polar(r, TAU * j as f64 / 720.0)).unwrap_or(Complex64::new(f64::NAN, 0.0)))
            .collect();
        svg.polyline(&strip, &ring, grey, 0.6);
    }
    for j in 0..24 {
        let theta = TAU * j as f64 / 24.0;
        let spoke: Vec<Complex64> = (0..=400)
            .map(|i| {
                let r = 0.999 * i as f64 / 400.0;
                map.eval_h(Complex64::from_polar(r, theta)).unwrap_or(Complex64::new(f64::NAN, 0.0))
            })
            .collect();
        svg.polyline(&strip, &spoke, grey, 0.6);
    }

    svg.polyline(&disk, &circle(Complex64::new(0.0, 0.0), 1.0, 360), "black", 1.5);
    for p in &map.sc_representation().prevertices {
        let colour = match p.kind {
            PrevertexKind::DenjoyWolff => "#c0392b",
            PrevertexKind::ChannelEnd(_) => "#2471a3",
            PrevertexKind::SlitTip(_) => "#229954",
        };
        svg.dot(&disk, p.point.value(), 4.0, colour);
    }
    svg.finish()
}
