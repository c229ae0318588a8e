//! Minimal deterministic SVG output.

use std::fmt::Write;

use num_complex::Complex64;

/// Axis-aligned view box in model coordinates, y up.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    /// Pixel offset and size of the panel.
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl Frame {
    pub fn map(&self, z: Complex64) -> (f64, f64) {
        let px = self.left + (z.re - self.x0) / (self.x1 - self.x0) * self.width;
        let py = self.top + (self.y1 - z.im) / (self.y1 - self.y0) * self.height;
        (px, py)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    /// Polyline split wherever it leaves the frame.
    pub fn polyline(&mut self, frame: &Frame, pts: &[Complex64], stroke: &str, width: f64) {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, body: &mut String| {
            if run.len() >= 2 {
                let coords: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    body,
                    r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
                    coords.join(" ")
                );
            }
            run.clear();
        };
        for z in pts {
            if z.re.is_finite() && z.im.is_finite() && frame.contains(*z) {
                run.push(frame.map(*z));
            } else {
                flush(&mut run, &mut self.body);
            }
        }
        flush(&mut run, &mut self.body);
    }

    pub fn dot(&mut self, frame: &Frame, z: Complex64, r: f64, fill: &str) {
        let (x, y) = frame.map(z);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn text(&mut self, x: f64, y: f64, s: &str) {
        let escaped = s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="12">{escaped}</text>"#
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

pub fn circle(center: Complex64, r: f64, n: usize) -> Vec<Complex64> {
    (0..=n)
        .map(|k| center + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipped_polyline() {
        let f = Frame {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
            left: 0.0,
            top: 0.0,
            width: 100.0,
            height: 100.0,
        };
        let mut s = Svg::new(100.0, 100.0);
        let pts = [
            Complex64::new(0.1, 0.1),
            Complex64::new(0.2, 0.2),
            Complex64::new(2.0, 0.2),
            Complex64::new(0.3, 0.3),
            Complex64::new(0.4, 0.4),
        ];
        s.polyline(&f, &pts, "black", 1.0);
        let out = s.finish();
        assert_eq!(out.matches("<polyline").count(), 2);
        assert!(out.contains("10.00,90.00"));
    }
}
