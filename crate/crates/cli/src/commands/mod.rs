mod moduli;
mod qd;
mod semigroup;
mod verify;

pub use moduli::moduli;
pub use qd::qd;
pub use semigroup::semigroup;
pub use verify::verify;

use angulus::angular::{radial_angular_derivative, AngularDerivative};
use angulus::geometry::BoundaryPoint;
use angulus::koenigs::{build_koenigs_map, KoenigsMap, SemigroupElement, SlitStripDomain};
use angulus::Complex64;

use crate::scenario::{ensure_out, Scenario};

/// Domain, output directory and map for commands that need all three.
fn prepare(s: &Scenario) -> anyhow::Result<(&SlitStripDomain, KoenigsMap)> {
    let dom = s
        .domain
        .as_ref()
        .ok_or_else(|| anyhow::Error::new(crate::scenario::UsageError("a domain is required".into())))?;
    ensure_out(&s.out)?;
    let map = build_koenigs_map(dom, s.tolerance)?;
    Ok((dom, map))
}

/// Radial estimates at the Denjoy-Wolff point followed by the repulsive points.
fn estimate_all(map: &KoenigsMap, t: f64) -> anyhow::Result<Vec<(BoundaryPoint, AngularDerivative)>> {
    let phi = SemigroupElement::new(map, t)?;
    let fp = map.locate_fixed_points();
    std::iter::once(fp.denjoy_wolff)
        .chain(fp.repulsive)
        .map(|p| Ok((p, radial_angular_derivative(&phi, p)?)))
        .collect()
}

/// `h^{-1}(x + i y)` at the middle of channel `k`.
fn channel_point(map: &KoenigsMap, k: usize, x: f64, fraction: f64) -> angulus::Result<Complex64> {
    let dom = map.domain();
    let y = dom.levels()[k] + fraction * dom.alphas()[k];
    map.eval_h_inverse(Complex64::new(x, y))
}
