use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::angular::SelfMapEvaluator;
use crate::error::{invalid, Result};
use crate::geometry::{BoundaryPoint, MobiusMap};
use crate::koenigs::KoenigsMap;

/// Univalent map from the strip `S = {0 < Im w < 1}` onto a digon, with
/// `Re w -> +inf` going to the first vertex and `Re w -> -inf` to the second.
pub trait DigonChart {
    /// Image of `w`, plus an opaque state that speeds up the evaluation of
    /// nearby points when passed back as `state`.
    fn eval_tracked(&self, w: Complex64, state: Option<Complex64>) -> Result<(Complex64, Complex64)>;

    fn eval(&self, w: Complex64) -> Result<Complex64> {
        Ok(self.eval_tracked(w, None)?.0)
    }

    /// Membership test for the digon, when cheaply available.
    fn contains(&self, _z: Complex64) -> Option<bool> {
        None
    }
}

impl<T: DigonChart + ?Sized> DigonChart for Arc<T> {
    fn eval_tracked(&self, w: Complex64, state: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        (**self).eval_tracked(w, state)
    }

    fn contains(&self, z: Complex64) -> Option<bool> {
        (**self).contains(z)
    }
}

/// The disk as a digon: `w -> T(tanh(pi (w - i/2) / 2))` for an automorphism `T`.
#[derive(Debug, Clone, Copy)]
pub struct DiskChart {
    mobius: MobiusMap,
}

impl DiskChart {
    /// Vertices `a` (at `+inf`) and `b` (at `-inf`).
    pub fn new(a: BoundaryPoint, b: BoundaryPoint) -> Result<Self> {
        Ok(Self {
            mobius: MobiusMap::sending_pair(a, b)?,
        })
    }

    /// Vertices `T(1)` and `T(-1)`.
    pub fn from_mobius(mobius: MobiusMap) -> Result<Self> {
        if !mobius.is_automorphism() {
            return Err(invalid("disk chart needs a disk automorphism"));
        }
        Ok(Self { mobius })
    }

    pub fn mobius(&self) -> &MobiusMap {
        &self.mobius
    }

    pub fn vertices(&self) -> Result<(BoundaryPoint, BoundaryPoint)> {
        Ok((
            BoundaryPoint::from_complex(self.mobius.apply(Complex64::new(1.0, 0.0))?)?,
            BoundaryPoint::from_complex(self.mobius.apply(Complex64::new(-1.0, 0.0))?)?,
        ))
    }
}

impl DigonChart for DiskChart {
    fn eval_tracked(&self, w: Complex64, _state: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        let z = self.mobius.apply((PI / 2.0 * (w - Complex64::new(0.0, 0.5))).tanh())?;
        Ok((z, z))
    }

    fn contains(&self, z: Complex64) -> Option<bool> {
        Some(z.norm() < 1.0)
    }
}

/// `w -> inner(width w + i offset)`: the sub-digon of `inner` over the
/// horizontal substrip `offset < Im w < offset + width`.
pub struct SubstripChart<C> {
    inner: C,
    width: f64,
    offset: f64,
}

impl<C: DigonChart> SubstripChart<C> {
    pub fn new(inner: C, width: f64, offset: f64) -> Result<Self> {
        if !(width > 0.0 && offset >= 0.0 && offset + width <= 1.0) {
            return Err(invalid("substrip must lie inside the unit strip"));
        }
        Ok(Self { inner, width, offset })
    }
}

impl<C: DigonChart> DigonChart for SubstripChart<C> {
    fn eval_tracked(&self, w: Complex64, state: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        self.inner
            .eval_tracked(w * self.width + Complex64::new(0.0, self.offset), state)
    }
}

/// Channel digon `h^{-1}(alpha_k w + i y_{k-1})` of a Koenigs map.
pub struct StarChart<'a> {
    map: &'a KoenigsMap,
    alpha: f64,
    lower: f64,
}

impl<'a> StarChart<'a> {
    /// Chart of channel `k` (zero based).
    pub fn new(map: &'a KoenigsMap, k: usize) -> Result<Self> {
        let domain = map.domain();
        if k >= domain.n() {
            return Err(invalid(format!("channel {k} out of range")));
        }
        Ok(Self {
            map,
            alpha: domain.alphas()[k],
            lower: domain.levels()[k],
        })
    }
}

impl DigonChart for StarChart<'_> {
    fn eval_tracked(&self, w: Complex64, state: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        let target = w * self.alpha + Complex64::new(0.0, self.lower);
        let z = match state {
            Some(hint) => self.map.eval_h_inverse_near(target, hint)?,
            None => self.map.eval_h_inverse(target)?,
        };
        Ok((z, z))
    }

    fn contains(&self, z: Complex64) -> Option<bool> {
        if !(z.norm() < 1.0) {
            return Some(false);
        }
        let y = self.map.eval_h(z).ok()?.im;
        Some(y > self.lower && y < self.lower + self.alpha)
    }
}

/// `outer ∘ inner` for a self-map `outer` of the disk.
pub struct ComposedChart<'a> {
    outer: &'a dyn SelfMapEvaluator,
    inner: Arc<dyn DigonChart + 'a>,
}

impl<'a> ComposedChart<'a> {
    pub fn new(outer: &'a dyn SelfMapEvaluator, inner: Arc<dyn DigonChart + 'a>) -> Self {
        Self { outer, inner }
    }
}

impl DigonChart for ComposedChart<'_> {
    fn eval_tracked(&self, w: Complex64, state: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        let (z, inner_state) = self.inner.eval_tracked(w, state)?;
        Ok((self.outer.eval(z)?, inner_state))
    }
}
