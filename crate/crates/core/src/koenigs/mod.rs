//! Slit-strip domains, their Koenigs functions and the semigroups
//! `φ_t = h^{-1}(h + t)`.

mod domain;
mod map;

pub use domain::{InvariantSetReport, InvariantStrip, SlitStripDomain};
pub use map::{
    build_koenigs_map, exact_multipliers, semigroup_apply, CertificateView, FixedPoints, KoenigsCertificate,
    KoenigsMap, Prevertex, PrevertexKind, ScRepresentation, SemigroupElement, SideResidual,
};
