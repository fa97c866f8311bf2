pub mod decoherence;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod wavepacket;

pub use decoherence::{
    check_regime, interference_pattern, max_flight_distance, w_total_intersecting, w_total_parallel, DecoherenceResult,
    Geometry, IntersectingGeometry, LengthUnit, ParallelGeometry, PhotonMode, PhysicalConstants, RegimeWarning,
    ValidityInput,
};
pub use error::{Error, Result};
pub use kernels::{Branch, JabForm, SegmentPairInput};
pub use quadrature::{integrate_1d, integrate_nd, pv_integrate_1d, Axis, IntegrationResult, QuadratureConfig};
pub use wavepacket::{characteristic_length, kappa, KappaResult, Shape, Wavepacket};
