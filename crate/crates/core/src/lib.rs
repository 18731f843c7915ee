//! Weyl-Heisenberg and Clifford group structures, SIC fiducial search,
//! overlap and stabilizer analysis, Pell dimension towers and algebraic
//! recognition of overlap phases.
//!
//! Numeric code is generic over [`Real`]; the aliases below fix the common
//! precisions.

pub mod clifford;
pub mod error;
pub mod fiducial;
pub mod io;
pub mod linalg;
pub mod lll;
pub mod number_theory;
pub mod overlaps;
pub mod recognition;
pub mod scalar;
pub mod wh_group;

pub use error::{Result, SicError};
pub use scalar::{Mp, Mp1024, Mp128, Mp2048, Mp256, Mp4096, Mp512, Real};

pub use clifford::{clifford_unitary, covariance_error, projective_order};
pub use fiducial::{frame_potential, polish, search, sic_residual, zauner_eigenspace_basis, Fiducial, SearchConfig, SymmetryType};
pub use overlaps::{centre_fiducial, compute_overlaps, overlap_orbit_partition, stability_group, OverlapTable, StabilityReport};
pub use recognition::{
    certify_algebraic_integer, certify_unit, phase_relation_rank, recognize_algebraic, recognize_overlap_phases, MinimalPolynomial,
    RecognitionConfig,
};

pub use wh_group::{displacement, make_context, DimensionContext, DisplacementIndex, SymplecticMatrix, UnitaryOperator};

pub type Context64 = DimensionContext<f64>;
pub type Context256 = DimensionContext<Mp256>;
pub type Context512 = DimensionContext<Mp512>;
pub type Context1024 = DimensionContext<Mp1024>;

pub type Fiducial64 = Fiducial<f64>;
pub type Fiducial256 = Fiducial<Mp256>;
pub type Fiducial512 = Fiducial<Mp512>;
pub type Fiducial1024 = Fiducial<Mp1024>;

pub type OverlapTable64 = OverlapTable<f64>;
pub type OverlapTable512 = OverlapTable<Mp512>;

/// Default working precision in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 256;
