//! Linear `SL(2,R)` cocycles over subshifts of finite type.
//!
//! The crate covers the shift itself ([`symbolic`]), 2×2 matrices and cones
//! in the projective line ([`matrix`]), cocycle evaluation and products
//! ([`cocycle`]), Lyapunov exponents ([`lyapunov`]), uniform hyperbolicity
//! certificates and falsifiers ([`certify`]), stable and unstable holonomies
//! ([`holonomy`]), the periodic closing argument ([`transfer`]) and a
//! built-in non-uniformly hyperbolic example with a uniform exponent gap
//! ([`gallery`]). [`specfile`] and [`report`] hold the file formats.

pub mod certify;
pub mod cocycle;
pub mod error;
pub mod gallery;
pub mod holonomy;
pub mod lyapunov;
pub mod matrix;
pub mod report;
pub mod specfile;
pub mod symbolic;
pub mod transfer;

pub use certify::{cone_certify, norm_growth_probe, ConeCertificate, ConeOptions, UhStatus, UhVerdict, Witness};
pub use cocycle::{BunchingReport, CocycleKind, CocycleSpec, HolderEstimate, ProductResult};
pub use error::{Error, Result};
pub use gallery::CounterexampleParams;
pub use holonomy::{holonomy, HolonomyResult, Side};
pub use lyapunov::{gap_scan, periodic_exponent, ExponentReport, GapScanReport, Measure};
pub use matrix::{Mat2, ProjectiveArc};
pub use report::ReportDocument;
pub use specfile::{emit_spec, parse_spec};
pub use symbolic::{enumerate_periodic, PeriodicOrbit, Symbol, SymbolSequence, TransitionMatrix};
pub use transfer::{build_shadow, find_slow_point, transfer_bound, Shadow, TransferReport};
