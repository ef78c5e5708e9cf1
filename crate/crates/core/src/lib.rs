//! Numerical laboratory for ensembles of identical two-level atoms that are
//! collectively coupled to narrow-band light.
//!
//! The crate is organised bottom-up:
//!
//! - [`symmetric`]: normalized Dicke kets, collective ladder operators,
//!   product-basis expansion and reduced states of W-state particle groups.
//! - [`density`]: multipartite density matrices with partial trace, partial
//!   transpose, Hermitian spectra, PPT verdicts and von Neumann entropy.
//! - [`field`]: photon-statistics models, their moments of `B = g a`, and
//!   truncated Fock representations.
//! - [`perturbative`]: second-order closed forms for the reduced atomic state,
//!   dipole covariance and the squeezed-light partial-transpose spectrum.
//! - [`oracle`]: brute-force master-equation integration on the full
//!   atoms-times-field space, used as ground truth for the closed forms.
//! - [`exact`]: decay-free rotations (single-photon exchange, mode mixing,
//!   memory swap) and spatial-phase arrays.
//! - [`schemes`]: beamsplitter networks, heralded ensemble states and their
//!   hierarchical composition.
//!
//! All rates are expressed in units of the transverse rate, i.e. time is the
//! dimensionless `tau = gamma_perp * t`.

pub mod density;
pub mod error;
pub mod exact;
pub mod field;
pub mod oracle;
pub mod perturbative;
pub mod schemes;
pub mod symmetric;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Maximum number of two-level sites expanded into an explicit product basis.
pub const PRODUCT_CAP: usize = 16;
