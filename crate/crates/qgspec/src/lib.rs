//! Spectra of periodic quantum graphs (kagome and triangular lattices) with a
//! circulant, preferred-orientation vertex coupling.
//!
//! The band condition reduces to comparing three scalar kernels at the three extremal
//! quasimomenta; [`band_engine`] scans it, [`secular_oracle`] checks it against the full
//! secular determinant.

pub mod asymptotics;
pub mod band_engine;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod roots;
pub mod scalar;
pub mod secular_oracle;
pub mod spectral_kernels;
pub mod spectral_probability;
pub mod vertex_coupling;

pub use band_engine::{
    bands_csv, classify, detect_gap_closings, flat_bands, in_band, negative_flat_bands, scan_bands,
    scan_negative_bands, BandStructure, BandType, FlatBand, FlatFamily, GapClosing, Membership,
    SpectralInterval,
};
pub use error::{Error, Result};
pub use lattice::{LatticeKind, LatticeSpec, Quasimomentum, Side};
pub use scalar::Real;
pub use spectral_kernels::{kernels, Extremum, KernelTriple};
pub use spectral_probability::{ProbabilityEstimate, ProbabilityMethod};
pub use vertex_coupling::{build_circulant_u, scattering_matrix, CirculantU, ScatteringMatrix};

pub type Spec = LatticeSpec<f64>;
pub type Bands = BandStructure<f64>;
pub type Interval = SpectralInterval<f64>;
