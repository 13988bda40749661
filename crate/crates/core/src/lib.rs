//! Band structure of a one-dimensional atomic chain, computed along two
//! independent routes.
//!
//! The analytic route ([`lti`]) treats the chain as a linear
//! translation-invariant system: a cell is a train of unit spikes on lattice
//! sites, nearest-neighbor coupling is a three-tap symmetric impulse-response
//! kernel, and the band energies of an `m`-site cell are `m` closed-form
//! cosine branches. No matrix work happens at any k-point.
//!
//! The conventional route ([`tb`]) assembles the dense Hermitian supercell
//! Hamiltonian at every k-point and diagonalizes it with a Jacobi
//! eigensolver. It is slower by construction and serves as the oracle:
//! [`verify`] checks that both routes produce the same spectra to solver
//! precision and traces every folded branch back to the primitive band, while
//! [`bench`] measures the cost gap between the two sweeps.
//!
//! Units: energies in eV, k in radians per lattice unit, site positions in
//! integer multiples of the lattice constant `a`.

use thiserror::Error;

pub mod bench;
pub mod lattice;
pub mod lti;
pub mod tb;
pub mod verify;

pub use lattice::{
    canonical_cell, make_kgrid, nn_kernel, BandStructure, BranchEnergy, BranchLabel, Engine,
    ImpulseResponse, KGrid, KPointEnergies, LatticeParams, Spike, SpikeTrain,
};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal consistency: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// How a k-point sweep schedules its per-point work. Every k-point is
/// independent, so `Parallel` farms them out to the rayon pool; results are
/// assembled in grid order either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is disabled.
    Parallel,
}

#[cfg(feature = "parallel")]
pub(crate) fn map_kpoints<T, F>(points: &[f64], mode: SweepMode, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    match mode {
        SweepMode::Sequential => points.iter().map(|&k| f(k)).collect(),
        SweepMode::Parallel => points.par_iter().map(|&k| f(k)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_kpoints<T, F>(points: &[f64], _mode: SweepMode, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    points.iter().map(|&k| f(k)).collect()
}
