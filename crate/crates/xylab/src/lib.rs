//! Exact simulation of disordered quantum XY spin chains through their
//! free-fermion reduction.
//!
//! The chain on sites `[1, n]` is
//!
//! ```text
//! H = - sum_j mu_j [ (1+gamma_j) sx_j sx_{j+1} + (1-gamma_j) sy_j sy_{j+1} ]
//!     - sum_j nu_j sz_j
//! ```
//!
//! with coupling `mu_j`, anisotropy `gamma_j`, and transverse field `nu_j`,
//! any of which may be drawn i.i.d. from a bounded-support distribution.
//! After the Jordan-Wigner transformation the many-body problem reduces to
//! an effective one-particle Hamiltonian: the symmetric Jacobi matrix `A`
//! (n x n, isotropic case `gamma = 0`) or the block-tridiagonal matrix `M`
//! (2n x 2n, general case). Everything dynamical is then carried by 2n x 2n
//! correlation matrices `Gamma = <C C*>` of quasi-free states, which evolve
//! by conjugation with `exp(-2itM)`:
//!
//! * particle transport in the isotropic chain via
//!   `<N_S>_t = sum_{j in S} sum_k eta_k |(e^{2itA})_{jk}|^2`,
//! * bipartite entanglement entropy via `-tr Gamma_1 log Gamma_1` of the
//!   restriction of `Gamma` to a subinterval,
//! * the eigenfunction correlator `Q_{jk}` whose decay in `|j-k|` is the
//!   localization signature that bounds both of the above.
//!
//! The [`oracle`] module keeps an independent brute-force path in the full
//! `2^n` space (dense Hamiltonians, exact evolution, partial-trace entropy,
//! Wick/pfaffian checks) so that every free-fermion formula used here is
//! verified against it at small `n`. The [`ensemble`] module runs disorder
//! ensembles deterministically and assembles the transport / area-law
//! verdicts; [`cli`] exposes the whole pipeline as the `xylab` binary.
//!
//! Site indices are 1-based everywhere in the public API, matching the
//! convention `Lambda = [1, n]`; storage is 0-based internally. Time is
//! dimensionless (`hbar = 1`) and the factor 2 in `exp(+-2itM)` is kept
//! exactly as it arises from the quadratic form `H = C* M C`.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod spectral;

pub use dynamics::{DensityProfile, Propagator, TimeGrid};
pub use entanglement::{CorrelationMatrix, EntropySpectrum, OccupationPattern};
pub use error::{Result, XyError};
pub use model::{
    BlockMatrix, ChainParameters, DisorderSpec, Distribution, Flavor, Partition, SiteSet,
    Subinterval,
};
pub use spectral::{CorrelatorProfile, DecayFit, DecayModel, EigenSystem};

/// Complex scalar used throughout (f64 precision).
pub type C64 = num_complex::Complex64;
