//! Ultrametric wavelet analysis on trees, at finite resolution.
//!
//! A directed tree with branching indices `p_I ≥ 2` carries an ultrametric on
//! its leaf space and an exact rational measure in which every ball's measure
//! equals its diameter. On that space this crate provides:
//!
//! - [`tree`]: tree construction from branching specs, digit addressing, the
//!   partial order toward infinity, and the merge vertex of two points;
//! - [`metric`]: the ultrametric distance (all three root placements),
//!   ball measures and membership, exact in rational arithmetic;
//! - [`wavelet`]: the orthonormal wavelet basis indexed by (vertex,
//!   frequency), fast `O(Σ p_I²)` forward/inverse transforms, and a dense
//!   Gram-matrix verification path;
//! - [`operator`]: radial kernels `T⁽ᴵ⁾` and the pseudodifferential operator
//!   they generate, applied either by direct quadrature or spectrally through
//!   its per-vertex eigenvalues, computed by two independent formulas;
//! - [`changevar`]: the measure-preserving map `ρ` onto `[0, μ(D_top)]` and
//!   the export of wavelets as stepwise functions on the half-line with
//!   exact rational breakpoints;
//! - [`io`]: deterministic CSV formats for every artifact;
//! - [`selftest`]: seeded invariant suites behind the CLI release gate.

pub mod changevar;
pub mod error;
pub mod io;
pub mod metric;
pub mod operator;
pub mod selftest;
pub mod tree;
pub mod wavelet;

pub use error::{Error, Result};
pub use metric::Ball;
pub use operator::{make_kernel, KernelKind, RadialKernel, Spectrum};
pub use tree::{
    rational_to_f64, BranchingSpec, ExplicitNode, TreeAddress, TreeHandle, UltrametricTree,
};
pub use wavelet::{GridFunction, WaveletCoefficients, WaveletIndex};

pub use num_complex::Complex64;
pub use num_rational::BigRational;
