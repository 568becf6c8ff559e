//! Truncated Fock-space operator algebra over tensor products of bosonic
//! modes and a three-level atom.

pub mod observables;
pub mod operator;
pub mod space;
pub mod state;

pub type C64 = num_complex::Complex64;

pub use observables::{
    expectation, quadrature_extrema, quadrature_moments, quadrature_variance, QuadratureExtrema,
    QuadratureMoments,
};
pub use operator::{
    atomic_projector, hermitian_function, ladder, number, Ladder, Level, MatrixFunction,
    OperatorMatrix, Spectral, HERMITIAN_INPUT_TOL,
};
pub use space::{Factor, SpaceSignature};
pub use state::{
    coherent_state, coherent_top_population, poisson_weight, top_band, StateVector,
    TruncationWarning, TRUNCATION_POPULATION_LIMIT,
};
