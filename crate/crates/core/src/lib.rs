//! Transfer operators of a family of analytic expanding circle maps
//! `τ(z) = z(λ − z)/(1 − λ̄z)` and of the interval maps they induce:
//! Fourier-basis matrices, Chebyshev collocation, spectra and the exact
//! spectra they are checked against.

// NaN must fail the tolerance checks, hence `!(x <= tol)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod cjson;
pub mod dd;
pub mod error;
pub mod figures;
pub mod fourier;
pub mod interval;
pub mod inverse;
pub mod linalg;
pub mod qd;
pub mod scalar;
pub mod spectral;

pub use blaschke::{AnnulusBounds, BlaschkeParam, BranchPair};
pub use dd::DoubleDouble;
pub use error::{Result, SpectreError};
pub use figures::{MapGraph, SweepRow};
pub use fourier::{AssemblyMethod, QuadratureSpec, SignConvention, StructureReport, TransferMatrix, TrigPoly};
pub use interval::{
    DualFunctionalReport, IntervalDiscretization, IntervalMapContext, IntervalSpectrumReport,
    MatchingReport, MayerSummary,
};
pub use inverse::{FunctionalEquationReport, InverseProblemSuite};
pub use qd::QuadDouble;
pub use spectral::{EigenFunction, Family, PredictedEigenvalue, SpectrumPrediction, SpectrumReport};
