//! Multiplierless linear maps.
//!
//! A real matrix `T` is approximated as `B·W₁⋯W_L`, where the codebook `B` is
//! cheap to apply and every wiring matrix `W_ℓ` is sparse with entries in
//! `{0, ±2^e}`. Multiplying by the product then needs only shifts, sign flips
//! and additions. The crate fits such decompositions greedily, evaluates them
//! exactly, counts their operations and models their distortion.
//!
//! ```
//! use lincode::{decompose, engine, gaussian_build, self_design_build, Matrix64, StageSchedule};
//!
//! let t: Matrix64 = gaussian_build(4, 64, 1);
//! let codebook = self_design_build(&t, 1).unwrap();
//! let plan = decompose(&t, codebook, &StageSchedule::fixed(vec![1, 1])).unwrap();
//! let (y, cost) = engine::apply(&plan, &vec![1.0f64; 64]).unwrap();
//! assert_eq!(y.len(), 4);
//! assert_eq!(cost.additions, 4 * 64);
//! ```

pub mod analysis;
pub mod bench;
pub mod codebook;
pub mod engine;
pub mod error;
pub mod io;
pub mod matrix;
pub mod plan;
pub mod pot_arith;
pub mod rng;
pub mod scalar;
pub mod wiring;

pub use codebook::{gaussian_build, self_design_build, Codebook, CodebookKind, Entry, OpCount, Pow2Matrix};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use plan::{cost_of, distortion, reconstruct, threshold, CostReport, DecompositionPlan, DistortionReport, PlanMeta};
pub use pot_arith::{csd_decode, csd_encode, quantize_pow2, binary_encode, CsdForm, Dyadic, SignedPow2};
pub use scalar::{Real, ShiftAdd};
pub use wiring::{decompose, fit_column, fit_stage, StageSchedule};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type ExactMatrix = Matrix<Dyadic>;
