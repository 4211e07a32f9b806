//! Power-of-two and signed-digit scalar arithmetic.

mod csd;
mod dyadic;
mod pow2;

pub use csd::{binary_empirical_mse, binary_encode, csd_decode, csd_empirical_mse, csd_encode, CsdForm};
pub use dyadic::Dyadic;
pub use pow2::{quantize_pow2, quantize_pow2_in, Pow2Range, Quantized, SignedPow2};
