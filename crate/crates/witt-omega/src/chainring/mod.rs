//! Finite fields, Galois rings and linear algebra over them.

mod galois;
mod howell;
mod padic;

pub use galois::{is_prime, tau_bar, FieldSpec, GaloisRing, GaloisRingElem, GaloisRingElemJson, Gr, MAX_R};
pub use howell::{howell, smith_valuations, ChainMatrix, Span};
pub use padic::{
    big_c_const, c_const, carry_count, conductor, constants, is_p_adic_unit, multinomial, multinomial_mod, multinomial_val,
    reconstruct_teichmuller, ring_from_big, vp_u64,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no tabulated modulus for F_{p}^{r}")]
    UnsupportedField { p: u64, r: usize },
    #[error("the second field is not an extension of the first")]
    NotAnExtension,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}
