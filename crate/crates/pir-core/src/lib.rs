//! Two-server private information retrieval, the locally decodable codes it
//! induces, and exact simulations of the quantum decoders that govern their
//! lower bounds.
//!
//! The crate has four layers:
//!
//! - [`bits`] and [`scheme`]: bit-string plumbing, the square and cube PIR
//!   schemes, an exact privacy auditor.
//! - [`code`]: the scheme-to-code construction, smoothness profiling, and
//!   corruption/decoding trials.
//! - [`linalg`], [`superposed`], [`qsc`]: real-amplitude linear algebra and
//!   exact simulations of the superposed-input decoder, its trace-norm
//!   optimality bound, and the random-access-code sieve.
//! - [`bounds`]: closed-form evaluators for the length and communication
//!   lower bounds, with all intermediates exposed.
//!
//! Everything is `no_std` (with `alloc`); IO, networking, and the CLI live
//! in the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bits;
pub mod bounds;
pub mod code;
pub mod error;
pub mod linalg;
pub mod qsc;
pub mod scheme;
pub mod superposed;

pub use bits::{
    inner_product_mod2, restrict, Arrangement, BitString, Coords, Database, SubsetMask,
};
pub use code::{
    corrupt, local_decode_trial, pir_to_code, smoothness_profile, Code, CodeKind, CorruptModel,
    DecoderArm, DecoderSpec, SmoothnessReport,
};
pub use error::{Error, Result};
pub use linalg::{
    complete_to_unitary, jacobi_eigen, measure_probability, povm_outcome_probs, psd_factor,
    trace_norm, Matrix, StateVector,
};
pub use qsc::{
    quantum_decode, rac_multi_copy, rac_sieve, rac_state, QuantumDecodeReport, RacState,
    SieveReport,
};
pub use scheme::{
    audit_privacy, run_protocol, PirParams, Scheme, SchemeKind, Transcript, Tvd,
    DEFAULT_AUDIT_CAP_BITS,
};
pub use superposed::{
    build_decoding_unitary, gram_matrix, parity_distinguishability, superposed_success_prob,
    BooleanFunction, DecodingUnitary,
};
