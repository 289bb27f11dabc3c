//! Memory-efficient quantum circuit emulation.
//!
//! The crate simulates gate-model quantum circuits through sparse linear
//! algebra in coordinate (COO) format. Consecutive gates are fused into
//! groups with at most one parameterized gate each, and every group operator
//! is kept factored as a Kronecker product of a high-qubit part and a
//! low-qubit part instead of being expanded to its full `2^n x 2^n` form.
//! The high part is constrained to one non-zero per row, so state evolution
//! reduces to a scaled block-wise sparse mat-vec that a pool of processing
//! elements can execute in parallel with bit-reproducible results.
//!
//! Two scalar types run through the same kernels: `f64` complex numbers and
//! a Q2.30 fixed-point complex type that mirrors a 32-bit accelerator
//! datapath (saturating, round-to-nearest).
//!
//! Alongside the simulator, [`cost`] provides closed-form models for the
//! memory footprint of the factored storage scheme and for the cycle count
//! and FPGA resource usage of a processing-element-array accelerator built
//! around it.
//!
//! # Example
//!
//! ```
//! use emms_core::{build_qft, fusion::PEConfig, run_circuit};
//! use num_complex::Complex64;
//!
//! let circuit = build_qft(3).unwrap();
//! let state = run_circuit::<Complex64>(&circuit, &PEConfig::default()).unwrap();
//! for amp in state.amps() {
//!     assert!((amp.re - 1.0 / 8f64.sqrt()).abs() < 1e-12);
//! }
//! ```
//!
//! Module map:
//!
//! - [`fixedpoint`]: Q2.30 real and complex arithmetic.
//! - [`scalar`]: the scalar-mode abstraction shared by all kernels.
//! - [`coo`]: COO matrices, tensor product, operator-state multiplication.
//! - [`gates`]: the supported gate set as COO matrices.
//! - [`circuit`]: circuit text format, parser, and builders (QFT, GHZ, random).
//! - [`fusion`]: gate fusion, operator partitioning, block-wise evolution.
//! - [`oracle`]: naive dense reference simulator used as ground truth.
//! - [`cost`]: memory / cycle / resource models and parameter sweeps.

pub mod circuit;
pub mod coo;
pub mod cost;
pub mod fixedpoint;
pub mod fusion;
pub mod gates;
pub mod oracle;
pub mod scalar;

pub use circuit::{build_ghz, build_qft, build_random, parse_circuit, Circuit, CircuitFile};
pub use coo::{CooMatrix, CooTuple, StateVector};
pub use fixedpoint::{FixedComplex, Q2_30};
pub use fusion::{evolve_group, fuse, partition, run_circuit, FusedGroup, PEConfig, Partition};
pub use gates::{gate_matrix, is_sparse, GateKind, GateSpec};
pub use scalar::{Scalar, ScalarMode};
