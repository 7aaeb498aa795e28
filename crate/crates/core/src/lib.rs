//! Q1 finite elements for algebraically nonlinear, strain-limiting
//! elasticity, with an edge-crack compression benchmark.
//!
//! The crate is organized bottom-up:
//!
//! - [`tensor2d`]: symmetric 2×2 tensors and the elasticity/compliance operators
//! - [`constitutive`]: the strain-limiting response Ψ, σ(ε), F(σ) and W(ε)
//! - [`mesh`]: structured unit-square meshes with a duplicated-node crack seam
//! - [`assembly`]: element kernels, constraints and global assembly
//! - [`solver`]: linear warm start and Picard iteration
//! - [`postprocess`]: quadrature-point fields, tip probes and trend tables
//! - [`config`], [`output`], [`driver`]: run configuration, file writers and orchestration

// `!(x > 0.0)` is used on purpose to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod config;
pub mod constitutive;
pub mod driver;
pub mod error;
pub mod mesh;
pub mod output;
pub mod postprocess;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod tensor2d;

pub use assembly::{apply_benchmark_bcs, assemble, residual_norm, Assembler, DofMap};
pub use config::{parse_config, Fiber, RunConfig};
pub use constitutive::{energy_density, psi_of_s, strain_of_stress, stress_of_strain, ModelParams};
pub use error::{Error, Result};
pub use mesh::{build_cracked_square, build_uncracked_square, CrackMesh, Marker};
pub use postprocess::{extract_tip_probe, recover_fields, trend_table, FieldSample, TipProbe};
pub use solver::{solve_linear, solve_picard, PicardSolver, SolveReport, SolverConfig};
pub use tensor2d::{ElasticOperator, SymTensor2};
