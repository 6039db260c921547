//! Squeezed resolutions, loop-space homology and Tate constructions for
//! finite groups over prime fields.
//!
//! The crate is layered: [`gfmat`] does exact linear algebra over 𝔽_p,
//! [`permgrp`] enumerates permutation groups, [`kgmod`] handles modules over
//! the group algebra, [`squeeze`] builds the squeezed resolutions and Tate
//! complexes, and [`gradedlc`] computes local cohomology of graded modules.
//!
//! ```
//! use std::sync::Arc;
//! use squeeze_core::{permgrp::named, squeeze, GroupAlgebra, Window};
//!
//! let alg = GroupAlgebra::new(Arc::new(named::symmetric3()), 3, 0).unwrap();
//! let trace = squeeze::left_squeezed_resolution(&alg, &alg.trivial(), 5).unwrap();
//! let h = squeeze::squeezed_homology(&trace, Window::new(0, 4).unwrap()).unwrap();
//! assert_eq!(h.dims, vec![1, 0, 1, 1, 1]);
//! ```

pub mod exec;
pub mod gfmat;
pub mod gradedlc;
pub mod kgmod;
pub mod permgrp;
pub mod squeeze;

pub use exec::Exec;
pub use gfmat::{FpMatrix, FpScalar, GfError};
pub use gradedlc::{GradedBettiTable, GradedError, GradedModule};
pub use kgmod::{GroupAlgebra, KgModule, ModuleError, ModuleMap};
pub use permgrp::{Group, GroupError, GroupSpec, Perm};
pub use squeeze::{BettiTable, ChainComplex, SqueezeError, Window};
