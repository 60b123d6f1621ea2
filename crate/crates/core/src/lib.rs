//! Finite-field models of Bohr recurrence: subgroups of `F_p^n`, set
//! operations on vectors, deficiency levels, Cayley-graph and hypergraph
//! colorings, concrete families, and experiment drivers.

pub mod bohr;
pub mod colorings;
pub mod error;
pub mod experiments;
pub mod families;
pub mod fpgroup;
pub mod io;
pub mod setops;

pub use bohr::{bohr_deficiency, DeficiencyReport, Outcome};
pub use colorings::{
    build_cayley, chromatic_number_bounded, chromatic_number_exact, components_classify,
    hypergraph_chromatic, verify, BoundedChromatic, Chromatic, Graph, Hypergraph, Verdict,
};
pub use error::{Error, Result};
pub use fpgroup::{DualVec, FpMatrix, FpVec, Subgroup};
pub use setops::VecSet;
