//! Welded links up to self-virtualization.
//!
//! Gauss diagrams and the welded move calculus, sorted normal forms,
//! Wirtinger presentations and peripheral systems, the reduced Magnus
//! expansion with Milnor invariant tables, and certificates of equivalence
//! between reduced peripheral systems.

pub mod braid;
pub mod cli;
pub mod coeff;
pub mod diagram;
pub mod equivalence;
pub mod fixtures;
pub mod group;
pub mod magnus;
pub mod milnor;
pub mod moves;
pub mod parse;
pub mod random;
pub mod snf;
pub mod sort;
pub mod word;

pub use braid::{from_braid_closure, BraidWord};
pub use diagram::{Arrow, End, EndpointRef, GaussDiagram, Sign};
pub use equivalence::{refute, search_certificate, sv_equivalent, verify_certificate, Bounds, Certificate, LongitudeSystem, Step, Verdict};
pub use group::{build_sorted_from_longitudes, peripheral_system, reduced_presentation, sorted_longitudes, wirtinger, GroupPresentation, PeripheralSystem};
pub use magnus::{expand, rf_equal, Monomial, ReducedPoly};
pub use milnor::{milnor_table, milnor_table_sorted, tables_equal, MilnorEntry, MilnorTable, ResidueMode};
pub use moves::{apply_move, apply_slide, apply_tah, enumerate_moves, verify_trace, Crossing, MoveInstance, MoveKind, MoveTrace, SlideSite};
pub use sort::{sort_diagram, Sorted};
pub use parse::{parse_gauss_code, serialize_gauss_code, ParseError};
pub use word::{free_reduce, Letter, Word};
