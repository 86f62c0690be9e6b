//! Balanced binary codes and the multicolored independent set to discrete
//! k-Center reduction, with an exhaustive gap checker for small graphs.

mod code;
mod gadget;
mod graph;

pub use code::{build_code, CodeBook, CodeMode};
pub use gadget::{mcis_to_kcenter, verify_gap, Gadget, GadgetFacilities, GapReport};
pub use graph::{find_mcis, PartiteGraph};
