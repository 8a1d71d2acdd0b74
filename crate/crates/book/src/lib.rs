//! The guide in `book/` is compiled into this crate's docs so that `cargo test`
//! runs every listing. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/tree-walks.md")]
pub mod tree_walks {}
#[doc = include_str!("../../../book/src/spectrum.md")]
pub mod spectrum {}
#[doc = include_str!("../../../book/src/cycles.md")]
pub mod cycles {}
#[doc = include_str!("../../../book/src/nullcycles.md")]
pub mod nullcycles {}
#[doc = include_str!("../../../book/src/fundamental-group.md")]
pub mod fundamental_group {}
#[doc = include_str!("../../../book/src/groups.md")]
pub mod groups {}
#[doc = include_str!("../../../book/src/local-limits.md")]
pub mod local_limits {}
#[doc = include_str!("../../../book/src/percolation.md")]
pub mod percolation {}
#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
