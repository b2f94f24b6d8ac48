//! Global routing of on-chip nets onto shared photonic WDM waveguide trunks.
//!
//! The pipeline turns an electrical netlist plus a thermal map into a set of
//! placed waveguide trunks and a wavelength-channel assignment that minimizes
//! total laser power:
//!
//! 1. [`preprocess`] clusters each net's pins so that only segments longer
//!    than the electro-optic break-even length go optical,
//! 2. [`placement`] lays horizontal/vertical trunks through the cluster
//!    medians and computes per-(link, trunk) access geometry,
//! 3. [`cat`] assigns links greedily; [`glow`] solves the same problem
//!    exactly as a bounded integer linear program ([`ilp`]),
//! 4. [`postroute`] spaces ring converters to a manufacturable pitch,
//! 5. [`power`] prices the result and [`ingest`] reads/writes all file
//!    formats.
//!
//! [`check`] re-derives every routing constraint from raw geometry and is
//! kept independent of the routing code paths on purpose.

pub mod cat;
pub mod check;
pub mod gen;
pub mod geom;
pub mod glow;
pub mod ilp;
pub mod ingest;
pub mod oil;
pub mod par;
pub mod pipeline;
pub mod placement;
pub mod postroute;
pub mod power;
pub mod preprocess;
