//! Multi-head two-way finite automata, safe/risky head analysis, and
//! constant-coin verifiers with exact error accounting.
//!
//! * [`automata`]: machines, the `.mhfa` format, configuration graphs.
//! * [`transforms`]: head projection, timer and counter heads, the halting wrapper.
//! * [`halting`]: deciding whether a one-head machine always halts.
//! * [`ips`]: verifier construction, certificates, outcome distributions, adversaries.
//! * [`ntmsim`]: multi-track tape simulation of linear-time machines.
//! * [`report`]: deterministic text rendering of results.

pub mod automata;
pub mod halting;
pub mod ips;
pub mod ntmsim;
pub mod report;
pub mod transforms;
