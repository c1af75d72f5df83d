//! Bicombings on coned-off spaces and trees of spaces.
//!
//! The crate builds finite truncations of the spaces involved (metric graphs,
//! Cayley graphs, coned-off graphs, trees of spaces glued from spikes) and
//! measures the coarse convexity constants of bicombings on them exactly.

pub mod certify;
pub mod combing;
pub mod coned;
pub mod graph;
pub mod group;
pub mod par;
pub mod rational;
pub mod scenario;
pub mod tree;
pub mod unionfind;

pub use rational::{q, qi, Q};
