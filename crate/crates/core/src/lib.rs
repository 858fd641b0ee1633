//! Exact computations with valuations on finite posets.
//!
//! Posets carry their Scott (upper set) topology. Valuations, capacities and
//! the weak topology on valuations are handled with exact rationals, and
//! linear programs are solved by an exact simplex method.

pub mod alpha;
pub mod gen;
pub mod lp;
pub mod order;
pub mod powerdomain;
pub mod rational;
pub mod report;
pub mod set;
pub mod suites;
pub mod text;
pub mod valuation;
