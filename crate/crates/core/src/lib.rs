//! Harrop strengthening of natural deduction derivations, immediate
//! derivability and the Turing machine reduction built on them.

pub mod deduction;
pub mod horn;
pub mod oracle;
pub mod syntax;
pub mod normalize;
pub mod slash;
pub mod extract;
pub mod tmreduce;
pub mod corpus;
