//! Seifert fibered pieces, graph manifolds and the JSJ graph of groups of
//! their fundamental groups, with tools to check how malnormal the JSJ
//! edge groups are.

pub mod catalog;
pub mod format;
pub mod gog;
pub mod klein;
pub mod manifold;
pub mod orbifold;
pub mod seifert;
pub mod splitting;
pub mod symbol;
pub mod tree;
