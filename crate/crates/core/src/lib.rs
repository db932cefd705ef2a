//! Reductions from #SAT to differences of 2CNF model counts.
//!
//! A CNF formula together with a labeled tree decomposition is mapped to two
//! implication (or monotone, or cubic bipartite) 2CNFs whose model counts
//! differ by exactly the model count of the input. The crate also ships the
//! switch gadgets that combine such pairs into one or two oracle calls, two
//! independent model counters, and checkers for the rogue-model bijection that
//! makes the difference come out right.

pub mod combinators;
pub mod counting;
pub mod formula;
pub mod graph;
pub mod reduction;
pub mod treedec;
pub mod verification;

pub use counting::Count;
pub use formula::{Clause, CnfFormula, FragmentTag, Lit, Polarity, Var};
pub use graph::Graph;
pub use treedec::{Label, LabeledTreeDecomposition, NodeShape, TreeDecomposition};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/decompositions.md")]
    mod decompositions {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/combining.md")]
    mod combining {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
