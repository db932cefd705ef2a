//! Parity-bookkeeping reductions from a CNF and a labeled tree decomposition to
//! a pair of 2CNFs whose model counts differ by the model count of the input.
//!
//! Three variants share one skeleton:
//!
//! * [`Variant::Impl`]: every clause is an implication `(¬a ∨ b)`.
//! * [`Variant::Monotone`]: every clause is `(a ∨ b)`; the case variables and
//!   `x` are replaced by their barred counterparts.
//! * [`Variant::CubicBipartite`]: implications where every variable occurs at
//!   most three times and the primal graph is bipartite. Needs a formula from
//!   [`normalize_3cnf`].

mod decomp;
mod normalize;

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

pub use decomp::{incidence_decomposition, output_decomposition};
pub use normalize::{is_normalized, normalize_3cnf};

use crate::formula::{Clause, CnfFormula, Polarity, Var};
use crate::treedec::{Label, LabelError, LabeledTreeDecomposition, NodeShape, TreeDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Impl,
    Monotone,
    CubicBipartite,
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("input must be a CNF")]
    NotCnf,
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("variable labels are only meaningful for the monotone variant")]
    VariableLabels,
    #[error("the monotone variant needs a fully labeled decomposition")]
    NotFullyLabeled,
    #[error("input is not normalized: {0}")]
    NotNormalized(String),
}

/// Auxiliaries of one clause `c`: the chosen variable `ḑc`, its partner `c̄`,
/// and in the cubic variant the copy chains `c′, c″` and `c̄′, c̄″`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseAux {
    pub chosen: Var,
    pub bar: Var,
    pub chosen_copies: Vec<Var>,
    pub bar_copies: Vec<Var>,
}

impl ClauseAux {
    /// Variable that the literals of the clause hang off: `ḑc` or its last copy.
    pub fn chosen_tail(&self) -> Var {
        *self.chosen_copies.last().unwrap_or(&self.chosen)
    }

    pub fn bar_tail(&self) -> Var {
        *self.bar_copies.last().unwrap_or(&self.bar)
    }
}

/// Monotone variant only: truth indicators `⊤_v`, `⊥_v` and the alias `v̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VarAux {
    pub top: Var,
    pub bot: Var,
    pub bar: Var,
}

/// Auxiliaries of one decomposition node. In the monotone variant the case
/// fields hold the barred variables `ō1, ō2, ē1, ē2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeAux {
    pub o: Var,
    pub e: Var,
    pub o1: Option<Var>,
    pub o2: Option<Var>,
    pub e1: Option<Var>,
    pub e2: Option<Var>,
    /// Cubic variant, non-root nodes: `o′, o″`.
    pub o_copies: Vec<Var>,
    pub e_copies: Vec<Var>,
    /// Cubic variant with many leaves: the copy of `x` used by this leaf's fact.
    pub x_local: Option<Var>,
}

impl NodeAux {
    /// `[o1, o2, e1, e2]`.
    pub fn cases(&self) -> [Option<Var>; 4] {
        [self.o1, self.o2, self.e1, self.e2]
    }

    /// The pair a parent refers to: `(o, e)`, or `(o″, e″)` when copies exist.
    pub fn outputs(&self) -> (Var, Var) {
        (
            *self.o_copies.last().unwrap_or(&self.o),
            *self.e_copies.last().unwrap_or(&self.e),
        )
    }
}

/// Every auxiliary variable of a reduction, with deterministic allocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuxRegistry {
    pub num_source: usize,
    pub clauses: Vec<ClauseAux>,
    pub vars: Vec<VarAux>,
    pub nodes: Vec<NodeAux>,
    /// `x`, or `x̄` in the monotone variant.
    pub x: Var,
    /// Cubic variant with many leaves: the even cycle of `x` copies, starting at `x`.
    pub ring: Vec<Var>,
    pub total_vars: usize,
    names: Vec<(String, Var)>,
}

impl AuxRegistry {
    /// Sidecar map, one `c aux <name> <index>` line per auxiliary variable.
    pub fn to_map(&self) -> String {
        let mut s = String::new();
        for (name, v) in &self.names {
            writeln!(s, "c aux {} {}", name, v).unwrap();
        }
        s
    }

    pub fn names(&self) -> &[(String, Var)] {
        &self.names
    }
}

/// Output of a reduction.
#[derive(Debug, Clone)]
pub struct ReductionPair {
    pub variant: Variant,
    /// The formula that was reduced (after normalization in the cubic case).
    pub source: CnfFormula,
    /// The labeled decomposition that guided the reduction.
    pub ltd: LabeledTreeDecomposition,
    pub psi1: CnfFormula,
    pub psi2: CnfFormula,
    pub registry: AuxRegistry,
    /// Decomposition of the primal graphs of both `psi1` and `psi2`.
    pub out_td: TreeDecomposition,
}

impl ReductionPair {
    /// Width the constructed decomposition is guaranteed not to exceed, in terms
    /// of the width `w` of the guiding decomposition.
    pub fn width_bound(&self) -> i64 {
        decomp::width_bound(self.variant, self.ltd.width())
    }
}

/// Implication variant.
pub fn reduce_impl(formula: &CnfFormula, ltd: &LabeledTreeDecomposition) -> Result<ReductionPair, ReductionError> {
    precheck(formula, ltd)?;
    if ltd.is_fully_labeled() {
        return Err(ReductionError::VariableLabels);
    }
    Ok(build(formula, ltd, Variant::Impl))
}

/// Monotone variant. The decomposition must label every clause and every variable.
pub fn reduce_monotone(formula: &CnfFormula, ltd: &LabeledTreeDecomposition) -> Result<ReductionPair, ReductionError> {
    precheck(formula, ltd)?;
    if !ltd.is_fully_labeled() {
        return Err(ReductionError::NotFullyLabeled);
    }
    Ok(build(formula, ltd, Variant::Monotone))
}

/// Cubic bipartite variant on a normalized formula.
pub fn reduce_cubic_bipartite(formula: &CnfFormula, ltd: &LabeledTreeDecomposition) -> Result<ReductionPair, ReductionError> {
    precheck(formula, ltd)?;
    if ltd.is_fully_labeled() {
        return Err(ReductionError::VariableLabels);
    }
    is_normalized(formula).map_err(ReductionError::NotNormalized)?;
    Ok(build(formula, ltd, Variant::CubicBipartite))
}

fn precheck(formula: &CnfFormula, ltd: &LabeledTreeDecomposition) -> Result<(), ReductionError> {
    if formula.polarity() != Polarity::Cnf {
        return Err(ReductionError::NotCnf);
    }
    ltd.check(formula)?;
    Ok(())
}

struct Alloc {
    next: usize,
    names: Vec<(String, Var)>,
}

impl Alloc {
    fn fresh(&mut self, name: String) -> Var {
        self.next += 1;
        let v = Var::from_index(self.next - 1);
        self.names.push((name, v));
        v
    }
}

fn build(formula: &CnfFormula, ltd: &LabeledTreeDecomposition, variant: Variant) -> ReductionPair {
    let n = formula.num_vars();
    let cubic = variant == Variant::CubicBipartite;
    let mono = variant == Variant::Monotone;
    let mut alloc = Alloc {
        next: n,
        names: Vec::new(),
    };

    let clauses: Vec<ClauseAux> = (0..formula.num_clauses())
        .map(|j| {
            let c = j + 1;
            let chosen = alloc.fresh(format!("dc_c{}", c));
            let bar = alloc.fresh(format!("cbar_c{}", c));
            let (chosen_copies, bar_copies) = if cubic {
                (
                    vec![alloc.fresh(format!("dc1_c{}", c)), alloc.fresh(format!("dc2_c{}", c))],
                    vec![alloc.fresh(format!("cbar1_c{}", c)), alloc.fresh(format!("cbar2_c{}", c))],
                )
            } else {
                (Vec::new(), Vec::new())
            };
            ClauseAux {
                chosen,
                bar,
                chosen_copies,
                bar_copies,
            }
        })
        .collect();

    let vars: Vec<VarAux> = if mono {
        (1..=n)
            .map(|v| VarAux {
                top: alloc.fresh(format!("top_v{}", v)),
                bot: alloc.fresh(format!("bot_v{}", v)),
                bar: alloc.fresh(format!("vbar_v{}", v)),
            })
            .collect()
    } else {
        Vec::new()
    };

    let root = ltd.root();
    let order = ltd.preorder();
    let leaves: Vec<usize> = order.iter().copied().filter(|&t| ltd.children(t).is_empty()).collect();
    let use_ring = cubic && leaves.len() + 1 > 3;
    let case_name = |base: &str| if mono { format!("{}bar", base) } else { base.to_string() };
    let mut nodes: Vec<Option<NodeAux>> = vec![None; ltd.num_nodes()];
    for &t in &order {
        let o = alloc.fresh(format!("o_t{}", t));
        let e = alloc.fresh(format!("e_t{}", t));
        let (has1, has2) = match ltd.shape(t) {
            NodeShape::Leaf => (false, false),
            NodeShape::Unlabeled { .. } => (false, true),
            NodeShape::Labeled { .. } | NodeShape::Join { .. } => (true, true),
        };
        let mut mk = |flag: bool, base: &str| flag.then(|| alloc.fresh(format!("{}_t{}", case_name(base), t)));
        let o1 = mk(has1, "o1");
        let o2 = mk(has2, "o2");
        let e1 = mk(has1, "e1");
        let e2 = mk(has2, "e2");
        let (o_copies, e_copies) = if cubic && t != root {
            (
                vec![alloc.fresh(format!("o1p_t{}", t)), alloc.fresh(format!("o2p_t{}", t))],
                vec![alloc.fresh(format!("e1p_t{}", t)), alloc.fresh(format!("e2p_t{}", t))],
            )
        } else {
            (Vec::new(), Vec::new())
        };
        nodes[t] = Some(NodeAux {
            o,
            e,
            o1,
            o2,
            e1,
            e2,
            o_copies,
            e_copies,
            x_local: None,
        });
    }
    let mut nodes: Vec<NodeAux> = nodes.into_iter().map(Option::unwrap).collect();
    let x = alloc.fresh(if mono { "xbar".into() } else { "x".into() });
    let mut ring = Vec::new();
    if use_ring {
        // x, y0, x1, y1, ..., xk, yk: x_i feeds leaf i, y_i only pass the value on
        ring.push(x);
        for (i, &leaf) in leaves.iter().enumerate() {
            ring.push(alloc.fresh(format!("xring_y{}", i)));
            let xi = alloc.fresh(format!("xring_x{}", i + 1));
            ring.push(xi);
            nodes[leaf].x_local = Some(xi);
        }
        ring.push(alloc.fresh(format!("xring_y{}", leaves.len())));
    }
    let total = alloc.next;

    // positive clause or implication, depending on the variant
    let mut out: Vec<Clause> = Vec::new();
    let mut link = |a: Var, b: Var| {
        out.push(if mono {
            Clause::binary(a.pos(), b.pos())
        } else {
            Clause::binary(a.neg(), b.pos())
        })
    };

    for &t in &order {
        let aux = &nodes[t];
        let (o, e) = (aux.o, aux.e);
        match ltd.shape(t) {
            NodeShape::Leaf => link(aux.x_local.unwrap_or(x), e),
            NodeShape::Labeled { label, child } => {
                let (co, ce) = nodes[child].outputs();
                let (alpha, alpha_bar) = match label {
                    Label::Clause(j) => (clauses[j].chosen, clauses[j].bar),
                    Label::Var(v) => (v, vars[v.index()].bar),
                };
                let [o1, o2, e1, e2] = aux.cases().map(Option::unwrap);
                for (k, a, b, s) in [
                    (o1, ce, alpha, o),
                    (o2, co, alpha_bar, o),
                    (e1, co, alpha, e),
                    (e2, ce, alpha_bar, e),
                ] {
                    link(k, a);
                    link(k, b);
                    link(k, s);
                }
            }
            NodeShape::Unlabeled { child } => {
                let (co, ce) = nodes[child].outputs();
                let (o2, e2) = (aux.o2.unwrap(), aux.e2.unwrap());
                link(o2, co);
                link(o2, o);
                link(e2, ce);
                link(e2, e);
            }
            NodeShape::Join { first, second } => {
                let (fo, fe) = nodes[first].outputs();
                let (so, se) = nodes[second].outputs();
                let [o1, o2, e1, e2] = aux.cases().map(Option::unwrap);
                for (k, a, b, s) in [(o1, fe, so, o), (o2, fo, se, o), (e1, fo, so, e), (e2, fe, se, e)] {
                    link(k, a);
                    link(k, b);
                    link(k, s);
                }
            }
        }
        if !aux.o_copies.is_empty() {
            let chain_o = [o, aux.o_copies[0], aux.o_copies[1]];
            let chain_e = [e, aux.e_copies[0], aux.e_copies[1]];
            for w in chain_o.windows(2).chain(chain_e.windows(2)) {
                link(w[0], w[1]);
            }
        }
    }

    for (j, c) in formula.clauses().iter().enumerate() {
        let ca = &clauses[j];
        if mono {
            for l in c.lits() {
                let va = vars[l.var().index()];
                link(ca.bar, if l.is_positive() { va.bot } else { va.top });
            }
            continue;
        }
        if cubic {
            link(ca.chosen, ca.chosen_copies[0]);
            link(ca.chosen_copies[0], ca.chosen_copies[1]);
            link(ca.bar, ca.bar_copies[0]);
            link(ca.bar_copies[0], ca.bar_copies[1]);
        }
        for l in c.lits() {
            if l.is_positive() {
                link(l.var(), ca.bar_tail());
            } else {
                link(ca.chosen_tail(), l.var());
            }
        }
    }
    if mono {
        for va in &vars {
            link(va.bar, va.top);
            link(va.bar, va.bot);
            link(va.top, va.bot);
        }
    }
    if use_ring {
        for i in 0..ring.len() {
            link(ring[i], ring[(i + 1) % ring.len()]);
        }
    }

    let base = CnfFormula::from_parts(total, out, Polarity::Cnf);
    let root_fact = |target: Var| {
        if mono {
            Clause::binary(x.pos(), target.pos())
        } else {
            Clause::binary(x.neg(), target.pos())
        }
    };
    let mut psi1 = base.clone();
    psi1.push_clause(root_fact(nodes[root].e));
    let mut psi2 = base;
    psi2.push_clause(root_fact(nodes[root].o));

    let registry = AuxRegistry {
        num_source: n,
        clauses,
        vars,
        nodes,
        x,
        ring,
        total_vars: total,
        names: alloc.names,
    };
    let out_td = decomp::build(formula, ltd, &registry, variant);
    ReductionPair {
        variant,
        source: formula.clone(),
        ltd: ltd.clone(),
        psi1,
        psi2,
        registry,
        out_td,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{count_bruteforce, count_treewidth_dp, Count};
    use crate::formula::FragmentTag;

    fn example() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(3, &[&[-1, 2, 3], &[1, -2, 3], &[-3]]).unwrap()
    }

    #[test]
    fn running_example_labels_match_the_path() {
        let f = example();
        let ltd = LabeledTreeDecomposition::label(&TreeDecomposition::trivial(&f), &f, false).unwrap();
        assert_eq!(ltd.num_nodes(), 4);
        assert_eq!(ltd.root(), 3);
        assert_eq!(ltd.label_of(0), None);
        for j in 0..3 {
            assert_eq!(ltd.label_of(j + 1), Some(Label::Clause(j)));
        }
    }

    #[test]
    fn impl_pair_on_the_running_example() {
        let f = example();
        let ltd = LabeledTreeDecomposition::label(&TreeDecomposition::trivial(&f), &f, false).unwrap();
        let pair = reduce_impl(&f, &ltd).unwrap();
        assert_eq!(pair.psi1.classify_fragment(), FragmentTag::Impl2);
        assert_eq!(pair.psi1.num_vars(), 30);
        assert_eq!(count_treewidth_dp(&pair.psi1, &pair.out_td).unwrap(), Count::from(204_452));
        assert_eq!(count_treewidth_dp(&pair.psi2, &pair.out_td).unwrap(), Count::from(204_450));
    }

    #[test]
    fn clauseless_single_node() {
        let f = CnfFormula::new(3);
        let ltd = LabeledTreeDecomposition::label(&TreeDecomposition::trivial(&f), &f, false).unwrap();
        let pair = reduce_impl(&f, &ltd).unwrap();
        let d = count_bruteforce(&pair.psi1).unwrap() - count_bruteforce(&pair.psi2).unwrap();
        assert_eq!(d, Count::from(8));
    }

    #[test]
    fn map_lists_every_auxiliary() {
        let f = example();
        let ltd = LabeledTreeDecomposition::label(&TreeDecomposition::trivial(&f), &f, false).unwrap();
        let pair = reduce_impl(&f, &ltd).unwrap();
        let map = pair.registry.to_map();
        assert_eq!(map.lines().count(), 30 - 3);
        assert!(map.lines().last().unwrap().starts_with("c aux x 30"));
    }
}
