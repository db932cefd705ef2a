//! Decompositions of the reduced formulas, built node by node from the guiding
//! decomposition.
//!
//! Every guiding node `t` becomes a main bag holding the part of `χ(t)` that is
//! still needed, `x`, `o_t, e_t`, the label variables and the outputs of the
//! children. Each case variable gets its own leaf bag next to the main bag,
//! together with the three variables it implies. Copy chains of the cubic
//! variant sit in short bridges between a node and its parent.

use super::{AuxRegistry, ReductionPair, Variant};
use crate::formula::{CnfFormula, Var};
use crate::treedec::{steiner_nodes, Label, LabeledTreeDecomposition, NodeShape, TreeDecomposition};

/// Rebuilds the decomposition stored in `pair.out_td`.
pub fn output_decomposition(pair: &ReductionPair) -> TreeDecomposition {
    build(&pair.source, &pair.ltd, &pair.registry, pair.variant)
}

/// Incidence-graph decomposition of `psi` from a primal decomposition: every
/// clause vertex gets a leaf bag holding it and its variables, hung below a
/// bag that covers the clause. Clause `j` is vertex `num_vars + j`.
pub fn incidence_decomposition(psi: &CnfFormula, primal: &TreeDecomposition) -> TreeDecomposition {
    let n = psi.num_vars();
    let mut bags = primal.bags().to_vec();
    let mut parent: Vec<Option<usize>> = (0..primal.num_nodes()).map(|t| primal.parent(t)).collect();
    for (j, c) in psi.clauses().iter().enumerate() {
        let vars: Vec<usize> = c.vars().map(Var::index).collect();
        let host = (0..primal.num_nodes())
            .find(|&t| vars.iter().all(|v| primal.bag(t).binary_search(v).is_ok()))
            .unwrap_or(primal.root());
        let mut bag = vars;
        bag.push(n + j);
        bags.push(bag);
        parent.push(Some(host));
    }
    TreeDecomposition::new(bags, parent, primal.root()).expect("leaf attachment keeps a tree")
}

/// Width guaranteed by [`build`] for a guiding decomposition of width `w`.
pub(crate) fn width_bound(variant: Variant, w: i64) -> i64 {
    let extra = match variant {
        Variant::Impl => w + 7,
        Variant::Monotone => 2 * w + 8,
        Variant::CubicBipartite => w + 9,
    };
    extra.max(4)
}

struct Out {
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl Out {
    fn push(&mut self, bag: Vec<usize>, parent: Option<usize>) -> usize {
        self.bags.push(bag);
        self.parent.push(parent);
        self.bags.len() - 1
    }
}

fn ix(vs: &[Var]) -> Vec<usize> {
    vs.iter().map(|v| v.index()).collect()
}

pub(crate) fn build(
    formula: &CnfFormula,
    ltd: &LabeledTreeDecomposition,
    reg: &AuxRegistry,
    variant: Variant,
) -> TreeDecomposition {
    let nn = ltd.num_nodes();
    let root = ltd.root();
    let children = ltd.all_children();
    let mono = variant == Variant::Monotone;
    let cubic = variant == Variant::CubicBipartite;

    let mut clause_node = vec![usize::MAX; formula.num_clauses()];
    let mut var_node = vec![usize::MAX; formula.num_vars()];
    for t in 0..nn {
        match ltd.label_of(t) {
            Some(Label::Clause(j)) => clause_node[j] = t,
            Some(Label::Var(v)) => var_node[v.index()] = t,
            None => {}
        }
    }

    let mut main: Vec<Vec<usize>> = vec![Vec::new(); nn];
    let mut isolated = Vec::new();
    let spread = |main: &mut Vec<Vec<usize>>, marked: &[bool], v: Var| {
        for (t, inside) in steiner_nodes(children, root, marked).into_iter().enumerate() {
            if inside {
                main[t].push(v.index());
            }
        }
    };
    if mono {
        for (i, va) in reg.vars.iter().enumerate() {
            let mut top = vec![false; nn];
            let mut bot = vec![false; nn];
            top[var_node[i]] = true;
            bot[var_node[i]] = true;
            for (j, c) in formula.clauses().iter().enumerate() {
                for l in c.lits() {
                    if l.var().index() == i {
                        if l.is_positive() {
                            bot[clause_node[j]] = true;
                        } else {
                            top[clause_node[j]] = true;
                        }
                    }
                }
            }
            spread(&mut main, &top, va.top);
            spread(&mut main, &bot, va.bot);
        }
    } else {
        let mut marked = vec![vec![false; nn]; formula.num_vars()];
        for (j, c) in formula.clauses().iter().enumerate() {
            for v in c.vars() {
                marked[v.index()][clause_node[j]] = true;
            }
        }
        for (i, m) in marked.iter().enumerate() {
            if m.iter().any(|&b| b) {
                spread(&mut main, m, Var::from_index(i));
            } else {
                isolated.push(i);
            }
        }
    }

    // x, or the ring of x copies
    if reg.ring.is_empty() {
        for bag in main.iter_mut() {
            bag.push(reg.x.index());
        }
    } else {
        let leaves: Vec<usize> = ltd.preorder().into_iter().filter(|&t| children[t].is_empty()).collect();
        let k = leaves.len();
        for bag in main.iter_mut() {
            bag.push(reg.x.index());
        }
        for (i, &leaf) in leaves.iter().enumerate() {
            main[leaf].push(reg.ring[2 * i + 2].index());
        }
        main[leaves[0]].push(reg.ring[1].index());
        main[leaves[k - 1]].push(reg.ring[2 * k + 1].index());
        for i in 1..k {
            let mut marked = vec![false; nn];
            marked[leaves[i - 1]] = true;
            marked[leaves[i]] = true;
            spread(&mut main, &marked, reg.ring[2 * i + 1]);
        }
    }

    // local variables and the hanging bags they need
    let mut hanging: Vec<Vec<Vec<usize>>> = vec![Vec::new(); nn];
    for t in 0..nn {
        let aux = &reg.nodes[t];
        main[t].extend([aux.o.index(), aux.e.index()]);
        for &c in &children[t] {
            let (co, ce) = reg.nodes[c].outputs();
            main[t].extend([co.index(), ce.index()]);
        }
        let (o, e) = (aux.o, aux.e);
        let mut case = |k: Option<Var>, a: Var, b: Option<Var>, s: Var| {
            let mut bag = vec![k.unwrap().index(), a.index(), s.index()];
            bag.extend(b.map(Var::index));
            hanging[t].push(bag);
        };
        match ltd.shape(t) {
            NodeShape::Leaf => {}
            NodeShape::Labeled { label, child } => {
                let (co, ce) = reg.nodes[child].outputs();
                let (alpha, alpha_bar) = match label {
                    Label::Clause(j) => (reg.clauses[j].chosen, reg.clauses[j].bar),
                    Label::Var(v) => (v, reg.vars[v.index()].bar),
                };
                main[t].extend([alpha.index(), alpha_bar.index()]);
                case(aux.o1, ce, Some(alpha), o);
                case(aux.o2, co, Some(alpha_bar), o);
                case(aux.e1, co, Some(alpha), e);
                case(aux.e2, ce, Some(alpha_bar), e);
                if let (true, Label::Clause(j)) = (cubic, label) {
                    let ca = &reg.clauses[j];
                    let c = &formula.clauses()[j];
                    let mut neg = ix(&[ca.chosen, ca.chosen_copies[0], ca.chosen_copies[1]]);
                    let mut pos = ix(&[ca.bar, ca.bar_copies[0], ca.bar_copies[1]]);
                    for l in c.lits() {
                        if l.is_positive() {
                            pos.push(l.var().index());
                        } else {
                            neg.push(l.var().index());
                        }
                    }
                    hanging[t].push(neg);
                    hanging[t].push(pos);
                }
            }
            NodeShape::Unlabeled { child } => {
                let (co, ce) = reg.nodes[child].outputs();
                case(aux.o2, co, None, o);
                case(aux.e2, ce, None, e);
            }
            NodeShape::Join { first, second } => {
                let (fo, fe) = reg.nodes[first].outputs();
                let (so, se) = reg.nodes[second].outputs();
                case(aux.o1, fe, Some(so), o);
                case(aux.o2, fo, Some(se), o);
                case(aux.e1, fo, Some(so), e);
                case(aux.e2, fe, Some(se), e);
            }
        }
    }
    for bag in main.iter_mut() {
        bag.sort_unstable();
        bag.dedup();
    }

    let mut out = Out {
        bags: Vec::new(),
        parent: Vec::new(),
    };
    let mut id = vec![usize::MAX; nn];
    for t in ltd.preorder() {
        let attach = match ltd.parent(t) {
            None => None,
            Some(p) if !cubic => Some(id[p]),
            Some(p) => {
                // bridge: parent, {o′ o″ e′ e″}, {o o′ e e′}, t
                let aux = &reg.nodes[t];
                let shared: Vec<usize> = main[t].iter().copied().filter(|v| main[p].binary_search(v).is_ok()).collect();
                let mut upper = shared.clone();
                upper.extend(ix(&[aux.o_copies[0], aux.o_copies[1], aux.e_copies[0], aux.e_copies[1]]));
                let mut lower = shared;
                lower.extend(ix(&[aux.o, aux.o_copies[0], aux.e, aux.e_copies[0]]));
                let u = out.push(upper, Some(id[p]));
                Some(out.push(lower, Some(u)))
            }
        };
        id[t] = out.push(main[t].clone(), attach);
        for bag in std::mem::take(&mut hanging[t]) {
            out.push(bag, Some(id[t]));
        }
    }
    for i in isolated {
        out.push(vec![i], Some(id[root]));
    }
    TreeDecomposition::new(out.bags, out.parent, id[root]).expect("construction yields a tree")
}
