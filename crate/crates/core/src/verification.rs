//! Machine checks for the rogue-model argument and for the structural
//! promises of the reductions.
//!
//! A model of `ψ1` or `ψ2` is rogue when it does not encode a consistent
//! parity run: `x` is off, a node selects the wrong number of cases, a label
//! is chosen and not chosen at once, or a node claims both or neither parity.
//! Rogue models of `ψ1` and `ψ2` cancel in the difference via an involution
//! that flips the parity of the topmost rogue node and of everything above it.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::counting::{count_bruteforce_limit, Count, CountError};
use crate::formula::{CnfFormula, FragmentTag, Var};
use crate::graph::Graph;
use crate::reduction::{ReductionPair, Variant};
use crate::treedec::{Label, LabeledTreeDecomposition, NodeShape, TreeDecomposition};

/// Default number of search-tree probes spent on enumerating models.
pub const DEFAULT_PROBE_BUDGET: u64 = 1 << 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerificationError {
    #[error("assignment has {got} variables, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("assignment satisfies neither reduced formula")]
    NotAModel,
    #[error("model is not rogue")]
    NotRogue,
}

/// Assignment, stored densely. `assignment[i]` is the value of variable `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Model {
    pub assignment: Vec<bool>,
}

impl Model {
    pub fn new(assignment: Vec<bool>) -> Self {
        Model { assignment }
    }

    pub fn from_true_vars(num_vars: usize, vars: impl IntoIterator<Item = Var>) -> Self {
        let mut assignment = vec![false; num_vars];
        for v in vars {
            assignment[v.index()] = true;
        }
        Model { assignment }
    }

    pub fn get(&self, v: Var) -> bool {
        self.assignment[v.index()]
    }

    pub fn true_vars(&self) -> Vec<Var> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i])
            .map(Var::from_index)
            .collect()
    }

    fn swap(&mut self, a: Var, b: Var) {
        self.assignment.swap(a.index(), b.index());
    }
}

/// Condition names follow the usual numbering; `Copy` is a broken copy chain
/// of the cubic variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RogueCondition {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iiib")]
    IIIb,
    #[serde(rename = "iv")]
    IV,
    #[serde(rename = "copy")]
    Copy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RogueVerdict {
    pub is_rogue: bool,
    pub witness_node: Option<usize>,
    pub violated_condition: Option<RogueCondition>,
    /// Every node with a local violation, sorted.
    pub rogue_nodes: Vec<usize>,
}

struct View<'a> {
    pair: &'a ReductionPair,
    mono: bool,
}

impl<'a> View<'a> {
    fn new(pair: &'a ReductionPair) -> Self {
        View {
            pair,
            mono: pair.variant == Variant::Monotone,
        }
    }

    fn ltd(&self) -> &LabeledTreeDecomposition {
        &self.pair.ltd
    }

    /// `x` switched on. The monotone variant stores `x̄`.
    fn x_on(&self, m: &Model) -> bool {
        m.get(self.pair.registry.x) != self.mono
    }

    fn selected(&self, m: &Model, k: Var) -> bool {
        m.get(k) != self.mono
    }

    fn label_pair(&self, label: Label) -> (Var, Var) {
        let reg = &self.pair.registry;
        match label {
            Label::Clause(j) => (reg.clauses[j].chosen, reg.clauses[j].bar),
            Label::Var(v) => (v, reg.vars[v.index()].bar),
        }
    }

    fn local(&self, m: &Model, t: usize) -> Option<RogueCondition> {
        let reg = &self.pair.registry;
        let aux = &reg.nodes[t];
        if !matches!(self.ltd().shape(t), NodeShape::Leaf) {
            let sel = aux.cases().iter().flatten().filter(|&&k| self.selected(m, k)).count();
            if sel != 1 {
                return Some(RogueCondition::II);
            }
        }
        if let Some(label) = self.ltd().label_of(t) {
            let (a, b) = self.label_pair(label);
            if m.get(a) == m.get(b) {
                return Some(RogueCondition::III);
            }
            if let Label::Var(v) = label {
                let va = reg.vars[v.index()];
                if m.get(va.top) && m.get(va.bot) {
                    return Some(RogueCondition::IIIb);
                }
            }
            if let Label::Clause(j) = label {
                let ca = &reg.clauses[j];
                if !ca.chosen_copies.is_empty()
                    && (!uniform(m, ca.chosen, &ca.chosen_copies) || !uniform(m, ca.bar, &ca.bar_copies))
                {
                    return Some(RogueCondition::Copy);
                }
            }
        }
        if m.get(aux.o) == m.get(aux.e) {
            return Some(RogueCondition::IV);
        }
        if !uniform(m, aux.o, &aux.o_copies) || !uniform(m, aux.e, &aux.e_copies) {
            return Some(RogueCondition::Copy);
        }
        None
    }

    fn verdict(&self, m: &Model) -> RogueVerdict {
        let ltd = self.ltd();
        let local: Vec<(usize, RogueCondition)> = (0..ltd.num_nodes())
            .filter_map(|t| self.local(m, t).map(|c| (t, c)))
            .collect();
        let rogue_nodes: Vec<usize> = local.iter().map(|&(t, _)| t).collect();
        if !self.x_on(m) {
            return RogueVerdict {
                is_rogue: true,
                witness_node: Some(ltd.root()),
                violated_condition: Some(RogueCondition::I),
                rogue_nodes,
            };
        }
        let rank = ltd.root_to_leaf_rank();
        let depth = ltd.depths();
        let best = local.iter().min_by_key(|&&(t, _)| (rank[t], depth[t], t)).copied();
        RogueVerdict {
            is_rogue: best.is_some(),
            witness_node: best.map(|b| b.0),
            violated_condition: best.map(|b| b.1),
            rogue_nodes,
        }
    }

    fn symmetric(&self, m: &Model) -> Result<Model, VerificationError> {
        let v = self.verdict(m);
        if !v.is_rogue {
            return Err(VerificationError::NotRogue);
        }
        if v.violated_condition == Some(RogueCondition::I) {
            return Ok(m.clone());
        }
        let ltd = self.ltd();
        let reg = &self.pair.registry;
        let t = v.witness_node.unwrap();
        let mut out = m.clone();
        let swap_chains = |out: &mut Model, s: usize| {
            let a = &reg.nodes[s];
            out.swap(a.o, a.e);
            for (&p, &q) in a.o_copies.iter().zip(&a.e_copies) {
                out.swap(p, q);
            }
        };

        let mut child = t;
        while let Some(p) = ltd.parent(child) {
            let a = &reg.nodes[p];
            swap_chains(&mut out, p);
            let second = matches!(ltd.shape(p), NodeShape::Join { second, .. } if second == child);
            let pairs = if second {
                [(a.o1, a.e2), (a.o2, a.e1)]
            } else {
                [(a.o1, a.e1), (a.o2, a.e2)]
            };
            for (x, y) in pairs {
                if let (Some(x), Some(y)) = (x, y) {
                    out.swap(x, y);
                }
            }
            child = p;
        }

        let a = &reg.nodes[t];
        let (oo, eo) = a.outputs();
        if m.get(oo) && m.get(eo) {
            return Ok(out);
        }
        swap_chains(&mut out, t);
        let one = m.get(a.o) != m.get(a.e);
        let any = a.cases().iter().flatten().any(|&k| self.selected(m, k));
        if one && any {
            for (x, y) in [(a.o1, a.e2), (a.o2, a.e1)] {
                if let (Some(x), Some(y)) = (x, y) {
                    out.swap(x, y);
                }
            }
            match ltd.label_of(t) {
                Some(Label::Var(v)) => {
                    let va = reg.vars[v.index()];
                    if m.get(va.top) && m.get(va.bot) {
                        out.swap(v, va.bar);
                    }
                }
                Some(Label::Clause(j)) => {
                    let ca = &reg.clauses[j];
                    if !ca.chosen_copies.is_empty() && m.get(ca.chosen) != m.get(ca.bar) {
                        out.swap(ca.chosen, ca.bar);
                        for (&p, &q) in ca.chosen_copies.iter().zip(&ca.bar_copies) {
                            out.swap(p, q);
                        }
                    }
                }
                None => {}
            }
        }
        Ok(out)
    }
}

fn uniform(m: &Model, head: Var, copies: &[Var]) -> bool {
    copies.iter().all(|&c| m.get(c) == m.get(head))
}

fn check_model(m: &Model, pair: &ReductionPair) -> Result<(), VerificationError> {
    let n = pair.psi1.num_vars();
    if m.assignment.len() != n {
        return Err(VerificationError::Arity {
            got: m.assignment.len(),
            expected: n,
        });
    }
    if !pair.psi1.eval(&m.assignment) && !pair.psi2.eval(&m.assignment) {
        return Err(VerificationError::NotAModel);
    }
    Ok(())
}

/// Classifies a model of `ψ1` or `ψ2`. The witness is the topmost rogue node on
/// the leftmost root-to-leaf path that carries one.
pub fn classify_rogue(model: &Model, pair: &ReductionPair) -> Result<RogueVerdict, VerificationError> {
    check_model(model, pair)?;
    Ok(View::new(pair).verdict(model))
}

/// The partner of a rogue model under the involution pairing rogue models of
/// `ψ1` with those of `ψ2`.
pub fn symmetric_rogue(model: &Model, pair: &ReductionPair) -> Result<Model, VerificationError> {
    check_model(model, pair)?;
    View::new(pair).symmetric(model)
}

/// Models of a CNF by backtracking with unit propagation over binary clauses.
/// Longer clauses are checked on complete assignments only. `visit` returns
/// `false` to stop early. Returns `false` when the probe budget ran out.
pub fn for_each_model(f: &CnfFormula, budget: u64, mut visit: impl FnMut(&[bool]) -> bool) -> bool {
    let n = f.num_vars();
    let code = |v: usize, positive: bool| 2 * v + usize::from(!positive);
    let mut implied: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let mut units = Vec::new();
    let mut long = Vec::new();
    let mut empty = false;
    for c in f.clauses() {
        let l = c.lits();
        match l.len() {
            0 => empty = true,
            1 => units.push(code(l[0].var().index(), l[0].is_positive())),
            2 => {
                let a = code(l[0].var().index(), l[0].is_positive());
                let b = code(l[1].var().index(), l[1].is_positive());
                implied[a ^ 1].push(b);
                implied[b ^ 1].push(a);
            }
            _ => long.push(c.clone()),
        }
    }
    if empty {
        return true;
    }
    struct S<'a> {
        n: usize,
        implied: Vec<Vec<usize>>,
        long: Vec<crate::formula::Clause>,
        val: Vec<Option<bool>>,
        trail: Vec<usize>,
        probes: u64,
        budget: u64,
        out_of_budget: bool,
        stop: bool,
        full: Vec<bool>,
        visit: &'a mut dyn FnMut(&[bool]) -> bool,
    }
    impl S<'_> {
        fn assign(&mut self, lit: usize) -> bool {
            let mut queue = vec![lit];
            while let Some(l) = queue.pop() {
                let (v, pos) = (l / 2, l % 2 == 0);
                match self.val[v] {
                    Some(b) if b == pos => continue,
                    Some(_) => return false,
                    None => {
                        self.val[v] = Some(pos);
                        self.trail.push(v);
                        queue.extend(self.implied[l].iter().copied());
                    }
                }
            }
            true
        }

        fn undo(&mut self, mark: usize) {
            while self.trail.len() > mark {
                let v = self.trail.pop().unwrap();
                self.val[v] = None;
            }
        }

        fn rec(&mut self, mut i: usize) {
            while i < self.n && self.val[i].is_some() {
                i += 1;
            }
            if i == self.n {
                for (k, v) in self.val.iter().enumerate() {
                    self.full[k] = v.unwrap();
                }
                if self.long.iter().all(|c| c.satisfied_by(&self.full)) && !(self.visit)(&self.full) {
                    self.stop = true;
                }
                return;
            }
            for b in [false, true] {
                self.probes += 1;
                if self.probes > self.budget {
                    self.out_of_budget = true;
                    return;
                }
                let mark = self.trail.len();
                if self.assign(2 * i + usize::from(!b)) {
                    self.rec(i + 1);
                }
                self.undo(mark);
                if self.stop || self.out_of_budget {
                    return;
                }
            }
        }
    }
    let mut s = S {
        n,
        implied,
        long,
        val: vec![None; n],
        trail: Vec::new(),
        probes: 0,
        budget,
        out_of_budget: false,
        stop: false,
        full: vec![false; n],
        visit: &mut visit,
    };
    for u in units {
        if !s.assign(u) {
            return true;
        }
    }
    s.rec(0);
    !s.out_of_budget
}

/// Outcome of [`check_bijection`]. Counts cover the enumerated models only;
/// `exhaustive` is false when the probe budget cut enumeration short.
#[derive(Debug, Clone, Serialize)]
pub struct BijectionReport {
    pub variant: Variant,
    pub exhaustive: bool,
    pub models1: u64,
    pub models2: u64,
    pub rogue1: u64,
    pub rogue2: u64,
    pub nonrogue1: u64,
    pub nonrogue2: u64,
    /// Every checked rogue model maps to a rogue model of the other formula
    /// with the same rogue nodes, and mapping twice is the identity.
    pub map_ok: bool,
    /// Non-rogue models of `ψ1` choose an even number of clauses, those of `ψ2`
    /// an odd number, and every chosen clause is falsified by the source part.
    pub parity_ok: bool,
    /// `nonrogue1 − nonrogue2`, in decimal.
    pub difference: String,
    /// Model count of the reduced source formula, when small enough to brute force.
    pub source_count: Option<String>,
    /// Counterexamples as lists of true variables, at most a handful.
    pub failures: Vec<String>,
}

impl BijectionReport {
    /// All checks passed on a complete enumeration, and the difference matches
    /// the source count whenever that count is known.
    pub fn passed(&self) -> bool {
        self.exhaustive
            && self.map_ok
            && self.parity_ok
            && self.rogue1 == self.rogue2
            && self.source_count.as_ref().is_none_or(|c| *c == self.difference)
    }
}

const MAX_FAILURES: usize = 5;

/// Enumerates the models of `ψ1` and `ψ2`, and checks the pairing of rogue
/// models and the parity facts about non-rogue ones.
pub fn check_bijection(pair: &ReductionPair, budget: u64) -> BijectionReport {
    let view = View::new(pair);
    let mut failures: Vec<String> = Vec::new();
    let fail = |failures: &mut Vec<String>, what: &str, m: &Model| {
        if failures.len() < MAX_FAILURES {
            let vars: Vec<String> = m.true_vars().iter().map(|v| v.to_string()).collect();
            failures.push(format!("{}: {{{}}}", what, vars.join(" ")));
        }
    };
    let mut map_ok = true;
    let mut parity_ok = true;
    let mut stats = [(0u64, 0u64); 2];
    let mut exhaustive = true;
    for (side, (psi, other)) in [(&pair.psi1, &pair.psi2), (&pair.psi2, &pair.psi1)].into_iter().enumerate() {
        let done = for_each_model(psi, budget, |a| {
            let m = Model::new(a.to_vec());
            stats[side].0 += 1;
            let v = view.verdict(&m);
            if v.is_rogue {
                stats[side].1 += 1;
                let image = view.symmetric(&m).expect("rogue");
                let back = if other.eval(&image.assignment) {
                    let w = view.verdict(&image);
                    if !w.is_rogue || w.rogue_nodes != v.rogue_nodes {
                        map_ok = false;
                        fail(&mut failures, "image has different rogue nodes", &m);
                    }
                    view.symmetric(&image).ok()
                } else {
                    map_ok = false;
                    fail(&mut failures, "image is not a model of the other formula", &m);
                    None
                };
                if back.is_some_and(|b| b != m) {
                    map_ok = false;
                    fail(&mut failures, "map is not an involution", &m);
                }
            } else if !parity_holds(pair, &m, side == 0) {
                parity_ok = false;
                fail(&mut failures, "non-rogue model breaks parity", &m);
            }
            true
        });
        exhaustive &= done;
    }
    let nonrogue1 = stats[0].0 - stats[0].1;
    let nonrogue2 = stats[1].0 - stats[1].1;
    let difference = Count::from(nonrogue1) - Count::from(nonrogue2);
    let source_count = match count_bruteforce_limit(&pair.source, 24) {
        Ok(c) => Some(c.to_string()),
        Err(CountError::LimitExceeded { .. }) => None,
        Err(_) => None,
    };
    BijectionReport {
        variant: pair.variant,
        exhaustive,
        models1: stats[0].0,
        models2: stats[1].0,
        rogue1: stats[0].1,
        rogue2: stats[1].1,
        nonrogue1,
        nonrogue2,
        map_ok,
        parity_ok,
        difference: difference.to_string(),
        source_count,
        failures,
    }
}

fn parity_holds(pair: &ReductionPair, m: &Model, first: bool) -> bool {
    let reg = &pair.registry;
    let source: Vec<bool> = (0..reg.num_source)
        .map(|i| match pair.variant {
            Variant::Monotone => m.assignment[reg.vars[i].top.index()],
            _ => m.assignment[i],
        })
        .collect();
    let mut chosen = 0;
    for (j, ca) in reg.clauses.iter().enumerate() {
        if m.get(ca.chosen) {
            chosen += 1;
            if pair.source.clauses()[j].satisfied_by(&source) {
                return false;
            }
        }
    }
    (chosen % 2 == 0) == first
}

/// What [`audit_structure`] should insist on.
#[derive(Debug, Clone, Default, Serialize)]
pub struct StructureRequirements {
    pub fragment: Option<FragmentTag>,
    pub max_occurrence: Option<usize>,
    pub bipartite: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub fragment: FragmentTag,
    pub max_occurrence: usize,
    pub bipartite: bool,
    /// First violation, if any.
    pub violation: Option<String>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Fragment, occurrence and bipartiteness checks.
pub fn audit_structure(formula: &CnfFormula, req: &StructureRequirements) -> StructureReport {
    let fragment = formula.classify_fragment();
    let occ = formula.occurrences();
    let max_occurrence = occ.iter().copied().max().unwrap_or(0);
    let graph: Graph = formula.primal_graph();
    let coloring = graph.two_coloring();
    let mut violation = None;
    if let Some(want) = req.fragment {
        if fragment != want {
            violation = Some(format!("fragment is {}, expected {}", fragment, want));
        }
    }
    if violation.is_none() {
        if let Some(limit) = req.max_occurrence {
            if let Some(i) = occ.iter().position(|&k| k > limit) {
                violation = Some(format!("variable {} occurs {} times", i + 1, occ[i]));
            }
        }
    }
    if violation.is_none() && req.bipartite {
        if let Err((u, v)) = coloring {
            violation = Some(format!("odd cycle through the edge {} {}", u + 1, v + 1));
        }
    }
    StructureReport {
        fragment,
        max_occurrence,
        bipartite: coloring.is_ok(),
        violation,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthReport {
    pub input_width: i64,
    pub output_width: i64,
    pub bound: i64,
    /// Validation error against one of the output formulas.
    pub invalid: Option<String>,
}

impl WidthReport {
    pub fn passed(&self) -> bool {
        self.invalid.is_none() && self.output_width <= self.input_width + self.bound
    }
}

/// Validates `out_td` against every formula in `outputs` and compares its width
/// with `input_width + additive_bound`.
pub fn audit_width(input_width: i64, out_td: &TreeDecomposition, outputs: &[&CnfFormula], additive_bound: i64) -> WidthReport {
    let invalid = outputs
        .iter()
        .find_map(|f| out_td.validate(&f.primal_graph()).err())
        .map(|e| e.to_string());
    WidthReport {
        input_width,
        output_width: out_td.width(),
        bound: additive_bound,
        invalid,
    }
}

/// Rogue-node sets of every model of `psi`, keyed by the model. Handy in tests.
pub fn rogue_nodes_of_models(pair: &ReductionPair, psi: &CnfFormula, budget: u64) -> Vec<(Model, BTreeSet<usize>)> {
    let view = View::new(pair);
    let mut out = Vec::new();
    for_each_model(psi, budget, |a| {
        let m = Model::new(a.to_vec());
        let v = view.verdict(&m);
        out.push((m, v.rogue_nodes.into_iter().collect()));
        true
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_bruteforce;
    use crate::reduction::{normalize_3cnf, reduce_cubic_bipartite, reduce_impl, reduce_monotone};

    fn ltd_for(f: &CnfFormula, fully: bool) -> LabeledTreeDecomposition {
        LabeledTreeDecomposition::label(&TreeDecomposition::trivial(f), f, fully).unwrap()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let f = CnfFormula::from_dimacs_clauses(5, &[&[1, -2], &[2, 3], &[-3, -4], &[4, 5, -1]]).unwrap();
        let mut k = 0u64;
        assert!(for_each_model(&f, u64::MAX, |_| {
            k += 1;
            true
        }));
        assert_eq!(Count::from(k), count_bruteforce(&f).unwrap());
    }

    #[test]
    fn x_off_is_rogue_by_i() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1]]).unwrap();
        let pair = reduce_impl(&f, &ltd_for(&f, false)).unwrap();
        let m = Model::new(vec![false; pair.psi1.num_vars()]);
        let v = classify_rogue(&m, &pair).unwrap();
        assert_eq!(v.violated_condition, Some(RogueCondition::I));
        assert_eq!(symmetric_rogue(&m, &pair).unwrap(), m);
    }

    #[test]
    fn single_positive_unit() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1]]).unwrap();
        let pair = reduce_impl(&f, &ltd_for(&f, false)).unwrap();
        let r = check_bijection(&pair, DEFAULT_PROBE_BUDGET);
        assert!(r.passed(), "{:?}", r);
        assert_eq!(r.difference, "1");
    }

    #[test]
    fn running_example_impl() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[-1, 2, 3], &[1, -2, 3], &[-3]]).unwrap();
        let pair = reduce_impl(&f, &ltd_for(&f, false)).unwrap();
        let r = check_bijection(&pair, DEFAULT_PROBE_BUDGET);
        assert!(r.passed(), "{:?}", r);
        assert_eq!(r.difference, "2");
        assert_eq!(r.models1, 204_452);
    }

    #[test]
    fn monotone_binary_clause() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        let pair = reduce_monotone(&f, &ltd_for(&f, true)).unwrap();
        let r = check_bijection(&pair, DEFAULT_PROBE_BUDGET);
        assert!(r.passed(), "{:?}", r);
        assert_eq!(r.difference, "3");
    }

    #[test]
    fn cubic_two_clauses() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, -2], &[2]]).unwrap();
        let (g, ltd) = normalize_3cnf(&f, &ltd_for(&f, false)).unwrap();
        let pair = reduce_cubic_bipartite(&g, &ltd).unwrap();
        let r = check_bijection(&pair, DEFAULT_PROBE_BUDGET);
        assert!(r.passed(), "{:?}", r);
        assert_eq!(r.difference, "1");
    }

    #[test]
    fn audits() {
        let tri = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[2, 3], &[1, 3]]).unwrap();
        let req = StructureRequirements {
            bipartite: true,
            ..Default::default()
        };
        assert!(audit_structure(&tri, &req).violation.unwrap().contains("odd cycle"));
        let four = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[1, 3], &[-1, 2], &[-1, -3]]).unwrap();
        let req = StructureRequirements {
            max_occurrence: Some(3),
            ..Default::default()
        };
        assert!(!audit_structure(&four, &req).passed());
    }
}
