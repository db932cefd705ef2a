//! Conversion to a 3CNF where every variable occurs at most three times and a
//! variable with three occurrences has both signs. The model count is kept.
//!
//! Long clauses are split with connectors `a_i ↔ (l_{i+2} ∨ a_{i+1})`, so every
//! connector is a function of the original literals. A 3-clause with three
//! equal signs gets one literal replaced by a fresh `w ↔ ¬u`. Variables that
//! still occur too often are replaced by a cycle of copies
//! `v_1 → v_2 → … → v_k → v_1`, one copy per occurrence.

use std::collections::BTreeSet;

use super::ReductionError;
use crate::formula::{Clause, CnfFormula, Lit, Polarity, Var};
use crate::treedec::{preorder, steiner_nodes, Label, LabeledTreeDecomposition, TreeDecomposition};

/// Ok when `formula` already has the shape [`normalize_3cnf`] produces.
pub fn is_normalized(formula: &CnfFormula) -> Result<(), String> {
    if formula.polarity() != Polarity::Cnf {
        return Err("not a CNF".into());
    }
    let mut pos = vec![0usize; formula.num_vars()];
    let mut neg = vec![0usize; formula.num_vars()];
    for (j, c) in formula.clauses().iter().enumerate() {
        if c.len() > 3 {
            return Err(format!("clause {} has {} literals", j + 1, c.len()));
        }
        if c.len() == 3 && same_sign(c.lits()) {
            return Err(format!("clause {} has three literals of one sign", j + 1));
        }
        for l in c.lits() {
            if l.is_positive() {
                pos[l.var().index()] += 1;
            } else {
                neg[l.var().index()] += 1;
            }
        }
    }
    for i in 0..formula.num_vars() {
        let occ = pos[i] + neg[i];
        if occ > 3 {
            return Err(format!("variable {} occurs {} times", i + 1, occ));
        }
        if occ == 3 && (pos[i] == 0 || neg[i] == 0) {
            return Err(format!("variable {} occurs three times with one sign", i + 1));
        }
    }
    Ok(())
}

fn same_sign(lits: &[Lit]) -> bool {
    lits.iter().all(|l| l.is_positive()) || lits.iter().all(|l| !l.is_positive())
}

fn clause(lits: &[Lit]) -> Clause {
    Clause::new(lits.iter().copied()).expect("pieces use distinct variables")
}

struct Fresh(usize);

impl Fresh {
    fn next(&mut self) -> Var {
        self.0 += 1;
        Var::from_index(self.0 - 1)
    }
}

/// Replaces a same-sign 3-clause by a mixed one plus `w ↔ ¬u`.
fn mix(lits: Vec<Lit>, fresh: &mut Fresh) -> Vec<Clause> {
    if lits.len() < 3 || !same_sign(&lits) {
        return vec![clause(&lits)];
    }
    let u = lits[2];
    let w = fresh.next();
    let flipped = if u.is_positive() { w.neg() } else { w.pos() };
    vec![
        clause(&[lits[0], lits[1], flipped]),
        clause(&[w.pos(), u.var().pos()]),
        clause(&[w.neg(), u.var().neg()]),
    ]
}

fn expand(c: &Clause, fresh: &mut Fresh) -> Vec<Clause> {
    let l = c.lits();
    let k = l.len();
    if k <= 3 {
        return mix(l.to_vec(), fresh);
    }
    let a: Vec<Var> = (0..k - 3).map(|_| fresh.next()).collect();
    let mut out = mix(vec![l[0], l[1], a[0].pos()], fresh);
    for i in 0..k - 4 {
        out.push(clause(&[a[i].neg(), l[i + 2], a[i + 1].pos()]));
        out.push(clause(&[a[i].pos(), l[i + 2].negated()]));
        out.push(clause(&[a[i].pos(), a[i + 1].neg()]));
    }
    let last = a[k - 4];
    out.extend(mix(vec![last.neg(), l[k - 2], l[k - 1]], fresh));
    out.push(clause(&[last.pos(), l[k - 2].negated()]));
    out.push(clause(&[last.pos(), l[k - 1].negated()]));
    out
}

struct Tree {
    bags: Vec<BTreeSet<usize>>,
    parent: Vec<Option<usize>>,
    label: Vec<Option<usize>>,
    root: usize,
}

impl Tree {
    /// New node between `n` and its parent.
    fn insert_above(&mut self, n: usize, bag: BTreeSet<usize>, label: Option<usize>) -> usize {
        let id = self.bags.len();
        self.bags.push(bag);
        self.parent.push(self.parent[n]);
        self.label.push(label);
        self.parent[n] = Some(id);
        if self.root == n {
            self.root = id;
        }
        id
    }

    fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(t);
            }
        }
        ch
    }
}

/// Normalizes `formula` and returns a clause-labeled decomposition of the result.
/// Variable labels of a fully labeled input are dropped.
pub fn normalize_3cnf(
    formula: &CnfFormula,
    ltd: &LabeledTreeDecomposition,
) -> Result<(CnfFormula, LabeledTreeDecomposition), ReductionError> {
    if formula.polarity() != Polarity::Cnf {
        return Err(ReductionError::NotCnf);
    }
    ltd.check(formula)?;
    let mut fresh = Fresh(formula.num_vars());
    let nn = ltd.num_nodes();
    let mut tree = Tree {
        bags: (0..nn).map(|t| ltd.bag(t).iter().copied().collect()).collect(),
        parent: (0..nn).map(|t| ltd.parent(t)).collect(),
        label: vec![None; nn],
        root: ltd.root(),
    };
    let mut clauses: Vec<Clause> = Vec::new();

    // split and mix, one node per resulting clause
    for t in 0..nn {
        let Some(Label::Clause(j)) = ltd.label_of(t) else {
            continue;
        };
        let start = fresh.0;
        let group = expand(&formula.clauses()[j], &mut fresh);
        let mut span: Vec<(usize, usize)> = vec![(usize::MAX, 0); fresh.0 - start];
        for (p, c) in group.iter().enumerate() {
            for v in c.vars().filter(|v| v.index() >= start) {
                let s = &mut span[v.index() - start];
                s.0 = s.0.min(p);
                s.1 = s.1.max(p);
            }
        }
        let base = tree.bags[t].clone();
        let bag_at = |p: usize| {
            let mut b = base.clone();
            b.extend(span.iter().enumerate().filter(|(_, s)| s.0 <= p && p <= s.1).map(|(i, _)| start + i));
            b
        };
        let child = ltd.children(t)[0];
        let mut below = child;
        for p in (1..group.len()).rev() {
            below = tree.insert_above(below, bag_at(p), Some(clauses.len() + p));
        }
        tree.bags[t] = bag_at(0);
        tree.label[t] = Some(clauses.len());
        clauses.extend(group);
    }

    // occurrence bounding
    let children = tree.children();
    let order = preorder(&children, tree.root);
    let mut pos_in_order = vec![0; tree.bags.len()];
    for (i, &t) in order.iter().enumerate() {
        pos_in_order[t] = i;
    }
    let mut node_of = vec![0; clauses.len()];
    for (t, l) in tree.label.iter().enumerate() {
        if let Some(j) = l {
            node_of[*j] = t;
        }
    }
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); fresh.0];
    for (j, c) in clauses.iter().enumerate() {
        for v in c.vars() {
            occ[v.index()].push(j);
        }
    }
    let mut pending: Vec<(usize, Clause)> = Vec::new();
    for (i, js) in occ.iter_mut().enumerate() {
        let k = js.len();
        let signs: BTreeSet<bool> = js
            .iter()
            .map(|&j| clauses[j].lits().iter().find(|l| l.var().index() == i).unwrap().is_positive())
            .collect();
        if k < 3 || (k == 3 && signs.len() == 2) {
            continue;
        }
        js.sort_by_key(|&j| pos_in_order[node_of[j]]);
        let copies: Vec<Var> = (0..k).map(|c| if c == 0 { Var::from_index(i) } else { fresh.next() }).collect();
        for bag in tree.bags.iter_mut() {
            bag.remove(&i);
        }
        for c in 0..k {
            let (a, b) = (node_of[js[c]], node_of[js[(c + 1) % k]]);
            let mut marked = vec![false; tree.bags.len()];
            marked[a] = true;
            marked[b] = true;
            for (t, inside) in steiner_nodes(&children, tree.root, &marked).into_iter().enumerate() {
                if inside {
                    tree.bags[t].insert(copies[c].index());
                }
            }
            let old = &clauses[js[c]];
            let lits: Vec<Lit> = old
                .lits()
                .iter()
                .map(|&l| if l.var().index() == i { Lit::new(copies[c], l.is_positive()) } else { l })
                .collect();
            clauses[js[c]] = clause(&lits);
            pending.push((b, clause(&[copies[c].neg(), copies[(c + 1) % k].pos()])));
        }
    }
    for (n, c) in pending {
        let bag = tree.bags[n].clone();
        tree.insert_above(n, bag, Some(clauses.len()));
        clauses.push(c);
    }

    let out = CnfFormula::from_parts(fresh.0, clauses, Polarity::Cnf);
    let base = TreeDecomposition::new(
        tree.bags.into_iter().map(|b| b.into_iter().collect()).collect(),
        tree.parent,
        tree.root,
    )
    .expect("insertions keep a tree");
    let labels = tree.label.into_iter().map(|l| l.map(Label::Clause)).collect();
    let out_ltd = LabeledTreeDecomposition::from_parts(base, labels, false, &out)?;
    Ok((out, out_ltd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_bruteforce;

    fn normalize_trivial(f: &CnfFormula) -> (CnfFormula, LabeledTreeDecomposition) {
        let ltd = LabeledTreeDecomposition::label(&TreeDecomposition::trivial(f), f, false).unwrap();
        normalize_3cnf(f, &ltd).unwrap()
    }

    #[test]
    fn five_clause_splits_into_three_pieces() {
        let f = CnfFormula::from_dimacs_clauses(5, &[&[1, -2, 3, -4, 5]]).unwrap();
        let (g, ltd) = normalize_trivial(&f);
        assert_eq!(g.clauses().iter().filter(|c| c.len() == 3).count(), 3);
        assert!(is_normalized(&g).is_ok());
        assert_eq!(count_bruteforce(&g).unwrap(), count_bruteforce(&f).unwrap());
        ltd.check(&g).unwrap();
    }

    #[test]
    fn four_occurrences_become_a_cycle() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[-1, 3], &[1, -2], &[-1, -3]]).unwrap();
        let (g, _) = normalize_trivial(&f);
        assert_eq!(g.num_vars(), 6);
        assert!(is_normalized(&g).is_ok());
        assert_eq!(count_bruteforce(&g).unwrap(), count_bruteforce(&f).unwrap());
    }

    #[test]
    fn normal_input_is_kept() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[-1, 2, 3], &[1, -2, 3], &[-3]]).unwrap();
        let (g, _) = normalize_trivial(&f);
        assert_eq!(g, f);
    }

    #[test]
    fn same_sign_triple_is_mixed() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[-1, -2, -3]]).unwrap();
        let (g, _) = normalize_trivial(&f);
        assert!(is_normalized(&g).is_ok());
        assert_eq!(count_bruteforce(&g).unwrap(), count_bruteforce(&f).unwrap());
    }
}
