//! Rooted tree decompositions, PACE `.td` I/O, and labeled binarized decompositions.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{CnfFormula, Var};
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("decomposition tree is not a tree: {0}")]
    NotATree(String),
    #[error("bag {node} mentions vertex {vertex} outside the graph")]
    VertexOutOfRange { node: usize, vertex: usize },
    #[error("vertex {0} occurs in no bag")]
    VertexMissing(usize),
    #[error("edge {{{0}, {1}}} is not covered by any bag")]
    EdgeUncovered(usize, usize),
    #[error("bags containing vertex {0} are not connected")]
    TraceDisconnected(usize),
    #[error("clause {0} is not covered by any bag")]
    ClauseUncovered(usize),
    #[error("declared {declared} vertices, graph has {actual}")]
    VertexCount { declared: usize, actual: usize },
}

/// Rooted tree of bags. Vertices are 0-based graph vertex ids; nodes are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    root: usize,
}

impl TreeDecomposition {
    /// Checks that `parent` describes a tree rooted at `root`. Bags are sorted and deduplicated.
    pub fn new(bags: Vec<Vec<usize>>, parent: Vec<Option<usize>>, root: usize) -> Result<Self, TdError> {
        let n = bags.len();
        if n == 0 || parent.len() != n || root >= n {
            return Err(TdError::NotATree("node count mismatch".into()));
        }
        if parent[root].is_some() {
            return Err(TdError::NotATree("root has a parent".into()));
        }
        for (t, p) in parent.iter().enumerate() {
            match p {
                None if t != root => return Err(TdError::NotATree(format!("node {} has no parent", t + 1))),
                Some(q) if *q >= n => return Err(TdError::NotATree(format!("node {} has invalid parent", t + 1))),
                _ => {}
            }
        }
        // every node must reach the root
        let mut state = vec![0u8; n];
        state[root] = 2;
        for start in 0..n {
            let mut path = Vec::new();
            let mut t = start;
            while state[t] == 0 {
                state[t] = 1;
                path.push(t);
                t = parent[t].unwrap();
            }
            if state[t] == 1 {
                return Err(TdError::NotATree("cycle in parent pointers".into()));
            }
            for u in path {
                state[u] = 2;
            }
        }
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        Ok(TreeDecomposition { bags, parent, root })
    }

    /// Orients an undirected tree given by `edges` (0-based node pairs) away from `root`.
    pub fn from_edges(bags: Vec<Vec<usize>>, edges: &[(usize, usize)], root: usize) -> Result<Self, TdError> {
        let n = bags.len();
        if n == 0 || root >= n {
            return Err(TdError::NotATree("no nodes".into()));
        }
        if edges.len() + 1 != n {
            return Err(TdError::NotATree(format!("{} nodes but {} edges", n, edges.len())));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(TdError::NotATree(format!("bad edge {} {}", a + 1, b + 1)));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    stack.push(w);
                }
            }
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return Err(TdError::NotATree(format!("node {} is disconnected", t + 1)));
        }
        TreeDecomposition::new(bags, parent, root)
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn bag(&self, t: usize) -> &[usize] {
        &self.bags[t]
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Maximum bag size minus one; `-1` when every bag is empty.
    pub fn width(&self) -> i64 {
        self.bags.iter().map(|b| b.len() as i64).max().unwrap_or(0) - 1
    }

    /// Children of every node, sorted by the minimum node index in their subtree.
    pub fn ordered_children(&self) -> Vec<Vec<usize>> {
        let n = self.num_nodes();
        let mut children = vec![Vec::new(); n];
        for t in 0..n {
            if let Some(p) = self.parent[t] {
                children[p].push(t);
            }
        }
        let order = postorder(&children, self.root);
        let mut submin: Vec<usize> = (0..n).collect();
        for &t in &order {
            for &c in &children[t] {
                submin[t] = submin[t].min(submin[c]);
            }
        }
        for ch in children.iter_mut() {
            ch.sort_by_key(|&c| submin[c]);
        }
        children
    }

    /// Checks the decomposition conditions against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), TdError> {
        let nv = g.num_vertices();
        let mut trace: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= nv {
                    return Err(TdError::VertexOutOfRange { node: t, vertex: v });
                }
                trace[v].push(t);
            }
        }
        if let Some(v) = trace.iter().position(|tr| tr.is_empty()) {
            return Err(TdError::VertexMissing(v));
        }
        for (u, v) in g.edges() {
            let (a, b) = if trace[u].len() <= trace[v].len() { (u, v) } else { (v, u) };
            if !trace[a].iter().any(|&t| self.bags[t].binary_search(&b).is_ok()) {
                return Err(TdError::EdgeUncovered(u, v));
            }
        }
        for (v, tr) in trace.iter().enumerate() {
            let tops = tr
                .iter()
                .filter(|&&t| match self.parent[t] {
                    Some(p) => self.bags[p].binary_search(&v).is_err(),
                    None => true,
                })
                .count();
            if tops != 1 {
                return Err(TdError::TraceDisconnected(v));
            }
        }
        Ok(())
    }

    /// PACE 2017 text. A `c root` line records the root when it is not bag 1.
    pub fn to_pace(&self, num_vertices: usize) -> String {
        let mut s = format!(
            "s td {} {} {}\n",
            self.num_nodes(),
            self.width() + 1,
            num_vertices
        );
        if self.root != 0 {
            writeln!(s, "c root {}", self.root + 1).unwrap();
        }
        for (t, bag) in self.bags.iter().enumerate() {
            write!(s, "b {}", t + 1).unwrap();
            for v in bag {
                write!(s, " {}", v + 1).unwrap();
            }
            s.push('\n');
        }
        for t in 0..self.num_nodes() {
            if let Some(p) = self.parent[t] {
                writeln!(s, "{} {}", p + 1, t + 1).unwrap();
            }
        }
        s
    }

    /// Reads PACE `.td` text and validates it against `graph`. The root is bag 1
    /// unless a `c root <id>` comment says otherwise.
    pub fn parse_pace(text: &str, graph: &Graph) -> Result<Self, TdError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut edges = Vec::new();
        let mut root = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            let err = |msg: &str| TdError::Format {
                line: line_no,
                msg: msg.to_string(),
            };
            let num = |tok: &str| tok.parse::<usize>().map_err(|_| err(&format!("bad number `{}`", tok)));
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[0] {
                "c" => {
                    if parts.len() == 3 && parts[1] == "root" {
                        let r = num(parts[2])?;
                        if r == 0 {
                            return Err(err("root id must be positive"));
                        }
                        root = r - 1;
                    }
                }
                "s" => {
                    if header.is_some() || parts.len() != 5 || parts[1] != "td" {
                        return Err(err("malformed solution line"));
                    }
                    let h = (num(parts[2])?, num(parts[3])?, num(parts[4])?);
                    bags = vec![None; h.0];
                    header = Some(h);
                }
                "b" => {
                    let (nb, _, nv) = header.ok_or_else(|| err("bag before solution line"))?;
                    if parts.len() < 2 {
                        return Err(err("bag line without id"));
                    }
                    let id = num(parts[1])?;
                    if id == 0 || id > nb {
                        return Err(err("bag id out of range"));
                    }
                    if bags[id - 1].is_some() {
                        return Err(err("duplicate bag id"));
                    }
                    let mut bag = Vec::new();
                    for tok in &parts[2..] {
                        let v = num(tok)?;
                        if v == 0 || v > nv {
                            return Err(err("vertex out of range"));
                        }
                        bag.push(v - 1);
                    }
                    bags[id - 1] = Some(bag);
                }
                _ => {
                    let (nb, _, _) = header.ok_or_else(|| err("edge before solution line"))?;
                    if parts.len() != 2 {
                        return Err(err("malformed edge line"));
                    }
                    let (a, b) = (num(parts[0])?, num(parts[1])?);
                    if a == 0 || b == 0 || a > nb || b > nb {
                        return Err(err("edge endpoint out of range"));
                    }
                    edges.push((a - 1, b - 1));
                }
            }
        }
        let (_, declared_width, nv) = header.ok_or(TdError::Format {
            line: 0,
            msg: "missing solution line".into(),
        })?;
        if nv != graph.num_vertices() {
            return Err(TdError::VertexCount {
                declared: nv,
                actual: graph.num_vertices(),
            });
        }
        let bags: Vec<Vec<usize>> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or(TdError::Format {
                    line: 0,
                    msg: format!("bag {} missing", i + 1),
                })
            })
            .collect::<Result<_, _>>()?;
        if let Some(maxb) = bags.iter().map(|b| b.len()).max() {
            if maxb > declared_width {
                return Err(TdError::Format {
                    line: 0,
                    msg: format!("bag of size {} exceeds declared width+1 = {}", maxb, declared_width),
                });
            }
        }
        let td = TreeDecomposition::from_edges(bags, &edges, root)?;
        td.validate(graph)?;
        Ok(td)
    }

    /// Path of `m + 1` full bags; node 0 is the extra leaf and node `m` the root.
    pub fn trivial(formula: &CnfFormula) -> Self {
        let n = formula.num_vars();
        let m = formula.num_clauses();
        let bag: Vec<usize> = (0..n).collect();
        let parent = (0..=m).map(|i| if i < m { Some(i + 1) } else { None }).collect();
        TreeDecomposition::new(vec![bag; m + 1], parent, m).unwrap()
    }

    /// Decomposition induced by eliminating vertices in `order`, which must be a
    /// permutation of the vertices.
    pub fn from_elimination_order(g: &Graph, order: &[usize]) -> Self {
        let n = g.num_vertices();
        assert_eq!(order.len(), n, "order must list every vertex");
        if n == 0 {
            return TreeDecomposition::new(vec![Vec::new()], vec![None], 0).unwrap();
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (u, v) in g.edges() {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut bags = Vec::with_capacity(n);
        let mut parent = vec![None; n];
        for (i, &v) in order.iter().enumerate() {
            let later: Vec<usize> = adj[v].iter().copied().filter(|&a| pos[a] > i).collect();
            for (k, &a) in later.iter().enumerate() {
                for &b in &later[k + 1..] {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
            parent[i] = later.iter().map(|&a| pos[a]).min();
            let mut bag = later;
            bag.push(v);
            bags.push(bag);
        }
        for (i, p) in parent.iter_mut().enumerate() {
            if p.is_none() && i != n - 1 {
                *p = Some(n - 1);
            }
        }
        TreeDecomposition::new(bags, parent, n - 1).unwrap()
    }

    /// Greedy minimum-degree elimination. Used to count auxiliary formulas when
    /// no decomposition is supplied; it carries no optimality claim.
    pub fn min_degree(g: &Graph) -> Self {
        let n = g.num_vertices();
        if n == 0 {
            return TreeDecomposition::new(vec![Vec::new()], vec![None], 0).unwrap();
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (u, v) in g.edges() {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let mut alive = vec![true; n];
        let mut heap: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
        let mut pos = vec![usize::MAX; n];
        let mut bags = Vec::with_capacity(n);
        let mut nbrs = Vec::with_capacity(n);
        while let Some((_, v)) = heap.pop_first() {
            alive[v] = false;
            pos[v] = bags.len();
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut bag = nb.clone();
            bag.push(v);
            bags.push(bag);
            nbrs.push(nb.clone());
            for &a in &nb {
                heap.remove(&(adj[a].len(), a));
                adj[a].remove(&v);
            }
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
            for &a in &nb {
                heap.insert((adj[a].len(), a));
            }
        }
        debug_assert!(alive.iter().all(|a| !a));
        let k = bags.len();
        let mut parent: Vec<Option<usize>> = vec![None; k];
        for i in 0..k {
            parent[i] = nbrs[i].iter().map(|&a| pos[a]).min();
        }
        // join the component roots into one tree hanging off the last bag
        let last = k - 1;
        for (i, p) in parent.iter_mut().enumerate() {
            if p.is_none() && i != last {
                *p = Some(last);
            }
        }
        TreeDecomposition::new(bags, parent, last).unwrap()
    }
}

/// Nodes in postorder (children before parents).
pub(crate) fn postorder(children: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(children.len());
    let mut stack = vec![(root, false)];
    while let Some((t, done)) = stack.pop() {
        if done {
            out.push(t);
        } else {
            stack.push((t, true));
            for &c in children[t].iter().rev() {
                stack.push((c, false));
            }
        }
    }
    out
}

/// Nodes in preorder, children visited in the given order.
pub(crate) fn preorder(children: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(children.len());
    let mut stack = vec![root];
    while let Some(t) = stack.pop() {
        out.push(t);
        for &c in children[t].iter().rev() {
            stack.push(c);
        }
    }
    out
}

/// Minimal subtree spanning the marked nodes.
pub(crate) fn steiner_nodes(children: &[Vec<usize>], root: usize, marked: &[bool]) -> Vec<bool> {
    let n = children.len();
    let total = marked.iter().filter(|&&m| m).count();
    let mut below = vec![0usize; n];
    let mut inside = vec![false; n];
    if total == 0 {
        return inside;
    }
    for t in postorder(children, root) {
        let mut cnt = usize::from(marked[t]);
        let mut branches = 0;
        for &c in &children[t] {
            cnt += below[c];
            if below[c] > 0 {
                branches += 1;
            }
        }
        below[t] = cnt;
        inside[t] = marked[t] || branches >= 2 || (branches == 1 && cnt < total);
    }
    inside
}

/// Label carried by a node of a labeled decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    /// 0-based clause index.
    Clause(usize),
    Var(Var),
}

/// Shape of a node of a binarized labeled decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeShape {
    Leaf,
    Labeled { label: Label, child: usize },
    Unlabeled { child: usize },
    Join { first: usize, second: usize },
}

/// Binarized decomposition with at most one label per node. Labeled nodes have
/// exactly one child; join nodes are unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTreeDecomposition {
    base: TreeDecomposition,
    labels: Vec<Option<Label>>,
    children: Vec<Vec<usize>>,
    fully: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error(transparent)]
    Td(#[from] TdError),
    #[error("node {node}: {msg}")]
    Shape { node: usize, msg: String },
}

impl LabeledTreeDecomposition {
    /// Places every clause (and with `fully`, every variable) on one node whose bag
    /// covers it, then expands and binarizes.
    ///
    /// A label goes to the deepest covering node that still has room, meaning an
    /// unlabeled node with exactly one child; ties go to the smaller index. When no
    /// covering node has room, the deepest covering node takes it and is expanded
    /// into a chain of duplicates.
    pub fn label(td: &TreeDecomposition, formula: &CnfFormula, fully: bool) -> Result<Self, LabelError> {
        td.validate(&formula.primal_graph())?;
        let n0 = td.num_nodes();
        let children0 = td.ordered_children();
        let mut depth = vec![0usize; n0];
        for &t in &preorder(&children0, td.root()) {
            for &c in &children0[t] {
                depth[c] = depth[t] + 1;
            }
        }
        let mut placed: Vec<Vec<Label>> = vec![Vec::new(); n0];
        let mut items: Vec<(Label, Vec<usize>)> = formula
            .clauses()
            .iter()
            .enumerate()
            .map(|(j, c)| (Label::Clause(j), c.vars().map(|v| v.index()).collect()))
            .collect();
        if fully {
            items.extend((0..formula.num_vars()).map(|i| (Label::Var(Var::from_index(i)), vec![i])));
        }
        for (label, need) in items {
            let covering: Vec<usize> = (0..n0)
                .filter(|&t| need.iter().all(|v| td.bag(t).binary_search(v).is_ok()))
                .collect();
            if covering.is_empty() {
                let j = match label {
                    Label::Clause(j) => j,
                    Label::Var(v) => v.index(),
                };
                return Err(TdError::ClauseUncovered(j).into());
            }
            let pick = |pool: &mut dyn Iterator<Item = usize>| pool.max_by_key(|&t| (depth[t], std::cmp::Reverse(t)));
            let roomy = pick(&mut covering.iter().copied().filter(|&t| placed[t].is_empty() && children0[t].len() == 1));
            let t = roomy.or_else(|| pick(&mut covering.iter().copied())).unwrap();
            placed[t].push(label);
        }

        let mut bags: Vec<Vec<usize>> = td.bags().to_vec();
        let mut labels: Vec<Option<Label>> = vec![None; n0];
        let mut parent: Vec<Option<usize>> = (0..n0).map(|t| td.parent(t)).collect();
        fn fresh(
            bag: &[usize],
            label: Option<Label>,
            par: usize,
            bags: &mut Vec<Vec<usize>>,
            labels: &mut Vec<Option<Label>>,
            parent: &mut Vec<Option<usize>>,
        ) -> usize {
            bags.push(bag.to_vec());
            labels.push(label);
            parent.push(Some(par));
            bags.len() - 1
        }
        for t in 0..n0 {
            let bag = td.bag(t).to_vec();
            let mut bottom = t;
            for (k, &l) in placed[t].iter().enumerate() {
                if k == 0 {
                    labels[t] = Some(l);
                } else {
                    bottom = fresh(&bag, Some(l), bottom, &mut bags, &mut labels, &mut parent);
                }
            }
            let kids = &children0[t];
            match kids.len() {
                0 => {
                    if labels[bottom].is_some() {
                        fresh(&bag, None, bottom, &mut bags, &mut labels, &mut parent);
                    }
                }
                1 => parent[kids[0]] = Some(bottom),
                _ => {
                    if labels[bottom].is_some() {
                        bottom = fresh(&bag, None, bottom, &mut bags, &mut labels, &mut parent);
                    }
                    for (i, &c) in kids.iter().enumerate() {
                        if i + 2 < kids.len() {
                            parent[c] = Some(bottom);
                            bottom = fresh(&bag, None, bottom, &mut bags, &mut labels, &mut parent);
                        } else {
                            parent[c] = Some(bottom);
                        }
                    }
                }
            }
        }
        let base = TreeDecomposition::new(bags, parent, td.root())?;
        let children = base.ordered_children();
        let ltd = LabeledTreeDecomposition {
            base,
            labels,
            children,
            fully,
        };
        ltd.check(formula)?;
        Ok(ltd)
    }

    /// Assembles a labeled decomposition from parts and checks every invariant.
    pub fn from_parts(base: TreeDecomposition, labels: Vec<Option<Label>>, fully: bool, formula: &CnfFormula) -> Result<Self, LabelError> {
        if labels.len() != base.num_nodes() {
            return Err(LabelError::Shape {
                node: 0,
                msg: "label vector length differs from node count".into(),
            });
        }
        let children = base.ordered_children();
        let ltd = LabeledTreeDecomposition {
            base,
            labels,
            children,
            fully,
        };
        ltd.check(formula)?;
        Ok(ltd)
    }

    /// Verifies the labeled-decomposition invariants for `formula`.
    pub fn check(&self, formula: &CnfFormula) -> Result<(), LabelError> {
        self.base.validate(&formula.primal_graph())?;
        let shape = |node: usize, msg: &str| LabelError::Shape {
            node,
            msg: msg.to_string(),
        };
        let mut clause_seen = vec![0usize; formula.num_clauses()];
        let mut var_seen = vec![0usize; formula.num_vars()];
        for t in 0..self.num_nodes() {
            let k = self.children[t].len();
            if k > 2 {
                return Err(shape(t, "more than two children"));
            }
            match self.labels[t] {
                Some(Label::Clause(j)) => {
                    let c = formula.clauses().get(j).ok_or_else(|| shape(t, "clause index out of range"))?;
                    if !c.vars().all(|v| self.base.bag(t).binary_search(&v.index()).is_ok()) {
                        return Err(shape(t, "bag does not cover its clause"));
                    }
                    clause_seen[j] += 1;
                }
                Some(Label::Var(v)) => {
                    if v.index() >= formula.num_vars() || self.base.bag(t).binary_search(&v.index()).is_err() {
                        return Err(shape(t, "bag does not contain its variable"));
                    }
                    var_seen[v.index()] += 1;
                }
                None => {}
            }
            if self.labels[t].is_some() && k != 1 {
                return Err(shape(t, "labeled node must have exactly one child"));
            }
        }
        if let Some(j) = clause_seen.iter().position(|&s| s != 1) {
            return Err(shape(0, &format!("clause {} labeled {} times", j + 1, clause_seen[j])));
        }
        if self.fully {
            if let Some(i) = var_seen.iter().position(|&s| s != 1) {
                return Err(shape(0, &format!("variable {} labeled {} times", i + 1, var_seen[i])));
            }
        } else if var_seen.iter().any(|&s| s > 0) {
            return Err(shape(0, "variable labels in a clause-only decomposition"));
        }
        Ok(())
    }

    pub fn base(&self) -> &TreeDecomposition {
        &self.base
    }

    pub fn num_nodes(&self) -> usize {
        self.base.num_nodes()
    }

    pub fn root(&self) -> usize {
        self.base.root()
    }

    pub fn bag(&self, t: usize) -> &[usize] {
        self.base.bag(t)
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.base.parent(t)
    }

    pub fn label_of(&self, t: usize) -> Option<Label> {
        self.labels[t]
    }

    pub fn labels(&self) -> &[Option<Label>] {
        &self.labels
    }

    pub fn children(&self, t: usize) -> &[usize] {
        &self.children[t]
    }

    pub fn all_children(&self) -> &[Vec<usize>] {
        &self.children
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.fully
    }

    pub fn width(&self) -> i64 {
        self.base.width()
    }

    pub fn shape(&self, t: usize) -> NodeShape {
        let ch = &self.children[t];
        match (self.labels[t], ch.len()) {
            (_, 0) => NodeShape::Leaf,
            (Some(label), 1) => NodeShape::Labeled { label, child: ch[0] },
            (None, 1) => NodeShape::Unlabeled { child: ch[0] },
            (None, 2) => NodeShape::Join {
                first: ch[0],
                second: ch[1],
            },
            _ => unreachable!("checked at construction"),
        }
    }

    pub fn preorder(&self) -> Vec<usize> {
        preorder(&self.children, self.root())
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_nodes()];
        for t in self.preorder() {
            for &c in &self.children[t] {
                d[c] = d[t] + 1;
            }
        }
        d
    }

    /// For each node, the position of the lexicographically smallest
    /// root-to-leaf path through it, among all root-to-leaf paths ordered by
    /// child positions. This is the index of the leftmost leaf below the node.
    pub fn root_to_leaf_rank(&self) -> Vec<usize> {
        let n = self.num_nodes();
        let mut rank = vec![usize::MAX; n];
        let mut next = 0;
        for t in postorder(&self.children, self.root()) {
            rank[t] = match self.children[t].first() {
                None => {
                    next += 1;
                    next - 1
                }
                Some(&c) => rank[c],
            };
        }
        rank
    }

    /// `.td` text with `c label` annotations (1-based node, clause and variable ids).
    pub fn to_annotated_pace(&self, num_vertices: usize) -> String {
        let mut s = self.base.to_pace(num_vertices);
        for (t, l) in self.labels.iter().enumerate() {
            match l {
                Some(Label::Clause(j)) => writeln!(s, "c label {} clause {}", t + 1, j + 1).unwrap(),
                Some(Label::Var(v)) => writeln!(s, "c label {} var {}", t + 1, v).unwrap(),
                None => {}
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        let mut g = Graph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(0, 2);
        g
    }

    #[test]
    fn pace_round_trip_and_errors() {
        let g = triangle();
        let td = TreeDecomposition::parse_pace("s td 2 3 3\nb 1 1 2 3\nb 2 3\n1 2\n", &g).unwrap();
        assert_eq!(td.width(), 2);
        assert_eq!(td.root(), 0);
        let again = TreeDecomposition::parse_pace(&td.to_pace(3), &g).unwrap();
        assert_eq!(again, td);
        assert_eq!(
            TreeDecomposition::parse_pace("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n", &g),
            Err(TdError::EdgeUncovered(0, 2))
        );
        assert!(matches!(
            TreeDecomposition::parse_pace("s td 2 2 3\nb 1 1 2 3\n", &g),
            Err(TdError::Format { .. })
        ));
    }

    #[test]
    fn disconnected_trace_is_reported() {
        let g = Graph::new(2);
        let td = TreeDecomposition::new(vec![vec![0], vec![1], vec![0]], vec![None, Some(0), Some(1)], 0).unwrap();
        assert_eq!(td.validate(&g), Err(TdError::TraceDisconnected(0)));
    }

    #[test]
    fn ursa_major() {
        // a..p as 0..15
        let edges = [
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 2),
            (8, 9), (8, 10), (10, 11), (10, 12), (6, 13), (13, 14), (13, 15), (3, 7),
        ];
        let mut g = Graph::new(16);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        let text = "s td 12 3 16\n\
            b 1 1 2\nb 2 2 3 9\nb 3 9 11\nb 4 9 10\nb 5 11 12 13\nb 6 3 4 9\n\
            b 7 4 8 9\nb 8 4 5 8\nb 9 5 7 8\nb 10 5 6 7\nb 11 7 14\nb 12 14 15 16\n\
            1 2\n2 3\n3 4\n3 5\n2 6\n6 7\n7 8\n8 9\n9 10\n9 11\n11 12\n";
        let td = TreeDecomposition::parse_pace(text, &g).unwrap();
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn empty_bag_has_width_minus_one() {
        let td = TreeDecomposition::new(vec![vec![]], vec![None], 0).unwrap();
        assert_eq!(td.width(), -1);
    }

    #[test]
    fn min_degree_is_valid() {
        let mut g = Graph::new(7);
        for (u, v) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (5, 2)] {
            g.add_edge(u, v);
        }
        let td = TreeDecomposition::min_degree(&g);
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn steiner_tree_of_a_path() {
        let children = vec![vec![1], vec![2], vec![3], vec![]];
        let s = steiner_nodes(&children, 0, &[false, true, false, true]);
        assert_eq!(s, vec![false, true, true, true]);
    }
}
