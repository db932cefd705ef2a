//! Exact model counters: exhaustive enumeration and dynamic programming over a
//! tree decomposition of the primal graph.

use std::collections::HashMap;
use std::ops::{AddAssign, MulAssign};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::formula::{CnfFormula, Polarity};
use crate::reduction::{self, ReductionError};
use crate::treedec::{postorder, LabeledTreeDecomposition, TdError, TreeDecomposition};

/// Exact signed count. Differences of counts may be negative.
pub type Count = BigInt;

pub const DEFAULT_BRUTE_LIMIT: usize = 24;
/// Largest bag the DP accepts.
pub const MAX_DP_BAG: usize = 30;
/// Largest bag the sparse DP accepts.
pub const MAX_SPARSE_BAG: usize = 64;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("{num_vars} variables exceed the enumeration limit {limit}")]
    LimitExceeded { num_vars: usize, limit: usize },
    #[error("clause {0} is not covered by any bag")]
    ClauseUncovered(usize),
    #[error("bag of node {node} has {size} vertices, more than the DP accepts")]
    BagTooLarge { node: usize, size: usize },
    #[error("decomposition rejected: {0}")]
    Td(#[from] TdError),
    #[error("a table at node {node} outgrew {limit} entries")]
    TableTooLarge { node: usize, limit: usize },
    #[error("clause {0} has more than two literals")]
    NotTwoCnf(usize),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Per-clause bit masks over the first 64 variables.
fn masks(f: &CnfFormula) -> Vec<(u64, u64)> {
    f.clauses()
        .iter()
        .map(|c| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for l in c.lits() {
                let bit = 1u64 << l.var().index();
                if l.is_positive() {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect()
}

/// Counts by enumerating all `2^n` assignments (`n` at most [`DEFAULT_BRUTE_LIMIT`]).
pub fn count_bruteforce(f: &CnfFormula) -> Result<Count, CountError> {
    count_bruteforce_limit(f, DEFAULT_BRUTE_LIMIT)
}

pub fn count_bruteforce_limit(f: &CnfFormula, limit: usize) -> Result<Count, CountError> {
    let n = f.num_vars();
    if n > limit || n > 40 {
        return Err(CountError::LimitExceeded { num_vars: n, limit: limit.min(40) });
    }
    let ms = masks(f);
    let mut count: u64 = 0;
    match f.polarity() {
        Polarity::Cnf => {
            for a in 0..(1u64 << n) {
                if ms.iter().all(|&(p, q)| a & p != 0 || !a & q != 0) {
                    count += 1;
                }
            }
        }
        Polarity::Dnf => {
            for a in 0..(1u64 << n) {
                if ms.iter().any(|&(p, q)| a & p == p && a & q == 0) {
                    count += 1;
                }
            }
        }
    }
    Ok(Count::from(count))
}

/// Arithmetic operations performed by the DP.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DpStats {
    pub additions: u64,
    pub multiplications: u64,
    pub largest_table: usize,
}

impl DpStats {
    pub fn operations(&self) -> u64 {
        self.additions + self.multiplications
    }
}

/// Counts models with dynamic programming over `td`, a decomposition of the
/// primal graph.
pub fn count_treewidth_dp(f: &CnfFormula, td: &TreeDecomposition) -> Result<Count, CountError> {
    count_treewidth_dp_stats(f, td).map(|(c, _)| c)
}

pub fn count_treewidth_dp_stats(f: &CnfFormula, td: &TreeDecomposition) -> Result<(Count, DpStats), CountError> {
    if f.polarity() == Polarity::Dnf {
        let (c, stats) = count_treewidth_dp_stats(&f.dualize(), td)?;
        let total = Count::one() << f.num_vars();
        return Ok((total - c, stats));
    }
    td.validate(&f.primal_graph())?;
    let plan = Plan::new(f, td, MAX_DP_BAG)?;
    if f.num_vars() < 127 {
        let (c, s) = plan.run::<u128>();
        Ok((Count::from(c), s))
    } else {
        let (c, s) = plan.run::<BigUint>();
        Ok((Count::from(c), s))
    }
}

/// Counts with the sparse DP over a minimum-degree decomposition of the
/// primal graph.
pub fn count_dp_auto(f: &CnfFormula) -> Result<Count, CountError> {
    let td = TreeDecomposition::min_degree(&f.primal_graph());
    count_sparse_dp(f, &td)
}

/// Same recursion as [`count_treewidth_dp`], but a table only stores the bag
/// assignments that extend to a model of the clauses below it. Bags may hold
/// up to [`MAX_SPARSE_BAG`] vertices. `largest_table` in the statistics counts
/// stored entries.
pub fn count_sparse_dp(f: &CnfFormula, td: &TreeDecomposition) -> Result<Count, CountError> {
    count_sparse_dp_stats(f, td).map(|(c, _)| c)
}

pub fn count_sparse_dp_stats(f: &CnfFormula, td: &TreeDecomposition) -> Result<(Count, DpStats), CountError> {
    count_sparse_dp_limit(f, td, usize::MAX)
}

/// [`count_sparse_dp_stats`] that gives up once a table would hold more than
/// `max_entries` entries.
pub fn count_sparse_dp_limit(f: &CnfFormula, td: &TreeDecomposition, max_entries: usize) -> Result<(Count, DpStats), CountError> {
    if f.polarity() == Polarity::Dnf {
        let (c, stats) = count_sparse_dp_limit(&f.dualize(), td, max_entries)?;
        let total = Count::one() << f.num_vars();
        return Ok((total - c, stats));
    }
    td.validate(&f.primal_graph())?;
    let plan = Plan::new(f, td, MAX_SPARSE_BAG)?;
    if f.num_vars() < 127 {
        let (c, s) = plan.run_sparse::<u128>(max_entries)?;
        Ok((Count::from(c), s))
    } else {
        let (c, s) = plan.run_sparse::<BigUint>(max_entries)?;
        Ok((Count::from(c), s))
    }
}

fn satisfied(a: u64, p: u64, q: u64) -> bool {
    a & p != 0 || !a & q != 0
}

trait Cell: Clone + Zero + One + for<'a> AddAssign<&'a Self> + for<'a> MulAssign<&'a Self> {}
impl Cell for u128 {}
impl Cell for BigUint {}

struct Plan<'a> {
    td: &'a TreeDecomposition,
    children: Vec<Vec<usize>>,
    /// Per node, clauses as (positive, negative) masks over bag positions.
    local: Vec<Vec<(u64, u64)>>,
}

impl<'a> Plan<'a> {
    fn new(f: &CnfFormula, td: &'a TreeDecomposition, max_bag: usize) -> Result<Self, CountError> {
        let children = td.ordered_children();
        let n = td.num_nodes();
        for t in 0..n {
            if td.bag(t).len() > max_bag {
                return Err(CountError::BagTooLarge {
                    node: t,
                    size: td.bag(t).len(),
                });
            }
        }
        let mut depth = vec![0usize; n];
        for &t in postorder(&children, td.root()).iter().rev() {
            for &c in &children[t] {
                depth[c] = depth[t] + 1;
            }
        }
        // nodes containing each vertex, for quick covering lookups
        let mut trace = vec![Vec::new(); f.num_vars()];
        for t in 0..n {
            for &v in td.bag(t) {
                trace[v].push(t);
            }
        }
        let mut local = vec![Vec::new(); n];
        for (j, c) in f.clauses().iter().enumerate() {
            let home = match c.lits().first() {
                None => Some(td.root()),
                Some(l0) => trace[l0.var().index()]
                    .iter()
                    .copied()
                    .filter(|&t| c.vars().all(|v| td.bag(t).binary_search(&v.index()).is_ok()))
                    .max_by_key(|&t| (depth[t], std::cmp::Reverse(t))),
            };
            let t = home.ok_or(CountError::ClauseUncovered(j))?;
            let bag = td.bag(t);
            let (mut p, mut q) = (0u64, 0u64);
            for l in c.lits() {
                let bit = 1u64 << bag.binary_search(&l.var().index()).unwrap();
                if l.is_positive() {
                    p |= bit;
                } else {
                    q |= bit;
                }
            }
            local[t].push((p, q));
        }
        Ok(Plan { td, children, local })
    }

    fn run<T: Cell>(&self) -> (T, DpStats) {
        let mut stats = DpStats::default();
        let n = self.td.num_nodes();
        let mut tables: Vec<Option<Vec<T>>> = vec![None; n];
        for t in postorder(&self.children, self.td.root()) {
            let bag = self.td.bag(t);
            let size = 1usize << bag.len();
            stats.largest_table = stats.largest_table.max(size);
            let mut table: Vec<T> = (0..size as u32)
                .map(|a| {
                    if self.local[t].iter().all(|&(p, q)| satisfied(a as u64, p, q)) {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            for &c in &self.children[t] {
                let child = tables[c].take().unwrap();
                let cbag = self.td.bag(c);
                let mut in_child = Vec::new();
                let mut in_parent = Vec::new();
                for (i, v) in cbag.iter().enumerate() {
                    if let Ok(k) = bag.binary_search(v) {
                        in_child.push(i);
                        in_parent.push(k);
                    }
                }
                let mut proj: Vec<T> = vec![T::zero(); 1 << in_child.len()];
                for (b, val) in child.iter().enumerate() {
                    stats.additions += 1;
                    if !val.is_zero() {
                        proj[gather(b, &in_child)] += val;
                    }
                }
                drop(child);
                for (a, cell) in table.iter_mut().enumerate() {
                    stats.multiplications += 1;
                    if !cell.is_zero() {
                        *cell *= &proj[gather(a, &in_parent)];
                    }
                }
            }
            tables[t] = Some(table);
        }
        let root = tables[self.td.root()].take().unwrap();
        let mut total = T::zero();
        for v in &root {
            stats.additions += 1;
            total += v;
        }
        (total, stats)
    }
}

impl Plan<'_> {
    fn run_sparse<T: Cell>(&self, max_entries: usize) -> Result<(T, DpStats), CountError> {
        let too_large = |node| CountError::TableTooLarge { node, limit: max_entries };
        let mut stats = DpStats::default();
        let n = self.td.num_nodes();
        let mut tables: Vec<Option<Vec<(u64, T)>>> = vec![None; n];
        for t in postorder(&self.children, self.td.root()) {
            let bag = self.td.bag(t);
            let mut cur: Vec<(u64, T)> = vec![(0, T::one())];
            let mut known = 0u64;
            let mut pending: Vec<(u64, u64)> = self.local[t].clone();
            for &c in &self.children[t] {
                let child = tables[c].take().unwrap();
                let cbag = self.td.bag(c);
                let mut in_child = Vec::new();
                let mut in_parent = Vec::new();
                for (i, v) in cbag.iter().enumerate() {
                    if let Ok(k) = bag.binary_search(v) {
                        in_child.push(i);
                        in_parent.push(k);
                    }
                }
                let mut proj: HashMap<u64, T> = HashMap::new();
                for (b, val) in child {
                    stats.additions += 1;
                    let key = scatter(gather(b as usize, &in_child), &in_parent);
                    match proj.get_mut(&key) {
                        Some(acc) => *acc += &val,
                        None => {
                            proj.insert(key, val);
                        }
                    }
                }
                let cmask = in_parent.iter().fold(0u64, |m, &k| m | 1 << k);
                let shared = known & cmask;
                let mut by_shared: HashMap<u64, Vec<(u64, T)>> = HashMap::new();
                for (key, val) in proj {
                    by_shared.entry(key & shared).or_default().push((key, val));
                }
                let mut next = Vec::new();
                for (a, v) in &cur {
                    if let Some(matches) = by_shared.get(&(a & shared)) {
                        if next.len() + matches.len() > max_entries {
                            return Err(too_large(t));
                        }
                        for (b, w) in matches {
                            stats.multiplications += 1;
                            let mut x = v.clone();
                            x *= w;
                            next.push((a | b, x));
                        }
                    }
                }
                cur = next;
                known |= cmask;
                cur = self.settle(cur, known, &mut pending);
            }
            // introduce the remaining bag positions, most constrained first
            let full = if bag.len() == 64 { u64::MAX } else { (1u64 << bag.len()) - 1 };
            while known != full {
                let free = full & !known;
                let pick = (0..bag.len())
                    .filter(|&k| free >> k & 1 == 1)
                    .max_by_key(|&k| pending.iter().filter(|&&(p, q)| (p | q) >> k & 1 == 1).count())
                    .unwrap();
                let bit = 1u64 << pick;
                if cur.len() * 2 > max_entries {
                    return Err(too_large(t));
                }
                let mut next = Vec::with_capacity(cur.len() * 2);
                for (a, v) in cur {
                    next.push((a | bit, v.clone()));
                    next.push((a, v));
                }
                cur = next;
                known |= bit;
                cur = self.settle(cur, known, &mut pending);
            }
            stats.largest_table = stats.largest_table.max(cur.len());
            tables[t] = Some(cur);
        }
        let mut total = T::zero();
        for (_, v) in tables[self.td.root()].take().unwrap() {
            stats.additions += 1;
            total += &v;
        }
        Ok((total, stats))
    }

    /// Drops entries violating a pending clause whose positions are all known.
    fn settle<T: Cell>(&self, cur: Vec<(u64, T)>, known: u64, pending: &mut Vec<(u64, u64)>) -> Vec<(u64, T)> {
        let ready: Vec<(u64, u64)> = pending.iter().copied().filter(|&(p, q)| (p | q) & !known == 0).collect();
        if ready.is_empty() {
            return cur;
        }
        pending.retain(|&(p, q)| (p | q) & !known != 0);
        cur.into_iter().filter(|(a, _)| ready.iter().all(|&(p, q)| satisfied(*a, p, q))).collect()
    }
}

fn scatter(x: usize, positions: &[usize]) -> u64 {
    let mut out = 0u64;
    for (i, &p) in positions.iter().enumerate() {
        out |= ((x as u64 >> i) & 1) << p;
    }
    out
}

fn gather(x: usize, positions: &[usize]) -> usize {
    let mut out = 0;
    for (i, &p) in positions.iter().enumerate() {
        out |= ((x >> p) & 1) << i;
    }
    out
}

/// Turns a decomposition of the incidence graph of a 2CNF into one of its
/// primal graph by merging every clause vertex into one of its variables.
pub fn contract_incidence_td(td: &TreeDecomposition, psi: &CnfFormula) -> Result<TreeDecomposition, CountError> {
    if let Some(j) = psi.clauses().iter().position(|c| c.len() > 2) {
        return Err(CountError::NotTwoCnf(j));
    }
    td.validate(&psi.incidence_graph())?;
    let n = psi.num_vars();
    let target: Vec<Option<usize>> = psi
        .clauses()
        .iter()
        .map(|c| c.lits().first().map(|l| l.var().index()))
        .collect();
    let bags: Vec<Vec<usize>> = td
        .bags()
        .iter()
        .map(|bag| {
            bag.iter()
                .filter_map(|&v| if v < n { Some(v) } else { target[v - n] })
                .collect()
        })
        .collect();
    let parent = (0..td.num_nodes()).map(|t| td.parent(t)).collect();
    let out = TreeDecomposition::new(bags, parent, td.root())?;
    out.validate(&psi.primal_graph())?;
    Ok(out)
}

/// Counts `formula` through the implication reduction: both output formulas are
/// counted by the DP on the constructed output decomposition.
pub fn count_via_reduction(formula: &CnfFormula, ltd: &LabeledTreeDecomposition) -> Result<Count, CountError> {
    let pair = reduction::reduce_impl(formula, ltd)?;
    let c1 = count_treewidth_dp(&pair.psi1, &pair.out_td)?;
    let c2 = count_treewidth_dp(&pair.psi2, &pair.out_td)?;
    let diff = c1 - c2;
    assert!(diff >= Count::zero(), "reduction produced a negative count");
    Ok(diff)
}
