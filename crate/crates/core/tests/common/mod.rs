#![allow(dead_code)]

use gapcnf::{CnfFormula, LabeledTreeDecomposition, Lit, TreeDecomposition, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` clauses over `n` variables, each with 1..=max_len distinct variables.
pub fn random_cnf(rng: &mut ChaCha8Rng, n: usize, m: usize, max_len: usize) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    if n == 0 {
        return f;
    }
    let mut vars: Vec<usize> = (0..n).collect();
    for _ in 0..m {
        let len = rng.gen_range(1..=max_len.min(n));
        vars.shuffle(rng);
        let lits: Vec<Lit> = vars[..len]
            .iter()
            .map(|&i| Lit::new(Var::from_index(i), rng.gen_bool(0.5)))
            .collect();
        f.add_clause(lits).unwrap();
    }
    f
}

/// Decomposition from a random elimination order of the primal graph.
pub fn random_td(rng: &mut ChaCha8Rng, f: &CnfFormula) -> TreeDecomposition {
    let g = f.primal_graph();
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    order.shuffle(rng);
    TreeDecomposition::from_elimination_order(&g, &order)
}

pub fn random_ltd(rng: &mut ChaCha8Rng, f: &CnfFormula, fully: bool) -> LabeledTreeDecomposition {
    LabeledTreeDecomposition::label(&random_td(rng, f), f, fully).unwrap()
}

pub fn trivial_ltd(f: &CnfFormula, fully: bool) -> LabeledTreeDecomposition {
    LabeledTreeDecomposition::label(&TreeDecomposition::trivial(f), f, fully).unwrap()
}
