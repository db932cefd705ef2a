//! Formulas in clausal form over dense 1-based variables.
//!
//! A [`CnfFormula`] carries a polarity tag. With [`Polarity::Dnf`] the same
//! clause structure is read as a disjunction of terms, which is how every DNF
//! in this crate arises: as the dual of a CNF.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexKind};

/// Propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Var {
        assert!(index >= 1, "variables are numbered from 1");
        Var(index)
    }

    /// Variable with 0-based position `i`.
    pub fn from_index(i: usize) -> Var {
        Var(u32::try_from(i + 1).expect("variable index overflow"))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// 0-based position, also the vertex id in the primal graph.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Literal in DIMACS encoding: `v` or `-v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        let v = i32::try_from(var.0).expect("variable index overflow");
        Lit(if positive { v } else { -v })
    }

    pub fn from_dimacs(x: i32) -> Lit {
        assert!(x != 0, "0 is not a literal");
        Lit(x)
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negated(self) -> Lit {
        Lit(-self.0)
    }

    /// Truth value under an assignment indexed by 0-based variable position.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var().index()] == self.is_positive()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A clause (or, under DNF polarity, a term). Literals keep their input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Collapses repeated literals. Returns the offending variable for a tautology.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause, Var> {
        let mut out: Vec<Lit> = Vec::new();
        for l in lits {
            if out.contains(&l) {
                continue;
            }
            if out.contains(&l.negated()) {
                return Err(l.var());
            }
            out.push(l);
        }
        Ok(Clause { lits: out })
    }

    /// Binary clause `(a ∨ b)` over distinct variables.
    pub(crate) fn binary(a: Lit, b: Lit) -> Clause {
        debug_assert_ne!(a.var(), b.var());
        Clause { lits: vec![a, b] }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var())
    }

    /// Disjunctive reading.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(assignment))
    }

    fn sorted(&self) -> Vec<Lit> {
        let mut v = self.lits.clone();
        v.sort();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Cnf,
    Dnf,
}

/// Most specific syntactic class a formula belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentTag {
    General,
    Cnf3,
    TwoCnf,
    Horn2,
    Mon2,
    Impl2,
    TwoDnf,
    ZeroOne2Dnf,
    Mon2Dnf,
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FragmentTag::General => "general",
            FragmentTag::Cnf3 => "cnf3",
            FragmentTag::TwoCnf => "two_cnf",
            FragmentTag::Horn2 => "horn2",
            FragmentTag::Mon2 => "mon2",
            FragmentTag::Impl2 => "impl2",
            FragmentTag::TwoDnf => "two_dnf",
            FragmentTag::ZeroOne2Dnf => "zero_one_2dnf",
            FragmentTag::Mon2Dnf => "mon2dnf",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing problem line")]
    MissingHeader,
    #[error("line {line}: malformed problem line `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds declared variable count {num_vars}")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: usize },
    #[error("clause {clause}: tautology on variable {var}")]
    Tautology { clause: usize, var: u32 },
    #[error("clause {clause} is not terminated by 0")]
    TruncatedClause { clause: usize },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

/// Error from building a formula programmatically.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("literal {0} refers to a variable beyond num_vars")]
    OutOfRange(i32),
    #[error("tautological clause on variable {0}")]
    Tautology(u32),
}

/// Clauses over variables `1..=num_vars`, read conjunctively (CNF) or as a
/// disjunction of terms (DNF).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    polarity: Polarity,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
            polarity: Polarity::Cnf,
        }
    }

    /// Builds a CNF from DIMACS-style integer clauses.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i32]]) -> Result<Self, FormulaError> {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.add_clause(c.iter().map(|&x| Lit::from_dimacs(x)))?;
        }
        Ok(f)
    }

    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) -> Result<(), FormulaError> {
        let c = Clause::new(lits).map_err(|v| FormulaError::Tautology(v.get()))?;
        if let Some(l) = c.lits.iter().find(|l| l.var().index() >= self.num_vars) {
            return Err(FormulaError::OutOfRange(l.to_dimacs()));
        }
        self.clauses.push(c);
        Ok(())
    }

    pub(crate) fn push_clause(&mut self, c: Clause) {
        debug_assert!(c.lits.iter().all(|l| l.var().index() < self.num_vars));
        self.clauses.push(c);
    }

    pub(crate) fn from_parts(num_vars: usize, clauses: Vec<Clause>, polarity: Polarity) -> Self {
        debug_assert!(clauses.iter().flat_map(|c| c.lits.iter()).all(|l| l.var().index() < num_vars));
        CnfFormula {
            num_vars,
            clauses,
            polarity,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    /// Copy with the same clauses and a different variable count (must not drop used variables).
    pub fn with_num_vars(&self, num_vars: usize) -> Self {
        assert!(num_vars >= self.max_var_used());
        CnfFormula {
            num_vars,
            ..self.clone()
        }
    }

    fn max_var_used(&self) -> usize {
        self.clauses
            .iter()
            .flat_map(|c| c.lits.iter())
            .map(|l| l.var().get() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Truth value under the formula's polarity.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self.polarity {
            Polarity::Cnf => self.clauses.iter().all(|c| c.satisfied_by(assignment)),
            Polarity::Dnf => self
                .clauses
                .iter()
                .any(|t| t.lits.iter().all(|l| l.eval(assignment))),
        }
    }

    /// Number of clauses each variable occurs in, indexed by 0-based position.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for c in &self.clauses {
            for l in &c.lits {
                occ[l.var().index()] += 1;
            }
        }
        occ
    }

    /// Flips polarity and negates every literal.
    pub fn dualize(&self) -> CnfFormula {
        CnfFormula {
            num_vars: self.num_vars,
            clauses: self
                .clauses
                .iter()
                .map(|c| Clause {
                    lits: c.lits.iter().map(|l| l.negated()).collect(),
                })
                .collect(),
            polarity: match self.polarity {
                Polarity::Cnf => Polarity::Dnf,
                Polarity::Dnf => Polarity::Cnf,
            },
        }
    }

    /// Same clauses, polarity forced to CNF.
    pub fn as_cnf(&self) -> CnfFormula {
        CnfFormula {
            polarity: Polarity::Cnf,
            ..self.clone()
        }
    }

    /// Copy with variable `v` renamed to `v + offset` and `num_vars` raised by `offset`.
    pub fn shifted(&self, offset: usize) -> CnfFormula {
        let off = i32::try_from(offset).expect("offset overflow");
        CnfFormula {
            num_vars: self.num_vars + offset,
            clauses: self
                .clauses
                .iter()
                .map(|c| Clause {
                    lits: c
                        .lits
                        .iter()
                        .map(|l| {
                            let x = l.to_dimacs();
                            Lit(if x > 0 { x + off } else { x - off })
                        })
                        .collect(),
                })
                .collect(),
            polarity: self.polarity,
        }
    }

    /// Equality up to clause order and literal order within clauses.
    pub fn same_up_to_order(&self, other: &CnfFormula) -> bool {
        if self.num_vars != other.num_vars || self.polarity != other.polarity {
            return false;
        }
        let mut a: Vec<Vec<Lit>> = self.clauses.iter().map(Clause::sorted).collect();
        let mut b: Vec<Vec<Lit>> = other.clauses.iter().map(Clause::sorted).collect();
        a.sort();
        b.sort();
        a == b
    }

    /// Vertex `v.index()` per variable, an edge for each co-occurring pair.
    pub fn primal_graph(&self) -> Graph {
        let mut g = Graph::new(self.num_vars);
        for c in &self.clauses {
            for (i, a) in c.lits.iter().enumerate() {
                for b in &c.lits[i + 1..] {
                    g.add_edge(a.var().index(), b.var().index());
                }
            }
        }
        g
    }

    /// Variables are vertices `0..n`, clause `j` is vertex `n + j`.
    pub fn incidence_graph(&self) -> Graph {
        let n = self.num_vars;
        let mut kinds = vec![VertexKind::Variable; n];
        kinds.extend(std::iter::repeat(VertexKind::Clause).take(self.clauses.len()));
        let mut g = Graph::with_kinds(kinds);
        for (j, c) in self.clauses.iter().enumerate() {
            for l in &c.lits {
                g.add_edge(l.var().index(), n + j);
            }
        }
        g
    }

    pub fn classify_fragment(&self) -> FragmentTag {
        match self.polarity {
            Polarity::Cnf => classify_cnf(&self.clauses),
            Polarity::Dnf => {
                let positive_pairs = self
                    .clauses
                    .iter()
                    .all(|t| t.len() == 2 && t.lits.iter().all(|l| l.is_positive()));
                if positive_pairs {
                    return FragmentTag::Mon2Dnf;
                }
                let dual: Vec<Clause> = self
                    .clauses
                    .iter()
                    .map(|t| Clause {
                        lits: t.lits.iter().map(|l| l.negated()).collect(),
                    })
                    .collect();
                match classify_cnf(&dual) {
                    FragmentTag::Mon2 => FragmentTag::Mon2Dnf,
                    FragmentTag::Impl2 => FragmentTag::ZeroOne2Dnf,
                    FragmentTag::Horn2 | FragmentTag::TwoCnf => FragmentTag::TwoDnf,
                    _ => FragmentTag::General,
                }
            }
        }
    }

    pub fn to_dimacs(&self) -> String {
        let kw = match self.polarity {
            Polarity::Cnf => "cnf",
            Polarity::Dnf => "dnf",
        };
        let mut s = format!("p {} {} {}\n", kw, self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in &c.lits {
                s.push_str(&l.to_string());
                s.push(' ');
            }
            s.push_str("0\n");
        }
        s
    }

    /// Parses DIMACS. `p dnf` is accepted as the dual reading of the same layout.
    pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ParseError> {
        let mut header: Option<(usize, usize, Polarity)> = None;
        let mut clauses: Vec<Clause> = Vec::new();
        let mut current: Vec<Lit> = Vec::new();
        let mut open = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let bad = || ParseError::MalformedHeader {
                    line: line_no,
                    text: line.to_string(),
                };
                if header.is_some() || parts.len() != 4 || parts[0] != "p" {
                    return Err(bad());
                }
                let pol = match parts[1] {
                    "cnf" => Polarity::Cnf,
                    "dnf" => Polarity::Dnf,
                    _ => return Err(bad()),
                };
                let n = parts[2].parse::<usize>().map_err(|_| bad())?;
                let m = parts[3].parse::<usize>().map_err(|_| bad())?;
                header = Some((n, m, pol));
                continue;
            }
            let (n, _, _) = header.ok_or(ParseError::MissingHeader)?;
            for tok in line.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| ParseError::InvalidToken {
                    line: line_no,
                    token: tok.to_string(),
                })?;
                if x == 0 {
                    let idx = clauses.len();
                    let c = Clause::new(current.drain(..)).map_err(|v| ParseError::Tautology {
                        clause: idx + 1,
                        var: v.get(),
                    })?;
                    clauses.push(c);
                    open = false;
                } else {
                    if x.unsigned_abs() as usize > n {
                        return Err(ParseError::LiteralOutOfRange {
                            line: line_no,
                            lit: x,
                            num_vars: n,
                        });
                    }
                    current.push(Lit(x as i32));
                    open = true;
                }
            }
        }
        let (n, m, polarity) = header.ok_or(ParseError::MissingHeader)?;
        if open {
            return Err(ParseError::TruncatedClause {
                clause: clauses.len() + 1,
            });
        }
        if clauses.len() != m {
            return Err(ParseError::ClauseCount {
                declared: m,
                found: clauses.len(),
            });
        }
        Ok(CnfFormula {
            num_vars: n,
            clauses,
            polarity,
        })
    }
}

fn classify_cnf(clauses: &[Clause]) -> FragmentTag {
    let all = |p: &dyn Fn(&Clause) -> bool| clauses.iter().all(p);
    let npos = |c: &Clause| c.lits.iter().filter(|l| l.is_positive()).count();
    if all(&|c| c.len() == 2 && npos(c) == 2) {
        FragmentTag::Mon2
    } else if all(&|c| c.len() == 2 && npos(c) == 1) {
        FragmentTag::Impl2
    } else if all(&|c| c.len() <= 2 && !(c.len() == 2 && npos(c) == 0)) {
        FragmentTag::Horn2
    } else if all(&|c| c.len() <= 2) {
        FragmentTag::TwoCnf
    } else if all(&|c| c.len() <= 3) {
        FragmentTag::Cnf3
    } else {
        FragmentTag::General
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "p cnf 3 3\n-1 2 3 0\n1 -2 3 0\n-3 0\n";

    #[test]
    fn parses_the_running_example() {
        let f = CnfFormula::parse_dimacs(EXAMPLE).unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.num_clauses(), 3);
        assert_eq!(f.clauses()[2].lits(), &[Lit::from_dimacs(-3)]);
        assert_eq!(f.to_dimacs(), EXAMPLE);
        assert_eq!(f.classify_fragment(), FragmentTag::Cnf3);
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 -1 0\n"),
            Err(ParseError::Tautology { clause: 1, var: 1 })
        );
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(ParseError::LiteralOutOfRange { lit: 3, .. })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(ParseError::TruncatedClause { clause: 1 })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf x 1\n"),
            Err(ParseError::MalformedHeader { .. })
        ));
        assert_eq!(CnfFormula::parse_dimacs("1 2 0\n"), Err(ParseError::MissingHeader));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 2\n1 2 0\n"),
            Err(ParseError::ClauseCount { declared: 2, found: 1 })
        ));
    }

    #[test]
    fn empty_instance_and_duplicates() {
        let f = CnfFormula::parse_dimacs("c nothing\np cnf 0 0\n").unwrap();
        assert_eq!(f.num_vars(), 0);
        assert_eq!(f.to_dimacs(), "p cnf 0 0\n");
        let g = CnfFormula::parse_dimacs("p cnf 2 1\n1 1 -2 0\n").unwrap();
        assert_eq!(g.clauses()[0].len(), 2);
    }

    #[test]
    fn graphs_of_the_running_example() {
        let f = CnfFormula::parse_dimacs(EXAMPLE).unwrap();
        let p = f.primal_graph();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let i = f.incidence_graph();
        assert_eq!(i.num_vertices(), 6);
        assert_eq!(i.num_edges(), 7);
        assert_eq!(i.kind(5), VertexKind::Clause);
    }

    #[test]
    fn fragments() {
        let f = |cs: &[&[i32]]| CnfFormula::from_dimacs_clauses(4, cs).unwrap();
        assert_eq!(f(&[&[1, 2], &[2, 3]]).classify_fragment(), FragmentTag::Mon2);
        assert_eq!(f(&[&[-1, 2], &[-2, 3]]).classify_fragment(), FragmentTag::Impl2);
        assert_eq!(f(&[&[-1, 2], &[2, 3], &[4]]).classify_fragment(), FragmentTag::Horn2);
        assert_eq!(f(&[&[-1, -2]]).classify_fragment(), FragmentTag::TwoCnf);
        assert_eq!(f(&[&[1, 2, 3, 4]]).classify_fragment(), FragmentTag::General);
        assert_eq!(f(&[&[1, 2]]).dualize().classify_fragment(), FragmentTag::Mon2Dnf);
        assert_eq!(f(&[&[-1, 2]]).dualize().classify_fragment(), FragmentTag::ZeroOne2Dnf);
        assert_eq!(f(&[&[-1, -2]]).dualize().classify_fragment(), FragmentTag::Mon2Dnf);
        assert_eq!(f(&[&[1, 2, 3]]).dualize().classify_fragment(), FragmentTag::General);
    }

    #[test]
    fn dualize_is_an_involution() {
        let f = CnfFormula::parse_dimacs(EXAMPLE).unwrap();
        let d = f.dualize();
        assert_eq!(d.polarity(), Polarity::Dnf);
        assert_eq!(d.dualize(), f);
    }
}
