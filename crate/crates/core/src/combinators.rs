//! Switch gadgets and the pipelines that pack two model counts into one or
//! two oracle calls.
//!
//! Every gadget allocates its fresh variables from a caller-supplied index
//! upward, so the caller decides the layout of the combined formula. Unions
//! of formulas rename the right operand by offsetting its indices by the
//! left operand's `num_vars`; the offsets are kept in the certificate.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::counting::Count;
use crate::formula::{Clause, CnfFormula, FragmentTag, Lit, Polarity, Var};
use crate::reduction::{normalize_3cnf, reduce_cubic_bipartite, reduce_impl, reduce_monotone, ReductionError};
use crate::treedec::{LabelError, LabeledTreeDecomposition, TreeDecomposition};

#[derive(Debug, Error)]
pub enum CombinatorError {
    #[error("variable {0} appears in two operand sets")]
    Overlap(Var),
    #[error("variable {0} is not below the first fresh index")]
    NotFresh(Var),
    #[error("variable {0} is not contained in the enclosing set")]
    NotContained(Var),
    #[error("structural precondition violated: {0}")]
    Structure(String),
    #[error("second operand has all {0} assignments as models, so the low bits overflow")]
    Ambiguous(usize),
    #[error("division by zero during recovery")]
    DivisionByZero,
    #[error("{instr} is not permitted in {class} mode")]
    NotPermitted { instr: Instr, class: CircuitClass },
    #[error("{0} reads a register that was never written")]
    Unset(Instr),
    #[error("recovery expects {expected} counts, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("counts must be non-negative")]
    Negative,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetKind {
    Switch,
    MonSwitch,
    RelSwitch,
    CycSwitch,
    ExtCycSwitch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchGadget {
    pub kind: GadgetKind,
    pub fresh_vars: Vec<Var>,
    pub clauses: Vec<Clause>,
}

impl SwitchGadget {
    /// The gadget alone as a formula over `num_vars` variables.
    pub fn to_formula(&self, num_vars: usize) -> CnfFormula {
        union(num_vars, &[], &self.clauses)
    }

    /// Whether every clause fits the kind's fragment: implications for the
    /// switch family, positive pairs for the monotone ones.
    pub fn respects_fragment(&self) -> bool {
        let positives = |c: &Clause| c.lits().iter().filter(|l| l.is_positive()).count();
        let want = match self.kind {
            GadgetKind::MonSwitch | GadgetKind::RelSwitch => 2,
            _ => 1,
        };
        self.clauses.iter().all(|c| c.len() == 2 && positives(c) == want)
    }
}

fn imp(a: Var, b: Var) -> Clause {
    Clause::new([a.neg(), b.pos()]).expect("distinct variables")
}

fn or(a: Var, b: Var) -> Clause {
    Clause::new([a.pos(), b.pos()]).expect("distinct variables")
}

fn vars_below(n: usize) -> Vec<Var> {
    (0..n).map(Var::from_index).collect()
}

fn range(from: usize, len: usize) -> Vec<Var> {
    (from..from + len).map(Var::from_index).collect()
}

fn union(num_vars: usize, parts: &[&CnfFormula], extra: &[Clause]) -> CnfFormula {
    let mut f = CnfFormula::new(num_vars);
    for c in parts.iter().flat_map(|p| p.clauses()).chain(extra) {
        f.add_clause(c.lits().iter().copied()).expect("parts fit the variable range");
    }
    f
}

fn check_fresh(sets: &[&[Var]], first_fresh: usize) -> Result<(), CombinatorError> {
    let mut seen = BTreeSet::new();
    for v in sets.iter().flat_map(|s| s.iter()) {
        if v.index() >= first_fresh {
            return Err(CombinatorError::NotFresh(*v));
        }
        if !seen.insert(*v) {
            return Err(CombinatorError::Overlap(*v));
        }
    }
    Ok(())
}

/// `{s → v | v ∈ V1} ∪ {v′ → s | v′ ∈ V2}` with `s` at index `first_fresh`.
/// Setting `s` forces `V1` true, clearing it forces `V2` false.
pub fn switch(v1: &[Var], v2: &[Var], first_fresh: usize) -> Result<SwitchGadget, CombinatorError> {
    check_fresh(&[v1, v2], first_fresh)?;
    Ok(switch_unchecked(v1, v2, Var::from_index(first_fresh)))
}

fn switch_unchecked(v1: &[Var], v2: &[Var], s: Var) -> SwitchGadget {
    let mut clauses: Vec<Clause> = v1.iter().map(|&v| imp(s, v)).collect();
    clauses.extend(v2.iter().map(|&v| imp(v, s)));
    SwitchGadget {
        kind: GadgetKind::Switch,
        fresh_vars: vec![s],
        clauses,
    }
}

/// `s_ι ∨ v` for `v ∈ κ ∖ ι` and `s_τ ∨ v` for `v ∈ κ ∖ τ`, with the selectors
/// at `first_fresh` and `first_fresh + 1`.
pub fn monswitch(iota: &[Var], tau: &[Var], kappa: &[Var], first_fresh: usize) -> Result<SwitchGadget, CombinatorError> {
    check_fresh(&[kappa], first_fresh)?;
    let k: BTreeSet<Var> = kappa.iter().copied().collect();
    let i: BTreeSet<Var> = iota.iter().copied().collect();
    let t: BTreeSet<Var> = tau.iter().copied().collect();
    if let Some(v) = i.iter().chain(&t).find(|v| !k.contains(v)) {
        return Err(CombinatorError::NotContained(*v));
    }
    let (si, st) = (Var::from_index(first_fresh), Var::from_index(first_fresh + 1));
    let mut clauses: Vec<Clause> = k.difference(&i).map(|&v| or(si, v)).collect();
    clauses.extend(k.difference(&t).map(|&v| or(st, v)));
    Ok(SwitchGadget {
        kind: GadgetKind::MonSwitch,
        fresh_vars: vec![si, st],
        clauses,
    })
}

/// `{s ∨ b | b ∈ B} ∪ {s ∨ v | v ∈ V}` with `s` at `first_fresh`.
pub fn relswitch(b: &[Var], v: &[Var], first_fresh: usize) -> Result<SwitchGadget, CombinatorError> {
    check_fresh(&[b, v], first_fresh)?;
    let s = Var::from_index(first_fresh);
    Ok(SwitchGadget {
        kind: GadgetKind::RelSwitch,
        fresh_vars: vec![s],
        clauses: b.iter().chain(v).map(|&x| or(s, x)).collect(),
    })
}

fn check_cubic_implications(f: &CnfFormula, name: &str) -> Result<Vec<bool>, CombinatorError> {
    let bad = |msg: String| Err(CombinatorError::Structure(format!("{}: {}", name, msg)));
    if f.polarity() != Polarity::Cnf {
        return bad("not a CNF".into());
    }
    for (j, c) in f.clauses().iter().enumerate() {
        if c.len() != 2 || c.lits().iter().filter(|l| l.is_positive()).count() != 1 {
            return bad(format!("clause {} is not an implication", j + 1));
        }
    }
    if let Some(i) = f.occurrences().iter().position(|&k| k > 3) {
        return bad(format!("variable {} occurs more than three times", i + 1));
    }
    f.primal_graph()
        .two_coloring()
        .or_else(|(u, v)| bad(format!("odd cycle through {} {}", u + 1, v + 1)))
}

/// Output of [`cycswitch`] and [`extcycswitch`]: both operands in one variable
/// space (`phi1` first, `phi2` shifted behind it), the gadget after them.
#[derive(Debug, Clone)]
pub struct CycSwitched {
    pub phi1: CnfFormula,
    pub phi2: CnfFormula,
    pub gadget: SwitchGadget,
    pub bits: Vec<Var>,
    pub num_vars: usize,
}

impl CycSwitched {
    pub fn combined(&self) -> CnfFormula {
        union(self.num_vars, &[&self.phi1, &self.phi2], &self.gadget.clauses)
    }
}

/// Degree- and bipartiteness-preserving switch between two implication
/// formulas. The combined formula counts `#φ1 + #φ2`.
pub fn cycswitch(phi1: &CnfFormula, phi2: &CnfFormula) -> Result<CycSwitched, CombinatorError> {
    let m = phi1.num_vars().max(phi2.num_vars()).max(1);
    cyc(phi1, phi2, m, 0, GadgetKind::CycSwitch)
}

/// [`cycswitch`] plus `bits` free bits that are only free while `φ1` varies,
/// so the combined formula counts `#φ2 + 2^bits · #φ1`. The cycle has
/// `4 · max(n1, n2, bits)` switch variables.
pub fn extcycswitch(bits: usize, phi1: &CnfFormula, phi2: &CnfFormula) -> Result<CycSwitched, CombinatorError> {
    let m = phi1.num_vars().max(phi2.num_vars()).max(bits).max(1);
    cyc(phi1, phi2, m, bits, GadgetKind::ExtCycSwitch)
}

fn cyc(phi1: &CnfFormula, phi2: &CnfFormula, m: usize, bits: usize, kind: GadgetKind) -> Result<CycSwitched, CombinatorError> {
    let colors = [check_cubic_implications(phi1, "first operand")?, check_cubic_implications(phi2, "second operand")?];
    let (n1, n2) = (phi1.num_vars(), phi2.num_vars());
    let base = n1 + n2;
    // s_i^e at base + 2i, s_i^o at base + 2i + 1
    let cycle = range(base, 4 * m);
    let mut next = base + 4 * m;
    let mut fresh = cycle.clone();
    let mut gadget: Vec<Clause> = (0..4 * m).map(|k| imp(cycle[k], cycle[(k + 1) % (4 * m)])).collect();
    let mut used = vec![false; 4 * m];
    let mut parts = Vec::new();
    for (side, (phi, offset)) in [(phi1, 0), (phi2, n1)].into_iter().enumerate() {
        let mut cur: Vec<Clause> = phi.shifted(offset).clauses().to_vec();
        let mut moved = vec![false; cur.len()];
        let occ = phi.occurrences();
        for i in 0..phi.num_vars() {
            let u = Var::from_index(offset + i);
            let mut attach = u;
            let mut color = colors[side][i];
            if occ[i] == 3 {
                let sites: Vec<(usize, bool)> = cur
                    .iter()
                    .enumerate()
                    .filter_map(|(j, c)| c.lits().iter().find(|l| l.var() == u).map(|l| (j, l.is_positive())))
                    .collect();
                let sign = sites.iter().filter(|s| s.1).count() >= 2;
                let pair: Vec<usize> = sites.iter().filter(|s| s.1 == sign).map(|s| s.0).take(2).collect();
                let copies = range(next, 5);
                next += 5;
                fresh.extend(&copies);
                let ring = [u, copies[0], copies[1], copies[2], copies[3], copies[4]];
                for k in 0..6 {
                    gadget.push(imp(ring[k], ring[(k + 1) % 6]));
                }
                for (&j, target) in pair.iter().zip([copies[1], copies[3]]) {
                    // in place, a clause can be rewired at both ends
                    moved[j] = true;
                    let lits: Vec<_> = cur[j]
                        .lits()
                        .iter()
                        .map(|&l| if l.var() == u { Lit::new(target, l.is_positive()) } else { l })
                        .collect();
                    cur[j] = Clause::new(lits).expect("distinct variables");
                }
                attach = copies[0];
                color = !color;
            }
            // opposite letter keeps the combined graph 2-colored
            let k = 2 * (side * m + i) + usize::from(color);
            used[k] = true;
            gadget.push(if side == 0 { imp(cycle[k], attach) } else { imp(attach, cycle[k]) });
        }
        let (rewired, kept): (Vec<_>, Vec<_>) = cur.into_iter().zip(moved).partition(|(_, mv)| *mv);
        gadget.extend(rewired.into_iter().map(|(c, _)| c));
        parts.push(kept.into_iter().map(|(c, _)| c).collect::<Vec<Clause>>());
    }
    let bit_vars = range(next, bits);
    next += bits;
    fresh.extend(&bit_vars);
    for &b in &bit_vars {
        let k = used.iter().position(|u| !u).ok_or_else(|| CombinatorError::Structure("no free cycle position for a bit".into()))?;
        used[k] = true;
        gadget.push(imp(cycle[k], b));
    }
    let mut out = parts.iter().map(|kept| union(next, &[], kept));
    let (p1, p2) = (out.next().unwrap(), out.next().unwrap());
    Ok(CycSwitched {
        phi1: p1,
        phi2: p2,
        gadget: SwitchGadget {
            kind,
            fresh_vars: fresh,
            clauses: gadget,
        },
        bits: bit_vars,
        num_vars: next,
    })
}

/// Min-degree decomposition of the primal graph, labeled for the reduction.
fn guided(f: &CnfFormula, fully: bool) -> Result<LabeledTreeDecomposition, CombinatorError> {
    let td = TreeDecomposition::min_degree(&f.primal_graph());
    Ok(LabeledTreeDecomposition::label(&td, f, fully)?)
}

fn impl_pair(f: &CnfFormula) -> Result<(CnfFormula, CnfFormula), CombinatorError> {
    let pair = reduce_impl(f, &guided(f, false)?)?;
    Ok((pair.psi1, pair.psi2))
}

fn cubic_pair(f: &CnfFormula) -> Result<(CnfFormula, CnfFormula), CombinatorError> {
    let (g, ltd) = normalize_3cnf(f, &guided(f, false)?)?;
    let pair = reduce_cubic_bipartite(&g, &ltd)?;
    Ok((pair.psi1, pair.psi2))
}

fn mon_pair(f: &CnfFormula) -> Result<(CnfFormula, CnfFormula), CombinatorError> {
    let pair = reduce_monotone(f, &guided(f, true)?)?;
    Ok((pair.psi1, pair.psi2))
}

/// `a ∪ b′ ∪ switch(vars(a), vars(b′))` where `b′` is `b` shifted behind `a`.
fn switched_sum(a: &CnfFormula, b: &CnfFormula) -> CnfFormula {
    let (na, nb) = (a.num_vars(), b.num_vars());
    let g = switch_unchecked(&vars_below(na), &range(na, nb), Var::from_index(na + nb));
    union(na + nb + 1, &[a, &b.shifted(na)], &g.clauses)
}

/// Two implication formulas `(α′, β′)` with `#α′ − #β′ = #φ − #φ′`.
pub fn gapp_impl_two_call(phi: &CnfFormula, phi_prime: &CnfFormula) -> Result<(CnfFormula, CnfFormula), CombinatorError> {
    let (p1, p2) = impl_pair(phi)?;
    let (q1, q2) = impl_pair(phi_prime)?;
    Ok((switched_sum(&p1, &q2), switched_sum(&p2, &q1)))
}

/// Like [`gapp_impl_two_call`], built from the cubic bipartite reduction and
/// [`cycswitch`], so both outputs keep degree at most 3 and a bipartite primal graph.
pub fn gapp_impl_two_call_cubic(phi: &CnfFormula, phi_prime: &CnfFormula) -> Result<(CnfFormula, CnfFormula), CombinatorError> {
    let (p1, p2) = cubic_pair(phi)?;
    let (q1, q2) = cubic_pair(phi_prime)?;
    Ok((cycswitch(&p1, &q2)?.combined(), cycswitch(&p2, &q1)?.combined()))
}

/// Two monotone formulas `(α, α′)` with `#α − #α′ = #φ − #φ′`.
pub fn gapp_mon_two_call(phi: &CnfFormula, phi_prime: &CnfFormula) -> Result<(CnfFormula, CnfFormula), CombinatorError> {
    let (p1, p2) = mon_pair(phi)?;
    let (q1, q2) = mon_pair(phi_prime)?;
    // β = ψ1 ∪ ψ2 ∪ ψ′1 ∪ ψ′2, side by side
    let parts = [&p1, &p2, &q1, &q2];
    let mut offsets = Vec::new();
    let mut n = 0;
    for p in parts {
        offsets.push(n);
        n += p.num_vars();
    }
    let shifted: Vec<CnfFormula> = parts.iter().zip(&offsets).map(|(p, &o)| p.shifted(o).with_num_vars(n)).collect();
    let beta = union(n, &shifted.iter().collect::<Vec<_>>(), &[]);
    let block = |k: usize| range(offsets[k], parts[k].num_vars());
    let all = vars_below(n);
    let a = monswitch(&block(0), &block(3), &all, n)?;
    let b = monswitch(&block(1), &block(2), &all, n)?;
    Ok((union(n + 2, &[&beta], &a.clauses), union(n + 2, &[&beta], &b.clauses)))
}

/// Pads two implication formulas to the same variable count `N` so that
/// `(2^N − #¬α′) − (2^N − #¬β′) = #ψ − #ψ′`, where `¬` is the dual DNF.
/// Outputs are in input order.
pub fn dnf_pad_two_call(psi: &CnfFormula, psi_prime: &CnfFormula) -> Result<(CnfFormula, CnfFormula, usize, usize), CombinatorError> {
    for (f, name) in [(psi, "first operand"), (psi_prime, "second operand")] {
        let implications = f.num_clauses() == 0 || f.classify_fragment() == FragmentTag::Impl2;
        if f.polarity() != Polarity::Cnf || !implications {
            return Err(CombinatorError::Structure(format!("{} is not an implication formula", name)));
        }
    }
    let target = psi.num_vars().max(psi_prime.num_vars());
    // fresh V is tied to s in both directions, so each side gains exactly one model
    let pad = |f: &CnfFormula| {
        let n = f.num_vars();
        let v = range(n, target - n);
        let s = Var::from_index(target);
        let mut g = switch_unchecked(&vars_below(target), &[], s).clauses;
        g.extend(v.iter().map(|&x| imp(x, s)));
        union(target + 1, &[f], &g)
    };
    Ok((pad(psi), pad(psi_prime), target + 1, target + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    GappImplTwoCall,
    GappMonTwoCall,
    DnfPadTwoCall,
    SingleMon,
    SingleImpl,
}

impl fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PipelineMode::GappImplTwoCall => "gapp_impl_two_call",
            PipelineMode::GappMonTwoCall => "gapp_mon_two_call",
            PipelineMode::DnfPadTwoCall => "dnf_pad_two_call",
            PipelineMode::SingleMon => "single_mon",
            PipelineMode::SingleImpl => "single_impl",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CircuitClass {
    /// Masks, shifts and subtraction.
    AC0,
    /// Additionally integer division.
    TC0,
}

impl fmt::Display for CircuitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CircuitClass::AC0 => "AC0",
            CircuitClass::TC0 => "TC0",
        })
    }
}

/// One step of a recovery program. The machine has the input count and two
/// registers, `low` and `high`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "op", rename_all = "UPPERCASE")]
pub enum Instr {
    /// `low = input & (2^m − 1)`
    Mask { m: u32 },
    /// `high = input >> m`
    Shr { m: u32 },
    /// `high = high / low`
    Div,
    /// `result = high − low`
    Sub,
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Mask { m } => write!(f, "MASK {}", m),
            Instr::Shr { m } => write!(f, "SHR {}", m),
            Instr::Div => f.write_str("DIV"),
            Instr::Sub => f.write_str("SUB"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecoveryProgram {
    pub class: CircuitClass,
    pub instrs: Vec<Instr>,
}

/// Result of a recovery: `first = high`, `second = low`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovered {
    pub first: Count,
    pub second: Count,
    pub difference: Option<Count>,
}

/// Runs `program` on `count`. Division is rejected in AC0 mode.
pub fn restricted_eval(program: &RecoveryProgram, count: &Count) -> Result<Recovered, CombinatorError> {
    if count.is_negative() {
        return Err(CombinatorError::Negative);
    }
    let (mut low, mut high, mut result): (Option<Count>, Option<Count>, Option<Count>) = (None, None, None);
    for &instr in &program.instrs {
        match instr {
            Instr::Mask { m } => low = Some(count & ((BigInt::one() << m) - 1)),
            Instr::Shr { m } => high = Some(count >> m),
            Instr::Div => {
                if program.class == CircuitClass::AC0 {
                    return Err(CombinatorError::NotPermitted {
                        instr,
                        class: program.class,
                    });
                }
                let (Some(h), Some(l)) = (&high, &low) else {
                    return Err(CombinatorError::Unset(instr));
                };
                if l.is_zero() {
                    return Err(CombinatorError::DivisionByZero);
                }
                high = Some(h / l);
            }
            Instr::Sub => {
                let (Some(h), Some(l)) = (&high, &low) else {
                    return Err(CombinatorError::Unset(instr));
                };
                result = Some(h - l);
            }
        }
    }
    match (high, low) {
        (Some(first), Some(second)) => Ok(Recovered {
            first,
            second,
            difference: result,
        }),
        _ => Err(CombinatorError::Unset(Instr::Sub)),
    }
}

/// What to hand to the counting oracle and how to turn the answers back into
/// the difference of the two operand counts.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineCertificate {
    pub mode: PipelineMode,
    /// Oracle inputs. The DNF padding mode stores the dual DNFs.
    #[serde(skip)]
    pub formulas: Vec<CnfFormula>,
    /// Where each formula is written, filled in by whoever writes them.
    pub formula_files: Vec<String>,
    /// Index offset applied to the second operand.
    pub offsets: Vec<usize>,
    pub m: Option<u32>,
    /// Variable counts for the complement arithmetic of the DNF mode.
    pub dnf_vars: Option<(usize, usize)>,
    pub recovery: Option<RecoveryProgram>,
}

impl PipelineCertificate {
    /// Certificate for a two-call mode from its two outputs.
    pub fn two_call(mode: PipelineMode, first: CnfFormula, second: CnfFormula) -> Self {
        let dnf = mode == PipelineMode::DnfPadTwoCall;
        let dnf_vars = dnf.then(|| (first.num_vars(), second.num_vars()));
        let (first, second) = if dnf { (first.dualize(), second.dualize()) } else { (first, second) };
        PipelineCertificate {
            mode,
            formulas: vec![first, second],
            formula_files: Vec::new(),
            offsets: Vec::new(),
            m: None,
            dnf_vars,
            recovery: None,
        }
    }

    /// Difference of the operand counts from the oracle answers, one per formula.
    pub fn recover(&self, counts: &[Count]) -> Result<Recovered, CombinatorError> {
        if counts.len() != self.formulas.len() {
            return Err(CombinatorError::Arity {
                expected: self.formulas.len(),
                got: counts.len(),
            });
        }
        if let Some(p) = &self.recovery {
            return restricted_eval(p, &counts[0]);
        }
        let (a, b) = match self.dnf_vars {
            Some((na, nb)) => ((BigInt::one() << na) - &counts[0], (BigInt::one() << nb) - &counts[1]),
            None => (counts[0].clone(), counts[1].clone()),
        };
        Ok(Recovered {
            difference: Some(&a - &b),
            first: a,
            second: b,
        })
    }
}

fn check_mon(f: &CnfFormula, name: &str) -> Result<(), CombinatorError> {
    let ok = f.polarity() == Polarity::Cnf && f.clauses().iter().all(|c| c.len() == 2 && c.lits().iter().all(|l| l.is_positive()));
    if ok {
        Ok(())
    } else {
        Err(CombinatorError::Structure(format!("{} is not a monotone 2CNF", name)))
    }
}

/// One monotone formula `α` with `#α = #φ2 + #φ1 · #φ2 · 2^m`, `m = n1 + n2 + 1`.
pub fn single_call_mon(phi1: &CnfFormula, phi2: &CnfFormula) -> Result<PipelineCertificate, CombinatorError> {
    check_mon(phi1, "first operand")?;
    check_mon(phi2, "second operand")?;
    let (n1, n2) = (phi1.num_vars(), phi2.num_vars());
    let m = n1 + n2 + 1;
    let bits = range(n1 + n2, m);
    let g = relswitch(&bits, &vars_below(n1), n1 + n2 + m)?;
    let alpha = union(n1 + n2 + m + 1, &[phi1, &phi2.shifted(n1)], &g.clauses);
    let m = m as u32;
    Ok(PipelineCertificate {
        mode: PipelineMode::SingleMon,
        formulas: vec![alpha],
        formula_files: Vec::new(),
        offsets: vec![0, n1],
        m: Some(m),
        dnf_vars: None,
        recovery: Some(RecoveryProgram {
            class: CircuitClass::TC0,
            instrs: vec![Instr::Mask { m }, Instr::Shr { m }, Instr::Div, Instr::Sub],
        }),
    })
}

/// One implication formula `α` with `#α = #φ2 + 2^m · #φ1`, `m = max(n1, n2)`.
/// Degree at most 3 and bipartiteness of the operands carry over.
///
/// Fails when `φ2` has no clauses and `n2 = m`, since then `#φ2 = 2^m` does
/// not fit in the low bits.
pub fn single_call_impl(phi1: &CnfFormula, phi2: &CnfFormula) -> Result<PipelineCertificate, CombinatorError> {
    let m = phi1.num_vars().max(phi2.num_vars());
    if phi2.num_clauses() == 0 && phi2.num_vars() == m {
        return Err(CombinatorError::Ambiguous(m));
    }
    let sw = extcycswitch(m, phi1, phi2)?;
    let m = m as u32;
    Ok(PipelineCertificate {
        mode: PipelineMode::SingleImpl,
        formulas: vec![sw.combined()],
        formula_files: Vec::new(),
        offsets: vec![0, phi1.num_vars()],
        m: Some(m),
        dnf_vars: None,
        recovery: Some(RecoveryProgram {
            class: CircuitClass::AC0,
            instrs: vec![Instr::Mask { m }, Instr::Shr { m }, Instr::Sub],
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{count_bruteforce, count_dp_auto};
    use crate::verification::{audit_structure, StructureRequirements};

    fn f(n: usize, cl: &[&[i32]]) -> CnfFormula {
        CnfFormula::from_dimacs_clauses(n, cl).unwrap()
    }

    fn count(g: &CnfFormula) -> Count {
        count_dp_auto(g).unwrap()
    }

    fn v(i: usize) -> Var {
        Var::from_index(i)
    }

    fn cubic_ok(g: &CnfFormula) {
        let req = StructureRequirements {
            fragment: Some(FragmentTag::Impl2),
            max_occurrence: Some(3),
            bipartite: true,
        };
        let rep = audit_structure(g, &req);
        assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn switch_alone() {
        let g = switch(&[v(0)], &[v(1)], 2).unwrap();
        assert_eq!(g.clauses, vec![imp(v(2), v(0)), imp(v(1), v(2))]);
        assert!(g.respects_fragment());
        assert_eq!(count_bruteforce(&g.to_formula(3)).unwrap(), Count::from(4));
        assert_eq!(count_bruteforce(&switch(&[], &[], 0).unwrap().to_formula(1)).unwrap(), Count::from(2));
        assert!(matches!(switch(&[v(0)], &[v(0)], 1), Err(CombinatorError::Overlap(_))));
        assert!(matches!(switch(&[v(3)], &[], 1), Err(CombinatorError::NotFresh(_))));
    }

    #[test]
    fn relswitch_alone() {
        let g = relswitch(&[v(0)], &[v(1)], 2).unwrap();
        assert_eq!(g.clauses.len(), 2);
        assert!(g.respects_fragment());
        assert_eq!(count_bruteforce(&g.to_formula(3)).unwrap(), Count::from(5));
        assert_eq!(count_bruteforce(&relswitch(&[], &[], 0).unwrap().to_formula(1)).unwrap(), Count::from(2));
    }

    #[test]
    fn monswitch_splits_into_four_cases() {
        // ι = {1 ∨ 2} on 1,2; τ = {3 ∨ 4} on 3,4; κ = ι ∪ τ ∪ {(2 ∨ 3)}
        let kappa = f(4, &[&[1, 2], &[3, 4], &[2, 3]]);
        let g = monswitch(&[v(0), v(1)], &[v(2), v(3)], &vars_below(4), 4).unwrap();
        assert!(g.respects_fragment());
        let alpha = union(6, &[&kappa], &g.clauses);
        let (ci, ct, ck) = (3, 3, count(&kappa));
        assert_eq!(count(&alpha), Count::from(ci + ct + 1) + ck);
        // ι = τ = κ leaves both selectors free
        let one = f(1, &[&[1, 1]]);
        let g = monswitch(&[v(0)], &[v(0)], &[v(0)], 1).unwrap();
        assert!(g.clauses.is_empty());
        assert_eq!(count(&union(3, &[&one], &g.clauses)), Count::from(4));
        assert!(matches!(monswitch(&[v(1)], &[], &[v(0)], 2), Err(CombinatorError::NotContained(_))));
    }

    #[test]
    fn cycswitch_adds_counts_and_keeps_structure() {
        let a = f(2, &[&[-1, 2]]);
        let b = f(2, &[&[-2, 1]]);
        let sw = cycswitch(&a, &b).unwrap();
        assert!(sw.gadget.respects_fragment());
        cubic_ok(&sw.combined());
        assert_eq!(count(&sw.combined()), Count::from(6));
        // degree-3 variable 2 with two incoming implications
        let c = f(4, &[&[-1, 2], &[-3, 2], &[-2, 4]]);
        let sw = cycswitch(&c, &a).unwrap();
        cubic_ok(&sw.combined());
        assert_eq!(count(&sw.combined()), count(&c) + 3);
        let sw = cycswitch(&a, &CnfFormula::new(0)).unwrap();
        assert_eq!(count(&sw.combined()), Count::from(4));
        assert!(cycswitch(&f(3, &[&[-1, 2], &[-2, 3], &[-3, 1]]), &a).is_err());
    }

    #[test]
    fn extcycswitch_scales_the_first_operand() {
        let a = f(4, &[&[-1, 2], &[-2, 3], &[-3, 4], &[-4, 1]]);
        let b = f(2, &[&[-1, 2]]);
        let sw = extcycswitch(4, &a, &b).unwrap();
        cubic_ok(&sw.combined());
        assert_eq!(count(&sw.combined()), Count::from(3 + 16 * 2));
    }

    #[test]
    fn restricted_programs() {
        let tc0 = RecoveryProgram {
            class: CircuitClass::TC0,
            instrs: vec![Instr::Mask { m: 5 }, Instr::Shr { m: 5 }, Instr::Div, Instr::Sub],
        };
        let r = restricted_eval(&tc0, &Count::from(291)).unwrap();
        assert_eq!((r.first, r.second, r.difference), (Count::from(3), Count::from(3), Some(Count::from(0))));
        let ac0 = RecoveryProgram {
            class: CircuitClass::AC0,
            instrs: vec![Instr::Mask { m: 4 }, Instr::Shr { m: 4 }, Instr::Sub],
        };
        let r = restricted_eval(&ac0, &Count::from(35)).unwrap();
        assert_eq!((r.first, r.second, r.difference), (Count::from(2), Count::from(3), Some(Count::from(-1))));
        let bad = RecoveryProgram {
            class: CircuitClass::AC0,
            instrs: tc0.instrs.clone(),
        };
        assert!(matches!(restricted_eval(&bad, &Count::from(291)), Err(CombinatorError::NotPermitted { .. })));
        assert!(matches!(restricted_eval(&tc0, &Count::from(64)), Err(CombinatorError::DivisionByZero)));
        let json = serde_json::to_string(&tc0).unwrap();
        assert!(json.contains(r#"{"op":"MASK","m":5}"#), "{}", json);
    }

    #[test]
    fn single_call_mon_examples() {
        let c = single_call_mon(&f(2, &[&[1, 2]]), &f(2, &[&[1, 2]])).unwrap();
        assert_eq!(c.m, Some(5));
        let n = count_bruteforce(&c.formulas[0]).unwrap();
        assert_eq!(n, Count::from(291));
        let r = c.recover(&[n]).unwrap();
        assert_eq!((r.first, r.second), (Count::from(3), Count::from(3)));
        let c = single_call_mon(&CnfFormula::new(1), &CnfFormula::new(1)).unwrap();
        assert_eq!(c.m, Some(3));
        let n = count_bruteforce(&c.formulas[0]).unwrap();
        assert_eq!(n, Count::from(34));
        assert_eq!(c.recover(&[n]).unwrap().difference, Some(Count::zero()));
    }

    #[test]
    fn single_call_impl_example() {
        let a = f(4, &[&[-1, 2], &[-2, 3], &[-3, 4], &[-4, 1]]);
        let b = f(2, &[&[-1, 2]]);
        let c = single_call_impl(&a, &b).unwrap();
        assert_eq!(c.m, Some(4));
        cubic_ok(&c.formulas[0]);
        let n = count_dp_auto(&c.formulas[0]).unwrap();
        assert_eq!(n, Count::from(35));
        let r = c.recover(&[n]).unwrap();
        assert_eq!((r.first, r.second), (Count::from(2), Count::from(3)));
        assert!(matches!(single_call_impl(&b, &CnfFormula::new(2)), Err(CombinatorError::Ambiguous(2))));
    }

    #[test]
    fn two_call_examples() {
        let phi = f(3, &[&[-1, 2, 3], &[1, -2, 3], &[-3]]);
        let (a, b) = gapp_impl_two_call(&phi, &f(1, &[&[1]])).unwrap();
        assert_eq!(a.classify_fragment(), FragmentTag::Impl2);
        assert_eq!(count(&a) - count(&b), Count::from(1));
        let (a, b) = gapp_impl_two_call(&phi, &phi).unwrap();
        assert_eq!(count(&a) - count(&b), Count::from(0));
        let (a, b) = gapp_mon_two_call(&phi, &f(1, &[&[1], &[-1]])).unwrap();
        assert_eq!(a.classify_fragment(), FragmentTag::Mon2);
        assert_eq!(count(&a) - count(&b), Count::from(2));
        let (a, b) = gapp_impl_two_call_cubic(&f(2, &[&[1, -2]]), &f(1, &[&[1]])).unwrap();
        cubic_ok(&a);
        cubic_ok(&b);
        assert_eq!(count(&a) - count(&b), Count::from(2));
    }

    #[test]
    fn dnf_padding_identity() {
        let psi = f(2, &[&[-1, 2]]);
        let psi2 = f(3, &[&[-1, 2], &[-2, 3]]);
        let (a, b, na, nb) = dnf_pad_two_call(&psi, &psi2).unwrap();
        assert_eq!((na, nb), (4, 4));
        let cert = PipelineCertificate::two_call(PipelineMode::DnfPadTwoCall, a, b);
        assert_eq!(cert.formulas[0].classify_fragment(), FragmentTag::ZeroOne2Dnf);
        let counts: Vec<Count> = cert.formulas.iter().map(|g| count_bruteforce(g).unwrap()).collect();
        assert_eq!(cert.recover(&counts).unwrap().difference, Some(Count::from(3 - 4)));
    }
}
