//! `gapcnf` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage, parse or precondition error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use gapcnf::combinators::{
    dnf_pad_two_call, gapp_impl_two_call, gapp_impl_two_call_cubic, gapp_mon_two_call, single_call_impl, single_call_mon,
    PipelineCertificate, PipelineMode,
};
use gapcnf::counting::{count_bruteforce_limit, count_treewidth_dp_stats, count_via_reduction, Count};
use gapcnf::reduction::{normalize_3cnf, reduce_cubic_bipartite, reduce_impl, reduce_monotone, ReductionPair, Variant};
use gapcnf::verification::{audit_structure, audit_width, check_bijection, StructureRequirements, DEFAULT_PROBE_BUDGET};
use gapcnf::{CnfFormula, FragmentTag, LabeledTreeDecomposition, Lit, Var, TreeDecomposition};

#[derive(Parser)]
#[command(name = "gapcnf", version, about = "Reduce #SAT to differences of 2CNF counts and check the result")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a CNF to a pair of 2CNFs; writes psi1.cnf, psi2.cnf, aux.map and out.td.
    Reduce {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Impl)]
        variant: VariantArg,
        /// PACE decomposition of the primal graph; one bag per variable set when omitted.
        #[arg(long)]
        td: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also count both outputs with the decomposition DP.
        #[arg(long)]
        count: bool,
        #[arg(long)]
        json: bool,
    },
    /// Count models.
    Count {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Dp)]
        method: MethodArg,
        /// Decomposition for `dp` and `reduction`; min-degree when omitted.
        #[arg(long)]
        td: Option<PathBuf>,
        /// Variable cap for `brute`.
        #[arg(long, default_value_t = 30)]
        limit: usize,
        #[arg(long)]
        json: bool,
    },
    /// Combine formulas for one or two oracle calls; writes call*.cnf and certificate.json.
    Combine {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        /// With `gapp-impl`, build from the cubic bipartite reduction.
        #[arg(long)]
        cubic: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Count the calls and run the recovery.
        #[arg(long)]
        execute: bool,
        #[arg(long)]
        json: bool,
    },
    /// Reduce, then run the bijection, structure and width audits.
    Verify {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Impl)]
        variant: VariantArg,
        #[arg(long)]
        td: Option<PathBuf>,
        /// Replace the second output by this file before checking.
        #[arg(long)]
        psi2: Option<PathBuf>,
        /// Model enumeration budget per formula.
        #[arg(long, default_value_t = DEFAULT_PROBE_BUDGET)]
        limit: u64,
        /// Directory for report.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print a random CNF in DIMACS.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        vars: usize,
        #[arg(long, default_value_t = 8)]
        clauses: usize,
        /// Maximum clause width.
        #[arg(long, default_value_t = 3)]
        width: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Impl,
    Mon,
    Cubic,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Dp,
    Reduction,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    GappImpl,
    GappMon,
    DnfPad,
    SingleMon,
    SingleImpl,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Reduce {
            cnf,
            variant,
            td,
            out,
            count,
            json,
        } => cmd_reduce(&cnf, variant, td.as_deref(), &out, count, json),
        Command::Count {
            cnf,
            method,
            td,
            limit,
            json,
        } => cmd_count(&cnf, method, td.as_deref(), limit, json),
        Command::Combine {
            mode,
            inputs,
            cubic,
            out,
            execute,
            json,
        } => cmd_combine(mode, &inputs, cubic, &out, execute, json),
        Command::Verify {
            cnf,
            variant,
            td,
            psi2,
            limit,
            out,
            json,
        } => cmd_verify(&cnf, variant, td.as_deref(), psi2.as_deref(), limit, out.as_deref(), json),
        Command::Gen {
            seed,
            vars,
            clauses,
            width,
        } => {
            print!("{}", random_cnf(seed, vars, clauses, width).to_dimacs());
            Ok(true)
        }
    }
}

fn read_cnf(path: &Path) -> Result<CnfFormula> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CnfFormula::parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_td(path: &Path, f: &CnfFormula) -> Result<TreeDecomposition> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    TreeDecomposition::parse_pace(&text, &f.primal_graph()).with_context(|| format!("decomposition {}", path.display()))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<String> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path.display().to_string())
}

fn build_pair(f: &CnfFormula, variant: VariantArg, td: Option<&Path>) -> Result<ReductionPair> {
    let base = match td {
        Some(p) => read_td(p, f)?,
        None => TreeDecomposition::trivial(f),
    };
    let fully = matches!(variant, VariantArg::Mon);
    let ltd = LabeledTreeDecomposition::label(&base, f, fully)?;
    Ok(match variant {
        VariantArg::Impl => reduce_impl(f, &ltd)?,
        VariantArg::Mon => reduce_monotone(f, &ltd)?,
        VariantArg::Cubic => {
            let (g, l) = normalize_3cnf(f, &ltd)?;
            reduce_cubic_bipartite(&g, &l)?
        }
    })
}

fn cmd_reduce(cnf: &Path, variant: VariantArg, td: Option<&Path>, out: &Path, count: bool, json: bool) -> Result<bool> {
    let f = read_cnf(cnf)?;
    let pair = build_pair(&f, variant, td)?;
    write(out, "psi1.cnf", &pair.psi1.to_dimacs())?;
    write(out, "psi2.cnf", &pair.psi2.to_dimacs())?;
    write(out, "aux.map", &pair.registry.to_map())?;
    write(out, "out.td", &pair.out_td.to_pace(pair.psi1.num_vars()))?;
    let (w, ow, bound) = (pair.ltd.width(), pair.out_td.width(), pair.width_bound());
    let counts = if count {
        let c1 = count_treewidth_dp_stats(&pair.psi1, &pair.out_td)?.0;
        let c2 = count_treewidth_dp_stats(&pair.psi2, &pair.out_td)?.0;
        Some((c1, c2))
    } else {
        None
    };
    if json {
        let mut report = json!({
            "variant": pair.variant,
            "num_vars": pair.psi1.num_vars(),
            "psi1_clauses": pair.psi1.num_clauses(),
            "psi2_clauses": pair.psi2.num_clauses(),
            "input_width": w,
            "output_width": ow,
            "width_bound": bound,
        });
        if let Some((c1, c2)) = &counts {
            report["psi1_count"] = json!(c1.to_string());
            report["psi2_count"] = json!(c2.to_string());
            report["difference"] = json!((c1 - c2).to_string());
        }
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("psi1: {} vars, {} clauses", pair.psi1.num_vars(), pair.psi1.num_clauses());
        println!("psi2: {} vars, {} clauses", pair.psi2.num_vars(), pair.psi2.num_clauses());
        let verdict = if ow <= bound { "ok" } else { "exceeded" };
        println!("width: input {}, output {}, bound {} ({})", w, ow, bound, verdict);
        if let Some((c1, c2)) = &counts {
            println!("#psi1 = {}", c1);
            println!("#psi2 = {}", c2);
            println!("difference = {}", c1 - c2);
        }
    }
    Ok(ow <= bound)
}

fn cmd_count(cnf: &Path, method: MethodArg, td: Option<&Path>, limit: usize, json: bool) -> Result<bool> {
    let f = read_cnf(cnf)?;
    let decomposition = || -> Result<TreeDecomposition> {
        match td {
            Some(p) => read_td(p, &f),
            None => Ok(TreeDecomposition::min_degree(&f.primal_graph())),
        }
    };
    let (count, stats) = match method {
        MethodArg::Brute => (count_bruteforce_limit(&f, limit)?, None),
        MethodArg::Dp => {
            let (c, s) = count_treewidth_dp_stats(&f, &decomposition()?)?;
            (c, Some(s))
        }
        MethodArg::Reduction => {
            let ltd = LabeledTreeDecomposition::label(&decomposition()?, &f, false)?;
            (count_via_reduction(&f, &ltd)?, None)
        }
    };
    if json {
        let mut report = json!({ "count": count.to_string() });
        if let Some(s) = stats {
            report["stats"] = serde_json::to_value(s)?;
            report["operations"] = json!(s.operations());
        }
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{}", count);
    }
    Ok(true)
}

fn cmd_combine(mode: ModeArg, inputs: &[PathBuf], cubic: bool, out: &Path, execute: bool, json: bool) -> Result<bool> {
    if inputs.len() != 2 {
        bail!("every mode takes two input formulas");
    }
    let a = read_cnf(&inputs[0])?;
    let b = read_cnf(&inputs[1])?;
    let mut cert = match mode {
        ModeArg::GappImpl => {
            let (x, y) = if cubic { gapp_impl_two_call_cubic(&a, &b)? } else { gapp_impl_two_call(&a, &b)? };
            PipelineCertificate::two_call(PipelineMode::GappImplTwoCall, x, y)
        }
        ModeArg::GappMon => {
            let (x, y) = gapp_mon_two_call(&a, &b)?;
            PipelineCertificate::two_call(PipelineMode::GappMonTwoCall, x, y)
        }
        ModeArg::DnfPad => {
            let (x, y, _, _) = dnf_pad_two_call(&a, &b)?;
            PipelineCertificate::two_call(PipelineMode::DnfPadTwoCall, x, y)
        }
        ModeArg::SingleMon => single_call_mon(&a, &b)?,
        ModeArg::SingleImpl => single_call_impl(&a, &b)?,
    };
    for (i, g) in cert.formulas.clone().iter().enumerate() {
        let name = format!("call{}.cnf", i + 1);
        write(out, &name, &g.to_dimacs())?;
        cert.formula_files.push(name);
    }
    write(out, "certificate.json", &(serde_json::to_string_pretty(&cert)? + "\n"))?;
    if !execute {
        if json {
            println!("{}", serde_json::to_string_pretty(&cert)?);
        } else {
            println!("mode {}: wrote {}", cert.mode, cert.formula_files.join(", "));
        }
        return Ok(true);
    }
    let counts: Vec<Count> = cert
        .formulas
        .iter()
        .map(|g| count_treewidth_dp_stats(g, &TreeDecomposition::min_degree(&g.primal_graph())).map(|r| r.0))
        .collect::<Result<_, _>>()?;
    let rec = cert.recover(&counts)?;
    let diff = rec.difference.clone().unwrap_or_else(|| &rec.first - &rec.second);
    if json {
        let report = json!({
            "certificate": cert,
            "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "first": rec.first.to_string(),
            "second": rec.second.to_string(),
            "difference": diff.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{}", diff);
    }
    Ok(true)
}

fn cmd_verify(
    cnf: &Path,
    variant: VariantArg,
    td: Option<&Path>,
    psi2: Option<&Path>,
    limit: u64,
    out: Option<&Path>,
    json: bool,
) -> Result<bool> {
    let f = read_cnf(cnf)?;
    let mut pair = build_pair(&f, variant, td)?;
    if let Some(p) = psi2 {
        let g = read_cnf(p)?;
        if g.num_vars() != pair.psi2.num_vars() {
            bail!("{} has {} variables, expected {}", p.display(), g.num_vars(), pair.psi2.num_vars());
        }
        pair.psi2 = g;
    }
    let bijection = check_bijection(&pair, limit);
    let req = match pair.variant {
        Variant::Impl => StructureRequirements {
            fragment: Some(FragmentTag::Impl2),
            ..Default::default()
        },
        Variant::Monotone => StructureRequirements {
            fragment: Some(FragmentTag::Mon2),
            ..Default::default()
        },
        Variant::CubicBipartite => StructureRequirements {
            fragment: Some(FragmentTag::Impl2),
            max_occurrence: Some(3),
            bipartite: true,
        },
    };
    let structure = [audit_structure(&pair.psi1, &req), audit_structure(&pair.psi2, &req)];
    let w = pair.ltd.width();
    let width = audit_width(w, &pair.out_td, &[&pair.psi1, &pair.psi2], pair.width_bound() - w);
    let passed = bijection.passed() && structure.iter().all(|s| s.passed()) && width.passed();
    let report = json!({
        "passed": passed,
        "bijection": bijection,
        "structure": structure,
        "width": width,
    });
    if let Some(dir) = out {
        write(dir, "report.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        println!(
            "bijection: {} (models {}/{}, rogue {}/{}, difference {})",
            mark(bijection.passed()),
            bijection.models1,
            bijection.models2,
            bijection.rogue1,
            bijection.rogue2,
            bijection.difference
        );
        for line in bijection.failures.iter().take(5) {
            println!("  {}", line);
        }
        for (name, s) in ["psi1", "psi2"].iter().zip(&structure) {
            println!("structure {}: {} ({})", name, mark(s.passed()), s.violation.as_deref().unwrap_or(&s.fragment.to_string()));
        }
        println!("width: {} (output {}, bound {})", mark(width.passed()), width.output_width, width.input_width + width.bound);
    }
    Ok(passed)
}

fn random_cnf(seed: u64, n: usize, m: usize, width: usize) -> CnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = CnfFormula::new(n);
    if n == 0 {
        return f;
    }
    for _ in 0..m {
        let k = rng.gen_range(1..=width.clamp(1, n));
        let mut vars: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.gen_range(i..n);
            vars.swap(i, j);
        }
        let lits: Vec<Lit> = vars[..k].iter().map(|&v| Lit::new(Var::from_index(v), rng.gen())).collect();
        f.add_clause(lits).expect("distinct variables");
    }
    f
}
