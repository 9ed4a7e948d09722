use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dualmem::axioms::{full_report, SamplingBudget, SchemaMode, DEFAULT_DEPTH};
use dualmem::formula::{evaluate, parse_formula, Assignment};
use dualmem::hf::{CollapseError, HfUniverse};
use dualmem::iso::{find_violation, global_isomorphism, IsoOutcome, PhiEngine};
use dualmem::lemmas::{counterexample_gallery, run_corpus, run_suite, CorpusConfig, SuiteConfig};
use dualmem::structure::{
    build_v_universe, parse_structure, random_pair, scramble, serialize_structure, tamper, TamperKind,
};
use dualmem::{DualStructure, Permutation, Tag};

/// Dual membership structures: axiom checks, the definable isomorphism and its lemmas.
#[derive(Parser)]
#[command(name = "dualmem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate structure files
    Gen(GenArgs),
    /// Check the axioms for both relations
    CheckAxioms {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Battery)]
        mode: Mode,
        /// AST size bound for `--mode bounded`
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Seed for sampled checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the isomorphism from e1 to e2, or explain why there is none
    FindIso {
        input: PathBuf,
        /// Re-check the certificate edge by edge
        #[arg(long)]
        verify: bool,
        /// Compare the matching with Mostowski collapses on every pair
        #[arg(long)]
        oracle_check: bool,
    },
    /// Evaluate a formula
    Eval {
        input: PathBuf,
        #[arg(
            long,
            conflicts_with = "formula_file",
            required_unless_present = "formula_file"
        )]
        formula: Option<String>,
        #[arg(long)]
        formula_file: Option<PathBuf>,
        /// Values of free variables, e.g. `x=0,y=3`
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Run the lemma suite on a structure or a generated corpus
    VerifyLemmas {
        #[arg(conflicts_with = "corpus", required_unless_present = "corpus")]
        input: Option<PathBuf>,
        /// e.g. `sizes=3,4 count=100 seed=1 pairs=6`
        #[arg(long)]
        corpus: Option<String>,
        /// Seed for sampled axiom checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the Mostowski collapse of one element
    Collapse {
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        relation: u8,
        #[arg(long)]
        element: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Semantic,
    Battery,
    Bounded,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// (V_n, ∈, ∈) with elements numbered by Ackermann code
    VUniverse {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace e2 by e1 renumbered through a seeded permutation
    Scramble {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two independent random extensional acyclic relations
    RandomPair {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Damage e1 in one targeted way
    Tamper {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        kind: TamperKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the counterexample gallery and expected summaries
    Gallery {
        #[arg(long)]
        out: PathBuf,
    },
}

macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).expect("writing to a String")
    };
}

macro_rules! outs {
    ($out:expr, $($arg:tt)*) => {
        write!($out, $($arg)*).expect("writing to a String")
    };
}

fn read_structure(path: &Path) -> Result<DualStructure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_structure(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: &mut String, text: &str, dest: Option<&Path>) -> Result<()> {
    match dest {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            outln!(out, "wrote {}", path.display());
        }
        None => out.push_str(text),
    }
    Ok(())
}

fn cmd_gen(out: &mut String, kind: GenKind) -> Result<bool> {
    match kind {
        GenKind::VUniverse { n, out: dest } => {
            let s = build_v_universe(n)?;
            emit(out, &serialize_structure(&s), dest.as_deref())?;
        }
        GenKind::Scramble {
            input,
            seed,
            out: dest,
        } => {
            let s = read_structure(&input)?;
            let p = Permutation::random(s.domain_size(), seed);
            let t = scramble(&s, &p)?;
            emit(
                out,
                &format!("# {p}\n{}", serialize_structure(&t)),
                dest.as_deref(),
            )?;
            if dest.is_some() {
                outln!(out, "{p}");
            }
        }
        GenKind::RandomPair {
            size,
            seed,
            out: dest,
        } => {
            emit(
                out,
                &serialize_structure(&random_pair(size, seed)),
                dest.as_deref(),
            )?;
        }
        GenKind::Tamper {
            input,
            kind,
            seed,
            out: dest,
        } => {
            let s = read_structure(&input)?;
            emit(
                out,
                &serialize_structure(&tamper(&s, kind, seed)?),
                dest.as_deref(),
            )?;
        }
        GenKind::Gallery { out: dir } => {
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            for item in counterexample_gallery() {
                let st = dir.join(format!("{}.st", item.name));
                emit(out, &serialize_structure(&item.structure), Some(&st))?;
                let expected = dir.join(format!("{}.expected", item.name));
                emit(out, item.expected, Some(&expected))?;
            }
        }
    }
    Ok(true)
}

fn cmd_check_axioms(out: &mut String, input: &Path, mode: Mode, depth: usize, seed: u64) -> Result<bool> {
    let s = read_structure(input)?;
    let budget = SamplingBudget {
        seed,
        ..SamplingBudget::default()
    };
    let mode = match mode {
        Mode::Semantic => SchemaMode::Skip,
        Mode::Battery => SchemaMode::Battery,
        Mode::Bounded => SchemaMode::Bounded { depth },
    };
    let report = full_report(&s, &budget, mode);
    outs!(out, "{report}");
    Ok(report.all_pass())
}

fn cmd_find_iso(out: &mut String, input: &Path, verify: bool, oracle_check: bool) -> Result<bool> {
    let s = read_structure(input)?;
    let outcome = match global_isomorphism(&s) {
        Ok(o) => o,
        Err(e) => {
            outln!(out, "fail input {e}");
            return Ok(false);
        }
    };
    outs!(out, "{outcome}");
    let mut ok = matches!(outcome, IsoOutcome::Certificate(_));
    if let (true, IsoOutcome::Certificate(c)) = (verify, &outcome) {
        match find_violation(&s, c) {
            None => outln!(out, "# verify ok"),
            Some(v) => {
                outln!(out, "# verify failed: {v}");
                ok = false;
            }
        }
    }
    if oracle_check {
        let mismatches = oracle_mismatches(&s);
        let n = s.domain_size() as u128;
        outln!(out, "# oracle pairs={} mismatches={mismatches}", n * n);
        ok &= mismatches == 0;
    }
    Ok(ok)
}

/// Pairs where `m(x) = y` and `collapse₁(x) = collapse₂(y)` disagree. Pairs with different
/// collapses and no matching are grouped, so the count covers all `n²` pairs.
fn oracle_mismatches(s: &DualStructure) -> u64 {
    let mut hf = HfUniverse::new();
    let (Ok(c1), Ok(c2)) = (hf.collapse_all(s.e1()), hf.collapse_all(s.e2())) else {
        return 0;
    };
    let mut by_code: HashMap<_, Vec<usize>> = HashMap::new();
    for (y, c) in c2.codes.iter().enumerate() {
        by_code.entry(*c).or_default().push(y);
    }
    let mut engine = PhiEngine::new(s);
    let mut mismatches = 0u64;
    for (x, c) in c1.codes.iter().enumerate() {
        let same: &[usize] = by_code.get(c).map_or(&[], Vec::as_slice);
        let m = engine.matching(x).ok().flatten();
        for &y in same {
            if m != Some(y) {
                mismatches += 1;
            }
        }
        if let Some(y) = m {
            if !same.contains(&y) {
                mismatches += 1;
            }
        }
    }
    mismatches
}

fn cmd_eval(
    out: &mut String,
    input: &Path,
    formula: Option<String>,
    file: Option<PathBuf>,
    assign: &str,
) -> Result<bool> {
    let s = read_structure(input)?;
    let text = match (formula, file) {
        (Some(t), _) => t,
        (None, Some(p)) => fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?,
        (None, None) => bail!("one of --formula and --formula-file is required"),
    };
    let f = parse_formula(text.trim()).context("parsing formula")?;
    let asg: Assignment = assign.parse().context("parsing --assign")?;
    let value = evaluate(&s, &f, &asg)?;
    outln!(out, "{value}");
    Ok(value)
}

fn cmd_verify_lemmas(
    out: &mut String,
    input: Option<PathBuf>,
    corpus: Option<String>,
    seed: u64,
) -> Result<bool> {
    let config = SuiteConfig {
        budget: SamplingBudget {
            seed,
            ..SamplingBudget::default()
        },
        ..SuiteConfig::default()
    };
    match (input, corpus) {
        (Some(path), None) => {
            let report = run_suite(&read_structure(&path)?, &config);
            outs!(out, "{report}");
            Ok(!report.has_failure())
        }
        (None, Some(c)) => {
            let c: CorpusConfig = c.parse().context("parsing --corpus")?;
            let report = run_corpus(&c, &config);
            outs!(out, "{report}");
            Ok(!report.has_failure())
        }
        _ => bail!("give exactly one of a structure file and --corpus"),
    }
}

fn cmd_collapse(out: &mut String, input: &Path, relation: u8, element: usize) -> Result<bool> {
    let s = read_structure(input)?;
    if element >= s.domain_size() {
        bail!(
            "element {element} is outside a domain of size {}",
            s.domain_size()
        );
    }
    let tag = Tag::from_index(relation).expect("range checked by clap");
    let mut hf = HfUniverse::new();
    match hf.collapse(s.relation(tag), element) {
        Ok(c) => {
            let code = hf
                .small_code(c.code)
                .map_or_else(|| "large".to_owned(), |v| v.to_string());
            outln!(out, "{} code={code}", hf.render(c.code));
            if let Some((a, b)) = c.collision {
                outln!(out, "# warning: {a} and {b} collapse to the same set");
            }
            Ok(true)
        }
        Err(CollapseError::Cycle { cycle, .. }) => {
            let ids: Vec<String> = cycle.0.iter().map(|x| x.to_string()).collect();
            outln!(out, "fail cycle={}", ids.join(","));
            Ok(false)
        }
    }
}

fn run(out: &mut String, cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(args) => cmd_gen(out, args.kind),
        Command::CheckAxioms {
            input,
            mode,
            depth,
            seed,
        } => cmd_check_axioms(out, &input, mode, depth, seed),
        Command::FindIso {
            input,
            verify,
            oracle_check,
        } => cmd_find_iso(out, &input, verify, oracle_check),
        Command::Eval {
            input,
            formula,
            formula_file,
            assign,
        } => cmd_eval(out, &input, formula, formula_file, &assign),
        Command::VerifyLemmas { input, corpus, seed } => cmd_verify_lemmas(out, input, corpus, seed),
        Command::Collapse {
            input,
            relation,
            element,
        } => cmd_collapse(out, &input, relation, element),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&mut out, cli);
    // A closed pipe downstream is not an error of ours.
    match io::stdout().lock().write_all(out.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        _ => {}
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
