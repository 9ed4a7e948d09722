//! Acceptance suite. Prints one line per criterion and exits nonzero if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dualmem::axioms::{
    battery, check_extensionality, check_schema_battery, full_report, SamplingBudget, SchemaMode,
};
use dualmem::formula::macros::extensionality;
use dualmem::formula::{evaluate, Assignment};
use dualmem::hf::HfUniverse;
use dualmem::iso::{transitive_closure, PhiEngine};
use dualmem::lemmas::{
    count_psi_witnesses, counterexample_gallery, gallery_summary, run_corpus, CorpusConfig, SuiteConfig,
    WitnessCount, DEFAULT_BUDGET,
};
use dualmem::structure::{
    build_v_universe, random_extensional_relation, random_pair, scramble, serialize_structure, tamper,
    TamperKind,
};
use dualmem::{DualStructure, MembershipRelation, Permutation, Tag};
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualmem"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("spawn dualmem");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// The `# perm` comment of a scrambled file and the `map` lines of a certificate.
fn perm_line(text: &str) -> Vec<usize> {
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix("# perm"))
        .expect("perm line");
    line.split_whitespace().map(|t| t.parse().unwrap()).collect()
}

fn certificate_map(text: &str, n: usize) -> Option<Vec<usize>> {
    let mut lines = text.lines();
    if lines.next()? != format!("iso {n}") {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    for l in lines.filter(|l| !l.starts_with('#')) {
        let mut t = l.strip_prefix("map ")?.split(' ');
        let x: usize = t.next()?.parse().ok()?;
        map[x] = t.next()?.parse().ok()?;
    }
    Some(map)
}

fn scramble_round_trip(dir: &Path, n: usize, seed: u64) -> Result<Duration, String> {
    let v = dir.join(format!("v{n}.st"));
    if !v.exists() {
        let (code, _) = run(&["gen", "v-universe", "--n", &n.to_string(), "--out", path_str(&v)]);
        if code != 0 {
            return Err(format!("gen v-universe {n} exit {code}"));
        }
    }
    let s = dir.join(format!("s{n}-{seed}.st"));
    let (code, _) = run(&[
        "gen",
        "scramble",
        "--in",
        path_str(&v),
        "--seed",
        &seed.to_string(),
        "--out",
        path_str(&s),
    ]);
    if code != 0 {
        return Err(format!("scramble v{n} seed {seed} exit {code}"));
    }
    let p = perm_line(&std::fs::read_to_string(&s).map_err(|e| e.to_string())?);
    let size = p.len();
    if Permutation::random(size, seed).images() != p.as_slice() {
        return Err(format!(
            "v{n} seed {seed}: printed permutation differs from the seeded one"
        ));
    }
    let start = Instant::now();
    let (code, out) = run(&["find-iso", path_str(&s)]);
    let took = start.elapsed();
    std::fs::remove_file(&s).ok();
    match certificate_map(&out, size) {
        Some(m) if code == 0 && m == p => Ok(took),
        _ => Err(format!(
            "v{n} seed {seed}: certificate is not the scrambling permutation"
        )),
    }
}

fn criterion_1() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    for n in 1..=4 {
        for seed in 0..100 {
            scramble_round_trip(dir.path(), n, seed)?;
        }
    }
    let took = scramble_round_trip(dir.path(), 5, 0)?;
    if took >= Duration::from_secs(60) {
        return Err(format!("v5 took {took:?}"));
    }
    Ok(format!("400 scrambles, v5 in {:.2}s", took.as_secs_f64()))
}

/// Scrambled universes, random pairs and scrambled random relations up to `max` elements.
fn wf_corpus(max: usize) -> Vec<DualStructure> {
    let mut out = Vec::new();
    for n in 0..=4 {
        let v = build_v_universe(n).unwrap();
        if v.domain_size() > max {
            continue;
        }
        for seed in 0..5 {
            out.push(scramble(&v, &Permutation::random(v.domain_size(), seed)).unwrap());
        }
    }
    for size in 1..=max {
        for seed in 0..8 {
            out.push(random_pair(size, seed));
            let d = DualStructure::diagonal(random_extensional_relation(size, seed + 100));
            out.push(scramble(&d, &Permutation::random(size, seed)).unwrap());
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let mut pairs = 0;
    let mut matched = 0;
    for s in wf_corpus(16) {
        let mut u = HfUniverse::new();
        let c1 = u.collapse_all(s.e1()).unwrap().codes;
        let c2 = u.collapse_all(s.e2()).unwrap().codes;
        let mut engine = PhiEngine::new(&s);
        for (x, a) in c1.iter().enumerate() {
            for (y, b) in c2.iter().enumerate() {
                let got = engine.phi(x, y).map_err(|e| e.to_string())?;
                if got != (a == b) {
                    return Err(format!("phi({x},{y})={got} on\n{}", serialize_structure(&s)));
                }
                pairs += 1;
                matched += usize::from(got);
            }
        }
    }
    Ok(format!("pairs={pairs} phi-true={matched}"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for s in wf_corpus(8) {
        let mut engine = PhiEngine::new(&s);
        let n = s.domain_size();
        for x in 0..n {
            if transitive_closure(s.e1(), x, true).len() > 4 {
                continue;
            }
            for y in 0..n {
                let phi = engine.phi(x, y).map_err(|e| e.to_string())?;
                match count_psi_witnesses(&s, x, y, DEFAULT_BUDGET) {
                    WitnessCount::Counted(c) if c == usize::from(phi) => checked += 1,
                    other => {
                        return Err(format!(
                            "({x},{y}) phi={phi} count={other:?} on\n{}",
                            serialize_structure(&s)
                        ))
                    }
                }
            }
        }
    }
    Ok(format!("pairs={checked}"))
}

fn criterion_4() -> Outcome {
    let c: CorpusConfig = "sizes=3,4 count=100 seed=1".parse().map_err(|e| format!("{e}"))?;
    let r = run_corpus(&c, &SuiteConfig::default());
    if r.has_failure() {
        return Err(r.to_string());
    }
    for (lemma, t) in &r.tallies {
        if t.applicable != 200 || t.not_applicable != 0 {
            return Err(format!(
                "{lemma}: applicable={} n/a={}",
                t.applicable, t.not_applicable
            ));
        }
    }
    Ok(format!("{} lemmas x 200 items", r.tallies.len()))
}

fn relations_up_to_16() -> Vec<MembershipRelation> {
    let mut out = Vec::new();
    for n in 0..=4 {
        let v = build_v_universe(n).unwrap();
        out.push(v.e1().clone());
        for seed in 0..6 {
            for kind in TamperKind::ALL {
                if let Ok(t) = tamper(&v, kind, seed) {
                    out.push(t.e1().clone());
                }
            }
            let size = v.domain_size();
            if size > 1 {
                // Drop one element, and keep a seeded prefix of a shuffle.
                let p = Permutation::random(size, seed);
                let drop = p.apply(0);
                let keep: Vec<usize> = (0..size).filter(|&x| x != drop).collect();
                out.push(v.e1().restrict(&keep));
                let mut prefix: Vec<usize> = p.images()[..size / 2 + 1].to_vec();
                prefix.sort_unstable();
                out.push(v.e1().restrict(&prefix));
            }
        }
        if n > 0 {
            let smaller = build_v_universe(n - 1).unwrap().domain_size();
            out.push(v.e1().restrict(&(0..smaller).collect::<Vec<_>>()));
        }
    }
    for size in 1..=16 {
        for seed in 0..6 {
            out.push(random_extensional_relation(size, seed));
        }
    }
    out
}

fn collapses_onto_a_level(u: &mut HfUniverse, r: &MembershipRelation) -> bool {
    let Ok(c) = u.collapse_all(r) else { return false };
    let mut codes = c.codes;
    codes.sort_unstable();
    (0..=4).any(|n| {
        let mut level = u.v_level_codes(n).unwrap();
        level.sort_unstable();
        level == codes
    })
}

fn criterion_5() -> Outcome {
    let mut u = HfUniverse::new();
    let (mut yes, mut no) = (0, 0);
    for r in relations_up_to_16() {
        let s = DualStructure::diagonal(r);
        let report = full_report(&s, &SamplingBudget::default(), SchemaMode::Skip);
        let got = report.relation(Tag::E1).characterizes_v_level();
        let oracle = collapses_onto_a_level(&mut u, s.e1());
        if got != oracle {
            return Err(format!(
                "axioms={got} oracle={oracle} on\n{}",
                serialize_structure(&s)
            ));
        }
        if got {
            yes += 1;
        } else {
            no += 1;
        }
    }
    if yes == 0 || no == 0 {
        return Err(format!("degenerate corpus yes={yes} no={no}"));
    }
    Ok(format!("levels={yes} others={no}"))
}

fn criterion_6() -> Outcome {
    let gallery = counterexample_gallery();
    for item in &gallery {
        if gallery_summary(&item.structure) != item.expected {
            return Err(format!("{} summary differs", item.name));
        }
    }
    let chain = gallery
        .iter()
        .find(|i| i.name == "chain-vs-v3")
        .ok_or("chain-vs-v3 missing")?;
    for needle in ["both-directions-fail", "{{{}}}", "{{},{{}}}"] {
        if !chain.expected.contains(needle) {
            return Err(format!("chain-vs-v3 lacks {needle}"));
        }
    }
    Ok(format!("items={}", gallery.len()))
}

fn seeded_small_structures() -> Vec<DualStructure> {
    (0..50u64)
        .map(|seed| {
            let s = random_pair(1 + seed as usize % 6, seed);
            match seed % 5 {
                0 => tamper(&s, TamperKind::BreakExtensionality, seed).unwrap_or(s),
                1 => tamper(&s, TamperKind::AddCycle, seed).unwrap_or(s),
                2 => tamper(&s, TamperKind::RemoveEdge, seed).unwrap_or(s),
                _ => s,
            }
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let items = battery();
    let (mut sentences, mut failing) = (0, 0);
    for s in seeded_small_structures() {
        let none = Assignment::new();
        for tag in [Tag::E1, Tag::E2] {
            let by_formula = evaluate(&s, &extensionality(tag), &none).map_err(|e| e.to_string())?;
            if by_formula != check_extensionality(s.relation(tag)).is_pass() {
                return Err(format!("extensionality {tag} on\n{}", serialize_structure(&s)));
            }
        }
        let verdicts = check_schema_battery(&s, &SamplingBudget::default());
        if verdicts.len() != items.len() {
            return Err("battery length".into());
        }
        for (item, v) in items.iter().zip(&verdicts) {
            let by_formula = evaluate(&s, &item.sentence(), &none).map_err(|e| e.to_string())?;
            if by_formula != v.holds {
                return Err(format!(
                    "{} formula={by_formula} native={} on\n{}",
                    v.name,
                    v.holds,
                    serialize_structure(&s)
                ));
            }
            sentences += 1;
            failing += usize::from(!v.holds);
        }
    }
    Ok(format!("sentences={sentences} failing={failing}"))
}

fn criterion_8() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let (v3, s3, chain, gal) = (d("v3.st"), d("s3.st"), d("chain.st"), d("gallery"));
    std::fs::write(&chain, "n 3\ne1 0 1\ne1 1 2\ne2 0 1\ne2 0 2\ne2 1 2\n").map_err(|e| e.to_string())?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "v-universe", "--n", "3", "--out", &v3],
        vec!["gen", "v-universe", "--n", "4"],
        vec!["gen", "scramble", "--in", &v3, "--seed", "7", "--out", &s3],
        vec!["gen", "scramble", "--in", &v3, "--seed", "7"],
        vec!["gen", "random-pair", "--size", "9", "--seed", "4"],
        vec!["gen", "tamper", "--in", &v3, "--kind", "add-cycle", "--seed", "2"],
        vec![
            "gen",
            "tamper",
            "--in",
            &v3,
            "--kind",
            "break-extensionality",
            "--seed",
            "2",
        ],
        vec!["gen", "gallery", "--out", &gal],
        vec!["check-axioms", &s3, "--mode", "semantic"],
        vec!["check-axioms", &s3, "--mode", "battery"],
        vec!["check-axioms", &chain, "--mode", "bounded", "--depth", "9"],
        vec!["find-iso", &s3, "--verify", "--oracle-check"],
        vec!["find-iso", &chain],
        vec!["eval", &s3, "--formula", "forall a exists b a in1 b"],
        vec!["eval", &s3, "--formula", "exists b (a in2 b)", "--assign", "a=1"],
        vec!["verify-lemmas", &s3],
        vec!["verify-lemmas", &chain],
        vec!["verify-lemmas", "--corpus", "sizes=2,3 count=5 seed=2 pairs=5"],
        vec!["collapse", &s3, "--relation", "2", "--element", "3"],
        vec!["find-iso", "/nonexistent/input.st"],
        vec!["gen", "tamper", "--in", &v3, "--kind", "bogus"],
    ];
    for args in &commands {
        let first = run(args);
        let second = run(args);
        if first != second {
            return Err(format!("`{}` differs between runs", args.join(" ")));
        }
    }
    Ok(format!("commands={}", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("scrambled universes recover the permutation", criterion_1),
        ("phi agrees with collapse equality", criterion_2),
        ("brute-force witness count agrees with phi", criterion_3),
        ("lemma corpus sizes=3,4 count=100 seed=1", criterion_4),
        ("characterizing axioms agree with the collapse image", criterion_5),
        ("counterexample gallery", criterion_6),
        ("formula evaluation agrees with native checks", criterion_7),
        ("cli output is deterministic", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: pass ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: fail ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
