//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;
use trcore::engine::{solve, SolverConfig, Verdict};
use trcore::lift::nontrivial_conjuncts;
use trcore::ltl::{parse_ltl, Formula, Op};
use trcore::oracle::{check_sat, DEFAULT_MAX_ATOMS};
use trcore::snf::{parse_snf, print_snf, SnfProblem};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    elapsed: Duration,
}

fn trcore(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_trcore"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
        elapsed: start.elapsed(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Lines of `stdout` after the verdict line: a re-parseable core.
fn core_text(stdout: &str) -> String {
    stdout.lines().skip(1).map(|l| format!("{l}\n")).collect()
}

fn clause_set(text: &str) -> BTreeSet<String> {
    let p = parse_snf(text).expect("clause text parses");
    print_snf(&p).lines().map(str::to_string).collect()
}

fn stats_without_wall(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_ms");
    v
}

fn wall_ms(path: &Path) -> f64 {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["wall_ms"].as_f64().unwrap()
}

/// `g` arises from `f` by replacing occurrences with constants: `True` only
/// at positive polarity, `False` only at negative.
fn is_weakening(f: &Formula, g: &Formula, positive: bool) -> bool {
    match g.op() {
        Op::True if f.op() != &Op::True => positive,
        Op::False if f.op() != &Op::False => !positive,
        op if op == f.op() => {
            let flip = matches!(op, Op::Not);
            f.args()
                .iter()
                .zip(g.args())
                .all(|(a, b)| is_weakening(a, b, positive != flip))
        }
        _ => false,
    }
}

struct Report {
    failures: Vec<usize>,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, detail: String) {
        println!("{} criterion {n}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures.push(n);
        }
    }
}

/// A formula instance solved through the binary.
struct LtlCase {
    name: String,
    file: PathBuf,
    unsat: bool,
}

/// Known-verdict formulas, checked by hand.
const CORPUS: [(&str, bool); 20] = [
    ("G p & F ~p", true),
    ("(p U q) & G ~q", true),
    ("p & ~p", true),
    ("X p & X ~p", true),
    ("p & G (p -> X p) & F ~p", true),
    ("F G p & G F ~p", true),
    ("(p R q) & G ~p & F ~q", true),
    ("G (p | q) & G ~p & F ~q", true),
    ("~(p U q) & q", true),
    ("X X p & G ~p", true),
    ("G (a -> F b) & G F a & F G ~b", true),
    ("F p", false),
    ("G F p", false),
    ("p U q", false),
    ("G (p -> X ~p) & G F p", false),
    ("F G p & G F q", false),
    ("(p R q) & F p", false),
    ("X p & ~p", false),
    ("G (req -> F gnt) & G F req", false),
    ("G (p -> X q) & G (q -> X p) & p & F G ~q", true),
];

fn random_snf(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=4);
    let atoms: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let lit = |rng: &mut ChaCha8Rng| {
        let a = atoms.choose(rng).unwrap();
        if rng.gen_bool(0.5) {
            a.clone()
        } else {
            format!("~{a}")
        }
    };
    let evs: Vec<String> = (0..rng.gen_range(0..=2)).map(|_| lit(rng)).collect();
    let mut text = String::new();
    for _ in 0..rng.gen_range(1..=8) {
        let k = rng.gen_range(0..100);
        let mut now: Vec<String> = (0..rng.gen_range(0..=2)).map(|_| lit(rng)).collect();
        let line = if k < 20 {
            now.push(lit(rng));
            format!("initial: {}", now.join(" | "))
        } else if k < 45 {
            now.push(lit(rng));
            format!("global: {}", now.join(" | "))
        } else if k < 85 || evs.is_empty() {
            let next: Vec<String> = (0..rng.gen_range(1..=2)).map(|_| lit(rng)).collect();
            now.push(format!("X ({})", next.join(" | ")));
            format!("global: {}", now.join(" | "))
        } else {
            now.push(format!("F {}", evs.choose(rng).unwrap()));
            format!("eventually: {}", now.join(" | "))
        };
        text.push_str(&line);
        text.push('\n');
    }
    text
}

fn resolves_unsat(dir: &Path, name: &str, text: &str) -> bool {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    trcore(&["solve", path_str(&path)]).code == 20
}

#[test]
fn acceptance() {
    let dir = TempDir::new().unwrap();
    let tmp = dir.path();
    let mut report = Report { failures: Vec::new() };
    let mut ltl_cases: Vec<LtlCase> = Vec::new();
    let mut snf_cases: Vec<PathBuf> = Vec::new();

    // 1. Clause set needing a two-iteration loop search: the core is the whole input.
    {
        let two_loops = data("two_loops.snf");
        let run = trcore(&["solve", path_str(&two_loops), "--core"]);
        let input = clause_set(&std::fs::read_to_string(&two_loops).unwrap());
        let core = clause_set(&core_text(&run.stdout));
        let dot = tmp.join("two_loops.dot");
        let full = trcore(&[
            "solve",
            path_str(&two_loops),
            "--no-taut-del",
            "--no-subsumption",
            "--no-ordering",
            "--graph",
            path_str(&dot),
        ]);
        let dot = std::fs::read_to_string(&dot).unwrap_or_default();
        let labels = [
            "G(a | b | X a)",
            "G(~a | w_not_a)",
            "G(~w_not_a | X (~a | w_not_a))",
            "G(~a)",
            "□",
            "label=\"L0.0\"",
            "label=\"L0.1\"",
        ];
        let missing: Vec<&str> = labels.iter().copied().filter(|l| !dot.contains(l)).collect();
        let ok = run.code == 20
            && core == input
            && run.elapsed < Duration::from_secs(1)
            && full.code == 20
            && missing.is_empty();
        report.line(
            1,
            ok,
            format!(
                "two-loop clause set exit {}, core {} of {} clauses, {:?}; graph labels missing: {:?}",
                run.code,
                core.len(),
                input.len(),
                run.elapsed,
                missing
            ),
        );
        snf_cases.push(two_loops);
    }

    // 2. Request/grant example.
    {
        let toy = data("toy.ltl");
        let stats = tmp.join("toy.json");
        let run = trcore(&["solve", path_str(&toy), "--core-ltl", "--stats", path_str(&stats)]);
        let lifted_text = core_text(&run.stdout);
        let resolved = resolves_unsat(tmp, "toy_core.ltl", &lifted_text);
        let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
        let (input_size, core_size) = (
            s["input_size"].as_u64().unwrap(),
            s["core_size"].as_u64().unwrap_or(u64::MAX),
        );
        let lifted = parse_ltl(&lifted_text).map(|f| f.fold_constants());
        let expected = parse_ltl("G (req -> (X gnt & X X gnt)) & G (gnt -> X ~gnt) & F req").unwrap();
        let conj = |f: &Formula| -> Vec<String> { f.conjuncts().iter().map(|c| c.to_string()).collect() };
        let advisory = lifted.as_ref().map(|f| conj(f) == conj(&expected)).unwrap_or(false);
        let ok = run.code == 20 && resolved && core_size < input_size;
        report.line(
            2,
            ok,
            format!(
                "toy exit {}, core re-solves unsat: {resolved}, size {core_size} < {input_size}; advisory conjuncts match the expected core: {advisory}",
                run.code
            ),
        );
        ltl_cases.push(LtlCase {
            name: "toy".into(),
            file: toy,
            unsat: true,
        });
    }

    // 3. Lift specification queries.
    {
        let spec = std::fs::read_to_string(data("lift_spec.ltl")).unwrap();
        let spec: String = spec
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        let mut ok = true;
        let mut details = Vec::new();
        for (i, (query, bound)) in [("G b1", 3), ("X G b1", 6), ("F b1", 9)].into_iter().enumerate() {
            let file = tmp.join(format!("lift{i}.ltl"));
            std::fs::write(&file, format!("({spec})\n& ({query})\n")).unwrap();
            let run = trcore(&["solve", path_str(&file), "--core-ltl"]);
            let lifted_text = core_text(&run.stdout);
            let resolved = run.code == 20 && resolves_unsat(tmp, &format!("lift{i}_core.ltl"), &lifted_text);
            let conjuncts = parse_ltl(&lifted_text)
                .map(|f| nontrivial_conjuncts(&f))
                .unwrap_or(usize::MAX);
            let this = run.code == 20 && resolved && conjuncts <= bound && run.elapsed < Duration::from_secs(60);
            ok &= this;
            details.push(format!(
                "{query}: exit {}, {conjuncts} conjuncts (<= {bound}), {:.2?}",
                run.code, run.elapsed
            ));
            ltl_cases.push(LtlCase {
                name: format!("lift {query}"),
                file,
                unsat: true,
            });
        }
        report.line(3, ok, details.join("; "));
    }

    // 4. Random clause sets against the explicit-state oracle.
    let mut random_unsat: Vec<SnfProblem> = Vec::new();
    {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let start = Instant::now();
        let (mut agree, mut total) = (0, 0);
        for _ in 0..250 {
            let p = parse_snf(&random_snf(&mut rng)).unwrap();
            let expected = check_sat(&p, DEFAULT_MAX_ATOMS).unwrap();
            let got = solve(&p, &SolverConfig::default()).verdict;
            total += 1;
            if got == expected {
                agree += 1;
            }
            if expected == Verdict::Unsat {
                random_unsat.push(p);
            }
        }
        let elapsed = start.elapsed();
        report.line(
            4,
            agree == total && elapsed < Duration::from_secs(60),
            format!(
                "{agree}/{total} verdicts agree ({} unsat), {elapsed:.2?}",
                random_unsat.len()
            ),
        );
    }

    // 5. Cores of every unsat instance are unsat subsets or weakenings.
    {
        let mut checked = 0;
        let mut bad: Vec<String> = Vec::new();
        for (i, (src, unsat)) in CORPUS.iter().enumerate() {
            let file = tmp.join(format!("corpus{i}.ltl"));
            std::fs::write(&file, format!("{src}\n")).unwrap();
            ltl_cases.push(LtlCase {
                name: src.to_string(),
                file,
                unsat: *unsat,
            });
        }
        for case in &ltl_cases {
            let run = trcore(&["solve", path_str(&case.file), "--core", "--core-ltl"]);
            if run.code != if case.unsat { 20 } else { 10 } {
                bad.push(format!("{}: exit {}", case.name, run.code));
                continue;
            }
            if !case.unsat {
                continue;
            }
            let text = core_text(&run.stdout);
            let (snf, ltl) = text.split_once("# core formula\n").expect("both core sections");
            let f = parse_ltl(&std::fs::read_to_string(&case.file).unwrap()).unwrap();
            let g = parse_ltl(ltl).unwrap();
            let snf_ok = resolves_unsat(tmp, "core.snf", snf);
            let ltl_ok = resolves_unsat(tmp, "core.ltl", ltl) && is_weakening(&f, &g, true);
            if !(snf_ok && ltl_ok) {
                bad.push(format!("{}: snf core ok {snf_ok}, formula core ok {ltl_ok}", case.name));
            }
            checked += 1;
        }
        for path in &snf_cases {
            let run = trcore(&["solve", path_str(path), "--core"]);
            let text = core_text(&run.stdout);
            let input = clause_set(&std::fs::read_to_string(path).unwrap());
            if !(clause_set(&text).is_subset(&input) && resolves_unsat(tmp, "core.snf", &text)) {
                bad.push(format!("{}: core not an unsat subset", path.display()));
            }
            checked += 1;
        }
        for p in &random_unsat {
            let core = solve(p, &SolverConfig::default()).core().expect("unsat run has a core");
            let sub = p.subproblem(&core);
            let ok = core.iter().all(|&i| i < p.clauses.len())
                && solve(&sub, &SolverConfig::default()).verdict == Verdict::Unsat
                && check_sat(&sub, DEFAULT_MAX_ATOMS).unwrap() == Verdict::Unsat;
            if !ok {
                bad.push(format!("random core not unsat:\n{}", print_snf(p)));
            }
            checked += 1;
        }
        report.line(
            5,
            bad.is_empty(),
            format!("{checked} unsat instances checked, problems: {bad:?}"),
        );
    }

    // 6. Graph recording and extraction cost at most twice a plain run.
    {
        let timed = |args: &[&str], stats: &Path| {
            let mut a = args.to_vec();
            a.extend(["--stats", path_str(stats)]);
            trcore(&a);
            wall_ms(stats)
        };
        let median = |mut times: Vec<f64>| {
            times.sort_by(f64::total_cmp);
            times[times.len() / 2]
        };
        let stats = tmp.join("overhead.json");
        let mut worst = (0.0f64, String::new());
        let mut all_ok = true;
        for case in ltl_cases.iter().filter(|c| CORPUS.iter().any(|(s, _)| *s == c.name)) {
            let file = path_str(&case.file);
            // interleaved so that load changes hit both sides alike
            let (mut with, mut without) = (Vec::new(), Vec::new());
            for _ in 0..3 {
                with.push(timed(&["solve", file, "--core", "--core-ltl"], &stats));
                without.push(timed(&["solve", file, "--no-graph"], &stats));
            }
            let ratio = median(with) / median(without);
            all_ok &= ratio <= 2.0;
            if ratio > worst.0 {
                worst = (ratio, case.name.clone());
            }
        }
        report.line(6, all_ok, format!("worst ratio {:.2} on {:?}", worst.0, worst.1));
    }

    // 7. Identical outputs across runs.
    {
        let mut differing = Vec::new();
        let outputs = |path: &Path, ltl: bool, stats: &Path| {
            let mut args = vec!["solve", path_str(path), "--core", "--stats", path_str(stats)];
            if ltl {
                args.push("--core-ltl");
            }
            let run = trcore(&args);
            (run.stdout, stats_without_wall(stats))
        };
        let (s1, s2) = (tmp.join("det1.json"), tmp.join("det2.json"));
        let files = ltl_cases
            .iter()
            .map(|c| (c.file.clone(), true))
            .chain(snf_cases.iter().map(|p| (p.clone(), false)));
        for (path, ltl) in files {
            if outputs(&path, ltl, &s1) != outputs(&path, ltl, &s2) {
                differing.push(path.display().to_string());
            }
        }
        for p in &random_unsat {
            let (a, b) = (solve(p, &SolverConfig::default()), solve(p, &SolverConfig::default()));
            let edges = |r: &trcore::engine::SolverResult| r.graph.as_ref().map(|g| g.edge_list());
            if a.core() != b.core() || a.stats.rule_counts != b.stats.rule_counts || edges(&a) != edges(&b) {
                differing.push(print_snf(p));
            }
        }
        report.line(
            7,
            differing.is_empty(),
            format!("outputs differing between runs: {differing:?}"),
        );
    }

    assert!(report.failures.is_empty(), "failed criteria: {:?}", report.failures);
}
