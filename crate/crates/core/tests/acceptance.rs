//! Acceptance criteria. Each test prints one PASS/FAIL line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use spassign_core::coloring::{build_digraph, equitable_color, verify_coloring};
use spassign_core::commands;
use spassign_core::generators::{gen_random, gen_theorem2, gen_theorem6, Family};
use spassign_core::io::Format;
use spassign_core::oracles::{
    brute_force_assignment_opt, brute_force_partition_maxmin, brute_force_partition_opt,
    enumerate_balanced_bipartitions,
};
use spassign_core::partition::{
    coloring_partition_traced, cycle_breaking, multi_partition, random_partition, run, Algorithm,
};
use spassign_core::solver::{optimum, optimum_for_partition};
use spassign_core::{
    maxmin_value, solve_k1_matching, solve_max_similarity, AssignmentProblem, Instance, Score,
};

/// Prints the verdict line, then fails the test if the criterion failed.
fn verdict(id: u32, name: &str, start: Instant, limit: Option<Duration>, failures: &[String]) {
    let elapsed = start.elapsed();
    let slow = limit.is_some_and(|l| elapsed > l);
    let pass = failures.is_empty() && !slow;
    let limit_text = limit.map(|l| format!(" (limit {} s)", l.as_secs())).unwrap_or_default();
    println!(
        "{} C{id} {name}: {:.3} s{limit_text}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for f in failures.iter().take(10) {
        println!("    {f}");
    }
    assert!(failures.is_empty(), "C{id}: {} failure(s), first: {}", failures.len(), failures[0]);
    assert!(!slow, "C{id}: took {elapsed:?}");
}

fn ratio(a: Score, b: Score) -> Ratio<i64> {
    Ratio::new(a.units(), b.units())
}

fn c2_instances() -> Vec<Instance> {
    (0..500u64)
        .map(|i| gen_random([6, 8, 10][(i % 3) as usize], 1, 1000 + i, Family::UniformRandom).unwrap())
        .collect()
}

fn c3_instances() -> Vec<Instance> {
    (0..200u64)
        .map(|i| {
            let n = [8, 12][(i % 2) as usize];
            let k = 1 + ((i / 2) % 2) as usize;
            gen_random(n, k, 5000 + i, Family::UniformRandom).unwrap()
        })
        .collect()
}

#[test]
fn c1_worst_case_bound_is_tight() {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    let start = Instant::now();
    for (k, g) in [(1usize, 1usize), (1, 2), (2, 1)] {
        let t = Instant::now();
        let n = g * (2 * k + 1);
        let inst = gen_theorem2(n, k).unwrap();
        let opt = optimum(&inst).unwrap().1;
        let work = inst.padded(n % 2).unwrap();
        let best = brute_force_partition_opt(&work, k).unwrap().2;
        let got = ratio(best, opt);
        let want = Ratio::new(k as i64 + 1, 2 * k as i64 + 1);
        if got != want {
            failures.push(format!("k={k} g={g}: {got} != {want}"));
        }
        slowest = slowest.max(t.elapsed());
    }
    if slowest > Duration::from_secs(10) {
        failures.push(format!("slowest case took {slowest:?}"));
    }
    verdict(1, "worst-case bound met with equality", start, None, &failures);
}

#[test]
fn c2_cycle_breaking_guarantee() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, inst) in c2_instances().iter().enumerate() {
        let opt = optimum(inst).unwrap().1;
        let r = cycle_breaking(inst, 1).unwrap();
        if !r.value.at_least_fraction_of(2, 3, opt) {
            failures.push(format!("instance {i}: {} < 2/3 of {opt}", r.value));
        }
    }
    verdict(2, "cycle-breaking keeps 2/3 of Opt on 500 instances", start, Some(Duration::from_secs(60)), &failures);
}

#[test]
fn c3_coloring_guarantee() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, inst) in c3_instances().iter().enumerate() {
        let k = inst.k() as i64;
        let (r, trace) = coloring_partition_traced(inst, inst.k()).unwrap();
        if (inst.n_agents() + r.dummy_agents) % (2 * inst.k() + 2) != 0 {
            failures.push(format!("instance {i}: padded size not divisible by 2k+2"));
        }
        if !r.value.at_least_fraction_of(k + 1, 2 * k + 1, trace.opt) {
            failures.push(format!("instance {i}: value {} below bound of {}", r.value, trace.opt));
        }
        if !trace.best_cut().at_least_fraction_of(k + 1, 2 * k + 1, trace.opt) {
            failures.push(format!("instance {i}: x_T* {} below bound of {}", trace.best_cut(), trace.opt));
        }
    }
    verdict(3, "coloring keeps (k+1)/(2k+1) of Opt on 200 instances", start, Some(Duration::from_secs(120)), &failures);
}

#[test]
fn c4_multi_partition_is_exact() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, inst) in c2_instances().iter().chain(&c3_instances()).enumerate() {
        let opt = optimum(inst).unwrap().1;
        let r = multi_partition(inst, inst.k()).unwrap();
        let sizes = r.partition.sizes();
        let labels = r.partition.labels(inst.n_agents());
        if r.value != opt {
            failures.push(format!("instance {i}: {} != {opt}", r.value));
        }
        if sizes.iter().max().unwrap() - sizes.iter().min().unwrap() > 1 {
            failures.push(format!("instance {i}: sizes {sizes:?}"));
        }
        if let Some(&(a, p)) = r.assignment.pairs().iter().find(|&&(a, p)| labels[a] == labels[p]) {
            failures.push(format!("instance {i}: pair ({a}, {p}) inside one subset"));
        }
    }
    verdict(4, "multi-partition keeps Opt on 700 instances", start, None, &failures);
}

#[test]
fn c5_random_baseline() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let inst = gen_theorem2(6, 1).unwrap();
    let opt = optimum(&inst).unwrap().1;
    let values: Vec<f64> = (0..200).map(|s| random_partition(&inst, 1, s).unwrap().value.to_f64()).collect();
    let (mean, se) = commands::mean_stderr(&values);
    if mean < 0.5 * opt.to_f64() - 3.0 * se {
        failures.push(format!("mean {mean} < 0.5 Opt - 3 se ({se})"));
    }
    let parts = enumerate_balanced_bipartitions(6);
    let total: Score = parts.iter().map(|p| optimum_for_partition(&inst, p).unwrap().1).sum();
    let exact = Ratio::new(total.units(), parts.len() as i64 * opt.units());
    if parts.len() != 10 || exact != Ratio::new(3, 5) {
        failures.push(format!("{} partitions, expectation {exact} of Opt", parts.len()));
    }
    println!("    seed mean {mean:.4} (se {se:.4}), exact expectation {exact} of Opt {opt}");
    verdict(5, "random partition keeps half of Opt in expectation", start, Some(Duration::from_secs(30)), &failures);
}

#[test]
fn c6_maxmin_impossibility() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in [6, 8] {
        let inst = gen_theorem6(n, 1).unwrap();
        let free = maxmin_value(&inst, &optimum(&inst).unwrap().0).unwrap();
        let constrained = brute_force_partition_maxmin(&inst, 1).unwrap();
        if free != Score::ONE || constrained != Score::ZERO {
            failures.push(format!("n={n}: unconstrained {free}, best partitioned {constrained}"));
        }
    }
    verdict(6, "max-min collapses to zero under partitioning", start, None, &failures);
}

#[test]
fn c7_oracle_equivalence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..100u64 {
        let n = [4, 6, 8][(i % 3) as usize];
        let k = 1 + (i % 2) as usize;
        let family = if i % 4 < 2 { Family::UniformRandom } else { Family::BinaryRandom };
        let inst = gen_random(n, k, 9000 + i, family).unwrap();
        let flow = solve_max_similarity(&AssignmentProblem::new(&inst)).unwrap().1;
        let bf = brute_force_assignment_opt(&inst, k).unwrap();
        if flow != bf {
            failures.push(format!("instance {i}: flow {flow} != oracle {bf}"));
        }
        if k == 1 {
            let m = solve_k1_matching(&AssignmentProblem::new(&inst)).unwrap().1;
            if m != flow {
                failures.push(format!("instance {i}: matching {m} != flow {flow}"));
            }
        }
        let best = brute_force_partition_opt(&inst, k).unwrap().2;
        for algo in [Algorithm::Random, Algorithm::Cycle, Algorithm::Coloring] {
            let r = run(algo, &inst, i).unwrap();
            let bound = if r.dummy_agents == 0 {
                best
            } else {
                let work = r.working_instance(&inst).unwrap();
                brute_force_partition_opt(&work, k).unwrap().2
            };
            if r.value > bound {
                failures.push(format!("instance {i}: {algo} {} > oracle {bound}", r.value));
            }
        }
        let multi = multi_partition(&inst, k).unwrap().value;
        if multi < best {
            failures.push(format!("instance {i}: multi {multi} < bipartition oracle {best}"));
        }
    }
    verdict(7, "solvers and algorithms agree with the oracles", start, None, &failures);
}

#[test]
fn c8_equitable_coloring() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..500u64 {
        let n = 2 * (2 + (i as usize * 7) % 29);
        let k = 1 + (i as usize % 3).min(n / 2 - 1);
        let family = if i % 2 == 0 { Family::UniformRandom } else { Family::BinaryRandom };
        let inst = gen_random(n, k, 20_000 + i, family).unwrap();
        let g = build_digraph(&inst, &optimum(&inst).unwrap().0).unwrap();
        for r in [2 * k + 1, 2 * k + 2] {
            match equitable_color(&g, r) {
                Ok(c) => {
                    let v = verify_coloring(&g, &c);
                    if !v.is_empty() {
                        failures.push(format!("graph {i} (n={n}, k={k}, r={r}): {:?}", v[0]));
                    }
                }
                Err(e) => failures.push(format!("graph {i} (n={n}, k={k}, r={r}): {e}")),
            }
        }
    }
    verdict(8, "equitable colorings verified on 500 digraphs", start, None, &failures);
}

/// Runs only when `SPASSIGN_DATASET_DIR` names a directory holding
/// `instance.txt` (one-to-one manifest) and `outcomes.csv`.
#[test]
fn c9_conference_data() {
    let start = Instant::now();
    let Some(dir) = std::env::var_os("SPASSIGN_DATASET_DIR") else {
        println!("N/A  C9 conference data: set SPASSIGN_DATASET_DIR to run; covered by C1-C8");
        return;
    };
    let dir = Path::new(&dir);
    let mut failures = Vec::new();
    let manifest = dir.join("instance.txt");
    let out = tempfile::tempdir().unwrap();
    for k in 1..=3usize {
        let mut loss = BTreeMap::new();
        for (algo, trials) in [(Algorithm::Cycle, 1), (Algorithm::Coloring, 1), (Algorithm::Random, 100)] {
            let o = out.path().join(format!("{algo}-{k}"));
            let rec = commands::cmd_partition(&manifest, Some(k), algo, 0, trials, &o, Format::Kv).unwrap();
            let l = if trials == 1 {
                let f = spassign_core::score::parse_ratio(rec.get("loss_fraction").unwrap()).unwrap();
                *f.numer() as f64 / *f.denom() as f64
            } else {
                1.0 - rec.get("mean_ratio").unwrap().parse::<f64>().unwrap()
            };
            loss.insert(algo.as_str(), l);
            if algo == Algorithm::Cycle && k == 1 {
                let ev = commands::cmd_evaluate(&o.join(commands::PARTITION_FILE), &dir.join("outcomes.csv"), Some(&manifest))
                    .unwrap();
                let d: f64 = ev.get("ks_d").unwrap().parse().unwrap();
                if (d - 0.0373).abs() > 0.005 {
                    failures.push(format!("cycle-breaking D = {d}, expected 0.0373"));
                }
            }
        }
        if !(loss["cycle"] < loss["coloring"] && loss["coloring"] < loss["random"]) {
            failures.push(format!("k={k}: loss ordering violated {loss:?}"));
        }
    }
    verdict(9, "conference data", start, None, &failures);
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn c10_reproducible_outputs() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let base = tempfile::tempdir().unwrap();
    let session = |name: &str| {
        let d = base.path().join(name);
        let sh = |args: &[&str]| {
            let o = Command::new(env!("CARGO_BIN_EXE_spassign")).current_dir(&d).args(args).output().unwrap();
            assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            o.stdout
        };
        fs::create_dir_all(&d).unwrap();
        let mut stdout = Vec::new();
        stdout.extend(sh(&["generate", "--family", "uniform-random", "--n", "10", "--k", "2", "--seed", "42", "--out", "u.txt"]));
        stdout.extend(sh(&["generate", "--family", "binary-random", "--n", "12", "--k", "2", "--seed", "3", "--papers", "9", "--max-authors", "2", "--agent-load", "3", "--out", "g.txt"]));
        for (algo, f) in [("random", "kv"), ("cycle", "csv"), ("coloring", "json"), ("multi", "kv")] {
            stdout.extend(sh(&["--format", f, "partition", "--instance", "u.txt", "--algo", algo, "--seed", "7", "--trials", "3", "--out", algo]));
        }
        stdout.extend(sh(&["partition", "--instance", "g.txt", "--algo", "random-components", "--seed", "1", "--trials", "4", "--out", "rc"]));
        stdout.extend(sh(&["solve", "--instance", "u.txt", "--out", "solve"]));
        stdout.extend(sh(&["oracle", "--instance", "u.txt", "--out", "oracle"]));
        (tree(&d), stdout)
    };
    let (a, out_a) = session("a");
    let (b, out_b) = session("b");
    if a.keys().ne(b.keys()) {
        failures.push("different file sets".into());
    }
    for (name, bytes) in &a {
        if b.get(name) != Some(bytes) {
            failures.push(format!("{name} differs"));
        }
    }
    if out_a != out_b {
        failures.push("stdout differs".into());
    }
    println!("    compared {} files", a.len());
    verdict(10, "seeded commands are byte-reproducible", start, None, &failures);
}
