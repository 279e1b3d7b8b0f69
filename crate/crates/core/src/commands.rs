//! Command implementations behind the `spassign` binary. Each command reads
//! its inputs from files, writes its results atomically and returns the
//! summary record that the binary prints.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::assignment::{Assignment, Partition};
use crate::error::{Error, Result};
use crate::generators::{gen_random_general, Family, GeneratorSpec};
use crate::instance::{Instance, Loads};
use crate::io::{self, Format, Record};
use crate::metrics::{partition_sides, validate, Report, Verdict};
use crate::oracles::brute_force_partition_opt;
use crate::partition::{self, Algorithm, PartitionResult};
use crate::score::{format_ratio, Score};
use crate::solver::optimum;
use crate::stats::{ks_multi_samples, subset_outcome_counts, subset_scores};

pub const ASSIGNMENT_FILE: &str = "assignment.csv";
pub const PARTITION_FILE: &str = "partition.txt";
pub const REPORT_STEM: &str = "report";
pub const AGGREGATE_STEM: &str = "aggregate";

pub fn report_path(dir: &Path, stem: &str, format: Format) -> PathBuf {
    dir.join(format!("{stem}.{}", format.extension()))
}

/// Reads an instance; `k` replaces the load of a one-to-one instance.
pub fn load_instance(path: &Path, k: Option<usize>) -> Result<Instance> {
    let inst = io::read_instance(path)?;
    match k {
        None => Ok(inst),
        Some(k) if inst.is_one_to_one() => inst.with_k(k),
        Some(_) => Err(Error::Precondition(
            "general instances take their loads from the manifest; drop --k".into(),
        )),
    }
}

fn write_outputs(
    dir: &Path,
    assignment: &Assignment,
    is_dummy: &dyn Fn(usize, usize) -> bool,
    partition: Option<&Partition>,
    record: &Record,
    format: Format,
) -> Result<()> {
    io::write_atomic(&dir.join(ASSIGNMENT_FILE), io::format_assignment(assignment, is_dummy).as_bytes())?;
    if let Some(p) = partition {
        io::write_atomic(&dir.join(PARTITION_FILE), io::format_partition(p)?.as_bytes())?;
    }
    io::write_record(&report_path(dir, REPORT_STEM, format), record, format)
}

/// Unconstrained optimum.
pub fn cmd_solve(instance_path: &Path, k: Option<usize>, out_dir: &Path, format: Format) -> Result<Record> {
    let inst = load_instance(instance_path, k)?;
    let (m, opt) = optimum(&inst)?;
    let rec = io::report_record(&Report::new(&inst, &m, None, opt)?);
    write_outputs(out_dir, &m, &|_, _| false, None, &rec, format)?;
    Ok(rec)
}

fn result_record(original: &Instance, result: &PartitionResult, opt: Score) -> Result<Record> {
    let mut rec = Record::new();
    rec.push("algorithm", result.algorithm);
    if let Some(seed) = result.seed {
        rec.push("seed", seed);
    }
    rec.push("dummy_agents", result.dummy_agents);
    rec.fields.extend(io::report_record(&result.report(original, opt)?).fields);
    Ok(rec)
}

fn write_result(dir: &Path, original: &Instance, result: &PartitionResult, opt: Score, format: Format) -> Result<Record> {
    let rec = result_record(original, result, opt)?;
    let dummy = |a, p| result.is_dummy_pair(original, a, p);
    write_outputs(dir, &result.assignment, &dummy, Some(&result.partition), &rec, format)?;
    Ok(rec)
}

/// Mean and standard error of the mean (sample deviation over `sqrt(n)`).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn fixed6(x: f64) -> String {
    format!("{x:.6}")
}

/// Runs a partitioning algorithm. With one trial the files go straight into
/// `out_dir`; otherwise trial `t` (seed `seed + t`) goes into
/// `out_dir/trial_NNNN` and an aggregate report is added. Every trial is
/// re-validated from the written files.
pub fn cmd_partition(
    instance_path: &Path,
    k: Option<usize>,
    algorithm: Algorithm,
    seed: u64,
    trials: usize,
    out_dir: &Path,
    format: Format,
) -> Result<Record> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let inst = load_instance(instance_path, k)?;
    let opt = optimum(&inst)?.1;
    let mut totals = Vec::with_capacity(trials);
    let mut last = Record::new();
    for t in 0..trials {
        let dir = if trials == 1 {
            out_dir.to_path_buf()
        } else {
            out_dir.join(format!("trial_{t:04}"))
        };
        let result = partition::run(algorithm, &inst, seed.wrapping_add(t as u64))
            .map_err(|e| with_context(e, &format!("{algorithm}")))?;
        last = write_result(&dir, &inst, &result, opt, format)?;
        let verdict = validate_files(
            instance_path,
            k,
            &dir.join(ASSIGNMENT_FILE),
            Some(&dir.join(PARTITION_FILE)),
        )?;
        if !verdict.is_valid() {
            return Err(Error::Internal(format!(
                "{algorithm} produced an assignment that fails validation: {}",
                verdict.violations[0]
            )));
        }
        totals.push(result.value);
    }
    if trials == 1 {
        return Ok(last);
    }
    let values: Vec<f64> = totals.iter().map(|s| s.to_f64()).collect();
    let (mean, stderr) = mean_stderr(&values);
    let ratio = |x: f64| if opt.units() > 0 { x / opt.to_f64() } else { 1.0 };
    let mut rec = Record::new();
    rec.push("algorithm", algorithm)
        .push("trials", trials)
        .push("seed", seed)
        .push("opt_similarity", opt)
        .push("mean_total_similarity", fixed6(mean))
        .push("stderr_total_similarity", fixed6(stderr))
        .push("mean_ratio", fixed6(ratio(mean)))
        .push("stderr_ratio", fixed6(ratio(stderr)))
        .push("min_total_similarity", totals.iter().copied().min().unwrap_or(Score::ZERO))
        .push("max_total_similarity", totals.iter().copied().max().unwrap_or(Score::ZERO))
        .push_list("trial_totals", &totals);
    io::write_record(&report_path(out_dir, AGGREGATE_STEM, format), &rec, format)?;
    Ok(rec)
}

fn with_context(e: Error, what: &str) -> Error {
    match e {
        Error::Infeasible(m) => Error::Infeasible(format!("{what}: {m}")),
        Error::Precondition(m) => Error::Precondition(format!("{what}: {m}")),
        Error::SizeGuard(m) => Error::SizeGuard(format!("{what}: {m}")),
        Error::Internal(m) => Error::Internal(format!("{what}: {m}")),
        other => other,
    }
}

/// Writes a generated instance. `papers` switches the random families to
/// general authorship with up to `max_authors` authors per paper and the
/// loads `agent_load` (default `k`) and `k`.
#[allow(clippy::too_many_arguments)]
pub fn cmd_generate(
    family: Family,
    n: usize,
    k: usize,
    seed: u64,
    papers: Option<usize>,
    max_authors: usize,
    agent_load: Option<usize>,
    out: &Path,
) -> Result<Record> {
    let inst = match papers {
        None => GeneratorSpec { family, n, k, seed }.generate()?,
        Some(m) => {
            let loads = Loads {
                agent: agent_load.unwrap_or(k),
                paper: k,
            };
            gen_random_general(n, m, loads, max_authors, seed, family)?
        }
    };
    io::write_instance(out, &inst)?;
    let mut rec = Record::new();
    rec.push("family", family)
        .push("mode", inst.mode().as_str())
        .push("agents", inst.n_agents())
        .push("papers", inst.n_papers())
        .push("agent_load", inst.loads().agent)
        .push("paper_load", inst.loads().paper)
        .push("seed", seed)
        .push("manifest", out.display());
    Ok(rec)
}

/// Best balanced bipartition by exhaustive search. An odd number of agents
/// is padded with one zero-similarity agent first.
pub fn cmd_oracle(instance_path: &Path, k: Option<usize>, out_dir: &Path, format: Format) -> Result<Record> {
    let inst = load_instance(instance_path, k)?;
    if !inst.is_one_to_one() {
        return Err(Error::Precondition("the partition oracle expects a one-to-one instance".into()));
    }
    let opt = optimum(&inst)?.1;
    let pad = inst.n_agents() % 2;
    let work = inst.padded(pad)?;
    let (part, m, value) = brute_force_partition_opt(&work, work.k())?;
    let n = inst.n_agents();
    let mut rec = Record::new();
    rec.push("algorithm", "oracle").push("dummy_agents", pad);
    rec.fields
        .extend(io::report_record(&Report::new(&work, &m, Some(&part), opt)?).fields);
    rec.push("ratio", format_ratio(&ratio_or_one(value, opt)));
    write_outputs(out_dir, &m, &|a, p| a >= n || p >= n, Some(&part), &rec, format)?;
    Ok(rec)
}

fn ratio_or_one(value: Score, opt: Score) -> num_rational::Ratio<i64> {
    if opt.units() > 0 {
        value.ratio(opt)
    } else {
        num_rational::Ratio::from_integer(1)
    }
}

/// Per-subset decision histograms, mean scores and the largest pairwise
/// two-sample test. Without a paper section in the partition file, papers
/// are placed with their authors (which needs `instance_path` in general
/// mode).
pub fn cmd_evaluate(partition_path: &Path, outcomes_path: &Path, instance_path: Option<&Path>) -> Result<Record> {
    let mut part = io::read_partition(partition_path)?;
    let outcomes = io::read_outcomes(outcomes_path)?;
    if let (None, Some(ip)) = (part.paper_subsets(), instance_path) {
        let inst = io::read_instance(ip)?;
        let inst = inst.padded(if inst.is_one_to_one() {
            part.subsets().iter().map(Vec::len).sum::<usize>().saturating_sub(inst.n_agents())
        } else {
            0
        })?;
        let (_, papers) = partition_sides(&inst, &part)?;
        let mut groups = vec![Vec::new(); part.num_subsets()];
        for (p, &s) in papers.iter().enumerate() {
            groups[s].push(p);
        }
        part = part.with_paper_subsets(groups);
    }
    let counts = subset_outcome_counts(&part, &outcomes);
    let scores = subset_scores(&part, &outcomes);
    let mut rec = Record::new();
    rec.push("subsets", part.num_subsets());
    for (i, (hist, sc)) in counts.iter().zip(&scores).enumerate() {
        let papers: usize = hist.values().sum();
        rec.push(format!("subset_{i}_papers"), papers);
        rec.push_list(format!("subset_{i}_decisions"), hist.iter().map(|(d, c)| format!("{d}:{c}")));
        rec.push(format!("subset_{i}_scored"), sc.len());
        let vals: Vec<f64> = sc.iter().map(|s| s.to_f64()).collect();
        rec.push(format!("subset_{i}_mean_score"), fixed6(mean_stderr(&vals).0));
    }
    let ks = ks_multi_samples(&scores)?;
    rec.push_list("ks_pair", [ks.pair.0, ks.pair.1])
        .push("ks_d", fixed6(ks.result.d))
        .push("ks_d_exact", format_ratio(&ks.result.d_exact))
        .push("ks_p", fixed6(ks.result.p))
        .push("ks_n_a", ks.result.n_a)
        .push("ks_n_b", ks.result.n_b);
    Ok(rec)
}

/// Validates assignment and partition files against an instance file.
///
/// Files produced for a padded instance list more agents than the instance
/// has; the instance is padded to match, and every pair touching a padding
/// agent must carry the dummy flag (and no other pair may).
pub fn validate_files(
    instance_path: &Path,
    k: Option<usize>,
    assignment_path: &Path,
    partition_path: Option<&Path>,
) -> Result<Verdict> {
    let inst = load_instance(instance_path, k)?;
    let file = io::read_assignment(assignment_path)?;
    let part = partition_path.map(io::read_partition).transpose()?;
    let n = inst.n_agents();
    let mut width = file
        .assignment
        .pairs()
        .iter()
        .map(|&(a, p)| a.max(p) + 1)
        .max()
        .unwrap_or(0);
    if let Some(p) = &part {
        width = width.max(p.subsets().iter().map(Vec::len).sum());
    }
    let work = if inst.is_one_to_one() && width > n {
        inst.padded(width - n)?
    } else {
        inst
    };
    let expected: BTreeSet<(usize, usize)> = if work.is_one_to_one() {
        let pairs = file.assignment.pairs().iter().copied();
        pairs.filter(|&(a, p)| a >= n || p >= n).collect()
    } else {
        BTreeSet::new()
    };
    if expected != file.dummy {
        return Err(Error::InvalidAssignment(format!(
            "{}: dummy flags must mark exactly the pairs that touch padding agents (indices >= {n})",
            assignment_path.display()
        )));
    }
    Ok(validate(&work, &file.assignment, part.as_ref()))
}

/// Record listing every violation; fails with an invalid-assignment error
/// when there is one.
pub fn cmd_validate(
    instance_path: &Path,
    k: Option<usize>,
    assignment_path: &Path,
    partition_path: Option<&Path>,
) -> Result<(Record, Verdict)> {
    let verdict = validate_files(instance_path, k, assignment_path, partition_path)?;
    let mut rec = Record::new();
    rec.push("valid", verdict.is_valid())
        .push("violations", verdict.violations.len())
        .push_list("details", verdict.violations.iter().map(|v| v.to_string().replace([',', ';'], " ")));
    Ok((rec, verdict))
}
