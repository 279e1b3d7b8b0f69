//! Text file formats: instance manifests, similarity matrices, authorship,
//! assignments, partitions, outcome tables and reports.
//!
//! Indices are 0-based everywhere. Every writer is deterministic and every
//! reader accepts what the writer produces, so write, read, write gives the
//! same bytes. Writes go to a temporary file that is then renamed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::assignment::{Assignment, Partition, PartitionKind};
use crate::error::{Error, Result};
use crate::instance::{Instance, Loads, Mode};
use crate::metrics::Report;
use crate::score::{format_ratio, parse_decimal, parse_ratio, Score, SCALE};
use crate::stats::OutcomeTable;

pub const ASSIGNMENT_HEADER: &str = "agent_id,paper_id,dummy";
pub const AUTHORSHIP_HEADER: &str = "agent_id,paper_id";
pub const OUTCOMES_HEADER: &str = "paper_id,decision,mean_score";
const PAPERS_MARKER: &str = "# papers";

/// Writes `contents` next to `path` under a temporary name, then renames it
/// into place. Missing parent directories are created.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::other("not a file path")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with their 1-based line numbers, trailing `\r` removed.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn parse_index(file: &str, line: usize, column: usize, text: &str, what: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| Error::parse(file, line, column, format!("{what} must be a non-negative integer, got {:?}", text.trim())))
}

fn split_fields(file: &str, line: usize, text: &str, expected: &[usize]) -> Result<Vec<String>> {
    let fields: Vec<String> = text.split(',').map(|f| f.trim().to_string()).collect();
    if !expected.contains(&fields.len()) {
        let want = expected.iter().map(usize::to_string).collect::<Vec<_>>().join(" or ");
        return Err(Error::parse(
            file,
            line,
            fields.len().min(*expected.iter().max().unwrap_or(&1) + 1),
            format!("expected {want} fields, got {}", fields.len()),
        ));
    }
    Ok(fields)
}

// ---------------------------------------------------------------------------
// similarity matrix and authorship

/// Dense comma-separated matrix, one agent per row, decimals in `[0, 1]`
/// with at most six fractional digits.
pub fn parse_similarity(text: &str, file: &str, agents: usize, papers: usize) -> Result<Vec<Score>> {
    let mut out = Vec::with_capacity(agents * papers);
    let mut rows = 0;
    for (line, row) in lines(text) {
        if rows == agents {
            return Err(Error::parse(file, line, 1, format!("more than {agents} rows")));
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != papers {
            return Err(Error::parse(
                file,
                line,
                fields.len().min(papers + 1),
                format!("row has {} values, expected {papers}", fields.len()),
            ));
        }
        for (c, f) in fields.iter().enumerate() {
            let s = parse_decimal(f).map_err(|e| Error::parse(file, line, c + 1, e.to_string()))?;
            if !(0..=SCALE).contains(&s.units()) {
                return Err(Error::parse(file, line, c + 1, format!("similarity {s} lies outside [0, 1]")));
            }
            out.push(s);
        }
        rows += 1;
    }
    if rows != agents {
        let last = text.lines().count();
        return Err(Error::parse(file, last + 1, 1, format!("found {rows} rows, expected {agents}")));
    }
    Ok(out)
}

pub fn format_similarity(instance: &Instance) -> String {
    let mut s = String::new();
    for row in instance.similarity_rows() {
        let cells: Vec<String> = row.iter().map(Score::to_string).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// `agent_id,paper_id` pairs, one per line, with an optional header.
pub fn parse_authorship(text: &str, file: &str, agents: usize, papers: usize) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (line, row) in lines(text) {
        if line == 1 && row.trim() == AUTHORSHIP_HEADER {
            continue;
        }
        let f = split_fields(file, line, row, &[2])?;
        let a = parse_index(file, line, 1, &f[0], "agent_id")?;
        let p = parse_index(file, line, 2, &f[1], "paper_id")?;
        if a >= agents {
            return Err(Error::parse(file, line, 1, format!("agent {a} out of range (agents = {agents})")));
        }
        if p >= papers {
            return Err(Error::parse(file, line, 2, format!("paper {p} out of range (papers = {papers})")));
        }
        out.push((a, p));
    }
    Ok(out)
}

pub fn format_authorship(instance: &Instance) -> String {
    let mut s = format!("{AUTHORSHIP_HEADER}\n");
    for (a, p) in instance.authorship_pairs() {
        let _ = writeln!(s, "{a},{p}");
    }
    s
}

// ---------------------------------------------------------------------------
// instance manifest

/// Contents of an instance manifest (`key=value` lines). File paths are
/// relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub mode: Mode,
    pub agents: usize,
    pub papers: usize,
    pub loads: Loads,
    pub similarity: PathBuf,
    pub authorship: Option<PathBuf>,
    /// Agents that may not review.
    pub ineligible: Vec<usize>,
}

pub fn parse_manifest(text: &str, file: &str) -> Result<Manifest> {
    let mut seen: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (line, row) in lines(text) {
        if row.trim_start().starts_with('#') {
            continue;
        }
        let (k, v) = row
            .split_once('=')
            .ok_or_else(|| Error::parse(file, line, 1, "expected key=value"))?;
        let k = k.trim();
        if !matches!(
            k,
            "mode" | "agents" | "papers" | "agent_load" | "paper_load" | "similarity" | "authorship" | "ineligible"
        ) {
            return Err(Error::parse(file, line, 1, format!("unknown key {k:?}")));
        }
        if seen.insert(k.to_string(), (line, v.trim().to_string())).is_some() {
            return Err(Error::parse(file, line, 1, format!("duplicate key {k:?}")));
        }
    }
    let get = |k: &str| -> Result<&(usize, String)> {
        seen.get(k)
            .ok_or_else(|| Error::parse(file, 0, 0, format!("missing key {k:?}")))
    };
    let num = |k: &str| -> Result<usize> {
        let (line, v) = get(k)?;
        parse_index(file, *line, 2, v, k)
    };
    let (mode_line, mode_text) = get("mode")?;
    let mode: Mode = mode_text
        .parse()
        .map_err(|_| Error::parse(file, *mode_line, 2, format!("mode must be one-to-one or general, got {mode_text:?}")))?;
    let agents = num("agents")?;
    let papers = if seen.contains_key("papers") { num("papers")? } else { agents };
    let agent_load = num("agent_load")?;
    let paper_load = if seen.contains_key("paper_load") { num("paper_load")? } else { agent_load };
    let ineligible = match seen.get("ineligible") {
        Some((line, v)) if !v.is_empty() => v
            .split(',')
            .map(|x| parse_index(file, *line, 2, x, "ineligible agent"))
            .collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    Ok(Manifest {
        mode,
        agents,
        papers,
        loads: Loads {
            agent: agent_load,
            paper: paper_load,
        },
        similarity: PathBuf::from(&get("similarity")?.1),
        authorship: seen.get("authorship").map(|(_, v)| PathBuf::from(v)),
        ineligible,
    })
}

pub fn format_manifest(m: &Manifest) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode={}", m.mode.as_str());
    let _ = writeln!(s, "agents={}", m.agents);
    let _ = writeln!(s, "papers={}", m.papers);
    let _ = writeln!(s, "agent_load={}", m.loads.agent);
    let _ = writeln!(s, "paper_load={}", m.loads.paper);
    let _ = writeln!(s, "similarity={}", m.similarity.display());
    if let Some(a) = &m.authorship {
        let _ = writeln!(s, "authorship={}", a.display());
    }
    if !m.ineligible.is_empty() {
        let list: Vec<String> = m.ineligible.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "ineligible={}", list.join(","));
    }
    s
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Reads a manifest and the files it names.
pub fn read_instance(manifest_path: &Path) -> Result<Instance> {
    let file = manifest_path.display().to_string();
    let m = parse_manifest(&read_text(manifest_path)?, &file)?;
    let dir = base_dir(manifest_path);
    let sim_path = dir.join(&m.similarity);
    let sim = parse_similarity(&read_text(&sim_path)?, &sim_path.display().to_string(), m.agents, m.papers)?;
    let authorship = match &m.authorship {
        Some(p) => {
            let p = dir.join(p);
            Some(parse_authorship(&read_text(&p)?, &p.display().to_string(), m.agents, m.papers)?)
        }
        None => None,
    };
    let inst = match m.mode {
        Mode::OneToOne => {
            if m.agents != m.papers || m.loads.agent != m.loads.paper {
                return Err(Error::InvalidInstance(format!(
                    "{file}: one-to-one mode needs agents = papers and agent_load = paper_load"
                )));
            }
            if let Some(pairs) = &authorship {
                let set: BTreeSet<_> = pairs.iter().copied().collect();
                if set != (0..m.agents).map(|i| (i, i)).collect() {
                    return Err(Error::InvalidInstance(format!(
                        "{file}: one-to-one mode needs agent i to author exactly paper i"
                    )));
                }
            }
            Instance::one_to_one(m.agents, &sim, m.loads.agent)?
        }
        Mode::General => {
            let pairs = authorship.ok_or_else(|| {
                Error::InvalidInstance(format!("{file}: general mode needs an authorship file"))
            })?;
            Instance::general(m.agents, m.papers, &sim, &pairs, m.loads)?
        }
    };
    if let Some(&a) = m.ineligible.iter().find(|&&a| a >= m.agents) {
        return Err(Error::InvalidInstance(format!("{file}: ineligible agent {a} out of range")));
    }
    Ok(inst.with_ineligible_reviewers(&m.ineligible))
}

/// Writes `manifest_path` plus `<stem>.sim.csv` and, in general mode,
/// `<stem>.authors.csv` beside it.
pub fn write_instance(manifest_path: &Path, instance: &Instance) -> Result<()> {
    let stem = manifest_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    let dir = base_dir(manifest_path);
    let sim_name = PathBuf::from(format!("{stem}.sim.csv"));
    let authors_name = (instance.mode() == Mode::General).then(|| PathBuf::from(format!("{stem}.authors.csv")));
    let m = Manifest {
        mode: instance.mode(),
        agents: instance.n_agents(),
        papers: instance.n_papers(),
        loads: instance.loads(),
        similarity: sim_name.clone(),
        authorship: authors_name.clone(),
        ineligible: (0..instance.n_agents()).filter(|&a| !instance.is_eligible_reviewer(a)).collect(),
    };
    write_atomic(&dir.join(&sim_name), format_similarity(instance).as_bytes())?;
    if let Some(a) = authors_name {
        write_atomic(&dir.join(a), format_authorship(instance).as_bytes())?;
    }
    write_atomic(manifest_path, format_manifest(&m).as_bytes())
}

// ---------------------------------------------------------------------------
// assignments

/// An assignment read from a file, with the pairs flagged as involving
/// padding agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentFile {
    pub assignment: Assignment,
    pub dummy: BTreeSet<(usize, usize)>,
}

pub fn format_assignment(assignment: &Assignment, is_dummy: &dyn Fn(usize, usize) -> bool) -> String {
    let mut s = format!("{ASSIGNMENT_HEADER}\n");
    for &(a, p) in assignment.pairs() {
        let _ = writeln!(s, "{a},{p},{}", u8::from(is_dummy(a, p)));
    }
    s
}

/// `agent_id,paper_id[,dummy]` lines with an optional header.
pub fn parse_assignment(text: &str, file: &str) -> Result<AssignmentFile> {
    let mut pairs = Vec::new();
    let mut dummy = BTreeSet::new();
    for (line, row) in lines(text) {
        if line == 1 && (row.trim() == ASSIGNMENT_HEADER || row.trim() == AUTHORSHIP_HEADER) {
            continue;
        }
        let f = split_fields(file, line, row, &[2, 3])?;
        let a = parse_index(file, line, 1, &f[0], "agent_id")?;
        let p = parse_index(file, line, 2, &f[1], "paper_id")?;
        if f.len() == 3 {
            match f[2].as_str() {
                "0" => {}
                "1" => {
                    dummy.insert((a, p));
                }
                other => return Err(Error::parse(file, line, 3, format!("dummy flag must be 0 or 1, got {other:?}"))),
            }
        }
        pairs.push((a, p));
    }
    Ok(AssignmentFile {
        assignment: Assignment::from_pairs(pairs),
        dummy,
    })
}

pub fn read_assignment(path: &Path) -> Result<AssignmentFile> {
    parse_assignment(&read_text(path)?, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// partitions

/// Subset index of each agent, one per line, preceded by a `# kind=...`
/// line. When the partition places papers explicitly, a `# papers` line
/// follows with one subset index per paper.
pub fn format_partition(partition: &Partition) -> Result<String> {
    let labels = |subsets: &[Vec<usize>], what: &str| -> Result<Vec<usize>> {
        let n = subsets.iter().flatten().map(|&x| x + 1).max().unwrap_or(0);
        let mut l = vec![usize::MAX; n];
        for (s, members) in subsets.iter().enumerate() {
            for &x in members {
                if l[x] != usize::MAX {
                    return Err(Error::InvalidAssignment(format!("{what} {x} lies in two subsets")));
                }
                l[x] = s;
            }
        }
        if let Some(x) = l.iter().position(|&s| s == usize::MAX) {
            return Err(Error::InvalidAssignment(format!("{what} {x} lies in no subset")));
        }
        Ok(l)
    };
    let kind = match partition.kind() {
        PartitionKind::Bipartition => "bipartition",
        PartitionKind::Multi => "multi",
    };
    let mut s = format!("# kind={kind} subsets={}\n", partition.num_subsets());
    for l in labels(partition.subsets(), "agent")? {
        let _ = writeln!(s, "{l}");
    }
    if let Some(papers) = partition.paper_subsets() {
        s.push_str(PAPERS_MARKER);
        s.push('\n');
        for l in labels(papers, "paper")? {
            let _ = writeln!(s, "{l}");
        }
    }
    Ok(s)
}

pub fn parse_partition(text: &str, file: &str) -> Result<Partition> {
    let mut kind = None;
    let mut count = None;
    let mut agents = Vec::new();
    let mut papers: Option<Vec<usize>> = None;
    for (line, row) in lines(text) {
        let row = row.trim();
        if row == PAPERS_MARKER {
            if papers.is_some() {
                return Err(Error::parse(file, line, 1, "second paper section"));
            }
            papers = Some(Vec::new());
            continue;
        }
        if let Some(header) = row.strip_prefix('#') {
            for item in header.split_whitespace() {
                match item.split_once('=') {
                    Some(("kind", "bipartition")) => kind = Some(PartitionKind::Bipartition),
                    Some(("kind", "multi")) => kind = Some(PartitionKind::Multi),
                    Some(("subsets", v)) => count = Some(parse_index(file, line, 1, v, "subsets")?),
                    _ => {}
                }
            }
            continue;
        }
        let l = parse_index(file, line, 1, row, "subset index")?;
        papers.as_mut().unwrap_or(&mut agents).push(l);
    }
    let used = agents.iter().chain(papers.iter().flatten()).map(|&l| l + 1).max().unwrap_or(0);
    let count = count.unwrap_or(used).max(used);
    let kind = kind.unwrap_or(if count <= 2 { PartitionKind::Bipartition } else { PartitionKind::Multi });
    let group = |labels: &[usize]| {
        let mut g = vec![Vec::new(); count.max(if kind == PartitionKind::Bipartition { 2 } else { 0 })];
        for (x, &l) in labels.iter().enumerate() {
            g[l].push(x);
        }
        g
    };
    let mut part = match kind {
        PartitionKind::Bipartition => {
            if count > 2 {
                return Err(Error::parse(file, 1, 1, format!("a bipartition has 2 subsets, found {count}")));
            }
            let g = group(&agents);
            Partition::bipartition(g[0].clone(), g[1].clone())
        }
        PartitionKind::Multi => Partition::multi(group(&agents)),
    };
    if let Some(p) = papers {
        part = part.with_paper_subsets(group(&p));
    }
    Ok(part)
}

pub fn read_partition(path: &Path) -> Result<Partition> {
    parse_partition(&read_text(path)?, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// outcomes

/// `paper_id,decision,mean_score` lines with an optional header.
pub fn parse_outcomes(text: &str, file: &str) -> Result<OutcomeTable> {
    let mut t = OutcomeTable::new();
    for (line, row) in lines(text) {
        if line == 1 && row.trim() == OUTCOMES_HEADER {
            continue;
        }
        let f = split_fields(file, line, row, &[3])?;
        let p = parse_index(file, line, 1, &f[0], "paper_id")?;
        if f[1].is_empty() {
            return Err(Error::parse(file, line, 2, "empty decision"));
        }
        let score = parse_decimal(&f[2]).map_err(|e| Error::parse(file, line, 3, e.to_string()))?;
        t.insert(p, f[1].clone(), score)
            .map_err(|_| Error::parse(file, line, 1, format!("paper {p} appears twice")))?;
    }
    Ok(t)
}

pub fn format_outcomes(table: &OutcomeTable) -> String {
    let mut s = format!("{OUTCOMES_HEADER}\n");
    for (p, o) in &table.outcomes {
        let _ = writeln!(s, "{p},{},{}", o.decision, o.mean_score);
    }
    s
}

pub fn read_outcomes(path: &Path) -> Result<OutcomeTable> {
    parse_outcomes(&read_text(path)?, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// reports

/// Output encoding of reports. All three carry the same fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// `key=value` lines; list items separated by `,`.
    #[default]
    Kv,
    /// Header row of keys and one row of values; list items separated by `;`.
    Csv,
    /// One object; lists are arrays, all scalars are strings.
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Kv => "txt",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    fn list_separator(self) -> &'static str {
        match self {
            Format::Csv => ";",
            _ => ",",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kv" | "txt" => Ok(Format::Kv),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Precondition(format!("unknown format {s:?} (kv, csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    Scalar(String),
    List(Vec<String>),
}

/// Ordered key/value record, the common shape of every report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Record {
    pub fields: Vec<(String, Field)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.fields.push((key.into(), Field::Scalar(value.to_string())));
        self
    }

    pub fn push_list<T: ToString>(&mut self, key: impl Into<String>, items: impl IntoIterator<Item = T>) -> &mut Self {
        let items = items.into_iter().map(|x| x.to_string()).collect();
        self.fields.push((key.into(), Field::List(items)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).and_then(|(_, v)| match v {
            Field::Scalar(s) => Some(s.as_str()),
            Field::List(_) => None,
        })
    }

    /// List items; a scalar read back from text is split on `,` or `;`.
    pub fn get_list(&self, key: &str) -> Option<Vec<String>> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| match v {
            Field::List(items) => items.clone(),
            Field::Scalar(s) if s.is_empty() => Vec::new(),
            Field::Scalar(s) => s.split([',', ';']).map(str::to_string).collect(),
        })
    }

    pub fn render(&self, format: Format) -> String {
        let text = |v: &Field| match v {
            Field::Scalar(s) => s.clone(),
            Field::List(items) => items.join(format.list_separator()),
        };
        match format {
            Format::Kv => {
                let mut s = String::new();
                for (k, v) in &self.fields {
                    let _ = writeln!(s, "{k}={}", text(v));
                }
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let _ = w.write_record(self.fields.iter().map(|(k, _)| k.as_str()));
                let _ = w.write_record(self.fields.iter().map(|(_, v)| text(v)));
                String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
            }
            Format::Json => {
                let mut obj = Map::new();
                for (k, v) in &self.fields {
                    let val = match v {
                        Field::Scalar(s) => Value::String(s.clone()),
                        Field::List(items) => Value::Array(items.iter().cloned().map(Value::String).collect()),
                    };
                    obj.insert(k.clone(), val);
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }

    pub fn parse(text: &str, format: Format, file: &str) -> Result<Record> {
        let mut rec = Record::new();
        match format {
            Format::Kv => {
                for (line, row) in lines(text) {
                    let (k, v) = row
                        .split_once('=')
                        .ok_or_else(|| Error::parse(file, line, 1, "expected key=value"))?;
                    rec.push(k.trim(), v.trim());
                }
            }
            Format::Csv => {
                let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
                let rows: Vec<csv::StringRecord> = r
                    .records()
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| {
                        let line = e.position().map_or(0, |p| p.line() as usize);
                        Error::parse(file, line, 1, e.to_string())
                    })?;
                if rows.len() != 2 {
                    return Err(Error::parse(file, 1, 1, format!("expected a header and one row, got {} rows", rows.len())));
                }
                for (k, v) in rows[0].iter().zip(rows[1].iter()) {
                    rec.push(k, v);
                }
            }
            Format::Json => {
                let v: Value = serde_json::from_str(text).map_err(|e| Error::parse(file, e.line(), e.column(), e.to_string()))?;
                let obj = v.as_object().ok_or_else(|| Error::parse(file, 1, 1, "expected a JSON object"))?;
                for (k, v) in obj {
                    let field = match v {
                        Value::String(s) => Field::Scalar(s.clone()),
                        Value::Array(items) => Field::List(
                            items
                                .iter()
                                .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                                .collect(),
                        ),
                        other => Field::Scalar(other.to_string()),
                    };
                    rec.fields.push((k.clone(), field));
                }
            }
        }
        Ok(rec)
    }
}

pub fn report_record(report: &Report) -> Record {
    let mut r = Record::new();
    r.push("total_similarity", report.total_similarity)
        .push("opt_similarity", report.opt_similarity)
        .push("loss_fraction", format_ratio(&report.loss_fraction))
        .push("maxmin_value", report.maxmin_value)
        .push_list("subset_sizes", &report.subset_sizes);
    r
}

/// Extracts the report fields of a record; other keys are ignored.
pub fn report_from_record(rec: &Record, file: &str) -> Result<Report> {
    let need = |k: &str| rec.get(k).ok_or_else(|| Error::parse(file, 0, 0, format!("missing key {k:?}")));
    let score = |k: &str| -> Result<Score> {
        parse_decimal(need(k)?).map_err(|e| Error::parse(file, 0, 0, format!("{k}: {e}")))
    };
    let loss = parse_ratio(need("loss_fraction")?)
        .ok_or_else(|| Error::parse(file, 0, 0, "loss_fraction must be a fraction a/b"))?;
    let sizes = rec
        .get_list("subset_sizes")
        .unwrap_or_default()
        .iter()
        .map(|x| x.trim().parse().map_err(|_| Error::parse(file, 0, 0, format!("bad subset size {x:?}"))))
        .collect::<Result<Vec<usize>>>()?;
    Ok(Report {
        total_similarity: score("total_similarity")?,
        opt_similarity: score("opt_similarity")?,
        loss_fraction: loss,
        maxmin_value: score("maxmin_value")?,
        subset_sizes: sizes,
    })
}

pub fn write_record(path: &Path, record: &Record, format: Format) -> Result<()> {
    write_atomic(path, record.render(format).as_bytes())
}

pub fn read_record(path: &Path, format: Format) -> Result<Record> {
    Record::parse(&read_text(path)?, format, &path.display().to_string())
}
