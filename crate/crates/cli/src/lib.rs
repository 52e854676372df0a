//! Command-line front end for `dessin-forge`.
//!
//! Every subcommand produces a deterministic report (JSON by default) and an
//! exit code: 0 success, 1 a check failed, 2 invalid input, 3 the request
//! exceeds a feasibility guard.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use dessin_forge::counting::{block_partitions, CountError, CountReport, ORACLE_GUARD};
use dessin_forge::dessin::uniform_passports;
use dessin_forge::group::{block_divisors, monodromy_group, transitive_centralizer};
use dessin_forge::search::{table_fixtures, SearchError};
use dessin_forge::{
    alternating_witness, enumerate_dessins, genus0_dessin, is_primitive, regular_tree_dessin, search_trivial_aut,
    Dessin, DessinError, DessinJson, EnumConfig, Genus0Kind, Passport, SearchConfig, TreeSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dessin-forge", version, about = "Dessins d'enfants as permutation pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Cap on worker threads.
    #[arg(long, global = true, env = "DESSIN_FORGE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Tree,
    Star,
    Polygon,
    Alternating,
}

/// A dessin given inline (`--n --x --y`) or as a JSON file (`-` for stdin).
#[derive(clap::Args, Debug, Clone)]
pub struct DessinInput {
    /// JSON file `{"n": .., "x": "..", "y": ".."}`; `-` reads stdin.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Groups, regularity and primitivity of one dessin.
    Analyze(DessinInput),
    /// All dessins of a passport, up to isomorphism.
    Enumerate {
        #[arg(long = "passport", value_name = "PASSPORT")]
        passport_flag: Option<String>,
        /// Passport such as "[6,3^2,6]" or "[4 1, 3 1 1, 4 1]".
        passport: Option<String>,
        /// Largest degree to enumerate.
        #[arg(long, default_value_t = 14)]
        guard: usize,
    },
    /// Uniform passports of degree n with their genus.
    Passports {
        #[arg(long)]
        n: usize,
    },
    /// Census counts T, N, I_m for type (b^q).
    Count {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        q: usize,
        /// Also list the block partitions for this m.
        #[arg(long)]
        m: Option<usize>,
        /// Cross-check against brute force when n is at most this (capped at 12).
        #[arg(long, default_value_t = 0)]
        guard: usize,
    },
    /// Check the shipped witness table (`--tables`) or a certificate file.
    Verify {
        #[arg(long)]
        tables: bool,
        /// JSON file holding one certificate or a list of them.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Same as `verify --tables`.
    VerifyTables,
    /// Seeded search for a trivial-automorphism witness of [n, b^q, n].
    Search {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of candidate permutations to draw.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Build a dessin from one of the explicit families.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        /// Degree (star, polygon, alternating).
        #[arg(long)]
        n: Option<usize>,
        /// Tree passport [a^p, b^q, n].
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Graphviz rendering of the bipartite graph of a dessin.
    ExportDot(DessinInput),
}

/// What a run produced: the report text and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: EXIT_OK }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        Outcome { stdout: String::new(), stderr: msg.into(), code }
    }
}

#[derive(Debug)]
enum Failure {
    Invalid(anyhow::Error),
    Infeasible(String),
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<DessinError> for Failure {
    fn from(e: DessinError) -> Self {
        match e {
            DessinError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            other => Failure::Invalid(other.into()),
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        match e {
            CountError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            CountError::NonIntegral(_) => Failure::Check(e.to_string()),
            other => Failure::Invalid(other.into()),
        }
    }
}

/// Group data for one dessin, as printed by `analyze` and `enumerate`.
#[derive(Serialize, Debug, Clone)]
pub struct AnalyzeReport {
    pub n: usize,
    pub x: String,
    pub y: String,
    pub passport: String,
    pub genus: usize,
    pub uniform: bool,
    /// Order of `<x, y>`, as a decimal string.
    pub order: String,
    pub aut_order: usize,
    pub regular: bool,
    pub primitive: bool,
    pub block_divisors: Vec<usize>,
}

pub fn analyze(d: &Dessin) -> AnalyzeReport {
    let g = monodromy_group(d);
    let aut = transitive_centralizer(&g).len();
    let passport = d.passport();
    AnalyzeReport {
        n: d.degree(),
        x: d.x().to_cycle_string(),
        y: d.y().to_cycle_string(),
        genus: passport.genus().expect("valid dessin"),
        uniform: passport.is_uniform(),
        passport: passport.to_string(),
        order: g.order().to_string(),
        regular: g.order() == &d.degree().into(),
        aut_order: aut,
        primitive: is_primitive(d),
        block_divisors: block_divisors(d),
    }
}

/// One black node `b<i>` per cycle of `x`, one white node `w<j>` per cycle of
/// `y` (cycles ordered by smallest point), one edge per point `e`, labelled `e`.
/// The cyclic order of edges around vertices is not drawn.
pub fn to_dot(d: &Dessin, name: &str) -> String {
    let n = d.degree();
    let xc = d.x().cycles_with_fixed();
    let yc = d.y().cycles_with_fixed();
    let index = |cycles: &[Vec<usize>]| {
        let mut of = vec![0; n + 1];
        for (i, c) in cycles.iter().enumerate() {
            for &e in c {
                of[e] = i;
            }
        }
        of
    };
    let (bx, wy) = (index(&xc), index(&yc));
    let mut s = String::new();
    writeln!(s, "graph {name} {{").unwrap();
    writeln!(s, "  node [shape=circle, width=0.3, label=\"\"];").unwrap();
    for i in 0..xc.len() {
        writeln!(s, "  b{i} [style=filled, fillcolor=black];").unwrap();
    }
    for j in 0..yc.len() {
        writeln!(s, "  w{j} [style=filled, fillcolor=white];").unwrap();
    }
    for e in 1..=n {
        writeln!(s, "  b{} -- w{} [label=\"{e}\"];", bx[e], wy[e]).unwrap();
    }
    s.push_str("}\n");
    s
}

fn read_dessin(input: &DessinInput) -> Result<Dessin, Failure> {
    if let (Some(n), Some(x), Some(y)) = (input.n, &input.x, &input.y) {
        return Ok(Dessin::from_cycles(n, x, y)?);
    }
    let text = match &input.input {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        Some(_) => std::io::read_to_string(std::io::stdin()).context("reading stdin")?,
        None => return Err(anyhow!("give a dessin as a JSON file, '-' for stdin, or --n --x --y").into()),
    };
    let j: DessinJson = serde_json::from_str(&text).context("parsing dessin JSON")?;
    Ok(Dessin::try_from(j)?)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn no_dot(cmd: &str) -> Failure {
    Failure::Invalid(anyhow!("--format dot is not available for {cmd}"))
}

fn analyze_text(r: &AnalyzeReport) -> String {
    format!(
        "x = {}\ny = {}\npassport {}  genus {}  uniform {}\norder {}  |Aut| {}  regular {}  primitive {}\nblock divisors {:?}\n",
        r.x, r.y, r.passport, r.genus, r.uniform, r.order, r.aut_order, r.regular, r.primitive, r.block_divisors
    )
}

fn dessin_output(d: &Dessin, format: Format) -> String {
    match format {
        Format::Json => pretty(&d.to_json()),
        Format::Dot => to_dot(d, "dessin"),
        Format::Text => format!("n = {}\nx = {}\ny = {}\n", d.degree(), d.x(), d.y()),
    }
}

fn verify_rows(rows: &[dessin_forge::WitnessCertificate], format: Format) -> Result<Outcome, Failure> {
    let results: Vec<(usize, Result<(), String>)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.verify().map(|_| ()).map_err(|e| e.to_string())))
        .collect();
    let failed = results.iter().filter(|(_, r)| r.is_err()).count();
    let stdout = match format {
        Format::Json => {
            let v: Vec<Value> = results
                .iter()
                .map(|(i, r)| {
                    let row = &rows[*i];
                    json!({
                        "b": row.b, "q": row.q, "n": row.degree(),
                        "conclusion": row.conclusion,
                        "pass": r.is_ok(),
                        "error": r.as_ref().err(),
                    })
                })
                .collect();
            pretty(&json!({ "rows": v, "passed": rows.len() - failed, "failed": failed }))
        }
        Format::Text => {
            let mut s = String::new();
            for (i, r) in &results {
                let row = &rows[*i];
                match r {
                    Ok(()) => writeln!(s, "PASS (b,q)=({},{}) n={} {:?}", row.b, row.q, row.degree(), row.conclusion),
                    Err(e) => writeln!(s, "FAIL (b,q)=({},{}) n={}: {e}", row.b, row.q, row.degree()),
                }
                .unwrap();
            }
            writeln!(s, "{} passed, {failed} failed", rows.len() - failed).unwrap();
            s
        }
        Format::Dot => return Err(no_dot("verify")),
    };
    Ok(Outcome { stdout, stderr: String::new(), code: if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED } })
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Analyze(input) => {
            let d = read_dessin(input)?;
            let r = analyze(&d);
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&r),
                Format::Text => analyze_text(&r),
                Format::Dot => to_dot(&d, "dessin"),
            }))
        }
        Command::ExportDot(input) => {
            let d = read_dessin(input)?;
            Ok(Outcome::ok(to_dot(&d, "dessin")))
        }
        Command::Enumerate { passport_flag, passport, guard } => {
            let text = passport_flag
                .as_ref()
                .or(passport.as_ref())
                .ok_or_else(|| anyhow!("give a passport, e.g. --passport \"[6,3^2,6]\""))?;
            let p: Passport = text.parse()?;
            let ds = enumerate_dessins(&p, &EnumConfig { guard: *guard })?;
            let reports: Vec<AnalyzeReport> = ds.iter().map(analyze).collect();
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&json!({
                    "passport": p.to_string(),
                    "genus": p.genus()?,
                    "count": ds.len(),
                    "aut_orders": reports.iter().map(|r| r.aut_order).collect::<Vec<_>>(),
                    "dessins": reports,
                })),
                Format::Text => {
                    let mut s = format!("{} : genus {}, {} classes\n", p, p.genus()?, ds.len());
                    for r in &reports {
                        writeln!(s, "x = {}  y = {}  order {}  |Aut| {}", r.x, r.y, r.order, r.aut_order).unwrap();
                    }
                    s
                }
                Format::Dot => ds.iter().enumerate().map(|(i, d)| to_dot(d, &format!("dessin{i}"))).collect(),
            }))
        }
        Command::Passports { n } => {
            if *n == 0 {
                return Err(anyhow!("n must be positive").into());
            }
            let list = uniform_passports(*n);
            Ok(Outcome::ok(match format {
                Format::Json => pretty(
                    &list.iter().map(|(p, g)| json!({"passport": p.to_string(), "genus": g})).collect::<Vec<_>>(),
                ),
                Format::Text => list.iter().map(|(p, g)| format!("{g}  {p}\n")).collect(),
                Format::Dot => return Err(no_dot("passports")),
            }))
        }
        Command::Count { b, q, m, guard } => count(*b, *q, *m, *guard, format),
        Command::Verify { tables, certificate } => {
            let mut rows = Vec::new();
            if *tables {
                rows.extend(table_fixtures());
            }
            if let Some(path) = certificate {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let v: Value = serde_json::from_str(&text).context("parsing certificate JSON")?;
                let list = if v.is_array() { v } else { Value::Array(vec![v]) };
                rows.extend(
                    serde_json::from_value::<Vec<dessin_forge::WitnessCertificate>>(list)
                        .context("parsing certificate JSON")?,
                );
            }
            if rows.is_empty() {
                return Err(anyhow!("nothing to verify: pass --tables or --certificate FILE").into());
            }
            verify_rows(&rows, format)
        }
        Command::VerifyTables => verify_rows(&table_fixtures(), format),
        Command::Search { b, q, seed, budget } => {
            let cfg = SearchConfig { budget: *budget, ..SearchConfig::default() };
            match search_trivial_aut(*b, *q, *seed, &cfg) {
                Ok(c) => Ok(Outcome::ok(match format {
                    Format::Json => pretty(&c),
                    Format::Text => {
                        let mut s = format!("(b,q)=({},{}) y = {}\nconclusion {:?}\n", c.b, c.q, c.y, c.conclusion);
                        if let (Some(w), Some(p)) = (&c.word, c.prime) {
                            writeln!(s, "w = {w} is a {p}-cycle").unwrap();
                        }
                        if let Some(o) = &c.order {
                            writeln!(s, "order {o}").unwrap();
                        }
                        s
                    }
                    Format::Dot => return Err(no_dot("search")),
                })),
                Err(e @ SearchError::Exhausted(_)) => Err(Failure::Check(e.to_string())),
                Err(e) => Err(Failure::Invalid(e.into())),
            }
        }
        Command::Construct { family, n, a, p, b, q } => {
            let need_n = || n.ok_or_else(|| anyhow!("--n is required for this family"));
            let d = match family {
                Family::Tree => {
                    let (Some(a), Some(p), Some(b), Some(q)) = (a, p, b, q) else {
                        return Err(anyhow!("--family tree needs --a --p --b --q").into());
                    };
                    let spec = TreeSpec::new(*a, *p, *b, *q).map_err(anyhow::Error::from)?;
                    match regular_tree_dessin(&spec) {
                        Some(d) => d,
                        None => {
                            return Err(Failure::Check(format!(
                                "no regular dessin with passport {}: gcd(p, q) > 1 or no integral genus",
                                spec.passport()
                            )))
                        }
                    }
                }
                Family::Star => genus0_dessin(Genus0Kind::Star, need_n()?).map_err(anyhow::Error::from)?,
                Family::Polygon => genus0_dessin(Genus0Kind::Polygon, need_n()?).map_err(anyhow::Error::from)?,
                Family::Alternating => alternating_witness(need_n()?).map_err(anyhow::Error::from)?,
            };
            Ok(Outcome::ok(dessin_output(&d, format)))
        }
    }
}

fn count(b: usize, q: usize, m: Option<usize>, guard: usize, format: Format) -> Result<Outcome, Failure> {
    let report = CountReport::compute(b, q)?;
    let mut v = serde_json::to_value(&report).expect("serializable");
    if let Some(m) = m {
        let n = b * q;
        if m < 2 || m >= n || n % m != 0 {
            return Err(CountError::BadModulus { m, n }.into());
        }
        v["m"] = json!(m);
        v["block_partitions"] = json!(block_partitions(b, q, m).into_iter().map(|p| p.parts).collect::<Vec<_>>());
    }
    let mut failed = Vec::new();
    if guard > 0 {
        let g = guard.min(ORACLE_GUARD);
        let bf = dessin_forge::counting::n_count_bruteforce(b, q, g)?;
        v["N_bruteforce"] = json!(bf.to_string());
        if bf != report.n_count {
            failed.push("N".to_string());
        }
        let mut im = serde_json::Map::new();
        for (&m, val) in &report.i_m {
            let bf = dessin_forge::counting::i_m_bruteforce(b, q, m, g)?;
            if &bf != val {
                failed.push(format!("I_{m}"));
            }
            im.insert(m.to_string(), json!(bf.to_string()));
        }
        v["I_m_bruteforce"] = Value::Object(im);
    }
    let stdout = match format {
        Format::Json => pretty(&v),
        Format::Text => {
            let mut s = format!(
                "n = {}, b = {}, q = {}\nT = {}\nN = {}\nN/T = {}  bound 2/(n+2) = {}  holds {}  tight {}\n",
                report.n, b, q, report.t, report.n_count, report.ratio_n, report.bound, report.bound_holds, report.bound_tight
            );
            for (m, val) in &report.i_m {
                writeln!(s, "I_{m} = {val}").unwrap();
            }
            if let Some(parts) = v.get("block_partitions") {
                writeln!(s, "block partitions: {parts}").unwrap();
            }
            s
        }
        Format::Dot => return Err(no_dot("count")),
    };
    if failed.is_empty() {
        Ok(Outcome::ok(stdout))
    } else {
        Ok(Outcome { stdout, stderr: format!("brute force disagrees on {}", failed.join(", ")), code: EXIT_CHECK_FAILED })
    }
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Outcome::fail(EXIT_INVALID, "--threads must be positive");
        }
        // Fails only if a pool already exists, in which case that pool is used.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match execute(cli) {
        Ok(o) => o,
        Err(Failure::Invalid(e)) => Outcome::fail(EXIT_INVALID, format!("error: {e:#}")),
        Err(Failure::Infeasible(e)) => Outcome::fail(EXIT_INFEASIBLE, format!("error: {e}")),
        Err(Failure::Check(e)) => Outcome::fail(EXIT_CHECK_FAILED, format!("check failed: {e}")),
    }
}
