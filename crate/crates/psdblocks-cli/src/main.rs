//! Command-line front end: classify block-matrix documents, construct
//! family members and pinned fixtures, re-derive the published reference
//! figures, and drive the census / counterexample / conjecture harnesses.
//!
//! Exit codes follow scripting convention:
//!
//! * `0` — success (and, for `search`, budget exhausted with no find);
//! * `1` — a mathematical finding: a reference check failed, or a
//!   counterexample was found;
//! * `2` — usage or input errors (bad flags, malformed documents, invalid
//!   generator specs).

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use psdblocks::blocks::{property_profile, BlockPsdMatrix, Property, PropertyProfile};
use psdblocks::docfmt::BlockDoc;
use psdblocks::families::FamilyName;
use psdblocks::fixtures::{self, FixtureId};
use psdblocks::means::MeanPath;
use psdblocks::numerics::ToleranceConfig;
use psdblocks::search::{
    census, conjecture_run, find_counterexample, CensusReport, ConjectureId, ConjectureReport,
    Ensemble, GeneratorSpec, SearchReport,
};

#[derive(Parser)]
#[command(
    name = "psdblocks",
    version,
    about = "Classify, construct, and stress-test PSD matrices in 2x2 block form",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Absolute slack for inequality comparisons.
    #[arg(long, global = true, value_name = "EPS", default_value_t = 1e-9)]
    tol_atol: f64,

    /// Relative slack for inequality comparisons.
    #[arg(long, global = true, value_name = "EPS", default_value_t = 1e-9)]
    tol_rtol: f64,

    /// Eigenvalue floor for positive-semidefiniteness checks.
    #[arg(long, global = true, value_name = "EPS", default_value_t = 1e-9)]
    psd_tol: f64,

    /// Master seed for every randomized command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Also write the machine-readable JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Worker thread count for randomized harnesses (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a block-matrix document against the six spectral properties.
    Classify {
        /// Input document path; `-` or omitted reads standard input.
        input: Option<PathBuf>,
    },

    /// Construct a block matrix and emit its JSON document.
    ///
    /// TARGET is either a family name (a seeded random member is drawn) or
    /// a pinned fixture name (the exact stored matrix is emitted).
    Construct {
        target: String,

        /// Block size for family draws; fixtures have pinned sizes.
        #[arg(long, default_value_t = 2)]
        n: usize,

        /// Output path; omitted writes the document to standard output.
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },

    /// Recompute every pinned reference figure and compare against its
    /// published value.
    #[command(name = "verify-paper")]
    VerifyPaper,

    /// Classify seeded random samples and tabulate the census by region.
    Census {
        /// Ensemble name (block_psd, ppt_rejection, ppt_separable,
        /// family:<name>, ...).
        #[arg(long, conflicts_with = "family")]
        ensemble: Option<String>,

        /// Shorthand for `--ensemble family:<NAME>`.
        #[arg(long, value_name = "NAME")]
        family: Option<String>,

        /// Block size.
        #[arg(long, default_value_t = 2)]
        n: usize,

        /// Number of samples to classify.
        #[arg(long, default_value_t = 1000)]
        count: u64,

        /// Also write the census as CSV
        /// (region, count, min_margin, extremal_seed).
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,

        /// Kronecker term count for the ppt_separable ensemble
        /// (default 2 n^2).
        #[arg(long, value_name = "T")]
        separable_terms: Option<usize>,
    },

    /// Hunt for a sample that decisively violates a target property.
    ///
    /// Exits 1 when a counterexample is found (printing its document to
    /// standard output), 0 when the trial budget is exhausted.
    Search {
        /// Property to attack: a, g, la, lg, ma, or mg.
        #[arg(long)]
        target: String,

        #[arg(long, conflicts_with = "family")]
        ensemble: Option<String>,

        /// Shorthand for `--ensemble family:<NAME>`.
        #[arg(long, value_name = "NAME")]
        family: Option<String>,

        /// Block size.
        #[arg(long, default_value_t = 2)]
        n: usize,

        /// Trial budget.
        #[arg(long, default_value_t = 10_000)]
        max_trials: u64,

        /// Kronecker term count for the ppt_separable ensemble.
        #[arg(long, value_name = "T")]
        separable_terms: Option<usize>,
    },

    /// Stress an open conjecture and report margin statistics.
    ///
    /// Violations are counted and reported, never asserted away; the exit
    /// code is 0 regardless, because the report itself is the product.
    Conjecture {
        /// Conjecture id: phi_g, psi_a, or psi_g.
        #[arg(long)]
        id: String,

        /// Block size.
        #[arg(long, default_value_t = 2)]
        n: usize,

        /// Number of draws.
        #[arg(long, default_value_t = 10_000)]
        count: u64,
    },
}

/// An error carrying the process exit code it should produce.
struct CliError {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

impl From<psdblocks::Error> for CliError {
    fn from(e: psdblocks::Error) -> CliError {
        usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> CliError {
        usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        usage(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> CliError {
        usage(e.to_string())
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (`psdblocks census | head`)
    // instead of panicking on the failed print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Only the first global-pool configuration can win; a failure here
        // means rayon was already implicitly initialized, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let tol = ToleranceConfig {
        cmp_atol: cli.tol_atol,
        cmp_rtol: cli.tol_rtol,
        psd_tol: cli.psd_tol,
        ..ToleranceConfig::default()
    };
    match &cli.command {
        Command::Classify { input } => cmd_classify(&cli, &tol, input.as_deref()),
        Command::Construct { target, n, output } => {
            cmd_construct(&cli, &tol, target, *n, output.as_deref())
        }
        Command::VerifyPaper => cmd_verify_paper(&cli, &tol),
        Command::Census {
            ensemble,
            family,
            n,
            count,
            csv,
            separable_terms,
        } => {
            let spec = build_spec(&cli, ensemble, family, *n, *separable_terms)?;
            cmd_census(&cli, &tol, spec, *count, csv.as_deref())
        }
        Command::Search {
            target,
            ensemble,
            family,
            n,
            max_trials,
            separable_terms,
        } => {
            let spec = build_spec(&cli, ensemble, family, *n, *separable_terms)?;
            cmd_search(&cli, &tol, target, spec, *max_trials)
        }
        Command::Conjecture { id, n, count } => cmd_conjecture(&cli, &tol, id, *n, *count),
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn cmd_classify(
    cli: &Cli,
    tol: &ToleranceConfig,
    input: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let text = match input {
        Some(path) if path.as_os_str() != "-" => fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let doc = BlockDoc::from_json(&text)?;
    let block = doc.to_block(tol)?;
    let profile = property_profile(&block, tol)?;
    print_profile(&profile);
    write_json(
        cli,
        &serde_json::json!({
            "region": profile.region_key(),
            "profile": profile,
        }),
    )?;
    Ok(0)
}

fn print_profile(profile: &PropertyProfile) {
    let n = profile.n;
    println!("block size: n = {n} ({}x{} overall)", 2 * n, 2 * n);
    println!("region: {}", profile.region_key());
    for p in Property::ALL {
        let verdict = profile.verdict(p);
        let (at, worst) = worst_margin(&verdict.margins);
        println!(
            "  {:<2}  {}  worst margin {:>13.6e} at {} = {}{}",
            p.name(),
            if verdict.holds { "holds" } else { "FAILS" },
            worst,
            index_letter(p),
            at,
            if verdict.marginal { "  (marginal)" } else { "" },
        );
    }
    print_spectrum("s(m12)", &profile.s12);
    print_spectrum("lambda(m11+m22)", &profile.lambda_sum);
    print_spectrum("lambda(m11#m22)", &profile.lambda_gm);
    println!("geometric mean path: {}", path_name(profile.gm_path));
    if !profile.lattice_consistent {
        println!(
            "note: raw verdicts cross an implication edge within noise; \
             consult the marginal flags"
        );
    }
}

fn worst_margin(margins: &[f64]) -> (usize, f64) {
    let (at, worst) = margins
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("every verdict grades at least one comparison");
    (at + 1, worst)
}

fn index_letter(p: Property) -> &'static str {
    match p {
        Property::A | Property::G => "j",
        _ => "k",
    }
}

fn print_spectrum(label: &str, values: &[f64]) {
    let rendered: Vec<String> = values.iter().map(|v| format!("{v:>12.6}")).collect();
    println!("{label:<17}{}", rendered.join(" "));
}

fn path_name(path: MeanPath) -> &'static str {
    match path {
        MeanPath::Direct => "direct",
        MeanPath::EpsilonLimit => "epsilon-limit",
    }
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn cmd_construct(
    cli: &Cli,
    tol: &ToleranceConfig,
    target: &str,
    n: usize,
    output: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let block = resolve_construct_target(cli, tol, target, n)?;
    let doc = BlockDoc::from_block(&block).to_json();
    match output {
        Some(path) => fs::write(path, doc + "\n")
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{doc}"),
    }
    write_json(cli, &serde_json::to_value(BlockDoc::from_block(&block))?)?;
    Ok(0)
}

fn resolve_construct_target(
    cli: &Cli,
    tol: &ToleranceConfig,
    target: &str,
    n: usize,
) -> Result<BlockPsdMatrix, CliError> {
    if let Some(family) = FamilyName::parse(target) {
        let spec = GeneratorSpec::new(Ensemble::Family(family), n, cli.seed);
        return Ok(psdblocks::search::sample_block_at(&spec, 0, tol)?);
    }
    if let Some(fixture) = FixtureId::parse(target) {
        return Ok(fixtures::build(fixture, tol)?);
    }
    let families: Vec<&str> = FamilyName::ALL.iter().map(|f| f.name()).collect();
    let fixtures: Vec<&str> = FixtureId::ALL.iter().map(|f| f.name()).collect();
    Err(usage(format!(
        "unknown construction `{target}`\n  families: {}\n  fixtures: {}",
        families.join(", "),
        fixtures.join(", ")
    )))
}

// ---------------------------------------------------------------------------
// verify-paper
// ---------------------------------------------------------------------------

fn cmd_verify_paper(cli: &Cli, tol: &ToleranceConfig) -> Result<u8, CliError> {
    let reports = fixtures::verify_all(tol)?;
    let mut checks = 0usize;
    let mut failed = 0usize;
    for report in &reports {
        for check in &report.checks {
            checks += 1;
            let ok = check.passes();
            if !ok {
                failed += 1;
            }
            println!(
                "{} {}/{}: expected {} actual {} (tol {})",
                if ok { "PASS" } else { "FAIL" },
                report.fixture.name(),
                check.label,
                check.expected,
                check.actual,
                check.tolerance,
            );
        }
    }
    println!(
        "verify-paper: {}/{} checks passed across {} fixtures",
        checks - failed,
        checks,
        reports.len()
    );
    write_json(cli, &serde_json::to_value(&reports)?)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// census
// ---------------------------------------------------------------------------

fn build_spec(
    cli: &Cli,
    ensemble: &Option<String>,
    family: &Option<String>,
    n: usize,
    separable_terms: Option<usize>,
) -> Result<GeneratorSpec, CliError> {
    let text = match (ensemble, family) {
        (Some(e), None) => e.clone(),
        (None, Some(f)) => format!("family:{f}"),
        _ => return Err(usage("exactly one of --ensemble or --family is required")),
    };
    let ensemble = Ensemble::parse(&text).ok_or_else(|| {
        let names: Vec<String> = Ensemble::all().iter().map(|e| e.name()).collect();
        usage(format!(
            "unknown ensemble `{text}`; known ensembles: {}",
            names.join(", ")
        ))
    })?;
    let mut spec = GeneratorSpec::new(ensemble, n, cli.seed);
    spec.params.separable_terms = separable_terms;
    Ok(spec)
}

fn cmd_census(
    cli: &Cli,
    tol: &ToleranceConfig,
    spec: GeneratorSpec,
    count: u64,
    csv_path: Option<&std::path::Path>,
) -> Result<u8, CliError> {
    let report = census(&spec, count, tol)?;
    print_census(&report);
    if let Some(path) = csv_path {
        write_census_csv(&report, path)?;
    }
    write_json(cli, &serde_json::to_value(&report)?)?;
    Ok(0)
}

fn print_census(report: &CensusReport) {
    println!(
        "census: {}  n = {}  seed = {}  count = {}",
        report.spec.ensemble, report.spec.n, report.spec.seed, report.total
    );
    println!(
        "{:<14}{:>8}  {:>13}  replay",
        "region", "count", "min margin"
    );
    for (region, count) in &report.region_counts {
        let extremum = &report.region_margins[region];
        println!(
            "{region:<14}{count:>8}  {:>13.6e}  {}",
            extremum.margin,
            replay(extremum.seed, extremum.index)
        );
    }
    println!(
        "marginal: {}  closure-adjusted: {}  classification failures: {}",
        report.marginal_count, report.closure_adjusted_count, report.failure_count
    );
    if !report.min_margins.is_empty() {
        println!("per-property minima:");
        for (name, extremum) in &report.min_margins {
            println!(
                "  {name:<3} {:>13.6e}  {}",
                extremum.margin,
                replay(extremum.seed, extremum.index)
            );
        }
    }
}

fn write_census_csv(report: &CensusReport, path: &std::path::Path) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    writer.write_record(["region", "count", "min_margin", "extremal_seed"])?;
    for (region, count) in &report.region_counts {
        let extremum = &report.region_margins[region];
        writer.write_record([
            region.as_str(),
            &count.to_string(),
            &extremum.margin.to_string(),
            &replay(extremum.seed, extremum.index),
        ])?;
    }
    writer.flush().map_err(CliError::from)
}

/// Replay token: master seed and trial index, which together regenerate
/// the sample exactly.
fn replay(seed: u64, index: u64) -> String {
    format!("{seed}:{index}")
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

fn cmd_search(
    cli: &Cli,
    tol: &ToleranceConfig,
    target: &str,
    spec: GeneratorSpec,
    max_trials: u64,
) -> Result<u8, CliError> {
    let target = Property::parse(target).ok_or_else(|| {
        usage(format!(
            "unknown property `{target}`; known properties: a, g, la, lg, ma, mg"
        ))
    })?;
    let report = find_counterexample(target, &spec, max_trials, tol)?;
    print_search(&report);
    write_json(cli, &serde_json::to_value(&report)?)?;
    Ok(if report.counterexample.is_some() {
        1
    } else {
        0
    })
}

fn print_search(report: &SearchReport) {
    match &report.counterexample {
        None => println!(
            "no counterexample to {} in {} trials of {} (n = {}, seed = {})",
            report.target, report.max_trials, report.spec.ensemble, report.spec.n, report.spec.seed
        ),
        Some(cx) => {
            // Summary on stderr, document on stdout, so the find can be
            // piped straight into `classify`.
            eprintln!(
                "counterexample: {} violated at {} = {} with margin {:.6e} (replay {})",
                report.target,
                index_letter(report.target),
                cx.violated_index,
                cx.margin,
                replay(cx.seed, cx.index)
            );
            println!("{}", cx.block.to_json());
        }
    }
}

// ---------------------------------------------------------------------------
// conjecture
// ---------------------------------------------------------------------------

fn cmd_conjecture(
    cli: &Cli,
    tol: &ToleranceConfig,
    id: &str,
    n: usize,
    count: u64,
) -> Result<u8, CliError> {
    let id = ConjectureId::parse(id).ok_or_else(|| {
        usage(format!(
            "unknown conjecture `{id}`; known conjectures: phi_g, psi_a, psi_g"
        ))
    })?;
    let report = conjecture_run(id, n, count, cli.seed, tol)?;
    print_conjecture(&report);
    write_json(cli, &serde_json::to_value(&report)?)?;
    Ok(0)
}

fn print_conjecture(report: &ConjectureReport) {
    println!(
        "conjecture {}: property {} on family {}  n = {}  seed = {}",
        report.id, report.property, report.family, report.n, report.seed
    );
    println!(
        "draws: {}  violations: {}  boundary failures: {}  classification failures: {}",
        report.count, report.violations, report.boundary_failures, report.failure_count
    );
    match &report.min_margin {
        Some(extremum) => println!(
            "worst margin: {:.6e}  (replay {})",
            extremum.margin,
            replay(extremum.seed, extremum.index)
        ),
        None => println!("no classified draws"),
    }
    if !report.per_index.is_empty() {
        println!("{:<8}{:>13}  {:>13}", "index", "min", "median");
        for stats in &report.per_index {
            println!(
                "j = {:<4}{:>13.6e}  {:>13.6e}",
                stats.index, stats.min, stats.median
            );
        }
    }
}

// ---------------------------------------------------------------------------
// shared output
// ---------------------------------------------------------------------------

fn write_json(cli: &Cli, value: &serde_json::Value) -> Result<(), CliError> {
    if let Some(path) = &cli.json {
        let mut file = fs::File::create(path)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        let text = serde_json::to_string_pretty(value)?;
        file.write_all(text.as_bytes())?;
        file.write_all(b"\n")?;
    }
    Ok(())
}
