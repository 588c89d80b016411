//! The `sicpovm` command-line tool.
//!
//! Exit codes: 0 when the command succeeded and its certificate holds, 1 when
//! it ran but verification came out negative, 2 for usage and input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::codec::{
    decode_probabilities, BasesFile, Document, Kind, Metadata, Payload, ReportPayload, SearchSummary,
    StateSummary, WignerSummary,
};
use crate::linalg::{hermitian_deviation, hermitian_eigenvalues, trace, CMatrix};
use crate::povm::{
    probabilities, random_si_povm, reconstruct_state, verify_mub, verify_si_with_tolerance, Povm, SiReport,
    PSD_TOL, RESIDUAL_TOL,
};
use crate::sic_search::{
    default_tolerance, phase_objective_bound, frame_potential_bound, search, sic_from_fiducial, SearchConfig,
    SearchMethod, SearchParameters,
};
use crate::wh_covariant::{covariant_si_povm, PhaseVector};
use crate::wh_group::GroupContext;
use crate::wigner::{state_from_wigner, wigner_povm, WignerFunction};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "sicpovm", version, about = "Construct and certify symmetric informationally complete POVMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct Output {
    /// Write the produced document here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a JSON report document on stdout instead of a summary.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Frame,
    Phase,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wigner POVM for odd dimension.
    Wigner {
        #[arg(long)]
        dim: usize,
        /// Base residual tolerance of the SI check (scaled by d).
        #[arg(long, default_value_t = RESIDUAL_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Numerical SIC search.
    Search {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value = "frame")]
        method: Method,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Acceptance threshold on |objective - bound|; defaults to 1e-9
        /// (frame) or 1e-8 d^3 (phase).
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration cap per restart.
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Random SI-POVM from a rotated, shrunk regular simplex.
    RandomSi {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = RESIDUAL_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Weyl-Heisenberg covariant SI-POVM from a phase vector.
    Covariant {
        #[arg(long)]
        dim: usize,
        /// `zero`, `pi`, or a path to a phases document.
        #[arg(long, default_value = "zero")]
        phases: String,
        #[arg(long, default_value_t = RESIDUAL_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Check any document produced by this tool.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = RESIDUAL_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Wigner function of a state document.
    WignerFunction {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Outcome probabilities of a state under a POVM, as a JSON array.
    Probabilities {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linear-inversion state estimate from outcome probabilities.
    Reconstruct {
        #[arg(long)]
        povm: PathBuf,
        /// JSON array of probabilities.
        #[arg(long)]
        probs: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Mutual unbiasedness of a family of bases.
    MubCheck {
        /// `{"dimension": d, "bases": [[[[re, im], ...], ...], ...]}`
        #[arg(long)]
        bases: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

/// Runs the tool with the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the tool with explicit output streams and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// What a command produced: an optional document to write, the report, and
/// summary lines for humans.
struct Outcome {
    product: Option<Document>,
    dimension: usize,
    report: ReportPayload,
    summary: Vec<String>,
    metadata: Metadata,
}

fn execute(command: Command, out: &mut dyn Write) -> Result<bool> {
    let (outcome, output) = match command {
        Command::Wigner { dim, tol, output } => (cmd_wigner(dim, tol)?, output),
        Command::Search {
            dim,
            method,
            restarts,
            seed,
            tol,
            max_iter,
            output,
        } => (cmd_search(dim, method, restarts, seed, tol, max_iter)?, output),
        Command::RandomSi { dim, seed, tol, output } => (cmd_random_si(dim, seed, tol)?, output),
        Command::Covariant { dim, phases, tol, output } => (cmd_covariant(dim, &phases, tol)?, output),
        Command::Verify { input, tol, output } => (cmd_verify(&input, tol)?, output),
        Command::WignerFunction { state, output } => (cmd_wigner_function(&state)?, output),
        Command::Probabilities { povm, state, out: path } => return cmd_probabilities(&povm, &state, path, out),
        Command::Reconstruct { povm, probs, output } => (cmd_reconstruct(&povm, &probs)?, output),
        Command::MubCheck { bases, output } => (cmd_mub(&bases)?, output),
    };
    if let (Some(path), Some(doc)) = (&output.out, &outcome.product) {
        write_file(path, &doc.encode())?;
    }
    let passed = outcome.report.passed;
    if output.json {
        let doc = Document::from_report(outcome.dimension, outcome.report, outcome.metadata);
        out.write_all(doc.encode().as_bytes()).map_err(io_error)?;
    } else {
        for line in &outcome.summary {
            writeln!(out, "{line}").map_err(io_error)?;
        }
        writeln!(out, "{}", if passed { "result: PASS" } else { "result: FAIL" }).map_err(io_error)?;
    }
    Ok(passed)
}

fn io_error(e: std::io::Error) -> Error {
    Error::Invalid(format!("i/o error: {e}"))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn read_document(path: &Path) -> Result<Document> {
    Document::decode(&read_file(path)?).map_err(|e| match e {
        Error::Decode { path: p, message } => Error::Decode {
            path: format!("{}: {p}", path.display()),
            message,
        },
        other => other,
    })
}

/// Fixed-point with at most 12 decimals, trailing zeros dropped.
fn num(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_owned() } else { s.to_owned() }
}

fn si_summary(rep: &SiReport) -> Vec<String> {
    vec![
        format!("elements = {}", rep.n),
        format!("kappa = {}", num(rep.kappa)),
        format!("alpha = {:e}, beta = {:e}", rep.alpha, rep.beta),
        format!("POVM: {}, symmetric: {}, informationally complete: {}", yes(rep.is_povm), yes(rep.is_symmetric), yes(rep.is_informationally_complete)),
        format!("SI: {}, rank-one SIC: {}", yes(rep.is_si), yes(rep.is_rank_one_sic)),
        format!("max residual = {:e}", rep.max_residual),
    ]
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn si_outcome(subject: &str, povm: &Povm, tol: f64, metadata: Metadata, notes: Vec<String>) -> Outcome {
    let rep = verify_si_with_tolerance(povm, tol);
    let mut summary = vec![format!("{subject}, d = {}", povm.dim())];
    summary.extend(si_summary(&rep));
    Outcome {
        product: Some(Document::from_povm(povm, metadata.clone())),
        dimension: povm.dim(),
        report: ReportPayload {
            subject: subject.to_owned(),
            passed: rep.is_si,
            si: Some(rep),
            search: None,
            mub: None,
            state: None,
            wigner: None,
            notes,
        },
        summary,
        metadata,
    }
}

fn cmd_wigner(dim: usize, tol: f64) -> Result<Outcome> {
    let ctx = GroupContext::new(dim)?;
    let povm = wigner_povm(&ctx)?;
    Ok(si_outcome("Wigner POVM", &povm, tol, Metadata::now(None, Some("wigner")), vec![]))
}

fn cmd_random_si(dim: usize, seed: u64, tol: f64) -> Result<Outcome> {
    let povm = random_si_povm(dim, seed)?;
    Ok(si_outcome("random SI-POVM", &povm, tol, Metadata::now(Some(seed), Some("random-si")), vec![]))
}

fn cmd_covariant(dim: usize, phases: &str, tol: f64) -> Result<Outcome> {
    let ctx = GroupContext::new(dim)?;
    let phi = match phases {
        "zero" => PhaseVector::zeros(&ctx)?,
        "pi" => PhaseVector::constant(&ctx, std::f64::consts::PI)?,
        path => {
            let doc = read_document(Path::new(path))?;
            if doc.dimension != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: doc.dimension,
                });
            }
            doc.to_phases()?
        }
    };
    let cov = covariant_si_povm(&phi);
    let method = format!("covariant:{}", if phases == "zero" || phases == "pi" { phases } else { "file" });
    Ok(si_outcome(
        "covariant SI-POVM",
        &cov.povm,
        tol,
        Metadata::now(None, Some(&method)),
        vec![],
    ))
}

fn cmd_search(
    dim: usize,
    method: Method,
    restarts: usize,
    seed: u64,
    tol: Option<f64>,
    max_iter: usize,
) -> Result<Outcome> {
    let method = match method {
        Method::Frame => SearchMethod::FramePotential,
        Method::Phase => SearchMethod::PhaseObjective,
    };
    let tolerance = tol.unwrap_or_else(|| default_tolerance(dim, method));
    let config = SearchConfig {
        dimension: dim,
        method,
        restarts,
        max_iterations: max_iter,
        seed,
        tolerance,
    };
    let res = search(&config)?;
    let (name, bound) = match method {
        SearchMethod::FramePotential => ("frame", frame_potential_bound(dim)),
        SearchMethod::PhaseObjective => ("phase", phase_objective_bound(dim)),
    };
    let metadata = Metadata::now(Some(seed), Some(name));
    let product = match &res.best_parameters {
        SearchParameters::Fiducial(f) => Document::from_fiducial(f, metadata.clone()),
        SearchParameters::Phases(p) => Document::from_phases(p, metadata.clone()),
    };
    let summary_block = SearchSummary {
        method: name.to_owned(),
        objective_value: res.objective_value,
        bound,
        residual: res.residual,
        tolerance,
        certified: res.certified,
        iterations_used: res.iterations_used,
        restarts_used: res.restarts_used,
        best_restart: res.best_restart,
    };
    let mut summary = vec![
        format!("SIC search, d = {dim}, method = {name}"),
        format!("objective = {}, bound = {}", num(res.objective_value), num(bound)),
        format!("residual = {:e} (tolerance {:e})", res.residual, tolerance),
        format!("restarts used = {}, best restart = {}", res.restarts_used, res.best_restart),
    ];
    summary.extend(si_summary(&res.report));
    Ok(Outcome {
        product: Some(product),
        dimension: dim,
        report: ReportPayload {
            subject: "SIC search".to_owned(),
            passed: res.certified,
            si: Some(res.report),
            search: Some(summary_block),
            mub: None,
            state: None,
            wigner: None,
            notes: vec![],
        },
        summary,
        metadata,
    })
}

fn state_summary(rho: &CMatrix) -> StateSummary {
    let min_eigenvalue = hermitian_eigenvalues(rho)[0];
    StateSummary {
        trace: trace(rho).re,
        hermitian_deviation: hermitian_deviation(rho),
        min_eigenvalue,
        is_psd: min_eigenvalue >= -PSD_TOL,
    }
}

fn wigner_summary(w: &WignerFunction) -> WignerSummary {
    WignerSummary {
        sum: w.values().iter().sum(),
        min_value: w.values().iter().copied().fold(f64::INFINITY, f64::min),
        negativity: w.values().iter().filter(|v| **v < 0.0).map(|v| -v).sum(),
    }
}

fn plain_report(subject: &str, passed: bool) -> ReportPayload {
    ReportPayload {
        subject: subject.to_owned(),
        passed,
        si: None,
        search: None,
        mub: None,
        state: None,
        wigner: None,
        notes: vec![],
    }
}

fn cmd_verify(path: &Path, tol: f64) -> Result<Outcome> {
    let doc = read_document(path)?;
    let metadata = Metadata::now(doc.metadata.seed, Some("verify"));
    let d = doc.dimension;
    match doc.kind() {
        Kind::Povm => {
            let povm = doc.to_povm()?;
            let mut o = si_outcome("POVM document", &povm, tol, metadata, vec![]);
            o.product = None;
            Ok(o)
        }
        Kind::Fiducial => {
            let (povm, _) = sic_from_fiducial(&doc.to_fiducial()?)?;
            let mut o = si_outcome("fiducial orbit", &povm, tol, metadata, vec![]);
            o.report.passed = o.report.si.as_ref().is_some_and(|r| r.is_rank_one_sic);
            o.product = None;
            Ok(o)
        }
        Kind::Phases => {
            let cov = covariant_si_povm(&doc.to_phases()?);
            let mut o = si_outcome("covariant SI-POVM from phases", &cov.povm, tol, metadata, vec![]);
            o.product = None;
            Ok(o)
        }
        Kind::State => {
            let rho = doc.to_state()?;
            let s = state_summary(&rho);
            let passed = s.hermitian_deviation <= tol && (s.trace - 1.0).abs() <= tol * d as f64 && s.is_psd;
            let mut report = plain_report("state document", passed);
            let summary = vec![
                format!("state, d = {d}"),
                format!("trace = {}, min eigenvalue = {:e}", num(s.trace), s.min_eigenvalue),
            ];
            report.state = Some(s);
            Ok(Outcome {
                product: None,
                dimension: d,
                report,
                summary,
                metadata,
            })
        }
        Kind::Wigner => {
            let w = doc.to_wigner()?;
            let inv = state_from_wigner(&w)?;
            let mut report = plain_report("Wigner document", inv.is_psd);
            report.wigner = Some(wigner_summary(&w));
            report.state = Some(state_summary(&inv.rho));
            let summary = vec![
                format!("Wigner function, d = {d}"),
                format!("state min eigenvalue = {:e}", inv.min_eigenvalue),
            ];
            Ok(Outcome {
                product: None,
                dimension: d,
                report,
                summary,
                metadata,
            })
        }
        Kind::Report => {
            let Payload::Report(r) = doc.payload else {
                unreachable!("kind is report")
            };
            let summary = vec![format!("report on {}, passed = {}", r.subject, r.passed)];
            Ok(Outcome {
                product: None,
                dimension: d,
                report: *r,
                summary,
                metadata,
            })
        }
    }
}

fn cmd_wigner_function(state: &Path) -> Result<Outcome> {
    let doc = read_document(state)?;
    let ctx = doc.context()?;
    let rho = doc.to_state()?;
    let w = WignerFunction::from_state(&rho, &ctx)?;
    let metadata = Metadata::now(None, Some("wigner-function"));
    let ws = wigner_summary(&w);
    let summary = vec![
        format!("Wigner function, d = {}", ctx.dim()),
        format!("sum = {}, min = {}, negativity = {}", num(ws.sum), num(ws.min_value), num(ws.negativity)),
    ];
    let mut report = plain_report("Wigner function", true);
    report.wigner = Some(ws);
    Ok(Outcome {
        product: Some(Document::from_wigner(&w, metadata.clone())),
        dimension: ctx.dim(),
        report,
        summary,
        metadata,
    })
}

fn cmd_probabilities(povm: &Path, state: &Path, path: Option<PathBuf>, out: &mut dyn Write) -> Result<bool> {
    let povm = read_document(povm)?.to_povm()?;
    let rho = read_document(state)?.to_state()?;
    let probs = probabilities(&povm, &rho)?;
    let mut text = serde_json::to_string(&probs).map_err(|e| Error::Invalid(e.to_string()))?;
    text.push('\n');
    match path {
        Some(p) => write_file(&p, &text)?,
        None => out.write_all(text.as_bytes()).map_err(io_error)?,
    }
    Ok(true)
}

fn cmd_reconstruct(povm: &Path, probs: &Path) -> Result<Outcome> {
    let povm = read_document(povm)?.to_povm()?;
    let probs = decode_probabilities(&read_file(probs)?)?;
    let rec = reconstruct_state(&povm, &probs)?;
    let metadata = Metadata::now(None, Some("reconstruct"));
    let s = state_summary(&rec.rho);
    let summary = vec![
        format!("linear reconstruction, d = {}", povm.dim()),
        format!("min eigenvalue = {:e}, positive: {}", s.min_eigenvalue, yes(s.is_psd)),
    ];
    let mut report = plain_report("linear reconstruction", rec.is_psd);
    if !rec.is_psd {
        report.notes.push("estimate is not positive semidefinite".to_owned());
    }
    report.state = Some(s);
    Ok(Outcome {
        product: Some(Document::from_state(&rec.rho, metadata.clone())),
        dimension: povm.dim(),
        report,
        summary,
        metadata,
    })
}

fn cmd_mub(bases: &Path) -> Result<Outcome> {
    let file = BasesFile::decode(&read_file(bases)?)?;
    let rep = verify_mub(&file.to_family())?;
    let summary = vec![
        format!("{} bases, d = {}", file.bases.len(), file.dimension),
        format!("overlap deviation = {:e}, Bloch deviation = {:e}", rep.overlap_deviation, rep.bloch_deviation),
        format!("mutually unbiased: {}", yes(rep.is_mub)),
    ];
    let mut report = plain_report("basis family", rep.is_mub);
    report.mub = Some(rep);
    Ok(Outcome {
        product: None,
        dimension: file.dimension,
        report,
        summary,
        metadata: Metadata::now(None, Some("mub-check")),
    })
}
