//! Command-line front door: compute rho and the phi bounds for graph files,
//! construct the extremal graphs, run row-sum certificates, and drive
//! verification campaigns with a persisted JSONL log.
//!
//! Exit codes: 0 success, 2 input error, 3 internal theorem/certificate
//! violation, 4 scale cap exceeded.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use bispec::bounds;
use bispec::graph::BipartiteGraph;
use bispec::io::{parse_graph, write_graph};
use bispec::search::{
    CellRecord, EnumerationSpec, SearchRecord, Verdict, append_record, max_spectral,
    merge_records, read_log, scan_conjecture3,
};
use bispec::spectral::{DEFAULT_RHO_SQ_TOL, scaling_certificate, spectral_radius};
use bispec::{Error, Result};

#[derive(Parser)]
#[command(
    name = "bispec",
    version,
    about = "Spectral radii and sharp degree-sequence bounds for bipartite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Absolute tolerance on computed spectral radii.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Worker threads for sharded search.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Append results to this JSONL log.
    #[arg(long, global = true)]
    log: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Significant digits for printed numbers.
    #[arg(long, global = true, default_value_t = 9)]
    precision: usize,

    /// Re-run sweep cells even if the log already has them.
    #[arg(long, global = true)]
    force: bool,

    /// Treat a square graph and its part swap as one class during search.
    #[arg(long, global = true)]
    dedupe_transpose: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral radius and basic statistics of a graph file.
    Rho { file: PathBuf },

    /// Evaluate the phi_{s,t} bound family on a graph file.
    Bounds {
        file: PathBuf,
        /// Print the full phi table with tight cells starred.
        #[arg(long, conflicts_with_all = ["best", "certify"])]
        grid: bool,
        /// Print only the minimizing cell (default).
        #[arg(long, conflicts_with = "certify")]
        best: bool,
        /// Run the row-sum scaling certificate at cell (S, T).
        #[arg(long, num_args = 2, value_names = ["S", "T"])]
        certify: Option<Vec<usize>>,
    },

    /// Print a named construction in the graph file format.
    Construct {
        #[arg(value_enum)]
        kind: Kind,
        p: usize,
        q: usize,
        /// Edge count; required for brace and bracket.
        e: Option<usize>,
    },

    /// Check the extremal statement on one cell (`verify P Q E`) or on
    /// every eligible cell of a sweep (`verify --sweep PMAX QMAX`).
    Verify {
        #[arg(num_args = 3, value_names = ["P", "Q", "E"], required_unless_present = "sweep")]
        cell: Option<Vec<usize>>,
        #[arg(long, num_args = 2, value_names = ["PMAX", "QMAX"], conflicts_with = "cell")]
        sweep: Option<Vec<usize>>,
    },

    /// Scan one cell for a witnessing extremal graph of the general
    /// refinement conjecture.
    Scan3 { p: usize, q: usize, e: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Brace,
    Bracket,
    Complete,
    Empty,
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (e.g. `bispec ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Scale(_) => 4,
        Error::CertificateViolation { .. }
        | Error::TheoremViolation(_)
        | Error::Convergence { .. }
        | Error::Dimension { .. } => 3,
        _ => 2,
    }
}

/// Format with a fixed number of significant digits.
fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn read_graph_file(path: &Path) -> Result<BipartiteGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Rho { file } => cmd_rho(cli, file),
        Command::Bounds {
            file,
            grid,
            best,
            certify,
        } => cmd_bounds(cli, file, *grid, *best, certify.as_deref()),
        Command::Construct { kind, p, q, e } => cmd_construct(*kind, *p, *q, *e),
        Command::Verify { cell, sweep } => cmd_verify(cli, cell.as_deref(), sweep.as_deref()),
        Command::Scan3 { p, q, e } => cmd_scan3(cli, *p, *q, *e),
    }
}

fn cmd_rho(cli: &Cli, file: &Path) -> Result<ExitCode> {
    let g = read_graph_file(file)?;
    let rho = spectral_radius(&g, cli.tol)?;
    let profile = g.degree_profile();
    match cli.format {
        Format::Text => {
            println!("rho {}", sig(rho, cli.precision));
            println!("e {}", g.edge_count());
            println!("degrees_left {}", join_usize(&profile.d));
            println!("degrees_right {}", join_usize(&profile.dprime));
            println!("connected {}", g.is_connected());
            println!("biregular {}", g.is_biregular());
        }
        Format::Json => {
            let out = json!({
                "rho": rho,
                "e": g.edge_count(),
                "degrees_left": profile.d,
                "degrees_right": profile.dprime,
                "connected": g.is_connected(),
                "biregular": g.is_biregular(),
            });
            println!("{out}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn join_usize(v: &[usize]) -> String {
    v.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_sig(v: &[f64], digits: usize) -> String {
    v.iter()
        .map(|x| sig(*x, digits))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_bounds(
    cli: &Cli,
    file: &Path,
    grid: bool,
    _best: bool,
    certify: Option<&[usize]>,
) -> Result<ExitCode> {
    let g = read_graph_file(file)?;
    if let Some(st) = certify {
        let report = scaling_certificate(&g, st[0], st[1], DEFAULT_RHO_SQ_TOL)?;
        match cli.format {
            Format::Text => {
                let p = cli.precision;
                println!("phi_sq {}", sig(report.phi_sq, p));
                println!("x {}", join_sig(&report.x, p));
                println!("xprime {}", join_sig(&report.xprime, p));
                println!("row_sums {}", join_sig(&report.row_sums, p));
                println!("max_row_sum {}", sig(report.max_row_sum, p));
                println!("verdict {}", report.verdict);
            }
            Format::Json => {
                let out = json!({
                    "s": report.s,
                    "t": report.t,
                    "phi_sq": report.phi_sq,
                    "x": report.x,
                    "xprime": report.xprime,
                    "row_sums": report.row_sums,
                    "max_row_sum": report.max_row_sum,
                    "verdict": report.verdict,
                });
                println!("{out}");
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    let bound_grid = bounds::phi_grid(&g, cli.tol)?;
    let best_tight = bound_grid.tight_cells.contains(&bound_grid.best);
    match cli.format {
        Format::Text => {
            if grid {
                println!("rho {}", sig(bound_grid.rho, cli.precision));
                for (si, row) in bound_grid.values.iter().enumerate() {
                    let line: Vec<String> = row
                        .iter()
                        .enumerate()
                        .map(|(ti, v)| {
                            let star = if bound_grid.tight_cells.contains(&(si + 1, ti + 1)) {
                                "*"
                            } else {
                                ""
                            };
                            format!("{}{star}", sig(*v, cli.precision))
                        })
                        .collect();
                    println!("{}", line.join(" "));
                }
            }
            let suffix = if best_tight { " TIGHT" } else { "" };
            println!(
                "({},{}) {}{suffix}",
                bound_grid.best.0,
                bound_grid.best.1,
                sig(bound_grid.best_value, cli.precision)
            );
        }
        Format::Json => {
            let values = if grid {
                Some(bound_grid.values.clone())
            } else {
                None
            };
            let out = json!({
                "rho": bound_grid.rho,
                "values": values,
                "best": [bound_grid.best.0, bound_grid.best.1],
                "best_value": bound_grid.best_value,
                "tight_cells": bound_grid.tight_cells,
                "tight": best_tight,
            });
            println!("{out}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_construct(kind: Kind, p: usize, q: usize, e: Option<usize>) -> Result<ExitCode> {
    let need_e =
        || e.ok_or_else(|| Error::Domain("this construction needs an edge count".into()));
    let g = match kind {
        Kind::Brace => BipartiteGraph::k_brace(p, q, need_e()?)?,
        Kind::Bracket => BipartiteGraph::k_bracket(p, q, need_e()?)?,
        Kind::Complete => BipartiteGraph::complete(p, q)?,
        Kind::Empty => BipartiteGraph::empty(p, q)?,
    };
    print!("{}", write_graph(&g));
    Ok(ExitCode::SUCCESS)
}

/// Run one cell, sharded across worker threads when requested. Results are
/// identical for any thread count.
fn run_cell(cli: &Cli, p: usize, q: usize, e: usize) -> Result<SearchRecord> {
    let mut base = EnumerationSpec::new(p, q, e);
    base.dedupe_transpose = cli.dedupe_transpose;
    if cli.threads <= 1 {
        return max_spectral(&base, cli.tol);
    }
    let shards: Vec<Result<SearchRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cli.threads)
            .map(|i| {
                let spec = base.with_shard(i, cli.threads);
                scope.spawn(move || max_spectral(&spec, cli.tol))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    let shards = shards.into_iter().collect::<Result<Vec<_>>>()?;
    merge_records(&shards, cli.tol)
}

fn log_record(cli: &Cli, record: &SearchRecord) -> Result<()> {
    if let Some(path) = &cli.log {
        append_record(path, &CellRecord::from(record))?;
    }
    Ok(())
}

fn verdict_line(cli: &Cli, record: &SearchRecord, prefix: &str) {
    let body = match record.verdict {
        Verdict::Confirmed => format!("confirmed {}", sig(record.max_rho, cli.precision)),
        Verdict::Refuted => format!(
            "refuted max_rho {} expected {}",
            sig(record.max_rho, cli.precision),
            record
                .extremal_value
                .map(|v| sig(v, cli.precision))
                .unwrap_or_else(|| "-".into())
        ),
        Verdict::Inapplicable => "inapplicable".into(),
        Verdict::Sampled => format!("sampled {}", sig(record.max_rho, cli.precision)),
    };
    println!("{prefix}{body}");
}

fn cmd_verify(cli: &Cli, cell: Option<&[usize]>, sweep: Option<&[usize]>) -> Result<ExitCode> {
    let mut refuted = false;
    if let Some(c) = cell {
        let record = run_cell(cli, c[0], c[1], c[2])?;
        log_record(cli, &record)?;
        match cli.format {
            Format::Text => verdict_line(cli, &record, ""),
            Format::Json => println!(
                "{}",
                serde_json::to_string(&CellRecord::from(&record))
                    .map_err(|e| Error::LogFormat(e.to_string()))?
            ),
        }
        refuted = record.verdict == Verdict::Refuted;
    } else if let Some(s) = sweep {
        let (pmax, qmax) = (s[0], s[1]);
        let done: HashSet<(usize, usize, usize)> = match (&cli.log, cli.force) {
            (Some(path), false) if path.exists() => read_log(path)?
                .iter()
                .filter(|r| r.verdict != Verdict::Sampled)
                .map(|r| (r.p, r.q, r.e))
                .collect(),
            _ => HashSet::new(),
        };
        for p in 1..=pmax {
            for q in 1..=qmax {
                let pq = p * q;
                // Eligible cells of the proved statement: 0 < pq - e < min.
                for removed in (1..p.min(q)).rev() {
                    let e = pq - removed;
                    if done.contains(&(p, q, e)) {
                        println!("{p} {q} {e} skipped (logged)");
                        continue;
                    }
                    let record = run_cell(cli, p, q, e)?;
                    log_record(cli, &record)?;
                    verdict_line(cli, &record, &format!("{p} {q} {e} "));
                    refuted |= record.verdict == Verdict::Refuted;
                }
            }
        }
    }
    if refuted {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_scan3(cli: &Cli, p: usize, q: usize, e: usize) -> Result<ExitCode> {
    let (verdict, record) = scan_conjecture3(p, q, e, cli.tol)?;
    log_record(cli, &record)?;
    match cli.format {
        Format::Text => match verdict.best_st {
            Some((s, t)) => println!("found ({s},{t})"),
            None => println!(
                "CANDIDATE-COUNTEREXAMPLE max_rho {}",
                sig(record.max_rho, cli.precision)
            ),
        },
        Format::Json => {
            let out = json!({
                "p": p,
                "q": q,
                "e": e,
                "found": verdict.found,
                "witness": verdict.best_st.map(|(s, t)| vec![s, t]),
                "max_rho": record.max_rho,
            });
            println!("{out}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
