//! Command-line front end. `run` parses arguments, consults the result
//! cache, executes one command and writes its report.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or input error.

mod cache;
mod insertions;
mod json;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{int, GradedSeries, Var};
use crate::cohft::{four_point, solve_small_phase};
use crate::descendants::{self, descendant_variables, potential_in, Constraint, CorrelatorKey};
use crate::dispersionless::verify_potential_flow;
use crate::psdo::{canonical_l, default_depth, rth_root};
use crate::strata::{self, DecoratedGraph};

pub use cache::{Cache, VERSION_TAG};
pub use insertions::{parse_insertions, Insertions};
pub use json::{rational_json, series_from_json, series_to_json, Report, SeriesJson, TermJson, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(
    name = "spinh",
    version,
    about = "Exact r-spin intersection numbers and KdV_r checks"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cache directory (defaults to $SPINH_CACHE_DIR; no caching if neither is set).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn rank(s: &str) -> Result<u32, String> {
    let r: u32 = s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))?;
    if r < 2 {
        return Err(format!("r must be at least 2, got {r}"));
    }
    Ok(r)
}

fn flow(s: &str) -> Result<(u32, u32), String> {
    let (n, m) = s.split_once(',').ok_or_else(|| format!("expected n,m, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<u32>().map_err(|_| format!("bad flow index {x:?}"));
    Ok((parse(n)?, parse(m)?))
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Genus-zero (or genus-one) potentials.
    Potential {
        #[command(subcommand)]
        which: PotentialCmd,
    },
    /// A single correlator, e.g. --insertions "tau(0,1)^4".
    Correlator {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long)]
        insertions: String,
        #[arg(long)]
        mu1: bool,
    },
    /// Verify an identity; exits 1 with a residual report on failure.
    Check {
        #[command(subcommand)]
        which: CheckCmd,
    },
    /// Pseudo-differential operator computations.
    Psdo {
        #[command(subcommand)]
        which: PsdoCmd,
    },
    /// Decorated stable graphs.
    Graphs {
        #[command(subcommand)]
        which: GraphsCmd,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum PotentialCmd {
    /// Φ₀ on the small phase space, solved from WDVV.
    Small {
        #[arg(long, value_parser = rank)]
        r: u32,
    },
    /// Φ_g in all descendant variables, truncated at total degree N.
    Large {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long)]
        max_deg: u32,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum CheckCmd {
    /// WDVV on the small-phase potential.
    Wdvv {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long)]
        max_deg: Option<u32>,
    },
    /// L_{-1} annihilates exp(Φ₀+Φ₁).
    String {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long)]
        max_deg: u32,
    },
    /// The dilaton equation on exp(Φ₀+Φ₁).
    Dilaton {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long)]
        max_deg: u32,
    },
    /// L_0 annihilates exp(Φ₀+Φ₁).
    L0 {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long)]
        max_deg: u32,
    },
    /// Φ₀ and Φ₁ are homogeneous for the Euler field.
    Grading {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long)]
        max_deg: u32,
    },
    /// Φ₀ against the dispersionless flow ∂/∂t_n^m.
    Kdv {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long, value_parser = flow)]
        flow: (u32, u32),
        #[arg(long)]
        max_deg: u32,
    },
    /// The M_{0,4} μ₁ integral against the four-point function.
    Fourpoint {
        #[arg(long, value_parser = rank)]
        r: u32,
    },
    /// ⟨τ τ τ τ μ₁⟩₀ against the M_{0,4} integral for Σm = r-2.
    Mu1 {
        #[arg(long, value_parser = rank)]
        r: u32,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum PsdoCmd {
    /// L^{1/r} of the canonical Lax operator.
    Root {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long)]
        depth: Option<u32>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum GraphsCmd {
    /// Decorated stable graphs with the given tail marks, up to isomorphism.
    Enumerate {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        /// Tail marks, e.g. 1,1,1,1.
        #[arg(long, value_delimiter = ',')]
        marks: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        max_edges: usize,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        /// Emit Graphviz DOT instead of one JSON graph per line.
        #[arg(long)]
        dot: bool,
    },
    /// Order of the automorphism kernel of a graph given as JSON.
    Aut {
        #[arg(long, value_parser = rank)]
        r: u32,
        #[arg(long)]
        graph: String,
    },
}

#[derive(Debug)]
enum Failure {
    /// Bad input: reported on stderr, exit 2.
    Input(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Runs one command line (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let cache = if cli.no_cache {
        Cache::disabled()
    } else {
        match cli
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os("SPINH_CACHE_DIR").map(PathBuf::from))
        {
            Some(dir) => Cache::at(dir),
            None => Cache::disabled(),
        }
    };
    let fingerprint = serde_json::to_string(&cli.command).expect("commands serialize");
    let report = match cache.load(&fingerprint, err) {
        Some(report) => report,
        None => match execute(&cli.command) {
            Ok(report) => {
                if let Err(e) = cache.store(&fingerprint, &report) {
                    let _ = writeln!(err, "warning: could not write cache entry: {e}");
                }
                report
            }
            Err(Failure::Input(msg)) => {
                let _ = writeln!(err, "error: {msg}");
                return 2;
            }
        },
    };
    let _ = write!(out, "{}", render(&report, cli.format));
    if report.ok {
        0
    } else {
        1
    }
}

/// The exact bytes written to stdout for a report.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => format!("{}\n", report.text),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(report).expect("reports serialize")),
    }
}

fn series_value(s: &GradedSeries) -> Value {
    serde_json::to_value(series_to_json(s)).expect("series serialize")
}

fn execute(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Potential {
            which: PotentialCmd::Small { r },
        } => {
            let phi = solve_small_phase(*r)?.potential().clone();
            Ok(Report::new(
                "potential small",
                *r,
                true,
                phi.to_string(),
                series_value(&phi),
            ))
        }
        Command::Potential {
            which: PotentialCmd::Large { r, genus, max_deg },
        } => {
            let phi = descendants::large_potential(*r, *genus, *max_deg)?;
            Ok(Report::new(
                "potential large",
                *r,
                true,
                phi.to_string(),
                series_value(&phi),
            ))
        }
        Command::Correlator {
            r,
            genus,
            insertions,
            mu1,
        } => {
            let parsed = parse_insertions(insertions).map_err(Failure::Input)?;
            let mu1 = *mu1 || parsed.mu1;
            let value = match CorrelatorKey::new(*r, *genus, parsed.taus.clone(), mu1) {
                Ok(key) => descendants::correlator(&key)?,
                Err(descendants::DescendantError::RamondInsertion(_)) => int(0),
                Err(e) => return Err(e.into()),
            };
            let text = rational_json(&value);
            let result = json!({ "insertions": parsed.taus, "genus": genus, "mu1": mu1, "value": text });
            Ok(Report::new("correlator", *r, true, text, result))
        }
        Command::Check { which } => check(which),
        Command::Psdo {
            which: PsdoCmd::Root { r, depth },
        } => {
            let depth = depth.unwrap_or_else(|| default_depth(*r));
            let l = canonical_l(*r);
            let root = rth_root(&l, depth)?;
            let pow = root.power(*r);
            let floor = pow.floor().unwrap_or(i64::MIN);
            let ok = pow == l.truncated(floor);
            let text = format!("L^(1/{r}) = {root}\n(L^(1/{r}))^{r} = L through D^{floor}: {ok}");
            let result =
                json!({ "root": root.to_string(), "depth": depth, "verified_floor": floor, "power_matches": ok });
            Ok(Report::new("psdo root", *r, ok, text, result))
        }
        Command::Graphs {
            which:
                GraphsCmd::Enumerate {
                    r,
                    genus,
                    marks,
                    max_edges,
                    cap,
                    dot,
                },
        } => {
            let graphs = strata::enumerate_boundary_graphs(*r, *genus, marks, *max_edges, *cap)?;
            let mut text = format!("{} graphs", graphs.len());
            for g in &graphs {
                text.push('\n');
                if *dot {
                    text.push_str(g.to_dot().trim_end());
                } else {
                    text.push_str(&serde_json::to_string(g).expect("graphs serialize"));
                }
            }
            Ok(Report::new(
                "graphs enumerate",
                *r,
                true,
                text,
                json!({ "graphs": graphs }),
            ))
        }
        Command::Graphs {
            which: GraphsCmd::Aut { r, graph },
        } => {
            let mut g: DecoratedGraph = serde_json::from_str(graph)?;
            g.r = *r;
            let violations = match strata::validate(&g) {
                Ok(()) => Vec::new(),
                Err(v) => v.iter().map(|x| format!("{x:?}")).collect(),
            };
            let order = strata::aut_order(&g)?;
            let mut text = order.to_string();
            for v in &violations {
                text.push_str(&format!("\nwarning: {v}"));
            }
            let result = json!({ "aut_order": order.to_string(), "violations": violations });
            Ok(Report::new("graphs aut", *r, true, text, result))
        }
    }
}

fn residual_report(command: &str, r: u32, residual: &GradedSeries) -> Report {
    let ok = residual.is_zero();
    let text = format!("residual: {}", if ok { "0".to_string() } else { residual.to_string() });
    Report::new(command, r, ok, text, json!({ "residual": series_value(residual) }))
}

fn check(which: &CheckCmd) -> Result<Report, Failure> {
    match which {
        CheckCmd::Wdvv { r, max_deg } => {
            let f = solve_small_phase(*r)?;
            let mut failures = Vec::new();
            for ((a, b, c, d), s) in f.wdvv_residual() {
                let s = match max_deg {
                    Some(n) => s.truncated(*n),
                    None => s,
                };
                if !s.is_zero() {
                    failures.push((vec![a, b, c, d], s));
                }
            }
            let ok = failures.is_empty();
            let mut text = format!("residual: {}", if ok { "0" } else { "nonzero" });
            for (idx, s) in &failures {
                text.push_str(&format!("\n  {idx:?}: {s}"));
            }
            let result: Vec<Value> = failures
                .iter()
                .map(|(idx, s)| json!({ "indices": idx, "residual": series_value(s) }))
                .collect();
            Ok(Report::new("check wdvv", *r, ok, text, json!({ "failures": result })))
        }
        CheckCmd::String { r, max_deg } => constraint("check string", Constraint::String, *r, *max_deg),
        CheckCmd::Dilaton { r, max_deg } => constraint("check dilaton", Constraint::Dilaton, *r, *max_deg),
        CheckCmd::L0 { r, max_deg } => constraint("check l0", Constraint::L0, *r, *max_deg),
        CheckCmd::Grading { r, max_deg } => constraint("check grading", Constraint::Grading, *r, *max_deg),
        CheckCmd::Kdv {
            r,
            flow: (n, m),
            max_deg,
        } => {
            if m + 2 > *r {
                return Err(Failure::Input(format!("flow m = {m} must be at most r-2 = {}", r - 2)));
            }
            // the flow only differentiates in t_0^* and t_n^m, so the other variables may be set to zero
            let mut vars: Vec<Var> = descendant_variables(*r, 0);
            vars.push(Var::t(*n, *m));
            vars.sort_unstable();
            vars.dedup();
            let phi = potential_in(*r, 0, max_deg + 3, &vars)?;
            let res = verify_potential_flow(&phi, *n, *m, *max_deg)?;
            let ok = res.values().all(GradedSeries::is_zero);
            let mut text = format!("residual: {}", if ok { "0" } else { "nonzero" });
            for (j, s) in res.iter().filter(|(_, s)| !s.is_zero()) {
                text.push_str(&format!("\n  u{j}: {s}"));
            }
            let result: Value = res.iter().map(|(j, s)| (format!("u{j}"), series_value(s))).collect();
            Ok(Report::new(
                "check kdv",
                *r,
                ok,
                text,
                json!({ "flow": [n, m], "residuals": result }),
            ))
        }
        CheckCmd::Fourpoint { r } => {
            let mut mismatches = Vec::new();
            let types = four_point_types(*r, 2 * r - 2);
            for t in &types {
                let lhs = strata::m04_mu1_integral(*r, *t)?;
                let rhs = four_point(*r, *t);
                if lhs != rhs {
                    mismatches
                        .push(json!({ "marks": t, "m04": rational_json(&lhs), "four_point": rational_json(&rhs) }));
                }
            }
            let ok = mismatches.is_empty();
            let text = format!("checked {} types, mismatches: {}", types.len(), mismatches.len());
            Ok(Report::new(
                "check fourpoint",
                *r,
                ok,
                text,
                json!({ "mismatches": mismatches }),
            ))
        }
        CheckCmd::Mu1 { r } => {
            let e = descendants::engine(*r)?;
            let mut mismatches = Vec::new();
            let types = four_point_types(*r, r - 2);
            for t in &types {
                let ins: Vec<(u32, u32)> = t.iter().map(|&m| (0, m)).collect();
                let lhs = descendants::mu1_correlator_g0(&e, &ins);
                let rhs = strata::m04_mu1_integral(*r, *t)?;
                if lhs != rhs || lhs != int(0) {
                    mismatches.push(json!({ "marks": t, "mu1": rational_json(&lhs), "m04": rational_json(&rhs) }));
                }
            }
            let ok = mismatches.is_empty();
            let text = format!("checked {} types, mismatches: {}", types.len(), mismatches.len());
            Ok(Report::new(
                "check mu1",
                *r,
                ok,
                text,
                json!({ "mismatches": mismatches }),
            ))
        }
    }
}

fn constraint(command: &str, kind: Constraint, r: u32, max_deg: u32) -> Result<Report, Failure> {
    let res = descendants::operator_residual(kind, r, max_deg)?;
    Ok(residual_report(command, r, &res))
}

/// Ordered 4-tuples of marks in `0..=r-2` with the given sum.
pub fn four_point_types(r: u32, sum: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for a in 0..r - 1 {
        for b in 0..r - 1 {
            for c in 0..r - 1 {
                let Some(d) = sum.checked_sub(a + b + c) else { continue };
                if d + 2 <= r {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("spinh").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn documented_outputs() {
        assert_eq!(
            run_str(&["potential", "small", "--r", "3", "--no-cache"]).1,
            "1/2*x0^2*x1 + 1/72*x1^4\n"
        );
        let (code, out, _) = run_str(&[
            "correlator",
            "--r",
            "3",
            "--genus",
            "0",
            "--insertions",
            "tau(0,1)^4",
            "--no-cache",
        ]);
        assert_eq!((code, out.as_str()), (0, "1/3\n"));
        let (code, out, _) = run_str(&[
            "check",
            "kdv",
            "--r",
            "2",
            "--flow",
            "1,0",
            "--max-deg",
            "5",
            "--no-cache",
        ]);
        assert_eq!((code, out.as_str()), (0, "residual: 0\n"));
    }

    #[test]
    fn usage_errors() {
        let (code, _, err) = run_str(&["correlator", "--r", "1", "--insertions", "tau(0,0)"]);
        assert_eq!(code, 2);
        assert!(err.contains("--r"), "{err}");
        assert_eq!(run_str(&["correlator", "--r", "3", "--insertions", "tau(0"]).0, 2);
        assert_eq!(
            run_str(&["check", "kdv", "--r", "3", "--flow", "0,2", "--max-deg", "3"]).0,
            2
        );
        assert_eq!(run_str(&["bogus"]).0, 2);
    }

    #[test]
    fn inadmissible_correlators_are_zero() {
        let (code, out, _) = run_str(&[
            "correlator",
            "--r",
            "3",
            "--insertions",
            "tau(0,2) tau(0,0)^2",
            "--no-cache",
        ]);
        assert_eq!((code, out.as_str()), (0, "0\n"));
        let (code, out, _) = run_str(&[
            "correlator",
            "--r",
            "4",
            "--insertions",
            "tau(0,2) tau(0,1)^4 mu1",
            "--no-cache",
        ]);
        assert_eq!((code, out.as_str()), (0, "1/16\n"));
    }

    #[test]
    fn four_point_type_listing() {
        assert_eq!(four_point_types(3, 4), vec![[1, 1, 1, 1]]);
        assert!(four_point_types(2, 0).contains(&[0, 0, 0, 0]));
    }
}
