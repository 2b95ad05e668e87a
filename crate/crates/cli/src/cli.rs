//! Command-line surface. [`run`] is the whole program minus process exit.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use cagres_core::bench::{brute_force_summarize, compare, gen_random_dag, perturb, GenSpec};
use cagres_core::docalc::{rule_witness, DoQuery, Rule, ZwAncestors};
use cagres_core::{
    d_separated, s_separated, summarize, CagresConfig, NodeId, SeparationQuery, SummaryDag, VarSet,
};
use clap::{Parser, Subcommand, ValueEnum};

use crate::io::{
    load_dag, load_document, load_similarity, load_summary, save_dag, save_summary, Document,
};
use crate::sweep::{run_sweep, write_report, Method, SweepSpec};

#[derive(Debug, Parser)]
#[command(
    name = "cagres",
    version,
    about = "Summarize causal DAGs by contracting nodes into clusters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random DAG.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a DAG into k clusters.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        /// Similarity matrix CSV; requires --tau.
        #[arg(long, requires = "tau")]
        similarity: Option<PathBuf>,
        #[arg(long, requires = "similarity")]
        tau: Option<f64>,
        #[arg(long)]
        no_cache: bool,
        #[arg(long)]
        no_preprocess: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the canonical DAG of a summary.
    Canonical {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the recursive basis, one statement per line.
    Rb {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decide d-separation on a graph or s-separation on a summary.
    Query {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "")]
        z: String,
    },
    /// Check the graphical condition of a do-calculus rule on a summary.
    Docalc {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[arg(long, default_value = "")]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        z: String,
        #[arg(long, default_value = "")]
        w: String,
        /// Take the ancestors of W in the summary with edges into X removed.
        #[arg(long)]
        zw_in_hbar: bool,
    },
    /// Compare two summaries of the same DAG.
    Metrics {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Exhaustive minimum-added-edge summary (at most 10 nodes).
    Bruteforce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Remove, then add random edges.
    Perturb {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        add: usize,
        #[arg(long)]
        remove: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run summarizers over random DAGs and write a CSV report.
    Sweep {
        #[arg(long, default_value = "20,30,40")]
        ns: String,
        #[arg(long, default_value = "0.2,0.4")]
        densities: String,
        #[arg(long, default_value = "0,1,2,3,4")]
        seeds: String,
        /// Target cluster count; defaults to half the node count, rounded up.
        #[arg(long)]
        k: Option<usize>,
        #[arg(
            long,
            default_value = "cagres,cagres-no-cache,cagres-no-preprocess,random"
        )]
        methods: String,
        /// Leave runtime_ms empty so the report is reproducible.
        #[arg(long)]
        no_timing: bool,
        /// Report path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Dsep,
    Ssep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    R1,
    R2,
    R3,
}

/// Parses `args` (program name first) and executes the command. Returns
/// the process exit code: 0 success, 1 domain error or negative answer,
/// 2 usage error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return e.exit_code();
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

fn list(s: &str) -> VarSet {
    VarSet::of(s.split(',').map(str::trim).filter(|p| !p.is_empty()))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| anyhow::anyhow!("invalid {what} {p:?}"))
        })
        .collect()
}

fn joined(ids: &[NodeId]) -> String {
    ids.iter().map(NodeId::as_str).collect::<Vec<_>>().join(",")
}

fn braces(set: &VarSet) -> String {
    format!("{{{set}}}")
}

fn execute(command: Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Gen {
            n,
            density,
            seed,
            out: path,
        } => {
            let g = gen_random_dag(&GenSpec { n, density, seed })?;
            save_dag(&g, &path)?;
        }
        Command::Summarize {
            input,
            k,
            seed,
            similarity,
            tau,
            no_cache,
            no_preprocess,
            out: path,
        } => {
            let g = load_dag(&input).with_context(|| format!("reading {}", input.display()))?;
            let similarity = match (similarity, tau) {
                (Some(p), Some(t)) => Some(
                    load_similarity(&p, t).with_context(|| format!("reading {}", p.display()))?,
                ),
                _ => None,
            };
            let cfg = CagresConfig {
                k,
                seed,
                use_cache: !no_cache,
                use_preprocessing: !no_preprocess,
                similarity,
            };
            let h = summarize(&g, &cfg)?;
            save_summary(&h, &path)?;
        }
        Command::Canonical { input, out: path } => {
            let h = load_summary(&input).with_context(|| format!("reading {}", input.display()))?;
            save_dag(&h.canonical(), &path)?;
        }
        Command::Rb { input } => {
            let h = match load_document(&input)
                .with_context(|| format!("reading {}", input.display()))?
            {
                Document::Graph(g) => SummaryDag::trivial(&g),
                Document::Summary(h) => h,
            };
            for s in h.grounded_recursive_basis() {
                let line = format!(
                    "{} | {} | {}",
                    joined(&h.in_base_order(&s.x)),
                    joined(&h.in_base_order(&s.y)),
                    joined(&h.in_base_order(&s.z))
                );
                writeln!(out, "{}", line.trim_end())?;
            }
        }
        Command::Query {
            input,
            mode,
            x,
            y,
            z,
        } => {
            let q = SeparationQuery::new(list(&x), list(&y), list(&z))?;
            let doc =
                load_document(&input).with_context(|| format!("reading {}", input.display()))?;
            let separated = match (mode, doc) {
                (Mode::Dsep, Document::Graph(g)) => d_separated(&g, &q)?,
                (Mode::Ssep, Document::Summary(h)) => s_separated(&h, &q)?,
                (Mode::Dsep, Document::Summary(_)) => {
                    bail!("dsep expects a graph; use --mode ssep for summaries")
                }
                (Mode::Ssep, Document::Graph(_)) => {
                    bail!("ssep expects a summary; use --mode dsep for graphs")
                }
            };
            writeln!(out, "{}", if separated { "SEPARATED" } else { "CONNECTED" })?;
            return Ok(if separated { 0 } else { 1 });
        }
        Command::Docalc {
            input,
            rule,
            x,
            y,
            z,
            w,
            zw_in_hbar,
        } => {
            let h = load_summary(&input).with_context(|| format!("reading {}", input.display()))?;
            let q = DoQuery::new(list(&x), list(&y), list(&z), list(&w))?;
            let rule = match rule {
                RuleArg::R1 => Rule::R1,
                RuleArg::R2 => Rule::R2,
                RuleArg::R3 => Rule::R3,
            };
            let zw = if zw_in_hbar {
                ZwAncestors::MutilatedX
            } else {
                ZwAncestors::Summary
            };
            let wit = rule_witness(&h, rule, &q, zw)?;
            writeln!(
                out,
                "{}",
                if wit.separated {
                    "APPLIES"
                } else {
                    "NOT-APPLICABLE"
                }
            )?;
            writeln!(
                out,
                "bar={} under={} {}",
                braces(&wit.bar),
                braces(&wit.under),
                if wit.separated {
                    "SEPARATED"
                } else {
                    "CONNECTED"
                }
            )?;
            return Ok(if wit.separated { 0 } else { 1 });
        }
        Command::Metrics { a, b } => {
            let ha = load_summary(&a).with_context(|| format!("reading {}", a.display()))?;
            let hb = load_summary(&b).with_context(|| format!("reading {}", b.display()))?;
            let r = compare(&ha, &hb)?;
            let round = |p: f64| (p * 100.0).round() / 100.0;
            writeln!(
                out,
                "implied_a_by_b,implied_b_by_a,additional_edges_a,additional_edges_b"
            )?;
            writeln!(
                out,
                "{},{},{},{}",
                round(r.implied_a_by_b),
                round(r.implied_b_by_a),
                r.additional_edges_a,
                r.additional_edges_b
            )?;
        }
        Command::Bruteforce {
            input,
            k,
            out: path,
        } => {
            let g = load_dag(&input).with_context(|| format!("reading {}", input.display()))?;
            save_summary(&brute_force_summarize(&g, k)?, &path)?;
        }
        Command::Perturb {
            input,
            add,
            remove,
            seed,
            out: path,
        } => {
            let g = load_dag(&input).with_context(|| format!("reading {}", input.display()))?;
            save_dag(&perturb(&g, add, remove, seed)?, &path)?;
        }
        Command::Sweep {
            ns,
            densities,
            seeds,
            k,
            methods,
            no_timing,
            out: path,
        } => {
            let methods = methods
                .split(',')
                .map(|m| {
                    Method::parse(m.trim()).ok_or_else(|| anyhow::anyhow!("unknown method {m:?}"))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let spec = SweepSpec {
                ns: parse_list(&ns, "node count")?,
                densities: parse_list(&densities, "density")?,
                seeds: parse_list(&seeds, "seed")?,
                k,
                methods,
                timing: !no_timing,
                parallel: true,
            };
            let rows = run_sweep(&spec)?;
            match path {
                Some(p) => {
                    let file = std::fs::File::create(&p)
                        .with_context(|| format!("creating {}", p.display()))?;
                    write_report(&rows, file)?;
                }
                None => write_report(&rows, &mut *out)?,
            }
        }
    }
    Ok(0)
}
