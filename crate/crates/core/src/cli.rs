//! The `slnc` command-line front end.
//!
//! Exit codes: 0 success or pass, 1 check failed, 2 usage error, 3 input
//! error, 4 enumeration budget exceeded.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::lnc::GlobalCode;
use crate::network::Network;
use crate::oracle::{
    self, han_profile, refute_key_rate, verify_security, OracleError, ProbabilityTable, Verdict,
    VerifyOptions,
};
use crate::secure::{Guarantee, SecureCodeBundle};
use crate::Symbol;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "slnc", version, about = "Secure linear network coding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print C_min, C_t for one sink, or mincut(s, A) for a set of edges.
    Mincut {
        net: PathBuf,
        #[arg(long, conflicts_with = "edges")]
        sink: Option<String>,
        #[arg(long, value_delimiter = ',')]
        edges: Option<Vec<String>>,
    },
    /// Build a linear network code.
    Construct {
        net: PathBuf,
        /// Code dimension; defaults to C_min.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Build a secure code bundle.
    Secure {
        net: PathBuf,
        #[arg(long)]
        omega: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// List size-r wiretap sets by topology, or by code rank with --code.
    Enumerate {
        net: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        code: Option<PathBuf>,
        /// Report whether the code-rank sets are contained in the topology sets.
        #[arg(long, requires = "code")]
        prop1: bool,
    },
    /// Check security and decodability of a bundle by enumeration.
    Verify {
        bundle: PathBuf,
        /// Only scan sets of size exactly r.
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Search every linear code with a short key for a secure decodable one.
    Refute {
        net: PathBuf,
        #[arg(long)]
        omega: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        keydim: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Encode one message and decode it at every sink.
    Simulate {
        bundle: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        message: Vec<Symbol>,
        #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
        key: Option<Vec<Symbol>>,
        /// Seed for key sampling when --key is absent.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the averaged conditional entropy profile h_1..h_n.
    Hancheck {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn input(e: impl Display) -> Self {
        Self {
            code: EXIT_INPUT,
            msg: e.to_string(),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::BudgetExceeded { .. } => EXIT_BUDGET,
            OracleError::MonotonicityViolated { .. } => EXIT_CHECK_FAILED,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    Network::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_bundle(path: &Path) -> Result<SecureCodeBundle, Failure> {
    SecureCodeBundle::parse(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
        }
        None => out.write_all(text.as_bytes()).map_err(Failure::input),
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Mincut { net, sink, edges } => {
            let net = load_network(&net)?;
            let value = match (sink, edges) {
                (Some(t), _) => net.min_cut_to_sink(&t).map_err(Failure::input)?,
                (None, Some(set)) => net.min_cut_to_edges(&set).map_err(Failure::input)?,
                (None, None) => net.c_min(),
            };
            writeln!(out, "{value}").map_err(Failure::input)?;
            Ok(EXIT_OK)
        }
        Command::Construct { net, dim, output } => {
            let net = load_network(&net)?;
            let code = GlobalCode::construct(&net, dim.unwrap_or_else(|| net.c_min()))
                .map_err(Failure::input)?;
            emit(&code.to_text(), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Secure {
            net,
            omega,
            r,
            i,
            output,
        } => {
            let net = load_network(&net)?;
            let bundle = SecureCodeBundle::build(&net, omega, r, i).map_err(Failure::input)?;
            if bundle.guarantee().map_err(Failure::input)? == Guarantee::Empirical {
                let _ = writeln!(
                    err,
                    "note: omega + r exceeds the code dimension; run `verify` to confirm the leakage bound"
                );
            }
            emit(&bundle.to_text(), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Enumerate {
            net,
            r,
            code,
            prop1,
        } => {
            let net = load_network(&net)?;
            let Some(code_path) = code else {
                let sets = net
                    .enumerate_topology_wiretap_sets(r)
                    .map_err(Failure::input)?;
                write_sets(&sets.sets, out)?;
                return Ok(EXIT_OK);
            };
            let code = GlobalCode::parse(&read(&code_path)?, &net)
                .map_err(|e| Failure::input(format!("{}: {e}", code_path.display())))?;
            if prop1 {
                let rep = code.verify_subset_bound(r).map_err(Failure::input)?;
                writeln!(
                    out,
                    "subset={} code={} cut={} all={}",
                    rep.subset, rep.code_sets, rep.cut_sets, rep.all_sets
                )
                .map_err(Failure::input)?;
                return Ok(if rep.subset {
                    EXIT_OK
                } else {
                    EXIT_CHECK_FAILED
                });
            }
            let sets = code
                .enumerate_code_wiretap_sets(r)
                .map_err(Failure::input)?;
            write_sets(&sets.sets, out)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            bundle,
            fast,
            jobs,
            budget,
        } => {
            let bundle = load_bundle(&bundle)?;
            let report = verify_security(&bundle, VerifyOptions { fast, jobs, budget })?;
            for t in &report.undecodable_sinks {
                let _ = writeln!(err, "sink `{t}` cannot recover every input");
            }
            out.write_all(report.to_text().as_bytes())
                .map_err(Failure::input)?;
            Ok(if report.pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Refute {
            net,
            omega,
            r,
            keydim,
            budget,
            jobs,
        } => {
            let net = load_network(&net)?;
            let res = refute_key_rate(&net, omega, r, keydim, budget, jobs)?;
            out.write_all(res.to_text().as_bytes())
                .map_err(Failure::input)?;
            Ok(match res.verdict {
                Verdict::Refuted => EXIT_OK,
                Verdict::Counterexample => EXIT_CHECK_FAILED,
            })
        }
        Command::Simulate {
            bundle,
            message,
            key,
            seed,
        } => {
            let bundle = load_bundle(&bundle)?;
            let key = key.unwrap_or_else(|| {
                let mut rng = Lcg(seed.unwrap_or(0));
                let q = bundle.field().order();
                (0..bundle.key_dim()).map(|_| rng.symbol(q)).collect()
            });
            out.write_all(simulate(&bundle, &message, &key)?.as_bytes())
                .map_err(Failure::input)?;
            Ok(EXIT_OK)
        }
        Command::Hancheck { table, base } => {
            if !(base > 1.0 && base.is_finite()) {
                return Err(Failure::input(format!("base must exceed 1, got {base}")));
            }
            let table = ProbabilityTable::parse(&read(&table)?)?;
            let h = han_profile(&table, base)?;
            for (r, v) in h.iter().enumerate() {
                writeln!(out, "h{} {v:.9}", r + 1).map_err(Failure::input)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_sets(sets: &[Vec<String>], out: &mut dyn Write) -> Result<(), Failure> {
    for s in sets {
        writeln!(out, "{}", s.join(" ")).map_err(Failure::input)?;
    }
    Ok(())
}

fn join(xs: &[Symbol]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Transcript: inputs, one line per edge, one line per sink.
fn simulate(bundle: &SecureCodeBundle, m: &[Symbol], k: &[Symbol]) -> Result<String, Failure> {
    use std::fmt::Write as _;
    let net = bundle.network();
    let y = bundle.encode(m, k).map_err(Failure::input)?;
    let mut text = String::new();
    writeln!(text, "message {}", join(m)).unwrap();
    writeln!(text, "key {}", join(k)).unwrap();
    for (e, sym) in net.edges().iter().zip(&y) {
        writeln!(text, "edge {} {sym}", e.id).unwrap();
    }
    for &t in net.sinks() {
        let obs: Vec<Symbol> = net.in_edges(t).iter().map(|&e| y[e]).collect();
        let (dm, dk) = bundle.decode_at_node(t, &obs).map_err(Failure::input)?;
        writeln!(
            text,
            "sink {} message {} key {}",
            net.node_name(t),
            join(&dm),
            join(&dk)
        )
        .unwrap();
    }
    Ok(text)
}

/// 64-bit LCG; each symbol is the high 32 bits of the next state, mod `q`.
struct Lcg(u64);

impl Lcg {
    fn symbol(&mut self, q: u32) -> Symbol {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 32) as u32) % q
    }
}
