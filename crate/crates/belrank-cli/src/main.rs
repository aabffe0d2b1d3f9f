//! `belrank` — isotopy invariants of finite semifields from the command line.
//!
//! Exit codes: 0 success, 2 parse error, 3 not a semifield, 4 search space
//! too large for exhaustive mode, 1 anything else.

use belrank::belconfig::{configuration_from_decomposition, verify_configuration_stats};
use belrank::families::{field_semifield, gtf, gtf_find_c};
use belrank::formats;
use belrank::gf::FieldCtx;
use belrank::search::{mrk_class, BelTriple, InvariantRecord, SearchMode, SearchOptions};
use belrank::semifield::SemifieldCoeffs;
use belrank::{Ctx, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "belrank",
    version,
    about = "Matrix-rank and BEL-rank invariants of finite semifields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the invariant record of one COEFF or TABLE input.
    Invariants {
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: OutFormat,
        /// Skip the semifield gate and report invariants of the raw algebra.
        #[arg(long)]
        force: bool,
        /// Include elapsed milliseconds (off by default: output stays
        /// byte-identical across runs).
        #[arg(long)]
        timing: bool,
    },
    /// Process every file in a directory; appends a brk histogram.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: OutFormat,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        timing: bool,
    },
    /// Emit a built-in family member as a COEFF file.
    Family {
        #[command(subcommand)]
        family: FamilyCmd,
    },
    /// Convert between the COEFF and TABLE formats.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a word over {d, t} (dual, transpose), left to right.
    Knuth {
        input: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify the BEL-configuration of a DECOMP file against the
    /// zero-divisor test of its algebra.
    VerifyBel { input: PathBuf },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// The finite field F_{q^n} itself.
    Field {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generalized twisted field x∘y = xy − c·x^{q^k}·y^{q^m}.
    Gtf {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        /// Twist constant as an element code.
        #[arg(long, conflicts_with = "auto_c")]
        c: Option<u32>,
        /// Pick the smallest valid twist constant.
        #[arg(long)]
        auto_c: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum OutFormat {
    Jsonl,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum Target {
    Coeff,
    Table,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Budget,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    /// Random candidates in budget mode (identity is always tried first).
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shards for the exhaustive search.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            mode: match self.mode {
                ModeArg::Exhaustive => SearchMode::Exhaustive,
                ModeArg::Budget => SearchMode::Budget {
                    samples: self.budget,
                    seed: self.seed,
                },
            },
            threads: self.threads,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::NotASemifield { .. } => 3,
        Error::SearchSpaceTooLarge(_) => 4,
        _ => 1,
    }
}

fn read_input(path: &Path) -> Result<SemifieldCoeffs, Error> {
    let text = std::fs::read_to_string(path)?;
    formats::read_algebra(&text)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// The full triple via `mrk_class` on the three Knuth images, with the
/// semifield gate applied unless forced.
fn compute_record(
    id: &str,
    s: &SemifieldCoeffs,
    opts: &SearchOptions,
    force: bool,
    timing: bool,
) -> Result<InvariantRecord, Error> {
    if !force {
        s.ensure_semifield()?;
    }
    let base = mrk_class(&s.dtd(), opts)?;
    let d = s.dual();
    let dual = mrk_class(&d.dtd(), opts)?;
    let dual_transpose = mrk_class(&d.transpose().dtd(), opts)?;
    let triple = BelTriple {
        base,
        dual,
        dual_transpose,
    };
    let nuclei = s.nuclei().ok();
    Ok(InvariantRecord::new(id, s, &triple, nuclei.as_ref(), timing))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Invariants {
            input,
            search,
            format,
            force,
            timing,
        } => {
            let s = read_input(&input)?;
            let rec = compute_record(&stem(&input), &s, &search.options(), force, timing)?;
            match format {
                OutFormat::Jsonl => println!("{}", rec.to_json_line()),
                OutFormat::Csv => {
                    println!("{}", InvariantRecord::csv_header());
                    println!("{}", rec.to_csv_row());
                }
            }
            Ok(())
        }
        Cmd::Batch {
            dir,
            search,
            format,
            force,
            timing,
        } => {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            files.retain(|p| p.is_file());
            files.sort();
            if files.is_empty() {
                return Ok(());
            }
            if matches!(format, OutFormat::Csv) {
                println!("{}", InvariantRecord::csv_header());
            }
            let opts = search.options();
            let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
            for path in &files {
                let id = stem(path);
                let outcome = read_input(path)
                    .and_then(|s| compute_record(&id, &s, &opts, force, timing));
                match outcome {
                    Ok(rec) => {
                        *histogram.entry(rec.brk).or_insert(0) += 1;
                        match format {
                            OutFormat::Jsonl => println!("{}", rec.to_json_line()),
                            OutFormat::Csv => println!("{}", rec.to_csv_row()),
                        }
                    }
                    Err(err) => match format {
                        OutFormat::Jsonl => println!(
                            "{}",
                            serde_json::json!({ "id": id, "error": err.to_string() })
                        ),
                        OutFormat::Csv => println!("# error {id}: {err}"),
                    },
                }
            }
            match format {
                OutFormat::Jsonl => {
                    let hist: serde_json::Map<String, serde_json::Value> = histogram
                        .iter()
                        .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                        .collect();
                    println!("{}", serde_json::json!({ "histogram": hist }));
                }
                OutFormat::Csv => {
                    let parts: Vec<String> = histogram
                        .iter()
                        .map(|(k, v)| format!("brk={k}:{v}"))
                        .collect();
                    println!("# histogram {}", parts.join(","));
                }
            }
            Ok(())
        }
        Cmd::Family { family } => {
            let (s, output) = match family {
                FamilyCmd::Field { p, e, n, output } => {
                    let ctx: Ctx = Arc::new(FieldCtx::new(p, e, n)?);
                    (field_semifield(&ctx), output)
                }
                FamilyCmd::Gtf {
                    p,
                    e,
                    n,
                    k,
                    m,
                    c,
                    auto_c,
                    output,
                } => {
                    let ctx: Ctx = Arc::new(FieldCtx::new(p, e, n)?);
                    let twist = match (c, auto_c) {
                        (Some(code), _) => ctx.elem(code)?,
                        (None, true) => gtf_find_c(&ctx, k, m)?,
                        (None, false) => {
                            return Err(Error::InvalidParameter(
                                "pass --c CODE or --auto-c".into(),
                            ))
                        }
                    };
                    (gtf(&ctx, k, m, twist)?, output)
                }
            };
            write_output(output.as_ref(), &formats::write_coeff(&s))
        }
        Cmd::Convert { input, to, output } => {
            let s = read_input(&input)?;
            let text = match to {
                Target::Coeff => formats::write_coeff(&s),
                Target::Table => formats::write_table(&s),
            };
            write_output(output.as_ref(), &text)
        }
        Cmd::Knuth {
            input,
            word,
            output,
        } => {
            let mut s = read_input(&input)?;
            for ch in word.chars() {
                s = match ch {
                    'd' => s.dual(),
                    't' => s.transpose(),
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "knuth word may only contain 'd' and 't', got {other:?}"
                        )))
                    }
                };
            }
            write_output(output.as_ref(), &formats::write_coeff(&s))
        }
        Cmd::VerifyBel { input } => {
            let text = std::fs::read_to_string(&input)?;
            let d = formats::read_decomp(&text)?;
            let algebra = belrank::belconfig::algebra_from_decomposition(&d);
            let is_sf = algebra.is_semifield();
            println!("r: {}", d.r());
            println!("algebra semifield: {is_sf}");
            match configuration_from_decomposition(&d) {
                Err(err @ (Error::DegenerateU | Error::DegenerateW)) => {
                    println!("configuration: degenerate ({err})");
                    if is_sf {
                        return Err(Error::InvalidParameter(
                            "degenerate configuration from a semifield algebra".into(),
                        ));
                    }
                    let (x, y) = algebra.zero_divisor().expect("non-semifield");
                    Err(Error::NotASemifield {
                        x: x.code(),
                        y: y.code(),
                    })
                }
                Err(err) => Err(err),
                Ok(cfg) => {
                    let stats = verify_configuration_stats(&cfg)?;
                    println!(
                        "spread elements: {} (meeting U: {}, meeting W: {}, violations: {})",
                        stats.spread_elements, stats.meets_u, stats.meets_w, stats.violations
                    );
                    match &stats.first_violation {
                        Some(v) => {
                            let codes: Vec<String> =
                                v.iter().map(|x| x.code().to_string()).collect();
                            println!("first violation: ({})", codes.join(", "));
                        }
                        None => println!("first violation: none"),
                    }
                    if stats.ok() != is_sf {
                        return Err(Error::InvalidParameter(
                            "geometric and algebraic verdicts disagree".into(),
                        ));
                    }
                    if stats.ok() {
                        println!("verdict: ok");
                        Ok(())
                    } else {
                        println!("verdict: violated");
                        let (x, y) = algebra.zero_divisor().expect("non-semifield");
                        Err(Error::NotASemifield {
                            x: x.code(),
                            y: y.code(),
                        })
                    }
                }
            }
        }
    }
}
