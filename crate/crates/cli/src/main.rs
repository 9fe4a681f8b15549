//! Command-line surface: generation of the canonical families, geometric
//! ingestion, validation, classification, isomorphism testing, restriction,
//! the extraction pipeline, cyclic subdiagram search and diagram doubling.
//!
//! Exit codes: 0 on success, 1 on domain errors (with a diagnostic on
//! stderr), 2 on usage errors.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pseudocircles::codes::Label;
use pseudocircles::extraction::{self, ExtractOptions};
use pseudocircles::families;
use pseudocircles::format;
use pseudocircles::geometry;
use pseudocircles::isomorphism;
use pseudocircles::pseudolines;

#[derive(Parser)]
#[command(
    name = "arr",
    version,
    about = "Arrangements of pseudocircles as signed intersection codes"
)]
struct Cli {
    /// Worker threads for search stages (defaults to ARR_THREADS or 1).
    #[arg(long, global = true, env = "ARR_THREADS", default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    C1,
    C2,
    C3,
    Cyclic,
    X4,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a canonical family member.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Size m; ignored for x4.
        #[arg(long, default_value_t = 1)]
        size: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Ingest plane circles (lines `label cx cy r`) into intersection codes.
    Ingest {
        #[arg(long)]
        circles: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// Emit point/arc lists for plotting instead of codes.
        #[arg(long)]
        emit_plot_data: bool,
    },
    /// Check the structural invariants of a code file.
    Validate { input: PathBuf },
    /// Classify a size-3 arrangement as Krupp or NonKrupp.
    Classify { input: PathBuf },
    /// Decide isomorphism of two arrangements; emits the witness transform.
    Isomorphic { a: PathBuf, b: PathBuf },
    /// Restrict an arrangement to a label subset.
    Restrict {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<u32>,
    },
    /// Find a certified unavoidable subarrangement of size m.
    FindUnavoidable {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: u32,
        /// Node budget for the search stages.
        #[arg(long)]
        budget: Option<u64>,
        /// Include the stage trace in the output.
        #[arg(long)]
        trace: bool,
    },
    /// Find a cyclic subdiagram of size m in a wiring diagram.
    Cyclic {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Double a wiring diagram into an arrangement of great pseudocircles.
    Double {
        #[arg(long)]
        input: PathBuf,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))
}

fn load_arrangement(path: &PathBuf) -> Result<pseudocircles::Arrangement, String> {
    let text = read(path)?;
    format::parse_auto(&text).map_err(|e| format!("{}: {}", path.display(), e))
}

fn run(cli: Cli) -> Result<String, String> {
    match cli.command {
        Command::Gen {
            family,
            size,
            format: out,
        } => {
            let arr = match family {
                FamilyArg::C1 => families::gen_c1(size).map_err(|e| e.to_string())?,
                FamilyArg::C2 => families::gen_c2(size).map_err(|e| e.to_string())?,
                FamilyArg::C3 => families::gen_c3(size).map_err(|e| e.to_string())?,
                FamilyArg::X4 => families::gen_x4(),
                FamilyArg::Cyclic => {
                    let w = pseudolines::gen_cyclic(size as usize).map_err(|e| e.to_string())?;
                    return Ok(pseudolines::emit_wiring(&w));
                }
            };
            Ok(match out {
                OutputFormat::Text => format::emit_text(&arr),
                OutputFormat::Json => format::emit_json(&arr),
            })
        }
        Command::Ingest {
            circles,
            eps,
            emit_plot_data,
        } => {
            let circles = geometry::parse_circles(&read(&circles)?).map_err(|e| e.to_string())?;
            if emit_plot_data {
                let mut out =
                    serde_json::to_string_pretty(&geometry::plot_data(&circles)).unwrap();
                out.push('\n');
                return Ok(out);
            }
            let arr =
                geometry::circles_to_arrangement(&circles, eps).map_err(|e| e.to_string())?;
            Ok(format::emit_text(&arr))
        }
        Command::Validate { input } => {
            let arr = load_arrangement(&input)?;
            let report = arr.validate();
            if report.is_pass() {
                Ok("pass\n".into())
            } else {
                Err(report.to_string())
            }
        }
        Command::Classify { input } => {
            let arr = load_arrangement(&input)?;
            let class = families::classify_triple(&arr).map_err(|e| e.to_string())?;
            Ok(format!("{}\n", class))
        }
        Command::Isomorphic { a, b } => {
            let arr_a = load_arrangement(&a)?;
            let arr_b = load_arrangement(&b)?;
            match isomorphism::is_isomorphic(&arr_a, &arr_b).map_err(|e| e.to_string())? {
                Some(t) => {
                    let mut out = serde_json::to_string_pretty(&t).unwrap();
                    out.push('\n');
                    Ok(out)
                }
                None => Err("not isomorphic".into()),
            }
        }
        Command::Restrict { input, labels } => {
            let arr = load_arrangement(&input)?;
            let subset: BTreeSet<Label> = labels.into_iter().map(Label).collect();
            let restricted = arr.restrict(&subset).map_err(|e| e.to_string())?;
            Ok(format::emit_text(&restricted))
        }
        Command::FindUnavoidable {
            input,
            m,
            budget,
            trace,
        } => {
            let arr = load_arrangement(&input)?;
            let opts = ExtractOptions {
                budget,
                threads: cli.threads,
            };
            let result = extraction::find_unavoidable(&arr, m, &opts).map_err(|e| e.to_string())?;
            let mut json = result.to_json();
            if !trace {
                json.as_object_mut().unwrap().remove("trace");
            }
            let mut out = serde_json::to_string_pretty(&json).unwrap();
            out.push('\n');
            Ok(out)
        }
        Command::Cyclic { input, m } => {
            let w = pseudolines::parse_wiring(&read(&input)?).map_err(|e| e.to_string())?;
            match pseudolines::find_cyclic_subarrangement(&w, m) {
                Some((wires, labeling)) => {
                    let mut out = serde_json::to_string_pretty(&serde_json::json!({
                        "wires": wires,
                        "labeling": labeling,
                    }))
                    .unwrap();
                    out.push('\n');
                    Ok(out)
                }
                None => Err(format!("no cyclic subarrangement of size {}", m)),
            }
        }
        Command::Double { input } => {
            let w = pseudolines::parse_wiring(&read(&input)?).map_err(|e| e.to_string())?;
            let arr = pseudolines::double_wiring(&w).map_err(|e| e.to_string())?;
            Ok(format::emit_text(&arr))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{}", output);
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("{}", message);
            ExitCode::FAILURE
        }
    }
}
