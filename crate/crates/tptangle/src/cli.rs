//! Command-line surface of `tpt`.
//!
//! Cell arguments are file paths; a bare fixture name such as `pi_plus` that is not an
//! existing file selects the built-in fixture.

use crate::diagram::{canonical_code, Axis, Orient, TorusDiagram};
use crate::error::{Error, Result};
use crate::exact::*;
use crate::fixtures::FixtureId;
use crate::io::json::{self, from_str, to_pretty};
use crate::io::svg::{render_diagram, render_tridiagram, RenderStyle};
use crate::lattice::{covering_data_int, decompose_sl3, hnf, recompose, IntMatrix3, ShearWord};
use crate::projection::{make_regular, project, tridiagram, ProjectionSpec, Tridiagram, TRIDIAGRAM_VIEWS};
use crate::search::{self, SearchConfig, TripletResult};
use crate::unit_cell::{apply_twist, cover, quotient, UnitCell};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_REGULARITY: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "tpt", version, about = "Diagrams and crossing numbers of triply periodic tangles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hermite normal form of a 3x3 integer matrix given as "a,b,c;d,e,f;g,h,i".
    Hnf {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Writes a determinant-1 matrix as a word in the six shear generators.
    Decompose {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Regular projection of a cell along one axis.
    Project {
        cell: String,
        #[command(flatten)]
        proj: ProjArgs,
        #[arg(long, default_value = "z")]
        axis: String,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        orient: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Front, top and right projections with a summary table.
    Tridiagram {
        cell: String,
        #[command(flatten)]
        proj: ProjArgs,
        /// Writes front.json, top.json, right.json and tridiagram.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Searches for a diagram with fewer crossings.
    Simplify {
        diagram: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper bound on the crossing number over twists and quotients of a cell.
    CrossingNumber {
        cell: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Twist words up to this length are tried.
        #[arg(long, default_value_t = 0)]
        twist_depth: u32,
        /// Comma-separated orders of quotients to try, from {2,3,4}.
        #[arg(long, default_value = "")]
        quotients: String,
        /// Adds wall-clock time to the JSON output.
        #[arg(long)]
        timing: bool,
        /// Writes the JSON here and prints a summary table instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Change of lattice basis by a shear word such as "1,-3,4^2".
    Twist {
        cell: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cover of a cell along the sublattice spanned by the matrix columns.
    Cover {
        cell: String,
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quotient of a cell by a translation of finite order.
    Quotient {
        cell: String,
        /// Translation as "p/q,p/q,p/q".
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of a diagram or tridiagram file.
    Render {
        file: PathBuf,
        /// JSON render style; unset fields take their defaults.
        #[arg(long)]
        style: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lists the built-in cells, prints one, or writes all of them to a directory.
    Fixtures {
        name: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ProjArgs {
    #[arg(long, env = "TPT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Perturbation size, defaults to an eighth of the cell's separation.
    #[arg(long)]
    pub jitter: Option<String>,
    #[arg(long, default_value_t = 32)]
    pub max_retries: u32,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[arg(long, env = "TPT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub move_depth: u32,
    #[arg(long, default_value_t = 50_000)]
    pub max_states: usize,
    /// Seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            move_depth: self.move_depth,
            max_states: self.max_states,
            seed: self.seed,
            time_budget: self.time_budget,
            ..SearchConfig::default()
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::MalformedDiagram(_) | Error::InvalidCell(_) | Error::InvalidHnf(_) | Error::LayoutMissing => {
            EXIT_PARSE
        }
        Error::NotRegular(_) | Error::PerturbationFailed(_) => EXIT_REGULARITY,
        Error::BudgetExhausted => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::parse(0, 0, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Writes to `path` if given, otherwise to `out`.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => out.write_all(text.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

pub fn load_cell(arg: &str) -> Result<UnitCell> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(f) = FixtureId::parse(arg) {
            return Ok(f.cell());
        }
    }
    json::cell_from_json(&read(path)?)
}

fn parse_axis(s: &str) -> Result<Axis> {
    Axis::parse(s).ok_or_else(|| Error::parse(1, 1, format!("unknown axis {s:?}")))
}

fn parse_orient(s: &str) -> Result<Orient> {
    Orient::parse(s).ok_or_else(|| Error::parse(1, 1, format!("unknown orientation {s:?}")))
}

fn proj_spec(p: &ProjArgs, axis: Axis, orient: Orient) -> Result<ProjectionSpec> {
    let mut spec = ProjectionSpec::new(axis, orient).with_seed(p.seed);
    spec.max_retries = p.max_retries;
    if let Some(j) = &p.jitter {
        let j = parse_q(j).ok_or_else(|| Error::parse(1, 1, format!("bad jitter {j:?}")))?;
        spec.jitter_magnitude = Some(j);
    }
    Ok(spec)
}

fn parse_vector(text: &str) -> Result<Q3> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::parse(1, 1, "expected three comma-separated rationals"));
    }
    let mut col = 1;
    let mut v = Vec::new();
    for p in parts {
        v.push(parse_q(p).ok_or_else(|| Error::parse(1, col, format!("bad rational {p:?}")))?);
        col += p.len() + 1;
    }
    Ok([v[0].clone(), v[1].clone(), v[2].clone()])
}

fn parse_divisors(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::parse(1, 1, format!("bad quotient order {s:?}"))))
        .collect()
}

#[derive(Serialize)]
struct DecomposeDoc {
    matrix: String,
    word: String,
    length: usize,
}

fn summary_table(t: &Tridiagram) -> String {
    let mut s = String::from("view   axis  crossings  n-points  code\n");
    for (i, d) in t.diagrams.iter().enumerate() {
        s.push_str(&format!(
            "{:<6} {:<5} {:<10} {:<9} {}\n",
            TRIDIAGRAM_VIEWS[i].0,
            format!("{}{}", d.axis.name(), d.orient.symbol()),
            d.crossing_count(),
            d.n_count(),
            canonical_code(d)
        ));
    }
    s
}

fn result_table(r: &TripletResult) -> String {
    let mut s = format!(
        "status    {}\ntriplet   ({},{},{})\nscore     {}\nexhausted {}\n",
        r.status(),
        r.triplet[0],
        r.triplet[1],
        r.triplet[2],
        r.score,
        r.budget_exhausted
    );
    s.push_str(&summary_table(&r.witness));
    s
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Hnf { matrix } => {
            let hd = hnf(&IntMatrix3::parse(&matrix)?)?;
            emit(out, None, &json::hermite_to_json(&hd))?;
        }
        Command::Decompose { matrix } => {
            let m = IntMatrix3::parse(&matrix)?;
            let w = decompose_sl3(&m)?;
            debug_assert_eq!(recompose(&w), m);
            let doc = DecomposeDoc { matrix: m.to_text(), word: w.to_text(), length: w.len() };
            emit(out, None, &to_pretty(&doc))?;
        }
        Command::Project { cell, proj, axis, orient, out: path } => {
            let cell = load_cell(&cell)?;
            let spec = proj_spec(&proj, parse_axis(&axis)?, parse_orient(&orient)?)?;
            let d = project(&make_regular(&cell, &spec)?, &spec)?;
            emit(out, path.as_deref(), &json::diagram_to_json(&d))?;
        }
        Command::Tridiagram { cell, proj, out_dir } => {
            let cell = load_cell(&cell)?;
            let t = tridiagram(&cell, &proj_spec(&proj, Axis::Z, Orient::Plus)?)?;
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
                for (i, d) in t.diagrams.iter().enumerate() {
                    write_file(&dir.join(format!("{}.json", TRIDIAGRAM_VIEWS[i].0)), &json::diagram_to_json(d))?;
                }
                write_file(&dir.join("tridiagram.json"), &json::tridiagram_to_json(&t))?;
            }
            emit(out, None, &summary_table(&t))?;
        }
        Command::Simplify { diagram, search, out: path } => {
            let d: TorusDiagram = json::diagram_from_json(&read(&diagram)?)?;
            let s = search::simplify_diagram(&d, &search.config())?;
            emit(out, path.as_deref(), &json::diagram_to_json(&s.diagram))?;
            let _ = writeln!(
                err,
                "crossings {} -> {}, {} moves{}",
                d.crossing_count(),
                s.diagram.crossing_count(),
                s.moves.len(),
                if s.budget_exhausted { ", budget exhausted" } else { "" }
            );
            if s.budget_exhausted {
                return Ok(EXIT_BUDGET);
            }
        }
        Command::CrossingNumber { cell, search, twist_depth, quotients, timing, out: path } => {
            let cell = load_cell(&cell)?;
            let cfg = SearchConfig {
                twist_word_length: twist_depth,
                quotient_divisors: parse_divisors(&quotients)?,
                ..search.config()
            };
            let start = Instant::now();
            let r = search::tp_crossing_number(&cell, &cfg)?;
            let secs = timing.then(|| start.elapsed().as_secs_f64());
            let text = json::result_to_json(&r, secs);
            match path {
                Some(p) => {
                    write_file(&p, &text)?;
                    emit(out, None, &result_table(&r))?;
                }
                None => {
                    emit(out, None, &text)?;
                    let _ = err.write_all(result_table(&r).as_bytes());
                }
            }
            if r.budget_exhausted {
                return Ok(EXIT_BUDGET);
            }
        }
        Command::Twist { cell, word, out: path } => {
            let cell = load_cell(&cell)?;
            let m = recompose(&ShearWord::parse(&word)?);
            emit(out, path.as_deref(), &json::cell_to_json(&apply_twist(&cell, &m)?.normalized()))?;
        }
        Command::Cover { cell, matrix, out: path } => {
            let cell = load_cell(&cell)?;
            let hd = covering_data_int(&IntMatrix3::parse(&matrix)?)?;
            emit(out, path.as_deref(), &json::cell_to_json(&cover(&cell, &hd).normalized()))?;
        }
        Command::Quotient { cell, t, n, out: path } => {
            let cell = load_cell(&cell)?;
            let c = quotient(&cell, &parse_vector(&t)?, n)?;
            emit(out, path.as_deref(), &json::cell_to_json(&c.normalized()))?;
        }
        Command::Render { file, style, out: path } => {
            let style = match style {
                Some(p) => from_str::<RenderStyle>(&read(&p)?)?,
                None => RenderStyle::default(),
            };
            let text = read(&file)?;
            let value: serde_json::Value = from_str(&text)?;
            let svg = if value.get("views").is_some() {
                render_tridiagram(&json::tridiagram_from_json(&text)?, &style)?
            } else {
                render_diagram(&json::diagram_from_json(&text)?, &style)?
            };
            emit(out, path.as_deref(), &svg)?;
        }
        Command::Fixtures { name, out_dir } => match (name, out_dir) {
            (Some(n), _) => {
                let f = FixtureId::parse(&n).ok_or_else(|| Error::parse(1, 1, format!("unknown fixture {n:?}")))?;
                emit(out, None, &json::cell_to_json(&f.cell()))?;
            }
            (None, Some(dir)) => {
                std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
                for f in FixtureId::ALL {
                    write_file(&dir.join(format!("{}.json", f.name())), &json::cell_to_json(&f.cell()))?;
                }
            }
            (None, None) => {
                let names: Vec<&str> = FixtureId::ALL.iter().map(|f| f.name()).collect();
                emit(out, None, &(names.join("\n") + "\n"))?;
            }
        },
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let cli = Cli::try_parse_from(std::iter::once("tpt").chain(args.iter().copied())).unwrap();
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(cli, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn hnf_of_identity() {
        let (code, out, _) = run_args(&["hnf", "1,0,0;0,1,0;0,0,1"]);
        assert_eq!(code, 0);
        let doc: json::HermiteDoc = from_str(&out).unwrap();
        assert_eq!(doc.h, "1,0,0;0,1,0;0,0,1");
        assert_eq!(doc.sheets, "1");
    }

    #[test]
    fn hnf_of_double() {
        let (_, out, _) = run_args(&["hnf", "2,0,0;0,1,0;0,0,1"]);
        let doc: json::HermiteDoc = from_str(&out).unwrap();
        assert_eq!(doc.sheets, "2");
    }

    #[test]
    fn leading_minus_is_a_matrix_not_a_flag() {
        let (code, out, _) = run_args(&["decompose", "-1,0,0;0,-1,0;0,0,1"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn malformed_matrix_is_a_parse_error() {
        let (code, _, err) = run_args(&["hnf", "1,0;0,x"]);
        assert_eq!(code, EXIT_PARSE);
        assert!(err.contains("column"), "{err}");
    }

    #[test]
    fn decompose_round_trips() {
        let (code, out, _) = run_args(&["decompose", "1,2,0;0,1,0;3,6,1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = from_str(&out).unwrap();
        let w = ShearWord::parse(v["word"].as_str().unwrap()).unwrap();
        assert_eq!(recompose(&w).to_text(), "1,2,0;0,1,0;3,6,1");
    }

    #[test]
    fn project_fixtures() {
        let (_, out, _) = run_args(&["project", "z_line", "--axis", "z"]);
        let d = json::diagram_from_json(&out).unwrap();
        assert_eq!((d.crossing_count(), d.n_count()), (0, 1));
        let (_, out, _) = run_args(&["project", "layer_packing", "--axis", "z"]);
        assert_eq!(json::diagram_from_json(&out).unwrap().crossing_count(), 1);
        let (_, out, _) = run_args(&["project", "pi_plus", "--axis", "x", "--orient", "-"]);
        assert_eq!(json::diagram_from_json(&out).unwrap().crossing_count(), 4);
    }

    #[test]
    fn tridiagram_summaries() {
        let (_, out, _) = run_args(&["tridiagram", "z_line"]);
        assert!(out.lines().skip(1).all(|l| l.split_whitespace().nth(2) == Some("0")), "{out}");
        let (_, out, _) = run_args(&["tridiagram", "layer_packing_twisted"]);
        let mut counts: Vec<&str> = out.lines().skip(1).map(|l| l.split_whitespace().nth(2).unwrap()).collect();
        counts.sort();
        assert_eq!(counts, ["0", "1", "1"]);
    }

    #[test]
    fn twist_and_back_is_identical() {
        let (_, a, _) = run_args(&["fixtures", "pi_plus"]);
        let (_, b, _) = run_args(&["twist", "pi_plus", "--word", "1"]);
        let dir = std::env::temp_dir().join(format!("tpt-twist-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("t.json");
        std::fs::write(&p, b).unwrap();
        let (_, c, _) = run_args(&["twist", p.to_str().unwrap(), "--word", "-1"]);
        assert_eq!(c, json::cell_to_json(&json::cell_from_json(&a).unwrap().normalized()));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn cover_of_z_line_has_two_rods() {
        let (code, out, _) = run_args(&["cover", "z_line", "--matrix", "2,0,0;0,1,0;0,0,1"]);
        assert_eq!(code, 0);
        let c = json::cell_from_json(&out).unwrap();
        assert_eq!(c.homologies(), vec![[0, 0, 1], [0, 0, 1]]);
    }

    #[test]
    fn quotient_of_asymmetric_cell_fails() {
        let (code, _, err) = run_args(&["quotient", "z_line", "--t", "1/2,0,0", "--n", "2"]);
        assert_eq!(code, EXIT_FAILURE);
        assert!(err.contains("symmetric"));
    }

    #[test]
    fn fixtures_are_listed() {
        let (_, out, _) = run_args(&["fixtures"]);
        assert_eq!(out.lines().count(), FixtureId::ALL.len());
    }
}
