//! Batch front end: build standard objects, run verification suites, print reports.
//!
//! Exit codes: 0 success, 1 a check failed (or a computation could not be
//! carried out), 2 malformed input, 3 an inconclusive check under `--strict`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use catidem::complex::{homology, Complex};
use catidem::group::{group_algebra, trivial_module, GroupAlgebra, GroupSpec};
use catidem::hom::{graded_hom, ring_table, RingTable};
use catidem::idempotent::{minimal_resolution, resolution_pair, tate_cohomology_ring, unit_complex};
use catidem::json::{self, ComplexJson, GroupRef, ModuleRef, PosetJson, TwistedJson};
use catidem::postnikov::{convolve, verify_linear_decomposition, verify_poset_decomposition, verify_square_decomposition, PosetDecomposition};
use catidem::report::{digest_complex, Check, Verdict, VerificationReport};
use catidem::verify::verify_pair;
use catidem::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "catidem", version, about = "Idempotent triangles, Tate objects and decompositions of the unit over F_p[G]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Seed for randomized searches.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Exit with 3 when a check is inconclusive.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal projective resolution of a module (κ by default).
    Resolve {
        #[arg(long = "char")]
        p: u32,
        #[arg(long)]
        group: String,
        /// Module file `{"dim": d, "action": {"g0": [[...]], ...}}`.
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long)]
        max_deg: usize,
    },
    /// Homology dimensions of a complex file on a window.
    Homology {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Graded hom dimensions between two complex files.
    Hom {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        /// Also print the ring table of end(source) (requires source = target).
        #[arg(long)]
        ring: bool,
        #[arg(long, default_value_t = 4)]
        padding: usize,
    },
    /// Verification suite for the resolution pair `(P, A)` of κ.
    VerifyPair {
        #[arg(long = "char")]
        p: u32,
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        #[arg(long, default_value_t = 4)]
        budget: usize,
    },
    /// Tate object of the resolution pair and its dual, with the dimension table.
    Tate {
        #[arg(long = "char")]
        p: u32,
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        #[arg(long)]
        ring: bool,
        #[arg(long, default_value_t = 4)]
        padding: usize,
    },
    /// Total complex of a twisted complex file.
    Convolve {
        #[arg(long)]
        twisted: PathBuf,
        /// Also run the decomposition-of-unit checks.
        #[arg(long)]
        check_one: bool,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-6:6")]
        window: (i64, i64),
        #[arg(long, default_value_t = 4)]
        budget: usize,
    },
    /// Checks for a decomposition of the unit indexed by a poset.
    DecomposeCheck {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        #[arg(long, default_value_t = 4)]
        budget: usize,
    },
}

/// Parse `a:b` with `a <= b`.
pub fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("window `{s}` is not of the form a:b"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad window start `{a}`"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad window end `{b}`"))?;
    if a > b {
        return Err(format!("empty window {a}:{b}"));
    }
    Ok((a, b))
}

/// Decomposition file: a poset plus either a twisted complex or a standard construction.
#[derive(serde::Deserialize, Debug)]
struct DecompositionFile {
    #[serde(flatten)]
    poset: PosetJson,
    #[serde(default)]
    twisted: Option<TwistedJson>,
    /// `"pair"` or `"square"`, built from the resolution pair over `group`.
    #[serde(default)]
    standard: Option<String>,
    #[serde(rename = "char", default)]
    p: Option<u32>,
    #[serde(default)]
    group: Option<GroupRef>,
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse(_)
            | Error::Shape(_)
            | Error::SquareNonzero { .. }
            | Error::InvalidComplex(_)
            | Error::InvalidModule(_)
            | Error::InvalidGroup(_)
            | Error::NonPrimeModulus(_)
            | Error::NotIntertwining
            | Error::NotChainMap { .. }
            | Error::AlgebraMismatch
            | Error::FieldMismatch => Failure::Input(e.to_string()),
            e => Failure::Compute(e.to_string()),
        }
    }
}

/// What a subcommand produced: a JSON body, its text rendering and the verdicts it carries.
struct Output {
    json: Value,
    text: String,
    verdicts: Vec<Verdict>,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn algebra(p: u32, group: &str) -> Result<Arc<GroupAlgebra>, Failure> {
    Ok(group_algebra(p, GroupSpec::parse(group)?)?)
}

fn read_complex(path: &Path) -> Result<Complex, Failure> {
    let j: ComplexJson = json::from_str(&read(path)?)?;
    Ok(json::complex_from_json(&j)?)
}

fn report_output(r: VerificationReport) -> Output {
    let mut json: Value = serde_json::from_str(&r.to_json()).expect("report is json");
    json["overall"] = serde_json::to_value(r.overall()).expect("verdict is json");
    Output { text: r.to_text(), verdicts: r.checks.iter().map(|c| c.verdict.clone()).collect(), json }
}

fn text_lines(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

fn resolve(p: u32, group: &str, module: Option<&Path>, max_deg: usize) -> Result<Output, Failure> {
    let alg = algebra(p, group)?;
    let m = match module {
        Some(path) => {
            let j: ModuleRef = json::from_str(&read(path)?)?;
            json::module_from_json(&alg, &j)?
        }
        None => trivial_module(&alg),
    };
    let r = minimal_resolution(&alg, &m, max_deg)?;
    let cert = r.certificate();
    let x = &r.complex;
    let json = json!({
        "resolution": json::complex_to_json(x),
        "augmentation": json::map_to_json(&r.augmentation),
        "minimal": r.minimal,
        "period": r.period,
        "certificate": cert,
        "digest": digest_complex(x),
    });
    let mut lines = vec![
        ("group".to_string(), alg.group().spec().short_name()),
        ("char".into(), p.to_string()),
        ("minimal".into(), r.minimal.to_string()),
        ("period".into(), r.period.map_or("none".into(), |m| m.to_string())),
        ("seam".into(), r.seam.map_or("none".into(), |m| m.to_string())),
    ];
    for k in (x.lo()..=0).rev() {
        lines.push((format!("rank {k}"), x.dim(k).to_string()));
    }
    lines.push(("digest".into(), digest_complex(x)));
    Ok(Output { json, text: text_lines(&lines), verdicts: vec![] })
}

fn homology_cmd(path: &Path, w: (i64, i64)) -> Result<Output, Failure> {
    let x = read_complex(path)?;
    let h = homology(&x, w.0, w.1);
    let text = h.iter().map(|d| format!("H {}: {}{}\n", d.degree, d.dim, if d.reliable { "" } else { " (unreliable)" })).collect();
    let verdicts = unreliable(h.iter().map(|d| (d.degree, d.reliable)));
    Ok(Output { json: json!({ "window": [w.0, w.1], "homology": h }), text, verdicts })
}

/// Degrees whose value depends on a truncation count as inconclusive.
fn unreliable(degrees: impl Iterator<Item = (i64, bool)>) -> Vec<Verdict> {
    degrees.filter(|d| !d.1).map(|(k, _)| Verdict::inconclusive(format!("degree {k} is next to a truncation"))).collect()
}

fn ring_json(t: &RingTable) -> Value {
    serde_json::from_str(&t.to_json()).expect("ring table is json")
}

fn ring_text(t: &RingTable) -> String {
    let mut s = format!("ring degrees: {:?}\nring unit: {:?}\n", t.degrees, t.unit);
    for (i, j, c) in &t.products {
        s.push_str(&format!("product {i} {j}: {c:?}\n"));
    }
    s
}

fn hom_cmd(src: &Path, tgt: &Path, w: (i64, i64), ring: bool, padding: usize) -> Result<Output, Failure> {
    let x = read_complex(src)?;
    let y = read_complex(tgt)?;
    let gh = graded_hom(&x, &y, w.0, w.1, padding)?;
    let mut json = json!({ "window": [w.0, w.1], "padding": padding, "dims": gh.degrees(), "cut": gh.model().is_cut() });
    let mut text: String = gh
        .degrees()
        .iter()
        .map(|d| format!("hom {}: {}{}\n", d.degree, d.dim, if d.reliable { "" } else { " (unreliable)" }))
        .collect();
    if ring {
        if x != y {
            return Err(Failure::Input("--ring needs the same complex as source and target".into()));
        }
        let t = ring_table(&x, w.0, w.1, padding)?;
        json["ring"] = ring_json(&t);
        text.push_str(&ring_text(&t));
    }
    let verdicts = unreliable(gh.degrees().iter().map(|d| (d.degree, d.reliable)));
    Ok(Output { json, text, verdicts })
}

fn verify_pair_cmd(p: u32, group: &str, w: (i64, i64), budget: usize) -> Result<Output, Failure> {
    let alg = algebra(p, group)?;
    let t = resolution_pair(&alg, 8)?;
    Ok(report_output(verify_pair(&t, w, budget)))
}

/// Some degree-1 class times some degree-(-1) class is a nonzero multiple of the unit.
fn has_invertible_degree_one(t: &RingTable) -> bool {
    let basis = |i: usize| {
        let mut v = vec![0; t.len()];
        v[i] = 1;
        v
    };
    let of = |d: i64| (0..t.len()).filter(move |&i| t.degrees[i] == d);
    of(1).any(|i| {
        of(-1).any(|j| {
            t.mul(&basis(i), &basis(j)).is_some_and(|v| {
                let k = v.iter().position(|&c| c != 0);
                k.is_some_and(|k| {
                    let u = t.unit.get(k).copied().unwrap_or(0);
                    u != 0 && v.iter().zip(&t.unit).all(|(&a, &b)| (a as u64 * u as u64) % t.p as u64 == (b as u64 * v[k] as u64) % t.p as u64)
                })
            })
        })
    })
}

fn tate_cmd(p: u32, group: &str, w: (i64, i64), ring: bool, padding: usize) -> Result<Output, Failure> {
    let alg = algebra(p, group)?;
    let pair = resolution_pair(&alg, 8)?;
    let tr = tate_cohomology_ring(&pair, w.0, w.1, padding)?;
    let mut rep = VerificationReport::new("tate object", w, padding);
    for d in &tr.dims {
        let v = if d.agree() {
            if tr.end_t.is_reliable(d.degree) {
                Verdict::Pass
            } else {
                Verdict::inconclusive("outside the stable range")
            }
        } else {
            Verdict::fail(format!("{:?} {:?} {:?} {:?}", d.end_t, d.unit_to_t, d.t_to_unit, d.u_to_c))
        };
        let dim = d.end_t.map_or("?".into(), |x| x.to_string());
        rep.push(Check::new(format!("dims agree at {}", d.degree), v, "graded hom").note(format!("dim {dim}")));
    }
    if w.0 <= 0 && 0 <= w.1 {
        let v = if tr.unit_is_delta { Verdict::Pass } else { Verdict::fail("unit does not transport to [δ]") };
        rep.push(Check::new("unit = [δ]", v, "transport through θ and ν"));
        let v = if tr.delta_nonzero { Verdict::Pass } else { Verdict::fail("[δ] = 0") };
        rep.push(Check::new("[δ] nonzero", v, "class in hom(U, C[1])"));
    }
    if ring {
        let t = &tr.table;
        let v = if t.check_unit() && t.check_associative() { Verdict::Pass } else { Verdict::fail("ring axioms") };
        rep.push(Check::new("ring unit and associativity", v, "ring table"));
        if w.0 <= -1 && 1 <= w.1 {
            let v = if has_invertible_degree_one(t) { Verdict::Pass } else { Verdict::fail("no invertible degree-1 class") };
            rep.push(Check::new("invertible degree-1 class", v, "ring table"));
        }
    }
    let mut out = report_output(rep);
    out.json["tate"] = serde_json::to_value(json::complex_to_json(&tr.tate.t)).expect("complex is json");
    out.json["tate_digest"] = Value::String(digest_complex(&tr.tate.t));
    out.text.push_str(&format!("tate digest: {}\n", digest_complex(&tr.tate.t)));
    if ring {
        out.json["ring"] = ring_json(&tr.table);
        out.text.push_str(&ring_text(&tr.table));
    }
    Ok(out)
}

fn convolve_cmd(path: &Path, check_one: bool, w: (i64, i64), budget: usize) -> Result<Output, Failure> {
    let j: TwistedJson = json::from_str(&read(path)?)?;
    let tc = json::twisted_from_json(&j)?;
    let tot = convolve(&tc)?;
    let mut out = if check_one {
        report_output(verify_linear_decomposition(&tc, &unit_complex(tc.algebra()), w, budget))
    } else {
        Output { json: json!({}), text: String::new(), verdicts: vec![] }
    };
    out.json["total"] = serde_json::to_value(json::complex_to_json(&tot)).expect("complex is json");
    out.json["total_digest"] = Value::String(digest_complex(&tot));
    let dims: Vec<String> = (tot.lo()..=tot.hi()).map(|k| format!("{k}:{}", tot.dim(k))).collect();
    out.text.push_str(&format!("total dims: {}\ntotal digest: {}\n", dims.join(" "), digest_complex(&tot)));
    Ok(out)
}

fn decompose_cmd(path: &Path, w: (i64, i64), budget: usize) -> Result<Output, Failure> {
    let f: DecompositionFile = json::from_str(&read(path)?)?;
    let poset = json::poset_from_json(&f.poset)?;
    if let Some(kind) = &f.standard {
        let (Some(p), Some(g)) = (f.p, &f.group) else {
            return Err(Failure::Input("a standard decomposition needs `char` and `group`".into()));
        };
        let alg = json::algebra_of(p, g)?;
        let t = resolution_pair(&alg, 8)?;
        let rep = match kind.as_str() {
            "pair" => verify_poset_decomposition(
                &PosetDecomposition::new(poset, catidem::postnikov::pair_decomposition(&t)?, unit_complex(&alg))?,
                w,
                budget,
            ),
            "square" => {
                let spec = GroupSpec::Product(vec![alg.group().spec().clone(), alg.group().spec().clone()]);
                let target = group_algebra(p, spec)?;
                verify_square_decomposition(&t, &t, &target, w, budget)?
            }
            s => return Err(Failure::Input(format!("unknown standard decomposition `{s}` (pair, square)"))),
        };
        return Ok(report_output(rep));
    }
    let tj = f.twisted.as_ref().ok_or_else(|| Failure::Input("need `twisted` or `standard`".into()))?;
    let tc = json::twisted_from_json(tj)?;
    let one = unit_complex(tc.algebra());
    let pd = PosetDecomposition::new(poset, tc, one)?;
    Ok(report_output(verify_poset_decomposition(&pd, w, budget)))
}

fn dispatch(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Resolve { p, group, module, max_deg } => resolve(*p, group, module.as_deref(), *max_deg),
        Command::Homology { complex, window } => homology_cmd(complex, *window),
        Command::Hom { source, target, window, ring, padding } => hom_cmd(source, target, *window, *ring, *padding),
        Command::VerifyPair { p, group, window, budget } => verify_pair_cmd(*p, group, *window, *budget),
        Command::Tate { p, group, window, ring, padding } => tate_cmd(*p, group, *window, *ring, *padding),
        Command::Convolve { twisted, check_one, window, budget } => convolve_cmd(twisted, *check_one, *window, *budget),
        Command::DecomposeCheck { poset, window, budget } => decompose_cmd(poset, *window, *budget),
    }
}

/// Parse arguments (including the program name) and run one command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let s = e.render().to_string();
            return if code == 0 { Outcome { code, stdout: s, stderr: String::new() } } else { Outcome { code, stdout: String::new(), stderr: s } };
        }
    };
    let fmt = cli.common.format;
    match dispatch(&cli.command) {
        Ok(mut out) => {
            let fail = out.verdicts.iter().any(|v| v.is_fail());
            let inconclusive = out.verdicts.iter().any(|v| v.is_inconclusive());
            let code = if fail {
                1
            } else if inconclusive && cli.common.strict {
                3
            } else {
                0
            };
            out.json["seed"] = Value::from(cli.common.seed);
            let stdout = match fmt {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("output is json") + "\n",
                Format::Text => out.text,
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(Failure::Input(m)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: malformed input: {m}\n") },
        Err(Failure::Compute(m)) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {m}\n") },
    }
}
