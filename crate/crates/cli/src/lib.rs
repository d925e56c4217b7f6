//! Command-line front end. Every subcommand is a thin adapter over
//! `wreath_core`; [`run`] is the whole program minus process setup.
//!
//! Exit codes: 0 success, 1 validation failure (the report is still printed),
//! 2 usage error, 3 size cap exceeded, 4 numerical degeneracy.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wreath_core::autgroup::{
    color_aut_group, full_aut_group, full_aut_group_threaded, is_schurian,
};
use wreath_core::cayley::{
    cayley_scheme, is_schurian_sring, sring_direct, sring_wreath, thin_scheme, validate_sring,
    GroupTable, SringDescriptor,
};
use wreath_core::io::{
    adjacency_text, parse_relation_matrix, parse_scheme, parse_sring, parse_tower, scheme_to_json,
};
use wreath_core::products::SizeCap;
use wreath_core::spectral::{decompose, is_p_polynomial, is_q_polynomial, DEFAULT_TOL};
use wreath_core::tower::{LimitLabel, Tower};
use wreath_core::{validate, Error, Scheme};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "wreath",
    version,
    about = "Association schemes, wreath products, S-rings and wreath towers"
)]
struct Cli {
    /// Print reports as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Refuse to build schemes with more points than this.
    #[arg(long, global = true, default_value_t = wreath_core::products::DEFAULT_MAX_POINTS)]
    max_points: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a scheme from a named construction.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Combine schemes.
    #[command(subcommand)]
    Product(ProductCmd),
    /// Valencies, intersection numbers, spectra and polynomiality.
    Analyze(AnalyzeArgs),
    /// Automorphism group and the Schurian property.
    Aut(AutArgs),
    /// S-rings over finite groups.
    #[command(subcommand)]
    Sring(SringCmd),
    /// Finite truncations of wreath towers.
    Tower(TowerArgs),
    /// Check the scheme axioms and report every violation.
    Verify { input: PathBuf },
    /// Re-emit a scheme in another format.
    Export {
        input: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
    },
}

#[derive(Subcommand, Debug)]
enum BuildCmd {
    /// The kernel scheme on words of length n over an alphabet of size v.
    Kernel {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        v: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The rank-two scheme H(1, v).
    ClassOne {
        #[arg(long)]
        v: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The Cayley scheme of an S-ring document.
    Cayley {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ProductCmd {
    /// Wreath product; points are pairs (a, b) encoded a * |b| + b.
    Wreath {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Direct product; labels are pairs of labels.
    Direct {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Iterated wreath product of a scheme with itself.
    Power {
        a: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    input: PathBuf,
    /// Valency of each relation.
    #[arg(long)]
    valencies: bool,
    /// Intersection numbers p_ij^k.
    #[arg(long)]
    intersection: bool,
    /// First eigenmatrix P.
    #[arg(long)]
    eigenmatrix: bool,
    /// Primitive idempotents E_j.
    #[arg(long)]
    idempotents: bool,
    /// Test for a P-polynomial ordering.
    #[arg(long)]
    ppoly: bool,
    /// Test for a Q-polynomial ordering.
    #[arg(long)]
    qpoly: bool,
    /// Tolerance of the floating-point fallback.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct AutArgs {
    input: PathBuf,
    /// Allow automorphisms that permute relation labels.
    #[arg(long)]
    full: bool,
    /// Print only the group order.
    #[arg(long)]
    order_only: bool,
    /// Decide whether the scheme is Schurian.
    #[arg(long)]
    schurian: bool,
    /// Worker threads for the label-permutation search (implies --full).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum SringCmd {
    /// Check the three S-ring conditions.
    Validate {
        input: PathBuf,
    },
    /// Decide whether the Cayley scheme is Schurian.
    Schurian {
        input: PathBuf,
    },
    /// Wreath product of S-rings over the direct product of the groups.
    Wreath {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Direct product of S-rings.
    Direct {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a non-Schurian fixture: a valid S-ring whose Cayley scheme, and
    /// its wreath products with thin Z2 in both orders, are not Schurian.
    Fixture {
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
struct TowerArgs {
    #[arg(value_enum)]
    action: TowerAction,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    depth: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TowerAction {
    /// Materialize every truncation up to the depth and list their sizes.
    Build,
    /// Emit the truncation at the depth.
    Truncate,
    /// Check the step morphisms form a projective system up to the depth.
    Verify,
    /// Relation and idempotent labels of the limit seen at the depth.
    Labels,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExportFormat {
    Json,
    MatrixText,
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::Malformed(_)
                | Error::Schema { .. }
                | Error::Axioms(_)
                | Error::Sring(_)
                | Error::LengthMismatch { .. } => EXIT_INVALID,
                Error::ResourceCap { .. } => EXIT_CAP,
                Error::NumericalDegeneracy(_) => EXIT_NUMERIC,
                Error::Unsupported(_) | Error::InvalidArgument(_) => EXIT_USAGE,
            },
            CliError::Io(..) | CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

/// What a subcommand produced: a text and a JSON rendering of the same report.
struct Outcome {
    text: String,
    json: Value,
    code: i32,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome {
            text,
            json,
            code: EXIT_OK,
        }
    }
}

type CliResult = std::result::Result<Outcome, CliError>;

/// Runs the program on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let ctx = Ctx {
        cap: SizeCap(cli.max_points),
    };
    match dispatch(&ctx, cli.command) {
        Ok(o) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&o.json).expect("reports serialize") + "\n"
            } else {
                o.text
            };
            let _ = out.write_all(body.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Core(Error::Axioms(report)) = &e {
                for v in &report.violations {
                    let _ = writeln!(err, "  {v}");
                }
            }
            e.code()
        }
    }
}

struct Ctx {
    cap: SizeCap,
}

fn read(path: &Path) -> std::result::Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_scheme(path: &Path) -> std::result::Result<Scheme, CliError> {
    Ok(parse_scheme(&read(path)?)?)
}

fn load_sring(
    path: &Path,
) -> std::result::Result<(GroupTable, wreath_core::cayley::ClassPartition), CliError> {
    Ok(parse_sring(&read(path)?)?.build()?)
}

fn load_tower(path: &Path, ctx: &Ctx) -> std::result::Result<Tower, CliError> {
    Ok(parse_tower(&read(path)?)?.with_cap(ctx.cap))
}

/// Writes `doc` to `output`, or returns it as the report when there is none.
fn emit_document(doc: String, output: Option<&Path>, summary: Value) -> CliResult {
    match output {
        None => {
            let json: Value = serde_json::from_str(&doc).expect("documents are JSON");
            Ok(Outcome::ok(doc + "\n", json))
        }
        Some(p) => {
            std::fs::write(p, doc + "\n").map_err(|e| CliError::Io(p.to_path_buf(), e))?;
            let mut json = summary;
            json["written"] = json!(p.display().to_string());
            let text = format!("wrote {} ({})\n", p.display(), summary_text(&json));
            Ok(Outcome::ok(text, json))
        }
    }
}

fn summary_text(v: &Value) -> String {
    let fields: Vec<String> = v
        .as_object()
        .into_iter()
        .flatten()
        .filter(|(k, _)| *k != "written")
        .map(|(k, v)| format!("{k}: {v}"))
        .collect();
    fields.join(", ")
}

fn emit_scheme(s: &Scheme, output: Option<&Path>) -> CliResult {
    emit_document(
        scheme_to_json(s),
        output,
        json!({"size": s.size(), "num_relations": s.num_relations()}),
    )
}

fn emit_sring(
    g: &GroupTable,
    p: &wreath_core::cayley::ClassPartition,
    output: Option<&Path>,
) -> CliResult {
    let doc =
        serde_json::to_string(&SringDescriptor::from_parts(g, p)).expect("descriptors serialize");
    emit_document(doc, output, json!({"order": g.order(), "classes": p.len()}))
}

fn dispatch(ctx: &Ctx, cmd: Command) -> CliResult {
    match cmd {
        Command::Build(b) => build(ctx, b),
        Command::Product(p) => product(ctx, p),
        Command::Analyze(a) => analyze(a),
        Command::Aut(a) => aut(a),
        Command::Sring(s) => sring(s),
        Command::Tower(t) => tower(ctx, t),
        Command::Verify { input } => verify(&input),
        Command::Export { input, format } => {
            let s = load_scheme(&input)?;
            match format {
                ExportFormat::Json => emit_scheme(&s, None),
                ExportFormat::MatrixText => {
                    let text = adjacency_text(&s);
                    Ok(Outcome::ok(text.clone(), json!(text)))
                }
            }
        }
    }
}

fn build(ctx: &Ctx, cmd: BuildCmd) -> CliResult {
    match cmd {
        BuildCmd::Kernel { n, v, output } => {
            emit_scheme(&ctx.cap.kernel_scheme(n, v)?, output.as_deref())
        }
        BuildCmd::ClassOne { v, output } => {
            ctx.cap.check(v as u128)?;
            emit_scheme(&wreath_core::products::class_one(v)?, output.as_deref())
        }
        BuildCmd::Cayley { input, output } => {
            let (g, p) = load_sring(&input)?;
            ctx.cap.check(g.order() as u128)?;
            emit_scheme(&cayley_scheme(&g, &p)?, output.as_deref())
        }
    }
}

fn product(ctx: &Ctx, cmd: ProductCmd) -> CliResult {
    match cmd {
        ProductCmd::Wreath { a, b, output } => {
            let s = ctx
                .cap
                .wreath_product(&load_scheme(&a)?, &load_scheme(&b)?)?;
            emit_scheme(&s, output.as_deref())
        }
        ProductCmd::Direct { a, b, output } => {
            let s = ctx
                .cap
                .direct_product(&load_scheme(&a)?, &load_scheme(&b)?)?;
            emit_scheme(&s, output.as_deref())
        }
        ProductCmd::Power { a, n, output } => {
            let s = ctx.cap.wreath_power(&load_scheme(&a)?, n)?;
            emit_scheme(&s, output.as_deref())
        }
    }
}

fn render_entry(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(parts) if parts.len() == 2 => {
            let (re, im) = (
                parts[0].as_f64().unwrap_or(0.0),
                parts[1].as_f64().unwrap_or(0.0),
            );
            format!("{re}{im:+}i")
        }
        other => other.to_string(),
    }
}

fn render_rows(rows: &[Vec<Value>], indent: &str) -> String {
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(render_entry).collect();
            format!("{indent}[{}]\n", cells.join(", "))
        })
        .collect()
}

fn analyze(a: AnalyzeArgs) -> CliResult {
    let s = load_scheme(&a.input)?;
    let mut text = format!(
        "size: {}\nnum_relations: {}\ncommutative: {}\nsymmetric: {}\n",
        s.size(),
        s.num_relations(),
        s.is_commutative(),
        s.is_symmetric()
    );
    let mut report = json!({
        "size": s.size(),
        "num_relations": s.num_relations(),
        "commutative": s.is_commutative(),
        "symmetric": s.is_symmetric(),
    });
    if a.valencies {
        text += &format!("valencies: {:?}\n", s.valencies());
        report["valencies"] = json!(s.valencies());
    }
    if a.intersection {
        let p = s.intersection_numbers().to_dense();
        text += "intersection numbers p[i][j][k] (block k):\n";
        for k in 0..s.num_relations() {
            text += &format!("  k = {k}\n");
            for row in &p {
                let cells: Vec<String> = row.iter().map(|col| col[k].to_string()).collect();
                text += &format!("    [{}]\n", cells.join(", "));
            }
        }
        report["intersection"] = json!(p);
    }
    if a.eigenmatrix || a.idempotents {
        let spectrum = decompose(&s, a.tol)?;
        let export = spectrum.export(a.idempotents);
        text += &format!(
            "eigenmatrix ({}; rows are relations, columns are idempotents, j0 is column {}):\n",
            if export.exact { "exact" } else { "numeric" },
            export.j0_index
        );
        text += &render_rows(&export.eigenmatrix, "  ");
        text += &format!("multiplicities: {:?}\n", export.multiplicities);
        if let Some(ids) = &export.idempotents {
            for (j, e) in ids.iter().enumerate() {
                text += &format!("idempotent {j}:\n");
                text += &render_rows(e, "  ");
            }
        }
        report["spectrum"] = serde_json::to_value(&export).expect("exports serialize");
    }
    if a.ppoly {
        let p = is_p_polynomial(&s);
        text += &format!("p-polynomial: {p}\n");
        report["p_polynomial"] = json!(p);
    }
    if a.qpoly {
        let q = is_q_polynomial(&s)?;
        text += &format!("q-polynomial: {q}\n");
        report["q_polynomial"] = json!(q);
    }
    Ok(Outcome::ok(text, report))
}

fn aut(a: AutArgs) -> CliResult {
    let s = load_scheme(&a.input)?;
    let (kind, group) = match a.threads {
        Some(0) => return Err(CliError::Usage("--threads must be positive".into())),
        Some(t) => ("full", full_aut_group_threaded(&s, t)),
        None if a.full => ("full", full_aut_group(&s)),
        None => ("color", color_aut_group(&s)),
    };
    let mut text = format!("group: {kind}\norder: {}\n", group.order_string());
    let mut report = json!({"group": kind, "order": group.order_string()});
    if !a.order_only {
        text += "generators:\n";
        for g in group.generators() {
            text += &format!("  f = {:?}, sigma = {:?}\n", g.f, g.sigma);
        }
        report["generators"] =
            serde_json::to_value(group.generators()).expect("generators serialize");
    }
    if a.schurian {
        let sch = is_schurian(&s);
        text += &format!("schurian: {sch}\n");
        report["schurian"] = json!(sch);
    }
    Ok(Outcome::ok(text, report))
}

fn sring(cmd: SringCmd) -> CliResult {
    match cmd {
        SringCmd::Validate { input } => {
            let (g, p) = load_sring(&input)?;
            let report = validate_sring(&g, &p)?;
            let ok = report.ok();
            Ok(Outcome {
                text: format!("s-ring: {ok}\n{report}\n"),
                json: json!({"ok": ok, "report": report}),
                code: if ok { EXIT_OK } else { EXIT_INVALID },
            })
        }
        SringCmd::Schurian { input } => {
            let (g, p) = load_sring(&input)?;
            let sch = is_schurian_sring(&g, &p)?;
            Ok(Outcome::ok(
                format!("schurian: {sch}\n"),
                json!({"schurian": sch}),
            ))
        }
        SringCmd::Wreath { a, b, output } => {
            let ((g1, p1), (g2, p2)) = (load_sring(&a)?, load_sring(&b)?);
            let (g, p) = sring_wreath(&g1, &p1, &g2, &p2)?;
            emit_sring(&g, &p, output.as_deref())
        }
        SringCmd::Direct { a, b, output } => {
            let ((g1, p1), (g2, p2)) = (load_sring(&a)?, load_sring(&b)?);
            let (g, p) = sring_direct(&g1, &p1, &g2, &p2)?;
            emit_sring(&g, &p, output.as_deref())
        }
        SringCmd::Fixture { input } => fixture(&input),
    }
}

fn fixture(input: &Path) -> CliResult {
    let (g, p) = load_sring(input)?;
    let report = validate_sring(&g, &p)?;
    if !report.ok() {
        return Ok(Outcome {
            text: format!("s-ring: false\n{report}\n"),
            json: json!({"ok": false, "report": report}),
            code: EXIT_INVALID,
        });
    }
    let x = cayley_scheme(&g, &p)?;
    let z2 = thin_scheme(&GroupTable::cyclic(2)?);
    let schurian = is_schurian(&x);
    let front = is_schurian(&wreath_core::products::wreath_product(&x, &z2)?);
    let rear = is_schurian(&wreath_core::products::wreath_product(&z2, &x)?);
    let ok = !schurian && !front && !rear;
    Ok(Outcome {
        text: format!(
            "s-ring: true\nschurian: {schurian}\nwreath with thin Z2 schurian: {front}\nthin Z2 wreath schurian: {rear}\nfixture: {}\n",
            if ok { "ok" } else { "rejected" }
        ),
        json: json!({
            "ok": ok,
            "schurian": schurian,
            "wreath_with_thin_z2_schurian": front,
            "thin_z2_wreath_schurian": rear,
        }),
        code: if ok { EXIT_OK } else { EXIT_INVALID },
    })
}

fn labels_text(labels: &[LimitLabel]) -> String {
    labels
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn tower(ctx: &Ctx, t: TowerArgs) -> CliResult {
    let tw = load_tower(&t.input, ctx)?;
    match t.action {
        TowerAction::Build => {
            let mut text = String::new();
            let mut levels = Vec::new();
            for n in 1..=t.depth {
                let s = tw.truncation(n)?;
                text += &format!(
                    "depth {n}: {} points, {} relations\n",
                    s.size(),
                    s.num_relations()
                );
                levels.push(
                    json!({"depth": n, "size": s.size(), "num_relations": s.num_relations()}),
                );
            }
            Ok(Outcome::ok(text, json!({"levels": levels})))
        }
        TowerAction::Truncate => emit_scheme(&*tw.truncation(t.depth)?, t.output.as_deref()),
        TowerAction::Verify => {
            let check = tw.verify_projective_system(t.depth)?;
            let text = match &check.failure {
                None => format!("projective system: true (depth {})\n", t.depth),
                Some(f) => format!("projective system: false\nwitness: {f}\n"),
            };
            Ok(Outcome {
                text,
                json: serde_json::to_value(&check).expect("checks serialize"),
                code: if check.ok { EXIT_OK } else { EXIT_INVALID },
            })
        }
        TowerAction::Labels => {
            let labels = tw.limit_labels(t.depth)?;
            let mut text = format!(
                "I ({}): {}\n",
                labels.i_labels.len(),
                labels_text(&labels.i_labels)
            );
            match &labels.j_labels {
                Some(j) => text += &format!("J ({}): {}\n", j.len(), labels_text(j)),
                None => text += "J: unavailable (non-commutative factor)\n",
            }
            Ok(Outcome::ok(
                text,
                serde_json::to_value(&labels).expect("labels serialize"),
            ))
        }
    }
}

fn verify(input: &Path) -> CliResult {
    let (m, _) = parse_relation_matrix(&read(input)?)?;
    let report = validate(&m);
    let mut text = format!("valid: {}\n", report.ok);
    for v in &report.violations {
        text += &format!("  {v}\n");
    }
    Ok(Outcome {
        text,
        json: serde_json::to_value(&report).expect("reports serialize"),
        code: if report.ok { EXIT_OK } else { EXIT_INVALID },
    })
}
