use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use regaff::construct::{build_with, hegedus_agl32, RegularSubgroupDesc};
use regaff::groupfile::GroupFile;
use regaff::quadform::{HomKind, SubspaceBasis};
use regaff::search::{
    direct_product_note, existence_table, resume, search_regular, Checkpoint, SearchConfig, SearchMode,
    TableConfig, DEFAULT_BUDGET, DEFAULT_MAX_POINTS,
};
use regaff::verify::{full_suite, verify_set};
use regaff::{AffineElem, Error, Field, FieldValue};

/// Stdout writer that exits quietly once the reader has gone (e.g. `| head`).
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

fn out_raw(text: &str) {
    use std::io::Write;
    if std::io::stdout().write_all(text.as_bytes()).is_err() {
        std::process::exit(0);
    }
}

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "regaff", version, about = "Regular subgroups of affine groups over exact fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a regular subgroup R_W and write it as a group file.
    Construct(ConstructArgs),
    /// Check a group file, or a description given by flags.
    Verify(VerifyArgs),
    /// Exhaustive search for regular subgroups of unitriangular shape.
    Search(SearchArgs),
    /// Existence table over a range of dimensions and fields.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Characteristic of GF(p^ell).
    #[arg(long, conflicts_with = "rational")]
    p: Option<u32>,
    /// Degree of GF(p^ell) over GF(p).
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Work over the rationals.
    #[arg(long)]
    rational: bool,
}

impl FieldArgs {
    fn field(&self) -> Result<Field, Failure> {
        match (self.p, self.rational) {
            (_, true) => Ok(Field::rational()),
            (Some(p), false) => Ok(Field::galois(p, self.ell)?),
            (None, false) => Err(Failure::usage("give --p (with --ell) or --rational")),
        }
    }
}

#[derive(Args, Clone)]
struct DescArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Dimension n of AGL_n(F).
    #[arg(long)]
    n: Option<usize>,
    /// Basis of W as comma-separated field elements.
    #[arg(long = "W", conflicts_with = "w_none")]
    w: Option<String>,
    /// Use W = {0} (the default).
    #[arg(long = "W-none")]
    w_none: bool,
    /// Family: auto, 1, 2, 3, or a family name.
    #[arg(long, default_value = "auto")]
    example: String,
    /// The vector d in F^k, comma-separated.
    #[arg(long)]
    d: Option<String>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    desc: DescArgs,
    /// Write the explicit AGL_3(2) subgroup from two generators instead.
    #[arg(long, conflicts_with_all = ["n", "w", "w_none", "d"])]
    hegedus: bool,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled verification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Group file to check.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    desc: DescArgs,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    field: FieldArgs,
    /// enumerate_all or find_translation_free.
    #[arg(long, default_value = "find_translation_free")]
    mode: String,
    /// Stop after this many nodes.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Where to save the position when the budget runs out.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Continue from a saved position.
    #[arg(long, conflicts_with_all = ["n", "p", "rational"])]
    resume: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Largest number of points q^n accepted.
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: u64,
    /// Print every group found.
    #[arg(long)]
    show_groups: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Field orders, comma-separated; `Q` for the rationals.
    #[arg(long, default_value = "2,3,4,5")]
    fields: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget_nodes: u64,
    #[arg(long, default_value_t = TableConfig::default().max_points)]
    max_points: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A reason to stop with a nonzero exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::BudgetExhausted(_) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::usage(e.to_string())
    }
}

/// `1.0`-style elements, or a bare residue for a prime-field element.
fn parse_value(field: &Field, s: &str) -> Result<FieldValue, Failure> {
    let s = s.trim();
    if let (Some(p), false) = (field.order().map(|_| field.characteristic()), s.contains('.')) {
        if let Ok(c) = s.parse::<u32>() {
            if c < p {
                return Ok(field.from_int(c as i64));
            }
        }
    }
    Ok(field.parse(s)?)
}

fn parse_list(field: &Field, s: &str) -> Result<Vec<FieldValue>, Failure> {
    s.split(',').map(|t| parse_value(field, t)).collect()
}

fn parse_kind(name: &str, field: &Field, n: usize) -> Result<HomKind, Failure> {
    Ok(match name {
        "auto" => HomKind::auto(field, n)?,
        "1" => HomKind::Example1,
        "2" if n == 3 => HomKind::Example2N3Q2,
        "2" => HomKind::Example2Odd,
        "3" => HomKind::Example3,
        other => other.parse()?,
    })
}

fn build_desc(args: &DescArgs) -> Result<RegularSubgroupDesc, Failure> {
    let field = args.field.field()?;
    let n = args.n.ok_or_else(|| Failure::usage("--n is required"))?;
    let kind = parse_kind(&args.example, &field, n)?;
    let w = match &args.w {
        Some(list) if !args.w_none => {
            let vecs = parse_list(&field, list)?.into_iter().map(|x| vec![x]).collect();
            SubspaceBasis::new(&field, 1, vecs)?
        }
        _ => SubspaceBasis::empty(&field, 1),
    };
    let d = args.d.as_deref().map(|s| parse_list(&field, s)).transpose()?;
    Ok(build_with(&field, n, kind, &w, d)?)
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out_raw(text),
    }
    Ok(())
}

/// Summary lines go to stdout when the group itself went to a file.
fn summary(to_stdout: bool, line: String) {
    if to_stdout {
        out!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn cmd_construct(args: ConstructArgs) -> Result<(), Failure> {
    let say = |line: String| summary(args.out.is_some(), line);
    if args.hegedus {
        let (g, h) = hegedus_agl32();
        let field = g.field().clone();
        let file = GroupFile::from_generators(&field, 3, vec![g, h])?;
        let rep = verify_set(&file.elements, &field, 3)?;
        write_output(&args.out, &file.encode())?;
        say(format!("order {}", file.elements.len()));
        say(format!("|R ∩ Tr| {}", rep.translations.len()));
        say(format!("regularity {}", rep.verdict));
        say(format!("verification {}", if rep.passed() { "PASS" } else { "FAIL" }));
        return if rep.passed() { Ok(()) } else { violation("verification failed") };
    }
    let desc = build_desc(&args.desc)?;
    let rep = full_suite(&desc, args.seed)?;
    let file = GroupFile::from_desc(&desc)?;
    write_output(&args.out, &file.encode())?;
    let order = desc.order().map_or("infinite".to_string(), |o| o.to_string());
    let (m, k) = desc.split();
    let kind = desc.hom().kind().map_or("custom".to_string(), |k| k.to_string());
    say(format!("field {}  n {}  (m, k) = ({m}, {k})  family {kind}", desc.field(), desc.dim()));
    say(format!("order {order}"));
    say(format!("|R ∩ Tr| {}", rep.translations.len()));
    say(format!("verification {} ({})", if rep.passed() { "PASS" } else { "FAIL" }, rep.closure));
    if rep.passed() {
        Ok(())
    } else {
        eprintln!("{rep}");
        violation("verification failed")
    }
}

fn violation(msg: &str) -> Result<(), Failure> {
    Err(Failure {
        code: EXIT_VIOLATION,
        msg: msg.into(),
    })
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let Some(path) = &args.input else {
        let desc = build_desc(&args.desc)?;
        let rep = full_suite(&desc, args.seed)?;
        out!("{rep}");
        return if rep.passed() { Ok(()) } else { violation("verification failed") };
    };
    let text = fs::read_to_string(path)?;
    let file = GroupFile::parse(&text)?;
    let mut ok = true;
    if let Some(desc) = &file.desc {
        let rep = full_suite(desc, args.seed)?;
        out!("== description");
        out!("{rep}");
        ok &= rep.passed();
        for (i, g) in file.elements.iter().enumerate() {
            let want = desc.element_at_point(g.vector_part())?;
            if *g != want {
                out!("FAIL listed element {} differs from r at its first row", i + 1);
                ok = false;
                break;
            }
        }
        for g in &file.gens {
            if *g != desc.element_at_point(g.vector_part())? {
                out!("FAIL generator {} is not in the described group", g.matrix().encode());
                ok = false;
                break;
            }
        }
    }
    let elements: Vec<AffineElem> = if !file.elements.is_empty() {
        file.elements.clone()
    } else if file.desc.is_none() {
        regaff::affine::closure(&file.field, file.n, &file.gens, 1 << 20)?
    } else {
        Vec::new()
    };
    if !elements.is_empty() {
        let rep = verify_set(&elements, &file.field, file.n)?;
        out!("== element set");
        out!("order        {}", rep.order);
        out!("regularity   {}", rep.verdict);
        out!("unipotent    {}", if rep.unipotent { "yes" } else { "NO" });
        out!("|R ∩ Tr|     {}", rep.translations.len());
        ok &= rep.passed();
    }
    out!("overall      {}", if ok { "PASS" } else { "FAIL" });
    if ok {
        Ok(())
    } else {
        violation("verification failed")
    }
}

fn cmd_search(args: SearchArgs) -> Result<(), Failure> {
    let mode: SearchMode = args.mode.parse()?;
    let mut cfg = SearchConfig::new(mode).threads(args.threads).max_points(args.max_points);
    if let Some(b) = args.budget_nodes {
        cfg = cfg.budget(b);
    }
    if args.threads > 1 && (args.budget_nodes.is_some() || args.checkpoint.is_some() || args.resume.is_some()) {
        return Err(Failure::usage(
            "--threads > 1 cannot be combined with --budget-nodes, --checkpoint or --resume",
        ));
    }
    let result = match &args.resume {
        Some(path) => {
            let cp = Checkpoint::decode(&fs::read_to_string(path)?)?;
            resume(&cp, &cfg)?
        }
        None => {
            let field = args.field.field()?;
            let n = args.n.ok_or_else(|| Failure::usage("--n is required"))?;
            search_regular(n, &field, &cfg)?
        }
    };
    out!("field            {}", result.field);
    out!("n                {}", result.n);
    out!("mode             {}", result.mode);
    out!("regular found    {}", result.total);
    out!("translation-free {}", result.translation_free);
    out!("nodes            {}", result.nodes);
    out!("time             {:.3}s", result.elapsed.as_secs_f64());
    if args.show_groups {
        for (i, g) in result.group_elements()?.iter().enumerate() {
            out!("group {}", i + 1);
            for e in g {
                out!("  {}", e.matrix().encode());
            }
        }
    }
    match result.checkpoint {
        None => {
            out!("status           complete");
            Ok(())
        }
        Some(cp) => {
            out!("status           budget exhausted");
            if let Some(path) = &args.checkpoint {
                fs::write(path, cp.encode())?;
                out!("checkpoint       {}", path.display());
            }
            Err(Failure {
                code: EXIT_BUDGET,
                msg: format!("node budget exhausted after {} nodes", result.nodes),
            })
        }
    }
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    let fields = args
        .fields
        .split(',')
        .map(|t| match t.trim() {
            "Q" | "q" => Ok(Field::rational()),
            t => {
                let q: u64 = t.parse().map_err(|_| Failure::usage(format!("bad field order `{t}`")))?;
                Ok(Field::of_order(q)?)
            }
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let cfg = TableConfig {
        budget: args.budget_nodes,
        max_points: args.max_points,
        seed: args.seed,
    };
    let rows = existence_table(args.max_n, &fields, &cfg)?;
    out!("{:<3} {:<9} {:<29} provenance", "n", "field", "verdict");
    for r in &rows {
        out!("{:<3} {:<9} {:<29} {}", r.n, r.field, r.verdict.label(), r.provenance);
    }
    out!();
    for r in &rows {
        out!("{}", r.machine());
    }
    if let Some(note) = direct_product_note(&rows) {
        out!();
        out!("{note}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Search(a) => cmd_search(a),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
