//! `cornerdesigns`: command-line front end for verifying, solving and
//! searching weighted spherical designs built from corner-vector orbits.
//!
//! Exit codes: 0 success, 1 negative result, 2 input error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cornerdesigns::corpus::{self, run_entry};
use cornerdesigns::design::{
    classify_7, classify_9, degree_upper_bound_with_source, lemma_bounds, solve_weights, verify_design, verify_design_invariants,
    Classification, Mode, SolveOutcome, VerificationReport, WeightedDesign,
};
use cornerdesigns::harmonics::invariant_harmonic_dims;
use cornerdesigns::hilbert::{design_to_identity, verify_identity, HilbertIdentity};
use cornerdesigns::lattice::{
    bw16_contains, d4_shell, golay_code, leech_contains, leech_min_shell, leech_shell_design_check, shorter_leech_embed, weight_distribution,
    D4Kind,
};
use cornerdesigns::orbits::GcvOrbit;
use cornerdesigns::scalars::{ExactScalar, DEFAULT_PRECISION};
use cornerdesigns::search::{curve_integer_points, refine_design, search_single_orbit_7, tanino_scan, RefineOptions};
use cornerdesigns::simplex::{sphere_to_simplex, verify_simplex_cubature};

const PRECISION_ENV: &str = "CORNERDESIGNS_PRECISION";

#[derive(Parser)]
#[command(name = "cornerdesigns", version, about = "Weighted spherical designs from generalized corner vectors")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Print floats at full precision instead of 6 significant digits.
    #[arg(long, global = true)]
    full: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Clone)]
struct Input {
    /// JSON file (`-` for stdin).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Inline JSON.
    #[arg(long, conflicts_with = "file")]
    json: Option<String>,
    /// A corpus anchor, e.g. eq_schur.
    #[arg(long, conflicts_with_all = ["file", "json"])]
    corpus: Option<String>,
}

#[derive(Args, Clone, Copy)]
struct ModeArgs {
    /// Exact arithmetic (the default).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Floating-point arithmetic.
    #[arg(long)]
    float: bool,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Float precision in bits (default from CORNERDESIGNS_PRECISION).
    #[arg(long)]
    bits: Option<usize>,
}

impl ModeArgs {
    fn mode(&self) -> Mode {
        if self.float {
            Mode::Float { tol: self.tol, bits: self.bits.unwrap_or_else(default_bits) }
        } else {
            Mode::Exact
        }
    }
}

fn default_bits() -> usize {
    std::env::var(PRECISION_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_PRECISION)
}

#[derive(Subcommand)]
enum Command {
    /// Verify a weighted design up to a degree.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        mode: ModeArgs,
        /// Use the invariant-harmonic fast path (degree <= 11).
        #[arg(long)]
        invariants: bool,
    },
    /// Solve for weights on given orbits.
    Solve {
        #[arg(long)]
        n: usize,
        /// Orbit as `A:s`, repeatable.
        #[arg(long = "orbit", required = true)]
        orbits: Vec<String>,
        #[arg(long)]
        degree: u32,
    },
    /// Classify a two-orbit 7-design.
    Classify7(TwoOrbits),
    /// Classify a two-orbit 9-design.
    Classify9(TwoOrbits),
    /// Degree upper bound for orbits with the given tail lengths.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
    },
    /// Single-orbit 7-designs for n <= nmax.
    Search7 {
        #[arg(long, default_value_t = 200)]
        nmax: usize,
    },
    /// Positive integer roots of the two-orbit cubic.
    Tanino {
        #[arg(long, default_value_t = 500)]
        smax: i64,
    },
    /// Integer points on the plane curve.
    Curve {
        #[arg(long, default_value_t = 100)]
        xmax: i64,
        #[arg(long, default_value_t = 100)]
        ymax: i64,
    },
    /// Newton refinement of rounded design parameters.
    Refine {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 1e-12)]
        target: f64,
        #[arg(long, default_value_t = 1e-3)]
        seed_limit: f64,
    },
    /// Hilbert identity of a design, or verification of a given identity.
    Hilbert {
        #[command(flatten)]
        input: Input,
        /// Exponent half `t`; with a design input, builds the identity.
        #[arg(long)]
        t: Option<u32>,
        /// Treat the input as an identity rather than a design.
        #[arg(long)]
        identity: bool,
        /// Scale to coprime integer coefficients.
        #[arg(long)]
        clear: bool,
    },
    /// Push a design to the simplex and verify the image.
    Simplex {
        #[command(flatten)]
        input: Input,
        /// Odd sphere degree.
        #[arg(long)]
        degree: u32,
    },
    /// Lattice constructions and membership.
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
    /// Dimensions of invariant harmonic spaces.
    Molien {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
    },
    /// Re-check the golden examples.
    Corpus {
        #[arg(long)]
        all: bool,
        #[arg(long)]
        anchor: Option<String>,
        /// List anchors only.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct TwoOrbits {
    #[arg(long)]
    n: usize,
    /// First orbit as `A:s`.
    #[arg(long)]
    o1: String,
    /// Second orbit as `A:s`.
    #[arg(long)]
    o2: String,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Subcommand)]
enum LatticeOp {
    /// Weight distribution of the extended Golay code.
    Golay,
    /// Leech membership of a sqrt(8)-scaled integer vector.
    Leech {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Vec<i64>,
    },
    /// The minimal shell of the Leech lattice, optionally checked as an 11-design.
    LeechShell {
        #[arg(long)]
        check: bool,
    },
    /// Barnes-Wall membership of an integer vector.
    Bw16 {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Vec<i64>,
    },
    /// A D4-family shell.
    D4 {
        #[arg(long, default_value = "d4")]
        kind: String,
        #[arg(long)]
        norm: String,
    },
    /// Embed a 23-dimensional point into the Leech lattice.
    ShorterLeech {
        /// Coordinates (exact scalars), comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<String>,
    },
}

/// A command's result: exit code, JSON report, table text.
struct Report {
    code: u8,
    json: Value,
    table: String,
}

impl Report {
    fn new(ok: bool, json: Value, table: String) -> Self {
        Report { code: if ok { 0 } else { 1 }, json, table }
    }
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Fmt {
    full: bool,
}

impl Fmt {
    fn scalar(&self, x: &ExactScalar) -> String {
        match x {
            ExactScalar::Float(_) if !self.full => x.to_decimal_string(6),
            _ => x.to_string(),
        }
    }

    fn float(&self, x: f64) -> String {
        if self.full {
            format!("{x:e}")
        } else {
            format!("{x:.5e}")
        }
    }
}

fn read_input(input: &Input) -> Result<String, InputError> {
    if let Some(a) = &input.corpus {
        let e = corpus::load(a)?;
        return match e.design() {
            Some(d) => Ok(serde_json::to_string(d)?),
            None => Ok(corpus::ASSETS.iter().find(|(n, _)| n == a).map(|(_, j)| j.to_string()).unwrap_or_default()),
        };
    }
    match (&input.file, &input.json) {
        (Some(p), _) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
        (Some(p), _) => std::fs::read_to_string(p).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        (None, Some(j)) => Ok(j.clone()),
        (None, None) => Err(InputError("one of --file, --json or --corpus is required".into())),
    }
}

/// A design, or a corpus entry wrapping one.
fn read_design(input: &Input) -> Result<WeightedDesign, InputError> {
    let text = read_input(input)?;
    let v: Value = serde_json::from_str(&text)?;
    let v = v.get("design").cloned().unwrap_or(v);
    Ok(serde_json::from_value(v)?)
}

fn parse_orbit(n: usize, spec: &str) -> Result<GcvOrbit, InputError> {
    let (a, s) = spec.rsplit_once(':').ok_or_else(|| InputError(format!("orbit `{spec}` must be A:s")))?;
    let a2: ExactScalar = a.trim().parse()?;
    let s: usize = s.trim().parse()?;
    Ok(GcvOrbit::new(n, a2, s)?)
}

fn report_json(r: &VerificationReport) -> Value {
    serde_json::to_value(r).unwrap_or(Value::Null)
}

fn cmd_verify(input: &Input, degree: u32, mode: ModeArgs, invariants: bool, f: &Fmt) -> Result<Report, InputError> {
    let d = read_design(input)?;
    let run = |t| if invariants { verify_design_invariants(&d, t, mode.mode()) } else { verify_design(&d, t, mode.mode()) };
    let r = run(degree)?;
    let next = if r.passed() && (!invariants || degree < 11) { Some(run(degree + 1)?) } else { None };
    let verified = r.verified_degree;
    let mut line = format!("verified degree {}", verified.map_or("none".into(), |v| v.to_string()));
    if let Some(n) = &next {
        if !n.passed() {
            line.push_str(&format!(", fails {}", degree + 1));
        } else {
            line.push_str(&format!(", also holds at {}", degree + 1));
        }
    }
    let mut table = format!("{d}{line}\n");
    if let Some(w) = r.first_failure() {
        table.push_str(&format!("first failure: degree {} {} residual {}\n", w.degree, w.label, f.scalar(&w.value)));
    }
    table.push_str(&format!("max residual {}\n", f.float(r.max_residual())));
    let json = json!({"summary": line, "report": report_json(&r), "next": next.as_ref().map(report_json)});
    Ok(Report::new(r.passed(), json, table))
}

fn cmd_solve(n: usize, orbits: &[String], degree: u32, f: &Fmt) -> Result<Report, InputError> {
    let os = orbits.iter().map(|o| parse_orbit(n, o)).collect::<Result<Vec<_>, _>>()?;
    Ok(match solve_weights(&os, degree)? {
        SolveOutcome::Solved { design, tilde } => {
            let tl: Vec<String> = tilde.iter().map(|x| f.scalar(x)).collect();
            let table = format!("{design}W~ = [{}]\n", tl.join(", "));
            Report::new(true, json!({"status": "solved", "design": design, "tilde": tilde}), table)
        }
        SolveOutcome::Infeasible(why) => Report::new(false, json!({"status": "infeasible", "reason": why.to_string()}), format!("infeasible: {why}\n")),
        SolveOutcome::NonUnique { rank } => Report::new(false, json!({"status": "non-unique", "rank": rank}), format!("non-unique (rank {rank})\n")),
    })
}

fn classification_report(c: &Classification, o1: &GcvOrbit, o2: &GcvOrbit, f: &Fmt) -> Report {
    let mut table = format!("{}{}\n", c.case, if c.theoretically_impossible { " (ruled out)" } else { "" });
    for (id, a, b) in &c.values {
        table.push_str(&format!("  {id}: {} | {}\n", f.scalar(a), f.scalar(b)));
    }
    for (label, g) in &c.g_values {
        table.push_str(&format!("  {label} = {}\n", f.scalar(g)));
    }
    if let Some((w1, w2)) = &c.tilde_weights {
        table.push_str(&format!("  W~ = ({}, {})\n", f.scalar(w1), f.scalar(w2)));
    }
    let design = c.design(o1, o2).and_then(Result::ok);
    let json = json!({
        "case": c.case.to_string(),
        "theoretically_impossible": c.theoretically_impossible,
        "values": c.values.iter().map(|(id, a, b)| json!({"invariant": id.to_string(), "v1": a, "v2": b})).collect::<Vec<_>>(),
        "g_values": c.g_values.iter().map(|(l, g)| json!({"label": l, "value": g})).collect::<Vec<_>>(),
        "tilde_weights": c.tilde_weights.as_ref().map(|(a, b)| json!([a, b])),
        "design": design,
    });
    let ok = !matches!(c.case, cornerdesigns::design::Case::None);
    Report::new(ok, json, table)
}

fn cmd_refine(input: &Input, degree: u32, target: f64, seed_limit: f64, f: &Fmt) -> Result<Report, InputError> {
    let d = read_design(input)?;
    let opts = RefineOptions { target, seed_limit, ..RefineOptions::default() };
    Ok(match refine_design(&d, degree, opts) {
        Ok(r) => {
            let check = verify_design(&r.design, degree, Mode::Float { tol: (target * 100.0).max(1e-12), bits: default_bits() })?;
            let mut table = format!("{}", r.design);
            table.push_str(&format!(
                "residual {} -> {} in {} steps; verified degree {}\n",
                f.float(r.initial_residual),
                f.float(r.final_residual),
                r.iterations,
                check.verified_degree.map_or("none".into(), |v| v.to_string())
            ));
            let json = json!({"design": r.design, "initial_residual": r.initial_residual, "final_residual": r.final_residual, "iterations": r.iterations, "verified_degree": check.verified_degree});
            Report::new(check.passed(), json, table)
        }
        Err(e) => Report::new(false, json!({"error": e.to_string()}), format!("refinement failed: {e}\n")),
    })
}

fn identity_table(h: &HilbertIdentity, f: &Fmt) -> String {
    let mut s = format!("{} (X1^2+...+X{}^2)^{} =\n", f.scalar(&h.c), h.n, h.t);
    for t in &h.terms {
        let form: Vec<String> = t.form.iter().map(|a| f.scalar(a)).collect();
        s.push_str(&format!("  + {} ({})^{}\n", f.scalar(&t.coef), form.join(", "), 2 * h.t));
    }
    s
}

fn cmd_hilbert(input: &Input, t: Option<u32>, identity: bool, clear: bool, f: &Fmt) -> Result<Report, InputError> {
    let h: HilbertIdentity = if identity {
        let text = read_input(input)?;
        let v: Value = serde_json::from_str(&text)?;
        if v.get("groups").is_some() {
            let e: corpus::CorpusEntry = serde_json::from_value(v)?;
            match e.check {
                corpus::Check::Identity { n, t, c, groups } => corpus::identity_from_groups(n, t, &c, &groups),
                _ => return Err(InputError("not an identity".into())),
            }
        } else {
            serde_json::from_value(v)?
        }
    } else {
        let d = read_design(input)?;
        let t = t.ok_or_else(|| InputError("--t is required with a design input".into()))?;
        match design_to_identity(&d, t, clear) {
            Ok(h) => h,
            Err(e) => return Ok(Report::new(false, json!({"error": e.to_string()}), format!("{e}\n"))),
        }
    };
    let r = verify_identity(&h)?;
    let mut table = identity_table(&h, f);
    table.push_str(&format!("{} monomials checked, {} failures\n", r.monomials_checked, r.failures.len()));
    if let Some(w) = &r.worst {
        table.push_str(&format!("worst: {:?} residual {}\n", w.monomial, f.scalar(&w.residual)));
    }
    Ok(Report::new(r.passed, json!({"identity": h, "report": r}), table))
}

fn cmd_simplex(input: &Input, degree: u32, f: &Fmt) -> Result<Report, InputError> {
    let d = read_design(input)?;
    let sc = sphere_to_simplex(&d, degree)?;
    let r = verify_simplex_cubature(&sc, sc.degree)?;
    let mut table = String::new();
    for (z, w) in sc.nodes.iter().zip(&sc.weights) {
        let zs: Vec<String> = z.iter().map(|x| f.scalar(x)).collect();
        table.push_str(&format!("  ({})  weight {}\n", zs.join(", "), f.scalar(w)));
    }
    table.push_str(&format!("{} nodes, verified degree {}\n", sc.nodes.len(), r.verified_degree.map_or("none".into(), |v| v.to_string())));
    Ok(Report::new(r.passed(), json!({"cubature": sc, "report": r}), table))
}

fn cmd_lattice(op: &LatticeOp) -> Result<Report, InputError> {
    Ok(match op {
        LatticeOp::Golay => {
            let dist = weight_distribution(golay_code());
            let table = dist.iter().map(|(w, c)| format!("weight {w}: {c}\n")).collect();
            Report::new(true, json!({"words": golay_code().len(), "distribution": dist}), table)
        }
        LatticeOp::Leech { u } => {
            if u.len() != 24 {
                return Err(InputError(format!("expected 24 coordinates, got {}", u.len())));
            }
            let m = leech_contains(u);
            Report::new(m, json!({"member": m}), format!("member: {m}\n"))
        }
        LatticeOp::LeechShell { check } => {
            let shell = leech_min_shell();
            let mut json = json!({"points": shell.len()});
            let mut table = format!("{} points\n", shell.len());
            let mut ok = shell.len() == 196_560;
            if *check {
                let r = leech_shell_design_check(&shell, 11);
                table.push_str(&format!("11-design: {} ({} even + {} octad monomials)\n", r.passed(), r.even_monomials, r.octad_monomials));
                ok &= r.passed();
                json["design_check"] = serde_json::to_value(&r)?;
            }
            Report::new(ok, json, table)
        }
        LatticeOp::Bw16 { u } => {
            if u.len() != 16 {
                return Err(InputError(format!("expected 16 coordinates, got {}", u.len())));
            }
            let m = bw16_contains(u);
            let norm: i64 = u.iter().map(|x| x * x).sum();
            Report::new(m, json!({"member": m, "norm": norm}), format!("member: {m}, norm {norm}\n"))
        }
        LatticeOp::D4 { kind, norm } => {
            let kind: D4Kind = kind.parse()?;
            let norm: ExactScalar = norm.parse()?;
            let r = norm.as_rational().ok_or_else(|| InputError("norm must be rational".into()))?;
            let s = d4_shell(kind, r);
            let mut table = format!("{} points\n", s.points.len());
            for o in &s.orbits {
                table.push_str(&format!("  v(A = {}, s = {}), {} points\n", o.a2(), o.s(), o.size()));
            }
            Report::new(!s.points.is_empty(), serde_json::to_value(&s)?, table)
        }
        LatticeOp::ShorterLeech { y } => {
            let y = y.iter().map(|c| c.parse::<ExactScalar>()).collect::<Result<Vec<_>, _>>()?;
            match shorter_leech_embed(&y) {
                Ok(e) => {
                    let table = format!("u = {:?}\nleech member: {}, u1 = u2: {}, norm {}\n", e.u, e.leech_member, e.on_projection, e.norm);
                    Report::new(e.member(), serde_json::to_value(&e)?, table)
                }
                Err(e) => return Err(InputError(e.to_string())),
            }
        }
    })
}

fn run(cli: &Cli) -> Result<Report, InputError> {
    let f = Fmt { full: cli.full };
    match &cli.command {
        Command::Verify { input, degree, mode, invariants } => cmd_verify(input, *degree, *mode, *invariants, &f),
        Command::Solve { n, orbits, degree } => cmd_solve(*n, orbits, *degree, &f),
        Command::Classify7(a) | Command::Classify9(a) => {
            let o1 = parse_orbit(a.n, &a.o1)?;
            let o2 = parse_orbit(a.n, &a.o2)?;
            let c = if matches!(cli.command, Command::Classify7(_)) { classify_7(&o1, &o2, a.mode.mode())? } else { classify_9(&o1, &o2, a.mode.mode())? };
            Ok(classification_report(&c, &o1, &o2, &f))
        }
        Command::Bounds { n, s } => {
            let (b, src) = degree_upper_bound_with_source(*n, s)?;
            let all = lemma_bounds(*n, s)?;
            let mut table = format!("bound {b} ({src:?})\n");
            for (src, v) in &all {
                table.push_str(&format!("  {src:?}: {v}\n"));
            }
            Ok(Report::new(true, json!({"bound": b, "source": src, "lemmas": all}), table))
        }
        Command::Search7 { nmax } => {
            let r = search_single_orbit_7(*nmax)?;
            let table = r.hits.iter().map(|h| format!("n = {}, s = {}, A = {}, f8,1 = {}\n", h.n, h.s, h.a2, f.scalar(&h.f81))).collect();
            Ok(Report::new(true, serde_json::to_value(&r)?, table))
        }
        Command::Tanino { smax } => {
            let r = tanino_scan(*smax);
            let table = format!("{} roots: {:?}\n", r.hits.len(), &r.hits[..r.hits.len().min(20)]);
            Ok(Report::new(true, serde_json::to_value(&r)?, table))
        }
        Command::Curve { xmax, ymax } => {
            let pts = curve_integer_points(*xmax, *ymax);
            Ok(Report::new(true, json!({"points": pts}), format!("{pts:?}\n")))
        }
        Command::Refine { input, degree, target, seed_limit } => cmd_refine(input, *degree, *target, *seed_limit, &f),
        Command::Hilbert { input, t, identity, clear } => cmd_hilbert(input, *t, *identity, *clear, &f),
        Command::Simplex { input, degree } => cmd_simplex(input, *degree, &f),
        Command::Lattice { op } => cmd_lattice(op),
        Command::Molien { n, max_degree } => {
            let dims = invariant_harmonic_dims(*n, *max_degree);
            let table = dims.iter().map(|(d, k)| format!("degree {d}: {k}\n")).collect();
            Ok(Report::new(true, json!({"n": n, "dims": dims}), table))
        }
        Command::Corpus { all, anchor, list } => {
            if *list {
                let names: Vec<&str> = corpus::ASSETS.iter().map(|(a, _)| *a).collect();
                return Ok(Report::new(true, json!(names), names.join("\n") + "\n"));
            }
            let entries = match (all, anchor) {
                (true, _) | (false, None) => corpus::load_all()?,
                (false, Some(a)) => vec![corpus::load(a)?],
            };
            let mut outcomes = Vec::new();
            let mut table = String::new();
            for e in &entries {
                let start = Instant::now();
                let o = run_entry(e);
                table.push_str(&format!(
                    "{} {} ({}; {:.0} ms)\n",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.anchor,
                    o.detail,
                    start.elapsed().as_secs_f64() * 1e3
                ));
                outcomes.push(o);
            }
            let failing: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.anchor.as_str()).collect();
            if !failing.is_empty() {
                table.push_str(&format!("regressions: {}\n", failing.join(", ")));
            }
            Ok(Report::new(failing.is_empty(), json!({"outcomes": outcomes, "failing": failing}), table))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&r.json).unwrap_or_default()),
                Format::Table => print!("{}", r.table),
            }
            ExitCode::from(r.code)
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
