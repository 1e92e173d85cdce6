use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use maslov_core::dynamics::{
    analytic_monodromy, crossing_oracle_i1, ellipsoid_characteristics, linearized_monodromy, linearized_path,
    DynError, Ellipsoid,
};
use maslov_core::io::{self, IoError, JumpSettings};
use maslov_core::iteration::{index_iterate, mean_deviation_bound, mean_index, nullity_iterate};
use maslov_core::jump::{build_v, choose_a, rho_and_injection, search_n, verify_certificate, JumpError};
use maslov_core::normal_form::{
    capital_c, classify_stability, decompose, random_descriptor, realize, s_plus_one,
};
use maslov_core::scalar::{parse_rational, Rational};
use maslov_core::theorem::{describe_form, run_r6_pipeline, run_two_elliptic, Scenario, TheoremError, TheoremReport};

#[derive(Parser)]
#[command(name = "maslov", version, about = "Index iteration, common index jump and stability pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Decompose a matrix or realize a descriptor.
    NormalForm,
    /// Index / nullity table of a record over m = 1..m_max.
    Iterate,
    /// Search a jump certificate for a problem file.
    JumpSearch,
    /// Re-verify a certificate against its problem.
    JumpVerify,
    /// Two distinct elliptic closed characteristics.
    TheoremTwoElliptic,
    /// R^6 pipeline: every closed characteristic elliptic, ≥ 2 irrationally elliptic
    TheoremR6,
    /// Scenario file for an ellipsoid.
    EllipsoidGen,
    /// Integrated vs closed-form monodromy of one ellipsoid orbit.
    EllipsoidMonodromy,
    /// i(γ,1) of a sampled path or of an ellipsoid orbit.
    OracleI1,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// δ as "p/q" or a decimal.
    #[arg(long, global = true)]
    delta: Option<String>,
    #[arg(long, global = true)]
    epsilon: Option<String>,
    #[arg(long, global = true)]
    n_bound: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Seed for a random descriptor (normal-form without --input).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// RK4 steps per period.
    #[arg(long, global = true, default_value_t = 20_000)]
    steps: usize,
    #[arg(long, global = true, default_value_t = 0)]
    orbit: usize,
    #[arg(long, global = true, default_value_t = 12)]
    m_max: u64,
    /// Numeric tolerance for decomposition.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
}

enum Failure {
    /// Computation failed for a reason other than bad input.
    Other(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Input(_) => 3,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<JumpError> for Failure {
    fn from(e: JumpError) -> Self {
        match e {
            JumpError::InvalidProblem(_) | JumpError::ConstraintUnsatisfiable { .. } | JumpError::Iter(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<DynError> for Failure {
    fn from(e: DynError) -> Self {
        match e {
            DynError::Invalid(_) | DynError::Path(_) => Failure::Input(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

macro_rules! other {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Other(e.to_string())
            }
        }
    )*};
}
other!(
    maslov_core::normal_form::NormalFormError,
    maslov_core::iteration::IterError,
    maslov_core::scalar::ScalarError,
    maslov_core::symplectic::SympError
);

/// A finished command: machine report, table text, and whether the checks held.
struct Outcome {
    json: Value,
    table: String,
    consistent: bool,
}

fn ok(json: Value, table: String) -> Result<Outcome, Failure> {
    Ok(Outcome { json, table, consistent: true })
}

fn read_input(opts: &Opts) -> Result<Value, Failure> {
    let path = opts.input.as_ref().ok_or_else(|| Failure::Input("--input is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(io::parse_json(&text)?)
}

fn cli_settings(opts: &Opts) -> Result<JumpSettings, Failure> {
    let rat = |s: &Option<String>, name: &str| -> Result<Option<Rational>, Failure> {
        s.as_deref()
            .map(|x| parse_rational(x).map_err(|e| Failure::Input(format!("--{name}: {e}"))))
            .transpose()
    };
    Ok(JumpSettings {
        delta: rat(&opts.delta, "delta")?,
        epsilon: rat(&opts.epsilon, "epsilon")?,
        n_bound: opts.n_bound,
        ..Default::default()
    })
}

fn normal_form(opts: &Opts) -> Result<Outcome, Failure> {
    let (matrix, source) = match (&opts.input, opts.seed) {
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_descriptor(&mut rng, 4, false);
            (realize(&d)?, Some(d))
        }
        _ => {
            let doc = read_input(opts)?;
            let gens = io::GeneratorTable::from_document(&doc)?;
            if let Some(d) = doc.get("descriptor") {
                let d = io::descriptor_from_json(d, "descriptor", &gens)?;
                (realize(&d)?, Some(d))
            } else {
                let m = doc.get("matrix").ok_or_else(|| Failure::Input("matrix: missing field".into()))?;
                (io::matrix_from_json(m, "matrix", &gens)?, None)
            }
        }
    };
    let (d, cert) = decompose(&matrix, opts.tol)?;
    // numeric irrational angles leave the rationality-dependent classes open
    let stab = classify_stability(&d, d.n()).map_or_else(|_| "undetermined".to_string(), |s| s.to_string());
    let json = json!({
        "schema": io::SCHEMA,
        "matrix": io::matrix_to_json(&matrix),
        "input_descriptor": source.as_ref().map(io::descriptor_to_json),
        "descriptor": io::descriptor_to_json(&d),
        "form": describe_form(&d),
        "stability": stab,
        "s_plus": s_plus_one(&d),
        "c": capital_c(&d),
        "nullity_one": d.nullity_one(),
        "elliptic_height": d.elliptic_height(),
        "certain": cert.certain,
        "min_margin": cert.min_margin,
        "notes": cert.notes,
    });
    let mut t = String::new();
    let _ = writeln!(t, "form       {}", describe_form(&d));
    let _ = writeln!(t, "stability  {stab}");
    let _ = writeln!(t, "S+ = {}, C = {}, nu1 = {}, e = {}", s_plus_one(&d), capital_c(&d), d.nullity_one(), d.elliptic_height());
    let _ = writeln!(t, "certain    {} (margin {:.3e})", cert.certain, cert.min_margin);
    ok(json, t)
}

fn iterate(opts: &Opts) -> Result<Outcome, Failure> {
    let doc = read_input(opts)?;
    let gens = io::GeneratorTable::from_document(&doc)?;
    let rv = doc.get("record").ok_or_else(|| Failure::Input("record: missing field".into()))?;
    let rec = io::record_from_json(rv, "record", &gens)?;
    let mi = mean_index(&rec)?;
    let bound = mean_deviation_bound(&rec.descriptor) as f64;
    let mut rows = Vec::new();
    let mut t = format!("mean index {mi}\n{:>5} {:>8} {:>6} {:>12}\n", "m", "i(γ,m)", "ν(γ,m)", "i − m·î");
    let mut within = true;
    for m in 1..=opts.m_max {
        let i = index_iterate(&rec, m)?;
        let nu = nullity_iterate(&rec, m)?;
        let dev = i as f64 - m as f64 * mi.to_f64();
        within &= dev.abs() <= bound + 1e-9;
        let _ = writeln!(t, "{m:>5} {i:>8} {nu:>6} {dev:>12.6}");
        rows.push(json!({"m": m, "index": i, "nullity": nu, "deviation": dev}));
    }
    let json = json!({
        "schema": io::SCHEMA,
        "label": rec.label,
        "mean_index": io::scalar_to_json(&mi),
        "deviation_bound": bound,
        "within_bound": within,
        "rows": rows,
    });
    Ok(Outcome { json, table: t, consistent: within })
}

fn certificate_table(c: &maslov_core::jump::JumpCertificate) -> String {
    let mut t = format!("N = {}, m = {:?}, Δ = {:?}, I = {:?}, χ = {:?}\n", c.n, c.m, c.delta_k, c.i_k, c.chi);
    for k in &c.checks {
        let path = k.path.map(|p| format!("[{p}]")).unwrap_or_default();
        let _ = writeln!(t, "{:<4} {}{path}: {}", if k.pass { "pass" } else { "FAIL" }, k.name, k.detail);
    }
    t
}

fn jump_search(opts: &Opts) -> Result<Outcome, Failure> {
    let doc = read_input(opts)?;
    let (records, file_settings) = io::problem_from_json(&doc)?;
    let p = file_settings.merge(&cli_settings(opts)?).problem(records)?;
    let jv = build_v(&p)?;
    let mut constraints = BTreeMap::new();
    if let Some(c) = doc.get("constraints").and_then(Value::as_object) {
        for (k, v) in c {
            let idx = k.parse::<usize>().map_err(|_| Failure::Input(format!("constraints.{k}: not an index")))?;
            let val = v.as_u64().filter(|x| *x <= 1).ok_or_else(|| Failure::Input(format!("constraints.{k}: expected 0 or 1")))?;
            constraints.insert(idx, val as u8);
        }
    }
    let (a, chi) = choose_a(&jv, &constraints)?;
    let cert = search_n(&p, &jv, &chi, &a, Some(1))?.remove(0);
    let n = p.records[0].n;
    let inj = rho_and_injection(&cert, &p, n).ok();
    let json = json!({
        "schema": io::SCHEMA,
        "problem": io::problem_to_json(&p),
        "certificate": io::certificate_to_json(&cert),
        "injection": inj.as_ref().map(io::injection_to_json),
    });
    let mut t = certificate_table(&cert);
    if let Some(inj) = &inj {
        let _ = writeln!(t, "ρ = {} ({})", inj.rho, inj.rho_value);
        for r in &inj.rows {
            let _ = writeln!(t, "slot {}: target {}, candidates {:?}", r.s, r.target, r.candidates);
        }
    }
    ok(json, t)
}

fn jump_verify(opts: &Opts) -> Result<Outcome, Failure> {
    let doc = read_input(opts)?;
    let (records, file_settings) = io::problem_from_json(&doc)?;
    let p = file_settings.merge(&cli_settings(opts)?).problem(records)?;
    let cv = doc.get("certificate").ok_or_else(|| Failure::Input("certificate: missing field".into()))?;
    let mut cert = io::certificate_from_json(cv, "certificate")?;
    cert.checks = verify_certificate(&cert, &p)?;
    let consistent = cert.verified();
    Ok(Outcome {
        json: io::certificate_to_json(&cert),
        table: certificate_table(&cert),
        consistent,
    })
}

fn theorem(opts: &Opts, r6: bool) -> Result<Outcome, Failure> {
    let doc = read_input(opts)?;
    let scenario: Scenario = io::scenario_from_json(&doc)?;
    let file_settings = JumpSettings::from_json(doc.get("jump"), "jump")?;
    let p = file_settings.merge(&cli_settings(opts)?).problem(scenario.records.clone())?;
    let labels: Vec<String> = scenario.records.iter().map(|r| r.label.clone()).collect();
    let result = if r6 { run_r6_pipeline(&scenario, &p) } else { run_two_elliptic(&scenario, &p) };
    let emit = |rep: &TheoremReport, failure: Option<(String, String)>| {
        let mut json = io::report_to_json(rep, &labels);
        let mut table = rep.trace_table();
        if let Some((check, detail)) = &failure {
            json["inconsistent"] = json!({"check": check, "detail": detail});
            let _ = writeln!(table, "scenario inconsistent at {check}: {detail}");
        }
        Outcome { json, table, consistent: failure.is_none() }
    };
    match result {
        Ok(rep) => Ok(emit(&rep, None)),
        Err(TheoremError::Inconsistent { check, detail, report }) => Ok(emit(&report, Some((check, detail)))),
        Err(TheoremError::InvalidScenario(m)) => Err(Failure::Input(m)),
        Err(TheoremError::Jump(e)) => Err(e.into()),
        Err(e) => Err(Failure::Other(e.to_string())),
    }
}

fn ellipsoid_gen(opts: &Opts) -> Result<Outcome, Failure> {
    let e = io::ellipsoid_from_json(&read_input(opts)?)?;
    let recs = ellipsoid_characteristics(&e, opts.steps)?;
    for w in &recs.warnings {
        eprintln!("warning: {w}");
    }
    let scenario = Scenario {
        n: e.n(),
        records: recs.records,
        non_degenerate: e.non_resonant()?,
        assumption_a: false,
        finite_family: true,
    };
    let mut t = String::new();
    for r in &scenario.records {
        let _ = writeln!(t, "{}: i1 = {}, î = {}, {}", r.label, r.i1, mean_index(r)?, describe_form(&r.descriptor));
    }
    ok(io::scenario_to_json(&scenario), t)
}

fn orbit_of(e: &Ellipsoid, opts: &Opts) -> Result<usize, Failure> {
    if opts.orbit >= e.n() {
        return Err(Failure::Input(format!("--orbit {} out of range (n = {})", opts.orbit, e.n())));
    }
    Ok(opts.orbit)
}

fn ellipsoid_monodromy(opts: &Opts) -> Result<Outcome, Failure> {
    let e = io::ellipsoid_from_json(&read_input(opts)?)?;
    let i = orbit_of(&e, opts)?;
    let num = linearized_monodromy(&e, i, opts.steps)?;
    let ana = analytic_monodromy(&e, i)?;
    let dev = (num.to_f64() - ana.to_f64()).amax();
    let json = json!({
        "schema": io::SCHEMA,
        "orbit": i,
        "steps": opts.steps,
        "numeric": io::matrix_to_json(&num),
        "analytic": io::matrix_to_json(&ana),
        "max_deviation": dev,
    });
    ok(json, format!("orbit {i}: max |numeric − analytic| = {dev:.3e} at {} steps\n", opts.steps))
}

fn oracle_i1(opts: &Opts) -> Result<Outcome, Failure> {
    let doc = read_input(opts)?;
    let path = if doc.get("alphas").is_some() {
        let e = io::ellipsoid_from_json(&doc)?;
        let i = orbit_of(&e, opts)?;
        linearized_path(&e, i, opts.steps, (opts.steps / 20_000).max(1))?
    } else {
        io::path_from_json(&doc)?
    };
    let rep = crossing_oracle_i1(&path)?;
    let crossings: Vec<Value> =
        rep.crossings.iter().map(|c| json!({"t": c.t, "dim": c.dim, "signature": c.signature})).collect();
    let json = json!({
        "schema": io::SCHEMA,
        "i1": rep.i1,
        "endpoint_degenerate": rep.endpoint_degenerate,
        "boundary_twice": [rep.boundary_twice.0, rep.boundary_twice.1],
        "crossings": crossings,
    });
    let mut t = format!("i(γ,1) = {}\n", rep.i1);
    for c in &rep.crossings {
        let _ = writeln!(t, "crossing t = {:.6}, dim {}, signature {}", c.t, c.dim, c.signature);
    }
    ok(json, t)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let o = &cli.opts;
    match cli.command {
        Command::NormalForm => normal_form(o),
        Command::Iterate => iterate(o),
        Command::JumpSearch => jump_search(o),
        Command::JumpVerify => jump_verify(o),
        Command::TheoremTwoElliptic => theorem(o, false),
        Command::TheoremR6 => theorem(o, true),
        Command::EllipsoidGen => ellipsoid_gen(o),
        Command::EllipsoidMonodromy => ellipsoid_monodromy(o),
        Command::OracleI1 => oracle_i1(o),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = match cli.opts.format {
                Format::Json => io::to_canonical_string(&out.json),
                Format::Table => out.table,
            };
            let written = match &cli.opts.output {
                Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(if out.consistent { 0 } else { 2 })
        }
        Err(f) => {
            let (Failure::Other(m) | Failure::Input(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
