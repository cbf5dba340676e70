//! `lenscalc`: certificate-producing front end for the lens-space K-theory
//! library.
//!
//! Exit status: 0 when every certificate is verified, 1 when any is refuted
//! (or `check-cert` rejects a file), 2 when the outcome is inconclusive, 3 on
//! usage or resource errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::Value;

use lenscalc::cert::exit_code;
use lenscalc::checker::check_certificate;
use lenscalc::elschain::{builtin_family, certify_cup_length, check_growth, corollary_check, CupOptions, ParamFamily};
use lenscalc::genus::{bounds_certificate, refute_essential_map, remark_consistency};
use lenscalc::lensring::{LensParams, LensRing, DEFAULT_BUDGET_BITS};
use lenscalc::membership::{member_exact, member_mod_params, verify_ideal_prop, BackendChoice, ProofOptions};
use lenscalc::ringcert::{factors_certificate, info_certificate, power_certificate};
use lenscalc::{Certificate, Error, Generator};

const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "lenscalc", version, about = "Exact K-theory of lens spaces with checkable certificates")]
struct Cli {
    /// Print certificates as JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,

    /// Largest exact ring, in bits of relation coefficients, before falling
    /// back to the modular backend.
    #[arg(long, global = true, env = "LENSCALC_BUDGET_BITS", default_value_t = DEFAULT_BUDGET_BITS)]
    budget_bits: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Arithmetic in K^0(L^n(p^k)).
    #[command(subcommand)]
    Ring(RingCmd),
    /// Verify a non-membership proposition.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Schwarz-genus and level-function bounds.
    #[command(subcommand)]
    Genus(GenusCmd),
    /// Essential lens sequence audits.
    #[command(subcommand)]
    Els(ElsCmd),
    /// Re-validate certificate files with the independent checker.
    CheckCert {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RingArgs {
    #[arg(short)]
    p: BigInt,
    #[arg(short)]
    k: BigInt,
    #[arg(short)]
    n: BigInt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenArg {
    Eta,
    Sigma,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum BackendArg {
    Exact,
    Modular,
    #[default]
    Auto,
}

impl From<BackendArg> for BackendChoice {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Self::Exact,
            BackendArg::Modular => Self::Modular,
            BackendArg::Auto => Self::Auto,
        }
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ElementArg {
    /// Coefficients in the basis 1, y, ..., y^(n-1), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    element: Option<Vec<BigInt>>,
    #[arg(long, value_enum)]
    generator: Option<GenArg>,
}

#[derive(Subcommand, Debug)]
enum RingCmd {
    /// Relation polynomial and lattice determinant.
    Info(RingArgs),
    /// Power of an element in normal form.
    Pow {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        base: ElementArg,
        #[arg(short, long)]
        exponent: BigInt,
    },
    /// Whether an element lies in the ideal.
    Member {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        element: ElementArg,
        /// Modulus exponent for the modular backend (default k).
        #[arg(short)]
        t: Option<BigInt>,
        #[arg(long, value_enum, default_value_t)]
        backend: BackendArg,
    },
    /// Invariant factors of the reduced group.
    Factors(RingArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// (x^(p^(k-l)) - 1)^m outside <x^(p^k) - 1, (x - 1)^n>.
    PropIdeal {
        #[arg(short)]
        p: BigInt,
        #[arg(short)]
        k: BigInt,
        #[arg(short)]
        l: BigInt,
        #[arg(short)]
        m: BigInt,
        #[arg(short)]
        n: BigInt,
        #[arg(short)]
        t: Option<BigInt>,
        #[arg(long, value_enum, default_value_t)]
        backend: BackendArg,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct FamilyChoice {
    /// Built-in family: f1, f2, f3 or cor.
    #[arg(long)]
    family: Option<String>,
    /// Table file: header `p = <prime>`, then lines `i k_i n_i`.
    #[arg(long)]
    family_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[command(flatten)]
    choice: FamilyChoice,
    /// Prime; required for built-in families.
    #[arg(short)]
    p: Option<BigInt>,
}

#[derive(Subcommand, Debug)]
enum GenusCmd {
    /// Level and Schwarz-genus bounds.
    Bounds {
        #[arg(short)]
        p: BigInt,
        #[arg(short)]
        k: BigInt,
        #[arg(short)]
        m: BigInt,
    },
    /// Rule out an essential map L^m(p^k) -> L^n(p^k) by the genus bound.
    Refute {
        #[arg(short)]
        p: BigInt,
        #[arg(short)]
        k: BigInt,
        #[arg(short)]
        m: BigInt,
        #[arg(short)]
        n: BigInt,
    },
    /// Chain of inequalities between two stages of a family.
    Remark {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short)]
        i: BigInt,
        #[arg(short)]
        j: BigInt,
    },
}

#[derive(Subcommand, Debug)]
enum ElsCmd {
    /// Growth conditions up to a horizon.
    Check {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        horizon: BigInt,
    },
    /// Cup-length certificates; every admissible m when -m is omitted.
    Certify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short)]
        i: BigInt,
        #[arg(short)]
        m: Option<BigInt>,
        #[arg(short, default_value = "1")]
        j: BigInt,
        #[arg(short)]
        t: Option<BigInt>,
        #[arg(long, value_enum, default_value_t)]
        backend: BackendArg,
    },
    /// Congruence and equality audit of the closed-form family.
    Corollary {
        #[arg(short)]
        p: BigInt,
        #[arg(long)]
        horizon: BigInt,
        #[arg(long, default_value = "0")]
        start_index: BigInt,
    },
}

fn fit<T: TryFrom<u64>>(x: &BigInt, what: &str) -> Result<T, Error> {
    x.to_u64().and_then(|v| T::try_from(v).ok()).ok_or_else(|| Error::TooLarge(format!("{what} = {x} is out of range")))
}

fn load_family(args: &FamilyArgs) -> Result<ParamFamily, Error> {
    let p: Option<u64> = args.p.as_ref().map(|p| fit(p, "p")).transpose()?;
    match (&args.choice.family, &args.choice.family_file) {
        (Some(name), _) => {
            let p = p.ok_or_else(|| Error::InvalidArgument("-p is required with --family".into()))?;
            builtin_family(name, p)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            let family = ParamFamily::parse(&text)?;
            match p {
                Some(p) if p != family.p => Err(Error::PrimeMismatch(p, family.p)),
                _ => Ok(family),
            }
        }
        (None, None) => Err(Error::InvalidArgument("a family is required".into())),
    }
}

fn ring_params(r: &RingArgs) -> Result<LensParams, Error> {
    LensParams::new(fit(&r.p, "p")?, fit(&r.k, "k")?, fit(&r.n, "n")?)
}

fn ring_element(ring: &std::sync::Arc<LensRing>, e: &ElementArg) -> Result<lenscalc::RingElement, Error> {
    match (&e.element, e.generator) {
        (Some(coeffs), _) => {
            if coeffs.len() > ring.n() {
                return Err(Error::InvalidArgument(format!(
                    "element has {} coefficients, ring has rank {}",
                    coeffs.len(),
                    ring.n()
                )));
            }
            Ok(ring.element(coeffs.clone()))
        }
        (None, Some(GenArg::Eta)) => Ok(ring.generator(Generator::Eta)),
        (None, Some(GenArg::Sigma)) => Ok(ring.generator(Generator::Sigma)),
        (None, None) => Err(Error::InvalidArgument("an element is required".into())),
    }
}

fn proof_options(cli: &Cli, backend: BackendArg, t: &Option<BigInt>) -> Result<ProofOptions, Error> {
    Ok(ProofOptions {
        backend: backend.into(),
        modulus_exponent: t.as_ref().map(|t| fit(t, "t")).transpose()?,
        budget_bits: cli.budget_bits,
    })
}

fn run_ring(cli: &Cli, cmd: &RingCmd) -> Result<Vec<Certificate>, Error> {
    Ok(match cmd {
        RingCmd::Info(r) => vec![info_certificate(&*LensRing::new(ring_params(r)?, cli.budget_bits)?)],
        RingCmd::Factors(r) => vec![factors_certificate(&*LensRing::new(ring_params(r)?, cli.budget_bits)?)],
        RingCmd::Pow { ring, base, exponent } => {
            let ring = LensRing::new(ring_params(ring)?, cli.budget_bits)?;
            let a = ring_element(&ring, base)?;
            vec![power_certificate(&ring, &a, exponent)?]
        }
        RingCmd::Member { ring, element, t, backend } => {
            let params = ring_params(ring)?;
            let t: u32 = match t {
                Some(t) => fit(t, "t")?,
                None => params.k,
            };
            if t == 0 {
                return Err(Error::InvalidArgument("t must be positive".into()));
            }
            let exact = match backend {
                BackendArg::Modular => None,
                BackendArg::Exact | BackendArg::Auto => match LensRing::new(params, cli.budget_bits) {
                    Ok(r) => Some(r),
                    Err(Error::BudgetExceeded { required, allowed }) => {
                        eprintln!("exact ring needs {required} bits, budget {allowed}; using the modular backend");
                        None
                    }
                    Err(e) => return Err(e),
                },
            };
            let cert = match exact {
                Some(ring) => member_exact(&ring, &ring_element(&ring, element)?),
                None => {
                    let coeffs = modular_coeffs(&params, element)?;
                    member_mod_params(&params, &coeffs, t)
                }
            };
            vec![cert]
        }
    })
}

/// Element coefficients without building the exact ring.
fn modular_coeffs(params: &LensParams, e: &ElementArg) -> Result<Vec<BigInt>, Error> {
    let n = params.n;
    let mut coeffs = vec![BigInt::from(0); n];
    match (&e.element, e.generator) {
        (Some(c), _) => {
            if c.len() > n {
                return Err(Error::InvalidArgument(format!("element has {} coefficients, ring has rank {n}", c.len())));
            }
            coeffs[..c.len()].clone_from_slice(c);
        }
        (None, Some(g)) => {
            if matches!(g, GenArg::Eta) {
                coeffs[0] = BigInt::from(1);
            }
            if n > 1 {
                coeffs[1] = BigInt::from(1);
            }
        }
        (None, None) => return Err(Error::InvalidArgument("an element is required".into())),
    }
    Ok(coeffs)
}

fn run(cli: &Cli) -> Result<Vec<Certificate>, Error> {
    Ok(match &cli.command {
        Command::Ring(cmd) => run_ring(cli, cmd)?,
        Command::Verify(VerifyCmd::PropIdeal { p, k, l, m, n, t, backend }) => {
            let opts = proof_options(cli, *backend, t)?;
            vec![verify_ideal_prop(fit(p, "p")?, fit(k, "k")?, fit(l, "l")?, fit(m, "m")?, fit(n, "n")?, &opts)?]
        }
        Command::Genus(GenusCmd::Bounds { p, k, m }) => vec![bounds_certificate(fit(p, "p")?, fit(k, "k")?, m)?],
        Command::Genus(GenusCmd::Refute { p, k, m, n }) => {
            vec![refute_essential_map(fit(p, "p")?, fit(k, "k")?, m, n)?]
        }
        Command::Genus(GenusCmd::Remark { family, i, j }) => {
            vec![remark_consistency(&load_family(family)?, fit(i, "i")?, fit(j, "j")?)?]
        }
        Command::Els(ElsCmd::Check { family, horizon }) => {
            vec![check_growth(&load_family(family)?, fit(horizon, "horizon")?)?]
        }
        Command::Els(ElsCmd::Certify { family, i, m, j, t, backend }) => {
            let family = load_family(family)?;
            let (i, j): (u64, u64) = (fit(i, "i")?, fit(j, "j")?);
            let opts = CupOptions { proof: proof_options(cli, *backend, t)? };
            let ms: Vec<u64> = match m {
                Some(m) => vec![fit(m, "m")?],
                None => {
                    let (k0, ki) = (family.stage(0)?.k, family.stage(i)?.k);
                    let cap = BigInt::from(family.p).pow(ki.saturating_sub(k0) as u32);
                    let cap: u64 = fit(&cap, "p^(k_i - k_0)")?;
                    (1..cap).collect()
                }
            };
            if ms.is_empty() {
                return Err(Error::Precondition("no m satisfies 1 <= m < p^(k_i - k_0)".into()));
            }
            ms.into_iter().map(|m| certify_cup_length(&family, i, m, j, &opts)).collect::<Result<_, _>>()?
        }
        Command::Els(ElsCmd::Corollary { p, horizon, start_index }) => {
            vec![corollary_check(fit(p, "p")?, fit(horizon, "horizon")?, fit(start_index, "start index")?)?]
        }
        Command::CheckCert { .. } => unreachable!("handled separately"),
    })
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn summary(c: &Certificate) -> String {
    let mut out = String::new();
    let params: Vec<String> = c
        .params
        .as_object()
        .into_iter()
        .flatten()
        .filter(|(k, _)| k.as_str() != "claim")
        .map(|(k, v)| format!("{k}={}", render(v)))
        .collect();
    let _ = writeln!(out, "{}: {} [{}]", c.claim(), verdict_word(c), backend_word(c));
    let _ = writeln!(out, "  params: {}", params.join(" "));
    for key in ["hypotheses", "violated", "links"] {
        if let Some(items) = c.witness.get(key).and_then(Value::as_array) {
            for h in items {
                if let (Some(name), Some(holds)) = (h["name"].as_str(), h["holds"].as_bool()) {
                    let _ = writeln!(
                        out,
                        "  {key}: {name} ({} {} {}) {}",
                        compact(&h["lhs"]),
                        compact(&h["op"]),
                        compact(&h["rhs"]),
                        if holds { "holds" } else { "fails" }
                    );
                }
            }
        }
    }
    for key in ["element", "normal_form", "result", "factors", "det", "combination"] {
        if let Some(v) = c.witness.get(key) {
            let _ = writeln!(out, "  {key}: {}", render(v));
        }
    }
    if let Some(v) = c.witness.get("first_violation").filter(|v| !v.is_null()) {
        let _ = writeln!(out, "  first violation at i = {}", compact(&v["i"]));
    }
    if let Some(stages) = c.witness.get("stages").and_then(Value::as_array) {
        if c.claim() == "els-corollary" {
            for s in stages {
                let _ = writeln!(
                    out,
                    "  i={} n_i={} m={} m mod p={} value={} value=n_i:{}",
                    compact(&s["i"]),
                    compact(&s["n_i"]),
                    compact(&s["m"]),
                    compact(&s["m_mod_p"]),
                    compact(&s["value"]),
                    s["value_eq_n_i"]
                );
            }
        }
    }
    for key in ["notes", "warnings"] {
        for s in c.witness.get(key).and_then(Value::as_array).into_iter().flatten() {
            let _ = writeln!(out, "  {}: {}", &key[..key.len() - 1], compact(s));
        }
    }
    out
}

fn render(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("({})", items.iter().map(compact).collect::<Vec<_>>().join(",")),
        other => compact(other),
    }
}

fn verdict_word(c: &Certificate) -> String {
    compact(&serde_json::to_value(c.verdict).unwrap_or(Value::Null))
}

fn backend_word(c: &Certificate) -> String {
    compact(&serde_json::to_value(c.backend).unwrap_or(Value::Null))
}

/// Accepts a single certificate or a JSON array of them.
fn read_certificates(path: &PathBuf) -> Result<Vec<Certificate>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let items = match value {
        Value::Array(items) => items,
        single => vec![single],
    };
    items
        .into_iter()
        .map(|v| serde_json::from_value(v).map_err(|e| format!("{}: malformed certificate: {e}", path.display())))
        .collect()
}

fn check_files(cli: &Cli, files: &[PathBuf]) -> ExitCode {
    let mut rejected = false;
    let mut report = Vec::new();
    for path in files {
        let certs = match read_certificates(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        };
        for (idx, cert) in certs.iter().enumerate() {
            let outcome = check_certificate(cert);
            rejected |= outcome.is_err();
            report.push(serde_json::json!({
                "file": path.display().to_string(),
                "index": idx,
                "claim": cert.claim(),
                "valid": outcome.is_ok(),
                "error": outcome.err(),
            }));
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        for r in &report {
            let status =
                if r["valid"] == true { "ok".to_string() } else { format!("INVALID: {}", compact(&r["error"])) };
            println!("{}[{}] {}: {status}", compact(&r["file"]), r["index"], compact(&r["claim"]));
        }
    }
    ExitCode::from(if rejected { 1 } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Command::CheckCert { files } = &cli.command {
        return check_files(&cli, files);
    }
    let certs = match run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if cli.json {
        let text = match certs.as_slice() {
            [single] => single.to_json(),
            many => serde_json::to_string_pretty(many).expect("certificates serialize"),
        };
        println!("{text}");
    } else {
        for c in &certs {
            print!("{}", summary(c));
        }
    }
    ExitCode::from(exit_code(&certs) as u8)
}
