//! Command-line interface: one entry point dispatching to the library.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage errors. Every
//! command that consumes randomness reports its seed in the artifact, so
//! identical `(argv, seed)` reproduce byte-identical output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use pir_core::bits::BitString;
use pir_core::bounds::{self, BoundReport};
use pir_core::code::{pir_to_code, smoothness_profile, CorruptModel};
use pir_core::qsc;
use pir_core::scheme::{audit_privacy, run_protocol, SchemeKind, Transcript};
use pir_core::superposed::{
    build_decoding_unitary, distinguishability_ceiling, success_probability, BooleanFunction,
};

use crate::client::{timeout_from_env, RemoteSession};
use crate::dbfile::{self, DbFormat};
use crate::jsonio;
use crate::manifest::RunManifest;
use crate::server::PirServer;

/// An error in how the tool was invoked (as opposed to a domain failure).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser, Debug)]
#[command(
    name = "pir",
    version,
    about = "Two-server PIR schemes, derived locally decodable codes, exact quantum-decoder simulations, and lower-bound evaluators"
)]
pub struct Cli {
    /// Seed for all randomness; generated and reported if omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Emit JSON where CSV would be the default.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the artifact here (plus a `.manifest.json` sidecar) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum SchemeArg {
    Square,
    Cube,
}

impl From<SchemeArg> for SchemeKind {
    fn from(arg: SchemeArg) -> SchemeKind {
        match arg {
            SchemeArg::Square => SchemeKind::Square,
            SchemeArg::Cube => SchemeKind::Cube,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum DbFormatArg {
    Text,
    Raw,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum ModelArg {
    Random,
    Hot,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum FormulaArg {
    Thm45,
    Cor45,
    Thm46,
    Thm52,
    Cor53,
    Thm55,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one protocol exchange locally (or all randomness exhaustively).
    Run {
        #[arg(long)]
        scheme: SchemeArg,
        /// Database file.
        #[arg(long)]
        db: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        db_format: DbFormatArg,
        /// Bit count for raw databases (length is out-of-band).
        #[arg(long)]
        n: Option<usize>,
        /// 1-based index to retrieve.
        #[arg(long)]
        index: usize,
        /// Enumerate every randomness string instead of sampling one.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Exact privacy audit: TVD between one server's query distributions.
    Audit {
        #[arg(long)]
        scheme: SchemeArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        server: u8,
        /// First 1-based index.
        #[arg(long)]
        i: usize,
        /// Second 1-based index.
        #[arg(long)]
        j: usize,
        /// Refuse enumerations beyond 2^cap_bits randomness strings.
        #[arg(long, default_value_t = pir_core::scheme::DEFAULT_AUDIT_CAP_BITS)]
        cap_bits: usize,
    },
    /// Materialize the scheme-derived code and its decoder table.
    Codegen {
        #[arg(long)]
        scheme: SchemeArg,
        #[arg(long)]
        n: usize,
    },
    /// Corrupt codewords and measure empirical local-decoding success.
    LdcTrial {
        /// A code.json produced by codegen.
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        trials: usize,
        /// 1-based index to decode (required for the hot model).
        #[arg(long)]
        index: Option<usize>,
        /// Message bits; random if omitted.
        #[arg(long)]
        x: Option<String>,
    },
    /// Compute f(a0, a1) from the superposed input, exactly.
    Qdecode {
        #[arg(long)]
        b: usize,
        /// Truth table as hex; bit k is the output at table index k = (w << b) | a.
        #[arg(long)]
        f: String,
        /// First half, as b characters of 0/1 (first character = bit 1).
        #[arg(long)]
        a0: String,
        /// Second half, same format.
        #[arg(long)]
        a1: String,
        /// Also write the decoding unitary as operator JSON.
        #[arg(long)]
        dump_unitary: Option<PathBuf>,
    },
    /// Simulate the quantum decoder and the random-access-code sieve.
    Reduce {
        #[arg(long)]
        code: PathBuf,
        /// Message bits.
        #[arg(long)]
        x: String,
        /// 1-based index to decode.
        #[arg(long)]
        index: usize,
        /// Single randomness value to simulate.
        #[arg(long)]
        r: Option<usize>,
        /// Simulate every randomness value (default when --r is absent).
        #[arg(long)]
        all_r: bool,
    },
    /// Evaluate one lower-bound formula.
    Bound {
        #[arg(long, value_enum)]
        formula: FormulaArg,
        /// Comma-separated k=v pairs, e.g. n=1000,l=4,b=1,c=3,eps=0.5.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Sweep one parameter of a bound formula; emits CSV (or JSON with --json).
    BoundTable {
        #[arg(long, value_enum)]
        formula: FormulaArg,
        #[arg(long, default_value = "")]
        params: String,
        /// Swept parameter, as name=start:stop:step or name=v1,v2,...
        #[arg(long)]
        sweep: String,
    },
    /// Serve one database over TCP.
    Serve {
        #[arg(long)]
        scheme: SchemeArg,
        #[arg(long)]
        db: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        db_format: DbFormatArg,
        #[arg(long)]
        n: Option<usize>,
        /// host:port to listen on.
        #[arg(long)]
        listen: String,
    },
    /// Retrieve one bit from two running servers.
    Get {
        /// 1-based index to retrieve.
        #[arg(long)]
        index: usize,
        /// Address of server 0.
        #[arg(long)]
        s0: String,
        /// Address of server 1.
        #[arg(long)]
        s1: String,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    let started = unix_now();
    let subcommand = subcommand_name(&cli.command);
    let mut seed_used: Option<u64> = None;

    let artifact = match cli.command {
        Command::Run {
            scheme,
            db,
            db_format,
            n,
            index,
            exhaustive,
        } => cmd_run(
            scheme.into(),
            &db,
            db_format,
            n,
            index,
            exhaustive,
            cli.seed,
            &mut seed_used,
        )?,
        Command::Audit {
            scheme,
            n,
            server,
            i,
            j,
            cap_bits,
        } => cmd_audit(scheme.into(), n, server, i, j, cap_bits)?,
        Command::Codegen { scheme, n } => cmd_codegen(scheme.into(), n)?,
        Command::LdcTrial {
            code,
            delta,
            model,
            trials,
            index,
            x,
        } => cmd_ldc_trial(
            &code,
            delta,
            model,
            trials,
            index,
            x,
            cli.seed,
            &mut seed_used,
        )?,
        Command::Qdecode {
            b,
            f,
            a0,
            a1,
            dump_unitary,
        } => cmd_qdecode(b, &f, &a0, &a1, dump_unitary.as_deref())?,
        Command::Reduce {
            code,
            x,
            index,
            r,
            all_r,
        } => cmd_reduce(&code, &x, index, r, all_r)?,
        Command::Bound { formula, params } => cmd_bound(formula, &params)?,
        Command::BoundTable {
            formula,
            params,
            sweep,
        } => cmd_bound_table(formula, &params, &sweep, cli.json)?,
        Command::Serve {
            scheme,
            db,
            db_format,
            n,
            listen,
        } => {
            // Long-running; never returns an artifact.
            return cmd_serve(scheme.into(), &db, db_format, n, &listen);
        }
        Command::Get { index, s0, s1 } => cmd_get(index, &s0, &s1, cli.seed, &mut seed_used)?,
    };

    emit(&cli.out, &artifact, &subcommand, seed_used, started)
}

fn subcommand_name(cmd: &Command) -> String {
    match cmd {
        Command::Run { .. } => "run",
        Command::Audit { .. } => "audit",
        Command::Codegen { .. } => "codegen",
        Command::LdcTrial { .. } => "ldc-trial",
        Command::Qdecode { .. } => "qdecode",
        Command::Reduce { .. } => "reduce",
        Command::Bound { .. } => "bound",
        Command::BoundTable { .. } => "bound-table",
        Command::Serve { .. } => "serve",
        Command::Get { .. } => "get",
    }
    .to_string()
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Prints the artifact, or writes it plus a manifest sidecar under `--out`.
fn emit(
    out: &Option<PathBuf>,
    artifact: &str,
    subcommand: &str,
    seed: Option<u64>,
    started: u64,
) -> Result<()> {
    match out {
        None => {
            println!("{artifact}");
        }
        Some(path) => {
            std::fs::write(path, artifact)
                .with_context(|| format!("writing {}", path.display()))?;
            let manifest = RunManifest {
                schema: 1,
                subcommand: subcommand.to_string(),
                parameters: std::env::args().collect(),
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                started_unix: started,
                finished_unix: unix_now(),
                output_sha256: hex_digest(artifact.as_bytes()),
            };
            let manifest_path = PathBuf::from(format!("{}.manifest.json", path.display()));
            std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)
                .with_context(|| format!("writing {}", manifest_path.display()))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn resolve_seed(explicit: Option<u64>, used: &mut Option<u64>) -> u64 {
    let seed = explicit.unwrap_or_else(|| rand::rng().next_u64());
    *used = Some(seed);
    seed
}

fn to_zero_based(index: usize, n: usize, what: &str) -> Result<usize> {
    if index == 0 || index > n {
        bail!("{what} {index} out of range 1..={n}");
    }
    Ok(index - 1)
}

fn db_format(arg: DbFormatArg) -> DbFormat {
    match arg {
        DbFormatArg::Text => DbFormat::Text,
        DbFormatArg::Raw => DbFormat::Raw,
    }
}

fn load_db(path: &Path, format: DbFormatArg, n: Option<usize>) -> Result<BitString> {
    if format == DbFormatArg::Raw && n.is_none() {
        return Err(usage("--db-format raw requires --n for the bit count"));
    }
    dbfile::load(path, db_format(format), n)
}

fn positions_one_based(mask: &pir_core::bits::SubsetMask) -> Vec<usize> {
    mask.positions().iter().map(|p| p + 1).collect()
}

fn transcript_json(
    kind: SchemeKind,
    message_n: usize,
    tr: &Transcript,
    seed: Option<u64>,
) -> Value {
    let mut v = json!({
        "schema": 1,
        "scheme": kind.as_str(),
        "n": message_n,
        "index": tr.index + 1,
        "randomness": tr.randomness.to_string(),
        "q0": tr.q0.to_string(),
        "q1": tr.q1.to_string(),
        "a0": tr.a0.to_string(),
        "a1": tr.a1.to_string(),
        "s0": positions_one_based(&tr.s0),
        "s1": positions_one_based(&tr.s1),
        "t": tr.q0.len(),
        "ell": tr.a0.len(),
        "b": tr.s0.cardinality(),
        "output": tr.output,
    });
    if let Some(seed) = seed {
        v["seed"] = json!(seed);
    }
    v
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON serialization cannot fail")
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    kind: SchemeKind,
    db_path: &Path,
    format: DbFormatArg,
    n: Option<usize>,
    index: usize,
    exhaustive: bool,
    seed: Option<u64>,
    seed_used: &mut Option<u64>,
) -> Result<String> {
    if exhaustive && seed.is_some() {
        return Err(usage("--seed and --exhaustive are mutually exclusive"));
    }
    let bits = load_db(db_path, format, n)?;
    let scheme = kind.scheme();
    let db = scheme.arrange(bits.clone());
    let index0 = to_zero_based(index, db.message_len(), "--index")?;
    let r_len = scheme
        .randomness_len(db.arranged_len())
        .map_err(to_domain)?;

    if exhaustive {
        if r_len > 20 {
            bail!("randomness space 2^{r_len} exceeds the exhaustive cap of 2^20");
        }
        let want = bits.get(index0);
        let mut successes = 0u64;
        let runs = 1u64 << r_len;
        for r in 0..runs {
            let randomness = BitString::from_index(r as usize, r_len);
            let tr = run_protocol(scheme, &db, index0, &randomness).map_err(to_domain)?;
            if tr.output == want {
                successes += 1;
            }
        }
        let v = json!({
            "schema": 1,
            "scheme": kind.as_str(),
            "n": db.message_len(),
            "arranged_n": db.arranged_len(),
            "index": index,
            "exhaustive": true,
            "runs": runs,
            "successes": successes,
            "recovery_rate": successes as f64 / runs as f64,
            "output": want,
        });
        return Ok(pretty(&v));
    }

    let seed = resolve_seed(seed, seed_used);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let randomness = BitString::random(r_len, &mut rng);
    let tr = run_protocol(scheme, &db, index0, &randomness).map_err(to_domain)?;
    Ok(pretty(&transcript_json(
        kind,
        db.message_len(),
        &tr,
        Some(seed),
    )))
}

fn cmd_audit(
    kind: SchemeKind,
    n: usize,
    server: u8,
    i: usize,
    j: usize,
    cap_bits: usize,
) -> Result<String> {
    if server > 1 {
        return Err(usage("--server must be 0 or 1"));
    }
    let arranged = match kind {
        SchemeKind::Square => pir_core::bits::Arrangement::covering_square(n).len(),
        SchemeKind::Cube => pir_core::bits::Arrangement::covering_cube(n).len(),
    };
    let i0 = to_zero_based(i, n, "--i")?;
    let j0 = to_zero_based(j, n, "--j")?;
    let tvd = audit_privacy(kind.scheme(), arranged, server as usize, i0, j0, cap_bits)
        .map_err(to_domain)?;
    let v = json!({
        "schema": 1,
        "scheme": kind.as_str(),
        "n": n,
        "arranged_n": arranged,
        "server": server,
        "i": i,
        "j": j,
        "tvd": tvd.value(),
        "tvd_l1_numerator": tvd.l1_numerator,
        "randomness_count": tvd.randomness_count,
        "exact_zero": tvd.is_zero(),
    });
    Ok(pretty(&v))
}

fn cmd_codegen(kind: SchemeKind, n: usize) -> Result<String> {
    let exact = match kind {
        SchemeKind::Square => pir_core::bits::Arrangement::exact_square(n),
        SchemeKind::Cube => pir_core::bits::Arrangement::exact_cube(n),
    };
    if exact.is_err() {
        bail!(
            "--n {n} is not compatible with the {} scheme; pick an exact {}",
            kind.as_str(),
            match kind {
                SchemeKind::Square => "square (4, 9, 16, ...)",
                SchemeKind::Cube => "cube (8, 27, 64, ...)",
            }
        );
    }
    let (code, decoder) = pir_to_code(kind.scheme(), n).map_err(to_domain)?;
    let file = jsonio::code_to_file(&code, &decoder)?;
    Ok(serde_json::to_string_pretty(&file)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_ldc_trial(
    code_path: &Path,
    delta: f64,
    model: ModelArg,
    trials: usize,
    index: Option<usize>,
    x: Option<String>,
    seed: Option<u64>,
    seed_used: &mut Option<u64>,
) -> Result<String> {
    let file: jsonio::CodeFile = serde_json::from_str(
        &std::fs::read_to_string(code_path)
            .with_context(|| format!("reading {}", code_path.display()))?,
    )
    .context("parsing code file")?;
    let (code, decoder) = jsonio::code_from_file(&file)?;

    let seed = resolve_seed(seed, seed_used);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let x = match x {
        Some(s) => {
            let bits = BitString::parse(&s).map_err(|e| usage(format!("--x: {e}")))?;
            if bits.len() != code.n {
                bail!("--x has {} bits, the code encodes {}", bits.len(), code.n);
            }
            bits
        }
        None => BitString::random(code.n, &mut rng),
    };
    let index0 = match index {
        Some(i) => to_zero_based(i, code.n, "--index")?,
        None => {
            if model == ModelArg::Hot {
                return Err(usage("--model hot needs --index for its target"));
            }
            (rng.next_u64() % code.n as u64) as usize
        }
    };
    let corrupt_model = match model {
        ModelArg::Random => CorruptModel::Random,
        ModelArg::Hot => CorruptModel::AdversarialHot { target: index0 },
    };
    let rate = pir_core::code::local_decode_trial(
        &code,
        &decoder,
        &x,
        index0,
        delta,
        corrupt_model,
        trials,
        &mut rng,
    )
    .map_err(to_domain)?;
    let v = json!({
        "schema": 1,
        "code": file.scheme,
        "n": code.n,
        "m": code.m,
        "ell": code.ell,
        "b": code.b,
        "delta": delta,
        "corrupted_entries": (delta * code.m as f64).floor() as u64,
        "model": match model { ModelArg::Random => "random", ModelArg::Hot => "hot" },
        "trials": trials,
        "seed": seed,
        "x": x.to_string(),
        "index": index0 + 1,
        "successes": (rate * trials as f64).round() as u64,
        "success_rate": rate,
    });
    Ok(pretty(&v))
}

fn cmd_qdecode(
    b: usize,
    f_hex: &str,
    a0: &str,
    a1: &str,
    dump_unitary: Option<&Path>,
) -> Result<String> {
    if b == 0 || b > 6 {
        return Err(usage("--b must lie in 1..=6"));
    }
    let f = BooleanFunction::from_hex(b, f_hex).map_err(|e| usage(format!("--f: {e}")))?;
    let parse_half = |s: &str, name: &str| -> Result<usize> {
        let bits = BitString::parse(s).map_err(|e| usage(format!("--{name}: {e}")))?;
        if bits.len() != b {
            return Err(usage(format!("--{name} must have exactly {b} bits")));
        }
        Ok(bits.to_index())
    };
    let a0_int = parse_half(a0, "a0")?;
    let a1_int = parse_half(a1, "a1")?;

    let du = build_decoding_unitary(&f).map_err(to_domain)?;
    let prob = success_probability(&du, a0_int, a1_int).map_err(to_domain)?;
    let ceiling = distinguishability_ceiling(&f).map_err(to_domain)?;
    if let Some(path) = dump_unitary {
        std::fs::write(path, jsonio::matrix_to_json(&du.unitary))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let v = json!({
        "schema": 1,
        "b": b,
        "f": f.to_hex(),
        "a0": a0,
        "a1": a1,
        "f_value": f.eval(a0_int, a1_int),
        "prob_correct": prob,
        "bias": prob - 0.5,
        "tracenorm_ceiling": ceiling,
    });
    Ok(pretty(&v))
}

fn cmd_reduce(
    code_path: &Path,
    x: &str,
    index: usize,
    r: Option<usize>,
    all_r: bool,
) -> Result<String> {
    let file: jsonio::CodeFile = serde_json::from_str(
        &std::fs::read_to_string(code_path)
            .with_context(|| format!("reading {}", code_path.display()))?,
    )
    .context("parsing code file")?;
    let (code, decoder) = jsonio::code_from_file(&file)?;
    let x = BitString::parse(x).map_err(|e| usage(format!("--x: {e}")))?;
    if x.len() != code.n {
        bail!("--x has {} bits, the code encodes {}", x.len(), code.n);
    }
    let index0 = to_zero_based(index, code.n, "--index")?;
    let target = x.get(index0);
    let word = code.encode(&x).map_err(to_domain)?;

    let r_values: Vec<usize> = match (r, all_r) {
        (Some(_), true) => return Err(usage("--r and --all-r are mutually exclusive")),
        (Some(r), false) => {
            if r >= decoder.randomness_count(index0) {
                bail!(
                    "--r {r} out of range 0..{}",
                    decoder.randomness_count(index0)
                );
            }
            vec![r]
        }
        (None, _) => (0..decoder.randomness_count(index0)).collect(),
    };

    let mut per_r = Vec::with_capacity(r_values.len());
    for r in r_values {
        let rep = qsc::quantum_decode(&word, &decoder, target, index0, r).map_err(to_domain)?;
        per_r.push(json!({
            "r": r,
            "success": rep.success,
            "classical_output": rep.classical_output,
            "classical_correct": rep.classical_correct,
        }));
    }

    let c_star = smoothness_profile(&decoder).c_star;
    let sieve = match qsc::rac_state(&code, &x) {
        Ok(rac) => {
            let rep = qsc::rac_sieve(&rac, &decoder, c_star, target, index0).map_err(to_domain)?;
            let copies = qsc::default_copies(rep.c, rep.u, code.b);
            json!({
                "c": rep.c,
                "u": rep.u,
                "stage1": rep.stage1,
                "stage2": rep.stage2,
                "success_flag": rep.success_flag,
                "conditional_correct": rep.conditional_correct,
                "multi_copy": { "copies": copies, "overall": qsc::rac_multi_copy(&rep, copies) },
            })
        }
        Err(pir_core::error::Error::EnumerationTooLarge { .. }) => {
            json!({ "skipped": "m * 2^ell exceeds the 2^16 toy-scale cap" })
        }
        Err(e) => return Err(to_domain(e)),
    };

    let v = json!({
        "schema": 1,
        "code": file.scheme,
        "n": code.n,
        "m": code.m,
        "ell": code.ell,
        "b": code.b,
        "index": index,
        "x": x.to_string(),
        "target_bit": target,
        "quantum_decoder": per_r,
        "sieve": sieve,
    });
    Ok(pretty(&v))
}

/// Parsed `k=v` parameter list with unit-checked getters.
struct Params(std::collections::BTreeMap<String, f64>);

impl Params {
    fn parse(raw: &str) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for piece in raw.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = piece
                .split_once('=')
                .ok_or_else(|| usage(format!("--params entry '{piece}' is not k=v")))?;
            let key = match k.trim() {
                "l" | "ell" => "l".to_string(),
                "eps" | "epsilon" => "eps".to_string(),
                other => other.to_string(),
            };
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("--params value '{v}' is not a number")))?;
            map.insert(key, value);
        }
        Ok(Params(map))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.0
            .get(key)
            .copied()
            .ok_or_else(|| usage(format!("missing parameter '{key}'")))
    }

    fn f64_or(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    fn u64(&self, key: &str) -> Result<u64> {
        let v = self.f64(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(usage(format!(
                "parameter '{key}' must be a nonnegative integer"
            )));
        }
        Ok(v as u64)
    }

    fn flag(&self, key: &str) -> bool {
        self.0.get(key).is_some_and(|&v| v != 0.0)
    }

    fn set(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_string(), value);
    }
}

fn evaluate_bound(formula: FormulaArg, p: &Params) -> Result<BoundReport> {
    let report = match formula {
        FormulaArg::Thm45 => bounds::smooth_code_length_bound(
            p.u64("n")?,
            p.u64("l")?,
            p.u64("b")?,
            p.f64("c")?,
            p.f64("eps")?,
        ),
        FormulaArg::Cor45 => bounds::ldc_length_bound(
            p.u64("n")?,
            p.u64("l")?,
            p.u64("b")?,
            p.f64("delta")?,
            p.f64("eps")?,
        ),
        FormulaArg::Thm46 => bounds::parity_decoder_bound(
            p.u64("n")?,
            p.u64("l")?,
            p.u64("b")?,
            p.f64("c")?,
            p.f64("eps")?,
        ),
        FormulaArg::Thm52 => {
            let (n, l, b) = (p.u64("n")?, p.u64("l")?, p.u64("b")?);
            let (eps, eta) = (p.f64("eps")?, p.f64_or("eta", 0.0));
            if p.flag("parity") {
                bounds::pir_query_bound_parity(n, l, b, eps, eta)
            } else {
                bounds::pir_query_bound(n, l, b, eps, eta)
            }
        }
        FormulaArg::Cor53 => bounds::comm_exponent(p.u64("b")?),
        FormulaArg::Thm55 => bounds::general_comm_bound(p.u64("n")?, p.f64_or("kappa", 0.0)),
    };
    report.map_err(to_domain)
}

fn value_field_name(formula: FormulaArg) -> &'static str {
    match formula {
        FormulaArg::Thm45 | FormulaArg::Cor45 | FormulaArg::Thm46 => "log2_m_lower_bound",
        FormulaArg::Thm52 => "t_lower_bound",
        FormulaArg::Cor53 => "exponent",
        FormulaArg::Thm55 => "comm_lower_bound",
    }
}

fn bound_report_json(formula: FormulaArg, report: &BoundReport) -> Value {
    let mut v = json!({
        "schema": 1,
        "formula": report.formula,
        "value": report.value,
        "vacuous": report.vacuous,
    });
    v[value_field_name(formula)] = json!(report.value);
    macro_rules! put {
        ($field:ident) => {
            if let Some(x) = report.$field {
                v[stringify!($field)] = json!(x);
            }
        };
    }
    put!(n);
    put!(ell);
    put!(b);
    put!(c);
    put!(epsilon);
    put!(delta);
    put!(eta);
    put!(kappa);
    put!(p);
    put!(entropy);
    put!(d);
    put!(binding_case);
    if let Some(u) = report.u {
        v["u"] = json!(u as f64);
        v["u_exact"] = json!(u.to_string());
    }
    if let Some(lp) = report.ell_prime {
        v["ell_prime"] = json!(lp as f64);
    }
    if let Some(cases) = report.cases {
        v["cases"] = json!(cases);
    }
    v
}

fn cmd_bound(formula: FormulaArg, params: &str) -> Result<String> {
    let p = Params::parse(params)?;
    let report = evaluate_bound(formula, &p)?;
    Ok(pretty(&bound_report_json(formula, &report)))
}

fn parse_sweep(raw: &str) -> Result<(String, Vec<f64>)> {
    let (name, spec) = raw
        .split_once('=')
        .ok_or_else(|| usage("--sweep must be name=start:stop:step or name=v1,v2,..."))?;
    let name = match name.trim() {
        "l" | "ell" => "l".to_string(),
        "eps" | "epsilon" => "eps".to_string(),
        other => other.to_string(),
    };
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(usage("--sweep range must be start:stop:step"));
        }
        let start: f64 = parts[0].parse().map_err(|_| usage("bad sweep start"))?;
        let stop: f64 = parts[1].parse().map_err(|_| usage("bad sweep stop"))?;
        let step: f64 = parts[2].parse().map_err(|_| usage("bad sweep step"))?;
        if step <= 0.0 || stop < start {
            return Err(usage("sweep needs step > 0 and stop >= start"));
        }
        let mut values = Vec::new();
        let mut v = start;
        while v <= stop + 1e-9 {
            values.push(v);
            v += step;
        }
        values
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| usage(format!("bad sweep value '{s}'")))
            })
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(usage("empty sweep"));
    }
    Ok((name, values))
}

const CSV_COLUMNS: [&str; 17] = [
    "formula",
    "n",
    "ell",
    "b",
    "c",
    "epsilon",
    "delta",
    "eta",
    "kappa",
    "u",
    "p",
    "entropy",
    "d",
    "ell_prime",
    "value",
    "vacuous",
    "binding_case",
];

fn csv_cell_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn bound_report_csv_row(report: &BoundReport) -> String {
    let cells: Vec<String> = vec![
        report.formula.to_string(),
        report.n.map(|x| x.to_string()).unwrap_or_default(),
        report.ell.map(|x| x.to_string()).unwrap_or_default(),
        report.b.map(|x| x.to_string()).unwrap_or_default(),
        csv_cell_opt_f64(report.c),
        csv_cell_opt_f64(report.epsilon),
        csv_cell_opt_f64(report.delta),
        csv_cell_opt_f64(report.eta),
        csv_cell_opt_f64(report.kappa),
        report.u.map(|x| x.to_string()).unwrap_or_default(),
        csv_cell_opt_f64(report.p),
        csv_cell_opt_f64(report.entropy),
        csv_cell_opt_f64(report.d),
        report.ell_prime.map(|x| x.to_string()).unwrap_or_default(),
        format!("{}", report.value),
        report.vacuous.to_string(),
        report
            .binding_case
            .map(|x| x.to_string())
            .unwrap_or_default(),
    ];
    cells.join(",")
}

fn cmd_bound_table(
    formula: FormulaArg,
    params: &str,
    sweep: &str,
    as_json: bool,
) -> Result<String> {
    let mut p = Params::parse(params)?;
    let (name, values) = parse_sweep(sweep)?;
    let mut reports = Vec::with_capacity(values.len());
    for v in values {
        p.set(&name, v);
        reports.push(evaluate_bound(formula, &p)?);
    }
    if as_json {
        let rows: Vec<Value> = reports
            .iter()
            .map(|r| bound_report_json(formula, r))
            .collect();
        return Ok(pretty(&json!({ "schema": 1, "rows": rows })));
    }
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for report in &reports {
        out.push_str(&bound_report_csv_row(report));
        out.push('\n');
    }
    out.pop();
    Ok(out)
}

fn cmd_serve(
    kind: SchemeKind,
    db_path: &Path,
    format: DbFormatArg,
    n: Option<usize>,
    listen: &str,
) -> Result<()> {
    let bits = load_db(db_path, format, n)?;
    let db = kind.scheme().arrange(bits);
    let server = PirServer::bind(listen, kind, db).with_context(|| format!("binding {listen}"))?;
    eprintln!(
        "pir: serving {} scheme on {}",
        kind.as_str(),
        server.local_addr()?
    );
    server.run().context("server accept loop")
}

fn cmd_get(
    index: usize,
    s0: &str,
    s1: &str,
    seed: Option<u64>,
    seed_used: &mut Option<u64>,
) -> Result<String> {
    let timeout = timeout_from_env();
    let mut session = RemoteSession::connect(s0, s1, timeout)?;
    let index0 = to_zero_based(index, session.info.n, "--index")?;
    let seed = resolve_seed(seed, seed_used);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let randomness = BitString::random(session.randomness_len(), &mut rng);
    let tr = session.query(index0, &randomness)?;
    let mut v = transcript_json(session.info.kind, session.info.n, &tr, Some(seed));
    v["s0_addr"] = json!(s0);
    v["s1_addr"] = json!(s1);
    Ok(pretty(&v))
}

fn to_domain(e: pir_core::error::Error) -> anyhow::Error {
    anyhow!("{e}")
}
