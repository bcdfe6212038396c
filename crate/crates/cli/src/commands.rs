use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use sepscan::gadgets::{motzkin_straus_value, verify_chain_with, ChainOptions, Graph};
use sepscan::io::{read_density, read_json, write_json, DensityJson, RationalJson, RationalMatrixJson};
use sepscan::nets::{build_net_cached, verify_coverage, NetKind};
use sepscan::onesided::pipeline;
use sepscan::qsep::{reduce_wmem_to_qsep, to_f64, verify_certificate, CertificateJson, InstanceJson};
use sepscan::states::{state_library, StateSpec};
use sepscan::symext::{separability_scan_with, ScanOptions};
use sepscan::witness::{required_net_delta, wsep_solve_with, WsepOptions};
use sepscan::wopt::{wopt_max_with, Side, WoptMode, WoptOptions};
use sepscan::{Rational, Tolerances};

use crate::{Failure, Global, Outcome};

type Run = Result<Outcome, Failure>;

fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure {
        code: crate::EXIT_INTERNAL,
        message: e.to_string(),
    })
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::malformed(format!("--{name} must be positive, got {x}")))
    }
}

fn verdict_outcome(verdict: sepscan::Verdict, result: Value, artifacts: Vec<PathBuf>) -> Outcome {
    Outcome {
        exit_code: verdict.outcome.exit_code(),
        verdict: Some(verdict),
        result,
        artifacts,
    }
}

fn plain(result: Value, artifacts: Vec<PathBuf>, exit_code: i32) -> Outcome {
    Outcome {
        verdict: None,
        result,
        artifacts,
        exit_code,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Complex,
    Projective,
    Real,
}

impl From<KindArg> for NetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Complex => NetKind::Complex,
            KindArg::Projective => NetKind::Projective,
            KindArg::Real => NetKind::Real,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct TestArgs {
    /// Density matrix JSON.
    #[arg(long)]
    pub input: PathBuf,
}

pub fn test(a: &TestArgs, _g: &Global, tol: &Tolerances) -> Run {
    let rho = read_density(&a.input)?;
    let v = pipeline(&rho, tol);
    Ok(verdict_outcome(v, json!({ "m": rho.m(), "n": rho.n() }), vec![]))
}

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Accuracy δ in (0, 1].
    #[arg(long)]
    pub delta: f64,
    /// Net radius; defaults to δ/10, the coarsest allowed.
    #[arg(long)]
    pub net_delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = KindArg::Projective)]
    pub net_kind: KindArg,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Where to write the witness operator, if one is found.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

pub fn witness(a: &WitnessArgs, g: &Global) -> Run {
    let delta = positive("delta", a.delta)?;
    let rho = read_density(&a.input)?;
    let net_delta = positive("net-delta", a.net_delta.unwrap_or(required_net_delta(delta)))?;
    if net_delta > required_net_delta(delta) * (1.0 + 1e-12) {
        return Err(sepscan::Error::NetTooCoarse {
            net_delta,
            required: required_net_delta(delta),
            delta,
        }
        .into());
    }
    let net = build_net_cached(rho.m(), net_delta, a.net_kind.into(), g.net_cache.as_deref())?;
    let opts = WsepOptions {
        max_iterations: a.max_iterations,
    };
    let out = wsep_solve_with(&rho, delta, &net, &opts)?;
    let mut artifacts = vec![];
    if let (Some(path), Some(cert)) = (&a.witness_out, &out.witness) {
        write_json(path, cert)?;
        artifacts.push(path.clone());
    }
    let result = json!({
        "termination": to_value(&out.termination)?,
        "iterations": out.iterations,
        "net_size": net.len(),
        "net_delta": net.delta(),
        "final_radius": out.radii.last(),
        "witness": to_value(&out.witness)?,
    });
    Ok(verdict_outcome(out.verdict, result, artifacts))
}

#[derive(Args, Debug, Serialize)]
pub struct SymextArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Target trace distance; fixes the top level k̄.
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Add the partial-transpose constraints at every level.
    #[arg(long, overrides_with = "no_ppt")]
    pub ppt: bool,
    #[arg(long = "no-ppt", overrides_with = "ppt")]
    #[serde(skip)]
    pub no_ppt: bool,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = sepscan::tolerance::EXTENSION_PSD)]
    pub tol: f64,
    /// Confirm entangled verdicts with the witness search.
    #[arg(long)]
    pub strict: bool,
}

pub fn symext(a: &SymextArgs, g: &Global) -> Run {
    let delta = positive("delta", a.delta)?;
    let rho = read_density(&a.input)?;
    let opts = ScanOptions {
        kmax: a.kmax,
        ppt: a.ppt,
        max_iters: a.max_iters,
        tol: positive("tol", a.tol)?,
        strict: a.strict,
        ..ScanOptions::default()
    };
    let net = if a.strict {
        Some(build_net_cached(
            rho.m(),
            required_net_delta(delta.min(1.0)),
            NetKind::Projective,
            g.net_cache.as_deref(),
        )?)
    } else {
        None
    };
    let report = separability_scan_with(&rho, delta, &opts, net.as_ref())?;
    let result = json!({ "kbar": report.kbar, "levels": to_value(&report.levels)? });
    Ok(verdict_outcome(report.verdict, result, vec![]))
}

#[derive(Args, Debug, Serialize)]
pub struct WoptArgs {
    /// Hermitian operator JSON, same layout as a density matrix.
    #[arg(long)]
    pub op: PathBuf,
    /// Net radius.
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Complex)]
    pub net_kind: KindArg,
    /// Discretize the second factor instead of the first.
    #[arg(long)]
    pub side_b: bool,
    /// Maximize |⟨αβ|A|αβ⟩| instead of ⟨αβ|A|αβ⟩.
    #[arg(long)]
    pub abs: bool,
}

pub fn wopt(a: &WoptArgs, g: &Global) -> Run {
    let delta = positive("delta", a.delta)?;
    let j: DensityJson = read_json(&a.op)?;
    let op = j.to_hermitian()?;
    let side = if a.side_b { Side::B } else { Side::A };
    let dim = if a.side_b { j.n } else { j.m };
    let net = build_net_cached(dim, delta, a.net_kind.into(), g.net_cache.as_deref())?;
    let opts = WoptOptions {
        side,
        mode: if a.abs { WoptMode::Abs } else { WoptMode::Signed },
    };
    let res = wopt_max_with(&op, j.m, j.n, &net, opts)?;
    let mut result = to_value(&res)?;
    result["net_size"] = json!(net.len());
    Ok(plain(result, vec![], 0))
}

#[derive(Args, Debug, Serialize)]
pub struct QsepVerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub cert: PathBuf,
}

/// Accepted certificates exit 0; a rejection proves nothing and exits 2.
pub fn qsep_verify(a: &QsepVerifyArgs) -> Run {
    let inst = read_json::<InstanceJson>(&a.instance)?.to_instance()?;
    let cert = read_json::<CertificateJson>(&a.cert)?.to_certificate()?;
    let v = verify_certificate(&inst, &cert)?;
    let result = json!({
        "accepted": v.accepted,
        "bits": inst.bits(),
        "terms": cert.terms.len(),
        "normalization_ok": v.normalization_ok,
        "distance_ok": v.distance_ok,
        "normalization_defect": RationalJson::from_rational(&v.normalization_defect),
        "distance_sq": RationalJson::from_rational(&v.distance_sq),
        "normalization_defect_approx": to_f64(&v.normalization_defect),
        "distance_approx": to_f64(&v.distance_sq).sqrt(),
    });
    Ok(plain(result, vec![], if v.accepted { 0 } else { 2 }))
}

#[derive(Args, Debug, Serialize)]
pub struct QsepReduceArgs {
    /// Exact-rational density matrix JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Accuracy, as a fraction `a/b` or a decimal.
    #[arg(long)]
    pub delta: String,
    /// Where to write the instance.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exact value of `"a/b"`, `"a"` or a decimal such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational, Failure> {
    let s = s.trim();
    let bad = || Failure::malformed(format!("cannot read `{s}` as a rational number"));
    if s.contains('/') {
        let q = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = Rational::new(num, den);
    Ok(if neg { -q } else { q })
}

pub fn qsep_reduce(a: &QsepReduceArgs) -> Run {
    let delta = parse_rational(&a.delta)?;
    if delta <= Rational::zero() || delta > Rational::one() {
        return Err(Failure::malformed(format!("--delta must lie in (0, 1], got {}", a.delta)));
    }
    let j: RationalMatrixJson = read_json(&a.input)?;
    let rho = j.to_matrix()?;
    let inst = reduce_wmem_to_qsep(j.m, j.n, &rho, &delta)?;
    let ij = InstanceJson::from_instance(&inst);
    let mut artifacts = vec![];
    if let Some(path) = &a.out {
        write_json(path, &ij)?;
        artifacts.push(path.clone());
    }
    let result = json!({
        "bits": inst.bits(),
        "delta_p": ij.delta_p,
        "eps_prime": ij.eps_prime,
        "delta_prime": ij.delta_prime,
        "certificate_terms": (j.m * j.n).pow(2),
    });
    Ok(plain(result, artifacts, 0))
}

#[derive(Args, Debug, Serialize)]
pub struct GadgetArgs {
    /// Graph JSON `{"n", "edges"}`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Clique size asked about.
    #[arg(long)]
    pub clique: usize,
    /// Net radius for the final optimization.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
}

/// Exits 0 when the chain's decision matches clique enumeration, 2 otherwise.
pub fn gadget(a: &GadgetArgs, g: &Global) -> Run {
    let delta = positive("delta", a.delta)?;
    let graph = Graph::read(&a.graph)?;
    let ms = motzkin_straus_value(&graph)?;
    let opts = ChainOptions {
        net_cache: g.net_cache.as_deref(),
    };
    let chain = verify_chain_with(&graph, a.clique, delta, &opts)?;
    let code = if chain.consistent { 0 } else { 2 };
    Ok(plain(json!({ "motzkin_straus": to_value(&ms)?, "chain": to_value(&chain)? }), vec![], code))
}

#[derive(Args, Debug, Serialize)]
pub struct NetArgs {
    /// Dimension of the factor space.
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Projective)]
    pub kind: KindArg,
    /// Random points used to spot-check the covering radius.
    #[arg(long, default_value_t = 1000)]
    pub coverage_samples: usize,
}

pub fn net(a: &NetArgs, g: &Global) -> Run {
    let delta = positive("delta", a.delta)?;
    let net = build_net_cached(a.m, delta, a.kind.into(), g.net_cache.as_deref())?;
    let cov = verify_coverage(&net, a.coverage_samples, g.seed);
    let artifacts = g
        .net_cache
        .iter()
        .map(|d| d.join(sepscan::nets::DeltaNet::cache_file_name(a.m, delta, a.kind.into())))
        .collect();
    let result = json!({
        "size": net.len(),
        "size_bound": net.size_bound(),
        "coverage": to_value(&cov)?,
    });
    Ok(plain(result, artifacts, if cov.passed { 0 } else { 2 }))
}

#[derive(Args, Debug, Serialize)]
pub struct StateArgs {
    /// maxmixed, bell, werner, product, product_mixture or random.
    #[arg(long)]
    pub name: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Werner weight.
    #[arg(long)]
    pub weight: Option<f64>,
    /// Number of product terms.
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn state(a: &StateArgs, g: &Global) -> Run {
    let spec = StateSpec {
        name: a.name.clone(),
        m: a.m,
        n: a.n,
        weight: a.weight,
        seed: g.seed,
        terms: a.terms,
    };
    let rho = state_library(&spec)?;
    let j = DensityJson::from_density(&rho);
    let artifacts = match &a.out {
        Some(path) => {
            write_json(path, &j)?;
            vec![path.clone()]
        }
        None => vec![],
    };
    Ok(plain(json!({ "state": to_value(&j)? }), artifacts, 0))
}
