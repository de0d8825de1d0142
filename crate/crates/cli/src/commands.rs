use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{Context, Result};
use clap::Args;
use hamlow::bounds::{
    emit_comparison_table, exponent_buhrman_estimation, pivot_by_depth, write_plot_csv, write_table_csv, ExponentRow,
    DEFAULT_DEPTHS, DEFAULT_EPSILONS, DEFAULT_KS,
};
use hamlow::density::{certify_density, CertificateDocument, DensityCertificate, GridConfig};
use hamlow::depthd::{energy_zero_state, optimize_depth_d, DepthBound, OptimizerConfig};
use hamlow::filtersim::{
    estimate_energy, exact_filter, explicit_overlap, maximally_entangled, overlap_gamma, prepare_low_energy_on,
    state_fidelity, EnergyEstimate, ExtendedSystem, FilterMode, OutcomeDocument, Preparation,
};
use hamlow::hamiltonian::{parse_hamiltonian, random_pauli_hamiltonian, LocalHamiltonian, WeightDist};
use hamlow::spectrum::diagonalize_with_cap;
use hamlow::OracleCap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{oracle_cap, resolve, Format, InstanceFlags, Mode};
use crate::ValidationFailed;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn envelope(command: &str, config: &impl Serialize, result: Value) -> Result<Value> {
    Ok(json!({
        "tool": "hamlow",
        "version": VERSION,
        "command": command,
        "config": serde_json::to_value(config)?,
        "result": result,
    }))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(value)? + "\n"))
}

/// Resolved instance source.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Instance {
    pub hamiltonian: Option<PathBuf>,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub weights: WeightDist,
    pub oracle_cap: Option<usize>,
}

impl Default for Instance {
    fn default() -> Self {
        Self { hamiltonian: None, n: 8, k: 3, m: 16, seed: 0, weights: WeightDist::Pm1, oracle_cap: None }
    }
}

impl Instance {
    fn load(&self) -> Result<LocalHamiltonian> {
        match &self.hamiltonian {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                parse_hamiltonian(&text).with_context(|| format!("parsing {}", path.display()))
            }
            None => Ok(random_pauli_hamiltonian(self.n, self.k, self.m, self.weights, self.seed)?),
        }
    }

    fn cap(&self) -> Result<OracleCap> {
        oracle_cap(self.oracle_cap)
    }
}

fn instance_summary(h: &LocalHamiltonian) -> Value {
    json!({
        "n": h.n(),
        "terms": h.num_terms(),
        "locality": h.locality(),
        "total_strength": h.total_strength(),
        "local_sum": h.local_sum(),
    })
}

// ---- gen ----

#[derive(Debug, Args, Serialize)]
pub struct GenFlags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Weight distribution: pm1 or uniform.
    #[arg(long)]
    weights: Option<WeightDist>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    weights: WeightDist,
    out: Option<PathBuf>,
}

impl Default for GenConfig {
    fn default() -> Self {
        let i = Instance::default();
        Self { n: i.n, k: i.k, m: i.m, seed: i.seed, weights: i.weights, out: None }
    }
}

pub fn gen(file: Option<&Value>, flags: &GenFlags) -> Result<()> {
    let cfg: GenConfig = resolve(file, "gen", flags)?;
    let h = random_pauli_hamiltonian(cfg.n, cfg.k, cfg.m, cfg.weights, cfg.seed)?;
    emit(cfg.out.as_deref(), &(h.to_json() + "\n"))
}

// ---- shared reference-energy step ----

struct Reference {
    effective: LocalHamiltonian,
    energy: f64,
    bound: Option<DepthBound>,
}

fn reference_energy(h: &LocalHamiltonian, d: usize, restarts: usize, seed: u64, cap: OracleCap) -> Result<Reference> {
    if d == 0 {
        return Ok(Reference { effective: h.clone(), energy: energy_zero_state(h), bound: None });
    }
    let cfg = OptimizerConfig { restarts, seed, oracle_cap: cap, ..OptimizerConfig::default() };
    let bound = optimize_depth_d(h, d, &cfg)?;
    let effective = h.conjugate_by_circuit(&bound.circuit)?;
    Ok(Reference { energy: bound.energy_upper, effective, bound: Some(bound) })
}

fn reference_summary(r: &Reference, d: usize) -> Value {
    json!({
        "d": d,
        "energy": r.energy,
        "method": if d == 0 { "zero-state" } else { "depth-d optimizer" },
        "effective_locality": r.effective.locality(),
        "circuit": r.bound.as_ref().map(|b| b.circuit.to_document()),
    })
}

// ---- certify ----

#[derive(Debug, Args, Serialize)]
pub struct CertifyFlags {
    #[command(flatten)]
    #[serde(flatten)]
    instance: InstanceFlags,
    /// Circuit depth for the reference energy (0 uses <0|H|0>).
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated window widths.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    /// Compare every certificate with the exact count.
    #[arg(long)]
    validate: bool,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyConfig {
    #[serde(flatten)]
    instance: Instance,
    d: usize,
    mu: Vec<f64>,
    validate: bool,
    restarts: usize,
    grid: GridConfig,
    out: Option<PathBuf>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            instance: Instance::default(),
            d: 0,
            mu: vec![0.1, 0.3, 0.5],
            validate: false,
            restarts: 8,
            grid: GridConfig::default(),
            out: None,
        }
    }
}

#[derive(Serialize)]
struct CertificateEntry {
    #[serde(flatten)]
    document: CertificateDocument,
    reference_energy: f64,
    corollary_point: bool,
    corollary_exponent: Option<f64>,
}

impl From<&DensityCertificate> for CertificateEntry {
    fn from(c: &DensityCertificate) -> Self {
        Self {
            document: c.to_document(),
            reference_energy: c.reference_energy,
            corollary_point: c.corollary_point,
            corollary_exponent: c.corollary_exponent,
        }
    }
}

struct CertifyRun {
    result: Value,
    failed: bool,
}

fn run_certify(h: &LocalHamiltonian, cfg: &CertifyConfig) -> Result<CertifyRun> {
    let cap = cfg.instance.cap()?;
    let reference = reference_energy(h, cfg.d, cfg.restarts, cfg.instance.seed, cap)?;
    let mut certs = cfg
        .mu
        .iter()
        .map(|&mu| certify_density(&reference.effective, reference.energy, mu, &cfg.grid))
        .collect::<hamlow::Result<Vec<_>>>()?;

    let mut validation = json!({ "performed": false });
    let mut failed = false;
    if cfg.validate {
        if cap.check(h.n()).is_ok() {
            let oracle = diagonalize_with_cap(h, false, cap)?;
            for c in certs.iter_mut() {
                failed |= !c.validate(&oracle).pass;
            }
            validation = json!({
                "performed": true,
                "all_pass": !failed,
                "ground_energy": oracle.ground_energy(),
            });
        } else {
            validation = json!({
                "performed": false,
                "skipped": format!("n={} exceeds oracle cap {}", h.n(), cap.0),
            });
        }
    }
    let entries: Vec<CertificateEntry> = certs.iter().map(CertificateEntry::from).collect();
    let result = json!({
        "instance": instance_summary(h),
        "reference": reference_summary(&reference, cfg.d),
        "certificates": entries,
        "validation": validation,
    });
    Ok(CertifyRun { result, failed })
}

pub fn certify(file: Option<&Value>, flags: &CertifyFlags) -> Result<()> {
    let cfg: CertifyConfig = resolve(file, "certify", flags)?;
    let h = cfg.instance.load()?;
    let run = run_certify(&h, &cfg)?;
    emit_json(cfg.out.as_deref(), &envelope("certify", &cfg, run.result)?)?;
    if run.failed {
        return Err(ValidationFailed("a certificate exceeded the exact spectral count".into()).into());
    }
    Ok(())
}

// ---- optimize-depth ----

#[derive(Debug, Args, Serialize)]
pub struct OptimizeFlags {
    #[command(flatten)]
    #[serde(flatten)]
    instance: InstanceFlags,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Also diagonalize and report the ground energy.
    #[arg(long)]
    validate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeConfig {
    #[serde(flatten)]
    instance: Instance,
    d: usize,
    restarts: usize,
    max_sweeps: usize,
    validate: bool,
    out: Option<PathBuf>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { instance: Instance::default(), d: 1, restarts: 8, max_sweeps: 200, validate: false, out: None }
    }
}

pub fn optimize(file: Option<&Value>, flags: &OptimizeFlags) -> Result<()> {
    let cfg: OptimizeConfig = resolve(file, "optimize-depth", flags)?;
    let h = cfg.instance.load()?;
    let cap = cfg.instance.cap()?;
    let opt = OptimizerConfig {
        restarts: cfg.restarts,
        max_sweeps: cfg.max_sweeps,
        seed: cfg.instance.seed,
        oracle_cap: cap,
        ..OptimizerConfig::default()
    };
    let bound = optimize_depth_d(&h, cfg.d, &opt)?;
    let e0 = energy_zero_state(&h);
    let mut result = json!({
        "instance": instance_summary(&h),
        "d": bound.d,
        "energy_upper": bound.energy_upper,
        "zero_state_energy": e0,
        "circuit": bound.circuit.to_document(),
        "optimizer_trace": bound.optimizer_trace,
    });
    let mut failed = false;
    if cfg.validate {
        let l0 = diagonalize_with_cap(&h, false, cap)?.ground_energy();
        let ok = bound.energy_upper >= l0 - 1e-9 && bound.energy_upper <= e0 + 1e-9;
        failed = !ok;
        result["validation"] = json!({ "ground_energy": l0, "bracket_holds": ok });
    }
    emit_json(cfg.out.as_deref(), &envelope("optimize-depth", &cfg, result)?)?;
    if failed {
        return Err(ValidationFailed("optimizer energy left [lambda_0, E_0]".into()).into());
    }
    Ok(())
}

// ---- simulate ----

#[derive(Debug, Args, Serialize)]
pub struct SimulateFlags {
    #[command(flatten)]
    #[serde(flatten)]
    instance: InstanceFlags,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Polynomial degree for --mode poly.
    #[arg(long)]
    degree: Option<usize>,
    /// Measurement samples per term.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateConfig {
    #[serde(flatten)]
    instance: Instance,
    epsilon: f64,
    d: usize,
    mode: Mode,
    degree: usize,
    samples: usize,
    restarts: usize,
    out: Option<PathBuf>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            instance: Instance { n: 6, m: 12, ..Instance::default() },
            epsilon: 0.1,
            d: 0,
            mode: Mode::Exact,
            degree: 256,
            samples: 10_000,
            restarts: 8,
            out: None,
        }
    }
}

struct SimulateRun {
    result: Value,
    failed: bool,
}

fn run_simulate(h: &LocalHamiltonian, cfg: &SimulateConfig) -> Result<SimulateRun> {
    anyhow::ensure!(cfg.epsilon > 0.0, "epsilon must be positive, got {}", cfg.epsilon);
    let cap = cfg.instance.cap()?;
    let reference = reference_energy(h, cfg.d, cfg.restarts, cfg.instance.seed, cap)?;
    let sys = ExtendedSystem::with_cap(h, cap)?;
    let mode = match cfg.mode {
        Mode::Exact => FilterMode::Exact,
        Mode::Poly => FilterMode::Poly { degree: cfg.degree },
    };
    let prep: Preparation = prepare_low_energy_on(&sys, cfg.epsilon, reference.energy, mode)?;
    let est: EnergyEstimate = estimate_energy(&prep, h, cfg.samples, cfg.instance.seed)?;
    let outcome = OutcomeDocument::new(&prep, &est)?;

    let l0 = sys.spectral().ground_energy();
    let phi = maximally_entangled(h.n())?;
    let probe = prep.x - prep.y;
    let explicit = explicit_overlap(&sys, &phi, probe)?;
    let counted = overlap_gamma(&sys, probe);
    let slack = 3.0 * est.stderr;
    let energy_ok = prep.outcome.energy <= prep.x + 1e-9;
    let estimate_ok = est.estimate >= l0 - 1e-9 - slack && est.estimate <= prep.x + 1e-9 + slack;

    let mut result = json!({
        "instance": instance_summary(h),
        "reference": reference_summary(&reference, cfg.d),
        "outcome": outcome,
        "ground_energy": l0,
        "exact_energy_of_state": est.exact,
        "within_three_sigma": est.within_three_sigma,
        "overlap_check": {
            "threshold": probe,
            "count_over_dim": counted,
            "explicit": explicit,
            "abs_diff": (explicit - counted).abs(),
        },
        "checks": { "energy_below_x": energy_ok, "estimate_in_window": estimate_ok },
    });
    if let FilterMode::Poly { .. } = mode {
        let midpoint = exact_filter(&sys, &phi, prep.x - 0.5 * prep.y)?;
        result["fidelity_to_exact"] = json!(state_fidelity(&midpoint.post_state, &prep.outcome.post_state));
    }
    // Only the exact projector carries the energy guarantee.
    let failed = mode == FilterMode::Exact && (!energy_ok || (explicit - counted).abs() > 1e-12);
    Ok(SimulateRun { result, failed })
}

pub fn simulate(file: Option<&Value>, flags: &SimulateFlags) -> Result<()> {
    let cfg: SimulateConfig = resolve(file, "simulate", flags)?;
    let h = cfg.instance.load()?;
    let run = run_simulate(&h, &cfg)?;
    emit_json(cfg.out.as_deref(), &envelope("simulate", &cfg, run.result)?)?;
    if run.failed {
        return Err(ValidationFailed("filtered energy exceeded the target".into()).into());
    }
    Ok(())
}

// ---- table ----

#[derive(Debug, Args, Serialize)]
pub struct TableFlags {
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    epsilon: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<u32>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// One row per (k, epsilon, d) instead of one per (k, epsilon).
    #[arg(long)]
    long: bool,
    /// Also write exponent-versus-epsilon series (CSV) for each k.
    #[arg(long)]
    plot_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TableConfig {
    k: Vec<u32>,
    epsilon: Vec<f64>,
    d: Vec<u32>,
    format: Format,
    long: bool,
    plot_out: Option<PathBuf>,
    out: Option<PathBuf>,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_KS.to_vec(),
            epsilon: DEFAULT_EPSILONS.to_vec(),
            d: DEFAULT_DEPTHS.to_vec(),
            format: Format::Csv,
            long: false,
            plot_out: None,
            out: None,
        }
    }
}

fn wide_rows(rows: &[ExponentRow]) -> Result<Vec<serde_json::Map<String, Value>>> {
    pivot_by_depth(rows)
        .into_iter()
        .map(|p| {
            let mut obj = serde_json::Map::new();
            obj.insert("k".into(), json!(p.k));
            obj.insert("epsilon".into(), json!(p.epsilon));
            obj.insert("c_buhrman".into(), json!(p.c_buhrman));
            obj.insert("c_buhrman_est".into(), json!(exponent_buhrman_estimation(p.k, p.epsilon)?));
            for (d, c) in p.c_ours_by_depth {
                obj.insert(format!("c_ours_d{d}"), json!(c));
            }
            Ok(obj)
        })
        .collect()
}

fn wide_csv(rows: &[serde_json::Map<String, Value>]) -> String {
    let Some(first) = rows.first() else {
        return "k,epsilon,c_buhrman,c_buhrman_est\n".into();
    };
    let keys: Vec<&String> = first.keys().collect();
    let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",") + "\n";
    for r in rows {
        let cells: Vec<String> = keys
            .iter()
            .map(|k| match &r[k.as_str()] {
                Value::Number(n) if n.is_f64() && k.as_str() != "epsilon" => format!("{:.10}", n.as_f64().unwrap()),
                v => v.to_string(),
            })
            .collect();
        out += &(cells.join(",") + "\n");
    }
    out
}

pub fn table(file: Option<&Value>, flags: &TableFlags) -> Result<()> {
    let cfg: TableConfig = resolve(file, "table", flags)?;
    let rows = emit_comparison_table(&cfg.k, &cfg.epsilon, &cfg.d)?;
    let text = match (cfg.format, cfg.long) {
        (Format::Csv, true) => {
            let mut buf = Vec::new();
            write_table_csv(&rows, &mut buf)?;
            String::from_utf8(buf)?
        }
        (Format::Json, true) => serde_json::to_string_pretty(&rows)? + "\n",
        (Format::Csv, false) => wide_csv(&wide_rows(&rows)?),
        (Format::Json, false) => serde_json::to_string_pretty(&wide_rows(&rows)?)? + "\n",
    };
    emit(cfg.out.as_deref(), &text)?;
    if let Some(path) = &cfg.plot_out {
        let mut buf = Vec::new();
        for (i, &k) in cfg.k.iter().enumerate() {
            let mut part = Vec::new();
            write_plot_csv(k, &cfg.epsilon, &cfg.d, &mut part)?;
            let text = String::from_utf8(part)?;
            // Keep a single header line across k blocks.
            let body = if i == 0 { text.as_str() } else { text.split_once('\n').map_or("", |s| s.1) };
            buf.extend_from_slice(body.as_bytes());
        }
        std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

// ---- sweep ----

#[derive(Debug, Args, Serialize)]
pub struct SweepFlags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Base seed; instance `i` uses `seed + i`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    weights: Option<WeightDist>,
    /// Number of random instances.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    /// Adds an exact-mode simulation per instance.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    validate: bool,
    #[arg(long)]
    oracle_cap: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    weights: WeightDist,
    count: usize,
    mu: Vec<f64>,
    epsilon: Option<f64>,
    d: usize,
    validate: bool,
    oracle_cap: Option<usize>,
    workers: usize,
    out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let i = Instance::default();
        Self {
            n: i.n,
            k: i.k,
            m: i.m,
            seed: 0,
            weights: i.weights,
            count: 10,
            mu: vec![0.1, 0.3, 0.5],
            epsilon: None,
            d: 0,
            validate: false,
            oracle_cap: None,
            workers: 1,
            out: None,
        }
    }
}

fn sweep_record(cfg: &SweepConfig, id: usize) -> Result<(Value, bool)> {
    let instance = Instance {
        hamiltonian: None,
        n: cfg.n,
        k: cfg.k,
        m: cfg.m,
        seed: cfg.seed + id as u64,
        weights: cfg.weights,
        oracle_cap: cfg.oracle_cap,
    };
    let h = instance.load()?;
    let cert_cfg = CertifyConfig {
        instance: instance.clone(),
        d: cfg.d,
        mu: cfg.mu.clone(),
        validate: cfg.validate,
        ..CertifyConfig::default()
    };
    let cert = run_certify(&h, &cert_cfg)?;
    let mut failed = cert.failed;
    let mut record = json!({ "id": id, "seed": instance.seed, "certify": cert.result });
    if let Some(epsilon) = cfg.epsilon {
        let sim_cfg = SimulateConfig { instance, epsilon, d: cfg.d, ..SimulateConfig::default() };
        let sim = run_simulate(&h, &sim_cfg)?;
        failed |= sim.failed;
        record["simulate"] = sim.result;
    }
    record["failed"] = json!(failed);
    Ok((record, failed))
}

pub fn sweep(file: Option<&Value>, flags: &SweepFlags) -> Result<()> {
    let cfg: SweepConfig = resolve(file, "sweep", flags)?;
    anyhow::ensure!(cfg.count >= 1, "count must be >= 1");
    let sink: Box<dyn Write + Send> = match &cfg.out {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout()),
    };
    let sink = Mutex::new(sink);
    {
        let header = envelope("sweep", &cfg, json!({ "instances": cfg.count }))?;
        let mut w = sink.lock().unwrap();
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers.max(1)).build()?;
    let failures: Vec<bool> = pool.install(|| {
        (0..cfg.count)
            .into_par_iter()
            .map(|id| -> Result<bool> {
                let (record, failed) = sweep_record(&cfg, id)?;
                let mut w = sink.lock().unwrap();
                writeln!(w, "{}", serde_json::to_string(&record)?)?;
                Ok(failed)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    sink.into_inner().unwrap().flush()?;
    let bad = failures.iter().filter(|f| **f).count();
    if bad > 0 {
        return Err(ValidationFailed(format!("{bad} of {} instances failed validation", cfg.count)).into());
    }
    Ok(())
}
