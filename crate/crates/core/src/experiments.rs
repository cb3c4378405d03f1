//! Configuration-driven scenario runner.
//!
//! A [`ScenarioConfig`] fully determines a run: graphs, frequencies, initial
//! state, perturbation and integration grid. Randomness flows from a single
//! master seed split into independent streams (see [`SeedStreams`]), so
//! variants differing only in their perturbation share graphs and initial
//! states.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::composition::{
    compose_state, order_parameter, perturb, random_composed, random_phases, simulate_composed, twisted_state,
    ComposedRun, OrderParameterSeries,
};
use crate::dynamics::{assemble_multiplex, FrequencyVector, MultiplexSystem, PhaseState, Scheme};
use crate::error::{Error, Result};
use crate::graph::{
    derive_seed, gen_circulant, gen_complete, gen_erdos_renyi, gen_ring, spectrum_sym, CouplingMatrix, SeededRng,
};
use crate::stability::{jacobian_direct, jacobian_single_layer, spectrum_sumset, stability_of_composed, ComposedStability};

pub const COMPOSITION_TOLERANCE: f64 = 1e-8;
pub const FACTORIZATION_TOLERANCE: f64 = 1e-10;
pub const SUMSET_TOLERANCE: f64 = 1e-8;
pub const RANDOM_FACTORIZATION_PAIRS: usize = 1000;
/// Largest `N·M` for which `verify_propositions` runs the dense sumset check.
pub const SUMSET_MAX_DIM: usize = 2500;
/// Largest `N·M` for which `verify_propositions` sweeps the twisted grid.
pub const TWISTED_GRID_MAX_DIM: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntraGraph {
    ErdosRenyi { p: f64 },
    Ring,
    Circulant { half_width: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterGraph {
    Ring,
    Complete,
}

/// Natural frequencies. `uniform` and `per_layer` both live on the
/// inter-layer system, so node `(i, l)` gets `values[l]` (or `value`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Frequencies {
    Zero,
    Uniform { value: f64 },
    PerLayer { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `psi_0`, `phi_0` drawn from `U(-π, π)` and composed.
    RandomComposed,
    Twisted { p_intra: i64, p_inter: i64 },
}

/// Kick of amplitude `eta · U(-π, π)` per entry, followed by wrapping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    None,
    Inter { eta: f64 },
    Intra { eta: f64 },
    Both { eta: f64 },
}

impl Perturbation {
    fn eta(&self) -> Option<f64> {
        match *self {
            Perturbation::None => None,
            Perturbation::Inter { eta } | Perturbation::Intra { eta } | Perturbation::Both { eta } => Some(eta),
        }
    }

    fn hits_inter(&self) -> bool {
        matches!(self, Perturbation::Inter { .. } | Perturbation::Both { .. })
    }

    fn hits_intra(&self) -> bool {
        matches!(self, Perturbation::Intra { .. } | Perturbation::Both { .. })
    }
}

fn default_scheme() -> Scheme {
    Scheme::Euler
}

/// One simulation, as read from or written to JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub eps_intra: f64,
    pub eps_inter: f64,
    pub intra_graph: IntraGraph,
    pub inter_graph: InterGraph,
    pub frequencies: Frequencies,
    pub init: InitialCondition,
    pub perturbation: Perturbation,
    /// Master seed; see [`SeedStreams`].
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
}

/// Child seeds split from the master seed with [`derive_seed`]:
/// stream 1 for graphs, 2 for initial phases, 3 and 4 for the inter- and
/// intra-layer perturbations, 5 for the random pairs drawn by
/// [`verify_propositions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedStreams {
    pub master: u64,
    pub graph: u64,
    pub init: u64,
    pub perturb_inter: u64,
    pub perturb_intra: u64,
    pub verify: u64,
}

impl SeedStreams {
    pub fn new(master: u64) -> Self {
        Self {
            master,
            graph: derive_seed(master, 1),
            init: derive_seed(master, 2),
            perturb_inter: derive_seed(master, 3),
            perturb_intra: derive_seed(master, 4),
            verify: derive_seed(master, 5),
        }
    }
}

fn config_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

fn finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(config_err(field, format!("must be finite, got {x}")))
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    finite(field, x)?;
    if x > 0.0 {
        Ok(())
    } else {
        Err(config_err(field, format!("must be > 0, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn seeds(&self) -> SeedStreams {
        SeedStreams::new(self.seed)
    }

    /// `round(t_end / dt)`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Checks every field; the error names the first offending one.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(config_err("name", "must not be empty"));
        }
        if self.n == 0 {
            return Err(config_err("N", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(config_err("M", "must be at least 1"));
        }
        self.n.checked_mul(self.m).ok_or_else(|| config_err("N", "N·M overflows"))?;
        finite("eps_intra", self.eps_intra)?;
        finite("eps_inter", self.eps_inter)?;

        match self.intra_graph {
            IntraGraph::ErdosRenyi { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(config_err("intra_graph.p", format!("must lie in [0, 1], got {p}")));
                }
            }
            IntraGraph::Ring => {
                if self.n < 2 {
                    return Err(config_err("intra_graph", "ring needs N >= 2"));
                }
            }
            IntraGraph::Circulant { half_width } => {
                if self.n < 3 || half_width == 0 || half_width > (self.n - 1) / 2 {
                    return Err(config_err(
                        "intra_graph.half_width",
                        format!("must lie in [1, (N-1)/2] with N >= 3, got {half_width} for N = {}", self.n),
                    ));
                }
            }
        }
        if self.inter_graph == InterGraph::Ring && self.m < 2 {
            return Err(config_err("inter_graph", "ring needs M >= 2"));
        }

        match &self.frequencies {
            Frequencies::Zero => {}
            Frequencies::Uniform { value } => finite("frequencies.value", *value)?,
            Frequencies::PerLayer { values } => {
                if values.len() != self.m {
                    return Err(config_err(
                        "frequencies.values",
                        format!("expected M = {} entries, got {}", self.m, values.len()),
                    ));
                }
                for &v in values {
                    finite("frequencies.values", v)?;
                }
            }
        }

        if let Some(eta) = self.perturbation.eta() {
            finite("perturbation.eta", eta)?;
            if eta < 0.0 {
                return Err(config_err("perturbation.eta", format!("must be >= 0, got {eta}")));
            }
        }

        positive("dt", self.dt)?;
        positive("t_end", self.t_end)?;
        if self.n_steps() == 0 {
            return Err(config_err("t_end", "shorter than half a time step"));
        }
        if self.record_every == 0 {
            return Err(config_err("record_every", "must be at least 1"));
        }
        Ok(())
    }
}

fn table_row(name: &str, n: usize, m: usize, eps_intra: f64, eps_inter: f64, t_end: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        n,
        m,
        eps_intra,
        eps_inter,
        intra_graph: IntraGraph::ErdosRenyi { p: 0.25 },
        inter_graph: InterGraph::Ring,
        frequencies: Frequencies::Zero,
        init: InitialCondition::RandomComposed,
        perturbation: Perturbation::None,
        seed: 1,
        dt: 0.001,
        t_end,
        record_every: 100,
        scheme: Scheme::Euler,
    }
}

pub const FIG5_ETA: f64 = 0.025;

/// The eight reference scenarios. All use master seed 1, `dt = 0.001`, an
/// Erdős–Rényi (`p = 0.25`) intra-layer graph unless stated otherwise, and a
/// ring between layers.
///
/// | name  | N   | M  | eps_intra | eps_inter | notes |
/// |-------|-----|----|-----------|-----------|-------|
/// | fig2  | 20  | 3  | 1         | 0.5       | `t_end = 30` |
/// | fig3a | 100 | 5  | 1         | 3         | uniform frequency 1, `t_end = 15` |
/// | fig3b | 100 | 5  | 1         | 20        | layer frequencies −40, −20, 0, 20, 40 |
/// | fig4  | 100 | 10 | 0.75      | 10        | layer frequencies evenly spaced in [−10, 10], `t_end = 50` |
/// | fig5a–d | 100 | 3 | 0.1      | 1         | circulant intra graph (20 neighbours per side), twisted `p_intra = 2`, `p_inter = 1`, `t_end = 12` |
///
/// fig5a is unperturbed; b, c and d perturb the inter-layer, intra-layer and
/// both states with `eta = 0.025`.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    let fig2 = table_row("fig2", 20, 3, 1.0, 0.5, 30.0);

    let mut fig3a = table_row("fig3a", 100, 5, 1.0, 3.0, 15.0);
    fig3a.frequencies = Frequencies::Uniform { value: 1.0 };

    let mut fig3b = table_row("fig3b", 100, 5, 1.0, 20.0, 15.0);
    fig3b.frequencies = Frequencies::PerLayer {
        values: vec![-40.0, -20.0, 0.0, 20.0, 40.0],
    };

    let mut fig4 = table_row("fig4", 100, 10, 0.75, 10.0, 50.0);
    fig4.frequencies = Frequencies::PerLayer {
        values: (0..10).map(|l| -10.0 + 20.0 * l as f64 / 9.0).collect(),
    };

    let fig5 = |suffix: &str, perturbation: Perturbation| {
        let mut c = table_row(&format!("fig5{suffix}"), 100, 3, 0.10, 1.0, 12.0);
        c.intra_graph = IntraGraph::Circulant { half_width: 20 };
        c.init = InitialCondition::Twisted { p_intra: 2, p_inter: 1 };
        c.perturbation = perturbation;
        c
    };

    vec![
        fig2,
        fig3a,
        fig3b,
        fig4,
        fig5("a", Perturbation::None),
        fig5("b", Perturbation::Inter { eta: FIG5_ETA }),
        fig5("c", Perturbation::Intra { eta: FIG5_ETA }),
        fig5("d", Perturbation::Both { eta: FIG5_ETA }),
    ]
}

pub fn find_scenario(name: &str) -> Result<ScenarioConfig> {
    builtin_scenarios()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.into()))
}

/// A builtin scenario name, or else a path to a JSON config.
pub fn load_scenario(target: &str) -> Result<ScenarioConfig> {
    if let Ok(cfg) = find_scenario(target) {
        return Ok(cfg);
    }
    let path = Path::new(target);
    if path.is_file() {
        ScenarioConfig::from_path(path)
    } else {
        Err(Error::UnknownScenario(target.into()))
    }
}

/// Intra- and inter-layer adjacency matrices (unit weights).
pub fn build_graphs(cfg: &ScenarioConfig) -> Result<(CouplingMatrix<f64>, CouplingMatrix<f64>)> {
    cfg.validate()?;
    let mut rng = SeededRng::new(cfg.seeds().graph);
    let intra = match cfg.intra_graph {
        IntraGraph::ErdosRenyi { p } => gen_erdos_renyi(cfg.n, p, &mut rng)?,
        IntraGraph::Ring => gen_ring(cfg.n)?,
        IntraGraph::Circulant { half_width } => gen_circulant(cfg.n, half_width)?,
    };
    let inter = match cfg.inter_graph {
        InterGraph::Ring => gen_ring(cfg.m)?,
        InterGraph::Complete => gen_complete(cfg.m)?,
    };
    Ok((intra, inter))
}

pub fn build_system(cfg: &ScenarioConfig) -> Result<MultiplexSystem<f64>> {
    let (intra, inter) = build_graphs(cfg)?;
    let omega_inter = match &cfg.frequencies {
        Frequencies::Zero => FrequencyVector::zeros(cfg.m),
        Frequencies::Uniform { value } => FrequencyVector::uniform(cfg.m, *value),
        Frequencies::PerLayer { values } => FrequencyVector(values.clone()),
    };
    MultiplexSystem::new(
        intra,
        inter,
        cfg.eps_intra,
        cfg.eps_inter,
        FrequencyVector::zeros(cfg.n),
        omega_inter,
    )
}

/// Unperturbed subsystem states `(psi_0, phi_0)`.
pub fn base_state(cfg: &ScenarioConfig) -> Result<(PhaseState<f64>, PhaseState<f64>)> {
    cfg.validate()?;
    Ok(match cfg.init {
        InitialCondition::RandomComposed => {
            let c = random_composed(cfg.n, cfg.m, &mut SeededRng::new(cfg.seeds().init));
            (c.psi, c.phi)
        }
        InitialCondition::Twisted { p_intra, p_inter } => (twisted_state(cfg.n, p_intra), twisted_state(cfg.m, p_inter)),
    })
}

/// Subsystem states the run starts from: the base state with the configured
/// perturbation applied. Each layer system has its own stream, so `both`
/// applies exactly the kicks of `inter` and `intra`.
pub fn initial_state(cfg: &ScenarioConfig) -> Result<(PhaseState<f64>, PhaseState<f64>)> {
    let (mut psi, mut phi) = base_state(cfg)?;
    if let Some(eta) = cfg.perturbation.eta() {
        let seeds = cfg.seeds();
        if cfg.perturbation.hits_inter() {
            phi = perturb(&phi, eta, &mut SeededRng::new(seeds.perturb_inter))?;
        }
        if cfg.perturbation.hits_intra() {
            psi = perturb(&psi, eta, &mut SeededRng::new(seeds.perturb_intra))?;
        }
    }
    Ok((psi, phi))
}

/// A finished scenario run kept in memory.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub system: MultiplexSystem<f64>,
    pub psi0: PhaseState<f64>,
    pub phi0: PhaseState<f64>,
    pub run: ComposedRun<f64>,
    pub series: OrderParameterSeries<f64>,
}

pub fn simulate_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    let system = build_system(cfg)?;
    let (psi0, phi0) = initial_state(cfg)?;
    let mut run = simulate_composed(&system, &psi0, &phi0, cfg.dt, cfg.n_steps(), cfg.record_every, cfg.scheme)?;
    for tr in [&mut run.full, &mut run.intra, &mut run.inter] {
        tr.metadata.scenario = cfg.name.clone();
        tr.metadata.seed = Some(cfg.seed);
    }
    let series = run.order_parameters()?;
    Ok(ScenarioRun {
        config: cfg.clone(),
        system,
        psi0,
        phi0,
        run,
        series,
    })
}

/// Stability of the unperturbed twisted state, or `None` for random starts.
pub fn twisted_stability(cfg: &ScenarioConfig, system: &MultiplexSystem<f64>) -> Result<Option<ComposedStability<f64>>> {
    match cfg.init {
        InitialCondition::RandomComposed => Ok(None),
        InitialCondition::Twisted { .. } => {
            let (psi, phi) = base_state(cfg)?;
            stability_of_composed(system, &psi, &phi, None).map(Some)
        }
    }
}

/// Paths of everything `run_scenario` wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunArtifacts {
    pub directory: PathBuf,
    pub trajectory: PathBuf,
    pub order_parameters: PathBuf,
    /// Present for twisted initial conditions, whose base state is an
    /// equilibrium.
    pub spectrum: Option<PathBuf>,
    pub config: PathBuf,
    pub metadata: PathBuf,
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut tmp_name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        fill(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Runs the scenario and writes its artifacts under `out_dir/<name>/`:
/// `trajectory.csv`, `order_parameter.csv`, `config.json`, `metadata.json`
/// and, for twisted starts, `spectrum.json`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunArtifacts> {
    let result = simulate_scenario(cfg)?;
    let stability = twisted_stability(cfg, &result.system)?;

    let dir = out_dir.join(&cfg.name);
    fs::create_dir_all(&dir)?;
    let artifacts = RunArtifacts {
        trajectory: dir.join("trajectory.csv"),
        order_parameters: dir.join("order_parameter.csv"),
        spectrum: stability.as_ref().map(|_| dir.join("spectrum.json")),
        config: dir.join("config.json"),
        metadata: dir.join("metadata.json"),
        directory: dir,
    };

    write_atomic(&artifacts.trajectory, |w| result.run.full.write_csv(w))?;
    write_atomic(&artifacts.order_parameters, |w| result.series.write_csv(w))?;
    write_atomic(&artifacts.config, |w| {
        writeln!(w, "{}", cfg.to_json()?)?;
        Ok(())
    })?;
    if let (Some(path), Some(st)) = (&artifacts.spectrum, &stability) {
        write_atomic(path, |w| {
            writeln!(w, "{}", st.composed.to_json()?)?;
            Ok(())
        })?;
    }

    let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
    let mut meta = json!({
        "scenario": cfg.name,
        "seed": cfg.seed,
        "seeds": cfg.seeds(),
        "dt": cfg.dt,
        "N": cfg.n,
        "M": cfg.m,
        "eps_intra": cfg.eps_intra,
        "eps_inter": cfg.eps_inter,
        "n_steps": cfg.n_steps(),
        "scheme": cfg.scheme,
        "max_composition_residual": result.run.max_residual,
        "max_factorization_residual": result.series.max_factorization_residual(),
        "final_r_full": last(&result.series.r_full),
        "final_r_intra": last(&result.series.r_intra),
        "final_r_inter": last(&result.series.r_inter),
        "version": env!("CARGO_PKG_VERSION"),
    });
    if let Some(st) = &stability {
        meta["stability"] = json!({
            "intra": st.intra.classification,
            "inter": st.inter.classification,
            "composed": st.composed.classification,
            "iff_holds": st.iff_holds,
        });
    }
    write_atomic(&artifacts.metadata, |w| {
        writeln!(w, "{}", serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    })?;
    Ok(artifacts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    fn threshold(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            status: if measured < tolerance { CheckStatus::Pass } else { CheckStatus::Fail },
            measured: Some(measured),
            tolerance: Some(tolerance),
            detail,
        }
    }

    fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Skipped,
            measured: None,
            tolerance: None,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Max `|R(ψ ⊕ φ) − R(ψ)·R(φ)|` over `pairs` random `(ψ, φ)` draws.
pub fn random_factorization_residual(n: usize, m: usize, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = SeededRng::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let psi = random_phases::<f64>(n, &mut rng);
        let phi = random_phases::<f64>(m, &mut rng);
        let direct = order_parameter(&compose_state(&psi, &phi))?;
        let product = order_parameter(&psi)? * order_parameter(&phi)?;
        worst = worst.max((direct - product).abs());
    }
    Ok(worst)
}

/// Max gap between the sorted spectrum of the assembled Jacobian at
/// `psi ⊕ phi` and the sorted sumset of the subsystem spectra.
pub fn sumset_residual(sys: &MultiplexSystem<f64>, psi: &PhaseState<f64>, phi: &PhaseState<f64>) -> Result<f64> {
    let (weights, _) = assemble_multiplex(sys)?;
    let full = spectrum_sym(&jacobian_direct(&weights, &compose_state(psi, phi))?)?;
    let intra = spectrum_sym(&jacobian_single_layer(&sys.intra_weights(), psi)?)?;
    let inter = spectrum_sym(&jacobian_single_layer(&sys.inter_weights(), phi)?)?;
    let sumset = spectrum_sumset(&intra, &inter);
    Ok(full.iter().zip(&sumset).fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
}

/// Outcome of the twisted-state grid sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TwistedGridSummary {
    pub cells: usize,
    pub degenerate: Vec<(i64, i64)>,
    pub violations: Vec<(i64, i64)>,
}

/// Classifies every twisted pair `p_intra ∈ 0..=N/2`, `p_inter ∈ 0..=M/2` on
/// `sys` and records where the stable-iff-both-stable relation fails.
pub fn twisted_grid(sys: &MultiplexSystem<f64>) -> Result<TwistedGridSummary> {
    let (n, m) = (sys.n(), sys.m());
    let mut summary = TwistedGridSummary::default();
    for p_intra in 0..=(n / 2) as i64 {
        let psi = twisted_state(n, p_intra);
        for p_inter in 0..=(m / 2) as i64 {
            let phi = twisted_state(m, p_inter);
            let st = stability_of_composed(sys, &psi, &phi, None)?;
            summary.cells += 1;
            if st.degenerate {
                summary.degenerate.push((p_intra, p_inter));
            } else if !st.iff_holds {
                summary.violations.push((p_intra, p_inter));
            }
        }
    }
    Ok(summary)
}

/// Runs the composition, factorization, sumset and stability checks for one
/// scenario and reports measured residuals against their tolerances.
pub fn verify_propositions(cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let result = simulate_scenario(cfg)?;
    let nm = cfg.n * cfg.m;
    let mut checks = vec![
        Check::threshold(
            "composition_residual",
            result.run.max_residual,
            COMPOSITION_TOLERANCE,
            format!("max |theta - (psi + phi)| over {} steps", cfg.n_steps()),
        ),
        Check::threshold(
            "factorization_run",
            result.series.max_factorization_residual(),
            FACTORIZATION_TOLERANCE,
            format!("max |R_full - R_intra*R_inter| over {} samples", result.series.times.len()),
        ),
        Check::threshold(
            "factorization_random",
            random_factorization_residual(cfg.n, cfg.m, RANDOM_FACTORIZATION_PAIRS, cfg.seeds().verify)?,
            FACTORIZATION_TOLERANCE,
            format!("{RANDOM_FACTORIZATION_PAIRS} random (psi, phi) pairs"),
        ),
    ];

    checks.push(if nm <= SUMSET_MAX_DIM {
        Check::threshold(
            "sumset",
            sumset_residual(&result.system, &result.psi0, &result.phi0)?,
            SUMSET_TOLERANCE,
            "assembled Jacobian spectrum vs sumset at the initial state".into(),
        )
    } else {
        Check::skipped("sumset", format!("N*M = {nm} exceeds {SUMSET_MAX_DIM}"))
    });

    let lattice = matches!(cfg.intra_graph, IntraGraph::Ring | IntraGraph::Circulant { .. });
    let rotating_frame = !matches!(cfg.frequencies, Frequencies::PerLayer { .. });
    checks.push(if !lattice {
        Check::skipped("stability_iff", "twisted states need a ring or circulant intra-layer graph")
    } else if !rotating_frame {
        Check::skipped("stability_iff", "twisted states are not equilibria under distinct layer frequencies")
    } else if nm > TWISTED_GRID_MAX_DIM {
        Check::skipped("stability_iff", format!("N*M = {nm} exceeds {TWISTED_GRID_MAX_DIM}"))
    } else {
        let grid = twisted_grid(&result.system)?;
        Check {
            name: "stability_iff".into(),
            status: if grid.violations.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail },
            measured: Some(grid.violations.len() as f64),
            tolerance: Some(0.0),
            detail: format!(
                "{} cells, {} degenerate {:?}, violations {:?}",
                grid.cells,
                grid.degenerate.len(),
                grid.degenerate,
                grid.violations
            ),
        }
    });

    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(VerificationReport {
        scenario: cfg.name.clone(),
        passed,
        checks,
    })
}
