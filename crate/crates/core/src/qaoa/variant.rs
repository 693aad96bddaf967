use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bmbcd::{bm_bcd_solve, BmBcdConfig, BmBcdResult};
use crate::constellation::ConstellationSpec;
use crate::error::{Error, Result};
use crate::hubo::{build_cost_hamiltonian, gray_map_bits_to_pam, scale_hamiltonian, PauliHamiltonian, QubitLayout};
use crate::mimo::{complex_from_real, objective_f, DetectionInstance};
use crate::rng::{label, RngStream, StreamRng};
use crate::sim::{
    noisy_execute, sample_distribution, Counts, InitKind, MixerKind, NoiseParams, QaoaCircuit,
    StateVector,
};

use super::schedule::{flat_schedule, linear_ramp, Schedule, ScheduleKind};
use super::warm_start::WarmStart;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "StdQAOA")]
    StdQaoa,
    #[serde(rename = "WS-RX")]
    WsRx,
    #[serde(rename = "WS-WS")]
    WsWs,
    #[serde(rename = "LR-QAOA")]
    LrQaoa,
    #[serde(rename = "WSLR-RX")]
    WslrRx,
    #[serde(rename = "WSLR-W")]
    WslrW,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::StdQaoa,
        Variant::WsRx,
        Variant::WsWs,
        Variant::LrQaoa,
        Variant::WslrRx,
        Variant::WslrW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::StdQaoa => "StdQAOA",
            Variant::WsRx => "WS-RX",
            Variant::WsWs => "WS-WS",
            Variant::LrQaoa => "LR-QAOA",
            Variant::WslrRx => "WSLR-RX",
            Variant::WslrW => "WSLR-W",
        }
    }

    /// Lower-case command-line key.
    pub fn key(self) -> &'static str {
        match self {
            Variant::StdQaoa => "qaoa",
            Variant::WsRx => "ws-rx",
            Variant::WsWs => "ws-ws",
            Variant::LrQaoa => "lr-qaoa",
            Variant::WslrRx => "wslr-rx",
            Variant::WslrW => "wslr-w",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        let k = key.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|v| v.key() == k || v.name().to_ascii_lowercase() == k)
    }

    pub fn warm_init(self) -> bool {
        !matches!(self, Variant::StdQaoa | Variant::LrQaoa)
    }

    pub fn warm_mixer(self) -> bool {
        matches!(self, Variant::WsWs | Variant::WslrW)
    }

    pub fn schedule_kind(self) -> ScheduleKind {
        match self {
            Variant::StdQaoa | Variant::WsRx | Variant::WsWs => ScheduleKind::Flat,
            _ => ScheduleKind::LinearRamp,
        }
    }

    /// The variant with the same initial state and schedule but the other
    /// mixer, if one exists.
    pub fn mixer_counterpart(self) -> Option<Self> {
        match self {
            Variant::WsRx => Some(Variant::WsWs),
            Variant::WsWs => Some(Variant::WsRx),
            Variant::WslrRx => Some(Variant::WslrW),
            Variant::WslrW => Some(Variant::WslrRx),
            _ => None,
        }
    }
}

/// Angle choice for flat-schedule variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatParams {
    /// Every `(γ, β)` on a `resolution × resolution` grid over `[0, max]²`
    /// (endpoints included); the best sampled energy is kept.
    Grid { resolution: usize, max: f64 },
    Fixed { gamma: f64, beta: f64 },
}

impl FlatParams {
    pub fn points(&self) -> Vec<(f64, f64)> {
        match *self {
            FlatParams::Fixed { gamma, beta } => vec![(gamma, beta)],
            FlatParams::Grid { resolution, max } => {
                let axis = grid_axis(resolution, max);
                axis.iter()
                    .flat_map(|&g| axis.iter().map(move |&b| (g, b)))
                    .collect()
            }
        }
    }
}

/// `resolution` evenly spaced points on `[0, max]`.
pub(crate) fn grid_axis(resolution: usize, max: f64) -> Vec<f64> {
    if resolution <= 1 {
        return vec![0.0];
    }
    (0..resolution)
        .map(|i| max * i as f64 / (resolution - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantConfig {
    pub variant: Variant,
    pub p: usize,
    /// Shots per candidate schedule. Zero selects the exact argmax of the
    /// outcome distribution instead of sampling.
    pub shots: usize,
    /// Slopes tried by ramp variants.
    pub deltas: Vec<f64>,
    pub temperature: f64,
    pub flat: FlatParams,
    /// Density-matrix execution with these parameters when set.
    pub noise: Option<NoiseParams>,
    /// Keep every candidate's shot histogram in the record.
    #[serde(default)]
    pub record_histograms: bool,
}

impl VariantConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            p: 5,
            shots: 1024,
            deltas: vec![0.25, 0.75],
            temperature: 0.2,
            flat: FlatParams::Grid { resolution: 9, max: 3.0 },
            noise: None,
            record_histograms: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Parameter("p must be at least 1".into()));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Parameter(format!("temperature {} must be positive", self.temperature)));
        }
        match self.variant.schedule_kind() {
            ScheduleKind::LinearRamp => {
                if self.deltas.is_empty() {
                    return Err(Error::Parameter("Δ-set is empty".into()));
                }
                if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
                    return Err(Error::Parameter(format!("Δ = {d} must be positive")));
                }
            }
            ScheduleKind::Flat => match self.flat {
                FlatParams::Grid { resolution, max } if resolution == 0 || !(max >= 0.0) => {
                    return Err(Error::Parameter(format!(
                        "flat grid {resolution} points over [0, {max}] is invalid"
                    )));
                }
                FlatParams::Fixed { gamma, beta } if !(gamma.is_finite() && beta.is_finite()) => {
                    return Err(Error::Parameter("flat angles must be finite".into()));
                }
                _ => {}
            },
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    /// Candidate schedules in evaluation order, each tagged with its `Δ`.
    pub fn schedules(&self) -> Result<Vec<(Option<f64>, Schedule)>> {
        match self.variant.schedule_kind() {
            ScheduleKind::LinearRamp => self
                .deltas
                .iter()
                .map(|&d| Ok((Some(d), linear_ramp(self.p, d)?)))
                .collect(),
            ScheduleKind::Flat => self
                .flat
                .points()
                .into_iter()
                .map(|(g, b)| Ok((None, flat_schedule(self.p, g, b)?)))
                .collect(),
        }
    }
}

/// Everything a trial's QAOA variants share: the compiled and scaled cost
/// Hamiltonian, its diagonal and the relaxed warm-start solution.
#[derive(Debug, Clone)]
pub struct ProblemContext {
    pub spec: ConstellationSpec,
    pub layout: QubitLayout,
    pub hamiltonian: PauliHamiltonian,
    pub scaled: PauliHamiltonian,
    pub alpha: f64,
    /// Energies of the scaled Hamiltonian, offset excluded.
    pub scaled_diagonal: Vec<f64>,
    pub relaxation: BmBcdResult,
    g: nalgebra::DMatrix<f64>,
    c: DVector<f64>,
}

impl ProblemContext {
    /// Compiles the instance and solves its relaxation on the
    /// `label::BMBCD` fork of `rng`.
    pub fn new(instance: &DetectionInstance, rng: &RngStream) -> Result<Self> {
        let relaxation = bm_bcd_solve(
            &instance.q,
            &BmBcdConfig::for_spec(&instance.spec),
            &rng.fork(label::BMBCD),
        )?;
        Self::with_relaxation(instance, relaxation)
    }

    pub fn with_relaxation(instance: &DetectionInstance, relaxation: BmBcdResult) -> Result<Self> {
        let layout = QubitLayout::for_antennas(instance.nt, &instance.spec)?;
        let hamiltonian = build_cost_hamiltonian(&instance.g, &instance.c, &instance.spec, &layout)?;
        let (scaled, alpha) = scale_hamiltonian(&hamiltonian)?;
        let scaled_diagonal = scaled.diagonal()?;
        Ok(Self {
            spec: instance.spec.clone(),
            layout,
            hamiltonian,
            scaled,
            alpha,
            scaled_diagonal,
            relaxation,
            g: instance.g.clone(),
            c: instance.c.clone(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn warm_start(&self, temperature: f64) -> Result<WarmStart> {
        WarmStart::new(
            self.relaxation.warm_vector.as_slice(),
            temperature,
            self.layout.bits_per_dim(),
        )
    }

    /// `f(s(b))` of a basis index.
    pub fn objective_of(&self, index: u64) -> Result<f64> {
        let (_, s) = decode_bitstring(index, &self.layout, &self.spec)?;
        objective_f(&self.g, &self.c, &s)
    }

    /// Circuit for a variant and schedule, on the scaled Hamiltonian.
    pub fn circuit(&self, variant: Variant, schedule: &Schedule, temperature: f64) -> Result<QaoaCircuit> {
        let warm = if variant.warm_init() || variant.warm_mixer() {
            Some(self.warm_start(temperature)?)
        } else {
            None
        };
        Ok(QaoaCircuit {
            hamiltonian: self.scaled.clone(),
            init: match &warm {
                Some(w) if variant.warm_init() => InitKind::Warm(w.x.clone()),
                _ => InitKind::Uniform,
            },
            mixer: match &warm {
                Some(w) if variant.warm_mixer() => MixerKind::WarmStart(w.x.clone()),
                _ => MixerKind::TransverseX,
            },
            gammas: schedule.gammas.clone(),
            betas: schedule.betas.clone(),
        })
    }
}

/// Outcome of one candidate schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub delta: Option<f64>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    /// Most frequent outcome (ties to the smallest index).
    pub bitstring: u64,
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Counts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub variant: Variant,
    pub bitstring: u64,
    pub s_hat: Vec<f64>,
    pub x_hat: Vec<Complex64>,
    /// `f(s_hat)`.
    pub energy: f64,
    /// Slope of the selected schedule, for ramp variants.
    pub delta: Option<f64>,
    /// Position of the selected candidate.
    pub selected: usize,
    pub symbol_errors: usize,
    pub symbols: usize,
    pub candidates: Vec<Candidate>,
}

/// Most frequent outcome; ties go to the smallest basis index.
pub fn mode_of(counts: &Counts) -> Option<usize> {
    let mut best: Option<(usize, u64)> = None;
    for (&idx, &n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((idx, n));
        }
    }
    best.map(|(i, _)| i)
}

fn argmax(probs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    best
}

/// Runs a variant with a fresh context. The relaxation uses the
/// `label::BMBCD` fork of `rng` and sampling the `label::SHOTS` fork.
pub fn run_variant(instance: &DetectionInstance, config: &VariantConfig, rng: &RngStream) -> Result<TrialRecord> {
    let ctx = ProblemContext::new(instance, rng)?;
    run_variant_in(&ctx, instance, config, &rng.fork(label::SHOTS))
}

/// Runs a variant against a precomputed context; all shots are drawn from
/// `shots_rng`.
pub fn run_variant_in(
    ctx: &ProblemContext,
    instance: &DetectionInstance,
    config: &VariantConfig,
    shots_rng: &RngStream,
) -> Result<TrialRecord> {
    config.validate()?;
    let mut rng = shots_rng.rng();
    let schedules = config.schedules()?;
    let mut phase_cache: HashMap<u64, Vec<Complex64>> = HashMap::new();
    let mut candidates = Vec::with_capacity(schedules.len());
    let mut selected = 0;

    for (i, (delta, schedule)) in schedules.iter().enumerate() {
        let circuit = ctx.circuit(config.variant, schedule, config.temperature)?;
        let (bitstring, histogram) = match &config.noise {
            Some(noise) => {
                let counts = noisy_execute(&circuit, noise, config.shots.max(1), &mut rng)?;
                (mode_of(&counts).unwrap_or(0), Some(counts))
            }
            None => {
                let state = evolve_cached(ctx, &circuit, &mut phase_cache)?;
                winner(&state, config.shots, &mut rng)?
            }
        };
        let energy = ctx.objective_of(bitstring as u64)?;
        if energy < candidates.get(selected).map_or(f64::INFINITY, |c: &Candidate| c.energy) {
            selected = i;
        }
        candidates.push(Candidate {
            delta: *delta,
            gamma: schedule.gammas.clone(),
            beta: schedule.betas.clone(),
            bitstring: bitstring as u64,
            energy,
            histogram: histogram.filter(|_| config.record_histograms),
        });
    }

    let best = &candidates[selected];
    let (x_hat, s_hat) = decode_bitstring(best.bitstring, &ctx.layout, &ctx.spec)?;
    let (symbol_errors, symbols) = ser_of(&s_hat, &instance.x_true)?;
    Ok(TrialRecord {
        variant: config.variant,
        bitstring: best.bitstring,
        s_hat: s_hat.as_slice().to_vec(),
        x_hat: x_hat.as_slice().to_vec(),
        energy: best.energy,
        delta: best.delta,
        selected,
        symbol_errors,
        symbols,
        candidates,
    })
}

fn winner(state: &StateVector, shots: usize, rng: &mut StreamRng) -> Result<(usize, Option<Counts>)> {
    let probs = state.probabilities();
    if shots == 0 {
        return Ok((argmax(&probs), None));
    }
    let counts = sample_distribution(&probs, shots, rng)?;
    Ok((mode_of(&counts).unwrap_or(0), Some(counts)))
}

/// Noiseless evolution reusing `e^{−iγE}` across schedules with equal `γ`.
fn evolve_cached(
    ctx: &ProblemContext,
    circuit: &QaoaCircuit,
    cache: &mut HashMap<u64, Vec<Complex64>>,
) -> Result<StateVector> {
    let mut state = match &circuit.init {
        InitKind::Uniform => StateVector::prepare_uniform(ctx.n_qubits())?,
        InitKind::Warm(x) => StateVector::prepare_warm_start(x)?,
    };
    for (&gamma, &beta) in circuit.gammas.iter().zip(&circuit.betas) {
        let phases = cache.entry(gamma.to_bits()).or_insert_with(|| {
            ctx.scaled_diagonal
                .iter()
                .map(|&e| Complex64::from_polar(1.0, -gamma * e))
                .collect()
        });
        state.apply_phases(phases)?;
        match &circuit.mixer {
            MixerKind::TransverseX => state.apply_rx_mixer(beta),
            MixerKind::WarmStart(x) => state.apply_ws_mixer(beta, x)?,
        }
    }
    Ok(state)
}

/// Complex symbols and real components of a basis index. Components
/// `0..Nt` are real parts, `Nt..2Nt` imaginary parts.
pub fn decode_bitstring(
    index: u64,
    layout: &QubitLayout,
    spec: &ConstellationSpec,
) -> Result<(DVector<Complex64>, DVector<f64>)> {
    let n = layout.n_qubits();
    if n < 64 && index >> n != 0 {
        return Err(Error::Parameter(format!("bitstring {index} has more than {n} bits")));
    }
    if layout.bits_per_dim() != spec.bits_per_dim() || !layout.components().is_multiple_of(2) {
        return Err(Error::Dimension("layout does not match the constellation".into()));
    }
    let w = layout.bits_per_dim();
    let mut bits = vec![0u8; w];
    let s = DVector::from_fn(layout.components(), |k, _| {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = ((index >> layout.qubit(k, i)) & 1) as u8;
        }
        f64::from(gray_map_bits_to_pam(&bits).expect("bits are binary and W is valid"))
    });
    Ok((complex_from_real(&s), s))
}

/// Complex-symbol errors of a real estimate: `(errors, Nt)`.
pub fn ser_of(s_hat: &DVector<f64>, x_true: &DVector<Complex64>) -> Result<(usize, usize)> {
    let nt = x_true.len();
    if s_hat.len() != 2 * nt {
        return Err(Error::Dimension(format!(
            "{} real components for {nt} symbols",
            s_hat.len()
        )));
    }
    let errors = (0..nt)
        .filter(|&k| s_hat[k] != x_true[k].re || s_hat[nt + k] != x_true[k].im)
        .count();
    Ok((errors, nt))
}
