//! One error-correction attempt as a stochastic map on erasure patterns.
//!
//! Full erasures are handled first: a cat-state measurement of the Z-type
//! stabilizer covering the erased qubit turns it into a Z erasure. Once no
//! full erasures remain, the lowest-indexed Z erasure or Z measurement is
//! recovered by teleporting three intact helpers through CNOTs from a fresh
//! `|+⟩`.
//!
//! Each circuit is described by a list of [`FaultLocation`]s. The exact
//! engine enumerates every subset of fired locations; the Monte Carlo sampler
//! draws one subset. Both hand the subset to the same [`Procedure::resolve`],
//! so they can only disagree through how the chain is assembled.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::arith::{Poly, Rational};
use crate::erasure::{classify, Correctability, ErasurePattern, ErrorModel, Site};
use crate::pauli::{QubitSet, SteaneCode};

/// Which parameter drives a fault location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rate {
    /// Gate (teleportation) failure, `ε_ideal` or `ε_loss`.
    Eps,
    /// Photon loss at one detector.
    Delta,
}

impl Rate {
    pub fn poly(self) -> Poly {
        match self {
            Rate::Eps => Poly::eps(),
            Rate::Delta => Poly::delta(),
        }
    }
}

/// What a fired coupling gate does to the data qubit it touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CouplingEffect {
    None,
    ZErasure,
    FullErasure,
}

/// Fault-location inventory of the Z-recovery circuit (fresh `|+⟩` control,
/// three teleported helpers).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZRecoveryFaults {
    /// Detectors in the explicit Z readout of a Z-erased target (lossy only).
    pub target_readout_detectors: u32,
    /// Fault locations per helper teleportation. Ideal model: teleportation
    /// failures at rate ε. Lossy model: photon losses at rate δ.
    pub helper_locations: u32,
}

/// Fault-location inventory of the cat-state stabilizer measurement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FullToZFaults {
    /// Ancilla detectors read out at rate δ; any loss spoils the measurement.
    pub ancilla_detectors: u32,
    /// Coupling gates per data qubit of the covering support, each failing
    /// at rate ε.
    pub couplings_per_qubit: u32,
    pub coupling_effect: CouplingEffect,
    /// Whether a failed coupling also spoils the measurement outcome.
    pub coupling_spoils_measurement: bool,
}

/// Per-circuit fault inventory. [`CircuitConfig::default`] is the minimal
/// inventory: one detector per readout, one location per helper
/// teleportation, four ancilla detectors and one coupling per data qubit
/// that only Z-erases its data qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircuitConfig {
    pub z_recovery: ZRecoveryFaults,
    pub full_to_z: FullToZFaults,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        Self {
            z_recovery: ZRecoveryFaults {
                target_readout_detectors: 1,
                helper_locations: 1,
            },
            full_to_z: FullToZFaults {
                ancilla_detectors: 4,
                couplings_per_qubit: 1,
                coupling_effect: CouplingEffect::ZErasure,
                coupling_spoils_measurement: false,
            },
        }
    }
}

/// Exhaustive enumeration is `2^locations`; keep it sane.
pub const MAX_LOCATIONS_PER_STEP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigError {
    TooManyLocations {
        circuit: &'static str,
        locations: usize,
    },
    NoHelperLocations,
    NoAncillaDetectors,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::TooManyLocations { circuit, locations } => write!(
                f,
                "{circuit} circuit has {locations} fault locations (limit {MAX_LOCATIONS_PER_STEP})"
            ),
            ConfigError::NoHelperLocations => {
                f.write_str("helper teleportations need at least one fault location")
            }
            ConfigError::NoAncillaDetectors => {
                f.write_str("the cat-state measurement needs at least one ancilla detector")
            }
        }
    }
}

impl core::error::Error for ConfigError {}

impl CircuitConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.z_recovery.helper_locations == 0 {
            return Err(ConfigError::NoHelperLocations);
        }
        if self.full_to_z.ancilla_detectors == 0 {
            return Err(ConfigError::NoAncillaDetectors);
        }
        let zr = (self.z_recovery.target_readout_detectors + 3 * self.z_recovery.helper_locations)
            as usize;
        if zr > MAX_LOCATIONS_PER_STEP {
            return Err(ConfigError::TooManyLocations {
                circuit: "z-recovery",
                locations: zr,
            });
        }
        let fz =
            (self.full_to_z.ancilla_detectors + 4 * self.full_to_z.couplings_per_qubit) as usize;
        if fz > MAX_LOCATIONS_PER_STEP {
            return Err(ConfigError::TooManyLocations {
                circuit: "full-to-z",
                locations: fz,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    /// Cat-state measurement of the covering Z-type stabilizer.
    FullErasureToZ,
    /// Teleportation-based recovery of a Z erasure or Z measurement.
    ZRecovery,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorrectionStep {
    pub kind: StepKind,
    /// 1-based qubit being corrected.
    pub target: u8,
    /// Intact qubits completing a weight-4 stabilizer support, ascending.
    pub helpers: [u8; 3],
}

impl CorrectionStep {
    pub fn support(&self) -> QubitSet {
        QubitSet::from_qubits(self.helpers).with(self.target)
    }

    /// Qubit touched by data slot `i`: 0 is the target, 1..=3 the helpers.
    fn slot(&self, i: usize) -> u8 {
        if i == 0 {
            self.target
        } else {
            self.helpers[i - 1]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepChoice {
    Done,
    Abort,
    Correct(CorrectionStep),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocationRole {
    TargetReadout,
    /// Teleportation of helper `0..3`.
    HelperTeleport(u8),
    AncillaReadout,
    /// Coupling gate on data slot `0..4` (0 = target).
    Coupling(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaultLocation {
    pub rate: Rate,
    pub role: LocationRole,
}

/// Exact distribution over patterns after one attempt.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutcomeDistribution {
    pub entries: BTreeMap<ErasurePattern, Poly>,
}

impl OutcomeDistribution {
    pub fn certain(p: ErasurePattern) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(p, Poly::one());
        Self { entries }
    }

    pub fn add(&mut self, p: ErasurePattern, prob: &Poly) {
        let slot = self.entries.entry(p).or_default();
        *slot += prob;
        if slot.is_zero() {
            self.entries.remove(&p);
        }
    }

    pub fn total(&self) -> Poly {
        self.entries.values().fold(Poly::zero(), |acc, p| &acc + p)
    }

    pub fn prob(&self, p: &ErasurePattern) -> Poly {
        self.entries.get(p).cloned().unwrap_or_default()
    }

    pub fn eval(&self, eps: &Rational, delta: &Rational) -> BTreeMap<ErasurePattern, Rational> {
        self.entries
            .iter()
            .map(|(k, v)| (*k, v.eval(eps, delta)))
            .collect()
    }
}

/// The correction procedure for one error model and fault inventory.
#[derive(Clone, Debug)]
pub struct Procedure {
    code: SteaneCode,
    model: ErrorModel,
    config: CircuitConfig,
}

impl Procedure {
    pub fn new(model: ErrorModel, config: CircuitConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Self {
            code: SteaneCode::new(),
            model,
            config,
        })
    }

    pub fn with_defaults(model: ErrorModel) -> Self {
        Self {
            code: SteaneCode::new(),
            model,
            config: CircuitConfig::default(),
        }
    }

    pub fn model(&self) -> ErrorModel {
        self.model
    }

    pub fn code(&self) -> &SteaneCode {
        &self.code
    }

    pub fn config(&self) -> &CircuitConfig {
        &self.config
    }

    pub fn classify(&self, p: &ErasurePattern) -> Correctability {
        classify(&self.code, p)
    }

    /// Lexicographically smallest helper triple for `target`, avoiding every
    /// other erased qubit.
    pub fn helpers_for(&self, p: &ErasurePattern, target: u8) -> Option<[u8; 3]> {
        self.code
            .covering_quads(target, p.support())
            .map(|quad| {
                let mut h = [0u8; 3];
                for (slot, q) in h.iter_mut().zip(quad.without(target).iter()) {
                    *slot = q;
                }
                h
            })
            .min()
    }

    pub fn select_step(&self, p: &ErasurePattern) -> StepChoice {
        if p.weight() == 0 {
            return StepChoice::Done;
        }
        if self.classify(p) == Correctability::ProcedureFail {
            return StepChoice::Abort;
        }
        let (kind, target) = match p.first_of(&[Site::FullyErased]) {
            Some(t) => (StepKind::FullErasureToZ, t),
            None => match p.first_of(&[Site::ZErased, Site::ZMeasured]) {
                Some(t) => (StepKind::ZRecovery, t),
                None => unreachable!("non-zero weight pattern without erasures"),
            },
        };
        match self.helpers_for(p, target) {
            Some(helpers) => StepChoice::Correct(CorrectionStep {
                kind,
                target,
                helpers,
            }),
            // every correctable pattern has a covering quad; keep the chain
            // well-defined if that ever stops holding
            None => StepChoice::Abort,
        }
    }

    pub fn fault_locations(&self, p: &ErasurePattern, step: &CorrectionStep) -> Vec<FaultLocation> {
        let mut locs = Vec::new();
        match step.kind {
            StepKind::ZRecovery => {
                let cfg = &self.config.z_recovery;
                if p.get(step.target) == Site::ZErased {
                    for _ in 0..cfg.target_readout_detectors {
                        locs.push(FaultLocation {
                            rate: Rate::Delta,
                            role: LocationRole::TargetReadout,
                        });
                    }
                }
                let rate = match self.model {
                    ErrorModel::Ideal => Rate::Eps,
                    ErrorModel::Lossy => Rate::Delta,
                };
                for h in 0..3u8 {
                    for _ in 0..cfg.helper_locations {
                        locs.push(FaultLocation {
                            rate,
                            role: LocationRole::HelperTeleport(h),
                        });
                    }
                }
            }
            StepKind::FullErasureToZ => {
                let cfg = &self.config.full_to_z;
                for _ in 0..cfg.ancilla_detectors {
                    locs.push(FaultLocation {
                        rate: Rate::Delta,
                        role: LocationRole::AncillaReadout,
                    });
                }
                for slot in 0..4u8 {
                    for _ in 0..cfg.couplings_per_qubit {
                        locs.push(FaultLocation {
                            rate: Rate::Eps,
                            role: LocationRole::Coupling(slot),
                        });
                    }
                }
            }
        }
        locs
    }

    /// Outcome pattern of `step` given which locations fired.
    pub fn resolve(
        &self,
        p: &ErasurePattern,
        step: &CorrectionStep,
        locs: &[FaultLocation],
        fired: &[bool],
    ) -> ErasurePattern {
        debug_assert_eq!(locs.len(), fired.len());
        let hit = |role: LocationRole| locs.iter().zip(fired).any(|(l, f)| *f && l.role == role);
        let mut out = *p;
        match step.kind {
            StepKind::ZRecovery => {
                if hit(LocationRole::TargetReadout) {
                    // readout destroyed the qubit; attempt abandoned
                    out.set(step.target, Site::FullyErased);
                    return out;
                }
                let (helper_site, target_site) = match self.model {
                    ErrorModel::Ideal => (Site::ZMeasured, Site::ZMeasured),
                    ErrorModel::Lossy => (Site::FullyErased, Site::ZErased),
                };
                let mut any = false;
                for (i, q) in step.helpers.iter().enumerate() {
                    if hit(LocationRole::HelperTeleport(i as u8)) {
                        out.set(*q, helper_site);
                        any = true;
                    }
                }
                out.set(step.target, if any { target_site } else { Site::Intact });
            }
            StepKind::FullErasureToZ => {
                let cfg = &self.config.full_to_z;
                let coupling_hit = (0..4u8)
                    .map(|s| hit(LocationRole::Coupling(s)))
                    .collect::<Vec<_>>();
                let spoiled = hit(LocationRole::AncillaReadout)
                    || (cfg.coupling_spoils_measurement && coupling_hit.iter().any(|h| *h));
                if !spoiled {
                    out.set(step.target, Site::ZErased);
                }
                for (slot, h) in coupling_hit.iter().enumerate() {
                    if !*h {
                        continue;
                    }
                    let q = step.slot(slot);
                    match cfg.coupling_effect {
                        CouplingEffect::None => {}
                        CouplingEffect::ZErasure => {
                            if out.get(q) == Site::Intact {
                                out.set(q, Site::ZErased);
                            }
                        }
                        CouplingEffect::FullErasure => out.set(q, Site::FullyErased),
                    }
                }
            }
        }
        out
    }

    fn enumerate(&self, p: &ErasurePattern, step: &CorrectionStep) -> OutcomeDistribution {
        let locs = self.fault_locations(p, step);
        let n = locs.len();
        let mut weights = ProductCache::default();
        let mut dist = OutcomeDistribution::default();
        let mut fired = alloc::vec![false; n];
        for mask in 0u32..(1u32 << n) {
            let mut counts = [0u32; 4];
            for (i, l) in locs.iter().enumerate() {
                let f = mask & (1 << i) != 0;
                fired[i] = f;
                let idx = match (l.rate, f) {
                    (Rate::Eps, true) => 0,
                    (Rate::Eps, false) => 1,
                    (Rate::Delta, true) => 2,
                    (Rate::Delta, false) => 3,
                };
                counts[idx] += 1;
            }
            let outcome = self.resolve(p, step, &locs, &fired);
            dist.add(outcome, weights.get(counts));
        }
        dist
    }

    pub fn apply_z_recovery(
        &self,
        p: &ErasurePattern,
        step: &CorrectionStep,
    ) -> OutcomeDistribution {
        assert_eq!(step.kind, StepKind::ZRecovery);
        assert!(matches!(
            p.get(step.target),
            Site::ZErased | Site::ZMeasured
        ));
        self.enumerate(p, step)
    }

    pub fn apply_full_to_z(
        &self,
        p: &ErasurePattern,
        step: &CorrectionStep,
    ) -> OutcomeDistribution {
        assert_eq!(step.kind, StepKind::FullErasureToZ);
        assert_eq!(p.get(step.target), Site::FullyErased);
        self.enumerate(p, step)
    }

    /// One correction attempt. Finished blocks stay put; aborted ones jump to
    /// [`ErasurePattern::failed`].
    pub fn attempt(&self, p: &ErasurePattern) -> OutcomeDistribution {
        match self.select_step(p) {
            StepChoice::Done => OutcomeDistribution::certain(*p),
            StepChoice::Abort => OutcomeDistribution::certain(ErasurePattern::failed(self.model)),
            StepChoice::Correct(step) => match step.kind {
                StepKind::ZRecovery => self.apply_z_recovery(p, &step),
                StepKind::FullErasureToZ => self.apply_full_to_z(p, &step),
            },
        }
    }

    /// Draws one attempt's outcome with rates given as probabilities.
    pub fn sample_attempt<R: RngCore + ?Sized>(
        &self,
        p: &ErasurePattern,
        eps: f64,
        delta: f64,
        rng: &mut R,
    ) -> (StepChoice, ErasurePattern) {
        let choice = self.select_step(p);
        let next = match choice {
            StepChoice::Done => *p,
            StepChoice::Abort => ErasurePattern::failed(self.model),
            StepChoice::Correct(step) => {
                let locs = self.fault_locations(p, &step);
                let fired: Vec<bool> = locs
                    .iter()
                    .map(|l| {
                        let prob = match l.rate {
                            Rate::Eps => eps,
                            Rate::Delta => delta,
                        };
                        bernoulli(rng, prob)
                    })
                    .collect();
                self.resolve(p, &step, &locs, &fired)
            }
        };
        (choice, next)
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits.
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn bernoulli<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> bool {
    unit_f64(rng) < p
}

/// Memoizes `ε^a (1-ε)^b δ^c (1-δ)^d`.
#[derive(Default)]
struct ProductCache {
    cache: BTreeMap<[u32; 4], Poly>,
}

impl ProductCache {
    fn get(&mut self, counts: [u32; 4]) -> &Poly {
        self.cache.entry(counts).or_insert_with(|| {
            let [a, b, c, d] = counts;
            let not_eps = &Poly::one() - &Poly::eps();
            let not_delta = &Poly::one() - &Poly::delta();
            &(&Poly::eps().pow(a) * &not_eps.pow(b)) * &(&Poly::delta().pow(c) * &not_delta.pow(d))
        })
    }
}
