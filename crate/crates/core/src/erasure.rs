//! Erasure patterns on one 7-qubit block, the two error models, and the
//! correctability rule.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::arith::{ratio, Poly, Rational};
use crate::pauli::{QubitSet, SteaneCode, N_QUBITS};

/// What has happened to one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Intact,
    /// Flagged Z measurement with known outcome (ideal model).
    ZMeasured,
    /// Z measurement with unknown outcome, `ρ → (ρ + ZρZ)/2` (lossy model).
    ZErased,
    /// Total loss, `ρ → 1/2` (lossy model).
    FullyErased,
}

impl Site {
    pub fn symbol(self) -> char {
        match self {
            Site::Intact => '.',
            Site::ZMeasured => 'M',
            Site::ZErased => 'Z',
            Site::FullyErased => 'E',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        Some(match c {
            '.' => Site::Intact,
            'M' => Site::ZMeasured,
            'Z' => Site::ZErased,
            'E' => Site::FullyErased,
            _ => return None,
        })
    }

    pub fn is_erased(self) -> bool {
        self != Site::Intact
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorModel {
    /// Perfect detectors, imperfect teleportation: only Z measurements.
    Ideal,
    /// Perfect teleportation, lossy detectors: Z erasures and full erasures.
    Lossy,
}

impl ErrorModel {
    /// Non-intact sites that may appear in this model's patterns.
    pub fn alphabet(self) -> &'static [Site] {
        match self {
            ErrorModel::Ideal => &[Site::ZMeasured],
            ErrorModel::Lossy => &[Site::ZErased, Site::FullyErased],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorModel::Ideal => "ideal",
            ErrorModel::Lossy => "lossy",
        }
    }

    /// The site an aborted block is recorded as.
    pub fn failed_site(self) -> Site {
        match self {
            ErrorModel::Ideal => Site::ZMeasured,
            ErrorModel::Lossy => Site::FullyErased,
        }
    }
}

/// Status of each of the 7 qubits of a block. Index 0 is qubit 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ErasurePattern([Site; N_QUBITS]);

impl ErasurePattern {
    pub const INTACT: Self = Self([Site::Intact; N_QUBITS]);

    pub fn new(sites: [Site; N_QUBITS]) -> Self {
        Self(sites)
    }

    /// Every qubit erased with the model's failure symbol; the absorbing
    /// state that aborted blocks are sent to.
    pub fn failed(model: ErrorModel) -> Self {
        Self([model.failed_site(); N_QUBITS])
    }

    pub fn sites(&self) -> &[Site; N_QUBITS] {
        &self.0
    }

    /// Site of 1-based qubit `q`.
    pub fn get(&self, q: u8) -> Site {
        self.0[q as usize - 1]
    }

    pub fn set(&mut self, q: u8, site: Site) {
        self.0[q as usize - 1] = site;
    }

    pub fn with(mut self, q: u8, site: Site) -> Self {
        self.set(q, site);
        self
    }

    pub fn support(&self) -> QubitSet {
        QubitSet::from_qubits((1..=7u8).filter(|q| self.get(*q).is_erased()))
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().filter(|s| s.is_erased()).count() as u32
    }

    pub fn count(&self, site: Site) -> u32 {
        self.0.iter().filter(|s| **s == site).count() as u32
    }

    /// Lowest-indexed qubit carrying one of `sites`.
    pub fn first_of(&self, sites: &[Site]) -> Option<u8> {
        (1..=7u8).find(|q| sites.contains(&self.get(*q)))
    }

    pub fn conforms_to(&self, model: ErrorModel) -> bool {
        self.0
            .iter()
            .all(|s| *s == Site::Intact || model.alphabet().contains(s))
    }

    /// Erasure counts `[full, Z-type]` where Z-type merges Z erasures and Z
    /// measurements.
    pub fn composition(&self) -> Composition {
        Composition {
            full: self.count(Site::FullyErased),
            z: self.count(Site::ZErased),
            measured: self.count(Site::ZMeasured),
        }
    }

    /// Applies a permutation given as `perm[i] = image of qubit i+1` (0-based
    /// images).
    pub fn permuted(&self, perm: &[u8; N_QUBITS]) -> Self {
        let mut out = [Site::Intact; N_QUBITS];
        for (i, s) in self.0.iter().enumerate() {
            out[perm[i] as usize] = *s;
        }
        Self(out)
    }
}

impl fmt::Display for ErasurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ErasurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsePatternError(pub String);

impl fmt::Display for ParsePatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid erasure pattern {:?}: expected 7 characters from .MZE",
            self.0
        )
    }
}

impl core::error::Error for ParsePatternError {}

impl FromStr for ErasurePattern {
    type Err = ParsePatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePatternError(s.into());
        if s.chars().count() != N_QUBITS {
            return Err(err());
        }
        let mut sites = [Site::Intact; N_QUBITS];
        for (i, c) in s.chars().enumerate() {
            sites[i] = Site::from_symbol(c).ok_or_else(err)?;
        }
        Ok(Self(sites))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition {
    pub full: u32,
    pub z: u32,
    pub measured: u32,
}

impl Composition {
    pub fn weight(&self) -> u32 {
        self.full + self.z + self.measured
    }

    /// `[m,n]` with `m` full erasures and `n` Z-type erasures.
    pub fn label(&self) -> String {
        alloc::format!("[{},{}]", self.full, self.z + self.measured)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correctability {
    Correctable,
    /// Outside what the recovery procedure handles; the block is abandoned.
    ProcedureFail,
}

/// Weight ≤ 2 always correctable; weight 3 unless the support carries a
/// logical operator; weight ≥ 4 never (even where the code could in
/// principle recover, the procedure cannot).
pub fn classify(code: &SteaneCode, pattern: &ErasurePattern) -> Correctability {
    match pattern.weight() {
        0..=2 => Correctability::Correctable,
        3 if !code.supports_logical(pattern.support()) => Correctability::Correctable,
        _ => Correctability::ProcedureFail,
    }
}

/// Every pattern over the model's alphabet, in a fixed order.
pub fn all_patterns(model: ErrorModel) -> Vec<ErasurePattern> {
    let mut symbols = alloc::vec![Site::Intact];
    symbols.extend_from_slice(model.alphabet());
    let base = symbols.len();
    let total = base.pow(N_QUBITS as u32);
    (0..total)
        .map(|mut idx| {
            let mut sites = [Site::Intact; N_QUBITS];
            for s in sites.iter_mut().rev() {
                *s = symbols[idx % base];
                idx /= base;
            }
            ErasurePattern(sites)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternCensus {
    pub total: usize,
    pub by_weight: [usize; N_QUBITS + 1],
    pub by_composition: BTreeMap<Composition, usize>,
    pub correctable: usize,
}

pub fn enumerate_patterns(code: &SteaneCode, model: ErrorModel) -> PatternCensus {
    let patterns = all_patterns(model);
    let mut by_weight = [0usize; N_QUBITS + 1];
    let mut by_composition = BTreeMap::new();
    let mut correctable = 0;
    for p in &patterns {
        by_weight[p.weight() as usize] += 1;
        *by_composition.entry(p.composition()).or_insert(0) += 1;
        if classify(code, p) == Correctability::Correctable {
            correctable += 1;
        }
    }
    PatternCensus {
        total: patterns.len(),
        by_weight,
        by_composition,
        correctable,
    }
}

/// A numeric operating point for one error model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParams {
    pub model: ErrorModel,
    /// Gate failure probability (`ε_ideal` or `ε_loss`).
    pub eps: Rational,
    /// Per-detector loss probability; always zero in the ideal model.
    pub delta: Rational,
}

impl ModelParams {
    pub fn ideal(eps: Rational) -> Self {
        Self {
            model: ErrorModel::Ideal,
            eps,
            delta: Rational::zero(),
        }
    }

    pub fn lossy(eps: Rational, delta: Rational) -> Self {
        Self {
            model: ErrorModel::Lossy,
            eps,
            delta,
        }
    }

    /// The lossy model on the `δ = ε` diagonal.
    pub fn lossy_diagonal(eps: Rational) -> Self {
        Self::lossy(eps.clone(), eps)
    }

    /// `ε` for the ideal model, `ε = δ = x` for the lossy one.
    pub fn at(model: ErrorModel, x: Rational) -> Self {
        match model {
            ErrorModel::Ideal => Self::ideal(x),
            ErrorModel::Lossy => Self::lossy_diagonal(x),
        }
    }

    pub fn is_valid(&self) -> bool {
        let unit = |x: &Rational| !x.is_negative() && *x <= Rational::one();
        unit(&self.eps)
            && unit(&self.delta)
            && (self.model == ErrorModel::Lossy || self.delta.is_zero())
    }
}

/// Per-qubit probability of each site right after one transversal encoded
/// gate, as polynomials in ε. Lossy failures split evenly between a full
/// erasure of the teleported qubit and a Z erasure of its partner.
pub fn site_injection(model: ErrorModel) -> Vec<(Site, Poly)> {
    let eps = Poly::eps();
    let half_eps = eps.scale(&ratio(1, 2));
    let intact = &Poly::one() - &eps;
    match model {
        ErrorModel::Ideal => alloc::vec![(Site::Intact, intact), (Site::ZMeasured, eps)],
        ErrorModel::Lossy => alloc::vec![
            (Site::Intact, intact),
            (Site::ZErased, half_eps.clone()),
            (Site::FullyErased, half_eps),
        ],
    }
}

/// Probability of every pattern after independent per-qubit injection.
pub fn initial_distribution(model: ErrorModel) -> BTreeMap<ErasurePattern, Poly> {
    let per_site: BTreeMap<Site, Poly> = site_injection(model).into_iter().collect();
    // (1-ε)^k ε^j style products repeat a lot; cache by composition.
    let mut cache: BTreeMap<[u32; 3], Poly> = BTreeMap::new();
    all_patterns(model)
        .into_iter()
        .map(|p| {
            let key = [
                p.count(Site::Intact),
                p.count(Site::ZErased) + p.count(Site::ZMeasured),
                p.count(Site::FullyErased),
            ];
            let prob = cache
                .entry(key)
                .or_insert_with(|| {
                    p.sites()
                        .iter()
                        .fold(Poly::one(), |acc, s| &acc * &per_site[s])
                })
                .clone();
            (p, prob)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn pat(s: &str) -> ErasurePattern {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip_and_errors() {
        let p = pat("..M..E.");
        assert_eq!(alloc::format!("{p}"), "..M..E.");
        assert_eq!(p.weight(), 2);
        assert!("......".parse::<ErasurePattern>().is_err());
        assert!("...X...".parse::<ErasurePattern>().is_err());
    }

    #[test]
    fn classify_examples() {
        let code = SteaneCode::new();
        for s in ["MM.....", "E.....Z", "......."] {
            assert_eq!(classify(&code, &pat(s)), Correctability::Correctable);
        }
        assert_eq!(
            classify(&code, &pat("EEEE...")),
            Correctability::ProcedureFail
        );
        // complement of a weight-4 stabilizer support is a logical support
        assert_eq!(
            classify(&code, &pat("....MMM")),
            Correctability::ProcedureFail
        );
    }

    #[test]
    fn weight_three_census() {
        let code = SteaneCode::new();
        let w3: Vec<_> = all_patterns(ErrorModel::Ideal)
            .into_iter()
            .filter(|p| p.weight() == 3)
            .collect();
        assert_eq!(w3.len(), 35);
        let ok = w3
            .iter()
            .filter(|p| classify(&code, p) == Correctability::Correctable)
            .count();
        assert_eq!((ok, w3.len() - ok), (28, 7));
    }

    #[test]
    fn correctable_weight_four_support_still_fails() {
        let code = SteaneCode::new();
        // a stabilizer support holds no logical support, yet the procedure gives up
        let p = pat("MMMM...");
        assert!(!code.supports_logical(p.support()));
        assert_eq!(classify(&code, &p), Correctability::ProcedureFail);
    }

    #[test]
    fn census_totals() {
        let code = SteaneCode::new();
        let ideal = enumerate_patterns(&code, ErrorModel::Ideal);
        assert_eq!(ideal.total, 128);
        assert_eq!(ideal.by_weight[3], 35);
        assert_eq!(ideal.correctable, 1 + 7 + 21 + 28);
        let lossy = enumerate_patterns(&code, ErrorModel::Lossy);
        assert_eq!(lossy.total, 2187);
        assert!(lossy
            .by_composition
            .keys()
            .all(|c| c.full + c.z <= 7 && c.measured == 0));
    }

    #[test]
    fn initial_distribution_is_normalized() {
        for model in [ErrorModel::Ideal, ErrorModel::Lossy] {
            let dist = initial_distribution(model);
            let total = dist.values().fold(Poly::zero(), |a, p| &a + p);
            assert!(total.is_one(), "{model:?}: {total}");
        }
    }

    #[test]
    fn initial_distribution_examples() {
        let dist = initial_distribution(ErrorModel::Ideal);
        let one_minus = &Poly::one() - &Poly::eps();
        assert_eq!(dist[&ErasurePattern::INTACT], one_minus.pow(7));
        let w3 = dist
            .iter()
            .filter(|(p, _)| p.weight() == 3)
            .fold(Poly::zero(), |a, (_, q)| &a + q);
        assert_eq!(w3, &Poly::monomial(int(35), 3, 0) * &one_minus.pow(4));

        let lossy = site_injection(ErrorModel::Lossy);
        let full = lossy.iter().find(|(s, _)| *s == Site::FullyErased).unwrap();
        assert_eq!(full.1, Poly::monomial(ratio(1, 2), 1, 0));
    }

    #[test]
    fn params_enforce_model_limits() {
        assert!(ModelParams::ideal(ratio(1, 10)).is_valid());
        let mut bad = ModelParams::ideal(ratio(1, 10));
        bad.delta = ratio(1, 10);
        assert!(!bad.is_valid());
        assert!(!ModelParams::lossy(ratio(3, 2), ratio(0, 1)).is_valid());
        assert!(ModelParams::lossy_diagonal(ratio(1, 50)).is_valid());
    }

    #[test]
    fn alphabet_conformance() {
        assert!(pat("M.M....").conforms_to(ErrorModel::Ideal));
        assert!(!pat("M.M....").conforms_to(ErrorModel::Lossy));
        assert!(pat("E.Z....").conforms_to(ErrorModel::Lossy));
        assert!(!pat("E.Z....").conforms_to(ErrorModel::Ideal));
    }
}
