//! Seven-qubit Pauli operators in binary-symplectic form, the Steane code's
//! stabilizer group, its logical cosets, and support queries.
//!
//! Qubits are numbered 1..=7, matching the left-to-right tensor order of the
//! generators. Qubit `q` lives in bit `q - 1`. Phases are dropped throughout.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub const N_QUBITS: usize = 7;
const FULL: u8 = 0x7f;

/// A set of qubits of one block.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QubitSet(u8);

impl QubitSet {
    pub const EMPTY: Self = Self(0);
    pub const ALL: Self = Self(FULL);

    pub fn from_bits(bits: u8) -> Self {
        Self(bits & FULL)
    }

    /// From 1-based qubit indices. Panics on an index outside 1..=7.
    pub fn from_qubits<I: IntoIterator<Item = u8>>(qubits: I) -> Self {
        let mut bits = 0u8;
        for q in qubits {
            assert!((1..=7).contains(&q), "qubit index {q} out of range");
            bits |= 1 << (q - 1);
        }
        Self(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, q: u8) -> bool {
        (1..=7).contains(&q) && self.0 & (1 << (q - 1)) != 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn without(self, q: u8) -> Self {
        Self(self.0 & !(1 << (q - 1)))
    }

    pub fn with(self, q: u8) -> Self {
        Self(self.0 | (1 << (q - 1)))
    }

    /// Ascending 1-based indices.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1..=7u8).filter(move |q| self.contains(*q))
    }

    /// Every subset of the 7 qubits with exactly `k` members, ascending by bits.
    pub fn all_of_size(k: u32) -> impl Iterator<Item = Self> {
        (0..=FULL).filter(move |b| b.count_ones() == k).map(Self)
    }
}

impl fmt::Debug for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Pauli operator on 7 qubits without phase.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pauli {
    x: u8,
    z: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliType {
    X,
    Z,
}

impl Pauli {
    pub const IDENTITY: Self = Self { x: 0, z: 0 };

    pub fn new(x_bits: u8, z_bits: u8) -> Self {
        Self {
            x: x_bits & FULL,
            z: z_bits & FULL,
        }
    }

    pub fn x_type(support: QubitSet) -> Self {
        Self::new(support.bits(), 0)
    }

    pub fn z_type(support: QubitSet) -> Self {
        Self::new(0, support.bits())
    }

    pub fn of_type(ty: PauliType, support: QubitSet) -> Self {
        match ty {
            PauliType::X => Self::x_type(support),
            PauliType::Z => Self::z_type(support),
        }
    }

    pub fn x_bits(self) -> u8 {
        self.x
    }

    pub fn z_bits(self) -> u8 {
        self.z
    }

    pub fn support(self) -> QubitSet {
        QubitSet(self.x | self.z)
    }

    pub fn weight(self) -> u32 {
        self.support().len()
    }

    pub fn is_identity(self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// `0` iff the operators commute.
    pub fn symplectic_product(self, other: Self) -> u8 {
        (((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2) as u8
    }

    pub fn commutes_with(self, other: Self) -> bool {
        self.symplectic_product(other) == 0
    }

    /// `Some(X)` / `Some(Z)` for pure operators; `None` for mixed ones and the
    /// identity.
    pub fn pure_type(self) -> Option<PauliType> {
        match (self.x != 0, self.z != 0) {
            (true, false) => Some(PauliType::X),
            (false, true) => Some(PauliType::Z),
            _ => None,
        }
    }
}

/// Product up to phase.
impl core::ops::Mul for Pauli {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        Self {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..N_QUBITS {
            let c = match ((self.x >> i) & 1, (self.z >> i) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsePauliError(pub String);

impl fmt::Display for ParsePauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid Pauli string {:?}: expected 7 characters from IXYZ",
            self.0
        )
    }
}

impl core::error::Error for ParsePauliError {}

impl FromStr for Pauli {
    type Err = ParsePauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePauliError(s.into());
        if s.chars().count() != N_QUBITS {
            return Err(err());
        }
        let (mut x, mut z) = (0u8, 0u8);
        for (i, c) in s.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << i,
                'Z' => z |= 1 << i,
                'Y' => {
                    x |= 1 << i;
                    z |= 1 << i;
                }
                _ => return Err(err()),
            }
        }
        Ok(Self { x, z })
    }
}

/// The Steane code's X-type generator supports, one row per generator.
const GENERATOR_ROWS: [&str; 3] = ["1111000", "1100110", "1010101"];

fn row_bits(row: &str) -> u8 {
    row.bytes()
        .enumerate()
        .filter(|(_, b)| *b == b'1')
        .fold(0, |acc, (i, _)| acc | (1 << i))
}

/// Generators plus all their products.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    generators: Vec<Pauli>,
    elements: Vec<Pauli>,
}

impl StabilizerGroup {
    /// Closes the generators under multiplication. Generators must commute
    /// pairwise; dependent generators are allowed and simply add nothing.
    pub fn from_generators(generators: Vec<Pauli>) -> Self {
        debug_assert!(generators
            .iter()
            .all(|a| generators.iter().all(|b| a.commutes_with(*b))));
        let mut elements = alloc::vec![Pauli::IDENTITY];
        for g in &generators {
            if elements.contains(g) {
                continue;
            }
            let extra: Vec<Pauli> = elements.iter().map(|e| *e * *g).collect();
            elements.extend(extra);
        }
        elements.sort();
        Self {
            generators,
            elements,
        }
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.generators
    }

    pub fn elements(&self) -> &[Pauli] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: Pauli) -> bool {
        self.elements.binary_search(&p).is_ok()
    }

    /// Elements that are pure X or pure Z of the given type (identity excluded).
    pub fn of_type(&self, ty: PauliType) -> impl Iterator<Item = Pauli> + '_ {
        self.elements
            .iter()
            .copied()
            .filter(move |p| p.pure_type() == Some(ty))
    }

    /// Pure elements of either type whose support is exactly `support`.
    pub fn with_support(&self, ty: PauliType, support: QubitSet) -> Option<Pauli> {
        let p = Pauli::of_type(ty, support);
        (!support.is_empty() && self.contains(p)).then_some(p)
    }
}

/// The six generators M1..M6: X-type first, then the matching Z-type ones.
pub fn steane_generators() -> Vec<Pauli> {
    let rows = GENERATOR_ROWS.map(row_bits);
    rows.iter()
        .map(|&b| Pauli::new(b, 0))
        .chain(rows.iter().map(|&b| Pauli::new(0, b)))
        .collect()
}

pub fn steane_stabilizers() -> StabilizerGroup {
    StabilizerGroup::from_generators(steane_generators())
}

/// The transversal logical operator of the given type.
pub fn logical_representative(ty: PauliType) -> Pauli {
    Pauli::of_type(ty, QubitSet::ALL)
}

/// All pure operators of type `ty` in the coset `L·S`, i.e. the logical
/// representative times every same-type stabilizer (including identity).
pub fn logical_coset(ty: PauliType) -> Vec<Pauli> {
    let group = steane_stabilizers();
    let l = logical_representative(ty);
    let mut out: Vec<Pauli> = core::iter::once(Pauli::IDENTITY)
        .chain(group.of_type(ty))
        .map(|s| s * l)
        .collect();
    out.sort();
    out
}

/// Precomputed support families used by the correctability and
/// helper-selection queries.
#[derive(Clone, Debug)]
pub struct SteaneCode {
    group: StabilizerGroup,
    /// Supports of non-trivial logical operators of either pure type.
    logical_supports: Vec<QubitSet>,
    /// Supports of weight-4 stabilizers (identical for X and Z type).
    stabilizer_quads: Vec<QubitSet>,
}

impl Default for SteaneCode {
    fn default() -> Self {
        Self::new()
    }
}

impl SteaneCode {
    pub fn new() -> Self {
        let group = steane_stabilizers();
        let mut logical_supports: Vec<QubitSet> = [PauliType::X, PauliType::Z]
            .into_iter()
            .flat_map(logical_coset)
            .map(Pauli::support)
            .collect();
        logical_supports.sort();
        logical_supports.dedup();
        let mut stabilizer_quads: Vec<QubitSet> = group
            .of_type(PauliType::X)
            .map(Pauli::support)
            .filter(|s| s.len() == 4)
            .collect();
        stabilizer_quads.sort();
        Self {
            group,
            logical_supports,
            stabilizer_quads,
        }
    }

    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn stabilizer_quads(&self) -> &[QubitSet] {
        &self.stabilizer_quads
    }

    pub fn logical_supports(&self) -> &[QubitSet] {
        &self.logical_supports
    }

    /// True iff some non-trivial logical operator lives entirely on `support`,
    /// i.e. erasing exactly these qubits destroys the encoded information.
    pub fn supports_logical(&self, support: QubitSet) -> bool {
        self.logical_supports.iter().any(|l| l.is_subset(support))
    }

    /// X- and Z-type stabilizer elements whose support is exactly the given
    /// 4-qubit set.
    pub fn covering_stabilizer_pair(
        &self,
        support: QubitSet,
    ) -> Result<(Pauli, Pauli), NoCoveringStabilizer> {
        if support.len() != 4 {
            return Err(NoCoveringStabilizer(support));
        }
        match (
            self.group.with_support(PauliType::X, support),
            self.group.with_support(PauliType::Z, support),
        ) {
            (Some(x), Some(z)) => Ok((x, z)),
            _ => Err(NoCoveringStabilizer(support)),
        }
    }

    /// Weight-4 stabilizer supports containing `target` and avoiding every
    /// qubit of `avoid`, ascending by their helper triples.
    pub fn covering_quads(
        &self,
        target: u8,
        avoid: QubitSet,
    ) -> impl Iterator<Item = QubitSet> + '_ {
        let avoid = avoid.without(target);
        self.stabilizer_quads
            .iter()
            .copied()
            .filter(move |q| q.contains(target) && q.intersection(avoid).is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoCoveringStabilizer(pub QubitSet);

impl fmt::Display for NoCoveringStabilizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no stabilizer element has support {:?}", self.0)
    }
}

impl core::error::Error for NoCoveringStabilizer {}
