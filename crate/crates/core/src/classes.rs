//! Reduction of the pattern chain to equivalence classes.
//!
//! Patterns are first grouped into orbits of a qubit-permutation group, the
//! grouping is refined until every class is lumpable (all members send the
//! same probability into every class), and optionally classes with identical
//! outgoing rows are merged until nothing changes.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::Poly;
use crate::circuits::Procedure;
use crate::erasure::{
    all_patterns, initial_distribution, Correctability, ErasurePattern, ErrorModel,
};
use crate::pauli::{QubitSet, SteaneCode, N_QUBITS};

pub type ClassId = usize;

/// Permutations of the seven qubits, `perm[i]` the 0-based image of qubit
/// `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationGroup {
    perms: Vec<[u8; N_QUBITS]>,
}

impl PermutationGroup {
    pub fn trivial() -> Self {
        Self {
            perms: alloc::vec![[0, 1, 2, 3, 4, 5, 6]],
        }
    }

    /// Qubit permutations that map stabilizer supports to stabilizer
    /// supports (the 168-element symmetry group of the Fano plane).
    pub fn code_automorphisms(code: &SteaneCode) -> Self {
        let quads = code.stabilizer_quads();
        let mut perms = Vec::new();
        let mut perm = [0u8, 1, 2, 3, 4, 5, 6];
        permutations(&mut perm, 0, &mut |p| {
            let maps = quads.iter().all(|q| {
                let image = QubitSet::from_qubits(q.iter().map(|x| p[(x - 1) as usize] + 1));
                quads.contains(&image)
            });
            if maps {
                perms.push(*p);
            }
        });
        perms.sort_unstable();
        Self { perms }
    }

    pub fn perms(&self) -> &[[u8; N_QUBITS]] {
        &self.perms
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn orbit(&self, p: &ErasurePattern) -> Vec<ErasurePattern> {
        let mut out: Vec<_> = self.perms.iter().map(|g| p.permuted(g)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn permutations(a: &mut [u8; N_QUBITS], k: usize, visit: &mut impl FnMut(&[u8; N_QUBITS])) {
    if k == N_QUBITS {
        visit(a);
        return;
    }
    for i in k..N_QUBITS {
        a.swap(k, i);
        permutations(a, k + 1, visit);
        a.swap(k, i);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassOptions {
    pub group: PermutationGroup,
    /// Merge classes whose outgoing rows coincide.
    pub merge: bool,
}

impl ClassOptions {
    pub fn reduced(code: &SteaneCode) -> Self {
        Self {
            group: PermutationGroup::code_automorphisms(code),
            merge: true,
        }
    }

    pub fn unreduced() -> Self {
        Self {
            group: PermutationGroup::trivial(),
            merge: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivClass {
    pub id: ClassId,
    pub representative: ErasurePattern,
    pub size: usize,
    pub label: String,
}

/// A lumpable partition of all patterns of one model together with the
/// per-class transition rows of one attempt.
#[derive(Clone, Debug)]
pub struct ClassTable {
    model: ErrorModel,
    classes: Vec<EquivClass>,
    members: Vec<Vec<ErasurePattern>>,
    class_of: BTreeMap<ErasurePattern, ClassId>,
    rows: Vec<BTreeMap<ClassId, Poly>>,
    intact: ClassId,
    fail: ClassId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassUnsound {
    pub class: ClassId,
    pub member: ErasurePattern,
    pub representative: ErasurePattern,
}

impl fmt::Display for ClassUnsound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "class {} is not lumpable: {} and {} have different transition rows",
            self.class, self.member, self.representative
        )
    }
}

impl core::error::Error for ClassUnsound {}

impl ClassTable {
    pub fn model(&self) -> ErrorModel {
        self.model
    }

    pub fn classes(&self) -> &[EquivClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn members(&self, id: ClassId) -> &[ErasurePattern] {
        &self.members[id]
    }

    pub fn class_of(&self, p: &ErasurePattern) -> ClassId {
        self.class_of[p]
    }

    pub fn intact(&self) -> ClassId {
        self.intact
    }

    pub fn fail(&self) -> ClassId {
        self.fail
    }

    /// Outgoing probabilities of class `id` after one attempt.
    pub fn row(&self, id: ClassId) -> &BTreeMap<ClassId, Poly> {
        &self.rows[id]
    }

    pub fn find(&self, label: &str) -> Option<ClassId> {
        self.classes.iter().position(|c| c.label == label)
    }

    /// Injected-noise distribution summed per class.
    pub fn initial_distribution(&self) -> Vec<Poly> {
        let mut out = alloc::vec![Poly::zero(); self.len()];
        for (p, pr) in initial_distribution(self.model) {
            out[self.class_of[&p]] += &pr;
        }
        out
    }

    /// Recomputes every member's row from scratch and compares it with the
    /// representative's.
    pub fn verify(&self, proc: &Procedure) -> Result<(), ClassUnsound> {
        for c in &self.classes {
            let rep_row = self.project(proc, &c.representative);
            if rep_row != self.rows[c.id] {
                return Err(ClassUnsound {
                    class: c.id,
                    member: c.representative,
                    representative: c.representative,
                });
            }
            for m in &self.members[c.id] {
                if self.project(proc, m) != rep_row {
                    return Err(ClassUnsound {
                        class: c.id,
                        member: *m,
                        representative: c.representative,
                    });
                }
            }
        }
        Ok(())
    }

    fn project(&self, proc: &Procedure, p: &ErasurePattern) -> BTreeMap<ClassId, Poly> {
        let mut row: BTreeMap<ClassId, Poly> = BTreeMap::new();
        for (q, pr) in proc.attempt(p).entries {
            *row.entry(self.class_of[&q]).or_default() += &pr;
        }
        row.retain(|_, v| !v.is_zero());
        row
    }
}

/// Groups all patterns of the procedure's model into lumpable classes.
pub fn build_classes(proc: &Procedure, options: &ClassOptions) -> ClassTable {
    let model = proc.model();
    let patterns = all_patterns(model);
    let index: BTreeMap<ErasurePattern, usize> =
        patterns.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let rows: Vec<Vec<(usize, Poly)>> = patterns
        .iter()
        .map(|p| {
            proc.attempt(p)
                .entries
                .into_iter()
                .map(|(q, pr)| (index[&q], pr))
                .collect()
        })
        .collect();

    let mut block = alloc::vec![usize::MAX; patterns.len()];
    let mut next = 0;
    for (i, p) in patterns.iter().enumerate() {
        if block[i] != usize::MAX {
            continue;
        }
        for q in options.group.orbit(p) {
            block[index[&q]] = next;
        }
        next += 1;
    }

    let signature = |block: &[usize], i: usize| -> BTreeMap<usize, Poly> {
        let mut sig: BTreeMap<usize, Poly> = BTreeMap::new();
        for (j, pr) in &rows[i] {
            *sig.entry(block[*j]).or_default() += pr;
        }
        sig.retain(|_, v| !v.is_zero());
        sig
    };

    loop {
        let mut refined = refine(&block, |i| signature(&block, i));
        let changed = count_blocks(&refined) != count_blocks(&block);
        if changed {
            block = refined;
            continue;
        }
        if !options.merge {
            break;
        }
        // identical rows: merge by signature alone
        let sigs: Vec<_> = (0..patterns.len()).map(|i| signature(&block, i)).collect();
        let mut ids: BTreeMap<&BTreeMap<usize, Poly>, usize> = BTreeMap::new();
        for (i, s) in sigs.iter().enumerate() {
            let n = ids.len();
            refined[i] = *ids.entry(s).or_insert(n);
        }
        if count_blocks(&refined) == count_blocks(&block) {
            break;
        }
        block = refined;
    }

    assemble(proc, model, &patterns, &block, &rows)
}

/// Splits every block by `key`, numbering the result canonically.
fn refine<K: Ord>(block: &[usize], key: impl Fn(usize) -> K) -> Vec<usize> {
    let mut ids: BTreeMap<(usize, K), usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(block.len());
    for (i, b) in block.iter().enumerate() {
        let n = ids.len();
        out.push(*ids.entry((*b, key(i))).or_insert(n));
    }
    out
}

fn count_blocks(block: &[usize]) -> usize {
    block.iter().max().map_or(0, |m| m + 1)
}

fn assemble(
    proc: &Procedure,
    model: ErrorModel,
    patterns: &[ErasurePattern],
    block: &[usize],
    rows: &[Vec<(usize, Poly)>],
) -> ClassTable {
    let failed = ErasurePattern::failed(model);
    let mut groups: BTreeMap<usize, Vec<ErasurePattern>> = BTreeMap::new();
    for (i, b) in block.iter().enumerate() {
        groups.entry(*b).or_default().push(patterns[i]);
    }
    let mut members: Vec<Vec<ErasurePattern>> = groups.into_values().collect();
    for m in &mut members {
        m.sort_by_key(|p| (p.weight(), *p));
    }
    // intact first, failure last, otherwise by lightest member
    members.sort_by_key(|m| (m.contains(&failed), m[0].weight(), m[0]));

    let mut class_of = BTreeMap::new();
    for (id, m) in members.iter().enumerate() {
        for p in m {
            class_of.insert(*p, id);
        }
    }
    let classes: Vec<EquivClass> = members
        .iter()
        .enumerate()
        .map(|(id, m)| EquivClass {
            id,
            representative: m[0],
            size: m.len(),
            label: class_label(proc, model, m, &failed),
        })
        .collect();
    let old_index: BTreeMap<ErasurePattern, usize> =
        patterns.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let class_rows = members
        .iter()
        .map(|m| {
            let mut row: BTreeMap<ClassId, Poly> = BTreeMap::new();
            for (j, pr) in &rows[old_index[&m[0]]] {
                *row.entry(class_of[&patterns[*j]]).or_default() += pr;
            }
            row.retain(|_, v| !v.is_zero());
            row
        })
        .collect();
    ClassTable {
        model,
        intact: class_of[&ErasurePattern::INTACT],
        fail: class_of[&failed],
        classes,
        members,
        class_of,
        rows: class_rows,
    }
}

fn pattern_label(proc: &Procedure, model: ErrorModel, p: &ErasurePattern) -> String {
    match model {
        ErrorModel::Ideal => {
            let w = p.weight();
            if w == 3 && proc.classify(p) == Correctability::Correctable {
                alloc::format!("{w}c")
            } else {
                alloc::format!("{w}")
            }
        }
        ErrorModel::Lossy => {
            let base = p.composition().label();
            if p.weight() == 3 && proc.classify(p) == Correctability::Correctable {
                base + "c"
            } else {
                base
            }
        }
    }
}

fn class_label(
    proc: &Procedure,
    model: ErrorModel,
    members: &[ErasurePattern],
    failed: &ErasurePattern,
) -> String {
    if members.contains(failed) {
        return "fail".into();
    }
    let mut labels: Vec<String> = members
        .iter()
        .map(|p| pattern_label(proc, model, p))
        .collect();
    labels.sort();
    labels.dedup();
    labels.join("|")
}
