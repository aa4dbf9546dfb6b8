//! Absorbing Markov chain over equivalence classes.
//!
//! The two absorbing classes are the intact block and the failure sink. The
//! encoded failure rate is the mass that ends up in the sink, starting from
//! the injected-noise distribution.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::arith::{Poly, Rational};
use crate::circuits::Procedure;
use crate::classes::{build_classes, ClassId, ClassOptions, ClassTable, ClassUnsound, EquivClass};
use crate::erasure::{ErrorModel, ModelParams};

/// One correction attempt as a class-by-class matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    model: ErrorModel,
    classes: Vec<EquivClass>,
    rows: Vec<BTreeMap<ClassId, Poly>>,
    initial: Vec<Poly>,
    intact: ClassId,
    fail: ClassId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainResult {
    pub encoded_failure: Rational,
    /// `None` when solved to absorption.
    pub attempts_used: Option<u32>,
    pub residual_mass: Rational,
}

/// Builds, verifies and assembles the chain for `proc`.
pub fn build_chain(
    proc: &Procedure,
    options: &ClassOptions,
) -> Result<TransitionMatrix, ClassUnsound> {
    let table = build_classes(proc, options);
    table.verify(proc)?;
    Ok(TransitionMatrix::from_table(&table))
}

impl TransitionMatrix {
    pub fn from_table(table: &ClassTable) -> Self {
        Self {
            model: table.model(),
            classes: table.classes().to_vec(),
            rows: (0..table.len()).map(|c| table.row(c).clone()).collect(),
            initial: table.initial_distribution(),
            intact: table.intact(),
            fail: table.fail(),
        }
    }

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

    pub fn intact(&self) -> ClassId {
        self.intact
    }

    pub fn fail(&self) -> ClassId {
        self.fail
    }

    pub fn absorbing(&self) -> [ClassId; 2] {
        [self.intact, self.fail]
    }

    pub fn row(&self, i: ClassId) -> &BTreeMap<ClassId, Poly> {
        &self.rows[i]
    }

    pub fn entry(&self, i: ClassId, j: ClassId) -> Poly {
        self.rows[i].get(&j).cloned().unwrap_or_default()
    }

    pub fn initial(&self) -> &[Poly] {
        &self.initial
    }

    pub fn transient(&self) -> Vec<ClassId> {
        (0..self.len())
            .filter(|c| *c != self.intact && *c != self.fail)
            .collect()
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.values().fold(Poly::zero(), |a, p| &a + p).is_one())
    }

    /// Numeric rows and initial vector at one operating point.
    fn evaluate(&self, params: &ModelParams) -> (Vec<BTreeMap<ClassId, Rational>>, Vec<Rational>) {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(j, p)| (*j, p.eval(&params.eps, &params.delta)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        let init = self
            .initial
            .iter()
            .map(|p| p.eval(&params.eps, &params.delta))
            .collect();
        (rows, init)
    }

    /// Encoded failure at `params`. With `max_attempts = None` the chain is
    /// solved to absorption exactly; otherwise the distribution is pushed
    /// through that many attempts and the unabsorbed mass is reported.
    pub fn run_to_absorption(
        &self,
        params: &ModelParams,
        max_attempts: Option<u32>,
    ) -> ChainResult {
        let (rows, init) = self.evaluate(params);
        match max_attempts {
            None => {
                let absorb = solve_absorption(&rows, &self.transient(), self.fail);
                let pf = init
                    .iter()
                    .zip(&absorb)
                    .fold(Rational::zero(), |a, (p, x)| a + p * x);
                ChainResult {
                    encoded_failure: pf,
                    attempts_used: None,
                    residual_mass: Rational::zero(),
                }
            }
            Some(t) => {
                let mut v = init;
                for _ in 0..t {
                    let mut next = alloc::vec![Rational::zero(); v.len()];
                    for (i, vi) in v.iter().enumerate() {
                        if vi.is_zero() {
                            continue;
                        }
                        for (j, p) in &rows[i] {
                            next[*j] += vi * p;
                        }
                    }
                    v = next;
                }
                let residual = Rational::one() - &v[self.fail] - &v[self.intact];
                ChainResult {
                    encoded_failure: v[self.fail].clone(),
                    attempts_used: Some(t),
                    residual_mass: residual,
                }
            }
        }
    }

    /// Exact encoded failure on the model's threshold line: `ε = x` for the
    /// ideal model, `ε = δ = x` for the lossy one.
    pub fn encoded_failure_at(&self, x: &Rational) -> Rational {
        self.run_to_absorption(&ModelParams::at(self.model, x.clone()), None)
            .encoded_failure
    }

    /// Encoded failure as a bivariate series, truncated at total degree
    /// `order`.
    pub fn encoded_failure_series(&self, order: u32) -> Poly {
        series(&self.rows, &self.initial, self.intact, self.fail, order)
    }

    /// Encoded failure as a series in ε, with `δ = ε` for the lossy model.
    pub fn recursion_series(&self, order: u32) -> Poly {
        let rows: Vec<BTreeMap<ClassId, Poly>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|(j, p)| (*j, p.diagonal())).collect())
            .collect();
        let init: Vec<Poly> = self.initial.iter().map(Poly::diagonal).collect();
        series(&rows, &init, self.intact, self.fail, order)
    }
}

/// Absorption probability into `fail` for every class, by Gaussian
/// elimination of `(I - Q) x = r` on the transient classes.
pub fn solve_absorption(
    rows: &[BTreeMap<ClassId, Rational>],
    transient: &[ClassId],
    fail: ClassId,
) -> Vec<Rational> {
    let n = transient.len();
    let pos: BTreeMap<ClassId, usize> =
        transient.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let mut a = alloc::vec![alloc::vec![Rational::zero(); n + 1]; n];
    for (k, c) in transient.iter().enumerate() {
        a[k][k] = Rational::one();
        for (j, p) in &rows[*c] {
            if let Some(&m) = pos.get(j) {
                a[k][m] -= p;
            } else if *j == fail {
                a[k][n] += p;
            }
        }
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|r| !a[*r][col].is_zero())
            .expect("absorbing chain has a singular transient block");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col][col..].iter_mut() {
            *x *= &inv;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row[col..].iter_mut().zip(&prow[col..]) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
    }
    let mut out = alloc::vec![Rational::zero(); rows.len()];
    out[fail] = Rational::one();
    for (k, c) in transient.iter().enumerate() {
        out[*c] = a[k][n].clone();
    }
    out
}

/// `b ← R + Q b` truncated at `order` until it stops changing. Converges in
/// finitely many rounds because `Q` is nilpotent at zero noise.
fn series(
    rows: &[BTreeMap<ClassId, Poly>],
    init: &[Poly],
    intact: ClassId,
    fail: ClassId,
    order: u32,
) -> Poly {
    let n = rows.len();
    let mut b = alloc::vec![Poly::zero(); n];
    b[fail] = Poly::one();
    let limit = (order as usize + 2) * (n + 2) + 64;
    let mut settled = false;
    for _ in 0..limit {
        let mut next = b.clone();
        for i in 0..n {
            if i == intact || i == fail {
                continue;
            }
            let mut acc = Poly::zero();
            for (j, p) in &rows[i] {
                if !b[*j].is_zero() {
                    acc += &p.mul_truncated(&b[*j], order);
                }
            }
            next[i] = acc;
        }
        if next == b {
            settled = true;
            break;
        }
        b = next;
    }
    assert!(
        settled,
        "series iteration did not settle; the zero-noise chain is not nilpotent"
    );
    init.iter().zip(&b).fold(Poly::zero(), |acc, (p, x)| {
        &acc + &p.mul_truncated(x, order)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::classes::ClassOptions;

    fn chain(model: ErrorModel) -> TransitionMatrix {
        let proc = Procedure::with_defaults(model);
        build_chain(&proc, &ClassOptions::reduced(proc.code())).unwrap()
    }

    #[test]
    fn rows_are_stochastic_and_absorbing() {
        for model in [ErrorModel::Ideal, ErrorModel::Lossy] {
            let c = chain(model);
            assert!(c.is_row_stochastic());
            for a in c.absorbing() {
                assert_eq!(c.row(a).len(), 1);
                assert!(c.entry(a, a).is_one());
            }
        }
    }

    #[test]
    fn zero_noise_means_zero_failure() {
        for model in [ErrorModel::Ideal, ErrorModel::Lossy] {
            let c = chain(model);
            assert!(c.encoded_failure_at(&Rational::zero()).is_zero());
        }
    }

    #[test]
    fn series_has_cubic_leading_order() {
        for model in [ErrorModel::Ideal, ErrorModel::Lossy] {
            let s = chain(model).recursion_series(5);
            for k in 0..3 {
                assert!(s.coeff(k, 0).is_zero(), "{model:?} order {k}: {s}");
            }
            assert!(s.coeff(3, 0) >= int(7), "{model:?}: {s}");
        }
    }

    #[test]
    fn ideal_cubic_coefficient_by_hand() {
        // 7 bad weight-3 supports, plus weight-2 starts where a helper fails
        // (21 * 1) and weight-1 starts where two of three helpers fail in
        // sequence through a weight-2 state (7 * 3).
        let s = chain(ErrorModel::Ideal).recursion_series(3);
        assert_eq!(s.coeff(3, 0), int(49));
    }

    #[test]
    fn truncated_runs_approach_the_exact_solve() {
        let c = chain(ErrorModel::Lossy);
        let params = ModelParams::lossy_diagonal(ratio(1, 50));
        let exact = c.run_to_absorption(&params, None).encoded_failure;
        let mut last_residual = Rational::one();
        let mut last_fail = Rational::zero();
        for t in 1..=12 {
            let r = c.run_to_absorption(&params, Some(t));
            assert!(r.residual_mass <= last_residual);
            assert!(r.encoded_failure >= last_fail);
            assert!(r.encoded_failure <= exact);
            assert!(&exact - &r.encoded_failure <= r.residual_mass);
            last_residual = r.residual_mass;
            last_fail = r.encoded_failure;
        }
    }

    #[test]
    fn series_matches_exact_value_at_small_eps() {
        let c = chain(ErrorModel::Ideal);
        let x = ratio(1, 1000);
        let exact = c.encoded_failure_at(&x);
        let approx = c.recursion_series(7).eval(&x, &Rational::zero());
        let err = crate::arith::to_f64(&(&exact - &approx)).abs();
        assert!(err < 1e-15, "{err}");
    }

    #[test]
    fn bivariate_series_restricts_to_the_diagonal() {
        let c = chain(ErrorModel::Lossy);
        assert_eq!(
            c.encoded_failure_series(4).diagonal().truncate(4),
            c.recursion_series(4)
        );
    }

    #[test]
    fn probabilities_stay_in_unit_interval() {
        for model in [ErrorModel::Ideal, ErrorModel::Lossy] {
            let c = chain(model);
            for k in 0..=20 {
                let v = c.encoded_failure_at(&ratio(k, 80));
                assert!(
                    v >= Rational::zero() && v <= Rational::one(),
                    "{model:?} {k}/80"
                );
            }
        }
    }
}
