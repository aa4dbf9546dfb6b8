//! Break-even thresholds and concatenation projections.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{binomial, int, ratio, round_significant, Poly, Rational};
use crate::chain::TransitionMatrix;

/// Which level-1 rate counts as "no better than unencoded".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BreakEvenCondition {
    /// `ε⁽¹⁾ = ε`.
    IdealGate,
    /// `ε⁽¹⁾ = ε/2`: only half of the unencoded failures are full erasures,
    /// while every encoded failure is treated as one.
    LossyGate,
    /// `δ⁽¹⁾ = δ`.
    Measurement,
}

impl BreakEvenCondition {
    /// The factor `c` in `recursion(x) = c·x`.
    pub fn factor(self) -> Rational {
        match self {
            BreakEvenCondition::LossyGate => ratio(1, 2),
            _ => Rational::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BreakEvenCondition::IdealGate => "ideal-gate",
            BreakEvenCondition::LossyGate => "lossy-gate",
            BreakEvenCondition::Measurement => "measurement",
        }
    }
}

/// A level-1 map `x ↦ x⁽¹⁾`.
pub trait Recursion {
    fn eval(&self, x: &Rational) -> Rational;
    fn provenance(&self) -> String;
}

impl Recursion for TransitionMatrix {
    fn eval(&self, x: &Rational) -> Rational {
        self.encoded_failure_at(x)
    }

    fn provenance(&self) -> String {
        alloc::format!("full-chain ({} classes)", self.len())
    }
}

/// A fixed univariate polynomial in ε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRecursion {
    pub poly: Poly,
    pub name: String,
}

impl Recursion for PolyRecursion {
    fn eval(&self, x: &Rational) -> Rational {
        self.poly.eval(x, &Rational::zero())
    }

    fn provenance(&self) -> String {
        self.name.clone()
    }
}

/// Majority-vote readout of the seven-qubit block: fails when three or more
/// of the seven measurements are lost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MeasurementRecursion;

impl Recursion for MeasurementRecursion {
    fn eval(&self, x: &Rational) -> Rational {
        measurement_recursion(x)
    }

    fn provenance(&self) -> String {
        "measurement binomial tail".into()
    }
}

/// `Σ_{i=3}^{7} C(7,i) δ^i (1-δ)^(7-i)`.
pub fn measurement_recursion(delta: &Rational) -> Rational {
    let q = Rational::one() - delta;
    (3..=7u32).fold(Rational::zero(), |acc, i| {
        acc + Rational::from_integer(binomial(7, i))
            * num_traits::pow(delta.clone(), i as usize)
            * num_traits::pow(q.clone(), (7 - i) as usize)
    })
}

/// [`measurement_recursion`] as a polynomial in δ (stored in the ε slot).
pub fn measurement_poly() -> Poly {
    let d = Poly::eps();
    let q = &Poly::one() - &d;
    (3..=7u32).fold(Poly::zero(), |acc, i| {
        let term = (&d.pow(i) * &q.pow(7 - i)).scale(&Rational::from_integer(binomial(7, i)));
        &acc + &term
    })
}

/// Reference level-1 ideal-gate series through ε⁶.
pub fn reference_ideal_series() -> Poly {
    Poly::from_eps_coeffs([0, 0, 0, 56, 406, 3878, -129675].map(int))
}

/// Reference level-1 lossy-gate series through ε⁶ (on `δ = ε`).
pub fn reference_lossy_series() -> Poly {
    Poly::from_eps_coeffs([0, 0, 0, 1050, 33173, -46242, -6861701].map(int))
}

pub const REFERENCE_IDEAL_THRESHOLD: f64 = 0.115;
pub const REFERENCE_LOSSY_THRESHOLD: f64 = 0.0178;
pub const REFERENCE_MEASUREMENT_THRESHOLD: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdResult {
    pub condition: BreakEvenCondition,
    /// Midpoint of the final bracket.
    pub root: Rational,
    pub lo: Rational,
    pub hi: Rational,
    pub iterations: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThresholdError {
    /// `recursion(x) - c·x` has the same sign at both ends.
    NoSignChange {
        lo: Rational,
        hi: Rational,
        g_lo: Rational,
        g_hi: Rational,
    },
    InvalidBracket {
        lo: Rational,
        hi: Rational,
    },
    InvalidTolerance,
}

impl fmt::Display for ThresholdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = crate::arith::to_f64;
        match self {
            ThresholdError::NoSignChange { lo, hi, g_lo, g_hi } => write!(
                f,
                "no sign change on [{}, {}]: recursion - condition = {:e} and {:e}",
                d(lo),
                d(hi),
                d(g_lo),
                d(g_hi)
            ),
            ThresholdError::InvalidBracket { lo, hi } => {
                write!(f, "invalid bracket [{}, {}]", d(lo), d(hi))
            }
            ThresholdError::InvalidTolerance => f.write_str("tolerance must be positive"),
        }
    }
}

impl core::error::Error for ThresholdError {}

pub fn default_tolerance() -> Rational {
    ratio(1, 1_000_000)
}

/// Bisects `recursion(x) - c·x` on `[lo, hi]` until the bracket is at most
/// `tol` wide.
pub fn solve_break_even(
    recursion: &dyn Recursion,
    condition: BreakEvenCondition,
    lo: &Rational,
    hi: &Rational,
    tol: &Rational,
) -> Result<ThresholdResult, ThresholdError> {
    if lo >= hi {
        return Err(ThresholdError::InvalidBracket {
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    if !tol.is_positive() {
        return Err(ThresholdError::InvalidTolerance);
    }
    let c = condition.factor();
    let g = |x: &Rational| recursion.eval(x) - &c * x;
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let g_lo = g(&lo);
    let g_hi = g(&hi);
    let done = |lo: Rational, hi: Rational, iterations| {
        let root = (&lo + &hi) / int(2);
        Ok(ThresholdResult {
            condition,
            root,
            lo,
            hi,
            iterations,
        })
    };
    if g_lo.is_zero() {
        return done(lo.clone(), lo, 0);
    }
    if g_hi.is_zero() {
        return done(hi.clone(), hi, 0);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(ThresholdError::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let lo_sign = g_lo.signum();
    let mut iterations = 0;
    while &hi - &lo > *tol {
        iterations += 1;
        let mid = (&lo + &hi) / int(2);
        let gm = g(&mid);
        if gm.is_zero() {
            return done(mid.clone(), mid, iterations);
        }
        if gm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    done(lo, hi, iterations)
}

/// Significant bits kept between concatenation levels.
pub const CONCAT_PRECISION_BITS: u32 = 256;

/// Rates at levels `1..=levels`, each obtained from the previous by
/// `x ← recursion(x) / c`, so the break-even root is a fixed point. Values are
/// kept in `[0, 1]` and rounded to [`CONCAT_PRECISION_BITS`] between levels.
pub fn concat_projection(
    recursion: &dyn Recursion,
    condition: BreakEvenCondition,
    x0: &Rational,
    levels: u32,
) -> Vec<Rational> {
    let c = condition.factor();
    let mut x = x0.clone();
    let mut out = Vec::with_capacity(levels as usize);
    for _ in 0..levels {
        let mut next = recursion.eval(&x) / &c;
        if next > Rational::one() {
            next = Rational::one();
        }
        if next.is_negative() {
            next = Rational::zero();
        }
        x = round_significant(&next, CONCAT_PRECISION_BITS);
        out.push(x.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::to_f64;

    struct Square;
    impl Recursion for Square {
        fn eval(&self, x: &Rational) -> Rational {
            x * x
        }
        fn provenance(&self) -> String {
            "x^2".into()
        }
    }

    fn bin_tail_f64(d: f64) -> f64 {
        let c = [1.0, 7.0, 21.0, 35.0, 35.0, 21.0, 7.0, 1.0];
        (3..=7)
            .map(|i| c[i] * d.powi(i as i32) * (1.0 - d).powi(7 - i as i32))
            .sum()
    }

    #[test]
    fn measurement_recursion_values() {
        assert!(measurement_recursion(&Rational::zero()).is_zero());
        assert!(measurement_recursion(&Rational::one()).is_one());
        let q = to_f64(&measurement_recursion(&ratio(1, 4)));
        assert!((q - 0.24359).abs() < 1e-5, "{q}");
        assert!((q - bin_tail_f64(0.25)).abs() < 1e-15);
        for k in 0..=20 {
            let x = ratio(k, 20);
            assert_eq!(
                measurement_poly().eval(&x, &Rational::zero()),
                measurement_recursion(&x)
            );
        }
    }

    #[test]
    fn measurement_recursion_is_monotone() {
        let mut last = Rational::zero();
        for k in 1..=100 {
            let v = measurement_recursion(&ratio(k, 100));
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn measurement_threshold() {
        let r = solve_break_even(
            &MeasurementRecursion,
            BreakEvenCondition::Measurement,
            &ratio(1, 10),
            &ratio(2, 5),
            &default_tolerance(),
        )
        .unwrap();
        let root = to_f64(&r.root);
        assert!((root - 0.2559).abs() < 1e-3, "{root}");
        assert!(&r.hi - &r.lo <= default_tolerance());
        // independent check by f64 bisection
        let (mut a, mut b) = (0.1f64, 0.4f64);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if bin_tail_f64(m) - m < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((root - a).abs() < 1e-6);
    }

    #[test]
    fn square_fixed_point() {
        let r = solve_break_even(
            &Square,
            BreakEvenCondition::IdealGate,
            &ratio(1, 2),
            &ratio(3, 2),
            &default_tolerance(),
        )
        .unwrap();
        assert!(r.root.is_one());
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn reference_lossy_series_root() {
        let rec = PolyRecursion {
            poly: reference_lossy_series(),
            name: "lossy".into(),
        };
        let v = to_f64(&rec.eval(&ratio(89, 5000)));
        assert!((v - 0.008951).abs() < 1e-6, "{v}");
        let r = solve_break_even(
            &rec,
            BreakEvenCondition::LossyGate,
            &ratio(1, 1000),
            &ratio(1, 20),
            &default_tolerance(),
        )
        .unwrap();
        assert!((to_f64(&r.root) - 0.0178).abs() < 5e-4);
    }

    #[test]
    fn reference_ideal_series_has_no_fixed_point() {
        let rec = PolyRecursion {
            poly: reference_ideal_series(),
            name: "ideal".into(),
        };
        let err = solve_break_even(
            &rec,
            BreakEvenCondition::IdealGate,
            &ratio(1, 1000),
            &ratio(1, 5),
            &default_tolerance(),
        )
        .unwrap_err();
        assert!(matches!(err, ThresholdError::NoSignChange { .. }));
        // and it stays below the diagonal across the whole interval
        for k in 1..200 {
            let x = ratio(k, 1000);
            assert!(rec.eval(&x) < x);
        }
    }

    #[test]
    fn bad_inputs() {
        let e = solve_break_even(
            &Square,
            BreakEvenCondition::IdealGate,
            &ratio(1, 2),
            &ratio(1, 2),
            &default_tolerance(),
        );
        assert!(matches!(e, Err(ThresholdError::InvalidBracket { .. })));
        let e = solve_break_even(
            &Square,
            BreakEvenCondition::IdealGate,
            &ratio(1, 2),
            &ratio(3, 2),
            &Rational::zero(),
        );
        assert_eq!(e, Err(ThresholdError::InvalidTolerance));
    }

    #[test]
    fn tighter_tolerance_nests() {
        let solve = |tol| {
            solve_break_even(
                &MeasurementRecursion,
                BreakEvenCondition::Measurement,
                &ratio(1, 10),
                &ratio(2, 5),
                &tol,
            )
            .unwrap()
        };
        let coarse = solve(ratio(1, 1000));
        let fine = solve(ratio(1, 2000));
        assert!(fine.lo >= coarse.lo && fine.hi <= coarse.hi);
    }

    #[test]
    fn concat_examples() {
        let seq = concat_projection(
            &MeasurementRecursion,
            BreakEvenCondition::Measurement,
            &ratio(1, 10),
            3,
        );
        assert!((to_f64(&seq[0]) - bin_tail_f64(0.1)).abs() < 1e-15);
        assert!((to_f64(&seq[0]) - 0.0256915).abs() < 1e-7);
        assert!(seq[0] > seq[1] && seq[1] > seq[2]);
        let mut prev = ratio(1, 10);
        for x in &seq {
            let expect = to_f64(&measurement_recursion(&prev));
            assert!((to_f64(x) - expect).abs() <= 1e-12 * expect.max(1e-300));
            prev = x.clone();
        }
        let zeros = concat_projection(
            &MeasurementRecursion,
            BreakEvenCondition::Measurement,
            &Rational::zero(),
            4,
        );
        assert!(zeros.iter().all(Zero::is_zero));
        let ones = concat_projection(&Square, BreakEvenCondition::IdealGate, &Rational::one(), 4);
        assert!(ones.iter().all(One::is_one));
        // above threshold the sequence grows
        let up = concat_projection(
            &MeasurementRecursion,
            BreakEvenCondition::Measurement,
            &ratio(3, 10),
            3,
        );
        assert!(up[0] > ratio(3, 10) && up[1] > up[0]);
    }
}
