//! JSON and CSV encodings of engine results.

use std::fmt::Write as _;
use std::str::FromStr;

use erasure_ft::arith::{parse_rational, to_f64, Poly, Rational};
use erasure_ft::{ClassTable, EquivClass, TransitionMatrix};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One polynomial term with integers as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub eps_deg: u32,
    pub delta_deg: u32,
    pub num: String,
    pub den: String,
}

pub fn poly_to_json(p: &Poly) -> Vec<PolyTerm> {
    p.terms()
        .map(|((e, d), c)| PolyTerm {
            eps_deg: *e,
            delta_deg: *d,
            num: c.numer().to_string(),
            den: c.denom().to_string(),
        })
        .collect()
}

pub fn poly_from_json(terms: &[PolyTerm]) -> Result<Poly> {
    let int = |s: &str| {
        BigInt::from_str(s).map_err(|_| CliError::PolyJson(format!("not an integer: {s:?}")))
    };
    let mut out = Poly::zero();
    for t in terms {
        let den = int(&t.den)?;
        if !den.is_positive() {
            return Err(CliError::PolyJson(format!(
                "denominator must be positive: {:?}",
                t.den
            )));
        }
        let c = Rational::new(int(&t.num)?, den);
        out += &Poly::monomial(c, t.eps_deg, t.delta_deg);
    }
    Ok(out)
}

pub fn parse_number(s: &str) -> Result<Rational> {
    parse_rational(s.trim()).ok_or_else(|| CliError::Number(s.into()))
}

/// Comma list (`0.01,0.05`) or inclusive range `lo:hi:step`.
pub fn parse_grid(s: &str) -> Result<Vec<Rational>> {
    let bad = |reason| CliError::Grid {
        grid: s.into(),
        reason,
    };
    let points = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(bad("range must be lo:hi:step"));
        };
        let (lo, hi, step) = (parse_number(lo)?, parse_number(hi)?, parse_number(step)?);
        if !step.is_positive() {
            return Err(bad("step must be positive"));
        }
        if hi < lo {
            return Err(bad("hi must not be below lo"));
        }
        let mut out = Vec::new();
        let mut x = lo;
        while x <= hi {
            out.push(x.clone());
            x += &step;
            if out.len() > 100_000 {
                return Err(bad("too many points"));
            }
        }
        out
    } else {
        s.split(',').map(parse_number).collect::<Result<Vec<_>>>()?
    };
    if points.is_empty() {
        return Err(bad("empty grid"));
    }
    let half = Rational::new(1.into(), 2.into());
    if points.iter().any(|x| x.is_negative() || *x > half) {
        return Err(bad("points must lie in [0, 0.5]"));
    }
    Ok(points)
}

/// Decimal with `sig` significant figures.
pub fn sig_figs(x: f64, sig: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (sig - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassJson {
    pub id: usize,
    pub label: String,
    pub size: usize,
    pub representative: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
}

impl ClassJson {
    fn new(c: &EquivClass, members: Option<Vec<String>>) -> Self {
        Self {
            id: c.id,
            label: c.label.clone(),
            size: c.size,
            representative: c.representative.to_string(),
            members,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassTableJson {
    pub model: String,
    pub reduced: bool,
    pub class_count: usize,
    pub pattern_count: usize,
    pub intact: usize,
    pub fail: usize,
    pub classes: Vec<ClassJson>,
}

pub fn class_table_json(table: &ClassTable, reduced: bool, with_members: bool) -> ClassTableJson {
    ClassTableJson {
        model: table.model().name().into(),
        reduced,
        class_count: table.len(),
        pattern_count: table.classes().iter().map(|c| c.size).sum(),
        intact: table.intact(),
        fail: table.fail(),
        classes: table
            .classes()
            .iter()
            .map(|c| {
                let members = with_members
                    .then(|| table.members(c.id).iter().map(|p| p.to_string()).collect());
                ClassJson::new(c, members)
            })
            .collect(),
    }
}

pub fn class_table_csv(table: &ClassTable) -> String {
    let mut out = String::from("id,label,size,representative\n");
    for c in table.classes() {
        writeln!(
            out,
            "{},{},{},{}",
            c.id,
            csv_field(&c.label),
            c.size,
            c.representative
        )
        .unwrap();
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.into()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub from: usize,
    pub to: usize,
    pub prob: Vec<PolyTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbsorbingJson {
    pub intact: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainClassJson {
    pub id: usize,
    pub label: String,
    pub size: usize,
    pub representative: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainJson {
    pub model: String,
    pub classes: Vec<ChainClassJson>,
    pub absorbing: AbsorbingJson,
    pub initial: Vec<Vec<PolyTerm>>,
    pub matrix: Vec<MatrixEntry>,
}

pub fn chain_json(chain: &TransitionMatrix) -> ChainJson {
    ChainJson {
        model: chain.model().name().into(),
        classes: chain
            .classes()
            .iter()
            .map(|c| ChainClassJson {
                id: c.id,
                label: c.label.clone(),
                size: c.size,
                representative: c.representative.to_string(),
            })
            .collect(),
        absorbing: AbsorbingJson {
            intact: chain.intact(),
            fail: chain.fail(),
        },
        initial: chain.initial().iter().map(poly_to_json).collect(),
        matrix: (0..chain.len())
            .flat_map(|i| {
                chain.row(i).iter().map(move |(j, p)| MatrixEntry {
                    from: i,
                    to: *j,
                    prob: poly_to_json(p),
                })
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: String,
    pub encoded_failure_exact: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("eps,encoded_failure_exact,mc_mean,mc_stderr\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.eps,
            r.encoded_failure_exact,
            opt(r.mc_mean),
            opt(r.mc_stderr)
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRow {
    pub eps: String,
    pub delta: String,
    pub trials: u64,
    pub mean: f64,
    pub stderr: f64,
    pub exact: f64,
    pub z_vs_exact: Option<f64>,
}

pub fn mc_csv(rows: &[McRow]) -> String {
    let mut out = String::from("eps,delta,trials,mean,stderr,z_vs_exact\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.eps,
            r.delta,
            r.trials,
            r.mean,
            r.stderr,
            opt(r.z_vs_exact)
        )
        .unwrap();
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Text of a grid point as the user would recognize it.
pub fn decimal(x: &Rational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    to_f64(x).to_string()
}
