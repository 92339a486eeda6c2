//! Serializable report structures and CSV emission shared by the CLI.
//! Floats are rendered with 15 significant digits; the exact string is
//! always carried alongside and is authoritative.

use serde::Serialize;

use crate::classify::{ExcludedReport, HGroup, LambdaValue, RootResult, TypeReport};
use crate::scalar::Rat;
use crate::trunc::SweepRow;

pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.15}")
}

pub fn fmt_sig(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

fn rat_str(r: &Rat) -> String {
    r.to_string()
}

/// RFC-4180 field quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Serialize)]
pub struct ValueJson {
    pub exact: String,
    pub decimal: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum LambdaJson {
    Rational {
        rational: String,
    },
    Certified {
        /// ascending integer coefficients of the certificate polynomial
        poly: Vec<serde_json::Value>,
        interval: [String; 2],
        midpoint: f64,
    },
}

pub fn lambda_json(v: &LambdaValue) -> LambdaJson {
    match v {
        LambdaValue::Rational(r) => LambdaJson::Rational {
            rational: rat_str(r),
        },
        LambdaValue::Algebraic(f) => LambdaJson::Certified {
            poly: f
                .p
                .coeffs
                .iter()
                .map(|c| {
                    use num_traits::ToPrimitive;
                    match c.to_i64() {
                        Some(n) if c.is_integer() => serde_json::json!(n),
                        _ => serde_json::json!(c.to_string()),
                    }
                })
                .collect(),
            interval: [
                rat_str(&f.lambda_interval.0),
                rat_str(&f.lambda_interval.1),
            ],
            midpoint: f.lambda_f64(),
        },
    }
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ClassifyJson {
    Dense {
        witness: [usize; 2],
    },
    Countable {
        lambda: LambdaJson,
        m: Vec<u32>,
        certificate: String,
    },
}

pub fn classify_json(r: &TypeReport) -> ClassifyJson {
    match r {
        TypeReport::Dense { witness } => ClassifyJson::Dense {
            witness: [witness.0, witness.1],
        },
        TypeReport::Countable {
            lambda,
            m,
            certificate,
        } => ClassifyJson::Countable {
            lambda: lambda_json(lambda),
            m: m.clone(),
            certificate: certificate.render(),
        },
    }
}

#[derive(Serialize)]
pub struct RootJson {
    pub poly: String,
    pub interval: [String; 2],
    pub midpoint: f64,
}

pub fn root_json(poly: String, r: &RootResult) -> RootJson {
    RootJson {
        poly,
        interval: [rat_str(&r.interval.0), rat_str(&r.interval.1)],
        midpoint: r.midpoint,
    }
}

#[derive(Serialize)]
pub struct ExcludedJson {
    pub verdict: &'static str,
    pub q: u64,
    pub poly: String,
    pub roots: Vec<RootJson>,
    pub reason: &'static str,
}

pub fn excluded_json(r: &ExcludedReport) -> ExcludedJson {
    ExcludedJson {
        verdict: "excluded",
        q: r.q,
        poly: r.poly.render(),
        roots: r
            .roots
            .iter()
            .map(|root| root_json(r.poly.render(), root))
            .collect(),
        reason: "two roots in (0,1)",
    }
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum HGroupJson {
    Trivial,
    Cyclic {
        lambda: LambdaJson,
        m: Vec<u32>,
        generator: String,
        generator_value: f64,
    },
}

pub fn hgroup_json(h: &HGroup) -> HGroupJson {
    match h {
        HGroup::Trivial => HGroupJson::Trivial,
        HGroup::Cyclic {
            lambda,
            m,
            generator_f64,
        } => HGroupJson::Cyclic {
            lambda: lambda_json(lambda),
            m: m.clone(),
            generator: "2π/(−ln λ)".to_string(),
            generator_value: *generator_f64,
        },
    }
}

/// Per-pair condition report used by the protocol subcommands.
#[derive(Serialize)]
pub struct ConditionJson {
    pub condition: String,
    pub max_abs: f64,
    pub per_pair: Vec<(usize, usize, f64)>,
    pub n: usize,
}

pub fn sweep_csv(rows: &[SweepRow], d: u32) -> String {
    let mut out = String::from("n,monomial,rep_value,exact_value,abs_diff\r\n");
    for r in rows {
        out.push_str(&csv_row(&[
            r.n.to_string(),
            r.monomial.render(d),
            fmt_f64(r.rep_value),
            fmt_f64(r.exact_value),
            fmt_sig(r.abs_diff),
        ]));
        out.push_str("\r\n");
    }
    out
}

#[derive(Serialize)]
pub struct SweepRowJson {
    pub n: usize,
    pub monomial: String,
    pub rep_value: f64,
    pub exact_value: f64,
    pub abs_diff: f64,
}

pub fn sweep_json(rows: &[SweepRow], d: u32) -> Vec<SweepRowJson> {
    rows.iter()
        .map(|r| SweepRowJson {
            n: r.n,
            monomial: r.monomial.render(d),
            rep_value: r.rep_value,
            exact_value: r.exact_value,
            abs_diff: r.abs_diff,
        })
        .collect()
}
