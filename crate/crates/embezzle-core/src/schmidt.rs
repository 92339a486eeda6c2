//! Exact Schmidt data: dimension `d` and coefficients `α_i` given through
//! their squares, either as rationals or in exponent form `α_i² = λ^{m_i}`.
//!
//! Construction enforces `Σ α_i² = 1` and descending order `α_0 ≥ … ≥
//! α_{d−1} > 0`; unsorted input is sorted and the applied permutation is
//! reported, which reduces every protocol to the canonical ordered form.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::element::{Coeff, Element};
use crate::error::{CoreError, Result};
use crate::lambda::{LambdaField, LambdaSum};
use crate::poly::QPoly;
use crate::scalar::{rat_to_f64, RadScalar, RadSum, Rat};
use crate::word::{Monomial, Word};

/// Exact representation of λ for exponent-form spectra.
#[derive(Clone, Debug)]
pub enum LambdaRep {
    Rational(Rat),
    Algebraic(Arc<LambdaField>),
}

impl LambdaRep {
    pub fn to_f64(&self) -> f64 {
        match self {
            LambdaRep::Rational(r) => rat_to_f64(r),
            LambdaRep::Algebraic(f) => f.lambda_f64(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum SpecKind {
    /// `α_i²` as exact positive rationals, descending.
    Rational { alpha_sq: Vec<Rat> },
    /// `α_i² = λ^{m_i}` with `m` ascending (so `α` is descending).
    Exponent { lambda: LambdaRep, m: Vec<u32> },
}

/// Validated Schmidt data for a state of full Schmidt rank.
#[derive(Clone, Debug)]
pub struct SchmidtSpec {
    d: u32,
    kind: SpecKind,
}

impl SchmidtSpec {
    /// Build from rational squares. Returns the spec and the permutation
    /// `perm` such that `sorted[i] = input[perm[i]]`.
    pub fn from_rational_squares(alpha_sq: Vec<Rat>) -> Result<(Self, Vec<usize>)> {
        let d = alpha_sq.len() as u32;
        if d < 2 {
            return Err(CoreError::InvalidSpectrum(
                "need at least two Schmidt coefficients".into(),
            ));
        }
        for a in &alpha_sq {
            if !a.is_positive() {
                return Err(CoreError::InvalidSpectrum(format!(
                    "coefficient square {a} is not positive"
                )));
            }
        }
        let sum: Rat = alpha_sq.iter().fold(Rat::zero(), |acc, a| acc + a);
        if !sum.is_one() {
            return Err(CoreError::InvalidSpectrum(format!(
                "squares must sum to 1 exactly, got {sum}"
            )));
        }
        let mut idx: Vec<usize> = (0..alpha_sq.len()).collect();
        idx.sort_by(|&i, &j| alpha_sq[j].cmp(&alpha_sq[i]));
        let sorted = idx.iter().map(|&i| alpha_sq[i].clone()).collect();
        Ok((
            SchmidtSpec {
                d,
                kind: SpecKind::Rational { alpha_sq: sorted },
            },
            idx,
        ))
    }

    /// Build from exponent data `α_i² = λ^{m_i}`.
    pub fn from_exponent(lambda: LambdaRep, m: Vec<u32>) -> Result<(Self, Vec<usize>)> {
        let d = m.len() as u32;
        if d < 2 {
            return Err(CoreError::InvalidSpectrum(
                "need at least two Schmidt coefficients".into(),
            ));
        }
        if m.contains(&0) {
            return Err(CoreError::InvalidSpectrum(
                "exponents must be positive".into(),
            ));
        }
        match &lambda {
            LambdaRep::Rational(l) => {
                if !l.is_positive() || l >= &Rat::one() {
                    return Err(CoreError::InvalidSpectrum(format!(
                        "λ = {l} is not in (0,1)"
                    )));
                }
                let mut sum = Rat::zero();
                for &e in &m {
                    let mut pw = Rat::one();
                    for _ in 0..e {
                        pw *= l;
                    }
                    sum += pw;
                }
                if !sum.is_one() {
                    return Err(CoreError::InvalidSpectrum(format!(
                        "Σ λ^m_i must be 1 exactly, got {sum}"
                    )));
                }
            }
            LambdaRep::Algebraic(field) => {
                // Σ x^{m_i} − 1 must vanish at λ; decided exactly.
                let deg = *m.iter().max().unwrap() as usize;
                let mut coeffs = vec![Rat::zero(); deg + 1];
                coeffs[0] = -Rat::one();
                for &e in &m {
                    coeffs[e as usize] += Rat::one();
                }
                if !field.vanishes_at_lambda(&QPoly::new(coeffs)) {
                    return Err(CoreError::InvalidSpectrum(
                        "Σ λ^m_i − 1 does not vanish at the certified root".into(),
                    ));
                }
            }
        }
        let mut idx: Vec<usize> = (0..m.len()).collect();
        idx.sort_by_key(|&i| m[i]);
        let sorted = idx.iter().map(|&i| m[i]).collect();
        Ok((
            SchmidtSpec {
                d,
                kind: SpecKind::Exponent { lambda, m: sorted },
            },
            idx,
        ))
    }

    pub fn uniform(d: u32) -> Self {
        let sq = vec![Rat::new(1.into(), (d as i64).into()); d as usize];
        SchmidtSpec::from_rational_squares(sq).unwrap().0
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn kind(&self) -> &SpecKind {
        &self.kind
    }

    /// Numeric `α_i`, descending.
    pub fn alpha_f64(&self) -> Vec<f64> {
        match &self.kind {
            SpecKind::Rational { alpha_sq } => {
                alpha_sq.iter().map(|a| rat_to_f64(a).sqrt()).collect()
            }
            SpecKind::Exponent { lambda, m } => {
                let l = lambda.to_f64();
                m.iter().map(|&e| l.powf(e as f64 / 2.0)).collect()
            }
        }
    }

    /// The per-kind exact evaluation system.
    pub fn system(&self) -> System {
        match &self.kind {
            SpecKind::Rational { alpha_sq } => System::Rad(RadSystem {
                d: self.d,
                alpha_sq: alpha_sq.clone(),
            }),
            SpecKind::Exponent { lambda, m } => match lambda {
                // rational λ reduces to the radical system over λ^{m_i}
                LambdaRep::Rational(l) => {
                    let alpha_sq = m
                        .iter()
                        .map(|&e| {
                            let mut pw = Rat::one();
                            for _ in 0..e {
                                pw *= l;
                            }
                            pw
                        })
                        .collect();
                    System::Rad(RadSystem {
                        d: self.d,
                        alpha_sq,
                    })
                }
                LambdaRep::Algebraic(field) => System::Lambda(LambdaSystem {
                    d: self.d,
                    field: field.clone(),
                    m: m.clone(),
                }),
            },
        }
    }

    /// Integer exponent structure `(λ, m)` when every `ln α_i` is a rational
    /// multiple of a common `ln λ`; used for exact phase-triviality tests.
    pub fn exponent_structure(&self) -> Option<(f64, Vec<u32>)> {
        match &self.kind {
            SpecKind::Exponent { lambda, m } => Some((lambda.to_f64(), m.clone())),
            SpecKind::Rational { .. } => None,
        }
    }
}

/// Exact evaluation over a rational spectrum: values live in [`RadSum`].
#[derive(Clone, Debug)]
pub struct RadSystem {
    d: u32,
    alpha_sq: Vec<Rat>,
}

/// Exact evaluation over an algebraic exponent spectrum: values live in
/// [`LambdaSum`], Laurent polynomials in √λ.
#[derive(Clone, Debug)]
pub struct LambdaSystem {
    d: u32,
    field: Arc<LambdaField>,
    m: Vec<u32>,
}

/// What a word-calculus state evaluation needs from the spectrum.
pub trait AlphaSystem {
    type C: Coeff;

    fn d(&self) -> u32;
    fn one(&self) -> Self::C;
    fn embed_rat(&self, r: Rat) -> Self::C;
    /// `α_w² = Π α_{w_k}²`
    fn alpha_sq_word(&self, w: &Word) -> Self::C;
    /// `α_w = Π α_{w_k}`
    fn alpha_word(&self, w: &Word) -> Self::C;
    /// `α_num / α_den`
    fn alpha_ratio(&self, num: &Word, den: &Word) -> Self::C;
    /// `(α_μ / α_ν)²`
    fn modular_eigenvalue_value(&self, m: &Monomial) -> Self::C;
    fn is_zero_value(&self, v: &Self::C) -> bool;
    fn values_equal(&self, a: &Self::C, b: &Self::C) -> bool {
        self.is_zero_value(&a.add(&b.neg()))
    }
    fn value_f64(&self, v: &Self::C) -> f64;
    fn render(&self, v: &Self::C) -> String;

    fn check_d(&self, d: u32) -> Result<()> {
        if d != self.d() {
            return Err(CoreError::DimensionMismatch {
                expected: self.d(),
                got: d,
            });
        }
        Ok(())
    }
}

impl RadSystem {
    fn sq_prod(&self, w: &Word) -> Rat {
        w.0.iter()
            .fold(Rat::one(), |acc, &l| acc * &self.alpha_sq[l as usize])
    }
}

impl AlphaSystem for RadSystem {
    type C = RadSum;

    fn d(&self) -> u32 {
        self.d
    }
    fn one(&self) -> RadSum {
        RadSum::one()
    }
    fn embed_rat(&self, r: Rat) -> RadSum {
        RadSum::from_rat(r)
    }
    fn alpha_sq_word(&self, w: &Word) -> RadSum {
        RadSum::from_rat(self.sq_prod(w))
    }
    fn alpha_word(&self, w: &Word) -> RadSum {
        RadSum::from_scalar(RadScalar::sqrt_of_rat(&self.sq_prod(w)))
    }
    fn alpha_ratio(&self, num: &Word, den: &Word) -> RadSum {
        RadSum::from_scalar(RadScalar::sqrt_of_rat(
            &(self.sq_prod(num) / self.sq_prod(den)),
        ))
    }
    fn modular_eigenvalue_value(&self, m: &Monomial) -> RadSum {
        RadSum::from_rat(self.sq_prod(&m.mu) / self.sq_prod(&m.nu))
    }
    fn is_zero_value(&self, v: &RadSum) -> bool {
        v.is_zero()
    }
    fn value_f64(&self, v: &RadSum) -> f64 {
        v.to_f64()
    }
    fn render(&self, v: &RadSum) -> String {
        v.to_string()
    }
}

impl LambdaSystem {
    /// Power of `s = √λ` carried by `α_w`.
    fn s_exp(&self, w: &Word) -> i64 {
        w.0.iter().map(|&l| self.m[l as usize] as i64).sum()
    }

    pub fn field(&self) -> &Arc<LambdaField> {
        &self.field
    }
}

impl AlphaSystem for LambdaSystem {
    type C = LambdaSum;

    fn d(&self) -> u32 {
        self.d
    }
    fn one(&self) -> LambdaSum {
        LambdaSum::from_rat(Rat::one())
    }
    fn embed_rat(&self, r: Rat) -> LambdaSum {
        LambdaSum::from_rat(r)
    }
    fn alpha_sq_word(&self, w: &Word) -> LambdaSum {
        LambdaSum::s_power(2 * self.s_exp(w), Rat::one())
    }
    fn alpha_word(&self, w: &Word) -> LambdaSum {
        LambdaSum::s_power(self.s_exp(w), Rat::one())
    }
    fn alpha_ratio(&self, num: &Word, den: &Word) -> LambdaSum {
        LambdaSum::s_power(self.s_exp(num) - self.s_exp(den), Rat::one())
    }
    fn modular_eigenvalue_value(&self, m: &Monomial) -> LambdaSum {
        LambdaSum::s_power(2 * (self.s_exp(&m.mu) - self.s_exp(&m.nu)), Rat::one())
    }
    fn is_zero_value(&self, v: &LambdaSum) -> bool {
        self.field.value_is_zero(v)
    }
    fn value_f64(&self, v: &LambdaSum) -> f64 {
        v.eval_f64(self.field.s_f64())
    }
    fn render(&self, v: &LambdaSum) -> String {
        v.to_string()
    }
}

/// Kind-erased system for callers that dispatch at runtime (the CLI).
pub enum System {
    Rad(RadSystem),
    Lambda(LambdaSystem),
}

/// Convert an element with radical coefficients into the coefficient ring of
/// a λ-system; only rational coefficients embed.
pub fn element_to_lambda(
    sys: &LambdaSystem,
    elem: &Element<RadSum>,
) -> Result<Element<LambdaSum>> {
    let mut out = Element::zero(elem.d());
    for (m, c) in elem.terms() {
        let r = c.as_rat().ok_or_else(|| {
            CoreError::Unsupported(
                "radical coefficients cannot be used with an exponent-form spectrum".into(),
            )
        })?;
        out.add_term(m.clone(), sys.embed_rat(r));
    }
    Ok(out)
}

impl SchmidtSpec {
    /// Numeric α for trunc/protocol use; exact construction elsewhere.
    pub fn alpha_sq_f64(&self) -> Vec<f64> {
        self.alpha_f64().iter().map(|a| a * a).collect()
    }
}
