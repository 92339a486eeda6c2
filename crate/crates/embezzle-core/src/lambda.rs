//! Exact arithmetic in Q(√λ) for exponent-form spectra, where λ is the
//! unique root in (0,1) of an admissible certificate polynomial.
//!
//! [`LambdaSum`] is a formal Laurent polynomial in `s = √λ` with rational
//! coefficients; arithmetic and structural equality are context-free.
//! Whether a sum vanishes *as a value* depends on the defining polynomial
//! and is decided by [`LambdaField::value_is_zero`], soundly even when the
//! certificate is reducible: reduce modulo `q(x) = p(x²)`, then fall back
//! to a gcd + Sturm root count on the isolating interval of `s`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly::{bisect, count_roots_in, QPoly};
use crate::scalar::{rat_of, rat_to_f64, Rat};

/// The number field context: certificate polynomial `p` with its unique root
/// λ in (0,1), plus `q(x) = p(x²)` defining `s = √λ`.
#[derive(Debug)]
pub struct LambdaField {
    pub p: QPoly,
    pub lambda_interval: (Rat, Rat),
    pub q: QPoly,
    pub s_interval: (Rat, Rat),
}

impl PartialEq for LambdaField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl LambdaField {
    /// Build from a polynomial that is already known to be admissible
    /// (constant term −1, nonconstant coefficients ≥ 0, p(1) > 0), which
    /// guarantees a unique root in (0,1).
    pub fn new(p: QPoly) -> Arc<Self> {
        let tol = Rat::new(BigInt::one(), BigInt::from(10u64).pow(14));
        let lambda_interval = bisect(&p, rat_of(0, 1), rat_of(1, 1), &tol);
        let q = p.compose_square();
        let s_interval = bisect(&q, rat_of(0, 1), rat_of(1, 1), &tol);
        Arc::new(LambdaField {
            p,
            lambda_interval,
            q,
            s_interval,
        })
    }

    pub fn lambda_f64(&self) -> f64 {
        let (a, b) = &self.lambda_interval;
        rat_to_f64(&((a + b) / rat_of(2, 1)))
    }

    pub fn s_f64(&self) -> f64 {
        let (a, b) = &self.s_interval;
        rat_to_f64(&((a + b) / rat_of(2, 1)))
    }

    /// Does the rational-coefficient polynomial `f` vanish at `s = √λ`?
    fn vanishes_at_s(&self, f: &QPoly) -> bool {
        if f.is_zero() {
            return true;
        }
        let r = f.rem(&self.q);
        if r.is_zero() {
            return true;
        }
        let g = r.gcd(&self.q);
        if g.degree() == 0 {
            return false;
        }
        // All roots of g are roots of q, whose only real roots are ±s; the
        // isolating interval (a,b) ⊂ (0,1) contains s and excludes −s.
        let (a, b) = &self.s_interval;
        count_roots_in(&g, a, b) > 0
    }

    /// Does `f` (in the variable λ) vanish at λ?
    pub fn vanishes_at_lambda(&self, f: &QPoly) -> bool {
        self.vanishes_at_s(&f.compose_square())
    }

    /// Value-level zero test for a formal sum.
    pub fn value_is_zero(&self, v: &LambdaSum) -> bool {
        if v.coeffs.is_empty() {
            return true;
        }
        self.vanishes_at_s(&v.as_poly())
    }
}

/// A formal finite Q-linear combination of powers `s^k` (k ∈ Z), `s = √λ`.
///
/// Structural equality compares the normal form (zero coefficients dropped);
/// value equality relative to a defining polynomial goes through
/// [`LambdaField::value_is_zero`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LambdaSum {
    coeffs: BTreeMap<i64, Rat>,
}

impl LambdaSum {
    pub fn zero() -> Self {
        LambdaSum::default()
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut v = LambdaSum::zero();
        v.add_power(0, r);
        v
    }

    /// `c·s^k`
    pub fn s_power(k: i64, c: Rat) -> Self {
        let mut v = LambdaSum::zero();
        v.add_power(k, c);
        v
    }

    pub fn add_power(&mut self, k: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn add(&self, other: &LambdaSum) -> LambdaSum {
        let mut out = self.clone();
        for (&k, c) in &other.coeffs {
            out.add_power(k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> LambdaSum {
        LambdaSum {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, c)| (k, -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &LambdaSum) -> LambdaSum {
        let mut out = LambdaSum::zero();
        for (&k1, c1) in &self.coeffs {
            for (&k2, c2) in &other.coeffs {
                out.add_power(k1 + k2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> LambdaSum {
        let mut out = LambdaSum::zero();
        for (&k, c) in &self.coeffs {
            out.add_power(k, c * r);
        }
        out
    }

    pub fn is_formally_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clear negative powers by the minimal shift (s ≠ 0, so multiplying by a
    /// power of s preserves vanishing).
    fn as_poly(&self) -> QPoly {
        if self.coeffs.is_empty() {
            return QPoly::zero();
        }
        let min = *self.coeffs.keys().next().unwrap();
        let shift = if min < 0 { -min } else { 0 };
        let max = *self.coeffs.keys().last().unwrap() + shift;
        let mut v = vec![Rat::zero(); (max + 1) as usize];
        for (&k, c) in &self.coeffs {
            v[(k + shift) as usize] = c.clone();
        }
        QPoly::new(v)
    }

    /// Numeric value at a given `s`.
    pub fn eval_f64(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, c)| rat_to_f64(c) * s.powi(k as i32))
            .sum()
    }
}

impl fmt::Display for LambdaSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, c) in &self.coeffs {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let pow = match k {
                0 => String::new(),
                1 => "√λ".to_string(),
                2 => "λ".to_string(),
                k if k % 2 == 0 => format!("λ^{}", k / 2),
                k => format!("λ^{}·√λ", k / 2),
            };
            if pow.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", pow)?;
            } else {
                write!(f, "{}·{}", mag, pow)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_field() -> Arc<LambdaField> {
        // x² + x − 1, root (√5−1)/2
        LambdaField::new(QPoly::new(vec![rat_of(-1, 1), rat_of(1, 1), rat_of(1, 1)]))
    }

    #[test]
    fn lambda_numeric_value() {
        let f = golden_field();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((f.lambda_f64() - golden).abs() < 1e-12);
        assert!((f.s_f64() - golden.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn defining_relation_is_zero() {
        // λ² + λ − 1 = 0, i.e. s⁴ + s² − 1 = 0
        let f = golden_field();
        let mut v = LambdaSum::zero();
        v.add_power(4, rat_of(1, 1));
        v.add_power(2, rat_of(1, 1));
        v.add_power(0, rat_of(-1, 1));
        assert!(!v.is_formally_zero());
        assert!(f.value_is_zero(&v));
    }

    #[test]
    fn non_identities_are_nonzero() {
        let f = golden_field();
        // λ − 1/2 ≠ 0
        let mut v = LambdaSum::zero();
        v.add_power(2, rat_of(1, 1));
        v.add_power(0, rat_of(-1, 2));
        assert!(!f.value_is_zero(&v));
        assert!(!f.value_is_zero(&LambdaSum::s_power(1, rat_of(1, 1))));
    }

    #[test]
    fn laurent_inverse_of_lambda() {
        // λ⁻¹ = λ + 1 for the golden ratio: λ² + λ = 1 ⟹ 1/λ = λ + 1
        let f = golden_field();
        let inv = LambdaSum::s_power(-2, rat_of(1, 1));
        let mut expect = LambdaSum::zero();
        expect.add_power(2, rat_of(1, 1));
        expect.add_power(0, rat_of(1, 1));
        assert!(f.value_is_zero(&inv.add(&expect.neg())));
    }

    #[test]
    fn formal_vs_value_equality() {
        // λ and 1 − λ² are formally different but equal at the golden root
        let f = golden_field();
        let lhs = LambdaSum::s_power(2, rat_of(1, 1));
        let mut rhs = LambdaSum::from_rat(rat_of(1, 1));
        rhs.add_power(4, rat_of(-1, 1));
        assert_ne!(lhs, rhs);
        assert!(f.value_is_zero(&lhs.add(&rhs.neg())));
    }
}
