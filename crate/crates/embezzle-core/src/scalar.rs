//! Exact scalars of the form `r·√s` and finite sums thereof.
//!
//! Every state value produced by the word calculus over a rational spectrum
//! is a product of Schmidt coefficients `α_i = √(α_i²)`, hence lives in the
//! ring of finite Q-linear combinations of square roots of squarefree
//! positive integers. Sums are keyed by radicand; since square roots of
//! distinct squarefree integers are linearly independent over Q, structural
//! equality of the normalized form decides value equality.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Parse a rational from `"p/q"` or `"p"` form.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rat_of(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Extract the square part of `n`: returns `(s, r)` with `n = s²·r`, `r` squarefree.
///
/// Trial division; radicands here stay human-scale (products of spectrum
/// numerators and denominators).
pub fn squarefree_decompose(n: &BigUint) -> (BigUint, BigUint) {
    let mut square = BigUint::one();
    let mut rad = BigUint::one();
    let mut m = n.clone();
    let two = BigUint::from(2u32);
    let mut p = two.clone();
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                rad *= &p;
            }
        }
        p += if p == two { 1u32 } else { 2u32 };
    }
    // leftover m is 1 or prime
    if !m.is_one() {
        rad *= &m;
    }
    (square, rad)
}

/// An exact scalar `coeff·√radicand` with `radicand` a squarefree positive integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadScalar {
    pub coeff: Rat,
    pub radicand: BigUint,
}

impl RadScalar {
    pub fn rational(coeff: Rat) -> Self {
        RadScalar {
            coeff,
            radicand: BigUint::one(),
        }
    }

    /// `√(num/den)` normalized: `√(p/q) = (1/q)·√(pq)` and the square part of
    /// `pq` is pulled into the coefficient.
    pub fn sqrt_of_rat(r: &Rat) -> Self {
        assert!(r.is_positive(), "radicand must be positive");
        let p = r.numer().magnitude().clone();
        let q = r.denom().magnitude().clone();
        let (s, rad) = squarefree_decompose(&(&p * &q));
        RadScalar {
            coeff: Rat::new(BigInt::from(s), BigInt::from(q)),
            radicand: rad,
        }
    }

    pub fn mul(&self, other: &RadScalar) -> RadScalar {
        // √r1·√r2 = g·√((r1/g)(r2/g)) with g = gcd(r1, r2); the product of the
        // coprime parts of two squarefree numbers is squarefree.
        let g = self.radicand.gcd(&other.radicand);
        let rad = (&self.radicand / &g) * (&other.radicand / &g);
        RadScalar {
            coeff: &self.coeff * &other.coeff * Rat::from_integer(BigInt::from(g)),
            radicand: rad,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.coeff) * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

/// A finite sum of [`RadScalar`]s keyed by radicand; the canonical exact form
/// of state values over a rational spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RadSum {
    terms: BTreeMap<BigUint, Rat>,
}

impl RadSum {
    pub fn zero() -> Self {
        RadSum::default()
    }

    pub fn one() -> Self {
        RadSum::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut s = RadSum::zero();
        s.add_term(&RadScalar::rational(r));
        s
    }

    pub fn from_scalar(t: RadScalar) -> Self {
        let mut s = RadSum::zero();
        s.add_term(&t);
        s
    }

    pub fn add_term(&mut self, t: &RadScalar) {
        if t.coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(t.radicand.clone())
            .or_insert_with(Rat::zero);
        *entry += &t.coeff;
        if entry.is_zero() {
            self.terms.remove(&t.radicand);
        }
    }

    pub fn add(&self, other: &RadSum) -> RadSum {
        let mut out = self.clone();
        for (rad, c) in &other.terms {
            out.add_term(&RadScalar {
                coeff: c.clone(),
                radicand: rad.clone(),
            });
        }
        out
    }

    pub fn neg(&self) -> RadSum {
        RadSum {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| (r.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &RadSum) -> RadSum {
        let mut out = RadSum::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                let t = RadScalar {
                    coeff: c1.clone(),
                    radicand: r1.clone(),
                }
                .mul(&RadScalar {
                    coeff: c2.clone(),
                    radicand: r2.clone(),
                });
                out.add_term(&t);
            }
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> RadSum {
        if r.is_zero() {
            return RadSum::zero();
        }
        RadSum {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * r)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational part, if the sum is purely rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&BigUint::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rat)> {
        self.terms.iter()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| rat_to_f64(c) * r.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }
}

impl fmt::Display for RadSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (rad, c) in &self.terms {
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
            let a = c.abs();
            if rad.is_one() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "√{}", rad)?;
            } else {
                write!(f, "{}·√{}", a, rad)?;
            }
        }
        Ok(())
    }
}
