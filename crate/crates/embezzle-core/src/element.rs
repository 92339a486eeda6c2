//! Finite linear combinations of Cuntz monomials and their algebra.
//!
//! Monomial representation is non-canonical (`V_μV_ν* = Σ_i V_{μi}V_{νi}*`);
//! the canonical form used for equality is expansion to a uniform right-word
//! depth, at which monomials with fixed `|ν|` are treated as linearly
//! independent.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::scalar::{RadSum, Rat};
use crate::word::{Monomial, Word};

/// Coefficient ring for elements: exact arithmetic on a normal form.
///
/// `is_zero` / `PartialEq` compare normal forms. For rational and radical
/// coefficients this coincides with value equality; for λ-sums it is formal
/// equality of the Laurent normal form, and value-level comparisons go
/// through the spectrum's system instead.
pub trait Coeff: Clone + PartialEq {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_rat(r: Rat) -> Self;
}

impl Coeff for Rat {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
}

impl Coeff for RadSum {
    fn add(&self, other: &Self) -> Self {
        RadSum::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RadSum::mul(self, other)
    }
    fn neg(&self) -> Self {
        RadSum::neg(self)
    }
    fn is_zero(&self) -> bool {
        RadSum::is_zero(self)
    }
    fn from_rat(r: Rat) -> Self {
        RadSum::from_rat(r)
    }
}

impl Coeff for crate::lambda::LambdaSum {
    fn add(&self, other: &Self) -> Self {
        crate::lambda::LambdaSum::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        crate::lambda::LambdaSum::mul(self, other)
    }
    fn neg(&self) -> Self {
        crate::lambda::LambdaSum::neg(self)
    }
    fn is_zero(&self) -> bool {
        self.is_formally_zero()
    }
    fn from_rat(r: Rat) -> Self {
        crate::lambda::LambdaSum::from_rat(r)
    }
}

/// A finite linear combination of monomials `V_μV_ν*` over the alphabet
/// `{0,…,d−1}`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element<C: Coeff> {
    d: u32,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Element<C> {
    pub fn zero(d: u32) -> Self {
        Element {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(d: u32) -> Self {
        let mut e = Element::zero(d);
        e.add_term(Monomial::identity(), C::from_rat(Rat::from_integer(1.into())));
        e
    }

    pub fn monomial(d: u32, m: Monomial) -> Self {
        let mut e = Element::zero(d);
        e.add_term(m, C::from_rat(Rat::from_integer(1.into())));
        e
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Element<C>) -> Result<Element<C>> {
        self.check_d(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Element<C> {
        let mut out = Element::zero(self.d);
        for (m, t) in &self.terms {
            out.add_term(m.clone(), t.mul(c));
        }
        out
    }

    fn check_d(&self, other: &Element<C>) -> Result<()> {
        if self.d != other.d {
            return Err(CoreError::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        Ok(())
    }

    /// Bilinear extension of the monomial product rule.
    pub fn mul(&self, other: &Element<C>) -> Result<Element<C>> {
        self.check_d(other)?;
        let mut out = Element::zero(self.d);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(m) = a.mul(b) {
                    out.add_term(m, ca.mul(cb));
                }
            }
        }
        Ok(out)
    }

    /// Adjoint: `(μ,ν) ↦ (ν,μ)`; scalars here are real, so coefficients are
    /// unchanged.
    pub fn adjoint(&self) -> Element<C> {
        let mut out = Element::zero(self.d);
        for (m, c) in &self.terms {
            out.add_term(m.adjoint(), c.clone());
        }
        out
    }

    pub fn max_nu_len(&self) -> usize {
        self.terms.keys().map(|m| m.nu.len()).max().unwrap_or(0)
    }

    /// Rewrite every term to right-word depth `K` by inserting
    /// `Σ_τ V_τ V_τ* = 1`: each `V_μV_ν*` with `|ν| < K` becomes
    /// `Σ_{|τ| = K−|ν|} V_{μτ} V_{ντ}*`.
    pub fn expand_to_depth(&self, depth: usize) -> Result<Element<C>> {
        let max_nu = self.max_nu_len();
        if depth < max_nu {
            return Err(CoreError::DepthTooSmall { depth, max_nu });
        }
        let mut out = Element::zero(self.d);
        for (m, c) in &self.terms {
            let pad = depth - m.nu.len();
            if pad == 0 {
                out.add_term(m.clone(), c.clone());
            } else {
                for tau in Word::all_of_length(self.d, pad) {
                    out.add_term(
                        Monomial::new(m.mu.concat(&tau), m.nu.concat(&tau)),
                        c.clone(),
                    );
                }
            }
        }
        Ok(out)
    }

    /// Equality modulo the Cuntz relations: compare term maps after expanding
    /// both sides to the common right-word depth.
    pub fn equals(&self, other: &Element<C>) -> Result<bool> {
        self.check_d(other)?;
        let depth = self.max_nu_len().max(other.max_nu_len());
        let a = self.expand_to_depth(depth)?;
        let b = other.expand_to_depth(depth)?;
        Ok(a.terms == b.terms)
    }
}

/// Element of the two-party algebra: left factor is Alice's (`v`-side),
/// right factor is Bob's (`w`-side).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiElement<C: Coeff> {
    d: u32,
    terms: BTreeMap<(Monomial, Monomial), C>,
}

impl<C: Coeff> BiElement<C> {
    pub fn zero(d: u32) -> Self {
        BiElement {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn simple(d: u32, alice: Monomial, bob: Monomial) -> Self {
        let mut e = BiElement::zero(d);
        e.add_term(alice, bob, C::from_rat(Rat::from_integer(1.into())));
        e
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn add_term(&mut self, alice: Monomial, bob: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (alice, bob);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
