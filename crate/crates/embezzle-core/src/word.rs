//! Words over the alphabet `{0,…,d−1}` and Cuntz monomials `V_μ V_ν*`.

use std::fmt;

use crate::error::{CoreError, Result};

/// A finite (possibly empty) word; the empty word acts as the unit for
/// concatenation and indexes the identity operator `V_∅ = I`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u32>, d: u32) -> Result<Self> {
        for &l in &letters {
            if l >= d {
                return Err(CoreError::LetterOutOfRange { letter: l, d });
            }
        }
        Ok(Word(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// If `self = prefix·rest`, return `rest`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        if self.0.len() < prefix.0.len() {
            return None;
        }
        if self.0[..prefix.0.len()] == prefix.0[..] {
            Some(Word(self.0[prefix.0.len()..].to_vec()))
        } else {
            None
        }
    }

    /// Split as `(head, tail)` with `|head| = k`; requires `k ≤ |self|`.
    pub fn split_at(&self, k: usize) -> (Word, Word) {
        (Word(self.0[..k].to_vec()), Word(self.0[k..].to_vec()))
    }

    /// All words of exactly length `len` over `{0,…,d−1}`, lexicographic.
    pub fn all_of_length(d: u32, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for w in &out {
                for l in 0..d {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length `≤ max_len`, ordered by length then lexicographic.
    pub fn all_up_to(d: u32, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for k in 0..=max_len {
            out.extend(Word::all_of_length(d, k));
        }
        out
    }

    /// Parse from the I/O syntax: `"-"` is the empty word, digit strings for
    /// `d ≤ 10`, comma-separated integers otherwise.
    pub fn parse(s: &str, d: u32) -> Result<Word> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Word::empty());
        }
        let letters: Vec<u32> = if d <= 10 && !s.contains(',') {
            s.chars()
                .map(|c| {
                    c.to_digit(10).ok_or(CoreError::Parse {
                        pos: 0,
                        msg: format!("invalid letter '{c}' in word \"{s}\""),
                    })
                })
                .collect::<Result<_>>()?
        } else {
            s.split(',')
                .map(|t| {
                    t.trim().parse::<u32>().map_err(|_| CoreError::Parse {
                        pos: 0,
                        msg: format!("invalid letter '{t}' in word \"{s}\""),
                    })
                })
                .collect::<Result<_>>()?
        };
        Word::new(letters, d)
    }

    pub fn render(&self, d: u32) -> String {
        if self.is_empty() {
            return "-".to_string();
        }
        if d <= 10 {
            self.0.iter().map(|l| l.to_string()).collect()
        } else {
            self.0
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(10))
    }
}

/// A Cuntz monomial `V_μ V_ν*`; `(∅, ∅)` is the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub mu: Word,
    pub nu: Word,
}

impl Monomial {
    pub fn new(mu: Word, nu: Word) -> Self {
        Monomial { mu, nu }
    }

    pub fn identity() -> Self {
        Monomial::default()
    }

    pub fn is_identity(&self) -> bool {
        self.mu.is_empty() && self.nu.is_empty()
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
        }
    }

    /// Product of two monomials under the Cuntz relations:
    /// `(V_μV_ν*)(V_βV_γ*)` is `V_{μβ′}V_γ*` if `β = νβ′`, `V_μV_{γν′}*` if
    /// `ν = βν′`, and `0` otherwise.
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        if let Some(beta_rest) = other.mu.strip_prefix(&self.nu) {
            Some(Monomial {
                mu: self.mu.concat(&beta_rest),
                nu: other.nu.clone(),
            })
        } else {
            self.nu.strip_prefix(&other.mu).map(|nu_rest| Monomial {
                mu: self.mu.clone(),
                nu: other.nu.concat(&nu_rest),
            })
        }
    }

    pub fn render(&self, d: u32) -> String {
        format!("V[{};{}]", self.mu.render(d), self.nu.render(d))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(10))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 10).unwrap()
    }

    #[test]
    fn concat_unit_and_associativity() {
        let a = w("01");
        assert_eq!(a.concat(&Word::empty()), a);
        assert_eq!(Word::empty().concat(&a), a);
        let b = w("2");
        let c = w("10");
        assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
    }

    #[test]
    fn letter_bound_enforced() {
        assert!(Word::new(vec![2], 2).is_err());
        assert!(Word::new(vec![1, 0], 2).is_ok());
    }

    #[test]
    fn monomial_products_follow_cuntz_rules() {
        // (V_0 V_1*)·(V_1 V_0*) = V_0 V_0*   [V_1*V_1 = 1]
        let a = Monomial::new(w("0"), w("1"));
        let b = Monomial::new(w("1"), w("0"));
        assert_eq!(a.mul(&b), Some(Monomial::new(w("0"), w("0"))));

        // (V_0 V_1*)·(V_0 V_0*) = 0   [V_1*V_0 = 0]
        let c = Monomial::new(w("0"), w("0"));
        assert_eq!(a.mul(&c), None);

        // (V_0 V_01*)·(V_011 V_1*) = V_01 V_1*
        let a = Monomial::new(w("0"), w("01"));
        let b = Monomial::new(w("011"), w("1"));
        assert_eq!(a.mul(&b), Some(Monomial::new(w("01"), w("1"))));
    }

    #[test]
    fn word_enumeration_counts() {
        assert_eq!(Word::all_up_to(2, 3).len(), 15);
        assert_eq!(Word::all_up_to(3, 2).len(), 13);
        assert_eq!(Word::all_of_length(2, 0), vec![Word::empty()]);
    }

    #[test]
    fn parse_render_round_trip() {
        assert_eq!(w("-"), Word::empty());
        assert_eq!(w("01").render(2), "01");
        let big = Word::parse("3,11,0", 12).unwrap();
        assert_eq!(big.render(12), "3,11,0");
    }
}
