//! Text grammar and JSON forms for elements.
//!
//! ```text
//! element  := term (("+" | "-") term)*
//! term     := [coeff "*"] "V[" word ";" word "]"
//! bi-term  := [coeff "*"] "V[" word ";" word "]" "⊗" "W[" word ";" word "]"
//! coeff    := rational | [rational] ("√"|"sqrt") integer
//! word     := "-" | digits (d ≤ 10) | comma-separated integers
//! ```
//!
//! `"-"` denotes the empty word. The ASCII spelling `(x)` is accepted for
//! the tensor sign.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::element::{BiElement, Element};
use crate::error::{CoreError, Result};
use crate::scalar::{parse_rat, RadScalar, RadSum, Rat};
use crate::word::{Monomial, Word};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().unwrap().len_utf8();
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{token}'")))
        }
    }

    fn err(&self, msg: &str) -> CoreError {
        CoreError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    /// Longest prefix of sign/digit/slash characters.
    fn take_rational(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            let ok = c.is_ascii_digit() || c == '/' || (i == 0 && (c == '-' || c == '+'));
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        if end == 0 {
            None
        } else {
            self.pos += end;
            Some(&rest[..end])
        }
    }

    fn take_integer(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if end == 0 {
            None
        } else {
            self.pos += end;
            Some(&rest[..end])
        }
    }

    /// Word body up to the given delimiter.
    fn take_until(&mut self, delim: char) -> Result<&'a str> {
        let rest = self.rest();
        match rest.find(delim) {
            Some(i) => {
                let s = &rest[..i];
                self.pos += i;
                Ok(s)
            }
            None => Err(self.err(&format!("expected '{delim}'"))),
        }
    }
}

fn parse_coeff(c: &mut Cursor) -> Result<RadSum> {
    let rational = c.take_rational();
    let rat = match rational {
        Some("-") => Some(-Rat::one()),
        Some("+") => Some(Rat::one()),
        Some(s) => Some(parse_rat(s).ok_or_else(|| c.err(&format!("bad rational '{s}'")))?),
        None => None,
    };
    let has_root = c.eat("√") || c.eat("sqrt");
    if has_root {
        let rad_str = c
            .take_integer()
            .ok_or_else(|| c.err("expected radicand after √"))?;
        let radicand: BigUint = rad_str
            .parse()
            .map_err(|_| c.err(&format!("bad radicand '{rad_str}'")))?;
        let base = RadScalar::sqrt_of_rat(&Rat::from_integer(radicand.into()));
        let coeff = rat.unwrap_or_else(Rat::one);
        Ok(RadSum::from_scalar(RadScalar {
            coeff: base.coeff * coeff,
            radicand: base.radicand,
        }))
    } else {
        match rat {
            Some(r) => Ok(RadSum::from_rat(r)),
            None => Ok(RadSum::one()),
        }
    }
}

fn parse_factor(c: &mut Cursor, letter: &str, d: u32) -> Result<Monomial> {
    c.expect(letter)?;
    c.expect("[")?;
    let mu_str = c.take_until(';')?;
    c.expect(";")?;
    let nu_str = c.take_until(']')?;
    c.expect("]")?;
    let mu = Word::parse(mu_str, d)?;
    let nu = Word::parse(nu_str, d)?;
    Ok(Monomial::new(mu, nu))
}

/// Does the upcoming input start a coefficient (rather than a `V[...]`
/// factor)?
fn peeks_coeff(c: &mut Cursor) -> bool {
    c.skip_ws();
    let rest = c.rest();
    rest.starts_with(|ch: char| ch.is_ascii_digit() || ch == '√')
        || rest.starts_with("sqrt")
        || (rest.starts_with('-') && !rest.starts_with("-V"))
}

fn parse_term(c: &mut Cursor, d: u32, negate: bool) -> Result<(Monomial, RadSum)> {
    let mut coeff = if peeks_coeff(c) {
        let v = parse_coeff(c)?;
        let _ = c.eat("*");
        v
    } else {
        RadSum::one()
    };
    if negate {
        coeff = coeff.neg();
    }
    let m = parse_factor(c, "V", d)?;
    Ok((m, coeff))
}

/// Parse a one-party element.
pub fn parse_element(src: &str, d: u32) -> Result<Element<RadSum>> {
    let mut c = Cursor::new(src);
    let mut out = Element::zero(d);
    let mut negate = c.eat("-");
    loop {
        let (m, coeff) = parse_term(&mut c, d, negate)?;
        out.add_term(m, coeff);
        if c.at_end() {
            break;
        }
        if c.eat("+") {
            negate = false;
        } else if c.eat("-") {
            negate = true;
        } else {
            return Err(c.err("expected '+', '-', or end of input"));
        }
    }
    Ok(out)
}

/// Parse a bipartite element: terms `V[..;..]⊗W[..;..]`.
pub fn parse_bielement(src: &str, d: u32) -> Result<BiElement<RadSum>> {
    let mut c = Cursor::new(src);
    let mut out = BiElement::zero(d);
    let mut negate = c.eat("-");
    loop {
        let mut coeff = if peeks_coeff(&mut c) {
            let v = parse_coeff(&mut c)?;
            let _ = c.eat("*");
            v
        } else {
            RadSum::one()
        };
        if negate {
            coeff = coeff.neg();
        }
        let alice = parse_factor(&mut c, "V", d)?;
        if !(c.eat("⊗") || c.eat("(x)")) {
            return Err(c.err("expected '⊗' (or '(x)') between V and W factors"));
        }
        let bob = parse_factor(&mut c, "W", d)?;
        out.add_term(alice, bob, coeff);
        if c.at_end() {
            break;
        }
        if c.eat("+") {
            negate = false;
        } else if c.eat("-") {
            negate = true;
        } else {
            return Err(c.err("expected '+', '-', or end of input"));
        }
    }
    Ok(out)
}

fn render_coeff_prefix(coeff: &RadSum) -> String {
    if coeff.as_rat().map(|r| r.is_one()).unwrap_or(false) {
        String::new()
    } else {
        format!("{coeff}*")
    }
}

pub fn render_element(e: &Element<RadSum>, d: u32) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    e.terms()
        .map(|(m, c)| format!("{}{}", render_coeff_prefix(c), m.render(d)))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// JSON form: one entry per (monomial, radicand) pair, value `r·√s`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub mu: String,
    pub nu: String,
    pub coeff: CoeffJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffJson {
    pub r: String,
    pub s: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementJson {
    pub terms: Vec<TermJson>,
}

pub fn element_to_json(e: &Element<RadSum>, d: u32) -> ElementJson {
    let mut terms = Vec::new();
    for (m, c) in e.terms() {
        for (rad, r) in c.terms() {
            terms.push(TermJson {
                mu: m.mu.render(d),
                nu: m.nu.render(d),
                coeff: CoeffJson {
                    r: r.to_string(),
                    s: rad.to_string(),
                },
            });
        }
    }
    ElementJson { terms }
}

pub fn element_from_json(j: &ElementJson, d: u32) -> Result<Element<RadSum>> {
    let mut out = Element::zero(d);
    for t in &j.terms {
        let mu = Word::parse(&t.mu, d)?;
        let nu = Word::parse(&t.nu, d)?;
        let r = parse_rat(&t.coeff.r).ok_or(CoreError::Parse {
            pos: 0,
            msg: format!("bad rational '{}'", t.coeff.r),
        })?;
        let s: BigUint = t.coeff.s.parse().map_err(|_| CoreError::Parse {
            pos: 0,
            msg: format!("bad radicand '{}'", t.coeff.s),
        })?;
        let base = RadScalar::sqrt_of_rat(&Rat::from_integer(s.into()));
        out.add_term(
            Monomial::new(mu, nu),
            RadSum::from_scalar(RadScalar {
                coeff: base.coeff * r,
                radicand: base.radicand,
            }),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_simple_terms() {
        let e = parse_element("V[01;01]", 2).unwrap();
        assert_eq!(e.num_terms(), 1);
        let e = parse_element("V[0;-] + V[1;-]", 2).unwrap();
        assert_eq!(e.num_terms(), 2);
        let e = parse_element("1/2*V[0;0] - 1/2*V[1;1]", 2).unwrap();
        assert_eq!(e.num_terms(), 2);
        // cancellation
        let e = parse_element("V[0;0] - V[0;0]", 2).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn parse_radical_coeffs() {
        let e = parse_element("1/2√2*V[0;-]", 2).unwrap();
        let (_, c) = e.terms().next().unwrap();
        assert!((c.to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let e2 = parse_element("1/2sqrt2*V[0;-]", 2).unwrap();
        assert_eq!(e, e2);
    }

    #[test]
    fn parse_bipartite() {
        let x = parse_bielement("V[0;-]⊗W[0;-]", 2).unwrap();
        assert_eq!(x.terms().count(), 1);
        let y = parse_bielement("V[0;-](x)W[0;-] + V[1;-](x)W[1;-]", 2).unwrap();
        assert_eq!(y.terms().count(), 2);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_element("V[0;2]", 2).unwrap_err();
        assert!(matches!(err, CoreError::LetterOutOfRange { .. }));
        let err = parse_element("V[0;0] & V[1;1]", 2).unwrap_err();
        assert!(matches!(err, CoreError::Parse { .. }));
    }

    #[test]
    fn json_round_trip() {
        let e = parse_element("1/2√2*V[01;-] + 3*V[0;1]", 2).unwrap();
        let j = element_to_json(&e, 2);
        let back = element_from_json(&j, 2).unwrap();
        assert_eq!(e, back);
        // serde serialization shape
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"mu\""));
        assert!(text.contains("\"r\""));
    }

    #[test]
    fn render_round_trip() {
        let e = parse_element("1/2*V[0;0] + V[1;1]", 2).unwrap();
        let s = render_element(&e, 2);
        let back = parse_element(&s, 2).unwrap();
        assert_eq!(e, back);
        assert_eq!(render_element(&Element::zero(2), 2), "0");
    }
}
