//! Dense univariate polynomials over Q: evaluation, Euclidean gcd, Sturm
//! chains, and bisection with exact rational interval endpoints.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::{rat_to_f64, Rat};

/// Polynomial with rational coefficients, ascending order, trailing zeros
/// trimmed; the zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn from_int_coeffs(coeffs: &[BigInt]) -> Self {
        QPoly::new(
            coeffs
                .iter()
                .map(|c| Rat::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    /// Remainder of Euclidean division by `divisor`.
    pub fn rem(&self, divisor: &QPoly) -> QPoly {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dlead = divisor.coeffs.last().unwrap().clone();
        let dd = divisor.degree();
        while r.len() > dd && !r.is_empty() {
            let lead = r.last().unwrap().clone();
            if lead.is_zero() {
                r.pop();
                continue;
            }
            let q = lead / &dlead;
            let shift = r.len() - 1 - dd;
            for (k, c) in divisor.coeffs.iter().enumerate() {
                let idx = shift + k;
                let sub = c * &q;
                r[idx] -= sub;
            }
            r.pop();
        }
        QPoly::new(r)
    }

    /// Monic normalization; zero stays zero.
    pub fn monic(&self) -> QPoly {
        match self.coeffs.last() {
            None => QPoly::zero(),
            Some(lead) => QPoly {
                coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
            },
        }
    }

    /// Euclidean gcd, monic.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> QPoly {
        if self.is_zero() || self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.monic();
        }
        self.div_exact(&g).monic()
    }

    /// Exact quotient (panics on nonzero remainder).
    pub fn div_exact(&self, divisor: &QPoly) -> QPoly {
        assert!(!divisor.is_zero());
        let mut r = self.coeffs.clone();
        let dlead = divisor.coeffs.last().unwrap().clone();
        let dd = divisor.degree();
        let mut q = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd {
            let lead = r.last().unwrap().clone();
            if lead.is_zero() {
                r.pop();
                continue;
            }
            let f = lead / &dlead;
            let shift = r.len() - 1 - dd;
            q[shift] = f.clone();
            for (k, c) in divisor.coeffs.iter().enumerate() {
                let sub = c * &f;
                r[shift + k] -= sub;
            }
            r.pop();
        }
        debug_assert!(QPoly::new(r).is_zero(), "non-exact polynomial division");
        QPoly::new(q)
    }

    /// Substitute `x ↦ x²`.
    pub fn compose_square(&self) -> QPoly {
        let mut out = vec![Rat::zero(); self.coeffs.len() * 2];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[2 * k] = c.clone();
        }
        QPoly::new(out)
    }

    /// Render with `x` as the variable, descending powers, e.g. `x^2+x-1`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = if k == 0 {
                format!("{}", mag)
            } else {
                let var = if k == 1 {
                    "x".to_string()
                } else {
                    format!("x^{k}")
                };
                if mag.is_one() {
                    var
                } else {
                    format!("{}{}", mag, var)
                }
            };
            if parts.is_empty() {
                if c.is_negative() {
                    parts.push(format!("-{body}"));
                } else {
                    parts.push(body);
                }
            } else if c.is_negative() {
                parts.push(format!("-{body}"));
            } else {
                parts.push(format!("+{body}"));
            }
        }
        parts.concat()
    }
}

fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm chain of the squarefree part of `p`.
pub fn sturm_chain(p: &QPoly) -> Vec<QPoly> {
    let p0 = p.squarefree_part();
    if p0.is_zero() || p0.degree() == 0 {
        return vec![p0];
    }
    let mut chain = vec![p0.clone(), p0.derivative()];
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.neg());
        if chain.last().unwrap().degree() == 0 {
            break;
        }
    }
    chain
}

fn sign_variations(chain: &[QPoly], x: &Rat) -> usize {
    let mut count = 0;
    let mut prev = 0;
    for p in chain {
        let s = sign(&p.eval(x));
        if s != 0 {
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
    }
    count
}

/// Number of distinct real roots of `p` in the open interval `(a, b)`;
/// requires that neither endpoint is a root.
pub fn count_roots_in(p: &QPoly, a: &Rat, b: &Rat) -> usize {
    let chain = sturm_chain(p);
    debug_assert!(!p.eval(a).is_zero() && !p.eval(b).is_zero());
    sign_variations(&chain, a) - sign_variations(&chain, b)
}

/// Exact-endpoint bisection: given `p(a)·p(b) < 0`, shrink `[a, b]` by
/// halving until `b − a ≤ tol`, keeping the sign change.
pub fn bisect(p: &QPoly, mut a: Rat, mut b: Rat, tol: &Rat) -> (Rat, Rat) {
    let mut fa = p.eval(&a);
    assert!(
        sign(&fa) * sign(&p.eval(&b)) < 0,
        "bisection requires a sign change"
    );
    let two = Rat::from_integer(BigInt::from(2));
    while &b - &a > *tol {
        let mid = (&a + &b) / &two;
        let fm = p.eval(&mid);
        if fm.is_zero() {
            // land exactly on the root; return a degenerate-width interval
            let eps = tol / &two;
            return (&mid - &eps, &mid + &eps);
        }
        if sign(&fa) * sign(&fm) < 0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    (a, b)
}
