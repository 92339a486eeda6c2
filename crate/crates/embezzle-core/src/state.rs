//! Evaluation of the unique quasi-free embezzlement states on `O_d` and
//! `O_d ⊗ O_d`, the modular eigenvalue data, and the KMS eigen-relation
//! check. All values are exact in the spectrum's scalar ring.

use crate::element::{BiElement, Coeff, Element};
use crate::error::Result;
use crate::scalar::{rat_to_f64, Rat};
use crate::schmidt::AlphaSystem;
use crate::word::{Monomial, Word};

/// `ω(V_μV_ν*) = δ_{μν}·α_μ²`, extended linearly.
pub fn omega<S: AlphaSystem>(sys: &S, elem: &Element<S::C>) -> Result<S::C> {
    sys.check_d(elem.d())?;
    let mut acc = sys.embed_rat(Rat::from_integer(0.into()));
    for (m, c) in elem.terms() {
        if m.mu == m.nu {
            acc = acc.add(&c.mul(&sys.alpha_sq_word(&m.mu)));
        }
    }
    Ok(acc)
}

/// The unique bipartite state on a simple tensor `v_μv_ν* ⊗ w_βw_γ*`,
/// selected by comparing `|ν|` and `|γ|`:
///
/// * `|ν| = |γ|`: `δ_{ν,γ} δ_{μ,β} α_γ α_β`
/// * `|ν| < |γ|`, `γ = ζξ`, `|ζ| = |ν|`: `δ_{ν,ζ} δ_{μξ,β} α_γ α_β`
/// * `|ν| > |γ|`, `ν = ζξ`, `|ζ| = |γ|`: `δ_{ζ,γ} δ_{μ,βξ} α_γ α_β α_ξ²`
pub fn s_bipartite_monomial<S: AlphaSystem>(
    sys: &S,
    alice: &Monomial,
    bob: &Monomial,
) -> Option<S::C> {
    let (mu, nu) = (&alice.mu, &alice.nu);
    let (beta, gamma) = (&bob.mu, &bob.nu);
    if nu.len() == gamma.len() {
        if nu == gamma && mu == beta {
            Some(sys.alpha_word(gamma).mul(&sys.alpha_word(beta)))
        } else {
            None
        }
    } else if nu.len() < gamma.len() {
        let (zeta, xi) = gamma.split_at(nu.len());
        if nu == &zeta && mu.concat(&xi) == *beta {
            Some(sys.alpha_word(gamma).mul(&sys.alpha_word(beta)))
        } else {
            None
        }
    } else {
        let (zeta, xi) = nu.split_at(gamma.len());
        if zeta == *gamma && *mu == beta.concat(&xi) {
            Some(
                sys.alpha_word(gamma)
                    .mul(&sys.alpha_word(beta))
                    .mul(&sys.alpha_sq_word(&xi)),
            )
        } else {
            None
        }
    }
}

/// Linear extension of the three-case formula.
pub fn s_bipartite<S: AlphaSystem>(sys: &S, x: &BiElement<S::C>) -> Result<S::C> {
    sys.check_d(x.d())?;
    let mut acc = sys.embed_rat(Rat::from_integer(0.into()));
    for ((alice, bob), c) in x.terms() {
        if let Some(v) = s_bipartite_monomial(sys, alice, bob) {
            acc = acc.add(&c.mul(&v));
        }
    }
    Ok(acc)
}

/// Replace each Bob factor `w_βw_γ*` by `(α_γ/α_β)`·right-multiplication by
/// `v_γv_β*`. The resulting one-party element has the same ω-value as the
/// bipartite state value of the input; this is the independent second
/// evaluation path used for cross-checking.
pub fn flip_reduce<S: AlphaSystem>(sys: &S, x: &BiElement<S::C>) -> Result<Element<S::C>> {
    sys.check_d(x.d())?;
    let mut out = Element::zero(x.d());
    for ((alice, bob), c) in x.terms() {
        let flipped = Monomial::new(bob.nu.clone(), bob.mu.clone());
        if let Some(prod) = alice.mul(&flipped) {
            let ratio = sys.alpha_ratio(&bob.nu, &bob.mu);
            out.add_term(prod, c.mul(&ratio));
        }
    }
    Ok(out)
}

/// `(α_μ/α_ν)²`, the modular-operator eigenvalue on `V_μV_ν*ψ`.
pub fn modular_eigenvalue<S: AlphaSystem>(sys: &S, m: &Monomial) -> Result<S::C> {
    for &l in m.mu.0.iter().chain(m.nu.0.iter()) {
        if l >= sys.d() {
            return Err(crate::error::CoreError::LetterOutOfRange { letter: l, d: sys.d() });
        }
    }
    Ok(sys.modular_eigenvalue_value(m))
}

/// The phase of the modular automorphism on a monomial:
/// `σ_t(V_μV_ν*) = e^{iθ(t)}·V_μV_ν*` with
/// `θ(t) = −2t·(Σ_k ln α_{μ_k} − Σ_k ln α_{ν_k}) = t·Σ_i coeffs[i]·ln α_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseForm {
    /// Rational coefficients on `ln α_i` (here integers: −2·net letter count).
    pub coeffs: Vec<Rat>,
    /// Net letter counts `count_μ(i) − count_ν(i)`.
    pub net_counts: Vec<i64>,
}

impl PhaseForm {
    pub fn is_formally_zero(&self) -> bool {
        self.net_counts.iter().all(|&c| c == 0)
    }

    /// θ(t) as a float, given numeric α.
    pub fn theta_at(&self, alphas: &[f64], t: f64) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(alphas)
            .map(|(c, a)| rat_to_f64(c) * a.ln())
            .sum();
        t * s
    }

    /// Distance of θ(t) from the nearest multiple of 2π.
    pub fn distance_mod_2pi(&self, alphas: &[f64], t: f64) -> f64 {
        let theta = self.theta_at(alphas, t);
        let two_pi = std::f64::consts::TAU;
        let r = theta.rem_euclid(two_pi);
        r.min(two_pi - r)
    }

    /// Exact triviality test for exponent-structured spectra (`α_i² = λ^{m_i}`)
    /// at `t = u·2π/(−ln λ)` with rational `u`: θ(t) ≡ 0 (mod 2π) iff
    /// `u·Σ_i net_counts[i]·m_i ∈ Z`.
    pub fn trivial_at_group_units(&self, m: &[u32], u: &Rat) -> bool {
        let k: i64 = self
            .net_counts
            .iter()
            .zip(m)
            .map(|(&c, &e)| c * e as i64)
            .sum();
        (u * Rat::from_integer(k.into())).is_integer()
    }
}

/// Build the phase descriptor for `σ_t(V_μV_ν*)`.
pub fn sigma_phase(d: u32, m: &Monomial) -> PhaseForm {
    let mut net = vec![0i64; d as usize];
    for &l in &m.mu.0 {
        net[l as usize] += 1;
    }
    for &l in &m.nu.0 {
        net[l as usize] -= 1;
    }
    PhaseForm {
        coeffs: net
            .iter()
            .map(|&c| Rat::from_integer((-2 * c).into()))
            .collect(),
        net_counts: net,
    }
}

/// Outcome of the KMS eigen-relation scan.
#[derive(Clone, Debug)]
pub struct KmsReport {
    pub checked: usize,
    pub counterexample: Option<(Monomial, Monomial)>,
}

impl KmsReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Verify `ω(a·x) = (α_μ²/α_ν²)·ω(x·a)` exactly for every eigen-monomial
/// `a = V_μV_ν*` and every monomial `x`, all word lengths ≤ `max_len`.
pub fn kms_verify<S: AlphaSystem>(sys: &S, max_len: usize) -> Result<KmsReport> {
    let d = sys.d();
    let words = Word::all_up_to(d, max_len);
    let mut checked = 0usize;
    for mu in &words {
        for nu in &words {
            let a = Monomial::new(mu.clone(), nu.clone());
            let ratio = sys.modular_eigenvalue_value(&a);
            let a_elem: Element<S::C> = Element::monomial(d, a.clone());
            for beta in &words {
                for gamma in &words {
                    let x = Monomial::new(beta.clone(), gamma.clone());
                    let x_elem: Element<S::C> = Element::monomial(d, x.clone());
                    let lhs = omega(sys, &a_elem.mul(&x_elem)?)?;
                    let rhs = omega(sys, &x_elem.mul(&a_elem)?)?.mul(&ratio);
                    checked += 1;
                    if !sys.values_equal(&lhs, &rhs) {
                        return Ok(KmsReport {
                            checked,
                            counterexample: Some((a, x)),
                        });
                    }
                }
            }
        }
    }
    Ok(KmsReport {
        checked,
        counterexample: None,
    })
}
