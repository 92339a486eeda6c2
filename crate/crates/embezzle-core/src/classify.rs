//! Exact classification of the minimal embezzling factor from Schmidt data:
//! the closed multiplicative group generated by the `α_i²` is either dense
//! (Type III₁) or cyclic with a generator λ that is a root of an admissible
//! integer polynomial (Type III_λ).
//!
//! Classification is exact: rational spectra are factored into prime-exponent
//! vectors and the verdict is read off the rank of the exponent lattice;
//! exponent-form spectra normalize by the gcd of the exponents. Floats are
//! never consulted for a verdict.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CoreError, Result};
use crate::factor::{factorize, is_prime_u64};
use crate::lambda::LambdaField;
use crate::poly::{bisect, QPoly};
use crate::scalar::{rat_of, rat_to_f64, Rat};
use crate::schmidt::{LambdaRep, SchmidtSpec, SpecKind};

/// An admissible certificate polynomial: integer coefficients, constant term
/// −1, all other coefficients ≥ 0 — exactly the class with a unique root in
/// (0,1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySpec {
    coeffs: Vec<BigInt>,
}

impl PolySpec {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(CoreError::InadmissiblePoly("degree must be ≥ 1".into()));
        }
        if coeffs[0] != BigInt::from(-1) {
            return Err(CoreError::InadmissiblePoly(format!(
                "constant term must be −1, got {}",
                coeffs[0]
            )));
        }
        if coeffs[1..].iter().any(|c| c.is_negative()) {
            return Err(CoreError::InadmissiblePoly(
                "nonconstant coefficients must be ≥ 0".into(),
            ));
        }
        let d: BigInt = coeffs[1..].iter().sum();
        if d < BigInt::from(2) {
            return Err(CoreError::InadmissiblePoly(
                "coefficients must sum to d ≥ 2 at x = 1".into(),
            ));
        }
        Ok(PolySpec { coeffs })
    }

    pub fn from_exponents(m: &[u32]) -> Result<Self> {
        let deg = *m.iter().max().expect("nonempty exponent list") as usize;
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[0] = BigInt::from(-1);
        for &e in m {
            coeffs[e as usize] += 1;
        }
        PolySpec::new(coeffs)
    }

    /// `d` = number of exponent terms counted with multiplicity = p(1) + 1.
    pub fn d(&self) -> u32 {
        let s: BigInt = self.coeffs[1..].iter().sum();
        s.to_u32().expect("d fits in u32")
    }

    /// Exponents with multiplicity, ascending.
    pub fn exponents(&self) -> Vec<u32> {
        let mut m = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            for _ in 0..c.to_u32().unwrap_or(0) {
                m.push(k as u32);
            }
        }
        m
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::from_int_coeffs(&self.coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn render(&self) -> String {
        self.to_qpoly().render()
    }

    /// The unique rational root in (0,1), if the root is rational. Candidates
    /// are 1/b with b dividing the leading coefficient (constant term is −1).
    /// Detection is skipped for leading coefficients too large to factor
    /// cheaply; callers then fall back to the certified-interval form, which
    /// remains exact.
    pub fn rational_root(&self) -> Option<Rat> {
        let lead = self.coeffs.last().unwrap().magnitude().clone();
        let lead_u = lead.to_u64().filter(|&v| v <= 1_000_000)?;
        let p = self.to_qpoly();
        let mut b = 2;
        while b * b <= lead_u {
            for cand_b in [b, lead_u / b] {
                if lead_u % b == 0 {
                    let cand = Rat::new(BigInt::one(), BigInt::from(cand_b));
                    if p.eval(&cand).is_zero() {
                        return Some(cand);
                    }
                }
            }
            b += 1;
        }
        if lead_u > 1 {
            let cand = Rat::new(BigInt::one(), BigInt::from(lead_u));
            if p.eval(&cand).is_zero() {
                return Some(cand);
            }
        }
        None
    }
}

/// Exact λ for a Countable verdict: a rational, or a certificate polynomial
/// with an isolating interval (the decimal is never the source of truth).
#[derive(Clone, Debug)]
pub enum LambdaValue {
    Rational(Rat),
    Algebraic(Arc<LambdaField>),
}

impl LambdaValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            LambdaValue::Rational(r) => rat_to_f64(r),
            LambdaValue::Algebraic(f) => f.lambda_f64(),
        }
    }

    pub fn to_rep(&self) -> LambdaRep {
        match self {
            LambdaValue::Rational(r) => LambdaRep::Rational(r.clone()),
            LambdaValue::Algebraic(f) => LambdaRep::Algebraic(f.clone()),
        }
    }
}

/// Verdict on `G_φ`, the closed multiplicative group generated by the `α_i²`.
#[derive(Clone, Debug)]
pub enum GroupVerdict {
    Dense {
        /// Pair `(i, j)` with `ln(α_i)/ln(α_j) ∉ Q`.
        witness: (usize, usize),
    },
    Countable {
        lambda: LambdaValue,
        m: Vec<u32>,
    },
}

/// Full classification report for the minimal embezzling factor.
#[derive(Clone, Debug)]
pub enum TypeReport {
    /// Type III₁.
    Dense { witness: (usize, usize) },
    /// Type III_λ with certificate `Σ x^{m_i} − 1` vanishing at λ (verified).
    Countable {
        lambda: LambdaValue,
        m: Vec<u32>,
        certificate: PolySpec,
    },
}

/// Prime-exponent vector of a positive rational in lowest terms.
fn exponent_vector(
    r: &Rat,
    primes: &mut Vec<BigUint>,
    bound: u64,
) -> Result<std::collections::BTreeMap<BigUint, i64>> {
    let mut v = std::collections::BTreeMap::new();
    for (sgn, part) in [(1i64, r.numer().magnitude()), (-1, r.denom().magnitude())] {
        for (p, e) in factorize(part, bound)? {
            *v.entry(p.clone()).or_insert(0) += sgn * e as i64;
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    v.retain(|_, e| *e != 0);
    Ok(v)
}

/// Is `target` in the lattice spanned by `vs` over Z? Only used in the
/// rank-≤-1 regime, where membership means: parallel to the primitive
/// direction with a coefficient divisible by the gcd of the generators'.
pub fn lattice_contains(vs: &[Vec<i64>], target: &[i64]) -> bool {
    let first = match vs.iter().find(|v| v.iter().any(|&x| x != 0)) {
        Some(v) => v,
        None => return target.iter().all(|&x| x == 0),
    };
    let g0 = first.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let u: Vec<i64> = first.iter().map(|&x| x / g0).collect();
    let mut ts = Vec::new();
    for v in vs {
        match parallel_multiple(v, &u) {
            Some(t) => ts.push(t),
            None => return false, // not rank ≤ 1; caller misuse
        }
    }
    let g = ts.iter().fold(0i64, |acc, &t| acc.gcd(&t));
    match parallel_multiple(target, &u) {
        Some(t) => g != 0 && t % g == 0,
        None => false,
    }
}

/// If `v = t·u` for an integer `t`, return `t`.
fn parallel_multiple(v: &[i64], u: &[i64]) -> Option<i64> {
    debug_assert_eq!(v.len(), u.len());
    let k0 = u.iter().position(|&x| x != 0)?;
    if v[k0] % u[k0] != 0 {
        return None;
    }
    let t = v[k0] / u[k0];
    for (a, b) in v.iter().zip(u) {
        if *a != t * b {
            return None;
        }
    }
    Some(t)
}

fn rational_pow(base: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    let (b, n) = if e >= 0 {
        (base.clone(), e)
    } else {
        (base.recip(), -e)
    };
    for _ in 0..n {
        acc *= &b;
    }
    acc
}

/// Compute the generator of `G_φ` from rational squares via the exponent
/// lattice: Countable iff the lattice has rank ≤ 1, in which case the
/// primitive generator oriented into (0,1) gives λ and the exponents `m_i`.
pub fn group_generator_rational(alpha_sq: &[Rat], bound: u64) -> Result<GroupVerdict> {
    let mut primes = Vec::new();
    let vecs: Vec<_> = alpha_sq
        .iter()
        .map(|a| exponent_vector(a, &mut primes, bound))
        .collect::<Result<_>>()?;
    primes.sort();
    let vs: Vec<Vec<i64>> = vecs
        .iter()
        .map(|v| primes.iter().map(|p| *v.get(p).unwrap_or(&0)).collect())
        .collect();

    // α_i² ∈ (0,1) means every exponent vector is nonzero
    let g0 = vs[0].iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let mut u: Vec<i64> = vs[0].iter().map(|&x| x / g0).collect();

    // orient u so its value lies in (0,1)
    let mut u_val = Rat::one();
    for (p, &e) in primes.iter().zip(&u) {
        u_val *= rational_pow(&Rat::from_integer(BigInt::from(p.clone())), e);
    }
    if u_val >= Rat::one() {
        u = u.iter().map(|&x| -x).collect();
        u_val = u_val.recip();
    }

    let mut ts = Vec::with_capacity(vs.len());
    for (i, v) in vs.iter().enumerate() {
        match parallel_multiple(v, &u) {
            Some(t) => {
                debug_assert!(t > 0, "α² < 1 forces a positive multiple");
                ts.push(t);
            }
            None => {
                return Ok(GroupVerdict::Dense { witness: (0, i) });
            }
        }
    }
    let g = ts.iter().fold(0i64, |acc, &t| acc.gcd(&t));
    let lambda = rational_pow(&u_val, g);
    let m = ts.iter().map(|&t| (t / g) as u32).collect();
    Ok(GroupVerdict::Countable {
        lambda: LambdaValue::Rational(lambda),
        m,
    })
}

/// Group generator for any validated spectrum.
pub fn group_generator(spec: &SchmidtSpec, bound: u64) -> Result<GroupVerdict> {
    match spec.kind() {
        SpecKind::Rational { alpha_sq } => group_generator_rational(alpha_sq, bound),
        SpecKind::Exponent { lambda, m } => match lambda {
            LambdaRep::Rational(l) => {
                let squares: Vec<Rat> = m.iter().map(|&e| rational_pow(l, e as i64)).collect();
                group_generator_rational(&squares, bound)
            }
            LambdaRep::Algebraic(field) => {
                // G_φ is generated by λ^gcd(m); normalize the exponents and
                // re-certify λ^g by the reduced polynomial Σ x^{m_i/g} − 1.
                let g = m.iter().fold(0u32, |acc, &e| acc.gcd(&e));
                let m_norm: Vec<u32> = m.iter().map(|&e| e / g).collect();
                let cert = PolySpec::from_exponents(&m_norm)?;
                let lambda = match cert.rational_root() {
                    Some(r) => LambdaValue::Rational(r),
                    None => {
                        if g == 1 {
                            LambdaValue::Algebraic(field.clone())
                        } else {
                            LambdaValue::Algebraic(LambdaField::new(cert.to_qpoly()))
                        }
                    }
                };
                Ok(GroupVerdict::Countable { lambda, m: m_norm })
            }
        },
    }
}

/// Classify the minimal embezzling factor; Countable verdicts carry the
/// certificate polynomial with `p(λ) = 0` verified exactly.
pub fn classify(spec: &SchmidtSpec, bound: u64) -> Result<TypeReport> {
    match group_generator(spec, bound)? {
        GroupVerdict::Dense { witness } => Ok(TypeReport::Dense { witness }),
        GroupVerdict::Countable { lambda, mut m } => {
            m.sort_unstable();
            let certificate = PolySpec::from_exponents(&m)?;
            let ok = match &lambda {
                LambdaValue::Rational(r) => certificate.to_qpoly().eval(r).is_zero(),
                LambdaValue::Algebraic(f) => f.vanishes_at_lambda(&certificate.to_qpoly()),
            };
            if !ok {
                return Err(CoreError::InvalidSpectrum(
                    "internal: certificate does not vanish at λ".into(),
                ));
            }
            Ok(TypeReport::Countable {
                lambda,
                m,
                certificate,
            })
        }
    }
}

/// Result of isolating the unique root in (0,1).
#[derive(Clone, Debug)]
pub struct RootResult {
    pub interval: (Rat, Rat),
    pub midpoint: f64,
}

/// Bisection on \[0,1\] from the sign change p(0) = −1 < 0 < p(1) = d−1, to an
/// interval of width ≤ `tol`; a sampled-grid monotonicity pass cross-checks
/// uniqueness.
pub fn unique_root(p: &PolySpec, tol: &Rat) -> Result<RootResult> {
    let q = p.to_qpoly();
    // sanity: strict monotonicity on a sampled grid
    let grid = 16;
    let mut prev = q.eval(&rat_of(0, 1));
    for k in 1..=grid {
        let x = rat_of(k, grid);
        let y = q.eval(&x);
        if y <= prev {
            return Err(CoreError::InadmissiblePoly(
                "polynomial is not strictly increasing on (0,1)".into(),
            ));
        }
        prev = y;
    }
    let (a, b) = bisect(&q, rat_of(0, 1), rat_of(1, 1), tol);
    let midpoint = rat_to_f64(&((&a + &b) / rat_of(2, 1)));
    Ok(RootResult {
        interval: (a, b),
        midpoint,
    })
}

pub fn default_root_tol() -> Rat {
    Rat::new(BigInt::one(), BigInt::from(10u64).pow(12))
}

/// Exponent-form Schmidt data realizing an admissible polynomial:
/// `α_j² = λ^{m_j}` for the unique root λ of `p` in (0,1).
pub fn schmidt_from_poly(p: &PolySpec) -> Result<SchmidtSpec> {
    let m = p.exponents();
    let rep = match p.rational_root() {
        Some(r) => LambdaRep::Rational(r),
        None => LambdaRep::Algebraic(LambdaField::new(p.to_qpoly())),
    };
    let (spec, _) = SchmidtSpec::from_exponent(rep, m)?;
    Ok(spec)
}

/// `λ_{m,d}`: the unique root in (0,1) of `x^m + (d−1)x² − 1`.
pub fn family_lambda(m: u32, d: u32, tol: &Rat) -> Result<(PolySpec, RootResult)> {
    if m < 1 || d < 2 {
        return Err(CoreError::InadmissiblePoly(
            "family requires m ≥ 1 and d ≥ 2".into(),
        ));
    }
    let deg = m.max(2) as usize;
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[2] += BigInt::from(d - 1);
    coeffs[m as usize] += BigInt::one();
    let p = PolySpec::new(coeffs)?;
    let root = unique_root(&p, tol)?;
    Ok((p, root))
}

/// Report for an excluded algebraic subtype candidate `1/2 + 1/√q`.
#[derive(Clone, Debug)]
pub struct ExcludedReport {
    pub q: u64,
    /// Minimal polynomial of 1/2 + 1/√q scaled to integer coefficients:
    /// `4q·x² − 4q·x + (q − 4)`.
    pub poly: QPoly,
    pub roots: [RootResult; 2],
}

/// The candidate `λ_q = 1/2 + 1/√q` (q prime ≥ 5) is excluded: its minimal
/// polynomial has **two** roots in (0,1), while admissible certificates have
/// exactly one.
pub fn excluded_lambda_check(q: u64, tol: &Rat) -> Result<ExcludedReport> {
    if q < 5 || !is_prime_u64(q) {
        return if is_prime_u64(q) {
            Err(CoreError::ExcludedPrecondition(q))
        } else {
            Err(CoreError::NotPrime(q))
        };
    }
    let poly = QPoly::from_int_coeffs(&[
        BigInt::from(q) - BigInt::from(4),
        BigInt::from(-4i64 * q as i64),
        BigInt::from(4 * q),
    ]);
    // exact sign pattern: p(0) = q−4 > 0, p(1/2) = −4 < 0, p(1) = q−4 > 0
    assert!(poly.eval(&rat_of(0, 1)) > Rat::zero());
    assert_eq!(poly.eval(&rat_of(1, 2)), rat_of(-4, 1));
    assert!(poly.eval(&rat_of(1, 1)) > Rat::zero());
    let lo = bisect(&poly, rat_of(0, 1), rat_of(1, 2), tol);
    let hi = bisect(&poly, rat_of(1, 2), rat_of(1, 1), tol);
    let mk = |i: (Rat, Rat)| {
        let midpoint = rat_to_f64(&((&i.0 + &i.1) / rat_of(2, 1)));
        RootResult {
            interval: i,
            midpoint,
        }
    };
    Ok(ExcludedReport {
        q,
        poly,
        roots: [mk(lo), mk(hi)],
    })
}

/// The group `H_φ` of times with all modular phases trivial.
#[derive(Clone, Debug)]
pub enum HGroup {
    Trivial,
    /// Cyclic with generator `2π/(−ln λ)` for the normalized group
    /// generator λ of `G_φ`.
    Cyclic {
        lambda: LambdaValue,
        m: Vec<u32>,
        generator_f64: f64,
    },
}

/// `H_φ = ∩_j H_{α_j}`: nontrivial exactly when `G_φ` is countable, with
/// generator `2π/(−ln λ)` once the exponents are reduced to gcd 1.
pub fn h_group(spec: &SchmidtSpec, bound: u64) -> Result<HGroup> {
    match group_generator(spec, bound)? {
        GroupVerdict::Dense { .. } => Ok(HGroup::Trivial),
        GroupVerdict::Countable { lambda, m } => {
            let l = lambda.to_f64();
            Ok(HGroup::Cyclic {
                lambda,
                m,
                generator_f64: std::f64::consts::TAU / (-l.ln()),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::factor::DEFAULT_PRIME_BOUND;
    use super::*;

    fn spec(squares: &[(i64, i64)]) -> SchmidtSpec {
        let sq = squares.iter().map(|&(n, d)| rat_of(n, d)).collect();
        SchmidtSpec::from_rational_squares(sq).unwrap().0
    }

    #[test]
    fn group_generator_examples() {
        // (1/2, 1/2) → Countable(1/2, m=(1,1))
        match group_generator(&spec(&[(1, 2), (1, 2)]), DEFAULT_PRIME_BOUND).unwrap() {
            GroupVerdict::Countable { lambda, m } => {
                assert!(matches!(lambda, LambdaValue::Rational(r) if r == rat_of(1,2)));
                assert_eq!(m, vec![1, 1]);
            }
            _ => panic!("expected countable"),
        }
        // (1/2, 1/4, 1/8, 1/8) → Countable(1/2, m=(1,2,3,3))
        match group_generator(&spec(&[(1, 2), (1, 4), (1, 8), (1, 8)]), DEFAULT_PRIME_BOUND)
            .unwrap()
        {
            GroupVerdict::Countable { lambda, m } => {
                assert!(matches!(lambda, LambdaValue::Rational(r) if r == rat_of(1,2)));
                assert_eq!(m, vec![1, 2, 3, 3]);
            }
            _ => panic!("expected countable"),
        }
        // (3/4, 1/4) → Dense
        match group_generator(&spec(&[(3, 4), (1, 4)]), DEFAULT_PRIME_BOUND).unwrap() {
            GroupVerdict::Dense { witness } => assert_eq!(witness, (0, 1)),
            _ => panic!("expected dense"),
        }
    }

    #[test]
    fn classify_goldens() {
        for d in 2..=6u32 {
            let uni = SchmidtSpec::uniform(d);
            match classify(&uni, DEFAULT_PRIME_BOUND).unwrap() {
                TypeReport::Countable { lambda, m, certificate } => {
                    assert!(
                        matches!(lambda, LambdaValue::Rational(r) if r == Rat::new(BigInt::one(), BigInt::from(d)))
                    );
                    assert_eq!(m, vec![1; d as usize]);
                    // certificate d·x − 1
                    assert_eq!(certificate.coeffs()[1], BigInt::from(d));
                }
                _ => panic!("uniform must be countable"),
            }
        }
    }

    #[test]
    fn exponent_gcd_reduction() {
        // λ=1/√2 certified by 2x²−1 with m=(2,2) reduces to λ'=1/2, m=(1,1)
        let p = PolySpec::new(vec![BigInt::from(-1), BigInt::zero(), BigInt::from(2)]).unwrap();
        let s = schmidt_from_poly(&p).unwrap();
        match classify(&s, DEFAULT_PRIME_BOUND).unwrap() {
            TypeReport::Countable { lambda, m, .. } => {
                assert_eq!(m, vec![1, 1]);
                assert!((lambda.to_f64() - 0.5).abs() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unique_root_examples() {
        let tol = default_root_tol();
        // 2x − 1 → 0.5
        let p = PolySpec::new(vec![BigInt::from(-1), BigInt::from(2)]).unwrap();
        let r = unique_root(&p, &tol).unwrap();
        assert!((r.midpoint - 0.5).abs() < 1e-9);
        // x² + x − 1 → golden conjugate
        let p = PolySpec::new(vec![BigInt::from(-1), BigInt::one(), BigInt::one()]).unwrap();
        let r = unique_root(&p, &tol).unwrap();
        assert!((r.midpoint - 0.6180339887).abs() < 1e-9);
        // x³ + x² − 1 → 0.7548776662
        let p = PolySpec::new(vec![
            BigInt::from(-1),
            BigInt::zero(),
            BigInt::one(),
            BigInt::one(),
        ])
        .unwrap();
        let r = unique_root(&p, &tol).unwrap();
        assert!((r.midpoint - 0.7548776662).abs() < 1e-9);
    }

    #[test]
    fn newton_cross_check_cubic() {
        // independent Newton iteration on x³+x²−1 from x=1
        let mut x = 1.0f64;
        for _ in 0..60 {
            let f = x * x * x + x * x - 1.0;
            let fp = 3.0 * x * x + 2.0 * x;
            x -= f / fp;
        }
        let p = PolySpec::new(vec![
            BigInt::from(-1),
            BigInt::zero(),
            BigInt::one(),
            BigInt::one(),
        ])
        .unwrap();
        let r = unique_root(&p, &default_root_tol()).unwrap();
        assert!((r.midpoint - x).abs() < 1e-10);
    }

    #[test]
    fn schmidt_from_poly_examples() {
        // x + x − 1 → α² = (1/2, 1/2)
        let p = PolySpec::new(vec![BigInt::from(-1), BigInt::from(2)]).unwrap();
        let s = schmidt_from_poly(&p).unwrap();
        let a = s.alpha_sq_f64();
        assert!((a[0] - 0.5).abs() < 1e-12 && (a[1] - 0.5).abs() < 1e-12);

        // x + x² − 1 → α² = (λ, λ²) golden
        let p = PolySpec::new(vec![BigInt::from(-1), BigInt::one(), BigInt::one()]).unwrap();
        let s = schmidt_from_poly(&p).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let a = s.alpha_sq_f64();
        assert!((a[0] - golden).abs() < 1e-12);
        assert!((a[1] - golden * golden).abs() < 1e-12);

        // x + x² + x³ + x³ − 1 → d=4, Σλ^m = 1
        let p = PolySpec::new(vec![
            BigInt::from(-1),
            BigInt::one(),
            BigInt::one(),
            BigInt::from(2),
        ])
        .unwrap();
        let s = schmidt_from_poly(&p).unwrap();
        assert_eq!(s.d(), 4);
        let total: f64 = s.alpha_sq_f64().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn family_examples() {
        let tol = default_root_tol();
        // m=2, d=2: 2x²−1 → 1/√2
        let (_, r) = family_lambda(2, 2, &tol).unwrap();
        assert!((r.midpoint - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        // m=1, d=2: x²+x−1 → golden conjugate
        let (_, r) = family_lambda(1, 2, &tol).unwrap();
        assert!((r.midpoint - 0.6180339887).abs() < 1e-9);
        // λ_{m,2} for m = 1..10 pairwise distinct
        let vals: Vec<f64> = (1..=10)
            .map(|m| family_lambda(m, 2, &tol).unwrap().1.midpoint)
            .collect();
        for i in 0..vals.len() {
            for j in 0..i {
                assert!((vals[i] - vals[j]).abs() > 1e-6);
            }
        }
    }

    #[test]
    fn excluded_lambda_examples() {
        let tol = default_root_tol();
        let r = excluded_lambda_check(5, &tol).unwrap();
        assert!((r.roots[0].midpoint - 0.0527864045).abs() < 1e-9);
        assert!((r.roots[1].midpoint - 0.9472135955).abs() < 1e-9);
        let r = excluded_lambda_check(7, &tol).unwrap();
        assert!((r.roots[1].midpoint - (0.5 + 1.0 / 7f64.sqrt())).abs() < 1e-9);
        assert!(matches!(
            excluded_lambda_check(4, &tol),
            Err(CoreError::NotPrime(4))
        ));
        assert!(matches!(
            excluded_lambda_check(3, &tol),
            Err(CoreError::ExcludedPrecondition(3))
        ));
    }

    #[test]
    fn h_group_examples() {
        // uniform (1/2,1/2) → cyclic with generator 2π/ln2
        match h_group(&spec(&[(1, 2), (1, 2)]), DEFAULT_PRIME_BOUND).unwrap() {
            HGroup::Cyclic { generator_f64, .. } => {
                assert!((generator_f64 - std::f64::consts::TAU / 2f64.ln()).abs() < 1e-12);
            }
            _ => panic!(),
        }
        // (3/4,1/4) → trivial
        assert!(matches!(
            h_group(&spec(&[(3, 4), (1, 4)]), DEFAULT_PRIME_BOUND).unwrap(),
            HGroup::Trivial
        ));
    }

    #[test]
    fn lattice_membership() {
        let vs = vec![vec![-2, 0], vec![-4, 0]];
        assert!(lattice_contains(&vs, &[-2, 0]));
        assert!(lattice_contains(&vs, &[4, 0]));
        assert!(!lattice_contains(&vs, &[-1, 0]));
        assert!(!lattice_contains(&vs, &[-2, 1]));
    }
}
