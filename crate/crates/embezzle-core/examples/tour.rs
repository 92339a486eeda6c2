//! A short tour of the library: exact state values, truncated residuals,
//! and factor classification for a couple of spectra.
//!
//! Run with `cargo run --example tour`.

use embezzle_core::classify::{classify, h_group, HGroup, TypeReport};
use embezzle_core::element::Element;
use embezzle_core::factor::DEFAULT_PRIME_BOUND;
use embezzle_core::scalar::{rat_of, RadSum};
use embezzle_core::schmidt::{AlphaSystem, SchmidtSpec, System};
use embezzle_core::state::omega;
use embezzle_core::trunc::TruncatedRep;
use embezzle_core::word::{Monomial, Word};

fn main() -> embezzle_core::Result<()> {
    // a qubit spectrum with squares (2/3, 1/3)
    let (spec, _) = SchmidtSpec::from_rational_squares(vec![rat_of(2, 3), rat_of(1, 3)])?;
    let sys = match spec.system() {
        System::Rad(s) => s,
        _ => unreachable!(),
    };

    // exact state values on a few monomials
    println!("ω on monomials (exact):");
    for (mu, nu) in [("0", "0"), ("01", "01"), ("0", "1"), ("0", "-")] {
        let m = Monomial::new(Word::parse(mu, 2)?, Word::parse(nu, 2)?);
        let e: Element<RadSum> = Element::monomial(2, m.clone());
        let v = omega(&sys, &e)?;
        println!("  ω({}) = {}", m.render(2), sys.render(&v));
    }

    // truncated realization: residuals follow α_i/√(n+1)
    println!("\nembezzlement residuals (diagonal, exact law α_i/√(n+1)):");
    for n in [2usize, 4, 8] {
        let rep = TruncatedRep::build(&spec, n, None)?;
        let r = rep.embezzle_residual();
        println!(
            "  n={n}: {:.6} {:.6} (full {:.6})",
            r.vec_norms.get(0, 0),
            r.vec_norms.get(1, 1),
            r.full
        );
    }

    // classification: the group generated by {2/3, 1/3} is dense
    match classify(&spec, DEFAULT_PRIME_BOUND)? {
        TypeReport::Dense { witness } => println!(
            "\n(2/3,1/3) → Type III_1 (dense); witness pair {:?}",
            witness
        ),
        TypeReport::Countable { .. } => unreachable!(),
    }

    // a countable example with its modular-time group
    let (dyadic, _) = SchmidtSpec::from_rational_squares(vec![
        rat_of(1, 2),
        rat_of(1, 4),
        rat_of(1, 8),
        rat_of(1, 8),
    ])?;
    if let TypeReport::Countable { lambda, m, certificate } =
        classify(&dyadic, DEFAULT_PRIME_BOUND)?
    {
        println!(
            "(1/2,1/4,1/8,1/8) → Type III_λ with λ = {}, m = {m:?}, certificate {}",
            lambda.to_f64(),
            certificate.render()
        );
    }
    if let HGroup::Cyclic { generator_f64, .. } = h_group(&dyadic, DEFAULT_PRIME_BOUND)? {
        println!("modular times H_φ generated by 2π/ln 2 ≈ {generator_f64:.6}");
    }
    Ok(())
}
