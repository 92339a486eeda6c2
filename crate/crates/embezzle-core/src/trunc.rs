//! Finite-depth numerical realization: prefix shifts on the word tree with a
//! hard cutoff at depth `n`, acting on the doubled space (Alice word ⊗ Bob
//! word), with the catalyst
//! `ψ_n = (n+1)^{−1/2} Σ_{|μ| ≤ n} α_μ |μ⟩_A|μ⟩_B`.
//!
//! The level weights make `‖ψ_n‖ = 1` exact, because every level satisfies
//! `Σ_{|μ|=k} α_μ² = 1`. Shift operators are stored structurally (each basis
//! vector maps to at most one basis vector), which keeps deep sweeps cheap;
//! dense matrices are materialized only where the protocol solvers need
//! them.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::linalg::DMat;
use crate::schmidt::SchmidtSpec;
use crate::word::{Monomial, Word};

pub const DEFAULT_CELL_CAP: u128 = 100_000_000;

/// Index arithmetic for the basis of words of length ≤ n, ordered by length
/// then lexicographically; index 0 is the empty word.
#[derive(Clone, Debug)]
pub struct WordTable {
    pub d: u32,
    pub n: usize,
    /// d^k for k = 0..=n
    pow: Vec<u64>,
    /// number of words of length < k, for k = 0..=n+1
    offset: Vec<u64>,
}

impl WordTable {
    pub fn new(d: u32, n: usize) -> Self {
        let mut pow = Vec::with_capacity(n + 1);
        let mut offset = Vec::with_capacity(n + 2);
        let mut p = 1u64;
        let mut acc = 0u64;
        offset.push(0);
        for _ in 0..=n {
            pow.push(p);
            acc += p;
            offset.push(acc);
            p *= d as u64;
        }
        WordTable { d, n, pow, offset }
    }

    pub fn size(&self) -> usize {
        self.offset[self.n + 1] as usize
    }

    pub fn word_len(&self, idx: u32) -> usize {
        let idx = idx as u64;
        let mut l = 0;
        while self.offset[l + 1] <= idx {
            l += 1;
        }
        l
    }

    pub fn index_of(&self, w: &Word) -> Option<u32> {
        if w.len() > self.n {
            return None;
        }
        let mut rank = 0u64;
        for &l in &w.0 {
            rank = rank * self.d as u64 + l as u64;
        }
        Some((self.offset[w.len()] + rank) as u32)
    }

    pub fn word_at(&self, idx: u32) -> Word {
        let l = self.word_len(idx);
        let mut rank = idx as u64 - self.offset[l];
        let mut letters = vec![0u32; l];
        for i in (0..l).rev() {
            letters[i] = (rank % self.d as u64) as u32;
            rank /= self.d as u64;
        }
        Word(letters)
    }

    /// `|κ⟩ ↦ |iκ⟩`, or `None` past the depth cutoff.
    pub fn prepend(&self, letter: u32, idx: u32) -> Option<u32> {
        let l = self.word_len(idx);
        if l + 1 > self.n {
            return None;
        }
        let rank = idx as u64 - self.offset[l];
        Some((self.offset[l + 1] + letter as u64 * self.pow[l] + rank) as u32)
    }

    /// `|iκ⟩ ↦ |κ⟩` when the first letter is `i`, else `None`.
    pub fn strip(&self, letter: u32, idx: u32) -> Option<u32> {
        let l = self.word_len(idx);
        if l == 0 {
            return None;
        }
        let rank = idx as u64 - self.offset[l];
        let first = rank / self.pow[l - 1];
        if first != letter as u64 {
            return None;
        }
        Some((self.offset[l - 1] + rank % self.pow[l - 1]) as u32)
    }

    /// Strip the whole prefix `nu`, then prepend `mu` (i.e. apply `V_μV_ν*`).
    pub fn word_op(&self, mu: &Word, nu: &Word, idx: u32) -> Option<u32> {
        let mut cur = idx;
        for &l in &nu.0 {
            cur = self.strip(l, cur)?;
        }
        for &l in mu.0.iter().rev() {
            cur = self.prepend(l, cur)?;
        }
        Some(cur)
    }
}

/// Sparse vector on the doubled space, keyed by (Alice index, Bob index).
#[derive(Clone, Debug, Default)]
pub struct SparseDoubled(pub BTreeMap<(u32, u32), f64>);

impl SparseDoubled {
    pub fn zero() -> Self {
        SparseDoubled::default()
    }

    pub fn add_at(&mut self, key: (u32, u32), v: f64) {
        if v == 0.0 {
            return;
        }
        *self.0.entry(key).or_insert(0.0) += v;
    }

    pub fn inner(&self, other: &SparseDoubled) -> f64 {
        // iterate the smaller map
        let (a, b) = if self.0.len() <= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        a.0.iter()
            .filter_map(|(k, v)| b.0.get(k).map(|w| v * w))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn axpy(&mut self, s: f64, other: &SparseDoubled) {
        for (k, v) in &other.0 {
            self.add_at(*k, s * v);
        }
    }

    pub fn scaled(&self, s: f64) -> SparseDoubled {
        SparseDoubled(self.0.iter().map(|(k, v)| (*k, v * s)).collect())
    }
}

/// Truncated doubled-word-space representation with catalyst.
#[derive(Clone, Debug)]
pub struct TruncatedRep {
    pub d: u32,
    pub n: usize,
    pub alpha: Vec<f64>,
    pub table: WordTable,
    /// Alice/Bob factor dimension N = (d^{n+1}−1)/(d−1).
    pub dim: usize,
    psi: SparseDoubled,
}

impl TruncatedRep {
    pub fn build(spec: &SchmidtSpec, n: usize, cell_cap: Option<u128>) -> Result<TruncatedRep> {
        if n < 1 {
            return Err(CoreError::InvalidSpectrum("depth n must be ≥ 1".into()));
        }
        let d = spec.d();
        let table = WordTable::new(d, n);
        let dim = table.size();
        let cap = cell_cap.unwrap_or(DEFAULT_CELL_CAP);
        let cells = (dim as u128) * (dim as u128);
        if cells > cap {
            return Err(CoreError::SizeCap { cells, cap });
        }
        let alpha = spec.alpha_f64();
        let scale = 1.0 / ((n + 1) as f64).sqrt();
        let mut psi = SparseDoubled::zero();
        for idx in 0..dim as u32 {
            let w = table.word_at(idx);
            let coeff: f64 = w.0.iter().map(|&l| alpha[l as usize]).product();
            psi.add_at((idx, idx), coeff * scale);
        }
        Ok(TruncatedRep {
            d,
            n,
            alpha,
            table,
            dim,
            psi,
        })
    }

    pub fn psi(&self) -> &SparseDoubled {
        &self.psi
    }

    /// Apply `V_μV_ν* ⊗ I` (Alice legs).
    pub fn apply_alice(&self, m: &Monomial, v: &SparseDoubled) -> SparseDoubled {
        let mut out = SparseDoubled::zero();
        for (&(a, b), &c) in &v.0 {
            if let Some(na) = self.table.word_op(&m.mu, &m.nu, a) {
                out.add_at((na, b), c);
            }
        }
        out
    }

    /// Apply `I ⊗ W_βW_γ*` (Bob legs).
    pub fn apply_bob(&self, m: &Monomial, v: &SparseDoubled) -> SparseDoubled {
        let mut out = SparseDoubled::zero();
        for (&(a, b), &c) in &v.0 {
            if let Some(nb) = self.table.word_op(&m.mu, &m.nu, b) {
                out.add_at((a, nb), c);
            }
        }
        out
    }

    fn check_word_len(&self, m: &Monomial) -> Result<()> {
        let l = m.mu.len().max(m.nu.len());
        if l > self.n {
            return Err(CoreError::WordTooLong {
                len: l,
                depth: self.n,
            });
        }
        Ok(())
    }

    /// `⟨(V_μV_ν* ⊗ I)ψ_n, ψ_n⟩`; equals `δ_{μν}·α_μ²·(n+1−|μ|)/(n+1)` in
    /// this model (the closed form is used as the test oracle, not here).
    pub fn rep_state(&self, m: &Monomial) -> Result<f64> {
        self.check_word_len(m)?;
        Ok(self.apply_alice(m, &self.psi).inner(&self.psi))
    }

    /// `⟨(V_μV_ν* ⊗ W_βW_γ*)ψ_n, ψ_n⟩`: the truncated realization of the
    /// bipartite state on a simple tensor.
    pub fn rep_bipartite(&self, alice: &Monomial, bob: &Monomial) -> Result<f64> {
        self.check_word_len(alice)?;
        self.check_word_len(bob)?;
        let v = self.apply_bob(bob, &self.apply_alice(alice, &self.psi));
        Ok(v.inner(&self.psi))
    }

    /// Residuals of the defining embezzlement conditions with
    /// `R_{i0} = V_i*`, `T_{j0} = W_j*`.
    pub fn embezzle_residual(&self) -> ResidualReport {
        let d = self.d as usize;
        let mut inner = DMat::zeros(d, d);
        let mut vec_norms = DMat::zeros(d, d);
        let mut full_sq = 0.0;
        for i in 0..d {
            let strip_i = Monomial::new(Word::empty(), Word(vec![i as u32]));
            let after_alice = self.apply_alice(&strip_i, &self.psi);
            for j in 0..d {
                let strip_j = Monomial::new(Word::empty(), Word(vec![j as u32]));
                let mut w = self.apply_bob(&strip_j, &after_alice);
                let delta = if i == j { self.alpha[i] } else { 0.0 };
                inner.set(i, j, w.inner(&self.psi) - delta);
                w.axpy(-delta, &self.psi);
                let r = w.norm();
                vec_norms.set(i, j, r);
                full_sq += r * r;
            }
        }
        ResidualReport {
            n: self.n,
            inner,
            vec_norms,
            full: full_sq.sqrt(),
        }
    }

    /// Max over words of length ≤ L of
    /// `‖(V_μV_ν*⊗I)ψ_n − (α_ν/α_μ)(I⊗W_νW_μ*)ψ_n‖` — the state-level form
    /// of the modular conjugation identity.
    pub fn modular_conjugation_check(&self, max_len: usize) -> Result<ConjugationReport> {
        if max_len > self.n {
            return Err(CoreError::WordTooLong {
                len: max_len,
                depth: self.n,
            });
        }
        let words = Word::all_up_to(self.d, max_len);
        let mut rows = Vec::new();
        let mut max_defect = 0.0f64;
        for mu in &words {
            for nu in &words {
                let alpha_mu: f64 = mu.0.iter().map(|&l| self.alpha[l as usize]).product();
                let alpha_nu: f64 = nu.0.iter().map(|&l| self.alpha[l as usize]).product();
                let lhs = self.apply_alice(&Monomial::new(mu.clone(), nu.clone()), &self.psi);
                let rhs = self.apply_bob(&Monomial::new(nu.clone(), mu.clone()), &self.psi);
                let mut diff = lhs;
                diff.axpy(-(alpha_nu / alpha_mu), &rhs);
                let defect = diff.norm();
                max_defect = max_defect.max(defect);
                rows.push((mu.clone(), nu.clone(), defect));
            }
        }
        Ok(ConjugationReport {
            n: self.n,
            max_defect,
            rows,
        })
    }

    /// Structural invariants of the shift family, verified exhaustively over
    /// the basis; deviations are exact counts, reported as floats for the
    /// tolerance interface.
    pub fn structural_check(&self) -> StructuralReport {
        let dim = self.dim as u32;
        let mut psi_norm_defect = (self.psi.norm() - 1.0).abs();
        // V_i*V_i must be the projection onto words of length ≤ n−1
        let mut isometry_defect = 0usize;
        for i in 0..self.d {
            for idx in 0..dim {
                let through = self
                    .table
                    .prepend(i, idx)
                    .and_then(|mid| self.table.strip(i, mid));
                let expect = if self.table.word_len(idx) < self.n {
                    Some(idx)
                } else {
                    None
                };
                if through != expect {
                    isometry_defect += 1;
                }
            }
        }
        // V_i*V_j = 0 for i ≠ j
        let mut orthogonality_defect = 0usize;
        for i in 0..self.d {
            for j in 0..self.d {
                if i == j {
                    continue;
                }
                for idx in 0..dim {
                    if let Some(mid) = self.table.prepend(j, idx) {
                        if self.table.strip(i, mid).is_some() {
                            orthogonality_defect += 1;
                        }
                    }
                }
            }
        }
        // Σ_i V_iV_i* must be the projection onto nonempty words
        let mut range_sum_defect = 0usize;
        for idx in 0..dim {
            let hits: usize = (0..self.d)
                .filter_map(|i| self.table.strip(i, idx).map(|mid| self.table.prepend(i, mid)))
                .flatten()
                .map(|back| usize::from(back == idx))
                .sum();
            let expect = usize::from(self.table.word_len(idx) >= 1);
            if hits != expect {
                range_sum_defect += 1;
            }
        }
        // Alice-leg and Bob-leg operators commute exactly; spot-check on ψ
        let mut commutation_defect = 0.0f64;
        for i in 0..self.d.min(2) {
            for j in 0..self.d.min(2) {
                let va = Monomial::new(Word(vec![i]), Word::empty());
                let wb = Monomial::new(Word(vec![j]), Word::empty());
                let ab = self.apply_bob(&wb, &self.apply_alice(&va, &self.psi));
                let mut ba = self.apply_alice(&va, &self.apply_bob(&wb, &self.psi));
                ba.axpy(-1.0, &ab);
                commutation_defect = commutation_defect.max(ba.norm());
            }
        }
        if self.dim == 0 {
            psi_norm_defect = f64::NAN;
        }
        StructuralReport {
            psi_norm_defect,
            isometry_defect,
            orthogonality_defect,
            range_sum_defect,
            commutation_defect,
        }
    }

    /// Dense N×N matrix of `V_μV_ν*` on one factor.
    pub fn monomial_dense(&self, m: &Monomial) -> DMat {
        let mut out = DMat::zeros(self.dim, self.dim);
        for idx in 0..self.dim as u32 {
            if let Some(t) = self.table.word_op(&m.mu, &m.nu, idx) {
                out.add_at(t as usize, idx as usize, 1.0);
            }
        }
        out
    }

    /// The catalyst as a dense Alice×Bob matrix (vector on the doubled space).
    pub fn psi_dense(&self) -> DMat {
        let mut out = DMat::zeros(self.dim, self.dim);
        for (&(a, b), &c) in &self.psi.0 {
            out.set(a as usize, b as usize, c);
        }
        out
    }
}

/// Residuals of `R_{i0}T_{j0}ψ = δ_{ij}α_iψ`.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub n: usize,
    /// `⟨R_{i0}T_{j0}ψ_n, ψ_n⟩ − δ_{ij}α_i`
    pub inner: DMat,
    /// `‖R_{i0}T_{j0}ψ_n − δ_{ij}α_iψ_n‖`; diagonal equals `α_i/√(n+1)`.
    pub vec_norms: DMat,
    /// `‖(R⊗I)(I⊗T)(e_0⊗ψ⊗e_0) − f(φ⊗ψ)‖ = 1/√(n+1)`.
    pub full: f64,
}

#[derive(Clone, Debug)]
pub struct ConjugationReport {
    pub n: usize,
    pub max_defect: f64,
    pub rows: Vec<(Word, Word, f64)>,
}

#[derive(Clone, Debug)]
pub struct StructuralReport {
    pub psi_norm_defect: f64,
    pub isometry_defect: usize,
    pub orthogonality_defect: usize,
    pub range_sum_defect: usize,
    pub commutation_defect: f64,
}

impl StructuralReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.psi_norm_defect <= tol
            && self.isometry_defect == 0
            && self.orthogonality_defect == 0
            && self.range_sum_defect == 0
            && self.commutation_defect <= tol
    }
}

/// One row of a convergence table.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub n: usize,
    pub monomial: Monomial,
    pub rep_value: f64,
    pub exact_value: f64,
    pub abs_diff: f64,
}

/// Table of `|rep_state − ω|` per monomial per depth; rows ordered by depth
/// ascending then monomial lexicographic.
pub fn convergence_sweep(
    spec: &SchmidtSpec,
    monomials: &[Monomial],
    n_range: std::ops::RangeInclusive<usize>,
    cell_cap: Option<u128>,
) -> Result<Vec<SweepRow>> {
    use crate::element::Element;
    use crate::scalar::RadSum;
    use crate::schmidt::{element_to_lambda, AlphaSystem, System};
    let mut sorted = monomials.to_vec();
    sorted.sort();
    let system = spec.system();
    let mut rows = Vec::new();
    for n in n_range {
        let rep = TruncatedRep::build(spec, n, cell_cap)?;
        for m in &sorted {
            let rep_value = rep.rep_state(m)?;
            let elem: Element<RadSum> = Element::monomial(spec.d(), m.clone());
            let exact_value = match &system {
                System::Rad(sys) => sys.value_f64(&crate::state::omega(sys, &elem)?),
                System::Lambda(sys) => {
                    let conv = element_to_lambda(sys, &elem)?;
                    sys.value_f64(&crate::state::omega(sys, &conv)?)
                }
            };
            rows.push(SweepRow {
                n,
                monomial: m.clone(),
                rep_value,
                exact_value,
                abs_diff: (rep_value - exact_value).abs(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_of;

    fn uniform2() -> SchmidtSpec {
        SchmidtSpec::uniform(2)
    }

    fn w(s: &str) -> Word {
        Word::parse(s, 10).unwrap()
    }

    #[test]
    fn word_table_round_trip() {
        let t = WordTable::new(3, 3);
        assert_eq!(t.size(), 40); // 1+3+9+27
        for idx in 0..t.size() as u32 {
            let word = t.word_at(idx);
            assert_eq!(t.index_of(&word), Some(idx));
        }
        // prepend/strip agree with word arithmetic
        for idx in 0..t.size() as u32 {
            let word = t.word_at(idx);
            for l in 0..3u32 {
                let p = t.prepend(l, idx);
                if word.len() < 3 {
                    let expect = Word(std::iter::once(l).chain(word.0.iter().copied()).collect());
                    assert_eq!(p.map(|i| t.word_at(i)), Some(expect));
                } else {
                    assert_eq!(p, None);
                }
            }
        }
    }

    #[test]
    fn build_examples() {
        // d=2, n=1 → N=3, ‖ψ‖=1
        let rep = TruncatedRep::build(&uniform2(), 1, None).unwrap();
        assert_eq!(rep.dim, 3);
        assert!((rep.psi().norm() - 1.0).abs() < 1e-15);

        // d=2, n=3: trace of V_0*V_0 = #{words of length ≤ 2} = 7
        let rep = TruncatedRep::build(&uniform2(), 3, None).unwrap();
        let trace: usize = (0..rep.dim as u32)
            .filter(|&idx| {
                rep.table
                    .prepend(0, idx)
                    .and_then(|m| rep.table.strip(0, m))
                    == Some(idx)
            })
            .count();
        assert_eq!(trace, 7);

        // d=3, n=2 → N=13; Σ_i V_iV_i* has rank 12
        let spec3 = SchmidtSpec::uniform(3);
        let rep = TruncatedRep::build(&spec3, 2, None).unwrap();
        assert_eq!(rep.dim, 13);
        let rank: usize = (1..rep.dim as u32).count(); // nonempty words
        assert_eq!(rank, 12);

        // size guard
        assert!(matches!(
            TruncatedRep::build(&uniform2(), 10, Some(1000)),
            Err(CoreError::SizeCap { .. })
        ));
    }

    #[test]
    fn structural_invariants() {
        for n in [1, 2, 4] {
            let rep = TruncatedRep::build(&uniform2(), n, None).unwrap();
            let r = rep.structural_check();
            assert!(r.passes(1e-12), "{r:?} at n={n}");
        }
        let (spec, _) = SchmidtSpec::from_rational_squares(vec![
            rat_of(1, 2),
            rat_of(1, 3),
            rat_of(1, 6),
        ])
        .unwrap();
        let rep = TruncatedRep::build(&spec, 2, None).unwrap();
        assert!(rep.structural_check().passes(1e-12));
    }

    #[test]
    fn rep_state_closed_form() {
        // d=2 uniform, n=3: V_0V_0* → (1/2)·(3/4) = 0.375
        let rep = TruncatedRep::build(&uniform2(), 3, None).unwrap();
        let v = rep
            .rep_state(&Monomial::new(w("0"), w("0")))
            .unwrap();
        assert!((v - 0.375).abs() < 1e-15);
        // identity → 1
        assert!((rep.rep_state(&Monomial::identity()).unwrap() - 1.0).abs() < 1e-15);
        // off-diagonal exactly 0
        assert_eq!(rep.rep_state(&Monomial::new(w("0"), w("1"))).unwrap(), 0.0);
        // word too long errors
        assert!(rep
            .rep_state(&Monomial::new(w("0000"), w("0000")))
            .is_err());
    }

    #[test]
    fn residual_closed_form() {
        // d=2 uniform, n=3: diagonal vector residual = (1/√2)/2
        let rep = TruncatedRep::build(&uniform2(), 3, None).unwrap();
        let r = rep.embezzle_residual();
        let expect = std::f64::consts::FRAC_1_SQRT_2 / 2.0;
        assert!((r.vec_norms.get(0, 0) - expect).abs() < 1e-14);
        assert!((r.vec_norms.get(1, 1) - expect).abs() < 1e-14);
        // off-diagonal inner products are exactly zero
        assert_eq!(r.inner.get(0, 1), 0.0);
        assert_eq!(r.inner.get(1, 0), 0.0);
        // full-vector residual = 1/√(n+1) = 1/2
        assert!((r.full - 0.5).abs() < 1e-14);
    }

    #[test]
    fn conjugation_identity_exact_in_this_model() {
        let rep = TruncatedRep::build(&uniform2(), 4, None).unwrap();
        let r = rep.modular_conjugation_check(2).unwrap();
        // the truncation is Alice/Bob symmetric, so the J-identity is exact
        assert!(r.max_defect < 1e-14, "max defect {}", r.max_defect);
    }

    #[test]
    fn sweep_diffs_match_rate() {
        let spec = uniform2();
        let monos = vec![
            Monomial::identity(),
            Monomial::new(w("0"), w("0")),
            Monomial::new(w("01"), w("01")),
        ];
        let rows = convergence_sweep(&spec, &monos, 3..=6, None).unwrap();
        for row in rows {
            let len = row.monomial.mu.len();
            let bound = len as f64 / (row.n as f64 + 1.0);
            assert!(row.abs_diff <= bound + 1e-14);
            // identity converges exactly
            if row.monomial.is_identity() {
                assert!(row.abs_diff < 1e-14);
            }
        }
    }
}
