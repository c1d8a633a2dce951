//! Spectral purifications and Uhlmann isometries.

use crate::error::{Error, Result};
use crate::qmat::eig::{eig_hermitian_mat, SUPPORT_CUTOFF};
use crate::qmat::op::{dagger, CMat, CVec, C64, ZERO};
use crate::qmat::space::RegisterSpace;
use crate::qmat::state::{DensityMatrix, PureState};

/// Canonical (spectral) purification of `rho` with a fresh reference register
/// `ref_label` of the same dimension: |ψ⟩ = Σᵢ √λᵢ |vᵢ⟩|i⟩ with eigenvalues
/// descending, ties broken by eigenvector lexicographic order.
pub fn purify(rho: &DensityMatrix, ref_label: &str) -> Result<PureState> {
    if !rho.is_normalized() {
        return Err(Error::Precondition(
            "purify expects a normalized state".into(),
        ));
    }
    if rho.space().contains(ref_label) {
        return Err(Error::Labeling(format!(
            "reference label {ref_label} collides with state registers"
        )));
    }
    let d = rho.dim();
    let eig = eig_hermitian_mat(rho.mat())?;
    let space = rho.space().tensor(&RegisterSpace::single(ref_label, d))?;
    let mut amp = CVec::zeros(d * d);
    for (k, &lam) in eig.values.iter().enumerate() {
        // eigenvalues at the Jacobi noise floor are spurious rank
        if lam <= SUPPORT_CUTOFF {
            continue;
        }
        let c = lam.sqrt();
        for i in 0..d {
            amp[i * d + k] = eig.vectors[(i, k)] * c;
        }
    }
    // round-off in tiny eigenvalues can leave the norm slightly off 1
    let norm = amp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!(
            "purification norm {norm} too far from 1"
        )));
    }
    for x in amp.iter_mut() {
        *x /= norm;
    }
    Ok(PureState::trusted(space, amp))
}

/// A (possibly rectangular) isometry between two labeled spaces.
#[derive(Debug, Clone)]
pub struct IsometryOp {
    mat: CMat, // codomain_dim x domain_dim
    domain: RegisterSpace,
    codomain: RegisterSpace,
}

impl IsometryOp {
    pub fn new(mat: CMat, domain: RegisterSpace, codomain: RegisterSpace) -> Result<Self> {
        if mat.nrows() != codomain.total_dim() || mat.ncols() != domain.total_dim() {
            return Err(Error::Dimension(format!(
                "isometry is {}x{}, expected {}x{}",
                mat.nrows(),
                mat.ncols(),
                codomain.total_dim(),
                domain.total_dim()
            )));
        }
        Ok(Self {
            mat,
            domain,
            codomain,
        })
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn domain(&self) -> &RegisterSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &RegisterSpace {
        &self.codomain
    }

    /// max-entry defect of V†V = 𝕀 on the domain.
    pub fn isometry_defect(&self) -> f64 {
        let g = dagger(&self.mat).dot(&self.mat);
        let d = self.domain.total_dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// Apply (𝕀_anchor ⊗ V) to `psi`; the non-anchor registers of `psi` must
    /// match the domain (same labels, any order). Output registers:
    /// [anchor..., codomain...].
    pub fn apply(&self, psi: &PureState, anchor: &[&str]) -> Result<PureState> {
        let mut order: Vec<&str> = anchor.to_vec();
        order.extend(self.domain.labels());
        let p = psi.permuted(&order)?;
        let d_a: usize = anchor
            .iter()
            .map(|l| psi.space().dim_of(l).unwrap())
            .product::<usize>()
            .max(1);
        let d_c = self.domain.total_dim();
        let d_b = self.codomain.total_dim();
        if p.dim() != d_a * d_c {
            return Err(Error::Dimension("state does not match isometry domain".into()));
        }
        let mut amp = CVec::zeros(d_a * d_b);
        for a in 0..d_a {
            for b in 0..d_b {
                let mut acc = ZERO;
                for c in 0..d_c {
                    acc += self.mat[(b, c)] * p.amplitudes()[a * d_c + c];
                }
                amp[a * d_b + b] = acc;
            }
        }
        let space = psi.space().select(anchor)?.tensor(&self.codomain)?;
        let norm = amp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidState(format!(
                "isometry application changed norm to {norm}"
            )));
        }
        for x in amp.iter_mut() {
            *x /= norm;
        }
        Ok(PureState::trusted(space, amp))
    }
}

/// Uhlmann isometry between two purifications of (numerically) the same state
/// on the `anchor` registers.
///
/// `psi1` lives on anchor ∪ B, `psi2` on anchor ∪ C with dim(C) ≤ dim(B); the
/// returned V: C → B satisfies (𝕀_anchor ⊗ V)|psi2⟩ = |psi1⟩ and V†V = 𝕀.
pub fn uhlmann_isometry(
    psi1: &PureState,
    psi2: &PureState,
    anchor: &[&str],
) -> Result<IsometryOp> {
    if !psi1.space().contains_all(anchor) || !psi2.space().contains_all(anchor) {
        return Err(Error::Labeling("anchor labels missing from a state".into()));
    }
    for l in anchor {
        if psi1.space().dim_of(l) != psi2.space().dim_of(l) {
            return Err(Error::Dimension(format!(
                "anchor register {l} has differing dimensions"
            )));
        }
    }
    let b_labels: Vec<&str> = psi1.space().complement(anchor);
    let c_labels: Vec<&str> = psi2.space().complement(anchor);
    let codomain = psi1.space().select(&b_labels)?;
    let domain = psi2.space().select(&c_labels)?;
    let d_b = codomain.total_dim();
    let d_c = domain.total_dim();
    if d_c > d_b {
        return Err(Error::Dimension(format!(
            "isometry domain dimension {d_c} exceeds codomain {d_b}"
        )));
    }
    let mut order1: Vec<&str> = anchor.to_vec();
    order1.extend(b_labels.iter().copied());
    let mut order2: Vec<&str> = anchor.to_vec();
    order2.extend(c_labels.iter().copied());
    let p1 = psi1.permuted(&order1)?;
    let p2 = psi2.permuted(&order2)?;
    let d_a: usize = anchor
        .iter()
        .map(|l| psi1.space().dim_of(l).unwrap())
        .product::<usize>()
        .max(1);

    let rho1 = p1.marginal(anchor)?;
    let rho2 = p2.marginal(anchor)?;
    let mismatch = crate::qmat::eig::trace_norm(&rho1.op().sub(rho2.op())?);
    if mismatch > 1e-8 {
        return Err(Error::Precondition(format!(
            "anchor marginals differ by {mismatch:.3e} in trace norm"
        )));
    }

    // expand both states in the eigenbasis of the shared anchor marginal;
    // the residual vectors on each side are orthogonal with norms √λ
    let eig = eig_hermitian_mat(rho1.mat())?;
    let mut b_vecs: Vec<CVec> = Vec::new();
    let mut c_vecs: Vec<CVec> = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= SUPPORT_CUTOFF {
            continue;
        }
        let mut bv = CVec::zeros(d_b);
        let mut cv = CVec::zeros(d_c);
        for a in 0..d_a {
            let coeff = eig.vectors[(a, k)].conj();
            if coeff == ZERO {
                continue;
            }
            for b in 0..d_b {
                bv[b] += coeff * p1.amplitudes()[a * d_b + b];
            }
            for c in 0..d_c {
                cv[c] += coeff * p2.amplitudes()[a * d_c + c];
            }
        }
        b_vecs.push(bv);
        c_vecs.push(cv);
    }
    // Gram-Schmidt in descending-eigenvalue order; dominant directions are
    // barely rotated, and V†V = 𝕀 holds to orthonormalization accuracy even
    // when the anchor marginals only agree approximately
    let b_on = gram_schmidt(b_vecs);
    let c_on = gram_schmidt(c_vecs);
    let rank = b_on.len().min(c_on.len());
    let mut b_basis: Vec<CVec> = b_on.into_iter().take(rank).collect();
    let mut c_basis: Vec<CVec> = c_on.into_iter().take(rank).collect();
    complete_basis(&mut c_basis, d_c);
    complete_basis(&mut b_basis, d_b);
    let mut v = CMat::zeros((d_b, d_c));
    for k in 0..d_c {
        for (r, bval) in b_basis[k].iter().enumerate() {
            for (c, cval) in c_basis[k].iter().enumerate() {
                v[(r, c)] += bval * cval.conj();
            }
        }
    }
    IsometryOp::new(v, domain, codomain)
}

fn gram_schmidt(vecs: Vec<CVec>) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for mut v in vecs {
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in &out {
                let overlap: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b.iter()) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-7 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            out.push(v);
        }
    }
    out
}

fn complete_basis(basis: &mut Vec<CVec>, dim: usize) {
    let mut cand = 0usize;
    while basis.len() < dim && cand < dim {
        let mut v = CVec::zeros(dim);
        v[cand] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis.iter() {
                let overlap: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b.iter()) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
        cand += 1;
    }
    debug_assert_eq!(basis.len(), dim);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::op::{dagger, Operator};

    fn random_density(d: usize, rank: usize, seed: u64) -> DensityMatrix {
        use rand::Rng;
        let mut rng = crate::seed::rng(seed, 0);
        let mut g = CMat::zeros((d, rank));
        for i in 0..d {
            for j in 0..rank {
                g[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let m = g.dot(&dagger(&g));
        let tr: f64 = (0..d).map(|i| m[(i, i)].re).sum();
        let op = Operator::new(RegisterSpace::single("S", d), m.mapv(|x| x / tr)).unwrap();
        DensityMatrix::new(op, true).unwrap()
    }

    #[test]
    fn purify_pure_state_is_product() {
        let space = RegisterSpace::single("S", 2);
        let psi = PureState::basis(space, 0).unwrap();
        let rho = psi.to_density();
        let p = purify(&rho, "R").unwrap();
        let target = PureState::basis(p.space().clone(), 0).unwrap();
        assert!(p.fidelity_with(&target) > 1.0 - 1e-12);
    }

    #[test]
    fn purify_maximally_mixed_gives_uniform_schmidt() {
        let rho = DensityMatrix::maximally_mixed(RegisterSpace::single("S", 2));
        let p = purify(&rho, "R").unwrap();
        let red = p.marginal(&["S"]).unwrap();
        assert!(red.op().max_abs_diff(rho.op()) < 1e-12);
        let nonzero: Vec<f64> = p
            .amplitudes()
            .iter()
            .map(|x| x.norm_sqr())
            .filter(|&x| x > 1e-12)
            .collect();
        assert_eq!(nonzero.len(), 2);
        for p in nonzero {
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn purify_roundtrip_random_qutrit() {
        let rho = random_density(3, 2, 5);
        let p = purify(&rho, "R").unwrap();
        let red = p.marginal(&["S"]).unwrap();
        assert!(crate::qmat::eig::trace_norm(&red.op().sub(rho.op()).unwrap()) <= 1e-9);
    }

    #[test]
    fn uhlmann_identity_case() {
        let rho = random_density(2, 2, 9);
        let p = purify(&rho, "R").unwrap();
        let v = uhlmann_isometry(&p, &p, &["S"]).unwrap();
        let d = v.domain().total_dim();
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v.mat()[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn uhlmann_recovers_unitary_rotation() {
        // psi2 = (I ⊗ U) psi1 for a random unitary on the reference; checked
        // by action, not entries
        let rho = random_density(2, 2, 21);
        let p1 = purify(&rho, "R").unwrap();
        use rand::Rng;
        let mut rng = crate::seed::rng(90, 0);
        let mut g = CMat::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                g[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let h = &g + &dagger(&g);
        let e = eig_hermitian_mat(&h).unwrap();
        let u = Operator::new(RegisterSpace::single("R", 2), e.vectors).unwrap();
        let p2 = p1.apply(&u).unwrap();
        let v = uhlmann_isometry(&p1, &p2, &["S"]).unwrap();
        assert!(v.isometry_defect() < 1e-9);
        let moved = v.apply(&p2, &["S"]).unwrap();
        assert!(moved.fidelity_with(&p1) >= 1.0 - 1e-9);
    }

    #[test]
    fn uhlmann_between_two_canonical_purifications() {
        let rho = random_density(2, 2, 33);
        let p1 = purify(&rho, "R1").unwrap();
        let p2 = purify(&rho, "R2").unwrap();
        let v = uhlmann_isometry(&p1, &p2, &["S"]).unwrap();
        assert!(v.isometry_defect() < 1e-9);
        let moved = v.apply(&p2, &["S"]).unwrap();
        assert!(moved.fidelity_with(&p1) >= 1.0 - 1e-9);
    }

    #[test]
    fn uhlmann_rejects_mismatched_marginals() {
        let r1 = random_density(2, 2, 41);
        let r2 = random_density(2, 2, 42);
        let p1 = purify(&r1, "R").unwrap();
        let p2 = purify(&r2, "R").unwrap();
        assert!(uhlmann_isometry(&p1, &p2, &["S"]).is_err());
    }

    #[test]
    fn uhlmann_into_larger_codomain_keeps_isometry() {
        let rho = random_density(2, 2, 55);
        let p_small = purify(&rho, "R").unwrap();
        let extra = PureState::basis(RegisterSpace::single("E", 2), 0).unwrap();
        let p_big = p_small.tensor(&extra).unwrap();
        let v = uhlmann_isometry(&p_big, &p_small, &["S"]).unwrap();
        assert_eq!(v.codomain().total_dim(), 4);
        assert_eq!(v.domain().total_dim(), 2);
        assert!(v.isometry_defect() < 1e-9);
        let moved = v.apply(&p_small, &["S"]).unwrap();
        assert!(moved.fidelity_with(&p_big.permuted(&["S", "R", "E"]).unwrap()) >= 1.0 - 1e-9);
    }
}
