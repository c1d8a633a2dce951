use crate::qmat::eig::eig_hermitian_mat;
use crate::qmat::op::Operator;

/// A binary-hypothesis-testing operator 0 ⪯ Π ⪯ 𝕀 in Neyman-Pearson threshold
/// form, with its achieved acceptance Tr[Πρ] and leakage Tr[Πσ].
#[derive(Debug, Clone)]
pub struct Tester {
    pub pi: Operator,
    pub acceptance: f64,
    pub leakage: f64,
    /// likelihood-ratio threshold; infinite for the support-projector testers
    pub threshold: f64,
    /// fractional weight on the boundary eigenspace
    pub boundary_weight: f64,
    /// the ε the tester was built for
    pub eps: f64,
}

impl Tester {
    /// Operator-range defect: how far the eigenvalues of Π leave [0, 1].
    pub fn range_defect(&self) -> f64 {
        let e = eig_hermitian_mat(self.pi.mat()).expect("tester is Hermitian");
        let mut worst = 0.0f64;
        for &l in &e.values {
            worst = worst.max((-l).max(l - 1.0).max(0.0));
        }
        worst
    }

    /// Acceptance shortfall against the ε the tester was built for.
    pub fn acceptance_defect(&self) -> f64 {
        ((1.0 - self.eps) - self.acceptance).max(0.0)
    }
}
