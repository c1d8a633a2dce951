//! The flag-qubit purification driving quantum rejection sampling.
//!
//! For σ = ρ^{A_f} ⊗ ρ^{B_f} and imax = I_max(A_f:B_f), operator dominance
//! ρ ⪯ 2^imax σ yields the residual state τ = (σ − 2^{-imax} ρ)/(1 − 2^{-imax})
//! and the purification
//!
//!   |Ψ⟩ = √(2^{-imax}) |φ⟩|0⟩_Q + √(1 − 2^{-imax}) |τ⟩|1⟩_Q ,
//!
//! where |φ⟩ purifies ρ^{A_fB_f}. Measuring Q gives 0 with probability
//! exactly 2^{-imax} and then holds a purification of ρ^{A_fB_f}.

use crate::entropics::dmax::d_max;
use crate::error::{Error, Result};
use crate::qmat::eig::eig_hermitian_mat;
use crate::qmat::op::{CVec, Operator, C64};
use crate::qmat::purify::{purify, uhlmann_isometry, IsometryOp};
use crate::qmat::space::RegisterSpace;
use crate::qmat::state::{DensityMatrix, PureState};

#[derive(Debug, Clone)]
pub struct RejectionPurification {
    /// |Ψ⟩ over (A_f, B_f, A, B, Q)
    pub phi: PureState,
    /// the Q=0 branch |φ⟩ over (A_f, B_f, A, B): a purification of ρ^{A_fB_f}
    pub phi_q0: PureState,
    /// the residual state τ on (A_f, B_f); absent when imax ≈ 0
    pub tau: Option<DensityMatrix>,
    /// I_max(A_f:B_f) of the input
    pub imax: f64,
    /// success probability of one Q measurement, 2^{-imax}
    pub p0: f64,
    /// Uhlmann isometry W: (A, B) → (A, B, Q) with (𝕀 ⊗ W)(φ₁ ⊗ φ₂) = |Ψ⟩
    pub w_isometry: IsometryOp,
    pub q_label: String,
}

const MARGINAL_TOL: f64 = 1e-8;

/// Build the rejection-sampling purification from ρ^{A_fB_f} and purifications
/// φ₁ of ρ^{A_f} (registers (A_f, A)) and φ₂ of ρ^{B_f} (registers (B_f, B)).
pub fn rejection_purification(
    rho_joint: &DensityMatrix,
    phi1: &PureState,
    phi2: &PureState,
) -> Result<RejectionPurification> {
    if rho_joint.space().len() != 2 {
        return Err(Error::Labeling(
            "rejection purification expects a two-register joint state".into(),
        ));
    }
    let labels = rho_joint.space().labels();
    let (af, bf) = (labels[0], labels[1]);
    if !phi1.space().contains(af) || phi1.space().len() != 2 {
        return Err(Error::Labeling(format!(
            "phi1 must purify the {af} marginal with one extra register"
        )));
    }
    if !phi2.space().contains(bf) || phi2.space().len() != 2 {
        return Err(Error::Labeling(format!(
            "phi2 must purify the {bf} marginal with one extra register"
        )));
    }
    let a_label = phi1
        .space()
        .labels()
        .into_iter()
        .find(|l| *l != af)
        .unwrap()
        .to_string();
    let b_label = phi2
        .space()
        .labels()
        .into_iter()
        .find(|l| *l != bf)
        .unwrap()
        .to_string();
    let rho_a = rho_joint.partial_trace(&[af])?;
    let rho_b = rho_joint.partial_trace(&[bf])?;
    let m1 = crate::qmat::eig::trace_norm(&phi1.marginal(&[af])?.op().sub(rho_a.op())?);
    let m2 = crate::qmat::eig::trace_norm(&phi2.marginal(&[bf])?.op().sub(rho_b.op())?);
    if m1 > MARGINAL_TOL || m2 > MARGINAL_TOL {
        return Err(Error::Precondition(format!(
            "purification marginals differ from the joint marginals by ({m1:.3e}, {m2:.3e})"
        )));
    }
    let sigma = rho_a.tensor(&rho_b)?;
    let imax_v = d_max(rho_joint, &sigma)?;
    if imax_v.value.is_infinite() {
        return Err(Error::Domain(
            "supp(rho) not contained in supp of the marginal product".into(),
        ));
    }
    let imax = imax_v.value.max(0.0);
    let p0 = 2f64.powf(-imax);

    let d_a = phi1.space().dim_of(&a_label).unwrap();
    let d_b = phi2.space().dim_of(&b_label).unwrap();
    let d_f = rho_joint.dim();
    if d_a * d_b != d_f {
        return Err(Error::Dimension(format!(
            "purifying registers ({d_a} x {d_b}) must match the joint dimension {d_f}"
        )));
    }
    let q_label = "Q".to_string();

    // Q=0 branch: spectral purification of the joint, reference reshaped
    // into (A, B)
    let phi_q0 = purify(rho_joint, "__REF")?
        .split_register("__REF", &[(&a_label, d_a), (&b_label, d_b)])?;

    let near_product = imax <= 1e-9;
    let (tau, psi) = if near_product {
        // p0 = 1: Q deterministically |0⟩
        let mut amp = CVec::zeros(phi_q0.dim() * 2);
        for (i, &x) in phi_q0.amplitudes().iter().enumerate() {
            amp[2 * i] = x;
        }
        let space = phi_q0
            .space()
            .tensor(&RegisterSpace::single(&q_label, 2))?;
        (None, PureState::trusted(space, amp))
    } else {
        let scale = 1.0 / (1.0 - p0);
        let tau_op = sigma
            .op()
            .sub(&rho_joint.op().scaled(C64::new(p0, 0.0)))?
            .scaled(C64::new(scale, 0.0));
        // PSD by the defining property of imax (up to round-off)
        let e = eig_hermitian_mat(tau_op.mat())?;
        let lmin = e.values.last().copied().unwrap_or(0.0);
        if lmin < -1e-9 {
            return Err(Error::InvalidState(format!(
                "residual state has eigenvalue {lmin:.3e}"
            )));
        }
        let tau_clean = Operator::new(
            tau_op.space().clone(),
            e.map_spectrum(|l| l.max(0.0)),
        )?;
        let tr = tau_clean.trace().re;
        let tau = DensityMatrix::trusted(
            tau_clean.scaled(C64::new(1.0 / tr, 0.0)),
            true,
        );
        let tau_pure = purify(&tau, "__REF")?
            .split_register("__REF", &[(&a_label, d_a), (&b_label, d_b)])?;
        let c0 = p0.sqrt();
        let c1 = (1.0 - p0).sqrt();
        let mut amp = CVec::zeros(phi_q0.dim() * 2);
        for i in 0..phi_q0.dim() {
            amp[2 * i] = phi_q0.amplitudes()[i] * c0;
            amp[2 * i + 1] = tau_pure.amplitudes()[i] * c1;
        }
        let space = phi_q0
            .space()
            .tensor(&RegisterSpace::single(&q_label, 2))?;
        (Some(tau), PureState::trusted(space, amp))
    };

    // W: (A,B) → (A,B,Q) moving φ₁⊗φ₂ onto |Ψ⟩
    let shared = phi1.tensor(phi2)?;
    let w_isometry = uhlmann_isometry(&psi, &shared, &[af, bf])?;

    Ok(RejectionPurification {
        phi: psi,
        phi_q0,
        tau,
        imax,
        p0,
        w_isometry,
        q_label,
    })
}

impl RejectionPurification {
    /// Exact probability of outcome 0 when measuring Q on |Ψ⟩ (computed from
    /// the state, not from the stored p0).
    pub fn q_zero_probability(&self) -> f64 {
        let q = &self.q_label;
        let rho_q = self
            .phi
            .marginal(&[q])
            .expect("Q register present");
        rho_q.mat()[(0, 0)].re
    }

    /// The state conditioned on Q = 0, renormalized, as a pure state over
    /// (A_f, B_f, A, B); fidelity with `phi_q0` certifies the construction.
    pub fn conditional_on_zero(&self) -> PureState {
        let dq = 2usize;
        let d = self.phi.dim() / dq;
        let mut amp = CVec::zeros(d);
        for i in 0..d {
            amp[i] = self.phi.amplitudes()[i * dq];
        }
        let norm = amp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in amp.iter_mut() {
            *x /= norm;
        }
        let labels = self.phi.space().labels();
        let regs: Vec<(&str, usize)> = labels
            .iter()
            .take(labels.len() - 1)
            .map(|l| (*l, self.phi.space().dim_of(l).unwrap()))
            .collect();
        PureState::trusted(RegisterSpace::new(&regs).unwrap(), amp)
    }
}
