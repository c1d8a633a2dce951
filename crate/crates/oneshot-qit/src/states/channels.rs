//! Channels that reconstruct a given tripartite state from fixed
//! purifications of its marginals, plus the completely dephasing channel.

use crate::error::{Error, Result};
use crate::qmat::channel::KrausChannel;
use crate::qmat::eig::trace_norm;
use crate::qmat::op::{CMat, C64};
use crate::qmat::purify::{purify, uhlmann_isometry};
use crate::qmat::space::RegisterSpace;
use crate::qmat::state::{DensityMatrix, PureState};
use crate::states::im::ImState;

const PURIFICATION_TOL: f64 = 1e-8;

fn check_purifies(phi: &PureState, target: &DensityMatrix, what: &str) -> Result<()> {
    let labels = target.space().labels();
    let marg = phi.marginal(&labels)?;
    let defect = trace_norm(&marg.op().sub(target.op())?);
    if defect > PURIFICATION_TOL {
        return Err(Error::Precondition(format!(
            "{what} does not purify its marginal (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// The channel of an IM-state ρ^{A_fB_fC} and fixed purifications φ₁, φ₂ of
/// its marginals: 𝒩: (A,B) → C with (𝕀 ⊗ 𝒩)(φ₁ ⊗ φ₂) = ρ. Kraus operators
/// come from slicing the Uhlmann isometry (A,B) → (C,R) along the reference
/// basis of a spectral purification of ρ.
pub fn im_extended_channel(
    im: &ImState,
    phi1: &PureState,
    phi2: &PureState,
) -> Result<KrausChannel> {
    let (af, bf, _c) = im.labels();
    check_purifies(phi1, &im.marginal_af(), "phi1")?;
    check_purifies(phi2, &im.marginal_bf(), "phi2")?;
    let psi1 = purify(im.rho(), "__R")?;
    let psi2 = phi1.tensor(phi2)?;
    let v = uhlmann_isometry(&psi1, &psi2, &[af, bf])?;
    KrausChannel::from_isometry(&v, &["__R"])
}

/// Lemma-style channel for a general tripartite state ρ^{A_fB_fC} and an
/// arbitrary purification φ of ρ^{A_fB_f} on (A_f, B_f, A, B):
/// (𝕀 ⊗ 𝒩^{AB→C})(φ) = ρ.
pub fn general_channel(rho: &DensityMatrix, phi: &PureState) -> Result<KrausChannel> {
    if rho.space().len() != 3 {
        return Err(Error::Labeling(
            "general_channel expects a three-register state".into(),
        ));
    }
    let labels = rho.space().labels();
    let (af, bf) = (labels[0], labels[1]);
    check_purifies(phi, &rho.partial_trace(&[af, bf])?, "phi")?;
    let psi1 = purify(rho, "__E")?;
    let v = uhlmann_isometry(&psi1, phi, &[af, bf])?;
    KrausChannel::from_isometry(&v, &["__E"])
}

/// The completely dephasing channel on a size-K classical register.
pub fn dephasing_channel(in_label: &str, out_label: &str, k: usize) -> Result<KrausChannel> {
    if k == 0 {
        return Err(Error::Parameter("dephasing dimension must be >= 1".into()));
    }
    let mut kraus = Vec::with_capacity(k);
    for x in 0..k {
        let mut m = CMat::zeros((k, k));
        m[(x, x)] = C64::new(1.0, 0.0);
        kraus.push(m);
    }
    KrausChannel::new(
        kraus,
        RegisterSpace::single(in_label, k),
        RegisterSpace::single(out_label, k),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::im::make_im_state;
    use crate::states::random::random_state;

    #[test]
    fn product_im_state_keeps_independence() {
        let a = random_state(&RegisterSpace::single("Af", 2), 2, 1).unwrap();
        let b = random_state(&RegisterSpace::single("Bf", 2), 2, 2).unwrap();
        let c = random_state(&RegisterSpace::single("C", 2), 2, 3).unwrap();
        let rho = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let im = ImState::new(rho.clone(), "Af", "Bf", "C").unwrap();
        let phi1 = purify(&a, "A").unwrap();
        let phi2 = purify(&b, "B").unwrap();
        let ch = im_extended_channel(&im, &phi1, &phi2).unwrap();
        let out = ch.apply(&phi1.tensor(&phi2).unwrap().to_density()).unwrap();
        let out_c = out.partial_trace(&["C"]).unwrap();
        assert!(out_c.op().max_abs_diff(c.op()) < 1e-8);
        let full = out.permuted(&["Af", "Bf", "C"]).unwrap();
        assert!(trace_norm(&full.op().sub(rho.op()).unwrap()) <= 1e-8);
    }

    #[test]
    fn pure_global_im_state_gives_isometric_channel() {
        let a = random_state(&RegisterSpace::single("Af", 2), 2, 4).unwrap();
        let b = random_state(&RegisterSpace::single("Bf", 2), 2, 5).unwrap();
        let im = make_im_state(&a, &b, "C", 4, 1, 6).unwrap();
        let phi1 = purify(&a, "A").unwrap();
        let phi2 = purify(&b, "B").unwrap();
        let ch = im_extended_channel(&im, &phi1, &phi2).unwrap();
        // effectively a single Kraus operator: the channel is an isometry
        assert_eq!(ch.kraus().len(), 1);
        let out = ch.apply(&phi1.tensor(&phi2).unwrap().to_density()).unwrap();
        let full = out.permuted(&["Af", "Bf", "C"]).unwrap();
        assert!(trace_norm(&full.op().sub(im.rho().op()).unwrap()) <= 1e-8);
    }

    #[test]
    fn random_im_states_reconstruct() {
        for seed in 0..6u64 {
            let a = random_state(&RegisterSpace::single("Af", 2), 2, 10 + seed).unwrap();
            let b = random_state(&RegisterSpace::single("Bf", 2), 2, 20 + seed).unwrap();
            let im = make_im_state(&a, &b, "C", 2, 2, 30 + seed).unwrap();
            let phi1 = purify(&a, "A").unwrap();
            let phi2 = purify(&b, "B").unwrap();
            let ch = im_extended_channel(&im, &phi1, &phi2).unwrap();
            assert!(ch.completeness_defect() < 1e-9);
            let out = ch.apply(&phi1.tensor(&phi2).unwrap().to_density()).unwrap();
            let full = out.permuted(&["Af", "Bf", "C"]).unwrap();
            let resid = trace_norm(&full.op().sub(im.rho().op()).unwrap());
            assert!(resid <= 1e-8, "seed {seed}: residual {resid:.3e}");
        }
    }

    #[test]
    fn purification_mismatch_rejected() {
        let a = random_state(&RegisterSpace::single("Af", 2), 2, 40).unwrap();
        let b = random_state(&RegisterSpace::single("Bf", 2), 2, 41).unwrap();
        let wrong = random_state(&RegisterSpace::single("Af", 2), 2, 42).unwrap();
        let im = make_im_state(&a, &b, "C", 2, 2, 43).unwrap();
        let phi1 = purify(&wrong, "A").unwrap();
        let phi2 = purify(&b, "B").unwrap();
        assert!(im_extended_channel(&im, &phi1, &phi2).is_err());
    }

    #[test]
    fn general_channel_reconstructs_random_tripartite_states() {
        for seed in 0..6u64 {
            let space = RegisterSpace::new(&[("Af", 2), ("Bf", 2), ("C", 2)]).unwrap();
            let rho = random_state(&space, 1 + (seed as usize % 8), 50 + seed).unwrap();
            let joint = rho.partial_trace(&["Af", "Bf"]).unwrap();
            let phi = purify(&joint, "__REF")
                .unwrap()
                .split_register("__REF", &[("A", 2), ("B", 2)])
                .unwrap();
            let ch = general_channel(&rho, &phi).unwrap();
            let out = ch.apply(&phi.to_density()).unwrap();
            let full = out.permuted(&["Af", "Bf", "C"]).unwrap();
            let resid = trace_norm(&full.op().sub(rho.op()).unwrap());
            assert!(resid <= 1e-8, "seed {seed}: residual {resid:.3e}");
        }
    }

    #[test]
    fn general_channel_on_pure_state_acts_isometrically() {
        // for a pure tripartite state the construction is an isometry on the
        // support of phi's (A,B) marginal: the reconstructed output is pure
        // (off-support Kraus slices only extend the map to a valid channel)
        let space = RegisterSpace::new(&[("Af", 2), ("Bf", 2), ("C", 2)]).unwrap();
        let rho = random_state(&space, 1, 77).unwrap();
        let joint = rho.partial_trace(&["Af", "Bf"]).unwrap();
        let phi = purify(&joint, "__REF")
            .unwrap()
            .split_register("__REF", &[("A", 2), ("B", 2)])
            .unwrap();
        let ch = general_channel(&rho, &phi).unwrap();
        let out = ch.apply(&phi.to_density()).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-8, "purity {}", out.purity());
    }

    #[test]
    fn dephasing_channel_behaviour() {
        let ch = dephasing_channel("XA", "XB", 2).unwrap();
        // |+><+| -> I/2
        let mut amp = crate::qmat::op::CVec::zeros(2);
        amp[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amp[1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = PureState::new(RegisterSpace::single("XA", 2), amp).unwrap();
        let out = ch.apply(&plus.to_density()).unwrap();
        let mm = DensityMatrix::maximally_mixed(RegisterSpace::single("XB", 2));
        assert!(out.op().max_abs_diff(mm.op()) < 1e-12);
        // diagonal input unchanged
        let diag = DensityMatrix::maximally_mixed(RegisterSpace::single("XA", 2));
        let out2 = ch.apply(&diag).unwrap();
        assert!(out2.op().max_abs_diff(mm.op()) < 1e-12);
        // maximally entangled input becomes the classically correlated state
        let r_space = RegisterSpace::new(&[("R", 2), ("XA", 2)]).unwrap();
        let mut bell_amp = crate::qmat::op::CVec::zeros(4);
        bell_amp[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        bell_amp[3] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = PureState::new(r_space, bell_amp).unwrap();
        let out3 = ch.apply(&bell.to_density()).unwrap();
        let space = out3.space().clone();
        let mut expect = CMat::zeros((4, 4));
        for x in 0..2 {
            let idx = space.pack(&[x, x]);
            expect[(idx, idx)] = C64::new(0.5, 0.0);
        }
        assert!(
            out3.op()
                .max_abs_diff(
                    &crate::qmat::op::Operator::new(space, expect).unwrap()
                )
                < 1e-12
        );
    }
}
