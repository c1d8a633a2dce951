//! Seeded random ensembles: Ginibre-induced density matrices, Haar
//! isometries, random POVMs and channels.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qmat::channel::KrausChannel;
use crate::qmat::op::{dagger, CMat, CVec, Operator, C64};
use crate::qmat::space::RegisterSpace;
use crate::qmat::state::{DensityMatrix, PureState};

fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    let mut g = CMat::zeros((rows, cols));
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = C64::new(re, im);
        }
    }
    g
}

/// Ginibre-induced random density matrix of the given rank; deterministic per
/// seed.
pub fn random_state(space: &RegisterSpace, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = space.total_dim();
    if rank == 0 || rank > d {
        return Err(Error::Parameter(format!(
            "rank {rank} outside 1..={d} for dimension {d}"
        )));
    }
    let mut rng = crate::seed::rng(seed, 0x5741);
    let g = ginibre(d, rank, &mut rng);
    let m = g.dot(&dagger(&g));
    let tr: f64 = (0..d).map(|i| m[(i, i)].re).sum();
    let op = Operator::new(space.clone(), m.mapv(|x| x / tr))?;
    Ok(DensityMatrix::trusted(op, true))
}

/// Haar-random pure state.
pub fn random_pure(space: &RegisterSpace, seed: u64) -> PureState {
    let d = space.total_dim();
    let mut rng = crate::seed::rng(seed, 0x5055);
    let mut amp = CVec::zeros(d);
    for x in amp.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *x = C64::new(re, im);
    }
    let norm = amp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in amp.iter_mut() {
        *x /= norm;
    }
    PureState::trusted(space.clone(), amp)
}

/// Haar-random isometry (dout ≥ din) via QR of a Ginibre matrix with the
/// phase convention fixed for determinism.
pub fn haar_isometry(din: usize, dout: usize, rng: &mut impl Rng) -> Result<CMat> {
    if dout < din {
        return Err(Error::Dimension(format!(
            "isometry needs dout {dout} >= din {din}"
        )));
    }
    let g = ginibre(dout, din, rng);
    // modified Gram-Schmidt columns
    let mut q = CMat::zeros((dout, din));
    for j in 0..din {
        let mut v: Vec<C64> = (0..dout).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for k in 0..j {
                let mut ov = C64::new(0.0, 0.0);
                for i in 0..dout {
                    ov += q[(i, k)].conj() * v[i];
                }
                for i in 0..dout {
                    let qk = q[(i, k)];
                    v[i] -= ov * qk;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        // fix phase: largest entry real positive
        let mut best = 0usize;
        let mut mag = -1.0;
        for (i, x) in v.iter().enumerate() {
            if x.norm() > mag {
                mag = x.norm();
                best = i;
            }
        }
        let ph = v[best].conj() / v[best].norm().max(1e-300);
        for i in 0..dout {
            q[(i, j)] = v[i] * ph / norm;
        }
    }
    Ok(q)
}

/// Random POVM with `outcomes` effects: Λ_k = S^{-1/2} G_k S^{-1/2} from
/// random PSD G_k.
pub fn random_povm(d: usize, outcomes: usize, seed: u64) -> Result<Vec<CMat>> {
    if outcomes == 0 {
        return Err(Error::Parameter("POVM needs at least one outcome".into()));
    }
    let mut rng = crate::seed::rng(seed, 0x504f);
    let gs: Vec<CMat> = (0..outcomes)
        .map(|_| {
            let g = ginibre(d, d, &mut rng);
            g.dot(&dagger(&g))
        })
        .collect();
    let mut s = CMat::zeros((d, d));
    for g in &gs {
        s = &s + g;
    }
    let s_op = Operator::new(RegisterSpace::single("_S", d), s)?;
    let isq = crate::qmat::eig::mat_func(
        &s_op,
        crate::qmat::eig::MatFunc::InvSqrtPseudo,
        crate::qmat::eig::SUPPORT_CUTOFF,
    )?;
    Ok(gs
        .into_iter()
        .map(|g| isq.mat().dot(&g).dot(isq.mat()))
        .collect())
}

/// Random channel via a Haar-random Stinespring isometry input → output ⊗ env.
pub fn random_channel(
    input: &RegisterSpace,
    output: &RegisterSpace,
    env_dim: usize,
    seed: u64,
) -> Result<KrausChannel> {
    let din = input.total_dim();
    let dout = output.total_dim();
    let mut rng = crate::seed::rng(seed, 0x4348);
    let v = haar_isometry(din, dout * env_dim, &mut rng)?;
    let mut kraus = Vec::with_capacity(env_dim);
    for e in 0..env_dim {
        let mut k = CMat::zeros((dout, din));
        for o in 0..dout {
            for i in 0..din {
                k[(o, i)] = v[(o * env_dim + e, i)];
            }
        }
        kraus.push(k);
    }
    KrausChannel::new(kraus, input.clone(), output.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_pure() {
        let space = RegisterSpace::single("A", 4);
        let rho = random_state(&space, 1, 3).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_rank_has_positive_spectrum() {
        let space = RegisterSpace::single("A", 4);
        let rho = random_state(&space, 4, 3).unwrap();
        let e = crate::qmat::eig::eig_hermitian_mat(rho.mat()).unwrap();
        assert!(e.values.iter().all(|&l| l > 1e-6), "{:?}", e.values);
    }

    #[test]
    fn same_seed_reproduces() {
        let space = RegisterSpace::single("A", 3);
        let a = random_state(&space, 2, 11).unwrap();
        let b = random_state(&space, 2, 11).unwrap();
        assert!(a.op().max_abs_diff(b.op()) == 0.0);
        let c = random_state(&space, 2, 12).unwrap();
        assert!(a.op().max_abs_diff(c.op()) > 1e-3);
    }

    #[test]
    fn rank_out_of_range_rejected() {
        let space = RegisterSpace::single("A", 3);
        assert!(random_state(&space, 0, 1).is_err());
        assert!(random_state(&space, 4, 1).is_err());
    }

    #[test]
    fn haar_isometry_is_isometric() {
        let mut rng = crate::seed::rng(7, 1);
        let v = haar_isometry(3, 6, &mut rng).unwrap();
        let g = dagger(&v).dot(&v);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn random_povm_sums_to_identity_on_support() {
        let povm = random_povm(3, 4, 5).unwrap();
        let mut s = CMat::zeros((3, 3));
        for e in &povm {
            s = &s + e;
        }
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn random_channel_is_cptp() {
        let input = RegisterSpace::single("A", 2);
        let output = RegisterSpace::single("B", 3);
        let ch = random_channel(&input, &output, 2, 9).unwrap();
        assert!(ch.completeness_defect() < 1e-9);
        let rho = random_state(&input, 2, 10).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-9);
    }
}
