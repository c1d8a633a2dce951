//! Hypothesis-testing relative entropy via explicit quantum Neyman-Pearson
//! threshold tests.
//!
//! The optimal tester for min Tr[Πσ] s.t. Tr[Πρ] ≥ 1−ε, 0 ⪯ Π ⪯ 𝕀 always has
//! the form Π = P_{>t} + γ P_{=t} built from the spectral decomposition of
//! ρ − tσ. The threshold t is located by bisection on the acceptance of
//! P_{>t}; γ interpolates on the boundary eigenspace so the acceptance is
//! exactly 1−ε. On the boundary eigenspace ρ and tσ agree, so any weight
//! distribution there achieves the same leakage — uniform γ is optimal.

use crate::entropics::tester::Tester;
use crate::entropics::value::EntropicValue;
use crate::error::{Error, Result};
use crate::qmat::eig::{eig_hermitian_mat, support_projector, SUPPORT_CUTOFF};
use crate::qmat::op::{CMat, Operator, C64};
use crate::qmat::state::DensityMatrix;

const BISECT_ITERS: usize = 64;

struct Split {
    /// acceptance and leakage of the strictly-positive part
    acc_pos: f64,
    leak_pos: f64,
    /// acceptance and leakage of the boundary eigenspace
    acc_bnd: f64,
    leak_bnd: f64,
    /// projector assembly data
    pos_cols: Vec<usize>,
    bnd_cols: Vec<usize>,
    vectors: CMat,
}

fn split_at(rho: &CMat, sigma: &CMat, t: f64, bnd_tol: f64) -> Result<Split> {
    let d = rho.nrows();
    let mut diff = CMat::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            diff[(i, j)] = rho[(i, j)] - sigma[(i, j)] * t;
        }
    }
    let e = eig_hermitian_mat(&diff)?;
    let mut s = Split {
        acc_pos: 0.0,
        leak_pos: 0.0,
        acc_bnd: 0.0,
        leak_bnd: 0.0,
        pos_cols: Vec::new(),
        bnd_cols: Vec::new(),
        vectors: e.vectors,
    };
    for (k, &lam) in e.values.iter().enumerate() {
        let (acc, leak) = quad_forms(&s.vectors, k, rho, sigma);
        if lam > bnd_tol {
            s.acc_pos += acc;
            s.leak_pos += leak;
            s.pos_cols.push(k);
        } else if lam >= -bnd_tol {
            s.acc_bnd += acc;
            s.leak_bnd += leak;
            s.bnd_cols.push(k);
        }
    }
    Ok(s)
}

fn quad_forms(vectors: &CMat, col: usize, rho: &CMat, sigma: &CMat) -> (f64, f64) {
    let d = vectors.nrows();
    let mut acc = C64::new(0.0, 0.0);
    let mut leak = C64::new(0.0, 0.0);
    for i in 0..d {
        let vi = vectors[(i, col)].conj();
        let mut r = C64::new(0.0, 0.0);
        let mut sg = C64::new(0.0, 0.0);
        for j in 0..d {
            r += rho[(i, j)] * vectors[(j, col)];
            sg += sigma[(i, j)] * vectors[(j, col)];
        }
        acc += vi * r;
        leak += vi * sg;
    }
    (acc.re, leak.re)
}

fn assemble_projector(
    space: &crate::qmat::space::RegisterSpace,
    vectors: &CMat,
    pos_cols: &[usize],
    bnd_cols: &[usize],
    gamma: f64,
) -> Operator {
    let d = vectors.nrows();
    let mut m = CMat::zeros((d, d));
    for (&cols, weight) in [(&pos_cols, 1.0f64), (&bnd_cols, gamma)].iter() {
        if *weight == 0.0 {
            continue;
        }
        for &k in cols.iter() {
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += vectors[(i, k)] * vectors[(j, k)].conj() * *weight;
                }
            }
        }
    }
    Operator::new(space.clone(), m).expect("projector dims match")
}

/// D_H^ε(ρ‖σ) with the optimal Neyman-Pearson tester.
pub fn d_hypo(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
) -> Result<(EntropicValue, Tester)> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Parameter(format!("eps {eps} outside [0,1)")));
    }
    if !rho.is_normalized() || !sigma.is_normalized() {
        return Err(Error::Precondition(
            "d_hypo expects normalized states".into(),
        ));
    }
    let sigma = sigma.permuted(&rho.space().labels())?;
    let space = rho.space().clone();

    // eps = 0: the support projector of rho is exactly optimal
    if eps == 0.0 {
        let proj = support_projector(rho.op(), SUPPORT_CUTOFF)?;
        let acceptance = proj.trace_product(rho.op()).re;
        let leakage = proj.trace_product(sigma.op()).re.max(0.0);
        let value = if leakage < 1e-300 {
            f64::INFINITY
        } else {
            -leakage.log2()
        };
        return Ok((
            EntropicValue::spectral(value, eps),
            Tester {
                pi: proj,
                acceptance,
                leakage,
                threshold: f64::INFINITY,
                boundary_weight: 0.0,
                eps,
            },
        ));
    }

    // infinite-value path: rho has enough mass outside supp(sigma)
    let sig_supp = support_projector(sigma.op(), SUPPORT_CUTOFF)?;
    let outside = Operator::identity(space.clone()).sub(&sig_supp)?;
    let mass_out = outside.trace_product(rho.op()).re;
    if mass_out >= 1.0 - eps {
        let acceptance = mass_out;
        return Ok((
            EntropicValue::spectral(f64::INFINITY, eps),
            Tester {
                pi: outside,
                acceptance,
                leakage: 0.0,
                threshold: f64::INFINITY,
                boundary_weight: 0.0,
                eps,
            },
        ));
    }

    let target = 1.0 - eps;
    let sig_norm = sigma.op().frobenius_norm().max(1e-300);
    let small_bnd = |window: f64| (2.0 * window * sig_norm).max(1e-11);

    // bracket the threshold: acceptance of P_{>t} is 1 at t=0, < target for
    // large t (it converges to the sigma-outside mass, which is < target)
    let mut t_lo = 0.0f64;
    let mut t_hi = 1.0f64;
    for _ in 0..128 {
        let s = split_at(rho.mat(), sigma.mat(), t_hi, 1e-14)?;
        if s.acc_pos < target {
            break;
        }
        t_lo = t_hi;
        t_hi *= 2.0;
    }
    for _ in 0..BISECT_ITERS {
        let t_mid = 0.5 * (t_lo + t_hi);
        if t_mid == t_lo || t_mid == t_hi {
            break;
        }
        let s = split_at(rho.mat(), sigma.mat(), t_mid, 1e-14)?;
        if s.acc_pos >= target {
            t_lo = t_mid;
        } else {
            t_hi = t_mid;
        }
    }
    let t = 0.5 * (t_lo + t_hi);
    let bnd_tol = small_bnd(t_hi - t_lo);
    let s = split_at(rho.mat(), sigma.mat(), t, bnd_tol)?;
    let need = target - s.acc_pos;
    let gamma = if need <= 0.0 {
        0.0
    } else if s.acc_bnd > 1e-15 {
        (need / s.acc_bnd).min(1.0)
    } else {
        1.0
    };
    let acceptance = s.acc_pos + gamma * s.acc_bnd;
    let leakage = (s.leak_pos + gamma * s.leak_bnd).max(0.0);
    let value = if leakage < 1e-300 {
        f64::INFINITY
    } else {
        -leakage.log2()
    };
    let pi = assemble_projector(&space, &s.vectors, &s.pos_cols, &s.bnd_cols, gamma);
    Ok((
        EntropicValue::spectral(value, eps),
        Tester {
            pi,
            acceptance,
            leakage,
            threshold: t,
            boundary_weight: gamma,
            eps,
        },
    ))
}

/// I_H^ε(A:B)_ρ = D_H^ε(ρ^{AB} ‖ ρ^A ⊗ ρ^B) for a cut that partitions the
/// registers of ρ.
pub fn i_hypo(
    rho: &DensityMatrix,
    cut_a: &[&str],
    cut_b: &[&str],
    eps: f64,
) -> Result<(EntropicValue, Tester)> {
    let sigma = marginal_product(rho, cut_a, cut_b)?;
    d_hypo(rho, &sigma, eps)
}

/// ρ^A ⊗ ρ^B arranged in ρ's register order; errors unless (cut_a, cut_b)
/// partitions the registers.
pub fn marginal_product(
    rho: &DensityMatrix,
    cut_a: &[&str],
    cut_b: &[&str],
) -> Result<DensityMatrix> {
    let labels = rho.space().labels();
    let total = cut_a.len() + cut_b.len();
    let mut seen: Vec<&str> = cut_a.iter().chain(cut_b.iter()).copied().collect();
    seen.sort_unstable();
    seen.dedup();
    if total != labels.len() || seen.len() != total || !rho.space().contains_all(&seen) {
        return Err(Error::Labeling(format!(
            "cut ({cut_a:?} : {cut_b:?}) does not partition registers {labels:?}"
        )));
    }
    let ra = rho.partial_trace(cut_a)?;
    let rb = rho.partial_trace(cut_b)?;
    ra.tensor(&rb)?.permuted(&labels)
}
