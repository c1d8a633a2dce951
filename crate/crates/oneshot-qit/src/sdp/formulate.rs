//! SDP formulations of the hypothesis-testing optimum and the smoothed
//! max-relative-entropy feasibility problem.

use crate::error::{Error, Result};
use crate::qmat::eig::{eig_hermitian_mat, SUPPORT_CUTOFF};
use crate::qmat::op::{dagger, CMat, C64};
use crate::qmat::state::DensityMatrix;
use crate::sdp::problem::{Relation, SdpConstraint, SdpProblem};

/// The optimization of the hypothesis-testing relative entropy:
///
///   minimize Tr[Π σ]  s.t.  Tr[Π ρ] ≥ 1−ε,  0 ⪯ Π ⪯ 𝕀.
///
/// The optimum equals 2^{−D_H^ε(ρ‖σ)}.
pub fn formulate_dh(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<SdpProblem> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Parameter(format!("eps {eps} outside [0,1)")));
    }
    let sigma = sigma.permuted(&rho.space().labels())?;
    let d = rho.dim();
    SdpProblem::new(
        d,
        sigma.mat().clone(),
        vec![SdpConstraint {
            matrix: rho.mat().clone(),
            rhs: 1.0 - eps,
            relation: Relation::Ge,
        }],
    )
    .map(SdpProblem::with_box)
}

/// Outcome of a feasibility probe in the smoothing bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// A state in the ε-ball satisfies τ ⪯ 2^λ σ (certified by a primal point).
    Feasible,
    /// No such state exists (certified by the dual bound).
    Infeasible,
    /// The solver bracket straddles ε; neither side is certified.
    Ambiguous,
}

/// Compression of a pair (ρ, σ) onto the support of σ.
pub struct SupportCompression {
    /// isometry columns spanning supp(σ): dim × rank
    pub basis: CMat,
    pub rho: CMat,
    pub sigma: CMat,
    pub rank: usize,
    /// mass of ρ outside supp(σ)
    pub leak: f64,
}

pub fn compress_to_support(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<SupportCompression> {
    let sigma = sigma.permuted(&rho.space().labels())?;
    let d = rho.dim();
    let e = eig_hermitian_mat(sigma.mat())?;
    let rank = e.values.iter().filter(|&&l| l > SUPPORT_CUTOFF).count();
    let mut basis = CMat::zeros((d, rank));
    for k in 0..rank {
        for i in 0..d {
            basis[(i, k)] = e.vectors[(i, k)];
        }
    }
    let bd = dagger(&basis);
    let rho_c = bd.dot(rho.mat()).dot(&basis);
    let sigma_c = bd.dot(sigma.mat()).dot(&basis);
    let kept: f64 = (0..rank).map(|i| rho_c[(i, i)].re).sum();
    Ok(SupportCompression {
        basis,
        rho: rho_c,
        sigma: sigma_c,
        rank,
        leak: (rho.trace() - kept).max(0.0),
    })
}

/// Feasibility problem for the trace-norm smoothing ball at level λ:
///
///   minimize ‖τ − ρ‖₁  s.t.  0 ⪯ τ ⪯ 2^λ σ,  Tr τ ≤ 1,
///
/// with the trace norm lifted as τ − ρ = P − N, objective Tr P + Tr N. λ is
/// ε-feasible for D_max^ε iff the optimum is ≤ ε. Both states are first
/// compressed onto supp(σ); a support violation beyond 1e-9 marks the problem
/// infeasible by construction.
pub fn formulate_dmax_feasibility(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    lambda: f64,
    eps: f64,
) -> Result<SdpProblem> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Parameter(format!("eps {eps} outside [0,1)")));
    }
    let comp = compress_to_support(rho, sigma)?;
    if comp.leak > 1e-9 {
        let mut p = SdpProblem::new(1, CMat::zeros((1, 1)), vec![])?;
        p.infeasible_by_construction = true;
        return Ok(p);
    }
    let d = comp.rank;
    let scale = 2f64.powf(lambda);
    // blocks: tau, P, N, U (slack for 2^lambda sigma - tau), u (trace slack)
    let n = 4 * d + 1;
    let blocks = vec![d, d, d, d, 1];
    let mut objective = CMat::zeros((n, n));
    for i in 0..d {
        objective[(d + i, d + i)] = C64::new(1.0, 0.0);
        objective[(2 * d + i, 2 * d + i)] = C64::new(1.0, 0.0);
    }
    let mut constraints = Vec::new();
    // tau - P + N = rho ; tau + U = 2^lambda sigma (entrywise Hermitian basis)
    for p in 0..d {
        for q in p..d {
            for imag in [false, true] {
                if imag && p == q {
                    continue;
                }
                let mut e_small = CMat::zeros((d, d));
                if imag {
                    e_small[(p, q)] = C64::new(0.0, 1.0);
                    e_small[(q, p)] = C64::new(0.0, -1.0);
                } else if p == q {
                    e_small[(p, p)] = C64::new(1.0, 0.0);
                } else {
                    e_small[(p, q)] = C64::new(1.0, 0.0);
                    e_small[(q, p)] = C64::new(1.0, 0.0);
                }
                let ip = |m: &CMat| -> f64 {
                    let mut acc = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            acc += (e_small[(i, j)] * m[(j, i)]).re;
                        }
                    }
                    acc
                };
                // tau - P + N = rho
                let mut a1 = CMat::zeros((n, n));
                for i in 0..d {
                    for j in 0..d {
                        a1[(i, j)] = e_small[(i, j)];
                        a1[(d + i, d + j)] = -e_small[(i, j)];
                        a1[(2 * d + i, 2 * d + j)] = e_small[(i, j)];
                    }
                }
                constraints.push(SdpConstraint {
                    matrix: a1,
                    rhs: ip(&comp.rho),
                    relation: Relation::Eq,
                });
                // tau + U = 2^lambda sigma
                let mut a2 = CMat::zeros((n, n));
                for i in 0..d {
                    for j in 0..d {
                        a2[(i, j)] = e_small[(i, j)];
                        a2[(3 * d + i, 3 * d + j)] = e_small[(i, j)];
                    }
                }
                constraints.push(SdpConstraint {
                    matrix: a2,
                    rhs: scale * ip(&comp.sigma),
                    relation: Relation::Eq,
                });
            }
        }
    }
    // Tr tau + u = 1
    let mut a3 = CMat::zeros((n, n));
    for i in 0..d {
        a3[(i, i)] = C64::new(1.0, 0.0);
    }
    a3[(4 * d, 4 * d)] = C64::new(1.0, 0.0);
    constraints.push(SdpConstraint {
        matrix: a3,
        rhs: 1.0,
        relation: Relation::Eq,
    });
    SdpProblem::new(n, objective, constraints)?.with_blocks(blocks)
}

/// Watrous fidelity lift for the purified-distance smoothing ball:
///
///   maximize Re Tr[Y]  s.t.  [[ρ, Y], [Y†, τ]] ⪰ 0,  0 ⪯ τ ⪯ 2^λ σ,  Tr τ ≤ 1,
///
/// whose optimum is max_τ F(ρ, τ). Encoded as a minimization of −Re Tr[Y];
/// λ is ε-feasible for the purified-distance ball iff −optimum ≥ √(1−ε²).
pub fn formulate_fidelity_feasibility(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    lambda: f64,
) -> Result<SdpProblem> {
    let comp = compress_to_support(rho, sigma)?;
    if comp.leak > 1e-9 {
        let mut p = SdpProblem::new(1, CMat::zeros((1, 1)), vec![])?;
        p.infeasible_by_construction = true;
        return Ok(p);
    }
    let d = comp.rank;
    let scale = 2f64.powf(lambda);
    // blocks: G (2d, containing [[rho, Y],[Y†, tau]]), U (d), u (1)
    let n = 2 * d + d + 1;
    let blocks = vec![2 * d, d, 1];
    let mut objective = CMat::zeros((n, n));
    for i in 0..d {
        objective[(i, d + i)] = C64::new(-0.5, 0.0);
        objective[(d + i, i)] = C64::new(-0.5, 0.0);
    }
    let mut constraints = Vec::new();
    for p in 0..d {
        for q in p..d {
            for imag in [false, true] {
                if imag && p == q {
                    continue;
                }
                let mut e_small = CMat::zeros((d, d));
                if imag {
                    e_small[(p, q)] = C64::new(0.0, 1.0);
                    e_small[(q, p)] = C64::new(0.0, -1.0);
                } else if p == q {
                    e_small[(p, p)] = C64::new(1.0, 0.0);
                } else {
                    e_small[(p, q)] = C64::new(1.0, 0.0);
                    e_small[(q, p)] = C64::new(1.0, 0.0);
                }
                let ip = |m: &CMat| -> f64 {
                    let mut acc = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            acc += (e_small[(i, j)] * m[(j, i)]).re;
                        }
                    }
                    acc
                };
                // top-left block of G pinned to rho
                let mut a1 = CMat::zeros((n, n));
                for i in 0..d {
                    for j in 0..d {
                        a1[(i, j)] = e_small[(i, j)];
                    }
                }
                constraints.push(SdpConstraint {
                    matrix: a1,
                    rhs: ip(&comp.rho),
                    relation: Relation::Eq,
                });
                // bottom-right block (tau) + U = 2^lambda sigma
                let mut a2 = CMat::zeros((n, n));
                for i in 0..d {
                    for j in 0..d {
                        a2[(d + i, d + j)] = e_small[(i, j)];
                        a2[(2 * d + i, 2 * d + j)] = e_small[(i, j)];
                    }
                }
                constraints.push(SdpConstraint {
                    matrix: a2,
                    rhs: scale * ip(&comp.sigma),
                    relation: Relation::Eq,
                });
            }
        }
    }
    let mut a3 = CMat::zeros((n, n));
    for i in 0..d {
        a3[(d + i, d + i)] = C64::new(1.0, 0.0);
    }
    a3[(3 * d, 3 * d)] = C64::new(1.0, 0.0);
    constraints.push(SdpConstraint {
        matrix: a3,
        rhs: 1.0,
        relation: Relation::Eq,
    });
    SdpProblem::new(n, objective, constraints)?.with_blocks(blocks)
}
