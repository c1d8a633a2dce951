//! Primal-dual path-following interior-point solver for dense Hermitian SDPs
//! with Nesterov-Todd scaling, operating on block-diagonal cones in complex
//! arithmetic.
//!
//! The public problem (one matrix variable, scalar constraints with =/≤/≥
//! relations, optional 0 ⪯ X ⪯ 𝕀 box) is compiled to the equality standard
//! form over a product of Hermitian PSD blocks: the box adds a mirrored slack
//! block tied entrywise to the variable, each inequality adds a 1×1 slack
//! block. A Mehrotra-style predictor-corrector then iterates
//!
//!   H Δy = rhs,  H_ij = ⟨Aᵢ, W Aⱼ W⟩,
//!
//! with W the per-block NT scaling point (W Z W = X).

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::qmat::eig::eig_hermitian_mat;
use crate::qmat::op::{CMat, C64};
use crate::sdp::problem::{Relation, SdpProblem, SdpSolution, SdpStatus};

/// Default solve tolerances.
pub const GAP_TOL: f64 = 1e-8;
pub const FEAS_TOL: f64 = 1e-9;
pub const MAX_ITER: usize = 200;

struct ConeConstraint {
    terms: Vec<(usize, CMat)>,
    rhs: f64,
}

struct ConeProblem {
    blocks: Vec<usize>,
    objective: Vec<Option<CMat>>,
    constraints: Vec<ConeConstraint>,
    /// block indices and count of blocks that make up the public variable
    public_blocks: usize,
}

fn herm_basis_constraints(
    block_a: usize,
    block_b: Option<usize>,
    sign_b: f64,
    dim: usize,
    rhs_of: impl Fn(usize, usize, bool) -> f64,
) -> Vec<ConeConstraint> {
    // entrywise Hermitian equality over one or two blocks:
    //   <E, X_a> + sign_b * <E, X_b> = rhs(E)
    let mut out = Vec::new();
    for p in 0..dim {
        for q in p..dim {
            // real part
            let mut e = CMat::zeros((dim, dim));
            if p == q {
                e[(p, p)] = C64::new(1.0, 0.0);
            } else {
                e[(p, q)] = C64::new(1.0, 0.0);
                e[(q, p)] = C64::new(1.0, 0.0);
            }
            let mut terms = vec![(block_a, e.clone())];
            if let Some(b) = block_b {
                terms.push((b, e.mapv(|x| x * sign_b)));
            }
            out.push(ConeConstraint {
                terms,
                rhs: rhs_of(p, q, false),
            });
            if p != q {
                let mut ei = CMat::zeros((dim, dim));
                ei[(p, q)] = C64::new(0.0, 1.0);
                ei[(q, p)] = C64::new(0.0, -1.0);
                let mut terms = vec![(block_a, ei.clone())];
                if let Some(b) = block_b {
                    terms.push((b, ei.mapv(|x| x * sign_b)));
                }
                out.push(ConeConstraint {
                    terms,
                    rhs: rhs_of(p, q, true),
                });
            }
        }
    }
    out
}

/// ⟨A, B⟩ = Tr[A B] for Hermitian A, B (real by symmetry).
fn inner(a: &CMat, b: &CMat) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn slice_block(m: &CMat, offset: usize, dim: usize) -> CMat {
    let mut out = CMat::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = m[(offset + i, offset + j)];
        }
    }
    out
}

fn compile(p: &SdpProblem) -> Result<ConeProblem> {
    let var_blocks = p.blocks();
    let mut blocks = var_blocks.clone();
    let mut objective: Vec<Option<CMat>> = Vec::new();
    let mut offsets = Vec::new();
    {
        let mut off = 0usize;
        for &d in &var_blocks {
            offsets.push(off);
            objective.push(Some(slice_block(&p.objective, off, d)));
            off += d;
        }
    }
    let mut constraints: Vec<ConeConstraint> = Vec::new();
    // public scalar constraints, inequality slacks appended as 1x1 blocks
    for c in &p.constraints {
        let mut terms: Vec<(usize, CMat)> = Vec::new();
        for (bi, (&d, &off)) in var_blocks.iter().zip(offsets.iter()).enumerate() {
            let sub = slice_block(&c.matrix, off, d);
            if sub.iter().any(|x| x.norm() > 0.0) {
                terms.push((bi, sub));
            }
        }
        match c.relation {
            Relation::Eq => constraints.push(ConeConstraint { terms, rhs: c.rhs }),
            Relation::Le | Relation::Ge => {
                let sign = if c.relation == Relation::Le { 1.0 } else { -1.0 };
                let slack_idx = blocks.len();
                blocks.push(1);
                objective.push(None);
                let mut s = CMat::zeros((1, 1));
                s[(0, 0)] = C64::new(sign, 0.0);
                let mut terms = terms;
                terms.push((slack_idx, s));
                constraints.push(ConeConstraint { terms, rhs: c.rhs });
            }
        }
    }
    // operator box: mirrored slack blocks S_b with X_b + S_b = I
    if p.box_bounded {
        for (bi, &d) in var_blocks.iter().enumerate() {
            let slack_idx = blocks.len();
            blocks.push(d);
            objective.push(None);
            let eqs = herm_basis_constraints(bi, Some(slack_idx), 1.0, d, |p_, q_, imag| {
                if p_ == q_ && !imag {
                    1.0
                } else {
                    0.0
                }
            });
            constraints.extend(eqs);
        }
    }
    Ok(ConeProblem {
        blocks,
        objective,
        constraints,
        public_blocks: var_blocks.len(),
    })
}

struct Eigen {
    vals: Vec<f64>,
    vecs: CMat,
}

fn eig(m: &CMat) -> Result<Eigen> {
    let e = eig_hermitian_mat(m)?;
    Ok(Eigen {
        vals: e.values,
        vecs: e.vectors,
    })
}

fn spectral_fn(e: &Eigen, f: impl Fn(f64) -> f64) -> CMat {
    let d = e.vals.len();
    let mut scaled = e.vecs.clone();
    for (k, &l) in e.vals.iter().enumerate() {
        let fl = f(l);
        for i in 0..d {
            scaled[(i, k)] *= fl;
        }
    }
    scaled.dot(&crate::qmat::op::dagger(&e.vecs))
}

fn hermitize(m: &mut CMat) {
    let d = m.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
}

/// Largest α ∈ (0, 1] with M + α ΔM ⪰ (1−τ-ish) kept inside the cone; uses
/// the spectral bound α = −τ/λ_min(M^{-1/2} ΔM M^{-1/2}).
fn max_step(m: &CMat, dm: &CMat, tau: f64) -> Result<f64> {
    let e = eig(m)?;
    let floor = e.vals.iter().fold(f64::INFINITY, |a, &b| a.min(b)).max(1e-300);
    let isq = spectral_fn(&e, |l| 1.0 / l.max(floor * 1e-2).sqrt());
    let mid = isq.dot(dm).dot(&isq);
    let em = eig(&mid)?;
    let lmin = em.vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if lmin >= -1e-14 {
        Ok(1.0)
    } else {
        Ok((-tau / lmin).min(1.0))
    }
}

/// Dense symmetric positive definite solve via Cholesky with a tiny adaptive
/// ridge; returns the solution of H x = rhs.
fn chol_solve(h: &Array2<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = h.nrows();
    let mut a = h.clone();
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(1e-300, f64::max);
    let mut ridge = 0.0f64;
    'retry: for attempt in 0..6 {
        if attempt > 0 {
            ridge = scale * 1e-14 * f64_powi(attempt);
        }
        let mut l = a.clone();
        for i in 0..n {
            l[(i, i)] += ridge;
        }
        // in-place Cholesky
        for k in 0..n {
            let mut d = l[(k, k)];
            for j in 0..k {
                d -= l[(k, j)] * l[(k, j)];
            }
            if d <= 0.0 {
                a = h.clone();
                continue 'retry;
            }
            let dk = d.sqrt();
            l[(k, k)] = dk;
            for i in (k + 1)..n {
                let mut v = l[(i, k)];
                for j in 0..k {
                    v -= l[(i, j)] * l[(k, j)];
                }
                l[(i, k)] = v / dk;
            }
        }
        // forward/back substitution
        let mut x = rhs.to_vec();
        for i in 0..n {
            for j in 0..i {
                let lij = l[(i, j)];
                x[i] -= lij * x[j];
            }
            x[i] /= l[(i, i)];
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= l[(j, i)] * x[j];
            }
            x[i] /= l[(i, i)];
        }
        return Ok(x);
    }
    Err(Error::Convergence("Schur system not positive definite".into()))
}

fn f64_powi(e: usize) -> f64 {
    10f64.powi(e as i32)
}

/// Solve an [`SdpProblem`].
pub fn solve(p: &SdpProblem, gap_tol: f64, feas_tol: f64, max_iter: usize) -> Result<SdpSolution> {
    p.validate()?;
    if p.infeasible_by_construction {
        return Ok(SdpSolution {
            x: CMat::zeros((p.dim, p.dim)),
            primal: f64::INFINITY,
            dual: f64::INFINITY,
            gap: f64::INFINITY,
            status: SdpStatus::Infeasible,
            iterations: 0,
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
        });
    }
    let cone = compile(p)?;
    let nb = cone.blocks.len();
    let m = cone.constraints.len();
    let nu: f64 = cone.blocks.iter().sum::<usize>() as f64;

    // per-block constraint adjacency
    let mut touch: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for (ci, c) in cone.constraints.iter().enumerate() {
        for (bi, _) in &c.terms {
            touch[*bi].push(ci);
        }
    }

    let b_vec: Vec<f64> = cone.constraints.iter().map(|c| c.rhs).collect();
    let b_scale = b_vec.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    let c_scale = cone
        .objective
        .iter()
        .flatten()
        .flat_map(|m| m.iter())
        .map(|x| x.norm())
        .fold(1.0f64, f64::max);

    let mut x: Vec<CMat> = cone.blocks.iter().map(|&d| CMat::eye(d)).collect();
    let mut z: Vec<CMat> = cone
        .blocks
        .iter()
        .map(|&d| CMat::eye(d).mapv(|v| v * c_scale.max(1.0)))
        .collect();
    let mut y = vec![0.0f64; m];

    let apply_a = |mats: &[CMat]| -> Vec<f64> {
        cone.constraints
            .iter()
            .map(|c| c.terms.iter().map(|(bi, a)| inner(a, &mats[*bi])).sum())
            .collect()
    };
    let apply_at = |v: &[f64]| -> Vec<CMat> {
        let mut out: Vec<CMat> = cone.blocks.iter().map(|&d| CMat::zeros((d, d))).collect();
        for (ci, c) in cone.constraints.iter().enumerate() {
            let w = v[ci];
            if w == 0.0 {
                continue;
            }
            for (bi, a) in &c.terms {
                out[*bi] = &out[*bi] + &a.mapv(|t| t * w);
            }
        }
        out
    };

    let mut best: Option<SdpSolution> = None;
    let mut iterations = 0usize;

    for it in 0..max_iter {
        iterations = it;
        // residuals
        let ax = apply_a(&x);
        let rp: Vec<f64> = b_vec.iter().zip(ax.iter()).map(|(b, a)| b - a).collect();
        let aty = apply_at(&y);
        let mut rd: Vec<CMat> = Vec::with_capacity(nb);
        for bi in 0..nb {
            let c_b = cone.objective[bi]
                .clone()
                .unwrap_or_else(|| CMat::zeros((cone.blocks[bi], cone.blocks[bi])));
            rd.push(&(&c_b - &z[bi]) - &aty[bi]);
        }
        let primal: f64 = (0..nb)
            .map(|bi| {
                cone.objective[bi]
                    .as_ref()
                    .map(|c| inner(c, &x[bi]))
                    .unwrap_or(0.0)
            })
            .sum();
        let dual: f64 = b_vec.iter().zip(y.iter()).map(|(b, yy)| b * yy).sum();
        let gap = (primal - dual).abs();
        let rp_norm = rp.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let rd_norm = rd
            .iter()
            .flat_map(|m| m.iter())
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);

        let solution = |status: SdpStatus, iterations: usize| SdpSolution {
            x: assemble_public(&cone, &x, p.dim),
            primal,
            dual,
            gap,
            status,
            iterations,
            primal_residual: rp_norm,
            dual_residual: rd_norm,
        };

        if rp_norm <= feas_tol * (1.0 + b_scale)
            && rd_norm <= feas_tol * (1.0 + c_scale)
            && gap <= gap_tol * (1.0 + primal.abs().max(dual.abs()))
        {
            return Ok(solution(SdpStatus::Optimal, it));
        }
        if dual.abs() > 1.0 / feas_tol {
            return Ok(solution(SdpStatus::Infeasible, it));
        }
        best = Some(solution(SdpStatus::MaxIter, it));

        // NT scaling per block: W = X^{1/2} (X^{1/2} Z X^{1/2})^{-1/2} X^{1/2}
        let mut w: Vec<CMat> = Vec::with_capacity(nb);
        let mut zinv: Vec<CMat> = Vec::with_capacity(nb);
        for bi in 0..nb {
            let ex = eig(&x[bi])?;
            let xs = spectral_fn(&ex, |l| l.max(1e-300).sqrt());
            let mid = xs.dot(&z[bi]).dot(&xs);
            let em = eig(&mid)?;
            let mid_isq = spectral_fn(&em, |l| 1.0 / l.max(1e-300).sqrt());
            let wb = xs.dot(&mid_isq).dot(&xs);
            let ez = eig(&z[bi])?;
            zinv.push(spectral_fn(&ez, |l| 1.0 / l.max(1e-300)));
            w.push(wb);
        }

        // Schur matrix H_ij = sum_b <A_i^b, W^b A_j^b W^b>
        let mut h = Array2::<f64>::zeros((m, m));
        for bi in 0..nb {
            if touch[bi].is_empty() {
                continue;
            }
            for &cj in &touch[bi] {
                let a_j = cone.constraints[cj]
                    .terms
                    .iter()
                    .find(|(b, _)| *b == bi)
                    .map(|(_, a)| a)
                    .unwrap();
                let t = w[bi].dot(a_j).dot(&w[bi]);
                for &ci in &touch[bi] {
                    if ci > cj {
                        continue;
                    }
                    let a_i = cone.constraints[ci]
                        .terms
                        .iter()
                        .find(|(b, _)| *b == bi)
                        .map(|(_, a)| a)
                        .unwrap();
                    h[(ci, cj)] += inner(a_i, &t);
                }
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                h[(j, i)] = h[(i, j)];
            }
        }

        let mu: f64 = (0..nb).map(|bi| inner(&x[bi], &z[bi])).sum::<f64>() / nu;

        // direction for a given centering target (0 = affine)
        let direction = |sigma_mu: f64| -> Result<(Vec<CMat>, Vec<f64>, Vec<CMat>)> {
            // R_c = sigma*mu*Z^{-1} - X ;  dX = R_c - W (R_d - At dy) W
            let mut rc: Vec<CMat> = Vec::with_capacity(nb);
            for bi in 0..nb {
                rc.push(&zinv[bi].mapv(|v| v * sigma_mu) - &x[bi]);
            }
            // rhs = r_p - A(R_c) + A(W R_d W)
            let mut wrdw: Vec<CMat> = Vec::with_capacity(nb);
            for bi in 0..nb {
                wrdw.push(w[bi].dot(&rd[bi]).dot(&w[bi]));
            }
            let a_rc = apply_a(&rc);
            let a_wrdw = apply_a(&wrdw);
            let rhs: Vec<f64> = (0..m)
                .map(|i| rp[i] - a_rc[i] + a_wrdw[i])
                .collect();
            let dy = chol_solve(&h, &rhs)?;
            let at_dy = apply_at(&dy);
            let mut dz: Vec<CMat> = Vec::with_capacity(nb);
            let mut dx: Vec<CMat> = Vec::with_capacity(nb);
            for bi in 0..nb {
                let dzb = &rd[bi] - &at_dy[bi];
                let mut dxb = &rc[bi] - &w[bi].dot(&dzb).dot(&w[bi]);
                hermitize(&mut dxb);
                let mut dzb = dzb;
                hermitize(&mut dzb);
                dz.push(dzb);
                dx.push(dxb);
            }
            Ok((dx, dy, dz))
        };

        // predictor
        let (dx_a, _dy_a, dz_a) = direction(0.0)?;
        let mut ap = 1.0f64;
        let mut ad = 1.0f64;
        for bi in 0..nb {
            ap = ap.min(max_step(&x[bi], &dx_a[bi], 1.0)?);
            ad = ad.min(max_step(&z[bi], &dz_a[bi], 1.0)?);
        }
        let mu_aff: f64 = (0..nb)
            .map(|bi| {
                let xa = &x[bi] + &dx_a[bi].mapv(|v| v * ap);
                let za = &z[bi] + &dz_a[bi].mapv(|v| v * ad);
                inner(&xa, &za)
            })
            .sum::<f64>()
            / nu;
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-9, 0.999);

        // corrector
        let (dx, dy, dz) = direction(sigma * mu)?;
        let tau = 0.99f64.min(0.9 + 0.09 * (it as f64 / 10.0));
        let mut ap = 1.0f64;
        let mut ad = 1.0f64;
        for bi in 0..nb {
            ap = ap.min(max_step(&x[bi], &dx[bi], tau)?);
            ad = ad.min(max_step(&z[bi], &dz[bi], tau)?);
        }
        for bi in 0..nb {
            x[bi] = &x[bi] + &dx[bi].mapv(|v| v * ap);
            z[bi] = &z[bi] + &dz[bi].mapv(|v| v * ad);
            hermitize(&mut x[bi]);
            hermitize(&mut z[bi]);
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }

    let mut sol = best.ok_or_else(|| Error::Convergence("no iterations performed".into()))?;
    sol.status = SdpStatus::MaxIter;
    sol.iterations = iterations;
    Ok(sol)
}

fn assemble_public(cone: &ConeProblem, x: &[CMat], dim: usize) -> CMat {
    let mut out = CMat::zeros((dim, dim));
    let mut off = 0usize;
    for bi in 0..cone.public_blocks {
        let d = cone.blocks[bi];
        for i in 0..d {
            for j in 0..d {
                out[(off + i, off + j)] = x[bi][(i, j)];
            }
        }
        off += d;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::problem::SdpConstraint;

    fn diag(entries: &[f64]) -> CMat {
        let d = entries.len();
        let mut m = CMat::zeros((d, d));
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        m
    }

    #[test]
    fn smallest_eigenvalue_program() {
        // min Tr[diag(1,2) X] s.t. Tr X = 1, X >= 0  ->  value 1, X = diag(1,0)
        let p = SdpProblem::new(
            2,
            diag(&[1.0, 2.0]),
            vec![SdpConstraint {
                matrix: diag(&[1.0, 1.0]),
                rhs: 1.0,
                relation: Relation::Eq,
            }],
        )
        .unwrap();
        let s = solve(&p, GAP_TOL, FEAS_TOL, MAX_ITER).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal - 1.0).abs() < 1e-7, "primal {}", s.primal);
        assert!((s.x[(0, 0)].re - 1.0).abs() < 1e-6);
        assert!(s.x[(1, 1)].re.abs() < 1e-6);
        assert!(s.dual <= s.primal + 1e-9);
    }

    #[test]
    fn box_constraint_and_ge_relation() {
        // min Tr[sigma Pi] s.t. Tr[rho Pi] >= 1-eps, 0 <= Pi <= I
        // commuting diagonal case rho = diag(.5,.5), sigma = diag(.9,.1),
        // eps=0.5: optimal leakage 0.1 (take the second atom fully)
        let p = SdpProblem::new(
            2,
            diag(&[0.9, 0.1]),
            vec![SdpConstraint {
                matrix: diag(&[0.5, 0.5]),
                rhs: 0.5,
                relation: Relation::Ge,
            }],
        )
        .unwrap()
        .with_box();
        let s = solve(&p, GAP_TOL, FEAS_TOL, MAX_ITER).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal - 0.1).abs() < 1e-7, "primal {}", s.primal);
    }

    #[test]
    fn block_diagonal_variable() {
        // two blocks: min Tr X1 + 2 Tr X2 with Tr X1 + Tr X2 = 1 -> 1
        let mut c = CMat::zeros((4, 4));
        for i in 0..2 {
            c[(i, i)] = C64::new(1.0, 0.0);
            c[(2 + i, 2 + i)] = C64::new(2.0, 0.0);
        }
        let p = SdpProblem::new(
            4,
            c,
            vec![SdpConstraint {
                matrix: CMat::eye(4),
                rhs: 1.0,
                relation: Relation::Eq,
            }],
        )
        .unwrap()
        .with_blocks(vec![2, 2])
        .unwrap();
        let s = solve(&p, GAP_TOL, FEAS_TOL, MAX_ITER).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal - 1.0).abs() < 1e-7);
        // mass only in the first block
        assert!(s.x[(2, 2)].re + s.x[(3, 3)].re < 1e-6);
    }

    #[test]
    fn complex_objective_entries() {
        // min <C, X>, Tr X = 1, with C having complex off-diagonals;
        // optimum = smallest eigenvalue of C
        let mut c = CMat::zeros((2, 2));
        c[(0, 0)] = C64::new(1.0, 0.0);
        c[(1, 1)] = C64::new(1.0, 0.0);
        c[(0, 1)] = C64::new(0.0, -0.8);
        c[(1, 0)] = C64::new(0.0, 0.8);
        let eigs = crate::qmat::eig::eig_hermitian_mat(&c).unwrap();
        let lmin = eigs.values.last().copied().unwrap();
        let p = SdpProblem::new(
            2,
            c,
            vec![SdpConstraint {
                matrix: CMat::eye(2),
                rhs: 1.0,
                relation: Relation::Eq,
            }],
        )
        .unwrap();
        let s = solve(&p, GAP_TOL, FEAS_TOL, MAX_ITER).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal - lmin).abs() < 1e-7);
    }
}
