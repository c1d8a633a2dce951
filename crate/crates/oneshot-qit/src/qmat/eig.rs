//! Hermitian eigendecomposition by cyclic Jacobi rotations, plus the spectral
//! matrix functions built on it.
//!
//! Cyclic Jacobi is chosen over a tridiagonalization pipeline because the
//! matrices here stay small (dim ≲ a few hundred), it is simple to make
//! bitwise deterministic, and its accumulated eigenvector unitarity error is
//! tiny — which the testers and purifications downstream depend on.

use ndarray::s;

use crate::error::{Error, Result};
use crate::qmat::op::{dagger, CMat, Operator, C64, ZERO};

/// Eigendecomposition of a Hermitian operator: `h = V diag(values) V†`,
/// eigenvalues sorted descending, `vectors` columns are the eigenvectors.
#[derive(Debug, Clone)]
pub struct EigH {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigH {
    /// Reconstruct `V diag(values) V†`.
    pub fn reconstruct(&self) -> CMat {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            for i in 0..d {
                scaled[(i, k)] *= lam;
            }
        }
        scaled.dot(&dagger(&self.vectors))
    }

    /// Apply a scalar function to the spectrum and reassemble.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMat {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let fl = f(lam);
            for i in 0..d {
                scaled[(i, k)] *= fl;
            }
        }
        scaled.dot(&dagger(&self.vectors))
    }
}

const HERM_TOL: f64 = 1e-10;
const JACOBI_OFF_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix (symmetrizes inputs whose
/// asymmetry is within 1e-10, errors otherwise).
pub fn eig_hermitian_mat(h: &CMat) -> Result<EigH> {
    let d = h.nrows();
    if h.ncols() != d {
        return Err(Error::Dimension("eig needs a square matrix".into()));
    }
    let scale = h.iter().map(|x| x.norm()).fold(0.0f64, f64::max).max(1.0);
    let mut defect = 0.0f64;
    for i in 0..d {
        for j in i..d {
            defect = defect.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    if defect > HERM_TOL * scale {
        return Err(Error::Precondition(format!(
            "matrix is not Hermitian: asymmetry {defect:.3e}"
        )));
    }
    // absorb round-off
    let mut a = CMat::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = CMat::eye(d);
    let fro = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let tol = JACOBI_OFF_TOL * fro;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= tol / (d as f64) {
                    continue;
                }
                // 2x2 Hermitian block [[app, apq], [apq*, aqq]] with real
                // diagonal; zero the off-diagonal with a complex rotation
                // U = [[c, s*phase], [-s*conj(phase), c]] ... derived from the
                // real Jacobi rotation after factoring out the phase of apq.
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / r;
                let zeta = (aqq - app) / (2.0 * r);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s; // complex "sine"
                // columns update: col_p' = c*col_p - conj(sp)*col_q is wrong
                // unless rows follow suit; do A <- U† A U with
                // U[:,p] = c e_p - conj(sp) e_q ; U[:,q] = sp e_p + c e_q
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * sp.conj();
                    a[(k, q)] = akp * sp + akq * c;
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * sp;
                    a[(q, k)] = apk * sp.conj() + aqk * c;
                }
                // clean the zeroed pair and enforce real diagonal
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * sp.conj();
                    v[(k, q)] = vkp * sp + vkq * c;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..d).map(|i| (a[(i, i)].re, i)).collect();
    // descending eigenvalues; ties broken by eigenvector lexicographic order
    pairs.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap()
            .then_with(|| lex_cmp_columns(&v, x.1, y.1))
    });
    let mut values = Vec::with_capacity(d);
    let mut vectors = CMat::zeros((d, d));
    for (k, (lam, idx)) in pairs.into_iter().enumerate() {
        values.push(lam);
        let col = v.slice(s![.., idx]);
        // fix global phase: largest-magnitude entry made real positive
        let mut best = 0usize;
        let mut best_mag = -1.0f64;
        for (i, x) in col.iter().enumerate() {
            let m = x.norm();
            if m > best_mag + 1e-15 {
                best_mag = m;
                best = i;
            }
        }
        let ph = if best_mag > 1e-300 {
            col[best].conj() / best_mag
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            vectors[(i, k)] = col[i] * ph;
        }
    }
    Ok(EigH { values, vectors })
}

fn lex_cmp_columns(v: &CMat, a: usize, b: usize) -> std::cmp::Ordering {
    for i in 0..v.nrows() {
        let (x, y) = (v[(i, a)], v[(i, b)]);
        match x.re.partial_cmp(&y.re).unwrap() {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
        match x.im.partial_cmp(&y.im).unwrap() {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Labeled-operator wrapper around [`eig_hermitian_mat`]; the eigenvector
/// matrix is returned as an operator on the same space.
pub fn eig_hermitian(h: &Operator) -> Result<(Vec<f64>, Operator)> {
    let e = eig_hermitian_mat(h.mat())?;
    Ok((
        e.values,
        Operator::new(h.space().clone(), e.vectors).expect("same dims"),
    ))
}

/// Spectral functions used by the testers and decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatFunc {
    /// Principal square root; errors on eigenvalues below −1e-10.
    Sqrt,
    /// Pseudo-inverse square root on the support: eigenvalues below the
    /// cutoff map to zero.
    InvSqrtPseudo,
}

pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Apply `f` to the spectrum of the Hermitian operator `h`.
pub fn mat_func(h: &Operator, f: MatFunc, support_cutoff: f64) -> Result<Operator> {
    let e = eig_hermitian_mat(h.mat())?;
    if f == MatFunc::Sqrt {
        if let Some(lam) = e.values.iter().find(|&&l| l < -1e-10) {
            return Err(Error::Domain(format!(
                "sqrt of operator with negative eigenvalue {lam:.3e}"
            )));
        }
    }
    let m = e.map_spectrum(|lam| match f {
        MatFunc::Sqrt => lam.max(0.0).sqrt(),
        MatFunc::InvSqrtPseudo => {
            if lam > support_cutoff {
                1.0 / lam.sqrt()
            } else {
                0.0
            }
        }
    });
    Operator::new(h.space().clone(), m)
}

/// Projector onto the eigenspaces of `h` with eigenvalue > cutoff.
pub fn support_projector(h: &Operator, cutoff: f64) -> Result<Operator> {
    let e = eig_hermitian_mat(h.mat())?;
    let m = e.map_spectrum(|lam| if lam > cutoff { 1.0 } else { 0.0 });
    Operator::new(h.space().clone(), m)
}

/// Sum of singular values. Hermitian inputs take the |eigenvalue| route, the
/// general case goes through the spectrum of A†A.
pub fn trace_norm(a: &Operator) -> f64 {
    let scale = a.max_abs().max(1.0);
    if a.is_hermitian(HERM_TOL * scale) {
        let e = eig_hermitian_mat(a.mat()).expect("hermiticity checked");
        e.values.iter().map(|l| l.abs()).sum()
    } else {
        let ata = dagger(a.mat()).dot(a.mat());
        let e = eig_hermitian_mat(&ata).expect("A†A is Hermitian");
        e.values.iter().map(|l| l.max(0.0).sqrt()).sum()
    }
}
