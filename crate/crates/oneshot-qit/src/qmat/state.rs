use crate::error::{Error, Result};
use crate::qmat::eig::eig_hermitian_mat;
use crate::qmat::op::{kron_vec, permute_vector, CMat, CVec, Operator, C64};
use crate::qmat::space::RegisterSpace;

pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// A positive semidefinite operator with trace ≤ 1 over a labeled register
/// space. `normalized` distinguishes unit-trace states from the subnormalized
/// ones produced by smoothing balls.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: Operator,
    normalized: bool,
}

impl DensityMatrix {
    pub fn new(op: Operator, normalized: bool) -> Result<Self> {
        let scale = op.max_abs().max(1.0);
        if !op.is_hermitian(PSD_TOL * scale) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:.3e})",
                op.hermiticity_defect()
            )));
        }
        let sym = op.symmetrized();
        let eig = eig_hermitian_mat(sym.mat())?;
        if let Some(&lam) = eig
            .values
            .iter()
            .find(|&&l| l < -PSD_TOL * scale.max(1.0))
        {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lam:.3e}"
            )));
        }
        let tr = sym.trace().re;
        if tr > 1.0 + TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} exceeds 1")));
        }
        if normalized && (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "normalized state has trace {tr}"
            )));
        }
        Ok(Self {
            op: sym,
            normalized,
        })
    }

    /// Wrap without re-validating; for internal constructions that are PSD by
    /// build (partial traces of valid states, channel outputs, ...).
    pub(crate) fn trusted(op: Operator, normalized: bool) -> Self {
        Self {
            op: op.symmetrized(),
            normalized,
        }
    }

    pub fn maximally_mixed(space: RegisterSpace) -> Self {
        let d = space.total_dim();
        let op = Operator::identity(space).scaled(C64::new(1.0 / d as f64, 0.0));
        Self {
            op,
            normalized: true,
        }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn mat(&self) -> &CMat {
        self.op.mat()
    }

    pub fn space(&self) -> &RegisterSpace {
        self.op.space()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.op.trace_product(&self.op).re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: self.op.tensor(&other.op)?,
            normalized: self.normalized && other.normalized,
        })
    }

    /// Reduced state on `keep`, order preserved.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: self.op.partial_trace(keep)?,
            normalized: self.normalized,
        })
    }

    pub fn permuted(&self, order: &[&str]) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: self.op.permuted(order)?,
            normalized: self.normalized,
        })
    }

    pub fn renamed(&self, from: &str, to: &str) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: self.op.renamed(from, to)?,
            normalized: self.normalized,
        })
    }

    pub fn with_labels(&self, labels: &[&str]) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            op: self.op.with_labels(labels)?,
            normalized: self.normalized,
        })
    }
}

/// A unit vector over a labeled register space.
#[derive(Debug, Clone)]
pub struct PureState {
    space: RegisterSpace,
    amp: CVec,
}

impl PureState {
    pub fn new(space: RegisterSpace, amp: CVec) -> Result<Self> {
        if amp.len() != space.total_dim() {
            return Err(Error::Dimension(format!(
                "amplitude length {} vs space dimension {}",
                amp.len(),
                space.total_dim()
            )));
        }
        let norm = amp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { space, amp })
    }

    /// Computational basis state |index⟩.
    pub fn basis(space: RegisterSpace, index: usize) -> Result<Self> {
        let d = space.total_dim();
        if index >= d {
            return Err(Error::Dimension(format!("basis index {index} out of {d}")));
        }
        let mut amp = CVec::zeros(d);
        amp[index] = C64::new(1.0, 0.0);
        Ok(Self { space, amp })
    }

    pub(crate) fn trusted(space: RegisterSpace, amp: CVec) -> Self {
        Self { space, amp }
    }

    pub fn space(&self) -> &RegisterSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amp
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self⟩⟨self| as a normalized density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = CMat::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amp[i] * self.amp[j].conj();
            }
        }
        DensityMatrix {
            op: Operator::new(self.space.clone(), m).expect("dims match"),
            normalized: true,
        }
    }

    /// Marginal on `keep` as a density matrix.
    pub fn marginal(&self, keep: &[&str]) -> Result<DensityMatrix> {
        self.to_density().partial_trace(keep)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let space = self.space.tensor(other.space())?;
        Ok(PureState {
            space,
            amp: kron_vec(&self.amp, &other.amp),
        })
    }

    pub fn permuted(&self, order: &[&str]) -> Result<PureState> {
        let amp = permute_vector(&self.space, &self.amp, order)?;
        Ok(PureState {
            space: self.space.select(order)?,
            amp,
        })
    }

    pub fn renamed(&self, from: &str, to: &str) -> Result<PureState> {
        Ok(PureState {
            space: self.space.renamed(from, to)?,
            amp: self.amp.clone(),
        })
    }

    pub fn with_labels(&self, labels: &[&str]) -> Result<PureState> {
        if labels.len() != self.space.len() {
            return Err(Error::Labeling("label count mismatch".into()));
        }
        let dims = self.space.dims();
        let regs: Vec<(&str, usize)> = labels.iter().copied().zip(dims).collect();
        Ok(PureState {
            space: RegisterSpace::new(&regs)?,
            amp: self.amp.clone(),
        })
    }

    /// Overlap fidelity |⟨self|other⟩|².
    pub fn fidelity_with(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Reinterpret one register as a consecutive group of registers whose
    /// dimensions multiply to the original one (row-major split); amplitudes
    /// are untouched.
    pub fn split_register(&self, label: &str, parts: &[(&str, usize)]) -> Result<PureState> {
        let pos = self
            .space
            .position(label)
            .ok_or_else(|| Error::Labeling(format!("unknown label {label}")))?;
        let d = self.space.dim_of(label).unwrap();
        let prod: usize = parts.iter().map(|(_, pd)| pd).product();
        if prod != d {
            return Err(Error::Dimension(format!(
                "split parts multiply to {prod}, register {label} has dimension {d}"
            )));
        }
        let mut regs: Vec<(String, usize)> = Vec::new();
        for (i, (l, pd)) in self.space.registers().iter().enumerate() {
            if i == pos {
                for (pl, ppd) in parts {
                    regs.push((pl.to_string(), *ppd));
                }
            } else {
                regs.push((l.clone(), *pd));
            }
        }
        Ok(PureState {
            space: RegisterSpace::new(&regs)?,
            amp: self.amp.clone(),
        })
    }

    /// Apply an operator defined on a subset of this state's registers.
    pub fn apply(&self, op: &Operator) -> Result<PureState> {
        let full = op.embed(self.space())?;
        let arranged = self.permuted(&full.space().labels())?;
        let amp = full.mat().dot(&arranged.amp);
        Ok(PureState {
            space: arranged.space.clone(),
            amp,
        })
    }
}
