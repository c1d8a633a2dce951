//! Completely positive trace-preserving maps in Kraus form.

use crate::error::{Error, Result};
use crate::qmat::op::{dagger, CMat, Operator, C64, ZERO};
use crate::qmat::purify::IsometryOp;
use crate::qmat::space::RegisterSpace;
use crate::qmat::state::{DensityMatrix, PureState};

/// A CPTP map given by Kraus operators with declared input and output
/// register spaces.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<CMat>, // each out_dim x in_dim
    input: RegisterSpace,
    output: RegisterSpace,
}

pub const KRAUS_TOL: f64 = 1e-9;

impl KrausChannel {
    pub fn new(kraus: Vec<CMat>, input: RegisterSpace, output: RegisterSpace) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        let din = input.total_dim();
        let dout = output.total_dim();
        for k in &kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    dout,
                    din
                )));
            }
        }
        let ch = Self {
            kraus,
            input,
            output,
        };
        let defect = ch.completeness_defect();
        if defect > KRAUS_TOL {
            return Err(Error::InvalidChannel(format!(
                "Kraus completeness defect {defect:.3e}"
            )));
        }
        Ok(ch)
    }

    /// Identity channel on a space.
    pub fn identity(space: RegisterSpace) -> Self {
        let d = space.total_dim();
        Self {
            kraus: vec![CMat::eye(d)],
            input: space.clone(),
            output: space,
        }
    }

    /// Channel from an isometry V: input → output followed by tracing out the
    /// `env` registers of the codomain: Kraus K_e = (𝕀 ⊗ ⟨e|) V over a
    /// computational basis of env. Near-zero slices are pruned.
    pub fn from_isometry(v: &IsometryOp, env: &[&str]) -> Result<Self> {
        let cod = v.codomain();
        if !cod.contains_all(env) {
            return Err(Error::Labeling("env labels missing from codomain".into()));
        }
        let keep: Vec<&str> = cod.complement(env);
        let mut order: Vec<&str> = keep.clone();
        order.extend(env.iter().copied());
        // permute codomain rows to [keep..., env...]
        let perm = crate::qmat::op::permutation_map(cod, &order)?;
        let out_space = cod.select(&keep)?;
        let d_keep = out_space.total_dim();
        let d_env = cod.total_dim() / d_keep;
        let din = v.domain().total_dim();
        let mut kraus = Vec::new();
        for e in 0..d_env {
            let mut k = CMat::zeros((d_keep, din));
            let mut nrm = 0.0f64;
            for r in 0..d_keep {
                let row_new = r * d_env + e;
                let row_old = perm[row_new];
                for c in 0..din {
                    let val = v.mat()[(row_old, c)];
                    k[(r, c)] = val;
                    nrm += val.norm_sqr();
                }
            }
            if nrm.sqrt() > 1e-12 {
                kraus.push(k);
            }
        }
        Self::new(kraus, v.domain().clone(), out_space)
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn input_space(&self) -> &RegisterSpace {
        &self.input
    }

    pub fn output_space(&self) -> &RegisterSpace {
        &self.output
    }

    pub fn in_labels(&self) -> Vec<&str> {
        self.input.labels()
    }

    /// max-entry defect of Σ K†K = 𝕀.
    pub fn completeness_defect(&self) -> f64 {
        let din = self.input.total_dim();
        let mut acc = CMat::zeros((din, din));
        for k in &self.kraus {
            acc = acc + dagger(k).dot(k);
        }
        let mut worst = 0.0f64;
        for i in 0..din {
            for j in 0..din {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc[(i, j)] - C64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// Apply to a density matrix whose space contains the input registers;
    /// acts as the identity on the rest. Output register order:
    /// [untouched registers in original order..., output registers...].
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let in_labels = self.input.labels();
        if !rho.space().contains_all(&in_labels) {
            return Err(Error::Labeling(format!(
                "channel input registers {:?} not all present in state {:?}",
                in_labels,
                rho.space().labels()
            )));
        }
        for l in &in_labels {
            if rho.space().dim_of(l) != self.input.dim_of(l) {
                return Err(Error::Dimension(format!(
                    "register {l} dimension differs between channel and state"
                )));
            }
        }
        let rest: Vec<&str> = rho.space().complement(&in_labels);
        let mut order: Vec<&str> = rest.clone();
        order.extend(in_labels.iter().copied());
        let arranged = rho.permuted(&order)?;
        let d_rest: usize = rest
            .iter()
            .map(|l| rho.space().dim_of(l).unwrap())
            .product::<usize>()
            .max(1);
        let din = self.input.total_dim();
        let dout = self.output.total_dim();
        let d_out_total = d_rest * dout;
        let mut out = CMat::zeros((d_out_total, d_out_total));
        // (I ⊗ K) rho (I ⊗ K)† with the rest block leading
        for k in &self.kraus {
            // tmp[(r_rest, r_out), (c_rest, c_in)] = sum_{r_in} K[r_out, r_in] * rho[...]
            let mut tmp = CMat::zeros((d_out_total, d_rest * din));
            for rr in 0..d_rest {
                for ro in 0..dout {
                    for cc in 0..d_rest * din {
                        let mut acc = ZERO;
                        for ri in 0..din {
                            let kv = k[(ro, ri)];
                            if kv != ZERO {
                                acc += kv * arranged.mat()[(rr * din + ri, cc)];
                            }
                        }
                        tmp[(rr * dout + ro, cc)] = acc;
                    }
                }
            }
            for r in 0..d_out_total {
                for cr in 0..d_rest {
                    for co in 0..dout {
                        let mut acc = ZERO;
                        for ci in 0..din {
                            let kv = k[(co, ci)].conj();
                            if kv != ZERO {
                                acc += tmp[(r, cr * din + ci)] * kv;
                            }
                        }
                        out[(r, cr * dout + co)] += acc;
                    }
                }
            }
        }
        let rest_space = rho.space().select(&rest)?;
        let out_space = rest_space.tensor(&self.output)?;
        let op = Operator::new(out_space, out)?;
        Ok(DensityMatrix::trusted(op, rho.is_normalized()))
    }

    /// Apply to a pure state, returning the output density matrix.
    pub fn apply_pure(&self, psi: &PureState) -> Result<DensityMatrix> {
        self.apply(&psi.to_density())
    }

    /// Sample a Kraus branch for a pure input over exactly the input space:
    /// returns (branch index, normalized output amplitudes, probability).
    pub fn sample_branch(
        &self,
        psi: &PureState,
        rng: &mut impl rand::Rng,
    ) -> Result<(usize, PureState)> {
        let p = psi.permuted(&self.input.labels())?;
        let mut outs = Vec::with_capacity(self.kraus.len());
        let mut probs = Vec::with_capacity(self.kraus.len());
        for k in &self.kraus {
            let amp = k.dot(p.amplitudes());
            let pr = amp.iter().map(|x| x.norm_sqr()).sum::<f64>();
            outs.push(amp);
            probs.push(pr);
        }
        let total: f64 = probs.iter().sum();
        let mut u: f64 = rng.gen::<f64>() * total;
        let mut pick = probs.len() - 1;
        for (i, &pr) in probs.iter().enumerate() {
            if u < pr {
                pick = i;
                break;
            }
            u -= pr;
        }
        let norm = probs[pick].sqrt();
        let amp = outs.swap_remove(pick).mapv(|x| x / norm);
        Ok((pick, PureState::trusted(self.output.clone(), amp)))
    }

    /// Relabel input registers positionally.
    pub fn with_input_labels(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.input.len() {
            return Err(Error::Labeling("label count mismatch".into()));
        }
        let regs: Vec<(&str, usize)> = labels.iter().copied().zip(self.input.dims()).collect();
        Ok(Self {
            kraus: self.kraus.clone(),
            input: RegisterSpace::new(&regs)?,
            output: self.output.clone(),
        })
    }

    /// Relabel output registers positionally.
    pub fn with_output_labels(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.output.len() {
            return Err(Error::Labeling("label count mismatch".into()));
        }
        let regs: Vec<(&str, usize)> = labels.iter().copied().zip(self.output.dims()).collect();
        Ok(Self {
            kraus: self.kraus.clone(),
            input: self.input.clone(),
            output: RegisterSpace::new(&regs)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::op::CVec;

    fn bell(a: &str, b: &str) -> PureState {
        let space = RegisterSpace::new(&[(a, 2), (b, 2)]).unwrap();
        let mut amp = CVec::zeros(4);
        amp[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amp[3] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState::new(space, amp).unwrap()
    }

    fn plus_state() -> PureState {
        let space = RegisterSpace::single("A", 2);
        let mut amp = CVec::zeros(2);
        amp[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amp[1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState::new(space, amp).unwrap()
    }

    pub fn dephasing(label_in: &str, label_out: &str, d: usize) -> KrausChannel {
        let mut kraus = Vec::new();
        for x in 0..d {
            let mut k = CMat::zeros((d, d));
            k[(x, x)] = C64::new(1.0, 0.0);
            kraus.push(k);
        }
        KrausChannel::new(
            kraus,
            RegisterSpace::single(label_in, d),
            RegisterSpace::single(label_out, d),
        )
        .unwrap()
    }

    pub fn depolarizing(label: &str, p: f64) -> KrausChannel {
        let s = |m: [[(f64, f64); 2]; 2]| {
            let mut k = CMat::zeros((2, 2));
            for i in 0..2 {
                for j in 0..2 {
                    k[(i, j)] = C64::new(m[i][j].0, m[i][j].1);
                }
            }
            k
        };
        let c0 = (1.0 - 3.0 * p / 4.0).sqrt();
        let cp = (p / 4.0).sqrt();
        let kraus = vec![
            s([[(c0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (c0, 0.0)]]),
            s([[(0.0, 0.0), (cp, 0.0)], [(cp, 0.0), (0.0, 0.0)]]),
            s([[(0.0, 0.0), (0.0, -cp)], [(0.0, cp), (0.0, 0.0)]]),
            s([[(cp, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-cp, 0.0)]]),
        ];
        KrausChannel::new(
            kraus,
            RegisterSpace::single(label, 2),
            RegisterSpace::single(label, 2),
        )
        .unwrap()
    }

    #[test]
    fn identity_channel_preserves_state() {
        let psi = bell("A", "B");
        let rho = psi.to_density();
        let ch = KrausChannel::identity(RegisterSpace::single("A", 2));
        let out = ch.apply(&rho).unwrap();
        // output order: [B, A]
        let back = out.permuted(&["A", "B"]).unwrap();
        assert!(back.op().max_abs_diff(rho.op()) < 1e-12);
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_dephasing_kills_coherences() {
        let rho = plus_state().to_density();
        let ch = dephasing("A", "A", 2);
        let out = ch.apply(&rho).unwrap();
        let mm = DensityMatrix::maximally_mixed(RegisterSpace::single("A", 2));
        assert!(out.op().max_abs_diff(mm.op()) < 1e-12);
    }

    #[test]
    fn depolarizing_matches_closed_form() {
        use rand::Rng;
        let mut rng = crate::seed::rng(77, 0);
        let mut g = CMat::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                g[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let m = g.dot(&dagger(&g));
        let tr: f64 = (0..2).map(|i| m[(i, i)].re).sum();
        let rho = DensityMatrix::new(
            Operator::new(RegisterSpace::single("A", 2), m.mapv(|x| x / tr)).unwrap(),
            true,
        )
        .unwrap();
        let p = 0.37;
        let ch = depolarizing("A", p);
        let out = ch.apply(&rho).unwrap();
        // closed form: p * I/2 + (1-p) rho
        let mm = DensityMatrix::maximally_mixed(RegisterSpace::single("A", 2));
        let expect = mm
            .op()
            .scaled(C64::new(p, 0.0))
            .add(&rho.op().scaled(C64::new(1.0 - p, 0.0)))
            .unwrap();
        assert!(out.op().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let mut k = CMat::zeros((2, 2));
        k[(0, 0)] = C64::new(1.0, 0.0);
        let res = KrausChannel::new(
            vec![k],
            RegisterSpace::single("A", 2),
            RegisterSpace::single("A", 2),
        );
        assert!(res.is_err());
    }

    #[test]
    fn apply_preserves_trace_and_psd_on_multiregister_states() {
        let psi = bell("A", "B").tensor(&bell("C", "D")).unwrap();
        let rho = psi.to_density();
        let ch = depolarizing("B", 0.5);
        let out = ch.apply(&rho).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-9);
        assert_eq!(out.space().labels(), vec!["A", "C", "D", "B"]);
        let eig = crate::qmat::eig::eig_hermitian_mat(out.mat()).unwrap();
        assert!(eig.values.iter().all(|&l| l >= -1e-9));
    }
}
