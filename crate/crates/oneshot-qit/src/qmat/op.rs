use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::space::RegisterSpace;

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// A dense complex matrix over a labeled register space.
#[derive(Debug, Clone)]
pub struct Operator {
    space: RegisterSpace,
    mat: CMat,
}

impl Operator {
    pub fn new(space: RegisterSpace, mat: CMat) -> Result<Self> {
        let d = space.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, space dimension is {}",
                mat.nrows(),
                mat.ncols(),
                d
            )));
        }
        Ok(Self { space, mat })
    }

    pub fn zeros(space: RegisterSpace) -> Self {
        let d = space.total_dim();
        Self {
            space,
            mat: CMat::zeros((d, d)),
        }
    }

    pub fn identity(space: RegisterSpace) -> Self {
        let d = space.total_dim();
        Self {
            space,
            mat: CMat::eye(d),
        }
    }

    pub fn space(&self) -> &RegisterSpace {
        &self.space
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn mat_mut(&mut self) -> &mut CMat {
        &mut self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            mat: dagger(&self.mat),
        }
    }

    pub fn scaled(&self, c: C64) -> Operator {
        Operator {
            space: self.space.clone(),
            mat: self.mat.mapv(|x| x * c),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            mat: &self.mat - &other.mat,
        })
    }

    /// Matrix product; both operands must live on the same space.
    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            mat: self.mat.dot(&other.mat),
        })
    }

    fn check_same_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::Labeling(format!(
                "register spaces differ: {:?} vs {:?}",
                self.space.labels(),
                other.space.labels()
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermiticity defect in max-entry norm.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let diff = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Replace by (H + H†)/2.
    pub fn symmetrized(&self) -> Operator {
        let d = self.dim();
        let mut m = self.mat.clone();
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5;
            }
        }
        Operator {
            space: self.space.clone(),
            mat: m,
        }
    }

    /// Kronecker product on the concatenated register list.
    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let space = self.space.tensor(other.space())?;
        Ok(Operator {
            space,
            mat: kron(&self.mat, &other.mat),
        })
    }

    /// Reorder registers. `order` must be a permutation of the labels.
    pub fn permuted(&self, order: &[&str]) -> Result<Operator> {
        let perm = permutation_map(&self.space, order)?;
        let new_space = self.space.select(order)?;
        let d = self.dim();
        let mut m = CMat::zeros((d, d));
        for (r_new, &r_old) in perm.iter().enumerate() {
            for (c_new, &c_old) in perm.iter().enumerate() {
                m[(r_new, c_new)] = self.mat[(r_old, c_old)];
            }
        }
        Ok(Operator {
            space: new_space,
            mat: m,
        })
    }

    /// Embed into `full` (which must contain all of `self`'s labels), acting
    /// as the identity on the remaining registers. Output register order is
    /// `full`'s order.
    pub fn embed(&self, full: &RegisterSpace) -> Result<Operator> {
        if !full.contains_all(&self.space.labels()) {
            return Err(Error::Labeling(format!(
                "embedding target lacks labels: have {:?}, need {:?}",
                full.labels(),
                self.space.labels()
            )));
        }
        for l in self.space.labels() {
            if full.dim_of(l) != self.space.dim_of(l) {
                return Err(Error::Dimension(format!(
                    "register {l} dimension differs between operator and target"
                )));
            }
        }
        // order: [self labels..., complement...] then permute back to full.
        let own: Vec<&str> = self.space.labels();
        let rest: Vec<&str> = full.complement(&own);
        let rest_space = full.select(&rest)?;
        let big = self.tensor(&Operator::identity(rest_space))?;
        big.permuted(&full.labels())
    }

    /// Partial trace keeping `keep` (order preserved as in `self`).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Operator> {
        if !self.space.contains_all(keep) {
            return Err(Error::Labeling(format!(
                "unknown label in partial trace: have {:?}, keep {:?}",
                self.space.labels(),
                keep
            )));
        }
        let all = self.space.labels();
        let keep_in_order: Vec<&str> = all.iter().copied().filter(|l| keep.contains(l)).collect();
        let traced: Vec<&str> = self.space.complement(&keep_in_order);
        // reorder so kept registers come first
        let mut order = keep_in_order.clone();
        order.extend(traced.iter().copied());
        let arranged = if order == all { self.clone() } else { self.permuted(&order)? };
        let keep_space = self.space.select(&keep_in_order)?;
        let dk = keep_space.total_dim();
        let dt = arranged.dim() / dk;
        let mut m = CMat::zeros((dk, dk));
        for rk in 0..dk {
            for ck in 0..dk {
                let mut acc = ZERO;
                for t in 0..dt {
                    acc += arranged.mat[(rk * dt + t, ck * dt + t)];
                }
                m[(rk, ck)] = acc;
            }
        }
        Ok(Operator {
            space: keep_space,
            mat: m,
        })
    }

    /// Rename a register in place.
    pub fn renamed(&self, from: &str, to: &str) -> Result<Operator> {
        Ok(Operator {
            space: self.space.renamed(from, to)?,
            mat: self.mat.clone(),
        })
    }

    /// Re-label all registers positionally, keeping dimensions.
    pub fn with_labels(&self, labels: &[&str]) -> Result<Operator> {
        if labels.len() != self.space.len() {
            return Err(Error::Labeling("label count mismatch".into()));
        }
        let dims = self.space.dims();
        let regs: Vec<(&str, usize)> = labels.iter().copied().zip(dims).collect();
        Ok(Operator {
            space: RegisterSpace::new(&regs)?,
            mat: self.mat.clone(),
        })
    }

    /// Re(Tr[self† other]); real Hilbert-Schmidt inner product.
    pub fn inner_re(&self, other: &Operator) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Tr[self · other] for same-space operators.
    pub fn trace_product(&self, other: &Operator) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        acc
    }
}

pub fn dagger(m: &CMat) -> CMat {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = CMat::zeros((c, r));
    for i in 0..r {
        for j in 0..c {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
    out
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

/// For target order `order`, gives `map` with `map[new_index] = old_index`.
pub(crate) fn permutation_map(space: &RegisterSpace, order: &[&str]) -> Result<Vec<usize>> {
    if order.len() != space.len() {
        return Err(Error::Labeling(format!(
            "permutation must list all registers: got {:?}, have {:?}",
            order,
            space.labels()
        )));
    }
    let mut positions = Vec::with_capacity(order.len());
    for l in order {
        positions.push(
            space
                .position(l)
                .ok_or_else(|| Error::Labeling(format!("unknown label {l}")))?,
        );
    }
    {
        let mut seen = vec![false; positions.len()];
        for &p in &positions {
            if seen[p] {
                return Err(Error::Labeling("repeated label in permutation".into()));
            }
            seen[p] = true;
        }
    }
    let new_space = space.select(order)?;
    let d = space.total_dim();
    let mut map = vec![0usize; d];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let multi_new = new_space.unpack(new_idx);
        let mut multi_old = vec![0usize; space.len()];
        for (k, &p) in positions.iter().enumerate() {
            multi_old[p] = multi_new[k];
        }
        *slot = space.pack(&multi_old);
    }
    Ok(map)
}

/// Permute the amplitudes of a vector over `space` into register order `order`.
pub(crate) fn permute_vector(space: &RegisterSpace, amp: &CVec, order: &[&str]) -> Result<CVec> {
    let map = permutation_map(space, order)?;
    let mut out = CVec::zeros(amp.len());
    for (new_idx, &old_idx) in map.iter().enumerate() {
        out[new_idx] = amp[old_idx];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: C64 = C64::new(1.0, 0.0);

    fn mat2(entries: [[f64; 2]; 2]) -> CMat {
        let mut m = CMat::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = C64::new(entries[i][j], 0.0);
            }
        }
        m
    }

    #[test]
    fn tensor_identity_case() {
        let a = Operator::identity(RegisterSpace::single("A", 2));
        let b = Operator::identity(RegisterSpace::single("B", 2));
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(t.max_abs_diff(&Operator::identity(t.space().clone())) < 1e-15);
    }

    #[test]
    fn tensor_diagonal_product() {
        let p = 0.3;
        let a = Operator::new(RegisterSpace::single("A", 2), mat2([[1.0, 0.0], [0.0, 0.0]])).unwrap();
        let b = Operator::new(RegisterSpace::single("B", 2), mat2([[p, 0.0], [0.0, 1.0 - p]])).unwrap();
        let t = a.tensor(&b).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| t.mat()[(i, i)].re).collect();
        assert_eq!(diag, vec![p, 1.0 - p, 0.0, 0.0]);
    }

    #[test]
    fn tensor_matches_index_loop_oracle() {
        use rand::Rng;
        let mut rng = crate::seed::rng(11, 0);
        let mut rnd = |d: usize| {
            let mut m = CMat::zeros((d, d));
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                }
            }
            m
        };
        let am = rnd(2);
        let bm = rnd(2);
        let a = Operator::new(RegisterSpace::single("A", 2), am.clone()).unwrap();
        let b = Operator::new(RegisterSpace::single("B", 2), bm.clone()).unwrap();
        let t = a.tensor(&b).unwrap();
        for i1 in 0..2 {
            for i2 in 0..2 {
                for j1 in 0..2 {
                    for j2 in 0..2 {
                        let expect = am[(i1, j1)] * bm[(i2, j2)];
                        let got = t.mat()[(i1 * 2 + i2, j1 * 2 + j2)];
                        assert!((expect - got).norm() < 1e-15);
                    }
                }
            }
        }
        // duplicate label rejected
        assert!(a.tensor(&a).is_err());
    }

    #[test]
    fn partial_trace_matches_summation_oracle() {
        use rand::Rng;
        let mut rng = crate::seed::rng(13, 0);
        let space = RegisterSpace::new(&[("A", 2), ("B", 3)]).unwrap();
        let d = space.total_dim();
        let mut m = CMat::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let op = Operator::new(space, m.clone()).unwrap();
        let red = op.partial_trace(&["A"]).unwrap();
        for ra in 0..2 {
            for ca in 0..2 {
                let mut acc = ZERO;
                for b in 0..3 {
                    acc += m[(ra * 3 + b, ca * 3 + b)];
                }
                assert!((red.mat()[(ra, ca)] - acc).norm() < 1e-14);
            }
        }
        let red_b = op.partial_trace(&["B"]).unwrap();
        for rb in 0..3 {
            for cb in 0..3 {
                let mut acc = ZERO;
                for a in 0..2 {
                    acc += m[(a * 3 + rb, a * 3 + cb)];
                }
                assert!((red_b.mat()[(rb, cb)] - acc).norm() < 1e-14);
            }
        }
        assert!(op.partial_trace(&["Z"]).is_err());
    }

    #[test]
    fn permutation_roundtrip_and_composition() {
        use rand::Rng;
        let mut rng = crate::seed::rng(17, 0);
        let space = RegisterSpace::new(&[("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let d = space.total_dim();
        let mut m = CMat::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let op = Operator::new(space, m).unwrap();
        let p = op.permuted(&["C", "A", "B"]).unwrap();
        let back = p.permuted(&["A", "B", "C"]).unwrap();
        assert!(op.max_abs_diff(&back) < 1e-15);
        // permuting a tensor product permutes the factors
        let x = op.partial_trace(&["A"]).unwrap();
        let y = op.partial_trace(&["B"]).unwrap();
        let xy = x.tensor(&y).unwrap();
        let yx = y.tensor(&x).unwrap();
        let perm = xy.permuted(&["B", "A"]).unwrap();
        assert!(perm.max_abs_diff(&yx) < 1e-13);
    }

    #[test]
    fn embed_acts_as_identity_elsewhere() {
        let full = RegisterSpace::new(&[("X", 2), ("Y", 2), ("Z", 2)]).unwrap();
        let pauli_x = Operator::new(
            RegisterSpace::single("Y", 2),
            mat2([[0.0, 1.0], [1.0, 0.0]]),
        )
        .unwrap();
        let e = pauli_x.embed(&full).unwrap();
        assert_eq!(e.space().labels(), vec!["X", "Y", "Z"]);
        // check action on basis |x y z>: flips y
        for idx in 0..8 {
            let multi = full.unpack(idx);
            let flipped = full.pack(&[multi[0], 1 - multi[1], multi[2]]);
            assert!((e.mat()[(flipped, idx)] - ONE).norm() < 1e-15);
        }
    }
}
