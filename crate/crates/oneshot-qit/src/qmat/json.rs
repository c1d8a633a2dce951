//! JSON matrix interchange: `{labels, dims, re, im}`, row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::op::{CMat, Operator, C64};
use crate::qmat::space::RegisterSpace;
use crate::qmat::state::DensityMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_operator(op: &Operator) -> Self {
        let d = op.dim();
        let mut re = vec![vec![0.0; d]; d];
        let mut im = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                re[i][j] = op.mat()[(i, j)].re;
                im[i][j] = op.mat()[(i, j)].im;
            }
        }
        Self {
            labels: op.space().labels().iter().map(|s| s.to_string()).collect(),
            dims: op.space().dims(),
            re,
            im,
        }
    }

    pub fn to_operator(&self) -> Result<Operator> {
        if self.labels.len() != self.dims.len() {
            return Err(Error::Malformed(
                "labels and dims have different lengths".into(),
            ));
        }
        let regs: Vec<(String, usize)> = self
            .labels
            .iter()
            .cloned()
            .zip(self.dims.iter().copied())
            .collect();
        let space = RegisterSpace::new(&regs)?;
        let d = space.total_dim();
        if self.re.len() != d || self.im.len() != d {
            return Err(Error::Malformed(format!(
                "matrix rows {} do not match dimension {}",
                self.re.len(),
                d
            )));
        }
        let mut m = CMat::zeros((d, d));
        for i in 0..d {
            if self.re[i].len() != d || self.im[i].len() != d {
                return Err(Error::Malformed(format!("row {i} has wrong length")));
            }
            for j in 0..d {
                m[(i, j)] = C64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Operator::new(space, m)
    }

    pub fn to_density(&self, normalized: bool) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_operator()?, normalized)
    }
}

/// Kraus-list interchange for channels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_labels: Vec<String>,
    pub in_dims: Vec<usize>,
    pub out_labels: Vec<String>,
    pub out_dims: Vec<usize>,
    pub kraus_re: Vec<Vec<Vec<f64>>>,
    pub kraus_im: Vec<Vec<Vec<f64>>>,
}

impl ChannelJson {
    pub fn from_channel(ch: &crate::qmat::channel::KrausChannel) -> Self {
        let din = ch.input_space().total_dim();
        let dout = ch.output_space().total_dim();
        let mut kraus_re = Vec::new();
        let mut kraus_im = Vec::new();
        for k in ch.kraus() {
            let mut re = vec![vec![0.0; din]; dout];
            let mut im = vec![vec![0.0; din]; dout];
            for i in 0..dout {
                for j in 0..din {
                    re[i][j] = k[(i, j)].re;
                    im[i][j] = k[(i, j)].im;
                }
            }
            kraus_re.push(re);
            kraus_im.push(im);
        }
        Self {
            in_labels: ch
                .input_space()
                .labels()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            in_dims: ch.input_space().dims(),
            out_labels: ch
                .output_space()
                .labels()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            out_dims: ch.output_space().dims(),
            kraus_re,
            kraus_im,
        }
    }

    pub fn to_channel(&self) -> Result<crate::qmat::channel::KrausChannel> {
        let in_regs: Vec<(String, usize)> = self
            .in_labels
            .iter()
            .cloned()
            .zip(self.in_dims.iter().copied())
            .collect();
        let out_regs: Vec<(String, usize)> = self
            .out_labels
            .iter()
            .cloned()
            .zip(self.out_dims.iter().copied())
            .collect();
        let input = RegisterSpace::new(&in_regs)?;
        let output = RegisterSpace::new(&out_regs)?;
        let din = input.total_dim();
        let dout = output.total_dim();
        if self.kraus_re.len() != self.kraus_im.len() {
            return Err(Error::Malformed("kraus_re/kraus_im length mismatch".into()));
        }
        let mut kraus = Vec::new();
        for (re, im) in self.kraus_re.iter().zip(self.kraus_im.iter()) {
            if re.len() != dout || im.len() != dout {
                return Err(Error::Malformed("Kraus row count mismatch".into()));
            }
            let mut k = CMat::zeros((dout, din));
            for i in 0..dout {
                if re[i].len() != din || im[i].len() != din {
                    return Err(Error::Malformed("Kraus column count mismatch".into()));
                }
                for j in 0..din {
                    k[(i, j)] = C64::new(re[i][j], im[i][j]);
                }
            }
            kraus.push(k);
        }
        crate::qmat::channel::KrausChannel::new(kraus, input, output)
    }
}
