use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of labeled registers spanning a tensor-product space.
///
/// Labels are unique within one space and the total dimension is the product
/// of the component dimensions. All operators and states in this crate carry
/// one of these, and every multi-system operation (tensor, partial trace,
/// permutation, embedding) is driven by labels rather than positions, so two
/// objects can never be silently combined with misaligned registers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSpace {
    regs: Vec<(String, usize)>,
}

impl RegisterSpace {
    pub fn new<S: AsRef<str>>(regs: &[(S, usize)]) -> Result<Self> {
        let regs: Vec<(String, usize)> = regs
            .iter()
            .map(|(l, d)| (l.as_ref().to_string(), *d))
            .collect();
        for (l, d) in &regs {
            if *d == 0 {
                return Err(Error::Dimension(format!("register {l} has dimension 0")));
            }
        }
        for i in 0..regs.len() {
            for j in (i + 1)..regs.len() {
                if regs[i].0 == regs[j].0 {
                    return Err(Error::Labeling(format!("duplicate label {}", regs[i].0)));
                }
            }
        }
        Ok(Self { regs })
    }

    /// Single register space.
    pub fn single(label: &str, dim: usize) -> Self {
        Self::new(&[(label, dim)]).expect("single register is always valid")
    }

    pub fn total_dim(&self) -> usize {
        self.regs.iter().map(|(_, d)| d).product()
    }

    pub fn len(&self) -> usize {
        self.regs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regs.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.regs.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.regs.iter().map(|(_, d)| *d).collect()
    }

    pub fn registers(&self) -> &[(String, usize)] {
        &self.regs
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.regs.iter().position(|(l, _)| l == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.regs
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, d)| *d)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn contains_all(&self, labels: &[&str]) -> bool {
        labels.iter().all(|l| self.contains(l))
    }

    /// Concatenation `self ⊗ other`; label sets must be disjoint.
    pub fn tensor(&self, other: &RegisterSpace) -> Result<RegisterSpace> {
        let mut regs = self.regs.clone();
        for (l, d) in &other.regs {
            if self.contains(l) {
                return Err(Error::Labeling(format!("duplicate label {l} in tensor")));
            }
            regs.push((l.clone(), *d));
        }
        Ok(RegisterSpace { regs })
    }

    /// Subspace of the given labels, in the order given.
    pub fn select(&self, labels: &[&str]) -> Result<RegisterSpace> {
        let mut regs = Vec::with_capacity(labels.len());
        for l in labels {
            let d = self
                .dim_of(l)
                .ok_or_else(|| Error::Labeling(format!("unknown label {l}")))?;
            regs.push((l.to_string(), d));
        }
        RegisterSpace::new(&regs)
    }

    /// Labels of `self` not listed in `labels`, in original order.
    pub fn complement(&self, labels: &[&str]) -> Vec<&str> {
        self.regs
            .iter()
            .map(|(l, _)| l.as_str())
            .filter(|l| !labels.contains(l))
            .collect()
    }

    /// Rename a register, keeping its position and dimension.
    pub fn renamed(&self, from: &str, to: &str) -> Result<RegisterSpace> {
        let mut regs = self.regs.clone();
        let pos = self
            .position(from)
            .ok_or_else(|| Error::Labeling(format!("unknown label {from}")))?;
        if from != to && self.contains(to) {
            return Err(Error::Labeling(format!("label {to} already present")));
        }
        regs[pos].0 = to.to_string();
        RegisterSpace::new(&regs)
    }

    /// Unpack a flat basis index into per-register indices (row-major, first
    /// register slowest).
    pub fn unpack(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.regs.len()];
        for (k, (_, d)) in self.regs.iter().enumerate().rev() {
            out[k] = index % d;
            index /= d;
        }
        out
    }

    /// Pack per-register indices into a flat basis index.
    pub fn pack(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.regs.len());
        let mut idx = 0usize;
        for (k, (_, d)) in self.regs.iter().enumerate() {
            debug_assert!(multi[k] < *d);
            idx = idx * d + multi[k];
        }
        idx
    }
}
