//! Problem containers for the dense Hermitian SDP solver.

use crate::error::{Error, Result};
use crate::qmat::op::CMat;

/// Relation of a scalar linear constraint ⟨A, X⟩ {=, ≤, ≥} b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// One scalar constraint on the matrix variable.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub matrix: CMat,
    pub rhs: f64,
    pub relation: Relation,
}

/// A dense Hermitian semidefinite program
///
///   minimize ⟨C, X⟩  subject to  ⟨Aᵢ, X⟩ {=,≤,≥} bᵢ,  X ⪰ 0,
///
/// optionally with the operator box 0 ⪯ X ⪯ 𝕀. The inner product is
/// Tr[A X] (real for Hermitian arguments). `var_blocks`, when present,
/// declares that the variable is block-diagonal with the given block sizes —
/// the solver then never materializes cross-block entries.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: CMat,
    pub constraints: Vec<SdpConstraint>,
    pub box_bounded: bool,
    pub var_blocks: Option<Vec<usize>>,
    /// Set by formulations that detect structural infeasibility up front
    /// (e.g. a support violation); the solver reports it without iterating.
    pub infeasible_by_construction: bool,
}

const HERM_TOL: f64 = 1e-10;

impl SdpProblem {
    pub fn new(dim: usize, objective: CMat, constraints: Vec<SdpConstraint>) -> Result<Self> {
        let p = Self {
            dim,
            objective,
            constraints,
            box_bounded: false,
            var_blocks: None,
            infeasible_by_construction: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_box(mut self) -> Self {
        self.box_bounded = true;
        self
    }

    pub fn with_blocks(mut self, blocks: Vec<usize>) -> Result<Self> {
        if blocks.iter().sum::<usize>() != self.dim {
            return Err(Error::Dimension(
                "variable blocks do not sum to the declared dimension".into(),
            ));
        }
        self.var_blocks = Some(blocks);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_hermitian(&self.objective, self.dim, "objective")?;
        for (i, c) in self.constraints.iter().enumerate() {
            check_hermitian(&c.matrix, self.dim, &format!("constraint {i}"))?;
        }
        Ok(())
    }

    pub fn blocks(&self) -> Vec<usize> {
        self.var_blocks.clone().unwrap_or_else(|| vec![self.dim])
    }
}

fn check_hermitian(m: &CMat, dim: usize, what: &str) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::Dimension(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
    for i in 0..dim {
        for j in i..dim {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > HERM_TOL * scale {
                return Err(Error::Precondition(format!("{what} is not Hermitian")));
            }
        }
    }
    Ok(())
}

/// Solver status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

/// Solver output: the (public-variable) primal matrix, certified primal and
/// dual objective values, and their gap.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: CMat,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}
