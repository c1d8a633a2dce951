//! Max relative entropy and max mutual information (exact spectral route).

use crate::entropics::hypo::marginal_product;
use crate::entropics::value::EntropicValue;
use crate::error::Result;
use crate::qmat::eig::{eig_hermitian_mat, mat_func, support_projector, MatFunc, SUPPORT_CUTOFF};
use crate::qmat::op::Operator;
use crate::qmat::state::DensityMatrix;

/// D_max(ρ‖σ) = log₂ λ_max(σ^{-1/2} ρ σ^{-1/2}) with the pseudo-inverse taken
/// on supp(σ); +∞ when ρ has more than 1e-9 mass outside supp(σ).
pub fn d_max(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropicValue> {
    let sigma = sigma.permuted(&rho.space().labels())?;
    let supp = support_projector(sigma.op(), SUPPORT_CUTOFF)?;
    let outside = Operator::identity(rho.space().clone()).sub(&supp)?;
    let mass_out = outside.trace_product(rho.op()).re;
    if mass_out > 1e-9 {
        return Ok(EntropicValue::spectral(f64::INFINITY, 0.0));
    }
    let isq = mat_func(sigma.op(), MatFunc::InvSqrtPseudo, SUPPORT_CUTOFF)?;
    let mid = isq.matmul(&rho.op().matmul(&isq)?)?;
    let e = eig_hermitian_mat(mid.mat())?;
    let lmax = e.values.first().copied().unwrap_or(0.0).max(0.0);
    let value = if lmax <= 0.0 {
        f64::NEG_INFINITY
    } else {
        lmax.log2()
    };
    Ok(EntropicValue::spectral(value, 0.0))
}

/// I_max(A:B)_ρ = D_max(ρ^{AB} ‖ ρ^A ⊗ ρ^B).
pub fn i_max(rho: &DensityMatrix, cut_a: &[&str], cut_b: &[&str]) -> Result<EntropicValue> {
    let sigma = marginal_product(rho, cut_a, cut_b)?;
    d_max(rho, &sigma)
}
