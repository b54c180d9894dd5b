//! l1-norm of coherence in the computational basis.

use crate::error::Result;
use crate::spinops::{density_from_pure, partial_trace, DensityMatrix, PureState, SiteIndex};

/// Sum of `|rho_ij|` over all `i != j`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let total: f64 = m.iter().map(|v| v.abs()).sum();
    let diag: f64 = m.diagonal().iter().map(|v| v.abs()).sum();
    (total - diag).max(0.0)
}

/// Pure-state shortcut `(sum_i |c_i|)^2 - 1`.
pub fn l1_coherence_pure(psi: &PureState) -> f64 {
    let s: f64 = psi.amplitudes().iter().map(|c| c.abs()).sum();
    (s * s - 1.0).max(0.0)
}

/// Coherence of the marginal on `keep`; an empty `keep` means the whole
/// register.
pub fn subsystem_coherence(psi: &PureState, keep: &[SiteIndex]) -> Result<f64> {
    if keep.is_empty() || keep.len() == psi.n_sites() && covers_all(keep, psi.n_sites()) {
        return Ok(l1_coherence_pure(psi));
    }
    let rho = density_from_pure(psi)?;
    Ok(l1_coherence(&partial_trace(&rho, keep)?))
}

fn covers_all(keep: &[SiteIndex], n: usize) -> bool {
    (1..=n).all(|s| keep.iter().any(|k| k.get() == s))
}
