//! Eigendecomposition and ground-state selection for the 5-site blocks.
//!
//! Degenerate ground spaces are resolved by diagonalizing a symmetry operator
//! restricted to the ground space, never by inspecting amplitudes, so the
//! result does not depend on which basis the eigensolver happens to return.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinops::{global_product, Axis, Operator, PureState, SYMMETRY_TOL};

/// Relative tolerance used to group eigenvalues into the ground space.
pub const DEFAULT_DEG_TOL: f64 = 1e-9;

/// Eigenvalues in ascending order with matching orthonormal columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    n_sites: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// Number of eigenvalues within `deg_tol * max(1, |E0|)` of the minimum.
    pub fn degeneracy(&self, deg_tol: f64) -> usize {
        let e0 = self.eigenvalues[0];
        let cut = e0 + deg_tol * e0.abs().max(1.0);
        self.eigenvalues.iter().take_while(|&&e| e <= cut).count()
    }
}

/// Dense symmetric eigensolver (Householder tridiagonalization + implicit QL).
///
/// Output columns are sign-canonicalized so identical input always yields
/// identical output.
pub fn eigh(op: &Operator) -> Result<EigenDecomposition> {
    let m = op.matrix();
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric(d));
            }
        }
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = canonical_sign(eig.eigenvectors.column(src).into_owned());
        eigenvectors.set_column(dst, &col);
    }
    Ok(EigenDecomposition { n_sites: op.n_sites(), eigenvalues, eigenvectors })
}

/// Eigenvectors spanning the (near-)degenerate ground space.
pub fn ground_space(dec: &EigenDecomposition, deg_tol: f64) -> Vec<PureState> {
    let deg = dec.degeneracy(deg_tol);
    (0..deg)
        .map(|k| PureState::normalized(dec.n_sites, dec.vector(k)).expect("eigensolver returns unit columns"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    Unique,
    ParityPlus,
    ParityMinus,
    SpinflipSymmetric,
}

#[derive(Debug, Clone)]
pub struct GroundSelection {
    pub state: PureState,
    pub energy: f64,
    pub degeneracy: usize,
    pub selector: Selector,
}

/// Diagonalizes `sym` inside the span of the ground-space columns and returns
/// the eigenvector with eigenvalue closest to `target` together with that
/// eigenvalue.
fn project_onto_sector(
    dec: &EigenDecomposition,
    deg: usize,
    sym: &Operator,
    target: f64,
) -> Result<(DVector<f64>, f64)> {
    let basis = dec.eigenvectors.columns(0, deg).into_owned();
    let restricted = basis.transpose() * sym.matrix() * &basis;
    let restricted = (&restricted + restricted.transpose()) * 0.5;
    let eig = SymmetricEigen::new(restricted);
    let best = (0..deg)
        .min_by(|&a, &b| (eig.eigenvalues[a] - target).abs().total_cmp(&(eig.eigenvalues[b] - target).abs()))
        .ok_or(Error::NoSectorSplit(deg))?;
    let value = eig.eigenvalues[best];
    let v = &basis * eig.eigenvectors.column(best);
    Ok((v, value))
}

/// Picks the member of the XY ground doublet with `prod sigma^z = +1`.
pub fn select_ground_xy(dec: &EigenDecomposition) -> Result<GroundSelection> {
    select_ground_xy_sector(dec, 1.0)
}

/// Like [`select_ground_xy`] but for an explicit parity sector (`+1` or `-1`).
pub fn select_ground_xy_sector(dec: &EigenDecomposition, parity: f64) -> Result<GroundSelection> {
    let deg = dec.degeneracy(DEFAULT_DEG_TOL);
    if deg < 2 {
        return Err(Error::NoSectorSplit(deg));
    }
    let p = global_product(Axis::Z, dec.n_sites)?;
    let (v, value) = project_onto_sector(dec, deg, &p, parity)?;
    if (value - parity).abs() > 1e-8 {
        return Err(Error::NoSectorSplit(deg));
    }
    let state = sign_fix(&PureState::normalized(dec.n_sites, v)?);
    Ok(GroundSelection {
        state,
        energy: dec.ground_energy(),
        degeneracy: deg,
        selector: if parity > 0.0 { Selector::ParityPlus } else { Selector::ParityMinus },
    })
}

/// Ising cluster ground state: the unique ground state when there is one,
/// otherwise the spin-flip-symmetric member of the degenerate space, which
/// continues the g > 0 ground state smoothly to g = 0.
pub fn select_ground_ising(dec: &EigenDecomposition, g: f64) -> Result<GroundSelection> {
    if !(g >= 0.0) {
        return Err(Error::InvalidCoupling(g));
    }
    let deg = dec.degeneracy(DEFAULT_DEG_TOL);
    if deg == 1 {
        let state = sign_fix(&PureState::normalized(dec.n_sites, dec.vector(0))?);
        return Ok(GroundSelection { state, energy: dec.ground_energy(), degeneracy: 1, selector: Selector::Unique });
    }
    let flip = global_product(Axis::X, dec.n_sites)?;
    let (v, value) = project_onto_sector(dec, deg, &flip, 1.0)?;
    if (value - 1.0).abs() > 1e-8 {
        return Err(Error::NoSectorSplit(deg));
    }
    let state = sign_fix(&PureState::normalized(dec.n_sites, v)?);
    Ok(GroundSelection { state, energy: dec.ground_energy(), degeneracy: deg, selector: Selector::SpinflipSymmetric })
}

fn canonical_sign(mut v: DVector<f64>) -> DVector<f64> {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
    v
}

/// Flips the global sign so the largest-magnitude amplitude (lowest index on
/// ties) is positive.
pub fn sign_fix(psi: &PureState) -> PureState {
    let v = canonical_sign(psi.amplitudes().clone());
    PureState::new(psi.n_sites(), v).unwrap_or_else(|_| psi.clone())
}
