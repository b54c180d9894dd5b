//! Spin-1/2 operator algebra on a small dense Hilbert space.
//!
//! Basis convention: for an `n`-site register, site `m` (1-based) occupies bit
//! `n - m` of the basis index, so site 1 is the most significant bit. Bit value
//! 0 is spin up (sigma^z = +1), bit value 1 is spin down.
//!
//! Everything is real. Single-site sigma^y is imaginary, so it is only
//! available inside products carrying an even number of y factors.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest register supported by the dense backend.
pub const MAX_SITES: usize = 12;

/// Absolute tolerance on `|psi|^2 - 1` and `tr(rho) - 1`.
pub const NORM_TOL: f64 = 1e-12;
/// Absolute tolerance on `|A_ij - A_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// 1-based site label. Site 1 is the block center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteIndex(usize);

impl SiteIndex {
    pub fn new(value: usize) -> Result<Self> {
        if value == 0 {
            return Err(Error::InvalidSite { site: 0, n_sites: MAX_SITES });
        }
        Ok(Self(value))
    }

    pub fn get(self) -> usize {
        self.0
    }

    fn check(self, n_sites: usize) -> Result<()> {
        if self.0 > n_sites {
            return Err(Error::InvalidSite { site: self.0, n_sites });
        }
        Ok(())
    }

    /// Bit position of this site in a basis index of an `n_sites` register.
    pub fn bit(self, n_sites: usize) -> usize {
        n_sites - self.0
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Convenience for building site lists from plain integers.
pub fn sites(values: &[usize]) -> Result<Vec<SiteIndex>> {
    values.iter().map(|&v| SiteIndex::new(v)).collect()
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::TooManySites(n_sites));
    }
    Ok(())
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Dense real symmetric operator on `n_sites` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    n_sites: usize,
    matrix: DMatrix<f64>,
}

impl Operator {
    pub fn from_matrix(n_sites: usize, matrix: DMatrix<f64>) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: matrix.nrows() });
        }
        let asym = max_asymmetry(&matrix);
        if asym > SYMMETRY_TOL * matrix.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        Ok(Self { n_sites, matrix: DMatrix::identity(dim, dim) })
    }

    pub fn zeros(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        Ok(Self { n_sites, matrix: DMatrix::zeros(dim, dim) })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// `self + factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &Operator) -> Result<()> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        self.matrix += &other.matrix * factor;
        Ok(())
    }

    /// Plain matrix product. The result need not be symmetric, so a raw
    /// matrix is returned.
    pub fn product(&self, other: &Operator) -> Result<DMatrix<f64>> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(&self.matrix * &other.matrix)
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `H |v>` for a raw amplitude vector.
    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: v.len() });
        }
        Ok(&self.matrix * v)
    }
}

/// Product of Pauli factors on distinct sites, e.g. `[(X, 1), (X, 3)]`.
///
/// The number of y factors must be even so the operator is real.
pub fn pauli_string(factors: &[(Axis, SiteIndex)], n_sites: usize) -> Result<Operator> {
    check_sites(n_sites)?;
    let mut flip_mask = 0usize;
    let mut phase_mask = 0usize;
    let mut seen = 0usize;
    let mut n_y = 0usize;
    for &(axis, site) in factors {
        site.check(n_sites)?;
        let bit = 1usize << site.bit(n_sites);
        if seen & bit != 0 {
            return Err(Error::RepeatedSite(site.get()));
        }
        seen |= bit;
        match axis {
            Axis::X => flip_mask |= bit,
            Axis::Z => phase_mask |= bit,
            Axis::Y => {
                flip_mask |= bit;
                phase_mask |= bit;
                n_y += 1;
            }
        }
    }
    if n_y % 2 == 1 {
        return Err(Error::ImaginaryOperator);
    }
    // sigma^y |b> = i (-1)^b |1-b>, so an even number of y factors carries
    // the global factor i^{n_y} = (-1)^{n_y / 2}.
    let y_sign = if (n_y / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let dim = 1usize << n_sites;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let row = col ^ flip_mask;
        let sign = if (col & phase_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        m[(row, col)] = y_sign * sign;
    }
    Ok(Operator { n_sites, matrix: m })
}

/// Single-site Pauli matrix embedded in an `n_sites` register.
pub fn pauli(axis: Axis, site: SiteIndex, n_sites: usize) -> Result<Operator> {
    if axis == Axis::Y {
        return Err(Error::ImaginaryOperator);
    }
    pauli_string(&[(axis, site)], n_sites)
}

/// Two-site product `sigma_a^axis sigma_b^axis`; real for every axis.
pub fn pauli_pair(axis: Axis, site_a: SiteIndex, site_b: SiteIndex, n_sites: usize) -> Result<Operator> {
    if site_a == site_b {
        return Err(Error::RepeatedSite(site_a.get()));
    }
    pauli_string(&[(axis, site_a), (axis, site_b)], n_sites)
}

/// `prod_m sigma_m^axis` over every site; `axis` must be x or z.
pub fn global_product(axis: Axis, n_sites: usize) -> Result<Operator> {
    if axis == Axis::Y && n_sites % 2 == 1 {
        return Err(Error::ImaginaryOperator);
    }
    let factors = (1..=n_sites).map(|s| (axis, SiteIndex(s))).collect::<Vec<_>>();
    pauli_string(&factors, n_sites)
}

/// Normalized real state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_sites: usize,
    amplitudes: DVector<f64>,
}

impl PureState {
    pub fn new(n_sites: usize, amplitudes: DVector<f64>) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: amplitudes.len() });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { n_sites, amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(n_sites: usize, amplitudes: DVector<f64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sq: norm * norm });
        }
        Self::new(n_sites, amplitudes / norm)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: index + 1 });
        }
        let mut v = DVector::zeros(dim);
        v[index] = 1.0;
        Ok(Self { n_sites, amplitudes: v })
    }

    /// Tensor product of single-site states, site 1 first.
    pub fn product(factors: &[[f64; 2]]) -> Result<Self> {
        let n_sites = factors.len();
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        let v = DVector::from_fn(dim, |idx, _| {
            factors.iter().enumerate().map(|(k, f)| f[(idx >> (n_sites - 1 - k)) & 1]).product()
        });
        Self::normalized(n_sites, v)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<f64> {
        &self.amplitudes
    }

    pub fn negated(&self) -> Self {
        Self { n_sites: self.n_sites, amplitudes: -&self.amplitudes }
    }
}

/// Unit-trace positive semidefinite real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_sites: usize,
    matrix: DMatrix<f64>,
}

impl DensityMatrix {
    /// Validates trace, symmetry and positivity.
    pub fn new(n_sites: usize, matrix: DMatrix<f64>) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: matrix.nrows() });
        }
        let asym = max_asymmetry(&matrix);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let trace = matrix.trace();
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace}")));
        }
        let min_eig = matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("eigenvalue {min_eig}")));
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// `|psi><psi|`.
pub fn density_from_pure(psi: &PureState) -> Result<DensityMatrix> {
    let norm_sq = psi.amplitudes.norm_squared();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    let v = &psi.amplitudes;
    Ok(DensityMatrix { n_sites: psi.n_sites, matrix: v * v.transpose() })
}

/// Reduced state on `keep`, tracing out every other site.
///
/// Kept sites appear in ascending order in the result, so site `keep[0]`
/// (after sorting) becomes the most significant bit.
pub fn partial_trace(rho: &DensityMatrix, keep: &[SiteIndex]) -> Result<DensityMatrix> {
    let n = rho.n_sites;
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut kept = keep.to_vec();
    kept.sort();
    kept.dedup();
    for s in &kept {
        s.check(n)?;
    }
    let traced: Vec<SiteIndex> = (1..=n).map(SiteIndex).filter(|s| !kept.contains(s)).collect();

    let k = kept.len();
    let kept_bits: Vec<usize> = kept.iter().map(|s| s.bit(n)).collect();
    let traced_bits: Vec<usize> = traced.iter().map(|s| s.bit(n)).collect();
    let spread = |value: usize, bits: &[usize]| -> usize {
        let width = bits.len();
        bits.iter().enumerate().map(|(pos, &b)| ((value >> (width - 1 - pos)) & 1) << b).sum()
    };
    let embed_kept: Vec<usize> = (0..1usize << k).map(|i| spread(i, &kept_bits)).collect();
    let embed_traced: Vec<usize> = (0..1usize << traced.len()).map(|t| spread(t, &traced_bits)).collect();

    let dim = 1usize << k;
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = embed_traced.iter().map(|&t| rho.matrix[(embed_kept[i] | t, embed_kept[j] | t)]).sum();
        }
    }
    Ok(DensityMatrix { n_sites: k, matrix: out })
}

/// `tr(rho op)`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<f64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: op.dim() });
    }
    Ok(rho.matrix.component_mul(&op.matrix.transpose()).sum())
}

/// `<psi|op|psi>` without forming the density matrix.
pub fn state_expectation(psi: &PureState, op: &Operator) -> Result<f64> {
    let hv = op.apply(&psi.amplitudes)?;
    Ok(psi.amplitudes.dot(&hv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: usize) -> SiteIndex {
        SiteIndex::new(v).unwrap()
    }

    fn assert_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let diff = (a - b).amax();
        assert!(diff <= tol, "max diff {diff}");
    }

    #[test]
    fn sigma_z_single_site() {
        let z = pauli(Axis::Z, s(1), 1).unwrap();
        assert_close(z.matrix(), &DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])), 0.0);
    }

    #[test]
    fn sigma_x_on_low_site() {
        let x = pauli(Axis::X, s(2), 2).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0., 1., 0., 0., //
                1., 0., 0., 0., //
                0., 0., 0., 1., //
                0., 0., 1., 0.,
            ],
        );
        assert_close(x.matrix(), &expected, 0.0);
    }

    #[test]
    fn pauli_squares_to_identity() {
        let z = pauli(Axis::Z, s(1), 5).unwrap();
        let id = Operator::identity(5).unwrap();
        assert_close(&z.product(&z).unwrap(), id.matrix(), 1e-12);
    }

    #[test]
    fn single_site_y_is_rejected() {
        assert_eq!(pauli(Axis::Y, s(1), 3), Err(Error::ImaginaryOperator));
    }

    #[test]
    fn site_out_of_range() {
        assert!(matches!(pauli(Axis::X, s(4), 3), Err(Error::InvalidSite { site: 4, .. })));
        assert!(SiteIndex::new(0).is_err());
        assert!(matches!(Operator::identity(13), Err(Error::TooManySites(13))));
    }

    #[test]
    fn yy_pair_is_real_antidiagonal() {
        let yy = pauli_pair(Axis::Y, s(1), s(2), 2).unwrap();
        let mut expected = DMatrix::zeros(4, 4);
        expected[(0, 3)] = -1.0;
        expected[(1, 2)] = 1.0;
        expected[(2, 1)] = 1.0;
        expected[(3, 0)] = -1.0;
        assert_close(yy.matrix(), &expected, 0.0);
    }

    #[test]
    fn xx_pair_is_antidiagonal_ones() {
        let xx = pauli_pair(Axis::X, s(1), s(2), 2).unwrap();
        let mut expected = DMatrix::zeros(4, 4);
        for i in 0..4 {
            expected[(i, 3 - i)] = 1.0;
        }
        assert_close(xx.matrix(), &expected, 0.0);
    }

    #[test]
    fn zz_pair_is_product_of_singles() {
        let zz = pauli_pair(Axis::Z, s(1), s(3), 3).unwrap();
        let z1 = pauli(Axis::Z, s(1), 3).unwrap();
        let z3 = pauli(Axis::Z, s(3), 3).unwrap();
        assert_close(zz.matrix(), &z1.product(&z3).unwrap(), 1e-12);
    }

    #[test]
    fn pair_rejects_same_site() {
        assert_eq!(pauli_pair(Axis::X, s(2), s(2), 3), Err(Error::RepeatedSite(2)));
    }

    #[test]
    fn anticommutation_and_commutation() {
        let n = 4;
        for site in 1..=n {
            let x = pauli(Axis::X, s(site), n).unwrap();
            let z = pauli(Axis::Z, s(site), n).unwrap();
            let xz = x.product(&z).unwrap();
            let zx = z.product(&x).unwrap();
            assert_close(&xz, &(-zx), 1e-12);
            for other in (1..=n).filter(|&o| o != site) {
                let z_other = pauli(Axis::Z, s(other), n).unwrap();
                assert_close(&x.product(&z_other).unwrap(), &z_other.product(&x).unwrap(), 1e-12);
            }
        }
    }

    #[test]
    fn density_of_basis_and_uniform_states() {
        let rho = density_from_pure(&PureState::basis(5, 0).unwrap()).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], 1.0);
        assert_eq!(rho.matrix().sum(), 1.0);

        let uniform = PureState::new(5, DVector::from_element(32, 1.0 / 32f64.sqrt())).unwrap();
        let rho = density_from_pure(&uniform).unwrap();
        assert!(rho.matrix().iter().all(|&v| (v - 1.0 / 32.0).abs() < 1e-15));
    }

    #[test]
    fn density_rejects_unnormalized() {
        let bad = PureState { n_sites: 1, amplitudes: DVector::from_vec(vec![1.0, 1.0]) };
        assert!(matches!(density_from_pure(&bad), Err(Error::NotNormalized { .. })));
        assert!(PureState::new(1, DVector::from_vec(vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn density_validation() {
        let not_unit = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0]));
        assert!(DensityMatrix::new(1, not_unit).is_err());
        let negative = DMatrix::from_diagonal(&DVector::from_vec(vec![1.5, -0.5]));
        assert!(DensityMatrix::new(1, negative).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.5]);
        assert!(matches!(DensityMatrix::new(1, asym), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn trace_of_product_state() {
        let rho = density_from_pure(&PureState::basis(2, 0).unwrap()).unwrap();
        let r1 = partial_trace(&rho, &[s(1)]).unwrap();
        assert_close(r1.matrix(), &DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0])), 0.0);
    }

    #[test]
    fn trace_of_bell_state_is_maximally_mixed() {
        let h = 1.0 / 2f64.sqrt();
        let bell = PureState::new(2, DVector::from_vec(vec![h, 0.0, 0.0, h])).unwrap();
        let r = partial_trace(&density_from_pure(&bell).unwrap(), &[s(1)]).unwrap();
        assert_close(r.matrix(), &(DMatrix::identity(2, 2) * 0.5), 1e-15);
    }

    #[test]
    fn trace_keeps_ascending_site_order() {
        // |up, down, up>: keeping {3, 2} must give |down, up> on (2, 3).
        let psi = PureState::basis(3, 0b010).unwrap();
        let r = partial_trace(&density_from_pure(&psi).unwrap(), &[s(3), s(2)]).unwrap();
        assert_eq!(r.matrix()[(0b10, 0b10)], 1.0);
    }

    #[test]
    fn trace_errors() {
        let rho = density_from_pure(&PureState::basis(2, 0).unwrap()).unwrap();
        assert_eq!(partial_trace(&rho, &[]), Err(Error::EmptyKeep));
        assert!(partial_trace(&rho, &[s(3)]).is_err());
    }

    #[test]
    fn expectation_values() {
        let up = density_from_pure(&PureState::basis(1, 0).unwrap()).unwrap();
        assert_eq!(expectation(&up, &pauli(Axis::Z, s(1), 1).unwrap()).unwrap(), 1.0);
        let mixed = DensityMatrix::new(1, DMatrix::identity(2, 2) * 0.5).unwrap();
        assert_eq!(expectation(&mixed, &pauli(Axis::X, s(1), 1).unwrap()).unwrap(), 0.0);
        let x3 = pauli(Axis::X, s(1), 3).unwrap();
        assert!(matches!(expectation(&up, &x3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn product_state_matches_basis_layout() {
        // |down> on site 1, |up> on site 2 is index 0b10.
        let psi = PureState::product(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(psi.amplitudes()[0b10], 1.0);
    }
}
