//! Anisotropic XY model on the 5-site star block.
//!
//! The block couples the center (site 1) to the four leaves with
//! `(J/4) sum_m [(1+gamma) X_1 X_m + (1-gamma) Y_1 Y_m]`. Its ground doublet
//! has one state in each `prod Z` sector; the even-sector state `psi0` has a
//! closed form, and the renormalized couplings `(J', gamma')` are rational
//! functions of the doublet amplitudes.
//!
//! Ket labels in the closed forms: the printed amplitude tables list the
//! center first and name each spin relative to the flipped axis, so a printed
//! "up" spin is bit 1 here. With that reading `psi0` lies in the `+1` sector
//! of `prod Z` and `psi1` in the `-1` sector.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groundstate::{eigh, select_ground_xy, GroundSelection};
use crate::spinops::{pauli_pair, Axis, Operator, PureState, SiteIndex};
use nalgebra::DVector;

pub const BLOCK_SITES: usize = 5;

/// Below this `|gamma|` the closed forms lose precision (they divide by
/// gamma); the flow uses the exact `gamma' = 0` there.
pub const GAMMA_MIN: f64 = 1e-3;

/// `J'/J` in the `gamma -> 0` limit.
const J_RATIO_AT_ZERO: f64 = 0.375;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYCouplings {
    pub j: f64,
    pub gamma: f64,
}

impl XYCouplings {
    pub fn new(j: f64, gamma: f64) -> Self {
        Self { j, gamma }
    }

    /// `J = 1`, the normalization used for every coherence evaluation.
    pub fn unit(gamma: f64) -> Self {
        Self { j: 1.0, gamma }
    }
}

/// Doublet amplitudes `g1..g5` (psi0) and `g6..g10` (psi1) plus the two
/// auxiliary radicals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixCoeffs {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub g5: f64,
    pub g6: f64,
    pub g7: f64,
    pub g8: f64,
    pub g9: f64,
    pub g10: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl AppendixCoeffs {
    /// `4 g1^2 + 4 g2^2 + g3^2 + 6 g4^2 + g5^2`, which is 1 for a normalized psi0.
    pub fn psi0_norm_sq(&self) -> f64 {
        4.0 * self.g1 * self.g1
            + 4.0 * self.g2 * self.g2
            + self.g3 * self.g3
            + 6.0 * self.g4 * self.g4
            + self.g5 * self.g5
    }

    /// `g6^2 + 6 g7^2 + g8^2 + 4 g9^2 + 4 g10^2`.
    pub fn psi1_norm_sq(&self) -> f64 {
        self.g6 * self.g6
            + 6.0 * self.g7 * self.g7
            + self.g8 * self.g8
            + 4.0 * self.g9 * self.g9
            + 4.0 * self.g10 * self.g10
    }
}

pub fn alpha1(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    (1.0 + 34.0 * g2 + g2 * g2).sqrt()
}

pub fn alpha2(gamma: f64) -> f64 {
    let a1 = alpha1(gamma);
    let g2 = gamma * gamma;
    let g4 = g2 * g2;
    2.0 - 2.0 * a1 + 71.0 * g2 + 17.0 * a1 * g2 + 104.0 * g4 + 3.0 * a1 * g4 + 3.0 * g4 * g2
}

/// Closed-form doublet amplitudes for `|gamma| >= 1e-3`.
pub fn appendix_coeffs(gamma: f64) -> Result<AppendixCoeffs> {
    if !(gamma.abs() >= GAMMA_MIN) {
        return Err(Error::GammaOutOfDomain(gamma.abs()));
    }
    let g = gamma;
    let gg = g * g;
    let g4 = gg * gg;
    let a1 = alpha1(g);
    let a2 = alpha2(g);
    let s2a2 = (2.0 * a2).sqrt();
    let e5 = 5.0 + a1 + 5.0 * gg;

    let g1 = -(-1.0 + a1 + gg) * e5.sqrt() / (4.0 * s2a2);
    let g2 = -3.0 * (g4 * e5 / a2).sqrt() / (2.0 * g * std::f64::consts::SQRT_2);
    let g3 = (-1.0 + a1 + gg) / s2a2;
    let g4c = g * (5.0 + a1 + gg) / (2.0 * s2a2);
    let g5 = 3.0 * std::f64::consts::SQRT_2 * gg / a2.sqrt();

    let d1 = 1.0 + a1 + 34.0 * gg - a1 * gg + g4;
    let root = (gg * e5 / d1).sqrt();
    let q = 4.0 * (3.0 + 2.0 * gg + 3.0 * g4);
    let g6 = root * (-2.0 - 2.0 * a1 + 17.0 * gg - 3.0 * a1 * gg + 3.0 * g4) / q;
    let g7 = -root * (1.0 + a1 - gg + 6.0 * g4) / (g * q);
    let g8 = -3.0 * root * (5.0 - a1 + 5.0 * gg) / q;
    let r = (34.0 - a1 + (1.0 + a1) / gg + gg).sqrt();
    let g9 = (1.0 + a1 - gg) / (4.0 * g * r);
    let g10 = 3.0 / (2.0 * r);

    Ok(AppendixCoeffs { g1, g2, g3, g4: g4c, g5, g6, g7, g8, g9, g10, alpha1: a1, alpha2: a2 })
}

/// 32x32 block Hamiltonian, center coupled to sites 2..=5.
pub fn block_hamiltonian_xy(c: XYCouplings) -> Result<Operator> {
    let mut h = Operator::zeros(BLOCK_SITES)?;
    let center = SiteIndex::new(1)?;
    for m in 2..=BLOCK_SITES {
        let leaf = SiteIndex::new(m)?;
        h.add_scaled(c.j / 4.0 * (1.0 + c.gamma), &pauli_pair(Axis::X, center, leaf, BLOCK_SITES)?)?;
        h.add_scaled(c.j / 4.0 * (1.0 - c.gamma), &pauli_pair(Axis::Y, center, leaf, BLOCK_SITES)?)?;
    }
    Ok(h)
}

/// `E0 = -(J/2) sqrt(5 + 5 gamma^2 + alpha1)`.
pub fn ground_energy_xy(c: XYCouplings) -> f64 {
    -0.5 * c.j * (5.0 + 5.0 * c.gamma * c.gamma + alpha1(c.gamma)).sqrt()
}

/// Amplitude slot of basis index `idx` in the psi0 table, if any.
///
/// Classified by whether the printed center spin is up and by how many of the
/// four printed leaf spins are down (printed up = bit 1).
fn psi0_slot(idx: usize) -> Option<usize> {
    let center_up = (idx >> 4) & 1 == 1;
    let leaf_down = 4 - (idx & 0xF).count_ones() as usize;
    match (center_up, leaf_down) {
        (true, 1) => Some(1),
        (true, 3) => Some(2),
        (false, 0) => Some(3),
        (false, 2) => Some(4),
        (false, 4) => Some(5),
        _ => None,
    }
}

/// Closed-form even-parity ground state built from `g1..g5`.
pub fn psi0_closed_form(gamma: f64) -> Result<PureState> {
    let c = appendix_coeffs(gamma)?;
    let table = [c.g1, c.g2, c.g3, c.g4, c.g5];
    let v = DVector::from_fn(1 << BLOCK_SITES, |idx, _| psi0_slot(idx).map_or(0.0, |slot| table[slot - 1]));
    let norm_sq = v.norm_squared();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm_sq });
    }
    PureState::normalized(BLOCK_SITES, v)
}

/// Numerator and denominator of the renormalized anisotropy. The denominator
/// is also `J'/J`.
fn flow_polynomials(gamma: f64, c: &AppendixCoeffs) -> (f64, f64) {
    let g = gamma;
    let AppendixCoeffs { g1, g2, g3, g4, g5, g6, g7, g8, g9, g10, .. } = *c;

    let numerator = 2.0
        * (3.0 * g10 * g4 + 3.0 * g1 * g7 + g2 * g8 + g3 * g9)
        * (g10 * g5 + g1 * g6 + 3.0 * g2 * g7 + 3.0 * g4 * g9)
        + g * (g10 * g10 * (9.0 * g4 * g4 + g5 * g5)
            + 9.0 * g2 * g2 * g7 * g7
            + g1 * g1 * (g6 * g6 + 9.0 * g7 * g7)
            + g2 * g2 * g8 * g8
            + 18.0 * g2 * g4 * g7 * g9
            + 2.0 * g2 * g3 * g8 * g9
            + g3 * g3 * g9 * g9
            + 9.0 * g4 * g4 * g9 * g9
            + 6.0 * g1 * (g2 * g7 * (g6 + g8) + (g4 * g6 + g3 * g7) * g9)
            + 2.0 * g10 * (g1 * (g5 * g6 + 9.0 * g4 * g7) + 3.0 * (g2 * (g5 * g7 + g4 * g8) + g4 * (g3 + g5) * g9)));

    let denominator = g10 * g10 * (9.0 * g4 * g4 + 6.0 * g * g4 * g5 + g5 * g5)
        + 9.0 * g2 * g2 * g7 * g7
        + g1 * g1 * (g6 * g6 + 6.0 * g * g6 * g7 + 9.0 * g7 * g7)
        + 6.0 * g * g2 * g2 * g7 * g8
        + g2 * g2 * g8 * g8
        + 6.0 * g * g2 * g3 * g7 * g9
        + 18.0 * g2 * g4 * g7 * g9
        + 2.0 * g2 * g3 * g8 * g9
        + 6.0 * g * g2 * g4 * g8 * g9
        + g3 * g3 * g9 * g9
        + 6.0 * g * g3 * g4 * g9 * g9
        + 9.0 * g4 * g4 * g9 * g9
        + 2.0
            * g1
            * (g2 * (3.0 * g7 * (3.0 * g * g7 + g8) + g6 * (3.0 * g7 + g * g8))
                + (g * g3 * g6 + 3.0 * g4 * g6 + 3.0 * g3 * g7 + 9.0 * g * g4 * g7) * g9)
        + 2.0
            * g10
            * (g1 * (g5 * g6 + 9.0 * g4 * g7)
                + g * (9.0 * g2 * g4 * g7
                    + 3.0 * g1 * (g4 * g6 + g5 * g7)
                    + g2 * g5 * g8
                    + 9.0 * g4 * g4 * g9
                    + g3 * g5 * g9)
                + 3.0 * (g2 * (g5 * g7 + g4 * g8) + g4 * (g3 + g5) * g9));

    (numerator, denominator)
}

/// One QRG step `(J, gamma) -> (J', gamma')`.
pub fn rg_step_xy(c: XYCouplings) -> Result<XYCouplings> {
    let (j_ratio, gamma_next) = if c.gamma.abs() < GAMMA_MIN {
        (J_RATIO_AT_ZERO, 0.0)
    } else {
        let coeffs = appendix_coeffs(c.gamma)?;
        let (num, den) = flow_polynomials(c.gamma, &coeffs);
        (den, num / den)
    };
    let j_prime = c.j * j_ratio;
    if !(j_prime > 0.0) || !gamma_next.is_finite() {
        return Err(Error::FlowSign { gamma: c.gamma, j_prime });
    }
    debug!("xy step: (J={}, gamma={}) -> (J'={}, gamma'={})", c.j, c.gamma, j_prime, gamma_next);
    Ok(XYCouplings { j: j_prime, gamma: gamma_next })
}

/// Sequence of couplings under repeated QRG steps; `steps[0]` is the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RGTrajectoryXY {
    pub steps: Vec<XYCouplings>,
}

impl RGTrajectoryXY {
    pub fn last(&self) -> XYCouplings {
        *self.steps.last().expect("trajectory holds the initial couplings")
    }
}

pub fn rg_flow_xy(c0: XYCouplings, n: usize) -> Result<RGTrajectoryXY> {
    let mut steps = Vec::with_capacity(n + 1);
    steps.push(c0);
    for _ in 0..n {
        let next = rg_step_xy(*steps.last().unwrap())?;
        steps.push(next);
    }
    Ok(RGTrajectoryXY { steps })
}

/// Numerically selected even-parity ground state of the block at `J = 1`.
pub fn xy_ground(gamma: f64) -> Result<GroundSelection> {
    let h = block_hamiltonian_xy(XYCouplings::unit(gamma))?;
    select_ground_xy(&eigh(&h)?)
}
