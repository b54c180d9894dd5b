//! Transverse-field Ising model: 5-site cluster, field recursion and its
//! non-trivial fixed point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groundstate::{eigh, select_ground_ising, GroundSelection};
use crate::spinops::{pauli, pauli_pair, Axis, Operator, SiteIndex};

pub const CLUSTER_SITES: usize = 5;

/// Default bisection bracket for the fixed point.
pub const DEFAULT_BRACKET: (f64, f64) = (1.0, 3.0);
/// Finite-difference step for the flow derivative at the fixed point.
pub const DEFAULT_FD_STEP: f64 = 1e-6;
pub const FIXED_POINT_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;

/// Quantum Monte Carlo critical field of the square-lattice model, kept for
/// comparison only.
pub const MONTE_CARLO_G_C: f64 = 3.04;
/// Reference correlation-length exponent, kept for comparison only.
pub const REFERENCE_NU: f64 = 0.6211;

/// Normalized transverse field `g = h / J`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct IsingField(f64);

impl IsingField {
    pub fn new(g: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidCoupling(g));
        }
        Ok(Self(g))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `J [ -sum_{m=2..5} Z_1 Z_m - g sum_{m=1..5} X_m ]`.
pub fn cluster_hamiltonian_ising(j: f64, g: f64) -> Result<Operator> {
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::InvalidCoupling(j));
    }
    let g = IsingField::new(g)?.get();
    let mut h = Operator::zeros(CLUSTER_SITES)?;
    let center = SiteIndex::new(1)?;
    for m in 2..=CLUSTER_SITES {
        h.add_scaled(-j, &pauli_pair(Axis::Z, center, SiteIndex::new(m)?, CLUSTER_SITES)?)?;
    }
    for m in 1..=CLUSTER_SITES {
        h.add_scaled(-j * g, &pauli(Axis::X, SiteIndex::new(m)?, CLUSTER_SITES)?)?;
    }
    Ok(h)
}

/// Renormalized field after one blocking step.
///
/// For `g > 1` the closed form is rewritten in powers of `1/g^2` so that the
/// runaway branch (`g' ~ g^2`) stays finite for many more steps.
pub fn g_prime(g: f64) -> f64 {
    if g <= 1.0 {
        let g2 = g * g;
        let g4 = g2 * g2;
        let g6 = g4 * g2;
        let top = g4 * ((1.0 + g2).powi(3) * (4.0 + 4.0 * g2 + 2.0 * g4 + g6)).powf(0.25);
        let bottom = (2.0 + g2) * (8.0 + 8.0 * g2 + 3.0 * g4 + g6).sqrt();
        top / bottom
    } else {
        let t = 1.0 / (g * g);
        let quartic = ((1.0 + t).powi(3) * (1.0 + 2.0 * t + 4.0 * t * t + 4.0 * t * t * t)).powf(0.25);
        let bottom = (1.0 + 2.0 * t) * (1.0 + 3.0 * t + 8.0 * t * t + 8.0 * t * t * t).sqrt();
        g * g * quartic / bottom
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RGTrajectoryIsing {
    pub steps: Vec<f64>,
}

impl RGTrajectoryIsing {
    pub fn last(&self) -> f64 {
        *self.steps.last().expect("trajectory holds the initial field")
    }
}

pub fn rg_flow_ising(g0: f64, n: usize) -> Result<RGTrajectoryIsing> {
    let mut g = IsingField::new(g0)?.get();
    let mut steps = Vec::with_capacity(n + 1);
    steps.push(g);
    for _ in 0..n {
        g = g_prime(g);
        steps.push(g);
    }
    Ok(RGTrajectoryIsing { steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub g_c: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub nu: f64,
}

/// Bisection on `g'(g) - g`, then `nu` from the flow derivative at the root.
pub fn fixed_point(bracket_lo: f64, bracket_hi: f64) -> Result<FixedPointResult> {
    let f = |g: f64| g_prime(g) - g;
    let (mut lo, mut hi) = (bracket_lo.min(bracket_hi), bracket_lo.max(bracket_hi));
    if !(lo >= 0.0) || !hi.is_finite() {
        return Err(Error::NoBracket { lo: bracket_lo, hi: bracket_hi });
    }
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        hi = lo;
    } else if f_hi == 0.0 {
        lo = hi;
    } else if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { lo: bracket_lo, hi: bracket_hi });
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() <= FIXED_POINT_TOL * 1e-3 || hi - lo <= f64::EPSILON * mid {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let residual = f(mid).abs();
    let nu = nu_exponent(mid)?;
    Ok(FixedPointResult { g_c: mid, residual, bracket: (bracket_lo, bracket_hi), nu })
}

/// Central difference of `g'` at `g`.
pub fn flow_derivative(g: f64, step: f64) -> f64 {
    (g_prime(g + step) - g_prime(g - step)) / (2.0 * step)
}

/// `nu = 1 / log2(dg'/dg)` at the fixed point.
pub fn nu_exponent(g_c: f64) -> Result<f64> {
    nu_exponent_with_step(g_c, DEFAULT_FD_STEP)
}

pub fn nu_exponent_with_step(g_c: f64, step: f64) -> Result<f64> {
    if !(g_c > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidCoupling(g_c));
    }
    let slope = flow_derivative(g_c, step);
    if !(slope > 1.0) {
        return Err(Error::NonRepulsive(slope));
    }
    Ok(1.0 / slope.log2())
}

/// Selected cluster ground state at field `g`.
///
/// The Hamiltonian is built with `J = 1 / max(1, g)`; a positive overall
/// factor leaves the eigenvectors unchanged and keeps the spectrum O(1) along
/// runaway flows.
pub fn ising_ground(g: f64) -> Result<GroundSelection> {
    let g = IsingField::new(g)?.get();
    let h = cluster_hamiltonian_ising(1.0 / g.max(1.0), g)?;
    select_ground_ising(&eigh(&h)?, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundstate::{ground_space, Selector, DEFAULT_DEG_TOL};

    #[test]
    fn classical_limit_spectrum() {
        let dec = eigh(&cluster_hamiltonian_ising(1.0, 0.0).unwrap()).unwrap();
        assert!((dec.ground_energy() + 4.0).abs() < 1e-12);
        assert_eq!(ground_space(&dec, DEFAULT_DEG_TOL).len(), 2);
    }

    #[test]
    fn field_dominated_limit() {
        let g = 1e3;
        let dec = eigh(&cluster_hamiltonian_ising(1.0, g).unwrap()).unwrap();
        assert!((dec.ground_energy() / (-5.0 * g) - 1.0).abs() < 1e-5);
        let sel = ising_ground(g).unwrap();
        let target = 1.0 / 32f64.sqrt();
        assert!(sel.state.amplitudes().iter().all(|a| (a - target).abs() < 1e-3));
    }

    #[test]
    fn unique_ground_state_at_two() {
        let sel = ising_ground(2.0).unwrap();
        assert_eq!(sel.selector, Selector::Unique);
        assert_eq!(sel.degeneracy, 1);
    }

    #[test]
    fn ghz_at_zero_field() {
        let sel = ising_ground(0.0).unwrap();
        assert_eq!(sel.selector, Selector::SpinflipSymmetric);
        let h = 1.0 / 2f64.sqrt();
        let a = sel.state.amplitudes();
        assert!((a[0] - h).abs() < 1e-12 && (a[31] - h).abs() < 1e-12);
        assert!((a.norm_squared() - a[0] * a[0] - a[31] * a[31]).abs() < 1e-12);
    }

    #[test]
    fn recursion_values() {
        assert_eq!(g_prime(0.0), 0.0);
        let expected = 88f64.powf(0.25) / (3.0 * 20f64.sqrt());
        assert!((g_prime(1.0) - expected).abs() < 1e-15);
        assert!((g_prime(1.0) - 0.2284).abs() < 5e-4);
    }

    #[test]
    fn large_field_branch_is_continuous() {
        // Both branches agree where they meet and for moderately large g.
        let direct = |g: f64| {
            let g2 = g * g;
            let g4 = g2 * g2;
            let g6 = g4 * g2;
            g4 * ((1.0 + g2).powi(3) * (4.0 + 4.0 * g2 + 2.0 * g4 + g6)).powf(0.25)
                / ((2.0 + g2) * (8.0 + 8.0 * g2 + 3.0 * g4 + g6).sqrt())
        };
        for &g in &[1.0 + 1e-12, 1.5, 2.0, 3.7, 10.0, 100.0] {
            assert!((g_prime(g) / direct(g) - 1.0).abs() < 1e-13, "g = {g}");
        }
    }

    #[test]
    fn flows_separate() {
        assert!(rg_flow_ising(1.5, 6).unwrap().last() < 1e-2);
        assert!(rg_flow_ising(2.2, 6).unwrap().last() > 1e3);
        assert!(rg_flow_ising(0.0, 4).unwrap().steps.iter().all(|&g| g == 0.0));
        assert!(rg_flow_ising(-1.0, 1).is_err());
    }

    #[test]
    fn fixed_point_default_bracket() {
        let fp = fixed_point(DEFAULT_BRACKET.0, DEFAULT_BRACKET.1).unwrap();
        assert!((fp.g_c - 1.835).abs() <= 1e-3);
        assert!(fp.residual <= FIXED_POINT_TOL);
        assert!(flow_derivative(fp.g_c, DEFAULT_FD_STEP) > 1.0);
        assert!(fp.nu > 0.0);
    }

    #[test]
    fn fixed_point_without_sign_change() {
        assert!(matches!(fixed_point(0.5, 1.0), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn derivative_is_step_stable() {
        let g_c = fixed_point(1.0, 3.0).unwrap().g_c;
        let d: Vec<f64> = [1e-5, 1e-6, 1e-7].iter().map(|&h| flow_derivative(g_c, h)).collect();
        assert!((d[0] - d[1]).abs() < 1e-6 && (d[1] - d[2]).abs() < 1e-6, "{d:?}");
    }

    #[test]
    fn attractive_point_has_no_exponent() {
        assert!(matches!(nu_exponent(0.5), Err(Error::NonRepulsive(_))));
    }

    #[test]
    fn invalid_inputs() {
        assert!(cluster_hamiltonian_ising(0.0, 1.0).is_err());
        assert!(cluster_hamiltonian_ising(1.0, -1.0).is_err());
        assert!(ising_ground(f64::INFINITY).is_err());
    }
}
