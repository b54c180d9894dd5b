//! Closed-form versus numeric consistency checks behind `qrg validate`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrg_coherence::coherence::{l1_coherence, l1_coherence_pure};
use qrg_coherence::groundstate::{eigh, select_ground_xy_sector, sign_fix};
use qrg_coherence::spinops::{density_from_pure, global_product, state_expectation, Axis, PureState};
use qrg_coherence::xy::{
    appendix_coeffs, block_hamiltonian_xy, ground_energy_xy, psi0_closed_form, rg_step_xy, XYCouplings, GAMMA_MIN,
};
use qrg_coherence::Result;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, worst: f64, tol: f64, what: &str) -> Self {
        Self {
            name: name.to_string(),
            passed: worst <= tol,
            detail: format!("max {what} = {worst:.3e} (tol {tol:.1e})"),
        }
    }
}

/// `points` values spread evenly over `[1e-3, 1]`.
pub fn gamma_points(points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![1.0];
    }
    (0..points).map(|k| GAMMA_MIN + (1.0 - GAMMA_MIN) * k as f64 / (points - 1) as f64).collect()
}

fn up_to_sign(a: &PureState, b: &PureState) -> f64 {
    let (a, b) = (sign_fix(a), sign_fix(b));
    (a.amplitudes() - b.amplitudes()).amax().min((a.amplitudes() + b.amplitudes()).amax())
}

pub fn run_checks(gamma_grid: usize, tol: f64) -> Result<Vec<Check>> {
    let gammas = gamma_points(gamma_grid);
    let parity = global_product(Axis::Z, 5)?;

    let mut psi_err = 0.0f64;
    let mut energy_err = 0.0f64;
    let mut parity_err = 0.0f64;
    let mut norm_err = 0.0f64;
    for &g in &gammas {
        let c = XYCouplings::unit(g);
        let dec = eigh(&block_hamiltonian_xy(c)?)?;
        let even = select_ground_xy_sector(&dec, 1.0)?;
        let odd = select_ground_xy_sector(&dec, -1.0)?;
        psi_err = psi_err.max(up_to_sign(&psi0_closed_form(g)?, &even.state));
        let e0 = ground_energy_xy(c);
        energy_err = energy_err.max((dec.ground_energy() - e0).abs() / e0.abs());
        parity_err = parity_err
            .max((state_expectation(&even.state, &parity)? - 1.0).abs())
            .max((state_expectation(&odd.state, &parity)? + 1.0).abs());
        norm_err = norm_err.max((appendix_coeffs(g)?.psi0_norm_sq() - 1.0).abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut identity_err = 0.0f64;
    for _ in 0..100 {
        let v = DVector::from_fn(32, |_, _| rng.gen_range(-1.0..1.0));
        let psi = PureState::normalized(5, v)?;
        let dense = l1_coherence(&density_from_pure(&psi)?);
        identity_err = identity_err.max((l1_coherence_pure(&psi) - dense).abs());
    }

    let mut antisym_err = 0.0f64;
    for &g in &gammas {
        let plus = rg_step_xy(XYCouplings::unit(g))?.gamma;
        let minus = rg_step_xy(XYCouplings::unit(-g))?.gamma;
        antisym_err = antisym_err.max((plus + minus).abs());
    }
    let fixed_err = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&g| rg_step_xy(XYCouplings::unit(g)).map(|c| (c.gamma - g).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(vec![
        Check::new(
            &format!("closed-form psi0 vs numeric even-parity ground state ({} gamma points)", gammas.len()),
            psi_err,
            tol,
            "amplitude error",
        ),
        Check::new("closed-form E0 vs lowest eigenvalue", energy_err, tol.min(1e-10), "relative error"),
        Check::new("parity sectors of the ground doublet", parity_err, tol, "|<P> -/+ 1|"),
        Check::new("psi0 coefficient normalization", norm_err, tol, "|norm^2 - 1|"),
        Check::new("pure-state coherence identity (100 random states)", identity_err, tol, "difference"),
        Check::new("gamma' antisymmetry", antisym_err, tol, "|gamma'(g) + gamma'(-g)|"),
        Check::new("gamma flow fixed points {-1, 0, 1}", fixed_err, tol.max(1e-6), "|gamma' - gamma|"),
    ])
}
