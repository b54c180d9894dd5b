//! Acceptance gate: every criterion is evaluated at its stated tolerance and
//! prints a single `[PASS]` / `[FAIL]` line. The process exits non-zero when
//! any criterion fails.
//!
//! Run with `cargo test -p qrg-validation --test acceptance`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrg_coherence::analysis::{
    find_peak, run_sweep, scaling_analysis, select_series, Grid, Model, Subsystem, SweepSpec,
};
use qrg_coherence::coherence::{l1_coherence, l1_coherence_pure, subsystem_coherence};
use qrg_coherence::groundstate::{eigh, select_ground_xy_sector, sign_fix};
use qrg_coherence::ising::{fixed_point, g_prime, ising_ground, DEFAULT_BRACKET};
use qrg_coherence::spinops::{
    density_from_pure, partial_trace, pauli, pauli_string, sites, Axis, Operator, PureState, SiteIndex,
};
use qrg_coherence::xy::{block_hamiltonian_xy, ground_energy_xy, psi0_closed_form, rg_step_xy, XYCouplings};

struct Outcome {
    ok: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn full_block_peaks(model: Model, steps: &[usize], subsystem: &Subsystem) -> Vec<f64> {
    let spec = SweepSpec::new(model, model.default_grid(), steps.to_vec(), vec![subsystem.clone()]);
    let rows = run_sweep(&spec).unwrap();
    steps.iter().map(|&n| find_peak(&select_series(&rows, n, subsystem)).unwrap().x_max).collect()
}

fn criterion_1_appendix_oracle() -> Outcome {
    let gammas: Vec<f64> = (0..50).map(|k| 1e-3 + (1.0 - 1e-3) * k as f64 / 49.0).collect();
    let mut psi_err = 0.0f64;
    let mut e_err = 0.0f64;
    for &g in &gammas {
        let c = XYCouplings::unit(g);
        let dec = eigh(&block_hamiltonian_xy(c).unwrap()).unwrap();
        let numeric = sign_fix(&select_ground_xy_sector(&dec, 1.0).unwrap().state);
        let closed = sign_fix(&psi0_closed_form(g).unwrap());
        let d = (numeric.amplitudes() - closed.amplitudes())
            .amax()
            .min((numeric.amplitudes() + closed.amplitudes()).amax());
        psi_err = psi_err.max(d);
        let e0 = ground_energy_xy(c);
        e_err = e_err.max((dec.ground_energy() - e0).abs() / e0.abs());
    }
    outcome(
        psi_err <= 1e-8 && e_err <= 1e-10,
        format!(
            "50 gamma points, max |psi0 error| = {psi_err:.2e} (<= 1e-8), max rel E0 error = {e_err:.2e} (<= 1e-10)"
        ),
    )
}

fn criterion_2_xy_saturation() -> Outcome {
    let spec = SweepSpec::new(Model::Xy, Model::Xy.default_grid(), vec![3, 4, 5], vec![Subsystem::All]);
    let rows = run_sweep(&spec).unwrap();
    let worst = rows.iter().filter(|r| r.bare.abs() >= 0.05).map(|r| (r.coherence - 15.0).abs()).fold(0.0, f64::max);
    let centers: Vec<f64> = rows.iter().filter(|r| r.bare == 0.0).map(|r| r.coherence).collect();
    let below = centers.iter().all(|&c| c < 15.0 - 0.1);
    outcome(
        worst <= 0.1 && below && centers.len() == 3,
        format!("steps 3-5: max |C - 15| for |gamma| >= 0.05 is {worst:.2e}; C(gamma = 0) = {centers:?}"),
    )
}

fn criterion_3_xy_exponent() -> Outcome {
    let (_, fit) = scaling_analysis(Model::Xy, Model::Xy.default_grid(), &[1, 2, 3, 4], &Subsystem::All).unwrap();
    outcome(
        (fit.theta - 1.36).abs() <= 0.05,
        format!("theta = {:.4} from the gamma = 0 slope over steps 1-4 (target 1.36 +/- 0.05)", fit.theta),
    )
}

fn criterion_4_ising_endpoints() -> Outcome {
    let fields = [1e-2, 1e-3, 1e-4, 1e-6];
    let small: Vec<f64> = fields.iter().map(|&g| l1_coherence_pure(&ising_ground(g).unwrap().state)).collect();
    let large = l1_coherence_pure(&ising_ground(1e3).unwrap().state);
    // Approach to 1 from above, ending inside the band.
    let decreasing = small.windows(2).all(|w| w[1] < w[0]);
    let limit = *small.last().unwrap();
    let ok = decreasing && limit >= 1.0 && (limit - 1.0).abs() <= 0.05 && (large - 31.0).abs() <= 0.5;
    outcome(ok, format!("C(g) at g = {fields:?} is {small:.6?}; C(g = 1e3) = {large:.4}"))
}

fn criterion_5a_fixed_point() -> Outcome {
    let fp = fixed_point(DEFAULT_BRACKET.0, DEFAULT_BRACKET.1).unwrap();
    outcome((fp.g_c - 1.835).abs() <= 1e-3, format!("g_c = {:.6} (target 1.835 +/- 0.001)", fp.g_c))
}

fn criterion_5b_nu() -> Outcome {
    let fp = fixed_point(DEFAULT_BRACKET.0, DEFAULT_BRACKET.1).unwrap();
    outcome((fp.nu - 0.63).abs() <= 5e-3, format!("nu = {:.5} (target 0.63 +/- 0.005)", fp.nu))
}

fn criterion_6_ising_peak_drift() -> Outcome {
    let steps = [1, 2, 3, 4, 5];
    let x = full_block_peaks(Model::Ising, &steps, &Subsystem::All);
    let approaching = x.windows(2).all(|w| (w[1] - 1.858).abs() < (w[0] - 1.858).abs());
    let gap = (x[4] - 1.858).abs();
    outcome(
        approaching && gap <= 0.02,
        format!("x_max over steps 1-5 = {x:.4?}; |x_max(5) - 1.858| = {gap:.4} (<= 0.02)"),
    )
}

fn criterion_7_ising_exponent() -> Outcome {
    let (_, fit) =
        scaling_analysis(Model::Ising, Model::Ising.default_grid(), &[1, 2, 3, 4, 5], &Subsystem::All).unwrap();
    outcome(
        (fit.theta - 0.84).abs() <= 0.05 && (fit.nu_from_theta - 0.59).abs() <= 0.04,
        format!(
            "theta = {:.4} (0.84 +/- 0.05), nu_from_theta = {:.4} (0.59 +/- 0.04), r^2 = {:.5}",
            fit.theta, fit.nu_from_theta, fit.r_squared
        ),
    )
}

fn criterion_8_marginal_detection() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (model, steps) in [(Model::Xy, vec![1, 2, 3, 4]), (Model::Ising, vec![1, 2, 3, 4, 5])] {
        let full = *full_block_peaks(model, &steps, &Subsystem::All).last().unwrap();
        for pair in ["1,2", "2,3"] {
            let sub: Subsystem = pair.parse().unwrap();
            let x = full_block_peaks(model, &steps, &sub);
            let last = *x.last().unwrap();
            ok &= (last - full).abs() <= 0.05;
            lines.push(format!("{model} {{{pair}}}: x_max(top) = {last:.4} vs full {full:.4}"));
        }
    }
    outcome(ok, lines.join("; "))
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> PureState {
    let v = DVector::from_fn(1 << n, |_, _| rng.gen_range(-1.0..1.0));
    PureState::normalized(n, v).unwrap()
}

fn pauli_algebra_holds() -> bool {
    let n = 3;
    let s = |m| SiteIndex::new(m).unwrap();
    let id = Operator::identity(n).unwrap();
    for axis in [Axis::X, Axis::Z] {
        let p = pauli(axis, s(2), n).unwrap();
        if (p.product(&p).unwrap() - id.matrix()).amax() > 1e-15 {
            return false;
        }
    }
    // X Z = -Z X on one site, commuting on different sites.
    let x = pauli(Axis::X, s(1), n).unwrap();
    let z1 = pauli(Axis::Z, s(1), n).unwrap();
    let z2 = pauli(Axis::Z, s(2), n).unwrap();
    let anti = x.product(&z1).unwrap() + z1.product(&x).unwrap();
    let comm = x.product(&z2).unwrap() - z2.product(&x).unwrap();
    // Y Y = -(X Z)(X Z) on a pair, i.e. sigma^y = i X Z.
    let yy = pauli_string(&[(Axis::Y, s(1)), (Axis::Y, s(3))], n).unwrap();
    let xx = pauli_string(&[(Axis::X, s(1)), (Axis::X, s(3))], n).unwrap();
    let zz = pauli_string(&[(Axis::Z, s(1)), (Axis::Z, s(3))], n).unwrap();
    let expected = -(xx.product(&zz).unwrap());
    anti.amax() < 1e-15 && comm.amax() < 1e-15 && (yy.matrix() - expected).amax() < 1e-15
}

fn partial_trace_laws_hold(rng: &mut ChaCha8Rng) -> bool {
    let psi = random_state(rng, 5);
    let rho = density_from_pure(&psi).unwrap();
    let keep3 = sites(&[1, 2, 3]).unwrap();
    let direct = partial_trace(&rho, &sites(&[1, 2]).unwrap()).unwrap();
    let nested = partial_trace(&partial_trace(&rho, &keep3).unwrap(), &sites(&[1, 2]).unwrap()).unwrap();
    let trace_ok = (direct.matrix().trace() - 1.0).abs() < 1e-12;
    let sym_ok = (direct.matrix() - direct.matrix().transpose()).amax() < 1e-14;
    let a = random_state(rng, 2);
    let b = random_state(rng, 3);
    let prod = PureState::new(5, kron(a.amplitudes(), b.amplitudes())).unwrap();
    let marg = partial_trace(&density_from_pure(&prod).unwrap(), &sites(&[1, 2]).unwrap()).unwrap();
    let expected = a.amplitudes() * a.amplitudes().transpose();
    trace_ok
        && sym_ok
        && (direct.matrix() - nested.matrix()).amax() < 1e-14
        && (marg.matrix() - expected).amax() < 1e-14
}

fn kron(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(a.len() * b.len(), |i, _| a[i / b.len()] * b[i % b.len()])
}

fn pure_identity_holds(rng: &mut ChaCha8Rng) -> bool {
    (0..100).all(|_| {
        let psi = random_state(rng, 5);
        let rho = density_from_pure(&psi).unwrap();
        (l1_coherence_pure(&psi) - l1_coherence(&rho)).abs() < 1e-10
    })
}

fn xy_flow_symmetries_hold() -> bool {
    let antisym = (0..=200).all(|k| {
        let g = -1.0 + k as f64 / 100.0;
        let plus = rg_step_xy(XYCouplings::unit(g)).unwrap().gamma;
        let minus = rg_step_xy(XYCouplings::unit(-g)).unwrap().gamma;
        (plus + minus).abs() < 1e-12
    });
    let fixed = [-1.0, 0.0, 1.0].iter().all(|&g| (rg_step_xy(XYCouplings::unit(g)).unwrap().gamma - g).abs() < 1e-12);
    antisym && fixed
}

fn g_prime_monotone() -> bool {
    let values: Vec<f64> = (0..=10_000).map(|k| g_prime(4.0 * k as f64 / 10_000.0)).collect();
    values.windows(2).all(|w| w[1] > w[0])
}

fn csv_deterministic() -> bool {
    let spec = SweepSpec::new(
        Model::Ising,
        Grid::new(0.5, 3.0, 51).unwrap(),
        vec![0, 2],
        vec![Subsystem::All, "2,3".parse().unwrap()],
    );
    let a = qrg_cli::output::rows_to_csv(&run_sweep(&spec).unwrap());
    let b = qrg_cli::output::rows_to_csv(&run_sweep(&spec).unwrap());
    a == b
}

fn criterion_9_property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let results = [
        ("pauli algebra", pauli_algebra_holds()),
        ("partial-trace laws", partial_trace_laws_hold(&mut rng)),
        ("pure-state coherence identity", pure_identity_holds(&mut rng)),
        ("gamma' antisymmetry and fixed points", xy_flow_symmetries_hold()),
        ("g' monotonicity", g_prime_monotone()),
        ("csv determinism", csv_deterministic()),
    ];
    let failed: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let psi = random_state(&mut rng, 5);
    let whole = subsystem_coherence(&psi, &[]).unwrap();
    let dense = l1_coherence(&density_from_pure(&psi).unwrap());
    outcome(
        failed.is_empty() && (whole - dense).abs() < 1e-10,
        if failed.is_empty() { format!("{} suites hold", results.len()) } else { format!("failing: {failed:?}") },
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1", criterion_1_appendix_oracle),
        ("2", criterion_2_xy_saturation),
        ("3", criterion_3_xy_exponent),
        ("4", criterion_4_ising_endpoints),
        ("5a", criterion_5a_fixed_point),
        ("5b", criterion_5b_nu),
        ("6", criterion_6_ising_peak_drift),
        ("7", criterion_7_ising_exponent),
        ("8", criterion_8_marginal_detection),
        ("9", criterion_9_property_suites),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let outcome = run();
        println!("[{}] criterion {id}: {}", if outcome.ok { "PASS" } else { "FAIL" }, outcome.detail);
        failed += usize::from(!outcome.ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
