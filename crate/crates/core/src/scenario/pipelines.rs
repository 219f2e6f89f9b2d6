//! One function per registered scenario.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{FieldKind, ScenarioConfig};
use super::csv::CsvData;
use super::{Recorder, ScenarioError, Stage};
use crate::emfield::{
    conjugate_momentum, hamiltonian_density, integrate, jones_normalize, lagrangian_density, momentum_density,
    pol_state_vector, product_state_intensity, JonesVector, PolState,
};
use crate::error::LabError;
use crate::evolvers::{chain_consistency, rse_evolve, wave_evolve, RseState, WaveState};
use crate::fieldcore::{
    commutator_residual, make_plane_wave, normalize, real_derivative, relative_l2, DerivOrder, Grid1D,
    ScalarField,
};
use crate::gravwave::{
    basis_from_outer_products, basis_tensors, build_h, frobenius_inner, frobenius_inner_complex,
    gauge_constraint_residual, gw_evolve, gw_inner, gw_madelung_and_expectations, gw_normalize, helicity_tensor,
    rotate_about_z, rotate_complex_about_z, tt_gauge_check, GWState, PolTensor,
};
use crate::madelung::{
    current_density, decompose, default_rho_min, expectations, hj_residuals, poynting_divergence, HJReport,
};
use crate::reference::free_gaussian;

/// Seed of the random fields in `appendix_densities`.
const APPENDIX_SEED: u64 = 0x5eed_f1e1d;
const RANDOM_FIELDS: usize = 100;
const HELICITY_ANGLES: [f64; 3] = [PI / 8.0, PI / 4.0, 1.0];

type Outcome = Result<(), ScenarioError>;

pub(super) fn run(name: &str, cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    match name {
        "appendix_densities" => appendix_densities(cfg, rec),
        "complementarity" => complementarity(cfg, rec),
        "convergence_commutator" => convergence_commutator(cfg, rec),
        "gw_graviton" => gw_graviton(cfg, rec),
        "gw_helicity" => gw_helicity(cfg, rec),
        "rse_gaussian_oracle" => rse_gaussian_oracle(cfg, rec),
        "standing_wave_quantum_potential" => standing_wave(cfg, rec),
        "tt_gauge_suite" => tt_gauge_suite(cfg, rec),
        other => unreachable!("unregistered scenario {other}"),
    }
}

/// Largest magnitude; NaN propagates so a broken metric cannot pass.
fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if m.is_nan() || v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

fn max_entry(m: &nalgebra::Matrix4<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn require_unit_c(cfg: &ScenarioConfig) -> Outcome {
    if cfg.physics.c != 1.0 {
        return Err(ScenarioError::Config {
            key: "physics.c".into(),
            message: format!("scenario `{}` works in units with c = 1", cfg.scenario),
        });
    }
    Ok(())
}

fn q_max(report: &HJReport, unit: f64) -> f64 {
    max_abs(report.q_field.iter().flatten().copied()) / unit
}

fn complementarity(cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let name = cfg.scenario.as_str();
    let params = cfg.params();
    let grid = cfg.periodic_grid(256)?;
    let k = cfg.field.k.unwrap_or(params.wavenumber());
    let amp = Complex64::new(cfg.field.amplitude.unwrap_or(1.0), 0.0);
    let psi = make_plane_wave(grid, &params, k, 0.0, amp).stage(name, "field construction")?;

    // classical reading: one field through all three equations
    let chain = chain_consistency(&psi, &params).stage(name, "chain consistency")?;
    rec.metric("chain_wave_residual", chain.wave);
    rec.metric("chain_rse_residual", chain.rse);
    rec.metric("chain_helmholtz_residual", chain.helmholtz);

    // quantum reading: the same field normalized, in polar form
    let psi_n = normalize(&psi).stage(name, "normalization")?;
    let later = rse_evolve(&RseState::new(psi_n.clone(), params), cfg.probe_dt()).psi;
    let rho_min = cfg.run.rho_min.unwrap_or_else(|| default_rho_min(&psi_n));
    let hj = hj_residuals(&psi_n, &later, &params, rho_min).stage(name, "Hamilton-Jacobi residuals")?;
    let unit = params.hbar() * params.omega();
    rec.metric("hj_residual", hj.hj_residual);
    rec.metric("continuity_residual", hj.continuity_residual);
    rec.metric("hamiltonian_identity_residual", hj.hamiltonian_identity_residual);
    rec.metric("quantum_potential_max", q_max(&hj, unit));

    let poynting = poynting_divergence(&psi_n, &later, &params, None).stage(name, "Poynting divergence")?;
    rec.metric("poynting_divergence_residual", poynting.divergence_residual);

    let ex = expectations(&psi_n, &later, &params).stage(name, "expectation values")?;
    let p_unit = params.hbar() * params.wavenumber();
    rec.metric("energy_relative_error", (ex.energy - unit).abs() / unit);
    rec.metric("momentum_relative_error", (ex.momentum - params.hbar() * k).abs() / p_unit);
    rec.metric(
        "expectation_imaginary_max",
        ex.energy_imag.abs().max(ex.momentum_imag.abs() * params.c()) / unit,
    );
    rec.expectation("energy", ex.energy);
    rec.expectation("momentum", ex.momentum);
    rec.expectation("expected_energy", unit);
    rec.expectation("expected_momentum", params.hbar() * k);
    rec.expectation("effective_mass", params.effective_mass());
    rec.expectation("hj_action_form_residual", hj.hj_action_form_residual);
    rec.expectation("poynting_flux_identity_residual", poynting.flux_identity_residual);
    rec.expectation("unmasked_points", hj.unmasked_points as f64);

    rec.dump("field.csv", CsvData::field(&psi));
    rec.dump("quantum_potential.csv", CsvData::samples(grid.coordinates(), hj.q_field));
    Ok(())
}

fn standing_wave(cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let name = cfg.scenario.as_str();
    let params = cfg.params();
    let grid = cfg.periodic_grid(512)?;
    let k = cfg.field.k.unwrap_or(params.wavenumber());
    crate::fieldcore::check_commensurate(&grid, k).stage(name, "field construction")?;
    let amp = cfg.field.amplitude.unwrap_or(1.0);
    let psi = ScalarField::from_fn(grid, 0.0, |x| Complex64::new(amp * (k * x).cos(), 0.0))
        .stage(name, "field construction")?;
    let psi_n = normalize(&psi).stage(name, "normalization")?;
    let later = rse_evolve(&RseState::new(psi_n.clone(), params), cfg.probe_dt()).psi;
    let rho_min = cfg.run.rho_min.unwrap_or_else(|| default_rho_min(&psi_n));

    let hj = hj_residuals(&psi_n, &later, &params, rho_min).stage(name, "Hamilton-Jacobi residuals")?;
    let unit = params.hbar() * params.omega();
    let polar = decompose(&psi_n, rho_min).stage(name, "polar decomposition")?;
    let rho_max = polar.rho().iter().copied().fold(0.0, f64::max);
    let lobe_error = polar
        .rho()
        .iter()
        .zip(&hj.q_field)
        .filter(|(&r, _)| r >= 1e-2 * rho_max)
        .filter_map(|(_, q)| q.map(|q| (q - unit).abs() / unit))
        .fold(0.0, f64::max);
    rec.metric("quantum_potential_lobe_error", lobe_error);
    rec.metric("hj_residual", hj.hj_residual);
    rec.metric("continuity_residual", hj.continuity_residual);

    let j_unit = params.hbar() / params.effective_mass() * rho_max * params.wavenumber();
    rec.metric("current_max", max_abs(current_density(&psi_n, &params)) / j_unit);
    let poynting = poynting_divergence(&psi_n, &later, &params, None).stage(name, "Poynting divergence")?;
    rec.metric("poynting_divergence_residual", poynting.divergence_residual);

    let ex = expectations(&psi_n, &later, &params).stage(name, "expectation values")?;
    rec.metric("energy_relative_error", (ex.energy - unit).abs() / unit);
    rec.metric("momentum_abs", ex.momentum.abs() / (params.hbar() * params.wavenumber()));
    rec.expectation("energy", ex.energy);
    rec.expectation("momentum", ex.momentum);
    rec.expectation("expected_quantum_potential", unit);
    rec.expectation("hamiltonian_identity_residual", hj.hamiltonian_identity_residual);
    rec.expectation("unmasked_points", hj.unmasked_points as f64);
    rec.note("Q is undefined at the nodes; masked samples are empty cells in quantum_potential.csv");

    rec.dump("field.csv", CsvData::field(&psi_n));
    rec.dump(
        "density.csv",
        CsvData::samples(grid.coordinates(), polar.rho().iter().map(|&r| Some(r)).collect()),
    );
    rec.dump("quantum_potential.csv", CsvData::samples(grid.coordinates(), hj.q_field));
    Ok(())
}

/// `sqrt(<a-b|a-b> / <b|b>)` for tensor states.
fn gw_relative_l2(a: &GWState, b: &GWState) -> crate::error::Result<f64> {
    let diff = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>();
    let d = GWState::new(
        *a.grid(),
        a.time(),
        diff(a.f_plus(), b.f_plus()),
        diff(a.f_cross(), b.f_cross()),
        *a.params(),
    )?;
    Ok((gw_inner(&d, &d)?.re / gw_inner(b, b)?.re).sqrt())
}

fn rse_gaussian_oracle(cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let name = cfg.scenario.as_str();
    let params = cfg.params();
    let grid = cfg.grid_or(512, 40.0)?;
    let sigma = cfg.field.sigma.unwrap_or(1.0);
    let center = cfg.field.center.unwrap_or(0.5 * grid.length());
    let k0 = cfg.field.k.unwrap_or(params.wavenumber());
    let steps = cfg.run.steps.unwrap_or(1000);
    let dt = cfg.run.dt.unwrap_or(1.0 / (params.omega() * steps as f64));
    let t_final = dt * steps as f64;
    let coeff = params.dispersion_coefficient();

    let psi0 = free_gaussian(grid, sigma, center, k0, coeff, 0.0).stage(name, "initial packet")?;
    let oracle = free_gaussian(grid, sigma, center, k0, coeff, t_final).stage(name, "closed-form packet")?;

    let (norm_drift, single_l2, stepped_l2, composition, final_field) = match cfg.kind_or(FieldKind::Gaussian) {
        FieldKind::GwGaussian => {
            let half = psi0.scaled(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
            let state = GWState::from_fields(&half, &half, params).stage(name, "tensor state")?;
            let half_oracle = oracle.scaled(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
            let target = GWState::from_fields(&half_oracle, &half_oracle, params).stage(name, "tensor oracle")?;
            let n0 = gw_inner(&state, &state).stage(name, "norm")?.re;
            let mut stepped = state.clone();
            let mut drift: f64 = 0.0;
            for _ in 0..steps {
                stepped = gw_evolve(&stepped, dt);
                let n = gw_inner(&stepped, &stepped).stage(name, "norm")?.re;
                drift = drift.max((n - n0).abs() / n0);
            }
            let single = gw_evolve(&state, t_final);
            (
                drift,
                gw_relative_l2(&single, &target).stage(name, "oracle comparison")?,
                gw_relative_l2(&stepped, &target).stage(name, "oracle comparison")?,
                gw_relative_l2(&stepped, &single).stage(name, "composition")?,
                single.plus_field(),
            )
        }
        _ => {
            let state = RseState::new(psi0.clone(), params);
            let n0 = psi0.norm_squared();
            let mut stepped = state.clone();
            let mut drift: f64 = 0.0;
            for _ in 0..steps {
                stepped = rse_evolve(&stepped, dt);
                drift = drift.max((stepped.psi.norm_squared() - n0).abs() / n0);
            }
            let single = rse_evolve(&state, t_final).psi;
            (
                drift,
                relative_l2(&single, &oracle).stage(name, "oracle comparison")?,
                relative_l2(&stepped.psi, &oracle).stage(name, "oracle comparison")?,
                relative_l2(&stepped.psi, &single).stage(name, "composition")?,
                single,
            )
        }
    };
    rec.metric("norm_drift", norm_drift);
    rec.metric("oracle_relative_l2", single_l2);
    rec.metric("stepped_oracle_relative_l2", stepped_l2);
    rec.metric("composition_residual", composition);

    // Probed after the waist: at t = 0 a packet with k0 = 0 has d rho/dt = 0.
    let later = rse_evolve(&RseState::new(oracle.clone(), params), cfg.probe_dt()).psi;
    let flagged = match poynting_divergence(&oracle, &later, &params, None) {
        Err(LabError::NotStationary { drift }) => {
            rec.expectation("stationarity_drift", drift);
            true
        }
        Ok(_) => false,
        Err(e) => return Err(e).stage(name, "stationarity check"),
    };
    rec.flag("not_stationary_raised", flagged);

    rec.expectation("final_time", t_final);
    rec.expectation("dispersion_coefficient", coeff);
    rec.expectation("effective_mass", params.effective_mass());
    rec.expectation("final_width", sigma * (1.0 + (coeff * t_final / (sigma * sigma)).powi(2)).sqrt());
    rec.expectation("group_velocity", 2.0 * coeff * k0);

    rec.dump("initial_field.csv", CsvData::field(&psi0));
    rec.dump("final_field.csv", CsvData::field(&final_field));
    rec.dump("oracle_field.csv", CsvData::field(&oracle));
    Ok(())
}

fn gw_graviton(cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let name = cfg.scenario.as_str();
    require_unit_c(cfg)?;
    let params = cfg.params();
    let grid = cfg.periodic_grid(256)?;
    let k = cfg.field.k.unwrap_or(params.wavenumber());
    let f = make_plane_wave(grid, &params, k, 0.0, Complex64::new(1.0, 0.0)).stage(name, "envelope")?;
    let raw = GWState::from_fields(&f, &f, params).stage(name, "tensor state")?;
    let state = gw_normalize(&raw).stage(name, "normalization")?;
    let norm = gw_inner(&state, &state).stage(name, "norm")?.re;
    rec.metric("norm_error", (norm - 1.0).abs());

    let later = gw_evolve(&state, cfg.probe_dt());
    let report = gw_madelung_and_expectations(&state, &later).stage(name, "polar diagnostics")?;
    let unit = params.hbar() * params.omega();
    rec.metric("hj_residual", report.hj_residual);
    rec.metric("continuity_residual", report.continuity_residual);
    rec.metric("hamiltonian_identity_residual", report.hamiltonian_identity_residual);
    rec.metric("quantum_potential_max", q_max(&report, unit));
    rec.metric("energy_relative_error", (report.energy_expectation - unit).abs() / unit);
    rec.metric(
        "momentum_relative_error",
        (report.momentum_expectation - params.hbar() * k).abs() / unit,
    );

    let steps = cfg.run.steps.unwrap_or(100);
    let dt = 10.0 * 2.0 * PI / params.omega() / steps as f64;
    let mut evolved = state.clone();
    let mut drift: f64 = 0.0;
    for _ in 0..steps {
        evolved = gw_evolve(&evolved, dt);
        drift = drift.max((gw_inner(&evolved, &evolved).stage(name, "norm")?.re - 1.0).abs());
    }
    rec.metric("evolve_norm_drift", drift);

    rec.expectation("energy", report.energy_expectation);
    rec.expectation("momentum", report.momentum_expectation);
    rec.expectation("expected_energy", unit);
    rec.expectation("expected_momentum", params.hbar() * k);
    rec.expectation("effective_mass", params.effective_mass());
    rec.expectation("unmasked_points", report.unmasked_points as f64);
    rec.dump("plus_envelope.csv", CsvData::field(&state.plus_field()));
    rec.dump("quantum_potential.csv", CsvData::samples(grid.coordinates(), report.q_field));
    Ok(())
}

fn gw_helicity(_cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let (plus, cross) = basis_tensors();
    let basis = [plus, cross];
    let mut ortho: f64 = 0.0;
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate() {
            let delta = if a == b { 1.0 } else { 0.0 };
            ortho = ortho.max((frobenius_inner(x, y) - delta).abs());
        }
    }
    rec.metric("basis_orthonormality", ortho);

    let (plus_op, cross_op) = basis_from_outer_products();
    let agreement = (plus_op.matrix() - plus.matrix())
        .abs()
        .max()
        .max((cross_op.matrix() - cross.matrix()).abs().max());
    rec.metric("basis_construction_agreement", agreement);

    let states = [plus.to_complex(), cross.to_complex(), helicity_tensor(1.0), helicity_tensor(-1.0)];
    let mut isometry: f64 = 0.0;
    let mut helicity: f64 = 0.0;
    for &theta in &HELICITY_ANGLES {
        let rotated: Vec<_> = states.iter().map(|s| rotate_complex_about_z(s, theta)).collect();
        for (x, rx) in states.iter().zip(&rotated) {
            for (y, ry) in states.iter().zip(&rotated) {
                let before = frobenius_inner_complex(x, y);
                let after = frobenius_inner_complex(rx, ry);
                isometry = isometry.max((after - before).norm());
            }
        }
        for sign in [1.0, -1.0] {
            let e = helicity_tensor(sign);
            let expected = e * Complex64::from_polar(1.0, -2.0 * sign * theta);
            helicity = helicity.max(max_entry(&(rotate_complex_about_z(&e, theta) - expected)));
        }
    }
    rec.metric("rotation_isometry", isometry);
    rec.metric("helicity_phase_error", helicity);

    let quarter = (rotate_about_z(&plus, PI / 4.0).matrix() - cross.matrix()).abs().max();
    rec.metric("quarter_turn_error", quarter);
    let mixed = plus.combine(0.3, &cross, -1.7);
    let half = [plus, cross, mixed]
        .iter()
        .map(|x| (rotate_about_z(x, PI).matrix() - x.matrix()).abs().max())
        .fold(0.0, f64::max);
    rec.metric("half_turn_error", half);
    for &theta in &HELICITY_ANGLES {
        let phase = Complex64::from_polar(1.0, -2.0 * theta);
        rec.expectation(&format!("helicity_phase_re_{theta:.6}"), phase.re);
        rec.expectation(&format!("helicity_phase_im_{theta:.6}"), phase.im);
    }
    Ok(())
}

fn tt_gauge_suite(cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let name = cfg.scenario.as_str();
    let omega = cfg.physics.omega;
    let k = [omega, 0.0, 0.0, omega];
    let (plus, cross) = basis_tensors();
    let mut tensors = vec![plus, cross];
    for (a, b) in [(1.0, 1.0), (0.5, -2.0), (-3.0, 0.25)] {
        tensors.push(plus.combine(a, &cross, b));
    }
    let mut built = Vec::new();
    for alpha in &tensors {
        for x in [[0.0, 0.0, 0.0, 0.0], [0.3, 1.0, -2.0, 0.7], [2.5, 0.0, 4.0, -1.2]] {
            built.push(build_h(alpha, &k, &x).stage(name, "building perturbations")?);
        }
    }
    let tt = tensors.iter().chain(&built).map(|t| tt_gauge_check(t).max()).fold(0.0, f64::max);
    rec.metric("tt_violation_max", tt);
    let mut gauge: f64 = 0.0;
    for t in tensors.iter().chain(&built) {
        gauge = gauge.max(gauge_constraint_residual(t, &k).stage(name, "gauge residual")?);
    }
    rec.metric("gauge_residual_max", gauge);

    // A t-z component breaks transversality: k^nu alpha_{nu 0} = k^3 alpha_{30} = omega delta,
    // likewise for mu = 3, and the trace stays zero.
    let delta = 0.25;
    let non_tt = plus.with_component(0, 3, delta).with_component(3, 0, delta);
    let residual = gauge_constraint_residual(&non_tt, &k).stage(name, "gauge residual")?;
    rec.metric("non_tt_residual_error", (residual - omega * delta).abs());
    rec.expectation("non_tt_residual", residual);
    rec.expectation("non_tt_expected", omega * delta);

    let rejected = matches!(
        gauge_constraint_residual(&plus, &[omega, 0.0, 0.0, 2.0 * omega]),
        Err(LabError::NonNullWavevector { .. })
    );
    rec.flag("non_null_rejected", rejected);
    rec.metric("wave_equation_residual", dalembertian_residual(&tensors[3], &k, omega).stage(name, "wave equation")?);
    Ok(())
}

/// Spectral `max |d_t^2 h - d_z^2 h| / (omega^2 max |h|)` over one period in t and z.
fn dalembertian_residual(alpha: &PolTensor, k: &[f64; 4], omega: f64) -> crate::error::Result<f64> {
    let n = 32;
    let period = 2.0 * PI / omega;
    let coord = |i: usize| i as f64 * period / n as f64;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (mu, nu) in [(1, 1), (1, 2), (2, 2)] {
        let mut h = vec![vec![0.0; n]; n];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = build_h(alpha, k, &[coord(i), 0.0, 0.0, coord(j)])?.get(mu, nu);
            }
        }
        let d_zz: Vec<Vec<f64>> = h.iter().map(|row| real_derivative(row, period, DerivOrder::Second)).collect();
        for j in 0..n {
            let column: Vec<f64> = h.iter().map(|row| row[j]).collect();
            let d_tt = real_derivative(&column, period, DerivOrder::Second);
            for i in 0..n {
                worst = worst.max((d_tt[i] - d_zz[i][j]).abs());
                scale = scale.max(h[i][j].abs());
            }
        }
    }
    Ok(worst / (omega * omega * scale))
}

fn random_smooth_field(rng: &mut ChaCha8Rng, grid: Grid1D) -> ScalarField {
    let modes: Vec<(f64, Complex64)> = (-8i32..=8)
        .map(|m| {
            let weight = (-(m * m) as f64 / 16.0).exp();
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * weight;
            (m as f64 * grid.fundamental_wavenumber(), c)
        })
        .collect();
    ScalarField::from_fn(grid, 0.0, |x| {
        modes.iter().map(|(k, c)| c * Complex64::from_polar(1.0, k * x)).sum()
    })
    .expect("finite by construction")
}

fn appendix_densities(cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let name = cfg.scenario.as_str();
    require_unit_c(cfg)?;
    let params = cfg.params();
    let omega = params.omega();
    let grid = cfg.periodic_grid(128)?;
    let amp = cfg.field.amplitude.unwrap_or(1.0);

    let psi = make_plane_wave(grid, &params, omega, 0.0, Complex64::new(amp, 0.0)).stage(name, "plane wave")?;
    let dot = psi.scaled(Complex64::new(0.0, -omega));
    let unit = omega * omega * amp * amp;
    let lag = lagrangian_density(&psi, &dot).stage(name, "Lagrangian density")?;
    rec.metric("lagrangian_null_max", max_abs(lag.iter().copied()) / unit);
    let ham = hamiltonian_density(&psi, &conjugate_momentum(&dot)).stage(name, "Hamiltonian density")?;
    rec.metric("hamiltonian_null_error", max_abs(ham.iter().map(|h| h / (2.0 * unit) - 1.0)));
    let g = momentum_density(&psi, &dot, &params).stage(name, "momentum density")?;
    rec.metric("momentum_density_error", max_abs(g.iter().map(|v| v / unit - 1.0)));

    let mut rng = ChaCha8Rng::seed_from_u64(APPENDIX_SEED);
    let mut h_min = f64::INFINITY;
    for _ in 0..RANDOM_FIELDS {
        let f = random_smooth_field(&mut rng, grid);
        let f_dot = random_smooth_field(&mut rng, grid);
        let h = hamiltonian_density(&f, &conjugate_momentum(&f_dot)).stage(name, "Hamiltonian density")?;
        h_min = h.iter().copied().fold(h_min, f64::min);
    }
    rec.flag("hamiltonian_nonnegative", h_min >= 0.0);
    rec.expectation("hamiltonian_min_random", h_min);

    // ten periods of a leapfrog run from a positive-frequency packet
    let packet = ScalarField::from_fn(grid, 0.0, |x| {
        let d = x - 0.5 * grid.length();
        Complex64::from_polar(amp * (-d * d / 0.5).exp(), 4.0 * x)
    })
    .stage(name, "packet")?;
    let dt = cfg.run.dt.unwrap_or(0.25 * grid.spacing());
    let steps = cfg.run.steps.unwrap_or((10.0 * 2.0 * PI / (omega * dt)).ceil() as usize);
    let mut state = WaveState::from_positive_frequencies(packet, dt, params).stage(name, "leapfrog setup")?;
    let mut h_integrals = Vec::with_capacity(steps);
    let mut energies = Vec::with_capacity(steps);
    let mut times = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = wave_evolve(&state, 1).stage(name, "leapfrog")?;
        let current = state.psi();
        let velocity: Vec<Complex64> = next
            .psi()
            .samples()
            .iter()
            .zip(state.psi_prev().samples())
            .map(|(a, b)| (a - b) / (2.0 * dt))
            .collect();
        let velocity = ScalarField::new(*current.grid(), current.time(), velocity).stage(name, "velocity")?;
        let h = hamiltonian_density(current, &conjugate_momentum(&velocity)).stage(name, "Hamiltonian density")?;
        h_integrals.push(integrate(current, &h));
        energies.push(state.energy());
        times.push(current.time());
        state = next;
    }
    let drift = |series: &[f64]| max_abs(series.iter().map(|v| v / series[0] - 1.0));
    rec.metric("hamiltonian_integral_drift", drift(&h_integrals));
    rec.metric("leapfrog_energy_drift", drift(&energies));
    rec.expectation("hamiltonian_integral", h_integrals[0]);
    rec.expectation("leapfrog_steps", steps as f64);
    rec.expectation("cfl", state.cfl());

    let mut jones: f64 = 0.0;
    let mut product: f64 = 0.0;
    let probe = random_smooth_field(&mut rng, grid);
    for &theta in &[0.0, 0.3, PI / 4.0, 1.2, PI / 2.0] {
        for &chi in &[0.0, PI / 2.0, -0.7, PI] {
            let pol = PolState::new(0.4, theta, chi);
            let v = pol_state_vector(&pol);
            jones = jones.max((v[0].norm_sqr() + v[1].norm_sqr() - 1.0).abs());
            jones = jones.max((JonesVector::from(pol).intensity() - 1.0).abs());
            let p = product_state_intensity(&probe, &pol).stage(name, "product state")?;
            product = product.max((p - 1.0).abs());
        }
    }
    for _ in 0..RANDOM_FIELDS {
        let raw = JonesVector::new(
            Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)),
            Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)),
        );
        let v = jones_normalize(&raw).stage(name, "Jones normalization")?;
        jones = jones.max((v.intensity() - 1.0).abs());
    }
    rec.metric("jones_norm_error", jones);
    rec.metric("product_state_norm_error", product);

    rec.dump(
        "hamiltonian_integral.csv",
        CsvData::samples(times, h_integrals.into_iter().map(Some).collect()),
    );
    rec.dump("lagrangian_null.csv", CsvData::samples(grid.coordinates(), lag.into_iter().map(Some).collect()));
    Ok(())
}

fn convergence_commutator(cfg: &ScenarioConfig, rec: &mut Recorder) -> Outcome {
    let name = cfg.scenario.as_str();
    let n0 = cfg.grid.n.unwrap_or(64);
    let length = cfg.grid.length.unwrap_or(10.0);
    let sigma = cfg.field.sigma.unwrap_or(1.0);
    let center = cfg.field.center.unwrap_or(0.5 * length);
    let margin = 0.1;
    let mut spacings = Vec::new();
    let mut residuals = Vec::new();
    for level in 0..3 {
        let grid = Grid1D::new(n0 << level, length).map_err(|e| ScenarioError::Config {
            key: "grid".into(),
            message: e.to_string(),
        })?;
        let f = ScalarField::from_fn(grid, 0.0, |x| {
            Complex64::new((-(x - center).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0)
        })
        .stage(name, "test field")?;
        let r = commutator_residual(&f, margin).stage(name, "commutator residual")?;
        rec.expectation(&format!("residual_n{}", grid.n()), r);
        spacings.push(grid.spacing());
        residuals.push(r);
    }
    let mut deviation: f64 = 0.0;
    for (i, pair) in residuals.windows(2).enumerate() {
        let ratio = pair[0] / pair[1];
        rec.expectation(&format!("ratio_{}", i + 1), ratio);
        deviation = max_abs([deviation, ratio - 4.0]);
    }
    rec.metric("ratio_deviation_max", deviation);
    rec.dump("convergence.csv", CsvData::samples(spacings, residuals.into_iter().map(Some).collect()));
    Ok(())
}
