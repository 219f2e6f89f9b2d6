//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rse_core::emfield::{
    conjugate_momentum, hamiltonian_density, integrate, jones_normalize, lagrangian_density, pol_state_vector,
    JonesVector, PolState,
};
use rse_core::evolvers::{chain_consistency, rse_evolve, wave_evolve, RseState, WaveState};
use rse_core::fieldcore::{commutator_residual, make_plane_wave, normalize, relative_l2};
use rse_core::gravwave::{
    basis_tensors, frobenius_inner, frobenius_inner_complex, gauge_constraint_residual, gw_evolve,
    gw_madelung_and_expectations, gw_normalize, helicity_tensor, rotate_about_z, rotate_complex_about_z, GWState,
};
use rse_core::madelung::{
    decompose, default_rho_min, expectations, hj_residuals, poynting_divergence, DEFAULT_PROBE_OMEGA_DT,
};
use rse_core::reference::free_gaussian;
use rse_core::scenario::registry::SCENARIOS;
use rse_core::{Grid1D, LabError, PhysParams, ScalarField};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(checks: &[(&str, f64, f64)]) -> Verdict {
    let passed = checks.iter().all(|&(_, v, tol)| v <= tol);
    let detail = checks
        .iter()
        .map(|(name, v, tol)| format!("{name}={v:.2e}<={tol:.0e}"))
        .collect::<Vec<_>>()
        .join(", ");
    Verdict { passed, detail }
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

fn periodic(n: usize) -> Grid1D {
    Grid1D::new(n, 2.0 * PI).unwrap()
}

fn stationary_pair(psi: &ScalarField, p: &PhysParams) -> (ScalarField, ScalarField) {
    let f0 = normalize(psi).unwrap();
    let f1 = rse_evolve(&RseState::new(f0.clone(), *p), DEFAULT_PROBE_OMEGA_DT / p.omega()).psi;
    (f0, f1)
}

fn standing(g: Grid1D, k: f64) -> ScalarField {
    ScalarField::from_fn(g, 0.0, |x| Complex64::new((k * x).cos(), 0.0)).unwrap()
}

fn criterion_1() -> Verdict {
    let mut worst: f64 = 0.0;
    for (c, hbar, w, length) in [(1.0, 1.0, 1.0, 2.0 * PI), (2.0, 0.7, 3.0, 4.0 * PI)] {
        let p = PhysParams::new(c, hbar, w).unwrap();
        let g = Grid1D::new(256, length).unwrap();
        let psi = make_plane_wave(g, &p, p.wavenumber(), 0.0, Complex64::new(1.0, 0.0)).unwrap();
        worst = worst.max(chain_consistency(&psi, &p).unwrap().max());
    }
    verdict(&[("chain_max", worst, 1e-10)])
}

fn criterion_2() -> Verdict {
    let p = PhysParams::new(1.5, 0.8, 2.0).unwrap();
    // diffusion constant from the effective mass, hbar / 2m*
    let d = p.hbar() / (2.0 * p.hbar() * p.omega() / (2.0 * p.c() * p.c()));
    let g = Grid1D::new(512, 40.0).unwrap();
    let t = 1.0 / p.omega();
    let psi0 = free_gaussian(g, 1.0, 20.0, 1.0, d, 0.0).unwrap();
    let n0 = psi0.norm_squared();
    let mut s = RseState::new(psi0.clone(), p);
    let mut drift: f64 = 0.0;
    for _ in 0..1000 {
        s = rse_evolve(&s, t / 1000.0);
        drift = drift.max((s.psi.norm_squared() - n0).abs() / n0);
    }
    let oracle = free_gaussian(g, 1.0, 20.0, 1.0, d, t).unwrap();
    let single = rse_evolve(&RseState::new(psi0, p), t).psi;
    verdict(&[
        ("norm_drift", drift, 1e-12),
        ("oracle_l2", relative_l2(&single, &oracle).unwrap(), 1e-8),
        ("stepped_oracle_l2", relative_l2(&s.psi, &oracle).unwrap(), 1e-8),
    ])
}

fn criterion_3() -> Verdict {
    let p = PhysParams::new(1.0, 1.0, 2.0).unwrap();
    let pw = make_plane_wave(periodic(256), &p, 2.0, 0.0, Complex64::new(1.0, 0.0)).unwrap();
    let (a0, a1) = stationary_pair(&pw, &p);
    let r = hj_residuals(&a0, &a1, &p, default_rho_min(&a0)).unwrap();
    let unit = p.hbar() * p.omega();
    let q_plane = max_abs(r.q_field.iter().flatten().copied()) / unit;

    let ps = PhysParams::natural(1.0).unwrap();
    let (b0, b1) = stationary_pair(&standing(periodic(512), 1.0), &ps);
    let rho_min = default_rho_min(&b0);
    let s = hj_residuals(&b0, &b1, &ps, rho_min).unwrap();
    let m = decompose(&b0, rho_min).unwrap();
    let rho_max = m.rho().iter().copied().fold(0.0, f64::max);
    let lobe = m
        .rho()
        .iter()
        .zip(&s.q_field)
        .filter(|(&r, _)| r >= 1e-2 * rho_max)
        .map(|(_, q)| (q.unwrap() - ps.hbar() * ps.omega()).abs() / (ps.hbar() * ps.omega()))
        .fold(0.0, f64::max);
    verdict(&[
        ("plane_hj", r.hj_residual, 1e-10),
        ("plane_continuity", r.continuity_residual, 1e-10),
        ("plane_identity", r.hamiltonian_identity_residual, 1e-10),
        ("plane_Q", q_plane, 1e-12),
        ("standing_Q_lobes", lobe, 1e-6),
        ("standing_hj", s.hj_residual, 1e-6),
    ])
}

fn criterion_4() -> Verdict {
    let p = PhysParams::new(1.0, 1.3, 3.0).unwrap();
    let unit = p.hbar() * p.omega();
    let k = p.wavenumber();
    let pw = make_plane_wave(periodic(256), &p, k, 0.0, Complex64::new(1.0, 0.0)).unwrap();
    let (a0, a1) = stationary_pair(&pw, &p);
    let e = expectations(&a0, &a1, &p).unwrap();

    let gw = GWState::from_fields(&pw, &pw, p).unwrap();
    let gw = gw_normalize(&gw).unwrap();
    let gw_later = gw_evolve(&gw, DEFAULT_PROBE_OMEGA_DT / p.omega());
    let r = gw_madelung_and_expectations(&gw, &gw_later).unwrap();

    let (s0, s1) = stationary_pair(&standing(periodic(256), k), &p);
    let es = expectations(&s0, &s1, &p).unwrap();
    let sw = standing(periodic(256), k);
    let gws = gw_normalize(&GWState::from_fields(&sw, &sw, p).unwrap()).unwrap();
    let rs = gw_madelung_and_expectations(&gws, &gw_evolve(&gws, DEFAULT_PROBE_OMEGA_DT / p.omega())).unwrap();
    verdict(&[
        ("scalar_E", (e.energy - unit).abs() / unit, 1e-8),
        ("scalar_p", (e.momentum - p.hbar() * k).abs() / (p.hbar() * k), 1e-8),
        ("gw_E", (r.energy_expectation - unit).abs() / unit, 1e-8),
        ("gw_p", (r.momentum_expectation - p.hbar() * k).abs() / (p.hbar() * k), 1e-8),
        ("standing_p", es.momentum.abs() / (p.hbar() * k), 1e-10),
        ("gw_standing_p", rs.momentum_expectation.abs() / (p.hbar() * k), 1e-10),
    ])
}

fn criterion_5() -> Verdict {
    let p = PhysParams::natural(2.0).unwrap();
    let pw = make_plane_wave(periodic(256), &p, 2.0, 0.0, Complex64::new(1.0, 0.0)).unwrap();
    let (a0, a1) = stationary_pair(&pw, &p);
    let plane = poynting_divergence(&a0, &a1, &p, None).unwrap().divergence_residual;
    let (b0, b1) = stationary_pair(&standing(periodic(256), 2.0), &p);
    let stand = poynting_divergence(&b0, &b1, &p, None).unwrap().divergence_residual;

    let g = Grid1D::new(512, 40.0).unwrap();
    // rse-evolved past its waist, where the density changes at first order in time
    let waist = free_gaussian(g, 1.0, 20.0, 0.0, p.dispersion_coefficient(), 0.0).unwrap();
    let packet = rse_evolve(&RseState::new(waist, p), 1.0 / p.omega()).psi;
    let later = rse_evolve(&RseState::new(packet.clone(), p), DEFAULT_PROBE_OMEGA_DT / p.omega()).psi;
    let raised = matches!(
        poynting_divergence(&packet, &later, &p, None),
        Err(LabError::NotStationary { .. })
    );
    let mut v = verdict(&[("plane", plane, 1e-10), ("standing", stand, 1e-10)]);
    v.passed &= raised;
    v.detail.push_str(&format!(", gaussian_not_stationary={raised}"));
    v
}

fn criterion_6() -> Verdict {
    let (plus, cross) = basis_tensors();
    let basis = [plus, cross];
    let mut ortho: f64 = 0.0;
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate() {
            ortho = ortho.max((frobenius_inner(x, y) - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    let states = [plus.to_complex(), cross.to_complex(), helicity_tensor(1.0), helicity_tensor(-1.0)];
    let mut iso: f64 = 0.0;
    let mut hel: f64 = 0.0;
    for theta in [PI / 8.0, PI / 4.0, 1.0] {
        for x in &states {
            for y in &states {
                let a = frobenius_inner_complex(x, y);
                let b = frobenius_inner_complex(&rotate_complex_about_z(x, theta), &rotate_complex_about_z(y, theta));
                iso = iso.max((a - b).norm());
            }
        }
        for sign in [1.0, -1.0] {
            let e = helicity_tensor(sign);
            let diff = rotate_complex_about_z(&e, theta) - e * Complex64::from_polar(1.0, -2.0 * sign * theta);
            hel = hel.max(diff.iter().fold(0.0, |m, z| m.max(z.norm())));
        }
    }
    let quarter = (rotate_about_z(&plus, PI / 4.0).matrix() - cross.matrix()).abs().max();
    verdict(&[
        ("orthonormality", ortho, 1e-15),
        ("isometry", iso, 1e-13),
        ("helicity_phase", hel, 1e-12),
        ("quarter_turn", quarter, 1e-15),
    ])
}

fn criterion_7() -> Verdict {
    let w = 1.7;
    let k = [w, 0.0, 0.0, w];
    let (plus, cross) = basis_tensors();
    let mut gauge: f64 = 0.0;
    for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.6, -0.8), (2.0, 3.0)] {
        gauge = gauge.max(gauge_constraint_residual(&plus.combine(a, &cross, b), &k).unwrap());
    }
    // alpha_{tz} = alpha_{zt} = d: k^nu alpha_{nu t} = k^z d = w d, same for mu = z; trace unchanged
    let d = 0.3;
    let bent = plus.with_component(0, 3, d).with_component(3, 0, d);
    let r = gauge_constraint_residual(&bent, &k).unwrap();
    let mut v = verdict(&[("tt_gauge", gauge, 1e-15), ("non_tt_vs_hand", (r - w * d).abs(), 1e-12)]);
    v.passed &= r > 0.0;
    v
}

fn criterion_8() -> Verdict {
    let residual = |n: usize| {
        let g = Grid1D::new(n, 10.0).unwrap();
        let f = ScalarField::from_fn(g, 0.0, |x| Complex64::new((-(x - 5.0).powi(2) / 2.0).exp(), 0.0)).unwrap();
        commutator_residual(&f, 0.1).unwrap()
    };
    let e: Vec<f64> = [64, 128, 256].iter().map(|&n| residual(n)).collect();
    verdict(&[
        ("|ratio_64_128-4|", (e[0] / e[1] - 4.0).abs(), 0.3),
        ("|ratio_128_256-4|", (e[1] / e[2] - 4.0).abs(), 0.3),
    ])
}

fn criterion_9() -> Verdict {
    let p = PhysParams::natural(2.0).unwrap();
    let g = periodic(128);
    let psi = make_plane_wave(g, &p, 2.0, 0.0, Complex64::new(1.0, 0.0)).unwrap();
    let dot = psi.scaled(Complex64::new(0.0, -2.0));
    let lag = max_abs(lagrangian_density(&psi, &dot).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut negative = 0usize;
    for _ in 0..100 {
        let mut random = || {
            let coeffs: Vec<Complex64> =
                (0..11).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            ScalarField::from_fn(g, 0.0, |x| {
                coeffs.iter().enumerate().map(|(m, c)| c * Complex64::from_polar(1.0, (m as f64 - 5.0) * x)).sum()
            })
            .unwrap()
        };
        let f = random();
        let v = random();
        negative += hamiltonian_density(&f, &conjugate_momentum(&v)).unwrap().iter().filter(|&&h| h < 0.0).count();
    }

    let packet = ScalarField::from_fn(g, 0.0, |x| Complex64::from_polar((-(x - PI).powi(2)).exp(), 3.0 * x)).unwrap();
    let dt = 0.2 * g.spacing();
    let steps = (10.0 * 2.0 * PI / (p.omega() * dt)).ceil() as usize;
    let mut state = WaveState::from_positive_frequencies(packet, dt, p).unwrap();
    let mut integrals = Vec::new();
    for _ in 0..steps {
        let next = wave_evolve(&state, 1).unwrap();
        let v: Vec<Complex64> = next
            .psi()
            .samples()
            .iter()
            .zip(state.psi_prev().samples())
            .map(|(a, b)| (a - b) / (2.0 * dt))
            .collect();
        let v = ScalarField::new(g, state.psi().time(), v).unwrap();
        let h = hamiltonian_density(state.psi(), &conjugate_momentum(&v)).unwrap();
        integrals.push(integrate(state.psi(), &h));
        state = next;
    }
    let drift = max_abs(integrals.iter().map(|h| h / integrals[0] - 1.0));

    let mut jones: f64 = 0.0;
    for theta in [0.0, 0.4, PI / 4.0, 1.3] {
        for chi in [0.0, PI / 2.0, 2.0] {
            let v = pol_state_vector(&PolState::new(0.1, theta, chi));
            jones = jones.max((v[0].norm_sqr() + v[1].norm_sqr() - 1.0).abs());
        }
    }
    let raw = JonesVector::new(Complex64::new(3.0, -1.0), Complex64::new(0.5, 4.0));
    jones = jones.max((jones_normalize(&raw).unwrap().intensity() - 1.0).abs());

    let mut v = verdict(&[
        ("lagrangian_null", lag / 4.0, 1e-12),
        ("int_H_drift_10_periods", drift, 1e-6),
        ("jones_norm", jones, 1e-12),
    ]);
    v.passed &= negative == 0;
    v.detail.push_str(&format!(", negative_H_samples={negative}"));
    v
}

fn criterion_10() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_rse-lab");
    let dir = tempfile::tempdir().unwrap();
    let mut identical = 0;
    let mut codes_ok = true;
    for info in SCENARIOS {
        let cfg = dir.path().join(format!("{}.toml", info.name));
        std::fs::write(&cfg, format!("scenario = \"{}\"\n", info.name)).unwrap();
        let mut bodies = Vec::new();
        for run in 0..2 {
            let report = dir.path().join(format!("{}-{run}.json", info.name));
            let out = Command::new(bin)
                .args(["run", cfg.to_str().unwrap(), "--report", report.to_str().unwrap()])
                .output()
                .unwrap();
            codes_ok &= out.status.code() == Some(0);
            let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
            v.as_object_mut().unwrap().remove("wall_time_seconds");
            v["config"]["output"]["report_path"] = serde_json::Value::Null;
            bodies.push(serde_json::to_string(&v).unwrap());
        }
        if bodies[0] == bodies[1] {
            identical += 1;
        }
    }
    let strict = dir.path().join("strict.toml");
    std::fs::write(&strict, "scenario = \"convergence_commutator\"\n").unwrap();
    let fail = Command::new(bin)
        .args(["run", strict.to_str().unwrap(), "--tolerance-scale", "1e-9"])
        .output()
        .unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "scenario = \"complementarity\"\nomega_2 = 1.0\n").unwrap();
    let broken = Command::new(bin).args(["run", bad.to_str().unwrap()]).output().unwrap();
    codes_ok &= fail.status.code() == Some(1) && broken.status.code() == Some(2);
    Verdict {
        passed: identical == SCENARIOS.len() && codes_ok,
        detail: format!(
            "identical_reports={identical}/{}, exit_codes_pass/fail/error={}",
            SCENARIOS.len(),
            if codes_ok { "0/1/2" } else { "WRONG" }
        ),
    }
}

fn main() -> ExitCode {
    #[allow(clippy::type_complexity)]
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("chain consistency", criterion_1),
        ("RSE unitarity and Gaussian oracle", criterion_2),
        ("Madelung / Hamilton-Jacobi", criterion_3),
        ("expectation values", criterion_4),
        ("Poynting theorem", criterion_5),
        ("polarization algebra", criterion_6),
        ("gauge condition", criterion_7),
        ("commutator convergence", criterion_8),
        ("appendix densities", criterion_9),
        ("CLI determinism and exit codes", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  [{}]",
            i + 1,
            name,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {}/10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
