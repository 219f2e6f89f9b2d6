//! Registered scenarios and their check sets.

use serde::Serialize;

use super::config::FieldKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Passes when the metric is at most `tolerance * scale`.
    AtMost,
    /// Passes when the metric equals 1 (a condition held). Not tunable.
    Flag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckSpec {
    pub name: &'static str,
    pub kind: CheckKind,
    /// Default tolerance; ignored for flags.
    pub tolerance: f64,
    pub description: &'static str,
}

const fn at_most(name: &'static str, tolerance: f64, description: &'static str) -> CheckSpec {
    CheckSpec {
        name,
        kind: CheckKind::AtMost,
        tolerance,
        description,
    }
}

const fn flag(name: &'static str, description: &'static str) -> CheckSpec {
    CheckSpec {
        name,
        kind: CheckKind::Flag,
        tolerance: 0.0,
        description,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// Keys that must be present in every config of this scenario.
    pub required_keys: &'static [&'static str],
    /// Optional keys this scenario reads; anything else is accepted but unused.
    pub used_keys: &'static [&'static str],
    pub field_kinds: &'static [FieldKind],
    pub checks: &'static [CheckSpec],
}

const REQUIRED: &[&str] = &["scenario"];

/// Alphabetical by name.
pub static SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "appendix_densities",
        description: "Lagrangian, Hamiltonian and momentum densities of the complex scalar; \
                      Hamiltonian conservation under leapfrog; Jones and product-state norms",
        required_keys: REQUIRED,
        used_keys: &["grid.n", "grid.length", "physics", "field.amplitude", "run.dt", "run.steps", "run.tolerances"],
        field_kinds: &[],
        checks: &[
            at_most("lagrangian_null_max", 1e-12, "max |L| / (omega^2 |A|^2) for a null plane wave"),
            at_most("hamiltonian_null_error", 1e-12, "max |H - 2 omega^2 |A|^2| relative, null plane wave"),
            at_most("momentum_density_error", 1e-12, "max |g - omega k |A|^2 / c| relative, null plane wave"),
            flag("hamiltonian_nonnegative", "H >= 0 at every sample of 100 random smooth fields"),
            at_most("hamiltonian_integral_drift", 1e-6, "max relative drift of int H over ten periods"),
            at_most("leapfrog_energy_drift", 1e-6, "max relative drift of the staggered leapfrog energy"),
            at_most("jones_norm_error", 1e-12, "max |<J|J> - 1| over normalized Jones and polarization vectors"),
            at_most("product_state_norm_error", 1e-12, "max |norm - 1| of field (x) polarization product states"),
        ],
    },
    ScenarioInfo {
        name: "complementarity",
        description: "One plane wave through the wave/RSE/Helmholtz chain, the polar form with its \
                      Hamilton-Jacobi and continuity equations, the Poynting theorem and <E>, <p>",
        required_keys: REQUIRED,
        used_keys: &["grid", "physics", "field.kind", "field.k", "field.amplitude", "run.delta_t_probe", "run.rho_min", "run.tolerances"],
        field_kinds: &[FieldKind::Plane],
        checks: &[
            at_most("chain_wave_residual", 1e-10, "relative residual of the wave equation"),
            at_most("chain_rse_residual", 1e-10, "relative residual of the Schrödinger-like equation"),
            at_most("chain_helmholtz_residual", 1e-10, "relative residual of the Helmholtz equation"),
            at_most("hj_residual", 1e-10, "Hamilton-Jacobi residual with quantum potential"),
            at_most("continuity_residual", 1e-10, "continuity equation residual"),
            at_most("hamiltonian_identity_residual", 1e-10, "max |H - (hbar omega + Q)| / (hbar omega)"),
            at_most("quantum_potential_max", 1e-12, "max |Q| / (hbar omega)"),
            at_most("poynting_divergence_residual", 1e-10, "relative max |div(E j)|"),
            at_most("energy_relative_error", 1e-8, "|<E> - hbar omega| / (hbar omega)"),
            at_most("momentum_relative_error", 1e-8, "|<p> - hbar k| / (hbar omega / c)"),
            at_most("expectation_imaginary_max", 1e-8, "largest imaginary part of <E>, <p> relative to hbar omega"),
        ],
    },
    ScenarioInfo {
        name: "convergence_commutator",
        description: "Second-order convergence of the discrete commutator [x, d] = i under grid halving",
        required_keys: REQUIRED,
        used_keys: &["grid.n", "grid.length", "field.kind", "field.sigma", "field.center", "run.tolerances"],
        field_kinds: &[FieldKind::Gaussian],
        checks: &[
            at_most("ratio_deviation_max", 0.3, "max |e(h) / e(h/2) - 4| over consecutive refinements"),
        ],
    },
    ScenarioInfo {
        name: "gw_graviton",
        description: "Monochromatic single-phase gravitational-wave state: polar form, Hamilton-Jacobi \
                      and continuity residuals, <E> = hbar omega and <p_z> = hbar k",
        required_keys: REQUIRED,
        used_keys: &["grid", "physics.hbar", "physics.omega", "field.kind", "field.k", "run.delta_t_probe", "run.rho_min", "run.steps", "run.tolerances"],
        field_kinds: &[FieldKind::GwPlane],
        checks: &[
            at_most("hj_residual", 1e-10, "Hamilton-Jacobi residual in action form"),
            at_most("continuity_residual", 1e-10, "continuity equation residual"),
            at_most("hamiltonian_identity_residual", 1e-10, "max |H - (hbar omega + Q)| / (hbar omega)"),
            at_most("quantum_potential_max", 1e-12, "max |Q| / (hbar omega)"),
            at_most("energy_relative_error", 1e-8, "|<E> - hbar omega| / (hbar omega)"),
            at_most("momentum_relative_error", 1e-8, "|<p_z> - hbar k| / (hbar omega)"),
            at_most("norm_error", 1e-13, "|<h|h> - 1| after normalization"),
            at_most("evolve_norm_drift", 1e-13, "max |<h|h>(t) - 1| over ten evolution periods"),
        ],
    },
    ScenarioInfo {
        name: "gw_helicity",
        description: "Orthonormal plus/cross basis, rotation isometry and helicity-2 phases about the propagation axis",
        required_keys: REQUIRED,
        used_keys: &["run.tolerances"],
        field_kinds: &[],
        checks: &[
            at_most("basis_orthonormality", 1e-15, "max |<e_a|e_b> - delta_ab|"),
            at_most("basis_construction_agreement", 1e-15, "outer-product basis against the explicit basis"),
            at_most("rotation_isometry", 1e-13, "max |<RX|RY> - <X|Y>| over basis and helicity states"),
            at_most("helicity_phase_error", 1e-12, "max |R(e_+ +- i e_x) - exp(-+2i theta)(e_+ +- i e_x)|"),
            at_most("quarter_turn_error", 1e-15, "max |R(pi/4) e_+ - e_x|"),
            at_most("half_turn_error", 1e-15, "max |R(pi) X - X| for transverse tensors"),
        ],
    },
    ScenarioInfo {
        name: "rse_gaussian_oracle",
        description: "Spectral RSE propagator against the closed-form free Gaussian: unitarity, \
                      composition, oracle agreement and the non-stationarity flag",
        required_keys: REQUIRED,
        used_keys: &["grid", "physics", "field.kind", "field.k", "field.sigma", "field.center", "run.dt", "run.steps", "run.delta_t_probe", "run.tolerances"],
        field_kinds: &[FieldKind::Gaussian, FieldKind::GwGaussian],
        checks: &[
            at_most("norm_drift", 1e-12, "max relative norm drift over repeated propagation"),
            at_most("oracle_relative_l2", 1e-8, "single-step propagation against the closed form"),
            at_most("stepped_oracle_relative_l2", 1e-8, "repeated propagation against the closed form"),
            at_most("composition_residual", 1e-10, "repeated against single-step propagation"),
            flag("not_stationary_raised", "the Poynting check refuses the spreading packet"),
        ],
    },
    ScenarioInfo {
        name: "standing_wave_quantum_potential",
        description: "Standing wave: Q = hbar omega on the lobes, Hamilton-Jacobi balance, zero current and <p> = 0",
        required_keys: REQUIRED,
        used_keys: &["grid", "physics", "field.kind", "field.k", "field.amplitude", "run.delta_t_probe", "run.rho_min", "run.tolerances"],
        field_kinds: &[FieldKind::Standing],
        checks: &[
            at_most("quantum_potential_lobe_error", 1e-6, "max |Q - hbar omega| / (hbar omega) where rho >= 1e-2 max rho"),
            at_most("hj_residual", 1e-6, "Hamilton-Jacobi residual on unmasked points"),
            at_most("continuity_residual", 1e-6, "continuity equation residual"),
            at_most("current_max", 1e-10, "max |j| relative to (hbar/m*) max(rho) k"),
            at_most("poynting_divergence_residual", 1e-10, "relative max |div(E j)|"),
            at_most("energy_relative_error", 1e-8, "|<E> - hbar omega| / (hbar omega)"),
            at_most("momentum_abs", 1e-10, "|<p>| / (hbar omega / c)"),
        ],
    },
    ScenarioInfo {
        name: "tt_gauge_suite",
        description: "TT-gauge and harmonic-gauge conditions for plane-wave tensors with k = (omega, 0, 0, omega)",
        required_keys: REQUIRED,
        used_keys: &["physics.omega", "run.tolerances"],
        field_kinds: &[],
        checks: &[
            at_most("tt_violation_max", 1e-15, "largest TT violation over the basis and built perturbations"),
            at_most("gauge_residual_max", 1e-15, "largest gauge-constraint residual over TT tensors"),
            at_most("non_tt_residual_error", 1e-12, "non-TT perturbation residual against the hand contraction"),
            flag("non_null_rejected", "a non-null wave vector is refused"),
            at_most("wave_equation_residual", 1e-10, "spectral d'Alembertian of the built perturbation"),
        ],
    },
];

pub fn find(name: &str) -> Option<&'static ScenarioInfo> {
    SCENARIOS.iter().find(|s| s.name == name)
}

/// `(name, description, required keys)` in alphabetical order.
pub fn list_scenarios() -> Vec<(&'static str, &'static str, &'static [&'static str])> {
    SCENARIOS.iter().map(|s| (s.name, s.description, s.required_keys)).collect()
}
