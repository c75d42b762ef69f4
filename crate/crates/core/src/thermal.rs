//! Closed-form thermal-state quantities: classical partition function
//! and entropy, the ℏ² coefficient of ln Z, and the thermal entropy
//! series from canonical expectation values alone.
//!
//! Everything here uses the dx·dp/(2πℏ) measure of the grid; with that
//! choice the harmonic-oscillator benchmarks close exactly
//! (Z_cl = 1/(βℏω), ln Z ≃ −ln(βℏω) − (βℏω)²/24).

use crate::entropy::EntropySeries;
use crate::error::{Error, Result};
use crate::phase_space::{same_grid, Field2D, Grid2D};
use crate::wigner::{classical_boltzmann, classical_hamiltonian_field, eta_field, ThermalSpec};

const MODULE: &str = "thermal_closed_form";

/// Z_cl = ∫ dx dp/(2πℏ) e^{−βε}.
pub fn z_classical(thermal: &ThermalSpec, grid: Grid2D) -> Result<f64> {
    let eps = classical_hamiltonian_field(thermal, grid);
    let beta = thermal.beta;
    let w = eps.map(|e| (-beta * e).exp());
    crate::wigner::check_coverage(&w, "z_classical_coverage")?;
    Ok(w.integrate())
}

/// ⟨f⟩ with respect to the classical canonical distribution.
pub fn canonical_expectation(f: &Field2D, thermal: &ThermalSpec, grid: Grid2D) -> Result<f64> {
    if f.grid() != &grid {
        return Err(Error::config(MODULE, "grid_match", "field grid differs from requested grid"));
    }
    let c0 = classical_boltzmann(thermal, grid)?;
    canonical_expectation_given(f, &c0)
}

/// Same, reusing an already-normalized Boltzmann weight.
pub(crate) fn canonical_expectation_given(f: &Field2D, c0: &Field2D) -> Result<f64> {
    same_grid(f, c0)?;
    Ok(f.zip(c0, |a, b| a * b)?.integrate())
}

/// Classical entropy from energy and free energy:
/// S_cl = β⟨ε⟩ + ln Z_cl.
pub fn s_classical(thermal: &ThermalSpec, grid: Grid2D) -> Result<f64> {
    let eps = classical_hamiltonian_field(thermal, grid);
    let c0 = classical_boltzmann(thermal, grid)?;
    let mean_eps = canonical_expectation_given(&eps, &c0)?;
    let z = z_classical(thermal, grid)?;
    Ok(thermal.beta * mean_eps + z.ln())
}

/// (Z_cl, ζ₂) with ln Z_q = ln Z_cl − ℏ²·ζ₂ + o(ℏ²) and ζ₂ = ⟨η⟩.
pub fn zq_expansion(thermal: &ThermalSpec, grid: Grid2D) -> Result<(f64, f64)> {
    let z = z_classical(thermal, grid)?;
    let c0 = classical_boltzmann(thermal, grid)?;
    let eta = eta_field(thermal, grid);
    let zeta2 = canonical_expectation_given(&eta, &c0)?;
    Ok((z, zeta2))
}

/// Thermal entropy series from canonical averages:
/// s0 = S_cl, s1 = 0, s2 = −[(1 − β⟨ε⟩)⟨η⟩ + β⟨εη⟩].
///
/// Odd orders vanish identically for equilibrium states, so s1 is 0 by
/// construction rather than computed.
pub fn s_thermal_series(thermal: &ThermalSpec, grid: Grid2D) -> Result<EntropySeries> {
    let beta = thermal.beta;
    let eps = classical_hamiltonian_field(thermal, grid);
    let c0 = classical_boltzmann(thermal, grid)?;
    let eta = eta_field(thermal, grid);

    let mean_eps = canonical_expectation_given(&eps, &c0)?;
    let mean_eta = canonical_expectation_given(&eta, &c0)?;
    let eps_eta = eps.zip(&eta, |a, b| a * b)?;
    let mean_eps_eta = canonical_expectation_given(&eps_eta, &c0)?;

    let z = z_classical(thermal, grid)?;
    let s0 = beta * mean_eps + z.ln();
    let s2 = -((1.0 - beta * mean_eps) * mean_eta + beta * mean_eps_eta);
    Ok(EntropySeries {
        s0,
        s1: 0.0,
        s2,
    })
}
