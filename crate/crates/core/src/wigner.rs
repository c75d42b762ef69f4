//! Construction of Wigner-function ℏ-expansions: thermal
//! (Wigner-Kirkwood) series, displaced two-component mixtures, and
//! user-supplied expansions.
//!
//! A series is stored as three real coefficient fields (c0, c1, c2)
//! with W ≃ c0 + ℏ·c1 + ℏ²·c2. For states with a classical counterpart
//! c0 is a probability density on the grid (nonnegative, unit
//! quadrature) and c1, c2 integrate to zero so the trace is 1 at every
//! order.

use crate::error::{Error, Result};
use crate::phase_space::{Field2D, Grid2D};
use crate::thermal;

const MODULE: &str = "wigner_states";

/// Zero-trace tolerance for series validation.
const TRACE_TOL: f64 = 1e-6;
const C0_NEGATIVITY_TOL: f64 = -1e-12;
/// Boundary-to-peak density ratio above which a grid is declared too
/// small to hold a state.
const COVERAGE_RATIO: f64 = 1e-12;
/// Allowed quadrature-mass loss when a series is shifted.
const SHIFT_MASS_TOL: f64 = 1e-9;

/// Shape of the external potential.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// U(x) = ½·m·ω²·x²
    Harmonic { omega: f64 },
    /// U(x) = ¼·g·x⁴
    Quartic { stiffness: f64 },
    /// Uniformly sampled table; derivatives by 4th-order finite
    /// differences, values between samples by cubic interpolation.
    Tabulated { xs: Vec<f64>, us: Vec<f64> },
}

/// One-dimensional particle: mass plus external potential with
/// analytic (or tabulated-and-differenced) U, U′, U″.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    mass: f64,
    kind: PotentialKind,
    // precomputed derivative tables for the tabulated case
    table_du: Vec<f64>,
    table_d2u: Vec<f64>,
}

impl PotentialSpec {
    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::config(MODULE, "mass_positive", format!("mass must be > 0, got {mass}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::config(MODULE, "omega_positive", format!("omega must be > 0, got {omega}")));
        }
        Ok(PotentialSpec {
            mass,
            kind: PotentialKind::Harmonic { omega },
            table_du: Vec::new(),
            table_d2u: Vec::new(),
        })
    }

    pub fn quartic(mass: f64, stiffness: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::config(MODULE, "mass_positive", format!("mass must be > 0, got {mass}")));
        }
        if !(stiffness > 0.0 && stiffness.is_finite()) {
            return Err(Error::config(
                MODULE,
                "stiffness_positive",
                format!("quartic stiffness must be > 0, got {stiffness}"),
            ));
        }
        Ok(PotentialSpec {
            mass,
            kind: PotentialKind::Quartic { stiffness },
            table_du: Vec::new(),
            table_d2u: Vec::new(),
        })
    }

    /// Tabulated potential on a uniform, strictly increasing abscissa.
    pub fn tabulated(mass: f64, xs: Vec<f64>, us: Vec<f64>) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::config(MODULE, "mass_positive", format!("mass must be > 0, got {mass}")));
        }
        if xs.len() != us.len() || xs.len() < 6 {
            return Err(Error::config(
                MODULE,
                "table_shape",
                format!("need matching xs/us with >= 6 samples, got {} and {}", xs.len(), us.len()),
            ));
        }
        if us.iter().any(|u| !u.is_finite()) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::config(MODULE, "table_finite", "table contains NaN or Inf"));
        }
        let h = xs[1] - xs[0];
        if h <= 0.0 {
            return Err(Error::config(MODULE, "table_increasing", "abscissae must be strictly increasing"));
        }
        for w in xs.windows(2) {
            let step = w[1] - w[0];
            if step <= 0.0 {
                return Err(Error::config(MODULE, "table_increasing", "abscissae must be strictly increasing"));
            }
            if (step - h).abs() > 1e-9 * h.abs() {
                return Err(Error::config(MODULE, "table_uniform", "abscissae must be uniformly spaced"));
            }
        }
        let table_du = derivative_1d(&us, h, 1);
        let table_d2u = derivative_1d(&us, h, 2);
        Ok(PotentialSpec {
            mass,
            kind: PotentialKind::Tabulated { xs, us },
            table_du,
            table_d2u,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// U(x)
    pub fn u(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Harmonic { omega } => 0.5 * self.mass * omega * omega * x * x,
            PotentialKind::Quartic { stiffness } => 0.25 * stiffness * x.powi(4),
            PotentialKind::Tabulated { xs, us } => interp_cubic(xs, us, x),
        }
    }

    /// U′(x)
    pub fn du(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Harmonic { omega } => self.mass * omega * omega * x,
            PotentialKind::Quartic { stiffness } => stiffness * x * x * x,
            PotentialKind::Tabulated { xs, .. } => interp_cubic(xs, &self.table_du, x),
        }
    }

    /// U″(x)
    pub fn d2u(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Harmonic { omega } => self.mass * omega * omega,
            PotentialKind::Quartic { stiffness } => 3.0 * stiffness * x * x,
            PotentialKind::Tabulated { xs, .. } => interp_cubic(xs, &self.table_d2u, x),
        }
    }
}

/// Canonical thermal state parameters: inverse temperature plus the
/// potential it equilibrates in.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSpec {
    pub beta: f64,
    pub potential: PotentialSpec,
}

impl ThermalSpec {
    pub fn new(beta: f64, potential: PotentialSpec) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::config(MODULE, "beta_positive", format!("beta must be > 0, got {beta}")));
        }
        Ok(ThermalSpec { beta, potential })
    }
}

/// ℏ-expansion of a Wigner function in the real-coefficient convention
/// W ≃ c0 + ℏ·c1 + ℏ²·c2.
#[derive(Debug, Clone)]
pub struct WignerSeries {
    c0: Field2D,
    c1: Field2D,
    c2: Field2D,
}

impl WignerSeries {
    /// Validating constructor; this is also the ingestion point for
    /// user-supplied expansions.
    ///
    /// Rejects series whose order-zero part is negative beyond
    /// tolerance, or whose coefficients violate the order-by-order
    /// trace conditions integrate(c0) = 1, integrate(c1) =
    /// integrate(c2) = 0.
    pub fn new(c0: Field2D, c1: Field2D, c2: Field2D) -> Result<Self> {
        crate::phase_space::same_grid(&c0, &c1)?;
        crate::phase_space::same_grid(&c0, &c2)?;
        c0.check_finite()?;
        c1.check_finite()?;
        c2.check_finite()?;
        let min0 = c0.min();
        if min0 < C0_NEGATIVITY_TOL {
            return Err(Error::config(
                MODULE,
                "c0_nonnegative",
                format!("c0 has negative values down to {min0:e}"),
            ));
        }
        let t0 = c0.integrate();
        if (t0 - 1.0).abs() > TRACE_TOL {
            return Err(Error::config(
                MODULE,
                "c0_normalized",
                format!("integrate(c0) = {t0}, expected 1"),
            ));
        }
        let t1 = c1.integrate();
        if t1.abs() > TRACE_TOL {
            return Err(Error::config(
                MODULE,
                "c1_traceless",
                format!("integrate(c1) = {t1}, expected 0"),
            ));
        }
        let t2 = c2.integrate();
        if t2.abs() > TRACE_TOL {
            return Err(Error::config(
                MODULE,
                "c2_traceless",
                format!("integrate(c2) = {t2}, expected 0"),
            ));
        }
        Ok(WignerSeries { c0, c1, c2 })
    }

    pub fn grid(&self) -> &Grid2D {
        self.c0.grid()
    }

    pub fn c0(&self) -> &Field2D {
        &self.c0
    }

    pub fn c1(&self) -> &Field2D {
        &self.c1
    }

    pub fn c2(&self) -> &Field2D {
        &self.c2
    }
}

/// Build a user-supplied series, validating every invariant.
pub fn custom_series(c0: Field2D, c1: Field2D, c2: Field2D) -> Result<WignerSeries> {
    WignerSeries::new(c0, c1, c2)
}

/// ε(x, p) = p²/2m + U(x) sampled on the grid.
pub fn classical_hamiltonian_field(thermal: &ThermalSpec, grid: Grid2D) -> Field2D {
    let inv_2m = 0.5 / thermal.potential.mass();
    Field2D::from_fn(grid, |x, p| p * p * inv_2m + thermal.potential.u(x))
}

/// Max boundary value / max value of a field; the grid-coverage figure.
fn boundary_ratio(f: &Field2D) -> f64 {
    let g = *f.grid();
    let mut edge_max = 0.0f64;
    for j in 0..g.np {
        edge_max = edge_max.max(f.get(0, j).abs()).max(f.get(g.nx - 1, j).abs());
    }
    for i in 0..g.nx {
        edge_max = edge_max.max(f.get(i, 0).abs()).max(f.get(i, g.np - 1).abs());
    }
    edge_max / f.max_abs().max(f64::MIN_POSITIVE)
}

pub(crate) fn check_coverage(f: &Field2D, check: &'static str) -> Result<()> {
    let r = boundary_ratio(f);
    if r < COVERAGE_RATIO {
        Ok(())
    } else {
        Err(Error::numerical(
            MODULE,
            check,
            format!("boundary density is {r:.3e} of the peak; enlarge the grid (target < {COVERAGE_RATIO:e})"),
        ))
    }
}

/// Normalized classical Boltzmann weight e^{−βε}/Z on the grid.
///
/// Normalization is numerical (this grid's quadrature), so
/// integrate(result) = 1 holds to roundoff by construction. Fails if
/// the grid does not cover the state.
pub fn classical_boltzmann(thermal: &ThermalSpec, grid: Grid2D) -> Result<Field2D> {
    let eps = classical_hamiltonian_field(thermal, grid);
    let beta = thermal.beta;
    let w = eps.map(|e| (-beta * e).exp());
    check_coverage(&w, "boltzmann_coverage")?;
    let z = w.integrate();
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::numerical(MODULE, "boltzmann_mass", format!("quadrature mass {z} is not positive")));
    }
    Ok(w.scaled(1.0 / z))
}

/// Wigner-Kirkwood kernel η(β, x, p) =
/// (β²/8m)·[U″ − (β/3)(U′)² − (β/3m)·p²·U″].
pub fn eta_field(thermal: &ThermalSpec, grid: Grid2D) -> Field2D {
    let beta = thermal.beta;
    let m = thermal.potential.mass();
    let pref = beta * beta / (8.0 * m);
    Field2D::from_fn(grid, |x, p| {
        let du = thermal.potential.du(x);
        let d2u = thermal.potential.d2u(x);
        pref * (d2u - beta / 3.0 * du * du - beta / (3.0 * m) * p * p * d2u)
    })
}

/// Thermal Wigner series: c0 the classical Boltzmann weight, c1 = 0
/// (odd orders vanish for equilibrium states), and
/// c2 = −c0·(η − ⟨η⟩) so that the ℏ² correction is traceless.
pub fn thermal_wigner_series(thermal: &ThermalSpec, grid: Grid2D) -> Result<WignerSeries> {
    let c0 = classical_boltzmann(thermal, grid)?;
    let eta = eta_field(thermal, grid);
    let eta_mean = thermal::canonical_expectation_given(&eta, &c0)?;
    let c2 = c0.zip(&eta, |w, e| -w * (e - eta_mean))?;
    WignerSeries::new(c0, Field2D::zeros(grid), c2)
}

/// Equal mixture of a series with its phase-space displacement:
/// every coefficient cₖ ↦ ½·cₖ(x, p) + ½·cₖ(x−x0, p−p0).
///
/// The shift uses cubic interpolation on the uniform grid (4th-order,
/// consistent with the derivative stencils); points displaced from
/// outside the grid are treated as zero, which is why the quadrature
/// mass of the shifted part is checked.
pub fn displaced_mixture_series(base: &WignerSeries, x0: f64, p0: f64) -> Result<WignerSeries> {
    if !(x0.is_finite() && p0.is_finite()) {
        return Err(Error::config(MODULE, "shift_finite", "displacement must be finite"));
    }
    let mass_before = base.c0().integrate();
    let s0 = shift_field(base.c0(), x0, p0);
    let mass_after = s0.integrate();
    if (mass_after - mass_before).abs() > SHIFT_MASS_TOL {
        return Err(Error::numerical(
            MODULE,
            "shift_mass_loss",
            format!(
                "shift ({x0}, {p0}) loses quadrature mass {:.3e}; shifted support leaves the grid",
                (mass_after - mass_before).abs()
            ),
        ));
    }
    let mix = |orig: &Field2D, shifted: Field2D| orig.zip(&shifted, |a, b| 0.5 * a + 0.5 * b);
    let c0 = mix(base.c0(), s0)?;
    check_coverage(&c0, "mixture_coverage")?;
    let c1 = mix(base.c1(), shift_field(base.c1(), x0, p0))?;
    let c2 = mix(base.c2(), shift_field(base.c2(), x0, p0))?;
    WignerSeries::new(c0, c1, c2)
}

/// f(x − x0, p − p0) by separable cubic Lagrange interpolation,
/// zero outside the grid.
pub fn shift_field(f: &Field2D, x0: f64, p0: f64) -> Field2D {
    let g = *f.grid();
    let (dx, dp) = (g.dx(), g.dp());
    let mut out = Field2D::zeros(g);
    for i in 0..g.nx {
        let u = (g.x(i) - x0 - g.x_min) / dx;
        let (ix, wx) = cubic_nodes(u);
        for j in 0..g.np {
            let v = (g.p(j) - p0 - g.p_min) / dp;
            let (jp, wp) = cubic_nodes(v);
            let mut acc = 0.0;
            for (a, &wa) in wx.iter().enumerate() {
                let si = ix + a as isize - 1;
                if wa == 0.0 || si < 0 || si >= g.nx as isize {
                    continue;
                }
                let mut row = 0.0;
                for (b, &wb) in wp.iter().enumerate() {
                    let sj = jp + b as isize - 1;
                    if wb == 0.0 || sj < 0 || sj >= g.np as isize {
                        continue;
                    }
                    row += wb * f.get(si as usize, sj as usize);
                }
                acc += wa * row;
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Base index and the four Lagrange weights for cubic interpolation at
/// fractional position `u` (grid units). The stencil covers nodes
/// base−1 ... base+2, and the weights reduce to (0, 1, 0, 0) exactly
/// when `u` sits on a node. Offsets within 1e-9 of a node are snapped
/// to it, so shifts by exact multiples of the spacing copy values
/// bit-for-bit instead of picking up index-arithmetic roundoff.
fn cubic_nodes(u: f64) -> (isize, [f64; 4]) {
    let nearest = u.round();
    if (u - nearest).abs() < 1e-9 {
        return (nearest as isize, [0.0, 1.0, 0.0, 0.0]);
    }
    let base = u.floor();
    let t = u - base;
    let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    (base as isize, [w0, w1, w2, w3])
}

/// 4th-order finite-difference derivative of a uniformly sampled 1D
/// table (same stencils as the 2D fields).
pub(crate) fn derivative_1d(values: &[f64], h: f64, order: u32) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    let at = |k: usize| values[k];
    match order {
        1 => {
            let s = 1.0 / (12.0 * h);
            out[0] = s * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
            out[1] = s * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4));
            for k in 2..n - 2 {
                out[k] = s * (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2));
            }
            let m = n - 1;
            out[m - 1] =
                s * (-at(m - 4) + 6.0 * at(m - 3) - 18.0 * at(m - 2) + 10.0 * at(m - 1) + 3.0 * at(m));
            out[m] = s
                * (3.0 * at(m - 4) - 16.0 * at(m - 3) + 36.0 * at(m - 2) - 48.0 * at(m - 1)
                    + 25.0 * at(m));
        }
        _ => {
            let s = 1.0 / (12.0 * h * h);
            out[0] = s
                * (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4)
                    - 10.0 * at(5));
            out[1] = s
                * (10.0 * at(0) - 15.0 * at(1) - 4.0 * at(2) + 14.0 * at(3) - 6.0 * at(4) + at(5));
            for k in 2..n - 2 {
                out[k] =
                    s * (-at(k - 2) + 16.0 * at(k - 1) - 30.0 * at(k) + 16.0 * at(k + 1) - at(k + 2));
            }
            let m = n - 1;
            out[m - 1] = s
                * (at(m - 5) - 6.0 * at(m - 4) + 14.0 * at(m - 3) - 4.0 * at(m - 2)
                    - 15.0 * at(m - 1)
                    + 10.0 * at(m));
            out[m] = s
                * (-10.0 * at(m - 5) + 61.0 * at(m - 4) - 156.0 * at(m - 3) + 214.0 * at(m - 2)
                    - 154.0 * at(m - 1)
                    + 45.0 * at(m));
        }
    }
    out
}

/// Cubic interpolation in a uniform table; clamps to the table range.
fn interp_cubic(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let h = xs[1] - xs[0];
    let u = ((x - xs[0]) / h).clamp(0.0, (xs.len() - 1) as f64);
    let (base, w) = cubic_nodes(u);
    let n = ys.len() as isize;
    let mut acc = 0.0;
    for (a, &wa) in w.iter().enumerate() {
        let k = (base + a as isize - 1).clamp(0, n - 1);
        acc += wa * ys[k as usize];
    }
    acc
}

/// Grid sizing guidance (documented helper, not enforced): ranges such
/// that β·U(x_edge) ≥ 40 and β·p²_edge/2m ≥ 40.
pub fn suggested_grid(thermal: &ThermalSpec, hbar: f64, nx: usize, np: usize) -> Result<Grid2D> {
    let beta = thermal.beta;
    let m = thermal.potential.mass();
    let x_edge = match thermal.potential.kind() {
        PotentialKind::Harmonic { omega } => (80.0 / (beta * m * omega * omega)).sqrt(),
        PotentialKind::Quartic { stiffness } => (160.0 / (beta * stiffness)).powf(0.25),
        PotentialKind::Tabulated { xs, .. } => xs[xs.len() - 1].abs().max(xs[0].abs()),
    };
    let p_edge = (80.0 * m / beta).sqrt();
    Grid2D::new(-x_edge, x_edge, nx, -p_edge, p_edge, np, hbar)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_thermal() -> ThermalSpec {
        ThermalSpec::new(1.0, PotentialSpec::harmonic(1.0, 1.0).unwrap()).unwrap()
    }

    fn test_grid() -> Grid2D {
        suggested_grid(&harmonic_thermal(), 1.0, 256, 256).unwrap()
    }

    #[test]
    fn potential_validation() {
        assert!(PotentialSpec::harmonic(0.0, 1.0).is_err());
        assert!(PotentialSpec::harmonic(1.0, -1.0).is_err());
        assert!(PotentialSpec::quartic(1.0, 0.0).is_err());
        assert!(ThermalSpec::new(0.0, PotentialSpec::harmonic(1.0, 1.0).unwrap()).is_err());
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let bad: Vec<f64> = (0..10).map(|i| -(i as f64)).collect();
        assert!(PotentialSpec::tabulated(1.0, bad, xs.clone()).is_err());
        assert!(PotentialSpec::tabulated(1.0, xs.clone(), vec![0.0; 10]).is_ok());
    }

    #[test]
    fn tabulated_derivatives_match_analytic() {
        // table of U = x^3 on [-2, 2]: du = 3x^2, d2u = 6x, both exactly
        // representable by the 4th-order stencils
        let xs: Vec<f64> = (0..81).map(|i| -2.0 + 0.05 * i as f64).collect();
        let us: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
        let p = PotentialSpec::tabulated(1.0, xs, us).unwrap();
        for &x in &[-1.5, -0.3, 0.725, 1.9] {
            assert!((p.du(x) - 3.0 * x * x).abs() < 1e-8, "du at {x}: {}", p.du(x));
            assert!((p.d2u(x) - 6.0 * x).abs() < 1e-7, "d2u at {x}: {}", p.d2u(x));
        }
    }

    #[test]
    fn hamiltonian_field_values() {
        let g = test_grid();
        let eps = classical_hamiltonian_field(&harmonic_thermal(), g);
        let i = g.nx / 2;
        let j = g.np / 2;
        // node nearest the origin
        assert!(g.x(i).abs() < g.dx() && g.p(j).abs() < g.dp());
        assert!(eps.get(i, j) < 1e-2);

        let quart = ThermalSpec::new(1.0, PotentialSpec::quartic(1.0, 1.0).unwrap()).unwrap();
        let gq = Grid2D::new(-4.0, 4.0, 257, -9.0, 9.0, 257, 1.0).unwrap();
        let epsq = classical_hamiltonian_field(&quart, gq);
        let i2 = ((2.0 - gq.x_min) / gq.dx()).round() as usize;
        let j0 = ((0.0 - gq.p_min) / gq.dp()).round() as usize;
        assert!((gq.x(i2) - 2.0).abs() < 1e-12);
        assert!((epsq.get(i2, j0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_at_one_one_is_one() {
        // grid through (1, 1) exactly
        let g = Grid2D::new(-8.0, 8.0, 257, -8.0, 8.0, 257, 1.0).unwrap();
        let eps = classical_hamiltonian_field(&harmonic_thermal(), g);
        let i = ((1.0 - g.x_min) / g.dx()).round() as usize;
        assert!((g.x(i) - 1.0).abs() < 1e-12);
        assert!((eps.get(i, i) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boltzmann_is_normalized_and_has_gaussian_moments() {
        let g = test_grid();
        let c0 = classical_boltzmann(&harmonic_thermal(), g).unwrap();
        assert!((c0.integrate() - 1.0).abs() < 1e-12);

        let x2 = Field2D::from_fn(g, |x, _| x * x);
        let m2 = x2.zip(&c0, |a, b| a * b).unwrap().integrate();
        assert!((m2 - 1.0).abs() < 1e-6, "second moment {m2}");
    }

    #[test]
    fn boltzmann_peak_is_beta_hbar_omega() {
        // grid with a node exactly at the origin
        let g = Grid2D::new(-9.0, 9.0, 257, -9.0, 9.0, 257, 1.0).unwrap();
        let c0 = classical_boltzmann(&harmonic_thermal(), g).unwrap();
        let c = g.nx / 2;
        assert!(g.x(c).abs() < 1e-12);
        // peak = 1/Z_cl = beta*hbar*omega = 1 under the 2*pi*hbar measure
        assert!((c0.get(c, c) - 1.0).abs() < 1e-6, "peak {}", c0.get(c, c));
    }

    #[test]
    fn boltzmann_rejects_undersized_grid() {
        let g = Grid2D::new(-2.0, 2.0, 64, -2.0, 2.0, 64, 1.0).unwrap();
        let err = classical_boltzmann(&harmonic_thermal(), g).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn eta_field_harmonic_values() {
        let g = Grid2D::new(-8.0, 8.0, 257, -8.0, 8.0, 257, 1.0).unwrap();
        let eta = eta_field(&harmonic_thermal(), g);
        let c = g.nx / 2;
        assert!((eta.get(c, c) - 0.125).abs() < 1e-12);
        let i1 = ((1.0 - g.x_min) / g.dx()).round() as usize;
        assert!((eta.get(i1, i1) - 1.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn eta_vanishes_for_free_particle() {
        let xs: Vec<f64> = (0..201).map(|i| -10.0 + 0.1 * i as f64).collect();
        let free =
            ThermalSpec::new(1.0, PotentialSpec::tabulated(1.0, xs, vec![0.0; 201]).unwrap()).unwrap();
        let g = Grid2D::new(-8.0, 8.0, 64, -8.0, 8.0, 64, 1.0).unwrap();
        assert_eq!(eta_field(&free, g).max_abs(), 0.0);
    }

    #[test]
    fn eta_scales_as_beta_squared_at_origin() {
        let g = Grid2D::new(-8.0, 8.0, 65, -8.0, 8.0, 65, 1.0).unwrap();
        let pot = PotentialSpec::harmonic(1.0, 1.0).unwrap();
        let e1 = eta_field(&ThermalSpec::new(1.3, pot.clone()).unwrap(), g);
        let e2 = eta_field(&ThermalSpec::new(2.6, pot).unwrap(), g);
        let c = g.nx / 2;
        assert!(g.x(c).abs() < 1e-12 && g.p(c).abs() < 1e-12);
        assert_eq!(e2.get(c, c), 4.0 * e1.get(c, c));
    }

    #[test]
    fn thermal_series_invariants() {
        let g = test_grid();
        let thermal = harmonic_thermal();
        let w = thermal_wigner_series(&thermal, g).unwrap();
        assert_eq!(w.c1().max_abs(), 0.0);
        assert!(w.c2().integrate().abs() < 1e-9);

        // <eta> used internally is 1/24 for beta = m = omega = 1
        let eta = eta_field(&thermal, g);
        let c0 = w.c0();
        let mean = eta.zip(c0, |a, b| a * b).unwrap().integrate();
        assert!((mean - 1.0 / 24.0).abs() < 1e-6, "<eta> = {mean}");

        // pointwise c2 = -c0 (eta - <eta>) to 1e-12 of field scale
        let scale = w.c2().max_abs();
        for k in 0..g.len() {
            let want = -c0.values()[k] * (eta.values()[k] - mean);
            assert!((w.c2().values()[k] - want).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn displaced_mixture_identity_shift_is_bitwise() {
        let g = test_grid();
        let w = thermal_wigner_series(&harmonic_thermal(), g).unwrap();
        let d = displaced_mixture_series(&w, 0.0, 0.0).unwrap();
        assert_eq!(w.c0().values(), d.c0().values());
        assert_eq!(w.c2().values(), d.c2().values());
    }

    #[test]
    fn displaced_mixture_mass_and_mean() {
        let g = Grid2D::new(-10.0, 12.0, 384, -9.0, 9.0, 256, 1.0).unwrap();
        let w = thermal_wigner_series(&harmonic_thermal(), g).unwrap();
        let x0 = 2.0;
        let d = displaced_mixture_series(&w, x0, 0.0).unwrap();
        assert!((d.c0().integrate() - 1.0).abs() < 1e-6);
        let xf = Field2D::from_fn(g, |x, _| x);
        let mean_x = xf.zip(d.c0(), |a, b| a * b).unwrap().integrate();
        assert!((mean_x - x0 / 2.0).abs() < 1e-6, "<x> = {mean_x}");
    }

    #[test]
    fn displaced_mixture_rejects_shift_off_grid() {
        let g = test_grid();
        let w = thermal_wigner_series(&harmonic_thermal(), g).unwrap();
        let err = displaced_mixture_series(&w, 6.0, 0.0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn displacement_commutes_with_linear_combinations() {
        let g = Grid2D::new(-11.0, 11.0, 320, -10.0, 10.0, 256, 1.0).unwrap();
        let wa = thermal_wigner_series(&harmonic_thermal(), g).unwrap();
        let tb = ThermalSpec::new(1.5, PotentialSpec::harmonic(1.0, 1.0).unwrap()).unwrap();
        let wb = thermal_wigner_series(&tb, g).unwrap();
        let lam = 0.3;
        let combine = |a: &WignerSeries, b: &WignerSeries| {
            WignerSeries::new(
                a.c0().scaled(lam).add_scaled(b.c0(), 1.0 - lam).unwrap(),
                a.c1().scaled(lam).add_scaled(b.c1(), 1.0 - lam).unwrap(),
                a.c2().scaled(lam).add_scaled(b.c2(), 1.0 - lam).unwrap(),
            )
            .unwrap()
        };
        let (x0, p0) = (1.0, -0.5);
        let lhs = displaced_mixture_series(&combine(&wa, &wb), x0, p0).unwrap();
        let rhs = combine(
            &displaced_mixture_series(&wa, x0, p0).unwrap(),
            &displaced_mixture_series(&wb, x0, p0).unwrap(),
        );
        let diff = lhs.c0().zip(rhs.c0(), |a, b| a - b).unwrap().max_abs();
        assert!(diff < 1e-13, "mixture does not commute with mixing: {diff}");
        let diff2 = lhs.c2().zip(rhs.c2(), |a, b| a - b).unwrap().max_abs();
        assert!(diff2 < 1e-13);
    }

    #[test]
    fn custom_series_round_trips_thermal_fields() {
        let g = test_grid();
        let w = thermal_wigner_series(&harmonic_thermal(), g).unwrap();
        assert!(custom_series(w.c0().clone(), w.c1().clone(), w.c2().clone()).is_ok());
    }

    #[test]
    fn custom_series_rejects_negative_c0() {
        let g = test_grid();
        let w = thermal_wigner_series(&harmonic_thermal(), g).unwrap();
        let mut bad = w.c0().clone();
        bad.set(3, 3, -0.1);
        let err = custom_series(bad, w.c1().clone(), w.c2().clone()).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn custom_series_rejects_trace_violating_c1() {
        let g = test_grid();
        let w = thermal_wigner_series(&harmonic_thermal(), g).unwrap();
        // c1 proportional to c0 integrates to 0.5
        let c1 = w.c0().scaled(0.5);
        let err = custom_series(w.c0().clone(), c1, w.c2().clone()).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn shift_field_translates_a_gaussian() {
        let g = Grid2D::new(-6.0, 6.0, 241, -6.0, 6.0, 241, 1.0).unwrap();
        let f = Field2D::from_fn(g, |x, p| (-(x * x + p * p)).exp());
        let s = shift_field(&f, 0.8, -0.4);
        let want = Field2D::from_fn(g, |x, p| {
            let (xs, ps) = (x - 0.8, p + 0.4);
            (-(xs * xs + ps * ps)).exp()
        });
        let err = s.zip(&want, |a, b| a - b).unwrap().max_abs();
        assert!(err < 1e-4, "interpolation error {err}");
    }
}
