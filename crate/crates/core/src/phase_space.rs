//! Uniform 2D phase-space grids, finite-difference derivatives,
//! deterministic quadrature, and the bilinear differential forms that
//! build up the truncated star product.
//!
//! Conventions fixed here and relied on everywhere else:
//! - fields are stored row-major with x as the outer index;
//! - the integration measure is dx·dp/(2πℏ) with ℏ taken from the grid;
//! - quadrature is a uniform-weight Riemann sum reduced pairwise, so
//!   results are bit-deterministic for a given grid;
//! - first and second derivatives use 4th-order central stencils in the
//!   interior and one-sided 4th-order stencils on the two outermost
//!   layers, exact for polynomials of degree ≤ 4.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::io::Write;

const MODULE: &str = "phase_space";

/// Differentiation axis of a phase-space field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    P,
}

/// Uniform rectangular phase-space lattice.
///
/// `hbar` is the reference action of the measure dx·dp/(2πℏ); node
/// coordinates are x_i = x_min + i·dx with dx = (x_max−x_min)/(nx−1),
/// and likewise for p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
    pub hbar: f64,
}

impl Grid2D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        p_min: f64,
        p_max: f64,
        np: usize,
        hbar: f64,
    ) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && p_min.is_finite() && p_max.is_finite()) {
            return Err(Error::config(MODULE, "grid_bounds", "grid bounds must be finite"));
        }
        if x_max <= x_min || p_max <= p_min {
            return Err(Error::config(
                MODULE,
                "grid_bounds",
                format!("need x_max > x_min and p_max > p_min, got x [{x_min}, {x_max}], p [{p_min}, {p_max}]"),
            ));
        }
        if nx < 16 || np < 16 {
            return Err(Error::config(
                MODULE,
                "grid_size",
                format!("need nx >= 16 and np >= 16, got nx={nx}, np={np}"),
            ));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::config(MODULE, "hbar_positive", format!("hbar must be > 0, got {hbar}")));
        }
        Ok(Grid2D {
            x_min,
            x_max,
            nx,
            p_min,
            p_max,
            np,
            hbar,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight per node: dx·dp/(2πℏ).
    pub fn node_weight(&self) -> f64 {
        self.dx() * self.dp() / (2.0 * PI * self.hbar)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.np + j
    }
}

/// Real scalar field sampled on a [`Grid2D`], row-major with x outer.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Field2D {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Field2D {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Sample `f(x, p)` on every node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.np {
                values.push(f(x, grid.p(j)));
            }
        }
        Field2D { grid, values }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(
                MODULE,
                "field_length",
                format!("expected {} values, got {}", grid.len(), values.len()),
            ));
        }
        let f = Field2D { grid, values };
        f.check_finite()?;
        Ok(f)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::numerical(MODULE, "field_finite", "field contains NaN or Inf"))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip(&self, other: &Field2D, f: impl Fn(f64, f64) -> f64) -> Result<Field2D> {
        same_grid(self, other)?;
        Ok(Field2D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, c: f64) -> Field2D {
        self.map(|v| c * v)
    }

    /// Self + c·other.
    pub fn add_scaled(&self, other: &Field2D, c: f64) -> Result<Field2D> {
        self.zip(other, |a, b| a + c * b)
    }

    /// 4th-order finite-difference partial derivative along `axis`.
    ///
    /// `order` 1 or 2. Interior nodes use central stencils, the two
    /// layers nearest each edge use one-sided stencils of the same order
    /// of accuracy.
    pub fn derivative(&self, axis: Axis, order: u32) -> Result<Field2D> {
        let (n_axis, h) = match axis {
            Axis::X => (self.grid.nx, self.grid.dx()),
            Axis::P => (self.grid.np, self.grid.dp()),
        };
        let min_nodes = match order {
            1 => 5,
            2 => 6,
            _ => {
                return Err(Error::config(
                    MODULE,
                    "derivative_order",
                    format!("order must be 1 or 2, got {order}"),
                ))
            }
        };
        if n_axis < min_nodes {
            return Err(Error::config(
                MODULE,
                "axis_size",
                format!("need >= {min_nodes} nodes along axis, got {n_axis}"),
            ));
        }

        let mut out = vec![0.0; self.values.len()];
        let (nx, np) = (self.grid.nx, self.grid.np);
        // stride between consecutive nodes along the differentiated axis
        let (lines, line_stride, axis_stride) = match axis {
            Axis::X => (np, 1usize, np),
            Axis::P => (nx, np, 1usize),
        };
        let scale = match order {
            1 => 1.0 / (12.0 * h),
            _ => 1.0 / (12.0 * h * h),
        };
        for line in 0..lines {
            let base = line * line_stride;
            let at = |k: usize| self.values[base + k * axis_stride];
            match order {
                1 => {
                    out[base] = scale
                        * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
                    out[base + axis_stride] = scale
                        * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4));
                    for k in 2..n_axis - 2 {
                        out[base + k * axis_stride] = scale
                            * (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2));
                    }
                    let m = n_axis - 1;
                    out[base + (m - 1) * axis_stride] = scale
                        * (-at(m - 4) + 6.0 * at(m - 3) - 18.0 * at(m - 2) + 10.0 * at(m - 1)
                            + 3.0 * at(m));
                    out[base + m * axis_stride] = scale
                        * (3.0 * at(m - 4) - 16.0 * at(m - 3) + 36.0 * at(m - 2) - 48.0 * at(m - 1)
                            + 25.0 * at(m));
                }
                _ => {
                    out[base] = scale
                        * (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3)
                            + 61.0 * at(4)
                            - 10.0 * at(5));
                    out[base + axis_stride] = scale
                        * (10.0 * at(0) - 15.0 * at(1) - 4.0 * at(2) + 14.0 * at(3) - 6.0 * at(4)
                            + at(5));
                    for k in 2..n_axis - 2 {
                        out[base + k * axis_stride] = scale
                            * (-at(k - 2) + 16.0 * at(k - 1) - 30.0 * at(k) + 16.0 * at(k + 1)
                                - at(k + 2));
                    }
                    let m = n_axis - 1;
                    out[base + (m - 1) * axis_stride] = scale
                        * (at(m - 5) - 6.0 * at(m - 4) + 14.0 * at(m - 3) - 4.0 * at(m - 2)
                            - 15.0 * at(m - 1)
                            + 10.0 * at(m));
                    out[base + m * axis_stride] = scale
                        * (-10.0 * at(m - 5) + 61.0 * at(m - 4) - 156.0 * at(m - 3)
                            + 214.0 * at(m - 2)
                            - 154.0 * at(m - 1)
                            + 45.0 * at(m));
                }
            }
        }
        Ok(Field2D {
            grid: self.grid,
            values: out,
        })
    }

    /// Mixed second derivative ∂x∂p.
    pub fn derivative_xp(&self) -> Result<Field2D> {
        self.derivative(Axis::X, 1)?.derivative(Axis::P, 1)
    }

    /// Phase-space integral with the dx·dp/(2πℏ) measure.
    ///
    /// Uniform-weight Riemann sum, reduced pairwise so that the result is
    /// bit-identical across runs on the same grid.
    pub fn integrate(&self) -> f64 {
        pairwise_sum(&self.values) * self.grid.node_weight()
    }

    /// CSV dump with header `x,p,value`, row-major, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,p,value")?;
        for i in 0..self.grid.nx {
            let x = self.grid.x(i);
            for j in 0..self.grid.np {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", x, self.grid.p(j), self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// Fixed-order pairwise (tree) reduction.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub(crate) fn same_grid(a: &Field2D, b: &Field2D) -> Result<()> {
    if a.grid == b.grid {
        Ok(())
    } else {
        Err(Error::config(MODULE, "grid_match", "fields live on different grids"))
    }
}

/// Poisson bracket {f, g} = ∂x f·∂p g − ∂p f·∂x g.
pub fn poisson_bracket(f: &Field2D, g: &Field2D) -> Result<Field2D> {
    same_grid(f, g)?;
    let fx = f.derivative(Axis::X, 1)?;
    let fp = f.derivative(Axis::P, 1)?;
    let gx = g.derivative(Axis::X, 1)?;
    let gp = g.derivative(Axis::P, 1)?;
    let mut values = Vec::with_capacity(f.values.len());
    for k in 0..f.values.len() {
        values.push(fx.values[k] * gp.values[k] - fp.values[k] * gx.values[k]);
    }
    Ok(Field2D {
        grid: f.grid,
        values,
    })
}

/// The squared bidirectional-derivative form:
/// ∂²p f·∂²x g − 2·∂x∂p f·∂x∂p g + ∂²x f·∂²p g.
///
/// Symmetric in (f, g) bit-exactly: the two outer products are summed
/// before the mixed term is subtracted, and IEEE multiplication and
/// addition commute.
pub fn bilinear_j2(f: &Field2D, g: &Field2D) -> Result<Field2D> {
    same_grid(f, g)?;
    let fxx = f.derivative(Axis::X, 2)?;
    let fpp = f.derivative(Axis::P, 2)?;
    let fxp = f.derivative_xp()?;
    let gxx = g.derivative(Axis::X, 2)?;
    let gpp = g.derivative(Axis::P, 2)?;
    let gxp = g.derivative_xp()?;
    let mut values = Vec::with_capacity(f.values.len());
    for k in 0..f.values.len() {
        let outer = fpp.values[k] * gxx.values[k] + fxx.values[k] * gpp.values[k];
        values.push(outer - 2.0 * (fxp.values[k] * gxp.values[k]));
    }
    Ok(Field2D {
        grid: f.grid,
        values,
    })
}

/// Star-product coefficients of two plain fields, truncated at second
/// order: f⋆g ≃ m0 + ℏ·m1 + ℏ²·m2 with
/// m0 = f·g, m1 = ½{f, g}, m2 = −⅛·bilinear_j2(f, g).
///
/// m1 and m2 are the real representatives of the (odd-imaginary,
/// even-real) star coefficients, matching the crate-wide convention of
/// storing real fields for every expansion order.
pub fn moyal_star_truncated(f: &Field2D, g: &Field2D) -> Result<(Field2D, Field2D, Field2D)> {
    same_grid(f, g)?;
    let m0 = f.zip(g, |a, b| a * b)?;
    let m1 = poisson_bracket(f, g)?.scaled(0.5);
    let m2 = bilinear_j2(f, g)?.scaled(-0.125);
    Ok((m0, m1, m2))
}

/// G(w) = ∂²p w·(∂x w)² + ∂²x w·(∂p w)² − 2·∂x w·∂p w·∂x∂p w.
pub fn g_functional(w0: &Field2D) -> Result<Field2D> {
    let wx = w0.derivative(Axis::X, 1)?;
    let wp = w0.derivative(Axis::P, 1)?;
    let wxx = w0.derivative(Axis::X, 2)?;
    let wpp = w0.derivative(Axis::P, 2)?;
    let wxp = w0.derivative_xp()?;
    let mut values = Vec::with_capacity(w0.values.len());
    for k in 0..w0.values.len() {
        let (x1, p1) = (wx.values[k], wp.values[k]);
        values.push(
            wpp.values[k] * x1 * x1 + wxx.values[k] * p1 * p1
                - 2.0 * x1 * p1 * wxp.values[k],
        );
    }
    Ok(Field2D {
        grid: w0.grid,
        values,
    })
}
