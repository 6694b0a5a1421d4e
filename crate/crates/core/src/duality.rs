//! Space-time exchange between real- and imaginary-mass solutions.
//!
//! With the coupling `H = (p − A)σx + mσz + φ`, if `ψ(x, t)` solves the
//! real-mass equation then `ψ′(x′, t′) = U⁻¹ψ(x = t′, t = x′)`, with
//! `U = (1 + iσx)/√2`, solves the imaginary-mass equation
//! `H′ = (p − A′)σx − imσz + φ′` with `A′ = −φ` and `φ′ = −A`. A static
//! electric field `φ = g x` thus becomes the time-dependent vector
//! potential `A′ = −g t′`.
//!
//! Solutions live on stored lattices and are checked through equation
//! residuals rather than re-propagated.

use num_complex::Complex64;

use crate::dirac_evolution::{EvolutionConfig, Stepper};
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::params::{DiracParams, MassType};
use crate::spinor::{duality_unitary, mass_diagonal, Spinor, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Space,
    Time,
}

/// Scalar and vector potential sampled along one lattice axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub axis: Axis,
    pub phi: Vec<f64>,
    pub a: Vec<f64>,
}

impl Potentials {
    pub fn zero(axis: Axis, n: usize) -> Self {
        Self {
            axis,
            phi: vec![0.0; n],
            a: vec![0.0; n],
        }
    }
}

/// A spinor field on a uniform `(x, t)` lattice, stored time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeSolution {
    pub values: Vec<Spinor>,
    pub n_x: usize,
    pub n_t: usize,
    pub dx: f64,
    pub dt: f64,
    pub x0: f64,
    pub t0: f64,
    pub params: DiracParams,
    pub potentials: Potentials,
    /// Whether the x axis spans a full period, allowing spectral derivatives.
    pub x_periodic: bool,
}

impl SpacetimeSolution {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        values: Vec<Spinor>,
        n_x: usize,
        n_t: usize,
        (dx, dt): (f64, f64),
        (x0, t0): (f64, f64),
        params: DiracParams,
        potentials: Potentials,
    ) -> Result<Self> {
        if values.len() != n_x * n_t {
            return Err(Error::config(format!(
                "lattice holds {} values, expected {n_x}×{n_t}",
                values.len()
            )));
        }
        if !(dx > 0.0 && dt > 0.0) {
            return Err(Error::config("lattice spacings must be positive"));
        }
        let n_axis = match potentials.axis {
            Axis::Space => n_x,
            Axis::Time => n_t,
        };
        if potentials.phi.len() != n_axis || potentials.a.len() != n_axis {
            return Err(Error::config("potentials must be sampled along their axis"));
        }
        Ok(Self {
            values,
            n_x,
            n_t,
            dx,
            dt,
            x0,
            t0,
            params,
            potentials,
            x_periodic: false,
        })
    }

    /// Samples `f(x, t)` on the lattice.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fn<F>(
        n_x: usize,
        n_t: usize,
        spacing: (f64, f64),
        origin: (f64, f64),
        params: DiracParams,
        potentials: Potentials,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> Spinor,
    {
        let (dx, dt) = spacing;
        let (x0, t0) = origin;
        let values = (0..n_t)
            .flat_map(|j| (0..n_x).map(move |i| (x0 + i as f64 * dx, t0 + j as f64 * dt)))
            .map(|(x, t)| f(x, t))
            .collect();
        Self::new(values, n_x, n_t, spacing, origin, params, potentials)
    }

    /// Records a split-step evolution on grid points `x_start .. x_start + n_x`
    /// every `t_stride` steps, `n_t` times, starting from `field` at t = 0.
    /// The potential is the static `φ = g x` of `config`.
    pub fn from_evolution(
        field: &SpinorField,
        config: &EvolutionConfig,
        x_start: usize,
        n_x: usize,
        n_t: usize,
        t_stride: usize,
    ) -> Result<Self> {
        let grid = field.grid().clone();
        if x_start + n_x > grid.n_points() || n_x == 0 || n_t == 0 || t_stride == 0 {
            return Err(Error::config("lattice window does not fit the grid"));
        }
        let stepper = Stepper::new(&grid, config)?;
        let mut state = field.clone();
        let mut values = Vec::with_capacity(n_x * n_t);
        for j in 0..n_t {
            if j > 0 {
                for _ in 0..t_stride {
                    stepper.advance(&mut state);
                }
            }
            let (up, down) = (state.up(), state.down());
            values.extend((x_start..x_start + n_x).map(|i| [up[i], down[i]]));
        }
        let xs = &grid.positions()[x_start..x_start + n_x];
        let g = config.params.potential_slope;
        let potentials = Potentials {
            axis: Axis::Space,
            phi: xs.iter().map(|x| g * x).collect(),
            a: vec![0.0; n_x],
        };
        let params = DiracParams {
            potential_slope: 0.0,
            ..config.params
        };
        Self::new(
            values,
            n_x,
            n_t,
            (grid.dx(), config.dt * t_stride as f64),
            (xs[0], 0.0),
            params,
            potentials,
        )
    }

    pub fn at(&self, i_x: usize, i_t: usize) -> Spinor {
        self.values[i_t * self.n_x + i_x]
    }

    fn potential_at(&self, i_x: usize, i_t: usize) -> (f64, f64) {
        let k = match self.potentials.axis {
            Axis::Space => i_x,
            Axis::Time => i_t,
        };
        (self.potentials.phi[k], self.potentials.a[k])
    }
}

fn apply(m: &[[Complex64; 2]; 2], v: &Spinor) -> Spinor {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Exchanges the axes and conjugates each spinor by `m`.
fn exchange(solution: &SpacetimeSolution, m: &[[Complex64; 2]; 2]) -> Vec<Spinor> {
    let mut values = Vec::with_capacity(solution.values.len());
    // New row j′ (time) = old column (x index), new column i′ = old row.
    for i_x in 0..solution.n_x {
        for i_t in 0..solution.n_t {
            values.push(apply(m, &solution.at(i_x, i_t)));
        }
    }
    values
}

fn check_square(solution: &SpacetimeSolution) -> Result<()> {
    if solution.n_x != solution.n_t {
        return Err(Error::config(format!(
            "duality needs a square lattice, got {}×{}",
            solution.n_x, solution.n_t
        )));
    }
    Ok(())
}

fn u_inverse() -> [[Complex64; 2]; 2] {
    let u = duality_unitary();
    [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ]
}

/// Maps a real-mass solution to the imaginary-mass solution
/// `ψ′(x′, t′) = U⁻¹ψ(t′, x′)` with `φ′ = −A` and `A′ = −φ`.
pub fn dual_transform(solution: &SpacetimeSolution) -> Result<SpacetimeSolution> {
    check_square(solution)?;
    if solution.params.mass_type != MassType::Normal {
        return Err(Error::config("dual_transform expects a real-mass solution"));
    }
    Ok(exchanged(solution, &u_inverse(), MassType::Tachyon))
}

/// Inverse of [`dual_transform`]: `ψ(x, t) = Uψ′(t, x)`.
pub fn inverse_dual_transform(solution: &SpacetimeSolution) -> Result<SpacetimeSolution> {
    check_square(solution)?;
    if solution.params.mass_type != MassType::Tachyon {
        return Err(Error::config(
            "inverse_dual_transform expects an imaginary-mass solution",
        ));
    }
    Ok(exchanged(solution, &duality_unitary(), MassType::Normal))
}

/// Axis exchange with `U⁻¹` conjugation and no relabelling of the physics;
/// applying it twice gives `U⁻²ψ = −iσx ψ`.
pub fn swap_and_conjugate(solution: &SpacetimeSolution) -> Result<SpacetimeSolution> {
    check_square(solution)?;
    Ok(exchanged(solution, &u_inverse(), solution.params.mass_type))
}

fn exchanged(
    solution: &SpacetimeSolution,
    m: &[[Complex64; 2]; 2],
    mass_type: MassType,
) -> SpacetimeSolution {
    let axis = match solution.potentials.axis {
        Axis::Space => Axis::Time,
        Axis::Time => Axis::Space,
    };
    let negate = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    SpacetimeSolution {
        values: exchange(solution, m),
        n_x: solution.n_t,
        n_t: solution.n_x,
        dx: solution.dt,
        dt: solution.dx,
        x0: solution.t0,
        t0: solution.x0,
        params: DiracParams {
            mass_type,
            ..solution.params
        },
        potentials: Potentials {
            axis,
            phi: negate(&solution.potentials.a),
            a: negate(&solution.potentials.phi),
        },
        x_periodic: false,
    }
}

/// Fourth-order central first derivative.
fn fd4(f: [Spinor; 5], h: f64) -> Spinor {
    let d = |c: usize| (f[0][c] - f[1][c] * 8.0 + f[3][c] * 8.0 - f[4][c]) / (12.0 * h);
    [d(0), d(1)]
}

/// Max over interior lattice points of
/// `|i∂ₜψ − [(−i∂ₓ − A)σx + Mσz + φ]ψ|`, with `M = m` or `−im`.
///
/// `∂ₜ` uses fourth-order central differences. `∂ₓ` is spectral on a
/// periodic x axis and fourth-order otherwise.
pub fn equation_residual(solution: &SpacetimeSolution) -> Result<f64> {
    let (n_x, n_t) = (solution.n_x, solution.n_t);
    let x_margin = if solution.x_periodic { 0 } else { 2 };
    if n_t < 5 || n_x < 2 * x_margin + 1 {
        return Err(Error::InsufficientData(format!(
            "lattice {n_x}×{n_t} has no interior points"
        )));
    }
    let dx_spectral = solution.x_periodic.then(|| spectral_x_derivative(solution));
    let [m_up, m_down] = mass_diagonal(&solution.params);
    let mut worst = 0.0f64;
    for j in 2..n_t - 2 {
        for i in x_margin..n_x - x_margin {
            let dt = fd4(
                [0, 1, 2, 3, 4].map(|k| solution.at(i, j + k - 2)),
                solution.dt,
            );
            let dx = match &dx_spectral {
                Some(d) => d[j * n_x + i],
                None => fd4(
                    [0, 1, 2, 3, 4].map(|k| solution.at(i + k - 2, j)),
                    solution.dx,
                ),
            };
            let psi = solution.at(i, j);
            let (phi, a) = solution.potential_at(i, j);
            // (−i∂ₓ − A)σx ψ
            let kin = [-I * dx[1] - psi[1] * a, -I * dx[0] - psi[0] * a];
            let h = [
                kin[0] + m_up * psi[0] + psi[0] * phi,
                kin[1] + m_down * psi[1] + psi[1] * phi,
            ];
            let r = [I * dt[0] - h[0], I * dt[1] - h[1]];
            worst = worst.max((r[0].norm_sqr() + r[1].norm_sqr()).sqrt());
        }
    }
    Ok(worst)
}

fn spectral_x_derivative(solution: &SpacetimeSolution) -> Vec<Spinor> {
    let n = solution.n_x;
    let mut planner = rustfft::FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * solution.dx);
    let k: Vec<f64> = (0..n)
        .map(|j| {
            if 2 * j == n {
                0.0
            } else if 2 * j < n {
                j as f64 * dk
            } else {
                (j as f64 - n as f64) * dk
            }
        })
        .collect();
    let mut out = vec![[Complex64::default(); 2]; solution.values.len()];
    let mut buf = vec![Complex64::default(); n];
    for j in 0..solution.n_t {
        for c in 0..2 {
            for i in 0..n {
                buf[i] = solution.at(i, j)[c];
            }
            fwd.process(&mut buf);
            for (b, &kk) in buf.iter_mut().zip(&k) {
                *b *= I * kk / n as f64;
            }
            inv.process(&mut buf);
            for i in 0..n {
                out[j * n + i][c] = buf[i];
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub residuals: Vec<f64>,
    /// `log₂` of successive residual ratios.
    pub orders: Vec<f64>,
}

/// Residuals below this are treated as converged to rounding.
pub const RESIDUAL_FLOOR: f64 = 1e-11;

/// Residuals of a sequence of lattices, each refined by a factor of two.
/// Fails with a resolution error when a refinement does not reduce a
/// residual that is still above [`RESIDUAL_FLOOR`].
pub fn residual_convergence(solutions: &[SpacetimeSolution]) -> Result<ConvergenceReport> {
    if solutions.len() < 2 {
        return Err(Error::InsufficientData(
            "convergence needs at least two lattices".into(),
        ));
    }
    let residuals = solutions
        .iter()
        .map(equation_residual)
        .collect::<Result<Vec<_>>>()?;
    let mut orders = Vec::with_capacity(residuals.len() - 1);
    for w in residuals.windows(2) {
        if w[1] > RESIDUAL_FLOOR && w[1] >= w[0] {
            return Err(Error::Resolution(format!(
                "residual does not decrease under refinement ({:.3e} -> {:.3e})",
                w[0], w[1]
            )));
        }
        orders.push((w[0] / w[1]).log2());
    }
    Ok(ConvergenceReport { residuals, orders })
}
