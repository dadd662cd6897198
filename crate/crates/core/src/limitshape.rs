//! The resolvent `W(z)`, the limit-shape density and the Riemann-Hilbert
//! residual checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{poly_eval, sqrt_p, y_of_z, CurveData, Point, Side};
use crate::error::{Error, Result};
use crate::model::Theory;
use crate::quad::Rule;

fn point_z(p: Point) -> Complex64 {
    match p {
        Point::Off(z) => z,
        Point::Boundary(u, _) => Complex64::new(u, 0.0),
    }
}

/// `W(z)`, or its boundary value `W(u ± i0)`.
pub fn w_eval(point: Point, curve: &CurveData) -> Result<Complex64> {
    let z = point_z(point);
    let sp = sqrt_p(point, curve)?;
    let y = y_of_z(point, curve)?;
    let log_y = match point {
        Point::Boundary(_, side) if y.im == 0.0 && y.re < 0.0 => {
            Complex64::new(y.re.abs().ln(), side.sign() * PI)
        }
        _ => y.ln(),
    };
    let (n, _) = poly_eval(&curve.n_poly(), curve.w_of(z));
    let dv = curve.potential().dv(z);
    let mut w = -log_y + n * sp - dv / 2.0;
    if curve.theory == Theory::FiveD {
        w -= curve.r * (z - curve.s) / 2.0;
    }
    Ok(w)
}

/// `W'(z)` off the cut, from the closed-form derivative.
pub fn w_prime(z: Complex64, curve: &CurveData) -> Result<Complex64> {
    let sp = sqrt_p(Point::Off(z), curve)?;
    let w = curve.w_of(z);
    let (n, dn) = poly_eval(&curve.n_poly(), w);
    let d2v = curve.potential().d2v(z);
    let inner = -1.0 / sp + dn * sp + n * (w - curve.beta) / sp;
    Ok(match curve.theory {
        Theory::FourD => inner - d2v / 2.0,
        Theory::FiveD => {
            // d/dz = −R Z d/dZ
            let jac = -curve.r * w;
            -curve.r / 2.0 + jac * inner - d2v / 2.0
        }
    })
}

/// `ρ*(u) = −Im W(u + i0)/π`, exactly 1 left and 0 right of the cut.
pub fn rho_star(u: f64, curve: &CurveData) -> Result<f64> {
    if u <= curve.u0 {
        return Ok(1.0);
    }
    if u >= curve.u1 {
        return Ok(0.0);
    }
    Ok(-w_eval(Point::Boundary(u, Side::Plus), curve)?.im / PI)
}

/// A point of the cut in angular parametrization together with `ρ` and
/// `dρ/dθ`.
///
/// 4D uses `u = β + 2Λ cos θ`, 5D uses `e^{−Ru} = β − 2RΛ cos θ`; in both
/// cases `θ = 0` is the right endpoint and `θ = π` the left one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSample {
    pub theta: f64,
    pub u: f64,
    pub rho: f64,
    pub drho: f64,
}

pub fn cut_sample(theta: f64, curve: &CurveData) -> CutSample {
    let a = curve.lambda_eff();
    let (sn, cs) = theta.sin_cos();
    let npoly = curve.n_poly();
    match curve.theory {
        Theory::FourD => {
            let u = curve.beta + 2.0 * a * cs;
            let (n, dn) = poly_eval(&npoly, Complex64::new(u, 0.0));
            let rho = (theta - 2.0 * a * n.re * sn) / PI;
            let drho = (1.0 - 2.0 * a * (dn.re * (-2.0 * a * sn) * sn + n.re * cs)) / PI;
            CutSample { theta, u, rho, drho }
        }
        Theory::FiveD => {
            let zz = curve.beta - 2.0 * a * cs;
            let u = -zz.ln() / curve.r;
            let (n, dn) = poly_eval(&npoly, Complex64::new(zz, 0.0));
            let rho = (theta + 2.0 * a * n.re * sn) / PI;
            let drho = (1.0 + 2.0 * a * (dn.re * 2.0 * a * sn * sn + n.re * cs)) / PI;
            CutSample { theta, u, rho, drho }
        }
    }
}

/// `∫_{u0}^{u1} f(u) ρ*'(u) du` by Gauss-Legendre in the angle.
pub fn integrate_against_drho<F: FnMut(f64) -> f64>(
    curve: &CurveData,
    rule: &Rule,
    mut f: F,
) -> f64 {
    -rule.integrate(0.0, PI, |th| {
        let cs = cut_sample(th, curve);
        f(cs.u) * cs.drho
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub u_grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub u0: f64,
    pub u1: f64,
    pub theory: Theory,
}

impl DensityProfile {
    /// Piecewise-linear interpolation; 1 left of the cut, 0 right of it.
    pub fn eval(&self, u: f64) -> f64 {
        if u <= self.u0 {
            return 1.0;
        }
        if u >= self.u1 {
            return 0.0;
        }
        let j = self.u_grid.partition_point(|&x| x <= u).clamp(1, self.u_grid.len() - 1);
        let (xa, xb) = (self.u_grid[j - 1], self.u_grid[j]);
        let (ya, yb) = (self.rho[j - 1], self.rho[j]);
        if xb == xa {
            return ya;
        }
        ya + (yb - ya) * (u - xa) / (xb - xa)
    }
}

/// Samples `ρ*` on the cosine grid of the cut, endpoints included, in
/// ascending `u`.
pub fn density_profile(curve: &CurveData, n_grid: usize) -> Result<DensityProfile> {
    if n_grid < 16 {
        return Err(Error::InvalidParameter(format!("n_grid must be at least 16, got {n_grid}")));
    }
    let mut u_grid = Vec::with_capacity(n_grid);
    let mut rho = Vec::with_capacity(n_grid);
    let mut worst: Option<(f64, f64, f64)> = None;
    for j in (0..n_grid).rev() {
        let th = PI * j as f64 / (n_grid - 1) as f64;
        let cs = cut_sample(th, curve);
        let (u, r) = if j == 0 {
            (curve.u1, 0.0)
        } else if j == n_grid - 1 {
            (curve.u0, 1.0)
        } else {
            (cs.u, cs.rho)
        };
        let excess = (-r).max(r - 1.0).max(-cs.drho);
        if excess > 1e-12 && worst.map_or(true, |w| excess > w.2) {
            worst = Some((u, r, excess));
        }
        u_grid.push(u);
        rho.push(r);
    }
    if let Some((u, rho, _)) = worst {
        return Err(Error::Admissibility { u, rho });
    }
    Ok(DensityProfile { u_grid, rho, u0: curve.u0, u1: curve.u1, theory: curve.theory })
}

/// Grid sizes and probe radius for [`verify_rh`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_interior: usize,
    pub n_exterior: usize,
    pub radius: f64,
    pub n_angles: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_interior: 200, n_exterior: 50, radius: 1e3, n_angles: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhReport {
    pub max_interior_residual: f64,
    pub max_jump_residual: f64,
    pub asymptotic_residuals: BTreeMap<String, f64>,
    pub periodicity_residual: Option<f64>,
    pub n_interior: usize,
    pub n_exterior: usize,
}

impl RhReport {
    pub fn max_asymptotic(&self) -> f64 {
        self.asymptotic_residuals.values().fold(0.0, |m, &v| m.max(v))
    }
}

/// Right-hand side of the sum condition, `−V'(u)` (minus `R(u−s)` in 5D).
fn sum_rhs(u: f64, curve: &CurveData) -> f64 {
    let mut rhs = -curve.potential().dv(Complex64::new(u, 0.0)).re;
    if curve.theory == Theory::FiveD {
        rhs -= curve.r * (u - curve.s);
    }
    rhs
}

pub fn verify_rh(curve: &CurveData, grid: GridSpec) -> Result<RhReport> {
    let (u0, u1) = (curve.u0, curve.u1);
    let both = |u: f64| -> Result<(Complex64, Complex64)> {
        Ok((w_eval(Point::Boundary(u, Side::Plus), curve)?, w_eval(Point::Boundary(u, Side::Minus), curve)?))
    };

    let mut interior = 0.0f64;
    for j in 0..grid.n_interior {
        let u = u0 + (u1 - u0) * (j as f64 + 0.5) / grid.n_interior as f64;
        let (wp, wm) = both(u)?;
        interior = interior.max((wp + wm - sum_rhs(u, curve)).norm());
    }

    let width = (u1 - u0).max(1.0);
    let mut jump = 0.0f64;
    for j in 0..grid.n_exterior {
        let d = width * (j as f64 + 1.0) / grid.n_exterior as f64;
        let (wp, wm) = both(u1 + d)?;
        jump = jump.max((wp - wm).norm());
        let (wp, wm) = both(u0 - d)?;
        jump = jump.max((wp - wm - Complex64::new(0.0, -2.0 * PI)).norm());
    }

    let mut asym = BTreeMap::new();
    let mut periodicity = None;
    match curve.theory {
        Theory::FourD => {
            let mut worst = 0.0f64;
            for j in 0..grid.n_angles {
                let ang = 2.0 * PI * (j as f64 + 0.5) / grid.n_angles as f64;
                let z = Complex64::from_polar(grid.radius, ang);
                let want = -(z / curve.lambda0).ln() + curve.s / z;
                worst = worst.max((w_eval(Point::Off(z), curve)? - want).norm());
            }
            asym.insert("infinity".to_string(), worst);
        }
        Theory::FiveD => {
            let r = curve.r;
            let ln_rl = (r * curve.lambda0).ln();
            let mut right = 0.0f64;
            let mut left = 0.0f64;
            for j in 0..grid.n_angles {
                // Heights strictly inside (0, π/R) and (−π/R, 0).
                let frac = (j as f64 + 0.5) / grid.n_angles as f64;
                let h = (2.0 * frac - 1.0) * PI / r;
                if h == 0.0 {
                    continue;
                }
                let z = Complex64::new(grid.radius, h);
                let w = w_eval(Point::Off(z), curve)?;
                right = right.max((w + r * (z - curve.s) / 2.0 - ln_rl).norm());

                // e^{−Rz} must stay representable, so the left probe sits at |Z| = radius³.
                let z = Complex64::new(-3.0 * grid.radius.ln() / r, h);
                let w = w_eval(Point::Off(z), curve)?;
                let want = r * (z - curve.s) / 2.0 - Complex64::new(0.0, h.signum() * PI) + ln_rl;
                left = left.max((w - want).norm());
            }
            asym.insert("right".to_string(), right);
            asym.insert("left".to_string(), left);

            let shift = Complex64::new(0.0, 2.0 * PI / r);
            let mut per = 0.0f64;
            for j in 0..grid.n_angles {
                let frac = (j as f64 + 0.5) / grid.n_angles as f64;
                let z = Complex64::new(u0 - 1.0 + (u1 - u0 + 2.0) * frac, 0.25 * PI / r);
                let a = w_eval(Point::Off(z), curve)? + r * (z - curve.s) / 2.0;
                let zs = z + shift;
                let b = w_eval(Point::Off(zs), curve)? + r * (zs - curve.s) / 2.0;
                per = per.max((a - b).norm());
            }
            periodicity = Some(per);
        }
    }

    Ok(RhReport {
        max_interior_residual: interior,
        max_jump_residual: jump,
        asymptotic_residuals: asym,
        periodicity_residual: periodicity,
        n_interior: grid.n_interior,
        n_exterior: grid.n_exterior,
    })
}

/// `(∫ρ*', ∫uρ*')`, which should equal `(−1, −s)`.
pub fn constraint_check(curve: &CurveData, n_quad: usize) -> (f64, f64) {
    let rule = Rule::new(n_quad);
    let m0 = integrate_against_drho(curve, &rule, |_| 1.0);
    let m1 = integrate_against_drho(curve, &rule, |u| u);
    (m0, m1)
}
