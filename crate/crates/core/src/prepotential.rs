//! Critical value of the rescaled energy and its `t`-gradient, computed three
//! ways: density integral, contour integral of `W'`, finite differences.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{Background, CurveData, Point, Side, SolveOptions};
use crate::error::{Error, Result};
use crate::limitshape::{cut_sample, density_profile, integrate_against_drho, w_eval, w_prime};
use crate::model::Theory;
use crate::quad::{NeumaierSum, Rule};

/// Leading-order kernel `g⁽⁰⁾(u)`, `u ≥ 0`.
///
/// 4D is `u²/2 (log(u/Λ₀) − 3/2)`. In 5D `g⁽⁰⁾″(u) = log(2 sinh(Ru/2)/(RΛ₀))`
/// with `g(0) = g'(0) = 0`; the elementary part is integrated in closed form
/// and the smooth remainder `log((1 − e^{−Rx})/(Rx))` by Gauss-Legendre.
#[derive(Debug, Clone)]
pub struct Kernel0 {
    theory: Theory,
    r: f64,
    lambda0: f64,
    rule: Rule,
}

impl Kernel0 {
    pub fn new(theory: Theory, r: f64, lambda0: f64) -> Self {
        Kernel0 { theory, r, lambda0, rule: Rule::new(48) }
    }

    pub fn for_curve(curve: &CurveData) -> Self {
        Self::new(curve.theory, curve.r, curve.lambda0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u = u.abs();
        if u == 0.0 {
            return 0.0;
        }
        match self.theory {
            Theory::FourD => 0.5 * u * u * ((u / self.lambda0).ln() - 1.5),
            Theory::FiveD => {
                let r = self.r;
                let remainder = |x: f64| {
                    let rx = r * x;
                    if rx < 1e-300 {
                        0.0
                    } else {
                        (-(-rx).exp_m1() / rx).ln()
                    }
                };
                let tail = u * u * self.rule.integrate(0.0, 1.0, |xi| (1.0 - xi) * remainder(u * xi));
                r * u * u * u / 12.0 - 0.5 * u * u * (r * self.lambda0).ln()
                    + 0.5 * u * u * ((r * u).ln() - 1.5)
                    + tail
            }
        }
    }
}

fn linear_term(curve: &CurveData, u: f64) -> f64 {
    match curve.theory {
        Theory::FourD => curve
            .t
            .iter()
            .enumerate()
            .map(|(i, tk)| {
                let k = (i + 1) as i32;
                tk * u.powi(k + 1) / (k + 1) as f64
            })
            .sum(),
        Theory::FiveD => {
            let r = curve.r;
            let cubic = r / 6.0 * (u - curve.s).powi(3);
            let pot: f64 = curve
                .t
                .iter()
                .enumerate()
                .map(|(i, tk)| {
                    let k = (i + 1) as f64;
                    tk * (-r * k * u).exp() / (-r * k)
                })
                .sum();
            cubic + pot
        }
    }
}

/// `ℰ⁽⁰⁾*`: the double kernel integral against `ρ*'⊗ρ*'` plus the linear
/// terms against `ρ*'`, by Gauss-Legendre in the cut angle.
///
/// The inner integral is split at the diagonal, where `g⁽⁰⁾` has its
/// `u² log u` kink; symmetry halves the work.
pub fn energy_critical(curve: &CurveData, n_quad: usize) -> Result<f64> {
    if n_quad < 8 {
        return Err(Error::InvalidParameter(format!("n_quad must be at least 8, got {n_quad}")));
    }
    density_profile(curve, 64)?;
    let kernel = Kernel0::for_curve(curve);
    let rule = Rule::new(n_quad);
    let outer: Vec<(f64, f64)> = rule.mapped(0.0, PI).collect();
    let pieces: Vec<f64> = outer
        .par_iter()
        .map(|&(th, w)| {
            let a = cut_sample(th, curve);
            let inner = rule.integrate(0.0, th, |ph| {
                let b = cut_sample(ph, curve);
                kernel.eval(a.u - b.u) * b.drho
            });
            2.0 * w * a.drho * inner
        })
        .collect();
    let quadratic: NeumaierSum = pieces.into_iter().collect();
    let linear = integrate_against_drho(curve, &rule, |u| linear_term(curve, u));
    Ok(quadratic.total() + linear)
}

fn test_function(theory: Theory, r: f64, k: usize, z: Complex64) -> Complex64 {
    match theory {
        Theory::FourD => z.powi(k as i32 + 1) / (k as f64 + 1.0),
        Theory::FiveD => {
            let rk = r * k as f64;
            (-rk * z).exp() / (-rk)
        }
    }
}

/// `∂ℰ*/∂t_k` as `∫ F_k(u) ρ*'(u) du` with `F_k = u^{k+1}/(k+1)` (4D) or
/// `e^{−Rku}/(−Rk)` (5D).
pub fn de_dtk_density(k: usize, curve: &CurveData, n_quad: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k starts at 1".into()));
    }
    density_profile(curve, 64)?;
    let rule = Rule::new(n_quad);
    Ok(integrate_against_drho(curve, &rule, |u| test_function(curve.theory, curve.r, k, Complex64::new(u, 0.0)).re))
}

/// Ellipse `center + rx cos τ + i ry sin τ`, traversed anticlockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub center: Complex64,
    pub semi_axes: (f64, f64),
    pub n_nodes: usize,
}

impl ContourSpec {
    pub fn default_for(curve: &CurveData) -> Self {
        let half = 0.5 * (curve.u1 - curve.u0);
        let mut ry: f64 = 1.0;
        if curve.theory == Theory::FiveD {
            ry = ry.min(0.5 * PI / curve.r);
        }
        ContourSpec {
            center: Complex64::new(0.5 * (curve.u0 + curve.u1), 0.0),
            semi_axes: (1.5 * half + 0.5, ry),
            n_nodes: 512,
        }
    }

    /// The same ellipse with both semi-axes multiplied by `f` (clipped to
    /// the strip in 5D).
    pub fn scaled(&self, f: f64, curve: &CurveData) -> Self {
        let mut ry = self.semi_axes.1 * f;
        if curve.theory == Theory::FiveD {
            ry = ry.min(0.9 * PI / curve.r);
        }
        ContourSpec { semi_axes: (self.semi_axes.0 * f, ry), ..*self }
    }

    pub fn validate(&self, curve: &CurveData) -> Result<()> {
        let (rx, ry) = self.semi_axes;
        if self.n_nodes < 64 {
            return Err(Error::InvalidContour(format!("need at least 64 nodes, got {}", self.n_nodes)));
        }
        if !(rx > 0.0 && ry > 0.0) {
            return Err(Error::InvalidContour("semi-axes must be positive".into()));
        }
        if self.center.im.abs() >= ry || !(self.center.re - rx < curve.u0 && self.center.re + rx > curve.u1) {
            return Err(Error::InvalidContour(format!("ellipse does not enclose [{}, {}]", curve.u0, curve.u1)));
        }
        // Ellipse must contain the cut: check the endpoints strictly.
        for u in [curve.u0, curve.u1] {
            let x = (u - self.center.re) / rx;
            let y = self.center.im / ry;
            if x * x + y * y >= 1.0 {
                return Err(Error::InvalidContour(format!("cut endpoint {u} lies outside the ellipse")));
            }
        }
        if curve.theory == Theory::FiveD && self.center.im.abs() + ry >= PI / curve.r {
            return Err(Error::InvalidContour("ellipse reaches the next copy of the cut".into()));
        }
        Ok(())
    }

    /// Point and `dz/dτ` at angle `τ`.
    pub fn at(&self, tau: f64) -> (Complex64, Complex64) {
        let (sn, cs) = tau.sin_cos();
        let (rx, ry) = self.semi_axes;
        (self.center + Complex64::new(rx * cs, ry * sn), Complex64::new(-rx * sn, ry * cs))
    }
}

/// `(1/2πi)∮ f(z) dz` by the periodic trapezoid rule.
fn contour_integral<F>(contour: &ContourSpec, f: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let n = contour.n_nodes;
    let terms: Result<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let (z, dz) = contour.at(2.0 * PI * j as f64 / n as f64);
            Ok(f(z)? * dz)
        })
        .collect();
    let terms = terms?;
    let re: NeumaierSum = terms.iter().map(|c| c.re).collect();
    let im: NeumaierSum = terms.iter().map(|c| c.im).collect();
    let h = 2.0 * PI / n as f64;
    Ok(Complex64::new(re.total(), im.total()) * h / Complex64::new(0.0, 2.0 * PI))
}

/// `∂ℰ*/∂t_k = (1/2πi)∮ F_k(z) W'(z) dz`; the full complex value, whose
/// imaginary part is quadrature noise.
pub fn de_dtk_contour_complex(k: usize, curve: &CurveData, contour: &ContourSpec) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k starts at 1".into()));
    }
    contour.validate(curve)?;
    contour_integral(contour, |z| Ok(test_function(curve.theory, curve.r, k, z) * w_prime(z, curve)?))
}

pub fn de_dtk_contour(k: usize, curve: &CurveData, contour: &ContourSpec) -> Result<f64> {
    Ok(de_dtk_contour_complex(k, curve, contour)?.re)
}

/// `∂ℰ*/∂t_k` by a central difference of `energy_critical` over re-solved
/// curves.
pub fn de_dtk_fd(k: usize, bg: &Background, step: f64, n_quad: usize) -> Result<f64> {
    if k == 0 || !(step > 0.0) {
        return Err(Error::InvalidParameter("need k >= 1 and step > 0".into()));
    }
    let opts = SolveOptions { tol: 1e-14, max_iter: 100 };
    let energy = |dt: f64| -> Result<f64> {
        let b = bg.with_t_shift(k, dt);
        let curve = b.solve(opts).or_else(|_| b.solve(SolveOptions::default()))?;
        energy_critical(&curve, n_quad)
    };
    let (ep, em) = rayon::join(|| energy(step), || energy(-step));
    Ok((ep? - em?) / (2.0 * step))
}

/// Samples of `S'(z) = 2W(z) + V'(z)`.
pub fn sw_differential_sample(points: &[Point], curve: &CurveData) -> Result<Vec<Complex64>> {
    let pot = curve.potential();
    points
        .iter()
        .map(|&p| {
            let z = match p {
                Point::Off(z) => z,
                Point::Boundary(u, _) => Complex64::new(u, 0.0),
            };
            Ok(2.0 * w_eval(p, curve)? + pot.dv(z))
        })
        .collect()
}

/// `max_u |S'(u + i0) + S'(u − i0) + c(u)|` over `n` interior cut points,
/// with `c = 0` in 4D and `c = 2R(u − s)` in 5D.
pub fn sw_cut_residual(curve: &CurveData, n: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 1..=n {
        let th = PI * j as f64 / (n + 1) as f64;
        let u = cut_sample(th, curve).u;
        let s = sw_differential_sample(&[Point::Boundary(u, Side::Plus), Point::Boundary(u, Side::Minus)], curve)?;
        let shift = match curve.theory {
            Theory::FourD => 0.0,
            Theory::FiveD => 2.0 * curve.r * (u - curve.s),
        };
        worst = worst.max((s[0] + s[1] + shift).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodCheck {
    /// `(1/2πi)∮ S' dz`.
    pub lhs: Complex64,
    /// `2(−z_c − (1/2πi)∮ z W' dz)`, with `z_c` the left crossing of the contour.
    pub rhs: Complex64,
}

impl PeriodCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Integration by parts for `∮ S' dz` on the ellipse.
///
/// `W` jumps by `−2πi` across the real axis left of the cut, so the
/// left-hand side is integrated by Gauss-Legendre on `τ ∈ (−π, π)` starting
/// and ending at the crossing `z_c`, and the boundary term `z_c·(−2πi)` is
/// kept.
pub fn period_check(curve: &CurveData, contour: &ContourSpec) -> Result<PeriodCheck> {
    contour.validate(curve)?;
    let pot = curve.potential();
    let rule = Rule::new(contour.n_nodes);
    let nodes: Vec<(f64, f64)> = rule.mapped(-PI, PI).collect();
    let terms: Result<Vec<Complex64>> = nodes
        .par_iter()
        .map(|&(tau, w)| {
            let (z, dz) = contour.at(tau);
            Ok((2.0 * w_eval(Point::Off(z), curve)? + pot.dv(z)) * dz * w)
        })
        .collect();
    let terms = terms?;
    let re: NeumaierSum = terms.iter().map(|c| c.re).collect();
    let im: NeumaierSum = terms.iter().map(|c| c.im).collect();
    let lhs = Complex64::new(re.total(), im.total()) / Complex64::new(0.0, 2.0 * PI);
    let zw = contour_integral(contour, |z| Ok(z * w_prime(z, curve)?))?;
    let z_c = contour.at(PI).0;
    Ok(PeriodCheck { lhs, rhs: 2.0 * (-z_c - zw) })
}

/// `|∂_j(∂ℰ*/∂t_k) − ∂_k(∂ℰ*/∂t_j)|` by central differences of the contour
/// route.
pub fn hessian_symmetry(bg: &Background, j: usize, k: usize, step: f64) -> Result<f64> {
    if j == 0 || k == 0 || !(step > 0.0) {
        return Err(Error::InvalidParameter("need j, k >= 1 and step > 0".into()));
    }
    if j == k {
        return Ok(0.0);
    }
    let opts = SolveOptions { tol: 1e-14, max_iter: 100 };
    let grad = |shift_index: usize, dt: f64, component: usize| -> Result<f64> {
        let b = bg.with_t_shift(shift_index, dt);
        let curve = b.solve(opts).or_else(|_| b.solve(SolveOptions::default()))?;
        de_dtk_contour(component, &curve, &ContourSpec::default_for(&curve))
    };
    let stencil = [(j, step, k), (j, -step, k), (k, step, j), (k, -step, j)];
    let vals: Result<Vec<f64>> = stencil.par_iter().map(|&(a, d, c)| grad(a, d, c)).collect();
    let v = vals?;
    let djk = (v[0] - v[1]) / (2.0 * step);
    let dkj = (v[2] - v[3]) / (2.0 * step);
    Ok((djk - dkj).abs())
}

/// The three routes for one `k`. Relative differences treat values below
/// `1e-6` of [`gradient_scale`] as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub k: usize,
    pub density_route: f64,
    pub contour_route: f64,
    pub contour_imag: f64,
    pub fd_route: f64,
    pub density_vs_contour: f64,
    pub contour_vs_fd: f64,
    pub radius_spread: f64,
}

/// `sup |F_k|` over the cut, a bound for `|∂ℰ*/∂t_k|` (`F_k` is largest in
/// modulus at an endpoint).
pub fn gradient_scale(k: usize, curve: &CurveData) -> f64 {
    let f = |u: f64| test_function(curve.theory, curve.r, k, Complex64::new(u, 0.0)).re.abs();
    f(curve.u0).max(f(curve.u1))
}

/// Relative difference; magnitudes below `1e-6·scale` count as zero.
fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6 * scale).max(1e-300)
}

pub fn gradient_report(bg: &Background, k: usize, n_quad: usize, fd_step: f64) -> Result<GradientReport> {
    let curve = bg.solve(SolveOptions { tol: 1e-14, max_iter: 100 }).or_else(|_| bg.solve(SolveOptions::default()))?;
    let density_route = de_dtk_density(k, &curve, n_quad)?;
    let base = ContourSpec::default_for(&curve);
    let c = de_dtk_contour_complex(k, &curve, &base)?;
    let mut spread = 0.0f64;
    for f in [0.8, 1.25] {
        let other = de_dtk_contour(k, &curve, &base.scaled(f, &curve))?;
        spread = spread.max((other - c.re).abs());
    }
    let fd_route = de_dtk_fd(k, bg, fd_step, n_quad)?;
    let scale = gradient_scale(k, &curve);
    Ok(GradientReport {
        k,
        density_route,
        contour_route: c.re,
        contour_imag: c.im,
        fd_route,
        density_vs_contour: rel(density_route, c.re, scale),
        contour_vs_fd: rel(c.re, fd_route, scale),
        radius_spread: spread,
    })
}
