//! The deformed Seiberg-Witten curve and the solvers for `(β, Λ)`.

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Theory;

/// Side of the real axis from which a boundary value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// A point of the cut plane, or a boundary value `u ± i0` on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Off(Complex64),
    Boundary(f64, Side),
}

/// External potential `V`: `Σ t_k z^k` in 4D and `Σ t_k e^{−Rkz}` in 5D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub theory: Theory,
    pub r: f64,
    /// `t[0]` is `t_1`.
    pub t: Vec<f64>,
}

impl Potential {
    fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, &x)| (i as f64 + 1.0, x))
    }

    /// `V^{(n)}(z)` for `n = 0, 1, 2`.
    pub fn derivative(&self, n: u32, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        match self.theory {
            Theory::FourD => {
                for (k, tk) in self.terms() {
                    let ki = k as i32;
                    let coef = match n {
                        0 => 1.0,
                        1 => k,
                        _ => k * (k - 1.0),
                    };
                    if ki - n as i32 >= 0 && coef != 0.0 {
                        acc += tk * coef * z.powi(ki - n as i32);
                    }
                }
            }
            Theory::FiveD => {
                for (k, tk) in self.terms() {
                    let rk = -self.r * k;
                    acc += tk * rk.powi(n as i32) * (rk * z).exp();
                }
            }
        }
        acc
    }

    pub fn v(&self, z: Complex64) -> Complex64 {
        self.derivative(0, z)
    }

    pub fn dv(&self, z: Complex64) -> Complex64 {
        self.derivative(1, z)
    }

    pub fn d2v(&self, z: Complex64) -> Complex64 {
        self.derivative(2, z)
    }
}

/// Solved curve together with the parameters it was solved for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub theory: Theory,
    pub beta: f64,
    pub lambda: f64,
    /// Radius of the fifth dimension; unused in 4D.
    pub r: f64,
    pub u0: f64,
    pub u1: f64,
    /// `c_0, c_1, …` of `1/√P` at infinity.
    pub c: Vec<f64>,
    pub s: f64,
    pub lambda0: f64,
    /// `t[0]` is `t_1`.
    pub t: Vec<f64>,
}

impl CurveData {
    /// Builds the curve data for given `(β, Λ)` without solving anything.
    pub fn assemble(
        theory: Theory,
        beta: f64,
        lambda: f64,
        r: f64,
        s: f64,
        lambda0: f64,
        t: &[f64],
    ) -> Result<Self> {
        if !(lambda > 0.0) || !beta.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidCut { beta, lambda });
        }
        let kc = t.len() + 2;
        let (u0, u1, c) = match theory {
            Theory::FourD => (beta - 2.0 * lambda, beta + 2.0 * lambda, c_coeffs(beta, lambda, kc)),
            Theory::FiveD => {
                let a = r * lambda;
                if beta - 2.0 * a <= 0.0 {
                    return Err(Error::InvalidCut { beta, lambda });
                }
                (-(beta + 2.0 * a).ln() / r, -(beta - 2.0 * a).ln() / r, c_coeffs(beta, a, kc))
            }
        };
        Ok(CurveData { theory, beta, lambda, r, u0, u1, c, s, lambda0, t: t.to_vec() })
    }

    pub fn potential(&self) -> Potential {
        Potential { theory: self.theory, r: self.r, t: self.t.clone() }
    }

    /// `Λ` in 4D, `RΛ` in 5D.
    pub fn lambda_eff(&self) -> f64 {
        match self.theory {
            Theory::FourD => self.lambda,
            Theory::FiveD => self.r * self.lambda,
        }
    }

    /// Cut endpoints in the curve variable (`z` in 4D, `Z = e^{−Rz}` in 5D).
    pub fn w_endpoints(&self) -> (f64, f64) {
        let a = self.lambda_eff();
        (self.beta - 2.0 * a, self.beta + 2.0 * a)
    }

    /// The curve variable: `z` in 4D, `Z = e^{−Rz}` in 5D.
    pub fn w_of(&self, z: Complex64) -> Complex64 {
        match self.theory {
            Theory::FourD => z,
            Theory::FiveD => (-self.r * z).exp(),
        }
    }

    /// Polynomial `N` as coefficients in the curve variable, ascending.
    pub fn n_poly(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.t.len().max(1)];
        for (i, &tk) in self.t.iter().enumerate() {
            if tk == 0.0 {
                continue;
            }
            let k = i + 1;
            let nk = match self.theory {
                Theory::FourD => n_poly_4d(k, &self.c),
                Theory::FiveD => n_poly_5d(k, &self.c, self.r),
            };
            for (j, v) in nk.into_iter().enumerate() {
                out[j] += tk * v;
            }
        }
        out
    }
}

/// Coefficients `c_0..=c_k` of `((w−b)² − 4a²)^{−1/2} = Σ c_n w^{−n−1}`.
///
/// Uses `(n+1) c_{n+1} = (2n+1) b c_n − n (b² − 4a²) c_{n−1}`.
pub fn c_coeffs_in<T>(b: &T, a: &T, k: usize) -> Vec<T>
where
    T: Clone + Num + FromPrimitive,
{
    let int = |n: usize| T::from_usize(n).unwrap();
    let d = b.clone() * b.clone() - int(4) * a.clone() * a.clone();
    let mut c = vec![T::one()];
    if k >= 1 {
        c.push(b.clone());
    }
    for n in 1..k {
        let next = (int(2 * n + 1) * b.clone() * c[n].clone()
            - int(n) * d.clone() * c[n - 1].clone())
            / int(n + 1);
        c.push(next);
    }
    c
}

pub fn c_coeffs(beta: f64, lambda_eff: f64, k: usize) -> Vec<f64> {
    c_coeffs_in(&beta, &lambda_eff, k)
}

/// `N_k` in 4D, ascending powers of `z`.
pub fn n_poly_4d(k: usize, c: &[f64]) -> Vec<f64> {
    if k < 2 {
        return vec![0.0];
    }
    let half = k as f64 / 2.0;
    (0..=k - 2).map(|j| half * c[k - 2 - j]).collect()
}

/// `N_k` in 5D, ascending powers of `Z = e^{−Rz}`.
pub fn n_poly_5d(k: usize, c: &[f64], r: f64) -> Vec<f64> {
    let f = -r * k as f64 / 2.0;
    (0..k).map(|j| f * c[k - 1 - j]).collect()
}

/// Horner evaluation of `p` and `p'` at `w`.
pub fn poly_eval(p: &[f64], w: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in p.iter().rev() {
        d = d * w + v;
        v = v * w + a;
    }
    (v, d)
}

fn check_off_cut(z: Complex64, curve: &CurveData) -> Result<()> {
    let on_axis = match curve.theory {
        Theory::FourD => z.im == 0.0,
        Theory::FiveD => {
            let period = 2.0 * std::f64::consts::PI / curve.r;
            let m = (z.im / period).round();
            z.im == m * period
        }
    };
    if on_axis && z.re > curve.u0 && z.re < curve.u1 {
        return Err(Error::OnCut { u: z.re });
    }
    Ok(())
}

/// `√P` on the cut plane with the branch fixed at infinity.
pub fn sqrt_p(point: Point, curve: &CurveData) -> Result<Complex64> {
    let (w0, w1) = curve.w_endpoints();
    match point {
        Point::Off(z) => {
            check_off_cut(z, curve)?;
            let w = curve.w_of(z);
            Ok((w - w0).sqrt() * (w - w1).sqrt())
        }
        Point::Boundary(u, side) => {
            let w = curve.w_of(Complex64::new(u, 0.0)).re;
            let abs = ((w - w0).abs() * (w - w1).abs()).sqrt();
            let value = if w >= w1 {
                Complex64::new(abs, 0.0)
            } else if w <= w0 {
                Complex64::new(-abs, 0.0)
            } else {
                // Im Z < 0 on the upper side in 5D.
                let s = match curve.theory {
                    Theory::FourD => side.sign(),
                    Theory::FiveD => -side.sign(),
                };
                Complex64::new(0.0, s * abs)
            };
            Ok(value)
        }
    }
}

/// `y(z)` solving the curve equation, on the branch with `√P` as above.
pub fn y_of_z(point: Point, curve: &CurveData) -> Result<Complex64> {
    let sp = sqrt_p(point, curve)?;
    let z = match point {
        Point::Off(z) => z,
        Point::Boundary(u, _) => Complex64::new(u, 0.0),
    };
    let w = curve.w_of(z);
    let a = curve.lambda_eff();
    Ok(match curve.theory {
        Theory::FourD => (w - curve.beta + sp) / (2.0 * a),
        Theory::FiveD => (curve.beta - w - sp) / (2.0 * a),
    })
}

/// Right-hand side of the curve equation `y + 1/y = RHS`.
pub fn curve_rhs(z: Complex64, curve: &CurveData) -> Complex64 {
    let w = curve.w_of(z);
    let a = curve.lambda_eff();
    match curve.theory {
        Theory::FourD => (w - curve.beta) / a,
        Theory::FiveD => (curve.beta - w) / a,
    }
}

/// Newton iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-12, max_iter: 100 }
    }
}

/// Residuals of the two matching equations in 4D.
pub fn residuals_4d(beta: f64, lambda: f64, s: f64, t: &[f64], lambda0: f64) -> [f64; 2] {
    let c = c_coeffs(beta, lambda, t.len() + 1);
    let mut e1 = (lambda / lambda0).ln();
    let mut e2 = beta - s;
    for (i, &tk) in t.iter().enumerate() {
        let k = i + 1;
        let kt = k as f64 * tk / 2.0;
        e1 -= kt * c[k - 1];
        e2 -= kt * (c[k] - beta * c[k - 1]);
    }
    [e1, e2]
}

/// `y_∞ = (β + √(β² − 4(RΛ)²)) / (2RΛ)`.
pub fn y_infinity(beta: f64, a: f64) -> f64 {
    (beta + (beta * beta - 4.0 * a * a).sqrt()) / (2.0 * a)
}

/// Residuals of the two matching equations in 5D.
pub fn residuals_5d(
    beta: f64,
    lambda: f64,
    s: f64,
    t: &[f64],
    lambda0: f64,
    r: f64,
) -> Result<[f64; 2]> {
    let a = r * lambda;
    if !(beta - 2.0 * a > 0.0) || !(lambda > 0.0) {
        return Err(Error::InvalidCut { beta, lambda });
    }
    let c = c_coeffs(beta, a, t.len() + 1);
    let root = (beta * beta - 4.0 * a * a).sqrt();
    let mut e1 = r * s + (lambda / lambda0).ln();
    let mut e2 = -y_infinity(beta, a).ln() - (r * lambda0).ln();
    for (i, &tk) in t.iter().enumerate() {
        let k = i + 1;
        let rkt = r * k as f64 * tk / 2.0;
        e1 += rkt * c[k];
        e2 += rkt * c[k - 1] * root;
    }
    Ok([e1, e2])
}

fn norm(f: [f64; 2]) -> f64 {
    f[0].abs() + f[1].abs()
}

/// Damped Newton in `x = (β, ln Λ)` with a central-difference Jacobian.
fn newton<F>(mut x: [f64; 2], f: F, opts: SolveOptions) -> Result<[f64; 2]>
where
    F: Fn([f64; 2]) -> Result<[f64; 2]>,
{
    let mut fx = f(x)?;
    for _ in 0..opts.max_iter {
        if norm(fx) <= opts.tol {
            return Ok(x);
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(xp)?, f(xm)?);
            for i in 0..2 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularJacobian);
        }
        let dx = [
            -(jac[1][1] * fx[0] - jac[0][1] * fx[1]) / det,
            -(-jac[1][0] * fx[0] + jac[0][0] * fx[1]) / det,
        ];
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [x[0] + step * dx[0], x[1] + step * dx[1]];
            if let Ok(ft) = f(trial) {
                if norm(ft) < norm(fx) {
                    x = trial;
                    fx = ft;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm(fx) <= opts.tol {
        Ok(x)
    } else {
        Err(Error::NonConvergence { iterations: opts.max_iter, residual: norm(fx) })
    }
}

/// Runs `solve` at `t`, falling back to continuation along `γt`.
fn with_homotopy<S>(t: &[f64], seed: [f64; 2], solve: S) -> Result<[f64; 2]>
where
    S: Fn(&[f64], [f64; 2]) -> Result<[f64; 2]>,
{
    match solve(t, seed) {
        Ok(x) => Ok(x),
        Err(Error::NonConvergence { .. } | Error::InvalidCut { .. } | Error::SingularJacobian) => {
            let mut x = seed;
            for gamma in [0.25, 0.5, 0.75, 1.0] {
                let tg: Vec<f64> = t.iter().map(|v| gamma * v).collect();
                x = solve(&tg, x)?;
            }
            Ok(x)
        }
        Err(e) => Err(e),
    }
}

pub fn solve_4d(s: f64, t: &[f64], lambda0: f64, opts: SolveOptions) -> Result<CurveData> {
    if !(lambda0 > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda0 must be positive, got {lambda0}")));
    }
    let seed = [s, lambda0.ln()];
    let x = with_homotopy(t, seed, |tt, x0| {
        newton(x0, |x| Ok(residuals_4d(x[0], x[1].exp(), s, tt, lambda0)), opts)
    })?;
    CurveData::assemble(Theory::FourD, x[0], x[1].exp(), 0.0, s, lambda0, t)
}

pub fn solve_5d(s: f64, t: &[f64], lambda0: f64, r: f64, opts: SolveOptions) -> Result<CurveData> {
    if !(r > 0.0 && lambda0 > 0.0 && r * lambda0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need R > 0, lambda0 > 0 and R*lambda0 < 1 (R = {r}, lambda0 = {lambda0})"
        )));
    }
    let e = (-r * s).exp();
    let seed = [(1.0 + (r * lambda0).powi(2)) * e, (lambda0 * e).ln()];
    let x = with_homotopy(t, seed, |tt, x0| {
        newton(x0, |x| residuals_5d(x[0], x[1].exp(), s, tt, lambda0, r), opts)
    })?;
    CurveData::assemble(Theory::FiveD, x[0], x[1].exp(), r, s, lambda0, t)
}

/// Parameters that fix a solved curve: theory, charge `s`, times `t`, `Λ₀`
/// and (5D only) `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub theory: Theory,
    pub s: f64,
    pub t: Vec<f64>,
    pub lambda0: f64,
    pub r: f64,
}

impl Background {
    pub fn solve(&self, opts: SolveOptions) -> Result<CurveData> {
        match self.theory {
            Theory::FourD => solve_4d(self.s, &self.t, self.lambda0, opts),
            Theory::FiveD => solve_5d(self.s, &self.t, self.lambda0, self.r, opts),
        }
    }

    /// Copy with `t_k` shifted by `dt` (the time vector grows as needed).
    pub fn with_t_shift(&self, k: usize, dt: f64) -> Background {
        let mut b = self.clone();
        if b.t.len() < k {
            b.t.resize(k, 0.0);
        }
        b.t[k - 1] += dt;
        b
    }

    pub fn with_s(&self, s: f64) -> Background {
        Background { s, ..self.clone() }
    }
}
