//! Dispersionless Toda side of the story: the Lax function
//! `𝔏 = ap + b + ap⁻¹`, its truncated powers, the reduced Orlov-Schulman
//! series `𝔐`, and residual checks of the string equations and Lax flows.

pub mod laurent;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{y_of_z, Background, CurveData, Point, SolveOptions};
use crate::error::{Error, Result};
use crate::limitshape::w_eval;
use crate::model::Theory;

pub use laurent::{Coeff, LaurentSeries, Proj};

/// `𝔏 = ap + b + ap⁻¹` with a declared series window.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxData<T> {
    pub a: T,
    pub b: T,
    pub window: (i64, i64),
}

impl<T: Coeff> LaxData<T> {
    pub fn new(a: T, b: T, window: (i64, i64)) -> Self {
        LaxData { a, b, window }
    }

    pub fn series(&self) -> LaurentSeries<T> {
        LaurentSeries::from_coeffs(self.window, -1, vec![self.a.clone(), self.b.clone(), self.a.clone()])
            .expect("window must contain -1..=1")
    }
}

impl LaxData<f64> {
    /// The Lax function attached to a solved curve: `a = Λ, b = β` in 4D and
    /// `a = RΛ, b = −β` in 5D.
    pub fn from_curve(curve: &CurveData) -> Self {
        let k = curve.t.len() as i64 + 2;
        match curve.theory {
            Theory::FourD => LaxData::new(curve.lambda, curve.beta, (-k, k)),
            Theory::FiveD => LaxData::new(curve.r * curve.lambda, -curve.beta, (-k, k)),
        }
    }
}

/// `(𝔏ᵏ)_{>0} − (𝔏ᵏ)_{<0}`, `(𝔏ᵏ)_0` and `(𝔏ᵏ)_{−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxParts<T> {
    pub odd: LaurentSeries<T>,
    pub zero_mode: T,
    pub minus_one_mode: T,
}

pub fn proj<T: Coeff>(series: &LaurentSeries<T>, which: Proj) -> Result<LaurentSeries<T>> {
    series.proj(which)
}

pub fn lax_power_parts<T: Coeff>(lax: &LaxData<T>, k: u32) -> Result<LaxParts<T>> {
    let lk = lax.series().pow(k)?;
    let odd = lk.proj(Proj::Pos)?.sub(&lk.proj(Proj::Neg)?)?;
    Ok(LaxParts { odd, zero_mode: lk.coeff(0), minus_one_mode: lk.coeff(-1) })
}

/// Reduced Orlov-Schulman series `𝔐`.
///
/// 4D: `Σ_k (k t_k/2) odd(𝔏^{k−1})`; 5D: `−Σ_k ((−1)^k R k t_k/2) odd(𝔏ᵏ)`.
pub fn m_frak_series(lax: &LaxData<f64>, t: &[f64], theory: Theory, r: f64) -> Result<LaurentSeries<f64>> {
    let mut m = LaurentSeries::zero(lax.window);
    for (i, &tk) in t.iter().enumerate() {
        let k = i as u32 + 1;
        if tk == 0.0 {
            continue;
        }
        let (power, coef) = match theory {
            Theory::FourD => (k - 1, k as f64 * tk / 2.0),
            Theory::FiveD => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                (k, -sign * r * k as f64 * tk / 2.0)
            }
        };
        if power == 0 {
            continue;
        }
        m = m.add(&lax_power_parts(lax, power)?.odd.scale(&coef))?;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationReport {
    pub theory: Theory,
    /// Residual of the first reduced string equation.
    pub eq1_residual: f64,
    /// Residual of the second reduced string equation (4D only).
    pub eq2_residual: Option<f64>,
    /// How the second boundary equation enters.
    pub eq2_status: String,
    /// Max over sample points of `|W + log y + V'/2 (+ R(z−s)/2) − 𝔐(y(z))|`.
    pub w_m_residual: f64,
    /// The same with the opposite sign of `𝔐`.
    pub w_m_residual_flipped: f64,
}

fn sample_points(curve: &CurveData) -> Vec<Complex64> {
    let c = 0.5 * (curve.u0 + curve.u1);
    let rad = 0.5 * (curve.u1 - curve.u0) + 0.7;
    (0..12)
        .map(|j| {
            let th = 2.0 * PI * (j as f64 + 0.25) / 12.0;
            let mut z = Complex64::new(c + rad * th.cos(), 0.8 * th.sin());
            if curve.theory == Theory::FiveD {
                z.im = z.im.clamp(-0.9 * PI / curve.r, 0.9 * PI / curve.r);
            }
            z
        })
        .collect()
}

pub fn verify_identification(curve: &CurveData) -> Result<IdentificationReport> {
    let lax = LaxData::from_curve(curve);
    let (a, b, s) = (lax.a, lax.b, curve.s);
    let mut eq1 = match curve.theory {
        Theory::FourD => (a / curve.lambda0).ln(),
        Theory::FiveD => curve.r * s + (a / (curve.r * curve.lambda0)).ln(),
    };
    let mut eq2 = (s - b) / a;
    for (i, &tk) in curve.t.iter().enumerate() {
        let k = i as u32 + 1;
        match curve.theory {
            Theory::FourD => {
                let parts = lax_power_parts(&lax, k - 1)?;
                eq1 -= k as f64 * tk / 2.0 * parts.zero_mode;
                if k >= 2 {
                    eq2 += k as f64 * tk * parts.minus_one_mode;
                }
            }
            Theory::FiveD => {
                let parts = lax_power_parts(&lax, k)?;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                eq1 += sign * curve.r * k as f64 * tk / 2.0 * parts.zero_mode;
            }
        }
    }

    let m = m_frak_series(&lax, &curve.t, curve.theory, curve.r)?;
    let pot = curve.potential();
    let mut res = 0.0f64;
    let mut flipped = 0.0f64;
    for z in sample_points(curve) {
        let y = y_of_z(Point::Off(z), curve)?;
        let mut lhs = w_eval(Point::Off(z), curve)? + y.ln() + pot.dv(z) / 2.0;
        if curve.theory == Theory::FiveD {
            lhs += curve.r * (z - curve.s) / 2.0;
        }
        let mv = m.eval(y);
        res = res.max((lhs - mv).norm());
        flipped = flipped.max((lhs + mv).norm());
    }

    let (eq2_residual, eq2_status) = match curve.theory {
        Theory::FourD => (Some(eq2.abs()), "string equation".to_string()),
        Theory::FiveD => (None, "imposed by hand".to_string()),
    };
    Ok(IdentificationReport {
        theory: curve.theory,
        eq1_residual: eq1.abs(),
        eq2_residual,
        eq2_status,
        w_m_residual: res,
        w_m_residual_flipped: flipped,
    })
}

fn lax_at(bg: &Background) -> Result<LaxData<f64>> {
    let tight = SolveOptions { tol: 1e-14, max_iter: 100 };
    // Fall back to the default tolerance if rounding keeps Newton above 1e-14.
    let curve = bg.solve(tight).or_else(|_| bg.solve(SolveOptions::default()))?;
    let mut lax = LaxData::from_curve(&curve);
    lax.window = (-12, 12);
    Ok(lax)
}

/// `max_{|p|=1} |∂𝔏/∂t_k − σ_k {A_k, 𝔏}|` with `{F,G} = p(F_p G_s − F_s G_p)`,
/// `A_k = ½ odd(𝔏ᵏ)` and `σ_k = 1` (4D) or `(−1)^k` (5D).
///
/// Both `∂/∂t_k` and `∂/∂s` are central differences of re-solved curves.
pub fn lax_flow_residual(k: u32, bg: &Background, delta: f64) -> Result<f64> {
    if k == 0 || !(delta > 0.0) {
        return Err(Error::InvalidParameter("need k >= 1 and delta > 0".into()));
    }
    let k_idx = k as usize;
    let base = lax_at(&bg.with_t_shift(k_idx, 0.0))?;
    let ((tp, tm), (sp, sm)) = rayon::join(
        || (lax_at(&bg.with_t_shift(k_idx, delta)), lax_at(&bg.with_t_shift(k_idx, -delta))),
        || (lax_at(&bg.with_s(bg.s + delta)), lax_at(&bg.with_s(bg.s - delta))),
    );
    let (tp, tm, sp, sm) = (tp?, tm?, sp?, sm?);

    let dt = LaxData::new((tp.a - tm.a) / (2.0 * delta), (tp.b - tm.b) / (2.0 * delta), base.window);
    let l_s = LaxData::new((sp.a - sm.a) / (2.0 * delta), (sp.b - sm.b) / (2.0 * delta), base.window);

    let half = 0.5;
    let a_k = lax_power_parts(&base, k)?.odd.scale(&half);
    let a_s = lax_power_parts(&sp, k)?
        .odd
        .sub(&lax_power_parts(&sm, k)?.odd)?
        .scale(&(half / (2.0 * delta)));
    let a_p = a_k.d_dp();
    let l_p = base.series().d_dp();
    let sigma = match bg.theory {
        Theory::FourD => 1.0,
        Theory::FiveD => {
            if k % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
    };

    let mut worst = 0.0f64;
    for j in 0..64 {
        let p = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / 64.0);
        let bracket = p * (a_p.eval(p) * l_s.series().eval(p) - a_s.eval(p) * l_p.eval(p));
        let lhs = dt.series().eval(p);
        worst = worst.max((lhs - sigma * bracket).norm());
    }
    Ok(worst)
}

/// `|det J · z/z̄ − 1|` for the map `(z, w) ↦ (z̄, w̄)` defined by
/// `z = z̄⁻¹` and `z⁻¹w − log(z/a₀) = −z̄w̄ + log(z̄⁻¹/a₀)`.
pub fn symplectic_check(z: Complex64, w: Complex64, a0: f64) -> Result<f64> {
    if z.norm() == 0.0 || !(a0 > 0.0) {
        return Err(Error::InvalidParameter("need z != 0 and a0 > 0".into()));
    }
    let map = |z: Complex64, w: Complex64| {
        let zb = z.inv();
        let wb = ((zb.inv() / a0).ln() - w / z + (z / a0).ln()) / zb;
        (zb, wb)
    };
    let h = 1e-6 * z.norm().max(1.0);
    let hz = Complex64::new(h, 0.0);
    let (zp, wp) = map(z + hz, w);
    let (zm, wm) = map(z - hz, w);
    let (zq, wq) = map(z, w + hz);
    let (zr, wr) = map(z, w - hz);
    let j11 = (zp - zm) / (2.0 * h);
    let j21 = (wp - wm) / (2.0 * h);
    let j12 = (zq - zr) / (2.0 * h);
    let j22 = (wq - wr) / (2.0 * h);
    let det = j11 * j22 - j12 * j21;
    if det.norm() == 0.0 || !det.norm().is_finite() {
        return Err(Error::SingularJacobian);
    }
    let zb = map(z, w).0;
    Ok((det * z / zb - 1.0).norm())
}
