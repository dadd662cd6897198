//! Boltzmann weights, truncated partition functions and the kernel form of
//! the hook products.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{
    check_q, enumerate_partitions, ln_factorial, log_dim_mu, log_schur_q_rho,
    maya_delta, moment, q_moment, MayaDensity, Partition,
};
use crate::quad::NeumaierSum;

/// Log-weights above this value are reported as overflow.
pub const LOG_WEIGHT_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theory {
    #[serde(rename = "4d")]
    FourD,
    #[serde(rename = "5d")]
    FiveD,
}

/// Parameters of one discrete model instance.
///
/// `r` is only read in 5D, where `q = e^{−Rħ}` and `Q = (RΛ₀)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub theory: Theory,
    pub hbar: f64,
    pub r: f64,
    pub lambda0: f64,
    pub s: i64,
    /// `t[0]` is `t_1`.
    pub t: Vec<f64>,
}

impl ModelParams {
    pub fn four_d(hbar: f64, lambda0: f64, s: i64, t: Vec<f64>) -> Self {
        ModelParams { theory: Theory::FourD, hbar, r: 0.0, lambda0, s, t }
    }

    pub fn five_d(hbar: f64, r: f64, lambda0: f64, s: i64, t: Vec<f64>) -> Self {
        ModelParams { theory: Theory::FiveD, hbar, r, lambda0, s, t }
    }

    pub fn q(&self) -> f64 {
        (-self.r * self.hbar).exp()
    }

    pub fn big_q(&self) -> f64 {
        (self.r * self.lambda0).powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return bad(format!("hbar must be positive, got {}", self.hbar));
        }
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return bad(format!("lambda0 must be positive, got {}", self.lambda0));
        }
        if self.t.iter().any(|x| !x.is_finite()) {
            return bad("couplings must be finite".into());
        }
        if self.theory == Theory::FiveD {
            if !(self.r > 0.0 && self.r.is_finite()) {
                return bad(format!("R must be positive, got {}", self.r));
            }
            if self.r * self.lambda0 >= 1.0 {
                return bad(format!(
                    "R*lambda0 must be < 1, got {}",
                    self.r * self.lambda0
                ));
            }
        }
        Ok(())
    }

    fn with_charge(&self, mu: &Partition) -> Partition {
        mu.clone().with_charge(self.s)
    }
}

fn t_iter(t: &[f64]) -> impl Iterator<Item = (u32, f64)> + '_ {
    t.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, &x)| (i as u32 + 1, x))
}

/// `𝒪ᵏ₄D` from the finite reorganization of its formal row sum.
fn o4d_rows(mu: &Partition, s: i64, k: u32) -> i128 {
    let s = s as i128;
    let mut acc = s.pow(k);
    for (i, &m) in mu.parts().iter().enumerate() {
        let i = i as i128 + 1;
        let m = m as i128;
        acc += (s + m - i + 1).pow(k) - (s - i + 1).pow(k);
        acc -= (s + m - i).pow(k) - (s - i).pow(k);
    }
    acc
}

/// `Φᵏ₄D = ħ^{k+1} 𝒪ᵏ⁺¹₄D / (k+1)`.
pub fn phi_4d(mu: &Partition, s: i64, k: u32, hbar: f64) -> f64 {
    let o = o4d_rows(mu, s, k + 1) as f64;
    hbar.powi(k as i32 + 1) * o / (k as f64 + 1.0)
}

/// `Φᵏ₅D = −qᵏ/(1−qᵏ) 𝒪ᵏ₅D + qᵏ/(1−qᵏ)` with `𝒪ᵏ₅D` from the Maya density.
pub fn phi_5d(mu: &Partition, s: i64, k: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    let d = maya_delta(&mu.clone().with_charge(s));
    let qk = q.powi(k as i32);
    let c = qk / (1.0 - qk);
    Ok(c * (1.0 - q_moment(&d, k, q)))
}

/// The same potential from the finite reorganization of its row sum.
pub fn phi_5d_rows(mu: &Partition, s: i64, k: u32, q: f64) -> f64 {
    let k = k as f64;
    let sf = s as f64;
    let mut acc = NeumaierSum::default();
    for (i, &m) in mu.parts().iter().enumerate() {
        let i = i as f64 + 1.0;
        acc.add(q.powf(k * (sf + m as f64 - i + 1.0)) - q.powf(k * (sf - i + 1.0)));
    }
    let qk = q.powf(k);
    acc.add(qk * (1.0 - q.powf(k * sf)) / (1.0 - qk));
    acc.total()
}

/// Logarithm of the Boltzmann weight of `μ` (charge taken from `params.s`).
pub fn log_weight(mu: &Partition, params: &ModelParams) -> Result<f64> {
    let n = mu.size() as f64;
    let s = params.s;
    let sf = s as f64;
    match params.theory {
        Theory::FourD => {
            let mut w = 2.0 * log_dim_mu(mu) - 2.0 * n * params.hbar.ln()
                - 2.0 * ln_factorial(mu.size())
                + (2.0 * n + sf * (sf + 1.0)) * params.lambda0.ln();
            for (k, tk) in t_iter(&params.t) {
                w += tk * phi_4d(mu, s, k, params.hbar);
            }
            Ok(w)
        }
        Theory::FiveD => {
            let q = params.q();
            let mut w = 2.0 * log_schur_q_rho(mu, q)?
                + (n + sf * (sf + 1.0) / 2.0) * params.big_q().ln();
            for (k, tk) in t_iter(&params.t) {
                w += tk * phi_5d(mu, s, k, q)?;
            }
            Ok(w)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSum {
    pub z: f64,
    /// Contribution of the outermost shell `|μ| = cutoff`.
    pub last_shell: f64,
    pub cutoff: usize,
}

/// `Σ_{|μ| ≤ cutoff} exp(log_weight)`, shell-parallel with an ordered
/// compensated reduction.
pub fn partition_function(params: &ModelParams, cutoff: usize) -> Result<PartitionSum> {
    params.validate()?;
    let shells: Vec<Result<f64>> = (0..=cutoff)
        .into_par_iter()
        .map(|n| {
            let mut acc = NeumaierSum::default();
            for mu in enumerate_partitions(n) {
                let lw = log_weight(&mu, params)?;
                if lw > LOG_WEIGHT_GUARD {
                    return Err(Error::Overflow { log_weight: lw, size: n });
                }
                acc.add(lw.exp());
            }
            Ok(acc.total())
        })
        .collect();
    let mut total = NeumaierSum::default();
    let mut last = 0.0;
    for shell in shells {
        last = shell?;
        total.add(last);
    }
    Ok(PartitionSum { z: total.total(), last_shell: last, cutoff })
}

/// Kernel `g` on the integer grid `0..=x_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    pub theory: Theory,
    pub values: Vec<f64>,
}

impl KernelTable {
    pub fn get(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn x_max(&self) -> usize {
        self.values.len() - 1
    }
}

/// Right-hand side of the second-difference equation for `g`.
pub fn kernel_rhs(theory: Theory, params: &ModelParams, x: usize) -> f64 {
    let x = x as f64;
    match theory {
        Theory::FourD => (params.hbar * x / params.lambda0).ln(),
        Theory::FiveD => {
            let lq = params.q().ln();
            -params.big_q().ln() / 2.0 - x * lq / 2.0 + (-(x * lq).exp_m1()).ln()
        }
    }
}

pub fn kernel_table(theory: Theory, params: &ModelParams, x_max: usize) -> Result<KernelTable> {
    if theory == Theory::FiveD {
        check_q(params.q())?;
    }
    let n = x_max.max(2);
    let mut g = vec![0.0; n + 1];
    for x in 1..n {
        g[x + 1] = kernel_rhs(theory, params, x) + 2.0 * g[x] - g[x - 1];
    }
    Ok(KernelTable { theory, values: g })
}

fn kernel_for(d: &MayaDensity, params: &ModelParams) -> Result<KernelTable> {
    let pts = d.support_points();
    let span = (pts.last().unwrap() - pts.first().unwrap()) as usize;
    kernel_table(params.theory, params, span.max(2))
}

/// `Σ_{x,y} g(|x−y|) Δρ(x) Δρ(y)`, plus the cubic `−(ln q/6) Σ (x−s)³ Δρ`
/// term in 5D.
fn hook_energy(d: &MayaDensity, params: &ModelParams) -> Result<f64> {
    let g = kernel_for(d, params)?;
    let pts: Vec<(i64, i64)> = d.iter().collect();
    let mut acc = NeumaierSum::default();
    for &(x, vx) in &pts {
        for &(y, vy) in &pts {
            acc.add(g.get(x.abs_diff(y) as usize) * (vx * vy) as f64);
        }
    }
    if params.theory == Theory::FiveD {
        let lq = params.q().ln();
        let s = d.charge();
        let cubic: i128 = d.iter().map(|(x, v)| ((x - s) as i128).pow(3) * v as i128).sum();
        acc.add(-lq / 6.0 * cubic as f64);
    }
    Ok(acc.total())
}

/// Minus the log of the hook-product part of the weight.
fn hook_product_neg_log(mu: &Partition, params: &ModelParams) -> Result<f64> {
    let n = mu.size() as f64;
    match params.theory {
        Theory::FourD => Ok(-(2.0 * log_dim_mu(mu) - 2.0 * n * params.hbar.ln()
            - 2.0 * ln_factorial(mu.size())
            + 2.0 * n * params.lambda0.ln())),
        Theory::FiveD => {
            Ok(-(2.0 * log_schur_q_rho(mu, params.q())? + n * params.big_q().ln()))
        }
    }
}

/// Difference between the hook-product and the kernel quadratic-form routes.
pub fn quadratic_energy_check(mu: &Partition, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let d = maya_delta(&params.with_charge(mu));
    let lhs = hook_product_neg_log(mu, params)?;
    let rhs = hook_energy(&d, params)?;
    Ok((lhs - rhs).abs())
}

/// `ℰ[ρ_{μ,s}]` from the kernel quadratic form and the linear potential terms.
pub fn energy_discrete(mu: &Partition, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let d = maya_delta(&params.with_charge(mu));
    let mut e = hook_energy(&d, params)?;
    match params.theory {
        Theory::FourD => {
            for (k, tk) in t_iter(&params.t) {
                let kp = k as f64 + 1.0;
                let lin: f64 = d
                    .iter()
                    .map(|(x, v)| (params.hbar * x as f64).powi(k as i32 + 1) / kp * v as f64)
                    .sum();
                e += tk * lin;
            }
        }
        Theory::FiveD => {
            let q = params.q();
            for (k, tk) in t_iter(&params.t) {
                let qk = q.powi(k as i32);
                let lin: f64 =
                    d.iter().map(|(x, v)| q.powf(k as f64 * x as f64) * v as f64).sum();
                e -= tk * qk / (1.0 - qk) * lin;
            }
        }
    }
    Ok(e)
}

/// Log of the `μ`-independent prefactor in front of `Σ e^{−ℰ}`.
pub fn energy_log_prefactor(params: &ModelParams) -> f64 {
    let sf = params.s as f64;
    match params.theory {
        Theory::FourD => sf * (sf + 1.0) * params.lambda0.ln(),
        Theory::FiveD => {
            let q = params.q();
            let lin: f64 = t_iter(&params.t)
                .map(|(k, tk)| {
                    let qk = q.powi(k as i32);
                    tk * qk / (1.0 - qk)
                })
                .sum();
            lin + sf * (sf + 1.0) / 2.0 * params.big_q().ln()
        }
    }
}

/// `𝒪ᵏ₄D` from the Maya moments, exposed for cross-checks.
pub fn o4d_moment(mu: &Partition, s: i64, k: u32) -> i128 {
    -moment(&maya_delta(&mu.clone().with_charge(s)), k)
}
