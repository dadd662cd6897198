//! Partitions, hook lengths and Maya-diagram densities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition with an integer charge `s`.
///
/// Parts are weakly decreasing and strictly positive; trailing zeros are
/// stripped on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
    charge: i64,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!(
                "parts must be weakly decreasing: {parts:?}"
            )));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidParameter("zero part inside partition".into()));
        }
        Ok(Partition { parts, charge: 0 })
    }

    /// Builds a partition from parts already known to be valid.
    pub(crate) fn from_sorted(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(!parts.contains(&0));
        Partition { parts, charge: 0 }
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn with_charge(mut self, s: i64) -> Self {
        self.charge = s;
        self
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of nonzero rows.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let cols = (0..width)
            .map(|j| self.parts.iter().take_while(|&&p| p > j).count())
            .collect();
        Partition { parts: cols, charge: self.charge }
    }
}

/// All partitions of `n` in reverse-lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill(n, n, &mut cur, &mut out);
    out
}

fn fill(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition::from_sorted(cur.clone()));
        return;
    }
    for p in (1..=rest.min(max)).rev() {
        cur.push(p);
        fill(rest - p, p, cur, out);
        cur.pop();
    }
}

/// Hook length of every cell, row by row.
pub fn hook_lengths(mu: &Partition) -> Vec<usize> {
    let conj = mu.conjugate();
    let mut hooks = Vec::with_capacity(mu.size());
    for (i, &row) in mu.parts.iter().enumerate() {
        for j in 0..row {
            let arm = row - j - 1;
            let leg = conj.parts[j] - i - 1;
            hooks.push(arm + leg + 1);
        }
    }
    hooks
}

/// `dim μ` as an exact integer, available for `|μ| ≤ 30`.
pub fn dim_exact(mu: &Partition) -> Option<u128> {
    let n = mu.size();
    if n > 30 {
        return None;
    }
    let fact: u128 = (1..=n as u128).product();
    let hooks: u128 = hook_lengths(mu).into_iter().map(|h| h as u128).product();
    Some(fact / hooks)
}

/// `ln n!` by direct summation below 256 and Stirling's series above.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 256 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln dim μ`; exact integer route for `|μ| ≤ 20`, log space beyond.
pub fn log_dim_mu(mu: &Partition) -> f64 {
    if mu.size() <= 20 {
        return (dim_exact(mu).unwrap() as f64).ln();
    }
    ln_factorial(mu.size()) - hook_lengths(mu).into_iter().map(|h| (h as f64).ln()).sum::<f64>()
}

/// `κ(μ) = Σ μ_i (μ_i − 2i + 1)`.
pub fn kappa(mu: &Partition) -> i64 {
    mu.parts
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let m = m as i64;
            m * (m - 2 * (i as i64 + 1) + 1)
        })
        .sum()
}

/// Principal specialization `s_μ(q^ρ)` via the q-hook formula.
pub fn schur_q_rho(mu: &Partition, q: f64) -> Result<f64> {
    Ok(log_schur_q_rho(mu, q)?.exp())
}

pub fn log_schur_q_rho(mu: &Partition, q: f64) -> Result<f64> {
    check_q(q)?;
    let lq = q.ln();
    let mut acc = -(kappa(mu) as f64) * lq / 4.0;
    for h in hook_lengths(mu) {
        let h = h as f64;
        // q^{-h/2} - q^{h/2} = q^{-h/2} (1 - q^h)
        acc -= -h * lq / 2.0 + (-(h * lq).exp_m1()).ln();
    }
    Ok(acc)
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("q must lie in (0,1), got {q}")))
    }
}

/// Finite signed density `Δρ_{μ,s}` of a charged Maya diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MayaDensity {
    charge: i64,
    points: BTreeMap<i64, i64>,
}

impl MayaDensity {
    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn support_points(&self) -> Vec<i64> {
        self.points.keys().copied().collect()
    }

    pub fn values(&self) -> Vec<i64> {
        self.points.values().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.points.iter().map(|(&x, &v)| (x, v))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Occupied sites `s + μ_i − i` of the Maya diagram (finitely many rows).
pub fn maya_sites(mu: &Partition) -> Vec<i64> {
    let s = mu.charge;
    mu.parts
        .iter()
        .enumerate()
        .map(|(i, &m)| s + m as i64 - (i as i64 + 1))
        .collect()
}

pub fn maya_delta(mu: &Partition) -> MayaDensity {
    let mut points = BTreeMap::new();
    for a in maya_sites(mu) {
        *points.entry(a).or_insert(0) += 1;
        *points.entry(a + 1).or_insert(0) -= 1;
    }
    *points.entry(mu.charge - mu.len() as i64).or_insert(0) -= 1;
    points.retain(|_, v| *v != 0);
    MayaDensity { charge: mu.charge, points }
}

/// `Σ x^k Δρ(x)`, exact.
pub fn moment(d: &MayaDensity, k: u32) -> i128 {
    d.iter().map(|(x, v)| (x as i128).pow(k) * v as i128).sum()
}

/// `−Σ q^{kx} Δρ(x)`.
pub fn q_moment(d: &MayaDensity, k: u32, q: f64) -> f64 {
    -d.iter().map(|(x, v)| q.powf(k as f64 * x as f64) * v as f64).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn enumerates_in_reverse_lex_order() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        let four: Vec<_> = enumerate_partitions(4).into_iter().map(|m| m.parts).collect();
        assert_eq!(four, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn rejects_increasing_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 1, 0, 0]).unwrap().parts(), &[2, 1]);
    }

    #[test]
    fn hooks_small() {
        let mut h = hook_lengths(&p(&[2, 1]));
        h.sort();
        assert_eq!(h, vec![1, 1, 3]);
        let mut h = hook_lengths(&p(&[2, 2]));
        h.sort();
        assert_eq!(h, vec![1, 2, 2, 3]);
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(&p(&[1])), 0);
        assert_eq!(kappa(&p(&[2])), 2);
        assert_eq!(kappa(&p(&[1, 1])), -2);
    }

    #[test]
    fn vacuum_maya() {
        let d = maya_delta(&Partition::empty());
        assert_eq!(d.support_points(), vec![0]);
        assert_eq!(d.values(), vec![-1]);
    }

    #[test]
    fn single_box_q_moment() {
        let q: f64 = 0.3;
        let d = maya_delta(&p(&[1]));
        assert!((q_moment(&d, 1, q) - (q + 1.0 / q - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn log_dim_switches_route_consistently() {
        let mu = p(&[8, 6, 4, 2, 1]);
        let via_log = ln_factorial(mu.size())
            - hook_lengths(&mu).iter().map(|&h| (h as f64).ln()).sum::<f64>();
        assert!((log_dim_mu(&mu) - via_log).abs() < 1e-12);
    }

    #[test]
    fn stirling_matches_summation() {
        let direct: f64 = (2..=300).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(300) - direct).abs() < 1e-9);
    }
}
