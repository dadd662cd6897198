use std::collections::HashMap;

use proptest::prelude::*;
use todashape_core::partitions::*;

/// Standard Young tableaux by removing the largest entry, which sits in a corner.
fn syt_count(parts: &[usize], memo: &mut HashMap<Vec<usize>, u128>) -> u128 {
    if parts.is_empty() {
        return 1;
    }
    if let Some(&v) = memo.get(parts) {
        return v;
    }
    let mut total = 0;
    for i in 0..parts.len() {
        let corner = i + 1 == parts.len() || parts[i + 1] < parts[i];
        if corner {
            let mut next = parts.to_vec();
            next[i] -= 1;
            if next[i] == 0 {
                next.pop();
            }
            total += syt_count(&next, memo);
        }
    }
    memo.insert(parts.to_vec(), total);
    total
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `s_μ(x_1, …, x_N)` as the sum over semistandard tableaux, organized by
/// the branching rule `s_μ(x_1..x_N) = Σ_{μ/ν horizontal strip} s_ν(x_1..x_{N−1}) x_N^{|μ/ν|}`.
fn schur_ssyt(mu: &[usize], xs: &[f64]) -> f64 {
    // All sub-partitions of μ.
    let mut subs: Vec<Vec<usize>> = vec![vec![]];
    for (i, &m) in mu.iter().enumerate() {
        let mut next = Vec::new();
        for s in &subs {
            if s.len() < i {
                next.push(s.clone());
                continue;
            }
            next.push(s.clone());
            let cap = if i == 0 { m } else { m.min(s[i - 1]) };
            for v in 1..=cap {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        subs = next;
    }
    subs.sort();
    subs.dedup();
    let mut val: HashMap<Vec<usize>, f64> = subs.iter().map(|s| (s.clone(), if s.is_empty() { 1.0 } else { 0.0 })).collect();
    let get = |p: &[usize], i: usize| p.get(i).copied().unwrap_or(0);
    for &x in xs {
        let mut new = HashMap::new();
        for lam in &subs {
            let mut acc = 0.0;
            for nu in &subs {
                // ν ⊆ λ with λ/ν a horizontal strip: λ_{i+1} ≤ ν_i ≤ λ_i.
                let ok = (0..lam.len().max(nu.len()))
                    .all(|i| get(nu, i) <= get(lam, i) && get(nu, i) >= get(lam, i + 1));
                if ok {
                    let d: usize = lam.iter().sum::<usize>() - nu.iter().sum::<usize>();
                    acc += val[nu] * x.powi(d as i32);
                }
            }
            new.insert(lam.clone(), acc);
        }
        val = new;
    }
    val[mu]
}

#[test]
fn dim_matches_tableau_count_up_to_10() {
    let mut memo = HashMap::new();
    for n in 0..=10 {
        for mu in enumerate_partitions(n) {
            let want = syt_count(mu.parts(), &mut memo);
            assert_eq!(dim_exact(&mu), Some(want), "{:?}", mu.parts());
            assert!((log_dim_mu(&mu) - (want as f64).ln()).abs() < 1e-12);
        }
    }
}

#[test]
fn plancherel_completeness() {
    for n in 0..=8 {
        let total: u128 = enumerate_partitions(n).iter().map(|m| dim_exact(m).unwrap().pow(2)).sum();
        assert_eq!(total, factorial(n));
    }
}

#[test]
fn partition_counts_and_order() {
    let counts: Vec<usize> = (0..=10).map(|n| enumerate_partitions(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    let p4: Vec<Vec<usize>> = enumerate_partitions(4).iter().map(|m| m.parts().to_vec()).collect();
    assert_eq!(p4, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
}

#[test]
fn moments_closed_forms() {
    for n in 0..=8 {
        for mu in enumerate_partitions(n) {
            let size = mu.size() as i128;
            let kap = kappa(&mu) as i128;
            for s in -3..=3i64 {
                let d = maya_delta(&mu.clone().with_charge(s));
                let s = s as i128;
                assert_eq!(moment(&d, 0), -1);
                assert_eq!(moment(&d, 1), -s);
                assert_eq!(moment(&d, 2), -2 * size - s * s);
                assert_eq!(moment(&d, 3), -3 * kap - 6 * s * size - s * s * s);
                assert!(d.len() <= 2 * mu.len() + 1);
            }
        }
    }
}

#[test]
fn schur_matches_ssyt_sum() {
    for q in [0.2f64, 0.5] {
        let xs: Vec<f64> = (1..=40).map(|i| q.powf(i as f64 - 0.5)).collect();
        for n in 0..=6 {
            for mu in enumerate_partitions(n) {
                let got = schur_q_rho(&mu, q).unwrap();
                let want = schur_ssyt(mu.parts(), &xs);
                assert!(((got - want) / want).abs() < 1e-8, "{:?} q={q}: {got} vs {want}", mu.parts());
            }
        }
    }
}

#[test]
fn schur_rejects_bad_q() {
    let mu = Partition::new(vec![1]).unwrap();
    for q in [0.0, 1.0, -0.5, f64::NAN] {
        assert!(schur_q_rho(&mu, q).is_err());
    }
}

fn partition_strategy() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1usize..8, 0..8).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

proptest! {
    #[test]
    fn conjugate_is_involution(mu in partition_strategy()) {
        let c = mu.conjugate();
        let cc = c.conjugate();
        prop_assert_eq!(c.size(), mu.size());
        prop_assert_eq!(cc.parts(), mu.parts());
        prop_assert_eq!(kappa(&c), -kappa(&mu));
    }

    #[test]
    fn hooks_count_cells(mu in partition_strategy()) {
        let h = hook_lengths(&mu);
        prop_assert_eq!(h.len(), mu.size());
        prop_assert!(h.iter().all(|&x| x >= 1));
    }

    #[test]
    fn maya_zeroth_moment(mu in partition_strategy(), s in -5i64..5) {
        let d = maya_delta(&mu.with_charge(s));
        prop_assert_eq!(d.values().iter().sum::<i64>(), -1);
        prop_assert_eq!(moment(&d, 1), -(s as i128));
    }

    #[test]
    fn q_moment_two_routes(mu in partition_strategy(), s in -3i64..3, q in 0.1f64..0.9, k in 1u32..4) {
        let d = maya_delta(&mu.with_charge(s));
        let direct: f64 = -d.iter().map(|(x, v)| q.powf(k as f64 * x as f64) * v as f64).sum::<f64>();
        let got = q_moment(&d, k, q);
        prop_assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }
}
