//! Acceptance criteria. Each prints one `PASS`/`FAIL` line with the
//! measured figures; the process fails if any criterion does.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use todashape_core::curve::{
    c_coeffs, c_coeffs_in, solve_4d, solve_5d, sqrt_p, y_of_z, Background, Point, SolveOptions,
};
use todashape_core::dtoda::{lax_flow_residual, lax_power_parts, verify_identification, LaxData};
use todashape_core::limitshape::{density_profile, verify_rh, GridSpec};
use todashape_core::model::{
    energy_discrete, energy_log_prefactor, log_weight, partition_function, quadratic_energy_check, ModelParams, Theory,
};
use todashape_core::partitions::{dim_exact, enumerate_partitions, Partition};
use todashape_core::prepotential::{gradient_report, hessian_symmetry};
use todashape_core::sampler::{compare_limit_shape, rsk_shape, sample_batch};

fn report(n: u32, ok: bool, elapsed: Duration, limit: Duration, detail: String) -> bool {
    let timed = elapsed <= limit;
    let verdict = if ok && timed { "PASS" } else { "FAIL" };
    println!("{verdict} criterion {n}: {detail}; {:.3} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs());
    ok && timed
}

fn bg4() -> Background {
    Background { theory: Theory::FourD, s: 0.0, t: vec![0.0, 0.05], lambda0: 1.0, r: 0.0 }
}

fn bg5() -> Background {
    Background { theory: Theory::FiveD, s: 0.0, t: vec![0.05], lambda0: 0.3, r: 1.0 }
}

fn criterion_01_plancherel_completeness() -> bool {
    let start = Instant::now();
    let mut worst = String::new();
    let mut ok = true;
    for n in 0..=8usize {
        let total: u128 = enumerate_partitions(n).iter().map(|m| dim_exact(m).unwrap().pow(2)).sum();
        let fact: u128 = (1..=n as u128).product();
        if total != fact {
            ok = false;
            worst = format!("n = {n}: {total} != {fact}");
        }
    }
    let detail = if ok { "Σ(dim μ)² = n! for n ≤ 8".to_string() } else { worst };
    report(1, ok, start.elapsed(), Duration::from_secs(1), detail)
}

fn criterion_02_partition_function_normalization() -> bool {
    let start = Instant::now();
    let z = partition_function(&ModelParams::four_d(1.0, 1.0, 0, vec![]), 12).unwrap();
    let err = (z.z - std::f64::consts::E).abs();
    report(
        2,
        err <= 1e-12,
        start.elapsed(),
        Duration::from_secs(1),
        format!("|Z − e| = {err:.3e} (tol 1e-12), last shell {:.3e}", z.last_shell),
    )
}

fn criterion_03_hook_kernel_route_equality() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst, mut biggest) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let n = rng.random_range(0..=10usize);
        let all = enumerate_partitions(n);
        let mu: Partition = all[rng.random_range(0..all.len())].clone();
        let s = rng.random_range(-3..=3i64);
        let t: Vec<f64> = (0..rng.random_range(0..=3usize)).map(|_| rng.random_range(-0.3..0.3)).collect();
        let params = if i % 2 == 0 {
            ModelParams::four_d(rng.random_range(0.2..1.0), rng.random_range(0.3..2.0), s, t)
        } else {
            ModelParams::five_d(rng.random_range(0.2..1.0), rng.random_range(0.5..1.5), rng.random_range(0.1..0.6), s, t)
        };
        let lw = log_weight(&mu, &params).unwrap();
        let via_energy = energy_log_prefactor(&params) - energy_discrete(&mu, &params).unwrap();
        worst = worst.max((lw - via_energy).abs()).max(quadratic_energy_check(&mu, &params).unwrap());
        biggest = biggest.max(lw.abs());
    }
    report(
        3,
        worst <= 1e-9,
        start.elapsed(),
        Duration::from_secs(5),
        format!("max route difference {worst:.3e} (tol 1e-9), max |log w| {biggest:.3e}"),
    )
}

fn criterion_04_solver_initial_conditions() -> bool {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (s, l0) in [(0.0, 1.0), (0.8, 0.5), (-1.5, 2.0)] {
        let c = solve_4d(s, &[], l0, SolveOptions::default()).unwrap();
        worst = worst.max((c.beta - s).abs()).max((c.lambda - l0).abs());
    }
    for (s, l0, r) in [(0.0, 0.3, 1.0), (0.5, 0.6, 1.2), (-0.7, 0.2, 2.0)] {
        let c = solve_5d(s, &[], l0, r, SolveOptions::default()).unwrap();
        let e = (-r * s).exp();
        worst = worst
            .max((c.beta - (1.0 + (r * l0) * (r * l0)) * e).abs())
            .max((c.lambda - l0 * e).abs());
    }
    report(4, worst <= 1e-12, start.elapsed(), Duration::from_secs(1), format!("max deviation {worst:.3e} (tol 1e-12)"))
}

fn criterion_05_riemann_hilbert_suite() -> bool {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for bg in [bg4(), bg5()] {
        let curve = bg.solve(SolveOptions::default()).unwrap();
        let rep = verify_rh(&curve, GridSpec::default()).unwrap();
        let per = rep.periodicity_residual.unwrap_or(0.0);
        ok &= rep.max_interior_residual <= 1e-8
            && rep.max_jump_residual <= 1e-8
            && rep.max_asymptotic() <= 1e-4
            && per <= 1e-10;
        parts.push(format!(
            "{}: interior {:.2e}, jump {:.2e}, asymptotic {:.2e}, periodicity {:.2e}",
            format!("{:?}", bg.theory),
            rep.max_interior_residual,
            rep.max_jump_residual,
            rep.max_asymptotic(),
            per
        ));
    }
    report(5, ok, start.elapsed(), Duration::from_secs(10), parts.join("; "))
}

fn criterion_06_laurent_identities() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut exact_ok = true;
    for _ in 0..20 {
        let a = BigRational::new(BigInt::from(rng.random_range(1..50)), BigInt::from(rng.random_range(1..30)));
        let b = BigRational::new(BigInt::from(rng.random_range(-50..50)), BigInt::from(rng.random_range(1..30)));
        let lax = LaxData::new(a.clone(), b.clone(), (-12, 12));
        let c = c_coeffs_in(&b, &a, 11);
        let two = BigRational::from_integer(BigInt::from(2));
        for k in 1..=10u32 {
            let parts = lax_power_parts(&lax, k).unwrap();
            let k = k as usize;
            exact_ok &= parts.zero_mode == c[k];
            exact_ok &= two.clone() * parts.minus_one_mode == (c[k + 1].clone() - b.clone() * c[k].clone()) / a.clone();
        }
    }
    let curve = bg4().solve(SolveOptions::default()).unwrap();
    let mut lax = LaxData::from_curve(&curve);
    lax.window = (-10, 10);
    let cf = c_coeffs(curve.beta, curve.lambda, 10);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(0.1..3.0));
        let y = y_of_z(Point::Off(z), &curve).unwrap();
        let sp = sqrt_p(Point::Off(z), &curve).unwrap();
        for k in 1..=6usize {
            let odd = lax_power_parts(&lax, k as u32).unwrap().odd.eval(y);
            let poly: Complex64 = (0..k).map(|j| cf[j] * z.powi((k - 1 - j) as i32)).sum();
            let want = poly * sp;
            worst = worst.max((odd - want).norm() / want.norm().max(1.0));
        }
    }
    report(
        6,
        exact_ok && worst <= 1e-11,
        start.elapsed(),
        Duration::from_secs(5),
        format!("exact modes k ≤ 10 over 20 rationals: {exact_ok}; odd-part identity max {worst:.2e} (tol 1e-11)"),
    )
}

fn criterion_07_string_equation_identification() -> bool {
    let start = Instant::now();
    let mut eq = 0.0f64;
    let mut wm = 0.0f64;
    let curves = [
        bg4().solve(SolveOptions::default()).unwrap(),
        solve_4d(0.3, &[0.1, 0.05, 0.02], 1.1, SolveOptions::default()).unwrap(),
        bg5().solve(SolveOptions::default()).unwrap(),
        solve_5d(0.1, &[0.05, 0.02], 0.3, 1.0, SolveOptions::default()).unwrap(),
    ];
    for c in &curves {
        let rep = verify_identification(c).unwrap();
        eq = eq.max(rep.eq1_residual).max(rep.eq2_residual.unwrap_or(0.0));
        wm = wm.max(rep.w_m_residual);
    }
    report(
        7,
        eq <= 1e-10 && wm <= 1e-11,
        start.elapsed(),
        Duration::from_secs(5),
        format!("string equations {eq:.2e} (tol 1e-10); W-to-M {wm:.2e} (tol 1e-11)"),
    )
}

fn criterion_08_lax_flow() -> bool {
    let start = Instant::now();
    let r1 = lax_flow_residual(1, &bg4(), 1e-5).unwrap();
    let r2 = lax_flow_residual(2, &bg4(), 1e-5).unwrap();
    report(
        8,
        r1 <= 1e-5 && r2 <= 1e-5,
        start.elapsed(),
        Duration::from_secs(30),
        format!("k=1 {r1:.2e}, k=2 {r2:.2e} (tol 1e-5)"),
    )
}

fn criterion_09_prepotential_routes() -> bool {
    let start = Instant::now();
    let (mut dc, mut cf, mut spread, mut hess) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for bg in [bg4(), bg5()] {
        for k in 1..=3 {
            let rep = gradient_report(&bg, k, 200, 1e-4).unwrap();
            dc = dc.max(rep.density_vs_contour);
            cf = cf.max(rep.contour_vs_fd);
            spread = spread.max(rep.radius_spread);
        }
        hess = hess.max(hessian_symmetry(&bg, 1, 2, 1e-3).unwrap());
    }
    report(
        9,
        dc <= 1e-6 && cf <= 1e-4 && spread <= 1e-9 && hess <= 1e-4,
        start.elapsed(),
        Duration::from_secs(60),
        format!(
            "density/contour {dc:.2e} (1e-6), contour/FD {cf:.2e} (1e-4), radius spread {spread:.2e} (1e-9), Hessian {hess:.2e} (1e-4)"
        ),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn criterion_10_arcsine_limit_shape() -> bool {
    let start = Instant::now();
    let mut counts: HashMap<Vec<usize>, u128> = HashMap::new();
    for p in permutations(4) {
        *counts.entry(rsk_shape(&p).parts().to_vec()).or_default() += 1;
    }
    let rsk_ok = enumerate_partitions(4)
        .iter()
        .all(|m| counts.get(m.parts()).copied().unwrap_or(0) == dim_exact(m).unwrap().pow(2));

    let curve = solve_4d(0.0, &[], 1.0, SolveOptions::default()).unwrap();
    let reference = density_profile(&curve, 512).unwrap();
    let edges: Vec<f64> = (0..=50).map(|j| -2.5 + 0.1 * j as f64).collect();
    let batch = sample_batch(1e4, 200, 20240601).unwrap();
    let cmp = compare_limit_shape(&batch, 0, &reference, &edges).unwrap();
    report(
        10,
        rsk_ok && cmp.sup_dist <= 0.05,
        start.elapsed(),
        Duration::from_secs(60),
        format!("RSK n=4 exact: {rsk_ok}; sup distance {:.4} (tol 0.05), L² {:.4}", cmp.sup_dist, cmp.l2_dist),
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> bool; 10] = [
        criterion_01_plancherel_completeness,
        criterion_02_partition_function_normalization,
        criterion_03_hook_kernel_route_equality,
        criterion_04_solver_initial_conditions,
        criterion_05_riemann_hilbert_suite,
        criterion_06_laurent_identities,
        criterion_07_string_equation_identification,
        criterion_08_lax_flow,
        criterion_09_prepotential_routes,
        criterion_10_arcsine_limit_shape,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
