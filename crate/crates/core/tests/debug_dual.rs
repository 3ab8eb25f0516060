mod common;
use common::{gnp, rng};
use rand::Rng;
use collapse_core::lp::{build_detection_lp, build_dual};
use collapse_core::simplex::simplex_solve;

#[test]
fn lambda_cap_formula_stress() {
    let mut r = rng(0xA11CE);
    let mut fail_2n = 0;
    let mut fail_ndelta = 0;
    let mut trials = 0;
    for _ in 0..1500 {
        let n = r.random_range(8..=36);
        let p = r.random_range(0.1..=0.6);
        let g = gnp(&mut r, n, p);
        let k = r.random_range(2..=4);
        let mut w = vec![false; n];
        let picks = r.random_range(1..=3usize);
        while w.iter().filter(|&&x| x).count() < picks.min(n) {
            w[r.random_range(0..n)] = true;
        }
        trials += 1;
        let primal = simplex_solve(&build_detection_lp(&g, k, Some(&w))).objective;
        let max_deg = (0..n as u32).map(|v| g.degree(v)).max().unwrap_or(0);

        for (cap, counter) in [
            (2.0 * n as f64, &mut fail_2n),
            ((n as f64) * ((max_deg as f64 - k as f64).max(0.0) + 2.0), &mut fail_ndelta),
        ] {
            let mut d = build_dual(&g, k, &w);
            for (j, name) in d.var_names.iter().enumerate() {
                if name.starts_with("lambda_") { d.var_ub[j] = cap; }
            }
            let sol = simplex_solve(&d);
            if (primal - sol.objective).abs() > 1e-6 * (1.0 + primal.abs()) {
                *counter += 1;
            }
        }
    }
    println!("trials={trials} fail_2n={fail_2n} fail_n_delta={fail_ndelta}");
}
