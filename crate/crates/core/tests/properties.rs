use std::f64::consts::PI;

use neumann_cert::certifier::{
    check_classical_first, check_dolph, check_greedy, check_l1_global, check_l1_partition, check_linf_partition,
    excess_ratio, greedy_partition_auto, Certificate, Verdict,
};
use neumann_cert::constants::{beta1, beta_inf, cot_sum_profile, f_min, j_min, lambda_n};
use neumann_cert::constructions::resonant_step;
use neumann_cert::ode::{find_nontrivial_neumann, neumann_shot, zero_profile};
use neumann_cert::oracle::{discrete_j_min, numeric_f_min};
use neumann_cert::suites::{random_case, random_partition, rng, Family};
use neumann_cert::{json, Interval, Potential};
use proptest::prelude::*;

const FAMILIES: [Family; 5] = [
    Family::Classical,
    Family::Dolph,
    Family::L1Global,
    Family::LinfPartition,
    Family::L1Partition,
];

fn all_positive(c: &Certificate) -> bool {
    c.margins.values().all(|m| *m > 0.0)
}

fn certificates(seed: u64, family: Family) -> (Potential, Vec<Certificate>) {
    let case = random_case(&mut rng(seed), family);
    let a = case.potential;
    let mut out = vec![check_classical_first(&a)];
    if case.n > 0 {
        out.push(check_dolph(&a, case.n).unwrap());
        if a.dominates(lambda_n(case.n, a.length())).holds {
            out.push(check_l1_global(&a, case.n).unwrap());
            out.push(check_greedy(&a, case.n, None).unwrap());
        }
    }
    if let Some(p) = &case.partition {
        out.push(check_linf_partition(&a, p).unwrap());
        out.push(check_l1_partition(&a, p).unwrap());
    }
    (a, out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cot_sum_profile_increases(n in 1u32..=10, m_off in 1u32..50) {
        let m = n + m_off;
        prop_assert!(cot_sum_profile(n, m + 1).unwrap() > cot_sum_profile(n, m).unwrap());
    }

    #[test]
    fn constant_scaling_laws(n in 1u32..=10, l in 0.1f64..10.0) {
        let b = beta1(n as f64, l).unwrap();
        prop_assert!((b - beta1(n as f64, 1.0).unwrap() / l).abs() <= 1e-12 * b);
        let lam = lambda_n(n, l);
        prop_assert!((lam - lambda_n(n, 1.0) / (l * l)).abs() <= 1e-12 * lam);
        prop_assert!(beta_inf(n, l) > lam);
        let chain = n as f64 * PI / l * f_min(2 * (n + 1), n as f64 * PI).unwrap();
        prop_assert!((b - chain).abs() <= 1e-12 * b);
    }

    #[test]
    fn j_min_is_nonnegative(width in 0.1f64..3.0, frac in 0.0f64..1.0) {
        let top = PI * PI / (4.0 * width * width);
        let m = top * frac.max(1e-6);
        let v = j_min(m, Interval::new(0.0, width).unwrap()).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v > 0.0 || frac == 1.0);
    }

    #[test]
    fn margins_decide_the_verdict(seed in any::<u64>(), f in 0usize..5) {
        let (_, certs) = certificates(seed, FAMILIES[f]);
        for c in &certs {
            prop_assert_eq!(c.verdict == Verdict::UniqueTrivial, all_positive(c), "{:?}", c.margins);
        }
    }

    #[test]
    fn certificates_are_deterministic(seed in any::<u64>(), f in 0usize..5) {
        let (_, first) = certificates(seed, FAMILIES[f]);
        let (_, second) = certificates(seed, FAMILIES[f]);
        prop_assert_eq!(json::to_string(&first), json::to_string(&second));
    }

    #[test]
    fn reflected_partition_reflects_the_resonant_solution(seed in any::<u64>(), n in 1u32..=3) {
        let part = random_partition(&mut rng(seed), n, 1.0, 0.5 / n as f64);
        let (_, sol) = resonant_step(&part).unwrap();
        let (_, back) = resonant_step(&part.reflected()).unwrap();
        prop_assert!(sol.max_joint_jump() <= 1e-12);
        let (s0, b0) = (sol.u(1.0), back.u(0.0));
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            prop_assert!((back.u(x) / b0 - sol.u(1.0 - x) / s0).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unique_verdicts_admit_no_nontrivial_solution(seed in any::<u64>(), f in 0usize..5) {
        let (a, certs) = certificates(seed, FAMILIES[f]);
        if certs.iter().any(|c| c.verdict == Verdict::UniqueTrivial) {
            prop_assert!(find_nontrivial_neumann(&a, 1e-7).unwrap().is_none());
        }
    }

    #[test]
    fn l1_global_implies_greedy(seed in any::<u64>()) {
        let case = random_case(&mut rng(seed), Family::L1Global);
        let a = case.potential;
        if a.dominates(lambda_n(case.n, a.length())).holds
            && check_l1_global(&a, case.n).unwrap().verdict == Verdict::UniqueTrivial
        {
            let part = greedy_partition_auto(&a, case.n).unwrap();
            prop_assert!(part.is_some());
            let cert = check_l1_partition(&a, &part.unwrap()).unwrap();
            prop_assert_eq!(cert.verdict, Verdict::UniqueTrivial);
        }
    }

    #[test]
    fn excess_ratio_is_nondecreasing(seed in any::<u64>(), start in 0.0f64..0.9) {
        let case = random_case(&mut rng(seed), Family::L1Global);
        let a = case.potential;
        let (n, l) = (case.n, a.length());
        prop_assume!(a.dominates(lambda_n(n, l)).holds);
        let s = start * l;
        let window = l / (2.0 * n as f64);
        let mut prev = 0.0;
        for k in 1..1000 {
            let r = excess_ratio(&a, n, s, s + window * k as f64 / 1000.0).unwrap();
            prop_assert!(r >= prev - 1e-12 * r.abs().max(1.0));
            prev = r;
        }
    }

    #[test]
    fn reversal_reflects_the_zero_profile(seed in any::<u64>(), n in 1u32..=3) {
        let part = random_partition(&mut rng(seed), n, 1.0, 0.5 / n as f64);
        let (a, _) = resonant_step(&part).unwrap();
        let fwd = zero_profile(&neumann_shot(&a).unwrap(), true).unwrap().points();
        let rev = zero_profile(&neumann_shot(&a.reflected()).unwrap(), true).unwrap().points();
        prop_assert_eq!(fwd.len(), rev.len());
        for (x, y) in fwd.iter().zip(rev.iter().rev()) {
            prop_assert!((x - (1.0 - y)).abs() <= 1e-9, "{} vs {}", x, 1.0 - y);
        }
    }

    #[test]
    fn pruefer_signs_agree(seed in any::<u64>(), f in 0usize..5) {
        let a = random_case(&mut rng(seed), FAMILIES[f]).potential;
        let t = neumann_shot(&a).unwrap();
        let scale = t.u.iter().chain(&t.du).fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..t.nodes.len() {
            if t.u[i].abs() > 1e-8 * scale {
                prop_assert_eq!(t.u[i] > 0.0, t.theta[i].sin() > 0.0);
            }
            if t.du[i].abs() > 1e-8 * scale {
                prop_assert_eq!(t.du[i] > 0.0, t.theta[i].cos() > 0.0);
            }
            prop_assert!(t.u[i] != 0.0 || t.du[i] != 0.0);
        }
    }

    #[test]
    fn discrete_j_min_stays_above_the_infimum(width in 0.2f64..3.0, frac in 0.02f64..1.0) {
        let m = frac * PI * PI / (4.0 * width * width);
        let i = Interval::new(0.0, width).unwrap();
        let d = discrete_j_min(m, i, 2000).unwrap();
        prop_assert!(d.value.is_finite());
        prop_assert!(d.value >= j_min(m, i).unwrap() - 1e-3);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn f_minimum_is_the_equal_split(r in 2u32..8, frac in 0.1f64..0.95, seed in any::<u64>()) {
        let s = frac * r as f64 * PI / 2.0;
        let rep = numeric_f_min(r, s, 10_000, seed).unwrap();
        prop_assert_eq!(rep.violations, 0);
        for z in &rep.argmin {
            prop_assert!((z - s / r as f64).abs() <= 1e-4);
        }
    }
}
