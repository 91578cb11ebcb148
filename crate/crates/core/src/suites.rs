//! Seeded random potential families and the `verify` suites built on them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::certifier::{
    check_l1_global, check_l1_partition, greedy_partition_auto, verify_zero_distribution, Assertion, Partition,
};
use crate::constants::{beta1, f_min, interval_l1_bound, j_min, lambda_n};
use crate::constructions::{constant_resonant, l1_counterexample, minimizing_sequence, resonant_step};
use crate::ode::{neumann_residual, BoundaryKind};
use crate::oracle::{brute_partition_check, discrete_j_min, fd_resonance_extrapolated, numeric_f_min};
use crate::potential::{Interval, Potential};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Which criterion a random case is aimed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Classical,
    Dolph,
    L1Global,
    LinfPartition,
    L1Partition,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub potential: Potential,
    pub n: u32,
    pub partition: Option<Partition>,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_length(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        rng.random_range(0.5..3.0)
    }
}

/// Sorted breakpoints `0 < … < L` for `cells` cells, gaps at least `L/(20 cells)`.
fn random_breaks(rng: &mut ChaCha8Rng, length: f64, cells: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..cells).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut pts = vec![0.0];
    let mut acc = 0.0;
    for v in &w[..cells - 1] {
        acc += v / total * length;
        pts.push(acc);
    }
    pts.push(length);
    pts
}

/// A partition with `2n + 2` cells, every gap below `max_gap`.
pub fn random_partition(rng: &mut ChaCha8Rng, n: u32, length: f64, max_gap: f64) -> Partition {
    let cells = 2 * n as usize + 2;
    loop {
        let pts = random_breaks(rng, length, cells);
        if pts.windows(2).all(|w| w[1] - w[0] < max_gap) {
            if let Ok(p) = Partition::new(pts, n) {
                return p;
            }
        }
    }
}

/// `base` plus rectangular bumps of the given masses at random places.
fn with_bumps(rng: &mut ChaCha8Rng, length: f64, base: f64, masses: &[f64], within: Interval) -> Potential {
    let k = masses.len();
    let slot = within.len() / k as f64;
    let mut bps = vec![0.0];
    let mut vals = vec![];
    for (i, &m) in masses.iter().enumerate() {
        let lo_slot = within.lo + i as f64 * slot;
        let width = slot * rng.random_range(0.05..0.9);
        let start = lo_slot + rng.random_range(0.0..(slot - width));
        if start > *bps.last().unwrap() {
            bps.push(start);
            vals.push(base);
        }
        bps.push(start + width);
        vals.push(base + m / width);
    }
    if *bps.last().unwrap() < length {
        bps.push(length);
        vals.push(base);
    } else {
        *bps.last_mut().unwrap() = length;
    }
    Potential::piecewise_constant(bps, vals).expect("valid bump potential")
}

fn random_steps(rng: &mut ChaCha8Rng, length: f64, lo: f64, hi: f64) -> Potential {
    let k = rng.random_range(1..=8usize);
    let bps = random_breaks(rng, length, k);
    let vals = (0..k).map(|_| rng.random_range(lo..hi)).collect();
    Potential::piecewise_constant(bps, vals).expect("valid step potential")
}

fn random_smooth(rng: &mut ChaCha8Rng, length: f64, lo: f64, hi: f64) -> Potential {
    let nodes = rng.random_range(20..200usize);
    let amps: Vec<(f64, f64)> = (0..3).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI))).collect();
    let grid: Vec<f64> = (0..=nodes).map(|j| if j == nodes { length } else { j as f64 * length / nodes as f64 }).collect();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    Potential::sample_fn(grid, |x| {
        let s: f64 = amps
            .iter()
            .enumerate()
            .map(|(k, (a, p))| a * ((k + 1) as f64 * PI * x / length + p).sin())
            .sum();
        mid + half * s / 3.0
    })
    .expect("valid sampled potential")
}

/// A random case aimed at `family`. Roughly a fifth of the cases are
/// exactly resonant constructions.
pub fn random_case(rng: &mut ChaCha8Rng, family: Family) -> Case {
    let length = random_length(rng);
    let n = rng.random_range(1..=3u32);
    let lam = lambda_n(n, length);
    let resonant = rng.random_bool(0.2);
    match family {
        Family::Classical => {
            let c = PI * PI / (length * length);
            let potential = if resonant {
                constant_resonant(1, length).unwrap().0
            } else if rng.random_bool(0.5) {
                random_steps(rng, length, -0.5 * c, 1.3 * c)
            } else {
                random_smooth(rng, length, -0.5 * c, 1.3 * c)
            };
            Case { potential, n: 0, partition: None }
        }
        Family::Dolph => {
            let next = lambda_n(n + 1, length);
            let potential = if resonant {
                constant_resonant(if rng.random_bool(0.5) { n } else { n + 1 }, length).unwrap().0
            } else {
                let (lo, hi) = (lam - 0.1 * (next - lam), next + 0.1 * (next - lam));
                if rng.random_bool(0.5) {
                    random_steps(rng, length, lo, hi)
                } else {
                    random_smooth(rng, length, lo, hi)
                }
            };
            Case { potential, n, partition: None }
        }
        Family::L1Global => {
            let potential = if resonant {
                let eps = length / (2.0 * (n as f64 + 1.0)) / 10.0 * rng.random_range(0.01..1.0);
                minimizing_sequence(n, length, eps).unwrap().0
            } else {
                let b = beta1(n as f64, length).unwrap();
                let k = rng.random_range(1..=4usize);
                let total = b * rng.random_range(0.2..1.3);
                let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
                let sw: f64 = w.iter().sum();
                let masses: Vec<f64> = w.iter().map(|v| total * v / sw).collect();
                with_bumps(rng, length, lam, &masses, Interval { lo: 0.0, hi: length })
            };
            Case { potential, n, partition: None }
        }
        Family::LinfPartition => {
            let part = random_partition(rng, n, length, length / (2.0 * n as f64));
            let (exact, _) = resonant_step(&part).unwrap();
            let potential = if resonant {
                exact
            } else {
                let vals = exact
                    .values()
                    .iter()
                    .map(|v| v * if rng.random_bool(0.3) { 1.0 } else { rng.random_range(0.9..1.02) })
                    .collect();
                Potential::piecewise_constant(part.points().to_vec(), vals).unwrap()
            };
            Case { potential, n, partition: Some(part) }
        }
        Family::L1Partition => {
            let window = length / (2.0 * n as f64);
            let part = random_partition(rng, n, length, window * 0.98);
            let potential = if resonant {
                resonant_step(&part).unwrap().0
            } else {
                // one bump per cell, mass relative to the cell's bound
                let mut bps = vec![0.0];
                let mut vals = vec![];
                for cell in part.intervals() {
                    let bound = interval_l1_bound(n, length, cell.len()).unwrap();
                    let mass = bound * rng.random_range(0.3..1.05);
                    let width = cell.len() * rng.random_range(0.05..0.5);
                    let start = cell.lo + rng.random_range(0.0..(cell.len() - width));
                    for (x, v) in [(start, lam), (start + width, lam + mass / width), (cell.hi, lam)] {
                        if x > *bps.last().unwrap() {
                            bps.push(x);
                            vals.push(v);
                        }
                    }
                }
                *bps.last_mut().unwrap() = length;
                Potential::piecewise_constant(bps, vals).unwrap()
            };
            Case { potential, n, partition: Some(part) }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, assertions: Vec<Assertion>) -> Self {
        let passed = assertions.iter().all(|a| a.passed);
        Self {
            suite: suite.into(),
            seed,
            passed,
            assertions,
        }
    }
}

fn assertion(name: impl Into<String>, passed: bool, slack: f64) -> Assertion {
    Assertion {
        name: name.into(),
        passed,
        slack,
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let assertions = match name {
        "j" => suite_j()?,
        "f" => suite_f(seed)?,
        "spectrum" => suite_spectrum(seed)?,
        "partition" => suite_partition()?,
        "lemma22" => suite_lemma22(seed)?,
        "thm32" => suite_thm32(seed)?,
        other => return Err(Error::Argument(format!("unknown suite {other:?}"))),
    };
    Ok(SuiteReport::new(name, seed, assertions))
}

/// `(M, |I|)` pairs spanning the admissible range, the last on the boundary.
pub fn j_pairs() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for len in [0.5, 1.0, 2.0, PI / 3.0] {
        let bound = PI * PI / (4.0 * len * len);
        for frac in [0.05, 0.3, 0.6, 0.9, 1.0] {
            out.push((bound * frac, len));
        }
    }
    out
}

fn suite_j() -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for (m, len) in j_pairs() {
        let i = Interval::new(0.0, len)?;
        let exact = j_min(m, i)?;
        let d = discrete_j_min(m, i, 2000)?;
        let err = (d.value - exact).abs();
        let allowed = if exact.abs() < 1e-12 { 1e-4 } else { 1e-4 * exact.abs() };
        out.push(assertion(format!("j_min(M={m:.6}, |I|={len:.6})"), err <= allowed, allowed - err));
    }
    Ok(out)
}

fn suite_f(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for (r, s) in [(4u32, PI), (3, PI / 2.0), (6, 2.0 * PI * 0.9 / 2.0)] {
        let rep = numeric_f_min(r, s, 100_000, seed)?;
        let exact = f_min(r, s)?;
        let err = (rep.value - exact).abs();
        out.push(assertion(format!("value(r={r})"), err <= 1e-6, 1e-6 - err));
        out.push(assertion(format!("violations(r={r})"), rep.violations == 0, -(rep.violations as f64)));
        let spread = rep.argmin.iter().fold(0.0f64, |m, z| m.max((z - s / r as f64).abs()));
        out.push(assertion(format!("equal_components(r={r})"), spread <= 1e-4, 1e-4 - spread));
    }
    Ok(out)
}

/// Shooting and finite-difference detectors on one potential:
/// `(|residual| ≤ 10⁻⁷, |σ| ≤ 10⁻³, residual, |σ|)` where `σ` is the
/// eigenvalue nearest zero extrapolated from grids `N` and `2N`.
pub fn detector_pair(a: &Potential, grid: usize) -> Result<(bool, bool, f64, f64)> {
    let res = neumann_residual(a)?;
    let sigma = fd_resonance_extrapolated(a, grid, BoundaryKind::NeumannNeumann)?.abs();
    Ok((res.abs() <= 1e-7, sigma <= 1e-3, res, sigma))
}

fn suite_spectrum(seed: u64) -> Result<Vec<Assertion>> {
    let mut rng = rng(seed);
    let families = [Family::Dolph, Family::LinfPartition, Family::L1Partition, Family::Classical];
    let total = 80;
    let mut agree = 0;
    for k in 0..total {
        let case = random_case(&mut rng, families[k % families.len()]);
        let (shoot, fd, _, _) = detector_pair(&case.potential, 2000)?;
        if shoot == fd {
            agree += 1;
        }
    }
    let rate = agree as f64 / total as f64;
    Ok(vec![assertion("shooting_fd_agreement", rate >= 0.99, rate - 0.99)])
}

fn suite_partition() -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    let a = Potential::constant(1.0, PI * PI + 1.0)?;
    let brute = brute_partition_check(&a, 1, 40)?;
    let greedy = greedy_partition_auto(&a, 1)?;
    out.push(assertion("brute_found", brute.is_some(), 0.0));
    out.push(assertion("greedy_found", greedy.is_some(), 0.0));
    let lam2 = Potential::constant(1.0, 4.0 * PI * PI)?;
    out.push(assertion("resonant_absent", brute_partition_check(&lam2, 1, 40)?.is_none(), 0.0));
    let part = Partition::new(vec![0.0, 0.2, 0.45, 0.8, 1.0], 1)?;
    let c = l1_counterexample(&part, 1e-3)?;
    out.push(assertion("counterexample_found", brute_partition_check(&c, 1, 20)?.is_some(), 0.0));
    Ok(out)
}

fn lemma22_assertions(out: &mut Vec<Assertion>, label: &str, a: &Potential, n: u32) -> Result<()> {
    let r = verify_zero_distribution(a, n)?;
    let worst = r.assertions.iter().map(|a| a.slack).fold(f64::INFINITY, f64::min);
    out.push(assertion(format!("{label}: m={}", r.m), r.passed, worst));
    Ok(())
}

fn suite_lemma22(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for q in 2..=6 {
        lemma22_assertions(&mut out, &format!("lambda_{q}"), &constant_resonant(q, 1.0)?.0, 1)?;
    }
    for n in [1, 2] {
        lemma22_assertions(&mut out, &format!("minimizing(n={n})"), &minimizing_sequence(n, 1.0, 1e-2)?.0, n)?;
    }
    let mut rng = rng(seed);
    for k in 0..5 {
        let n = 1 + k % 2;
        let part = random_partition(&mut rng, n, 1.0, 1.0 / (2.0 * n as f64));
        lemma22_assertions(&mut out, &format!("resonant_step#{k}"), &resonant_step(&part)?.0, n)?;
    }
    Ok(out)
}

fn suite_thm32(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    let mut rng = rng(seed);
    let mut tried = 0;
    let mut certified = 0;
    while tried < 50 {
        let case = random_case(&mut rng, Family::L1Global);
        if !check_l1_global(&case.potential, case.n)?.is_unique() {
            continue;
        }
        tried += 1;
        if let Some(p) = greedy_partition_auto(&case.potential, case.n)? {
            if check_l1_partition(&case.potential, &p)?.is_unique() {
                certified += 1;
            }
        }
    }
    out.push(assertion("greedy_implication", certified == tried, (certified - tried) as f64));
    let part = Partition::new(vec![0.0, 0.2, 0.45, 0.8, 1.0], 1)?;
    let c = l1_counterexample(&part, 1e-3)?;
    let partition_ok = check_l1_partition(&c, &part)?.is_unique();
    out.push(assertion("counterexample_partition", partition_ok, 0.0));
    let excess = c.l1_excess(PI * PI, c.domain())? - beta1(1.0, 1.0)?;
    out.push(assertion("counterexample_excess", excess > 0.0, excess));
    Ok(out)
}
