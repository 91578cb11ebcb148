//! Explicit resonant potentials together with their Neumann solutions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::certifier::{check_l1_partition, Partition};
use crate::constants::{beta1, cot, interval_l1_bound, lambda_n};
use crate::potential::Potential;
use crate::{Error, Result};

/// Nodes used to sample each smooth bump of the minimizing sequence.
pub const BUMP_NODES: usize = 10_000;

/// One closed-form piece of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    /// `k cos(ω (x − anchor))`
    Cosine { k: f64, omega: f64, anchor: f64 },
    /// `sign · b(t)` with `t = x − origin` or `t = origin − x` (`mirrored`), where
    /// `b(t) = −sin(ω(t − h)) + ω c (t − ε)³ / (3ε²)` for `t ≤ ε` and
    /// `−sin(ω(t − h))` beyond.
    CubicCorrected {
        sign: f64,
        origin: f64,
        mirrored: bool,
        omega: f64,
        h: f64,
        eps: f64,
        c: f64,
    },
}

impl Piece {
    /// `(u, u', u'')` at `x`.
    pub fn jet(&self, x: f64) -> [f64; 3] {
        match *self {
            Piece::Cosine { k, omega, anchor } => {
                let (s, c) = (omega * (x - anchor)).sin_cos();
                [k * c, -k * omega * s, -k * omega * omega * c]
            }
            Piece::CubicCorrected { sign, origin, mirrored, omega, h, eps, c } => {
                let (t, dt) = if mirrored { (origin - x, -1.0) } else { (x - origin, 1.0) };
                let (s, co) = (omega * (t - h)).sin_cos();
                let mut b = [-s, -omega * co, omega * omega * s];
                if t <= eps {
                    let d = t - eps;
                    let q = omega * c / (eps * eps);
                    b[0] += q * d * d * d / 3.0;
                    b[1] += q * d * d;
                    b[2] += 2.0 * q * d;
                }
                [sign * b[0], sign * dt * b[1], sign * b[2]]
            }
        }
    }
}

/// A `C¹` solution glued from closed-form pieces on `[breakpoints[i], breakpoints[i+1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSolution {
    pub construction: String,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Piece>,
}

impl ClosedFormSolution {
    fn piece_index(&self, x: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        i.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn jet(&self, x: f64) -> [f64; 3] {
        self.pieces[self.piece_index(x)].jet(x)
    }

    pub fn u(&self, x: f64) -> f64 {
        self.jet(x)[0]
    }

    pub fn du(&self, x: f64) -> f64 {
        self.jet(x)[1]
    }

    pub fn ddu(&self, x: f64) -> f64 {
        self.jet(x)[2]
    }

    /// Largest jump of `u` or `u'` across interior breakpoints.
    pub fn max_joint_jump(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, &b) in self.breakpoints.iter().enumerate().skip(1).take(self.pieces.len() - 1) {
            let l = self.pieces[i - 1].jet(b);
            let r = self.pieces[i].jet(b);
            worst = worst.max((l[0] - r[0]).abs()).max((l[1] - r[1]).abs());
        }
        worst
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Argument(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `u_ε` and `a_ε = −u_ε''/u_ε`: a resonant potential above `λ_n` whose
/// excess `‖a_ε − λ_n‖₁` tends to `β_{1,n}` as `ε → 0⁺`.
///
/// The base piece on `[0, h]`, `h = L/(2(n+1))`, is reflected across every
/// multiple of `h`, flipping sign at odd multiples. `a_ε` is sampled on
/// [`BUMP_NODES`] nodes inside each corrected region and equals `λ_n`
/// elsewhere.
pub fn minimizing_sequence(n: u32, length: f64, eps: f64) -> Result<(Potential, ClosedFormSolution)> {
    check_positive("L", length)?;
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let pieces_count = 2 * (n as usize + 1);
    let h = length / pieces_count as f64;
    if !(eps > 0.0 && eps <= h / 10.0) {
        return Err(Error::Argument(format!("eps must lie in (0, L/(20(n+1))] = (0, {}], got {eps}", h / 10.0)));
    }
    let omega = n as f64 * PI / length;
    let c = (omega * h).cos();
    let level = lambda_n(n, length);

    let mut breakpoints = Vec::with_capacity(pieces_count + 1);
    let mut pieces = Vec::with_capacity(pieces_count);
    for k in 0..pieces_count {
        let lo = k as f64 * h;
        breakpoints.push(lo);
        let mirrored = k % 2 == 1;
        let origin = if mirrored { (k + 1) as f64 * h } else { lo };
        let sign = if ((k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        pieces.push(Piece::CubicCorrected { sign, origin, mirrored, omega, h, eps, c });
    }
    breakpoints.push(length);
    let sol = ClosedFormSolution {
        construction: "minimizing_sequence".into(),
        breakpoints,
        pieces,
    };

    let base = Piece::CubicCorrected { sign: 1.0, origin: 0.0, mirrored: false, omega, h, eps, c };
    let a_at = |t: f64| -> f64 {
        let [b, _, b2] = base.jet(t);
        -b2 / b
    };
    // a on the corrected part of the base piece, t ∈ [0, ε]
    let bump: Vec<(f64, f64)> = (0..=BUMP_NODES)
        .map(|j| {
            let t = if j == BUMP_NODES { eps } else { eps * j as f64 / BUMP_NODES as f64 };
            (t, if j == BUMP_NODES { level } else { a_at(t).max(level) })
        })
        .collect();
    let mut grid = Vec::with_capacity(pieces_count * (BUMP_NODES + 2));
    let mut values = Vec::with_capacity(grid.capacity());
    for k in 0..pieces_count {
        let lo = k as f64 * h;
        let hi = if k + 1 == pieces_count { length } else { (k + 1) as f64 * h };
        if k % 2 == 0 {
            for &(t, v) in &bump {
                grid.push(lo + t);
                values.push(v);
            }
        } else {
            grid.push(hi - eps);
            values.push(level);
            for &(t, v) in bump.iter().rev().skip(1) {
                grid.push(if t == 0.0 { hi } else { hi - t });
                values.push(v);
            }
        }
    }
    // adjacent pieces share the node at even multiples of h
    let mut g = Vec::with_capacity(grid.len());
    let mut vals = Vec::with_capacity(grid.len());
    for (x, v) in grid.into_iter().zip(values) {
        if g.last().is_some_and(|&p: &f64| x <= p) {
            continue;
        }
        g.push(x);
        vals.push(v);
    }
    let a = Potential::sampled(g, vals)?;
    if sol.du(0.0).abs() > 1e-12 * omega || sol.du(length).abs() > 1e-12 * omega {
        return Err(Error::Construction(format!(
            "u_eps'(0) = {}, u_eps'(L) = {}",
            sol.du(0.0),
            sol.du(length)
        )));
    }
    Ok((a, sol))
}

/// The step potential `π²/(4Δ_i²)` on each cell of `part` with its cosine solution.
///
/// On even cells `u = k_i cos(π(x − y_i)/(2Δ_i))`, on odd cells
/// `u = k_i cos(π(x − y_{i+1})/(2Δ_i))`, so `u` vanishes at odd partition
/// points and `u'` at even ones.
pub fn resonant_step(part: &Partition) -> Result<(Potential, ClosedFormSolution)> {
    let pts = part.points();
    let gaps = part.gaps();
    let mut pieces = Vec::with_capacity(gaps.len());
    let mut k = 1.0;
    for (i, &d) in gaps.iter().enumerate() {
        let omega = PI / (2.0 * d);
        if i % 2 == 1 {
            // u matches at the zero y_i: derivative continuity
            k = -k * d / gaps[i - 1];
        }
        let anchor = if i % 2 == 0 { pts[i] } else { pts[i + 1] };
        pieces.push(Piece::Cosine { k, omega, anchor });
    }
    let values = gaps.iter().map(|d| PI * PI / (4.0 * d * d)).collect();
    let a = Potential::piecewise_constant(pts.to_vec(), values)?;
    let sol = ClosedFormSolution {
        construction: "resonant_step".into(),
        breakpoints: pts.to_vec(),
        pieces,
    };
    Ok((a, sol))
}

/// `a ≡ λ_q` with `u = cos(qπx/L)`.
pub fn constant_resonant(q: u32, length: f64) -> Result<(Potential, ClosedFormSolution)> {
    check_positive("L", length)?;
    if q == 0 {
        return Err(Error::Argument("q must be at least 1".into()));
    }
    let a = Potential::constant(length, lambda_n(q, length))?;
    let sol = ClosedFormSolution {
        construction: "constant_resonant".into(),
        breakpoints: vec![0.0, length],
        pieces: vec![Piece::Cosine {
            k: 1.0,
            omega: q as f64 * PI / length,
            anchor: 0.0,
        }],
    };
    Ok((a, sol))
}

/// `|u'(0)|` for `u = sin(nπ(x − h)/L) / sin(−nπh/L)`, `h = L/(2(n+1))`: the
/// extremal an attained bound would force on the first cell, which violates
/// the Neumann condition at 0.
pub fn non_attainment_witness(n: u32, length: f64) -> Result<f64> {
    check_positive("L", length)?;
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let omega = n as f64 * PI / length;
    let h = length / (2.0 * (n as f64 + 1.0));
    Ok(omega * cot(omega * h)?)
}

/// `λ_n` plus one rectangular bump per cell with
/// `‖a − λ_n‖_{L¹(cell)} = (nπ/L) cot(nπΔ_i/L) − eps`.
///
/// Bumps have width `min(Δ_i/10, L/100)` and sit against the odd partition
/// point of each cell. For unequal gaps the total excess exceeds `β_{1,n}`
/// while the partition criterion still certifies uniqueness.
pub fn l1_counterexample(part: &Partition, eps: f64) -> Result<Potential> {
    let n = part.n();
    let l = part.length();
    let gaps = part.gaps();
    let window = l / (2.0 * n as f64);
    if gaps.iter().any(|&g| g >= window) {
        return Err(Error::Argument(format!("every gap must be below L/(2n) = {window}")));
    }
    let (gmin, gmax) = gaps.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    if gmax - gmin <= 1e-12 * l {
        return Err(Error::Argument("gaps must not all be equal".into()));
    }
    let bounds = gaps
        .iter()
        .map(|&g| interval_l1_bound(n, l, g))
        .collect::<Result<Vec<f64>>>()?;
    if !(eps > 0.0) || bounds.iter().any(|&b| eps >= b) {
        return Err(Error::Argument(format!("eps must lie in (0, min bound); got {eps}")));
    }
    let level = lambda_n(n, l);
    let pts = part.points();
    let mut bps = vec![0.0];
    let mut vals = Vec::new();
    for (i, &d) in gaps.iter().enumerate() {
        let w = (d / 10.0).min(0.01 * l);
        let height = level + (bounds[i] - eps) / w;
        let (lo, hi) = (pts[i], pts[i + 1]);
        if i % 2 == 0 {
            bps.extend([hi - w, hi]);
            vals.extend([level, height]);
        } else {
            bps.extend([lo + w, hi]);
            vals.extend([height, level]);
        }
    }
    let a = Potential::piecewise_constant(bps, vals)?;
    if !a.dominates(level).holds {
        return Err(Error::Construction("counterexample does not dominate λ_n".into()));
    }
    if !check_l1_partition(&a, part)?.is_unique() {
        return Err(Error::Construction("counterexample fails the L¹ partition criterion".into()));
    }
    let total = a.l1_excess(level, a.domain())?;
    let b = beta1(n as f64, l)?;
    if total <= b {
        return Err(Error::Construction(format!("total excess {total} does not exceed β₁ = {b}")));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{neumann_residual, neumann_shot, zero_profile};
    use crate::potential::Interval;

    const PI2: f64 = PI * PI;

    fn reference_partition() -> Partition {
        Partition::new(vec![0.0, 0.2, 0.45, 0.8, 1.0], 1).unwrap()
    }

    /// `|u'' + a u| / max(1, |u''|)` at the given points.
    fn ode_defect(a: &Potential, sol: &ClosedFormSolution, xs: impl Iterator<Item = f64>) -> f64 {
        xs.map(|x| {
            let [u, _, u2] = sol.jet(x);
            (u2 + a.eval(x) * u).abs() / u2.abs().max(1.0)
        })
        .fold(0.0, f64::max)
    }

    fn interior_samples(sol: &ClosedFormSolution, per_piece: usize) -> Vec<f64> {
        sol.breakpoints
            .windows(2)
            .flat_map(|w| (0..per_piece).map(move |j| w[0] + (w[1] - w[0]) * (j as f64 + 0.5) / per_piece as f64))
            .collect()
    }

    #[test]
    fn minimizing_sequence_shape() {
        for n in [1, 2, 3] {
            let eps = 1e-2 / n as f64;
            let (a, sol) = minimizing_sequence(n, 1.0, eps).unwrap();
            let level = lambda_n(n, 1.0);
            assert!(sol.max_joint_jump() < 1e-12, "n={n}");
            assert!(sol.du(0.0).abs() < 1e-12);
            assert!(sol.du(1.0).abs() < 1e-12);
            assert!(a.dominates(level).holds);
            let h = 1.0 / (2.0 * (n as f64 + 1.0));
            let flat = Interval::new(eps, h).unwrap();
            assert_eq!(a.ess_inf(flat).unwrap(), level);
            assert_eq!(a.ess_sup(flat).unwrap(), level);
            // nodes carry exact values of −u''/u
            let defect = ode_defect(&a, &sol, a.breakpoints().iter().copied().filter(|&x| sol.u(x).abs() > 1e-3));
            assert!(defect < 1e-8, "n={n}: {defect}");
            let flat_pts = interior_samples(&sol, 1000).into_iter().filter(|x| {
                let t = (x / h).fract() * h;
                t > eps && t < h - eps
            });
            assert!(ode_defect(&a, &sol, flat_pts) < 1e-8);
        }
    }

    #[test]
    fn minimizing_sequence_is_resonant_and_approaches_beta1() {
        let (a, _) = minimizing_sequence(1, 1.0, 1e-2).unwrap();
        assert!(neumann_residual(&a).unwrap().abs() <= 1e-7);
        let excess = a.l1_excess(PI2, a.domain()).unwrap();
        assert!((excess - 4.0 * PI).abs() / (4.0 * PI) < 0.02, "{excess}");
        let p = zero_profile(&neumann_shot(&a).unwrap(), true).unwrap();
        assert_eq!(p.m, 2);
    }

    #[test]
    fn minimizing_sequence_excess_decreases() {
        let b = beta1(1.0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-1 / 4.0, 1e-2, 1e-3, 1e-4] {
            let (a, _) = minimizing_sequence(1, 1.0, eps).unwrap();
            let e = a.l1_excess(PI2, a.domain()).unwrap();
            assert!(e > b && e < prev, "eps={eps}: {e}");
            prev = e;
        }
    }

    #[test]
    fn minimizing_sequence_rejects_large_eps() {
        assert!(minimizing_sequence(1, 1.0, 0.03).is_err());
        assert!(minimizing_sequence(1, 1.0, 0.0).is_err());
        assert!(minimizing_sequence(0, 1.0, 1e-3).is_err());
    }

    #[test]
    fn resonant_step_values_and_gluing() {
        let (a, sol) = resonant_step(&reference_partition()).unwrap();
        for (v, want) in a.values().iter().zip([61.685, 39.478, 20.142, 61.685]) {
            assert!((v - want).abs() < 1e-3, "{v}");
        }
        assert!(sol.max_joint_jump() < 1e-12);
        assert!(sol.du(0.0).abs() < 1e-12 && sol.du(1.0).abs() < 1e-12);
        assert!(neumann_residual(&a).unwrap().abs() <= 1e-8);
        assert!(ode_defect(&a, &sol, interior_samples(&sol, 1000).into_iter()) < 1e-8);
        let p = zero_profile(&neumann_shot(&a).unwrap(), true).unwrap();
        for (x, y) in p.points().iter().zip(reference_partition().points()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn resonant_step_on_equal_partition_is_constant() {
        for n in 1..4 {
            let (a, sol) = resonant_step(&Partition::equal(n, 1.0).unwrap()).unwrap();
            let target = lambda_n(n + 1, 1.0);
            assert!(a.values().iter().all(|v| (v - target).abs() < 1e-9 * target));
            for x in [0.1, 0.37, 0.8] {
                let c = ((n + 1) as f64 * PI * x).cos();
                assert!((sol.u(x).abs() - c.abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resonant_step_reflection() {
        let part = reference_partition();
        let (_, sol) = resonant_step(&part).unwrap();
        let (_, refl) = resonant_step(&part.reflected()).unwrap();
        let ratio = refl.u(0.0) / sol.u(1.0);
        for x in [0.05, 0.3, 0.5, 0.77, 0.95] {
            assert!((refl.u(1.0 - x) - ratio * sol.u(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_resonant_examples() {
        let (a, _) = constant_resonant(2, 1.0).unwrap();
        assert_eq!(a.values()[0], 4.0 * PI2);
        assert!(neumann_residual(&a).unwrap().abs() <= 1e-9);
        assert_eq!(zero_profile(&neumann_shot(&a).unwrap(), true).unwrap().m, 2);
        let (a, sol) = constant_resonant(1, PI).unwrap();
        assert!((a.values()[0] - 1.0).abs() < 1e-15);
        assert!((sol.u(1.0) - 1f64.cos()).abs() < 1e-15);
        let (a, _) = constant_resonant(5, 1.0).unwrap();
        let p = zero_profile(&neumann_shot(&a).unwrap(), true).unwrap();
        assert_eq!(p.m, 5);
        assert!(p.gaps().iter().all(|g| (g - 0.1).abs() < 1e-9), "{:?}", p.gaps());
    }

    #[test]
    fn non_attainment_matches_finite_difference() {
        for n in 1..=5u32 {
            let omega = n as f64 * PI;
            let h = 1.0 / (2.0 * (n as f64 + 1.0));
            let u = |x: f64| (omega * (x - h)).sin() / (-omega * h).sin();
            let d = 1e-6;
            let fd = (u(d) - u(-d)) / (2.0 * d);
            let w = non_attainment_witness(n, 1.0).unwrap();
            assert!(w > 0.0);
            assert!((w - fd.abs()).abs() < 1e-6 * w, "n={n}");
        }
        assert!((non_attainment_witness(1, 1.0).unwrap() - PI).abs() < 1e-12);
        assert!((non_attainment_witness(2, 1.0).unwrap() - 2.0 * PI / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn counterexample_beats_global_bound() {
        let part = reference_partition();
        let a = l1_counterexample(&part, 1e-3).unwrap();
        let want: f64 = part.gaps().iter().map(|g| PI / (PI * g).tan()).sum::<f64>() - 4e-3;
        let total = a.l1_excess(PI2, a.domain()).unwrap();
        assert!((total - want).abs() < 1e-9, "{total} vs {want}");
        assert!(total > 4.0 * PI);
        assert!(l1_counterexample(&Partition::equal(1, 1.0).unwrap(), 1e-3).is_err());
        let wide = Partition::new(vec![0.0, 0.05, 0.1, 0.15, 1.0], 1).unwrap();
        assert!(l1_counterexample(&wide, 1e-3).is_err());
        assert!(l1_counterexample(&part, 100.0).is_err());
    }

    #[test]
    fn solution_json_has_descriptors() {
        let (_, sol) = resonant_step(&reference_partition()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&crate::json::to_string(&sol)).unwrap();
        assert_eq!(v["pieces"][0]["kind"], "cosine");
        assert_eq!(v["breakpoints"].as_array().unwrap().len(), 5);
    }
}
