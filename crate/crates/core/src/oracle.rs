//! Brute-force cross-checks that share no code path with the closed forms
//! and the shooting engine.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certifier::{check_l1_partition, Partition};
use crate::constants::{f_min, interval_l1_bound, lambda_n};
use crate::ode::BoundaryKind;
use crate::potential::{Interval, Potential};
use crate::{Error, Result};

/// Grid minimum of `(∫u'² − M∫u²)/u²(b)` over `u(a) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMinimum {
    pub value: f64,
    /// Grid values with `u(lo) = 0`, `u(hi) = 1`.
    pub minimizer: Vec<f64>,
    pub grid_size: usize,
    /// Largest stationarity residual of the interior equations.
    pub residual: f64,
}

/// Minimizes the discrete quotient with forward differences for `∫u'²` and
/// the trapezoid rule for `∫u²`, normalised by `u(hi) = 1`.
pub fn discrete_j_min(m: f64, interval: Interval, n: usize) -> Result<DiscreteMinimum> {
    if n < 100 {
        return Err(Error::Argument(format!("grid needs N ≥ 100, got {n}")));
    }
    let len = interval.len();
    let bound = PI * PI / (4.0 * len * len);
    if !(m > 0.0 && m <= bound * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("M must lie in (0, π²/(4|I|²)] = (0, {bound}], got {m}")));
    }
    let h = len / n as f64;
    // interior equations: −u_{j−1} + (2 − M h²) u_j − u_{j+1} = 0, u_0 = 0, u_N = 1
    let diag = 2.0 - m * h * h;
    let k = n - 1;
    let mut c = vec![0.0; k];
    let mut d = vec![0.0; k];
    for j in 0..k {
        let rhs = if j + 1 == k { 1.0 } else { 0.0 };
        let (cp, dp) = if j == 0 { (0.0, 0.0) } else { (c[j - 1], d[j - 1]) };
        let denom = diag + cp;
        c[j] = -1.0 / denom;
        d[j] = (rhs + dp) / denom;
    }
    let mut u = vec![0.0; n + 1];
    u[n] = 1.0;
    u[k] = d[k - 1];
    for j in (0..k - 1).rev() {
        u[j + 1] = d[j] - c[j] * u[j + 2];
    }
    let mut residual = 0.0f64;
    for j in 1..n {
        residual = residual.max((-u[j - 1] + diag * u[j] - u[j + 1]).abs());
    }
    let grad: f64 = u.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h;
    let mass: f64 = h * (u[1..n].iter().map(|v| v * v).sum::<f64>() + 0.5 * (u[0] * u[0] + u[n] * u[n]));
    Ok(DiscreteMinimum {
        value: grad - m * mass,
        minimizer: u,
        grid_size: n,
        residual,
    })
}

/// Result of minimizing `Σ cot z_i` over `Σ z_i = S`, `0 < z_i ≤ π/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FMinReport {
    pub value: f64,
    pub argmin: Vec<f64>,
    /// Random feasible points with `F < r cot(S/r) − 10⁻⁹`.
    pub violations: usize,
    pub samples: usize,
}

fn f_value(z: &[f64]) -> f64 {
    z.iter().map(|x| x.cos() / x.sin()).sum()
}

/// Euclidean projection onto `{Σz = S, lo ≤ z_i ≤ π/2}` by bisection on the shift.
fn project(y: &[f64], s: f64, lo: f64) -> Vec<f64> {
    let total = |tau: f64| y.iter().map(|v| (v - tau).clamp(lo, FRAC_PI_2)).sum::<f64>();
    let mut a = y.iter().fold(f64::INFINITY, |m, v| m.min(*v)) - FRAC_PI_2;
    let mut b = y.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) - lo;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if total(mid) > s {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-17 * (1.0 + a.abs()) {
            break;
        }
    }
    let tau = 0.5 * (a + b);
    y.iter().map(|v| (v - tau).clamp(lo, FRAC_PI_2)).collect()
}

/// Projected gradient descent with Armijo backtracking; returns the iterates.
pub fn f_descent(start: &[f64], s: f64, max_iter: usize) -> Vec<Vec<f64>> {
    let lo = (1e-9f64).min(s / (2.0 * start.len() as f64));
    let mut z = project(start, s, lo);
    let mut path = vec![z.clone()];
    let mut step = 1e-2;
    for _ in 0..max_iter {
        let g: Vec<f64> = z.iter().map(|x| -1.0 / x.sin().powi(2)).collect();
        let fz = f_value(&z);
        let mut accepted = None;
        for _ in 0..80 {
            let y: Vec<f64> = z.iter().zip(&g).map(|(x, gi)| x - step * gi).collect();
            let cand = project(&y, s, lo);
            let decrease: f64 = g.iter().zip(z.iter().zip(&cand)).map(|(gi, (a, b))| gi * (a - b)).sum();
            if f_value(&cand) <= fz - 1e-4 * decrease {
                accepted = Some(cand);
                break;
            }
            step *= 0.5;
        }
        let Some(next) = accepted else { break };
        let moved = next.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        z = next;
        path.push(z.clone());
        if moved < 1e-15 {
            break;
        }
        step *= 2.0;
    }
    path
}

/// Uniform point of `{Σz = S, z > 0}` restricted to `z_i ≤ π/2` by rejection.
fn sample_feasible(rng: &mut ChaCha8Rng, r: usize, s: f64) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..r).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let sum: f64 = e.iter().sum();
        let z: Vec<f64> = e.iter().map(|v| s * v / sum).collect();
        if z.iter().all(|&v| v > 0.0 && v <= FRAC_PI_2) {
            return z;
        }
    }
}

/// Minimum of `F(z) = Σ cot z_i` from 32 seeded descents plus a count of
/// random feasible points beating `r cot(S/r)`.
pub fn numeric_f_min(r: u32, s: f64, samples: usize, seed: u64) -> Result<FMinReport> {
    let closed = f_min(r, s)?;
    if samples < 10_000 {
        return Err(Error::Argument(format!("need at least 10⁴ samples, got {samples}")));
    }
    let r = r as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..32 {
        let start = sample_feasible(&mut rng, r, s);
        let z = f_descent(&start, s, 20_000).pop().unwrap();
        let v = f_value(&z);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, z));
        }
    }
    let (value, argmin) = best.unwrap();
    let violations = (0..samples)
        .filter(|_| f_value(&sample_feasible(&mut rng, r, s)) < closed - 1e-9)
        .count();
    Ok(FMinReport {
        value,
        argmin,
        violations,
        samples,
    })
}

/// Eigenvalues of a symmetric tridiagonal matrix (implicit QL with Wilkinson shifts).
/// `off[i]` couples rows `i` and `i + 1`.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n && !(n == 0 && off.is_empty()) {
        return Err(Error::Argument("off-diagonal must have one entry fewer than the diagonal".into()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Integration("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Lumped linear elements for `−u'' − a u` on an arbitrary mesh: stiffness
/// minus potential (integrated exactly over dual cells) as a tridiagonal
/// `(diagonal, off-diagonal)`, and the diagonal lumped mass. Dirichlet ends
/// drop their node.
struct Pencil {
    diag: Vec<f64>,
    off: Vec<f64>,
    mass: Vec<f64>,
}

fn mesh_pencil(a: &Potential, nodes: &[f64], bc: BoundaryKind) -> Result<Pencil> {
    let m = nodes.len() - 1;
    if m < 2 {
        return Err(Error::Argument("mesh needs at least two cells".into()));
    }
    let (neumann_lo, neumann_hi) = match bc {
        BoundaryKind::NeumannNeumann => (true, true),
        BoundaryKind::MixedND => (true, false),
        BoundaryKind::MixedDN => (false, true),
    };
    let first = if neumann_lo { 0 } else { 1 };
    let last = if neumann_hi { m } else { m - 1 };
    let h = |i: usize| nodes[i + 1] - nodes[i];
    let mut diag = Vec::with_capacity(last - first + 1);
    let mut mass = Vec::with_capacity(last - first + 1);
    for j in first..=last {
        let lo = if j == 0 { nodes[0] } else { 0.5 * (nodes[j - 1] + nodes[j]) };
        let hi = if j == m { nodes[m] } else { 0.5 * (nodes[j] + nodes[j + 1]) };
        let stiff = if j > 0 { 1.0 / h(j - 1) } else { 0.0 } + if j < m { 1.0 / h(j) } else { 0.0 };
        diag.push(stiff - a.integral(Interval::new(lo, hi)?)?);
        mass.push(hi - lo);
    }
    let off = (first..last).map(|j| -1.0 / h(j)).collect();
    Ok(Pencil { diag, off, mass })
}

impl Pencil {
    /// Number of generalized eigenvalues below `x` (inertia of `K − xM`).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i > 0 {
                let prev = if q == 0.0 { f64::EPSILON * self.off[i - 1].abs() } else { q };
                self.off[i - 1] * self.off[i - 1] / prev
            } else {
                0.0
            };
            q = self.diag[i] - x * self.mass[i] - coupling;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds of the mass-scaled matrix.
    fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let coupled = |k: usize| self.off[k].abs() / (self.mass[k] * self.mass[k + 1]).sqrt();
            let r = if i > 0 { coupled(i - 1) } else { 0.0 } + if i + 1 < n { coupled(i) } else { 0.0 };
            let d = self.diag[i] / self.mass[i];
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    /// The `j`-th smallest eigenvalue (0-based) by bisection, to a relative
    /// accuracy of `1e-13` or an absolute one of `1e-13` near zero.
    fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        while hi - lo > 1e-13 * lo.abs().max(hi.abs()).max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn nearest_zero(&self) -> Result<(usize, f64)> {
        let n = self.diag.len();
        let below = self.count_below(0.0);
        let mut best: Option<(usize, f64)> = None;
        for j in [below.checked_sub(1), (below < n).then_some(below)].into_iter().flatten() {
            let v = self.eigenvalue(j);
            if best.is_none_or(|(_, b)| v.abs() < b.abs()) {
                best = Some((j, v));
            }
        }
        best.ok_or_else(|| Error::Argument("empty finite-difference matrix".into()))
    }
}

/// Symmetric three-point discretization of `−u'' − a u` on an arbitrary
/// mesh, as `(diagonal, off-diagonal)`: the lumped-element pencil scaled by
/// the inverse square root of the mass.
pub fn mesh_matrix(a: &Potential, nodes: &[f64], bc: BoundaryKind) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = mesh_pencil(a, nodes, bc)?;
    let diag = p.diag.iter().zip(&p.mass).map(|(d, m)| d / m).collect();
    let off = p.off.iter().enumerate().map(|(i, e)| e / (p.mass[i] * p.mass[i + 1]).sqrt()).collect();
    Ok((diag, off))
}

/// The uniform-grid matrix used by [`fd_spectrum`]. On `N` equal cells this
/// is the standard three-point Laplacian with ghost-point Neumann rows.
pub fn fd_matrix(a: &Potential, n: usize, bc: BoundaryKind) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 200 {
        return Err(Error::Argument(format!("grid needs N ≥ 200, got {n}")));
    }
    mesh_matrix(a, &uniform_mesh(a.length(), n), bc)
}

fn uniform_mesh(l: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|j| if j == n { l } else { j as f64 * l / n as f64 }).collect()
}

/// Relative width below which breakpoints are merged. Finer cells cost more
/// in Sturm-pivot roundoff than they gain in resolution.
const MIN_CELL: f64 = 1e-6;

/// `N` equal cells merged with the breakpoints of `a`, so that no cell wider
/// than `MIN_CELL · L` straddles a jump or a kink.
pub fn conforming_mesh(a: &Potential, n: usize) -> Vec<f64> {
    let l = a.length();
    let mut nodes: Vec<f64> = uniform_mesh(l, n).into_iter().chain(a.breakpoints().iter().copied()).collect();
    nodes.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(nodes.len());
    for x in nodes {
        match out.last() {
            Some(&p) if x - p <= MIN_CELL * l => {
                if x == l {
                    *out.last_mut().unwrap() = l;
                }
            }
            _ => out.push(x),
        }
    }
    if out.len() > 2 && out[out.len() - 1] - out[out.len() - 2] <= MIN_CELL * l {
        out.remove(out.len() - 2);
    }
    out
}

fn refined(nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len());
    for w in nodes.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*nodes.last().unwrap());
    out
}

/// All eigenvalues of the finite-difference `−u'' − a u` on `N` cells.
/// Zero is (nearly) an eigenvalue exactly when the boundary value problem
/// has a nontrivial solution.
pub fn fd_spectrum(a: &Potential, n: usize, bc: BoundaryKind) -> Result<Vec<f64>> {
    let (d, e) = fd_matrix(a, n, bc)?;
    tridiagonal_eigenvalues(&d, &e)
}

/// `min |σ|` over the spectrum.
pub fn resonance_indicator(spectrum: &[f64]) -> f64 {
    spectrum.iter().fold(f64::INFINITY, |m, s| m.min(s.abs()))
}

/// Index and value of the eigenvalue closest to zero on the uniform grid of [`fd_spectrum`].
pub fn fd_nearest_eigenvalue(a: &Potential, n: usize, bc: BoundaryKind) -> Result<(usize, f64)> {
    if n < 200 {
        return Err(Error::Argument(format!("grid needs N ≥ 200, got {n}")));
    }
    mesh_pencil(a, &uniform_mesh(a.length(), n), bc)?.nearest_zero()
}

/// Eigenvalue nearest zero on the [`conforming_mesh`], Richardson-extrapolated
/// from that mesh and its uniform refinement (second-order convergence).
pub fn fd_resonance_extrapolated(a: &Potential, n: usize, bc: BoundaryKind) -> Result<f64> {
    if n < 200 {
        return Err(Error::Argument(format!("grid needs N ≥ 200, got {n}")));
    }
    let coarse_mesh = conforming_mesh(a, n);
    let (j, fine) = mesh_pencil(a, &refined(&coarse_mesh), bc)?.nearest_zero()?;
    let coarse = mesh_pencil(a, &coarse_mesh, bc)?;
    if j >= coarse.diag.len() {
        return Ok(fine);
    }
    Ok((4.0 * fine - coarse.eigenvalue(j)) / 3.0)
}

/// Lexicographically first partition with all points on the uniform grid
/// `{jL/grid}` that [`check_l1_partition`] certifies.
pub fn brute_partition_check(a: &Potential, n: u32, grid: usize) -> Result<Option<Partition>> {
    if n == 0 || n > 2 {
        return Err(Error::Argument(format!("brute force supports n ∈ {{1, 2}}, got {n}")));
    }
    if !(2..=60).contains(&grid) {
        return Err(Error::Argument(format!("grid must lie in [2, 60], got {grid}")));
    }
    let l = a.length();
    let level = lambda_n(n, l);
    if !a.dominates(level).holds {
        return Ok(None);
    }
    let cells = 2 * n as usize + 2;
    let window = l / (2.0 * n as f64);
    let pos = |j: usize| if j == grid { l } else { j as f64 * l / grid as f64 };
    // cells whose excess stays strictly below their bound
    let ok = |i: usize, j: usize| -> bool {
        let gap = pos(j) - pos(i);
        if gap >= window - 1e-12 {
            return false;
        }
        let Ok(bound) = interval_l1_bound(n, l, gap) else { return false };
        let Ok(excess) = a.l1_excess(level, Interval { lo: pos(i), hi: pos(j) }) else { return false };
        excess < bound * (1.0 - 1e-9)
    };
    let max_steps = ((window / l) * grid as f64).ceil() as usize;
    let mut stack: Vec<usize> = vec![0];
    let mut next: Vec<usize> = vec![1];
    while let Some(&prev) = stack.last() {
        let depth = stack.len();
        let cand = next[depth - 1];
        let remaining = cells - depth;
        if depth == cells {
            // only the final cell to L is left
            if ok(prev, grid) {
                let pts: Vec<f64> = stack.iter().map(|&j| pos(j)).chain([l]).collect();
                let part = Partition::new(pts, n)?;
                if check_l1_partition(a, &part)?.is_unique() {
                    return Ok(Some(part));
                }
            }
            stack.pop();
            next.pop();
            continue;
        }
        if cand >= grid || cand > prev + max_steps {
            stack.pop();
            next.pop();
            continue;
        }
        next[depth - 1] = cand + 1;
        // the remaining cells must still be able to reach L
        if (grid - cand) > remaining * max_steps || !ok(prev, cand) {
            continue;
        }
        stack.push(cand);
        next.push(cand + 1);
    }
    Ok(None)
}
