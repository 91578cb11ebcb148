//! Shooting for `u'' + a(x) u = 0`.
//!
//! The state `(u, u', θ)` is advanced by an embedded Dormand–Prince 5(4)
//! pair with dense output, where `θ` is the Prüfer angle defined by
//! `u = ρ sin θ`, `u' = ρ cos θ` and evolving as `θ' = cos²θ + a sin²θ`.
//! Integration restarts at every node of the potential so that no step
//! straddles a discontinuity of `a` or `a'`.

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize};

use crate::potential::{Interval, Potential, Segment};
use crate::roots::brent;
use crate::{Error, Result};

/// Scaled residual below which a shot counts as a nontrivial solution.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

/// Boundary conditions on a subinterval `(c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// `u'(c) = u'(d) = 0`
    NeumannNeumann,
    /// `u'(c) = u(d) = 0`
    MixedND,
    /// `u(c) = u'(d) = 0`
    MixedDN,
}

type State = [f64; 3];

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn rhs(a: f64, y: &State) -> State {
    let (s, c) = y[2].sin_cos();
    [y[1], -a * y[0], c * c + a * s * s]
}

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (w, k) in terms {
        for i in 0..3 {
            out[i] += w * k[i];
        }
    }
    out
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone)]
struct DenseStep {
    x0: f64,
    h: f64,
    rc: [State; 5],
}

impl DenseStep {
    fn eval(&self, x: f64) -> State {
        let s = ((x - self.x0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let mut y = [0.0; 3];
        for i in 0..3 {
            let r = &self.rc;
            y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        y
    }
}

/// A numerically integrated solution with its Prüfer angle.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub nodes: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub theta: Vec<f64>,
    a_scale: f64,
    steps: Vec<DenseStep>,
}

/// One sample of a trajectory as exported to JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub u: f64,
    pub du: f64,
    pub theta: f64,
}

impl Serialize for Trajectory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.nodes.len()))?;
        for p in self.points() {
            seq.serialize_element(&p)?;
        }
        seq.end()
    }
}

impl Trajectory {
    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = TrajectoryPoint> + '_ {
        (0..self.nodes.len()).map(move |i| TrajectoryPoint {
            x: self.nodes[i],
            u: self.u[i],
            du: self.du[i],
            theta: self.theta[i],
        })
    }

    /// `max(1, ess sup |a|)` over the integration interval.
    pub fn a_scale(&self) -> f64 {
        self.a_scale
    }

    /// `max_nodes sqrt(u'^2 + a_scale u^2)`, the normalisation for residuals.
    pub fn energy_scale(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.du)
            .map(|(u, du)| (du * du + self.a_scale * u * u).sqrt())
            .fold(0.0, f64::max)
    }

    /// `(u, u', θ)` at any `x` in the integration interval (dense output).
    pub fn eval(&self, x: f64) -> TrajectoryPoint {
        let i = self.steps.partition_point(|s| s.x0 <= x).saturating_sub(1);
        let y = self.steps[i].eval(x);
        TrajectoryPoint {
            x,
            u: y[0],
            du: y[1],
            theta: y[2],
        }
    }

    /// `(∫ u², ∫ u'²)` over `[lo, hi]`, exact for the dense interpolant.
    pub fn quadratic_integrals(&self, lo: f64, hi: f64) -> (f64, f64) {
        // 6-point Gauss–Legendre on [-1, 1]
        const GL: [(f64, f64); 6] = [
            (-0.932_469_514_203_152_1, 0.171_324_492_379_170_35),
            (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
            (-0.238_619_186_083_196_9, 0.467_913_934_572_691_04),
            (0.238_619_186_083_196_9, 0.467_913_934_572_691_04),
            (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
            (0.932_469_514_203_152_1, 0.171_324_492_379_170_35),
        ];
        let mut uu = 0.0;
        let mut dd = 0.0;
        let first = self.steps.partition_point(|s| s.x0 + s.h <= lo);
        for step in &self.steps[first..] {
            if step.x0 >= hi {
                break;
            }
            let p = step.x0.max(lo);
            let q = (step.x0 + step.h).min(hi);
            if q <= p {
                continue;
            }
            let (mid, half) = (0.5 * (p + q), 0.5 * (q - p));
            for (t, w) in GL {
                let y = step.eval(mid + half * t);
                uu += w * half * y[0] * y[0];
                dd += w * half * y[1] * y[1];
            }
        }
        (uu, dd)
    }
}

/// Integrates `u'' + a u = 0` over `interval` from `(u0, du0)` at `interval.lo`.
pub fn integrate(a: &Potential, interval: Interval, u0: f64, du0: f64) -> Result<Trajectory> {
    integrate_with(a, interval, u0, du0, &IntegratorOptions::default())
}

pub fn integrate_with(
    a: &Potential,
    interval: Interval,
    u0: f64,
    du0: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if u0 == 0.0 && du0 == 0.0 {
        return Err(Error::Argument("initial data (0, 0) gives the trivial solution".into()));
    }
    if !(u0.is_finite() && du0.is_finite()) {
        return Err(Error::Argument("initial data must be finite".into()));
    }
    let interval = a.check_interval(interval)?;
    let a_scale = a.sup_norm(interval)?.max(1.0);
    let mut y: State = [u0, du0, u0.atan2(du0)];
    let mut traj = Trajectory {
        nodes: vec![interval.lo],
        u: vec![y[0]],
        du: vec![y[1]],
        theta: vec![y[2]],
        a_scale,
        steps: Vec::new(),
    };
    let mut h = 0.05 / a_scale.sqrt();
    let mut taken = 0usize;
    for seg in a.segments_in(interval) {
        integrate_segment(&seg, &mut y, &mut h, &mut traj, opts, &mut taken, interval.len())?;
    }
    Ok(traj)
}

fn integrate_segment(
    seg: &Segment,
    y: &mut State,
    h: &mut f64,
    traj: &mut Trajectory,
    opts: &IntegratorOptions,
    taken: &mut usize,
    span: f64,
) -> Result<()> {
    let coef = |x: f64| seg.value_at(x);
    let mut x = seg.lo;
    let end = seg.hi;
    let mut k1 = rhs(coef(x), y);
    let h_min = 1e-14 * span.max(end.abs());
    while x < end {
        let mut last = false;
        if x + *h >= end - 1e-15 * span {
            *h = end - x;
            last = true;
        }
        let hh = *h;
        let k2 = rhs(coef(x + C2 * hh), &axpy(y, &[(hh * A21, &k1)]));
        let k3 = rhs(coef(x + C3 * hh), &axpy(y, &[(hh * A31, &k1), (hh * A32, &k2)]));
        let k4 = rhs(
            coef(x + C4 * hh),
            &axpy(y, &[(hh * A41, &k1), (hh * A42, &k2), (hh * A43, &k3)]),
        );
        let k5 = rhs(
            coef(x + C5 * hh),
            &axpy(y, &[(hh * A51, &k1), (hh * A52, &k2), (hh * A53, &k3), (hh * A54, &k4)]),
        );
        let x_new = if last { end } else { x + hh };
        let k6 = rhs(
            coef(x_new),
            &axpy(
                y,
                &[(hh * A61, &k1), (hh * A62, &k2), (hh * A63, &k3), (hh * A64, &k4), (hh * A65, &k5)],
            ),
        );
        let y1 = axpy(
            y,
            &[(hh * A71, &k1), (hh * A73, &k3), (hh * A74, &k4), (hh * A75, &k5), (hh * A76, &k6)],
        );
        let k7 = rhs(coef(x_new), &y1);
        let mut err = 0.0;
        for i in 0..3 {
            let e = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sk).powi(2);
        }
        let err = (err / 3.0).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite error estimate at x = {x}")));
        }
        if err <= 1.0 {
            let mut rc = [[0.0; 3]; 5];
            for i in 0..3 {
                let dy = y1[i] - y[i];
                let bspl = hh * k1[i] - dy;
                rc[0][i] = y[i];
                rc[1][i] = dy;
                rc[2][i] = bspl;
                rc[3][i] = dy - hh * k7[i] - bspl;
                rc[4][i] = hh * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            traj.steps.push(DenseStep { x0: x, h: hh, rc });
            *y = y1;
            x = x_new;
            k1 = k7;
            traj.nodes.push(x);
            traj.u.push(y[0]);
            traj.du.push(y[1]);
            traj.theta.push(y[2]);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                *h = hh * fac;
            } else {
                // carry the step size into the next segment, but not the truncated one
                *h = (*h * fac).max(hh);
            }
        } else {
            *h = hh * (0.9 * err.powf(-0.2)).max(0.2);
        }
        *taken += 1;
        if *h < h_min && x < end {
            return Err(Error::Integration(format!(
                "step size underflow (h = {:e}) at x = {x}",
                *h
            )));
        }
        if *taken > opts.max_steps {
            return Err(Error::Integration(format!(
                "exceeded {} steps at x = {x}",
                opts.max_steps
            )));
        }
    }
    Ok(())
}

/// The shot from `(u, u') = (1, 0)` at 0, integrated over `[0, L]`.
pub fn neumann_shot(a: &Potential) -> Result<Trajectory> {
    integrate(a, a.domain(), 1.0, 0.0)
}

/// Scaled `u'(L)` of the Neumann shot; zero iff a nontrivial Neumann solution exists.
pub fn neumann_residual(a: &Potential) -> Result<f64> {
    let t = neumann_shot(a)?;
    Ok(residual_of(&t))
}

fn residual_of(t: &Trajectory) -> f64 {
    t.du.last().unwrap() / t.energy_scale()
}

/// The Neumann shot when its residual is within `tol`, otherwise `None`.
pub fn find_nontrivial_neumann(a: &Potential, tol: f64) -> Result<Option<Trajectory>> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let t = neumann_shot(a)?;
    Ok((residual_of(&t).abs() <= tol).then_some(t))
}

/// Residual of the mixed problem on `interval`; zero iff it has a nontrivial solution.
///
/// `MixedDN` shoots `(0, 1)` and reports the scaled `u'(hi)`; `MixedND`
/// shoots `(1, 0)` and reports the scaled `u(hi)`.
pub fn disfocal_residual(a: &Potential, interval: Interval, bc: BoundaryKind) -> Result<f64> {
    match bc {
        BoundaryKind::NeumannNeumann => Err(Error::Argument(
            "disfocal_residual handles mixed conditions; use neumann_residual".into(),
        )),
        BoundaryKind::MixedDN => {
            let t = integrate(a, interval, 0.0, 1.0)?;
            Ok(t.du.last().unwrap() / t.energy_scale())
        }
        BoundaryKind::MixedND => {
            let t = integrate(a, interval, 1.0, 0.0)?;
            Ok(t.a_scale().sqrt() * t.u.last().unwrap() / t.energy_scale())
        }
    }
}

/// Interlaced zeros `x_0 < x_1 < … < x_{2m}`: even indices are zeros of `u'`
/// (including both endpoints), odd indices are zeros of `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroProfile {
    pub dprime_zeros: Vec<f64>,
    pub zeros: Vec<f64>,
    pub m: usize,
}

impl ZeroProfile {
    /// All points `x_0, …, x_{2m}` in order.
    pub fn points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * self.m + 1);
        for i in 0..self.m {
            pts.push(self.dprime_zeros[i]);
            pts.push(self.zeros[i]);
        }
        pts.push(self.dprime_zeros[self.m]);
        pts
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.points().windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Quotients `(∫u'² − level ∫u²) / u²(x*)` on each `[x_i, x_{i+1}]`, where
    /// `x*` is the endpoint at which `u'` vanishes.
    pub fn energy_quotients(&self, t: &Trajectory, level: f64) -> Vec<f64> {
        let pts = self.points();
        pts.windows(2)
            .enumerate()
            .map(|(i, w)| {
                let (uu, dd) = t.quadratic_integrals(w[0], w[1]);
                // even i: u'(x_i) = 0; odd i: u'(x_{i+1}) = 0
                let anchor = if i % 2 == 0 { w[0] } else { w[1] };
                let ua = t.eval(anchor).u;
                (dd - level * uu) / (ua * ua)
            })
            .collect()
    }
}

/// Extracts the zero profile of a trajectory from Prüfer-angle crossings.
///
/// Zeros of `u` are crossings of `θ` through multiples of π, zeros of `u'`
/// crossings through `π/2 + kπ`; each is refined by Brent's method on the
/// dense angle. The trajectory must start at a zero of `u'`.
pub fn zero_profile(t: &Trajectory, require_neumann: bool) -> Result<ZeroProfile> {
    let (lo, hi) = (t.start(), t.end());
    let scale = t.energy_scale();
    let start_res = t.du[0] / scale;
    let end_res = t.du.last().unwrap() / scale;
    if start_res.abs() > DEFAULT_RESIDUAL_TOL {
        return Err(Error::Precondition(format!(
            "trajectory does not start at a zero of u' (scaled u' = {start_res:e})"
        )));
    }
    if require_neumann && end_res.abs() > DEFAULT_RESIDUAL_TOL {
        return Err(Error::Precondition(format!(
            "trajectory is not a Neumann solution (scaled u'(L) = {end_res:e})"
        )));
    }
    let theta0 = t.theta[0];
    let total = t.theta.last().unwrap() - theta0;
    let m = (total / std::f64::consts::PI).round();
    if m < 1.0 {
        return Err(Error::Extraction(format!(
            "Prüfer angle advances by {total} < π/2; u has no zeros"
        )));
    }
    let m = m as usize;

    // suffix minima of θ detect an angle falling back through a level
    let mut suffix_min = t.theta.clone();
    for k in (0..suffix_min.len() - 1).rev() {
        suffix_min[k] = suffix_min[k].min(suffix_min[k + 1]);
    }

    let xtol = 1e-12 * (hi - lo);
    let mut crossings = Vec::with_capacity(2 * m - 1);
    let mut k = 1usize;
    for j in 1..2 * m {
        let level = theta0 + j as f64 * std::f64::consts::FRAC_PI_2;
        while k < t.theta.len() && t.theta[k] < level {
            k += 1;
        }
        if k >= t.theta.len() {
            return Err(Error::Extraction(format!(
                "angle never reaches level {j}·π/2 above its start"
            )));
        }
        let x = if t.theta[k - 1] >= level {
            t.nodes[k - 1]
        } else {
            brent(|x| t.eval(x).theta - level, t.nodes[k - 1], t.nodes[k], xtol, 200)
                .map_err(|e| Error::Extraction(format!("refining crossing {j}: {e}")))?
        };
        if suffix_min[k] < level - 1e-9 * (1.0 + level.abs()) {
            return Err(Error::Extraction(format!(
                "angle falls back below level {j}·π/2 after x = {x}; crossings are not interlaced"
            )));
        }
        crossings.push(x);
    }

    let mut dprime_zeros = vec![lo];
    let mut zeros = Vec::with_capacity(m);
    for (j, &x) in crossings.iter().enumerate() {
        if j % 2 == 0 {
            zeros.push(x);
        } else {
            dprime_zeros.push(x);
        }
    }
    dprime_zeros.push(hi);
    let profile = ZeroProfile { dprime_zeros, zeros, m };
    if profile.points().windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Extraction(format!(
            "zeros of u and u' are not strictly interlaced: {:?}",
            profile.points()
        )));
    }
    Ok(profile)
}
