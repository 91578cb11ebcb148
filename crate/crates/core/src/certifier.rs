//! Sufficient conditions for `u'' + a u = 0, u'(0) = u'(L) = 0` to have only
//! the trivial solution.
//!
//! Each criterion returns a [`Certificate`] recording every inequality it
//! checked as a named margin. A margin is positive exactly when its condition
//! holds with the recorded tolerance to spare, and the verdict is
//! [`Verdict::UniqueTrivial`] only when every margin is positive. Criteria
//! never claim resonance; [`certify_auto`] is the only place a
//! [`Verdict::ResonantWitness`] is produced.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{beta1, cot, interval_l1_bound, lambda_n};
use crate::ode::{find_nontrivial_neumann, zero_profile, DEFAULT_RESIDUAL_TOL};
use crate::potential::{DominanceReport, Interval, Potential, Tolerances};
use crate::roots::brent;
use crate::{Error, Result};

/// Relative slack by which strict inequalities must hold.
pub const MARGIN_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    UniqueTrivial,
    ResonantWitness,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `∫a ≥ 0`, `a⁺ ≺ π²/L²`
    ClassicalFirst,
    /// `λ_n ≺ a ≺ λ_{n+1}`
    Dolph,
    /// `λ_n ≺ a`, `‖a − λ_n‖₁ < β_{1,n}`
    L1Global,
    /// per-interval L∞ bounds on a `2n+2` partition
    LinfPartition,
    /// per-interval L¹ bounds on a `2n+2` partition
    L1Partition,
    /// L¹ partition built greedily from the potential
    GreedyPartition,
    /// direct detection of a nontrivial Neumann solution
    Shooting,
}

/// Points `0 = y_0 < y_1 < … < y_{2n+2} = L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    points: Vec<f64>,
    n: u32,
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<f64>::deserialize(d)?;
        Partition::from_points(points).map_err(serde::de::Error::custom)
    }
}

impl Partition {
    pub fn new(points: Vec<f64>, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("partitions need n ≥ 1".into()));
        }
        let want = 2 * n as usize + 3;
        if points.len() != want {
            return Err(Error::Argument(format!(
                "a partition for n = {n} has {want} points, got {}",
                points.len()
            )));
        }
        if points[0] != 0.0 {
            return Err(Error::Argument("partition must start at 0".into()));
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument(format!(
                "partition points must be finite and strictly increasing: {points:?}"
            )));
        }
        Ok(Self { points, n })
    }

    /// Infers `n` from the number of points (`2n + 3`).
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        let k = points.len();
        if k < 5 || k % 2 == 0 {
            return Err(Error::Argument(format!(
                "a partition has 2n+3 points (odd, at least 5); got {k}"
            )));
        }
        Self::new(points, ((k - 3) / 2) as u32)
    }

    /// `y_i = iL / (2n + 2)`.
    pub fn equal(n: u32, length: f64) -> Result<Self> {
        let cells = 2 * n as usize + 2;
        let mut pts: Vec<f64> = (0..=cells).map(|i| i as f64 * length / cells as f64).collect();
        pts[cells] = length;
        Self::new(pts, n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        self.points.windows(2).map(|w| Interval { lo: w[0], hi: w[1] })
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `y_i ↦ L − y_i`, reversed.
    pub fn reflected(&self) -> Self {
        let l = self.length();
        let mut pts: Vec<f64> = self.points.iter().rev().map(|&y| l - y).collect();
        pts[0] = 0.0;
        *pts.last_mut().unwrap() = l;
        Self { points: pts, n: self.n }
    }

    fn check_domain(&self, a: &Potential) -> Result<()> {
        if (self.length() - a.length()).abs() > 1e-12 * a.length() {
            return Err(Error::Argument(format!(
                "partition ends at {} but the potential lives on [0, {}]",
                self.length(),
                a.length()
            )));
        }
        Ok(())
    }
}

/// Tolerances in force when a certificate was issued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertTolerances {
    pub ae: f64,
    pub strict: f64,
    pub mass: f64,
    pub margin_rel: f64,
    pub residual: f64,
}

impl CertTolerances {
    fn for_length(length: f64) -> Self {
        let t = Tolerances::default();
        Self {
            ae: t.ae,
            strict: t.strict,
            mass: t.mass(length),
            margin_rel: MARGIN_REL,
            residual: DEFAULT_RESIDUAL_TOL,
        }
    }
}

/// Evidence of a nontrivial Neumann solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Scaled `u'(L)` of the `(1, 0)` shot.
    pub residual: f64,
    /// Half the number of zero-interlacing gaps, when extractable.
    pub m: Option<usize>,
    pub zeros: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub method: Method,
    pub n: u32,
    pub partition: Option<Partition>,
    pub margins: BTreeMap<String, f64>,
    pub tolerances: CertTolerances,
    pub assumptions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attempted: Vec<Method>,
}

impl Certificate {
    fn from_margins(method: Method, n: u32, length: f64, margins: BTreeMap<String, f64>) -> Self {
        let ok = !margins.is_empty() && margins.values().all(|m| *m > 0.0);
        Self {
            verdict: if ok { Verdict::UniqueTrivial } else { Verdict::Inconclusive },
            method,
            n,
            partition: None,
            margins,
            tolerances: CertTolerances::for_length(length),
            assumptions: Vec::new(),
            witness: None,
            attempted: Vec::new(),
        }
    }

    pub fn is_unique(&self) -> bool {
        self.verdict == Verdict::UniqueTrivial
    }

    fn with_partition(mut self, p: &Partition) -> Self {
        self.partition = Some(p.clone());
        self
    }
}

fn record_dominance(margins: &mut BTreeMap<String, f64>, prefix: &str, r: &DominanceReport, tol: &Tolerances, length: f64) {
    margins.insert(format!("{prefix}_ae_slack"), r.ess_inf_gap + tol.ae);
    margins.insert(format!("{prefix}_strict_mass"), r.strict_mass - tol.mass(length));
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::Argument("criterion needs n ≥ 1".into()))
    } else {
        Ok(())
    }
}

/// `a ≢ 0`, `∫a ≥ 0` and `a⁺ ≺ π²/L²`.
pub fn check_classical_first(a: &Potential) -> Certificate {
    let l = a.length();
    let tol = Tolerances::default();
    let mut margins = BTreeMap::new();
    let dom = a.domain();
    let abs_mass = a.l1_excess(0.0, dom).expect("domain interval");
    margins.insert("nonzero_mass".into(), abs_mass - tol.mass(l));
    margins.insert("integral".into(), a.integral(dom).expect("domain interval"));
    // for c > 0, a⁺ ≺ c is the same as a ≺ c
    let upper = a.dominated_by_with(PI * PI / (l * l), &tol);
    record_dominance(&mut margins, "upper", &upper, &tol, l);
    Certificate::from_margins(Method::ClassicalFirst, 0, l, margins)
}

/// `λ_n ≺ a ≺ λ_{n+1}`.
pub fn check_dolph(a: &Potential, n: u32) -> Result<Certificate> {
    check_n(n)?;
    let l = a.length();
    let tol = Tolerances::default();
    let mut margins = BTreeMap::new();
    record_dominance(&mut margins, "lower", &a.dominates_with(lambda_n(n, l), &tol), &tol, l);
    record_dominance(&mut margins, "upper", &a.dominated_by_with(lambda_n(n + 1, l), &tol), &tol, l);
    Ok(Certificate::from_margins(Method::Dolph, n, l, margins))
}

/// `λ_n ≺ a` and `‖a − λ_n‖₁ < β_{1,n}`.
pub fn check_l1_global(a: &Potential, n: u32) -> Result<Certificate> {
    check_n(n)?;
    let l = a.length();
    let tol = Tolerances::default();
    let level = lambda_n(n, l);
    let mut margins = BTreeMap::new();
    record_dominance(&mut margins, "lower", &a.dominates_with(level, &tol), &tol, l);
    let b = beta1(n as f64, l)?;
    let excess = a.l1_excess(level, a.domain())?;
    margins.insert("l1_slack".into(), b - MARGIN_REL * b - excess);
    Ok(Certificate::from_margins(Method::L1Global, n, l, margins))
}

/// `λ_n ≺ a`, `(y_{i+1} − y_i)² ‖a‖_{L∞(y_i, y_{i+1})} ≤ π²/4` on every cell,
/// and `a` differs from `π²/(4(y_{i+1} − y_i)²)` on a set of positive
/// measure in at least one cell.
pub fn check_linf_partition(a: &Potential, part: &Partition) -> Result<Certificate> {
    part.check_domain(a)?;
    let n = part.n();
    let l = a.length();
    let tol = Tolerances::default();
    let mut margins = BTreeMap::new();
    record_dominance(&mut margins, "lower", &a.dominates_with(lambda_n(n, l), &tol), &tol, l);
    let mut deviation = 0.0f64;
    for (i, cell) in part.intervals().enumerate() {
        let d = cell.len();
        let sup = a.sup_norm(cell)?;
        margins.insert(format!("linf_slack[{i}]"), PI * PI / 4.0 + tol.ae - d * d * sup);
        let resonant = PI * PI / (4.0 * d * d);
        let below = a.dominated_by_on(resonant, cell, &tol)?.strict_mass;
        let above = a.dominates_on(resonant, cell, &tol)?.strict_mass;
        deviation = deviation.max(below + above);
    }
    margins.insert("nonconstancy".into(), deviation - tol.mass(l));
    Ok(Certificate::from_margins(Method::LinfPartition, n, l, margins).with_partition(part))
}

/// `λ_n ≺ a`, every gap below `L/(2n)` and
/// `‖a − λ_n‖_{L¹(y_i, y_{i+1})} < (nπ/L) cot(nπ(y_{i+1} − y_i)/L)` on every cell.
pub fn check_l1_partition(a: &Potential, part: &Partition) -> Result<Certificate> {
    part.check_domain(a)?;
    let n = part.n();
    let l = a.length();
    let tol = Tolerances::default();
    let level = lambda_n(n, l);
    let mut margins = BTreeMap::new();
    record_dominance(&mut margins, "lower", &a.dominates_with(level, &tol), &tol, l);
    let window = l / (2.0 * n as f64);
    for (i, cell) in part.intervals().enumerate() {
        let gap = cell.len();
        margins.insert(format!("gap_slack[{i}]"), window - tol.ae - gap);
        let excess = a.l1_excess(level, cell)?;
        let slack = match interval_l1_bound(n, l, gap) {
            Ok(bound) => bound - MARGIN_REL * bound - excess,
            // the gap condition already fails; record how far the excess overshoots zero
            Err(_) => -excess.max(f64::MIN_POSITIVE),
        };
        margins.insert(format!("l1_slack[{i}]"), slack);
    }
    Ok(Certificate::from_margins(Method::L1Partition, n, l, margins).with_partition(part))
}

/// `‖a − λ_n‖_{L¹(s, y)} / cot(nπ(y − s)/L)` with `a ≡ λ_n` beyond `L`.
pub fn excess_ratio(a: &Potential, n: u32, s: f64, y: f64) -> Result<f64> {
    let l = a.length();
    let excess = extended_excess(a, lambda_n(n, l), s, y)?;
    Ok(excess / cot(n as f64 * PI * (y - s) / l)?)
}

fn extended_excess(a: &Potential, level: f64, s: f64, y: f64) -> Result<f64> {
    let hi = y.min(a.length());
    if hi <= s {
        return Ok(0.0);
    }
    a.l1_excess(level, Interval::new(s, hi)?)
}

/// Greedy L¹ partition with ratio target `nπ/L − eps`.
///
/// Each `y_{i+1}` is the root of the increasing map
/// `y ↦ ‖a − λ_n‖_{L¹(y_i, y)} − (nπ/L − eps) cot(nπ(y − y_i)/L)` on
/// `(y_i, y_i + L/(2n))`, with `a` extended by `λ_n` past `L`. If
/// `y_{2n+1}` overshoots `L` it is clipped to `L − μ` for geometrically
/// shrinking `μ`. Returns the partition only if [`check_l1_partition`]
/// certifies it.
pub fn greedy_partition(a: &Potential, n: u32, eps: f64) -> Result<Option<Partition>> {
    check_n(n)?;
    let l = a.length();
    let level = lambda_n(n, l);
    if !a.dominates(level).holds {
        return Err(Error::Precondition(format!("greedy partition needs λ_{n} ≺ a")));
    }
    let w = n as f64 * PI / l;
    if !(eps > 0.0 && eps < w) {
        return Err(Error::Argument(format!("eps must lie in (0, nπ/L = {w}), got {eps}")));
    }
    let target = w - eps;
    let window = l / (2.0 * n as f64);
    let cap = window * (1.0 - 1e-8);
    let mut points = vec![0.0];
    for _ in 0..=2 * n {
        let s = *points.last().unwrap();
        let f = |y: f64| -> f64 {
            let excess = extended_excess(a, level, s, y).unwrap_or(f64::NAN);
            excess - target * ((w * (y - s)).cos() / (w * (y - s)).sin())
        };
        let hi = s + cap;
        let y = if f(hi) <= 0.0 {
            // the ratio stays below target across the whole window
            hi
        } else {
            let lo = s + window * 1e-12;
            brent(f, lo, hi, 1e-14 * l, 300)?
        };
        points.push(y);
    }
    let last = points.pop().unwrap();
    let try_partition = |mut pts: Vec<f64>, y_last: f64| -> Result<Option<Partition>> {
        pts.push(y_last);
        pts.push(l);
        let part = Partition::new(pts, n)?;
        Ok(check_l1_partition(a, &part)?.is_unique().then_some(part))
    };
    if last >= l {
        let mut mu = 1e-6 * l;
        for _ in 0..10 {
            let y = l - mu;
            if y > *points.last().unwrap() {
                if let Some(p) = try_partition(points.clone(), y)? {
                    return Ok(Some(p));
                }
            }
            mu *= 0.1;
        }
        Ok(None)
    } else {
        try_partition(points, last)
    }
}

/// [`greedy_partition`] at `eps = 10⁻⁶ nπ/L`, retried at `10⁻³ nπ/L`.
pub fn greedy_partition_auto(a: &Potential, n: u32) -> Result<Option<Partition>> {
    let w = n as f64 * PI / a.length();
    for eps in [1e-6 * w, 1e-3 * w] {
        if let Some(p) = greedy_partition(a, n, eps)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Certificate from a greedily constructed L¹ partition.
pub fn check_greedy(a: &Potential, n: u32, eps: Option<f64>) -> Result<Certificate> {
    check_n(n)?;
    let l = a.length();
    let tol = Tolerances::default();
    let lower = a.dominates_with(lambda_n(n, l), &tol);
    let found = if lower.holds {
        match eps {
            Some(e) => greedy_partition(a, n, e)?,
            None => greedy_partition_auto(a, n)?,
        }
    } else {
        None
    };
    let mut cert = match &found {
        Some(p) => check_l1_partition(a, p)?,
        None => {
            let mut margins = BTreeMap::new();
            record_dominance(&mut margins, "lower", &lower, &tol, l);
            margins.insert("partition_found".into(), -1.0);
            Certificate::from_margins(Method::GreedyPartition, n, l, margins)
        }
    };
    cert.method = Method::GreedyPartition;
    Ok(cert)
}

/// Which condition `β` must meet in [`check_nonlinear`].
#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearMode {
    LinfPartition(Partition),
    L1Partition(Partition),
    Greedy(f64),
}

/// Hypothesis (2) for uniqueness of `u'' + f(x, u) = 0` with Neumann data:
/// `λ_n ≤ α ≤ f_u ≤ β`, `α` strictly above `λ_n` on positive measure and `β`
/// passing an L∞ or L¹ partition criterion. `f` itself is never evaluated;
/// the regularity hypotheses are recorded as assumptions.
pub fn check_nonlinear(alpha: &Potential, beta: &Potential, n: u32, mode: &NonlinearMode) -> Result<Certificate> {
    check_n(n)?;
    let over = alpha.max_excess_over(beta)?;
    let tol = Tolerances::default();
    if over > tol.ae {
        return Err(Error::Argument(format!("alpha exceeds beta by {over} somewhere")));
    }
    let l = alpha.length();
    let lower = alpha.dominates_with(lambda_n(n, l), &tol);
    let beta_cert = match mode {
        NonlinearMode::LinfPartition(p) | NonlinearMode::L1Partition(p) if p.n() != n => {
            return Err(Error::Argument(format!("partition is for n = {}, query n = {n}", p.n())));
        }
        NonlinearMode::LinfPartition(p) => check_linf_partition(beta, p)?,
        NonlinearMode::L1Partition(p) => check_l1_partition(beta, p)?,
        NonlinearMode::Greedy(eps) => check_greedy(beta, n, Some(*eps))?,
    };
    let mut margins = BTreeMap::new();
    record_dominance(&mut margins, "alpha_lower", &lower, &tol, l);
    for (k, v) in &beta_cert.margins {
        margins.insert(format!("beta.{k}"), *v);
    }
    let mut cert = Certificate::from_margins(beta_cert.method, n, l, margins);
    cert.partition = beta_cert.partition;
    cert.assumptions = vec![
        "f and f_u are Caratheodory functions on [0,L]×R and f(·,0) ∈ L¹(0,L)".into(),
        "alpha(x) ≤ f_u(x,u) ≤ beta(x) for a.e. x and all u".into(),
    ];
    Ok(cert)
}

/// One checked inequality with its measured slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDistributionReport {
    pub n: u32,
    pub m: usize,
    pub points: Vec<f64>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

/// Checks the zero structure of a resonant `a` with `λ_n ≺ a`: every gap at
/// most `L/(2n)` with one strictly smaller, `m ≥ n + 1`, and on every cell
/// `‖a − λ_n‖_{L¹} ≥ (∫u'² − λ_n∫u²)/u²(x*)`.
pub fn verify_zero_distribution(a: &Potential, n: u32) -> Result<ZeroDistributionReport> {
    check_n(n)?;
    let l = a.length();
    let level = lambda_n(n, l);
    if !a.dominates(level).holds {
        return Err(Error::Precondition(format!("λ_{n} ≺ a does not hold")));
    }
    let t = find_nontrivial_neumann(a, DEFAULT_RESIDUAL_TOL)?
        .ok_or_else(|| Error::Precondition("the Neumann problem has only the trivial solution".into()))?;
    let profile = zero_profile(&t, true)?;
    let window = l / (2.0 * n as f64);
    let gaps = profile.gaps();
    let points = profile.points();
    let mut assertions = Vec::new();
    let mut push = |name: String, passed: bool, slack: f64| assertions.push(Assertion { name, passed, slack });
    push("interlacing".into(), true, gaps.iter().copied().fold(f64::INFINITY, f64::min));
    for (i, g) in gaps.iter().enumerate() {
        let slack = window - g;
        push(format!("gap_bound[{i}]"), slack >= -1e-9, slack);
    }
    let strict = window - gaps.iter().copied().fold(f64::INFINITY, f64::min);
    push("strict_gap".into(), strict > 1e-9, strict);
    let count = profile.m as f64 - (n as f64 + 1.0);
    push("count".into(), count >= 0.0, count);
    for (i, (w, j)) in points.windows(2).zip(profile.energy_quotients(&t, level)).enumerate() {
        let excess = a.l1_excess(level, Interval::new(w[0], w[1])?)?;
        let slack = excess - j;
        push(format!("energy[{i}]"), slack >= -1e-8, slack);
    }
    let passed = assertions.iter().all(|a| a.passed);
    Ok(ZeroDistributionReport {
        n,
        m: profile.m,
        points,
        assertions,
        passed,
    })
}

/// The natural band index: the largest `n` with `λ_n ≤ ess inf a`.
pub fn infer_n(a: &Potential) -> u32 {
    let inf = a.ess_inf(a.domain()).unwrap_or(0.0).max(0.0);
    let n = (a.length() * inf.sqrt() / PI + 1e-12).floor();
    n.min(u32::MAX as f64) as u32
}

/// Front-door pipeline: detect resonance by shooting, then try the
/// criteria cheapest first (classical, Dolph, global L¹, greedy L¹) and stop
/// at the first certificate of uniqueness.
pub fn certify_auto(a: &Potential, n: Option<u32>) -> Result<Certificate> {
    let l = a.length();
    if let Some(t) = find_nontrivial_neumann(a, DEFAULT_RESIDUAL_TOL)? {
        let residual = t.du.last().unwrap() / t.energy_scale();
        let profile = zero_profile(&t, true).ok();
        let mut margins = BTreeMap::new();
        margins.insert("residual".into(), residual);
        return Ok(Certificate {
            verdict: Verdict::ResonantWitness,
            method: Method::Shooting,
            n: n.unwrap_or_else(|| infer_n(a)),
            partition: None,
            margins,
            tolerances: CertTolerances::for_length(l),
            assumptions: Vec::new(),
            witness: Some(Witness {
                residual,
                m: profile.as_ref().map(|p| p.m),
                zeros: profile.map(|p| p.zeros),
            }),
            attempted: vec![Method::Shooting],
        });
    }
    let n = n.unwrap_or_else(|| infer_n(a));
    let mut attempted = vec![Method::Shooting, Method::ClassicalFirst];
    let mut last = check_classical_first(a);
    if !last.is_unique() && n >= 1 {
        let steps: [(Method, &dyn Fn() -> Result<Certificate>); 3] = [
            (Method::Dolph, &|| check_dolph(a, n)),
            (Method::L1Global, &|| check_l1_global(a, n)),
            (Method::GreedyPartition, &|| check_greedy(a, n, None)),
        ];
        for (method, run) in steps {
            attempted.push(method);
            last = run()?;
            if last.is_unique() {
                break;
            }
        }
    }
    last.attempted = attempted;
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::neumann_residual;

    const PI2: f64 = PI * PI;

    fn constant(v: f64) -> Potential {
        Potential::constant(1.0, v).unwrap()
    }

    fn reference_partition() -> Partition {
        Partition::new(vec![0.0, 0.2, 0.45, 0.8, 1.0], 1).unwrap()
    }

    fn resonant_steps(part: &Partition) -> Potential {
        let vals = part.gaps().iter().map(|d| PI2 / (4.0 * d * d)).collect();
        Potential::piecewise_constant(part.points().to_vec(), vals).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0.0, 0.5, 1.0], 1).is_err());
        assert!(Partition::new(vec![0.0, 0.2, 0.2, 0.8, 1.0], 1).is_err());
        assert!(Partition::from_points(vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap().n() == 2);
        assert!(Partition::from_points(vec![0.0, 0.1, 0.2, 1.0]).is_err());
        let eq = Partition::equal(1, 1.0).unwrap();
        assert_eq!(eq.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn classical_examples() {
        assert!(check_classical_first(&constant(PI2 - 0.1)).is_unique());
        assert_eq!(check_classical_first(&constant(PI2)).verdict, Verdict::Inconclusive);
        assert_eq!(check_classical_first(&constant(0.0)).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn dolph_examples() {
        assert!(check_dolph(&constant(2.5 * PI2), 1).unwrap().is_unique());
        assert!(!check_dolph(&constant(4.0 * PI2), 1).unwrap().is_unique());
        assert!(!check_dolph(&constant(PI2), 1).unwrap().is_unique());
    }

    #[test]
    fn l1_global_examples() {
        let c = check_l1_global(&constant(PI2 + 1.0), 1).unwrap();
        assert!(c.is_unique());
        assert!((c.margins["l1_slack"] - (4.0 * PI * (1.0 - 1e-9) - 1.0)).abs() < 1e-12);
        assert!(!check_l1_global(&constant(4.0 * PI2), 1).unwrap().is_unique());
        let below = Potential::piecewise_constant(vec![0.0, 0.5, 1.0], vec![PI2 + 1.0, PI2 - 0.5]).unwrap();
        assert!(!check_l1_global(&below, 1).unwrap().is_unique());
    }

    #[test]
    fn linf_partition_examples() {
        let part = reference_partition();
        let exact = resonant_steps(&part);
        assert!(!check_linf_partition(&exact, &part).unwrap().is_unique());
        for i in 0..4 {
            let mut vals = exact.values().to_vec();
            vals[i] *= 0.99;
            let lowered = Potential::piecewise_constant(part.points().to_vec(), vals).unwrap();
            assert!(check_linf_partition(&lowered, &part).unwrap().is_unique(), "piece {i}");
        }
        let eq = Partition::equal(1, 1.0).unwrap();
        assert!(check_linf_partition(&constant(4.0 * PI2 - 0.1), &eq).unwrap().is_unique());
        let wrong = Partition::new(vec![0.0, 0.2, 0.45, 0.8, 2.0], 1).unwrap();
        assert!(check_linf_partition(&exact, &wrong).is_err());
    }

    #[test]
    fn l1_partition_examples() {
        let eq = Partition::equal(1, 1.0).unwrap();
        let c = check_l1_partition(&constant(PI2 + 1.0), &eq).unwrap();
        assert!(c.is_unique());
        // bound per interval π cot(π/4) = π against excess 1/4
        assert!((c.margins["l1_slack[0]"] - (PI * (1.0 - 1e-9) - 0.25)).abs() < 1e-12);
        let wide = Partition::new(vec![0.0, 0.1, 0.2, 0.3, 1.0], 1).unwrap();
        assert!(!check_l1_partition(&constant(PI2 + 1.0), &wide).unwrap().is_unique());
    }

    #[test]
    fn greedy_first_point_matches_scalar_oracle() {
        // oracle: bisection on y tan(πy) = π − 10⁻², independent of Brent and the potential code
        let g = |y: f64| y * (PI * y).tan() - (PI - 1e-2);
        let (mut lo, mut hi) = (1e-6, 0.5 - 1e-9);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((oracle - 0.454_156_948_162).abs() < 1e-9);
        let part = greedy_partition(&constant(PI2 + 1.0), 1, 1e-2).unwrap().unwrap();
        assert!((part.points()[1] - oracle).abs() < 1e-10);
        assert!(check_l1_partition(&constant(PI2 + 1.0), &part).unwrap().is_unique());
    }

    #[test]
    fn greedy_rejects_resonant() {
        assert!(greedy_partition_auto(&constant(4.0 * PI2), 1).unwrap().is_none());
        assert!(greedy_partition(&constant(PI2), 1, 1e-3).is_err());
        assert!(greedy_partition(&constant(PI2 + 1.0), 1, 10.0).is_err());
    }

    #[test]
    fn greedy_handles_flat_windows() {
        // a = λ1 except for a narrow bump: most windows carry no excess
        let a = Potential::piecewise_constant(vec![0.0, 0.6, 0.62, 1.0], vec![PI2, PI2 + 5.0, PI2]).unwrap();
        assert!(check_l1_global(&a, 1).unwrap().is_unique());
        let part = greedy_partition_auto(&a, 1).unwrap().unwrap();
        assert!(check_l1_partition(&a, &part).unwrap().is_unique());
    }

    #[test]
    fn nonlinear_examples() {
        let part = reference_partition();
        let mut vals = resonant_steps(&part).values().to_vec();
        vals[1] *= 0.99;
        let beta = Potential::piecewise_constant(part.points().to_vec(), vals).unwrap();
        let alpha = constant(PI2 + 0.1);
        let c = check_nonlinear(&alpha, &beta, 1, &NonlinearMode::LinfPartition(part.clone())).unwrap();
        assert!(c.is_unique());
        assert_eq!(c.assumptions.len(), 2);

        let c = check_nonlinear(&constant(PI2), &beta, 1, &NonlinearMode::LinfPartition(part.clone())).unwrap();
        assert!(!c.is_unique());

        let eq = Partition::equal(1, 1.0).unwrap();
        let c = check_nonlinear(&alpha, &constant(4.0 * PI2), 1, &NonlinearMode::LinfPartition(eq)).unwrap();
        assert!(!c.is_unique());

        assert!(check_nonlinear(&constant(50.0), &constant(40.0), 1, &NonlinearMode::Greedy(1e-3)).is_err());
        let c = check_nonlinear(&alpha, &constant(PI2 + 1.0), 1, &NonlinearMode::Greedy(1e-3)).unwrap();
        assert!(c.is_unique());
    }

    #[test]
    fn zero_distribution_of_lambda3() {
        let r = verify_zero_distribution(&constant(9.0 * PI2), 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.m, 3);
        assert!(verify_zero_distribution(&constant(2.5 * PI2), 1).is_err());
    }

    #[test]
    fn resonant_step_zero_distribution() {
        let r = verify_zero_distribution(&resonant_steps(&reference_partition()), 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.m, 2);
        for (p, y) in r.points.iter().zip(reference_partition().points()) {
            assert!((p - y).abs() < 1e-9);
        }
    }

    #[test]
    fn auto_pipeline() {
        let c = certify_auto(&constant(2.5 * PI2), Some(1)).unwrap();
        assert!(c.is_unique());
        assert_eq!(c.method, Method::Dolph);
        assert_eq!(c.attempted, vec![Method::Shooting, Method::ClassicalFirst, Method::Dolph]);

        let c = certify_auto(&constant(4.0 * PI2), Some(1)).unwrap();
        assert_eq!(c.verdict, Verdict::ResonantWitness);
        assert_eq!(c.witness.as_ref().unwrap().m, Some(2));

        assert_eq!(infer_n(&constant(2.5 * PI2)), 1);
        assert_eq!(infer_n(&constant(4.0 * PI2)), 2);
    }

    #[test]
    fn certificates_are_deterministic() {
        let a = constant(PI2 + 1.0);
        let x = crate::json::to_string(&check_greedy(&a, 1, None).unwrap());
        let y = crate::json::to_string(&check_greedy(&a, 1, None).unwrap());
        assert_eq!(x, y);
        let v: serde_json::Value = serde_json::from_str(&x).unwrap();
        for key in ["verdict", "method", "n", "partition", "margins", "tolerances", "assumptions"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn unique_verdicts_have_positive_margins() {
        let c = check_l1_partition(&constant(PI2 + 1.0), &Partition::equal(1, 1.0).unwrap()).unwrap();
        assert!(c.is_unique());
        assert!(c.margins.values().all(|m| *m > 0.0));
        assert!(neumann_residual(&constant(PI2 + 1.0)).unwrap().abs() > 1e-3);
    }
}
