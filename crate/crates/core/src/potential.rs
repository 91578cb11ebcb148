//! Coefficients `a(x)` on `[0, L]`.
//!
//! Two representations are supported: piecewise-constant on half-open cells
//! `[x_i, x_{i+1})` and sampled values joined by linear interpolation. Both
//! are piecewise linear, so every norm used by the certifier is computed in
//! closed form cell by cell rather than by adaptive quadrature.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Numeric slack used to decide the `≺` relation in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed violation of an almost-everywhere lower bound.
    pub ae: f64,
    /// A point counts towards the strict set only above `level + strict`.
    pub strict: f64,
    /// Required strict mass, relative to the domain length.
    pub mass_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ae: 1e-12,
            strict: 1e-9,
            mass_rel: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn mass(&self, length: f64) -> f64 {
        self.mass_rel * length
    }
}

/// A closed subinterval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Outcome of testing `level ≺ a` (or `a ≺ level`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub holds: bool,
    /// Essential infimum of the gap function over the interval.
    pub ess_inf_gap: f64,
    /// Integral of the gap over the set where it exceeds `τ_strict`.
    pub strict_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

/// One cell of the representation on which `a` is affine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    /// Limit of `a` at `lo` from the right.
    pub left: f64,
    /// Limit of `a` at `hi` from the left.
    pub right: f64,
}

impl Segment {
    pub fn value_at(&self, x: f64) -> f64 {
        if self.left == self.right {
            return self.left;
        }
        if x <= self.lo {
            return self.left;
        }
        if x >= self.hi {
            return self.right;
        }
        let t = (x - self.lo) / (self.hi - self.lo);
        self.left + (self.right - self.left) * t
    }

    pub fn slope(&self) -> f64 {
        (self.right - self.left) / (self.hi - self.lo)
    }

    /// The part of this segment inside `[lo, hi]`, if it has positive length.
    fn clip(&self, lo: f64, hi: f64) -> Option<Segment> {
        let a = self.lo.max(lo);
        let b = self.hi.min(hi);
        if b <= a {
            return None;
        }
        Some(Segment {
            lo: a,
            hi: b,
            left: self.value_at(a),
            right: self.value_at(b),
        })
    }
}

/// `∫_p^q |f|` for `f` affine with `f(p) = fp`, `f(q) = fq`.
fn affine_abs_integral(width: f64, fp: f64, fq: f64) -> f64 {
    if fp * fq >= 0.0 {
        0.5 * width * (fp.abs() + fq.abs())
    } else {
        0.5 * width * (fp * fp + fq * fq) / (fp.abs() + fq.abs())
    }
}

/// `∫ f` over the part of `[p, q]` where `f > threshold`, `f` affine.
fn affine_integral_above(p: f64, q: f64, fp: f64, fq: f64, threshold: f64) -> f64 {
    let (above_p, above_q) = (fp > threshold, fq > threshold);
    match (above_p, above_q) {
        (true, true) => 0.5 * (q - p) * (fp + fq),
        (false, false) => 0.0,
        _ => {
            let t = (threshold - fp) / (fq - fp);
            let xc = p + t * (q - p);
            if above_p {
                0.5 * (xc - p) * (fp + threshold)
            } else {
                0.5 * (q - xc) * (threshold + fq)
            }
        }
    }
}

fn check_nodes(name: &str, nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::Argument(format!("{name} needs at least two points")));
    }
    if nodes[0] != 0.0 {
        return Err(Error::Argument(format!("{name} must start at 0")));
    }
    if nodes.iter().any(|x| !x.is_finite()) {
        return Err(Error::Argument(format!("{name} contains non-finite entries")));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

/// The coefficient `a(x)` on `[0, L]`; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    length: f64,
    repr: Representation,
}

impl Potential {
    /// Cells `[b_i, b_{i+1})` carrying `values[i]`; `L` is the last breakpoint.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_nodes("breakpoints", &breakpoints)?;
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::Argument(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("potential values must be finite".into()));
        }
        Ok(Self {
            length: *breakpoints.last().unwrap(),
            repr: Representation::PiecewiseConstant { breakpoints, values },
        })
    }

    /// Node values joined linearly; `L` is the last grid point.
    pub fn sampled(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_nodes("grid", &grid)?;
        if values.len() != grid.len() {
            return Err(Error::Argument(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("potential values must be finite".into()));
        }
        Ok(Self {
            length: *grid.last().unwrap(),
            repr: Representation::Sampled { grid, values },
        })
    }

    pub fn constant(length: f64, value: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Argument(format!("domain length must be positive, got {length}")));
        }
        Self::piecewise_constant(vec![0.0, length], vec![value])
    }

    /// Samples `f` at `nodes` (which must run from 0 to L).
    pub fn sample_fn<F: Fn(f64) -> f64>(nodes: Vec<f64>, f: F) -> Result<Self> {
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::sampled(nodes, values)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: 0.0,
            hi: self.length,
        }
    }

    /// Nodes at which `a` or its derivative may jump, including 0 and L.
    pub fn breakpoints(&self) -> &[f64] {
        match &self.repr {
            Representation::PiecewiseConstant { breakpoints, .. } => breakpoints,
            Representation::Sampled { grid, .. } => grid,
        }
    }

    pub fn values(&self) -> &[f64] {
        match &self.repr {
            Representation::PiecewiseConstant { values, .. } => values,
            Representation::Sampled { values, .. } => values,
        }
    }

    pub fn num_segments(&self) -> usize {
        self.breakpoints().len() - 1
    }

    pub fn segment(&self, i: usize) -> Segment {
        match &self.repr {
            Representation::PiecewiseConstant { breakpoints, values } => Segment {
                lo: breakpoints[i],
                hi: breakpoints[i + 1],
                left: values[i],
                right: values[i],
            },
            Representation::Sampled { grid, values } => Segment {
                lo: grid[i],
                hi: grid[i + 1],
                left: values[i],
                right: values[i + 1],
            },
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.num_segments()).map(move |i| self.segment(i))
    }

    /// Segments clipped to `interval`, skipping empty intersections.
    pub fn segments_in(&self, interval: Interval) -> impl Iterator<Item = Segment> + '_ {
        let nodes = self.breakpoints();
        // first segment whose right end lies beyond interval.lo
        let start = nodes[1..].partition_point(|&x| x <= interval.lo);
        (start..self.num_segments())
            .map(move |i| self.segment(i))
            .take_while(move |s| s.lo < interval.hi)
            .filter_map(move |s| s.clip(interval.lo, interval.hi))
    }

    /// Value of `a` at `x`; cells are right-continuous, the last one closed.
    pub fn eval(&self, x: f64) -> f64 {
        let nodes = self.breakpoints();
        let i = nodes[1..]
            .partition_point(|&b| b <= x)
            .min(self.num_segments() - 1);
        self.segment(i).value_at(x.clamp(nodes[i], nodes[i + 1]))
    }

    /// Validates that `interval ⊆ [0, L]`, absorbing rounding at the ends.
    pub fn check_interval(&self, interval: Interval) -> Result<Interval> {
        let slack = 1e-12 * self.length;
        if interval.lo < -slack || interval.hi > self.length + slack || interval.lo >= interval.hi {
            return Err(Error::Domain(format!(
                "interval [{}, {}] is not inside [0, {}]",
                interval.lo, interval.hi, self.length
            )));
        }
        Interval::new(interval.lo.max(0.0), interval.hi.min(self.length))
    }

    /// `∫_I |a(x) - level| dx`, exact on every cell.
    pub fn l1_excess(&self, level: f64, interval: Interval) -> Result<f64> {
        let interval = self.check_interval(interval)?;
        Ok(self
            .segments_in(interval)
            .map(|s| affine_abs_integral(s.hi - s.lo, s.left - level, s.right - level))
            .sum())
    }

    /// `∫_I a(x) dx`.
    pub fn integral(&self, interval: Interval) -> Result<f64> {
        let interval = self.check_interval(interval)?;
        Ok(self
            .segments_in(interval)
            .map(|s| 0.5 * (s.hi - s.lo) * (s.left + s.right))
            .sum())
    }

    /// Essential supremum of `|a|` over `I`.
    pub fn sup_norm(&self, interval: Interval) -> Result<f64> {
        let interval = self.check_interval(interval)?;
        Ok(self
            .segments_in(interval)
            .map(|s| s.left.abs().max(s.right.abs()))
            .fold(0.0, f64::max))
    }

    /// Essential infimum of `a` over `I`.
    pub fn ess_inf(&self, interval: Interval) -> Result<f64> {
        let interval = self.check_interval(interval)?;
        Ok(self
            .segments_in(interval)
            .map(|s| s.left.min(s.right))
            .fold(f64::INFINITY, f64::min))
    }

    /// Essential supremum of `a` (signed) over `I`.
    pub fn ess_sup(&self, interval: Interval) -> Result<f64> {
        let interval = self.check_interval(interval)?;
        Ok(self
            .segments_in(interval)
            .map(|s| s.left.max(s.right))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    fn gap_report(
        &self,
        interval: Interval,
        gap: impl Fn(f64) -> f64,
        tol: &Tolerances,
    ) -> DominanceReport {
        let mut ess_inf_gap = f64::INFINITY;
        let mut strict_mass = 0.0;
        for s in self.segments_in(interval) {
            let (gl, gr) = (gap(s.left), gap(s.right));
            ess_inf_gap = ess_inf_gap.min(gl.min(gr));
            strict_mass += affine_integral_above(s.lo, s.hi, gl, gr, tol.strict);
        }
        DominanceReport {
            holds: ess_inf_gap >= -tol.ae && strict_mass > tol.mass(self.length),
            ess_inf_gap,
            strict_mass,
        }
    }

    /// `level ≺ a` on `[0, L]` with the default tolerances.
    pub fn dominates(&self, level: f64) -> DominanceReport {
        self.dominates_with(level, &Tolerances::default())
    }

    pub fn dominates_with(&self, level: f64, tol: &Tolerances) -> DominanceReport {
        self.gap_report(self.domain(), |v| v - level, tol)
    }

    /// `level ≺ a` restricted to `interval`.
    pub fn dominates_on(&self, level: f64, interval: Interval, tol: &Tolerances) -> Result<DominanceReport> {
        let interval = self.check_interval(interval)?;
        Ok(self.gap_report(interval, |v| v - level, tol))
    }

    /// `a ≺ level` on `[0, L]`.
    pub fn dominated_by(&self, level: f64) -> DominanceReport {
        self.dominated_by_with(level, &Tolerances::default())
    }

    pub fn dominated_by_with(&self, level: f64, tol: &Tolerances) -> DominanceReport {
        self.gap_report(self.domain(), |v| level - v, tol)
    }

    /// `a ≺ level` restricted to `interval`.
    pub fn dominated_by_on(&self, level: f64, interval: Interval, tol: &Tolerances) -> Result<DominanceReport> {
        let interval = self.check_interval(interval)?;
        Ok(self.gap_report(interval, |v| level - v, tol))
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let repr = match &self.repr {
            Representation::PiecewiseConstant { breakpoints, values } => Representation::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|&v| f(v)).collect(),
            },
            Representation::Sampled { grid, values } => Representation::Sampled {
                grid: grid.clone(),
                values: values.iter().map(|&v| f(v)).collect(),
            },
        };
        Self {
            length: self.length,
            repr,
        }
    }

    /// `a + delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        self.map_values(|v| v + delta)
    }

    /// `a` with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        self.map_values(|v| v * factor)
    }

    /// `s² a(s x)` on `[0, L/s]`, the coefficient of the rescaled equation.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Argument(format!("scale factor must be positive, got {s}")));
        }
        let nodes: Vec<f64> = self.breakpoints().iter().map(|&x| x / s).collect();
        let values = self.values().iter().map(|&v| v * s * s).collect();
        match self.repr {
            Representation::PiecewiseConstant { .. } => Self::piecewise_constant(nodes, values),
            Representation::Sampled { .. } => Self::sampled(nodes, values),
        }
    }

    /// `a(L - x)`.
    pub fn reflected(&self) -> Self {
        let length = self.length;
        let mut nodes: Vec<f64> = self.breakpoints().iter().rev().map(|&x| length - x).collect();
        nodes[0] = 0.0;
        *nodes.last_mut().unwrap() = length;
        let values: Vec<f64> = self.values().iter().rev().copied().collect();
        let repr = match self.repr {
            Representation::PiecewiseConstant { .. } => Representation::PiecewiseConstant {
                breakpoints: nodes,
                values,
            },
            Representation::Sampled { .. } => Representation::Sampled { grid: nodes, values },
        };
        Self { length, repr }
    }

    /// Checks `self ≤ other` at every cell limit of the merged grid. Both
    /// potentials are affine between merged nodes, so this is exact.
    pub fn max_excess_over(&self, other: &Potential) -> Result<f64> {
        if (self.length - other.length).abs() > 1e-12 * self.length {
            return Err(Error::Argument(format!(
                "potentials live on different domains ({} vs {})",
                self.length, other.length
            )));
        }
        let mut nodes: Vec<f64> = self
            .breakpoints()
            .iter()
            .chain(other.breakpoints())
            .copied()
            .filter(|&x| x <= self.length)
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let mut worst = f64::NEG_INFINITY;
        for w in nodes.windows(2) {
            let cell = Interval { lo: w[0], hi: w[1] };
            let mine: Vec<Segment> = self.segments_in(cell).collect();
            let theirs: Vec<Segment> = other.segments_in(cell).collect();
            if let (Some(s), Some(o)) = (mine.first(), theirs.first()) {
                worst = worst.max(s.left - o.left).max(s.right - o.right);
            }
        }
        Ok(worst)
    }
}

/// On-disk form of a [`Potential`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialFile {
    #[serde(rename = "L")]
    pub length: f64,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<String>,
}

impl From<&Potential> for PotentialFile {
    fn from(p: &Potential) -> Self {
        match &p.repr {
            Representation::PiecewiseConstant { breakpoints, values } => Self {
                length: p.length,
                kind: "piecewise_constant".into(),
                breakpoints: Some(breakpoints.clone()),
                grid: None,
                values: values.clone(),
                interpolation: None,
            },
            Representation::Sampled { grid, values } => Self {
                length: p.length,
                kind: "sampled".into(),
                breakpoints: None,
                grid: Some(grid.clone()),
                values: values.clone(),
                interpolation: Some("linear".into()),
            },
        }
    }
}

impl TryFrom<PotentialFile> for Potential {
    type Error = Error;

    fn try_from(f: PotentialFile) -> Result<Self> {
        if !(f.length > 0.0 && f.length.is_finite()) {
            return Err(Error::Parse(format!("L must be positive, got {}", f.length)));
        }
        let fix_end = |mut nodes: Vec<f64>, name: &str| -> Result<Vec<f64>> {
            let last = *nodes
                .last()
                .ok_or_else(|| Error::Parse(format!("{name} is empty")))?;
            if (last - f.length).abs() > 1e-12 * f.length {
                return Err(Error::Parse(format!("{name} ends at {last}, expected L = {}", f.length)));
            }
            *nodes.last_mut().unwrap() = f.length;
            Ok(nodes)
        };
        match f.kind.as_str() {
            "piecewise_constant" => {
                let b = f
                    .breakpoints
                    .ok_or_else(|| Error::Parse("piecewise_constant needs breakpoints".into()))?;
                Potential::piecewise_constant(fix_end(b, "breakpoints")?, f.values)
            }
            "sampled" => {
                if let Some(i) = f.interpolation.as_deref() {
                    if i != "linear" {
                        return Err(Error::Parse(format!("unsupported interpolation {i:?}")));
                    }
                }
                let g = f.grid.ok_or_else(|| Error::Parse("sampled needs grid".into()))?;
                Potential::sampled(fix_end(g, "grid")?, f.values)
            }
            other => Err(Error::Parse(format!("unknown potential kind {other:?}"))),
        }
    }
}

impl Serialize for Potential {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PotentialFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Potential {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PotentialFile::deserialize(d)?;
        Potential::try_from(f).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn step() -> Potential {
        Potential::piecewise_constant(vec![0.0, 0.5, 1.0], vec![61.685, 39.478]).unwrap()
    }

    fn linear_ramp() -> Potential {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        Potential::sample_fn(grid, |x| PI2 + x).unwrap()
    }

    #[test]
    fn l1_excess_examples() {
        let a = Potential::constant(1.0, PI2 + 1.0).unwrap();
        assert!((a.l1_excess(PI2, unit()).unwrap() - 1.0).abs() < 1e-12);

        let a = Potential::constant(1.0, 4.0 * PI2).unwrap();
        assert!((a.l1_excess(PI2, unit()).unwrap() - 3.0 * PI2).abs() < 1e-12);

        // exact antiderivative of x on [0, 1]
        assert!((linear_ramp().l1_excess(PI2, unit()).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn l1_excess_handles_sign_change_inside_cell() {
        // |x - 1/2| on [0,1] sampled at the endpoints only: exact value 1/4
        let a = Potential::sampled(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!((a.l1_excess(0.5, unit()).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(step().sup_norm(unit()).unwrap(), 61.685);
        assert_eq!(step().sup_norm(Interval::new(0.5, 1.0).unwrap()).unwrap(), 39.478);
        let s = linear_ramp().sup_norm(Interval::new(0.25, 0.75).unwrap()).unwrap();
        assert!((s - (PI2 + 0.75)).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_interval_is_rejected() {
        let e = step().l1_excess(0.0, Interval::new(0.5, 1.5).unwrap());
        assert!(matches!(e, Err(Error::Domain(_))));
        assert!(step().sup_norm(Interval::new(-0.1, 0.5).unwrap()).is_err());
    }

    #[test]
    fn dominance_examples() {
        let r = Potential::constant(1.0, PI2).unwrap().dominates(PI2);
        assert!(!r.holds);
        assert_eq!(r.strict_mass, 0.0);

        assert!(Potential::constant(1.0, PI2 + 0.1).unwrap().dominates(PI2).holds);

        let a = Potential::piecewise_constant(vec![0.0, 0.5, 1.0], vec![PI2 + 1.0, PI2 - 1e-3]).unwrap();
        let r = a.dominates(PI2);
        assert!(!r.holds);
        assert!((r.ess_inf_gap + 1e-3).abs() < 1e-12);
    }

    #[test]
    fn dominated_by_is_the_reverse_relation() {
        let a = Potential::constant(1.0, 2.0).unwrap();
        assert!(a.dominated_by(3.0).holds);
        assert!(!a.dominated_by(2.0).holds);
        assert!(!a.dominated_by(1.0).holds);
    }

    #[test]
    fn cells_are_right_continuous() {
        assert_eq!(step().eval(0.5), 39.478);
        assert_eq!(step().eval(0.4999), 61.685);
        assert_eq!(step().eval(1.0), 39.478);
    }

    #[test]
    fn malformed_inputs() {
        assert!(Potential::piecewise_constant(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Potential::piecewise_constant(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(Potential::sampled(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4]).is_err());
        assert!(Potential::sampled(vec![0.0, 1.0], vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn json_round_trip_and_schema() {
        let json = serde_json::to_string(&step()).unwrap();
        assert!(json.starts_with(r#"{"L":1.0,"kind":"piecewise_constant","breakpoints""#));
        let back: Potential = serde_json::from_str(&json).unwrap();
        assert_eq!(back, step());

        let json = serde_json::to_string(&linear_ramp()).unwrap();
        assert!(json.contains(r#""interpolation":"linear""#));
        let back: Potential = serde_json::from_str(&json).unwrap();
        assert_eq!(back, linear_ramp());

        let bad = r#"{"L":2.0,"kind":"piecewise_constant","breakpoints":[0,1],"values":[1]}"#;
        assert!(serde_json::from_str::<Potential>(bad).is_err());
    }

    #[test]
    fn pointwise_comparison() {
        let lo = Potential::constant(1.0, 1.0).unwrap();
        assert!(lo.max_excess_over(&linear_ramp()).unwrap() < 0.0);
        assert!(linear_ramp().max_excess_over(&step()).unwrap() < 0.0);
        assert!(step().max_excess_over(&linear_ramp()).unwrap() > 0.0);
    }

    fn arb_potential() -> impl Strategy<Value = Potential> {
        (1usize..8, any::<bool>(), 0.5f64..3.0).prop_flat_map(|(cells, sampled, length)| {
            let nv = if sampled { cells + 1 } else { cells };
            (
                prop::collection::vec(0.05f64..1.0, cells),
                prop::collection::vec(-5.0f64..60.0, nv),
            )
                .prop_map(move |(widths, values)| {
                    let total: f64 = widths.iter().sum();
                    let mut nodes = vec![0.0];
                    let mut acc = 0.0;
                    for w in &widths {
                        acc += w / total * length;
                        nodes.push(acc);
                    }
                    *nodes.last_mut().unwrap() = length;
                    if sampled {
                        Potential::sampled(nodes, values).unwrap()
                    } else {
                        Potential::piecewise_constant(nodes, values).unwrap()
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn l1_excess_is_additive(a in arb_potential(), level in -5.0f64..50.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let l = a.length();
            let (p, r) = (0.0, l);
            let q = (t1.min(t2) * 0.9 + 0.05) * l;
            let left = a.l1_excess(level, Interval::new(p, q).unwrap()).unwrap();
            let right = a.l1_excess(level, Interval::new(q, r).unwrap()).unwrap();
            let whole = a.l1_excess(level, Interval::new(p, r).unwrap()).unwrap();
            prop_assert!((left + right - whole).abs() <= 1e-12 * (1.0 + whole));
        }

        #[test]
        fn sup_norm_monotone_under_inclusion(a in arb_potential(), t in prop::collection::vec(0.0f64..1.0, 4)) {
            let mut t = t;
            t.sort_by(f64::total_cmp);
            let l = a.length();
            let inner = Interval::new(t[1] * l, t[2] * l + 1e-6).unwrap();
            let outer = Interval::new(t[0] * l, (t[3] * l + 2e-6).min(l)).unwrap();
            let inner = Interval::new(inner.lo, inner.hi.min(outer.hi)).unwrap();
            prop_assert!(a.sup_norm(inner).unwrap() <= a.sup_norm(outer).unwrap());
        }

        #[test]
        fn dominance_is_monotone_in_the_potential(b in arb_potential(), bump in 0.0f64..5.0, level in -5.0f64..10.0) {
            let a = b.shifted(bump);
            if b.dominates(level).holds {
                prop_assert!(a.dominates(level).holds);
            }
        }

        #[test]
        fn rescaling_covariance(a in arb_potential(), s in 0.3f64..3.0, level in -5.0f64..50.0) {
            let scaled = a.rescaled(s).unwrap();
            let lhs = scaled.l1_excess(s * s * level, scaled.domain()).unwrap();
            let rhs = s * a.l1_excess(level, a.domain()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
        }

        #[test]
        fn reflection_preserves_norms(a in arb_potential(), level in -5.0f64..50.0) {
            let r = a.reflected();
            let d = (r.l1_excess(level, r.domain()).unwrap() - a.l1_excess(level, a.domain()).unwrap()).abs();
            prop_assert!(d < 1e-10);
            prop_assert_eq!(r.sup_norm(r.domain()).unwrap(), a.sup_norm(a.domain()).unwrap());
        }
    }
}
