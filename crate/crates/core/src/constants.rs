//! Closed-form eigenvalues, Lyapunov constants and variational minima.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::potential::Interval;
use crate::{Error, Result};

/// Arguments closer than this to a multiple of π are rejected by [`cot`].
pub const COT_POLE_GUARD: f64 = 1e-8;

/// `cos x / sin x` with the argument reduced to `(-π/2, π/2]` first.
pub fn cot(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cot of non-finite argument {x}")));
    }
    let k = (x / PI).round();
    let r = x - k * PI;
    if r.abs() < COT_POLE_GUARD {
        return Err(Error::Domain(format!("cot({x}) is within {COT_POLE_GUARD:e} of a pole")));
    }
    Ok(r.cos() / r.sin())
}

/// An index `n` together with the domain length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenIndex {
    pub n: u32,
    #[serde(rename = "L")]
    pub length: f64,
}

impl EigenIndex {
    pub fn new(n: u32, length: f64) -> Result<Self> {
        check_length(length)?;
        Ok(Self { n, length })
    }

    pub fn lambda(&self) -> f64 {
        lambda_n(self.n, self.length)
    }

    /// The frequency `nπ/L` that appears throughout the L¹ theory.
    pub fn frequency(&self) -> f64 {
        self.n as f64 * PI / self.length
    }
}

fn check_length(length: f64) -> Result<()> {
    if length > 0.0 && length.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("domain length must be positive, got {length}")))
    }
}

/// Neumann eigenvalue `n²π²/L²`.
pub fn lambda_n(n: u32, length: f64) -> f64 {
    let n = n as f64;
    n * n * PI * PI / (length * length)
}

/// Eigenvalue of `u'' + μu = 0, u'(0) = u(L) = 0`, counted from `n = 1`:
/// `(2n − 1)²π² / (4L²)`.
pub fn mu_n(n: u32, length: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("mixed eigenvalues are indexed from n = 1".into()));
    }
    check_length(length)?;
    let k = 2.0 * n as f64 - 1.0;
    Ok(k * k * PI * PI / (4.0 * length * length))
}

/// L¹ Lyapunov constant `(2πn(n+1)/L) cot(πn / (2(n+1)))`.
///
/// Real `n > 0` is accepted so the `n → 0⁺` behaviour can be examined.
pub fn beta1(n: f64, length: f64) -> Result<f64> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Domain(format!("beta1 needs n > 0, got {n}")));
    }
    check_length(length)?;
    Ok(2.0 * PI * n * (n + 1.0) / length * cot(PI * n / (2.0 * (n + 1.0)))?)
}

/// L∞ Lyapunov constant, equal to `λ_{n+1}`.
pub fn beta_inf(n: u32, length: f64) -> f64 {
    lambda_n(n + 1, length)
}

fn check_j_range(m: f64, interval: Interval) -> Result<f64> {
    let bound = PI * PI / (4.0 * interval.len() * interval.len());
    if !(m > 0.0) || m > bound * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "need 0 < M <= π²/(4|I|²) = {bound}, got M = {m}"
        )));
    }
    Ok(bound)
}

/// Infimum of `(∫u'² − M∫u²) / u²(b)` over `u(a) = 0`: `√M cot(√M |I|)`.
pub fn j_min(m: f64, interval: Interval) -> Result<f64> {
    let bound = check_j_range(m, interval)?;
    if (m - bound).abs() <= 1e-12 * bound {
        return Ok(0.0);
    }
    let r = m.sqrt();
    Ok(r * cot(r * interval.len())?)
}

/// The minimiser of [`j_min`] normalised by `u(b) = 1`.
pub fn j_minimizer(m: f64, interval: Interval, x: f64) -> Result<f64> {
    check_j_range(m, interval)?;
    if !interval.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x} lies outside [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    let r = m.sqrt();
    Ok((r * (x - interval.lo)).sin() / (r * interval.len()).sin())
}

/// Minimum of `Σ cot z_i` over `z ∈ (0, π/2]^r`, `Σ z_i = S`: `r cot(S/r)`.
pub fn f_min(r: u32, s: f64) -> Result<f64> {
    if r == 0 || !(s > 0.0) || !(r as f64 * PI > 2.0 * s) {
        return Err(Error::Domain(format!("need r ≥ 1, S > 0 and rπ > 2S; got r = {r}, S = {s}")));
    }
    Ok(r as f64 * cot(s / r as f64)?)
}

/// Corrected bound `A + 2(k+1)√A cot(√A / (2(k+1)))` for `L = 1`.
pub fn yong_bound(a: f64, k: u32) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("need A > 0, got {a}")));
    }
    let w = 2.0 * (k as f64 + 1.0);
    let arg = a.sqrt() / w;
    if arg >= PI {
        return Err(Error::Domain(format!("need √A/(2(k+1)) < π, got {arg}")));
    }
    Ok(a + w * a.sqrt() * cot(arg)?)
}

/// `2m cot(nπ / (2m))`, strictly increasing in `m ≥ n + 1`.
pub fn cot_sum_profile(n: u32, m: u32) -> Result<f64> {
    let m = m as f64;
    Ok(2.0 * m * cot(n as f64 * PI / (2.0 * m))?)
}

/// Per-interval L¹ bound `(nπ/L) cot(nπ Δ / L)` for a gap `Δ < L/(2n)`.
pub fn interval_l1_bound(n: u32, length: f64, gap: f64) -> Result<f64> {
    let w = n as f64 * PI / length;
    if !(gap > 0.0) || w * gap >= PI / 2.0 {
        return Err(Error::Domain(format!("gap {gap} must lie in (0, L/(2n))")));
    }
    Ok(w * cot(w * gap)?)
}
