//! The lacunary counterexample: `∫_0^1 max_k ‖∂_t u_k(t,·)‖_{L_1(0,1)} dt`
//! grows like `K` while `‖(Σ_k |g_k|²)^{1/2}‖_p` grows like `√K`, for
//! `g_k = φ e^{i2π2^k x}` with `φ̂` a bump supported in `(0, ∞)`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ExperimentReport;
use crate::operators::BumpProfile;
use crate::quad::UnitRule;
use crate::Error;

/// Smallest accepted `LHS(8)/LHS(4)`, calibrated against the default run
/// (which gives about 2.06).
pub const LHS_GROWTH_MIN: f64 = 1.4;
/// Tolerance on the constancy of `RHS(K)/√K`.
const RHS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AppendixSpec {
    pub profile: BumpProfile,
    /// Frequencies `2^k` for `k0 < k ≤ k0 + K`.
    pub k0: u32,
    /// The counts `K` to compare.
    pub ks: Vec<u32>,
    /// Exponent of the right-hand side.
    pub p: f64,
    /// Gauss–Legendre panels for the `L_1(0, 1)` norms.
    pub x_panels: usize,
    /// Panels per dyadic octave of `t`.
    pub t_panels: usize,
    /// `R` is cut to `(−truncation, truncation)` for `‖φ‖_p` and `‖φ'‖_1`.
    pub truncation: f64,
    /// Uniform `t` samples in `[0, 1]` added to the quadrature nodes for `c₀`.
    pub c0_samples: usize,
}

impl Default for AppendixSpec {
    fn default() -> Self {
        AppendixSpec {
            profile: BumpProfile::default(),
            k0: 4,
            ks: vec![2, 4, 8],
            p: 2.0,
            x_panels: 4,
            t_panels: 4,
            truncation: 256.0,
            c0_samples: 64,
        }
    }
}

impl AppendixSpec {
    pub fn validate(&self) -> Result<(), Error> {
        self.profile.validate()?;
        if self.ks.is_empty()
            || self
                .ks
                .iter()
                .any(|&k| k == 0 || k > 12 || self.k0 + k > 30)
        {
            return Err(Error::Precondition(format!(
                "counts {:?} must lie in [1, 12] with k0 + K ≤ 30",
                self.ks
            )));
        }
        if self.p.is_nan() || self.p < 1.0 || self.p.is_infinite() {
            return Err(Error::Precondition(format!(
                "exponent {} outside [1, ∞)",
                self.p
            )));
        }
        if self.x_panels == 0 || self.t_panels == 0 || !(self.truncation >= 1.0) {
            return Err(Error::Precondition(
                "quadrature resolutions must be positive".into(),
            ));
        }
        Ok(())
    }
}

const ORDER: usize = 12;

fn uniform_breaks(lo: f64, hi: f64, panels: usize) -> Vec<f64> {
    (0..=panels)
        .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
        .collect()
}

/// Every octave `[2^{-m-1}, 2^{-m}]` from `2^{-top}` up to `1`, each split
/// into `panels` pieces.
fn t_breaks(top: u32, panels: usize) -> Vec<f64> {
    let mut v = vec![(-(top as f64)).exp2()];
    for m in (0..top).rev() {
        let lo = (-(m as f64) - 1.0).exp2();
        v.extend(uniform_breaks(lo, 2.0 * lo, panels).into_iter().skip(1));
    }
    v
}

struct Norms<'a> {
    spec: &'a AppendixSpec,
    x_nodes: Vec<(f64, f64)>,
}

impl Norms<'_> {
    /// `e^{2πt2^k} ‖∂_t P_t g_k‖_{L_1(0,1)} = ‖Ṗ_tφ − 2π2^k P_tφ‖_{L_1(0,1)}`:
    /// the modulation factors out exactly and the rest does not underflow.
    fn dt_scaled(&self, k: u32, t: f64) -> f64 {
        let f = (k as f64).exp2();
        let m = |eta: f64| Complex64::new(-2.0 * PI * (eta + f) * (-2.0 * PI * t * eta).exp(), 0.0);
        self.x_nodes
            .iter()
            .map(|&(x, w)| w * self.spec.profile.transform(x, m).norm())
            .sum()
    }

    /// `‖P_t φ‖_{L_1(0,1)}`.
    fn pt(&self, t: f64) -> f64 {
        self.x_nodes
            .iter()
            .map(|&(x, w)| w * self.spec.profile.poisson(t, x).norm())
            .sum()
    }
}

/// The inequality chain for each requested `K`.
pub fn run_appendix(spec: &AppendixSpec) -> Result<ExperimentReport, Error> {
    let start = Instant::now();
    spec.validate()?;
    let mut rep = ExperimentReport::new("appendix", spec, None)?;
    let rule = UnitRule::new(ORDER);
    let norms = Norms {
        spec,
        x_nodes: rule.composite_nodes(&uniform_breaks(0.0, 1.0, spec.x_panels)),
    };

    let mut ks = spec.ks.clone();
    ks.sort_unstable();
    ks.dedup();
    let t_rule = UnitRule::new(8);
    let grids: Vec<Vec<(f64, f64)>> = ks
        .iter()
        .map(|&kk| t_rule.composite_nodes(&t_breaks(spec.k0 + kk + 2, spec.t_panels)))
        .collect();
    // The omitted strips (0, 2^{-k0-K-2}), integrated only for the full value.
    let heads: Vec<Vec<(f64, f64)>> = ks
        .iter()
        .map(|&kk| {
            t_rule.composite_nodes(&uniform_breaks(
                0.0,
                (-((spec.k0 + kk + 2) as f64)).exp2(),
                spec.t_panels,
            ))
        })
        .collect();

    // c₀ over every t where the bound is checked, plus a uniform sample.
    let mut c0 = f64::INFINITY;
    for i in 0..=spec.c0_samples {
        c0 = c0.min(norms.pt(i as f64 / spec.c0_samples as f64));
    }
    for &(t, _) in grids.iter().chain(&heads).flatten() {
        c0 = c0.min(norms.pt(t));
    }

    // φ and φ' on the truncated line.
    let x = spec.truncation;
    let line = rule.composite_nodes(&uniform_breaks(-x, x, (2.0 * x).ceil() as usize));
    let phi: Vec<Complex64> = line.iter().map(|&(y, _)| spec.profile.inverse(y)).collect();
    let dphi: Vec<f64> = line
        .iter()
        .map(|&(y, _)| spec.profile.derivative(y).norm())
        .collect();
    let c1: f64 = line.iter().zip(&dphi).map(|((_, w), d)| w * d).sum();
    let c1_half: f64 = line
        .iter()
        .zip(&dphi)
        .filter(|((y, _), _)| y.abs() < x / 2.0)
        .map(|((_, w), d)| w * d)
        .sum();
    rep.measure("c0", 0.0, c0);
    rep.measure("c1", x, c1);
    rep.measure("c1", x / 2.0, c1_half);

    let mut violations = Vec::new();
    let mut checked = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut lhs_scaled = Vec::new();
    let mut rhs_scaled = Vec::new();
    for ((&kk, grid), head) in ks.iter().zip(&grids).zip(&heads) {
        let freqs: Vec<u32> = (spec.k0 + 1..=spec.k0 + kk).collect();
        let max_norm = |t: f64| {
            freqs
                .iter()
                .map(|&k| (-2.0 * PI * t * (k as f64).exp2()).exp() * norms.dt_scaled(k, t))
                .fold(0.0, f64::max)
        };
        let mut lhs = 0.0;
        for &(t, w) in grid {
            for &k in &freqs {
                // Both sides of the bound carry the factor e^{−2πt2^k}.
                let a = norms.dt_scaled(k, t);
                let bound = 2.0 * PI * (k as f64).exp2() * c0 - c1;
                if bound > 0.0 {
                    checked += 1;
                    min_margin = min_margin.min(a / bound);
                    if a < bound {
                        violations.push(format!("K={kk} k={k} t={t:.3e}: {a:.6e} < {bound:.6e}"));
                    }
                }
            }
            lhs += w * max_norm(t);
        }
        let lhs_full = lhs + head.iter().map(|&(t, w)| w * max_norm(t)).sum::<f64>();
        let s = (kk as f64).sqrt();
        rep.measure("lhs", kk as f64, lhs);
        rep.measure("lhs_full", kk as f64, lhs_full);
        rep.measure("lhs_over_sqrt_k", kk as f64, lhs / s);
        lhs_scaled.push(lhs / s);

        // ‖(Σ_k |g_k|²)^{1/2}‖_p with each g_k evaluated separately.
        let integrand: f64 = line
            .iter()
            .zip(&phi)
            .map(|(&(y, w), &ph)| {
                let sq: f64 = freqs
                    .iter()
                    .map(|&k| {
                        let carrier = Complex64::from_polar(
                            1.0,
                            2.0 * PI * (y * (k as f64).exp2()).rem_euclid(1.0),
                        );
                        (carrier * ph).norm_sqr()
                    })
                    .sum();
                w * sq.sqrt().powf(spec.p)
            })
            .sum();
        let rhs = integrand.powf(1.0 / spec.p);
        rep.measure("rhs", kk as f64, rhs);
        rep.measure("rhs_over_sqrt_k", kk as f64, rhs / s);
        rhs_scaled.push(rhs / s);
    }

    let increasing = lhs_scaled.windows(2).all(|w| w[1] > w[0]);
    rep.verdict(
        "lhs_over_sqrt_k_increasing",
        increasing && lhs_scaled.len() >= 2,
        format!("LHS(K)/√K over K = {ks:?}: {lhs_scaled:?}"),
    );
    if let (Some(l4), Some(l8)) = (rep.value("lhs", 4.0), rep.value("lhs", 8.0)) {
        let g = l8 / l4;
        rep.verdict(
            "lhs_growth",
            g >= LHS_GROWTH_MIN,
            format!("LHS(8)/LHS(4) = {g:.6} against {LHS_GROWTH_MIN}"),
        );
    }
    rep.verdict(
        "pointwise_lower_bound",
        violations.is_empty() && checked > 0,
        if violations.is_empty() {
            format!("{checked} positive bounds respected, smallest norm/bound = {min_margin:.4}")
        } else {
            violations.join("; ")
        },
    );
    let r0 = rhs_scaled[0];
    let spread = rhs_scaled
        .iter()
        .map(|r| (r - r0).abs() / r0)
        .fold(0.0, f64::max);
    rep.verdict(
        "rhs_constant",
        spread <= RHS_TOL,
        format!("RHS(K)/√K = {r0:.15} with relative spread {spread:.2e}"),
    );
    Ok(rep.finish(start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_breaks_cover_the_octaves() {
        let b = t_breaks(3, 2);
        assert_eq!(b.first(), Some(&0.125));
        assert_eq!(b.last(), Some(&1.0));
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(b.len(), 1 + 2 * 3);
    }

    #[test]
    fn rejects_support_touching_zero() {
        let spec = AppendixSpec {
            profile: BumpProfile {
                center: 0.25,
                width: 0.5,
                amplitude: 1.0,
            },
            ..AppendixSpec::default()
        };
        assert!(run_appendix(&spec).is_err());
    }
}
