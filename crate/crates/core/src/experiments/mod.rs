//! Scripted experiments behind every quantitative claim, each producing an
//! [`ExperimentReport`] whose verdicts are computed from its measurements.

mod appendix;
mod empirical;
mod exact;

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{BoundaryCube, HalfCube};
use crate::grid::{GridFunction, Window};
use crate::kernels::{beurling, hilbert_boundary, CausalSign, KernelSpec};
use crate::Error;

pub use appendix::{run_appendix, AppendixSpec};
pub use empirical::{
    run_carleson_bound, run_domination, run_hormander, run_weak_l1, smooth_inputs, CarlesonConfig,
    DominationConfig, HormanderConfig, WeakL1Config,
};
pub use exact::{
    ex23_interval_integral, ex23_rectangles, ex23_slab_value, run_example_2_1, run_example_2_3,
    sparse_value_2_1,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub series: String,
    pub scale: f64,
    pub value: f64,
}

/// Least-squares line through one series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub series: String,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: serde_json::Value,
    pub measurements: Vec<Measurement>,
    #[serde(default)]
    pub fits: Vec<Fit>,
    pub verdicts: Vec<Verdict>,
    pub seed: Option<u64>,
    pub runtime_ms: u64,
}

impl ExperimentReport {
    pub fn new(name: &str, params: impl Serialize, seed: Option<u64>) -> Result<Self, Error> {
        Ok(ExperimentReport {
            name: name.to_string(),
            params: serde_json::to_value(params)?,
            measurements: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
            seed,
            runtime_ms: 0,
        })
    }

    pub fn measure(&mut self, series: &str, scale: f64, value: f64) {
        self.measurements.push(Measurement {
            series: series.to_string(),
            scale,
            value,
        });
    }

    pub fn verdict(&mut self, id: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            id: id.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    /// `(scale, value)` pairs of one series in recording order.
    pub fn series(&self, name: &str) -> Vec<(f64, f64)> {
        self.measurements
            .iter()
            .filter(|m| m.series == name)
            .map(|m| (m.scale, m.value))
            .collect()
    }

    /// The value recorded at `scale` in `series`.
    pub fn value(&self, series: &str, scale: f64) -> Option<f64> {
        self.measurements
            .iter()
            .find(|m| m.series == series && m.scale == scale)
            .map(|m| m.value)
    }

    /// Fits and records a line through `series`.
    pub fn fit(&mut self, series: &str) -> Option<Fit> {
        let (slope, intercept) = least_squares(&self.series(series))?;
        let fit = Fit {
            series: series.to_string(),
            slope,
            intercept,
        };
        self.fits.push(fit.clone());
        Some(fit)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict_by_id(&self, id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.id == id)
    }

    pub fn finish(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(s)?)
    }

    /// Measurements as `series,scale,value` rows under a header.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["series", "scale", "value"])?;
        for m in &self.measurements {
            w.write_record([m.series.clone(), m.scale.to_string(), m.value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One line: name, verdict count and the failing ids.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self
            .verdicts
            .iter()
            .filter(|v| !v.pass)
            .map(|v| v.id.as_str())
            .collect();
        if failed.is_empty() {
            format!("{}: PASS ({} verdicts)", self.name, self.verdicts.len())
        } else {
            format!("{}: FAIL ({})", self.name, failed.join(", "))
        }
    }
}

/// `(slope, intercept)` of the least-squares line, `None` below two points.
pub fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Nearest `f64` to an exact rational.
pub fn rat_f64(r: &num_rational::BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// `|b − a| / |a|`, with `0` for two zeros and `∞` when only `a` vanishes.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if a == 0.0 {
        f64::INFINITY
    } else {
        (b - a).abs() / a.abs()
    }
}

/// A sum of indicators of random dyadic cubes inside the unit root with
/// complex amplitudes, independent of the grid resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomInput {
    pub pieces: Vec<(HalfCube, Complex64)>,
}

/// Coarsest and finest level of the random pieces.
const PIECE_LEVELS: (i32, i32) = (1, 3);
const MAX_PIECES: usize = 4;

impl RandomInput {
    pub fn generate(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.gen_range(1..=MAX_PIECES);
        let pieces = (0..count)
            .map(|_| {
                let level = rng.gen_range(PIECE_LEVELS.0..=PIECE_LEVELS.1);
                let side = 1i64 << level;
                let offsets = (0..n).map(|_| rng.gen_range(0..side)).collect();
                let base = BoundaryCube::new(level, offsets).expect("non-negative offsets");
                let cube =
                    HalfCube::new(base, rng.gen_range(0..side)).expect("non-negative time index");
                let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (cube, a)
            })
            .collect();
        RandomInput { pieces }
    }

    /// Needs `J` above the finest piece level.
    pub fn sample(&self, window: &Window) -> Result<GridFunction, Error> {
        GridFunction::from_cubes(window.clone(), &self.pieces)
    }
}

/// The causal downward kernel used for `R^{1+n}_+`: Beurling for `n = 1`, the
/// Hilbert kernel on the half-line for `n = 0`.
pub fn causal_kernel(n: usize) -> Result<KernelSpec, Error> {
    match n {
        0 => Ok(hilbert_boundary().with_sign(CausalSign::Minus)),
        1 => Ok(beurling().with_sign(CausalSign::Minus)),
        _ => Err(Error::Precondition(format!(
            "no built-in kernel for n = {n}"
        ))),
    }
}

/// Smallest level strictly finer than every random piece.
pub fn min_resolution() -> u32 {
    PIECE_LEVELS.1 as u32 + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 2.0)).collect();
        let (s, b) = least_squares(&pts).unwrap();
        assert!((s - 3.0).abs() < 1e-12 && (b + 2.0).abs() < 1e-12);
        assert!(least_squares(&pts[..1]).is_none());
    }

    #[test]
    fn random_input_is_seeded_and_resolution_free() {
        let a = RandomInput::generate(1, 7);
        assert_eq!(a, RandomInput::generate(1, 7));
        let f6 = a.sample(&Window::unit(1, 6)).unwrap();
        let f7 = a.sample(&Window::unit(1, 7)).unwrap();
        assert!((f6.l1_norm() - f7.l1_norm()).abs() < 1e-12);
    }

    #[test]
    fn report_round_trips_and_summarizes() {
        let mut r = ExperimentReport::new("demo", serde_json::json!({"a": 1}), Some(3)).unwrap();
        r.measure("s", 1.0, 2.0);
        r.verdict("ok", true, "fine");
        r.verdict("bad", false, "not fine");
        let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.summary(), "demo: FAIL (bad)");
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "series,scale,value\ns,1,2\n"
        );
    }
}
