use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::functionals::BoundaryGridFunction;
use crate::quad::UnitRule;
use crate::Error;

const ORDER: usize = 12;

/// A smooth bump `φ̂(ξ) = A exp(−1/(1 − u²))`, `u = 2(ξ − center)/width`,
/// supported in `[center − width/2, center + width/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpProfile {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile {
            center: 0.75,
            width: 0.5,
            amplitude: 1.0,
        }
    }
}

impl BumpProfile {
    pub fn support(&self) -> (f64, f64) {
        (
            self.center - self.width / 2.0,
            self.center + self.width / 2.0,
        )
    }

    /// The support must be a compact subset of `(0, ∞)`.
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.width > 0.0) || !(self.support().0 > 0.0) || self.amplitude == 0.0 {
            return Err(Error::Precondition(format!(
                "frequency profile support {:?} must be a nonempty compact subset of (0, ∞)",
                self.support()
            )));
        }
        Ok(())
    }

    pub fn value(&self, xi: f64) -> f64 {
        let u = 2.0 * (xi - self.center) / self.width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude * (-1.0 / (1.0 - u * u)).exp()
        }
    }

    /// `∫ m(η) φ̂(η) e^{2πixη} dη`; 16 panels resolve the bump to about 1e-11
    /// and one more per unit of phase keeps that accuracy in `x`.
    pub fn transform(&self, x: f64, m: impl Fn(f64) -> Complex64) -> Complex64 {
        let (lo, hi) = self.support();
        let panels = 16 + (2.0 * x.abs() * self.width).ceil() as usize;
        let rule = UnitRule::new(ORDER);
        let step = (hi - lo) / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let a = lo + p as f64 * step;
            for (u, w) in rule.nodes.iter().zip(&rule.weights) {
                let eta = a + u * step;
                let phase = Complex64::from_polar(1.0, 2.0 * PI * (x * eta).rem_euclid(1.0));
                acc += m(eta) * phase * (w * step * self.value(eta));
            }
        }
        acc
    }

    /// `φ(x)`.
    pub fn inverse(&self, x: f64) -> Complex64 {
        self.transform(x, |_| Complex64::new(1.0, 0.0))
    }

    /// `P_t φ(x)`.
    pub fn poisson(&self, t: f64, x: f64) -> Complex64 {
        self.transform(x, |eta| Complex64::new((-2.0 * PI * t * eta).exp(), 0.0))
    }

    /// `φ'(x)`.
    pub fn derivative(&self, x: f64) -> Complex64 {
        self.transform(x, |eta| Complex64::new(0.0, 2.0 * PI * eta))
    }
}

/// `∂_t P_t g(x)` for `ĝ(ξ) = φ̂(ξ − shift)`, `shift ≥ 0`:
/// `∫ −2π ξ e^{−2πtξ} φ̂(ξ − shift) e^{2πixξ} dξ`.
pub fn poisson_dt(profile: &BumpProfile, shift: f64, t: f64, x: f64) -> Result<Complex64, Error> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("t = {t} must be positive")));
    }
    profile.validate()?;
    let carrier = Complex64::from_polar(1.0, 2.0 * PI * (x * shift).rem_euclid(1.0));
    let v = profile.transform(x, |eta| {
        let xi = eta + shift;
        Complex64::new(-2.0 * PI * xi * (-2.0 * PI * t * xi).exp(), 0.0)
    });
    Ok(carrier * v)
}

/// `v(z) = −(1/π) ∫ g(s) (s − z)^{-2} ds` for piecewise constant `g` on the
/// line, by the exact antiderivative on each cell.
pub fn boundary_v(g: &BoundaryGridFunction, z: Complex64) -> Result<Complex64, Error> {
    let w = g.window();
    if w.dim() != 1 {
        return Err(Error::Precondition(
            "boundary_v needs a one-dimensional boundary".into(),
        ));
    }
    if !(z.im > 0.0) {
        return Err(Error::Precondition(
            "z must lie in the upper half-plane".into(),
        ));
    }
    let h = w.h();
    let o = w.root.lo(0).to_f64();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in g.values().iter().enumerate() {
        if v != 0.0 {
            let a = o + i as f64 * h;
            let b = a + h;
            acc += ((a - z).inv() - (b - z).inv()) * v;
        }
    }
    Ok(-acc / PI)
}
