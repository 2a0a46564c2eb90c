//! Calderón–Zygmund kernels on the half-space, their causal truncations and
//! empirical checks of the kernel axioms.

mod hormander;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::Error;

pub use hormander::{hormander_constant, outer_box, HormanderValue};

/// Which half of the kernel a causal truncation keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalSign {
    /// Keeps `t > s` (upward mapping).
    Plus,
    /// Keeps `t < s` (downward mapping).
    Minus,
    /// The full kernel.
    None,
}

impl CausalSign {
    /// Whether a target at height `t` sees a source at height `s`.
    #[inline]
    pub fn keeps(self, t: f64, s: f64) -> bool {
        match self {
            CausalSign::Plus => t > s,
            CausalSign::Minus => t < s,
            CausalSign::None => true,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            CausalSign::Plus => "+",
            CausalSign::Minus => "-",
            CausalSign::None => "",
        }
    }
}

type Lipschitz = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Evaluator = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum KernelKind {
    /// `−(1/π)(w − z)^{-2}` with `z = x + it`, `w = y + is`.
    Beurling,
    /// `−(1/2π)(y + i(φ(y)+s) − x − i(φ(x)+t))^{-2}`.
    LipGraph { phi: Lipschitz, lip: f64 },
    /// `1/(π(x − y))` on the line.
    Hilbert,
    /// An arbitrary kernel on points of dimension `dim`.
    Custom { eval: Evaluator, dim: usize },
}

impl fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Beurling => write!(f, "Beurling"),
            KernelKind::LipGraph { lip, .. } => write!(f, "LipGraph(L={lip})"),
            KernelKind::Hilbert => write!(f, "Hilbert"),
            KernelKind::Custom { dim, .. } => write!(f, "Custom(dim={dim})"),
        }
    }
}

/// An evaluable CZ kernel `k(x̄, ȳ)` on points `(t, x_1, .., x_n)`.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Regularity exponent `γ ∈ (0, 1]`.
    pub gamma: f64,
    pub name: String,
    pub sign: CausalSign,
}

/// The Beurling kernel on the upper half-plane.
pub fn beurling() -> KernelSpec {
    KernelSpec {
        kind: KernelKind::Beurling,
        gamma: 1.0,
        name: "beurling".into(),
        sign: CausalSign::None,
    }
}

/// The Cauchy kernel above the graph of a Lipschitz function `φ` with
/// Lipschitz constant `lip`.
pub fn lipgraph(phi: impl Fn(f64) -> f64 + Send + Sync + 'static, lip: f64) -> KernelSpec {
    KernelSpec {
        kind: KernelKind::LipGraph {
            phi: Arc::new(phi),
            lip,
        },
        gamma: 1.0,
        name: "lipgraph".into(),
        sign: CausalSign::None,
    }
}

/// The Hilbert kernel `1/(π(x − y))`, on points of dimension one.
pub fn hilbert_boundary() -> KernelSpec {
    KernelSpec {
        kind: KernelKind::Hilbert,
        gamma: 1.0,
        name: "hilbert".into(),
        sign: CausalSign::None,
    }
}

pub fn custom(
    name: &str,
    dim: usize,
    gamma: f64,
    eval: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
) -> KernelSpec {
    KernelSpec {
        kind: KernelKind::Custom {
            eval: Arc::new(eval),
            dim,
        },
        gamma,
        name: name.into(),
        sign: CausalSign::None,
    }
}

/// Parses `beurling`, `beurling+`, `beurling-`, `hilbert`, ... as used on the
/// command line. Lipschitz-graph kernels use `φ(x) = ½ (x² + ε²)^{1/2}` with
/// `ε = 1/8`.
pub fn by_name(name: &str) -> Result<KernelSpec, Error> {
    let (base, sign) = match name.strip_suffix('+') {
        Some(b) => (b, CausalSign::Plus),
        None => match name.strip_suffix('-') {
            Some(b) => (b, CausalSign::Minus),
            None => (name, CausalSign::None),
        },
    };
    let k = match base {
        "beurling" => beurling(),
        "lipgraph" => smooth_abs_graph(0.125),
        "hilbert" => hilbert_boundary(),
        _ => return Err(Error::Precondition(format!("unknown kernel {name:?}"))),
    };
    Ok(k.with_sign(sign))
}

/// The Lipschitz graph `φ(x) = ½ (x² + ε²)^{1/2}`, a smoothing of `|x|/2`.
pub fn smooth_abs_graph(eps: f64) -> KernelSpec {
    lipgraph(move |x| 0.5 * (x * x + eps * eps).sqrt(), 0.5)
}

impl KernelSpec {
    pub fn with_sign(mut self, sign: CausalSign) -> Self {
        self.sign = sign;
        self
    }

    /// The untruncated kernel.
    pub fn full(&self) -> Self {
        self.clone().with_sign(CausalSign::None)
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.name, self.sign.suffix())
    }

    /// Point dimension `1 + n`.
    pub fn point_dim(&self) -> usize {
        match &self.kind {
            KernelKind::Beurling | KernelKind::LipGraph { .. } => 2,
            KernelKind::Hilbert => 1,
            KernelKind::Custom { dim, .. } => *dim,
        }
    }

    /// Untruncated value at distinct points; no checks.
    #[inline]
    pub fn eval_full_unchecked(&self, x: &[f64], y: &[f64]) -> Complex64 {
        match &self.kind {
            KernelKind::Beurling => {
                let d = Complex64::new(y[1] - x[1], y[0] - x[0]);
                -(d * d).inv() / PI
            }
            KernelKind::LipGraph { phi, .. } => {
                let d = Complex64::new(y[1] - x[1], phi(y[1]) + y[0] - phi(x[1]) - x[0]);
                -(d * d).inv() / (2.0 * PI)
            }
            KernelKind::Hilbert => Complex64::new(1.0 / (PI * (x[0] - y[0])), 0.0),
            KernelKind::Custom { eval, .. } => eval(x, y),
        }
    }

    /// Truncated value; zero on the discarded half and on `t = s` for causal
    /// kernels.
    #[inline]
    pub fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> Complex64 {
        if self.sign.keeps(x[0], y[0]) {
            self.eval_full_unchecked(x, y)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<Complex64, Error> {
        let d = self.point_dim();
        if x.len() != d || y.len() != d {
            return Err(Error::Precondition(format!(
                "kernel {} takes points of dimension {d}",
                self.label()
            )));
        }
        if x == y {
            return Err(Error::Singular);
        }
        Ok(self.eval_unchecked(x, y))
    }
}

/// Empirical kernel constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CzConstants {
    /// `sup |k(x̄,ȳ)| |x̄−ȳ|^{n+1}`.
    pub bound_const: f64,
    /// `sup |Δk| |x̄−ȳ|^{n+1+γ} / |t̄|^γ` over both variables.
    pub reg_const: f64,
}

/// A sample `(x̄, ȳ, t̄)` with `|t̄| ≤ |x̄ − ȳ| / 2`.
pub type CzSample = (Vec<f64>, Vec<f64>, Vec<f64>);

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sampled sup of the kernel bound and regularity ratios of the untruncated
/// kernel.
pub fn cz_constants(k: &KernelSpec, samples: &[CzSample]) -> Result<CzConstants, Error> {
    let full = k.full();
    let d = k.point_dim() as i32;
    let mut out = CzConstants {
        bound_const: 0.0,
        reg_const: 0.0,
    };
    for (x, y, t) in samples {
        let r = dist(x, y);
        let tn = norm(t);
        if r == 0.0 || tn > r / 2.0 * (1.0 + 1e-12) {
            return Err(Error::Precondition(
                "sample violates |t̄| ≤ |x̄ − ȳ|/2".into(),
            ));
        }
        let kxy = full.eval(x, y)?;
        out.bound_const = out.bound_const.max(kxy.norm() * r.powi(d));
        if tn > 0.0 {
            let ys: Vec<f64> = y.iter().zip(t).map(|(a, b)| a + b).collect();
            let xs: Vec<f64> = x.iter().zip(t).map(|(a, b)| a + b).collect();
            let dy = (full.eval(x, &ys)? - kxy).norm();
            let dx = (full.eval(&xs, y)? - kxy).norm();
            let ratio = dy.max(dx) * r.powf(d as f64 + k.gamma) / tn.powf(k.gamma);
            out.reg_const = out.reg_const.max(ratio);
        }
    }
    Ok(out)
}

/// Random samples in `(0, 2) × (−1, 1)^n` with `|t̄| = u |x̄ − ȳ|/2`.
pub fn random_cz_samples(dim: usize, count: usize, rng: &mut impl Rng) -> Vec<CzSample> {
    let point = |rng: &mut dyn rand::RngCore| -> Vec<f64> {
        (0..dim)
            .map(|i| {
                if i == 0 {
                    rng.gen_range(0.01..2.0)
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            })
            .collect()
    };
    (0..count)
        .map(|_| {
            let x = point(rng);
            let y = point(rng);
            let r = dist(&x, &y);
            let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dn = norm(&dir).max(1e-300);
            let s = rng.gen_range(0.0..1.0) * r / 2.0 / dn;
            let t = dir.iter().map(|v| v * s).collect();
            (x, y, t)
        })
        .collect()
}

/// `1/(2π m(L))` with `m(L)` the smallest eigenvalue of the quadratic form
/// bounding `|Δ|²/|x̄ − ȳ|²` from below for graphs of Lipschitz constant `L`.
pub fn lipgraph_bound(lip: f64) -> f64 {
    let l2 = lip * lip;
    let m = 1.0 + l2 / 2.0 - (l2 * l2 / 4.0 + l2).sqrt();
    1.0 / (2.0 * PI * m)
}
