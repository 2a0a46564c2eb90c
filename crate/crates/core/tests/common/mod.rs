//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// An axis-aligned rectangle `(s0, s1) × (x0, x1)` in `(t, x)` coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Rect {
    pub s0: f64,
    pub s1: f64,
    pub x0: f64,
    pub x1: f64,
}

impl Rect {
    /// Chebyshev distance from `(t, x)` to the boundary of the rectangle.
    pub fn boundary_distance(&self, t: f64, x: f64) -> f64 {
        let dt = if t < self.s0 {
            self.s0 - t
        } else if t > self.s1 {
            t - self.s1
        } else {
            (t - self.s0).min(self.s1 - t)
        };
        let dx = if x < self.x0 {
            self.x0 - x
        } else if x > self.x1 {
            x - self.x1
        } else {
            (x - self.x0).min(self.x1 - x)
        };
        let inside_t = t > self.s0 && t < self.s1;
        let inside_x = x > self.x0 && x < self.x1;
        match (inside_t, inside_x) {
            (true, true) => dt.min(dx),
            (true, false) => dx,
            (false, true) => dt,
            (false, false) => dt.max(dx),
        }
    }
}

/// `∫_a^b dw/(w − z)` along the segment from `a` to `b`: the principal
/// logarithm of the ratio, or its principal value when `z` lies on the
/// segment.
fn segment_log(a: Complex64, b: Complex64, z: Complex64) -> Complex64 {
    let r = (b - z) / (a - z);
    if r.im == 0.0 && r.re < 0.0 {
        Complex64::new(r.re.abs().ln(), 0.0)
    } else {
        r.ln()
    }
}

/// `S^− 1_R (z)` for the causal Beurling kernel `−(1/π)(w − z)^{-2} 1_{s>t}`
/// by Green's theorem on `R ∩ {s > t}`:
/// `∫∫ (w − z)^{-2} dA = (1/2i) ∮ dw̄/(w − z)`.
pub fn causal_beurling_rect(r: &Rect, t: f64, x: f64) -> Complex64 {
    let bottom = r.s0.max(t);
    if bottom >= r.s1 {
        return Complex64::new(0.0, 0.0);
    }
    let z = Complex64::new(x, t);
    let c = |xx: f64, ss: f64| Complex64::new(xx, ss);
    let (p0, p1, p2, p3) = (
        c(r.x0, bottom),
        c(r.x1, bottom),
        c(r.x1, r.s1),
        c(r.x0, r.s1),
    );
    // Horizontal edges have dw̄ = dw and vertical ones dw̄ = −dw.
    let contour = segment_log(p0, p1, z) - segment_log(p1, p2, z) + segment_log(p2, p3, z)
        - segment_log(p3, p0, z);
    -contour / (2.0 * PI * Complex64::new(0.0, 1.0))
}

/// Tensor Gauss–Legendre with `panels²` panels of order 10 of the
/// untruncated Beurling kernel over a rectangle away from `z`.
pub fn beurling_rect_direct(r: &Rect, t: f64, x: f64, panels: usize) -> Complex64 {
    let (nodes, weights) = gl10();
    let z = Complex64::new(x, t);
    let mut acc = Complex64::new(0.0, 0.0);
    let hs = (r.s1 - r.s0) / panels as f64;
    let hx = (r.x1 - r.x0) / panels as f64;
    for ps in 0..panels {
        for px in 0..panels {
            for (us, ws) in nodes.iter().zip(&weights) {
                for (ux, wx) in nodes.iter().zip(&weights) {
                    let s = r.s0 + (ps as f64 + us) * hs;
                    let y = r.x0 + (px as f64 + ux) * hx;
                    let d = Complex64::new(y, s) - z;
                    acc += -(d * d).inv() / PI * (ws * wx * hs * hx);
                }
            }
        }
    }
    acc
}

/// `∫ g` over `[a, b]` by `panels` panels of tabulated Gauss–Legendre.
pub fn gauss(a: f64, b: f64, panels: usize, g: impl Fn(f64) -> f64) -> f64 {
    let (nodes, weights) = gl10();
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        for (u, w) in nodes.iter().zip(&weights) {
            acc += w * h * g(a + (p as f64 + u) * h);
        }
    }
    acc
}

/// Tabulated 10-point Gauss–Legendre on `[0, 1]`.
fn gl10() -> (Vec<f64>, Vec<f64>) {
    let x = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    let w = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982_0,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for i in 0..5 {
        nodes.push(0.5 * (1.0 - x[i]));
        weights.push(0.5 * w[i]);
        nodes.push(0.5 * (1.0 + x[i]));
        weights.push(0.5 * w[i]);
    }
    (nodes, weights)
}

/// The five rectangles of the p.v. comparison, aligned to level 3 so that a
/// grid of depth at least 3 resolves them exactly.
pub fn pv_rectangles() -> Vec<Rect> {
    let r = |s0: f64, s1: f64, x0: f64, x1: f64| Rect {
        s0: s0 / 8.0,
        s1: s1 / 8.0,
        x0: x0 / 8.0,
        x1: x1 / 8.0,
    };
    vec![
        r(2.0, 4.0, 2.0, 5.0),
        r(4.0, 7.0, 1.0, 3.0),
        r(1.0, 6.0, 3.0, 6.0),
        r(3.0, 5.0, 0.0, 8.0),
        r(5.0, 8.0, 4.0, 7.0),
    ]
}

/// Comparison of the discrete causal Beurling transform of each rectangle
/// indicator with the contour oracle.
pub struct PvComparison {
    pub points: usize,
    /// Largest `|S f − oracle| / |oracle|` over points where the oracle is
    /// above `floor` in modulus.
    pub max_rel: f64,
    /// Largest `|S f − oracle|` relative to the largest oracle value.
    pub max_abs: f64,
}

/// Evaluates at every `stride`-th cell in each axis whose center is at least
/// `margin` cells from every rectangle edge.
pub fn pv_compare(depth: u32, stride: usize, margin: f64, floor: f64) -> PvComparison {
    use czlab::grid::{GridFunction, Window};
    use czlab::kernels::beurling;
    use czlab::operators::{apply_causal_cells, Sources};
    use czlab::{CausalSign, PvParams};

    let w = Window::unit(1, depth);
    let h = w.h();
    let k = beurling().with_sign(CausalSign::Minus);
    let mut out = PvComparison {
        points: 0,
        max_rel: 0.0,
        max_abs: 0.0,
    };
    for r in pv_rectangles() {
        let f = GridFunction::from_callable(w.clone(), 1, |p| {
            let inside = p[0] > r.s0 && p[0] < r.s1 && p[1] > r.x0 && p[1] < r.x1;
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let targets: Vec<usize> = (0..w.num_cells())
            .filter(|&c| {
                let m = w.multi(c);
                let p = w.cell_center(c);
                m.iter().all(|i| i % stride == 0) && r.boundary_distance(p[0], p[1]) >= margin * h
            })
            .collect();
        let got = apply_causal_cells(
            &k,
            &Sources::from_grid(&f),
            &w,
            &targets,
            &PvParams::default(),
        )
        .unwrap();
        let want: Vec<Complex64> = targets
            .iter()
            .map(|&c| {
                let p = w.cell_center(c);
                causal_beurling_rect(&r, p[0], p[1])
            })
            .collect();
        let scale = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (g, o) in got.iter().zip(&want) {
            let e = (g - o).norm();
            out.max_abs = out.max_abs.max(e / scale);
            if o.norm() > floor {
                out.max_rel = out.max_rel.max(e / o.norm());
            }
        }
        out.points += targets.len();
    }
    out
}
