use super::Window;
use crate::dyadic::DyadicBox;

/// Summed-volume table of a non-negative cell function.
///
/// `table[m] = Σ_{cells c < m componentwise} value(c)` on the `(N+1)^{1+n}`
/// lattice of cell corners. The primitive is multilinear inside each cell,
/// so box integrals with arbitrary corners are exact up to rounding.
#[derive(Clone, Debug)]
pub struct SummedVolume {
    window: Window,
    stride: Vec<usize>,
    table: Vec<f64>,
}

impl SummedVolume {
    pub fn new(window: &Window, values: &[f64]) -> Self {
        let axes = window.axes();
        let n1 = window.per_axis() + 1;
        let mut stride = vec![1usize; axes];
        for i in (0..axes - 1).rev() {
            stride[i] = stride[i + 1] * n1;
        }
        let mut table = vec![0.0; n1.pow(axes as u32)];
        for (flat, &v) in values.iter().enumerate() {
            if v != 0.0 {
                let m = window.multi(flat);
                let idx: usize = m.iter().zip(&stride).map(|(a, s)| (a + 1) * s).sum();
                table[idx] = v;
            }
        }
        for &s in &stride {
            for idx in 0..table.len() {
                if (idx / s) % n1 != 0 {
                    table[idx] += table[idx - s];
                }
            }
        }
        SummedVolume {
            window: window.clone(),
            stride,
            table,
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Primitive at a point given in cell units, clamped to the window.
    fn primitive(&self, u: &[f64]) -> f64 {
        let n = self.window.per_axis();
        let axes = u.len();
        let mut base = 0usize;
        let mut frac = [0.0f64; 8];
        for i in 0..axes {
            let x = u[i].clamp(0.0, n as f64);
            let c = (x.floor() as usize).min(n - 1);
            frac[i] = x - c as f64;
            base += c * self.stride[i];
        }
        let mut acc = 0.0;
        for bits in 0..1usize << axes {
            let mut w = 1.0;
            let mut idx = base;
            for i in 0..axes {
                if bits >> i & 1 == 1 {
                    w *= frac[i];
                    idx += self.stride[i];
                } else {
                    w *= 1.0 - frac[i];
                }
            }
            if w != 0.0 {
                acc += w * self.table[idx];
            }
        }
        acc
    }

    /// `∫_B value` over a box given by float corners.
    pub fn integrate_f64(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let axes = self.window.axes();
        assert!(axes <= 8, "summed tables support at most 8 axes");
        let h = self.window.h();
        let o = self.window.origin();
        let mut ul = [0.0f64; 8];
        let mut uh = [0.0f64; 8];
        for i in 0..axes {
            let oi = o[i].to_f64();
            ul[i] = (lo[i] - oi) / h;
            uh[i] = (hi[i] - oi) / h;
            if uh[i] <= ul[i] {
                return 0.0;
            }
        }
        let mut acc = 0.0;
        let mut p = [0.0f64; 8];
        for bits in 0..1usize << axes {
            let mut sign = 1.0;
            for i in 0..axes {
                if bits >> i & 1 == 1 {
                    p[i] = uh[i];
                } else {
                    p[i] = ul[i];
                    sign = -sign;
                }
            }
            acc += sign * self.primitive(&p[..axes]);
        }
        acc.max(0.0) * self.window.cell_volume()
    }

    pub fn integrate_box(&self, b: &DyadicBox) -> f64 {
        let (lo, hi) = b.to_f64();
        self.integrate_f64(&lo, &hi)
    }
}
