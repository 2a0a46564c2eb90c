use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CausalSign, CzConstants, KernelSpec};
use crate::dyadic::HalfCube;
use crate::quad::{sorted_breaks, UnitRule};
use crate::Error;

const ORDER: usize = 8;
const PANELS_3Q: usize = 6;

/// Axis-aligned box `lo < x̄ < hi` in `(t, x)` coordinates, `lo[0] ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// The box of half-width `factor·ℓ(Q)` around the center of `Q`, cut at `t = 0`.
pub fn outer_box(q: &HalfCube, factor: f64) -> OuterBox {
    let c = q.center().to_f64();
    let r = factor * q.side().to_f64();
    OuterBox {
        lo: c
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 { (v - r).max(0.0) } else { v - r })
            .collect(),
        hi: c.iter().map(|v| v + r).collect(),
    }
}

/// Quadrature over the outer box minus `3Q`, plus a bound for what lies beyond.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HormanderValue {
    pub quadrature: f64,
    pub tail: f64,
}

impl HormanderValue {
    pub fn total(&self) -> f64 {
        self.quadrature + self.tail
    }
}

/// Surface measure of the unit sphere in `R^d`, `d ≤ 3`.
fn sphere(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            // 2 π^{d/2} / Γ(d/2), via the recursion σ_{d+2} = 2π σ_d / d.
            let mut s = if d % 2 == 0 { 2.0 * PI } else { 4.0 * PI };
            let mut k = if d % 2 == 0 { 2 } else { 3 };
            while k < d {
                s *= 2.0 * PI / k as f64;
                k += 2;
            }
            s
        }
    }
}

fn axis_breaks(lo3: f64, hi3: f64, lo: f64, hi: f64, side: f64, extra: &[f64]) -> Vec<f64> {
    let mut v = vec![lo, hi];
    for i in 0..=PANELS_3Q {
        let p = lo3 + (hi3 - lo3) * i as f64 / PANELS_3Q as f64;
        if p > lo && p < hi {
            v.push(p);
        }
    }
    let mut step = side;
    while lo3 - step > lo || hi3 + step < hi {
        for p in [lo3 - step, hi3 + step] {
            if p > lo && p < hi {
                v.push(p);
            }
        }
        step *= 2.0;
    }
    v.extend(extra.iter().copied().filter(|&p| p > lo && p < hi));
    sorted_breaks(v)
}

/// `∫_{B \ 3Q} |k(x̄,y₁) − k(x̄,y₂)| + |k(y₁,x̄) − k(y₂,x̄)| dx̄` over the outer
/// box `B` by tensor Gauss–Legendre on graded panels, and the analytic tail
/// beyond `B` from the kernel constants.
///
/// `3Q` keeps its full spatial extent and is cut only at `t = 0`.
pub fn hormander_constant(
    k: &KernelSpec,
    q: &HalfCube,
    y1: &[f64],
    y2: &[f64],
    outer: &OuterBox,
    consts: &CzConstants,
) -> Result<HormanderValue, Error> {
    let d = k.point_dim();
    if q.dim() + 1 != d || y1.len() != d || y2.len() != d || outer.lo.len() != d {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    let side = q.side().to_f64();
    let lo3: Vec<f64> = (0..d)
        .map(|i| {
            let v = q.lo(i).to_f64() - side;
            if i == 0 {
                v.max(0.0)
            } else {
                v
            }
        })
        .collect();
    let hi3: Vec<f64> = (0..d).map(|i| q.hi(i).to_f64() + side).collect();
    for i in 0..d {
        let inside = |p: &[f64]| p[i] >= q.lo(i).to_f64() && p[i] <= q.hi(i).to_f64();
        if !inside(y1) || !inside(y2) {
            return Err(Error::Precondition("y1, y2 must lie in Q".into()));
        }
        if outer.lo[i] > lo3[i] || outer.hi[i] < hi3[i] {
            return Err(Error::Precondition("outer box must contain 3Q".into()));
        }
    }
    if y1 == y2 {
        return Ok(HormanderValue {
            quadrature: 0.0,
            tail: 0.0,
        });
    }

    let jumps: Vec<f64> = if k.sign == CausalSign::None {
        vec![]
    } else {
        vec![y1[0], y2[0]]
    };
    let breaks: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let extra: &[f64] = if i == 0 { &jumps } else { &[] };
            axis_breaks(lo3[i], hi3[i], outer.lo[i], outer.hi[i], side, extra)
        })
        .collect();

    let rule = UnitRule::new(ORDER);
    let integrand = |x: &[f64]| {
        (k.eval_unchecked(x, y1) - k.eval_unchecked(x, y2)).norm()
            + (k.eval_unchecked(y1, x) - k.eval_unchecked(y2, x)).norm()
    };

    let mut quadrature = 0.0;
    let mut cell = vec![0usize; d];
    let counts: Vec<usize> = breaks.iter().map(|b| b.len() - 1).collect();
    let mut x = vec![0.0; d];
    'cells: loop {
        let in3q = (0..d).all(|i| breaks[i][cell[i]] >= lo3[i] && breaks[i][cell[i] + 1] <= hi3[i]);
        if !in3q {
            let a: Vec<f64> = (0..d).map(|i| breaks[i][cell[i]]).collect();
            let h: Vec<f64> = (0..d).map(|i| breaks[i][cell[i] + 1] - a[i]).collect();
            let mut node = vec![0usize; d];
            let mut acc = 0.0;
            'nodes: loop {
                let mut w = 1.0;
                for i in 0..d {
                    x[i] = a[i] + h[i] * rule.nodes[node[i]];
                    w *= rule.weights[node[i]];
                }
                acc += w * integrand(&x);
                for i in (0..d).rev() {
                    node[i] += 1;
                    if node[i] < ORDER {
                        continue 'nodes;
                    }
                    node[i] = 0;
                }
                break;
            }
            quadrature += acc * h.iter().product::<f64>();
        }
        for i in (0..d).rev() {
            cell[i] += 1;
            if cell[i] < counts[i] {
                continue 'cells;
            }
            cell[i] = 0;
        }
        break;
    }

    let reach = (0..d)
        .flat_map(|i| {
            let lower = if i == 0 {
                f64::INFINITY
            } else {
                y1[i].min(y2[i]) - outer.lo[i]
            };
            [lower, outer.hi[i] - y1[i].max(y2[i])]
        })
        .fold(f64::INFINITY, f64::min);
    let delta = y1
        .iter()
        .zip(y2)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let g = k.gamma;
    let mut tail = 2.0 * consts.reg_const * sphere(d) / g * (delta / reach).powf(g);
    if !jumps.is_empty() && d >= 2 {
        tail += 2.0 * consts.bound_const * (y1[0] - y2[0]).abs() * sphere(d - 1) / reach;
    }
    Ok(HormanderValue { quadrature, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::BoundaryCube;
    use crate::kernels::beurling;

    fn unit() -> HalfCube {
        HalfCube::new(BoundaryCube::new(0, vec![0]).unwrap(), 1).unwrap()
    }

    fn consts() -> CzConstants {
        CzConstants {
            bound_const: 1.0 / PI,
            reg_const: 1.0,
        }
    }

    #[test]
    fn equal_points_give_zero() {
        let q = unit();
        let k = beurling().with_sign(CausalSign::Minus);
        let v = hormander_constant(
            &k,
            &q,
            &[1.5, 0.5],
            &[1.5, 0.5],
            &outer_box(&q, 32.0),
            &consts(),
        )
        .unwrap();
        assert_eq!(v.total(), 0.0);
    }

    #[test]
    fn rejects_points_outside_q() {
        let q = unit();
        let k = beurling();
        assert!(hormander_constant(
            &k,
            &q,
            &[0.5, 0.5],
            &[1.5, 0.5],
            &outer_box(&q, 32.0),
            &consts()
        )
        .is_err());
    }

    #[test]
    fn dilation_is_exact() {
        let q = unit();
        let q2 = HalfCube::new(BoundaryCube::new(-1, vec![0]).unwrap(), 1).unwrap();
        let k = beurling().with_sign(CausalSign::Minus);
        let a = hormander_constant(
            &k,
            &q,
            &[1.0, 0.0],
            &[2.0, 1.0],
            &outer_box(&q, 32.0),
            &consts(),
        )
        .unwrap();
        let b = hormander_constant(
            &k,
            &q2,
            &[2.0, 0.0],
            &[4.0, 2.0],
            &outer_box(&q2, 32.0),
            &consts(),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }
}
