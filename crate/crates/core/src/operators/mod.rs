//! Singular operators on grid functions.
//!
//! Causal operators are discretized by the cell-midpoint rule with a
//! symmetric Chebyshev-ball exclusion around the target cell. A source cell
//! on the target's time level contributes a Gauss rule on its kept half, so
//! the `+` and `−` parts add up to the untruncated operator.

mod hilbert;
mod poisson;
mod sparse_op;

use std::ops::{Range, RangeInclusive};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::HalfCube;
use crate::grid::{GridFunction, Window};
use crate::kernels::{CausalSign, KernelSpec};
use crate::Error;

pub use hilbert::{hilbert_interval, hilbert_piecewise, Slab};
pub use poisson::{boundary_v, poisson_dt, BumpProfile};
pub use sparse_op::{sparse_apply, SparseKind, SparseOperator};

/// Cells at Chebyshev distance `r < d ≤ r + NEAR_BAND` are refined.
const NEAR_BAND: i64 = 2;

/// Principal-value discretization parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvParams {
    /// Source cells within this Chebyshev distance (in cells) are skipped.
    pub exclusion_radius: usize,
    /// Odd number of midpoint subdivisions per axis for near cells.
    pub refinement: usize,
}

impl Default for PvParams {
    fn default() -> Self {
        PvParams {
            exclusion_radius: 1,
            refinement: 3,
        }
    }
}

impl PvParams {
    pub fn validate(&self, w: &Window) -> Result<(), Error> {
        if self.exclusion_radius == 0 {
            return Err(Error::Precondition(
                "exclusion radius must be at least 1".into(),
            ));
        }
        if self.exclusion_radius >= w.per_axis() {
            return Err(Error::Precondition(format!(
                "exclusion radius {} does not fit a window of {} cells per axis",
                self.exclusion_radius,
                w.per_axis()
            )));
        }
        if self.refinement == 0 || self.refinement % 2 == 0 {
            return Err(Error::Precondition("refinement must be odd".into()));
        }
        Ok(())
    }
}

/// Source cells in struct-of-arrays form: multi-indices, centers and
/// `value · cell volume`.
#[derive(Clone, Debug)]
pub struct Sources {
    axes: usize,
    h: f64,
    multi: Vec<i64>,
    centers: Vec<f64>,
    mass: Vec<Complex64>,
}

impl Sources {
    /// The nonzero cells of `f`.
    pub fn from_grid(f: &GridFunction) -> Self {
        Self::from_cells(f, f.support())
    }

    /// The nonzero cells of `f` among `cells`.
    pub fn from_cells(f: &GridFunction, cells: impl IntoIterator<Item = usize>) -> Self {
        let w = f.window();
        let axes = w.axes();
        let cv = w.cell_volume();
        let mut s = Sources {
            axes,
            h: w.h(),
            multi: Vec::new(),
            centers: Vec::new(),
            mass: Vec::new(),
        };
        for c in cells {
            let v = f.get(c);
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            s.multi.extend(w.multi(c).into_iter().map(|m| m as i64));
            s.centers.extend(w.cell_center(c));
            s.mass.push(v * cv);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Sources whose multi-index lies inside (`keep_inside`) or outside the
    /// per-axis half-open ranges.
    pub fn filter_ranges(&self, lo: &[i64], hi: &[i64], keep_inside: bool) -> Sources {
        let d = self.axes;
        let mut out = Sources {
            axes: d,
            h: self.h,
            multi: Vec::new(),
            centers: Vec::new(),
            mass: Vec::new(),
        };
        for j in 0..self.len() {
            let m = &self.multi[j * d..(j + 1) * d];
            let inside = (0..d).all(|i| m[i] >= lo[i] && m[i] < hi[i]);
            if inside == keep_inside {
                out.multi.extend_from_slice(m);
                out.centers
                    .extend_from_slice(&self.centers[j * d..(j + 1) * d]);
                out.mass.push(self.mass[j]);
            }
        }
        out
    }
}

/// Gauss–Legendre offsets `±1/(2√3)` of the two-point rule on `[−½, ½]`.
const GL2: f64 = 0.288_675_134_594_812_9;

/// Average of `k(x̄, ·)` over the kept part of the cell of side `width` and
/// height `height` centered at `y`: the midpoint value off the target's level,
/// and the 2×2 Gauss rule on each kept half on it.
#[inline]
fn causal_term(k: &KernelSpec, x: &[f64], y: &mut [f64], width: f64, height: f64) -> Complex64 {
    if x[0] != y[0] {
        return k.eval_unchecked(x, y);
    }
    match k.sign {
        CausalSign::Plus => half_cell(k, x, y, width, height, -1.0),
        CausalSign::Minus => half_cell(k, x, y, width, height, 1.0),
        CausalSign::None => {
            half_cell(k, x, y, width, height, -1.0) + half_cell(k, x, y, width, height, 1.0)
        }
    }
}

/// Half the 2×2 Gauss average of the untruncated kernel over the upper
/// (`up = 1`) or lower (`up = −1`) half of a cell.
fn half_cell(
    k: &KernelSpec,
    x: &[f64],
    y: &mut [f64],
    width: f64,
    height: f64,
    up: f64,
) -> Complex64 {
    let d = y.len();
    let c = y.to_vec();
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..1usize << d {
        for i in 0..d {
            let sgn = if corner >> i & 1 == 1 { 1.0 } else { -1.0 };
            y[i] = if i == 0 {
                c[0] + up * (0.25 + sgn * GL2 * 0.5) * height
            } else {
                c[i] + sgn * GL2 * width
            };
        }
        acc += k.eval_full_unchecked(x, y);
    }
    y.copy_from_slice(&c);
    acc * (0.5 / (1usize << d) as f64)
}

/// `Σ_sources k(x̄, ȳ) mass` at the center of the cell with multi-index
/// `target`.
pub fn field_at(
    k: &KernelSpec,
    sources: &Sources,
    window: &Window,
    target: &[usize],
    pv: &PvParams,
) -> Complex64 {
    let d = sources.axes;
    let h = sources.h;
    let r = pv.exclusion_radius as i64;
    let m = pv.refinement;
    let o = window.origin();
    let x: Vec<f64> = target
        .iter()
        .zip(&o)
        .map(|(&t, o)| o.to_f64() + (t as f64 + 0.5) * h)
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut sub = vec![0.0; d];
    for j in 0..sources.len() {
        let sm = &sources.multi[j * d..(j + 1) * d];
        let cheb = (0..d)
            .map(|i| (sm[i] - target[i] as i64).abs())
            .max()
            .unwrap_or(0);
        if cheb <= r {
            continue;
        }
        let y = &sources.centers[j * d..(j + 1) * d];
        if m > 1 && cheb <= r + NEAR_BAND {
            let weight = (m as f64).powi(d as i32).recip();
            let mut idx = vec![0usize; d];
            let mut part = Complex64::new(0.0, 0.0);
            'sub: loop {
                for i in 0..d {
                    sub[i] = y[i] + ((idx[i] as f64 + 0.5) / m as f64 - 0.5) * h;
                }
                part += causal_term(k, &x, &mut sub, h / m as f64, h / m as f64);
                for i in (0..d).rev() {
                    idx[i] += 1;
                    if idx[i] < m {
                        continue 'sub;
                    }
                    idx[i] = 0;
                }
                break;
            }
            acc += part * weight * sources.mass[j];
        } else {
            sub.copy_from_slice(y);
            acc += causal_term(k, &x, &mut sub, h, h) * sources.mass[j];
        }
    }
    acc
}

/// `S f` at the given cells.
pub fn apply_causal_cells(
    k: &KernelSpec,
    sources: &Sources,
    window: &Window,
    targets: &[usize],
    pv: &PvParams,
) -> Result<Vec<Complex64>, Error> {
    pv.validate(window)?;
    check_dim(k, window)?;
    Ok(targets
        .par_iter()
        .map(|&c| field_at(k, sources, window, &window.multi(c), pv))
        .collect())
}

/// `S f` at every cell center.
pub fn apply_causal(
    k: &KernelSpec,
    f: &GridFunction,
    pv: &PvParams,
) -> Result<GridFunction, Error> {
    let w = f.window();
    let sources = Sources::from_grid(f);
    let targets: Vec<usize> = (0..w.num_cells()).collect();
    let values = apply_causal_cells(k, &sources, w, &targets, pv)?;
    GridFunction::from_values(w.clone(), values)
}

/// `S f` at one cell.
pub fn apply_causal_at(
    k: &KernelSpec,
    f: &GridFunction,
    cell: usize,
    pv: &PvParams,
) -> Result<Complex64, Error> {
    let w = f.window();
    Ok(apply_causal_cells(k, &Sources::from_grid(f), w, &[cell], pv)?[0])
}

fn check_dim(k: &KernelSpec, w: &Window) -> Result<(), Error> {
    if k.point_dim() != w.axes() {
        return Err(Error::Precondition(format!(
            "kernel {} acts on dimension {}, window has {}",
            k.label(),
            k.point_dim(),
            w.axes()
        )));
    }
    Ok(())
}

/// Cell ranges of `3Q` as signed per-axis bounds; not clipped.
pub fn triple_ranges(w: &Window, q: &HalfCube) -> Option<(Vec<i64>, Vec<i64>)> {
    let r = w.cube_ranges(q)?;
    Some(triple_of(&r))
}

pub(crate) fn triple_of(r: &[Range<usize>]) -> (Vec<i64>, Vec<i64>) {
    r.iter()
        .map(|r| {
            let len = (r.end - r.start) as i64;
            (r.start as i64 - len, r.end as i64 + len)
        })
        .unzip()
}

/// `sup_{Q ∋ x̄} max_{cells of Q} |S(1_{(3Q)^c} f)|` over the dyadic cubes
/// containing the cell `cell` whose level lies in `levels`.
///
/// The `L_∞` norm over `Q` is the max over its cell centers, a lower bound.
pub fn maximal_singular(
    k: &KernelSpec,
    f: &GridFunction,
    cell: usize,
    levels: RangeInclusive<i32>,
    pv: &PvParams,
) -> Result<f64, Error> {
    let w = f.window();
    pv.validate(w)?;
    check_dim(k, w)?;
    let lo = w.root.level().max(*levels.start());
    let hi = w.cell_level().min(*levels.end());
    let sources = Sources::from_grid(f);
    let here = w.cell_cube(cell);
    let mut best = 0.0f64;
    for level in lo..=hi {
        let q = here
            .ancestor_at(level)
            .expect("level at most the cell level");
        let ranges = w.cube_ranges(&q).expect("window cubes lie in the window");
        let (tlo, thi) = triple_of(&ranges);
        let outside = sources.filter_ranges(&tlo, &thi, false);
        if outside.is_empty() {
            continue;
        }
        let cells = w.cube_cells(&q).expect("window cubes lie in the window");
        let vals = apply_causal_cells(k, &outside, w, &cells, pv)?;
        best = vals.iter().map(|v| v.norm()).fold(best, f64::max);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{BoundaryCube, HalfCube};
    use crate::kernels::{beurling, CausalSign};

    fn minus() -> KernelSpec {
        beurling().with_sign(CausalSign::Minus)
    }

    #[test]
    fn zero_in_zero_out() {
        let f = GridFunction::zeros(Window::unit(1, 3));
        let s = apply_causal(&minus(), &f, &PvParams::default()).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn radius_must_fit() {
        let f = GridFunction::zeros(Window::unit(1, 2));
        let pv = PvParams {
            exclusion_radius: 4,
            refinement: 1,
        };
        assert!(apply_causal(&minus(), &f, &pv).is_err());
        let even = PvParams {
            exclusion_radius: 1,
            refinement: 2,
        };
        assert!(apply_causal(&minus(), &f, &even).is_err());
    }

    #[test]
    fn downward_mapping_vanishes_above_support() {
        let w = Window::unit(1, 4);
        let f = GridFunction::from_callable(w.clone(), 1, |p| {
            Complex64::new(if p[0] < 0.5 { 1.0 + p[1] } else { 0.0 }, 0.0)
        })
        .unwrap();
        let s = apply_causal(&minus(), &f, &PvParams::default()).unwrap();
        for c in 0..w.num_cells() {
            if w.cell_center(c)[0] > 0.5 {
                assert_eq!(s.get(c), Complex64::new(0.0, 0.0));
            }
        }
        let up = apply_causal(
            &beurling().with_sign(CausalSign::Plus),
            &f,
            &PvParams::default(),
        )
        .unwrap();
        assert!(up.values().iter().any(|v| v.norm() > 0.0));
    }

    #[test]
    fn halves_add_to_full() {
        let w = Window::unit(1, 3);
        let f = GridFunction::from_callable(w, 1, |p| Complex64::new(p[0] * p[1], p[1])).unwrap();
        let pv = PvParams::default();
        let a = apply_causal(&minus(), &f, &pv).unwrap();
        let b = apply_causal(&beurling().with_sign(CausalSign::Plus), &f, &pv).unwrap();
        let c = apply_causal(&beurling(), &f, &pv).unwrap();
        for i in 0..a.values().len() {
            assert!((a.get(i) + b.get(i) - c.get(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn maximal_vanishes_when_support_in_every_triple() {
        let w = Window::unit(1, 2);
        let f = GridFunction::from_cubes(
            w.clone(),
            &[(
                HalfCube::new(BoundaryCube::new(2, vec![1]).unwrap(), 2).unwrap(),
                Complex64::new(1.0, 0.0),
            )],
        )
        .unwrap();
        // Cell (1, 1) is adjacent to the support, so every 3Q covers it.
        let cell = w.flat(&[1, 1]);
        let v = maximal_singular(&minus(), &f, cell, 0..=2, &PvParams::default()).unwrap();
        assert_eq!(v, 0.0);
    }
}
