//! Whitney averages, dyadic Carleson and non-tangential functionals, the area
//! functional, the dyadic maximal function and tent norms.

mod area;
mod maximal;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{region, BoundaryCube, DyadicBox, HalfCube, RegionKind};
use crate::grid::{coarsen, GridFunction, Window};
use crate::Error;

pub use area::area_functional;
pub use maximal::hl_maximal;

/// Non-negative values indexed by the boundary cubes `Q ⊆ Q_root` at depths
/// `0..J` below the window root.
///
/// Depth `d` holds `2^{dn}` values in row-major order of the cube offsets
/// relative to the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeSequence {
    window: Window,
    layers: Vec<Vec<f64>>,
}

impl CubeSequence {
    pub fn zeros(window: &Window) -> Self {
        let n = window.dim();
        let layers = (0..window.depth)
            .map(|d| vec![0.0; 1 << (d as usize * n)])
            .collect();
        CubeSequence {
            window: window.clone(),
            layers,
        }
    }

    /// `s_Q = value(Q, depth)` for every cube.
    pub fn from_fn(window: &Window, mut value: impl FnMut(&BoundaryCube, u32) -> f64) -> Self {
        let mut s = CubeSequence::zeros(window);
        for d in 0..window.depth {
            for i in 0..s.layers[d as usize].len() {
                let q = s.cube(d, i);
                s.layers[d as usize][i] = value(&q, d);
            }
        }
        s
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Number of depths, `J`.
    pub fn depths(&self) -> u32 {
        self.layers.len() as u32
    }

    pub fn layer(&self, depth: u32) -> &[f64] {
        &self.layers[depth as usize]
    }

    pub fn layer_mut(&mut self, depth: u32) -> &mut [f64] {
        &mut self.layers[depth as usize]
    }

    /// The boundary cube at `depth` with row-major index `idx`.
    pub fn cube(&self, depth: u32, idx: usize) -> BoundaryCube {
        let n = self.window.dim();
        let root = &self.window.root;
        let mask = (1usize << depth) - 1;
        let offsets = (0..n)
            .map(|k| {
                let m = (idx >> (depth as usize * (n - 1 - k))) & mask;
                (root.offsets()[k] << depth) + m as i64
            })
            .collect();
        BoundaryCube::new(root.level() + depth as i32, offsets).expect("sub-cubes of the root")
    }

    /// `(depth, index)` of a cube, if it is represented.
    pub fn locate(&self, q: &BoundaryCube) -> Option<(u32, usize)> {
        let root = &self.window.root;
        if q.dim() != root.dim() || !root.contains(q) {
            return None;
        }
        let d = (q.level() - root.level()) as u32;
        if d >= self.depths() {
            return None;
        }
        let idx = q
            .offsets()
            .iter()
            .zip(root.offsets())
            .fold(0usize, |acc, (k, r)| (acc << d) | (k - (r << d)) as usize);
        Some((d, idx))
    }

    pub fn get(&self, q: &BoundaryCube) -> Option<f64> {
        self.locate(q).map(|(d, i)| self.layers[d as usize][i])
    }

    pub fn set(&mut self, q: &BoundaryCube, v: f64) -> Result<(), Error> {
        let (d, i) = self
            .locate(q)
            .ok_or_else(|| Error::Precondition(format!("cube {q:?} outside the sequence")))?;
        self.layers[d as usize][i] = v;
        Ok(())
    }

    /// Cubewise maximum of two sequences on the same window.
    pub fn max(&self, other: &CubeSequence) -> CubeSequence {
        let mut out = self.clone();
        for (a, b) in out.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = x.max(*y);
            }
        }
        out
    }
}

/// Non-negative values on the `2^{Jn}` boundary cells of the window root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGridFunction {
    window: Window,
    values: Vec<f64>,
}

impl BoundaryGridFunction {
    pub fn new(window: &Window, values: Vec<f64>) -> Result<Self, Error> {
        if values.len() != window.num_boundary_cells() {
            return Err(Error::Format(
                "boundary value count does not match the window".into(),
            ));
        }
        Ok(BoundaryGridFunction {
            window: window.clone(),
            values,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Center of a boundary cell.
    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        let w = &self.window;
        let n = w.dim();
        let mask = w.per_axis() - 1;
        let h = w.h();
        (0..n)
            .map(|k| {
                let m = (idx >> (w.depth as usize * (n - 1 - k))) & mask;
                w.root.lo(k).to_f64() + (m as f64 + 0.5) * h
            })
            .collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([i.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_q(q: f64) -> Result<(), Error> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::Precondition(format!(
            "Whitney exponent {q} outside [1, ∞]"
        )));
    }
    Ok(())
}

/// `|Q^w|^{-1/q} ‖f‖_{L_q(Q^w)}`, over `Q̃^w = (ℓ/2, 3ℓ/2) × 2Q` when
/// `enlarged`; `q = ∞` gives the largest cell value.
///
/// The enlarged region is cut to the window before normalizing, so the
/// window acts as the whole domain.
pub fn whitney(
    f: &GridFunction,
    q: f64,
    cube: &BoundaryCube,
    enlarged: bool,
) -> Result<f64, Error> {
    check_q(q)?;
    let w = f.window();
    if cube.dim() != w.dim() || !w.root.contains(cube) {
        return Err(Error::Precondition(format!(
            "{cube:?} is outside the window"
        )));
    }
    if cube.level() >= w.cell_level() {
        return Err(Error::Precondition(format!(
            "{cube:?} is below the grid resolution"
        )));
    }
    let kind = if enlarged {
        RegionKind::TildeW
    } else {
        RegionKind::Whitney
    };
    let r = region(&HalfCube::carleson(cube.clone()), kind, None)?
        .intersect_box(&DyadicBox::of_cube(&w.root_cube()));
    let norm = f.lq_norm(&r, q)?;
    if q.is_infinite() {
        return Ok(norm);
    }
    Ok(norm * r.volume().to_f64().powf(-1.0 / q))
}

/// The Whitney `q`-average of `|f|` on every cube of the window.
pub fn whitney_sequence(f: &GridFunction, q: f64, enlarged: bool) -> Result<CubeSequence, Error> {
    check_q(q)?;
    let w = f.window().clone();
    if enlarged {
        let mut s = CubeSequence::zeros(&w);
        for d in 0..w.depth {
            let vals: Result<Vec<f64>, Error> = (0..s.layer(d).len())
                .into_par_iter()
                .map(|i| whitney(f, q, &s.cube(d, i), true))
                .collect();
            s.layer_mut(d).copy_from_slice(&vals?);
        }
        return Ok(s);
    }
    // Rows [2^{J-d-1}, 2^{J-d}) form the Whitney layer of depth d.
    let j = w.depth;
    let n = w.dim();
    let mut acc = CubeSequence::zeros(&w);
    for (flat, v) in f.values().iter().enumerate() {
        let row = w.row(flat);
        if row == 0 {
            continue;
        }
        let d = j - 1 - row.ilog2();
        let idx = coarsen(w.column(flat), n, j, d);
        let a = &mut acc.layer_mut(d)[idx];
        if q.is_infinite() {
            *a = a.max(v.norm());
        } else {
            *a += v.norm().powf(q);
        }
    }
    if q.is_finite() {
        for d in 0..j {
            // Each Whitney region of depth d holds 2^{(J-d)(n+1)-1} cells.
            let cells = (1u64 << ((j - d) as usize * (n + 1) - 1)) as f64;
            for a in acc.layer_mut(d) {
                *a = (*a / cells).powf(1.0 / q);
            }
        }
    }
    Ok(acc)
}

/// `I(Q) = Σ_{R ⊆ Q} |R^w| s_R` for every cube, by a bottom-up pass.
fn carleson_sums(s: &CubeSequence) -> Vec<Vec<f64>> {
    let w = s.window();
    let n = w.dim();
    let depths = s.depths();
    let mut sums: Vec<Vec<f64>> = (0..depths).map(|d| vec![0.0; s.layer(d).len()]).collect();
    for d in (0..depths).rev() {
        let side = w.root.side().to_f64() * (-(d as f64)).exp2();
        let wvol = 0.5 * side.powi(n as i32 + 1);
        for (i, v) in s.layer(d).iter().enumerate() {
            sums[d as usize][i] += wvol * v;
        }
        if d > 0 {
            let (upper, lower) = sums.split_at_mut(d as usize);
            for (i, v) in lower[0].iter().enumerate() {
                upper[d as usize - 1][coarsen(i, n, d, d - 1)] += v;
            }
        }
    }
    sums
}

/// Per boundary cell, the largest ancestor value of a layered table.
fn sup_over_ancestors(w: &Window, layers: &[Vec<f64>]) -> BoundaryGridFunction {
    let n = w.dim();
    let j = w.depth;
    let values = (0..w.num_boundary_cells())
        .map(|cell| {
            layers
                .iter()
                .enumerate()
                .map(|(d, l)| l[coarsen(cell, n, j, d as u32)])
                .fold(0.0, f64::max)
        })
        .collect();
    BoundaryGridFunction {
        window: w.clone(),
        values,
    }
}

fn normalize_by_measure(w: &Window, sums: &mut [Vec<f64>]) {
    let n = w.dim() as i32;
    for (d, l) in sums.iter_mut().enumerate() {
        let side = w.root.side().to_f64() * (-(d as f64)).exp2();
        let m = side.powi(n);
        for v in l.iter_mut() {
            *v /= m;
        }
    }
}

/// `C_D s(x) = sup_{Q ∋ x} |Q|^{-1} Σ_{R ⊆ Q} |R^w| s_R`.
pub fn carleson_dyadic(s: &CubeSequence) -> BoundaryGridFunction {
    let mut sums = carleson_sums(s);
    normalize_by_measure(s.window(), &mut sums);
    sup_over_ancestors(s.window(), &sums)
}

/// `N_D s(x) = sup_{Q ∋ x} s_Q`.
pub fn nontangential_dyadic(s: &CubeSequence) -> BoundaryGridFunction {
    let layers: Vec<Vec<f64>> = (0..s.depths()).map(|d| s.layer(d).to_vec()).collect();
    sup_over_ancestors(s.window(), &layers)
}

/// The Carleson functional `C f(x) = sup_{Q ∋ x} |Q|^{-1} ∫_{Q^ca} |f|` over
/// dyadic `Q` down to the cell size, including the bottom cell layer.
pub fn carleson_function(f: &GridFunction) -> BoundaryGridFunction {
    let w = f.window();
    let n = w.dim();
    let j = w.depth;
    let cv = w.cell_volume();
    let mut sums: Vec<Vec<f64>> = (0..=j).map(|d| vec![0.0; 1 << (d as usize * n)]).collect();
    for (flat, v) in f.values().iter().enumerate() {
        let row = w.row(flat);
        let d = if row == 0 { j } else { j - 1 - row.ilog2() };
        sums[d as usize][coarsen(w.column(flat), n, j, d)] += v.norm() * cv;
    }
    for d in (1..=j).rev() {
        let (upper, lower) = sums.split_at_mut(d as usize);
        for (i, v) in lower[0].iter().enumerate() {
            upper[d as usize - 1][coarsen(i, n, d, d - 1)] += v;
        }
    }
    normalize_by_measure(w, &mut sums);
    sup_over_ancestors(w, &sums)
}

/// `(Σ_cells h^n |g|^p)^{1/p}`; `p = ∞` gives the sup.
pub fn boundary_lp(g: &BoundaryGridFunction, p: f64) -> Result<f64, Error> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Precondition(format!("exponent {p} outside [1, ∞]")));
    }
    if p.is_infinite() {
        return Ok(g.sup());
    }
    let w = g.window();
    let cell = w.h().powi(w.dim() as i32);
    Ok((g.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p))
}

/// The tent norms `‖f‖_Y` with weight `t` and `‖f‖_{Y*}` with weight `1/t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TentNorms {
    pub y: f64,
    pub ystar: f64,
}

/// Weighted `L_2` norms with the weight evaluated at cell centers.
pub fn tent_norms(f: &GridFunction) -> TentNorms {
    let w = f.window();
    let h = w.h();
    let cv = w.cell_volume();
    let (mut y, mut ys) = (0.0, 0.0);
    for (flat, v) in f.values().iter().enumerate() {
        let t = (w.row(flat) as f64 + 0.5) * h;
        let a = v.norm_sqr();
        y += a * t;
        ys += a / t;
    }
    TentNorms {
        y: (y * cv).sqrt(),
        ystar: (ys * cv).sqrt(),
    }
}

/// `‖C_D(W_{D,∞}(|E|²/t))‖_∞`.
pub fn carleson_multiplier_check(e: &GridFunction) -> Result<f64, Error> {
    let g = e.map_with_center(|p, v| (v.norm_sqr() / p[0]).into());
    let s = whitney_sequence(&g, f64::INFINITY, false)?;
    Ok(carleson_dyadic(&s).sup())
}
