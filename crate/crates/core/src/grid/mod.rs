//! Cell-averaged functions on a uniform grid over a Carleson box.

mod io;
mod summed;

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{BoundaryCube, Dyadic, DyadicBox, DyadicPoint, HalfCube, RegionSet};
use crate::Error;

pub use io::{read_binary, read_csv, write_binary, write_csv};
pub use summed::SummedVolume;

/// The Carleson box `(0, ℓ) × Q_root` cut into `2^depth` cells per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub root: BoundaryCube,
    pub depth: u32,
}

impl Window {
    pub fn new(root: BoundaryCube, depth: u32) -> Result<Self, Error> {
        let axes = root.dim() + 1;
        if depth as usize * axes > 40 {
            return Err(Error::Precondition(format!(
                "window of depth {depth} in dimension {axes} is too large"
            )));
        }
        Ok(Window { root, depth })
    }

    /// The unit window `(0,1) × [0,1)^n`.
    pub fn unit(n: usize, depth: u32) -> Self {
        Window {
            root: BoundaryCube::origin(0, n),
            depth,
        }
    }

    /// Spatial dimension `n`.
    pub fn dim(&self) -> usize {
        self.root.dim()
    }

    /// `n + 1`.
    pub fn axes(&self) -> usize {
        self.root.dim() + 1
    }

    pub fn per_axis(&self) -> usize {
        1 << self.depth
    }

    pub fn num_cells(&self) -> usize {
        1 << (self.depth as usize * self.axes())
    }

    pub fn num_boundary_cells(&self) -> usize {
        1 << (self.depth as usize * self.dim())
    }

    /// Level of the cell-sized dyadic cubes.
    pub fn cell_level(&self) -> i32 {
        self.root.level() + self.depth as i32
    }

    pub fn cell_side(&self) -> Dyadic {
        Dyadic::pow2(-self.cell_level())
    }

    pub fn h(&self) -> f64 {
        self.cell_side().to_f64()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.axes() as i32)
    }

    pub fn root_cube(&self) -> HalfCube {
        HalfCube::carleson(self.root.clone())
    }

    pub fn volume(&self) -> f64 {
        self.root_cube().volume().to_f64()
    }

    /// Lower corner in `(t, x)` order.
    pub fn origin(&self) -> Vec<Dyadic> {
        std::iter::once(Dyadic::ZERO)
            .chain((0..self.dim()).map(|i| self.root.lo(i)))
            .collect()
    }

    pub fn flat(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &m| (acc << self.depth) | m)
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mask = self.per_axis() - 1;
        let mut out = vec![0; self.axes()];
        for slot in out.iter_mut().rev() {
            *slot = flat & mask;
            flat >>= self.depth;
        }
        out
    }

    /// Row (time index) of a cell.
    pub fn row(&self, flat: usize) -> usize {
        flat >> (self.depth as usize * self.dim())
    }

    /// Index of the boundary cell below a cell.
    pub fn column(&self, flat: usize) -> usize {
        flat & (self.num_boundary_cells() - 1)
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        let h = self.h();
        let o = self.origin();
        self.multi(flat)
            .iter()
            .zip(&o)
            .map(|(&m, o)| o.to_f64() + (m as f64 + 0.5) * h)
            .collect()
    }

    pub fn cell_center_exact(&self, flat: usize) -> DyadicPoint {
        let h = self.cell_side();
        let o = self.origin();
        DyadicPoint::new(
            self.multi(flat)
                .iter()
                .zip(&o)
                .map(|(&m, o)| *o + h * Dyadic::new(2 * m as i128 + 1, 1))
                .collect(),
        )
    }

    /// The cell as a cell-level [`HalfCube`].
    pub fn cell_cube(&self, flat: usize) -> HalfCube {
        let m = self.multi(flat);
        let base_off = 1i64 << self.depth;
        let base = BoundaryCube::new(
            self.cell_level(),
            (0..self.dim())
                .map(|i| self.root.offsets()[i] * base_off + m[i + 1] as i64)
                .collect(),
        )
        .expect("cells lie in the quadrant");
        HalfCube::new(base, m[0] as i64).expect("cells lie in the half-space")
    }

    /// Cell containing a point of the closed window, if any.
    pub fn cell_of(&self, p: &[f64]) -> Option<usize> {
        if p.len() != self.axes() {
            return None;
        }
        let h = self.h();
        let o = self.origin();
        let n = self.per_axis();
        let mut multi = Vec::with_capacity(p.len());
        for (x, o) in p.iter().zip(&o) {
            let u = (x - o.to_f64()) / h;
            if !(0.0..=n as f64).contains(&u) {
                return None;
            }
            multi.push((u.floor() as usize).min(n - 1));
        }
        Some(self.flat(&multi))
    }

    /// Per-axis cell ranges of a cube of level at most the cell level inside
    /// the window.
    pub fn cube_ranges(&self, c: &HalfCube) -> Option<Vec<Range<usize>>> {
        if c.dim() != self.dim() || c.level() > self.cell_level() || !self.root_cube().contains(c) {
            return None;
        }
        let o = self.origin();
        let e = self.cell_level();
        Some(
            (0..self.axes())
                .map(|i| {
                    let lo = (c.lo(i) - o[i]).floor_scaled(e) as usize;
                    let hi = (c.hi(i) - o[i]).floor_scaled(e) as usize;
                    lo..hi
                })
                .collect(),
        )
    }

    /// Flat indices of every cell of a cube, in increasing order.
    pub fn cube_cells(&self, c: &HalfCube) -> Option<Vec<usize>> {
        let r = self.cube_ranges(c)?;
        let mut out = Vec::new();
        for_each_multi(&r, |m| out.push(self.flat(m)));
        Some(out)
    }

    /// Per-axis lists of `(cell, overlap fraction)` for a box.
    pub fn box_overlaps(&self, b: &DyadicBox) -> Vec<Vec<(usize, f64)>> {
        let (lo, hi) = b.to_f64();
        self.box_overlaps_f64(&lo, &hi)
    }

    pub fn box_overlaps_f64(&self, lo: &[f64], hi: &[f64]) -> Vec<Vec<(usize, f64)>> {
        let h = self.h();
        let o = self.origin();
        let n = self.per_axis() as f64;
        (0..self.axes())
            .map(|i| {
                let o = o[i].to_f64();
                let u0 = ((lo[i] - o) / h).clamp(0.0, n);
                let u1 = ((hi[i] - o) / h).clamp(0.0, n);
                let mut v = Vec::new();
                if u1 > u0 {
                    let first = u0.floor() as usize;
                    let last = (u1.ceil() as usize).max(first + 1);
                    for c in first..last {
                        let w = u1.min(c as f64 + 1.0) - u0.max(c as f64);
                        if w > 0.0 {
                            v.push((c, w));
                        }
                    }
                }
                v
            })
            .collect()
    }

    /// Visits every cell meeting a box with its overlap fraction.
    pub fn for_each_overlap(&self, b: &DyadicBox, mut visit: impl FnMut(usize, f64)) {
        let axes = self.box_overlaps(b);
        if axes.iter().any(|a| a.is_empty()) {
            return;
        }
        let mut pos = vec![0usize; axes.len()];
        loop {
            let mut flat = 0usize;
            let mut w = 1.0;
            for (a, &p) in axes.iter().zip(&pos) {
                flat = (flat << self.depth) | a[p].0;
                w *= a[p].1;
            }
            visit(flat, w);
            let mut k = axes.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                pos[k] += 1;
                if pos[k] < axes[k].len() {
                    break;
                }
                pos[k] = 0;
            }
        }
    }
}

/// Index of the ancestor block of a row-major index over `axes` axes when
/// every axis is coarsened from `from` bits to `to ≤ from` bits.
pub fn coarsen(idx: usize, axes: usize, from: u32, to: u32) -> usize {
    let mask = (1usize << from) - 1;
    let drop = from - to;
    let mut out = 0usize;
    for k in 0..axes {
        let shift = from as usize * (axes - 1 - k);
        out = (out << to) | (((idx >> shift) & mask) >> drop);
    }
    out
}

/// Odometer over a product of ranges; the last axis varies fastest.
pub(crate) fn for_each_multi(ranges: &[Range<usize>], mut visit: impl FnMut(&[usize])) {
    if ranges.iter().any(|r| r.is_empty()) {
        return;
    }
    let mut m: Vec<usize> = ranges.iter().map(|r| r.start).collect();
    loop {
        visit(&m);
        let mut k = m.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            m[k] += 1;
            if m[k] < ranges[k].end {
                break;
            }
            m[k] = ranges[k].start;
        }
    }
}

/// Cell averages of a complex function on a [`Window`]; zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    window: Window,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(window: Window) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); window.num_cells()];
        GridFunction { window, values }
    }

    pub fn constant(window: Window, c: Complex64) -> Self {
        let values = vec![c; window.num_cells()];
        GridFunction { window, values }
    }

    pub fn from_values(window: Window, values: Vec<Complex64>) -> Result<Self, Error> {
        if values.len() != window.num_cells() {
            return Err(Error::Format(format!(
                "expected {} cell values, got {}",
                window.num_cells(),
                values.len()
            )));
        }
        Ok(GridFunction { window, values })
    }

    /// Averages `fun` over an `m^{1+n}` midpoint subgrid of every cell.
    pub fn from_callable<F>(window: Window, m: usize, fun: F) -> Result<Self, Error>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        if m == 0 {
            return Err(Error::Precondition(
                "antialias factor must be at least 1".into(),
            ));
        }
        let axes = window.axes();
        let h = window.h();
        let sub = h / m as f64;
        let weight = 1.0 / (m.pow(axes as u32)) as f64;
        let values = (0..window.num_cells())
            .into_par_iter()
            .map(|flat| {
                let base = window.multi(flat);
                let o = window.origin();
                let corner: Vec<f64> = base
                    .iter()
                    .zip(&o)
                    .map(|(&b, o)| o.to_f64() + b as f64 * h)
                    .collect();
                let mut acc = Complex64::new(0.0, 0.0);
                let mut p = vec![0.0; axes];
                for_each_multi(&vec![0..m; axes], |s| {
                    for i in 0..axes {
                        p[i] = corner[i] + (s[i] as f64 + 0.5) * sub;
                    }
                    acc += fun(&p);
                });
                acc * weight
            })
            .collect();
        Ok(GridFunction { window, values })
    }

    /// `Σ amp · 1_cube` over cubes of the window at level ≤ the cell level.
    pub fn from_cubes(window: Window, cubes: &[(HalfCube, Complex64)]) -> Result<Self, Error> {
        let mut f = GridFunction::zeros(window);
        for (c, a) in cubes {
            let cells = f.window.cube_cells(c).ok_or_else(|| {
                Error::Precondition(format!("cube {c:?} is not resolved by the window"))
            })?;
            for i in cells {
                f.values[i] += a;
            }
        }
        Ok(f)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, flat: usize) -> Complex64 {
        self.values[flat]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// Cells with a nonzero value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] != Complex64::new(0.0, 0.0))
            .collect()
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> Self {
        GridFunction {
            window: self.window.clone(),
            values: self.values.iter().map(|&v| g(v)).collect(),
        }
    }

    /// Cellwise map with access to the cell center.
    pub fn map_with_center(&self, g: impl Fn(&[f64], Complex64) -> Complex64) -> Self {
        GridFunction {
            window: self.window.clone(),
            values: (0..self.values.len())
                .map(|i| g(&self.window.cell_center(i), self.values[i]))
                .collect(),
        }
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self, Error> {
        self.check_window(other)?;
        Ok(GridFunction {
            window: self.window.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn check_window(&self, other: &GridFunction) -> Result<(), Error> {
        if self.window != other.window {
            return Err(Error::Precondition(
                "grid functions live on different windows".into(),
            ));
        }
        Ok(())
    }

    /// `1_R f` with partial cells scaled by their overlap fraction.
    pub fn restrict(&self, r: &RegionSet) -> Self {
        let mut w = vec![0.0; self.values.len()];
        for b in r.boxes() {
            self.window.for_each_overlap(b, |i, f| w[i] += f);
        }
        GridFunction {
            window: self.window.clone(),
            values: self
                .values
                .iter()
                .zip(&w)
                .map(|(v, w)| v * w.min(1.0))
                .collect(),
        }
    }

    pub fn integrate(&self, r: &RegionSet) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in r.boxes() {
            self.window
                .for_each_overlap(b, |i, w| acc += self.values[i] * w);
        }
        acc * self.window.cell_volume()
    }

    /// `‖f‖_{L_q(R)}`; `q = ∞` is the largest cell value meeting `R`.
    pub fn lq_norm(&self, r: &RegionSet, q: f64) -> Result<f64, Error> {
        if q.is_nan() || q < 1.0 {
            return Err(Error::Precondition(format!("exponent {q} outside [1, ∞]")));
        }
        if q.is_infinite() {
            let mut m = 0.0f64;
            for b in r.boxes() {
                self.window
                    .for_each_overlap(b, |i, _| m = m.max(self.values[i].norm()));
            }
            return Ok(m);
        }
        let mut acc = 0.0;
        for b in r.boxes() {
            self.window
                .for_each_overlap(b, |i, w| acc += self.values[i].norm().powf(q) * w);
        }
        Ok((acc * self.window.cell_volume()).powf(1.0 / q))
    }

    pub fn average(&self, r: &RegionSet) -> Result<Complex64, Error> {
        let v = r.volume();
        if v.is_zero() {
            return Err(Error::DegenerateRegion);
        }
        Ok(self.integrate(r) / v.to_f64())
    }

    /// `‖f‖_{L_1}` over the window.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.window.cell_volume()
    }

    /// `‖f‖_{L_2}` over the window.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.window.cell_volume()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Smallest dyadic cube containing the support; `None` for `f = 0`.
    pub fn support_cube(&self) -> Option<HalfCube> {
        let supp = self.support();
        let first = *supp.first()?;
        let mut cube = self.window.cell_cube(first);
        for &i in &supp[1..] {
            let c = self.window.cell_cube(i);
            while !cube.contains(&c) {
                cube = cube.parent();
            }
        }
        Some(cube)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{region, RegionKind};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn index_round_trip() {
        let w = Window::unit(2, 3);
        for i in [0, 1, 17, 300, w.num_cells() - 1] {
            assert_eq!(w.flat(&w.multi(i)), i);
            let cube = w.cell_cube(i);
            assert_eq!(w.cube_cells(&cube).unwrap(), vec![i]);
            assert_eq!(w.cell_of(&w.cell_center(i)), Some(i));
        }
    }

    #[test]
    fn t_is_the_slowest_axis() {
        let w = Window::unit(1, 2);
        assert_eq!(w.multi(5), vec![1, 1]);
        assert_eq!(w.row(5), 1);
        assert_eq!(w.column(5), 1);
    }

    #[test]
    fn left_half_indicator() {
        let w = Window::unit(1, 3);
        let f =
            GridFunction::from_callable(w.clone(), 1, |p| c(if p[1] < 0.5 { 1.0 } else { 0.0 }))
                .unwrap();
        let all = region(&w.root_cube(), RegionKind::Carleson, None).unwrap();
        assert!((f.integrate(&all).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partial_cells_use_fractional_overlap() {
        let w = Window::unit(1, 1);
        let f = GridFunction::constant(w, c(2.0));
        let b = DyadicBox::new(
            vec![Dyadic::new(1, 3), Dyadic::new(1, 2)],
            vec![Dyadic::new(5, 3), Dyadic::new(3, 1)],
        );
        let r = RegionSet::from_box(b);
        assert!((f.integrate(&r).re - 2.0 * 0.5 * 0.75).abs() < 1e-15);
        assert!((f.average(&r).unwrap().re - 0.75 / (0.5 * 1.25)).abs() < 1e-15);
        let inside = RegionSet::from_box(DyadicBox::new(
            vec![Dyadic::new(1, 3), Dyadic::new(1, 2)],
            vec![Dyadic::new(5, 3), Dyadic::new(3, 2)],
        ));
        assert!((f.average(&inside).unwrap().re - 2.0).abs() < 1e-15);
        assert_eq!(f.lq_norm(&r, f64::INFINITY).unwrap(), 2.0);
    }

    #[test]
    fn degenerate_average_is_an_error() {
        let f = GridFunction::zeros(Window::unit(0, 2));
        assert!(matches!(
            f.average(&RegionSet::empty(1)),
            Err(Error::DegenerateRegion)
        ));
    }

    #[test]
    fn linear_t_cell_averages() {
        let w = Window::unit(1, 1);
        let f = GridFunction::from_callable(w.clone(), 64, |p| c(p[0])).unwrap();
        for i in 0..w.num_cells() {
            let expected = if w.row(i) == 0 { 0.25 } else { 0.75 };
            assert!((f.get(i).re - expected).abs() < 1.0 / 64.0);
        }
    }

    #[test]
    fn support_cube_is_minimal() {
        let w = Window::unit(1, 3);
        let q = HalfCube::new(BoundaryCube::new(2, vec![1]).unwrap(), 2).unwrap();
        let f = GridFunction::from_cubes(w, &[(q.children()[3].clone(), c(1.0))]).unwrap();
        assert_eq!(f.support_cube(), Some(q.children()[3].clone()));
    }
}
