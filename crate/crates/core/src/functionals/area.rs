use rayon::prelude::*;

use super::BoundaryGridFunction;
use crate::grid::{for_each_multi, GridFunction};
use crate::Error;

/// Midpoint subsamples per axis for `n ≥ 2`.
const SUBSAMPLES: usize = 4;

/// `∫_{t0}^{t1} L(t)/t dt` where `L(t) = |(y0, y1) ∩ (x − αt, x + αt)|`.
///
/// `L` is piecewise linear with breaks where a cone edge crosses an interval
/// end, so each piece integrates to `a ln(tb/ta) + b (tb − ta)`.
fn cone_slab_1d(t0: f64, t1: f64, y0: f64, y1: f64, x: f64, alpha: f64) -> f64 {
    let len = |t: f64| ((y1.min(x + alpha * t)) - (y0.max(x - alpha * t))).max(0.0);
    let mut br = vec![t0, t1];
    for e in [y1 - x, x - y0, y0 - x, x - y1] {
        let t = e / alpha;
        if t > t0 && t < t1 {
            br.push(t);
        }
    }
    br.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    for win in br.windows(2) {
        let (ta, tb) = (win[0], win[1]);
        if tb <= ta {
            continue;
        }
        let (la, lb) = (len(ta), len(tb));
        if la == 0.0 && lb == 0.0 {
            continue;
        }
        let b = (lb - la) / (tb - ta);
        let a = la - b * ta;
        let log_part = if ta == 0.0 { 0.0 } else { a * (tb / ta).ln() };
        acc += log_part + b * (tb - ta);
    }
    acc
}

/// `A f(x) = ∫∫_{|y−x| < α t} |f(t, y)| t^{-n} dt dy` at every boundary cell
/// center, with `|·|` the Euclidean norm.
///
/// Exact per cell for `n ≤ 1`; `n ≥ 2` uses a midpoint subgrid.
pub fn area_functional(f: &GridFunction, aperture: f64) -> Result<BoundaryGridFunction, Error> {
    if !(aperture > 0.0) {
        return Err(Error::Precondition(format!(
            "aperture {aperture} must be positive"
        )));
    }
    let w = f.window();
    let n = w.dim();
    let h = w.h();
    let cv = w.cell_volume();
    let support: Vec<(usize, f64)> = f
        .support()
        .into_iter()
        .map(|i| (i, f.get(i).norm()))
        .collect();
    let tmp = BoundaryGridFunction::new(w, vec![0.0; w.num_boundary_cells()])?;
    let values = (0..w.num_boundary_cells())
        .into_par_iter()
        .map(|b| {
            let x = tmp.cell_center(b);
            let mut acc = 0.0;
            for &(cell, v) in &support {
                let m = w.multi(cell);
                let t0 = m[0] as f64 * h;
                match n {
                    0 => acc += v * h,
                    1 => {
                        let y0 = w.root.lo(0).to_f64() + m[1] as f64 * h;
                        acc += v * cone_slab_1d(t0, t0 + h, y0, y0 + h, x[0], aperture);
                    }
                    _ => {
                        let sub = h / SUBSAMPLES as f64;
                        let corner: Vec<f64> =
                            w.cell_center(cell).iter().map(|c| c - 0.5 * h).collect();
                        let mut s = 0.0;
                        for_each_multi(&vec![0..SUBSAMPLES; n + 1], |k| {
                            let t = corner[0] + (k[0] as f64 + 0.5) * sub;
                            let r2: f64 = (0..n)
                                .map(|i| {
                                    let y = corner[i + 1] + (k[i + 1] as f64 + 0.5) * sub;
                                    (y - x[i]).powi(2)
                                })
                                .sum();
                            if r2 < (aperture * t).powi(2) {
                                s += t.powi(-(n as i32));
                            }
                        });
                        acc += v * s * cv / (SUBSAMPLES.pow(n as u32 + 1)) as f64;
                    }
                }
            }
            acc
        })
        .collect();
    BoundaryGridFunction::new(w, values)
}
