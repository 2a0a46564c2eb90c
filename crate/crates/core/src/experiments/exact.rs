//! The two grid-free examples: a fixed sparse family that is unbounded in the
//! Carleson norm, and the horizontal Hilbert transform on thin rectangles.

use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::ExperimentReport;
use crate::dyadic::{region, BoundaryCube, Dyadic, DyadicBox, DyadicPoint, HalfCube, RegionKind};
use crate::Error;

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `(0, 2^{-N}) × (0, 1)`, the support of `f_N = 2^N 1_{(0,2^{-N})×Q_0}`.
fn support_2_1(n: u32) -> DyadicBox {
    DyadicBox::new(
        vec![Dyadic::ZERO, Dyadic::ZERO],
        vec![Dyadic::pow2(-(n as i32)), Dyadic::from_int(1)],
    )
}

/// `Σ_{Q ∋ x̄} |Q^ca|^{-1} ∫_{Q^ca} f_N` over all dyadic Carleson cubes `Q^ca`
/// inside the unit Carleson cube, in exact rational arithmetic.
pub fn sparse_value_2_1(n: u32, x: &DyadicPoint) -> Result<BigRational, Error> {
    if x.dim() != 2 {
        return Err(Error::Precondition(
            "the example lives in the upper half-plane".into(),
        ));
    }
    let (t, y) = (x.coords[0], x.coords[1]);
    let one = Dyadic::from_int(1);
    if t <= Dyadic::ZERO || t >= one || y <= Dyadic::ZERO || y >= one {
        return Err(Error::Precondition(
            "the point must lie in the open unit Carleson cube".into(),
        ));
    }
    let supp = support_2_1(n);
    let amp = Dyadic::pow2(n as i32);
    let mut acc = BigRational::zero();
    // The Carleson cube of level j contains x̄ iff 2^{-j} > t.
    let mut j = 0;
    while Dyadic::pow2(-j) > t {
        let base = BoundaryCube::new(j, vec![y.floor_scaled(j) as i64])?;
        let r = region(&HalfCube::carleson(base), RegionKind::Carleson, None)?;
        let mass = amp * r.intersect_box(&supp).volume();
        acc += mass.to_rational() / r.volume().to_rational();
        j += 1;
    }
    Ok(acc)
}

/// Center of the Whitney region of the level-`k` interval with offset `o`.
fn whitney_center(k: u32, o: i64) -> DyadicPoint {
    let side = Dyadic::pow2(-(k as i32));
    DyadicPoint::new(vec![
        side.half() + side.half().half(),
        side * o + side.half(),
    ])
}

/// Up to 64 evenly spread offsets at depth `k`, always including both ends.
fn sample_offsets(k: u32) -> Vec<i64> {
    let count = 1i64 << k;
    if count <= 64 {
        return (0..count).collect();
    }
    let step = count / 64;
    let mut v: Vec<i64> = (0..64).map(|i| i * step).collect();
    v.push(count - 1);
    v
}

/// `|Q_0|^{-1} ∫_{Q_0^ca} Ŝf_N` over the unit cube.
///
/// Below depth `N` every further cube has its Carleson box inside the
/// support and adds exactly `2^N`, so the depth-`k` value is affine in `k`.
/// That tail is summed in closed form with `Σ_{k>K} 2^{-k-1} = 2^{-K-1}` and
/// `Σ_{k>K} k 2^{-k-1} = (K+2) 2^{-K-1}`.
fn root_carleson_2_1(n: u32) -> Result<BigRational, Error> {
    let last = n + 2;
    let values: Result<Vec<BigRational>, Error> = (0..=last)
        .map(|k| sparse_value_2_1(n, &whitney_center(k, 0)))
        .collect();
    let values = values?;
    let layer = |k: u32| BigRational::new(BigInt::one(), BigInt::one() << (k + 1));
    let mut acc = BigRational::zero();
    for (k, v) in values.iter().enumerate() {
        acc += v * layer(k as u32);
    }
    let b = &values[last as usize] - &values[last as usize - 1];
    if b != &values[last as usize - 1] - &values[last as usize - 2] {
        return Err(Error::Precondition(
            "depth values are not affine below the support".into(),
        ));
    }
    let a = &values[last as usize] - &b * int(last as i64);
    let tail = &a * layer(last) + &b * int(last as i64 + 2) * layer(last);
    Ok(acc + tail)
}

/// Exact `C_D f_N` at the boundary point `x`: cubes at depths beyond `N + 1`
/// give `2^N ℓ < 1/2` and cannot raise the sup.
fn carleson_f_2_1(n: u32, x: Dyadic) -> Result<BigRational, Error> {
    let supp = support_2_1(n);
    let amp = Dyadic::pow2(n as i32);
    let mut best = BigRational::zero();
    for d in 0..=(n as i32 + 1) {
        let base = BoundaryCube::new(d, vec![x.floor_scaled(d) as i64])?;
        let r = region(
            &HalfCube::carleson(base.clone()),
            RegionKind::Carleson,
            None,
        )?;
        let avg =
            (amp * r.intersect_box(&supp).volume()).to_rational() / base.measure().to_rational();
        if avg > best {
            best = avg;
        }
    }
    Ok(best)
}

fn slope_exact(pts: &[(i64, BigRational)]) -> Option<BigRational> {
    if pts.len() < 2 {
        return None;
    }
    let n = int(pts.len() as i64);
    let mx = pts
        .iter()
        .map(|p| int(p.0))
        .fold(BigRational::zero(), |a, b| a + b)
        / &n;
    let my = pts
        .iter()
        .map(|p| p.1.clone())
        .fold(BigRational::zero(), |a, b| a + b)
        / &n;
    let mut sxx = BigRational::zero();
    let mut sxy = BigRational::zero();
    for (x, y) in pts {
        let dx = int(*x) - &mx;
        sxy += &dx * (y - &my);
        sxx += &dx * &dx;
    }
    Some(sxy / sxx)
}

#[derive(Serialize)]
struct Params21 {
    n_min: u32,
    n_max: u32,
    p: f64,
}

/// The depth-`k` identity `Ŝf_N = 2^{k+1} − 1`, the unit slope of the root
/// Carleson average in `N`, and `‖C_D f_N‖_p = 1`, all exact.
pub fn run_example_2_1(n_range: RangeInclusive<u32>, p: f64) -> Result<ExperimentReport, Error> {
    let start = Instant::now();
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo < 1 || hi > 20 || lo > hi {
        return Err(Error::Precondition(format!(
            "N range {lo}..={hi} must lie in [1, 20]"
        )));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Precondition(format!("exponent {p} outside [1, ∞]")));
    }
    let mut rep = ExperimentReport::new(
        "ex21",
        Params21 {
            n_min: lo,
            n_max: hi,
            p,
        },
        None,
    )?;
    let mut mismatches = Vec::new();
    let mut roots = Vec::new();
    let mut cf_max = BigRational::zero();
    for n in n_range {
        for k in 0..=n {
            let expect = int((1i64 << (k + 1)) - 1);
            for o in sample_offsets(k) {
                let v = sparse_value_2_1(n, &whitney_center(k, o))?;
                if v != expect {
                    mismatches.push(format!("N={n} k={k} offset={o}: {v}"));
                }
                if o == 0 {
                    rep.measure(&format!("sparse_value_N{n}"), k as f64, super::rat_f64(&v));
                }
            }
        }
        let root = root_carleson_2_1(n)?;
        rep.measure("root_carleson_sparse", n as f64, super::rat_f64(&root));
        roots.push((n as i64, root));

        // C_D f_N is constant across Q_0, so its L_p norm over Q_0 is that value.
        let cells = 1i64 << n.min(4);
        let mut vals = Vec::new();
        for c in 0..cells {
            let x = Dyadic::pow2(-(n.min(4) as i32)) * c + Dyadic::pow2(-(n.min(4) as i32) - 1);
            vals.push(carleson_f_2_1(n, x)?);
        }
        let sup = vals
            .iter()
            .cloned()
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        let norm = if p.is_infinite() {
            super::rat_f64(&sup)
        } else {
            let h = 1.0 / cells as f64;
            (vals
                .iter()
                .map(|v| super::rat_f64(v).powf(p) * h)
                .sum::<f64>())
            .powf(1.0 / p)
        };
        rep.measure("carleson_f_lp", n as f64, norm);
        if sup > cf_max {
            cf_max = sup;
        }
    }
    rep.verdict(
        "sparse_identity",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "Ŝf_N = 2^{k+1} − 1 on every sampled depth-k Whitney region".to_string()
        } else {
            mismatches.join("; ")
        },
    );
    let slope = slope_exact(&roots);
    let offsets: Vec<BigRational> = roots.iter().map(|(n, v)| v - int(*n)).collect();
    let unit = slope.as_ref().is_some_and(|s| s.is_one());
    rep.verdict(
        "unit_slope",
        unit,
        match &slope {
            Some(s) => format!(
                "exact least-squares slope {s}; C_D(Ŝf_N) − N = {}",
                join(&offsets)
            ),
            None => "fewer than two values of N".into(),
        },
    );
    if let Some(s) = &slope {
        rep.fits.push(super::Fit {
            series: "root_carleson_sparse".into(),
            slope: super::rat_f64(s),
            intercept: super::rat_f64(&offsets[0]),
        });
    }
    rep.verdict(
        "carleson_f_bounded",
        cf_max <= int(1),
        format!("sup_N C_D f_N = {cf_max}"),
    );
    Ok(rep.finish(start))
}

fn join(v: &[BigRational]) -> String {
    let mut uniq: Vec<String> = v.iter().map(|r| r.to_string()).collect();
    uniq.dedup();
    uniq.join(", ")
}

/// One thin rectangle `(2^{-k}, 2^{1-k}) × (a, a + 2^{-j})` with amplitude `2^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub j: u32,
    pub k: u32,
    /// `a = k 2^{-j} − 1`.
    pub a: Dyadic,
    pub b: Dyadic,
}

/// The rectangles of `f_N` for `0 ≤ j ≤ N`, `2^j ≤ k < 2^{j+1}`.
pub fn ex23_rectangles(n: u32) -> Vec<Rectangle> {
    let mut out = Vec::new();
    for j in 0..=n {
        let w = Dyadic::pow2(-(j as i32));
        for k in (1u32 << j)..(2u32 << j) {
            let a = w * k as i64 - Dyadic::from_int(1);
            out.push(Rectangle { j, k, a, b: a + w });
        }
    }
    out
}

/// `u ln|u|`, continuous at `0`.
fn xlogx(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.abs().ln()
    }
}

/// `∫_0^1 |ln|x − a| − ln|x − b|| dx` for `0 ≤ a < b ≤ 1`, from the
/// antiderivative `(x − c) ln|x − c| − x` split where the sign changes at
/// the midpoint.
pub fn ex23_interval_integral(a: f64, b: f64) -> Result<f64, Error> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::Precondition(format!(
            "need 0 ≤ a < b ≤ 1, got ({a}, {b})"
        )));
    }
    let m = 0.5 * (a + b);
    // On (0, m) the point is nearer a, so ln|x − b| dominates.
    let left = (xlogx(m - b) - xlogx(-b)) - (xlogx(m - a) - xlogx(-a));
    let right = (xlogx(1.0 - a) - xlogx(m - a)) - (xlogx(1.0 - b) - xlogx(m - b));
    Ok(left + right)
}

/// `∫_0^1 |H f_N(t, x)| dx` for `t` in the slab of `r`: one rectangle per slab.
pub fn ex23_slab_value(r: &Rectangle) -> Result<f64, Error> {
    Ok((r.k as f64).exp2() / PI * ex23_interval_integral(r.a.to_f64(), r.b.to_f64())?)
}

/// `sup_{Q ∋ x} |Q|^{-1} ∫_{Q^ca} f_N` at every boundary cell of depth `depth`.
///
/// The rectangles are unions of Whitney regions, so `W_{D,∞} f_N = f_N` and
/// the Carleson sums are rectangle masses: a rectangle lies in `Q^ca` when
/// `2^{1−k} ≤ ℓ(Q)` and then contributes its `x`-overlap with `Q`. Cubes
/// finer than `depth` cannot exceed `N + 1`, because for each `j` the
/// intervals tile `(0, 1)`.
fn carleson_w_2_3(rects: &[Rectangle], depth: u32) -> Vec<BigRational> {
    let mut layers: Vec<Vec<BigRational>> = Vec::new();
    for m in 0..=depth {
        let side = Dyadic::pow2(-(m as i32));
        let row = (0..(1i64 << m))
            .map(|o| {
                let (lo, hi) = (side * o, side * (o + 1));
                let mass: Dyadic = rects
                    .iter()
                    .filter(|r| r.k > m)
                    .map(|r| {
                        let w = r.b.min(hi) - r.a.max(lo);
                        if w > Dyadic::ZERO {
                            w
                        } else {
                            Dyadic::ZERO
                        }
                    })
                    .sum();
                mass.to_rational() / side.to_rational()
            })
            .collect();
        layers.push(row);
    }
    (0..(1usize << depth))
        .map(|cell| {
            (0..=depth)
                .map(|m| layers[m as usize][cell >> (depth - m)].clone())
                .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
        })
        .collect()
}

#[derive(Serialize)]
struct Params23 {
    n_min: u32,
    n_max: u32,
    carleson_n_max: u32,
}

/// Largest `j` for the per-rectangle comparison with `2^{k−j}(j+1)`.
const RATIO_J_MAX: u32 = 5;
/// Largest `N` for the exact Carleson sums.
const CARLESON_N_MAX: u32 = 6;

/// Closed-form slab integrals against `2^{k−j}(j+1)`, the `N²` growth of the
/// total mass of `|Hf_N|`, and the linear bound on `C_D(W_∞ f_N)`.
pub fn run_example_2_3(n_range: RangeInclusive<u32>) -> Result<ExperimentReport, Error> {
    let start = Instant::now();
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo > hi || hi > 8 {
        return Err(Error::Precondition(format!(
            "N range {lo}..={hi} must lie in [0, 8]"
        )));
    }
    let mut rep = ExperimentReport::new(
        "ex23",
        Params23 {
            n_min: lo,
            n_max: hi,
            carleson_n_max: CARLESON_N_MAX,
        },
        None,
    )?;
    // The per-rectangle values do not depend on N.
    let mut ratio_range = (f64::INFINITY, 0.0f64);
    for r in ex23_rectangles(hi.max(RATIO_J_MAX)) {
        if r.j > RATIO_J_MAX {
            continue;
        }
        let v = ex23_slab_value(&r)?;
        let ratio = v / ((r.k as f64 - r.j as f64).exp2() * (r.j + 1) as f64);
        rep.measure(&format!("slab_ratio_j{}", r.j), r.k as f64, ratio);
        ratio_range = (ratio_range.0.min(ratio), ratio_range.1.max(ratio));
    }
    rep.verdict(
        "slab_values",
        ratio_range.0 >= 0.25 && ratio_range.1 <= 4.0,
        format!(
            "∫|Hf_N|dx / (2^(k−j)(j+1)) over j ≤ {RATIO_J_MAX} lies in [{:.4}, {:.4}]",
            ratio_range.0, ratio_range.1
        ),
    );

    let mut growth = Vec::new();
    for n in lo..=hi {
        // T(N) = Σ 2^{-k} ∫|Hf_N| dx, and the 2^k amplitudes cancel the slab widths.
        let total: f64 = ex23_rectangles(n)
            .iter()
            .map(|r| ex23_interval_integral(r.a.to_f64(), r.b.to_f64()).map(|i| i / PI))
            .sum::<Result<f64, Error>>()?;
        rep.measure("total_mass", n as f64, total);
        if n >= 3 {
            let g = total / (n * n) as f64;
            rep.measure("total_over_n2", n as f64, g);
            growth.push(g);
        }
    }
    let c = growth.iter().copied().fold(f64::INFINITY, f64::min);
    let top = growth.iter().copied().fold(0.0, f64::max);
    rep.verdict(
        "quadratic_growth",
        !growth.is_empty() && top <= 4.0 * c,
        format!(
            "T(N)/N² over N ≥ 3 lies in [{c:.5}, {top:.5}] = [c, {:.3}c]",
            top / c
        ),
    );

    let mut worst = 0.0f64;
    let mut all_ok = true;
    for n in lo..=hi.min(CARLESON_N_MAX) {
        let vals = carleson_w_2_3(&ex23_rectangles(n), n + 4);
        let sup = vals
            .iter()
            .cloned()
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        let s = super::rat_f64(&sup);
        rep.measure("carleson_w_inf", n as f64, s);
        worst = worst.max(s / (n + 1) as f64);
        all_ok &= sup <= int(2 * (n as i64 + 1));
    }
    rep.verdict(
        "carleson_linear",
        all_ok,
        format!("max C_D(W_∞ f_N)/(N+1) = {worst} for N ≤ {CARLESON_N_MAX}"),
    );
    Ok(rep.finish(start))
}
