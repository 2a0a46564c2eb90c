//! Stopping-time construction of the causal sparse family dominating a
//! downward-mapping CZO, with exact sparsity checks.

use std::fmt;
use std::ops::Range;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::dyadic::{covering_family, region, HalfCube, RegionKind};
use crate::grid::{for_each_multi, GridFunction, Window};
use crate::kernels::{CausalSign, KernelSpec};
use crate::operators::{
    apply_causal_cells, triple_of, PvParams, Sources, SparseKind, SparseOperator,
};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseParams {
    /// Stopping fraction `α ∈ (0, 1)`.
    pub alpha: Ratio<u64>,
    pub c_init: f64,
    pub c_growth: f64,
    /// `c` may not exceed `c_cap · c_init`.
    pub c_cap: f64,
    /// Recursion depth below each covering cube.
    pub max_depth: u32,
    /// Sparseness `η ∈ (0, 1)`.
    pub eta_target: Ratio<u64>,
    pub pv: PvParams,
}

impl SparseParams {
    /// `α = 2^{-2-n}`, `η = 1/4`, `c` doubling from `1/α`. By Chebyshev a
    /// smaller `c` lets a field whose local mean equals the input average flag
    /// stopping cubes on its own, and the step then cascades self-similarly
    /// along every jump of `f`.
    pub fn for_dim(n: usize) -> Self {
        SparseParams {
            alpha: Ratio::new(1, 1 << (2 + n)),
            c_init: (1u64 << (2 + n)) as f64,
            c_growth: 2.0,
            c_cap: 2f64.powi(40),
            max_depth: u32::MAX,
            eta_target: Ratio::new(1, 4),
            pv: PvParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let unit = |r: &Ratio<u64>| *r.numer() > 0 && r.numer() < r.denom();
        if !unit(&self.alpha) || !unit(&self.eta_target) {
            return Err(Error::Precondition(
                "alpha and eta_target must lie in (0, 1)".into(),
            ));
        }
        if !(self.c_init > 0.0) || !(self.c_growth > 1.0) || !(self.c_cap >= 1.0) {
            return Err(Error::Precondition(
                "need c_init > 0, c_growth > 1, c_cap ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

/// One cube of the family with its disjoint major subset `E_Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub cube: HalfCube,
    /// `E_Q` as runs `(first cell, count)` of increasing flat indices.
    pub e_runs: Vec<(usize, usize)>,
    /// Threshold of the stopping step; `None` for leaves.
    pub c_used: Option<f64>,
}

impl SparseEntry {
    pub fn e_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.e_runs.iter().flat_map(|&(s, n)| s..s + n)
    }

    pub fn e_count(&self) -> usize {
        self.e_runs.iter().map(|r| r.1).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseFamily {
    pub window: Window,
    pub params: SparseParams,
    pub entries: Vec<SparseEntry>,
}

impl SparseFamily {
    pub fn cubes(&self) -> Vec<HalfCube> {
        self.entries.iter().map(|e| e.cube.clone()).collect()
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Output of one stopping step.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalStep {
    pub r_list: Vec<HalfCube>,
    pub qj_list: Vec<HalfCube>,
    /// Sorted cells of `E_Q = Q \ (⋃ R_i ∪ ⋃ Q_j)`.
    pub e_q: Vec<usize>,
    pub c_used: f64,
}

fn runs(cells: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &c in cells {
        match out.last_mut() {
            Some((s, n)) if *s + *n == c => *n += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

fn clip(lo: &[i64], hi: &[i64], w: &Window) -> Vec<Range<usize>> {
    let n = w.per_axis() as i64;
    lo.iter()
        .zip(hi)
        .map(|(&a, &b)| a.clamp(0, n) as usize..b.clamp(0, n) as usize)
        .collect()
}

fn cells_of(w: &Window, ranges: &[Range<usize>]) -> Vec<usize> {
    let mut out = Vec::new();
    for_each_multi(ranges, |m| out.push(w.flat(m)));
    out
}

/// Dense addressing of cells inside a product of ranges.
struct Block {
    ranges: Vec<Range<usize>>,
}

impl Block {
    fn len(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).product()
    }

    fn local(&self, w: &Window, flat: usize) -> usize {
        w.multi(flat)
            .iter()
            .zip(&self.ranges)
            .fold(0, |acc, (&m, r)| acc * r.len() + (m - r.start))
    }
}

fn check_step_input(k: &KernelSpec, w: &Window, q: &HalfCube) -> Result<Vec<Range<usize>>, Error> {
    if k.sign != CausalSign::Minus {
        return Err(Error::Precondition(
            "the stopping step needs a downward kernel".into(),
        ));
    }
    if q.level() >= w.cell_level() {
        return Err(Error::Precondition(format!(
            "{q:?} is not above cell resolution"
        )));
    }
    w.cube_ranges(q)
        .ok_or_else(|| Error::Precondition(format!("{q:?} is not a cube of the window")))
}

/// Stopping cubes: maximal dyadic subcubes `Q'` of the upper children with
/// `|Q' ∩ E| > α|Q'|`, searched top-down.
fn stopping_cubes(
    w: &Window,
    uppers: &[HalfCube],
    block: &Block,
    in_e: &[bool],
    alpha: Ratio<u64>,
) -> Vec<HalfCube> {
    let mut out = Vec::new();
    let mut stack: Vec<HalfCube> = uppers.iter().rev().cloned().collect();
    let (num, den) = (*alpha.numer() as u128, *alpha.denom() as u128);
    while let Some(c) = stack.pop() {
        let cells = w.cube_cells(&c).expect("subcubes of a window cube");
        let hits = cells.iter().filter(|&&x| in_e[block.local(w, x)]).count() as u128;
        if hits == 0 {
            continue;
        }
        if hits * den > num * cells.len() as u128 {
            out.push(c);
        } else if c.level() < w.cell_level() {
            stack.extend(c.children().into_iter().rev());
        }
    }
    out
}

/// The stopping step on `Q` for `f` cut to `3Q`.
pub fn local_step(
    k: &KernelSpec,
    f: &GridFunction,
    q: &HalfCube,
    p: &SparseParams,
) -> Result<LocalStep, Error> {
    p.validate()?;
    let w = f.window();
    let q_ranges = check_step_input(k, w, q)?;
    let len = q_ranges[0].len() as i64;
    let (tlo, thi) = triple_of(&q_ranges);
    // Q^T = (a + ℓ/2, a + 2ℓ) × 3Q.
    let mut top_lo = tlo.clone();
    top_lo[0] = q_ranges[0].start as i64 + len / 2;
    let mut top_hi = thi.clone();
    top_hi[0] = q_ranges[0].start as i64 + 2 * len;
    let top_cells = cells_of(w, &clip(&top_lo, &top_hi, w));
    let f_top = Sources::from_cells(f, top_cells.iter().copied());
    let top_vol = region(q, RegionKind::T, None)?.volume().to_f64();
    let top_mass: f64 = top_cells.iter().map(|&c| f.get(c).norm()).sum::<f64>() * w.cell_volume();
    let avg = top_mass / top_vol;

    let mut upper_ranges = q_ranges.clone();
    upper_ranges[0] = q_ranges[0].start + len as usize / 2..q_ranges[0].end;
    let block = Block {
        ranges: upper_ranges,
    };
    let upper_cells = cells_of(w, &block.ranges);
    let uppers = q.upper_children();
    let r_list = q.lower_children();

    let mut in_e = vec![false; block.len()];
    let mut c = p.c_init;
    let mut qj_list = Vec::new();
    if avg > 0.0 {
        let direct = apply_causal_cells(k, &f_top, w, &upper_cells, &p.pv)?;
        let maximal = maximal_on_uppers(k, w, &f_top, &uppers, &block, &direct, &p.pv)?;
        let v: Vec<f64> = direct
            .iter()
            .zip(&maximal)
            .map(|(s, m)| s.norm().max(*m))
            .collect();
        let q_cells = (len as u128).pow(w.axes() as u32);
        let r_cells = q_cells / 2;
        let (en, ed) = (*p.eta_target.numer() as u128, *p.eta_target.denom() as u128);
        loop {
            for (slot, &val) in in_e.iter_mut().zip(&v) {
                *slot = val > c * avg;
            }
            qj_list = stopping_cubes(w, &uppers, &block, &in_e, p.alpha);
            let qj_cells: u128 = qj_list
                .iter()
                .map(|c| w.cube_cells(c).map_or(0, |v| v.len()) as u128)
                .sum();
            if (r_cells + qj_cells) * ed <= (ed - en) * q_cells {
                break;
            }
            c *= p.c_growth;
            if c > p.c_cap * p.c_init {
                return Err(Error::ThresholdDiverged {
                    c,
                    cube: format!("{q:?}"),
                });
            }
        }
    }
    let mut taken = vec![false; block.len()];
    for qj in &qj_list {
        for x in w.cube_cells(qj).expect("subcubes of a window cube") {
            taken[block.local(w, x)] = true;
        }
    }
    let e_q: Vec<usize> = upper_cells
        .iter()
        .copied()
        .filter(|&x| !taken[block.local(w, x)])
        .collect();
    Ok(LocalStep {
        r_list,
        qj_list,
        e_q,
        c_used: c,
    })
}

/// `M_{S^−} f^T` on the upper cells: the max over dyadic `Q' ∋ x̄` below the
/// upper children of `max_{Q'} |S^−(1_{(3Q')^c} f^T)|`, by subtracting the
/// `3Q'` part from the full field.
fn maximal_on_uppers(
    k: &KernelSpec,
    w: &Window,
    f_top: &Sources,
    uppers: &[HalfCube],
    block: &Block,
    direct: &[Complex64],
    pv: &PvParams,
) -> Result<Vec<f64>, Error> {
    let mut out = vec![0.0; block.len()];
    let mut stack: Vec<(HalfCube, f64)> = uppers.iter().map(|c| (c.clone(), 0.0)).collect();
    while let Some((c, above)) = stack.pop() {
        let ranges = w.cube_ranges(&c).expect("subcubes of a window cube");
        let cells = cells_of(w, &ranges);
        let (lo, hi) = triple_of(&ranges);
        let near = f_top.filter_ranges(&lo, &hi, true);
        let inner = if near.is_empty() {
            vec![Complex64::new(0.0, 0.0); cells.len()]
        } else {
            apply_causal_cells(k, &near, w, &cells, pv)?
        };
        let v = cells
            .iter()
            .zip(&inner)
            .map(|(&x, s)| (direct[block.local(w, x)] - s).norm())
            .fold(0.0, f64::max);
        let best = above.max(v);
        if c.level() < w.cell_level() {
            stack.extend(c.children().into_iter().map(|ch| (ch, best)));
        } else {
            out[block.local(w, cells[0])] = best;
        }
    }
    Ok(out)
}

/// The sparse family of `f`: the covering of the window by the support cube
/// and the siblings of its ancestors, refined by stopping steps.
pub fn build(k: &KernelSpec, f: &GridFunction, p: &SparseParams) -> Result<SparseFamily, Error> {
    p.validate()?;
    let w = f.window();
    if k.point_dim() != w.axes() {
        return Err(Error::Precondition(
            "kernel and window dimensions differ".into(),
        ));
    }
    let root = w.root_cube();
    let support = f.support_cube().unwrap_or_else(|| root.clone());
    let cover = covering_family(&support, (support.level() - root.level()) as u32);
    let abs = f.abs();
    let mut entries = Vec::new();
    let mut stack: Vec<(HalfCube, u32)> = cover.into_iter().rev().map(|c| (c, 0)).collect();
    while let Some((q, depth)) = stack.pop() {
        let ranges = w.cube_ranges(&q).expect("family cubes lie in the window");
        let all = || runs(&cells_of(w, &ranges));
        if q.level() >= w.cell_level() {
            entries.push(SparseEntry {
                cube: q,
                e_runs: all(),
                c_used: None,
            });
            continue;
        }
        let (lo, hi) = triple_of(&ranges);
        let mass: f64 = cells_of(w, &clip(&lo, &hi, w))
            .iter()
            .map(|&c| abs[c])
            .sum();
        if mass == 0.0 || depth >= p.max_depth {
            entries.push(SparseEntry {
                cube: q,
                e_runs: all(),
                c_used: None,
            });
            continue;
        }
        let step = local_step(k, f, &q, p)?;
        entries.push(SparseEntry {
            cube: q,
            e_runs: runs(&step.e_q),
            c_used: Some(step.c_used),
        });
        for c in step.r_list.into_iter().chain(step.qj_list).rev() {
            stack.push((c, depth + 1));
        }
    }
    Ok(SparseFamily {
        window: w.clone(),
        params: p.clone(),
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub entries: usize,
    /// `min |E_Q| / |Q|` as exact cell counts.
    pub worst_ratio: Ratio<u64>,
    pub violations: Vec<String>,
}

impl SparsityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SparsityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} cubes, worst |E_Q|/|Q| = {}, {} violations",
            self.entries,
            self.worst_ratio,
            self.violations.len()
        )
    }
}

/// Checks `E_Q ⊆ Q`, pairwise disjointness and `|E_Q| ≥ η|Q|` exactly.
pub fn verify_sparsity(fam: &SparseFamily) -> SparsityReport {
    let w = &fam.window;
    let eta = fam.params.eta_target;
    let mut owner: Vec<Option<usize>> = vec![None; w.num_cells()];
    let mut worst = Ratio::new(1u64, 1);
    let mut violations = Vec::new();
    for (i, e) in fam.entries.iter().enumerate() {
        let Some(ranges) = w.cube_ranges(&e.cube) else {
            violations.push(format!("entry {i}: cube outside the window"));
            continue;
        };
        let q_cells: u64 = ranges.iter().map(|r| r.len() as u64).product();
        for x in e.e_cells() {
            if x >= w.num_cells() {
                violations.push(format!("entry {i}: cell {x} outside the window"));
                continue;
            }
            let m = w.multi(x);
            if !m.iter().zip(&ranges).all(|(v, r)| r.contains(v)) {
                violations.push(format!("entry {i}: cell {x} outside its cube"));
            }
            if let Some(j) = owner[x].replace(i) {
                violations.push(format!("entries {j} and {i} share cell {x}"));
            }
        }
        let r = Ratio::new(e.e_count() as u64, q_cells);
        if r < eta {
            violations.push(format!("entry {i}: |E_Q|/|Q| = {r} < {eta}"));
        }
        worst = worst.min(r);
    }
    SparsityReport {
        entries: fam.entries.len(),
        worst_ratio: worst,
        violations,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub max_ratio: f64,
    pub argmax: Option<usize>,
    /// Cells with `S^− f ≠ 0` where the sparse operator vanishes.
    pub violations: Vec<usize>,
}

/// `max |S^− f(x̄)| / Σ_{Q ∋ x̄} ave∫_{R(Q, x̄)} |f|` over sample cells.
pub fn domination_ratio(
    k: &KernelSpec,
    f: &GridFunction,
    fam: &SparseFamily,
    samples: &[usize],
    kind: SparseKind,
) -> Result<DominationReport, Error> {
    let w = f.window();
    let s = apply_causal_cells(k, &Sources::from_grid(f), w, samples, &fam.params.pv)?;
    let op = SparseOperator::new(f, kind);
    let cubes = fam.cubes();
    let mut report = DominationReport {
        max_ratio: 0.0,
        argmax: None,
        violations: Vec::new(),
    };
    for (&cell, v) in samples.iter().zip(&s) {
        let num = v.norm();
        let den = op.eval(&cubes, &w.cell_center_exact(cell))?;
        if num == 0.0 {
            continue;
        }
        if den == 0.0 {
            report.violations.push(cell);
            continue;
        }
        if num / den > report.max_ratio {
            report.max_ratio = num / den;
            report.argmax = Some(cell);
        }
    }
    Ok(report)
}
