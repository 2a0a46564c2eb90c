use serde::{Deserialize, Serialize};

use super::{BoundaryCube, Dyadic, DyadicPoint, GeometryError, HalfCube};

/// An open axis-aligned box `Π_i (lo_i, hi_i)` with dyadic corners, in
/// `(t, x_1, .., x_n)` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicBox {
    pub lo: Vec<Dyadic>,
    pub hi: Vec<Dyadic>,
}

impl DyadicBox {
    pub fn new(lo: Vec<Dyadic>, hi: Vec<Dyadic>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        DyadicBox { lo, hi }
    }

    pub fn of_cube(c: &HalfCube) -> Self {
        let d = c.dim() + 1;
        DyadicBox {
            lo: (0..d).map(|i| c.lo(i)).collect(),
            hi: (0..d).map(|i| c.hi(i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l >= h)
    }

    pub fn volume(&self) -> Dyadic {
        if self.is_empty() {
            return Dyadic::ZERO;
        }
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(Dyadic::ONE, |v, (l, h)| v * (*h - *l))
    }

    pub fn intersect(&self, other: &DyadicBox) -> DyadicBox {
        DyadicBox {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| Dyadic::max(*a, *b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| Dyadic::min(*a, *b))
                .collect(),
        }
    }

    pub fn contains_point(&self, p: &[Dyadic]) -> bool {
        p.len() == self.dim() && (0..self.dim()).all(|i| self.lo[i] < p[i] && p[i] < self.hi[i])
    }

    pub fn contains_box(&self, other: &DyadicBox) -> bool {
        other.is_empty()
            || (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// `self \ cut` as at most `2·dim` disjoint boxes.
    pub fn subtract(&self, cut: &DyadicBox) -> Vec<DyadicBox> {
        let inter = self.intersect(cut);
        if inter.is_empty() {
            return if self.is_empty() {
                vec![]
            } else {
                vec![self.clone()]
            };
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        for i in 0..self.dim() {
            if rest.lo[i] < inter.lo[i] {
                let mut b = rest.clone();
                b.hi[i] = inter.lo[i];
                out.push(b);
            }
            if inter.hi[i] < rest.hi[i] {
                let mut b = rest.clone();
                b.lo[i] = inter.hi[i];
                out.push(b);
            }
            rest.lo[i] = inter.lo[i];
            rest.hi[i] = inter.hi[i];
        }
        out
    }

    pub fn to_f64(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.lo.iter().map(|v| v.to_f64()).collect(),
            self.hi.iter().map(|v| v.to_f64()).collect(),
        )
    }
}

/// A finite disjoint union of open boxes in a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSet {
    dim: usize,
    boxes: Vec<DyadicBox>,
}

impl RegionSet {
    pub fn empty(dim: usize) -> Self {
        RegionSet { dim, boxes: vec![] }
    }

    pub fn from_box(b: DyadicBox) -> Self {
        let dim = b.dim();
        let boxes = if b.is_empty() { vec![] } else { vec![b] };
        RegionSet { dim, boxes }
    }

    /// Builds a set from boxes assumed pairwise disjoint.
    ///
    /// Disjointness is checked in debug builds.
    pub fn from_disjoint(dim: usize, boxes: Vec<DyadicBox>) -> Self {
        let boxes: Vec<DyadicBox> = boxes.into_iter().filter(|b| !b.is_empty()).collect();
        debug_assert!(boxes.iter().all(|b| b.dim() == dim));
        debug_assert!(boxes
            .iter()
            .enumerate()
            .all(|(i, a)| boxes[i + 1..].iter().all(|b| a.intersect(b).is_empty())));
        RegionSet { dim, boxes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[DyadicBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn volume(&self) -> Dyadic {
        self.boxes.iter().map(|b| b.volume()).sum()
    }

    pub fn subtract_box(&self, cut: &DyadicBox) -> Self {
        RegionSet {
            dim: self.dim,
            boxes: self.boxes.iter().flat_map(|b| b.subtract(cut)).collect(),
        }
    }

    pub fn subtract(&self, other: &RegionSet) -> Self {
        other
            .boxes
            .iter()
            .fold(self.clone(), |acc, b| acc.subtract_box(b))
    }

    pub fn intersect_box(&self, b: &DyadicBox) -> Self {
        RegionSet {
            dim: self.dim,
            boxes: self
                .boxes
                .iter()
                .map(|a| a.intersect(b))
                .filter(|a| !a.is_empty())
                .collect(),
        }
    }

    /// Union with a set disjoint from `self`.
    pub fn union_disjoint(mut self, other: RegionSet) -> Self {
        self.boxes.extend(other.boxes);
        self
    }

    pub fn contains_point(&self, p: &[Dyadic]) -> bool {
        self.boxes.iter().any(|b| b.contains_point(p))
    }

    /// Tight bounding box, or `None` when empty.
    pub fn bounding_box(&self) -> Option<DyadicBox> {
        let first = self.boxes.first()?;
        let mut bb = first.clone();
        for b in &self.boxes[1..] {
            for i in 0..self.dim {
                bb.lo[i] = bb.lo[i].min(b.lo[i]);
                bb.hi[i] = bb.hi[i].max(b.hi[i]);
            }
        }
        Some(bb)
    }
}

/// The regions attached to a [`HalfCube`] `Q = (a, a+ℓ) × Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegionKind {
    /// `(a+ℓ/2, a+ℓ) × Q`.
    Upper,
    /// `(a, a+ℓ/2) × Q`.
    Lower,
    /// `(a+ℓ/2, a+2ℓ) × 3Q`.
    T,
    /// `(a, a+ℓ/2) × 3Q`.
    L,
    /// `((a, a+2ℓ) × 3Q) \ Q^l`.
    Sqcap,
    /// `Sqcap ∩ {s > min(a+ℓ/2, t)}` for the point `(t, x)`.
    SqcapAt,
    /// `(a, a+2ℓ) × 3Q`.
    Box,
    /// `(min(a+ℓ/2, t), a+2ℓ) × 3Q` for the point `(t, x)`.
    BoxAt,
    /// The Carleson box `(0, ℓ) × Q` of the base.
    Carleson,
    /// The Whitney region `(ℓ/2, ℓ) × Q` of the base.
    Whitney,
    /// The enlarged Whitney region `(ℓ/2, 3ℓ/2) × 2Q` of the base.
    TildeW,
    /// `3Q` in `R^{1+n}`.
    Enlarge3,
}

impl RegionKind {
    pub fn needs_point(self) -> bool {
        matches!(self, RegionKind::SqcapAt | RegionKind::BoxAt)
    }
}

/// `(lo, hi)` of the axis-`i` interval of `cQ` for a boundary cube, clipped to
/// `x_i ≥ 0`; `c` is an odd positive integer.
fn scaled_axis(q: &BoundaryCube, i: usize, c: i64) -> (Dyadic, Dyadic) {
    let l = q.side();
    let pad = l * ((c - 1) / 2);
    ((q.lo(i) - pad).max(Dyadic::ZERO), q.hi(i) + pad)
}

/// `2Q` about the center of `Q`, clipped to `x_i ≥ 0`.
fn doubled_axis(q: &BoundaryCube, i: usize) -> (Dyadic, Dyadic) {
    let pad = q.side().half();
    ((q.lo(i) - pad).max(Dyadic::ZERO), q.hi(i) + pad)
}

fn slab(t: (Dyadic, Dyadic), xs: impl Iterator<Item = (Dyadic, Dyadic)>) -> DyadicBox {
    let (mut lo, mut hi) = (vec![t.0.max(Dyadic::ZERO)], vec![t.1]);
    for (a, b) in xs {
        lo.push(a);
        hi.push(b);
    }
    DyadicBox::new(lo, hi)
}

/// The region of kind `kind` attached to `c`.
///
/// Every region is clipped to the open quadrant `t > 0, x ≥ 0`.
pub fn region(
    c: &HalfCube,
    kind: RegionKind,
    at: Option<&DyadicPoint>,
) -> Result<RegionSet, GeometryError> {
    let n = c.dim();
    let q = c.base();
    let a = c.t_lo();
    let l = c.side();
    let mid = a + l.half();
    let own = || (0..n).map(|i| (q.lo(i), q.hi(i)));
    let triple = || (0..n).map(|i| scaled_axis(q, i, 3));
    let t_cut = || -> Result<Dyadic, GeometryError> {
        let p = at.ok_or(GeometryError::MissingPoint)?;
        if !c.contains_point(p) {
            return Err(GeometryError::PointOutside);
        }
        Ok(mid.min(p.t()))
    };
    let lower = || slab((a, mid), own());
    let set = match kind {
        RegionKind::Upper => RegionSet::from_box(slab((mid, a + l), own())),
        RegionKind::Lower => RegionSet::from_box(lower()),
        RegionKind::T => RegionSet::from_box(slab((mid, a + l * 2), triple())),
        RegionKind::L => RegionSet::from_box(slab((a, mid), triple())),
        RegionKind::Sqcap => {
            RegionSet::from_box(slab((a, a + l * 2), triple())).subtract_box(&lower())
        }
        RegionKind::SqcapAt => {
            let s = t_cut()?;
            RegionSet::from_box(slab((s, a + l * 2), triple())).subtract_box(&lower())
        }
        RegionKind::Box => RegionSet::from_box(slab((a, a + l * 2), triple())),
        RegionKind::BoxAt => RegionSet::from_box(slab((t_cut()?, a + l * 2), triple())),
        RegionKind::Carleson => RegionSet::from_box(slab((Dyadic::ZERO, l), own())),
        RegionKind::Whitney => RegionSet::from_box(slab((l.half(), l), own())),
        RegionKind::TildeW => RegionSet::from_box(slab(
            (l.half(), l + l.half()),
            (0..n).map(|i| doubled_axis(q, i)),
        )),
        RegionKind::Enlarge3 => RegionSet::from_box(slab((a - l, a + l * 2), triple())),
    };
    Ok(set)
}
