use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Dyadic, GeometryError};

/// A dyadic cube `Π_i [k_i 2^{-j}, (k_i + 1) 2^{-j})` in the closed positive
/// quadrant of `R^n`.
///
/// `n = offsets.len()` may be zero, in which case the cube is the single point
/// of `R^0` at every level.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryCube {
    level: i32,
    offsets: Vec<i64>,
}

impl BoundaryCube {
    pub fn new(level: i32, offsets: Vec<i64>) -> Result<Self, GeometryError> {
        if let Some(&k) = offsets.iter().find(|&&k| k < 0) {
            return Err(GeometryError::NegativeOffset(k));
        }
        Ok(BoundaryCube { level, offsets })
    }

    /// The cube `[0, 2^{-level})^n`.
    pub fn origin(level: i32, dim: usize) -> Self {
        BoundaryCube {
            level,
            offsets: vec![0; dim],
        }
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn dim(&self) -> usize {
        self.offsets.len()
    }

    pub fn side(&self) -> Dyadic {
        Dyadic::pow2(-self.level)
    }

    /// n-dimensional measure `ℓ^n`.
    pub fn measure(&self) -> Dyadic {
        Dyadic::pow2(-self.level * self.dim() as i32)
    }

    pub fn lo(&self, axis: usize) -> Dyadic {
        Dyadic::from_int(self.offsets[axis]) * self.side()
    }

    pub fn hi(&self, axis: usize) -> Dyadic {
        Dyadic::from_int(self.offsets[axis] + 1) * self.side()
    }

    pub fn parent(&self) -> Self {
        BoundaryCube {
            level: self.level - 1,
            offsets: self.offsets.iter().map(|k| k >> 1).collect(),
        }
    }

    /// Ancestor (or self) at a coarser or equal level.
    pub fn ancestor_at(&self, level: i32) -> Option<Self> {
        if level > self.level {
            return None;
        }
        let d = (self.level - level) as u32;
        Some(BoundaryCube {
            level,
            offsets: self.offsets.iter().map(|k| k >> d).collect(),
        })
    }

    /// The `2^n` children, ordered by their bit pattern (axis 0 is the high bit).
    pub fn children(&self) -> Vec<Self> {
        let n = self.dim();
        (0..1usize << n)
            .map(|bits| BoundaryCube {
                level: self.level + 1,
                offsets: (0..n)
                    .map(|i| 2 * self.offsets[i] + ((bits >> (n - 1 - i)) & 1) as i64)
                    .collect(),
            })
            .collect()
    }

    pub fn contains(&self, other: &BoundaryCube) -> bool {
        other.dim() == self.dim()
            && other
                .ancestor_at(self.level)
                .is_some_and(|a| a.offsets == self.offsets)
    }

    pub fn contains_point(&self, x: &[Dyadic]) -> bool {
        x.len() == self.dim() && (0..self.dim()).all(|i| self.lo(i) <= x[i] && x[i] < self.hi(i))
    }
}

impl fmt::Debug for BoundaryCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[j={}; {:?}]", self.level, self.offsets)
    }
}

/// A dyadic cube `(k 2^{-j}, (k+1) 2^{-j}) × Q` of the half-space over a
/// [`BoundaryCube`] `Q` of the same level.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfCube {
    base: BoundaryCube,
    time_index: i64,
}

impl HalfCube {
    pub fn new(base: BoundaryCube, time_index: i64) -> Result<Self, GeometryError> {
        if time_index < 0 {
            return Err(GeometryError::NegativeOffset(time_index));
        }
        Ok(HalfCube { base, time_index })
    }

    /// The Carleson cube `(0, ℓ(Q)) × Q`.
    pub fn carleson(base: BoundaryCube) -> Self {
        HalfCube {
            base,
            time_index: 0,
        }
    }

    pub fn base(&self) -> &BoundaryCube {
        &self.base
    }

    pub fn time_index(&self) -> i64 {
        self.time_index
    }

    pub fn level(&self) -> i32 {
        self.base.level
    }

    /// Spatial dimension `n`.
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn side(&self) -> Dyadic {
        self.base.side()
    }

    /// (1+n)-dimensional volume.
    pub fn volume(&self) -> Dyadic {
        Dyadic::pow2(-self.level() * (self.dim() as i32 + 1))
    }

    pub fn is_carleson(&self) -> bool {
        self.time_index == 0
    }

    pub fn t_lo(&self) -> Dyadic {
        Dyadic::from_int(self.time_index) * self.side()
    }

    pub fn t_hi(&self) -> Dyadic {
        Dyadic::from_int(self.time_index + 1) * self.side()
    }

    /// Lower corner in `(t, x_1, .., x_n)` order.
    pub fn lo(&self, axis: usize) -> Dyadic {
        if axis == 0 {
            self.t_lo()
        } else {
            self.base.lo(axis - 1)
        }
    }

    pub fn hi(&self, axis: usize) -> Dyadic {
        if axis == 0 {
            self.t_hi()
        } else {
            self.base.hi(axis - 1)
        }
    }

    pub fn parent(&self) -> Self {
        HalfCube {
            base: self.base.parent(),
            time_index: self.time_index >> 1,
        }
    }

    pub fn ancestor_at(&self, level: i32) -> Option<Self> {
        let base = self.base.ancestor_at(level)?;
        let d = (self.level() - level) as u32;
        Some(HalfCube {
            base,
            time_index: self.time_index >> d,
        })
    }

    /// All `2^{n+1}` children; the time bit is the highest bit so the first
    /// `2^n` entries are the lower-half children.
    pub fn children(&self) -> Vec<Self> {
        let mut out = Vec::with_capacity(2 << self.dim());
        for dt in 0..2 {
            for b in self.base.children() {
                out.push(HalfCube {
                    base: b,
                    time_index: 2 * self.time_index + dt,
                });
            }
        }
        out
    }

    /// The `2^n` children contained in the lower half `Q^l`.
    pub fn lower_children(&self) -> Vec<Self> {
        let mut c = self.children();
        c.truncate(1 << self.dim());
        c
    }

    /// The `2^n` children contained in the upper half `Q^u`.
    pub fn upper_children(&self) -> Vec<Self> {
        self.children().split_off(1 << self.dim())
    }

    pub fn contains(&self, other: &HalfCube) -> bool {
        other.ancestor_at(self.level()).is_some_and(|a| a == *self)
    }

    pub fn contains_point(&self, p: &DyadicPoint) -> bool {
        p.dim() == self.dim() + 1
            && (0..=self.dim()).all(|i| self.lo(i) <= p.coords[i] && p.coords[i] < self.hi(i))
    }

    /// Center in `(t, x)` order.
    pub fn center(&self) -> DyadicPoint {
        DyadicPoint::new(
            (0..=self.dim())
                .map(|i| (self.lo(i) + self.hi(i)).half())
                .collect(),
        )
    }
}

impl fmt::Debug for HalfCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Q[j={}; t={}; {:?}]",
            self.base.level, self.time_index, self.base.offsets
        )
    }
}

/// An exact point `(t, x_1, .., x_n)` of the closed half-space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicPoint {
    pub coords: Vec<Dyadic>,
}

impl DyadicPoint {
    pub fn new(coords: Vec<Dyadic>) -> Self {
        DyadicPoint { coords }
    }

    pub fn t(&self) -> Dyadic {
        self.coords[0]
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64()).collect()
    }
}

/// `Q^1 = support` followed by every sibling of the ancestors
/// `P^1 = Q^1, P^2, .., P^levels`.
///
/// The result tiles `P^{levels+1}` up to null sets and each cube `R` in it
/// satisfies `support ⊂ 3R`.
pub fn covering_family(support: &HalfCube, levels: u32) -> Vec<HalfCube> {
    let mut out = vec![support.clone()];
    let mut p = support.clone();
    for _ in 0..levels {
        let parent = p.parent();
        out.extend(parent.children().into_iter().filter(|c| *c != p));
        p = parent;
    }
    out
}
