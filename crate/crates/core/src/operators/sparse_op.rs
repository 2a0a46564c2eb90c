use serde::{Deserialize, Serialize};

use crate::dyadic::{region, DyadicPoint, HalfCube, RegionKind, RegionSet};
use crate::grid::{GridFunction, SummedVolume};
use crate::Error;

/// Averaging region attached to each cube of a sparse operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SparseKind {
    SqcapAt,
    BoxAt,
    /// The Carleson box of the base, or its clipped `3Q`; see
    /// [`SparseOperator::with_box_normalization`].
    Carleson3Q,
}

/// `x̄ ↦ Σ_{Q ∋ x̄} ave∫_{R(Q, x̄)} |f|` with `|f|` held in a summed-volume table.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    table: SummedVolume,
    kind: SparseKind,
    box_normalization: bool,
}

impl SparseOperator {
    pub fn new(f: &GridFunction, kind: SparseKind) -> Self {
        SparseOperator {
            table: SummedVolume::new(f.window(), &f.abs()),
            kind,
            box_normalization: true,
        }
    }

    /// For [`SparseKind::Carleson3Q`]: average over the Carleson box itself
    /// (`true`, the default) or over its clipped `3Q`.
    pub fn with_box_normalization(mut self, on: bool) -> Self {
        self.box_normalization = on;
        self
    }

    pub fn region(&self, q: &HalfCube, x: &DyadicPoint) -> Result<RegionSet, Error> {
        let r = match self.kind {
            SparseKind::SqcapAt => region(q, RegionKind::SqcapAt, Some(x))?,
            SparseKind::BoxAt => region(q, RegionKind::BoxAt, Some(x))?,
            SparseKind::Carleson3Q => {
                let c = HalfCube::carleson(q.base().clone());
                if self.box_normalization {
                    region(&c, RegionKind::Carleson, None)?
                } else {
                    region(&c, RegionKind::Enlarge3, None)?
                }
            }
        };
        Ok(r)
    }

    /// `ave∫_{R(Q, x̄)} |f|` for one cube containing `x̄`.
    pub fn term(&self, q: &HalfCube, x: &DyadicPoint) -> Result<f64, Error> {
        let r = self.region(q, x)?;
        let vol = r.volume().to_f64();
        if vol == 0.0 {
            return Err(Error::DegenerateRegion);
        }
        let mass: f64 = r.boxes().iter().map(|b| self.table.integrate_box(b)).sum();
        Ok(mass / vol)
    }

    pub fn eval(&self, cubes: &[HalfCube], x: &DyadicPoint) -> Result<f64, Error> {
        let mut acc = 0.0;
        for q in cubes.iter().filter(|q| q.contains_point(x)) {
            acc += self.term(q, x)?;
        }
        Ok(acc)
    }

    /// The operator at every cell center, accumulated cube by cube.
    pub fn eval_cells(&self, cubes: &[HalfCube]) -> Result<Vec<f64>, Error> {
        let w = self.table.window();
        let mut out = vec![0.0; w.num_cells()];
        for q in cubes {
            let cells = w
                .cube_cells(q)
                .ok_or_else(|| Error::Precondition(format!("{q:?} is not a window cube")))?;
            for c in cells {
                out[c] += self.term(q, &w.cell_center_exact(c))?;
            }
        }
        Ok(out)
    }
}

/// `Σ_{Q ∋ x̄} ave∫_{R(Q, x̄)} |f|` over `cubes`.
pub fn sparse_apply(
    cubes: &[HalfCube],
    f: &GridFunction,
    x: &DyadicPoint,
    kind: SparseKind,
) -> Result<f64, Error> {
    SparseOperator::new(f, kind).eval(cubes, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{BoundaryCube, Dyadic};
    use crate::grid::Window;
    use num_complex::Complex64;

    #[test]
    fn empty_family_is_zero() {
        let w = Window::unit(1, 3);
        let f = GridFunction::constant(w.clone(), Complex64::new(1.0, 0.0));
        let x = w.cell_center_exact(5);
        assert_eq!(sparse_apply(&[], &f, &x, SparseKind::SqcapAt).unwrap(), 0.0);
    }

    #[test]
    fn one_dimensional_right_neighbourhood() {
        // Window (0, 8), cube (0, 1) and a point above its midpoint: the
        // region is (1/2, 2).
        let w = crate::grid::Window::new(BoundaryCube::origin(-3, 0), 6).unwrap();
        let f = GridFunction::from_callable(w, 1, |p| {
            Complex64::new(if p[0] > 1.0 && p[0] < 2.0 { 3.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let q = HalfCube::new(BoundaryCube::origin(0, 0), 0).unwrap();
        let x = DyadicPoint::new(vec![Dyadic::new(3, 2)]);
        let v = sparse_apply(&[q], &f, &x, SparseKind::SqcapAt).unwrap();
        assert!((v - 3.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn cellwise_matches_pointwise() {
        let w = Window::unit(1, 3);
        let f =
            GridFunction::from_callable(w.clone(), 1, |p| Complex64::new(p[0] + 2.0 * p[1], 0.0))
                .unwrap();
        let root = w.root_cube();
        let mut cubes = vec![root.clone()];
        cubes.extend(root.children());
        cubes.extend(root.children()[1].children());
        let op = SparseOperator::new(&f, SparseKind::BoxAt);
        let all = op.eval_cells(&cubes).unwrap();
        for (c, v) in all.iter().enumerate() {
            let p = op.eval(&cubes, &w.cell_center_exact(c)).unwrap();
            assert!((v - p).abs() < 1e-13);
        }
    }

    #[test]
    fn cubes_not_containing_the_point_are_ignored() {
        let w = Window::unit(1, 3);
        let f = GridFunction::constant(w.clone(), Complex64::new(1.0, 0.0));
        let far = HalfCube::new(BoundaryCube::new(2, vec![3]).unwrap(), 3).unwrap();
        let x = w.cell_center_exact(0);
        assert_eq!(
            sparse_apply(&[far], &f, &x, SparseKind::BoxAt).unwrap(),
            0.0
        );
    }
}
