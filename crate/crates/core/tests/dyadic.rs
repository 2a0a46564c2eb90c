//! Exact geometry against independent definitions: rational arithmetic as
//! the oracle for `Dyadic`, and membership predicates written from the region
//! formulas for `RegionSet`.

use czlab::dyadic::{covering_family, region, DyadicBox};
use czlab::{BoundaryCube, Dyadic, DyadicPoint, HalfCube, RegionKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(num: i64, shift: u32) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(1u64) << shift)
}

fn half_cube(level: i32, offsets: Vec<i64>, time: i64) -> HalfCube {
    HalfCube::new(BoundaryCube::new(level, offsets).unwrap(), time).unwrap()
}

/// Membership in a region of kind `kind` from its definition, for a point
/// strictly inside the quadrant `t > 0, x ≥ 0`.
fn oracle_contains(c: &HalfCube, kind: RegionKind, at: &[f64], p: &[f64]) -> bool {
    let l = c.side().to_f64();
    let a = c.t_lo().to_f64();
    let lo: Vec<f64> = (0..c.dim()).map(|i| c.base().lo(i).to_f64()).collect();
    // Axis-wise membership in the spatial cube dilated by `factor` about its center.
    let in_dilate = |factor: f64| {
        lo.iter()
            .zip(&p[1..])
            .all(|(&q, &x)| (x - (q + l / 2.0)).abs() < factor * l / 2.0)
    };
    let t = p[0];
    let in_t = |s0: f64, s1: f64| t > s0 && t < s1;
    let lower = in_t(a, a + l / 2.0) && in_dilate(1.0);
    let sqcap = in_t(a, a + 2.0 * l) && in_dilate(3.0) && !lower;
    let cut = (a + l / 2.0).min(at.first().copied().unwrap_or(f64::INFINITY));
    match kind {
        RegionKind::Upper => in_t(a + l / 2.0, a + l) && in_dilate(1.0),
        RegionKind::Lower => lower,
        RegionKind::T => in_t(a + l / 2.0, a + 2.0 * l) && in_dilate(3.0),
        RegionKind::L => in_t(a, a + l / 2.0) && in_dilate(3.0),
        RegionKind::Sqcap => sqcap,
        RegionKind::SqcapAt => sqcap && t > cut,
        RegionKind::Box => in_t(a, a + 2.0 * l) && in_dilate(3.0),
        RegionKind::BoxAt => in_t(cut, a + 2.0 * l) && in_dilate(3.0),
        RegionKind::Carleson => in_t(0.0, l) && in_dilate(1.0),
        RegionKind::Whitney => in_t(l / 2.0, l) && in_dilate(1.0),
        RegionKind::TildeW => in_t(l / 2.0, 1.5 * l) && in_dilate(2.0),
        RegionKind::Enlarge3 => in_t(a - l, a + 2.0 * l) && in_dilate(3.0),
    }
}

const KINDS: [RegionKind; 12] = [
    RegionKind::Upper,
    RegionKind::Lower,
    RegionKind::T,
    RegionKind::L,
    RegionKind::Sqcap,
    RegionKind::SqcapAt,
    RegionKind::Box,
    RegionKind::BoxAt,
    RegionKind::Carleson,
    RegionKind::Whitney,
    RegionKind::TildeW,
    RegionKind::Enlarge3,
];

/// A point with odd numerators over `2^8`, so never on a boundary of a cube
/// of level at least `-3`.
fn odd_point(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec((0i64..1024).prop_map(|k| 2 * k + 1), n + 1)
}

fn to_point(nums: &[i64]) -> DyadicPoint {
    DyadicPoint::new(nums.iter().map(|&k| Dyadic::new(k as i128, 8)).collect())
}

/// The point of `c` at relative position `fractions / 2^11` per axis.
fn point_in(c: &HalfCube, fractions: &[i64]) -> DyadicPoint {
    let coords = fractions
        .iter()
        .enumerate()
        .map(|(i, &k)| c.lo(i) + c.side() * Dyadic::new(k as i128, 11))
        .collect();
    DyadicPoint::new(coords)
}

proptest! {
    #[test]
    fn dyadic_arithmetic_matches_rationals(a in -1_000_000i64..1_000_000, sa in 0u32..20, b in -1_000_000i64..1_000_000, sb in 0u32..20) {
        let (x, y) = (Dyadic::new(a as i128, sa), Dyadic::new(b as i128, sb));
        let (rx, ry) = (rat(a, sa), rat(b, sb));
        prop_assert_eq!((x + y).to_rational(), &rx + &ry);
        prop_assert_eq!((x - y).to_rational(), &rx - &ry);
        prop_assert_eq!((x * y).to_rational(), &rx * &ry);
        prop_assert_eq!(x < y, rx < ry);
        prop_assert_eq!(x == y, rx == ry);
    }

    #[test]
    fn children_tile_the_parent(level in -2i32..4, off in 0i64..6, time in 0i64..4) {
        let c = half_cube(level, vec![off], time);
        let kids = c.children();
        prop_assert_eq!(kids.len(), 4);
        let total: Dyadic = kids.iter().map(|k| k.volume()).sum();
        prop_assert_eq!(total, c.volume());
        for k in &kids {
            prop_assert!(c.contains(k));
            prop_assert_eq!(k.parent(), c.clone());
        }
        for (i, p) in kids.iter().enumerate() {
            for q in &kids[i + 1..] {
                prop_assert!(DyadicBox::of_cube(p).intersect(&DyadicBox::of_cube(q)).is_empty());
            }
        }
    }

    #[test]
    fn regions_match_their_definitions(level in -1i32..3, off in 0i64..5, time in 0i64..3, at in odd_point(1), p in odd_point(1)) {
        let c = half_cube(level, vec![off], time);
        let at = point_in(&c, &at);
        let p = to_point(&p);
        let (atf, pf) = (at.to_f64(), p.to_f64());
        for kind in KINDS {
            let r = region(&c, kind, kind.needs_point().then_some(&at)).unwrap();
            let want = oracle_contains(&c, kind, if kind.needs_point() { &atf } else { &[] }, &pf);
            prop_assert_eq!(r.contains_point(&p.coords), want, "{:?} at {:?}", kind, pf);
        }
    }

    #[test]
    fn causal_regions_never_touch_the_bottom_face(level in -1i32..3, off in 0i64..5, time in 0i64..3, at in odd_point(1)) {
        let c = half_cube(level, vec![off], time);
        let at = point_in(&c, &at);
        let mid = c.t_lo() + c.side().half();
        for kind in [RegionKind::SqcapAt, RegionKind::BoxAt] {
            let r = region(&c, kind, Some(&at)).unwrap();
            // Every piece sits on or above min(a + ℓ/2, t) > a.
            for b in r.boxes() {
                prop_assert!(b.lo[0] >= mid.min(at.t()));
                prop_assert!(b.lo[0] > c.t_lo() || c.t_lo() == Dyadic::ZERO && b.lo[0] > Dyadic::ZERO);
            }
        }
    }

    #[test]
    fn covering_family_tiles_the_ancestor(level in 1i32..5, off in 0i64..16, time in 0i64..16, levels in 0u32..4) {
        let side = 1i64 << level;
        let s = half_cube(level, vec![off % side], time % side);
        let levels = levels.min(level as u32);
        let fam = covering_family(&s, levels);
        let top = s.ancestor_at(level - levels as i32).unwrap();
        let total: Dyadic = fam.iter().map(|c| c.volume()).sum();
        prop_assert_eq!(total, top.volume());
        let support = DyadicBox::of_cube(&s);
        for r in &fam {
            prop_assert!(top.contains(r));
            let triple = region(r, RegionKind::Enlarge3, None).unwrap();
            prop_assert_eq!(triple.intersect_box(&support).volume(), support.volume());
        }
        for (i, p) in fam.iter().enumerate() {
            for q in &fam[i + 1..] {
                prop_assert!(DyadicBox::of_cube(p).intersect(&DyadicBox::of_cube(q)).is_empty());
            }
        }
    }
}

#[test]
fn unclipped_volumes_are_exact() {
    // Q = (2, 3) × (1, 2): nothing is clipped.
    let c = half_cube(0, vec![1], 2);
    let vol = |k| region(&c, k, None).unwrap().volume();
    assert_eq!(
        vol(RegionKind::Sqcap),
        Dyadic::from_int(6) - Dyadic::new(1, 1)
    );
    assert_eq!(vol(RegionKind::Box), Dyadic::from_int(6));
    assert_eq!(vol(RegionKind::T), Dyadic::new(9, 1));
    assert_eq!(vol(RegionKind::Enlarge3), Dyadic::from_int(9));
    assert_eq!(vol(RegionKind::Whitney), Dyadic::new(1, 1));
    assert_eq!(vol(RegionKind::TildeW), Dyadic::from_int(2));
}

#[test]
fn regions_are_clipped_to_the_quadrant() {
    // Q = (0, 1) × (0, 1): 3Q loses its left third and the time axis starts at 0.
    let c = half_cube(0, vec![0], 0);
    assert_eq!(
        region(&c, RegionKind::Enlarge3, None).unwrap().volume(),
        Dyadic::from_int(4)
    );
    assert_eq!(
        region(&c, RegionKind::Box, None).unwrap().volume(),
        Dyadic::from_int(4)
    );
}

#[test]
fn pointwise_kinds_need_a_point() {
    let c = half_cube(0, vec![0], 0);
    assert!(region(&c, RegionKind::SqcapAt, None).is_err());
    assert!(region(&c, RegionKind::BoxAt, None).is_err());
}
