//! Grid functions against brute-force cell sums.

use czlab::grid::{read_binary, read_csv, write_binary, write_csv, SummedVolume};
use czlab::{BoundaryCube, GridFunction, HalfCube, Window};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_grid(w: &Window, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..w.num_cells())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::from_values(w.clone(), values).unwrap()
}

/// `∫_B v` by summing each cell's overlap with the box.
fn brute_integral(w: &Window, v: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let h = w.h();
    (0..w.num_cells())
        .map(|c| {
            let ctr = w.cell_center(c);
            let overlap: f64 = (0..w.axes())
                .map(|i| ((ctr[i] + h / 2.0).min(hi[i]) - (ctr[i] - h / 2.0).max(lo[i])).max(0.0))
                .product();
            overlap * v[c]
        })
        .sum()
}

proptest! {
    #[test]
    fn summed_volume_matches_cell_sums(seed in 0u64..1000, n in 0usize..3, corners in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3)) {
        let w = Window::unit(n, 3);
        let f = random_grid(&w, seed);
        let v = f.abs();
        let table = SummedVolume::new(&w, &v);
        let (lo, hi): (Vec<f64>, Vec<f64>) = corners[..w.axes()].iter().map(|&(a, b)| (a.min(b), a.max(b))).unzip();
        let want = brute_integral(&w, &v, &lo, &hi);
        prop_assert!((table.integrate_f64(&lo, &hi) - want).abs() < 1e-12 * (1.0 + want));
    }

    #[test]
    fn cell_of_inverts_cell_center(n in 0usize..3, depth in 1u32..5, pick in 0usize..1 << 12) {
        let w = Window::unit(n, depth);
        let c = pick % w.num_cells();
        prop_assert_eq!(w.cell_of(&w.cell_center(c)), Some(c));
        prop_assert_eq!(w.flat(&w.multi(c)), c);
        prop_assert!(w.cell_cube(c).contains_point(&w.cell_center_exact(c)));
    }
}

#[test]
fn cube_indicators_carry_their_volume() {
    let w = Window::new(BoundaryCube::origin(-1, 1), 4).unwrap();
    let q = HalfCube::new(BoundaryCube::new(1, vec![2]).unwrap(), 1).unwrap();
    let f = GridFunction::from_cubes(w, &[(q.clone(), Complex64::new(3.0, 0.0))]).unwrap();
    assert!((f.l1_norm() - 3.0 * q.volume().to_f64()).abs() < 1e-15);
    assert_eq!(f.support_cube(), Some(q));
}

#[test]
fn unresolved_cubes_are_rejected() {
    let w = Window::unit(1, 2);
    let q = HalfCube::new(BoundaryCube::new(3, vec![0]).unwrap(), 0).unwrap();
    assert!(GridFunction::from_cubes(w, &[(q, Complex64::new(1.0, 0.0))]).is_err());
}

#[test]
fn callable_sampling_averages_each_cell() {
    // The midpoint subgrid of a linear function is exact.
    let w = Window::unit(1, 2);
    let f = GridFunction::from_callable(w.clone(), 3, |p| Complex64::new(p[0] - 2.0 * p[1], 0.0))
        .unwrap();
    for c in 0..w.num_cells() {
        let p = w.cell_center(c);
        assert!((f.get(c).re - (p[0] - 2.0 * p[1])).abs() < 1e-14);
    }
}

#[test]
fn csv_round_trip() {
    let w = Window::new(BoundaryCube::new(1, vec![1]).unwrap(), 3).unwrap();
    let f = random_grid(&w, 5);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write_csv(&f, &mut file).unwrap();
    let back = read_csv(std::fs::File::open(file.path()).unwrap(), None).unwrap();
    assert_eq!(back, f);
    let other = Window::unit(1, 3);
    assert!(read_csv(std::fs::File::open(file.path()).unwrap(), Some(&other)).is_err());
}

#[test]
fn binary_round_trip_is_bit_exact() {
    let w = Window::unit(2, 2);
    let f = random_grid(&w, 9);
    let mut buf = Vec::new();
    write_binary(&f, &mut buf).unwrap();
    assert_eq!(read_binary(buf.as_slice()).unwrap(), f);
    buf.truncate(buf.len() - 3);
    assert!(read_binary(buf.as_slice()).is_err());
}
