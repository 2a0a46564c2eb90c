//! Sparse families from seeded inputs: exact sparseness, domination support
//! and serialization.

use czlab::dyadic::{covering_family, region};
use czlab::experiments::{causal_kernel, min_resolution, RandomInput};
use czlab::functionals::{carleson_dyadic, carleson_function, whitney_sequence};
use czlab::operators::SparseOperator;
use czlab::sparse::{build, domination_ratio, verify_sparsity};
use czlab::{GridFunction, RegionKind, SparseFamily, SparseKind, SparseParams, Window};
use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

fn family(n: usize, j: u32, seed: u64) -> (GridFunction, SparseFamily) {
    let w = Window::unit(n, j);
    let f = RandomInput::generate(n, seed).sample(&w).unwrap();
    let fam = build(&causal_kernel(n).unwrap(), &f, &SparseParams::for_dim(n)).unwrap();
    (f, fam)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn seeded_builds_are_sparse(seed in 0u64..10_000, n in 0usize..2) {
        let (_, fam) = family(n, min_resolution(), seed);
        let rep = verify_sparsity(&fam);
        prop_assert!(rep.ok(), "{}", rep);
        prop_assert!(rep.worst_ratio >= Ratio::new(1, 4));
        let root = fam.window.root_cube();
        prop_assert!(fam.cubes().iter().all(|q| root.contains(q)));
    }

    #[test]
    fn the_sparse_operator_never_vanishes_where_the_operator_does_not(seed in 0u64..10_000) {
        let (f, fam) = family(1, min_resolution(), seed);
        let cells: Vec<usize> = (0..f.window().num_cells()).step_by(3).collect();
        for kind in [SparseKind::SqcapAt, SparseKind::BoxAt] {
            let rep = domination_ratio(&causal_kernel(1).unwrap(), &f, &fam, &cells, kind).unwrap();
            prop_assert!(rep.violations.is_empty());
            prop_assert!(rep.max_ratio.is_finite());
        }
    }

    #[test]
    fn box_regions_dominate_within_the_volume_ratio(seed in 0u64..10_000) {
        // Q^⊓_x̄ ⊆ Q^□_x̄, so each box average is at least |Q^⊓_x̄|/|Q^□_x̄| times
        // the matching ⊓ average.
        let (f, fam) = family(1, min_resolution(), seed);
        let w = f.window();
        let cells: Vec<usize> = (0..w.num_cells()).collect();
        let mut vol_ratio = 1.0f64;
        for q in fam.cubes() {
            for &c in &cells {
                let x = w.cell_center_exact(c);
                if !q.contains_point(&x) {
                    continue;
                }
                let sq = region(&q, RegionKind::SqcapAt, Some(&x)).unwrap().volume().to_f64();
                let bx = region(&q, RegionKind::BoxAt, Some(&x)).unwrap().volume().to_f64();
                prop_assert!(sq <= bx);
                vol_ratio = vol_ratio.max(bx / sq);
            }
        }
        let k = causal_kernel(1).unwrap();
        let sq = domination_ratio(&k, &f, &fam, &cells, SparseKind::SqcapAt).unwrap();
        let bx = domination_ratio(&k, &f, &fam, &cells, SparseKind::BoxAt).unwrap();
        prop_assert!(
            bx.max_ratio <= sq.max_ratio * vol_ratio * (1.0 + 1e-12),
            "{} > {} · {}", bx.max_ratio, sq.max_ratio, vol_ratio
        );
    }
}

#[test]
fn family_round_trips_through_json() {
    let (_, fam) = family(1, 4, 3);
    let back = SparseFamily::from_json(&fam.to_json().unwrap()).unwrap();
    assert_eq!(back, fam);
}

#[test]
fn tampered_families_are_caught() {
    let (_, fam) = family(1, 4, 8);
    let mut dup = fam.clone();
    dup.entries.push(fam.entries[0].clone());
    assert!(!verify_sparsity(&dup).ok());
    let mut thin = fam.clone();
    let e = &mut thin.entries[0];
    e.e_runs = vec![(e.e_runs[0].0, 1)];
    assert!(!verify_sparsity(&thin).ok());
}

#[test]
fn zero_input_gives_the_root_alone() {
    let w = Window::unit(1, 4);
    let f = GridFunction::zeros(w.clone());
    let fam = build(&causal_kernel(1).unwrap(), &f, &SparseParams::for_dim(1)).unwrap();
    assert_eq!(fam.cubes(), vec![w.root_cube()]);
    assert_eq!(fam.entries[0].e_count(), w.num_cells());
}

#[test]
fn invalid_parameters_are_rejected() {
    let w = Window::unit(1, 4);
    let f = GridFunction::constant(w, Complex64::new(1.0, 0.0));
    let mut p = SparseParams::for_dim(1);
    p.alpha = Ratio::new(1, 1);
    assert!(build(&causal_kernel(1).unwrap(), &f, &p).is_err());
    // A one-dimensional kernel on a two-dimensional window.
    assert!(build(&causal_kernel(0).unwrap(), &f, &SparseParams::for_dim(1)).is_err());
}

#[test]
fn covering_cubes_alone_obey_the_pointwise_carleson_bound() {
    // With f ≡ c every average of |f| is at most c, so Ŝf ≤ c and
    // C_D W_{D,2}(Ŝf) ≤ c, while C f = c. The constant is 1.
    let c = 0.75;
    for j in [3u32, 5] {
        let w = Window::unit(1, j);
        let f = GridFunction::constant(w.clone(), Complex64::new(c, 0.0));
        let cover = covering_family(&w.root_cube(), 0);
        assert_eq!(cover, vec![w.root_cube()]);
        let shat = SparseOperator::new(&f, SparseKind::BoxAt)
            .eval_cells(&cover)
            .unwrap();
        assert!(shat.iter().all(|&v| v > 0.0 && v <= c + 1e-15));
        let g = GridFunction::from_values(
            w.clone(),
            shat.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
        .unwrap();
        let lhs = carleson_dyadic(&whitney_sequence(&g, 2.0, false).unwrap());
        let rhs_w = carleson_dyadic(&whitney_sequence(&f, 2.0, true).unwrap());
        let rhs_c = carleson_function(&f);
        for ((l, a), b) in lhs.values().iter().zip(rhs_w.values()).zip(rhs_c.values()) {
            assert!((b - c).abs() < 1e-12);
            assert!(*l <= c + 1e-12 && *l <= a + b, "{l} against {a} + {b}");
        }
    }
}
