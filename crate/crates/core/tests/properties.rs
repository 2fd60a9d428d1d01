use num_traits::{Signed, Zero};
use proptest::prelude::*;

use parallelotope::construction::Parallelotope;
use parallelotope::lattice::Lattice;
use parallelotope::linalg::{det_integer, integer_kernel_basis, IntegerMatrix};
use parallelotope::num::{rat, Q};
use parallelotope::polytope::{voronoi_cell, HPolytope};
use parallelotope::surd::Surd;
use parallelotope::verify::{brute_force_volume, verify_tiling};
use parallelotope::walk::{return_prob_bound, return_prob_exact, stream_rng, walk_with, weight_distribution};

fn small_q() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn surd() -> impl Strategy<Value = Surd> {
    prop::collection::vec((small_q(), 1i64..=12), 1..4).prop_map(|terms| {
        terms
            .into_iter()
            .fold(Surd::zero(), |acc, (c, r)| acc.add(&Surd::sqrt(&rat(r, 1)).scale(&c)))
    })
}

fn leibniz_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * leibniz_det(&minor)
        })
        .sum()
}

fn as_refs(rows: &[Vec<i64>]) -> Vec<&[i64]> {
    rows.iter().map(Vec::as_slice).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walk_weight_has_parity_of_length(m in 1usize..40, t in 0u64..60, seed in any::<u64>()) {
        let w = walk_with(m, t, &mut stream_rng(seed, 0)).weight();
        prop_assert_eq!(w as u64 % 2, t % 2);
        prop_assert!(w as u64 <= t.min(m as u64));
    }

    #[test]
    fn return_probability_agrees_with_ehrenfest(m in 1usize..24, t in 0u64..24) {
        let exact = return_prob_exact(m, t);
        prop_assert_eq!(&exact, &weight_distribution(m, t)[0]);
        let total: Q = weight_distribution(m, t).into_iter().sum();
        prop_assert_eq!(total, rat(1, 1));
        if t % 2 == 0 {
            prop_assert!(exact <= return_prob_bound(m, t));
        }
    }

    #[test]
    fn surd_ring_identities(a in surd(), b in surd(), c in surd()) {
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.is_canonical());
    }

    #[test]
    fn surd_order_matches_floats(a in surd(), b in surd()) {
        let (x, y) = (a.to_f64(), b.to_f64());
        if (x - y).abs() > 1e-9 {
            prop_assert_eq!(a.lt(&b), x < y);
        }
        prop_assert_eq!(a.le(&b) && b.le(&a), a == b);
    }

    #[test]
    fn surd_sqrt_squares_back(n in 0i64..500, d in 1i64..50) {
        let q = rat(n, d);
        let r = Surd::sqrt(&q);
        prop_assert_eq!(r.mul(&r), Surd::rational(q.clone()));
        let iv = r.enclose(64);
        let f = (n as f64 / d as f64).sqrt();
        prop_assert!(parallelotope::num::to_f64(iv.lo()) <= f + 1e-12);
        prop_assert!(f - 1e-12 <= parallelotope::num::to_f64(iv.hi()));
    }

    #[test]
    fn determinant_matches_cofactor_expansion(
        rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 3)
    ) {
        let m = IntegerMatrix::from_i64(&as_refs(&rows));
        prop_assert_eq!(det_integer(&m).unwrap(), leibniz_det(&rows).into());
    }

    #[test]
    fn integer_kernel_is_annihilated(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 1..4)
    ) {
        let b = IntegerMatrix::from_i64(&as_refs(&rows));
        let k = integer_kernel_basis(&b).unwrap();
        let prod = b.matmul(&k).unwrap();
        for i in 0..prod.rows() {
            for j in 0..prod.cols() {
                prop_assert!(prod.get(i, j).is_zero());
            }
        }
        let rank = parallelotope::linalg::rank_over_rationals(&b);
        prop_assert_eq!(k.cols(), 5 - rank);
    }

    #[test]
    fn box_volume_inside_brute_force_bracket(
        sides in prop::collection::vec((-4i64..=4, 1i64..=5, 1i64..=4), 2..=3)
    ) {
        let lo: Vec<Q> = sides.iter().map(|&(a, _, d)| rat(a, d)).collect();
        let hi: Vec<Q> = sides.iter().map(|&(a, w, d)| rat(a + w, d)).collect();
        let b = HPolytope::axis_box(&lo, &hi);
        let exact = b.measures().unwrap().volume.as_rational().unwrap();
        let want: Q = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
        prop_assert_eq!(&exact, &want);
        prop_assert!(brute_force_volume(&b, 6).unwrap().contains(&exact));
    }

    #[test]
    fn hrep_text_round_trips(half in 1i64..9, n in 1usize..5) {
        let c = HPolytope::cube(n, &rat(half, 3));
        let back = HPolytope::from_hrep(&c.to_hrep()).unwrap();
        prop_assert_eq!(back.normalized_halfspace_set(), c.normalized_halfspace_set());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn voronoi_cells_of_plane_lattices_tile(
        a in -4i64..=4, b in -4i64..=4, c in -4i64..=4, d in -4i64..=4, seed in any::<u64>()
    ) {
        let det = a * d - b * c;
        prop_assume!(det != 0);
        let lattice = Lattice::from_integer(&IntegerMatrix::from_i64(&[&[a, b], &[c, d]])).unwrap();
        let body = voronoi_cell(&lattice).unwrap();
        let measures = body.measures().unwrap();
        prop_assert_eq!(measures.volume.as_rational().unwrap(), rat(det.abs(), 1));
        let r = verify_tiling(&Parallelotope { lattice, body, measures }, 400, seed).unwrap();
        prop_assert!(r.pass, "{:?}", r);
        prop_assert_eq!(r.uncovered, 0);
        prop_assert!(r.max_multiplicity <= 1);
    }

    #[test]
    fn scaled_voronoi_cells_do_not_tile(a in 1i64..=3, b in -3i64..=3, d in 1i64..=3) {
        let lattice = Lattice::from_integer(&IntegerMatrix::from_i64(&[&[a, b], &[0, d]])).unwrap();
        let body = voronoi_cell(&lattice).unwrap().scaled(&rat(11, 10));
        let measures = body.measures().unwrap();
        prop_assert!(measures.volume.as_rational().unwrap().is_positive());
        let r = verify_tiling(&Parallelotope { lattice, body, measures }, 400, 5).unwrap();
        prop_assert!(!r.pass);
        prop_assert!(!r.volume_check);
    }
}
