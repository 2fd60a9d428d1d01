use parallelotope::construction::{construct, OverrideLevel, Parallelotope, RecursionConfig};
use parallelotope::lattice::Lattice;
use parallelotope::linalg::IntegerMatrix;
use parallelotope::num::{rat, Q};
use parallelotope::polytope::{voronoi_cell, HPolytope};
use parallelotope::surd::Surd;
use parallelotope::verify::*;

fn cube_tile(n: usize, half: Q) -> Parallelotope {
    let body = HPolytope::cube(n, &half);
    let measures = body.measures().unwrap();
    Parallelotope {
        lattice: Lattice::integer(n),
        body,
        measures,
    }
}

fn worked() -> RecursionConfig {
    RecursionConfig {
        matrix_override: vec![OverrideLevel {
            matrix: IntegerMatrix::from_i64(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]),
            s: Some(1),
        }],
        ..Default::default()
    }
}

#[test]
fn cube_tiles() {
    for n in 1..=3 {
        let r = verify_tiling(&cube_tile(n, rat(1, 2)), 2000, 11).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.covered_exactly_once, 2000);
        assert_eq!(r.boundary_hits, 0);
        assert_eq!(r.max_multiplicity, 1);
    }
}

#[test]
fn scaled_cube_overlaps() {
    let r = verify_tiling(&cube_tile(3, rat(101, 200)), 4000, 3).unwrap();
    assert!(!r.pass);
    assert!(r.max_multiplicity >= 2);
    assert!(!r.volume_check);
    let shrunk = verify_tiling(&cube_tile(2, rat(99, 200)), 4000, 3).unwrap();
    assert!(!shrunk.pass);
    assert!(shrunk.uncovered > 0);
}

#[test]
fn boundary_points_are_exact() {
    let p = cube_tile(3, rat(1, 2));
    let corner = vec![rat(1, 2); 3];
    assert_eq!(translates_containing(&p, &corner).unwrap(), (8, 0));
    let face = vec![rat(1, 2), rat(0, 1), rat(1, 5)];
    assert_eq!(translates_containing(&p, &face).unwrap(), (2, 0));
    let inner = vec![rat(1, 3), rat(-1, 7), rat(0, 1)];
    assert_eq!(translates_containing(&p, &inner).unwrap(), (1, 1));
}

#[test]
fn worked_body_tiles() {
    let c = construct(4, &worked()).unwrap();
    let r = verify_construction(&c, 5000, 2).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.volume_check);
    assert_eq!(r.max_multiplicity, 1);
}

#[test]
fn bound_only_is_unverifiable() {
    let cfg = RecursionConfig {
        bound_only: true,
        scan_points: 5,
        ..Default::default()
    };
    let c = construct(100, &cfg).unwrap();
    assert!(matches!(
        verify_construction(&c, 10, 0),
        Err(parallelotope::Error::Unverifiable(_))
    ));
}

#[test]
fn brute_force_examples() {
    let cube = HPolytope::cube(3, &rat(1, 2));
    assert!(brute_force_volume(&cube, 4).unwrap().contains(&rat(1, 1)));
    // |x| + |y| <= 1 is a square of side sqrt(2)
    let diamond = HPolytope::cross_polytope(2);
    let iv = brute_force_volume(&diamond, 40).unwrap();
    assert!(iv.contains(&rat(2, 1)));
    assert!(iv.width() < rat(1, 2));
    let octa = HPolytope::cross_polytope(3);
    let iv = brute_force_volume(&octa, 16).unwrap();
    assert!(iv.contains(&rat(4, 3)));
    assert!(brute_force_volume(&HPolytope::cube(5, &rat(1, 2)), 2).is_err());
}

#[test]
fn brute_force_brackets_voronoi_volumes() {
    let bases: [&[&[i64]]; 4] = [
        &[&[2, 1], &[0, 3]],
        &[&[1, 0, 1], &[0, 1, 1], &[0, 0, 2]],
        &[&[3, 1], &[1, 2]],
        &[&[1, 1, 0], &[1, -1, 0], &[0, 0, 1]],
    ];
    for b in bases {
        let l = Lattice::from_integer(&IntegerMatrix::from_i64(b)).unwrap();
        let k = voronoi_cell(&l).unwrap();
        let exact = k.measures().unwrap().volume.as_rational().unwrap();
        let grid = if l.ambient_dim() == 2 { 48 } else { 12 };
        let iv = brute_force_volume(&k, grid).unwrap();
        assert!(iv.contains(&exact), "{exact} not in {iv}");
    }
}

#[test]
fn suite_on_cube() {
    let c = construct(3, &RecursionConfig::default()).unwrap();
    let s = inequality_suite(&c.report);
    assert!(s.passed(), "{:?}", s.failures().collect::<Vec<_>>());
    assert_eq!(s.get("inradius-bound", Some(0)).unwrap().status, Status::Pass);
    assert_eq!(s.get("isoperimetric", None).unwrap().status, Status::Pass);
}

#[test]
fn suite_on_worked_and_sabotage() {
    let c = construct(4, &worked()).unwrap();
    let s = inequality_suite(&c.report);
    assert!(s.passed(), "{:?}", s.failures().collect::<Vec<_>>());
    let add = s.get("additivity", Some(0)).unwrap();
    assert_eq!(add.status, Status::Pass);
    assert_eq!(add.detail, "6*sqrt(2) = 2*sqrt(2) + 4*sqrt(2)");
    assert_eq!(s.get("within-2n", Some(0)).unwrap().status, Status::Skipped);

    let mut bad = c.report.clone();
    if let parallelotope::construction::Level::Step(t) = &mut bad.levels[0] {
        t.inner_ratio = Surd::from_int(2).to_json(64);
    } else {
        panic!("expected a step at depth 0");
    }
    let s = inequality_suite(&bad);
    assert!(!s.passed());
    assert_eq!(s.get("recursive-inequality", Some(0)).unwrap().status, Status::Fail);
    assert_eq!(s.get("inner-consistency", Some(0)).unwrap().status, Status::Fail);
}

#[test]
fn norm_certificate_recheck() {
    let b = IntegerMatrix::from_i64(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]);
    assert!(norm_sq_at_most(&b, &rat(2, 1)));
    assert!(!norm_sq_at_most(&b, &rat(199, 100)));
    let c = IntegerMatrix::from_i64(&[&[1, 1], &[1, 0]]);
    // largest eigenvalue of C C^T = [[2,1],[1,1]] is (3 + sqrt 5) / 2 ~ 2.618
    assert!(norm_sq_at_most(&c, &rat(2619, 1000)));
    assert!(!norm_sq_at_most(&c, &rat(2617, 1000)));
}

#[test]
fn inradius_bound_on_rotated_lattice() {
    let l = Lattice::from_integer(&IntegerMatrix::from_i64(&[&[1, 1], &[-1, 1]])).unwrap();
    let k = voronoi_cell(&l).unwrap();
    let m = k.measures().unwrap();
    // minimum distance sqrt 2, so the inradius is sqrt(2)/2
    assert_eq!(inradius_ratio_bound(&k, &m, &rat(1, 2)), Some(true));
    assert_eq!(inradius_ratio_bound(&k, &m, &rat(3, 4)), None);
}
