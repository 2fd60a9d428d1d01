//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::Rng;

use parallelotope::construction::{construct, Level, OverrideLevel, Parallelotope, RecursionConfig};
use parallelotope::interval::Interval;
use parallelotope::lattice::{shortest_vector_length_sq, Lattice, ShortestVector};
use parallelotope::linalg::BitVec;
use parallelotope::linalg::{complete_to_full_rank, completion_norm_check, det_integer, IntegerMatrix, RationalMatrix};
use parallelotope::num::{self, rat, Q, Z};
use parallelotope::polytope::{voronoi_cell, HPolytope};
use parallelotope::surd::Surd;
use parallelotope::verify::{
    brute_force_volume, inequality_suite, inradius_ratio_bound, is_psd, verify_construction, verify_tiling, Status,
};
use parallelotope::walk::{
    admissible_s, default_c, dependent_subset, expected_collision_bound, return_prob_bound, return_prob_exact,
    row_bound, s_wise_independent, sample_attempt, stream_rng, LdpcParams,
};

const BITS: u32 = 128;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Runs one criterion, folding the wall-clock limit into the verdict.
fn criterion(id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| outcome(false, "panicked"));
    let took = t0.elapsed();
    let in_time = took <= limit;
    let pass = r.pass && in_time;
    println!(
        "criterion {id} [{}] {title}: {}  ({:.2}s of {}s{})",
        if pass { "PASS" } else { "FAIL" },
        r.detail,
        took.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", over time" },
    );
    pass
}

// ---------------------------------------------------------------- 1

fn cube_baseline() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=6usize {
        let k = match voronoi_cell(&Lattice::integer(n)) {
            Ok(k) => k,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        let cube = HPolytope::cube(n, &rat(1, 2));
        if k.normalized_halfspace_set() != cube.normalized_halfspace_set() {
            bad.push(format!("n={n}: halfspaces differ"));
        }
        let m = k.measures().unwrap();
        if m.volume != Surd::from_int(1) {
            bad.push(format!("n={n}: volume {}", m.volume));
        }
        if m.surface_area != Surd::from_int(2 * n as i64) {
            bad.push(format!("n={n}: surface {}", m.surface_area));
        }
    }
    if bad.is_empty() {
        outcome(true, "n = 1..6 match [-1/2,1/2]^n, volume 1, surface 2n")
    } else {
        outcome(false, bad.join("; "))
    }
}

// ---------------------------------------------------------------- 2

/// Count of length-`t` coordinate sequences that flip every bit an even
/// number of times, over all `m^t` sequences.
fn enumerate_returns(m: usize, t: u32) -> Q {
    let total = (m as u64).pow(t);
    let mut back = 0u64;
    for code in 0..total {
        let mut c = code;
        let mut state = 0u64;
        for _ in 0..t {
            state ^= 1 << (c % m as u64);
            c /= m as u64;
        }
        back += u64::from(state == 0);
    }
    Q::new(back.into(), total.into())
}

fn walk_exactness() -> Outcome {
    let mut cases = 0;
    for m in 1..=4usize {
        for t in 0..=6u32 {
            let want = enumerate_returns(m, t);
            let got = return_prob_exact(m, t as u64);
            if got != want {
                return outcome(false, format!("m={m} t={t}: {got} vs enumeration {want}"));
            }
            cases += 1;
        }
    }
    let mut bounds = 0;
    for m in 1..=64usize {
        for t in (0..=20u64).step_by(2) {
            let p = return_prob_exact(m, t);
            let b = return_prob_bound(m, t);
            if p > b {
                return outcome(false, format!("m={m} t={t}: {p} > {b}"));
            }
            bounds += 1;
        }
    }
    outcome(
        true,
        format!("{cases} enumerated cases equal, {bounds} bound cases hold"),
    )
}

// ---------------------------------------------------------------- 3

fn sampler_conformance() -> Outcome {
    let (m, n, d) = (32usize, 256usize, 4usize);
    let c = default_c(d).unwrap();
    let s = admissible_s(m, n, d, &c).unwrap();
    let rb = row_bound(m, n, d);
    let mut row_ok = 0;
    let mut accepted = 0;
    let mut weight_bad = 0;
    let mut distinct_nonzero = 0;
    let attempts = 100u64;
    for seed in 0..attempts {
        let p = LdpcParams {
            m,
            n,
            d,
            s,
            c: c.clone(),
            max_tries: 1,
            seed,
        };
        let a = sample_attempt(&p, 0).unwrap();
        row_ok += usize::from(a.row_ok);
        let cols: Vec<BitVec> = (0..n).map(|j| BitVec::from_parity(&a.matrix.col(j))).collect();
        if dependent_subset(&cols, 2).unwrap().is_none() {
            distinct_nonzero += 1;
        }
        if a.accepted() {
            accepted += 1;
            let col_max = cols.iter().map(BitVec::weight).max().unwrap_or(0);
            if col_max > d || a.max_row_weight > rb {
                weight_bad += 1;
            }
        }
    }
    let rate = row_ok as f64 / attempts as f64;
    let e_d = {
        let p = LdpcParams {
            m,
            n,
            d,
            s: s.max(1),
            c: c.clone(),
            max_tries: 1,
            seed: 0,
        };
        expected_collision_bound(&p)
    };
    let e_d_ok = s == 0 || e_d.value() < &rat(1, 3);
    let s_ok = (1..=2).contains(&s);
    let pass = weight_bad == 0 && rate >= 0.2 && s_ok && e_d_ok;
    outcome(
        pass,
        format!(
            "c = {:.4e}, admissible s = {s} ({}), row bound {rb}, row-sparsity rate {rate:.2}, \
             {accepted} accepted with {weight_bad} weight violations, \
             2-wise independent in {distinct_nonzero}/{attempts} draws, E[D] at s=max(s,1) = {:.3}",
            num::to_f64(&c),
            if s_ok { "ok" } else { "need 1 or 2" },
            num::to_f64(e_d.value()),
        ),
    )
}

// ---------------------------------------------------------------- 4

fn worked_config() -> RecursionConfig {
    RecursionConfig {
        matrix_override: vec![OverrideLevel {
            matrix: IntegerMatrix::from_i64(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]),
            s: Some(1),
        }],
        ..Default::default()
    }
}

fn worked_example() -> Outcome {
    let c = construct(4, &worked_config()).unwrap();
    let want = Surd::sqrt(&rat(2, 1)).scale(&rat(6, 1));
    let f = &c.report.final_;
    let ratio = Surd::from_json(f.ratio.as_ref().unwrap()).unwrap();
    let iv = Interval::try_from(&f.ratio_interval).unwrap();
    let width_ok = iv.width() <= Q::new(Z::one(), Z::from(10u64.pow(10)));

    let Level::Step(top) = &c.report.levels[0] else {
        return outcome(false, "depth 0 is not a recursion step");
    };
    let k1 = Surd::from_json(&top.ratio_k1).unwrap();
    let k2 = Surd::from_json(&top.ratio_k2).unwrap();
    let total = Surd::from_json(&top.ratio_total).unwrap();
    let additive = total == k1.add(&k2)
        && k1 == Surd::sqrt(&rat(2, 1)).scale(&rat(2, 1))
        && k2 == Surd::sqrt(&rat(2, 1)).scale(&rat(4, 1));
    let summed = &k1.enclose(BITS) + &k2.enclose(BITS);
    let on_intervals = !(summed.certainly_lt(&total.enclose(BITS)) || total.enclose(BITS).certainly_lt(&summed));

    let p = c.parallelotope.as_ref().unwrap();
    let vol_exact = p.measures.volume == Surd::from_int(1);
    let brute = brute_force_volume(&p.body, 12).unwrap();
    let tiling = verify_construction(&c, 100_000, 4).unwrap();
    let once = tiling.covered_exactly_once + tiling.boundary_hits == tiling.samples && tiling.uncovered == 0;

    let pass = ratio == want
        && width_ok
        && additive
        && on_intervals
        && vol_exact
        && brute.contains(&Q::one())
        && tiling.pass
        && once;
    outcome(
        pass,
        format!(
            "ratio {ratio} (width {:.1e}), {} = {} + {}, vol {} (grid bracket {brute}), \
             tiling {}/{} once, {} boundary, max multiplicity {}",
            num::to_f64(&iv.width()),
            total,
            k1,
            k2,
            p.measures.volume,
            tiling.covered_exactly_once,
            tiling.samples,
            tiling.boundary_hits,
            tiling.max_multiplicity,
        ),
    )
}

// ---------------------------------------------------------------- 5

/// Random integer bases in dimensions 2..=4: even indices are general,
/// odd indices unimodular (products of elementary moves).
fn lattice_corpus() -> Vec<IntegerMatrix> {
    let mut rng = stream_rng(2024, 0);
    let mut out = Vec::new();
    while out.len() < 20 {
        let dim = 2 + out.len() % 3;
        let rows: Vec<Vec<Z>> = if out.len() % 2 == 0 {
            (0..dim)
                .map(|_| (0..dim).map(|_| Z::from(rng.gen_range(-3i64..=3))).collect())
                .collect()
        } else {
            let mut m: Vec<Vec<i64>> = (0..dim)
                .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
                .collect();
            for _ in 0..3 * dim {
                let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
                if i != j {
                    let k = rng.gen_range(-1i64..=1);
                    let src = m[j].clone();
                    for (x, y) in m[i].iter_mut().zip(src) {
                        *x += k * y;
                    }
                }
            }
            m.into_iter().map(|r| r.into_iter().map(Z::from).collect()).collect()
        };
        let b = IntegerMatrix::from_rows(rows).unwrap();
        if !det_integer(&b).unwrap().is_zero() {
            out.push(b);
        }
    }
    out
}

fn isoperimetric_ok(dim: usize, measures: &parallelotope::polytope::BodyMeasures) -> bool {
    let vol = measures.volume.enclose(BITS);
    let lb = parallelotope::construction::schedule::isoperimetric_ratio_lower(dim, &vol, BITS);
    lb.certainly_le(&measures.ratio.enclose(BITS))
}

fn random_sparse(rng: &mut impl Rng) -> IntegerMatrix {
    let m = rng.gen_range(2..=7usize);
    let n = rng.gen_range(m..=12usize);
    let mut a = IntegerMatrix::zeros(m, n);
    for j in 0..n {
        for _ in 0..rng.gen_range(1..=3) {
            a.set(rng.gen_range(0..m), j, Z::one());
        }
    }
    // force some dependent rows now and then
    if m >= 3 && rng.gen_bool(0.3) {
        for j in 0..n {
            let v = a.get(0, j).clone();
            a.set(m - 1, j, v);
        }
    }
    a
}

fn gram_t(b: &IntegerMatrix) -> RationalMatrix {
    let q = b.to_rational();
    q.transpose().matmul(&q).unwrap()
}

fn inequality_suite_check() -> Outcome {
    let mut failures = Vec::new();
    let mut iso_checked = 0;
    for (i, b) in lattice_corpus().iter().enumerate() {
        let l = Lattice::from_integer(b).unwrap();
        let k = voronoi_cell(&l).unwrap();
        let m = k.measures().unwrap();
        let lam = match shortest_vector_length_sq(&l, &rat(1000, 1), 1_000_000).unwrap() {
            ShortestVector::Value(v) => v,
            ShortestVector::ExceedsBound => {
                failures.push(format!("lattice {i}: no short vector"));
                continue;
            }
        };
        // Voronoi inradius is lambda_1 / 2
        match inradius_ratio_bound(&k, &m, &(&lam / rat(4, 1))) {
            Some(true) => {}
            Some(false) => failures.push(format!("lattice {i}: ratio {} above n/R", m.ratio)),
            None => failures.push(format!("lattice {i}: inradius not certified")),
        }
        if det_integer(b).unwrap().abs().is_one() {
            let p = Parallelotope {
                lattice: l,
                body: k,
                measures: m.clone(),
            };
            if !verify_tiling(&p, 2000, i as u64).unwrap().pass {
                failures.push(format!("lattice {i}: tiling check failed"));
                continue;
            }
            iso_checked += 1;
        }
        if !isoperimetric_ok(b.rows(), &m) {
            failures.push(format!("lattice {i}: isoperimetric bound violated"));
        }
    }
    for n in 1..=6 {
        let c = construct(n, &RecursionConfig::default()).unwrap();
        let s = inequality_suite(&c.report);
        if s.get("isoperimetric", None).map(|c| c.status) != Some(Status::Pass) || !s.passed() {
            failures.push(format!("cube {n}: suite failed"));
        }
        iso_checked += 1;
    }
    let w = construct(4, &worked_config()).unwrap();
    if !isoperimetric_ok(4, &w.parallelotope.as_ref().unwrap().measures) || !inequality_suite(&w.report).passed() {
        failures.push("worked n=4: suite failed".into());
    }
    iso_checked += 1;

    let mut rng = stream_rng(7, 1);
    let mut norm_checked = 0;
    for i in 0..100 {
        let a = random_sparse(&mut rng);
        let comp = complete_to_full_rank(&a).unwrap();
        let chk = completion_norm_check(&a, &comp);
        // B^T B <= A^T A + I exactly gives ||B||^2 <= 1 + ||A||^2
        let ga = gram_t(&a);
        let gb = gram_t(&comp.b);
        let n = a.cols();
        let diff: Vec<Vec<Q>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let id = if r == c { Q::one() } else { Q::zero() };
                        ga.get(r, c) + id - gb.get(r, c)
                    })
                    .collect()
            })
            .collect();
        let exact = is_psd(&RationalMatrix::from_rows(diff).unwrap());
        if !exact || !(chk.numeric_pass || chk.structural_pass) {
            failures.push(format!("sparse A #{i}: completion norm check failed"));
        }
        norm_checked += 1;
    }

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "20 lattices within n/R, {iso_checked} verified covolume-1 bodies above the isoperimetric bound, \
                 {norm_checked} completions within 1 + ||A||^2"
            )
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------- 6

fn asymptotic_substitute(earlier: &[bool]) -> Outcome {
    let cfg = RecursionConfig {
        bound_only: true,
        scan_points: 1000,
        ..Default::default()
    };
    let c = construct(1_000_000, &cfg).unwrap();
    let r = &c.report;
    let scan = r.induction_scan.as_ref().unwrap();
    let pb = Interval::try_from(&r.final_.predicted_bound).unwrap();
    let suite = inequality_suite(r);
    let scan_ok = scan.failures.is_empty()
        && scan.holds == scan.points
        && scan.points == 1000
        && scan.lo_exclusive == 64
        && scan.hi == 1_000_000;
    let part_a = scan_ok && pb.lo().is_positive() && suite.passed();
    let part_b = earlier.iter().all(|&p| p);
    let failed_b: Vec<String> = earlier
        .iter()
        .enumerate()
        .filter(|(_, &p)| !p)
        .map(|(i, _)| (i + 1).to_string())
        .collect();
    outcome(
        part_a && part_b,
        format!(
            "(a) predicted bound {pb}, induction holds at {}/{} log-spaced n in ({}, {}]; \
             (b) criteria 1-5 {}",
            scan.holds,
            scan.points,
            scan.lo_exclusive,
            scan.hi,
            if part_b {
                "pass".to_string()
            } else {
                format!("fail at {}", failed_b.join(","))
            }
        ),
    )
}

// ---------------------------------------------------------------- 7

fn negative_controls() -> Outcome {
    let body = HPolytope::cube(3, &rat(1, 2)).scaled(&rat(101, 100));
    let measures = body.measures().unwrap();
    let p = Parallelotope {
        lattice: Lattice::integer(3),
        body,
        measures,
    };
    let r = verify_tiling(&p, 10_000, 1).unwrap();
    let scaled_ok = !r.pass && r.max_multiplicity >= 2;

    let dup = IntegerMatrix::from_i64(&[&[1, 0, 1, 1], &[1, 1, 1, 0], &[0, 1, 0, 1]]);
    let s1 = s_wise_independent(&dup, 1).unwrap();
    let s2 = s_wise_independent(&dup, 2).unwrap();
    let dup_ok = s1 && !s2;
    outcome(
        scaled_ok && dup_ok,
        format!(
            "scaled cube: pass={} multiplicity {}; duplicated column: 1-wise {s1}, 2-wise {s2}",
            r.pass, r.max_multiplicity
        ),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = vec![
        criterion(1, "cube baseline", secs(5), cube_baseline),
        criterion(2, "random-walk exactness", secs(10), walk_exactness),
        criterion(3, "sampler conformance", secs(60), sampler_conformance),
        criterion(4, "worked n = 4 construction", secs(120), worked_example),
        criterion(5, "inequality suite", secs(60), inequality_suite_check),
    ];
    let earlier = results.clone();
    results.push(criterion(6, "bound-only substitute", secs(30), || {
        asymptotic_substitute(&earlier)
    }));
    results.push(criterion(7, "negative controls", secs(10), negative_controls));
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
