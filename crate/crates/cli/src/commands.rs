use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use parallelotope::construction::{
    construct as build, ConstructionReport, OverrideLevel, Parallelotope, RecursionConfig,
};
use parallelotope::lattice::{Lattice, LatticeJson};
use parallelotope::linalg::{IntegerMatrix, MatrixJson};
use parallelotope::num::{self, Q};
use parallelotope::polytope::{HPolytope, PolytopeJson};
use parallelotope::verify::{self, inequality_suite, Status, SuiteResult, TilingReport};
use parallelotope::walk::{self, LdpcParams, LdpcStats};

use crate::config::FileConfig;
use crate::{ConstructArgs, Failure, Format, SampleArgs, Sink, VerifyArgs, WalkArgs};

/// A stored body: what `construct --polytope-out` writes and `verify` reads.
/// The lattice defaults to `Z^n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<PolytopeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ConstructionReport>,
}

/// One override level in a matrix-override file.
#[derive(Clone, Debug, Deserialize)]
struct OverrideJson {
    matrix: MatrixJson,
    #[serde(default)]
    s: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum OverrideFile {
    Levels { levels: Vec<OverrideJson> },
    Level(OverrideJson),
    Matrix(MatrixJson),
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn rational(flag: &str, v: Option<&String>, fallback: Option<&String>, default: Q) -> Result<Q, Failure> {
    match v.or(fallback) {
        Some(s) => num::parse_rational(s).map_err(|e| Failure::Usage(format!("--{flag}: {e}"))),
        None => Ok(default),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn load_overrides(path: &Path) -> Result<Vec<OverrideLevel>, Failure> {
    let levels = match parse_json::<OverrideFile>(path)? {
        OverrideFile::Levels { levels } => levels,
        OverrideFile::Level(l) => vec![l],
        OverrideFile::Matrix(matrix) => vec![OverrideJson { matrix, s: None }],
    };
    levels
        .into_iter()
        .map(|l| {
            Ok(OverrideLevel {
                matrix: l.matrix.to_integer()?,
                s: l.s,
            })
        })
        .collect()
}

fn recursion_config(a: &ConstructArgs, f: &FileConfig) -> Result<RecursionConfig, Failure> {
    let d = RecursionConfig::default();
    Ok(RecursionConfig {
        kappa: rational("kappa", a.kappa.as_ref(), f.kappa.as_ref(), d.kappa)?,
        epsilon: rational("epsilon", a.epsilon.as_ref(), f.epsilon.as_ref(), d.epsilon)?,
        min_recursion_n: None,
        max_depth: a.max_depth.or(f.max_depth).unwrap_or(d.max_depth),
        seed: a.seed.or(f.seed).unwrap_or(d.seed),
        dim_cap: a.dim_cap.or(f.dim_cap).unwrap_or(d.dim_cap),
        max_tries: a.max_tries.or(f.max_tries).unwrap_or(d.max_tries),
        svp_budget: a.svp_budget.or(f.svp_budget).unwrap_or(d.svp_budget),
        matrix_override: match &a.matrix_override {
            Some(p) => load_overrides(p)?,
            None => Vec::new(),
        },
        bound_only: a.bound_only,
        scan_points: a.scan_points.or(f.scan_points).unwrap_or(d.scan_points),
    })
}

fn suite_lines(s: &SuiteResult) -> String {
    let mut out = String::new();
    for c in &s.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        let depth = c.depth.map(|d| format!("[{d}]")).unwrap_or_default();
        out.push_str(&format!("{}{depth}: {status}  {}\n", c.name, c.detail));
    }
    out
}

fn tiling_line(t: &TilingReport) -> String {
    format!(
        "tiling: {}  samples {} once {} boundary {} uncovered {} max multiplicity {} volume {}\n",
        if t.pass { "pass" } else { "FAIL" },
        t.samples,
        t.covered_exactly_once,
        t.boundary_hits,
        t.uncovered,
        t.max_multiplicity,
        if t.volume_check { "exact" } else { "MISMATCH" }
    )
}

pub fn construct(a: &ConstructArgs, f: &FileConfig, format: Format, sink: &Sink) -> Result<u8, Failure> {
    let cfg = recursion_config(a, f)?;
    let c = build(a.n, &cfg)?;
    let suite = inequality_suite(&c.report);
    let tiling = match (a.samples.or(f.samples), &c.parallelotope) {
        (Some(k), Some(p)) => Some(verify::verify_tiling(p, k, cfg.seed)?),
        (Some(_), None) => {
            eprintln!("note: bound-only construction, tiling check skipped");
            None
        }
        (None, _) => None,
    };
    if format != Format::Text {
        eprint!("{}", suite_lines(&suite));
    }
    if let Some(t) = &tiling {
        eprint!("{}", tiling_line(t));
    }

    if let Some(path) = &a.polytope_out {
        let p = c
            .parallelotope
            .as_ref()
            .ok_or_else(|| Failure::Core(parallelotope::Error::Unverifiable("bound-only run has no body".into())))?;
        let fixture = Fixture {
            lattice: Some(p.lattice.to_json()),
            body: Some(p.body.to_json()),
            report: Some(c.report.clone()),
        };
        std::fs::write(path, to_json(&fixture)).map_err(|e| Failure::io(path, e))?;
    }

    let name = format!("construct-n{}-seed{}", a.n, cfg.seed);
    match format {
        Format::Json => sink.write(&format!("{name}.json"), &c.report.to_json_string())?,
        Format::Hrep => {
            let p = c.parallelotope.as_ref().ok_or_else(|| {
                Failure::Core(parallelotope::Error::Unverifiable("bound-only run has no body".into()))
            })?;
            sink.write(&format!("{name}.ine"), &p.body.to_hrep())?;
        }
        Format::Text => {
            let fin = &c.report.final_;
            let ratio = fin.ratio.as_ref().map_or_else(
                || format!("[{}, {}]", fin.ratio_lo, fin.ratio_hi),
                |r| format!("{} ~ {}", r.exact, r.approx),
            );
            let text = format!(
                "n = {}  mode = {:?}  seed = {}\nratio = {ratio}\n2n = {}\npredicted bound ~ [{}, {}]\n{}",
                c.report.n,
                c.report.mode,
                cfg.seed,
                fin.trivial_bound_2n,
                fin.predicted_bound.lo,
                fin.predicted_bound.hi,
                suite_lines(&suite)
            );
            sink.write(&format!("{name}.txt"), &text)?;
        }
    }
    let ok = suite.passed() && tiling.as_ref().is_none_or(|t| t.pass);
    Ok(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct SampleParams {
    m: usize,
    n: usize,
    d: usize,
    s: usize,
    c: String,
    seed: u64,
    max_tries: u64,
}

#[derive(Serialize)]
struct VerifyS {
    s: usize,
    independent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    dependent_columns: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct SampleOutput {
    params: SampleParams,
    matrix: MatrixJson,
    max_column_weight: usize,
    max_row_weight: usize,
    stats: LdpcStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify_s: Option<VerifyS>,
}

fn weights(m: &IntegerMatrix) -> (usize, usize) {
    let nz = |v: &[num::Z]| v.iter().filter(|x| !num_traits::Zero::is_zero(*x)).count();
    let col = (0..m.cols()).map(|j| nz(&m.col(j))).max().unwrap_or(0);
    let row = (0..m.rows()).map(|i| nz(m.row(i))).max().unwrap_or(0);
    (col, row)
}

pub fn sample_matrix(a: &SampleArgs, f: &FileConfig, format: Format, sink: &Sink) -> Result<u8, Failure> {
    if a.d < 3 {
        return Err(Failure::Usage(format!("--d must be at least 3, got {}", a.d)));
    }
    let c = match &a.c {
        Some(s) => num::parse_rational(s).map_err(|e| Failure::Usage(format!("--c: {e}")))?,
        None => walk::default_c(a.d)?,
    };
    let s = match a.s {
        Some(s) => s,
        None => walk::admissible_s(a.m, a.n, a.d, &c)?,
    };
    let p = LdpcParams {
        m: a.m,
        n: a.n,
        d: a.d,
        s,
        c: c.clone(),
        max_tries: a.max_tries.or(f.max_tries).unwrap_or(1000),
        seed: a.seed.or(f.seed).unwrap_or(0),
    };
    let sample = walk::sample_ldpc(&p)?;
    let verify_s = match a.verify_s {
        Some(k) => {
            let cols: Vec<_> = (0..sample.matrix.cols())
                .map(|j| parallelotope::linalg::BitVec::from_parity(&sample.matrix.col(j)))
                .collect();
            let dep = walk::dependent_subset(&cols, k)?;
            Some(VerifyS {
                s: k,
                independent: dep.is_none(),
                dependent_columns: dep,
            })
        }
        None => None,
    };
    let (max_column_weight, max_row_weight) = weights(&sample.matrix);
    let out = SampleOutput {
        params: SampleParams {
            m: p.m,
            n: p.n,
            d: p.d,
            s,
            c: num::fmt_rational(&c),
            seed: p.seed,
            max_tries: p.max_tries,
        },
        matrix: MatrixJson::from(&sample.matrix),
        max_column_weight,
        max_row_weight,
        stats: sample.stats,
        verify_s,
    };
    let name = format!("sample-m{}-n{}-d{}-seed{}", p.m, p.n, p.d, p.seed);
    match format {
        Format::Json => sink.write(&format!("{name}.json"), &to_json(&out))?,
        Format::Text => {
            let mut text = format!(
                "m = {} n = {} d = {} s = {} c = {} seed = {}\ntries = {} row bound = {} max row weight = {} max column weight = {}\n",
                p.m,
                p.n,
                p.d,
                s,
                out.params.c,
                p.seed,
                out.stats.tries,
                out.stats.row_bound,
                max_row_weight,
                max_column_weight
            );
            if let Some(v) = &out.verify_s {
                text.push_str(&format!(
                    "every {} columns independent over GF(2): {}\n",
                    v.s, v.independent
                ));
            }
            sink.write(&format!("{name}.txt"), &text)?;
        }
        Format::Hrep => return Err(Failure::Usage("--format hrep applies to construct only".into())),
    }
    Ok(match &out.verify_s {
        Some(v) if !v.independent => 1,
        _ => 0,
    })
}

#[derive(Serialize)]
struct VerifyOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    tiling: Option<TilingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    suite: Option<SuiteResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unverifiable: Option<String>,
    pass: bool,
}

fn fixture_parallelotope(fx: &Fixture) -> Result<Option<Parallelotope>, Failure> {
    let Some(body) = &fx.body else {
        return Ok(None);
    };
    let body = HPolytope::from_json(body)?;
    let lattice = match &fx.lattice {
        Some(l) => Lattice::from_json(l)?,
        None => Lattice::integer(body.ambient_dim()),
    };
    let measures = body.measures()?;
    Ok(Some(Parallelotope {
        lattice,
        body,
        measures,
    }))
}

pub fn verify(a: &VerifyArgs, f: &FileConfig, format: Format, sink: &Sink) -> Result<u8, Failure> {
    let fx: Fixture = parse_json(&a.input)?;
    let report = match &a.report {
        Some(p) => Some(parse_json::<ConstructionReport>(p)?),
        None => fx.report.clone(),
    };
    let samples = a.samples.or(f.samples).unwrap_or(10_000);
    let seed = a.seed.or(f.seed).unwrap_or(0);
    let (tiling, unverifiable) = match fixture_parallelotope(&fx)? {
        Some(p) => (Some(verify::verify_tiling(&p, samples, seed)?), None),
        None => (None, Some("no body in fixture; tiling cannot be checked".to_string())),
    };
    let suite = report.as_ref().map(inequality_suite);
    let failed = tiling.as_ref().is_some_and(|t| !t.pass) || suite.as_ref().is_some_and(|s| !s.passed());
    let out = VerifyOutput {
        pass: !failed && unverifiable.is_none(),
        tiling,
        suite,
        unverifiable,
    };
    let stem = a.input.file_stem().and_then(|s| s.to_str()).unwrap_or("fixture");
    match format {
        Format::Json => sink.write(&format!("verify-{stem}.json"), &to_json(&out))?,
        Format::Text => {
            let mut text = String::new();
            if let Some(t) = &out.tiling {
                text.push_str(&tiling_line(t));
            }
            if let Some(u) = &out.unverifiable {
                text.push_str(&format!("tiling: unverifiable  {u}\n"));
            }
            if let Some(s) = &out.suite {
                text.push_str(&suite_lines(s));
            }
            text.push_str(if out.pass { "result: pass\n" } else { "result: FAIL\n" });
            sink.write(&format!("verify-{stem}.txt"), &text)?;
        }
        Format::Hrep => return Err(Failure::Usage("--format hrep applies to construct only".into())),
    }
    Ok(if failed {
        1
    } else if out.unverifiable.is_some() {
        2
    } else {
        0
    })
}

#[derive(Serialize)]
struct WalkRow {
    m: usize,
    t: u64,
    exact: String,
    exact_f64: f64,
    bound: String,
    bound_f64: f64,
    empirical: f64,
    samples: u64,
    exact_le_bound: bool,
}

#[derive(Serialize)]
struct WalkOutput {
    seed: u64,
    rows: Vec<WalkRow>,
}

pub fn walk_stats(a: &WalkArgs, f: &FileConfig, format: Format, sink: &Sink) -> Result<u8, Failure> {
    let ms = if a.m.is_empty() { vec![2, 3, 4] } else { a.m.clone() };
    let ts = if a.t.is_empty() { (1..=6).collect() } else { a.t.clone() };
    if ms.contains(&0) {
        return Err(Failure::Usage("--m entries must be positive".into()));
    }
    let samples = a.samples.or(f.samples).unwrap_or(10_000);
    let seed = a.seed.or(f.seed).unwrap_or(0);
    let cells: Vec<(usize, u64)> = ms.iter().flat_map(|&m| ts.iter().map(move |&t| (m, t))).collect();
    let rows: Vec<WalkRow> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(m, t))| {
            let exact = walk::return_prob_exact(m, t);
            let bound = walk::return_prob_bound(m, t);
            let mut rng = walk::stream_rng(seed, i as u64);
            let hits = (0..samples)
                .filter(|_| walk::walk_with(m, t, &mut rng).is_zero())
                .count();
            WalkRow {
                m,
                t,
                exact_f64: num::to_f64(&exact),
                bound_f64: num::to_f64(&bound),
                exact_le_bound: exact <= bound,
                exact: num::fmt_rational(&exact),
                bound: num::fmt_rational(&bound),
                empirical: if samples == 0 {
                    0.0
                } else {
                    hits as f64 / samples as f64
                },
                samples,
            }
        })
        .collect();
    let ok = rows.iter().all(|r| r.exact_le_bound);
    let out = WalkOutput { seed, rows };
    match format {
        Format::Json => sink.write("walk-stats.json", &to_json(&out))?,
        Format::Text => {
            let mut text = format!(
                "{:>4} {:>4} {:>14} {:>14} {:>10}  exact\n",
                "m", "t", "exact", "bound", "empirical"
            );
            for r in &out.rows {
                text.push_str(&format!(
                    "{:>4} {:>4} {:>14.6e} {:>14.6e} {:>10.5}  {}\n",
                    r.m, r.t, r.exact_f64, r.bound_f64, r.empirical, r.exact
                ));
            }
            sink.write("walk-stats.txt", &text)?;
        }
        Format::Hrep => return Err(Failure::Usage("--format hrep applies to construct only".into())),
    }
    Ok(if ok { 0 } else { 1 })
}
