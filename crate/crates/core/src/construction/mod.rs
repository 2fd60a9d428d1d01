//! Recursive construction of lattice parallelotopes.
//!
//! A level either takes the Voronoi cell of its lattice (ratio at most `2n`)
//! or splits `R^n = V^⊥ + V` along the row space `V` of an integer matrix
//! `B`: the Voronoi cell `K1` of `V^⊥ ∩ L` is combined with the image under
//! `T = B^T (B B^T)^{-1}` of a parallelotope for the lattice `B proj_V L`,
//! which is built recursively in dimension `m`.

mod report;
pub mod schedule;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalJson};
use crate::lattice::{
    apply_matrix_to_lattice, intersect_with_kernel, project_lattice, row_span, shortest_vector_length_sq, Lattice,
    ShortestVector, DEFAULT_BUDGET,
};
use crate::linalg::{
    self, columns_independent, complete_to_full_rank, completion_norm_check, norm_sq, operator_norm_rayleigh, Field,
    IntegerMatrix, MatrixJson,
};
use crate::num::{self, Q};
use crate::polytope::{
    inradius_certify_sq, linear_image, orthogonal_product, product_measures, voronoi_cell_with_budget, BodyMeasures,
    HPolytope,
};
use crate::surd::Surd;
use crate::walk::{self, LdpcParams};

pub use report::{
    BaseLevel, CompletionJson, ConfigJson, ConstructionReport, FinalJson, Level, LevelTrace, MatrixSource, Mode,
    NormJson, ScanSummary, ScheduleEntry,
};
pub use schedule::{
    choose_m, induction_check, isoperimetric_ratio_lower, log_spaced, predicted_bound, recursion_cutoff, schedule_m,
    unit_ball_volume, InductionCheck,
};

/// Working precision for reported enclosures.
pub const REPORT_BITS: u32 = 96;

/// A body together with the lattice it tiles by, and its exact measures.
#[derive(Clone, Debug)]
pub struct Parallelotope {
    pub lattice: Lattice,
    pub body: HPolytope,
    pub measures: BodyMeasures,
}

/// An externally supplied matrix for one recursion level. When `s` is
/// absent the largest `s` with every `s` columns independent is computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverrideLevel {
    pub matrix: IntegerMatrix,
    pub s: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RecursionConfig {
    pub kappa: Q,
    pub epsilon: Q,
    /// Base case is forced for `n` at or below this; `4 kappa^2` if unset.
    pub min_recursion_n: Option<Q>,
    pub max_depth: usize,
    pub seed: u64,
    /// Largest dimension in which bodies are materialized.
    pub dim_cap: usize,
    pub max_tries: u64,
    pub svp_budget: u64,
    /// `matrix_override[k]` replaces the sampled matrix at depth `k`.
    pub matrix_override: Vec<OverrideLevel>,
    pub bound_only: bool,
    /// Points in the induction-inequality scan of bound-only reports.
    pub scan_points: usize,
}

impl Default for RecursionConfig {
    fn default() -> Self {
        RecursionConfig {
            kappa: num::rat(4, 1),
            epsilon: num::rat(1, 1),
            min_recursion_n: None,
            max_depth: 8,
            seed: 0,
            dim_cap: 8,
            max_tries: 1000,
            svp_budget: DEFAULT_BUDGET,
            matrix_override: Vec::new(),
            bound_only: false,
            scan_points: 1000,
        }
    }
}

impl RecursionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kappa < num::rat(4, 1) {
            return Err(Error::InvalidParameter("kappa must be at least 4".into()));
        }
        if !(self.epsilon > Q::zero() && self.epsilon <= num::rat(2, 1)) {
            return Err(Error::InvalidParameter("epsilon must lie in (0, 2]".into()));
        }
        if self.dim_cap == 0 || self.max_tries == 0 || self.svp_budget == 0 {
            return Err(Error::InvalidParameter("caps and budgets must be positive".into()));
        }
        Ok(())
    }

    pub fn cutoff(&self) -> Q {
        self.min_recursion_n
            .clone()
            .unwrap_or_else(|| recursion_cutoff(&self.kappa))
    }

    fn to_json(&self) -> ConfigJson {
        ConfigJson {
            kappa: num::fmt_rational(&self.kappa),
            epsilon: num::fmt_rational(&self.epsilon),
            seed: self.seed,
            dim_cap: self.dim_cap,
            max_depth: self.max_depth,
            max_tries: self.max_tries,
            min_recursion_n: num::fmt_rational(&self.cutoff()),
            override_levels: self.matrix_override.len(),
        }
    }
}

fn two_n(n: usize) -> Surd {
    Surd::from_int(2 * n as i64)
}

/// Voronoi cell of a full-rank integer lattice, checked to have ratio at most
/// `2n` and volume equal to the covolume.
pub fn base_case(l: &Lattice, dim_cap: usize, svp_budget: u64) -> Result<(Parallelotope, BaseLevel)> {
    let n = l.ambient_dim();
    if !l.is_full_rank() || !l.is_integer() {
        return Err(Error::InvalidParameter(
            "base case needs a full-rank integer lattice".into(),
        ));
    }
    if n > dim_cap {
        return Err(Error::DimensionCap { dim: n, cap: dim_cap });
    }
    let body = voronoi_cell_with_budget(l, svp_budget)?;
    let measures = body.measures()?;
    let covol = l.covolume().as_surd();
    if measures.volume != covol {
        return Err(Error::Verification(format!(
            "Voronoi cell volume {} differs from covolume {covol}",
            measures.volume
        )));
    }
    if !measures.ratio.le(&two_n(n)) {
        return Err(Error::Verification(format!(
            "Voronoi ratio {} exceeds 2n",
            measures.ratio
        )));
    }
    let level = BaseLevel {
        depth: 0,
        n,
        facets: body.halfspaces().len(),
        ratio: measures.ratio.to_json(REPORT_BITS),
        volume: measures.volume.to_json(REPORT_BITS),
        covolume: covol.to_json(REPORT_BITS),
        half_ball_certified: inradius_certify_sq(&body, &num::rat(1, 4)),
    };
    Ok((
        Parallelotope {
            lattice: l.clone(),
            body,
            measures,
        },
        level,
    ))
}

fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for j in start..=n - (k - cur.len()) {
            cur.push(j);
            if !go(j + 1, n, k, cur, f) {
                return false;
            }
            cur.pop();
        }
        true
    }
    k <= n && go(0, n, k, &mut Vec::with_capacity(k), f)
}

/// Subsets the rational `s`-wise check may visit.
const RATIONAL_SWISE_BUDGET: u64 = 2_000_000;

/// Whether every `s` columns of `b` are linearly independent over `Q`.
///
/// Independence over GF(2) implies it over `Q`, so the fast GF(2) check is
/// tried first and only a GF(2) dependency triggers the exhaustive rational
/// check.
pub fn s_wise_independent_rational(b: &IntegerMatrix, s: usize) -> Result<bool> {
    let n = b.cols();
    if s == 0 {
        return Ok(true);
    }
    if s > n {
        return Err(Error::InvalidParameter(format!("s = {s} exceeds the {n} columns")));
    }
    if s > b.rows() {
        return Ok(false);
    }
    if walk::s_wise_independent(b, s).unwrap_or(false) {
        return Ok(true);
    }
    let count = num::binomial(n as u64, s as u64);
    if count > BigInt::from(RATIONAL_SWISE_BUDGET) {
        return Err(Error::Unverifiable(format!("{count} column subsets of size {s}")));
    }
    let mut ok = true;
    for_each_combination(n, s, &mut |cols| {
        ok = columns_independent(b, cols, Field::Q).expect("indices in range");
        ok
    });
    Ok(ok)
}

/// Largest `s` such that every `s` columns of `b` are independent over `Q`.
pub fn max_independent_s(b: &IntegerMatrix) -> Result<usize> {
    let cap = b.rows().min(b.cols());
    let mut s = 0;
    while s < cap && s_wise_independent_rational(b, s + 1)? {
        s += 1;
    }
    Ok(s)
}

/// Limits shared by the geometric steps.
#[derive(Clone, Copy, Debug)]
pub struct StepLimits {
    pub dim_cap: usize,
    pub svp_budget: u64,
}

impl Default for StepLimits {
    fn default() -> Self {
        StepLimits {
            dim_cap: 8,
            svp_budget: DEFAULT_BUDGET,
        }
    }
}

/// `K = K1 + T K2^0` for a full-rank integer lattice `l`, an `m x n` integer
/// matrix `b` of rank `m` with every `s` columns independent, and a
/// parallelotope `inner` for `B proj_V l`.
pub fn inductive_step(
    l: &Lattice,
    b: &IntegerMatrix,
    s: usize,
    inner: &Parallelotope,
    limits: StepLimits,
) -> Result<(Parallelotope, LevelTrace)> {
    let n = l.ambient_dim();
    let m = b.rows();
    if b.cols() != n {
        return Err(Error::Dimension("B must have one column per coordinate".into()));
    }
    if !l.is_full_rank() || !l.is_integer() {
        return Err(Error::InvalidParameter("lattice must be full-rank and integral".into()));
    }
    if s == 0 || s > m {
        return Err(Error::InvalidParameter(format!("need 1 <= s <= m, got s = {s}")));
    }
    if n > limits.dim_cap {
        return Err(Error::DimensionCap {
            dim: n,
            cap: limits.dim_cap,
        });
    }
    let rank = linalg::rank_over_rationals(b);
    if rank != m {
        return Err(Error::RankDeficient { rank, expected: m });
    }
    if !s_wise_independent_rational(b, s)? {
        return Err(Error::InvalidParameter(format!("some {s} columns of B are dependent")));
    }

    let v = row_span(b)?;
    let target = apply_matrix_to_lattice(b, &project_lattice(l, &v)?)?;
    if !target.same_lattice(&inner.lattice) {
        return Err(Error::InvalidParameter(
            "inner body is not for the lattice B proj_V L".into(),
        ));
    }
    let bq = b.to_rational();
    let t = bq
        .transpose()
        .matmul(&linalg::inverse(&bq.matmul(&bq.transpose())?).map_err(|_| Error::NotInjective)?)?;
    let k2 = linear_image(&t, &inner.body)?;
    let m2 = k2.measures()?;

    let s_q = Q::from_integer(BigInt::from(s));
    let (body, m1, svp, inradius_ok) = if m < n {
        let kl = intersect_with_kernel(l, b)?;
        let red = kl.reduced();
        let first = norm_sq(&red.basis().col(0));
        let sv = match shortest_vector_length_sq(&red, &first, limits.svp_budget)? {
            ShortestVector::Value(q) => q,
            ShortestVector::ExceedsBound => first,
        };
        if sv <= s_q {
            return Err(Error::InvalidParameter(format!(
                "kernel lattice has a vector of squared length {sv} <= s = {s}"
            )));
        }
        let k1 = voronoi_cell_with_budget(&red, limits.svp_budget)?;
        let inradius_ok = inradius_certify_sq(&k1, &(&s_q / Q::from_integer(4.into())));
        let m1 = k1.measures()?;
        (orthogonal_product(&k1, &k2)?, Some(m1), Some(sv), inradius_ok)
    } else {
        (k2, None, None, true)
    };
    let total = match &m1 {
        Some(m1) => product_measures(m1, &m2)?,
        None => m2.clone(),
    };
    let covol = l.covolume().as_surd();
    if total.volume != covol {
        return Err(Error::Verification(format!(
            "body volume {} differs from covolume {covol}",
            total.volume
        )));
    }

    let norm = operator_norm_rayleigh(b);
    let ratio_k1 = m1.as_ref().map_or_else(Surd::zero, |x| x.ratio.clone());
    let k1_bound = Surd::sqrt(&s_q).scale(&(num::rat(2 * (n - m) as i64, 1) / &s_q));
    let k2_bound = inner.measures.ratio.scale(&norm.value_upper);
    let rec = k1_bound.add(&k2_bound);
    let j = |x: &Surd| x.to_json(REPORT_BITS);
    let trace = LevelTrace {
        depth: 0,
        n,
        m,
        d: None,
        s,
        source: MatrixSource::Override,
        seed: None,
        b: MatrixJson::from(b),
        sampler: None,
        completion: None,
        norm_b: NormJson::from(&norm),
        shortest_kernel_vector_sq: svp.as_ref().map(num::fmt_rational),
        k1_inradius_certified: inradius_ok,
        ratio_k1: j(&ratio_k1),
        ratio_k2: j(&m2.ratio),
        ratio_total: j(&total.ratio),
        inner_ratio: j(&inner.measures.ratio),
        ratio_k1_bound: j(&k1_bound),
        ratio_k2_bound: j(&k2_bound),
        recursive_bound: j(&rec),
        volume: j(&total.volume),
        trivial_bound_2n: 2 * n,
        fallback_to_base: false,
    };
    Ok((
        Parallelotope {
            lattice: l.clone(),
            body,
            measures: total,
        },
        trace,
    ))
}

/// Result of [`construct`]: the body (absent for bound-only runs) and the
/// report.
#[derive(Clone, Debug)]
pub struct Construction {
    pub parallelotope: Option<Parallelotope>,
    pub report: ConstructionReport,
}

struct Ctx<'a> {
    cfg: &'a RecursionConfig,
    levels: Vec<Level>,
    seeds: Vec<u64>,
    notes: Vec<String>,
}

impl Ctx<'_> {
    fn limits(&self) -> StepLimits {
        StepLimits {
            dim_cap: self.cfg.dim_cap,
            svp_budget: self.cfg.svp_budget,
        }
    }

    fn base(&mut self, l: &Lattice, depth: usize) -> Result<Parallelotope> {
        let (p, mut level) = base_case(l, self.cfg.dim_cap, self.cfg.svp_budget)?;
        level.depth = depth;
        self.levels.push(Level::Base(level));
        Ok(p)
    }

    fn build(&mut self, l: &Lattice, depth: usize) -> Result<Parallelotope> {
        let n = l.ambient_dim();
        if let Some(ov) = self.cfg.matrix_override.get(depth) {
            let s = match ov.s {
                Some(s) => s,
                None => max_independent_s(&ov.matrix)?,
            };
            let (p, trace) = self.step(l, &ov.matrix, s, depth)?;
            self.levels.push(Level::Step(Box::new(trace)));
            return Ok(p);
        }
        if depth >= self.cfg.max_depth || Q::from_integer(BigInt::from(n)) <= self.cfg.cutoff() {
            return self.base(l, depth);
        }
        let m = match choose_m(n as u64, &self.cfg.kappa) {
            Ok(m) => m as usize,
            Err(Error::Regime(why)) => {
                self.notes.push(format!("depth {depth}: {why}; using the Voronoi cell"));
                return self.base(l, depth);
            }
            Err(e) => return Err(e),
        };
        let d = walk::choose_d(&self.cfg.epsilon)?;
        let c = walk::default_c(d)?;
        let s = if d <= m { walk::admissible_s(m, n, d, &c)? } else { 0 };
        if s == 0 {
            self.notes.push(format!(
                "depth {depth}: no admissible s >= 1 at n = {n}, m = {m}, d = {d}; using the Voronoi cell"
            ));
            return self.base(l, depth);
        }
        let seed = self.cfg.seed.wrapping_add(depth as u64);
        self.seeds.push(seed);
        let sample = walk::sample_ldpc(&LdpcParams {
            m,
            n,
            d,
            s,
            c,
            max_tries: self.cfg.max_tries,
            seed,
        })?;
        let completion = complete_to_full_rank(&sample.matrix)?;
        let check = completion_norm_check(&sample.matrix, &completion);
        let (p, mut trace) = self.step(l, &completion.b, s, depth)?;
        trace.source = MatrixSource::Sampled;
        trace.d = Some(d);
        trace.seed = Some(seed);
        trace.sampler = Some(sample.stats);
        trace.completion = Some(CompletionJson::new(&completion, &check));
        if !p.measures.ratio.le(&two_n(n)) {
            trace.fallback_to_base = true;
            self.levels.push(Level::Step(Box::new(trace)));
            self.notes
                .push(format!("depth {depth}: step ratio exceeds 2n; using the Voronoi cell"));
            return self.base(l, depth);
        }
        self.levels.push(Level::Step(Box::new(trace)));
        Ok(p)
    }

    fn step(&mut self, l: &Lattice, b: &IntegerMatrix, s: usize, depth: usize) -> Result<(Parallelotope, LevelTrace)> {
        if b.cols() != l.ambient_dim() {
            return Err(Error::Dimension(format!(
                "matrix at depth {depth} has {} columns, lattice dimension is {}",
                b.cols(),
                l.ambient_dim()
            )));
        }
        let v = row_span(b)?;
        let inner_lattice = apply_matrix_to_lattice(b, &project_lattice(l, &v)?)?;
        let inner = self.build(&inner_lattice, depth + 1)?;
        let (p, mut trace) = inductive_step(l, b, s, &inner, self.limits())?;
        trace.depth = depth;
        Ok((p, trace))
    }
}

fn final_json(ratio: Option<&Surd>, ratio_iv: Interval, volume: Option<&Surd>, n: u64, kappa: &Q) -> FinalJson {
    let iso = isoperimetric_ratio_lower(n as usize, &Interval::from_int(1), 64);
    let within = match ratio {
        Some(r) => r.le(&Surd::from_int(2 * n as i64)),
        None => ratio_iv.certainly_le(&Interval::from_int(2 * n as i64)),
    };
    FinalJson {
        ratio: ratio.map(|r| r.to_json(REPORT_BITS)),
        ratio_lo: IntervalJson::from(&ratio_iv).lo,
        ratio_hi: IntervalJson::from(&ratio_iv).hi,
        ratio_interval: IntervalJson::from(&ratio_iv),
        volume: volume.map(|v| v.to_json(REPORT_BITS)),
        covolume: "1".into(),
        isoperimetric_lb: IntervalJson::from(&iso),
        trivial_bound_2n: 2 * n,
        within_trivial_bound: within,
        predicted_bound: IntervalJson::from(&predicted_bound(n, kappa)),
    }
}

/// Build an integer parallelotope for `Z^n`.
///
/// Above `dim_cap`, or with `bound_only`, nothing is materialized and the
/// report carries the dimension schedule, the predicted bound and the cube's
/// closed-form ratio `2n`.
pub fn construct(n: usize, cfg: &RecursionConfig) -> Result<Construction> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if cfg.bound_only || n > cfg.dim_cap {
        let mut notes = Vec::new();
        if !cfg.bound_only {
            notes.push(format!("n = {n} exceeds dim_cap = {}; bound-only report", cfg.dim_cap));
        }
        return Ok(Construction {
            parallelotope: None,
            report: bound_only_report(n as u64, cfg, notes)?,
        });
    }
    let mut ctx = Ctx {
        cfg,
        levels: Vec::new(),
        seeds: Vec::new(),
        notes: Vec::new(),
    };
    let p = ctx.build(&Lattice::integer(n), 0)?;
    let mut levels = ctx.levels;
    levels.sort_by_key(Level::depth);
    let ratio = &p.measures.ratio;
    let report = ConstructionReport {
        version: env!("CARGO_PKG_VERSION").into(),
        n: n as u64,
        mode: Mode::Materialized,
        config: cfg.to_json(),
        seeds: ctx.seeds,
        levels,
        schedule: Vec::new(),
        induction_scan: None,
        final_: final_json(
            Some(ratio),
            ratio.enclose(REPORT_BITS),
            Some(&p.measures.volume),
            n as u64,
            &cfg.kappa,
        ),
        notes: ctx.notes,
    };
    Ok(Construction {
        parallelotope: Some(p),
        report,
    })
}

/// The dimension chain `n -> choose_m(n) -> ...` until the base range.
pub fn schedule_chain(n: u64, kappa: &Q, max_depth: usize) -> Vec<ScheduleEntry> {
    let mut out = Vec::new();
    let mut cur = n;
    for _ in 0..=max_depth {
        let (m, regime) = match choose_m(cur, kappa) {
            Ok(m) => (Some(m), None),
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(ScheduleEntry {
            n: cur,
            m,
            regime,
            predicted_bound: IntervalJson::from(&predicted_bound(cur, kappa)),
            trivial_bound_2n: 2 * cur,
        });
        match m {
            Some(m) => cur = m,
            None => break,
        }
    }
    out
}

/// Induction inequality at `points` log-spaced `n` in `(4 kappa^2, hi]`.
pub fn induction_scan(kappa: &Q, hi: u64, points: usize) -> Result<(ScanSummary, Vec<InductionCheck>)> {
    let lo = num::floor(&recursion_cutoff(kappa));
    let lo: u64 = u64::try_from(lo).map_err(|_| Error::InvalidParameter("kappa too large".into()))?;
    if hi <= lo {
        return Err(Error::InvalidParameter("scan range is empty".into()));
    }
    let checks = log_spaced(lo, hi, points)
        .into_par_iter()
        .map(|n| induction_check(n, kappa))
        .collect::<Result<Vec<_>>>()?;
    Ok((ScanSummary::new(lo, hi, &checks), checks))
}

fn bound_only_report(n: u64, cfg: &RecursionConfig, mut notes: Vec<String>) -> Result<ConstructionReport> {
    let schedule = schedule_chain(n, &cfg.kappa, cfg.max_depth);
    let lo = num::floor(&recursion_cutoff(&cfg.kappa));
    let induction_scan = if cfg.scan_points > 0 && BigInt::from(n) > lo {
        Some(induction_scan(&cfg.kappa, n, cfg.scan_points)?.0)
    } else {
        None
    };
    notes.push("no body materialized; the certified ratio is the cube's 2n".into());
    let two = Surd::from_int(2 * n as i64);
    Ok(ConstructionReport {
        version: env!("CARGO_PKG_VERSION").into(),
        n,
        mode: Mode::BoundOnly,
        config: cfg.to_json(),
        seeds: Vec::new(),
        levels: Vec::new(),
        schedule,
        induction_scan,
        final_: final_json(Some(&two), two.enclose(REPORT_BITS), None, n, &cfg.kappa),
        notes,
    })
}
