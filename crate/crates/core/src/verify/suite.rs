//! Re-checks a construction report's inequalities from its own numbers.
//!
//! Nothing is trusted from derived fields: bounds are rebuilt from `n`, `m`,
//! `s`, the inner ratio and the norm certificate, and the norm certificate
//! itself is re-verified against `B`.

use std::fmt::Display;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::construction::{BaseLevel, ConstructionReport, Level, LevelTrace, MatrixSource};
use crate::error::Result;
use crate::interval::Interval;
use crate::linalg::{IntegerMatrix, RationalMatrix};
use crate::num::{self, Q};
use crate::surd::{Surd, SurdJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub checks: Vec<Check>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str, depth: Option<usize>) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name && c.depth == depth)
    }

    fn push(&mut self, name: &str, depth: Option<usize>, outcome: Result<(bool, String)>) {
        let (status, detail) = match outcome {
            Ok((ok, d)) => (if ok { Status::Pass } else { Status::Fail }, d),
            Err(e) => (Status::Fail, format!("malformed report: {e}")),
        };
        self.checks.push(Check {
            name: name.into(),
            depth,
            status,
            detail,
        });
    }

    fn skip(&mut self, name: &str, depth: Option<usize>, why: &str) {
        self.checks.push(Check {
            name: name.into(),
            depth,
            status: Status::Skipped,
            detail: why.into(),
        });
    }
}

fn surd(j: &SurdJson) -> Result<Surd> {
    Surd::from_json(j)
}

fn le_detail(lhs: &Surd, rhs: &Surd) -> (bool, String) {
    (lhs.le(rhs), format!("{lhs} <= {rhs}"))
}

fn cmp_detail<T: Display>(ok: bool, what: T) -> (bool, String) {
    (ok, what.to_string())
}

/// Exact positive semidefiniteness by symmetric elimination.
pub fn is_psd(m: &RationalMatrix) -> bool {
    let n = m.rows();
    let mut a: Vec<Vec<Q>> = m.to_rows();
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_negative() {
            return false;
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &p;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
    }
    true
}

/// `||B||^2 <= u` iff `u I - B B^T` is positive semidefinite.
pub fn norm_sq_at_most(b: &IntegerMatrix, u: &Q) -> bool {
    let bq = b.to_rational();
    let g = bq.matmul(&bq.transpose()).expect("shape");
    let rows: Vec<Vec<Q>> = (0..g.rows())
        .map(|i| {
            (0..g.cols())
                .map(|j| if i == j { u - g.get(i, j) } else { -g.get(i, j) })
                .collect()
        })
        .collect();
    if rows.is_empty() {
        return !u.is_negative();
    }
    is_psd(&RationalMatrix::from_rows(rows).expect("square"))
}

/// Ratio of the body that a level actually hands to its parent.
fn effective_ratio(levels: &[Level], depth: usize) -> Option<&SurdJson> {
    let base = levels.iter().find_map(|l| match l {
        Level::Base(b) if b.depth == depth => Some(&b.ratio),
        _ => None,
    });
    base.or_else(|| {
        levels.iter().find_map(|l| match l {
            Level::Step(t) if t.depth == depth && !t.fallback_to_base => Some(&t.ratio_total),
            _ => None,
        })
    })
}

fn check_step(out: &mut SuiteResult, t: &LevelTrace, levels: &[Level]) {
    let d = Some(t.depth);
    let parts = (|| -> Result<_> {
        Ok((
            surd(&t.ratio_total)?,
            surd(&t.ratio_k1)?,
            surd(&t.ratio_k2)?,
            surd(&t.inner_ratio)?,
            t.norm_b.to_certificate()?,
            t.b.to_integer()?,
        ))
    })();
    let (total, k1, k2, inner, norm, b) = match parts {
        Ok(p) => p,
        Err(e) => {
            out.push("parse", d, Err(e));
            return;
        }
    };
    let s = Q::from_integer(t.s.into());
    let k1_bound = if t.s == 0 {
        None
    } else {
        Some(Surd::sqrt(&s).scale(&(num::rat(2 * (t.n - t.m) as i64, 1) / &s)))
    };

    out.push(
        "additivity",
        d,
        Ok((total == k1.add(&k2), format!("{total} = {k1} + {k2}"))),
    );

    out.push(
        "norm-certificate",
        d,
        Ok(cmp_detail(
            norm_sq_at_most(&b, &norm.squared_upper)
                && &norm.value_upper * &norm.value_upper >= norm.squared_upper
                && !norm.value_upper.is_negative(),
            format!(
                "||B||^2 <= {} and ||B|| <= {}",
                num::fmt_rational(&norm.squared_upper),
                num::fmt_rational(&norm.value_upper)
            ),
        )),
    );

    if t.m < t.n {
        let svp = t
            .shortest_kernel_vector_sq
            .as_deref()
            .map(num::parse_rational)
            .transpose();
        out.push(
            "svp-exceeds-s",
            d,
            svp.map(|v| match v {
                Some(v) => cmp_detail(v > s, format!("lambda_1^2 = {} > s = {}", num::fmt_rational(&v), t.s)),
                None => (false, "no kernel minimum recorded".into()),
            }),
        );
        match &k1_bound {
            Some(bound) if t.k1_inradius_certified => out.push("k1-inradius", d, Ok(le_detail(&k1, bound))),
            _ => out.push("k1-inradius", d, Ok((false, "inradius sqrt(s)/2 not certified".into()))),
        }
    } else {
        out.skip("svp-exceeds-s", d, "m = n, no kernel part");
        out.skip("k1-inradius", d, "m = n, no kernel part");
    }

    let k2_bound = inner.scale(&norm.value_upper);
    out.push("k2-linear-image", d, Ok(le_detail(&k2, &k2_bound)));

    match effective_ratio(levels, t.depth + 1) {
        Some(j) => out.push(
            "inner-consistency",
            d,
            surd(j).map(|r| {
                cmp_detail(
                    r == inner,
                    format!("inner ratio {inner}, level {} reports {r}", t.depth + 1),
                )
            }),
        ),
        None => out.skip("inner-consistency", d, "inner level not in report"),
    }

    let rec = k1_bound.clone().unwrap_or_else(Surd::zero).add(&k2_bound);
    out.push("recursive-inequality", d, Ok(le_detail(&total, &rec)));

    if let Some(c) = &t.completion {
        let r = (|| -> Result<_> {
            let a = num::parse_rational(&c.a_squared_lower)?;
            let bu = num::parse_rational(&c.b_squared_upper)?;
            let numeric = bu <= Q::one() + &a;
            Ok(cmp_detail(
                numeric || c.structural_pass,
                format!(
                    "||B||^2 <= {} vs 1 + ||A||^2 >= {} (structural: {})",
                    num::fmt_rational(&bu),
                    num::fmt_rational(&(Q::one() + a)),
                    c.structural_pass
                ),
            ))
        })();
        out.push("completion-norm", d, r);
    }

    let two_n = Surd::from_int(2 * t.n as i64);
    if t.source == MatrixSource::Override {
        out.skip("within-2n", d, "override level");
    } else {
        let within = total.le(&two_n);
        out.push(
            "within-2n",
            d,
            Ok(cmp_detail(
                within != t.fallback_to_base,
                format!("ratio {total} vs 2n = {two_n}, fallback = {}", t.fallback_to_base),
            )),
        );
    }
}

fn check_base(out: &mut SuiteResult, b: &BaseLevel) {
    let d = Some(b.depth);
    let parts = (|| -> Result<_> { Ok((surd(&b.ratio)?, surd(&b.volume)?, surd(&b.covolume)?)) })();
    let (ratio, vol, covol) = match parts {
        Ok(p) => p,
        Err(e) => {
            out.push("parse", d, Err(e));
            return;
        }
    };
    out.push(
        "base-volume",
        d,
        Ok((vol == covol, format!("vol {vol} = covol {covol}"))),
    );
    // inradius 1/2 gives ratio <= n / (1/2)
    if b.half_ball_certified {
        out.push(
            "inradius-bound",
            d,
            Ok(le_detail(&ratio, &Surd::from_int(2 * b.n as i64))),
        );
    } else {
        out.push("inradius-bound", d, Ok((false, "inradius 1/2 not certified".into())));
    }
}

/// Every inequality the report's numbers should satisfy, checked exactly or
/// with outward-rounded intervals.
pub fn inequality_suite(report: &ConstructionReport) -> SuiteResult {
    let mut out = SuiteResult::default();
    for level in &report.levels {
        match level {
            Level::Base(b) => check_base(&mut out, b),
            Level::Step(t) => check_step(&mut out, t, &report.levels),
        }
    }

    let f = &report.final_;
    let iso = (|| -> Result<_> {
        let ratio = Interval::try_from(&f.ratio_interval)?;
        let lb = Interval::try_from(&f.isoperimetric_lb)?;
        Ok(cmp_detail(lb.certainly_le(&ratio), format!("{lb} <= {ratio}")))
    })();
    out.push("isoperimetric", None, iso);

    let two_n = Surd::from_int(2 * report.n as i64);
    let within = match &f.ratio {
        Some(j) => surd(j).map(|r| le_detail(&r, &two_n)),
        None => Interval::try_from(&f.ratio_interval)
            .map(|iv| cmp_detail(iv.certainly_le(&Interval::point(num::rat(2 * report.n as i64, 1))), iv)),
    };
    if report.config.override_levels > 0 {
        out.skip("final-within-2n", None, "override levels present");
    } else {
        out.push("final-within-2n", None, within);
    }

    match (&f.ratio, effective_ratio(&report.levels, 0)) {
        (Some(r), Some(top)) => out.push(
            "final-matches-top",
            None,
            (|| {
                Ok(cmp_detail(
                    surd(r)? == surd(top)?,
                    format!("{} vs {}", r.exact, top.exact),
                ))
            })(),
        ),
        _ => out.skip("final-matches-top", None, "no materialized top level"),
    }

    match &report.induction_scan {
        Some(s) => out.push(
            "induction-scan",
            None,
            Ok(cmp_detail(
                s.failures.is_empty() && s.holds == s.points,
                format!("{}/{} points hold", s.holds, s.points),
            )),
        ),
        None => out.skip("induction-scan", None, "no scan in report"),
    }
    out
}
