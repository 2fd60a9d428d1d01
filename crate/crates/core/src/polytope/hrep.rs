//! Plain-text H-representation in the cdd layout: each row `b -a_1 ... -a_n`
//! encodes `b - <a, x> >= 0`; rows listed under `linearity` are equalities
//! and cut out the subspace.

use std::fmt::Write;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::Subspace;
use crate::num::{self, Q};

use super::{HPolytope, Halfspace};

pub(super) fn write(p: &HPolytope) -> String {
    let n = p.ambient_dim();
    let eqs: Vec<Vec<Q>> = match p.subspace() {
        Some(s) => s.orthogonal_complement().basis().to_cols(),
        None => Vec::new(),
    };
    let rows = p.halfspaces().len() + eqs.len();
    let mut out = String::new();
    writeln!(out, "* ambient_dim {n}").unwrap();
    writeln!(out, "H-representation").unwrap();
    if !eqs.is_empty() {
        let first = p.halfspaces().len() + 1;
        let idx: Vec<String> = (first..first + eqs.len()).map(|i| i.to_string()).collect();
        writeln!(out, "linearity {} {}", eqs.len(), idx.join(" ")).unwrap();
    }
    writeln!(out, "begin").unwrap();
    writeln!(out, "{rows} {} rational", n + 1).unwrap();
    for h in p.halfspaces() {
        let mut line = num::fmt_rational(&h.b);
        for v in &h.a {
            line.push(' ');
            line.push_str(&num::fmt_rational(&-v.clone()));
        }
        writeln!(out, "{line}").unwrap();
    }
    for e in &eqs {
        let mut line = String::from("0");
        for v in e {
            line.push(' ');
            line.push_str(&num::fmt_rational(v));
        }
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "end").unwrap();
    out
}

pub(super) fn parse(text: &str) -> Result<HPolytope> {
    let bad = |m: &str| Error::Parse(format!("H-representation: {m}"));
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('*'));
    let mut linearity: Vec<usize> = Vec::new();
    loop {
        let l = lines.next().ok_or_else(|| bad("missing begin"))?;
        if l == "begin" {
            break;
        }
        if let Some(rest) = l.strip_prefix("linearity") {
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad linearity line")))
                .collect::<Result<_>>()?;
            let (&k, idx) = nums.split_first().ok_or_else(|| bad("empty linearity line"))?;
            if idx.len() != k || idx.contains(&0) {
                return Err(bad("linearity count mismatch"));
            }
            linearity = idx.iter().map(|i| i - 1).collect();
        }
    }
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("missing size line"))?
        .split_whitespace()
        .collect();
    if header.len() < 2 {
        return Err(bad("size line needs rows and columns"));
    }
    let rows: usize = header[0].parse().map_err(|_| bad("bad row count"))?;
    let cols: usize = header[1].parse().map_err(|_| bad("bad column count"))?;
    if cols < 2 {
        return Err(bad("need at least one coordinate"));
    }
    let n = cols - 1;
    let mut hs = Vec::new();
    let mut eqs = Vec::new();
    for i in 0..rows {
        let l = lines.next().ok_or_else(|| bad("too few rows"))?;
        let vals: Vec<Q> = l.split_whitespace().map(num::parse_rational).collect::<Result<_>>()?;
        if vals.len() != cols {
            return Err(bad("row length differs from declared column count"));
        }
        if linearity.contains(&i) {
            if !vals[0].is_zero() {
                return Err(bad("equalities must pass through the origin"));
            }
            eqs.push(vals[1..].to_vec());
        } else {
            hs.push(Halfspace::new(
                vals[1..].iter().map(|v| -v.clone()).collect(),
                vals[0].clone(),
            ));
        }
    }
    if lines.next() != Some("end") {
        return Err(bad("missing end"));
    }
    let subspace = if eqs.is_empty() {
        None
    } else {
        let normals = Subspace::span(n, &eqs)?;
        Some(normals.orthogonal_complement())
    };
    HPolytope::new(n, subspace, hs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn cube_roundtrip() {
        let c = HPolytope::cube(3, &rat(1, 2));
        let text = c.to_hrep();
        assert!(text.contains("6 4 rational"));
        assert_eq!(HPolytope::from_hrep(&text).unwrap(), c);
    }

    #[test]
    fn subspace_roundtrip() {
        let sub = Subspace::new(crate::linalg::RationalMatrix::from_ratios(&[&[(1, 1)], &[(1, 1)]])).unwrap();
        let p = HPolytope::new(
            2,
            Some(sub),
            vec![
                Halfspace::new(vec![rat(1, 1), rat(1, 1)], rat(1, 1)),
                Halfspace::new(vec![rat(-1, 1), rat(-1, 1)], rat(1, 1)),
            ],
        )
        .unwrap();
        let text = p.to_hrep();
        assert!(text.contains("linearity 1 3"));
        let back = HPolytope::from_hrep(&text).unwrap();
        assert_eq!(back.measures().unwrap(), p.measures().unwrap());
    }

    #[test]
    fn rejects_garbage() {
        assert!(HPolytope::from_hrep("begin\n1 3 rational\n1 2\nend").is_err());
        assert!(HPolytope::from_hrep("nothing here").is_err());
    }
}
