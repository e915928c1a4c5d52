//! The sixth monomer-dimer coefficient and the quantities it depends on.
//!
//! With per-vertex averages `C4`, `C6`, `theta` of a `d`-regular bipartite
//! lattice,
//!
//! ```text
//! d6 = 5 C4 / d^6 + C6 / (2 d^6) - 2 theta / d^6
//! ```
//!
//! Everything here is exact rational arithmetic; the sign of `d6` is the
//! point of the whole construction.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::census::CensusReport;
use crate::certify::{verify_certificate, LiftCertificate};
use crate::error::{Error, Result};
use crate::graph::MIN_DEGREE;
use crate::rational::{self, ratio};

pub fn d6_coefficient(c4_bar: &BigRational, c6_bar: &BigRational, theta_bar: &BigRational, d: u32) -> BigRational {
    assert!(d >= 1, "degree must be positive");
    let d6 = BigRational::from_integer(BigInt::from(d).pow(6));
    (c4_bar * BigInt::from(5) + c6_bar / BigInt::from(2) - theta_bar * BigInt::from(2)) / d6
}

/// `(C4, theta)` of K_{2,d}: `d(d-1)/2` and `d(d-1)(d-2)/6`.
pub fn central_counts(d: u64) -> (u64, u64) {
    assert!(d >= 2, "central subgraph needs d >= 2");
    (d * (d - 1) / 2, d * (d - 1) * (d - 2) / 6)
}

/// `theta / C4` of the central copies: `(d - 2) / 3`.
pub fn ratio_target(d: u32) -> BigRational {
    ratio(d as i64 - 2, 3)
}

/// Smallest `d >= 5` whose lattice ratio `(d - 2) / 3` exceeds `kappa`.
pub fn min_degree_for_kappa(kappa: &BigRational) -> u64 {
    let bound: BigInt = (kappa * BigInt::from(3) + BigInt::from(2)).floor().to_integer() + 1;
    bound.to_u64().unwrap_or(if bound.is_negative() { 0 } else { u64::MAX }).max(MIN_DEGREE as u64)
}

/// `d6` of a lattice whose only 4-cycles are the central ones and which has
/// no 6-cycles: `(d - 1)(19 - 2d) / (12 d^6)`.
pub fn d6_closed_form(d: u32) -> BigRational {
    let d = d as i64;
    ratio((d - 1) * (19 - 2 * d), 12) / BigRational::from_integer(BigInt::from(d).pow(6))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub d: u32,
    pub s: u32,
    #[serde(with = "rational::as_optional_string")]
    pub kappa: Option<BigRational>,
    #[serde(with = "rational::as_string")]
    pub c4_bar: BigRational,
    #[serde(with = "rational::as_string")]
    pub c6_bar: BigRational,
    #[serde(with = "rational::as_string")]
    pub theta_bar: BigRational,
    /// `theta_bar / c4_bar`; absent when there are no 4-cycles.
    #[serde(with = "rational::as_optional_string")]
    pub ratio: Option<BigRational>,
    #[serde(with = "rational::as_string")]
    pub ratio_target: BigRational,
    /// Whether `ratio` equals `(d - 2) / 3`.
    pub ratio_matches_target: bool,
    #[serde(with = "rational::as_string")]
    pub d6: BigRational,
    pub d6_negative: bool,
    /// `ratio > kappa` and no 6-cycles; absent without a target.
    pub meets_kappa: Option<bool>,
}

impl LatticeSummary {
    pub fn from_census(census: &CensusReport, kappa: Option<BigRational>) -> Self {
        let pv = &census.per_vertex;
        let ratio = (!pv.c4_bar.is_zero()).then(|| &pv.theta_bar / &pv.c4_bar);
        let target = ratio_target(census.d);
        let d6 = d6_coefficient(&pv.c4_bar, &pv.c6_bar, &pv.theta_bar, census.d.max(1));
        let meets_kappa = kappa.as_ref().map(|k| pv.c6_bar.is_zero() && ratio.as_ref().is_some_and(|r| r > k));
        LatticeSummary {
            d: census.d,
            s: census.s,
            kappa,
            c4_bar: pv.c4_bar.clone(),
            c6_bar: pv.c6_bar.clone(),
            theta_bar: pv.theta_bar.clone(),
            ratio_matches_target: ratio.as_ref() == Some(&target),
            ratio,
            ratio_target: target,
            d6_negative: d6.is_negative(),
            d6,
            meets_kappa,
        }
    }

    pub fn sign(&self) -> &'static str {
        if self.d6.is_negative() {
            "negative"
        } else if self.d6.is_zero() {
            "zero"
        } else {
            "positive"
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Re-verifies a certificate and summarizes its lattice.
pub fn lattice_report(cert: &LiftCertificate, kappa: Option<BigRational>) -> Result<LatticeSummary> {
    let (base, volt) = cert.assignment().map_err(|e| Error::InvalidCertificate(e.to_string()))?;
    let verification = verify_certificate(&base, &volt);
    if !verification.passed() {
        return Err(Error::InvalidCertificate(format!("re-verification failed: {:?}", verification.flags)));
    }
    Ok(LatticeSummary::from_census(&verification.census, kappa))
}

/// Plain-text table with columns d, s, C4, C6, theta, ratio, d6, sign.
pub fn format_table(rows: &[LatticeSummary]) -> String {
    let header = ["d", "s", "C4_bar", "C6_bar", "theta_bar", "ratio", "d6", "sign"];
    let cells: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                r.d.to_string(),
                r.s.to_string(),
                rational::format(&r.c4_bar),
                rational::format(&r.c6_bar),
                rational::format(&r.theta_bar),
                r.ratio.as_ref().map(rational::format).unwrap_or_else(|| "-".into()),
                rational::format(&r.d6),
                r.sign().into(),
            ]
        })
        .collect();
    let widths: Vec<usize> =
        (0..8).map(|i| cells.iter().map(|c| c[i].len()).chain([header[i].len()]).max().unwrap()).collect();
    let mut out = String::new();
    let line = |out: &mut String, row: &[&str]| {
        let parts: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header);
    for row in &cells {
        line(&mut out, &row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}
