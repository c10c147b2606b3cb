//! Stable JSON forms. Rationals are always strings `"p/q"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{format_rational, parse_rational, AlgebraError, GradedSeries, Monomial, Rational, Var};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: BTreeMap<String, u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub r: u32,
    pub truncation: Option<i32>,
    pub variables: Vec<String>,
    pub terms: Vec<TermJson>,
}

pub fn rational_json(q: &Rational) -> String {
    format_rational(q)
}

pub fn series_to_json(s: &GradedSeries) -> SeriesJson {
    SeriesJson {
        r: s.r(),
        truncation: s.truncation(),
        variables: s.variables().iter().map(|v| v.to_string()).collect(),
        terms: s
            .terms()
            .iter()
            .map(|(m, c)| TermJson {
                exps: m.exponents().iter().map(|(v, e)| (v.to_string(), *e)).collect(),
                coeff: format_rational(c),
            })
            .collect(),
    }
}

pub fn series_from_json(j: &SeriesJson) -> Result<GradedSeries, AlgebraError> {
    let vars = j
        .variables
        .iter()
        .map(|v| v.parse::<Var>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in &j.terms {
        let exps = t
            .exps
            .iter()
            .map(|(v, e)| Ok((v.parse::<Var>()?, *e)))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        terms.push((Monomial::from_exponents(exps), parse_rational(&t.coeff)?));
    }
    Ok(GradedSeries::from_terms(j.r, vars, terms, j.truncation))
}

/// One command's output: the text rendering and a machine-readable result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub r: u32,
    /// False when a check failed.
    pub ok: bool,
    pub text: String,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, r: u32, ok: bool, text: String, result: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            r,
            ok,
            text,
            result,
        }
    }
}
