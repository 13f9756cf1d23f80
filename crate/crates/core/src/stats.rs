//! Educational-score distributions, overall and per label group.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::taxonomy::{Annotation, DocumentType, DomainLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupBy {
    None,
    DocType,
    Domain,
}

impl GroupBy {
    fn keys(self) -> Vec<&'static str> {
        match self {
            GroupBy::None => vec!["all"],
            GroupBy::DocType => DocumentType::ALL.iter().map(|t| t.as_str()).collect(),
            GroupBy::Domain => DomainLabel::ALL.iter().map(|d| d.as_str()).collect(),
        }
    }

    fn index(self, a: &Annotation) -> usize {
        match self {
            GroupBy::None => 0,
            GroupBy::DocType => a.doc_type as usize,
            GroupBy::Domain => a.domain as usize,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroupBy::None => "none",
            GroupBy::DocType => "doc_type",
            GroupBy::Domain => "domain",
        }
    }
}

impl core::str::FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(GroupBy::None),
            "doc_type" | "doc-type" | "type" => Ok(GroupBy::DocType),
            "domain" => Ok(GroupBy::Domain),
            other => Err(format!("unknown grouping {other:?}")),
        }
    }
}

/// A non-negative fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    numerator: u64,
    denominator: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    /// # Panics
    /// If `denominator` is zero.
    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator != 0, "zero denominator");
        let g = gcd(numerator, denominator).max(1);
        Rational {
            numerator: numerator / g,
            denominator: denominator / g,
        }
    }

    pub fn numerator(self) -> u64 {
        self.numerator
    }

    pub fn denominator(self) -> u64 {
        self.denominator
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Decimal rendering, rounding half away from zero.
    pub fn render(self, decimals: u32) -> String {
        let scale = 10u128.pow(decimals);
        let num = u128::from(self.numerator) * scale * 2 + u128::from(self.denominator);
        let scaled = num / (2 * u128::from(self.denominator));
        if decimals == 0 {
            return scaled.to_string();
        }
        format!(
            "{}.{:0width$}",
            scaled / scale,
            scaled % scale,
            width = decimals as usize
        )
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(2))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Rational", 3)?;
        s.serialize_field("numerator", &self.numerator)?;
        s.serialize_field("denominator", &self.denominator)?;
        s.serialize_field("value", &self.render(2))?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreDistribution {
    pub group_key: String,
    pub population: u64,
    pub counts: BTreeMap<u8, u64>,
    pub shares: BTreeMap<u8, f64>,
    pub mean: Rational,
    pub median: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no annotations to summarize")]
    EmptyInput,
}

/// Score counts per group. Tallies over disjoint inputs merge associatively,
/// so shards can be counted independently and combined in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreTally {
    group_by: GroupBy,
    counts: Vec<[u64; 5]>,
}

impl ScoreTally {
    pub fn new(group_by: GroupBy) -> Self {
        ScoreTally {
            group_by,
            counts: vec![[0; 5]; group_by.keys().len()],
        }
    }

    pub fn add(&mut self, annotation: &Annotation) {
        let g = self.group_by.index(annotation);
        self.counts[g][usize::from(annotation.edu_score.get() - 1)] += 1;
    }

    /// # Panics
    /// If the tallies group differently.
    pub fn merge(mut self, other: &ScoreTally) -> Self {
        assert_eq!(self.group_by, other.group_by);
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += t;
            }
        }
        self
    }

    pub fn population(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Distributions for every non-empty group, in taxonomy order.
    pub fn finish(&self) -> Result<Vec<ScoreDistribution>, StatsError> {
        if self.population() == 0 {
            return Err(StatsError::EmptyInput);
        }
        Ok(self
            .group_by
            .keys()
            .into_iter()
            .zip(&self.counts)
            .filter(|(_, c)| c.iter().sum::<u64>() > 0)
            .map(|(key, c)| distribution(key, c))
            .collect())
    }
}

fn score_at(counts: &[u64; 5], position: u64) -> u64 {
    let mut seen = 0;
    for (i, &c) in counts.iter().enumerate() {
        seen += c;
        if position < seen {
            return i as u64 + 1;
        }
    }
    unreachable!("position beyond population")
}

fn distribution(key: &str, counts: &[u64; 5]) -> ScoreDistribution {
    let population: u64 = counts.iter().sum();
    let weighted: u64 = counts.iter().enumerate().map(|(i, &c)| (i as u64 + 1) * c).sum();
    let lower = score_at(counts, (population - 1) / 2);
    let upper = score_at(counts, population / 2);
    ScoreDistribution {
        group_key: key.to_string(),
        population,
        counts: (1..=5).zip(counts.iter().copied()).collect(),
        shares: (1..=5)
            .zip(counts.iter().map(|&c| c as f64 / population as f64))
            .collect(),
        mean: Rational::new(weighted, population),
        median: Rational::new(lower + upper, 2),
    }
}

pub fn score_distribution<'a, I>(annotations: I, group_by: GroupBy) -> Result<Vec<ScoreDistribution>, StatsError>
where
    I: IntoIterator<Item = &'a Annotation>,
{
    let mut tally = ScoreTally::new(group_by);
    for a in annotations {
        tally.add(a);
    }
    tally.finish()
}

/// Aligned plain-text table; shares as percentages with one decimal.
pub fn render_table(distributions: &[ScoreDistribution]) -> String {
    let width = distributions
        .iter()
        .map(|d| d.group_key.len())
        .max()
        .unwrap_or(0)
        .max("group".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>9}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>5}  {:>6}",
        "group", "n", "1", "2", "3", "4", "5", "mean", "median"
    );
    for d in distributions {
        let _ = write!(out, "{:<width$}  {:>9}", d.group_key, d.population);
        for score in 1..=5 {
            let _ = write!(out, "  {:>5.1}%", d.shares[&score] * 100.0);
        }
        let _ = writeln!(out, "  {:>5}  {:>6}", d.mean.render(2), d.median.render(2));
    }
    out
}
