//! Patent records and corpus-level queries: applicant/date filters,
//! annual and per-group counts, and per-record code sets at a chosen
//! classification level.
//!
//! A [`Corpus`] is immutable once built; every query is read-only and
//! returns fresh values, so the filters compose freely and in any order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ipc::{IpcCode, IpcLevel};

/// Calendar date with validity checking (Gregorian leap rules).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

/// Error from building or parsing a [`Date`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DateError {
    /// Text is not `YYYY-MM-DD`.
    Malformed { input: String },
    /// Fields parse but do not name a real calendar day.
    OutOfRange { year: i32, month: u8, day: u8 },
}

impl fmt::Display for DateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateError::Malformed { input } => {
                write!(f, "malformed date {input:?}, expected YYYY-MM-DD")
            }
            DateError::OutOfRange { year, month, day } => {
                write!(f, "no such calendar day: {year:04}-{month:02}-{day:02}")
            }
        }
    }
}

impl core::error::Error for DateError {}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            let leap = year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
            if leap {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Date, DateError> {
        let valid = (1..=9999).contains(&year)
            && (1..=12).contains(&month)
            && day >= 1
            && day <= days_in_month(year, month);
        if valid {
            Ok(Date { year, month, day })
        } else {
            Err(DateError::OutOfRange { year, month, day })
        }
    }

    /// Parse strict ISO-8601 extended format, `YYYY-MM-DD`.
    pub fn parse_iso(text: &str) -> Result<Date, DateError> {
        let malformed = || DateError::Malformed {
            input: String::from(text),
        };
        let bytes = text.as_bytes();
        if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
            return Err(malformed());
        }
        let digits = |range: core::ops::Range<usize>| -> Result<i32, DateError> {
            let mut value = 0i32;
            for &b in &bytes[range] {
                if !b.is_ascii_digit() {
                    return Err(malformed());
                }
                value = value * 10 + (b - b'0') as i32;
            }
            Ok(value)
        };
        let year = digits(0..4)?;
        let month = digits(5..7)? as u8;
        let day = digits(8..10)? as u8;
        Date::new(year, month, day)
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u8 {
        self.month
    }

    pub fn day(&self) -> u8 {
        self.day
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// One patent application as ingested: identity, filing office, publication
/// date, applicant names, and IPC codes as filed (duplicates permitted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatentRecord {
    pub patent_id: String,
    pub office: String,
    pub publication_date: Date,
    pub applicants: Vec<String>,
    pub ipc_codes: Vec<IpcCode>,
}

impl PatentRecord {
    /// The record's codes truncated to `level` and deduplicated, so one
    /// patent contributes at most 1 to any occurrence or co-occurrence
    /// count. Codes shallower than `level` cannot be truncated down and
    /// are skipped.
    pub fn codes_at_level(&self, level: IpcLevel) -> BTreeSet<IpcCode> {
        self.ipc_codes
            .iter()
            .filter_map(|code| code.truncate_to(level).ok())
            .collect()
    }

    fn matches_any(&self, lowered_patterns: &[String]) -> bool {
        self.applicants.iter().any(|name| {
            let name = name.to_lowercase();
            lowered_patterns.iter().any(|p| name.contains(p.as_str()))
        })
    }
}

/// Error from corpus queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorpusError {
    /// Year filter called with `from_year > to_year`.
    InvalidRange { from_year: i32, to_year: i32 },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::InvalidRange { from_year, to_year } => {
                write!(f, "invalid year range: {from_year} > {to_year}")
            }
        }
    }
}

impl core::error::Error for CorpusError {}

/// An ordered, id-deduplicated collection of patent records plus a free-text
/// note about where they came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<PatentRecord>,
    provenance: String,
}

impl Corpus {
    /// Build a corpus from records in ingestion order. Records sharing a
    /// `patent_id` are collapsed, first occurrence wins; the number of
    /// dropped duplicates is returned alongside the corpus.
    pub fn from_records(
        records: Vec<PatentRecord>,
        provenance: impl Into<String>,
    ) -> (Corpus, usize) {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(records.len());
        let mut duplicates = 0usize;
        for record in records {
            if seen.insert(record.patent_id.clone()) {
                kept.push(record);
            } else {
                duplicates += 1;
            }
        }
        (
            Corpus {
                records: kept,
                provenance: provenance.into(),
            },
            duplicates,
        )
    }

    pub fn records(&self) -> &[PatentRecord] {
        &self.records
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn retain(&self, keep: impl Fn(&PatentRecord) -> bool) -> Corpus {
        Corpus {
            records: self.records.iter().filter(|r| keep(r)).cloned().collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Keep records where ANY applicant contains ANY pattern as a
    /// case-insensitive substring (OR over the whole pattern list). An empty
    /// pattern list therefore matches nothing.
    pub fn filter_by_applicant(&self, patterns: &[String]) -> Corpus {
        let lowered: Vec<String> = patterns.iter().map(|p| p.to_lowercase()).collect();
        self.retain(|record| record.matches_any(&lowered))
    }

    /// Keep records published in `from_year..=to_year` (both ends inclusive).
    pub fn filter_by_publication_year(
        &self,
        from_year: i32,
        to_year: i32,
    ) -> Result<Corpus, CorpusError> {
        if from_year > to_year {
            return Err(CorpusError::InvalidRange { from_year, to_year });
        }
        Ok(self.retain(|record| {
            let year = record.publication_date.year();
            from_year <= year && year <= to_year
        }))
    }

    /// Publication counts per year, with every year in the corpus's
    /// [min, max] span present (zero-filled). Empty corpus gives an empty map.
    pub fn annual_counts(&self) -> BTreeMap<i32, usize> {
        let mut counts = BTreeMap::new();
        for record in &self.records {
            *counts.entry(record.publication_date.year()).or_insert(0) += 1;
        }
        if let (Some(&min), Some(&max)) = (
            counts.keys().next().copied().as_ref(),
            counts.keys().next_back().copied().as_ref(),
        ) {
            for year in min..=max {
                counts.entry(year).or_insert(0);
            }
        }
        counts
    }

    /// Record counts per filing office code.
    pub fn office_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for record in &self.records {
            *counts.entry(record.office.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Record counts per labeled applicant rule. Each record counts under
    /// the FIRST rule whose patterns match it (same substring semantics as
    /// [`Corpus::filter_by_applicant`]); the rest land in an `"unmatched"`
    /// bucket. Every rule label appears in the result, zero-filled.
    pub fn applicant_rule_counts(&self, rules: &[(String, Vec<String>)]) -> BTreeMap<String, usize> {
        let lowered: Vec<(String, Vec<String>)> = rules
            .iter()
            .map(|(label, patterns)| {
                (
                    label.clone(),
                    patterns.iter().map(|p| p.to_lowercase()).collect(),
                )
            })
            .collect();
        let mut counts: BTreeMap<String, usize> = lowered
            .iter()
            .map(|(label, _)| (label.clone(), 0))
            .collect();
        counts.insert(String::from("unmatched"), 0);
        for record in &self.records {
            let label = lowered
                .iter()
                .find(|(_, patterns)| record.matches_any(patterns))
                .map(|(label, _)| label.as_str())
                .unwrap_or("unmatched");
            *counts.get_mut(label).expect("label pre-inserted") += 1;
        }
        counts
    }
}
