//! Corpus loading from disk.
//!
//! Three input shapes are supported: the canonical CSV and JSONL schemas
//! (field names `patent_id`, `office`, `publication_date`, `applicants`,
//! `ipc_codes`; lists `;`-separated in CSV cells) and Patentscope-style CSV
//! exports via a configurable column map.
//!
//! Loading is forgiving at row granularity and strict at file granularity:
//! a malformed IPC code is skipped (the record survives), a row missing its
//! id or date is dropped, duplicate patent ids collapse to the first
//! occurrence — and every such event is tallied in an [`IngestReport`] that
//! callers are expected to persist next to their outputs. Only an unreadable
//! file, an unusable header, or zero surviving records abort the load.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use ipcmap_core::corpus::{Corpus, Date, PatentRecord};
use ipcmap_core::ipc::IpcCode;
use serde::{Deserialize, Serialize};

/// Column names used to read a Patentscope-style CSV export. Defaults match
/// the site's English result-list export; override them in config when the
/// export language or version differs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatentscopeColumns {
    pub patent_id: String,
    pub office: String,
    pub publication_date: String,
    pub applicants: String,
    pub ipc_codes: String,
}

impl Default for PatentscopeColumns {
    fn default() -> Self {
        PatentscopeColumns {
            patent_id: "Publication Number".to_string(),
            office: "Country".to_string(),
            publication_date: "Publication Date".to_string(),
            applicants: "Applicants".to_string(),
            ipc_codes: "IPC".to_string(),
        }
    }
}

/// Input file shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    CanonicalCsv,
    CanonicalJsonl,
    PatentscopeCsv(PatentscopeColumns),
}

impl CorpusFormat {
    /// Parse a format name as written in config files and CLI flags.
    /// `patentscope-csv` gets the default column map.
    pub fn from_name(name: &str) -> Result<CorpusFormat, IngestError> {
        match name {
            "canonical-csv" => Ok(CorpusFormat::CanonicalCsv),
            "canonical-jsonl" => Ok(CorpusFormat::CanonicalJsonl),
            "patentscope-csv" => Ok(CorpusFormat::PatentscopeCsv(PatentscopeColumns::default())),
            other => Err(IngestError::UnknownFormat {
                name: other.to_string(),
            }),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CorpusFormat::CanonicalCsv => "canonical-csv",
            CorpusFormat::CanonicalJsonl => "canonical-jsonl",
            CorpusFormat::PatentscopeCsv(_) => "patentscope-csv",
        }
    }
}

/// Error that aborts a load outright.
#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unknown corpus format {name:?} (expected canonical-csv, canonical-jsonl, or patentscope-csv)")]
    UnknownFormat { name: String },
    #[error("{path} does not match the {format} schema: {detail}")]
    SchemaMismatch {
        path: PathBuf,
        format: &'static str,
        detail: String,
    },
    #[error("no valid records in {path}")]
    EmptyCorpus { path: PathBuf },
}

/// One rejected input row.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RowError {
    /// 1-based data row number (header excluded for CSV, line number for JSONL).
    pub row: usize,
    pub message: String,
}

/// Tally of everything the loader tolerated, for the sidecar report file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IngestReport {
    pub input: String,
    pub format: String,
    /// Data rows seen (excluding the header).
    pub rows_total: usize,
    /// Records in the returned corpus.
    pub records_loaded: usize,
    /// Rows dropped whole (missing id, unparseable date, bad JSON, ...).
    pub bad_rows: usize,
    /// Rows dropped because an earlier row claimed the same patent id.
    pub duplicate_ids: usize,
    /// Individual IPC codes skipped inside otherwise-valid rows.
    pub skipped_codes: usize,
    pub row_errors: Vec<RowError>,
}

/// Load a corpus. Returns the deduplicated records plus the ingest report;
/// the report is worth writing to disk even on success, since skipped codes
/// and dropped rows explain downstream count differences.
pub fn load_corpus(path: &Path, format: &CorpusFormat) -> Result<(Corpus, IngestReport), IngestError> {
    let mut report = IngestReport {
        input: path.display().to_string(),
        format: format.name().to_string(),
        rows_total: 0,
        records_loaded: 0,
        bad_rows: 0,
        duplicate_ids: 0,
        skipped_codes: 0,
        row_errors: Vec::new(),
    };

    let records = match format {
        CorpusFormat::CanonicalCsv => {
            let columns = PatentscopeColumns {
                patent_id: "patent_id".to_string(),
                office: "office".to_string(),
                publication_date: "publication_date".to_string(),
                applicants: "applicants".to_string(),
                ipc_codes: "ipc_codes".to_string(),
            };
            read_csv(path, &columns, "canonical-csv", &mut report)?
        }
        CorpusFormat::PatentscopeCsv(columns) => {
            read_csv(path, columns, "patentscope-csv", &mut report)?
        }
        CorpusFormat::CanonicalJsonl => read_jsonl(path, &mut report)?,
    };

    let (corpus, duplicates) = Corpus::from_records(
        records,
        format!("{} ({})", path.display(), format.name()),
    );
    report.duplicate_ids = duplicates;
    report.records_loaded = corpus.len();
    if corpus.is_empty() {
        return Err(IngestError::EmptyCorpus {
            path: path.to_path_buf(),
        });
    }
    Ok((corpus, report))
}

/// Parse one date cell. Accepts ISO `YYYY-MM-DD`, bare `YYYYMMDD`, and the
/// dotted `DD.MM.YYYY` that Patentscope exports use.
fn parse_date_flexible(text: &str) -> Option<Date> {
    let text = text.trim();
    if let Ok(date) = Date::parse_iso(text) {
        return Some(date);
    }
    let digits: Vec<u32> = text.chars().filter_map(|c| c.to_digit(10)).collect();
    if text.len() == 8 && digits.len() == 8 {
        let year = (digits[0] * 1000 + digits[1] * 100 + digits[2] * 10 + digits[3]) as i32;
        let month = (digits[4] * 10 + digits[5]) as u8;
        let day = (digits[6] * 10 + digits[7]) as u8;
        return Date::new(year, month, day).ok();
    }
    if text.len() == 10 && digits.len() == 8 && text.chars().nth(2) == Some('.') {
        let day = (digits[0] * 10 + digits[1]) as u8;
        let month = (digits[2] * 10 + digits[3]) as u8;
        let year = (digits[4] * 1000 + digits[5] * 100 + digits[6] * 10 + digits[7]) as i32;
        return Date::new(year, month, day).ok();
    }
    None
}

/// Split a `;`-separated list cell, dropping empty entries.
fn split_list(cell: &str) -> impl Iterator<Item = &str> {
    cell.split(';').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_codes(cell: &str, row: usize, report: &mut IngestReport) -> Vec<IpcCode> {
    split_list(cell)
        .filter_map(|text| match IpcCode::parse(text) {
            Ok(code) => Some(code),
            Err(err) => {
                report.skipped_codes += 1;
                report.row_errors.push(RowError {
                    row,
                    message: format!("skipped code: {err}"),
                });
                None
            }
        })
        .collect()
}

fn read_csv(
    path: &Path,
    columns: &PatentscopeColumns,
    format: &'static str,
    report: &mut IngestReport,
) -> Result<Vec<PatentRecord>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader
        .headers()
        .map_err(|e| IngestError::SchemaMismatch {
            path: path.to_path_buf(),
            format,
            detail: format!("unreadable header: {e}"),
        })?
        .clone();
    let column = |name: &str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| IngestError::SchemaMismatch {
                path: path.to_path_buf(),
                format,
                detail: format!("missing column {name:?}"),
            })
    };
    let id_at = column(&columns.patent_id)?;
    let office_at = column(&columns.office)?;
    let date_at = column(&columns.publication_date)?;
    let applicants_at = column(&columns.applicants)?;
    let codes_at = column(&columns.ipc_codes)?;

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 1;
        report.rows_total += 1;
        let bad = |message: String, report: &mut IngestReport| {
            report.bad_rows += 1;
            report.row_errors.push(RowError {
                row: row_no,
                message,
            });
        };
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                bad(format!("unparseable row: {e}"), report);
                continue;
            }
        };
        let cell = |at: usize| row.get(at).unwrap_or("").trim();
        let patent_id = cell(id_at);
        if patent_id.is_empty() {
            bad("missing patent_id".to_string(), report);
            continue;
        }
        let date = match parse_date_flexible(cell(date_at)) {
            Some(date) => date,
            None => {
                bad(
                    format!("unparseable publication_date {:?}", cell(date_at)),
                    report,
                );
                continue;
            }
        };
        records.push(PatentRecord {
            patent_id: patent_id.to_string(),
            office: cell(office_at).to_string(),
            publication_date: date,
            applicants: split_list(cell(applicants_at)).map(str::to_string).collect(),
            ipc_codes: parse_codes(cell(codes_at), row_no, report),
        });
    }
    Ok(records)
}

/// Canonical JSONL row, same field names as the CSV header.
#[derive(Deserialize)]
struct JsonRecord {
    patent_id: String,
    office: String,
    publication_date: String,
    #[serde(default)]
    applicants: Vec<String>,
    #[serde(default)]
    ipc_codes: Vec<String>,
}

fn read_jsonl(path: &Path, report: &mut IngestReport) -> Result<Vec<PatentRecord>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let row_no = idx + 1;
        let line = line.map_err(|source| IngestError::UnreadableFile {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        report.rows_total += 1;
        let bad = |message: String, report: &mut IngestReport| {
            report.bad_rows += 1;
            report.row_errors.push(RowError {
                row: row_no,
                message,
            });
        };
        let raw: JsonRecord = match serde_json::from_str(&line) {
            Ok(raw) => raw,
            Err(e) => {
                bad(format!("bad JSON: {e}"), report);
                continue;
            }
        };
        if raw.patent_id.trim().is_empty() {
            bad("missing patent_id".to_string(), report);
            continue;
        }
        let date = match parse_date_flexible(&raw.publication_date) {
            Some(date) => date,
            None => {
                bad(
                    format!("unparseable publication_date {:?}", raw.publication_date),
                    report,
                );
                continue;
            }
        };
        let codes_cell = raw.ipc_codes.join(";");
        records.push(PatentRecord {
            patent_id: raw.patent_id.trim().to_string(),
            office: raw.office.trim().to_string(),
            publication_date: date,
            applicants: raw
                .applicants
                .iter()
                .map(|a| a.trim().to_string())
                .filter(|a| !a.is_empty())
                .collect(),
            ipc_codes: parse_codes(&codes_cell, row_no, report),
        });
    }
    Ok(records)
}
