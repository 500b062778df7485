//! Best-known `[[n, k, d]]` records keyed by `(q, n, k)`.
//!
//! Persistence is one JSON document (`{"records": [...], "audit": [...]}`),
//! written atomically. Records can also be exchanged as a bare JSON array
//! or as CSV with the columns `q,label,n,k,d,mds,ref`; CSV carries no
//! witness.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::css::{singleton_defect, QuantumParams};
use crate::galois::FieldSpec;

/// Largest length the catalog accepts.
pub const MAX_LENGTH: usize = 200;

const CSV_HEADER: [&str; 7] = ["q", "label", "n", "k", "d", "mds", "ref"];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("unsupported field order {0}; supported orders are {orders:?}", orders = crate::galois::SUPPORTED_ORDERS)]
    UnsupportedField(u32),
    #[error("invalid record {key}: {message}")]
    Invalid { key: String, message: String },
}

impl CatalogError {
    fn io(path: &Path, source: io::Error) -> CatalogError {
        CatalogError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub q: u32,
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub mds: bool,
    #[serde(rename = "ref")]
    pub reference: String,
    #[serde(default)]
    pub witness: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl CatalogRecord {
    /// Record with the MDS flag and label filled in.
    pub fn new(
        q: u32,
        n: usize,
        k: usize,
        d: usize,
        reference: impl Into<String>,
    ) -> Result<CatalogRecord, CatalogError> {
        let rec = CatalogRecord {
            q,
            label: format!("{q}^2"),
            n,
            k,
            d,
            mds: false,
            reference: reference.into(),
            witness: None,
            timestamp: None,
        };
        let defect = singleton_defect(n, k, d).map_err(|e| rec.invalid(e.to_string()))?;
        let rec = CatalogRecord { mds: defect == 0, ..rec };
        rec.validate()?;
        Ok(rec)
    }

    pub fn from_params(p: &QuantumParams, reference: impl Into<String>) -> Result<CatalogRecord, CatalogError> {
        let mut rec = CatalogRecord::new(p.q(), p.n(), p.k(), p.d(), reference)?;
        rec.witness = match p.construction() {
            crate::css::Construction::Unspecified => None,
            c => Some(serde_json::to_value(c).expect("construction serializes")),
        };
        Ok(rec)
    }

    pub fn key(&self) -> (u32, usize, usize) {
        (self.q, self.n, self.k)
    }

    fn invalid(&self, message: String) -> CatalogError {
        CatalogError::Invalid { key: format!("[[{},{},{}]]_{}", self.n, self.k, self.d, self.label), message }
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        if FieldSpec::with_order(self.q).is_err() {
            return Err(CatalogError::UnsupportedField(self.q));
        }
        if self.n > MAX_LENGTH {
            return Err(self.invalid(format!("n exceeds {MAX_LENGTH}")));
        }
        let defect = singleton_defect(self.n, self.k, self.d).map_err(|e| self.invalid(e.to_string()))?;
        if self.mds != (defect == 0) {
            return Err(self.invalid(format!("mds flag {} but Singleton defect is {defect}", self.mds)));
        }
        if self.label.is_empty() {
            return Err(self.invalid("empty label".into()));
        }
        Ok(())
    }
}

/// Result of [`Catalog::update_if_better`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Inserted,
    Improved { previous_d: usize },
    Dominated,
}

/// A replaced record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub replaced: CatalogRecord,
    pub new_d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// `line N` for CSV, `record N` for JSON.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// Rows that passed validation.
    pub loaded: usize,
    pub inserted: usize,
    pub improved: usize,
    pub dominated: usize,
    pub rejected: Vec<Rejection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// From the file extension; anything but `.csv` is JSON.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Document {
    records: Vec<CatalogRecord>,
    #[serde(default)]
    audit: Vec<AuditEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonInput {
    Document(Document),
    Records(Vec<serde_json::Value>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    records: BTreeMap<(u32, usize, usize), CatalogRecord>,
    audit: Vec<AuditEntry>,
}

impl Catalog {
    pub fn new() -> Catalog {
        Catalog::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in `(q, n, k)` order.
    pub fn records(&self) -> impl Iterator<Item = &CatalogRecord> {
        self.records.values()
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    pub fn update_if_better(&mut self, rec: CatalogRecord) -> Result<Verdict, CatalogError> {
        rec.validate()?;
        let key = rec.key();
        match self.records.get(&key) {
            None => {
                self.records.insert(key, rec);
                Ok(Verdict::Inserted)
            }
            Some(old) if rec.d > old.d => {
                let previous_d = old.d;
                let new_d = rec.d;
                let replaced = self.records.insert(key, rec).expect("present");
                self.audit.push(AuditEntry { replaced, new_d });
                Ok(Verdict::Improved { previous_d })
            }
            Some(_) => Ok(Verdict::Dominated),
        }
    }

    /// Verdict `rec` would get, without changing anything.
    pub fn would_accept(&self, q: u32, n: usize, k: usize, d: usize) -> Verdict {
        match self.records.get(&(q, n, k)) {
            None => Verdict::Inserted,
            Some(old) if d > old.d => Verdict::Improved { previous_d: old.d },
            Some(_) => Verdict::Dominated,
        }
    }

    fn check_field(q: u32) -> Result<(), CatalogError> {
        FieldSpec::with_order(q).map(|_| ()).map_err(|_| CatalogError::UnsupportedField(q))
    }

    pub fn query_exact(&self, q: u32, n: usize, k: usize) -> Result<Option<&CatalogRecord>, CatalogError> {
        Catalog::check_field(q)?;
        Ok(self.records.get(&(q, n, k)))
    }

    /// Records at `(q, n)` whose distance is at least `d`.
    pub fn query_by_distance(&self, q: u32, n: usize, d: usize) -> Result<Vec<&CatalogRecord>, CatalogError> {
        Catalog::check_field(q)?;
        Ok(self.records.range((q, n, 0)..=(q, n, usize::MAX)).map(|(_, r)| r).filter(|r| r.d >= d).collect())
    }

    /// Records with `n` and `d` in the given ranges, sorted by `(n, k)`.
    pub fn query_range(
        &self,
        q: u32,
        n: RangeInclusive<usize>,
        d: RangeInclusive<usize>,
    ) -> Result<Vec<&CatalogRecord>, CatalogError> {
        Catalog::check_field(q)?;
        if n.is_empty() {
            return Ok(Vec::new());
        }
        Ok(self
            .records
            .range((q, *n.start(), 0)..=(q, *n.end(), usize::MAX))
            .map(|(_, r)| r)
            .filter(|r| d.contains(&r.d))
            .collect())
    }

    /// Loads records from a file, merging them by dominance.
    pub fn ingest(&mut self, path: &Path) -> Result<IngestReport, CatalogError> {
        let text = fs::read_to_string(path).map_err(|e| CatalogError::io(path, e))?;
        let format = match Format::from_path(path) {
            Format::Csv => Format::Csv,
            Format::Json if text.trim_start().starts_with(['{', '[']) || text.trim().is_empty() => Format::Json,
            Format::Json => Format::Csv,
        };
        self.ingest_str(&text, format)
    }

    pub fn ingest_str(&mut self, text: &str, format: Format) -> Result<IngestReport, CatalogError> {
        let rows = match format {
            Format::Json => parse_json(text)?,
            Format::Csv => parse_csv(text)?,
        };
        let mut report = IngestReport::default();
        for (location, row) in rows {
            let rec = match row {
                Ok(r) => r,
                Err(message) => {
                    report.rejected.push(Rejection { location, message });
                    continue;
                }
            };
            match self.update_if_better(rec) {
                Ok(v) => {
                    report.loaded += 1;
                    match v {
                        Verdict::Inserted => report.inserted += 1,
                        Verdict::Improved { .. } => report.improved += 1,
                        Verdict::Dominated => report.dominated += 1,
                    }
                }
                Err(e) => report.rejected.push(Rejection { location, message: e.to_string() }),
            }
        }
        for r in &report.rejected {
            log::warn!("rejected {}: {}", r.location, r.message);
        }
        Ok(report)
    }

    /// Full document, including the audit log.
    pub fn to_json(&self) -> String {
        let doc = Document { records: self.records.values().cloned().collect(), audit: self.audit.clone() };
        serde_json::to_string_pretty(&doc).expect("catalog serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Catalog, CatalogError> {
        let doc: Document = serde_json::from_str(text).map_err(json_error)?;
        let mut cat = Catalog::new();
        for (i, rec) in doc.records.into_iter().enumerate() {
            rec.validate()
                .map_err(|e| CatalogError::Parse { location: format!("record {}", i + 1), message: e.to_string() })?;
            if cat.records.insert(rec.key(), rec).is_some() {
                return Err(CatalogError::Parse {
                    location: format!("record {}", i + 1),
                    message: "duplicate key".into(),
                });
            }
        }
        cat.audit = doc.audit;
        Ok(cat)
    }

    pub fn load(path: &Path) -> Result<Catalog, CatalogError> {
        let text = fs::read_to_string(path).map_err(|e| CatalogError::io(path, e))?;
        Catalog::from_json(&text)
    }

    /// Loads `path`, or starts empty when it does not exist.
    pub fn open(path: &Path) -> Result<Catalog, CatalogError> {
        if path.exists() {
            Catalog::load(path)
        } else {
            Ok(Catalog::new())
        }
    }

    /// Writes the document to a temporary file next to `path` and renames it.
    pub fn save(&self, path: &Path) -> Result<(), CatalogError> {
        atomic_write(path, self.to_json().as_bytes())
    }

    pub fn export_string(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let recs: Vec<&CatalogRecord> = self.records.values().collect();
                serde_json::to_string_pretty(&recs).expect("records serialize") + "\n"
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(CSV_HEADER).expect("in-memory write");
                for r in self.records.values() {
                    w.write_record([
                        r.q.to_string(),
                        r.label.clone(),
                        r.n.to_string(),
                        r.k.to_string(),
                        r.d.to_string(),
                        r.mds.to_string(),
                        r.reference.clone(),
                    ])
                    .expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
        }
    }

    /// Writes all records; returns how many.
    pub fn export(&self, path: &Path, format: Format) -> Result<usize, CatalogError> {
        atomic_write(path, self.export_string(format).as_bytes())?;
        Ok(self.len())
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CatalogError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CatalogError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CatalogError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CatalogError::io(path, e))?;
    tmp.persist(path).map_err(|e| CatalogError::io(path, e.error))?;
    Ok(())
}

fn json_error(e: serde_json::Error) -> CatalogError {
    CatalogError::Parse { location: format!("line {} column {}", e.line(), e.column()), message: e.to_string() }
}

type Row = (String, Result<CatalogRecord, String>);

fn parse_json(text: &str) -> Result<Vec<Row>, CatalogError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let input: JsonInput = serde_json::from_str(text).map_err(json_error)?;
    let values: Vec<serde_json::Value> = match input {
        JsonInput::Document(doc) => {
            doc.records.into_iter().map(|r| serde_json::to_value(r).expect("record serializes")).collect()
        }
        JsonInput::Records(v) => v,
    };
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let rec = serde_json::from_value::<CatalogRecord>(v).map_err(|e| e.to_string());
            (format!("record {}", i + 1), rec)
        })
        .collect())
}

#[derive(Deserialize)]
struct CsvRow {
    q: u32,
    label: String,
    n: usize,
    k: usize,
    d: usize,
    mds: bool,
    #[serde(rename = "ref")]
    reference: String,
}

fn parse_csv(text: &str) -> Result<Vec<Row>, CatalogError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers =
        rdr.headers().map_err(|e| CatalogError::Parse { location: "line 1".into(), message: e.to_string() })?;
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(CatalogError::Parse {
            location: "line 1".into(),
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CatalogError::Parse { location: format!("line {line}"), message: e.to_string() }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row = record.deserialize::<CsvRow>(None).map_err(|e| e.to_string()).map(|r| CatalogRecord {
            q: r.q,
            label: r.label,
            n: r.n,
            k: r.k,
            d: r.d,
            mds: r.mds,
            reference: r.reference,
            witness: None,
            timestamp: None,
        });
        rows.push((format!("line {line}"), row));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(q: u32, n: usize, k: usize, d: usize) -> CatalogRecord {
        CatalogRecord::new(q, n, k, d, "test").unwrap()
    }

    #[test]
    fn record_validation() {
        assert!(rec(3, 6, 2, 3).mds);
        assert!(!rec(3, 11, 1, 5).mds);
        assert!(CatalogRecord::new(3, 20, 6, 12, "x").is_err());
        assert!(CatalogRecord::new(6, 5, 1, 2, "x").is_err());
        assert!(CatalogRecord::new(3, 201, 1, 2, "x").is_err());
        let mut bad = rec(3, 6, 2, 3);
        bad.mds = false;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn updates() {
        let mut c = Catalog::new();
        assert_eq!(c.update_if_better(rec(3, 45, 21, 5)).unwrap(), Verdict::Inserted);
        assert_eq!(c.update_if_better(rec(3, 45, 21, 7)).unwrap(), Verdict::Improved { previous_d: 5 });
        assert_eq!(c.update_if_better(rec(3, 45, 21, 7)).unwrap(), Verdict::Dominated);
        assert_eq!(c.update_if_better(rec(3, 45, 21, 6)).unwrap(), Verdict::Dominated);
        assert_eq!(c.query_exact(3, 45, 21).unwrap().unwrap().d, 7);
        assert_eq!(c.audit().len(), 1);
        assert_eq!(c.audit()[0].replaced.d, 5);
    }

    #[test]
    fn queries() {
        let mut c = Catalog::new();
        assert!(c.query_exact(3, 65, 29).unwrap().is_none());
        for (n, k, d) in [(80, 48, 5), (80, 54, 7), (80, 56, 5), (88, 48, 7), (88, 8, 12), (34, 2, 8)] {
            c.update_if_better(rec(5, n, k, d)).unwrap();
        }
        c.update_if_better(rec(3, 80, 40, 6)).unwrap();
        let hits: Vec<_> = c.query_range(5, 80..=88, 5..=7).unwrap().iter().map(|r| (r.n, r.k)).collect();
        assert_eq!(hits, vec![(80, 48), (80, 54), (80, 56), (88, 48)]);
        let by_d: Vec<_> = c.query_by_distance(5, 80, 6).unwrap().iter().map(|r| r.k).collect();
        assert_eq!(by_d, vec![54]);
        assert!(matches!(c.query_exact(6, 1, 1), Err(CatalogError::UnsupportedField(6))));
        #[allow(clippy::reversed_empty_ranges)]
        let empty = c.query_range(5, 90..=80, 1..=9).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn csv_ingest() {
        let mut c = Catalog::new();
        let text =
            "q,label,n,k,d,mds,ref\n3,3^2,65,29,6,false,a\n3,3^2,65,29,5,false,\"b, c\"\n3,3^2,20,6,12,false,typo\n";
        let r = c.ingest_str(text, Format::Csv).unwrap();
        assert_eq!((r.loaded, r.inserted, r.dominated), (2, 1, 1));
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.rejected[0].location, "line 4");
        assert_eq!(c.len(), 1);
        assert_eq!(c.query_exact(3, 65, 29).unwrap().unwrap().d, 6);
        assert_eq!(c.ingest_str("", Format::Csv).unwrap().loaded, 0);
        assert!(matches!(c.ingest_str("q,n\n1,2\n", Format::Csv), Err(CatalogError::Parse { .. })));
        assert!(matches!(
            c.ingest_str("q,label,n,k,d,mds,ref\n3,3^2,5\n", Format::Csv),
            Err(CatalogError::Parse { .. })
        ));
    }

    #[test]
    fn json_ingest() {
        let mut c = Catalog::new();
        let text = r#"[{"q":3,"label":"3^2","n":6,"k":2,"d":3,"mds":true,"ref":"r","witness":null},
                       {"q":3,"label":"3^2","n":6,"k":2}]"#;
        let r = c.ingest_str(text, Format::Json).unwrap();
        assert_eq!(r.loaded, 1);
        assert_eq!(r.rejected[0].location, "record 2");
        assert!(matches!(c.ingest_str("[{", Format::Json), Err(CatalogError::Parse { .. })));
    }

    #[test]
    fn round_trips() {
        let mut c = Catalog::new();
        assert_eq!(c.export_string(Format::Csv), "q,label,n,k,d,mds,ref\n");
        let mut r = rec(5, 22, 2, 6);
        r.witness = Some(serde_json::json!({"kind": "unspecified"}));
        r.timestamp = Some("2024-01-01".into());
        c.update_if_better(r).unwrap();
        c.update_if_better(rec(3, 45, 21, 5)).unwrap();
        c.update_if_better(rec(3, 45, 21, 7)).unwrap();
        let mut back = Catalog::new();
        back.ingest_str(&c.export_string(Format::Json), Format::Json).unwrap();
        assert_eq!(back.records().collect::<Vec<_>>(), c.records().collect::<Vec<_>>());
        assert_eq!(Catalog::from_json(&c.to_json()).unwrap(), c);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        c.save(&path).unwrap();
        assert_eq!(Catalog::load(&path).unwrap(), c);
        let csv_path = dir.path().join("cat.csv");
        assert_eq!(c.export(&csv_path, Format::Csv).unwrap(), 2);
        let mut from_csv = Catalog::new();
        from_csv.ingest(&csv_path).unwrap();
        assert_eq!(from_csv.len(), 2);
    }
}
