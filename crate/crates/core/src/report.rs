//! Machine-readable report emission.
//!
//! JSON reports are wrapped in an envelope carrying a schema version; exact
//! integers travel as decimal strings so downstream consumers never truncate
//! them to 53 bits. CSV output has a fixed column order and deterministic
//! number formatting: reals are printed with 12 significant digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Schema version stamped on every JSON envelope.
pub const SCHEMA_VERSION: u32 = 1;

/// Serde adapter: `i128` as a decimal string.
pub mod i128_str {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: `Option<i128>` as an optional decimal string.
pub mod opt_i128_str {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<i128>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&x.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<i128>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        match s {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(serde::de::Error::custom),
        }
    }
}

/// JSON envelope: schema version, a report kind tag, and the payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: u32,
    pub kind: String,
    pub data: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(kind: &str, data: T) -> Self {
        Envelope {
            schema: SCHEMA_VERSION,
            kind: kind.to_string(),
            data,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::BadCache {
            reason: format!("serialization failed: {e}"),
        })
    }
}

/// A real with exactly 12 significant digits, deterministically.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

/// One row of a CSV report.
pub trait CsvRecord {
    fn header() -> &'static str;
    fn record(&self) -> String;
}

/// Renders rows as CSV with a header line. Empty input is an error.
pub fn to_csv<T: CsvRecord>(rows: &[T]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut out = String::with_capacity(rows.len() * 32);
    out.push_str(T::header());
    out.push('\n');
    for r in rows {
        out.push_str(&r.record());
        out.push('\n');
    }
    Ok(out)
}

impl CsvRecord for crate::correlation::BoundAuditRow {
    fn header() -> &'static str {
        "h,S,V,kappa12_h1,alpha_bound"
    }

    fn record(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.h,
            self.s,
            self.v,
            self.kappa12_h1,
            fmt_real(self.alpha_bound)
        )
    }
}

/// Farey rows with the scan parameters attached, for CSV export.
#[derive(Debug, Clone, Copy)]
pub struct FareyCsvRow {
    pub row: crate::expsums::FareyRow,
    pub p: u64,
    pub n: u32,
}

impl CsvRecord for FareyCsvRow {
    fn header() -> &'static str {
        "alpha_num,alpha_den,P,n,abs_S,abs_W,ratio"
    }

    fn record(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.row.a,
            self.row.q,
            self.p,
            self.n,
            fmt_real(self.row.abs_s),
            fmt_real(self.row.abs_w),
            fmt_real(self.row.ratio)
        )
    }
}
