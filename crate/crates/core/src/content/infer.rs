//! Literal type inference and lexical value parsers.

use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::Serialize;

use crate::rdf::term::XSD;
use crate::rdf::Literal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiteralType {
    /// Natural-language description.
    Nld,
    Categorical,
    Numeric,
    Boolean,
    Year,
    Date,
}

impl LiteralType {
    pub fn name(self) -> &'static str {
        match self {
            LiteralType::Nld => "nld",
            LiteralType::Categorical => "categorical",
            LiteralType::Numeric => "numeric",
            LiteralType::Boolean => "boolean",
            LiteralType::Year => "year",
            LiteralType::Date => "date",
        }
    }
}

impl fmt::Display for LiteralType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const YEAR_RANGE: std::ops::RangeInclusive<f64> = 1000.0..=2999.0;

#[derive(Debug, Clone, Copy)]
pub struct InferOptions {
    pub nld_min_avg_tokens: f64,
    /// Property is on the forced-NLD allowlist.
    pub forced_nld: bool,
    /// When false, free text is categorical (used for edge features).
    pub allow_nld: bool,
}

fn declared_type(datatype: &str) -> Option<LiteralType> {
    let local = datatype.strip_prefix(XSD)?;
    Some(match local {
        "boolean" => LiteralType::Boolean,
        "gYear" => LiteralType::Year,
        "date" | "dateTime" | "dateTimeStamp" => LiteralType::Date,
        "integer" | "decimal" | "double" | "float" | "long" | "int" | "short" | "byte"
        | "nonNegativeInteger" | "positiveInteger" | "negativeInteger" | "nonPositiveInteger"
        | "unsignedLong" | "unsignedInt" | "unsignedShort" | "unsignedByte" => LiteralType::Numeric,
        _ => return None,
    })
}

pub fn parse_number(lexical: &str) -> Option<f64> {
    let s = lexical.trim();
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn is_integer_lexical(lexical: &str) -> bool {
    let s = lexical.trim();
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

/// Year of an `xsd:gYear` or plain integer lexical form; a trailing
/// timezone is ignored.
pub fn parse_year(lexical: &str) -> Option<f64> {
    let s = lexical.trim();
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
    let (digits, tz) = rest.split_at(end);
    if digits.is_empty() || !(tz.is_empty() || tz == "Z" || tz.starts_with(['+', '-'])) {
        return None;
    }
    digits.parse::<f64>().ok().map(|y| sign * y)
}

pub fn parse_boolean(lexical: &str) -> Option<f64> {
    match lexical.trim() {
        "true" | "1" => Some(1.0),
        "false" | "0" => Some(0.0),
        _ => None,
    }
}

fn split_timezone(s: &str) -> (&str, Option<i64>) {
    if let Some(rest) = s.strip_suffix('Z') {
        return (rest, Some(0));
    }
    if s.len() > 6 {
        let (head, tz) = s.split_at(s.len() - 6);
        let b = tz.as_bytes();
        if (b[0] == b'+' || b[0] == b'-') && b[3] == b':' {
            if let (Ok(h), Ok(m)) = (tz[1..3].parse::<i64>(), tz[4..6].parse::<i64>()) {
                let offset = (h * 3600 + m * 60) * if b[0] == b'-' { -1 } else { 1 };
                return (head, Some(offset));
            }
        }
    }
    (s, None)
}

/// Unix timestamp in seconds for ISO-8601 dates (`YYYY-MM-DD`) and
/// date-times, with optional fractional seconds and timezone. Values without
/// a timezone are read as UTC.
pub fn parse_timestamp(lexical: &str) -> Option<f64> {
    let s = lexical.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9);
    }
    let (local, offset) = split_timezone(s);
    let offset = offset.unwrap_or(0) as f64;
    if let Ok(dt) = NaiveDateTime::parse_from_str(local, "%Y-%m-%dT%H:%M:%S%.f") {
        let utc = dt.and_utc();
        return Some(utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9 - offset);
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(local, "%Y-%m-%dT%H:%M") {
        return Some(dt.and_utc().timestamp() as f64 - offset);
    }
    if local.len() == 10 {
        if let Ok(d) = NaiveDate::parse_from_str(local, "%Y-%m-%d") {
            return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp() as f64 - offset);
        }
    }
    None
}

pub fn mean_token_count<'a>(texts: impl Iterator<Item = &'a str>) -> f64 {
    let (mut tokens, mut n) = (0usize, 0usize);
    for t in texts {
        tokens += t.split_whitespace().count();
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        tokens as f64 / n as f64
    }
}

/// Decides the literal type of a column from its observed values.
///
/// A shared declared XSD datatype wins; otherwise the lexical forms decide:
/// booleans, then numbers (years when every value is an integer in
/// [1000, 2999]), then ISO-8601 dates, and finally free text, which is NLD
/// when the mean whitespace token count reaches the threshold.
pub fn infer_literal_type(values: &[&Literal], opts: &InferOptions) -> LiteralType {
    if opts.forced_nld && opts.allow_nld {
        return LiteralType::Nld;
    }
    if values.is_empty() {
        return LiteralType::Categorical;
    }
    let declared: Option<Vec<LiteralType>> = values.iter().map(|v| v.datatype().and_then(declared_type)).collect();
    if let Some(types) = declared {
        if types.iter().all(|t| *t == types[0]) {
            return types[0];
        }
    }
    let lexicals = || values.iter().map(|v| v.lexical().trim());
    if lexicals().all(|s| s == "true" || s == "false") {
        return LiteralType::Boolean;
    }
    let numbers: Option<Vec<f64>> = lexicals().map(parse_number).collect();
    if let Some(numbers) = numbers {
        let year = lexicals().all(is_integer_lexical) && numbers.iter().all(|y| YEAR_RANGE.contains(y));
        return if year { LiteralType::Year } else { LiteralType::Numeric };
    }
    if lexicals().all(|s| s.len() >= 10 && parse_timestamp(s).is_some()) {
        return LiteralType::Date;
    }
    if opts.allow_nld && mean_token_count(values.iter().map(|v| v.lexical())) >= opts.nld_min_avg_tokens {
        LiteralType::Nld
    } else {
        LiteralType::Categorical
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::term::{XSD_BOOLEAN, XSD_INTEGER};

    const OPTS: InferOptions = InferOptions {
        nld_min_avg_tokens: 5.0,
        forced_nld: false,
        allow_nld: true,
    };

    fn infer(values: &[Literal]) -> LiteralType {
        let refs: Vec<&Literal> = values.iter().collect();
        infer_literal_type(&refs, &OPTS)
    }

    #[test]
    fn declared_datatypes_win() {
        assert_eq!(infer(&[Literal::typed("1", XSD_BOOLEAN)]), LiteralType::Boolean);
        assert_eq!(
            infer(&[Literal::typed("2005", format!("{XSD}gYear"))]),
            LiteralType::Year
        );
        // declared integer beats the year heuristic
        assert_eq!(infer(&[Literal::typed("2005", XSD_INTEGER)]), LiteralType::Numeric);
        assert_eq!(infer(&[Literal::typed("2001-01-01", format!("{XSD}date"))]), LiteralType::Date);
    }

    #[test]
    fn lexical_patterns() {
        let plain = |xs: &[&str]| xs.iter().map(|s| Literal::plain(*s)).collect::<Vec<_>>();
        assert_eq!(infer(&plain(&["true", "false"])), LiteralType::Boolean);
        assert_eq!(infer(&plain(&["2005", "2013", "1998"])), LiteralType::Year);
        assert_eq!(infer(&plain(&["2005", "999"])), LiteralType::Numeric);
        assert_eq!(infer(&plain(&["2005.5"])), LiteralType::Numeric);
        assert_eq!(infer(&plain(&["1970-01-01", "2020-02-29T10:00:00Z"])), LiteralType::Date);
        assert_eq!(infer(&plain(&["article", "review"])), LiteralType::Categorical);
        assert_eq!(infer(&plain(&["nan", "inf"])), LiteralType::Categorical);
    }

    #[test]
    fn long_text_is_nld() {
        let abstract_ = "word ".repeat(40);
        assert_eq!(infer(&[Literal::plain(abstract_.clone())]), LiteralType::Nld);
        let no_nld = InferOptions {
            allow_nld: false,
            ..OPTS
        };
        assert_eq!(
            infer_literal_type(&[&Literal::plain(abstract_)], &no_nld),
            LiteralType::Categorical
        );
        let forced = InferOptions {
            forced_nld: true,
            ..OPTS
        };
        assert_eq!(infer_literal_type(&[&Literal::plain("x")], &forced), LiteralType::Nld);
    }

    #[test]
    fn timestamps() {
        assert_eq!(parse_timestamp("1970-01-01"), Some(0.0));
        assert_eq!(parse_timestamp("1970-01-02"), Some(86400.0));
        assert_eq!(parse_timestamp("1970-01-01T00:00:01.5Z"), Some(1.5));
        assert_eq!(parse_timestamp("1970-01-01T01:00:00+01:00"), Some(0.0));
        assert_eq!(parse_timestamp("1970-01-02Z"), Some(86400.0));
        assert_eq!(parse_timestamp("1970-01-01T00:00:00"), Some(0.0));
        assert_eq!(parse_timestamp("2020-13-01"), None);
        assert_eq!(parse_timestamp("hello"), None);
    }

    #[test]
    fn years_and_booleans() {
        assert_eq!(parse_year("2005"), Some(2005.0));
        assert_eq!(parse_year("2005Z"), Some(2005.0));
        assert_eq!(parse_year("-0044"), Some(-44.0));
        assert_eq!(parse_year("20x5"), None);
        assert_eq!(parse_boolean("1"), Some(1.0));
        assert_eq!(parse_boolean("no"), None);
    }
}
