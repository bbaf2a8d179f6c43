//! JSON-Lines serialization of labeled traffic records.
//!
//! One record per line. The context file carries the full request/response
//! pair; the payload export uses the identical schema with the `response`
//! object omitted. Field order is fixed so identical datasets serialize to
//! identical bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::http;
use crate::model::{
    label_of, Dataset, DbResponseRecord, Dialect, HttpRequestRecord, InjectionIntent, Label,
    LabeledPair, PairedRecord, Split, Technique,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RequestLine {
    method: String,
    path: String,
    query: Vec<(String, String)>,
    headers: Vec<(String, String)>,
    body: String,
    payload: String,
    raw: String,
    issued_at: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ResponseLine {
    status: u16,
    latency_ms: u64,
    row_count: u64,
    body_digest: String,
    body_preview: String,
    error_text: Option<String>,
    replica_id: u32,
    completed_at: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IntentLine {
    technique: Technique,
    dialect: Dialect,
    evasions: Vec<String>,
    template_id: String,
    attempt: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RecordLine {
    session_id: String,
    label: u8,
    split: Split,
    request: RequestLine,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    response: Option<ResponseLine>,
    intent: IntentLine,
}

/// One parsed dataset line. `response` is absent for payload-only exports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredRecord {
    pub label: Label,
    pub split: Split,
    pub request: HttpRequestRecord,
    pub response: Option<DbResponseRecord>,
}

impl StoredRecord {
    pub fn session_id(&self) -> &str {
        &self.request.session_id
    }
}

fn request_line(rec: &HttpRequestRecord) -> RequestLine {
    RequestLine {
        method: rec.method.clone(),
        path: rec.path.clone(),
        query: rec.query.clone(),
        headers: rec.headers.clone(),
        body: rec.body.clone(),
        payload: rec.payload.clone(),
        raw: rec.raw.clone(),
        issued_at: rec.issued_at,
    }
}

fn response_line(rec: &DbResponseRecord) -> ResponseLine {
    ResponseLine {
        status: rec.status,
        latency_ms: rec.latency_ms,
        row_count: rec.row_count,
        body_digest: rec.body_digest.clone(),
        body_preview: rec.body_preview.clone(),
        error_text: rec.error_text.clone(),
        replica_id: rec.replica_id,
        completed_at: rec.completed_at,
    }
}

fn intent_line(intent: &InjectionIntent) -> IntentLine {
    IntentLine {
        technique: intent.technique,
        dialect: intent.dialect,
        evasions: intent.evasions.clone(),
        template_id: intent.template_id.clone(),
        attempt: intent.attempt,
    }
}

fn line_to_string(line: &RecordLine) -> Result<String> {
    let text = serde_json::to_string(line)?;
    debug_assert!(!text.contains('\n'), "serialized record must be one line");
    Ok(text)
}

/// Serialize one labeled pair (with its split assignment) as a context line.
pub fn serialize_record(rec: &LabeledPair, split: Split) -> Result<String> {
    line_to_string(&RecordLine {
        session_id: rec.session_id().to_string(),
        label: rec.label.value(),
        split,
        request: request_line(&rec.pair.request),
        response: Some(response_line(&rec.pair.response)),
        intent: intent_line(&rec.pair.request.intent),
    })
}

/// Serialize the payload-only view: identical schema, `response` omitted.
pub fn serialize_payload_record(rec: &LabeledPair, split: Split) -> Result<String> {
    line_to_string(&RecordLine {
        session_id: rec.session_id().to_string(),
        label: rec.label.value(),
        split,
        request: request_line(&rec.pair.request),
        response: None,
        intent: intent_line(&rec.pair.request.intent),
    })
}

/// Validate that `raw` re-parses into the record's components and embeds the
/// payload verbatim after injection-point encoding.
pub fn validate_raw_http(rec: &HttpRequestRecord) -> Result<()> {
    let parts = http::parse_http(&rec.raw)
        .map_err(|e| Error::Validation(format!("raw does not parse: {e}")))?;
    if parts.method != rec.method
        || parts.path != rec.path
        || parts.query != rec.query
        || parts.headers != rec.headers
        || parts.body != rec.body
    {
        return Err(Error::Validation(
            "raw components disagree with record fields".into(),
        ));
    }
    if http::render_http(&parts) != rec.raw {
        return Err(Error::Validation("raw is not in canonical form".into()));
    }
    let encoded_query = http::percent_encode(&rec.payload);
    let encoded_header = http::encode_header_value(&rec.payload);
    if !rec.raw.contains(&encoded_query) && !rec.raw.contains(&encoded_header) {
        return Err(Error::Validation(
            "payload does not occur verbatim in raw after encoding".into(),
        ));
    }
    Ok(())
}

fn record_from_line(line: RecordLine) -> Result<StoredRecord> {
    let label = Label::new(line.label)?;
    let request = HttpRequestRecord {
        session_id: line.session_id.clone(),
        issued_at: line.request.issued_at,
        method: line.request.method,
        path: line.request.path,
        query: line.request.query,
        headers: line.request.headers,
        body: line.request.body,
        payload: line.request.payload,
        intent: InjectionIntent {
            technique: line.intent.technique,
            dialect: line.intent.dialect,
            evasions: line.intent.evasions,
            template_id: line.intent.template_id,
            attempt: line.intent.attempt,
        },
        raw: line.request.raw,
    };
    let response = line.response.map(|r| DbResponseRecord {
        session_id: line.session_id,
        completed_at: r.completed_at,
        status: r.status,
        latency_ms: r.latency_ms,
        row_count: r.row_count,
        body_digest: r.body_digest,
        body_preview: r.body_preview,
        error_text: r.error_text,
        replica_id: r.replica_id,
    });

    if label != label_of(request.intent.technique) {
        return Err(Error::Validation(format!(
            "label {} does not match technique {}",
            label, request.intent.technique
        )));
    }
    request.intent.validate()?;
    validate_raw_http(&request)?;
    if let Some(resp) = &response {
        let pair = PairedRecord {
            request: request.clone(),
            response: resp.clone(),
        };
        pair.validate()?;
    }
    Ok(StoredRecord {
        label,
        split: line.split,
        request,
        response,
    })
}

/// Parse either a context or a payload-only line.
pub fn parse_stored(line: &str) -> Result<StoredRecord> {
    let parsed: RecordLine =
        serde_json::from_str(line).map_err(|e| Error::Parse(format!("record line: {e}")))?;
    record_from_line(parsed)
}

/// Parse one context line back into a labeled pair and its split.
pub fn parse_record(line: &str) -> Result<(LabeledPair, Split)> {
    let stored = parse_stored(line)?;
    let response = stored
        .response
        .ok_or_else(|| Error::Parse("record line: missing field `response`".into()))?;
    Ok((
        LabeledPair {
            pair: PairedRecord {
                request: stored.request,
                response,
            },
            label: stored.label,
        },
        stored.split,
    ))
}

fn write_lines<W: Write>(
    dataset: &Dataset,
    out: &mut W,
    serialize: impl Fn(&LabeledPair, Split) -> Result<String>,
) -> Result<()> {
    for rec in &dataset.records {
        let split = dataset
            .split_of(rec.session_id())
            .ok_or_else(|| Error::Validation(format!("record {} has no split", rec.session_id())))?;
        let line = serialize(rec, split)?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Write the full context dataset as JSONL.
pub fn write_context_file(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_lines(dataset, &mut out, serialize_record)?;
    out.flush()?;
    Ok(())
}

/// Write the payload-only export as JSONL.
pub fn write_payload_file(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_lines(dataset, &mut out, serialize_payload_record)?;
    out.flush()?;
    Ok(())
}

/// Read a context or payload JSONL file.
pub fn read_stored_file(path: &Path) -> Result<Vec<StoredRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_stored(&line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", idx + 1)))?;
        records.push(rec);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::STATUS_OK;

    pub(crate) fn sample_pair() -> LabeledPair {
        let payload = "7' OR '1'='1";
        let query = vec![("id".to_string(), payload.to_string())];
        let headers = vec![
            ("Host".to_string(), "shadow.local".to_string()),
            ("X-Request-Id".to_string(), "sess-000001".to_string()),
        ];
        let parts = http::HttpParts {
            method: "GET".into(),
            path: "/user".into(),
            query: query.clone(),
            headers: headers.clone(),
            body: String::new(),
        };
        let raw = http::render_http(&parts);
        let request = HttpRequestRecord {
            session_id: "sess-000001".into(),
            issued_at: 12,
            method: "GET".into(),
            path: "/user".into(),
            query,
            headers,
            body: String::new(),
            payload: payload.into(),
            intent: InjectionIntent {
                technique: Technique::BooleanBased,
                dialect: Dialect::Mysql,
                evasions: vec![],
                template_id: "boolean.quote_tautology".into(),
                attempt: 1,
            },
            raw,
        };
        let response = DbResponseRecord {
            session_id: "sess-000001".into(),
            completed_at: 30,
            status: STATUS_OK,
            latency_ms: 18,
            row_count: 20,
            body_digest: "ab12".into(),
            body_preview: "{\"columns\":[\"id\"]}".into(),
            error_text: None,
            replica_id: 0,
        };
        LabeledPair {
            pair: PairedRecord { request, response },
            label: label_of(Technique::BooleanBased),
        }
    }

    #[test]
    fn round_trip_identity() {
        let rec = sample_pair();
        let line = serialize_record(&rec, Split::Train).unwrap();
        let (back, split) = parse_record(&line).unwrap();
        assert_eq!(back, rec);
        assert_eq!(split, Split::Train);
    }

    #[test]
    fn error_text_serializes_as_explicit_null() {
        let rec = sample_pair();
        let line = serialize_record(&rec, Split::Test).unwrap();
        assert!(line.contains("\"error_text\":null"));
    }

    #[test]
    fn record_is_one_line() {
        let rec = sample_pair();
        let line = serialize_record(&rec, Split::Val).unwrap();
        assert!(!line.contains('\n'));
    }

    #[test]
    fn label_out_of_range_is_a_validation_error() {
        let rec = sample_pair();
        let line = serialize_record(&rec, Split::Train).unwrap();
        let bad = line.replace("\"label\":1", "\"label\":9");
        let err = parse_record(&bad).unwrap_err().to_string();
        assert!(err.contains("label out of range"), "got: {err}");
    }

    #[test]
    fn truncated_line_is_a_parse_error() {
        let rec = sample_pair();
        let line = serialize_record(&rec, Split::Train).unwrap();
        let err = parse_record(&line[..line.len() - 8]).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn mismatched_label_rejected() {
        let rec = sample_pair();
        let line = serialize_record(&rec, Split::Train).unwrap();
        let bad = line.replace("\"label\":1", "\"label\":2");
        let err = parse_record(&bad).unwrap_err().to_string();
        assert!(err.contains("does not match technique"), "got: {err}");
    }

    #[test]
    fn payload_export_omits_response() {
        let rec = sample_pair();
        let line = serialize_payload_record(&rec, Split::Train).unwrap();
        assert!(!line.contains("\"response\""));
        let stored = parse_stored(&line).unwrap();
        assert!(stored.response.is_none());
        assert_eq!(stored.request, rec.pair.request);
    }

    #[test]
    fn schema_field_order_is_stable() {
        let rec = sample_pair();
        let line = serialize_record(&rec, Split::Train).unwrap();
        let session_pos = line.find("\"session_id\"").unwrap();
        let label_pos = line.find("\"label\"").unwrap();
        let split_pos = line.find("\"split\"").unwrap();
        let request_pos = line.find("\"request\"").unwrap();
        let response_pos = line.find("\"response\"").unwrap();
        let intent_pos = line.find("\"intent\"").unwrap();
        assert!(session_pos < label_pos);
        assert!(label_pos < split_pos);
        assert!(split_pos < request_pos);
        assert!(request_pos < response_pos);
        assert!(response_pos < intent_pos);
    }
}
