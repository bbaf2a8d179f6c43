//! Minimal HTTP/1.1 text rendering and parsing.
//!
//! Every request in the system is materialized as raw HTTP text and must
//! re-parse into the exact components it was rendered from. Rendering is
//! canonical: re-rendering parsed components reproduces the raw text
//! byte-for-byte.

use crate::error::{Error, Result};

const HTTP_VERSION: &str = "HTTP/1.1";

fn is_unreserved(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~')
}

/// Percent-encode every byte outside the unreserved set, uppercase hex.
pub fn percent_encode(input: &str) -> String {
    let mut out = String::with_capacity(input.len());
    for &b in input.as_bytes() {
        if is_unreserved(b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

/// Decode one layer of percent-encoding. Invalid `%` sequences pass through.
pub fn percent_decode_once(input: &str) -> String {
    let bytes = input.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            let hi = (bytes[i + 1] as char).to_digit(16);
            let lo = (bytes[i + 2] as char).to_digit(16);
            if let (Some(hi), Some(lo)) = (hi, lo) {
                out.push((hi * 16 + lo) as u8);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    match String::from_utf8(out) {
        Ok(s) => s,
        Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
    }
}

/// Encode a value for use in an HTTP header: control bytes become `%XX`,
/// everything else passes through.
pub fn encode_header_value(input: &str) -> String {
    let mut out = String::with_capacity(input.len());
    for &b in input.as_bytes() {
        if b < 0x20 || b == 0x7f {
            out.push_str(&format!("%{b:02X}"));
        } else {
            out.push(b as char);
        }
    }
    out
}

/// Render query or form pairs as `k=v&k=v` with canonical percent-encoding.
pub fn encode_pairs(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{}={}", percent_encode(k), percent_encode(v)))
        .collect::<Vec<_>>()
        .join("&")
}

/// Inverse of [`encode_pairs`].
pub fn decode_pairs(text: &str) -> Vec<(String, String)> {
    if text.is_empty() {
        return Vec::new();
    }
    text.split('&')
        .map(|item| match item.split_once('=') {
            Some((k, v)) => (percent_decode_once(k), percent_decode_once(v)),
            None => (percent_decode_once(item), String::new()),
        })
        .collect()
}

/// Structural components of one HTTP/1.1 request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpParts {
    pub method: String,
    pub path: String,
    pub query: Vec<(String, String)>,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

/// Render components into raw HTTP/1.1 text.
pub fn render_http(parts: &HttpParts) -> String {
    let mut target = parts.path.clone();
    if !parts.query.is_empty() {
        target.push('?');
        target.push_str(&encode_pairs(&parts.query));
    }
    let mut out = format!("{} {} {}\r\n", parts.method, target, HTTP_VERSION);
    for (name, value) in &parts.headers {
        out.push_str(name);
        out.push_str(": ");
        out.push_str(value);
        out.push_str("\r\n");
    }
    out.push_str("\r\n");
    out.push_str(&parts.body);
    out
}

/// Parse raw HTTP/1.1 text back into components.
pub fn parse_http(raw: &str) -> Result<HttpParts> {
    let (head, body) = raw
        .split_once("\r\n\r\n")
        .ok_or_else(|| Error::Parse("http: missing header terminator".into()))?;
    let mut lines = head.split("\r\n");
    let request_line = lines
        .next()
        .ok_or_else(|| Error::Parse("http: empty request".into()))?;
    let mut tokens = request_line.split(' ');
    let method = tokens
        .next()
        .filter(|m| !m.is_empty())
        .ok_or_else(|| Error::Parse("http: missing method".into()))?;
    let target = tokens
        .next()
        .ok_or_else(|| Error::Parse("http: missing request target".into()))?;
    let version = tokens
        .next()
        .ok_or_else(|| Error::Parse("http: missing version".into()))?;
    if version != HTTP_VERSION || tokens.next().is_some() {
        return Err(Error::Parse(format!(
            "http: malformed request line `{request_line}`"
        )));
    }
    let (path, query) = match target.split_once('?') {
        Some((p, q)) => (p.to_string(), decode_pairs(q)),
        None => (target.to_string(), Vec::new()),
    };
    let mut headers = Vec::new();
    for line in lines {
        let (name, value) = line
            .split_once(": ")
            .ok_or_else(|| Error::Parse(format!("http: malformed header `{line}`")))?;
        headers.push((name.to_string(), value.to_string()));
    }
    if let Some((_, len)) = headers.iter().find(|(n, _)| n == "Content-Length") {
        let expect: usize = len
            .parse()
            .map_err(|_| Error::Parse("http: bad Content-Length".into()))?;
        if expect != body.len() {
            return Err(Error::Parse(format!(
                "http: Content-Length {expect} does not match body length {}",
                body.len()
            )));
        }
    }
    Ok(HttpParts {
        method: method.to_string(),
        path,
        query,
        headers,
        body: body.to_string(),
    })
}

/// Look up the first header with name `name`.
pub fn header<'a>(headers: &'a [(String, String)], name: &str) -> Option<&'a str> {
    headers
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_parts() -> HttpParts {
        HttpParts {
            method: "GET".into(),
            path: "/user".into(),
            query: vec![("id".into(), "7' OR '1'='1".into())],
            headers: vec![
                ("Host".into(), "shadow.local".into()),
                ("X-Request-Id".into(), "sess-000001".into()),
            ],
            body: String::new(),
        }
    }

    #[test]
    fn percent_encoding_matches_reserved_byte_rule() {
        assert_eq!(percent_encode("' OR 1=1--"), "%27%20OR%201%3D1--");
        assert_eq!(percent_decode_once("%27%20OR%201%3D1--"), "' OR 1=1--");
    }

    #[test]
    fn stray_percent_passes_through_decode() {
        assert_eq!(percent_decode_once("50%_off"), "50%_off");
        assert_eq!(percent_decode_once("%"), "%");
        assert_eq!(percent_decode_once("%2"), "%2");
    }

    #[test]
    fn render_parse_round_trip() {
        let parts = sample_parts();
        let raw = render_http(&parts);
        assert!(raw.starts_with("GET /user?id=7%27%20OR%20%271%27%3D%271 HTTP/1.1\r\n"));
        let reparsed = parse_http(&raw).unwrap();
        assert_eq!(reparsed, parts);
        assert_eq!(render_http(&reparsed), raw);
    }

    #[test]
    fn post_body_round_trip() {
        let body = encode_pairs(&[("username".into(), "admin'--".into()),
                                  ("password".into(), "hunter2".into())]);
        let parts = HttpParts {
            method: "POST".into(),
            path: "/login".into(),
            query: vec![],
            headers: vec![
                ("Host".into(), "shadow.local".into()),
                ("Content-Type".into(), "application/x-www-form-urlencoded".into()),
                ("Content-Length".into(), body.len().to_string()),
            ],
            body,
        };
        let raw = render_http(&parts);
        let reparsed = parse_http(&raw).unwrap();
        assert_eq!(reparsed, parts);
        assert_eq!(render_http(&reparsed), raw);
    }

    #[test]
    fn truncated_raw_is_rejected() {
        let raw = render_http(&sample_parts());
        assert!(parse_http(&raw[..raw.len() / 2]).is_err());
        assert!(parse_http("GET /x\r\n\r\n").is_err());
    }

    #[test]
    fn content_length_mismatch_is_rejected() {
        let raw = "POST /login HTTP/1.1\r\nContent-Length: 10\r\n\r\nabc";
        assert!(parse_http(raw).is_err());
    }

    proptest! {
        #[test]
        fn encode_decode_identity(s in "\\PC*") {
            prop_assert_eq!(percent_decode_once(&percent_encode(&s)), s);
        }

        #[test]
        fn query_value_round_trip(v in "\\PC{0,60}") {
            let parts = HttpParts {
                method: "GET".into(),
                path: "/search".into(),
                query: vec![("q".into(), v)],
                headers: vec![("Host".into(), "shadow.local".into())],
                body: String::new(),
            };
            let raw = render_http(&parts);
            let reparsed = parse_http(&raw).unwrap();
            prop_assert_eq!(&reparsed, &parts);
            prop_assert_eq!(render_http(&reparsed), raw);
        }
    }
}
