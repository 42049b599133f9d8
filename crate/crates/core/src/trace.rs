//! Plain-text update traces.
//!
//! One event per line: `+ u v weight`, `- u v`, or `w u v weight`. Blank
//! lines and anything after `#` are ignored. Node ids are 0-based.

use std::io::{BufRead, Write};

use crate::error::TraceError;
use crate::graph::{Edge, UpdateEvent};

fn parse_err(line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Parse { line, message: message.into() }
}

/// Parse one line; `Ok(None)` for blank or comment lines.
pub fn parse_line(text: &str, line: usize) -> Result<Option<UpdateEvent>, TraceError> {
    let body = text.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let fields: Vec<&str> = body.split_whitespace().collect();
    let node = |s: &str| s.parse::<usize>().map_err(|_| parse_err(line, format!("bad node id {s:?}")));
    let weight = |s: &str| s.parse::<f64>().map_err(|_| parse_err(line, format!("bad weight {s:?}")));
    let edge = |a: &str, b: &str| -> Result<Edge, TraceError> {
        let (a, b) = (node(a)?, node(b)?);
        if a == b {
            return Err(parse_err(line, format!("self-loop at {a}")));
        }
        Ok(Edge::new(a, b))
    };
    let ev = match fields.as_slice() {
        ["+", a, b, x] => UpdateEvent::Insert { edge: edge(a, b)?, weight: weight(x)? },
        ["-", a, b] => UpdateEvent::Delete { edge: edge(a, b)? },
        ["w", a, b, x] => UpdateEvent::SetWeight { edge: edge(a, b)?, weight: weight(x)? },
        _ => return Err(parse_err(line, format!("unrecognized event {body:?}"))),
    };
    Ok(Some(ev))
}

pub fn parse_str(text: &str) -> Result<Vec<UpdateEvent>, TraceError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        if let Some(ev) = parse_line(l, i + 1)? {
            out.push(ev);
        }
    }
    Ok(out)
}

pub fn read_trace<R: BufRead>(reader: R) -> Result<Vec<UpdateEvent>, TraceError> {
    let mut out = Vec::new();
    for (i, l) in reader.lines().enumerate() {
        if let Some(ev) = parse_line(&l?, i + 1)? {
            out.push(ev);
        }
    }
    Ok(out)
}

pub fn format_event(ev: &UpdateEvent) -> String {
    match *ev {
        UpdateEvent::Insert { edge, weight } => format!("+ {} {} {weight}", edge.u(), edge.v()),
        UpdateEvent::Delete { edge } => format!("- {} {}", edge.u(), edge.v()),
        UpdateEvent::SetWeight { edge, weight } => format!("w {} {} {weight}", edge.u(), edge.v()),
    }
}

pub fn write_trace<W: Write>(mut out: W, events: &[UpdateEvent]) -> std::io::Result<()> {
    for ev in events {
        writeln!(out, "{}", format_event(ev))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let evs = vec![
            UpdateEvent::Insert { edge: Edge::new(0, 3), weight: 0.125 },
            UpdateEvent::SetWeight { edge: Edge::new(3, 0), weight: 0.1 },
            UpdateEvent::Delete { edge: Edge::new(0, 3) },
        ];
        let mut buf = Vec::new();
        write_trace(&mut buf, &evs).unwrap();
        assert_eq!(parse_str(std::str::from_utf8(&buf).unwrap()).unwrap(), evs);
    }

    #[test]
    fn comments_and_blanks() {
        let evs = parse_str("# header\n\n+ 1 2 0.5  # trailing\n   \n- 1 2\n").unwrap();
        assert_eq!(evs.len(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_str("+ 0 1 0.5\n+ 0 x 0.5\n").unwrap_err();
        assert!(matches!(err, TraceError::Parse { line: 2, .. }), "{err}");
        let err = parse_str("\n\n? 0 1\n").unwrap_err();
        assert!(matches!(err, TraceError::Parse { line: 3, .. }));
        assert!(parse_str("- 4 4").is_err());
        assert!(parse_str("+ 0 1").is_err());
    }
}
