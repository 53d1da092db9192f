//! CSV carrier for response datasets.
//!
//! ```text
//! # design=three
//! # seed=7
//! respondent_id,branch,first_question,first_answer,second_question,second_answer
//! r0000000,BA,b,+1,a,-1
//! ```
//!
//! Optional `# key=value` lines before the header carry run metadata. The
//! header row must match exactly.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::probability::{Outcome, VariableIndex};
use crate::survey::{Branch, ResponseDataset, ResponseRecord};

pub const HEADER: &str = "respondent_id,branch,first_question,first_answer,second_question,second_answer";

pub fn write_dataset(data: &ResponseDataset) -> String {
    let mut out = String::with_capacity(64 + data.len() * 24);
    for (k, v) in &data.metadata {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(HEADER);
    out.push('\n');
    for r in &data.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.respondent_id, r.branch, r.first_question, r.first_answer, r.second_question, r.second_answer
        );
    }
    out
}

fn format_err(line: u64, message: impl Into<String>) -> Error {
    Error::Format { line, message: message.into() }
}

pub fn parse_dataset(text: &str) -> Result<ResponseDataset> {
    let mut metadata = Vec::new();
    let mut offset = 0usize;
    let mut line_no = 0u64;
    let mut header_seen = false;

    for raw in text.split_inclusive('\n') {
        line_no += 1;
        offset += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        if let Some(comment) = line.strip_prefix('#') {
            let Some((k, v)) = comment.trim_start().split_once('=') else {
                return Err(format_err(line_no, "metadata line must be `# key=value`"));
            };
            metadata.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        if line != HEADER {
            return Err(format_err(line_no, format!("expected header `{HEADER}`")));
        }
        header_seen = true;
        break;
    }
    if !header_seen {
        return Err(format_err(line_no.max(1), "missing header row"));
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text[offset..].as_bytes());
    let mut records = Vec::new();
    let mut ids = HashSet::new();
    let mut row = csv::StringRecord::new();
    loop {
        let more = reader.read_record(&mut row).map_err(|e| {
            let line = e.position().map_or(line_no + 1, |p| line_no + p.line());
            format_err(line, e.to_string())
        })?;
        if !more {
            break;
        }
        let line = line_no + row.position().map_or(0, |p| p.line());
        let record = parse_row(&row, line)?;
        if !ids.insert(record.respondent_id.clone()) {
            return Err(Error::DuplicateRespondent { line, respondent_id: record.respondent_id });
        }
        records.push(record);
    }
    Ok(ResponseDataset { metadata, records })
}

fn parse_row(row: &csv::StringRecord, line: u64) -> Result<ResponseRecord> {
    if row.len() != 6 {
        return Err(format_err(line, format!("expected 6 fields, found {}", row.len())));
    }
    let field = |i: usize| &row[i];
    let id = field(0);
    if id.is_empty() {
        return Err(format_err(line, "empty respondent_id"));
    }
    let branch: Branch = field(1).parse().map_err(|e: String| format_err(line, e))?;
    let question = |i| field(i).parse::<VariableIndex>().map_err(|e| format_err(line, e));
    let answer = |i| field(i).parse::<Outcome>().map_err(|e| format_err(line, e));
    let record = ResponseRecord {
        respondent_id: id.to_string(),
        branch,
        first_question: question(2)?,
        first_answer: answer(3)?,
        second_question: question(4)?,
        second_answer: answer(5)?,
    };
    record.validate().map_err(|e| match e {
        Error::InconsistentBranch { message, .. } => format_err(line, message),
        other => other,
    })?;
    Ok(record)
}
