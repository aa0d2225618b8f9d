//! CSV tables with a fixed column order.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const HEADER: [&str; 8] = ["action", "n", "epsilon", "s_n", "s_exact", "r_n", "r_exact", "method"];

/// One table row. `epsilon` is already rendered to 12 significant digits;
/// `r_n` and `r_exact` are empty when spanning sets were not computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub action: String,
    pub n: usize,
    pub epsilon: String,
    pub s_n: usize,
    pub s_exact: bool,
    pub r_n: Option<usize>,
    pub r_exact: Option<bool>,
    pub method: String,
}

impl Row {
    fn has_spanning(&self) -> bool {
        self.r_n.is_some()
    }
}

/// Renders rows as CSV: header first, `\n` line ends. Rows must agree on
/// the action and on whether spanning counts are present.
pub fn emit_table(rows: &[Row]) -> Result<String, CliError> {
    if let Some(first) = rows.first() {
        if let Some(r) = rows.iter().find(|r| {
            r.action != first.action
                || r.has_spanning() != first.has_spanning()
                || r.r_n.is_some() != r.r_exact.is_some()
        }) {
            return Err(CliError::Run(format!(
                "heterogeneous table rows: {:?} does not match {:?}",
                r, first
            )));
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.action.clone(),
            r.n.to_string(),
            r.epsilon.clone(),
            r.s_n.to_string(),
            r.s_exact.to_string(),
            r.r_n.map(|v| v.to_string()).unwrap_or_default(),
            r.r_exact.map(|v| v.to_string()).unwrap_or_default(),
            r.method.clone(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Run(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Reads a table back; the header must match exactly.
pub fn parse_table(text: &str) -> Result<Vec<Row>, CliError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Run(format!("unexpected table header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<usize, CliError> {
            field(i)
                .parse()
                .map_err(|_| CliError::Run(format!("bad number {:?} in column {}", field(i), HEADER[i])))
        };
        let flag = |i: usize| -> Result<bool, CliError> {
            field(i)
                .parse()
                .map_err(|_| CliError::Run(format!("bad flag {:?} in column {}", field(i), HEADER[i])))
        };
        rows.push(Row {
            action: field(0).to_string(),
            n: num(1)?,
            epsilon: field(2).to_string(),
            s_n: num(3)?,
            s_exact: flag(4)?,
            r_n: if field(5).is_empty() { None } else { Some(num(5)?) },
            r_exact: if field(6).is_empty() { None } else { Some(flag(6)?) },
            method: field(7).to_string(),
        });
    }
    Ok(rows)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Run(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize) -> Row {
        Row {
            action: "doubling".into(),
            n,
            epsilon: "0.2".into(),
            s_n: 3,
            s_exact: true,
            r_n: None,
            r_exact: None,
            method: "exhaustive".into(),
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(
            emit_table(&[]).unwrap(),
            "action,n,epsilon,s_n,s_exact,r_n,r_exact,method\n"
        );
    }

    #[test]
    fn one_row_is_two_lines() {
        let t = emit_table(&[row(1)]).unwrap();
        assert_eq!(
            t,
            "action,n,epsilon,s_n,s_exact,r_n,r_exact,method\ndoubling,1,0.2,3,true,,,exhaustive\n"
        );
        assert_eq!(parse_table(&t).unwrap(), vec![row(1)]);
    }

    #[test]
    fn mixed_rows_are_rejected() {
        let mut b = row(2);
        b.r_n = Some(1);
        b.r_exact = Some(true);
        assert!(emit_table(&[row(1), b]).is_err());
        let mut c = row(2);
        c.action = "other".into();
        assert!(emit_table(&[row(1), c]).is_err());
    }
}
