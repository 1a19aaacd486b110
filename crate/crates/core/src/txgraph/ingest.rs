use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use super::graph::{Edge, NodeId, TxGraph};
use super::GraphError;

pub const EDGE_LIST_HEADER: [&str; 4] = ["src_user", "dst_user", "timestamp_unix", "value_satoshi"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IngestMode {
    /// Abort on the first malformed row.
    #[default]
    Strict,
    /// Skip malformed rows and report them.
    Skip,
}

impl IngestMode {
    pub fn name(self) -> &'static str {
        match self {
            IngestMode::Strict => "strict",
            IngestMode::Skip => "skip",
        }
    }
}

impl std::str::FromStr for IngestMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(IngestMode::Strict),
            "skip" => Ok(IngestMode::Skip),
            other => Err(format!("unknown ingest mode {other:?} (expected strict or skip)")),
        }
    }
}

/// A data row that failed validation. `line` is the physical line in the
/// file (the header is line 1); `row` counts data rows from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    pub line: u64,
    pub row: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub graph: TxGraph,
    pub rejected: Vec<RejectedRow>,
}

pub fn ingest_edge_list(path: &Path, mode: IngestMode) -> Result<Ingested, GraphError> {
    let file = std::fs::File::open(path).map_err(|e| GraphError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    read_edge_list(file, mode)
}

/// Parses an edge-list CSV. External user ids are densified in ascending
/// order, so node ids do not depend on row order.
pub fn read_edge_list<R: Read>(r: R, mode: IngestMode) -> Result<Ingested, GraphError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(r);
    let mut records = rdr.records();

    let header = match records.next() {
        None => return Err(GraphError::MissingHeader),
        Some(rec) => rec.map_err(|e| csv_error(e, 1))?,
    };
    let header_line = header.position().map_or(1, |p| p.line());
    if header.iter().map(str::trim).ne(EDGE_LIST_HEADER) {
        return Err(GraphError::BadHeader {
            line: header_line,
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut raw: Vec<(u64, u64, i64, u64)> = Vec::new();
    let mut rejected = Vec::new();
    let mut row = 0u64;
    for rec in records {
        row += 1;
        let rec = rec.map_err(|e| csv_error(e, row))?;
        let line = rec.position().map_or(0, |p| p.line());
        match parse_row(&rec) {
            Ok(parsed) => raw.push(parsed),
            Err(reason) => match mode {
                IngestMode::Strict => return Err(GraphError::MalformedRow { line, row, reason }),
                IngestMode::Skip => rejected.push(RejectedRow { line, row, reason }),
            },
        }
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(s, d, _, _)| [s, d]).collect();
    ids.sort_unstable();
    ids.dedup();
    let dense: HashMap<u64, NodeId> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as NodeId))
        .collect();
    let edges = raw
        .into_iter()
        .map(|(s, d, timestamp, value)| Edge {
            src: dense[&s],
            dst: dense[&d],
            value,
            timestamp,
        })
        .collect();
    Ok(Ingested {
        graph: TxGraph::new(ids, edges)?,
        rejected,
    })
}

fn parse_row(rec: &csv::StringRecord) -> Result<(u64, u64, i64, u64), String> {
    if rec.len() != 4 {
        return Err(format!("expected 4 fields, found {}", rec.len()));
    }
    let field = |i: usize| rec[i].trim();
    let src: u64 = field(0)
        .parse()
        .map_err(|_| format!("src_user {:?} is not a non-negative integer", field(0)))?;
    let dst: u64 = field(1)
        .parse()
        .map_err(|_| format!("dst_user {:?} is not a non-negative integer", field(1)))?;
    let ts: i64 = field(2)
        .parse()
        .map_err(|_| format!("timestamp_unix {:?} is not an integer", field(2)))?;
    let value: i128 = field(3)
        .parse()
        .map_err(|_| format!("value_satoshi {:?} is not an integer", field(3)))?;
    if value < 0 {
        return Err(format!("value_satoshi {value} is negative"));
    }
    let value = u64::try_from(value).map_err(|_| format!("value_satoshi {value} overflows"))?;
    if src == dst {
        return Err(format!("self-edge on user {src}"));
    }
    Ok((src, dst, ts, value))
}

fn csv_error(e: csv::Error, row: u64) -> GraphError {
    let line = e.position().map_or(0, |p| p.line());
    GraphError::MalformedRow {
        line,
        row,
        reason: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "src_user,dst_user,timestamp_unix,value_satoshi\n";

    fn read(body: &str, mode: IngestMode) -> Result<Ingested, GraphError> {
        read_edge_list(format!("{HEADER}{body}").as_bytes(), mode)
    }

    #[test]
    fn three_valid_rows() {
        let g = read("10,20,100,5\n20,30,101,6\n10,30,102,7\n", IngestMode::Strict)
            .unwrap()
            .graph;
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.external_ids(), &[10, 20, 30]);
    }

    #[test]
    fn non_numeric_row() {
        let err = read("a,b,c,d\n", IngestMode::Strict).unwrap_err();
        match err {
            GraphError::MalformedRow { line, row, .. } => {
                assert_eq!(row, 1);
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn skip_mode_reports_lines() {
        let out = read("1,2,3,4\n1,2,3\n1,2,3,-5\n2,2,1,1\n3,4,5,6\n", IngestMode::Skip).unwrap();
        assert_eq!(out.graph.edge_count(), 2);
        let lines: Vec<_> = out.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
        assert!(out.rejected[1].reason.contains("negative"));
    }

    #[test]
    fn header_required() {
        assert!(matches!(
            read_edge_list("1,2,3,4\n".as_bytes(), IngestMode::Strict),
            Err(GraphError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            read_edge_list("".as_bytes(), IngestMode::Strict),
            Err(GraphError::MissingHeader)
        ));
    }

    #[test]
    fn round_trip_through_export() {
        let g = read("5,9,100,1\n9,5,200,2\n", IngestMode::Strict).unwrap().graph;
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let again = read_edge_list(buf.as_slice(), IngestMode::Strict).unwrap().graph;
        assert_eq!(g, again);
    }
}
