//! JSON, CSV and DOT encodings.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{Check, SweepRecord};
use crate::constructions::OrientedDecomposition;
use crate::error::{Error, Result};
use crate::orient::VertexOrdering;
use crate::sequence::{DefiningSequence, PartitionLabeling, Vertex};
use crate::solver::SolveStatus;

const COLORS: [&str; 8] = [
    "black",
    "red",
    "blue",
    "darkgreen",
    "orange",
    "purple",
    "brown",
    "cyan4",
];
const STYLES: [&str; 3] = ["solid", "dashed", "dotted"];

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Decodes JSON text; errors carry the line and column of the failure.
/// Validation errors raised after a value is read point at its end.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column) = if e.line() == 0 {
            let body = text.trim_end();
            let line = body.lines().count().max(1);
            let column = body.lines().last().map_or(0, |l| l.chars().count());
            (line, column)
        } else {
            (e.line(), e.column())
        };
        Error::Parse {
            location: format!("line {line}, column {column}"),
            message: e.to_string(),
        }
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    k: usize,
    n: usize,
    sequence: String,
    standard: bool,
    blowup: usize,
    necessary_prefix: String,
    necessary_jump: String,
    size_filter: String,
    status: String,
    witness: String,
}

impl From<&SweepRecord> for CsvRow {
    fn from(r: &SweepRecord) -> Self {
        CsvRow {
            k: r.sequence.k(),
            n: r.sequence.n(),
            sequence: r.sequence.word(),
            standard: r.standard,
            blowup: r.blowup,
            necessary_prefix: r.necessary_prefix.to_string(),
            necessary_jump: r.necessary_jump.to_string(),
            size_filter: r.size_filter.to_string(),
            status: r.status.as_str().to_string(),
            witness: r
                .witness
                .as_ref()
                .map(|w| {
                    w.as_slice()
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default(),
        }
    }
}

impl CsvRow {
    fn into_record(self, row: usize) -> Result<SweepRecord> {
        let err = |message: String| Error::Parse {
            location: format!("row {row}"),
            message,
        };
        let check = |s: &str| s.parse::<Check>().map_err(|e| err(e.to_string()));
        let sequence: DefiningSequence = format!("k{}n{}:{}", self.k, self.n, self.sequence)
            .parse()
            .map_err(|e: Error| err(e.to_string()))?;
        let status = match self.status.as_str() {
            "sat" => SolveStatus::Sat,
            "unsat" => SolveStatus::Unsat,
            "budget_exceeded" => SolveStatus::BudgetExceeded,
            other => return Err(err(format!("unknown status {other:?}"))),
        };
        let witness = if self.witness.trim().is_empty() {
            None
        } else {
            let tau = self
                .witness
                .split_whitespace()
                .map(|t| t.parse::<Vertex>().map_err(|e| err(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            Some(VertexOrdering::new(tau).map_err(|e| err(e.to_string()))?)
        };
        Ok(SweepRecord {
            sequence,
            standard: self.standard,
            blowup: self.blowup,
            necessary_prefix: check(&self.necessary_prefix)?,
            necessary_jump: check(&self.necessary_jump)?,
            size_filter: check(&self.size_filter)?,
            status,
            witness,
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    let location = match e.position() {
        Some(p) => format!("line {}", p.line()),
        None => "unknown".to_string(),
    };
    Error::Parse {
        location,
        message: e.to_string(),
    }
}

/// Writes sweep records with header
/// `k,n,sequence,standard,blowup,necessary_prefix,necessary_jump,size_filter,status,witness`.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow::from(r)).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Parse {
        location: "output".to_string(),
        message: e.to_string(),
    })
}

pub fn sweep_to_csv(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(records, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8")
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    let expected = [
        "k",
        "n",
        "sequence",
        "standard",
        "blowup",
        "necessary_prefix",
        "necessary_jump",
        "size_filter",
        "status",
        "witness",
    ];
    if header.iter().ne(expected) {
        return Err(Error::Parse {
            location: "line 1".to_string(),
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    r.deserialize::<CsvRow>()
        .enumerate()
        .map(|(i, row)| row.map_err(csv_error)?.into_record(i + 1))
        .collect()
}

fn dot_header(out: &mut String, name: &str, directed: bool, n: usize) {
    let kind = if directed { "digraph" } else { "graph" };
    let _ = writeln!(out, "{kind} {name} {{");
    let _ = writeln!(out, "  node [shape=circle];");
    for v in 0..n {
        let _ = writeln!(out, "  {v};");
    }
}

fn dot_part(out: &mut String, d: usize, edges: &[(Vertex, Vertex)], directed: bool) {
    let arrow = if directed { "->" } else { "--" };
    let _ = writeln!(out, "  subgraph part_{d} {{");
    let _ = writeln!(
        out,
        "    edge [color={}, style={}, label=\"{d}\"];",
        COLORS[d % COLORS.len()],
        STYLES[(d / COLORS.len()) % STYLES.len()]
    );
    for &(u, v) in edges {
        let _ = writeln!(out, "    {u} {arrow} {v};");
    }
    let _ = writeln!(out, "  }}");
}

/// Renders the partition as DOT, one subgraph per part. Arcs follow `order`
/// when given; otherwise edges are undirected.
pub fn export_dot(p: &PartitionLabeling, order: Option<&VertexOrdering>) -> String {
    let seq = p.sequence();
    let (k, n) = (seq.k(), seq.n());
    let mut parts = vec![Vec::new(); k];
    for u in 0..n {
        for v in u + 1..n {
            let e = match order {
                Some(o) if o.precedes(v, u) => (v, u),
                _ => (u, v),
            };
            parts[p.label(u, v)].push(e);
        }
    }
    let mut out = String::new();
    dot_header(&mut out, "partition", order.is_some(), n);
    for (d, edges) in parts.iter_mut().enumerate() {
        edges.sort_unstable();
        dot_part(&mut out, d, edges, order.is_some());
    }
    out.push_str("}\n");
    out
}

pub fn decomposition_dot(dec: &OrientedDecomposition) -> String {
    let mut out = String::new();
    dot_header(&mut out, "decomposition", true, dec.n);
    for (d, edges) in dec.parts.iter().enumerate() {
        dot_part(&mut out, d, edges, true);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{sweep, SweepOptions};
    use crate::orient::{standard_orientation, OrientationReport};

    fn seq(s: &str) -> DefiningSequence {
        s.parse().unwrap()
    }

    #[test]
    fn ordering_round_trip() {
        let o = VertexOrdering::new(vec![0, 6, 1, 7, 2, 8, 11, 5, 4, 10, 3, 9]).unwrap();
        let text = to_json(&o);
        assert_eq!(from_json::<VertexOrdering>(&text).unwrap(), o);
    }

    #[test]
    fn invalid_length_is_parse_error() {
        let err = from_json::<DefiningSequence>(r#"{"k":3,"n":6,"a":[0,0]}"#).unwrap_err();
        match err {
            Error::Parse { location, message } => {
                assert!(location.starts_with("line 1"), "{location}");
                assert!(message.contains("length"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(from_json::<DefiningSequence>(r#"{"k":3,"n":6,"a":[0,0,0],"x":1}"#).is_err());
        assert!(from_json::<VertexOrdering>(r#"{"n":3,"tau":[0,1,2],"y":0}"#).is_err());
        assert!(from_json::<OrientationReport>(
            r#"{"reversed_edges":[],"verdict":"accept","first_violation":null,"z":1}"#
        )
        .is_err());
    }

    #[test]
    fn sweep_round_trips() {
        let opts = SweepOptions {
            parallel: false,
            ..SweepOptions::default()
        };
        let records = sweep(3, 6, &opts).unwrap();
        assert_eq!(records.len(), 9);
        let csv = sweep_to_csv(&records);
        assert!(csv.starts_with(
            "k,n,sequence,standard,blowup,necessary_prefix,necessary_jump,size_filter,status,witness\n"
        ));
        assert_eq!(read_sweep_csv(csv.as_bytes()).unwrap(), records);
        let json = to_json(&records);
        assert_eq!(from_json::<Vec<SweepRecord>>(&json).unwrap(), records);
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let header =
            "k,n,sequence,standard,blowup,necessary_prefix,necessary_jump,size_filter,status,witness\n";
        let bad = format!("{header}3,6,000,true,0,pass,pass,pass,maybe,\n");
        assert!(matches!(
            read_sweep_csv(bad.as_bytes()),
            Err(Error::Parse { .. })
        ));
        let bad = format!("{header}3,6,00,true,0,pass,pass,pass,sat,\n");
        assert!(read_sweep_csv(bad.as_bytes()).is_err());
        assert!(read_sweep_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn dot_directed() {
        let s = seq("k3n6:000");
        let p = s.labeling();
        let o = standard_orientation(&s).unwrap().unwrap();
        let dot = export_dot(&p, Some(&o));
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches(" -> ").count(), 15);
        assert_eq!(dot.matches("subgraph part_").count(), 3);
        assert_eq!(dot, export_dot(&p, Some(&o)));
    }

    #[test]
    fn dot_undirected() {
        let p = seq("k3n3:0").labeling();
        let dot = export_dot(&p, None);
        assert!(dot.starts_with("graph"));
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert!(!dot.contains("->"));
    }
}
