use std::io::{self, Write};

use lincode::bench::BenchCell;
use serde::Serialize;

use crate::Format;

#[derive(Serialize)]
struct Row<'a> {
    scheme: &'a str,
    shape: String,
    bits: u32,
    adds_per_entry: f64,
    stderr: f64,
    d_rel: f64,
    samples: usize,
    failures: usize,
}

fn row(c: &BenchCell) -> Row<'_> {
    Row {
        scheme: &c.scheme,
        shape: format!("{}x{}", c.rows, c.cols),
        bits: c.bits,
        adds_per_entry: c.adds_per_entry,
        stderr: c.stderr,
        d_rel: c.d_rel,
        samples: c.samples,
        failures: c.failures,
    }
}

pub fn render_cells<W: Write>(mut out: W, cells: &[BenchCell], format: Format) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(cells).expect("cells serialize")),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for c in cells {
                w.serialize(row(c)).map_err(io::Error::other)?;
            }
            w.flush()
        }
        Format::Md | Format::Text => {
            writeln!(out, "| scheme | shape | bits | adds/entry | stderr | D_rel | samples | failures |")?;
            writeln!(out, "|---|---|---:|---:|---:|---:|---:|---:|")?;
            for c in cells {
                let r = row(c);
                writeln!(
                    out,
                    "| {} | {} | {} | {:.4} | {:.4} | {:.3e} | {} | {} |",
                    r.scheme, r.shape, r.bits, r.adds_per_entry, r.stderr, r.d_rel, r.samples, r.failures
                )?;
            }
            Ok(())
        }
    }
}
