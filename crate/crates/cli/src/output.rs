use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Returns the first non-finite value, if any.
pub fn first_non_finite(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().find(|x| !x.is_finite())
}

/// JSON formatter that prints every float with [`fmt_f64`]. serde_json turns
/// non-finite floats into `null` before they reach it, so callers check
/// with [`first_non_finite`] first.
struct FixedDigits(CompactFormatter);

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedDigits(CompactFormatter));
    value.serialize(&mut ser).map_err(io::Error::from)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// A CSV cell: a number, an integer, or empty.
pub enum Cell {
    Num(f64),
    Int(u64),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> io::Result<String> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut cells = Vec::with_capacity(row.len());
        for c in row {
            cells.push(match c {
                Cell::Num(x) if !x.is_finite() => {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("refusing to write non-finite number {x}"),
                    ))
                }
                Cell::Num(x) => fmt_f64(x),
                Cell::Int(i) => i.to_string(),
                Cell::Empty => String::new(),
            });
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}
