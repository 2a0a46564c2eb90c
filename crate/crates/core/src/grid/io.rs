//! Grid function import and export.
//!
//! CSV: an optional `# window n=<n> level=<j> offsets=<k1;k2;..> depth=<J>`
//! line, then the header `index,re,im` and one row per cell. Cells missing
//! from the file are zero.
//!
//! Binary, little-endian throughout:
//!
//! | field        | type            |
//! |--------------|-----------------|
//! | magic        | `b"CZGF"`       |
//! | version      | `u32` (= 1)     |
//! | n            | `u32`           |
//! | root level   | `i32`           |
//! | offsets      | `n × i64`       |
//! | depth        | `u32`           |
//! | cell count   | `u64`           |
//! | values       | `count × (f64 re, f64 im)` in flat index order |

use std::io::{BufRead, BufReader, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use super::{GridFunction, Window};
use crate::dyadic::BoundaryCube;
use crate::Error;

const MAGIC: &[u8; 4] = b"CZGF";
const VERSION: u32 = 1;

fn window_line(w: &Window) -> String {
    let offs: Vec<String> = w.root.offsets().iter().map(|k| k.to_string()).collect();
    format!(
        "# window n={} level={} offsets={} depth={}",
        w.dim(),
        w.root.level(),
        offs.join(";"),
        w.depth
    )
}

fn parse_window_line(line: &str) -> Result<Window, Error> {
    let bad = || Error::Format(format!("malformed window line: {line}"));
    let body = line.trim().strip_prefix("# window").ok_or_else(bad)?;
    let (mut n, mut level, mut offsets, mut depth) = (None, None, None, None);
    for tok in body.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(bad)?;
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|_| bad())?),
            "level" => level = Some(v.parse::<i32>().map_err(|_| bad())?),
            "offsets" => {
                offsets = Some(
                    v.split(';')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse::<i64>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            "depth" => depth = Some(v.parse::<u32>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let offsets = offsets.unwrap_or_default();
    if n.ok_or_else(bad)? != offsets.len() {
        return Err(bad());
    }
    let root = BoundaryCube::new(level.ok_or_else(bad)?, offsets)?;
    Window::new(root, depth.ok_or_else(bad)?)
}

pub fn write_csv<W: Write>(f: &GridFunction, out: W) -> Result<(), Error> {
    let mut out = out;
    writeln!(out, "{}", window_line(f.window()))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "re", "im"])?;
    for (i, v) in f.values().iter().enumerate() {
        w.write_record([i.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV grid function; `window` is required when the file has no
/// window line and must agree with it otherwise.
pub fn read_csv<R: Read>(input: R, window: Option<&Window>) -> Result<GridFunction, Error> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    let (win, header) = if first.starts_with('#') {
        let w = parse_window_line(&first)?;
        if let Some(given) = window {
            if *given != w {
                return Err(Error::Format(
                    "window line disagrees with the given window".into(),
                ));
            }
        }
        (w, None)
    } else {
        let w = window
            .cloned()
            .ok_or_else(|| Error::Format("no window line and no window given".into()))?;
        (w, Some(first))
    };
    let rest = header.unwrap_or_default();
    let chained = rest.as_bytes().chain(input);
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(chained);
    let mut f = GridFunction::zeros(win);
    let count = f.values().len();
    for rec in r.records() {
        let rec = rec?;
        let field = |k: usize| -> Result<&str, Error> {
            rec.get(k)
                .map(str::trim)
                .ok_or_else(|| Error::Format("short CSV row".into()))
        };
        let idx: usize = field(0)?
            .parse()
            .map_err(|_| Error::Format(format!("bad cell index {:?}", field(0))))?;
        let re: f64 = field(1)?
            .parse()
            .map_err(|_| Error::Format("bad real part".into()))?;
        let im: f64 = match rec.get(2) {
            Some(s) if !s.trim().is_empty() => s
                .trim()
                .parse()
                .map_err(|_| Error::Format("bad imaginary part".into()))?,
            _ => 0.0,
        };
        if idx >= count {
            return Err(Error::Format(format!("cell index {idx} out of range")));
        }
        f.values_mut()[idx] = Complex64::new(re, im);
    }
    Ok(f)
}

pub fn write_binary<W: Write>(f: &GridFunction, mut out: W) -> Result<(), Error> {
    let w = f.window();
    out.write_all(MAGIC)?;
    out.write_u32::<LittleEndian>(VERSION)?;
    out.write_u32::<LittleEndian>(w.dim() as u32)?;
    out.write_i32::<LittleEndian>(w.root.level())?;
    for &k in w.root.offsets() {
        out.write_i64::<LittleEndian>(k)?;
    }
    out.write_u32::<LittleEndian>(w.depth)?;
    out.write_u64::<LittleEndian>(f.values().len() as u64)?;
    for v in f.values() {
        out.write_f64::<LittleEndian>(v.re)?;
        out.write_f64::<LittleEndian>(v.im)?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<GridFunction, Error> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a grid function file".into()));
    }
    let version = input.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = input.read_u32::<LittleEndian>()? as usize;
    if n > 8 {
        return Err(Error::Format(format!("dimension {n} too large")));
    }
    let level = input.read_i32::<LittleEndian>()?;
    let offsets = (0..n)
        .map(|_| input.read_i64::<LittleEndian>())
        .collect::<Result<Vec<_>, _>>()?;
    let depth = input.read_u32::<LittleEndian>()?;
    let window = Window::new(BoundaryCube::new(level, offsets)?, depth)?;
    let count = input.read_u64::<LittleEndian>()? as usize;
    if count != window.num_cells() {
        return Err(Error::Format("cell count does not match the window".into()));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let re = input.read_f64::<LittleEndian>()?;
        let im = input.read_f64::<LittleEndian>()?;
        values.push(Complex64::new(re, im));
    }
    GridFunction::from_values(window, values)
}
