//! FROSTT `.tns` text files.
//!
//! Each data line holds `r` whitespace-separated 1-based indices followed by
//! one value. Lines starting with `#` and blank lines are ignored. There is no
//! header, so dimensions are the per-mode maximum index unless declared.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ordering::Ordering;
use crate::sorting::{transpose_in_place, SortStrategy, TransposeOptions, Workspace};
use crate::tensor::CooTensor;

#[derive(Clone, Debug)]
pub struct TnsOptions {
    /// Declared dimensions. Fixes the rank and keeps trailing empty slices.
    pub dims: Option<Vec<usize>>,
    /// Stably sort rows to the simple ordering after loading.
    pub canonicalize: bool,
}

impl Default for TnsOptions {
    fn default() -> Self {
        TnsOptions { dims: None, canonicalize: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub lines: usize,
    pub data_lines: usize,
    pub rank: usize,
}

pub fn read_tns(path: impl AsRef<Path>) -> Result<CooTensor> {
    read_tns_with(path, &TnsOptions::default()).map(|(t, _)| t)
}

pub fn read_tns_with(path: impl AsRef<Path>, opts: &TnsOptions) -> Result<(CooTensor, ParseStats)> {
    parse_tns(BufReader::new(File::open(path)?), opts)
}

pub fn parse_tns<R: BufRead>(reader: R, opts: &TnsOptions) -> Result<(CooTensor, ParseStats)> {
    let mut rank = opts.dims.as_ref().map(Vec::len);
    if rank == Some(0) {
        return Err(Error::invalid("declared dimensions are empty"));
    }
    let mut stats = ParseStats::default();
    let mut coords: Vec<u32> = Vec::new();
    let mut values = Vec::new();
    let mut max_index: Vec<usize> = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        stats.lines = lineno;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: lineno, msg };
        let fields: Vec<&str> = text.split_whitespace().collect();
        let r = *rank.get_or_insert(fields.len() - 1);
        if r == 0 {
            return Err(parse_err("line has no indices".into()));
        }
        if fields.len() != r + 1 {
            return Err(parse_err(format!("expected {} fields, found {}", r + 1, fields.len())));
        }
        if max_index.is_empty() {
            max_index = vec![0; r];
        }
        for (k, f) in fields[..r].iter().enumerate() {
            let idx: u64 = f
                .parse()
                .map_err(|_| parse_err(format!("index {f:?} of mode {} is not an integer", k + 1)))?;
            if idx < 1 {
                return Err(parse_err(format!("index of mode {} must be at least 1", k + 1)));
            }
            let zero_based = u32::try_from(idx - 1)
                .map_err(|_| parse_err(format!("index {idx} does not fit in 32 bits")))?;
            if let Some(dims) = &opts.dims {
                if idx as usize > dims[k] {
                    return Err(parse_err(format!(
                        "index {idx} of mode {} exceeds declared dimension {}",
                        k + 1,
                        dims[k]
                    )));
                }
            }
            max_index[k] = max_index[k].max(idx as usize);
            coords.push(zero_based);
        }
        let value: f64 = fields[r]
            .parse()
            .map_err(|_| parse_err(format!("value {:?} is not a number", fields[r])))?;
        values.push(value);
        stats.data_lines += 1;
    }

    let dims = match (&opts.dims, rank) {
        (Some(d), _) => d.clone(),
        (None, Some(_)) => max_index,
        (None, None) => {
            return Err(Error::invalid("file has no data lines and no declared dimensions"));
        }
    };
    stats.rank = dims.len();
    let mut tensor = CooTensor::new(dims, coords, values)?;
    if opts.canonicalize {
        let simple = Ordering::simple(tensor.rank());
        if !tensor.is_sorted_under(&simple)? {
            transpose_in_place(
                &mut tensor,
                &simple,
                SortStrategy::FullRadix,
                &TransposeOptions::default(),
                &mut Workspace::new(),
            )?;
        }
    }
    Ok((tensor, stats))
}

/// Writes rows in storage order with 1-based indices. Values use the shortest
/// decimal form that parses back to the same `f64`.
pub fn write_tns(tensor: &CooTensor, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_tns_to(tensor, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_tns_to<W: Write>(tensor: &CooTensor, w: &mut W) -> Result<()> {
    for (row, v) in tensor.rows().zip(tensor.values()) {
        for i in row {
            write!(w, "{} ", *i as u64 + 1)?;
        }
        writeln!(w, "{v:?}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<CooTensor> {
        parse_tns(s.as_bytes(), &TnsOptions::default()).map(|(t, _)| t)
    }

    #[test]
    fn shifts_indices_to_zero_based() {
        let t = parse("1 2 4 3.5\n").unwrap();
        assert_eq!(t.row(0), &[0, 1, 3]);
        assert_eq!(t.values(), &[3.5]);
        assert_eq!(t.dims(), &[1, 2, 4]);
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let (t, stats) = parse_tns("# header\n\n2 1 1.0\n1 1 2.0\n".as_bytes(), &TnsOptions::default()).unwrap();
        assert_eq!(stats, ParseStats { lines: 4, data_lines: 2, rank: 2 });
        // canonicalized
        assert_eq!(t.coords(), &[0, 0, 1, 0]);
        assert_eq!(t.values(), &[2.0, 1.0]);
    }

    #[test]
    fn keeps_order_without_canonicalize() {
        let opts = TnsOptions { canonicalize: false, ..Default::default() };
        let (t, _) = parse_tns("2 1 1.0\n1 1 2.0\n".as_bytes(), &opts).unwrap();
        assert_eq!(t.coords(), &[1, 0, 0, 0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let line_of = |s: &str| match parse(s) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("1 1 1.0\n1 1\n"), 2);
        assert_eq!(line_of("1 1 1.0\n# c\n0 1 1.0\n"), 3);
        assert_eq!(line_of("1 x 1.0\n"), 1);
        assert_eq!(line_of("1 1 abc\n"), 1);
        assert_eq!(line_of("5\n"), 1);
    }

    #[test]
    fn empty_file_needs_declared_dims() {
        assert!(matches!(parse(""), Err(Error::InvalidArgument(_))));
        let opts = TnsOptions { dims: Some(vec![3, 4]), canonicalize: true };
        let (t, _) = parse_tns("# nothing\n".as_bytes(), &opts).unwrap();
        assert_eq!(t.nnz(), 0);
        assert_eq!(t.dims(), &[3, 4]);
    }

    #[test]
    fn declared_dims_are_enforced() {
        let opts = TnsOptions { dims: Some(vec![2, 2]), canonicalize: true };
        assert!(matches!(parse_tns("3 1 1.0\n".as_bytes(), &opts), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_tns("1 1 1 1.0\n".as_bytes(), &opts), Err(Error::Parse { line: 1, .. })));
        let (t, _) = parse_tns("1 1 1.0\n".as_bytes(), &opts).unwrap();
        assert_eq!(t.dims(), &[2, 2]);
    }

    #[test]
    fn empty_tensor_writes_nothing() {
        let mut out = Vec::new();
        write_tns_to(&CooTensor::empty(vec![2]).unwrap(), &mut out).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn writes_exact_values() {
        let t = CooTensor::from_rows(vec![3, 3], &[[0, 2], [2, 1]], vec![0.1, -1e300]).unwrap();
        let mut out = Vec::new();
        write_tns_to(&t, &mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), "1 3 0.1\n3 2 -1e300\n");
        let opts = TnsOptions { dims: Some(vec![3, 3]), canonicalize: false };
        assert_eq!(parse_tns(out.as_slice(), &opts).unwrap().0, t);
    }
}
