//! CSV serialization of signals.
//!
//! A [`DistributionalSignal`] serializes as a comment prologue holding the
//! Dirac terms followed by a `t,value` table:
//!
//! ```text
//! # delta,<location>,<order>,<coefficient>
//! t,value
//! 0,1.5
//! ...
//! ```
//!
//! Numbers are written with Rust's shortest round-trip formatting, so the
//! regular part survives a write/read cycle bit-exactly.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::types::{DiracTerm, DistributionalSignal, Grid};

/// Write a signal in the `t,value` format with its delta prologue.
pub fn write_signal<W: Write>(w: &mut W, sig: &DistributionalSignal) -> Result<()> {
    for d in sig.deltas() {
        writeln!(w, "# delta,{},{},{}", d.location, d.order, d.coefficient)?;
    }
    writeln!(w, "t,value")?;
    for (t, v) in sig.grid().nodes().zip(sig.regular()) {
        writeln!(w, "{t},{v}")?;
    }
    Ok(())
}

pub fn signal_to_string(sig: &DistributionalSignal) -> String {
    let mut buf = Vec::new();
    write_signal(&mut buf, sig).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Read a signal previously written by [`write_signal`]. The node lattice is
/// reconstructed from the first/last time stamps and the row count.
pub fn read_signal<R: BufRead>(r: R) -> Result<DistributionalSignal> {
    let mut deltas = Vec::new();
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut saw_header = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(spec) = rest.strip_prefix("delta,") {
                let parts: Vec<&str> = spec.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Malformed(format!(
                        "line {}: delta prologue needs location,order,coefficient",
                        lineno + 1
                    )));
                }
                let location = parse_num(parts[0], lineno)?;
                let order: usize = parts[1].trim().parse().map_err(|_| {
                    Error::Malformed(format!("line {}: bad delta order", lineno + 1))
                })?;
                let coefficient = parse_num(parts[2], lineno)?;
                deltas.push(DiracTerm::new(location, order, coefficient)?);
            }
            continue;
        }
        if !saw_header {
            if line != "t,value" {
                return Err(Error::Malformed(format!(
                    "line {}: expected header `t,value`, found `{line}`",
                    lineno + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let (t, v) = line.split_once(',').ok_or_else(|| {
            Error::Malformed(format!("line {}: expected `t,value` row", lineno + 1))
        })?;
        times.push(parse_num(t, lineno)?);
        values.push(parse_num(v, lineno)?);
    }
    if !saw_header {
        return Err(Error::Malformed("missing `t,value` header".into()));
    }
    if times.len() < 2 {
        return Err(Error::Malformed("need at least two samples".into()));
    }
    require_strictly_increasing(&times)?;
    let grid = Grid::new(times[0], *times.last().unwrap(), times.len())?;
    DistributionalSignal::new(grid, values, deltas)
}

/// Read a plain `t,value` table (no delta prologue expected, comments
/// ignored) for use as an input signal. The t column must be strictly
/// increasing; it is not required to be uniform.
pub fn read_samples<R: BufRead>(r: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut saw_header = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "t,value" {
                return Err(Error::Malformed(format!(
                    "line {}: expected header `t,value`, found `{line}`",
                    lineno + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let (t, v) = line.split_once(',').ok_or_else(|| {
            Error::Malformed(format!("line {}: expected `t,value` row", lineno + 1))
        })?;
        times.push(parse_num(t, lineno)?);
        values.push(parse_num(v, lineno)?);
    }
    if times.len() < 2 {
        return Err(Error::Malformed("need at least two samples".into()));
    }
    require_strictly_increasing(&times)?;
    Ok((times, values))
}

/// Resample an irregular `t,value` table onto a uniform grid by linear
/// interpolation.
pub fn resample_to_grid(times: &[f64], values: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::Malformed("times/values length mismatch".into()));
    }
    if grid.t_start() < times[0] - 1e-12 || grid.t_end() > times[times.len() - 1] + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "grid [{}, {}] is not covered by samples on [{}, {}]",
            grid.t_start(),
            grid.t_end(),
            times[0],
            times[times.len() - 1]
        )));
    }
    let mut out = Vec::with_capacity(grid.n_points());
    let mut j = 0usize;
    for t in grid.nodes() {
        while j + 2 < times.len() && times[j + 1] < t {
            j += 1;
        }
        let (t0, t1) = (times[j], times[j + 1]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        out.push(values[j] * (1.0 - w) + values[j + 1] * w);
    }
    Ok(out)
}

fn require_strictly_increasing(times: &[f64]) -> Result<()> {
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Malformed(format!(
                "t column must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn parse_num(s: &str, lineno: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Malformed(format!("line {}: bad number `{s}`", lineno + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roundtrip_with_deltas() {
        let grid = Grid::new(0.0, 1.0, 5).unwrap();
        let sig = DistributionalSignal::new(
            grid,
            vec![1.0, 0.5, -0.25, 1.0 / 3.0, 2.0],
            vec![
                DiracTerm::new(0.0, 0, 2.5).unwrap(),
                DiracTerm::new(0.0, 1, -2.5).unwrap(),
            ],
        )
        .unwrap();
        let text = signal_to_string(&sig);
        let back = read_signal(text.as_bytes()).unwrap();
        assert_eq!(back, sig);
        assert!(text.starts_with("# delta,0,0,2.5\n# delta,0,1,-2.5\nt,value\n"));
    }

    #[test]
    fn rejects_non_monotone_input() {
        let bad = "t,value\n0,1\n0.5,2\n0.25,3\n";
        assert!(matches!(read_samples(bad.as_bytes()), Err(Error::Malformed(_))));
        let flat = "t,value\n0,1\n0,2\n";
        assert!(read_samples(flat.as_bytes()).is_err());
    }

    #[test]
    fn rejects_missing_header_and_bad_rows() {
        assert!(read_signal("0,1\n1,2\n".as_bytes()).is_err());
        assert!(read_signal("t,value\n0;1\n".as_bytes()).is_err());
        assert!(read_signal("t,value\n0,abc\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn resampling_interpolates() {
        let times = vec![0.0, 0.4, 1.0];
        let values = vec![0.0, 0.4, 1.0]; // identity
        let grid = Grid::new(0.0, 1.0, 11).unwrap();
        let v = resample_to_grid(&times, &values, &grid).unwrap();
        for (t, got) in grid.nodes().zip(v) {
            assert!((got - t).abs() < 1e-12);
        }
        let small = Grid::new(0.0, 2.0, 3).unwrap();
        assert!(resample_to_grid(&times, &values, &small).is_err());
    }

    proptest! {
        // bit-exact CSV round trip for the regular part
        #[test]
        fn csv_roundtrip_bit_exact(values in prop::collection::vec(-1e12f64..1e12, 2..40)) {
            let grid = Grid::new(0.0, 1.0, values.len()).unwrap();
            let sig = DistributionalSignal::regular_only(grid, values).unwrap();
            let back = read_signal(signal_to_string(&sig).as_bytes()).unwrap();
            prop_assert_eq!(back.regular().len(), sig.regular().len());
            for (a, b) in back.regular().iter().zip(sig.regular()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
