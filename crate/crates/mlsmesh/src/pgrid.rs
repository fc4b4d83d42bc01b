//! PGRID: line-oriented text format for pulse grids.
//!
//! ```text
//! PGRID 1 <n_lines> <n_steps> <N_p> <flags>
//! <s> <r> <theta> <time> <ox> <oy> <oz> <dx> <dy> <dz> <k> [<range> [<label>] [<intensity>]]*k
//! ...
//! ```
//!
//! One pulse line follows the header per lattice cell, in row-major
//! (scanline, then step) order. `flags` is a bit set: `1` means every echo
//! group carries an integer label, `2` a real intensity. Echo positions are
//! derived from the beam on reading and never stored.
//!
//! Reals are written in the shortest form that parses back to the same
//! `f64`, so `read(write(grid))` reproduces the grid bit for bit.

use std::io::{self, BufRead, Write};

use mlsmesh_core::grid::{EchoSample, GridError, PulseGridBuilder, ScannerMeta, MAX_ECHOES};
use mlsmesh_core::{Pulse, PulseGrid, Vec3};

pub const MAGIC: &str = "PGRID";
pub const VERSION: u32 = 1;
pub const FLAG_LABEL: u32 = 1;
pub const FLAG_INTENSITY: u32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ReadError {
    /// 1-based line of a parse error.
    pub fn line(&self) -> Option<usize> {
        match self {
            ReadError::Parse { line, .. } => Some(*line),
            ReadError::Io(_) => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected `{MAGIC}` header")]
    Magic,
    #[error("unsupported format version {0}")]
    Version(String),
    #[error("unknown flag bits in {0}")]
    Flags(u32),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("invalid {field} `{value}`")]
    Invalid { field: &'static str, value: String },
    #[error("expected cell ({expected_s}, {expected_r}), found ({s}, {r})")]
    Cell { expected_s: usize, expected_r: usize, s: usize, r: usize },
    #[error("echo count {0} exceeds {MAX_ECHOES}")]
    EchoCount(usize),
    #[error("unexpected trailing field `{0}`")]
    TrailingField(String),
    #[error("unexpected data after the last pulse")]
    TrailingLine,
    #[error("file ends after {got} of {expected} pulses")]
    Truncated { expected: usize, got: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error("only some echoes carry a {0}; PGRID needs all or none")]
    PartialAttribute(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parsed first line of a PGRID stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanHeader {
    pub version: u32,
    pub n_lines: usize,
    pub n_steps: usize,
    pub pulses_per_line: f64,
    pub flags: u32,
}

impl ScanHeader {
    pub fn has_labels(&self) -> bool {
        self.flags & FLAG_LABEL != 0
    }

    pub fn has_intensity(&self) -> bool {
        self.flags & FLAG_INTENSITY != 0
    }
}

struct Fields<'a> {
    it: std::str::SplitAsciiWhitespace<'a>,
}

impl<'a> Fields<'a> {
    fn new(line: &'a str) -> Self {
        Fields { it: line.split_ascii_whitespace() }
    }

    fn next<T: std::str::FromStr>(&mut self, field: &'static str) -> Result<T, ParseErrorKind> {
        let tok = self.it.next().ok_or(ParseErrorKind::Missing(field))?;
        tok.parse().map_err(|_| ParseErrorKind::Invalid { field, value: tok.to_owned() })
    }

    fn real(&mut self, field: &'static str) -> Result<f64, ParseErrorKind> {
        let v: f64 = self.next(field)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ParseErrorKind::Invalid { field, value: v.to_string() })
        }
    }

    fn vec3(&mut self, names: [&'static str; 3]) -> Result<Vec3, ParseErrorKind> {
        Ok(Vec3::new(self.real(names[0])?, self.real(names[1])?, self.real(names[2])?))
    }

    fn finish(mut self) -> Result<(), ParseErrorKind> {
        match self.it.next() {
            Some(tok) => Err(ParseErrorKind::TrailingField(tok.to_owned())),
            None => Ok(()),
        }
    }
}

fn parse_header(line: &str) -> Result<ScanHeader, ParseErrorKind> {
    let mut f = Fields::new(line);
    if f.it.next() != Some(MAGIC) {
        return Err(ParseErrorKind::Magic);
    }
    let version: String = f.next("version")?;
    if version.parse::<u32>().ok() != Some(VERSION) {
        return Err(ParseErrorKind::Version(version));
    }
    let header = ScanHeader {
        version: VERSION,
        n_lines: f.next("n_lines")?,
        n_steps: f.next("n_steps")?,
        pulses_per_line: f.real("N_p")?,
        flags: f.next("flags")?,
    };
    if header.flags & !(FLAG_LABEL | FLAG_INTENSITY) != 0 {
        return Err(ParseErrorKind::Flags(header.flags));
    }
    f.finish()?;
    Ok(header)
}

fn parse_pulse(
    line: &str,
    header: &ScanHeader,
    expected: (usize, usize),
    samples: &mut Vec<EchoSample>,
) -> Result<Pulse, ParseErrorKind> {
    let mut f = Fields::new(line);
    let s: usize = f.next("s")?;
    let r: usize = f.next("r")?;
    if (s, r) != expected {
        return Err(ParseErrorKind::Cell { expected_s: expected.0, expected_r: expected.1, s, r });
    }
    let pulse = Pulse {
        theta: f.real("theta")?,
        time: f.real("time")?,
        origin: f.vec3(["ox", "oy", "oz"])?,
        direction: f.vec3(["dx", "dy", "dz"])?,
    };
    let k: usize = f.next("k")?;
    if k > MAX_ECHOES {
        return Err(ParseErrorKind::EchoCount(k));
    }
    samples.clear();
    for _ in 0..k {
        let range = f.real("range")?;
        let label = if header.has_labels() { Some(f.next("label")?) } else { None };
        let intensity = if header.has_intensity() { Some(f.real("intensity")?) } else { None };
        samples.push(EchoSample { range, label, intensity });
    }
    f.finish()?;
    Ok(pulse)
}

/// Reads a PGRID stream. Every malformed line is reported with its 1-based
/// line number.
pub fn read_pgrid<R: BufRead>(source: R) -> Result<PulseGrid, ReadError> {
    let mut lines = source.lines();
    let err = |line, kind| ReadError::Parse { line, kind };

    let first = lines.next().transpose()?.ok_or_else(|| err(1, ParseErrorKind::Magic))?;
    let header = parse_header(&first).map_err(|k| err(1, k))?;
    let n_pulses = header.n_lines * header.n_steps;

    let meta = ScannerMeta { pulses_per_line: header.pulses_per_line };
    let mut builder = PulseGridBuilder::new(header.n_lines, header.n_steps, meta);
    let mut samples = Vec::with_capacity(MAX_ECHOES);
    let mut line_no = 1;
    for i in 0..n_pulses {
        line_no += 1;
        let line = lines
            .next()
            .transpose()?
            .ok_or_else(|| err(line_no, ParseErrorKind::Truncated { expected: n_pulses, got: i }))?;
        let cell = (i / header.n_steps, i % header.n_steps);
        let pulse = parse_pulse(&line, &header, cell, &mut samples).map_err(|k| err(line_no, k))?;
        builder.push(pulse, &samples).map_err(|e| err(line_no, e.into()))?;
    }
    for line in lines {
        line_no += 1;
        if !line?.trim().is_empty() {
            return Err(err(line_no, ParseErrorKind::TrailingLine));
        }
    }
    builder.build().map_err(|e| err(line_no, e.into()))
}

/// Which optional attributes `grid` carries on every echo.
fn attribute_flags(grid: &PulseGrid) -> Result<u32, WriteError> {
    let echoes = grid.all_echoes();
    let mut flags = 0;
    let labelled = echoes.iter().filter(|e| e.label.is_some()).count();
    if labelled == echoes.len() && labelled > 0 {
        flags |= FLAG_LABEL;
    } else if labelled > 0 {
        return Err(WriteError::PartialAttribute("label"));
    }
    let with_intensity = echoes.iter().filter(|e| e.intensity.is_some()).count();
    if with_intensity == echoes.len() && with_intensity > 0 {
        flags |= FLAG_INTENSITY;
    } else if with_intensity > 0 {
        return Err(WriteError::PartialAttribute("intensity"));
    }
    Ok(flags)
}

/// Writes `grid` as PGRID. The output depends only on the grid.
pub fn write_pgrid<W: Write>(grid: &PulseGrid, sink: W) -> Result<(), WriteError> {
    let flags = attribute_flags(grid)?;
    let mut w = io::BufWriter::new(sink);
    writeln!(w, "{MAGIC} {VERSION} {} {} {} {flags}", grid.n_lines(), grid.n_steps(), grid.meta().pulses_per_line)?;
    for s in 0..grid.n_lines() {
        for r in 0..grid.n_steps() {
            let p = grid.pulse_at(grid.pulse_index(s, r));
            let (o, d) = (p.origin, p.direction);
            let echoes = grid.echoes(s, r).expect("cell inside the grid");
            write!(
                w,
                "{s} {r} {} {} {} {} {} {} {} {} {}",
                p.theta,
                p.time,
                o.x,
                o.y,
                o.z,
                d.x,
                d.y,
                d.z,
                echoes.len()
            )?;
            for e in echoes {
                write!(w, " {}", e.range)?;
                if flags & FLAG_LABEL != 0 {
                    write!(w, " {}", e.label.unwrap_or_default())?;
                }
                if flags & FLAG_INTENSITY != 0 {
                    write!(w, " {}", e.intensity.unwrap_or_default())?;
                }
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<PulseGrid, ReadError> {
        read_pgrid(text.as_bytes())
    }

    #[test]
    fn minimal_file() {
        let g = read("PGRID 1 1 1 1 0\n0 0 0 0 0 0 0 0 0 1 1 2.5\n").unwrap();
        assert_eq!(g.n_echoes(), 1);
        assert_eq!(g.position(0), Vec3::new(0.0, 0.0, 2.5));
    }

    #[test]
    fn nine_echoes_rejected_with_line() {
        let groups = " 1".repeat(9);
        let text = format!("PGRID 1 1 1 1 0\n0 0 0 0 0 0 0 0 0 1 9{groups}\n");
        let e = read(&text).unwrap_err();
        assert_eq!(e.line(), Some(2));
        assert!(matches!(e, ReadError::Parse { kind: ParseErrorKind::EchoCount(9), .. }));
    }

    #[test]
    fn non_unit_direction_rejected() {
        let e = read("PGRID 1 1 1 1 0\n0 0 0 0 0 0 0 0 0 1.01 0\n").unwrap_err();
        assert!(matches!(e, ReadError::Parse { line: 2, kind: ParseErrorKind::Grid(GridError::NonUnitDirection(_)) }));
    }

    #[test]
    fn non_positive_range_rejected() {
        let e = read("PGRID 1 1 2 2 0\n0 0 0 0 0 0 0 0 0 1 0\n0 1 0 0 0 0 0 0 0 1 1 0\n").unwrap_err();
        assert!(matches!(e, ReadError::Parse { line: 3, kind: ParseErrorKind::Grid(GridError::NonPositiveRange(_)) }));
    }

    #[test]
    fn trailing_garbage_rejected() {
        let e = read("PGRID 1 1 1 1 0\n0 0 0 0 0 0 0 0 0 1 0\nextra\n").unwrap_err();
        assert!(matches!(e, ReadError::Parse { line: 3, kind: ParseErrorKind::TrailingLine }));
        let e = read("PGRID 1 1 1 1 0\n0 0 0 0 0 0 0 0 0 1 0 7\n").unwrap_err();
        assert!(matches!(e, ReadError::Parse { line: 2, kind: ParseErrorKind::TrailingField(_) }));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(read("PGRIX 1 1 1 1 0\n"), Err(ReadError::Parse { line: 1, kind: ParseErrorKind::Magic })));
        assert!(matches!(
            read("PGRID 2 1 1 1 0\n"),
            Err(ReadError::Parse { line: 1, kind: ParseErrorKind::Version(_) })
        ));
        assert!(matches!(read("PGRID 1 1 1 1 4\n"), Err(ReadError::Parse { line: 1, kind: ParseErrorKind::Flags(4) })));
        assert!(matches!(read(""), Err(ReadError::Parse { line: 1, .. })));
        assert!(matches!(
            read("PGRID 1 1 2 2 0\n0 0 0 0 0 0 0 0 0 1 0\n"),
            Err(ReadError::Parse { line: 3, kind: ParseErrorKind::Truncated { expected: 2, got: 1 } })
        ));
    }

    #[test]
    fn out_of_order_cell_rejected() {
        let e = read("PGRID 1 1 2 2 0\n0 1 0 0 0 0 0 0 0 1 0\n0 0 0 0 0 0 0 0 0 1 0\n").unwrap_err();
        assert!(matches!(e, ReadError::Parse { line: 2, kind: ParseErrorKind::Cell { .. } }));
    }

    #[test]
    fn empty_grid_is_header_only() {
        let g = PulseGridBuilder::new(0, 0, ScannerMeta { pulses_per_line: 1.0 }).build().unwrap();
        let mut out = Vec::new();
        write_pgrid(&g, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "PGRID 1 0 0 1 0\n");
    }

    #[test]
    fn labels_set_flag_and_column() {
        let text = "PGRID 1 1 1 1.5 1\n0 0 0.25 0 0 0 0 0 0 1 2 3 7 1.5 9\n";
        let g = read(text).unwrap();
        assert_eq!(g.echo(0).label, Some(9));
        let mut out = Vec::new();
        write_pgrid(&g, &mut out).unwrap();
        // Echoes come back sorted by range.
        assert_eq!(String::from_utf8(out).unwrap(), "PGRID 1 1 1 1.5 1\n0 0 0.25 0 0 0 0 0 0 1 2 1.5 9 3 7\n");
    }

    #[test]
    fn partial_labels_cannot_be_written() {
        let mut b = PulseGridBuilder::new(1, 1, ScannerMeta { pulses_per_line: 1.0 });
        let pulse = Pulse { origin: Vec3::ZERO, direction: Vec3::Z, theta: 0.0, time: 0.0 };
        b.push(pulse, &[EchoSample::labeled(1.0, 1), EchoSample::new(2.0)]).unwrap();
        let g = b.build().unwrap();
        assert!(matches!(write_pgrid(&g, Vec::new()), Err(WriteError::PartialAttribute("label"))));
    }
}
