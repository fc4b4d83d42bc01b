//! Pulse grid storage and the hexagonal sensor topology.
//!
//! Pulses live on a rectified `n_lines x n_steps` lattice indexed by
//! `(s, r)` = (scanline, rotation step). Each pulse has six lattice
//! neighbours, at `±Dtheta`, `±Ds` and `±Dd`. Echoes are stored contiguously in
//! row-major pulse order, so every echo also has a dense global index which
//! the rest of the crate uses as its vertex id.

use alloc::vec::Vec;
use core::ops::Range;

use crate::geom::Vec3;

/// Maximum number of echoes a single pulse may carry.
pub const MAX_ECHOES: usize = 8;

/// Accepted deviation of a beam direction norm from 1 before it is rejected.
pub const DIRECTION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("pulse ({s}, {r}) is outside a {n_lines}x{n_steps} grid")]
    OutOfRange { s: usize, r: usize, n_lines: usize, n_steps: usize },
    #[error("echo {0:?} does not resolve")]
    UnresolvedEcho(EchoRef),
    #[error("echo index {0} does not exist")]
    UnresolvedIndex(u32),
    #[error("pulse carries {0} echoes, at most 8 are allowed")]
    TooManyEchoes(usize),
    #[error("beam direction has norm {0}, expected 1")]
    NonUnitDirection(f64),
    #[error("echo range {0} must be positive")]
    NonPositiveRange(f64),
    #[error("non-finite value in pulse ({s}, {r})")]
    NonFinite { s: usize, r: usize },
    #[error("expected {expected} pulses, got {got}")]
    PulseCount { expected: usize, got: usize },
    #[error("grid holds more echoes than fit in a 32-bit index")]
    TooManyTotalEchoes,
}

/// Stable address of one echo: scanline, rotation step and echo rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EchoRef {
    pub s: usize,
    pub r: usize,
    pub e: usize,
}

impl EchoRef {
    pub const fn new(s: usize, r: usize, e: usize) -> Self {
        EchoRef { s, r, e }
    }
}

/// One of the three axes of the hexagonal pulse lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LatticeDirection {
    /// Next rotation step on the same scanline.
    Dtheta,
    /// Same rotation step on the next scanline.
    Ds,
    /// Next rotation step on the next scanline.
    Dd,
}

impl LatticeDirection {
    pub const ALL: [LatticeDirection; 3] = [LatticeDirection::Dtheta, LatticeDirection::Ds, LatticeDirection::Dd];

    /// `(ds, dr)` offset of the positive direction.
    pub const fn offset(self) -> (usize, usize) {
        match self {
            LatticeDirection::Dtheta => (0, 1),
            LatticeDirection::Ds => (1, 0),
            LatticeDirection::Dd => (1, 1),
        }
    }

    pub const fn index(self) -> usize {
        match self {
            LatticeDirection::Dtheta => 0,
            LatticeDirection::Ds => 1,
            LatticeDirection::Dd => 2,
        }
    }
}

/// Geometry of one emitted laser shot. Its echoes are stored by the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub origin: Vec3,
    /// Unit beam direction, sensor towards scene.
    pub direction: Vec3,
    pub theta: f64,
    pub time: f64,
}

/// One return of a pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Echo {
    pub range: f64,
    /// `origin + range * direction` of the owning pulse.
    pub position: Vec3,
    /// Ground-truth object id, when known.
    pub label: Option<u32>,
    pub intensity: Option<f64>,
}

/// Raw echo as produced by a scanner or a file, before the grid derives its
/// position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoSample {
    pub range: f64,
    pub label: Option<u32>,
    pub intensity: Option<f64>,
}

impl EchoSample {
    pub fn new(range: f64) -> Self {
        EchoSample { range, label: None, intensity: None }
    }

    pub fn labeled(range: f64, label: u32) -> Self {
        EchoSample { range, label: Some(label), intensity: None }
    }
}

/// Scanner description carried alongside the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScannerMeta {
    /// Pulses per scanline, generally not an integer.
    pub pulses_per_line: f64,
}

/// Dense `n_lines x n_steps` lattice of pulses.
///
/// Immutable once built; build one with [`PulseGridBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub struct PulseGrid {
    n_lines: usize,
    n_steps: usize,
    meta: ScannerMeta,
    pulses: Vec<Pulse>,
    /// `echo_offsets[p]..echo_offsets[p + 1]` are the echoes of pulse `p`.
    echo_offsets: Vec<u32>,
    echoes: Vec<Echo>,
    echo_pulse: Vec<u32>,
}

/// Candidate edge between echoes of two lattice-adjacent pulses.
///
/// `a` always sits on the lower pulse, so `ia < ib`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CandidateEdge {
    pub a: EchoRef,
    pub b: EchoRef,
    pub dir: LatticeDirection,
    pub ia: u32,
    pub ib: u32,
}

impl PulseGrid {
    pub fn n_lines(&self) -> usize {
        self.n_lines
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_pulses(&self) -> usize {
        self.pulses.len()
    }

    pub fn n_echoes(&self) -> usize {
        self.echoes.len()
    }

    pub fn meta(&self) -> ScannerMeta {
        self.meta
    }

    pub fn is_empty(&self) -> bool {
        self.echoes.is_empty()
    }

    /// Angular spacing of consecutive rotation steps, measured on the first
    /// scanline.
    pub fn angular_resolution(&self) -> Option<f64> {
        if self.n_steps < 2 {
            return None;
        }
        Some(self.pulses[1].theta - self.pulses[0].theta)
    }

    #[inline]
    pub fn contains(&self, s: usize, r: usize) -> bool {
        s < self.n_lines && r < self.n_steps
    }

    fn check(&self, s: usize, r: usize) -> Result<usize, GridError> {
        if self.contains(s, r) {
            Ok(s * self.n_steps + r)
        } else {
            Err(GridError::OutOfRange { s, r, n_lines: self.n_lines, n_steps: self.n_steps })
        }
    }

    /// Row-major index of pulse `(s, r)`. Panics when out of range.
    #[inline]
    pub fn pulse_index(&self, s: usize, r: usize) -> usize {
        debug_assert!(self.contains(s, r));
        s * self.n_steps + r
    }

    pub fn pulse(&self, s: usize, r: usize) -> Result<&Pulse, GridError> {
        self.check(s, r).map(|p| &self.pulses[p])
    }

    pub fn pulse_at(&self, p: usize) -> &Pulse {
        &self.pulses[p]
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    /// Echoes of pulse `(s, r)`, by increasing range.
    pub fn echoes(&self, s: usize, r: usize) -> Result<&[Echo], GridError> {
        self.check(s, r).map(|p| &self.echoes[self.echo_span(p)])
    }

    /// Global indices of the echoes of row-major pulse `p`.
    #[inline]
    pub fn echo_span(&self, p: usize) -> Range<usize> {
        self.echo_offsets[p] as usize..self.echo_offsets[p + 1] as usize
    }

    #[inline]
    pub fn echo_count(&self, s: usize, r: usize) -> usize {
        let p = self.pulse_index(s, r);
        (self.echo_offsets[p + 1] - self.echo_offsets[p]) as usize
    }

    pub fn all_echoes(&self) -> &[Echo] {
        &self.echoes
    }

    #[inline]
    pub fn echo(&self, index: u32) -> &Echo {
        &self.echoes[index as usize]
    }

    #[inline]
    pub fn position(&self, index: u32) -> Vec3 {
        self.echoes[index as usize].position
    }

    /// Row-major pulse index owning global echo `index`.
    #[inline]
    pub fn pulse_of(&self, index: u32) -> usize {
        self.echo_pulse[index as usize] as usize
    }

    pub fn echo_ref(&self, index: u32) -> Result<EchoRef, GridError> {
        if index as usize >= self.echoes.len() {
            return Err(GridError::UnresolvedIndex(index));
        }
        let p = self.pulse_of(index);
        Ok(EchoRef { s: p / self.n_steps, r: p % self.n_steps, e: (index - self.echo_offsets[p]) as usize })
    }

    pub fn global_index(&self, er: EchoRef) -> Result<u32, GridError> {
        let p = self.check(er.s, er.r).map_err(|_| GridError::UnresolvedEcho(er))?;
        let span = self.echo_span(p);
        if er.e < span.len() {
            Ok((span.start + er.e) as u32)
        } else {
            Err(GridError::UnresolvedEcho(er))
        }
    }

    pub fn resolve(&self, er: EchoRef) -> Result<&Echo, GridError> {
        self.global_index(er).map(|i| &self.echoes[i as usize])
    }

    /// Pulse reached from `(s, r)` by one positive step along `dir`.
    #[inline]
    pub fn step_forward(&self, s: usize, r: usize, dir: LatticeDirection) -> Option<(usize, usize)> {
        let (ds, dr) = dir.offset();
        let (s2, r2) = (s + ds, r + dr);
        self.contains(s2, r2).then_some((s2, r2))
    }

    /// Pulse reached from `(s, r)` by one negative step along `dir`.
    #[inline]
    pub fn step_backward(&self, s: usize, r: usize, dir: LatticeDirection) -> Option<(usize, usize)> {
        let (ds, dr) = dir.offset();
        if s < ds || r < dr {
            return None;
        }
        let (s2, r2) = (s - ds, r - dr);
        self.contains(s2, r2).then_some((s2, r2))
    }

    /// In-grid lattice neighbours of `(s, r)`, ordered
    /// `Dtheta+, Dtheta-, Ds+, Ds-, Dd+, Dd-`.
    pub fn pulse_neighbors(&self, s: usize, r: usize) -> Result<Vec<(usize, usize)>, GridError> {
        self.check(s, r)?;
        let mut out = Vec::with_capacity(6);
        for dir in LatticeDirection::ALL {
            out.extend(self.step_forward(s, r, dir));
            out.extend(self.step_backward(s, r, dir));
        }
        Ok(out)
    }

    /// Every echo of every neighbouring pulse, in neighbour order then echo
    /// rank.
    pub fn echo_neighbors(&self, er: EchoRef) -> Result<Vec<EchoRef>, GridError> {
        self.global_index(er)?;
        let mut out = Vec::new();
        for (s, r) in self.pulse_neighbors(er.s, er.r)? {
            out.extend((0..self.echo_count(s, r)).map(|e| EchoRef::new(s, r, e)));
        }
        Ok(out)
    }

    /// All candidate edges, each undirected pair once.
    ///
    /// Emission order is pulse (row-major), then lower echo rank, then
    /// direction, then upper echo rank. Because echoes are indexed row-major,
    /// this order is also sorted by `(ia, ib)`.
    pub fn candidate_edges(&self) -> impl Iterator<Item = CandidateEdge> + '_ {
        self.candidate_edges_in_lines(0..self.n_lines)
    }

    /// Candidate edges whose lower echo lies on a scanline in `lines`.
    /// Concatenating consecutive ranges yields [`Self::candidate_edges`].
    pub fn candidate_edges_in_lines(&self, lines: Range<usize>) -> impl Iterator<Item = CandidateEdge> + '_ {
        let lines = lines.start.min(self.n_lines)..lines.end.min(self.n_lines);
        lines.flat_map(move |s| {
            (0..self.n_steps).flat_map(move |r| {
                let span_a = self.echo_span(self.pulse_index(s, r));
                let base_a = span_a.start;
                span_a.flat_map(move |ia| {
                    LatticeDirection::ALL.into_iter().flat_map(move |dir| {
                        let target = self.step_forward(s, r, dir);
                        let span_b = match target {
                            Some((s2, r2)) => self.echo_span(self.pulse_index(s2, r2)),
                            None => 0..0,
                        };
                        let base_b = span_b.start;
                        span_b.map(move |ib| {
                            let (s2, r2) = target.unwrap();
                            CandidateEdge {
                                a: EchoRef::new(s, r, ia - base_a),
                                b: EchoRef::new(s2, r2, ib - base_b),
                                dir,
                                ia: ia as u32,
                                ib: ib as u32,
                            }
                        })
                    })
                })
            })
        })
    }
}

/// Row-major builder for [`PulseGrid`].
#[derive(Debug, Clone)]
pub struct PulseGridBuilder {
    n_lines: usize,
    n_steps: usize,
    meta: ScannerMeta,
    pulses: Vec<Pulse>,
    echo_offsets: Vec<u32>,
    echoes: Vec<Echo>,
    echo_pulse: Vec<u32>,
}

impl PulseGridBuilder {
    pub fn new(n_lines: usize, n_steps: usize, meta: ScannerMeta) -> Self {
        let n = n_lines * n_steps;
        let mut echo_offsets = Vec::with_capacity(n + 1);
        echo_offsets.push(0);
        PulseGridBuilder {
            n_lines,
            n_steps,
            meta,
            pulses: Vec::with_capacity(n),
            echo_offsets,
            echoes: Vec::new(),
            echo_pulse: Vec::new(),
        }
    }

    /// Number of pulses pushed so far.
    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// `(s, r)` of the next pulse to be pushed.
    pub fn next_cell(&self) -> (usize, usize) {
        let p = self.pulses.len();
        p.checked_div(self.n_steps).map_or((0, 0), |s| (s, p % self.n_steps))
    }

    /// Appends the next pulse in row-major order.
    ///
    /// The direction must be within [`DIRECTION_TOLERANCE`] of unit length; it
    /// is stored unchanged so that serialised grids re-read bit for bit.
    /// Echoes are stably sorted by range and their positions are derived from
    /// the pulse geometry.
    pub fn push(&mut self, pulse: Pulse, samples: &[EchoSample]) -> Result<(), GridError> {
        let (s, r) = self.next_cell();
        let expected = self.n_lines * self.n_steps;
        if self.pulses.len() >= expected {
            return Err(GridError::PulseCount { expected, got: expected + 1 });
        }
        if samples.len() > MAX_ECHOES {
            return Err(GridError::TooManyEchoes(samples.len()));
        }
        let finite = |v: Vec3| v.x.is_finite() && v.y.is_finite() && v.z.is_finite();
        if !finite(pulse.origin) || !finite(pulse.direction) || !pulse.theta.is_finite() || !pulse.time.is_finite() {
            return Err(GridError::NonFinite { s, r });
        }
        let norm = pulse.direction.norm();
        if (norm - 1.0).abs() > DIRECTION_TOLERANCE {
            return Err(GridError::NonUnitDirection(norm));
        }
        let mut sorted: [Option<EchoSample>; MAX_ECHOES] = [None; MAX_ECHOES];
        for (slot, sample) in sorted.iter_mut().zip(samples) {
            if !sample.range.is_finite() || sample.intensity.is_some_and(|i| !i.is_finite()) {
                return Err(GridError::NonFinite { s, r });
            }
            if sample.range <= 0.0 {
                return Err(GridError::NonPositiveRange(sample.range));
            }
            *slot = Some(*sample);
        }
        let sorted = &mut sorted[..samples.len()];
        // insertion sort: stable and allocation free for <= 8 items
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1].unwrap().range > sorted[j].unwrap().range {
                sorted.swap(j - 1, j);
                j -= 1;
            }
        }
        let p = self.pulses.len() as u32;
        for sample in sorted.iter().flatten() {
            self.echoes.push(Echo {
                range: sample.range,
                position: pulse.origin + pulse.direction * sample.range,
                label: sample.label,
                intensity: sample.intensity,
            });
            self.echo_pulse.push(p);
        }
        if self.echoes.len() > u32::MAX as usize {
            return Err(GridError::TooManyTotalEchoes);
        }
        self.echo_offsets.push(self.echoes.len() as u32);
        self.pulses.push(pulse);
        Ok(())
    }

    pub fn build(self) -> Result<PulseGrid, GridError> {
        let expected = self.n_lines * self.n_steps;
        if self.pulses.len() != expected {
            return Err(GridError::PulseCount { expected, got: self.pulses.len() });
        }
        Ok(PulseGrid {
            n_lines: self.n_lines,
            n_steps: self.n_steps,
            meta: self.meta,
            pulses: self.pulses,
            echo_offsets: self.echo_offsets,
            echoes: self.echoes,
            echo_pulse: self.echo_pulse,
        })
    }

    /// Concatenates builders that each hold a contiguous block of whole
    /// scanlines, in order.
    pub fn concat(
        n_lines: usize,
        n_steps: usize,
        meta: ScannerMeta,
        parts: Vec<PulseGridBuilder>,
    ) -> Result<PulseGrid, GridError> {
        let mut out = PulseGridBuilder::new(n_lines, n_steps, meta);
        for part in parts {
            let base_echo = out.echoes.len() as u32;
            let base_pulse = out.pulses.len() as u32;
            out.pulses.extend_from_slice(&part.pulses);
            out.echoes.extend_from_slice(&part.echoes);
            out.echo_offsets.extend(part.echo_offsets[1..].iter().map(|o| o + base_echo));
            out.echo_pulse.extend(part.echo_pulse.iter().map(|p| p + base_pulse));
        }
        out.build()
    }
}
