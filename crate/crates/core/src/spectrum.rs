//! Chain description, quench protocol and normal-mode eigenvalues.
//!
//! A periodic chain of `N` unit-mass oscillators with on-site frequency
//! `omega` and nearest-neighbour coupling `k` decouples into `N` normal modes
//! with eigenvalues
//!
//! ```text
//! lambda_j = omega^2 + 2 k (1 - cos(2 pi j / N)),   j = 1..N
//! ```
//!
//! Mode `j = N` is the zero mode (`lambda_N = omega^2`). Mode indices are
//! 1-based throughout the crate; segment indices are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Eigenvalues at or below this value are treated as exactly zero and routed
/// to the degenerate (free-particle) branch of the auxiliary solver.
pub const LAMBDA_EPSILON: f64 = 1e-12;

#[inline]
pub(crate) fn is_degenerate<T: Real>(lambda: T) -> bool {
    lambda <= lit(LAMBDA_EPSILON)
}

/// The pre-quench (`t < 0`) chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec<T> {
    n_oscillators: usize,
    omega0: T,
    coupling0: T,
}

impl<T: Real> ChainSpec<T> {
    /// Validates that a normalizable pre-quench ground state exists for every
    /// mode, which requires `omega0^2 > LAMBDA_EPSILON` (the zero mode has
    /// `lambda_N(0) = omega0^2`).
    pub fn new(n_oscillators: usize, omega0: T, coupling0: T) -> Result<Self> {
        if n_oscillators == 0 {
            return Err(Error::InvalidChain("the chain needs at least one oscillator".into()));
        }
        if !(omega0.is_finite() && coupling0.is_finite()) {
            return Err(Error::InvalidChain("frequency and coupling must be finite".into()));
        }
        if omega0 < T::zero() || coupling0 < T::zero() {
            return Err(Error::InvalidChain("frequency and coupling must be non-negative".into()));
        }
        if is_degenerate(omega0 * omega0) {
            return Err(Error::InvalidChain(format!(
                "pre-quench frequency {omega0} leaves the zero mode without a ground state"
            )));
        }
        Ok(Self {
            n_oscillators,
            omega0,
            coupling0,
        })
    }

    pub fn n_oscillators(&self) -> usize {
        self.n_oscillators
    }

    pub fn omega0(&self) -> T {
        self.omega0
    }

    pub fn coupling0(&self) -> T {
        self.coupling0
    }

    /// `lambda_j(0)` for all modes.
    pub fn initial_spectrum(&self) -> ModeSpectrum<T> {
        spectrum_unchecked(self.omega0, self.coupling0, self.n_oscillators)
    }
}

/// One constant-parameter stretch of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSegment<T> {
    pub omega: T,
    pub coupling: T,
    /// `None` marks an open-ended (final) segment.
    pub duration: Option<T>,
}

impl<T: Real> QuenchSegment<T> {
    pub fn new(omega: T, coupling: T, duration: T) -> Self {
        Self {
            omega,
            coupling,
            duration: Some(duration),
        }
    }

    pub fn open(omega: T, coupling: T) -> Self {
        Self {
            omega,
            coupling,
            duration: None,
        }
    }

    pub fn is_open(&self) -> bool {
        self.duration.is_none()
    }
}

/// Whether the zero mode is massless in this segment (critical quench).
pub fn is_critical<T: Real>(segment: &QuenchSegment<T>) -> bool {
    is_degenerate(segment.omega * segment.omega)
}

/// An ordered piecewise-constant protocol starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchSchedule<T> {
    spec: ChainSpec<T>,
    segments: Vec<QuenchSegment<T>>,
    /// `boundaries[i]` is the start of segment `i`; a final entry holds the
    /// end of the last segment when it is finite.
    boundaries: Vec<T>,
}

/// Result of locating a global time inside a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentLocation<T> {
    /// 0-based segment index.
    pub index: usize,
    pub segment: QuenchSegment<T>,
    /// Local time since the start of the segment.
    pub tau: T,
}

impl<T: Real> QuenchSchedule<T> {
    pub fn new(spec: ChainSpec<T>, segments: Vec<QuenchSegment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("at least one segment is required".into()));
        }
        let last = segments.len() - 1;
        let mut boundaries = Vec::with_capacity(segments.len() + 1);
        boundaries.push(T::zero());
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.omega.is_finite() && seg.coupling.is_finite())
                || seg.omega < T::zero()
                || seg.coupling < T::zero()
            {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i}: frequency and coupling must be finite and non-negative"
                )));
            }
            match seg.duration {
                Some(d) => {
                    if !(d.is_finite() && d > T::zero()) {
                        return Err(Error::InvalidSchedule(format!(
                            "segment {i}: duration must be positive, got {d}"
                        )));
                    }
                    let start = boundaries[i];
                    let end = start + d;
                    if end <= start {
                        return Err(Error::InvalidSchedule(format!(
                            "segment {i}: duration {d} is lost to rounding at t = {start}"
                        )));
                    }
                    boundaries.push(end);
                }
                None if i != last => {
                    return Err(Error::InvalidSchedule(format!(
                        "segment {i}: only the final segment may be open-ended"
                    )));
                }
                None => {}
            }
        }
        Ok(Self {
            spec,
            segments,
            boundaries,
        })
    }

    /// Single sudden quench at `t = 0` to `(omega, coupling)`, open-ended.
    pub fn single_quench(spec: ChainSpec<T>, omega: T, coupling: T) -> Result<Self> {
        Self::new(spec, vec![QuenchSegment::open(omega, coupling)])
    }

    /// Quenches at `t = 0, T, 2T, ...` through `params`; the last segment is
    /// open-ended when `open_last` is set.
    pub fn periodic(spec: ChainSpec<T>, params: &[(T, T)], period: T, open_last: bool) -> Result<Self> {
        let n = params.len();
        let segments = params
            .iter()
            .enumerate()
            .map(|(i, &(w, k))| {
                if open_last && i + 1 == n {
                    QuenchSegment::open(w, k)
                } else {
                    QuenchSegment::new(w, k, period)
                }
            })
            .collect();
        Self::new(spec, segments)
    }

    pub fn spec(&self) -> &ChainSpec<T> {
        &self.spec
    }

    pub fn segments(&self) -> &[QuenchSegment<T>] {
        &self.segments
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn n_modes(&self) -> usize {
        self.spec.n_oscillators
    }

    pub fn is_single_quench(&self) -> bool {
        self.segments.len() == 1
    }

    /// Start times of every segment followed by the finite end, if any.
    pub fn boundary_times(&self) -> &[T] {
        &self.boundaries
    }

    pub fn segment_start(&self, index: usize) -> T {
        self.boundaries[index]
    }

    /// End of segment `index`, `None` when open-ended.
    pub fn segment_end(&self, index: usize) -> Option<T> {
        self.boundaries.get(index + 1).copied()
    }

    /// End of the covered range, `None` when the final segment is open.
    pub fn end_time(&self) -> Option<T> {
        self.segment_end(self.segments.len() - 1)
    }

    /// Eigenvalues of segment `index`.
    pub fn segment_spectrum(&self, index: usize) -> ModeSpectrum<T> {
        let seg = &self.segments[index];
        spectrum_unchecked(seg.omega, seg.coupling, self.spec.n_oscillators)
    }

    /// Locates `t` in the half-open segment intervals; boundary instants
    /// belong to the later segment.
    pub fn segment_at(&self, t: T) -> Result<SegmentLocation<T>> {
        let end = self.end_time();
        let out_of_range = || Error::OutOfRange {
            t: to_f64(t),
            end: end.map(to_f64).unwrap_or(f64::INFINITY),
        };
        if !(t >= T::zero()) {
            return Err(out_of_range());
        }
        if let Some(e) = end {
            if t >= e {
                return Err(out_of_range());
            }
        }
        // Last start <= t.
        let starts = &self.boundaries[..self.segments.len()];
        let index = starts.partition_point(|&s| s <= t) - 1;
        Ok(SegmentLocation {
            index,
            segment: self.segments[index],
            tau: t - self.boundaries[index],
        })
    }
}

/// Normal-mode eigenvalues `lambda_1..lambda_N` of one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum<T> {
    lambdas: Vec<T>,
}

impl<T: Real> ModeSpectrum<T> {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Eigenvalue of mode `j` (1-based).
    pub fn lambda(&self, j: usize) -> T {
        self.lambdas[j - 1]
    }

    pub fn zero_mode(&self) -> T {
        self.lambdas[self.lambdas.len() - 1]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.lambdas
    }

    pub fn max(&self) -> T {
        self.lambdas.iter().copied().fold(T::zero(), T::max)
    }
}

/// Mode `j` of an `n`-site ring has the same eigenvalue as mode `n - j`; this
/// returns the representative `min(j mod n, n - j mod n)` (0 for the zero mode).
#[inline]
pub fn symmetric_index(j: usize, n: usize) -> usize {
    let r = j % n;
    r.min(n - r) % n
}

/// Eigenvalue of mode `j` (1-based) of an `n`-site ring, computed through the
/// symmetric index so that `lambda_j == lambda_{n-j}` holds bit for bit.
pub fn mode_lambda<T: Real>(omega: T, coupling: T, j: usize, n: usize) -> T {
    let w2 = omega * omega;
    let m = symmetric_index(j, n);
    if m == 0 {
        return w2;
    }
    let two = lit::<T>(2.0);
    let angle = two * T::PI() * T::from_usize(m).unwrap() / T::from_usize(n).unwrap();
    w2 + two * coupling * (T::one() - angle.cos())
}

fn spectrum_unchecked<T: Real>(omega: T, coupling: T, n: usize) -> ModeSpectrum<T> {
    ModeSpectrum {
        lambdas: (1..=n).map(|j| mode_lambda(omega, coupling, j, n)).collect(),
    }
}

/// `lambda_j = omega^2 + 2k(1 - cos(2 pi j / n))` for `j = 1..n`.
pub fn mode_eigenvalues<T: Real>(omega: T, coupling: T, n: usize) -> Result<ModeSpectrum<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("mode count must be at least 1".into()));
    }
    if omega < T::zero() || coupling < T::zero() {
        return Err(Error::InvalidArgument("frequency and coupling must be non-negative".into()));
    }
    Ok(spectrum_unchecked(omega, coupling, n))
}
