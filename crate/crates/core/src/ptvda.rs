//! Partitioned parallel sort with complexity instrumentation.
//!
//! `parallel_sort` splits the input into `p` contiguous sublists, sorts each on
//! its own worker thread, and k-way merges the results on the calling thread.
//! Workers share nothing mutable, and the merge breaks ties by partition index,
//! so the output never depends on scheduling.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

/// Default bound M for the ratio classifier.
pub const DEFAULT_RATIO_BOUND: f64 = 1e6;

/// Log-log slope below which measured growth is taken as sub-quadratic.
pub const SUBQUADRATIC_SLOPE: f64 = 1.5;

/// Shortest run the probe will fit; anything faster is under clock resolution.
pub const MIN_TIMING: Duration = Duration::from_micros(1);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SortError {
    #[error("partition count must be in 1..=max(1, n) (p = {p}, n = {n})")]
    Partitions { p: usize, n: usize },
    #[error("ratio of two infinite sizes is ambiguous")]
    BothInfinite,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fit needs at least {need} sizes, got {got}")]
    Underdetermined { need: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortInstance<T> {
    elements: Vec<T>,
    partitions: usize,
}

impl<T> SortInstance<T> {
    pub fn new(elements: Vec<T>, partitions: usize) -> Result<Self, SortError> {
        let n = elements.len();
        if partitions == 0 || partitions > n.max(1) {
            return Err(SortError::Partitions { p: partitions, n });
        }
        Ok(Self { elements, partitions })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }
}

/// Sorts `s` with one worker per partition followed by a single k-way merge.
pub fn parallel_sort<T: Ord + Send>(s: SortInstance<T>) -> Vec<T> {
    let SortInstance { elements, partitions } = s;
    let n = elements.len();
    if partitions <= 1 || n < 2 {
        let mut v = elements;
        v.sort_unstable();
        return v;
    }

    let mut runs = split_even(elements, partitions);
    std::thread::scope(|scope| {
        for run in runs.iter_mut() {
            scope.spawn(move || run.sort_unstable());
        }
    });
    merge_runs(runs, n)
}

/// Splits into `p` contiguous runs whose lengths differ by at most one.
fn split_even<T>(elements: Vec<T>, p: usize) -> Vec<Vec<T>> {
    let n = elements.len();
    let (base, extra) = (n / p, n % p);
    let mut runs = Vec::with_capacity(p);
    let mut it = elements.into_iter();
    for i in 0..p {
        let len = base + usize::from(i < extra);
        runs.push(it.by_ref().take(len).collect());
    }
    runs
}

/// Lowest key first; equal keys come out in partition order.
fn merge_runs<T: Ord>(runs: Vec<Vec<T>>, n: usize) -> Vec<T> {
    let mut iters: Vec<_> = runs.into_iter().map(Vec::into_iter).collect();
    let mut heap = BinaryHeap::with_capacity(iters.len());
    for (idx, it) in iters.iter_mut().enumerate() {
        if let Some(x) = it.next() {
            heap.push(Reverse((x, idx)));
        }
    }
    let mut out = Vec::with_capacity(n);
    while let Some(Reverse((x, idx))) = heap.pop() {
        out.push(x);
        if let Some(next) = iters[idx].next() {
            heap.push(Reverse((next, idx)));
        }
    }
    out
}

/// A problem size that may be the "infinite" marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Size {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioClass {
    /// n/n′ = 1
    Unit,
    /// n/n′ → 0
    Vanishing,
    /// n/n′ → ∞
    Diverging,
}

/// Collapses n/n′ onto {0, 1, ∞}.
///
/// Finite pairs beyond `m_bound` (see [`beyond_bound`]) are the clear limit
/// cases; unequal pairs inside the bound have no better home than the side of
/// 1 they fall on, so they are classified the same way.
pub fn classify_ratio(n: Size, n_prime: Size, m_bound: f64) -> Result<RatioClass, SortError> {
    if !(m_bound > 0.0) {
        return Err(SortError::Domain(format!("bound M must be positive, got {m_bound}")));
    }
    let check = |v: f64| {
        if v >= 1.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(SortError::Domain(format!("sizes must be finite and >= 1, got {v}")))
        }
    };
    match (n, n_prime) {
        (Size::Infinite, Size::Infinite) => Err(SortError::BothInfinite),
        (Size::Infinite, Size::Finite(b)) => check(b).map(|_| RatioClass::Diverging),
        (Size::Finite(a), Size::Infinite) => check(a).map(|_| RatioClass::Vanishing),
        (Size::Finite(a), Size::Finite(b)) => {
            let (a, b) = (check(a)?, check(b)?);
            if a == b {
                Ok(RatioClass::Unit)
            } else if a > b {
                Ok(RatioClass::Diverging)
            } else {
                Ok(RatioClass::Vanishing)
            }
        }
    }
}

/// Whether a finite pair is far enough apart to count as a limit under `m_bound`.
pub fn beyond_bound(n: f64, n_prime: f64, m_bound: f64) -> bool {
    n / n_prime > m_bound || n_prime / n > m_bound
}

/// Timings of `parallel_sort` over a range of sizes and the fitted growth.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityProbe {
    pub sizes: Vec<usize>,
    /// Best-of-trials elapsed seconds, one per size.
    pub measured: Vec<f64>,
    /// `(a, b)` in elapsed ≈ a·n·ln n + b, absent if timings were unusable.
    pub fitted_model: Option<(f64, f64)>,
    /// Root-mean-square residual of the n log n fit, in seconds.
    pub fit_residual: Option<f64>,
    /// Slope of ln(elapsed) against ln(n).
    pub loglog_slope: Option<f64>,
    pub warnings: Vec<String>,
}

impl ComplexityProbe {
    pub fn is_subquadratic(&self) -> Option<bool> {
        self.loglog_slope.map(|s| s < SUBQUADRATIC_SLOPE)
    }
}

/// How the probe generates its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyPattern {
    Uniform,
    Sorted,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub partitions: usize,
    pub pattern: KeyPattern,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            partitions: 4,
            pattern: KeyPattern::Uniform,
            seed: 0x7d5a,
        }
    }
}

pub fn scaling_probe(sizes: &[usize], trials: usize) -> Result<ComplexityProbe, SortError> {
    scaling_probe_with(sizes, trials, ProbeConfig::default())
}

pub fn scaling_probe_with(sizes: &[usize], trials: usize, cfg: ProbeConfig) -> Result<ComplexityProbe, SortError> {
    if sizes.len() < 2 {
        return Err(SortError::Underdetermined {
            need: 2,
            got: sizes.len(),
        });
    }
    if trials < 3 {
        return Err(SortError::Domain(format!("need at least 3 trials, got {trials}")));
    }
    if sizes.iter().any(|&n| n < 2) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SortError::Domain(
            "sizes must be strictly increasing and each >= 2".into(),
        ));
    }
    if cfg.partitions == 0 {
        return Err(SortError::Partitions { p: 0, n: sizes[0] });
    }

    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut measured = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut best = Duration::MAX;
        for _ in 0..trials {
            let keys: Vec<u64> = match cfg.pattern {
                KeyPattern::Uniform => (0..n).map(|_| rng.gen()).collect(),
                KeyPattern::Sorted => (0..n as u64).collect(),
                KeyPattern::Constant => vec![42; n],
            };
            let inst = SortInstance::new(keys, cfg.partitions.min(n))?;
            let start = Instant::now();
            let out = parallel_sort(inst);
            let elapsed = start.elapsed();
            std::hint::black_box(&out);
            best = best.min(elapsed);
        }
        measured.push(best);
    }

    let mut probe = ComplexityProbe {
        sizes: sizes.to_vec(),
        measured: measured.iter().map(Duration::as_secs_f64).collect(),
        fitted_model: None,
        fit_residual: None,
        loglog_slope: None,
        warnings: Vec::new(),
    };
    if let Some((&n, _)) = sizes.iter().zip(&measured).find(|(_, &d)| d < MIN_TIMING) {
        probe.warnings.push(format!(
            "timing for n = {n} is below clock resolution ({MIN_TIMING:?}); fit skipped"
        ));
        return Ok(probe);
    }

    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64 * (n as f64).ln()).collect();
    let (a, b) = least_squares(&xs, &probe.measured);
    let rms = (xs
        .iter()
        .zip(&probe.measured)
        .map(|(x, y)| (a * x + b - y).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    let ln_n: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ln_t: Vec<f64> = probe.measured.iter().map(|t| t.ln()).collect();
    let (slope, _) = least_squares(&ln_n, &ln_t);

    probe.fitted_model = Some((a, b));
    probe.fit_residual = Some(rms);
    probe.loglog_slope = Some(slope);
    Ok(probe)
}

/// Ordinary least squares for y ≈ a·x + b.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let a = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (a, my - a * mx)
}
