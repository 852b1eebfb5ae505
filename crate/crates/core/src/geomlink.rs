//! Comlink plane geometry: segments, shared arcs, midpoint-rule integrals,
//! the time-split logarithm and planar kinematics.

use thiserror::Error;

/// Relative tolerance on t∥ against t for the time-split fold verdict.
pub const FOLD_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("slope undefined for vertical segment at x = {0}")]
    UndefinedSlope(f64),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("logarithm base error: {0}")]
    LogBase(String),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

pub fn slope(p1: Point2, p2: Point2) -> Result<f64, GeomError> {
    let dx = p2.x - p1.x;
    if dx == 0.0 {
        return Err(GeomError::UndefinedSlope(p1.x));
    }
    Ok((p2.y - p1.y) / dx)
}

pub fn segment_length(p1: Point2, p2: Point2) -> f64 {
    (p2.x - p1.x).hypot(p2.y - p1.y)
}

/// Slope and length of one segment, the pair used to describe an arc chord.
pub fn segment_profile(p1: Point2, p2: Point2) -> (Option<f64>, f64) {
    (slope(p1, p2).ok(), segment_length(p1, p2))
}

/// Two decompositions of the same pair of arcs: AB = AP′ + PP′ + PB and
/// B′A′ = B′P′ + PP′ + PA′.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcDecomposition {
    pub total_ab: f64,
    pub ap_prime: f64,
    pub pb: f64,
    pub total_ba: f64,
    pub bp_prime: f64,
    pub pa_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedArc {
    /// PP′ as seen from the AB decomposition.
    pub length: f64,
    /// PP′ as seen from the B′A′ decomposition.
    pub other: f64,
    pub consistent: bool,
}

/// Recovers the shared arc PP′ from both decompositions and checks that they
/// agree within `tolerance`.
pub fn shared_arc(d: &ArcDecomposition, tolerance: f64) -> Result<SharedArc, GeomError> {
    let parts = [d.total_ab, d.ap_prime, d.pb, d.total_ba, d.bp_prime, d.pa_prime];
    if parts.iter().any(|v| !(*v >= 0.0)) {
        return Err(GeomError::Invariant(format!("arc lengths must be >= 0: {parts:?}")));
    }
    let l1 = d.total_ab - d.ap_prime - d.pb;
    let l2 = d.total_ba - d.bp_prime - d.pa_prime;
    if l1 < 0.0 || l2 < 0.0 {
        return Err(GeomError::Invariant(format!(
            "sub-arcs exceed their total (PP' = {l1} / {l2})"
        )));
    }
    Ok(SharedArc {
        length: l1,
        other: l2,
        consistent: (l1 - l2).abs() <= tolerance,
    })
}

/// Axis-aligned rectangle [x0, x1] × [y0, y1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

/// Axis-aligned box over (x, y, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub t: (f64, f64),
}

fn cell_midpoints((lo, hi): (f64, f64), n: usize) -> (f64, impl Iterator<Item = f64> + Clone) {
    let h = (hi - lo) / n as f64;
    (h, (0..n).map(move |i| lo + (i as f64 + 0.5) * h))
}

/// Midpoint-rule double sum of `f` over an `m × n` grid on `domain`.
pub fn riemann_area<F>(f: F, domain: Rect, m: usize, n: usize) -> Result<f64, GeomError>
where
    F: Fn(f64, f64) -> f64,
{
    if m == 0 || n == 0 {
        return Err(GeomError::Domain("grid resolution must be >= 1".into()));
    }
    let (hx, xs) = cell_midpoints(domain.x, m);
    let (hy, ys) = cell_midpoints(domain.y, n);
    let area = hx * hy;
    if area == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for x in xs {
        let row: f64 = ys.clone().map(|y| f(x, y)).sum();
        total += row;
    }
    finite(total * area)
}

/// Midpoint-rule triple sum of `f(x, y, t)` with `res = [nx, ny, nt]` cells.
pub fn triple_integral<F>(f: F, region: Box3, res: [usize; 3]) -> Result<f64, GeomError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if res.contains(&0) {
        return Err(GeomError::Domain("grid resolution must be >= 1".into()));
    }
    let (hx, xs) = cell_midpoints(region.x, res[0]);
    let (hy, ys) = cell_midpoints(region.y, res[1]);
    let (ht, ts) = cell_midpoints(region.t, res[2]);
    let vol = hx * hy * ht;
    if vol == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for x in xs {
        for y in ys.clone() {
            let line: f64 = ts.clone().map(|t| f(x, y, t)).sum();
            total += line;
        }
    }
    finite(total * vol)
}

fn finite(v: f64) -> Result<f64, GeomError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GeomError::Domain(format!("integrand is not finite on the domain (sum = {v})")))
    }
}

/// log_t(t·t∥), and whether it lands on the fold value 2 (which happens iff
/// t∥ = t).
pub fn time_split_check(t: f64, t_parallel: f64) -> Result<(f64, bool), GeomError> {
    if !(t > 0.0) || t == 1.0 || !t.is_finite() {
        return Err(GeomError::LogBase(format!("base t = {t} must be positive, finite and != 1")));
    }
    if !(t_parallel > 0.0) || !t_parallel.is_finite() {
        return Err(GeomError::LogBase(format!("t_parallel = {t_parallel} must be positive")));
    }
    // ln(t·t∥) split as ln t + ln t∥ so the product cannot overflow
    let (lt, ltp) = (t.ln(), t_parallel.ln());
    let value = (lt + ltp) / lt;
    // compared on ln t∥ - ln t, i.e. t∥ relative to t, so that bases near 1
    // do not magnify the tolerance
    Ok((value, (ltp - lt).abs() <= FOLD_TOLERANCE))
}

/// A displacement pB (and its synchronised counterpart PP′) covered in time t
/// with parallel time t∥.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarMotion {
    pub displacement: Point2,
    pub sync_displacement: Point2,
    pub t: f64,
    pub t_parallel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub v: f64,
    pub a: f64,
    pub v_sync: f64,
}

impl Kinematics {
    /// Residuals |v·t − |pB|| and |a·t·t∥ − |pB||.
    pub fn recovery_error(&self, m: &PlanarMotion) -> (f64, f64) {
        let d = m.displacement.norm();
        ((self.v * m.t - d).abs(), (self.a * m.t * m.t_parallel - d).abs())
    }
}

/// v = |pB|/t, a = |pB|/(t·t∥), v_sync = |PP′|/t.
pub fn planar_kinematics(m: &PlanarMotion) -> Result<Kinematics, GeomError> {
    if !(m.t > 0.0 && m.t_parallel > 0.0) {
        return Err(GeomError::Domain(format!(
            "times must be positive (t = {}, t_parallel = {})",
            m.t, m.t_parallel
        )));
    }
    let d = m.displacement.norm();
    Ok(Kinematics {
        v: d / m.t,
        a: d / (m.t * m.t_parallel),
        v_sync: m.sync_displacement.norm() / m.t,
    })
}
