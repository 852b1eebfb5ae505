//! Memory-chip timing and electrical model.
//!
//! Covers bit frequency, qubit norm checks, write/read phase ratios, sheet
//! resistance, transconductance, quantum efficiency and the FIFO "waterfall"
//! allocation of arriving carriers onto distance-ranked memory cells.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

/// Norm tolerance for a valid qubit state.
pub const QUBIT_NORM_TOLERANCE: f64 = 1e-9;

/// Minimum entries in the α and β pole ratio lists.
pub const MIN_POLE_ENTRIES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MemError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("{pole} pole needs {need} ratio entries, got {got}")]
    PoleSize { pole: &'static str, need: usize, got: usize },
    #[error("{carriers} carriers do not fit in {cells} cells")]
    Capacity { carriers: usize, cells: usize },
    #[error("invalid cell map: {0}")]
    CellMap(String),
}

/// ν_bit = a_in / (b_in · t), with qubit counts taken as plain numbers.
pub fn bit_frequency(a_in_bits: f64, b_in_qbits: f64, t_s: f64) -> Result<f64, MemError> {
    if !(a_in_bits >= 0.0) {
        return Err(MemError::Domain(format!("bit input must be >= 0, got {a_in_bits}")));
    }
    if b_in_qbits == 0.0 || t_s == 0.0 {
        return Err(MemError::DivisionByZero("bit frequency"));
    }
    if b_in_qbits < 0.0 || t_s < 0.0 {
        return Err(MemError::Domain(format!(
            "qubit input and time must be positive (b={b_in_qbits}, t={t_s})"
        )));
    }
    Ok(a_in_bits / (b_in_qbits * t_s))
}

/// Result of summing i/(2j·t) terms, together with the floor it must meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledBitFrequency {
    pub hz: f64,
    /// 0.5 / t, the single-term minimum (1 bit over 2 qubit units).
    pub floor_hz: f64,
}

impl PooledBitFrequency {
    pub fn meets_floor(&self) -> bool {
        self.hz >= self.floor_hz
    }
}

pub fn pooled_bit_frequency(terms: &[(f64, f64)], t_s: f64) -> Result<PooledBitFrequency, MemError> {
    if terms.is_empty() {
        return Err(MemError::Domain("pooled bit frequency needs at least one term".into()));
    }
    if !(t_s > 0.0) {
        return Err(MemError::Domain(format!("time must be positive, got {t_s}")));
    }
    let mut hz = 0.0;
    for &(i, j) in terms {
        if !(j > 0.0) {
            return Err(MemError::Domain(format!("qubit count j must be positive, got {j}")));
        }
        hz += bit_frequency(i, 2.0 * j, t_s)?;
    }
    Ok(PooledBitFrequency {
        hz,
        floor_hz: 0.5 / t_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub a: Complex64,
    pub b: Complex64,
}

impl QubitState {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).sqrt()
    }
}

pub fn validate_qubit(q: &QubitState) -> bool {
    (q.norm() - 1.0).abs() <= QUBIT_NORM_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicLevel {
    Low,
    High,
}

/// A signed-voltage logic input; 0 V reads Low, the supply rail reads High.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicSignal {
    pub level: LogicLevel,
    pub voltage: f64,
}

impl LogicSignal {
    /// Classifies `voltage` against half the supply magnitude. The sign of the
    /// voltage does not matter (L±V, H±V).
    pub fn from_voltage(voltage: f64, supply: f64) -> Self {
        let level = if voltage.abs() >= supply.abs() / 2.0 {
            LogicLevel::High
        } else {
            LogicLevel::Low
        };
        Self { level, voltage }
    }

    pub fn bit(&self) -> u8 {
        match self.level {
            LogicLevel::Low => 0,
            LogicLevel::High => 1,
        }
    }
}

/// (write phase, read phase) pairs per pole.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoleRatios {
    pub alpha: Vec<(f64, f64)>,
    pub beta: Vec<(f64, f64)>,
    pub delta: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleMeans {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl PoleMeans {
    /// Whether the α and β means both match the δ mean within `tol`.
    /// This is a design target for the chip, so it is reported, not enforced.
    pub fn poles_agree(&self, tol: f64) -> bool {
        (self.alpha - self.delta).abs() <= tol && (self.beta - self.delta).abs() <= tol
    }
}

fn mean_ratio(pairs: &[(f64, f64)]) -> Result<f64, MemError> {
    let mut sum = 0.0;
    for &(wr, rd) in pairs {
        if rd == 0.0 {
            return Err(MemError::DivisionByZero("phase ratio (read phase is 0)"));
        }
        sum += wr / rd;
    }
    Ok(sum / pairs.len() as f64)
}

pub fn phase_ratio_mean(poles: &PoleRatios) -> Result<PoleMeans, MemError> {
    for (pole, list) in [("alpha", &poles.alpha), ("beta", &poles.beta)] {
        if list.len() < MIN_POLE_ENTRIES {
            return Err(MemError::PoleSize {
                pole,
                need: MIN_POLE_ENTRIES,
                got: list.len(),
            });
        }
    }
    if poles.delta.len() != 2 {
        return Err(MemError::PoleSize {
            pole: "delta",
            need: 2,
            got: poles.delta.len(),
        });
    }
    Ok(PoleMeans {
        alpha: mean_ratio(&poles.alpha)?,
        beta: mean_ratio(&poles.beta)?,
        delta: mean_ratio(&poles.delta)?,
    })
}

/// Thin-film electrode: length, width, resistivity and film thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectrodeGeometry {
    pub length: f64,
    pub width: f64,
    pub resistivity: f64,
    pub thickness: f64,
}

impl ElectrodeGeometry {
    pub fn new(length: f64, width: f64, resistivity: f64, thickness: f64) -> Result<Self, MemError> {
        if !(length > 0.0 && width > 0.0 && resistivity > 0.0 && thickness > 0.0) {
            return Err(MemError::Domain(format!(
                "electrode L, W, rho, theta must all be positive (got {length}, {width}, {resistivity}, {thickness})"
            )));
        }
        Ok(Self {
            length,
            width,
            resistivity,
            thickness,
        })
    }

    /// Number of squares, Z = L/W.
    pub fn squares(&self) -> f64 {
        self.length / self.width
    }
}

/// R_s = ρ/θ in ohms per square.
pub fn sheet_resistance(g: &ElectrodeGeometry) -> f64 {
    g.resistivity / g.thickness
}

/// R = Z·R_s. A square electrode (L = W) gives R = R_s.
pub fn resistance(g: &ElectrodeGeometry) -> f64 {
    g.squares() * sheet_resistance(g)
}

/// g_m = ΔI_ds / ΔV_gs
pub fn transconductance_baseline(d_i_ds: f64, d_v_gs: f64) -> Result<f64, MemError> {
    if d_v_gs == 0.0 {
        return Err(MemError::DivisionByZero("transconductance"));
    }
    Ok(d_i_ds / d_v_gs)
}

/// Mean transconductance ⟨g_m⟩ across the transistor and both nanotube poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledTransconductance {
    pub mean: f64,
}

impl PooledTransconductance {
    /// Δg_mCNT := 2⟨g_m⟩ − g_m1, so that ⟨g_m⟩ = (g_m1 + Δg_mCNT)/2.
    pub fn cnt_delta(&self, g_m1: f64) -> f64 {
        2.0 * self.mean - g_m1
    }

    pub fn reconstruct(&self, g_m1: f64) -> f64 {
        (g_m1 + self.cnt_delta(g_m1)) / 2.0
    }
}

/// ⟨g_m⟩ = (ΔI_ds + (ΔI_CNT1 − ΔI_CNT2)) / (3ΔV_gs + ΔV_CNTβ + ΔV_CNTα)
pub fn transconductance_pooled(
    d_i_ds: f64,
    d_i_cnt1: f64,
    d_i_cnt2: f64,
    d_v_gs: f64,
    d_v_cnt_alpha: f64,
    d_v_cnt_beta: f64,
) -> Result<PooledTransconductance, MemError> {
    let denom = 3.0 * d_v_gs + d_v_cnt_beta + d_v_cnt_alpha;
    if denom == 0.0 {
        return Err(MemError::DivisionByZero("pooled transconductance"));
    }
    Ok(PooledTransconductance {
        mean: (d_i_ds + (d_i_cnt1 - d_i_cnt2)) / denom,
    })
}

/// η_f = electrons collected / storable entangled hot electrons.
pub fn quantum_efficiency(n_collected: u64, n_entangled_storable: u64) -> Result<f64, MemError> {
    if n_entangled_storable == 0 {
        return Err(MemError::DivisionByZero("quantum efficiency"));
    }
    Ok(n_collected as f64 / n_entangled_storable as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeSign {
    Electron,
    Hole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carrier {
    pub id: u64,
    pub arrival_time_s: f64,
    pub charge_sign: ChargeSign,
}

/// Memory cells with a distance rank (0 = nearest) and their occupants.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellMap {
    cells: Vec<(u64, usize)>,
    occupancy: BTreeMap<u64, u64>,
}

impl CellMap {
    /// `cells` are (address, distance_rank) pairs; ranks must be a permutation
    /// of 0..N and addresses unique.
    pub fn new(cells: Vec<(u64, usize)>) -> Result<Self, MemError> {
        let n = cells.len();
        let mut seen_rank = vec![false; n];
        let mut seen_addr = std::collections::BTreeSet::new();
        for &(addr, rank) in &cells {
            if rank >= n || std::mem::replace(&mut seen_rank[rank], true) {
                return Err(MemError::CellMap(format!("distance ranks are not a permutation of 0..{n}")));
            }
            if !seen_addr.insert(addr) {
                return Err(MemError::CellMap(format!("duplicate address {addr}")));
            }
        }
        Ok(Self {
            cells,
            occupancy: BTreeMap::new(),
        })
    }

    /// Cells whose address equals their distance rank.
    pub fn linear(n: usize) -> Self {
        Self {
            cells: (0..n).map(|i| (i as u64, i)).collect(),
            occupancy: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[(u64, usize)] {
        &self.cells
    }

    pub fn occupant(&self, address: u64) -> Option<u64> {
        self.occupancy.get(&address).copied()
    }

    pub fn address_of_rank(&self, rank: usize) -> Option<u64> {
        self.cells.iter().find(|&&(_, r)| r == rank).map(|&(a, _)| a)
    }

    /// Addresses ordered nearest first.
    fn by_rank(&self) -> Vec<u64> {
        let mut out = vec![0; self.cells.len()];
        for &(addr, rank) in &self.cells {
            out[rank] = addr;
        }
        out
    }
}

/// Carrier id -> cell address.
pub type Allocation = BTreeMap<u64, u64>;

/// FIFO allocation: the k-th carrier to arrive takes the cell of distance rank
/// k, so late (delayed) charges end up in the farthest cells. Equal arrival
/// times are ordered by id.
///
/// Returns the filled copy of the cell map along with the allocation.
pub fn waterfall_allocate(carriers: &[Carrier], cells: &CellMap) -> Result<(CellMap, Allocation), MemError> {
    if carriers.len() > cells.len() {
        return Err(MemError::Capacity {
            carriers: carriers.len(),
            cells: cells.len(),
        });
    }
    if let Some(c) = carriers.iter().find(|c| !c.arrival_time_s.is_finite()) {
        return Err(MemError::Domain(format!("carrier {} has non-finite arrival time", c.id)));
    }
    let mut order: Vec<&Carrier> = carriers.iter().collect();
    order.sort_by(|x, y| {
        x.arrival_time_s
            .total_cmp(&y.arrival_time_s)
            .then(x.id.cmp(&y.id))
    });
    let addresses = cells.by_rank();
    let mut filled = cells.clone();
    filled.occupancy.clear();
    let mut allocation = Allocation::new();
    for (carrier, &addr) in order.into_iter().zip(&addresses) {
        if allocation.insert(carrier.id, addr).is_some() {
            return Err(MemError::Domain(format!("duplicate carrier id {}", carrier.id)));
        }
        filled.occupancy.insert(addr, carrier.id);
    }
    Ok((filled, allocation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_frequency_examples() {
        for n in 0..10 {
            let t = 10f64.powi(-n);
            let f = bit_frequency(1.0, 2.0, t).unwrap();
            let want = 0.5 * 10f64.powi(n);
            assert!((f - want).abs() <= 1e-12 * want);
        }
        assert_eq!(bit_frequency(0.0, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(bit_frequency(1.0, 2.0, 1.0).unwrap(), 0.5);
        assert!(matches!(bit_frequency(1.0, 0.0, 1.0), Err(MemError::DivisionByZero(_))));
        assert!(matches!(bit_frequency(1.0, 2.0, 0.0), Err(MemError::DivisionByZero(_))));
    }

    #[test]
    fn pooled_examples() {
        let p = pooled_bit_frequency(&[(1.0, 1.0)], 1e-3).unwrap();
        assert!((p.hz - 500.0).abs() < 1e-9);
        assert!(p.meets_floor());
        let p = pooled_bit_frequency(&[(1.0, 1.0), (1.0, 1.0)], 1.0).unwrap();
        assert_eq!(p.hz, 1.0);
        let p = pooled_bit_frequency(&[(0.0, 1.0)], 1.0).unwrap();
        assert_eq!(p.hz, 0.0);
        assert!(!p.meets_floor());
        assert!(pooled_bit_frequency(&[], 1.0).is_err());
        assert!(pooled_bit_frequency(&[(1.0, 0.0)], 1.0).is_err());
    }

    #[test]
    fn qubit_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(validate_qubit(&QubitState::real(1.0, 0.0)));
        assert!(validate_qubit(&QubitState::real(h, h)));
        assert!(validate_qubit(&QubitState::real(0.6, 0.8)));
        assert!(!validate_qubit(&QubitState::real(0.6, 0.7)));
    }

    #[test]
    fn logic_levels() {
        assert_eq!(LogicSignal::from_voltage(0.0, 5.0).bit(), 0);
        assert_eq!(LogicSignal::from_voltage(5.0, 5.0).bit(), 1);
        assert_eq!(LogicSignal::from_voltage(-5.0, 5.0).bit(), 1);
    }

    fn ratios(alpha: &[(f64, f64)], delta: &[(f64, f64)]) -> PoleRatios {
        PoleRatios {
            alpha: alpha.to_vec(),
            beta: alpha.to_vec(),
            delta: delta.to_vec(),
        }
    }

    #[test]
    fn phase_ratio_examples() {
        let flat = ratios(&[(2.0, 1.0); 5], &[(4.0, 2.0); 2]);
        let m = phase_ratio_mean(&flat).unwrap();
        assert_eq!((m.alpha, m.beta, m.delta), (2.0, 2.0, 2.0));
        assert!(m.poles_agree(0.0));

        let m = phase_ratio_mean(&ratios(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (2.0, 2.0)], &[(1.0, 2.0), (3.0, 2.0)])).unwrap();
        assert_eq!(m.alpha, 1.75);
        assert_eq!(m.delta, 1.0);
        assert!(!m.poles_agree(0.1));
    }

    #[test]
    fn phase_ratio_errors() {
        let short = ratios(&[(1.0, 1.0); 3], &[(1.0, 1.0); 2]);
        assert!(matches!(phase_ratio_mean(&short), Err(MemError::PoleSize { pole: "alpha", .. })));
        let bad_delta = ratios(&[(1.0, 1.0); 4], &[(1.0, 1.0); 3]);
        assert!(matches!(phase_ratio_mean(&bad_delta), Err(MemError::PoleSize { pole: "delta", .. })));
        let zero = ratios(&[(1.0, 0.0); 4], &[(1.0, 1.0); 2]);
        assert!(matches!(phase_ratio_mean(&zero), Err(MemError::DivisionByZero(_))));
    }

    #[test]
    fn resistance_examples() {
        let g = ElectrodeGeometry::new(1.0, 1.0, 3.0, 3.0).unwrap();
        assert_eq!(sheet_resistance(&g), 1.0);
        let g = ElectrodeGeometry::new(1.0, 1.0, 2.65e-8, 1e-7).unwrap();
        assert!((sheet_resistance(&g) - 0.265).abs() < 1e-15);
        assert_eq!(resistance(&g), sheet_resistance(&g));
        let thick = ElectrodeGeometry::new(1.0, 1.0, 2.65e-8, 2e-7).unwrap();
        assert!((sheet_resistance(&thick) - 0.1325).abs() < 1e-15);
        let long = ElectrodeGeometry::new(2.0, 1.0, 2.65e-8, 1e-7).unwrap();
        assert!((resistance(&long) - 0.53).abs() < 1e-15);
        assert!(ElectrodeGeometry::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn transconductance_examples() {
        assert_eq!(transconductance_baseline(1e-3, 1.0).unwrap(), 1e-3);
        assert_eq!(transconductance_baseline(0.0, 2.0).unwrap(), 0.0);
        assert!(transconductance_baseline(-1e-3, 1.0).unwrap() < 0.0);
        assert!(transconductance_baseline(1.0, 0.0).is_err());

        let g = transconductance_pooled(3e-3, 2e-3, 2e-3, 1.0, 0.0, 0.0).unwrap();
        assert!((g.mean - 1e-3).abs() < 1e-18);
        let g = transconductance_pooled(3e-3, 2e-3, 1e-3, 1.0, 0.5, 0.5).unwrap();
        assert!((g.mean - 1e-3).abs() < 1e-18);
        let g = transconductance_pooled(0.0, 0.0, 0.0, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(g.mean, 0.0);
        assert!(transconductance_pooled(1.0, 0.0, 0.0, 1.0, -1.5, -1.5).is_err());
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(quantum_efficiency(7, 7).unwrap(), 1.0);
        assert_eq!(quantum_efficiency(0, 7).unwrap(), 0.0);
        assert_eq!(quantum_efficiency(3, 4).unwrap(), 0.75);
        assert!(quantum_efficiency(3, 0).is_err());
    }

    fn carrier(id: u64, t: f64) -> Carrier {
        Carrier {
            id,
            arrival_time_s: t,
            charge_sign: ChargeSign::Electron,
        }
    }

    #[test]
    fn waterfall_examples() {
        let cells = CellMap::new(vec![(100, 2), (101, 0), (102, 1)]).unwrap();
        let (_, alloc) = waterfall_allocate(&[carrier(7, 1.0)], &cells).unwrap();
        assert_eq!(alloc[&7], 101);

        let (filled, alloc) =
            waterfall_allocate(&[carrier(0, 3.0), carrier(1, 1.0), carrier(2, 2.0)], &cells).unwrap();
        assert_eq!(alloc[&1], cells.address_of_rank(0).unwrap());
        assert_eq!(alloc[&2], cells.address_of_rank(1).unwrap());
        assert_eq!(alloc[&0], cells.address_of_rank(2).unwrap());
        assert_eq!(filled.occupant(100), Some(0));

        let (_, alloc) = waterfall_allocate(&[carrier(9, 1.0), carrier(4, 1.0)], &cells).unwrap();
        assert_eq!(alloc[&4], 101);
        assert_eq!(alloc[&9], 102);
    }

    #[test]
    fn waterfall_errors() {
        let cells = CellMap::linear(1);
        assert!(matches!(
            waterfall_allocate(&[carrier(0, 0.0), carrier(1, 0.0)], &cells),
            Err(MemError::Capacity { .. })
        ));
        assert!(waterfall_allocate(&[carrier(0, f64::NAN)], &cells).is_err());
        assert!(CellMap::new(vec![(0, 0), (1, 0)]).is_err());
        assert!(CellMap::new(vec![(0, 0), (0, 1)]).is_err());
        assert!(CellMap::new(vec![(0, 2)]).is_err());
    }

    proptest! {
        #[test]
        fn bit_frequency_ratio_homogeneous(a in 0.0f64..1e3, b in 0.1f64..1e3, t in 1e-9f64..1e3, k in 0.01f64..100.0) {
            let f = bit_frequency(a, b, t).unwrap();
            let fk = bit_frequency(k * a, k * b, t).unwrap();
            prop_assert!((f - fk).abs() <= 1e-12 * f.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn square_electrode_resistance_is_sheet(l in 1e-6f64..1.0, rho in 1e-9f64..1.0, theta in 1e-9f64..1e-3) {
            let g = ElectrodeGeometry::new(l, l, rho, theta).unwrap();
            prop_assert_eq!(resistance(&g), sheet_resistance(&g));
        }

        #[test]
        fn pooled_reconstruction(i in -1.0f64..1.0, c1 in -1.0f64..1.0, c2 in -1.0f64..1.0,
                                 v in 0.1f64..5.0, va in 0.0f64..5.0, vb in 0.0f64..5.0, gm1 in -1.0f64..1.0) {
            let g = transconductance_pooled(i, c1, c2, v, va, vb).unwrap();
            let back = g.reconstruct(gm1);
            prop_assert!((back - g.mean).abs() <= 1e-12 * g.mean.abs().max(gm1.abs()).max(1e-300));
        }

        #[test]
        fn qubit_verdict_ignores_global_phase(ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0,
                                              bi in -1.0f64..1.0, phase in 0.0f64..std::f64::consts::TAU, normalise: bool) {
            let mut q = QubitState::new(Complex64::new(ar, ai), Complex64::new(br, bi));
            if normalise && q.norm() > 0.0 {
                let n = q.norm();
                q = QubitState::new(q.a / n, q.b / n);
            }
            let rot = Complex64::from_polar(1.0, phase);
            let turned = QubitState::new(q.a * rot, q.b * rot);
            prop_assert_eq!(validate_qubit(&q), validate_qubit(&turned));
        }
    }
}
