use sha2::{Digest, Sha256};

use super::AnalysisError;
use crate::linkmodel::{
    displaced_frequency_resolution, epsilon_from_progress, frequency_resolution, light_delay_seconds,
    shift_timestamp, Resolution, Target, Timestamp,
};
use crate::units::Quantity;

/// One row of the link spreadsheet.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRecord {
    pub target_name: String,
    pub progress_pct: f64,
    /// The f(x, y) column: progress written as a percentage label.
    pub f_xy_label: String,
    pub t_stamp: Timestamp,
    pub epsilon_lm: f64,
    /// Light delay of ε in seconds.
    pub delta_t_s: f64,
    pub nu_delta_omega_hz: Resolution,
    pub nu_displaced_hz: Resolution,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SheetMeta {
    /// Hex SHA-256 of the inputs the sheet was built (or parsed) from.
    pub config_digest: String,
    pub generated_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sheet {
    pub records: Vec<LinkRecord>,
    pub meta: SheetMeta,
}

pub fn f_xy_label(progress_pct: f64) -> String {
    format!("{progress_pct}%")
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Evaluates the link model for every (target, progress) pair, targets outer,
/// in the order given.
pub fn build_sheet(targets: &[Target], progress_list: &[f64], base_time: Timestamp) -> Result<Sheet, AnalysisError> {
    if targets.is_empty() || progress_list.is_empty() {
        return Err(AnalysisError::Sheet("need at least one target and one progress value".into()));
    }
    let mut canonical = format!("base_time={base_time}\n");
    for t in targets {
        canonical.push_str(&format!(
            "target={}|{}|{}\n",
            t.name,
            t.distance().value(),
            t.range().value()
        ));
    }
    for p in progress_list {
        canonical.push_str(&format!("progress={p}\n"));
    }

    let mut records = Vec::with_capacity(targets.len() * progress_list.len());
    for target in targets {
        for &p in progress_list {
            records.push(link_record(target, p, base_time)?);
        }
    }
    Ok(Sheet {
        records,
        meta: SheetMeta {
            config_digest: sha256_hex(canonical.as_bytes()),
            generated_at: None,
        },
    })
}

pub fn link_record(target: &Target, progress_pct: f64, base_time: Timestamp) -> Result<LinkRecord, AnalysisError> {
    let progress = Quantity::percent(progress_pct).map_err(crate::linkmodel::LinkError::from)?;
    let eps = epsilon_from_progress(progress, target.range())?;
    Ok(LinkRecord {
        target_name: target.name.clone(),
        progress_pct,
        f_xy_label: f_xy_label(progress_pct),
        t_stamp: shift_timestamp(base_time, eps)?,
        epsilon_lm: eps.value(),
        delta_t_s: light_delay_seconds(eps.value()),
        nu_delta_omega_hz: frequency_resolution(target.distance(), progress)?,
        nu_displaced_hz: displaced_frequency_resolution(target.distance(), progress)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sun() -> Target {
        Target::new("Sun", 1.46e8, 8.3).unwrap()
    }

    fn base() -> Timestamp {
        "13:35:00".parse().unwrap()
    }

    #[test]
    fn sun_rows_match_worked_numbers() {
        let s = build_sheet(&[sun()], &[0.0, 16.0, 96.0], base()).unwrap();
        let r0 = &s.records[0];
        assert_eq!(r0.nu_delta_omega_hz, Resolution::DivByZero);
        assert_eq!(r0.t_stamp, base());

        let r16 = &s.records[1];
        assert!((r16.epsilon_lm - 1.328).abs() < 1e-12);
        assert_eq!(r16.t_stamp.to_string(), "13:33:40");
        assert!((r16.nu_delta_omega_hz.hz().unwrap() - 0.0128).abs() < 1e-4);
        assert_eq!(r16.f_xy_label, "16%");
        assert!((r16.delta_t_s - 79.68).abs() < 1e-9);

        let r96 = &s.records[2];
        assert!((r96.epsilon_lm - 7.968).abs() < 1e-12);
        assert!((r96.nu_displaced_hz.hz().unwrap() - 0.0514).abs() < 1e-4);
    }

    #[test]
    fn order_and_purity() {
        let mars = Target::new("Mars", 5.46e7, 3.03).unwrap();
        let a = build_sheet(&[sun(), mars.clone()], &[8.0, 4.0], base()).unwrap();
        let b = build_sheet(&[sun(), mars], &[8.0, 4.0], base()).unwrap();
        assert_eq!(a, b);
        let names: Vec<_> = a.records.iter().map(|r| (r.target_name.as_str(), r.progress_pct)).collect();
        assert_eq!(names, [("Sun", 8.0), ("Sun", 4.0), ("Mars", 8.0), ("Mars", 4.0)]);
        assert_eq!(a.meta.config_digest.len(), 64);
    }

    #[test]
    fn errors_propagate() {
        assert!(build_sheet(&[], &[1.0], base()).is_err());
        assert!(build_sheet(&[sun()], &[], base()).is_err());
        assert!(matches!(
            build_sheet(&[sun()], &[120.0], base()),
            Err(AnalysisError::Link(_))
        ));
        // 96 % of 8.3 Lm is ~478 s of light time
        let early: Timestamp = "00:05:00".parse().unwrap();
        assert!(build_sheet(&[sun()], &[96.0], early).is_err());
    }

    #[test]
    fn full_progress_is_divergent() {
        let s = build_sheet(&[sun()], &[100.0], base()).unwrap();
        assert_eq!(s.records[0].nu_displaced_hz, Resolution::Divergent);
    }
}
