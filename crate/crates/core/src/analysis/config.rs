//! INI-style lab configuration.
//!
//! ```ini
//! [defaults]
//! base_time = 13:35:00
//!
//! [target.Sun]
//! distance_km = 146000000
//! range_lm = 8.3
//! ```

use std::path::Path;

use ini::Ini;

use super::AnalysisError;
use crate::linkmodel::{Target, Timestamp};

/// Observation time used when neither the config nor the command line sets one.
pub const DEFAULT_BASE_TIME: &str = "13:35:00";

#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    /// Targets in file order.
    pub targets: Vec<Target>,
    pub base_time: Option<Timestamp>,
}

impl LabConfig {
    pub fn base_time_or_default(&self) -> Timestamp {
        self.base_time
            .unwrap_or_else(|| DEFAULT_BASE_TIME.parse().expect("default base time is valid"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AnalysisError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| AnalysisError::io(path, e))?;
        text.parse()
    }
}

fn err(msg: impl Into<String>) -> AnalysisError {
    AnalysisError::Config(msg.into())
}

impl std::str::FromStr for LabConfig {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ini = Ini::load_from_str(s).map_err(|e| err(e.to_string()))?;
        let mut targets = Vec::new();
        let mut base_time = None;
        for (section, props) in ini.iter() {
            match section {
                None => {
                    if let Some((k, _)) = props.iter().next() {
                        return Err(err(format!("key '{k}' outside of any section")));
                    }
                }
                Some("defaults") => {
                    for (k, v) in props.iter() {
                        match k {
                            "base_time" => {
                                base_time = Some(v.parse().map_err(|_| {
                                    err(format!("[defaults] base_time '{v}' is not HH:MM:SS"))
                                })?)
                            }
                            other => return Err(err(format!("unknown key '{other}' in [defaults]"))),
                        }
                    }
                }
                Some(sec) => {
                    let Some(name) = sec.strip_prefix("target.").filter(|n| !n.is_empty()) else {
                        return Err(err(format!("unknown section [{sec}]")));
                    };
                    let num = |key: &str| -> Result<f64, AnalysisError> {
                        let v = props
                            .get(key)
                            .ok_or_else(|| err(format!("[{sec}] is missing '{key}'")))?;
                        v.trim()
                            .parse()
                            .map_err(|_| err(format!("[{sec}] {key} = '{v}' is not a number")))
                    };
                    if let Some((k, _)) = props
                        .iter()
                        .find(|(k, _)| *k != "distance_km" && *k != "range_lm")
                    {
                        return Err(err(format!("unknown key '{k}' in [{sec}]")));
                    }
                    let target = Target::new(name, num("distance_km")?, num("range_lm")?)
                        .map_err(|e| err(format!("[{sec}]: {e}")))?;
                    if targets.iter().any(|t: &Target| t.name == target.name) {
                        return Err(err(format!("duplicate target '{name}'")));
                    }
                    targets.push(target);
                }
            }
        }
        Ok(Self { targets, base_time })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUN: &str = "[defaults]\nbase_time = 13:35:00\n\n[target.Sun]\ndistance_km = 146000000\nrange_lm = 8.3\n";

    #[test]
    fn parses_sun_config() {
        let c: LabConfig = SUN.parse().unwrap();
        assert_eq!(c.targets.len(), 1);
        assert_eq!(c.targets[0].name, "Sun");
        assert_eq!(c.targets[0].distance().value(), 1.46e8);
        assert_eq!(c.targets[0].range().value(), 8.3);
        assert_eq!(c.base_time.unwrap().to_string(), "13:35:00");
    }

    #[test]
    fn keeps_target_order_and_defaults() {
        let text = "[target.Mars]\ndistance_km=5.46e7\nrange_lm=3.03\n[target.Sun]\ndistance_km=1.46e8\nrange_lm=8.3\n";
        let c: LabConfig = text.parse().unwrap();
        let names: Vec<_> = c.targets.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["Mars", "Sun"]);
        assert_eq!(c.base_time, None);
        assert_eq!(c.base_time_or_default().to_string(), DEFAULT_BASE_TIME);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            "[target.Sun]\nrange_lm = 8.3\n",
            "[target.Sun]\ndistance_km = far\nrange_lm = 8.3\n",
            "[target.Sun]\ndistance_km = -1\nrange_lm = 8.3\n",
            "[target.Sun]\ndistance_km = 1\nrange_lm = 8.3\ncolour = red\n",
            "[defaults]\nbase_time = 25:00:00\n",
            "[defaults]\nzone = utc\n",
            "[planets]\nx = 1\n",
            "[target.]\ndistance_km = 1\nrange_lm = 1\n",
            "stray = 1\n",
        ] {
            assert!(matches!(bad.parse::<LabConfig>(), Err(AnalysisError::Config(_))), "{bad}");
        }
    }
}
