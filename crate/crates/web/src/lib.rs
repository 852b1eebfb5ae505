//! Browser bindings for the link spreadsheet, the displaced-frequency sweep
//! and the fiber mode check.
//!
//! Each export is a thin wrapper over a plain function returning
//! `Result<_, String>`, so the logic is testable off the browser.

use std::fmt::Write as _;

use timedata_core::analysis::cli::expand_progress;
use timedata_core::analysis::{build_sheet, render_radar_chart, write_csv};
use timedata_core::linkmodel::{self, Target, Timestamp};
use timedata_core::optics::{self, FiberSpec, SINGLE_MODE_CUTOFF};
use timedata_core::units::Quantity;
use wasm_bindgen::prelude::*;

fn sheet_for(
    distance_km: f64,
    range_lm: f64,
    progress: &str,
    base_time: &str,
) -> Result<timedata_core::analysis::Sheet, String> {
    let target = Target::new("target", distance_km, range_lm).map_err(|e| e.to_string())?;
    let progress = expand_progress(progress)?;
    let base: Timestamp = base_time
        .trim()
        .parse()
        .map_err(|_| format!("base time '{base_time}' is not HH:MM:SS"))?;
    build_sheet(&[target], &progress, base).map_err(|e| e.to_string())
}

/// CSV text of the single-target sheet.
pub fn sheet_csv(distance_km: f64, range_lm: f64, progress: &str, base_time: &str) -> Result<String, String> {
    let sheet = sheet_for(distance_km, range_lm, progress, base_time)?;
    let mut out = Vec::new();
    write_csv(&sheet, &mut out).map_err(|e| e.to_string())?;
    String::from_utf8(out).map_err(|e| e.to_string())
}

/// Radar chart SVG of the single-target sheet.
pub fn sheet_svg(distance_km: f64, range_lm: f64, progress: &str, base_time: &str) -> Result<String, String> {
    let sheet = sheet_for(distance_km, range_lm, progress, base_time)?;
    render_radar_chart(&sheet).map(|c| c.svg).map_err(|e| e.to_string())
}

/// Tab-separated `progress, nu_dw, nu_dw_x` rows for `steps + 1` evenly
/// spaced progress values in [0, max_progress].
pub fn frequency_sweep(distance_km: f64, max_progress: f64, steps: u32) -> Result<String, String> {
    if steps == 0 || !(0.0..=100.0).contains(&max_progress) {
        return Err("need at least one step and a maximum progress in [0, 100]".into());
    }
    let distance = Quantity::km(distance_km).map_err(|e| e.to_string())?;
    let mut out = String::from("progress_pct\tnu_dw_hz\tnu_dw_x_hz\n");
    for k in 0..=steps {
        let p = max_progress * k as f64 / steps as f64;
        let pct = Quantity::percent(p).map_err(|e| e.to_string())?;
        let nu = linkmodel::frequency_resolution(distance, pct).map_err(|e| e.to_string())?;
        let nu_x = linkmodel::displaced_frequency_resolution(distance, pct).map_err(|e| e.to_string())?;
        let _ = writeln!(out, "{p}\t{nu}\t{nu_x}");
    }
    Ok(out)
}

/// V-number and mode verdict of a step-index fiber (lengths in micrometres).
pub fn fiber_mode(core_radius_um: f64, wavelength_um: f64, n1: f64, n2: f64) -> Result<String, String> {
    let v = optics::v_number(&FiberSpec {
        core_radius_m: core_radius_um * 1e-6,
        wavelength_m: wavelength_um * 1e-6,
        n1,
        n2,
    })
    .map_err(|e| e.to_string())?;
    let verdict = if optics::is_single_mode(v) { "single-mode" } else { "multimode" };
    Ok(format!("V = {v:.6} ({verdict}, cutoff {SINGLE_MODE_CUTOFF})"))
}

#[wasm_bindgen(js_name = sheetCsv)]
pub fn sheet_csv_js(distance_km: f64, range_lm: f64, progress: &str, base_time: &str) -> Result<String, JsError> {
    sheet_csv(distance_km, range_lm, progress, base_time).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sheetSvg)]
pub fn sheet_svg_js(distance_km: f64, range_lm: f64, progress: &str, base_time: &str) -> Result<String, JsError> {
    sheet_svg(distance_km, range_lm, progress, base_time).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = frequencySweep)]
pub fn frequency_sweep_js(distance_km: f64, max_progress: f64, steps: u32) -> Result<String, JsError> {
    frequency_sweep(distance_km, max_progress, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fiberMode)]
pub fn fiber_mode_js(core_radius_um: f64, wavelength_um: f64, n1: f64, n2: f64) -> Result<String, JsError> {
    fiber_mode(core_radius_um, wavelength_um, n1, n2).map_err(|e| JsError::new(&e))
}
