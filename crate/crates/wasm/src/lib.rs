//! Browser bindings for the extension-factor bound: three interactive
//! operations behind `wasm-bindgen`, each returning a JSON string so the
//! demo page needs no glue types.
//!
//! Build for the web with `wasm-pack build --target web --out-dir www/pkg`;
//! the crate also compiles natively so the bindings stay under `cargo test`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use extquad::bounds::{
    closed_form_floor, lipschitz_bound, min_inefficiency_excess, solve_rho_star_default,
    BoundParams,
};
use extquad::schedule::{validate_schedule, Schedule};

#[derive(Serialize)]
#[serde(untagged)]
enum Reply<T: Serialize> {
    Ok { ok: T },
    Err { error: String },
}

fn reply<T: Serialize>(result: Result<T, String>) -> String {
    let reply = match result {
        Ok(ok) => Reply::Ok { ok },
        Err(error) => Reply::Err { error },
    };
    serde_json::to_string(&reply).expect("serializable reply")
}

#[derive(Serialize)]
struct BoundReport {
    alpha: f64,
    m: f64,
    big_m: f64,
    floor: f64,
    rho_star: f64,
    rho_star_excess: f64,
    lipschitz: f64,
    min_inefficiency: f64,
    iterations: usize,
    residual: f64,
    method: String,
}

fn solve_report(alpha: f64, m: f64, big_m: f64) -> Result<BoundReport, String> {
    let p = BoundParams::new(alpha, m, big_m).map_err(|e| e.to_string())?;
    let sol = solve_rho_star_default(p).map_err(|e| e.to_string())?;
    let min_inefficiency =
        min_inefficiency_excess(sol.rho_star_excess, p.alpha()).map_err(|e| e.to_string())?;
    Ok(BoundReport {
        alpha: p.alpha(),
        m: p.m(),
        big_m: p.big_m(),
        floor: closed_form_floor(p),
        rho_star: sol.rho_star,
        rho_star_excess: sol.rho_star_excess,
        lipschitz: lipschitz_bound(p),
        min_inefficiency,
        iterations: sol.iterations,
        residual: sol.residual,
        method: sol.method.to_string(),
    })
}

/// Solve the critical extension factor for one parameter set.
#[wasm_bindgen]
pub fn solve_bound(alpha: f64, m: f64, big_m: f64) -> String {
    reply(solve_report(alpha, m, big_m))
}

#[derive(Serialize)]
struct CurvePoint {
    alpha: f64,
    rho_star: f64,
    floor: f64,
}

#[derive(Serialize)]
struct CurveLevel {
    ratio: f64,
    points: Vec<CurvePoint>,
}

fn curve_data(
    alpha_min: f64,
    alpha_max: f64,
    steps: u32,
    ratios_csv: &str,
) -> Result<Vec<CurveLevel>, String> {
    if !alpha_min.is_finite() || !alpha_max.is_finite() || alpha_min <= 1.0 || alpha_max <= alpha_min
    {
        return Err(format!("need 1 < alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"));
    }
    if !(2..=2048).contains(&steps) {
        return Err(format!("steps must lie in [2, 2048], got {steps}"));
    }
    let mut levels = Vec::new();
    for part in ratios_csv.split(',') {
        let ratio: f64 = part
            .trim()
            .parse()
            .map_err(|_| format!("malformed ratio '{part}'"))?;
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(format!("ratio m/M must lie in (0, 1], got {ratio}"));
        }
        let mut points = Vec::with_capacity(steps as usize);
        for i in 0..steps {
            let alpha =
                alpha_min + (alpha_max - alpha_min) * i as f64 / (steps as f64 - 1.0);
            let p = BoundParams::from_ratio(alpha, ratio).map_err(|e| e.to_string())?;
            let sol = solve_rho_star_default(p).map_err(|e| e.to_string())?;
            points.push(CurvePoint { alpha, rho_star: sol.rho_star, floor: closed_form_floor(p) });
        }
        levels.push(CurveLevel { ratio, points });
    }
    if levels.is_empty() {
        return Err("at least one ratio is required".to_string());
    }
    Ok(levels)
}

/// Tabulate rho*(alpha) and the closed-form floor for several m/M levels.
#[wasm_bindgen]
pub fn bound_curve(alpha_min: f64, alpha_max: f64, steps: u32, ratios_csv: &str) -> String {
    reply(curve_data(alpha_min, alpha_max, steps, ratios_csv))
}

#[derive(Serialize)]
struct ScheduleStep {
    k: usize,
    from: u64,
    to: u64,
    ratio: f64,
    admissible: bool,
}

#[derive(Serialize)]
struct ScheduleJson {
    floor: f64,
    admissible: bool,
    steps: Vec<ScheduleStep>,
}

fn schedule_data(sizes_csv: &str, alpha: f64, m: f64, big_m: f64) -> Result<ScheduleJson, String> {
    let p = BoundParams::new(alpha, m, big_m).map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for part in sizes_csv.split(',') {
        let trimmed = part.trim();
        if trimmed.is_empty() {
            continue;
        }
        sizes.push(
            trimmed
                .parse::<u64>()
                .map_err(|_| format!("malformed size '{trimmed}'"))?,
        );
    }
    let schedule = Schedule::new(sizes).map_err(|e| e.to_string())?;
    let report = validate_schedule(&schedule, p, 1e-9).map_err(|e| e.to_string())?;
    let steps = report
        .ratios
        .iter()
        .enumerate()
        .map(|(i, &ratio)| ScheduleStep {
            k: i + 1,
            from: schedule.sizes()[i],
            to: schedule.sizes()[i + 1],
            ratio,
            admissible: !report.violations.iter().any(|&(k, _)| k == i + 1),
        })
        .collect();
    Ok(ScheduleJson { floor: report.floor, admissible: report.admissible, steps })
}

/// Validate a comma-separated schedule against the solved critical factor.
#[wasm_bindgen]
pub fn schedule_report(sizes_csv: &str, alpha: f64, m: f64, big_m: f64) -> String {
    reply(schedule_data(sizes_csv, alpha, m, big_m))
}
