//! Interactive browser demo over the core toolkit, exposed through three
//! JSON-in/JSON-out entry points:
//!
//! - [`simulate_paths`]: replicate sample paths of a spectral model,
//! - [`structure_curve`]: empirical vs theoretical structure function,
//! - [`krige_curve`]: kriging prediction with a variance band.
//!
//! The wasm layer is a thin string wrapper; all logic lives in plain
//! functions that compile and test on any target. Build the browser bundle
//! with `wasm-pack build --target web crates/wasm-demo`.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

use irf_core::kriging::predict;
use irf_core::process::empirical_structure_function;
use irf_core::spectral::{
    theoretical_structure_function, FrequencyGrid, Spacing, SpectralModel, SpectralSynthesizer,
};
use irf_core::{KrigingProblem, TimeGrid};

/// Compact grid for interactive latency; the CLI uses the full default.
fn demo_fgrid() -> FrequencyGrid {
    FrequencyGrid::new(1e-3, 1e2, 512, Spacing::Log).expect("valid demo grid")
}

#[derive(Deserialize)]
struct SimulateRequest {
    model: SpectralModel,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "default_reps")]
    reps: usize,
    #[serde(default)]
    seed: u64,
}

fn default_n() -> usize {
    400
}
fn default_dt() -> f64 {
    0.05
}
fn default_reps() -> usize {
    3
}

#[derive(Serialize)]
struct SimulateResponse {
    t: Vec<f64>,
    paths: Vec<Vec<f64>>,
    order_d: usize,
}

fn simulate_paths_impl(request: &str) -> Result<String, String> {
    let req: SimulateRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if req.n == 0 || req.reps == 0 || !(req.dt > 0.0) {
        return Err("need n >= 1, reps >= 1 and dt > 0".into());
    }
    if req.n * req.reps > 2_000_000 {
        return Err("requested path volume is too large for the demo".into());
    }
    let grid = TimeGrid {
        t0: 0.0,
        dt: req.dt,
        n: req.n,
    };
    let synth =
        SpectralSynthesizer::new(&req.model, grid, &demo_fgrid()).map_err(|e| e.to_string())?;
    let paths: Vec<Vec<f64>> = (0..req.reps)
        .map(|r| synth.sample(req.seed + r as u64).values().to_vec())
        .collect();
    let resp = SimulateResponse {
        t: grid.times().collect(),
        paths,
        order_d: req.model.order(),
    };
    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct StructureRequest {
    model: SpectralModel,
    #[serde(default = "default_dt")]
    dt: f64,
    /// Lag multiplier: iota = m * dt.
    #[serde(default = "default_m")]
    m: usize,
    #[serde(default = "default_max_lag")]
    max_lag_steps: usize,
    /// Replicates for the empirical side; 0 disables it.
    #[serde(default = "default_struct_reps")]
    reps: usize,
    #[serde(default = "default_struct_n")]
    n: usize,
    #[serde(default)]
    seed: u64,
}

fn default_m() -> usize {
    1
}
fn default_max_lag() -> usize {
    20
}
fn default_struct_reps() -> usize {
    120
}
fn default_struct_n() -> usize {
    400
}

#[derive(Serialize)]
struct StructureResponse {
    h: Vec<f64>,
    theoretical: Vec<f64>,
    empirical: Vec<f64>,
    std_error: Vec<f64>,
}

fn structure_curve_impl(request: &str) -> Result<String, String> {
    let req: StructureRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if req.m == 0 || !(req.dt > 0.0) || req.max_lag_steps == 0 {
        return Err("need m >= 1, dt > 0 and at least one lag".into());
    }
    let fgrid = demo_fgrid();
    let iota = req.m as f64 * req.dt;
    let lags: Vec<i64> = (0..=req.max_lag_steps as i64).collect();

    let mut theoretical = Vec::with_capacity(lags.len());
    for &lag in &lags {
        theoretical.push(
            theoretical_structure_function(&req.model, iota, iota, lag as f64 * req.dt, &fgrid)
                .map_err(|e| e.to_string())?,
        );
    }

    let (empirical, std_error) = if req.reps >= 2 {
        let needed = req.model.order() * req.m + req.max_lag_steps + 2;
        let n = req.n.max(needed);
        if n * req.reps > 4_000_000 {
            return Err("requested Monte Carlo volume is too large for the demo".into());
        }
        let grid = TimeGrid {
            t0: 0.0,
            dt: req.dt,
            n,
        };
        let synth =
            SpectralSynthesizer::new(&req.model, grid, &fgrid).map_err(|e| e.to_string())?;
        let paths: Vec<_> = (0..req.reps)
            .map(|r| synth.sample(req.seed + r as u64))
            .collect();
        let est = empirical_structure_function(&paths, req.model.order(), req.m, &lags)
            .map_err(|e| e.to_string())?;
        (
            est.iter().map(|e| e.estimate).collect(),
            est.iter().map(|e| e.std_error).collect(),
        )
    } else {
        (Vec::new(), Vec::new())
    };

    serde_json::to_string(&StructureResponse {
        h: lags.iter().map(|&l| l as f64 * req.dt).collect(),
        theoretical,
        empirical,
        std_error,
    })
    .map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct KrigeRequest {
    problem: KrigingProblem,
    t_min: f64,
    t_max: f64,
    #[serde(default = "default_n_eval")]
    n_eval: usize,
}

fn default_n_eval() -> usize {
    200
}

#[derive(Serialize)]
struct KrigeResponse {
    t0: Vec<f64>,
    prediction: Vec<f64>,
    variance: Vec<f64>,
    obs_t: Vec<f64>,
    obs_x: Vec<f64>,
}

fn krige_curve_impl(request: &str) -> Result<String, String> {
    let req: KrigeRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if !(req.t_max > req.t_min) || req.n_eval < 2 || req.n_eval > 5000 {
        return Err("need t_max > t_min and 2 <= n_eval <= 5000".into());
    }
    let mut t0 = Vec::with_capacity(req.n_eval);
    let mut prediction = Vec::with_capacity(req.n_eval);
    let mut variance = Vec::with_capacity(req.n_eval);
    for k in 0..req.n_eval {
        let t = req.t_min + (req.t_max - req.t_min) * k as f64 / (req.n_eval - 1) as f64;
        let sol = predict(&req.problem, t).map_err(|e| e.to_string())?;
        t0.push(t);
        prediction.push(sol.prediction);
        variance.push(sol.kriging_variance.max(0.0));
    }
    serde_json::to_string(&KrigeResponse {
        t0,
        prediction,
        variance,
        obs_t: req.problem.obs_t().to_vec(),
        obs_x: req.problem.obs_x().to_vec(),
    })
    .map_err(|e| e.to_string())
}

fn envelope(result: Result<String, String>) -> String {
    match result {
        Ok(payload) => payload,
        Err(msg) => format!(
            "{{\"error\":{}}}",
            serde_json::to_string(&msg).unwrap_or_else(|_| "\"internal error\"".into())
        ),
    }
}

/// Simulate replicate sample paths. Request: `{"model":{...},"n":400,
/// "dt":0.05,"reps":3,"seed":0}`. Response: `{"t":[...],"paths":[[...]],
/// "order_d":d}` or `{"error":"..."}`.
#[wasm_bindgen]
pub fn simulate_paths(request: &str) -> String {
    envelope(simulate_paths_impl(request))
}

/// Empirical vs theoretical structure function over a lag range.
#[wasm_bindgen]
pub fn structure_curve(request: &str) -> String {
    envelope(structure_curve_impl(request))
}

/// Kriging prediction curve with pointwise variance.
#[wasm_bindgen]
pub fn krige_curve(request: &str) -> String {
    envelope(krige_curve_impl(request))
}
