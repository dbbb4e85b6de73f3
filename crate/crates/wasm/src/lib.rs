//! Browser bindings for the shufflecode library.
//!
//! Three JSON-string entry points back the demo page in `www/`:
//! [`analysis_curve`] sweeps the analytical FER approximation,
//! [`matched_decode_demo`] pushes one corrupted segment through every
//! candidate coset decoder and reports the detection metrics, and
//! [`run_simulation`] runs a small Monte Carlo campaign. Requests and
//! responses are JSON strings so the JS side stays free of generated
//! types; every field has a default, so `"{}"` is a valid request. All
//! randomness is seeded and the crate never touches an entropy source,
//! which keeps the wasm build free of JS imports beyond the bindings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use shufflecode::analysis::{f_value, fer_approx, measure_polar_ber, pd_bound, BoundParams};
use shufflecode::channel::bsc_corrupt;
use shufflecode::coset::{coset_encode, gen_coset_book, matched_decode};
use shufflecode::pipeline::{run_campaign, SystemParams};
use shufflecode::polar::{CombiningRule, PolarCode};

/// Analytical FER approximation over a delta grid.
///
/// Request fields (all optional): `delta_start`, `delta_end`, `points`,
/// `n_i`, `payload_bits`, `m`, `q`, `k_o`, `pb_frames`, `min_sum`,
/// `seed`. The residual inner BER feeding the approximation is measured
/// by Monte Carlo with `pb_frames` blocks per grid point.
#[wasm_bindgen]
pub fn analysis_curve(request: &str) -> Result<String, JsError> {
    analysis_curve_impl(request).map_err(|e| JsError::new(&e))
}

/// One segment, every candidate coset decoder, and the metric each one
/// reports; the demo page draws these as a bar chart.
///
/// Request fields (all optional): `m`, `delta`, `seed`, `trial`,
/// `true_index` (defaults to a seeded random draw), `min_sum`.
#[wasm_bindgen]
pub fn matched_decode_demo(request: &str) -> Result<String, JsError> {
    matched_decode_demo_impl(request).map_err(|e| JsError::new(&e))
}

/// Small end-to-end campaign. Request: `{"params": {...}, "trials": N}`
/// where `params` takes the same fields as the library's system
/// parameters (all optional) and `trials` is capped to keep the browser
/// responsive.
#[wasm_bindgen]
pub fn run_simulation(request: &str) -> Result<String, JsError> {
    run_simulation_impl(request).map_err(|e| JsError::new(&e))
}

#[derive(Deserialize)]
#[serde(default)]
struct CurveRequest {
    delta_start: f64,
    delta_end: f64,
    points: usize,
    n_i: usize,
    payload_bits: usize,
    m: usize,
    q: u32,
    k_o: usize,
    pb_frames: u64,
    min_sum: bool,
    seed: u64,
}

impl Default for CurveRequest {
    fn default() -> Self {
        Self {
            delta_start: 0.01,
            delta_end: 0.07,
            points: 13,
            n_i: 128,
            payload_bits: 64,
            m: 32,
            q: 8,
            k_o: 225,
            pb_frames: 2000,
            min_sum: true,
            seed: 0,
        }
    }
}

fn combining(min_sum: bool) -> CombiningRule {
    if min_sum {
        CombiningRule::MinSum
    } else {
        CombiningRule::Exact
    }
}

fn analysis_curve_impl(request: &str) -> Result<String, String> {
    let req: CurveRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if req.points < 2 || req.points > 201 {
        return Err("points must be in 2..=201".into());
    }
    if req.pb_frames == 0 || req.pb_frames > 200_000 {
        return Err("pb_frames must be in 1..=200000".into());
    }
    if !(req.delta_start >= 0.0 && req.delta_end < 0.5 && req.delta_start <= req.delta_end) {
        return Err("need 0 <= delta_start <= delta_end < 0.5".into());
    }
    let n_o = (1usize << req.q) - 1;
    let rate = req.payload_bits as f64 / req.n_i as f64;
    let step = (req.delta_end - req.delta_start) / (req.points - 1) as f64;
    let mut deltas = Vec::with_capacity(req.points);
    let (mut one_minus_f, mut pd, mut p_b, mut fer) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for i in 0..req.points {
        let delta = req.delta_start + step * i as f64;
        let residual = measure_polar_ber(
            req.n_i,
            req.payload_bits,
            delta,
            combining(req.min_sum),
            req.pb_frames,
            req.seed,
            0,
        )
        .map_err(|e| e.to_string())?;
        let params = BoundParams {
            n: req.n_i,
            rate,
            delta,
            m: req.m,
            n_o,
            k_o: req.k_o,
            q: req.q,
            p_b: residual,
        };
        let f = f_value(req.n_i, rate, delta, req.m).map_err(|e| e.to_string())?;
        let (_, pd_clamped) = pd_bound(&params).map_err(|e| e.to_string())?;
        let approx = fer_approx(&params).map_err(|e| e.to_string())?;
        deltas.push(delta);
        one_minus_f.push(1.0 - f);
        pd.push(pd_clamped);
        p_b.push(residual);
        fer.push(approx);
    }
    Ok(json!({
        "delta": deltas,
        "one_minus_f": one_minus_f,
        "pd": pd,
        "p_b": p_b,
        "fer": fer,
    })
    .to_string())
}

#[derive(Deserialize)]
#[serde(default)]
struct DemoRequest {
    m: usize,
    delta: f64,
    seed: u64,
    trial: u64,
    true_index: Option<usize>,
    min_sum: bool,
}

impl Default for DemoRequest {
    fn default() -> Self {
        Self { m: 16, delta: 0.04, seed: 0, trial: 0, true_index: None, min_sum: true }
    }
}

fn matched_decode_demo_impl(request: &str) -> Result<String, String> {
    let req: DemoRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if req.m < 2 || req.m > 64 {
        return Err("m must be in 2..=64".into());
    }
    let code = PolarCode::new(128, 64)
        .map_err(|e| e.to_string())?
        .with_combining(combining(req.min_sum));
    let book = gen_coset_book(req.seed, req.m, &code).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    rng.set_stream(req.trial.wrapping_add(1));
    let true_index = match req.true_index {
        Some(i) if i >= req.m => return Err(format!("true_index {i} out of range 0..{}", req.m)),
        Some(i) => i,
        None => rng.gen_range(0..req.m),
    };
    let segment: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2u8)).collect();
    let sent = coset_encode(&segment, true_index, &book, &code).map_err(|e| e.to_string())?;
    let received = bsc_corrupt(&sent, req.delta, &mut rng).map_err(|e| e.to_string())?;
    let flips = sent.iter().zip(&received).filter(|(a, b)| a != b).count();
    let result = matched_decode(&received, req.delta, &book, &code).map_err(|e| e.to_string())?;
    let runner_up = result
        .metrics
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != result.detected)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "true_index": true_index,
        "detected": result.detected,
        "correct": result.detected == true_index,
        "metrics": result.metrics,
        "margin": result.metrics[result.detected] - runner_up,
        "bit_flips": flips,
        "segment_recovered": result.decoded_segment == segment,
    })
    .to_string())
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct SimRequest {
    params: SystemParams,
    trials: u64,
}

fn run_simulation_impl(request: &str) -> Result<String, String> {
    let req: SimRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let trials = if req.trials == 0 { 100 } else { req.trials };
    if trials > 20_000 {
        return Err("trials must be at most 20000".into());
    }
    if req.params.n_i > 256 {
        return Err("inner block length capped at 256 in the browser".into());
    }
    let stats = run_campaign(&req.params, trials, 0).map_err(|e| e.to_string())?;
    let (ci_lo, ci_hi) = stats.fer_ci();
    Ok(json!({
        "trials": stats.trials,
        "fer": stats.fer(),
        "fer_ci": [ci_lo, ci_hi],
        "ber": stats.ber(),
        "misdetect_rate": stats.misdetect_rate(),
        "frame_errors": stats.frame_errors,
        "misdetections": stats.misdetections,
        "unfilled_positions": stats.unfilled_positions,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_defaults_produce_monotone_fer() {
        let out = analysis_curve_impl("{}").unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let fer: Vec<f64> = v["fer"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(fer.len(), 13);
        assert!(fer.windows(2).all(|w| w[0] <= w[1] + 1e-12), "fer not monotone: {fer:?}");
        assert!(fer.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn demo_detects_correctly_without_noise() {
        let out = matched_decode_demo_impl(r#"{"delta": 0.0, "m": 8}"#).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["correct"], true);
        assert_eq!(v["segment_recovered"], true);
        assert_eq!(v["bit_flips"], 0);
        assert_eq!(v["metrics"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn demo_is_reproducible_per_trial() {
        let a = matched_decode_demo_impl(r#"{"trial": 5}"#).unwrap();
        let b = matched_decode_demo_impl(r#"{"trial": 5}"#).unwrap();
        let c = matched_decode_demo_impl(r#"{"trial": 6}"#).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn simulation_runs_and_reports() {
        let out = run_simulation_impl(r#"{"params": {"delta": 0.02}, "trials": 20}"#).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["trials"], 20);
        let fer = v["fer"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&fer));
    }

    #[test]
    fn invalid_requests_are_rejected() {
        assert!(analysis_curve_impl(r#"{"points": 1}"#).is_err());
        assert!(matched_decode_demo_impl(r#"{"m": 100}"#).is_err());
        assert!(run_simulation_impl(r#"{"trials": 50000}"#).is_err());
        assert!(run_simulation_impl("not json").is_err());
    }
}
