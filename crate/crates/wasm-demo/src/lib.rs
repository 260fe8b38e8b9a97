//! Browser bindings: each entry point takes a system config as JSON text and
//! returns JSON text, or throws a string error.

use serde_json::json;
use sharedcache::delivery::{self, Scheme};
use sharedcache::model::{System, SystemSpec};
use sharedcache::sim::{rate_table, run_session, ChannelConfig};
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

/// Accepts the CLI config format; its `options` block is ignored here.
fn system(config: &str) -> Result<System, String> {
    let mut value: serde_json::Value = serde_json::from_str(config).map_err(|e| e.to_string())?;
    if let Some(obj) = value.as_object_mut() {
        obj.remove("options");
    }
    SystemSpec::from_json(&value.to_string())
        .and_then(|s| s.validate())
        .map_err(|e| e.to_string())
}

fn scheme(name: &str) -> Result<Scheme, String> {
    match name {
        "sc" | "sc-worst" => Ok(Scheme::ScWorst),
        "improved" => Ok(Scheme::Improved),
        other => Err(format!("unknown scheme `{other}`")),
    }
}

/// Plan plus its human-readable log.
pub fn plan(config: &str, scheme_name: &str) -> Out {
    let sys = system(config)?;
    let d = sys.demands().map_err(|e| e.to_string())?;
    let plan = delivery::plan(scheme(scheme_name)?, &sys.config, &sys.association, d)
        .map_err(|e| e.to_string())?;
    let value = json!({
        "log": plan.log_lines(),
        "transmissions": plan.len(),
        "rate": plan.rate().to_string(),
        "rounds": plan.round_counts(),
        "plan": plan.to_wire(),
    });
    Ok(value.to_string())
}

/// Rate rows and envelope vertices per series.
pub fn rates(config: &str, delta: usize) -> Out {
    let sys = system(config)?;
    let table = rate_table(&sys.config, &sys.association, sys.demands.as_ref(), delta)
        .map_err(|e| e.to_string())?;
    let rows: Vec<_> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "gamma": *r.gamma.numer() as f64 / *r.gamma.denom() as f64,
                "scheme": r.scheme.to_string(),
                "t": r.t,
                "transmissions": r.transmissions,
                "subfiles": r.subfiles,
                "coded_length": r.coded.upper,
                "predicted": r.predicted,
            })
        })
        .collect();
    let envelopes: Vec<_> = table
        .envelopes
        .iter()
        .map(|(s, series, env)| json!({"scheme": s.to_string(), "series": series, "vertices": env.vertices}))
        .collect();
    Ok(json!({"rows": rows, "envelopes": envelopes, "csv": table.to_csv()}).to_string())
}

/// One exhaustive error-correcting session.
pub fn simulate(config: &str, scheme_name: &str, delta: usize, seed: u64) -> Out {
    let sys = system(config)?;
    let d = sys.demands().map_err(|e| e.to_string())?;
    let report = run_session(
        &sys.config,
        &sys.association,
        d,
        scheme(scheme_name)?,
        ChannelConfig::exhaustive(delta),
        seed,
    )
    .map_err(|e| e.to_string())?;
    Ok(report.to_json())
}

#[wasm_bindgen(js_name = plan)]
pub fn plan_js(config: &str, scheme: &str) -> Result<String, JsValue> {
    plan(config, scheme).map_err(Into::into)
}

#[wasm_bindgen(js_name = rates)]
pub fn rates_js(config: &str, delta: u32) -> Result<String, JsValue> {
    rates(config, delta as usize).map_err(Into::into)
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate_js(config: &str, scheme: &str, delta: u32, seed: u32) -> Result<String, JsValue> {
    simulate(config, scheme, delta as usize, seed as u64).map_err(Into::into)
}
