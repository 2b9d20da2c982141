//! WebAssembly bindings for the browser demo. Every entry point takes JSON
//! documents in the CLI formats and returns a JSON string; failures come back
//! as `{"error": name, "message": text}`.

use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::*;

use credal_core::io::{self, DocError, NumberFormat};
use credal_core::{
    check_countable_coherence, compare, find_dominator, CoherenceOptions, DominanceOptions, NumericMode,
};

fn mode(rational: bool) -> NumericMode {
    if rational {
        NumericMode::Rational
    } else {
        NumericMode::Float
    }
}

fn doc_error(e: DocError) -> Json {
    match e {
        DocError::Parse { location, message } => json!({ "error": "parse", "message": format!("{location}: {message}") }),
        DocError::Invalid(e) => json!({ "error": e.name(), "message": e.to_string() }),
    }
}

fn finish(r: Result<Json, Json>) -> String {
    serde_json::to_string_pretty(&r.unwrap_or_else(|e| e)).expect("json")
}

macro_rules! tri {
    ($e:expr) => {
        $e.map_err(|e| json!({ "error": e.name(), "message": e.to_string() }))?
    };
}

/// Coherence verdict for a credence (`{"values": [...]}`) on a space.
#[wasm_bindgen]
pub fn check_coherence(space: &str, credence: &str, rational: bool) -> String {
    finish((|| {
        let space = io::parse_space(space).map_err(doc_error)?;
        let c = io::parse_credence(credence).map_err(doc_error)?.credence;
        let fmt = NumberFormat::new(mode(rational));
        let v = tri!(check_countable_coherence(&c, &space, &CoherenceOptions { mode: fmt.mode, ..Default::default() }));
        Ok(io::coherence_to_json(&v, &fmt))
    })())
}

/// Dominating credence for `credence`: its projection onto the coherent
/// credences when it is incoherent, itself otherwise.
#[wasm_bindgen]
pub fn repair(space: &str, credence: &str, measure: &str, rational: bool) -> String {
    finish((|| {
        let space = io::parse_space(space).map_err(doc_error)?;
        let c = io::parse_credence(credence).map_err(doc_error)?.credence;
        let m = io::parse_measure(measure).map_err(doc_error)?;
        let fmt = NumberFormat::new(mode(rational));
        let opts = DominanceOptions { mode: fmt.mode, ..Default::default() };
        let r = tri!(find_dominator(&c, &m, &space, &opts));
        let mut out = io::dominance_to_json(&r.verdict, &fmt);
        out["case"] = json!(r.case);
        out["dominator"] = io::credence_to_json(&r.dominator, &fmt)["values"].clone();
        if let Some(pr) = &r.projection {
            out["gap"] = fmt.value(&pr.gap);
            out["pythagorean_worst_slack"] = fmt.float(pr.pythagorean.worst_slack);
        }
        Ok(out)
    })())
}

/// Per-world scores of `c` and `d` and whether `d` dominates `c`.
#[wasm_bindgen]
pub fn compare_credences(space: &str, c: &str, d: &str, measure: &str, rational: bool) -> String {
    finish((|| {
        let space = io::parse_space(space).map_err(doc_error)?;
        let c = io::parse_credence(c).map_err(doc_error)?.credence;
        let d = io::parse_credence(d).map_err(doc_error)?.credence;
        let m = io::parse_measure(measure).map_err(doc_error)?;
        let fmt = NumberFormat::new(mode(rational));
        let opts = DominanceOptions { mode: fmt.mode, ..Default::default() };
        let v = tri!(compare(&c, &d, &m, &space, &opts));
        Ok(io::dominance_to_json(&v, &fmt))
    })())
}
