//! WebAssembly bindings for the in-browser demo page.
//!
//! Every export is a thin JSON-string adapter over the core crate: inputs
//! and outputs use the same document and report schemas as the command-line
//! tool, so the page stays a plain render layer and all numerics run inside
//! the wasm module. Results are deterministic in (target, n, seed), exactly
//! as on the command line.
//!
//! The `*_impl` functions hold the actual logic and return the core error
//! type so they stay testable on native targets; the `#[wasm_bindgen]`
//! exports only convert errors into JavaScript exceptions.

use wasm_bindgen::prelude::*;

use psdblocks::blocks::property_profile;
use psdblocks::docfmt::BlockDoc;
use psdblocks::families::FamilyName;
use psdblocks::fixtures::{self, FixtureId};
use psdblocks::numerics::ToleranceConfig;
use psdblocks::search::{self, Ensemble, GeneratorSpec};
use psdblocks::Error;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Classify a block-matrix document against the six spectral properties.
///
/// Takes a document as JSON and returns `{"region": ..., "profile": ...}`,
/// the same report `psdblocks classify --json` writes.
#[wasm_bindgen]
pub fn classify(doc: &str) -> Result<String, JsError> {
    classify_impl(doc).map_err(JsError::from)
}

fn classify_impl(doc: &str) -> Result<String, Error> {
    let tol = tol();
    let doc = BlockDoc::from_json(doc)?;
    let block = doc.to_block(&tol)?;
    let profile = property_profile(&block, &tol)?;
    Ok(serde_json::json!({
        "region": profile.region_key(),
        "profile": profile,
    })
    .to_string())
}

/// Construct a block matrix and return its JSON document.
///
/// `target` is either a family name (a seeded random member is drawn, with
/// `n` the block size) or a pinned fixture name (the exact stored matrix is
/// returned and `n` and `seed` are ignored).
#[wasm_bindgen]
pub fn construct(target: &str, n: usize, seed: u64) -> Result<String, JsError> {
    construct_impl(target, n, seed).map_err(JsError::from)
}

fn construct_impl(target: &str, n: usize, seed: u64) -> Result<String, Error> {
    let block = if let Some(family) = FamilyName::parse(target) {
        let spec = GeneratorSpec::new(Ensemble::Family(family), n, seed);
        search::sample_block_at(&spec, 0, &tol())?
    } else if let Some(fixture) = FixtureId::parse(target) {
        fixtures::build(fixture, &tol())?
    } else {
        return Err(Error::UnsupportedGenerator(format!(
            "no family or fixture named `{target}`"
        )));
    };
    Ok(BlockDoc::from_block(&block).to_json())
}

/// Run a region census over `count` seeded draws and return the report JSON.
///
/// `ensemble` accepts the same names as the command line, including the
/// `family:` prefix for family draws.
#[wasm_bindgen]
pub fn census(ensemble: &str, n: usize, count: u32, seed: u64) -> Result<String, JsError> {
    census_impl(ensemble, n, count, seed).map_err(JsError::from)
}

fn census_impl(ensemble: &str, n: usize, count: u32, seed: u64) -> Result<String, Error> {
    let ensemble: Ensemble = ensemble.parse()?;
    let spec = GeneratorSpec::new(ensemble, n, seed);
    let report = search::census(&spec, u64::from(count), &tol())?;
    // Through `Value` so key order matches the CLI's JSON reports.
    let value = serde_json::to_value(&report).expect("census reports always serialize");
    Ok(value.to_string())
}

/// Names the page can offer in its pickers: families and fixtures for
/// `construct`, ensembles for `census`.
#[wasm_bindgen]
pub fn catalog() -> String {
    let families: Vec<&str> = FamilyName::ALL.iter().map(|f| f.name()).collect();
    let fixture_names: Vec<&str> = FixtureId::ALL.iter().map(|f| f.name()).collect();
    let ensembles: Vec<String> = Ensemble::all().into_iter().map(Ensemble::name).collect();
    serde_json::json!({
        "families": families,
        "fixtures": fixture_names,
        "ensembles": ensembles,
    })
    .to_string()
}
