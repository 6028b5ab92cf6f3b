//! `fluctuate`: runs a sweep into an output directory, resuming from a
//! previous run whose manifest hash matches.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use lattice_spectra::fluct::{
    content_hash, fit_exponent, gnuplot_script, parse_records_csv, records_to_csv, run_records, target_exponent,
    ExperimentRecord, SweepSpec, RECORDS_VERSION,
};
use lattice_spectra::io::write_atomic;
use lattice_spectra::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{emit, Global};

pub const RECORDS_FILE: &str = "records.csv";
pub const PLOT_FILE: &str = "plot.gp";
pub const MANIFEST_FILE: &str = "manifest.json";
/// Wall-clock seconds per `N`; kept apart so the records stay reproducible.
pub const TIMINGS_FILE: &str = "timings.json";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub records_version: String,
    pub parameters: SweepSpec,
    pub seed: u64,
    pub input: String,
    pub outputs: Vec<String>,
    /// SHA-256 over everything that determines the records.
    pub content_hash: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

fn manifest_hash(spec: &SweepSpec, seed: u64) -> Result<String> {
    let canonical = serde_json::to_string(&json!({
        "records_version": RECORDS_VERSION,
        "spec": spec,
        "seed": seed,
    }))?;
    Ok(content_hash(canonical.as_bytes()))
}

/// Rows of a previous run with the same hash, keyed by `N`. Anything
/// unreadable simply means nothing is resumed.
fn previous_rows(out: &Path, hash: &str) -> (BTreeMap<usize, ExperimentRecord>, BTreeMap<usize, f64>) {
    let manifest: Option<RunManifest> = fs::read_to_string(out.join(MANIFEST_FILE))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    if manifest.is_none_or(|m| m.content_hash != hash) {
        return Default::default();
    }
    let rows = match fs::read_to_string(out.join(RECORDS_FILE)).map(|t| parse_records_csv(&t)) {
        Ok(Ok(rows)) => rows,
        _ => return Default::default(),
    };
    let timings = fs::read_to_string(out.join(TIMINGS_FILE))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok())
        .unwrap_or_default();
    (rows.into_iter().filter(|r| r.is_ok()).map(|r| (r.n, r)).collect(), timings)
}

pub fn fluctuate(g: &Global, spec_path: &Path, out: &Path, fresh: bool) -> Result<()> {
    let spec: SweepSpec = serde_json::from_str(&fs::read_to_string(spec_path)?)?;
    if let Some(d) = g.dim {
        if d != spec.d {
            return Err(Error::DimensionMismatch { expected: d, found: spec.d });
        }
    }
    spec.validate()?;
    fs::create_dir_all(out)?;
    let hash = manifest_hash(&spec, g.seed)?;
    let (mut done, mut timings) = if fresh { Default::default() } else { previous_rows(out, &hash) };
    let ns = spec.n.values();
    done.retain(|n, _| ns.contains(n));
    let todo: Vec<usize> = ns.iter().copied().filter(|n| !done.contains_key(n)).collect();
    let resumed = done.len();
    if resumed > 0 {
        log::info!("resuming: {resumed} of {} rows already present", ns.len());
    }
    let sweep = run_records(&spec, &todo)?;
    for (r, t) in sweep.records.into_iter().zip(sweep.wall_times) {
        timings.insert(r.n, t);
        done.insert(r.n, r);
    }
    let records: Vec<ExperimentRecord> = ns.iter().map(|n| done.remove(n).expect("every N computed")).collect();
    timings.retain(|n, _| ns.contains(n));

    write_atomic(&out.join(RECORDS_FILE), records_to_csv(&records)?.as_bytes())?;
    write_atomic(&out.join(PLOT_FILE), gnuplot_script(&records, spec.d, RECORDS_FILE).as_bytes())?;
    write_atomic(&out.join(TIMINGS_FILE), serde_json::to_string_pretty(&timings)?.as_bytes())?;
    let manifest = RunManifest {
        command: "fluctuate".into(),
        records_version: RECORDS_VERSION.into(),
        parameters: spec.clone(),
        seed: g.seed,
        input: spec_path.display().to_string(),
        outputs: [RECORDS_FILE, PLOT_FILE, MANIFEST_FILE, TIMINGS_FILE].map(String::from).to_vec(),
        content_hash: hash,
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    };
    write_atomic(&out.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?.as_bytes())?;

    let failures: Vec<usize> = records.iter().filter(|r| !r.is_ok()).map(|r| r.n).collect();
    if !failures.is_empty() {
        eprintln!("warning: {} rows failed (N = {failures:?}); see the failures column", failures.len());
    }
    let fit = fit_exponent(&records);
    emit::print(
        &json!({
            "rows": records.len(),
            "computed": todo.len(),
            "resumed": resumed,
            "failures": failures.len(),
            "slope": fit.map(|f| f.slope),
            "target_slope": target_exponent(spec.d),
            "out": out.display().to_string(),
        }),
        g.format,
    )
}
