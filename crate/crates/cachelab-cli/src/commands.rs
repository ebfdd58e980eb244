//! Command implementations. Every command is deterministic given its flags
//! and input files; anything random takes a mandatory seed.

use std::fs;
use std::path::Path;

use cachelab::analysis::{
    popularity_histogram, reuse_distance, space_overhead, traffic_counts, OverheadPolicy, RdMode,
};
use cachelab::sim::{run, sweep_csv, SimConfig, Topology};
use cachelab::workload::trace::{load_trace, save_trace};
use cachelab::workload::{
    chunkify, pattern_stream, profile_stream, zipf_stream, ChunkifySpec, PatternSpec, ProfileSpec,
    RequestStream, ZipfSpec,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::CliError;

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    // Write whole files via a temp name so an interrupted run never leaves
    // a half-written result behind.
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| data_err(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn distinct_chunks(stream: &RequestStream) -> usize {
    let mut ids: Vec<u64> = stream.chunks().map(|c| c.0).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

fn emit_trace(stream: &RequestStream, out: &Path) -> Result<(), CliError> {
    save_trace(stream, out).map_err(|e| data_err(format!("{}: {e}", out.display())))?;
    println!(
        "wrote {}: {} requests, {} distinct chunks",
        out.display(),
        stream.len(),
        distinct_chunks(stream)
    );
    Ok(())
}

// ---- generate -----------------------------------------------------------------

pub fn generate_zipf(
    alpha: f64,
    contents: u64,
    requests: u64,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let stream =
        zipf_stream(&ZipfSpec { n_contents: contents, alpha, n_requests: requests, seed })
            .map_err(data_err)?;
    emit_trace(&stream, out)
}

pub fn generate_pattern(spec: &PatternSpec, out: &Path) -> Result<(), CliError> {
    emit_trace(&pattern_stream(spec), out)
}

#[allow(clippy::too_many_arguments)]
pub fn generate_chunked(
    alpha: f64,
    contents: u64,
    requests: u64,
    seed: u64,
    chunk_kb: f64,
    bitrate_kbps: f64,
    content_kb: f64,
    arrivals_per_sec: u64,
    out: &Path,
) -> Result<(), CliError> {
    let content =
        zipf_stream(&ZipfSpec { n_contents: contents, alpha, n_requests: requests, seed })
            .map_err(data_err)?;
    let mut spec = ChunkifySpec::new(
        (chunk_kb * 1000.0).round() as u64,
        (bitrate_kbps * 1000.0).round() as u64,
        (content_kb * 1000.0).round() as u64,
    );
    spec.arrivals_per_sec = arrivals_per_sec;
    println!("chunk rate: {} chunks/s", spec.chunks_per_second());
    let stream = chunkify(&content, &spec).map_err(data_err)?.reindexed();
    emit_trace(&stream, out)
}

pub fn generate_profile(
    total: u64,
    unique: u64,
    repeated: u64,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let stream =
        profile_stream(&ProfileSpec { total, unique, repeated, seed }).map_err(data_err)?;
    emit_trace(&stream, out)
}

// ---- simulate -----------------------------------------------------------------

fn cell_name(policy: &str, capacity: usize, topology: &Topology) -> String {
    let policy = policy.replace(':', "-");
    let topology = topology.to_string().replace(':', "-");
    format!("{policy}_{capacity}_{topology}")
}

/// Runs every (policy, capacity) cell of the experiment, writing one JSON
/// and one CSV per cell (plus a dynamics CSV where sampled) and a summary
/// table over all cells.
pub fn simulate(config: &ExperimentConfig) -> Result<(), CliError> {
    let stream = config.stream()?;
    fs::create_dir_all(&config.out_dir)
        .map_err(|e| data_err(format!("{}: {e}", config.out_dir.display())))?;

    let cells: Vec<(cachelab::policy::PolicySpec, usize)> = config
        .policies
        .iter()
        .flat_map(|p| config.capacities.iter().map(move |&c| (p.clone(), c)))
        .collect();

    let reports = cells
        .par_iter()
        .map(|(policy, capacity)| {
            let sim = SimConfig {
                policy: policy.clone(),
                capacity: *capacity,
                topology: config.topology,
                dynamics_window: config
                    .dynamics_window
                    .filter(|_| policy.has_target_ratio() && config.topology == Topology::Single),
            };
            run(&sim, &stream).map_err(data_err)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    for report in &reports {
        let base = config.out_dir.join(cell_name(&report.policy, report.capacity, &config.topology));
        write_file(&base.with_extension("json"), &report.to_json())?;
        write_file(&base.with_extension("csv"), &report.nodes_csv())?;
        if !report.dynamics.is_empty() {
            let path = config.out_dir.join(format!(
                "{}_dynamics.csv",
                cell_name(&report.policy, report.capacity, &config.topology)
            ));
            write_file(&path, &report.dynamics_csv())?;
        }
        println!(
            "{} c={}: hit rate {:.6}",
            report.policy, report.capacity, report.aggregate.non_coop_total
        );
    }
    write_file(&config.out_dir.join("summary.csv"), &sweep_csv(&reports))?;
    Ok(())
}

// ---- analyze ------------------------------------------------------------------

fn load(path: &Path) -> Result<RequestStream, CliError> {
    load_trace(path).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

pub fn analyze_rd_cdf(trace: &Path, mode: RdMode, out: &Path) -> Result<(), CliError> {
    let stream = load(trace)?;
    let profile = reuse_distance(&stream, mode);
    let mut csv = String::from("rd,cum_fraction\n");
    for (rd, frac) in profile.cdf() {
        csv.push_str(&format!("{rd},{frac}\n"));
    }
    write_file(out, &csv)?;
    println!(
        "wrote {}: {} finite distances of {} requests",
        out.display(),
        profile.finite_count(),
        stream.len()
    );
    Ok(())
}

pub fn analyze_popularity(trace: &Path, out: &Path) -> Result<(), CliError> {
    let stream = load(trace)?;
    let table = popularity_histogram(&stream);
    let mut csv = String::from("rank,chunk,count\n");
    for (rank, (chunk, count)) in table.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", rank + 1, chunk, count));
    }
    write_file(out, &csv)?;
    println!("wrote {}: {} distinct chunks", out.display(), table.len());
    Ok(())
}

pub fn analyze_beta_gamma(trace: &Path, window: usize, out: Option<&Path>) -> Result<(), CliError> {
    let stream = load(trace)?;
    let profile = traffic_counts(&stream, window).map_err(data_err)?;
    if let Some(out) = out {
        let mut csv = String::from("window_start,window_len,h1,h2,h3,beta,gamma\n");
        for w in &profile.windows {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                w.window_start, w.window_len, w.h1, w.h2, w.h3, w.beta, w.gamma
            ));
        }
        write_file(out, &csv)?;
    }
    println!("pooled beta={} gamma={}", profile.pooled_beta, profile.pooled_gamma);
    Ok(())
}

pub fn analyze_overhead(
    policy: &str,
    entries: u64,
    pointer_bits: u32,
    counter_bits: u32,
    ghosts: u64,
) -> Result<(), CliError> {
    let policy = OverheadPolicy::parse(policy)
        .ok_or_else(|| CliError::Usage(format!("unknown overhead policy {policy:?}")))?;
    let bits = space_overhead(policy, entries, pointer_bits, counter_bits, ghosts)
        .map_err(data_err)?;
    println!("{bits}");
    Ok(())
}

pub fn simulate_from_path(path: &Path) -> Result<(), CliError> {
    let config = ExperimentConfig::load(path)?;
    simulate(&config)
}
