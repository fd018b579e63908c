use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::report::{median, summarize, with_suffix, write_rows, BenchRow, RecallRow, RunMetadata, SummaryRow};
use super::{BenchArgs, EmbedArgs, GenerateArgs, Generator, GridCell, InputArgs, KnnArgs, LdmArgs, RecallArgs, SweepArgs};
use crate::ann::{exact_knn, knn_in_embedding, recall_at_k, NeighborList};
use crate::datasets::{gen_hypersphere, gen_swiss_roll, load_any, sniff, write_dense, FileKind, LabeledDataset};
use crate::embed::{fit_ldm, fit_pca, Embedding, Method};
use crate::error::{Error, Result};

pub fn cmd_generate(a: &GenerateArgs) -> Result<LabeledDataset> {
    let ds = match a.kind {
        Generator::SwissRoll => gen_swiss_roll(a.n, a.noise, a.seed)?,
        Generator::Hypersphere => gen_hypersphere(a.n, a.ambient_dim, a.noise, a.seed)?,
    };
    let is_csv = a.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        write_dataset_csv(&a.out, &ds)?;
    } else {
        write_dense(&a.out, &ds)?;
    }
    let mut meta = RunMetadata::new("generate", a)?;
    meta.results = json!({
        "rows": ds.len(),
        "cols": ds.dim(),
        "labels": ds.labels.is_some(),
        "format": if is_csv { "csv" } else { "ldm-dense" },
    });
    meta.write(&a.out)?;
    Ok(ds)
}

fn write_dataset_csv(path: &Path, ds: &LabeledDataset) -> Result<()> {
    let mut out = String::new();
    for (i, row) in ds.data.rows_iter().enumerate() {
        let mut fields: Vec<String> = row.iter().map(f64::to_string).collect();
        if let Some(l) = &ds.labels {
            fields.push(l[i].to_string());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn load_input(input: &InputArgs) -> Result<(LabeledDataset, Vec<String>)> {
    let ds = load_any(&input.data, input.has_labels, input.limit)
        .map_err(|e| e.context(format!("loading {}", input.data.display())))?;
    let mut notes = vec![match sniff(&input.data)? {
        FileKind::Idx => "IDX pixels divided by 255 into [0, 1]".to_string(),
        FileKind::Dense => "dense binary values used as stored".to_string(),
        FileKind::Csv => "CSV values used as stored".to_string(),
    }];
    if let Some(n) = input.limit {
        notes.push(format!("first {} rows kept (limit {n})", ds.len()));
    }
    notes.push("no feature centering or scaling before the kernel; PCA centers internally".to_string());
    Ok((ds, notes))
}

fn fit(ds: &LabeledDataset, method: Method, dim: usize, seed: u64, ldm: &LdmArgs) -> Result<Embedding> {
    match method {
        Method::Pca => fit_pca(&ds.data, dim, seed),
        Method::Ldm | Method::LdmA => fit_ldm(&ds.data, &ldm.config(method, dim, seed)?),
    }
    .map_err(|e| e.context(format!("{method} fit with d = {dim}")))
}

pub fn cmd_embed(a: &EmbedArgs) -> Result<Embedding> {
    let (ds, notes) = load_input(&a.input)?;
    let started = Instant::now();
    let e = fit(&ds, a.method, a.dim, a.seed, &a.ldm)?;
    let fit_seconds = started.elapsed().as_secs_f64();

    let mut text = String::new();
    let mut header: Vec<String> = (1..=e.dim()).map(|j| format!("x{j}")).collect();
    if ds.labels.is_some() {
        header.push("label".into());
    }
    text.push_str(&header.join(","));
    text.push('\n');
    for (i, row) in e.coords.rows_iter().enumerate() {
        let mut fields: Vec<String> = row.iter().map(f64::to_string).collect();
        if let Some(l) = &ds.labels {
            fields.push(l[i].to_string());
        }
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    std::fs::write(&a.out, text).map_err(|err| Error::io(&a.out, err))?;

    let eig_path = with_suffix(&a.out, ".eigenvalues.csv");
    let mut eig = String::from("index,eigenvalue\n");
    for (i, l) in e.eigenvalues.iter().enumerate() {
        eig.push_str(&format!("{},{l}\n", i + 1));
    }
    std::fs::write(&eig_path, eig).map_err(|err| Error::io(&eig_path, err))?;

    let mut meta = RunMetadata::new("embed", a)?;
    meta.preprocessing = notes;
    meta.results = json!({
        "rows": e.len(),
        "cols": e.dim(),
        "method": e.method,
        "epsilon": e.epsilon,
        "diffusion_time": e.diffusion_time,
        "dropped_trivial": e.dropped_trivial,
        "eigenvalues": e.eigenvalues,
        "fit_seconds": fit_seconds,
    });
    meta.write(&a.out)?;
    Ok(e)
}

pub fn cmd_knn(a: &KnnArgs) -> Result<NeighborList> {
    let (ds, notes) = load_input(&a.input)?;
    let (nl, space) = match (a.method, a.dim) {
        (Some(m), Some(d)) => (knn_in_embedding(&fit(&ds, m, d, a.seed, &a.ldm)?, a.k)?, format!("{m} d={d}")),
        (None, _) => (exact_knn(&ds.data, a.k)?, "ambient".to_string()),
        (Some(_), None) => return Err(Error::invalid("--method needs --dim")),
    };
    nl.save_csv(&a.out)?;
    let mut meta = RunMetadata::new("knn", a)?;
    meta.preprocessing = notes;
    meta.results = json!({ "rows": nl.n(), "k": nl.k(), "space": space });
    meta.write(&a.out)?;
    Ok(nl)
}

/// PCA and LDM recall against exact ambient neighbors for each latent
/// dimension in `dims`. Both fits use `seed` for the Lanczos start vector.
pub fn recall_grid(
    ds: &LabeledDataset,
    dims: &[usize],
    k: usize,
    method: Method,
    ldm: &LdmArgs,
    seed: u64,
) -> Result<Vec<RecallRow>> {
    if method == Method::Pca {
        return Err(Error::invalid("recall compares PCA against ldm or ldm-a; got pca"));
    }
    let exact = exact_knn(&ds.data, k)?;
    let (n, dim) = ds.data.shape();
    dims.iter()
        .map(|&d| {
            let t0 = Instant::now();
            let pca = fit(ds, Method::Pca, d, seed, ldm)?;
            let t1 = Instant::now();
            let diff = fit(ds, method, d, seed, ldm)?;
            let t2 = Instant::now();
            let nn_pca = knn_in_embedding(&pca, k)?;
            let nn_ldm = knn_in_embedding(&diff, k)?;
            let t3 = Instant::now();
            let recall_pca = recall_at_k(&exact, &nn_pca)?;
            let recall_ldm = recall_at_k(&exact, &nn_ldm)?;
            Ok(RecallRow {
                dataset: ds.name.clone(),
                seed,
                n,
                dim,
                gamma: n as f64 / dim as f64,
                d,
                k,
                ldm_method: method.to_string(),
                recall_pca,
                recall_ldm,
                recall_diff: recall_pca - recall_ldm,
                recall_pca_vs_ldm: recall_at_k(&nn_pca, &nn_ldm)?,
                fit_seconds_pca: (t1 - t0).as_secs_f64(),
                fit_seconds_ldm: (t2 - t1).as_secs_f64(),
                knn_seconds: (t3 - t2).as_secs_f64(),
            })
        })
        .collect()
}

pub fn cmd_recall(a: &RecallArgs) -> Result<Vec<RecallRow>> {
    let (ds, notes) = load_input(&a.input)?;
    let rows = recall_grid(&ds, &a.dims, a.k, a.method, &a.ldm, a.seed)?;
    write_rows(a.out.as_deref(), &rows, a.append)?;
    if let Some(out) = &a.out {
        let mut meta = RunMetadata::new("recall", a)?;
        meta.preprocessing = notes;
        meta.results = json!({ "rows": rows.len(), "n": ds.len(), "dim": ds.dim() });
        meta.write(out)?;
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<RecallRow>,
    pub summary: Vec<SummaryRow>,
}

fn sweep_cells(a: &SweepArgs) -> Result<Vec<GridCell>> {
    let mut cells = a.grid.clone();
    for &dim in &a.ambient_dims {
        for &n in &a.ns {
            cells.push(GridCell { n, dim });
        }
        for &g in &a.gammas {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::invalid(format!("gamma must be positive, got {g}")));
            }
            cells.push(GridCell {
                n: (g * dim as f64).round() as usize,
                dim,
            });
        }
    }
    if cells.is_empty() {
        return Err(Error::invalid("empty sweep: give --grid, or --ambient-dims with --ns or --gammas"));
    }
    Ok(cells)
}

/// Runs every `(cell, repeat)` job on the current rayon pool. Job `i`, counted
/// in output order, samples and solves with seed `base + i`.
pub fn cmd_sweep_gamma(a: &SweepArgs) -> Result<SweepOutput> {
    if a.seeds == 0 {
        return Err(Error::invalid("--seeds must be at least 1"));
    }
    let cells = sweep_cells(a)?;
    let jobs: Vec<(GridCell, u64)> = cells
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c, a.seeds))
        .enumerate()
        .map(|(i, c)| (c, a.seed + i as u64))
        .collect();

    let rows: Vec<RecallRow> = jobs
        .par_iter()
        .map(|&(cell, seed)| {
            let ds = gen_hypersphere(cell.n, cell.dim, a.noise, seed)?;
            let d = a.dim.unwrap_or(cell.dim.saturating_sub(1));
            let mut rows = recall_grid(&ds, &[d], a.k, a.method, &a.ldm, seed)
                .map_err(|e| e.context(format!("sweep cell N={} D={} seed={seed}", cell.n, cell.dim)))?;
            Ok(rows.remove(0))
        })
        .collect::<Result<_>>()?;
    let summary = summarize(&rows);

    write_rows(a.out.as_deref(), &rows, false)?;
    if let Some(out) = &a.out {
        write_rows(Some(&with_suffix(out, ".summary.csv")), &summary, false)?;
        let mut meta = RunMetadata::new("sweep-gamma", a)?;
        meta.preprocessing = vec!["hypersphere samples used as generated".to_string()];
        meta.results = json!({
            "cells": cells,
            "jobs": jobs.len(),
            "seeds": jobs.iter().map(|j| j.1).collect::<Vec<_>>(),
        });
        meta.write(out)?;
    } else {
        let mut stderr = std::io::stderr().lock();
        for s in &summary {
            let _ = writeln!(
                stderr,
                "N={} D={} gamma={} diff={:+.4}±{:.4}",
                s.n, s.dim, s.gamma, s.recall_diff_mean, s.recall_diff_std
            );
        }
    }
    Ok(SweepOutput { rows, summary })
}

/// Times `repeats` fits per N on hypersphere data. Sampling is not timed.
pub fn cmd_bench(a: &BenchArgs) -> Result<Vec<BenchRow>> {
    if a.repeats == 0 {
        return Err(Error::invalid("--repeats must be at least 1"));
    }
    let mut rows: Vec<BenchRow> = Vec::with_capacity(a.ns.len());
    for &n in &a.ns {
        let ds = gen_hypersphere(n, a.ambient_dim, a.noise, a.seed)?;
        let samples: Vec<f64> = (0..a.repeats)
            .map(|_| {
                let t = Instant::now();
                fit(&ds, a.method, a.dim, a.seed, &a.ldm).map(|_| t.elapsed().as_secs_f64())
            })
            .collect::<Result<_>>()?;
        let med = median(&samples);
        rows.push(BenchRow {
            n,
            dim: a.ambient_dim,
            d: a.dim,
            method: a.method.to_string(),
            repeats: a.repeats,
            median_seconds: med,
            min_seconds: samples.iter().copied().fold(f64::INFINITY, f64::min),
            ratio_to_previous: rows.last().map(|p| med / p.median_seconds),
            samples: samples.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
        });
    }
    write_rows(a.out.as_deref(), &rows, false)?;
    if let Some(out) = &a.out {
        let mut meta = RunMetadata::new("bench", a)?;
        meta.preprocessing = vec!["hypersphere samples used as generated".to_string()];
        meta.results = json!({ "rows": rows.len() });
        meta.write(out)?;
    }
    Ok(rows)
}
