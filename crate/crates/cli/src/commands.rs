//! The four subcommands. Each writes its files under the output directory
//! and returns whether the run succeeded; errors bubble up for exit-code
//! mapping in `main`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ncg_ymh::action::{sectors, with_direct};
use ncg_ymh::clifford::{all_signatures, build_gammas};
use ncg_ymh::fluct::assemble_fluctuated;
use ncg_ymh::linalg::hermitian_eigenvalues;
use ncg_ymh::sampler::{histogram_of, records_to_csv, run_chain, summarize, ChainSummary, Ensemble, Histogram};
use ncg_ymh::suite::{run_signature, VerifyReport};
use ncg_ymh::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;

pub const VERIFY_REPORT: &str = "verify_report.json";
pub const ACTION_REPORT: &str = "action.json";
pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const HISTOGRAM_JSON: &str = "histogram.json";
pub const SAMPLES_CSV: &str = "samples.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const SAMPLE_HISTOGRAMS_JSON: &str = "histograms.json";

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Returns `true` iff every enforced identity passed.
pub fn verify(cfg: &RunConfig, all: bool) -> Result<bool> {
    cfg.validate()?;
    let sigs = if all { all_signatures() } else { vec![cfg.signature()?] };
    let mut suite = cfg.suite.clone();
    suite.seed = cfg.seed;
    let sections = sigs.par_iter().map(|s| run_signature(s, &suite)).collect::<Result<Vec<_>>>()?;
    let report = VerifyReport::new(cfg.seed, sections);
    let dir = out_dir(cfg)?;
    let path = write_json(&dir, VERIFY_REPORT, &report)?;
    for sec in &report.sections {
        let enforced = sec.checks.iter().filter(|c| !c.informational).count();
        let failed: Vec<&str> =
            sec.checks.iter().filter(|c| !c.pass && !c.informational).map(|c| c.name.as_str()).collect();
        println!(
            "{} {}: {}/{} identities pass{}",
            if sec.pass { "PASS" } else { "FAIL" },
            sec.signature,
            enforced - failed.len(),
            enforced,
            if failed.is_empty() { String::new() } else { format!(" (failed: {})", failed.join(", ")) }
        );
    }
    println!("report: {}", path.display());
    Ok(report.pass)
}

#[derive(Serialize)]
struct Positivity {
    s_ym: bool,
    s_h: bool,
    s_theta: bool,
}

#[derive(Serialize)]
struct ActionReport {
    signature: String,
    poly: Vec<f64>,
    s_ym: f64,
    s_h: f64,
    s_gh: f64,
    s_theta: f64,
    total_closed: f64,
    total_direct: Option<f64>,
    rest: Option<f64>,
    /// Relative gap between the closed and direct totals.
    relative_gap: Option<f64>,
    /// `null` when `a₂ < 0` or `a₄ < 0`, where no sign is guaranteed.
    positivity: Option<Positivity>,
}

pub fn action(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let f = cfg.polynomial()?;
    let gt = cfg.triple()?;
    let fl = cfg.fluctuation(&gt)?;
    let module = build_gammas(gt.sig())?;
    let br = with_direct(sectors(&gt, &fl, &f)?, &gt, &fl, &module, &f)?;
    let tol = 1e-10;
    let positivity = (f.a(2) >= 0.0 && f.a(4) >= 0.0).then(|| Positivity {
        s_ym: br.s_ym >= -tol,
        s_h: br.s_h >= -tol,
        s_theta: br.s_theta >= -tol,
    });
    let report = ActionReport {
        signature: gt.sig().label(),
        poly: f.coeffs.clone(),
        s_ym: br.s_ym,
        s_h: br.s_h,
        s_gh: br.s_gh,
        s_theta: br.s_theta,
        total_closed: br.total_closed,
        total_direct: br.total_direct,
        rest: br.rest,
        relative_gap: br.total_direct.map(|d| ncg_ymh::linalg::rel_scalar(br.total_closed, d)),
        positivity,
    };
    let path = write_json(&out_dir(cfg)?, ACTION_REPORT, &report)?;
    println!(
        "S_ym={:e} S_h={:e} S_gh={:e} S_theta={:e} total={:e} direct={:e}",
        br.s_ym,
        br.s_h,
        br.s_gh,
        br.s_theta,
        br.total_closed,
        br.total_direct.unwrap_or(f64::NAN)
    );
    println!("report: {}", path.display());
    Ok(())
}

pub fn spectrum(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let gt = cfg.triple()?;
    let fl = cfg.fluctuation(&gt)?;
    let module = build_gammas(gt.sig())?;
    let d = assemble_fluctuated(&gt, &fl, &module)?;
    let defect = ncg_ymh::linalg::self_adjoint_defect(&d);
    if defect > 1e-9 {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let ev = hermitian_eigenvalues(&d);
    let mut csv = String::from("index,eigenvalue\n");
    for (i, x) in ev.iter().enumerate() {
        writeln!(csv, "{i},{x}").expect("string write");
    }
    let dir = out_dir(cfg)?;
    fs::write(dir.join(SPECTRUM_CSV), csv)?;
    if let Some(bins) = cfg.output.histogram_bins {
        if bins == 0 {
            return Err(Error::InvalidConfig("histogram needs at least one bin".into()));
        }
        write_json(&dir, HISTOGRAM_JSON, &histogram_of(&ev, bins))?;
    }
    println!("{} eigenvalues written to {}", ev.len(), dir.join(SPECTRUM_CSV).display());
    Ok(())
}

#[derive(Serialize)]
struct SampleSummary {
    ensemble: Ensemble,
    #[serde(flatten)]
    chain: ChainSummary,
    /// Analytic `⟨Tr M²⟩ = N²/2`, self-test only.
    expected_s_total: Option<f64>,
}

#[derive(Serialize)]
struct StepHistogram<'a> {
    step: usize,
    #[serde(flatten)]
    histogram: &'a Histogram,
}

pub fn sample(cfg: &RunConfig, self_test: bool) -> Result<()> {
    cfg.validate()?;
    let sc = cfg.sampler_config(self_test)?;
    let gt = cfg.triple()?;
    let module = build_gammas(gt.sig())?;
    let out = run_chain(&sc, &gt, Some(&module))?;
    let dir = out_dir(cfg)?;
    fs::write(dir.join(SAMPLES_CSV), records_to_csv(&out.records))?;
    let nb = cfg.geometry.n_base as f64;
    let summary = SampleSummary {
        ensemble: sc.ensemble,
        chain: summarize(&out),
        expected_s_total: self_test.then_some(nb * nb / 2.0),
    };
    write_json(&dir, SUMMARY_JSON, &summary)?;
    if sc.histogram_bins.is_some() {
        let hs: Vec<StepHistogram> = out
            .records
            .iter()
            .filter_map(|r| r.histogram.as_ref().map(|h| StepHistogram { step: r.step, histogram: h }))
            .collect();
        write_json(&dir, SAMPLE_HISTOGRAMS_JSON, &hs)?;
    }
    let s = &summary.chain;
    println!(
        "{} samples, <S_total> = {:e} ± {:e}, acceptance {}",
        s.samples,
        s.means.s_total,
        s.std_errors.s_total,
        s.acceptance.map_or("n/a".to_string(), |a| format!("{a:.3}"))
    );
    Ok(())
}
