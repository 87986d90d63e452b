//! Subcommand execution: resonance caching, lifetime evaluation and export.

use std::path::Path;

use anyhow::{Context, Result};
use log::{info, warn};
use msac_core::analysis::{analyze_resonances, CouplingAnalysis, ResonanceSet};
use msac_core::approx::FgrDensities;
use msac_core::model::adiabatic_point;
use msac_core::tdse::NormTrace;
use msac_core::tidse::{scan_resonances, transfer_resonances, ResonanceRecord};
use msac_core::{LifetimeReport, Method, Representation};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::store::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Scan,
    Lifetimes,
    Tdse,
    Fgr,
    Lz,
    Sweep,
    Export,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Scan => "scan",
            Task::Lifetimes => "lifetimes",
            Task::Tdse => "tdse",
            Task::Fgr => "fgr",
            Task::Lz => "lz",
            Task::Sweep => "sweep",
            Task::Export => "export",
        }
    }

    /// Methods run when the configuration names none.
    pub fn default_methods(self) -> Vec<Method> {
        match self {
            Task::Scan | Task::Export => Vec::new(),
            Task::Lifetimes => Method::TIDSE.to_vec(),
            Task::Tdse => vec![Method::NadTdse, Method::AdTdse],
            Task::Fgr => vec![Method::Fgr],
            Task::Lz => vec![Method::Lz],
            Task::Sweep => Method::ALL.to_vec(),
        }
    }
}

/// Sampling step of exported profiles; finer solver grids are decimated to it.
const PROFILE_STEP: f64 = 0.01;

#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub cached: usize,
}

/// Resonance table of one coupling, with the bytes of its cache file.
struct Resonances {
    set: ResonanceSet,
    cache_bytes: Option<Vec<u8>>,
    from_cache: bool,
}

fn cache_name(v: f64) -> String {
    format!("{CACHE_DIR}/V{v}.csv")
}

fn cache_file(hash: &str, records: &[&ResonanceRecord]) -> Result<Vec<u8>> {
    let rows: Vec<ResonanceRow> = records.iter().map(|r| ResonanceRow::from(*r)).collect();
    let mut bytes = format!("# hash={hash}\n").into_bytes();
    bytes.extend(csv_bytes(&rows, RESONANCE_COLUMNS)?);
    Ok(bytes)
}

fn read_cache(path: &Path, hash: &str) -> Result<Option<Vec<ResonanceRecord>>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let stored = text.lines().next().and_then(|l| l.strip_prefix("# hash=")).unwrap_or("");
    if stored != hash {
        warn!("{}: settings changed since it was written, recomputing", path.display());
        return Ok(None);
    }
    let rows: Vec<ResonanceRow> = read_csv(path)?;
    Ok(Some(rows.iter().map(ResonanceRecord::try_from).collect::<Result<_>>()?))
}

fn resonances(cfg: &RunConfig, v: f64) -> Result<Resonances> {
    let hash = cfg.resonance_hash(v);
    let path = cfg.out.join(cache_name(v));
    if let Some(records) = read_cache(&path, &hash)? {
        info!("V = {v}: {} resonances loaded from {}", records.len(), path.display());
        let (adiabatic, diabatic): (Vec<_>, Vec<_>) =
            records.into_iter().partition(|r| r.representation == Representation::Adiabatic);
        let bytes = std::fs::read(&path)?;
        let set = ResonanceSet { v, adiabatic, diabatic, diabatic_error: None };
        return Ok(Resonances { set, cache_bytes: Some(bytes), from_cache: true });
    }
    info!("V = {v}: scanning resonances");
    let solver = &cfg.analysis.solver;
    let adiabatic = scan_resonances(v, Representation::Adiabatic, solver)
        .with_context(|| format!("resonance scan at V = {v}"))?;
    let (diabatic, diabatic_error) = match transfer_resonances(&adiabatic, Representation::Diabatic, solver) {
        Ok(d) => (d, None),
        Err(e) => {
            warn!("V = {v}: diabatic refinement failed: {e}");
            (Vec::new(), Some(e.to_string()))
        }
    };
    // a partial table is not worth reusing
    let cache_bytes = match diabatic_error {
        None => Some(cache_file(&hash, &adiabatic.iter().chain(&diabatic).collect::<Vec<_>>())?),
        Some(_) => None,
    };
    let set = ResonanceSet { v, adiabatic, diabatic, diabatic_error };
    Ok(Resonances { set, cache_bytes, from_cache: false })
}

fn lifetime_rows(report: &LifetimeReport, hash: &str) -> Vec<LifetimeRow> {
    report
        .entries
        .iter()
        .map(|e| LifetimeRow {
            v: report.v,
            nu: report.nu,
            w_nu: report.w_nu,
            method: e.method.name().into(),
            tau: e.tau,
            q: report.q(e.method),
            flags: e.flag_tokens(),
            parity: report.parity.name().into(),
            gamma: e.gamma(),
            dx: e.dx,
            x_max: e.x_max,
            config_hash: hash.into(),
        })
        .collect()
}

pub fn physical_rows(rows: &[LifetimeRow], params: &msac_core::ScaledParams) -> Vec<PhysicalLifetimeRow> {
    rows.iter()
        .map(|r| {
            let w = params.energy_to_physical(r.w_nu);
            let tau = r.tau.map(|t| params.time_to_physical(t));
            PhysicalLifetimeRow::new(r.clone(), w, tau)
        })
        .collect()
}

fn stride(dx: f64) -> usize {
    ((PROFILE_STEP / dx).round() as usize).max(1)
}

fn trace_rows(trace: &NormTrace) -> Vec<(f64, f64, f64, f64)> {
    (0..trace.times.len())
        .map(|i| (trace.times[i], trace.norms[i], trace.loss_rate[i], trace.absorbed_rate[i]))
        .collect()
}

fn density_rows(d: &FgrDensities) -> Vec<[f64; 7]> {
    let step = if d.x.len() > 1 { stride(d.x[1] - d.x[0]) } else { 1 };
    (0..d.x.len())
        .step_by(step)
        .map(|i| [d.x[i], d.psi_u[i], d.psi_d[i], d.m_a[i], d.m_b[i], d.m_sigma[i], d.m_cum[i]])
        .collect()
}

fn curve_rows(v: f64, x_max: f64) -> Vec<[f64; 12]> {
    let n = (x_max / PROFILE_STEP).round() as i64;
    (-n..=n)
        .map(|i| {
            let x = i as f64 * PROFILE_STEP;
            let p = adiabatic_point(x, v);
            [x, -0.5 * x, 0.5 * x, p.v_u, p.v_d, p.vt_u, p.vt_d, p.theta, p.a_du, p.b_du, p.b_uu, p.b_dd]
        })
        .collect()
}

fn wave_rows(record: &ResonanceRecord) -> Result<Vec<[f64; 3]>> {
    let wave = record.solve()?.solution.to_wave();
    Ok((0..wave.len()).step_by(stride(wave.grid.dx())).map(|i| [wave.x(i), wave.first[i], wave.second[i]]).collect())
}

fn add_state_files(out: &mut OutputSet, analysis: &CouplingAnalysis) -> Result<()> {
    for state in &analysis.states {
        let label = state_label(state.report.v, state.report.nu);
        for (method, trace) in &state.details.traces {
            out.add_csv(format!("traces/{label}_{method}.csv"), &trace_rows(trace), TRACE_COLUMNS)?;
        }
        for (method, curve) in &state.details.phase_curves {
            let rel = curve.relative();
            let rows: Vec<_> = (0..curve.w.len()).map(|i| (curve.w[i], curve.phi[i], curve.phi0[i], rel[i])).collect();
            out.add_csv(format!("phase/{label}_{method}.csv"), &rows, PHASE_COLUMNS)?;
        }
        if let Some(d) = &state.details.fgr {
            out.add_csv(format!("fgr_density/{label}.csv"), &density_rows(d), DENSITY_COLUMNS)?;
        }
    }
    Ok(())
}

/// Runs `task` for every configured coupling and writes the results.
pub fn run(task: Task, cfg: &RunConfig, command: &str) -> Result<RunOutcome> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    pool.install(|| run_in_pool(task, cfg, command))
}

fn run_in_pool(task: Task, cfg: &RunConfig, command: &str) -> Result<RunOutcome> {
    let hash = cfg.config_hash();
    let tables: Vec<Resonances> = cfg.couplings.par_iter().map(|&v| resonances(cfg, v)).collect::<Result<_>>()?;
    let cached = tables.iter().filter(|t| t.from_cache).count();

    let mut out = OutputSet::new(&cfg.out);
    let mut resonance_rows = Vec::new();
    for t in &tables {
        if let Some(bytes) = &t.cache_bytes {
            out.add(cache_name(t.set.v), bytes.clone());
        }
        resonance_rows.extend(t.set.adiabatic.iter().chain(&t.set.diabatic).map(ResonanceRow::from));
    }
    out.add_csv(RESONANCES, &resonance_rows, RESONANCE_COLUMNS)?;

    let mut failures = tables.iter().filter(|t| t.set.diabatic_error.is_some()).count();
    if task == Task::Export {
        failures += export_figure_data(&mut out, &tables)?;
    }
    let analyses: Vec<CouplingAnalysis> = if cfg.methods.is_empty() {
        Vec::new()
    } else {
        let sets: Vec<ResonanceSet> = tables.into_iter().map(|t| t.set).collect();
        sets.into_par_iter().map(|set| analyze_resonances(set, &cfg.analysis)).collect()
    };
    if !cfg.methods.is_empty() {
        let rows: Vec<LifetimeRow> =
            analyses.iter().flat_map(|a| a.reports().flat_map(|r| lifetime_rows(r, &hash))).collect();
        failures += analyses.iter().map(CouplingAnalysis::failures).sum::<usize>();
        out.add_csv(LIFETIMES, &rows, LIFETIME_COLUMNS)?;
        if let Some(params) = &cfg.physical {
            out.add_csv(LIFETIMES_PHYSICAL, &physical_rows(&rows, params), PHYSICAL_COLUMNS)?;
        }
        for a in &analyses {
            add_state_files(&mut out, a)?;
        }
    }

    let config = serde_json::to_value(cfg.hashed_source())?;
    let manifest = out.finish(|files| Manifest {
        schema_version: SCHEMA_VERSION,
        tool: "msac".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config_hash: hash.clone(),
        config,
        couplings: cfg.couplings.clone(),
        methods: cfg.methods.iter().map(|m| m.name().to_string()).collect(),
        failures,
        columns: column_schema(),
        files,
    })?;
    Ok(RunOutcome { manifest, cached })
}

/// Potential curves per coupling and resonance waves from the cached tables.
fn export_figure_data(out: &mut OutputSet, tables: &[Resonances]) -> Result<usize> {
    let mut failures = 0;
    for table in tables {
        let v = table.set.v;
        out.add_csv(format!("curves/V{v}.csv"), &curve_rows(v, 20.0), CURVE_COLUMNS)?;
        let records: Vec<&ResonanceRecord> = table.set.adiabatic.iter().chain(&table.set.diabatic).collect();
        let waves: Vec<_> = records.par_iter().map(|r| (r, wave_rows(r))).collect();
        for (r, rows) in waves {
            match rows {
                Ok(rows) => out.add_csv(
                    format!("waves/{}_{}.csv", state_label(v, r.nu), r.representation.name()),
                    &rows,
                    WAVE_COLUMNS,
                )?,
                Err(e) => {
                    warn!("V = {v}, nu = {}: wave export failed: {e}", r.nu);
                    failures += 1;
                }
            }
        }
    }
    Ok(failures)
}

/// Adds physical columns to an existing lifetime table.
pub fn convert_units(input: &Path, cfg: &RunConfig) -> Result<Manifest> {
    let params = cfg.physical.context("convert-units needs physical inputs")?;
    let rows: Vec<LifetimeRow> = read_csv(&input.join(LIFETIMES))?;
    if let Some(r) = rows.iter().find(|r| (r.v - params.v).abs() > 1e-9 * params.v) {
        warn!("table coupling V = {} differs from the physical inputs (V = {})", r.v, params.v);
    }
    let bytes = csv_bytes(&physical_rows(&rows, &params), PHYSICAL_COLUMNS)?;
    let manifest_path = cfg.out.join(MANIFEST);
    let mut manifest: Manifest = match std::fs::read(&manifest_path) {
        Ok(b) => serde_json::from_slice(&b).with_context(|| format!("parsing {}", manifest_path.display()))?,
        Err(_) => Manifest {
            schema_version: SCHEMA_VERSION,
            tool: "msac".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: "convert-units".into(),
            config_hash: cfg.config_hash(),
            config: serde_json::to_value(cfg.hashed_source())?,
            couplings: rows.iter().map(|r| r.v).fold(Vec::new(), |mut acc, v| {
                if acc.last() != Some(&v) {
                    acc.push(v);
                }
                acc
            }),
            methods: Vec::new(),
            failures: 0,
            columns: column_schema(),
            files: Vec::new(),
        },
    };
    let mut out = OutputSet::new(&cfg.out);
    out.add(LIFETIMES_PHYSICAL, bytes);
    let previous = std::mem::take(&mut manifest.files);
    out.finish(move |new| {
        let mut files: Vec<FileEntry> = previous.into_iter().filter(|f| f.path != LIFETIMES_PHYSICAL).collect();
        files.extend(new);
        files.sort_by(|a, b| a.path.cmp(&b.path));
        Manifest { files, ..manifest }
    })
}
