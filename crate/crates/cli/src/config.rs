//! Run configuration: a TOML file with one table per stage, overridden by
//! command-line flags and resolved into solver options.
//!
//! ```toml
//! [run]
//! v = [0.306, 1.5275]                        # or: v_range = { start = 0.306, stop = 2.75, count = 10 }
//! methods = ["ad_FC", "nad_FC", "ad_BW", "nad_BW"]
//! jobs = 1
//!
//! [grid]
//! dx = 1e-3
//! x_max = "action:24"                        # or a number
//!
//! [tidse]
//! window = 3.65
//! r_k = 3.0
//! x_b_offset = 1.0
//!
//! [tdse]
//! dt = 0.01
//! t_end = 60.0
//! absorber_strength = 10.0
//! absorber_action = 8.0
//!
//! [fgr]
//! dx = 1e-3
//! tolerance = 5e-3
//!
//! [lz]
//! velocity = "total-energy"
//!
//! [physical]                                 # optional; replaces the V list
//! mass = 1.0
//! alpha = 1.0
//! coupling = 1.5
//! hbar = 1.0
//! ```

use std::path::{Path, PathBuf};

use msac_core::analysis::AnalysisOptions;
use msac_core::approx::{FgrOptions, VelocityRule};
use msac_core::stationary::BwOptions;
use msac_core::tdse::{AbsorberSpec, FitOptions, Onset, PropagationOptions, TdseOptions};
use msac_core::tidse::{SolverOptions, XmaxPolicy};
use msac_core::units::scale_physical;
use msac_core::{Method, ScaledParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("configuration error: {0}")]
pub struct ConfigError(pub String);

fn config_error(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub run: RunSection,
    pub grid: GridSection,
    pub tidse: TidseSection,
    pub tdse: TdseSection,
    pub fgr: FgrSection,
    pub lz: LzSection,
    pub physical: Option<PhysicalSection>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub v: Option<Vec<f64>>,
    pub v_range: Option<VRange>,
    pub methods: Option<Vec<String>>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl VRange {
    fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub dx: Option<f64>,
    pub scan_dx: Option<f64>,
    /// A number, `"action:<target>"` or `"linear"`.
    pub x_max: Option<XmaxSetting>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum XmaxSetting {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TidseSection {
    pub window: Option<f64>,
    pub scan_density: Option<f64>,
    pub r_k: Option<f64>,
    pub x_b_offset: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TdseSection {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub record_every: Option<usize>,
    pub absorber_strength: Option<f64>,
    /// Onset where the under-barrier action reaches this value.
    pub absorber_action: Option<f64>,
    /// Onset at a fixed position; overrides `absorber_action`.
    pub absorber_onset: Option<f64>,
    pub absorber_width: Option<f64>,
    pub settle_time: Option<f64>,
    pub min_drop: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FgrSection {
    pub dx: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_refinement: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LzSection {
    pub velocity: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub mass: f64,
    pub alpha: f64,
    pub coupling: f64,
    pub hbar: f64,
}

impl PhysicalSection {
    /// Parses `M,ALPHA,VP,HBAR`.
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| config_error(format!("--physical expects M,ALPHA,VP,HBAR: {e}")))?;
        match parts[..] {
            [mass, alpha, coupling, hbar] => Ok(Self { mass, alpha, coupling, hbar }),
            _ => Err(config_error("--physical expects four comma-separated numbers M,ALPHA,VP,HBAR")),
        }
    }

    pub fn scaled(&self) -> Result<ScaledParams, ConfigError> {
        scale_physical(self.mass, self.alpha, self.coupling, self.hbar).map_err(|e| config_error(e.to_string()))
    }
}

/// Values given on the command line, applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub v: Option<Vec<f64>>,
    pub methods: Option<Vec<String>>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub dx: Option<f64>,
    pub x_max: Option<String>,
    pub physical: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(v) = &o.v {
            self.run.v = Some(v.clone());
            self.run.v_range = None;
        }
        if let Some(m) = &o.methods {
            self.run.methods = Some(m.clone());
        }
        if o.jobs.is_some() {
            self.run.jobs = o.jobs;
        }
        if o.out.is_some() {
            self.run.out = o.out.clone();
        }
        if o.dx.is_some() {
            self.grid.dx = o.dx;
        }
        if let Some(x) = &o.x_max {
            self.grid.x_max =
                Some(x.parse::<f64>().map(XmaxSetting::Fixed).unwrap_or_else(|_| XmaxSetting::Named(x.clone())));
        }
        if let Some(p) = &o.physical {
            self.physical = Some(PhysicalSection::parse(p)?);
        }
        Ok(())
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub couplings: Vec<f64>,
    pub methods: Vec<Method>,
    pub jobs: usize,
    pub out: PathBuf,
    pub analysis: AnalysisOptions,
    pub physical: Option<ScaledParams>,
    /// The merged file-level settings, kept for hashing and the manifest.
    pub source: FileConfig,
}

fn positive(name: &str, value: Option<f64>, default: f64) -> Result<f64, ConfigError> {
    let v = value.unwrap_or(default);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_error(format!("{name} must be positive, got {v}")))
    }
}

fn parse_x_max(setting: &Option<XmaxSetting>) -> Result<XmaxPolicy, ConfigError> {
    match setting {
        None => Ok(XmaxPolicy::default()),
        Some(XmaxSetting::Fixed(x)) => Ok(XmaxPolicy::Fixed(positive("grid.x_max", Some(*x), 0.0)?)),
        Some(XmaxSetting::Named(s)) if s == "linear" => Ok(XmaxPolicy::Linear),
        Some(XmaxSetting::Named(s)) => {
            let target = s
                .strip_prefix("action:")
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| config_error(format!("grid.x_max: expected a number, \"linear\" or \"action:<target>\", got {s:?}")))?;
            Ok(XmaxPolicy::Action { target: positive("grid.x_max action", Some(target), 0.0)?, margin: 0.0 })
        }
    }
}

pub fn parse_methods(names: &[String]) -> Result<Vec<Method>, ConfigError> {
    let mut methods = Vec::new();
    for name in names.iter().flat_map(|n| n.split(',')).filter(|n| !n.trim().is_empty()) {
        let m = if name.trim().eq_ignore_ascii_case("all") {
            Method::ALL.to_vec()
        } else if name.trim().eq_ignore_ascii_case("tidse") {
            Method::TIDSE.to_vec()
        } else {
            vec![Method::parse(name).ok_or_else(|| config_error(format!("unknown method {name:?}")))?]
        };
        methods.extend(m);
    }
    methods.sort();
    methods.dedup();
    Ok(methods)
}

impl RunConfig {
    /// Resolves `file` with `default_methods` used when none are configured.
    pub fn resolve(file: FileConfig, default_methods: &[Method]) -> Result<Self, ConfigError> {
        let physical = file.physical.as_ref().map(PhysicalSection::scaled).transpose()?;
        let mut couplings = match (&physical, &file.run.v, &file.run.v_range) {
            (Some(p), _, _) => vec![p.v],
            (None, Some(v), _) => v.clone(),
            (None, None, Some(range)) => range.values(),
            (None, None, None) => return Err(config_error("no coupling given; set run.v, run.v_range, --v or --physical")),
        };
        if let Some(bad) = couplings.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(config_error(format!("coupling values must be positive, got {bad}")));
        }
        couplings.sort_by(f64::total_cmp);
        couplings.dedup();

        let methods = match &file.run.methods {
            Some(names) => parse_methods(names)?,
            None => default_methods.to_vec(),
        };
        let jobs = file.run.jobs.unwrap_or(1);
        if jobs == 0 {
            return Err(config_error("run.jobs must be at least 1"));
        }
        let out = file.run.out.clone().unwrap_or_else(|| PathBuf::from("msac-out"));

        let base = SolverOptions::default();
        let solver = SolverOptions {
            dx: positive("grid.dx", file.grid.dx, base.dx)?,
            scan_dx: positive("grid.scan_dx", file.grid.scan_dx, base.scan_dx)?,
            x_max: parse_x_max(&file.grid.x_max)?,
            window: positive("tidse.window", file.tidse.window, base.window)?,
            scan_density: positive("tidse.scan_density", file.tidse.scan_density, base.scan_density)?,
            r_k: positive("tidse.r_k", file.tidse.r_k, base.r_k)?,
            x_b_offset: positive("tidse.x_b_offset", file.tidse.x_b_offset, base.x_b_offset)?,
            ..base
        };
        let bw = BwOptions { x_b_offset: solver.x_b_offset, ..BwOptions::default() };

        let t = &file.tdse;
        let tdse_base = TdseOptions::default();
        let absorber_base = AbsorberSpec::default();
        let onset = match (t.absorber_onset, t.absorber_action) {
            (Some(x), _) => Onset::Fixed(positive("tdse.absorber_onset", Some(x), 0.0)?),
            (None, Some(a)) => Onset::Action(positive("tdse.absorber_action", Some(a), 0.0)?),
            (None, None) => absorber_base.onset,
        };
        let tdse = TdseOptions {
            propagation: PropagationOptions {
                dt: positive("tdse.dt", t.dt, tdse_base.propagation.dt)?,
                t_end: positive("tdse.t_end", t.t_end, tdse_base.propagation.t_end)?,
                record_every: t.record_every.unwrap_or(tdse_base.propagation.record_every).max(1),
            },
            absorber: AbsorberSpec {
                onset,
                strength: positive("tdse.absorber_strength", t.absorber_strength, absorber_base.strength)?,
            },
            absorber_width: match t.absorber_width {
                Some(w) => Some(positive("tdse.absorber_width", Some(w), 0.0)?),
                None => tdse_base.absorber_width,
            },
            fit: FitOptions {
                settle_time: t.settle_time.unwrap_or(tdse_base.fit.settle_time),
                ..tdse_base.fit
            },
            min_drop: t.min_drop.unwrap_or(tdse_base.min_drop),
        };
        if tdse.fit.settle_time >= tdse.propagation.t_end {
            return Err(config_error("tdse.settle_time must be shorter than tdse.t_end"));
        }

        let fgr_base = FgrOptions::default();
        let fgr = FgrOptions {
            dx: positive("fgr.dx", file.fgr.dx, fgr_base.dx)?,
            tolerance: positive("fgr.tolerance", file.fgr.tolerance, fgr_base.tolerance)?,
            max_refinement: positive("fgr.max_refinement", file.fgr.max_refinement, fgr_base.max_refinement)?,
        };
        let velocity = match &file.lz.velocity {
            Some(name) => VelocityRule::parse(name)
                .ok_or_else(|| config_error(format!("lz.velocity: unknown rule {name:?}")))?,
            None => VelocityRule::default(),
        };

        let analysis = AnalysisOptions { solver, bw, tdse, fgr, velocity, methods: methods.clone(), keep_details: true };
        Ok(Self { couplings, methods, jobs, out, analysis, physical, source: file })
    }

    /// Hash of everything that affects computed values. Output location and
    /// parallelism are excluded.
    pub fn config_hash(&self) -> String {
        digest(&format!("{}|{:?}|{:?}", env!("CARGO_PKG_VERSION"), self.hashed_source(), self.analysis))
    }

    /// The file-level settings without output location and parallelism,
    /// with the resolved method list.
    pub fn hashed_source(&self) -> FileConfig {
        let mut hashed = self.source.clone();
        hashed.run.jobs = None;
        hashed.run.out = None;
        hashed.run.methods = Some(self.methods.iter().map(|m| m.name().to_string()).collect());
        hashed
    }

    /// Hash of the settings that determine the resonance table at `v`.
    pub fn resonance_hash(&self, v: f64) -> String {
        digest(&format!("{}|{v:e}|{:?}", env!("CARGO_PKG_VERSION"), self.analysis.solver))
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::resolve(toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?, &Method::TIDSE)
    }

    #[test]
    fn range_expands_and_sorts() {
        let c = resolve("[run]\nv_range = { start = 2.0, stop = 1.0, count = 3 }").unwrap();
        assert_eq!(c.couplings, vec![1.0, 1.5, 2.0]);
        assert_eq!(c.methods, Method::TIDSE.to_vec());
    }

    #[test]
    fn unknown_keys_and_methods_are_rejected() {
        assert!(resolve("[run]\nv = [1.0]\nspeed = 3").is_err());
        assert!(resolve("[run]\nv = [1.0]\nmethods = [\"flux\"]").is_err());
        assert!(resolve("[run]\nv = [-1.0]").is_err());
        assert!(resolve("[grid]\ndx = 1e-3").is_err());
    }

    #[test]
    fn x_max_settings() {
        let fixed = resolve("[run]\nv = [1.0]\n[grid]\nx_max = 14.5").unwrap();
        assert_eq!(fixed.analysis.solver.x_max, XmaxPolicy::Fixed(14.5));
        let action = resolve("[run]\nv = [1.0]\n[grid]\nx_max = \"action:20\"").unwrap();
        assert_eq!(action.analysis.solver.x_max, XmaxPolicy::Action { target: 20.0, margin: 0.0 });
        assert!(resolve("[run]\nv = [1.0]\n[grid]\nx_max = \"far\"").is_err());
    }

    #[test]
    fn hash_ignores_output_location_and_jobs() {
        let a = resolve("[run]\nv = [1.0]\njobs = 1\nout = \"a\"").unwrap();
        let b = resolve("[run]\nv = [1.0]\njobs = 4\nout = \"b\"").unwrap();
        let c = resolve("[run]\nv = [1.0]\n[grid]\ndx = 5e-4").unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        assert_ne!(a.config_hash(), c.config_hash());
        assert_eq!(a.resonance_hash(1.0), b.resonance_hash(1.0));
        assert_ne!(a.resonance_hash(1.0), c.resonance_hash(1.0));
    }

    #[test]
    fn physical_inputs_replace_the_coupling_list() {
        let mut f: FileConfig = toml::from_str("[run]\nv = [1.0, 2.0]").unwrap();
        f.apply(&Overrides { physical: Some("1,8,1,1".into()), ..Default::default() }).unwrap();
        let c = RunConfig::resolve(f, &Method::TIDSE).unwrap();
        assert_eq!(c.couplings, vec![0.25]);
        assert!(PhysicalSection::parse("1,2,3").is_err());
    }

    #[test]
    fn method_groups() {
        let all = parse_methods(&["all".into()]).unwrap();
        assert_eq!(all.len(), 8);
        let some = parse_methods(&["LZ,ad_fc".into(), "FGR".into()]).unwrap();
        assert_eq!(some, vec![Method::AdFc, Method::Fgr, Method::Lz]);
    }
}
