//! Runs the lifetime methods for every resonance at one coupling.
//!
//! Resonances are located once in the adiabatic representation and refined
//! in the diabatic one from those energies. Each state is then evaluated
//! independently, so the per-state work runs on the rayon pool of the caller.
//! A failing method becomes a flagged row instead of aborting the state.

use rayon::prelude::*;

use crate::approx::{fgr_lifetime, full_densities, lz_ladder, FgrDensities, FgrOptions, VelocityRule};
use crate::error::{Error, Result};
use crate::report::{Flag, LifetimeEntry, LifetimeReport, Method};
use crate::stationary::{lifetime_bw, lifetime_flux, BwOptions, PhaseCurve};
use crate::tdse::{lifetime_tdse, NormTrace, TdseOptions};
use crate::tidse::{scan_resonances, transfer_resonances, ResonanceRecord, SolverOptions};
use crate::wave::Representation;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub solver: SolverOptions,
    pub bw: BwOptions,
    pub tdse: TdseOptions,
    pub fgr: FgrOptions,
    pub velocity: VelocityRule,
    pub methods: Vec<Method>,
    /// Keep phase curves, norm traces and FGR densities for export.
    pub keep_details: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            bw: BwOptions::default(),
            tdse: TdseOptions::default(),
            fgr: FgrOptions::default(),
            velocity: VelocityRule::default(),
            methods: Method::ALL.to_vec(),
            keep_details: false,
        }
    }
}

impl AnalysisOptions {
    pub fn wants(&self, method: Method) -> bool {
        self.methods.contains(&method)
    }

    fn wants_diabatic(&self) -> bool {
        self.methods.iter().any(|m| m.representation() == Some(Representation::Diabatic))
    }
}

/// Resonances of one coupling in both representations, indexed alike.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSet {
    pub v: f64,
    pub adiabatic: Vec<ResonanceRecord>,
    /// Empty when no diabatic method was requested or the transfer failed.
    pub diabatic: Vec<ResonanceRecord>,
    pub diabatic_error: Option<String>,
}

impl ResonanceSet {
    pub fn diabatic_of(&self, nu: usize) -> Option<&ResonanceRecord> {
        self.diabatic.iter().find(|r| r.nu == nu)
    }
}

/// Scans the adiabatic ladder and, when needed, refines it diabatically.
pub fn find_resonances(v: f64, opts: &AnalysisOptions) -> Result<ResonanceSet> {
    let adiabatic = scan_resonances(v, Representation::Adiabatic, &opts.solver)?;
    let (diabatic, diabatic_error) = if opts.wants_diabatic() && !adiabatic.is_empty() {
        match transfer_resonances(&adiabatic, Representation::Diabatic, &opts.solver) {
            Ok(d) => (d, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        }
    } else {
        (Vec::new(), None)
    };
    Ok(ResonanceSet { v, adiabatic, diabatic, diabatic_error })
}

/// Optional per-state data kept for export.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateDetails {
    pub phase_curves: Vec<(Method, PhaseCurve)>,
    pub traces: Vec<(Method, NormTrace)>,
    pub fgr: Option<FgrDensities>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateResult {
    pub report: LifetimeReport,
    pub details: StateDetails,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingAnalysis {
    pub resonances: ResonanceSet,
    pub states: Vec<StateResult>,
}

impl CouplingAnalysis {
    pub fn reports(&self) -> impl Iterator<Item = &LifetimeReport> {
        self.states.iter().map(|s| &s.report)
    }

    pub fn failures(&self) -> usize {
        self.reports().map(LifetimeReport::failures).sum()
    }
}

/// Scans and evaluates every requested method at coupling `v`.
pub fn analyze_coupling(v: f64, opts: &AnalysisOptions) -> Result<CouplingAnalysis> {
    let resonances = find_resonances(v, opts)?;
    Ok(analyze_resonances(resonances, opts))
}

/// Evaluates the requested methods for an already located resonance set.
pub fn analyze_resonances(resonances: ResonanceSet, opts: &AnalysisOptions) -> CouplingAnalysis {
    let lz = if opts.wants(Method::Lz) { Some(lz_entries(&resonances, opts)) } else { None };
    let states = resonances
        .adiabatic
        .par_iter()
        .enumerate()
        .map(|(i, ad)| {
            let mut state = evaluate_state(ad, resonances.diabatic_of(ad.nu), opts);
            if resonances.diabatic.is_empty() {
                if let Some(why) = &resonances.diabatic_error {
                    for m in Method::ALL.into_iter().filter(|m| m.representation() == Some(Representation::Diabatic)) {
                        if opts.wants(m) {
                            state.report.push(LifetimeEntry::failed(m, format!("diabatic refinement: {why}")));
                        }
                    }
                }
            }
            if let Some(lz) = &lz {
                state.report.push(lz[i].clone());
            }
            state
        })
        .collect();
    CouplingAnalysis { resonances, states }
}

fn lz_entries(set: &ResonanceSet, opts: &AnalysisOptions) -> Vec<LifetimeEntry> {
    let energies: Vec<f64> = set.adiabatic.iter().map(|r| r.w_nu).collect();
    let n = energies.len();
    match lz_ladder(set.v, &energies, opts.velocity) {
        Ok(results) => results
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let entry = LifetimeEntry::value(Method::Lz, r.tau, 0.0, 0.0);
                if i == 0 || i + 1 == n {
                    entry.with_flag(Flag::ReflectedLevel)
                } else {
                    entry
                }
            })
            .collect(),
        Err(e) => vec![LifetimeEntry::failed(Method::Lz, e.to_string()); n],
    }
}

/// Runs the per-state methods of `opts` for one adiabatic resonance and its
/// diabatic counterpart. The ladder-based Landau-Zener rate is added by the caller.
pub fn evaluate_state(ad: &ResonanceRecord, nad: Option<&ResonanceRecord>, opts: &AnalysisOptions) -> StateResult {
    let mut report = LifetimeReport::new(ad.v, ad.nu, ad.parity, ad.w_nu);
    let mut details = StateDetails::default();
    let keep = opts.keep_details;

    for (record, fc, bw, tdse) in [
        (Some(ad), Method::AdFc, Method::AdBw, Method::AdTdse),
        (nad, Method::NadFc, Method::NadBw, Method::NadTdse),
    ] {
        let Some(record) = record else {
            // only reached when the transfer failed; the caller flags it
            continue;
        };
        if opts.wants(fc) {
            report.push(flux_entry(record, fc, opts));
        }
        if opts.wants(bw) {
            report.push(match lifetime_bw(record, &opts.bw) {
                Ok(r) => {
                    let entry = LifetimeEntry::value(bw, r.tau, record.dx, record.x_max);
                    let entry = if r.background_flag { entry.with_flag(Flag::BackgroundDominated) } else { entry };
                    if keep {
                        details.phase_curves.push((bw, r.curve));
                    }
                    entry
                }
                Err(e) => LifetimeEntry::failed(bw, e.to_string()),
            });
        }
        if opts.wants(tdse) {
            report.push(match lifetime_tdse(record, &opts.tdse) {
                Ok(r) => {
                    let entry = LifetimeEntry::value(tdse, r.tau, record.dx, r.absorber.x_max);
                    let entry = if r.fit.reflection_warning { entry.with_flag(Flag::ReflectionSuspected) } else { entry };
                    if keep {
                        details.traces.push((tdse, r.trace));
                    }
                    entry
                }
                Err(Error::Range(why)) => LifetimeEntry::skipped(tdse, why),
                Err(e) => LifetimeEntry::failed(tdse, e.to_string()),
            });
        }
    }

    if opts.wants(Method::Fgr) {
        report.push(match fgr_lifetime(ad.v, ad.nu, &opts.fgr) {
            Ok(r) => {
                if keep {
                    details.fgr = Some(full_densities(&r.bound, &r.continuum));
                }
                LifetimeEntry::value(Method::Fgr, r.tau, r.dx, r.continuum.x_max())
            }
            Err(e) => LifetimeEntry::failed(Method::Fgr, e.to_string()),
        });
    }
    StateResult { report, details }
}

fn flux_entry(record: &ResonanceRecord, method: Method, opts: &AnalysisOptions) -> LifetimeEntry {
    let result = record.solve().and_then(|s| lifetime_flux(record, &s.solution.to_wave(), opts.solver.r_k));
    match result {
        Ok(r) => LifetimeEntry::value(method, r.tau, record.dx, record.x_max),
        Err(e) => LifetimeEntry::failed(method, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_coupling_ground_state_agrees_across_cheap_methods() {
        let opts = AnalysisOptions {
            methods: vec![Method::AdFc, Method::NadFc, Method::Fgr, Method::Lz],
            ..Default::default()
        };
        let analysis = analyze_coupling(2.0, &opts).unwrap();
        assert_eq!(analysis.failures(), 0);
        let first = &analysis.states[0].report;
        assert_eq!(first.nu, 0);
        let ratio = first.ratio(Method::NadFc, Method::AdFc).unwrap();
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
        let fgr = first.ratio(Method::Fgr, Method::AdFc).unwrap();
        assert!((0.65..1.05).contains(&fgr), "{fgr}");
        assert!(first.entry(Method::Lz).unwrap().flags.contains(&Flag::ReflectedLevel));
        assert!(analysis.states[1].report.entry(Method::Lz).unwrap().flags.is_empty());
    }

    #[test]
    fn long_lived_states_skip_propagation() {
        let opts = AnalysisOptions { methods: vec![Method::AdTdse], ..Default::default() };
        let set = find_resonances(2.75, &opts).unwrap();
        assert!(set.diabatic.is_empty());
        let state = evaluate_state(&set.adiabatic[0], None, &opts);
        let entry = state.report.entry(Method::AdTdse).unwrap();
        assert!(entry.tau.is_none());
        assert!(matches!(entry.flags[0], Flag::Skipped(_)));
        assert_eq!(state.report.failures(), 0);
    }
}
