//! Per-state lifetime tables shared by every method.

use std::fmt;

use crate::approx::q_factor;
use crate::wave::{Parity, Representation};

/// Lifetime method, named as in the exported tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    NadFc,
    AdFc,
    NadBw,
    AdBw,
    NadTdse,
    AdTdse,
    Fgr,
    Lz,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::NadFc,
        Method::AdFc,
        Method::NadBw,
        Method::AdBw,
        Method::NadTdse,
        Method::AdTdse,
        Method::Fgr,
        Method::Lz,
    ];

    /// The four stationary methods.
    pub const TIDSE: [Method; 4] = [Method::NadFc, Method::AdFc, Method::NadBw, Method::AdBw];

    pub fn name(self) -> &'static str {
        match self {
            Method::NadFc => "nad_FC",
            Method::AdFc => "ad_FC",
            Method::NadBw => "nad_BW",
            Method::AdBw => "ad_BW",
            Method::NadTdse => "nad_TDSE",
            Method::AdTdse => "ad_TDSE",
            Method::Fgr => "FGR",
            Method::Lz => "LZ",
        }
    }

    /// Accepts the table name in any letter case.
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s.trim()))
    }

    /// Representation of the underlying solution, for the quantum methods.
    pub fn representation(self) -> Option<Representation> {
        match self {
            Method::NadFc | Method::NadBw | Method::NadTdse => Some(Representation::Diabatic),
            Method::AdFc | Method::AdBw | Method::AdTdse => Some(Representation::Adiabatic),
            Method::Fgr | Method::Lz => None,
        }
    }

    pub fn is_tdse(self) -> bool {
        matches!(self, Method::NadTdse | Method::AdTdse)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Condition attached to a single lifetime value.
#[derive(Debug, Clone, PartialEq)]
pub enum Flag {
    /// Breit-Wigner background slope is large against the resonance slope.
    BackgroundDominated,
    /// The norm decay changed rate inside the fit window.
    ReflectionSuspected,
    /// The attempt rate used a reflected neighbouring level.
    ReflectedLevel,
    /// Method not run by policy, with the reason.
    Skipped(String),
    /// Method failed, with the error message.
    Failed(String),
}

impl Flag {
    /// Short token for table cells, without separators.
    pub fn token(&self) -> String {
        match self {
            Flag::BackgroundDominated => "background".into(),
            Flag::ReflectionSuspected => "reflection".into(),
            Flag::ReflectedLevel => "reflected_level".into(),
            Flag::Skipped(why) => format!("skipped:{}", sanitize(why)),
            Flag::Failed(why) => format!("error:{}", sanitize(why)),
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Flag::Failed(_))
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || ".-+_=".contains(c) { c } else { '_' }).collect()
}

/// One method's lifetime for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeEntry {
    pub method: Method,
    /// `None` when the method was skipped or failed.
    pub tau: Option<f64>,
    /// Step of the grid that produced the value.
    pub dx: f64,
    /// Outer grid edge, zero when no spatial grid was involved.
    pub x_max: f64,
    pub flags: Vec<Flag>,
}

impl LifetimeEntry {
    pub fn value(method: Method, tau: f64, dx: f64, x_max: f64) -> Self {
        Self { method, tau: Some(tau), dx, x_max, flags: Vec::new() }
    }

    pub fn failed(method: Method, reason: impl Into<String>) -> Self {
        Self { method, tau: None, dx: 0.0, x_max: 0.0, flags: vec![Flag::Failed(reason.into())] }
    }

    pub fn skipped(method: Method, reason: impl Into<String>) -> Self {
        Self { method, tau: None, dx: 0.0, x_max: 0.0, flags: vec![Flag::Skipped(reason.into())] }
    }

    pub fn with_flag(mut self, flag: Flag) -> Self {
        self.flags.push(flag);
        self
    }

    pub fn gamma(&self) -> Option<f64> {
        self.tau.map(f64::recip)
    }

    pub fn flag_tokens(&self) -> String {
        self.flags.iter().map(Flag::token).collect::<Vec<_>>().join(";")
    }
}

/// All lifetimes computed for one resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeReport {
    pub v: f64,
    pub nu: usize,
    pub parity: Parity,
    /// Adiabatic resonance energy.
    pub w_nu: f64,
    pub entries: Vec<LifetimeEntry>,
}

impl LifetimeReport {
    pub fn new(v: f64, nu: usize, parity: Parity, w_nu: f64) -> Self {
        Self { v, nu, parity, w_nu, entries: Vec::new() }
    }

    pub fn push(&mut self, entry: LifetimeEntry) {
        self.entries.push(entry);
        self.entries.sort_by_key(|e| e.method);
    }

    pub fn entry(&self, method: Method) -> Option<&LifetimeEntry> {
        self.entries.iter().find(|e| e.method == method)
    }

    pub fn tau(&self, method: Method) -> Option<f64> {
        self.entry(method).and_then(|e| e.tau)
    }

    pub fn q(&self, method: Method) -> Option<f64> {
        self.tau(method).map(|t| q_factor(t, self.v))
    }

    /// `tau(method) / tau(reference)` when both exist.
    pub fn ratio(&self, method: Method, reference: Method) -> Option<f64> {
        Some(self.tau(method)? / self.tau(reference)?)
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.flags.iter().any(Flag::is_failure)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.name()), Some(m));
        }
        assert_eq!(Method::parse("ad_fc"), Some(Method::AdFc));
        assert_eq!(Method::parse("flux"), None);
    }

    #[test]
    fn entries_stay_in_method_order() {
        let mut r = LifetimeReport::new(1.0, 0, Parity::Even, 1.5);
        r.push(LifetimeEntry::value(Method::Lz, 3.0, 0.0, 0.0));
        r.push(LifetimeEntry::value(Method::AdFc, 6.0, 1e-3, 12.0));
        r.push(LifetimeEntry::failed(Method::NadBw, "no step"));
        let order: Vec<_> = r.entries.iter().map(|e| e.method).collect();
        assert_eq!(order, vec![Method::AdFc, Method::NadBw, Method::Lz]);
        assert_eq!(r.ratio(Method::Lz, Method::AdFc), Some(0.5));
        assert_eq!(r.ratio(Method::NadBw, Method::AdFc), None);
        assert_eq!(r.failures(), 1);
    }

    #[test]
    fn flag_tokens_have_no_separators() {
        let e = LifetimeEntry::failed(Method::Fgr, "range error: x, y; z").with_flag(Flag::ReflectedLevel);
        let tokens = e.flag_tokens();
        assert!(!tokens.contains(','));
        assert_eq!(tokens.matches(';').count(), 1);
    }
}
