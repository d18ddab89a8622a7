//! Run configuration: JSON file values overridden by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use tbc_core::exact::{ExactProfile, Family, PresetId, DEFAULT_AMPLITUDE};
use tbc_core::experiment::{ExperimentConfig, SchemeChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    MapTest,
    Evolve,
    Converge,
}

/// `N_t` is a single count for map tests and evolutions, a list for
/// convergence studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepCounts {
    One(usize),
    Many(Vec<usize>),
}

/// Every field doubles as a config-file key.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// cq-bdf1, cq-tr, np-bdf1, np-tr, cp-bdf1, cp-tr (CP: map-test only)
    #[arg(long)]
    pub scheme: Option<String>,
    /// Padé order for NP and CP schemes
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// Exact-solution preset, e.g. cg-ia, hg-iib
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub a0: Option<f64>,
    /// Polynomial order per axis (N+1 LGL nodes)
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Number of time levels; comma-separated list for `converge`
    #[arg(long, value_parser = parse_counts)]
    pub nt: Option<StepCounts>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// xl,xr,xb,xt
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<[f64; 4]>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the full-size parameter tables instead of desk-scale defaults
    #[arg(long)]
    #[serde(default)]
    pub full: bool,
    /// Snapshot times t1,t2,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snapshots: Option<Vec<f64>>,
    /// Contour scaling factor in f_mag log10|u|
    #[arg(long)]
    pub fmag: Option<f64>,
}

fn parse_counts(s: &str) -> Result<StepCounts, String> {
    let v: Vec<usize> = s.split(',').map(|t| t.trim().parse().map_err(|e| format!("bad N_t '{t}': {e}"))).collect::<Result<_, _>>()?;
    Ok(if v.len() == 1 { StepCounts::One(v[0]) } else { StepCounts::Many(v) })
}

fn parse_domain(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse().map_err(|e| format!("bad coordinate '{t}': {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "domain needs four values xl,xr,xb,xt".to_string())
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Flag values win over file values.
    pub fn overlay(self, flags: Settings) -> Settings {
        Settings {
            scheme: flags.scheme.or(self.scheme),
            m: flags.m.or(self.m),
            preset: flags.preset.or(self.preset),
            c0: flags.c0.or(self.c0),
            a0: flags.a0.or(self.a0),
            n: flags.n.or(self.n),
            nt: flags.nt.or(self.nt),
            tmax: flags.tmax.or(self.tmax),
            domain: flags.domain.or(self.domain),
            out: flags.out.or(self.out),
            full: flags.full || self.full,
            snapshots: flags.snapshots.or(self.snapshots),
            fmag: flags.fmag.or(self.fmag),
        }
    }
}

/// Settings with every default filled in.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub scheme: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub preset: String,
    pub c0: f64,
    pub a0: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub nt: Vec<usize>,
    pub tmax: f64,
    pub domain: [f64; 4],
    pub full: bool,
    pub snapshots: Vec<f64>,
    pub fmag: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub experiment_config: ExperimentConfig,
}

/// `(N, N_t list, T_max)` defaults. `full` selects the large-scale sizes.
fn defaults(experiment: Experiment, full: bool) -> (usize, Vec<usize>, f64) {
    match (experiment, full) {
        (Experiment::MapTest, false) => (95, vec![501], 2.0),
        (Experiment::MapTest, true) => (199, vec![1001], 2.0),
        (Experiment::Evolve, false) => (95, vec![501], 2.0),
        (Experiment::Evolve, true) => (199, vec![5001], 5.0),
        (Experiment::Converge, false) => (95, vec![65, 129, 257, 513, 1025], 1.0),
        (Experiment::Converge, true) => (199, (8..=18).map(|k| 1usize << k).collect(), 5.0),
    }
}

impl RunConfig {
    pub fn resolve(experiment: Experiment, s: Settings) -> Result<Self, String> {
        let (n_def, nt_def, t_def) = defaults(experiment, s.full);
        let scheme_name = s.scheme.unwrap_or_else(|| "np-tr".into()).to_ascii_lowercase();
        let scheme: SchemeChoice = scheme_name.parse().map_err(|e: tbc_core::TbcError| e.to_string())?;
        if matches!(scheme, SchemeChoice::Cp(_)) && experiment != Experiment::MapTest {
            return Err(format!("{scheme} is only available for map-test"));
        }
        let preset = s.preset.unwrap_or_else(|| "cg-ia".into()).to_ascii_lowercase();
        let id: PresetId = preset.parse().map_err(|e: tbc_core::TbcError| e.to_string())?;
        let c0 = s.c0.unwrap_or(4.0);
        let a0 = s.a0.unwrap_or(DEFAULT_AMPLITUDE);
        let nt = match s.nt {
            None => nt_def,
            Some(StepCounts::One(k)) => vec![k],
            Some(StepCounts::Many(v)) => v,
        };
        if experiment != Experiment::Converge && nt.len() != 1 {
            return Err("a list of N_t values is only accepted by converge".into());
        }
        let fmag = s.fmag.unwrap_or(match id.family {
            Family::Cg => 4.0,
            Family::Hg => 8.0,
        });
        let m = s.m.unwrap_or(50);
        let n = s.n.unwrap_or(n_def);
        let tmax = s.tmax.unwrap_or(t_def);
        let domain = s.domain.unwrap_or([-10.0, 10.0, -10.0, 10.0]);
        let snapshots = s.snapshots.unwrap_or_default();
        let experiment_config = ExperimentConfig {
            scheme,
            m,
            rect: domain,
            n,
            t_max: tmax,
            n_t: nt[0],
            profile: ExactProfile::preset(id.family, id.kind, c0, a0),
            snapshots: snapshots.clone(),
        };
        for &k in &nt {
            let mut c = experiment_config.clone();
            c.n_t = k;
            c.validate().map_err(|e| e.to_string())?;
        }
        Ok(Self {
            experiment,
            scheme: scheme.to_string(),
            m,
            preset,
            c0,
            a0,
            n,
            nt,
            tmax,
            domain,
            full: s.full,
            snapshots,
            fmag,
            out: s.out,
            experiment_config,
        })
    }
}
