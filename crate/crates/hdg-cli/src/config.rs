//! Job configuration: JSON document plus inline-flag overrides.

use hdg_core::expr::Var;
use hdg_core::{DiffConfig, DiffScheme};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Analysis kinds, one per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Frame,
    CrCheck,
    CrCheckPolar,
    Forms,
    Regular,
    Eval,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Frame => "frame",
            Kind::CrCheck => "cr-check",
            Kind::CrCheckPolar => "cr-check-polar",
            Kind::Forms => "forms",
            Kind::Regular => "regular",
            Kind::Eval => "eval",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        [
            Kind::Frame,
            Kind::CrCheck,
            Kind::CrCheckPolar,
            Kind::Forms,
            Kind::Regular,
            Kind::Eval,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// One axis of the evaluation grid: `count` points from `min` to `max`
/// inclusive (`count = 1` pins the variable at `min`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * (i as f64) / ((self.count - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffSpec {
    pub scheme: Option<String>,
    pub step: Option<f64>,
    pub richardson: Option<bool>,
}

/// The on-disk job document. Every field can also be supplied (and is then
/// overridden) by the command line.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfigFile {
    pub kind: Option<String>,
    pub expr: Option<String>,
    /// Optional explicit parameter signature, cross-checked against the grid.
    pub params: Option<Vec<String>>,
    #[serde(default)]
    pub grid: BTreeMap<String, GridSpec>,
    pub diff: Option<DiffSpec>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

/// Fully validated job.
#[derive(Debug, Clone)]
pub struct Job {
    pub kind: Kind,
    pub expr: String,
    /// Grid axes in canonical variable order.
    pub grid: Vec<(Var, GridSpec)>,
    pub diff: DiffConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

/// Inline flag values collected by the argument parser.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub expr: Option<String>,
    pub grid: Vec<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    pub step: Option<f64>,
    pub exact: bool,
}

fn parse_grid_flag(s: &str) -> Result<(String, GridSpec), String> {
    let (var, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("grid `{s}` is not of the form var=min:max:count"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{s}` is not of the form var=min:max:count"));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| format!("grid `{s}`: bad min `{}`", parts[0]))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| format!("grid `{s}`: bad max `{}`", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("grid `{s}`: bad count `{}`", parts[2]))?;
    Ok((var.to_string(), GridSpec { min, max, count }))
}

/// Canonical variable order for grid iteration (the last one varies fastest).
fn canonical_order(kind: Kind) -> &'static [Var] {
    match kind {
        Kind::Frame | Kind::Forms | Kind::Regular => &[Var::T, Var::U, Var::V, Var::W],
        Kind::CrCheck | Kind::Eval => &[Var::X0, Var::X1, Var::X2, Var::X3],
        Kind::CrCheckPolar => &[Var::Rho, Var::Theta, Var::Phi, Var::Xi],
    }
}

/// The parameter signature a grid over `t/u/v/w` selects.
pub fn signature_from_grid(vars: &[Var]) -> Result<usize, String> {
    let has = |v: Var| vars.contains(&v);
    match (has(Var::T), has(Var::U), has(Var::V), has(Var::W)) {
        (true, false, false, false) => Ok(1),
        (false, true, true, false) => Ok(2),
        (false, true, true, true) => Ok(3),
        _ => Err(
            "grid must cover exactly one parameter signature: {t}, {u, v}, or {u, v, w}"
                .to_string(),
        ),
    }
}

pub fn resolve(
    kind: Kind,
    file: Option<JobConfigFile>,
    flags: Overrides,
) -> Result<Job, String> {
    let file = file.unwrap_or_default();

    if let Some(k) = &file.kind {
        if Kind::from_name(k) != Some(kind) {
            return Err(format!(
                "config kind `{k}` does not match the `{}` subcommand",
                kind.name()
            ));
        }
    }

    let expr = flags
        .expr
        .or(file.expr)
        .ok_or("no expression given (use --expr or the config `expr` field)")?;

    // merge grids: flags override per-variable
    let mut grid_map: BTreeMap<String, GridSpec> = file.grid;
    for g in &flags.grid {
        let (var, spec) = parse_grid_flag(g)?;
        grid_map.insert(var, spec);
    }
    let allowed = canonical_order(kind);
    let mut grid = Vec::new();
    for var in allowed {
        if let Some(spec) = grid_map.remove(var.name()) {
            grid.push((*var, spec));
        }
    }
    if let Some((name, _)) = grid_map.into_iter().next() {
        return Err(format!(
            "grid variable `{name}` is not valid for `{}`",
            kind.name()
        ));
    }
    if let Some(params) = &file.params {
        let declared: Vec<&str> = params.iter().map(String::as_str).collect();
        let gridded: Vec<&str> = grid.iter().map(|(v, _)| v.name()).collect();
        if declared != gridded {
            return Err(format!(
                "declared params [{}] do not match the grid variables [{}]",
                declared.join(", "),
                gridded.join(", ")
            ));
        }
    }
    for (var, spec) in &grid {
        if spec.count < 1 {
            return Err(format!("grid {}: count must be at least 1", var.name()));
        }
        if !(spec.min.is_finite() && spec.max.is_finite() && spec.min <= spec.max) {
            return Err(format!(
                "grid {}: need finite min <= max, got {}:{}",
                var.name(),
                spec.min,
                spec.max
            ));
        }
    }
    if kind == Kind::Eval && !grid.is_empty() {
        return Err("eval takes no grid".to_string());
    }

    // differentiation settings
    let spec = file.diff.unwrap_or_default();
    let mut diff = DiffConfig::default();
    if let Some(s) = &spec.scheme {
        diff.scheme = match s.as_str() {
            "central" => DiffScheme::Central,
            "exact" => DiffScheme::Exact,
            other => return Err(format!("unknown diff scheme `{other}`")),
        };
    }
    if let Some(s) = spec.step {
        diff.step = s;
    }
    if let Some(r) = spec.richardson {
        diff.richardson = r;
    }
    if let Some(s) = flags.step {
        diff.step = s;
    }
    if flags.exact {
        diff.scheme = DiffScheme::Exact;
    }
    if !(diff.step > 0.0 && diff.step.is_finite()) {
        return Err(format!("step must be positive, got {}", diff.step));
    }

    let format_name = flags
        .format
        .or(file.format)
        .unwrap_or_else(|| {
            if kind == Kind::Eval { "json" } else { "csv" }.to_string()
        });
    let format = match format_name.as_str() {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(format!("unknown format `{other}` (csv or json)")),
    };

    let out = flags.out.or(file.out.map(PathBuf::from));

    let threads = match flags.threads.or(file.threads) {
        Some(n) => n,
        None => match std::env::var("HDG_THREADS") {
            Ok(v) => v
                .parse::<usize>()
                .map_err(|_| format!("HDG_THREADS=`{v}` is not a thread count"))?,
            Err(std::env::VarError::NotPresent) => 1,
            Err(e) => return Err(format!("HDG_THREADS: {e}")),
        },
    };
    if threads < 1 {
        return Err("threads must be at least 1".to_string());
    }

    Ok(Job {
        kind,
        expr,
        grid,
        diff,
        format,
        out,
        threads,
    })
}

pub fn load_config_file(path: &std::path::Path) -> Result<JobConfigFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag_parsing() {
        let (var, spec) = parse_grid_flag("t=0:6.28:8").unwrap();
        assert_eq!(var, "t");
        assert_eq!(spec.count, 8);
        assert!(parse_grid_flag("t=0:1").is_err());
        assert!(parse_grid_flag("t0:1:2").is_err());
        assert!(parse_grid_flag("t=a:1:2").is_err());
    }

    #[test]
    fn grid_values_inclusive() {
        let spec = GridSpec {
            min: 0.0,
            max: 1.0,
            count: 5,
        };
        assert_eq!(spec.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let single = GridSpec {
            min: 2.0,
            max: 2.0,
            count: 1,
        };
        assert_eq!(single.values(), vec![2.0]);
    }

    #[test]
    fn signature_inference() {
        assert_eq!(signature_from_grid(&[Var::T]).unwrap(), 1);
        assert_eq!(signature_from_grid(&[Var::U, Var::V]).unwrap(), 2);
        assert_eq!(signature_from_grid(&[Var::U, Var::V, Var::W]).unwrap(), 3);
        assert!(signature_from_grid(&[Var::T, Var::U]).is_err());
        assert!(signature_from_grid(&[Var::V]).is_err());
    }

    #[test]
    fn resolve_applies_overrides() {
        let file = JobConfigFile {
            kind: Some("frame".to_string()),
            params: Some(vec!["t".to_string()]),
            expr: Some("cos(t) + i*sin(t)".to_string()),
            grid: BTreeMap::from([(
                "t".to_string(),
                GridSpec {
                    min: 0.0,
                    max: 1.0,
                    count: 4,
                },
            )]),
            diff: Some(DiffSpec {
                scheme: Some("central".into()),
                step: Some(1e-5),
                richardson: None,
            }),
            format: Some("csv".into()),
            out: None,
            threads: Some(2),
        };
        let flags = Overrides {
            step: Some(1e-6),
            exact: true,
            grid: vec!["t=0:2:3".to_string()],
            ..Default::default()
        };
        let job = resolve(Kind::Frame, Some(file), flags).unwrap();
        assert_eq!(job.diff.step, 1e-6);
        assert_eq!(job.diff.scheme, DiffScheme::Exact);
        assert_eq!(job.grid[0].1.count, 3);
        assert_eq!(job.threads, 2);

        // kind mismatch is a config error
        let file = JobConfigFile {
            kind: Some("eval".to_string()),
            ..Default::default()
        };
        assert!(resolve(Kind::Frame, Some(file), Overrides::default()).is_err());
    }

    #[test]
    fn eval_rejects_grids() {
        let flags = Overrides {
            expr: Some("i*j".into()),
            grid: vec!["x0=0:1:2".into()],
            ..Default::default()
        };
        assert!(resolve(Kind::Eval, None, flags).is_err());
    }
}
