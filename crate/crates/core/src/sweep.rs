//! Parallel parameter sweeps with deterministic, row-major output.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::critical_nu0;
use crate::error::{Error, Result};
use crate::normalform::hopf_coefficients;
use crate::params::ModelParams;
use crate::regions::{classify, detect_scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Rho,
    H,
    Alpha,
    Beta,
    Theta1,
    Theta2,
    Nu0,
}

impl ParamName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParamName::Rho => "rho",
            ParamName::H => "h",
            ParamName::Alpha => "alpha",
            ParamName::Beta => "beta",
            ParamName::Theta1 => "theta1",
            ParamName::Theta2 => "theta2",
            ParamName::Nu0 => "nu0",
        }
    }

    fn set(&self, p: &mut ModelParams, v: f64) {
        match self {
            ParamName::Rho => p.rho = v,
            ParamName::H => p.h = v,
            ParamName::Alpha => p.alpha = v,
            ParamName::Beta => p.beta = v,
            ParamName::Theta1 => p.theta1 = v,
            ParamName::Theta2 => p.theta2 = v,
            ParamName::Nu0 => p.nu0 = v,
        }
    }
}

impl FromStr for ParamName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" => ParamName::Rho,
            "h" => ParamName::H,
            "alpha" => ParamName::Alpha,
            "beta" => ParamName::Beta,
            "theta1" => ParamName::Theta1,
            "theta2" => ParamName::Theta2,
            "nu0" => ParamName::Nu0,
            _ => return Err(Error::Parse(format!("unknown parameter '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: ParamName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }
}

impl FromStr for Axis {
    type Err = Error;
    /// `name:min:max:count`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "axis '{s}' must look like name:min:max:count"
            )));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{t}' in axis '{s}'")))
        };
        Ok(Axis {
            name: parts[0].parse()?,
            min: num(parts[1])?,
            max: num(parts[2])?,
            count: parts[3]
                .parse()
                .map_err(|_| Error::Parse(format!("bad count in axis '{s}'")))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepTask {
    Classify,
    Coeffs,
    Scenario,
}

impl FromStr for SweepTask {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(SweepTask::Classify),
            "coeffs" => Ok(SweepTask::Coeffs),
            "scenario" => Ok(SweepTask::Scenario),
            _ => Err(Error::Parse(format!("unknown sweep task '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub task: SweepTask,
    #[serde(default)]
    pub k_max: Option<i32>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(Error::InvalidParam {
                name: "axes",
                reason: "between one and three axes are required".into(),
            });
        }
        for a in &self.axes {
            if a.count == 0 || !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::InvalidParam {
                    name: "axes",
                    reason: format!(
                        "axis {} needs finite bounds and count >= 1",
                        a.name.as_str()
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Axis indices of cell `n` in row-major order.
    fn indices(&self, mut n: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (slot, a) in idx.iter_mut().zip(self.axes.iter()).rev() {
            *slot = n % a.count;
            n /= a.count;
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn task_columns(task: SweepTask) -> &'static [&'static str] {
    match task {
        SweepTask::Classify => &["region", "mode0_imag_count"],
        SweepTask::Scenario => &["scenario", "witnesses", "nu0_critical"],
        SweepTask::Coeffs => &[
            "nu0_critical",
            "s",
            "tau1",
            "c2_1",
            "d1_0",
            "classification",
            "region",
            "mode0_imag_count",
            "scenario",
        ],
    }
}

/// Result columns of one task at one parameter point.
pub fn evaluate_cell(task: SweepTask, p: &ModelParams, k_max: Option<i32>) -> Result<Vec<String>> {
    p.validate()?;
    match task {
        SweepTask::Classify => {
            let l = classify(p.beta, p.alpha, p.rho, p.h, p.theta1);
            Ok(vec![
                l.region.as_str().to_string(),
                l.mode0_imag_count.to_string(),
            ])
        }
        SweepTask::Scenario => {
            let r = detect_scenario(p, k_max)?;
            Ok(vec![
                r.scenario.as_str().to_string(),
                r.witnesses.len().to_string(),
                r.nu0_critical.map(|v| format!("{v}")).unwrap_or_default(),
            ])
        }
        SweepTask::Coeffs => {
            let t = critical_nu0(p)?;
            let q = p.with_nu0(t.nu0);
            let c = hopf_coefficients(&q, t.s)?;
            let l = classify(q.beta, q.alpha, q.rho, q.h, q.theta1);
            let scenario = match detect_scenario(&q, k_max) {
                Ok(r) => r.scenario.as_str().to_string(),
                Err(e) => format!("error:{}", e.tag()),
            };
            Ok(vec![
                format!("{}", t.nu0),
                format!("{}", t.s),
                format!("{}", c.tau1),
                format!("{}", c.c2_1),
                format!("{}", c.d1_0),
                c.classification().as_str().to_string(),
                l.region.as_str().to_string(),
                l.mode0_imag_count.to_string(),
                scenario,
            ])
        }
    }
}

/// Evaluates the task over the grid with `threads` workers. Failed cells
/// carry `error:<tag>` in the first result column.
pub fn sweep(spec: &SweepSpec, base: &ModelParams, threads: usize) -> Result<SweepTable> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParam {
            name: "threads",
            reason: e.to_string(),
        })?;
    let cols = task_columns(spec.task);
    let mut header: Vec<String> = spec
        .axes
        .iter()
        .map(|a| a.name.as_str().to_string())
        .collect();
    header.extend(cols.iter().map(|c| c.to_string()));

    let n = spec.cell_count();
    let rows: Vec<Vec<String>> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|cell| {
                let mut p = *base;
                let mut row = Vec::with_capacity(header.len());
                for (a, i) in spec.axes.iter().zip(spec.indices(cell)) {
                    let v = a.value(i);
                    a.name.set(&mut p, v);
                    row.push(format!("{v}"));
                }
                match evaluate_cell(spec.task, &p, spec.k_max) {
                    Ok(vals) => row.extend(vals),
                    Err(e) => {
                        row.push(format!("error:{}", e.tag()));
                        row.extend(std::iter::repeat_n(String::new(), cols.len() - 1));
                    }
                }
                row
            })
            .collect()
    });
    Ok(SweepTable { header, rows })
}

/// Convenience for `--grid AxB`: two axes with the given counts.
pub fn grid_counts(text: &str) -> Result<Vec<usize>> {
    let counts: Result<Vec<usize>> = text
        .split(['x', 'X'])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad grid '{text}'")))
        })
        .collect();
    let counts = counts?;
    if counts.is_empty() || counts.len() > 3 || counts.contains(&0) {
        return Err(Error::Parse(format!("bad grid '{text}'")));
    }
    Ok(counts)
}

/// Renders a table cell value the way the sweep does.
pub fn fmt_value(v: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "{v}");
    s
}
