use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use iwave_core::dispersion::{branch_extent, critical_nu0, mode_eigenvalues, sample_branch};
use iwave_core::dynamics::{
    doubly_periodic_branch, find_bright_homoclinic, find_dark_envelope, find_periodic_orbit,
    integrate, AmplitudeTerms, OrbitKind, ReducedOrbit, ReducedState,
};
use iwave_core::normalform::{doubly_periodic_coefficients, hopf_coefficients, HopfCoefficients};
use iwave_core::params::ParamsFile;
use iwave_core::regions::{curve_points, detect_scenario, Curve, Scenario, ScenarioReport};
use iwave_core::sweep::{grid_counts, sweep, Axis, ParamName, SweepSpec, SweepTask};
use iwave_core::wavefield::{synthesize_doubly_periodic, synthesize_envelope_wave, FieldGrid};
use iwave_core::{BifurcationOffsets, Error, ModelParams, C64};

#[derive(Parser, Debug)]
#[command(
    name = "iwave",
    version,
    about = "Spectra and bifurcations of 3D internal gravity-capillary waves"
)]
struct Cli {
    /// Worker threads for parallel work.
    #[arg(long, global = true, env = "IWAVE_THREADS")]
    threads: Option<usize>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real dispersion branch and imaginary mode roots.
    Disprel {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 3)]
        k_max: i32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Region map over a (beta, alpha) grid.
    Regions {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value = "50x50")]
        grid: String,
        /// beta range as min:max (default: up to twice the star point).
        #[arg(long)]
        beta_range: Option<String>,
        /// alpha range as min:max (default: up to twice the line height).
        #[arg(long)]
        alpha_range: Option<String>,
    },
    /// Samples of the boundary curves.
    Curves {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        beta_max: Option<f64>,
        /// Also emit C1, whose parameter range is uncertain.
        #[arg(long)]
        with_c1: bool,
    },
    /// Bifurcation scenario and its spectral witnesses.
    Scenario {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        k_max: Option<i32>,
    },
    /// Normal-form coefficients.
    Coeffs {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = ScenarioArg::Auto)]
        scenario: ScenarioArg,
        #[command(flatten)]
        extra: ExtraCoeffs,
    },
    /// Orbits of the reduced system.
    Orbit {
        #[command(flatten)]
        source: CoeffSource,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long, default_value = "bright")]
        kind: String,
        /// Modulus of the periodic orbit.
        #[arg(long, default_value_t = 0.05)]
        amp: f64,
        /// Initial state Re A, Im A, Re B, Im B for a trajectory.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        init: Option<Vec<f64>>,
        /// Integration window end for a trajectory.
        #[arg(long, default_value_t = 10.0)]
        x_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Resample to this many uniform points.
        #[arg(long)]
        resample: Option<usize>,
    },
    /// Interface elevation on an (x, z) grid.
    Wavefield {
        #[command(flatten)]
        source: CoeffSource,
        #[arg(long, value_enum, default_value_t = FieldKind::Envelope)]
        field: FieldKind,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        /// bright or dark
        #[arg(long, default_value = "bright")]
        kind: String,
        #[arg(long, default_value = "201x41")]
        grid: String,
        #[arg(long, default_value_t = 0.01)]
        amp_a: f64,
        #[arg(long, default_value_t = 0.01)]
        amp_b: f64,
        #[arg(long, default_value_t = 2.0)]
        x_periods: f64,
        /// x, z, eta triples instead of a matrix.
        #[arg(long)]
        long: bool,
    },
    /// Parallel grid sweep.
    Sweep {
        #[arg(long)]
        params: PathBuf,
        /// name:min:max:count, repeatable, at most three.
        #[arg(long = "axis", required = true, allow_hyphen_values = true)]
        axes: Vec<String>,
        /// Counts overriding those of the axes, e.g. 50x50.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value = "classify")]
        task: String,
        #[arg(long)]
        k_max: Option<i32>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Auto,
    Hopf,
    Resonance,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FieldKind {
    Envelope,
    DoublyPeriodic,
}

#[derive(Args, Debug)]
struct ExtraCoeffs {
    #[arg(long, allow_hyphen_values = true)]
    c3_1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d2_0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d3_0: Option<f64>,
}

#[derive(Args, Debug)]
struct CoeffSource {
    #[arg(long)]
    params: Option<PathBuf>,
    /// JSON with s, c2_1, d1_0 and optionally tau1, c3_1, d2_0, d3_0.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    #[command(flatten)]
    extra: ExtraCoeffs,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Convergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_convergence() {
            Failure::Convergence(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn read_params(path: &Path) -> Res<(ModelParams, BifurcationOffsets)> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(ParamsFile::from_json(&text)?.split()?)
}

fn read_coeffs(path: &Path) -> Res<HopfCoefficients> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn range(text: &str) -> Res<(f64, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || invalid(format!("bad range '{text}', expected min:max"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let a = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let b = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    Ok((a, b))
}

fn params_comments(p: &ModelParams) -> Vec<String> {
    vec![
        format!("rho={}", p.rho),
        format!("h={}", p.h),
        format!("alpha={}", p.alpha),
        format!("beta={}", p.beta),
        format!("theta1={}", p.theta1),
        format!("theta2={}", p.theta2),
        format!("nu0={}", p.nu0),
    ]
}

/// Tangency used for Hopf coefficients: the detected double root when the
/// parameters already sit on it, the critical nu0 otherwise.
fn hopf_point(p: &ModelParams) -> Res<(ModelParams, f64)> {
    if let Ok(r) = detect_scenario(p, None) {
        if r.scenario == Scenario::HamiltonianHopfMode1 {
            if let Some(w) = r.witnesses.iter().find(|w| w.k == 1 && w.mult == 2) {
                return Ok((*p, w.s));
            }
        }
    }
    let t = critical_nu0(p)?;
    Ok((p.with_nu0(t.nu0), t.s))
}

fn apply_extra(mut c: HopfCoefficients, e: &ExtraCoeffs) -> HopfCoefficients {
    if let Some(v) = e.c3_1 {
        c.c3_1 = v;
    }
    if let Some(v) = e.d2_0 {
        c.d2_0 = v;
    }
    if let Some(v) = e.d3_0 {
        c.d3_0 = v;
    }
    c
}

struct Resolved {
    params: Option<(ModelParams, BifurcationOffsets)>,
    coeffs: Option<HopfCoefficients>,
}

fn resolve(src: &CoeffSource) -> Res<Resolved> {
    let params = src.params.as_deref().map(read_params).transpose()?;
    let coeffs = match (&src.coeffs, &params) {
        (Some(path), _) => Some(read_coeffs(path)?),
        (None, Some((p, _))) => {
            let (q, s) = hopf_point(p)?;
            Some(hopf_coefficients(&q, s)?)
        }
        (None, None) => None,
    };
    Ok(Resolved {
        params,
        coeffs: coeffs.map(|c| apply_extra(c, &src.extra)),
    })
}

fn build_orbit(
    c: &HopfCoefficients,
    kind: OrbitKind,
    mu: f64,
    amp: f64,
    init: &Option<Vec<f64>>,
    x_end: f64,
    tol: f64,
) -> Res<ReducedOrbit> {
    Ok(match kind {
        OrbitKind::Bright => find_bright_homoclinic(c, mu)?,
        OrbitKind::Dark => find_dark_envelope(c, mu)?,
        OrbitKind::Periodic => find_periodic_orbit(c, mu, amp)?,
        OrbitKind::Trajectory => {
            let v = init
                .as_ref()
                .ok_or_else(|| invalid("a trajectory needs --init ReA,ImA,ReB,ImB"))?;
            if v.len() != 4 {
                return Err(invalid("--init takes four numbers"));
            }
            let st = ReducedState::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]));
            integrate(c, mu, st, (0.0, x_end), tol)?
        }
    })
}

fn scenario_json(r: &ScenarioReport) -> Value {
    let pts = |v: &[iwave_core::dispersion::SpectralPoint]| -> Vec<Value> {
        v.iter()
            .map(|w| json!({"k": w.k, "s": w.s, "mult": w.mult}))
            .collect()
    };
    json!({
        "scenario": r.scenario.as_str(),
        "nu0_critical": r.nu0_critical,
        "kappa0": r.kappa0(),
        "mode1_s": r.mode1_s(),
        "witnesses": pts(&r.witnesses),
        "spectrum": pts(&r.spectrum),
    })
}

fn hopf_json(p: &ModelParams, c: &HopfCoefficients) -> Value {
    json!({
        "scenario": "hopf",
        "nu0": p.nu0,
        "s": c.s,
        "tau1": c.tau1,
        "c2_1": c.c2_1,
        "d1_0": c.d1_0,
        "c3_1": c.c3_1,
        "d2_0": c.d2_0,
        "d3_0": c.d3_0,
        "classification": c.classification().as_str(),
    })
}

fn run(cli: Cli) -> Res<()> {
    let threads = cli.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    if threads == 0 {
        return Err(invalid("--threads must be positive"));
    }
    // the global pool serves field synthesis; sweeps build their own
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    let out = &cli.out;

    match cli.cmd {
        Command::Disprel {
            params,
            k_max,
            samples,
        } => {
            let (p, _) = read_params(&params)?;
            let extent = branch_extent(&p)?;
            let branch: Vec<Value> = sample_branch(&p, extent, samples)
                .iter()
                .map(|b| json!({"a": b.a, "l1_sq": b.l1_sq, "l2_sq": b.l2_sq, "valid": b.valid}))
                .collect();
            let mut roots = Vec::new();
            for k in -k_max.abs()..=k_max.abs() {
                for r in mode_eigenvalues(&p, k)? {
                    roots.push(json!({"k": r.k, "s": r.s, "mult": r.mult}));
                }
            }
            write_out(
                out,
                &json_text(&json!({"extent": extent, "branch": branch, "roots": roots})),
            )
        }
        Command::Regions {
            params,
            grid,
            beta_range,
            alpha_range,
        } => {
            let (p, _) = read_params(&params)?;
            let counts = grid_counts(&grid)?;
            if counts.len() != 2 {
                return Err(invalid("--grid must be AxB"));
            }
            let c_sq = p.cos1().powi(2);
            let centred = |top: f64, n: usize| (0.5 * top / n as f64, top * (1.0 - 0.5 / n as f64));
            let (b0, b1) = match beta_range {
                Some(t) => range(&t)?,
                None => centred(2.0 * c_sq * (p.rho + p.h) / 3.0, counts[0]),
            };
            let (a0, a1) = match alpha_range {
                Some(t) => range(&t)?,
                None => centred(2.0 * c_sq * (p.rho + 1.0 / p.h), counts[1]),
            };
            let spec = SweepSpec {
                axes: vec![
                    Axis {
                        name: ParamName::Beta,
                        min: b0,
                        max: b1,
                        count: counts[0],
                    },
                    Axis {
                        name: ParamName::Alpha,
                        min: a0,
                        max: a1,
                        count: counts[1],
                    },
                ],
                task: SweepTask::Classify,
                k_max: None,
            };
            let mut table = sweep(&spec, &p, threads)?;
            if let Some(i) = table.column("region") {
                table.header[i] = "label".into();
            }
            write_out(out, &table.to_csv())
        }
        Command::Curves {
            params,
            samples,
            beta_max,
            with_c1,
        } => {
            let (p, _) = read_params(&params)?;
            let bmax = beta_max.unwrap_or(2.0 * p.star_beta());
            let mut curves = vec![Curve::C2, Curve::C3, Curve::C4];
            if with_c1 {
                curves.insert(0, Curve::C1);
            }
            let mut text = String::from("curve,beta,alpha\n");
            for c in curves {
                for (b, a) in curve_points(c, p.rho, p.h, p.theta1, samples, bmax) {
                    text.push_str(&format!("{c:?},{b},{a}\n"));
                }
            }
            write_out(out, &text)
        }
        Command::Scenario { params, k_max } => {
            let (p, _) = read_params(&params)?;
            let r = detect_scenario(&p, k_max)?;
            write_out(out, &json_text(&scenario_json(&r)))
        }
        Command::Coeffs {
            params,
            scenario,
            extra,
        } => {
            let (p, _) = read_params(&params)?;
            let detected = detect_scenario(&p, None).ok();
            let want = match scenario {
                ScenarioArg::Auto => match detected.as_ref().map(|r| r.scenario) {
                    Some(Scenario::Resonance00IsIkappa0) => ScenarioArg::Resonance,
                    _ => ScenarioArg::Hopf,
                },
                s => s,
            };
            let v = if want == ScenarioArg::Hopf {
                let (q, s) = hopf_point(&p)?;
                let c = apply_extra(hopf_coefficients(&q, s)?, &extra);
                hopf_json(&q, &c)
            } else {
                let r = match detected {
                    Some(r) if r.scenario == Scenario::Resonance00IsIkappa0 => r,
                    _ => {
                        return Err(Error::OutsideScenario(
                            "parameters are not at a 00(is)(ikappa0) point".into(),
                        )
                        .into())
                    }
                };
                let kappa0 = r.kappa0().ok_or_else(|| invalid("no mode-0 witness"))?;
                let dp = doubly_periodic_coefficients(&p, kappa0, p.nu0)?;
                json!({
                    "scenario": "resonance",
                    "kappa0": dp.kappa0,
                    "nu0": dp.nu0,
                    "d1_01": dp.d1_01,
                    "d2_01": dp.d2_01,
                    "d2_10": dp.d2_10,
                    "d1_10": dp.d1_10,
                    "d1_01_quadrature": dp.d1_01_quadrature,
                    "d2_01_quadrature": dp.d2_01_quadrature,
                    "beta_tilde": dp.beta_tilde,
                    "determinant": dp.determinant(),
                })
            };
            write_out(out, &json_text(&v))
        }
        Command::Orbit {
            source,
            mu,
            kind,
            amp,
            init,
            x_end,
            tol,
            resample,
        } => {
            let r = resolve(&source)?;
            let c = r
                .coeffs
                .ok_or_else(|| invalid("orbit needs --coeffs or --params"))?;
            let mu = mu
                .or(r.params.map(|(_, o)| o.mu1))
                .ok_or_else(|| invalid("missing --mu"))?;
            let kind: OrbitKind = kind.parse()?;
            let orbit = build_orbit(&c, kind, mu, amp, &init, x_end, tol)?;
            let samples = match resample {
                Some(n) => orbit.resample(n),
                None => orbit.samples.clone(),
            };
            let mut text = format!(
                "# kind={} mu={} s={} c2_1={} d1_0={} hamiltonian_drift={:e}\nx,ReA,ImA,ReB,ImB,absA\n",
                kind.as_str(),
                mu,
                c.s,
                c.c2_1,
                c.d1_0,
                orbit.hamiltonian_drift
            );
            for (x, st) in samples {
                text.push_str(&format!(
                    "{x},{},{},{},{},{}\n",
                    st.a.re,
                    st.a.im,
                    st.b.re,
                    st.b.im,
                    st.a.norm()
                ));
            }
            write_out(out, &text)
        }
        Command::Wavefield {
            source,
            field,
            mu,
            kind,
            grid,
            amp_a,
            amp_b,
            x_periods,
            long,
        } => {
            let counts = grid_counts(&grid)?;
            if counts.len() != 2 {
                return Err(invalid("--grid must be NXxNZ"));
            }
            let (nx, nz) = (counts[0], counts[1]);
            let (g, p, mut comments): (FieldGrid, ModelParams, Vec<String>) = match field {
                FieldKind::Envelope => {
                    let r = resolve(&source)?;
                    let (p, off) = r
                        .params
                        .ok_or_else(|| invalid("wavefield needs --params"))?;
                    let c = r.coeffs.expect("params imply coefficients");
                    let q = if source.coeffs.is_some() {
                        p
                    } else {
                        hopf_point(&p)?.0
                    };
                    let mu = mu.unwrap_or(off.mu1);
                    let kind: OrbitKind = kind.parse()?;
                    if !matches!(kind, OrbitKind::Bright | OrbitKind::Dark) {
                        return Err(invalid("envelope fields need --kind bright or dark"));
                    }
                    let orbit = build_orbit(&c, kind, mu, 0.0, &None, 0.0, 1e-10)?;
                    let g = synthesize_envelope_wave(&q, &orbit, c.s, nx, nz)?;
                    let extra = vec![format!(
                        "field=envelope kind={} mu={mu} s={} c2_1={} d1_0={}",
                        kind.as_str(),
                        c.s,
                        c.c2_1,
                        c.d1_0
                    )];
                    (g, q, extra)
                }
                FieldKind::DoublyPeriodic => {
                    let path = source
                        .params
                        .as_deref()
                        .ok_or_else(|| invalid("wavefield needs --params"))?;
                    let (p, _) = read_params(path)?;
                    let r = detect_scenario(&p, None)?;
                    if r.scenario != Scenario::Resonance00IsIkappa0 {
                        return Err(Error::OutsideScenario(
                            "parameters are not at a 00(is)(ikappa0) point".into(),
                        )
                        .into());
                    }
                    let kappa0 = r.kappa0().ok_or_else(|| invalid("no mode-0 witness"))?;
                    let dp = doubly_periodic_coefficients(&p, kappa0, p.nu0)?;
                    let b = doubly_periodic_branch(&dp, amp_a, amp_b, &AmplitudeTerms::default())?;
                    let g = synthesize_doubly_periodic(&p, &dp, &b, nx, nz, x_periods)?;
                    let extra = vec![format!(
                        "field=doubly-periodic amp_a={amp_a} amp_b={amp_b} mu1={} mu2={} period_x={} period_z={}",
                        b.mu1, b.mu2, b.period_x, b.period_z
                    )];
                    (g, p, extra)
                }
            };
            let mut all = params_comments(&p);
            all.append(&mut comments);
            let text = if long {
                g.to_csv_long(&all)
            } else {
                g.to_csv_matrix(&all)
            };
            write_out(out, &text)
        }
        Command::Sweep {
            params,
            axes,
            grid,
            task,
            k_max,
        } => {
            let (p, _) = read_params(&params)?;
            let mut axes: Vec<Axis> = axes
                .iter()
                .map(|a| a.parse())
                .collect::<iwave_core::Result<_>>()?;
            if let Some(g) = grid {
                let counts = grid_counts(&g)?;
                if counts.len() != axes.len() {
                    return Err(invalid("--grid must give one count per axis"));
                }
                for (a, n) in axes.iter_mut().zip(counts) {
                    a.count = n;
                }
            }
            let spec = SweepSpec {
                axes,
                task: task.parse()?,
                k_max,
            };
            let table = sweep(&spec, &p, threads)?;
            write_out(out, &table.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("iwave: error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Convergence(m)) => {
            eprintln!("iwave: convergence failure: {m}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert!(matches!(range("0.1:2"), Ok((a, b)) if a == 0.1 && b == 2.0));
        assert!(range("1").is_err());
        assert!(range("a:b").is_err());
    }

    #[test]
    fn failure_kinds() {
        assert!(matches!(
            Failure::from(Error::StepFailure(1.0)),
            Failure::Convergence(_)
        ));
        assert!(matches!(
            Failure::from(Error::ExcludedAngle),
            Failure::Validation(_)
        ));
    }
}
