//! Command-line front end: metric selection, subcommands, report files,
//! exit codes.
//!
//! Exit status contract: 0 = all verdicts pass, 2 = a verdict failed,
//! 1 = execution error. Reports are deterministic for a fixed seed.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::connection::{self, PointJets};
use crate::curvature::{self, CurvatureData};
use crate::dynamics::{self, BonnetOptions, TrajectorySummary};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::metrics::{MetricSpec, TangentPoint};
use crate::sample;
use crate::schwarzian::{self, IntegrabilityReport};
use crate::tensor::Tensor;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT_FAILED: i32 = 2;

#[derive(Parser)]
#[command(
    name = "finsler",
    version,
    about = "Numerical Finsler geometry: connection and curvature tensors, \
             Schwarzian/Möbius integrability checks, geodesics, conjugate \
             points, and projective parameters",
    after_help = "The FINSLER_MAX_ORDER environment variable (1..=5, \
                  default 4) overrides the derivative depth of the engine."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct MetricArgs {
    /// Catalog metric: euclidean|flat|sphere|hyperbolic|funk|randers.
    #[arg(long)]
    metric: Option<String>,

    /// Chart dimension.
    #[arg(long, default_value_t = 2)]
    n: usize,

    /// Numeric catalog parameter, repeatable (e.g. --param kappa=4,
    /// --param b1=0.5).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,

    /// JSON metric config file with keys kind, dimension, params,
    /// domain_radius; overrides --metric.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl MetricArgs {
    fn build(&self) -> Result<MetricSpec> {
        if let Some(path) = &self.config {
            return MetricSpec::from_config_file(path);
        }
        let name = self
            .metric
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("pass --metric NAME or --config FILE".into()))?;
        let mut params = BTreeMap::new();
        for kv in &self.params {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("--param expects KEY=VALUE, got `{kv}`"))
            })?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad numeric value in `{kv}`")))?;
            params.insert(k.to_string(), v);
        }
        MetricSpec::from_catalog(name, self.n, &params)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the structured report here.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report serialization.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate F, g, the connection, and all curvature tensors at a point.
    Tensors {
        #[command(flatten)]
        metric: MetricArgs,
        /// Chart point, comma-separated.
        #[arg(long)]
        x: String,
        /// Tangent vector, comma-separated.
        #[arg(long)]
        y: String,
        /// Transverse flag edge for the flag curvature.
        #[arg(long)]
        flag: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the invariant suite and the Möbius integrability scan.
    Check {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Verdict tolerance for the integrability tensors.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Sampling radius for chart points.
        #[arg(long, default_value_t = 0.8)]
        radius: f64,
        /// Optional conformal factor expression to include a Schwarzian
        /// residual in the report.
        #[arg(long)]
        phi: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Integrate a unit-speed geodesic and export the trajectory.
    Geodesic {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        x: Option<String>,
        /// Initial direction (normalized to unit Finsler speed).
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Search the first conjugate point along a geodesic.
    Conjugate {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve the projective-parameter ODE along a geodesic.
    Projparam {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bonnet-Myers check: Ricci lower bound, Schwarzian equivalence, and
    /// conjugate distances against pi/sqrt(lambda).
    Bonnet {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 10)]
        geodesics: usize,
        #[arg(long)]
        length: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Base point of the sampled geodesics.
        #[arg(long)]
        start: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Möbius residual of a conformal factor plus the C-conformal residual.
    Mobius {
        #[command(flatten)]
        metric: MetricArgs,
        /// Conformal factor expression over x_1..x_n.
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        radius: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn parse_vec(src: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = src
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParameter(format!("bad {what} vector `{src}`")))?;
    if v.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{what} has {} entries, expected {n}",
            v.len()
        )));
    }
    Ok(v)
}

/// Default start data for trajectory commands when --x/--y are omitted;
/// chosen interior to every catalog chart and away from the polar rays of
/// the stereographic ones.
fn default_start(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.1; n];
    x[0] = 0.3;
    let mut y = vec![0.4; n];
    y[0] = 1.0;
    (x, y)
}

fn start_data(
    spec: &MetricSpec,
    x: &Option<String>,
    y: &Option<String>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = spec.dim();
    let (dx, dy) = default_start(n);
    let x = match x {
        Some(s) => parse_vec(s, n, "x")?,
        None => dx,
    };
    let dir = match y {
        Some(s) => parse_vec(s, n, "y")?,
        None => dy,
    };
    let y = dynamics::unit_direction(spec, &x, &dir)?;
    Ok((x, y))
}

fn write_report(out: &OutputArgs, json: String, csv: String) -> Result<()> {
    let body = match out.format {
        Format::Json => json,
        Format::Csv => csv,
    };
    match &out.out {
        Some(path) => std::fs::write(path, body)?,
        None => println!("{body}"),
    }
    Ok(())
}

fn dispatch(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Tensors {
            metric,
            x,
            y,
            flag,
            out,
        } => cmd_tensors(&metric.build()?, &x, &y, flag.as_deref(), &out),
        Cmd::Check {
            metric,
            points,
            seed,
            tol,
            radius,
            phi,
            out,
        } => cmd_check(
            &metric.build()?,
            points,
            seed,
            tol,
            radius,
            phi.as_deref(),
            &out,
        ),
        Cmd::Geodesic {
            metric,
            x,
            y,
            length,
            step,
            out,
        } => cmd_geodesic(&metric.build()?, &x, &y, length, step, &out),
        Cmd::Conjugate {
            metric,
            x,
            y,
            length,
            step,
            out,
        } => cmd_conjugate(&metric.build()?, &x, &y, length, step, &out),
        Cmd::Projparam {
            metric,
            x,
            y,
            length,
            step,
            out,
        } => cmd_projparam(&metric.build()?, &x, &y, length, step, &out),
        Cmd::Bonnet {
            metric,
            lambda,
            geodesics,
            length,
            step,
            seed,
            start,
            out,
        } => cmd_bonnet(
            &metric.build()?,
            lambda,
            geodesics,
            length,
            step,
            seed,
            start,
            &out,
        ),
        Cmd::Mobius {
            metric,
            phi,
            points,
            seed,
            radius,
            tol,
            out,
        } => cmd_mobius(&metric.build()?, &phi, points, seed, radius, tol, &out),
    }
}

#[derive(Serialize)]
struct TensorsReport {
    metric: String,
    x: Vec<f64>,
    y: Vec<f64>,
    f: f64,
    g: Tensor,
    g_inv: Tensor,
    spray: Vec<f64>,
    nonlinear: Tensor,
    gamma: Tensor,
    cartan_torsion: Tensor,
    chern_hh: Tensor,
    riemann: Tensor,
    ricci_scalar: f64,
    ricci_tensor: Tensor,
    flag_curvature: Option<f64>,
}

fn tensor_csv_rows(out: &mut String, name: &str, t: &Tensor) {
    for idx in t.indices() {
        let digits: String = idx.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("{name},{digits},{:.12e}\n", t.get(&idx)));
    }
}

fn cmd_tensors(
    spec: &MetricSpec,
    x: &str,
    y: &str,
    flag: Option<&str>,
    out: &OutputArgs,
) -> Result<i32> {
    let n = spec.dim();
    let tp = TangentPoint::new(parse_vec(x, n, "x")?, parse_vec(y, n, "y")?)?;
    let cd = connection::cartan_coefficients(spec, &tp)?;
    let cv = CurvatureData::compute(spec, &tp)?;
    let report = TensorsReport {
        metric: spec.name().to_string(),
        x: tp.x().to_vec(),
        y: tp.y().to_vec(),
        f: spec.eval_f(&tp)?,
        g: spec.fundamental_tensor(&tp)?,
        g_inv: spec.inverse_metric(&tp)?,
        spray: cd.spray.clone(),
        nonlinear: cd.nonlinear.clone(),
        gamma: cd.gamma.clone(),
        cartan_torsion: cd.cartan_upper.clone(),
        chern_hh: cv.chern.clone(),
        riemann: cv.riemann.clone(),
        ricci_scalar: cv.ricci,
        ricci_tensor: curvature::ricci_tensor(spec, &tp)?,
        flag_curvature: match flag {
            Some(f) => Some(curvature::flag_curvature(
                spec,
                &tp,
                &parse_vec(f, n, "flag")?,
            )?),
            None => None,
        },
    };
    println!(
        "{}: F = {:.9}, Ric = {:.9}{}",
        spec.name(),
        report.f,
        report.ricci_scalar,
        report
            .flag_curvature
            .map(|k| format!(", kappa = {k:.9}"))
            .unwrap_or_default()
    );
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    let mut csv = String::from("quantity,indices,value\n");
    csv.push_str(&format!("f,,{:.12e}\n", report.f));
    tensor_csv_rows(&mut csv, "g", &report.g);
    tensor_csv_rows(&mut csv, "g_inv", &report.g_inv);
    for (i, v) in report.spray.iter().enumerate() {
        csv.push_str(&format!("spray,{i},{v:.12e}\n"));
    }
    tensor_csv_rows(&mut csv, "nonlinear", &report.nonlinear);
    tensor_csv_rows(&mut csv, "gamma", &report.gamma);
    tensor_csv_rows(&mut csv, "cartan_torsion", &report.cartan_torsion);
    tensor_csv_rows(&mut csv, "chern_hh", &report.chern_hh);
    tensor_csv_rows(&mut csv, "riemann", &report.riemann);
    csv.push_str(&format!("ricci_scalar,,{:.12e}\n", report.ricci_scalar));
    tensor_csv_rows(&mut csv, "ricci_tensor", &report.ricci_tensor);
    if let Some(k) = report.flag_curvature {
        csv.push_str(&format!("flag_curvature,,{k:.12e}\n"));
    }
    write_report(out, json, csv)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CheckReport {
    metric: String,
    n_samples: usize,
    seed: u64,
    /// Worst observed violation per structural identity.
    invariants: BTreeMap<String, f64>,
    invariants_pass: bool,
    integrability: IntegrabilityReport,
}

fn cmd_check(
    spec: &MetricSpec,
    points: usize,
    seed: u64,
    tol: f64,
    radius: f64,
    phi: Option<&str>,
    out: &OutputArgs,
) -> Result<i32> {
    let phi = phi.map(ScalarField::parse).transpose()?;
    let pts = sample::tangent_points(spec, points, radius, seed)?;
    let n = spec.dim();

    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    let mut record = |key: &str, v: f64| {
        let e = worst.entry(key.to_string()).or_insert(0.0);
        if v > *e {
            *e = v;
        }
    };

    for tp in &pts {
        let f = spec.eval_f(tp)?;
        // 1-homogeneity of F.
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = tp.with_y(tp.y().iter().map(|v| v * lambda).collect())?;
            let fs = spec.eval_f(&scaled)?;
            record("f_homogeneity", (fs - lambda * f).abs() / (lambda * f));
        }
        let g = spec.fundamental_tensor(tp)?;
        // g y y = F^2.
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += g.get(&[i, j]) * tp.y()[i] * tp.y()[j];
            }
        }
        record("euler_g_yy_f2", (quad - f * f).abs() / (f * f));

        let pj = PointJets::new(spec, tp, 4)?;
        let gam = pj.gamma_values();
        let cart = pj.cartan_lower_values();
        let spray = pj.spray_values();
        let scale3 = 1.0 + gam.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // C_ijk y^k = 0 and Gamma y y = 2G.
        for i in 0..n {
            for j in 0..n {
                let c: f64 = (0..n).map(|k| cart[(i * n + j) * n + k] * tp.y()[k]).sum();
                record("cartan_y_annihilation", c.abs() / scale3);
            }
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    acc += gam[(i * n + j) * n + k] * tp.y()[j] * tp.y()[k];
                }
            }
            record(
                "gamma_yy_spray",
                (acc - 2.0 * spray[i]).abs() / (1.0 + spray[i].abs()),
            );
        }
        // Curvature identities.
        let chern = curvature::chern_hh(spec, tp)?;
        let rkm = curvature::spray_curvature(spec, tp)?;
        let riem = curvature::riemann_operator(spec, tp)?;
        let cscale = 1.0 + chern.sup_norm();
        for i in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let contracted: f64 =
                        (0..n).map(|j| chern.get(&[i, j, k, m]) * tp.y()[j]).sum();
                    record(
                        "ycontraction_chern_vs_spray",
                        (contracted - rkm.get(&[i, k, m])).abs() / cscale,
                    );
                }
            }
            let ry: f64 = (0..n).map(|k| riem.get(&[i, k]) * tp.y()[k]).sum();
            record("riemann_y_annihilation", ry.abs() / (1.0 + riem.sup_norm()));
        }
        // Metric compatibility of the h-covariant derivative of g.
        let gfield = {
            let spec = spec.clone();
            crate::fields::TensorField::new(
                vec![
                    crate::tensor::Variance::Lower,
                    crate::tensor::Variance::Lower,
                ],
                move |q| spec.fundamental_tensor(q),
            )
        };
        let nabla_g = connection::h_covariant(spec, &gfield, tp)?;
        record("metric_compatibility", nabla_g.sup_norm());
        // Trace identity of the 4-index Z tensor.
        let z = schwarzian::z_tensor(spec, tp)?;
        let ginv = spec.inverse_metric(tp)?;
        let zscale = 1.0 + z.sup_norm();
        for h in 0..n {
            for k in 0..n {
                let mut trace = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        trace += ginv.get(&[i, j]) * z.get(&[h, i, j, k]);
                    }
                }
                record("z_trace_identity", trace.abs() / zscale);
            }
        }
    }

    let invariants_pass = worst.values().all(|v| *v <= 1e-6);
    let integrability = schwarzian::integrability_report(spec, &pts, phi.as_ref(), tol)?;
    let verdicts_pass = integrability.verdicts.z
        && integrability.verdicts.z_scalar
        && integrability.verdicts.mobius.unwrap_or(true);
    let report = CheckReport {
        metric: spec.name().to_string(),
        n_samples: pts.len(),
        seed,
        invariants: worst,
        invariants_pass,
        integrability,
    };
    println!(
        "{}: invariants {}, integrability z = {}, z_scalar = {} (sup_Z = {:.3e}, sup_Zscalar = {:.3e})",
        spec.name(),
        if report.invariants_pass { "pass" } else { "FAIL" },
        report.integrability.verdicts.z,
        report.integrability.verdicts.z_scalar,
        report.integrability.sup_z,
        report.integrability.sup_zscalar,
    );
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    let mut csv = String::from("key,value\n");
    for (k, v) in &report.invariants {
        csv.push_str(&format!("invariant_{k},{v:.12e}\n"));
    }
    csv.push_str(&format!("sup_Z,{:.12e}\n", report.integrability.sup_z));
    csv.push_str(&format!(
        "sup_Zscalar,{:.12e}\n",
        report.integrability.sup_zscalar
    ));
    if let Some(b) = report.integrability.sup_b {
        csv.push_str(&format!("sup_B,{b:.12e}\n"));
    }
    write_report(out, json, csv)?;
    Ok(if invariants_pass && verdicts_pass {
        EXIT_OK
    } else {
        EXIT_VERDICT_FAILED
    })
}

fn cmd_geodesic(
    spec: &MetricSpec,
    x: &Option<String>,
    y: &Option<String>,
    length: f64,
    step: f64,
    out: &OutputArgs,
) -> Result<i32> {
    let (x0, y0) = start_data(spec, x, y)?;
    let traj = dynamics::geodesic(spec, &x0, &y0, length, step)?;
    let summary = TrajectorySummary {
        metric: spec.name().to_string(),
        length,
        step: traj.step,
        samples: traj.len(),
        exited_chart: traj.exited_chart,
        conjugate_s: None,
        blow_up_s: None,
    };
    println!(
        "{}: integrated {} samples to s = {:.6}{}",
        spec.name(),
        traj.len(),
        traj.s.last().unwrap(),
        if traj.exited_chart {
            " (chart exit)"
        } else {
            ""
        }
    );
    let json = serde_json::to_string_pretty(&summary).expect("serializable report");
    let csv = dynamics::trajectory_csv(&traj, None, None);
    write_report(out, json, csv)?;
    Ok(EXIT_OK)
}

fn cmd_conjugate(
    spec: &MetricSpec,
    x: &Option<String>,
    y: &Option<String>,
    length: f64,
    step: f64,
    out: &OutputArgs,
) -> Result<i32> {
    let (x0, y0) = start_data(spec, x, y)?;
    let traj = dynamics::geodesic(spec, &x0, &y0, length, step)?;
    let jac = dynamics::jacobi_field(spec, &traj)?;
    let conjugate_s = dynamics::first_conjugate_from(&jac);
    let summary = TrajectorySummary {
        metric: spec.name().to_string(),
        length,
        step: traj.step,
        samples: traj.len(),
        exited_chart: traj.exited_chart,
        conjugate_s,
        blow_up_s: None,
    };
    match conjugate_s {
        Some(s) => println!("{}: first conjugate point at s = {s:.6}", spec.name()),
        None => println!("{}: no conjugate point within length {length}", spec.name()),
    }
    let json = serde_json::to_string_pretty(&summary).expect("serializable report");
    let csv = dynamics::trajectory_csv(&traj, Some(&jac), None);
    write_report(out, json, csv)?;
    Ok(EXIT_OK)
}

fn cmd_projparam(
    spec: &MetricSpec,
    x: &Option<String>,
    y: &Option<String>,
    length: f64,
    step: f64,
    out: &OutputArgs,
) -> Result<i32> {
    let (x0, y0) = start_data(spec, x, y)?;
    let traj = dynamics::geodesic(spec, &x0, &y0, length, step)?;
    let pp = dynamics::projective_parameter(spec, &traj)?;
    let summary = TrajectorySummary {
        metric: spec.name().to_string(),
        length,
        step: traj.step,
        samples: pp.s.len(),
        exited_chart: traj.exited_chart,
        conjugate_s: None,
        blow_up_s: pp.blow_up,
    };
    println!(
        "{}: projective parameter over {} samples{}",
        spec.name(),
        pp.s.len(),
        pp.blow_up
            .map(|s| format!(", escaped at s = {s:.6}"))
            .unwrap_or_default()
    );
    let json = serde_json::to_string_pretty(&summary).expect("serializable report");
    let csv = dynamics::trajectory_csv(&traj, None, Some(&pp));
    write_report(out, json, csv)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bonnet(
    spec: &MetricSpec,
    lambda: f64,
    geodesics: usize,
    length: Option<f64>,
    step: f64,
    seed: u64,
    start: Option<String>,
    out: &OutputArgs,
) -> Result<i32> {
    let start = match start {
        Some(s) => Some(parse_vec(&s, spec.dim(), "start")?),
        None => None,
    };
    let opts = BonnetOptions {
        n_geodesics: geodesics,
        length,
        step,
        seed,
        start,
        ..BonnetOptions::default()
    };
    let report = dynamics::bonnet_myers_check(spec, lambda, &opts)?;
    if report.hypothesis_violated {
        println!(
            "{}: hypothesis-violated (sampled Ric below (n-1) lambda = {:.6})",
            spec.name(),
            (spec.dim() as f64 - 1.0) * lambda
        );
    } else {
        for (i, c) in report.geodesics.iter().enumerate() {
            println!(
                "geodesic {i}: conjugate at {:?}, bound {:.6}, equivalence error {:?}",
                c.conjugate_s, report.bound, c.equivalence_error
            );
        }
        println!(
            "{}: bound pi/sqrt(lambda) = {:.6}, all_pass = {}",
            spec.name(),
            report.bound,
            report.all_pass
        );
    }
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    let mut csv = String::from(
        "geodesic,min_ricci,hypothesis_ok,conjugate_s,within_bound,equivalence_error,pass\n",
    );
    for (i, c) in report.geodesics.iter().enumerate() {
        csv.push_str(&format!(
            "{i},{:.12e},{},{},{},{},{}\n",
            c.min_ricci,
            c.hypothesis_ok,
            c.conjugate_s
                .map(|v| format!("{v:.12e}"))
                .unwrap_or_default(),
            c.within_bound.map(|v| v.to_string()).unwrap_or_default(),
            c.equivalence_error
                .map(|v| format!("{v:.12e}"))
                .unwrap_or_default(),
            c.pass
        ));
    }
    write_report(out, json, csv)?;
    Ok(if report.all_pass {
        EXIT_OK
    } else {
        EXIT_VERDICT_FAILED
    })
}

#[derive(Serialize)]
struct MobiusReport {
    metric: String,
    phi: String,
    n_samples: usize,
    /// sup |B(phi)| over the sample.
    sup_b: f64,
    /// sup |C^h_ij phi_h| over the sample.
    sup_c_conformal: f64,
    tol: f64,
    mobius: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_mobius(
    spec: &MetricSpec,
    phi_src: &str,
    points: usize,
    seed: u64,
    radius: f64,
    tol: f64,
    out: &OutputArgs,
) -> Result<i32> {
    let phi = ScalarField::parse(phi_src)?;
    let pts = sample::tangent_points(spec, points, radius, seed)?;
    let sup_b = schwarzian::mobius_residual(spec, &phi, &pts)?;
    let mut sup_c = 0.0f64;
    for tp in &pts {
        sup_c = sup_c.max(schwarzian::c_conformal_residual(spec, &phi, tp)?.sup_norm());
    }
    let report = MobiusReport {
        metric: spec.name().to_string(),
        phi: phi_src.to_string(),
        n_samples: pts.len(),
        sup_b,
        sup_c_conformal: sup_c,
        tol,
        mobius: sup_b <= tol,
    };
    println!(
        "{}: sup |B(phi)| = {:.3e}, sup |C phi| = {:.3e} -> {}",
        spec.name(),
        report.sup_b,
        report.sup_c_conformal,
        if report.mobius {
            "Möbius"
        } else {
            "not Möbius"
        }
    );
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    let csv = format!(
        "key,value\nsup_B,{:.12e}\nsup_C_conformal,{:.12e}\nmobius,{}\n",
        report.sup_b, report.sup_c_conformal, report.mobius
    );
    write_report(out, json, csv)?;
    Ok(if report.mobius {
        EXIT_OK
    } else {
        EXIT_VERDICT_FAILED
    })
}
