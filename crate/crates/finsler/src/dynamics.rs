//! Geodesics, Jacobi fields and conjugate points, the projective-parameter
//! ODE, and the Bonnet-Myers hypothesis checker.
//!
//! All integrations use one fixed-step classical fourth-order Runge-Kutta
//! scheme; the step is shortened so the final sample lands exactly on the
//! requested length. Curvature data along trajectories comes from the same
//! jet pipeline as the pointwise operators, evaluated at every stage.

use serde::Serialize;

use crate::connection::PointJets;
use crate::curvature::{ricci_value, riemann_values};
use crate::error::{Error, Result};
use crate::metrics::{MetricSpec, TangentPoint};
use crate::schwarzian::schwarzian_from_samples;

/// A sampled solution curve of the geodesic equation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Arc-length samples s_0 .. s_N.
    pub s: Vec<f64>,
    /// States (x, xdot), each of length 2n.
    pub states: Vec<Vec<f64>>,
    /// Effective step size.
    pub step: f64,
    /// Integrator tag.
    pub scheme: &'static str,
    /// Set when the curve left the chart before reaching the target length.
    pub exited_chart: bool,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states[0].len() / 2
    }

    pub fn x_at(&self, i: usize) -> &[f64] {
        &self.states[i][..self.dim()]
    }

    pub fn v_at(&self, i: usize) -> &[f64] {
        &self.states[i][self.dim()..]
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Matrix Jacobi solution along a geodesic: J(0) = 0, D_T J(0) = I.
#[derive(Clone, Debug)]
pub struct JacobiSolution {
    pub s: Vec<f64>,
    /// J(s), row-major n x n.
    pub j: Vec<Vec<f64>>,
    /// D_T J(s), row-major n x n.
    pub dj: Vec<Vec<f64>>,
    pub det_j: Vec<f64>,
}

/// Projective parameter samples along a geodesic (canonical gauge
/// p(0) = 0, p'(0) = 1, p''(0) = 0 unless stated otherwise).
#[derive(Clone, Debug)]
pub struct ProjectiveParameter {
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub d2p: Vec<f64>,
    /// Arc length at which |p| escaped (finite-time escape is legitimate
    /// under positive Ricci curvature).
    pub blow_up: Option<f64>,
}

/// Right-hand side of a first-order system: (s, state, d_state_out).
type OdeRhs<'a> = &'a mut dyn FnMut(f64, &[f64], &mut [f64]) -> Result<()>;

/// Fixed-step RK4 over a flat state vector. The right-hand side may signal
/// chart exit through `Error::Domain`/`Error::ChartExit`, which terminates
/// integration gracefully; states are reported through `on_sample`.
fn integrate_fixed(
    y0: &[f64],
    length: f64,
    step: f64,
    rhs: OdeRhs,
    on_sample: &mut dyn FnMut(f64, &[f64]) -> bool,
) -> Result<bool> {
    assert!(length > 0.0 && step > 0.0);
    let n_steps = (length / step).ceil().max(1.0) as usize;
    let h = length / n_steps as f64;
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut s = 0.0;
    if !on_sample(s, &y) {
        return Ok(false);
    }
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    for step_idx in 0..n_steps {
        let stage = |err: Error| -> Result<bool> {
            match err {
                Error::Domain(_) | Error::ChartExit(_) | Error::NotPositiveDefinite(_) => Ok(true),
                other => Err(other),
            }
        };
        macro_rules! eval_stage {
            ($ds:expr, $kin:expr, $kout:expr) => {{
                for i in 0..dim {
                    tmp[i] = y[i] + $ds * $kin[i];
                }
                match rhs(s + $ds, &tmp, &mut $kout) {
                    Ok(()) => {}
                    Err(e) => return stage(e),
                }
            }};
        }
        match rhs(s, &y, &mut k1) {
            Ok(()) => {}
            Err(e) => return stage(e),
        }
        eval_stage!(0.5 * h, k1, k2);
        eval_stage!(0.5 * h, k2, k3);
        eval_stage!(h, k3, k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        s = (step_idx + 1) as f64 * h;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepFailure(s));
        }
        if !on_sample(s, &y) {
            return Ok(false);
        }
    }
    Ok(false)
}

/// Normalize a direction to unit Finsler speed at x.
pub fn unit_direction(spec: &MetricSpec, x: &[f64], dir: &[f64]) -> Result<Vec<f64>> {
    let tp = TangentPoint::new(x.to_vec(), dir.to_vec())?;
    let f = spec.eval_f(&tp)?;
    Ok(dir.iter().map(|v| v / f).collect())
}

/// Integrate the geodesic equation xddot + 2 G(x, xdot) = 0 from a
/// unit-speed initial condition.
pub fn geodesic(
    spec: &MetricSpec,
    x0: &[f64],
    y0: &[f64],
    length: f64,
    step: f64,
) -> Result<Trajectory> {
    geodesic_guarded(spec, x0, y0, length, step, f64::INFINITY)
}

/// Like [`geodesic`] but also stops (with the chart-exit flag) when |x|
/// exceeds the guard radius; used by samplers on unbounded charts.
pub(crate) fn geodesic_guarded(
    spec: &MetricSpec,
    x0: &[f64],
    y0: &[f64],
    length: f64,
    step: f64,
    guard_radius: f64,
) -> Result<Trajectory> {
    let n = spec.dim();
    let tp0 = TangentPoint::new(x0.to_vec(), y0.to_vec())?;
    let f0 = spec.eval_f(&tp0)?;
    if (f0 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "geodesic initial condition must be unit speed, F = {f0:.12}"
        )));
    }

    let mut state0 = Vec::with_capacity(2 * n);
    state0.extend_from_slice(x0);
    state0.extend_from_slice(y0);

    let mut rhs = |_s: f64, z: &[f64], out: &mut [f64]| -> Result<()> {
        let tp = TangentPoint::new(z[..n].to_vec(), z[n..].to_vec())?;
        let pj = PointJets::new(spec, &tp, 2)?;
        let spray = pj.spray_values();
        for i in 0..n {
            out[i] = z[n + i];
            out[n + i] = -2.0 * spray[i];
        }
        Ok(())
    };

    let mut s_acc = Vec::new();
    let mut states = Vec::new();
    let mut guard_tripped = false;
    let mut on_sample = |s: f64, z: &[f64]| -> bool {
        s_acc.push(s);
        states.push(z.to_vec());
        let r = z[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > guard_radius {
            guard_tripped = true;
            return false;
        }
        true
    };

    let exited = integrate_fixed(&state0, length, step, &mut rhs, &mut on_sample)?;
    let n_steps = (length / step).ceil().max(1.0);
    Ok(Trajectory {
        s: s_acc,
        states,
        step: length / n_steps,
        scheme: "rk4",
        exited_chart: exited || guard_tripped,
    })
}

/// Solve the matrix Jacobi equation D_T D_T J + R J = 0 along the geodesic
/// with J(0) = 0, D_T J(0) = I. The covariant derivative along the curve is
/// D_T v^i = vdot^i + v^j xdot^k Gamma^i_jk(x, xdot).
pub fn jacobi_field(spec: &MetricSpec, traj: &Trajectory) -> Result<JacobiSolution> {
    let n = spec.dim();
    let x0 = traj.x_at(0).to_vec();
    let v0 = traj.v_at(0).to_vec();
    let length = *traj.s.last().expect("non-empty trajectory");
    if length <= 0.0 {
        return Err(Error::InvalidParameter("trajectory too short".into()));
    }

    // State: x, v, J, K.
    let nn = n * n;
    let mut state0 = vec![0.0; 2 * n + 2 * nn];
    state0[..n].copy_from_slice(&x0);
    state0[n..2 * n].copy_from_slice(&v0);
    for i in 0..n {
        state0[2 * n + nn + i * n + i] = 1.0;
    }

    let mut rhs = |_s: f64, z: &[f64], out: &mut [f64]| -> Result<()> {
        let tp = TangentPoint::new(z[..n].to_vec(), z[n..2 * n].to_vec())?;
        let pj = PointJets::new(spec, &tp, 4)?;
        let spray = pj.spray_values();
        let gamma = pj.gamma_values();
        let riem = riemann_values(&pj);
        let v = &z[n..2 * n];
        // M^i_j = Gamma^i_jk v^k.
        let mut m = vec![0.0; nn];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).map(|k| gamma[(i * n + j) * n + k] * v[k]).sum();
            }
        }
        let jmat = &z[2 * n..2 * n + nn];
        let kmat = &z[2 * n + nn..];
        for i in 0..n {
            out[i] = v[i];
            out[n + i] = -2.0 * spray[i];
        }
        for i in 0..n {
            for a in 0..n {
                let mut dj = kmat[i * n + a];
                let mut dk = 0.0;
                for j in 0..n {
                    dj -= m[i * n + j] * jmat[j * n + a];
                    dk -= riem[i * n + j] * jmat[j * n + a] + m[i * n + j] * kmat[j * n + a];
                }
                out[2 * n + i * n + a] = dj;
                out[2 * n + nn + i * n + a] = dk;
            }
        }
        Ok(())
    };

    let mut s_acc = Vec::new();
    let mut js = Vec::new();
    let mut djs = Vec::new();
    let mut dets = Vec::new();
    let mut on_sample = |s: f64, z: &[f64]| -> bool {
        s_acc.push(s);
        let jmat = z[2 * n..2 * n + nn].to_vec();
        dets.push(crate::tensor::determinant(&jmat, n));
        js.push(jmat);
        djs.push(z[2 * n + nn..].to_vec());
        true
    };
    integrate_fixed(&state0, length, traj.step, &mut rhs, &mut on_sample)?;
    Ok(JacobiSolution {
        s: s_acc,
        j: js,
        dj: djs,
        det_j: dets,
    })
}

/// First conjugate distance along the trajectory: the smallest s* > 0 with
/// det J(s*) = 0, located by a sign change and refined on a local cubic
/// interpolant; `None` if no conjugate point occurs within the length.
pub fn conjugate_search(spec: &MetricSpec, traj: &Trajectory) -> Result<Option<f64>> {
    let jac = jacobi_field(spec, traj)?;
    Ok(first_conjugate_from(&jac))
}

/// Locate the first conjugate distance in an already-computed Jacobi
/// solution.
pub fn first_conjugate_from(jac: &JacobiSolution) -> Option<f64> {
    // det J = 0 at s = 0 by the initial condition; skip until it has grown.
    let mut started = false;
    for i in 1..jac.s.len() {
        let d = jac.det_j[i];
        if !started {
            if d.abs() > 0.0 && jac.s[i] > 0.0 {
                started = true;
                if d < 0.0 {
                    // Degenerate start direction; treat first positive-to-
                    // negative transition only.
                    return Some(jac.s[i]);
                }
            }
            continue;
        }
        if jac.det_j[i - 1] > 0.0 && d <= 0.0 {
            return Some(refine_zero(&jac.s, &jac.det_j, i - 1));
        }
    }
    None
}

/// Refine a bracketed zero of sampled data with a cubic fit through the
/// four surrounding samples, bisected to 1e-9 in s.
fn refine_zero(s: &[f64], f: &[f64], left: usize) -> f64 {
    let lo = left.saturating_sub(1);
    let hi = (left + 2).min(s.len() - 1);
    let xs = &s[lo..=hi];
    let fs = &f[lo..=hi];
    let eval = |t: f64| -> f64 {
        // Lagrange interpolation over up to 4 nodes.
        let mut acc = 0.0;
        for i in 0..xs.len() {
            let mut w = fs[i];
            for j in 0..xs.len() {
                if i != j {
                    w *= (t - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += w;
        }
        acc
    };
    let (mut a, mut b) = (s[left], s[left + 1]);
    let (mut fa, _fb) = (eval(a), eval(b));
    for _ in 0..60 {
        if b - a < 1e-9 {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = eval(mid);
        if (fa > 0.0) == (fm > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Integrate the projective-parameter ODE
/// p''' = 3/2 (p'')^2 / p' + S(s) p' with S(s) = 2 Ric(x, xdot) / (n - 1)
/// along the given unit-speed geodesic, canonical gauge p(0)=0, p'(0)=1,
/// p''(0)=0.
pub fn projective_parameter(spec: &MetricSpec, traj: &Trajectory) -> Result<ProjectiveParameter> {
    projective_parameter_with_gauge(spec, traj, 0.0, 1.0, 0.0)
}

/// Same ODE with explicit initial data (p, p', p'')(0); the solution is
/// unique only up to a fractional-linear map, so the gauge matters.
pub fn projective_parameter_with_gauge(
    spec: &MetricSpec,
    traj: &Trajectory,
    p0: f64,
    dp0: f64,
    d2p0: f64,
) -> Result<ProjectiveParameter> {
    let n = spec.dim();
    if dp0 <= 0.0 {
        return Err(Error::InvalidParameter(
            "projective parameter needs p'(0) > 0".into(),
        ));
    }
    let length = *traj.s.last().expect("non-empty trajectory");
    let mut state0 = vec![0.0; 2 * n + 3];
    state0[..n].copy_from_slice(traj.x_at(0));
    state0[n..2 * n].copy_from_slice(traj.v_at(0));
    state0[2 * n] = p0;
    state0[2 * n + 1] = dp0;
    state0[2 * n + 2] = d2p0;

    let nm1 = (n - 1) as f64;
    let mut rhs = |_s: f64, z: &[f64], out: &mut [f64]| -> Result<()> {
        let tp = TangentPoint::new(z[..n].to_vec(), z[n..2 * n].to_vec())?;
        let pj = PointJets::new(spec, &tp, 4)?;
        let spray = pj.spray_values();
        let ric = ricci_value(&pj);
        for i in 0..n {
            out[i] = z[n + i];
            out[n + i] = -2.0 * spray[i];
        }
        let q = z[2 * n + 1];
        let r = z[2 * n + 2];
        out[2 * n] = q;
        out[2 * n + 1] = r;
        out[2 * n + 2] = 1.5 * r * r / q + (2.0 * ric / nm1) * q;
        Ok(())
    };

    let mut s_acc = Vec::new();
    let mut p = Vec::new();
    let mut dp = Vec::new();
    let mut d2p = Vec::new();
    let mut blow_up = None;
    let mut on_sample = |s: f64, z: &[f64]| -> bool {
        let (pv, qv, rv) = (z[2 * n], z[2 * n + 1], z[2 * n + 2]);
        if !pv.is_finite() || !qv.is_finite() || !rv.is_finite() || pv.abs() > 1e8 || qv <= 0.0 {
            blow_up = Some(s);
            return false;
        }
        s_acc.push(s);
        p.push(pv);
        dp.push(qv);
        d2p.push(rv);
        true
    };
    match integrate_fixed(&state0, length, traj.step, &mut rhs, &mut on_sample) {
        Ok(_) => {}
        // A hard step failure right at the escape is still a legitimate
        // blow-up if we already collected samples.
        Err(Error::StepFailure(s)) if !s_acc.is_empty() => {
            blow_up.get_or_insert(s);
        }
        Err(e) => return Err(e),
    }
    Ok(ProjectiveParameter {
        s: s_acc,
        p,
        dp,
        d2p,
        blow_up,
    })
}

/// Re-substitution residual: measure S(p) from the sampled solution (finite
/// differences on p'' for the third derivative) and compare with the Ricci
/// source term along the trajectory. Returns the sup over the valid window.
pub fn schwarzian_residual(
    spec: &MetricSpec,
    traj: &Trajectory,
    pp: &ProjectiveParameter,
) -> Result<f64> {
    let n = spec.dim();
    let nm1 = (n - 1) as f64;
    let stride = ((1e-2 / traj.step).round() as usize).max(1);
    let measured = schwarzian_from_samples(&pp.s, &pp.dp, &pp.d2p, stride);
    let mut sup: Option<f64> = None;
    for (i, s_measured) in measured {
        let tp = TangentPoint::new(traj.x_at(i).to_vec(), traj.v_at(i).to_vec())?;
        let s_field = 2.0 * crate::curvature::ricci_scalar(spec, &tp)? / nm1;
        let err = (s_measured - s_field).abs();
        sup = Some(sup.map_or(err, |m: f64| m.max(err)));
    }
    sup.ok_or_else(|| {
        Error::InvalidParameter("no valid samples for the Schwarzian residual".into())
    })
}

/// Per-geodesic outcome of the Bonnet-Myers check.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicCheck {
    /// Unit initial direction.
    pub direction: Vec<f64>,
    /// Smallest sampled Ricci scalar along the curve (unit speed).
    pub min_ricci: f64,
    /// Ric >= (n-1) lambda held along the whole sampled curve.
    pub hypothesis_ok: bool,
    /// First conjugate distance, when one was found.
    pub conjugate_s: Option<f64>,
    /// Conjugate distance within pi/sqrt(lambda) + 1e-2.
    pub within_bound: Option<bool>,
    /// sup |S(p)/2 - Ric/(n-1)| over the valid window (unit speed).
    pub equivalence_error: Option<f64>,
    pub pass: bool,
}

/// Aggregate report of [`bonnet_myers_check`].
#[derive(Clone, Debug, Serialize)]
pub struct BonnetMyersReport {
    pub metric: String,
    pub lambda: f64,
    /// Diameter/conjugate bound pi / sqrt(lambda).
    pub bound: f64,
    pub geodesics: Vec<GeodesicCheck>,
    /// Some sampled geodesic violated Ric >= (n-1) lambda.
    pub hypothesis_violated: bool,
    /// Every geodesic passed hypothesis, bound, and equivalence checks.
    pub all_pass: bool,
}

/// Options for the Bonnet-Myers sampler.
#[derive(Clone, Debug)]
pub struct BonnetOptions {
    pub n_geodesics: usize,
    /// Integration length; default 1.15 * pi / sqrt(lambda).
    pub length: Option<f64>,
    pub step: f64,
    pub seed: u64,
    /// Base point of the sampled geodesics; defaults to the chart origin.
    pub start: Option<Vec<f64>>,
    /// Geodesics wandering past this multiple of max(1, |x0|) are
    /// resampled (chart-safety on unbounded stereographic charts).
    pub guard_factor: f64,
    pub tol_equivalence: f64,
    pub tol_bound: f64,
}

impl Default for BonnetOptions {
    fn default() -> Self {
        BonnetOptions {
            n_geodesics: 10,
            length: None,
            step: 1e-3,
            seed: 42,
            start: None,
            guard_factor: 8.0,
            tol_equivalence: 1e-4,
            tol_bound: 1e-2,
        }
    }
}

/// Check the Bonnet-Myers hypotheses numerically: along sampled unit-speed
/// geodesics, verify Ric >= (n-1) lambda, the equivalence of the projective
/// Schwarzian source with the Ricci term, and the conjugate-distance bound
/// pi / sqrt(lambda).
pub fn bonnet_myers_check(
    spec: &MetricSpec,
    lambda: f64,
    opts: &BonnetOptions,
) -> Result<BonnetMyersReport> {
    use rand::{Rng, SeedableRng};
    if lambda <= 0.0 {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    let n = spec.dim();
    let bound = std::f64::consts::PI / lambda.sqrt();
    let length = opts.length.unwrap_or(1.15 * bound);
    let x0 = opts.start.clone().unwrap_or_else(|| vec![0.0; n]);
    let r0 = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let guard = opts.guard_factor * r0.max(1.0);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);

    let mut checks = Vec::with_capacity(opts.n_geodesics);
    let mut resamples = 0usize;
    while checks.len() < opts.n_geodesics {
        let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
        if dir.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.3 {
            continue;
        }
        let y0 = unit_direction(spec, &x0, &dir)?;
        let traj = geodesic_guarded(spec, &x0, &y0, length, opts.step, guard)?;
        if traj.exited_chart && *traj.s.last().unwrap() < 0.999 * length {
            resamples += 1;
            if resamples > 50 * opts.n_geodesics {
                return Err(Error::InvalidParameter(
                    "could not sample chart-safe geodesics; move the start point".into(),
                ));
            }
            continue;
        }

        // Hypothesis: Ric >= (n-1) lambda along the curve (strided).
        let stride = (traj.len() / 64).max(1);
        let mut min_ricci = f64::INFINITY;
        for i in (0..traj.len()).step_by(stride) {
            let tp = TangentPoint::new(traj.x_at(i).to_vec(), traj.v_at(i).to_vec())?;
            min_ricci = min_ricci.min(crate::curvature::ricci_scalar(spec, &tp)?);
        }
        let hypothesis_ok = min_ricci >= (n as f64 - 1.0) * lambda - 1e-6;

        let (conjugate_s, within_bound, equivalence_error, pass) = if hypothesis_ok {
            let conj = conjugate_search(spec, &traj)?;
            let within = conj.map(|s| s <= bound + opts.tol_bound);
            let pp = projective_parameter(spec, &traj)?;
            let eq = schwarzian_residual(spec, &traj, &pp)? / 2.0;
            let pass = within == Some(true) && eq <= opts.tol_equivalence;
            (conj, within, Some(eq), pass)
        } else {
            (None, None, None, false)
        };

        checks.push(GeodesicCheck {
            direction: y0,
            min_ricci,
            hypothesis_ok,
            conjugate_s,
            within_bound,
            equivalence_error,
            pass,
        });
    }

    let hypothesis_violated = checks.iter().any(|c| !c.hypothesis_ok);
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(BonnetMyersReport {
        metric: spec.name().to_string(),
        lambda,
        bound,
        geodesics: checks,
        hypothesis_violated,
        all_pass,
    })
}

/// Projective factor between two metrics at a point: the scalar p with
/// G_B^i = G_A^i + p y^i, or `None` when the sprays are not projectively
/// related there.
pub fn projective_factor(
    spec_a: &MetricSpec,
    spec_b: &MetricSpec,
    tp: &TangentPoint,
) -> Result<Option<f64>> {
    let ga = crate::connection::spray(spec_a, tp)?;
    let gb = crate::connection::spray(spec_b, tp)?;
    let n = spec_a.dim();
    let delta: Vec<f64> = (0..n).map(|i| gb[i] - ga[i]).collect();
    let yy: f64 = tp.y().iter().map(|v| v * v).sum();
    let p = delta.iter().zip(tp.y()).map(|(d, y)| d * y).sum::<f64>() / yy;
    let scale = 1.0 + delta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let resid = delta
        .iter()
        .zip(tp.y())
        .fold(0.0f64, |m, (d, y)| m.max((d - p * y).abs()));
    if resid <= 1e-6 * scale {
        Ok(Some(p))
    } else {
        Ok(None)
    }
}

/// Delimited-text export of a trajectory with optional Jacobi determinant
/// and projective-parameter columns:
/// `s,x1..xn,v1..vn[,det_j][,p,dp,d2p]`.
pub fn trajectory_csv(
    traj: &Trajectory,
    jacobi: Option<&JacobiSolution>,
    pp: Option<&ProjectiveParameter>,
) -> String {
    let n = traj.dim();
    let mut head = String::from("s");
    for i in 1..=n {
        head.push_str(&format!(",x{i}"));
    }
    for i in 1..=n {
        head.push_str(&format!(",v{i}"));
    }
    if jacobi.is_some() {
        head.push_str(",det_j");
    }
    if pp.is_some() {
        head.push_str(",p,dp,d2p");
    }
    head.push('\n');
    let mut out = head;
    for i in 0..traj.len() {
        let mut row = format!("{:.12e}", traj.s[i]);
        for v in &traj.states[i] {
            row.push_str(&format!(",{v:.12e}"));
        }
        if let Some(j) = jacobi {
            if i < j.det_j.len() {
                row.push_str(&format!(",{:.12e}", j.det_j[i]));
            } else {
                row.push(',');
            }
        }
        if let Some(p) = pp {
            if i < p.p.len() {
                row.push_str(&format!(
                    ",{:.12e},{:.12e},{:.12e}",
                    p.p[i], p.dp[i], p.d2p[i]
                ));
            } else {
                row.push_str(",,,");
            }
        }
        row.push('\n');
        out.push_str(&row);
    }
    out
}

/// Structured one-line summary of a trajectory run.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySummary {
    pub metric: String,
    pub length: f64,
    pub step: f64,
    pub samples: usize,
    pub exited_chart: bool,
    pub conjugate_s: Option<f64>,
    pub blow_up_s: Option<f64>,
}
