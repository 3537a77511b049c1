//! The Schwarzian tensor of a conformal factor, the integrability
//! obstruction tensors of the Möbius equations, concircular and C-conformal
//! residuals, conformal metric changes, and the classical one-dimensional
//! Schwarzian derivative.

use serde::Serialize;

use crate::connection::{delta_x, PointJets};
use crate::curvature::{chern_values, spray_curvature_values};
use crate::diffengine::{shape, Jet};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::metrics::{MetricSpec, TangentPoint};
use crate::tensor::{Tensor, Variance};

/// Derived quantities of a conformal factor at one tangent point.
#[derive(Clone, Debug)]
pub struct ConformalFactor {
    /// phi(x).
    pub value: f64,
    /// phi_i = d phi / d x^i.
    pub phi_lower: Vec<f64>,
    /// phi^i = g^{ij} phi_j at this (x, y).
    pub phi_upper: Vec<f64>,
    /// |grad phi|^2 = phi^i phi_i.
    pub grad_norm_sq: f64,
    /// Phi = (Delta phi - |grad phi|^2) / n.
    pub capital_phi: f64,
    /// Phi_k = delta Phi / delta x^k (diagnostic, finite-difference based).
    pub capital_phi_h: Vec<f64>,
}

struct SchwarzianParts {
    b: Vec<f64>,
    ginv: Vec<f64>,
    phi_lower: Vec<f64>,
    laplacian: f64,
    grad_norm_sq: f64,
}

fn schwarzian_parts(
    spec: &MetricSpec,
    phi: &ScalarField,
    tp: &TangentPoint,
) -> Result<SchwarzianParts> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 3)?;
    let g = pj.g_values();
    let ginv = pj.ginv_values();
    let gam = pj.gamma_values();
    let cart = pj.cartan_upper_values();
    let phi_lower = phi.gradient(tp.x())?;
    let phi_xx = phi.hessian_matrix(tp.x())?;

    let mut hess = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = phi_xx[i * n + j];
            for k in 0..n {
                v -= (gam[(k * n + i) * n + j] + cart[(k * n + i) * n + j]) * phi_lower[k];
            }
            hess[i * n + j] = v;
        }
    }
    let mut laplacian = 0.0;
    let mut grad_norm_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            laplacian += ginv[i * n + j] * hess[i * n + j];
            grad_norm_sq += ginv[i * n + j] * phi_lower[i] * phi_lower[j];
        }
    }
    let capital_phi = (laplacian - grad_norm_sq) / n as f64;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] =
                hess[i * n + j] - phi_lower[i] * phi_lower[j] - capital_phi * g[i * n + j];
        }
    }
    Ok(SchwarzianParts {
        b,
        ginv,
        phi_lower,
        laplacian,
        grad_norm_sq,
    })
}

/// Schwarzian tensor B_ij = Hess(phi)_ij - phi_i phi_j - Phi g_ij with
/// Phi = (Delta phi - |grad phi|^2)/n; symmetric and g-traceless.
pub fn schwarzian_tensor(
    spec: &MetricSpec,
    phi: &ScalarField,
    tp: &TangentPoint,
) -> Result<Tensor> {
    let n = spec.dim();
    let parts = schwarzian_parts(spec, phi, tp)?;
    Ok(Tensor::from_fn(
        n,
        &[Variance::Lower, Variance::Lower],
        |i| parts.b[i[0] * n + i[1]],
    ))
}

/// All conformal-factor bookkeeping at a point, including the horizontal
/// derivative Phi_k of the trace part.
pub fn conformal_data(
    spec: &MetricSpec,
    phi: &ScalarField,
    tp: &TangentPoint,
) -> Result<ConformalFactor> {
    let n = spec.dim();
    let parts = schwarzian_parts(spec, phi, tp)?;
    let phi_upper: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| parts.ginv[i * n + j] * parts.phi_lower[j])
                .sum()
        })
        .collect();

    // Phi_k = delta Phi / delta x^k on the scalar observable
    // (x, y) -> (Delta phi - |grad phi|^2)/n.
    let spec2 = spec.clone();
    let phi2 = phi.clone();
    let observable = move |x: &[f64], y: &[f64]| -> f64 {
        let Ok(q) = TangentPoint::new(x.to_vec(), y.to_vec()) else {
            return f64::NAN;
        };
        match schwarzian_parts(&spec2, &phi2, &q) {
            Ok(p) => (p.laplacian - p.grad_norm_sq) / x.len() as f64,
            Err(_) => f64::NAN,
        }
    };
    let mut capital_phi_h = Vec::with_capacity(n);
    for k in 0..n {
        capital_phi_h.push(delta_x(spec, &observable, tp, k)?);
    }

    Ok(ConformalFactor {
        value: phi.eval(tp.x())?,
        phi_lower: parts.phi_lower,
        phi_upper,
        grad_norm_sq: parts.grad_norm_sq,
        capital_phi: (parts.laplacian - parts.grad_norm_sq) / n as f64,
        capital_phi_h,
    })
}

/// The 4-index integrability tensor
/// Z^h_ijk = R^h_ijk - (g_ij R^h_k - g_ik R^h_j)/(n-1), with R^h_k the
/// g-trace g^{mj} R^h_mjk of the Chern hh-curvature. Vanishing of Z is the
/// complete-integrability criterion for the Möbius equations; the trace
/// identity g^{ij} Z^h_ijk = 0 holds for any metric.
pub fn z_tensor(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 4)?;
    let chern = chern_values(&pj);
    let g = pj.g_values();
    let ginv = pj.ginv_values();

    let mut alt = vec![0.0; n * n];
    for h in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for m in 0..n {
                for j in 0..n {
                    acc += ginv[m * n + j] * chern[((h * n + m) * n + j) * n + k];
                }
            }
            alt[h * n + k] = acc;
        }
    }

    let nm1 = (n - 1) as f64;
    Ok(Tensor::from_fn(
        n,
        &[
            Variance::Upper,
            Variance::Lower,
            Variance::Lower,
            Variance::Lower,
        ],
        |idx| {
            let (h, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            chern[((h * n + i) * n + j) * n + k]
                - (g[i * n + j] * alt[h * n + k] - g[i * n + k] * alt[h * n + j]) / nm1
        },
    ))
}

/// The scalar-curvature integrability tensor
/// Z^h_jk = R^h_jk - F^{-2} (y_j R^h_k - y_k R^h_j), with R^h_jk the spray
/// curvature and R^h_k = y^j R^h_jk its flagpole contraction (the
/// convention of the underlying integrability argument). Antisymmetric in
/// (j, k); vanishes on metrics of scalar flag curvature.
pub fn z_scalar_tensor(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 4)?;
    let rjk = spray_curvature_values(&pj);
    let g = pj.g_values();
    let f2 = pj.f2.value();

    // R^h_k contracted over the first lower slot.
    let mut rk = vec![0.0; n * n];
    for h in 0..n {
        for k in 0..n {
            rk[h * n + k] = (0..n).map(|j| pj.y[j] * rjk[(h * n + j) * n + k]).sum();
        }
    }
    let ylow: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|m| g[j * n + m] * pj.y[m]).sum())
        .collect();

    Ok(Tensor::from_fn(
        n,
        &[Variance::Upper, Variance::Lower, Variance::Lower],
        |idx| {
            let (h, j, k) = (idx[0], idx[1], idx[2]);
            rjk[(h * n + j) * n + k] - (ylow[j] * rk[h * n + k] - ylow[k] * rk[h * n + j]) / f2
        },
    ))
}

/// C-conformal residual C^h_ij phi_h; identically zero exactly when the
/// conformal change is C-conformal (always true on Riemannian metrics).
pub fn c_conformal_residual(
    spec: &MetricSpec,
    phi: &ScalarField,
    tp: &TangentPoint,
) -> Result<Tensor> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 3)?;
    let cart = pj.cartan_upper_values();
    let phi_lower = phi.gradient(tp.x())?;
    Ok(Tensor::from_fn(
        n,
        &[Variance::Lower, Variance::Lower],
        |i| {
            (0..n)
                .map(|h| cart[(h * n + i[0]) * n + i[1]] * phi_lower[h])
                .sum()
        },
    ))
}

/// Conformal change of metric: F -> e^{phi(x)} F. The factor must be
/// expression-backed so the result stays differentiable.
pub fn conformal_change(spec: &MetricSpec, phi: &ScalarField) -> Result<MetricSpec> {
    MetricSpec::conformal(spec.clone(), phi.clone())
}

/// Concircular residual Hess(rho)_ij + c^2 rho g_ij; a nontrivial rho with
/// vanishing residual forces sphere topology on complete manifolds.
pub fn concircular_residual(
    spec: &MetricSpec,
    rho: &ScalarField,
    c: f64,
    tp: &TangentPoint,
) -> Result<Tensor> {
    let n = spec.dim();
    let hess = crate::connection::hessian(spec, rho, tp)?;
    let g = spec.fundamental_tensor(tp)?;
    let r = rho.eval(tp.x())?;
    Ok(Tensor::from_fn(
        n,
        &[Variance::Lower, Variance::Lower],
        |i| hess.get(i) + c * c * r * g.get(i),
    ))
}

/// Sup-norm of the Schwarzian tensor of phi over a sample; zero exactly for
/// Möbius factors.
pub fn mobius_residual(
    spec: &MetricSpec,
    phi: &ScalarField,
    sample: &[TangentPoint],
) -> Result<f64> {
    let mut sup = 0.0f64;
    for tp in sample {
        sup = sup.max(schwarzian_tensor(spec, phi, tp)?.sup_norm());
    }
    Ok(sup)
}

/// Verdicts of an integrability scan.
#[derive(Clone, Debug, Serialize)]
pub struct Verdicts {
    /// sup |Z^h_ijk| (curvature-scaled) within tolerance.
    pub z: bool,
    /// sup |Z^h_jk| (curvature-scaled) within tolerance.
    pub z_scalar: bool,
    /// sup |B(phi)| within tolerance; absent without a factor.
    pub mobius: Option<bool>,
}

/// Machine-readable summary of the integrability tensors over a point
/// sample. The Z sup-norms are scale-aware: each point contributes
/// |Z| / (1 + |R|) with |R| the local curvature magnitude.
#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityReport {
    pub metric: String,
    pub n_samples: usize,
    #[serde(rename = "sup_Z")]
    pub sup_z: f64,
    #[serde(rename = "sup_Zscalar")]
    pub sup_zscalar: f64,
    #[serde(rename = "sup_B")]
    pub sup_b: Option<f64>,
    pub tol: f64,
    pub verdicts: Verdicts,
}

/// Evaluate both Z tensors (and optionally the Schwarzian of a factor) over
/// a sample and reduce to a report.
pub fn integrability_report(
    spec: &MetricSpec,
    sample: &[TangentPoint],
    phi: Option<&ScalarField>,
    tol: f64,
) -> Result<IntegrabilityReport> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter(
            "integrability report needs a non-empty sample".into(),
        ));
    }
    let mut sup_z = 0.0f64;
    let mut sup_zs = 0.0f64;
    let mut sup_b: Option<f64> = phi.map(|_| 0.0);
    for tp in sample {
        let pj = PointJets::new(spec, tp, 4)?;
        let chern = chern_values(&pj);
        let rjk = spray_curvature_values(&pj);
        let curv_scale = 1.0
            + chern
                .iter()
                .chain(rjk.iter())
                .fold(0.0f64, |m, v| m.max(v.abs()));

        let z = z_tensor(spec, tp)?;
        let zs = z_scalar_tensor(spec, tp)?;
        sup_z = sup_z.max(z.sup_norm() / curv_scale);
        sup_zs = sup_zs.max(zs.sup_norm() / curv_scale);
        if let (Some(phi), Some(acc)) = (phi, sup_b.as_mut()) {
            *acc = acc.max(schwarzian_tensor(spec, phi, tp)?.sup_norm());
        }
    }
    Ok(IntegrabilityReport {
        metric: spec.name().to_string(),
        n_samples: sample.len(),
        sup_z,
        sup_zscalar: sup_zs,
        sup_b,
        tol,
        verdicts: Verdicts {
            z: sup_z <= tol,
            z_scalar: sup_zs <= tol,
            mobius: sup_b.map(|b| b <= tol),
        },
    })
}

/// Classical 1-D Schwarzian derivative S(g) = g'''/g' - 3/2 (g''/g')^2,
/// with g supplied as a jet-evaluable function.
pub fn schwarzian_1d(g: impl Fn(&Jet) -> Jet, x: f64) -> Result<f64> {
    let sh = shape(1, 3);
    let out = g(&Jet::variable(sh, 0, x));
    let d1 = out.partial(&[1]);
    let d2 = out.partial(&[2]);
    let d3 = out.partial(&[3]);
    if d1.abs() < 1e-12 {
        return Err(Error::CriticalPoint(d1.abs()));
    }
    Ok(d3 / d1 - 1.5 * (d2 / d1).powi(2))
}

/// 1-D Schwarzian from sampled values p, p', p'' on a uniform grid, using a
/// five-point first-derivative stencil (adjacent samples) for p''' and
/// reporting at every `stride`-th interior sample. Points where the stencil
/// is ill-conditioned are skipped: near a pole of p the high derivatives
/// grow like |p'|^{(k+1)/2}, so the window |p'| <= 0.009 / h keeps the
/// truncation error of the stencil near 1e-6.
pub(crate) fn schwarzian_from_samples(
    s: &[f64],
    dp: &[f64],
    d2p: &[f64],
    stride: usize,
) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    if s.len() < 5 {
        return out;
    }
    let h = (s[1] - s[0]).abs();
    if h == 0.0 {
        return out;
    }
    let dp_cap = (0.009 / h).min(50.0);
    for i in (2..s.len() - 2).step_by(stride.max(1)) {
        let q = dp[i];
        if q.abs() < 1e-3 || q.abs() > dp_cap {
            continue;
        }
        let d3 = (-d2p[i + 2] + 8.0 * d2p[i + 1] - 8.0 * d2p[i - 1] + d2p[i - 2]) / (12.0 * h);
        out.push((i, d3 / q - 1.5 * (d2p[i] / q).powi(2)));
    }
    out
}
