//! Spray, nonlinear connection, Cartan connection coefficients and torsion,
//! covariant derivatives, and the metric gradient/Hessian/Laplacian/
//! divergence operators.
//!
//! The central object is the per-point jet pipeline [`PointJets`]: F^2 is
//! evaluated once in truncated Taylor arithmetic over the combined (x, y)
//! variables, and every connection quantity is then obtained by jet algebra
//! (coefficient shifts, products, matrix inversion). Running the pipeline at
//! order p leaves the spray valid to order p-2 and the Christoffel symbols
//! to order p-3, which is exactly what the curvature layer consumes.

use crate::diffengine::{fd_default_step, fd_partial, Jet, MultiIndex};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, TensorField, VectorField};
use crate::metrics::{MetricSpec, TangentPoint};
use crate::tensor::{Tensor, Variance};

/// Connection coefficients of a metric at one tangent point.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub dim: usize,
    /// Spray coefficients G^i.
    pub spray: Vec<f64>,
    /// Nonlinear connection G^i_j = dG^i/dy^j.
    pub nonlinear: Tensor,
    /// Cartan/Chern connection coefficients Gamma^i_jk.
    pub gamma: Tensor,
    /// Cartan torsion with the raised index, C^i_jk.
    pub cartan_upper: Tensor,
    /// Cartan torsion C_ijk (totally symmetric).
    pub cartan_lower: Tensor,
    /// Formal Christoffel symbols gamma^i_jk (plain x-derivatives).
    pub formal_christoffel: Tensor,
}

/// The per-point jet pipeline shared by the connection and curvature layers.
pub(crate) struct PointJets {
    pub n: usize,
    pub y: Vec<f64>,
    pub f2: Jet,
    /// g_ij, row-major, valid to order-2.
    pub g: Vec<Jet>,
    /// g^{ij}, valid to order-2.
    pub ginv: Vec<Jet>,
    /// G^i, valid to order-2.
    pub spray: Vec<Jet>,
    /// G^i_j, row-major, valid to order-3 (empty below order 3).
    pub nonlin: Vec<Jet>,
    /// Gamma^i_jk, index (i*n + j)*n + k, valid to order-3 (empty below 3).
    pub gamma: Vec<Jet>,
}

impl PointJets {
    pub fn new(spec: &MetricSpec, tp: &TangentPoint, order: usize) -> Result<PointJets> {
        assert!(order >= 2, "pipeline needs at least order 2");
        let n = spec.dim();
        let (sh, f2) = spec.f2_jet(tp, order)?;

        // g_ij = 1/2 d^2 F^2 / dy^i dy^j, valid to order-2.
        let mut g = Vec::with_capacity(n * n);
        for i in 0..n {
            let fi = f2.diff(n + i);
            for j in 0..n {
                g.push(fi.diff(n + j).scale(0.5));
            }
        }
        let ginv = invert_jet_matrix(n, &g)?;

        // G^i = 1/4 g^{il} ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} ).
        let yvars: Vec<Jet> = (0..n)
            .map(|k| Jet::variable(sh.clone(), n + k, tp.y()[k]))
            .collect();
        let mut spray = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc: Option<Jet> = None;
            for l in 0..n {
                let fyl = f2.diff(n + l);
                let mut inner = -f2.diff(l);
                for (k, yk) in yvars.iter().enumerate() {
                    inner = inner + fyl.diff(k) * yk.clone();
                }
                let term = ginv[i * n + l].clone() * inner;
                acc = Some(match acc {
                    None => term,
                    Some(a) => a + term,
                });
            }
            spray.push(acc.expect("n >= 2").scale(0.25));
        }

        let mut nonlin = Vec::new();
        let mut gamma = Vec::new();
        if order >= 3 {
            for gi in &spray {
                for j in 0..n {
                    nonlin.push(gi.diff(n + j));
                }
            }
            // Gamma^i_jk = 1/2 g^{il} (delta_j g_lk + delta_k g_jl - delta_l g_jk).
            let mut delta_g = Vec::with_capacity(n * n * n);
            for l in 0..n {
                for kk in 0..n {
                    let glk = &g[l * n + kk];
                    for j in 0..n {
                        delta_g.push(delta_jet(n, &nonlin, glk, j));
                    }
                }
            }
            let dg = |j: usize, l: usize, k: usize| &delta_g[(l * n + k) * n + j];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut acc: Option<Jet> = None;
                        for l in 0..n {
                            let sum =
                                dg(j, l, k).clone() + dg(k, j, l).clone() - dg(l, j, k).clone();
                            let term = ginv[i * n + l].clone() * sum;
                            acc = Some(match acc {
                                None => term,
                                Some(a) => a + term,
                            });
                        }
                        gamma.push(acc.expect("n >= 2").scale(0.5));
                    }
                }
            }
        }

        Ok(PointJets {
            n,
            y: tp.y().to_vec(),
            f2,
            g,
            ginv,
            spray,
            nonlin,
            gamma,
        })
    }

    pub fn g_values(&self) -> Vec<f64> {
        self.g.iter().map(Jet::value).collect()
    }

    pub fn ginv_values(&self) -> Vec<f64> {
        self.ginv.iter().map(Jet::value).collect()
    }

    pub fn spray_values(&self) -> Vec<f64> {
        self.spray.iter().map(Jet::value).collect()
    }

    pub fn gamma_values(&self) -> Vec<f64> {
        self.gamma.iter().map(Jet::value).collect()
    }

    /// delta-derivative of a jet quantity: value of
    /// delta_k f = df/dx^k - G^j_k df/dy^j.
    pub fn delta_value(&self, f: &Jet, k: usize) -> f64 {
        let mut v = f.d1(k);
        for j in 0..self.n {
            v -= self.nonlin[j * self.n + k].value() * f.d1(self.n + j);
        }
        v
    }

    /// Cartan torsion C^i_jk = 1/2 g^{il} d g_jk / dy^l as values.
    pub fn cartan_upper_values(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc += self.ginv[i * n + l].value() * self.g[j * n + k].d1(n + l);
                    }
                    out[(i * n + j) * n + k] = 0.5 * acc;
                }
            }
        }
        out
    }

    pub fn cartan_lower_values(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[(i * n + j) * n + k] = 0.5 * self.g[i * n + j].d1(n + k);
                }
            }
        }
        out
    }
}

/// delta_j of a jet: d/dx^j minus the nonlinear-connection correction,
/// performed in jet arithmetic (the result stays differentiable).
fn delta_jet(n: usize, nonlin: &[Jet], f: &Jet, j: usize) -> Jet {
    let mut acc = f.diff(j);
    for m in 0..n {
        acc = acc - nonlin[m * n + j].clone() * f.diff(n + m);
    }
    acc
}

/// Gauss-Jordan inversion of an n-by-n matrix of jets, pivoting on the
/// value parts.
fn invert_jet_matrix(n: usize, a: &[Jet]) -> Result<Vec<Jet>> {
    let sh = a[0].shape().clone();
    let mut m: Vec<Jet> = a.to_vec();
    let mut inv: Vec<Jet> = (0..n * n)
        .map(|idx| Jet::constant(sh.clone(), if idx % (n + 1) == 0 { 1.0 } else { 0.0 }))
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m[r1 * n + col]
                    .value()
                    .abs()
                    .total_cmp(&m[r2 * n + col].value().abs())
            })
            .unwrap();
        let pivot = m[pivot_row * n + col].value();
        if !pivot.is_finite() || pivot.abs() < 1e-14 {
            return Err(Error::SingularMetric);
        }
        if pivot_row != col {
            for k in 0..n {
                m.swap(col * n + k, pivot_row * n + k);
                inv.swap(col * n + k, pivot_row * n + k);
            }
        }
        let recip = Jet::constant(sh.clone(), 1.0) / m[col * n + col].clone();
        for k in 0..n {
            m[col * n + k] = m[col * n + k].clone() * recip.clone();
            inv[col * n + k] = inv[col * n + k].clone() * recip.clone();
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row * n + col].clone();
            if factor.value() == 0.0 && factor.valid_order() == factor.shape().order() {
                // Still subtract: higher coefficients may be nonzero.
            }
            for k in 0..n {
                m[row * n + k] = m[row * n + k].clone() - factor.clone() * m[col * n + k].clone();
                inv[row * n + k] =
                    inv[row * n + k].clone() - factor.clone() * inv[col * n + k].clone();
            }
        }
    }
    Ok(inv)
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Spray coefficients G^i(x, y).
pub fn spray(spec: &MetricSpec, tp: &TangentPoint) -> Result<Vec<f64>> {
    Ok(PointJets::new(spec, tp, 2)?.spray_values())
}

/// Mixed partial of a spray component G^i with respect to the combined
/// (x, y) variables, read from the Taylor-mode pipeline.
pub fn spray_partial(
    spec: &MetricSpec,
    tp: &TangentPoint,
    i: usize,
    idx: &MultiIndex,
) -> Result<f64> {
    let pj = PointJets::new(spec, tp, 2 + idx.total())?;
    Ok(pj.spray[i].partial(idx.orders()))
}

/// Mixed partial of a connection coefficient Gamma^i_jk with respect to the
/// combined (x, y) variables, read from the Taylor-mode pipeline.
pub fn gamma_partial(
    spec: &MetricSpec,
    tp: &TangentPoint,
    slot: (usize, usize, usize),
    idx: &MultiIndex,
) -> Result<f64> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 3 + idx.total())?;
    Ok(pj.gamma[(slot.0 * n + slot.1) * n + slot.2].partial(idx.orders()))
}

/// Nonlinear connection G^i_j = dG^i/dy^j.
pub fn nonlinear_connection(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    let pj = PointJets::new(spec, tp, 3)?;
    let n = pj.n;
    Ok(Tensor::from_fn(
        n,
        &[Variance::Upper, Variance::Lower],
        |i| pj.nonlin[i[0] * n + i[1]].value(),
    ))
}

/// Horizontal basis derivative of a scalar observable on the tangent
/// bundle: delta f / delta x^k = df/dx^k - G^j_k df/dy^j, with the
/// observable differentiated by central differences.
pub fn delta_x(
    spec: &MetricSpec,
    f: &dyn Fn(&[f64], &[f64]) -> f64,
    tp: &TangentPoint,
    k: usize,
) -> Result<f64> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 3)?;
    let mut z = Vec::with_capacity(2 * n);
    z.extend_from_slice(tp.x());
    z.extend_from_slice(tp.y());
    let wrapped = |zz: &[f64]| f(&zz[..n], &zz[n..]);
    let h = fd_default_step(&z, 1);
    let mut v = fd_partial(&wrapped, &z, &MultiIndex::single(2 * n, k, 1), h);
    for j in 0..n {
        let dyj = fd_partial(&wrapped, &z, &MultiIndex::single(2 * n, n + j, 1), h);
        v -= pj.nonlin[j * n + k].value() * dyj;
    }
    Ok(v)
}

/// All Cartan connection data at a point.
pub fn cartan_coefficients(spec: &MetricSpec, tp: &TangentPoint) -> Result<ConnectionData> {
    let pj = PointJets::new(spec, tp, 3)?;
    let n = pj.n;
    let upper = pj.cartan_upper_values();
    let lower = pj.cartan_lower_values();
    let gam = pj.gamma_values();

    // Formal Christoffel symbols from plain x-derivatives of g.
    let mut formal = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for h in 0..n {
                    let sum = pj.g[h * n + k].d1(j) + pj.g[h * n + j].d1(k) - pj.g[j * n + k].d1(h);
                    acc += pj.ginv[i * n + h].value() * sum;
                }
                formal[(i * n + j) * n + k] = 0.5 * acc;
            }
        }
    }

    let t3 = |data: &[f64], variance: &[Variance]| {
        let data = data.to_vec();
        Tensor::from_fn(n, variance, move |i| data[(i[0] * n + i[1]) * n + i[2]])
    };
    let ul = [Variance::Upper, Variance::Lower, Variance::Lower];
    let ll = [Variance::Lower, Variance::Lower, Variance::Lower];
    Ok(ConnectionData {
        dim: n,
        spray: pj.spray_values(),
        nonlinear: Tensor::from_fn(n, &[Variance::Upper, Variance::Lower], |i| {
            pj.nonlin[i[0] * n + i[1]].value()
        }),
        gamma: t3(&gam, &ul),
        cartan_upper: t3(&upper, &ul),
        cartan_lower: t3(&lower, &ll),
        formal_christoffel: t3(&formal, &ul),
    })
}

/// Cartan horizontal covariant derivative of a tensor field; one lower slot
/// is appended for the direction of differentiation.
pub fn h_covariant(spec: &MetricSpec, field: &TensorField, tp: &TangentPoint) -> Result<Tensor> {
    covariant_impl(spec, field, tp, true)
}

/// Cartan vertical covariant derivative (torsion terms, dotted partials).
pub fn v_covariant(spec: &MetricSpec, field: &TensorField, tp: &TangentPoint) -> Result<Tensor> {
    covariant_impl(spec, field, tp, false)
}

fn covariant_impl(
    spec: &MetricSpec,
    field: &TensorField,
    tp: &TangentPoint,
    horizontal: bool,
) -> Result<Tensor> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 3)?;
    let coeffs = if horizontal {
        pj.gamma_values()
    } else {
        pj.cartan_upper_values()
    };
    let t0 = field.eval(tp)?;
    let rank = t0.rank();

    // Field derivatives by central differences with one Richardson level.
    let h = fd_default_step(tp.x(), 1);
    let diff_at = |block_y: bool, k: usize, step: f64| -> Result<Tensor> {
        let shift = |sign: f64| -> Result<Tensor> {
            let mut x = tp.x().to_vec();
            let mut y = tp.y().to_vec();
            if block_y {
                y[k] += sign * step;
            } else {
                x[k] += sign * step;
            }
            field.eval(&TangentPoint::new(x, y)?)
        };
        let plus = shift(1.0)?;
        let minus = shift(-1.0)?;
        Ok(Tensor::from_fn(n, t0.variance(), |idx| {
            (plus.get(idx) - minus.get(idx)) / (2.0 * step)
        }))
    };
    let richardson = |block_y: bool, k: usize| -> Result<Tensor> {
        let coarse = diff_at(block_y, k, h)?;
        let fine = diff_at(block_y, k, h / 2.0)?;
        Ok(Tensor::from_fn(n, t0.variance(), |idx| {
            (4.0 * fine.get(idx) - coarse.get(idx)) / 3.0
        }))
    };

    let dx: Vec<Tensor> = (0..n)
        .map(|k| richardson(false, k))
        .collect::<Result<_>>()?;
    let dy: Vec<Tensor> = (0..n).map(|k| richardson(true, k)).collect::<Result<_>>()?;

    let mut out_var = t0.variance().to_vec();
    out_var.push(Variance::Lower);
    let c3 = |i: usize, j: usize, k: usize| coeffs[(i * n + j) * n + k];

    let mut out = Tensor::zeros(n, &out_var);
    let all = out.indices().collect::<Vec<_>>();
    for idx in all {
        let (tidx, k) = idx.split_at(rank);
        let k = k[0];
        // Base derivative: delta_k (horizontal) or plain d/dy^k (vertical).
        let mut v = if horizontal {
            let mut d = dx[k].get(tidx);
            for (j, dyj) in dy.iter().enumerate() {
                d -= pj.nonlin[j * n + k].value() * dyj.get(tidx);
            }
            d
        } else {
            dy[k].get(tidx)
        };
        // One connection term per slot.
        let mut scratch = tidx.to_vec();
        for (slot, variance) in t0.variance().iter().enumerate() {
            let fixed = tidx[slot];
            for r in 0..n {
                scratch.copy_from_slice(tidx);
                scratch[slot] = r;
                let t_r = t0.get(&scratch);
                match variance {
                    Variance::Upper => v += t_r * c3(fixed, r, k),
                    Variance::Lower => v -= t_r * c3(r, fixed, k),
                }
            }
        }
        out.set(&idx, v);
    }
    Ok(out)
}

/// Finsler gradient of a scalar function: the vector solving
/// h^i = g^{ij}(x, grad h) dh_j, by damped fixed-point iteration with a
/// closed-form short-circuit in the Riemannian case.
pub fn gradient(spec: &MetricSpec, h: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    let n = spec.dim();
    let dh = h.gradient(x)?;
    let dh_norm = dh.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dh_norm < 1e-13 {
        return Ok(vec![0.0; n]);
    }

    let apply_ginv = |y: &[f64]| -> Result<Vec<f64>> {
        let tp = TangentPoint::new(x.to_vec(), y.to_vec())?;
        let ginv = spec.g_inverse_matrix(&tp)?;
        Ok((0..n)
            .map(|i| (0..n).map(|j| ginv[i * n + j] * dh[j]).sum())
            .collect())
    };

    if spec.is_riemannian() {
        return apply_ginv(&dh);
    }

    let mut y = dh.clone();
    const THETA: f64 = 0.5;
    const TOL: f64 = 1e-12;
    const MAX_ITERS: usize = 200;
    for _ in 0..MAX_ITERS {
        let next = apply_ginv(&y)?;
        let mut delta = 0.0f64;
        let mut norm = 0.0f64;
        for i in 0..n {
            let blended = (1.0 - THETA) * y[i] + THETA * next[i];
            delta = delta.max((blended - y[i]).abs());
            norm = norm.max(blended.abs());
            y[i] = blended;
        }
        if delta <= TOL * (1.0 + norm) {
            // Residual acceptance: |h^i - g^{ij}(x, grad h) h_j| <= 1e-10.
            let check = apply_ginv(&y)?;
            let resid = y
                .iter()
                .zip(&check)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if resid <= 1e-10 * (1.0 + norm) {
                return Ok(y);
            }
        }
    }
    Err(Error::NonConvergence(MAX_ITERS))
}

/// Cartan Hessian of a scalar function at a tangent point:
/// Hess(h)_ij = d^2 h / dx^i dx^j - (Gamma^k_ij + C^k_ij) dh_k.
pub fn hessian(spec: &MetricSpec, h: &ScalarField, tp: &TangentPoint) -> Result<Tensor> {
    let n = spec.dim();
    let pj = PointJets::new(spec, tp, 3)?;
    let gam = pj.gamma_values();
    let cart = pj.cartan_upper_values();
    let hxx = h.hessian_matrix(tp.x())?;
    let dh = h.gradient(tp.x())?;
    Ok(Tensor::from_fn(
        n,
        &[Variance::Lower, Variance::Lower],
        |i| {
            let (a, b) = (i[0], i[1]);
            let mut v = hxx[a * n + b];
            for k in 0..n {
                v -= (gam[(k * n + a) * n + b] + cart[(k * n + a) * n + b]) * dh[k];
            }
            v
        },
    ))
}

/// Finsler Laplacian: the g-trace of the Cartan Hessian.
pub fn laplacian(spec: &MetricSpec, h: &ScalarField, tp: &TangentPoint) -> Result<f64> {
    let n = spec.dim();
    let hess = hessian(spec, h, tp)?;
    let ginv = spec.g_inverse_matrix(tp)?;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += ginv[i * n + j] * hess.get(&[i, j]);
        }
    }
    Ok(acc)
}

/// Horizontal divergence div^h Y = dY^i/dx^i + Gamma^i_{ij} Y^j.
pub fn div_h(spec: &MetricSpec, vf: &VectorField, tp: &TangentPoint) -> Result<f64> {
    let n = spec.dim();
    if vf.dim() != n {
        return Err(Error::InvalidParameter(
            "vector field dimension mismatch".into(),
        ));
    }
    let pj = PointJets::new(spec, tp, 3)?;
    let gam = pj.gamma_values();
    let yv = vf.eval(tp.x())?;
    let mut acc = 0.0;
    for i in 0..n {
        acc += vf
            .component(i)
            .partial(tp.x(), &MultiIndex::single(n, i, 1))?;
    }
    for j in 0..n {
        let mut trace = 0.0;
        for i in 0..n {
            trace += gam[(i * n + i) * n + j];
        }
        acc += trace * yv[j];
    }
    Ok(acc)
}

/// Vertical divergence div^v Y = C^i_{ij} Y^j.
pub fn div_v(spec: &MetricSpec, vf: &VectorField, tp: &TangentPoint) -> Result<f64> {
    let n = spec.dim();
    if vf.dim() != n {
        return Err(Error::InvalidParameter(
            "vector field dimension mismatch".into(),
        ));
    }
    let pj = PointJets::new(spec, tp, 3)?;
    let cart = pj.cartan_upper_values();
    let yv = vf.eval(tp.x())?;
    let mut acc = 0.0;
    for j in 0..n {
        let mut trace = 0.0;
        for i in 0..n {
            trace += cart[(i * n + i) * n + j];
        }
        acc += trace * yv[j];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::sample;

    fn tp(x: &[f64], y: &[f64]) -> TangentPoint {
        TangentPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn flat_spray_vanishes() {
        let e = MetricSpec::euclidean(2).unwrap();
        let g = spray(&e, &tp(&[0.4, -0.2], &[1.0, 2.0])).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn funk_spray_is_half_f_times_y() {
        let f = MetricSpec::funk(2).unwrap();
        for p in sample::tangent_points(&f, 20, 0.8, 21).unwrap() {
            let fval = f.eval_f(&p).unwrap();
            let g = spray(&f, &p).unwrap();
            for (i, gi) in g.iter().enumerate() {
                let want = 0.5 * fval * p.y()[i];
                assert!(
                    (gi - want).abs() <= 1e-6 * (1.0 + want.abs()),
                    "G^{i} = {gi} but F y^i / 2 = {want}"
                );
            }
        }
    }

    #[test]
    fn spray_is_two_homogeneous() {
        let f = MetricSpec::funk(2).unwrap();
        for p in sample::tangent_points(&f, 10, 0.8, 22).unwrap() {
            let g1 = spray(&f, &p).unwrap();
            let p2 = p.with_y(p.y().iter().map(|v| 2.0 * v).collect()).unwrap();
            let g2 = spray(&f, &p2).unwrap();
            for i in 0..2 {
                assert!((g2[i] - 4.0 * g1[i]).abs() <= 1e-8 * (1.0 + g1[i].abs()));
            }
        }
    }

    #[test]
    fn nonlinear_connection_satisfies_euler_and_matches_fd() {
        let f = MetricSpec::funk(2).unwrap();
        for p in sample::tangent_points(&f, 10, 0.75, 23).unwrap() {
            let nl = nonlinear_connection(&f, &p).unwrap();
            let g = spray(&f, &p).unwrap();
            for (i, gi) in g.iter().enumerate() {
                let contracted: f64 = (0..2).map(|j| nl.get(&[i, j]) * p.y()[j]).sum();
                assert!(
                    (contracted - 2.0 * gi).abs() <= 1e-8 * (1.0 + gi.abs()),
                    "Euler identity G^i_j y^j = 2 G^i failed"
                );
            }
            // Cross-check against the finite-difference oracle in y.
            let spec = f.clone();
            for i in 0..2 {
                for j in 0..2 {
                    let func = |z: &[f64]| {
                        let q = TangentPoint::new(z[..2].to_vec(), z[2..].to_vec()).unwrap();
                        spray(&spec, &q).unwrap()[i]
                    };
                    let z: Vec<f64> = p.x().iter().chain(p.y()).copied().collect();
                    let fd = fd_partial(&func, &z, &MultiIndex::single(4, 2 + j, 1), 1e-4);
                    assert!(
                        (nl.get(&[i, j]) - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                        "G^{i}_{j}: jet {} vs fd {fd}",
                        nl.get(&[i, j])
                    );
                }
            }
        }
    }

    #[test]
    fn delta_of_x_only_functions_is_plain_derivative_on_flat() {
        let e = MetricSpec::euclidean(2).unwrap();
        let p = tp(&[0.3, 0.7], &[1.0, -0.5]);
        let f = |x: &[f64], _y: &[f64]| x[0] * x[0] * x[1];
        let d0 = delta_x(&e, &f, &p, 0).unwrap();
        assert!((d0 - 2.0 * 0.3 * 0.7).abs() < 1e-9);
        // Linearity.
        let g = |x: &[f64], _y: &[f64]| x[1].sin();
        let fg = |x: &[f64], y: &[f64]| f(x, y) + g(x, y);
        let sum = delta_x(&e, &fg, &p, 1).unwrap();
        let parts = delta_x(&e, &f, &p, 1).unwrap() + delta_x(&e, &g, &p, 1).unwrap();
        assert!((sum - parts).abs() < 1e-9);
    }

    #[test]
    fn f_is_horizontally_constant_on_the_catalog() {
        for spec in sample::test_catalog().unwrap() {
            let inner = spec.clone();
            let f = move |x: &[f64], y: &[f64]| {
                inner
                    .eval_f(&TangentPoint::new(x.to_vec(), y.to_vec()).unwrap())
                    .unwrap()
            };
            for p in sample::tangent_points(&spec, 8, 0.7, 29).unwrap() {
                for k in 0..spec.dim() {
                    let d = delta_x(&spec, &f, &p, k).unwrap();
                    assert!(
                        d.abs() <= 1e-7,
                        "{}: delta_{k} F = {d:.3e} should vanish",
                        spec.name()
                    );
                }
            }
        }
    }

    #[test]
    fn riemannian_specs_have_no_torsion_and_gamma_reduces() {
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        for p in sample::tangent_points(&s, 10, 1.0, 31).unwrap() {
            let cd = cartan_coefficients(&s, &p).unwrap();
            assert!(cd.cartan_upper.sup_norm() < 1e-9, "C should vanish");
            assert!(cd.cartan_lower.sup_norm() < 1e-9);
            assert!(
                cd.gamma.distance(&cd.formal_christoffel) < 1e-8,
                "Gamma should equal the formal Christoffel symbols"
            );
        }
    }

    #[test]
    fn sphere_gamma_matches_closed_form_levi_civita() {
        // a_ij = lambda delta_ij with lambda = 4 / (1 + |x|^2)^2 has
        // gamma^i_jk = (delta_ik p_j + delta_ij p_k - delta_jk p_i) / 2
        // with p = grad(ln lambda).
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        let x = [0.3, -0.5];
        let p = tp(&x, &[0.7, 0.2]);
        let cd = cartan_coefficients(&s, &p).unwrap();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let grad_ln: Vec<f64> = x.iter().map(|xi| -4.0 * xi / (1.0 + r2)).collect();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut want = 0.0;
                    if i == k {
                        want += 0.5 * grad_ln[j];
                    }
                    if i == j {
                        want += 0.5 * grad_ln[k];
                    }
                    if j == k {
                        want -= 0.5 * grad_ln[i];
                    }
                    let got = cd.gamma.get(&[i, j, k]);
                    assert!(
                        (got - want).abs() <= 1e-6 * (1.0 + want.abs()),
                        "Gamma^{i}_{j}{k}: {got} vs closed form {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn connection_invariants_across_the_catalog() {
        for spec in sample::test_catalog().unwrap() {
            let n = spec.dim();
            for p in sample::tangent_points(&spec, 50, 0.7, 37).unwrap() {
                let cd = cartan_coefficients(&spec, &p).unwrap();
                let scale = 1.0 + cd.gamma.sup_norm();
                assert!(cd.gamma.symmetry_defect(1, 2) <= 1e-8 * scale);
                assert!(cd.cartan_upper.symmetry_defect(1, 2) <= 1e-8 * scale);
                assert!(cd.cartan_lower.symmetry_defect(0, 1) <= 1e-8 * scale);
                assert!(cd.cartan_lower.symmetry_defect(1, 2) <= 1e-8 * scale);
                // C_ijk y^k = 0.
                for i in 0..n {
                    for j in 0..n {
                        let c: f64 = (0..n)
                            .map(|k| cd.cartan_lower.get(&[i, j, k]) * p.y()[k])
                            .sum();
                        assert!(c.abs() <= 1e-8 * scale, "{}: C y != 0", spec.name());
                    }
                }
                // Gamma^i_jk y^j y^k = 2 G^i, and likewise for the formal
                // Christoffel symbols.
                for i in 0..n {
                    let mut acc = 0.0;
                    let mut acc_formal = 0.0;
                    for j in 0..n {
                        for k in 0..n {
                            acc += cd.gamma.get(&[i, j, k]) * p.y()[j] * p.y()[k];
                            acc_formal +=
                                cd.formal_christoffel.get(&[i, j, k]) * p.y()[j] * p.y()[k];
                        }
                    }
                    let want = 2.0 * cd.spray[i];
                    assert!(
                        (acc - want).abs() <= 1e-8 * (1.0 + want.abs()),
                        "{}: Gamma y y = {acc} vs 2G = {want}",
                        spec.name()
                    );
                    assert!(
                        (acc_formal - want).abs() <= 1e-8 * (1.0 + want.abs()),
                        "{}: formal gamma y y = {acc_formal} vs 2G = {want}",
                        spec.name()
                    );
                }
            }
        }
    }

    #[test]
    fn cartan_connection_is_metric_compatible() {
        for spec in sample::test_catalog().unwrap() {
            let gfield = {
                let spec = spec.clone();
                TensorField::new(vec![Variance::Lower, Variance::Lower], move |q| {
                    spec.fundamental_tensor(q)
                })
            };
            for p in sample::tangent_points(&spec, 5, 0.6, 41).unwrap() {
                let nabla_g = h_covariant(&spec, &gfield, &p).unwrap();
                assert!(
                    nabla_g.sup_norm() <= 1e-6,
                    "{}: |nabla g| = {:.3e}",
                    spec.name(),
                    nabla_g.sup_norm()
                );
                let dot_g = v_covariant(&spec, &gfield, &p).unwrap();
                assert!(
                    dot_g.sup_norm() <= 1e-6,
                    "{}: |dot-nabla g| = {:.3e}",
                    spec.name(),
                    dot_g.sup_norm()
                );
            }
        }
    }

    #[test]
    fn covariant_derivative_edge_cases() {
        let e = MetricSpec::euclidean(2).unwrap();
        let p = tp(&[0.2, 0.1], &[1.0, 0.3]);
        // Constant components differentiate to zero on flat space.
        let constf = TensorField::new(vec![Variance::Upper], |_q| {
            Ok(Tensor::from_fn(2, &[Variance::Upper], |i| {
                if i[0] == 0 {
                    2.0
                } else {
                    -1.0
                }
            }))
        });
        let d = h_covariant(&e, &constf, &p).unwrap();
        assert!(d.sup_norm() < 1e-9);
        // Scalar (rank-0) fields: nabla_k h = d h / d x^k.
        let scal = TensorField::new(vec![], |q| {
            let mut t = Tensor::zeros(2, &[]);
            t.set(&[], q.x()[0] * q.x()[0] + q.x()[1]);
            Ok(t)
        });
        let d = h_covariant(&e, &scal, &p).unwrap();
        assert!((d.get(&[0]) - 2.0 * 0.2).abs() < 1e-8);
        assert!((d.get(&[1]) - 1.0).abs() < 1e-8);
        // Riemannian v-derivative reduces to the plain y-derivative, which
        // vanishes for a field independent of y.
        let vd = v_covariant(&e, &constf, &p).unwrap();
        assert!(vd.sup_norm() < 1e-9);
    }

    #[test]
    fn gradient_closed_form_fixed_point_and_constants() {
        // Riemannian: grad h = a^{ij} h_j.
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        let h = ScalarField::parse("x_1").unwrap();
        let x = [0.3, 0.4];
        let grad = gradient(&s, &h, &x).unwrap();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let lam = 4.0 / (1.0 + r2).powi(2);
        assert!((grad[0] - 1.0 / lam).abs() < 1e-10);
        assert!(grad[1].abs() < 1e-12);

        // Randers: the fixed point satisfies its defining equation.
        let r = MetricSpec::randers_const(vec![0.5, 0.0]).unwrap();
        let grad = gradient(&r, &h, &x).unwrap();
        let q = TangentPoint::new(x.to_vec(), grad.clone()).unwrap();
        let ginv = r.g_inverse_matrix(&q).unwrap();
        let dh = [1.0, 0.0];
        for i in 0..2 {
            let want: f64 = (0..2).map(|j| ginv[i * 2 + j] * dh[j]).sum();
            assert!(
                (grad[i] - want).abs() <= 1e-10,
                "fixed-point residual {}",
                (grad[i] - want).abs()
            );
        }

        // Constant h has zero gradient.
        let c = ScalarField::constant(3.5);
        assert!(gradient(&r, &c, &x).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn hessian_laplacian_and_divergences() {
        let e = MetricSpec::euclidean(2).unwrap();
        let p = tp(&[0.4, -0.3], &[1.0, 0.0]);
        // h = |x|^2 / 2 on flat space: Hessian identity, Laplacian n.
        let h = ScalarField::parse("(x_1^2 + x_2^2) / 2").unwrap();
        let hess = hessian(&e, &h, &p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((hess.get(&[i, j]) - want).abs() < 1e-10);
            }
        }
        assert!((laplacian(&e, &h, &p).unwrap() - 2.0).abs() < 1e-10);
        // Linearity of the Laplacian under scaling.
        let h3 = ScalarField::parse("3 * ((x_1^2 + x_2^2) / 2)").unwrap();
        assert!((laplacian(&e, &h3, &p).unwrap() - 6.0).abs() < 1e-9);

        // div_h(x) = n on flat space; div_v vanishes for Riemannian metrics.
        let vf = VectorField::new(vec![
            ScalarField::parse("x_1").unwrap(),
            ScalarField::parse("x_2").unwrap(),
        ]);
        assert!((div_h(&e, &vf, &p).unwrap() - 2.0).abs() < 1e-10);
        assert!(div_v(&e, &vf, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sphere_height_function_is_concircular() {
        // rho = (1 - |x|^2) / (1 + |x|^2) on the round sphere satisfies
        // Hess rho = -rho g and hence Delta rho = -n rho.
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        let rho = ScalarField::parse("(1 - x_1^2 - x_2^2) / (1 + x_1^2 + x_2^2)").unwrap();
        for p in sample::tangent_points(&s, 10, 1.2, 43).unwrap() {
            let hess = hessian(&s, &rho, &p).unwrap();
            let g = s.fundamental_tensor(&p).unwrap();
            let r = rho.eval(p.x()).unwrap();
            let scale = 1.0 + hess.sup_norm();
            for i in 0..2 {
                for j in 0..2 {
                    let want = -r * g.get(&[i, j]);
                    assert!(
                        (hess.get(&[i, j]) - want).abs() <= 1e-5 * scale,
                        "Hess rho != -rho g at {:?}",
                        p.x()
                    );
                }
            }
            let lap = laplacian(&s, &rho, &p).unwrap();
            assert!((lap + 2.0 * r).abs() <= 1e-5 * (1.0 + lap.abs()));
        }
    }

    #[test]
    fn div_h_of_gradient_matches_laplacian_on_sphere() {
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        let rho = ScalarField::parse("(1 - x_1^2 - x_2^2) / (1 + x_1^2 + x_2^2)").unwrap();
        // grad rho as a closed-form callback field (y-dependence suppressed:
        // the metric is Riemannian).
        let grad_field = {
            let s = s.clone();
            let rho = rho.clone();
            VectorField::new(
                (0..2)
                    .map(|i| {
                        let s = s.clone();
                        let rho = rho.clone();
                        ScalarField::callback(move |x: &[f64]| gradient(&s, &rho, x).unwrap()[i])
                    })
                    .collect(),
            )
        };
        for p in sample::tangent_points(&s, 5, 1.0, 47).unwrap() {
            let dh = div_h(&s, &grad_field, &p).unwrap();
            let lap = laplacian(&s, &rho, &p).unwrap();
            assert!(
                (dh - lap).abs() <= 1e-5 * (1.0 + lap.abs()),
                "div grad = {dh} vs laplacian {lap}"
            );
        }
    }

    #[test]
    fn randers_hessian_is_symmetric_and_uses_torsion() {
        let spec = MetricSpec::randers(
            "randers-x2",
            vec![
                vec![Expr::Const(1.0), Expr::Const(0.0)],
                vec![Expr::Const(0.0), Expr::Const(1.0)],
            ],
            vec![Expr::parse("0.3 + 0.1 * x_2").unwrap(), Expr::Const(0.0)],
            f64::INFINITY,
        )
        .unwrap();
        let h = ScalarField::parse("x_1 * x_2").unwrap();
        for p in sample::tangent_points(&spec, 5, 0.8, 53).unwrap() {
            let hess = hessian(&spec, &h, &p).unwrap();
            assert!(hess.symmetry_defect(0, 1) <= 1e-9 * (1.0 + hess.sup_norm()));
        }
    }
}
