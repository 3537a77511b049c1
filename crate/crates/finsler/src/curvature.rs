//! Chern and Cartan hh-curvature, spray curvature, Riemann and Ricci
//! curvatures, and flag curvature.
//!
//! Two y-contractions of the hh-curvature appear in the literature and they
//! are not interchangeable. The conventions fixed here:
//!
//! * `spray_curvature` R^i_km is the curvature of the nonlinear connection,
//!   oriented so that y^j R^i_jkm = R^i_km holds against `chern_hh`;
//! * `riemann_operator` R^i_k = R^i_km y^m is the Jacobi operator, positive
//!   on the round sphere (R^i_k = kappa (F^2 d^i_k - y^i y_k) there);
//! * `ricci_trace_alt` g^{mj} R^i_mjk is the 0-homogeneous trace used by the
//!   4-index integrability tensor, exposed for comparison.

use crate::connection::PointJets;
use crate::diffengine::require_order;
use crate::error::{Error, Result};
use crate::metrics::{MetricSpec, TangentPoint};
use crate::tensor::{Tensor, Variance};

/// Curvature tensors of a metric at one tangent point, all computed from a
/// single jet pipeline pass.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub dim: usize,
    /// Chern hh-curvature R^i_jkm.
    pub chern: Tensor,
    /// Cartan hh-curvature *R^i_jkm = R^i_jkm + R^s_km C^i_sj.
    pub cartan: Tensor,
    /// Spray curvature R^i_km (antisymmetric in k, m).
    pub spray_curvature: Tensor,
    /// Riemann curvature operator R^i_k = R^i_km y^m.
    pub riemann: Tensor,
    /// Ricci scalar Ric = R^i_i (2-homogeneous in y).
    pub ricci: f64,
}

const UL4: [Variance; 4] = [
    Variance::Upper,
    Variance::Lower,
    Variance::Lower,
    Variance::Lower,
];

pub(crate) fn spray_curvature_values(pj: &PointJets) -> Vec<f64> {
    let n = pj.n;
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for k in 0..n {
            for m in 0..n {
                let a = pj.delta_value(&pj.nonlin[i * n + m], k);
                let b = pj.delta_value(&pj.nonlin[i * n + k], m);
                out[(i * n + k) * n + m] = a - b;
            }
        }
    }
    out
}

pub(crate) fn riemann_values(pj: &PointJets) -> Vec<f64> {
    let n = pj.n;
    let rkm = spray_curvature_values(pj);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            out[i * n + k] = (0..n).map(|m| rkm[(i * n + k) * n + m] * pj.y[m]).sum();
        }
    }
    out
}

pub(crate) fn ricci_value(pj: &PointJets) -> f64 {
    let n = pj.n;
    let r = riemann_values(pj);
    (0..n).map(|i| r[i * n + i]).sum()
}

pub(crate) fn chern_values(pj: &PointJets) -> Vec<f64> {
    let n = pj.n;
    let gam = pj.gamma_values();
    let c3 = |i: usize, j: usize, k: usize| gam[(i * n + j) * n + k];
    let mut out = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut v = pj.delta_value(&pj.gamma[(i * n + j) * n + m], k)
                        - pj.delta_value(&pj.gamma[(i * n + j) * n + k], m);
                    for s in 0..n {
                        v += c3(i, s, k) * c3(s, j, m) - c3(i, s, m) * c3(s, j, k);
                    }
                    out[((i * n + j) * n + k) * n + m] = v;
                }
            }
        }
    }
    out
}

impl CurvatureData {
    pub fn compute(spec: &MetricSpec, tp: &TangentPoint) -> Result<CurvatureData> {
        let pj = PointJets::new(spec, tp, 4)?;
        let n = pj.n;
        let chern = chern_values(&pj);
        let rkm = spray_curvature_values(&pj);
        let riem = riemann_values(&pj);
        let cart_tor = pj.cartan_upper_values();

        let mut cartan = chern.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut corr = 0.0;
                        for s in 0..n {
                            corr += rkm[(s * n + k) * n + m] * cart_tor[(i * n + s) * n + j];
                        }
                        cartan[((i * n + j) * n + k) * n + m] += corr;
                    }
                }
            }
        }

        let ricci = (0..n).map(|i| riem[i * n + i]).sum();
        let as_t4 = |data: Vec<f64>| {
            Tensor::from_fn(n, &UL4, move |i| {
                data[((i[0] * n + i[1]) * n + i[2]) * n + i[3]]
            })
        };
        Ok(CurvatureData {
            dim: n,
            chern: as_t4(chern),
            cartan: as_t4(cartan),
            spray_curvature: Tensor::from_fn(
                n,
                &[Variance::Upper, Variance::Lower, Variance::Lower],
                |i| rkm[(i[0] * n + i[1]) * n + i[2]],
            ),
            riemann: Tensor::from_fn(n, &[Variance::Upper, Variance::Lower], |i| {
                riem[i[0] * n + i[1]]
            }),
            ricci,
        })
    }
}

/// Chern hh-curvature tensor R^i_jkm.
pub fn chern_hh(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    Ok(CurvatureData::compute(spec, tp)?.chern)
}

/// Cartan hh-curvature tensor.
pub fn cartan_hh(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    Ok(CurvatureData::compute(spec, tp)?.cartan)
}

/// Spray curvature R^i_km from the nonlinear connection.
pub fn spray_curvature(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    let pj = PointJets::new(spec, tp, 4)?;
    let n = pj.n;
    let rkm = spray_curvature_values(&pj);
    Ok(Tensor::from_fn(
        n,
        &[Variance::Upper, Variance::Lower, Variance::Lower],
        |i| rkm[(i[0] * n + i[1]) * n + i[2]],
    ))
}

/// Riemann curvature operator R^i_k = R^i_km y^m (the Jacobi operator).
pub fn riemann_operator(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    let pj = PointJets::new(spec, tp, 4)?;
    let n = pj.n;
    let riem = riemann_values(&pj);
    Ok(Tensor::from_fn(
        n,
        &[Variance::Upper, Variance::Lower],
        |i| riem[i[0] * n + i[1]],
    ))
}

/// Ricci scalar Ric = R^i_i, 2-homogeneous in y.
pub fn ricci_scalar(spec: &MetricSpec, tp: &TangentPoint) -> Result<f64> {
    let pj = PointJets::new(spec, tp, 4)?;
    Ok(ricci_value(&pj))
}

/// The alternative g-trace R^i_k = g^{mj} R^i_mjk of the Chern
/// hh-curvature (0-homogeneous in y). This is the trace entering the
/// 4-index integrability tensor; it differs from `riemann_operator`.
pub fn ricci_trace_alt(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    let pj = PointJets::new(spec, tp, 4)?;
    let n = pj.n;
    let chern = chern_values(&pj);
    let ginv = pj.ginv_values();
    Ok(Tensor::from_fn(
        n,
        &[Variance::Upper, Variance::Lower],
        |i| {
            let (h, k) = (i[0], i[1]);
            let mut acc = 0.0;
            for m in 0..n {
                for j in 0..n {
                    acc += ginv[m * n + j] * chern[((h * n + m) * n + j) * n + k];
                }
            }
            acc
        },
    ))
}

/// Akbar-Zadeh Ricci tensor Ric_ik = 1/2 (Ric)_{y^i y^k}, evaluated by
/// central differences in y with one Richardson level on the 2-homogeneous
/// Ricci scalar.
pub fn ricci_tensor(spec: &MetricSpec, tp: &TangentPoint) -> Result<Tensor> {
    require_order(4).map_err(|_| Error::DepthExceeded {
        needed: 4,
        max: crate::diffengine::max_order(),
    })?;
    let n = spec.dim();
    let ynorm = tp.y().iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = 1e-3 * ynorm;

    let ric = |y: &[f64]| -> Result<f64> {
        let q = tp.with_y(y.to_vec())?;
        ricci_scalar(spec, &q)
    };

    let hess_at = |step: f64| -> Result<Vec<f64>> {
        let mut out = vec![0.0; n * n];
        let base = ric(tp.y())?;
        for i in 0..n {
            let mut yp = tp.y().to_vec();
            let mut ym = tp.y().to_vec();
            yp[i] += step;
            ym[i] -= step;
            out[i * n + i] = (ric(&yp)? - 2.0 * base + ric(&ym)?) / (step * step);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mut pp = tp.y().to_vec();
                let mut pm = tp.y().to_vec();
                let mut mp = tp.y().to_vec();
                let mut mm = tp.y().to_vec();
                pp[i] += step;
                pp[j] += step;
                pm[i] += step;
                pm[j] -= step;
                mp[i] -= step;
                mp[j] += step;
                mm[i] -= step;
                mm[j] -= step;
                let v = (ric(&pp)? - ric(&pm)? - ric(&mp)? + ric(&mm)?) / (4.0 * step * step);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Ok(out)
    };

    let coarse = hess_at(h)?;
    let fine = hess_at(h / 2.0)?;
    Ok(Tensor::from_fn(
        n,
        &[Variance::Lower, Variance::Lower],
        |i| 0.5 * (4.0 * fine[i[0] * n + i[1]] - coarse[i[0] * n + i[1]]) / 3.0,
    ))
}

/// Flag curvature of the flag with pole y and transverse edge X:
/// kappa = g(R(X), X) / (g(X,X) g(y,y) - g(X,y)^2) with R from
/// `riemann_operator`.
pub fn flag_curvature(spec: &MetricSpec, tp: &TangentPoint, flag: &[f64]) -> Result<f64> {
    let n = spec.dim();
    if flag.len() != n {
        return Err(Error::InvalidParameter(
            "flag vector dimension mismatch".into(),
        ));
    }
    let pj = PointJets::new(spec, tp, 4)?;
    let riem = riemann_values(&pj);
    let g = pj.g_values();
    let f2 = pj.f2.value();

    let gdot = |a: &[f64], b: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += g[i * n + j] * a[i] * b[j];
            }
        }
        acc
    };
    let gxx = gdot(flag, flag);
    let gxy = gdot(flag, tp.y());
    let den = gxx * f2 - gxy * gxy;
    if den <= 1e-10 * (1.0 + gxx * f2) {
        return Err(Error::DegenerateFlag);
    }
    let rx: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|k| riem[i * n + k] * flag[k]).sum())
        .collect();
    Ok(gdot(&rx, flag) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn tp(x: &[f64], y: &[f64]) -> TangentPoint {
        TangentPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn flat_curvature_vanishes() {
        let e = MetricSpec::euclidean(2).unwrap();
        let p = tp(&[0.3, 0.1], &[1.0, 0.5]);
        let cd = CurvatureData::compute(&e, &p).unwrap();
        assert!(cd.chern.sup_norm() < 1e-12);
        assert!(cd.spray_curvature.sup_norm() < 1e-12);
        assert!(cd.riemann.sup_norm() < 1e-12);
        assert!(cd.ricci.abs() < 1e-12);
        assert!(ricci_tensor(&e, &p).unwrap().sup_norm() < 1e-8);
    }

    #[test]
    fn sphere_chern_has_constant_curvature_shape() {
        // With this chart and convention: R^i_jkm = kappa (g_jm d^i_k - g_jk d^i_m).
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        for p in sample::tangent_points(&s, 6, 1.0, 61).unwrap() {
            let g = s.fundamental_tensor(&p).unwrap();
            let r = chern_hh(&s, &p).unwrap();
            let scale = 1.0 + r.sup_norm();
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for m in 0..2 {
                            let want = g.get(&[j, m]) * f64::from(u8::from(i == k))
                                - g.get(&[j, k]) * f64::from(u8::from(i == m));
                            assert!(
                                (r.get(&[i, j, k, m]) - want).abs() <= 1e-5 * scale,
                                "R^{i}_{j}{k}{m} = {} vs {want}",
                                r.get(&[i, j, k, m])
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ycontraction_of_chern_is_the_spray_curvature() {
        let f = MetricSpec::funk(2).unwrap();
        for p in sample::tangent_points(&f, 10, 0.7, 67).unwrap() {
            let cd = CurvatureData::compute(&f, &p).unwrap();
            let scale = 1.0 + cd.spray_curvature.sup_norm();
            for i in 0..2 {
                for k in 0..2 {
                    for m in 0..2 {
                        let contracted: f64 =
                            (0..2).map(|j| cd.chern.get(&[i, j, k, m]) * p.y()[j]).sum();
                        let direct = cd.spray_curvature.get(&[i, k, m]);
                        assert!(
                            (contracted - direct).abs() <= 1e-5 * scale,
                            "y^j R^i_jkm = {contracted} vs {direct}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn antisymmetries_and_flagpole_annihilation() {
        for spec in sample::test_catalog().unwrap() {
            for p in sample::tangent_points(&spec, 8, 0.7, 71).unwrap() {
                let cd = CurvatureData::compute(&spec, &p).unwrap();
                let scale = 1.0 + cd.chern.sup_norm();
                assert!(cd.chern.antisymmetry_defect(2, 3) <= 1e-8 * scale);
                assert!(cd.cartan.antisymmetry_defect(2, 3) <= 1e-8 * scale);
                assert!(cd.spray_curvature.antisymmetry_defect(1, 2) <= 1e-8 * scale);
                // R^i_k y^k = 0.
                let n = spec.dim();
                for i in 0..n {
                    let v: f64 = (0..n).map(|k| cd.riemann.get(&[i, k]) * p.y()[k]).sum();
                    assert!(
                        v.abs() <= 1e-8 * (1.0 + cd.riemann.sup_norm()),
                        "{}: R^i_k y^k = {v}",
                        spec.name()
                    );
                }
            }
        }
    }

    #[test]
    fn cartan_hh_equals_chern_for_riemannian_and_after_ycontraction() {
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        let p = tp(&[0.2, -0.4], &[0.8, 0.3]);
        let cd = CurvatureData::compute(&s, &p).unwrap();
        assert!(cd.cartan.distance(&cd.chern) < 1e-10);

        // On Funk the torsion correction dies after contraction with y^j.
        let f = MetricSpec::funk(2).unwrap();
        for p in sample::tangent_points(&f, 6, 0.7, 73).unwrap() {
            let cd = CurvatureData::compute(&f, &p).unwrap();
            let scale = 1.0 + cd.chern.sup_norm();
            for i in 0..2 {
                for k in 0..2 {
                    for m in 0..2 {
                        let a: f64 = (0..2)
                            .map(|j| cd.cartan.get(&[i, j, k, m]) * p.y()[j])
                            .sum();
                        let b: f64 = (0..2).map(|j| cd.chern.get(&[i, j, k, m]) * p.y()[j]).sum();
                        assert!((a - b).abs() <= 1e-9 * scale);
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_riemann_operator_is_f2_projection() {
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        for p in sample::tangent_points(&s, 10, 1.0, 79).unwrap() {
            let r = riemann_operator(&s, &p).unwrap();
            let f2 = s.eval_f(&p).unwrap().powi(2);
            let g = s.fundamental_tensor(&p).unwrap();
            let ylow: Vec<f64> = (0..2)
                .map(|i| (0..2).map(|j| g.get(&[i, j]) * p.y()[j]).sum())
                .collect();
            let scale = 1.0 + r.sup_norm();
            for i in 0..2 {
                for (k, yk) in ylow.iter().enumerate() {
                    let want = f2 * f64::from(u8::from(i == k)) - p.y()[i] * yk;
                    assert!(
                        (r.get(&[i, k]) - want).abs() <= 1e-5 * scale,
                        "R^{i}_{k} = {} vs {want}",
                        r.get(&[i, k])
                    );
                }
            }
        }
    }

    #[test]
    fn funk_riemann_operator_has_constant_flag_minus_quarter() {
        let f = MetricSpec::funk(2).unwrap();
        for p in sample::tangent_points(&f, 10, 0.7, 83).unwrap() {
            let r = riemann_operator(&f, &p).unwrap();
            let f2 = f.eval_f(&p).unwrap().powi(2);
            let g = f.fundamental_tensor(&p).unwrap();
            let ylow: Vec<f64> = (0..2)
                .map(|i| (0..2).map(|j| g.get(&[i, j]) * p.y()[j]).sum())
                .collect();
            let scale = 1.0 + r.sup_norm().max(f2);
            for i in 0..2 {
                for (k, yk) in ylow.iter().enumerate() {
                    let want = -0.25 * (f2 * f64::from(u8::from(i == k)) - p.y()[i] * yk);
                    assert!(
                        (r.get(&[i, k]) - want).abs() <= 1e-5 * scale,
                        "Funk R^{i}_{k} = {} vs {want}",
                        r.get(&[i, k])
                    );
                }
            }
        }
    }

    #[test]
    fn ricci_scalar_values_and_homogeneity() {
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        for p in sample::tangent_points(&s, 10, 1.0, 89).unwrap() {
            let ric = ricci_scalar(&s, &p).unwrap();
            let f2 = s.eval_f(&p).unwrap().powi(2);
            assert!(
                (ric - f2).abs() <= 1e-5 * (1.0 + f2),
                "Ric = {ric} vs F^2 = {f2}"
            );
            // 2-homogeneity.
            let p2 = p.with_y(p.y().iter().map(|v| 3.0 * v).collect()).unwrap();
            let ric2 = ricci_scalar(&s, &p2).unwrap();
            assert!((ric2 - 9.0 * ric).abs() <= 1e-7 * (1.0 + ric2.abs()));
        }
        let f = MetricSpec::funk(2).unwrap();
        for p in sample::tangent_points(&f, 10, 0.7, 97).unwrap() {
            let ric = ricci_scalar(&f, &p).unwrap();
            let f2 = f.eval_f(&p).unwrap().powi(2);
            assert!(
                (ric / f2 + 0.25).abs() <= 1e-4,
                "Funk Ric/F^2 = {} should be -1/4",
                ric / f2
            );
        }
    }

    #[test]
    fn ricci_trace_alt_on_the_sphere() {
        // g^{mj} R^i_mjk = -kappa (n-1) d^i_k with this Chern orientation.
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        let p = tp(&[0.25, 0.45], &[1.0, -0.6]);
        let alt = ricci_trace_alt(&s, &p).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let want = if i == k { -1.0 } else { 0.0 };
                assert!(
                    (alt.get(&[i, k]) - want).abs() <= 1e-5,
                    "alt R^{i}_{k} = {}",
                    alt.get(&[i, k])
                );
            }
        }
    }

    #[test]
    fn ricci_tensor_matches_constant_curvature_closed_form() {
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        for p in sample::tangent_points(&s, 5, 1.0, 101).unwrap() {
            let ric_t = ricci_tensor(&s, &p).unwrap();
            let g = s.fundamental_tensor(&p).unwrap();
            let scale = 1.0 + g.sup_norm();
            assert!(ric_t.symmetry_defect(0, 1) <= 1e-6 * scale);
            // Ric_ij = (n-1) kappa g_ij = g_ij for n=2, kappa=1.
            assert!(
                ric_t.distance(&g) <= 1e-4 * scale,
                "Ric_ij distance {}",
                ric_t.distance(&g)
            );
            // Ric_ij l^i l^j = Ric / F^2.
            let l = s.unit_vector(&p).unwrap();
            let mut contracted = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    contracted += ric_t.get(&[i, j]) * l[i] * l[j];
                }
            }
            let ric0 = ricci_scalar(&s, &p).unwrap() / s.eval_f(&p).unwrap().powi(2);
            assert!((contracted - ric0).abs() <= 1e-4 * (1.0 + ric0.abs()));
        }
    }

    #[test]
    fn flag_curvature_on_model_spaces() {
        let s = MetricSpec::sphere(2, 1.0).unwrap();
        for (p, x) in sample::flags(&s, 20, 1.0, 103).unwrap() {
            let k = flag_curvature(&s, &p, &x).unwrap();
            assert!((k - 1.0).abs() <= 1e-5, "sphere flag curvature {k}");
        }
        let h = MetricSpec::hyperbolic(2).unwrap();
        for (p, x) in sample::flags(&h, 20, 0.8, 107).unwrap() {
            let k = flag_curvature(&h, &p, &x).unwrap();
            assert!((k + 1.0).abs() <= 1e-5, "hyperbolic flag curvature {k}");
        }
        let e = MetricSpec::euclidean(2).unwrap();
        for (p, x) in sample::flags(&e, 5, 1.0, 109).unwrap() {
            assert!(flag_curvature(&e, &p, &x).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn funk_flag_curvature_is_minus_one_quarter() {
        let f = MetricSpec::funk(2).unwrap();
        for (p, x) in sample::flags(&f, 20, 0.7, 111).unwrap() {
            let k = flag_curvature(&f, &p, &x).unwrap();
            assert!((k + 0.25).abs() <= 1e-5, "funk flag curvature {k}");
        }
    }

    #[test]
    fn flag_curvature_invariances_and_degeneracy() {
        let f = MetricSpec::funk(2).unwrap();
        let (p, x) = sample::flags(&f, 1, 0.7, 113).unwrap().remove(0);
        let k0 = flag_curvature(&f, &p, &x).unwrap();
        // X -> a X + b y leaves the flag unchanged.
        let moved: Vec<f64> = x
            .iter()
            .zip(p.y())
            .map(|(xi, yi)| 1.7 * xi - 0.6 * yi)
            .collect();
        let k1 = flag_curvature(&f, &p, &moved).unwrap();
        assert!((k0 - k1).abs() <= 1e-6 * (1.0 + k0.abs()));
        // 0-homogeneity in the flagpole.
        let scaled = p.with_y(p.y().iter().map(|v| 3.0 * v).collect()).unwrap();
        let k2 = flag_curvature(&f, &scaled, &x).unwrap();
        assert!((k0 - k2).abs() <= 1e-6 * (1.0 + k0.abs()));
        // Degenerate flag: X parallel to y.
        let err = flag_curvature(&f, &p, p.y()).unwrap_err();
        assert!(matches!(err, Error::DegenerateFlag));
    }
}
