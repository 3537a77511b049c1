//! Finsler metrics on a single coordinate chart, and the model-space
//! catalog.
//!
//! A [`MetricSpec`] bundles the defining data of a metric (Riemannian
//! coefficients, Randers data, or a custom 1-homogeneous norm expression)
//! with a chart domain. All evaluation is generic over [`Scalar`], which is
//! what the derivative pipeline relies on.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::diffengine::{self, Jet, JetShape};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fields::ScalarField;
use crate::scalar::Scalar;
use crate::tensor::{determinant, invert_matrix, Tensor, Variance};

/// Margin kept from the chart boundary; derivative stencils need room.
pub const BOUNDARY_MARGIN: f64 = 1e-6;
/// Smallest admissible |y|.
pub const MIN_TANGENT_NORM: f64 = 1e-8;

/// A point of the slit tangent bundle: chart point `x` and direction
/// `y != 0`, the evaluation site of every tensor in the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TangentPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<TangentPoint> {
        if x.len() != y.len() {
            return Err(Error::InvalidParameter(format!(
                "x has dimension {} but y has dimension {}",
                x.len(),
                y.len()
            )));
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < MIN_TANGENT_NORM {
            return Err(Error::InvalidParameter(format!(
                "|y| = {norm:.3e} below the admissible floor {MIN_TANGENT_NORM:.0e}"
            )));
        }
        Ok(TangentPoint { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Same chart point, different direction.
    pub fn with_y(&self, y: Vec<f64>) -> Result<TangentPoint> {
        TangentPoint::new(self.x.clone(), y)
    }
}

#[derive(Clone, Debug)]
pub(crate) enum MetricKind {
    /// a_ij = coeff * delta_ij / (1 + kappa |x|^2)^2; covers the Euclidean,
    /// spherical, and hyperbolic model charts.
    ConformallyFlat { coeff: f64, kappa: f64 },
    /// a_ij(x) symmetric positive-definite, given entrywise.
    Riemannian { a: Vec<Vec<Expr>> },
    /// F = sqrt(a_ij y^i y^j) + b_i y^i.
    Randers { a: Vec<Vec<Expr>>, b: Vec<Expr> },
    /// F given directly as a positively 1-homogeneous expression.
    Custom { f: Expr },
    /// e^{phi(x)} * base, produced by conformal changes.
    Conformal {
        base: Box<MetricSpec>,
        phi: ScalarField,
    },
}

/// A Finsler metric on one chart.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    name: String,
    dim: usize,
    kind: MetricKind,
    domain_radius: f64,
}

fn sdot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = a[0].clone() * b[0].clone();
    for i in 1..a.len() {
        acc = acc + a[i].clone() * b[i].clone();
    }
    acc
}

impl MetricSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    /// One of `riemannian`, `randers`, `custom`.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            MetricKind::ConformallyFlat { .. } | MetricKind::Riemannian { .. } => "riemannian",
            MetricKind::Randers { .. } => "randers",
            MetricKind::Custom { .. } => "custom",
            MetricKind::Conformal { base, .. } => base.kind_name(),
        }
    }

    /// True when the fundamental tensor cannot depend on y (Cartan torsion
    /// vanishes identically).
    pub fn is_riemannian(&self) -> bool {
        match &self.kind {
            MetricKind::ConformallyFlat { .. } | MetricKind::Riemannian { .. } => true,
            MetricKind::Randers { .. } | MetricKind::Custom { .. } => false,
            MetricKind::Conformal { base, .. } => base.is_riemannian(),
        }
    }

    /// F^2 over any scalar type. The caller splits the combined variable
    /// list into the x and y blocks.
    pub fn f_squared<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        match &self.kind {
            MetricKind::ConformallyFlat { coeff, kappa } => {
                let y2 = sdot(y, y);
                if *kappa == 0.0 {
                    return Ok(y2.scale(*coeff));
                }
                let r2 = sdot(x, x);
                let d = r2.scale(*kappa) + x[0].lift(1.0);
                Ok(y2.scale(*coeff) / (d.clone() * d))
            }
            MetricKind::Riemannian { a } => {
                let n = y.len();
                let mut acc = x[0].lift(0.0);
                for i in 0..n {
                    for j in 0..n {
                        let aij = a[i][j].eval(x, y)?;
                        acc = acc + aij * y[i].clone() * y[j].clone();
                    }
                }
                Ok(acc)
            }
            MetricKind::Randers { a, b } => {
                let n = y.len();
                let mut alpha2 = x[0].lift(0.0);
                for i in 0..n {
                    for j in 0..n {
                        let aij = a[i][j].eval(x, y)?;
                        alpha2 = alpha2 + aij * y[i].clone() * y[j].clone();
                    }
                }
                let mut beta = x[0].lift(0.0);
                for i in 0..n {
                    beta = beta + b[i].eval(x, y)? * y[i].clone();
                }
                let f = alpha2.sqrt() + beta;
                Ok(f.clone() * f)
            }
            MetricKind::Custom { f } => {
                let v = f.eval(x, y)?;
                Ok(v.clone() * v)
            }
            MetricKind::Conformal { base, phi } => {
                let inner = base.f_squared(x, y)?;
                let factor = phi.eval_scalar(x)?.scale(2.0).exp();
                Ok(inner * factor)
            }
        }
    }

    /// Check that a tangent point lies in the admissible set of this metric:
    /// inside the chart (with margin), y above the norm floor, and F finite
    /// positive there.
    pub fn admissible(&self, tp: &TangentPoint) -> Result<()> {
        if tp.dim() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "point dimension {} does not match metric dimension {}",
                tp.dim(),
                self.dim
            )));
        }
        let r = tp.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if self.domain_radius.is_finite() && r > self.domain_radius - BOUNDARY_MARGIN {
            return Err(Error::Domain(format!(
                "|x| = {r:.6} outside chart radius {:.6}",
                self.domain_radius
            )));
        }
        let f2 = self.f_squared(tp.x(), tp.y())?;
        if !f2.is_finite() || f2 <= 0.0 {
            return Err(Error::Domain(format!(
                "F^2 = {f2:.3e} not positive at the evaluation point"
            )));
        }
        Ok(())
    }

    /// F(x, y).
    pub fn eval_f(&self, tp: &TangentPoint) -> Result<f64> {
        self.admissible(tp)?;
        Ok(self.f_squared(tp.x(), tp.y())?.sqrt())
    }

    /// Seed the combined (x, y) jet variables and evaluate F^2 at the given
    /// truncation order. The variable layout is x_0..x_{n-1}, y_0..y_{n-1}.
    pub(crate) fn f2_jet(&self, tp: &TangentPoint, order: usize) -> Result<(Arc<JetShape>, Jet)> {
        diffengine::require_order(order)?;
        self.admissible(tp)?;
        let n = self.dim;
        let sh = diffengine::shape(2 * n, order);
        let mut vars = Vec::with_capacity(2 * n);
        for (v, &xi) in tp.x().iter().enumerate() {
            vars.push(Jet::variable(sh.clone(), v, xi));
        }
        for (v, &yi) in tp.y().iter().enumerate() {
            vars.push(Jet::variable(sh.clone(), n + v, yi));
        }
        let f2 = self.f_squared(&vars[..n], &vars[n..])?;
        if !f2.value().is_finite() {
            return Err(Error::Domain("F^2 jet not finite".into()));
        }
        Ok((sh, f2))
    }

    /// Fundamental tensor g_ij = 1/2 d^2 F^2 / dy^i dy^j as a plain matrix.
    pub(crate) fn g_matrix(&self, tp: &TangentPoint) -> Result<Vec<f64>> {
        let n = self.dim;
        let (_, f2) = self.f2_jet(tp, 2)?;
        let mut g = vec![0.0; n * n];
        let mut alpha = vec![0u8; 2 * n];
        for i in 0..n {
            for j in i..n {
                alpha.iter_mut().for_each(|a| *a = 0);
                alpha[n + i] += 1;
                alpha[n + j] += 1;
                let v = 0.5 * f2.partial(&alpha);
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("fundamental tensor not finite".into()));
        }
        Ok(g)
    }

    /// Fundamental tensor with positive-definiteness check.
    pub fn fundamental_tensor(&self, tp: &TangentPoint) -> Result<Tensor> {
        let n = self.dim;
        let g = self.g_matrix(tp)?;
        // Sylvester criterion on leading principal minors.
        for k in 1..=n {
            let mut minor = vec![0.0; k * k];
            for i in 0..k {
                for j in 0..k {
                    minor[i * k + j] = g[i * n + j];
                }
            }
            let det = determinant(&minor, k);
            if det <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!(
                    "leading {k}x{k} minor is {det:.3e}"
                )));
            }
        }
        Ok(Tensor::from_fn(
            n,
            &[Variance::Lower, Variance::Lower],
            |i| g[i[0] * n + i[1]],
        ))
    }

    pub(crate) fn g_inverse_matrix(&self, tp: &TangentPoint) -> Result<Vec<f64>> {
        let g = self.g_matrix(tp)?;
        invert_matrix(&g, self.dim).ok_or(Error::SingularMetric)
    }

    /// g^{ij}, the inverse of the fundamental tensor.
    pub fn inverse_metric(&self, tp: &TangentPoint) -> Result<Tensor> {
        let n = self.dim;
        let ginv = self.g_inverse_matrix(tp)?;
        Ok(Tensor::from_fn(
            n,
            &[Variance::Upper, Variance::Upper],
            |i| ginv[i[0] * n + i[1]],
        ))
    }

    /// The unit vector l^i = y^i / F.
    pub fn unit_vector(&self, tp: &TangentPoint) -> Result<Vec<f64>> {
        let f = self.eval_f(tp)?;
        Ok(tp.y().iter().map(|v| v / f).collect())
    }
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

fn radius_sq_expr(n: usize) -> Expr {
    let mut acc = Expr::x(0) * Expr::x(0);
    for i in 1..n {
        acc = acc + Expr::x(i) * Expr::x(i);
    }
    acc
}

impl MetricSpec {
    /// Flat Euclidean space.
    pub fn euclidean(n: usize) -> Result<MetricSpec> {
        check_dim(n)?;
        Ok(MetricSpec {
            name: format!("euclidean({n})"),
            dim: n,
            kind: MetricKind::ConformallyFlat {
                coeff: 1.0,
                kappa: 0.0,
            },
            domain_radius: f64::INFINITY,
        })
    }

    /// Round sphere of constant curvature `kappa > 0` in the stereographic
    /// chart a_ij = 4 delta_ij / (1 + kappa |x|^2)^2.
    pub fn sphere(n: usize, kappa: f64) -> Result<MetricSpec> {
        check_dim(n)?;
        if kappa <= 0.0 || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sphere curvature must be positive, got {kappa}"
            )));
        }
        Ok(MetricSpec {
            name: if kappa == 1.0 {
                format!("sphere({n})")
            } else {
                format!("sphere({n},kappa={kappa})")
            },
            dim: n,
            kind: MetricKind::ConformallyFlat { coeff: 4.0, kappa },
            domain_radius: f64::INFINITY,
        })
    }

    /// Hyperbolic space of curvature -1 in the Poincaré ball chart
    /// a_ij = 4 delta_ij / (1 - |x|^2)^2.
    pub fn hyperbolic(n: usize) -> Result<MetricSpec> {
        check_dim(n)?;
        Ok(MetricSpec {
            name: format!("hyperbolic({n})"),
            dim: n,
            kind: MetricKind::ConformallyFlat {
                coeff: 4.0,
                kappa: -1.0,
            },
            domain_radius: 1.0,
        })
    }

    /// Funk metric on the unit ball in Randers form: Klein metric plus the
    /// 1-form b = x / (1 - |x|^2). Constant flag curvature -1/4.
    pub fn funk(n: usize) -> Result<MetricSpec> {
        check_dim(n)?;
        let r2 = radius_sq_expr(n);
        let u = Expr::Const(1.0) - r2; // 1 - |x|^2
        let u2 = u.clone() * u.clone();
        let mut a = vec![vec![Expr::Const(0.0); n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let num = if i == j {
                    u.clone() + Expr::x(i) * Expr::x(j)
                } else {
                    Expr::x(i) * Expr::x(j)
                };
                *entry = num / u2.clone();
            }
        }
        let b: Vec<Expr> = (0..n).map(|i| Expr::x(i) / u.clone()).collect();
        Ok(MetricSpec {
            name: format!("funk({n})"),
            dim: n,
            kind: MetricKind::Randers { a, b },
            domain_radius: 1.0,
        })
    }

    /// General Randers metric from entrywise expressions; `a` must be
    /// symmetric positive-definite and the a-norm of `b` strictly below 1
    /// on the chart (checked by sampling).
    pub fn randers(
        name: impl Into<String>,
        a: Vec<Vec<Expr>>,
        b: Vec<Expr>,
        domain_radius: f64,
    ) -> Result<MetricSpec> {
        let n = b.len();
        check_dim(n)?;
        if a.len() != n || a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter(
                "randers data: a must be n x n and b length n".into(),
            ));
        }
        for row in &a {
            for e in row {
                if e.uses_y() {
                    return Err(Error::InvalidParameter(
                        "randers coefficients must depend on x only".into(),
                    ));
                }
            }
        }
        if b.iter().any(|e| e.uses_y()) {
            return Err(Error::InvalidParameter(
                "randers 1-form must depend on x only".into(),
            ));
        }
        let spec = MetricSpec {
            name: name.into(),
            dim: n,
            kind: MetricKind::Randers { a, b },
            domain_radius,
        };
        spec.validate_randers()?;
        Ok(spec)
    }

    /// Randers metric with the Euclidean base and a constant 1-form.
    pub fn randers_const(b: Vec<f64>) -> Result<MetricSpec> {
        let n = b.len();
        check_dim(n)?;
        let mut a = vec![vec![Expr::Const(0.0); n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = Expr::Const(1.0);
        }
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let name = format!("randers(|b|={norm:.3})");
        MetricSpec::randers(
            name,
            a,
            b.into_iter().map(Expr::Const).collect(),
            f64::INFINITY,
        )
    }

    /// Custom metric from a positively 1-homogeneous norm expression
    /// F(x, y); positivity and homogeneity are checked by sampling.
    pub fn custom(
        name: impl Into<String>,
        f: Expr,
        n: usize,
        domain_radius: f64,
    ) -> Result<MetricSpec> {
        check_dim(n)?;
        let (mx, my) = f.var_span();
        if mx > n || my > n {
            return Err(Error::InvalidParameter(format!(
                "expression uses x_{mx}/y_{my} beyond dimension {n}"
            )));
        }
        let spec = MetricSpec {
            name: name.into(),
            dim: n,
            kind: MetricKind::Custom { f },
            domain_radius,
        };
        spec.validate_custom()?;
        Ok(spec)
    }

    /// Conformally changed metric e^{phi(x)} F; used by the Schwarzian
    /// module. `phi` must be expression-backed.
    pub(crate) fn conformal(base: MetricSpec, phi: ScalarField) -> Result<MetricSpec> {
        if !phi.is_expr() {
            return Err(Error::InvalidParameter(
                "conformal factor must be expression-backed".into(),
            ));
        }
        Ok(MetricSpec {
            name: format!("conformal({})", base.name),
            dim: base.dim,
            domain_radius: base.domain_radius,
            kind: MetricKind::Conformal {
                base: Box::new(base),
                phi,
            },
        })
    }

    /// Catalog lookup by name with numeric parameters; `kappa` selects the
    /// sphere curvature, `b1..bn` a constant Randers 1-form.
    pub fn from_catalog(
        name: &str,
        n: usize,
        params: &BTreeMap<String, f64>,
    ) -> Result<MetricSpec> {
        match name {
            "euclidean" | "flat" => MetricSpec::euclidean(n),
            "sphere" => MetricSpec::sphere(n, params.get("kappa").copied().unwrap_or(1.0)),
            "hyperbolic" => MetricSpec::hyperbolic(n),
            "funk" => MetricSpec::funk(n),
            "randers" => {
                let mut b = Vec::with_capacity(n);
                for i in 1..=n {
                    b.push(params.get(&format!("b{i}")).copied().ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "randers catalog metric needs b1..b{n} parameters"
                        ))
                    })?);
                }
                MetricSpec::randers_const(b)
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown catalog metric `{other}` \
                 (expected euclidean|sphere|hyperbolic|funk|randers)"
            ))),
        }
    }

    fn sample_chart_points(&self, count: usize) -> Vec<Vec<f64>> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let r = if self.domain_radius.is_finite() {
            0.8 * self.domain_radius
        } else {
            1.0
        };
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-r..r)).collect();
            if x.iter().map(|v| v * v).sum::<f64>().sqrt() < r {
                out.push(x);
            }
        }
        out
    }

    fn validate_randers(&self) -> Result<()> {
        let MetricKind::Randers { a, b } = &self.kind else {
            unreachable!();
        };
        let n = self.dim;
        for x in self.sample_chart_points(24) {
            let mut amat = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    amat[i * n + j] = a[i][j].eval(&x, &[])?;
                    let t = a[j][i].eval(&x, &[])?;
                    if (amat[i * n + j] - t).abs() > 1e-10 * (1.0 + t.abs()) {
                        return Err(Error::InvalidParameter(
                            "randers base metric is not symmetric".into(),
                        ));
                    }
                }
            }
            let ainv = invert_matrix(&amat, n).ok_or_else(|| {
                Error::InvalidParameter("randers base metric is singular on the chart".into())
            })?;
            let bv: Vec<f64> = b.iter().map(|e| e.eval(&x, &[])).collect::<Result<_>>()?;
            let mut norm2 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    norm2 += ainv[i * n + j] * bv[i] * bv[j];
                }
            }
            if norm2 >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "randers 1-form has a-norm {:.6} >= 1 at x = {:?} \
                     (strong convexity fails)",
                    norm2.sqrt(),
                    x
                )));
            }
        }
        Ok(())
    }

    fn validate_custom(&self) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for x in self.sample_chart_points(12) {
            let y: Vec<f64> = (0..self.dim)
                .map(|_| rng.gen_range(0.2..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            let f = self.f_squared(&x, &y)?.sqrt();
            if !f.is_finite() || f <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "custom F not positive at x={x:?}, y={y:?}"
                )));
            }
            for lambda in [0.5, 2.0, 10.0] {
                let ys: Vec<f64> = y.iter().map(|v| v * lambda).collect();
                let fs = self.f_squared(&x, &ys)?.sqrt();
                if (fs - lambda * f).abs() > 1e-8 * lambda * f {
                    return Err(Error::InvalidParameter(format!(
                        "custom F is not positively 1-homogeneous: \
                         F(x,{lambda}y) = {fs:.9}, {lambda}F(x,y) = {:.9}",
                        lambda * f
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "metric dimension must be at least 2, got {n}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Config file loading
// ---------------------------------------------------------------------------

/// On-disk metric description. Unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub kind: String,
    pub dimension: usize,
    #[serde(default)]
    pub params: MetricParams,
    #[serde(default)]
    pub domain_radius: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricParams {
    /// Sphere curvature.
    pub kappa: Option<f64>,
    /// Entrywise expressions for a_ij (riemannian, randers).
    pub a: Option<Vec<Vec<String>>>,
    /// Component expressions for b_i (randers).
    pub b: Option<Vec<String>>,
    /// Norm expression F(x, y) (custom).
    pub f: Option<String>,
}

impl MetricSpec {
    pub fn from_config(cfg: &MetricConfig) -> Result<MetricSpec> {
        let n = cfg.dimension;
        let radius = cfg.domain_radius.unwrap_or(f64::INFINITY);
        match cfg.kind.as_str() {
            "euclidean" | "flat" | "sphere" | "hyperbolic" | "funk" => {
                let mut params = BTreeMap::new();
                if let Some(k) = cfg.params.kappa {
                    params.insert("kappa".to_string(), k);
                }
                let mut spec = MetricSpec::from_catalog(&cfg.kind, n, &params)?;
                if let Some(r) = cfg.domain_radius {
                    spec.domain_radius = spec.domain_radius.min(r);
                }
                Ok(spec)
            }
            "riemannian" => {
                let a = parse_matrix(cfg.params.a.as_ref(), n)?;
                // Reuse the Randers validation with b = 0 to get the
                // symmetry and invertibility checks.
                let b = vec![Expr::Const(0.0); n];
                let mut spec = MetricSpec::randers("riemannian".to_string(), a, b, radius)?;
                let MetricKind::Randers { a, .. } = std::mem::replace(
                    &mut spec.kind,
                    MetricKind::Custom {
                        f: Expr::Const(0.0),
                    },
                ) else {
                    unreachable!();
                };
                spec.kind = MetricKind::Riemannian { a };
                spec.name = format!("riemannian({n})");
                Ok(spec)
            }
            "randers" => {
                let a = parse_matrix(cfg.params.a.as_ref(), n)?;
                let b_src = cfg
                    .params
                    .b
                    .as_ref()
                    .ok_or_else(|| Error::Config("randers config needs params.b".into()))?;
                if b_src.len() != n {
                    return Err(Error::Config(format!(
                        "params.b has {} entries, expected {n}",
                        b_src.len()
                    )));
                }
                let b = b_src
                    .iter()
                    .map(|s| Expr::parse(s))
                    .collect::<Result<Vec<_>>>()?;
                MetricSpec::randers(format!("randers({n})"), a, b, radius)
            }
            "custom" => {
                let src = cfg
                    .params
                    .f
                    .as_ref()
                    .ok_or_else(|| Error::Config("custom config needs params.f".into()))?;
                MetricSpec::custom(format!("custom({n})"), Expr::parse(src)?, n, radius)
            }
            other => Err(Error::Config(format!("unknown metric kind `{other}`"))),
        }
    }

    pub fn from_config_str(json: &str) -> Result<MetricSpec> {
        let cfg: MetricConfig =
            serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
        MetricSpec::from_config(&cfg)
    }

    pub fn from_config_file(path: &std::path::Path) -> Result<MetricSpec> {
        let text = std::fs::read_to_string(path)?;
        MetricSpec::from_config_str(&text)
    }
}

fn parse_matrix(src: Option<&Vec<Vec<String>>>, n: usize) -> Result<Vec<Vec<Expr>>> {
    let src = src.ok_or_else(|| Error::Config("metric config needs params.a".into()))?;
    if src.len() != n || src.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("params.a must be {n} x {n}")));
    }
    src.iter()
        .map(|row| row.iter().map(|s| Expr::parse(s)).collect())
        .collect()
}
