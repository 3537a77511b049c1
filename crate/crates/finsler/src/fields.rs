//! Scalar, vector, and tensor fields supplied to the geometry operators.
//!
//! Fields come in two flavors: expression-backed (differentiated exactly
//! through the jet engine) and callback-backed (differentiated by the
//! central-difference oracle). Conformal changes require expression-backed
//! factors since they must be evaluable inside the jet pipeline.

use std::fmt;
use std::sync::Arc;

use crate::diffengine::{fd_default_step, fd_partial, partial, Jet, MultiIndex};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::metrics::TangentPoint;
use crate::scalar::Scalar;
use crate::tensor::{Tensor, Variance};

/// A smooth real function of the chart point x.
#[derive(Clone)]
pub struct ScalarField {
    kind: ScalarFieldKind,
}

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum ScalarFieldKind {
    Expr(Expr),
    Callback(PointFn, Option<GradFn>),
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ScalarFieldKind::Expr(e) => write!(f, "ScalarField::Expr({e:?})"),
            ScalarFieldKind::Callback(..) => write!(f, "ScalarField::Callback(..)"),
        }
    }
}

impl ScalarField {
    pub fn from_expr(e: Expr) -> ScalarField {
        ScalarField {
            kind: ScalarFieldKind::Expr(e),
        }
    }

    pub fn parse(src: &str) -> Result<ScalarField> {
        let e = Expr::parse(src)?;
        if e.uses_y() {
            return Err(Error::InvalidParameter(
                "scalar fields are functions of x only".into(),
            ));
        }
        Ok(ScalarField::from_expr(e))
    }

    pub fn constant(c: f64) -> ScalarField {
        ScalarField::from_expr(Expr::Const(c))
    }

    pub fn callback(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> ScalarField {
        ScalarField {
            kind: ScalarFieldKind::Callback(Arc::new(f), None),
        }
    }

    /// Callback field with an analytic gradient; first-order partials use
    /// the supplied gradient, higher orders fall back to the oracle.
    pub fn callback_with_gradient(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField {
            kind: ScalarFieldKind::Callback(Arc::new(f), Some(Arc::new(grad))),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match &self.kind {
            ScalarFieldKind::Expr(e) => e.eval(x, &[]),
            ScalarFieldKind::Callback(f, _) => Ok(f(x)),
        }
    }

    /// Evaluation inside the jet pipeline; only expression-backed fields
    /// support it.
    pub fn eval_scalar<S: Scalar>(&self, x: &[S]) -> Result<S> {
        match &self.kind {
            ScalarFieldKind::Expr(e) => e.eval(x, &[]),
            ScalarFieldKind::Callback(..) => Err(Error::InvalidParameter(
                "callback-backed scalar field cannot enter the jet pipeline; \
                 supply an expression"
                    .into(),
            )),
        }
    }

    pub fn is_expr(&self) -> bool {
        matches!(self.kind, ScalarFieldKind::Expr(_))
    }

    /// Mixed partial; exact for expressions, analytic for first-order
    /// requests when a gradient was supplied, finite differences otherwise.
    pub fn partial(&self, x: &[f64], idx: &MultiIndex) -> Result<f64> {
        match &self.kind {
            ScalarFieldKind::Expr(e) => partial(
                |z: &[Jet]| e.eval(z, &[]).expect("validated expression"),
                x,
                idx,
            ),
            ScalarFieldKind::Callback(f, grad) => {
                if idx.total() == 1 {
                    if let Some(grad) = grad {
                        let var = idx.orders().iter().position(|&k| k == 1).unwrap();
                        return Ok(grad(x)[var]);
                    }
                }
                let h = fd_default_step(x, idx.total());
                Ok(fd_partial(&|z: &[f64]| f(z), x, idx, h))
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        (0..x.len())
            .map(|i| self.partial(x, &MultiIndex::single(x.len(), i, 1)))
            .collect()
    }

    /// Row-major matrix of second x-partials.
    pub fn hessian_matrix(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = x.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut orders = vec![0u8; n];
                orders[i] += 1;
                orders[j] += 1;
                let v = self.partial(x, &MultiIndex::new(orders))?;
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Ok(out)
    }
}

/// A vector field on the chart, one scalar component per coordinate.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> VectorField {
        VectorField { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }
}

type TensorFn = Arc<dyn Fn(&TangentPoint) -> Result<Tensor> + Send + Sync>;

/// A tensor field over the tangent bundle, given as an evaluation callback
/// with declared variance. Derivatives of callback fields are taken by
/// central differences.
#[derive(Clone)]
pub struct TensorField {
    variance: Vec<Variance>,
    f: TensorFn,
}

impl TensorField {
    pub fn new(
        variance: Vec<Variance>,
        f: impl Fn(&TangentPoint) -> Result<Tensor> + Send + Sync + 'static,
    ) -> TensorField {
        TensorField {
            variance,
            f: Arc::new(f),
        }
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn eval(&self, tp: &TangentPoint) -> Result<Tensor> {
        let t = (self.f)(tp)?;
        if t.variance() != self.variance.as_slice() {
            return Err(Error::InvalidParameter(
                "tensor field callback returned mismatched variance".into(),
            ));
        }
        Ok(t)
    }
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorField(variance={:?})", self.variance)
    }
}
