//! Mixed partial derivatives of real functions of several variables.
//!
//! The automatic path evaluates the target function in truncated-polynomial
//! (Taylor-mode) arithmetic, see [`jet`]. An independent central-difference
//! oracle with one Richardson extrapolation level, [`fd_partial`], backs it
//! in tests and cross-checks; the two share no code path.

mod jet;

pub use jet::{shape, Jet, JetShape};

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Hard ceiling on derivative order supported by the engine.
pub const MAX_SUPPORTED_ORDER: usize = 5;

/// Per-variable derivative orders; the request `(2, 1)` means
/// d^3 f / dx0^2 dx1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndex {
    orders: Vec<u8>,
}

impl MultiIndex {
    pub fn new(orders: Vec<u8>) -> MultiIndex {
        MultiIndex { orders }
    }

    /// Index with a single active variable.
    pub fn single(vars: usize, var: usize, order: u8) -> MultiIndex {
        let mut orders = vec![0u8; vars];
        orders[var] = order;
        MultiIndex { orders }
    }

    pub fn orders(&self) -> &[u8] {
        &self.orders
    }

    pub fn total(&self) -> usize {
        self.orders.iter().map(|&k| k as usize).sum()
    }

    pub fn vars(&self) -> usize {
        self.orders.len()
    }
}

impl From<Vec<u8>> for MultiIndex {
    fn from(orders: Vec<u8>) -> Self {
        MultiIndex::new(orders)
    }
}

/// Maximum derivative order honored by [`partial`]. Defaults to 4;
/// the `FINSLER_MAX_ORDER` environment variable overrides it (clamped to
/// 1..=5). Read once per process.
pub fn max_order() -> usize {
    static ORDER: OnceLock<usize> = OnceLock::new();
    *ORDER.get_or_init(|| {
        std::env::var("FINSLER_MAX_ORDER")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .map(|v| v.clamp(1, MAX_SUPPORTED_ORDER))
            .unwrap_or(4)
    })
}

pub(crate) fn require_order(needed: usize) -> Result<()> {
    let max = max_order();
    if needed > max {
        return Err(Error::DepthExceeded { needed, max });
    }
    Ok(())
}

/// Mixed partial of `f` at `x` by Taylor-mode arithmetic.
///
/// `f` receives one jet per variable, seeded at the components of `x`, and
/// must evaluate the function in jet arithmetic (any composition of the
/// [`crate::scalar::Scalar`] operations qualifies).
pub fn partial<F>(f: F, x: &[f64], idx: &MultiIndex) -> Result<f64>
where
    F: Fn(&[Jet]) -> Jet,
{
    assert_eq!(x.len(), idx.vars(), "point/multi-index dimension mismatch");
    let order = idx.total();
    let max = max_order();
    if order > max {
        return Err(Error::OrderOverflow {
            requested: order,
            max,
        });
    }
    let sh = shape(x.len(), order);
    let vars: Vec<Jet> = x
        .iter()
        .enumerate()
        .map(|(v, &xi)| Jet::variable(sh.clone(), v, xi))
        .collect();
    let out = f(&vars);
    let val = out.partial(idx.orders());
    if !val.is_finite() {
        return Err(Error::Domain(format!("function not finite near {:?}", x)));
    }
    Ok(val)
}

/// Central-difference estimate of a mixed partial with one Richardson
/// extrapolation level. Test/cross-check oracle; independent of the jet
/// path by construction.
pub fn fd_partial<F>(f: &F, x: &[f64], idx: &MultiIndex, h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    assert!(h > 0.0, "fd step must be positive");
    assert_eq!(x.len(), idx.vars());
    let coarse = fd_central(f, x, idx.orders(), h);
    let fine = fd_central(f, x, idx.orders(), h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Step size heuristic for [`fd_partial`]: 1e-4 * (1 + |x|) at low orders,
/// widened for 3rd/4th order stencils to keep roundoff in check.
pub fn fd_default_step(x: &[f64], total_order: usize) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let base = match total_order {
        0..=2 => 1e-4,
        3 => 1e-3,
        _ => 5e-3,
    };
    base * (1.0 + norm)
}

fn fd_central<F>(f: &F, x: &[f64], orders: &[u8], h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    match orders.iter().position(|&k| k > 0) {
        None => f(x),
        Some(v) => {
            let mut rest = orders.to_vec();
            rest[v] -= 1;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[v] += h;
            xm[v] -= h;
            (fd_central(f, &xp, &rest, h) - fd_central(f, &xm, &rest, h)) / (2.0 * h)
        }
    }
}
