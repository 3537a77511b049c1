//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A [`Jet`] holds the Taylor coefficients of a smooth function about an
//! evaluation point, in `m` variables up to total degree `p`. Arithmetic on
//! jets is plain truncated-polynomial algebra, so evaluating a composite
//! formula on seeded variable jets yields every mixed partial of the result
//! up to order `p` in one pass, exact to roundoff.
//!
//! Each jet carries a `valid` order: the degree up to which its coefficients
//! are meaningful. Extracting a derivative drops `valid` by one, binary
//! operations take the minimum, and multiplications skip work above the
//! valid degree. This lets intermediate quantities of different accuracy
//! share a single coefficient layout.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::Scalar;

/// Coefficient layout for jets in `m` variables up to total degree `p`,
/// with precomputed multiplication and differentiation tables.
pub struct JetShape {
    m: usize,
    p: usize,
    /// All multi-indices with |alpha| <= p, graded by total degree.
    indices: Vec<Vec<u8>>,
    pos: HashMap<Vec<u8>, usize>,
    /// `deg_start[d]` = first slot of total degree `d`; last entry = len.
    deg_start: Vec<usize>,
    /// (a, b, out) triples with deg(a) + deg(b) = deg(out), grouped by
    /// deg(out); `prod_deg_start[d]` bounds the group of output degree `d`.
    prods: Vec<(u32, u32, u32)>,
    prod_deg_start: Vec<usize>,
    /// Per variable: `dtab[v][dst] = (src, factor)` realizing d/dz_v.
    dtab: Vec<Vec<(u32, f64)>>,
}

impl JetShape {
    fn build(m: usize, p: usize) -> JetShape {
        let mut indices: Vec<Vec<u8>> = Vec::new();
        let mut deg_start = Vec::with_capacity(p + 2);
        for d in 0..=p {
            deg_start.push(indices.len());
            let mut idx = vec![0u8; m];
            gen_compositions(d as u8, 0, &mut idx, &mut indices);
        }
        deg_start.push(indices.len());

        let pos: HashMap<Vec<u8>, usize> = indices.iter().cloned().zip(0..indices.len()).collect();

        let mut prods = Vec::new();
        let mut prod_deg_start = Vec::with_capacity(p + 2);
        for d in 0..=p {
            prod_deg_start.push(prods.len());
            for da in 0..=d {
                let db = d - da;
                for a in deg_start[da]..deg_start[da + 1] {
                    for b in deg_start[db]..deg_start[db + 1] {
                        let sum: Vec<u8> = indices[a]
                            .iter()
                            .zip(&indices[b])
                            .map(|(x, y)| x + y)
                            .collect();
                        prods.push((a as u32, b as u32, pos[&sum] as u32));
                    }
                }
            }
        }
        prod_deg_start.push(prods.len());

        let dst_count = deg_start[p];
        let mut dtab = Vec::with_capacity(m);
        for v in 0..m {
            let mut table = Vec::with_capacity(dst_count);
            for dst_idx in indices.iter().take(dst_count) {
                let mut src_idx = dst_idx.clone();
                src_idx[v] += 1;
                let src = pos[&src_idx];
                table.push((src as u32, (dst_idx[v] + 1) as f64));
            }
            dtab.push(table);
        }

        JetShape {
            m,
            p,
            indices,
            pos,
            deg_start,
            prods,
            prod_deg_start,
            dtab,
        }
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.p
    }

    fn len(&self) -> usize {
        self.indices.len()
    }
}

/// Enumerate all multi-indices of the remaining degree `d` into slots
/// `from..`, appending completed ones to `out`.
fn gen_compositions(d: u8, from: usize, idx: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let m = idx.len();
    if from == m - 1 {
        idx[from] = d;
        out.push(idx.clone());
        idx[from] = 0;
        return;
    }
    for k in (0..=d).rev() {
        idx[from] = k;
        gen_compositions(d - k, from + 1, idx, out);
    }
    idx[from] = 0;
}

type ShapeCache = Mutex<HashMap<(usize, usize), Arc<JetShape>>>;

/// Shared shape cache: pipelines for the same (variables, order) pair reuse
/// one table set.
pub fn shape(m: usize, p: usize) -> Arc<JetShape> {
    static CACHE: OnceLock<ShapeCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet shape cache poisoned");
    guard
        .entry((m, p))
        .or_insert_with(|| Arc::new(JetShape::build(m, p)))
        .clone()
}

/// Truncated Taylor polynomial; see the module docs.
#[derive(Clone)]
pub struct Jet {
    shape: Arc<JetShape>,
    valid: usize,
    /// Taylor coefficients c_alpha = (d^alpha f) / alpha!.
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(shape: Arc<JetShape>, v: f64) -> Jet {
        let mut c = vec![0.0; shape.len()];
        c[0] = v;
        let valid = shape.p;
        Jet { shape, valid, c }
    }

    /// Seed the `var`-th coordinate: value `v`, unit first derivative.
    pub fn variable(shape: Arc<JetShape>, var: usize, v: f64) -> Jet {
        assert!(var < shape.m, "variable index out of range");
        let mut c = vec![0.0; shape.len()];
        c[0] = v;
        if shape.p >= 1 {
            let mut e = vec![0u8; shape.m];
            e[var] = 1;
            c[shape.pos[&e]] = 1.0;
        }
        let valid = shape.p;
        Jet { shape, valid, c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn valid_order(&self) -> usize {
        self.valid
    }

    pub fn shape(&self) -> &Arc<JetShape> {
        &self.shape
    }

    /// Taylor coefficient at a multi-index (d^alpha f / alpha!).
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        let total: usize = alpha.iter().map(|&k| k as usize).sum();
        assert!(
            total <= self.valid,
            "coefficient of degree {total} requested from a jet valid to degree {}",
            self.valid
        );
        self.c[self.shape.pos[alpha]]
    }

    /// Mixed partial derivative at a multi-index (coefficient times alpha!).
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let mut fact = 1.0;
        for &k in alpha {
            for i in 2..=(k as u64) {
                fact *= i as f64;
            }
        }
        self.coeff(alpha) * fact
    }

    /// Value of the first partial with respect to variable `v` (the
    /// degree-1 coefficient block sits at slots 1..=m in variable order).
    pub fn d1(&self, v: usize) -> f64 {
        debug_assert!(self.valid >= 1, "first derivative of an order-0-valid jet");
        debug_assert!(self.shape.indices[1 + v][v] == 1);
        self.c[1 + v]
    }

    /// Jet of the partial derivative with respect to variable `v`.
    /// The result is valid to one order less.
    pub fn diff(&self, v: usize) -> Jet {
        assert!(self.valid >= 1, "cannot differentiate an order-0-valid jet");
        let sh = &self.shape;
        let mut c = vec![0.0; sh.len()];
        let cap = sh.deg_start[self.valid];
        for (dst, &(src, factor)) in sh.dtab[v].iter().enumerate().take(cap) {
            c[dst] = self.c[src as usize] * factor;
        }
        Jet {
            shape: self.shape.clone(),
            valid: self.valid - 1,
            c,
        }
    }

    pub fn scale(&self, k: f64) -> Jet {
        let mut out = self.clone();
        for v in &mut out.c {
            *v *= k;
        }
        out
    }

    pub fn add_const(&self, k: f64) -> Jet {
        let mut out = self.clone();
        out.c[0] += k;
        out
    }

    fn mul_impl(&self, rhs: &Jet) -> Jet {
        assert!(
            Arc::ptr_eq(&self.shape, &rhs.shape)
                || (self.shape.m == rhs.shape.m && self.shape.p == rhs.shape.p),
            "jet shape mismatch"
        );
        let sh = &self.shape;
        let valid = self.valid.min(rhs.valid);
        let mut c = vec![0.0; sh.len()];
        let hi = sh.prod_deg_start[valid + 1];
        for &(a, b, out) in &sh.prods[..hi] {
            c[out as usize] += self.c[a as usize] * rhs.c[b as usize];
        }
        Jet {
            shape: self.shape.clone(),
            valid,
            c,
        }
    }

    /// Composition with a univariate analytic map: `taylor[k]` must be the
    /// k-th Taylor coefficient of the map about this jet's value part.
    fn compose(&self, taylor: &[f64]) -> Jet {
        let k_max = self.valid;
        let mut tilde = self.clone();
        tilde.c[0] = 0.0;
        let mut r = Jet::constant(self.shape.clone(), taylor[k_max]);
        r.valid = k_max;
        for k in (0..k_max).rev() {
            r = r.mul_impl(&tilde).add_const(taylor[k]);
        }
        r
    }

    fn recip(&self) -> Jet {
        let x0 = self.c[0];
        if x0 == 0.0 {
            return Jet::constant(self.shape.clone(), f64::NAN);
        }
        let mut taylor = Vec::with_capacity(self.valid + 1);
        let mut t = 1.0 / x0;
        for _ in 0..=self.valid {
            taylor.push(t);
            t *= -1.0 / x0;
        }
        self.compose(&taylor)
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet(value={}, m={}, order={}, valid={})",
            self.c[0], self.shape.m, self.shape.p, self.valid
        )
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self;
        for (a, b) in out.c.iter_mut().zip(&rhs.c) {
            *a += b;
        }
        out.valid = out.valid.min(rhs.valid);
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut out = self;
        for (a, b) in out.c.iter_mut().zip(&rhs.c) {
            *a -= b;
        }
        out.valid = out.valid.min(rhs.valid);
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_impl(&rhs)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self.mul_impl(&rhs.recip())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        self.c[0]
    }

    fn lift(&self, c: f64) -> Self {
        Jet::constant(self.shape.clone(), c)
    }

    fn scale(&self, k: f64) -> Self {
        Jet::scale(self, k)
    }

    fn sqrt(&self) -> Self {
        let x0 = self.c[0];
        let mut taylor = Vec::with_capacity(self.valid + 1);
        // k-th Taylor coefficient of sqrt about x0: prod(1/2 - i) x0^{1/2-k} / k!
        let mut falling = 1.0;
        let mut fact = 1.0;
        for k in 0..=self.valid {
            if k > 0 {
                falling *= 0.5 - (k - 1) as f64;
                fact *= k as f64;
            }
            taylor.push(falling * x0.powf(0.5 - k as f64) / fact);
        }
        self.compose(&taylor)
    }

    fn exp(&self) -> Self {
        let e0 = self.c[0].exp();
        let mut taylor = Vec::with_capacity(self.valid + 1);
        let mut fact = 1.0;
        for k in 0..=self.valid {
            if k > 0 {
                fact *= k as f64;
            }
            taylor.push(e0 / fact);
        }
        self.compose(&taylor)
    }

    fn ln(&self) -> Self {
        let x0 = self.c[0];
        let mut taylor = Vec::with_capacity(self.valid + 1);
        taylor.push(x0.ln());
        let mut sign = 1.0;
        for k in 1..=self.valid {
            taylor.push(sign / (k as f64 * x0.powi(k as i32)));
            sign = -sign;
        }
        self.compose(&taylor)
    }

    fn sin(&self) -> Self {
        let (s0, c0) = self.c[0].sin_cos();
        let cycle = [s0, c0, -s0, -c0];
        let mut taylor = Vec::with_capacity(self.valid + 1);
        let mut fact = 1.0;
        for k in 0..=self.valid {
            if k > 0 {
                fact *= k as f64;
            }
            taylor.push(cycle[k % 4] / fact);
        }
        self.compose(&taylor)
    }

    fn cos(&self) -> Self {
        let (s0, c0) = self.c[0].sin_cos();
        let cycle = [c0, -s0, -c0, s0];
        let mut taylor = Vec::with_capacity(self.valid + 1);
        let mut fact = 1.0;
        for k in 0..=self.valid {
            if k > 0 {
                fact *= k as f64;
            }
            taylor.push(cycle[k % 4] / fact);
        }
        self.compose(&taylor)
    }

    fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Jet::constant(self.shape.clone(), 1.0);
        }
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul_impl(self);
        }
        acc
    }

    fn powf(&self, e: f64) -> Self {
        if e == e.trunc() && e.abs() <= 64.0 {
            return self.powi(e as i32);
        }
        let x0 = self.c[0];
        let mut taylor = Vec::with_capacity(self.valid + 1);
        let mut falling = 1.0;
        let mut fact = 1.0;
        for k in 0..=self.valid {
            if k > 0 {
                falling *= e - (k - 1) as f64;
                fact *= k as f64;
            }
            taylor.push(falling * x0.powf(e - k as f64) / fact);
        }
        self.compose(&taylor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars2(p: usize, x: f64, y: f64) -> (Jet, Jet) {
        let sh = shape(2, p);
        (Jet::variable(sh.clone(), 0, x), Jet::variable(sh, 1, y))
    }

    #[test]
    fn polynomial_coefficients_are_exact() {
        // f = x^2 y + 3 y at (2, 5): d^2/dx^2 d/dy f = 2
        let (x, y) = vars2(3, 2.0, 5.0);
        let f = x.clone() * x.clone() * y.clone() + y.scale(3.0);
        assert_eq!(f.value(), 35.0);
        assert_eq!(f.partial(&[2, 1]), 2.0);
        assert_eq!(f.partial(&[1, 0]), 20.0); // 2xy
        assert_eq!(f.partial(&[0, 1]), 7.0); // x^2 + 3
        assert_eq!(f.partial(&[2, 0]), 10.0); // 2y
    }

    #[test]
    fn division_and_sqrt_match_closed_forms() {
        let (x, y) = vars2(4, 1.5, 0.7);
        // f = sqrt(x^2 + y^2): df/dx = x / r
        let f = (x.clone() * x.clone() + y.clone() * y.clone()).sqrt();
        let r = (1.5f64 * 1.5 + 0.7 * 0.7).sqrt();
        assert!((f.value() - r).abs() < 1e-14);
        assert!((f.partial(&[1, 0]) - 1.5 / r).abs() < 1e-13);

        // g = x / y: d^2 g / dy^2 = 2x / y^3
        let g = x / y;
        assert!((g.partial(&[0, 2]) - 2.0 * 1.5 / 0.7f64.powi(3)).abs() < 1e-10);
    }

    #[test]
    fn transcendental_partials() {
        let (x, y) = vars2(4, 0.3, -0.2);
        // f = exp(x) sin(y): d^3/dx^2 dy f = exp(x) cos(y)
        let f = x.exp() * y.sin();
        let expect = 0.3f64.exp() * (-0.2f64).cos();
        assert!((f.partial(&[2, 1]) - expect).abs() < 1e-12);
        // ln: d/dx ln(x) = 1/x at 0.3
        let l = x.ln();
        assert!((l.partial(&[1, 0]) - 1.0 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn valid_order_tracks_derivatives_and_products() {
        let (x, y) = vars2(4, 1.0, 2.0);
        let f = x.clone() * x.clone() * y.clone();
        assert_eq!(f.valid_order(), 4);
        let fx = f.diff(0);
        assert_eq!(fx.valid_order(), 3);
        let mixed = fx * y;
        assert_eq!(mixed.valid_order(), 3);
        // d/dx(x^2 y) * y = 2xy^2; its (1,1)-partial is 4y = 8
        assert!((mixed.partial(&[1, 1]) - 8.0).abs() < 1e-13);
    }

    #[test]
    fn division_by_zero_poisons_with_nan() {
        let (x, _) = vars2(2, 0.0, 1.0);
        let bad = x.recip();
        assert!(bad.value().is_nan());
    }
}
