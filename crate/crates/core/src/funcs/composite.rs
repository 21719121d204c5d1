use super::{FunctionOracle, Stratum, SubdiffDescription};
use crate::error::{Error, Result};

/// `coef * prod_k x_k^exponents[k]`
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coef: f64, exponents: Vec<u32>) -> Self {
        Self { coef, exponents }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(x)
            .fold(self.coef, |acc, (&e, &xi)| acc * xi.powi(e as i32))
    }

    fn add_gradient(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        for k in 0..x.len() {
            let ek = self.exponents[k];
            if ek == 0 {
                continue;
            }
            let mut g = self.coef * ek as f64 * x[k].powi(ek as i32 - 1);
            for (j, (&e, &xj)) in self.exponents.iter().zip(x).enumerate() {
                if j != k {
                    g *= xj.powi(e as i32);
                }
            }
            out[k] += scale * g;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: t.exponents.len() });
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for t in &self.terms {
            t.add_gradient(x, 1.0, &mut g);
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Smooth(Polynomial),
    /// `weight * |inner(x)|` with `weight > 0`.
    Abs { weight: f64, inner: Polynomial },
}

/// Sum of polynomial terms and weighted absolute values of polynomials.
///
/// Each term is Clarke regular, so the subdifferential of the sum is the
/// Minkowski sum of the term subdifferentials: every abs term whose inner
/// polynomial vanishes (within tolerance) contributes the segment
/// `weight * [-grad, grad]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeFunction {
    dim: usize,
    terms: Vec<Term>,
    name: String,
    strata: Vec<Stratum>,
    lipschitz: Option<f64>,
}

impl CompositeFunction {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        for t in &terms {
            let (d, ok) = match t {
                Term::Smooth(p) => (p.dim(), true),
                Term::Abs { weight, inner } => (inner.dim(), weight.is_finite() && *weight > 0.0),
            };
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: d });
            }
            if !ok {
                return Err(Error::invalid("abs term weights must be positive"));
            }
        }
        Ok(Self { dim, terms, name: "composite".into(), strata: Vec::new(), lipschitz: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_strata(mut self, strata: Vec<Stratum>) -> Self {
        self.strata = strata;
        self
    }

    /// Declares a Lipschitz constant valid on the default guard box.
    pub fn with_lipschitz_bound(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
}

impl FunctionOracle for CompositeFunction {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Smooth(p) => p.eval(x),
                Term::Abs { weight, inner } => weight * inner.eval(x).abs(),
            })
            .sum()
    }

    fn subdifferential(&self, x: &[f64], tol_active: f64) -> SubdiffDescription {
        let fx = self.value(x);
        let slack = tol_active * (1.0 + fx.abs());
        let mut base = vec![0.0; self.dim];
        let mut kinks: Vec<Vec<f64>> = Vec::new();
        for t in &self.terms {
            match t {
                Term::Smooth(p) => {
                    for (b, g) in base.iter_mut().zip(p.gradient(x)) {
                        *b += g;
                    }
                }
                Term::Abs { weight, inner } => {
                    let v = inner.eval(x);
                    let g: Vec<f64> = inner.gradient(x).into_iter().map(|gi| weight * gi).collect();
                    if v.abs() <= slack {
                        if g.iter().any(|&gi| gi != 0.0) {
                            kinks.push(g);
                        }
                    } else {
                        let s = v.signum();
                        for (b, gi) in base.iter_mut().zip(g) {
                            *b += s * gi;
                        }
                    }
                }
            }
        }
        // Vertices of the zonotope base + sum_k [-g_k, g_k], sign pattern 0 = all +.
        let m = kinks.len();
        let mut flat = Vec::with_capacity(self.dim << m);
        for pattern in 0..(1usize << m) {
            let mut v = base.clone();
            for (k, g) in kinks.iter().enumerate() {
                let s = if pattern >> k & 1 == 0 { 1.0 } else { -1.0 };
                for (vi, gi) in v.iter_mut().zip(g) {
                    *vi += s * gi;
                }
            }
            flat.extend_from_slice(&v);
        }
        SubdiffDescription::from_flat(self.dim, flat)
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz
    }

    fn strata(&self) -> &[Stratum] {
        &self.strata
    }
}
