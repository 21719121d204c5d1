//! Small dense vector helpers and compensated summation.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Component-wise compensated sum of vectors.
#[derive(Debug, Clone)]
pub struct CompensatedVecSum {
    parts: Vec<CompensatedSum>,
}

impl CompensatedVecSum {
    pub fn zeros(dim: usize) -> Self {
        Self { parts: vec![CompensatedSum::new(); dim] }
    }

    /// Accumulates `alpha * x`.
    #[inline]
    pub fn add_scaled(&mut self, alpha: f64, x: &[f64]) {
        for (p, xi) in self.parts.iter_mut().zip(x) {
            p.add(alpha * xi);
        }
    }

    pub fn value(&self) -> Vec<f64> {
        self.parts.iter().map(CompensatedSum::value).collect()
    }
}
