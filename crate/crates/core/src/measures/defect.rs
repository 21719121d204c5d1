use std::fmt;

use super::EmpiricalPhaseMeasure;
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::linalg::{dot, norm, CompensatedSum};

/// `|int grad(phi) . v dmu|` for one normalised monomial test function.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionValue {
    pub exponents: Vec<u32>,
    /// `max |grad phi|` over the box before normalisation.
    pub scale: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub degree: u32,
    pub bbox: BoundingBox,
    pub tests: Vec<TestFunctionValue>,
}

impl DefectReport {
    /// Largest value over all test functions.
    pub fn defect(&self) -> f64 {
        self.tests.iter().map(|t| t.value).fold(0.0, f64::max)
    }
}

fn monomial_name(exponents: &[u32]) -> String {
    const AXES: [&str; 3] = ["x", "y", "z"];
    let mut parts = Vec::new();
    for (k, &e) in exponents.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let axis = if exponents.len() <= 3 { AXES[k].to_string() } else { format!("x{k}") };
        parts.push(if e == 1 { axis } else { format!("{axis}^{e}") });
    }
    parts.join(" ")
}

impl fmt::Display for DefectReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "closedness defect (degree <= {}): {:.6e}", self.degree, self.defect())?;
        let width = self.tests.iter().map(|t| monomial_name(&t.exponents).len()).max().unwrap_or(0);
        for t in &self.tests {
            writeln!(f, "  {:<width$}  {:.6e}", monomial_name(&t.exponents), t.value)?;
        }
        Ok(())
    }
}

/// All exponent vectors in `dim` variables with total degree in `1..=degree`,
/// ordered by degree.
pub fn monomial_exponents(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[k] = e;
            rec(k + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    for total in 1..=degree {
        let mut cur = vec![0; dim];
        rec(0, total, &mut cur, &mut out);
    }
    out
}

fn monomial_gradient(exponents: &[u32], x: &[f64], out: &mut [f64]) {
    for k in 0..x.len() {
        let ek = exponents[k];
        out[k] = if ek == 0 {
            0.0
        } else {
            let mut g = ek as f64 * x[k].powi(ek as i32 - 1);
            for (j, (&e, &xj)) in exponents.iter().zip(x).enumerate() {
                if j != k {
                    g *= xj.powi(e as i32);
                }
            }
            g
        };
    }
}

/// [`closedness_defect_on`] with the smallest box containing the samples.
pub fn closedness_defect(mu: &EmpiricalPhaseMeasure, degree: u32) -> Result<DefectReport> {
    let bbox = BoundingBox::enclosing(mu.dim(), mu.positions_flat())
        .ok_or_else(|| Error::invalid("the measure has no samples"))?;
    closedness_defect_on(mu, degree, &bbox)
}

/// Tests `mu` against every monomial `phi` of total degree `1..=degree`,
/// scaled so that `max |grad phi| = 1` on `bbox`.
///
/// A closed measure integrates every gradient field to zero, so the largest
/// `|int grad(phi) . v dmu|` measures how far `mu` is from being closed.
pub fn closedness_defect_on(
    mu: &EmpiricalPhaseMeasure,
    degree: u32,
    bbox: &BoundingBox,
) -> Result<DefectReport> {
    if degree == 0 {
        return Err(Error::invalid("test degree must be at least 1"));
    }
    if mu.is_empty() {
        return Err(Error::invalid("the measure has no samples"));
    }
    if bbox.dim() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), actual: bbox.dim() });
    }
    // |d phi / d x_k| only grows with each |x_j|, so the gradient norm peaks
    // at the corner of largest absolute coordinates.
    let corner = bbox.abs_extent();
    let mut g = vec![0.0; mu.dim()];
    let total = mu.total_weight();
    let mut tests = Vec::new();
    for exponents in monomial_exponents(mu.dim(), degree) {
        monomial_gradient(&exponents, &corner, &mut g);
        let scale = norm(&g);
        let value = if scale > 0.0 {
            let mut s = CompensatedSum::new();
            for k in 0..mu.len() {
                monomial_gradient(&exponents, mu.position(k), &mut g);
                s.add(mu.weight(k) * dot(&g, mu.velocity(k)));
            }
            (s.value() / total).abs() / scale
        } else {
            0.0
        };
        tests.push(TestFunctionValue { exponents, scale, value });
    }
    Ok(DefectReport { degree, bbox: bbox.clone(), tests })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_enumeration() {
        assert_eq!(
            monomial_exponents(2, 2),
            vec![vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        // C(3 + 3, 3) - 1 monomials of degree 1..=3 in 3 variables
        assert_eq!(monomial_exponents(3, 3).len(), 19);
    }

    #[test]
    fn single_sample_is_maximally_open() {
        let mut mu = EmpiricalPhaseMeasure::new(2);
        mu.push(&[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        let r = closedness_defect_on(&mu, 1, &BoundingBox::cube(2, 1.0)).unwrap();
        assert_eq!(r.tests[0].value, 1.0);
        assert_eq!(r.defect(), 1.0);
    }

    #[test]
    fn closed_square_has_no_defect() {
        // Exact segment integrals: int grad(phi) . dgamma = phi(end) - phi(start).
        let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let mu = EmpiricalPhaseMeasure::closed_polygon(&sq, 1).unwrap();
        let r = closedness_defect(&mu, 2).unwrap();
        assert_eq!(r.tests.len(), 5);
        assert!(r.defect() <= 1e-12, "{r}");
    }

    #[test]
    fn open_segment_matches_endpoint_difference() {
        // one edge from (0,0) to (1,0): int grad(x^2) . v dmu = (1 - 0) / length
        let mut mu = EmpiricalPhaseMeasure::new(2);
        mu.push(&[0.5, 0.0], &[1.0, 0.0], 1.0).unwrap();
        let r = closedness_defect_on(&mu, 2, &BoundingBox::cube(2, 1.0)).unwrap();
        let x2 = r.tests.iter().find(|t| t.exponents == [2, 0]).unwrap();
        assert_eq!(x2.scale, 2.0);
        assert_eq!(x2.value, 0.5);
    }

    #[test]
    fn report_lists_each_test_function() {
        let mut mu = EmpiricalPhaseMeasure::new(2);
        mu.push(&[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        let text = closedness_defect_on(&mu, 2, &BoundingBox::cube(2, 1.0)).unwrap().to_string();
        assert!(text.starts_with("closedness defect (degree <= 2): 1.000000e0"));
        assert!(text.contains("x y"));
        assert!(text.contains("y^2"));
    }
}
