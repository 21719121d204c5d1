//! Built-in catalog of path-differentiable test functions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::composite::{CompositeFunction, Monomial, Polynomial, Term};
use super::polyhedral::{AffinePiece, PolyhedralFunction};
use super::{FunctionOracle, Stratum};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// `max(-2x, x + y, x - y)`: three strata meeting at the unique minimizer 0.
    Tripod,
    /// `|x|` on `R^2`; the critical set is the y-axis.
    #[serde(rename = "absvalley")]
    AbsValley,
    /// `100 |y - x^2| + |1 - x|`: a sharp curved valley with minimizer (1, 1).
    #[serde(rename = "nsbanana")]
    NsBanana,
    /// `|x|` on `R`.
    Abs1d,
    /// `||x||^2` on `R^2`.
    Bowl,
}

impl Builtin {
    pub const ALL: [Builtin; 5] =
        [Builtin::Tripod, Builtin::AbsValley, Builtin::NsBanana, Builtin::Abs1d, Builtin::Bowl];

    pub fn as_str(self) -> &'static str {
        match self {
            Builtin::Tripod => "tripod",
            Builtin::AbsValley => "absvalley",
            Builtin::NsBanana => "nsbanana",
            Builtin::Abs1d => "abs1d",
            Builtin::Bowl => "bowl",
        }
    }

    pub fn oracle(self) -> Arc<dyn FunctionOracle> {
        match self {
            Builtin::Tripod => Arc::new(tripod()),
            Builtin::AbsValley => Arc::new(absvalley()),
            Builtin::NsBanana => Arc::new(nsbanana()),
            Builtin::Abs1d => Arc::new(abs1d()),
            Builtin::Bowl => Arc::new(bowl()),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown built-in function `{s}`")))
    }
}

pub fn builtin(b: Builtin) -> Arc<dyn FunctionOracle> {
    b.oracle()
}

pub fn tripod() -> PolyhedralFunction {
    let s10 = 10f64.sqrt();
    let strata = vec![
        Stratum::point(vec![0.0, 0.0]),
        // y = -3x, x < 0: pieces 0 and 1 tie
        Stratum::ray(vec![0.0, 0.0], vec![-1.0 / s10, 3.0 / s10]),
        // y = 3x, x < 0: pieces 0 and 2 tie
        Stratum::ray(vec![0.0, 0.0], vec![-1.0 / s10, -3.0 / s10]),
        // y = 0, x > 0: pieces 1 and 2 tie
        Stratum::ray(vec![0.0, 0.0], vec![1.0, 0.0]),
    ];
    PolyhedralFunction::new(vec![
        AffinePiece::new(vec![-2.0, 0.0], 0.0),
        AffinePiece::new(vec![1.0, 1.0], 0.0),
        AffinePiece::new(vec![1.0, -1.0], 0.0),
    ])
    .expect("static pieces")
    .with_name("tripod")
    .with_strata(strata)
}

pub fn absvalley() -> PolyhedralFunction {
    PolyhedralFunction::new(vec![
        AffinePiece::new(vec![1.0, 0.0], 0.0),
        AffinePiece::new(vec![-1.0, 0.0], 0.0),
    ])
    .expect("static pieces")
    .with_name("absvalley")
    .with_strata(vec![Stratum::line(vec![0.0, 0.0], vec![0.0, 1.0])])
}

pub fn abs1d() -> PolyhedralFunction {
    PolyhedralFunction::new(vec![AffinePiece::new(vec![1.0], 0.0), AffinePiece::new(vec![-1.0], 0.0)])
        .expect("static pieces")
        .with_name("abs1d")
        .with_strata(vec![Stratum::point(vec![0.0])])
}

pub fn nsbanana() -> CompositeFunction {
    let valley =
        Polynomial::new(2, vec![Monomial::new(1.0, vec![0, 1]), Monomial::new(-1.0, vec![2, 0])])
            .expect("static polynomial");
    let axis =
        Polynomial::new(2, vec![Monomial::new(1.0, vec![0, 0]), Monomial::new(-1.0, vec![1, 0])])
            .expect("static polynomial");
    // On [-10, 10]^2: 100 * ||(-2x, 1)|| + 1 <= 100 sqrt(401) + 1
    CompositeFunction::new(
        2,
        vec![Term::Abs { weight: 100.0, inner: valley }, Term::Abs { weight: 1.0, inner: axis }],
    )
    .expect("static terms")
    .with_name("nsbanana")
    .with_strata(vec![Stratum::point(vec![1.0, 1.0])])
    .with_lipschitz_bound(100.0 * 401f64.sqrt() + 1.0)
}

pub fn bowl() -> CompositeFunction {
    let p = Polynomial::new(2, vec![Monomial::new(1.0, vec![2, 0]), Monomial::new(1.0, vec![0, 2])])
        .expect("static polynomial");
    CompositeFunction::new(2, vec![Term::Smooth(p)])
        .expect("static terms")
        .with_name("bowl")
        .with_lipschitz_bound(20.0 * 2f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::hull::SubdiffKind;

    #[test]
    fn names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.as_str().parse::<Builtin>().unwrap(), b);
            assert_eq!(b.oracle().name(), b.as_str());
        }
    }

    #[test]
    fn tripod_balance_weights_solve_linear_system() {
        // Solve l1 g1 + l2 g2 + l3 g3 = 0, l1 + l2 + l3 = 1 by Cramer's rule.
        let g = [[-2.0, 0.0], [1.0, 1.0], [1.0, -1.0]];
        let m = [[g[0][0], g[1][0], g[2][0]], [g[0][1], g[1][1], g[2][1]], [1.0, 1.0, 1.0]];
        let rhs = [0.0, 0.0, 1.0];
        let det3 = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det3(&m);
        for col in 0..3 {
            let mut mc = m;
            for row in 0..3 {
                mc[row][col] = rhs[row];
            }
            assert!((det3(&mc) / d - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn catalog_values() {
        assert_eq!(abs1d().value(&[0.0]), 0.0);
        assert_eq!(nsbanana().value(&[1.0, 1.0]), 0.0);
        let sd = bowl().subdifferential(&[1.0, 0.0], 1e-9);
        assert_eq!(sd.kind(), SubdiffKind::Singleton);
        assert_eq!(sd.vertex(0), &[2.0, 0.0]);
    }

    #[test]
    fn tripod_lipschitz_is_max_gradient_norm() {
        assert_eq!(tripod().lipschitz_bound(), Some(2.0));
    }
}
