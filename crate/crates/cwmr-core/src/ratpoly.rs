//! Exact rational scalars and univariate polynomials used while generating
//! filter banks and smoothness forms. Everything here runs once at
//! construction time; hot paths only ever see the converted f64 tables.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) type Rat = BigRational;

pub(crate) fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn rint(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub(crate) fn to_f64(v: &Rat) -> f64 {
    v.to_f64().expect("rational outside f64 range")
}

/// Dense univariate polynomial with ascending rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RPoly(pub(crate) Vec<Rat>);

impl RPoly {
    pub(crate) fn zero() -> Self {
        RPoly(vec![Rat::zero()])
    }

    pub(crate) fn constant(c: Rat) -> Self {
        RPoly(vec![c])
    }

    fn trim(mut self) -> Self {
        while self.0.len() > 1 && self.0.last().map(Rat::is_zero) == Some(true) {
            self.0.pop();
        }
        self
    }

    pub(crate) fn add(&self, other: &RPoly) -> RPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        RPoly(out).trim()
    }

    pub(crate) fn mul(&self, other: &RPoly) -> RPoly {
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RPoly(out).trim()
    }

    pub(crate) fn scale(&self, c: &Rat) -> RPoly {
        RPoly(self.0.iter().map(|a| a * c).collect()).trim()
    }

    pub(crate) fn derivative(&self) -> RPoly {
        if self.0.len() == 1 {
            return RPoly::zero();
        }
        RPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rint(i as i64))
                .collect(),
        )
        .trim()
    }

    /// Definite integral over [a, b].
    pub(crate) fn integrate(&self, a: &Rat, b: &Rat) -> Rat {
        let anti: Vec<Rat> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, c)| c / rint(i as i64 + 1))
            .collect();
        let eval = |x: &Rat| {
            let mut acc = Rat::zero();
            for c in anti.iter().rev() {
                acc = acc * x + c;
            }
            acc * x
        };
        eval(b) - eval(a)
    }
}

/// Expanded Lagrange basis polynomials for integer nodes.
pub(crate) fn lagrange_basis(nodes: &[i64]) -> Vec<RPoly> {
    nodes
        .iter()
        .map(|&xi| {
            let mut p = RPoly::constant(Rat::one());
            for &xj in nodes {
                if xj != xi {
                    // (u - xj) / (xi - xj)
                    let factor = RPoly(vec![rint(-xj), rint(1)]);
                    p = p.mul(&factor).scale(&rat(1, xi - xj));
                }
            }
            p
        })
        .collect()
}

/// Lagrange basis values at a single point, without polynomial expansion.
pub(crate) fn lagrange_values(nodes: &[i64], x: &Rat) -> Vec<Rat> {
    nodes
        .iter()
        .map(|&xi| {
            let mut w = Rat::one();
            for &xj in nodes {
                if xj != xi {
                    w *= (x - rint(xj)) / (rint(xi) - rint(xj));
                }
            }
            w
        })
        .collect()
}

/// Render a rational as an exact `p/q` string (or `p` when integral).
pub(crate) fn fraction_string(v: &Rat) -> alloc::string::String {
    use alloc::format;
    if v.denom().abs() == BigInt::one() {
        format!("{}", v.numer())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
