//! Symbolic composition of filling-function upper bounds.
//!
//! A bound is a non-decreasing symbolic function of the loop length L:
//! either a polynomial with non-negative rational coefficients or the
//! exponential class. Given per-piece bounds F_j, wall-separation
//! constant lambda and quasi-isometry constants C, K, the composed upper
//! bound for the glued manifold is
//!
//! ```text
//!   G(L) = lambda * L * F(lambda*C*L^2 + lambda*K*L + L),   F = sum F_j.
//! ```
//!
//! The result certifies a recursive isoperimetric bound, hence a solvable
//! word problem; it is an upper-bound certificate, not a Dehn function.
//! The constants are geometric normalizations with default 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::manifest::bigint_from_json;

/// Canonical symbolic bound: coefficients ascending by degree, trailing
/// zeros trimmed, all coefficients non-negative. `Exponential` is the
/// absorbing class with symbolic degree infinity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoundExpr {
    Poly(Vec<BigRational>),
    Exponential,
}

fn trim(mut coeffs: Vec<BigRational>) -> Vec<BigRational> {
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    coeffs
}

impl BoundExpr {
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Result<BoundExpr> {
        if coeffs.iter().any(|c| c.is_negative()) {
            return Err(Error::input("bound coefficients must be non-negative"));
        }
        Ok(BoundExpr::Poly(trim(coeffs)))
    }

    pub fn zero() -> BoundExpr {
        BoundExpr::Poly(Vec::new())
    }

    pub fn linear() -> BoundExpr {
        BoundExpr::Poly(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn quadratic() -> BoundExpr {
        BoundExpr::Poly(vec![
            BigRational::zero(),
            BigRational::zero(),
            BigRational::one(),
        ])
    }

    pub fn exponential() -> BoundExpr {
        BoundExpr::Exponential
    }

    /// Degree of the head term; None encodes the infinite degree of the
    /// exponential class.
    pub fn degree(&self) -> Option<usize> {
        match self {
            BoundExpr::Exponential => None,
            BoundExpr::Poly(c) => Some(c.len().saturating_sub(1)),
        }
    }

    pub fn add(&self, other: &BoundExpr) -> BoundExpr {
        match (self, other) {
            (BoundExpr::Exponential, _) | (_, BoundExpr::Exponential) => BoundExpr::Exponential,
            (BoundExpr::Poly(a), BoundExpr::Poly(b)) => {
                let mut out = vec![BigRational::zero(); a.len().max(b.len())];
                for (i, c) in a.iter().enumerate() {
                    out[i] += c;
                }
                for (i, c) in b.iter().enumerate() {
                    out[i] += c;
                }
                BoundExpr::Poly(trim(out))
            }
        }
    }

    pub fn mul(&self, other: &BoundExpr) -> BoundExpr {
        match (self, other) {
            (BoundExpr::Exponential, _) | (_, BoundExpr::Exponential) => BoundExpr::Exponential,
            (BoundExpr::Poly(a), BoundExpr::Poly(b)) => {
                if a.is_empty() || b.is_empty() {
                    return BoundExpr::zero();
                }
                let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
                BoundExpr::Poly(trim(out))
            }
        }
    }

    /// Substitute `inner` for the variable.
    pub fn compose(&self, inner: &BoundExpr) -> BoundExpr {
        match self {
            BoundExpr::Exponential => BoundExpr::Exponential,
            BoundExpr::Poly(coeffs) => {
                let mut acc = BoundExpr::zero();
                for c in coeffs.iter().rev() {
                    acc = acc.mul(inner).add(&BoundExpr::Poly(trim(vec![c.clone()])));
                }
                acc
            }
        }
    }

    /// Evaluate at a non-negative rational point (exponential class maps
    /// x to 2^ceil(x) for comparison purposes in tests).
    pub fn eval(&self, x: &BigRational) -> BigRational {
        match self {
            BoundExpr::Exponential => {
                let exp = x.ceil().to_integer().max(BigInt::zero());
                let (_, digits) = exp.to_u64_digits();
                let e = digits.first().copied().unwrap_or(0).min(1 << 20) as u32;
                BigRational::from_integer(BigInt::from(2u8).pow(e))
            }
            BoundExpr::Poly(coeffs) => {
                let mut acc = BigRational::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            BoundExpr::Exponential => {
                let mut obj = serde_json::Map::new();
                obj.insert("kind".into(), Value::String("exp".into()));
                Value::Object(obj)
            }
            BoundExpr::Poly(coeffs) => {
                let mut obj = serde_json::Map::new();
                obj.insert("kind".into(), Value::String("poly".into()));
                obj.insert(
                    "coeffs".into(),
                    Value::Array(
                        coeffs
                            .iter()
                            .map(|c| {
                                if c.denom().is_one() {
                                    crate::manifest::bigint_to_json(c.numer())
                                } else {
                                    Value::String(format!("{}/{}", c.numer(), c.denom()))
                                }
                            })
                            .collect(),
                    ),
                );
                Value::Object(obj)
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<BoundExpr> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::input("bound must be an object or class name"))?;
        for key in obj.keys() {
            if key != "kind" && key != "coeffs" {
                return Err(Error::input(format!("unknown key {:?} in bound", key)));
            }
        }
        match obj.get("kind").and_then(|k| k.as_str()) {
            Some("exp") => Ok(BoundExpr::Exponential),
            Some("poly") => {
                let coeffs = obj
                    .get("coeffs")
                    .and_then(|c| c.as_array())
                    .ok_or_else(|| Error::input("poly bound needs a coeffs array"))?;
                let parsed =
                    coeffs
                        .iter()
                        .map(|c| match c {
                            Value::String(s) if s.contains('/') => {
                                let (num, den) = s.split_once('/').unwrap();
                                let num: BigInt = num.trim().parse().map_err(|_| {
                                    Error::input(format!("bad coefficient {:?}", s))
                                })?;
                                let den: BigInt = den.trim().parse().map_err(|_| {
                                    Error::input(format!("bad coefficient {:?}", s))
                                })?;
                                if den.is_zero() {
                                    return Err(Error::input("zero denominator"));
                                }
                                Ok(BigRational::new(num, den))
                            }
                            other => bigint_from_json(other)
                                .map(BigRational::from_integer)
                                .map_err(Error::Input),
                        })
                        .collect::<Result<Vec<_>>>()?;
                BoundExpr::from_coeffs(parsed)
            }
            _ => Err(Error::input("bound kind must be \"poly\" or \"exp\"")),
        }
    }

    /// Accepts the named classes used in manifests and reports.
    pub fn from_name(name: &str) -> Result<BoundExpr> {
        match name {
            "linear" => Ok(BoundExpr::linear()),
            "quadratic" => Ok(BoundExpr::quadratic()),
            "exponential" => Ok(BoundExpr::Exponential),
            other => Err(Error::input(format!("unknown bound class {:?}", other))),
        }
    }
}

impl serde::Serialize for BoundExpr {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Compose per-piece filling bounds across the decomposition:
/// lambda * L * F(lambda*C*L^2 + lambda*K*L + L) with F the sum of the
/// piece bounds. For a polynomial F of degree d the result has degree
/// exactly 2d + 1.
pub fn compose_dehn_bound(
    piece_bounds: &[BoundExpr],
    lambda: &BigInt,
    c: &BigInt,
    k: &BigInt,
) -> Result<BoundExpr> {
    if piece_bounds.is_empty() {
        return Err(Error::input("at least one piece bound is required"));
    }
    if !lambda.is_positive() || !c.is_positive() || k.is_negative() {
        return Err(Error::input(
            "constants must satisfy lambda >= 1, C >= 1, K >= 0",
        ));
    }
    let f = piece_bounds
        .iter()
        .fold(BoundExpr::zero(), |acc, b| acc.add(b));
    let inner = BoundExpr::Poly(trim(vec![
        BigRational::zero(),
        BigRational::from_integer(lambda * k + 1),
        BigRational::from_integer(lambda * c),
    ]));
    let lambda_l = BoundExpr::Poly(vec![
        BigRational::zero(),
        BigRational::from_integer(lambda.clone()),
    ]);
    Ok(lambda_l.mul(&f.compose(&inner)))
}
