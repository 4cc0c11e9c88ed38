//! Truncated formal power series over exact rationals, polynomials with
//! rational coefficients, and degree functions.
//!
//! Truncation order is explicit state: binary operations truncate to the
//! smaller order, and reading a coefficient beyond the order is an error
//! rather than an implicit zero.

use std::fmt;

use num::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{factorial, format_rat, rat_to_string_pair, Rat};

/// A polynomial with exact rational coefficients, stored by ascending power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(Rat::is_zero) == Some(true) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rat::zero());
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: Rat) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Polynomial::new(vec![Rat::zero(), Rat::one()])
    }

    /// x^k.
    pub fn x_pow(k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = Rat::one();
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, n: usize) -> Rat {
        self.eval(&Rat::from_integer(n.into()))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => format_rat(c),
                1 => format!("{} z", format_rat(c)),
                _ => format!("{} z^{}", format_rat(c), i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A degree function ψ(z) = 1 + Σ_{k≥1} ψ_k z^k.
///
/// `Polynomial` and `Explicit` have finite support: coefficients beyond the
/// stored list are zero, so tree weights involving larger outdegrees vanish
/// instead of erroring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesSpec {
    /// ψ_k = 1 for all k, ψ(z) = 1/(1-z).
    Geometric,
    /// ψ_k = 1/k!, ψ(z) = exp(z).
    Exponential,
    /// Finite coefficient list ψ_0..ψ_K.
    Polynomial(Vec<Rat>),
    /// Explicit coefficient list ψ_0..ψ_K (finite support, same semantics).
    Explicit(Vec<Rat>),
}

impl SeriesSpec {
    pub fn polynomial(coeffs: Vec<Rat>) -> Result<Self> {
        Self::check_unit_constant(&coeffs)?;
        Ok(SeriesSpec::Polynomial(coeffs))
    }

    pub fn explicit(coeffs: Vec<Rat>) -> Result<Self> {
        Self::check_unit_constant(&coeffs)?;
        Ok(SeriesSpec::Explicit(coeffs))
    }

    fn check_unit_constant(coeffs: &[Rat]) -> Result<()> {
        match coeffs.first() {
            Some(c) if c.is_one() => Ok(()),
            other => Err(Error::Parse(format!(
                "degree function must have constant term 1, found {:?}",
                other.map(format_rat)
            ))),
        }
    }

    /// ψ_k.
    pub fn coeff(&self, k: usize) -> Rat {
        match self {
            SeriesSpec::Geometric => Rat::one(),
            SeriesSpec::Exponential => Rat::one() / Rat::from_integer(factorial(k)),
            SeriesSpec::Polynomial(c) | SeriesSpec::Explicit(c) => {
                c.get(k).cloned().unwrap_or_else(Rat::zero)
            }
        }
    }

    /// Whether coefficients vanish beyond a finite index.
    pub fn finite_support(&self) -> bool {
        matches!(self, SeriesSpec::Polynomial(_) | SeriesSpec::Explicit(_))
    }

    pub fn describe(&self) -> String {
        match self {
            SeriesSpec::Geometric => "geometric".into(),
            SeriesSpec::Exponential => "exponential".into(),
            SeriesSpec::Polynomial(c) => format!(
                "poly:{}",
                c.iter().map(format_rat).collect::<Vec<_>>().join(",")
            ),
            SeriesSpec::Explicit(c) => format!(
                "coeffs:{}",
                c.iter().map(format_rat).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

/// Formal power series truncated at an explicit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rat>, // length = order + 1
}

impl TruncatedSeries {
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a series carries at least order 0");
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Rat::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rat::one();
        s
    }

    /// The monomial z, truncated at `order` (requires order ≥ 1).
    pub fn z(order: usize) -> Self {
        assert!(order >= 1);
        let mut s = Self::zero(order);
        s.coeffs[1] = Rat::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Result<&Rat> {
        self.coeffs.get(n).ok_or(Error::CoefficientRange {
            index: n,
            order: self.order(),
        })
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, value: Rat) -> Result<()> {
        let order = self.order();
        match self.coeffs.get_mut(n) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::CoefficientRange { index: n, order }),
        }
    }

    pub fn truncated(&self, order: usize) -> Self {
        let end = order.min(self.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=end].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] + &other.coeffs[i])
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] - &other.coeffs[i])
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Rat::zero(); order + 1];
        for i in 0..=order.min(self.order()) {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i).min(other.order()) {
                coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
            }
        }
        TruncatedSeries { coeffs }
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// d/dz; the result is known one order lower.
    pub fn differentiate(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::EmptyOrder);
        }
        let coeffs = (1..=self.order())
            .map(|n| &self.coeffs[n] * Rat::from_integer(n.into()))
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// Multiplication by the monomial z; exact one order higher.
    pub fn mul_by_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rat::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        TruncatedSeries { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// First index with a nonzero coefficient, if any.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "order": self.order(),
            "coefficients": self
                .coeffs
                .iter()
                .map(|c| {
                    let (n, d) = rat_to_string_pair(c);
                    json!([n, d])
                })
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => format_rat(c),
                1 => format!("{} z", format_rat(c)),
                _ => format!("{} z^{}", format_rat(c), i),
            })
            .collect();
        write!(f, "{} (order {})", terms.join(" + "), self.order())
    }
}

/// Outcome of an exact comparison of two series up to their common order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesComparison {
    pub compared_order: usize,
    pub first_mismatch: Option<(usize, Rat, Rat)>,
}

impl SeriesComparison {
    pub fn is_equal(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Exact comparison up to the common truncation order, with a first-mismatch
/// report.
pub fn series_equal(a: &TruncatedSeries, b: &TruncatedSeries) -> SeriesComparison {
    let order = a.order().min(b.order());
    for n in 0..=order {
        if a.coeffs[n] != b.coeffs[n] {
            return SeriesComparison {
                compared_order: order,
                first_mismatch: Some((n, a.coeffs[n].clone(), b.coeffs[n].clone())),
            };
        }
    }
    SeriesComparison {
        compared_order: order,
        first_mismatch: None,
    }
}

/// Applies P(θ+1) diagonally: a_n ↦ P(n+1)·a_n.
pub fn apply_euler_polynomial(p: &Polynomial, s: &TruncatedSeries) -> TruncatedSeries {
    let coeffs = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| a * p.eval_int(n + 1))
        .collect();
    TruncatedSeries::from_coeffs(coeffs)
}

/// ψ(Y) to the order of Y.
///
/// Geometric ψ is composed by solving the triangular system (1-Y)·R = 1;
/// exponential and explicit specs accumulate powers of Y. A non-polynomial
/// ψ requires Y(0) = 0.
pub fn compose_degree_function(psi: &SeriesSpec, y: &TruncatedSeries) -> Result<TruncatedSeries> {
    let order = y.order();
    if !psi.finite_support() && !y.coeffs[0].is_zero() {
        return Err(Error::CompositionDomain {
            value: format_rat(&y.coeffs[0]),
        });
    }
    match psi {
        SeriesSpec::Geometric => {
            // r_0 = 1, r_n = Σ_{j=1..n} y_j r_{n-j}
            let mut r = vec![Rat::zero(); order + 1];
            r[0] = Rat::one();
            for n in 1..=order {
                let mut acc = Rat::zero();
                for j in 1..=n {
                    if !y.coeffs[j].is_zero() {
                        acc += &y.coeffs[j] * &r[n - j];
                    }
                }
                r[n] = acc;
            }
            Ok(TruncatedSeries::from_coeffs(r))
        }
        _ => {
            let top = match psi {
                SeriesSpec::Polynomial(c) | SeriesSpec::Explicit(c) => (c.len() - 1).min(order),
                _ => order,
            };
            let mut acc = TruncatedSeries::zero(order);
            acc.coeffs[0] = psi.coeff(0);
            let mut power = TruncatedSeries::one(order);
            for k in 1..=top {
                power = power.mul(y);
                let psik = psi.coeff(k);
                if !psik.is_zero() {
                    acc = acc.add(&power.scale(&psik));
                }
            }
            Ok(acc)
        }
    }
}

/// outer(inner) for truncated series; inner must have zero constant term.
pub fn compose_series(outer: &TruncatedSeries, inner: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !inner.coeffs[0].is_zero() {
        return Err(Error::CompositionDomain {
            value: format_rat(&inner.coeffs[0]),
        });
    }
    let order = outer.order().min(inner.order());
    let inner = inner.truncated(order);
    let mut acc = TruncatedSeries::zero(order);
    for k in (0..=order).rev() {
        acc = acc.mul(&inner);
        let c = acc.coeffs[0].clone() + &outer.coeffs[k];
        acc.coeffs[0] = c;
    }
    Ok(acc)
}
