//! Moments of the triangular operator via iterated integrals over plane
//! trees: exact rational polynomials on [0,1] built from the indicator
//! kernels I_[0,u] and I_[u,1], the closed form n^n/(n+1)! they sum to, and
//! the compositional inversion tying the moment generating function to
//! z·e^(−z).

use num::{BigInt, One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{factorial, rat_to_f64, Rat};
use crate::report::{Mismatch, VerificationReport};
use crate::series::{
    compose_degree_function, compose_series, series_equal, SeriesSpec, TruncatedSeries,
};
use crate::trees::{plane_trees, PlaneTree, TreeLike};

/// A polynomial in u over [0,1] with exact rational coefficients, closed
/// under the definite-integral operations the iterated integrals need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitIntervalPolynomial {
    coeffs: Vec<Rat>, // ascending powers of u
}

impl UnitIntervalPolynomial {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(Rat::is_zero) == Some(true) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rat::zero());
        }
        UnitIntervalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        UnitIntervalPolynomial {
            coeffs: vec![Rat::zero()],
        }
    }

    pub fn one() -> Self {
        UnitIntervalPolynomial {
            coeffs: vec![Rat::one()],
        }
    }

    /// The monomial u.
    pub fn u() -> Self {
        UnitIntervalPolynomial {
            coeffs: vec![Rat::zero(), Rat::one()],
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = vec![Rat::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        UnitIntervalPolynomial::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UnitIntervalPolynomial::new(coeffs)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    /// The antiderivative vanishing at 0.
    fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rat::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rat::from_integer((k as i64 + 1).into()));
        }
        UnitIntervalPolynomial::new(coeffs)
    }

    /// ∫_0^u p(v) dv as a polynomial in u.
    pub fn integral_zero_to_u(&self) -> Self {
        self.antiderivative()
    }

    /// ∫_u^1 p(v) dv as a polynomial in u.
    pub fn integral_u_to_one(&self) -> Self {
        let f = self.antiderivative();
        let at_one = f.eval(&Rat::one());
        let mut coeffs: Vec<Rat> = f.coeffs.iter().map(|c| -c).collect();
        coeffs[0] += at_one;
        UnitIntervalPolynomial::new(coeffs)
    }

    /// ∫_0^1 p(v) dv, exact.
    pub fn integral_unit(&self) -> Rat {
        self.antiderivative().eval(&Rat::one())
    }

    /// p(1−u), expanded.
    pub fn substitute_one_minus_u(&self) -> Self {
        let flip = UnitIntervalPolynomial::new(vec![Rat::one(), -Rat::one()]);
        let mut acc = UnitIntervalPolynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&flip);
            acc.coeffs[0] += c;
            acc = UnitIntervalPolynomial::new(acc.coeffs);
        }
        acc
    }
}

impl std::fmt::Display for UnitIntervalPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => crate::rational::format_rat(c),
                1 => format!("{} u", crate::rational::format_rat(c)),
                _ => format!("{} u^{}", crate::rational::format_rat(c), i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Which kernel starts the alternation: X integrates children over [0,u],
/// Y over [u,1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    X,
    Y,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::X => Parity::Y,
            Parity::Y => Parity::X,
        }
    }
}

/// The iterated integral of a plane tree: a leaf is the constant 1, and a
/// node with children t_1..t_m under the x-kernel is ∏_i ∫_0^u (child under
/// the y-kernel), parity alternating per level. The degree never exceeds
/// |t| − 1.
pub fn phi_iterated(t: &PlaneTree, parity: Parity) -> UnitIntervalPolynomial {
    let mut acc = UnitIntervalPolynomial::one();
    for child in t.children() {
        let inner = phi_iterated(child, parity.flip());
        let integrated = match parity {
            Parity::X => inner.integral_zero_to_u(),
            Parity::Y => inner.integral_u_to_one(),
        };
        acc = acc.mul(&integrated);
    }
    debug_assert!(
        acc.is_zero() || acc.degree() < t.size(),
        "degree bound violated for {}",
        t.encode()
    );
    acc
}

/// The n-th moment of the triangular operator:
/// Σ over plane trees with n+1 nodes of ∫_0^1 φ^x(t). The same sum with
/// the y-kernel start must agree; a discrepancy is an internal error.
pub fn dh_moment(n: usize, max_n: usize) -> Result<Rat> {
    if n == 0 {
        return Err(Error::SizeRange { n: 0, max: max_n });
    }
    let mut from_x = Rat::zero();
    let mut from_y = Rat::zero();
    for t in plane_trees(n + 1, max_n)? {
        from_x += phi_iterated(&t, Parity::X).integral_unit();
        from_y += phi_iterated(&t, Parity::Y).integral_unit();
    }
    if from_x != from_y {
        return Err(Error::Internal(format!(
            "x-start and y-start moment sums disagree at n = {n}"
        )));
    }
    Ok(from_x)
}

/// n^n/(n+1)!.
fn closed_form_moment(n: usize) -> Rat {
    Rat::new(BigInt::from(n).pow(n as u32), factorial(n + 1))
}

/// Checks dh_moment(n) = n^n/(n+1)! exactly for 1 ≤ n ≤ n_max.
pub fn verify_dk8_closed_form(n_max: usize, max_n: usize) -> Result<VerificationReport> {
    let params = json!({ "n_max": n_max });
    let statement = "tau((TT*)^n) = n^n/(n+1)!";
    for n in 1..=n_max {
        let lhs = dh_moment(n, max_n)?;
        let rhs = closed_form_moment(n);
        if lhs != rhs {
            return Ok(VerificationReport::fail(
                statement,
                params,
                n_max,
                Mismatch::new(n, &lhs, &rhs),
            ));
        }
    }
    Ok(VerificationReport::exact(statement, params, n_max))
}

/// Checks the compositional inversion: with Y₀(s) = Σ_(n≥1) sⁿ·m_(n−1)
/// (m the moments, m_0 = 1), L(s) = s/(1−Y₀(s)) satisfies G(L(s)) = s for
/// G(z) = z·e^(−z), and L agrees with Σ n^(n−1) sⁿ/n!.
pub fn verify_dk8_inversion(order: usize, max_n: usize) -> Result<VerificationReport> {
    if order < 2 {
        return Err(Error::EmptyOrder);
    }
    let params = json!({ "order": order });
    let statement = "G(s/(1-Y0(s))) = s with G(z) = z e^{-z}";
    let mut y0 = TruncatedSeries::zero(order);
    y0.set_coeff(1, Rat::one())?; // m_0 = tau(1) = 1
    for n in 2..=order {
        y0.set_coeff(n, dh_moment(n - 1, max_n)?)?;
    }
    let l = compose_degree_function(&SeriesSpec::Geometric, &y0)?
        .mul_by_z()
        .truncated(order);
    // G(z) = z·e^{-z}: coefficient n is (−1)^(n−1)/(n−1)!
    let mut g = TruncatedSeries::zero(order);
    for n in 1..=order {
        let sign = if n % 2 == 1 { 1 } else { -1 };
        g.set_coeff(n, Rat::new(sign.into(), factorial(n - 1)))?;
    }
    let composed = compose_series(&g, &l)?;
    let identity = TruncatedSeries::z(order);
    let cmp = series_equal(&composed, &identity);
    if !cmp.is_equal() {
        return Ok(VerificationReport::from_comparison(
            statement, params, order, &cmp, 0,
        ));
    }
    // the inverse is the tree function: [s^n] L = n^(n−1)/n!
    for n in 1..=order {
        let expect = Rat::new(BigInt::from(n).pow(n as u32 - 1), factorial(n));
        if l.coeff(n)? != &expect {
            return Ok(VerificationReport::fail(
                statement,
                params,
                order,
                Mismatch::new(n, l.coeff(n)?, &expect),
            ));
        }
    }
    Ok(VerificationReport::exact(statement, params, order))
}
