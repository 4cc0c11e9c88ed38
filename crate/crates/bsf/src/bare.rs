//! Size-indexed weight families on rooted trees, the multiplicative tree
//! functional they induce, and the generating functions of weighted tree
//! sums — computed two independent ways (a coefficient recursion and a
//! literal sum over trees) together with the differential equations that
//! characterize the distinguished weight families.

use num::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{format_rat, rat_pow, Rat};
use crate::report::{Mismatch, VerificationReport};
use crate::series::{
    apply_euler_polynomial, compose_degree_function, series_equal, Polynomial, SeriesSpec,
    TruncatedSeries,
};
use crate::trees::{
    alpha_count, elementary_differential, enumerate_rooted_shapes, omega_weight, plane_trees,
    tree_factorial, TreeLike,
};

/// Weights B_1..B_K attached to subtree sizes, with 1-based access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BareWeights {
    values: Vec<Rat>,
    description: String,
}

impl BareWeights {
    pub fn explicit(values: Vec<Rat>) -> Self {
        let description = format!(
            "explicit:{}",
            values.iter().map(format_rat).collect::<Vec<_>>().join(",")
        );
        BareWeights { values, description }
    }

    /// B_k = 1 for every k.
    pub fn ones(k_max: usize) -> Self {
        BareWeights {
            values: vec![Rat::one(); k_max],
            description: "ones".into(),
        }
    }

    /// B_k = L(k)/k for a polynomial L.
    pub fn master(l: &Polynomial, k_max: usize) -> Self {
        let values = (1..=k_max)
            .map(|k| l.eval_int(k) / Rat::from_integer(k.into()))
            .collect();
        BareWeights {
            values,
            description: format!("master:{l}"),
        }
    }

    /// B_k = 1/k^(l+1).
    pub fn inverse_factorial_power(l: u32, k_max: usize) -> Self {
        let values = (1..=k_max)
            .map(|k| Rat::one() / rat_pow(&Rat::from_integer(k.into()), (l + 1) as usize))
            .collect();
        BareWeights {
            values,
            description: format!("inverse-power:{l}"),
        }
    }

    /// B_k = ρ^k.
    pub fn geometric(rho: &Rat, k_max: usize) -> Self {
        let values = (1..=k_max).map(|k| rat_pow(rho, k)).collect();
        BareWeights {
            values,
            description: format!("geometric:{}", format_rat(rho)),
        }
    }

    pub fn weight(&self, k: usize) -> Result<&Rat> {
        if k == 0 || k > self.values.len() {
            return Err(Error::WeightRange {
                k,
                max: self.values.len(),
            });
        }
        Ok(&self.values[k - 1])
    }

    pub fn max_index(&self) -> usize {
        self.values.len()
    }

    pub fn describe(&self) -> &str {
        &self.description
    }

    /// Adds 1 to B_k — a deliberate defect for negative controls.
    pub fn perturb(&mut self, k: usize) -> Result<()> {
        if k == 0 || k > self.values.len() {
            return Err(Error::WeightRange {
                k,
                max: self.values.len(),
            });
        }
        self.values[k - 1] += Rat::one();
        self.description = format!("{}+perturb(B_{})", self.description, k);
        Ok(())
    }
}

/// The tree functional B(t): the product over all nodes v of B_{|t_v|},
/// where |t_v| is the size of the subtree rooted at v.
pub fn bare_value<T: TreeLike>(t: &T, weights: &BareWeights) -> Result<Rat> {
    let mut acc = weights.weight(t.size())?.clone();
    for c in t.children() {
        acc *= bare_value(c, weights)?;
    }
    Ok(acc)
}

/// Coefficients a_n of the weighted tree sum Y(z) = Σ_n a_n z^n with
/// a_n = Σ_{plane trees t, |t|=n} B(t)·ω_ψ(t), computed by the recursion
/// a_n = B_n · [z^(n-1)] ψ(Y) — no tree is ever enumerated.
pub fn generating_coefficients(
    weights: &BareWeights,
    psi: &SeriesSpec,
    order: usize,
) -> Result<TruncatedSeries> {
    if order > weights.max_index() {
        return Err(Error::WeightRange {
            k: order,
            max: weights.max_index(),
        });
    }
    let mut y = TruncatedSeries::zero(order);
    for n in 1..=order {
        let prefix = y.truncated(n - 1);
        let psi_y = compose_degree_function(psi, &prefix)?;
        let coeff = weights.weight(n)? * psi_y.coeff(n - 1)?;
        y.set_coeff(n, coeff)?;
    }
    Ok(y)
}

/// The same coefficient a_n as a literal sum over all plane trees with n
/// nodes. Exponential-time in n; this is the oracle the recursion is
/// checked against.
pub fn generating_coefficient_bruteforce(
    weights: &BareWeights,
    psi: &SeriesSpec,
    n: usize,
    max_n: usize,
) -> Result<Rat> {
    let mut acc = Rat::zero();
    for t in plane_trees(n, max_n)? {
        let b = bare_value(&t, weights)?;
        if !b.is_zero() {
            acc += b * omega_weight(&t, psi);
        }
    }
    Ok(acc)
}

/// The same coefficient a third way, summed over unordered shapes:
/// a_n = (1/n!) Σ_{shapes s, |s|=n} α(s)·s!·B(s)·δ_ψ(s).
pub fn bseries_coefficient_rooted(
    weights: &BareWeights,
    psi: &SeriesSpec,
    n: usize,
    max_n: usize,
) -> Result<Rat> {
    let mut acc = Rat::zero();
    for s in enumerate_rooted_shapes(n, max_n)? {
        let alpha = Rat::from_integer(alpha_count(&s)?);
        let tf = Rat::from_integer(tree_factorial(&s));
        let b = bare_value(&s, weights)?;
        acc += alpha * tf * b * elementary_differential(&s, psi);
    }
    Ok(acc / Rat::from_integer(crate::rational::factorial(n)))
}

/// Builds Y from the brute-force tree sums (independently of the coefficient
/// recursion) so ODE verification does not assume what it is checking.
fn bruteforce_series(
    weights: &BareWeights,
    psi: &SeriesSpec,
    order: usize,
) -> Result<TruncatedSeries> {
    let mut y = TruncatedSeries::zero(order);
    for n in 1..=order {
        y.set_coeff(n, generating_coefficient_bruteforce(weights, psi, n, order)?)?;
    }
    Ok(y)
}

/// Checks Y' = L(1+θ)·ψ(Y) coefficientwise up to `order`, where Y is the
/// tree sum for the weights B_k = L(k)/k. A mismatch at residual index j
/// witnesses the defining relation of a_{j+1}, so it is reported as n = j+1.
pub fn verify_master_ode(
    l: &Polynomial,
    psi: &SeriesSpec,
    order: usize,
) -> Result<VerificationReport> {
    let weights = BareWeights::master(l, order);
    verify_master_ode_with_weights(l, &weights, psi, order)
}

/// As `verify_master_ode`, but against a caller-supplied weight family —
/// the hook used to demonstrate that a perturbed weight is caught.
pub fn verify_master_ode_with_weights(
    l: &Polynomial,
    weights: &BareWeights,
    psi: &SeriesSpec,
    order: usize,
) -> Result<VerificationReport> {
    if order < 1 {
        return Err(Error::EmptyOrder);
    }
    let y = bruteforce_series(weights, psi, order)?;
    let lhs = y.differentiate()?;
    let rhs = apply_euler_polynomial(l, &compose_degree_function(psi, &y)?).truncated(order - 1);
    let params = json!({
        "L": l.to_string(),
        "psi": psi.describe(),
        "weights": weights.describe(),
        "order": order,
    });
    Ok(VerificationReport::from_comparison(
        "Y' = L(1+theta) psi(Y)",
        params,
        order,
        &series_equal(&lhs, &rhs),
        1,
    ))
}

/// Checks (1+θ)^l·Y' = ψ(Y) up to `order` for the weights B_k = 1/k^(l+1),
/// with Y again built from brute-force tree sums.
pub fn verify_inverse_factorial_ode(
    l: u32,
    psi: &SeriesSpec,
    order: usize,
) -> Result<VerificationReport> {
    if order < 1 {
        return Err(Error::EmptyOrder);
    }
    let weights = BareWeights::inverse_factorial_power(l, order);
    let y = bruteforce_series(&weights, psi, order)?;
    let lhs = apply_euler_polynomial(&Polynomial::x_pow(l as usize), &y.differentiate()?);
    let rhs = compose_degree_function(psi, &y)?.truncated(order - 1);
    let params = json!({
        "l": l,
        "psi": psi.describe(),
        "weights": weights.describe(),
        "order": order,
    });
    Ok(VerificationReport::from_comparison(
        "(1+theta)^l Y' = psi(Y)",
        params,
        order,
        &series_equal(&lhs, &rhs),
        1,
    ))
}

/// Convenience: the master-rule consistency check n·a_n = L(n)·[z^(n-1)]ψ(Y)
/// for the recursion's own output, used as a cheap internal cross-check.
pub fn master_rule_residual(
    l: &Polynomial,
    psi: &SeriesSpec,
    order: usize,
) -> Result<Option<Mismatch>> {
    let weights = BareWeights::master(l, order);
    let y = generating_coefficients(&weights, psi, order)?;
    let psi_y = compose_degree_function(psi, &y)?;
    for n in 1..=order {
        let lhs = Rat::from_integer(n.into()) * y.coeff(n)?;
        let rhs = l.eval_int(n) * psi_y.coeff(n - 1)?;
        if lhs != rhs {
            return Ok(Some(Mismatch::new(n, &lhs, &rhs)));
        }
    }
    Ok(None)
}
