//! Correlated Wigner-matrix processes with a diagonal dressing: exact
//! computation of the limiting normalized traces as weighted tree sums, the
//! generating-function identity those limits satisfy, and a reproducible
//! Monte Carlo estimator of the finite-dimensional traces for comparison.
//!
//! Everything exact lives in rationals; floating point enters only through
//! Gaussian sampling and the trace arithmetic of the estimator.

use ndarray::Array2;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::json;

use crate::bare::{bare_value, BareWeights};
use crate::error::{Error, Result};
use crate::rational::{format_rat, rat_pow, rat_to_f64, Rat};
use crate::report::VerificationReport;
use crate::series::{compose_degree_function, series_equal, SeriesSpec, TruncatedSeries};
use crate::trees::{omega_weight, plane_trees, TreeLike};

/// Stationary correlation in lag: r(0) = 1, |r(m)| ≤ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorrelationKind {
    /// r(m) = 1.
    ConstantOne,
    /// r(m) = 1/(m+1).
    InverseLinear,
    /// r(m) = ρ^m.
    Geometric(Rat),
    /// Explicit values r(0)..r(M); lags beyond the table are errors.
    Table(Vec<Rat>),
}

/// Entry-process covariance: Cov(γ(a), γ(b)) = β²·r(|a−b|).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceSpec {
    beta_sq: Rat,
    kind: CorrelationKind,
}

impl CovarianceSpec {
    pub fn new(beta_sq: Rat, kind: CorrelationKind) -> Result<Self> {
        if !beta_sq.is_positive() {
            return Err(Error::Parse(format!(
                "beta^2 must be positive, found {}",
                format_rat(&beta_sq)
            )));
        }
        match &kind {
            CorrelationKind::Geometric(rho) => {
                if rho.abs() > Rat::one() {
                    return Err(Error::Parse(format!(
                        "geometric correlation needs |rho| <= 1, found {}",
                        format_rat(rho)
                    )));
                }
            }
            CorrelationKind::Table(values) => {
                if values.first() != Some(&Rat::one()) {
                    return Err(Error::Parse(
                        "correlation table must start with r(0) = 1".into(),
                    ));
                }
                if let Some(bad) = values.iter().find(|v| v.abs() > Rat::one()) {
                    return Err(Error::Parse(format!(
                        "correlation values must lie in [-1, 1], found {}",
                        format_rat(bad)
                    )));
                }
            }
            _ => {}
        }
        Ok(CovarianceSpec { beta_sq, kind })
    }

    pub fn constant_one(beta_sq: Rat) -> Result<Self> {
        Self::new(beta_sq, CorrelationKind::ConstantOne)
    }

    pub fn inverse_linear(beta_sq: Rat) -> Result<Self> {
        Self::new(beta_sq, CorrelationKind::InverseLinear)
    }

    pub fn geometric(beta_sq: Rat, rho: Rat) -> Result<Self> {
        Self::new(beta_sq, CorrelationKind::Geometric(rho))
    }

    pub fn table(beta_sq: Rat, values: Vec<Rat>) -> Result<Self> {
        Self::new(beta_sq, CorrelationKind::Table(values))
    }

    pub fn beta_sq(&self) -> &Rat {
        &self.beta_sq
    }

    /// r(m), exact.
    pub fn r(&self, m: usize) -> Result<Rat> {
        match &self.kind {
            CorrelationKind::ConstantOne => Ok(Rat::one()),
            CorrelationKind::InverseLinear => {
                Ok(Rat::new(1.into(), (m as i64 + 1).into()))
            }
            CorrelationKind::Geometric(rho) => Ok(rat_pow(rho, m)),
            CorrelationKind::Table(values) => {
                values.get(m).cloned().ok_or(Error::CovarianceLag {
                    lag: m,
                    max: values.len() - 1,
                })
            }
        }
    }

    /// The induced size-indexed weight B^r_k = β²·r(2k−1).
    pub fn bare_weight(&self, k: usize) -> Result<Rat> {
        Ok(&self.beta_sq * self.r(2 * k - 1)?)
    }

    /// B^r_1..B^r_K as a weight family for tree functionals.
    pub fn bare_weights(&self, k_max: usize) -> Result<BareWeights> {
        let values = (1..=k_max)
            .map(|k| self.bare_weight(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(BareWeights::explicit(values))
    }

    /// The K×K covariance matrix β²·r(|a−b|), in floating point for the
    /// sampler.
    pub fn toeplitz_f64(&self, k: usize) -> Result<Array2<f64>> {
        let beta_sq = rat_to_f64(&self.beta_sq);
        let row: Vec<f64> = (0..k)
            .map(|m| self.r(m).map(|v| beta_sq * rat_to_f64(&v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Array2::from_shape_fn((k, k), |(a, b)| {
            row[a.max(b) - a.min(b)]
        }))
    }

    pub fn describe(&self) -> String {
        let kind = match &self.kind {
            CorrelationKind::ConstantOne => "constant-one".into(),
            CorrelationKind::InverseLinear => "inverse-linear".into(),
            CorrelationKind::Geometric(rho) => format!("geometric:{}", format_rat(rho)),
            CorrelationKind::Table(values) => format!(
                "table:{}",
                values.iter().map(format_rat).collect::<Vec<_>>().join(",")
            ),
        };
        format!("{kind},beta2={}", format_rat(&self.beta_sq))
    }
}

/// A finite discrete law with rational atoms, normalized to mean 1, for the
/// diagonal dressing matrix.
#[derive(Debug, Clone)]
pub struct DiagonalLaw {
    atoms: Vec<(Rat, Rat)>, // (value, probability)
    values_f64: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiagonalLaw {
    pub fn new(atoms: Vec<(Rat, Rat)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidLaw("no atoms given".into()));
        }
        if let Some((_, p)) = atoms.iter().find(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidLaw(format!(
                "negative probability {}",
                format_rat(p)
            )));
        }
        let total: Rat = atoms.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidLaw(format!(
                "probabilities sum to {}, not 1",
                format_rat(&total)
            )));
        }
        let mean: Rat = atoms.iter().map(|(v, p)| v * p).sum();
        if !mean.is_one() {
            return Err(Error::InvalidLaw(format!(
                "the law must have mean 1, found {}",
                format_rat(&mean)
            )));
        }
        let values_f64 = atoms.iter().map(|(v, _)| rat_to_f64(v)).collect();
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|(_, p)| {
                acc += rat_to_f64(p);
                acc
            })
            .collect();
        Ok(DiagonalLaw {
            atoms,
            values_f64,
            cumulative,
        })
    }

    /// The point mass at 1: a deterministic identity dressing.
    pub fn delta_one() -> Self {
        DiagonalLaw::new(vec![(Rat::one(), Rat::one())]).expect("delta_1 is a valid law")
    }

    /// μ_k = Σ p_i v_i^k (μ_0 = 1).
    pub fn moment(&self, k: usize) -> Rat {
        self.atoms
            .iter()
            .map(|(v, p)| rat_pow(v, k) * p)
            .sum()
    }

    /// The induced degree function ψ_j = μ_(j+1) for j = 0..max_k.
    pub fn psi_spec(&self, max_k: usize) -> SeriesSpec {
        let coeffs = (0..=max_k).map(|j| self.moment(j + 1)).collect();
        SeriesSpec::explicit(coeffs).expect("mean-1 law yields a unit constant term")
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.values_f64.len() == 1 {
            return self.values_f64[0];
        }
        let u: f64 = rng.gen();
        for (i, c) in self.cumulative.iter().enumerate() {
            if u < *c {
                return self.values_f64[i];
            }
        }
        *self.values_f64.last().unwrap()
    }

    pub fn describe(&self) -> String {
        if self.atoms.len() == 1 && self.atoms[0].0.is_one() {
            return "delta1".into();
        }
        format!(
            "discrete:{}",
            self.atoms
                .iter()
                .map(|(v, p)| format!("{}:{}", format_rat(v), format_rat(p)))
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// Cholesky factorization tolerant of positive *semi*-definite input: a zero
/// pivot is accepted when its whole column is dependent (as for the
/// constant-one correlation, which has rank 1). A negative pivot, or a zero
/// pivot with independent residual, names the offending leading minor.
pub fn psd_cholesky(c: &Array2<f64>) -> Result<Array2<f64>> {
    let k = c.nrows();
    assert_eq!(k, c.ncols(), "covariance matrix must be square");
    let scale = (0..k).map(|i| c[[i, i]].abs()).fold(1.0, f64::max);
    let tol = 1e-10 * scale;
    let mut l = Array2::<f64>::zeros((k, k));
    for j in 0..k {
        let mut d = c[[j, j]];
        for p in 0..j {
            d -= l[[j, p]] * l[[j, p]];
        }
        if d > tol {
            let pivot = d.sqrt();
            l[[j, j]] = pivot;
            for i in j + 1..k {
                let mut v = c[[i, j]];
                for p in 0..j {
                    v -= l[[i, p]] * l[[j, p]];
                }
                l[[i, j]] = v / pivot;
            }
        } else if d > -tol {
            // rank-deficient direction: the rest of the column must vanish
            for i in j + 1..k {
                let mut v = c[[i, j]];
                for p in 0..j {
                    v -= l[[i, p]] * l[[j, p]];
                }
                if v.abs() > tol {
                    return Err(Error::NotPositiveSemiDefinite { order: j + 1 });
                }
            }
        } else {
            return Err(Error::NotPositiveSemiDefinite { order: j + 1 });
        }
    }
    Ok(l)
}

/// Draws the K correlated symmetric matrices of one trial: every unordered
/// entry position (i ≤ j, row-major) receives a centered Gaussian K-vector
/// with covariance β²r(|a−b|), placed symmetrically. Diagonal entries are
/// sampled like off-diagonal ones.
pub fn sample_process<R: Rng>(
    n: usize,
    k: usize,
    cov: &CovarianceSpec,
    rng: &mut R,
) -> Result<Vec<Array2<f64>>> {
    let factor = psd_cholesky(&cov.toeplitz_f64(k)?)?;
    Ok(sample_process_with_factor(n, &factor, rng))
}

fn sample_process_with_factor<R: Rng>(
    n: usize,
    factor: &Array2<f64>,
    rng: &mut R,
) -> Vec<Array2<f64>> {
    let k = factor.nrows();
    let mut mats = vec![Array2::<f64>::zeros((n, n)); k];
    let mut g = vec![0.0f64; k];
    for i in 0..n {
        for j in i..n {
            for slot in g.iter_mut() {
                *slot = StandardNormal.sample(rng);
            }
            for (a, mat) in mats.iter_mut().enumerate() {
                let mut v = 0.0;
                for (b, gb) in g.iter().enumerate().take(a + 1) {
                    v += factor[[a, b]] * gb;
                }
                mat[[i, j]] = v;
                mat[[j, i]] = v;
            }
        }
    }
    mats
}

/// Sum with pairwise splitting, so aggregation error stays small and the
/// result is independent of any would-be work partitioning.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Monte Carlo estimate of a normalized word trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEstimate {
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
    pub generator: String,
}

/// Monte Carlo mean and standard error of
/// N^(−1−k/2)·tr(D Γ(1) D Γ(2) ⋯ Γ(k) D) over fresh draws of the diagonal
/// D and the matrix process. Trial t uses stream t of a counter-based
/// generator seeded with `seed`, so results are reproducible and independent
/// of scheduling.
pub fn empirical_trace(
    n: usize,
    k: usize,
    cov: &CovarianceSpec,
    law: &DiagonalLaw,
    trials: usize,
    seed: u64,
) -> Result<TraceEstimate> {
    if k == 0 {
        return Err(Error::Parse("word length k must be at least 1".into()));
    }
    if trials < 2 {
        return Err(Error::Parse(
            "at least 2 trials are needed for a standard error".into(),
        ));
    }
    let factor = psd_cholesky(&cov.toeplitz_f64(k)?)?;
    let norm = (n as f64).powf(-1.0 - k as f64 / 2.0);
    let mut values = Vec::with_capacity(trials);
    let mut d = vec![0.0f64; n];
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        for slot in d.iter_mut() {
            *slot = law.sample(&mut rng);
        }
        let mats = sample_process_with_factor(n, &factor, &mut rng);
        // tr(D Γ1 D Γ2 ⋯ Γk D) = Σ_i d_i²·[Γ1·(DΓ2)⋯(DΓk)]_ii
        let mut word = mats[0].clone();
        for mat in mats.iter().skip(1) {
            let mut scaled = mat.clone();
            for (i, mut row) in scaled.rows_mut().into_iter().enumerate() {
                row.map_inplace(|v| *v *= d[i]);
            }
            word = word.dot(&scaled);
        }
        let trace: f64 = (0..n).map(|i| d[i] * d[i] * word[[i, i]]).sum();
        values.push(norm * trace);
    }
    let mean = pairwise_sum(&values) / trials as f64;
    let centered: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = pairwise_sum(&centered) / (trials - 1) as f64;
    let stderr = (variance / trials as f64).sqrt();
    Ok(TraceEstimate {
        k,
        n,
        trials,
        mean,
        stderr,
        seed,
        generator: "chacha8".into(),
    })
}

/// The exact N→∞ trace limit at half-length k: the tree sum
/// Σ_{plane trees t, |t| = k+1} (∏_{v ≠ root} B^r_{|t_v|})·ω_μ(t), which is
/// B^r(t)/B^r_(k+1) written without the division.
pub fn limit_trace_combinatorial(
    k: usize,
    cov: &CovarianceSpec,
    law: &DiagonalLaw,
    max_n: usize,
) -> Result<Rat> {
    let weights = cov.bare_weights(k)?;
    let psi = law.psi_spec(k);
    let mut acc = Rat::zero();
    for t in plane_trees(k + 1, max_n)? {
        let mut product = Rat::one();
        for child in t.children() {
            product *= bare_value(child, &weights)?;
        }
        if !product.is_zero() {
            acc += product * omega_weight(&t, &psi);
        }
    }
    Ok(acc)
}

/// Checks Σ_{k≥1} z^k·B_(2(k−1)) = z·ψ_μ(Y) exactly to order M, where
/// Y(z) = Σ_k z^k·B^r_k·B_(2(k−1)) and every B_(2(k−1)) comes from the
/// combinatorial limit.
pub fn verify_fond_lemma(
    cov: &CovarianceSpec,
    law: &DiagonalLaw,
    order: usize,
    max_n: usize,
) -> Result<VerificationReport> {
    if order < 1 {
        return Err(Error::EmptyOrder);
    }
    let limits: Vec<Rat> = (0..order)
        .map(|j| limit_trace_combinatorial(j, cov, law, max_n))
        .collect::<Result<Vec<_>>>()?;
    let mut lhs = TruncatedSeries::zero(order);
    let mut y = TruncatedSeries::zero(order);
    for k in 1..=order {
        lhs.set_coeff(k, limits[k - 1].clone())?;
        y.set_coeff(k, cov.bare_weight(k)? * &limits[k - 1])?;
    }
    let psi = law.psi_spec(order);
    let rhs = compose_degree_function(&psi, &y)?.mul_by_z().truncated(order);
    let params = json!({
        "cov": cov.describe(),
        "law": law.describe(),
        "order": order,
    });
    Ok(VerificationReport::from_comparison(
        "sum_k z^k B_{2(k-1)} = z psi_mu(Y)",
        params,
        order,
        &series_equal(&lhs, &rhs),
        0,
    ))
}

/// Side-by-side comparison of the Monte Carlo estimate at word length k with
/// the exact limit (0 for odd k, the half-length k/2 tree sum for even k).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub params: serde_json::Value,
    pub mean: f64,
    pub stderr: f64,
    pub exact_limit: f64,
    pub z: f64,
    pub pass: bool,
}

/// Runs the estimator and compares against the exact limit. Even word
/// lengths pass when |mean − limit| ≤ 3·stderr + C/N (C absorbs the O(1/N)
/// bias); odd word lengths have limit exactly 0 and pass when
/// |mean| ≤ 4·stderr.
#[allow(clippy::too_many_arguments)]
pub fn compare_sim_limit(
    k: usize,
    cov: &CovarianceSpec,
    law: &DiagonalLaw,
    n: usize,
    trials: usize,
    seed: u64,
    slack_c: f64,
    max_n: usize,
) -> Result<ComparisonReport> {
    let estimate = empirical_trace(n, k, cov, law, trials, seed)?;
    let exact = if k.is_multiple_of(2) {
        rat_to_f64(&limit_trace_combinatorial(k / 2, cov, law, max_n)?)
    } else {
        0.0
    };
    let diff = estimate.mean - exact;
    let z = if estimate.stderr > 0.0 {
        diff / estimate.stderr
    } else {
        0.0
    };
    let pass = if k.is_multiple_of(2) {
        diff.abs() <= 3.0 * estimate.stderr + slack_c / n as f64
    } else {
        diff.abs() <= 4.0 * estimate.stderr
    };
    Ok(ComparisonReport {
        params: json!({
            "k": k,
            "N": n,
            "trials": trials,
            "seed": seed,
            "generator": estimate.generator,
            "cov": cov.describe(),
            "law": law.describe(),
            "slack_c": slack_c,
        }),
        mean: estimate.mean,
        stderr: estimate.stderr,
        exact_limit: exact,
        z,
        pass,
    })
}
