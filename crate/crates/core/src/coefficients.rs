//! Exact α/β coefficient tables of the order-n heat laws.
//!
//! The law of order `n` reads
//!
//! ```text
//! q + Σ_{i=1..n} α_n^i ∂_t^i q = -κ_n ∇u_n - Σ_{i=1..2n} β_n^i ∇∂_t^i u_n
//! ```
//!
//! and both coefficient families are generated by recurrences in `n` that
//! start from `α_1^1 = ε_1`, `β_1^1 = ε_1 κ_1 + κ_0`, `β_1^2 = ε_1 ω_1 κ_0`.
//! Everything here is exact; public accessors use 1-based indices.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

const PARAMS: &str = "ParameterSequence invariant";

/// Model constants `ε_1..ε_n`, `ω_1..ω_n`, `κ_0..κ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ParameterSequence {
    #[serde(with = "rational::serde_vec")]
    epsilon: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    omega: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    kappa: Vec<Rational>,
}

#[derive(Deserialize)]
struct RawParams {
    #[serde(with = "rational::serde_vec")]
    epsilon: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    omega: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    kappa: Vec<Rational>,
}

impl TryFrom<RawParams> for ParameterSequence {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ParameterSequence::new(raw.epsilon, raw.omega, raw.kappa)
    }
}

impl ParameterSequence {
    pub fn new(epsilon: Vec<Rational>, omega: Vec<Rational>, kappa: Vec<Rational>) -> Result<Self> {
        let n = epsilon.len();
        if n == 0 {
            return Err(Error::invariant(PARAMS, "order n >= 1 required (epsilon is empty)"));
        }
        if omega.len() != n || kappa.len() != n + 1 {
            return Err(Error::invariant(
                PARAMS,
                format!(
                    "|epsilon| = |omega| = n, |kappa| = n+1 (got {}, {}, {})",
                    n,
                    omega.len(),
                    kappa.len()
                ),
            ));
        }
        validate_epsilon(&epsilon)?;
        for (i, w) in omega.iter().enumerate() {
            if w.is_negative() || *w >= Rational::one() {
                return Err(Error::invariant(
                    PARAMS,
                    format!("omega_i in [0,1) (omega_{} = {})", i + 1, rational::format(w)),
                ));
            }
        }
        for (i, k) in kappa.iter().enumerate() {
            if i < n && !k.is_positive() {
                return Err(Error::invariant(
                    PARAMS,
                    format!("kappa_i > 0 for i < n (kappa_{i} = {})", rational::format(k)),
                ));
            }
            if k.is_negative() {
                return Err(Error::invariant(
                    PARAMS,
                    format!("kappa_n >= 0 (kappa_{i} = {})", rational::format(k)),
                ));
            }
        }
        Ok(ParameterSequence {
            epsilon,
            omega,
            kappa,
        })
    }

    pub fn order(&self) -> usize {
        self.epsilon.len()
    }

    pub fn epsilon(&self) -> &[Rational] {
        &self.epsilon
    }

    pub fn omega(&self) -> &[Rational] {
        &self.omega
    }

    pub fn kappa(&self) -> &[Rational] {
        &self.kappa
    }

    /// `κ_n = 0`: the sequence stops here.
    pub fn is_terminal(&self) -> bool {
        self.kappa[self.order()].is_zero()
    }

    /// Appends `(ε_{n+1}, ω_{n+1}, κ_{n+1})`.
    pub fn extend(&self, epsilon: Rational, omega: Rational, kappa: Rational) -> Result<Self> {
        if self.is_terminal() {
            return Err(Error::invariant(
                PARAMS,
                format!(
                    "terminal sequence (kappa_{} = 0) admits no extension",
                    self.order()
                ),
            ));
        }
        let mut next = self.clone();
        next.epsilon.push(epsilon);
        next.omega.push(omega);
        next.kappa.push(kappa);
        ParameterSequence::new(next.epsilon, next.omega, next.kappa)
    }

    /// The sequence truncated to order `m` (`1 <= m <= n`).
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.order() {
            return Err(Error::IndexOutOfRange {
                index: m,
                max: self.order(),
            });
        }
        ParameterSequence::new(
            self.epsilon[..m].to_vec(),
            self.omega[..m].to_vec(),
            self.kappa[..=m].to_vec(),
        )
    }
}

fn validate_epsilon(epsilon: &[Rational]) -> Result<()> {
    for (i, e) in epsilon.iter().enumerate() {
        if e.is_negative() {
            return Err(Error::invariant(
                PARAMS,
                format!("epsilon_i >= 0 (epsilon_{} = {})", i + 1, rational::format(e)),
            ));
        }
    }
    Ok(())
}

/// `α_n^1..α_n^n` by the three-branch recurrence in `n`.
pub fn build_alpha(epsilon: &[Rational]) -> Result<Vec<Rational>> {
    if epsilon.is_empty() {
        return Err(Error::invariant(PARAMS, "order n >= 1 required (epsilon is empty)"));
    }
    validate_epsilon(epsilon)?;
    let mut alpha = vec![epsilon[0].clone()];
    for eps in &epsilon[1..] {
        let prev = alpha;
        let n = prev.len() + 1;
        let mut next = Vec::with_capacity(n);
        next.push(eps + &prev[0]);
        for i in 2..n {
            next.push(eps * &prev[i - 2] + &prev[i - 1]);
        }
        next.push(eps * &prev[n - 2]);
        alpha = next;
    }
    Ok(alpha)
}

/// `α_n^i` as the sum over distinct index tuples `ε_{k1}···ε_{ki}`, divided by
/// `i!`.
///
/// Orderings of the same index set contribute identical products, so the
/// division by `i!` is carried out by enumerating increasing tuples only.
pub fn alpha_explicit(epsilon: &[Rational], i: usize) -> Result<Rational> {
    let n = epsilon.len();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let mut total = Rational::zero();
    let mut idx: Vec<usize> = (0..i).collect();
    loop {
        total += idx
            .iter()
            .fold(Rational::one(), |acc, &k| acc * &epsilon[k]);
        // advance to the next increasing tuple
        let mut pos = i;
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            if idx[pos] < n - i + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..i {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `β_n^1..β_n^{2n}` by the four-branch recurrence in `n`.
pub fn build_beta(params: &ParameterSequence) -> Vec<Rational> {
    let eps = params.epsilon();
    let om = params.omega();
    let ka = params.kappa();
    let mut beta = vec![&eps[0] * &ka[1] + &ka[0], &eps[0] * &om[0] * &ka[0]];
    for n in 2..=params.order() {
        let e = &eps[n - 1];
        let prev = beta;
        let mut next = Vec::with_capacity(2 * n);
        next.push(e * &ka[n] + &ka[n - 1]);
        next.push(e * &om[n - 1] * &ka[n - 1] + &prev[0]);
        for i in 3..2 * n {
            next.push(e * &prev[i - 3] + &prev[i - 2]);
        }
        next.push(e * &prev[2 * n - 3]);
        beta = next;
    }
    beta
}

/// Exact α/β tables of one order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub order: usize,
    #[serde(with = "rational::serde_vec")]
    pub alpha: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    pub beta: Vec<Rational>,
}

impl CoefficientTable {
    pub fn build(params: &ParameterSequence) -> Self {
        CoefficientTable {
            order: params.order(),
            alpha: build_alpha(params.epsilon()).expect("validated epsilon"),
            beta: build_beta(params),
        }
    }

    /// `α_n^i`, 1-based.
    pub fn alpha(&self, i: usize) -> Result<&Rational> {
        one_based(&self.alpha, i)
    }

    /// `β_n^i`, 1-based.
    pub fn beta(&self, i: usize) -> Result<&Rational> {
        one_based(&self.beta, i)
    }

    /// Zero in `α` propagates to every higher index.
    pub fn alpha_zeros_propagate(&self) -> bool {
        match self.alpha.iter().position(Zero::is_zero) {
            Some(first) => self.alpha[first..].iter().all(Zero::is_zero),
            None => true,
        }
    }
}

fn one_based(v: &[Rational], i: usize) -> Result<&Rational> {
    if i == 0 || i > v.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: v.len(),
        });
    }
    Ok(&v[i - 1])
}

/// Evaluates `α_n^{n-k} = 0 ⇒ β_n^{2n} = … = β_n^{2n-k} = 0` on exact tables.
pub fn beta_vanishing_check(params: &ParameterSequence, k: usize) -> Result<bool> {
    let n = params.order();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, max: n - 1 });
    }
    let table = CoefficientTable::build(params);
    if !table.alpha(n - k)?.is_zero() {
        return Ok(true);
    }
    Ok((2 * n - k..=2 * n).all(|i| table.beta[i - 1].is_zero()))
}
