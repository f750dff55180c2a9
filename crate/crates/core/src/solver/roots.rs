use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Signed;
use serde::Serialize;

use super::modal::{eigenvalues, local_symbol, memory_terms};
use super::Sig17;
use crate::error::{Error, Result};
use crate::law::EvolutionEquation;
use crate::rational::Rational;

/// Root residual bound (relative backward error).
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &mut Vec<f64>, b: &[f64]) {
    if a.len() < b.len() {
        a.resize(b.len(), 0.0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// Coefficients (ascending) of the modal characteristic function with the
/// exponential factors `Π (1 + ε_i s)` cleared:
/// `p(s) Π_i (1+ε_i s) + λ w Σ_i c_i s^r Π_{j≠i} (1+ε_j s)`.
pub fn characteristic_polynomial(eq: &EvolutionEquation, lambda: f64) -> Result<Vec<f64>> {
    let p = local_symbol(eq, lambda);
    let Some((w, r, aux)) = memory_terms(eq)? else {
        return Ok(p);
    };
    let factors: Vec<[f64; 2]> = aux.iter().map(|t| [1.0, t.rate]).collect();
    let mut out = factors.iter().fold(p, |acc, f| poly_mul(&acc, f));
    for (i, t) in aux.iter().enumerate() {
        let mut term = vec![0.0; r + 1];
        term[r] = lambda * w * t.weight;
        for (j, f) in factors.iter().enumerate() {
            if j != i {
                term = poly_mul(&term, f);
            }
        }
        poly_add(&mut out, &term);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Set when trailing (leading-order) coefficients were exactly zero.
    pub degree_reduced: bool,
    pub max_residual: f64,
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// `|P(z)| / Σ |c_j| |z|^j`
pub fn backward_error(c: &[f64], z: Complex64) -> f64 {
    let (p, _) = horner(c, z);
    let scale: f64 = c.iter().rev().fold(0.0, |acc, a| acc * z.norm() + a.abs());
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// Roots of `Σ c_j s^j` from the eigenvalues of a balanced companion matrix,
/// each refined by one Newton step when that lowers the residual.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<RootSet> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::invariant("characteristic polynomial", "finite coefficients"));
    }
    let mut c = coeffs.to_vec();
    let mut degree_reduced = false;
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
        degree_reduced = true;
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(RootSet {
            roots: Vec::new(),
            degree_reduced,
            max_residual: 0.0,
        });
    }
    // zero roots are split off exactly
    let zeros = c.iter().take_while(|v| **v == 0.0).count();
    let reduced = &c[zeros..];
    let m = reduced.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if m > 0 {
        // s = σ t with σ = (|c_0|/|c_m|)^{1/m} equalizes the outer coefficients
        let sigma = (reduced[0].abs() / reduced[m].abs()).powf(1.0 / m as f64);
        let monic: Vec<f64> = (0..m)
            .map(|j| reduced[j] / reduced[m] * sigma.powi(j as i32 - m as i32))
            .collect();
        let mut comp = DMatrix::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        for j in 0..m {
            comp[(j, m - 1)] = -monic[j];
        }
        for z in comp.complex_eigenvalues().iter() {
            let z0 = z * sigma;
            let (p, dp) = horner(&c, z0);
            let z1 = if dp.norm() > 0.0 { z0 - p / dp } else { z0 };
            let better = z1.re.is_finite()
                && z1.im.is_finite()
                && backward_error(&c, z1) < backward_error(&c, z0);
            roots.push(if better { z1 } else { z0 });
        }
    }
    let max_residual = roots.iter().map(|z| backward_error(&c, *z)).fold(0.0, f64::max);
    Ok(RootSet {
        roots,
        degree_reduced,
        max_residual,
    })
}

pub fn characteristic_roots(eq: &EvolutionEquation, lambda: f64) -> Result<RootSet> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invariant("ModalProblem invariant", format!("lambda > 0 (got {lambda})")));
    }
    polynomial_roots(&characteristic_polynomial(eq, lambda)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexOut {
    pub re: Sig17,
    pub im: Sig17,
}

/// One entry of the roots JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct ModeRoots {
    pub lambda: Sig17,
    pub roots: Vec<ComplexOut>,
}

impl ModeRoots {
    pub fn new(lambda: f64, set: &RootSet) -> Self {
        let mut roots = set.roots.clone();
        roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        ModeRoots {
            lambda: Sig17(lambda),
            roots: roots
                .iter()
                .map(|z| ComplexOut {
                    re: Sig17(z.re),
                    im: Sig17(z.im),
                })
                .collect(),
        }
    }
}

/// Root sets of modes `1..=modes` on `(0, L)`.
pub fn modal_roots(eq: &EvolutionEquation, length: f64, modes: usize) -> Result<Vec<(f64, RootSet)>> {
    eigenvalues(length, modes)
        .into_iter()
        .map(|l| characteristic_roots(eq, l).map(|r| (l, r)))
        .collect()
}

/// Largest real part among the roots of modes `1..=modes`.
pub fn spectral_abscissa(eq: &EvolutionEquation, length: f64, modes: usize) -> Result<f64> {
    Ok(modal_roots(eq, length, modes)?
        .iter()
        .flat_map(|(_, r)| r.roots.iter().map(|z| z.re))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Routh–Hurwitz test on ascending coefficients: `Some(true)` when every root
/// lies in the open left half-plane, `Some(false)` when one does not, and
/// `None` when a zero pivot makes the plain Routh array inconclusive.
pub fn routh_hurwitz(coeffs: &[f64]) -> Option<bool> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let lead = *c.last()?;
    let desc: Vec<f64> = c.iter().rev().map(|v| v / lead).collect();
    let n = desc.len() - 1;
    if n == 0 {
        return Some(true);
    }
    if desc.iter().any(|v| *v <= 0.0) {
        return Some(false);
    }
    let mut prev: Vec<f64> = desc.iter().step_by(2).copied().collect();
    let mut cur: Vec<f64> = desc.iter().skip(1).step_by(2).copied().collect();
    for _ in 0..n - 1 {
        let pivot = *cur.first()?;
        if pivot == 0.0 {
            return None;
        }
        if pivot < 0.0 {
            return Some(false);
        }
        let next: Vec<f64> = (0..prev.len().saturating_sub(1))
            .map(|i| {
                let b = cur.get(i + 1).copied().unwrap_or(0.0);
                (pivot * prev[i + 1] - prev[0] * b) / pivot
            })
            .collect();
        prev = cur;
        cur = next;
    }
    match cur.first() {
        Some(v) if *v > 0.0 => Some(true),
        Some(v) if *v < 0.0 => Some(false),
        _ => None,
    }
}

/// Exact Hurwitz condition for `s³ + a s² + bλ s + cλ` with `λ > 0`:
/// all coefficients positive and `a·b > c`.
pub fn mgt_hurwitz(a: &Rational, b: &Rational, c: &Rational) -> bool {
    a.is_positive() && b.is_positive() && c.is_positive() && a * b > *c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::{attach_memory, to_evolution, HeatLaw, Kernel, MemoryOptions};
    use crate::rational::{int, ratio};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn heat_root() {
        let eq = to_evolution(&HeatLaw::fourier(int(2)).unwrap());
        let r = characteristic_roots(&eq, 3.0).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert_relative_eq!(r.roots[0].re, -6.0, max_relative = 1e-14);
        assert_eq!(r.roots[0].im, 0.0);
    }

    #[test]
    fn mgt_examples_agree_with_routh_hurwitz() {
        let stable = EvolutionEquation::mgt(int(1), int(1), ratio(1, 2)).unwrap();
        let c = characteristic_polynomial(&stable, 1.0).unwrap();
        assert_eq!(c, vec![0.5, 1.0, 1.0, 1.0]);
        let r = polynomial_roots(&c).unwrap();
        assert!(r.max_residual <= RESIDUAL_TOLERANCE);
        assert!(r.roots.iter().all(|z| z.re < 0.0));
        assert_eq!(routh_hurwitz(&c), Some(true));

        let unstable = EvolutionEquation::mgt(int(1), int(1), int(2)).unwrap();
        let c = characteristic_polynomial(&unstable, 1.0).unwrap();
        let r = polynomial_roots(&c).unwrap();
        assert!(r.roots.iter().any(|z| z.re > 0.0));
        assert_eq!(routh_hurwitz(&c), Some(false));
        assert!(!mgt_hurwitz(&int(1), &int(1), &int(2)));
        assert!(mgt_hurwitz(&int(1), &int(1), &ratio(1, 2)));
    }

    #[test]
    fn spectral_abscissa_examples() {
        let eq = to_evolution(&HeatLaw::fourier(ratio(1, 3)).unwrap());
        assert_relative_eq!(
            spectral_abscissa(&eq, 2.0, 10).unwrap(),
            -PI * PI / 12.0,
            max_relative = 1e-12
        );
        let sub = EvolutionEquation::mgt(int(1), int(1), ratio(1, 2)).unwrap();
        assert!(spectral_abscissa(&sub, 1.0, 64).unwrap() < 0.0);
        let sup = EvolutionEquation::mgt(int(1), int(1), int(2)).unwrap();
        assert!(spectral_abscissa(&sup, 1.0, 64).unwrap() > 0.0);
    }

    #[test]
    fn exponential_memory_adds_one_root() {
        // y' + λ ∫ g y: (1 + ε s) s + λ
        let law = attach_memory(
            &HeatLaw::fourier(int(1)).unwrap(),
            int(0),
            Kernel::exponential(ratio(1, 2)).unwrap(),
            int(0),
            MemoryOptions::default(),
        )
        .unwrap();
        let c = characteristic_polynomial(&to_evolution(&law), 2.0).unwrap();
        assert_eq!(c, vec![2.0, 1.0, 0.5]);
        assert_eq!(characteristic_roots(&to_evolution(&law), 2.0).unwrap().roots.len(), 2);
    }

    #[test]
    fn leading_zero_reduces_degree() {
        let r = polynomial_roots(&[2.0, 1.0, 0.0]).unwrap();
        assert!(r.degree_reduced);
        assert_eq!(r.roots, vec![Complex64::new(-2.0, 0.0)]);
        let r = polynomial_roots(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.roots.len(), 3);
        assert_eq!(r.roots.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn large_eigenvalue_residuals() {
        let eq = EvolutionEquation::mgt(ratio(7, 3), ratio(5, 2), ratio(1, 9)).unwrap();
        let lambda = (64.0 * PI).powi(2);
        let r = characteristic_roots(&eq, lambda).unwrap();
        assert!(r.max_residual <= RESIDUAL_TOLERANCE, "{}", r.max_residual);
    }

    #[test]
    fn routh_hurwitz_quadratics() {
        assert_eq!(routh_hurwitz(&[1.0, 2.0, 1.0]), Some(true));
        assert_eq!(routh_hurwitz(&[1.0, -2.0, 1.0]), Some(false));
        assert_eq!(routh_hurwitz(&[1.0, 0.0, 1.0]), Some(false));
        // (s+1)(s+2)(s+3)
        assert_eq!(routh_hurwitz(&[6.0, 11.0, 6.0, 1.0]), Some(true));
    }
}
