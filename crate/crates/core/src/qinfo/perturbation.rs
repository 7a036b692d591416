use alloc::vec::Vec;

use crate::linalg::{svd, vector, Matrix, SvdResult};
use crate::{math, Error, Result};

/// Schmidt weight at which `1 + ln λ` vanishes.
pub const CRITICAL_WEIGHT: f64 = 0.367_879_441_171_442_33;

/// Singular values closer than this to a neighbour are not predicted.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Negative,
    Positive,
    Neutral,
}

impl SignClass {
    pub fn symbol(self) -> &'static str {
        match self {
            SignClass::Negative => "-",
            SignClass::Positive => "+",
            SignClass::Neutral => "0",
        }
    }

    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            SignClass::Positive
        } else if x < 0.0 {
            SignClass::Negative
        } else {
            SignClass::Neutral
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationComponent {
    pub k: usize,
    pub sigma: f64,
    /// `σ_k²`
    pub lambda: f64,
    /// First-order prediction `r_k = u_kᵀ E v_k`.
    pub predicted: f64,
    /// `σ_k(C_next) − σ_k(C)`.
    pub actual: f64,
    /// Distance to the nearest other singular value of `C`.
    pub gap: f64,
    /// `σ_k` is not simple; `predicted` is 0 and meaningless.
    pub skipped: bool,
    /// `‖E‖_F² (1/gap + 1/σ_k)`, a rough size for the neglected second order.
    pub second_order_bound: f64,
}

/// First-order singular-value shifts under `E = C_next − C`, compared
/// against a fresh decomposition of `C_next`.
pub fn svd_perturbation_predict(c: &Matrix, c_next: &Matrix) -> Result<Vec<PerturbationComponent>> {
    perturbation_components(c, c_next, &svd(c)?, &svd(c_next)?)
}

/// As [`svd_perturbation_predict`] with both decompositions supplied.
pub fn perturbation_components(
    c: &Matrix,
    c_next: &Matrix,
    base: &SvdResult,
    next: &SvdResult,
) -> Result<Vec<PerturbationComponent>> {
    let e = c_next.sub(c)?;
    let e_norm = e.frobenius_norm();
    let e_norm2 = e_norm * e_norm;
    let s = &base.singular_values;
    if next.singular_values.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: next.singular_values.len(),
        });
    }
    let mut out = Vec::with_capacity(s.len());
    for k in 0..s.len() {
        let gap = s
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, x)| (x - s[k]).abs())
            .fold(f64::INFINITY, f64::min);
        let skipped = gap < DEGENERACY_TOLERANCE;
        let predicted = if skipped {
            0.0
        } else {
            vector::dot(&base.left[k], &e.matvec(&base.right[k])?)
        };
        out.push(PerturbationComponent {
            k,
            sigma: s[k],
            lambda: s[k] * s[k],
            predicted,
            actual: next.singular_values[k] - s[k],
            gap,
            skipped,
            second_order_bound: e_norm2 * (1.0 / gap + 1.0 / s[k]),
        });
    }
    Ok(out)
}

/// Sign of the first-order entropy contribution `−2σ(1 + ln λ) r`.
pub fn entropy_sign_rule(lambda: f64, r: f64) -> Result<SignClass> {
    if !(lambda > 0.0 && lambda <= 1.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "sign rule needs λ in (0, 1] and finite r, got λ = {lambda}, r = {r}"
        )));
    }
    if r == 0.0 || (lambda - CRITICAL_WEIGHT).abs() <= 4.0 * f64::EPSILON * CRITICAL_WEIGHT {
        return Ok(SignClass::Neutral);
    }
    let upper = lambda > CRITICAL_WEIGHT;
    Ok(match (upper, r > 0.0) {
        (true, true) | (false, false) => SignClass::Negative,
        (true, false) | (false, true) => SignClass::Positive,
    })
}

/// `ΔS_k ≈ −2 σ_k (1 + ln λ_k) Δσ_k`; zero for a vanishing weight.
pub fn linearized_entropy_contribution(sigma: f64, delta_sigma: f64) -> f64 {
    let lambda = sigma * sigma;
    if lambda <= 0.0 {
        return 0.0;
    }
    -2.0 * sigma * (1.0 + math::ln(lambda)) * delta_sigma
}
