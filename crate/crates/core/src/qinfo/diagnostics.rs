use alloc::vec::Vec;

use super::{
    coefficient_matrix, purity_channels, schmidt_from_svd, shannon_config_entropy, shannon_entropy, Bipartition,
    CoefficientMatrix, SchmidtSpectrum,
};
use super::{linearized_entropy_contribution, perturbation_components, PerturbationComponent, SignClass};
use crate::linalg::{svd, SvdResult};
use crate::math::{self, entropy_term};
use crate::Result;

pub const DEFAULT_SCHMIDT_RANK: usize = 5;

/// Every diagnostic of one branch state at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub parameter: f64,
    pub branch: usize,
    pub s_vn: f64,
    /// Shannon entropy of `|ψ_n|²` over the full product basis.
    pub s_config: f64,
    pub s_sh_x: f64,
    pub s_sh_y: f64,
    pub c_d_x: f64,
    pub c_d_y: f64,
    /// Purity of the left reduced state.
    pub purity: f64,
    pub p_diag: f64,
    pub p_off: f64,
    pub schmidt: SchmidtSpectrum,
}

impl DiagnosticsRecord {
    /// Leading Schmidt weights padded with zeros to `rank` entries.
    pub fn leading_weights(&self, rank: usize) -> Vec<f64> {
        (0..rank)
            .map(|k| if k < self.schmidt.rank { self.schmidt.weights[k] } else { 0.0 })
            .collect()
    }
}

/// A state's coefficient matrix and its decomposition, kept for
/// perturbation comparisons between neighbouring parameter points.
#[derive(Debug, Clone, PartialEq)]
pub struct StateAnalysis {
    pub coefficients: CoefficientMatrix,
    pub svd: SvdResult,
    pub record: DiagnosticsRecord,
}

/// Diagnostics of a pure state; `S(ρ_x) = S(ρ_y)` is taken from the
/// Schmidt weights, so no reduced state is diagonalized.
pub fn diagnose(
    parameter: f64,
    branch: usize,
    state: &[f64],
    bipartition: &Bipartition,
    rank: usize,
) -> Result<DiagnosticsRecord> {
    Ok(analyze(parameter, branch, state, bipartition, rank)?.record)
}

pub fn analyze(
    parameter: f64,
    branch: usize,
    state: &[f64],
    bipartition: &Bipartition,
    rank: usize,
) -> Result<StateAnalysis> {
    let c = coefficient_matrix(state, bipartition)?;
    let decomposition = svd(c.matrix())?;
    let schmidt = schmidt_from_svd(&decomposition, rank);
    let s_vn = schmidt.entropy();
    let rho_x = c.rho_left(&bipartition.left_labels);
    let rho_y = c.rho_right(&bipartition.right_labels);
    let s_sh_x = shannon_entropy(&rho_x.diagonal());
    let s_sh_y = shannon_entropy(&rho_y.diagonal());
    let clip = |d: f64| if (-1e-10..0.0).contains(&d) { 0.0 } else { d };
    let p = purity_channels(&rho_x);
    let record = DiagnosticsRecord {
        parameter,
        branch,
        s_vn,
        s_config: shannon_config_entropy(state)?,
        s_sh_x,
        s_sh_y,
        c_d_x: clip(s_sh_x - s_vn),
        c_d_y: clip(s_sh_y - s_vn),
        purity: p.purity,
        p_diag: p.diagonal,
        p_off: p.off_diagonal,
        schmidt,
    };
    Ok(StateAnalysis {
        coefficients: c,
        svd: decomposition,
        record,
    })
}

/// Schmidt weights below this carry no resolvable entropy change and are
/// excluded from the first-order sum.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// First-order entropy prediction between two neighbouring states of a
/// branch, compared against the actual change of `S_vN`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignCheck {
    pub components: Vec<PerturbationComponent>,
    pub delta_entropy: f64,
    /// `Σ_k −2σ_k(1 + ln λ_k) r_k` over resolvable components.
    pub linearized: f64,
    /// Size estimate of everything the linear sum neglects.
    pub bound: f64,
    /// All resolvable components are simple and `|linearized| > bound`.
    pub counted: bool,
    pub agrees: bool,
}

pub fn sign_rule_check(prev: &StateAnalysis, next: &StateAnalysis) -> Result<SignCheck> {
    let components = perturbation_components(
        prev.coefficients.matrix(),
        next.coefficients.matrix(),
        &prev.svd,
        &next.svd,
    )?;
    let mut linearized = 0.0;
    let mut bound = 0.0;
    let mut resolvable = true;
    for p in &components {
        let sigma_next = p.sigma + p.actual;
        let lambda_next = sigma_next * sigma_next;
        if p.lambda < WEIGHT_FLOOR {
            bound += entropy_term(p.lambda) + entropy_term(lambda_next);
            continue;
        }
        if p.skipped {
            resolvable = false;
            continue;
        }
        let ln = math::ln(p.lambda);
        linearized += linearized_entropy_contribution(p.sigma, p.predicted);
        bound += (2.0 * p.sigma * (1.0 + ln)).abs() * p.second_order_bound;
        let step = p.predicted.abs() + p.second_order_bound;
        bound += (ln.abs() + 3.0) * step * step;
    }
    let delta_entropy = next.record.s_vn - prev.record.s_vn;
    let counted = resolvable && linearized.abs() > bound;
    Ok(SignCheck {
        components,
        delta_entropy,
        linearized,
        bound,
        counted,
        agrees: counted && SignClass::of(delta_entropy) == SignClass::of(linearized),
    })
}
