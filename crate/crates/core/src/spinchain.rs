//! Open spin-½ Ising chain in a tilted field,
//!
//! `H(θ) = J Σ_{n<L} σᶻₙσᶻₙ₊₁ + B Σ_n (sin θ σˣₙ + cos θ σᶻₙ)`,
//!
//! and its bit-reversal (spatial reflection) symmetry sectors.
//!
//! Basis labels are integers `0..2^L`; site 1 is the most significant bit
//! and bit value 0 means `σᶻ = +1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dense_sym_eig, Matrix, SparseSymOperator};
use crate::{math, Error, Result};

/// Dense sector diagonalization budget.
pub const MAX_SITES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChainModel {
    pub sites: usize,
    pub coupling: f64,
    pub field: f64,
    pub tilt: f64,
}

impl SpinChainModel {
    pub fn new(sites: usize, coupling: f64, field: f64, tilt: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidArgument(alloc::format!("chain needs at least 2 sites, got {sites}")));
        }
        if sites > MAX_SITES {
            return Err(Error::ChainTooLong { sites, max: MAX_SITES });
        }
        if !(coupling.is_finite() && field.is_finite() && tilt.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SpinChainModel {
            sites,
            coupling,
            field,
            tilt,
        })
    }

    /// `L = 8`, `J = 1`, `B = 1` at tilt `θ`.
    pub fn standard(tilt: f64) -> Self {
        SpinChainModel {
            sites: 8,
            coupling: 1.0,
            field: 1.0,
            tilt,
        }
    }

    pub fn with_tilt(&self, tilt: f64) -> Self {
        SpinChainModel { tilt, ..*self }
    }

    pub fn hilbert_dim(&self) -> usize {
        1 << self.sites
    }
}

/// σᶻ eigenvalue of site `n` (1-based) in basis state `label`.
#[inline]
fn sz(label: usize, n: usize, sites: usize) -> f64 {
    if (label >> (sites - n)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The three coupling-free pieces of the Hamiltonian,
/// `H(θ) = J·zz + B sin θ·x + B cos θ·z`.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    pub zz: SparseSymOperator,
    pub x: SparseSymOperator,
    pub z: SparseSymOperator,
}

pub fn hamiltonian_terms(sites: usize) -> Result<HamiltonianTerms> {
    SpinChainModel::new(sites, 1.0, 1.0, 0.0)?;
    let dim = 1usize << sites;
    let mut zz = Vec::with_capacity(dim);
    let mut z = Vec::with_capacity(dim);
    let mut x = Vec::with_capacity(dim * sites / 2);
    for s in 0..dim {
        let zz_val: f64 = (1..sites).map(|n| sz(s, n, sites) * sz(s, n + 1, sites)).sum();
        let z_val: f64 = (1..=sites).map(|n| sz(s, n, sites)).sum();
        zz.push((s, s, zz_val));
        z.push((s, s, z_val));
        for n in 1..=sites {
            let t = s ^ (1 << (sites - n));
            if s < t {
                x.push((s, t, 1.0));
            }
        }
    }
    Ok(HamiltonianTerms {
        zz: SparseSymOperator::from_triplets(dim, zz)?,
        x: SparseSymOperator::from_triplets(dim, x)?,
        z: SparseSymOperator::from_triplets(dim, z)?,
    })
}

/// Full `2^L`-dimensional Hamiltonian.
pub fn build_hamiltonian(model: &SpinChainModel) -> Result<SparseSymOperator> {
    let model = SpinChainModel::new(model.sites, model.coupling, model.field, model.tilt)?;
    let (st, ct) = (math::sin(model.tilt), math::cos(model.tilt));
    let dim = model.hilbert_dim();
    let l = model.sites;
    let mut entries = Vec::with_capacity(dim * (l + 1));
    for s in 0..dim {
        let zz: f64 = (1..l).map(|n| sz(s, n, l) * sz(s, n + 1, l)).sum();
        let z: f64 = (1..=l).map(|n| sz(s, n, l)).sum();
        entries.push((s, s, model.coupling * zz + model.field * ct * z));
        let hx = model.field * st;
        if hx != 0.0 {
            for n in 1..=l {
                let t = s ^ (1 << (l - n));
                if s < t {
                    entries.push((s, t, hx));
                }
            }
        }
    }
    SparseSymOperator::from_triplets(dim, entries)
}

/// Reverses the `sites`-bit string `label` (site n ↔ site L+1−n).
pub fn reverse_bits(label: usize, sites: usize) -> usize {
    let mut out = 0;
    for b in 0..sites {
        if (label >> b) & 1 == 1 {
            out |= 1 << (sites - 1 - b);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// `(2^L ± 2^⌈L/2⌉)/2` for the even (+) and odd (−) sectors.
pub fn sector_dimension(sites: usize, parity: Parity) -> usize {
    let full = 1usize << sites;
    let palindromes = 1usize << sites.div_ceil(2);
    match parity {
        Parity::Even => (full + palindromes) / 2,
        Parity::Odd => (full - palindromes) / 2,
    }
}

/// One sector basis vector: `|s⟩` for a palindrome, otherwise
/// `(|s⟩ ± |r⟩)/√2` with `s < r = reverse(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorState {
    pub representative: usize,
    pub partner: usize,
}

impl SectorState {
    pub fn is_palindrome(&self) -> bool {
        self.representative == self.partner
    }
}

/// Orthonormal basis of a bit-reversal sector, ordered by ascending
/// representative label.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    sites: usize,
    parity: Parity,
    states: Vec<SectorState>,
}

pub fn bit_reversal_sector(sites: usize, parity: Parity) -> Result<SectorBasis> {
    SpinChainModel::new(sites, 1.0, 1.0, 0.0)?;
    let mut states = Vec::with_capacity(sector_dimension(sites, parity));
    for s in 0..(1usize << sites) {
        let r = reverse_bits(s, sites);
        if s < r || (s == r && parity == Parity::Even) {
            states.push(SectorState {
                representative: s,
                partner: r,
            });
        }
    }
    Ok(SectorBasis { sites, parity, states })
}

impl SectorBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn states(&self) -> &[SectorState] {
        &self.states
    }

    fn partner_sign(&self) -> f64 {
        match self.parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Sector coordinates → full `2^L` vector (`P v`).
    pub fn embed(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.sites];
        let sign = self.partner_sign();
        for (st, c) in self.states.iter().zip(coeffs) {
            if st.is_palindrome() {
                out[st.representative] = *c;
            } else {
                out[st.representative] = c * core::f64::consts::FRAC_1_SQRT_2;
                out[st.partner] = sign * c * core::f64::consts::FRAC_1_SQRT_2;
            }
        }
        out
    }

    /// Full vector → sector coordinates (`Pᵀ ψ`).
    pub fn project(&self, full: &[f64]) -> Vec<f64> {
        let sign = self.partner_sign();
        self.states
            .iter()
            .map(|st| {
                if st.is_palindrome() {
                    full[st.representative]
                } else {
                    (full[st.representative] + sign * full[st.partner]) * core::f64::consts::FRAC_1_SQRT_2
                }
            })
            .collect()
    }
}

/// `‖[H, R]‖_F` for the bit-reversal permutation `R`.
pub fn reflection_commutator_norm(h: &SparseSymOperator, sites: usize) -> f64 {
    let mut sum = 0.0;
    for &(r, c, v) in h.upper_entries() {
        let w = h.get(reverse_bits(r, sites), reverse_bits(c, sites));
        let weight = if r == c { 1.0 } else { 2.0 };
        sum += weight * (v - w) * (v - w);
    }
    math::sqrt(sum)
}

/// `Pᵀ H P` for the sector isometry `P`.
pub fn sector_hamiltonian(model: &SpinChainModel, basis: &SectorBasis) -> Result<Matrix> {
    if model.sites != basis.sites {
        return Err(Error::DimensionMismatch {
            expected: basis.sites,
            found: model.sites,
        });
    }
    let h = build_hamiltonian(model)?;
    let commutator_norm = reflection_commutator_norm(&h, model.sites);
    if commutator_norm > 1e-10 {
        return Err(Error::SymmetryViolation { commutator_norm });
    }
    let d = basis.dim();
    let mut out = Matrix::zeros(d, d);
    let mut unit = vec![0.0; d];
    for c in 0..d {
        unit[c] = 1.0;
        let column = basis.project(&h.matvec(&basis.embed(&unit)));
        unit[c] = 0.0;
        for (r, v) in column.into_iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    // exact symmetry up to the last bit
    for r in 0..d {
        for c in r + 1..d {
            let v = 0.5 * (out[(r, c)] + out[(c, r)]);
            out[(r, c)] = v;
            out[(c, r)] = v;
        }
    }
    Ok(out)
}

/// Full sector spectrum at one tilt.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorEigenSet {
    pub tilt: f64,
    /// Ascending.
    pub values: Vec<f64>,
    /// Sector coordinates, one vector per eigenvalue.
    pub vectors: Vec<Vec<f64>>,
}

pub fn sector_eigenset(model: &SpinChainModel, basis: &SectorBasis) -> Result<SectorEigenSet> {
    let h = sector_hamiltonian(model, basis)?;
    let pairs = dense_sym_eig(&h)?;
    let (values, vectors) = pairs.into_iter().map(|p| (p.value, p.vector)).unzip();
    Ok(SectorEigenSet {
        tilt: model.tilt,
        values,
        vectors,
    })
}

/// Diagonalizes the sector Hamiltonian at every tilt in `tilts`
/// (strictly increasing).
pub fn sweep_spectrum(template: &SpinChainModel, basis: &SectorBasis, tilts: &[f64]) -> Result<Vec<SectorEigenSet>> {
    check_increasing(tilts)?;
    tilts
        .iter()
        .map(|&t| sector_eigenset(&template.with_tilt(t), basis))
        .collect()
}

pub(crate) fn check_increasing(params: &[f64]) -> Result<()> {
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::ParameterGrid("non-finite parameter value".into()));
    }
    if params.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ParameterGrid("parameter values must be strictly increasing".into()));
    }
    Ok(())
}
