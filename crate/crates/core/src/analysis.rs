//! Numerical studies on top of the operator engine: commutators, the
//! Hilbert–Schmidt partial sums, the compactness defect, the dilated kernel
//! and the Berezin transform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{kernel_coeffs, kernel_truncation, project_mixed_vector, FockVector, FockWeight, MixedVector};
use crate::operator::{
    apply_htoeplitz_exact, multiply_symbol, stable_truncation_size, OperatorKind, TruncatedOperator,
};
use crate::oracle::{QuadratureRule, SampledSymbol};
use crate::special::ln_factorial;
use crate::symbol::HarmonicSymbol;

/// Kernel tail mass left out of Berezin truncations.
pub const BEREZIN_TAIL: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Commuting,
    NonCommuting,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    pub block: usize,
    /// Truncation used for both factors before restricting to the block.
    pub truncation: usize,
    pub frobenius_norm: f64,
    pub max_abs_entry: f64,
    pub max_position: (usize, usize),
    pub tolerance: f64,
    pub verdict: Verdict,
    /// `λ` with `ψ = λ φ` coefficientwise, when such a `λ` exists.
    pub dependence_ratio: Option<Complex64>,
}

fn coefficient_vector(s: &HarmonicSymbol, da: usize, db: usize) -> Vec<Complex64> {
    (0..=da).map(|i| s.a(i)).chain((1..=db).map(|j| s.b(j))).collect()
}

/// `λ` with `ψ = λ φ` up to `tol` relative to the coefficient scale.
pub fn dependence_ratio(phi: &HarmonicSymbol, psi: &HarmonicSymbol, tol: f64) -> Option<Complex64> {
    let da = phi.analytic_degree().max(psi.analytic_degree()).max(0) as usize;
    let db = phi.anti_degree().max(psi.anti_degree()).max(0) as usize;
    let x = coefficient_vector(phi, da, db);
    let y = coefficient_vector(psi, da, db);
    let xx: f64 = x.iter().map(|c| c.norm_sqr()).sum();
    if xx == 0.0 {
        return None;
    }
    let lambda: Complex64 = x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum::<Complex64>() / xx;
    let scale = x.iter().chain(&y).map(|c| c.norm()).fold(1.0, f64::max);
    let fits = x.iter().zip(&y).all(|(a, b)| (b - lambda * a).norm() <= tol * scale);
    fits.then_some(lambda)
}

/// `[S_φ, S_ψ]` on the top-left `block x block` corner, assembled from
/// truncations large enough that the corner is exact.
pub fn commutator_report(
    phi: &HarmonicSymbol,
    psi: &HarmonicSymbol,
    block: usize,
    w: FockWeight,
    tol: f64,
) -> Result<CommutatorReport> {
    if block < 2 {
        return Err(Error::InvalidArgument(format!("commutator block must be at least 2, got {block}")));
    }
    let n = stable_truncation_size(&[phi, psi], block, w)?;
    let sp = TruncatedOperator::build(OperatorKind::HToeplitz, phi, n, n, w)?;
    let ss = TruncatedOperator::build(OperatorKind::HToeplitz, psi, n, n, w)?;
    let corner = sp.commutator(&ss)?.top_left(block, block)?;
    let (max_abs_entry, max_position) = corner.max_abs_entry();
    Ok(CommutatorReport {
        block,
        truncation: n,
        frobenius_norm: corner.frobenius_norm(),
        max_abs_entry,
        max_position,
        tolerance: tol,
        verdict: if max_abs_entry <= tol {
            Verdict::Commuting
        } else {
            Verdict::NonCommuting
        },
        dependence_ratio: dependence_ratio(phi, psi, 1e-12),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConverseSearchReport {
    pub trials: usize,
    pub seed: u64,
    pub block: usize,
    /// Pairs that commuted on the block, rendered as symbol text.
    pub commuting_pairs: Vec<(String, String)>,
    pub min_max_entry: f64,
}

fn random_vanishing_symbol(rng: &mut ChaCha8Rng, max_degree: usize) -> HarmonicSymbol {
    let coeff = |rng: &mut ChaCha8Rng| loop {
        let c = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if c.norm() > 0.1 {
            break c;
        }
    };
    let da = rng.random_range(1..=max_degree);
    let db = rng.random_range(1..=max_degree);
    let analytic: Vec<_> = (1..=da).map(|i| (i, coeff(rng))).collect();
    let anti: Vec<_> = (1..=db).map(|j| (j, coeff(rng))).collect();
    HarmonicSymbol::from_parts(analytic, anti)
}

/// Samples independent pairs with `φ(0) = ψ(0) = 0` and every coefficient up
/// to the drawn degrees nonzero, and records any pair whose commutator
/// corner stays below `tol`. Finding none is evidence, not proof.
pub fn converse_search(
    trials: usize,
    max_degree: usize,
    block: usize,
    seed: u64,
    w: FockWeight,
    tol: f64,
) -> Result<ConverseSearchReport> {
    if max_degree == 0 {
        return Err(Error::InvalidArgument("max_degree must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..trials)
        .map(|_| {
            (
                random_vanishing_symbol(&mut rng, max_degree),
                random_vanishing_symbol(&mut rng, max_degree),
            )
        })
        .collect();
    let reports: Vec<CommutatorReport> = pairs
        .par_iter()
        .map(|(p, q)| commutator_report(p, q, block, w, tol))
        .collect::<Result<_>>()?;
    let mut commuting_pairs = Vec::new();
    let mut min_max_entry = f64::INFINITY;
    for ((p, q), r) in pairs.iter().zip(&reports) {
        min_max_entry = min_max_entry.min(r.max_abs_entry);
        if r.verdict == Verdict::Commuting && r.dependence_ratio.is_none() {
            commuting_pairs.push((p.render(), q.render()));
        }
    }
    Ok(ConverseSearchReport {
        trials,
        seed,
        block,
        commuting_pairs,
        min_max_entry,
    })
}

/// `Σ_{n < ncols} ‖S_φ e_n‖²`, each column applied exactly.
pub fn hs_partial_sum(phi: &HarmonicSymbol, ncols: usize, w: FockWeight) -> Result<f64> {
    if ncols == 0 {
        return Err(Error::InvalidArgument("need at least one column".into()));
    }
    Ok((0..ncols)
        .map(|n| apply_htoeplitz_exact(phi, &FockVector::basis(n, w)).norm_sqr())
        .sum())
}

/// `d_n = ‖(S_φ* - K* P M_{conj φ}) e_n‖` for `n < len`.
#[derive(Debug, Clone, Serialize)]
pub struct DefectSequence {
    pub values: Vec<f64>,
    pub truncation: usize,
    pub tolerance: f64,
    /// Smallest `n0` with `d_n <= tolerance` for every `n0 <= n < len`.
    pub vanishes_from: Option<usize>,
}

fn defect_from_adjoint(phi_conj: &HarmonicSymbol, adj: &TruncatedOperator, n: usize, w: FockWeight) -> f64 {
    let lhs = adj.column(n);
    let projected = project_mixed_vector(&multiply_symbol(phi_conj, &MixedVector::from_fock(&FockVector::basis(n, w))));
    // K* on an analytic vector: e_m -> e_{2m}
    let rhs = FockVector::from_coeffs(projected.iter().map(|(m, c)| (2 * m, c)), w);
    lhs.sub(&rhs).norm()
}

/// One defect value, from the conjugate transpose of a stabilized truncation.
pub fn compactness_defect(phi: &HarmonicSymbol, n: usize, w: FockWeight) -> Result<f64> {
    Ok(defect_sequence(phi, n + 1, w, 0.0)?.values[n])
}

pub fn defect_sequence(phi: &HarmonicSymbol, len: usize, w: FockWeight, tol: f64) -> Result<DefectSequence> {
    if len == 0 {
        return Err(Error::InvalidArgument("defect sequence needs at least one term".into()));
    }
    let size = stable_truncation_size(&[phi], len, w)?;
    let adj = TruncatedOperator::build(OperatorKind::HToeplitz, phi, size, size, w)?.adjoint();
    let conj = phi.conjugate();
    let values: Vec<f64> = (0..len).map(|n| defect_from_adjoint(&conj, &adj, n, w)).collect();
    let vanishes_from = match values.iter().rposition(|&d| d > tol) {
        None => Some(0),
        Some(last) if last + 1 < len => Some(last + 1),
        Some(_) => None,
    };
    Ok(DefectSequence {
        values,
        truncation: size,
        tolerance: tol,
        vanishes_from,
    })
}

/// `ln(r^k)` with `0^0 = 1`; `None` for a vanishing power.
fn ln_pow(ln_r: Option<f64>, k: usize) -> Option<f64> {
    match (ln_r, k) {
        (_, 0) => Some(0.0),
        (Some(l), k) => Some(k as f64 * l),
        (None, _) => None,
    }
}

/// `I(z, w) = (K k_z)(w)` summed over `n < terms` in both series
/// `Σ c_{2n} e_n(w) + Σ c_{2n+1} conj(e_{n+1}(w))`, `c_j` the coefficients of `k_z`.
pub fn dilated_kernel(z: Complex64, at: Complex64, terms: usize, w: FockWeight) -> Complex64 {
    let ln_a = w.ln_alpha();
    let lead = -0.5 * w.alpha() * z.norm_sqr();
    let lz = (z.norm() > 0.0).then(|| z.norm().ln());
    let lw = (at.norm() > 0.0).then(|| at.norm().ln());
    let (tz, tw) = (z.arg(), at.arg());
    let mut sum = Complex64::default();
    for n in 0..terms {
        let (j, k) = (2 * n, n);
        if let (Some(pz), Some(pw)) = (ln_pow(lz, j), ln_pow(lw, k)) {
            let ln_mod = lead + 0.5 * (j as f64 * ln_a - ln_factorial(j)) + pz
                + 0.5 * (k as f64 * ln_a - ln_factorial(k))
                + pw;
            sum += Complex64::from_polar(ln_mod.exp(), -(j as f64) * tz + k as f64 * tw);
        }
        let (j, k) = (2 * n + 1, n + 1);
        if let (Some(pz), Some(pw)) = (ln_pow(lz, j), ln_pow(lw, k)) {
            let ln_mod = lead + 0.5 * (j as f64 * ln_a - ln_factorial(j)) + pz
                + 0.5 * (k as f64 * ln_a - ln_factorial(k))
                + pw;
            sum += Complex64::from_polar(ln_mod.exp(), -(j as f64) * tz - k as f64 * tw);
        }
    }
    sum
}

/// A term count after which further terms of [`dilated_kernel`] are below
/// double precision.
pub fn dilated_kernel_terms(z: Complex64, at: Complex64, w: FockWeight) -> usize {
    let nz = kernel_truncation(z, w, 1e-40);
    let nw = kernel_truncation(at, w, 1e-40);
    nz.max(nw) + 8
}

/// `⟨S_φ k_z, k_z⟩ = c* M c` with `M` the `size x size` H-Toeplitz block.
pub fn berezin_with_size(phi: &HarmonicSymbol, z: Complex64, size: usize, w: FockWeight) -> Result<Complex64> {
    let m = TruncatedOperator::build(OperatorKind::HToeplitz, phi, size, size, w)?;
    let c = kernel_coeffs(z, size, w);
    let mc = m.apply(&c)?;
    Ok(mc.inner(&c))
}

/// Berezin transform of `S_φ` at `z`, truncated where the kernel tail mass
/// drops below [`BEREZIN_TAIL`].
pub fn berezin(phi: &HarmonicSymbol, z: Complex64, w: FockWeight) -> Result<Complex64> {
    berezin_with_size(phi, z, kernel_truncation(z, w, BEREZIN_TAIL), w)
}

/// A rule for `∫ φ(u) I(z,u) conj(k_z(u)) dλ(u)`.
pub fn berezin_rule(phi: &SampledSymbol, z: Complex64, w: FockWeight) -> QuadratureRule {
    let n = kernel_truncation(z, w, 1e-30);
    let breaks: Vec<f64> = phi.radial_breaks().iter().map(|r| w.alpha() * r * r).collect();
    QuadratureRule::with_breaks(2 * n + 16, n + 24, &breaks).expect("counts are positive")
}

/// The same transform as an integral against `dλ_α`, for sampled symbols.
pub fn berezin_by_quadrature(phi: &SampledSymbol, z: Complex64, rule: &QuadratureRule, w: FockWeight) -> Complex64 {
    let lead = (-0.5 * w.alpha() * z.norm_sqr()).exp();
    rule.integrate(w, |u| {
        let f = phi.eval(u);
        if f == Complex64::default() {
            return f;
        }
        let terms = dilated_kernel_terms(z, u, w);
        let kz = lead * (w.alpha() * z.conj() * u).exp();
        f * dilated_kernel(z, u, terms, w) * kz.conj()
    })
}

/// Bounded symbols accepted by [`berezin_bound_check`].
#[derive(Debug, Clone)]
pub enum BerezinSubject {
    Polynomial(HarmonicSymbol),
    Sampled(SampledSymbol),
}

#[derive(Debug, Clone, Serialize)]
pub struct BerezinBoundReport {
    pub symbol: String,
    pub sup_bound: f64,
    pub samples: Vec<(Complex64, Complex64)>,
    pub max_abs: f64,
    pub within_bound: bool,
}

/// Samples `|transform|` and compares with `‖ψ‖_∞ + 1e-8`. Non-constant
/// polynomials are unbounded on the plane and are rejected.
pub fn berezin_bound_check(subject: &BerezinSubject, points: &[Complex64], w: FockWeight) -> Result<BerezinBoundReport> {
    let (label, bound, values): (String, f64, Vec<Complex64>) = match subject {
        BerezinSubject::Polynomial(phi) => {
            if !phi.is_constant() {
                return Err(Error::UnboundedSymbol(format!(
                    "'{}' is a non-constant polynomial and has no finite sup norm",
                    phi.render()
                )));
            }
            let values = points.iter().map(|&z| berezin(phi, z, w)).collect::<Result<_>>()?;
            (phi.render(), phi.a(0).norm(), values)
        }
        BerezinSubject::Sampled(s) => {
            let Some(bound) = s.sup_bound() else {
                return Err(Error::UnboundedSymbol(format!("'{}' declares no sup-norm bound", s.label())));
            };
            let values = points
                .par_iter()
                .map(|&z| berezin_by_quadrature(s, z, &berezin_rule(s, z, w), w))
                .collect();
            (s.label().to_string(), bound, values)
        }
    };
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(BerezinBoundReport {
        symbol: label,
        sup_bound: bound,
        samples: points.iter().copied().zip(values).collect(),
        max_abs,
        within_bound: max_abs <= bound + 1e-8,
    })
}

/// `radius,value` CSV for decay plots.
pub fn decay_table_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("radius,value\n");
    for (r, v) in rows {
        out.push_str(&format!("{r:.16e},{v:.16e}\n"));
    }
    out
}
