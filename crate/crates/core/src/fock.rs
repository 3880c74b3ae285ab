//! Fock-space fundamentals: the weight `alpha`, the orthonormal basis
//! `e_n(z) = sqrt(alpha^n / n!) z^n`, monomial inner products, the orthogonal
//! projection of mixed monomials `z^p conj(z)^q` onto `F²_α`, and normalized
//! reproducing kernels.
//!
//! Two vector types cover everything the operator engine needs:
//!
//! * [`FockVector`], a sparse expansion over `{e_n}`;
//! * [`MixedVector`], a sparse expansion over mixed monomials, an element of
//!   `L²(ℂ, dλ_α)`.
//!
//! `MixedVector` stores each coefficient against the *normalized* monomial
//! `ê_{p,q} = sqrt(alpha^(p+q) / (p! q!)) z^p conj(z)^q`. In that basis
//! `e_n = ê_{n,0}`, `conj(e_n) = ê_{0,n}`, the projection is
//! `P ê_{p,q} = sqrt(C(p, q)) e_{p-q}` and the Gram matrix is free of `alpha`,
//! so no intermediate coefficient over- or underflows.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_binomial, ln_factorial};

/// The Gaussian parameter `alpha > 0` of `dλ_α = (alpha/π) e^{-alpha|z|²} dA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FockWeight(f64);

impl FockWeight {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    pub fn ln_alpha(self) -> f64 {
        self.0.ln()
    }
}

impl Default for FockWeight {
    fn default() -> Self {
        Self(1.0)
    }
}

impl TryFrom<f64> for FockWeight {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<FockWeight> for f64 {
    fn from(w: FockWeight) -> f64 {
        w.0
    }
}

/// Comparison tolerances: relative error against closed forms and against
/// quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub closed_form: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed_form: 1e-10,
            quadrature: 1e-8,
        }
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`: relative above unit magnitude,
/// absolute below it.
pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

/// `sqrt(alpha^n / n!)`, the normalization of `e_n`.
pub fn basis_norm_coeff(n: usize, w: FockWeight) -> f64 {
    (0.5 * (n as f64 * w.ln_alpha() - ln_factorial(n))).exp()
}

/// `<z^s, z^t> = δ_{st} s! / alpha^s`.
pub fn monomial_inner(s: usize, t: usize, w: FockWeight) -> Complex64 {
    if s != t {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new((ln_factorial(s) - s as f64 * w.ln_alpha()).exp(), 0.0)
}

/// A single term `coeff · z^p conj(z)^q` with a raw (unnormalized) coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedMonomial {
    pub p: usize,
    pub q: usize,
    pub coeff: Complex64,
}

impl MixedMonomial {
    pub fn new(p: usize, q: usize, coeff: Complex64) -> Self {
        Self { p, q, coeff }
    }
}

/// ln of `sqrt(alpha^(p+q) / (p! q!))`, the factor turning `z^p conj(z)^q`
/// into `ê_{p,q}`.
fn ln_mixed_norm(p: usize, q: usize, w: FockWeight) -> f64 {
    0.5 * ((p + q) as f64 * w.ln_alpha() - ln_factorial(p) - ln_factorial(q))
}

/// `P(z^p conj(z)^q)`: zero when `q > p`, otherwise
/// `(p! / alpha^p) sqrt(alpha^(p-q) / (p-q)!) e_{p-q}`.
pub fn project_mixed_monomial(p: usize, q: usize, w: FockWeight) -> FockVector {
    let mut out = FockVector::zero(w);
    if q > p {
        return out;
    }
    let k = p - q;
    let ln_a = w.ln_alpha();
    let ln_c = ln_factorial(p) - p as f64 * ln_a + 0.5 * (k as f64 * ln_a - ln_factorial(k));
    out.coeffs.insert(k, Complex64::new(ln_c.exp(), 0.0));
    out
}

/// Linear extension of [`project_mixed_monomial`].
pub fn project_mixed_vector(v: &MixedVector) -> FockVector {
    let mut out = FockVector::zero(v.alpha);
    for (&(p, q), &c) in &v.terms {
        if q > p {
            continue;
        }
        let factor = (0.5 * ln_binomial(p, q)).exp();
        out.add_to(p - q, c * factor);
    }
    out
}

/// Coefficients of the normalized kernel `k_z` on `e_0 .. e_{n-1}`:
/// `c_k = e^{-alpha|z|²/2} sqrt(alpha^k / k!) conj(z)^k`.
pub fn kernel_coeffs(z: Complex64, n: usize, w: FockWeight) -> FockVector {
    let mut out = FockVector::zero(w);
    if z == Complex64::new(0.0, 0.0) {
        out.coeffs.insert(0, Complex64::new(1.0, 0.0));
        return out;
    }
    let r = z.norm();
    let theta = z.arg();
    let ln_r = r.ln();
    let ln_a = w.ln_alpha();
    let lead = -0.5 * w.alpha() * r * r;
    for k in 0..n {
        let kf = k as f64;
        let modulus = (lead + 0.5 * (kf * ln_a - ln_factorial(k)) + kf * ln_r).exp();
        out.coeffs.insert(k, Complex64::from_polar(modulus, -kf * theta));
    }
    out
}

/// Smallest `n` such that the squared norm of `k_z` carried by indices
/// `>= n` is at most `tail`. `|c_k|²` is the Poisson(alpha|z|²) mass at `k`.
pub fn kernel_truncation(z: Complex64, w: FockWeight, tail: f64) -> usize {
    let x = w.alpha() * z.norm_sqr();
    if x == 0.0 {
        return 1;
    }
    let ln_x = x.ln();
    let ln_pmf = |k: usize| -x + k as f64 * ln_x - ln_factorial(k);
    // past 2x the mass decays faster than 2^-k
    let mut end = (2.0 * x).ceil() as usize + 2;
    while ln_pmf(end) > -120.0 {
        end += 16;
    }
    let mut acc = 0.0;
    for k in (0..=end).rev() {
        let next = acc + ln_pmf(k).exp();
        if next > tail {
            return k + 1;
        }
        acc = next;
    }
    1
}

/// Sparse expansion `Σ c_n e_n` in `F²_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: BTreeMap<usize, Complex64>,
    alpha: FockWeight,
}

impl FockVector {
    pub fn zero(alpha: FockWeight) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            alpha,
        }
    }

    /// The basis vector `e_n`.
    pub fn basis(n: usize, alpha: FockWeight) -> Self {
        let mut v = Self::zero(alpha);
        v.coeffs.insert(n, Complex64::new(1.0, 0.0));
        v
    }

    /// Builds from `(index, coefficient)` pairs; repeated indices add up.
    pub fn from_coeffs<I>(coeffs: I, alpha: FockWeight) -> Self
    where
        I: IntoIterator<Item = (usize, Complex64)>,
    {
        let mut v = Self::zero(alpha);
        for (n, c) in coeffs {
            v.add_to(n, c);
        }
        v
    }

    /// Builds from a dense slice `c_0, c_1, ...`; exact zeros are skipped.
    pub fn from_dense(coeffs: &[Complex64], alpha: FockWeight) -> Self {
        let mut v = Self::zero(alpha);
        for (n, &c) in coeffs.iter().enumerate() {
            if c != Complex64::new(0.0, 0.0) {
                v.coeffs.insert(n, c);
            }
        }
        v
    }

    pub fn alpha(&self) -> FockWeight {
        self.alpha
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn add_to(&mut self, n: usize, c: Complex64) {
        *self.coeffs.entry(n).or_default() += c;
    }

    /// Non-zero terms in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    /// Dense coefficients `c_0 .. c_{len-1}`; terms at or beyond `len` are dropped.
    pub fn to_dense(&self, len: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); len];
        for (&n, &c) in self.coeffs.range(..len) {
            out[n] = c;
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().fold(0.0, |acc, c| acc + c.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other> = Σ c_n conj(d_n)`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs
            .iter()
            .filter_map(|(n, c)| other.coeffs.get(n).map(|d| c * d.conj()))
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&n, &c)| (n, c * s)).collect(),
            alpha: self.alpha,
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &FockVector, b: Complex64) -> Self {
        let mut out = self.scale(a);
        for (&n, &c) in &other.coeffs {
            out.add_to(n, c * b);
        }
        out
    }

    pub fn sub(&self, other: &FockVector) -> Self {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Largest coefficient modulus (0 for the zero vector).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Raw monomial coefficients: `Σ c_n e_n = Σ c_n sqrt(alpha^n/n!) z^n`.
    pub fn monomial_coeffs(&self) -> Vec<(usize, Complex64)> {
        self.iter()
            .map(|(n, c)| (n, c * basis_norm_coeff(n, self.alpha)))
            .collect()
    }

    /// Value of the function at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        MixedVector::from_fock(self).eval(z)
    }
}

/// Sparse element of `L²(ℂ, dλ_α)` spanned by mixed monomials.
///
/// Coefficients are held against the normalized monomials `ê_{p,q}` (see the
/// module docs); [`MixedVector::monomials`] converts back to raw coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedVector {
    terms: BTreeMap<(usize, usize), Complex64>,
    alpha: FockWeight,
}

impl MixedVector {
    pub fn zero(alpha: FockWeight) -> Self {
        Self {
            terms: BTreeMap::new(),
            alpha,
        }
    }

    /// Builds from raw monomials; repeated `(p, q)` merge.
    pub fn from_monomials<I>(monomials: I, alpha: FockWeight) -> Self
    where
        I: IntoIterator<Item = MixedMonomial>,
    {
        let mut v = Self::zero(alpha);
        for m in monomials {
            let scale = (-ln_mixed_norm(m.p, m.q, alpha)).exp();
            v.add_normalized(m.p, m.q, m.coeff * scale);
        }
        v
    }

    /// Embeds `Σ c_n e_n` as `Σ c_n ê_{n,0}`.
    pub fn from_fock(f: &FockVector) -> Self {
        Self {
            terms: f.coeffs.iter().map(|(&n, &c)| ((n, 0), c)).collect(),
            alpha: f.alpha,
        }
    }

    /// `c · conj(e_n)`.
    pub fn conj_basis(n: usize, c: Complex64, alpha: FockWeight) -> Self {
        let mut v = Self::zero(alpha);
        v.terms.insert((0, n), c);
        v
    }

    pub fn alpha(&self) -> FockWeight {
        self.alpha
    }

    pub fn add_normalized(&mut self, p: usize, q: usize, c: Complex64) {
        *self.terms.entry((p, q)).or_default() += c;
    }

    /// `(p, q, coefficient on ê_{p,q})` in increasing `(p, q)` order.
    pub fn normalized_terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.terms.iter().map(|(&(p, q), &c)| (p, q, c))
    }

    /// Coefficient on `ê_{p,q}`.
    pub fn normalized_coeff(&self, p: usize, q: usize) -> Complex64 {
        self.terms.get(&(p, q)).copied().unwrap_or_default()
    }

    /// Raw monomial terms `coeff · z^p conj(z)^q`.
    pub fn monomials(&self) -> Vec<MixedMonomial> {
        self.terms
            .iter()
            .map(|(&(p, q), &c)| {
                MixedMonomial::new(p, q, c * ln_mixed_norm(p, q, self.alpha).exp())
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `p` and `q` present, `None` when empty.
    pub fn max_degrees(&self) -> Option<(usize, usize)> {
        if self.terms.is_empty() {
            return None;
        }
        let p = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let q = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        Some((p, q))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, c * s)).collect(),
            alpha: self.alpha,
        }
    }

    pub fn add(&self, other: &MixedVector) -> Self {
        let mut out = self.clone();
        for (&(p, q), &c) in &other.terms {
            out.add_normalized(p, q, c);
        }
        out
    }

    /// Multiplies by `c · z^i conj(z)^j`:
    /// `ê_{p,q} z^i conj(z)^j = sqrt((p+i)! (q+j)! / (p! q! alpha^(i+j))) ê_{p+i,q+j}`.
    pub fn mul_monomial(&self, i: usize, j: usize, c: Complex64) -> Self {
        let ln_a = self.alpha.ln_alpha();
        let mut out = Self::zero(self.alpha);
        for (&(p, q), &v) in &self.terms {
            let ln_f = 0.5
                * (ln_factorial(p + i) + ln_factorial(q + j)
                    - ln_factorial(p)
                    - ln_factorial(q)
                    - (i + j) as f64 * ln_a);
            out.add_normalized(p + i, q + j, v * c * ln_f.exp());
        }
        out
    }

    /// Exact `L²(dλ_α)` inner product `<self, other>`.
    ///
    /// `<ê_{p,q}, ê_{r,s}> = δ_{p-q, r-s} (p+s)! / sqrt(p! q! r! s!)`.
    pub fn inner(&self, other: &MixedVector) -> Complex64 {
        let mut by_diag: BTreeMap<i64, Vec<(usize, usize, Complex64)>> = BTreeMap::new();
        for (&(r, s), &d) in &other.terms {
            by_diag
                .entry(r as i64 - s as i64)
                .or_default()
                .push((r, s, d));
        }
        let mut acc = Complex64::default();
        for (&(p, q), &c) in &self.terms {
            let Some(partners) = by_diag.get(&(p as i64 - q as i64)) else {
                continue;
            };
            for &(r, s, d) in partners {
                let ln_g = ln_factorial(p + s)
                    - 0.5
                        * (ln_factorial(p) + ln_factorial(q) + ln_factorial(r) + ln_factorial(s));
                acc += c * d.conj() * ln_g.exp();
            }
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().max(0.0).sqrt()
    }

    /// Value of the function at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let theta = z.arg();
        let ln_r = r.ln();
        let mut acc = Complex64::default();
        for (&(p, q), &c) in &self.terms {
            if p + q == 0 {
                acc += c;
                continue;
            }
            if r == 0.0 {
                continue;
            }
            let modulus =
                (ln_mixed_norm(p, q, self.alpha) + (p + q) as f64 * ln_r).exp();
            acc += c * Complex64::from_polar(modulus, (p as f64 - q as f64) * theta);
        }
        acc
    }
}
