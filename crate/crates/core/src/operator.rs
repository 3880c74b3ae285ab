//! Truncated matrices of `T_φ`, `H_φ` and the H-Toeplitz operator `S_φ`, the
//! basis maps `K`, `K*` and `J`, and exact (symbolic) operator application.
//!
//! Rows index the output basis vector `e_m`, columns the input `e_n`, both
//! 0-based. Every stored entry is the closed-form entry of the infinite
//! matrix; a truncation only selects entries.
//!
//! * `<T_φ e_n, e_m> = sqrt(alpha^(n-m) m!/n!) a_{m-n}` for `m >= n`,
//!   `sqrt(alpha^(m-n) n!/m!) b_{n-m}` for `n > m`;
//! * `<H_φ e_n, e_m> = (m+n+1)! / sqrt(alpha^(m+n+1) m! (n+1)!) a_{m+n+1}`;
//! * `S_φ e_{2n} = T_φ e_n` and `S_φ e_{2n+1} = H_φ e_n`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{close, project_mixed_vector, FockVector, FockWeight, MixedVector};
use crate::special::{ln_binomial, ln_factorial};
use crate::symbol::HarmonicSymbol;

/// Largest row or column count accepted by [`TruncatedOperator::build`].
pub const MAX_DIM: usize = 4096;

/// Divergence allowed between an `N` and a `2N` truncation on the stable block.
pub const STABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Toeplitz,
    Hankel,
    #[serde(rename = "htoeplitz")]
    HToeplitz,
    Generic,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Toeplitz => "toeplitz",
            OperatorKind::Hankel => "hankel",
            OperatorKind::HToeplitz => "htoeplitz",
            OperatorKind::Generic => "generic",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toeplitz" => Ok(OperatorKind::Toeplitz),
            "hankel" => Ok(OperatorKind::Hankel),
            "htoeplitz" | "h-toeplitz" => Ok(OperatorKind::HToeplitz),
            "generic" => Ok(OperatorKind::Generic),
            other => Err(Error::InvalidArgument(format!("unknown operator kind '{other}'"))),
        }
    }
}

/// `<T_φ e_n, e_m>`.
pub fn toeplitz_entry(phi: &HarmonicSymbol, m: usize, n: usize, w: FockWeight) -> Complex64 {
    let ln_a = w.ln_alpha();
    if m >= n {
        let a = phi.a(m - n);
        if a == Complex64::default() {
            return a;
        }
        let ln_f = 0.5 * ((n as f64 - m as f64) * ln_a + ln_factorial(m) - ln_factorial(n));
        a * ln_f.exp()
    } else {
        let b = phi.b(n - m);
        if b == Complex64::default() {
            return b;
        }
        let ln_f = 0.5 * ((m as f64 - n as f64) * ln_a + ln_factorial(n) - ln_factorial(m));
        b * ln_f.exp()
    }
}

/// `<H_φ e_n, e_m>`; the anti-analytic part never contributes.
pub fn hankel_entry(phi: &HarmonicSymbol, m: usize, n: usize, w: FockWeight) -> Complex64 {
    let i = m + n + 1;
    let a = phi.a(i);
    if a == Complex64::default() {
        return a;
    }
    let ln_f = ln_factorial(i)
        - 0.5 * (i as f64 * w.ln_alpha() + ln_factorial(m) + ln_factorial(n + 1));
    a * ln_f.exp()
}

/// `<S_φ e_j, e_m>`: even columns are Toeplitz columns, odd columns Hankel.
pub fn htoeplitz_entry(phi: &HarmonicSymbol, m: usize, j: usize, w: FockWeight) -> Complex64 {
    if j % 2 == 0 {
        toeplitz_entry(phi, m, j / 2, w)
    } else {
        hankel_entry(phi, m, (j - 1) / 2, w)
    }
}

/// Entry of the given kind; `Generic` has no closed form and yields zero.
pub fn entry(kind: OperatorKind, phi: &HarmonicSymbol, m: usize, n: usize, w: FockWeight) -> Complex64 {
    match kind {
        OperatorKind::Toeplitz => toeplitz_entry(phi, m, n, w),
        OperatorKind::Hankel => hankel_entry(phi, m, n, w),
        OperatorKind::HToeplitz => htoeplitz_entry(phi, m, n, w),
        OperatorKind::Generic => Complex64::default(),
    }
}

/// The three basis maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisMap {
    /// Dilation `e_{2n} -> e_n`, `e_{2n+1} -> conj(e_{n+1})`.
    K,
    /// Adjoint of the dilation, `e_n -> e_{2n}`, `conj(e_{n+1}) -> e_{2n+1}`.
    KStar,
    /// Flip `e_n -> conj(e_{n+1})`.
    J,
}

/// `K f`. Isometric.
pub fn dilation_apply(f: &FockVector) -> MixedVector {
    let mut out = MixedVector::zero(f.alpha());
    for (j, c) in f.iter() {
        if j % 2 == 0 {
            out.add_normalized(j / 2, 0, c);
        } else {
            out.add_normalized(0, (j + 1) / 2, c);
        }
    }
    out
}

/// `K* v`, i.e. `K*` composed with the orthogonal projection onto the closed
/// span of `{e_n} ∪ {conj(e_{n+1})}`; everything orthogonal to that span is
/// annihilated.
pub fn dilation_adjoint_apply(v: &MixedVector) -> FockVector {
    let mut out = FockVector::zero(v.alpha());
    for (p, q, c) in v.normalized_terms() {
        if p >= q {
            // <ê_{p,q}, e_{p-q}> = sqrt(C(p, q))
            out.add_to(2 * (p - q), c * (0.5 * ln_binomial(p, q)).exp());
        } else {
            // <ê_{p,q}, conj(e_{q-p})> = sqrt(C(q, p))
            let k = q - p;
            out.add_to(2 * k - 1, c * (0.5 * ln_binomial(q, p)).exp());
        }
    }
    out
}

/// `J f` with `J e_n = conj(e_{n+1})`.
pub fn flip_apply(f: &FockVector) -> MixedVector {
    let mut out = MixedVector::zero(f.alpha());
    for (n, c) in f.iter() {
        out.add_normalized(0, n + 1, c);
    }
    out
}

/// `φ · v` in `L²`.
pub fn multiply_symbol(phi: &HarmonicSymbol, v: &MixedVector) -> MixedVector {
    let mut out = MixedVector::zero(v.alpha());
    for (i, a) in phi.analytic() {
        out = out.add(&v.mul_monomial(i, 0, a));
    }
    for (j, b) in phi.anti() {
        out = out.add(&v.mul_monomial(0, j, b));
    }
    out
}

/// `P M_φ X f` with `X` the identity, `J` or `K` for Toeplitz, Hankel and
/// H-Toeplitz respectively, computed through mixed-monomial algebra with no
/// truncation.
pub fn apply_exact(kind: OperatorKind, phi: &HarmonicSymbol, f: &FockVector) -> Result<FockVector> {
    let lifted = match kind {
        OperatorKind::Toeplitz => MixedVector::from_fock(f),
        OperatorKind::Hankel => flip_apply(f),
        OperatorKind::HToeplitz => dilation_apply(f),
        OperatorKind::Generic => {
            return Err(Error::WrongKind {
                expected: "toeplitz, hankel or htoeplitz",
                found: "generic",
            })
        }
    };
    Ok(project_mixed_vector(&multiply_symbol(phi, &lifted)))
}

/// `S_φ f = P M_φ K f`, exactly.
pub fn apply_htoeplitz_exact(phi: &HarmonicSymbol, f: &FockVector) -> FockVector {
    project_mixed_vector(&multiply_symbol(phi, &dilation_apply(f)))
}

/// A dense block of an operator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    kind: OperatorKind,
    symbol: Option<HarmonicSymbol>,
    alpha: FockWeight,
    entries: DMatrix<Complex64>,
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "block dimensions must be positive, got {rows}x{cols}"
        )));
    }
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(Error::SizeLimit {
            rows,
            cols,
            limit: MAX_DIM,
        });
    }
    Ok(())
}

impl TruncatedOperator {
    /// Assembles the top-left `rows x cols` block. Entries are computed
    /// independently in parallel, so the result does not depend on the
    /// thread count.
    pub fn build(
        kind: OperatorKind,
        phi: &HarmonicSymbol,
        rows: usize,
        cols: usize,
        w: FockWeight,
    ) -> Result<Self> {
        if kind == OperatorKind::Generic {
            return Err(Error::WrongKind {
                expected: "toeplitz, hankel or htoeplitz",
                found: "generic",
            });
        }
        check_dims(rows, cols)?;
        let mut data = vec![Complex64::default(); rows * cols];
        data.par_chunks_mut(rows).enumerate().for_each(|(n, col)| {
            for (m, slot) in col.iter_mut().enumerate() {
                *slot = entry(kind, phi, m, n, w);
            }
        });
        Ok(Self {
            kind,
            symbol: Some(phi.clone()),
            alpha: w,
            entries: DMatrix::from_vec(rows, cols, data),
        })
    }

    pub fn from_matrix(
        kind: OperatorKind,
        symbol: Option<HarmonicSymbol>,
        alpha: FockWeight,
        entries: DMatrix<Complex64>,
    ) -> Result<Self> {
        check_dims(entries.nrows(), entries.ncols())?;
        Ok(Self {
            kind,
            symbol,
            alpha,
            entries,
        })
    }

    pub fn identity(n: usize, alpha: FockWeight) -> Result<Self> {
        check_dims(n, n)?;
        Ok(Self {
            kind: OperatorKind::Generic,
            symbol: None,
            alpha,
            entries: DMatrix::identity(n, n),
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn symbol(&self) -> Option<&HarmonicSymbol> {
        self.symbol.as_ref()
    }

    pub fn alpha(&self) -> FockWeight {
        self.alpha
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    /// Column `n` as a vector over `e_0 .. e_{rows-1}`.
    pub fn column(&self, n: usize) -> FockVector {
        FockVector::from_dense(self.entries.column(n).as_slice(), self.alpha)
    }

    /// Conjugate transpose of the block.
    pub fn adjoint(&self) -> Self {
        Self {
            kind: OperatorKind::Generic,
            symbol: None,
            alpha: self.alpha,
            entries: self.entries.adjoint(),
        }
    }

    /// Block product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self {
            kind: OperatorKind::Generic,
            symbol: None,
            alpha: self.alpha,
            entries: &self.entries * &other.entries,
        })
    }

    /// `self·other - other·self`; both blocks must be square of one size.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let n = self.rows();
        if self.cols() != n || other.rows() != n || other.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "commutator needs equal square blocks, got {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self {
            kind: OperatorKind::Generic,
            symbol: None,
            alpha: self.alpha,
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        })
    }

    /// The top-left `rows x cols` sub-block.
    pub fn top_left(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > self.rows() || cols > self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot take a {rows}x{cols} corner of a {}x{} block",
                self.rows(),
                self.cols()
            )));
        }
        Ok(Self {
            kind: self.kind,
            symbol: self.symbol.clone(),
            alpha: self.alpha,
            entries: self.entries.view((0, 0), (rows, cols)).into_owned(),
        })
    }

    fn require_htoeplitz(&self) -> Result<()> {
        if self.kind == OperatorKind::HToeplitz {
            Ok(())
        } else {
            Err(Error::WrongKind {
                expected: "htoeplitz",
                found: self.kind.name(),
            })
        }
    }

    fn select_columns(&self, start: usize, kind: OperatorKind) -> Result<Self> {
        let picked: Vec<usize> = (start..self.cols()).step_by(2).collect();
        if picked.is_empty() {
            return Err(Error::DimensionMismatch(
                "block has no columns of the requested parity".into(),
            ));
        }
        let entries = DMatrix::from_fn(self.rows(), picked.len(), |m, k| self.entries[(m, picked[k])]);
        Ok(Self {
            kind,
            symbol: self.symbol.clone(),
            alpha: self.alpha,
            entries,
        })
    }

    /// Columns `0, 2, 4, ...` of an H-Toeplitz block: the `T_φ` block.
    pub fn extract_even_columns(&self) -> Result<Self> {
        self.require_htoeplitz()?;
        self.select_columns(0, OperatorKind::Toeplitz)
    }

    /// Columns `1, 3, 5, ...` of an H-Toeplitz block: the `H_φ` block.
    pub fn extract_odd_columns(&self) -> Result<Self> {
        self.require_htoeplitz()?;
        self.select_columns(1, OperatorKind::Hankel)
    }

    /// Block times vector; `f` must be supported on the block's columns.
    pub fn apply(&self, f: &FockVector) -> Result<FockVector> {
        if let Some(top) = f.max_index() {
            if top >= self.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "vector index {top} outside a block with {} columns",
                    self.cols()
                )));
            }
        }
        let mut out = vec![Complex64::default(); self.rows()];
        for (n, c) in f.iter() {
            for (m, slot) in out.iter_mut().enumerate() {
                *slot += self.entries[(m, n)] * c;
            }
        }
        Ok(FockVector::from_dense(&out, self.alpha))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|entry|` and its position.
    pub fn max_abs_entry(&self) -> (f64, (usize, usize)) {
        let mut best = (0.0, (0, 0));
        for n in 0..self.cols() {
            for m in 0..self.rows() {
                let v = self.entries[(m, n)].norm();
                if v > best.0 {
                    best = (v, (m, n));
                }
            }
        }
        best
    }

    /// Largest entrywise `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Entrywise [`close`] against `other` at tolerance `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows() == other.rows()
            && self.cols() == other.cols()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(&a, &b)| close(a, b, tol))
    }

    /// Row-major CSV, one quoted `"re,im"` cell per entry, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for m in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|n| {
                    let c = self.entries[(m, n)];
                    format!("\"{:.16e},{:.16e}\"", c.re, c.im)
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> OperatorJson {
        OperatorJson {
            rows: self.rows(),
            cols: self.cols(),
            kind: self.kind,
            alpha: self.alpha.alpha(),
            entries: (0..self.rows())
                .map(|m| {
                    (0..self.cols())
                        .map(|n| {
                            let c = self.entries[(m, n)];
                            [c.re, c.im]
                        })
                        .collect()
                })
                .collect(),
            symbol: self.symbol.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("operator JSON is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: OperatorJson = serde_json::from_str(text)?;
        Self::try_from(j)
    }
}

/// JSON wire form `{rows, cols, kind, alpha, entries}`; `entries` is a list of
/// rows of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub rows: usize,
    pub cols: usize,
    pub kind: OperatorKind,
    pub alpha: f64,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<HarmonicSymbol>,
}

impl TryFrom<OperatorJson> for TruncatedOperator {
    type Error = Error;
    fn try_from(j: OperatorJson) -> Result<Self> {
        let alpha = FockWeight::new(j.alpha)?;
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::Format(format!(
                "entries do not form a {}x{} block",
                j.rows, j.cols
            )));
        }
        check_dims(j.rows, j.cols)?;
        let entries = DMatrix::from_fn(j.rows, j.cols, |m, n| {
            let [re, im] = j.entries[m][n];
            Complex64::new(re, im)
        });
        Self::from_matrix(j.kind, j.symbol, alpha, entries)
    }
}

fn degree_budget(symbols: &[&HarmonicSymbol]) -> (usize, usize) {
    let da = symbols.iter().map(|s| s.analytic_degree().max(0)).max().unwrap_or(0);
    let db = symbols.iter().map(|s| s.anti_degree().max(0)).max().unwrap_or(0);
    (da as usize, db as usize)
}

/// Truncation `N = 2 (n0 + d_a + d_b + 1)` (degrees taken over all
/// `symbols`, negatives clamped to 0) at which H-Toeplitz products and
/// adjoints are entry-exact on the top-left `n0 x n0` block.
///
/// The claim is checked by rebuilding at `2N` and comparing every product
/// `S_φ S_ψ` over the symbol set and every adjoint on that block.
pub fn stable_truncation_size(symbols: &[&HarmonicSymbol], n0: usize, w: FockWeight) -> Result<usize> {
    if n0 == 0 {
        return Err(Error::InvalidArgument("target block must be at least 1x1".into()));
    }
    let (da, db) = degree_budget(symbols);
    let size = 2 * (n0 + da + db + 1);
    let build = |s: &HarmonicSymbol, n: usize| TruncatedOperator::build(OperatorKind::HToeplitz, s, n, n, w);
    let small: Vec<_> = symbols.iter().map(|s| build(s, size)).collect::<Result<_>>()?;
    let large: Vec<_> = symbols.iter().map(|s| build(s, 2 * size)).collect::<Result<_>>()?;

    let compare = |a: &TruncatedOperator, b: &TruncatedOperator| -> Result<()> {
        for n in 0..n0 {
            for m in 0..n0 {
                let (x, y) = (a.get(m, n), b.get(m, n));
                if !close(x, y, STABILITY_TOL) {
                    return Err(Error::Unstable {
                        size,
                        block: n0,
                        row: m,
                        col: n,
                        divergence: (x - y).norm(),
                    });
                }
            }
        }
        Ok(())
    };
    for (i, (a_small, a_large)) in small.iter().zip(&large).enumerate() {
        compare(&a_small.adjoint(), &a_large.adjoint())?;
        for (b_small, b_large) in small.iter().zip(&large).skip(i) {
            compare(&a_small.compose(b_small)?, &a_large.compose(b_large)?)?;
            compare(&b_small.compose(a_small)?, &b_large.compose(a_large)?)?;
        }
    }
    Ok(size)
}

/// Entrywise comparison of `adjoint(X_φ)` with `X_{conj φ}` on an `n x n` block.
#[derive(Debug, Clone, Serialize)]
pub struct AdjointReport {
    pub kind: OperatorKind,
    pub block: usize,
    pub max_abs_diff: f64,
    pub agrees: bool,
}

/// Reports whether `X_φ* = X_{conj φ}` holds entrywise on the block. Holds
/// for Toeplitz blocks; for Hankel and H-Toeplitz blocks the outcome is
/// reported, not assumed.
pub fn adjoint_symbol_report(
    kind: OperatorKind,
    phi: &HarmonicSymbol,
    n: usize,
    w: FockWeight,
    tol: f64,
) -> Result<AdjointReport> {
    let adj = TruncatedOperator::build(kind, phi, n, n, w)?.adjoint();
    let conj = TruncatedOperator::build(kind, &phi.conjugate(), n, n, w)?;
    let max_abs_diff = adj.max_abs_diff(&conj)?;
    Ok(AdjointReport {
        kind,
        block: n,
        max_abs_diff,
        agrees: adj.approx_eq(&conj, tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::MixedMonomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn w(a: f64) -> FockWeight {
        FockWeight::new(a).unwrap()
    }

    fn sym(s: &str) -> HarmonicSymbol {
        HarmonicSymbol::parse(s).unwrap()
    }

    #[test]
    fn toeplitz_entry_examples() {
        let a = 2.7;
        assert!(close(toeplitz_entry(&sym("z"), 1, 0, w(a)), c(1.0 / a.sqrt(), 0.0), 1e-14));
        let phi = sym("(1+2i) + 3*z - conj(z)^2");
        for m in 0..10 {
            assert_eq!(toeplitz_entry(&phi, m, m, w(a)), c(1.0, 2.0));
        }
        let v = toeplitz_entry(&sym("3*conj(z)^2"), 0, 2, w(1.0));
        assert!(close(v, c(3.0 * 2f64.sqrt(), 0.0), 1e-14));
    }

    #[test]
    fn hankel_entry_examples() {
        let a = 1.9;
        assert!(close(hankel_entry(&sym("z"), 0, 0, w(a)), c(1.0 / a.sqrt(), 0.0), 1e-14));
        assert!(close(hankel_entry(&sym("z^2"), 1, 0, w(1.0)), c(2.0, 0.0), 1e-14));
        assert!(close(hankel_entry(&sym("z^5"), 2, 2, w(1.0)), c(20.0 * 3f64.sqrt(), 0.0), 1e-13));
        assert_eq!(hankel_entry(&sym("conj(z)^3"), 1, 1, w(1.0)), c(0.0, 0.0));
    }

    #[test]
    fn htoeplitz_entry_examples() {
        let a = 3.1;
        let v = htoeplitz_entry(&sym("(2-i)*conj(z)"), 0, 2, w(a));
        assert!(close(v, c(2.0, -1.0) / a.sqrt(), 1e-14));
        let v = htoeplitz_entry(&sym("(0.5+i)*z^2"), 0, 3, w(a));
        assert!(close(v, c(0.5, 1.0) * 2f64.sqrt() / a, 1e-14));
        for m in 0..5 {
            for j in 0..9 {
                assert_eq!(htoeplitz_entry(&HarmonicSymbol::zero(), m, j, w(a)), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn build_examples() {
        let t = TruncatedOperator::build(OperatorKind::Toeplitz, &sym("(2+i)"), 3, 3, w(1.5)).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                let expected = if m == n { c(2.0, 1.0) } else { c(0.0, 0.0) };
                assert_eq!(t.get(m, n), expected);
            }
        }
        let h = TruncatedOperator::build(OperatorKind::Hankel, &HarmonicSymbol::zero(), 5, 5, w(1.0)).unwrap();
        assert_eq!(h.frobenius_norm(), 0.0);
    }

    #[test]
    fn build_rejects_bad_sizes() {
        let phi = sym("z");
        assert!(matches!(
            TruncatedOperator::build(OperatorKind::Toeplitz, &phi, MAX_DIM + 1, 2, w(1.0)),
            Err(Error::SizeLimit { .. })
        ));
        assert!(TruncatedOperator::build(OperatorKind::Toeplitz, &phi, 0, 2, w(1.0)).is_err());
        assert!(TruncatedOperator::build(OperatorKind::Generic, &phi, 2, 2, w(1.0)).is_err());
    }

    #[test]
    fn indicator_pattern_for_anti_analytic_symbol() {
        // indicator of the 8x9 block for 2 conj(z) + 3 conj(z)^2 + conj(z)^3
        let expected: [[u8; 9]; 8] = [
            [0, 0, 1, 0, 1, 0, 1, 0, 0],
            [0, 0, 0, 0, 1, 0, 1, 0, 1],
            [0, 0, 0, 0, 0, 0, 1, 0, 1],
            [0, 0, 0, 0, 0, 0, 0, 0, 1],
            [0; 9],
            [0; 9],
            [0; 9],
            [0; 9],
        ];
        let s = TruncatedOperator::build(
            OperatorKind::HToeplitz,
            &sym("2*conj(z)^1+3*conj(z)^2+conj(z)^3"),
            8,
            9,
            w(1.0),
        )
        .unwrap();
        for (m, row) in expected.iter().enumerate() {
            for (j, &bit) in row.iter().enumerate() {
                assert_eq!(s.get(m, j) != c(0.0, 0.0), bit == 1, "entry ({m}, {j})");
            }
        }
    }

    #[test]
    fn dilation_examples() {
        let a = 1.7;
        // K e_2 = e_1 = sqrt(alpha) z
        let k = dilation_apply(&FockVector::basis(2, w(a)));
        let raw = k.monomials();
        assert_eq!((raw[0].p, raw[0].q), (1, 0));
        assert!(close(raw[0].coeff, c(a.sqrt(), 0.0), 1e-14));
        // K e_3 = sqrt(alpha²/2) conj(z)²
        let raw = dilation_apply(&FockVector::basis(3, w(a))).monomials();
        assert_eq!((raw[0].p, raw[0].q), (0, 2));
        assert!(close(raw[0].coeff, c((a * a / 2.0).sqrt(), 0.0), 1e-14));
        assert!(dilation_apply(&FockVector::zero(w(a))).is_empty());
    }

    #[test]
    fn dilation_adjoint_examples() {
        let a = 0.9;
        let e1 = MixedVector::from_fock(&FockVector::basis(1, w(a)));
        assert_eq!(dilation_adjoint_apply(&e1), FockVector::basis(2, w(a)));

        let conj_e2 = MixedVector::conj_basis(2, c(1.0, 0.0), w(a));
        assert_eq!(dilation_adjoint_apply(&conj_e2), FockVector::basis(3, w(a)));

        let zz = MixedVector::from_monomials([MixedMonomial::new(1, 1, c(1.0, 0.0))], w(a));
        let out = dilation_adjoint_apply(&zz);
        assert_eq!(out.len(), 1);
        assert!(close(out.get(0), c(1.0 / a, 0.0), 1e-14));
    }

    #[test]
    fn flip_examples() {
        let a = 1.3;
        let raw = flip_apply(&FockVector::basis(0, w(a))).monomials();
        assert_eq!((raw[0].p, raw[0].q), (0, 1));
        assert!(close(raw[0].coeff, c(a.sqrt(), 0.0), 1e-14));
        let raw = flip_apply(&FockVector::basis(2, w(a))).monomials();
        assert_eq!((raw[0].p, raw[0].q), (0, 3));
        assert!(close(raw[0].coeff, c((a * a * a / 6.0).sqrt(), 0.0), 1e-14));
        assert!(flip_apply(&FockVector::zero(w(a))).is_empty());
    }

    #[test]
    fn exact_apply_worked_example() {
        for a in [1.0, 2.0, 0.7] {
            let e2 = FockVector::basis(2, w(a));
            let s1 = apply_htoeplitz_exact(&sym("z^2"), &e2);
            // sqrt(alpha) z³ = sqrt(6/alpha²) e_3
            assert_eq!(s1.len(), 1);
            assert!(close(s1.get(3), c((6.0 / (a * a)).sqrt(), 0.0), 1e-14));

            let s2 = apply_htoeplitz_exact(&sym("conj(z)"), &e2);
            assert_eq!(s2.len(), 1);
            assert!(close(s2.get(0), c(1.0 / a.sqrt(), 0.0), 1e-14));

            // K e_3 = conj(e_2) and P(conj(z)^3) = 0
            let s3 = apply_htoeplitz_exact(&sym("conj(z)"), &s1);
            assert!(s3.is_empty());
        }
    }

    #[test]
    fn adjoint_examples() {
        let phi = sym("(1+i) + 2*z - (0.5-i)*z^3 + 3i*conj(z) + conj(z)^2");
        let t = TruncatedOperator::build(OperatorKind::Toeplitz, &phi, 12, 12, w(1.4)).unwrap();
        let tc = TruncatedOperator::build(OperatorKind::Toeplitz, &phi.conjugate(), 12, 12, w(1.4)).unwrap();
        assert!(t.adjoint().max_abs_diff(&tc).unwrap() <= 1e-12);
        assert_eq!(t.adjoint().adjoint().entries(), t.entries());

        let d = TruncatedOperator::from_matrix(
            OperatorKind::Generic,
            None,
            w(1.0),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.0)])),
        )
        .unwrap();
        assert_eq!(d.adjoint().entries(), d.entries());
    }

    #[test]
    fn adjoint_report_for_toeplitz_holds() {
        let phi = sym("z + 2*conj(z)^2 + (1+i)");
        let r = adjoint_symbol_report(OperatorKind::Toeplitz, &phi, 10, w(1.0), 1e-12).unwrap();
        assert!(r.agrees);
        // H_z* vs H_{conj z}: H_{conj z} vanishes while H_z does not
        let r = adjoint_symbol_report(OperatorKind::Hankel, &sym("z"), 4, w(1.0), 1e-12).unwrap();
        assert!(!r.agrees);
    }

    #[test]
    fn compose_and_commutator() {
        let phi = sym("z^2 + conj(z)");
        let a = TruncatedOperator::build(OperatorKind::HToeplitz, &phi, 10, 10, w(1.0)).unwrap();
        assert_eq!(a.commutator(&a).unwrap().frobenius_norm(), 0.0);
        let id = TruncatedOperator::identity(10, w(1.0)).unwrap();
        assert_eq!(a.compose(&id).unwrap().entries(), a.entries());
        let b = TruncatedOperator::build(OperatorKind::HToeplitz, &phi, 10, 7, w(1.0)).unwrap();
        assert!(matches!(b.compose(&b), Err(Error::DimensionMismatch(_))));
        assert!(a.commutator(&b).is_err());
    }

    #[test]
    fn composition_on_e2_through_stable_block() {
        for a in [1.0, 2.0] {
            let phi = sym("z^2");
            let psi = sym("conj(z)");
            let n = stable_truncation_size(&[&phi, &psi], 3, w(a)).unwrap();
            let sp = TruncatedOperator::build(OperatorKind::HToeplitz, &phi, n, n, w(a)).unwrap();
            let ss = TruncatedOperator::build(OperatorKind::HToeplitz, &psi, n, n, w(a)).unwrap();
            let out = sp.compose(&ss).unwrap().apply(&FockVector::basis(2, w(a))).unwrap();
            let expected = (2.0 / a.powi(3)).sqrt();
            assert!(close(out.get(2), c(expected, 0.0), 1e-12));
            assert!((out.norm_sqr() - expected * expected).abs() < 1e-12);
        }
    }

    #[test]
    fn column_extraction() {
        let phi = sym("2*conj(z)^1+3*conj(z)^2+conj(z)^3");
        let s = TruncatedOperator::build(OperatorKind::HToeplitz, &phi, 8, 9, w(1.0)).unwrap();
        let even = s.extract_even_columns().unwrap();
        let t = TruncatedOperator::build(OperatorKind::Toeplitz, &phi, 8, 5, w(1.0)).unwrap();
        assert_eq!(even.entries(), t.entries());

        let phi = sym("5*z+9*z^2+z^4");
        let s = TruncatedOperator::build(OperatorKind::HToeplitz, &phi, 8, 9, w(1.0)).unwrap();
        let odd = s.extract_odd_columns().unwrap();
        let h = TruncatedOperator::build(OperatorKind::Hankel, &phi, 8, 4, w(1.0)).unwrap();
        assert!(odd.max_abs_diff(&h).unwrap() <= 1e-12);

        let z = TruncatedOperator::build(OperatorKind::HToeplitz, &HarmonicSymbol::zero(), 4, 6, w(1.0)).unwrap();
        assert_eq!(z.extract_even_columns().unwrap().frobenius_norm(), 0.0);
        assert_eq!(z.extract_odd_columns().unwrap().frobenius_norm(), 0.0);

        assert!(matches!(t.extract_even_columns(), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn stable_size_examples() {
        let zb = sym("conj(z)");
        assert_eq!(stable_truncation_size(&[&zb], 4, w(1.0)).unwrap(), 12);
        let zero = HarmonicSymbol::zero();
        assert!(stable_truncation_size(&[&zero], 5, w(1.0)).is_ok());
        let phi = sym("z^2");
        let n = stable_truncation_size(&[&phi, &zb], 6, w(1.0)).unwrap();
        assert_eq!(n, 2 * (6 + 2 + 1 + 1));
        assert!(stable_truncation_size(&[&phi], 0, w(1.0)).is_err());
    }

    #[test]
    fn json_round_trip_and_csv() {
        let phi = sym("(1-i)*z + conj(z)^2");
        let s = TruncatedOperator::build(OperatorKind::HToeplitz, &phi, 3, 4, w(2.0)).unwrap();
        let back = TruncatedOperator::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);

        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 3);
        let first = csv.lines().next().unwrap();
        assert!(first.starts_with("\"0.0000000000000000e0,0.0000000000000000e0\",\""));

        let bad = r#"{"rows":2,"cols":2,"kind":"generic","alpha":1.0,"entries":[[[1,0]]]}"#;
        assert!(TruncatedOperator::from_json(bad).is_err());
    }
}
