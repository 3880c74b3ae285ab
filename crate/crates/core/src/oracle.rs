//! Independent numeric ground truth: quadrature against `dλ_α`.
//!
//! With `u = α r²` the measure becomes `(1/2π) e^{-u} du dθ`, so an integral is
//! a uniform angular sum times a Gauss–Laguerre sum. The oracle evaluates
//! every function pointwise and builds its own basis normalization by direct
//! products, sharing no closed-form code with the operator engine.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{FockWeight, MixedVector};
use crate::operator::{OperatorKind, TruncatedOperator};
use crate::symbol::HarmonicSymbol;

/// Gauss–Legendre points used on each bounded radial segment.
const SEGMENT_POINTS: usize = 48;

/// A product rule: `angular` equispaced angles times radial nodes in `u`.
/// Radial weights already include the `e^{-u}` factor.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    angular: usize,
    nodes: Vec<(f64, f64)>,
    radial_degree: usize,
}

impl QuadratureRule {
    /// Pure Gauss–Laguerre radial rule with `radial_points` nodes, exact for
    /// polynomials in `u` up to degree `2·radial_points - 1`.
    pub fn new(angular: usize, radial_points: usize) -> Result<Self> {
        if angular == 0 || radial_points == 0 {
            return Err(Error::InvalidArgument(
                "quadrature rule needs at least one angle and one radial node".into(),
            ));
        }
        Ok(Self {
            angular,
            nodes: gauss_laguerre(radial_points),
            radial_degree: 2 * radial_points - 1,
        })
    }

    /// Exact for `z^p conj(z)^q` whenever `p + q <= 2·max_degree`.
    pub fn for_degree(max_degree: usize) -> Self {
        Self::new(2 * max_degree + 1, max_degree / 2 + 2).expect("counts are positive")
    }

    /// Composite radial rule for integrands that are smooth only between the
    /// breakpoints `u_breaks`: Gauss–Legendre on each bounded piece, shifted
    /// Gauss–Laguerre beyond the last one.
    pub fn with_breaks(angular: usize, tail_points: usize, u_breaks: &[f64]) -> Result<Self> {
        let mut base = Self::new(angular, tail_points)?;
        let mut breaks: Vec<f64> = u_breaks.iter().copied().filter(|&u| u > 0.0).collect();
        if breaks.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidArgument("radial breakpoints must be finite".into()));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let Some(&last) = breaks.last() else {
            return Ok(base);
        };
        let (gl_x, gl_w) = gauss_legendre(SEGMENT_POINTS);
        let mut nodes = Vec::new();
        let mut lo = 0.0;
        for &hi in &breaks {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, wt) in gl_x.iter().zip(&gl_w) {
                let u = mid + half * x;
                nodes.push((u, half * wt * (-u).exp()));
            }
            lo = hi;
        }
        let shift = (-last).exp();
        nodes.extend(base.nodes.iter().map(|&(t, wt)| (t + last, wt * shift)));
        base.nodes = nodes;
        base.radial_degree = base.radial_degree.min(2 * SEGMENT_POINTS - 1);
        Ok(base)
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    /// Polynomial degree in `u` integrated exactly by the radial part.
    pub fn radial_degree(&self) -> usize {
        self.radial_degree
    }

    /// `(u, weight)` pairs.
    pub fn radial_nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Same rule with both node counts doubled.
    pub fn refined(&self) -> Self {
        let n = self.radial_degree.div_ceil(2).max(1);
        Self::new(2 * self.angular, 2 * n).expect("counts are positive")
    }

    /// `∫ f dλ_α`. Per-radius partial sums may run in parallel; they are
    /// combined in node order, so the result is deterministic.
    pub fn integrate<F>(&self, w: FockWeight, f: F) -> Complex64
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let angles = self.angle_table();
        let partial: Vec<Complex64> = self
            .nodes
            .par_iter()
            .map(|&(u, wt)| {
                let r = (u / w.alpha()).sqrt();
                let ring: Complex64 = angles.iter().map(|&e| f(e * r)).sum();
                ring * wt
            })
            .collect();
        partial.into_iter().sum::<Complex64>() / self.angular as f64
    }

    fn angle_table(&self) -> Vec<Complex64> {
        (0..self.angular)
            .map(|a| Complex64::from_polar(1.0, 2.0 * PI * a as f64 / self.angular as f64))
            .collect()
    }

    fn require(&self, needed_angular: usize, needed_radial: usize) -> Result<()> {
        if self.angular < needed_angular || self.radial_degree < needed_radial {
            return Err(Error::DegreeExceedsRule {
                needed_angular,
                needed_radial,
                angular: self.angular,
                radial: self.radial_degree,
            });
        }
        Ok(())
    }
}

/// `ln |L_n(x)|`-safe evaluation: returns `(L_n, L_{n-1}, ln_scale)` with the
/// true values equal to the returned ones times `exp(ln_scale)`.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64, f64) {
    const BIG: f64 = 1e150;
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    let mut ln_scale = 0.0;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            ln_scale += BIG.ln();
        }
    }
    (cur, prev, ln_scale)
}

/// `n`-point Gauss–Laguerre nodes and weights for `∫₀^∞ h(u) e^{-u} du`.
///
/// Nodes start from the Golub–Welsch eigenvalues and are polished by Newton
/// steps on `L_n`; weights come from `x / ((n+1)² L_{n+1}(x)²)` evaluated in
/// log space, which keeps full relative accuracy for the tiny tail weights.
fn gauss_laguerre(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i.abs_diff(j) == 1 {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut roots: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    roots.sort_by(f64::total_cmp);
    let nf = n as f64;
    roots
        .into_iter()
        .map(|mut x| {
            for _ in 0..8 {
                let (ln, lnm1, _) = laguerre_pair(n, x);
                let deriv = nf * (ln - lnm1) / x;
                let step = ln / deriv;
                x -= step;
                if step.abs() <= 4.0 * f64::EPSILON * x {
                    break;
                }
            }
            let (ln, lnm1, ln_scale) = laguerre_pair(n, x);
            let lnp1 = ((2.0 * nf + 1.0 - x) * ln - nf * lnm1) / (nf + 1.0);
            let ln_w = x.ln() - 2.0 * (nf + 1.0).ln() - 2.0 * (lnp1.abs().ln() + ln_scale);
            (x, ln_w.exp())
        })
        .collect()
}

/// `m`-point Gauss–Legendre rule on `[-1, 1]` (Golub–Welsch).
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i.abs_diff(j) == 1 {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `∫ z^p conj(z)^q dλ_α = δ_{pq} p!/α^p`, by direct product.
pub fn moment(p: usize, q: usize, w: FockWeight) -> Complex64 {
    if p != q {
        return Complex64::default();
    }
    let v = (1..=p).fold(1.0, |acc, k| acc * k as f64 / w.alpha());
    Complex64::new(v, 0.0)
}

/// `sqrt(α^n / n!)` by direct product.
fn basis_scale(n: usize, w: FockWeight) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * (w.alpha() / k as f64).sqrt())
}

/// `e_n(z)`.
pub fn basis_value(n: usize, z: Complex64, w: FockWeight) -> Complex64 {
    z.powu(n as u32) * basis_scale(n, w)
}

/// `(K e_j)(z)`, `(J e_j)(z)` or `e_j(z)` depending on `kind`.
fn basis_image(kind: OperatorKind, j: usize, z: Complex64, w: FockWeight) -> Complex64 {
    match kind {
        OperatorKind::Hankel => basis_value(j + 1, z, w).conj(),
        OperatorKind::HToeplitz if j % 2 == 1 => basis_value(j.div_ceil(2), z, w).conj(),
        OperatorKind::HToeplitz => basis_value(j / 2, z, w),
        OperatorKind::Toeplitz | OperatorKind::Generic => basis_value(j, z, w),
    }
}

/// `⟨f, g⟩` for arbitrary pointwise functions.
pub fn quad_inner_fn<F, G>(f: F, g: G, rule: &QuadratureRule, w: FockWeight) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + Sync,
    G: Fn(Complex64) -> Complex64 + Sync,
{
    rule.integrate(w, |z| f(z) * g(z).conj())
}

fn eval_monomials(terms: &[(usize, usize, Complex64)], z: Complex64) -> Complex64 {
    let zc = z.conj();
    terms
        .iter()
        .map(|&(p, q, c)| c * z.powu(p as u32) * zc.powu(q as u32))
        .sum()
}

/// `⟨f, g⟩` for mixed polynomials, refusing rules that are not exact for
/// the integrand.
pub fn quad_inner_mixed(f: &MixedVector, g: &MixedVector, rule: &QuadratureRule) -> Result<Complex64> {
    let raw = |v: &MixedVector| -> Vec<(usize, usize, Complex64)> {
        v.monomials().into_iter().map(|m| (m.p, m.q, m.coeff)).collect()
    };
    let (fr, gr) = (raw(f), raw(g));
    let mut freq = 0usize;
    let mut total = 0usize;
    for &(p1, q1, _) in &fr {
        for &(p2, q2, _) in &gr {
            let k = (p1 + q2) as i64 - (q1 + p2) as i64;
            freq = freq.max(k.unsigned_abs() as usize);
            total = total.max(p1 + q1 + p2 + q2);
        }
    }
    rule.require(freq + 1, total.div_ceil(2))?;
    Ok(quad_inner_fn(
        |z| eval_monomials(&fr, z),
        |z| eval_monomials(&gr, z),
        rule,
        f.alpha(),
    ))
}

/// Components `⟨z^p conj(z)^q, e_m⟩` for `m < terms`.
pub fn project_by_quadrature(p: usize, q: usize, terms: usize, rule: &QuadratureRule, w: FockWeight) -> Result<Vec<Complex64>> {
    let top = terms.saturating_sub(1);
    rule.require(p.max(q + top) + 1, (p + q + top).div_ceil(2))?;
    Ok((0..terms)
        .map(|m| {
            quad_inner_fn(
                |z| z.powu(p as u32) * z.conj().powu(q as u32),
                |z| basis_value(m, z, w),
                rule,
                w,
            )
        })
        .collect())
}

/// A symbol known only through point evaluation.
#[derive(Clone)]
pub struct SampledSymbol {
    eval: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    sup_bound: Option<f64>,
    radial_breaks: Vec<f64>,
    degree: Option<usize>,
    label: String,
}

impl fmt::Debug for SampledSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledSymbol")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .field("radial_breaks", &self.radial_breaks)
            .field("degree", &self.degree)
            .finish()
    }
}

impl SampledSymbol {
    /// `radial_breaks` are radii where `eval` may fail to be smooth.
    pub fn new<F>(label: impl Into<String>, eval: F, sup_bound: Option<f64>, radial_breaks: Vec<f64>) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            sup_bound,
            radial_breaks,
            degree: None,
            label: label.into(),
        }
    }

    /// Pointwise evaluation of a harmonic polynomial. Bounded only when
    /// constant.
    pub fn from_harmonic(phi: &HarmonicSymbol) -> Self {
        let owned = phi.clone();
        let sup = phi.is_constant().then(|| phi.a(0).norm());
        let deg = phi.analytic_degree().max(phi.anti_degree()).max(0) as usize;
        let mut s = Self::new(phi.render(), move |z| owned.eval(z), sup, Vec::new());
        s.degree = Some(deg);
        s
    }

    pub fn constant(c: Complex64) -> Self {
        let mut s = Self::new(format!("{c}"), move |_| c, Some(c.norm()), Vec::new());
        s.degree = Some(0);
        s
    }

    /// `1` on `|z| <= radius`, `0` outside.
    pub fn indicator_disk(radius: f64) -> Self {
        let r2 = radius * radius;
        Self::new(
            format!("indicator(|z|<={radius})"),
            move |z: Complex64| {
                if z.norm_sqr() <= r2 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            },
            Some(1.0),
            vec![radius],
        )
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Polynomial degree, when the symbol is a polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn radial_breaks(&self) -> &[f64] {
        &self.radial_breaks
    }

    /// A rule suited to `⟨φ·(basis image), e_m⟩` for indices below `size`.
    pub fn default_rule(&self, size: usize, w: FockWeight) -> QuadratureRule {
        match self.degree {
            Some(d) => QuadratureRule::for_degree(2 * size + d + 2),
            None => {
                let breaks: Vec<f64> = self.radial_breaks.iter().map(|r| w.alpha() * r * r).collect();
                QuadratureRule::with_breaks(4 * size + 8, size + 32, &breaks).expect("counts are positive")
            }
        }
    }
}

/// Entry-by-entry quadrature of `⟨φ·(basis image of e_n), e_m⟩` for an
/// operator of the given kind. The result is a `generic` block.
pub fn build_kind_by_quadrature(
    kind: OperatorKind,
    phi: &SampledSymbol,
    rows: usize,
    cols: usize,
    rule: &QuadratureRule,
    w: FockWeight,
) -> Result<TruncatedOperator> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("block dimensions must be positive".into()));
    }
    if let Some(d) = phi.degree {
        let img = match kind {
            OperatorKind::Hankel => cols,
            OperatorKind::HToeplitz => cols.div_ceil(2),
            _ => cols,
        };
        let top = rows + img + d;
        rule.require(top + 1, top.div_ceil(2))?;
    }
    // node-major: each ring contributes Σ_θ φ(z) img_n(z) conj(e_m(z));
    // rings are summed in node order
    let angles = rule.angle_table();
    let rings: Vec<DMatrix<Complex64>> = rule
        .nodes
        .par_iter()
        .map(|&(u, wt)| {
            let r = (u / w.alpha()).sqrt();
            let mut acc = DMatrix::<Complex64>::zeros(rows, cols);
            for &e in &angles {
                let z = e * r;
                let f = phi.eval(z) * wt;
                if f == Complex64::default() {
                    continue;
                }
                let out: Vec<Complex64> = (0..rows).map(|m| basis_value(m, z, w).conj()).collect();
                for n in 0..cols {
                    let img = f * basis_image(kind, n, z, w);
                    for (m, o) in out.iter().enumerate() {
                        acc[(m, n)] += img * o;
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = DMatrix::<Complex64>::zeros(rows, cols);
    for ring in &rings {
        total += ring;
    }
    total /= Complex64::new(rule.angular as f64, 0.0);
    TruncatedOperator::from_matrix(OperatorKind::Generic, None, w, total)
}

/// `N x N` block of `T_φ` with entries `⟨φ e_n, e_m⟩` by quadrature.
pub fn build_operator_by_quadrature(
    phi: &SampledSymbol,
    n: usize,
    rule: &QuadratureRule,
    w: FockWeight,
) -> Result<TruncatedOperator> {
    build_kind_by_quadrature(OperatorKind::Toeplitz, phi, n, n, rule, w)
}

/// Largest `k` singular values, non-increasing.
pub fn singular_value_decay(a: &TruncatedOperator, k: usize) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "singular values need a square block, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if k > a.rows() {
        return Err(Error::InvalidArgument(format!(
            "asked for {k} singular values of a {0}x{0} block",
            a.rows()
        )));
    }
    let mut sv: Vec<f64> = a.entries().clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv.truncate(k);
    Ok(sv)
}
