//! Harmonic polynomial symbols `φ(z) = Σ a_i z^i + Σ b_j conj(z)^j`.
//!
//! Only polynomial symbols are represented here. A non-constant harmonic
//! polynomial is unbounded on ℂ, so statements that need a bounded symbol
//! (norm bounds, Berezin bounds) only make sense for constants or for the
//! sampled symbols of [`crate::oracle`]. Truncated matrices stay well defined
//! for every polynomial symbol.
//!
//! Text grammar (whitespace is ignored):
//!
//! ```text
//! expr   := [sign] term (sign term)*
//! term   := coeff ['*' var] | var
//! var    := ('z' | 'conj(z)') ['^' integer]
//! coeff  := real ['i'] | 'i' | '(' [sign] real ['i'] [sign real ['i']] ')'
//! ```
//!
//! Examples: `5*z+9*z^2+z^4`, `2*conj(z)+3*conj(z)^2`, `(1-2i)*z^3 - 0.5`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Finite harmonic polynomial symbol. Stored coefficients are never zero and
/// the anti-analytic part has no index 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolJson", into = "SymbolJson")]
pub struct HarmonicSymbol {
    analytic: BTreeMap<usize, Complex64>,
    anti: BTreeMap<usize, Complex64>,
}

impl HarmonicSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_parts([(0, c)], [])
    }

    /// `c · z^i`.
    pub fn z_pow(i: usize, c: Complex64) -> Self {
        Self::from_parts([(i, c)], [])
    }

    /// `c · conj(z)^j`, folded into the constant when `j = 0`.
    pub fn conj_pow(j: usize, c: Complex64) -> Self {
        if j == 0 {
            Self::constant(c)
        } else {
            Self::from_parts([], [(j, c)])
        }
    }

    /// Builds from coefficient lists. Repeated indices add up, zeros are
    /// dropped, and an anti-analytic index 0 is folded into `a_0`.
    pub fn from_parts<A, B>(analytic: A, anti: B) -> Self
    where
        A: IntoIterator<Item = (usize, Complex64)>,
        B: IntoIterator<Item = (usize, Complex64)>,
    {
        let mut s = Self::zero();
        for (i, c) in analytic {
            *s.analytic.entry(i).or_default() += c;
        }
        for (j, c) in anti {
            if j == 0 {
                *s.analytic.entry(0).or_default() += c;
            } else {
                *s.anti.entry(j).or_default() += c;
            }
        }
        s.prune();
        s
    }

    fn prune(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        self.analytic.retain(|_, c| *c != zero);
        self.anti.retain(|_, c| *c != zero);
    }

    /// `a_i` (zero when absent).
    pub fn a(&self, i: usize) -> Complex64 {
        self.analytic.get(&i).copied().unwrap_or_default()
    }

    /// `b_j` (zero when absent; always zero for `j = 0`).
    pub fn b(&self, j: usize) -> Complex64 {
        self.anti.get(&j).copied().unwrap_or_default()
    }

    pub fn analytic(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.analytic.iter().map(|(&i, &c)| (i, c))
    }

    pub fn anti(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.anti.iter().map(|(&j, &c)| (j, c))
    }

    /// `d_a`, or -1 with no analytic part.
    pub fn analytic_degree(&self) -> i64 {
        self.analytic.keys().next_back().map_or(-1, |&i| i as i64)
    }

    /// `d_b`, or -1 with no anti-analytic part.
    pub fn anti_degree(&self) -> i64 {
        self.anti.keys().next_back().map_or(-1, |&j| j as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.analytic.is_empty() && self.anti.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.anti.is_empty() && self.analytic.keys().all(|&i| i == 0)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.analytic
            .values()
            .chain(self.anti.values())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// `φ(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let a: Complex64 = self.analytic.iter().map(|(&i, c)| c * z.powu(i as u32)).sum();
        let b: Complex64 = self.anti.iter().map(|(&j, c)| c * zb.powu(j as u32)).sum();
        a + b
    }

    /// `conj(φ)`: `conj(b_j)` moves to `z^j`, `conj(a_i)` to `conj(z)^i`, and
    /// `conj(a_0)` stays the constant.
    pub fn conjugate(&self) -> Self {
        Self::from_parts(
            self.anti
                .iter()
                .map(|(&j, c)| (j, c.conj()))
                .chain(self.analytic.get(&0).map(|c| (0, c.conj()))),
            self.analytic
                .iter()
                .filter(|(&i, _)| i > 0)
                .map(|(&i, c)| (i, c.conj())),
        )
    }

    /// `a·self + b·other`, coefficient-wise.
    pub fn scale_add(&self, other: &HarmonicSymbol, a: Complex64, b: Complex64) -> Self {
        Self::from_parts(
            self.analytic()
                .map(|(i, c)| (i, a * c))
                .chain(other.analytic().map(|(i, c)| (i, b * c))),
            self.anti()
                .map(|(j, c)| (j, a * c))
                .chain(other.anti().map(|(j, c)| (j, b * c))),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.scale_add(&Self::zero(), s, Complex64::new(0.0, 0.0))
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::new(text).parse()
    }

    /// Canonical text form: terms by increasing degree, analytic before
    /// anti-analytic at equal degree. Parses back to the same symbol.
    pub fn render(&self) -> String {
        let mut terms: Vec<(usize, bool, Complex64)> = self
            .analytic()
            .map(|(i, c)| (i, false, c))
            .chain(self.anti().map(|(j, c)| (j, true, c)))
            .collect();
        terms.sort_by_key(|&(d, anti, _)| (d, anti));
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (deg, anti, c)) in terms.into_iter().enumerate() {
            let coeff = render_coeff(c);
            if k > 0 && !coeff.starts_with('-') {
                out.push('+');
            }
            out.push_str(&coeff);
            if deg > 0 {
                out.push('*');
                out.push_str(if anti { "conj(z)" } else { "z" });
                out.push('^');
                out.push_str(&deg.to_string());
            }
        }
        out
    }
}

fn render_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        let sign = if c.im.is_sign_negative() { "" } else { "+" };
        format!("({}{}{}i)", c.re, sign, c.im)
    }
}

impl fmt::Display for HarmonicSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for HarmonicSymbol {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        Self::parse(s)
    }
}

/// JSON wire form: `{"analytic": [[i, re, im], ...], "anti": [[j, re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolJson {
    #[serde(default)]
    pub analytic: Vec<(usize, f64, f64)>,
    #[serde(default)]
    pub anti: Vec<(usize, f64, f64)>,
}

impl From<HarmonicSymbol> for SymbolJson {
    fn from(s: HarmonicSymbol) -> Self {
        Self {
            analytic: s.analytic().map(|(i, c)| (i, c.re, c.im)).collect(),
            anti: s.anti().map(|(j, c)| (j, c.re, c.im)).collect(),
        }
    }
}

impl TryFrom<SymbolJson> for HarmonicSymbol {
    type Error = String;
    fn try_from(j: SymbolJson) -> Result<Self, String> {
        if j.anti.iter().any(|&(k, _, _)| k == 0) {
            return Err("anti-analytic index 0 belongs in the analytic part".into());
        }
        let all = j.analytic.iter().chain(j.anti.iter());
        if all.clone().any(|&(_, re, im)| !re.is_finite() || !im.is_finite()) {
            return Err("coefficients must be finite".into());
        }
        Ok(Self::from_parts(
            j.analytic.into_iter().map(|(i, re, im)| (i, Complex64::new(re, im))),
            j.anti.into_iter().map(|(k, re, im)| (k, Complex64::new(re, im))),
        ))
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected '{}'", c as char)))
        }
    }

    fn unexpected(&mut self, what: &str) -> ParseError {
        self.skip_ws();
        match self.bytes.get(self.pos) {
            Some(&c) => ParseError::new(self.pos, format!("{what}, found '{}'", c as char)),
            None => ParseError::new(self.pos, format!("{what}, found end of input")),
        }
    }

    fn parse(mut self) -> Result<HarmonicSymbol, ParseError> {
        let mut analytic = Vec::new();
        let mut anti = Vec::new();
        if self.peek().is_none() {
            return Err(self.unexpected("expected a term"));
        }
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1.0
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1.0
                }
                None => break,
                _ if first => 1.0,
                _ => return Err(self.unexpected("expected '+' or '-'")),
            };
            first = false;
            let (c, var) = self.term()?;
            let c = c * sign;
            match var {
                None => analytic.push((0, c)),
                Some((false, k)) => analytic.push((k, c)),
                Some((true, k)) => anti.push((k, c)),
            }
        }
        Ok(HarmonicSymbol::from_parts(analytic, anti))
    }

    /// Returns the coefficient and `(is_conj, exponent)` of the variable part.
    fn term(&mut self) -> Result<(Complex64, Option<(bool, usize)>), ParseError> {
        if self.at_var() {
            let v = self.var()?;
            return Ok((Complex64::new(1.0, 0.0), Some(v)));
        }
        let c = self.coeff()?;
        if self.eat(b'*') {
            if !self.at_var() {
                return Err(self.unexpected("expected 'z' or 'conj(z)'"));
            }
            let v = self.var()?;
            return Ok((c, Some(v)));
        }
        Ok((c, None))
    }

    fn at_var(&mut self) -> bool {
        matches!(self.peek(), Some(b'z') | Some(b'c'))
    }

    fn var(&mut self) -> Result<(bool, usize), ParseError> {
        let start = self.pos;
        let conj = if self.eat(b'z') {
            false
        } else if self.src[self.pos..].starts_with("conj") {
            self.pos += 4;
            self.expect(b'(')?;
            self.expect(b'z')?;
            self.expect(b')')?;
            true
        } else {
            return Err(self.unexpected("expected 'z' or 'conj(z)'"));
        };
        let mut exp = 1usize;
        if self.eat(b'^') {
            let at = {
                self.skip_ws();
                self.pos
            };
            if self.peek() == Some(b'-') {
                return Err(ParseError::new(at, "negative exponents are not allowed"));
            }
            exp = self.integer()?;
            if conj && exp == 0 {
                return Err(ParseError::new(
                    start,
                    "conj(z)^0 is a constant; write it as a constant term",
                ));
            }
        }
        Ok((conj, exp))
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected("expected a non-negative integer exponent"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::new(start, "exponent out of range"))
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let b = self.bytes;
        let mut i = self.pos;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
            i += 1;
        }
        if i == start {
            return Err(self.unexpected("expected a number"));
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            let digits = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j > digits {
                i = j;
            }
        }
        self.pos = i;
        let v: f64 = self.src[start..i]
            .parse()
            .map_err(|_| ParseError::new(start, format!("invalid number '{}'", &self.src[start..i])))?;
        if !v.is_finite() {
            return Err(ParseError::new(start, "number out of range"));
        }
        Ok(v)
    }

    /// real with an optional imaginary unit suffix, or a bare `i`.
    fn signed_part(&mut self) -> Result<Complex64, ParseError> {
        if self.eat(b'i') {
            return Ok(Complex64::new(0.0, 1.0));
        }
        let v = self.real()?;
        if self.bytes.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            Ok(Complex64::new(0.0, v))
        } else {
            Ok(Complex64::new(v, 0.0))
        }
    }

    fn coeff(&mut self) -> Result<Complex64, ParseError> {
        if self.eat(b'(') {
            let mut sign = 1.0;
            if self.eat(b'-') {
                sign = -1.0;
            } else {
                self.eat(b'+');
            }
            let mut c = self.signed_part()? * sign;
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    c += self.signed_part()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    c -= self.signed_part()?;
                }
                _ => {}
            }
            self.expect(b')')?;
            return Ok(c);
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' || c == b'i' => self.signed_part(),
            _ => Err(self.unexpected("expected a coefficient, 'z' or 'conj(z)'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_graph_symbols() {
        let s = HarmonicSymbol::parse("2*conj(z)^1+3*conj(z)^2+conj(z)^3").unwrap();
        assert_eq!(s.anti().collect::<Vec<_>>(), vec![(1, c(2., 0.)), (2, c(3., 0.)), (3, c(1., 0.))]);
        assert_eq!(s.analytic().count(), 0);

        let s = HarmonicSymbol::parse("5*z+9*z^2+z^4").unwrap();
        assert_eq!(s.analytic().collect::<Vec<_>>(), vec![(1, c(5., 0.)), (2, c(9., 0.)), (4, c(1., 0.))]);
        assert_eq!((s.analytic_degree(), s.anti_degree()), (4, -1));
    }

    #[test]
    fn zero_coefficients_drop() {
        assert!(HarmonicSymbol::parse("0*z^5").unwrap().is_zero());
        assert!(HarmonicSymbol::parse("0").unwrap().is_zero());
        assert!(HarmonicSymbol::parse("z - z").unwrap().is_zero());
    }

    #[test]
    fn merges_and_parses_complex_literals() {
        let s = HarmonicSymbol::parse(" (1-2i)*z^3 - 0.5 + z^3 + 2i*conj(z) - i").unwrap();
        assert_eq!(s.a(3), c(2.0, -2.0));
        assert_eq!(s.a(0), c(-0.5, -1.0));
        assert_eq!(s.b(1), c(0.0, 2.0));
        assert_eq!(HarmonicSymbol::parse("z^0").unwrap().a(0), c(1.0, 0.0));
        assert_eq!(HarmonicSymbol::parse("1.5e-3*z").unwrap().a(1), c(1.5e-3, 0.0));
        assert_eq!(HarmonicSymbol::parse("-conj(z)").unwrap().b(1), c(-1.0, 0.0));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = HarmonicSymbol::parse("z^^2").unwrap_err();
        assert_eq!(e.position, 2);
        let e = HarmonicSymbol::parse("z^-1").unwrap_err();
        assert!(e.message.contains("negative"), "{e}");
        let e = HarmonicSymbol::parse("3*conj(z)^0").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(HarmonicSymbol::parse("").is_err());
        assert!(HarmonicSymbol::parse("2*").is_err());
        assert!(HarmonicSymbol::parse("z z").is_err());
        assert!(HarmonicSymbol::parse("conj(w)").is_err());
        assert!(HarmonicSymbol::parse("(1+2i").is_err());
    }

    #[test]
    fn conjugate_examples() {
        let z = HarmonicSymbol::parse("z").unwrap();
        assert_eq!(z.conjugate(), HarmonicSymbol::parse("conj(z)").unwrap());

        let s = HarmonicSymbol::parse("2*conj(z)+3*conj(z)^2+conj(z)^3").unwrap();
        assert_eq!(s.conjugate(), HarmonicSymbol::parse("2*z+3*z^2+z^3").unwrap());

        let k = HarmonicSymbol::constant(c(1.0, 1.0));
        assert_eq!(k.conjugate(), HarmonicSymbol::constant(c(1.0, -1.0)));
    }

    #[test]
    fn scale_add_examples() {
        let phi = HarmonicSymbol::parse("(1+i)*z^2 + 3*conj(z)").unwrap();
        assert!(phi.scale_add(&phi, c(1., 0.), c(-1., 0.)).is_zero());

        let z = HarmonicSymbol::parse("z").unwrap();
        let zb = HarmonicSymbol::parse("conj(z)").unwrap();
        let s = z.scale_add(&zb, c(2., 0.), c(3., 0.));
        assert_eq!(s, HarmonicSymbol::from_parts([(1, c(2., 0.))], [(1, c(3., 0.))]));

        let p = HarmonicSymbol::parse("5*z+9*z^2").unwrap();
        let q = HarmonicSymbol::parse("9*z^2").unwrap();
        assert_eq!(p.scale_add(&q, c(1., 0.), c(-1., 0.)), HarmonicSymbol::parse("5*z").unwrap());
    }

    #[test]
    fn render_is_canonical() {
        let s = HarmonicSymbol::parse("conj(z)^2 + (1-2i)*z^3 - 0.5 + 4*z^2 + 2i*conj(z)").unwrap();
        assert_eq!(s.render(), "-0.5+2i*conj(z)^1+4*z^2+1*conj(z)^2+(1-2i)*z^3");
        assert_eq!(HarmonicSymbol::zero().render(), "0");
        assert_eq!(HarmonicSymbol::parse(&s.render()).unwrap(), s);
    }

    #[test]
    fn json_form() {
        let s = HarmonicSymbol::parse("(1+2i) + 3*conj(z)^2").unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"analytic":[[0,1.0,2.0]],"anti":[[2,3.0,0.0]]}"#);
        let back: HarmonicSymbol = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<HarmonicSymbol>(r#"{"anti":[[0,1.0,0.0]]}"#).is_err());
    }

    #[test]
    fn eval_matches_definition() {
        let s = HarmonicSymbol::parse("1 + 2*z - i*conj(z)^2").unwrap();
        let z = c(0.3, -0.4);
        let direct = c(1., 0.) + c(2., 0.) * z - c(0., 1.) * z.conj() * z.conj();
        assert!((s.eval(z) - direct).norm() < 1e-15);
    }
}
