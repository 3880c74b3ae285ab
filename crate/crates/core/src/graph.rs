//! Directed graphs whose adjacency matrix is the nonzero pattern of an
//! H-Toeplitz block, plus the offset-rule construction `W_n⟨x; y⟩`.
//!
//! Vertices are 1-based: vertex `v` corresponds to basis index `v - 1`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockWeight;
use crate::operator::htoeplitz_entry;
use crate::symbol::HarmonicSymbol;

/// Default relative threshold below which an entry counts as zero.
pub const DEFAULT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphOrigin {
    Symbol { symbol: String, eps: f64 },
    Params { xs: Vec<usize>, ys: Vec<usize> },
    Imported,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HGraph {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
    origin: GraphOrigin,
    /// Vertices that lost at least one arc to a target beyond `n`.
    clipped: BTreeSet<usize>,
}

/// Two graphs are equal when they have the same vertices and arcs.
impl PartialEq for HGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.arcs == other.arcs
    }
}

/// Offsets `⟨xs; ys⟩` read off a symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSet {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    /// `a_0 != 0`; offset 0 is then included in `xs`.
    pub has_zero_offset: bool,
}

impl ParamSet {
    /// `⟨2,4,6;∅⟩` style caption.
    pub fn caption(&self) -> String {
        let list = |v: &[usize]| {
            if v.is_empty() {
                "∅".to_string()
            } else {
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
            }
        };
        format!("⟨{};{}⟩", list(&self.xs), list(&self.ys))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub indegree: Vec<usize>,
    pub outdegree: Vec<usize>,
    pub loops: Vec<usize>,
    pub clipped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphDiff {
    pub only_first: Vec<(usize, usize)>,
    pub only_second: Vec<(usize, usize)>,
    pub shared: Vec<(usize, usize)>,
}

impl GraphDiff {
    pub fn is_empty(&self) -> bool {
        self.only_first.is_empty() && self.only_second.is_empty()
    }
}

fn check_vertices(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("a graph needs at least one vertex".into()));
    }
    Ok(())
}

fn validate_offsets(name: &str, v: &[usize], n: usize) -> Result<()> {
    if let Some(&bad) = v.iter().find(|&&x| x == 0 || x >= n) {
        return Err(Error::MalformedOffsets(format!(
            "{name} offset {bad} is outside 1..{}",
            n.saturating_sub(1)
        )));
    }
    if v.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::MalformedOffsets(format!("{name} offsets must be strictly increasing")));
    }
    Ok(())
}

impl HGraph {
    /// Arc `(i, j)` iff `|<S_φ e_{j-1}, e_{i-1}>| > eps · max|coefficient|`.
    pub fn from_symbol(phi: &HarmonicSymbol, n: usize, eps: f64, w: FockWeight) -> Result<Self> {
        check_vertices(n)?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("threshold must be positive, got {eps}")));
        }
        let cut = eps * phi.max_coeff_abs();
        let da = phi.analytic_degree().max(0) as usize;
        let db = phi.anti_degree().max(0) as usize;
        let mut arcs = BTreeSet::new();
        let mut clipped = BTreeSet::new();
        if !phi.is_zero() {
            for i in 1..=n {
                let m = i - 1;
                // Toeplitz columns end at 2(m + d_b), Hankel columns at 2(d_a - m) - 1
                let last = 2 * (m + db).max(da);
                for col in 0..=last {
                    if htoeplitz_entry(phi, m, col, w).norm() > cut {
                        if col < n {
                            arcs.insert((i, col + 1));
                        } else {
                            clipped.insert(i);
                        }
                    }
                }
            }
        }
        Ok(Self {
            n,
            arcs,
            origin: GraphOrigin::Symbol {
                symbol: phi.render(),
                eps,
            },
            clipped,
        })
    }

    /// Literal offset rule: `j = (2i - 1) + x_k`, or `i = (j + 1)/2 + y_l`
    /// with `j` odd. Targets beyond `n` are dropped and their source marked
    /// clipped.
    pub fn from_params(n: usize, xs: &[usize], ys: &[usize]) -> Result<Self> {
        check_vertices(n)?;
        validate_offsets("upper", xs, n)?;
        validate_offsets("lower", ys, n)?;
        let mut arcs = BTreeSet::new();
        let mut clipped = BTreeSet::new();
        let mut add = |i: usize, j: usize| {
            if j <= n {
                arcs.insert((i, j));
            } else {
                clipped.insert(i);
            }
        };
        for i in 1..=n {
            for &x in xs {
                add(i, 2 * i - 1 + x);
            }
            for &y in ys {
                if i > y {
                    add(i, 2 * (i - y) - 1);
                }
            }
        }
        Ok(Self {
            n,
            arcs,
            origin: GraphOrigin::Params {
                xs: xs.to_vec(),
                ys: ys.to_vec(),
            },
            clipped,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn origin(&self) -> &GraphOrigin {
        &self.origin
    }

    pub fn clipped(&self) -> &BTreeSet<usize> {
        &self.clipped
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.contains(&(i, j))
    }

    pub fn successors(&self, i: usize) -> Vec<usize> {
        self.arcs.range((i, 0)..(i + 1, 0)).map(|&(_, j)| j).collect()
    }

    /// `rows x cols` 0/1 matrix, row `i - 1` listing arcs out of `i`.
    pub fn indicator_matrix(&self, rows: usize, cols: usize) -> Vec<Vec<u8>> {
        (1..=rows)
            .map(|i| (1..=cols).map(|j| u8::from(self.has_arc(i, j))).collect())
            .collect()
    }

    pub fn degree_report(&self) -> DegreeReport {
        let mut indegree = vec![0; self.n];
        let mut outdegree = vec![0; self.n];
        let mut loops = Vec::new();
        for &(i, j) in &self.arcs {
            outdegree[i - 1] += 1;
            indegree[j - 1] += 1;
            if i == j {
                loops.push(i);
            }
        }
        DegreeReport {
            indegree,
            outdegree,
            loops,
            clipped: self.clipped.iter().copied().collect(),
        }
    }

    pub fn compare(&self, other: &Self) -> Result<GraphDiff> {
        if self.n != other.n {
            return Err(Error::VertexMismatch(self.n, other.n));
        }
        Ok(GraphDiff {
            only_first: self.arcs.difference(&other.arcs).copied().collect(),
            only_second: other.arcs.difference(&self.arcs).copied().collect(),
            shared: self.arcs.intersection(&other.arcs).copied().collect(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph W {\n");
        for v in 1..=self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (i, j) in &self.arcs {
            let _ = writeln!(out, "  {i} -> {j};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j\n");
        for (i, j) in &self.arcs {
            let _ = writeln!(out, "{i},{j}");
        }
        out
    }

    /// Reads the `i,j` arc list written by [`HGraph::to_csv`].
    pub fn from_csv(text: &str, n: usize) -> Result<Self> {
        check_vertices(n)?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "i,j" => {}
            _ => return Err(Error::Format("missing 'i,j' header".into())),
        }
        let mut arcs = BTreeSet::new();
        for (k, line) in lines.enumerate() {
            let parsed = line
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)));
            match parsed {
                Some((i, j)) if (1..=n).contains(&i) && (1..=n).contains(&j) => {
                    arcs.insert((i, j));
                }
                _ => return Err(Error::Format(format!("bad arc on data line {}: '{line}'", k + 1))),
            }
        }
        Ok(Self {
            n,
            arcs,
            origin: GraphOrigin::Imported,
            clipped: BTreeSet::new(),
        })
    }
}

/// Offsets `⟨xs; ys⟩` for a symbol: `2i - 1` per analytic `z^i` and `2j` per
/// `conj(z)^j` in `xs`, `i` per analytic `z^i` in `ys`.
pub fn symbol_to_params(phi: &HarmonicSymbol) -> ParamSet {
    let mut xs = BTreeSet::new();
    let mut ys = BTreeSet::new();
    let mut has_zero_offset = false;
    for (i, _) in phi.analytic() {
        if i == 0 {
            has_zero_offset = true;
            xs.insert(0);
        } else {
            xs.insert(2 * i - 1);
            ys.insert(i);
        }
    }
    for (j, _) in phi.anti() {
        xs.insert(2 * j);
    }
    ParamSet {
        xs: xs.into_iter().collect(),
        ys: ys.into_iter().collect(),
        has_zero_offset,
    }
}
