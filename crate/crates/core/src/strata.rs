//! Decorated stable graphs indexing boundary strata of r-spin moduli,
//! their automorphism counts, and the `M_{0,4}` evaluation of `μ₁`.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("r must be at least 2, got {0}")]
    InvalidRank(u32),
    #[error("invalid four-point type {marks:?} for r = {r}")]
    InvalidType { r: u32, marks: Vec<u32> },
    #[error("enumeration exceeded the cap of {0} graphs")]
    TooManyGraphs(usize),
    #[error("automorphism count overflows u128")]
    Overflow,
    #[error("unsupported genus {0} for enumeration")]
    UnsupportedGenus(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub v1: usize,
    pub v2: usize,
    /// Mark of the half-edge at `v1`.
    pub mplus: u32,
    /// Mark of the half-edge at `v2`.
    pub mminus: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tail {
    pub v: usize,
    pub m: u32,
    pub label: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecoratedGraph {
    /// Optional in JSON input; callers usually supply it separately.
    #[serde(default)]
    pub r: u32,
    /// Genus label of each vertex.
    pub vertices: Vec<u32>,
    pub edges: Vec<Edge>,
    pub tails: Vec<Tail>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadVertex { edge_or_tail: String, vertex: usize },
    MarkOutOfRange { mark: u32 },
    Disconnected,
    Unstable { vertex: usize },
    Decoration { edge: usize },
    Divisibility { vertex: usize },
}

impl DecoratedGraph {
    /// A single vertex of genus `genus` carrying tails `1..=n` with the given marks.
    pub fn single_vertex(r: u32, genus: u32, marks: &[u32]) -> Self {
        let tails = marks
            .iter()
            .enumerate()
            .map(|(i, &m)| Tail {
                v: 0,
                m,
                label: i as u32 + 1,
            })
            .collect();
        DecoratedGraph {
            r,
            vertices: vec![genus],
            edges: Vec::new(),
            tails,
        }
    }

    /// Number of half-edges (tails and edge ends) at `v`.
    pub fn valence(&self, v: usize) -> usize {
        let ends: usize = self
            .edges
            .iter()
            .map(|e| (e.v1 == v) as usize + (e.v2 == v) as usize)
            .sum();
        ends + self.tails.iter().filter(|t| t.v == v).count()
    }

    /// Marks of all half-edges at `v`.
    pub fn marks_at(&self, v: usize) -> Vec<u32> {
        let mut out: Vec<u32> = self.tails.iter().filter(|t| t.v == v).map(|t| t.m).collect();
        for e in &self.edges {
            if e.v1 == v {
                out.push(e.mplus);
            }
            if e.v2 == v {
                out.push(e.mminus);
            }
        }
        out
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.v1, e.v2);
        }
        uf.count()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for (v, g) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{v} [label=\"g={g}\"];");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  v{} -- v{} [taillabel=\"{}\", headlabel=\"{}\"];",
                e.v1, e.v2, e.mplus, e.mminus
            );
        }
        for t in &self.tails {
            let _ = writeln!(s, "  l{} [shape=plaintext, label=\"{}\"];", t.label, t.label);
            let _ = writeln!(s, "  v{} -- l{} [label=\"m={}\"];", t.v, t.label, t.m);
        }
        s.push_str("}\n");
        s
    }
}

/// `g = |E| - |V| + #components + Σ g(v)`.
pub fn graph_genus(g: &DecoratedGraph) -> u32 {
    let h1 = g.edges.len() as i64 - g.vertices.len() as i64 + g.components() as i64;
    (h1 + g.vertices.iter().map(|&x| x as i64).sum::<i64>()) as u32
}

/// Checks stability, edge decoration and vertex divisibility, reporting
/// every failure.
pub fn validate(g: &DecoratedGraph) -> Result<(), Vec<Violation>> {
    let r = g.r;
    let nv = g.vertices.len();
    let mut out = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        for v in [e.v1, e.v2] {
            if v >= nv {
                out.push(Violation::BadVertex {
                    edge_or_tail: format!("edge {i}"),
                    vertex: v,
                });
            }
        }
        for mark in [e.mplus, e.mminus] {
            if mark >= r {
                out.push(Violation::MarkOutOfRange { mark });
            }
        }
        if (e.mplus + e.mminus) % r != (r - 2) % r {
            out.push(Violation::Decoration { edge: i });
        }
    }
    for t in &g.tails {
        if t.v >= nv {
            out.push(Violation::BadVertex {
                edge_or_tail: format!("tail {}", t.label),
                vertex: t.v,
            });
        }
        if t.m >= r {
            out.push(Violation::MarkOutOfRange { mark: t.m });
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    if nv > 0 && g.components() != 1 {
        out.push(Violation::Disconnected);
    }
    for (v, &genus) in g.vertices.iter().enumerate() {
        if 2 * genus as i64 - 2 + g.valence(v) as i64 <= 0 {
            out.push(Violation::Unstable { vertex: v });
        }
        let sum: i64 = g.marks_at(v).iter().map(|&m| m as i64).sum();
        if (2 * genus as i64 - 2 - sum).rem_euclid(r as i64) != 0 {
            out.push(Violation::Divisibility { vertex: v });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// `d_e = gcd(m⁺ + 1, r)`.
pub fn edge_gcd(r: u32, e: &Edge) -> u32 {
    (e.mplus + 1).gcd(&r)
}

/// Order of the kernel of `μ_r^V → ∏ μ_{d_e}`, `(ζ_v) ↦ (ζ_{v1}/ζ_{v2})^{r/d_e}`
/// over non-loop edges.
///
/// Writing `ζ_v = exp(2πi k_v / r)`, the condition is `k_{v1} ≡ k_{v2} mod d_e`.
pub fn aut_order(g: &DecoratedGraph) -> Result<u128, StrataError> {
    if g.r < 2 {
        return Err(StrataError::InvalidRank(g.r));
    }
    let space = (g.r as f64).powi(g.vertices.len() as i32);
    if space <= 1e6 {
        Ok(aut_order_brute(g))
    } else {
        aut_order_counting(g)
    }
}

/// Direct enumeration of `(Z/r)^V`.
pub fn aut_order_brute(g: &DecoratedGraph) -> u128 {
    let r = g.r as usize;
    let nv = g.vertices.len();
    let conds: Vec<(usize, usize, usize)> = g
        .edges
        .iter()
        .filter(|e| e.v1 != e.v2)
        .map(|e| (e.v1, e.v2, edge_gcd(g.r, e) as usize))
        .collect();
    let mut k = vec![0usize; nv];
    let mut count = 0u128;
    loop {
        if conds.iter().all(|&(a, b, d)| (k[a] + r - k[b]).is_multiple_of(d)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == nv {
                return count;
            }
            k[i] += 1;
            if k[i] < r {
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

/// Counts the kernel prime by prime: modulo `p^e`, the congruence
/// `k_u ≡ k_v mod p^f` says the lowest `f` base-`p` digits agree, and digits
/// at different positions are independent. Digit `j` is therefore constant on
/// the components of the subgraph of edges with `v_p(d_e) > j`.
pub fn aut_order_counting(g: &DecoratedGraph) -> Result<u128, StrataError> {
    let nv = g.vertices.len();
    let mut total: u128 = 1;
    for (p, e) in factorize(g.r) {
        for j in 0..e {
            let mut uf = UnionFind::new(nv);
            for edge in g.edges.iter().filter(|x| x.v1 != x.v2) {
                if valuation(edge_gcd(g.r, edge), p) > j {
                    uf.union(edge.v1, edge.v2);
                }
            }
            let factor = (p as u128)
                .checked_pow(uf.count() as u32)
                .ok_or(StrataError::Overflow)?;
            total = total.checked_mul(factor).ok_or(StrataError::Overflow)?;
        }
    }
    Ok(total)
}

fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn valuation(mut n: u32, p: u32) -> u32 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// `D = ((r-2)(g-α) + Σm)/r` for `α` connected components.
pub fn virtual_dim(r: u32, genus: u32, marks: &[u32], components: u32) -> Rational {
    let sum: i64 = marks.iter().map(|&m| m as i64).sum();
    rat((r as i64 - 2) * (genus as i64 - components as i64) + sum, r as i64)
}

/// `r∫μ₁` on `M_{0,4}` from `r∫ψ_i = r∫δ = 1`:
/// `[Σ_i m_i(r-2-m_i) - Σ_{pairings} m₊(r-2-m₊)] / (2r²)` with
/// `m₊ ≡ -2-(m_i+m_j) mod r` in `[0, r-1]`.
pub fn m04_mu1_integral(r: u32, marks: [u32; 4]) -> Result<Rational, StrataError> {
    if r < 2 {
        return Err(StrataError::InvalidRank(r));
    }
    let invalid = || StrataError::InvalidType {
        r,
        marks: marks.to_vec(),
    };
    if marks.iter().any(|&m| m + 2 > r) {
        return Err(invalid());
    }
    let ri = r as i64;
    let sum: i64 = marks.iter().map(|&m| m as i64).sum();
    if (sum - (ri - 2)).rem_euclid(ri) != 0 {
        return Err(invalid());
    }
    let bracket = |m: i64| m * (ri - 2 - m);
    let mut total: i64 = marks.iter().map(|&m| bracket(m as i64)).sum();
    for (i, j) in [(0, 1), (0, 2), (0, 3)] {
        let mplus = (-2 - marks[i] as i64 - marks[j] as i64).rem_euclid(ri);
        total -= bracket(mplus);
    }
    Ok(rat(total, 2 * ri * ri))
}

/// Canonical encoding: minimum over vertex relabelings of
/// (genus labels, sorted oriented edges, tails sorted by label).
type CanonicalForm = (Vec<u32>, Vec<(usize, u32, usize, u32)>, Vec<(u32, usize, u32)>);

pub fn canonical_form(g: &DecoratedGraph) -> CanonicalForm {
    let nv = g.vertices.len();
    let mut best: Option<CanonicalForm> = None;
    let mut perm: Vec<usize> = (0..nv).collect();
    permute(&mut perm, 0, &mut |p| {
        // p[old] = new
        let mut vertices = vec![0; nv];
        for (old, &new) in p.iter().enumerate() {
            vertices[new] = g.vertices[old];
        }
        let mut edges: Vec<_> = g
            .edges
            .iter()
            .map(|e| {
                let a = (p[e.v1], e.mplus);
                let b = (p[e.v2], e.mminus);
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                (a.0, a.1, b.0, b.1)
            })
            .collect();
        edges.sort_unstable();
        let mut tails: Vec<_> = g.tails.iter().map(|t| (t.label, p[t.v], t.m)).collect();
        tails.sort_unstable();
        let form = (vertices, edges, tails);
        if best.as_ref().is_none_or(|b| form < *b) {
            best = Some(form);
        }
    });
    best.expect("at least one permutation")
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Rebuilds the graph with vertices ordered as in its canonical form.
pub fn canonicalize(g: &DecoratedGraph) -> DecoratedGraph {
    let (vertices, edges, tails) = canonical_form(g);
    DecoratedGraph {
        r: g.r,
        vertices,
        edges: edges
            .into_iter()
            .map(|(v1, mplus, v2, mminus)| Edge { v1, v2, mplus, mminus })
            .collect(),
        tails: tails.into_iter().map(|(label, v, m)| Tail { v, m, label }).collect(),
    }
}

/// All valid decorated stable graphs of genus `genus` with tails
/// `1..=n` of the given marks and at most `max_edges` edges, up to
/// isomorphism, in canonical form and sorted.
///
/// Built by repeatedly splitting vertices (adding one edge at a time);
/// every graph arises this way since contracting an edge of a valid graph
/// gives a valid graph. Fails once more than `cap` graphs are produced.
pub fn enumerate_boundary_graphs(
    r: u32,
    genus: u32,
    marks: &[u32],
    max_edges: usize,
    cap: usize,
) -> Result<Vec<DecoratedGraph>, StrataError> {
    if r < 2 {
        return Err(StrataError::InvalidRank(r));
    }
    if genus > 1 {
        return Err(StrataError::UnsupportedGenus(genus));
    }
    let root = DecoratedGraph::single_vertex(r, genus, marks);
    if validate(&root).is_err() {
        return Ok(Vec::new());
    }
    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    seen.insert(canonical_form(&root));
    let mut all = vec![canonicalize(&root)];
    let mut layer = vec![canonicalize(&root)];
    for _ in 0..max_edges {
        let mut next = Vec::new();
        for g in &layer {
            for child in degenerations(g) {
                if validate(&child).is_err() {
                    continue;
                }
                let form = canonical_form(&child);
                if seen.insert(form) {
                    let c = canonicalize(&child);
                    next.push(c.clone());
                    all.push(c);
                    if all.len() > cap {
                        return Err(StrataError::TooManyGraphs(cap));
                    }
                }
            }
        }
        layer = next;
    }
    all.sort_by_key(canonical_form);
    Ok(all)
}

/// Half-edge at a vertex: a tail, or one end of an edge (`false` = `v1` end).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Half {
    Tail(usize),
    End(usize, bool),
}

/// Every graph with one more edge that contracts to `g`, before validation.
fn degenerations(g: &DecoratedGraph) -> Vec<DecoratedGraph> {
    let r = g.r;
    let mut out = Vec::new();
    for v in 0..g.vertices.len() {
        let genus = g.vertices[v];
        // non-separating: a new loop at v
        if genus >= 1 {
            for mplus in 0..r {
                let mut h = g.clone();
                h.vertices[v] -= 1;
                h.edges.push(Edge {
                    v1: v,
                    v2: v,
                    mplus,
                    mminus: (2 * r - 2 - mplus) % r,
                });
                out.push(h);
            }
        }
        let halves: Vec<Half> = g
            .tails
            .iter()
            .enumerate()
            .filter(|(_, t)| t.v == v)
            .map(|(i, _)| Half::Tail(i))
            .chain(g.edges.iter().enumerate().flat_map(|(i, e)| {
                let mut ends = Vec::new();
                if e.v1 == v {
                    ends.push(Half::End(i, false));
                }
                if e.v2 == v {
                    ends.push(Half::End(i, true));
                }
                ends
            }))
            .collect();
        // separating: the halves in `mask` move to a new vertex
        for mask in 0u64..(1 << halves.len()) {
            for g_new in 0..=genus {
                for mplus in 0..r {
                    let mut h = g.clone();
                    let w = h.vertices.len();
                    h.vertices[v] = genus - g_new;
                    h.vertices.push(g_new);
                    for (idx, half) in halves.iter().enumerate() {
                        if mask >> idx & 1 == 0 {
                            continue;
                        }
                        match *half {
                            Half::Tail(i) => h.tails[i].v = w,
                            Half::End(i, false) => h.edges[i].v1 = w,
                            Half::End(i, true) => h.edges[i].v2 = w,
                        }
                    }
                    h.edges.push(Edge {
                        v1: v,
                        v2: w,
                        mplus,
                        mminus: (2 * r - 2 - mplus) % r,
                    });
                    out.push(h);
                }
            }
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::algebra::int;

    fn edge(v1: usize, v2: usize, mplus: u32, mminus: u32) -> Edge {
        Edge { v1, v2, mplus, mminus }
    }

    #[test]
    fn genus_examples() {
        let banana = DecoratedGraph {
            r: 2,
            vertices: vec![0, 0],
            edges: vec![edge(0, 1, 0, 0); 3],
            tails: vec![],
        };
        assert_eq!(graph_genus(&banana), 2);
        assert_eq!(graph_genus(&DecoratedGraph::single_vertex(3, 4, &[])), 4);
        let loop1 = DecoratedGraph {
            r: 2,
            vertices: vec![0],
            edges: vec![edge(0, 0, 0, 0)],
            tails: vec![],
        };
        assert_eq!(graph_genus(&loop1), 1);
    }

    #[test]
    fn validation_examples() {
        let g = DecoratedGraph::single_vertex(3, 0, &[1, 1, 1]);
        assert_eq!(validate(&g), Err(vec![Violation::Divisibility { vertex: 0 }]));
        let g = DecoratedGraph::single_vertex(3, 0, &[1, 0]);
        assert!(validate(&g).unwrap_err().contains(&Violation::Unstable { vertex: 0 }));
        let mut g = DecoratedGraph::single_vertex(5, 0, &[0, 0, 1, 2]);
        g.vertices.push(0);
        g.tails[2].v = 1;
        g.tails[3].v = 1;
        g.edges.push(edge(0, 1, 1, 2));
        // decoration holds; vertex 0 has marks 0,0,1: -3 ≢ 0 mod 5
        let errs = validate(&g).unwrap_err();
        assert!(!errs.iter().any(|e| matches!(e, Violation::Decoration { .. })));
    }

    #[test]
    fn aut_examples() {
        assert_eq!(aut_order(&DecoratedGraph::single_vertex(5, 0, &[0, 0, 1])).unwrap(), 5);
        let loop1 = DecoratedGraph {
            r: 4,
            vertices: vec![1],
            edges: vec![edge(0, 0, 0, 2)],
            tails: vec![],
        };
        assert_eq!(aut_order(&loop1).unwrap(), 4);
        let two = DecoratedGraph {
            r: 6,
            vertices: vec![0, 0],
            edges: vec![edge(0, 1, 0, 4)],
            tails: vec![],
        };
        assert_eq!(aut_order(&two).unwrap(), 36);
        let ramond = DecoratedGraph {
            r: 6,
            vertices: vec![0, 0],
            edges: vec![edge(0, 1, 5, 5)],
            tails: vec![],
        };
        assert_eq!(aut_order(&ramond).unwrap(), 6);
    }

    #[test]
    fn counting_matches_brute_force() {
        for r in [4u32, 6, 8, 12] {
            let g = DecoratedGraph {
                r,
                vertices: vec![0, 0, 0, 1],
                edges: vec![
                    edge(0, 1, 1, r - 3),
                    edge(1, 2, 3 % r, (2 * r - 5) % r),
                    edge(2, 3, 5 % r, (2 * r - 7) % r),
                    edge(3, 3, 0, r - 2),
                ],
                tails: vec![],
            };
            assert_eq!(aut_order_brute(&g), aut_order_counting(&g).unwrap(), "r = {r}");
        }
    }

    #[test]
    fn m04_examples() {
        assert_eq!(m04_mu1_integral(3, [1, 1, 1, 1]).unwrap(), rat(1, 3));
        assert_eq!(m04_mu1_integral(4, [2, 2, 1, 1]).unwrap(), rat(1, 4));
        assert_eq!(m04_mu1_integral(4, [1, 1, 0, 0]).unwrap(), int(0));
        assert!(m04_mu1_integral(4, [1, 1, 1, 0]).is_err());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(virtual_dim(3, 0, &[1, 1, 1, 1], 1), int(1));
        assert_eq!(virtual_dim(2, 5, &[0, 0], 1), int(0));
        assert_eq!(virtual_dim(5, 1, &[0], 1), int(0));
    }

    #[test]
    fn enumeration_examples() {
        let graphs = enumerate_boundary_graphs(3, 0, &[1, 1, 1, 1], 1, 1000).unwrap();
        assert_eq!(graphs.len(), 4);
        assert!(graphs
            .iter()
            .filter(|g| g.edges.len() == 1)
            .all(|g| (g.edges[0].mplus, g.edges[0].mminus) == (2, 2)));
        assert_eq!(enumerate_boundary_graphs(3, 0, &[1, 0, 0], 3, 1000).unwrap().len(), 1);
        let g1 = enumerate_boundary_graphs(2, 1, &[0], 1, 1000).unwrap();
        let loops: BTreeSet<(u32, u32)> = g1
            .iter()
            .flat_map(|g| g.edges.iter().map(|e| (e.mplus, e.mminus)))
            .collect();
        assert_eq!(g1.len(), 3);
        assert_eq!(loops, BTreeSet::from([(0, 0), (1, 1)]));
    }

    #[test]
    fn json_round_trip() {
        let g = enumerate_boundary_graphs(3, 0, &[1, 1, 1, 1], 1, 1000)
            .unwrap()
            .pop()
            .unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<DecoratedGraph>(&s).unwrap(), g);
        assert!(g.to_dot().starts_with("graph G {"));
    }
}
