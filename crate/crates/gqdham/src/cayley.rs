//! Generating sets, Cayley-graph windows and the case analysis of the
//! construction.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::abelian_core::{lattice_canonicalize, quotient_cyclic_order, KZElem, LatticeSubgroup};
use crate::error::{Error, Result};
use crate::gqd_group::{GqdElem, GqdGroup};

/// Default cap on the number of vertices in a window.
pub const WINDOW_BUDGET: usize = 1_000_000;

/// Symmetric generating set without the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSet {
    gens: Vec<GqdElem>,
}

impl GenSet {
    /// Validates `gens`: no identity, no repeats, closed under inverses,
    /// generating the whole group.
    pub fn new(g: &GqdGroup, gens: Vec<GqdElem>) -> Result<Self> {
        for x in &gens {
            if !g.contains(x) {
                return Err(Error::InvalidGenSet(format!("{x} is not an element of the group")));
            }
        }
        if gens.iter().any(|x| *x == g.identity()) {
            return Err(Error::InvalidGenSet("identity is not allowed".into()));
        }
        for (j, x) in gens.iter().enumerate() {
            if gens[..j].contains(x) {
                return Err(Error::InvalidGenSet(format!("{x} listed twice")));
            }
            if !gens.contains(&g.inv(x)) {
                return Err(Error::InvalidGenSet(format!("inverse of {x} missing")));
            }
        }
        if !g.generates(&gens)? {
            return Err(Error::InvalidGenSet("does not generate the group".into()));
        }
        Ok(GenSet { gens })
    }

    /// Adds missing inverses (each right after its element) and drops repeats
    /// and the identity before validating.
    pub fn symmetric_closure(g: &GqdGroup, gens: &[GqdElem]) -> Result<Self> {
        let mut out: Vec<GqdElem> = Vec::new();
        for x in gens {
            for y in [x.clone(), g.inv(x)] {
                if y != g.identity() && !out.contains(&y) {
                    out.push(y);
                }
            }
        }
        GenSet::new(g, out)
    }

    pub fn gens(&self) -> &[GqdElem] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, x: &GqdElem) -> Option<usize> {
        self.gens.iter().position(|y| y == x)
    }
}

/// Ball of the given radius around the identity in `Cay(G, S)`.
#[derive(Clone, Debug)]
pub struct CayleyWindow {
    pub group: GqdGroup,
    pub gens: GenSet,
    pub radius: u32,
    /// Sorted by normal form.
    pub vertices: Vec<GqdElem>,
    dist: HashMap<GqdElem, u32>,
}

/// Labelled edge `(g, g·s, s)` given by vertex and generator indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowEdge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

impl CayleyWindow {
    pub fn word_length(&self, g: &GqdElem) -> Option<u32> {
        self.dist.get(g).copied()
    }

    pub fn contains(&self, g: &GqdElem) -> bool {
        self.dist.contains_key(g)
    }

    pub fn index_of(&self, g: &GqdElem) -> Option<usize> {
        self.vertices.binary_search(g).ok()
    }

    pub fn has_edge(&self, u: &GqdElem, v: &GqdElem, label: usize) -> bool {
        self.contains(u)
            && self.contains(v)
            && self
                .gens
                .gens()
                .get(label)
                .is_some_and(|s| self.group.mul(u, s) == *v)
    }

    /// Vertices of word length at most `r`.
    pub fn ball(&self, r: u32) -> Vec<GqdElem> {
        self.vertices
            .iter()
            .filter(|v| self.dist[*v] <= r)
            .cloned()
            .collect()
    }

    pub fn edges(&self) -> Vec<WindowEdge> {
        let mut out = Vec::new();
        for (from, v) in self.vertices.iter().enumerate() {
            for (label, s) in self.gens.gens().iter().enumerate() {
                if let Some(to) = self.index_of(&self.group.mul(v, s)) {
                    out.push(WindowEdge { from, to, label });
                }
            }
        }
        out
    }

    /// Graphviz rendering: one undirected edge per pair `{g, gs}` labelled by
    /// the generator index; `highlight` edge groups are drawn bold.
    pub fn to_dot(&self, highlight: &[Vec<(GqdElem, GqdElem)>]) -> String {
        use std::fmt::Write as _;
        const COLORS: [&str; 6] = ["red", "blue", "darkgreen", "orange", "purple", "brown"];
        let key = |u: &GqdElem, v: &GqdElem| if u <= v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) };
        let mut marked = BTreeMap::new();
        for (j, edges) in highlight.iter().enumerate() {
            for (u, v) in edges {
                marked.insert(key(u, v), j);
            }
        }
        let mut s = String::from("graph cayley {\n");
        for v in &self.vertices {
            let _ = writeln!(s, "  \"{v}\" [dist={}];", self.dist[v]);
        }
        let mut done = std::collections::BTreeSet::new();
        for e in self.edges() {
            let (u, v) = (&self.vertices[e.from], &self.vertices[e.to]);
            if !done.insert(key(u, v)) {
                continue;
            }
            let _ = write!(s, "  \"{u}\" -- \"{v}\" [label={}", e.label);
            if let Some(&j) = marked.get(&key(u, v)) {
                let _ = write!(s, ", color={}, penwidth=3", COLORS[j % COLORS.len()]);
            }
            s.push_str("];\n");
        }
        s.push_str("}\n");
        s
    }

    /// Number of undirected edges, as rendered by [`CayleyWindow::to_dot`].
    pub fn undirected_edge_count(&self) -> usize {
        let mut done = std::collections::BTreeSet::new();
        for e in self.edges() {
            let (u, v) = (e.from.min(e.to), e.from.max(e.to));
            done.insert((u, v));
        }
        done.len()
    }
}

pub fn build_window(g: &GqdGroup, s: &GenSet, radius: i64) -> Result<CayleyWindow> {
    build_window_with_budget(g, s, radius, WINDOW_BUDGET)
}

pub fn build_window_with_budget(
    g: &GqdGroup,
    s: &GenSet,
    radius: i64,
    budget: usize,
) -> Result<CayleyWindow> {
    if radius < 0 {
        return Err(Error::Precondition("radius must be non-negative".into()));
    }
    let radius = radius as u32;
    let mut dist = HashMap::new();
    dist.insert(g.identity(), 0u32);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for x in s.gens() {
            let w = g.mul(&v, x);
            if !dist.contains_key(&w) {
                if dist.len() >= budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    let mut vertices: Vec<GqdElem> = dist.keys().cloned().collect();
    vertices.sort();
    Ok(CayleyWindow {
        group: g.clone(),
        gens: s.clone(),
        radius,
        vertices,
        dist,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum CaseTag {
    /// No generator in `K⟨a⟩`; the pivot `(s, t)` is absent when every
    /// `S ∖ {s, s⁻¹}` generates a finite group.
    Case1 { pivot: Option<(GqdElem, GqdElem)> },
    /// `⟨S ∩ K⟨a⟩⟩` finite.
    Case2i { s1: Vec<GqdElem>, s2: Vec<GqdElem> },
    /// `⟨S ∩ K⟨a⟩⟩` infinite.
    Case2ii { s1: Vec<GqdElem>, s2: Vec<GqdElem> },
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::Case1 { .. } => "case1",
            CaseTag::Case2i { .. } => "case2i",
            CaseTag::Case2ii { .. } => "case2ii",
        }
    }
}

pub fn classify_case(g: &GqdGroup, s: &GenSet) -> Result<CaseTag> {
    if s.len() < 3 {
        return Err(Error::Precondition("case analysis needs |S| >= 3".into()));
    }
    let (s1, s2): (Vec<GqdElem>, Vec<GqdElem>) = s.gens().iter().cloned().partition(|x| x.eps == 1);
    if s2.is_empty() {
        return Ok(CaseTag::Case1 {
            pivot: choose_pivot(g, s).ok(),
        });
    }
    let kz: Vec<KZElem> = s2.iter().map(|x| x.kz()).collect();
    let h = lattice_canonicalize(g.k_group(), &kz);
    Ok(if h.is_finite() {
        CaseTag::Case2i { s1, s2 }
    } else {
        CaseTag::Case2ii { s1, s2 }
    })
}

/// First `s` (in generator order) such that `S ∖ {s, s⁻¹}` still contains two
/// generators with distinct a-exponents; `t` is the first remaining generator.
pub fn choose_pivot(g: &GqdGroup, s: &GenSet) -> Result<(GqdElem, GqdElem)> {
    if s.gens().iter().any(|x| x.eps == 0) {
        return Err(Error::Precondition("pivot needs all generators outside K<a>".into()));
    }
    for x in s.gens() {
        let x_inv = g.inv(x);
        let rest: Vec<&GqdElem> = s.gens().iter().filter(|y| **y != *x && **y != x_inv).collect();
        let Some(t) = rest.first() else { continue };
        if rest.iter().any(|y| y.i != t.i) {
            return Ok((x.clone(), (*t).clone()));
        }
    }
    Err(Error::InvalidGenSet("no pivot leaves an infinite subgroup".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetLadder {
    /// `H ∩ K⟨a⟩` for `H = ⟨S ∖ {s, s⁻¹}⟩`.
    pub h_prime: LatticeSubgroup,
    /// `K⟨a⟩` is the disjoint union of `H'(ts)^ℓ`, `ℓ = 0..=m`.
    pub m: u64,
    pub ts: GqdElem,
    pub t: GqdElem,
}

pub fn coset_ladder(g: &GqdGroup, s: &GenSet, pivot: &GqdElem, t: &GqdElem) -> Result<CosetLadder> {
    let p_inv = g.inv(pivot);
    let rest: Vec<&GqdElem> = s
        .gens()
        .iter()
        .filter(|y| **y != *pivot && **y != p_inv)
        .collect();
    if !rest.contains(&t) || t.eps != 1 || pivot.eps != 1 {
        return Err(Error::Precondition("companion must be a remaining generator outside K<a>".into()));
    }
    let gens: Vec<KZElem> = rest.iter().map(|x| g.mul(t, x).kz()).collect();
    let h_prime = lattice_canonicalize(g.k_group(), &gens);
    let ts = g.mul(t, pivot);
    let full = LatticeSubgroup::full(g.k_group())?;
    let order = quotient_cyclic_order(g.k_group(), &h_prime, &ts.kz(), &full)?;
    if h_prime.index_in(g.k_group(), &full) != Some(order) {
        return Err(Error::Construction("ts does not generate K<a>/H'".into()));
    }
    Ok(CosetLadder {
        h_prime,
        m: order - 1,
        ts,
        t: t.clone(),
    })
}

/// Locates `x` in `H'(ts)^ℓ` (side 0) or `H'(ts)^ℓ t` (side 1).
pub fn coset_of(g: &GqdGroup, ladder: &CosetLadder, x: &GqdElem) -> Result<(u64, u8)> {
    let side = x.eps;
    let base = if side == 1 { g.mul(x, &g.inv(&ladder.t)) } else { x.clone() };
    let ts_inv = g.inv(&ladder.ts);
    let mut cur = base;
    for l in 0..=ladder.m {
        if ladder.h_prime.contains(g.k_group(), &cur.kz()) {
            return Ok((l, side));
        }
        cur = g.mul(&cur, &ts_inv);
    }
    Err(Error::Construction(format!("{x} not located in the coset ladder")))
}

/// Torsion census of a generating set: counts by order.
pub fn torsion_census(g: &GqdGroup, s: &GenSet) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for x in s.gens() {
        let key = match g.order(x) {
            crate::gqd_group::Order::Finite(n) => format!("order {n}"),
            crate::gqd_group::Order::Infinite => "infinite".to_string(),
        };
        *out.entry(key).or_insert(0) += 1;
    }
    out
}
