//! Hamiltonian double rays and circles in two-ended GQD Cayley graphs.
//!
//! Everything is built from periodic embeddings of a twisted cylinder or a
//! grid: a table of images of one column period plus an element `τ` with
//! `f(n + L, m) = τ·f(n, m)`. Pulling back a coordinate ray through such an
//! embedding gives a group ray. Recursion passes to quotients `G/N` by finite
//! subgroups `N ≤ K`, represented by a [`Frame`].

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::abelian_core::{quotient_cyclic_order, KElem, KZElem, LatticeSubgroup};
use crate::cayley::GenSet;
use crate::error::{Error, Result};
use crate::gqd_group::{GqdElem, GqdGroup};
use crate::walls::{self, CoordDoubleRay, CoordGraph, CylinderParams, WallVertex};

/// Vertex cap for the finite path search.
pub const FINITE_PATH_BOUND: usize = 256;
const FINITE_PATH_NODES: u64 = 5_000_000;
/// Node budgets of the successive row-search passes.
const ROW_SEARCH_NODES: [u64; 2] = [5_000, 500_000];
const MAX_DEPTH: usize = 64;

/// Periodic spanning double ray `…, σ⁻¹m₀, …, m₀, …, m_{p−1}, σm₀, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoubleRay {
    pub motif: Vec<GqdElem>,
    pub period: GqdElem,
    /// `labels[j]` indexes the generator from vertex `j` to vertex `j + 1`.
    pub labels: Vec<usize>,
}

impl GroupDoubleRay {
    pub fn len(&self) -> usize {
        self.motif.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motif.is_empty()
    }

    pub fn vertex(&self, g: &GqdGroup, idx: i64) -> GqdElem {
        Frame::ambient(g).ray_vertex(self, idx)
    }

    /// Vertices with indices in `[lo, hi)`.
    pub fn expand(&self, g: &GqdGroup, lo: i64, hi: i64) -> Vec<GqdElem> {
        (lo..hi).map(|j| self.vertex(g, j)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamCircle {
    pub rays: [GroupDoubleRay; 2],
}

/// `G/N` for a finite `N ≤ K`; elements are kept with the least `k` in `k + N`.
#[derive(Clone, Debug)]
pub struct Frame {
    g: GqdGroup,
    kernel: Vec<KElem>,
}

impl Frame {
    pub fn ambient(g: &GqdGroup) -> Self {
        Frame {
            g: g.clone(),
            kernel: vec![g.k_group().zero()],
        }
    }

    /// `kernel` must be a subgroup of `K`.
    pub fn with_kernel(g: &GqdGroup, kernel: &[KElem]) -> Self {
        let mut kernel = g.k_group().closure(kernel);
        kernel.sort();
        Frame { g: g.clone(), kernel }
    }

    pub fn group(&self) -> &GqdGroup {
        &self.g
    }

    pub fn kernel(&self) -> &[KElem] {
        &self.kernel
    }

    pub fn canon(&self, x: &GqdElem) -> GqdElem {
        if self.kernel.len() == 1 {
            return x.clone();
        }
        let k = self
            .kernel
            .iter()
            .map(|n| self.g.k_group().add(&x.k, n))
            .min()
            .expect("kernel contains zero");
        GqdElem::new(k, x.i, x.eps)
    }

    pub fn identity(&self) -> GqdElem {
        self.g.identity()
    }

    pub fn mul(&self, x: &GqdElem, y: &GqdElem) -> GqdElem {
        self.canon(&self.g.mul(x, y))
    }

    pub fn inv(&self, x: &GqdElem) -> GqdElem {
        self.canon(&self.g.inv(x))
    }

    pub fn pow(&self, x: &GqdElem, n: i64) -> GqdElem {
        self.canon(&self.g.pow(x, n))
    }

    /// Lattice generated by `gens` together with the kernel.
    pub fn lattice(&self, gens: &[KZElem]) -> LatticeSubgroup {
        let mut all: Vec<KZElem> = self.kernel.iter().map(|k| KZElem::new(k.clone(), 0)).collect();
        all.extend_from_slice(gens);
        crate::abelian_core::lattice_canonicalize(self.g.k_group(), &all)
    }

    pub fn full_lattice(&self) -> Result<LatticeSubgroup> {
        LatticeSubgroup::full(self.g.k_group())
    }

    pub fn ray_vertex(&self, r: &GroupDoubleRay, idx: i64) -> GqdElem {
        let p = r.motif.len() as i64;
        let (q, j) = (idx.div_euclid(p), idx.rem_euclid(p));
        self.mul(&self.pow(&r.period, q), &r.motif[j as usize])
    }

    /// Key of the coset `⟨σ⟩N·x`; `lat` is the lattice of `⟨σ⟩N`.
    fn orbit_key(&self, lat: &LatticeSubgroup, x: &GqdElem) -> (u8, KZElem) {
        (x.eps, lat.coset_rep(self.g.k_group(), &x.kz()))
    }

    fn label_of(&self, gens: &[GqdElem], from: &GqdElem, to: &GqdElem) -> Option<usize> {
        let d = self.mul(&self.inv(from), to);
        gens.iter().position(|s| *s == d)
    }
}

/// Periodic embedding of a cylinder or grid: `f(n, m) = τ^q · table[m][r]`
/// for `n = qL + r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderEmbedding {
    pub graph: CoordGraph,
    pub table: Vec<Vec<GqdElem>>,
    pub tau: GqdElem,
}

impl CylinderEmbedding {
    pub fn column_period(&self) -> i64 {
        self.table[0].len() as i64
    }

    fn at(&self, frame: &Frame, v: WallVertex) -> GqdElem {
        let l = self.column_period();
        let (q, r) = (v.n.div_euclid(l), v.n.rem_euclid(l));
        frame.mul(&frame.pow(&self.tau, q), &self.table[v.m as usize][r as usize])
    }

    pub fn vertex_map(&self, g: &GqdGroup, v: WallVertex) -> GqdElem {
        self.at(&Frame::ambient(g), v)
    }

    /// Row `m` as a double ray of period `τ`.
    pub fn row_ray(&self, g: &GqdGroup, gens: &[GqdElem], m: usize) -> Result<GroupDoubleRay> {
        let frame = Frame::ambient(g);
        ray_from_vertices(&frame, gens, self.table[m].clone(), self.tau.clone())
    }

    /// Adjacent coordinates map to `S`-adjacent elements; images are distinct
    /// over three column periods.
    fn check(&self, frame: &Frame, gens: &[GqdElem]) -> Result<()> {
        let h = self.graph.height();
        if self.table.len() as i64 != h || self.table.iter().any(|r| r.len() as i64 != self.column_period()) {
            return Err(Error::Construction("embedding table has the wrong shape".into()));
        }
        let l = self.column_period();
        for n in 0..l {
            for m in 0..h {
                let u = walls::WallVertex::new(n, m);
                let fu = self.at(frame, u);
                for (v, _) in self.graph.neighbors(u) {
                    if frame.label_of(gens, &fu, &self.at(frame, v)).is_none() {
                        return Err(Error::Construction(format!(
                            "embedding edge ({},{})-({},{}) is not a generator step",
                            u.n, u.m, v.n, v.m
                        )));
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        for n in -l..2 * l {
            for m in 0..h {
                if !seen.insert(self.at(frame, WallVertex::new(n, m))) {
                    return Err(Error::Construction("embedding is not injective".into()));
                }
            }
        }
        Ok(())
    }

    /// Pulls a coordinate ray back to the group.
    fn pull_back(&self, frame: &Frame, gens: &[GqdElem], ray: &CoordDoubleRay) -> Result<GroupDoubleRay> {
        let l = self.column_period();
        let c = l / gcd(l, ray.shift.abs());
        let rep = ray.repeated(c as usize);
        let period = frame.pow(&self.tau, rep.shift / l);
        let motif = rep.motif.iter().map(|v| self.at(frame, *v)).collect();
        ray_from_vertices(frame, gens, motif, period)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reads labels off consecutive motif vertices.
fn ray_from_vertices(
    frame: &Frame,
    gens: &[GqdElem],
    motif: Vec<GqdElem>,
    period: GqdElem,
) -> Result<GroupDoubleRay> {
    if motif.is_empty() {
        return Err(Error::Construction("empty motif".into()));
    }
    let p = motif.len();
    let mut labels = Vec::with_capacity(p);
    for j in 0..p {
        let next = if j + 1 < p {
            motif[j + 1].clone()
        } else {
            frame.mul(&period, &motif[0])
        };
        let lab = frame
            .label_of(gens, &motif[j], &next)
            .ok_or_else(|| Error::Construction(format!("motif step {j} is not a generator")))?;
        labels.push(lab);
    }
    Ok(GroupDoubleRay { motif, period, labels })
}

/// One row of the Case 1 cylinder: vertices `W(n), n ≡ parity`, are joined
/// by `s`-edges to the next row. Each 2-path `g, gt₁, gt₁t₂` starting there is
/// replaced by `gs, gst₂, gt₁t₂s`, which closes a 6-cycle with the rungs.
pub fn next_row(
    g: &GqdGroup,
    gens: &[GqdElem],
    r: &GroupDoubleRay,
    s: &GqdElem,
    parity: usize,
) -> Result<GroupDoubleRay> {
    next_row_in(&Frame::ambient(g), gens, r, s, parity)
}

fn next_row_in(
    frame: &Frame,
    gens: &[GqdElem],
    r: &GroupDoubleRay,
    s: &GqdElem,
    parity: usize,
) -> Result<GroupDoubleRay> {
    let p = r.motif.len();
    if !p.is_multiple_of(2) || s.eps != 1 {
        return Err(Error::Precondition("row needs even period and a rung outside K<a>".into()));
    }
    let lab = |n: i64| &gens[r.labels[n.rem_euclid(p as i64) as usize]];
    let mut motif = Vec::with_capacity(p);
    let mut labels = Vec::with_capacity(p);
    for n in 0..p as i64 {
        if n.rem_euclid(2) as usize == parity % 2 {
            motif.push(frame.mul(&frame.ray_vertex(r, n), s));
            labels.push(r.labels[(n + 1).rem_euclid(p as i64) as usize]);
        } else {
            let base = frame.mul(&frame.ray_vertex(r, n - 1), s);
            motif.push(frame.mul(&base, lab(n)));
            labels.push(r.labels[(n - 1).rem_euclid(p as i64) as usize]);
        }
    }
    let out = GroupDoubleRay {
        motif,
        period: r.period.clone(),
        labels,
    };
    for j in 0..p as i64 {
        let (u, v) = (frame.ray_vertex(&out, j), frame.ray_vertex(&out, j + 1));
        if frame.mul(&u, &gens[out.labels[j as usize]]) != v {
            return Err(Error::Construction("6-cycle step produced a non-edge".into()));
        }
    }
    Ok(out)
}

enum Plan {
    Ray(GroupDoubleRay),
    Embedding(CylinderEmbedding),
}

/// Symmetric, identity-free, duplicate-free generators of `G/N`.
fn frame_gens(frame: &Frame, xs: &[GqdElem]) -> Vec<GqdElem> {
    let mut out: Vec<GqdElem> = Vec::new();
    for x in xs {
        let c = frame.canon(x);
        if c != frame.identity() && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

pub fn hamiltonian_double_ray(g: &GqdGroup, s: &GenSet) -> Result<GroupDoubleRay> {
    let frame = Frame::ambient(g);
    ham_ray_in(&frame, s.gens(), 0)
}

pub fn hamiltonian_circle(g: &GqdGroup, s: &GenSet) -> Result<HamCircle> {
    if s.len() < 3 {
        return Err(Error::Precondition("degree < 3: no Hamiltonian circle".into()));
    }
    let frame = Frame::ambient(g);
    let emb = match plan(&frame, s.gens(), 0, true)? {
        Plan::Embedding(e) => e,
        Plan::Ray(_) => return Err(Error::Construction("circle needs at least two rows".into())),
    };
    let (r1, r2) = match emb.graph {
        CoordGraph::Cylinder { k, l } => walls::cylinder_two_rays(CylinderParams::new(k, l)?)?,
        CoordGraph::Grid { height } => walls::grid_two_rays(height)?,
        CoordGraph::Wall { .. } => unreachable!("embeddings are never plain walls"),
    };
    Ok(HamCircle {
        rays: [
            emb.pull_back(&frame, s.gens(), &r1)?,
            emb.pull_back(&frame, s.gens(), &r2)?,
        ],
    })
}

fn ham_ray_in(frame: &Frame, gens: &[GqdElem], depth: usize) -> Result<GroupDoubleRay> {
    match plan(frame, gens, depth, false)? {
        Plan::Ray(r) => Ok(r),
        Plan::Embedding(emb) => {
            let coord = match emb.graph {
                CoordGraph::Cylinder { k, l } => walls::cylinder_double_ray(CylinderParams::new(k, l)?)?,
                CoordGraph::Grid { height } => walls::grid_double_ray(height)?,
                CoordGraph::Wall { .. } => unreachable!("embeddings are never plain walls"),
            };
            emb.pull_back(frame, gens, &coord)
        }
    }
}

fn plan(frame: &Frame, gens: &[GqdElem], depth: usize, circle: bool) -> Result<Plan> {
    if depth > MAX_DEPTH {
        return Err(Error::Construction("recursion too deep".into()));
    }
    let s2: Vec<GqdElem> = gens.iter().filter(|x| x.eps == 0).cloned().collect();
    let s1: Vec<GqdElem> = gens.iter().filter(|x| x.eps == 1).cloned().collect();
    if s1.is_empty() {
        return Err(Error::InvalidGenSet("no generator outside K<a>".into()));
    }
    if s2.is_empty() {
        return case1(frame, gens, circle);
    }
    let kz: Vec<KZElem> = s2.iter().map(|x| x.kz()).collect();
    let h = frame.lattice(&kz);
    if h.is_finite() {
        case2i(frame, gens, &s1, &s2, &h, depth).map(Plan::Embedding)
    } else {
        case2ii(frame, gens, &s1, &s2, &h).map(Plan::Embedding)
    }
}

/// Candidate lines `(t, u)`: pairs of generators with distinct a-exponents,
/// those avoiding a pivot first.
fn candidate_lines(frame: &Frame, gens: &[GqdElem]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let push = |t: usize, u: usize, out: &mut Vec<(usize, usize)>| {
        if t != u && gens[t].i != gens[u].i && !out.contains(&(t, u)) {
            out.push((t, u));
        }
    };
    for p in gens {
        let p_inv = frame.inv(p);
        let rest: Vec<usize> = (0..gens.len()).filter(|&j| gens[j] != *p && gens[j] != p_inv).collect();
        for &t in &rest {
            for &u in &rest {
                push(t, u, &mut out);
            }
        }
    }
    for t in 0..gens.len() {
        for u in 0..gens.len() {
            push(t, u, &mut out);
        }
    }
    out
}

/// Directed Hamiltonian cycle through vertex 0 of the digraph `next`;
/// returns the out-edge index taken at each step.
fn directed_ham_cycle(next: &[Vec<usize>], budget: u64) -> Option<Vec<usize>> {
    let n = next.len();
    let mut free_in = vec![0usize; n];
    for (v, out) in next.iter().enumerate() {
        let mut seen = HashSet::new();
        for &w in out {
            if w != v && seen.insert(w) {
                free_in[w] += 1;
            }
        }
    }
    struct St<'a> {
        next: &'a [Vec<usize>],
        visited: Vec<bool>,
        free_in: Vec<usize>,
        choices: Vec<usize>,
        nodes: u64,
        budget: u64,
    }
    fn leave(st: &mut St, v: usize, delta: isize) {
        let mut seen = HashSet::new();
        for &w in &st.next[v] {
            if w != v && seen.insert(w) {
                st.free_in[w] = (st.free_in[w] as isize + delta) as usize;
            }
        }
    }
    fn go(st: &mut St, v: usize, depth: usize) -> bool {
        let n = st.next.len();
        if depth == n {
            if let Some(j) = st.next[v].iter().position(|&w| w == 0) {
                st.choices.push(j);
                return true;
            }
            return false;
        }
        st.nodes += 1;
        if st.nodes > st.budget {
            return false;
        }
        // an unvisited vertex that can only be entered from `v` must come next
        let stuck: Vec<usize> = (1..n).filter(|&y| !st.visited[y] && st.free_in[y] == 0).collect();
        if stuck.len() > 1 || stuck.iter().any(|y| !st.next[v].contains(y)) {
            return false;
        }
        let mut cand: Vec<(usize, usize, usize)> = Vec::new();
        for (j, &w) in st.next[v].iter().enumerate() {
            if w != 0 && !st.visited[w] && !cand.iter().any(|c| c.2 == w) && (stuck.is_empty() || stuck[0] == w) {
                let onward = st.next[w].iter().filter(|&&x| !st.visited[x]).count();
                cand.push((onward, j, w));
            }
        }
        cand.sort_unstable();
        for (_, j, w) in cand {
            st.visited[w] = true;
            leave(st, w, -1);
            st.choices.push(j);
            if go(st, w, depth + 1) {
                return true;
            }
            st.choices.pop();
            leave(st, w, 1);
            st.visited[w] = false;
        }
        false
    }
    let mut st = St {
        next,
        visited: vec![false; n],
        free_in,
        choices: Vec::new(),
        nodes: 0,
        budget,
    };
    st.visited[0] = true;
    leave(&mut st, 0, -1);
    go(&mut st, 0, 1).then_some(st.choices)
}

/// `l` with `w(n) = w₀(n + l)`, if `w` runs along the line `w₀`.
fn twist(frame: &Frame, w0: &GroupDoubleRay, w: &GroupDoubleRay) -> Option<i64> {
    let sigma = &w0.period;
    for r in 0..2i64 {
        let d = frame.mul(&w.motif[0], &frame.inv(&w0.motif[r as usize]));
        if d.eps != 0 || d.i % sigma.i != 0 {
            continue;
        }
        let q = d.i / sigma.i;
        if frame.pow(sigma, q) != d {
            continue;
        }
        let l = 2 * q + r;
        if frame.ray_vertex(w0, l + 1) == w.motif[1] {
            return Some(l);
        }
    }
    None
}

/// Stacks translates of the line `row0` into a twisted cylinder. A row is
/// determined by the coset `⟨σ⟩N·v` of its rung vertex `v`, and passing to the
/// next row along `x` translates that coset by a fixed amount, so the rows
/// are found as a directed Hamiltonian cycle on `(K ⊕ Z)/⟨σ⟩N`.
fn row_cylinder(
    frame: &Frame,
    gens: &[GqdElem],
    row0: GroupDoubleRay,
    lat: &LatticeSubgroup,
    rows: usize,
    budget: u64,
) -> Option<CylinderEmbedding> {
    let kg = frame.group().k_group();
    let key = |x: &GqdElem| lat.coset_rep(kg, &x.kz());
    let zero = key(&frame.identity());
    let mut deltas: Vec<(KZElem, usize)> = Vec::new();
    for (j, x) in gens.iter().enumerate() {
        let Ok(r1) = next_row_in(frame, gens, &row0, x, 0) else { continue };
        let d = key(&r1.motif[1]);
        if d != zero && !deltas.iter().any(|(e, _)| *e == d) {
            deltas.push((d, j));
        }
    }
    let mut states = vec![zero.clone()];
    let mut index: HashMap<KZElem, usize> = HashMap::from([(zero, 0)]);
    let mut next = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut out = Vec::new();
        for (d, _) in &deltas {
            let y = lat.coset_rep(kg, &kg.kz_add(&states[i], d));
            let id = match index.get(&y) {
                Some(&id) => id,
                None => {
                    states.push(y.clone());
                    index.insert(y, states.len() - 1);
                    states.len() - 1
                }
            };
            out.push(id);
        }
        next.push(out);
        i += 1;
        if states.len() > rows {
            return None;
        }
    }
    if states.len() != rows {
        return None;
    }
    let choices = directed_ham_cycle(&next, budget)?;
    let mut found = vec![row0];
    for (step, &c) in choices.iter().enumerate() {
        let x = &gens[deltas[c].1];
        let r = next_row_in(frame, gens, found.last()?, x, step % 2).ok()?;
        found.push(r);
    }
    let closing = found.pop()?;
    let mut orbits = HashSet::new();
    for w in &found {
        for v in &w.motif {
            if !orbits.insert(frame.orbit_key(lat, v)) {
                return None;
            }
        }
    }
    let l = twist(frame, &found[0], &closing)?;
    let sigma = found[0].period.clone();
    let (table, tau, l) = if l >= 0 {
        (found.iter().map(|w| w.motif.clone()).collect(), sigma, l)
    } else {
        let table = found
            .iter()
            .map(|w| vec![w.motif[0].clone(), frame.ray_vertex(w, -1)])
            .collect();
        (table, frame.inv(&sigma), -l)
    };
    let emb = CylinderEmbedding {
        graph: CoordGraph::cylinder(CylinderParams::new(rows as i64, l).ok()?),
        table,
        tau,
    };
    emb.check(frame, gens).ok()?;
    Some(emb)
}

/// All generators outside `K⟨a⟩`: rows are lines `e, t, tu, tut, …` linked
/// by 6-cycles into a twisted cylinder.
fn case1(frame: &Frame, gens: &[GqdElem], circle: bool) -> Result<Plan> {
    let full = frame.full_lattice()?;
    let kg = frame.group().k_group();
    let lines = candidate_lines(frame, gens);
    for budget in ROW_SEARCH_NODES {
        for &(t, u) in &lines {
            let sigma = frame.mul(&gens[t], &gens[u]);
            let lat = frame.lattice(&[sigma.kz()]);
            let Some(rows) = lat.index_in(kg, &full) else { continue };
            let row0 = GroupDoubleRay {
                motif: vec![frame.identity(), gens[t].clone()],
                period: sigma,
                labels: vec![t, u],
            };
            if rows == 1 {
                if circle {
                    continue;
                }
                return Ok(Plan::Ray(row0));
            }
            if let Some(emb) = row_cylinder(frame, gens, row0, &lat, rows as usize, budget) {
                return Ok(Plan::Embedding(emb));
            }
        }
    }
    Err(Error::SearchExhausted("no cyclic row sequence found".into()))
}

/// `⟨S₂⟩N` finite: a ray of `G/⟨S₂⟩N` lifted, each vertex carrying a path
/// through its coset.
fn case2i(
    frame: &Frame,
    gens: &[GqdElem],
    s1: &[GqdElem],
    s2: &[GqdElem],
    h: &LatticeSubgroup,
    depth: usize,
) -> Result<CylinderEmbedding> {
    let g = frame.group();
    let quotient = Frame::with_kernel(g, &h.finite_part);
    let q_gens = frame_gens(&quotient, s1);
    let q_ray = ham_ray_in(&quotient, &q_gens, depth + 1)?;
    let lift: Vec<&GqdElem> = q_gens
        .iter()
        .map(|y| s1.iter().find(|x| quotient.canon(x) == *y).expect("image of some generator"))
        .collect();
    let p = q_ray.len();
    let mut rho = vec![frame.identity()];
    for j in 0..p {
        rho.push(frame.mul(&rho[j], lift[q_ray.labels[j]]));
    }
    let tau = rho.pop().expect("nonempty");
    if tau.eps != 0 || p % 2 != 0 {
        return Err(Error::Construction("lifted quotient ray has odd period".into()));
    }
    let coset: Vec<GqdElem> = frame_gens(frame, &h.finite_part.iter().map(|k| g.from_k(k.clone())).collect::<Vec<_>>());
    let mut verts = vec![frame.identity()];
    verts.extend(coset);
    let path = frame_ham_path(frame, &verts, s2)?;
    let table = path
        .iter()
        .map(|pm| {
            let pinv = frame.inv(pm);
            rho.iter()
                .enumerate()
                .map(|(n, r)| frame.mul(r, if n % 2 == 0 { pm } else { &pinv }))
                .collect()
        })
        .collect();
    let emb = CylinderEmbedding {
        graph: CoordGraph::Grid {
            height: path.len() as i64,
        },
        table,
        tau,
    };
    emb.check(frame, gens)?;
    Ok(emb)
}

/// `⟨S₂⟩N` infinite: translates of an abelian ray by a Hamiltonian path of
/// the finite quotient, alternately inverted.
fn case2ii(
    frame: &Frame,
    gens: &[GqdElem],
    s1: &[GqdElem],
    s2: &[GqdElem],
    h: &LatticeSubgroup,
) -> Result<CylinderEmbedding> {
    let kg = frame.group().k_group();
    let reduce = |x: &GqdElem| -> GqdElem {
        let c = h.coset_rep(kg, &x.kz());
        GqdElem::new(c.k, c.z, x.eps)
    };
    // coset table of G/H'
    let q_gens: Vec<GqdElem> = {
        let mut v: Vec<GqdElem> = Vec::new();
        for x in s1 {
            let y = reduce(x);
            if !v.contains(&y) {
                v.push(y);
            }
        }
        v
    };
    let e = reduce(&frame.identity());
    let mut verts = vec![e.clone()];
    let mut idx: HashMap<GqdElem, usize> = HashMap::from([(e, 0)]);
    let mut j = 0;
    while j < verts.len() {
        for y in &q_gens {
            let z = reduce(&frame.mul(&verts[j], y));
            if !idx.contains_key(&z) {
                if verts.len() >= FINITE_PATH_BOUND {
                    return Err(Error::BoundExceeded {
                        size: verts.len() as u64 + 1,
                        bound: FINITE_PATH_BOUND as u64,
                    });
                }
                idx.insert(z.clone(), verts.len());
                verts.push(z);
            }
        }
        j += 1;
    }
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|v| q_gens.iter().map(|y| idx[&reduce(&frame.mul(v, y))]).collect())
        .collect();
    let path = ham_path_indices(&adj, 0)?;
    let mut lifts = vec![frame.identity()];
    for w in path.windows(2) {
        let step = s1
            .iter()
            .find(|x| idx[&reduce(&frame.mul(&verts[w[0]], x))] == w[1])
            .expect("path steps are generator steps");
        let last = lifts.last().expect("nonempty");
        lifts.push(frame.mul(last, step));
    }
    let ray = abelian_ray_in(frame, h, s2)?;
    let table = lifts
        .iter()
        .enumerate()
        .map(|(j, gj)| {
            ray.motif
                .iter()
                .map(|r| frame.mul(gj, &if j % 2 == 0 { r.clone() } else { frame.inv(r) }))
                .collect()
        })
        .collect();
    let emb = CylinderEmbedding {
        graph: CoordGraph::Grid {
            height: lifts.len() as i64,
        },
        table,
        tau: ray.period,
    };
    emb.check(frame, gens)?;
    Ok(emb)
}

/// Hamiltonian double ray of `Cay(H, S₂)` for an infinite abelian `H ≤ K⟨a⟩`
/// given as a lattice; labels index `s2`.
pub fn abelian_double_ray(g: &GqdGroup, h: &LatticeSubgroup, s2: &[GqdElem]) -> Result<GroupDoubleRay> {
    abelian_ray_in(&Frame::ambient(g), h, s2)
}

fn abelian_ray_in(frame: &Frame, h: &LatticeSubgroup, s2: &[GqdElem]) -> Result<GroupDoubleRay> {
    let kg = frame.group().k_group();
    if s2.iter().any(|x| x.eps != 0) || h.is_finite() {
        return Err(Error::Precondition("abelian ray needs an infinite subgroup of K<a>".into()));
    }
    let kz: Vec<KZElem> = s2.iter().map(|x| x.kz()).collect();
    if frame.lattice(&kz) != *h {
        return Err(Error::InvalidGenSet("generators do not generate the subgroup".into()));
    }
    let star = s2
        .iter()
        .find(|x| x.i != 0)
        .ok_or_else(|| Error::InvalidGenSet("no generator of infinite order".into()))?
        .clone();
    let star_inv = frame.inv(&star);
    let rest: Vec<GqdElem> = s2.iter().filter(|x| **x != star && **x != star_inv).cloned().collect();
    let m = frame.lattice(&rest.iter().map(|x| x.kz()).collect::<Vec<_>>());
    let emb = if m.is_finite() {
        let mut verts = vec![frame.identity()];
        verts.extend(frame_gens(
            frame,
            &m.finite_part.iter().map(|k| frame.group().from_k(k.clone())).collect::<Vec<_>>(),
        ));
        let path = frame_ham_path(frame, &verts, &rest)?;
        CylinderEmbedding {
            graph: CoordGraph::Grid {
                height: path.len() as i64,
            },
            table: path.into_iter().map(|x| vec![x]).collect(),
            tau: star,
        }
    } else {
        let inner = abelian_ray_in(frame, &m, &rest)?;
        let q = quotient_cyclic_order(kg, &m, &star.kz(), h)?;
        let mut table = Vec::new();
        let mut shift = frame.identity();
        for _ in 0..q {
            table.push(inner.motif.iter().map(|r| frame.mul(&shift, r)).collect());
            shift = frame.mul(&shift, &star);
        }
        CylinderEmbedding {
            graph: CoordGraph::Grid { height: q as i64 },
            table,
            tau: inner.period,
        }
    };
    emb.check(frame, s2)?;
    let CoordGraph::Grid { height } = emb.graph else {
        unreachable!()
    };
    emb.pull_back(frame, s2, &walls::grid_double_ray(height)?)
}

/// Pulls a grid ray back through rows given as explicit tables.
pub fn grid_assemble(
    g: &GqdGroup,
    gens: &[GqdElem],
    table: Vec<Vec<GqdElem>>,
    tau: GqdElem,
) -> Result<GroupDoubleRay> {
    let frame = Frame::ambient(g);
    let height = table.len() as i64;
    let emb = CylinderEmbedding {
        graph: CoordGraph::Grid { height },
        table,
        tau,
    };
    emb.check(&frame, gens)?;
    emb.pull_back(&frame, gens, &walls::grid_double_ray(height)?)
}

fn frame_ham_path(frame: &Frame, verts: &[GqdElem], gens: &[GqdElem]) -> Result<Vec<GqdElem>> {
    let idx: HashMap<&GqdElem, usize> = verts.iter().enumerate().map(|(j, v)| (v, j)).collect();
    let mut adj = Vec::with_capacity(verts.len());
    for v in verts {
        let mut row = Vec::new();
        for s in gens {
            let w = frame.mul(v, s);
            let &j = idx
                .get(&w)
                .ok_or_else(|| Error::Precondition("vertex set not closed under generators".into()))?;
            row.push(j);
        }
        adj.push(row);
    }
    Ok(ham_path_indices(&adj, 0)?.into_iter().map(|j| verts[j].clone()).collect())
}

/// Hamiltonian path of the finite subgroup `verts` of `G` in `Cay(verts, gens)`,
/// starting at the identity.
pub fn finite_ham_path(g: &GqdGroup, verts: &[GqdElem], gens: &[GqdElem]) -> Result<Vec<GqdElem>> {
    let start = verts
        .iter()
        .position(|v| *v == g.identity())
        .ok_or_else(|| Error::Precondition("vertex set must contain the identity".into()))?;
    let mut ordered = vec![verts[start].clone()];
    ordered.extend(verts.iter().enumerate().filter(|(j, _)| *j != start).map(|(_, v)| v.clone()));
    frame_ham_path(&Frame::ambient(g), &ordered, gens)
}

/// Backtracking Hamiltonian path from `start` in the undirected graph `adj`.
/// Neighbours with the fewest unvisited neighbours go first; branches leaving
/// a disconnected remainder or two forced endpoints are cut. Runs a few
/// restarts with rotated tie-breaking before giving up.
pub fn ham_path_indices(adj: &[Vec<usize>], start: usize) -> Result<Vec<usize>> {
    let n = adj.len();
    if n > FINITE_PATH_BOUND {
        return Err(Error::BoundExceeded {
            size: n as u64,
            bound: FINITE_PATH_BOUND as u64,
        });
    }
    let mut sym: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, row) in adj.iter().enumerate() {
        for &w in row {
            if w != v {
                sym[v].push(w);
                sym[w].push(v);
            }
        }
    }
    for r in &mut sym {
        r.sort_unstable();
        r.dedup();
    }
    for restart in 0..PATH_RESTARTS {
        let mut st = PathSearch {
            adj: &sym,
            visited: vec![false; n],
            free: sym.iter().map(|r| r.len()).collect(),
            path: vec![start],
            nodes: 0,
            budget: FINITE_PATH_NODES / PATH_RESTARTS,
            salt: restart,
        };
        st.visit(start);
        if st.go(start) {
            return Ok(st.path);
        }
        if st.nodes <= st.budget {
            break; // exhaustive: no path exists
        }
    }
    Err(Error::SearchExhausted(format!("no Hamiltonian path on {n} vertices")))
}

const PATH_RESTARTS: u64 = 20;

struct PathSearch<'a> {
    adj: &'a [Vec<usize>],
    visited: Vec<bool>,
    /// Unvisited neighbours of each vertex.
    free: Vec<usize>,
    path: Vec<usize>,
    nodes: u64,
    budget: u64,
    salt: u64,
}

impl PathSearch<'_> {
    fn visit(&mut self, v: usize) {
        self.visited[v] = true;
        for &w in &self.adj[v] {
            self.free[w] -= 1;
        }
    }

    fn unvisit(&mut self, v: usize) {
        self.visited[v] = false;
        for &w in &self.adj[v] {
            self.free[w] += 1;
        }
    }

    /// The unvisited vertices must be connected, reachable from `v`, and at
    /// most one of them may be a dead end.
    fn viable(&self, v: usize) -> bool {
        let n = self.adj.len();
        let rest: Vec<usize> = (0..n).filter(|&y| !self.visited[y]).collect();
        let Some(&first) = rest.first() else { return true };
        if self.free[v] == 0 {
            return false;
        }
        let mut ends = 0;
        for &y in &rest {
            let reach = self.free[y] + usize::from(self.adj[v].binary_search(&y).is_ok());
            if reach == 0 {
                return false;
            }
            if reach == 1 && rest.len() > 1 {
                ends += 1;
            }
        }
        if ends > 1 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![first];
        seen[first] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &w in &self.adj[x] {
                if !self.visited[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == rest.len()
    }

    fn go(&mut self, v: usize) -> bool {
        if self.path.len() == self.adj.len() {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget || !self.viable(v) {
            return false;
        }
        let salt = self.salt;
        let mut cand: Vec<(usize, u64, usize)> = self.adj[v]
            .iter()
            .filter(|&&w| !self.visited[w])
            .map(|&w| (self.free[w], (w as u64 ^ salt).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 40, w))
            .collect();
        cand.sort_unstable();
        for (_, _, w) in cand {
            self.visit(w);
            self.path.push(w);
            if self.go(w) {
                return true;
            }
            self.path.pop();
            self.unvisit(w);
            if self.nodes > self.budget {
                return false;
            }
        }
        false
    }
}
