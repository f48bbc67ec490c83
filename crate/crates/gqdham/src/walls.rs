//! Walls `W_k`, twisted cubic cylinders `W̄_{k,l}`, grids `P_h □ D`, their
//! named subpaths, and explicit Hamiltonian double rays / circles in them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CylinderParams {
    pub k: i64,
    pub l: i64,
}

impl CylinderParams {
    pub fn new(k: i64, l: i64) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidCylinder {
            k,
            l,
            reason: reason.into(),
        };
        if k < 2 {
            return Err(bad("height must be at least 2"));
        }
        if l < 0 {
            return Err(bad("twist must be non-negative"));
        }
        if (k + l) % 2 != 0 {
            return Err(bad("k + l must be even"));
        }
        Ok(CylinderParams { k, l })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WallVertex {
    pub n: i64,
    pub m: i64,
}

impl WallVertex {
    pub fn new(n: i64, m: i64) -> Self {
        WallVertex { n, m }
    }

    pub fn shifted(self, dn: i64) -> Self {
        WallVertex::new(self.n + dn, self.m)
    }
}

fn wv(n: i64, m: i64) -> WallVertex {
    WallVertex::new(n, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Straight,
    Twisted,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Horizontal => "horizontal",
            EdgeKind::Straight => "straight",
            EdgeKind::Twisted => "twisted",
        }
    }
}

/// The infinite coordinate graphs on `Z × [0, height)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoordGraph {
    Wall { k: i64 },
    Cylinder { k: i64, l: i64 },
    Grid { height: i64 },
}

impl CoordGraph {
    pub fn cylinder(p: CylinderParams) -> Self {
        CoordGraph::Cylinder { k: p.k, l: p.l }
    }

    pub fn height(&self) -> i64 {
        match *self {
            CoordGraph::Wall { k } | CoordGraph::Cylinder { k, .. } => k,
            CoordGraph::Grid { height } => height,
        }
    }

    pub fn contains(&self, v: WallVertex) -> bool {
        (0..self.height()).contains(&v.m)
    }

    /// Neighbours of `v` with the kind of the connecting edge.
    pub fn neighbors(&self, v: WallVertex) -> Vec<(WallVertex, EdgeKind)> {
        let h = self.height();
        let mut out = vec![
            (wv(v.n - 1, v.m), EdgeKind::Horizontal),
            (wv(v.n + 1, v.m), EdgeKind::Horizontal),
        ];
        match *self {
            CoordGraph::Grid { .. } => {
                if v.m + 1 < h {
                    out.push((wv(v.n, v.m + 1), EdgeKind::Straight));
                }
                if v.m > 0 {
                    out.push((wv(v.n, v.m - 1), EdgeKind::Straight));
                }
            }
            CoordGraph::Wall { k } | CoordGraph::Cylinder { k, .. } => {
                // straight rungs join (n, m) and (n, m+1) when n ≡ m (mod 2)
                if v.m < k - 1 && (v.n - v.m).rem_euclid(2) == 0 {
                    out.push((wv(v.n, v.m + 1), EdgeKind::Straight));
                }
                if v.m >= 1 && (v.n - v.m + 1).rem_euclid(2) == 0 {
                    out.push((wv(v.n, v.m - 1), EdgeKind::Straight));
                }
                if let CoordGraph::Cylinder { l, .. } = *self {
                    if v.m == k - 1 && (v.n - (k - 1)).rem_euclid(2) == 0 {
                        out.push((wv(v.n + l, 0), EdgeKind::Twisted));
                    }
                    if v.m == 0 && (v.n - l - (k - 1)).rem_euclid(2) == 0 {
                        out.push((wv(v.n - l, k - 1), EdgeKind::Twisted));
                    }
                }
            }
        }
        out
    }

    pub fn edge_kind(&self, u: WallVertex, v: WallVertex) -> Option<EdgeKind> {
        if !self.contains(u) || !self.contains(v) {
            return None;
        }
        self.neighbors(u)
            .into_iter()
            .find(|(w, _)| *w == v)
            .map(|(_, kind)| kind)
    }
}

/// Two-way infinite walk: vertex `q·p + r` is `motif[r]` shifted by `q·shift`
/// columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordDoubleRay {
    pub motif: Vec<WallVertex>,
    pub shift: i64,
}

impl CoordDoubleRay {
    pub fn new(motif: Vec<WallVertex>, shift: i64) -> Self {
        CoordDoubleRay { motif, shift }
    }

    pub fn period(&self) -> usize {
        self.motif.len()
    }

    pub fn vertex(&self, idx: i64) -> WallVertex {
        let p = self.motif.len() as i64;
        let (q, r) = (idx.div_euclid(p), idx.rem_euclid(p));
        self.motif[r as usize].shifted(q * self.shift)
    }

    pub fn shifted(&self, dn: i64) -> Self {
        CoordDoubleRay::new(self.motif.iter().map(|v| v.shifted(dn)).collect(), self.shift)
    }

    /// Repeats the motif `c` times.
    pub fn repeated(&self, c: usize) -> Self {
        let p = self.motif.len() as i64;
        let motif = (0..c as i64 * p).map(|j| self.vertex(j)).collect();
        CoordDoubleRay::new(motif, self.shift * c as i64)
    }

    /// Mirror image `n ↦ −n`.
    pub fn reflected(&self) -> Self {
        CoordDoubleRay::new(
            self.motif.iter().map(|v| wv(-v.n, v.m)).collect(),
            -self.shift,
        )
    }

    /// Checks the structural invariants against `graph`.
    pub fn check(&self, graph: &CoordGraph) -> Result<()> {
        let fail = |msg: String| Err(Error::Construction(msg));
        if self.motif.is_empty() {
            return fail("empty motif".into());
        }
        if self.shift == 0 {
            return fail("zero shift".into());
        }
        let p = self.motif.len() as i64;
        for j in 0..p {
            let (u, v) = (self.vertex(j), self.vertex(j + 1));
            if graph.edge_kind(u, v).is_none() {
                return fail(format!("({},{}) and ({},{}) are not adjacent", u.n, u.m, v.n, v.m));
            }
        }
        let seen: BTreeSet<WallVertex> = (-p..2 * p).map(|j| self.vertex(j)).collect();
        if seen.len() as i64 != 3 * p {
            return fail("vertex repeated within three periods".into());
        }
        Ok(())
    }
}

/// Finite truncation of a coordinate graph to columns `[n_lo, n_hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallWindow {
    pub graph: CoordGraph,
    pub n_lo: i64,
    pub n_hi: i64,
    pub edges: Vec<(WallVertex, WallVertex, EdgeKind)>,
}

impl WallWindow {
    pub fn new(graph: CoordGraph, n_lo: i64, n_hi: i64) -> Result<Self> {
        if n_lo > n_hi {
            return Err(Error::Precondition("empty column range".into()));
        }
        if graph.height() < 1 {
            return Err(Error::Precondition("height must be positive".into()));
        }
        let mut w = WallWindow {
            graph,
            n_lo,
            n_hi,
            edges: Vec::new(),
        };
        let mut edges = BTreeSet::new();
        for u in w.vertices() {
            for (v, kind) in graph.neighbors(u) {
                if w.in_range(v) && u < v {
                    edges.insert((u, v, kind));
                }
            }
        }
        w.edges = edges.into_iter().collect();
        Ok(w)
    }

    pub fn in_range(&self, v: WallVertex) -> bool {
        (self.n_lo..=self.n_hi).contains(&v.n) && self.graph.contains(v)
    }

    pub fn vertices(&self) -> Vec<WallVertex> {
        let mut out = Vec::new();
        for n in self.n_lo..=self.n_hi {
            for m in 0..self.graph.height() {
                out.push(wv(n, m));
            }
        }
        out
    }

    pub fn degree(&self, v: WallVertex) -> usize {
        self.edges.iter().filter(|(a, b, _)| *a == v || *b == v).count()
    }

    /// Graphviz rendering; `highlight` edges are drawn bold and coloured by
    /// their group index.
    pub fn to_dot(&self, highlight: &[Vec<(WallVertex, WallVertex)>]) -> String {
        const COLORS: [&str; 6] = ["red", "blue", "darkgreen", "orange", "purple", "brown"];
        let key = |u: WallVertex, v: WallVertex| if u < v { (u, v) } else { (v, u) };
        let mut marked = std::collections::BTreeMap::new();
        for (g, edges) in highlight.iter().enumerate() {
            for &(u, v) in edges {
                marked.insert(key(u, v), g);
            }
        }
        let mut s = String::from("graph window {\n");
        for v in self.vertices() {
            let _ = writeln!(s, "  \"{},{}\" [pos=\"{},{}!\"];", v.n, v.m, v.n, v.m);
        }
        for &(u, v, kind) in &self.edges {
            let _ = write!(s, "  \"{},{}\" -- \"{},{}\" [kind={}", u.n, u.m, v.n, v.m, kind.as_str());
            if kind == EdgeKind::Twisted {
                s.push_str(", style=dashed");
            }
            if let Some(&g) = marked.get(&key(u, v)) {
                let _ = write!(s, ", color={}, penwidth=3", COLORS[g % COLORS.len()]);
            }
            s.push_str("];\n");
        }
        s.push_str("}\n");
        s
    }
}

pub fn wall_window(k: i64, n_lo: i64, n_hi: i64) -> Result<WallWindow> {
    WallWindow::new(CoordGraph::Wall { k }, n_lo, n_hi)
}

pub fn cylinder_window(p: CylinderParams, n_lo: i64, n_hi: i64) -> Result<WallWindow> {
    WallWindow::new(CoordGraph::cylinder(p), n_lo, n_hi)
}

pub fn grid_window(height: i64, n_lo: i64, n_hi: i64) -> Result<WallWindow> {
    WallWindow::new(CoordGraph::Grid { height }, n_lo, n_hi)
}

/// Snake `S_{i,2j}`: the Hamiltonian path of the block of `2j` columns
/// entered at `(2i+1, 0)`. The block extends rightwards for even `k` and
/// leftwards for odd `k`.
pub fn snake(p: CylinderParams, i: i64, two_j: i64) -> Result<Vec<WallVertex>> {
    if two_j < 2 || two_j % 2 != 0 {
        return Err(Error::Precondition(format!("snake width {two_j} must be even and >= 2")));
    }
    let start = 2 * i + 1;
    let dir = if p.k % 2 == 0 { 1 } else { -1 };
    let mut out = Vec::with_capacity((two_j * p.k) as usize);
    for m in 0..p.k {
        for t in 0..two_j {
            let t = if m % 2 == 0 { t } else { two_j - 1 - t };
            out.push(wv(start + dir * t, m));
        }
    }
    Ok(out)
}

/// Column `Q_i = S_{i,2}`.
pub fn column(p: CylinderParams, i: i64) -> Vec<WallVertex> {
    snake(p, i, 2).expect("width 2 is valid")
}

/// Staircase `Γ_i` from `(2i+1, 0)` to `(2i+1+k, k−1)`.
pub fn staircase(p: CylinderParams, i: i64) -> Vec<WallVertex> {
    (0..2 * p.k)
        .map(|h| {
            let m = h / 2;
            wv(2 * i + 1 + m + h % 2, m)
        })
        .collect()
}

/// `W̄_{k,l} ≅ W̄_{(k+l)/2, (3k−l)/2}`, sending the staircase double rays to
/// rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CylinderIso {
    pub source: CylinderParams,
    pub target: CylinderParams,
}

impl CylinderIso {
    pub fn map(&self, v: WallVertex) -> WallVertex {
        let (k, kt) = (self.source.k, self.target.k);
        let d = v.n - v.m;
        let (h, i) = if d.rem_euclid(2) == 1 {
            (2 * v.m, (d - 1) / 2)
        } else {
            (2 * v.m + 1, (d - 2) / 2)
        };
        let (j, r) = (i.div_euclid(kt), i.rem_euclid(kt));
        wv(2 * k * j + h + r - 1, r)
    }

    pub fn inverse(&self, v: WallVertex) -> WallVertex {
        let (k, kt) = (self.source.k, self.target.k);
        let t = v.n - v.m + 1;
        let (j, h) = (t.div_euclid(2 * k), t.rem_euclid(2 * k));
        let i = j * kt + v.m;
        let m = h / 2;
        wv(2 * i + 1 + m + h % 2, m)
    }

    /// Carries a ray of the target back to the source.
    pub fn pull_back(&self, ray: &CoordDoubleRay) -> CoordDoubleRay {
        // a target shift of 2k columns is a source shift of k + l columns
        let two_k = 2 * self.source.k;
        let c = two_k / gcd(two_k, ray.shift.abs());
        let long = ray.repeated(c as usize);
        let motif = long.motif.iter().map(|&v| self.inverse(v)).collect();
        CoordDoubleRay::new(motif, long.shift / two_k * (self.source.k + self.source.l))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn cylinder_iso(p: CylinderParams) -> Result<CylinderIso> {
    let (kt, lt) = ((p.k + p.l) / 2, (3 * p.k - p.l) / 2);
    if lt < 0 {
        return Err(Error::InvalidCylinder {
            k: p.k,
            l: p.l,
            reason: "target twist would be negative".into(),
        });
    }
    if kt < 2 {
        return Err(Error::InvalidCylinder {
            k: p.k,
            l: p.l,
            reason: format!("target height {kt} < 2"),
        });
    }
    Ok(CylinderIso {
        source: p,
        target: CylinderParams::new(kt, lt)?,
    })
}

/// The staircase double rays `D_r`, `r < (k+l)/2`, that become the rows of the
/// isomorphic cylinder.
pub fn iso_rows(p: CylinderParams) -> Vec<CoordDoubleRay> {
    (0..(p.k + p.l) / 2)
        .map(|r| CoordDoubleRay::new(staircase(p, r), p.k + p.l))
        .collect()
}

fn row(m: i64) -> CoordDoubleRay {
    CoordDoubleRay::new(vec![wv(0, m)], 1)
}

/// Boustrophedon through columns of rows `lo..hi`.
fn column_sweep(lo: i64, hi: i64) -> CoordDoubleRay {
    if hi - lo == 1 {
        return row(lo);
    }
    let mut motif: Vec<WallVertex> = (lo..hi).map(|m| wv(0, m)).collect();
    motif.extend((lo..hi).rev().map(|m| wv(1, m)));
    CoordDoubleRay::new(motif, 2)
}

/// Snake whose entry column is `c` (must be odd).
fn snake_at(p: CylinderParams, c: i64, width: i64) -> Vec<WallVertex> {
    debug_assert_eq!(c.rem_euclid(2), 1);
    snake(p, (c - 1) / 2, width).expect("valid snake width")
}

pub fn cylinder_double_ray(p: CylinderParams) -> Result<CoordDoubleRay> {
    let (k, l) = (p.k, p.l);
    if k == 2 && l == 0 {
        // W̄_{2,0} is the ladder
        return Ok(column_sweep(0, 2));
    }
    if l <= 1 {
        let iso = cylinder_iso(p)?;
        return Ok(iso.pull_back(&cylinder_double_ray(iso.target)?));
    }
    if k % 2 == 0 {
        // snakes of width l, each leaving through a twisted edge into the next
        return Ok(CoordDoubleRay::new(snake_at(p, 1, l), l));
    }
    // widths l1 = 2 and l2 = l - 1 alternate; together they advance l + 1
    let (l1, l2) = (2, l - 1);
    let mut motif = snake_at(p, 1, l1);
    motif.extend(snake_at(p, 2 - l1 + l, l2));
    Ok(CoordDoubleRay::new(motif, l + 1))
}

pub fn cylinder_two_rays(p: CylinderParams) -> Result<(CoordDoubleRay, CoordDoubleRay)> {
    let (k, l) = (p.k, p.l);
    if k == 2 {
        return Ok((row(0), row(1)));
    }
    if (k, l) == (3, 3) {
        // self-isomorphic; a single winding-two cycle of the quotient by a
        // two-column shift lifts to two interleaved rays
        let motif = vec![wv(0, 0), wv(0, 1), wv(-1, 1), wv(-1, 2), wv(0, 2), wv(3, 0)];
        let d1 = CoordDoubleRay::new(motif, 4);
        let d2 = d1.shifted(2);
        return Ok((d1, d2));
    }
    if l <= 3 {
        let iso = cylinder_iso(p)?;
        let (d1, d2) = cylinder_two_rays(iso.target)?;
        return Ok((iso.pull_back(&d1), iso.pull_back(&d2)));
    }
    if k % 2 == 0 {
        let (l1, l2) = (2, l - 2);
        let d1 = CoordDoubleRay::new(snake_at(p, 1, l1), l);
        let d2 = CoordDoubleRay::new(snake_at(p, 1 + l1, l2), l);
        return Ok((d1, d2));
    }
    // three widths per l + 1 columns; following twisted edges skips one
    // snake, so even- and odd-numbered snakes form the two rays
    let widths = [2, 2, l - 3];
    let mut entries = Vec::with_capacity(6);
    let mut right = 1;
    for t in 0..6 {
        entries.push((right, widths[t % 3]));
        right += widths[(t + 1) % 3];
    }
    let build = |parity: usize| {
        let mut motif = Vec::new();
        for &(c, w) in entries.iter().skip(parity).step_by(2) {
            motif.extend(snake_at(p, c, w));
        }
        CoordDoubleRay::new(motif, 2 * (l + 1))
    };
    Ok((build(0), build(1)))
}

/// Hamiltonian double ray of `P_height □ D`: columns traversed alternately
/// upwards and downwards.
pub fn grid_double_ray(height: i64) -> Result<CoordDoubleRay> {
    if height < 1 {
        return Err(Error::Precondition("grid height must be positive".into()));
    }
    Ok(column_sweep(0, height))
}

/// Row 0 and a column sweep of the remaining rows.
pub fn grid_two_rays(height: i64) -> Result<(CoordDoubleRay, CoordDoubleRay)> {
    if height < 2 {
        return Err(Error::Precondition("two rays need grid height >= 2".into()));
    }
    Ok((row(0), column_sweep(1, height)))
}
