//! Finite-window verification of periodic Hamiltonian double rays and circles.
//!
//! Coverage is checked exactly on an inner ball; tails are handled by a
//! growth bound: the vertex `σ^q·m_r` has a-exponent `q·z(σ) + i(m_r)`, so
//! once `|q|` is large enough no further vertex can re-enter the inner ball.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::abelian_core::LatticeSubgroup;
use crate::cayley::CayleyWindow;
use crate::error::{Error, Result};
use crate::gqd_group::{GqdElem, GqdGroup};
use crate::hamilton::{Frame, GroupDoubleRay, HamCircle};
use crate::walls::{CoordDoubleRay, WallVertex, WallWindow};

/// Default cap on the number of expanded ray indices.
pub const COVERAGE_BOUND: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailStatus {
    pub forward: bool,
    pub backward: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checked_inner_radius: i64,
    pub inner_vertices: usize,
    pub covered: usize,
    pub missing: Vec<String>,
    pub duplicates: Vec<String>,
    pub non_edges: Vec<String>,
    pub tail_status: Vec<TailStatus>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn finish(mut self) -> Self {
        self.passed = self.missing.is_empty()
            && self.duplicates.is_empty()
            && self.non_edges.is_empty()
            && self.notes.is_empty()
            && self.tail_status.iter().all(|t| t.forward && t.backward);
        self
    }
}

pub fn verify_ray(window: &CayleyWindow, ray: &GroupDoubleRay, inner_radius: i64) -> Result<VerifyReport> {
    verify_group_rays(window, &[ray], inner_radius)
}

pub fn verify_circle(window: &CayleyWindow, circle: &HamCircle, inner_radius: i64) -> Result<VerifyReport> {
    verify_group_rays(window, &[&circle.rays[0], &circle.rays[1]], inner_radius)
}

/// Shared check: the rays jointly cover the inner ball exactly once, are
/// pairwise disjoint wherever expanded, and follow labelled edges.
pub fn verify_group_rays(window: &CayleyWindow, rays: &[&GroupDoubleRay], inner_radius: i64) -> Result<VerifyReport> {
    if inner_radius < 0 || inner_radius > window.radius as i64 {
        return Err(Error::Precondition(format!(
            "inner radius {inner_radius} outside window radius {}",
            window.radius
        )));
    }
    let g = &window.group;
    let gens = window.gens.gens();
    let mut rep = VerifyReport {
        checked_inner_radius: inner_radius,
        ..Default::default()
    };
    let inner = window.ball(inner_radius as u32);
    rep.inner_vertices = inner.len();
    let i_max = inner.iter().map(|v| v.i.abs()).max().unwrap_or(0);
    let mut count: HashMap<GqdElem, usize> = inner.iter().map(|v| (v.clone(), 0)).collect();
    let mut seen: HashSet<GqdElem> = HashSet::new();
    let mut reported: HashSet<GqdElem> = HashSet::new();

    for (ri, ray) in rays.iter().enumerate() {
        let p = ray.motif.len();
        let sigma = &ray.period;
        if p == 0 || ray.labels.len() != p {
            rep.notes.push(format!("ray {ri}: malformed motif"));
            rep.tail_status.push(TailStatus { forward: false, backward: false });
            continue;
        }
        if ray.labels.iter().any(|&l| l >= gens.len()) || !g.contains(sigma) || ray.motif.iter().any(|x| !g.contains(x)) {
            rep.notes.push(format!("ray {ri}: label or element out of range"));
            rep.tail_status.push(TailStatus { forward: false, backward: false });
            continue;
        }
        for j in 0..p {
            let next = if j + 1 < p { ray.motif[j + 1].clone() } else { g.mul(sigma, &ray.motif[0]) };
            if g.mul(&ray.motif[j], &gens[ray.labels[j]]) != next {
                rep.non_edges.push(format!("ray {ri}: step {j}"));
            }
        }
        if g.is_torsion(sigma) {
            rep.notes.push(format!("ray {ri}: period {sigma} has finite order"));
            rep.tail_status.push(TailStatus { forward: false, backward: false });
            continue;
        }
        let z = sigma.i.abs();
        let m_max = ray.motif.iter().map(|v| v.i.abs()).max().unwrap_or(0);
        // beyond |q| > q_max every vertex has |i| > i_max
        let q_max = (i_max + m_max) / z + 1;
        let total = (2 * q_max as usize + 1) * p;
        if total > COVERAGE_BOUND {
            return Err(Error::BoundExceeded {
                size: total as u64,
                bound: COVERAGE_BOUND as u64,
            });
        }
        let mut shift = g.pow(sigma, -q_max);
        let mut prev: Option<(GqdElem, usize)> = None;
        for _ in -q_max..=q_max {
            for j in 0..p {
                let v = g.mul(&shift, &ray.motif[j]);
                if let Some((u, lab)) = &prev {
                    if window.contains(u) && window.contains(&v) && !window.has_edge(u, &v, *lab) {
                        rep.non_edges.push(format!("ray {ri}: window edge {u} -> {v}"));
                    }
                }
                if let Some(c) = count.get_mut(&v) {
                    *c += 1;
                }
                if !seen.insert(v.clone()) && reported.insert(v.clone()) {
                    rep.duplicates.push(v.to_string());
                }
                prev = Some((v, ray.labels[j]));
            }
            shift = g.mul(sigma, &shift);
        }
        // word lengths at both ends of the expansion exceed the inner radius
        let ends = [g.pow(sigma, -q_max), g.mul(&g.pow(sigma, q_max), &ray.motif[p - 1])];
        let beyond = |v: &GqdElem| window.word_length(v).is_none_or(|d| d as i64 > inner_radius);
        let first = g.mul(&ends[0], &ray.motif[0]);
        rep.tail_status.push(TailStatus {
            forward: beyond(&ends[1]),
            backward: beyond(&first),
        });
    }
    for v in &inner {
        match count[v] {
            0 => rep.missing.push(v.to_string()),
            1 => rep.covered += 1,
            _ => {}
        }
    }
    Ok(rep.finish())
}

/// Exact global check: consecutive vertices adjacent and the motif a
/// transversal of the right cosets of `⟨σ⟩` in `G`.
pub fn ray_certificate(g: &GqdGroup, gens: &[GqdElem], ray: &GroupDoubleRay) -> Result<bool> {
    let p = ray.motif.len();
    if p == 0 || ray.labels.len() != p || ray.labels.iter().any(|&l| l >= gens.len()) {
        return Ok(false);
    }
    for j in 0..p {
        let next = if j + 1 < p { ray.motif[j + 1].clone() } else { g.mul(&ray.period, &ray.motif[0]) };
        if g.mul(&ray.motif[j], &gens[ray.labels[j]]) != next {
            return Ok(false);
        }
    }
    if g.is_torsion(&ray.period) {
        return Ok(false);
    }
    let frame = Frame::ambient(g);
    let lat = frame.lattice(&[ray.period.kz()]);
    let index = lat
        .index_in(g.k_group(), &LatticeSubgroup::full(g.k_group())?)
        .ok_or_else(|| Error::Construction("period of infinite index".into()))?;
    let keys: HashSet<_> = ray
        .motif
        .iter()
        .map(|x| (x.eps, lat.coset_rep(g.k_group(), &x.kz())))
        .collect();
    Ok(keys.len() == p && p as u64 == 2 * index)
}

/// Coordinate-graph version: the inner region is the column range
/// `[lo, hi]`, which must lie inside the window.
pub fn verify_coord_ray(window: &WallWindow, ray: &CoordDoubleRay, lo: i64, hi: i64) -> Result<VerifyReport> {
    verify_coord_rays(window, &[ray], lo, hi)
}

pub fn verify_coord_circle(
    window: &WallWindow,
    rays: &(CoordDoubleRay, CoordDoubleRay),
    lo: i64,
    hi: i64,
) -> Result<VerifyReport> {
    verify_coord_rays(window, &[&rays.0, &rays.1], lo, hi)
}

pub fn verify_coord_rays(window: &WallWindow, rays: &[&CoordDoubleRay], lo: i64, hi: i64) -> Result<VerifyReport> {
    if lo > hi || lo < window.n_lo || hi > window.n_hi {
        return Err(Error::Precondition(format!(
            "inner range [{lo},{hi}] not inside [{},{}]",
            window.n_lo, window.n_hi
        )));
    }
    let show = |v: WallVertex| format!("({},{})", v.n, v.m);
    let inner: Vec<WallVertex> = window.vertices().into_iter().filter(|v| (lo..=hi).contains(&v.n)).collect();
    let edges: HashSet<(WallVertex, WallVertex)> = window.edges.iter().map(|&(u, v, _)| (u, v)).collect();
    let mut rep = VerifyReport {
        checked_inner_radius: hi - lo,
        inner_vertices: inner.len(),
        ..Default::default()
    };
    let mut count: HashMap<WallVertex, usize> = inner.iter().map(|v| (*v, 0)).collect();
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    let reach = lo.abs().max(hi.abs());
    for (ri, ray) in rays.iter().enumerate() {
        let p = ray.motif.len() as i64;
        if p == 0 || ray.shift == 0 {
            rep.notes.push(format!("ray {ri}: empty motif or zero shift"));
            rep.tail_status.push(TailStatus { forward: false, backward: false });
            continue;
        }
        let n_max = ray.motif.iter().map(|v| v.n.abs()).max().unwrap_or(0);
        let q_max = (reach + n_max) / ray.shift.abs() + 1;
        let total = (2 * q_max + 1) * p;
        if total as usize > COVERAGE_BOUND {
            return Err(Error::BoundExceeded {
                size: total as u64,
                bound: COVERAGE_BOUND as u64,
            });
        }
        for idx in -q_max * p..(q_max + 1) * p {
            let v = ray.vertex(idx);
            if !window.graph.contains(v) {
                rep.notes.push(format!("ray {ri}: {} is not a vertex", show(v)));
            }
            let w = ray.vertex(idx + 1);
            if window.graph.edge_kind(v, w).is_none() {
                rep.non_edges.push(format!("ray {ri}: {} -> {}", show(v), show(w)));
            } else if window.in_range(v) && window.in_range(w) {
                let key = if v < w { (v, w) } else { (w, v) };
                if !edges.contains(&key) {
                    rep.non_edges.push(format!("ray {ri}: window lacks {} -> {}", show(v), show(w)));
                }
            }
            if let Some(c) = count.get_mut(&v) {
                *c += 1;
            }
            if !seen.insert(v) && reported.insert(v) {
                rep.duplicates.push(show(v));
            }
        }
        let first = ray.vertex(-q_max * p);
        let last = ray.vertex((q_max + 1) * p - 1);
        // the two ends leave the inner range on opposite sides
        let opposite = (first.n < lo && last.n > hi) || (first.n > hi && last.n < lo);
        rep.tail_status.push(TailStatus {
            forward: opposite,
            backward: opposite,
        });
    }
    for v in &inner {
        match count[v] {
            0 => rep.missing.push(show(*v)),
            1 => rep.covered += 1,
            _ => {}
        }
    }
    Ok(rep.finish())
}

/// Checks that `path` visits every vertex once along generator steps.
pub fn verify_finite_path(g: &GqdGroup, vertices: &[GqdElem], gens: &[GqdElem], path: &[GqdElem]) -> VerifyReport {
    let mut rep = VerifyReport {
        inner_vertices: vertices.len(),
        ..Default::default()
    };
    let universe: HashSet<&GqdElem> = vertices.iter().collect();
    let mut seen = HashSet::new();
    for v in path {
        if !universe.contains(v) {
            rep.notes.push(format!("{v} is not a vertex"));
        } else if !seen.insert(v) {
            rep.duplicates.push(v.to_string());
        }
    }
    for w in path.windows(2) {
        if !gens.contains(&g.mul(&g.inv(&w[0]), &w[1])) {
            rep.non_edges.push(format!("{} -> {}", w[0], w[1]));
        }
    }
    for v in vertices {
        if seen.contains(v) {
            rep.covered += 1;
        } else {
            rep.missing.push(v.to_string());
        }
    }
    rep.finish()
}
