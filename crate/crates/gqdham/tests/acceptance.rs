//! End-to-end acceptance suite. Every criterion prints one PASS/FAIL line;
//! run with `cargo test -p gqdham --test acceptance -- --nocapture`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use gqdham::abelian_core::{FiniteAbelianGroup, KElem};
use gqdham::cayley::{build_window, classify_case, CayleyWindow, GenSet};
use gqdham::gqd_group::{GqdElem, GqdGroup, Letter, Order, Token, Word};
use gqdham::hamilton::{finite_ham_path, hamiltonian_circle, hamiltonian_double_ray, GroupDoubleRay};
use gqdham::verify::{verify_circle, verify_coord_circle, verify_coord_ray, verify_finite_path, verify_ray};
use gqdham::walls::{
    cylinder_double_ray, cylinder_iso, cylinder_two_rays, cylinder_window, CoordGraph, CylinderParams, WallVertex,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn groups_for(factors: &[&[i64]]) -> Vec<GqdGroup> {
    let mut out = Vec::new();
    for f in factors {
        let k = FiniteAbelianGroup::new(f.to_vec()).unwrap();
        for beta in GqdGroup::legal_betas(&k).unwrap() {
            out.push(GqdGroup::new(k.clone(), beta).unwrap());
        }
    }
    out
}

fn test_groups() -> Vec<GqdGroup> {
    groups_for(&[&[], &[2], &[4], &[2, 2], &[6]])
}

fn label(g: &GqdGroup) -> String {
    format!("K={:?} beta={:?}", g.k_group().invariant_factors(), g.beta().coords())
}

fn random_k(g: &GqdGroup, rng: &mut ChaCha8Rng) -> Vec<i64> {
    g.k_group().invariant_factors().iter().map(|&m| rng.gen_range(0..m)).collect()
}

fn random_elem(g: &GqdGroup, rng: &mut ChaCha8Rng, imax: i64) -> GqdElem {
    let k = random_k(g, rng);
    g.elem(k, rng.gen_range(-imax..=imax), rng.gen_range(0..=1)).unwrap()
}

fn all_elems(g: &GqdGroup, imax: i64, eps: &[u8]) -> Vec<GqdElem> {
    let ks = g.k_group().enumerate().unwrap();
    let mut out = Vec::new();
    for k in &ks {
        for i in -imax..=imax {
            for &e in eps {
                out.push(GqdElem::new(k.clone(), i, e));
            }
        }
    }
    out
}

/// Letter-by-letter rewriting of `k aⁱ bᵉ · letter` using only the defining
/// relations `b k b⁻¹ = k⁻¹`, `b a b⁻¹ = a⁻¹`, `b² = β` and `a = b b'`.
struct Rewriter {
    moduli: Vec<i64>,
    beta: Vec<i64>,
}

impl Rewriter {
    fn new(g: &GqdGroup) -> Self {
        Rewriter {
            moduli: g.k_group().invariant_factors().to_vec(),
            beta: g.beta().coords().to_vec(),
        }
    }

    fn add_k(&self, st: &mut (Vec<i64>, i64, u8), c: &[i64], sign: i64) {
        for (j, m) in self.moduli.iter().enumerate() {
            st.0[j] = (st.0[j] + sign * c[j]).rem_euclid(*m);
        }
    }

    fn push(&self, st: &mut (Vec<i64>, i64, u8), letter: &Letter, inverse: bool) {
        match (letter, inverse) {
            (Letter::K(c), inv) => {
                // moving k past b inverts it
                let s = if inv { -1 } else { 1 } * if st.2 == 1 { -1 } else { 1 };
                self.add_k(st, c, s);
            }
            (Letter::A, inv) => {
                let s = if inv { -1 } else { 1 } * if st.2 == 1 { -1 } else { 1 };
                st.1 += s;
            }
            (Letter::B, false) => {
                if st.2 == 0 {
                    st.2 = 1;
                } else {
                    let beta = self.beta.clone();
                    self.add_k(st, &beta, 1);
                    st.2 = 0;
                }
            }
            // b⁻¹ = b³ = β b
            (Letter::B, true) => {
                let beta = self.beta.clone();
                self.push(st, &Letter::K(beta), false);
                self.push(st, &Letter::B, false);
            }
            // b' = b⁻¹ a
            (Letter::BPrime, false) => {
                self.push(st, &Letter::B, true);
                self.push(st, &Letter::A, false);
            }
            (Letter::BPrime, true) => {
                self.push(st, &Letter::A, true);
                self.push(st, &Letter::B, false);
            }
        }
    }

    fn eval(&self, w: &Word) -> GqdElem {
        let mut st = (vec![0; self.moduli.len()], 0i64, 0u8);
        for t in &w.0 {
            self.push(&mut st, &t.letter, t.inverse);
        }
        GqdElem::new(KElem(st.0), st.1, st.2)
    }
}

fn random_word(g: &GqdGroup, rng: &mut ChaCha8Rng, len: usize) -> Word {
    let rank = g.k_group().rank();
    let toks = (0..len)
        .map(|_| {
            let letter = match rng.gen_range(0..4) {
                0 => Letter::A,
                1 => Letter::B,
                2 => Letter::BPrime,
                // unreduced coordinates exercise the reduction too
                _ => Letter::K((0..rank).map(|_| rng.gen_range(-9..=9)).collect()),
            };
            Token {
                letter,
                inverse: rng.gen_bool(0.5),
            }
        })
        .collect();
    Word(toks)
}

/// Words equal to the identity, built from the defining relations.
fn relators(g: &GqdGroup, rng: &mut ChaCha8Rng) -> Vec<Word> {
    let rank = g.k_group().rank();
    let c: Vec<String> = (0..rank).map(|_| rng.gen_range(0..5).to_string()).collect();
    let k = format!("k({})", c.join(","));
    let beta: Vec<String> = g.beta().coords().iter().map(|x| x.to_string()).collect();
    let beta = format!("k({})", beta.join(","));
    [
        format!("b {k} b- {k}"),
        "b a b- a".to_string(),
        format!("b b {beta}-"),
        "b b' a-".to_string(),
        "a a-".to_string(),
        format!("b- b- {beta}"),
        "b' b a".to_string(),
    ]
    .iter()
    .map(|s| Word::parse(s).unwrap())
    .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let groups = test_groups();
    let mut collisions = 0usize;
    for g in &groups {
        let e = g.identity();
        for _ in 0..10_000 {
            let (x, y, z) = (random_elem(g, &mut rng, 100), random_elem(g, &mut rng, 100), random_elem(g, &mut rng, 100));
            ensure!(
                g.mul(&g.mul(&x, &y), &z) == g.mul(&x, &g.mul(&y, &z)),
                "{}: associativity fails at {x}, {y}, {z}",
                label(g)
            );
            ensure!(g.mul(&e, &x) == x && g.mul(&x, &e) == x, "{}: identity fails at {x}", label(g));
            ensure!(
                g.mul(&x, &g.inv(&x)) == e && g.mul(&g.inv(&x), &x) == e,
                "{}: inverse fails at {x}",
                label(g)
            );
        }
        let rw = Rewriter::new(g);
        let mut forms: HashMap<_, GqdElem> = HashMap::new();
        let rels: Vec<Word> = (0..8).flat_map(|_| relators(g, &mut rng)).collect();
        for _ in 0..10_000 {
            let len = rng.gen_range(0..=20);
            let w = random_word(g, &mut rng, len);
            let x = g.normalize_word(&w).map_err(|err| format!("{w}: {err}"))?;
            ensure!(x == rw.eval(&w), "{}: normalize_word({w}) = {x}, rewriting gives {}", label(g), rw.eval(&w));

            // a colliding word: the same word with a relator spliced in
            let rel = &rels[rng.gen_range(0..rels.len())];
            let at = rng.gen_range(0..=w.0.len());
            let mut w2 = w.0[..at].to_vec();
            w2.extend(rel.0.iter().cloned());
            w2.extend(w.0[at..].iter().cloned());
            let w2 = Word(w2);
            let y = g.normalize_word(&w2).unwrap();
            ensure!(rw.eval(&w2) == x && y == x, "{}: {w} and {w2} should collide", label(g));
            let nf = g.amalgam_normal_form(&x);
            ensure!(nf == g.amalgam_normal_form(&y), "{}: normal forms of {w} and {w2} differ", label(g));
            collisions += 1;

            ensure!(rw.eval(&nf.to_word()) == x, "{}: normal form of {x} evaluates elsewhere", label(g));
            ensure!(
                nf.tail.windows(2).all(|p| p[0] != p[1]),
                "{}: normal form tail of {x} does not alternate",
                label(g)
            );
            ensure!(
                !nf.tail.is_empty() || x.i == 0 && x.eps == 0,
                "{}: empty tail for {x} outside K",
                label(g)
            );
            if let Some(prev) = forms.insert(nf.clone(), x.clone()) {
                ensure!(prev == x, "{}: {prev} and {x} share a normal form", label(g));
            }
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(format!("{} groups, {collisions} colliding word pairs, {t:.2?}", groups.len()))
}

fn brute_order(g: &GqdGroup, x: &GqdElem) -> Option<u64> {
    let e = g.identity();
    let mut p = x.clone();
    for n in 1..=200u64 {
        if p == e {
            return Some(n);
        }
        p = g.mul(&p, x);
    }
    None
}

fn criterion_2() -> Outcome {
    let groups = groups_for(&[&[], &[2], &[3], &[4], &[2, 2], &[6], &[8], &[2, 4]]);
    let mut n = 0;
    for g in &groups {
        for x in all_elems(g, 10, &[0, 1]) {
            let brute = brute_order(g, &x);
            let got = g.order(&x);
            let want = match brute {
                Some(o) => Order::Finite(o),
                None => Order::Infinite,
            };
            ensure!(got == want, "{}: order({x}) = {got:?}, power iteration gives {want:?}", label(g));
            ensure!(g.is_torsion(&x) == brute.is_some(), "{}: is_torsion({x}) wrong", label(g));
            n += 1;
        }
    }
    Ok(format!("{n} elements in {} groups", groups.len()))
}

fn closed_in_window(w: &CayleyWindow, cycle: &[GqdElem], steps: &[GqdElem]) -> bool {
    (0..cycle.len()).all(|j| {
        let next = &cycle[(j + 1) % cycle.len()];
        match w.gens.index_of(&steps[j]) {
            Some(l) => w.has_edge(&cycle[j], next, l),
            None => false,
        }
    })
}

fn cycle_window(g: &GqdGroup, extra: &[&GqdElem]) -> CayleyWindow {
    let mut gens: Vec<GqdElem> = extra.iter().map(|x| (*x).clone()).collect();
    gens.push(g.a());
    gens.push(g.b());
    for j in 0..g.k_group().rank() {
        let mut c = vec![0; g.k_group().rank()];
        c[j] = 1;
        gens.push(g.elem(c, 0, 0).unwrap());
    }
    let s = GenSet::symmetric_closure(g, &gens).unwrap();
    build_window(g, &s, 5).unwrap()
}

fn check_six(g: &GqdGroup, rw: &Rewriter, s: [&GqdElem; 3]) -> Result<(), String> {
    let w = |x: &GqdElem| x.clone();
    // both sides evaluated by the rewriting oracle
    let lhs = eval_product(rw, &[w(s[0]), w(s[1]), w(s[2])]);
    let rhs = eval_product(rw, &[w(s[2]), w(s[1]), w(s[0])]);
    ensure!(lhs == rhs, "{}: s1s2s3 != s3s2s1 for {}, {}, {}", label(g), s[0], s[1], s[2]);
    ensure!(g.six_cycle_identity(s[0], s[1], s[2]).unwrap(), "{}: six_cycle_identity false", label(g));
    Ok(())
}

fn check_four(g: &GqdGroup, rw: &Rewriter, s1: &GqdElem, s2: &GqdElem) -> Result<(), String> {
    let lhs = eval_product(rw, &[s1.clone(), s2.clone()]);
    let rhs = eval_product(rw, &[g.inv(s2), s1.clone()]);
    ensure!(lhs == rhs, "{}: s1s2 != s2⁻¹s1 for {s1}, {s2}", label(g));
    ensure!(g.four_cycle_identity(s1, s2).unwrap(), "{}: four_cycle_identity false", label(g));
    Ok(())
}

fn elem_word(x: &GqdElem) -> Vec<Token> {
    let mut t = vec![Token {
        letter: Letter::K(x.k.coords().to_vec()),
        inverse: false,
    }];
    for _ in 0..x.i.abs() {
        t.push(Token {
            letter: Letter::A,
            inverse: x.i < 0,
        });
    }
    if x.eps == 1 {
        t.push(Token {
            letter: Letter::B,
            inverse: false,
        });
    }
    t
}

fn eval_product(rw: &Rewriter, xs: &[GqdElem]) -> GqdElem {
    rw.eval(&Word(xs.iter().flat_map(elem_word).collect()))
}

fn check_cycles_closed(g: &GqdGroup, rng: &mut ChaCha8Rng, s1: &GqdElem, s2: &GqdElem, s3: &GqdElem, four: &GqdElem) -> Result<(), String> {
    let w = cycle_window(g, &[s1, s2, s3, four]);
    let starts = [g.identity(), g.b(), g.a()];
    let start = &starts[rng.gen_range(0..starts.len())];
    let six = g.six_cycle(start, s1, s2, s3).unwrap();
    let steps = [s1.clone(), s2.clone(), s3.clone(), g.inv(s1), g.inv(s2), g.inv(s3)];
    ensure!(closed_in_window(&w, &six, &steps), "{}: 6-cycle {s1},{s2},{s3} not closed", label(g));
    let fc = g.four_cycle(start, s1, four).unwrap();
    let steps = [s1.clone(), four.clone(), g.inv(s1), four.clone()];
    ensure!(closed_in_window(&w, &fc, &steps), "{}: 4-cycle {s1},{four} not closed", label(g));
    Ok(())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let small = groups_for(&[&[], &[2], &[3], &[4], &[2, 2]]);
    let (mut sixes, mut fours, mut windows) = (0usize, 0usize, 0usize);
    for g in &small {
        let rw = Rewriter::new(g);
        let refl = all_elems(g, 4, &[1]);
        let rot = all_elems(g, 4, &[0]);
        for x in &refl {
            for y in &refl {
                for z in &refl {
                    check_six(g, &rw, [x, y, z])?;
                    sixes += 1;
                }
            }
            for y in &rot {
                check_four(g, &rw, x, y)?;
                fours += 1;
            }
        }
        for _ in 0..50 {
            let pick = |rng: &mut ChaCha8Rng| refl[rng.gen_range(0..refl.len())].clone();
            let (s1, s2, s3) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let four = rot[rng.gen_range(0..rot.len())].clone();
            if four == g.identity() {
                continue;
            }
            check_cycles_closed(g, &mut rng, &s1, &s2, &s3, &four)?;
            windows += 1;
        }
    }
    let wide = groups_for(&[&[6], &[8], &[2, 4], &[12], &[2, 6]]);
    for n in 0..10_000 {
        let g = &wide[n % wide.len()];
        let rw = Rewriter::new(g);
        let mut refl = || {
            let k = random_k(g, &mut rng);
            g.elem(k, rng.gen_range(-40..=40), 1).unwrap()
        };
        let (s1, s2, s3) = (refl(), refl(), refl());
        let k = random_k(g, &mut rng);
        let four = g.elem(k, rng.gen_range(-40..=40), 0).unwrap();
        check_six(g, &rw, [&s1, &s2, &s3])?;
        check_four(g, &rw, &s1, &four)?;
        if n % 50 == 0 && four != g.identity() {
            check_cycles_closed(g, &mut rng, &s1, &s2, &s3, &four)?;
            windows += 1;
        }
    }
    Ok(format!(
        "{sixes} six-cycle and {fours} four-cycle cases exhaustively, 10000 random samples, {windows} cycles closed in windows"
    ))
}

fn criterion_4() -> Outcome {
    let mut n = 0;
    let mut iso = 0;
    let mut slowest = Duration::ZERO;
    for k in 2..=8i64 {
        for l in 0..=10i64 {
            if (k + l) % 2 != 0 {
                continue;
            }
            let start = Instant::now();
            let p = CylinderParams::new(k, l).unwrap();
            let w = cylinder_window(p, -40, 40).unwrap();
            let r = cylinder_double_ray(p).map_err(|e| format!("({k},{l}): {e}"))?;
            let rep = verify_coord_ray(&w, &r, -30, 30).unwrap();
            ensure!(rep.passed, "({k},{l}) double ray: {rep:?}");
            let c = cylinder_two_rays(p).map_err(|e| format!("({k},{l}): {e}"))?;
            let rep = verify_coord_circle(&w, &c, -30, 30).unwrap();
            ensure!(rep.passed, "({k},{l}) two rays: {rep:?}");
            // the isomorphism exists whenever the target is a cylinder
            if let Ok(phi) = cylinder_iso(p) {
                let (src, dst) = (CoordGraph::cylinder(phi.source), CoordGraph::cylinder(phi.target));
                for v in w.vertices() {
                    let fv = phi.map(v);
                    ensure!(dst.contains(fv) && phi.inverse(fv) == v, "({k},{l}): iso not invertible at {v:?}");
                    for (u, _) in src.neighbors(v) {
                        ensure!(dst.edge_kind(fv, phi.map(u)).is_some(), "({k},{l}): edge {v:?}-{u:?} not preserved");
                    }
                    for (x, _) in dst.neighbors(fv) {
                        let u: WallVertex = phi.inverse(x);
                        ensure!(src.edge_kind(v, u).is_some(), "({k},{l}): target edge at {fv:?} not reflected");
                    }
                }
                iso += 1;
            }
            let t = start.elapsed();
            slowest = slowest.max(t);
            ensure!(t < Duration::from_secs(1), "({k},{l}) took {t:?}");
            n += 1;
        }
    }
    Ok(format!("{n} cylinders, {iso} isomorphisms checked, slowest {slowest:.2?}"))
}

struct Instance {
    name: &'static str,
    group: GqdGroup,
    gens: GenSet,
}

fn instance(name: &'static str, factors: &[i64], beta: &[i64], gens: &[(&[i64], i64, u8)]) -> Instance {
    let k = FiniteAbelianGroup::new(factors.to_vec()).unwrap();
    let beta = k.elem(beta.to_vec()).unwrap();
    let group = GqdGroup::new(k, beta).unwrap();
    let xs: Vec<GqdElem> = gens.iter().map(|(c, i, e)| group.elem(c.to_vec(), *i, *e).unwrap()).collect();
    let gens = GenSet::symmetric_closure(&group, &xs).unwrap_or_else(|e| panic!("{name}: {e}"));
    Instance { name, group, gens }
}

fn suite() -> Vec<Instance> {
    vec![
        instance("Dinf {b,b'}", &[], &[], &[(&[], 0, 1), (&[], -1, 1)]),
        instance("Dinf {a,b}", &[], &[], &[(&[], 1, 0), (&[], 0, 1)]),
        instance("Dinf {b,ab,a3b}", &[], &[], &[(&[], 0, 1), (&[], 1, 1), (&[], 3, 1)]),
        instance("Z2 b=0 {b,ab,kb}", &[2], &[0], &[(&[0], 0, 1), (&[0], 1, 1), (&[1], 0, 1)]),
        instance("Z2 b=1 {b,ab,k}", &[2], &[1], &[(&[0], 0, 1), (&[0], 1, 1), (&[1], 0, 0)]),
        instance("Z2 b=1 {a2b,ab}", &[2], &[1], &[(&[0], 2, 1), (&[0], 1, 1)]),
        instance("Z2 b=0 {a,b,k}", &[2], &[0], &[(&[0], 1, 0), (&[0], 0, 1), (&[1], 0, 0)]),
        instance("Z4 b=0 {b,ab,k}", &[4], &[0], &[(&[0], 0, 1), (&[0], 1, 1), (&[1], 0, 0)]),
        instance("Z4 b=2 {b,ab,kb}", &[4], &[2], &[(&[0], 0, 1), (&[0], 1, 1), (&[1], 0, 1)]),
        instance("Z4 b=2 {a,b,k}", &[4], &[2], &[(&[0], 1, 0), (&[0], 0, 1), (&[1], 0, 0)]),
        instance(
            "Z2xZ2 b=0 {b,ab,k1b,k2b}",
            &[2, 2],
            &[0, 0],
            &[(&[0, 0], 0, 1), (&[0, 0], 1, 1), (&[1, 0], 0, 1), (&[0, 1], 0, 1)],
        ),
        instance("Z2xZ2 b=(1,0) {b,ab,k2}", &[2, 2], &[1, 0], &[(&[0, 0], 0, 1), (&[0, 0], 1, 1), (&[0, 1], 0, 0)]),
        instance("Z2xZ2 b=(1,1) {k1a,b,k2b}", &[2, 2], &[1, 1], &[(&[1, 0], 1, 0), (&[0, 0], 0, 1), (&[0, 1], 0, 1)]),
        instance("Z6 b=3 {ka,b,k2b}", &[6], &[3], &[(&[1], 1, 0), (&[0], 0, 1), (&[2], 0, 1)]),
        instance("Z6 b=0 {b,ab,k2,k3}", &[6], &[0], &[(&[0], 0, 1), (&[0], 1, 1), (&[2], 0, 0), (&[3], 0, 0)]),
        instance("Z4 b=0 {a2,ab,b,k}", &[4], &[0], &[(&[0], 2, 0), (&[0], 1, 1), (&[0], 0, 1), (&[1], 0, 0)]),
    ]
}

fn case_name(inst: &Instance) -> &'static str {
    if inst.gens.len() < 3 {
        "base"
    } else {
        classify_case(&inst.group, &inst.gens).unwrap().name()
    }
}

fn criterion_5(suite: &[Instance], windows: &[CayleyWindow], rays: &mut Vec<GroupDoubleRay>) -> Outcome {
    let mut cases = HashSet::new();
    let mut slowest = Duration::ZERO;
    for (inst, w) in suite.iter().zip(windows) {
        let start = Instant::now();
        let ray = hamiltonian_double_ray(&inst.group, &inst.gens).map_err(|e| format!("{}: {e}", inst.name))?;
        let rep = verify_ray(w, &ray, 10).unwrap();
        ensure!(rep.passed, "{}: {rep:?}", inst.name);
        let t = start.elapsed();
        ensure!(t < Duration::from_secs(10), "{}: took {t:?}", inst.name);
        slowest = slowest.max(t);
        cases.insert(case_name(inst));
        rays.push(ray);
    }
    for c in ["base", "case1", "case2i", "case2ii"] {
        ensure!(cases.contains(c), "suite does not cover {c}");
    }
    let mut cases: Vec<_> = cases.into_iter().collect();
    cases.sort();
    Ok(format!("{} instances covering {cases:?}, slowest {slowest:.2?}", suite.len()))
}

fn criterion_6(suite: &[Instance], windows: &[CayleyWindow]) -> Outcome {
    let mut n = 0;
    for (inst, w) in suite.iter().zip(windows) {
        if inst.gens.len() < 3 {
            continue;
        }
        let c = hamiltonian_circle(&inst.group, &inst.gens).map_err(|e| format!("{}: {e}", inst.name))?;
        let rep = verify_circle(w, &c, 10).unwrap();
        ensure!(rep.passed, "{}: {rep:?}", inst.name);
        n += 1;
    }
    Ok(format!("{n} circles"))
}

/// Vertex set generated by `gens`, by breadth-first search.
fn closure(g: &GqdGroup, gens: &[GqdElem]) -> HashSet<GqdElem> {
    let mut seen = HashSet::from([g.identity()]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = g.mul(&x, s);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let all_k: &[&[i64]] = &[
        &[],
        &[2],
        &[3],
        &[4],
        &[2, 2],
        &[5],
        &[6],
        &[7],
        &[8],
        &[2, 4],
        &[2, 2, 2],
        &[9],
        &[3, 3],
        &[10],
        &[11],
        &[12],
        &[2, 6],
    ];
    let groups = groups_for(all_k);
    let (mut paths, mut thin) = (0usize, Vec::new());
    for g in &groups {
        let verts = all_elems(g, 0, &[0, 1]);
        // inverse classes of non-identity elements
        let mut classes: Vec<Vec<GqdElem>> = Vec::new();
        for x in &verts {
            if *x == g.identity() || classes.iter().any(|c| c.contains(x)) {
                continue;
            }
            let xi = g.inv(x);
            classes.push(if xi == *x { vec![xi] } else { vec![x.clone(), xi] });
        }
        let mut sets: Vec<Vec<GqdElem>> = Vec::new();
        let generating = |s: &[GqdElem]| closure(g, s).len() == verts.len();
        if classes.len() <= 10 {
            for mask in 1u32..(1 << classes.len()) {
                let s: Vec<GqdElem> =
                    (0..classes.len()).filter(|j| mask >> j & 1 == 1).flat_map(|j| classes[j].clone()).collect();
                if generating(&s) {
                    sets.push(s);
                }
            }
        } else {
            let mut seen = HashSet::new();
            for _ in 0..10_000 {
                if sets.len() == 8 {
                    break;
                }
                let n = rng.gen_range(1..=4);
                let mut pick: Vec<usize> = (0..n).map(|_| rng.gen_range(0..classes.len())).collect();
                pick.sort();
                pick.dedup();
                let s: Vec<GqdElem> = pick.iter().flat_map(|&j| classes[j].clone()).collect();
                if generating(&s) && seen.insert(pick) {
                    sets.push(s);
                }
            }
        }
        if sets.len() < 5 {
            // small groups simply have fewer generating sets; all of them are used
            ensure!(classes.len() <= 10, "{}: only {} generating sets sampled", label(g), sets.len());
            thin.push(format!("{}:{}", label(g), sets.len()));
        }
        for s in &sets {
            let path = finite_ham_path(g, &verts, s).map_err(|e| format!("{} S={s:?}: {e}", label(g)))?;
            let rep = verify_finite_path(g, &verts, s, &path);
            ensure!(rep.passed, "{} S={s:?}: {rep:?}", label(g));
            paths += 1;
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(5), "took {t:?}");
    Ok(format!(
        "{} groups, {paths} paths, {t:.2?}; exhaustive where fewer than 5 sets exist: {}",
        groups.len(),
        thin.join(" ")
    ))
}

fn mutate(ray: &GroupDoubleRay, kind: usize, rng: &mut ChaCha8Rng, ngens: usize) -> GroupDoubleRay {
    let mut r = ray.clone();
    let p = r.motif.len();
    let j = rng.gen_range(0..p);
    match kind {
        0 => {
            r.motif.remove(j);
            r.labels.remove(j);
        }
        1 => {
            let others: Vec<usize> = (0..p).filter(|&x| r.labels[x] != r.labels[j]).collect();
            if others.is_empty() {
                r.labels[j] = (r.labels[j] + 1) % ngens;
            } else {
                let o = others[rng.gen_range(0..others.len())];
                r.labels.swap(j, o);
            }
        }
        _ => {
            let x = r.motif[j].clone();
            let l = r.labels[j];
            r.motif.insert(j, x);
            r.labels.insert(j, l);
        }
    }
    r
}

fn criterion_8(suite: &[Instance], windows: &[CayleyWindow], rays: &[GroupDoubleRay]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut rejected = [0usize; 3];
    for t in 0..1000 {
        let n = t % suite.len();
        let kind = (t / suite.len()) % 3;
        let m = mutate(&rays[n], kind, &mut rng, suite[n].gens.len());
        let rep = verify_ray(&windows[n], &m, 10).unwrap();
        ensure!(!rep.passed, "{}: mutation {kind} accepted", suite[n].name);
        rejected[kind] += 1;
    }
    Ok(format!(
        "1000/1000 rejected (dropped {}, swapped labels {}, duplicated {})",
        rejected[0], rejected[1], rejected[2]
    ))
}

#[test]
fn acceptance() {
    let suite = suite();
    let windows: Vec<CayleyWindow> = suite.iter().map(|i| build_window(&i.group, &i.gens, 12).unwrap()).collect();
    let mut rays = Vec::new();

    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "group algebra", criterion_1()),
        (2, "torsion and order", criterion_2()),
        (3, "short-cycle identities", criterion_3()),
        (4, "cylinders", criterion_4()),
        (5, "Hamiltonian double rays", criterion_5(&suite, &windows, &mut rays)),
    ];
    results.push((6, "Hamiltonian circles", criterion_6(&suite, &windows)));
    results.push((7, "finite Hamiltonian paths", criterion_7()));
    results.push((
        8,
        "negative controls",
        if rays.len() == suite.len() {
            criterion_8(&suite, &windows, &rays)
        } else {
            Err("no rays to mutate".into())
        },
    ));

    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {n} ({name}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {msg}");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
