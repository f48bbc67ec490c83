//! Finite abelian groups given by invariant factors, and canonical
//! subgroups of `K ⊕ Z`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of elements `enumerate` will produce.
pub const K_ENUMERATE_BOUND: u64 = 4096;

/// Element of a finite abelian group: one residue per invariant factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KElem(pub Vec<i64>);

impl KElem {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// Element `(k, z)` of `K ⊕ Z`, i.e. `k·a^z` in additive notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KZElem {
    pub k: KElem,
    pub z: i64,
}

impl KZElem {
    pub fn new(k: KElem, z: i64) -> Self {
        KZElem { k, z }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<i64>,
}

impl FiniteAbelianGroup {
    pub fn new(invariant_factors: Vec<i64>) -> Result<Self> {
        if let Some(&bad) = invariant_factors.iter().find(|&&n| n < 1) {
            return Err(Error::InvalidFactor(bad));
        }
        Ok(FiniteAbelianGroup { invariant_factors })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn cyclic(n: i64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn invariant_factors(&self) -> &[i64] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors
            .iter()
            .fold(1u64, |acc, &n| acc.saturating_mul(n as u64))
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn zero(&self) -> KElem {
        KElem(vec![0; self.rank()])
    }

    /// Builds an element, rejecting out-of-range coordinates.
    pub fn elem(&self, coords: Vec<i64>) -> Result<KElem> {
        self.check_dim(coords.len())?;
        for (&c, &n) in coords.iter().zip(&self.invariant_factors) {
            if c < 0 || c >= n {
                return Err(Error::CoordinateOutOfRange { value: c, modulus: n });
            }
        }
        Ok(KElem(coords))
    }

    /// Builds an element, reducing every coordinate into range.
    pub fn reduce(&self, coords: Vec<i64>) -> Result<KElem> {
        self.check_dim(coords.len())?;
        Ok(KElem(
            coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&c, &n)| c.rem_euclid(n))
                .collect(),
        ))
    }

    pub fn contains(&self, x: &KElem) -> bool {
        x.0.len() == self.rank()
            && x
                .0
                .iter()
                .zip(&self.invariant_factors)
                .all(|(&c, &n)| (0..n).contains(&c))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, x: &KElem, y: &KElem) -> Result<KElem> {
        self.check_dim(x.0.len())?;
        self.check_dim(y.0.len())?;
        Ok(self.add(x, y))
    }

    /// Componentwise sum. Panics on a dimension mismatch; use
    /// [`checked_add`](Self::checked_add) for untrusted input.
    pub fn add(&self, x: &KElem, y: &KElem) -> KElem {
        assert_eq!(x.0.len(), self.rank(), "KElem dimension mismatch");
        assert_eq!(y.0.len(), self.rank(), "KElem dimension mismatch");
        KElem(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.invariant_factors)
                .map(|((&a, &b), &n)| (a + b).rem_euclid(n))
                .collect(),
        )
    }

    pub fn neg(&self, x: &KElem) -> KElem {
        KElem(
            x.0.iter()
                .zip(&self.invariant_factors)
                .map(|(&a, &n)| (-a).rem_euclid(n))
                .collect(),
        )
    }

    pub fn sub(&self, x: &KElem, y: &KElem) -> KElem {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &KElem, m: i64) -> KElem {
        KElem(
            x.0.iter()
                .zip(&self.invariant_factors)
                .map(|(&a, &n)| ((a as i128 * m as i128).rem_euclid(n as i128)) as i64)
                .collect(),
        )
    }

    /// Additive order of `x`.
    pub fn elem_order(&self, x: &KElem) -> u64 {
        let mut acc = x.clone();
        let mut q = 1u64;
        while !acc.is_zero() {
            acc = self.add(&acc, x);
            q += 1;
        }
        q
    }

    /// All elements in lexicographic order.
    pub fn enumerate(&self) -> Result<Vec<KElem>> {
        self.enumerate_bounded(K_ENUMERATE_BOUND)
    }

    pub fn enumerate_bounded(&self, bound: u64) -> Result<Vec<KElem>> {
        let size = self.order();
        if size > bound {
            return Err(Error::BoundExceeded { size, bound });
        }
        let mut out = Vec::with_capacity(size as usize);
        let mut cur = self.zero();
        loop {
            out.push(cur.clone());
            // odometer increment, last coordinate fastest
            let mut j = self.rank();
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                cur.0[j] += 1;
                if cur.0[j] < self.invariant_factors[j] {
                    break;
                }
                cur.0[j] = 0;
            }
        }
    }

    /// Subgroup generated by `gens`, fully enumerated and sorted.
    pub fn closure(&self, gens: &[KElem]) -> Vec<KElem> {
        let mut set: BTreeSet<KElem> = BTreeSet::new();
        set.insert(self.zero());
        let mut frontier = vec![self.zero()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn kz_add(&self, x: &KZElem, y: &KZElem) -> KZElem {
        KZElem::new(self.add(&x.k, &y.k), x.z.checked_add(y.z).expect("a-exponent overflow"))
    }

    pub fn kz_neg(&self, x: &KZElem) -> KZElem {
        KZElem::new(self.neg(&x.k), x.z.checked_neg().expect("a-exponent overflow"))
    }

    pub fn kz_sub(&self, x: &KZElem, y: &KZElem) -> KZElem {
        self.kz_add(x, &self.kz_neg(y))
    }

    pub fn kz_scale(&self, x: &KZElem, m: i64) -> KZElem {
        KZElem::new(self.scale(&x.k, m), x.z.checked_mul(m).expect("a-exponent overflow"))
    }
}

/// Subgroup `F + ⟨(k_ℓ, ℓ)⟩` of `K ⊕ Z` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSubgroup {
    /// The full subgroup `F = L ∩ K`, sorted.
    pub finite_part: Vec<KElem>,
    /// `(k_ℓ, ℓ)` with `ℓ > 0` minimal; `k_ℓ` is the least element of `k_ℓ + F`.
    pub inf_gen: Option<KZElem>,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    // returns (g, x, y) with a*x + b*y = g >= 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

impl LatticeSubgroup {
    pub fn trivial(g: &FiniteAbelianGroup) -> Self {
        LatticeSubgroup {
            finite_part: vec![g.zero()],
            inf_gen: None,
        }
    }

    /// The whole of `K ⊕ Z`.
    pub fn full(g: &FiniteAbelianGroup) -> Result<Self> {
        Ok(LatticeSubgroup {
            finite_part: g.enumerate()?,
            inf_gen: Some(KZElem::new(g.zero(), 1)),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.inf_gen.is_none()
    }

    pub fn finite_order(&self) -> u64 {
        self.finite_part.len() as u64
    }

    /// Generators read back from the canonical form.
    pub fn generators(&self) -> Vec<KZElem> {
        let mut out: Vec<KZElem> = self
            .finite_part
            .iter()
            .filter(|k| !k.is_zero())
            .map(|k| KZElem::new(k.clone(), 0))
            .collect();
        out.extend(self.inf_gen.iter().cloned());
        out
    }

    fn finite_contains(&self, k: &KElem) -> bool {
        self.finite_part.binary_search(k).is_ok()
    }

    fn least_in_coset(&self, g: &FiniteAbelianGroup, k: &KElem) -> KElem {
        self.finite_part
            .iter()
            .map(|f| g.add(k, f))
            .min()
            .expect("finite part contains zero")
    }

    pub fn contains(&self, g: &FiniteAbelianGroup, x: &KZElem) -> bool {
        match &self.inf_gen {
            None => x.z == 0 && self.finite_contains(&x.k),
            Some(gen) => {
                if x.z % gen.z != 0 {
                    return false;
                }
                let r = g.kz_sub(x, &g.kz_scale(gen, x.z / gen.z));
                self.finite_contains(&r.k)
            }
        }
    }

    /// Canonical representative of the coset `x + L`.
    pub fn coset_rep(&self, g: &FiniteAbelianGroup, x: &KZElem) -> KZElem {
        let mut y = x.clone();
        if let Some(gen) = &self.inf_gen {
            let q = y.z.div_euclid(gen.z);
            y = g.kz_sub(&y, &g.kz_scale(gen, q));
        }
        KZElem::new(self.least_in_coset(g, &y.k), y.z)
    }

    /// `self ⊆ other`.
    pub fn is_subgroup_of(&self, g: &FiniteAbelianGroup, other: &LatticeSubgroup) -> bool {
        self.generators().iter().all(|x| other.contains(g, x))
    }

    /// Index `[ambient : self]`, or `None` when it is infinite or `self ⊄ ambient`.
    pub fn index_in(&self, g: &FiniteAbelianGroup, ambient: &LatticeSubgroup) -> Option<u64> {
        if !self.is_subgroup_of(g, ambient) {
            return None;
        }
        let fin = ambient.finite_order() / self.finite_order();
        match (&self.inf_gen, &ambient.inf_gen) {
            (None, None) => Some(fin),
            (Some(s), Some(a)) => Some(fin * (s.z / a.z) as u64),
            (None, Some(_)) => None,
            (Some(_), None) => unreachable!("infinite subgroup of a finite one"),
        }
    }

    /// Sum of two subgroups.
    pub fn join(&self, g: &FiniteAbelianGroup, other: &LatticeSubgroup) -> LatticeSubgroup {
        let mut gens = self.generators();
        gens.extend(other.generators());
        lattice_canonicalize(g, &gens)
    }
}

/// Canonical form of the subgroup of `K ⊕ Z` generated by `gens`.
pub fn lattice_canonicalize(g: &FiniteAbelianGroup, gens: &[KZElem]) -> LatticeSubgroup {
    // realise ℓ = gcd of z-components as an explicit combination
    let mut comb: Option<KZElem> = None;
    for x in gens.iter().filter(|x| x.z != 0) {
        comb = Some(match comb {
            None => {
                if x.z < 0 {
                    g.kz_neg(x)
                } else {
                    x.clone()
                }
            }
            Some(c) => {
                let (_, s, t) = ext_gcd(c.z, x.z);
                g.kz_add(&g.kz_scale(&c, s), &g.kz_scale(x, t))
            }
        });
    }
    let finite_gens: Vec<KElem> = match &comb {
        None => gens.iter().map(|x| x.k.clone()).collect(),
        Some(c) => gens
            .iter()
            .map(|x| g.kz_sub(x, &g.kz_scale(c, x.z / c.z)).k)
            .collect(),
    };
    let finite_part = g.closure(&finite_gens);
    let mut out = LatticeSubgroup {
        finite_part,
        inf_gen: None,
    };
    if let Some(c) = comb {
        let k = out.least_in_coset(g, &c.k);
        out.inf_gen = Some(KZElem::new(k, c.z));
    }
    out
}

pub fn lattice_contains(g: &FiniteAbelianGroup, sub: &LatticeSubgroup, x: &KZElem) -> bool {
    sub.contains(g, x)
}

/// Order of `x` modulo `sub`, searched up to `[ambient : sub]`.
pub fn quotient_cyclic_order(
    g: &FiniteAbelianGroup,
    sub: &LatticeSubgroup,
    x: &KZElem,
    ambient: &LatticeSubgroup,
) -> Result<u64> {
    let bound = sub.index_in(g, ambient).ok_or_else(|| {
        Error::Precondition("subgroup is not of finite index in the ambient lattice".into())
    })?;
    if !ambient.contains(g, x) {
        return Err(Error::Precondition("element not in the ambient lattice".into()));
    }
    let mut acc = x.clone();
    for q in 1..=bound {
        if sub.contains(g, &acc) {
            return Ok(q);
        }
        acc = g.kz_add(&acc, x);
    }
    Err(Error::BoundExceeded {
        size: bound + 1,
        bound,
    })
}
