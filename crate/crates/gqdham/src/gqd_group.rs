//! The two-ended group `G = A ∗_K B` parameterised by `(K, β)`, elements
//! in normal form `k·aⁱ·b^ε`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian_core::{lattice_canonicalize, FiniteAbelianGroup, KElem, KZElem, LatticeSubgroup};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GqdGroup {
    k: FiniteAbelianGroup,
    beta: KElem,
}

/// `k·aⁱ·b^eps`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GqdElem {
    pub k: KElem,
    pub i: i64,
    pub eps: u8,
}

impl GqdElem {
    pub fn new(k: KElem, i: i64, eps: u8) -> Self {
        GqdElem { k, i, eps }
    }

    pub fn kz(&self) -> KZElem {
        KZElem::new(self.k.clone(), self.i)
    }

    pub fn from_kz(x: &KZElem) -> Self {
        GqdElem::new(x.k.clone(), x.z, 0)
    }
}

impl fmt::Display for GqdElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.k.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ";{};{})", self.i, self.eps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Letter {
    A,
    B,
    BPrime,
    K(Vec<i64>),
}

/// A letter with an optional inverse marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub letter: Letter,
    pub inverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Token>);

impl Word {
    /// Parses whitespace-separated tokens `a a- b b' k(c1,...)`; any token may
    /// carry a trailing `-` for its inverse.
    pub fn parse(s: &str) -> Result<Word> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (body, inverse) = match tok.strip_suffix('-') {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let letter = match body {
                "a" => Letter::A,
                "b" => Letter::B,
                "b'" => Letter::BPrime,
                _ => {
                    let inner = body
                        .strip_prefix("k(")
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or_else(|| Error::MalformedToken(tok.to_string()))?;
                    let coords = if inner.trim().is_empty() {
                        Vec::new()
                    } else {
                        inner
                            .split(',')
                            .map(|c| c.trim().parse::<i64>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| Error::MalformedToken(tok.to_string()))?
                    };
                    Letter::K(coords)
                }
            };
            out.push(Token { letter, inverse });
        }
        Ok(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, t) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            match &t.letter {
                Letter::A => write!(f, "a")?,
                Letter::B => write!(f, "b")?,
                Letter::BPrime => write!(f, "b'")?,
                Letter::K(c) => {
                    let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                    write!(f, "k({})", parts.join(","))?
                }
            }
            if t.inverse {
                write!(f, "-")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransversalLetter {
    B,
    BPrime,
}

/// `head · tail[0] · tail[1] ⋯` with the tail alternating between `b` and `b'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmalgamNormalForm {
    pub head: KElem,
    pub tail: Vec<TransversalLetter>,
}

impl AmalgamNormalForm {
    pub fn to_word(&self) -> Word {
        let mut w = vec![Token {
            letter: Letter::K(self.head.0.clone()),
            inverse: false,
        }];
        for l in &self.tail {
            w.push(Token {
                letter: match l {
                    TransversalLetter::B => Letter::B,
                    TransversalLetter::BPrime => Letter::BPrime,
                },
                inverse: false,
            });
        }
        Word(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupClass {
    /// Contained in `K⟨a⟩`.
    Abelian(LatticeSubgroup),
    /// Index-2 abelian part and one representative outside `K⟨a⟩`.
    Gqd(LatticeSubgroup, GqdElem),
}

impl GqdGroup {
    pub fn new(k: FiniteAbelianGroup, beta: KElem) -> Result<Self> {
        if !k.contains(&beta) {
            return Err(Error::DimensionMismatch {
                expected: k.rank(),
                got: beta.0.len(),
            });
        }
        if !k.add(&beta, &beta).is_zero() {
            return Err(Error::InvalidBeta);
        }
        Ok(GqdGroup { k, beta })
    }

    /// `D∞ = Z₂ ∗ Z₂`.
    pub fn infinite_dihedral() -> Self {
        GqdGroup {
            k: FiniteAbelianGroup::trivial(),
            beta: KElem(vec![]),
        }
    }

    pub fn k_group(&self) -> &FiniteAbelianGroup {
        &self.k
    }

    pub fn beta(&self) -> &KElem {
        &self.beta
    }

    pub fn is_infinite_dihedral(&self) -> bool {
        self.k.is_trivial() && self.beta.is_zero()
    }

    /// All legal values of β, i.e. elements with `2β = 0`.
    pub fn legal_betas(k: &FiniteAbelianGroup) -> Result<Vec<KElem>> {
        Ok(k
            .enumerate()?
            .into_iter()
            .filter(|x| k.add(x, x).is_zero())
            .collect())
    }

    pub fn contains(&self, x: &GqdElem) -> bool {
        self.k.contains(&x.k) && x.eps <= 1
    }

    pub fn identity(&self) -> GqdElem {
        GqdElem::new(self.k.zero(), 0, 0)
    }

    pub fn a(&self) -> GqdElem {
        GqdElem::new(self.k.zero(), 1, 0)
    }

    pub fn a_inv(&self) -> GqdElem {
        GqdElem::new(self.k.zero(), -1, 0)
    }

    pub fn b(&self) -> GqdElem {
        GqdElem::new(self.k.zero(), 0, 1)
    }

    /// `b' = β·a⁻¹·b`, so that `a = b·b'`.
    pub fn b_prime(&self) -> GqdElem {
        GqdElem::new(self.beta.clone(), -1, 1)
    }

    pub fn from_k(&self, k: KElem) -> GqdElem {
        GqdElem::new(k, 0, 0)
    }

    /// Builds an element, reducing coordinates of `k`.
    pub fn elem(&self, k: Vec<i64>, i: i64, eps: u8) -> Result<GqdElem> {
        if eps > 1 {
            return Err(Error::Precondition(format!("eps must be 0 or 1, got {eps}")));
        }
        Ok(GqdElem::new(self.k.reduce(k)?, i, eps))
    }

    pub fn checked_mul(&self, x: &GqdElem, y: &GqdElem) -> Result<GqdElem> {
        if !self.contains(x) || !self.contains(y) {
            return Err(Error::Precondition("element does not belong to this group".into()));
        }
        Ok(self.mul(x, y))
    }

    pub fn mul(&self, x: &GqdElem, y: &GqdElem) -> GqdElem {
        let kg = &self.k;
        if x.eps == 0 {
            GqdElem::new(kg.add(&x.k, &y.k), add_i(x.i, y.i), y.eps)
        } else if y.eps == 0 {
            GqdElem::new(kg.sub(&x.k, &y.k), sub_i(x.i, y.i), 1)
        } else {
            GqdElem::new(kg.add(&kg.sub(&x.k, &y.k), &self.beta), sub_i(x.i, y.i), 0)
        }
    }

    pub fn inv(&self, x: &GqdElem) -> GqdElem {
        if x.eps == 0 {
            GqdElem::new(self.k.neg(&x.k), x.i.checked_neg().expect("a-exponent overflow"), 0)
        } else {
            GqdElem::new(self.k.add(&x.k, &self.beta), x.i, 1)
        }
    }

    pub fn pow(&self, x: &GqdElem, n: i64) -> GqdElem {
        let base = if n < 0 { self.inv(x) } else { x.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    pub fn mul_all<'a>(&self, xs: impl IntoIterator<Item = &'a GqdElem>) -> GqdElem {
        xs.into_iter().fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    pub fn normalize_word(&self, w: &Word) -> Result<GqdElem> {
        let mut acc = self.identity();
        for t in &w.0 {
            let x = match &t.letter {
                Letter::A => self.a(),
                Letter::B => self.b(),
                Letter::BPrime => self.b_prime(),
                Letter::K(c) => {
                    if c.len() != self.k.rank() {
                        return Err(Error::MalformedToken(format!("k({c:?})")));
                    }
                    self.from_k(self.k.reduce(c.clone())?)
                }
            };
            let x = if t.inverse { self.inv(&x) } else { x };
            acc = self.mul(&acc, &x);
        }
        Ok(acc)
    }

    pub fn amalgam_normal_form(&self, x: &GqdElem) -> AmalgamNormalForm {
        use TransversalLetter::{BPrime, B};
        // a = b b' and a⁻¹ = b' b; β is central, so any surplus b² is
        // absorbed into the head.
        let n = x.i.unsigned_abs() as usize;
        let mut head = x.k.clone();
        let mut tail = Vec::with_capacity(2 * n + 1);
        if x.i >= 0 {
            for _ in 0..n {
                tail.push(B);
                tail.push(BPrime);
            }
            if x.eps == 1 {
                tail.push(B);
            }
        } else {
            for _ in 0..n {
                tail.push(BPrime);
                tail.push(B);
            }
            if x.eps == 1 {
                // (b'b)ⁿ b = (b'b)ⁿ⁻¹ b' β
                tail.pop();
                head = self.k.add(&head, &self.beta);
            }
        }
        AmalgamNormalForm { head, tail }
    }

    pub fn is_torsion(&self, x: &GqdElem) -> bool {
        x.eps == 1 || x.i == 0
    }

    pub fn order(&self, x: &GqdElem) -> Order {
        if x.eps == 1 {
            Order::Finite(if self.beta.is_zero() { 2 } else { 4 })
        } else if x.i == 0 {
            Order::Finite(self.k.elem_order(&x.k))
        } else {
            Order::Infinite
        }
    }

    /// `s₁s₂s₃ = s₃s₂s₁` for `s₁, s₂, s₃` outside `K⟨a⟩`.
    pub fn six_cycle_identity(&self, s1: &GqdElem, s2: &GqdElem, s3: &GqdElem) -> Result<bool> {
        if s1.eps != 1 || s2.eps != 1 || s3.eps != 1 {
            return Err(Error::Precondition("six-cycle identity needs eps = 1".into()));
        }
        Ok(self.mul_all([s1, s2, s3]) == self.mul_all([s3, s2, s1]))
    }

    /// Vertices `g, gs₁, gs₁s₂, gs₁s₂s₃, gs₃s₂, gs₃`; consecutive ones (and the
    /// last and first) differ by `s₁, s₂, s₃, s₁⁻¹, s₂⁻¹, s₃⁻¹`.
    pub fn six_cycle(&self, g: &GqdElem, s1: &GqdElem, s2: &GqdElem, s3: &GqdElem) -> Result<[GqdElem; 6]> {
        self.six_cycle_identity(s1, s2, s3)?;
        Ok([
            g.clone(),
            self.mul(g, s1),
            self.mul_all([g, s1, s2]),
            self.mul_all([g, s1, s2, s3]),
            self.mul_all([g, s3, s2]),
            self.mul(g, s3),
        ])
    }

    /// `s₁s₂ = s₂⁻¹s₁` for `s₁` outside and `s₂` inside `K⟨a⟩`.
    pub fn four_cycle_identity(&self, s1: &GqdElem, s2: &GqdElem) -> Result<bool> {
        if s1.eps != 1 || s2.eps != 0 {
            return Err(Error::Precondition("four-cycle identity needs eps(s1)=1, eps(s2)=0".into()));
        }
        Ok(self.mul(s1, s2) == self.mul(&self.inv(s2), s1))
    }

    /// Vertices `g, gs₁, gs₁s₂, gs₂⁻¹`, closed by an `s₂`-edge back to `g`.
    pub fn four_cycle(&self, g: &GqdElem, s1: &GqdElem, s2: &GqdElem) -> Result<[GqdElem; 4]> {
        self.four_cycle_identity(s1, s2)?;
        Ok([
            g.clone(),
            self.mul(g, s1),
            self.mul_all([g, s1, s2]),
            self.mul(g, &self.inv(s2)),
        ])
    }

    pub fn conjugate_in_k(&self, g: &GqdElem, k: &KElem) -> KElem {
        if g.eps == 0 {
            k.clone()
        } else {
            self.k.neg(k)
        }
    }

    /// Classifies `⟨X⟩`, optionally modulo a finite subgroup `kernel ≤ K`
    /// that is added to the abelian part.
    pub fn classify_subgroup(&self, xs: &[GqdElem]) -> SubgroupClass {
        self.classify_subgroup_mod(xs, &[])
    }

    pub fn classify_subgroup_mod(&self, xs: &[GqdElem], kernel: &[KElem]) -> SubgroupClass {
        let mut gens: Vec<KZElem> = kernel.iter().map(|k| KZElem::new(k.clone(), 0)).collect();
        let rep = xs.iter().find(|x| x.eps == 1).cloned();
        match &rep {
            None => {
                gens.extend(xs.iter().map(|x| x.kz()));
                SubgroupClass::Abelian(lattice_canonicalize(&self.k, &gens))
            }
            Some(t) => {
                // Schreier generators for the transversal {1, t}
                let t_inv = self.inv(t);
                for x in xs {
                    if x.eps == 0 {
                        gens.push(x.kz());
                        gens.push(self.mul_all([t, x, &t_inv]).kz());
                    } else {
                        gens.push(self.mul(x, &t_inv).kz());
                        gens.push(self.mul(t, x).kz());
                    }
                }
                SubgroupClass::Gqd(lattice_canonicalize(&self.k, &gens), t.clone())
            }
        }
    }

    /// True iff `X` generates all of `G`.
    pub fn generates(&self, xs: &[GqdElem]) -> Result<bool> {
        Ok(match self.classify_subgroup(xs) {
            SubgroupClass::Abelian(_) => false,
            SubgroupClass::Gqd(l, _) => l == LatticeSubgroup::full(&self.k)?,
        })
    }
}

fn add_i(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("a-exponent overflow")
}

fn sub_i(a: i64, b: i64) -> i64 {
    a.checked_sub(b).expect("a-exponent overflow")
}
