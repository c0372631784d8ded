//! The affine Weyl group acting on `ĥᵉ`, its dual and the real roots.
//!
//! Elements are words over `I` (1-based letters); `s_{i1} s_{i2} .. s_{ik}`
//! acts by applying the last letter first. Roots are integer coefficient
//! vectors over all simple roots `a_1 .. a_{l+1}`.

use crate::error::{Error, Result};
use crate::q::qi;
use crate::rootdata::{CartanVector, Functional, NodeSet, RootDatum};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub const DEFAULT_LENGTH_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeylWord {
    pub letters: Vec<usize>,
}

impl WeylWord {
    pub fn new(letters: Vec<usize>) -> Self {
        WeylWord { letters }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn then(&self, i: usize) -> Self {
        let mut l = self.letters.clone();
        l.push(i);
        WeylWord { letters: l }
    }

    pub fn concat(&self, o: &WeylWord) -> Self {
        WeylWord { letters: self.letters.iter().chain(&o.letters).copied().collect() }
    }

    pub fn inverse(&self) -> Self {
        WeylWord { letters: self.letters.iter().rev().copied().collect() }
    }
}

/// A real root `α + nδ`, with `α` a finite root in simple-root coordinates of `A(I_o)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RealRoot {
    pub finite: Vec<i64>,
    pub level: i64,
}

impl RealRoot {
    pub fn from_coeffs(rd: &RootDatum, b: &[i64]) -> Self {
        let n = rd.n();
        let level = b[n - 1];
        let finite = (0..n - 1).map(|k| b[k] - level * rd.null.d[k]).collect();
        RealRoot { finite, level }
    }

    pub fn coeffs(&self, rd: &RootDatum) -> Vec<i64> {
        let n = rd.n();
        let mut b: Vec<i64> = (0..n - 1).map(|k| self.finite[k] + self.level * rd.null.d[k]).collect();
        b.push(self.level);
        b
    }

    /// Whether the pair names a real root (`α ∈ R_o`) or an imaginary one (`α = 0`, `n != 0`).
    pub fn validate(&self, rd: &RootDatum) -> Result<()> {
        if self.finite.len() + 1 != rd.n() {
            return Err(Error::DatumMismatch { expected: rd.n() - 1, found: self.finite.len() });
        }
        let zero = self.finite.iter().all(|&c| c == 0);
        if (zero && self.level != 0) || (!zero && rd.finite.is_root(&self.finite)) {
            Ok(())
        } else {
            Err(Error::NotARoot(format!("{:?} + {}δ", self.finite, self.level)))
        }
    }

    pub fn is_real(&self) -> bool {
        self.finite.iter().any(|&c| c != 0)
    }

    pub fn is_positive(&self) -> bool {
        self.level > 0 || (self.level == 0 && self.finite.iter().all(|&c| c >= 0) && self.finite.iter().any(|&c| c > 0))
    }
}

/// `B_w = w R_+`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BorelSubset {
    pub word: WeylWord,
}

fn check_word(rd: &RootDatum, w: &WeylWord) -> Result<()> {
    w.letters.iter().try_for_each(|&i| rd.check_node(i))
}

/// `<ǎ_i, β>` for `β = Σ b_k a_k`.
pub fn coroot_pairing(rd: &RootDatum, i: usize, b: &[i64]) -> i64 {
    (0..rd.n()).map(|k| rd.a(i, k + 1) * b[k]).sum()
}

pub fn reflect_root(rd: &RootDatum, i: usize, b: &mut [i64]) {
    let c = coroot_pairing(rd, i, b);
    b[i - 1] -= c;
}

pub fn simple(rd: &RootDatum, i: usize) -> Vec<i64> {
    let mut b = vec![0; rd.n()];
    b[i - 1] = 1;
    b
}

pub fn is_positive_coeffs(b: &[i64]) -> bool {
    b.iter().all(|&x| x >= 0) && b.iter().any(|&x| x > 0)
}

fn act_root_unchecked(rd: &RootDatum, w: &[usize], b: &[i64]) -> Vec<i64> {
    let mut v = b.to_vec();
    for &i in w.iter().rev() {
        reflect_root(rd, i, &mut v);
    }
    v
}

/// `w(β)` in simple-root coordinates.
pub fn act_root(rd: &RootDatum, w: &WeylWord, b: &[i64]) -> Result<Vec<i64>> {
    check_word(rd, w)?;
    if b.len() != rd.n() {
        return Err(Error::DatumMismatch { expected: rd.n(), found: b.len() });
    }
    Ok(act_root_unchecked(rd, &w.letters, b))
}

pub fn act_real_root(rd: &RootDatum, w: &WeylWord, r: &RealRoot) -> Result<RealRoot> {
    r.validate(rd)?;
    Ok(RealRoot::from_coeffs(rd, &act_root(rd, w, &r.coeffs(rd))?))
}

/// `s_i(h) = h - <h, a_i> ǎ_i`, last letter first.
pub fn act(rd: &RootDatum, w: &WeylWord, h: &CartanVector) -> Result<CartanVector> {
    check_word(rd, w)?;
    rd.check_vec(h)?;
    let mut v = h.clone();
    for &i in w.letters.iter().rev() {
        let c = v.dot(&rd.simple_root(i));
        v.coroot[i - 1] -= c;
    }
    Ok(v)
}

/// Contragredient action `s_i(φ) = φ - <ǎ_i, φ> a_i`.
pub fn act_functional(rd: &RootDatum, w: &WeylWord, phi: &Functional) -> Result<Functional> {
    check_word(rd, w)?;
    rd.check_fn(phi)?;
    let mut v = phi.clone();
    for &i in w.letters.iter().rev() {
        let c = v.m[i - 1].clone();
        v = &v - &rd.simple_root(i).scaled(&c);
    }
    Ok(v)
}

/// A vector with trivial stabilizer: `Σ i λ̌_i`.
pub fn regular_vector(rd: &RootDatum) -> CartanVector {
    let p: Vec<_> = (1..=rd.n()).map(|i| qi(i as i64)).collect();
    rd.from_coweight_coords(&p, &qi(0))
}

/// Image of the regular vector, a complete invariant of the group element.
pub fn element_key(rd: &RootDatum, w: &WeylWord) -> Result<CartanVector> {
    act(rd, w, &regular_vector(rd))
}

pub fn weyl_eq(rd: &RootDatum, u: &WeylWord, v: &WeylWord) -> Result<bool> {
    Ok(element_key(rd, u)? == element_key(rd, v)?)
}

/// Appends `s_i` to a reduced word, keeping it reduced.
/// Returns `true` when the length went up.
fn push_reduced(rd: &RootDatum, r: &mut Vec<usize>, i: usize) -> bool {
    let image = act_root_unchecked(rd, r, &simple(rd, i));
    if is_positive_coeffs(&image) {
        r.push(i);
        return true;
    }
    // exchange condition: find the letter that flips a_i
    let mut beta = simple(rd, i);
    for k in (0..r.len()).rev() {
        if beta == simple(rd, r[k]) {
            r.remove(k);
            return false;
        }
        reflect_root(rd, r[k], &mut beta);
    }
    unreachable!("a reduced word sending a_i negative must contain the exchanged letter")
}

/// `(ℓ(w), reduced word for w)`, failing once the reduced prefix exceeds `cap`.
pub fn length_and_reduce_capped(rd: &RootDatum, w: &WeylWord, cap: usize) -> Result<(usize, WeylWord)> {
    check_word(rd, w)?;
    let mut r = Vec::new();
    for &i in &w.letters {
        push_reduced(rd, &mut r, i);
        if r.len() > cap {
            return Err(Error::LengthCap(cap));
        }
    }
    Ok((r.len(), WeylWord::new(r)))
}

pub fn length_and_reduce(rd: &RootDatum, w: &WeylWord) -> Result<(usize, WeylWord)> {
    length_and_reduce_capped(rd, w, DEFAULT_LENGTH_CAP)
}

pub fn length(rd: &RootDatum, w: &WeylWord) -> Result<usize> {
    Ok(length_and_reduce(rd, w)?.0)
}

/// The positive roots sent negative by `w`.
pub fn inversion_set(rd: &RootDatum, w: &WeylWord) -> Result<Vec<Vec<i64>>> {
    let (_, r) = length_and_reduce(rd, w)?;
    // for w = s_{i1} .. s_{ik} reduced: s_{ik} .. s_{i(j+1)} (a_{ij})
    let l = &r.letters;
    Ok((0..l.len())
        .map(|j| {
            let tail: Vec<usize> = l[j + 1..].iter().rev().copied().collect();
            act_root_unchecked(rd, &tail, &simple(rd, l[j]))
        })
        .collect())
}

/// The minimal-length representative of `w W(J)`.
pub fn min_coset_rep(rd: &RootDatum, w: &WeylWord, j: &NodeSet) -> Result<WeylWord> {
    rd.check_set(j)?;
    if j.len() == rd.n() {
        return Err(Error::FullSet);
    }
    let (_, r) = length_and_reduce(rd, w)?;
    let mut r = r.letters;
    loop {
        let bad = j.iter().copied().find(|&k| !is_positive_coeffs(&act_root_unchecked(rd, &r, &simple(rd, k))));
        match bad {
            Some(k) => {
                let grew = push_reduced(rd, &mut r, k);
                debug_assert!(!grew);
            }
            None => return Ok(WeylWord::new(r)),
        }
    }
}

/// `(B_{w s_α}, w(a_α))` when `w(a_α) > 0`.
pub fn borel_adjacency(rd: &RootDatum, b: &BorelSubset, alpha: usize) -> Result<(BorelSubset, RealRoot)> {
    rd.check_node(alpha)?;
    let root = act_root(rd, &b.word, &simple(rd, alpha))?;
    if !is_positive_coeffs(&root) {
        return Err(Error::Orientation(alpha));
    }
    Ok((BorelSubset { word: b.word.then(alpha) }, RealRoot::from_coeffs(rd, &root)))
}

/// `B_w ∖ B_{w'}`: roots positive for the first Borel subset and negative for the second.
pub fn separating_roots(rd: &RootDatum, w: &WeylWord, w2: &WeylWord) -> Result<Vec<Vec<i64>>> {
    // B_w ∩ -B_{w'} = w (R_+ ∩ u R_-) with u = w^{-1} w', i.e. w applied to Inv(u^{-1})
    let uinv = w2.inverse().concat(w);
    inversion_set(rd, &uinv)?.iter().map(|b| act_root(rd, w, b)).collect()
}

/// All elements of length at most `max_len`, as reduced words, in BFS order.
pub fn elements_up_to(rd: &RootDatum, max_len: usize) -> Vec<WeylWord> {
    let mut out = vec![WeylWord::identity()];
    let mut seen: HashSet<CartanVector> = HashSet::new();
    seen.insert(regular_vector(rd));
    let mut frontier = vec![WeylWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 1..=rd.n() {
                if is_positive_coeffs(&act_root_unchecked(rd, &w.letters, &simple(rd, i))) {
                    let ws = w.then(i);
                    if seen.insert(element_key(rd, &ws).expect("letters are valid")) {
                        next.push(ws);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
