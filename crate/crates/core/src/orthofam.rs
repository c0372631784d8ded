//! Orthogonal families `(Y_B)` indexed by finitely many Borel subsets `B_w = w R_+`.

use crate::error::{Error, Result};
use crate::q::Q;
use crate::rootdata::{CartanVector, RootDatum, VectorJson};
use crate::weyl::{act, element_key, is_positive_coeffs, length_and_reduce, simple, act_root, WeylWord};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalFamily {
    pub entries: Vec<(WeylWord, CartanVector)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub from: WeylWord,
    pub to: WeylWord,
    /// `Y_from - Y_to = r * from(ǎ_α)`; `None` when the difference is not on that line.
    pub r: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    pub regular: bool,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    word: WeylWord,
    vector: VectorJson,
}

impl OrthogonalFamily {
    fn index(&self, rd: &RootDatum) -> Result<HashMap<CartanVector, usize>> {
        let mut m = HashMap::new();
        for (k, (w, y)) in self.entries.iter().enumerate() {
            rd.check_vec(y)?;
            if m.insert(element_key(rd, w)?, k).is_some() {
                return Err(Error::Invalid(format!("Borel subset {:?} listed twice", w.letters)));
            }
        }
        Ok(m)
    }

    pub fn to_json(&self, rd: &RootDatum) -> Result<serde_json::Value> {
        let v: Vec<EntryJson> = self
            .entries
            .iter()
            .map(|(w, y)| Ok(EntryJson { word: w.clone(), vector: rd.vector_json(y, "coroot")? }))
            .collect::<Result<_>>()?;
        Ok(serde_json::to_value(v).expect("serializable"))
    }

    pub fn from_json(rd: &RootDatum, v: &serde_json::Value) -> Result<Self> {
        let raw: Vec<EntryJson> =
            serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("family: {e}")))?;
        let entries = raw
            .into_iter()
            .map(|e| Ok((e.word, rd.vector_from_json(&e.vector)?)))
            .collect::<Result<_>>()?;
        Ok(OrthogonalFamily { entries })
    }
}

/// `r` with `d = r v`, if any (`v != 0`).
fn ratio(d: &CartanVector, v: &CartanVector) -> Option<Q> {
    let (k, vk) = v.coroot.iter().enumerate().find(|(_, x)| !x.is_zero())?;
    let r = &d.coroot[k] / vk;
    (d == &v.scaled(&r)).then_some(r)
}

/// `(Y_w - Y_{w s_α}, w(ǎ_α))`.
fn edge(rd: &RootDatum, w: &WeylWord, alpha: usize, yw: &CartanVector, yn: &CartanVector) -> Result<(CartanVector, CartanVector)> {
    Ok((yw - yn, act(rd, w, &rd.coroot(alpha))?))
}

/// Checks `Y_{B_1} - Y_{B_2} = r α̌(B_1, B_2)` with `r >= 0` for every adjacent pair in the support.
pub fn verify_family(rd: &RootDatum, f: &OrthogonalFamily) -> Result<Verification> {
    if f.entries.len() < 2 {
        return Err(Error::EmptySupport);
    }
    let idx = f.index(rd)?;
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut violations = Vec::new();
    let mut regular = true;
    for (a, (w, yw)) in f.entries.iter().enumerate() {
        for alpha in 1..=rd.n() {
            let ws = w.then(alpha);
            let Some(&b) = idx.get(&element_key(rd, &ws)?) else { continue };
            if !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            // the relation is symmetric under swapping the pair, so one orientation suffices
            let (d, v) = edge(rd, w, alpha, yw, &f.entries[b].1)?;
            match ratio(&d, &v) {
                Some(r) if !r.is_negative() => regular &= r.is_positive(),
                r => {
                    regular = false;
                    violations.push(Violation { from: w.clone(), to: f.entries[b].0.clone(), r });
                }
            }
        }
    }
    Ok(Verification { valid: violations.is_empty(), regular: regular && violations.is_empty(), pairs_checked: seen.len(), violations })
}

/// `Y_{B_w} = w T` over all `w` with `ℓ(w) <= max_len`.
pub fn from_weyl_orbit(rd: &RootDatum, t: &CartanVector, max_len: usize) -> Result<OrthogonalFamily> {
    rd.check_vec(t)?;
    if let Some(i) = (1..=rd.n()).find(|&i| t.dot(&rd.simple_root(i)).is_negative()) {
        return Err(Error::NotDominant(i));
    }
    let entries: Vec<(WeylWord, CartanVector)> = crate::weyl::elements_up_to(rd, max_len)
        .into_iter()
        .map(|w| {
            let y = act(rd, &w, t).expect("valid word");
            (w, y)
        })
        .collect();
    let fam = OrthogonalFamily { entries };
    if fam.entries.len() >= 2 {
        let v = verify_family(rd, &fam)?;
        assert!(v.valid, "Weyl orbit of a dominant vector must be orthogonal");
    }
    Ok(fam)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTerm {
    /// The separating root, in simple-root coordinates.
    pub root: Vec<i64>,
    pub coroot: CartanVector,
    pub coeff: Q,
}

/// `Y_B - Y_{B'} = Σ n_a ǎ` along the chain `w, w s_{b1}, w s_{b1} s_{b2}, ..` given
/// by a reduced word `b1 b2 ..` of `w^{-1} w'`.
pub fn chain_witness(rd: &RootDatum, f: &OrthogonalFamily, w: &WeylWord, w2: &WeylWord) -> Result<Vec<WitnessTerm>> {
    let idx = f.index(rd)?;
    let lookup = |x: &WeylWord| -> Result<&CartanVector> {
        let k = idx.get(&element_key(rd, x)?).ok_or(Error::ChainLeavesSupport)?;
        Ok(&f.entries[*k].1)
    };
    let (_, u) = length_and_reduce(rd, &w.inverse().concat(w2))?;
    let mut cur = w.clone();
    let mut out = Vec::new();
    for &b in &u.letters {
        let next = cur.then(b);
        let (d, v) = edge(rd, &cur, b, lookup(&cur)?, lookup(&next)?)?;
        let root = act_root(rd, &cur, &simple(rd, b))?;
        // root ∈ B_w ∩ -B_{w'}
        debug_assert!(is_positive_coeffs(&act_root(rd, &w.inverse(), &root)?));
        debug_assert!(!is_positive_coeffs(&act_root(rd, &w2.inverse(), &root)?));
        let coeff = ratio(&d, &v)
            .filter(|r| !r.is_negative())
            .ok_or_else(|| Error::Invalid(format!("family fails the orthogonality relation at {:?}", cur.letters)))?;
        out.push(WitnessTerm { root, coroot: v, coeff });
        cur = next;
    }
    Ok(out)
}

pub fn witness_sum(rd: &RootDatum, terms: &[WitnessTerm]) -> CartanVector {
    terms.iter().fold(CartanVector::zero(rd.n()), |acc, t| &acc + &t.coroot.scaled(&t.coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::{q, qi};

    fn w(l: &[usize]) -> WeylWord {
        WeylWord::new(l.to_vec())
    }

    #[test]
    fn constant_family() {
        let r = RootDatum::affine_sl(2);
        let y = r.d_vec();
        let f = OrthogonalFamily { entries: vec![(w(&[]), y.clone()), (w(&[1]), y.clone()), (w(&[2]), y)] };
        let v = verify_family(&r, &f).unwrap();
        assert!(v.valid && !v.regular);
        assert_eq!(v.pairs_checked, 2);
    }

    #[test]
    fn negative_coefficient_is_a_violation() {
        let r = RootDatum::affine_sl(2);
        let f = OrthogonalFamily { entries: vec![(w(&[]), CartanVector::zero(2)), (w(&[1]), r.coroot(1))] };
        let v = verify_family(&r, &f).unwrap();
        assert!(!v.valid);
        assert_eq!(v.violations[0].r, Some(qi(-1)));
        let f = OrthogonalFamily { entries: vec![(w(&[]), CartanVector::zero(2)), (w(&[1]), r.d_vec())] };
        assert_eq!(verify_family(&r, &f).unwrap().violations[0].r, None);
        let single = OrthogonalFamily { entries: vec![(w(&[]), r.d_vec())] };
        assert!(matches!(verify_family(&r, &single), Err(Error::EmptySupport)));
    }

    #[test]
    fn orbit_families() {
        let r = RootDatum::affine_sl(2);
        let f = from_weyl_orbit(&r, &r.d_vec(), 1).unwrap();
        let y_s2 = f.entries.iter().find(|(x, _)| x == &w(&[2])).unwrap().1.clone();
        assert_eq!(y_s2, &r.d_vec() - &r.coroot(2));
        let v = verify_family(&r, &from_weyl_orbit(&r, &r.d_vec(), 3).unwrap()).unwrap();
        assert!(v.valid && !v.regular);
        let zero = from_weyl_orbit(&r, &CartanVector::zero(2), 2).unwrap();
        assert!(zero.entries.iter().all(|(_, y)| y.is_zero()));
        let t = &r.coroot(1).scaled(&q(1, 2)) + &r.d_vec().scaled(&qi(2));
        let v = verify_family(&r, &from_weyl_orbit(&r, &t, 4).unwrap()).unwrap();
        assert!(v.valid && v.regular);
        assert!(matches!(from_weyl_orbit(&r, &-&r.d_vec(), 1), Err(Error::NotDominant(2))));
    }

    #[test]
    fn chains() {
        let r = RootDatum::affine_sl(2);
        let t = &r.coroot(1).scaled(&q(1, 2)) + &r.d_vec().scaled(&qi(2));
        let f = from_weyl_orbit(&r, &t, 3).unwrap();
        assert!(chain_witness(&r, &f, &w(&[1]), &w(&[1])).unwrap().is_empty());
        let one = chain_witness(&r, &f, &w(&[]), &w(&[1])).unwrap();
        assert_eq!(one.len(), 1);
        let two = chain_witness(&r, &f, &w(&[]), &w(&[2, 1])).unwrap();
        assert_eq!(two.iter().map(|t| t.coeff.clone()).collect::<Vec<_>>(), vec![qi(1), qi(1)]);
        let diff = &f.entries[0].1 - &act(&r, &w(&[2, 1]), &t).unwrap();
        assert_eq!(witness_sum(&r, &two), diff);
        assert!(matches!(chain_witness(&r, &f, &w(&[]), &w(&[1, 2, 1, 2])), Err(Error::ChainLeavesSupport)));
    }
}
