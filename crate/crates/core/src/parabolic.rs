//! Standard parabolic subsets `P_J` and the functionals attached to them.

use crate::error::{Error, Result};
use crate::q::{QMat, Q};
use crate::rootdata::{CartanVector, Functional, NodeSet, RootDatum};
use crate::weyl::{is_positive_coeffs, RealRoot};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoData {
    /// `ρ(P) = Σ_{j ∈ J} ω^J_j`.
    pub rho_of_p: Functional,
    /// `ρ_P = ρ - ρ(P)`.
    pub rho_p: Functional,
    /// `κ_P(a_i)` for `i ∉ J`.
    pub kappa: BTreeMap<usize, Q>,
    /// `d_P(D) = <D, ρ(P)>`.
    pub d_d: Q,
}

fn check_proper(rd: &RootDatum, j: &NodeSet) -> Result<()> {
    rd.check_set(j)?;
    if j.len() == rd.n() {
        return Err(Error::FullSet);
    }
    Ok(())
}

fn check_nested(rd: &RootDatum, j: &NodeSet, k: &NodeSet) -> Result<()> {
    rd.check_set(j)?;
    rd.check_set(k)?;
    if !j.is_subset(k) {
        return Err(Error::Nesting(format!("{j:?} is not contained in {k:?}")));
    }
    Ok(())
}

/// `ρ(P_J)`; by convention `ρ(Ĝ) = ρ`.
pub fn rho_of(rd: &RootDatum, j: &NodeSet) -> Result<Functional> {
    rd.check_set(j)?;
    if j.len() == rd.n() {
        return Ok(rd.rho());
    }
    Ok(j.iter().fold(Functional::zero(rd.n()), |acc, &d| &acc + &rd.finite_weight(j, d)))
}

pub fn rho_data(rd: &RootDatum, j: &NodeSet) -> Result<RhoData> {
    check_proper(rd, j)?;
    let rho_of_p = rho_of(rd, j)?;
    let rho_p = &rd.rho() - &rho_of_p;
    let kappa: BTreeMap<usize, Q> =
        (1..=rd.n()).filter(|i| !j.contains(i)).map(|i| (i, Q::one() - &rho_of_p.m[i - 1])).collect();
    let d_d = rd.d_vec().dot(&rho_of_p);
    let out = RhoData { rho_of_p, rho_p, kappa, d_d };
    debug_assert_eq!(out.rho_p, out.from_sum(rd));
    Ok(out)
}

impl RhoData {
    /// `Σ κ_P(α) λ_α - d_P(D) δ`.
    pub fn from_sum(&self, rd: &RootDatum) -> Functional {
        let base = rd.delta().scaled(&-self.d_d.clone());
        self.kappa.iter().fold(base, |acc, (&i, k)| &acc + &rd.lambda(i).scaled(k))
    }
}

/// A basis of `S_J = {Z ∈ ĥᵉ : <Z, a_j> = 0 for j ∈ J}`.
pub fn annihilator_basis(rd: &RootDatum, j: &NodeSet) -> Vec<CartanVector> {
    let n = rd.n();
    let rows: Vec<Functional> = j.iter().map(|&k| rd.simple_root(k)).collect();
    let m = QMat::from_fn(rows.len(), n + 1, |r, c| if c < n { rows[r].m[c].clone() } else { rows[r].delta.clone() });
    if rows.is_empty() {
        return (0..=n)
            .map(|c| {
                let mut v = CartanVector::zero(n);
                if c < n {
                    v.coroot[c] = Q::one();
                } else {
                    v.d = Q::one();
                }
                v
            })
            .collect();
    }
    m.nullspace().into_iter().map(|v| CartanVector::new(v[..n].to_vec(), v[n].clone())).collect()
}

/// `ρ_P^Q` for `P = P_J ⊂ Q = P_K`, as the functional `ρ(Q) - ρ(P)` on all of `ĥᵉ`.
///
/// On `S_J` this agrees with the restriction of `ρ(Q)`; both facts are checked
/// on a basis of `S_J` before returning. `K = I` gives `ρ_P`.
pub fn rho_pq(rd: &RootDatum, j: &NodeSet, k: &NodeSet) -> Result<Functional> {
    check_nested(rd, j, k)?;
    check_proper(rd, j)?;
    let rq = rho_of(rd, k)?;
    let rp = rho_of(rd, j)?;
    let out = &rq - &rp;
    let rho_p = &rd.rho() - &rp;
    let rho_q = &rd.rho() - &rq;
    for z in annihilator_basis(rd, j) {
        let residual = z.dot(&rho_p) - z.dot(&rho_q) - z.dot(&out);
        assert!(residual.is_zero(), "ρ_P = ρ_Q + ρ_P^Q fails on S_J");
        assert_eq!(z.dot(&out), z.dot(&rq), "ρ_P^Q differs from ρ(Q) on S_J");
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raghunathan {
    pub coeffs: BTreeMap<usize, Q>,
    pub mu: Functional,
}

/// `λ_d = Σ_{j ∈ J} c_j a_j + μ` with `c_j >= 0`, `μ` dominant and orthogonal to `ǎ_j`, `j ∈ J`.
pub fn raghunathan(rd: &RootDatum, d: usize, j: &NodeSet) -> Result<Raghunathan> {
    rd.check_node(d)?;
    check_proper(rd, j)?;
    let (coeffs, mu) = if j.contains(&d) {
        let c = rd.finite_weight_coeffs(j, d);
        let coeffs: BTreeMap<usize, Q> = j.iter().copied().zip(c).collect();
        (coeffs, &rd.lambda(d) - &rd.finite_weight(j, d))
    } else {
        (j.iter().map(|&k| (k, Q::zero())).collect(), rd.lambda(d))
    };
    assert!(coeffs.values().all(|c| !c.is_negative()), "negative coefficient");
    for i in 1..=rd.n() {
        let v = &mu.m[i - 1];
        assert!(!v.is_negative(), "<ǎ_{i}, μ> < 0");
        assert!(!j.contains(&i) || v.is_zero(), "<ǎ_{i}, μ> != 0 for i in J");
    }
    Ok(Raghunathan { coeffs, mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootClass {
    Semisimple,
    Nilpotent,
    Outside,
}

/// Membership of a root in `P_J = R_+ ⊔ [Δ(J)]_-`, split into `P_J^s = [Δ(J)]`
/// and `P_J^n = P_J ∖ P_J^s`.
pub fn root_in_pj(rd: &RootDatum, root: &RealRoot, j: &NodeSet) -> Result<RootClass> {
    check_proper(rd, j)?;
    root.validate(rd)?;
    Ok(classify_coeffs(&root.coeffs(rd), j))
}

pub fn classify_coeffs(b: &[i64], j: &NodeSet) -> RootClass {
    let on_j = b.iter().enumerate().all(|(k, &c)| c == 0 || j.contains(&(k + 1)));
    if on_j {
        RootClass::Semisimple
    } else if is_positive_coeffs(b) {
        RootClass::Nilpotent
    } else {
        RootClass::Outside
    }
}

/// Every root `α + nδ` (real or imaginary) with `|n| <= max_level` and height
/// `Σ |b_k| <= max_height`, as simple-root coefficient vectors.
pub fn bounded_roots(rd: &RootDatum, max_height: i64, max_level: i64) -> Vec<Vec<i64>> {
    let n = rd.n();
    let mut finite: Vec<Vec<i64>> = vec![vec![0; n - 1]];
    for r in &rd.finite.positive {
        finite.push(r.clone());
        finite.push(r.iter().map(|x| -x).collect());
    }
    let mut out = Vec::new();
    for lvl in -max_level..=max_level {
        for f in &finite {
            if lvl == 0 && f.iter().all(|&x| x == 0) {
                continue;
            }
            let b = RealRoot { finite: f.clone(), level: lvl }.coeffs(rd);
            if b.iter().map(|x| x.abs()).sum::<i64>() <= max_height {
                out.push(b);
            }
        }
    }
    out
}

/// The `s` and `n` parts of a root subset: `X^s = X ∩ -X`, `X^n = X ∖ X^s`.
pub fn split_sn(x: &HashSet<Vec<i64>>) -> (HashSet<Vec<i64>>, HashSet<Vec<i64>>) {
    let s: HashSet<Vec<i64>> = x.iter().filter(|b| x.contains(&neg(b))).cloned().collect();
    let nn = x.difference(&s).cloned().collect();
    (s, nn)
}

fn neg(b: &[i64]) -> Vec<i64> {
    b.iter().map(|x| -x).collect()
}

/// Checks the restriction/induction correspondence for `Q = P_J ⊂ P = P_K` on a
/// bounded window of roots. Returns the number of roots examined.
pub fn check_restriction_induction(rd: &RootDatum, j: &NodeSet, k: &NodeSet, height: i64, level: i64) -> Result<usize> {
    check_nested(rd, j, k)?;
    check_proper(rd, k)?;
    let window = bounded_roots(rd, height, level);
    // the window is closed under negation, so X ∩ -X is computed faithfully
    let member = |b: &Vec<i64>, s: &NodeSet| classify_coeffs(b, s) != RootClass::Outside;
    let p: HashSet<Vec<i64>> = window.iter().filter(|b| member(b, k)).cloned().collect();
    let qq: HashSet<Vec<i64>> = window.iter().filter(|b| member(b, j)).cloned().collect();
    let (ps, pn) = split_sn(&p);
    let (qs, qn) = split_sn(&qq);
    // r(Q) = Q ∩ P^s, i(R) = R ∪ P^n; r(Q) sits inside P^s, so its n-part is Q^n ∩ P^s
    let r: HashSet<Vec<i64>> = qq.intersection(&ps).cloned().collect();
    let (rs, rn) = split_sn(&r);
    let i_r: HashSet<Vec<i64>> = r.union(&pn).cloned().collect();
    let (is, in_) = split_sn(&i_r);
    let ok = rs == qs
        && rn == qn.intersection(&ps).cloned().collect::<HashSet<_>>()
        && is == rs
        && in_ == rn.union(&pn).cloned().collect::<HashSet<_>>()
        && i_r == qq
        && qs == window.iter().filter(|b| classify_coeffs(b, j) == RootClass::Semisimple).cloned().collect();
    if !ok {
        return Err(Error::Invalid(format!("restriction/induction mismatch for {j:?} ⊂ {k:?}")));
    }
    Ok(window.len())
}

/// `λ_i` pairs with `ρ_{P_i}` as `κ_i` on `ĥ` (no `δ` part).
pub fn kappa_ratio(rd: &RootDatum, i: usize) -> Result<Q> {
    let j: NodeSet = (1..=rd.n()).filter(|&k| k != i).collect();
    let data = rho_data(rd, &j)?;
    let k = data.kappa[&i].clone();
    assert_eq!(data.rho_p.m, rd.lambda(i).scaled(&k).m);
    Ok(k)
}

pub fn all_proper_subsets(rd: &RootDatum) -> Vec<NodeSet> {
    let n = rd.n();
    (0u32..(1 << n) - 1).map(|mask| (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect()).collect()
}
