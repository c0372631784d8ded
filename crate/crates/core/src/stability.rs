//! Canonical pairs at the level of coordinates: the cells `Â⁺_{P,(0,t)}`, the
//! criterion for `(P, e)`, degrees of `Q`-instability over supplied candidates,
//! and the pieces of `𝔅(P)`.

use crate::corners::{torus_corner_contains, CornerPoint, TorusPoint};
use crate::error::{Error, Result};
use crate::expq::{Monomial, PosReal};
use crate::halfplane::{canonical_pair, deg_inst, im_at_cusp, CanonicalPair, Cusp, HPoint};
use crate::loopu::IMCoords;
use crate::parabolic::{rho_data, rho_pq};
use crate::q::Q;
use crate::rootdata::{CartanVector, Functional, NodeSet, RootDatum};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;

fn fmt_set(j: &NodeSet) -> String {
    format!("{:?}", j.iter().collect::<Vec<_>>())
}

fn check_proper(rd: &RootDatum, j: &NodeSet) -> Result<()> {
    rd.check_set(j)?;
    if j.len() == rd.n() {
        return Err(Error::FullSet);
    }
    Ok(())
}

/// `a^λ` for an interior torus point, as an exact monomial in its coordinates.
pub fn character(rd: &RootDatum, a: &TorusPoint, lambda: &Functional) -> Result<Monomial> {
    let TorusPoint::Interior { s, z } = a else {
        return Err(Error::Invalid("characters are only evaluated on interior torus points".into()));
    };
    rd.check_fn(lambda)?;
    let (basis, _) = rd.coweight_basis();
    let m = s.iter().zip(&basis).fold(Monomial::one(), |m, (si, w)| m.mul_pow(si, &w.dot(lambda)));
    Ok(m.mul_pow(z, &rd.central().dot(lambda)))
}

/// `exp(H)`.
pub fn torus_exp(rd: &RootDatum, h: &CartanVector) -> TorusPoint {
    TorusPoint::exp(rd, &CornerPoint::Interior(h.clone()))
}

fn check_in_ap(rd: &RootDatum, a: &TorusPoint, j: &NodeSet) -> Result<()> {
    for &k in j {
        if character(rd, a, &rd.simple_root(k))?.cmp_rational(&Q::one()) != Ordering::Equal {
            return Err(Error::WrongParabolic(k));
        }
    }
    Ok(())
}

/// `a ∈ Â⁺_{P,(0,t)}`: `a^α < t` for `α ∈ Δ_P` and `a^ρ < 1`.
pub fn ap_cell_contains(rd: &RootDatum, a: &TorusPoint, j: &NodeSet, t: &Q) -> Result<bool> {
    check_proper(rd, j)?;
    if !t.is_positive() || t > &Q::one() {
        return Err(Error::Invalid("t must lie in (0, 1]".into()));
    }
    check_in_ap(rd, a, j)?;
    for i in (1..=rd.n()).filter(|i| !j.contains(i)) {
        if character(rd, a, &rd.simple_root(i))?.cmp_rational(t) != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(character(rd, a, &rd.rho())?.cmp_rational(&Q::one()) == Ordering::Less)
}

/// A point of `X_{M_P}` for the Levis that have an oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeviPoint {
    Trivial,
    HalfPlane(HPoint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorosphericalPoint {
    pub parabolic: NodeSet,
    /// On a corner stratum `K` this is a point of `X_{M_{P_K}}`, otherwise of `X_{M_P}`.
    pub levi: LeviPoint,
    pub a: TorusPoint,
    /// Carried along, never consulted.
    pub u: Option<IMCoords>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeviOracle {
    /// `M_P` is a torus: everything is semi-stable.
    Trivial,
    /// Semi-simple rank one: decided on the half-plane.
    HalfPlane,
}

/// Semi-stability oracles keyed by parabolic type, frozen at construction.
#[derive(Debug, Clone)]
pub struct LeviRegistry {
    oracles: BTreeMap<NodeSet, LeviOracle>,
}

impl LeviRegistry {
    /// `∅` and every single node; a one-node Levi has semi-simple rank one.
    pub fn standard(rd: &RootDatum) -> Self {
        let mut oracles = BTreeMap::new();
        oracles.insert(NodeSet::new(), LeviOracle::Trivial);
        for i in 1..=rd.n() {
            oracles.insert(NodeSet::from([i]), LeviOracle::HalfPlane);
        }
        LeviRegistry { oracles }
    }

    fn oracle(&self, j: &NodeSet) -> Result<LeviOracle> {
        self.oracles.get(j).copied().ok_or_else(|| Error::UndecidableLevi(fmt_set(j)))
    }

    fn point<'a>(&self, j: &NodeSet, m: &'a LeviPoint) -> Result<(LeviOracle, Option<&'a HPoint>)> {
        let o = self.oracle(j)?;
        match (o, m) {
            (LeviOracle::Trivial, LeviPoint::Trivial) => Ok((o, None)),
            (LeviOracle::HalfPlane, LeviPoint::HalfPlane(z)) => Ok((o, Some(z))),
            _ => Err(Error::Invalid(format!("Levi point does not match the Levi of {}", fmt_set(j)))),
        }
    }

    /// `m ∈ X^{ss}_{M_P}`.
    pub fn semistable(&self, j: &NodeSet, m: &LeviPoint) -> Result<bool> {
        Ok(match self.point(j, m)? {
            (_, None) => true,
            (_, Some(z)) => deg_inst(z).semistable,
        })
    }

    /// `m ∈ X_{M_Q}(*P, e)` for `P = P_J ⊆ Q = P_K`.
    pub fn in_star_cell(&self, j: &NodeSet, k: &NodeSet, m: &LeviPoint) -> Result<bool> {
        if j == k {
            return self.semistable(j, m);
        }
        match self.point(k, m)? {
            // the Borel of the rank-one Levi with the trivial coset is the cusp at ∞
            (LeviOracle::HalfPlane, Some(z)) if j.is_empty() => Ok(canonical_pair(z) == CanonicalPair::Borel(Cusp::infinity())),
            _ => Err(Error::UndecidableLevi(format!("{} inside {}", fmt_set(j), fmt_set(k)))),
        }
    }
}

/// `(P, e)` is the canonical pair: the Levi point is semi-stable and `a ∈ Â⁺_{P,(0,1)}`.
pub fn check_canonical(rd: &RootDatum, reg: &LeviRegistry, j: &NodeSet, p: &HorosphericalPoint) -> Result<bool> {
    if &p.parabolic != j {
        return Err(Error::Invalid(format!("point is given for {} not {}", fmt_set(&p.parabolic), fmt_set(j))));
    }
    let in_cell = ap_cell_contains(rd, &p.a, j, &Q::one())?;
    Ok(reg.semistable(j, &p.levi)? && in_cell)
}

/// One candidate `(P_J ⊂ P_K, H)` for the degree of `Q`-instability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub j: NodeSet,
    pub k: NodeSet,
    pub h: CartanVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegQ {
    pub value: Q,
    pub index: usize,
}

/// `min <ρ_P^Q, H>` over the supplied candidates; ties go to the larger `J`, then
/// the lexicographically smaller `J`, then `K`, then input order.
pub fn deg_q_inst_over(rd: &RootDatum, cands: &[Candidate]) -> Result<DegQ> {
    if cands.is_empty() {
        return Err(Error::Empty);
    }
    let mut scored = Vec::with_capacity(cands.len());
    for (idx, c) in cands.iter().enumerate() {
        rd.check_vec(&c.h)?;
        if c.j == c.k {
            return Err(Error::Nesting(format!("{} must be a proper subset of {}", fmt_set(&c.j), fmt_set(&c.k))));
        }
        let v = c.h.dot(&rho_pq(rd, &c.j, &c.k)?);
        scored.push((v, idx));
    }
    let key = |&(ref v, idx): &(Q, usize)| {
        let c = &cands[idx];
        (v.clone(), Reverse(c.j.len()), c.j.iter().copied().collect::<Vec<_>>(), c.k.iter().copied().collect::<Vec<_>>(), idx)
    };
    let (value, index) = scored.into_iter().min_by_key(key).expect("nonempty");
    Ok(DegQ { value, index })
}

/// `deg + ȟ m_c`: how the `Ĝ`-level degree moves under `exp(m_c c)`.
pub fn central_shift(rd: &RootDatum, deg: &Q, m_c: &Q) -> Q {
    deg + rd.dual_coxeter() * m_c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyLimit {
    /// `η(s)` with `s = e^{-r}`.
    pub s: PosReal,
    pub h: CartanVector,
    /// `<ρ, H_∞>`.
    pub degree: Q,
    pub semistable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemistableFamily {
    pub h: CartanVector,
    pub a: TorusPoint,
    pub in_cell: bool,
    pub limit: FamilyLimit,
}

/// `H_n = -(1/n) c - r D` in `Â⁺_{P_o,(0,1)}` and its limit `η(e^{-r})`.
pub fn semistable_family(rd: &RootDatum, n: u64, r: &Q) -> Result<SemistableFamily> {
    if n == 0 || !r.is_positive() {
        return Err(Error::Invalid("need n >= 1 and r > 0".into()));
    }
    let io: NodeSet = (1..rd.n()).collect();
    let dr = rd.d_vec().scaled(r);
    let h = &rd.central().scaled(&-Q::new(1.into(), n.into())) - &dr;
    let a = torus_exp(rd, &h);
    let in_cell = ap_cell_contains(rd, &a, &io, &Q::one())?;
    let h_inf = -&dr;
    let degree = h_inf.dot(&rd.rho());
    // the limit lies in the closure of the cell, where deg_inst = <ρ, H_P> <= 0, and
    // semi-stability is deg_inst >= 0
    let semistable = degree.is_zero();
    let limit = FamilyLimit { s: PosReal::exp(-r.clone()), h: h_inf, degree, semistable };
    Ok(SemistableFamily { h, a, in_cell, limit })
}

/// `M = (ȟ C + Σ n_i b)/min n_i + 1` with `ρ_o = Σ n_i a_i` and `b >= |log t|`.
pub fn rho_threshold(rd: &RootDatum, c: &Q, log_t_bound: &Q) -> Q {
    let n = rd.rho_o_root_coeffs();
    let sum: Q = n.iter().sum();
    let min = n.iter().min().expect("at least one finite node").clone();
    (rd.dual_coxeter() * c + sum * log_t_bound) / min + Q::one()
}

/// `<ρ_{P_i}, H>` for each maximal parabolic `P_i = P_{I∖{i}}`.
pub fn maximal_rho_pairings(rd: &RootDatum, h: &CartanVector) -> Result<Vec<Q>> {
    (1..=rd.n())
        .map(|i| {
            let j: NodeSet = (1..=rd.n()).filter(|&k| k != i).collect();
            Ok(h.dot(&rho_data(rd, &j)?.rho_p))
        })
        .collect()
}

/// `<λ_i, H> >= -r d_i / κ_i` for every `i`, where `r = -<δ, H>`.
pub fn ss_inequalities(rd: &RootDatum, h: &CartanVector) -> Result<Vec<bool>> {
    let r = -h.dot(&rd.delta());
    (1..=rd.n())
        .map(|i| {
            let j: NodeSet = (1..=rd.n()).filter(|&k| k != i).collect();
            let data = rho_data(rd, &j)?;
            let kappa = &data.kappa[&i];
            Ok(h.dot(&rd.lambda(i)) >= -(&r * &data.d_d) / kappa)
        })
        .collect()
}

/// The criterion for `(B, m)` in finite `SL2`, on `γ_m z`: `(a^α < 1, a^ρ < 1)`
/// with `a^α = 1/Im` and `a^ρ = Im^{-1/2}`.
pub fn rank_one_criterion(z: &HPoint, m: &Cusp) -> (bool, bool) {
    let y = im_at_cusp(z, m);
    let a_alpha = y.recip();
    let a_rho = PosReal::rational(y).mul(&PosReal::one());
    let rho_ok = Monomial::one().mul_pow(&a_rho, &-crate::q::half()).cmp_rational(&Q::one()) == Ordering::Less;
    (a_alpha < Q::one(), rho_ok)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PartitionCell {
    SemiStable,
    /// `X(P, e)`.
    Cell(NodeSet),
    /// `X_{M_Q}(*P, e) × Û_Q` on the stratum `e(Q)`.
    BoundaryCell { p: NodeSet, q: NodeSet },
}

impl PartitionCell {
    pub fn to_json(&self) -> Value {
        let v = |j: &NodeSet| j.iter().copied().collect::<Vec<_>>();
        match self {
            PartitionCell::SemiStable => json!({ "cell": "semistable" }),
            PartitionCell::Cell(j) => json!({ "cell": "interior", "P": v(j) }),
            PartitionCell::BoundaryCell { p, q } => json!({ "cell": "boundary", "P": v(p), "Q": v(q) }),
        }
    }
}

/// Interior point in `X(P, e)`.
pub fn is_cell(rd: &RootDatum, reg: &LeviRegistry, p: &HorosphericalPoint) -> Result<bool> {
    if !matches!(p.a, TorusPoint::Interior { .. }) {
        return Ok(false);
    }
    check_canonical(rd, reg, &p.parabolic, p)
}

/// Interior point of the closure of `X(P, e)` with `a^ρ = 1`, where `deg_inst = 0`.
pub fn is_semistable_limit(rd: &RootDatum, reg: &LeviRegistry, p: &HorosphericalPoint) -> Result<bool> {
    if !matches!(p.a, TorusPoint::Interior { .. }) {
        return Ok(false);
    }
    let j = &p.parabolic;
    check_proper(rd, j)?;
    check_in_ap(rd, &p.a, j)?;
    for i in (1..=rd.n()).filter(|i| !j.contains(i)) {
        if character(rd, &p.a, &rd.simple_root(i))?.cmp_rational(&Q::one()) == Ordering::Greater {
            return Ok(false);
        }
    }
    let rho_one = character(rd, &p.a, &rd.rho())?.cmp_rational(&Q::one()) == Ordering::Equal;
    Ok(rho_one && reg.semistable(j, &p.levi)?)
}

/// Corner point on `e(Q)`, `Q ⊇ P` proper, with `a ∈ c(Â⁺_{P,(0,1)})` and Levi point in `X_{M_Q}(*P, e)`.
pub fn is_boundary_cell(rd: &RootDatum, reg: &LeviRegistry, p: &HorosphericalPoint) -> Result<Option<NodeSet>> {
    let TorusPoint::Stratum { j: k, .. } = &p.a else { return Ok(None) };
    let j = &p.parabolic;
    check_proper(rd, j)?;
    if !j.is_subset(k) || k.len() == rd.n() || !torus_corner_contains(rd, j, &Q::one(), &p.a)? {
        return Ok(None);
    }
    Ok(reg.in_star_cell(j, k, &p.levi)?.then(|| k.clone()))
}

/// The piece of `𝔅(P)` (or the semi-stable locus) holding `p`, when the local data decide it.
pub fn pbord_cell(rd: &RootDatum, reg: &LeviRegistry, p: &HorosphericalPoint) -> Result<PartitionCell> {
    let mut hits = Vec::new();
    if is_cell(rd, reg, p)? {
        hits.push(PartitionCell::Cell(p.parabolic.clone()));
    }
    if is_semistable_limit(rd, reg, p)? {
        hits.push(PartitionCell::SemiStable);
    }
    if let Some(q) = is_boundary_cell(rd, reg, p)? {
        hits.push(PartitionCell::BoundaryCell { p: p.parabolic.clone(), q });
    }
    match hits.len() {
        0 => Err(Error::Undecided(format!("no cell of P = {} is certified by the local data", fmt_set(&p.parabolic)))),
        1 => Ok(hits.pop().expect("one hit")),
        _ => unreachable!("cells overlap: {hits:?}"),
    }
}
