//! Cartan decompositions of `ĥᵉ`, the corner `c(ĥ⁺)` with its convergence
//! classes, and the torus-level corner `c(Â⁺)`.

use crate::error::{Error, Result};
use crate::expq::{Monomial, PosReal};
use crate::q::{fmt_q, parse_q, qi, to_f64, Q};
use crate::rootdata::{CartanVector, NodeSet, RootDatum};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

fn check_proper(rd: &RootDatum, j: &NodeSet) -> Result<()> {
    rd.check_set(j)?;
    if j.len() == rd.n() {
        return Err(Error::FullSet);
    }
    Ok(())
}

fn check_nested(j: &NodeSet, k: &NodeSet) -> Result<()> {
    if j.is_subset(k) {
        Ok(())
    } else {
        Err(Error::Nesting(format!("{j:?} is not contained in {k:?}")))
    }
}

/// `Σ_{j ∈ J} c_j ω̌^J_j`.
pub fn stratum_vector(rd: &RootDatum, j: &NodeSet, coords: &BTreeMap<usize, Q>) -> CartanVector {
    coords
        .iter()
        .fold(CartanVector::zero(rd.n()), |acc, (&k, c)| &acc + &rd.finite_coweight(j, k).scaled(c))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GarlandSplit {
    /// `c_j = <H - rD, a_j>`, the `ω̌^J`-coordinates of `H(J)`.
    pub coords: BTreeMap<usize, Q>,
    pub h_of_j: CartanVector,
    pub h_j: CartanVector,
}

/// `H = H(J) + H_J` with `H(J) ∈ ĥ(∅, J)` and `<a_i, H_J - rD> = 0` for `i ∈ J`.
///
/// `H` may itself carry a `D` component; the constraint is imposed on `H_J - rD`.
pub fn garland_split(rd: &RootDatum, h: &CartanVector, r: &Q, j: &NodeSet) -> Result<GarlandSplit> {
    rd.check_vec(h)?;
    check_proper(rd, j)?;
    if !r.is_positive() {
        return Err(Error::Invalid("r must be positive".into()));
    }
    let x = h - &rd.d_vec().scaled(r);
    let coords: BTreeMap<usize, Q> = j.iter().map(|&k| (k, x.dot(&rd.simple_root(k)))).collect();
    let h_of_j = stratum_vector(rd, j, &coords);
    let h_j = h - &h_of_j;
    debug_assert!(j.iter().all(|&k| (&h_j - &rd.d_vec().scaled(r)).dot(&rd.simple_root(k)).is_zero()));
    Ok(GarlandSplit { coords, h_of_j, h_j })
}

/// `H_J = H(J, K) + H_K` for `J ⊂ K ⊊ I`, given `<a_i, H_J - rD> = 0` on `J`.
pub fn relative_split(rd: &RootDatum, h_j: &CartanVector, j: &NodeSet, k: &NodeSet, r: &Q) -> Result<GarlandSplit> {
    rd.check_set(j)?;
    check_nested(j, k)?;
    let x = h_j - &rd.d_vec().scaled(r);
    if let Some(&bad) = j.iter().find(|&&i| !x.dot(&rd.simple_root(i)).is_zero()) {
        return Err(Error::NotInSubspace(format!("<a_{bad}, H_J - rD> != 0")));
    }
    let out = garland_split(rd, h_j, r, k)?;
    debug_assert!(j.iter().all(|&i| out.coords[&i].is_zero()));
    Ok(out)
}

/// `pr^r(J)(H)` computed directly and through `ĥ(∅, K)`.
pub fn projection_paths(rd: &RootDatum, h: &CartanVector, r: &Q, j: &NodeSet, k: &NodeSet) -> Result<(CartanVector, CartanVector)> {
    check_nested(j, k)?;
    let direct = garland_split(rd, h, r, j)?.h_of_j;
    let hk = garland_split(rd, h, r, k)?.h_of_j;
    let coords: BTreeMap<usize, Q> = j.iter().map(|&i| (i, hk.dot(&rd.simple_root(i)))).collect();
    Ok((direct, stratum_vector(rd, j, &coords)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CornerPoint {
    Interior(CartanVector),
    /// A point of `ĥ(∅, J)` in `ω̌^J` coordinates.
    Stratum { j: NodeSet, coords: BTreeMap<usize, Q> },
}

impl CornerPoint {
    pub fn origin() -> Self {
        CornerPoint::Stratum { j: NodeSet::new(), coords: BTreeMap::new() }
    }

    pub fn stratum(rd: &RootDatum, j: NodeSet, coords: BTreeMap<usize, Q>) -> Result<Self> {
        check_proper(rd, &j)?;
        if !coords.keys().copied().eq(j.iter().copied()) {
            return Err(Error::Invalid("stratum coordinates must be indexed by J".into()));
        }
        Ok(CornerPoint::Stratum { j, coords })
    }

    pub fn interior(rd: &RootDatum, h: CartanVector) -> Result<Self> {
        rd.check_vec(&h)?;
        if !rd.tits_cone_contains(&h) {
            return Err(Error::Invalid("interior points need <H, δ> < 0".into()));
        }
        Ok(CornerPoint::Interior(h))
    }

    /// `{"stratum": "interior" | [J..], "coords": [..]}`; interior points use
    /// coweight coordinates `(c_1, .., c_{l+1}, f)`.
    pub fn to_json(&self, rd: &RootDatum) -> Value {
        match self {
            CornerPoint::Interior(h) => {
                let (p, f) = rd.coweight_coords(h);
                let coords: Vec<String> = p.iter().chain(std::iter::once(&f)).map(fmt_q).collect();
                json!({"stratum": "interior", "coords": coords})
            }
            CornerPoint::Stratum { j, coords } => {
                json!({"stratum": j.iter().collect::<Vec<_>>(), "coords": coords.values().map(fmt_q).collect::<Vec<_>>()})
            }
        }
    }

    pub fn from_json(rd: &RootDatum, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Invalid(format!("corner point: {m}"));
        let coords: Vec<Q> = v["coords"]
            .as_array()
            .ok_or_else(|| bad("missing coords"))?
            .iter()
            .map(|c| c.as_str().and_then(|s| parse_q(s).ok()).ok_or_else(|| bad("coords must be rational strings")))
            .collect::<Result<_>>()?;
        match &v["stratum"] {
            Value::String(s) if s == "interior" => {
                if coords.len() != rd.n() + 1 {
                    return Err(Error::DatumMismatch { expected: rd.n() + 1, found: coords.len() });
                }
                Self::interior(rd, rd.from_coweight_coords(&coords[..rd.n()], &coords[rd.n()]))
            }
            Value::Array(a) => {
                let j = parse_nodes(a).ok_or_else(|| bad("stratum must list node indices"))?;
                if j.len() != coords.len() {
                    return Err(bad("one coordinate per stratum node"));
                }
                Self::stratum(rd, j.clone(), j.into_iter().zip(coords).collect())
            }
            _ => Err(bad("stratum must be \"interior\" or a node list")),
        }
    }
}

fn parse_nodes(a: &[Value]) -> Option<NodeSet> {
    a.iter().map(|x| x.as_u64().map(|u| u as usize)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Interior,
    Stratum(NodeSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lim {
    Converges(Q),
    MinusInf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Central {
    Converges(Q),
    Diverges,
    Unconstrained,
}

/// A sequence described by the limiting behaviour of its coordinates: coweight
/// coordinates `c_i` for interior sequences, `ω̌^K` coordinates on a stratum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSpec {
    pub source: Source,
    pub coords: BTreeMap<usize, Lim>,
    pub central: Central,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Limit {
    Point(CornerPoint),
    Divergent,
}

impl Limit {
    pub fn to_json(&self, rd: &RootDatum) -> Value {
        match self {
            Limit::Point(p) => p.to_json(rd),
            Limit::Divergent => json!({"divergent": true}),
        }
    }
}

impl SequenceSpec {
    /// `{"source": "interior" | [K..], "c": [{"lim": "p/q" | "-inf"}, ..], "central": {"lim": "p/q"} | "diverges" | "unconstrained"}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::MalformedSpec(m.to_string());
        let source = match &v["source"] {
            Value::String(s) if s == "interior" => Source::Interior,
            Value::Array(a) => Source::Stratum(parse_nodes(a).ok_or_else(|| bad("source nodes must be integers"))?),
            _ => return Err(bad("source must be \"interior\" or a node list")),
        };
        let lims: Vec<Lim> = v["c"]
            .as_array()
            .ok_or_else(|| bad("missing coordinate list c"))?
            .iter()
            .map(|e| parse_lim(&e["lim"]).ok_or_else(|| bad("each coordinate needs lim = \"p/q\" or \"-inf\"")))
            .collect::<Result<_>>()?;
        let central = match &v["central"] {
            Value::Null => Central::Unconstrained,
            Value::String(s) if s == "unconstrained" => Central::Unconstrained,
            Value::String(s) if s == "diverges" => Central::Diverges,
            o => match parse_lim(&o["lim"]) {
                Some(Lim::Converges(q)) => Central::Converges(q),
                _ => return Err(bad("central must be \"unconstrained\", \"diverges\" or {lim: p/q}")),
            },
        };
        let nodes: Vec<usize> = match &source {
            Source::Interior => (1..=lims.len()).collect(),
            Source::Stratum(k) => {
                if k.len() != lims.len() {
                    return Err(bad("one coordinate per source node"));
                }
                k.iter().copied().collect()
            }
        };
        Ok(SequenceSpec { source, coords: nodes.into_iter().zip(lims).collect(), central })
    }

    pub fn to_json(&self) -> Value {
        let source = match &self.source {
            Source::Interior => json!("interior"),
            Source::Stratum(k) => json!(k.iter().collect::<Vec<_>>()),
        };
        let c: Vec<Value> = self
            .coords
            .values()
            .map(|l| match l {
                Lim::Converges(q) => json!({"lim": fmt_q(q)}),
                Lim::MinusInf => json!({"lim": "-inf"}),
            })
            .collect();
        let central = match &self.central {
            Central::Converges(q) => json!({"lim": fmt_q(q)}),
            Central::Diverges => json!("diverges"),
            Central::Unconstrained => json!("unconstrained"),
        };
        json!({"source": source, "c": c, "central": central})
    }
}

fn parse_lim(v: &Value) -> Option<Lim> {
    let s = v.as_str()?;
    if s == "-inf" {
        Some(Lim::MinusInf)
    } else {
        parse_q(s).ok().map(Lim::Converges)
    }
}

/// The limit in `c(ĥ⁺)` of a declared sequence.
///
/// The limit stratum is the set `J` of convergent coordinates. An interior
/// sequence with every coordinate convergent has an interior limit only when the
/// central coordinate converges too and the limit stays in the Tits cone;
/// otherwise it escapes along a direction the corner does not compactify.
pub fn limit_of(rd: &RootDatum, spec: &SequenceSpec) -> Result<Limit> {
    let expected: NodeSet = match &spec.source {
        Source::Interior => rd.all_nodes(),
        Source::Stratum(k) => {
            rd.check_set(k).map_err(|_| Error::MalformedSpec("source stratum outside the index set".into()))?;
            if k.len() == rd.n() {
                return Err(Error::MalformedSpec("source stratum must be proper".into()));
            }
            if spec.central != Central::Unconstrained {
                return Err(Error::MalformedSpec("stratum sequences have no central coordinate".into()));
            }
            k.clone()
        }
    };
    if !spec.coords.keys().copied().eq(expected.iter().copied()) {
        return Err(Error::MalformedSpec(format!("coordinates must be declared exactly for {expected:?}")));
    }
    let conv: BTreeMap<usize, Q> = spec
        .coords
        .iter()
        .filter_map(|(&i, l)| match l {
            Lim::Converges(q) => Some((i, q.clone())),
            Lim::MinusInf => None,
        })
        .collect();
    let j: NodeSet = conv.keys().copied().collect();
    if j.len() < rd.n() {
        return Ok(Limit::Point(CornerPoint::Stratum { j, coords: conv }));
    }
    let Central::Converges(f) = &spec.central else {
        return Ok(Limit::Divergent);
    };
    let p: Vec<Q> = conv.into_values().collect();
    let h = rd.from_coweight_coords(&p, f);
    Ok(if rd.tits_cone_contains(&h) { Limit::Point(CornerPoint::Interior(h)) } else { Limit::Divergent })
}

/// Membership in the compact window `K(M0, r0, t)` extended into the corner.
pub fn window_contains(rd: &RootDatum, p: &CornerPoint, m0: &Q, r0: &Q, t: &Q) -> bool {
    match p {
        CornerPoint::Interior(h) => {
            let n = rd.n();
            (1..=n).all(|i| &h.dot(&rd.simple_root(i)) <= t)
                && h.coroot[n - 1].abs() <= *m0
                && -h.dot(&rd.delta()) >= *r0
        }
        CornerPoint::Stratum { coords, .. } => coords.values().all(|c| c <= t),
    }
}

/// `F_{-ρ̌}`: pushes a corner point into the interior; returns `λ̌`-coordinates
/// (the central coordinate is always 0).
pub fn push_interior(rd: &RootDatum, p: &CornerPoint) -> Vec<f64> {
    let f = |x: &Q| (-to_f64(x).abs()).exp() - 1.0;
    match p {
        CornerPoint::Interior(h) => (1..=rd.n()).map(|i| f(&h.dot(&rd.simple_root(i)))).collect(),
        CornerPoint::Stratum { coords, .. } => (1..=rd.n()).map(|i| coords.get(&i).map_or(-1.0, f)).collect(),
    }
}

/// A point of `c(Â⁺)`: either `(s_1, .., s_{l+1}; z)` with `Π s_i^{d_i} < 1`,
/// or stratum coordinates `(y_j)_{j ∈ J}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TorusPoint {
    Interior { s: Vec<PosReal>, z: PosReal },
    Stratum { j: NodeSet, y: BTreeMap<usize, PosReal> },
}

impl TorusPoint {
    pub fn interior(rd: &RootDatum, s: Vec<PosReal>, z: PosReal) -> Result<Self> {
        if s.len() != rd.n() {
            return Err(Error::DatumMismatch { expected: rd.n(), found: s.len() });
        }
        let m = s.iter().zip(&rd.null.d).fold(Monomial::one(), |m, (si, &d)| m.mul_pow(si, &qi(d)));
        if m.cmp_rational(&Q::one()) != std::cmp::Ordering::Less {
            return Err(Error::Invalid("torus point violates Π s_i^{d_i} < 1".into()));
        }
        Ok(TorusPoint::Interior { s, z })
    }

    pub fn origin() -> Self {
        TorusPoint::Stratum { j: NodeSet::new(), y: BTreeMap::new() }
    }

    /// `exp` on coordinates: `s_i = e^{c_i}`, `z = e^f`, strata `y_j = e^{c_j}`.
    pub fn exp(rd: &RootDatum, p: &CornerPoint) -> Self {
        match p {
            CornerPoint::Interior(h) => {
                let (c, f) = rd.coweight_coords(h);
                TorusPoint::Interior { s: c.into_iter().map(PosReal::exp).collect(), z: PosReal::exp(f) }
            }
            CornerPoint::Stratum { j, coords } => TorusPoint::Stratum {
                j: j.clone(),
                y: coords.iter().map(|(&k, c)| (k, PosReal::exp(c.clone()))).collect(),
            },
        }
    }

    /// `log`, defined when every coordinate is a pure exponential.
    pub fn log(&self, rd: &RootDatum) -> Option<CornerPoint> {
        match self {
            TorusPoint::Interior { s, z } => {
                let c: Option<Vec<Q>> = s.iter().map(|x| x.log_if_rational()).collect();
                Some(CornerPoint::Interior(rd.from_coweight_coords(&c?, &z.log_if_rational()?)))
            }
            TorusPoint::Stratum { j, y } => {
                let coords: Option<BTreeMap<usize, Q>> = y.iter().map(|(&k, v)| v.log_if_rational().map(|q| (k, q))).collect();
                Some(CornerPoint::Stratum { j: j.clone(), coords: coords? })
            }
        }
    }
}

/// The contraction `H(h, t)` of `c(Â⁺)` onto `o_∅`.
pub fn torus_homotopy(h: &TorusPoint, t: &Q) -> Result<TorusPoint> {
    if t.is_negative() || t > &Q::one() {
        return Err(Error::Invalid("homotopy parameter must lie in [0, 1]".into()));
    }
    if t.is_zero() {
        return Ok(TorusPoint::origin());
    }
    Ok(match h {
        TorusPoint::Interior { s, z } => TorusPoint::Interior { s: s.iter().map(|x| x.scale(t)).collect(), z: z.clone() },
        TorusPoint::Stratum { j, y } => {
            TorusPoint::Stratum { j: j.clone(), y: y.iter().map(|(&k, v)| (k, v.scale(t))).collect() }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StratumLabel {
    /// `Â⁺_{P,σ}`: `x^{a_j} = 1` on `J`, `x^{a_i} < σ` off `J`.
    Interior,
    /// `Â(K)_{*J,σ}`: `y_j = 1` on `J`, `y_k < σ` on `K ∖ J`.
    Boundary(NodeSet),
}

/// The pieces of `c(Â⁺_{P_J,σ})`: the interior and one stratum for each `J ⊆ K ⊊ I`.
pub fn torus_corner_strata(rd: &RootDatum, j: &NodeSet, sigma: &Q) -> Result<Vec<StratumLabel>> {
    check_proper(rd, j)?;
    if !sigma.is_positive() {
        return Err(Error::Invalid("σ must be positive".into()));
    }
    let n = rd.n();
    let mut out = vec![StratumLabel::Interior];
    for mask in 0u32..(1 << n) - 1 {
        let k: NodeSet = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        if j.is_subset(&k) {
            out.push(StratumLabel::Boundary(k));
        }
    }
    Ok(out)
}

/// Membership of a torus corner point in `c(Â⁺_{P_J,σ})`.
pub fn torus_corner_contains(rd: &RootDatum, j: &NodeSet, sigma: &Q, p: &TorusPoint) -> Result<bool> {
    check_proper(rd, j)?;
    Ok(match p {
        TorusPoint::Interior { s, .. } => {
            (1..=rd.n()).all(|i| if j.contains(&i) { s[i - 1].is_one() } else { s[i - 1].lt(sigma) })
        }
        TorusPoint::Stratum { j: k, y } => {
            j.is_subset(k) && k.len() < rd.n() && y.iter().all(|(i, v)| if j.contains(i) { v.is_one() } else { v.lt(sigma) })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::q;
    use crate::rootdata::nodes;

    fn sl2() -> RootDatum {
        RootDatum::affine_sl(2)
    }

    #[test]
    fn garland_sl2_examples() {
        let r = sl2();
        let (n, m) = (qi(5), q(-2, 3));
        let h = &r.coroot(1).scaled(&n) + &r.coroot(2).scaled(&m);
        let g = garland_split(&r, &h, &qi(7), &nodes(&[1])).unwrap();
        assert_eq!(g.h_of_j, r.coroot(1).scaled(&(&n - &m)));
        assert_eq!(g.h_j, r.central().scaled(&m));
        // X(m, x, r) = m c + x ǎ_1 - r D with J = {2}
        let (m, x, rr) = (q(3, 4), q(-5, 2), q(1, 3));
        let h = &r.central().scaled(&m) + &r.coroot(1).scaled(&x);
        let g = garland_split(&r, &h, &rr, &nodes(&[2])).unwrap();
        assert_eq!(g.h_of_j, r.coroot(2).scaled(&-(&x + &rr / qi(2))));
        let g = garland_split(&r, &h, &rr, &nodes(&[])).unwrap();
        assert!(g.h_of_j.is_zero());
        assert_eq!(g.h_j, h);
        assert!(matches!(garland_split(&r, &h, &rr, &nodes(&[1, 2])), Err(Error::FullSet)));
    }

    #[test]
    fn relative_sl2_example() {
        let r = sl2();
        let (c1, c2, f) = (q(3, 5), qi(-4), q(1, 2));
        let h = r.from_coweight_coords(&[c1.clone(), c2], &f);
        let s = relative_split(&r, &h, &nodes(&[]), &nodes(&[1]), &qi(1)).unwrap();
        assert_eq!(s.h_of_j, r.coroot(1).scaled(&(&c1 / qi(2))));
        assert_eq!(&s.h_of_j + &s.h_j, h);
        assert!(matches!(relative_split(&r, &h, &nodes(&[2]), &nodes(&[1]), &qi(1)), Err(Error::Nesting(_))));
        assert!(matches!(relative_split(&r, &h, &nodes(&[1]), &nodes(&[1]), &qi(1)), Err(Error::NotInSubspace(_))));
    }

    #[test]
    fn projections_agree_on_trivial_cases() {
        let r = sl2();
        let h = r.from_coweight_coords(&[qi(1), qi(-3)], &qi(2));
        let (a, b) = projection_paths(&r, &h, &qi(1), &nodes(&[]), &nodes(&[1])).unwrap();
        assert!(a.is_zero() && b.is_zero());
        let (a, b) = projection_paths(&r, &h, &qi(1), &nodes(&[1]), &nodes(&[1])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn limits() {
        let r = sl2();
        let spec = SequenceSpec {
            source: Source::Interior,
            coords: [(1, Lim::MinusInf), (2, Lim::Converges(qi(3)))].into(),
            central: Central::Unconstrained,
        };
        let Limit::Point(p) = limit_of(&r, &spec).unwrap() else { panic!() };
        let CornerPoint::Stratum { j, coords } = &p else { panic!() };
        assert_eq!(j, &nodes(&[2]));
        assert_eq!(stratum_vector(&r, j, coords), r.coroot(2).scaled(&q(3, 2)));
        let spec = SequenceSpec {
            source: Source::Interior,
            coords: [(1, Lim::Converges(qi(-1))), (2, Lim::Converges(qi(-1)))].into(),
            central: Central::Converges(qi(4)),
        };
        assert!(matches!(limit_of(&r, &spec).unwrap(), Limit::Point(CornerPoint::Interior(_))));
        let spec = SequenceSpec { central: Central::Diverges, ..spec };
        assert_eq!(limit_of(&r, &spec).unwrap(), Limit::Divergent);
        let r3 = RootDatum::affine_sl(3);
        let spec = SequenceSpec {
            source: Source::Stratum(nodes(&[1, 2])),
            coords: [(1, Lim::MinusInf), (2, Lim::Converges(qi(0)))].into(),
            central: Central::Unconstrained,
        };
        assert_eq!(
            limit_of(&r3, &spec).unwrap(),
            Limit::Point(CornerPoint::Stratum { j: nodes(&[2]), coords: [(2, qi(0))].into() })
        );
        let bad = SequenceSpec { coords: [(1, Lim::MinusInf)].into(), ..spec };
        assert!(matches!(limit_of(&r3, &bad), Err(Error::MalformedSpec(_))));
    }

    #[test]
    fn spec_json_roundtrip() {
        let v: Value = serde_json::from_str(r#"{"source":"interior","c":[{"lim":"-inf"},{"lim":"3"}],"central":"unconstrained"}"#).unwrap();
        let s = SequenceSpec::from_json(&v).unwrap();
        assert_eq!(SequenceSpec::from_json(&s.to_json()).unwrap(), s);
        let out = limit_of(&sl2(), &s).unwrap().to_json(&sl2());
        assert_eq!(out, json!({"stratum": [2], "coords": ["3"]}));
        let v: Value = serde_json::from_str(r#"{"source":[1],"c":[]}"#).unwrap();
        assert!(matches!(SequenceSpec::from_json(&v), Err(Error::MalformedSpec(_))));
    }

    #[test]
    fn windows() {
        let r = sl2();
        let h = -&(&r.central() + &r.d_vec());
        let p = CornerPoint::interior(&r, h).unwrap();
        assert!(window_contains(&r, &p, &qi(2), &qi(1), &qi(0)));
        assert!(!window_contains(&r, &p, &q(1, 2), &qi(1), &qi(0)));
        assert!(window_contains(&r, &CornerPoint::origin(), &qi(0), &qi(100), &qi(-5)));
    }

    #[test]
    fn push_examples() {
        let r = sl2();
        assert_eq!(push_interior(&r, &CornerPoint::origin()), vec![-1.0, -1.0]);
        let v = push_interior(&r, &CornerPoint::Interior(-&r.d_vec()));
        assert_eq!(v[0], 0.0);
        assert!((v[1] - ((-1f64).exp() - 1.0)).abs() < 1e-15);
        let p = CornerPoint::stratum(&r, nodes(&[1]), [(1, qi(2))].into()).unwrap();
        let v = push_interior(&r, &p);
        assert!((v[0] - ((-2f64).exp() - 1.0)).abs() < 1e-15 && v[1] == -1.0);
    }

    #[test]
    fn homotopy() {
        let r = sl2();
        let h = TorusPoint::interior(&r, vec![PosReal::rational(q(1, 2)), PosReal::rational(q(1, 2))], PosReal::rational(qi(3))).unwrap();
        assert_eq!(torus_homotopy(&h, &qi(1)).unwrap(), h);
        assert_eq!(torus_homotopy(&h, &qi(0)).unwrap(), TorusPoint::origin());
        let TorusPoint::Interior { s, z } = torus_homotopy(&h, &q(1, 2)).unwrap() else { panic!() };
        assert_eq!(s, vec![PosReal::rational(q(1, 4)); 2]);
        assert_eq!(z, PosReal::rational(qi(3)));
        assert_eq!(torus_homotopy(&TorusPoint::origin(), &q(1, 3)).unwrap(), TorusPoint::origin());
        assert!(TorusPoint::interior(&r, vec![PosReal::rational(qi(2)), PosReal::rational(q(1, 2))], PosReal::one()).is_err());
    }

    #[test]
    fn torus_strata() {
        let r = sl2();
        assert_eq!(torus_corner_strata(&r, &nodes(&[]), &qi(1)).unwrap().len(), 4);
        assert_eq!(
            torus_corner_strata(&r, &nodes(&[1]), &qi(1)).unwrap(),
            vec![StratumLabel::Interior, StratumLabel::Boundary(nodes(&[1]))]
        );
        let sigma = q(1, 2);
        let edge = TorusPoint::Stratum { j: nodes(&[1]), y: [(1, PosReal::rational(sigma.clone()))].into() };
        assert!(!torus_corner_contains(&r, &nodes(&[]), &sigma, &edge).unwrap());
        let inside = TorusPoint::Stratum { j: nodes(&[1]), y: [(1, PosReal::exp(qi(-1)))].into() };
        assert!(torus_corner_contains(&r, &nodes(&[]), &sigma, &inside).unwrap());
    }

    #[test]
    fn exp_log_roundtrip() {
        let r = RootDatum::affine_sl(3);
        let h = r.from_coweight_coords(&[qi(-1), q(1, 2), qi(-2)], &q(7, 3));
        let p = CornerPoint::Interior(h);
        assert_eq!(TorusPoint::exp(&r, &p).log(&r).unwrap(), p);
    }
}
