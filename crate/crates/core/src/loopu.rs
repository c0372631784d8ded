//! The pro-unipotent `Û` of affine `SL2`, modelled by `2×2` matrices over `Q[[t]]`
//! truncated at `t^N`, with Iwahori–Matsumoto coordinates `χ_α(σ) h_α(μ) χ_{-α}(τ)`.

use crate::corners::TorusPoint;
use crate::error::{Error, Result};
use crate::q::{fmt_q, parse_q, qi, round_half_to_zero, Q};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::ops::{Add, Mul, Neg, Sub};

pub const DEFAULT_ORDER: usize = 8;

/// `Σ_{k<N} c_k t^k`, exact modulo `t^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    c: Vec<Q>,
}

impl TruncatedSeries {
    /// Coefficients beyond `n` are dropped, missing ones are zero.
    pub fn new(mut c: Vec<Q>, n: usize) -> Self {
        c.resize(n, Q::zero());
        TruncatedSeries { c }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![], n)
    }

    pub fn constant(v: Q, n: usize) -> Self {
        Self::new(vec![v], n)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(Q::one(), n)
    }

    /// `v t^k`.
    pub fn monomial(v: Q, k: usize, n: usize) -> Self {
        let mut s = Self::zero(n);
        if k < n {
            s.c[k] = v;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> &Q {
        &self.c[k]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|x| x.is_integer())
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.order() != o.order() {
            return Err(Error::OrderMismatch(self.order(), o.order()));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self + o)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self * o)
    }

    pub fn scaled(&self, v: &Q) -> Self {
        TruncatedSeries { c: self.c.iter().map(|x| x * v).collect() }
    }

    /// `t ↦ st`.
    pub fn substitute(&self, s: &Q) -> Self {
        let mut p = Q::one();
        let mut c = Vec::with_capacity(self.order());
        for x in &self.c {
            c.push(x * &p);
            p *= s;
        }
        TruncatedSeries { c }
    }

    /// Multiplicative inverse of a unit (`c_0 != 0`).
    pub fn inverse(&self) -> Option<Self> {
        let n = self.order();
        if n == 0 {
            return Some(self.clone());
        }
        if self.c[0].is_zero() {
            return None;
        }
        let inv0 = self.c[0].recip();
        let mut b = vec![Q::zero(); n];
        b[0] = inv0.clone();
        for k in 1..n {
            let s: Q = (1..=k).map(|j| &self.c[j] * &b[k - j]).sum();
            b[k] = -s * &inv0;
        }
        Some(TruncatedSeries { c: b })
    }

    pub fn to_json(&self) -> Value {
        json!({ "N": self.order(), "coeffs": self.c.iter().map(fmt_q).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Invalid(format!("series must look like {{\"N\": n, \"coeffs\": [..]}}, got {v}"));
        let n = v.get("N").and_then(Value::as_u64).ok_or_else(bad)? as usize;
        let cs = v.get("coeffs").and_then(Value::as_array).ok_or_else(bad)?;
        if cs.len() > n {
            return Err(bad());
        }
        let c = cs
            .iter()
            .map(|x| x.as_str().and_then(|s| parse_q(s).ok()).ok_or_else(bad))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(c, n))
    }

    /// `"c0,c1,.."`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let c = s
            .split(',')
            .map(|t| parse_q(t).map_err(|e| Error::Invalid(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if c.len() > n {
            return Err(Error::Invalid(format!("{} coefficients exceed order {n}", c.len())));
        }
        Ok(Self::new(c, n))
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        debug_assert_eq!(self.order(), o.order());
        TruncatedSeries { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        debug_assert_eq!(self.order(), o.order());
        TruncatedSeries { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        debug_assert_eq!(self.order(), o.order());
        let n = self.order();
        let mut c = vec![Q::zero(); n];
        for (i, a) in self.c.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in o.c[..n - i].iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        TruncatedSeries { c }
    }
}

/// `[[m11, m12], [m21, m22]]` over `Q[[t]]/t^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopMatrix {
    pub m: [[TruncatedSeries; 2]; 2],
}

impl LoopMatrix {
    pub fn new(m11: TruncatedSeries, m12: TruncatedSeries, m21: TruncatedSeries, m22: TruncatedSeries) -> Result<Self> {
        m11.check(&m12)?;
        m11.check(&m21)?;
        m11.check(&m22)?;
        Ok(LoopMatrix { m: [[m11, m12], [m21, m22]] })
    }

    pub fn identity(n: usize) -> Self {
        let (o, z) = (TruncatedSeries::one(n), TruncatedSeries::zero(n));
        LoopMatrix { m: [[o.clone(), z.clone()], [z, o]] }
    }

    pub fn order(&self) -> usize {
        self.m[0][0].order()
    }

    pub fn mul(&self, o: &LoopMatrix) -> Result<LoopMatrix> {
        self.m[0][0].check(&o.m[0][0])?;
        let e = |i: usize, j: usize| &(&self.m[i][0] * &o.m[0][j]) + &(&self.m[i][1] * &o.m[1][j]);
        Ok(LoopMatrix { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] })
    }

    pub fn det(&self) -> TruncatedSeries {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    pub fn to_json(&self) -> Value {
        json!(self.m.iter().map(|row| row.iter().map(TruncatedSeries::to_json).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IMCoords {
    pub sigma: TruncatedSeries,
    /// `μ ≡ 1 mod t`.
    pub mu: TruncatedSeries,
    /// `τ ≡ 0 mod t`.
    pub tau: TruncatedSeries,
}

impl IMCoords {
    pub fn new(sigma: TruncatedSeries, mu: TruncatedSeries, tau: TruncatedSeries) -> Result<Self> {
        sigma.check(&mu)?;
        sigma.check(&tau)?;
        if sigma.order() == 0 {
            return Err(Error::NotUnipotentShape("truncation order must be at least 1".into()));
        }
        if !mu.coeff(0).is_one() {
            return Err(Error::NotUnipotentShape("μ must be 1 mod t".into()));
        }
        if !tau.coeff(0).is_zero() {
            return Err(Error::NotUnipotentShape("τ must vanish mod t".into()));
        }
        Ok(IMCoords { sigma, mu, tau })
    }

    pub fn identity(n: usize) -> Self {
        IMCoords { sigma: TruncatedSeries::zero(n), mu: TruncatedSeries::one(n), tau: TruncatedSeries::zero(n) }
    }

    /// `χ_α(σ)`.
    pub fn chi_plus(sigma: TruncatedSeries) -> Self {
        let n = sigma.order();
        IMCoords { sigma, ..Self::identity(n) }
    }

    /// `h_α(μ)`.
    pub fn h(mu: TruncatedSeries) -> Result<Self> {
        let n = mu.order();
        Self::new(TruncatedSeries::zero(n), mu, TruncatedSeries::zero(n))
    }

    /// `χ_{-α}(τ)`.
    pub fn chi_minus(tau: TruncatedSeries) -> Result<Self> {
        let n = tau.order();
        Self::new(TruncatedSeries::zero(n), TruncatedSeries::one(n), tau)
    }

    pub fn order(&self) -> usize {
        self.sigma.order()
    }

    pub fn is_integral(&self) -> bool {
        self.sigma.is_integral() && self.mu.is_integral() && self.tau.is_integral()
    }

    /// The coefficients that `Ω`-boxes constrain: all of `σ`, `μ - 1` and `τ`.
    pub fn box_coeffs(&self) -> impl Iterator<Item = &Q> {
        self.sigma.c.iter().chain(&self.mu.c[1..]).chain(&self.tau.c)
    }

    /// `[[μ + σμ⁻¹τ, σμ⁻¹], [μ⁻¹τ, μ⁻¹]]`.
    pub fn to_matrix(&self) -> LoopMatrix {
        let mi = self.mu.inverse().expect("μ is a unit");
        let smi = &self.sigma * &mi;
        LoopMatrix { m: [[&self.mu + &(&smi * &self.tau), smi], [&mi * &self.tau, mi]] }
    }

    pub fn to_json(&self) -> Value {
        json!({ "sigma": self.sigma.to_json(), "mu": self.mu.to_json(), "tau": self.tau.to_json() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |k: &str| {
            v.get(k).ok_or_else(|| Error::Invalid(format!("missing {k:?}"))).and_then(TruncatedSeries::from_json)
        };
        Self::new(get("sigma")?, get("mu")?, get("tau")?)
    }
}

/// `μ = m22⁻¹`, `τ = m21/m22`, `σ = m12/m22`.
pub fn im_coords(m: &LoopMatrix) -> Result<IMCoords> {
    let n = m.order();
    let [[_, m12], [m21, m22]] = &m.m;
    if n == 0 || !m22.coeff(0).is_one() {
        return Err(Error::NotUnipotentShape("m22 must be 1 mod t".into()));
    }
    if !m21.coeff(0).is_zero() {
        return Err(Error::NotUnipotentShape("m21 must vanish mod t".into()));
    }
    if m.det() != TruncatedSeries::one(n) {
        return Err(Error::NotUnipotentShape("determinant is not 1".into()));
    }
    let inv = m22.inverse().expect("unit");
    IMCoords::new(m12 * &inv, inv.clone(), m21 * &inv)
}

pub fn u_multiply(u1: &IMCoords, u2: &IMCoords) -> Result<IMCoords> {
    if u1.order() != u2.order() {
        return Err(Error::OrderMismatch(u1.order(), u2.order()));
    }
    im_coords(&u1.to_matrix().mul(&u2.to_matrix())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleKind {
    /// `η(s)`: `t ↦ st` in every coordinate.
    LoopRotation,
    /// Conjugation by `h_α(s)`: `σ ↦ s²σ`, `τ ↦ s⁻²τ`.
    Torus,
}

pub fn scale(u: &IMCoords, s: &Q, kind: ScaleKind) -> Result<IMCoords> {
    if s.is_zero() {
        return Err(Error::Invalid("scale factor must be nonzero".into()));
    }
    Ok(match kind {
        ScaleKind::LoopRotation => {
            IMCoords { sigma: u.sigma.substitute(s), mu: u.mu.substitute(s), tau: u.tau.substitute(s) }
        }
        ScaleKind::Torus => {
            let s2 = s * s;
            IMCoords { sigma: u.sigma.scaled(&s2), mu: u.mu.clone(), tau: u.tau.scaled(&s2.recip()) }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub reduced: IMCoords,
    /// Integral, with `reduced = u · gamma`.
    pub gamma: IMCoords,
}

fn in_omega0(x: &Q) -> bool {
    x.abs() <= crate::q::half()
}

/// Moves `u` into the closed box `Û_{Ω₀}` by right multiplication with an integral element.
///
/// Depth by depth: `χ_α(n t^k)` shifts `σ_k` by `n`, `h_α(1 + n t^k)` shifts `μ_k`,
/// `χ_{-α}(n t^k)` shifts `τ_k`, and each only disturbs strictly deeper coefficients
/// of the coordinates after it, so one sweep settles everything.
pub fn u_reduce(u: &IMCoords) -> Result<Reduction> {
    let n = u.order();
    let mut cur = u.clone();
    let mut gamma = IMCoords::identity(n);
    let guard = 3 * n;
    let mut rounds = 0;
    for k in 0..n {
        for coord in 0..3 {
            if k == 0 && coord > 0 {
                continue;
            }
            let x = match coord {
                0 => cur.sigma.coeff(k),
                1 => cur.mu.coeff(k),
                _ => cur.tau.coeff(k),
            };
            let step = -round_half_to_zero(x);
            if step.is_zero() {
                continue;
            }
            rounds += 1;
            if rounds > guard {
                return Err(Error::NonTermination(guard));
            }
            let v = Q::from_integer(step);
            let e = match coord {
                0 => IMCoords::chi_plus(TruncatedSeries::monomial(v, k, n)),
                1 => IMCoords::h(&TruncatedSeries::one(n) + &TruncatedSeries::monomial(v, k, n))?,
                _ => IMCoords::chi_minus(TruncatedSeries::monomial(v, k, n))?,
            };
            cur = u_multiply(&cur, &e)?;
            gamma = u_multiply(&gamma, &e)?;
        }
    }
    debug_assert!(cur.box_coeffs().all(in_omega0));
    debug_assert!(gamma.is_integral());
    debug_assert_eq!(u_multiply(u, &gamma)?, cur);
    Ok(Reduction { reduced: cur, gamma })
}

/// `a^{a_i} < t` for `i = 1, 2` and every boxed coefficient of `u` in `[lo, hi]`.
/// Points on the corner strata are not in the Siegel set.
pub fn siegel_membership(a: &TorusPoint, u: &IMCoords, t: &Q, omega: (&Q, &Q)) -> bool {
    let TorusPoint::Interior { s, .. } = a else { return false };
    s.iter().all(|x| x.lt(t)) && u.box_coeffs().all(|x| omega.0 <= x && x <= omega.1)
}

/// `χ_α(1) χ_{-α}(t)`, handy in examples.
pub fn sample(n: usize) -> IMCoords {
    IMCoords { sigma: TruncatedSeries::one(n), mu: TruncatedSeries::one(n), tau: TruncatedSeries::monomial(qi(1), 1, n) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expq::PosReal;
    use crate::q::{half, q};

    fn ts(c: &[Q], n: usize) -> TruncatedSeries {
        TruncatedSeries::new(c.to_vec(), n)
    }

    #[test]
    fn series_inverse() {
        let s = ts(&[qi(1), qi(1)], 5);
        let inv = s.inverse().unwrap();
        assert_eq!(inv, ts(&[qi(1), qi(-1), qi(1), qi(-1), qi(1)], 5));
        assert_eq!(&s * &inv, TruncatedSeries::one(5));
        assert!(ts(&[qi(0), qi(1)], 3).inverse().is_none());
    }

    #[test]
    fn extraction() {
        let n = 4;
        assert_eq!(im_coords(&LoopMatrix::identity(n)).unwrap(), IMCoords::identity(n));
        let m = LoopMatrix::new(TruncatedSeries::one(n), ts(&[qi(3), qi(1)], n), TruncatedSeries::zero(n), TruncatedSeries::one(n))
            .unwrap();
        let c = im_coords(&m).unwrap();
        assert_eq!((c.sigma, c.mu, c.tau), (ts(&[qi(3), qi(1)], n), TruncatedSeries::one(n), TruncatedSeries::zero(n)));
        // χ_α(1) χ_{-α}(t) = [[1 + t, 1], [t, 1]]
        let m = LoopMatrix::new(ts(&[qi(1), qi(1)], n), TruncatedSeries::one(n), ts(&[qi(0), qi(1)], n), TruncatedSeries::one(n))
            .unwrap();
        assert_eq!(sample(n).to_matrix(), m);
        assert_eq!(im_coords(&m).unwrap(), sample(n));
        let bad = LoopMatrix::new(TruncatedSeries::one(n), TruncatedSeries::zero(n), TruncatedSeries::one(n), TruncatedSeries::one(n))
            .unwrap();
        assert!(matches!(im_coords(&bad), Err(Error::NotUnipotentShape(_))));
    }

    #[test]
    fn multiplication() {
        let n = 3;
        let u = sample(n);
        assert_eq!(u_multiply(&u, &IMCoords::identity(n)).unwrap(), u);
        let a = IMCoords::chi_plus(ts(&[qi(2), q(1, 3)], n));
        let b = IMCoords::chi_plus(ts(&[q(-1, 2), qi(0), qi(5)], n));
        assert_eq!(u_multiply(&a, &b).unwrap(), IMCoords::chi_plus(ts(&[q(3, 2), q(1, 3), qi(5)], n)));
        let sq = u_multiply(&u, &u).unwrap();
        assert_eq!(sq.to_matrix(), u.to_matrix().mul(&u.to_matrix()).unwrap());
        assert!(matches!(u_multiply(&u, &sample(4)), Err(Error::OrderMismatch(3, 4))));
    }

    #[test]
    fn scalings() {
        let n = 3;
        let u = IMCoords::chi_plus(ts(&[qi(1), qi(4)], n));
        assert_eq!(scale(&u, &qi(1), ScaleKind::LoopRotation).unwrap(), u);
        assert_eq!(scale(&u, &half(), ScaleKind::LoopRotation).unwrap().sigma, ts(&[qi(1), qi(2)], n));
        let v = scale(&sample(n), &qi(2), ScaleKind::Torus).unwrap();
        assert_eq!((v.sigma, v.tau), (TruncatedSeries::constant(qi(4), n), ts(&[qi(0), q(1, 4)], n)));
    }

    #[test]
    fn reductions() {
        let n = 3;
        let r = u_reduce(&IMCoords::chi_plus(TruncatedSeries::constant(q(7, 10), n))).unwrap();
        assert_eq!(r.gamma, IMCoords::chi_plus(TruncatedSeries::constant(qi(-1), n)));
        assert_eq!(r.reduced.sigma, TruncatedSeries::constant(q(-3, 10), n));
        let r = u_reduce(&IMCoords::chi_plus(ts(&[q(7, 10), q(13, 10)], n))).unwrap();
        assert_eq!(r.reduced.sigma, ts(&[q(-3, 10), q(3, 10)], n));
        let r = u_reduce(&sample(n)).unwrap();
        assert_eq!(r.reduced, IMCoords::identity(n));
        let w = IMCoords::new(ts(&[half(), q(5, 2)], n), ts(&[qi(1), q(-7, 3), qi(2)], n), ts(&[qi(0), q(9, 4)], n)).unwrap();
        let r = u_reduce(&w).unwrap();
        assert!(r.reduced.box_coeffs().all(in_omega0));
        assert_eq!(u_reduce(&r.reduced).unwrap().gamma, IMCoords::identity(n));
    }

    #[test]
    fn siegel() {
        let r = crate::rootdata::RootDatum::affine_sl(2);
        let h = PosReal::rational(half());
        let a = TorusPoint::interior(&r, vec![h.clone(), h.clone()], PosReal::one()).unwrap();
        let om = (&-half(), &half());
        assert!(siegel_membership(&a, &IMCoords::identity(3), &qi(1), om));
        let u = IMCoords::chi_plus(TruncatedSeries::constant(q(3, 4), 3));
        assert!(!siegel_membership(&a, &u, &qi(1), om));
        let b = TorusPoint::interior(&r, vec![PosReal::rational(qi(2)), PosReal::rational(q(1, 8))], PosReal::one()).unwrap();
        assert!(!siegel_membership(&b, &IMCoords::identity(3), &qi(1), om));
    }
}
