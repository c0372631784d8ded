//! `SL2(Z)` acting on the upper half-plane: Iwasawa coordinates, Ford discs,
//! the degree of instability and Gauss reduction, all over exact rationals.
//!
//! Degrees are multiplicative: the instability of `z` relative to a cusp `m`
//! is `Im(γ_m z)`, and the additive degree `-½ log Im` is only produced on request.

use crate::error::{Error, Result};
use crate::q::{fmt_q, half, parse_q, qi, round_half_to_zero, to_f64, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::fmt;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HPoint {
    pub x: Q,
    pub y: Q,
}

impl HPoint {
    pub fn new(x: Q, y: Q) -> Result<Self> {
        if !y.is_positive() {
            return Err(Error::Invalid(format!("Im z = {} is not positive", fmt_q(&y))));
        }
        Ok(HPoint { x, y })
    }

    pub fn i() -> Self {
        HPoint { x: Q::zero(), y: Q::one() }
    }

    pub fn norm_sq(&self) -> Q {
        &self.x * &self.x + &self.y * &self.y
    }

    /// Accepts `x+yi`, `x+i/d`, `yi`, `i` and `x,y`.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Invalid(format!("cannot parse point {s:?}"));
        let rq = |u: &str| parse_q(u).map_err(|_| bad());
        if let Some((a, b)) = t.split_once(',') {
            return HPoint::new(rq(a)?, rq(b)?);
        }
        let split = t.char_indices().filter(|&(k, c)| k > 0 && (c == '+' || c == '-')).map(|(k, _)| k).last();
        let (re, im) = match split {
            Some(k) => (&t[..k], &t[k..]),
            None => ("0", t.as_str()),
        };
        let (neg, body) = match im.as_bytes().first() {
            Some(b'+') => (false, &im[1..]),
            Some(b'-') => (true, &im[1..]),
            _ => (false, im),
        };
        let y = if body == "i" {
            Q::one()
        } else if let Some(d) = body.strip_prefix("i/") {
            rq(&format!("1/{d}"))?
        } else if let Some(n) = body.strip_suffix('i') {
            rq(n)?
        } else {
            return Err(bad());
        };
        HPoint::new(rq(re)?, if neg { -y } else { y })
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", fmt_q(&self.x), fmt_q(&self.y))
    }
}

/// A point `[r:s]` of `P¹(Q)`, normalized to `s > 0`, or `s = 0, r = 1` for `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    pub r: BigInt,
    pub s: BigInt,
}

impl Cusp {
    pub fn new(r: impl Into<BigInt>, s: impl Into<BigInt>) -> Result<Self> {
        let (mut r, mut s) = (r.into(), s.into());
        if r.is_zero() && s.is_zero() {
            return Err(Error::Invalid("cusp [0:0]".into()));
        }
        let g = r.gcd(&s);
        r /= &g;
        s /= &g;
        if s.is_negative() || (s.is_zero() && r.is_negative()) {
            r = -r;
            s = -s;
        }
        Ok(Cusp { r, s })
    }

    pub fn infinity() -> Self {
        Cusp { r: BigInt::one(), s: BigInt::zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.s.is_zero()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(Cusp::infinity());
        }
        let v = parse_q(t).map_err(|_| Error::Invalid(format!("cannot parse cusp {s:?}")))?;
        Cusp::new(v.numer().clone(), v.denom().clone())
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.r, self.s)
        }
    }
}

/// An integer matrix `[[a, b], [c, d]]` of determinant one, acting by `z ↦ (az + b)/(cz + d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sl2Z {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Sl2Z {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let m = Sl2Z { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        if !(&m.a * &m.d - &m.b * &m.c).is_one() {
            return Err(Error::Invalid("matrix does not have determinant 1".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Sl2Z { a: 1.into(), b: 0.into(), c: 0.into(), d: 1.into() }
    }

    /// `z ↦ -1/z`.
    pub fn inversion() -> Self {
        Sl2Z { a: 0.into(), b: (-1).into(), c: 1.into(), d: 0.into() }
    }

    pub fn translation(n: impl Into<BigInt>) -> Self {
        Sl2Z { a: 1.into(), b: n.into(), c: 0.into(), d: 1.into() }
    }

    pub fn mul(&self, o: &Sl2Z) -> Sl2Z {
        Sl2Z {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> Sl2Z {
        Sl2Z { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.c.is_zero()
    }

    pub fn max_abs(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d].into_iter().map(|v| v.abs()).max().expect("four entries")
    }

    pub fn act(&self, z: &HPoint) -> HPoint {
        let q = |v: &BigInt| Q::from_integer(v.clone());
        // (az + b)/(cz + d) with denominator |cz + d|^2
        let (a, b, c, d) = (q(&self.a), q(&self.b), q(&self.c), q(&self.d));
        let ur = &a * &z.x + &b;
        let ui = &a * &z.y;
        let vr = &c * &z.x + &d;
        let vi = &c * &z.y;
        let den = &vr * &vr + &vi * &vi;
        HPoint { x: (&ur * &vr + &ui * &vi) / &den, y: (&ui * &vr - &ur * &vi) / &den }
    }

    pub fn act_cusp(&self, m: &Cusp) -> Cusp {
        Cusp::new(&self.a * &m.r + &self.b * &m.s, &self.c * &m.r + &self.d * &m.s).expect("invertible")
    }

    pub fn to_json(&self) -> Value {
        json!([[self.a.to_string(), self.b.to_string()], [self.c.to_string(), self.d.to_string()]])
    }
}

/// `coeff · log(arg)` kept symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogPair {
    pub coeff: Q,
    pub arg: Q,
}

impl LogPair {
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.coeff) * to_f64(&self.arg).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iwasawa {
    /// `y`, so that `a(z) = diag(y^{-1/2}, y^{1/2})`.
    pub a: Q,
    /// `x`, so that `n(z) = [[1, -x], [0, 1]]`.
    pub n: Q,
    /// `<ρ, H_B(z)> = -½ log y`.
    pub rho: LogPair,
}

pub fn iwasawa(z: &HPoint) -> Iwasawa {
    Iwasawa { a: z.y.clone(), n: z.x.clone(), rho: LogPair { coeff: -half(), arg: z.y.clone() } }
}

/// `Im(γ_m z) = y / |sz - r|^2`, which is `y` at `∞`.
pub fn im_at_cusp(z: &HPoint, m: &Cusp) -> Q {
    if m.is_infinity() {
        return z.y.clone();
    }
    let (r, s) = (Q::from_integer(m.r.clone()), Q::from_integer(m.s.clone()));
    let u = &s * &z.x - r;
    let v = &s * &z.y;
    &z.y / (&u * &u + &v * &v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degree {
    pub max_im: Q,
    /// Every cusp attaining `max_im`, sorted.
    pub argmax: Vec<Cusp>,
    pub semistable: bool,
}

impl Degree {
    pub fn additive(&self) -> LogPair {
        LogPair { coeff: -half(), arg: self.max_im.clone() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "max_im": fmt_q(&self.max_im),
            "cusp": self.argmax[0].to_string(),
            "argmax": self.argmax.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "semistable": self.semistable,
        })
    }
}

/// Integers `r` with `(sx - r)^2 <= bound`, in increasing order.
fn r_window(sx: &Q, bound: &Q) -> Vec<BigInt> {
    let fits = |r: &BigInt| {
        let u = sx - Q::from_integer(r.clone());
        &(&u * &u) <= bound
    };
    let mid = sx.floor().to_integer();
    let mut lo = mid.clone();
    while fits(&(&lo - 1)) {
        lo -= 1;
    }
    let mut out = Vec::new();
    let mut r = lo;
    loop {
        if fits(&r) {
            out.push(r.clone());
        } else if r > mid {
            break;
        }
        r += 1;
    }
    out
}

/// The exact maximum of `im_at_cusp` over `P¹(Q)`.
///
/// Reduction supplies a starting value; the search then runs over every cusp
/// that could still reach the current best, `s² y best <= 1` and
/// `(sx - r)² <= y/best - s²y²`, so the result does not depend on reduction being right.
pub fn deg_inst(z: &HPoint) -> Degree {
    let (g, zr) = reduce_to_siegel(z);
    let mut best = zr.y.clone();
    debug_assert_eq!(im_at_cusp(z, &g.inverse().act_cusp(&Cusp::infinity())), best);
    let mut arg: Vec<Cusp> = Vec::new();
    if z.y == best {
        arg.push(Cusp::infinity());
    } else if z.y > best {
        best = z.y.clone();
        arg.push(Cusp::infinity());
    }
    let mut s: i64 = 1;
    loop {
        let sq = qi(s);
        let s2y2 = &sq * &sq * &z.y * &z.y;
        let room = &z.y / &best - &s2y2;
        if room.is_negative() {
            break;
        }
        let sx = &sq * &z.x;
        for r in r_window(&sx, &room) {
            if !r.gcd(&BigInt::from(s)).is_one() {
                continue;
            }
            let m = Cusp { r, s: s.into() };
            let v = im_at_cusp(z, &m);
            if v > best {
                best = v;
                arg = vec![m];
            } else if v == best {
                arg.push(m);
            }
        }
        s += 1;
    }
    arg.sort();
    let semistable = best <= Q::one();
    Degree { max_im: best, argmax: arg, semistable }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalPair {
    SemiStable,
    /// The Borel `B_m` attached to the cusp `m`.
    Borel(Cusp),
}

impl CanonicalPair {
    pub fn to_json(&self) -> Value {
        match self {
            CanonicalPair::SemiStable => json!({ "semistable": true }),
            CanonicalPair::Borel(m) => json!({ "semistable": false, "parabolic": "B", "cusp": m.to_string() }),
        }
    }
}

pub fn canonical_pair(z: &HPoint) -> CanonicalPair {
    let d = deg_inst(z);
    if d.semistable {
        return CanonicalPair::SemiStable;
    }
    // open Ford discs are disjoint, so an unstable point has exactly one maximizer
    assert_eq!(d.argmax.len(), 1, "unstable point with several maximizing cusps");
    CanonicalPair::Borel(d.argmax[0].clone())
}

/// Gauss reduction: translate into `|x| <= ½`, invert while `|z| < 1`.
/// Returns `γ` and `z' = γ z`.
pub fn reduce_to_siegel(z: &HPoint) -> (Sl2Z, HPoint) {
    let mut g = Sl2Z::identity();
    let mut w = z.clone();
    loop {
        let n = round_half_to_zero(&w.x);
        if !n.is_zero() {
            w.x -= Q::from_integer(n.clone());
            g = Sl2Z::translation(-n).mul(&g);
        }
        let r2 = w.norm_sq();
        if r2 >= Q::one() {
            return (g, w);
        }
        // y grows by the factor 1/|z|^2 > 1, and only finitely many orbit
        // points above a given height have a bounded denominator
        w = HPoint { x: -&w.x / &r2, y: &w.y / &r2 };
        g = Sl2Z::inversion().mul(&g);
    }
}

/// `z ∈ A_{B,t} × U_Ω` with `Ω = [-ω, ω]`: `|x| <= ω` and `y > 1/t`, given `t²`.
pub fn siegel_contains(z: &HPoint, t_sq: &Q, omega: &Q) -> bool {
    z.x.abs() <= *omega && &z.y * &z.y * t_sq > Q::one()
}

/// `t₀² = 4/3`, i.e. `t₀ = 2/√3`.
pub fn default_t_sq() -> Q {
    Q::new(4.into(), 3.into())
}

/// `Ω₀ = [-½, ½]`.
pub fn default_omega() -> (Q, Q) {
    (-half(), half())
}

pub fn standard_siegel_contains(z: &HPoint) -> bool {
    siegel_contains(z, &default_t_sq(), &default_omega().1)
}

/// The horoball at a cusp: for `s > 0` a Euclidean disc tangent to the real axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FordDisc {
    pub cusp: Cusp,
}

impl FordDisc {
    pub fn new(cusp: Cusp) -> Self {
        FordDisc { cusp }
    }

    /// Center and radius; `None` for the half-plane `y > 1` at `∞`.
    pub fn circle(&self) -> Option<((Q, Q), Q)> {
        if self.cusp.is_infinity() {
            return None;
        }
        let s = Q::from_integer(self.cusp.s.clone());
        let rad = Q::one() / (qi(2) * &s * &s);
        Some(((Q::from_integer(self.cusp.r.clone()) / &s, rad.clone()), rad))
    }

    pub fn contains(&self, z: &HPoint) -> bool {
        match self.circle() {
            None => z.y > Q::one(),
            Some(((cx, cy), rad)) => {
                let dx = &z.x - cx;
                let dy = &z.y - cy;
                dx.clone() * dx + dy.clone() * dy < &rad * &rad
            }
        }
    }

    /// Open interiors are disjoint; tangency is allowed.
    pub fn interiors_disjoint(&self, o: &FordDisc) -> bool {
        match (self.circle(), o.circle()) {
            (None, None) => self.cusp != o.cusp,
            (None, Some(((_, cy), rad))) | (Some(((_, cy), rad)), None) => cy + rad <= Q::one(),
            (Some(((ax, ay), ra)), Some(((bx, by), rb))) => {
                let dx = ax - bx;
                let dy = ay - by;
                let sum = ra + rb;
                dx.clone() * dx + dy.clone() * dy >= &sum * &sum
            }
        }
    }
}

/// A closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
}

impl Window {
    pub fn new(x0: Q, x1: Q, y0: Q, y1: Q) -> Result<Self> {
        if x0 >= x1 || y0 >= y1 || !y1.is_positive() {
            return Err(Error::EmptyWindow);
        }
        Ok(Window { x0, x1, y0, y1 })
    }

    /// `x0,x1,y0,y1`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<Q> = s
            .split(',')
            .map(|t| parse_q(t).map_err(|_| Error::Invalid(format!("cannot parse window {s:?}"))))
            .collect::<Result<_>>()?;
        match <[Q; 4]>::try_from(v) {
            Ok([a, b, c, d]) => Window::new(a, b, c, d),
            Err(_) => Err(Error::Invalid(format!("window needs four numbers, got {s:?}"))),
        }
    }

    fn dist_sq(&self, px: &Q, py: &Q) -> Q {
        let clamp = |v: &Q, lo: &Q, hi: &Q| v.clone().max(lo.clone()).min(hi.clone());
        let dx = px - clamp(px, &self.x0, &self.x1);
        let dy = py - clamp(py, &self.y0, &self.y1);
        dx.clone() * dx + dy.clone() * dy
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub svg: String,
    /// Cusps with `s <= s_max` whose circle meets the window, sorted.
    pub circles: Vec<Cusp>,
    /// Whether the line `y = 1` bounding the disc at `∞` crosses the window.
    pub line: bool,
}

/// Renders the Ford-disc partition of the window as an SVG document `resolution` pixels wide.
pub fn partition_svg(win: &Window, resolution: u32, s_max: u32) -> Result<Partition> {
    if s_max == 0 || resolution == 0 {
        return Err(Error::Invalid("s_max and resolution must be at least 1".into()));
    }
    let mut circles = Vec::new();
    for s in 1..=i64::from(s_max) {
        let sq = qi(s);
        let rad = Q::one() / (qi(2) * &sq * &sq);
        let lo = ((&win.x0 - &rad) * &sq).floor().to_integer();
        let hi = ((&win.x1 + &rad) * &sq).ceil().to_integer();
        let mut r = lo;
        while r <= hi {
            if r.gcd(&BigInt::from(s)).is_one() {
                let cx = Q::from_integer(r.clone()) / &sq;
                if win.dist_sq(&cx, &rad) < &rad * &rad {
                    circles.push(Cusp { r: r.clone(), s: s.into() });
                }
            }
            r += 1;
        }
    }
    circles.sort_by(|a, b| (Q::new(a.r.clone(), a.s.clone())).cmp(&Q::new(b.r.clone(), b.s.clone())));
    let line = win.y0 <= Q::one() && Q::one() <= win.y1;

    let w = f64::from(resolution);
    let (x0, x1, y0, y1) = (to_f64(&win.x0), to_f64(&win.x1), to_f64(&win.y0), to_f64(&win.y1));
    let scale = w / (x1 - x0);
    let h = ((y1 - y0) * scale).round().max(1.0);
    let px = |x: f64| (x - x0) * scale;
    let py = |y: f64| (y1 - y) * scale;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#);
    let _ = writeln!(svg, r#"<clipPath id="win"><rect x="0" y="0" width="{w:.0}" height="{h:.0}"/></clipPath>"#);
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<g clip-path="url(#win)" fill="none" stroke="black">"#);
    if line {
        let _ = writeln!(svg, r#"<line class="cusp-inf" x1="0" y1="{:.6}" x2="{w:.0}" y2="{:.6}"/>"#, py(1.0), py(1.0));
    }
    for m in &circles {
        let ((cx, cy), rad) = FordDisc::new(m.clone()).circle().expect("finite cusp");
        let _ = writeln!(
            svg,
            r#"<circle class="cusp" data-cusp="{m}" cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#,
            px(to_f64(&cx)),
            py(to_f64(&cy)),
            to_f64(&rad) * scale
        );
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(Partition { svg, circles, line })
}
