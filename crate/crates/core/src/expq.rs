//! Exact comparisons involving `e^x` for rational `x`.
//!
//! Torus coordinates such as `a^{a_i} = e^{<H, a_i>}` are carried as pairs
//! `p * e^q` with `p, q` rational. Deciding `p * e^q < t` never needs floating
//! point: for `q != 0` the number `e^q` is transcendental, so it differs from
//! every rational and a shrinking rational enclosure eventually separates them.

use crate::q::{fmt_q, to_f64, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Hard ceiling on enclosure precision (bits). Reaching it means the inputs are
/// astronomically close to a tie, which cannot happen for a nonzero exponent.
const MAX_PREC: u32 = 1 << 15;

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

fn round_down(x: &Q, bits: u32) -> Q {
    let s = pow2(bits);
    Q::new((x * Q::from_integer(s.clone())).floor().to_integer(), s)
}

fn round_up(x: &Q, bits: u32) -> Q {
    let s = pow2(bits);
    Q::new((x * Q::from_integer(s.clone())).ceil().to_integer(), s)
}

/// Rational `lo <= e^x <= hi`, with width roughly `2^-prec` relative.
pub fn exp_bounds(x: &Q, prec: u32) -> (Q, Q) {
    // halve until |y| <= 1/2, then square back up
    let mut k = 0u32;
    let mut y = x.clone();
    let h = Q::new(BigInt::one(), BigInt::from(2));
    while y.abs() > h {
        y /= Q::from_integer(BigInt::from(2));
        k += 1;
    }
    let bits = prec + 2 * k + 16;
    let eps = Q::new(BigInt::one(), pow2(bits));
    let mut sum = Q::zero();
    let mut term = Q::one();
    let mut j = 0u64;
    // the tail after term j is bounded by 2|term_j| because |y| <= 1/2
    loop {
        sum += &term;
        j += 1;
        term = round_down(&(&term * &y / Q::from_integer(BigInt::from(j))), bits + 8);
        if term.abs() * Q::from_integer(BigInt::from(2)) < eps {
            break;
        }
    }
    // each truncated term lost at most 2^-(bits+8)
    let slack = Q::new(BigInt::from(j + 2), pow2(bits + 8)) + term.abs() * Q::from_integer(BigInt::from(2));
    let mut lo = round_down(&(&sum - &slack), bits);
    let mut hi = round_up(&(&sum + &slack), bits);
    if !lo.is_positive() {
        lo = Q::new(BigInt::one(), pow2(bits));
    }
    for _ in 0..k {
        lo = round_down(&(&lo * &lo), bits);
        hi = round_up(&(&hi * &hi), bits);
    }
    (lo, hi)
}

/// Compares `e^x` with the rational `r`.
pub fn cmp_exp(x: &Q, r: &Q) -> Ordering {
    if !r.is_positive() {
        return Ordering::Greater;
    }
    if x.is_zero() {
        return Q::one().cmp(r);
    }
    if r.is_one() {
        return if x.is_positive() { Ordering::Greater } else { Ordering::Less };
    }
    let mut prec = 32;
    while prec <= MAX_PREC {
        let (lo, hi) = exp_bounds(x, prec);
        if &hi < r {
            return Ordering::Less;
        }
        if &lo > r {
            return Ordering::Greater;
        }
        prec *= 2;
    }
    panic!("exp comparison did not separate e^{} from {} within {} bits", fmt_q(x), fmt_q(r), MAX_PREC)
}

/// A positive real `p * e^q` with rational `p > 0` and `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PosReal {
    pub p: Q,
    pub q: Q,
}

impl PosReal {
    pub fn new(p: Q, q: Q) -> Self {
        assert!(p.is_positive(), "PosReal needs a positive rational factor");
        PosReal { p, q }
    }

    pub fn rational(p: Q) -> Self {
        Self::new(p, Q::zero())
    }

    pub fn exp(q: Q) -> Self {
        Self::new(Q::one(), q)
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn is_one(&self) -> bool {
        // p e^q = 1 with q != 0 would make e^q rational
        self.q.is_zero() && self.p.is_one()
    }

    pub fn mul(&self, o: &PosReal) -> PosReal {
        PosReal::new(&self.p * &o.p, &self.q + &o.q)
    }

    pub fn scale(&self, t: &Q) -> PosReal {
        PosReal::new(&self.p * t, self.q.clone())
    }

    /// Natural log when it is a rational number, i.e. when `p = 1`.
    pub fn log_if_rational(&self) -> Option<Q> {
        self.p.is_one().then(|| self.q.clone())
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.p) * to_f64(&self.q).exp()
    }

    pub fn cmp_rational(&self, t: &Q) -> Ordering {
        Monomial::from(self.clone()).cmp_rational(t)
    }

    pub fn lt(&self, t: &Q) -> bool {
        self.cmp_rational(t) == Ordering::Less
    }
}

impl fmt::Display for PosReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_one(), self.q.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.p)),
            (true, false) => write!(f, "e^({})", fmt_q(&self.q)),
            (false, false) => write!(f, "{}*e^({})", fmt_q(&self.p), fmt_q(&self.q)),
        }
    }
}

/// `prod b_i^{e_i} * e^{x}` with rational bases `b_i > 0` and rational exponents.
#[derive(Clone, Debug, Default)]
pub struct Monomial {
    pub factors: Vec<(Q, Q)>,
    pub e: Q,
}

impl From<PosReal> for Monomial {
    fn from(v: PosReal) -> Self {
        Monomial { factors: vec![(v.p, Q::one())], e: v.q }
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: vec![], e: Q::zero() }
    }

    /// Multiplies in `v^k` for rational `k`.
    pub fn mul_pow(mut self, v: &PosReal, k: &Q) -> Self {
        if !k.is_zero() {
            self.factors.push((v.p.clone(), k.clone()));
            self.e += &v.q * k;
        }
        self
    }

    /// Exact three-way comparison with a positive rational.
    pub fn cmp_rational(&self, t: &Q) -> Ordering {
        assert!(t.is_positive());
        // clear exponent denominators: both sides are positive, so x -> x^N is monotone
        let n = self.factors.iter().fold(BigInt::one(), |acc, (_, k)| acc.lcm(k.denom()));
        let nq = Q::from_integer(n.clone());
        let mut p = Q::one();
        for (b, k) in &self.factors {
            let ek = (k * &nq).to_integer();
            p *= pow_q(b, &ek);
        }
        let tn = pow_q(t, &n);
        cmp_exp(&(&self.e * &nq), &(tn / p))
    }

    pub fn to_f64(&self) -> f64 {
        self.factors.iter().fold(to_f64(&self.e).exp(), |acc, (b, k)| acc * to_f64(b).powf(to_f64(k)))
    }
}

fn pow_q(b: &Q, e: &BigInt) -> Q {
    let mag: u32 = e.magnitude().try_into().expect("exponent too large");
    let v = num_traits::pow(b.clone(), mag as usize);
    if e.is_negative() {
        v.recip()
    } else {
        v
    }
}
