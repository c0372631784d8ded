//! Seeded property sweeps behind the `sweep` subcommand.

use crate::corners::{garland_split, projection_paths};
use crate::error::{Error, Result};
use crate::halfplane::{canonical_pair, im_at_cusp, reduce_to_siegel, standard_siegel_contains, CanonicalPair, Cusp, HPoint, Sl2Z};
use crate::loopu::{u_multiply, u_reduce, IMCoords, TruncatedSeries};
use crate::orthofam::{from_weyl_orbit, verify_family};
use crate::parabolic::{all_proper_subsets, rho_data, rho_pq};
use crate::q::{ceil_inv_sqrt, q, qi, Q};
use crate::rootdata::{CartanVector, NodeSet, RootDatum};
use crate::stability::{ap_cell_contains, rank_one_criterion, semistable_family};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub const SUITES: &[&str] = &[
    "ford-oracle",
    "siegel-reduction",
    "equivariance",
    "garland-roundtrip",
    "rho-identities",
    "loopu-reduce",
    "orbit-families",
    "check-canonical",
    "semistable-family",
];

const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub suite: String,
    pub checked: usize,
    pub counterexamples: Vec<Value>,
}

impl SweepReport {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({ "suite": self.suite, "pass": self.pass(), "checked": self.checked, "counterexamples": self.counterexamples })
    }
}

struct Tally {
    checked: usize,
    bad: Vec<Value>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, bad: Vec::new() }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.bad.len() < MAX_COUNTEREXAMPLES {
            self.bad.push(witness());
        }
    }
}

pub fn rand_q(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Q {
    q(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn rand_point(rng: &mut impl Rng, bound: i64) -> HPoint {
    HPoint::new(rand_q(rng, bound, bound), q(rng.gen_range(1..=bound), rng.gen_range(1..=bound))).expect("positive")
}

/// A random product of `T^{±1}` and `S` with entries at most `bound`.
pub fn rand_sl2z(rng: &mut impl Rng, bound: i64) -> Sl2Z {
    loop {
        let mut g = Sl2Z::identity();
        for _ in 0..rng.gen_range(0..8) {
            let step = match rng.gen_range(0..3) {
                0 => Sl2Z::translation(1),
                1 => Sl2Z::translation(-1),
                _ => Sl2Z::inversion(),
            };
            g = g.mul(&step);
        }
        if g.max_abs() <= BigInt::from(bound) {
            return g;
        }
    }
}

/// The cusp whose open Ford disc holds `z`, by scanning `s <= ⌈1/√y⌉` and every
/// `r` with `(sx - r)^2 < y`.
fn ford_scan(z: &HPoint) -> Option<Cusp> {
    let mut hits = Vec::new();
    if z.y > Q::one() {
        hits.push(Cusp::infinity());
    }
    for s in 1..=ceil_inv_sqrt(&z.y) as i64 {
        let sx = qi(s) * &z.x;
        let lo: BigInt = sx.floor().to_integer() - 1 - BigInt::from(s);
        let hi = sx.ceil().to_integer() + 1 + BigInt::from(s);
        let mut r = lo;
        while r <= hi {
            if r.gcd(&BigInt::from(s)).is_one() {
                let m = Cusp { r: r.clone(), s: s.into() };
                if im_at_cusp(z, &m) > Q::one() {
                    hits.push(m);
                }
            }
            r += 1;
        }
    }
    assert!(hits.len() <= 1, "open Ford discs overlap at {z}");
    hits.pop()
}

fn cp_json(c: &CanonicalPair) -> Value {
    c.to_json()
}

fn ford_oracle(rng: &mut ChaCha8Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let z = rand_point(rng, 50);
        let got = canonical_pair(&z);
        let want = match ford_scan(&z) {
            None => CanonicalPair::SemiStable,
            Some(m) => CanonicalPair::Borel(m),
        };
        t.check(got == want, || json!({ "z": z.to_string(), "got": cp_json(&got), "want": cp_json(&want) }));
    }
    t
}

fn siegel_reduction(rng: &mut ChaCha8Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let z = rand_point(rng, 50);
        let (g, w) = reduce_to_siegel(&z);
        let ok = g.act(&z) == w && standard_siegel_contains(&w) && w.norm_sq() >= Q::one();
        t.check(ok, || json!({ "z": z.to_string(), "reduced": w.to_string() }));
    }
    t
}

fn equivariance(rng: &mut ChaCha8Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let z = rand_point(rng, 20);
        let g = rand_sl2z(rng, 10);
        let moved = match canonical_pair(&z) {
            CanonicalPair::SemiStable => CanonicalPair::SemiStable,
            CanonicalPair::Borel(m) => CanonicalPair::Borel(g.act_cusp(&m)),
        };
        let got = canonical_pair(&g.act(&z));
        t.check(got == moved, || json!({ "z": z.to_string(), "gamma": g.to_json() }));
    }
    t
}

pub fn sweep_datums() -> Vec<(&'static str, RootDatum)> {
    vec![
        ("affine-sl2", RootDatum::affine_sl(2)),
        ("affine-sl3", RootDatum::affine_sl(3)),
        ("affine-sl4", RootDatum::affine_sl(4)),
        ("affine-g2", RootDatum::affine_g2()),
    ]
}

pub fn rand_vector(rng: &mut impl Rng, rd: &RootDatum, bound: i64) -> CartanVector {
    CartanVector::new((0..rd.n()).map(|_| rand_q(rng, bound, 6)).collect(), rand_q(rng, bound, 6))
}

fn rand_proper_subset(rng: &mut impl Rng, rd: &RootDatum) -> NodeSet {
    loop {
        let j: NodeSet = (1..=rd.n()).filter(|_| rng.gen_bool(0.5)).collect();
        if j.len() < rd.n() {
            return j;
        }
    }
}

fn garland_roundtrip(rng: &mut ChaCha8Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for (name, rd) in sweep_datums() {
        for _ in 0..n {
            let h = rand_vector(rng, &rd, 20);
            let r = q(rng.gen_range(1..=20), rng.gen_range(1..=6));
            let j = rand_proper_subset(rng, &rd);
            let g = garland_split(&rd, &h, &r, &j).expect("valid input");
            let mut k = j.clone();
            k.extend((1..=rd.n()).filter(|_| rng.gen_bool(0.3)));
            let paths_ok = k.len() == rd.n() || {
                let (a, b) = projection_paths(&rd, &h, &r, &j, &k).expect("nested");
                a == b
            };
            t.check(&g.h_of_j + &g.h_j == h && paths_ok, || json!({ "datum": name, "J": j, "K": k }));
        }
    }
    t
}

fn rho_identities() -> Tally {
    let mut t = Tally::new();
    for (name, rd) in sweep_datums() {
        let all = rd.all_nodes();
        for j in all_proper_subsets(&rd) {
            let d = rho_data(&rd, &j).expect("proper");
            t.check(d.from_sum(&rd) == d.rho_p, || json!({ "datum": name, "J": j }));
            for k in all_proper_subsets(&rd).into_iter().chain([all.clone()]).filter(|k| j.is_subset(k) && &j != k) {
                // rho_pq panics if ρ_P = ρ_Q + ρ_P^Q fails on S_J
                t.check(rho_pq(&rd, &j, &k).is_ok(), || json!({ "datum": name, "J": j, "K": k }));
            }
        }
    }
    t
}

pub fn rand_im(rng: &mut impl Rng, n: usize) -> IMCoords {
    let mut series = |first: Option<Q>| {
        let mut c: Vec<Q> = (0..n).map(|_| rand_q(rng, 30, 7)).collect();
        if let Some(f) = first {
            c[0] = f;
        }
        TruncatedSeries::new(c, n)
    };
    let sigma = series(None);
    let mu = series(Some(Q::one()));
    let tau = series(Some(Q::zero()));
    IMCoords::new(sigma, mu, tau).expect("unipotent shape")
}

fn loopu_reduce(rng: &mut ChaCha8Rng, count: usize) -> Tally {
    let mut t = Tally::new();
    let half = q(1, 2);
    for _ in 0..count {
        let n = rng.gen_range(1..=8);
        let u = rand_im(rng, n);
        let ok = match u_reduce(&u) {
            Ok(red) => {
                red.reduced.box_coeffs().all(|x| x.abs() <= half)
                    && red.gamma.is_integral()
                    && u_multiply(&u, &red.gamma).ok() == Some(red.reduced.clone())
            }
            Err(_) => false,
        };
        t.check(ok, || u.to_json());
    }
    t
}

fn orbit_families(rng: &mut ChaCha8Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for rd in [RootDatum::affine_sl(2), RootDatum::affine_sl(3)] {
        for _ in 0..n {
            let p: Vec<Q> = (0..rd.n()).map(|_| q(rng.gen_range(0..=6), rng.gen_range(1..=3))).collect();
            let tv = rd.from_coweight_coords(&p, &rand_q(rng, 5, 3));
            let fam = from_weyl_orbit(&rd, &tv, 4).expect("dominant");
            let ok = verify_family(&rd, &fam).map(|v| v.valid).unwrap_or(false);
            t.check(ok, || json!({ "n": rd.n(), "T": tv.to_string_coroot() }));
        }
    }
    t
}

fn check_canonical_suite(rng: &mut ChaCha8Rng, n: usize) -> Tally {
    let mut t = Tally::new();
    for _ in 0..n {
        let z = rand_point(rng, 30);
        let truth = canonical_pair(&z);
        let mut cusps = vec![Cusp::infinity()];
        let bound = ceil_inv_sqrt(&z.y) as i64;
        for s in 1..=bound {
            let base = (qi(s) * &z.x).floor().to_integer();
            for dr in -(s + 1)..=(s + 1) {
                if let Ok(m) = Cusp::new(&base + dr, s) {
                    if m.s == BigInt::from(s) {
                        cusps.push(m);
                    }
                }
            }
        }
        for m in cusps {
            let (delta, rho) = rank_one_criterion(&z, &m);
            let expected = truth == CanonicalPair::Borel(m.clone());
            t.check(delta == expected && (!delta || rho), || json!({ "z": z.to_string(), "cusp": m.to_string() }));
        }
    }
    t
}

fn semistable_family_suite(n: usize) -> Tally {
    let mut t = Tally::new();
    let rd = RootDatum::affine_sl(2);
    let io: NodeSet = (1..rd.n()).collect();
    for r in [q(1, 2), qi(1), qi(2)] {
        for k in 1..=n as u64 {
            let f = semistable_family(&rd, k, &r).expect("valid");
            let ok = f.in_cell
                && ap_cell_contains(&rd, &f.a, &io, &Q::one()).unwrap_or(false)
                && f.limit.degree.is_zero()
                && f.limit.semistable;
            t.check(ok, || json!({ "n": k, "r": crate::q::fmt_q(&r) }));
        }
    }
    t
}

/// Runs a named suite with `n` samples and a fixed seed.
pub fn run_suite(name: &str, n: usize, seed: u64) -> Result<SweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = match name {
        "ford-oracle" => ford_oracle(&mut rng, n),
        "siegel-reduction" => siegel_reduction(&mut rng, n),
        "equivariance" => equivariance(&mut rng, n),
        "garland-roundtrip" => garland_roundtrip(&mut rng, n),
        "rho-identities" => rho_identities(),
        "loopu-reduce" => loopu_reduce(&mut rng, n),
        "orbit-families" => orbit_families(&mut rng, n),
        "check-canonical" => check_canonical_suite(&mut rng, n),
        "semistable-family" => semistable_family_suite(n),
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SweepReport { suite: name.to_string(), checked: t.checked, counterexamples: t.bad })
}
