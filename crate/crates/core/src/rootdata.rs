//! Generalized Cartan matrices and the extended Cartan algebra of an untwisted
//! affine root datum.
//!
//! Index convention: nodes are `1..=l+1`, node `l+1` is the affine node.
//! A [`CartanVector`] holds coordinates in `{ǎ_1, .., ǎ_{l+1}, D}`, a
//! [`Functional`] holds coordinates in the dual basis `{λ_1, .., λ_{l+1}, δ}`,
//! so the natural pairing is a plain dot product.

use crate::error::{Error, Result};
use crate::q::{fmt_q, primitive_integer, qi, QMat, Q};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};
use std::ops::{Add, Mul, Neg, Sub};

/// A subset of the index set, nodes numbered from 1.
pub type NodeSet = BTreeSet<usize>;

pub fn nodes(xs: &[usize]) -> NodeSet {
    xs.iter().copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Finite,
    AffineUntwisted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullVectors {
    pub d: Vec<i64>,
    pub d_check: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanMatrix {
    pub entries: Vec<Vec<i64>>,
    pub kind: Kind,
}

impl CartanMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// `a_ij` with 1-based indices.
    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.entries[i - 1][j - 1]
    }
}

fn as_qmat(a: &[Vec<i64>], idx: &[usize]) -> QMat {
    QMat::from_fn(idx.len(), idx.len(), |r, c| qi(a[idx[r]][idx[c]]))
}

fn check_gcm_shape(a: &[Vec<i64>]) -> Result<()> {
    let n = a.len();
    if n == 0 {
        return Err(Error::NotGcm("empty matrix".into()));
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotGcm("matrix is not square".into()));
        }
        if row[i] != 2 {
            return Err(Error::NotGcm(format!("diagonal entry a_{}{} = {}", i + 1, i + 1, row[i])));
        }
        for j in 0..n {
            if i != j {
                if row[j] > 0 {
                    return Err(Error::NotGcm(format!("positive off-diagonal entry a_{}{}", i + 1, j + 1)));
                }
                if (row[j] == 0) != (a[j][i] == 0) {
                    return Err(Error::NotGcm(format!("a_{}{} and a_{}{} disagree on vanishing", i + 1, j + 1, j + 1, i + 1)));
                }
            }
        }
    }
    Ok(())
}

fn indecomposable(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && a[i][j] != 0 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// All principal minors over subsets of `idx`, optionally skipping the full set.
fn principal_minors_positive(a: &[Vec<i64>], idx: &[usize], skip_full: bool) -> bool {
    let m = idx.len();
    for mask in 1u64..(1u64 << m) {
        if skip_full && mask == (1u64 << m) - 1 {
            continue;
        }
        let sub: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| idx[b]).collect();
        if !as_qmat(a, &sub).det().is_positive() {
            return false;
        }
    }
    true
}

/// Positive roots of a finite-type Cartan matrix, as coefficient vectors over the simple roots.
#[derive(Debug, Clone)]
pub struct FiniteRoots {
    pub a: Vec<Vec<i64>>,
    pub positive: Vec<Vec<i64>>,
    lookup: HashSet<Vec<i64>>,
}

impl FiniteRoots {
    /// Root strings: `β + a_i` is a root iff `p - <ǎ_i, β> > 0`, where `p` is
    /// the length of the `a_i`-string below `β`.
    pub fn new(a: &[Vec<i64>]) -> Self {
        let n = a.len();
        let mut positive: Vec<Vec<i64>> = (0..n).map(|i| unit(n, i)).collect();
        let mut lookup: HashSet<Vec<i64>> = positive.iter().cloned().collect();
        let mut k = 0;
        while k < positive.len() {
            let beta = positive[k].clone();
            for i in 0..n {
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if lookup.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = (0..n).map(|j| a[i][j] * beta[j]).sum();
                if p - pairing > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if lookup.insert(up.clone()) {
                        positive.push(up);
                    }
                }
            }
            k += 1;
        }
        positive.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
        FiniteRoots { a: a.to_vec(), positive, lookup }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        if self.lookup.contains(v) {
            return true;
        }
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        self.lookup.contains(&neg)
    }

    pub fn highest(&self) -> Vec<i64> {
        self.positive.last().cloned().unwrap_or_default()
    }

    /// `<ǎ_i, β>` for a root given by coefficients.
    pub fn pair_coroot(&self, i: usize, beta: &[i64]) -> i64 {
        (0..self.rank()).map(|j| self.a[i][j] * beta[j]).sum()
    }

    /// Coefficients of the coroot of a real root, in the simple coroot basis.
    pub fn coroot_of(&self, beta: &[i64]) -> Vec<i64> {
        // walk β down to a simple root, recording the reflections used
        let n = self.rank();
        let sign = if self.lookup.contains(beta) { 1 } else { -1 };
        let mut b: Vec<i64> = beta.iter().map(|x| x * sign).collect();
        let mut path = Vec::new();
        while b.iter().sum::<i64>() > 1 {
            let j = (0..n).find(|&j| self.pair_coroot(j, &b) > 0).expect("a positive non-simple root has a descent");
            let c = self.pair_coroot(j, &b);
            b[j] -= c;
            path.push(j);
        }
        let i = b.iter().position(|&x| x == 1).expect("reached a simple root");
        let mut cv = unit(n, i);
        for &j in path.iter().rev() {
            // s_j on coroots: v - <v, a_j> ǎ_j with <ǎ_k, a_j> = a_kj
            let c: i64 = (0..n).map(|k| cv[k] * self.a[k][j]).sum();
            cv[j] -= c;
        }
        cv.iter().map(|x| x * sign).collect()
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn to_i64_vec(v: &[num_bigint::BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("null vector entry fits in i64")).collect()
}

fn positive_null_vector(a: &QMat) -> Option<Vec<i64>> {
    let ns = a.nullspace();
    if ns.len() != 1 {
        return None;
    }
    let mut v = to_i64_vec(&primitive_integer(&ns[0]));
    if v.iter().all(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v.iter().all(|&x| x > 0).then_some(v)
}

/// Classifies a square integer matrix as finite or untwisted affine.
///
/// Finite type means every principal minor is positive. Affine type means
/// indecomposable, singular, with every proper principal minor positive. Among
/// affine matrices only the untwisted ones with the affine node last are
/// accepted: the marks on `I_o` must be the highest root of the finite part and
/// the comarks its coroot, both with value 1 on the last node.
pub fn classify_gcm(a: &[Vec<i64>]) -> Result<(Kind, Option<NullVectors>)> {
    check_gcm_shape(a)?;
    let n = a.len();
    let all: Vec<usize> = (0..n).collect();
    if principal_minors_positive(a, &all, false) {
        return Ok((Kind::Finite, None));
    }
    if !indecomposable(a) {
        return Err(Error::UnsupportedType("decomposable and not of finite type".into()));
    }
    let full = as_qmat(a, &all);
    if !full.det().is_zero() || !principal_minors_positive(a, &all, true) {
        return Err(Error::UnsupportedType("indefinite type".into()));
    }
    let d = positive_null_vector(&full).ok_or_else(|| Error::UnsupportedType("no positive null vector".into()))?;
    let d_check = positive_null_vector(&full.transpose())
        .ok_or_else(|| Error::UnsupportedType("no positive dual null vector".into()))?;
    if d[n - 1] != 1 || d_check[n - 1] != 1 {
        return Err(Error::UnsupportedType("twisted affine type, or affine node not last".into()));
    }
    let finite: Vec<Vec<i64>> = a[..n - 1].iter().map(|r| r[..n - 1].to_vec()).collect();
    let roots = FiniteRoots::new(&finite);
    if d[..n - 1] != roots.highest()[..] || d_check[..n - 1] != roots.coroot_of(&roots.highest())[..] {
        return Err(Error::UnsupportedType("marks are not the highest root of the finite part".into()));
    }
    Ok((Kind::AffineUntwisted, Some(NullVectors { d, d_check })))
}

/// The untwisted affinization of a finite Cartan matrix, affine node appended last.
pub fn untwisted_affine_matrix(finite: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let roots = FiniteRoots::new(finite);
    let theta = roots.highest();
    let theta_check = roots.coroot_of(&theta);
    let l = finite.len();
    let mut a = vec![vec![0i64; l + 1]; l + 1];
    for i in 0..l {
        for j in 0..l {
            a[i][j] = finite[i][j];
        }
        a[i][l] = -roots.pair_coroot(i, &theta);
        a[l][i] = -(0..l).map(|k| theta_check[k] * finite[k][i]).sum::<i64>();
    }
    a[l][l] = 2;
    a
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CartanVector {
    /// Coefficients of `ǎ_1 .. ǎ_{l+1}`.
    pub coroot: Vec<Q>,
    /// Coefficient of `D`.
    pub d: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Functional {
    /// Coefficients of `λ_1 .. λ_{l+1}`.
    pub m: Vec<Q>,
    /// Coefficient of `δ`.
    pub delta: Q,
}

macro_rules! linear_ops {
    ($t:ident, $v:ident, $s:ident) => {
        impl $t {
            pub fn zero(n: usize) -> Self {
                $t { $v: vec![Q::zero(); n], $s: Q::zero() }
            }

            pub fn rank(&self) -> usize {
                self.$v.len()
            }

            pub fn is_zero(&self) -> bool {
                self.$s.is_zero() && self.$v.iter().all(|x| x.is_zero())
            }

            pub fn scaled(&self, k: &Q) -> Self {
                $t { $v: self.$v.iter().map(|x| x * k).collect(), $s: &self.$s * k }
            }
        }

        impl Add for &$t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                assert_eq!(self.rank(), o.rank());
                $t { $v: self.$v.iter().zip(&o.$v).map(|(a, b)| a + b).collect(), $s: &self.$s + &o.$s }
            }
        }

        impl Sub for &$t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                assert_eq!(self.rank(), o.rank());
                $t { $v: self.$v.iter().zip(&o.$v).map(|(a, b)| a - b).collect(), $s: &self.$s - &o.$s }
            }
        }

        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scaled(&-Q::one())
            }
        }

        impl Mul<&$t> for &Q {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                o.scaled(self)
            }
        }

        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }

        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
    };
}

linear_ops!(CartanVector, coroot, d);
linear_ops!(Functional, m, delta);

impl CartanVector {
    /// Dot product with a functional; panics on a rank mismatch.
    pub fn dot(&self, phi: &Functional) -> Q {
        assert_eq!(self.rank(), phi.rank(), "pairing vectors of different rank");
        self.coroot.iter().zip(&phi.m).fold(&self.d * &phi.delta, |acc, (a, b)| acc + a * b)
    }

    pub fn new(coroot: Vec<Q>, d: Q) -> Self {
        CartanVector { coroot, d }
    }

    pub fn to_string_coroot(&self) -> String {
        let parts: Vec<String> = self.coroot.iter().map(fmt_q).collect();
        format!("({}; {})", parts.join(", "), fmt_q(&self.d))
    }
}

impl Functional {
    pub fn new(m: Vec<Q>, delta: Q) -> Self {
        Functional { m, delta }
    }
}

/// Pairing with the rank check surfaced as an error.
pub fn pairing(h: &CartanVector, phi: &Functional) -> Result<Q> {
    if h.rank() != phi.rank() {
        return Err(Error::DatumMismatch { expected: h.rank(), found: phi.rank() });
    }
    Ok(h.dot(phi))
}

/// Wire form of a vector: `{"basis": "coroot"|"coweight"|"weight", "coords": [...]}`,
/// the last coordinate being the `D`, `c` or `δ` coefficient respectively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorJson {
    pub basis: String,
    #[serde(with = "crate::q::serde_q::vec")]
    pub coords: Vec<Q>,
}

/// The Kac form data: `ε_i = d_i / ď_i` and the Gram matrix on `{ǎ_i, D}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KacForm {
    pub epsilon: Vec<Q>,
    pub gram: QMat,
}

/// An untwisted affine root datum with everything derived from it solved once.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub cartan: CartanMatrix,
    pub null: NullVectors,
    pub kac: KacForm,
    coweights: Vec<CartanVector>,
    pub finite: FiniteRoots,
}

impl RootDatum {
    pub fn new(a: Vec<Vec<i64>>) -> Result<Self> {
        let (kind, null) = classify_gcm(&a)?;
        let Some(null) = null else {
            return Err(Error::UnsupportedType("finite type has no affine root datum".into()));
        };
        let n = a.len();
        let epsilon: Vec<Q> = (0..n).map(|i| Q::new(null.d[i].into(), null.d_check[i].into())).collect();
        // (ǎ_i, ǎ_j) = a_ji ε_i, (ǎ_i, D) = [i = l+1], (D, D) = 0
        let gram = QMat::from_fn(n + 1, n + 1, |r, c| match (r < n, c < n) {
            (true, true) => qi(a[c][r]) * &epsilon[r],
            (true, false) => qi((r == n - 1) as i64),
            (false, true) => qi((c == n - 1) as i64),
            (false, false) => Q::zero(),
        });
        debug_assert_eq!(gram, gram.transpose(), "Kac form must be symmetric");
        let finite_part: Vec<Vec<i64>> = a[..n - 1].iter().map(|r| r[..n - 1].to_vec()).collect();
        let mut rd = RootDatum {
            cartan: CartanMatrix { entries: a, kind },
            null,
            kac: KacForm { epsilon, gram },
            coweights: vec![],
            finite: FiniteRoots::new(&finite_part),
        };
        rd.coweights = (1..=n).map(|i| rd.solve_coweight(i)).collect();
        Ok(rd)
    }

    pub fn affine_sl(n: usize) -> Self {
        assert!(n >= 2);
        let a = if n == 2 {
            vec![vec![2, -2], vec![-2, 2]]
        } else {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                2
                            } else if (i + 1) % n == j || (j + 1) % n == i {
                                -1
                            } else {
                                0
                            }
                        })
                        .collect()
                })
                .collect()
        };
        Self::new(a).expect("affine sl_n is untwisted affine")
    }

    pub fn affine_g2() -> Self {
        Self::new(untwisted_affine_matrix(&[vec![2, -1], vec![-3, 2]])).expect("affine G2")
    }

    /// Looks up a datum by name: `affine-sl2`, `affine-sl3`, ..., `affine-g2`.
    pub fn by_name(name: &str) -> Result<Self> {
        if name == "affine-g2" {
            return Ok(Self::affine_g2());
        }
        if let Some(k) = name.strip_prefix("affine-sl").and_then(|s| s.parse::<usize>().ok()) {
            if (2..=12).contains(&k) {
                return Ok(Self::affine_sl(k));
            }
        }
        Err(Error::Invalid(format!("unknown datum {name:?}")))
    }

    /// `l + 1`, the size of the index set.
    pub fn n(&self) -> usize {
        self.cartan.size()
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.cartan.a(i, j)
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n() {
            Err(Error::IndexOutOfRange(i))
        } else {
            Ok(())
        }
    }

    pub fn check_set(&self, j: &NodeSet) -> Result<()> {
        j.iter().try_for_each(|&i| self.check_node(i))
    }

    pub fn all_nodes(&self) -> NodeSet {
        (1..=self.n()).collect()
    }

    pub fn check_vec(&self, h: &CartanVector) -> Result<()> {
        if h.rank() != self.n() {
            return Err(Error::DatumMismatch { expected: self.n(), found: h.rank() });
        }
        Ok(())
    }

    pub fn check_fn(&self, f: &Functional) -> Result<()> {
        if f.rank() != self.n() {
            return Err(Error::DatumMismatch { expected: self.n(), found: f.rank() });
        }
        Ok(())
    }

    pub fn coroot(&self, i: usize) -> CartanVector {
        let mut v = CartanVector::zero(self.n());
        v.coroot[i - 1] = Q::one();
        v
    }

    /// The derivation `D`.
    pub fn d_vec(&self) -> CartanVector {
        CartanVector::new(vec![Q::zero(); self.n()], Q::one())
    }

    /// The canonical central element `c = Σ ď_i ǎ_i`.
    pub fn central(&self) -> CartanVector {
        CartanVector::new(self.null.d_check.iter().map(|&x| qi(x)).collect(), Q::zero())
    }

    pub fn lambda(&self, i: usize) -> Functional {
        let mut f = Functional::zero(self.n());
        f.m[i - 1] = Q::one();
        f
    }

    pub fn delta(&self) -> Functional {
        Functional::new(vec![Q::zero(); self.n()], Q::one())
    }

    /// `a_k = Σ_m a_mk λ_m + [k = l+1] δ`.
    pub fn simple_root(&self, k: usize) -> Functional {
        let n = self.n();
        Functional::new((1..=n).map(|m| qi(self.a(m, k))).collect(), qi((k == n) as i64))
    }

    /// `α = Σ b_k a_k` from integer coefficients.
    pub fn root_functional(&self, b: &[i64]) -> Functional {
        b.iter()
            .enumerate()
            .fold(Functional::zero(self.n()), |acc, (k, &c)| &acc + &self.simple_root(k + 1).scaled(&qi(c)))
    }

    /// Coefficients of `φ` in the simple-root basis, when it lies in their span.
    pub fn simple_coords(&self, phi: &Functional) -> Option<Vec<Q>> {
        let n = self.n();
        // the last node is the only one carrying δ, which fixes b_{l+1}
        let bl = phi.delta.clone();
        let mut rest = phi - &self.simple_root(n).scaled(&bl);
        let mut out = vec![Q::zero(); n];
        out[n - 1] = bl.clone();
        // remaining: Σ_{k<n} b_k a_k must match rest, an (n x (n-1)) system
        let sys = QMat::from_fn(n, n - 1, |m, k| qi(self.a(m + 1, k + 1)));
        let sq = QMat::from_fn(n - 1, n - 1, |r, c| sys.at(r, c).clone());
        let sol = sq.solve(&rest.m[..n - 1])?;
        out[..n - 1].clone_from_slice(&sol);
        let check = sys.mul_vec(&sol);
        rest.m.iter_mut().zip(&check).for_each(|(a, b)| *a -= b);
        rest.is_zero().then_some(out)
    }

    pub fn pair(&self, h: &CartanVector, phi: &Functional) -> Result<Q> {
        self.check_vec(h)?;
        self.check_fn(phi)?;
        Ok(h.dot(phi))
    }

    /// `(x, y)` for the Kac form.
    pub fn kac_pair(&self, x: &CartanVector, y: &CartanVector) -> Result<Q> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        let xs: Vec<Q> = x.coroot.iter().chain(std::iter::once(&x.d)).cloned().collect();
        let ys: Vec<Q> = y.coroot.iter().chain(std::iter::once(&y.d)).cloned().collect();
        let gy = self.kac.gram.mul_vec(&ys);
        Ok(xs.iter().zip(&gy).fold(Q::zero(), |acc, (a, b)| acc + a * b))
    }

    /// The isomorphism `ν: ĥᵉ → (ĥᵉ)*` induced by the Kac form.
    pub fn nu(&self, x: &CartanVector) -> Functional {
        let n = self.n();
        let xs: Vec<Q> = x.coroot.iter().chain(std::iter::once(&x.d)).cloned().collect();
        let g = self.kac.gram.transpose().mul_vec(&xs);
        Functional::new(g[..n].to_vec(), g[n].clone())
    }

    fn solve_coweight(&self, i: usize) -> CartanVector {
        let n = self.n();
        // unknowns (c_1..c_n, c_D); rows: <x, a_j> for j = 1..n, then <x, λ_n>
        let m = QMat::from_fn(n + 1, n + 1, |r, c| {
            if r < n {
                if c < n {
                    qi(self.a(c + 1, r + 1))
                } else {
                    qi((r == n - 1) as i64)
                }
            } else {
                qi((c == n - 1) as i64)
            }
        });
        let mut rhs = vec![Q::zero(); n + 1];
        rhs[i - 1] = Q::one();
        let x = m.solve(&rhs).expect("coweight system is nonsingular");
        CartanVector::new(x[..n].to_vec(), x[n].clone())
    }

    /// `λ̌_i`, characterized by `<λ̌_i, a_j> = δ_ij` and `<λ̌_i, λ_{l+1}> = 0`.
    pub fn coweight(&self, i: usize) -> CartanVector {
        self.coweights[i - 1].clone()
    }

    /// `(λ̌_1, .., λ̌_{l+1}, ψ̌)`; `ψ̌` is dual to `λ_{l+1}` and coincides with `c`.
    pub fn coweight_basis(&self) -> (Vec<CartanVector>, CartanVector) {
        (self.coweights.clone(), self.central())
    }

    /// Coweight coordinates `(p_i = <H, a_i>; f = <H, λ_{l+1}>)`.
    pub fn coweight_coords(&self, h: &CartanVector) -> (Vec<Q>, Q) {
        let n = self.n();
        ((1..=n).map(|i| h.dot(&self.simple_root(i))).collect(), h.coroot[n - 1].clone())
    }

    pub fn from_coweight_coords(&self, p: &[Q], f: &Q) -> CartanVector {
        p.iter()
            .enumerate()
            .fold(self.central().scaled(f), |acc, (i, c)| &acc + &self.coweights[i].scaled(c))
    }

    pub fn rho(&self) -> Functional {
        Functional::new(vec![Q::one(); self.n()], Q::zero())
    }

    /// `ȟ = 1 + Σ_{i ∈ I_o} ď_i`.
    pub fn dual_coxeter(&self) -> Q {
        let n = self.n();
        qi(1 + self.null.d_check[..n - 1].iter().sum::<i64>())
    }

    /// `ω^o_j = λ_j - ď_j λ_{l+1}`: the finite fundamental weights, null on `c` and `D`.
    pub fn classical_weight(&self, j: usize) -> Functional {
        let n = self.n();
        &self.lambda(j) - &self.lambda(n).scaled(&qi(self.null.d_check[j - 1]))
    }

    /// `(ρ_o, ȟ)` with `ρ = ρ_o + ȟ λ_{l+1}` checked on the way out.
    pub fn rho_decomposition_classical(&self) -> (Functional, Q) {
        let n = self.n();
        let rho_o = (1..n).fold(Functional::zero(n), |acc, j| &acc + &self.classical_weight(j));
        let h = self.dual_coxeter();
        assert_eq!(&rho_o + &self.lambda(n).scaled(&h), self.rho());
        (rho_o, h)
    }

    /// `ρ_o = Σ n_i a_i` over the finite nodes.
    pub fn rho_o_root_coeffs(&self) -> Vec<Q> {
        let idx: Vec<usize> = (0..self.n() - 1).collect();
        as_qmat(&self.cartan.entries, &idx).solve(&vec![Q::one(); idx.len()]).expect("finite part is nonsingular")
    }

    /// `<H, δ> < 0`.
    pub fn tits_cone_contains(&self, h: &CartanVector) -> bool {
        h.dot(&self.delta()).is_negative()
    }

    /// `x <= y` iff `y - x` is a nonnegative combination of the `ǎ_i`.
    pub fn dominance_le(&self, x: &CartanVector, y: &CartanVector) -> bool {
        let diff = y - x;
        diff.d.is_zero() && diff.coroot.iter().all(|c| !c.is_negative())
    }

    fn subset_matrix(&self, j: &NodeSet) -> (Vec<usize>, QMat) {
        let idx: Vec<usize> = j.iter().map(|&x| x - 1).collect();
        let m = as_qmat(&self.cartan.entries, &idx);
        (idx, m)
    }

    /// Coefficients `x_j` of `ω̌^J_r = Σ_{j ∈ J} x_j ǎ_j`, from `A(J)^T x = e_r`.
    pub fn finite_coweight_coeffs(&self, j: &NodeSet, r: usize) -> Vec<Q> {
        assert!(j.len() < self.n() && j.contains(&r));
        let (idx, m) = self.subset_matrix(j);
        let rhs: Vec<Q> = idx.iter().map(|&k| qi((k == r - 1) as i64)).collect();
        m.transpose().solve(&rhs).expect("proper principal submatrix is of finite type")
    }

    pub fn finite_coweight(&self, j: &NodeSet, r: usize) -> CartanVector {
        let x = self.finite_coweight_coeffs(j, r);
        let mut v = CartanVector::zero(self.n());
        for (k, node) in j.iter().enumerate() {
            v.coroot[node - 1] = x[k].clone();
        }
        v
    }

    /// Coefficients `c_j` of `ω^J_d = Σ_{j ∈ J} c_j a_j`, from `A(J) c = e_d`.
    pub fn finite_weight_coeffs(&self, j: &NodeSet, d: usize) -> Vec<Q> {
        assert!(j.len() < self.n() && j.contains(&d));
        let (idx, m) = self.subset_matrix(j);
        let rhs: Vec<Q> = idx.iter().map(|&k| qi((k == d - 1) as i64)).collect();
        m.solve(&rhs).expect("proper principal submatrix is of finite type")
    }

    /// `ω^J_d` as an ambient functional on all of `ĥᵉ`.
    pub fn finite_weight(&self, j: &NodeSet, d: usize) -> Functional {
        let c = self.finite_weight_coeffs(j, d);
        j.iter().zip(&c).fold(Functional::zero(self.n()), |acc, (&k, ck)| &acc + &self.simple_root(k).scaled(ck))
    }

    pub fn vector_json(&self, h: &CartanVector, basis: &str) -> Result<VectorJson> {
        let coords = match basis {
            "coroot" => h.coroot.iter().chain(std::iter::once(&h.d)).cloned().collect(),
            "coweight" => {
                let (p, f) = self.coweight_coords(h);
                p.into_iter().chain(std::iter::once(f)).collect()
            }
            _ => return Err(Error::Invalid(format!("basis {basis:?} is not a Cartan basis"))),
        };
        Ok(VectorJson { basis: basis.into(), coords })
    }

    pub fn vector_from_json(&self, v: &VectorJson) -> Result<CartanVector> {
        let n = self.n();
        if v.coords.len() != n + 1 {
            return Err(Error::DatumMismatch { expected: n + 1, found: v.coords.len() });
        }
        match v.basis.as_str() {
            "coroot" => Ok(CartanVector::new(v.coords[..n].to_vec(), v.coords[n].clone())),
            "coweight" => Ok(self.from_coweight_coords(&v.coords[..n], &v.coords[n])),
            b => Err(Error::Invalid(format!("basis {b:?} is not a Cartan basis"))),
        }
    }

    pub fn functional_from_json(&self, v: &VectorJson) -> Result<Functional> {
        let n = self.n();
        if v.basis != "weight" {
            return Err(Error::Invalid("functionals use the weight basis".into()));
        }
        if v.coords.len() != n + 1 {
            return Err(Error::DatumMismatch { expected: n + 1, found: v.coords.len() });
        }
        Ok(Functional::new(v.coords[..n].to_vec(), v.coords[n].clone()))
    }
}
