//! Alternating matrices over `Z/m`: the labels of the components.
//!
//! A [`SkewMatrixZm`] stores only its strict upper triangle. Its invariants
//! are the row-space order `|R(D)|`, the coordinate orders `r_i(D)`, and
//! `sigma(D) = sqrt|R(D)|`, which is also the product of the additive orders
//! of the invariants of its congruence normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::partition::Partition;

/// Default bound on the number of candidate matrices an enumeration visits.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// An `n x n` alternating matrix over `Z/m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SkewRepr", into = "SkewRepr")]
pub struct SkewMatrixZm {
    n: usize,
    m: u64,
    upper: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct SkewRepr {
    n: usize,
    m: u64,
    upper: Vec<u64>,
}

impl TryFrom<SkewRepr> for SkewMatrixZm {
    type Error = Error;

    fn try_from(r: SkewRepr) -> Result<Self> {
        SkewMatrixZm::new(r.n, r.m, r.upper)
    }
}

impl From<SkewMatrixZm> for SkewRepr {
    fn from(d: SkewMatrixZm) -> Self {
        SkewRepr {
            n: d.n,
            m: d.m,
            upper: d.upper,
        }
    }
}

fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl SkewMatrixZm {
    /// `upper` lists `d_12, d_13, ..., d_1n, d_23, ...` and must already be
    /// reduced mod `m`.
    pub fn new(n: usize, m: u64, upper: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix size must be positive".into()));
        }
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        if upper.len() != upper_len(n) {
            return Err(Error::DimensionMismatch(format!(
                "{} upper-triangle entries for n = {n}, expected {}",
                upper.len(),
                upper_len(n)
            )));
        }
        if let Some(bad) = upper.iter().find(|&&d| d >= m) {
            return Err(Error::InvalidInput(format!(
                "entry {bad} is not reduced mod {m}"
            )));
        }
        Ok(Self { n, m, upper })
    }

    pub fn zero(n: usize, m: u64) -> Result<Self> {
        Self::new(n, m, vec![0; upper_len(n)])
    }

    /// Reads an integer matrix mod `m`; it must be alternating mod `m`.
    pub fn from_int_matrix(a: &IntMatrix, m: u64) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(
                "alternating matrix must be square".into(),
            ));
        }
        let r = a.reduce_mod(m);
        let n = r.rows();
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            if !r.get(i, i).is_zero() {
                return Err(Error::InvalidInput(format!(
                    "nonzero diagonal entry at {i}"
                )));
            }
            for j in i + 1..n {
                let (a, b) = (r.get(i, j), r.get(j, i));
                if !((a + b) % m).is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "entries ({i},{j}) and ({j},{i}) are not opposite"
                    )));
                }
                upper.push(a.to_u64().expect("reduced entry fits"));
            }
        }
        Self::new(n, m, upper)
    }

    /// The normal form `D_n(c_1, ..., c_t)`: entry `(k + t, k)` is `c_k`,
    /// entry `(k, k + t)` is `-c_k`, everything else zero.
    pub fn normal_form(n: usize, m: u64, invariants: &[u64]) -> Result<Self> {
        let t = invariants.len();
        if 2 * t > n {
            return Err(Error::InvalidInput(format!(
                "{t} invariant pairs do not fit in size {n}"
            )));
        }
        let mut d = Self::zero(n, m)?;
        for (k, &c) in invariants.iter().enumerate() {
            let idx = d.upper_index(k, k + t);
            d.upper[idx] = (m - c % m) % m;
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn upper(&self) -> &[u64] {
        &self.upper
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Entry `(i, j)` of the full matrix, reduced into `0..m`.
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0,
            Less => self.upper[self.upper_index(i, j)],
            Greater => (self.m - self.upper[self.upper_index(j, i)]) % self.m,
        }
    }

    /// Rows of the full matrix reduced mod `m`.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&d| d == 0)
    }

    /// Row-major alternating integer lift with `d_ij` above the diagonal and
    /// `-d_ij` below.
    pub fn lift_i64(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.n * self.n];
        self.lift_into(&mut out);
        out
    }

    fn lift_into(&self, out: &mut [i64]) {
        let n = self.n;
        let mut idx = 0;
        for i in 0..n {
            out[i * n + i] = 0;
            for j in i + 1..n {
                let d = self.upper[idx] as i64;
                out[i * n + j] = d;
                out[j * n + i] = -d;
                idx += 1;
            }
        }
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_i64(self.n, self.n, &self.lift_i64()).expect("n >= 1")
    }

    /// `Q^T D Q` mod `m`.
    pub fn congruent(&self, q: &IntMatrix) -> Result<Self> {
        let d = self.to_int_matrix();
        let prod = q.transpose().mul(&d)?.mul(q)?;
        Self::from_int_matrix(&prod, self.m)
    }

    /// `|R(D)|`, the order of the row space in `(Z/m)^n`.
    pub fn row_space_order(&self) -> Result<u64> {
        linalg::row_space_order_i64(self.n, self.n, &self.lift_i64(), self.m)
    }

    /// `(r_1, ..., r_n)`.
    pub fn coordinate_orders(&self) -> Vec<u64> {
        (0..self.n)
            .map(|j| {
                let g = (0..self.n).fold(self.m, |g, i| g.gcd(&self.entry(i, j)));
                self.m / g
            })
            .collect()
    }

    /// Generators of the row space: the nonzero rows, deduplicated, in order.
    pub fn row_space_generators(&self) -> Vec<Vec<u64>> {
        let mut out: Vec<Vec<u64>> = Vec::new();
        for row in self.rows() {
            if row.iter().any(|&x| x != 0) && !out.contains(&row) {
                out.push(row);
            }
        }
        out
    }
}

impl fmt::Debug for SkewMatrixZm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Skew(n={}, m={}, {:?})", self.n, self.m, self.upper)
    }
}

impl fmt::Display for SkewMatrixZm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.upper.iter().map(u64::to_string).collect();
        write!(f, "[{}] mod {}", entries.join(","), self.m)
    }
}

fn exact_sqrt(x: u64) -> Result<u64> {
    let r = x.sqrt();
    if r * r == x {
        Ok(r)
    } else {
        Err(Error::Internal(format!(
            "row space order {x} of an alternating matrix is not a square"
        )))
    }
}

/// `sigma(D) = sqrt|R(D)|`.
pub fn sigma(d: &SkewMatrixZm) -> Result<u64> {
    exact_sqrt(d.row_space_order()?)
}

/// True iff `sigma(D) | m` and `r_i(D) | k_i` for the leading torsion
/// coordinates `i < torsion.len()`.
pub fn is_admissible(d: &SkewMatrixZm, torsion: &[u64]) -> Result<bool> {
    Ok(admissibility_failure(d, torsion)?.is_none())
}

/// The first failed divisibility, if any.
pub fn admissibility_failure(d: &SkewMatrixZm, torsion: &[u64]) -> Result<Option<String>> {
    if torsion.len() > d.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} torsion coefficients for a {}x{} matrix",
            torsion.len(),
            d.n(),
            d.n()
        )));
    }
    let s = sigma(d)?;
    if !d.m().is_multiple_of(s) {
        return Ok(Some(format!(
            "sigma(D) = {s} does not divide m = {}",
            d.m()
        )));
    }
    let orders = d.coordinate_orders();
    for (i, (&r, &k)) in orders.iter().zip(torsion).enumerate() {
        if k == 0 || k % r != 0 {
            return Ok(Some(format!(
                "r_{}(D) = {r} does not divide k_{} = {k}",
                i + 1,
                i + 1
            )));
        }
    }
    Ok(None)
}

/// Congruence normal form: `Q^T D Q = D_n(c_1, ..., c_t)` mod `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalSkewForm {
    pub q: IntMatrix,
    /// Exact inverse of `q`.
    pub q_inv: IntMatrix,
    /// `c_1, ..., c_t` in `1..m`, with additive orders `|c_t| | ... | |c_1|`.
    pub invariants: Vec<u64>,
    pub m: u64,
}

impl CanonicalSkewForm {
    pub fn t(&self) -> usize {
        self.invariants.len()
    }

    /// Additive orders `|c_k|` in `Z/m`.
    pub fn orders(&self) -> Vec<u64> {
        self.invariants
            .iter()
            .map(|&c| self.m / c.gcd(&self.m))
            .collect()
    }

    /// `prod |c_k|`, which equals `sigma(D)`.
    pub fn sigma(&self) -> u64 {
        self.orders().iter().product()
    }

    pub fn normal_form(&self) -> Result<SkewMatrixZm> {
        SkewMatrixZm::normal_form(self.q.rows(), self.m, &self.invariants)
    }
}

/// Working state for the alternating reduction: `a = Q^T D Q` over `Z`.
struct Congruence {
    n: usize,
    a: Vec<BigInt>,
    q: IntMatrix,
    q_inv: IntMatrix,
}

impl Congruence {
    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.n + j]
    }

    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = self.n;
        for k in 0..n {
            self.a.swap(i * n + k, j * n + k);
        }
        for k in 0..n {
            self.a.swap(k * n + i, k * n + j);
        }
        for k in 0..n {
            let (x, y) = (self.q.get(k, i).clone(), self.q.get(k, j).clone());
            self.q.set(k, i, y);
            self.q.set(k, j, x);
            let (x, y) = (self.q_inv.get(i, k).clone(), self.q_inv.get(j, k).clone());
            self.q_inv.set(i, k, y);
            self.q_inv.set(j, k, x);
        }
    }

    /// Basis change `e_dst <- e_dst + x * e_src`.
    fn add(&mut self, dst: usize, src: usize, x: &BigInt) {
        if x.is_zero() {
            return;
        }
        let n = self.n;
        for k in 0..n {
            let v = &self.a[src * n + k] * x;
            self.a[dst * n + k] += v;
        }
        for k in 0..n {
            let v = &self.a[k * n + src] * x;
            self.a[k * n + dst] += v;
        }
        for k in 0..n {
            let v = self.q.get(k, dst) + self.q.get(k, src) * x;
            self.q.set(k, dst, v);
            let v = self.q_inv.get(src, k) - self.q_inv.get(dst, k) * x;
            self.q_inv.set(src, k, v);
        }
    }

    /// Smallest nonzero `|a_ij|` with `start <= i < j`, first in
    /// lexicographic order on ties.
    fn pivot(&self, start: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in start..self.n {
            for j in i + 1..self.n {
                let x = self.at(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if x.magnitude() >= self.at(bi, bj).magnitude() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Reduces the block starting at `b` to a single pair `(b, b+1)` with a
    /// positive entry dividing everything that remains. Returns that entry.
    fn reduce_block(&mut self, b: usize) -> Option<BigInt> {
        let n = self.n;
        loop {
            let (i, j) = self.pivot(b)?;
            self.swap(b, i);
            self.swap(b + 1, j);
            if self.at(b, b + 1).is_negative() {
                self.swap(b, b + 1);
            }
            let p = self.at(b, b + 1).clone();
            for k in b + 2..n {
                let q = self.at(b, k).div_floor(&p);
                self.add(k, b + 1, &-q);
                let q = self.at(b + 1, k).div_floor(&p);
                self.add(k, b, &q);
            }
            let dirty =
                (b + 2..n).any(|k| !self.at(b, k).is_zero() || !self.at(b + 1, k).is_zero());
            if dirty {
                continue;
            }
            let offender =
                (b + 2..n).find(|&k| (k + 1..n).any(|l| !(self.at(k, l) % &p).is_zero()));
            match offender {
                // pulls a non-multiple into row b; the next pass reduces it
                Some(k) => self.add(b, k, &BigInt::from(1)),
                None => return Some(p),
            }
        }
    }
}

/// Computes a unimodular `Q` with `Q^T D Q = D_n(c_1, ..., c_t)` mod `m`.
///
/// The reduction runs on the alternating integer lift: repeatedly take the
/// smallest nonzero entry as a pivot pair, clear its two rows and columns by
/// congruence, and pull in any entry the pivot does not divide. Over `Z` the
/// pivots `p_1 | p_2 | ...` form a divisibility chain, so their residues mod
/// `m` have additive orders in the opposite chain. Pairs whose pivot vanishes
/// mod `m` are dropped.
pub fn canonical_form(d: &SkewMatrixZm) -> CanonicalSkewForm {
    let n = d.n();
    let m = d.m();
    let mut w = Congruence {
        n,
        a: d.lift_i64().into_iter().map(BigInt::from).collect(),
        q: IntMatrix::identity(n),
        q_inv: IntMatrix::identity(n),
    };
    let mut pivots = Vec::new();
    let mut b = 0;
    while b + 1 < n {
        match w.reduce_block(b) {
            Some(p) => pivots.push(p),
            None => break,
        }
        b += 2;
    }
    let big_m = BigInt::from(m);
    let invariants: Vec<u64> = pivots
        .iter()
        .map(|p| p.mod_floor(&big_m).to_u64().expect("residue fits"))
        .take_while(|&c| c != 0)
        .collect();
    let t = invariants.len();

    // block k occupies (2k, 2k+1); move 2k+1 to slot k and 2k to slot k+t
    let mut order: Vec<usize> = Vec::with_capacity(n);
    order.extend((0..t).map(|k| 2 * k + 1));
    order.extend((0..t).map(|k| 2 * k));
    order.extend(2 * t..n);
    let mut q = IntMatrix::zeros(n, n);
    let mut q_inv = IntMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            q.set(r, new, w.q.get(r, old).clone());
            q_inv.set(new, r, w.q_inv.get(old, r).clone());
        }
    }
    CanonicalSkewForm {
        q,
        q_inv,
        invariants,
        m,
    }
}

/// `m^(n(n-1)/2)`, or `None` if it overflows.
pub fn space_size(n: usize, m: u64) -> Option<u64> {
    let e = u32::try_from(upper_len(n)).ok()?;
    m.checked_pow(e)
}

fn guarded_size(n: usize, m: u64, cap: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix size must be positive".into()));
    }
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    match space_size(n, m) {
        Some(size) if size <= cap => Ok(size),
        Some(size) => Err(Error::EnumerationTooLarge {
            size: size.to_string(),
            cap,
        }),
        None => Err(Error::EnumerationTooLarge {
            size: format!("{m}^{}", upper_len(n)),
            cap,
        }),
    }
}

/// Matrices of `T(n, Z/m)` with indices in a half-open range, in
/// lexicographic order of the upper triangle.
#[derive(Clone, Debug)]
pub struct SkewRange {
    current: SkewMatrixZm,
    remaining: u64,
}

impl SkewRange {
    fn new(n: usize, m: u64, start: u64, end: u64) -> Self {
        let len = upper_len(n);
        let mut upper = vec![0u64; len];
        let mut x = start;
        for slot in upper.iter_mut().rev() {
            *slot = x % m;
            x /= m;
        }
        Self {
            current: SkewMatrixZm { n, m, upper },
            remaining: end.saturating_sub(start),
        }
    }
}

impl Iterator for SkewRange {
    type Item = SkewMatrixZm;

    fn next(&mut self) -> Option<SkewMatrixZm> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.current.clone();
        let m = self.current.m;
        for slot in self.current.upper.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// The slice of `T(n, Z/m)` owned by `partition`, restricted by `filter`.
///
/// Refuses when `|T(n, Z/m)|` exceeds `cap`.
pub fn enumerate<F>(
    n: usize,
    m: u64,
    partition: Partition,
    cap: u64,
    filter: F,
) -> Result<std::iter::Filter<SkewRange, F>>
where
    F: FnMut(&SkewMatrixZm) -> bool,
{
    let total = guarded_size(n, m, cap)?;
    let (start, end) = partition.range(total);
    Ok(SkewRange::new(n, m, start, end).filter(filter))
}

/// Fast admissibility test `sigma(D) | m` reusing a scratch buffer.
struct SigmaProbe {
    scratch: Vec<i64>,
}

impl SigmaProbe {
    fn new(n: usize) -> Self {
        Self {
            scratch: vec![0; n * n],
        }
    }

    fn sigma(&mut self, d: &SkewMatrixZm) -> Result<u64> {
        d.lift_into(&mut self.scratch);
        exact_sqrt(linalg::row_space_order_i64(d.n, d.n, &self.scratch, d.m)?)
    }
}

/// `N(n, m)` restricted to one partition.
pub fn count_admissible_partition(n: usize, m: u64, partition: Partition, cap: u64) -> Result<u64> {
    let mut probe = SigmaProbe::new(n);
    let mut count = 0;
    let mut failure = None;
    for d in enumerate(n, m, partition, cap, |_| true)? {
        match probe.sigma(&d) {
            Ok(s) if m.is_multiple_of(s) => count += 1,
            Ok(_) => {}
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(count),
    }
}

/// `N(n, m) = |{D in T(n, Z/m) : sigma(D) | m}|`.
pub fn count_admissible(n: usize, m: u64, cap: u64) -> Result<u64> {
    count_admissible_partition(n, m, Partition::WHOLE, cap)
}

/// `N(n, m)` computed on `workers` threads.
pub fn count_admissible_parallel(n: usize, m: u64, workers: usize, cap: u64) -> Result<u64> {
    crate::partition::fan_out(workers, |p| count_admissible_partition(n, m, p, cap))
        .into_iter()
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn skew(n: usize, m: u64, upper: &[u64]) -> SkewMatrixZm {
        SkewMatrixZm::new(n, m, upper.to_vec()).unwrap()
    }

    fn check_canonical(d: &SkewMatrixZm) -> CanonicalSkewForm {
        let c = canonical_form(d);
        assert!(c.q.is_unimodular(), "{d:?}");
        assert!(c.q.mul(&c.q_inv).unwrap() == IntMatrix::identity(d.n()));
        assert_eq!(
            d.congruent(&c.q).unwrap(),
            c.normal_form().unwrap(),
            "{d:?} {c:?}"
        );
        let orders = c.orders();
        assert!(orders.iter().all(|&o| o > 1));
        for w in orders.windows(2) {
            assert_eq!(w[0] % w[1], 0, "order chain broken for {d:?}: {orders:?}");
        }
        assert!(c.invariants.iter().all(|&x| (1..d.m()).contains(&x)));
        assert_eq!(c.sigma(), sigma(d).unwrap(), "{d:?}");
        c
    }

    #[test]
    fn serialization_shape() {
        let d = skew(3, 4, &[2, 1, 0]);
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"n":3,"m":4,"upper":[2,1,0]}"#);
        let back: SkewMatrixZm = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<SkewMatrixZm>(r#"{"n":3,"m":4,"upper":[2,1]}"#).is_err());
        assert!(serde_json::from_str::<SkewMatrixZm>(r#"{"n":2,"m":4,"upper":[4]}"#).is_err());
        assert!(serde_json::from_str::<SkewMatrixZm>(r#"{"n":2,"m":0,"upper":[0]}"#).is_err());
    }

    #[test]
    fn full_matrix_entries() {
        let d = skew(3, 5, &[1, 2, 3]);
        assert_eq!(d.rows(), vec![vec![0, 1, 2], vec![4, 0, 3], vec![3, 2, 0]]);
        assert_eq!(
            SkewMatrixZm::from_int_matrix(&d.to_int_matrix(), 5).unwrap(),
            d
        );
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&SkewMatrixZm::zero(4, 6).unwrap()).unwrap(), 1);
        assert_eq!(sigma(&skew(2, 4, &[2])).unwrap(), 2);
        // d12 = 1, d34 = 2 in T(4, Z/4): orders 4 and 2
        assert_eq!(sigma(&skew(4, 4, &[1, 0, 0, 0, 0, 2])).unwrap(), 8);
    }

    #[test]
    fn canonical_examples() {
        let c = check_canonical(&SkewMatrixZm::zero(3, 5).unwrap());
        assert_eq!(c.t(), 0);
        assert_eq!(c.q, IntMatrix::identity(3));

        let c = check_canonical(&skew(2, 2, &[1]));
        assert_eq!((c.t(), c.orders()), (1, vec![2]));

        let c = check_canonical(&skew(3, 4, &[2, 1, 0]));
        assert_eq!((c.t(), c.orders()), (1, vec![4]));

        let c = check_canonical(&skew(4, 4, &[1, 0, 0, 0, 0, 2]));
        assert_eq!(c.orders(), vec![4, 2]);
    }

    #[test]
    fn canonical_form_is_deterministic() {
        let d = skew(5, 12, &[3, 4, 6, 1, 8, 9, 2, 10, 5, 7]);
        assert_eq!(canonical_form(&d), canonical_form(&d));
        check_canonical(&d);
    }

    #[test]
    fn canonical_form_exhaustive_small() {
        for (n, m) in [(2, 12), (3, 6), (4, 4), (4, 6), (5, 2)] {
            for d in enumerate(n, m, Partition::WHOLE, u64::MAX, |_| true).unwrap() {
                check_canonical(&d);
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&SkewMatrixZm::zero(3, 7).unwrap(), &[1, 1]).unwrap());
        let d = skew(2, 2, &[1]);
        assert!(is_admissible(&d, &[2, 2]).unwrap());
        assert!(!is_admissible(&d, &[1, 2]).unwrap());
        assert!(!is_admissible(&skew(4, 4, &[1, 0, 0, 0, 0, 2]), &[]).unwrap());
        assert!(is_admissible(&d, &[2, 2, 2]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let count = |n, m| {
            enumerate(n, m, Partition::WHOLE, 1000, |_| true)
                .unwrap()
                .count()
        };
        assert_eq!(count(2, 3), 3);
        assert_eq!(count(3, 2), 8);
        assert_eq!(count(1, 9), 1);
        let admissible = enumerate(4, 4, Partition::WHOLE, 10_000, |d| {
            4 % sigma(d).unwrap() == 0
        })
        .unwrap()
        .count();
        assert_eq!(admissible, 1184);
        assert!(matches!(
            enumerate(4, 4, Partition::WHOLE, 4095, |_| true),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            count_admissible(30, 30, DEFAULT_ENUMERATION_CAP),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let all: Vec<_> = enumerate(3, 3, Partition::WHOLE, 100, |_| true)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 27);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0].upper(), &[0, 0, 0]);
        assert_eq!(all[1].upper(), &[0, 0, 1]);
        assert_eq!(all[26].upper(), &[2, 2, 2]);
    }

    #[test]
    fn partitioned_enumeration_matches_single_worker() {
        for (n, m) in [(3, 4), (4, 3), (2, 7)] {
            let single: Vec<_> = enumerate(n, m, Partition::WHOLE, u64::MAX, |_| true)
                .unwrap()
                .collect();
            for workers in [1, 2, 3, 7] {
                let mut merged = Vec::new();
                for p in Partition::all(workers) {
                    merged.extend(enumerate(n, m, p, u64::MAX, |_| true).unwrap());
                }
                assert_eq!(merged, single, "n={n} m={m} workers={workers}");
            }
            for workers in [2, 3, 7] {
                assert_eq!(
                    count_admissible_parallel(n, m, workers, u64::MAX).unwrap(),
                    count_admissible(n, m, u64::MAX).unwrap()
                );
            }
        }
    }

    #[test]
    fn small_rank_counts() {
        for m in 1..=12 {
            assert_eq!(count_admissible(2, m, u64::MAX).unwrap(), m);
        }
        for m in 1..=8 {
            assert_eq!(count_admissible(3, m, u64::MAX).unwrap(), m.pow(3));
            assert_eq!(count_admissible(1, m, u64::MAX).unwrap(), 1);
        }
    }

    /// Enumerates the row space of `d` by closure.
    fn closure_row_space(d: &SkewMatrixZm) -> u64 {
        let m = d.m();
        let rows = d.rows();
        let mut seen = std::collections::HashSet::from([vec![0u64; d.n()]]);
        let mut stack = vec![vec![0u64; d.n()]];
        while let Some(x) = stack.pop() {
            for r in &rows {
                let y: Vec<u64> = x.iter().zip(r).map(|(a, b)| (a + b) % m).collect();
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        seen.len() as u64
    }

    #[test]
    fn row_space_order_is_a_square_matching_closure() {
        for (n, m) in [(3, 6), (4, 4), (4, 3)] {
            for d in enumerate(n, m, Partition::WHOLE, u64::MAX, |_| true).unwrap() {
                let order = d.row_space_order().unwrap();
                assert_eq!(order, closure_row_space(&d));
                let s = order.sqrt();
                assert_eq!(s * s, order);
            }
        }
    }

    fn unimodular_from_ops(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
        let mut q = IntMatrix::identity(n);
        for &(a, b, x) in ops {
            let (dst, src) = (a % n, b % n);
            if dst == src {
                continue;
            }
            for r in 0..n {
                let v = q.get(r, dst) + q.get(r, src) * BigInt::from(x);
                q.set(r, dst, v);
            }
        }
        q
    }

    proptest! {
        #[test]
        fn sigma_is_congruence_invariant(
            n in 2usize..6,
            m in 2u64..13,
            entries in proptest::collection::vec(0u64..1000, 15),
            ops in proptest::collection::vec((0usize..6, 0usize..6, -3i64..4), 1..12),
        ) {
            let upper: Vec<u64> = entries.iter().take(n * (n - 1) / 2).map(|x| x % m).collect();
            let d = SkewMatrixZm::new(n, m, upper).unwrap();
            let q = unimodular_from_ops(n, &ops);
            prop_assert!(q.determinant().unwrap().is_one());
            let moved = d.congruent(&q).unwrap();
            prop_assert_eq!(sigma(&moved).unwrap(), sigma(&d).unwrap());
            check_canonical(&moved);
        }
    }
}
