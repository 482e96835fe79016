//! Exact integer and `Z/m` linear algebra.
//!
//! Everything downstream (row-space orders, coordinate orders, cokernels of
//! finite abelian groups) is read off a Smith normal form of an integer lift.
//! The elimination runs on machine integers with checked arithmetic first and
//! reruns on [`BigInt`] when anything overflows, so results are always exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix must be nonempty".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::from_i64(rows.len(), cols, &flat)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut id = Self::zeros(n, n);
        for i in 0..n {
            id.data[i * n + i] = BigInt::one();
        }
        id
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Entries reduced into `0..m`.
    pub fn reduce_mod(&self, m: u64) -> Self {
        let m = BigInt::from(m);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mod_floor(&m)).collect(),
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for j in 0..n {
                    a.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        Ok(sign * &a[n * n - 1])
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant()
            .map(|d| d.abs().is_one())
            .unwrap_or(false)
    }

    pub(crate) fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.data.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        write!(f, "IntMatrix{rows:?}")
    }
}

/// `A = U * S * V` with `U`, `V` unimodular and `S` in Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// The diagonal of `S`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

/// Scalar arithmetic used by the elimination engine. Every operation may
/// report overflow by returning `None`.
trait SnfScalar: Clone + PartialEq {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn checked_neg(&self) -> Option<Self>;
    /// `self - q * b`
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn div_floor(&self, b: &Self) -> Self;
    fn divisible_by(&self, b: &Self) -> bool;
}

impl SnfScalar for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn checked_neg(&self) -> Option<Self> {
        i64::checked_neg(*self)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        q.checked_mul(*b).and_then(|p| self.checked_sub(p))
    }
    fn div_floor(&self, b: &Self) -> Self {
        Integer::div_floor(self, b)
    }
    fn divisible_by(&self, b: &Self) -> bool {
        self.checked_rem(*b).is_some_and(|r| r == 0)
    }
}

impl SnfScalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn div_floor(&self, b: &Self) -> Self {
        Integer::div_floor(self, b)
    }
    fn divisible_by(&self, b: &Self) -> bool {
        Zero::is_zero(&(self % b))
    }
}

/// Elimination state maintaining `A_orig = U * a * V`.
struct Elimination<T> {
    rows: usize,
    cols: usize,
    a: Vec<T>,
    u: Option<Vec<T>>,
    v: Option<Vec<T>>,
}

fn identity_vec<T: SnfScalar>(n: usize) -> Vec<T> {
    let mut id = vec![T::nil(); n * n];
    for i in 0..n {
        id[i * n + i] = T::unit();
    }
    id
}

impl<T: SnfScalar> Elimination<T> {
    fn new(rows: usize, cols: usize, a: Vec<T>, transforms: bool) -> Self {
        Self {
            rows,
            cols,
            a,
            u: transforms.then(|| identity_vec(rows)),
            v: transforms.then(|| identity_vec(cols)),
        }
    }

    fn at(&self, i: usize, j: usize) -> &T {
        &self.a[i * self.cols + j]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
        if let Some(u) = &mut self.u {
            for r in 0..self.rows {
                u.swap(r * self.rows + i, r * self.rows + j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.a.swap(r * self.cols + i, r * self.cols + j);
        }
        if let Some(v) = &mut self.v {
            for c in 0..self.cols {
                v.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for c in 0..self.cols {
            let v = self.a[dst * self.cols + c].sub_mul(q, &self.a[src * self.cols + c])?;
            self.a[dst * self.cols + c] = v;
        }
        if let Some(u) = &mut self.u {
            let neg = q.checked_neg()?;
            for r in 0..self.rows {
                let v = u[r * self.rows + src].sub_mul(&neg, &u[r * self.rows + dst])?;
                u[r * self.rows + src] = v;
            }
        }
        Some(())
    }

    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for r in 0..self.rows {
            let v = self.a[r * self.cols + dst].sub_mul(q, &self.a[r * self.cols + src])?;
            self.a[r * self.cols + dst] = v;
        }
        if let Some(v) = &mut self.v {
            let neg = q.checked_neg()?;
            for c in 0..self.cols {
                let x = v[src * self.cols + c].sub_mul(&neg, &v[dst * self.cols + c])?;
                v[src * self.cols + c] = x;
            }
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for c in 0..self.cols {
            self.a[i * self.cols + c] = self.a[i * self.cols + c].checked_neg()?;
        }
        if let Some(u) = &mut self.u {
            for r in 0..self.rows {
                u[r * self.rows + i] = u[r * self.rows + i].checked_neg()?;
            }
        }
        Some(())
    }

    /// Smallest nonzero absolute value in the trailing block, first in
    /// row-major order on ties.
    fn find_pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..self.rows {
            for j in k..self.cols {
                let x = self.at(i, j);
                if x.is_nil() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if !x.abs_lt(self.at(bi, bj)) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn run(&mut self) -> Option<()> {
        let steps = self.rows.min(self.cols);
        'diag: for k in 0..steps {
            loop {
                let Some((pi, pj)) = self.find_pivot(k) else {
                    break 'diag;
                };
                self.swap_rows(k, pi);
                self.swap_cols(k, pj);
                let pivot = self.at(k, k).clone();

                for i in k + 1..self.rows {
                    if !self.at(i, k).is_nil() {
                        let q = self.at(i, k).div_floor(&pivot);
                        self.row_sub(i, k, &q)?;
                    }
                }
                for j in k + 1..self.cols {
                    if !self.at(k, j).is_nil() {
                        let q = self.at(k, j).div_floor(&pivot);
                        self.col_sub(j, k, &q)?;
                    }
                }
                let dirty = (k + 1..self.rows).any(|i| !self.at(i, k).is_nil())
                    || (k + 1..self.cols).any(|j| !self.at(k, j).is_nil());
                if dirty {
                    continue;
                }

                let offender = (k + 1..self.rows)
                    .find(|&i| (k + 1..self.cols).any(|j| !self.at(i, j).divisible_by(&pivot)));
                if let Some(i) = offender {
                    // row[k] += row[i]; the next pass reduces it against the pivot
                    self.row_sub(k, i, &T::unit().checked_neg()?)?;
                    continue;
                }

                if pivot.is_neg() {
                    self.negate_row(k)?;
                }
                break;
            }
        }
        Some(())
    }

    fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self.at(i, i).clone())
            .collect()
    }
}

/// Smith normal form with transforms: `A = U * S * V`.
///
/// Pivoting always takes the entry of smallest absolute value (first in
/// row-major order on ties) so the transforms are reproducible.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    if let Some(small) = a.to_i64_vec() {
        let mut e = Elimination::new(a.rows, a.cols, small, true);
        if e.run().is_some() {
            let lift = |r: usize, c: usize, d: Vec<i64>| IntMatrix {
                rows: r,
                cols: c,
                data: d.into_iter().map(BigInt::from).collect(),
            };
            return SnfResult {
                u: lift(a.rows, a.rows, e.u.unwrap()),
                s: lift(a.rows, a.cols, e.a),
                v: lift(a.cols, a.cols, e.v.unwrap()),
            };
        }
    }
    let mut e = Elimination::new(a.rows, a.cols, a.data.clone(), true);
    e.run().expect("big integer elimination cannot overflow");
    SnfResult {
        u: IntMatrix {
            rows: a.rows,
            cols: a.rows,
            data: e.u.unwrap(),
        },
        s: IntMatrix {
            rows: a.rows,
            cols: a.cols,
            data: e.a,
        },
        v: IntMatrix {
            rows: a.cols,
            cols: a.cols,
            data: e.v.unwrap(),
        },
    }
}

/// Diagonal of the Smith normal form of a row-major integer matrix, without
/// transforms. Falls back to big integers on overflow.
pub fn invariant_factors(rows: usize, cols: usize, entries: &[i64]) -> Vec<BigInt> {
    let mut e = Elimination::new(rows, cols, entries.to_vec(), false);
    if e.run().is_some() {
        return e.diagonal().into_iter().map(BigInt::from).collect();
    }
    let mut e = Elimination::new(
        rows,
        cols,
        entries.iter().map(|&x| BigInt::from(x)).collect(),
        false,
    );
    e.run().expect("big integer elimination cannot overflow");
    e.diagonal()
}

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 {
        Err(Error::ZeroModulus)
    } else {
        Ok(())
    }
}

fn order_in_zm(d: &BigInt, m: u64) -> u64 {
    let g = d.gcd(&BigInt::from(m));
    // gcd(0, m) = m, so zero contributes a factor of one
    m / g.to_u64().expect("gcd with m fits in u64")
}

/// Order of the submodule of `(Z/m)^cols` spanned by the rows of `d`.
pub fn row_space_order(d: &IntMatrix, m: u64) -> Result<u64> {
    check_modulus(m)?;
    let diag = match d.to_i64_vec() {
        Some(small) => invariant_factors(d.rows, d.cols, &small),
        None => smith_normal_form(d).diagonal(),
    };
    diagonal_order(&diag, m)
}

/// Row-space order for a row-major machine-integer matrix.
pub fn row_space_order_i64(rows: usize, cols: usize, entries: &[i64], m: u64) -> Result<u64> {
    check_modulus(m)?;
    diagonal_order(&invariant_factors(rows, cols, entries), m)
}

fn diagonal_order(diag: &[BigInt], m: u64) -> Result<u64> {
    diag.iter().try_fold(1u64, |acc, s| {
        acc.checked_mul(order_in_zm(s, m))
            .ok_or(Error::Overflow("row space order"))
    })
}

/// `r_i`: order of the projection of the row space onto coordinate `i`.
pub fn coordinate_orders(d: &IntMatrix, m: u64) -> Result<Vec<u64>> {
    check_modulus(m)?;
    Ok((0..d.cols)
        .map(|j| {
            let g = (0..d.rows).fold(BigInt::zero(), |g, i| g.gcd(d.get(i, j)));
            order_in_zm(&g, m)
        })
        .collect())
}

/// A finitely generated abelian group `Z/t_1 + ... + Z/t_q + Z^f` with
/// `t_i | t_{i+1}` and every `t_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct AbelianStructure {
    pub torsion: Vec<u64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub free_rank: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

impl AbelianStructure {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Normalizes arbitrary cyclic factors into invariant-factor form.
    pub fn from_cyclic_factors(factors: &[u64]) -> Result<Self> {
        cokernel_structure(&[], factors)
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// `None` for infinite groups or on overflow.
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.torsion
            .iter()
            .try_fold(1u64, |acc, &t| acc.checked_mul(t))
    }

    pub fn exponent(&self) -> u64 {
        self.torsion.iter().fold(1, |acc, &t| acc.lcm(&t))
    }

    /// Number of elements of each order, as `(order, count)` pairs sorted by
    /// order. Computed from the torsion coefficients: there are
    /// `prod gcd(d, t_i)` elements whose order divides `d`, and the exact
    /// counts follow by inclusion-exclusion over divisors.
    pub fn order_distribution(&self) -> Result<Vec<(u64, u64)>> {
        if !self.is_finite() {
            return Err(Error::InfiniteGroup(self.free_rank));
        }
        let divisors = divisors(self.exponent());
        let mut exact: Vec<u64> = Vec::with_capacity(divisors.len());
        for (idx, &d) in divisors.iter().enumerate() {
            let dividing = self
                .torsion
                .iter()
                .try_fold(1u64, |acc, &t| acc.checked_mul(d.gcd(&t)))
                .ok_or(Error::Overflow("element order distribution"))?;
            let lower: u64 = divisors[..idx]
                .iter()
                .zip(&exact)
                .filter(|(&e, _)| d % e == 0)
                .map(|(_, &c)| c)
                .sum();
            exact.push(dividing - lower);
        }
        Ok(divisors
            .into_iter()
            .zip(exact)
            .filter(|&(_, c)| c > 0)
            .collect())
    }
}

impl fmt::Display for AbelianStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Structure of `(Z/k_1 + ... + Z/k_s) / <generators>`.
pub fn cokernel_structure(generators: &[Vec<u64>], moduli: &[u64]) -> Result<AbelianStructure> {
    if moduli.contains(&0) {
        return Err(Error::ZeroModulus);
    }
    let s = moduli.len();
    if s == 0 {
        return Ok(AbelianStructure::trivial());
    }
    if let Some(g) = generators.iter().find(|g| g.len() != s) {
        return Err(Error::DimensionMismatch(format!(
            "generator of length {} in a group with {s} cyclic factors",
            g.len()
        )));
    }
    let mut rows: Vec<BigInt> = Vec::with_capacity((generators.len() + s) * s);
    for g in generators {
        rows.extend(g.iter().zip(moduli).map(|(&x, &k)| BigInt::from(x % k)));
    }
    for (i, &k) in moduli.iter().enumerate() {
        rows.extend((0..s).map(|j| {
            if i == j {
                BigInt::from(k)
            } else {
                BigInt::zero()
            }
        }));
    }
    let relations = IntMatrix::new(generators.len() + s, s, rows)?;
    let diag = match relations.to_i64_vec() {
        Some(small) => invariant_factors(relations.rows, s, &small),
        None => smith_normal_form(&relations).diagonal(),
    };
    let mut torsion = Vec::new();
    let mut free_rank = 0;
    for d in diag {
        if d.is_zero() {
            free_rank += 1;
        } else if !d.is_one() {
            torsion.push(d.to_u64().ok_or(Error::Overflow("cokernel torsion"))?);
        }
    }
    Ok(AbelianStructure { torsion, free_rank })
}
