//! Explicit almost-commuting unitary tuples.
//!
//! [`construct_tuple`] realizes a class `D` by a tuple in `U(m)` whose group
//! commutators `A_i A_j A_i^-1 A_j^-1` equal `exp(2 pi i d_ij / m) I`. The
//! remaining functions read invariants back off an arbitrary tuple: the class
//! itself, the dimension of the commutant, and the eigenvalue cosets.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::skew::{self, canonical_form, SkewMatrixZm};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const MAX_CONSTRUCT_DIM: usize = 4096;
pub const MAX_COMMUTANT_DIM: usize = 512;

/// Absolute tolerance for grouping eigenvalues on the unit circle.
pub const EIGEN_TOL: f64 = 1e-8;
/// Default tolerance for class extraction and numerical rank.
pub const DEFAULT_TOL: f64 = 1e-6;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn unit(turns: f64) -> C64 {
    C64::from_polar(1.0, TAU * turns)
}

/// `diag(1, w, ..., w^(k-1))` with `w = exp(2 pi i / k)`.
pub fn clock(k: usize) -> CMatrix {
    CMatrix::from_fn(k, k, |i, j| {
        if i == j {
            unit(i as f64 / k as f64)
        } else {
            C64::default()
        }
    })
}

/// Cyclic shift `e_j -> e_(j+1 mod k)`.
pub fn shift(k: usize) -> CMatrix {
    CMatrix::from_fn(k, k, |i, j| {
        if i == (j + 1) % k {
            ONE
        } else {
            C64::default()
        }
    })
}

/// `A B A^-1 B^-1` for unitary `A`, `B`.
pub fn group_commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b * a.adjoint() * b.adjoint()
}

/// Monomial matrix with exact phases: `A e_j = w^phase[j] e_perm[j]` where
/// `w = exp(2 pi i / den)`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Monomial {
    perm: Vec<usize>,
    phase: Vec<u64>,
    den: u64,
}

impl Monomial {
    fn identity(dim: usize, den: u64) -> Self {
        Self {
            perm: (0..dim).collect(),
            phase: vec![0; dim],
            den,
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let perm = rhs.perm.iter().map(|&p| self.perm[p]).collect();
        let phase = rhs
            .perm
            .iter()
            .zip(&rhs.phase)
            .map(|(&p, &x)| (x + self.phase[p]) % self.den)
            .collect();
        Self {
            perm,
            phase,
            den: self.den,
        }
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.perm.len(), self.den);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// The phase `p` if this is `w^p I`.
    fn scalar_phase(&self) -> Option<u64> {
        let p = *self.phase.first()?;
        let diagonal = self.perm.iter().enumerate().all(|(i, &j)| i == j);
        (diagonal && self.phase.iter().all(|&x| x == p)).then_some(p)
    }

    /// Acts by `local` on digit `factor` of a mixed-radix index with radices
    /// `dims`, and trivially on the other digits.
    fn on_factor(dims: &[usize], factor: usize, local: &Monomial) -> Self {
        let total: usize = dims.iter().product();
        let stride: usize = dims[factor + 1..].iter().product();
        let radix = dims[factor];
        let mut perm = Vec::with_capacity(total);
        let mut phase = Vec::with_capacity(total);
        for g in 0..total {
            let digit = (g / stride) % radix;
            perm.push(g - digit * stride + local.perm[digit] * stride);
            phase.push(local.phase[digit]);
        }
        Self {
            perm,
            phase,
            den: local.den,
        }
    }
}

/// An ordered tuple of unitary matrices of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryTuple {
    dim: usize,
    matrices: Vec<CMatrix>,
    unitarity_residual: f64,
}

fn unitarity_bound(dim: usize) -> f64 {
    1e-9 * dim as f64
}

impl UnitaryTuple {
    /// Fails unless every matrix is square of the common dimension with
    /// `||A A* - I||_F <= 1e-9 * dim`.
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        let dim = matrices
            .first()
            .map(|a| a.nrows())
            .ok_or_else(|| Error::InvalidInput("tuple must contain at least one matrix".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput("matrices must be nonempty".into()));
        }
        if let Some(i) = matrices
            .iter()
            .position(|a| a.nrows() != dim || a.ncols() != dim)
        {
            return Err(Error::DimensionMismatch(format!(
                "matrix {} is not {dim}x{dim}",
                i + 1
            )));
        }
        let id = CMatrix::identity(dim, dim);
        let unitarity_residual = matrices
            .iter()
            .map(|a| (a * a.adjoint() - &id).norm())
            .fold(0.0, f64::max);
        if unitarity_residual.is_nan() || unitarity_residual > unitarity_bound(dim) {
            return Err(Error::InvalidInput(format!(
                "matrices are not unitary (residual {unitarity_residual:.3e})"
            )));
        }
        Ok(Self {
            dim,
            matrices,
            unitarity_residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.unitarity_residual
    }

    /// `(U A_1 U*, ..., U A_q U*)`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        Self::new(self.matrices.iter().map(|a| u * a * u.adjoint()).collect())
    }

    /// `max_ij ||[A_i, A_j] - exp(2 pi i d_ij / m) I||_F`.
    pub fn commutator_residual(&self, d: &SkewMatrixZm) -> Result<f64> {
        if d.n() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for a {}x{} class",
                self.len(),
                d.n(),
                d.n()
            )));
        }
        let id = CMatrix::identity(self.dim, self.dim);
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let c = group_commutator(&self.matrices[i], &self.matrices[j]);
                let target = &id * unit(d.entry(i, j) as f64 / d.m() as f64);
                worst = worst.max((c - target).norm());
            }
        }
        Ok(worst)
    }
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    m: usize,
    count: usize,
    matrices: Vec<Vec<f64>>,
}

impl Serialize for UnitaryTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let matrices = self
            .matrices
            .iter()
            .map(|a| {
                let mut flat = Vec::with_capacity(2 * self.dim * self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        flat.push(a[(i, j)].re);
                        flat.push(a[(i, j)].im);
                    }
                }
                flat
            })
            .collect();
        TupleRepr {
            m: self.dim,
            count: self.len(),
            matrices,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryTuple {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TupleRepr::deserialize(de)?;
        if r.count != r.matrices.len() {
            return Err(D::Error::custom(format!(
                "count {} but {} matrices",
                r.count,
                r.matrices.len()
            )));
        }
        let mut matrices = Vec::with_capacity(r.count);
        for (idx, flat) in r.matrices.iter().enumerate() {
            if flat.len() != 2 * r.m * r.m {
                return Err(D::Error::custom(format!(
                    "matrix {} has {} numbers, expected {}",
                    idx + 1,
                    flat.len(),
                    2 * r.m * r.m
                )));
            }
            matrices.push(CMatrix::from_fn(r.m, r.m, |i, j| {
                let k = 2 * (i * r.m + j);
                C64::new(flat[k], flat[k + 1])
            }));
        }
        UnitaryTuple::new(matrices).map_err(D::Error::custom)
    }
}

/// Options for [`construct_tuple`].
#[derive(Clone, Debug, Default)]
pub struct ConstructOptions {
    /// One torus point per irreducible block (`l = m / sigma(D)` of them),
    /// each a list of `n` phases in turns.
    pub scalars: Option<Vec<Vec<f64>>>,
    /// Orders `k_1, ..., k_s` of the leading generators; their matrices are
    /// made to satisfy `A_i^(k_i) = I`.
    pub torsion: Option<Vec<u64>>,
}

/// Builds a `D`-commuting tuple in `U(m)`, `m = d.m()`.
///
/// The class is brought to normal form `Q^T D Q = D_n(c_1, ..., c_t)`. Each
/// pair `(k, k + t)` is realized on a factor of dimension `|c_k|` by a shift
/// and a power `c_k |c_k| / m` of the clock, so the commutator phase is
/// exactly `c_k / m`; the tensor product has dimension `sigma(D)`. The tuple
/// for `D` is then `A_j = prod_i A'_i^(Q^-1)_ij`. For `l = m / sigma(D) > 1`
/// the result is the direct sum of `l` copies twisted by torus scalars.
pub fn construct_tuple(d: &SkewMatrixZm, opts: &ConstructOptions) -> Result<UnitaryTuple> {
    let m = d.m();
    let n = d.n();
    let sigma = skew::sigma(d)?;
    if !m.is_multiple_of(sigma) {
        return Err(Error::Infeasible(format!(
            "sigma(D) = {sigma} does not divide m = {m}, so no D-commuting tuple exists"
        )));
    }
    let torsion = opts.torsion.as_deref().unwrap_or(&[]);
    if torsion.len() > n {
        return Err(Error::DimensionMismatch(format!(
            "{} torsion orders for {n} generators",
            torsion.len()
        )));
    }
    let orders = d.coordinate_orders();
    for (i, (&r, &k)) in orders.iter().zip(torsion).enumerate() {
        if k == 0 || k % r != 0 {
            return Err(Error::Infeasible(format!(
                "r_{}(D) = {r} does not divide k_{} = {k}, so A_{}^k = I is impossible",
                i + 1,
                i + 1,
                i + 1
            )));
        }
    }
    let dim = usize::try_from(m)
        .ok()
        .filter(|&x| x <= MAX_CONSTRUCT_DIM)
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "dimension {m} exceeds the construction limit {MAX_CONSTRUCT_DIM}"
            ))
        })?;
    let l = (m / sigma) as usize;
    let block = sigma as usize;

    let canon = canonical_form(d);
    let t = canon.t();
    let dims: Vec<usize> = canon.orders().iter().map(|&o| o as usize).collect();
    let mut model: Vec<Monomial> = vec![Monomial::identity(block, m); n];
    let mut model_order = vec![1u64; n];
    for (k, (&c, &f)) in canon.invariants.iter().zip(&dims).enumerate() {
        let step = m / f as u64;
        let exponent = c / step;
        let shift = Monomial {
            perm: (0..f).map(|j| (j + 1) % f).collect(),
            phase: vec![0; f],
            den: m,
        };
        let clock_power = Monomial {
            perm: (0..f).collect(),
            phase: (0..f as u64)
                .map(|j| (exponent * j % f as u64) * step)
                .collect(),
            den: m,
        };
        model[k] = Monomial::on_factor(&dims, k, &shift);
        model[k + t] = Monomial::on_factor(&dims, k, &clock_power);
        model_order[k] = f as u64;
        model_order[k + t] = f as u64;
    }

    let pulled: Vec<Monomial> = (0..n)
        .map(|j| {
            (0..n).fold(Monomial::identity(block, m), |acc, i| {
                if model_order[i] == 1 {
                    return acc;
                }
                let e = canon
                    .q_inv
                    .get(i, j)
                    .mod_floor(&BigInt::from(model_order[i]));
                acc.mul(&model[i].pow(e.to_u64().expect("reduced exponent")))
            })
        })
        .collect();

    // rotate torsion generators so that A_i^(r_i) = I
    let mut adjust = vec![0.0f64; n];
    for (i, &r) in orders.iter().enumerate().take(torsion.len()) {
        let p = pulled[i].pow(r).scalar_phase().ok_or_else(|| {
            Error::Internal(format!(
                "A_{}^r is not scalar in an irreducible block",
                i + 1
            ))
        })?;
        adjust[i] = -(p as f64) / (m as f64 * r as f64);
    }

    let scalars = match &opts.scalars {
        Some(points) => {
            if points.len() != l {
                return Err(Error::InvalidInput(format!(
                    "{} torus points given, {l} blocks needed",
                    points.len()
                )));
            }
            if let Some(p) = points.iter().find(|p| p.len() != n) {
                return Err(Error::InvalidInput(format!(
                    "torus point of length {}, expected {n}",
                    p.len()
                )));
            }
            for p in points {
                for (i, (&x, &k)) in p.iter().zip(torsion).enumerate() {
                    let y = x * k as f64;
                    if (y - y.round()).abs() > 1e-9 {
                        return Err(Error::Infeasible(format!(
                            "scalar {x} on torsion generator {} is not a {k}-th root of unity",
                            i + 1
                        )));
                    }
                }
            }
            points.clone()
        }
        None => default_scalars(l, n, torsion.len(), m),
    };

    let matrices = (0..n)
        .map(|j| {
            let mut a = CMatrix::zeros(dim, dim);
            for (b, point) in scalars.iter().enumerate() {
                let offset = b * block;
                let mono = &pulled[j];
                for c in 0..block {
                    let turns = mono.phase[c] as f64 / m as f64 + adjust[j] + point[j];
                    a[(offset + mono.perm[c], offset + c)] = unit(turns);
                }
            }
            a
        })
        .collect();
    UnitaryTuple::new(matrices)
}

/// Block `b` gets phase `b / (l m)` on the first free generator. These
/// phases are never congruent mod `1/m`, so no two blocks are equivalent.
fn default_scalars(l: usize, n: usize, torsion: usize, m: u64) -> Vec<Vec<f64>> {
    (0..l)
        .map(|b| {
            let mut p = vec![0.0; n];
            if torsion < n {
                p[torsion] = b as f64 / (l as f64 * m as f64);
            }
            p
        })
        .collect()
}

/// The class read off a tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassExtraction {
    #[serde(rename = "D")]
    pub d: SkewMatrixZm,
    /// Largest distance of a commutator to `exp(2 pi i d_ij / m) I`.
    pub max_commutator_residual: f64,
}

/// Recovers `D` from the commutator scalars `exp(2 pi i d_ij / m)`.
pub fn extract_class(t: &UnitaryTuple, m: u64, tol: f64) -> Result<ClassExtraction> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let q = t.len();
    let dim = t.dim();
    let id = CMatrix::identity(dim, dim);
    let mut residual: f64 = 0.0;
    let mut phase = |i: usize, j: usize| -> Result<u64> {
        let c = group_commutator(&t.matrices[i], &t.matrices[j]);
        let gamma = c.trace() / dim as f64;
        let off_scalar = (&c - &id * gamma).norm();
        if off_scalar > tol {
            return Err(Error::NotAlmostCommuting {
                i: i + 1,
                j: j + 1,
                residual: off_scalar,
            });
        }
        let x = gamma.arg() / TAU * m as f64;
        let frac = x - x.floor();
        if (frac - 0.5).abs() <= tol {
            return Err(Error::IndeterminateClass { i: i + 1, j: j + 1 });
        }
        let d = (x.round() as i64).rem_euclid(m as i64) as u64;
        let snapped = (c - &id * unit(d as f64 / m as f64)).norm();
        if snapped > tol {
            return Err(Error::NotAlmostCommuting {
                i: i + 1,
                j: j + 1,
                residual: snapped,
            });
        }
        residual = residual.max(snapped);
        Ok(d)
    };
    let mut upper = Vec::with_capacity(q * q.saturating_sub(1) / 2);
    let mut lower = Vec::with_capacity(upper.capacity());
    for i in 0..q {
        for j in i + 1..q {
            upper.push(phase(i, j)?);
            lower.push(phase(j, i)?);
        }
    }
    if let Some(k) = upper
        .iter()
        .zip(&lower)
        .position(|(&a, &b)| (a + b) % m != 0)
    {
        return Err(Error::Internal(format!(
            "commutator phases at upper index {k} are not opposite"
        )));
    }
    Ok(ClassExtraction {
        d: SkewMatrixZm::new(q.max(1), m, upper)?,
        max_commutator_residual: residual,
    })
}

/// Dimension of `{X : X A_i = A_i X for all i}`: the number of singular
/// values below `tol` of the stacked maps `X -> X A_i - A_i X`.
pub fn commutant_dimension(t: &UnitaryTuple, tol: f64) -> Result<usize> {
    let dim = t.dim();
    if dim > MAX_COMMUTANT_DIM {
        return Err(Error::InvalidInput(format!(
            "dimension {dim} exceeds the commutant limit {MAX_COMMUTANT_DIM}"
        )));
    }
    let n2 = dim * dim;
    if t.is_empty() {
        return Ok(n2);
    }
    // column-major vec: X_(r,c) sits at r + c * dim
    let mut stack = CMatrix::zeros(t.len() * n2, n2);
    for (idx, a) in t.matrices.iter().enumerate() {
        for r in 0..dim {
            for c in 0..dim {
                let row = idx * n2 + r + c * dim;
                for k in 0..dim {
                    stack[(row, r + k * dim)] += a[(k, c)];
                    stack[(row, k + c * dim)] -= a[(r, k)];
                }
            }
        }
    }
    // R from a QR factorization has the same singular values and is square
    let values = if stack.nrows() > n2 {
        stack.qr().r()
    } else {
        stack
    }
    .singular_values();
    if let Some(&v) = values.iter().find(|&&v| v > tol * 1e-2 && v < tol * 1e2) {
        return Err(Error::IllConditioned { value: v, tol });
    }
    Ok(values.iter().filter(|&&v| v < tol).count())
}

/// Eigenvalues of a unitary matrix.
///
/// Uses the Cayley transform `K = i (I - V)(I + V)^-1` of a rotated copy
/// `V = e^(i a) A`, which is Hermitian with eigenvalues `tan(theta / 2)`.
/// The rotation `a` keeps `-1` away from the spectrum; a coarse spectrum
/// from the Hermitian part `(A + A*) / 2` guides its choice.
pub fn unitary_eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let dim = a.nrows();
    let half = C64::new(0.5, 0.0);
    let cosines = ((a + a.adjoint()) * half).symmetric_eigenvalues();
    let angles: Vec<f64> = cosines
        .iter()
        .flat_map(|c| {
            let t = c.clamp(-1.0, 1.0).acos();
            [t, -t]
        })
        .collect();
    let candidates = 8 * dim + 1;
    let circle = |x: f64| {
        let y = x.rem_euclid(TAU);
        y.min(TAU - y)
    };
    let (alpha, _) = (0..candidates)
        .map(|j| {
            let alpha = TAU * j as f64 / candidates as f64;
            let pole = std::f64::consts::PI - alpha;
            let gap = angles
                .iter()
                .map(|&t| circle(t - pole))
                .fold(f64::INFINITY, f64::min);
            (alpha, gap)
        })
        .fold(
            (0.0, -1.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    let rot = C64::from_polar(1.0, alpha);
    let v = a * rot;
    let id = CMatrix::identity(dim, dim);
    let inv = (&id + &v)
        .try_inverse()
        .ok_or_else(|| Error::Internal("Cayley transform is singular".into()))?;
    let k = (&id - &v) * inv * C64::new(0.0, 1.0);
    let k = (&k + k.adjoint()) * half;
    Ok(k.symmetric_eigenvalues()
        .iter()
        .map(|&x| C64::new(1.0, x) / C64::new(1.0, -x) / rot)
        .collect())
}

/// `||A^r - g I||_F` where `g` is the best scalar fit.
pub fn power_scalar_residual(a: &CMatrix, r: u64) -> f64 {
    let dim = a.nrows();
    let mut p = CMatrix::identity(dim, dim);
    for _ in 0..r {
        p = &p * a;
    }
    let g = p.trace() / dim as f64;
    (&p - CMatrix::identity(dim, dim) * g).norm()
}

/// The coordinates `c_j`, one per generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCoordinates {
    /// `c_j` in `[0, 1 / r_j)`, in turns.
    pub coords: Vec<f64>,
    /// `r_j(D)`
    pub orders: Vec<u64>,
}

/// Checks that the spectrum of each `A_j` is a full coset `lambda * mu_(r_j)`
/// with every eigenvalue of multiplicity `m / r_j`, and returns the coset
/// representatives. Requires `sigma(D) = m`.
pub fn eigen_invariants(t: &UnitaryTuple, d: &SkewMatrixZm, tol: f64) -> Result<EigenCoordinates> {
    let m = d.m();
    let sigma = skew::sigma(d)?;
    if sigma != m {
        return Err(Error::InvalidInput(format!(
            "eigenvalue cosets need sigma(D) = m, but sigma(D) = {sigma} and m = {m}"
        )));
    }
    if t.dim() as u64 != m || t.len() != d.n() {
        return Err(Error::DimensionMismatch(format!(
            "tuple of {} matrices of size {}, class of size {} over Z/{m}",
            t.len(),
            t.dim(),
            d.n()
        )));
    }
    let orders = d.coordinate_orders();
    let mut coords = Vec::with_capacity(orders.len());
    for (j, (a, &r)) in t.matrices.iter().zip(&orders).enumerate() {
        let eig = unitary_eigenvalues(a)?;
        let width = 1.0 / r as f64;
        let mean: C64 = eig.iter().map(|z| z.powu(r as u32)).sum::<C64>() / eig.len() as f64;
        let mut base = (mean.arg() / TAU / r as f64).rem_euclid(width);
        if width - base <= tol {
            base = 0.0;
        }
        let mut counts = vec![0u64; r as usize];
        for z in &eig {
            let q = ((z.arg() / TAU - base) * r as f64)
                .round()
                .rem_euclid(r as f64) as usize;
            let expected = unit(base + q as f64 * width);
            if (z - expected).norm() > tol {
                return Err(Error::LemmaViolation(format!(
                    "eigenvalue {z:.6} of A_{} is not in the coset exp(2 pi i ({base:.6} + q/{r}))",
                    j + 1
                )));
            }
            counts[q] += 1;
        }
        let each = m / r;
        if let Some(q) = counts.iter().position(|&c| c != each) {
            return Err(Error::LemmaViolation(format!(
                "eigenvalue {q} of the coset of A_{} has multiplicity {}, expected {each}",
                j + 1,
                counts[q]
            )));
        }
        coords.push(base);
    }
    Ok(EigenCoordinates { coords, orders })
}

/// Everything `verify` reports about a tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub m: u64,
    pub dim: usize,
    pub count: usize,
    #[serde(rename = "D")]
    pub d: SkewMatrixZm,
    pub sigma: u64,
    pub max_commutator_residual: f64,
    pub unitarity_residual: f64,
    pub commutant_dimension: Option<usize>,
    /// Present when `sigma(D) = m`.
    pub eigen: Option<EigenCoordinates>,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Extracts the class and, when `sigma(D) = m`, checks irreducibility
/// (scalar commutant) and the eigenvalue cosets.
///
/// Non-almost-commuting input is an error; failed irreducibility or coset
/// checks are reported with `pass = false`.
pub fn verify_tuple(t: &UnitaryTuple, m: u64, tol: f64) -> Result<VerificationReport> {
    let class = extract_class(t, m, tol)?;
    let sigma = skew::sigma(&class.d)?;
    let mut failures = Vec::new();
    let commutant_dimension = match commutant_dimension(t, tol) {
        Ok(k) => Some(k),
        Err(e @ Error::IllConditioned { .. }) => {
            failures.push(e.to_string());
            None
        }
        Err(_) => None,
    };
    let irreducible_case = sigma == m && t.dim() as u64 == m;
    let mut eigen = None;
    if irreducible_case {
        if let Some(k) = commutant_dimension.filter(|&k| k != 1) {
            failures.push(format!(
                "commutant has dimension {k}, expected 1 for sigma(D) = m"
            ));
        }
        match eigen_invariants(t, &class.d, EIGEN_TOL.max(tol.min(1e-6))) {
            Ok(e) => eigen = Some(e),
            Err(e) => failures.push(e.to_string()),
        }
    }
    Ok(VerificationReport {
        m,
        dim: t.dim(),
        count: t.len(),
        sigma,
        d: class.d,
        max_commutator_residual: class.max_commutator_residual,
        unitarity_residual: t.unitarity_residual(),
        commutant_dimension,
        eigen,
        pass: failures.is_empty(),
        failures,
    })
}

/// Helper for building a [`CMatrix`] from real rows in tests and demos.
pub fn real_matrix(rows: &[Vec<f64>]) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    CMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
}
