//! Components of `Rep(Gamma, PU(m))` for `Gamma = Z/k_1 + ... + Z/k_s + Z^n`.
//!
//! Components are labelled by alternating matrices `D` over `Z/m` on the
//! `s + n` generators with `sigma(D) | m` and `r_i(D) | k_i` on the torsion
//! coordinates. The summand for `D` is the reduced symmetric product
//! `SP^l(X) / X` with `l = m / sigma(D)` and `X = (Tor(Gamma) x T^n) / R(D)`.
//! Its path components are the translation orbits on `SP^l(H)`, where `H` is
//! the cokernel of `R(D) -> Tor(Gamma)`; they are counted with Burnside's
//! lemma.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{cokernel_structure, AbelianStructure};
use crate::partition::{fan_out, Partition};
use crate::skew::{self, admissibility_failure, SkewMatrixZm};

/// `Z/k_1 + ... + Z/k_s + Z^rank`; the torsion coordinates come first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FgAbelianGroup {
    pub torsion: Vec<u64>,
    pub rank: usize,
}

impl FgAbelianGroup {
    pub fn new(torsion: Vec<u64>, rank: usize) -> Result<Self> {
        if torsion.contains(&0) {
            return Err(Error::InvalidInput(
                "torsion coefficients must be at least 1 (use the rank for Z factors)".into(),
            ));
        }
        // the trivial group is presented as Z/1 so that labels are nonempty
        let torsion = if torsion.is_empty() && rank == 0 {
            vec![1]
        } else {
            torsion
        };
        Ok(Self { torsion, rank })
    }

    pub fn free(rank: usize) -> Result<Self> {
        Self::new(Vec::new(), rank)
    }

    pub fn finite(torsion: Vec<u64>) -> Result<Self> {
        Self::new(torsion, 0)
    }

    /// Number of generators, `s + n`.
    pub fn generators(&self) -> usize {
        self.torsion.len() + self.rank
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Whether `k_1 | k_2 | ... | k_s`.
    pub fn is_divisibility_chain(&self) -> bool {
        self.torsion.windows(2).all(|w| w[1] % w[0] == 0)
    }

    pub fn exponent(&self) -> u64 {
        self.torsion.iter().fold(1, |acc, &k| acc.lcm(&k))
    }
}

fn serialize_count<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

/// One summand of the decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentDescriptor {
    #[serde(rename = "D")]
    pub d: SkewMatrixZm,
    pub sigma: u64,
    /// `m / sigma(D)`
    pub l: u64,
    #[serde(rename = "r")]
    pub coordinate_orders: Vec<u64>,
    #[serde(rename = "H")]
    pub h: AbelianStructure,
    #[serde(rename = "pi0", serialize_with = "serialize_count")]
    pub pi0_count: BigUint,
    #[serde(skip)]
    pub rowspace_generators: Vec<Vec<u64>>,
    #[serde(skip)]
    pub base_free_rank: usize,
}

/// `C(n, k)`, exactly.
pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Number of orbits of `SP^l(H)` under simultaneous translation by `H`.
///
/// By Burnside this is `(1/|H|) sum_g F(g)`, where translation by `g` fixes
/// exactly the multisets that are unions of `<g>`-cosets: with `|g| sigma | m`
/// there are `C((m + |H| sigma) / (|g| sigma) - 1, m / (|g| sigma))` of them,
/// and none otherwise. The sum runs over element orders of `H`.
pub fn reduced_symmetric_count(
    h: &AbelianStructure,
    l: u64,
    sigma: u64,
    m: u64,
) -> Result<BigUint> {
    if m == 0 || sigma == 0 {
        return Err(Error::ZeroModulus);
    }
    if sigma.checked_mul(l) != Some(m) {
        return Err(Error::InvalidInput(format!(
            "l = {l} is not m / sigma = {m} / {sigma}"
        )));
    }
    let order = h.order().ok_or(Error::InfiniteGroup(h.free_rank))?;
    let mut total = BigUint::zero();
    for (g, count) in h.order_distribution()? {
        let step = g
            .checked_mul(sigma)
            .ok_or(Error::Overflow("Burnside term"))?;
        if !m.is_multiple_of(step) {
            continue;
        }
        let top = (m + order * sigma) / step - 1;
        total += binomial(top, m / step) * count;
    }
    let (q, r) = total.div_rem(&BigUint::from(order));
    if !r.is_zero() {
        return Err(Error::Internal(format!(
            "Burnside sum is not divisible by |H| = {order}"
        )));
    }
    Ok(q)
}

/// Image of a row of `D` in `Tor(Gamma)`: `d_i k_i / m mod k_i`.
fn torsion_image(row: &[u64], torsion: &[u64], m: u64) -> Result<Vec<u64>> {
    torsion
        .iter()
        .zip(row)
        .map(|(&k, &d)| {
            let scaled = d as u128 * k as u128;
            if !scaled.is_multiple_of(m as u128) {
                return Err(Error::Internal(format!(
                    "entry {d}/{m} is not a {k}-torsion point"
                )));
            }
            Ok(((scaled / m as u128) % k as u128) as u64)
        })
        .collect()
}

/// Fills in every invariant of the summand labelled by `d`.
pub fn describe_component(
    gamma: &FgAbelianGroup,
    m: u64,
    d: &SkewMatrixZm,
) -> Result<ComponentDescriptor> {
    if d.m() != m {
        return Err(Error::DimensionMismatch(format!(
            "label is over Z/{}, expected Z/{m}",
            d.m()
        )));
    }
    if d.n() != gamma.generators() {
        return Err(Error::DimensionMismatch(format!(
            "label is {}x{}, group has {} generators",
            d.n(),
            d.n(),
            gamma.generators()
        )));
    }
    if let Some(reason) = admissibility_failure(d, &gamma.torsion)? {
        return Err(Error::Inadmissible(reason));
    }
    let sigma = skew::sigma(d)?;
    let l = m / sigma;
    let rowspace_generators = d.row_space_generators();
    let images = rowspace_generators
        .iter()
        .map(|row| torsion_image(row, &gamma.torsion, m))
        .collect::<Result<Vec<_>>>()?;
    let h = cokernel_structure(&images, &gamma.torsion)?;
    let pi0_count = reduced_symmetric_count(&h, l, sigma, m)?;
    Ok(ComponentDescriptor {
        d: d.clone(),
        sigma,
        l,
        coordinate_orders: d.coordinate_orders(),
        h,
        pi0_count,
        rowspace_generators,
        base_free_rank: gamma.rank,
    })
}

/// The full decomposition of `Rep(Gamma, PU(m))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub gamma: FgAbelianGroup,
    pub m: u64,
    pub summands: Vec<ComponentDescriptor>,
    pub summand_count: usize,
    #[serde(serialize_with = "serialize_count")]
    pub total_pi0: BigUint,
}

impl DecompositionReport {
    fn from_summands(gamma: &FgAbelianGroup, m: u64, summands: Vec<ComponentDescriptor>) -> Self {
        let total_pi0 = summands.iter().map(|c| &c.pi0_count).sum();
        Self {
            gamma: gamma.clone(),
            m,
            summand_count: summands.len(),
            summands,
            total_pi0,
        }
    }

    /// `(sigma, number of summands)` pairs in increasing `sigma`.
    pub fn sigma_histogram(&self) -> Vec<(u64, usize)> {
        let mut hist = std::collections::BTreeMap::new();
        for c in &self.summands {
            *hist.entry(c.sigma).or_insert(0) += 1;
        }
        hist.into_iter().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Summands whose labels fall in one enumeration partition, in label order.
pub fn decompose_partition(
    gamma: &FgAbelianGroup,
    m: u64,
    partition: Partition,
    cap: u64,
) -> Result<Vec<ComponentDescriptor>> {
    let mut out = Vec::new();
    for d in skew::enumerate(gamma.generators(), m, partition, cap, |_| true)? {
        if admissibility_failure(&d, &gamma.torsion)?.is_none() {
            out.push(describe_component(gamma, m, &d)?);
        }
    }
    Ok(out)
}

pub fn decompose(gamma: &FgAbelianGroup, m: u64, cap: u64) -> Result<DecompositionReport> {
    decompose_parallel(gamma, m, 1, cap)
}

/// Same result as [`decompose`] for any worker count.
pub fn decompose_parallel(
    gamma: &FgAbelianGroup,
    m: u64,
    workers: usize,
    cap: u64,
) -> Result<DecompositionReport> {
    let parts = fan_out(workers, |p| decompose_partition(gamma, m, p, cap));
    let mut summands = Vec::new();
    for part in parts {
        summands.extend(part?);
    }
    Ok(DecompositionReport::from_summands(gamma, m, summands))
}

/// A projective equivalence class of irreducible projective representations
/// of a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrepClass {
    #[serde(rename = "D")]
    pub d: SkewMatrixZm,
    pub degree: u64,
    /// `|Gamma / R(D)|`, the number of linear equivalence classes in the
    /// projective class.
    pub linear_class_count: u64,
}

/// Irreducible projective classes of a finite `Gamma`, labelled by
/// alternating `D` over `Z/exponent(Gamma)` with `r_i(D) | k_i`. With
/// `degree = Some(m)` only classes of degree `m` are returned.
pub fn irreducible_projective_classes(
    gamma: &FgAbelianGroup,
    degree: Option<u64>,
    cap: u64,
) -> Result<Vec<IrrepClass>> {
    if !gamma.is_finite() {
        return Err(Error::InfiniteGroup(gamma.rank));
    }
    let e = gamma.exponent();
    let mut out = Vec::new();
    for d in skew::enumerate(gamma.torsion.len(), e, Partition::WHOLE, cap, |_| true)? {
        let orders = d.coordinate_orders();
        if orders.iter().zip(&gamma.torsion).any(|(&r, &k)| k % r != 0) {
            continue;
        }
        let sigma = skew::sigma(&d)?;
        if degree.is_some_and(|m| m != sigma) {
            continue;
        }
        let images = d
            .row_space_generators()
            .iter()
            .map(|row| torsion_image(row, &gamma.torsion, e))
            .collect::<Result<Vec<_>>>()?;
        let quotient = cokernel_structure(&images, &gamma.torsion)?;
        out.push(IrrepClass {
            d,
            degree: sigma,
            linear_class_count: quotient
                .order()
                .ok_or(Error::Overflow("linear class count"))?,
        });
    }
    Ok(out)
}

/// Either a finite count or infinitely many classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleCount {
    Finite(u64),
    Infinite,
}

impl Serialize for BundleCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BundleCount::Finite(v) => s.serialize_u64(*v),
            BundleCount::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// Flat `PU(m)`-bundles over a space with fundamental group `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatBundleReport {
    pub n: usize,
    pub m: u64,
    /// `N(n, m)`
    pub flat_classes: u64,
    pub all_bundles_flat: bool,
    /// `|[T^n, BPU(m)]|`
    pub total_bundle_classes: BundleCount,
    pub nonflat_exists: bool,
}

/// Flat classes number `N(n, m)`. Over the torus every bundle is flat iff
/// `n <= 3`, in which case there are `m^(n(n-1)/2)` bundles; for `n >= 4`
/// there are infinitely many.
pub fn flat_bundle_report(n: usize, m: u64, workers: usize, cap: u64) -> Result<FlatBundleReport> {
    flat_bundle_report_with(n, m, |n, m| {
        skew::count_admissible_parallel(n, m, workers, cap)
    })
}

/// As [`flat_bundle_report`] with a caller-supplied `N(n, m)` (e.g. cached).
pub fn flat_bundle_report_with<F>(n: usize, m: u64, count: F) -> Result<FlatBundleReport>
where
    F: FnOnce(usize, u64) -> Result<u64>,
{
    if n == 0 {
        return Err(Error::InvalidInput("rank must be positive".into()));
    }
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    if m == 1 {
        return Ok(FlatBundleReport {
            n,
            m,
            flat_classes: 1,
            all_bundles_flat: true,
            total_bundle_classes: BundleCount::Finite(1),
            nonflat_exists: false,
        });
    }
    let flat_classes = count(n, m)?;
    let low = n <= 3;
    let total_bundle_classes = if low {
        BundleCount::Finite(skew::space_size(n, m).ok_or(Error::Overflow("bundle count"))?)
    } else {
        BundleCount::Infinite
    };
    Ok(FlatBundleReport {
        n,
        m,
        flat_classes,
        all_bundles_flat: low,
        total_bundle_classes,
        nonflat_exists: !low,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skew::DEFAULT_ENUMERATION_CAP as CAP;

    fn h(torsion: &[u64]) -> AbelianStructure {
        AbelianStructure::from_cyclic_factors(torsion).unwrap()
    }

    #[test]
    fn burnside_examples() {
        for l in 1..5 {
            assert_eq!(
                reduced_symmetric_count(&AbelianStructure::trivial(), l, 1, l).unwrap(),
                BigUint::one()
            );
        }
        assert_eq!(
            reduced_symmetric_count(&h(&[2, 2]), 2, 1, 2).unwrap(),
            BigUint::from(4u32)
        );
        assert_eq!(
            reduced_symmetric_count(&h(&[2]), 2, 1, 2).unwrap(),
            BigUint::from(2u32)
        );
        assert!(reduced_symmetric_count(&h(&[2]), 3, 1, 2).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn component_examples() {
        let z2 = FgAbelianGroup::free(2).unwrap();
        let c = describe_component(&z2, 2, &SkewMatrixZm::zero(2, 2).unwrap()).unwrap();
        assert_eq!((c.sigma, c.l, c.pi0_count.clone()), (1, 2, BigUint::one()));
        assert!(c.h.is_trivial());

        let c = describe_component(&z2, 2, &SkewMatrixZm::new(2, 2, vec![1]).unwrap()).unwrap();
        assert_eq!((c.sigma, c.l, c.base_free_rank), (2, 1, 2));
        assert_eq!(c.pi0_count, BigUint::one());

        let k22 = FgAbelianGroup::finite(vec![2, 2]).unwrap();
        let c = describe_component(&k22, 2, &SkewMatrixZm::zero(2, 2).unwrap()).unwrap();
        assert_eq!(c.h.torsion, vec![2, 2]);
        assert_eq!(c.pi0_count, BigUint::from(4u32));
    }

    #[test]
    fn inadmissible_labels_are_named() {
        let g = FgAbelianGroup::new(vec![1], 1).unwrap();
        let err =
            describe_component(&g, 2, &SkewMatrixZm::new(2, 2, vec![1]).unwrap()).unwrap_err();
        assert!(
            matches!(&err, Error::Inadmissible(r) if r.contains("r_1")),
            "{err}"
        );
        let z4 = FgAbelianGroup::free(4).unwrap();
        let err = describe_component(
            &z4,
            4,
            &SkewMatrixZm::new(4, 4, vec![1, 0, 0, 0, 0, 2]).unwrap(),
        )
        .unwrap_err();
        assert!(
            matches!(&err, Error::Inadmissible(r) if r.contains("sigma")),
            "{err}"
        );
        assert!(matches!(
            describe_component(&z4, 4, &SkewMatrixZm::zero(3, 4).unwrap()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn decompositions() {
        let r = decompose(&FgAbelianGroup::free(2).unwrap(), 2, CAP).unwrap();
        assert_eq!(r.summand_count, 2);

        let r = decompose(&FgAbelianGroup::finite(vec![2, 2]).unwrap(), 2, CAP).unwrap();
        assert_eq!(r.summand_count, 2);
        assert_eq!(r.total_pi0, BigUint::from(5u32));

        let r = decompose(&FgAbelianGroup::free(4).unwrap(), 4, CAP).unwrap();
        assert_eq!(r.summand_count, 1184);
        assert_eq!(r.sigma_histogram(), vec![(1, 1), (2, 35), (4, 1148)]);
    }

    #[test]
    fn degree_one_is_a_point() {
        for g in [
            FgAbelianGroup::free(3).unwrap(),
            FgAbelianGroup::new(vec![2, 6], 1).unwrap(),
        ] {
            let r = decompose(&g, 1, CAP).unwrap();
            assert_eq!(r.summand_count, 1);
            assert_eq!(r.total_pi0, BigUint::one());
        }
    }

    #[test]
    fn decomposition_matches_filtered_enumeration() {
        for (torsion, rank, m) in [
            (vec![2, 4], 1, 4),
            (vec![3], 2, 3),
            (vec![2, 2, 2], 0, 2),
            (vec![6], 1, 6),
        ] {
            let g = FgAbelianGroup::new(torsion.clone(), rank).unwrap();
            let r = decompose(&g, m, CAP).unwrap();
            let expected = skew::enumerate(g.generators(), m, Partition::WHOLE, CAP, |d| {
                skew::is_admissible(d, &torsion).unwrap()
            })
            .unwrap()
            .count();
            assert_eq!(r.summand_count, expected);
            for c in &r.summands {
                assert_eq!(c.sigma * c.l, m);
                for (r, k) in c.coordinate_orders.iter().zip(&torsion) {
                    assert_eq!(k % r, 0);
                }
                assert!(c.pi0_count >= BigUint::one());
            }
        }
    }

    #[test]
    fn parallel_decomposition_is_identical() {
        let g = FgAbelianGroup::new(vec![2], 2).unwrap();
        let one = decompose_parallel(&g, 4, 1, CAP).unwrap().to_json();
        for w in [2, 3, 7] {
            assert_eq!(decompose_parallel(&g, 4, w, CAP).unwrap().to_json(), one);
        }
    }

    #[test]
    fn report_json_shape() {
        let r = decompose(&FgAbelianGroup::finite(vec![2, 2]).unwrap(), 2, CAP).unwrap();
        let json = r.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let in_order = |keys: &[&str]| {
            let pos: Vec<usize> = keys
                .iter()
                .map(|k| json.find(&format!("\"{k}\"")).unwrap())
                .collect();
            pos.windows(2).all(|w| w[0] < w[1])
        };
        assert!(in_order(&[
            "gamma",
            "m",
            "summands",
            "summand_count",
            "total_pi0"
        ]));
        assert!(in_order(&["D", "sigma", "l", "r", "H", "pi0"]));
        let s0 = &v["summands"][0];
        assert_eq!(s0.as_object().unwrap().len(), 6);
        assert_eq!(s0["H"]["torsion"], serde_json::json!([2, 2]));
        assert_eq!(
            v["gamma"],
            serde_json::json!({"torsion": [2, 2], "rank": 0})
        );
    }

    #[test]
    fn irreducible_classes() {
        let cyclic =
            irreducible_projective_classes(&FgAbelianGroup::finite(vec![7]).unwrap(), None, CAP)
                .unwrap();
        assert_eq!(cyclic.len(), 1);
        assert_eq!((cyclic[0].degree, cyclic[0].linear_class_count), (1, 7));

        let klein = FgAbelianGroup::finite(vec![2, 2]).unwrap();
        let deg2 = irreducible_projective_classes(&klein, Some(2), CAP).unwrap();
        assert_eq!(deg2.len(), 1);
        assert_eq!(deg2[0].linear_class_count, 1);

        let z4sq =
            irreducible_projective_classes(&FgAbelianGroup::finite(vec![4, 4]).unwrap(), None, CAP)
                .unwrap();
        let degrees: Vec<u64> = z4sq.iter().map(|c| c.degree).collect();
        assert_eq!(degrees, vec![1, 4, 2, 4]);

        assert!(matches!(
            irreducible_projective_classes(&FgAbelianGroup::free(2).unwrap(), None, CAP),
            Err(Error::InfiniteGroup(2))
        ));
    }

    #[test]
    fn irreducible_classes_with_mixed_orders() {
        // Z/2 + Z/4: only d12 in {0, 2} mod 4 has r_1 | 2
        let classes =
            irreducible_projective_classes(&FgAbelianGroup::finite(vec![2, 4]).unwrap(), None, CAP)
                .unwrap();
        let summary: Vec<(u64, u64)> = classes
            .iter()
            .map(|c| (c.degree, c.linear_class_count))
            .collect();
        assert_eq!(summary, vec![(1, 8), (2, 2)]);
        // degree squared times linear classes recovers |Gamma|
        for c in &classes {
            assert_eq!(c.degree * c.degree * c.linear_class_count, 8);
        }
    }

    #[test]
    fn flat_bundles() {
        let r = flat_bundle_report(2, 5, 1, CAP).unwrap();
        assert_eq!(
            (r.flat_classes, r.all_bundles_flat, r.total_bundle_classes),
            (5, true, BundleCount::Finite(5))
        );
        let r = flat_bundle_report(4, 2, 1, CAP).unwrap();
        assert!(!r.all_bundles_flat && r.nonflat_exists);
        assert_eq!(r.total_bundle_classes, BundleCount::Infinite);
        assert_eq!(r.flat_classes, skew::count_admissible(4, 2, CAP).unwrap());
        for m in 1..6 {
            assert_eq!(flat_bundle_report(1, m, 1, CAP).unwrap().flat_classes, 1);
        }
        let trivial = flat_bundle_report(5, 1, 1, CAP).unwrap();
        assert!(trivial.all_bundles_flat && !trivial.nonflat_exists);
        for n in 1..=3 {
            for m in 2..=8u64 {
                let r = flat_bundle_report(n, m, 2, CAP).unwrap();
                let expected = m.pow((n * (n - 1) / 2) as u32);
                assert_eq!(r.flat_classes, expected);
                assert_eq!(r.total_bundle_classes, BundleCount::Finite(expected));
            }
        }
        let json = serde_json::to_string(&flat_bundle_report(4, 2, 1, CAP).unwrap()).unwrap();
        assert!(
            json.contains(r#""total_bundle_classes":"infinite""#),
            "{json}"
        );
    }
}
