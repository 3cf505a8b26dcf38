//! Enumeration of the exact evaluation points a scheme reads, bitwise
//! deduplication, and cached black-box function values.
//!
//! Every point is `x⁰` plus an integer combination of direction columns.
//! Points are assembled through one canonical path: each contributing column
//! is reduced to a sign-canonical bit pattern, coefficients on the same
//! pattern are merged (so `x⁰ + s − s` collapses to `x⁰` with no rounding),
//! and the survivors are summed in sorted-key order. Equal canonical term
//! multisets therefore produce bitwise-equal coordinates, which makes
//! bitwise deduplication sound and lets plan sizes match the closed-form
//! evaluation counts exactly.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::directions::{DirectionFamily, DirectionMatrix};
use crate::error::{Error, Result};

/// Bit pattern of a coordinate vector with negative zeros normalized, used as
/// a dedup and cache key.
pub(crate) fn point_key(coords: &[f64]) -> Vec<u64> {
    coords
        .iter()
        .map(|&x| if x == 0.0 { 0.0f64 } else { x }.to_bits())
        .collect()
}

/// Sign-canonical form of a direction column: the column or its exact
/// negation, chosen so the first nonzero entry is positive, plus the sign
/// flip applied. All-zero columns carry no information and return `None`.
fn canon_column(col: &[f64]) -> Option<(Vec<u64>, i32)> {
    let first_nonzero = col.iter().find(|&&x| x != 0.0)?;
    let sigma = if *first_nonzero < 0.0 { -1 } else { 1 };
    let key = col
        .iter()
        .map(|&x| {
            let y = if sigma < 0 { -x } else { x };
            if y == 0.0 {
                0.0f64.to_bits()
            } else {
                y.to_bits()
            }
        })
        .collect();
    Some((key, sigma))
}

/// Canonical symbolic composition of a sample point: sorted
/// `(column bit pattern, integer coefficient)` terms with zero coefficients
/// removed. The empty composition is `x⁰` itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Provenance {
    terms: Vec<(Vec<u64>, i32)>,
}

impl Provenance {
    fn from_terms(terms: &[(&[f64], i32)]) -> Provenance {
        let mut merged: BTreeMap<Vec<u64>, i32> = BTreeMap::new();
        for &(col, coeff) in terms {
            if coeff == 0 {
                continue;
            }
            if let Some((key, sigma)) = canon_column(col) {
                let e = merged.entry(key).or_insert(0);
                *e += sigma * coeff;
            }
        }
        merged.retain(|_, c| *c != 0);
        Provenance {
            terms: merged.into_iter().collect(),
        }
    }

    /// Reconstruct coordinates by the one canonical summation order.
    fn coords(&self, x0: &[f64]) -> Vec<f64> {
        let mut x = x0.to_vec();
        for (key, coeff) in &self.terms {
            let c = *coeff as f64;
            for (xi, bits) in x.iter_mut().zip(key) {
                *xi += c * f64::from_bits(*bits);
            }
        }
        x
    }

    pub fn is_base(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
}

/// Build the coordinates of `x⁰ + Σ coeffᵢ·colᵢ` through the canonical path
/// shared by plan enumeration and the estimators.
pub(crate) fn canonical_point(x0: &[f64], terms: &[(&[f64], i32)]) -> Vec<f64> {
    Provenance::from_terms(terms).coords(x0)
}

/// One evaluation point with its symbolic composition.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub coords: Vec<f64>,
    pub provenance: Provenance,
}

/// Deduplicated, deterministically ordered set of evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    points: Vec<SamplePoint>,
}

impl SamplePlan {
    /// Number of distinct evaluation points.
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[SamplePoint] {
        &self.points
    }

    pub fn iter(&self) -> core::slice::Iter<'_, SamplePoint> {
        self.points.iter()
    }

    /// Largest Euclidean distance of a plan point from `x0`; the sampled
    /// ball radius used when bounding Lipschitz constants.
    pub fn max_distance_from(&self, x0: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| {
                crate::linalg::norm2(
                    &p.coords
                        .iter()
                        .zip(x0)
                        .map(|(a, b)| a - b)
                        .collect::<Vec<f64>>(),
                )
            })
            .fold(0.0, f64::max)
    }
}

struct PlanBuilder<'a> {
    x0: &'a [f64],
    // keyed by coordinate bits; keeps the smallest provenance per point
    seen: BTreeMap<Vec<u64>, Provenance>,
}

impl<'a> PlanBuilder<'a> {
    fn new(x0: &'a [f64]) -> Self {
        PlanBuilder {
            x0,
            seen: BTreeMap::new(),
        }
    }

    fn add(&mut self, terms: &[(&[f64], i32)]) {
        let prov = Provenance::from_terms(terms);
        let coords = prov.coords(self.x0);
        let key = point_key(&coords);
        match self.seen.get_mut(&key) {
            Some(existing) => {
                if prov < *existing {
                    *existing = prov;
                }
            }
            None => {
                self.seen.insert(key, prov);
            }
        }
    }

    fn finish(self) -> SamplePlan {
        let mut points: Vec<SamplePoint> = self
            .seen
            .into_values()
            .map(|provenance| SamplePoint {
                coords: provenance.coords(self.x0),
                provenance,
            })
            .collect();
        points.sort_by(|a, b| a.provenance.cmp(&b.provenance));
        SamplePlan { points }
    }
}

/// Enumerate the points a forward (and, when `centered`, the sign-flipped)
/// Hessian scheme reads: `x⁰`, `x⁰ ⊕ S`, `x⁰ ⊕ T_j`, and `x⁰ + s^j ⊕ T_j`,
/// deduplicated bitwise and ordered lexicographically by provenance.
pub fn enumerate(
    x0: &[f64],
    s: &DirectionMatrix,
    family: &DirectionFamily,
    centered: bool,
) -> SamplePlan {
    let mut b = PlanBuilder::new(x0);
    let s_cols: Vec<Vec<f64>> = (0..s.cols()).map(|j| s.column(j)).collect();
    let signs: &[i32] = if centered { &[1, -1] } else { &[1] };
    for &sg in signs {
        b.add(&[]);
        for (j, s_col) in s_cols.iter().enumerate() {
            b.add(&[(s_col, sg)]);
            let t = family.member(j);
            for l in 0..t.cols() {
                let t_col = t.column(l);
                b.add(&[(&t_col, sg)]);
                b.add(&[(s_col, sg), (&t_col, sg)]);
            }
        }
    }
    b.finish()
}

/// Enumerate the points of the order-P recursion over `S_1` and the shared
/// per-level matrices: all sums taking at most one column from each level.
pub fn enumerate_tensor(x0: &[f64], levels: &[&DirectionMatrix]) -> SamplePlan {
    let mut b = PlanBuilder::new(x0);
    // Combinations are generated depth-first; the builder dedups.
    fn recurse(
        b: &mut PlanBuilder<'_>,
        levels: &[&DirectionMatrix],
        prefix: &mut Vec<(Vec<f64>, i32)>,
    ) {
        {
            let terms: Vec<(&[f64], i32)> =
                prefix.iter().map(|(c, k)| (c.as_slice(), *k)).collect();
            b.add(&terms);
        }
        if let Some((first, rest)) = levels.split_first() {
            recurse(b, rest, prefix);
            for j in 0..first.cols() {
                prefix.push((first.column(j), 1));
                recurse(b, rest, prefix);
                prefix.pop();
            }
        }
    }
    let mut prefix = Vec::new();
    recurse(&mut b, levels, &mut prefix);
    b.finish()
}

/// Memo table of black-box values keyed by coordinate bit patterns.
///
/// Population is an exclusive (`&mut`) phase: [`EvalCache::evaluate`] walks a
/// plan calling the objective at each point not yet present, and
/// [`EvalCache::insert_batch`] accepts values computed elsewhere (each key is
/// written at most once; re-insertion is ignored). A populated cache is
/// immutable through `get`/`value` and safe to share across threads.
#[derive(Debug, Clone, Default)]
pub struct EvalCache {
    map: BTreeMap<Vec<u64>, f64>,
    hits: u64,
    misses: u64,
}

impl EvalCache {
    pub fn new() -> Self {
        EvalCache::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    /// Distinct evaluations issued through this cache.
    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn get(&self, coords: &[f64]) -> Option<f64> {
        self.map.get(&point_key(coords)).copied()
    }

    /// Like [`EvalCache::get`] but failing with the offending point.
    pub fn value(&self, coords: &[f64]) -> Result<f64> {
        self.get(coords).ok_or_else(|| Error::MissingCacheEntry {
            point: coords.to_vec(),
        })
    }

    /// Store a value unless the key is already present. Returns whether the
    /// value was inserted.
    pub fn insert(&mut self, coords: &[f64], value: f64) -> bool {
        use alloc::collections::btree_map::Entry;
        match self.map.entry(point_key(coords)) {
            Entry::Occupied(_) => false,
            Entry::Vacant(e) => {
                e.insert(value);
                true
            }
        }
    }

    /// Bulk-insert externally computed values (e.g. from a parallel batch or
    /// an offline evaluation table). Arrival order is irrelevant; keys are
    /// written at most once.
    pub fn insert_batch<I>(&mut self, entries: I)
    where
        I: IntoIterator<Item = (Vec<f64>, f64)>,
    {
        for (coords, value) in entries {
            self.insert(&coords, value);
        }
    }

    /// Evaluate `f` at every plan point not yet cached. On a cold cache the
    /// miss counter afterwards equals `plan.count()`. A non-finite value
    /// fails with the offending point.
    pub fn evaluate<F>(&mut self, mut f: F, plan: &SamplePlan) -> Result<()>
    where
        F: FnMut(&[f64]) -> f64,
    {
        for p in plan.iter() {
            let key = point_key(&p.coords);
            if self.map.contains_key(&key) {
                self.hits += 1;
                continue;
            }
            let value = f(&p.coords);
            if !value.is_finite() {
                return Err(Error::NonFiniteValue {
                    point: p.coords.clone(),
                });
            }
            self.map.insert(key, value);
            self.misses += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::{build_diag, build_full_gsh_minimal, build_row};
    use alloc::vec;

    #[test]
    fn diag_plan_is_center_and_pm_points() {
        let x0 = [1.0, -2.0];
        let (s, f) = build_diag(2, 0.1, &[0, 1]).unwrap();
        let plan = enumerate(&x0, &s, &f, true);
        assert_eq!(plan.count(), 5);
        let mut coords: Vec<Vec<f64>> = plan.iter().map(|p| p.coords.clone()).collect();
        coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Expectations written with the same arithmetic the plan builder
        // uses, so the comparison is bitwise.
        assert_eq!(
            coords,
            vec![
                vec![1.0 - 0.1, -2.0],
                vec![1.0, -2.0 - 0.1],
                vec![1.0, -2.0],
                vec![1.0, -2.0 + 0.1],
                vec![1.0 + 0.1, -2.0],
            ]
        );
    }

    #[test]
    fn diag_plan_grows_by_two_per_index() {
        // One diagonal entry costs three evaluations; each further entry
        // adds two.
        let x0 = [0.0; 4];
        let mut subset = Vec::new();
        for (count, i) in [(3usize, 1usize), (5, 3), (7, 0), (9, 2)] {
            subset.push(i);
            let (s, f) = build_diag(4, 0.1, &subset).unwrap();
            assert_eq!(enumerate(&x0, &s, &f, true).count(), count);
        }
    }

    #[test]
    fn row_plan_reuses_shared_point() {
        let (s, f) = build_row(2, 0, 0.1).unwrap();
        let plan = enumerate(&[0.0, 0.0], &s, &f, false);
        // x⁰+h e^1 comes from both x⁰ ⊕ S and x⁰ ⊕ T̄ but appears once.
        assert_eq!(plan.count(), 5);
        let shared = [0.1, 0.0];
        let hits = plan
            .iter()
            .filter(|p| p.coords == shared)
            .count();
        assert_eq!(hits, 1);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let (s, f) = build_full_gsh_minimal(4, 0.3).unwrap();
        let a = enumerate(&[0.1, 0.2, 0.3, 0.4], &s, &f, false);
        let b = enumerate(&[0.1, 0.2, 0.3, 0.4], &s, &f, false);
        assert_eq!(a, b);
        // Base point sorts first (empty provenance).
        assert!(a.points()[0].provenance.is_base());
    }

    #[test]
    fn exact_cancellation_recovers_base_point() {
        // x⁰ + s − s must be bitwise x⁰ even when x⁰ + s rounds.
        let s_col = vec![0.1, 0.0];
        let x0 = [2.0, 7.3];
        let p = canonical_point(&x0, &[(&s_col, 1), (&s_col, -1)]);
        assert_eq!(p, x0.to_vec());
    }

    #[test]
    fn negated_column_shares_canonical_key() {
        let col = vec![0.1, -0.2, 0.0];
        let neg: Vec<f64> = col.iter().map(|x| -x).collect();
        let a = Provenance::from_terms(&[(&col, 1)]);
        let b = Provenance::from_terms(&[(&neg, -1)]);
        assert_eq!(a, b);
    }

    #[test]
    fn cache_counts_hits_and_misses() {
        let (s, f) = build_full_gsh_minimal(3, 0.1).unwrap();
        let plan = enumerate(&[0.0; 3], &s, &f, false);
        assert_eq!(plan.count(), 10);

        let mut cache = EvalCache::new();
        let sq = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        cache.evaluate(sq, &plan).unwrap();
        assert_eq!(cache.misses(), 10);
        assert_eq!(cache.hits(), 0);

        // Re-evaluating the same plan issues no new evaluations.
        cache.evaluate(sq, &plan).unwrap();
        assert_eq!(cache.misses(), 10);
        assert_eq!(cache.hits(), 10);
    }

    #[test]
    fn cache_rejects_non_finite_values() {
        let (s, f) = build_diag(1, 0.5, &[0]).unwrap();
        let plan = enumerate(&[0.0], &s, &f, true);
        let mut cache = EvalCache::new();
        let err = cache.evaluate(|x| 1.0 / x[0], &plan).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { .. }));
    }

    #[test]
    fn constant_function_caches_constant() {
        let (s, f) = build_diag(2, 0.2, &[0, 1]).unwrap();
        let plan = enumerate(&[3.0, 4.0], &s, &f, true);
        let mut cache = EvalCache::new();
        cache.evaluate(|_| 42.0, &plan).unwrap();
        for p in plan.iter() {
            assert_eq!(cache.get(&p.coords), Some(42.0));
        }
    }

    #[test]
    fn insert_is_write_once() {
        let mut cache = EvalCache::new();
        assert!(cache.insert(&[1.0, 2.0], 5.0));
        assert!(!cache.insert(&[1.0, 2.0], 9.0));
        assert_eq!(cache.get(&[1.0, 2.0]), Some(5.0));
    }

    #[test]
    fn negative_zero_keys_collapse() {
        let mut cache = EvalCache::new();
        cache.insert(&[0.0], 1.0);
        assert_eq!(cache.get(&[-0.0]), Some(1.0));
    }
}
