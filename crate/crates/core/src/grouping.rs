//! Grouping of coarsened super-rays with similar GFT coefficients, main
//! super-ray selection, and cross-basis prediction residuals.
//!
//! Steps: pairwise coefficient MSE over all `C(m, 2)` pairs; threshold at the
//! upper edge of the lowest histogram bin with the highest pair count;
//! one-level groups `{i} U {j : mse(i, j) <= threshold}`; transitive merge of
//! intersecting one-level groups.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{lower_median, to_sample};
use crate::runtime::{Runtime, Sequential};
use crate::spectral::EigenBasis;
use crate::transform::igft;

/// Number of unordered pairs among `m` items.
pub const fn pair_count(m: u64) -> u64 {
    if m < 2 {
        0
    } else {
        m * (m - 1) / 2
    }
}

/// MSE for every unordered pair `(i, j)`, `i < j`, packed row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWeights {
    m: usize,
    values: Vec<f64>,
}

impl PairWeights {
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(pair_count(m as u64) as usize);
        for i in 0..m {
            for j in i + 1..m {
                values.push(f(i, j));
            }
        }
        PairWeights { m, values }
    }

    pub fn items(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn offset(&self, i: usize) -> usize {
        i * (2 * self.m - i - 1) / 2
    }

    /// Symmetric access; `get(i, i)` is 0.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use core::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => 0.0,
            Ordering::Less => self.values[self.offset(i) + (j - i - 1)],
            Ordering::Greater => self.get(j, i),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len().max(1) as f64
}

/// Mean squared difference between every pair of coefficient vectors.
pub fn pairwise_mse(vectors: &[Vec<f64>]) -> Result<PairWeights> {
    pairwise_mse_with(&Sequential, vectors)
}

/// [`pairwise_mse`], rows evaluated on `rt`.
pub fn pairwise_mse_with<R: Runtime + ?Sized>(rt: &R, vectors: &[Vec<f64>]) -> Result<PairWeights> {
    if let Some(first) = vectors.first() {
        if let Some(bad) = vectors.iter().find(|v| v.len() != first.len()) {
            return Err(Error::DimensionMismatch { expected: first.len(), actual: bad.len() });
        }
    }
    let m = vectors.len();
    let rows = rt.map(m, |i| (i + 1..m).map(|j| mse(&vectors[i], &vectors[j])).collect::<Vec<f64>>());
    Ok(PairWeights { m, values: rows.into_iter().flatten().collect() })
}

/// Pair counts per histogram bin `[k w, (k + 1) w)`, keyed by bin index.
pub fn histogram(pw: &PairWeights, bin_width: f64) -> BTreeMap<u64, usize> {
    let mut bins = BTreeMap::new();
    for &v in pw.values() {
        *bins.entry(crate::math::floor(v / bin_width) as u64).or_insert(0) += 1;
    }
    bins
}

/// Upper edge of the lowest-index bin attaining the maximum pair count.
/// Returns 0 when there are no pairs.
pub fn select_threshold(pw: &PairWeights, bin_width: f64) -> Result<f64> {
    crate::transform::check_step(bin_width)?;
    let mut best: Option<(u64, usize)> = None;
    for (&bin, &count) in &histogram(pw, bin_width) {
        if best.map_or(true, |(_, c)| count > c) {
            best = Some((bin, count));
        }
    }
    Ok(best.map_or(0.0, |(bin, _)| (bin + 1) as f64 * bin_width))
}

/// For each index `i`, `{i} U {j : mse(i, j) <= threshold}`, keeping sets of
/// size at least 2. Sets are sorted ascending and listed by `i`.
pub fn one_level_groups(pw: &PairWeights, threshold: f64) -> Vec<Vec<usize>> {
    let m = pw.items();
    (0..m)
        .filter_map(|i| {
            let set: Vec<usize> = (0..m).filter(|&j| j == i || pw.get(i, j) <= threshold).collect();
            (set.len() >= 2).then_some(set)
        })
        .collect()
}

/// Unions intersecting sets until none intersect. Output sets are sorted and
/// ordered by smallest member; the result does not depend on input order.
pub fn merge_groups(subs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let size = subs.iter().flatten().map(|&i| i + 1).max().unwrap_or(0);
    let mut parent: Vec<usize> = (0..size).collect();
    let mut present = vec![false; size];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for set in subs {
        for &i in set {
            present[i] = true;
        }
        if let Some(&first) = set.first() {
            for &i in &set[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, i));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..size {
        if present[i] {
            let r = find(&mut parent, i);
            by_root.entry(r).or_default().push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
    out.sort_by_key(|s| s[0]);
    out
}

/// Member whose signal is closest (L2) to the element-wise lower median of
/// the group's signals; ties to the smallest index.
pub fn select_main(group: &[usize], signals: &[Vec<f64>]) -> Result<usize> {
    let first = *group.first().ok_or(Error::EmptyRegion)?;
    let n = signals[first].len();
    if let Some(&bad) = group.iter().find(|&&i| signals[i].len() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: signals[bad].len() });
    }
    let mut column = Vec::with_capacity(group.len());
    let median: Vec<f64> = (0..n)
        .map(|k| {
            column.clear();
            column.extend(group.iter().map(|&i| signals[i][k]));
            lower_median(&column).expect("non-empty group")
        })
        .collect();
    let mut best = (f64::INFINITY, first);
    for &i in group {
        let d: f64 = signals[i].iter().zip(&median).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best.0 || (d == best.0 && i < best.1) {
            best = (d, i);
        }
    }
    Ok(best.1)
}

/// Prediction of a member through the main basis, rounded and clamped to
/// `[0, max_sample]`, and the integer residual `signal - predicted`.
pub fn predict_and_residual(
    main_basis: &EigenBasis,
    member_coeffs: &[f64],
    member_signal: &[i64],
    max_sample: i64,
) -> Result<(Vec<i64>, Vec<i64>)> {
    if member_signal.len() != main_basis.dim() {
        return Err(Error::DimensionMismatch { expected: main_basis.dim(), actual: member_signal.len() });
    }
    let predicted = predict(main_basis, member_coeffs, max_sample)?;
    let residual = member_signal.iter().zip(&predicted).map(|(f, p)| f - p).collect();
    Ok((predicted, residual))
}

/// `clamp(round(U c))`.
pub fn predict(basis: &EigenBasis, coeffs: &[f64], max_sample: i64) -> Result<Vec<i64>> {
    Ok(igft(basis, coeffs)?.into_iter().map(|v| to_sample(v, max_sample)).collect())
}

/// A group of coarsened super-rays (indices into the coarsened list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperRayGroup {
    pub members: Vec<usize>,
    pub main: usize,
}

/// Counters of each grouping stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GroupingStats {
    pub pairs: u64,
    pub pairs_under_threshold: u64,
    pub one_level_groups: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSet {
    pub groups: Vec<SuperRayGroup>,
    pub ungrouped: Vec<usize>,
    pub threshold: f64,
    pub stats: GroupingStats,
}

impl GroupSet {
    pub fn empty(m: usize) -> Self {
        GroupSet { groups: Vec::new(), ungrouped: (0..m).collect(), threshold: 0.0, stats: GroupingStats::default() }
    }

    pub fn grouped_count(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }

    /// Group index of every coarsened super-ray, if grouped.
    pub fn membership(&self, m: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; m];
        for (g, group) in self.groups.iter().enumerate() {
            for &i in &group.members {
                out[i] = Some(g);
            }
        }
        out
    }
}

/// Member sets of the final groups (without main selection), plus the
/// threshold and stage counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub sets: Vec<Vec<usize>>,
    pub threshold: f64,
    pub stats: GroupingStats,
}

/// Steps 1 of the grouping scheme on equal-length coefficient vectors.
pub fn form_groups<R: Runtime + ?Sized>(rt: &R, coeffs: &[Vec<f64>], bin_width: f64) -> Result<Grouping> {
    crate::transform::check_step(bin_width)?;
    if coeffs.len() < 2 {
        return Ok(Grouping { sets: Vec::new(), threshold: 0.0, stats: GroupingStats::default() });
    }
    let pw = pairwise_mse_with(rt, coeffs)?;
    let threshold = select_threshold(&pw, bin_width)?;
    let subs = one_level_groups(&pw, threshold);
    let sets = merge_groups(&subs);
    let stats = GroupingStats {
        pairs: pw.len() as u64,
        pairs_under_threshold: pw.values().iter().filter(|&&v| v <= threshold).count() as u64,
        one_level_groups: subs.len(),
    };
    Ok(Grouping { sets, threshold, stats })
}

impl Grouping {
    /// Attaches main super-rays (one per set, same order) and lists the
    /// ungrouped indices out of `m`.
    pub fn with_mains(self, mains: &[usize], m: usize) -> Result<GroupSet> {
        if mains.len() != self.sets.len() {
            return Err(Error::DimensionMismatch { expected: self.sets.len(), actual: mains.len() });
        }
        let mut grouped = vec![false; m];
        let mut groups = Vec::with_capacity(self.sets.len());
        for (members, &main) in self.sets.into_iter().zip(mains) {
            if !members.contains(&main) {
                return Err(Error::invalid("main super-ray is not a group member"));
            }
            for &i in &members {
                if i >= m || grouped[i] {
                    return Err(Error::invalid("groups overlap or index out of range"));
                }
                grouped[i] = true;
            }
            groups.push(SuperRayGroup { members, main });
        }
        let ungrouped = (0..m).filter(|&i| !grouped[i]).collect();
        Ok(GroupSet { groups, ungrouped, threshold: self.threshold, stats: self.stats })
    }
}

/// Full grouping: form groups from coefficients, then pick each group's main
/// super-ray from the signals.
pub fn run_grouping(coeffs: &[Vec<f64>], signals: &[Vec<f64>], bin_width: f64) -> Result<GroupSet> {
    run_grouping_with(&Sequential, coeffs, signals, bin_width)
}

pub fn run_grouping_with<R: Runtime + ?Sized>(
    rt: &R,
    coeffs: &[Vec<f64>],
    signals: &[Vec<f64>],
    bin_width: f64,
) -> Result<GroupSet> {
    if coeffs.len() != signals.len() {
        return Err(Error::DimensionMismatch { expected: coeffs.len(), actual: signals.len() });
    }
    let grouping = form_groups(rt, coeffs, bin_width)?;
    let mains = grouping.sets.iter().map(|set| select_main(set, signals)).collect::<Result<Vec<usize>>>()?;
    grouping.with_mains(&mains, coeffs.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigendecompose, laplacian, LocalGraph};
    use crate::transform::gft;

    #[test]
    fn pair_counts_match_table() {
        assert_eq!(pair_count(1252), 783_126);
        assert_eq!(pair_count(2723), 3_706_003);
        assert_eq!(pair_count(853), 363_378);
        assert_eq!(pair_count(1), 0);
    }

    #[test]
    fn packed_indexing_is_symmetric() {
        let pw = PairWeights::from_fn(5, |i, j| (10 * i + j) as f64);
        assert_eq!(pw.len(), 10);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 0.0 } else { (10 * i.min(j) + i.max(j)) as f64 };
                assert_eq!(pw.get(i, j), expect);
            }
        }
    }

    #[test]
    fn identical_vectors_have_zero_mse() {
        let pw = pairwise_mse(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![3.0, 2.0]]).unwrap();
        assert_eq!(pw.get(0, 1), 0.0);
        assert_eq!(pw.get(0, 2), 2.0);
        assert!(pairwise_mse(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    fn weights(values: &[f64]) -> PairWeights {
        // m chosen so that C(m, 2) >= values.len(); extra pairs get a huge MSE
        let mut m = 2;
        while pair_count(m as u64) < values.len() as u64 {
            m += 1;
        }
        let mut it = values.iter().copied();
        PairWeights::from_fn(m, |_, _| it.next().unwrap_or(1e12))
    }

    #[test]
    fn threshold_examples() {
        let pw = PairWeights { m: 4, values: vec![1.0, 2.0, 3.0, 6.0, 7.0, 12.0] };
        assert_eq!(select_threshold(&pw, 5.0).unwrap(), 5.0);
        let zeros = PairWeights { m: 4, values: vec![0.0; 6] };
        assert_eq!(select_threshold(&zeros, 5.0).unwrap(), 5.0);
        let bimodal = weights(&[11.0, 12.0, 13.0, 14.0, 6.0, 7.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(select_threshold(&bimodal, 5.0).unwrap(), 5.0);
    }

    #[test]
    fn one_level_group_examples() {
        // A-B and B-C under threshold, A-C over
        let pw = PairWeights::from_fn(3, |i, j| if (i, j) == (0, 2) { 50.0 } else { 1.0 });
        assert_eq!(one_level_groups(&pw, 5.0), vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]]);
        assert!(one_level_groups(&pw, 0.5).is_empty());
        assert_eq!(one_level_groups(&pw, 100.0), vec![vec![0, 1, 2]; 3]);
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge_groups(&[vec![0, 1], vec![1, 2], vec![3, 4]]), vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(merge_groups(&[vec![5, 6], vec![0, 2]]), vec![vec![0, 2], vec![5, 6]]);
        let chain: Vec<Vec<usize>> = (1..10).map(|i| vec![i, i + 1]).collect();
        assert_eq!(merge_groups(&chain), vec![(1..=10).collect::<Vec<usize>>()]);
    }

    #[test]
    fn main_selection_examples() {
        let signals = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![10.0, 20.0]];
        assert_eq!(select_main(&[0, 1, 2], &signals).unwrap(), 1);
        let twins = vec![vec![5.0, 5.0], vec![5.0, 5.0]];
        assert_eq!(select_main(&[0, 1], &twins).unwrap(), 0);
    }

    fn path_basis(n: usize) -> EigenBasis {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        eigendecompose(&laplacian(&LocalGraph::from_edges(n, &edges, vec![0.0; n]))).unwrap()
    }

    #[test]
    fn same_basis_residual_is_zero() {
        let b = path_basis(6);
        let f = [10i64, 12, 200, 3, 0, 255];
        let real: Vec<f64> = f.iter().map(|&v| v as f64).collect();
        let (pred, res) = predict_and_residual(&b, &gft(&b, &real).unwrap(), &f, 255).unwrap();
        assert_eq!(pred, f.to_vec());
        assert!(res.iter().all(|&r| r == 0));
    }

    #[test]
    fn constant_signal_predicts_exactly_across_bases() {
        let a = path_basis(8);
        let cycle: Vec<(usize, usize)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        let b = eigendecompose(&laplacian(&LocalGraph::from_edges(8, &cycle, vec![0.0; 8]))).unwrap();
        let f = [77i64; 8];
        let coeffs = gft(&b, &[77.0; 8]).unwrap();
        let (pred, res) = predict_and_residual(&a, &coeffs, &f, 255).unwrap();
        assert_eq!(pred, f.to_vec());
        assert!(res.iter().all(|&r| r == 0));
    }

    #[test]
    fn residual_identity_on_random_signal() {
        let a = path_basis(8);
        let cycle: Vec<(usize, usize)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        let b = eigendecompose(&laplacian(&LocalGraph::from_edges(8, &cycle, vec![0.0; 8]))).unwrap();
        let f = [13i64, 250, 0, 99, 47, 180, 3, 64];
        let real: Vec<f64> = f.iter().map(|&v| v as f64).collect();
        let (pred, res) = predict_and_residual(&a, &gft(&b, &real).unwrap(), &f, 255).unwrap();
        for k in 0..8 {
            assert_eq!(pred[k] + res[k], f[k]);
        }
    }

    #[test]
    fn four_identical_and_one_distant() {
        let coeffs = vec![vec![1.0, 2.0, 3.0]; 4].into_iter().chain([vec![90.0, -40.0, 7.0]]).collect::<Vec<_>>();
        let gs = run_grouping(&coeffs, &coeffs, 5.0).unwrap();
        assert_eq!(gs.groups.len(), 1);
        assert_eq!(gs.groups[0].members, vec![0, 1, 2, 3]);
        assert_eq!(gs.ungrouped, vec![4]);
        assert_eq!(gs.stats.pairs, 10);
    }

    #[test]
    fn single_super_ray_forms_no_group() {
        let gs = run_grouping(&[vec![1.0]], &[vec![1.0]], 5.0).unwrap();
        assert!(gs.groups.is_empty());
        assert_eq!(gs.ungrouped, vec![0]);
    }
}
