//! Two-class K-means on scalar values.
//!
//! Lloyd iterations start from the deterministic min/max initialization, so
//! repeated runs (and any thread count) produce the same partition, and
//! positive rescaling of the inputs leaves the partition unchanged. Lloyd can
//! still park on a locally stable split that is not the global 2-means
//! optimum (e.g. {0, 10, 11, 21} stalls at {0,10 | 11,21} with cost 100 while
//! {0 | 10,11,21} costs 74), so after convergence the exact optimum over all
//! contiguous splits of the sorted values is computed and used whenever it is
//! strictly better. In one dimension the optimal 2-means partition is always
//! such a contiguous split.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmeansConfig {
    pub max_iterations: usize,
    /// Relative centroid movement (against the value spread) below which
    /// Lloyd iteration stops.
    pub tolerance: f64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-9,
        }
    }
}

/// Converged two-cluster split of a scalar set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMeans {
    pub low_centroid: f64,
    pub high_centroid: f64,
    /// Decision boundary: values strictly above it belong to the high
    /// cluster; values on the boundary stay with the low cluster.
    pub threshold: f64,
}

impl TwoMeans {
    pub fn assign_high(&self, value: f64) -> bool {
        value > self.threshold
    }
}

/// Cluster scalars into two classes. Returns `None` when the input is
/// degenerate (fewer than two values, or all values equal), in which case the
/// caller treats everything as one low cluster.
pub fn cluster_two(values: &[f64], cfg: &KmeansConfig) -> Option<TwoMeans> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 2 || hi <= lo {
        return None;
    }
    let spread = hi - lo;

    let mut c_lo = lo;
    let mut c_hi = hi;
    for _ in 0..cfg.max_iterations.max(1) {
        let mid = 0.5 * (c_lo + c_hi);
        let (mut sum_lo, mut n_lo, mut sum_hi, mut n_hi) = (0.0, 0usize, 0.0, 0usize);
        for &v in values {
            if v > mid {
                sum_hi += v;
                n_hi += 1;
            } else {
                sum_lo += v;
                n_lo += 1;
            }
        }
        if n_lo == 0 || n_hi == 0 {
            break;
        }
        let next_lo = sum_lo / n_lo as f64;
        let next_hi = sum_hi / n_hi as f64;
        let movement = (next_lo - c_lo).abs().max((next_hi - c_hi).abs()) / spread;
        c_lo = next_lo;
        c_hi = next_hi;
        if movement < cfg.tolerance {
            break;
        }
    }

    let lloyd = TwoMeans {
        low_centroid: c_lo,
        high_centroid: c_hi,
        threshold: 0.5 * (c_lo + c_hi),
    };
    let lloyd_cost = partition_cost(values, &lloyd);

    let best = optimal_split(values);
    let best_cost = partition_cost(values, &best);
    if best_cost < lloyd_cost * (1.0 - 1e-12) {
        Some(best)
    } else {
        Some(lloyd)
    }
}

/// Within-cluster sum of squares of the partition a `TwoMeans` induces.
pub fn partition_cost(values: &[f64], split: &TwoMeans) -> f64 {
    let (mut sum_lo, mut n_lo, mut sum_hi, mut n_hi) = (0.0, 0usize, 0.0, 0usize);
    for &v in values {
        if split.assign_high(v) {
            sum_hi += v;
            n_hi += 1;
        } else {
            sum_lo += v;
            n_lo += 1;
        }
    }
    let mean_lo = if n_lo > 0 { sum_lo / n_lo as f64 } else { 0.0 };
    let mean_hi = if n_hi > 0 { sum_hi / n_hi as f64 } else { 0.0 };
    values
        .iter()
        .map(|&v| {
            let c = if split.assign_high(v) { mean_hi } else { mean_lo };
            (v - c) * (v - c)
        })
        .sum()
}

/// Exact optimum over contiguous splits of the sorted values, via prefix
/// sums. The chosen split is re-expressed as centroids plus a midpoint
/// threshold; the optimal split always lies strictly between its boundary
/// values, so the midpoint reproduces the same partition.
fn optimal_split(values: &[f64]) -> TwoMeans {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();

    let mut prefix = Vec::with_capacity(n + 1);
    let mut prefix_sq = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    prefix_sq.push(0.0);
    for &v in &sorted {
        prefix.push(prefix.last().unwrap() + v);
        prefix_sq.push(prefix_sq.last().unwrap() + v * v);
    }
    let wcss = |a: usize, b: usize| {
        // Cost of grouping sorted[a..b].
        let cnt = (b - a) as f64;
        let s = prefix[b] - prefix[a];
        let s2 = prefix_sq[b] - prefix_sq[a];
        (s2 - s * s / cnt).max(0.0)
    };

    let mut best_i = 1;
    let mut best_cost = f64::INFINITY;
    for i in 1..n {
        let cost = wcss(0, i) + wcss(i, n);
        if cost < best_cost {
            best_cost = cost;
            best_i = i;
        }
    }
    let c_lo = (prefix[best_i] - prefix[0]) / best_i as f64;
    let c_hi = (prefix[n] - prefix[best_i]) / (n - best_i) as f64;
    TwoMeans {
        low_centroid: c_lo,
        high_centroid: c_hi,
        threshold: 0.5 * (c_lo + c_hi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: minimal WCSS over every contiguous split of the
    /// sorted values, with each cluster cost computed directly.
    fn exhaustive_optimum(values: &[f64]) -> f64 {
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let direct = |vals: &[f64]| {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        };
        (1..sorted.len())
            .map(|i| direct(&sorted[..i]) + direct(&sorted[i..]))
            .fold(f64::INFINITY, f64::min)
    }

    fn bits(values: &[f64]) -> Vec<u8> {
        match cluster_two(values, &KmeansConfig::default()) {
            Some(split) => values
                .iter()
                .map(|&v| u8::from(split.assign_high(v)))
                .collect(),
            None => vec![0; values.len()],
        }
    }

    #[test]
    fn splits_two_obvious_groups() {
        // Oracle: exhaustive threshold search puts {1.0, 1.1} low.
        let values = [1.0, 1.1, 9.0, 9.2];
        let split = cluster_two(&values, &KmeansConfig::default()).unwrap();
        let cost = partition_cost(&values, &split);
        assert!((cost - exhaustive_optimum(&values)).abs() < 1e-12);
        assert_eq!(bits(&values), vec![0, 0, 1, 1]);
    }

    #[test]
    fn all_equal_is_degenerate() {
        assert!(cluster_two(&[3.0; 7], &KmeansConfig::default()).is_none());
        assert_eq!(bits(&[3.0; 7]), vec![0; 7]);
        assert!(cluster_two(&[1.0], &KmeansConfig::default()).is_none());
    }

    #[test]
    fn partition_is_scale_covariant() {
        let values = [2.0, 2.2, 18.0, 18.4];
        assert_eq!(bits(&values), vec![0, 0, 1, 1]);
        let halved: Vec<f64> = values.iter().map(|v| v * 0.5).collect();
        assert_eq!(bits(&halved), bits(&values));
    }

    #[test]
    fn repairs_suboptimal_lloyd_fixed_point() {
        // Min/max-initialized Lloyd stalls at {0,10 | 11,21}, cost 100; the
        // optimum {0 | 10,11,21} costs 74.
        let values = [0.0, 10.0, 11.0, 21.0];
        let split = cluster_two(&values, &KmeansConfig::default()).unwrap();
        let cost = partition_cost(&values, &split);
        assert!((cost - exhaustive_optimum(&values)).abs() < 1e-9);
        assert!((cost - 74.0).abs() < 1e-9);
    }

    #[test]
    fn two_values_split_cleanly() {
        assert_eq!(bits(&[5.0, 1.0]), vec![1, 0]);
    }

    proptest! {
        #[test]
        fn converged_cost_is_globally_optimal(
            values in proptest::collection::vec(0.0f64..100.0, 2..=16)
        ) {
            let split = cluster_two(&values, &KmeansConfig::default());
            let cost = match split {
                Some(s) => partition_cost(&values, &s),
                None => 0.0,
            };
            let optimum = if values.iter().all(|v| *v == values[0]) {
                0.0
            } else {
                exhaustive_optimum(&values)
            };
            prop_assert!((cost - optimum).abs() <= 1e-9 * optimum.max(1.0));
        }

        #[test]
        fn scaling_never_changes_codes(
            values in proptest::collection::vec(0.001f64..50.0, 2..=32),
            scale in prop_oneof![Just(0.5), Just(1.5), Just(2.0)]
        ) {
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            prop_assert_eq!(bits(&values), bits(&scaled));
        }
    }
}
