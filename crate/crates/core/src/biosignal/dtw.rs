//! Dynamic-time-warping and Euclidean distances plus nearest-neighbor
//! labeling of gesture envelopes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BiosignalError;

/// Classic DTW: local cost `|a_i - b_j|`, steps down/right/diagonal,
/// endpoints matched to endpoints. Returns the accumulated cost of the
/// best warping path.
///
/// DTW is not a metric: `dtw(x, y) = 0` iff the sequences are equal after
/// removing repeats, and the triangle inequality does not hold in general.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> Result<f64, BiosignalError> {
    if a.is_empty() || b.is_empty() {
        return Err(BiosignalError::EmptySequence);
    }
    for seq in [a, b] {
        if let Some(index) = seq.iter().position(|v| !v.is_finite()) {
            return Err(BiosignalError::NonFiniteSample { index });
        }
    }

    // One rolling row of the accumulated-cost table.
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut curr = vec![0.0f64; m];

    prev[0] = (a[0] - b[0]).abs();
    for j in 1..m {
        prev[j] = prev[j - 1] + (a[0] - b[j]).abs();
    }
    for i in 1..a.len() {
        curr[0] = prev[0] + (a[i] - b[0]).abs();
        for j in 1..m {
            let best = prev[j].min(curr[j - 1]).min(prev[j - 1]);
            curr[j] = best + (a[i] - b[j]).abs();
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m - 1])
}

/// Euclidean distance after resampling both sequences to the longer length
/// by linear interpolation.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64, BiosignalError> {
    if a.is_empty() || b.is_empty() {
        return Err(BiosignalError::EmptySequence);
    }
    for seq in [a, b] {
        if let Some(index) = seq.iter().position(|v| !v.is_finite()) {
            return Err(BiosignalError::NonFiniteSample { index });
        }
    }
    let len = a.len().max(b.len());
    let ra = resample_linear(a, len);
    let rb = resample_linear(b, len);
    Ok(ra
        .iter()
        .zip(&rb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Linear interpolation onto `len` evenly spaced points spanning the whole
/// sequence. A sequence already at the target length is returned unchanged.
fn resample_linear(v: &[f64], len: usize) -> Vec<f64> {
    if v.len() == len {
        return v.to_vec();
    }
    if v.len() == 1 {
        return vec![v[0]; len];
    }
    let scale = (v.len() - 1) as f64 / (len - 1) as f64;
    (0..len)
        .map(|i| {
            let pos = i as f64 * scale;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(v.len() - 1);
            let frac = pos - lo as f64;
            v[lo] + (v[hi] - v[lo]) * frac
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    Dtw,
    Euclidean,
}

impl DistanceMetric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64, BiosignalError> {
        match self {
            DistanceMetric::Dtw => dtw_distance(a, b),
            DistanceMetric::Euclidean => euclidean_distance(a, b),
        }
    }
}

/// A named envelope sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSequence {
    pub label: String,
    pub values: Vec<f64>,
}

impl LabeledSequence {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }

    fn validate(&self) -> Result<(), BiosignalError> {
        if self.values.is_empty() {
            return Err(BiosignalError::EmptyLabeledSequence {
                label: self.label.clone(),
            });
        }
        if let Some(index) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(BiosignalError::NonFiniteLabeledSample {
                label: self.label.clone(),
                index,
            });
        }
        Ok(())
    }
}

/// Symmetric pairwise distances over a set of sequences; zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub metric: DistanceMetric,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.labels.len() + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.labels.len())
    }
}

/// One query's nearest-reference assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub query_index: usize,
    pub label: String,
    pub reference_index: usize,
    pub distance: f64,
}

/// Classification result: per-query labels plus the full distance matrix
/// over references followed by queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub assignments: Vec<Assignment>,
    pub matrix: DistanceMatrix,
}

/// Label each query with its nearest reference under `metric`.
///
/// The returned matrix covers all sequences, references first, then
/// queries, so reference-to-reference and query-to-query distances are
/// available for inspection. Ties go to the lowest reference index.
pub fn classify_nearest(
    queries: &[LabeledSequence],
    references: &[LabeledSequence],
    metric: DistanceMetric,
) -> Result<Classification, BiosignalError> {
    if references.is_empty() {
        return Err(BiosignalError::EmptyReferenceSet);
    }
    let all: Vec<&LabeledSequence> = references.iter().chain(queries.iter()).collect();
    for seq in &all {
        seq.validate()?;
    }

    let n = all.len();
    // Upper-triangle pairs in a fixed order; computed independently and
    // assembled afterwards, so parallel evaluation cannot change results.
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let distances: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            metric
                .distance(&all[i].values, &all[j].values)
                .expect("sequences validated above")
        })
        .collect();

    let mut entries = vec![0.0f64; n * n];
    for (&(i, j), &d) in pairs.iter().zip(&distances) {
        entries[i * n + j] = d;
        entries[j * n + i] = d;
    }
    let matrix = DistanceMatrix {
        labels: all.iter().map(|s| s.label.clone()).collect(),
        metric,
        entries,
    };

    let n_ref = references.len();
    let assignments = (0..queries.len())
        .map(|q| {
            let row = n_ref + q;
            let mut best = 0usize;
            for r in 1..n_ref {
                if matrix.get(row, r) < matrix.get(row, best) {
                    best = r;
                }
            }
            Assignment {
                query_index: q,
                label: references[best].label.clone(),
                reference_index: best,
                distance: matrix.get(row, best),
            }
        })
        .collect();

    Ok(Classification {
        assignments,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dtw_of_identical_sequences_is_zero() {
        let x = [0.1, 0.5, 2.0, 0.5, 0.1];
        assert_eq!(dtw_distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn dtw_is_symmetric() {
        let x = [0.0, 1.0, 3.0, 2.0];
        let y = [0.5, 2.5, 2.0];
        assert_eq!(dtw_distance(&x, &y).unwrap(), dtw_distance(&y, &x).unwrap());
    }

    #[test]
    fn dtw_hand_computed_case() {
        // Table: match 0-0 (0), 1-2 (1), 2-2 (0) gives total 1.
        assert_eq!(dtw_distance(&[0.0, 1.0, 2.0], &[0.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn dtw_absorbs_time_stretch() {
        let x = [0.0, 1.0, 2.0, 1.0, 0.0];
        let stretched = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0, 0.0, 0.0];
        assert_eq!(dtw_distance(&x, &stretched).unwrap(), 0.0);
        // Euclidean resampling does not absorb the repeat structure.
        assert!(euclidean_distance(&x, &stretched).unwrap() > 0.0);
    }

    #[test]
    fn dtw_rejects_empty_and_non_finite() {
        assert!(dtw_distance(&[], &[1.0]).is_err());
        assert!(dtw_distance(&[1.0], &[]).is_err());
        assert!(dtw_distance(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn euclidean_equal_length_is_plain_l2() {
        let d = euclidean_distance(&[0.0, 3.0], &[4.0, 3.0]).unwrap();
        assert_eq!(d, 4.0);
    }

    #[test]
    fn resample_preserves_endpoints_and_line() {
        let r = resample_linear(&[0.0, 1.0], 5);
        assert_eq!(r, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let r = resample_linear(&[2.0], 3);
        assert_eq!(r, vec![2.0, 2.0, 2.0]);
    }

    fn gestures() -> Vec<LabeledSequence> {
        let ramp: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        let fall: Vec<f64> = (0..40).map(|i| 1.0 - i as f64 / 39.0).collect();
        let hump: Vec<f64> = (0..40)
            .map(|i| (std::f64::consts::PI * i as f64 / 39.0).sin())
            .collect();
        vec![
            LabeledSequence::new("ramp", ramp),
            LabeledSequence::new("fall", fall),
            LabeledSequence::new("hump", hump),
        ]
    }

    #[test]
    fn identical_query_gets_zero_distance_label() {
        let refs = gestures();
        let queries = vec![LabeledSequence::new("unknown", refs[1].values.clone())];
        for metric in [DistanceMetric::Dtw, DistanceMetric::Euclidean] {
            let result = classify_nearest(&queries, &refs, metric).unwrap();
            assert_eq!(result.assignments[0].label, "fall");
            assert_eq!(result.assignments[0].distance, 0.0);
            assert_eq!(result.assignments[0].reference_index, 1);
        }
    }

    #[test]
    fn matrix_is_symmetric_with_zero_diagonal() {
        let refs = gestures();
        let queries = vec![
            LabeledSequence::new("q0", refs[0].values.clone()),
            LabeledSequence::new("q1", vec![0.2; 25]),
        ];
        let result = classify_nearest(&queries, &refs, DistanceMetric::Dtw).unwrap();
        let m = &result.matrix;
        assert_eq!(m.size(), 5);
        for i in 0..m.size() {
            assert_eq!(m.get(i, i), 0.0);
            for j in 0..m.size() {
                assert_eq!(m.get(i, j), m.get(j, i));
                assert!(m.get(i, j) >= 0.0);
            }
        }
        assert_eq!(m.labels, vec!["ramp", "fall", "hump", "q0", "q1"]);
    }

    #[test]
    fn scaling_distances_preserves_labels() {
        // Scaling every sequence by the same positive constant scales all
        // DTW distances by that constant and keeps every argmin unchanged.
        let refs = gestures();
        let queries = vec![
            LabeledSequence::new("a", vec![0.1, 0.6, 0.9, 0.4]),
            LabeledSequence::new("b", vec![0.9, 0.5, 0.2, 0.0]),
        ];
        let base = classify_nearest(&queries, &refs, DistanceMetric::Dtw).unwrap();
        let scale = 7.5;
        let scaled_refs: Vec<LabeledSequence> = refs
            .iter()
            .map(|s| LabeledSequence::new(s.label.clone(), s.values.iter().map(|v| v * scale).collect()))
            .collect();
        let scaled_queries: Vec<LabeledSequence> = queries
            .iter()
            .map(|s| LabeledSequence::new(s.label.clone(), s.values.iter().map(|v| v * scale).collect()))
            .collect();
        let scaled = classify_nearest(&scaled_queries, &scaled_refs, DistanceMetric::Dtw).unwrap();
        for (a, b) in base.assignments.iter().zip(&scaled.assignments) {
            assert_eq!(a.label, b.label);
            assert!((b.distance - scale * a.distance).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn tie_breaks_to_lowest_reference_index() {
        let refs = vec![
            LabeledSequence::new("first", vec![1.0, 1.0]),
            LabeledSequence::new("second", vec![1.0, 1.0]),
        ];
        let queries = vec![LabeledSequence::new("q", vec![1.0, 1.0, 1.0])];
        let result = classify_nearest(&queries, &refs, DistanceMetric::Dtw).unwrap();
        assert_eq!(result.assignments[0].reference_index, 0);
        assert_eq!(result.assignments[0].label, "first");
    }

    #[test]
    fn empty_reference_set_is_rejected() {
        let queries = vec![LabeledSequence::new("q", vec![1.0])];
        assert_eq!(
            classify_nearest(&queries, &[], DistanceMetric::Dtw).unwrap_err(),
            BiosignalError::EmptyReferenceSet
        );
    }

    #[test]
    fn empty_sequence_in_input_is_rejected() {
        let refs = vec![LabeledSequence::new("r", vec![1.0])];
        let queries = vec![LabeledSequence::new("q", Vec::new())];
        assert!(matches!(
            classify_nearest(&queries, &refs, DistanceMetric::Dtw),
            Err(BiosignalError::EmptyLabeledSequence { .. })
        ));
    }

    #[test]
    fn no_queries_yields_reference_only_matrix() {
        let refs = gestures();
        let result = classify_nearest(&[], &refs, DistanceMetric::Euclidean).unwrap();
        assert!(result.assignments.is_empty());
        assert_eq!(result.matrix.size(), 3);
    }
}
