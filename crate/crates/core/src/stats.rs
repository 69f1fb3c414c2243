//! Median and median absolute deviation.

/// Median of `values`; the mean of the two middle values for even counts.
/// `None` for an empty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Median of `|x - median(x)|`.
pub fn mad(values: &[f64]) -> Option<f64> {
    let m = median(values)?;
    let dev: Vec<f64> = values.iter().map(|x| (x - m).abs()).collect();
    median(&dev)
}

/// Median and MAD of integer counts.
pub fn median_mad(counts: &[usize]) -> (f64, f64) {
    let v: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    (median(&v).unwrap_or(0.0), mad(&v).unwrap_or(0.0))
}
