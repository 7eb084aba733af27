//! Small internal helpers.

/// Index-ordered map that fans out across threads when the `parallel`
/// feature is enabled. Results are collected in index order either way, so
/// output is identical with and without the feature.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive (both > 0).
pub(crate) fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (llo + t * (lhi - llo)).exp()
        })
        .collect()
}
