//! Thin data-parallel layer. With the `parallel` feature these helpers run on
//! the rayon global pool; without it they fall back to sequential iterators.
//! Every helper returns results in index order, so output never depends on
//! scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluate `f(i)` for `i in 0..n` and collect in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Elementwise maximum of per-index contributions: each `i in 0..n` produces
/// a partial vector of length `len` via `fill`, and the results are combined
/// with `max`. Max is associative and commutative, so the result is exact and
/// schedule-independent.
pub fn fold_max<F>(n: usize, len: usize, fill: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .fold(
                || vec![0.0; len],
                |mut acc, i| {
                    fill(i, &mut acc);
                    acc
                },
            )
            .reduce(
                || vec![0.0; len],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        if y > *x {
                            *x = y;
                        }
                    }
                    a
                },
            )
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut acc = vec![0.0; len];
        for i in 0..n {
            fill(i, &mut acc);
        }
        acc
    }
}

/// Index of the largest value; ties go to the smallest index. NaN entries are
/// skipped. Returns `None` for an empty or all-NaN input.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}
