//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (the default) the per-index maps below fan out
//! over rayon. Results are collected in index order and reduced sequentially
//! by the callers, so every operation returns bit-identical output for any
//! worker count. Building without the feature drops the rayon dependency and
//! runs the same closures sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f` inside a thread pool of the given size. `threads == 0` keeps the
/// current pool (rayon's default, or whatever pool the caller installed).
/// Without the `parallel` feature the argument is ignored.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            f()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("failed to build thread pool")
                .install(f)
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// Maps `f` over `0..n`, returning results in index order.
pub fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`]; kept public so benchmarks can compare
/// the two paths in one build.
pub fn map_indexed_seq<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Applies `f` to each `cols`-wide row chunk of `data` in place.
pub fn for_each_row(data: &mut [f64], cols: usize, f: impl Fn(usize, &mut [f64]) + Sync + Send) {
    debug_assert_eq!(data.len() % cols.max(1), 0);
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(cols)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(cols).enumerate().for_each(|(i, row)| f(i, row));
    }
}

/// Sequential twin of [`for_each_row`].
pub fn for_each_row_seq(data: &mut [f64], cols: usize, f: impl Fn(usize, &mut [f64])) {
    data.chunks_mut(cols).enumerate().for_each(|(i, row)| f(i, row));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_matches_sequential_for_any_pool_size() {
        let f = |i: usize| (i * i) as f64 / 3.0;
        let seq = map_indexed_seq(100, f);
        for threads in [1, 2, 4] {
            let par = with_threads(threads, || map_indexed(100, f));
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn row_fill_matches_sequential() {
        let mut a = vec![0.0; 6 * 4];
        let mut b = vec![0.0; 6 * 4];
        let f = |i: usize, row: &mut [f64]| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (i * 10 + j) as f64;
            }
        };
        for_each_row(&mut a, 4, f);
        for_each_row_seq(&mut b, 4, f);
        assert_eq!(a, b);
    }
}
