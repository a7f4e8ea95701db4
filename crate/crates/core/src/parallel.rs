use rayon::prelude::*;

const CHUNK: usize = 2048;

/// Parallel sum with a fixed chunking, so the floating-point result does not
/// depend on the thread count or on work-stealing order.
pub(crate) fn det_sum<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    if items.len() <= CHUNK {
        return items.iter().map(&f).sum();
    }
    let partials: Vec<f64> = items
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(&f).sum::<f64>())
        .collect();
    partials.iter().sum()
}

/// Index and value of the largest element; ties resolve to the lowest index.
pub(crate) fn argmax<I: IntoIterator<Item = f64>>(values: I) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if !(v > b) => {}
            _ => best = Some((i, v)),
        }
    }
    best
}
