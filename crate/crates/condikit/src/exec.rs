//! Batch execution: data-parallel on rayon when the `parallel` feature is
//! enabled (the default), sequential otherwise.
//!
//! Both strategies are always compiled so the criterion bench can compare
//! them; the feature flag only selects which one [`batch_map`] dispatches to.

/// Maps `f` over `items` with the strategy selected by the crate features.
pub fn batch_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        batch_map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        batch_map_seq(items, f)
    }
}

/// Sequential strategy.
pub fn batch_map_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Rayon strategy.
#[cfg(feature = "parallel")]
pub fn batch_map_par<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// True if the first `Some` produced by `f` should short-circuit the scan;
/// returns the earliest hit by index to stay deterministic across strategies.
pub fn batch_find_map<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().find_map(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let items: Vec<u64> = (0..100).collect();
        let seq = batch_map_seq(items.clone(), |x| x * x);
        let dispatched = batch_map(items, |x| x * x);
        assert_eq!(seq, dispatched);
    }

    #[test]
    fn find_map_returns_first_hit() {
        let items: Vec<u64> = (0..1000).collect();
        let hit = batch_find_map(items, |x| if x >= 17 { Some(x) } else { None });
        assert_eq!(hit, Some(17));
    }
}
