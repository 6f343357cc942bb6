use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::trace::Trace;

pub const BRUTE_FORCE_MAX_LEN: usize = 14;
pub const BRUTE_FORCE_MAX_K: usize = 4;

/// Exact offline minimum miss count by exhaustive search over eviction
/// choices, memoized on (position, cache contents). Test oracle for FiF.
pub fn brute_force_opt(trace: &Trace, k: usize) -> Result<u64> {
    if k == 0 {
        return Err(Error::ZeroCacheSize);
    }
    if trace.len() > BRUTE_FORCE_MAX_LEN || k > BRUTE_FORCE_MAX_K {
        return Err(Error::BruteForceBudget { len: trace.len(), k });
    }
    let mut memo = HashMap::new();
    Ok(search(trace, k, 1, 0, &mut memo))
}

fn search(trace: &Trace, k: usize, t: usize, cache: u32, memo: &mut HashMap<(usize, u32), u64>) -> u64 {
    if t > trace.len() {
        return 0;
    }
    if let Some(&v) = memo.get(&(t, cache)) {
        return v;
    }
    let bit = 1u32 << trace.slot_at(t);
    let best = if cache & bit != 0 {
        search(trace, k, t + 1, cache, memo)
    } else if (cache.count_ones() as usize) < k {
        1 + search(trace, k, t + 1, cache | bit, memo)
    } else {
        let mut best = u64::MAX;
        let mut rest = cache;
        while rest != 0 {
            let victim = rest & rest.wrapping_neg();
            rest &= !victim;
            best = best.min(search(trace, k, t + 1, (cache & !victim) | bit, memo));
        }
        1 + best
    };
    memo.insert((t, cache), best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::build_trace;

    #[test]
    fn examples() {
        let t = |v: &[u64]| build_trace(v.iter().copied()).unwrap();
        assert_eq!(brute_force_opt(&t(&[0, 1, 2, 1]), 2).unwrap(), 3);
        assert_eq!(brute_force_opt(&t(&[0, 1, 0, 1]), 2).unwrap(), 2);
        // evict b at c, then a at the second b: a b c b
        assert_eq!(brute_force_opt(&t(&[0, 1, 2, 0, 1, 2]), 2).unwrap(), 4);
    }

    #[test]
    fn budget_guard() {
        let long = build_trace(0..15u64).unwrap();
        assert!(matches!(brute_force_opt(&long, 2), Err(Error::BruteForceBudget { .. })));
        let short = build_trace(0..3u64).unwrap();
        assert!(brute_force_opt(&short, 5).is_err());
    }
}
