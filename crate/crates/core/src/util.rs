/// Calls `f` on every tuple in `[0, len)^rank` in lexicographic order.
/// Stops early when `f` returns `false`. The empty tuple is visited once.
pub(crate) fn for_each_tuple(rank: usize, len: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if rank > 0 && len == 0 {
        return;
    }
    let mut idx = vec![0usize; rank];
    loop {
        if !f(&idx) {
            return;
        }
        let mut pos = rank;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < len {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Mixed-radix variant: position `i` ranges over `[0, radix[i])`.
pub(crate) fn for_each_mixed(radix: &[usize], mut f: impl FnMut(&[usize]) -> bool) {
    if radix.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; radix.len()];
    loop {
        if !f(&idx) {
            return;
        }
        let mut pos = radix.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < radix[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}
