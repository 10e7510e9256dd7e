//! Small enumeration helpers shared by the exhaustive oracles.

/// Iterates over all ways of writing `total` as an ordered sum of `parts`
/// nonnegative integers, in lexicographic order of the part vector.
pub struct Compositions {
    current: Vec<usize>,
    done: bool,
}

impl Compositions {
    pub fn new(total: usize, parts: usize) -> Self {
        if parts == 0 {
            return Self { current: Vec::new(), done: total != 0 };
        }
        let mut current = vec![0; parts];
        current[parts - 1] = total;
        Self { current, done: false }
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let parts = self.current.len();
        // Lexicographic successor: bump the position just before the
        // rightmost nonzero entry and pour the rest of the suffix into the
        // last slot.
        match (1..parts).rev().find(|&p| self.current[p] > 0) {
            Some(p) => {
                let suffix: usize = self.current[p..].iter().sum();
                self.current[p - 1] += 1;
                for slot in &mut self.current[p..] {
                    *slot = 0;
                }
                self.current[parts - 1] = suffix - 1;
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Number of compositions of `total` into `parts` parts, saturating.
pub fn composition_count(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial((total + parts - 1) as u128, (parts - 1) as u128)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Visits every `k`-element subset of `items` in lexicographic order of
/// positions. The callback returns `false` to stop early.
pub fn for_each_subset<T: Copy>(items: &[T], k: usize, mut visit: impl FnMut(&[T]) -> bool) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<T> = Vec::with_capacity(k);
    loop {
        buf.clear();
        buf.extend(idx.iter().map(|&i| items[i]));
        if !visit(&buf) {
            return;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < items.len() - k + pos {
                idx[pos] += 1;
                for later in pos + 1..k {
                    idx[later] = idx[later - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Rearranges `v` into the next lexicographic permutation; returns `false`
/// (leaving `v` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_complete_and_ordered() {
        let all: Vec<_> = Compositions::new(3, 3).collect();
        assert_eq!(all.len() as u128, composition_count(3, 3));
        assert_eq!(all.first().unwrap(), &vec![0, 0, 3]);
        assert_eq!(all.last().unwrap(), &vec![3, 0, 0]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        assert!(all.iter().all(|c| c.iter().sum::<usize>() == 3));
    }

    #[test]
    fn compositions_edge_cases() {
        assert_eq!(Compositions::new(0, 2).collect::<Vec<_>>(), vec![vec![0, 0]]);
        assert_eq!(Compositions::new(4, 1).collect::<Vec<_>>(), vec![vec![4]]);
        assert_eq!(Compositions::new(0, 0).count(), 1);
        assert_eq!(Compositions::new(2, 0).count(), 0);
        for total in 0..6 {
            for parts in 1..5 {
                assert_eq!(
                    Compositions::new(total, parts).count() as u128,
                    composition_count(total, parts)
                );
            }
        }
    }

    #[test]
    fn subsets_and_permutations() {
        let mut seen = Vec::new();
        for_each_subset(&[1, 2, 3, 4], 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![1, 2]);
        assert_eq!(seen[5], vec![3, 4]);

        let mut v = vec![1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 6);
        assert_eq!(v, vec![1, 2, 3]);
        assert_eq!(binomial(10, 3), 120);
    }
}
