//! Small permutation helpers.

use alloc::vec::Vec;

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Sign of the index tuple as a permutation: ±1, or 0 when an index repeats.
pub fn levi_civita_sign(tuple: &[usize]) -> i8 {
    let mut seen = 0u64;
    for &t in tuple {
        if t >= 64 || seen & (1 << t) != 0 {
            return 0;
        }
        seen |= 1 << t;
    }
    let mut inversions = 0usize;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] > tuple[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
