//! Polar conditions on trees and volcanoes.
//!
//! A vertex subset P of a directed graph is a polar condition when
//! deg(v, P) = 1 forces v into P. On the truncated full tree T^r(n, i)
//! the quasipolar relaxation exempts the depth-r leaves; the minimum size
//! of a quasipolar set containing the root admits both a closed form and
//! an exact optimizer, computed here by dynamic programming over the
//! (depth-homogeneous) subtrees.

use std::collections::HashMap;

/// b^r(n, i) = 1 + (n + i) * sum_{j < floor(r/2)} (n - 1)^j.
pub fn b_r_formula(n: u64, i: i64, r: u32) -> u64 {
    assert!(n >= 2);
    assert!(i > -(n as i64));
    let mut sum = 0u64;
    let mut pw = 1u64;
    for _ in 0..(r / 2) {
        sum += pw;
        pw *= n - 1;
    }
    1 + ((n as i64 + i) as u64) * sum
}

type Memo = HashMap<(u32, bool, bool), Option<u64>>;

/// Exact minimum size of a quasipolar subset of T^r(n, i) containing the
/// root, by subtree dynamic programming. The root has degree n + i,
/// internal vertices degree n; depth-r vertices are leaves (exempt from
/// the polar implication).
pub fn min_polar_size_tree(n: u64, i: i64, r: u32) -> u64 {
    assert!(n >= 2, "tree degree at least 2");
    assert!(i > -(n as i64));
    assert!(r <= 16, "search budget exceeded");
    if r == 0 {
        return 1;
    }
    let mut memo = Memo::new();
    let children = (n as i64 + i) as u64;
    let mut best: Option<u64> = None;
    for k in 0..=children {
        // the root is in Q, so its own constraint never fires
        let mut total = 1u64;
        let mut feasible = true;
        if k > 0 {
            match dp(n, r - 1, true, true, &mut memo) {
                Some(c) => total += k * c,
                None => feasible = false,
            }
        }
        if k < children {
            match dp(n, r - 1, false, true, &mut memo) {
                Some(c) => total += (children - k) * c,
                None => feasible = false,
            }
        }
        if feasible {
            best = Some(best.map_or(total, |b| b.min(total)));
        }
    }
    best.expect("placing every child in Q is feasible")
}

/// dp(depth_left, in_q, parent_in): minimal |Q ∩ subtree| for a vertex
/// with n - 1 children and `depth_left` levels below it, given its own
/// membership and its parent's.
fn dp(n: u64, depth_left: u32, in_q: bool, parent_in: bool, memo: &mut Memo) -> Option<u64> {
    let key = (depth_left, in_q, parent_in);
    if let Some(v) = memo.get(&key) {
        return *v;
    }
    let result = if depth_left == 0 {
        // leaf: exempt from the implication
        Some(u64::from(in_q))
    } else {
        let kids = n - 1;
        let mut best: Option<u64> = None;
        for k in 0..=kids {
            // quasipolar: deg(v, Q) = parent_in + k = 1 forces v into Q
            if (u64::from(parent_in) + k) == 1 && !in_q {
                continue;
            }
            let mut total = u64::from(in_q);
            let mut feasible = true;
            if k > 0 {
                match dp(n, depth_left - 1, true, in_q, memo) {
                    Some(c) => total += k * c,
                    None => feasible = false,
                }
            }
            if k < kids {
                match dp(n, depth_left - 1, false, in_q, memo) {
                    Some(c) => total += (kids - k) * c,
                    None => feasible = false,
                }
            }
            if feasible {
                best = Some(best.map_or(total, |b| b.min(total)));
            }
        }
        best
    };
    memo.insert(key, result);
    result
}

/// Minimum polar trace |P ∩ V^r(n, c)| over polar conditions on the
/// infinite n-regular volcano with crater length c that contain the root.
/// Crater membership patterns are enumerated; hanging trees are optimized
/// by the tree DP.
pub fn min_polar_size_volcano(n: u64, c: u32, r: u32) -> u64 {
    assert!(n >= 3 && c >= 3);
    assert!(r >= 2, "truncation must reach past the crater");
    assert!(c <= 24 && r <= 12, "search budget exceeded");
    assert!((c / 2) <= r, "crater escapes the truncation");
    let mut memo = Memo::new();
    let cr = c as usize;
    let mut best: Option<u64> = None;
    for mask in 0..(1u32 << cr) {
        if mask & 1 == 0 {
            continue; // root must be in P
        }
        let in_q = |idx: usize| mask >> (idx % cr) & 1 == 1;
        let mut total = 0u64;
        let mut ok = true;
        for v in 0..cr {
            let d = (v as u32).min(c - v as u32);
            let depth_budget = r - d;
            let left = (v + cr - 1) % cr;
            let right = (v + 1) % cr;
            let crater_deg = u64::from(in_q(left)) + u64::from(in_q(right));
            let kids = n - 2;
            let mut vbest: Option<u64> = None;
            for k in 0..=kids {
                // interior crater vertices obey the implication; a crater
                // vertex at distance exactly r is a truncation leaf
                if (crater_deg + k) == 1 && !in_q(v) && depth_budget > 0 {
                    continue;
                }
                let mut t = u64::from(in_q(v));
                let mut feasible = true;
                if depth_budget == 0 {
                    if k > 0 {
                        feasible = false;
                    }
                } else {
                    if k > 0 {
                        match dp(n, depth_budget - 1, true, in_q(v), &mut memo) {
                            Some(cst) => t += k * cst,
                            None => feasible = false,
                        }
                    }
                    if k < kids {
                        match dp(n, depth_budget - 1, false, in_q(v), &mut memo) {
                            Some(cst) => t += (kids - k) * cst,
                            None => feasible = false,
                        }
                    }
                }
                if feasible {
                    vbest = Some(vbest.map_or(t, |b| b.min(t)));
                }
            }
            match vbest {
                Some(t) => total += t,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = Some(best.map_or(total, |b| b.min(total)));
        }
    }
    best.expect("the all-in crater pattern is always feasible")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        // b^0 = 1 (empty sum); b^2(3,0) = 4; b^4(3,-1) = 1 + 2*(1+2) = 7
        assert_eq!(b_r_formula(3, 0, 0), 1);
        assert_eq!(b_r_formula(3, 1, 1), 1);
        assert_eq!(b_r_formula(3, 0, 2), 4);
        assert_eq!(b_r_formula(3, -1, 4), 7);
    }

    #[test]
    fn tree_minimum_matches_formula() {
        for n in [3u64, 4] {
            for i in -2i64..=1 {
                if i <= -(n as i64) {
                    continue;
                }
                for r in 0..=4u32 {
                    assert_eq!(
                        min_polar_size_tree(n, i, r),
                        b_r_formula(n, i, r),
                        "n={n} i={i} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn tree_r0_is_root_only() {
        assert_eq!(min_polar_size_tree(5, 2, 0), 1);
    }

    #[test]
    fn volcano_minimum_meets_lower_bound() {
        for n in [3u64, 4] {
            for c in [3u32, 4, 5] {
                for r in [2u32, 3, 4] {
                    let bound = (n - 1).pow(r / 2) + (n - 1).pow(r / 2 - 1);
                    let min = min_polar_size_volcano(n, c, r);
                    assert!(
                        min >= bound,
                        "n={n} c={c} r={r}: min {min} < bound {bound}"
                    );
                }
            }
        }
        // anchor: the V^4(3, 3) trace is at least 2^2 + 2 = 6
        assert!(min_polar_size_volcano(3, 3, 4) >= 6);
    }
}
