//! Bounded-quotient rational sets and the interval structure of the
//! numerator sets Z_M(t).
//!
//! Membership convention: a fraction u/v belongs to Q_M(t) when v < t and
//! u/v admits a continued-fraction representation with every entry <= M.
//! Each such value has exactly one representation ending in 1 (append a 1 to
//! a word w' and you get the value of the canonical word whose last quotient
//! is bumped by one), so the enumeration walks words w' with entries in
//! [1, M] and takes v = K(w' ++ 1). This is the reading that makes the
//! M = 1 set the Fibonacci ratios rather than the empty set. The barred
//! variant keeps the members with K(w' ++ 1, 1) >= t.
//!
//! Z_M(t) for a modulus q uses the prefix rule: with nu the largest index
//! such that q_nu < t, the numerator a is kept iff c_1..c_nu are all <= M.

use crate::cf::{CfWord, Fraction};
use crate::error::{Error, Result};
use crate::smallcf::gcd_u64;
use num_bigint::BigInt;
use serde::Serialize;

/// Enumerated members of Q_M(t) or its barred subset.
#[derive(Debug, Clone)]
pub struct BoundedFractionSet {
    pub m: u64,
    pub t: u64,
    /// (canonical word, value), strictly increasing by value.
    pub members: Vec<(CfWord, Fraction)>,
}

/// Disjoint interval cover of Z_M(t) inside [1, q-1].
#[derive(Debug, Clone, Serialize)]
pub struct IntervalDecomposition {
    pub q: u64,
    /// Closed integer intervals [lo, hi], disjoint, increasing.
    pub intervals: Vec<(u64, u64)>,
    /// Numerators of Z_M(t) not covered by any interval.
    pub leftover: u64,
    /// Number of intervals.
    pub t_intervals: usize,
    /// Minimum interval length.
    pub min_len: u64,
    /// Block-size floor the decomposition was built against.
    pub block: u64,
}

const MAX_ENUM_NODES: u64 = 200_000_000;

fn check_enum_params(m: u64, t: u64) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidParameter("M must be >= 1".into()));
    }
    if t < 2 {
        return Err(Error::InvalidParameter("t must be >= 2".into()));
    }
    if t > 1 << 30 {
        return Err(Error::BudgetExceeded(format!("t = {t} beyond enumeration budget")));
    }
    Ok(())
}

/// Walks all words w' with entries in [1, M] and K(w' ++ 1) < t, children in
/// increasing quotient order. `f` receives (word, p_prev, p, q_prev, q) for
/// the continuants of w'.
fn walk_tail_words<F: FnMut(&[u64], u64, u64, u64, u64)>(m: u64, t: u64, f: &mut F) -> Result<()> {
    let mut nodes: u64 = 0;
    let mut word: Vec<u64> = Vec::new();
    // iterative DFS: stack of (c, p_prev, p, q_prev, q) with word as the path
    fn rec<F: FnMut(&[u64], u64, u64, u64, u64)>(
        word: &mut Vec<u64>,
        p_prev: u64,
        p: u64,
        q_prev: u64,
        q: u64,
        m: u64,
        t: u64,
        nodes: &mut u64,
        f: &mut F,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > MAX_ENUM_NODES {
            return Err(Error::BudgetExceeded("bounded-fraction enumeration too large".into()));
        }
        f(word, p_prev, p, q_prev, q);
        for c in 1..=m {
            let (np, nq) = (c * p + p_prev, c * q + q_prev);
            // v of the child member is nq + q; prune once it crosses t
            if nq + q >= t {
                continue;
            }
            word.push(c);
            rec(word, p, np, q, nq, m, t, nodes, f)?;
            word.pop();
        }
        Ok(())
    }
    for c in 1..=m {
        if c + 1 >= t {
            continue; // v = K((c,1)) = c + 1
        }
        word.push(c);
        rec(&mut word, 0, 1, 1, c, m, t, &mut nodes, f)?;
        word.pop();
    }
    Ok(())
}

fn canonical_member(word: &[u64], p_prev: u64, p: u64, q_prev: u64, q: u64) -> (CfWord, Fraction) {
    let mut canon: Vec<BigInt> = word.iter().map(|&c| BigInt::from(c)).collect();
    *canon.last_mut().unwrap() += 1;
    let w = CfWord::new(canon).expect("nonzero quotients");
    let f = Fraction::new(BigInt::from(p + p_prev), BigInt::from(q + q_prev)).expect("consecutive continuants are coprime");
    (w, f)
}

/// All fractions with denominator < t admitting an all-<=M representation.
pub fn enumerate_qm(m: u64, t: u64) -> Result<BoundedFractionSet> {
    check_enum_params(m, t)?;
    let mut members = Vec::new();
    walk_tail_words(m, t, &mut |word, p_prev, p, q_prev, q| {
        members.push(canonical_member(word, p_prev, p, q_prev, q));
    })?;
    members.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(BoundedFractionSet { m, t, members })
}

/// The subset of Q_M(t) whose ending-in-1 word w satisfies K(w, 1) >= t.
pub fn enumerate_qm_bar(m: u64, t: u64) -> Result<BoundedFractionSet> {
    check_enum_params(m, t)?;
    let mut members = Vec::new();
    walk_tail_words(m, t, &mut |word, p_prev, p, q_prev, q| {
        let v = q + q_prev;
        if v + q >= t {
            members.push(canonical_member(word, p_prev, p, q_prev, q));
        }
    })?;
    members.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(BoundedFractionSet { m, t, members })
}

/// |Q_M(t)| without materializing members.
pub fn count_qm(m: u64, t: u64) -> Result<u64> {
    check_enum_params(m, t)?;
    let mut n = 0u64;
    walk_tail_words(m, t, &mut |_, _, _, _, _| n += 1)?;
    Ok(n)
}

/// |Qbar_M(t)| without materializing members.
pub fn count_qm_bar(m: u64, t: u64) -> Result<u64> {
    check_enum_params(m, t)?;
    let mut n = 0u64;
    walk_tail_words(m, t, &mut |_, _, _, q_prev, q| {
        if 2 * q + q_prev >= t {
            n += 1;
        }
    })?;
    Ok(n)
}

/// Membership mask of Z_M(t) over [0, q): a is kept iff gcd(a, q) = 1 and
/// all partial quotients before the denominator continuant reaches t are
/// <= M. Integer threshold.
pub fn build_zm_mask(q: u64, m: u64, t: u64) -> Result<Vec<bool>> {
    if q < 2 {
        return Err(Error::InvalidParameter("q must be >= 2".into()));
    }
    if t < 1 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    if t * t > q {
        return Err(Error::ThresholdTooLarge { t, q });
    }
    let mut mask = vec![false; q as usize];
    for a in 1..q {
        if gcd_u64(a, q) != 1 {
            continue;
        }
        mask[a as usize] = prefix_bounded(a, q, m, |qn| qn < t);
    }
    Ok(mask)
}

/// Sorted members of Z_M(t).
pub fn build_zm(q: u64, m: u64, t: u64) -> Result<Vec<u64>> {
    let mask = build_zm_mask(q, m, t)?;
    Ok((1..q).filter(|&a| mask[a as usize]).collect())
}

/// Z-membership for the inverse-pair search: the threshold is the exact real
/// sqrt(q/4M), tested as `4M q_nu^2 < q` so no rounding loses the guarantee.
pub fn build_zm_exact_threshold(q: u64, m: u64) -> Result<Vec<u64>> {
    if q < 2 {
        return Err(Error::InvalidParameter("q must be >= 2".into()));
    }
    let mut out = Vec::new();
    for a in 1..q {
        if gcd_u64(a, q) != 1 {
            continue;
        }
        if prefix_bounded(a, q, m, |qn| 4 * m as u128 * (qn as u128) * (qn as u128) < q as u128) {
            out.push(a);
        }
    }
    Ok(out)
}

/// Runs Euclid on a/q, keeping quotients while the denominator continuant
/// satisfies `below(q_nu)`; true iff all kept quotients are <= M.
fn prefix_bounded<F: Fn(u64) -> bool>(a: u64, q: u64, m: u64, below: F) -> bool {
    let (mut x, mut y) = (q, a);
    let (mut qm1, mut q0) = (0u64, 1u64);
    while y != 0 {
        let c = x / y;
        let qn = c * q0 + qm1;
        if !below(qn) {
            return true;
        }
        if c > m {
            return false;
        }
        let r = x - c * y;
        x = y;
        y = r;
        qm1 = q0;
        q0 = qn;
    }
    true
}

/// Builds the interval decomposition of Z_M(t): the maximal integer runs of
/// Z_M(t) are split into exactly |Qbar_M(t)| consecutive blocks, every block
/// at least `floor(c_block * q / t^2)` long. Infeasibility (a run shorter
/// than the floor, fewer runs than needed splits can support, or more runs
/// than blocks) is reported as a `DecompositionViolation` with diagnostics.
pub fn decompose_zm(q: u64, m: u64, t: u64, c_block: f64) -> Result<IntervalDecomposition> {
    if !(c_block > 0.0) {
        return Err(Error::InvalidParameter("block constant must be positive".into()));
    }
    let mask = build_zm_mask(q, m, t)?;
    let target = count_qm_bar(m, t)? as usize;
    let block = if c_block == 1.0 {
        q / (t * t)
    } else {
        (c_block * q as f64 / (t * t) as f64).floor() as u64
    };
    let block = block.max(1);

    // maximal runs of the mask
    let mut runs: Vec<(u64, u64)> = Vec::new();
    let mut a = 1u64;
    while a < q {
        if mask[a as usize] {
            let lo = a;
            while a + 1 < q && mask[(a + 1) as usize] {
                a += 1;
            }
            runs.push((lo, a));
        }
        a += 1;
    }
    let zsize: u64 = runs.iter().map(|(lo, hi)| hi - lo + 1).sum();

    if target == 0 {
        if runs.is_empty() {
            return Ok(IntervalDecomposition { q, intervals: vec![], leftover: 0, t_intervals: 0, min_len: 0, block });
        }
        return Err(Error::DecompositionViolation(format!(
            "expected no intervals (|Qbar| = 0) but Z_{m}({t}) mod {q} has {} members",
            zsize
        )));
    }
    if runs.len() > target {
        return Err(Error::DecompositionViolation(format!(
            "Z_{m}({t}) mod {q} splits into {} maximal runs but |Qbar| = {target}",
            runs.len()
        )));
    }
    if let Some((lo, hi)) = runs.iter().find(|(lo, hi)| hi - lo + 1 < block) {
        return Err(Error::DecompositionViolation(format!(
            "run [{lo}, {hi}] of Z_{m}({t}) mod {q} is shorter than the block floor {block}"
        )));
    }
    let caps: Vec<u64> = runs.iter().map(|(lo, hi)| (hi - lo + 1) / block).collect();
    let total_cap: u64 = caps.iter().sum();
    if total_cap < target as u64 {
        return Err(Error::DecompositionViolation(format!(
            "Z_{m}({t}) mod {q} supports at most {total_cap} blocks of length >= {block}, need {target}"
        )));
    }

    // apportion `target` blocks: start with one per run, then repeatedly
    // grant a split to the run with the largest per-block share
    let mut k: Vec<u64> = vec![1; runs.len()];
    let mut remaining = target as u64 - runs.len() as u64;
    while remaining > 0 {
        let mut best = usize::MAX;
        let mut best_share = 0.0f64;
        for (i, (lo, hi)) in runs.iter().enumerate() {
            if k[i] >= caps[i] {
                continue;
            }
            let share = (hi - lo + 1) as f64 / (k[i] + 1) as f64;
            if best == usize::MAX || share > best_share {
                best = i;
                best_share = share;
            }
        }
        debug_assert!(best != usize::MAX, "capacity checked above");
        k[best] += 1;
        remaining -= 1;
    }

    let mut intervals = Vec::with_capacity(target);
    for (i, &(lo, hi)) in runs.iter().enumerate() {
        let len = hi - lo + 1;
        let parts = k[i];
        let base = len / parts;
        let rem = len % parts;
        let mut cur = lo;
        for j in 0..parts {
            let this = base + if j < rem { 1 } else { 0 };
            intervals.push((cur, cur + this - 1));
            cur += this;
        }
        debug_assert_eq!(cur, hi + 1);
    }
    let min_len = intervals.iter().map(|(lo, hi)| hi - lo + 1).min().unwrap_or(0);
    debug_assert!(min_len >= block);
    Ok(IntervalDecomposition {
        q,
        intervals,
        leftover: 0,
        t_intervals: target,
        min_len,
        block,
    })
}

/// Dyadic-count estimate of the dimension exponent: least-squares slope of
/// log2 |Q_M(t)| against log2 t over t = 2^k, divided by 2. Returns the
/// estimate and the (log2 t, log2 count) points.
pub fn estimate_wm(m: u64, t_max: u64) -> Result<(f64, Vec<(f64, f64)>)> {
    if t_max < 64 {
        return Err(Error::InvalidParameter("t_max must be >= 64".into()));
    }
    let mut points = Vec::new();
    let mut k = 3u32;
    while (1u64 << k) <= t_max {
        let t = 1u64 << k;
        let n = count_qm(m, t)?;
        if n > 0 {
            points.push((k as f64, (n as f64).log2()));
        }
        k += 1;
    }
    if points.len() < 2 {
        return Err(Error::InvalidParameter("not enough dyadic points".into()));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok((slope / 2.0, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cf_eval, cf_expand};

    #[test]
    fn qm_small_examples() {
        // only 1/2 has denominator < 3 with entries <= 2
        let s = enumerate_qm(2, 3).unwrap();
        assert_eq!(s.members.len(), 1);
        assert_eq!(s.members[0].1, Fraction::from_u64s(1, 2).unwrap());

        // K(1,1) = 2 is not < 2, so M = 1, t = 2 is empty
        let s = enumerate_qm(1, 2).unwrap();
        assert!(s.members.is_empty());
    }

    #[test]
    fn qm_fibonacci_counting() {
        // with entries all 1 the denominators are the Fibonacci numbers
        // 2, 3, 5, 8, 13, ... so |Q_1(t)| counts those below t
        let fib = [2u64, 3, 5, 8, 13, 21, 34, 55, 89];
        for t in [3u64, 6, 20, 90] {
            let expected = fib.iter().filter(|&&f| f < t).count() as u64;
            assert_eq!(count_qm(1, t).unwrap(), expected, "t={t}");
        }
        let s = enumerate_qm(1, 6).unwrap();
        let vals: Vec<Fraction> = s.members.iter().map(|(_, f)| f.clone()).collect();
        assert_eq!(
            vals,
            vec![
                Fraction::from_u64s(1, 2).unwrap(),
                Fraction::from_u64s(2, 3).unwrap(),
                Fraction::from_u64s(3, 5).unwrap(),
            ]
        );
    }

    #[test]
    fn qm_bar_examples() {
        // 1/2 enters via the word (1,1): K(1,1,1) = 3 >= 3
        let s = enumerate_qm_bar(2, 3).unwrap();
        assert_eq!(s.members.len(), 1);
        assert_eq!(s.members[0].1, Fraction::from_u64s(1, 2).unwrap());
        // the barred set is a filtered subset
        for (m, t) in [(2u64, 10u64), (3, 40), (4, 25)] {
            assert!(count_qm_bar(m, t).unwrap() <= count_qm(m, t).unwrap());
            assert!(count_qm_bar(m, t).unwrap() >= 1);
        }
    }

    #[test]
    fn qm_members_roundtrip_and_sorted() {
        for (m, t) in [(2u64, 40u64), (3, 25), (4, 18)] {
            let s = enumerate_qm(m, t).unwrap();
            for w in s.members.windows(2) {
                assert!(w[0].1 < w[1].1, "strictly increasing");
            }
            for (word, f) in &s.members {
                assert!(word.canonical());
                assert!(f.is_proper());
                assert!(*f.den() < num_bigint::BigInt::from(t));
                assert_eq!(&cf_eval(word).unwrap(), f);
                assert_eq!(&cf_expand(f).unwrap(), word);
            }
        }
    }

    #[test]
    fn zm_membership_against_prefix_oracle() {
        let q = 101u64;
        let m = 2u64;
        let t = 3u64;
        let mask = build_zm_mask(q, m, t).unwrap();
        // direct convergent oracle per a
        for a in 1..q {
            let mut x = q;
            let mut y = a;
            let (mut qm1, mut q0) = (0u64, 1u64);
            let mut keep = true;
            while y != 0 {
                let c = x / y;
                let qn = c * q0 + qm1;
                if qn >= t {
                    break;
                }
                if c > m {
                    keep = false;
                    break;
                }
                let r = x - c * y;
                x = y;
                y = r;
                qm1 = q0;
                q0 = qn;
            }
            assert_eq!(mask[a as usize], keep, "a={a}");
        }
        // c_1 > M with q_1 = c_1 < t is excluded: q=101, t=3, a with c_1 = 2... M=1
        let mask1 = build_zm_mask(101, 1, 3).unwrap();
        // 50/101 = [0;2,50]: c_1 = 2 > 1 and q_1 = 2 < 3 -> excluded
        assert!(!mask1[50]);
    }

    #[test]
    fn zm_t1_includes_all_coprime() {
        let z = build_zm(12, 3, 1).unwrap();
        assert_eq!(z, vec![1, 5, 7, 11]);
    }

    #[test]
    fn zm_rejects_large_t() {
        assert!(matches!(build_zm(100, 2, 11), Err(Error::ThresholdTooLarge { .. })));
    }

    #[test]
    fn decompose_small_prime() {
        // M=2, t=3: every coprime numerator is in Z (any continuation jumps
        // the denominator past 3 before an oversized quotient can be seen
        // below it), and |Qbar| = 1
        let d = decompose_zm(1009, 2, 3, 1.0).unwrap();
        assert_eq!(d.t_intervals, 1);
        assert_eq!(d.intervals, vec![(1, 1008)]);
        assert_eq!(d.leftover, 0);
    }

    #[test]
    fn decompose_matches_counts_and_floor() {
        for (q, m) in [(10007u64, 2u64), (10007, 3), (10007, 4)] {
            let t = (q as f64).powf(0.4).floor() as u64;
            let d = decompose_zm(q, m, t, 1.0).unwrap();
            assert_eq!(d.t_intervals as u64, count_qm_bar(m, t).unwrap());
            assert!(d.min_len >= q / (t * t));
            // exact cover: union of intervals = Z, element by element
            let mask = build_zm_mask(q, m, t).unwrap();
            let mut covered = vec![false; q as usize];
            for &(lo, hi) in &d.intervals {
                for a in lo..=hi {
                    assert!(!covered[a as usize], "overlap at {a}");
                    covered[a as usize] = true;
                }
            }
            for a in 1..q {
                assert_eq!(covered[a as usize], mask[a as usize], "a={a}");
            }
        }
    }

    #[test]
    fn decompose_degenerate_t_is_a_finding() {
        // t = 2 leaves |Qbar| = 0 while Z is huge: reported, not panicked
        match decompose_zm(1009, 2, 2, 1.0) {
            Err(Error::DecompositionViolation(_)) => {}
            other => panic!("expected a finding, got {other:?}"),
        }
    }

    #[test]
    fn wm_estimates_order() {
        let (w1, _) = estimate_wm(1, 4096).unwrap();
        let (w2, _) = estimate_wm(2, 4096).unwrap();
        let (w3, _) = estimate_wm(3, 4096).unwrap();
        let (w4, _) = estimate_wm(4, 4096).unwrap();
        assert!(w1 < 0.6);
        assert!(w2 < w3 && w3 < w4, "w2={w2} w3={w3} w4={w4}");
        assert!(w4 < 1.0);
    }

    #[test]
    fn counting_growth_band() {
        // |Q_M(2t)| / |Q_M(t)| stays in a fixed geometric band for t >= 64
        for m in [2u64, 3] {
            for k in 6..11 {
                let t = 1u64 << k;
                let a = count_qm(m, t).unwrap() as f64;
                let b = count_qm(m, 2 * t).unwrap() as f64;
                let ratio = b / a;
                assert!(ratio > 1.6 && ratio < 3.6, "M={m} t={t} ratio={ratio}");
            }
        }
    }
}
