//! The hyperbola criterion and bounded-quotient searches.
//!
//! For coprime `a, q` the solutions of `a x = y (mod q)`, `1 <= x < q`,
//! `1 <= |y| < q` control the partial quotients of `a/q`: if every solution
//! has `x|y| >= q/M` then all quotients are `<= M`, and conversely quotients
//! `<= M` force `x|y| >= q/(4M)`. All threshold comparisons here are exact
//! integer cross-multiplications; no floating point touches a verdict.

use crate::error::{Error, Result};
use crate::smallcf::{gcd_u64, inv_mod, is_prime_u64, max_quotient_capped, max_quotient_u64, quotients_u64};
use crate::zm;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// A solution (x, y) of `a x = y (mod q)` minimizing `x * |y|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HyperbolaWitness {
    pub x: u64,
    pub y: i64,
    pub product: u64,
}

/// Outcome of a per-denominator search for the flattest numerator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub q: u64,
    pub a: u64,
    pub m_min: u64,
    pub strategy: Strategy,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Guided,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Exhaustive => write!(f, "exhaustive"),
            Strategy::Guided => write!(f, "guided"),
        }
    }
}

fn require_coprime(a: u64, q: u64) -> Result<()> {
    if q < 2 || a == 0 || a >= q {
        return Err(Error::InvalidParameter(format!("need 1 <= a < q, got a={a} q={q}")));
    }
    if gcd_u64(a, q) != 1 {
        return Err(Error::NotCoprime { a, q });
    }
    Ok(())
}

/// Minimizes `x * |y|` over `x in [1, x_max]` where `y` runs over both
/// residue candidates of `a x` (the value in `[0, q)` and its shift by `-q`),
/// so the full range `1 <= |y| < q` is covered. Ties prefer smaller x, then
/// the positive residue.
pub fn min_hyperbola_product(a: u64, q: u64, x_max: Option<u64>) -> Result<HyperbolaWitness> {
    require_coprime(a, q)?;
    let x_max = x_max.unwrap_or(q - 1).min(q - 1);
    let mut best = HyperbolaWitness { x: 0, y: 0, product: u64::MAX };
    let mut res: u64 = 0; // a*x mod q, maintained incrementally
    for x in 1..=x_max {
        res += a;
        if res >= q {
            res -= q;
        }
        debug_assert_ne!(res, 0, "a x = 0 impossible for coprime a, x < q");
        let (mag, y) = if res <= q - res { (res, res as i64) } else { (q - res, res as i64 - q as i64) };
        let product = x * mag;
        if product < best.product {
            best = HyperbolaWitness { x, y, product };
        }
        // no later x can beat the incumbent once x alone exceeds it
        if x >= best.product {
            break;
        }
    }
    Ok(best)
}

/// Forward direction: min product >= q/M implies every quotient <= M.
/// Returns whether the criterion `min >= q/M` holds (exact comparison).
pub fn korobov_forward(a: u64, q: u64, m: u64) -> Result<bool> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be >= 1".into()));
    }
    let witness = min_hyperbola_product(a, q, None)?;
    let holds = (witness.product as u128) * (m as u128) >= q as u128;
    if holds {
        debug_assert!(max_quotient_u64(a, q) <= m);
    }
    Ok(holds)
}

/// Backward direction: with M the max quotient of a/q, checks
/// `min product >= q/(4M)` and returns the ratio `q / (M * min product)`,
/// which the criterion bounds by 4.
pub fn korobov_backward(a: u64, q: u64) -> Result<f64> {
    let witness = min_hyperbola_product(a, q, None)?;
    let m = max_quotient_u64(a, q);
    let ok = 4u128 * witness.product as u128 * m as u128 >= q as u128;
    if !ok {
        return Err(Error::DecompositionViolation(format!(
            "hyperbola backward bound failed at a={a} q={q}: product={} M={m}",
            witness.product
        )));
    }
    Ok(q as f64 / (m as f64 * witness.product as f64))
}

/// Both directions over every numerator of a single q; returns the worst
/// backward ratio observed. Zero tolerance: any failure is an error.
pub fn verify_bidirectional(q: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for a in 1..q {
        if gcd_u64(a, q) != 1 {
            continue;
        }
        let witness = min_hyperbola_product(a, q, None)?;
        let maxc = max_quotient_u64(a, q);
        // forward with the tightest integral M satisfying product >= q/M
        let m0 = q.div_ceil(witness.product);
        if maxc > m0 {
            return Err(Error::DecompositionViolation(format!(
                "forward direction failed at a={a} q={q}: product={} M0={m0} maxc={maxc}",
                witness.product
            )));
        }
        if 4u128 * witness.product as u128 * maxc as u128 < q as u128 {
            return Err(Error::DecompositionViolation(format!(
                "backward direction failed at a={a} q={q}: product={} maxc={maxc}",
                witness.product
            )));
        }
        let ratio = q as f64 / (witness.product as f64 * maxc as f64);
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(worst)
}

/// Scans all numerators coprime to q for the smallest max partial quotient;
/// smallest such a wins ties. The Euclid loop bails out early once the
/// running maximum exceeds the incumbent.
pub fn search_exhaustive(q: u64) -> Result<SearchResult> {
    if q < 2 {
        return Err(Error::InvalidParameter("q must be >= 2".into()));
    }
    let start = Instant::now();
    let mut best_a = 1;
    let mut best_m = u64::MAX;
    for a in 1..q {
        if gcd_u64(a, q) != 1 {
            continue;
        }
        // beat the incumbent strictly, so smaller a wins ties
        if let Some(m) = max_quotient_capped(a, q, best_m.saturating_sub(1)) {
            best_a = a;
            best_m = m;
        }
    }
    Ok(SearchResult {
        q,
        a: best_a,
        m_min: best_m,
        strategy: Strategy::Exhaustive,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Reference scan without the early exit, for equivalence testing.
pub fn search_exhaustive_reference(q: u64) -> Result<SearchResult> {
    if q < 2 {
        return Err(Error::InvalidParameter("q must be >= 2".into()));
    }
    let start = Instant::now();
    let mut best: Option<(u64, u64)> = None;
    for a in 1..q {
        if gcd_u64(a, q) != 1 {
            continue;
        }
        let m = max_quotient_u64(a, q);
        if best.is_none() || m < best.unwrap().1 {
            best = Some((a, m));
        }
    }
    let (a, m_min) = best.unwrap();
    Ok(SearchResult { q, a, m_min, strategy: Strategy::Exhaustive, elapsed_ms: start.elapsed().as_millis() as u64 })
}

/// Inverse-pair search for prime q: looks for z1, z2 in the bounded-prefix
/// set with z1 z2 = 1 (mod q), scanning ascending and keeping the first pair
/// whose full expansion verifies the 4M bound. Membership uses the exact
/// threshold `4M q_nu^2 < q`, i.e. `q_nu < sqrt(q/4M)` without rounding.
pub fn search_guided(q: u64, m: u64) -> Result<Option<SearchResult>> {
    if !is_prime_u64(q) {
        return Err(Error::NotPrime(q));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("M must be >= 2".into()));
    }
    let start = Instant::now();
    if q <= 4 * m {
        return Ok(None); // t < 1, degenerate
    }
    let members = zm::build_zm_exact_threshold(q, m)?;
    let in_set: std::collections::HashSet<u64> = members.iter().copied().collect();
    let bound = 4 * m;
    for &z1 in &members {
        let z2 = inv_mod(z1, q).expect("prime modulus");
        if !in_set.contains(&z2) {
            continue;
        }
        if let Some(maxc) = max_quotient_capped(z1, q, bound) {
            return Ok(Some(SearchResult {
                q,
                a: z1,
                m_min: maxc,
                strategy: Strategy::Guided,
                elapsed_ms: start.elapsed().as_millis() as u64,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QFilter {
    Primes,
    All,
    SquareFree,
}

fn is_square_free(mut n: u64) -> bool {
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn admits(q: u64, filter: QFilter) -> bool {
    match filter {
        QFilter::Primes => is_prime_u64(q),
        QFilter::All => true,
        QFilter::SquareFree => is_square_free(q),
    }
}

/// One exhaustive row per admissible q in [q_min, q_max], in q order.
/// `skip` drops denominators already present in a results cache.
pub fn bound_table(
    q_min: u64,
    q_max: u64,
    filter: QFilter,
    skip: &dyn Fn(u64) -> bool,
) -> Result<Vec<SearchResult>> {
    if q_min < 2 || q_min > q_max {
        return Err(Error::InvalidParameter(format!("bad range [{q_min}, {q_max}]")));
    }
    let qs: Vec<u64> = (q_min..=q_max).filter(|&q| admits(q, filter) && !skip(q)).collect();
    let mut rows: Vec<SearchResult> = qs
        .par_iter()
        .map(|&q| search_exhaustive(q))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.q);
    Ok(rows)
}

/// Ratio columns for a table row: `m_min / log2(q)` and
/// `m_min * log2(log2(q)) / log2(q)`.
pub fn table_ratios(row: &SearchResult) -> (f64, f64) {
    let lq = (row.q as f64).log2();
    let r1 = row.m_min as f64 / lq;
    let r2 = if lq > 1.0 { row.m_min as f64 * lq.log2() / lq } else { 0.0 };
    (r1, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_examples() {
        // exhaustive scan oracle: x=1 gives 5*1 = 5 = -2 (mod 7), product 2
        let w = min_hyperbola_product(5, 7, None).unwrap();
        assert_eq!((w.x, w.y, w.product), (1, -2, 2));
        let w = min_hyperbola_product(1, 7, None).unwrap();
        assert_eq!((w.x, w.y, w.product), (1, 1, 1));
        let w = min_hyperbola_product(6, 7, None).unwrap();
        assert_eq!((w.x, w.y, w.product), (1, -1, 1));
        let w = min_hyperbola_product(3, 8, None).unwrap();
        assert_eq!((w.x, w.y, w.product), (1, 3, 3));
    }

    #[test]
    fn witness_rejects_non_coprime() {
        assert!(min_hyperbola_product(2, 8, None).is_err());
    }

    #[test]
    fn witness_symmetric_under_negation() {
        for q in [11u64, 101, 257] {
            for a in 1..q.min(40) {
                if gcd_u64(a, q) != 1 {
                    continue;
                }
                let w1 = min_hyperbola_product(a, q, None).unwrap();
                let w2 = min_hyperbola_product(q - a, q, None).unwrap();
                assert_eq!(w1.product, w2.product, "a={a} q={q}");
            }
        }
    }

    #[test]
    fn forward_examples() {
        // min product 2 < 7/3: criterion not met at M=3 even though maxc = 2
        assert!(!korobov_forward(5, 7, 3).unwrap());
        // at M=4 the criterion holds: 2 >= 7/4
        assert!(korobov_forward(5, 7, 4).unwrap());
        assert!(!korobov_forward(1, 7, 6).unwrap());
        // 3 >= 8/4 = 2
        assert!(korobov_forward(3, 8, 4).unwrap());
    }

    #[test]
    fn backward_examples() {
        // maxc(5/7) = 2, product 2 >= 7/8
        let r = korobov_backward(5, 7).unwrap();
        assert!(r <= 4.0 && r > 0.0);
        // a = 1: M = q, product 1 >= q/(4q)
        let r = korobov_backward(1, 101).unwrap();
        assert!(r <= 4.0);
    }

    #[test]
    fn bidirectional_sweep_small() {
        for q in 2..400 {
            let worst = verify_bidirectional(q).unwrap();
            assert!(worst <= 4.0);
        }
    }

    #[test]
    fn exhaustive_oracle_values() {
        // full scan over a in [1,6]: 5/7 = [0;1,2,2] is the unique minimizer
        let r = search_exhaustive(7).unwrap();
        assert_eq!((r.a, r.m_min), (5, 2));
        let r = search_exhaustive(2).unwrap();
        assert_eq!((r.a, r.m_min), (1, 2));
        let r = search_exhaustive(5).unwrap();
        assert_eq!((r.a, r.m_min), (2, 2));
    }

    #[test]
    fn early_exit_matches_reference() {
        for q in 2..500 {
            let fast = search_exhaustive(q).unwrap();
            let slow = search_exhaustive_reference(q).unwrap();
            assert_eq!((fast.a, fast.m_min), (slow.a, slow.m_min), "q={q}");
        }
    }

    #[test]
    fn guided_degenerate_and_validity() {
        assert_eq!(search_guided(3, 2).unwrap(), None);
        let r = search_guided(101, 5).unwrap().expect("verified pair exists");
        assert!(r.m_min <= 20);
        assert_eq!(max_quotient_u64(r.a, 101), r.m_min);
        // guided can never beat exhaustive
        let ex = search_exhaustive(101).unwrap();
        assert!(ex.m_min <= r.m_min);
    }

    #[test]
    fn guided_rejects_composite() {
        assert!(matches!(search_guided(100, 3), Err(Error::NotPrime(100))));
    }

    #[test]
    fn table_small_range() {
        let rows = bound_table(2, 30, QFilter::Primes, &|_| false).unwrap();
        let qs: Vec<u64> = rows.iter().map(|r| r.q).collect();
        assert_eq!(qs, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(rows.iter().all(|r| r.m_min <= 4));
        let rows = bound_table(2, 20, QFilter::SquareFree, &|q| q == 10).unwrap();
        assert!(rows.iter().all(|r| r.q != 10 && r.q != 4 && r.q != 8 && r.q != 9 && r.q != 12));
    }
}
