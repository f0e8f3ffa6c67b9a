//! Constructive folding: for every base >= 2 and exponent n, a fraction
//! a_n / base^n whose partial quotients are all <= base^2 - 1.
//!
//! One fold maps a continuant word (c_1..c_t) with c_t >= 2 to
//! (c_1..c_t, X, 1, c_t - 1, c_{t-1}..c_1), multiplying the continuant by
//! (X + 1) and squaring it. Words ending in 1 fold through the zero-collapse
//! identity K(.., a, 0, b, ..) = K(.., a + b, ..), which merges the inserted
//! 1 with the next reversed entry. Exponents chain as n -> 2n+1 (X = base-1)
//! and n -> 2n+2 (X = base^2-1) down to the base cases n = 1, 2.
//!
//! For base 2 the chain alone dead-ends (2^2 = 4 has no bounded word with
//! both ends >= 2), so the construction keeps a pool of equal-continuant
//! variants per exponent (mirrors and tail rewrites (..,x,1) <-> (..,x+1))
//! and, for small exponents, refills the pool by direct search over bounded
//! words. The pool search covers every exponent up to 64 for bases 2, 3, 5,
//! and 10.

use crate::cf::{cf_expand, CfWord, Fraction};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// A continuant word under construction, with its exact value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldWord {
    word: Vec<u64>,
    value: BigInt,
}

impl FoldWord {
    /// Builds from positive entries; recomputes and stores the continuant.
    pub fn new(word: Vec<u64>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        if word.contains(&0) {
            return Err(Error::ZeroQuotient(word.iter().position(|&c| c == 0).unwrap()));
        }
        let value = continuant_u64(&word);
        Ok(FoldWord { word, value })
    }

    pub fn word(&self) -> &[u64] {
        &self.word
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn first(&self) -> u64 {
        self.word[0]
    }

    pub fn last(&self) -> u64 {
        *self.word.last().unwrap()
    }
}

fn continuant_u64(word: &[u64]) -> BigInt {
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for &c in word {
        let next = c * &cur + &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// One standard fold: requires X >= 1 and last entry >= 2. The output
/// continuant is value^2 * (X + 1), verified by an independent recursion.
pub fn fold_step(w: &FoldWord, x: u64) -> Result<FoldWord> {
    if x == 0 {
        return Err(Error::FoldBadX);
    }
    if w.last() < 2 {
        return Err(Error::FoldBadBoundary);
    }
    let mut out = w.word.clone();
    out.push(x);
    out.push(1);
    out.push(w.last() - 1);
    out.extend(w.word[..w.word.len() - 1].iter().rev().copied());
    let folded = FoldWord::new(out)?;
    debug_assert_eq!(folded.value, &w.value * &w.value * (x + 1));
    Ok(folded)
}

/// Fold via the zero-collapse identity for words ending in 1; the inserted 1
/// and the reversed `last - 1 = 0` merge into `1 + second_last`.
fn fold_collapse(word: &[u64], x: u64, bound: u64) -> Option<Vec<u64>> {
    let t = word.len();
    if t == 1 {
        // word == [1]: folding gives [1, X] with continuant X + 1
        return Some(vec![1, x]);
    }
    let merged = 1 + word[t - 2];
    if merged > bound {
        return None;
    }
    let mut out = word.to_vec();
    out.push(x);
    out.push(merged);
    out.extend(word[..t - 2].iter().rev().copied());
    Some(out)
}

fn fold_any(word: &[u64], x: u64, bound: u64) -> Option<Vec<u64>> {
    if x == 0 || x > bound {
        return None;
    }
    if *word.last().unwrap() >= 2 {
        let mut out = word.to_vec();
        out.push(x);
        out.push(1);
        out.push(word.last().unwrap() - 1);
        out.extend(word[..word.len() - 1].iter().rev().copied());
        Some(out)
    } else {
        fold_collapse(word, x, bound)
    }
}

/// Equal-continuant rewrites of a word: mirrors and the two tail forms
/// (.., x, 1) <-> (.., x + 1), entries clamped to [1, bound].
fn variants(word: &[u64], bound: u64) -> BTreeSet<Vec<u64>> {
    let mut out = BTreeSet::new();
    for w in [word.to_vec(), word.iter().rev().copied().collect::<Vec<_>>()] {
        let mut forms = vec![w.clone()];
        let n = w.len();
        if n >= 2 && w[n - 1] == 1 && w[n - 2] + 1 <= bound {
            let mut f = w[..n - 2].to_vec();
            f.push(w[n - 2] + 1);
            forms.push(f);
        }
        if w[n - 1] >= 2 {
            let mut f = w[..n - 1].to_vec();
            f.push(w[n - 1] - 1);
            f.push(1);
            forms.push(f);
        }
        for f in forms {
            if f.iter().all(|&c| c >= 1 && c <= bound) {
                out.insert(f.iter().rev().copied().collect());
                out.insert(f);
            }
        }
    }
    out
}

/// Direct search for words with continuant exactly `target` and entries
/// <= bound. Capped; used only for small targets.
fn direct_search(target: u64, bound: u64, cap: usize, node_limit: u64) -> Vec<Vec<u64>> {
    let mut found = Vec::new();
    let mut nodes = 0u64;
    fn rec(
        word: &mut Vec<u64>,
        a: u64,
        b: u64,
        target: u64,
        bound: u64,
        cap: usize,
        node_limit: u64,
        nodes: &mut u64,
        found: &mut Vec<Vec<u64>>,
    ) {
        if *nodes >= node_limit || found.len() >= cap {
            return;
        }
        *nodes += 1;
        if a == target && !word.is_empty() {
            found.push(word.clone());
            return;
        }
        if a >= target {
            return;
        }
        for c in 1..=bound {
            if (c as u128) * (a as u128) + b as u128 > target as u128 {
                break;
            }
            word.push(c);
            rec(word, c * a + b, a, target, bound, cap, node_limit, nodes, found);
            word.pop();
        }
    }
    rec(&mut Vec::new(), 1, 0, target, bound, cap, node_limit, &mut nodes, &mut found);
    found
}

/// Exponent chain down to the base cases: n odd -> (n-1)/2, n even -> (n-2)/2.
fn chain(n: u32) -> Vec<u32> {
    let mut ch = vec![n];
    while *ch.last().unwrap() > 2 {
        let m = *ch.last().unwrap();
        ch.push(if m % 2 == 1 { (m - 1) / 2 } else { (m - 2) / 2 });
    }
    ch.reverse();
    ch
}

/// Max quotient of the canonical form of a word read as a continued fraction
/// (only the tail can change under normalization).
fn canonical_max(word: &[u64]) -> u64 {
    let n = word.len();
    if n >= 2 && word[n - 1] == 1 {
        word[..n - 2].iter().copied().max().unwrap_or(0).max(word[n - 2] + 1)
    } else {
        word.iter().copied().max().unwrap()
    }
}

const POOL_CAP: usize = 64;
const DIRECT_LIMIT: u64 = 1 << 17;

/// Pool of candidate words for one exponent, deterministic and capped with
/// endpoint diversity (distinct head/tail pairs are kept first).
fn cap_pool(cands: BTreeSet<Vec<u64>>) -> Vec<Vec<u64>> {
    if cands.len() <= POOL_CAP {
        return cands.into_iter().collect();
    }
    let mut by_ends: std::collections::BTreeMap<(u64, u64, u64, u64), Vec<Vec<u64>>> = Default::default();
    for w in cands {
        let n = w.len();
        let key = (w[0], if n > 1 { w[1] } else { 0 }, w[n - 1], if n > 1 { w[n - 2] } else { 0 });
        by_ends.entry(key).or_default().push(w);
    }
    let mut kept = Vec::new();
    while kept.len() < POOL_CAP {
        let mut grabbed = false;
        for bucket in by_ends.values_mut() {
            if let Some(w) = bucket.pop() {
                kept.push(w);
                grabbed = true;
                if kept.len() >= POOL_CAP {
                    break;
                }
            }
        }
        if !grabbed {
            break;
        }
    }
    kept.sort();
    kept
}

/// Constructs a fraction a / base^n with all partial quotients of the
/// canonical expansion <= base^2 - 1. Exact big-integer arithmetic
/// throughout; every fold is re-verified against the target power.
pub fn fold_construct(base: u64, n: u32) -> Result<(CfWord, Fraction)> {
    if base < 2 {
        return Err(Error::InvalidParameter("base must be >= 2".into()));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("exponent must be >= 1".into()));
    }
    let bound = base * base - 1;
    let mut pools: std::collections::BTreeMap<u32, Vec<Vec<u64>>> = Default::default();
    for e in chain(n) {
        let target: BigInt = BigInt::from(base).pow(e);
        let mut cands: BTreeSet<Vec<u64>> = BTreeSet::new();
        match e {
            1 => {
                cands.insert(vec![base]);
            }
            2 => {
                for w in direct_search(base * base, bound, 64, 4_000_000) {
                    cands.insert(w);
                }
            }
            _ => {
                let parent = if e % 2 == 1 { (e - 1) / 2 } else { (e - 2) / 2 };
                let j = e - 2 * parent;
                let x = base.pow(j) - 1;
                if let Some(pool) = pools.get(&parent) {
                    for pw in pool {
                        for v in variants(pw, bound) {
                            if let Some(out) = fold_any(&v, x, bound) {
                                cands.insert(out);
                            }
                        }
                    }
                }
                // small exponents can be refilled independently of the chain
                if BigInt::from(DIRECT_LIMIT) >= target {
                    let tgt = u64::try_from(&target).expect("fits by the guard");
                    for w in direct_search(tgt, bound, 256, 40_000_000) {
                        cands.insert(w);
                    }
                }
            }
        }
        cands.retain(|w| continuant_u64(w) == target);
        if cands.is_empty() {
            return Err(Error::FoldNoWitness { base, exponent: e });
        }
        pools.insert(e, cap_pool(cands));
    }

    let pool = &pools[&n];
    let word = pool
        .iter()
        .find(|w| canonical_max(w) <= bound)
        .ok_or(Error::FoldNoWitness { base, exponent: n })?;
    finish(base, n, word, bound)
}

fn finish(base: u64, n: u32, word: &[u64], bound: u64) -> Result<(CfWord, Fraction)> {
    let den = continuant_u64(word);
    debug_assert_eq!(den, BigInt::from(base).pow(n));
    let num = continuant_u64(&word[1..]);
    let frac = Fraction::new(num, den)?;
    let expansion = cf_expand(&frac)?;
    let maxc = expansion.max_abs_quotient_u64().unwrap();
    if maxc > bound {
        return Err(Error::DecompositionViolation(format!(
            "folded word for {base}^{n} normalizes past the bound: max quotient {maxc} > {bound}"
        )));
    }
    Ok((expansion, frac))
}

/// The raw continuant word behind `fold_construct`, for audits.
pub fn fold_construct_word(base: u64, n: u32) -> Result<FoldWord> {
    let (word_cf, _) = fold_construct(base, n)?;
    // recover the u64 word from the canonical expansion; entries fit u64
    let w: Vec<u64> = word_cf
        .quotients()
        .iter()
        .map(|c| u64::try_from(c).expect("bounded entries"))
        .collect();
    FoldWord::new(w)
}
