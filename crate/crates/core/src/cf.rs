//! Exact continued-fraction and continuant arithmetic over arbitrary-precision
//! integers, including signed partial quotients and reversal identities.
//!
//! A word holds the partial quotients `c_1, ..., c_s` of `[0; c_1, ..., c_s]`;
//! the leading zero is implicit because every fraction handled here lies in
//! `(0, 1)`. The empty word evaluates to `0/1`, which keeps the continuant
//! base case `K() = 1` consistent.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A finite sequence of nonzero integer partial quotients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CfWord {
    quotients: Vec<BigInt>,
    canonical: bool,
}

impl CfWord {
    /// Builds a word, rejecting zero quotients.
    pub fn new(quotients: Vec<BigInt>) -> Result<Self> {
        for (i, c) in quotients.iter().enumerate() {
            if c.is_zero() {
                return Err(Error::ZeroQuotient(i));
            }
        }
        let canonical = compute_canonical(&quotients);
        Ok(CfWord { quotients, canonical })
    }

    pub fn from_i64s(quotients: &[i64]) -> Result<Self> {
        Self::new(quotients.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn empty() -> Self {
        CfWord { quotients: Vec::new(), canonical: true }
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// True when all quotients are positive and the last is >= 2, or s <= 1.
    pub fn canonical(&self) -> bool {
        self.canonical
    }

    pub fn is_positive(&self) -> bool {
        self.quotients.iter().all(|c| c.is_positive())
    }

    pub fn max_quotient(&self) -> Option<&BigInt> {
        self.quotients.iter().max()
    }

    /// Largest |c_j| as u64 when it fits; None for the empty word.
    pub fn max_abs_quotient_u64(&self) -> Option<u64> {
        self.quotients
            .iter()
            .map(|c| c.abs())
            .max()
            .and_then(|m| u64::try_from(&m).ok())
    }
}

fn compute_canonical(quotients: &[BigInt]) -> bool {
    match quotients.len() {
        0 => true,
        1 => quotients[0].is_positive(),
        _ => {
            quotients.iter().all(|c| c.is_positive())
                && *quotients.last().unwrap() >= BigInt::from(2)
        }
    }
}

impl fmt::Display for CfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0;")?;
        for (i, c) in self.quotients.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A reduced fraction `num/den` with `num >= 0` and `den >= 1`.
/// Ordered by value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: BigInt,
    den: BigInt,
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl Fraction {
    /// Builds a fraction, rejecting non-reduced or out-of-range inputs.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den < BigInt::one() {
            return Err(Error::NonPositiveDenominator);
        }
        if num.is_negative() {
            return Err(Error::NegativeNumerator);
        }
        if num.gcd(&den) != BigInt::one() {
            return Err(Error::NotReduced { num: num.to_string(), den: den.to_string() });
        }
        Ok(Fraction { num, den })
    }

    /// Reduces `num/den` (both may be signed, den nonzero); returns the
    /// magnitude fraction and whether the value is negative.
    pub fn reduce_signed(num: BigInt, den: BigInt) -> Result<(Self, bool)> {
        if den.is_zero() {
            return Err(Error::NonPositiveDenominator);
        }
        let negative = num.is_negative() != den.is_negative() && !num.is_zero();
        let (mut n, mut d) = (num.abs(), den.abs());
        let g = n.gcd(&d);
        n /= &g;
        d /= &g;
        Ok((Fraction { num: n, den: d }, negative))
    }

    pub fn from_u64s(num: u64, den: u64) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Self {
        Fraction { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// True when 0 < num < den.
    pub fn is_proper(&self) -> bool {
        self.num.is_positive() && self.num < self.den
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Convergent pairs `(p_nu, q_nu)` for `nu = 0..=s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable {
    pairs: Vec<(BigInt, BigInt)>,
}

impl ConvergentTable {
    pub fn pairs(&self) -> &[(BigInt, BigInt)] {
        &self.pairs
    }

    pub fn last(&self) -> &(BigInt, BigInt) {
        self.pairs.last().expect("table always holds nu = 0")
    }
}

/// Continuant `K(d_1, ..., d_k)`: `K() = 1`, `K(d_1) = d_1`,
/// `K(d_1..d_k) = d_k K(d_1..d_{k-1}) + K(d_1..d_{k-2})`.
pub fn continuant(entries: &[BigInt]) -> BigInt {
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for d in entries {
        let next = d * &cur + &prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn continuant_i64(entries: &[i64]) -> BigInt {
    let v: Vec<BigInt> = entries.iter().map(|&d| BigInt::from(d)).collect();
    continuant(&v)
}

/// Raw evaluation: final `(p_s, q_s)` of the standard recurrence with signed
/// entries allowed. `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`.
fn eval_pair(word: &CfWord) -> (BigInt, BigInt) {
    let mut p_prev = BigInt::one();
    let mut p = BigInt::zero();
    let mut q_prev = BigInt::zero();
    let mut q = BigInt::one();
    for c in word.quotients() {
        let p_next = c * &p + &p_prev;
        let q_next = c * &q + &q_prev;
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
    }
    (p, q)
}

/// Value of a word as a magnitude fraction plus a sign flag. Signed words may
/// evaluate to negative rationals; positive words always come back
/// `(fraction, false)`.
pub fn cf_eval_parts(word: &CfWord) -> Result<(Fraction, bool)> {
    let (p, q) = eval_pair(word);
    if q.is_zero() {
        return Err(Error::DegenerateWord);
    }
    Fraction::reduce_signed(p, q)
}

/// Value of a word. For positive words `num = K(c_2..c_s)`,
/// `den = K(c_1..c_s)`; for signed words this is the magnitude (the sign is
/// available from [`cf_eval_parts`]).
pub fn cf_eval(word: &CfWord) -> Result<Fraction> {
    cf_eval_parts(word).map(|(f, _)| f)
}

/// Regular continued-fraction expansion of a proper fraction; the result is
/// canonical (last quotient >= 2).
pub fn cf_expand(f: &Fraction) -> Result<CfWord> {
    if !f.is_proper() {
        return Err(Error::NotProper { num: f.num.to_string(), den: f.den.to_string() });
    }
    let mut x = f.den.clone();
    let mut y = f.num.clone();
    let mut quotients = Vec::new();
    while !y.is_zero() {
        let (c, r) = x.div_rem(&y);
        quotients.push(c);
        x = y;
        y = r;
    }
    CfWord::new(quotients)
}

/// Convergents of a positive word, `(p_0, q_0) = (0, 1)` onward. Every pair
/// is reduced and `q_s = continuant(word)`.
pub fn convergents(word: &CfWord) -> Result<ConvergentTable> {
    if !word.is_positive() {
        return Err(Error::NonPositiveWord);
    }
    let mut pairs = Vec::with_capacity(word.len() + 1);
    let mut p_prev = BigInt::one();
    let mut p = BigInt::zero();
    let mut q_prev = BigInt::zero();
    let mut q = BigInt::one();
    pairs.push((p.clone(), q.clone()));
    for c in word.quotients() {
        let p_next = c * &p + &p_prev;
        let q_next = c * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        pairs.push((p.clone(), q.clone()));
    }
    Ok(ConvergentTable { pairs })
}

/// Canonicalizes a positive word by merging a trailing `1`:
/// `[..., x, 1] -> [..., x + 1]`. Value-preserving; a single merge suffices.
pub fn normalize(word: &CfWord) -> Result<CfWord> {
    if !word.is_positive() {
        return Err(Error::NonPositiveWord);
    }
    if word.canonical() {
        return Ok(word.clone());
    }
    let mut qs = word.quotients().to_vec();
    debug_assert!(qs.len() >= 2 && qs.last().unwrap().is_one());
    qs.pop();
    let last = qs.last_mut().unwrap();
    *last += 1;
    CfWord::new(qs)
}

/// Reverses a canonical word and returns the canonical reversed word together
/// with its value `q_{s-1}/q_s`. The reversal law
/// `a * q_{s-1} = (-1)^{s-1} (mod q_s)` holds for `a` the numerator of the
/// original word's value.
pub fn cf_reverse(word: &CfWord) -> Result<(CfWord, Fraction)> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !word.is_positive() {
        return Err(Error::NonPositiveWord);
    }
    let table = convergents(word)?;
    let pairs = table.pairs();
    let (_, q_last) = &pairs[pairs.len() - 1];
    let (_, q_prev) = &pairs[pairs.len() - 2];
    let reversed: Vec<BigInt> = word.quotients().iter().rev().cloned().collect();
    let reversed = normalize(&CfWord::new(reversed)?)?;
    let value = Fraction::new(q_prev.clone(), q_last.clone())?;
    Ok((reversed, value))
}
