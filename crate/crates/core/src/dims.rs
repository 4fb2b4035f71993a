//! Closed-form dimensions of spaces of level-t forms: Γ(t), GL_r(A) (by
//! partitions into parts q^i − 1), type-m forms, and Γ_1(t).
//!
//! Values are u128 with checked arithmetic; overflow is reported rather than
//! wrapped.

use crate::error::{Error, Result};

fn overflow() -> Error {
    Error::Budget("dimension exceeds u128".into())
}

pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n−i) is divisible by i+1 after the multiplication
        acc = acc.checked_mul((n - i) as u128).ok_or_else(overflow)? / (i as u128 + 1);
    }
    Ok(acc)
}

fn qpow(q: u64, e: u64) -> Result<u128> {
    (q as u128).checked_pow(e as u32).ok_or_else(overflow)
}

/// Σ_{i ∈ {0,1}^{r−1}} q^{Σ ν·i_ν} · C(k, Σ i_ν).
pub fn dim_gamma_t(q: u64, r: usize, k: u64) -> Result<u128> {
    if r == 0 {
        return Err(Error::Invalid("rank must be ≥ 1".into()));
    }
    // group the subsets of {1..r−1} by size: Σ_{|I|=s} q^{ΣI} is a
    // q-binomial-like sum computed by DP over ν
    let mut by_size: Vec<u128> = vec![1];
    for nu in 1..r as u64 {
        let w = qpow(q, nu)?;
        let mut next = by_size.clone();
        next.push(0);
        for s in 1..next.len() {
            let add = by_size[s - 1].checked_mul(w).ok_or_else(overflow)?;
            next[s] = next[s].checked_add(add).ok_or_else(overflow)?;
        }
        by_size = next;
    }
    by_size.iter().enumerate().try_fold(0u128, |acc, (s, &c)| {
        let term = c.checked_mul(binomial(k, s as u64)?).ok_or_else(overflow)?;
        acc.checked_add(term).ok_or_else(overflow)
    })
}

/// The number of partitions of k into parts from {q−1, q²−1, …, q^r−1}.
pub fn partitions_ps(q: u64, r: usize, k: u64) -> Result<u128> {
    if q < 2 {
        return Err(Error::Invalid("q must be ≥ 2".into()));
    }
    let k = k as usize;
    let mut ways = vec![0u128; k + 1];
    ways[0] = 1;
    for i in 1..=r as u64 {
        let part = qpow(q, i)? - 1;
        if part > k as u128 {
            break;
        }
        let part = part as usize;
        for n in part..=k {
            ways[n] = ways[n].checked_add(ways[n - part]).ok_or_else(overflow)?;
        }
    }
    Ok(ways[k])
}

/// Forms of weight k and type m for GL_r(A): P_S(k − m(q^r−1)/(q−1)), or 0
/// below that threshold.
pub fn dim_type_m(q: u64, r: usize, k: u64, m: u64) -> Result<u128> {
    if q < 2 || m >= q - 1 && !(q == 2 && m == 0) {
        return Err(Error::Invalid(format!("type {m} is outside 0..{}", q.saturating_sub(1))));
    }
    let shift = (qpow(q, r as u64)? - 1) / (q as u128 - 1) * m as u128;
    if (k as u128) < shift {
        return Ok(0);
    }
    partitions_ps(q, r, k - shift as u64)
}

/// The printed Γ_1(t) formula C(k−1, r−1).
pub fn dim_gamma1_t_printed(r: usize, k: u64) -> Result<u128> {
    if k == 0 {
        return Ok((r == 1) as u128);
    }
    binomial(k - 1, r as u64 - 1)
}

/// The dimension of the weight-k part of a polynomial ring in r weight-one
/// generators, C(k+r−1, r−1): what the Γ_1(t) ring actually has.
pub fn dim_gamma1_t(r: usize, k: u64) -> Result<u128> {
    binomial(k + r as u64 - 1, r as u64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force sum over all 0/1 vectors.
    fn gamma_t_oracle(q: u64, r: usize, k: u64) -> u128 {
        let mut total = 0u128;
        for mask in 0u32..(1 << (r - 1)) {
            let s = mask.count_ones() as u64;
            let e: u32 = (0..r - 1).filter(|b| mask >> b & 1 == 1).map(|b| b as u32 + 1).sum();
            total += (q as u128).pow(e) * binomial(k, s).unwrap();
        }
        total
    }

    fn partitions_oracle(parts: &[u64], k: u64) -> u128 {
        match parts.split_first() {
            None => (k == 0) as u128,
            Some((&p, rest)) => (0..=k / p).map(|a| partitions_oracle(rest, k - a * p)).sum(),
        }
    }

    #[test]
    fn frozen_values() {
        assert_eq!(dim_gamma_t(3, 2, 0).unwrap(), 1);
        assert_eq!(dim_gamma_t(3, 2, 2).unwrap(), 7);
        assert_eq!(dim_gamma_t(2, 3, 1).unwrap(), 7);
        assert_eq!(partitions_ps(2, 2, 6).unwrap(), 3);
        assert_eq!(partitions_ps(3, 2, 5).unwrap(), 0);
        // 7, 3+3+1, 3+1⁴, 1⁷
        assert_eq!(partitions_ps(2, 3, 7).unwrap(), 4);
        assert_eq!(dim_type_m(3, 2, 4, 1).unwrap(), 1);
        assert_eq!(dim_type_m(3, 2, 8, 1).unwrap(), 1);
        assert_eq!(dim_type_m(3, 2, 3, 1).unwrap(), 0);
        assert_eq!(dim_gamma1_t_printed(3, 5).unwrap(), 6);
        assert_eq!(dim_gamma1_t(2, 3).unwrap(), 4);
    }

    #[test]
    fn formulas_match_brute_force() {
        for q in [2u64, 3, 4, 5] {
            for r in 1..=4usize {
                for k in 0..=20u64 {
                    assert_eq!(dim_gamma_t(q, r, k).unwrap(), gamma_t_oracle(q, r, k));
                    let parts: Vec<u64> = (1..=r as u32).map(|i| q.pow(i) - 1).collect();
                    assert_eq!(partitions_ps(q, r, k).unwrap(), partitions_oracle(&parts, k));
                }
            }
        }
    }

    #[test]
    fn k_one_counts_projective_points() {
        for q in [2u64, 3, 4, 5, 7] {
            for r in 1..=5usize {
                let n = ((q as u128).pow(r as u32) - 1) / (q as u128 - 1);
                assert_eq!(dim_gamma_t(q, r, 1).unwrap(), n);
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(dim_gamma_t(1 << 20, 10, 1000), Err(Error::Budget(_))));
    }
}
