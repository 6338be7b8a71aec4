//! Exact integer kernels: 2-adic valuation, binary digits, k-oddoid
//! arithmetic and the constructive splits behind the winning strategies.

use crate::error::{Error, Result};

/// Parts of a split heap, in construction order. Every part is at least 1
/// and the parts add up to the split value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplitParts(Vec<u64>);

impl SplitParts {
    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Exponent of the largest power of two dividing `z`.
pub fn v2(z: u64) -> Result<u32> {
    if z == 0 {
        return Err(domain("v2(0) is undefined"));
    }
    Ok(z.trailing_zeros())
}

/// The `k`-th binary digit of `z` counted from the least significant bit,
/// starting at 1.
pub fn digit(z: u64, k: u32) -> Result<u8> {
    if k == 0 {
        return Err(domain("digit positions start at 1"));
    }
    if k > 64 {
        return Ok(0);
    }
    Ok(((z >> (k - 1)) & 1) as u8)
}

/// `v2((x | y) + 1)`, the Grundy value of Delete Nim.
pub fn or_plus_one_valuation(x: u64, y: u64) -> u32 {
    ((x | y) as u128 + 1).trailing_zeros()
}

/// `k(k-1)`, the modulus of k-oddoid arithmetic.
pub fn oddoid_modulus(k: u64) -> Result<u64> {
    if k < 2 {
        return Err(domain(format!("k must be >= 2, got {k}")));
    }
    k.checked_mul(k - 1).ok_or_else(|| domain(format!("k(k-1) overflows for k = {k}")))
}

/// True iff `z mod k(k-1)` lies in `1..=k-1`.
pub fn is_k_oddoid(z: u64, k: u64) -> Result<bool> {
    let modulus = oddoid_modulus(k)?;
    if z == 0 {
        return Err(domain("oddoid numbers are positive"));
    }
    let r = z % modulus;
    Ok((1..k).contains(&r))
}

/// Smallest `(s, k^s)` with `k^s > z`.
pub fn power_above(z: u64, k: u64) -> Result<(u32, u128)> {
    if k < 2 {
        return Err(domain(format!("k must be >= 2, got {k}")));
    }
    let (mut s, mut pow) = (0u32, 1u128);
    while pow <= z as u128 {
        pow *= k as u128;
        s += 1;
    }
    Ok((s, pow))
}

/// Splits `z` into `(z - 2^j, 2^j)`; both halves have valuation `j`.
pub fn split_equal_valuation(z: u64, j: u32) -> Result<(u64, u64)> {
    let v = v2(z)?;
    if j >= v {
        return Err(domain(format!("need j < v2({z}) = {v}, got j = {j}")));
    }
    let low = 1u64 << j;
    Ok((z - low, low))
}

/// Splits `x` in `k..=k(k-1)` into `k` parts in `1..=k-1`.
///
/// With `x = kp + q`, emits `q` copies of `p + 1` then `k - q` copies of `p`,
/// or `k` copies of `k - 1` when `p = k - 1`.
pub fn split_small(x: u64, k: u64) -> Result<SplitParts> {
    let modulus = oddoid_modulus(k)?;
    if x < k || x > modulus {
        return Err(domain(format!("split_small needs {k} <= x <= {modulus}, got {x}")));
    }
    let (p, q) = (x / k, x % k);
    let parts = if p < k - 1 {
        let mut parts = vec![p + 1; q as usize];
        parts.extend(std::iter::repeat_n(p, (k - q) as usize));
        parts
    } else {
        vec![p; k as usize]
    };
    Ok(SplitParts(parts))
}

/// Writes a k-evenoid `y` as `alpha * k(k-1) + beta` with `k <= beta <= k(k-1)`.
pub fn evenoid_decompose(y: u64, k: u64) -> Result<(u64, u64)> {
    let modulus = oddoid_modulus(k)?;
    if y < k {
        return Err(domain(format!("{y} is smaller than k = {k}")));
    }
    let beta = (y - k) % modulus + k;
    Ok(((y - beta) / modulus, beta))
}

/// Splits a k-evenoid `y < k^s` into `k` k-oddoid parts, each below `k^(s-1)`.
pub fn split_evenoid_bounded(y: u64, k: u64, s: u32) -> Result<SplitParts> {
    let modulus = oddoid_modulus(k)?;
    if y < k || is_k_oddoid(y, k)? {
        return Err(domain(format!("{y} is not {k}-evenoid")));
    }
    match (k as u128).checked_pow(s) {
        Some(b) if (y as u128) < b => {}
        _ => return Err(domain(format!("{y} is not below {k}^{s}"))),
    }
    let (alpha, beta) = evenoid_decompose(y, k)?;
    let betas = split_small(beta, k)?.into_vec();
    let (share, extra) = (alpha / k, alpha % k);
    let parts = betas
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let a = share + u64::from((i as u64) < extra);
            a * modulus + b
        })
        .collect();
    Ok(SplitParts(parts))
}

/// Splits `z >= k` into `k` parts keeping one large tail.
///
/// A k-oddoid `z` becomes `k - 1` ones and `z - (k - 1)`; a k-evenoid `z`
/// becomes `beta_1, ..., beta_{k-1}, alpha * k(k-1) + beta_k`.
pub fn split_keep_tail(z: u64, k: u64) -> Result<SplitParts> {
    let modulus = oddoid_modulus(k)?;
    if z < k {
        return Err(domain(format!("cannot split {z} into {k} positive parts")));
    }
    if is_k_oddoid(z, k)? {
        let mut parts = vec![1; (k - 1) as usize];
        parts.push(z - (k - 1));
        return Ok(SplitParts(parts));
    }
    let (alpha, beta) = evenoid_decompose(z, k)?;
    let mut parts = split_small(beta, k)?.into_vec();
    let last = parts.last_mut().expect("k >= 2 parts");
    *last += alpha * modulus;
    Ok(SplitParts(parts))
}
