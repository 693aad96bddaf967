//! Gray mapping between `W` bits and a PAM level.
//!
//! With `u_i = 2b_i − 1`, the level is
//! `u_1·(2^{W−1} − Σ_{i=2}^{W} 2^{W−i} Π_{j=2}^{i} u_j)`; adjacent levels
//! differ in exactly one bit.

use crate::error::{Error, Result};

pub(crate) const MAX_BITS: usize = 15;

fn check_width(w: usize) -> Result<()> {
    if w == 0 || w > MAX_BITS {
        return Err(Error::Parameter(format!("bits per dimension W = {w} outside 1..={MAX_BITS}")));
    }
    Ok(())
}

/// `bits[0]` is `b_1`, the sign bit.
pub fn gray_map_bits_to_pam(bits: &[u8]) -> Result<i32> {
    let w = bits.len();
    check_width(w)?;
    let mut u = Vec::with_capacity(w);
    for (i, &b) in bits.iter().enumerate() {
        match b {
            0 => u.push(-1i32),
            1 => u.push(1),
            _ => return Err(Error::Parameter(format!("bit {i} is {b}, expected 0 or 1"))),
        }
    }
    Ok(map_signs(&u))
}

pub(crate) fn map_signs(u: &[i32]) -> i32 {
    let w = u.len();
    let mut inner = 1i32 << (w - 1);
    let mut prod = 1i32;
    for (i, &ui) in u.iter().enumerate().skip(1) {
        prod *= ui;
        inner -= (1i32 << (w - 1 - i)) * prod;
    }
    u[0] * inner
}

/// Inverse of [`gray_map_bits_to_pam`].
pub fn gray_unmap_pam_to_bits(level: i32, w: usize) -> Result<Vec<u8>> {
    check_width(w)?;
    let max = (1i32 << w) - 1;
    if level % 2 == 0 || level.abs() > max {
        return Err(Error::Parameter(format!("{level} is not a PAM level for W = {w}")));
    }
    let mut bits = Vec::with_capacity(w);
    bits.push(u8::from(level > 0));
    // 2^{W−1} − |s| = Σ_{i≥2} 2^{W−i} P_i with P_i = Π_{j=2}^{i} u_j; recover
    // the P_i greedily, then u_i = P_i·P_{i−1}.
    let mut rem = (1i32 << (w - 1)) - level.abs();
    let mut prev = 1i32;
    for i in 1..w {
        let p = if rem > 0 { 1 } else { -1 };
        rem -= (1i32 << (w - 1 - i)) * p;
        bits.push(u8::from(p * prev > 0));
        prev = p;
    }
    Ok(bits)
}
