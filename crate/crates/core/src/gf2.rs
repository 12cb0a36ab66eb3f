//! Bit vectors over GF(2) and the unnormalized Walsh-Hadamard transform.
//!
//! Component `j` (1-based, as used in equations and file formats) lives at
//! machine bit `j - 1`. The text form puts component 1 leftmost, so `"100"`
//! is `basis(1, 3)` and has integer encoding 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported vector length.
pub const MAX_LEN: usize = 24;

/// An element of {0,1}^m packed into a machine word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: u8,
    bits: u32,
}

#[inline]
pub(crate) fn parity(word: u32) -> bool {
    word.count_ones() & 1 == 1
}

#[inline]
pub(crate) fn mask(m: usize) -> u32 {
    ((1u64 << m) - 1) as u32
}

fn check_len(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::validation("bit vector length must be at least 1"));
    }
    if m > MAX_LEN {
        return Err(Error::capacity("bit vector", m, MAX_LEN));
    }
    Ok(())
}

impl BitVector {
    pub fn zero(m: usize) -> Result<Self> {
        check_len(m)?;
        Ok(BitVector { len: m as u8, bits: 0 })
    }

    /// Builds a vector from its integer encoding. Bits at or above `m` must be clear.
    pub fn from_bits(bits: u32, m: usize) -> Result<Self> {
        check_len(m)?;
        if bits & !mask(m) != 0 {
            return Err(Error::validation(format!(
                "encoding {bits:#x} has bits above length {m}"
            )));
        }
        Ok(BitVector { len: m as u8, bits })
    }

    /// Internal constructor for callers that already masked the word.
    #[inline]
    pub(crate) fn from_raw(bits: u32, m: usize) -> Self {
        debug_assert!(m >= 1 && m <= MAX_LEN && bits & !mask(m) == 0);
        BitVector { len: m as u8, bits }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Integer encoding; also the index into 2^m-length tables.
    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Component `j`, 1-based.
    pub fn get(&self, j: usize) -> Result<bool> {
        if j == 0 || j > self.len() {
            return Err(Error::IndexOutOfRange { index: j, len: self.len() });
        }
        Ok(self.bits >> (j - 1) & 1 == 1)
    }

    /// Every vector of length `m` in increasing integer order.
    pub fn all(m: usize) -> Result<impl Iterator<Item = BitVector>> {
        check_len(m)?;
        Ok((0..1u32 << m).map(move |b| BitVector::from_raw(b, m)))
    }

    pub fn parity(&self) -> bool {
        parity(self.bits)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len())
            .map(|i| if self.bits >> i & 1 == 1 { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = s.len();
        check_len(m)?;
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                other => {
                    return Err(Error::validation(format!("bad bit character {other:?} in {s:?}")))
                }
            }
        }
        Ok(BitVector { len: m as u8, bits })
    }
}

fn same_len(x: &BitVector, y: &BitVector) -> Result<()> {
    if x.len != y.len {
        return Err(Error::Dimension { expected: x.len(), found: y.len() });
    }
    Ok(())
}

/// Inner product modulo 2.
pub fn dot(x: &BitVector, y: &BitVector) -> Result<bool> {
    same_len(x, y)?;
    Ok(parity(x.bits & y.bits))
}

pub fn xor(x: &BitVector, y: &BitVector) -> Result<BitVector> {
    same_len(x, y)?;
    Ok(BitVector { len: x.len, bits: x.bits ^ y.bits })
}

/// Characteristic vector of component `j` (1-based) in {0,1}^m.
pub fn basis(j: usize, m: usize) -> Result<BitVector> {
    check_len(m)?;
    if j == 0 || j > m {
        return Err(Error::IndexOutOfRange { index: j, len: m });
    }
    Ok(BitVector::from_raw(1 << (j - 1), m))
}

/// In-place unnormalized Walsh-Hadamard transform:
/// `v[u] <- sum_z (-1)^{popcount(u & z)} v[z]`.
pub fn fwht_in_place(v: &mut [f64]) -> Result<()> {
    let n = v.len();
    if !n.is_power_of_two() {
        return Err(Error::validation(format!(
            "transform length {n} is not a power of two"
        )));
    }
    let mut half = 1;
    while half < n {
        for block in v.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
    Ok(())
}

pub fn fwht(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}
