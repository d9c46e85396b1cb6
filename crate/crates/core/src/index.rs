//! n-bit indices and their flip/complement algebra.
//!
//! Position `k` (1-based, left to right) is stored in bit `n - k` of the
//! word, so integer order on the word is the lexicographic order on strings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Result, XsepError};

/// Hard cap on the number of qubits.
pub const MAX_QUBITS: usize = 16;

pub fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(XsepError::QubitCount { n, max: MAX_QUBITS })
    }
}

/// Number of indices in `I_[n]`.
#[inline]
pub fn dim(n: usize) -> usize {
    1usize << n
}

/// An n-bit index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    n: u8,
    bits: u32,
}

impl Index {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        check_qubits(n)?;
        if (bits as u64) >= (1u64 << n) {
            return Err(XsepError::Invalid(format!(
                "bits {bits:#b} do not fit in {n} positions"
            )));
        }
        Ok(Self { n: n as u8, bits })
    }

    /// Unchecked constructor for callers iterating over `0..2^n`.
    #[inline]
    pub(crate) fn raw(n: usize, bits: u32) -> Self {
        debug_assert!(n <= MAX_QUBITS && (bits as u64) < (1u64 << n));
        Self { n: n as u8, bits }
    }

    /// All indices of `I_[n]` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Index> {
        (0..dim(n) as u32).map(move |b| Index::raw(n, b))
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
    }

    /// Lexicographic rank, `sum_k i(k) 2^(n-k)`.
    #[inline]
    pub fn rank(self) -> usize {
        self.bits as usize
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Digit at 1-based position `k`.
    #[inline]
    pub fn bit(self, k: usize) -> u8 {
        debug_assert!(k >= 1 && k <= self.n());
        ((self.bits >> (self.n() - k)) & 1) as u8
    }

    /// `1 - 2 i(k)`, the exponent of the k-th variable in `z^i`.
    #[inline]
    pub fn sign(self, k: usize) -> f64 {
        if self.bit(k) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Switches the digits at the given 1-based positions.
    pub fn flip(self, positions: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &k in positions {
            if k == 0 || k > self.n() {
                return Err(XsepError::Invalid(format!(
                    "position {k} outside 1..={}",
                    self.n()
                )));
            }
            mask |= 1 << (self.n() - k);
        }
        Ok(self.flip_mask(mask))
    }

    #[inline]
    pub fn flip_mask(self, mask: u32) -> Self {
        Self {
            n: self.n,
            bits: self.bits ^ (mask & full_mask(self.n())),
        }
    }

    /// The complement `ī`.
    #[inline]
    pub fn complement(self) -> Self {
        self.flip_mask(full_mask(self.n()))
    }

    /// Complement everywhere except position `k`.
    #[inline]
    pub fn complement_except(self, k: usize) -> Self {
        self.flip_mask(full_mask(self.n()) ^ (1 << (self.n() - k)))
    }

    /// True when the first digit is 0, i.e. the index is the lexicographically
    /// smaller member of the pair `{i, ī}`.
    #[inline]
    pub fn is_pair_representative(self) -> bool {
        self.bit(1) == 0
    }

    /// The member of `{i, ī}` whose first digit is 0.
    #[inline]
    pub fn representative(self) -> Self {
        if self.is_pair_representative() {
            self
        } else {
            self.complement()
        }
    }

    /// Number of ones.
    #[inline]
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Deletes the leftmost digit.
    pub fn drop_first(self) -> Result<Self> {
        if self.n < 2 {
            return Err(XsepError::Invalid("cannot shorten a 1-bit index".into()));
        }
        Ok(Self::raw(self.n() - 1, self.bits & full_mask(self.n() - 1)))
    }

    /// Prepends a digit.
    pub fn prepend(self, digit: u8) -> Result<Self> {
        check_qubits(self.n() + 1)?;
        Ok(Self::raw(
            self.n() + 1,
            self.bits | ((digit as u32 & 1) << self.n()),
        ))
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl serde::Serialize for Index {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.n() {
            write!(f, "{}", self.bit(k))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Index {
    type Err = XsepError;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        check_qubits(n)?;
        let mut bits = 0u32;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(XsepError::Invalid(format!("not a 0/1 string: {s:?}"))),
            }
        }
        Ok(Index::raw(n, bits))
    }
}

/// `z^i = prod_k z_k^(1 - 2 i(k))`.
pub fn monomial(z: &[Complex64], i: Index) -> Result<Complex64> {
    if z.len() != i.n() {
        return Err(XsepError::Length {
            expected: i.n(),
            got: z.len(),
        });
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, &zk) in z.iter().enumerate() {
        if zk == Complex64::new(0.0, 0.0) {
            return Err(XsepError::ZeroComponent(k + 1));
        }
        if i.bit(k + 1) == 0 {
            acc *= zk;
        } else {
            acc /= zk;
        }
    }
    Ok(acc)
}

/// Sum of `sign(k) * angle_k`: the phase of `alpha^i` for `alpha_k = e^{i angle_k}`.
#[inline]
pub(crate) fn signed_sum(i: Index, angles: &[f64]) -> f64 {
    let n = i.n();
    let mut acc = 0.0;
    for (k, &a) in angles.iter().enumerate() {
        if (i.bits >> (n - 1 - k)) & 1 == 0 {
            acc += a;
        } else {
            acc -= a;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(s: &str) -> Index {
        s.parse().unwrap()
    }

    #[test]
    fn flips() {
        assert_eq!(idx("000").flip(&[1, 2, 3]).unwrap(), idx("111"));
        assert_eq!(idx("010").flip(&[2]).unwrap(), idx("000"));
        assert_eq!(idx("101").flip(&[1]).unwrap(), idx("001"));
        assert_eq!(idx("101").flip(&[1, 3]).unwrap(), idx("000"));
        assert!(idx("101").flip(&[4]).is_err());
    }

    #[test]
    fn rank_is_lexicographic() {
        let all: Vec<String> = Index::all(3).map(|i| i.to_string()).collect();
        assert_eq!(
            all,
            ["000", "001", "010", "011", "100", "101", "110", "111"]
        );
        assert_eq!(idx("110").rank(), 6);
        assert_eq!(idx("0110").complement(), idx("1001"));
        assert_eq!(idx("0110").complement_except(2), idx("1101"));
    }

    #[test]
    fn monomial_examples() {
        let (t1, t2, t3) = (0.3f64, -1.1f64, 2.0f64);
        let z = [
            Complex64::from_polar(1.0, t1),
            Complex64::from_polar(1.0, t2),
            Complex64::from_polar(1.0, t3),
        ];
        let got = monomial(&z, idx("001")).unwrap();
        let want = Complex64::from_polar(1.0, t1 + t2 - t3);
        assert!((got - want).norm() < 1e-12);

        let ones = [Complex64::new(1.0, 0.0); 4];
        for i in Index::all(4) {
            assert_eq!(monomial(&ones, i).unwrap(), Complex64::new(1.0, 0.0));
        }

        let z = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
        assert!((monomial(&z, idx("10")).unwrap() - Complex64::new(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_component_rejected() {
        let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(monomial(&z, idx("00")), Err(XsepError::ZeroComponent(2)));
    }

    #[test]
    fn qubit_cap() {
        assert!(Index::new(17, 0).is_err());
        assert!(Index::new(0, 0).is_err());
        assert!(Index::new(3, 8).is_err());
        assert!("01a".parse::<Index>().is_err());
    }
}
