//! Binary-expansion arithmetic on the dyadic group.
//!
//! A grid point at resolution `K` is an index `l` in `0..2^K` standing for
//! `x = l / 2^K`. The binary digit `x_m` of `x` (the coefficient of
//! `2^{-(m+1)}`) is bit `K - 1 - m` of `l`, so dyadic addition is a single
//! exclusive-or of indices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported grid resolution.
pub const MAX_RESOLUTION: u32 = 26;

/// A natural number viewed through its binary coefficients `ε_k(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BinaryIndex(u64);

impl BinaryIndex {
    pub const fn new(value: u64) -> Self {
        Self(value)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// `ε_k(n)`.
    pub fn bit(self, k: u32) -> u8 {
        if k >= 64 {
            0
        } else {
            ((self.0 >> k) & 1) as u8
        }
    }

    /// `|n|`, i.e. the unique `m` with `2^m <= n < 2^{m+1}`. Undefined for zero.
    pub fn order(self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    /// `ε_0(n), …, ε_{|n|}(n)`; empty for zero.
    pub fn bits(self) -> Vec<u8> {
        match self.order() {
            None => Vec::new(),
            Some(top) => (0..=top).map(|k| self.bit(k)).collect(),
        }
    }

    /// `n(s) = Σ_{j=0}^{s} ε_j(n) 2^j`.
    pub fn prefix(self, s: u32) -> u64 {
        if s >= 63 {
            self.0
        } else {
            self.0 & ((1u64 << (s + 1)) - 1)
        }
    }

    /// `|ε_k(n) - ε_{k+1}(n)|`, i.e. whether the expansion changes digit after position `k`.
    pub fn alternates_at(self, k: u32) -> bool {
        self.bit(k) != self.bit(k + 1)
    }

    /// Bits strictly above position `s`, i.e. `n - n(s)`.
    pub fn above(self, s: u32) -> u64 {
        self.0 - self.prefix(s)
    }
}

impl From<u64> for BinaryIndex {
    fn from(value: u64) -> Self {
        Self(value)
    }
}

impl fmt::Display for BinaryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dyadic grid of `2^K` cells of width `2^{-K}` on `[0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    resolution: u32,
}

impl GridSpec {
    pub fn new(resolution: u32) -> Result<Self> {
        if resolution == 0 || resolution > MAX_RESOLUTION {
            return Err(Error::InvalidResolution {
                got: resolution,
                max: MAX_RESOLUTION,
            });
        }
        Ok(Self { resolution })
    }

    pub fn resolution(self) -> u32 {
        self.resolution
    }

    /// Number of cells, `2^K`.
    pub fn size(self) -> usize {
        1usize << self.resolution
    }

    pub fn cell_width(self) -> f64 {
        1.0 / self.size() as f64
    }

    pub fn check_index(self, index: usize) -> Result<usize> {
        if index < self.size() {
            Ok(index)
        } else {
            Err(Error::IndexOutOfRange {
                index: index as u64,
                resolution: self.resolution,
            })
        }
    }

    /// Fails unless `n <= 2^K`.
    pub fn check_order(self, n: u64) -> Result<()> {
        if n <= self.size() as u64 {
            Ok(())
        } else {
            Err(Error::OrderTooLarge {
                n,
                resolution: self.resolution,
            })
        }
    }

    pub fn check_depth(self, depth: u32) -> Result<()> {
        if depth <= self.resolution {
            Ok(())
        } else {
            Err(Error::DepthTooLarge {
                depth,
                resolution: self.resolution,
            })
        }
    }

    /// Grid index whose only nonzero binary digit of `x` is `x_m`, i.e. the point `2^{-m-1}`.
    /// `None` when that point is finer than the grid.
    pub fn digit_mask(self, m: u32) -> Option<usize> {
        (m < self.resolution).then(|| 1usize << (self.resolution - 1 - m))
    }

    /// Grid index of `x ∔ 2^{-m-1}`. Digits finer than the grid leave the index unchanged,
    /// which is exact for every interval of depth at most `K`.
    pub fn flip_digit(self, index: usize, m: u32) -> usize {
        match self.digit_mask(m) {
            Some(mask) => index ^ mask,
            None => index,
        }
    }

    /// Reverses the `K` low bits of `i`. Maps Paley indices to natural Hadamard indices.
    pub fn bit_reverse(self, i: usize) -> usize {
        i.reverse_bits() >> (usize::BITS - self.resolution)
    }
}

/// `x ∔ y` on grid indices: digitwise addition modulo two.
pub fn dyadic_add(i: usize, j: usize, spec: GridSpec) -> Result<usize> {
    spec.check_index(i)?;
    spec.check_index(j)?;
    Ok(i ^ j)
}

/// Exact number `numerator / 2^scale`, kept canonical (odd numerator or zero with scale 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigInt,
    scale: u32,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigInt>, scale: u32) -> Self {
        let mut numerator = numerator.into();
        let mut scale = scale;
        if numerator.is_zero() {
            return Self::zero();
        }
        let twos = numerator.magnitude().trailing_zeros().unwrap_or(0).min(scale as u64) as u32;
        if twos > 0 {
            numerator >>= twos;
            scale -= twos;
        }
        Self { numerator, scale }
    }

    pub fn zero() -> Self {
        Self {
            numerator: BigInt::zero(),
            scale: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(value: i64) -> Self {
        Self::new(value, 0)
    }

    /// `2^exponent` for any integer exponent.
    pub fn pow2(exponent: i64) -> Self {
        if exponent >= 0 {
            Self::new(BigInt::one() << exponent as u64, 0)
        } else {
            Self::new(1, (-exponent) as u32)
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self {
            numerator: self.numerator.abs(),
            scale: self.scale,
        }
    }

    /// Multiplies by `2^exponent`.
    pub fn mul_pow2(&self, exponent: i64) -> Self {
        if exponent >= 0 {
            let shift = exponent as u64;
            if shift <= self.scale as u64 {
                Self::new(self.numerator.clone(), self.scale - shift as u32)
            } else {
                Self::new(&self.numerator << (shift - self.scale as u64), 0)
            }
        } else {
            Self::new(self.numerator.clone(), self.scale + (-exponent) as u32)
        }
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.numerator.bits();
        let excess = bits.saturating_sub(60);
        let head = (&self.numerator >> excess).to_f64().unwrap_or(f64::NAN);
        let exponent = excess as i64 - self.scale as i64;
        head * 2f64.powi(exponent as i32)
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        // arithmetic shift rounds toward negative infinity
        &self.numerator >> self.scale
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let scale = self.scale.max(other.scale);
        (
            &self.numerator << (scale - self.scale),
            &other.numerator << (scale - other.scale),
            scale,
        )
    }
}

impl Default for DyadicRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: Self) -> DyadicRational {
        let (a, b, scale) = self.aligned(rhs);
        DyadicRational::new(a + b, scale)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: Self) -> DyadicRational {
        &self + &rhs
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: Self) -> DyadicRational {
        let (a, b, scale) = self.aligned(rhs);
        DyadicRational::new(a - b, scale)
    }
}

impl Sub for DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: Self) -> DyadicRational {
        &self - &rhs
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: Self) -> DyadicRational {
        DyadicRational::new(&self.numerator * &rhs.numerator, self.scale + rhs.scale)
    }
}

impl Mul for DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: Self) -> DyadicRational {
        &self * &rhs
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            numerator: -self.numerator,
            scale: self.scale,
        }
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl std::iter::Sum for DyadicRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.scale)
        }
    }
}

/// `I(l,k) = [l/2^k, (l+1)/2^k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    depth: u32,
    offset: BigUint,
}

impl DyadicInterval {
    pub fn new(depth: u32, offset: impl Into<BigUint>) -> Result<Self> {
        let offset = offset.into();
        if offset >= (BigUint::one() << depth) {
            return Err(Error::InvalidParameter(format!(
                "offset {offset} does not fit depth {depth}"
            )));
        }
        Ok(Self { depth, offset })
    }

    /// `I_k = [0, 2^{-k})`.
    pub fn origin(depth: u32) -> Self {
        Self {
            depth,
            offset: BigUint::zero(),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn offset(&self) -> &BigUint {
        &self.offset
    }

    pub fn start(&self) -> DyadicRational {
        DyadicRational::new(BigInt::from_biguint(Sign::Plus, self.offset.clone()), self.depth)
    }

    pub fn end(&self) -> DyadicRational {
        DyadicRational::new(BigInt::from_biguint(Sign::Plus, &self.offset + 1u32), self.depth)
    }

    pub fn length(&self) -> DyadicRational {
        DyadicRational::pow2(-(self.depth as i64))
    }

    pub fn contains(&self, x: &DyadicRational) -> bool {
        &self.start() <= x && x < &self.end()
    }

    /// The enclosing interval one level up.
    pub fn parent(&self) -> Option<Self> {
        (self.depth > 0).then(|| Self {
            depth: self.depth - 1,
            offset: &self.offset >> 1u32,
        })
    }

    /// Whether `self ⊇ other`.
    pub fn contains_interval(&self, other: &Self) -> bool {
        other.depth >= self.depth && (&other.offset >> (other.depth - self.depth)) == self.offset
    }

    /// Length of `self ∩ other`. Dyadic intervals are nested or disjoint.
    pub fn overlap(&self, other: &Self) -> DyadicRational {
        if self.contains_interval(other) {
            other.length()
        } else if other.contains_interval(self) {
            self.length()
        } else {
            DyadicRational::zero()
        }
    }

    /// Grid cells `[first, first + count)` covered at resolution `K >= depth`.
    pub fn cell_range(&self, spec: GridSpec) -> Result<std::ops::Range<usize>> {
        spec.check_depth(self.depth)?;
        let width = 1usize << (spec.resolution() - self.depth);
        let first = self.offset.to_usize().unwrap_or(usize::MAX) * width;
        Ok(first..first + width)
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start(), self.end())
    }
}

/// A point of `[0,1)` given either as a grid index or as an exact dyadic rational.
#[derive(Clone, Debug)]
pub enum DyadicPoint {
    Grid { index: usize, spec: GridSpec },
    Exact(DyadicRational),
}

/// `I_k(x)`: the dyadic interval of length `2^{-k}` containing `x`.
pub fn interval_of(x: &DyadicPoint, k: u32) -> Result<DyadicInterval> {
    let exact = match x {
        DyadicPoint::Grid { index, spec } => {
            spec.check_index(*index)?;
            DyadicRational::new(*index as i64, spec.resolution())
        }
        DyadicPoint::Exact(value) => value.clone(),
    };
    if exact.is_negative() || exact >= DyadicRational::one() {
        return Err(Error::InvalidParameter(format!("point {exact} is outside [0,1)")));
    }
    let offset = exact.mul_pow2(k as i64).floor();
    let offset = offset
        .to_biguint()
        .ok_or_else(|| Error::InvalidParameter("negative offset".into()))?;
    DyadicInterval::new(k, offset)
}

/// Cells of `I_depth(x)` for a grid index `x` (requires `depth <= K`).
pub fn cell_block(index: usize, depth: u32, spec: GridSpec) -> std::ops::Range<usize> {
    let width = 1usize << (spec.resolution() - depth);
    let first = index & !(width - 1);
    first..first + width
}
