//! Order-preserving key codecs.
//!
//! A codec exposes an element as a bitstring of a known width, read from the
//! most significant bit. The sort only ever asks for one bit at a time, so any
//! type whose natural order agrees with the lexicographic order of its
//! bitstring can be radix-partitioned: unsigned words as-is, signed words with
//! the sign bit flipped, IEEE-754 floats through the total-order transform, and
//! byte strings padded with zero bits past their end.

use std::cmp::Ordering;

/// Maps elements of `T` to MSB-first bitstrings of `width()` bits.
///
/// Implementations must satisfy the monotone encoding law: `a` precedes `b` in
/// the codec's key order exactly when the bitstring of `a` is lexicographically
/// smaller than that of `b`. `compare` must agree with that order.
pub trait KeyCodec<T: ?Sized> {
    /// Number of bit positions; recursion stops at `pos == width()`.
    fn width(&self) -> u32;

    /// Bit of `item` at `pos`, counted from the most significant bit.
    fn bit_at(&self, item: &T, pos: u32) -> bool;

    /// Key order of two elements. The default walks the bitstrings.
    fn compare(&self, a: &T, b: &T) -> Ordering {
        for pos in 0..self.width() {
            match (self.bit_at(a, pos), self.bit_at(b, pos)) {
                (false, true) => return Ordering::Less,
                (true, false) => return Ordering::Greater,
                _ => {}
            }
        }
        Ordering::Equal
    }
}

impl<T: ?Sized, C: KeyCodec<T> + ?Sized> KeyCodec<T> for &C {
    fn width(&self) -> u32 {
        (**self).width()
    }

    fn bit_at(&self, item: &T, pos: u32) -> bool {
        (**self).bit_at(item, pos)
    }

    fn compare(&self, a: &T, b: &T) -> Ordering {
        (**self).compare(a, b)
    }
}

/// Mask selecting the most significant bit of a `width`-bit word.
#[inline]
pub const fn msb_mask(width: u32) -> u64 {
    1u64 << (width - 1)
}

/// Mask selecting all bits of a `width`-bit word.
#[inline]
pub const fn width_mask(width: u32) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Bit `pos` of the `width`-bit word `x`, MSB first: shift left by `pos`, then
/// test the MSB mask.
#[inline]
pub fn bit_at_unsigned(x: u64, pos: u32, width: u32) -> bool {
    assert!(
        pos < width && width <= 64,
        "bit position {pos} outside word of width {width}"
    );
    (x << pos) & msb_mask(width) != 0
}

/// Flips the sign bit of a `width`-bit two's-complement pattern so that signed
/// order becomes unsigned order.
#[inline]
pub fn encode_signed(bits: u64, width: u32) -> u64 {
    (bits ^ msb_mask(width)) & width_mask(width)
}

/// IEEE-754 total-order transform on a `width`-bit pattern: negative patterns
/// are complemented, non-negative ones get their sign bit set.
///
/// NaNs are accepted. Negative-sign NaNs end up below every number and
/// positive-sign NaNs above, and `-0.0` sorts immediately before `+0.0`.
#[inline]
pub fn encode_float_total_order(bits: u64, width: u32) -> u64 {
    let mask = width_mask(width);
    let bits = bits & mask;
    if bits & msb_mask(width) != 0 {
        !bits & mask
    } else {
        bits ^ msb_mask(width)
    }
}

/// Bit `pos` of a byte string: byte `pos / 8`, bit `pos % 8` from that byte's
/// MSB. Positions at or past the end of the string read as zero.
#[inline]
pub fn bit_at_bytestring(bytes: &[u8], pos: u32) -> bool {
    match bytes.get((pos / 8) as usize) {
        Some(&b) => b & (0x80 >> (pos % 8)) != 0,
        None => false,
    }
}

/// Unsigned words of a fixed width. Bits above `width` are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unsigned {
    width: u32,
}

impl Unsigned {
    pub const U8: Unsigned = Unsigned { width: 8 };
    pub const U16: Unsigned = Unsigned { width: 16 };
    pub const U32: Unsigned = Unsigned { width: 32 };
    pub const U64: Unsigned = Unsigned { width: 64 };

    /// # Panics
    ///
    /// If `width` is not in `1..=64`.
    pub fn new(width: u32) -> Self {
        assert!(
            (1..=64).contains(&width),
            "unsigned width {width} not in 1..=64"
        );
        Unsigned { width }
    }
}

impl<T: Copy + Into<u64>> KeyCodec<T> for Unsigned {
    #[inline]
    fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    fn bit_at(&self, item: &T, pos: u32) -> bool {
        bit_at_unsigned((*item).into(), pos, self.width)
    }

    fn compare(&self, a: &T, b: &T) -> Ordering {
        let mask = width_mask(self.width);
        ((*a).into() & mask).cmp(&((*b).into() & mask))
    }
}

/// Two's-complement signed integers at their native width.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Signed;

/// IEEE-754 floats at their native width, in total order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Float;

macro_rules! signed_codec {
    ($($t:ty => $u:ty),*) => {$(
        impl KeyCodec<$t> for Signed {
            #[inline]
            fn width(&self) -> u32 {
                <$t>::BITS
            }

            #[inline]
            fn bit_at(&self, item: &$t, pos: u32) -> bool {
                let key = encode_signed(*item as $u as u64, <$t>::BITS);
                bit_at_unsigned(key, pos, <$t>::BITS)
            }

            fn compare(&self, a: &$t, b: &$t) -> Ordering {
                a.cmp(b)
            }
        }
    )*};
}

signed_codec!(i8 => u8, i16 => u16, i32 => u32, i64 => u64);

macro_rules! float_codec {
    ($($t:ty),*) => {$(
        impl KeyCodec<$t> for Float {
            #[inline]
            fn width(&self) -> u32 {
                (std::mem::size_of::<$t>() * 8) as u32
            }

            #[inline]
            fn bit_at(&self, item: &$t, pos: u32) -> bool {
                let width = KeyCodec::<$t>::width(self);
                let key = encode_float_total_order(item.to_bits() as u64, width);
                bit_at_unsigned(key, pos, width)
            }

            fn compare(&self, a: &$t, b: &$t) -> Ordering {
                let width = KeyCodec::<$t>::width(self);
                encode_float_total_order(a.to_bits() as u64, width)
                    .cmp(&encode_float_total_order(b.to_bits() as u64, width))
            }
        }
    )*};
}

float_codec!(f32, f64);

/// Raw byte strings in lexicographic byte order.
///
/// The bitstring is the string's bytes zero-padded to `max_len`, followed by
/// the string length in `len_bits` bits. The length suffix separates strings
/// whose padded bytes coincide (`"a"` and `"a\0"`); without it they would share
/// a bitstring while differing as values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ByteString {
    max_len: usize,
    len_bits: u32,
}

impl ByteString {
    /// Codec sized for strings of at most `max_len` bytes.
    pub fn with_max_len(max_len: usize) -> Self {
        let len_bits = usize::BITS - max_len.leading_zeros();
        let data_bits = max_len
            .checked_mul(8)
            .and_then(|b| u32::try_from(b).ok())
            .and_then(|b| b.checked_add(len_bits));
        assert!(
            data_bits.is_some(),
            "byte string length {max_len} too large"
        );
        ByteString { max_len, len_bits }
    }

    /// Codec sized for the longest string in `items`.
    pub fn for_items<S: AsRef<[u8]>>(items: &[S]) -> Self {
        let max_len = items.iter().map(|s| s.as_ref().len()).max().unwrap_or(0);
        Self::with_max_len(max_len)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    #[inline]
    fn data_bits(&self) -> u32 {
        (self.max_len * 8) as u32
    }
}

impl<S: AsRef<[u8]> + ?Sized> KeyCodec<S> for ByteString {
    #[inline]
    fn width(&self) -> u32 {
        self.data_bits() + self.len_bits
    }

    #[inline]
    fn bit_at(&self, item: &S, pos: u32) -> bool {
        let bytes = item.as_ref();
        let data_bits = self.data_bits();
        if pos < data_bits {
            bit_at_bytestring(bytes, pos)
        } else {
            assert!(
                pos < data_bits + self.len_bits && bytes.len() <= self.max_len,
                "bit position {pos} outside byte string key"
            );
            bit_at_unsigned(bytes.len() as u64, pos - data_bits, self.len_bits)
        }
    }

    fn compare(&self, a: &S, b: &S) -> Ordering {
        a.as_ref().cmp(b.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fold_bits<T, C: KeyCodec<T>>(codec: &C, item: &T) -> u64 {
        (0..codec.width()).fold(0, |acc, pos| (acc << 1) | codec.bit_at(item, pos) as u64)
    }

    #[test]
    fn unsigned_bits_from_msb() {
        assert!(bit_at_unsigned(0xB, 0, 4));
        assert!(!bit_at_unsigned(0x7, 0, 4));
        for w in [1, 4, 8, 32, 64] {
            for pos in 0..w {
                assert!(!bit_at_unsigned(0, pos, w));
            }
        }
        assert!(bit_at_unsigned(u64::MAX, 63, 64));
        assert!(bit_at_unsigned(1 << 63, 0, 64));
    }

    #[test]
    #[should_panic]
    fn unsigned_pos_past_width() {
        bit_at_unsigned(1, 4, 4);
    }

    #[test]
    fn bit_fold_reconstructs_every_byte() {
        for x in 0..=u8::MAX {
            assert_eq!(fold_bits(&Unsigned::U8, &x), x as u64);
        }
    }

    #[test]
    fn signed_examples() {
        assert_eq!(encode_signed(0, 32), 0x8000_0000);
        assert_eq!(encode_signed(-1i32 as u32 as u64, 32), 0x7FFF_FFFF);
        assert_eq!(encode_signed(i32::MIN as u32 as u64, 32), 0);
        assert_eq!(encode_signed(i64::MIN as u64, 64), 0);
    }

    #[test]
    fn signed_is_monotone_over_all_i16() {
        let mut prev = None;
        for x in i16::MIN..=i16::MAX {
            let key = encode_signed(x as u16 as u64, 16);
            if let Some(p) = prev {
                assert!(p < key, "order broken at {x}");
            }
            prev = Some(key);
        }
    }

    #[test]
    fn float_examples() {
        assert_eq!(
            encode_float_total_order(0.0f32.to_bits() as u64, 32),
            0x8000_0000
        );
        assert_eq!(
            encode_float_total_order((-0.0f32).to_bits() as u64, 32),
            0x7FFF_FFFF
        );
        assert_eq!(encode_float_total_order(0xBF80_0000, 32), 0x407F_FFFF);
    }

    #[test]
    fn float_codec_width() {
        assert_eq!(KeyCodec::<f32>::width(&Float), 32);
        assert_eq!(KeyCodec::<f64>::width(&Float), 64);
    }

    #[test]
    fn float_nan_placement() {
        let neg_nan = f64::from_bits(f64::NAN.to_bits() | (1 << 63));
        let pos_nan = f64::from_bits(f64::NAN.to_bits() & !(1 << 63));
        assert_eq!(Float.compare(&neg_nan, &f64::NEG_INFINITY), Ordering::Less);
        assert_eq!(Float.compare(&pos_nan, &f64::INFINITY), Ordering::Greater);
        assert_eq!(Float.compare(&-0.0f64, &0.0f64), Ordering::Less);
    }

    #[test]
    fn bytestring_bits() {
        assert!(bit_at_bytestring(b"A", 1));
        assert!(!bit_at_bytestring(b"A", 0));
        assert!(bit_at_bytestring(b"A", 7));
        for pos in 0..64 {
            assert!(!bit_at_bytestring(b"", pos));
        }
        assert!(!bit_at_bytestring(b"A", 8));
    }

    #[test]
    fn bytestring_codec_orders_zero_extensions() {
        let codec = ByteString::with_max_len(2);
        assert_eq!(KeyCodec::<[u8]>::width(&codec), 16 + 2);
        let a: &[u8] = b"a";
        let a0: &[u8] = b"a\0";
        let empty: &[u8] = b"";
        assert_ne!(fold_bits(&codec, &a), fold_bits(&codec, &a0));
        assert!(fold_bits(&codec, &a) < fold_bits(&codec, &a0));
        assert!(fold_bits(&codec, &empty) < fold_bits(&codec, &a));
    }

    #[test]
    fn bytestring_width_for_empty_input() {
        let codec = ByteString::for_items::<Vec<u8>>(&[]);
        assert_eq!(KeyCodec::<Vec<u8>>::width(&codec), 0);
        let codec = ByteString::for_items(&[b"".to_vec()]);
        assert_eq!(KeyCodec::<Vec<u8>>::width(&codec), 0);
    }
}
