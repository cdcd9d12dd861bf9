//! Exact double-to-decimal conversion.
//!
//! Every finite binary64 value has a finite decimal expansion; this
//! produces it in full, with no exponent notation and no rounding. The
//! big-integer scratch space is checked out of a [`FreelistState`] with
//! the smallest sufficient power-of-two class, so the allocator contract
//! is exercised by ordinary formatting traffic.

use super::freelist::{BlockId, FreelistState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("non-finite input has no decimal expansion")]
pub struct NonFiniteInput;

/// Formats the exact decimal expansion of `f` using a private allocator.
pub fn format_double_exact(f: f64) -> Result<String, NonFiniteInput> {
    let mut state = FreelistState::default();
    format_double_exact_with(&mut state, f)
}

/// Same as [`format_double_exact`], with caller-provided allocator state
/// so scratch-block recycling is observable.
pub fn format_double_exact_with(
    state: &mut FreelistState,
    f: f64,
) -> Result<String, NonFiniteInput> {
    if !f.is_finite() {
        return Err(NonFiniteInput);
    }
    let (negative, mut mantissa, mut exp) = decompose(f);
    if mantissa == 0 {
        return Ok(if negative { "-0".into() } else { "0".into() });
    }
    // Shift factors of two into the exponent; the remaining fraction bits
    // are odd, which keeps the fractional digits free of trailing zeros.
    while mantissa & 1 == 0 && exp < 0 {
        mantissa >>= 1;
        exp += 1;
    }

    let mut text = String::new();
    if negative {
        text.push('-');
    }

    if exp >= 0 {
        // Integer-valued: mantissa * 2^exp.
        let mut big = Scratch::from_u64(state, mantissa);
        big.shl_bits(state, exp as u32);
        text.push_str(&big.to_decimal());
        big.release(state);
    } else {
        let k = (-exp) as u32; // 1..=1074
        let (int_part, frac_bits) = if k >= 64 {
            (0u64, mantissa)
        } else {
            (mantissa >> k, mantissa & ((1u64 << k) - 1))
        };
        text.push_str(&int_part.to_string());
        text.push('.');
        // frac_bits / 2^k == (frac_bits * 5^k) / 10^k: render the numerator
        // and left-pad to k digits.
        let mut big = Scratch::from_u64(state, frac_bits);
        big.mul_pow5(state, k);
        let digits = big.to_decimal();
        big.release(state);
        debug_assert!(digits.len() <= k as usize);
        for _ in digits.len()..k as usize {
            text.push('0');
        }
        text.push_str(&digits);
    }
    Ok(text)
}

/// Splits a finite double into (sign, integer mantissa, binary exponent)
/// with `value = mantissa * 2^exp` exactly.
fn decompose(f: f64) -> (bool, u64, i32) {
    let bits = f.to_bits();
    let negative = bits >> 63 == 1;
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let raw_mantissa = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 {
        // Subnormal (or zero): no implicit bit.
        (negative, raw_mantissa, -1074)
    } else {
        (negative, raw_mantissa | (1u64 << 52), raw_exp - 1075)
    }
}

/// 5^13 is the largest power of five below 2^32; multiplying by it chunks
/// the 5^k walk into u32-sized steps.
const POW5_13: u32 = 1_220_703_125;
const POW5_SMALL: [u32; 13] = [
    1, 5, 25, 125, 625, 3125, 15625, 78125, 390625, 1953125, 9765625, 48828125, 244140625,
];

/// Little-endian base-2^32 scratch integer whose storage discipline runs
/// through the freelist allocator.
struct Scratch {
    limbs: Vec<u32>,
    block: BlockId,
}

impl Scratch {
    fn from_u64(state: &mut FreelistState, value: u64) -> Self {
        let block = Self::checkout(state, 2);
        let mut limbs = vec![value as u32, (value >> 32) as u32];
        trim(&mut limbs);
        Self { limbs, block }
    }

    fn checkout(state: &mut FreelistState, words: u64) -> BlockId {
        let k = FreelistState::class_for_words(words);
        state
            .balloc(k as i64)
            .expect("scratch classes stay well under kmax")
    }

    fn capacity(&self, state: &FreelistState) -> u64 {
        state
            .block_info(self.block)
            .expect("scratch block is live")
            .capacity_words
    }

    /// Re-checks capacity before growth; trades the old block for the
    /// smallest sufficient class when the limbs would no longer fit.
    fn ensure(&mut self, state: &mut FreelistState, words: u64) {
        if words > self.capacity(state) {
            let fresh = Self::checkout(state, words);
            let old = std::mem::replace(&mut self.block, fresh);
            state.bfree(old).expect("old scratch block was live");
        }
    }

    fn release(self, state: &mut FreelistState) {
        state.bfree(self.block).expect("scratch block was live");
    }

    fn shl_bits(&mut self, state: &mut FreelistState, bits: u32) {
        let limb_shift = (bits / 32) as usize;
        let bit_shift = bits % 32;
        let needed = self.limbs.len() + limb_shift + 1;
        self.ensure(state, needed as u64);

        if bit_shift == 0 {
            self.limbs.splice(0..0, std::iter::repeat_n(0, limb_shift));
        } else {
            let mut shifted = vec![0u32; needed];
            for (i, &limb) in self.limbs.iter().enumerate() {
                let wide = (limb as u64) << bit_shift;
                shifted[i + limb_shift] |= wide as u32;
                shifted[i + limb_shift + 1] |= (wide >> 32) as u32;
            }
            self.limbs = shifted;
        }
        trim(&mut self.limbs);
    }

    fn mul_small(&mut self, state: &mut FreelistState, factor: u32) {
        self.ensure(state, self.limbs.len() as u64 + 1);
        let mut carry = 0u64;
        for limb in &mut self.limbs {
            let wide = (*limb as u64) * (factor as u64) + carry;
            *limb = wide as u32;
            carry = wide >> 32;
        }
        if carry != 0 {
            self.limbs.push(carry as u32);
        }
    }

    fn mul_pow5(&mut self, state: &mut FreelistState, mut power: u32) {
        while power >= 13 {
            self.mul_small(state, POW5_13);
            power -= 13;
        }
        if power > 0 {
            self.mul_small(state, POW5_SMALL[power as usize]);
        }
    }

    /// Decimal rendering by repeated division by 10^9.
    fn to_decimal(&self) -> String {
        if self.limbs.is_empty() {
            return "0".into();
        }
        let mut work = self.limbs.clone();
        let mut chunks: Vec<u32> = Vec::new();
        while !work.is_empty() {
            let mut remainder = 0u64;
            for limb in work.iter_mut().rev() {
                let wide = (remainder << 32) | (*limb as u64);
                *limb = (wide / 1_000_000_000) as u32;
                remainder = wide % 1_000_000_000;
            }
            trim(&mut work);
            chunks.push(remainder as u32);
        }
        let mut text = chunks.last().unwrap().to_string();
        for chunk in chunks.iter().rev().skip(1) {
            text.push_str(&format!("{chunk:09}"));
        }
        text
    }
}

fn trim(limbs: &mut Vec<u32>) {
    while limbs.last() == Some(&0) {
        limbs.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two_are_short() {
        assert_eq!(format_double_exact(0.5).unwrap(), "0.5");
        assert_eq!(format_double_exact(0.25).unwrap(), "0.25");
        assert_eq!(format_double_exact(2.0).unwrap(), "2");
    }

    #[test]
    fn integer_valued_doubles_print_without_fraction() {
        assert_eq!(format_double_exact(3.0).unwrap(), "3");
        assert_eq!(format_double_exact(-10.0).unwrap(), "-10");
        assert_eq!(
            format_double_exact(9007199254740993.0).unwrap(),
            "9007199254740992" // 2^53 + 1 is not representable
        );
    }

    #[test]
    fn zero_keeps_its_sign() {
        assert_eq!(format_double_exact(0.0).unwrap(), "0");
        assert_eq!(format_double_exact(-0.0).unwrap(), "-0");
    }

    #[test]
    fn tenth_expands_to_55_fraction_digits() {
        let text = format_double_exact(0.1).unwrap();
        assert!(text.starts_with("0.1000000000000000055511151231257827"));
        let fraction = text.split_once('.').unwrap().1;
        assert_eq!(fraction.len(), 55);
        assert!(!fraction.ends_with('0'));
    }

    #[test]
    fn non_finite_inputs_are_refused() {
        assert!(format_double_exact(f64::NAN).is_err());
        assert!(format_double_exact(f64::INFINITY).is_err());
        assert!(format_double_exact(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn mixed_value_round_trips() {
        for f in [
            1.5,
            -2.75,
            0.3,
            1e300,
            -1e-300,
            f64::MIN_POSITIVE,
            5e-324, // smallest subnormal
            f64::MAX,
            123456.789,
        ] {
            let text = format_double_exact(f).unwrap();
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), f.to_bits(), "round-trip failed for {f}: {text}");
        }
    }

    #[test]
    fn scratch_blocks_all_return_to_the_freelist() {
        let mut state = FreelistState::default();
        for f in [0.1, 1e308, 5e-324, -123.456] {
            format_double_exact_with(&mut state, f).unwrap();
            assert_eq!(state.live_count(), 0);
            assert_eq!(state.minted_count(), state.recycled_count());
        }
        // Recycling means later calls stop minting new blocks.
        let minted_before = state.minted_count();
        format_double_exact_with(&mut state, 0.1).unwrap();
        assert_eq!(state.minted_count(), minted_before);
    }
}
