//! Low-level numeric kernels shared by every module: vector norms on ℝ^d,
//! integer powers/roots of nonnegative reals, and an order-independent
//! exact accumulator for sums of nonnegative doubles.
//!
//! Windowed integrals of piecewise-constant functions are finite sums of
//! nonnegative cell contributions. Summing them through [`NonnegAccumulator`]
//! yields the correctly rounded value of the true sum, so two windows holding
//! the same multiset of contributions produce bit-identical integrals and a
//! window contained in another can never report a larger one. Several
//! identities tested elsewhere (periodic collapse of the sliding norm, the
//! four-window domination inequality, transform isometries) rely on exactly
//! this.

/// Number of 64-bit limbs covering the full nonnegative f64 range
/// (LSB weight 2^-1074, MSB up to 2^971 * 2^52) plus carry headroom
/// for far more additions than any scan performs.
const LIMBS: usize = 34;

/// Fixed-point superaccumulator for nonnegative finite doubles.
///
/// `add` is exact (no rounding); `value` rounds the exact total once,
/// to nearest, ties to even. The result therefore does not depend on
/// the order in which terms were added.
#[derive(Clone)]
pub struct NonnegAccumulator {
    limbs: [u64; LIMBS],
}

impl NonnegAccumulator {
    pub fn new() -> Self {
        NonnegAccumulator { limbs: [0u64; LIMBS] }
    }

    pub fn reset(&mut self) {
        self.limbs = [0u64; LIMBS];
    }

    /// Add a nonnegative finite double, exactly.
    pub fn add(&mut self, x: f64) {
        debug_assert!(x.is_finite() && x >= 0.0, "accumulator input must be finite and >= 0, got {x}");
        if x == 0.0 {
            return;
        }
        let bits = x.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = bits & 0x000f_ffff_ffff_ffff;
        // Significand and LSB bit position in units of 2^-1074.
        let (sig, shift) = if biased == 0 {
            (mantissa, 0u32)
        } else {
            (mantissa | (1u64 << 52), (biased - 1) as u32)
        };
        let limb = (shift / 64) as usize;
        let off = shift % 64;
        let wide = (sig as u128) << off;
        let lo = wide as u64;
        let mid = (wide >> 64) as u64;
        let (l0, c0) = self.limbs[limb].overflowing_add(lo);
        self.limbs[limb] = l0;
        let mut carry = c0 as u64;
        let mut i = limb + 1;
        if mid != 0 || carry != 0 {
            let (l1, c1a) = self.limbs[i].overflowing_add(mid);
            let (l1, c1b) = l1.overflowing_add(carry);
            self.limbs[i] = l1;
            carry = (c1a as u64) + (c1b as u64);
            i += 1;
        }
        while carry != 0 {
            let (l, c) = self.limbs[i].overflowing_add(carry);
            self.limbs[i] = l;
            carry = c as u64;
            i += 1;
        }
    }

    /// Correctly rounded value of the exact total (round to nearest, ties to even).
    pub fn value(&self) -> f64 {
        let mut top = None;
        for i in (0..LIMBS).rev() {
            if self.limbs[i] != 0 {
                top = Some(i);
                break;
            }
        }
        let top = match top {
            None => return 0.0,
            Some(t) => t,
        };
        // Highest set bit position in units of 2^-1074.
        let p_top = top as u32 * 64 + (63 - self.limbs[top].leading_zeros());
        if p_top <= 52 {
            // Total fits in 53 bits above the subnormal LSB: exact.
            let int = self.limbs[0];
            return (int as f64) * f64::from_bits(1);
        }
        // Extract the 53 bits [p_top-52, p_top], a guard bit, and a sticky flag.
        let take = |pos: i64| -> u64 {
            if pos < 0 {
                return 0;
            }
            let limb = (pos / 64) as usize;
            let off = (pos % 64) as u32;
            (self.limbs[limb] >> off) & 1
        };
        let mut mant: u64 = 0;
        for k in 0..53 {
            mant = (mant << 1) | take(p_top as i64 - k);
        }
        let guard = take(p_top as i64 - 53);
        let mut sticky = false;
        if guard == 1 {
            'outer: for pos in (0..(p_top as i64 - 53)).rev() {
                if take(pos) == 1 {
                    sticky = true;
                    break 'outer;
                }
            }
        }
        if guard == 1 && (sticky || mant & 1 == 1) {
            mant += 1;
        }
        let mut exp_msb = p_top as i64; // MSB weight is 2^(exp_msb - 1074)
        if mant == 1u64 << 53 {
            mant >>= 1;
            exp_msb += 1;
        }
        // Normal double with biased exponent E has MSB position E + 51.
        let biased = exp_msb - 51;
        assert!(biased >= 1 && biased <= 2046, "accumulated sum out of f64 range");
        let bits = ((biased as u64) << 52) | (mant & 0x000f_ffff_ffff_ffff);
        f64::from_bits(bits)
    }
}

/// Exact (correctly rounded, order-independent) sum of nonnegative doubles.
pub fn exact_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = NonnegAccumulator::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// x^p for x >= 0, p >= 1, with fast paths for the small integer exponents
/// the test suites exercise. One shared implementation keeps powered cell
/// contributions bit-identical across modules.
pub fn pow_p(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if p == 3.0 {
        x * x * x
    } else {
        x.powf(p)
    }
}

/// s^(1/p) for s >= 0, matching the fast paths of [`pow_p`].
pub fn root_p(s: f64, p: f64) -> f64 {
    if p == 1.0 {
        s
    } else if p == 2.0 {
        s.sqrt()
    } else if p == 3.0 {
        s.cbrt()
    } else {
        s.powf(1.0 / p)
    }
}
