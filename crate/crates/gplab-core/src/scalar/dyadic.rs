//! Dyadic numbers (m * 2^e) and outward-rounded interval arithmetic.
//!
//! Every rounding here is directed: `lo` endpoints round toward -inf, `hi`
//! endpoints toward +inf, so an [`Interval`] always contains the true value.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// m * 2^e with arbitrary-size mantissa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

/// Floor division of `m` by 2^k (k >= 0), valid for negative `m`.
fn floor_shr(m: &BigInt, k: u64) -> BigInt {
    if m.is_negative() {
        let neg: BigInt = -m;
        let mask: BigInt = (BigInt::one() << k) - 1;
        let shifted: BigInt = (neg + mask) >> k;
        -shifted
    } else {
        m >> k
    }
}

fn ceil_shr(m: &BigInt, k: u64) -> BigInt {
    -floor_shr(&(-m), k)
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        Dyadic { m, e }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn from_bigint(m: BigInt) -> Self {
        Dyadic::new(m, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn bits(&self) -> u64 {
        self.m.magnitude().bits()
    }

    /// Largest dyadic <= self with mantissa of at most `bits` bits.
    pub fn round_down(&self, bits: u32) -> Self {
        let nb = self.bits();
        if nb <= bits as u64 {
            return self.clone();
        }
        let k = nb - bits as u64;
        Dyadic::new(floor_shr(&self.m, k), self.e + k as i64)
    }

    /// Smallest dyadic >= self with mantissa of at most `bits`+1 bits.
    pub fn round_up(&self, bits: u32) -> Self {
        let nb = self.bits();
        if nb <= bits as u64 {
            return self.clone();
        }
        let k = nb - bits as u64;
        Dyadic::new(ceil_shr(&self.m, k), self.e + k as i64)
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.e.min(other.e);
        let ma = &self.m << (self.e - e) as u64;
        let mb = &other.m << (other.e - e) as u64;
        Dyadic::new(ma + mb, e)
    }

    pub fn neg(&self) -> Self {
        Dyadic::new(-&self.m, self.e)
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        Dyadic::new(&self.m * &other.m, self.e + other.e)
    }

    pub fn cmp_value(&self, other: &Dyadic) -> std::cmp::Ordering {
        self.add(&other.neg()).m.sign().cmp(&num_bigint::Sign::NoSign)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.e >= 0 {
            BigRational::from_integer(&self.m << self.e as u64)
        } else {
            BigRational::new(self.m.clone(), BigInt::one() << (-self.e) as u64)
        }
    }

    pub fn floor_int(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as u64
        } else {
            floor_shr(&self.m, (-self.e) as u64)
        }
    }

    /// Directed conversion from a rational; `up` selects the rounding side.
    pub fn from_rational(q: &BigRational, bits: u32, up: bool) -> Self {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let p = q.numer();
        let d = q.denom();
        let shift = bits as i64 + d.magnitude().bits() as i64 - p.magnitude().bits() as i64 + 2;
        let shift = shift.max(0) as u64;
        let scaled = p << shift;
        let (quo, rem) = scaled.div_mod_floor(d);
        let m = if up && !rem.is_zero() { quo + 1 } else { quo };
        Dyadic::new(m, -(shift as i64))
    }
}

/// Closed interval [lo, hi] of dyadics; always contains the modeled value.
#[derive(Debug, Clone)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn point_int(m: BigInt) -> Self {
        let d = Dyadic::from_bigint(m);
        Interval { lo: d.clone(), hi: d }
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(q, bits, false),
            hi: Dyadic::from_rational(q, bits, true),
        }
    }

    pub fn zero() -> Self {
        Interval::point_int(BigInt::zero())
    }

    pub fn one() -> Self {
        Interval::point_int(BigInt::one())
    }

    pub fn add(&self, other: &Interval, bits: u32) -> Self {
        Interval {
            lo: self.lo.add(&other.lo).round_down(bits),
            hi: self.hi.add(&other.hi).round_up(bits),
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn mul(&self, other: &Interval, bits: u32) -> Self {
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c.cmp_value(&lo) == std::cmp::Ordering::Less {
                lo = c.clone();
            }
            if c.cmp_value(&hi) == std::cmp::Ordering::Greater {
                hi = c.clone();
            }
        }
        Interval {
            lo: lo.round_down(bits),
            hi: hi.round_up(bits),
        }
    }

    pub fn scale_rational(&self, c: &BigRational, bits: u32) -> Self {
        let ci = Interval::from_rational(c, bits + 4);
        self.mul(&ci, bits)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.m.is_positive() && !self.hi.m.is_negative()
    }

    /// None if the divisor interval contains zero.
    pub fn div(&self, other: &Interval, bits: u32) -> Option<Self> {
        if other.contains_zero() {
            return None;
        }
        let cands = [
            div_dir(&self.lo, &other.lo, bits),
            div_dir(&self.lo, &other.hi, bits),
            div_dir(&self.hi, &other.lo, bits),
            div_dir(&self.hi, &other.hi, bits),
        ];
        let mut lo = cands[0].0.clone();
        let mut hi = cands[0].1.clone();
        for (d, u) in &cands[1..] {
            if d.cmp_value(&lo) == std::cmp::Ordering::Less {
                lo = d.clone();
            }
            if u.cmp_value(&hi) == std::cmp::Ordering::Greater {
                hi = u.clone();
            }
        }
        Some(Interval { lo, hi })
    }

    pub fn pow(&self, n: u32, bits: u32) -> Self {
        let mut acc = Interval::one();
        for _ in 0..n {
            acc = acc.mul(self, bits);
        }
        acc
    }

    pub fn width(&self) -> Dyadic {
        self.hi.add(&self.lo.neg())
    }

    /// Intersection, assuming both contain the true value.
    pub fn intersect(&self, other: &Interval) -> Self {
        let lo = if self.lo.cmp_value(&other.lo) == std::cmp::Ordering::Greater {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi.cmp_value(&other.hi) == std::cmp::Ordering::Less {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        Interval { lo, hi }
    }
}

/// Both directed roundings of a dyadic quotient at the given precision.
fn div_dir(a: &Dyadic, b: &Dyadic, bits: u32) -> (Dyadic, Dyadic) {
    debug_assert!(!b.is_zero());
    if a.is_zero() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let shift = bits as i64 + b.bits() as i64 - a.bits() as i64 + 2;
    let shift = shift.max(0) as u64;
    let num = &a.m << shift;
    let (quo, rem) = num.div_mod_floor(&b.m);
    let e = a.e - b.e - shift as i64;
    let lo = Dyadic::new(quo.clone(), e);
    let hi = if rem.is_zero() {
        lo.clone()
    } else {
        Dyadic::new(quo + 1, e)
    };
    (lo, hi)
}

/// Enclosure of v^(1/n) for a nonnegative integer v.
pub fn root_enclosure(v: &BigUint, n: u32, bits: u32) -> Interval {
    if v.is_zero() {
        return Interval::zero();
    }
    let shifted: BigUint = v << (n as u64 * bits as u64);
    let r = shifted.nth_root(n);
    let exact = r.pow(n) == shifted;
    let lo = Dyadic::new(BigInt::from(r.clone()), -(bits as i64));
    let hi = if exact {
        lo.clone()
    } else {
        Dyadic::new(BigInt::from(r + 1u32), -(bits as i64))
    };
    Interval { lo, hi }
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn floor_shr_negative_rounds_down() {
        assert_eq!(floor_shr(&BigInt::from(-5), 1), BigInt::from(-3));
        assert_eq!(floor_shr(&BigInt::from(5), 1), BigInt::from(2));
        assert_eq!(floor_shr(&BigInt::from(-4), 2), BigInt::from(-1));
    }

    #[test]
    fn rational_roundtrip_brackets_value() {
        let q = rat(22, 7);
        let iv = Interval::from_rational(&q, 64);
        assert!(iv.lo.to_rational() <= q && q <= iv.hi.to_rational());
        let q = rat(-22, 7);
        let iv = Interval::from_rational(&q, 64);
        assert!(iv.lo.to_rational() <= q && q <= iv.hi.to_rational());
    }

    #[test]
    fn root_enclosure_sqrt2() {
        let iv = root_enclosure(&BigUint::from_u32(2).unwrap(), 2, 64);
        let lo = iv.lo.to_rational();
        let hi = iv.hi.to_rational();
        assert!(lo.clone() * lo.clone() <= rat(2, 1));
        assert!(hi.clone() * hi.clone() >= rat(2, 1));
        assert!((hi - lo) < rat(1, 1_000_000));
    }

    #[test]
    fn interval_division_excludes_zero_divisor() {
        let a = Interval::from_rational(&rat(1, 1), 32);
        let b = Interval {
            lo: Dyadic::from_bigint(BigInt::from(-1)),
            hi: Dyadic::from_bigint(BigInt::from(1)),
        };
        assert!(a.div(&b, 32).is_none());
    }
}
