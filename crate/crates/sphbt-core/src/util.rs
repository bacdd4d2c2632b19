//! Small numeric helpers shared across modules.

use num_traits::Zero;
use std::ops::{Add, Sub};

use crate::real::Real;

/// Compensated (Kahan) accumulator. Keeps long alternating sums accurate to
/// a few ulp independent of length. Works componentwise for complex values.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Kahan<T> {
    sum: T,
    carry: T,
}

impl<T> Kahan<T>
where
    T: Copy + Zero + Add<Output = T> + Sub<Output = T>,
{
    #[inline]
    pub fn new() -> Self {
        Kahan {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, v: T) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum
    }
}

/// Compensated sum of an iterator.
pub(crate) fn kahan_sum<S: Real, I: IntoIterator<Item = S>>(it: I) -> S {
    let mut acc = Kahan::new();
    for v in it {
        acc.add(v);
    }
    acc.value()
}

/// Unevaluated double-width product: hi + lo = a·b exactly.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Twofold<S> {
    pub hi: S,
    pub lo: S,
}

/// Double-width accumulator: a running sum kept as an evaluated head plus a
/// low-order tail, so both the sum and the products feeding it round at
/// twice the scalar precision. The transform's row sums are multiplied by
/// coefficients as large as the row's cancellation mass, which would
/// amplify single-width representation error of the sums themselves.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DoubleWide<S> {
    hi: S,
    lo: S,
}

impl<S: Real> DoubleWide<S> {
    #[inline]
    pub fn new() -> Self {
        DoubleWide {
            hi: S::zero(),
            lo: S::zero(),
        }
    }

    /// Adds a single-width value with its rounding error captured (TwoSum).
    #[inline]
    pub fn add(&mut self, v: S) {
        let s = self.hi + v;
        let b = s - self.hi;
        let err = (self.hi - (s - b)) + (v - b);
        self.hi = s;
        self.lo = self.lo + err;
    }

    /// Adds an exact product a·b, keeping its low half.
    #[inline]
    pub fn add_prod(&mut self, a: S, b: S) {
        let p = Twofold::prod(a, b);
        self.add(p.hi);
        self.lo = self.lo + p.lo;
    }

    /// Adds an unevaluated pair.
    #[inline]
    pub fn add_two(&mut self, v: Twofold<S>) {
        self.add(v.hi);
        self.lo = self.lo + v.lo;
    }

    /// Adds c times an unevaluated pair.
    #[inline]
    pub fn add_scaled(&mut self, c: S, v: Twofold<S>) {
        self.add_prod(c, v.hi);
        self.lo = self.lo + c * v.lo;
    }

    /// Adds the product of two unevaluated pairs.
    #[inline]
    pub fn add_scaled_two(&mut self, c: Twofold<S>, v: Twofold<S>) {
        self.add_prod(c.hi, v.hi);
        self.lo = self.lo + (c.hi * v.lo + c.lo * v.hi);
    }

    #[inline]
    pub fn value(&self) -> S {
        self.hi + self.lo
    }

    /// Head and tail as an unevaluated pair.
    #[inline]
    pub fn parts(&self) -> Twofold<S> {
        Twofold {
            hi: self.hi,
            lo: self.lo,
        }
    }
}

impl<S: Real> Twofold<S> {
    #[inline]
    pub fn one() -> Self {
        Twofold {
            hi: S::one(),
            lo: S::zero(),
        }
    }

    #[inline]
    pub fn of(v: S) -> Self {
        Twofold { hi: v, lo: S::zero() }
    }

    /// Exact product of two scalars.
    #[inline]
    pub fn prod(a: S, b: S) -> Self {
        let hi = a * b;
        Twofold {
            hi,
            lo: a.mul_add(b, -hi),
        }
    }

    /// Product of two double-width values, keeping double width.
    #[inline]
    pub fn mul(self, rhs: Self) -> Self {
        let p = Self::prod(self.hi, rhs.hi);
        let lo = p.lo + (self.hi * rhs.lo + self.lo * rhs.hi);
        let hi = p.hi + lo;
        Twofold {
            hi,
            lo: lo - (hi - p.hi),
        }
    }

    /// Nearest single-width value.
    #[inline]
    pub fn round(self) -> S {
        self.hi + self.lo
    }

    /// Exact halving of both halves.
    #[inline]
    pub fn half(self) -> Self {
        let h = S::of(0.5);
        Twofold {
            hi: self.hi * h,
            lo: self.lo * h,
        }
    }

    /// Product with a single-width value, as an unevaluated pair.
    #[inline]
    pub fn scale(self, s: S) -> Self {
        let p = Self::prod(self.hi, s);
        Twofold {
            hi: p.hi,
            lo: p.lo + self.lo * s,
        }
    }

    /// Square root at double width: one Newton correction of the scalar
    /// root, with the residual formed from the exact square.
    pub fn sqrt(self) -> Self {
        if self.hi <= S::zero() {
            return Twofold::of(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        let p = Self::prod(x, x);
        // self − x² evaluated exactly: the heads nearly cancel
        let s = self.hi - p.hi;
        let r = s + (self.lo - p.lo);
        let lo = r / (x + x);
        let hi = x + lo;
        Twofold {
            hi,
            lo: lo - (hi - x),
        }
    }
}
