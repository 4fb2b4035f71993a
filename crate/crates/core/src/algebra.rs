//! A minimal commutative-ring interface, so that Goss polynomials and
//! additive polynomials can be evaluated over C_∞, k0, or the symbolic ring.

use crate::coeff::K0;
use crate::error::Result;
use crate::fq::Gf;
use crate::poly::{Poly, RatF};
use crate::tail::Tail;

pub trait RingLike: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// The image of an integer (through F_p).
    fn int_like(&self, c: i64) -> Self;
    fn add_r(&self, o: &Self) -> Self;
    fn sub_r(&self, o: &Self) -> Self;
    fn mul_r(&self, o: &Self) -> Self;
    fn neg_r(&self) -> Self {
        self.zero_like().sub_r(self)
    }
    fn is_zero_r(&self) -> bool;
    fn pow_r(&self, mut n: u64) -> Self {
        let mut r = self.one_like();
        let mut b = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul_r(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul_r(&b);
            }
        }
        r
    }
}

impl RingLike for Tail {
    fn zero_like(&self) -> Self {
        Tail::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        Tail::one(self.ctx())
    }
    fn int_like(&self, c: i64) -> Self {
        Tail::from_fq(self.ctx(), self.ctx().base.from_int(c))
    }
    fn add_r(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_r(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_r(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_r(&self) -> Self {
        self.neg()
    }
    fn is_zero_r(&self) -> bool {
        self.is_exact() && self.is_zero()
    }
}

impl RingLike for K0 {
    fn zero_like(&self) -> Self {
        K0::zero(self.field(), self.mode())
    }
    fn one_like(&self) -> Self {
        K0::one(self.field(), self.mode())
    }
    fn int_like(&self, c: i64) -> Self {
        K0::constant(self.field(), self.mode(), self.field().from_int(c))
    }
    fn add_r(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_r(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_r(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_r(&self) -> Self {
        self.neg()
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero()
    }
}

impl RingLike for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.field())
    }
    fn one_like(&self) -> Self {
        Poly::one(self.field())
    }
    fn int_like(&self, c: i64) -> Self {
        Poly::constant(self.field(), self.field().from_int(c))
    }
    fn add_r(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_r(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_r(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero()
    }
}

/// A coefficient ring for additive polynomials: an F_q(t)-algebra of
/// characteristic p with its q-Frobenius.
pub trait Coeff: RingLike {
    fn q(&self) -> u32;
    /// The base field F_q.
    fn base(&self) -> Gf;
    /// x ↦ x^q.
    fn frob_q(&self) -> Self;
    fn frob_qk(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |x, _| x.frob_q())
    }
    /// The image of a ∈ F_q.
    fn from_fq(&self, a: u32) -> Self;
    /// The image of x ∈ F_q(t).
    fn from_f(&self, x: &RatF) -> Result<Self>;
}

impl Coeff for Tail {
    fn q(&self) -> u32 {
        self.ctx().q
    }
    fn base(&self) -> Gf {
        self.ctx().base.clone()
    }
    fn frob_q(&self) -> Self {
        self.frob()
    }
    fn from_fq(&self, a: u32) -> Self {
        Tail::from_fq(self.ctx(), a)
    }
    fn from_f(&self, x: &RatF) -> Result<Self> {
        if x.is_poly() {
            return Tail::from_ratf(self.ctx(), x, 1, None);
        }
        // a few powers of t beyond anything this element still knows
        let p = self.prec().map_or(256, |p| p.ceil().max(0) + 2 * x.deg().abs() as i128 + 16);
        Tail::from_ratf(self.ctx(), x, 1, Some(p))
    }
}

impl Coeff for K0 {
    fn q(&self) -> u32 {
        self.field().size()
    }
    fn base(&self) -> Gf {
        self.field().clone()
    }
    fn frob_q(&self) -> Self {
        self.frob()
    }
    fn from_fq(&self, a: u32) -> Self {
        K0::constant(self.field(), self.mode(), a)
    }
    fn from_f(&self, x: &RatF) -> Result<Self> {
        Ok(K0::from_t(x, self.mode()))
    }
}
