//! The coefficient field k0: either F_q(t) itself, or F_q(λ) with t = −λ^{q−1}.

use crate::error::{Error, Result};
use crate::fq::Gf;
use crate::poly::{Poly, RatF};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Elements are rational functions in t.
    Plain,
    /// Elements are rational functions in λ, and t means −λ^{q−1}.
    Extended,
}

/// Element of k0, stored as a rational function in the mode's generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct K0 {
    mode: Mode,
    v: RatF,
}

impl fmt::Debug for K0 {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}

impl fmt::Display for K0 {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.v.to_string();
        match self.mode {
            Mode::Plain => write!(fm, "{s}"),
            Mode::Extended => write!(fm, "{}", s.replace('t', "λ")),
        }
    }
}

impl K0 {
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn field(&self) -> &Gf {
        self.v.field()
    }
    /// The underlying rational function in the mode's generator.
    pub fn raw(&self) -> &RatF {
        &self.v
    }
    pub fn from_raw(mode: Mode, v: RatF) -> K0 {
        K0 { mode, v }
    }
    pub fn zero(f: &Gf, mode: Mode) -> K0 {
        K0 { mode, v: RatF::zero(f) }
    }
    pub fn one(f: &Gf, mode: Mode) -> K0 {
        K0 { mode, v: RatF::one(f) }
    }
    pub fn constant(f: &Gf, mode: Mode, a: u32) -> K0 {
        K0 { mode, v: RatF::constant(f, a) }
    }
    /// −λ^{q−1}, as a polynomial in λ.
    fn t_in_lambda(f: &Gf) -> RatF {
        let q = f.size() as usize;
        RatF::from_poly(Poly::monomial(f, f.neg(1), q - 1))
    }
    /// The image of x ∈ F_q(t) in k0; a ring homomorphism.
    pub fn from_t(x: &RatF, mode: Mode) -> K0 {
        match mode {
            Mode::Plain => K0 { mode, v: x.clone() },
            Mode::Extended => K0 {
                mode,
                v: x.substitute(&Self::t_in_lambda(x.field())).expect("t ↦ −λ^{q−1} is injective"),
            },
        }
    }
    pub fn t(f: &Gf, mode: Mode) -> K0 {
        K0::from_t(&RatF::t(f), mode)
    }
    /// λ with λ^{q−1} = −t; only available in extended mode.
    pub fn lambda(f: &Gf, mode: Mode) -> Result<K0> {
        match mode {
            Mode::Extended => Ok(K0 { mode, v: RatF::t(f) }),
            Mode::Plain => Err(Error::Mode("λ needs the extended coefficient field".into())),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.v.is_one()
    }
    /// The F_q constant, if the element is one.
    pub fn as_constant(&self) -> Option<u32> {
        let p = self.v.as_poly()?;
        match p.deg() {
            None => Some(0),
            Some(0) => Some(p.lc()),
            _ => None,
        }
    }
    fn check(&self, o: &K0) {
        assert_eq!(self.mode, o.mode, "mixed coefficient-field modes");
    }
    pub fn add(&self, o: &K0) -> K0 {
        self.check(o);
        K0 { mode: self.mode, v: &self.v + &o.v }
    }
    pub fn sub(&self, o: &K0) -> K0 {
        self.check(o);
        K0 { mode: self.mode, v: &self.v - &o.v }
    }
    pub fn neg(&self) -> K0 {
        K0 { mode: self.mode, v: -&self.v }
    }
    pub fn mul(&self, o: &K0) -> K0 {
        self.check(o);
        K0 { mode: self.mode, v: &self.v * &o.v }
    }
    pub fn scale(&self, a: u32) -> K0 {
        K0 { mode: self.mode, v: self.v.scale(a) }
    }
    pub fn inv(&self) -> Result<K0> {
        Ok(K0 { mode: self.mode, v: self.v.inv()? })
    }
    pub fn div(&self, o: &K0) -> Result<K0> {
        self.check(o);
        Ok(K0 { mode: self.mode, v: (&self.v / &o.v)? })
    }
    pub fn pow(&self, e: i64) -> Result<K0> {
        Ok(K0 { mode: self.mode, v: self.v.pow(e)? })
    }
    /// x ↦ x^q (Frobenius relative to F_q).
    pub fn frob(&self) -> K0 {
        let q = self.field().size() as i64;
        self.pow(q).expect("nonnegative power")
    }

    /// An n-th root inside k0, if one exists.
    pub fn root_in_field(&self, n: u64) -> Result<K0> {
        Ok(K0 { mode: self.mode, v: ratf_root(&self.v, n)? })
    }
}

fn poly_pth_root(x: &Poly) -> Option<Poly> {
    let f = x.field();
    let p = f.p() as usize;
    let cs = x.coeffs();
    if cs.iter().enumerate().any(|(i, &c)| c != 0 && i % p != 0) {
        return None;
    }
    // inverse Frobenius on F_q: a^(1/p) = a^(q/p)
    let e = f.size() as u64 / p as u64;
    let c: Vec<u32> = cs.iter().step_by(p).map(|&a| f.pow(a, e)).collect();
    Some(Poly::new(f, c))
}

/// Monic n-th root (p ∤ n) of a monic polynomial, by coefficient matching at
/// infinity.
fn poly_monic_root(x: &Poly, n: u64) -> Option<Poly> {
    let f = x.field();
    let d = x.deg()?;
    if d as u64 % n != 0 {
        return None;
    }
    let dr = d / n as usize;
    // reversed coefficients: F(s) = s^d x(1/s) = 1 + a_1 s + ...
    let a: Vec<u32> = (0..=d).map(|i| x.coeff(d - i)).collect();
    let ninv = f.inv(f.from_int(n as i64)).ok()?;
    let mut b = vec![1u32];
    for j in 1..=dr {
        b.push(0);
        let pw = trunc_pow(f, &b, n, j);
        b[j] = f.mul(f.sub(a[j], pw[j]), ninv);
    }
    let root = Poly::new(f, b.iter().rev().cloned().collect());
    (root.pow(n) == *x).then_some(root)
}

fn trunc_pow(f: &Gf, b: &[u32], mut n: u64, deg: usize) -> Vec<u32> {
    let mul = |x: &[u32], y: &[u32]| -> Vec<u32> {
        let mut r = vec![0u32; deg + 1];
        for (i, &u) in x.iter().enumerate().take(deg + 1) {
            if u == 0 {
                continue;
            }
            for (j, &v) in y.iter().enumerate().take(deg + 1 - i) {
                r[i + j] = f.add(r[i + j], f.mul(u, v));
            }
        }
        r
    };
    let mut r = vec![0u32; deg + 1];
    r[0] = 1;
    let mut base = b.to_vec();
    base.resize(deg + 1, 0);
    while n > 0 {
        if n & 1 == 1 {
            r = mul(&r, &base);
        }
        base = mul(&base, &base);
        n >>= 1;
    }
    r
}

fn ratf_root(x: &RatF, n: u64) -> Result<RatF> {
    let f = x.field().clone();
    let none = || Error::NoRoot(format!("{x} has no {n}-th root in F_{}({})", f.size(), "t"));
    if n == 0 {
        return Err(Error::Invalid("0-th root".into()));
    }
    if x.is_zero() {
        return Ok(x.clone());
    }
    let p = f.p() as u64;
    let (mut num, mut den) = (x.num().clone(), x.den().clone());
    let mut m = n;
    while m % p == 0 {
        num = poly_pth_root(&num).ok_or_else(none)?;
        den = poly_pth_root(&den).ok_or_else(none)?;
        m /= p;
    }
    if m > 1 {
        let lc = num.lc();
        let r = f.nth_root(lc, m).ok_or_else(none)?;
        let nm = poly_monic_root(&num.monic(), m).ok_or_else(none)?;
        let dm = poly_monic_root(&den, m).ok_or_else(none)?;
        num = nm.scale(r);
        den = dm;
    }
    let r = RatF::new(num, den)?;
    debug_assert_eq!(r.pow(n as i64).unwrap(), *x);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::gf;

    #[test]
    fn minus_t_has_no_square_root_over_f3() {
        let f = gf(3, 1).unwrap();
        let x = K0::from_t(&(-&RatF::t(&f)), Mode::Plain);
        assert!(matches!(x.root_in_field(2), Err(Error::NoRoot(_))));
    }

    #[test]
    fn lambda_power_is_minus_t() {
        for q in [2u32, 3, 4] {
            let f = crate::fq::gf_q(q).unwrap();
            let l = K0::lambda(&f, Mode::Extended).unwrap();
            let t = K0::t(&f, Mode::Extended);
            assert!(l.pow(q as i64 - 1).unwrap().add(&t).is_zero());
        }
        let f = gf(2, 1).unwrap();
        assert!(K0::lambda(&f, Mode::Plain).is_err());
    }

    #[test]
    fn roots_of_powers() {
        let f = gf(3, 1).unwrap();
        let x = RatF::parse(&f, "(t+1)^2/(t^2+1)^2").unwrap();
        let r = ratf_root(&x, 2).unwrap();
        assert_eq!(r.pow(2).unwrap(), x);
        let y = RatF::parse(&f, "t^3 + 1").unwrap(); // (t+1)^3 in char 3
        assert_eq!(ratf_root(&y, 3).unwrap(), RatF::parse(&f, "t+1").unwrap());
        assert!(ratf_root(&RatF::t(&f), 2).is_err());
    }
}
