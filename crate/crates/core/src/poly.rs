//! A = F_q[t] and F = F_q(t).

use crate::error::{Error, Result};
use crate::fq::Gf;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Degree of the zero polynomial.
pub const NEG_INF: i64 = i64::MIN;

/// Dense polynomial in t over F_q, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    f: Gf,
    c: Vec<u32>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}

impl Poly {
    pub fn new(f: &Gf, mut c: Vec<u32>) -> Poly {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { f: f.clone(), c }
    }
    pub fn zero(f: &Gf) -> Poly {
        Poly { f: f.clone(), c: vec![] }
    }
    pub fn constant(f: &Gf, a: u32) -> Poly {
        Poly::new(f, vec![a])
    }
    pub fn one(f: &Gf) -> Poly {
        Poly::constant(f, 1)
    }
    pub fn t(f: &Gf) -> Poly {
        Poly::new(f, vec![0, 1])
    }
    pub fn monomial(f: &Gf, a: u32, d: usize) -> Poly {
        let mut c = vec![0; d + 1];
        c[d] = a;
        Poly::new(f, c)
    }
    pub fn field(&self) -> &Gf {
        &self.f
    }
    pub fn coeffs(&self) -> &[u32] {
        &self.c
    }
    pub fn coeff(&self, i: usize) -> u32 {
        *self.c.get(i).unwrap_or(&0)
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c == [1]
    }
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }
    /// Degree with `NEG_INF` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.deg().map_or(NEG_INF, |d| d as i64)
    }
    pub fn lc(&self) -> u32 {
        *self.c.last().unwrap_or(&0)
    }
    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    pub fn scale(&self, a: u32) -> Poly {
        let f = &self.f;
        Poly::new(f, self.c.iter().map(|&x| f.mul(x, a)).collect())
    }
    pub fn shift(&self, d: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; d];
        c.extend_from_slice(&self.c);
        Poly { f: self.f.clone(), c }
    }
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.f.inv(self.lc()).unwrap())
    }

    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly)> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.f;
        let dg = g.c.len() - 1;
        let inv = f.inv(g.lc())?;
        let mut r = self.c.clone();
        if r.len() <= dg {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut q = vec![0u32; r.len() - dg];
        for i in (dg..r.len()).rev() {
            let c = f.mul(r[i], inv);
            if c == 0 {
                continue;
            }
            q[i - dg] = c;
            for j in 0..=dg {
                r[i - dg + j] = f.sub(r[i - dg + j], f.mul(c, g.c[j]));
            }
        }
        r.truncate(dg);
        Ok((Poly::new(f, q), Poly::new(f, r)))
    }
    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divmod(g)?.1)
    }
    pub fn divides(&self, g: &Poly) -> bool {
        !self.is_zero() && g.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }
    /// Exact quotient; panics if the division leaves a remainder.
    pub fn exact_div(&self, g: &Poly) -> Poly {
        let (q, r) = self.divmod(g).expect("nonzero divisor");
        assert!(r.is_zero(), "inexact division {self} / {g}");
        q
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, g: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), g.clone());
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// (g, s, u) with g = s·self + u·other, g monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.f;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut u0, mut u1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let u = &u0 - &(&q * &u1);
            u0 = std::mem::replace(&mut u1, u);
        }
        if r0.is_zero() {
            return (r0, s0, u0);
        }
        let inv = f.inv(r0.lc()).unwrap();
        (r0.scale(inv), s0.scale(inv), u0.scale(inv))
    }

    /// Inverse modulo m, if self is a unit there.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(m).ok()?.xgcd(m);
        g.is_one().then(|| s.rem(m).unwrap())
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut r = Poly::one(&self.f);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        r
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = &self.f;
        self.c.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// self(g(t)).
    pub fn compose(&self, g: &Poly) -> Poly {
        let f = &self.f;
        self.c
            .iter()
            .rev()
            .fold(Poly::zero(f), |acc, &c| &(&acc * g) + &Poly::constant(f, c))
    }

    /// Apply a map to every coefficient (e.g. Frobenius on F_q or an embedding).
    pub fn map_coeffs(&self, target: &Gf, m: impl Fn(u32) -> u32) -> Poly {
        Poly::new(target, self.c.iter().map(|&x| m(x)).collect())
    }

    /// Monic irreducible factors with multiplicity, by trial division.
    pub fn factor(&self) -> Vec<(Poly, u32)> {
        let f = &self.f;
        let mut x = self.monic();
        let mut out = vec![];
        let mut d = 1;
        while x.deg().unwrap_or(0) > 0 {
            if 2 * d > x.deg().unwrap() {
                out.push((x.clone(), 1));
                break;
            }
            for p in monic_irreducibles(f, d) {
                let mut e = 0;
                while p.divides(&x) {
                    x = x.exact_div(&p);
                    e += 1;
                }
                if e > 0 {
                    out.push((p, e));
                }
            }
            d += 1;
        }
        // merge a trailing factor equal to an earlier one
        out.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Poly, u32)> = vec![];
        for (p, e) in out {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => merged.push((p, e)),
            }
        }
        merged
    }

    pub fn is_irreducible(&self) -> bool {
        let fac = self.factor();
        self.degree() > 0 && fac.len() == 1 && fac[0].1 == 1
    }

    /// Canonical text "c0,c1,..." with element indices.
    pub fn to_coeff_string(&self) -> String {
        self.c.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }
    pub fn from_coeff_string(f: &Gf, s: &str) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Poly::zero(f));
        }
        let c = s
            .split(',')
            .map(|x| {
                let v: u32 = x
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient {x:?}")))?;
                if v >= f.size() {
                    return Err(Error::Parse(format!("coefficient {v} outside F_{}", f.size())));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(f, c))
    }
}

/// All monic polynomials of degree d, in index order.
pub fn monic_polys(f: &Gf, d: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = f.size() as u64;
    let count = q.pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push((idx % q) as u32);
            idx /= q;
        }
        c.push(1);
        Poly::new(f, c)
    })
}

/// All polynomials of degree < d, in index order.
pub fn polys_below(f: &Gf, d: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = f.size() as u64;
    let count = q.pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut c = Vec::with_capacity(d);
        for _ in 0..d {
            c.push((idx % q) as u32);
            idx /= q;
        }
        Poly::new(f, c)
    })
}

pub fn monic_irreducibles(f: &Gf, d: usize) -> Vec<Poly> {
    monic_polys(f, d)
        .filter(|p| {
            if d == 1 {
                return true;
            }
            (1..=d / 2).all(|e| monic_polys(f, e).all(|g| !g.divides(p)))
        })
        .collect()
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Poly {
    /// Degree first, then coefficients from the top.
    fn cmp(&self, o: &Self) -> Ordering {
        self.c
            .len()
            .cmp(&o.c.len())
            .then_with(|| self.c.iter().rev().cmp(o.c.iter().rev()))
    }
}

impl<'a> Add for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let f = &self.f;
        let n = self.c.len().max(o.c.len());
        Poly::new(f, (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }
}
impl<'a> Sub for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let f = &self.f;
        let n = self.c.len().max(o.c.len());
        Poly::new(f, (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }
}
impl<'a> Neg for &'a Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = &self.f;
        Poly::new(f, self.c.iter().map(|&x| f.neg(x)).collect())
    }
}
impl<'a> Mul for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let f = &self.f;
        if self.is_zero() || o.is_zero() {
            return Poly::zero(f);
        }
        let mut r = vec![0u32; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, r)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(fm, "0");
        }
        let f = &self.f;
        let mut first = true;
        for i in (0..self.c.len()).rev() {
            let c = self.c[i];
            if c == 0 {
                continue;
            }
            if !first {
                write!(fm, " + ")?;
            }
            first = false;
            let cs = f.render(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            match (i, c) {
                (0, _) => write!(fm, "{cs}")?,
                (1, 1) => write!(fm, "t")?,
                (1, _) => write!(fm, "{cs}*t")?,
                (_, 1) => write!(fm, "t^{i}")?,
                _ => write!(fm, "{cs}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Element of F = F_q(t): num/den with den monic and gcd 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatF {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RatF {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}

impl RatF {
    pub fn new(num: Poly, den: Poly) -> Result<RatF> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = num.field().clone();
        if num.is_zero() {
            return Ok(RatF { num, den: Poly::one(&f) });
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.exact_div(&g), den.exact_div(&g));
        let lc = f.inv(d.lc())?;
        n = n.scale(lc);
        d = d.scale(lc);
        Ok(RatF { num: n, den: d })
    }
    pub fn from_poly(p: Poly) -> RatF {
        let f = p.field().clone();
        RatF { num: p, den: Poly::one(&f) }
    }
    pub fn zero(f: &Gf) -> RatF {
        RatF::from_poly(Poly::zero(f))
    }
    pub fn one(f: &Gf) -> RatF {
        RatF::from_poly(Poly::one(f))
    }
    pub fn constant(f: &Gf, a: u32) -> RatF {
        RatF::from_poly(Poly::constant(f, a))
    }
    pub fn t(f: &Gf) -> RatF {
        RatF::from_poly(Poly::t(f))
    }
    pub fn field(&self) -> &Gf {
        self.num.field()
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }
    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }
    /// deg num − deg den, `NEG_INF` for zero; |x| = q^deg.
    pub fn deg(&self) -> i64 {
        if self.is_zero() {
            NEG_INF
        } else {
            self.num.degree() - self.den.degree()
        }
    }
    /// Leading coefficient of the expansion at infinity.
    pub fn lc(&self) -> u32 {
        self.num.lc()
    }
    pub fn inv(&self) -> Result<RatF> {
        RatF::new(self.den.clone(), self.num.clone())
    }
    pub fn scale(&self, a: u32) -> RatF {
        RatF::new(self.num.scale(a), self.den.clone()).unwrap()
    }
    pub fn pow(&self, e: i64) -> Result<RatF> {
        let b = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(RatF { num: b.num.pow(e), den: b.den.pow(e) })
    }
    /// π-adic valuation for a monic irreducible π.
    pub fn valuation(&self, pi: &Poly) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let v = |x: &Poly| {
            let mut x = x.clone();
            let mut k = 0;
            while pi.divides(&x) {
                x = x.exact_div(pi);
                k += 1;
            }
            k
        };
        Some(v(&self.num) - v(&self.den))
    }
    /// Polynomial part and proper fractional part: x = a + b with deg b < 0.
    pub fn split(&self) -> (Poly, RatF) {
        let (q, r) = self.num.divmod(&self.den).unwrap();
        (q, RatF::new(r, self.den.clone()).unwrap())
    }
    /// Substitute t := s (for a rational s).
    pub fn substitute(&self, s: &RatF) -> Result<RatF> {
        let ev = |p: &Poly| -> RatF {
            p.coeffs().iter().rev().fold(RatF::zero(self.field()), |acc, &c| {
                &(&acc * s) + &RatF::constant(self.field(), c)
            })
        };
        &ev(&self.num) / &ev(&self.den)
    }

    /// Parse expressions like `1/t`, `(t+1)/t^2`, `2t^2 + g`.
    pub fn parse(f: &Gf, s: &str) -> Result<RatF> {
        let toks = tokenize(s)?;
        let mut p = Parser { f, toks: &toks, i: 0 };
        let v = p.expr()?;
        if p.i != toks.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }
}

impl PartialOrd for RatF {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for RatF {
    fn cmp(&self, o: &Self) -> Ordering {
        self.num.cmp(&o.num).then_with(|| self.den.cmp(&o.den))
    }
}

impl<'a> Add for &'a RatF {
    type Output = RatF;
    fn add(self, o: &RatF) -> RatF {
        if self.den == o.den {
            return RatF::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        RatF::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }
}
impl<'a> Sub for &'a RatF {
    type Output = RatF;
    fn sub(self, o: &RatF) -> RatF {
        self + &(-o)
    }
}
impl<'a> Neg for &'a RatF {
    type Output = RatF;
    fn neg(self) -> RatF {
        RatF { num: -&self.num, den: self.den.clone() }
    }
}
impl<'a> Mul for &'a RatF {
    type Output = RatF;
    fn mul(self, o: &RatF) -> RatF {
        if self.is_zero() || o.is_zero() {
            return RatF::zero(self.field());
        }
        // cross-cancel first to keep sizes small
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n = &self.num.exact_div(&g1) * &o.num.exact_div(&g2);
        let d = &self.den.exact_div(&g2) * &o.den.exact_div(&g1);
        let lc = self.field().inv(d.lc()).unwrap();
        RatF { num: n.scale(lc), den: d.scale(lc) }
    }
}
impl<'a> std::ops::Div for &'a RatF {
    type Output = Result<RatF>;
    fn div(self, o: &RatF) -> Result<RatF> {
        Ok(self * &o.inv()?)
    }
}

impl fmt::Display for RatF {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &Poly| {
            let s = p.to_string();
            if s.contains(' ') || s.contains('*') {
                format!("({s})")
            } else {
                s
            }
        };
        if self.is_poly() {
            write!(fm, "{}", self.num)
        } else {
            write!(fm, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    T,
    G,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = vec![];
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => {}
            '0'..='9' => {
                let mut v = 0u64;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    v = v * 10 + cs[i].to_digit(10).unwrap() as u64;
                    i += 1;
                }
                out.push(Tok::Int(v));
                continue;
            }
            't' => out.push(Tok::T),
            'g' => out.push(Tok::G),
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => out.push(Tok::Op(c)),
            _ => return Err(Error::Parse(format!("unexpected {c:?} at {i} in {s:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    f: &'a Gf,
    toks: &'a [Tok],
    i: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }
    fn expr(&mut self) -> Result<RatF> {
        let mut v = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.i += 1;
            let w = self.term()?;
            v = if c == '+' { &v + &w } else { &v - &w };
        }
        Ok(v)
    }
    fn term(&mut self) -> Result<RatF> {
        let mut v = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op('*')) => {
                    self.i += 1;
                    let w = self.unary()?;
                    v = &v * &w;
                }
                Some(Tok::Op('/')) => {
                    self.i += 1;
                    let w = self.unary()?;
                    v = (&v / &w)?;
                }
                Some(Tok::Int(_)) | Some(Tok::T) | Some(Tok::G) | Some(Tok::Op('(')) => {
                    let w = self.power()?;
                    v = &v * &w;
                }
                _ => return Ok(v),
            }
        }
    }
    fn unary(&mut self) -> Result<RatF> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.i += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }
    fn power(&mut self) -> Result<RatF> {
        let b = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.i += 1;
            let neg = matches!(self.peek(), Some(Tok::Op('-')));
            if neg {
                self.i += 1;
            }
            match self.peek().cloned() {
                Some(Tok::Int(e)) => {
                    self.i += 1;
                    return b.pow(if neg { -(e as i64) } else { e as i64 });
                }
                _ => return Err(Error::Parse("expected exponent".into())),
            }
        }
        Ok(b)
    }
    fn atom(&mut self) -> Result<RatF> {
        let f = self.f;
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.i += 1;
                Ok(RatF::constant(f, f.from_int((v % f.p() as u64) as i64)))
            }
            Some(Tok::T) => {
                self.i += 1;
                Ok(RatF::t(f))
            }
            Some(Tok::G) => {
                self.i += 1;
                if f.degree() == 1 {
                    return Err(Error::Parse("'g' needs a non-prime field".into()));
                }
                Ok(RatF::constant(f, f.gen()))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.i += 1;
                Ok(v)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::gf;

    fn p(f: &Gf, c: &[u32]) -> Poly {
        Poly::new(f, c.to_vec())
    }

    #[test]
    fn divmod_by_t() {
        let f = gf(2, 1).unwrap();
        let (q, r) = p(&f, &[1, 0, 1]).divmod(&Poly::t(&f)).unwrap();
        assert_eq!(q, Poly::t(&f));
        assert_eq!(r, Poly::one(&f));
        assert_eq!(p(&f, &[1]).divmod(&Poly::zero(&f)), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcd_is_monic() {
        let f = gf(3, 1).unwrap();
        // t^2 - 1 and t - 1
        let a = p(&f, &[2, 0, 1]);
        let b = p(&f, &[2, 1]);
        assert_eq!(a.gcd(&b), p(&f, &[2, 1]));
        assert_eq!(a.gcd(&b).to_string(), "t + 2");
    }

    #[test]
    fn zero_degree_is_sentinel() {
        let f = gf(2, 1).unwrap();
        assert_eq!(Poly::zero(&f).degree(), NEG_INF);
        assert_eq!(Poly::one(&f).degree(), 0);
    }

    #[test]
    fn factor_small() {
        let f = gf(2, 1).unwrap();
        let x = p(&f, &[0, 0, 1, 1]); // t^2 (t+1)
        let fac = x.factor();
        assert_eq!(fac, vec![(Poly::t(&f), 2), (p(&f, &[1, 1]), 1)]);
        assert_eq!(monic_irreducibles(&f, 2), vec![p(&f, &[1, 1, 1])]);
        assert_eq!(monic_irreducibles(&gf(3, 1).unwrap(), 2).len(), 3);
    }

    #[test]
    fn xgcd_and_inverse_mod() {
        let f = gf(3, 1).unwrap();
        let m = p(&f, &[0, 0, 1]);
        let a = p(&f, &[1, 1]);
        let i = a.inv_mod(&m).unwrap();
        assert!((&a * &i).rem(&m).unwrap().is_one());
        assert!(Poly::t(&f).inv_mod(&m).is_none());
    }

    #[test]
    fn parse_rational_expressions() {
        let f = gf(3, 1).unwrap();
        let x = RatF::parse(&f, "(t+1)/t^2").unwrap();
        assert_eq!(x.deg(), -1);
        assert_eq!(RatF::parse(&f, "2t^2 - 1").unwrap().to_string(), "2*t^2 + 2");
        assert_eq!(RatF::parse(&f, "t^-1").unwrap(), RatF::t(&f).inv().unwrap());
        assert!(RatF::parse(&f, "1/0").is_err());
        let f4 = gf(2, 2).unwrap();
        assert_eq!(RatF::parse(&f4, "g*t + 1").unwrap().num().coeffs(), &[1, 2]);
    }

    #[test]
    fn coeff_string_round_trip() {
        let f = gf(3, 1).unwrap();
        let x = p(&f, &[1, 0, 2]);
        assert_eq!(Poly::from_coeff_string(&f, &x.to_coeff_string()).unwrap(), x);
    }

    #[test]
    fn valuations() {
        let f = gf(2, 1).unwrap();
        let x = RatF::parse(&f, "t^3/(t+1)").unwrap();
        assert_eq!(x.valuation(&Poly::t(&f)), Some(3));
        assert_eq!(x.valuation(&p(&f, &[1, 1])), Some(-1));
    }
}
