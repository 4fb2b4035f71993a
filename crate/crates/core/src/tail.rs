//! Truncated Puiseux series over F_{q^m} in t^{−1/e}: the model of C_∞.
//!
//! A `Tail` stores coefficients densely from its leading exponent downwards.
//! Exponents are kept as numerators over the ramification index `e`. The
//! precision `prec` is also a numerator: the element is known modulo terms of
//! exponent ≤ −prec/e. Every operation propagates precision pessimistically.

use crate::error::{Error, Result};
use crate::fq::{embedding, gf, gf_q, Gf};
use crate::poly::RatF;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// A rational exponent num/den with den > 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exp {
    pub num: i128,
    pub den: i128,
}

impl Exp {
    pub fn new(num: i128, den: i128) -> Exp {
        assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_i128(num.abs(), den);
        Exp { num: num / g, den: den / g }
    }
    pub fn int(n: i128) -> Exp {
        Exp { num: n, den: 1 }
    }
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
    pub fn floor(self) -> i128 {
        self.num.div_euclid(self.den)
    }
    pub fn ceil(self) -> i128 {
        -(-self.num).div_euclid(self.den)
    }
    pub fn add(self, o: Exp) -> Exp {
        Exp::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    pub fn sub(self, o: Exp) -> Exp {
        Exp::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
    pub fn mul_int(self, k: i128) -> Exp {
        Exp::new(self.num * k, self.den)
    }
    /// Fractional part in [0, 1).
    pub fn frac(self) -> Exp {
        Exp::new(self.num.rem_euclid(self.den), self.den)
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Exp {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}
impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// Shared data for one (q, m): the base field, its extension and the
/// embedding between them.
#[derive(Debug)]
pub struct TailCtx {
    pub q: u32,
    pub m: u32,
    pub base: Gf,
    pub ext: Gf,
    pub embed: Arc<Vec<u32>>,
}

pub fn tail_ctx(q: u32, m: u32) -> Result<Arc<TailCtx>> {
    static R: OnceLock<Mutex<HashMap<(u32, u32), Arc<TailCtx>>>> = OnceLock::new();
    let reg = R.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = reg.lock().unwrap().get(&(q, m)) {
        return Ok(c.clone());
    }
    let base = gf_q(q)?;
    let ext = gf(base.p(), base.degree() * m)?;
    let embed = embedding(&base, &ext)?;
    let c = Arc::new(TailCtx { q, m, base, ext, embed });
    reg.lock().unwrap().insert((q, m), c.clone());
    Ok(c)
}

#[derive(Clone)]
pub struct Tail {
    ctx: Arc<TailCtx>,
    e: u32,
    top: i128,
    c: Vec<u32>,
    prec: Option<i128>,
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / crate::fq::gcd_u32(a, b) * b
}

impl Tail {
    // ---- construction ----

    pub fn zero(ctx: &Arc<TailCtx>) -> Tail {
        Tail { ctx: ctx.clone(), e: 1, top: 0, c: vec![], prec: None }
    }
    /// Zero known only modulo O(t^{−prec/e}).
    pub fn zero_prec(ctx: &Arc<TailCtx>, e: u32, prec: i128) -> Tail {
        Tail { ctx: ctx.clone(), e, top: 0, c: vec![], prec: Some(prec) }
    }
    pub fn one(ctx: &Arc<TailCtx>) -> Tail {
        Tail::monomial(ctx, 1, 1, 0)
    }
    /// c·t^{num/e} with c ∈ F_{q^m}.
    pub fn monomial(ctx: &Arc<TailCtx>, c: u32, e: u32, num: i128) -> Tail {
        Tail { ctx: ctx.clone(), e, top: num, c: vec![c], prec: None }.normalized()
    }
    /// Embed an F_q constant.
    pub fn from_fq(ctx: &Arc<TailCtx>, a: u32) -> Tail {
        Tail::monomial(ctx, ctx.embed[a as usize], 1, 0)
    }
    /// Expansion of x ∈ F_q(t) at ∞, with ramification index e. Polynomials
    /// are exact; other inputs are expanded modulo O(t^{−prec/e}).
    pub fn from_ratf(ctx: &Arc<TailCtx>, x: &RatF, e: u32, prec: Option<i128>) -> Result<Tail> {
        let emb = |a: u32| ctx.embed[a as usize];
        if x.is_zero() {
            return Ok(match prec {
                Some(p) => Tail::zero_prec(ctx, e, p),
                None => Tail::zero(ctx),
            });
        }
        if let Some(p) = x.as_poly() {
            let d = p.deg().unwrap();
            let mut c = vec![0u32; d * e as usize + 1];
            for i in 0..=d {
                c[(d - i) * e as usize] = emb(p.coeff(i));
            }
            let t = Tail { ctx: ctx.clone(), e, top: (d as i128) * e as i128, c, prec: None };
            return Ok(match prec {
                Some(pr) => t.truncate_abs(pr),
                None => t,
            });
        }
        let prec = prec.ok_or_else(|| {
            Error::PrecisionExhausted(format!("expanding {x} needs a target precision"))
        })?;
        let (num, den) = (x.num(), x.den());
        let (dn, dd) = (num.deg().unwrap(), den.deg().unwrap());
        let top_int = dn as i128 - dd as i128;
        // number of integer-exponent terms with exponent > −prec/e
        let nterms = top_int * e as i128 + prec;
        if nterms <= 0 {
            return Ok(Tail::zero_prec(ctx, e, prec));
        }
        let nterms = ((nterms + e as i128 - 1) / e as i128) as usize;
        let f = &ctx.base;
        let ncoef = |i: usize| if i <= dn { num.coeff(dn - i) } else { 0 };
        let dcoef = |i: usize| if i <= dd { den.coeff(dd - i) } else { 0 };
        let d0inv = f.inv(dcoef(0))?;
        let mut w = vec![0u32; nterms];
        for j in 0..nterms {
            let mut s = ncoef(j);
            for i in 1..=j.min(dd) {
                s = f.sub(s, f.mul(dcoef(i), w[j - i]));
            }
            w[j] = f.mul(s, d0inv);
        }
        let mut c = vec![0u32; (nterms - 1) * e as usize + 1];
        for (j, &a) in w.iter().enumerate() {
            c[j * e as usize] = emb(a);
        }
        Ok(Tail { ctx: ctx.clone(), e, top: top_int * e as i128, c, prec: Some(prec) }.normalized())
    }

    // ---- accessors ----

    pub fn ctx(&self) -> &Arc<TailCtx> {
        &self.ctx
    }
    pub fn ram(&self) -> u32 {
        self.e
    }
    pub fn ext_degree(&self) -> u32 {
        self.ctx.m
    }
    pub fn field(&self) -> &Gf {
        &self.ctx.ext
    }
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
    /// True if no term is known (zero to the stated precision).
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn prec_num(&self) -> Option<i128> {
        self.prec
    }
    /// Precision as a rational exponent P (known modulo O(t^{−P})).
    pub fn prec(&self) -> Option<Exp> {
        self.prec.map(|p| Exp::new(p, self.e as i128))
    }
    /// Leading exponent numerator (over `ram()`), if a term is known.
    pub fn lead_num(&self) -> Option<i128> {
        (!self.c.is_empty()).then_some(self.top)
    }
    /// log_q |x| as an exact rational, if nonzero at this precision.
    pub fn norm_exp(&self) -> Option<Exp> {
        self.lead_num().map(|v| Exp::new(v, self.e as i128))
    }
    pub fn lead_coeff(&self) -> Option<u32> {
        self.c.first().copied()
    }
    pub fn num_terms(&self) -> usize {
        self.c.iter().filter(|&&x| x != 0).count()
    }
    /// Nonzero terms as (exponent numerator, coefficient), descending.
    pub fn terms(&self) -> Vec<(i128, u32)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(j, &a)| (self.top - j as i128, a))
            .collect()
    }
    /// Coefficient of t^{num/e}.
    pub fn coeff_at(&self, num: i128) -> u32 {
        let j = self.top - num;
        if j < 0 || j as usize >= self.c.len() {
            0
        } else {
            self.c[j as usize]
        }
    }

    // ---- normalization ----

    fn normalized(mut self) -> Tail {
        let lead = self.c.iter().position(|&x| x != 0);
        match lead {
            None => {
                self.c.clear();
                self.top = 0;
            }
            Some(k) => {
                if k > 0 {
                    self.c.drain(..k);
                    self.top -= k as i128;
                }
                if self.prec.is_none() {
                    while self.c.last() == Some(&0) {
                        self.c.pop();
                    }
                }
            }
        }
        if let Some(p) = self.prec {
            let keep = self.top + p;
            if keep <= 0 {
                self.c.clear();
                self.top = 0;
            } else if (keep as usize) < self.c.len() {
                self.c.truncate(keep as usize);
            }
            if self.c.is_empty() {
                self.top = 0;
            }
        }
        self
    }

    /// Lower the absolute precision to `prec` (numerator).
    pub fn truncate_abs(&self, prec: i128) -> Tail {
        let p = match self.prec {
            Some(x) => x.min(prec),
            None => prec,
        };
        Tail { prec: Some(p), ..self.clone() }.normalized()
    }
    /// Keep `r` units of relative precision below the leading term.
    pub fn truncate_rel(&self, r: i128) -> Tail {
        match self.lead_num() {
            Some(v) => self.truncate_abs(r - v),
            None => self.clone(),
        }
    }

    /// Change ramification index to a multiple `e2` of the current one.
    pub fn lift_e(&self, e2: u32) -> Tail {
        if e2 == self.e {
            return self.clone();
        }
        assert_eq!(e2 % self.e, 0);
        let k = (e2 / self.e) as usize;
        let mut c = vec![0u32; if self.c.is_empty() { 0 } else { (self.c.len() - 1) * k + 1 }];
        for (j, &a) in self.c.iter().enumerate() {
            c[j * k] = a;
        }
        Tail {
            ctx: self.ctx.clone(),
            e: e2,
            top: self.top * k as i128,
            c,
            prec: self.prec.map(|p| p * k as i128),
        }
    }
    /// Move coefficients to F_{q^{m2}} for a multiple m2 of the current m.
    pub fn lift_m(&self, m2: u32) -> Result<Tail> {
        if m2 == self.ctx.m {
            return Ok(self.clone());
        }
        let ctx2 = tail_ctx(self.ctx.q, m2)?;
        let emb = embedding(&self.ctx.ext, &ctx2.ext)?;
        Ok(Tail {
            ctx: ctx2,
            e: self.e,
            top: self.top,
            c: self.c.iter().map(|&a| emb[a as usize]).collect(),
            prec: self.prec,
        })
    }
    fn align(&self, o: &Tail) -> (Tail, Tail) {
        let (mut a, mut b) = (self.clone(), o.clone());
        if a.ctx.m != b.ctx.m {
            let m = lcm(a.ctx.m, b.ctx.m);
            a = a.lift_m(m).expect("compatible extension");
            b = b.lift_m(m).expect("compatible extension");
        }
        if a.e != b.e {
            let e = lcm(a.e, b.e);
            a = a.lift_e(e);
            b = b.lift_e(e);
        }
        (a, b)
    }

    // ---- arithmetic ----

    pub fn add(&self, o: &Tail) -> Tail {
        if self.e == o.e && self.ctx.m == o.ctx.m {
            self.add_aligned(o, false)
        } else {
            let (a, b) = self.align(o);
            a.add_aligned(&b, false)
        }
    }
    pub fn sub(&self, o: &Tail) -> Tail {
        if self.e == o.e && self.ctx.m == o.ctx.m {
            self.add_aligned(o, true)
        } else {
            let (a, b) = self.align(o);
            a.add_aligned(&b, true)
        }
    }
    fn add_aligned(&self, o: &Tail, negate: bool) -> Tail {
        let f = &self.ctx.ext;
        let prec = match (self.prec, o.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let ob = |x: u32| if negate { f.neg(x) } else { x };
        if self.c.is_empty() {
            let mut r = o.clone();
            if negate {
                r.c.iter_mut().for_each(|x| *x = f.neg(*x));
            }
            r.prec = prec;
            return r.normalized();
        }
        if o.c.is_empty() {
            return Tail { prec, ..self.clone() }.normalized();
        }
        let top = self.top.max(o.top);
        let bot = (self.top - self.c.len() as i128 + 1).min(o.top - o.c.len() as i128 + 1);
        let mut bot = bot;
        if let Some(p) = prec {
            bot = bot.max(-p + 1);
        }
        if bot > top {
            return Tail { ctx: self.ctx.clone(), e: self.e, top: 0, c: vec![], prec };
        }
        let n = (top - bot + 1) as usize;
        let mut c = vec![0u32; n];
        for (j, &a) in self.c.iter().enumerate() {
            let k = top - (self.top - j as i128);
            if (k as usize) < n {
                c[k as usize] = a;
            }
        }
        for (j, &a) in o.c.iter().enumerate() {
            let k = top - (o.top - j as i128);
            if (k as usize) < n {
                c[k as usize] = f.add(c[k as usize], ob(a));
            }
        }
        Tail { ctx: self.ctx.clone(), e: self.e, top, c, prec }.normalized()
    }
    pub fn neg(&self) -> Tail {
        let f = &self.ctx.ext;
        let mut r = self.clone();
        r.c.iter_mut().for_each(|x| *x = f.neg(*x));
        r
    }
    /// Multiply by a constant of F_{q^m}.
    pub fn scale(&self, a: u32) -> Tail {
        let f = &self.ctx.ext;
        let mut r = self.clone();
        r.c.iter_mut().for_each(|x| *x = f.mul(*x, a));
        r.normalized()
    }
    /// Multiply by t^{num/e}.
    pub fn shift(&self, num: i128) -> Tail {
        let mut r = self.clone();
        if !r.c.is_empty() {
            r.top += num;
        }
        r.prec = r.prec.map(|p| p - num);
        r.normalized()
    }

    pub fn mul(&self, o: &Tail) -> Tail {
        if self.e != o.e || self.ctx.m != o.ctx.m {
            let (a, b) = self.align(o);
            return a.mul(&b);
        }
        let f = &self.ctx.ext;
        // leading exponents (an unknown zero is bounded by its precision)
        let vx = self.lead_num().or(self.prec.map(|p| -p));
        let vy = o.lead_num().or(o.prec.map(|p| -p));
        let mut prec: Option<i128> = None;
        let mut upd = |x: Option<i128>| {
            if let Some(x) = x {
                prec = Some(prec.map_or(x, |p: i128| p.min(x)));
            }
        };
        if let (Some(px), Some(vy)) = (self.prec, vy) {
            upd(Some(px - vy));
        }
        if let (Some(py), Some(vx)) = (o.prec, vx) {
            upd(Some(py - vx));
        }
        if let (Some(px), Some(py)) = (self.prec, o.prec) {
            upd(Some(px + py));
        }
        if self.c.is_empty() || o.c.is_empty() {
            return match prec {
                Some(p) => Tail::zero_prec(&self.ctx, self.e, p),
                None => Tail::zero(&self.ctx),
            };
        }
        let top = self.top + o.top;
        let full = self.c.len() + o.c.len() - 1;
        let n = match prec {
            Some(p) => {
                let k = top + p;
                if k <= 0 {
                    return Tail::zero_prec(&self.ctx, self.e, p);
                }
                full.min(k as usize)
            }
            None => full,
        };
        let mut c = vec![0u32; n];
        for (i, &a) in self.c.iter().enumerate().take(n) {
            if a == 0 {
                continue;
            }
            let lim = (n - i).min(o.c.len());
            for (j, &b) in o.c[..lim].iter().enumerate() {
                if b != 0 {
                    c[i + j] = f.add(c[i + j], f.mul(a, b));
                }
            }
        }
        Tail { ctx: self.ctx.clone(), e: self.e, top, c, prec }.normalized()
    }

    /// Multiplicative inverse. Exact multi-term inputs need [`Tail::inv_to`].
    pub fn inv(&self) -> Result<Tail> {
        match self.prec {
            Some(px) => {
                let v = self.lead_num().ok_or_else(|| {
                    Error::PrecisionExhausted("inverting an element indistinguishable from 0".into())
                })?;
                self.inv_with(px + 2 * v)
            }
            None => {
                if self.c.len() == 1 {
                    let f = &self.ctx.ext;
                    Ok(Tail::monomial(&self.ctx, f.inv(self.c[0])?, self.e, -self.top))
                } else if self.c.is_empty() {
                    Err(Error::DivisionByZero)
                } else {
                    Err(Error::PrecisionExhausted(
                        "inverse of an exact series needs a target precision".into(),
                    ))
                }
            }
        }
    }
    /// Inverse to absolute precision `prec` (numerator), capped by what the
    /// input supports.
    pub fn inv_to(&self, prec: i128) -> Result<Tail> {
        let v = self.lead_num().ok_or_else(|| {
            Error::PrecisionExhausted("inverting an element indistinguishable from 0".into())
        })?;
        let p = match self.prec {
            Some(px) => prec.min(px + 2 * v),
            None => prec,
        };
        self.inv_with(p)
    }
    fn inv_with(&self, pr: i128) -> Result<Tail> {
        let f = &self.ctx.ext;
        let v = self.lead_num().ok_or(Error::DivisionByZero)?;
        let top = -v;
        let n = top + pr;
        if n <= 0 {
            return Ok(Tail::zero_prec(&self.ctx, self.e, pr));
        }
        let n = n as usize;
        let c0inv = f.inv(self.c[0])?;
        let a: Vec<u32> = (0..n.min(self.c.len())).map(|j| f.mul(self.c[j], c0inv)).collect();
        let mut w = vec![0u32; n];
        w[0] = 1;
        for j in 1..n {
            let mut s = 0u32;
            for i in 1..=j.min(a.len() - 1) {
                if a[i] != 0 && w[j - i] != 0 {
                    s = f.add(s, f.mul(a[i], w[j - i]));
                }
            }
            w[j] = f.neg(s);
        }
        for x in w.iter_mut() {
            *x = f.mul(*x, c0inv);
        }
        Ok(Tail { ctx: self.ctx.clone(), e: self.e, top, c: w, prec: Some(pr) }.normalized())
    }
    pub fn div(&self, o: &Tail) -> Result<Tail> {
        Ok(self.mul(&o.inv()?))
    }

    /// x^q (Frobenius over F_q; exponents and precision scale by q).
    pub fn frob(&self) -> Tail {
        let q = self.ctx.q as usize;
        let f = &self.ctx.ext;
        if self.c.is_empty() {
            return Tail { prec: self.prec.map(|p| p * q as i128), ..self.clone() };
        }
        let mut c = vec![0u32; (self.c.len() - 1) * q + 1];
        for (j, &a) in self.c.iter().enumerate() {
            c[j * q] = f.pow(a, q as u64);
        }
        Tail {
            ctx: self.ctx.clone(),
            e: self.e,
            top: self.top * q as i128,
            c,
            prec: self.prec.map(|p| p * q as i128),
        }
    }
    /// x^q keeping only `rel` units of relative precision; avoids the dense
    /// blow-up of [`Tail::frob`] when the precision would be discarded anyway.
    pub fn frob_trunc(&self, rel: i128) -> Tail {
        let q = self.ctx.q as i128;
        self.truncate_rel((rel + q - 1) / q).frob().truncate_rel(rel)
    }
    /// x^(q^k).
    pub fn frob_k(&self, k: u32) -> Tail {
        (0..k).fold(self.clone(), |x, _| x.frob())
    }
    pub fn pow(&self, mut n: u64) -> Tail {
        let mut r = Tail::one(&self.ctx);
        let mut b = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b);
            }
        }
        r
    }
    /// x^n for a signed n.
    pub fn powi(&self, n: i64) -> Result<Tail> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            Ok(self.inv()?.pow(n.unsigned_abs()))
        }
    }

    /// y with y^n = x, extending e and m minimally.
    pub fn nth_root(&self, n: u64) -> Result<Tail> {
        if n == 0 {
            return Err(Error::Invalid("0-th root".into()));
        }
        if n == 1 || (self.c.len() == 1 && self.c[0] == 1 && self.top == 0 && self.is_exact()) {
            return Ok(self.clone());
        }
        let v = self.lead_num().ok_or_else(|| {
            Error::PrecisionExhausted("root of an element indistinguishable from 0".into())
        })?;
        let p = self.ctx.base.p() as u64;
        let (mut pa, mut n1) = (1u64, n);
        while n1 % p == 0 {
            n1 /= p;
            pa *= p;
        }
        let mut x = self.clone();
        if pa > 1 {
            x = x.inv_frobenius(pa)?;
        }
        if n1 == 1 {
            return Ok(x);
        }
        // make the leading exponent divisible by n1
        let v = if pa > 1 { x.lead_num().unwrap() } else { v };
        let k = n1 as i128 / gcd_i128(v, n1 as i128);
        if k > 1 {
            x = x.lift_e(x.e * k as u32);
        }
        // leading coefficient root, extending m if needed
        let c0 = x.c[0];
        let mut root = x.ctx.ext.nth_root(c0, n1);
        let mut m = x.ctx.m;
        while root.is_none() {
            m += x.ctx.m;
            if m > x.ctx.m * (n1 as u32).max(2) * 2 {
                return Err(Error::NoRoot(format!("no {n1}-th root of leading coefficient")));
            }
            if let Ok(y) = x.lift_m(m) {
                if let Some(r) = y.ctx.ext.nth_root(y.c[0], n1) {
                    x = y;
                    root = Some(r);
                }
            }
        }
        let r0 = root.unwrap();
        let f = x.ctx.ext.clone();
        let c0inv = f.inv(x.c[0])?;
        let a: Vec<u32> = x.c.iter().map(|&c| f.mul(c, c0inv)).collect();
        let len = a.len();
        let ninv = f.inv(f.from_int(n1 as i64))?;
        let mut b = vec![1u32];
        for j in 1..len {
            b.push(0);
            let pw = series_pow(&f, &b, n1, j);
            b[j] = f.mul(f.sub(a[j], pw[j]), ninv);
        }
        for y in b.iter_mut() {
            *y = f.mul(*y, r0);
        }
        let vtop = x.top / n1 as i128;
        // relative precision is preserved
        let prec = x.prec.map(|px| px + x.top - vtop);
        Ok(Tail { ctx: x.ctx.clone(), e: x.e, top: vtop, c: b, prec }.normalized())
    }

    /// y with y^pa = x for pa a power of p.
    fn inv_frobenius(&self, pa: u64) -> Result<Tail> {
        let mut x = self.lift_e(self.e * pa as u32);
        let f = x.ctx.ext.clone();
        // inverse of a ↦ a^pa on F_{q^m}
        let size = f.size() as u64;
        let mut e = 1u64;
        while (pa * e) % (size - 1) != 1 % (size - 1) && size > 2 {
            e += 1;
        }
        let step = pa as usize;
        let c: Vec<u32> = x.c.iter().step_by(step).map(|&a| f.pow(a, e)).collect();
        // all other coefficients vanish after lifting
        x.top /= pa as i128;
        x.prec = x.prec.map(|p| p / pa as i128);
        Ok(Tail { c, ..x }.normalized())
    }

    // ---- comparison ----

    /// True if x − y is zero to the combined precision.
    pub fn agrees(&self, o: &Tail) -> bool {
        self.sub(o).is_zero()
    }
    /// log_q of the known part of x − y, or None if it vanishes to precision.
    pub fn residual(&self, o: &Tail) -> Option<Exp> {
        self.sub(o).norm_exp()
    }
    /// Exact equality of the stored data (same precision, same terms).
    pub fn identical(&self, o: &Tail) -> bool {
        let (a, b) = self.align(o);
        a.prec == b.prec && a.c == b.c && (a.c.is_empty() || a.top == b.top)
    }

    // ---- rendering ----

    pub fn render(&self) -> String {
        let f = &self.ctx.ext;
        let mut parts = vec![];
        for (num, a) in self.terms() {
            let ex = Exp::new(num, self.e as i128);
            let cs = f.render(a);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            parts.push(if ex.num == 0 {
                cs
            } else if a == 1 {
                format!("t^{{{ex}}}")
            } else {
                format!("{cs}·t^{{{ex}}}")
            });
        }
        if let Some(p) = self.prec() {
            parts.push(format!("O(t^{{{}}})", Exp::new(-p.num, p.den)));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
    pub fn to_json(&self) -> Value {
        let f = &self.ctx.ext;
        json!({
            "q": self.ctx.q,
            "m": self.ctx.m,
            "e": self.e,
            "terms": self
                .terms()
                .into_iter()
                .map(|(n, a)| json!([Exp::new(n, self.e as i128).to_string(), f.render(a)]))
                .collect::<Vec<_>>(),
            "prec": self.prec().map(|p| p.to_string()),
        })
    }
}

fn series_pow(f: &Gf, b: &[u32], mut n: u64, deg: usize) -> Vec<u32> {
    let mul = |x: &[u32], y: &[u32]| -> Vec<u32> {
        let mut r = vec![0u32; deg + 1];
        for (i, &u) in x.iter().enumerate().take(deg + 1) {
            if u == 0 {
                continue;
            }
            for (j, &v) in y.iter().enumerate().take(deg + 1 - i) {
                if v != 0 {
                    r[i + j] = f.add(r[i + j], f.mul(u, v));
                }
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

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn ctx(q: u32) -> Arc<TailCtx> {
        tail_ctx(q, 1).unwrap()
    }

    #[test]
    fn embed_t_has_norm_q() {
        let c = ctx(2);
        let t = Tail::from_ratf(&c, &RatF::t(&c.base), 1, None).unwrap();
        assert_eq!(t.terms(), vec![(1, 1)]);
        assert_eq!(t.norm_exp(), Some(Exp::int(1)));
    }

    #[test]
    fn geometric_series_inverse() {
        let c = ctx(2);
        let f = c.base.clone();
        let x = Tail::from_ratf(&c, &RatF::from_poly(Poly::new(&f, vec![1, 1])), 1, None).unwrap();
        let y = x.inv_to(3).unwrap();
        assert_eq!(y.terms(), vec![(-1, 1), (-2, 1)]);
        assert_eq!(y.prec(), Some(Exp::int(3)));
        assert!(y.render().ends_with("O(t^{-3})"));
        let z = Tail::from_ratf(&c, &RatF::parse(&f, "1/(t+1)").unwrap(), 1, Some(5)).unwrap();
        assert_eq!(z.terms(), vec![(-1, 1), (-2, 1), (-3, 1), (-4, 1)]);
    }

    #[test]
    fn frobenius_of_half_power() {
        let c = ctx(2);
        let x = Tail::monomial(&c, 1, 2, 1).add(&Tail::one(&c));
        let y = x.frob();
        let t1 = Tail::from_ratf(&c, &RatF::parse(&c.base, "t+1").unwrap(), 1, None).unwrap();
        assert!(y.identical(&t1));
    }

    #[test]
    fn roots() {
        let c = ctx(3);
        let t = Tail::from_ratf(&c, &RatF::t(&c.base), 1, None).unwrap();
        let r = t.nth_root(2).unwrap();
        assert_eq!(r.ram(), 2);
        assert_eq!(r.terms(), vec![(1, 1)]);
        let t2 = t.mul(&t);
        assert_eq!(t2.nth_root(2).unwrap().terms(), vec![(1, 1)]);
        assert!(Tail::one(&c).nth_root(5).unwrap().identical(&Tail::one(&c)));
        // -t needs sqrt(2) ∈ F_9
        let mt = t.neg();
        let s = mt.nth_root(2).unwrap();
        assert_eq!(s.ext_degree(), 2);
        assert!(s.mul(&s).agrees(&mt));
        // a series root
        let x = Tail::from_ratf(&c, &RatF::parse(&c.base, "t^2+t+1").unwrap(), 1, Some(10)).unwrap();
        let y = x.nth_root(2).unwrap();
        assert!(y.mul(&y).agrees(&x));
        // p-th root
        let z = Tail::from_ratf(&c, &RatF::parse(&c.base, "t^3+2").unwrap(), 1, None).unwrap();
        let w = z.nth_root(3).unwrap();
        assert!(w.pow(3).agrees(&z));
    }

    #[test]
    fn precision_exhausted_on_unknown_zero() {
        let c = ctx(2);
        let z = Tail::zero_prec(&c, 1, 4);
        assert!(matches!(z.inv(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn mul_precision_is_pessimistic() {
        let c = ctx(3);
        let x = Tail::from_ratf(&c, &RatF::parse(&c.base, "1/(t-1)").unwrap(), 1, Some(6)).unwrap();
        let y = Tail::monomial(&c, 1, 1, 4);
        // exact t^4 times something known mod t^-6 is known mod t^-2
        assert_eq!(x.mul(&y).prec(), Some(Exp::int(2)));
    }
}
