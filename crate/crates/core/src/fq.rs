//! Finite fields F_{p^n} with log/exp tables.
//!
//! An element is a `u32` index: the base-p digits of the index are the
//! coefficients of the element as a polynomial in the generator `g`
//! (least significant digit = constant term). `0` is zero and `1` is one.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

pub type Gf = Arc<FiniteField>;

#[derive(Debug)]
pub struct FiniteField {
    p: u32,
    n: u32,
    size: u32,
    /// Monic defining polynomial over F_p, ascending coefficients, length n+1.
    modulus: Vec<u32>,
    add: Vec<u32>,
    neg: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for FiniteField {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.n == o.n
    }
}
impl Eq for FiniteField {}

impl std::hash::Hash for FiniteField {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        (self.p, self.n).hash(h);
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

// --- small helpers on polynomials over F_p (ascending Vec<u32>) ---

fn pp_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn pp_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let r: Vec<u32> = r.into_iter().map(|x| x as u32).collect();
    pp_rem(r, m, p)
}

fn pp_inv_mod_p(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn pp_rem(a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let mut a = pp_trim(a);
    let m = pp_trim(m.to_vec());
    let dm = m.len() - 1;
    let inv = pp_inv_mod_p(m[dm], p);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top] as u64 * inv as u64 % p as u64;
        if c != 0 {
            for i in 0..=dm {
                let s = top - dm + i;
                a[s] = ((a[s] as u64 + (p as u64 - c) * m[i] as u64) % p as u64) as u32;
            }
        }
        a.pop();
        a = pp_trim(a);
    }
    a
}

fn pp_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    pp_trim(
        (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn pp_gcd(a: Vec<u32>, b: Vec<u32>, p: u32) -> Vec<u32> {
    let (mut a, mut b) = (pp_trim(a), pp_trim(b));
    while !b.is_empty() {
        let r = pp_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// x^(p^k) mod m.
fn pp_frob_x(m: &[u32], p: u32, k: u32) -> Vec<u32> {
    let mut x = pp_rem(vec![0, 1], m, p);
    for _ in 0..k {
        let mut r = vec![1];
        let mut b = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                r = pp_mulmod(&r, &b, m, p);
            }
            b = pp_mulmod(&b, &b, m, p);
            e >>= 1;
        }
        x = r;
    }
    x
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial over F_p.
pub fn is_irreducible_fp(m: &[u32], p: u32) -> bool {
    let n = (m.len() - 1) as u32;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    if pp_sub(&pp_frob_x(m, p, n), &x, p) != Vec::<u32>::new() {
        return false;
    }
    for d in prime_divisors(n) {
        let h = pp_sub(&pp_frob_x(m, p, n / d), &x, p);
        if pp_gcd(m.to_vec(), h, p).len() != 1 {
            return false;
        }
    }
    true
}

fn digits(mut x: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Lexicographically least monic irreducible of degree n over F_p, where
/// candidates are ordered by the index of their non-leading coefficients.
fn least_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = p.pow(n);
    for idx in 0..count {
        let mut m = digits(idx, p, n);
        m.push(1);
        if is_irreducible_fp(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FiniteField {
    fn build(p: u32, n: u32) -> Result<FiniteField> {
        if !is_prime(p) || n == 0 {
            return Err(Error::Invalid(format!("not a prime power: {p}^{n}")));
        }
        let size = p
            .checked_pow(n)
            .filter(|&s| s <= 1 << 16)
            .ok_or_else(|| Error::Budget(format!("field of size {p}^{n} too large")))?;
        let modulus = least_irreducible(p, n);
        assert!(is_irreducible_fp(&modulus, p));
        let mulraw = |a: u32, b: u32| -> u32 {
            let r = pp_mulmod(&digits(a, p, n), &digits(b, p, n), &modulus, p);
            let mut r = r;
            r.resize(n as usize, 0);
            undigits(&r, p)
        };
        // search for a primitive element
        let order = size - 1;
        let pd = prime_divisors(order);
        let powraw = |a: u32, mut e: u32| -> u32 {
            let (mut r, mut b) = (1u32, a);
            while e > 0 {
                if e & 1 == 1 {
                    r = mulraw(r, b);
                }
                b = mulraw(b, b);
                e >>= 1;
            }
            r
        };
        let gen = if size == 2 {
            1
        } else {
            (2..size)
                .find(|&a| pd.iter().all(|&d| powraw(a, order / d) != 1))
                .expect("multiplicative group is cyclic")
        };
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; size as usize];
        let mut x = 1u32;
        for i in 0..order as usize {
            exp[i] = x;
            exp[i + order as usize] = x;
            log[x as usize] = i as u32;
            x = mulraw(x, gen);
        }
        let digadd = |a: u32, b: u32| -> u32 {
            let (da, db) = (digits(a, p, n), digits(b, p, n));
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            undigits(&s, p)
        };
        let tab = size <= 1024;
        let add = if tab {
            let mut t = vec![0u32; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = digadd(a, b);
                }
            }
            t
        } else {
            vec![]
        };
        let neg = (0..size)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, n).iter().map(|&x| (p - x) % p).collect();
                undigits(&d, p)
            })
            .collect();
        Ok(FiniteField { p, n, size, modulus, add, neg, exp, log })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.n
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if !self.add.is_empty() {
            return self.add[(a * self.size + b) as usize];
        }
        let (da, db) = (digits(a, self.p, self.n), digits(b, self.p, self.n));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }
    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let o = self.size - 1;
        Ok(self.exp[((o - self.log[a as usize]) % o) as usize])
    }
    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let o = (self.size - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % o)) % o) as usize]
    }
    /// Image of an integer in the prime field.
    pub fn from_int(&self, c: i64) -> u32 {
        c.rem_euclid(self.p as i64) as u32
    }
    /// The generator `g` (root of the defining polynomial), or 1 when n = 1.
    pub fn gen(&self) -> u32 {
        if self.n == 1 {
            1
        } else {
            self.p
        }
    }
    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> u32 {
        self.exp[1]
    }
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.size
    }
    /// Least (by index) solution x of x^n = a, if any.
    pub fn nth_root(&self, a: u32, n: u64) -> Option<u32> {
        (0..self.size).find(|&x| self.pow(x, n) == a)
    }
    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u32) -> u32 {
        let o = self.size - 1;
        let l = self.log[a as usize];
        o / gcd_u32(o, l)
    }

    /// Render as a polynomial in `g`, e.g. `g+2` or `2`.
    pub fn render(&self, a: u32) -> String {
        if self.n == 1 {
            return a.to_string();
        }
        let d = digits(a, self.p, self.n);
        let mut s = String::new();
        for i in (0..self.n as usize).rev() {
            if d[i] == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('+');
            }
            match (i, d[i]) {
                (0, c) => write!(s, "{c}").unwrap(),
                (1, 1) => s.push('g'),
                (1, c) => write!(s, "{c}g").unwrap(),
                (e, 1) => write!(s, "g^{e}").unwrap(),
                (e, c) => write!(s, "{c}g^{e}").unwrap(),
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    /// Parse the output of [`FiniteField::render`] (also accepts spaces).
    pub fn parse(&self, s: &str) -> Result<u32> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty field element".into()));
        }
        let mut d = vec![0u32; self.n as usize];
        for term in s.split('+') {
            let (coef, e) = if let Some(pos) = term.find('g') {
                let c = &term[..pos];
                let c = if c.is_empty() { 1 } else { parse_u32(c)? };
                let rest = &term[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else if let Some(x) = rest.strip_prefix('^') {
                    parse_u32(x)?
                } else {
                    return Err(Error::Parse(format!("bad term {term:?}")));
                };
                (c, e)
            } else {
                (parse_u32(term)?, 0)
            };
            if e >= self.n {
                return Err(Error::Parse(format!("exponent {e} out of range in {s:?}")));
            }
            d[e as usize] = (d[e as usize] + coef) % self.p;
        }
        Ok(undigits(&d, self.p))
    }
}

fn parse_u32(s: &str) -> Result<u32> {
    s.parse::<u32>()
        .map_err(|_| Error::Parse(format!("expected integer, got {s:?}")))
}

pub fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Gf>> {
    static R: OnceLock<Mutex<HashMap<(u32, u32), Gf>>> = OnceLock::new();
    R.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The field F_{p^n}, built once and cached.
pub fn gf(p: u32, n: u32) -> Result<Gf> {
    if let Some(f) = registry().lock().unwrap().get(&(p, n)) {
        return Ok(f.clone());
    }
    let f = Arc::new(FiniteField::build(p, n)?);
    Ok(registry().lock().unwrap().entry((p, n)).or_insert(f).clone())
}

/// F_q for a prime power q.
pub fn gf_q(q: u32) -> Result<Gf> {
    let (p, e) = prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
    gf(p, e)
}

pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut x, mut e) = (q, 0);
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    (x == 1).then_some((p, e))
}

fn embed_registry() -> &'static Mutex<HashMap<(u32, u32, u32), Arc<Vec<u32>>>> {
    static R: OnceLock<Mutex<HashMap<(u32, u32, u32), Arc<Vec<u32>>>>> = OnceLock::new();
    R.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Embedding table F_{p^a} -> F_{p^b} (a | b): the generator of the source is
/// sent to the least root of its defining polynomial in the target.
///
/// Embeddings are fixed per pair; only the chains F_q -> F_{q^m} with m <= 2
/// are exercised, where compatibility is automatic.
pub fn embedding(from: &Gf, to: &Gf) -> Result<Arc<Vec<u32>>> {
    if from.p != to.p || to.n % from.n != 0 {
        return Err(Error::Invalid(format!(
            "no embedding F_{}^{} -> F_{}^{}",
            from.p, from.n, to.p, to.n
        )));
    }
    let key = (from.p, from.n, to.n);
    if let Some(t) = embed_registry().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let eval = |x: u32| -> u32 {
        // evaluate the source modulus at x in the target
        from.modulus
            .iter()
            .rev()
            .fold(0, |acc, &c| to.add(to.mul(acc, x), c))
    };
    let root = if from.n == 1 {
        1
    } else {
        (0..to.size).find(|&x| eval(x) == 0).expect("subfield root exists")
    };
    let table: Vec<u32> = (0..from.size)
        .map(|a| {
            let d = digits(a, from.p, from.n);
            d.iter().rev().fold(0, |acc, &c| to.add(to.mul(acc, root), c))
        })
        .collect();
    let table = Arc::new(table);
    embed_registry().lock().unwrap().insert(key, table.clone());
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_generator_cubed_is_one() {
        let f = gf(2, 2).unwrap();
        let g = f.gen();
        assert_eq!(f.mul(g, f.mul(g, g)), 1);
        // g^2 + g + 1 = 0
        assert_eq!(f.add(f.add(f.mul(g, g), g), 1), 0);
    }

    #[test]
    fn least_irreducibles_are_standard() {
        assert_eq!(gf(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(gf(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(gf(2, 4).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(gf(3, 3).unwrap().modulus(), &[1, 2, 0, 1]);
    }

    #[test]
    fn inverse_of_one_and_zero() {
        let f = gf(3, 2).unwrap();
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn exhaustive_field_axioms_small() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3), (5, 1)] {
            let f = gf(p, n).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in [0, 1, f.size() - 1] {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                    // Frobenius is additive
                    let q = p as u64;
                    assert_eq!(f.pow(f.add(a, b), q), f.add(f.pow(a, q), f.pow(b, q)));
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        for (p, a, b) in [(2, 1, 2), (2, 2, 4), (3, 1, 2), (3, 2, 4), (2, 1, 3)] {
            let (fa, fb) = (gf(p, a).unwrap(), gf(p, b).unwrap());
            let t = embedding(&fa, &fb).unwrap();
            for x in fa.elements() {
                for y in fa.elements() {
                    assert_eq!(t[fa.mul(x, y) as usize], fb.mul(t[x as usize], t[y as usize]));
                    assert_eq!(t[fa.add(x, y) as usize], fb.add(t[x as usize], t[y as usize]));
                }
            }
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let f = gf(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.parse(&f.render(a)).unwrap(), a);
        }
    }

    #[test]
    fn roots_search_the_group() {
        let f = gf(3, 1).unwrap();
        // -1 = 2 is not a square in F_3
        assert_eq!(f.nth_root(2, 2), None);
        assert_eq!(f.nth_root(1, 2), Some(1));
        let f9 = gf(3, 2).unwrap();
        let i = f9.nth_root(f9.neg(1), 2).unwrap();
        assert_eq!(f9.mul(i, i), f9.neg(1));
    }
}
