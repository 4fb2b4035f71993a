//! Goss polynomials G_k(X, Y_1, Y_2, ...) over F_p.
//!
//! For an F_q-subspace H with exponential e_H(z) = Σ e_{H,q^i} z^{q^i},
//! G_k(e_H(z)^{-1}, e_{H,q}, e_{H,q^2}, ...) = Σ_{h∈H} (z − h)^{-k}.

use crate::algebra::RingLike;
use crate::error::{Error, Result};
use crate::fq::{embedding, gf, prime_power, Gf};
use crate::poly::Poly;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Sparse polynomial over F_p. Variable 0 is X, variable i ≥ 1 is Y_i.
/// Exponent vectors carry no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    p: u32,
    terms: BTreeMap<Vec<u32>, u32>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl MPoly {
    pub fn zero(p: u32) -> MPoly {
        MPoly { p, terms: BTreeMap::new() }
    }
    pub fn one(p: u32) -> MPoly {
        MPoly::monomial(p, 1, vec![])
    }
    /// X.
    pub fn x(p: u32) -> MPoly {
        MPoly::monomial(p, 1, vec![1])
    }
    /// Y_i, i ≥ 1.
    pub fn y(p: u32, i: usize) -> MPoly {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        MPoly::monomial(p, 1, e)
    }
    pub fn monomial(p: u32, c: u32, e: Vec<u32>) -> MPoly {
        let mut terms = BTreeMap::new();
        if c % p != 0 {
            terms.insert(trim(e), c % p);
        }
        MPoly { p, terms }
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &u32)> {
        self.terms.iter()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, &c) in &o.terms {
            let s = (r.terms.get(e).copied().unwrap_or(0) + c) % self.p;
            if s == 0 {
                r.terms.remove(e);
            } else {
                r.terms.insert(e.clone(), s);
            }
        }
        r
    }
    pub fn scale(&self, c: u32) -> MPoly {
        let c = c % self.p;
        if c == 0 {
            return MPoly::zero(self.p);
        }
        let terms = self.terms.iter().map(|(e, &a)| (e.clone(), a * c % self.p)).collect();
        MPoly { p: self.p, terms }
    }
    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.scale(self.p - 1))
    }
    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut acc: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &o.terms {
                let n = e1.len().max(e2.len());
                let e: Vec<u32> = (0..n)
                    .map(|i| e1.get(i).copied().unwrap_or(0) + e2.get(i).copied().unwrap_or(0))
                    .collect();
                *acc.entry(e).or_insert(0) += c1 as u64 * c2 as u64;
            }
        }
        let p = self.p as u64;
        let terms = acc
            .into_iter()
            .filter_map(|(e, c)| (c % p != 0).then_some((e, (c % p) as u32)))
            .collect();
        MPoly { p: self.p, terms }
    }
    /// Multiply by X.
    pub fn mul_x(&self) -> MPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut e = e.clone();
                if e.is_empty() {
                    e.push(0);
                }
                e[0] += 1;
                (e, c)
            })
            .collect();
        MPoly { p: self.p, terms }
    }
    pub fn pow(&self, mut n: u64) -> MPoly {
        let mut r = MPoly::one(self.p);
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
    /// ∂/∂X.
    pub fn deriv_x(&self) -> MPoly {
        let mut r = MPoly::zero(self.p);
        for (e, &c) in &self.terms {
            let a = e.first().copied().unwrap_or(0);
            if a == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[0] -= 1;
            r = r.add(&MPoly::monomial(self.p, c * (a % self.p), e2));
        }
        r
    }
    /// Degree in X.
    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.first().copied().unwrap_or(0)).max()
    }
    /// X-adic order.
    pub fn ord_x(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.first().copied().unwrap_or(0)).min()
    }
    /// The coefficient of X^d as a polynomial in the Y's.
    pub fn coeff_x(&self, d: u32) -> MPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.first().copied().unwrap_or(0) == d)
            .map(|(e, &c)| {
                let mut e = e.clone();
                if !e.is_empty() {
                    e[0] = 0;
                }
                (trim(e), c)
            })
            .collect();
        MPoly { p: self.p, terms }
    }
    /// Largest i with Y_i present (0 if none).
    pub fn max_y(&self) -> usize {
        self.terms.keys().map(|e| e.len().saturating_sub(1)).max().unwrap_or(0)
    }
    /// Evaluate at X = x, Y_i = ys[i-1].
    pub fn eval<R: RingLike>(&self, x: &R, ys: &[R]) -> R {
        let mut cache: HashMap<(usize, u32), R> = HashMap::new();
        let mut power = |v: usize, n: u32| -> R {
            cache
                .entry((v, n))
                .or_insert_with(|| if v == 0 { x.pow_r(n as u64) } else { ys[v - 1].pow_r(n as u64) })
                .clone()
        };
        let mut s = x.zero_like();
        for (e, &c) in &self.terms {
            let mut m = x.int_like(c as i64);
            for (v, &n) in e.iter().enumerate() {
                if n > 0 {
                    m = m.mul_r(&power(v, n));
                }
            }
            s = s.add_r(&m);
        }
        s
    }
    /// Terms in canonical order: descending X-degree, then descending Y-exponents.
    pub fn canonical_terms(&self) -> Vec<(Vec<u32>, u32)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, &c)| (e.clone(), c)).collect();
        let n = v.iter().map(|(e, _)| e.len()).max().unwrap_or(0);
        let pad = |e: &Vec<u32>| -> Vec<u32> { (0..n).map(|i| e.get(i).copied().unwrap_or(0)).collect() };
        v.sort_by(|a, b| pad(&b.0).cmp(&pad(&a.0)));
        v
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .canonical_terms()
            .into_iter()
            .map(|(e, c)| {
                let mut factors = vec![];
                if c != 1 || e.iter().all(|&n| n == 0) {
                    factors.push(c.to_string());
                }
                for (v, &n) in e.iter().enumerate() {
                    if n == 0 {
                        continue;
                    }
                    let name = if v == 0 { "X".to_string() } else { format!("Y{v}") };
                    factors.push(if n == 1 { name } else { format!("{name}^{n}") });
                }
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The k-th Goss polynomial for q, from G_1 = X and
/// G_k = X (G_{k−1} + Σ_{q^i<k} Y_i G_{k−q^i}).
pub fn goss(k: usize, q: u32) -> Result<Arc<MPoly>> {
    if k == 0 {
        return Err(Error::Invalid("Goss polynomials start at k = 1".into()));
    }
    let (p, _) = prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Arc<MPoly>>>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(|| Mutex::new(HashMap::new())).lock().unwrap();
    // index 0 holds G_0 = 0
    let list = cache.entry(q).or_insert_with(|| vec![Arc::new(MPoly::zero(p))]);
    while list.len() <= k {
        let n = list.len();
        let g = if n == 1 {
            MPoly::x(p)
        } else {
            let mut s = (*list[n - 1]).clone();
            let mut qi = q as usize;
            let mut i = 1;
            while qi < n {
                s = s.add(&MPoly::y(p, i).mul(&list[n - qi]));
                qi *= q as usize;
                i += 1;
            }
            s.mul_x()
        };
        list.push(Arc::new(g));
    }
    Ok(list[k].clone())
}

/// Vanishing order of G_k at X = 0.
pub fn ord_x(k: usize, q: u32) -> Result<u32> {
    Ok(goss(k, q)?.ord_x().expect("G_k is nonzero"))
}

/// A finite F_q-subspace of F_{q^m}.
#[derive(Clone, Debug)]
pub struct FiniteSubspace {
    pub base: Gf,
    pub ext: Gf,
    pub elements: Vec<u32>,
}

impl FiniteSubspace {
    /// The F_q-span of the given elements of F_{q^m}.
    pub fn span(q: u32, m: u32, gens: &[u32]) -> Result<FiniteSubspace> {
        let base = crate::fq::gf_q(q)?;
        let ext = gf(base.p(), base.degree() * m)?;
        let emb = embedding(&base, &ext)?;
        let mut el = vec![0u32];
        for &g in gens {
            if g >= ext.size() {
                return Err(Error::Invalid(format!("{g} is not an element of F_{}", ext.size())));
            }
            if el.contains(&g) {
                continue;
            }
            let mut next = vec![];
            for a in base.elements() {
                let ga = ext.mul(g, emb[a as usize]);
                next.extend(el.iter().map(|&h| ext.add(h, ga)));
            }
            next.sort();
            next.dedup();
            el = next;
        }
        Ok(FiniteSubspace { base, ext, elements: el })
    }
    /// A subset given element by element; it must be an F_q-subspace.
    pub fn from_elements(q: u32, m: u32, elements: &[u32]) -> Result<FiniteSubspace> {
        let s = FiniteSubspace::span(q, m, elements)?;
        let mut given = elements.to_vec();
        given.sort();
        given.dedup();
        if given != s.elements {
            return Err(Error::Invalid("the set is not an F_q-subspace".into()));
        }
        Ok(s)
    }
    /// Π_{h∈H} (z − h).
    pub fn vanishing_poly(&self) -> Poly {
        self.elements.iter().fold(Poly::one(&self.ext), |acc, &h| {
            &acc * &Poly::new(&self.ext, vec![self.ext.neg(h), 1])
        })
    }
    /// (c, [e_{H,q}, e_{H,q^2}, ...]) where e_H = c · Π(z − h).
    pub fn exp_coeffs(&self) -> (u32, Vec<u32>) {
        let pz = self.vanishing_poly();
        let c = self.ext.inv(pz.coeff(1)).expect("H is reduced, so z divides P exactly once");
        let q = self.base.size() as usize;
        let mut out = vec![];
        let mut qi = q;
        while qi <= pz.degree() as usize {
            out.push(self.ext.mul(c, pz.coeff(qi)));
            qi *= q;
        }
        (c, out)
    }
}

/// Exact check of Σ_{h∈H}(z−h)^{−k} = G_k(e_H(z)^{−1}, e_{H,q}, ...) after
/// multiplying both sides by P(z)^k, P = Π(z − h).
pub fn verify_partial_fraction(h: &FiniteSubspace, k: usize) -> Result<bool> {
    let f = &h.ext;
    let q = h.base.size();
    let pz = h.vanishing_poly();
    let lhs = h.elements.iter().fold(Poly::zero(f), |acc, &x| {
        let lin = Poly::new(f, vec![f.neg(x), 1]);
        let cof = pz.exact_div(&lin);
        &acc + &cof.pow(k as u64)
    });
    let (c, alphas) = h.exp_coeffs();
    let g = goss(k, q)?;
    let cinv = f.inv(c)?;
    let mut rhs = Poly::zero(f);
    for (e, &coef) in g.terms() {
        let a = e.first().copied().unwrap_or(0);
        // X^a P^k = c^{-a} P^{k-a}
        let mut scal = f.mul(f.from_int(coef as i64), f.pow(cinv, a as u64));
        for (i, &n) in e.iter().enumerate().skip(1) {
            let y = alphas.get(i - 1).copied().unwrap_or(0);
            scal = f.mul(scal, f.pow(y, n as u64));
        }
        rhs = &rhs + &pz.pow(k as u64 - a as u64).scale(scal);
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_goss_polynomials() {
        for q in [2u32, 3, 4] {
            let p = prime_power(q).unwrap().0;
            assert_eq!(*goss(1, q).unwrap(), MPoly::x(p));
            for k in 1..=q as usize {
                assert_eq!(*goss(k, q).unwrap(), MPoly::x(p).pow(k as u64));
                assert_eq!(ord_x(k, q).unwrap(), k as u32);
            }
            // X (X^q + Y_1 X), worked out by hand from the recursion
            let x = MPoly::x(p);
            let want = x.mul(&x.pow(q as u64).add(&MPoly::y(p, 1).mul(&x)));
            assert_eq!(*goss(q as usize + 1, q).unwrap(), want);
            assert_eq!(ord_x(q as usize + 1, q).unwrap(), 2);
        }
        assert_eq!(goss(3, 2).unwrap().to_string(), "X^3 + X^2*Y1");
        assert!(goss(0, 2).is_err());
        assert!(goss(1, 6).is_err());
    }

    #[test]
    fn variables_are_bounded_by_log_k() {
        for q in [2u32, 3] {
            for k in 1..60usize {
                let g = goss(k, q).unwrap();
                // Y_i appears only when q^i < k
                let mut bound = 0;
                while (q as usize).pow(bound as u32 + 1) < k {
                    bound += 1;
                }
                assert!(g.max_y() <= bound, "q={q} k={k}");
                assert_eq!(g.deg_x(), Some(k as u32));
                assert_eq!(g.coeff_x(k as u32), MPoly::one(g.p()));
            }
        }
    }

    #[test]
    fn partial_fractions_small() {
        let h0 = FiniteSubspace::span(2, 1, &[]).unwrap();
        assert_eq!(h0.elements, vec![0]);
        assert!(verify_partial_fraction(&h0, 3).unwrap());
        let h = FiniteSubspace::span(3, 1, &[1]).unwrap();
        assert_eq!(h.exp_coeffs(), (2, vec![2])); // e_H = z − z^3
        for k in 1..=6 {
            assert!(verify_partial_fraction(&h, k).unwrap());
        }
        assert!(FiniteSubspace::from_elements(3, 1, &[0, 1]).is_err());
    }

    #[test]
    fn wrong_sign_is_detected() {
        // flipping the Y_1 sign in G_{q+1} breaks the identity for H = F_3
        let h = FiniteSubspace::span(3, 1, &[1]).unwrap();
        let f = &h.ext;
        let pz = h.vanishing_poly();
        let (c, al) = h.exp_coeffs();
        let k = 4u64;
        let lhs = h.elements.iter().fold(Poly::zero(f), |acc, &x| {
            &acc + &pz.exact_div(&Poly::new(f, vec![f.neg(x), 1])).pow(k)
        });
        let cinv = f.inv(c).unwrap();
        let bad = &pz.pow(0).scale(f.pow(cinv, 4)) - &pz.pow(2).scale(f.mul(al[0], f.pow(cinv, 2)));
        assert_ne!(lhs, bad);
        assert!(verify_partial_fraction(&h, 4).unwrap());
    }

    #[test]
    fn frobenius_and_derivative_identities() {
        for q in [2u32, 3, 4] {
            let p = prime_power(q).unwrap().0;
            for k in 1..=12usize {
                assert_eq!(*goss(p as usize * k, q).unwrap(), goss(k, q).unwrap().pow(p as u64));
            }
            let x2 = MPoly::x(p).pow(2);
            for k in 1..=30usize {
                let lhs = x2.mul(&goss(k, q).unwrap().deriv_x());
                assert_eq!(lhs, goss(k + 1, q).unwrap().scale(k as u32), "q={q} k={k}");
            }
        }
    }

    #[test]
    fn partial_fractions_up_to_q_squared() {
        for q in [2u32, 3, 4] {
            let g = gf(prime_power(q).unwrap().0, prime_power(q).unwrap().1 * 2).unwrap();
            let spaces = [
                FiniteSubspace::span(q, 1, &[]).unwrap(),
                FiniteSubspace::span(q, 1, &[1]).unwrap(),
                FiniteSubspace::span(q, 2, &[1, g.gen()]).unwrap(),
            ];
            assert_eq!(spaces[2].elements.len(), (q * q) as usize);
            for h in &spaces {
                for k in 1..=(q * q) as usize {
                    assert!(verify_partial_fraction(h, k).unwrap(), "q={q} |H|={} k={k}", h.elements.len());
                }
            }
        }
    }
}
