//! Lattices L ⊂ F^r, cosets v+L, period points ω ∈ Ω^r and the pairing xω.
//!
//! Vectors are row vectors. A lattice is given by a basis matrix whose rows
//! span it over A.

use crate::error::{Error, Result};
use crate::fq::Gf;
use crate::poly::{polys_below, Poly, RatF, NEG_INF};
use crate::tail::{Exp, Tail, TailCtx};
use serde_json::{json, Value};
use std::sync::Arc;

pub type Vector = Vec<RatF>;
pub type Matrix = Vec<Vec<RatF>>;

/// Dense linear algebra over F.
pub mod mat {
    use super::*;

    pub fn identity(f: &Gf, r: usize) -> Matrix {
        (0..r)
            .map(|i| (0..r).map(|j| if i == j { RatF::one(f) } else { RatF::zero(f) }).collect())
            .collect()
    }
    pub fn diag(d: &[RatF]) -> Matrix {
        let f = d[0].field();
        let r = d.len();
        (0..r)
            .map(|i| (0..r).map(|j| if i == j { d[i].clone() } else { RatF::zero(f) }).collect())
            .collect()
    }
    pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
        a.iter().map(|row| vec_mul(row, b)).collect()
    }
    /// Row vector times matrix.
    pub fn vec_mul(x: &[RatF], b: &Matrix) -> Vector {
        let f = b[0][0].field();
        (0..b[0].len())
            .map(|j| {
                x.iter()
                    .zip(b)
                    .fold(RatF::zero(f), |acc, (xi, row)| &acc + &(xi * &row[j]))
            })
            .collect()
    }
    pub fn vec_add(x: &[RatF], y: &[RatF]) -> Vector {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }
    pub fn vec_sub(x: &[RatF], y: &[RatF]) -> Vector {
        x.iter().zip(y).map(|(a, b)| a - b).collect()
    }
    pub fn vec_scale(a: &RatF, x: &[RatF]) -> Vector {
        x.iter().map(|b| a * b).collect()
    }
    pub fn det(a: &Matrix) -> RatF {
        let f = a[0][0].field().clone();
        let n = a.len();
        let mut m = a.clone();
        let mut d = RatF::one(&f);
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return RatF::zero(&f);
            };
            if piv != c {
                m.swap(piv, c);
                d = -&d;
            }
            d = &d * &m[c][c];
            let inv = m[c][c].inv().unwrap();
            for i in c + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let fac = &m[i][c] * &inv;
                for j in c..n {
                    let s = &fac * &m[c][j];
                    m[i][j] = &m[i][j] - &s;
                }
            }
        }
        d
    }
    pub fn inverse(a: &Matrix) -> Result<Matrix> {
        let f = a[0][0].field().clone();
        let n = a.len();
        let mut m: Matrix = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { RatF::one(&f) } else { RatF::zero(&f) }));
                r
            })
            .collect();
        for c in 0..n {
            let piv = (c..n)
                .find(|&i| !m[i][c].is_zero())
                .ok_or_else(|| Error::Invalid("singular matrix".into()))?;
            m.swap(piv, c);
            let inv = m[c][c].inv()?;
            for j in 0..2 * n {
                m[c][j] = &m[c][j] * &inv;
            }
            for i in 0..n {
                if i == c || m[i][c].is_zero() {
                    continue;
                }
                let fac = m[i][c].clone();
                for j in 0..2 * n {
                    let s = &fac * &m[c][j];
                    m[i][j] = &m[i][j] - &s;
                }
            }
        }
        Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
    }
    pub fn render(a: &Matrix) -> Vec<Vec<String>> {
        a.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

/// A coset v + L with L free of rank r, given by basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCoset {
    f: Gf,
    basis: Matrix,
    v: Vector,
}

impl LatticeCoset {
    pub fn new(basis: Matrix, v: Vector) -> Result<LatticeCoset> {
        let r = basis.len();
        if r == 0 || basis.iter().any(|row| row.len() != r) || v.len() != r {
            return Err(Error::Invalid("basis must be square and match v".into()));
        }
        if mat::det(&basis).is_zero() {
            return Err(Error::Invalid("basis has zero determinant".into()));
        }
        Ok(LatticeCoset { f: basis[0][0].field().clone(), basis, v })
    }
    pub fn lattice(basis: Matrix) -> Result<LatticeCoset> {
        let f = basis[0][0].field().clone();
        let r = basis.len();
        LatticeCoset::new(basis, vec![RatF::zero(&f); r])
    }
    /// A^r.
    pub fn standard(f: &Gf, r: usize) -> LatticeCoset {
        LatticeCoset::lattice(mat::identity(f, r)).unwrap()
    }
    pub fn field(&self) -> &Gf {
        &self.f
    }
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
    pub fn v(&self) -> &Vector {
        &self.v
    }
    pub fn with_v(&self, v: Vector) -> LatticeCoset {
        LatticeCoset { v, ..self.clone() }
    }
    /// The lattice L itself (v = 0).
    pub fn as_lattice(&self) -> LatticeCoset {
        self.with_v(vec![RatF::zero(&self.f); self.rank()])
    }
    /// Coordinates of x with respect to the basis.
    pub fn coords(&self, x: &[RatF]) -> Vector {
        mat::vec_mul(x, &mat::inverse(&self.basis).unwrap())
    }
    pub fn in_lattice(&self, x: &[RatF]) -> bool {
        self.coords(x).iter().all(|c| c.is_poly())
    }
    pub fn contains(&self, x: &[RatF]) -> bool {
        self.in_lattice(&mat::vec_sub(x, &self.v))
    }
    pub fn v_in_lattice(&self) -> bool {
        self.in_lattice(&self.v)
    }
    /// vγ + Lγ.
    pub fn transform(&self, g: &Matrix) -> LatticeCoset {
        LatticeCoset::new(mat::mul(&self.basis, g), mat::vec_mul(&self.v, g)).unwrap()
    }
    /// a·(v + L).
    pub fn scale(&self, a: &RatF) -> LatticeCoset {
        LatticeCoset::new(
            self.basis.iter().map(|r| mat::vec_scale(a, r)).collect(),
            mat::vec_scale(a, &self.v),
        )
        .unwrap()
    }
    /// log_p [L : L'] for a sublattice L'.
    pub fn index_exp_of(&self, sub: &LatticeCoset) -> Result<i64> {
        if !sub.basis.iter().all(|row| self.in_lattice(row)) {
            return Err(Error::Invalid("not a sublattice".into()));
        }
        let d = mat::det(&mat::mul(&sub.basis, &mat::inverse(&self.basis)?));
        Ok(d.deg() * self.f.degree() as i64)
    }
    /// [L : L'] for a sublattice L', as a count.
    pub fn index_of(&self, sub: &LatticeCoset) -> Result<u64> {
        let e = self.index_exp_of(sub)?;
        Ok((self.f.p() as u64).pow(e as u32))
    }

    /// Canonical key of x modulo L (fractional parts of the coordinates).
    pub fn reduce_key(&self, x: &[RatF]) -> Vec<RatF> {
        self.coords(x).into_iter().map(|c| c.split().1).collect()
    }
    /// Representatives of the cosets of a sublattice L' inside v + L,
    /// as translation vectors v' with v' + L' ⊂ v + L.
    pub fn sub_cosets(&self, sub: &LatticeCoset) -> Result<Vec<Vector>> {
        let n = self.index_of(sub)? as usize;
        let trans = mat::mul(&sub.basis, &mat::inverse(&self.basis)?);
        let d = mat::det(&trans).deg().max(0) as usize;
        let f = &self.f;
        let r = self.rank();
        let mut seen = std::collections::BTreeSet::new();
        let mut out = vec![];
        let cands: Vec<Poly> = polys_below(f, d.max(1)).collect();
        let mut idx = vec![0usize; r];
        loop {
            let c: Vector = idx.iter().map(|&i| RatF::from_poly(cands[i].clone())).collect();
            let x = mat::vec_add(&self.v, &mat::vec_mul(&c, &self.basis));
            let key = sub.reduce_key(&mat::vec_sub(&x, &sub.v));
            if seen.insert(key) {
                out.push(x);
            }
            // odometer
            let mut k = 0;
            while k < r {
                idx[k] += 1;
                if idx[k] < cands.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
        }
        if out.len() != n {
            return Err(Error::Invalid(format!("found {} cosets, expected {n}", out.len())));
        }
        Ok(out)
    }

    /// Nonzero x ∈ v+L with every coordinate of degree ≤ D, in lexicographic
    /// order of coefficient vectors.
    pub fn enumerate_coset(&self, dmax: i64) -> Enumeration {
        let f = &self.f;
        let r = self.rank();
        let inv = mat::inverse(&self.basis).unwrap();
        let beta = inv.iter().flatten().map(|x| x.deg()).max().unwrap_or(0).max(0);
        let dv = self.v.iter().map(|x| x.deg()).max().unwrap_or(NEG_INF);
        let warning = (dv > dmax).then(|| format!("v has degree {dv} > D = {dmax}"));
        let cdeg = (dmax.max(dv) + beta).max(0) as usize + 1;
        let cands: Vec<Poly> = polys_below(f, cdeg).collect();
        let mut out = vec![];
        let mut idx = vec![0usize; r];
        loop {
            let c: Vector = idx.iter().map(|&i| RatF::from_poly(cands[i].clone())).collect();
            let x = mat::vec_add(&self.v, &mat::vec_mul(&c, &self.basis));
            if x.iter().all(|xi| xi.deg() <= dmax) && x.iter().any(|xi| !xi.is_zero()) {
                out.push(x);
            }
            let mut k = 0;
            while k < r {
                idx[k] += 1;
                if idx[k] < cands.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
        }
        out.sort();
        Enumeration { points: out, warning }
    }

    /// Representatives of (N⁻¹L ∖ L)/L, in index order of their coordinates.
    pub fn coset_reps(&self, n: &Poly) -> Result<Vec<Vector>> {
        Ok(self.torsion_coords(n, false)?.into_iter().map(|c| self.from_coords_over(n, &c)).collect())
    }
    /// Representatives modulo F_q^× as well: the first nonzero coordinate
    /// (with respect to the basis, numerators mod N) is monic.
    pub fn projective_reps(&self, n: &Poly) -> Result<Vec<Vector>> {
        Ok(self.torsion_coords(n, true)?.into_iter().map(|c| self.from_coords_over(n, &c)).collect())
    }
    fn from_coords_over(&self, n: &Poly, c: &[Poly]) -> Vector {
        let nn = RatF::from_poly(n.clone());
        let cv: Vector = c.iter().map(|a| (&RatF::from_poly(a.clone()) / &nn).unwrap()).collect();
        mat::vec_mul(&cv, &self.basis)
    }
    /// Coordinate numerators (deg < deg N), nonzero, optionally normalized.
    pub fn torsion_coords(&self, n: &Poly, projective: bool) -> Result<Vec<Vec<Poly>>> {
        let d = n.deg().ok_or(Error::DivisionByZero)?;
        if d == 0 {
            return Err(Error::Invalid("N = A has no torsion representatives".into()));
        }
        let f = &self.f;
        let r = self.rank();
        let res: Vec<Poly> = polys_below(f, d).collect();
        let total = res.len().pow(r as u32);
        let mut out = vec![];
        for mut idx in 1..total {
            // coordinate 0 is the most significant digit, so the order is
            // lexicographic in (c_0, ..., c_{r-1})
            let mut c = vec![Poly::zero(f); r];
            for k in (0..r).rev() {
                c[k] = res[idx % res.len()].clone();
                idx /= res.len();
            }
            if projective {
                let first = c.iter().find(|x| !x.is_zero()).unwrap();
                if !first.is_monic() {
                    continue;
                }
            }
            out.push(c);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "basis": mat::render(&self.basis),
            "v": self.v.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        })
    }
    /// Parse `{"basis": [[..]], "v": [..]}` with rational-function strings.
    pub fn from_json(f: &Gf, val: &Value) -> Result<LatticeCoset> {
        let parse = |x: &Value| -> Result<RatF> {
            match x {
                Value::String(s) => RatF::parse(f, s),
                Value::Number(n) => RatF::parse(f, &n.to_string()),
                _ => Err(Error::Parse(format!("expected a rational-function string, got {x}"))),
            }
        };
        let basis = val
            .get("basis")
            .and_then(|b| b.as_array())
            .ok_or_else(|| Error::Parse("missing \"basis\" array".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("basis rows must be arrays".into()))?
                    .iter()
                    .map(parse)
                    .collect::<Result<Vector>>()
            })
            .collect::<Result<Matrix>>()?;
        let r = basis.len();
        let v = match val.get("v") {
            Some(Value::Array(a)) => a.iter().map(parse).collect::<Result<Vector>>()?,
            None => vec![RatF::zero(f); r],
            _ => return Err(Error::Parse("\"v\" must be an array".into())),
        };
        LatticeCoset::new(basis, v)
    }
}

pub struct Enumeration {
    pub points: Vec<Vector>,
    pub warning: Option<String>,
}

/// A point of Ω^r: r entries in C_∞ whose leading exponents are pairwise
/// distinct modulo 1 (the certificate), or an uncertified point.
#[derive(Clone, Debug)]
pub struct OmegaPoint {
    entries: Vec<Tail>,
    certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointVariant {
    Standard,
    /// ω_i + 1 for i < r: lower-order perturbation keeping the certificate.
    Perturbed,
}

impl OmegaPoint {
    /// ω_i = ξ·t^{(r−i)/r}, with ξ = 1.
    pub fn standard(ctx: &Arc<TailCtx>, r: usize, variant: PointVariant) -> OmegaPoint {
        let e = r as u32;
        let entries = (1..=r)
            .map(|i| {
                let w = Tail::monomial(ctx, 1, e, (r - i) as i128);
                if variant == PointVariant::Perturbed && i < r {
                    w.add(&Tail::one(ctx))
                } else {
                    w
                }
            })
            .collect();
        OmegaPoint::new(entries)
    }
    /// Any entries; certified iff leading exponents are distinct mod 1.
    pub fn new(entries: Vec<Tail>) -> OmegaPoint {
        let cert = Self::certificate_of(&entries);
        OmegaPoint { entries, certified: cert.is_some() }
    }
    fn certificate_of(entries: &[Tail]) -> Option<Vec<Exp>> {
        let ex: Vec<Exp> = entries.iter().map(|w| w.norm_exp()).collect::<Option<_>>()?;
        for i in 0..ex.len() {
            for j in 0..i {
                if ex[i].frac() == ex[j].frac() {
                    return None;
                }
            }
        }
        Some(ex)
    }
    pub fn rank(&self) -> usize {
        self.entries.len()
    }
    pub fn entries(&self) -> &[Tail] {
        &self.entries
    }
    pub fn xi(&self) -> &Tail {
        self.entries.last().unwrap()
    }
    pub fn ctx(&self) -> &Arc<TailCtx> {
        self.entries[0].ctx()
    }
    pub fn is_certified(&self) -> bool {
        self.certified
    }
    /// Leading exponents log_q|ω_i| (the certificate when certified).
    pub fn valuations(&self) -> Vec<Exp> {
        self.entries.iter().map(|w| w.norm_exp().expect("nonzero entry")).collect()
    }
    /// The common ramification index needed for pairings.
    pub fn ram(&self) -> u32 {
        self.entries.iter().fold(1, |a, w| {
            let b = w.ram();
            a / crate::fq::gcd_u32(a, b) * b
        })
    }
    /// γω for γ over F; entries of infinite expansion are computed modulo
    /// O(t^{−prec}).
    pub fn transformed(&self, g: &Matrix, prec: i128) -> OmegaPoint {
        let e = self.ram();
        let entries = g
            .iter()
            .map(|row| {
                let mut s = Tail::zero(self.ctx());
                for (a, w) in row.iter().zip(&self.entries) {
                    if a.is_zero() {
                        continue;
                    }
                    let lead = w.lead_num().unwrap_or(0) * (e / w.ram()) as i128;
                    let at = Tail::from_ratf(self.ctx(), a, e, Some(prec * e as i128 + lead)).unwrap();
                    s = s.add(&at.mul(w));
                }
                s
            })
            .collect();
        OmegaPoint::new(entries)
    }
    /// (ω_1 (1 + t^s), ω_2, ..., ω_r): the limit schedule toward the cusp.
    pub fn toward_cusp(&self, s: i64) -> OmegaPoint {
        let mut entries = self.entries.clone();
        let w1 = &entries[0];
        entries[0] = w1.add(&w1.shift(s as i128 * w1.ram() as i128));
        OmegaPoint::new(entries)
    }
    /// (ω_2, ..., ω_r).
    pub fn tail_point(&self) -> OmegaPoint {
        OmegaPoint::new(self.entries[1..].to_vec())
    }

    /// log_q|xω|, exact when certified.
    pub fn norm_exp(&self, x: &[RatF]) -> Option<Exp> {
        let vals = self.valuations();
        x.iter()
            .zip(&vals)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| Exp::int(a.deg() as i128).add(*v))
            .max()
    }
    /// The coordinate where |x_i ω_i| is maximal.
    pub fn lead_pos(&self, x: &[RatF]) -> Option<usize> {
        let vals = self.valuations();
        x.iter()
            .zip(&vals)
            .enumerate()
            .filter(|(_, (a, _))| !a.is_zero())
            .max_by_key(|(_, (a, v))| Exp::int(a.deg() as i128).add(**v))
            .map(|(i, _)| i)
    }

    /// xω to absolute precision O(t^{−prec}) (prec a rational exponent).
    pub fn pairing(&self, x: &[RatF], prec: Exp) -> Tail {
        let e = self.ram();
        let pnum = (prec.num * e as i128 + prec.den - 1) / prec.den;
        let mut s = Tail::zero(self.ctx()).lift_e(e);
        let all_poly = x.iter().all(|a| a.is_poly()) && self.entries.iter().all(|w| w.is_exact());
        for (a, w) in x.iter().zip(&self.entries) {
            if a.is_zero() {
                continue;
            }
            let lead = w.lead_num().unwrap_or(0) * (e / w.ram()) as i128;
            let at = if a.is_poly() {
                Tail::from_ratf(self.ctx(), a, e, None).unwrap()
            } else {
                Tail::from_ratf(self.ctx(), a, e, Some(pnum + lead)).unwrap()
            };
            s = s.add(&at.mul(w));
        }
        if all_poly {
            s
        } else {
            s.truncate_abs(pnum)
        }
    }
    pub fn to_json(&self) -> Value {
        json!({
            "entries": self.entries.iter().map(|w| w.render()).collect::<Vec<_>>(),
            "certificate": if self.certified {
                Value::from(self.valuations().iter().map(|v| v.to_string()).collect::<Vec<_>>())
            } else {
                Value::Null
            },
        })
    }
}

/// Data of the u-expansion at the standard cusp for a coset v + L.
#[derive(Clone, Debug)]
pub struct UFrame {
    /// L' with {0} × L' = L ∩ ({0} × F^{r−1}), as a lattice in F^{r−1}.
    pub l_prime: LatticeCoset,
    /// Generator of L_1, the image of L under the first coordinate; equal to
    /// the first entry of `l1_lift`.
    pub l1: RatF,
    /// A lift of the generator of L_1 to L.
    pub l1_lift: Vector,
    /// Λ' = {λ' : (v_1 + L_1)λ' ⊂ L'}.
    pub lambda_prime: LatticeCoset,
    /// Generator h of the fractional ideal A v_1 + L_1.
    pub h: RatF,
    pub v1_in_l1: bool,
    /// When v_1 ∈ L_1: the translation v' with v ∈ (0, v') + L.
    pub v_prime: Option<Vector>,
    /// When v_1 ∉ L_1: the element of least degree in v_1 + L_1.
    pub x1: Option<RatF>,
    /// Whether that x_1 generates A v_1 + L_1.
    pub x1_generates: bool,
}

fn ideal_gcd(a: &RatF, b: &RatF) -> RatF {
    // generator of aA + bA for fractional a, b (not both zero)
    if a.is_zero() {
        return monic_ratf(b);
    }
    if b.is_zero() {
        return monic_ratf(a);
    }
    let d = &(a.den() * b.den()).monic();
    let an = &(a.num() * &d.exact_div(a.den()));
    let bn = &(b.num() * &d.exact_div(b.den()));
    RatF::new(an.gcd(bn), d.clone()).unwrap()
}

fn monic_ratf(a: &RatF) -> RatF {
    let f = a.field();
    a.scale(f.inv(a.lc()).unwrap())
}

impl UFrame {
    pub fn new(c: &LatticeCoset) -> Result<UFrame> {
        let r = c.rank();
        if r < 2 {
            return Err(Error::Invalid("u-expansion needs rank ≥ 2".into()));
        }
        let f = c.field().clone();
        // clear denominators, then Euclid on the first column by row operations
        let mut den = Poly::one(&f);
        for x in c.basis().iter().flatten() {
            let g = den.gcd(x.den());
            den = (&den * x.den()).exact_div(&g);
        }
        let dr = RatF::from_poly(den.clone());
        let mut rows: Vec<Vec<Poly>> = c
            .basis()
            .iter()
            .map(|row| row.iter().map(|x| (x * &dr).as_poly().unwrap().clone()).collect())
            .collect();
        loop {
            let nz: Vec<usize> = (0..r).filter(|&i| !rows[i][0].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][0].deg()).unwrap();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let (qt, _) = rows[i][0].divmod(&rows[piv][0]).unwrap();
                let pr = rows[piv].clone();
                for (x, y) in rows[i].iter_mut().zip(&pr) {
                    *x = &*x - &(&qt * y);
                }
            }
        }
        let piv = (0..r).find(|&i| !rows[i][0].is_zero()).unwrap();
        rows.swap(0, piv);
        let to_f = |p: &Poly| (&RatF::from_poly(p.clone()) / &dr).unwrap();
        let l1 = to_f(&rows[0][0]);
        let l1_lift: Vector = rows[0].iter().map(to_f).collect();
        let lp: Matrix = rows[1..].iter().map(|row| row[1..].iter().map(to_f).collect()).collect();
        let l_prime = LatticeCoset::lattice(lp)?;
        let v1 = c.v()[0].clone();
        let ratio = (&v1 / &l1)?;
        let v1_in_l1 = ratio.is_poly();
        let h = ideal_gcd(&v1, &l1);
        let hinv = h.inv()?;
        let lambda_prime = l_prime.scale(&hinv);
        let (v_prime, x1, x1_generates) = if v1_in_l1 {
            let vp = mat::vec_sub(c.v(), &mat::vec_scale(&ratio, &l1_lift));
            debug_assert!(vp[0].is_zero());
            (Some(vp[1..].to_vec()), None, false)
        } else {
            // x_1 = v_1 reduced modulo L_1
            let (_, frac) = ratio.split();
            let x1 = &frac * &l1;
            let gen = (&x1 / &h)?;
            let ok = gen.as_poly().map(|p| p.deg() == Some(0)).unwrap_or(false);
            (None, Some(x1), ok)
        };
        Ok(UFrame { l_prime, l1, l1_lift, lambda_prime, h, v1_in_l1, v_prime, x1, x1_generates })
    }
    /// log_p [L' : x_1 Λ'].
    pub fn index_exp(&self, x1: &RatF) -> Result<i64> {
        self.l_prime.index_exp_of(&self.lambda_prime.scale(x1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::gf;
    use crate::tail::tail_ctx;

    fn rf(f: &Gf, s: &str) -> RatF {
        RatF::parse(f, s).unwrap()
    }

    #[test]
    fn standard_points() {
        let ctx = tail_ctx(2, 1).unwrap();
        let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
        assert_eq!(w.entries()[0].render(), "t^{1/2}");
        assert_eq!(w.entries()[1].render(), "1");
        let w3 = OmegaPoint::standard(&ctx, 3, PointVariant::Standard);
        assert_eq!(w3.valuations(), vec![Exp::new(2, 3), Exp::new(1, 3), Exp::int(0)]);
        let p = OmegaPoint::standard(&ctx, 2, PointVariant::Perturbed);
        assert_eq!(p.entries()[0].render(), "t^{1/2} + 1");
        assert!(p.is_certified());
        assert_eq!(p.valuations(), vec![Exp::new(1, 2), Exp::int(0)]);
    }

    #[test]
    fn pairing_examples() {
        let ctx = tail_ctx(2, 1).unwrap();
        let f = ctx.base.clone();
        let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
        let x = vec![RatF::one(&f), RatF::t(&f)];
        let y = w.pairing(&x, Exp::int(10));
        assert_eq!(y.render(), "t^{1} + t^{1/2}");
        assert_eq!(y.norm_exp(), Some(Exp::int(1)));
        assert_eq!(w.norm_exp(&x), Some(Exp::int(1)));
        let last = vec![RatF::zero(&f), RatF::one(&f)];
        assert!(w.pairing(&last, Exp::int(5)).identical(w.xi()));
        assert!(w.pairing(&[RatF::zero(&f), RatF::zero(&f)], Exp::int(5)).is_zero());
    }

    #[test]
    fn enumeration_counts() {
        let f = gf(2, 1).unwrap();
        let l = LatticeCoset::standard(&f, 2);
        assert_eq!(l.enumerate_coset(0).points.len(), 3);
        let l2 = LatticeCoset::lattice(vec![
            vec![rf(&f, "t"), rf(&f, "0")],
            vec![rf(&f, "0"), rf(&f, "1")],
        ])
        .unwrap();
        assert_eq!(l2.enumerate_coset(1).points.len(), 7);
        let c = l.with_v(vec![rf(&f, "t^2"), rf(&f, "0")]);
        assert!(c.enumerate_coset(1).warning.is_some());
    }

    #[test]
    fn torsion_rep_counts() {
        let f2 = gf(2, 1).unwrap();
        assert_eq!(LatticeCoset::standard(&f2, 2).coset_reps(&Poly::t(&f2)).unwrap().len(), 3);
        let f3 = gf(3, 1).unwrap();
        let l = LatticeCoset::standard(&f3, 2);
        assert_eq!(l.projective_reps(&Poly::t(&f3)).unwrap().len(), 4);
        assert_eq!(l.coset_reps(&Poly::t(&f3)).unwrap().len(), 8);
        let n = Poly::new(&f2, vec![0, 0, 1]);
        assert_eq!(LatticeCoset::standard(&f2, 2).coset_reps(&n).unwrap().len(), 15);
        assert!(l.coset_reps(&Poly::one(&f3)).is_err());
    }

    #[test]
    fn lambda_prime_for_t_inverse() {
        let f = gf(2, 1).unwrap();
        let c = LatticeCoset::standard(&f, 2).with_v(vec![rf(&f, "1/t"), rf(&f, "0")]);
        let u = UFrame::new(&c).unwrap();
        assert_eq!(u.lambda_prime.basis()[0][0], rf(&f, "t"));
        assert_eq!(u.x1, Some(rf(&f, "1/t")));
        assert!(u.x1_generates);
        assert!(!u.v1_in_l1);
        assert_eq!(u.index_exp(&rf(&f, "1/t")).unwrap(), 0);
        // brute membership: λ ∈ Λ' iff (t^-1 + a)λ ∈ A for small a
        for lam in ["t", "t^2+t", "1", "1/t"] {
            let l = rf(&f, lam);
            let ok = ["0", "1", "t", "t+1"]
                .iter()
                .all(|a| (&(&rf(&f, "1/t") + &rf(&f, a)) * &l).is_poly());
            assert_eq!(ok, u.lambda_prime.in_lattice(&[l.clone()]), "{lam}");
        }
    }

    #[test]
    fn frame_of_skew_lattice() {
        let f = gf(3, 1).unwrap();
        let b = vec![vec![rf(&f, "t"), rf(&f, "1")], vec![rf(&f, "t+1"), rf(&f, "t")]];
        let c = LatticeCoset::new(b, vec![rf(&f, "0"), rf(&f, "1/t")]).unwrap();
        let u = UFrame::new(&c).unwrap();
        // L_1 = gcd(t, t+1) A = A
        assert_eq!(u.l1.deg(), 0);
        assert_eq!(u.l1, u.l1_lift[0]);
        assert!(c.in_lattice(&u.l1_lift));
        let lp = &u.l_prime.basis()[0][0];
        assert!(c.in_lattice(&[RatF::zero(&f), lp.clone()]));
        assert!(u.v1_in_l1);
    }

    #[test]
    fn sub_coset_reps() {
        let f = gf(2, 1).unwrap();
        let l = LatticeCoset::standard(&f, 2);
        let sub = LatticeCoset::lattice(vec![
            vec![rf(&f, "t"), rf(&f, "0")],
            vec![rf(&f, "0"), rf(&f, "t")],
        ])
        .unwrap();
        assert_eq!(l.index_of(&sub).unwrap(), 4);
        assert_eq!(l.sub_cosets(&sub).unwrap().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let f = gf(3, 1).unwrap();
        let c = LatticeCoset::standard(&f, 2).with_v(vec![rf(&f, "1/t"), rf(&f, "0")]);
        let back = LatticeCoset::from_json(&f, &c.to_json()).unwrap();
        assert_eq!(back, c);
        let bad = serde_json::json!({"basis": [["1", "0"], ["0"]]});
        assert!(LatticeCoset::from_json(&f, &bad).is_err());
    }
}
