//! Hecke operators on Eisenstein series, checked by brute force at desk
//! scale.
//!
//! Locally at a prime p everything reduces to GL_r(A/p^m) acting on the
//! submodule L̄ = L_pδ/p^m L'_p of (A/p^m)^r: the cosets K̄∖K̄' are the
//! orbit of L̄, and C_p(x) counts the orbit members containing x. Globally,
//! for L = L' = A^r, C(x) is the product of the local counts and is compared
//! with the inclusion–exclusion formula modulo p.

use crate::eisenstein::{eval_eisenstein, EvalConfig};
use crate::drinfeld::Residual;
use crate::error::{Error, Result};
use crate::fq::{gf_q, Gf};
use crate::lattice::{LatticeCoset, Matrix, OmegaPoint};
use crate::poly::{polys_below, Poly, RatF};
use crate::tail::{Exp, Tail};
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashMap};

/// Default cap on the number of candidate matrices (or box points).
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A/π^m, elements indexed by their base-q digit strings.
pub struct LocalRing {
    pub f: Gf,
    pub pi: Poly,
    pub m: usize,
    modulus: Poly,
    size: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    unit: Vec<bool>,
}

impl LocalRing {
    pub fn new(pi: &Poly, m: usize) -> Result<LocalRing> {
        let f = pi.field().clone();
        if !pi.is_monic() || !pi.is_irreducible() {
            return Err(Error::Invalid(format!("{pi} is not a monic irreducible")));
        }
        let modulus = pi.pow(m as u64);
        let d = modulus.deg().unwrap();
        let size = (f.size() as usize).pow(d as u32);
        if size > 1024 {
            return Err(Error::Budget(format!("A/({pi})^{m} has {size} elements (limit 1024)")));
        }
        let elems: Vec<Poly> = polys_below(&f, d).collect();
        let mut ring = LocalRing { f: f.clone(), pi: pi.clone(), m, modulus, size, add: vec![], mul: vec![], unit: vec![] };
        let mut add = vec![0; size * size];
        let mut mul = vec![0; size * size];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                add[i * size + j] = ring.encode(&(a + b));
                mul[i * size + j] = ring.encode(&(a * b));
            }
        }
        ring.unit = elems.iter().map(|a| !pi.divides(a)).collect();
        ring.add = add;
        ring.mul = mul;
        Ok(ring)
    }
    pub fn size(&self) -> usize {
        self.size
    }
    /// Residue field size q_p.
    pub fn qp(&self) -> u64 {
        (self.f.size() as u64).pow(self.pi.deg().unwrap() as u32)
    }
    pub fn encode(&self, a: &Poly) -> u32 {
        let r = a.rem(&self.modulus).unwrap();
        let q = self.f.size();
        r.coeffs().iter().rev().fold(0u32, |acc, &c| acc * q + c)
    }
    pub fn decode(&self, mut x: u32) -> Poly {
        let q = self.f.size();
        let d = self.modulus.deg().unwrap();
        let mut c = vec![];
        for _ in 0..d {
            c.push(x % q);
            x /= q;
        }
        Poly::new(&self.f, c)
    }
    fn a(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.size + y as usize]
    }
    fn m(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.size + y as usize]
    }
    pub fn is_unit(&self, x: u32) -> bool {
        self.unit[x as usize]
    }
    /// π-adic valuation of a residue, capped at m.
    pub fn valuation(&self, x: u32) -> usize {
        if x == 0 {
            return self.m;
        }
        let mut p = self.decode(x);
        let mut v = 0;
        while self.pi.divides(&p) {
            p = p.exact_div(&self.pi);
            v += 1;
        }
        v
    }
    pub fn det(&self, a: &[u32], r: usize) -> u32 {
        match r {
            1 => a[0],
            _ => {
                let mut s = 0u32;
                for j in 0..r {
                    let minor: Vec<u32> =
                        (1..r).flat_map(|i| (0..r).filter(move |&c| c != j).map(move |c| a[i * r + c])).collect();
                    let mut term = self.m(a[j], self.det(&minor, r - 1));
                    if j % 2 == 1 {
                        term = self.m(term, self.encode(&Poly::constant(&self.f, self.f.neg(1))));
                    }
                    s = self.a(s, term);
                }
                s
            }
        }
    }
    /// Row vector times matrix.
    pub fn vec_mat(&self, x: &[u32], a: &[u32], r: usize) -> Vec<u32> {
        (0..r).map(|j| (0..r).fold(0, |s, i| self.a(s, self.m(x[i], a[i * r + j])))).collect()
    }
    pub fn vec_code(&self, x: &[u32]) -> u64 {
        x.iter().fold(0u64, |acc, &c| acc * self.size as u64 + c as u64)
    }
    /// The submodule spanned by the rows, as sorted vector codes.
    pub fn span(&self, rows: &[Vec<u32>]) -> Vec<u64> {
        let r = rows[0].len();
        let mut set: BTreeSet<u64> = BTreeSet::new();
        let mut frontier = vec![vec![0u32; r]];
        set.insert(self.vec_code(&frontier[0]));
        // closure under adding c·row, breadth first
        while let Some(x) = frontier.pop() {
            for row in rows {
                for c in 1..self.size as u32 {
                    let y: Vec<u32> = x.iter().zip(row).map(|(&a, &b)| self.a(a, self.m(c, b))).collect();
                    if set.insert(self.vec_code(&y)) {
                        frontier.push(y);
                    }
                }
            }
        }
        set.into_iter().collect()
    }
}

/// The orbit of L̄ under GL_r(A/π^m), i.e. the cosets K̄∖K̄'.
pub struct LocalCosets {
    pub ring: LocalRing,
    pub r: usize,
    pub group_order: u64,
    pub stabilizer_order: u64,
    /// One submodule L̄k per coset.
    pub orbit: Vec<Vec<u64>>,
    /// Every coset has |K̄| elements.
    pub uniform: bool,
    pub det_image_group: BTreeSet<u32>,
    pub det_image_stabilizer: BTreeSet<u32>,
}

impl LocalCosets {
    pub fn index(&self) -> u64 {
        self.orbit.len() as u64
    }
    /// C_p(x) for every x ∈ (A/π^m)^r, indexed by vector code.
    pub fn counts(&self) -> Vec<u64> {
        let n = (self.ring.size() as u64).pow(self.r as u32) as usize;
        let mut c = vec![0u64; n];
        for m in &self.orbit {
            for &x in m {
                c[x as usize] += 1;
            }
        }
        c
    }
}

/// Enumerate GL_r(A/π^m), and partition it by the image of the submodule
/// spanned by `gens`.
pub fn local_cosets(ring: LocalRing, r: usize, gens: &[Vec<u32>], budget: u64) -> Result<LocalCosets> {
    let size = ring.size() as u64;
    let total = size
        .checked_pow((r * r) as u32)
        .filter(|&n| n <= budget)
        .ok_or_else(|| Error::Budget(format!("{size}^{} candidate matrices over A/π^{} (budget {budget})", r * r, ring.m)))?;
    let base = ring.span(gens);
    let mut orbit_index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut orbit: Vec<Vec<u64>> = vec![];
    let mut sizes: Vec<u64> = vec![];
    let mut det_g = BTreeSet::new();
    let mut det_k = BTreeSet::new();
    let mut group_order = 0u64;
    let mut a = vec![0u32; r * r];
    for idx in 0..total {
        let mut x = idx;
        for slot in a.iter_mut() {
            *slot = (x % size) as u32;
            x /= size;
        }
        let d = ring.det(&a, r);
        if !ring.is_unit(d) {
            continue;
        }
        group_order += 1;
        det_g.insert(d);
        let rows: Vec<Vec<u32>> = gens.iter().map(|g| ring.vec_mat(g, &a, r)).collect();
        let img = ring.span(&rows);
        if img == base {
            det_k.insert(d);
        }
        let next = orbit.len();
        let i = *orbit_index.entry(img.clone()).or_insert(next);
        if i == next {
            orbit.push(img);
            sizes.push(0);
        }
        sizes[i] += 1;
    }
    let stab = sizes[orbit_index[&base]];
    Ok(LocalCosets {
        ring,
        r,
        group_order,
        stabilizer_order: stab,
        uniform: sizes.iter().all(|&s| s == stab),
        orbit,
        det_image_group: det_g,
        det_image_stabilizer: det_k,
    })
}

/// Residue of C_p(x) modulo q_p for x ∈ L'_p, by the three cases on μ
/// (sorted decreasingly, μ_r = 0).
pub fn predicted_cp_mod(mu: &[usize], x_in_p_lattice: bool) -> u64 {
    let r = mu.len();
    let m1 = mu[0];
    if m1 <= 1 {
        1
    } else if m1 <= mu[r - 2] + 1 {
        (!x_in_p_lattice) as u64
    } else {
        0
    }
}

/// Σ_{i>j} max(0, μ_j − μ_i − 1): the q_p-exponent of [K'_p : K_p].
pub fn index_exponent(mu: &[usize]) -> u32 {
    let mut e = 0;
    for j in 0..mu.len() {
        for i in j + 1..mu.len() {
            e += (mu[j] as i64 - mu[i] as i64 - 1).max(0) as u32;
        }
    }
    e
}

/// Exhaustive local check for one (π, μ) in the normalized position
/// L'_p = A_p^r, L_pδ = ⊕ π^{μ_j} A_p.
#[derive(Clone, Debug)]
pub struct LocalReport {
    pub q: u32,
    pub pi: String,
    pub mu: Vec<usize>,
    pub group_order: u64,
    pub stabilizer_order: u64,
    pub index: u64,
    pub index_exponent: u32,
    /// index ∈ q_p^e·(1 + q_p Z).
    pub index_ok: bool,
    pub det_equal: bool,
    pub uniform_cosets: bool,
    pub residues_checked: usize,
    pub mismatches: usize,
    /// (x in p·L', C_p(x)) for the first few x, as a sample of exact values.
    pub sample: Vec<(String, u64)>,
}

impl LocalReport {
    pub fn pass(&self) -> bool {
        self.index_ok && self.det_equal && self.uniform_cosets && self.mismatches == 0
    }
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "pi": self.pi,
            "mu": self.mu,
            "group_order": self.group_order,
            "stabilizer_order": self.stabilizer_order,
            "index": self.index,
            "index_exponent": self.index_exponent,
            "index_ok": self.index_ok,
            "det_equal": self.det_equal,
            "uniform_cosets": self.uniform_cosets,
            "residues_checked": self.residues_checked,
            "mismatches": self.mismatches,
            "sample": self.sample.iter().map(|(x, c)| json!({"x": x, "count": c})).collect::<Vec<_>>(),
            "pass": self.pass(),
        })
    }
}

pub fn check_local(q: u32, pi: &Poly, mu: &[usize], budget: u64) -> Result<LocalReport> {
    let r = mu.len();
    if r < 2 || mu.windows(2).any(|w| w[0] < w[1]) || mu[r - 1] != 0 {
        return Err(Error::Invalid("μ must be decreasing with μ_r = 0 and r ≥ 2".into()));
    }
    if pi.field().size() != q {
        return Err(Error::Invalid("π is over the wrong field".into()));
    }
    // μ = 0: K_p = K'_p, a single coset; work modulo π so the count is visible
    let m = mu[0].max(1);
    let ring = LocalRing::new(pi, m)?;
    let gens: Vec<Vec<u32>> = (0..r)
        .map(|j| {
            let mut row = vec![0u32; r];
            row[j] = ring.encode(&pi.pow(mu[j] as u64));
            row
        })
        .collect();
    let lc = local_cosets(ring, r, &gens, budget)?;
    let qp = lc.ring.qp();
    let e = index_exponent(mu);
    let scale = qp.pow(e);
    let index = lc.index();
    let index_ok = index % scale == 0 && (index / scale) % qp == 1 % qp;
    let counts = lc.counts();
    let size = lc.ring.size() as u64;
    let mut mismatches = 0;
    let mut sample = vec![];
    for (code, &c) in counts.iter().enumerate() {
        let mut x = vec![0u32; r];
        let mut k = code as u64;
        for slot in x.iter_mut().rev() {
            *slot = (k % size) as u32;
            k /= size;
        }
        let in_p = x.iter().all(|&a| lc.ring.valuation(a) >= 1);
        if c % qp != predicted_cp_mod(mu, in_p) {
            mismatches += 1;
        }
        if sample.len() < 8 {
            let xs: Vec<String> = x.iter().map(|&a| lc.ring.decode(a).to_string()).collect();
            sample.push((format!("({})", xs.join(", ")), c));
        }
    }
    Ok(LocalReport {
        q,
        pi: pi.to_string(),
        mu: mu.to_vec(),
        group_order: lc.group_order,
        stabilizer_order: lc.stabilizer_order,
        index,
        index_exponent: e,
        index_ok,
        det_equal: lc.det_image_group == lc.det_image_stabilizer,
        uniform_cosets: lc.uniform && lc.group_order == index * lc.stabilizer_order,
        residues_checked: counts.len(),
        mismatches,
        sample,
    })
}

// ---------------------------------------------------------------------------
// Global identity for L = L' = A^r

/// v + A^r, δ, v' + A^r with v = v_num/N, v' = v'_num/N and δ ∈ M_r(A).
#[derive(Clone, Debug)]
pub struct HeckeSpec {
    pub f: Gf,
    pub r: usize,
    pub delta: Vec<Vec<Poly>>,
    pub n: Poly,
    pub v: Vec<Poly>,
    pub vp: Vec<Poly>,
}

pub fn parse_poly(f: &Gf, s: &str) -> Result<Poly> {
    RatF::parse(f, s)?.as_poly().cloned().ok_or_else(|| Error::Parse(format!("{s} is not a polynomial")))
}

impl HeckeSpec {
    /// v = v' = 0.
    pub fn lattice_only(f: &Gf, delta: Vec<Vec<Poly>>) -> HeckeSpec {
        let r = delta.len();
        HeckeSpec { f: f.clone(), r, delta, n: Poly::one(f), v: vec![Poly::zero(f); r], vp: vec![Poly::zero(f); r] }
    }
    /// {"q": 2, "delta": [["t^2","0"],["0","1"]], "N": "t+1", "v": ["0","1"], "v_prime": ["0","1"]}
    pub fn from_json(val: &Value) -> Result<HeckeSpec> {
        let q = val["q"].as_u64().ok_or_else(|| Error::Parse("missing q".into()))? as u32;
        let f = gf_q(q)?;
        let strs = |v: &Value| -> Result<Vec<Poly>> {
            v.as_array()
                .ok_or_else(|| Error::Parse("expected an array".into()))?
                .iter()
                .map(|s| parse_poly(&f, s.as_str().ok_or_else(|| Error::Parse("expected a string".into()))?))
                .collect()
        };
        let delta: Vec<Vec<Poly>> = val["delta"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing delta".into()))?
            .iter()
            .map(strs)
            .collect::<Result<_>>()?;
        let r = delta.len();
        let n = match val.get("N") {
            Some(s) => parse_poly(&f, s.as_str().unwrap_or("1"))?,
            None => Poly::one(&f),
        };
        let v = match val.get("v") {
            Some(a) => strs(a)?,
            None => vec![Poly::zero(&f); r],
        };
        let vp = match val.get("v_prime") {
            Some(a) => strs(a)?,
            None => vec![Poly::zero(&f); r],
        };
        if delta.iter().any(|row| row.len() != r) || v.len() != r || vp.len() != r || n.is_zero() {
            return Err(Error::Invalid("inconsistent Hecke datum".into()));
        }
        Ok(HeckeSpec { f, r, delta, n: n.monic(), v, vp })
    }
}

fn poly_det(a: &[Vec<Poly>]) -> Poly {
    let n = a.len();
    let f = a[0][0].field().clone();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut s = Poly::zero(&f);
    for j in 0..n {
        let minor: Vec<Vec<Poly>> = a[1..].iter().map(|row| row.iter().enumerate().filter(|e| e.0 != j).map(|e| e.1.clone()).collect()).collect();
        let term = &a[0][j] * &poly_det(&minor);
        s = if j % 2 == 0 { &s + &term } else { &s - &term };
    }
    s
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn vp(p: &Poly, pi: &Poly) -> Option<usize> {
    if p.is_zero() {
        return None;
    }
    let mut x = p.clone();
    let mut v = 0;
    while pi.divides(&x) {
        x = x.exact_div(pi);
        v += 1;
    }
    Some(v)
}

/// Elementary divisor exponents of A_p^r/A_p^rδ, decreasing.
pub fn elementary_exponents(delta: &[Vec<Poly>], pi: &Poly) -> Vec<usize> {
    let r = delta.len();
    let mut partial = vec![0usize];
    for k in 1..=r {
        let mut best: Option<usize> = None;
        for rows in subsets(r, k) {
            for cols in subsets(r, k) {
                let m: Vec<Vec<Poly>> = rows.iter().map(|&i| cols.iter().map(|&j| delta[i][j].clone()).collect()).collect();
                if let Some(v) = vp(&poly_det(&m), pi) {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
        }
        partial.push(best.expect("δ is invertible"));
    }
    let mut e: Vec<usize> = (1..=r).map(|k| partial[k] - partial[k - 1]).collect();
    e.reverse();
    e
}

#[derive(Clone, Debug)]
pub struct GlobalReport {
    /// (π, μ) for each prime dividing det δ.
    pub primes: Vec<(String, Vec<usize>)>,
    /// Primes with 2 ≤ μ_1 ≤ μ_{r−1} + 1.
    pub s: Vec<String>,
    pub degenerate: bool,
    pub v2: Vec<String>,
    pub box_size: u64,
    pub mismatches: u64,
    pub nonzero_counts: u64,
}

impl GlobalReport {
    pub fn pass(&self) -> bool {
        self.mismatches == 0
    }
    pub fn to_json(&self) -> Value {
        json!({
            "primes": self.primes.iter().map(|(p, mu)| json!({"pi": p, "mu": mu})).collect::<Vec<_>>(),
            "S": self.s,
            "degenerate": self.degenerate,
            "v_double_prime": self.v2,
            "box_size": self.box_size,
            "nonzero_counts": self.nonzero_counts,
            "mismatches": self.mismatches,
            "pass": self.pass(),
        })
    }
}

/// x = y/N reduced into A/π^m, or None when x is not π-integral.
fn reduce_local(ring: &LocalRing, y: &[Poly], n: &Poly) -> Option<Vec<u32>> {
    let e = vp(n, &ring.pi).unwrap();
    let pe = ring.pi.pow(e as u64);
    let unit = n.exact_div(&pe);
    let inv = unit.inv_mod(&ring.pi.pow(ring.m as u64)).unwrap();
    y.iter()
        .map(|c| if pe.divides(c) { Some(ring.encode(&(&c.exact_div(&pe) * &inv))) } else { None })
        .collect()
}

pub fn global_identity_check(spec: &HeckeSpec, budget: u64) -> Result<GlobalReport> {
    let f = &spec.f;
    let r = spec.r;
    let n = &spec.n;
    let det = poly_det(&spec.delta);
    if det.is_zero() {
        return Err(Error::Invalid("δ is singular".into()));
    }
    // (a): vδ − v' ∈ A^r
    let vd: Vec<Poly> = (0..r).map(|j| (0..r).fold(Poly::zero(f), |s, i| &s + &(&spec.v[i] * &spec.delta[i][j]))).collect();
    if vd.iter().zip(&spec.vp).any(|(a, b)| !n.divides(&(a - b))) {
        return Err(Error::Invalid("condition (a) fails: vδ + Lδ is not inside v' + L'".into()));
    }
    // (b): at primes where v is not integral, δ must be invertible
    for (p, _) in n.factor() {
        let e = vp(n, &p).unwrap();
        let pe = p.pow(e as u64);
        if spec.v.iter().any(|c| !pe.divides(c)) && p.divides(&det) {
            return Err(Error::Invalid(format!("condition (b) fails at {p}")));
        }
    }
    // (c): δ is nonzero modulo every prime
    let content = spec.delta.iter().flatten().fold(Poly::zero(f), |g, a| g.gcd(a));
    if content.deg() != Some(0) {
        return Err(Error::Invalid(format!("condition (c) fails: {content} divides every entry of δ")));
    }

    struct Local {
        pi: Poly,
        mu: Vec<usize>,
        ring: LocalRing,
        counts: Vec<u64>,
    }
    let mut locals = vec![];
    let mut box_mod = n.clone();
    for (pi, _) in det.factor() {
        let mu = elementary_exponents(&spec.delta, &pi);
        let ring = LocalRing::new(&pi, mu[0])?;
        let gens: Vec<Vec<u32>> = spec.delta.iter().map(|row| row.iter().map(|a| ring.encode(a)).collect()).collect();
        let lc = local_cosets(ring, r, &gens, budget)?;
        box_mod = &box_mod * &pi.pow(mu[0] as u64 + 1);
        locals.push(Local { pi, counts: lc.counts(), mu, ring: lc.ring });
    }
    let degenerate = locals.iter().any(|l| l.mu[0] >= l.mu[r - 2] + 2);
    let s_idx: Vec<usize> = (0..locals.len()).filter(|&i| {
        let mu = &locals[i].mu;
        mu[0] >= 2 && mu[0] <= mu[r - 2] + 1
    }).collect();
    // v'' = a·v' with a ∈ ∩_S p and a ≡ 1 mod N
    let ps = s_idx.iter().fold(Poly::one(f), |acc, &i| &acc * &locals[i].pi);
    let a = if n.deg() == Some(0) { ps.clone() } else { &ps * &ps.inv_mod(n).unwrap() };
    let v2: Vec<Poly> = spec.vp.iter().map(|c| &a * c).collect();

    let d = box_mod.deg().unwrap();
    let qn = (f.size() as u64).pow(d as u32);
    let box_size = qn.checked_pow(r as u32).filter(|&b| b <= budget).ok_or_else(|| Error::Budget(format!("box of {qn}^{r} points")))?;
    let reps: Vec<Poly> = polys_below(f, d).collect();
    let p = f.p() as i64;
    let mut mismatches = 0;
    let mut nonzero = 0;
    let n_primes: Vec<(Poly, usize)> = n.factor().into_iter().map(|(p, e)| (p, e as usize)).collect();
    for idx in 0..box_size {
        let mut k = idx;
        let y: Vec<Poly> = (0..r)
            .map(|_| {
                let c = reps[(k % qn) as usize].clone();
                k /= qn;
                c
            })
            .collect();
        // C(x) = Π_p C_p(x)
        let mut c: u64 = 1;
        for l in &locals {
            c *= match reduce_local(&l.ring, &y, n) {
                Some(x) => l.counts[l.ring.vec_code(&x) as usize],
                None => 0,
            };
        }
        for (pi, e) in &n_primes {
            if locals.iter().any(|l| &l.pi == pi) {
                continue;
            }
            // x ∈ v' + L'_p
            let pe = pi.pow(*e as u64);
            if y.iter().zip(&spec.vp).any(|(a, b)| !pe.divides(&(a - b))) {
                c = 0;
            }
        }
        if c != 0 {
            nonzero += 1;
        }
        let rhs: i64 = if degenerate {
            0
        } else {
            let mut s = 0i64;
            for mask in 0u32..(1 << s_idx.len()) {
                let pi_i = s_idx.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).fold(Poly::one(f), |acc, (_, &i)| &acc * &locals[i].pi);
                let modulus = n * &pi_i;
                let inside = y.iter().zip(&v2).all(|(a, b)| modulus.divides(&(a - b)));
                if inside {
                    s += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
                }
            }
            s
        };
        if (c as i64 - rhs).rem_euclid(p) != 0 {
            mismatches += 1;
        }
    }
    Ok(GlobalReport {
        primes: locals.iter().map(|l| (l.pi.to_string(), l.mu.clone())).collect(),
        s: s_idx.iter().map(|&i| locals[i].pi.to_string()).collect(),
        degenerate,
        v2: v2.iter().map(|c| RatF::new(c.clone(), n.clone()).map(|x| x.to_string()).unwrap_or_default()).collect(),
        box_size,
        mismatches,
        nonzero_counts: nonzero,
    })
}

// ---------------------------------------------------------------------------
// Rank 2, L = A², δ' = diag(π, 1)

/// Basis rows of the q_p + 1 sublattices of index q_p in A²: (1, b; 0, π)
/// for deg b < deg π, and (π, 0; 0, 1). These are the transposes of the
/// column-vector representatives (π, b; 0, 1), (1, 0; 0, π).
pub fn index_pi_reps(pi: &Poly) -> Vec<Matrix> {
    let f = pi.field();
    let z = RatF::zero(f);
    let one = RatF::one(f);
    let p = RatF::from_poly(pi.clone());
    let mut out: Vec<Matrix> = polys_below(f, pi.deg().unwrap())
        .map(|b| vec![vec![one.clone(), RatF::from_poly(b)], vec![z.clone(), p.clone()]])
        .collect();
    out.push(vec![vec![p.clone(), z.clone()], vec![z, one.clone()]]);
    out
}

/// Every nonzero x ∈ (A/π)² lies in exactly one of the sublattices.
pub fn index_pi_partition_ok(pi: &Poly) -> bool {
    let f = pi.field();
    let lats: Vec<LatticeCoset> = index_pi_reps(pi).into_iter().map(|m| LatticeCoset::lattice(m).unwrap()).collect();
    let d = pi.deg().unwrap();
    for a in polys_below(f, d) {
        for b in polys_below(f, d) {
            let x = [RatF::from_poly(a.clone()), RatF::from_poly(b.clone())];
            let hits = lats.iter().filter(|l| l.contains(&x)).count();
            let want = if a.is_zero() && b.is_zero() { lats.len() } else { 1 };
            if hits != want {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct Rank2Report {
    pub pi: String,
    pub k: usize,
    pub reps: usize,
    pub partition_ok: bool,
    /// Σ_γ E_{k, A²γ} against E_{k, A²}.
    pub fixed: Residual,
    /// Σ_γ E_{k, A²π⁻¹γ} against π^k·E_{k, A²}.
    pub eigenvalue: Residual,
}

impl Rank2Report {
    pub fn pass(&self) -> bool {
        self.partition_ok && self.fixed.pass() && self.eigenvalue.pass()
    }
    pub fn to_json(&self) -> Value {
        json!({
            "pi": self.pi,
            "k": self.k,
            "representatives": self.reps,
            "partition_ok": self.partition_ok,
            "T_delta_prime": self.fixed.to_json(),
            "eigenvalue_pi_k": self.eigenvalue.to_json(),
            "pass": self.pass(),
        })
    }
}

pub fn rank2_eigenvalue_check(pi: &Poly, k: usize, w: &OmegaPoint, p: Exp, cfg: &EvalConfig) -> Result<Rank2Report> {
    let f = pi.field();
    if w.rank() != 2 {
        return Err(Error::Invalid("rank-2 check needs a rank-2 point".into()));
    }
    let base = eval_eisenstein(&LatticeCoset::standard(f, 2), w, k, p, cfg)?.value;
    let reps = index_pi_reps(pi);
    let pinv = RatF::from_poly(pi.clone()).inv()?;
    let mut sum = Tail::zero(w.ctx());
    let mut twisted = Tail::zero(w.ctx());
    for g in &reps {
        sum = sum.add(&eval_eisenstein(&LatticeCoset::lattice(g.clone())?, w, k, p, cfg)?.value);
        let gi: Matrix = g.iter().map(|row| row.iter().map(|a| &pinv * a).collect()).collect();
        twisted = twisted.add(&eval_eisenstein(&LatticeCoset::lattice(gi)?, w, k, p, cfg)?.value);
    }
    let pik = Tail::from_ratf(w.ctx(), &RatF::from_poly(pi.pow(k as u64)), 1, None)?;
    Ok(Rank2Report {
        pi: pi.to_string(),
        k,
        reps: reps.len(),
        partition_ok: index_pi_partition_ok(pi),
        fixed: Residual::of("sum over index-pi sublattices = E_k", &sum, &base),
        eigenvalue: Residual::of("T_delta E_k = pi^k E_k", &twisted, &pik.mul(&base)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::PointVariant;
    use crate::tail::tail_ctx;

    fn t(f: &Gf) -> Poly {
        Poly::t(f)
    }

    #[test]
    fn local_examples() {
        let f = gf_q(2).unwrap();
        let rep = check_local(2, &t(&f), &[0, 0], DEFAULT_BUDGET).unwrap();
        assert_eq!(rep.index, 1);
        let rep = check_local(2, &t(&f), &[1, 0], DEFAULT_BUDGET).unwrap();
        assert_eq!((rep.group_order, rep.index), (6, 3));
        assert!(rep.pass());
        let rep = check_local(2, &t(&f), &[2, 0], DEFAULT_BUDGET).unwrap();
        // [K':K] = 6 = q·(1 + q·1)
        assert_eq!((rep.group_order, rep.index, rep.index_exponent), (96, 6, 1));
        assert!(rep.pass());
        let rep = check_local(2, &t(&f), &[2, 0, 0], DEFAULT_BUDGET).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn local_grid() {
        for q in [2u32, 3] {
            let f = gf_q(q).unwrap();
            let mut cases: Vec<(Poly, Vec<usize>)> = vec![
                (t(&f), vec![1, 0]),
                (t(&f), vec![2, 0]),
                (&t(&f) + &Poly::one(&f), vec![2, 0]),
                (t(&f), vec![1, 0, 0]),
                (t(&f), vec![1, 1, 0]),
            ];
            if q == 2 {
                cases.push((t(&f), vec![2, 0, 0]));
                cases.push((t(&f), vec![2, 1, 0]));
                cases.push((t(&f), vec![2, 2, 0]));
                cases.push((Poly::from_coeff_string(&f, "1,1,1").unwrap(), vec![1, 0]));
            }
            for (pi, mu) in cases {
                let rep = check_local(q, &pi, &mu, DEFAULT_BUDGET).unwrap();
                assert!(rep.pass(), "q={q} π={pi} μ={mu:?}: {rep:?}");
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = gf_q(3).unwrap();
        assert!(matches!(check_local(3, &t(&f), &[2, 0, 0], DEFAULT_BUDGET), Err(Error::Budget(_))));
    }

    fn spec(q: u32, delta: &[&[&str]]) -> HeckeSpec {
        let f = gf_q(q).unwrap();
        HeckeSpec::lattice_only(&f, delta.iter().map(|row| row.iter().map(|s| parse_poly(&f, s).unwrap()).collect()).collect())
    }

    #[test]
    fn global_identity() {
        // S = ∅
        let rep = global_identity_check(&spec(2, &[&["t", "0"], &["0", "1"]]), DEFAULT_BUDGET).unwrap();
        assert!(rep.pass() && rep.s.is_empty() && !rep.degenerate, "{rep:?}");
        // S = {t}
        let rep = global_identity_check(&spec(2, &[&["t^2", "0"], &["0", "1"]]), DEFAULT_BUDGET).unwrap();
        assert!(rep.pass() && rep.s.len() == 1, "{rep:?}");
        // two primes, one in S
        let rep = global_identity_check(&spec(2, &[&["t^2*(t+1)", "0"], &["0", "1"]]), DEFAULT_BUDGET).unwrap();
        assert!(rep.pass() && rep.s.len() == 1 && rep.primes.len() == 2, "{rep:?}");
        // two primes, both in S, non-diagonal δ
        let rep = global_identity_check(&spec(2, &[&["t^2", "1"], &["0", "(t+1)^2"]]), DEFAULT_BUDGET).unwrap();
        assert!(rep.pass() && rep.s.len() == 2, "{rep:?}");
        // degenerate r = 3
        let rep = global_identity_check(&spec(2, &[&["t^2", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]), DEFAULT_BUDGET).unwrap();
        assert!(rep.pass() && rep.degenerate, "{rep:?}");
        // q = 3
        let rep = global_identity_check(&spec(3, &[&["t^2", "0"], &["0", "1"]]), DEFAULT_BUDGET).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn global_with_level() {
        let f = gf_q(2).unwrap();
        let val = json!({"q": 2, "delta": [["t^2", "0"], ["0", "1"]], "N": "t+1", "v": ["0", "1"], "v_prime": ["0", "1"]});
        let s = HeckeSpec::from_json(&val).unwrap();
        let rep = global_identity_check(&s, DEFAULT_BUDGET).unwrap();
        assert!(rep.pass() && rep.s.len() == 1, "{rep:?}");
        assert_eq!(s.n, &t(&f) + &Poly::one(&f));
        // δ = diag(t+1, 1) is not invertible at the level
        let bad = json!({"q": 2, "delta": [["t+1", "0"], ["0", "1"]], "N": "t+1", "v": ["1", "0"], "v_prime": ["1", "0"]});
        assert!(global_identity_check(&HeckeSpec::from_json(&bad).unwrap(), DEFAULT_BUDGET).is_err());
        let bad = spec(2, &[&["t", "0"], &["0", "t"]]);
        assert!(global_identity_check(&bad, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn rank_two_eigenvalue() {
        for (q, k) in [(2u32, 2usize), (3, 2)] {
            let ctx = tail_ctx(q, 1).unwrap();
            let f = ctx.base.clone();
            let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
            let rep = rank2_eigenvalue_check(&t(&f), k, &w, Exp::int(8), &EvalConfig::default()).unwrap();
            assert_eq!(rep.reps, q as usize + 1);
            assert!(rep.pass(), "{}", rep.to_json());
        }
    }
}
