//! The graded ring R_V ⊗ k0 for V = t⁻¹L/L ≅ F_q^r: generated by weight-one
//! symbols Y_v (v ≠ 0) subject to Y_{αv} = α⁻¹Y_v and
//! Y_v Y_{v'} = Y_{v+v'}(Y_v + Y_{v'}). Y_v corresponds to E_{1,v+L}.
//!
//! Elements are polynomials in the projective variables (one per line of V,
//! with first nonzero coordinate 1). Equality is decided on these
//! representatives first and by per-degree normal forms otherwise; the
//! relations have coefficients in F_q, so each degree slice is reduced once
//! by F_q-linear elimination.

use crate::algebra::{Coeff, RingLike};
use crate::coeff::{Mode, K0};
use crate::error::{Error, Result};
use crate::fq::{gf_q, Gf};
use crate::linalg::{left_kernel, Echelon, SparseVec};
use crate::poly::{Poly, RatF};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

pub type Mono = Vec<u16>;
/// An r×r matrix over F_q acting on row vectors.
pub type FqMatrix = Vec<Vec<u32>>;

pub struct RingCtx {
    pub q: u32,
    pub r: usize,
    pub f: Gf,
    pub mode: Mode,
    /// Projective representatives of V ∖ 0, first nonzero coordinate 1.
    pub reps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// Largest number of monomials in one degree slice.
    pub budget: usize,
    slices: Mutex<HashMap<usize, Arc<Slice>>>,
}

impl fmt::Debug for RingCtx {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "R_V(q={}, r={})", self.q, self.r)
    }
}

/// Degree-k monomials, the relation space in echelon form, and the
/// standard monomials (free columns) spanning the quotient.
pub struct Slice {
    pub k: usize,
    pub monos: Vec<Mono>,
    index: HashMap<Mono, usize>,
    ech: Echelon,
    /// Positions (in `monos`) of the standard monomials.
    pub basis: Vec<usize>,
    basis_pos: HashMap<usize, usize>,
}

impl Slice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    /// Normal form of Σ c·monomial (F_q coefficients) in basis coordinates.
    fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.ech.normal_form(v).into_iter().map(|(j, a)| (self.basis_pos[&j], a)).collect()
    }
}

fn monomials(n: usize, k: usize) -> Vec<Mono> {
    // lexicographically decreasing exponent vectors
    fn rec(n: usize, k: usize, pre: &mut Mono, out: &mut Vec<Mono>) {
        if pre.len() == n - 1 {
            pre.push(k as u16);
            out.push(pre.clone());
            pre.pop();
            return;
        }
        for a in (0..=k).rev() {
            pre.push(a as u16);
            rec(n, k - a, pre, out);
            pre.pop();
        }
    }
    let mut out = vec![];
    rec(n, k, &mut vec![], &mut out);
    out
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

impl RingCtx {
    pub fn new(q: u32, r: usize, mode: Mode, budget: usize) -> Result<Arc<RingCtx>> {
        if r == 0 {
            return Err(Error::Invalid("rank must be ≥ 1".into()));
        }
        let f = gf_q(q)?;
        let mut reps = vec![];
        for idx in 1..(q as usize).pow(r as u32) {
            let mut v = vec![0u32; r];
            let mut m = idx;
            for slot in v.iter_mut().rev() {
                *slot = (m % q as usize) as u32;
                m /= q as usize;
            }
            if v.iter().find(|&&a| a != 0) == Some(&1) {
                reps.push(v);
            }
        }
        let index = reps.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        Ok(Arc::new(RingCtx { q, r, f, mode, reps, index, budget, slices: Mutex::new(HashMap::new()) }))
    }
    /// Number of projective variables, (q^r − 1)/(q − 1).
    pub fn nvars(&self) -> usize {
        self.reps.len()
    }
    /// v = a·rep_i; None for v = 0.
    pub fn canon(&self, v: &[u32]) -> Option<(usize, u32)> {
        let a = *v.iter().find(|&&x| x != 0)?;
        let ai = self.f.inv(a).unwrap();
        let w: Vec<u32> = v.iter().map(|&x| self.f.mul(ai, x)).collect();
        Some((self.index[&w], a))
    }
    pub fn slice_size(&self, k: usize) -> u128 {
        let n = self.nvars() as u128;
        binom(k as u128 + n - 1, n - 1)
    }

    /// The quadratic relations, as F_q-polynomials.
    fn relations(&self) -> Vec<Vec<(Mono, u32)>> {
        let f = &self.f;
        let n = self.nvars();
        let mut out = vec![];
        let unit = |i: usize| {
            let mut m = vec![0u16; n];
            m[i] += 1;
            m
        };
        let prod = |a: &Mono, b: &Mono| a.iter().zip(b).map(|(x, y)| x + y).collect::<Mono>();
        for i in 0..n {
            for j in i + 1..n {
                for b in 1..self.q {
                    // v = rep_i, v' = b·rep_j, v + v' = c·rep_l
                    let s: Vec<u32> = (0..self.r).map(|x| f.add(self.reps[i][x], f.mul(b, self.reps[j][x]))).collect();
                    let (l, c) = self.canon(&s).unwrap();
                    let bi = f.inv(b).unwrap();
                    let ci = f.inv(c).unwrap();
                    let mut rel: BTreeMap<Mono, u32> = BTreeMap::new();
                    let mut put = |m: Mono, a: u32| {
                        let e = rel.entry(m).or_insert(0);
                        *e = f.add(*e, a);
                    };
                    // b⁻¹Y_iY_j − c⁻¹Y_l(Y_i + b⁻¹Y_j)
                    put(prod(&unit(i), &unit(j)), bi);
                    put(prod(&unit(l), &unit(i)), f.neg(ci));
                    put(prod(&unit(l), &unit(j)), f.neg(f.mul(ci, bi)));
                    out.push(rel.into_iter().filter(|e| e.1 != 0).collect());
                }
            }
        }
        out
    }

    pub fn slice(&self, k: usize) -> Result<Arc<Slice>> {
        if let Some(s) = self.slices.lock().unwrap().get(&k) {
            return Ok(s.clone());
        }
        let size = self.slice_size(k);
        if size > self.budget as u128 {
            return Err(Error::Budget(format!(
                "degree-{k} slice has {size} monomials in {} variables (budget {})",
                self.nvars(),
                self.budget
            )));
        }
        let n = self.nvars();
        let monos = monomials(n, k);
        let index: HashMap<Mono, usize> = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut ech = Echelon::new(&self.f, monos.len());
        if k >= 2 {
            let rels = self.relations();
            for m in monomials(n, k - 2) {
                for rel in &rels {
                    let mut row: SparseVec = rel
                        .iter()
                        .map(|(a, c)| {
                            let mm: Mono = a.iter().zip(&m).map(|(x, y)| x + y).collect();
                            (index[&mm], *c)
                        })
                        .collect();
                    row.sort();
                    ech.insert(&row);
                }
            }
        }
        let basis = ech.free_columns();
        let basis_pos = basis.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let s = Arc::new(Slice { k, monos, index, ech, basis, basis_pos });
        self.slices.lock().unwrap().insert(k, s.clone());
        Ok(s)
    }

    /// The image of Y_{rep_i} under γ: Y_{rep_i γ} = c⁻¹·Y_l.
    fn var_image(&self, i: usize, g: &FqMatrix) -> (usize, u32) {
        let f = &self.f;
        let v = &self.reps[i];
        let w: Vec<u32> = (0..self.r)
            .map(|col| (0..self.r).fold(0, |s, row| f.add(s, f.mul(v[row], g[row][col]))))
            .collect();
        let (l, c) = self.canon(&w).expect("γ is invertible");
        (l, f.inv(c).unwrap())
    }
    fn mono_image(&self, m: &Mono, g: &FqMatrix) -> (Mono, u32) {
        let f = &self.f;
        let mut out = vec![0u16; m.len()];
        let mut s = 1u32;
        for (i, &e) in m.iter().enumerate() {
            if e > 0 {
                let (l, c) = self.var_image(i, g);
                out[l] += e;
                s = f.mul(s, f.pow(c, e as u64));
            }
        }
        (out, s)
    }
}

/// An element of R_V ⊗ k0, kept as a representative polynomial.
#[derive(Clone)]
pub struct RingElement {
    ctx: Arc<RingCtx>,
    terms: BTreeMap<Mono, K0>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(fm, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|e| *e.1 > 0)
                    .map(|(i, &e)| {
                        let name = format!("Y{}", self.ctx.reps[i].iter().map(|a| a.to_string()).collect::<String>());
                        if e == 1 { name } else { format!("{name}^{e}") }
                    })
                    .collect();
                match (vars.is_empty(), c.is_one()) {
                    (true, _) => format!("({c})"),
                    (false, true) => vars.join("*"),
                    (false, false) => format!("({c})*{}", vars.join("*")),
                }
            })
            .collect();
        write!(fm, "{}", parts.join(" + "))
    }
}

impl RingElement {
    pub fn ctx(&self) -> &Arc<RingCtx> {
        &self.ctx
    }
    pub fn zero(ctx: &Arc<RingCtx>) -> RingElement {
        RingElement { ctx: ctx.clone(), terms: BTreeMap::new() }
    }
    pub fn constant(ctx: &Arc<RingCtx>, c: K0) -> RingElement {
        let mut x = Self::zero(ctx);
        x.push(vec![0; ctx.nvars()], c);
        x
    }
    pub fn one(ctx: &Arc<RingCtx>) -> RingElement {
        Self::constant(ctx, K0::one(&ctx.f, ctx.mode))
    }
    /// Y_{rep_i}.
    pub fn var(ctx: &Arc<RingCtx>, i: usize) -> RingElement {
        let mut m = vec![0; ctx.nvars()];
        m[i] = 1;
        let mut x = Self::zero(ctx);
        x.push(m, K0::one(&ctx.f, ctx.mode));
        x
    }
    /// Y_v for any v ≠ 0.
    pub fn y(ctx: &Arc<RingCtx>, v: &[u32]) -> Result<RingElement> {
        let (i, a) = ctx.canon(v).ok_or_else(|| Error::Invalid("Y_0 is not defined".into()))?;
        let ai = ctx.f.inv(a)?;
        Ok(Self::var(ctx, i).scale(&K0::constant(&ctx.f, ctx.mode, ai)))
    }
    /// An F_q-combination of degree-k monomials given in slice coordinates.
    pub fn from_slice_vector(ctx: &Arc<RingCtx>, k: usize, v: &[u32]) -> Result<RingElement> {
        let s = ctx.slice(k)?;
        let mut x = Self::zero(ctx);
        for (i, &a) in v.iter().enumerate() {
            if a != 0 {
                x.push(s.monos[s.basis[i]].clone(), K0::constant(&ctx.f, ctx.mode, a));
            }
        }
        Ok(x)
    }
    fn push(&mut self, m: Mono, c: K0) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(a) => {
                *a = a.add(&c);
                if a.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }
    pub fn terms(&self) -> &BTreeMap<Mono, K0> {
        &self.terms
    }
    /// Zero as a representative (sufficient, not necessary, for zero in R_V).
    pub fn is_zero_rep(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &RingElement) -> RingElement {
        let mut x = self.clone();
        for (m, c) in &o.terms {
            x.push(m.clone(), c.clone());
        }
        x
    }
    pub fn neg(&self) -> RingElement {
        RingElement { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }
    pub fn sub(&self, o: &RingElement) -> RingElement {
        self.add(&o.neg())
    }
    pub fn scale(&self, a: &K0) -> RingElement {
        let mut x = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            x.push(m.clone(), c.mul(a));
        }
        x
    }
    pub fn mul(&self, o: &RingElement) -> RingElement {
        let mut x = Self::zero(&self.ctx);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Mono = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                x.push(m, c1.mul(c2));
            }
        }
        x
    }
    pub fn pow(&self, n: u64) -> RingElement {
        self.pow_r(n)
    }
    /// x^q, termwise in characteristic p.
    pub fn frob(&self) -> RingElement {
        let q = self.ctx.q as u16;
        let terms = self.terms.iter().map(|(m, c)| (m.iter().map(|e| e * q).collect(), c.frob())).collect();
        RingElement { ctx: self.ctx.clone(), terms }
    }
    /// Homogeneous components by degree.
    pub fn components(&self) -> BTreeMap<usize, RingElement> {
        let mut out: BTreeMap<usize, RingElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d: usize = m.iter().map(|&e| e as usize).sum();
            out.entry(d).or_insert_with(|| Self::zero(&self.ctx)).push(m.clone(), c.clone());
        }
        out
    }
    /// Normal form: per degree, coordinates over the standard monomials.
    pub fn normal_form(&self) -> Result<BTreeMap<usize, Vec<K0>>> {
        let mut out = BTreeMap::new();
        let zero = K0::zero(&self.ctx.f, self.ctx.mode);
        for (d, comp) in self.components() {
            let s = self.ctx.slice(d)?;
            let mut v = vec![zero.clone(); s.dim()];
            for (m, c) in &comp.terms {
                for (j, a) in s.reduce(&vec![(s.index[m], 1)]) {
                    v[j] = v[j].add(&c.scale(a));
                }
            }
            if v.iter().any(|x| !x.is_zero()) {
                out.insert(d, v);
            }
        }
        Ok(out)
    }
    /// The representative supported on standard monomials.
    pub fn reduced(&self) -> Result<RingElement> {
        let mut out = Self::zero(&self.ctx);
        for (d, v) in self.normal_form()? {
            let s = self.ctx.slice(d)?;
            for (j, c) in v.into_iter().enumerate() {
                out.push(s.monos[s.basis[j]].clone(), c);
            }
        }
        Ok(out)
    }
    /// Zero in R_V ⊗ k0.
    pub fn is_zero(&self) -> Result<bool> {
        if self.is_zero_rep() {
            return Ok(true);
        }
        Ok(self.normal_form()?.is_empty())
    }
    pub fn equals(&self, o: &RingElement) -> Result<bool> {
        self.sub(o).is_zero()
    }
    /// The action Y_v ↦ Y_{vγ}.
    pub fn act(&self, g: &FqMatrix) -> RingElement {
        let ctx = &self.ctx;
        let mut x = Self::zero(ctx);
        for (m, c) in &self.terms {
            let (m2, s) = ctx.mono_image(m, g);
            x.push(m2, c.scale(s));
        }
        x
    }
}

impl PartialEq for RingElement {
    /// Equality of representatives.
    fn eq(&self, o: &RingElement) -> bool {
        self.terms == o.terms
    }
}

impl RingLike for RingElement {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.ctx)
    }
    fn int_like(&self, c: i64) -> Self {
        Self::constant(&self.ctx, K0::constant(&self.ctx.f, self.ctx.mode, self.ctx.f.from_int(c)))
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
        self.is_zero_rep()
    }
}

impl Coeff for RingElement {
    fn q(&self) -> u32 {
        self.ctx.q
    }
    fn base(&self) -> Gf {
        self.ctx.f.clone()
    }
    fn frob_q(&self) -> Self {
        self.frob()
    }
    fn from_fq(&self, a: u32) -> Self {
        Self::constant(&self.ctx, K0::constant(&self.ctx.f, self.ctx.mode, a))
    }
    fn from_f(&self, x: &RatF) -> Result<Self> {
        Ok(Self::constant(&self.ctx, K0::from_t(x, self.ctx.mode)))
    }
}

// ---------------------------------------------------------------------------
// Groups and invariants

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Gl,
    Sl,
    /// Upper unitriangular matrices: the image of Γ_1(t).
    U1,
    /// The trivial group: Γ(t) itself.
    GammaT,
}

impl Group {
    pub fn parse(s: &str) -> Result<Group> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Ok(Group::Gl),
            "SL" => Ok(Group::Sl),
            "U1" | "GAMMA1" | "GAMMA1_T" => Ok(Group::U1),
            "GAMMA_T" | "GAMMAT" | "TRIVIAL" => Ok(Group::GammaT),
            _ => Err(Error::Parse(format!("unknown group {s}"))),
        }
    }
    pub fn name(&self) -> &'static str {
        match self {
            Group::Gl => "GL",
            Group::Sl => "SL",
            Group::U1 => "U1",
            Group::GammaT => "GAMMA_T",
        }
    }
}

fn identity(r: usize) -> FqMatrix {
    (0..r).map(|i| (0..r).map(|j| (i == j) as u32).collect()).collect()
}

fn elementary(r: usize, i: usize, j: usize, a: u32) -> FqMatrix {
    let mut m = identity(r);
    m[i][j] = a;
    m
}

/// Generators of the group inside GL_r(F_q).
pub fn generators(f: &Gf, r: usize, g: Group) -> Vec<FqMatrix> {
    let q = f.size();
    let mut out = vec![];
    for i in 0..r {
        for j in 0..r {
            let keep = match g {
                Group::Gl | Group::Sl => i != j,
                Group::U1 => i < j,
                Group::GammaT => false,
            };
            if keep {
                for a in 1..q {
                    out.push(elementary(r, i, j, a));
                }
            }
        }
    }
    if g == Group::Gl {
        let mut d = identity(r);
        d[0][0] = f.primitive();
        out.push(d);
    }
    out
}

/// All of GL_r(F_q) (for exhaustive checks at small sizes).
pub fn all_gl(f: &Gf, r: usize) -> Vec<FqMatrix> {
    let q = f.size() as usize;
    let total = q.pow((r * r) as u32);
    let mut out = vec![];
    for idx in 0..total {
        let mut m = vec![vec![0u32; r]; r];
        let mut x = idx;
        for row in m.iter_mut() {
            for a in row.iter_mut() {
                *a = (x % q) as u32;
                x /= q;
            }
        }
        if crate::linalg::det(f, &m) != 0 {
            out.push(m);
        }
    }
    out
}

/// A basis of the degree-k forms f with γf = det(γ)^{−m}·f for all γ in the
/// group (m = 0: invariants).
pub fn invariants(ctx: &Arc<RingCtx>, k: usize, g: Group, m: u32) -> Result<Vec<RingElement>> {
    let f = &ctx.f;
    let s = ctx.slice(k)?;
    let d = s.dim();
    let mut mats = vec![];
    for gamma in generators(f, ctx.r, g) {
        let det = crate::linalg::det(f, &gamma);
        let chi = f.inv(f.pow(det, m as u64))?;
        let rows: Vec<SparseVec> = (0..d)
            .map(|b| {
                let (img, sc) = ctx.mono_image(&s.monos[s.basis[b]], &gamma);
                let mut v = s.reduce(&vec![(s.index[&img], sc)]);
                // subtract χ·e_b
                match v.iter_mut().find(|e| e.0 == b) {
                    Some(e) => e.1 = f.sub(e.1, chi),
                    None => {
                        v.push((b, f.neg(chi)));
                        v.sort();
                    }
                }
                v.retain(|e| e.1 != 0);
                v
            })
            .collect();
        mats.push(rows);
    }
    if mats.is_empty() {
        return (0..d)
            .map(|i| {
                let mut v = vec![0u32; d];
                v[i] = 1;
                RingElement::from_slice_vector(ctx, k, &v)
            })
            .collect();
    }
    left_kernel(f, d, &mats).iter().map(|v| RingElement::from_slice_vector(ctx, k, v)).collect()
}

/// Rank over k0 of homogeneous degree-k elements whose normal forms are each
/// a k0-multiple of an F_q-vector (true for products of the generators used
/// here); errors otherwise.
pub fn rank_of(ctx: &Arc<RingCtx>, k: usize, xs: &[RingElement]) -> Result<usize> {
    let s = ctx.slice(k)?;
    let mut rows: Vec<SparseVec> = vec![];
    for x in xs {
        let nf = x.normal_form()?;
        let Some(v) = nf.get(&k) else { continue };
        let lead = v.iter().find(|c| !c.is_zero()).unwrap().clone();
        let mut row = vec![];
        for (j, c) in v.iter().enumerate() {
            let a = c.div(&lead)?;
            let a = a.as_constant().ok_or_else(|| Error::Invalid("normal form is not a multiple of an F_q-vector".into()))?;
            if a != 0 {
                row.push((j, a));
            }
        }
        rows.push(row);
    }
    Ok(crate::linalg::rank(&ctx.f, s.dim(), &rows))
}

// ---------------------------------------------------------------------------
// Dickson-type generators

/// ψ_t over R_V: the coefficients g_{t,0..r}, the e- and E-forms derived
/// from them, δ_t (extended mode only), and the coefficients at non-q-power
/// X-degrees, which must vanish.
pub struct Dickson {
    pub g: Vec<RingElement>,
    pub e: Vec<RingElement>,
    /// E_{q^i−1}, index 0 unused.
    pub eis: Vec<RingElement>,
    pub delta: Option<RingElement>,
    /// (X-degree, coefficient) at each non-q-power degree.
    pub non_q_power: Vec<(usize, RingElement)>,
}

impl Dickson {
    /// (X-degree, vanishes in R_V) for each non-q-power coefficient.
    pub fn non_q_power_vanish(&self) -> Result<Vec<(usize, bool)>> {
        self.non_q_power.iter().map(|(d, c)| Ok((*d, c.is_zero()?))).collect()
    }
}

/// ψ_t(X) = t·X·Π_{v≠0}(1 − Y_v X) = t·X·Π_{projective v}(1 − Y_v^{q−1}X^{q−1}),
/// so the coefficient of X^{1+(q−1)j} is t·(−1)^j·e_j(Y^{q−1}).
pub fn dickson(ctx: &Arc<RingCtx>) -> Result<Dickson> {
    let f = &ctx.f;
    let q = ctx.q as usize;
    let n = ctx.nvars();
    let one = RingElement::one(ctx);
    let mut el: Vec<RingElement> = vec![one.clone()];
    for i in 0..n {
        let z = RingElement::var(ctx, i).pow(q as u64 - 1);
        let mut next = el.clone();
        next.push(RingElement::zero(ctx));
        for j in 1..next.len() {
            next[j] = next[j].add(&z.mul(&el[j - 1]));
        }
        el = next;
    }
    let t = K0::t(f, ctx.mode);
    let mut g = vec![];
    let mut non_q_power = vec![];
    for (j, ej) in el.iter().enumerate() {
        let deg = 1 + (q - 1) * j;
        let c = ej.scale(&t.scale(if j % 2 == 0 { 1 } else { f.neg(1) }));
        if is_power(deg, q) {
            g.push(c);
        } else {
            non_q_power.push((deg, c));
        }
    }
    let e = crate::drinfeld::exp_from_psi_t(&g, ctx.r)?;
    let eis = crate::drinfeld::eisenstein_from_exp(&e);
    let delta = match ctx.mode {
        Mode::Extended => {
            let mut d = RingElement::constant(ctx, K0::lambda(f, ctx.mode)?);
            for i in 0..n {
                d = d.mul(&RingElement::var(ctx, i));
            }
            Some(d)
        }
        Mode::Plain => None,
    };
    Ok(Dickson { g, e, eis, delta, non_q_power })
}

fn is_power(mut x: usize, q: usize) -> bool {
    while x % q == 0 {
        x /= q;
    }
    x == 1
}

/// ψ_N = Σ_i a_i ψ_t^{∘i} for N = Σ a_i t^i, as coefficients g_{N,0..r·deg N}.
pub fn psi_symbolic(ctx: &Arc<RingCtx>, n: &Poly) -> Result<Vec<RingElement>> {
    use crate::drinfeld::AdditivePoly;
    let d = n.deg().ok_or_else(|| Error::Invalid("N must be nonzero".into()))?;
    let psi_t = AdditivePoly::new(dickson(ctx)?.g);
    let mut out = vec![RingElement::zero(ctx); ctx.r * d + 1];
    let mut power = AdditivePoly::new(vec![RingElement::one(ctx)]);
    for (i, &a) in n.coeffs().iter().enumerate() {
        if i > 0 {
            power = power.compose(&psi_t);
        }
        let a = K0::constant(&ctx.f, ctx.mode, a);
        for (j, c) in power.c.iter().enumerate() {
            out[j] = out[j].add(&c.scale(&a));
        }
    }
    Ok(out)
}

/// The Γ_1(t) weight-one forms Σ_{α_{i+1..r}} Y_{(0,…,0,1,α_{i+1},…,α_r)}.
pub fn gamma1_generators(ctx: &Arc<RingCtx>) -> Vec<RingElement> {
    let r = ctx.r;
    (0..r)
        .map(|i| {
            let mut s = RingElement::zero(ctx);
            for rep in &ctx.reps {
                if rep[..i].iter().all(|&a| a == 0) && rep[i] == 1 {
                    s = s.add(&RingElement::var(ctx, ctx.canon(rep).unwrap().0));
                }
            }
            s
        })
        .collect()
}

/// Exponent vectors a with Σ a_i w_i = k.
pub fn weighted_monomials(weights: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(w: &[usize], k: usize, pre: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if w.is_empty() {
            if k == 0 {
                out.push(pre.clone());
            }
            return;
        }
        for a in 0..=k / w[0] {
            pre.push(a);
            rec(&w[1..], k - a * w[0], pre, out);
            pre.pop();
        }
    }
    let mut out = vec![];
    rec(weights, k, &mut vec![], &mut out);
    out
}

pub fn monomial_in(gens: &[RingElement], a: &[usize]) -> RingElement {
    let mut x = gens[0].one_like();
    for (g, &e) in gens.iter().zip(a) {
        x = x.mul(&g.pow(e as u64));
    }
    x
}

// ---------------------------------------------------------------------------
// Dimension tables and structural checks

/// One row of a dimension table: the closed formula against the computed
/// dimension. For U1, `formula` is the printed C(k−1, r−1) and `corrected`
/// the polynomial-ring count C(k+r−1, r−1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimRow {
    pub k: usize,
    pub formula: u128,
    pub corrected: Option<u128>,
    pub computed: usize,
}

impl DimRow {
    pub fn matches(&self) -> bool {
        self.formula == self.computed as u128
    }
}

pub fn formula_dim(q: u32, r: usize, k: usize, g: Group, m: u32) -> Result<(u128, Option<u128>)> {
    let (q, k) = (q as u64, k as u64);
    Ok(match g {
        Group::GammaT => (crate::dims::dim_gamma_t(q, r, k)?, None),
        Group::Gl => (crate::dims::dim_type_m(q, r, k, m as u64)?, None),
        Group::Sl => {
            let mut s = 0;
            for m in 0..(q - 1).max(1) {
                s += crate::dims::dim_type_m(q, r, k, m)?;
            }
            (s, None)
        }
        Group::U1 => (crate::dims::dim_gamma1_t_printed(r, k)?, Some(crate::dims::dim_gamma1_t(r, k)?)),
    })
}

pub fn dimension_table(ctx: &Arc<RingCtx>, g: Group, m: u32, kmax: usize) -> Result<Vec<DimRow>> {
    (0..=kmax)
        .map(|k| {
            let computed = match g {
                Group::GammaT => ctx.slice(k)?.dim(),
                _ => invariants(ctx, k, g, m)?.len(),
            };
            let (formula, corrected) = formula_dim(ctx.q, ctx.r, k, g, m)?;
            Ok(DimRow { k, formula, corrected, computed })
        })
        .collect()
}

/// Type m part of the SL-invariants in weight k against δ^m times the
/// GL-invariants of weight k − m(q^r−1)/(q−1).
#[derive(Clone, Debug)]
pub struct TypeRow {
    pub m: u32,
    pub dim: usize,
    pub source_dim: usize,
    pub image_rank: usize,
    /// Every δ^m·f lies in the type-m eigenspace.
    pub image_has_type: bool,
}

impl TypeRow {
    pub fn holds(&self) -> bool {
        self.dim == self.source_dim && self.image_rank == self.source_dim && self.image_has_type
    }
}

#[derive(Clone, Debug)]
pub struct TypeDecomposition {
    pub k: usize,
    pub sl_dim: usize,
    pub rows: Vec<TypeRow>,
}

impl TypeDecomposition {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds()) && self.rows.iter().map(|r| r.dim).sum::<usize>() == self.sl_dim
    }
}

fn has_type(x: &RingElement, m: u32) -> Result<bool> {
    let ctx = x.ctx();
    let f = &ctx.f;
    for gamma in generators(f, ctx.r, Group::Gl) {
        let det = crate::linalg::det(f, &gamma);
        let chi = f.inv(f.pow(det, m as u64))?;
        if !x.act(&gamma).equals(&x.scale(&K0::constant(f, ctx.mode, chi)))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn type_decomposition(ctx: &Arc<RingCtx>, k: usize) -> Result<TypeDecomposition> {
    if ctx.mode != Mode::Extended {
        return Err(Error::Mode("δ_t needs the extended coefficient field".into()));
    }
    let delta = dickson(ctx)?.delta.expect("extended mode");
    let n = ctx.nvars();
    let sl_dim = invariants(ctx, k, Group::Sl, 0)?.len();
    let mut rows = vec![];
    for m in 0..(ctx.q - 1).max(1) {
        let dim = invariants(ctx, k, Group::Gl, m)?.len();
        let shift = m as usize * n;
        let (source_dim, image_rank, image_has_type) = if k >= shift {
            let src = invariants(ctx, k - shift, Group::Gl, 0)?;
            let dm = delta.pow(m as u64);
            let imgs: Vec<RingElement> = src.iter().map(|x| dm.mul(x)).collect();
            let mut typed = true;
            for x in &imgs {
                typed &= has_type(x, m)?;
            }
            (src.len(), rank_of(ctx, k, &imgs)?, typed)
        } else {
            (0, 0, true)
        };
        rows.push(TypeRow { m, dim, source_dim, image_rank, image_has_type });
    }
    Ok(TypeDecomposition { k, sl_dim, rows })
}

/// (dim of GL-invariants in weight k − (q^r − 1), rank of their Δ_t-multiples).
pub fn discriminant_multiplication(ctx: &Arc<RingCtx>, k: usize) -> Result<(usize, usize)> {
    let w = (ctx.q as usize).pow(ctx.r as u32) - 1;
    if k < w {
        return Ok((0, 0));
    }
    let big_delta = dickson(ctx)?.g[ctx.r].clone();
    let src = invariants(ctx, k - w, Group::Gl, 0)?;
    let imgs: Vec<RingElement> = src.iter().map(|x| big_delta.mul(x)).collect();
    Ok((src.len(), rank_of(ctx, k, &imgs)?))
}

/// (number of weight-k monomials in the generators, rank of their span).
pub fn monomial_independence(ctx: &Arc<RingCtx>, gens: &[RingElement], weights: &[usize], k: usize) -> Result<(usize, usize)> {
    let monos: Vec<RingElement> = weighted_monomials(weights, k).iter().map(|a| monomial_in(gens, a)).collect();
    Ok((monos.len(), rank_of(ctx, k, &monos)?))
}

pub fn dickson_independence(ctx: &Arc<RingCtx>, k: usize) -> Result<(usize, usize)> {
    let d = dickson(ctx)?;
    let weights: Vec<usize> = (1..=ctx.r).map(|i| (ctx.q as usize).pow(i as u32) - 1).collect();
    monomial_independence(ctx, &d.g[1..], &weights, k)
}

pub fn gamma1_independence(ctx: &Arc<RingCtx>, k: usize) -> Result<(usize, usize)> {
    let gens = gamma1_generators(ctx);
    monomial_independence(ctx, &gens, &vec![1; ctx.r], k)
}

/// δ_t^{q−1} against Δ_t: (literal equality, equality with the sign
/// (−1)^{n+1}, n = (q^r−1)/(q−1)).
pub fn delta_power_check(ctx: &Arc<RingCtx>) -> Result<(bool, bool)> {
    let d = dickson(ctx)?;
    let delta = d.delta.ok_or_else(|| Error::Mode("δ_t needs the extended coefficient field".into()))?;
    let lhs = delta.pow(ctx.q as u64 - 1);
    let big = &d.g[ctx.r];
    let sign = if ctx.nvars() % 2 == 1 { 1 } else { ctx.f.neg(1) };
    let signed = big.scale(&K0::constant(&ctx.f, ctx.mode, sign));
    Ok((lhs.equals(big)?, lhs.equals(&signed)?))
}

/// ψ_{t²} = ψ_t ∘ ψ_t: its degree is q^{2r} and its top coefficient Δ_{t²}
/// equals Δ_t^{1+q^r}.
pub fn iterated_discriminant_check(ctx: &Arc<RingCtx>) -> Result<bool> {
    let d = dickson(ctx)?;
    let psi = crate::drinfeld::AdditivePoly::new(d.g.clone());
    let psi2 = psi.compose(&psi);
    let r = ctx.r;
    let top = d.g[r].pow(1 + (ctx.q as u64).pow(r as u32));
    Ok(psi2.qdeg() == 2 * r && !top.is_zero_rep() && psi2.top().equals(&top)?)
}

/// Moore determinant of ring elements against the product over F_q-tuples:
/// (first-nonzero-1 normalization, last-nonzero-1 normalization).
pub fn moore_ring_check(xs: &[RingElement]) -> Result<(bool, bool)> {
    use crate::drinfeld::{moore_det, moore_product, MooreNorm};
    let m = moore_det(xs);
    let first = moore_product(xs, MooreNorm::FirstNonzero);
    let last = moore_product(xs, MooreNorm::LastNonzero);
    Ok((m.equals(&first)?, m.equals(&last)?))
}

/// Σ_{i+j=k} e_i E_{q^j−1}^{q^i} = 0 for 1 ≤ k ≤ K over R_V ⊗ k0.
pub fn compositional_inverse_symbolic(ctx: &Arc<RingCtx>, kk: usize) -> Result<bool> {
    let g = dickson(ctx)?.g;
    let e = crate::drinfeld::exp_from_psi_t(&g, kk)?;
    let big = crate::drinfeld::eisenstein_from_exp(&e);
    for res in crate::drinfeld::compositional_inverse_residuals(&e, &big, kk) {
        if !res.is_zero()? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims;

    fn ctx(q: u32, r: usize) -> Arc<RingCtx> {
        RingCtx::new(q, r, Mode::Extended, 50_000).unwrap()
    }

    #[test]
    fn slice_dims_match_gamma_t_formula() {
        for (q, r, kmax) in [(2u32, 2usize, 6usize), (3, 2, 6), (2, 3, 6), (3, 3, 4)] {
            let c = ctx(q, r);
            for k in 0..=kmax {
                let d = c.slice(k).unwrap().dim() as u128;
                assert_eq!(d, dims::dim_gamma_t(q as u64, r, k as u64).unwrap(), "q={q} r={r} k={k}");
            }
        }
    }

    #[test]
    fn relations_hold_and_products_associate() {
        let c = ctx(3, 2);
        let f = c.f.clone();
        let vs: Vec<Vec<u32>> = (1..9u32).map(|i| vec![i / 3, i % 3]).collect();
        for v in &vs {
            for w in &vs {
                let s: Vec<u32> = v.iter().zip(w).map(|(a, b)| f.add(*a, *b)).collect();
                if s.iter().all(|&a| a == 0) {
                    continue;
                }
                let yv = RingElement::y(&c, v).unwrap();
                let yw = RingElement::y(&c, w).unwrap();
                let ys = RingElement::y(&c, &s).unwrap();
                let rel = yv.mul(&yw).sub(&ys.mul(&yv.add(&yw)));
                assert!(rel.is_zero().unwrap(), "v={v:?} w={w:?}");
            }
            // Y_{αv} = α⁻¹ Y_v
            let v2: Vec<u32> = v.iter().map(|&a| f.mul(2, a)).collect();
            let lhs = RingElement::y(&c, &v2).unwrap();
            let rhs = RingElement::y(&c, v).unwrap().scale(&K0::constant(&f, c.mode, f.inv(2).unwrap()));
            assert_eq!(lhs, rhs);
        }
        let x = RingElement::var(&c, 0).add(&RingElement::var(&c, 2));
        let y = RingElement::var(&c, 1).mul(&RingElement::var(&c, 3)).add(&RingElement::one(&c));
        let z = RingElement::var(&c, 3).sub(&RingElement::var(&c, 1).scale(&K0::t(&f, c.mode)));
        let a = x.mul(&y).mul(&z);
        let b = x.mul(&y.mul(&z));
        assert!(a.equals(&b).unwrap());
        // Frobenius is additive
        assert!(x.add(&z).frob().equals(&x.frob().add(&z.frob())).unwrap());
    }

    #[test]
    fn dickson_coefficients() {
        for (q, r) in [(2u32, 2usize), (3, 2), (2, 3)] {
            let c = ctx(q, r);
            let d = dickson(&c).unwrap();
            let v = d.non_q_power_vanish().unwrap();
            assert!(v.iter().all(|x| x.1), "q={q} r={r}: {v:?}");
            assert_eq!(d.g.len(), r + 1);
            assert_eq!(d.g[0], RingElement::constant(&c, K0::t(&c.f, c.mode)));
            if r == 2 {
                for gamma in all_gl(&c.f, r) {
                    for gi in &d.g {
                        assert_eq!(&gi.act(&gamma), gi);
                    }
                    let det = crate::linalg::det(&c.f, &gamma);
                    let delta = d.delta.as_ref().unwrap();
                    let chi = K0::constant(&c.f, c.mode, c.f.inv(det).unwrap());
                    assert_eq!(delta.act(&gamma), delta.scale(&chi));
                }
            }
        }
    }

    #[test]
    fn symbolic_identities() {
        for (q, r) in [(2u32, 2usize), (3, 2), (2, 3)] {
            let c = ctx(q, r);
            assert!(iterated_discriminant_check(&c).unwrap(), "q={q} r={r}");
            assert!(compositional_inverse_symbolic(&c, 2).unwrap(), "q={q} r={r}");
            let (literal, signed) = delta_power_check(&c).unwrap();
            assert!(signed);
            // n = q+1 for r = 2: even when q is odd
            assert_eq!(literal, !(q == 3 && r == 2));
            let ys: Vec<RingElement> = (0..3.min(c.nvars())).map(|i| RingElement::var(&c, i)).collect();
            let quad = ys[0].mul(&ys[1]).add(&ys[2].pow(2));
            for xs in [ys.clone(), vec![ys[0].clone(), quad]] {
                let (first, last) = moore_ring_check(&xs).unwrap();
                assert!(last);
                assert_eq!(first, q == 2 || xs.len() == 1);
            }
        }
    }

    #[test]
    fn structure_checks() {
        for (q, r, kmax) in [(2u32, 2usize, 6usize), (3, 2, 8), (2, 3, 7)] {
            let c = ctx(q, r);
            for k in 0..=kmax {
                let td = type_decomposition(&c, k).unwrap();
                assert!(td.holds(), "q={q} r={r} k={k}: {td:?}");
                let (src, rank) = discriminant_multiplication(&c, k).unwrap();
                assert_eq!(src, rank);
                let (n, rank) = dickson_independence(&c, k).unwrap();
                assert_eq!(n as u128, dims::partitions_ps(q as u64, r, k as u64).unwrap());
                assert_eq!(n, rank);
                let (n, rank) = gamma1_independence(&c, k).unwrap();
                assert_eq!(n as u128, dims::dim_gamma1_t(r, k as u64).unwrap());
                assert_eq!(n, rank);
            }
        }
        let c = ctx(3, 2);
        let td = type_decomposition(&c, 4).unwrap();
        assert_eq!(td.rows[1].dim, 1);
        let td = type_decomposition(&c, 8).unwrap();
        assert_eq!(td.rows[1].dim, 1);
    }

    #[test]
    fn invariant_dimensions() {
        for (q, r, kmax) in [(2u32, 2usize, 6usize), (3, 2, 6), (2, 3, 4)] {
            let c = ctx(q, r);
            for k in 0..=kmax {
                let gl = invariants(&c, k, Group::Gl, 0).unwrap().len() as u128;
                assert_eq!(gl, dims::partitions_ps(q as u64, r, k as u64).unwrap(), "GL q={q} r={r} k={k}");
                let sl = invariants(&c, k, Group::Sl, 0).unwrap().len() as u128;
                let types: u128 = (0..(q as u64 - 1).max(1))
                    .map(|m| dims::dim_type_m(q as u64, r, k as u64, m).unwrap())
                    .sum();
                assert_eq!(sl, types, "SL q={q} r={r} k={k}");
                let u1 = invariants(&c, k, Group::U1, 0).unwrap().len() as u128;
                assert_eq!(u1, dims::dim_gamma1_t(r, k as u64).unwrap(), "U1 q={q} r={r} k={k}");
            }
        }
    }
}
