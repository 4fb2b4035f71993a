//! Eisenstein series E_{k,v+L}(ω) = Σ_{0≠x∈v+L} (xω)^{−k} and lattice
//! exponentials e_{Lω}, evaluated in the C_∞ model with tracked precision.
//!
//! Summation is done by balls: with a reduced basis of L at a certified
//! point, the lattice vectors of norm < q^ρ form a finite F_q-space H, and the
//! part of the coset inside the ball is v0 + H for the minimal representative
//! v0. The ball sum is then G_k(1/e_{Hω}(v0ω), e_{Hω,q}, ...) exactly, and
//! everything outside the ball is bounded term by term by q^{−kρ}.

use crate::error::{Error, Result};
use crate::goss::goss;
use crate::lattice::{mat, LatticeCoset, Matrix, OmegaPoint, UFrame, Vector};
use crate::poly::{Poly, RatF};
use crate::tail::{Exp, Tail};
use serde_json::{json, Value};

#[derive(Clone, Debug)]
pub struct EvalConfig {
    /// Largest F_q-dimension of a ball.
    pub max_dim: usize,
    /// Largest working relative precision (in powers of t).
    pub max_rel: i128,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { max_dim: 72, max_rel: 1024 }
    }
}

/// Keep `rel` powers of t of relative precision.
pub(crate) fn tr(x: &Tail, rel: i128) -> Tail {
    x.truncate_rel(rel * x.ram() as i128)
}

fn fr(x: &Tail, rel: i128) -> Tail {
    x.frob_trunc(rel * x.ram() as i128)
}

fn neg_exp(x: Exp) -> Exp {
    Exp::int(0).sub(x)
}

/// Known to absolute precision at least P.
fn reaches(x: &Tail, p: Exp) -> bool {
    x.prec().map_or(true, |q| q >= p)
}

fn abs_trunc(x: &Tail, p: Exp) -> Tail {
    let e = x.ram() as i128;
    x.truncate_abs((p.num * e).div_euclid(p.den))
}

/// A basis of L whose vectors have pairwise distinct leading positions at ω,
/// so that |Σ a_j b_j ω| = max_j |a_j| |b_j ω|.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub vecs: Vec<Vector>,
    pub norms: Vec<Exp>,
    pub pos: Vec<usize>,
}

fn lead_coeff(x: &RatF) -> u32 {
    x.lc()
}

fn step(x: &[RatF], y: &[RatF], i: usize) -> Vector {
    // x − c t^d y with the leading terms at position i cancelling
    let f = x[0].field();
    let d = x[i].deg() - y[i].deg();
    debug_assert!(d >= 0);
    let c = f.div(lead_coeff(&x[i]), lead_coeff(&y[i])).unwrap();
    let m = RatF::from_poly(Poly::monomial(f, c, d as usize));
    mat::vec_sub(x, &mat::vec_scale(&m, y))
}

pub fn reduce_basis(basis: &Matrix, w: &OmegaPoint) -> Result<ReducedBasis> {
    if !w.is_certified() {
        return Err(Error::Invalid("reduction needs a certified point".into()));
    }
    let mut vecs: Vec<Vector> = basis.clone();
    loop {
        let pos: Vec<usize> = vecs.iter().map(|b| w.lead_pos(b).unwrap()).collect();
        let norms: Vec<Exp> = vecs.iter().map(|b| w.norm_exp(b).unwrap()).collect();
        let clash = (0..vecs.len())
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .find(|&(i, j)| pos[i] == pos[j]);
        match clash {
            None => return Ok(ReducedBasis { vecs, norms, pos }),
            Some((i, j)) => {
                let (big, small) = if norms[i] >= norms[j] { (i, j) } else { (j, i) };
                vecs[big] = step(&vecs[big], &vecs[small], pos[i]);
            }
        }
    }
}

/// The element of least norm in v + L (None if v ∈ L).
pub fn minimal_rep(red: &ReducedBasis, v: &[RatF], w: &OmegaPoint) -> Option<Vector> {
    let mut x = v.to_vec();
    loop {
        let p = w.lead_pos(&x)?;
        let j = red.pos.iter().position(|&q| q == p).unwrap();
        if w.norm_exp(&x).unwrap() < red.norms[j] {
            return Some(x);
        }
        x = step(&x, &red.vecs[j], p);
    }
}

/// The F_q-space H of lattice vectors below a norm bound, grown one
/// generator t^d b_j at a time, with the coefficients of e_{Hω}.
pub struct Ball {
    q: u32,
    red: ReducedBasis,
    vals: Vec<Tail>,
    next_d: Vec<i64>,
    pub gens: Vec<(usize, i64)>,
    pub gen_norms: Vec<Exp>,
    /// α_0 = 1, α_1, ...: e_H(z) = Σ α_i z^{q^i}.
    pub alphas: Vec<Tail>,
    rel: i128,
}

impl Ball {
    pub fn new(red: ReducedBasis, w: &OmegaPoint, rel: i128) -> Ball {
        let vals = red
            .vecs
            .iter()
            .zip(&red.norms)
            .map(|(b, n)| w.pairing(b, Exp::int(rel).sub(*n)))
            .collect();
        let r = red.vecs.len();
        Ball {
            q: w.ctx().q,
            red,
            vals,
            next_d: vec![0; r],
            gens: vec![],
            gen_norms: vec![],
            alphas: vec![Tail::one(w.ctx())],
            rel,
        }
    }
    pub fn dim(&self) -> usize {
        self.gens.len()
    }
    pub fn rel(&self) -> i128 {
        self.rel
    }
    /// The next generator (j, d) and its norm.
    pub fn next_gen(&self) -> (usize, i64, Exp) {
        (0..self.red.vecs.len())
            .map(|j| (j, self.next_d[j], self.red.norms[j].add(Exp::int(self.next_d[j] as i128))))
            .min_by_key(|x| x.2)
            .unwrap()
    }
    pub fn gen_value(&self, j: usize, d: i64) -> Tail {
        let v = &self.vals[j];
        v.shift(d as i128 * v.ram() as i128)
    }
    /// e_H(z).
    pub fn exp_at(&self, z: &Tail) -> Tail {
        let mut zp = tr(z, self.rel);
        let mut s = Tail::zero(z.ctx());
        for (i, a) in self.alphas.iter().enumerate() {
            if i > 0 {
                zp = fr(&zp, self.rel);
            }
            s = s.add(&tr(&a.mul(&zp), self.rel));
        }
        s
    }
    /// |e_H(w)| for the next generator w: a lower bound for |e_H| on L ∖ H.
    pub fn next_exp_norm(&self) -> Result<Exp> {
        let (j, d, _) = self.next_gen();
        self.exp_at(&self.gen_value(j, d))
            .norm_exp()
            .ok_or_else(|| Error::PrecisionExhausted("e_H vanishes to working precision".into()))
    }
    /// H ← H + F_q w: e' = e − e^q / e(w)^{q−1}.
    pub fn grow(&mut self) -> Result<()> {
        let (j, d, n) = self.next_gen();
        let w = self.gen_value(j, d);
        let ew = self.exp_at(&w);
        if ew.is_zero() {
            return Err(Error::PrecisionExhausted("e_H(w) vanishes to working precision".into()));
        }
        let c = tr(&ew.pow(self.q as u64 - 1), self.rel);
        let cinv = c.inv()?;
        let n_old = self.alphas.len();
        let mut out = Vec::with_capacity(n_old + 1);
        for i in 0..=n_old {
            let mut a = if i < n_old { self.alphas[i].clone() } else { Tail::zero(w.ctx()) };
            if i >= 1 {
                let s = tr(&fr(&self.alphas[i - 1], self.rel).mul(&cinv), self.rel);
                a = a.sub(&s);
            }
            out.push(a);
        }
        self.alphas = out;
        self.gens.push((j, d));
        self.gen_norms.push(n);
        self.next_d[j] += 1;
        Ok(())
    }
    /// Include every lattice vector of norm < ρ.
    pub fn grow_below(&mut self, rho: Exp, max_dim: usize) -> Result<()> {
        while self.next_gen().2 < rho {
            if self.dim() >= max_dim {
                return Err(Error::Budget(format!(
                    "ball of radius q^{rho} needs F_q-dimension > {max_dim}"
                )));
            }
            self.grow()?;
        }
        Ok(())
    }
}

/// log_q |e_{Lω}(z)| for z of norm q^T that is minimal in its coset z + Lω:
/// T + Σ_{0≠λ, |λ|<q^T} (T − log_q|λ|).
pub fn exp_log_norm(red: &ReducedBasis, q: u32, t: Exp) -> Exp {
    let q = q as i128;
    let mut norms: Vec<Exp> = vec![];
    for n in &red.norms {
        let mut d = 0;
        while n.add(Exp::int(d)) < t {
            norms.push(n.add(Exp::int(d)));
            d += 1;
        }
    }
    norms.sort();
    // the i-th generator (from 0) adds q^i (q − 1) elements of its norm
    let mut s = t;
    let mut count = q - 1;
    for n in norms {
        s = s.add(t.sub(n).mul_int(count));
        count *= q;
    }
    s
}

/// Σ_{h∈H, h≠0} h^{−k} = −[z^k](z/e_H(z)).
fn power_sum(alphas: &[Tail], q: u32, k: usize, rel: i128) -> Tail {
    let ctx = alphas[0].ctx();
    // e_H(z)/z = Σ α_i z^{q^i − 1}; invert as a power series in z up to z^k
    let mut g: Vec<Tail> = vec![Tail::one(ctx)];
    for n in 1..=k {
        let mut s = Tail::zero(ctx);
        let mut qi = q as usize;
        let mut i = 1;
        while qi - 1 <= n && i < alphas.len() {
            s = s.add(&tr(&alphas[i].mul(&g[n - (qi - 1)]), rel));
            qi *= q as usize;
            i += 1;
        }
        g.push(s.neg());
    }
    g[k].neg()
}

#[derive(Clone, Debug)]
pub struct EisValue {
    pub value: Tail,
    pub dim: usize,
    pub radius: Exp,
    pub rel: i128,
}

impl EisValue {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.render(),
            "certified_precision": self.value.prec().map(|p| p.to_string()),
            "terms_used": self.dim,
            "ball_radius": self.radius.to_string(),
        })
    }
}

/// E_{k,v+L}(ω) modulo O(t^{−P}).
pub fn eval_eisenstein(c: &LatticeCoset, w: &OmegaPoint, k: usize, p: Exp, cfg: &EvalConfig) -> Result<EisValue> {
    eval_eisenstein_radius(c, w, k, p, Exp::new(p.num, p.den * k as i128), cfg)
}

/// As [`eval_eisenstein`], with an explicit ball radius ρ ≥ P/k.
pub fn eval_eisenstein_radius(
    c: &LatticeCoset,
    w: &OmegaPoint,
    k: usize,
    p: Exp,
    rho: Exp,
    cfg: &EvalConfig,
) -> Result<EisValue> {
    if k == 0 {
        return Err(Error::Invalid("weight must be ≥ 1".into()));
    }
    if rho.mul_int(k as i128) < p {
        return Err(Error::Invalid("ball radius below P/k".into()));
    }
    let red = reduce_basis(c.basis(), w)?;
    let v0 = minimal_rep(&red, c.v(), w);
    let ctx = w.ctx();
    let e = w.ram();
    if let Some(v0) = &v0 {
        if w.norm_exp(v0).unwrap() >= rho {
            let pn = (p.num * e as i128 + p.den - 1) / p.den;
            return Ok(EisValue { value: Tail::zero_prec(ctx, e, pn), dim: 0, radius: rho, rel: 0 });
        }
    }
    let mut nmin = red.norms.iter().min().copied().unwrap();
    if let Some(v0) = &v0 {
        nmin = nmin.min(w.norm_exp(v0).unwrap());
    }
    let g = goss(k, w.ctx().q)?;
    let mut rel = p.ceil() + 8 + k as i128 * (-nmin.floor()).max(0);
    loop {
        let mut ball = Ball::new(red.clone(), w, rel);
        ball.grow_below(rho, cfg.max_dim)?;
        let value = match &v0 {
            Some(v0) => {
                let z = w.pairing(v0, Exp::int(rel).sub(w.norm_exp(v0).unwrap()));
                let x = ball.exp_at(&z).inv()?;
                let mut ys: Vec<Tail> = ball.alphas[1..].to_vec();
                while ys.len() < g.max_y() {
                    ys.push(Tail::zero(ctx));
                }
                g.eval(&x, &ys)
            }
            None => power_sum(&ball.alphas, ctx.q, k, rel),
        };
        if reaches(&value, p) {
            return Ok(EisValue { value: abs_trunc(&value, p), dim: ball.dim(), radius: rho, rel });
        }
        rel *= 2;
        if rel > cfg.max_rel {
            return Err(Error::Budget(format!("precision O(t^-{p}) not reached with working precision {}", rel / 2)));
        }
    }
}

/// Σ over the box of coordinate degree ≤ D, with the bound of the omitted
/// terms: an independent oracle for small cases.
pub fn eval_eisenstein_box(c: &LatticeCoset, w: &OmegaPoint, k: usize, dmax: i64) -> Result<Tail> {
    let numin = w.valuations().into_iter().min().unwrap();
    let p = Exp::int(dmax as i128 + 1).add(numin).mul_int(k as i128);
    let e = w.ram() as i128;
    let pn = (p.num * e).div_euclid(p.den);
    let mut s = Tail::zero_prec(w.ctx(), w.ram(), pn);
    for x in c.enumerate_coset(dmax).points {
        let y = w.pairing(&x, p.add(Exp::int(64)));
        let yk = y.pow(k as u64);
        let term = if yk.is_exact() { yk.inv_to(pn)? } else { yk.inv()? };
        s = s.add(&term);
    }
    Ok(s)
}

/// Uncertified points: the box sum with a heuristic tail estimate taken from
/// the smallest |xω| on the outer shell. The precision is not a bound.
pub fn eval_eisenstein_empirical(c: &LatticeCoset, w: &OmegaPoint, k: usize, dmax: i64) -> Result<(Tail, Exp)> {
    let pts = c.enumerate_coset(dmax).points;
    let shell_min = pts
        .iter()
        .filter(|x| x.iter().map(|a| a.deg()).max() == Some(dmax))
        .filter_map(|x| w.pairing(x, Exp::int(64)).norm_exp())
        .min()
        .ok_or_else(|| Error::Invalid("empty shell".into()))?;
    let p = shell_min.mul_int(k as i128);
    let e = w.ram() as i128;
    let pn = (p.num * e).div_euclid(p.den);
    let mut s = Tail::zero_prec(w.ctx(), w.ram(), pn);
    for x in pts {
        let y = w.pairing(&x, p.add(Exp::int(64)));
        let yk = y.pow(k as u64);
        s = s.add(&if yk.is_exact() { yk.inv_to(pn)? } else { yk.inv()? });
    }
    Ok((s, p))
}

#[derive(Clone, Debug)]
pub struct ExpValue {
    pub value: Tail,
    pub dim: usize,
}

/// e_{Lω}(z) modulo O(t^{−P}). Uses e_L = e_{e_H(L)} ∘ e_H and the bound
/// |e_{e_H(L),q^j}| ≤ m^{1−q^j}, m = min |e_H(L∖H)|.
pub fn eval_exp(l: &LatticeCoset, w: &OmegaPoint, z: &Tail, p: Exp, cfg: &EvalConfig) -> Result<ExpValue> {
    if z.is_zero() && z.is_exact() {
        return Ok(ExpValue { value: z.clone(), dim: 0 });
    }
    let red = reduce_basis(l.basis(), w)?;
    let q = w.ctx().q as i128;
    let nz = z.norm_exp().ok_or_else(|| Error::PrecisionExhausted("argument indistinguishable from 0".into()))?;
    let nmin = red.norms.iter().min().copied().unwrap();
    // terms of e_H(z) are at most |e_L(z)| ≤ q^Φ, so relative precision P + Φ suffices
    let phi = exp_log_norm(&red, w.ctx().q, nz);
    let mut rel = (p.add(phi).ceil() + 8 + (-nmin.floor()).max(0)).max(16);
    loop {
        let mut ball = Ball::new(red.clone(), w, rel);
        ball.grow_below(nz.add(Exp::int(1)), cfg.max_dim)?;
        let res = loop {
            let v = ball.exp_at(z);
            // an upper bound for |e_H(z)|
            let nv = match v.norm_exp() {
                Some(n) => n,
                None => neg_exp(v.prec().ok_or(Error::DivisionByZero)?),
            };
            let m = ball.next_exp_norm()?;
            if nv < m {
                // dominant neglected term: β_1 e_H(z)^q
                let err = m.add(nv.sub(m).mul_int(q));
                if err <= neg_exp(p) {
                    break Some(v);
                }
            }
            if ball.dim() >= cfg.max_dim {
                return Err(Error::Budget(format!("e_L(z) to O(t^-{p}) needs dimension > {}", cfg.max_dim)));
            }
            ball.grow()?;
        };
        if let Some(v) = res {
            if reaches(&v, p) {
                return Ok(ExpValue { value: abs_trunc(&v, p), dim: ball.dim() });
            }
        }
        rel *= 2;
        if rel > cfg.max_rel {
            return Err(Error::Budget(format!("e_L(z) to O(t^-{p}) exceeds working precision")));
        }
    }
}

/// e_{Lω}(z) to relative precision R.
pub fn eval_exp_rel(l: &LatticeCoset, w: &OmegaPoint, z: &Tail, rel: i128, cfg: &EvalConfig) -> Result<Tail> {
    let red = reduce_basis(l.basis(), w)?;
    let nz = z.norm_exp().ok_or_else(|| Error::PrecisionExhausted("argument indistinguishable from 0".into()))?;
    let mut p = Exp::int(rel).sub(exp_log_norm(&red, w.ctx().q, nz));
    for _ in 0..16 {
        let v = eval_exp(l, w, z, p, cfg)?.value;
        match v.norm_exp() {
            Some(nv) => {
                let need = Exp::int(rel).sub(nv);
                if p >= need {
                    return Ok(v);
                }
                p = need;
            }
            None => p = p.add(Exp::int(rel.max(8))),
        }
    }
    Err(Error::Budget("relative precision for e_L(z) not reached".into()))
}

/// The coefficients e_{Lω,q^i}, i = 1..n, modulo O(t^{−P}).
pub fn exp_coeffs(l: &LatticeCoset, w: &OmegaPoint, n: usize, p: Exp, cfg: &EvalConfig) -> Result<Vec<Tail>> {
    let red = reduce_basis(l.basis(), w)?;
    let q = w.ctx().q as i128;
    let nmin = red.norms.iter().min().copied().unwrap();
    let mut rel = p.ceil() + 8 + (-nmin.floor()).max(0) * q.pow(n as u32);
    loop {
        let mut ball = Ball::new(red.clone(), w, rel);
        let res = loop {
            if ball.alphas.len() > n {
                let m = ball.next_exp_norm()?;
                // α_i(L) − α_i(H) = Σ_{1≤j≤i} β_j α_{i−j}^{q^j}, |β_j| ≤ m^{1−q^j}
                let mut ok = true;
                for i in 1..=n {
                    for j in 1..=i {
                        let Some(na) = ball.alphas[i - j].norm_exp() else { continue };
                        let qj = q.pow(j as u32);
                        let err = m.mul_int(1 - qj).add(na.mul_int(qj));
                        if err > neg_exp(p) {
                            ok = false;
                        }
                    }
                }
                if ok {
                    break Some(ball.alphas[1..=n].to_vec());
                }
            }
            if ball.dim() >= cfg.max_dim {
                return Err(Error::Budget(format!("exponential coefficients need dimension > {}", cfg.max_dim)));
            }
            ball.grow()?;
        };
        if let Some(v) = res {
            if v.iter().all(|a| reaches(a, p)) {
                return Ok(v.iter().map(|a| abs_trunc(a, p)).collect());
            }
        }
        rel *= 2;
        if rel > cfg.max_rel {
            return Err(Error::Budget("exponential coefficients exceed working precision".into()));
        }
    }
}

/// Outcome of comparing two values known modulo O(t^{−P}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    /// log_q of the known part of the difference; None if it vanishes.
    pub residual: Option<Exp>,
    /// The precision of the difference.
    pub precision: Option<Exp>,
    pub required: Exp,
}

impl Comparison {
    pub fn of(a: &Tail, b: &Tail, required: Exp) -> Comparison {
        let d = a.sub(b);
        Comparison { residual: d.norm_exp(), precision: d.prec(), required }
    }
    pub fn pass(&self) -> bool {
        self.residual.is_none() && self.precision.map_or(true, |p| p >= self.required)
    }
    pub fn to_json(&self) -> Value {
        json!({
            "residual_log_q": self.residual.map(|r| r.to_string()),
            "precision": self.precision.map(|p| p.to_string()),
            "required": self.required.to_string(),
            "pass": self.pass(),
        })
    }
}

/// E_{1,v+L}(ω) · e_{Lω}(vω) = 1 for v ∉ L.
pub fn weight1_inversion(c: &LatticeCoset, w: &OmegaPoint, p: Exp, cfg: &EvalConfig) -> Result<Comparison> {
    if c.v_in_lattice() {
        return Err(Error::Invalid("weight-1 inversion needs v ∉ L".into()));
    }
    let z = w.pairing(c.v(), p.add(Exp::int(64)));
    let rough = eval_exp(&c.as_lattice(), w, &z, p, cfg)?.value;
    let ne = rough.norm_exp().ok_or_else(|| Error::PrecisionExhausted("e_L(vω) vanishes".into()))?;
    let slack = Exp::int(ne.ceil().abs() + 1);
    let ev = eval_exp(&c.as_lattice(), w, &z, p.add(slack), cfg)?.value;
    let ee = eval_eisenstein(c, w, 1, p.add(slack), cfg)?.value;
    let prod = abs_trunc(&ee.mul(&ev), p);
    Ok(Comparison::of(&prod, &Tail::one(w.ctx()), p))
}

/// Σ_{x∈vγ+Lγ}(xω)^{−k} against Σ_{x∈v+L}(x·γω)^{−k}, the second summed at the
/// point γω with its own reduction.
pub fn slash_transform_check(
    c: &LatticeCoset,
    w: &OmegaPoint,
    k: usize,
    g: &Matrix,
    p: Exp,
    cfg: &EvalConfig,
) -> Result<Comparison> {
    let lhs = eval_eisenstein(&c.transform(g), w, k, p, cfg)?.value;
    let gw = w.transformed(g, 4 * cfg.max_rel);
    if !gw.is_certified() {
        return Err(Error::Invalid("γω is not certified".into()));
    }
    let rhs = eval_eisenstein(c, &gw, k, p, cfg)?.value;
    Ok(Comparison::of(&lhs, &rhs, p))
}

/// E_{k,αv+L} = α^{−k} E_{k,v+L}, as identical series.
pub fn alpha_equivariance(c: &LatticeCoset, w: &OmegaPoint, k: usize, alpha: u32, p: Exp, cfg: &EvalConfig) -> Result<bool> {
    let f = c.field();
    let a = RatF::constant(f, alpha);
    let scaled = c.with_v(mat::vec_scale(&a, c.v()));
    let lhs = eval_eisenstein(&scaled, w, k, p, cfg)?.value;
    let rhs = eval_eisenstein(c, w, k, p, cfg)?.value;
    let s = f.pow(f.inv(alpha)?, k as u64);
    Ok(lhs.identical(&rhs.scale(w.ctx().embed[s as usize])))
}

/// E_{k,v+L} = Σ_{v'+L' ⊂ v+L} E_{k,v'+L'} for a sublattice L'.
pub fn splitting_check(
    c: &LatticeCoset,
    sub: &LatticeCoset,
    w: &OmegaPoint,
    k: usize,
    p: Exp,
    cfg: &EvalConfig,
) -> Result<(Comparison, usize)> {
    let whole = eval_eisenstein(c, w, k, p, cfg)?.value;
    let reps = c.sub_cosets(sub)?;
    let mut s = Tail::zero(w.ctx());
    for v in &reps {
        s = s.add(&eval_eisenstein(&sub.with_v(v.clone()), w, k, p, cfg)?.value);
    }
    Ok((Comparison::of(&whole, &s, p), reps.len()))
}

/// Radius P/k against 2P/k: the certified digits must not move.
pub fn doubling_check(c: &LatticeCoset, w: &OmegaPoint, k: usize, p: Exp, cfg: &EvalConfig) -> Result<Comparison> {
    let a = eval_eisenstein(c, w, k, p, cfg)?.value;
    let rho2 = Exp::new(2 * p.num, p.den * k as i128);
    let b = eval_eisenstein_radius(c, w, k, p, rho2, cfg)?.value;
    Ok(Comparison::of(&a, &b, p))
}

/// Σ_{ℓ'∈H} (xω − ℓ'ω')^{−k} = G_k(e_{H}(xω)^{−1}, ...) for the finite space
/// H of the first `n` generators of L' (rank r ≥ 2, v ∉ L).
pub fn goss_consistency_check(c: &LatticeCoset, w: &OmegaPoint, k: usize, n: usize, rel: i128) -> Result<Comparison> {
    let frame = UFrame::new(c)?;
    let wp = w.tail_point();
    let red = reduce_basis(frame.l_prime.basis(), &wp)?;
    let mut ball = Ball::new(red, &wp, rel);
    for _ in 0..n {
        ball.grow()?;
    }
    let z = w.pairing(c.v(), Exp::int(rel));
    // brute force over H
    let q = w.ctx().q;
    let ctx = w.ctx();
    let mut elems = vec![Tail::zero(ctx)];
    for &(j, d) in &ball.gens {
        let g = ball.gen_value(j, d);
        let mut next = vec![];
        for a in 0..q {
            let ga = g.scale(ctx.embed[a as usize]);
            next.extend(elems.iter().map(|h| h.add(&ga)));
        }
        elems = next;
    }
    let mut lhs = Tail::zero(ctx);
    for h in &elems {
        let d = tr(&z.sub(h), rel);
        lhs = lhs.add(&tr(&d.pow(k as u64), rel).inv()?);
    }
    let g = goss(k, q)?;
    let mut ys: Vec<Tail> = ball.alphas[1..].to_vec();
    while ys.len() < g.max_y() {
        ys.push(Tail::zero(ctx));
    }
    let rhs = g.eval(&ball.exp_at(&z).inv()?, &ys);
    let diff = lhs.sub(&rhs);
    let required = diff.prec().unwrap_or(Exp::int(0));
    Ok(Comparison::of(&lhs, &rhs, required))
}

/// log_q of an upper bound for |x| (the precision bound if x vanishes).
fn upper_norm(x: &Tail) -> Option<Exp> {
    x.norm_exp().or_else(|| x.prec().map(neg_exp))
}

/// Upper bound for log_q |G_k(X, Y)| given log_q |X| ≤ lx and bounds for |Y_i|.
fn goss_bound(g: &crate::goss::MPoly, lx: Exp, ly: &[Option<Exp>]) -> Option<Exp> {
    g.terms()
        .filter_map(|(e, _)| {
            let mut s = lx.mul_int(e.first().copied().unwrap_or(0) as i128);
            for (i, &n) in e.iter().enumerate().skip(1) {
                if n > 0 {
                    s = s.add(ly.get(i - 1).copied().flatten()?.mul_int(n as i128));
                }
            }
            Some(s)
        })
        .max()
}

#[derive(Clone, Debug)]
pub struct RowsValue {
    pub value: Tail,
    /// Number of rows x_1 ∈ v_1 + L_1 summed.
    pub rows: usize,
    /// log_q of the largest row.
    pub lead: Exp,
    /// log_q bound on all omitted rows.
    pub tail_bound: Option<Exp>,
}

/// E_{k,v+L}(ω) by rows: with L = L̃_1 ⊕ ({0} × L'),
/// E = Σ_{x∈v+L̃_1} G_k(e_{L'ω'}(xω)^{−1}, e_{L'ω',q}, ...), the row x_1 = 0 being
/// E_{k,x'+L'}(ω'). Rows are summed by increasing |x_1| until the Goss bound
/// on the rest is below the largest row by `rel`. The result has relative
/// precision about `rel`, which keeps E meaningful near the cusp where it is
/// tiny.
pub fn eval_eisenstein_rows(c: &LatticeCoset, w: &OmegaPoint, k: usize, rel: i128, cfg: &EvalConfig) -> Result<RowsValue> {
    let frame = UFrame::new(c)?;
    let f = c.field().clone();
    let r = c.rank();
    let ctx = w.ctx();
    if c.v_in_lattice() && k % (ctx.q as usize - 1) != 0 {
        // x ↦ ζx permutes L ∖ {0}, so the sum vanishes
        return Ok(RowsValue { value: Tail::zero(ctx), rows: 0, lead: Exp::int(0), tail_bound: None });
    }
    let wp = w.tail_point();
    let lp = &frame.l_prime;
    let redp = reduce_basis(lp.basis(), &wp)?;
    let g = goss(k, ctx.q)?;
    let (m, _) = (&c.v()[0] / &frame.l1)?.split();
    let base = mat::vec_sub(c.v(), &mat::vec_scale(&RatF::from_poly(m), &frame.l1_lift));
    let n1 = w.entries()[0].norm_exp().unwrap();
    let deg_l1 = frame.l1.deg() as i128;
    let mut work = rel + 16;
    'retry: loop {
        let betas = if g.max_y() > 0 {
            exp_coeffs(lp, &wp, g.max_y(), Exp::int(work), cfg)?
        } else {
            vec![]
        };
        let ly: Vec<Option<Exp>> = betas.iter().map(upper_norm).collect();
        let row_term = |x: &Vector| -> Result<Tail> {
            let xp = minimal_rep(&redp, &x[1..], &wp).unwrap_or_else(|| vec![RatF::zero(&f); r - 1]);
            let mut xr = vec![x[0].clone()];
            xr.extend(xp);
            let nz = w.norm_exp(&xr).unwrap();
            let z = w.pairing(&xr, Exp::int(work).sub(nz));
            let ez = eval_exp_rel(lp, &wp, &z, work, cfg)?;
            let xinv = ez.inv()?;
            Ok(g.eval(&xinv, &betas))
        };
        let mut terms: Vec<Tail> = vec![];
        let mut const_row: Option<Vector> = None;
        let mut lead: Option<Exp> = None;
        let mut level = 0i64;
        let tail_bound = loop {
            let cs: Vec<Poly> = crate::poly::polys_below(&f, level as usize + 1)
                .filter(|p| p.degree() == level || level == 0)
                .collect();
            for cpoly in cs {
                let x = mat::vec_add(&base, &mat::vec_scale(&RatF::from_poly(cpoly), &frame.l1_lift));
                if x[0].is_zero() {
                    const_row = Some(x[1..].to_vec());
                    continue;
                }
                let t = row_term(&x)?;
                if let Some(n) = t.norm_exp() {
                    lead = Some(lead.map_or(n, |l: Exp| l.max(n)));
                }
                terms.push(t);
            }
            if level == 0 {
                if let Some(xp) = &const_row {
                    let rough = eval_eisenstein(&lp.with_v(xp.clone()), &wp, k, Exp::int(rel + 8), cfg)?.value;
                    if let Some(n) = rough.norm_exp() {
                        lead = Some(lead.map_or(n, |l: Exp| l.max(n)));
                    }
                }
            }
            let Some(ld) = lead else {
                if level >= 3 {
                    return Err(Error::PrecisionExhausted("all rows vanish to working precision".into()));
                }
                level += 1;
                continue;
            };
            // rows with deg c > level have |x_1| ≥ q^{level + 1 + deg l_1}
            let t = Exp::int(level as i128 + 1 + deg_l1).add(n1);
            let phi = exp_log_norm(&redp, ctx.q, t);
            let b = goss_bound(&g, neg_exp(phi), &ly);
            if b.map_or(true, |b| b <= ld.sub(Exp::int(rel))) {
                break b;
            }
            level += 1;
            if level > 12 {
                return Err(Error::Budget("row sum does not settle".into()));
            }
        };
        let lead = lead.unwrap();
        let target = Exp::int(rel).sub(lead);
        let mut s = Tail::zero(ctx);
        if let Some(xp) = &const_row {
            s = s.add(&eval_eisenstein(&lp.with_v(xp.clone()), &wp, k, target, cfg)?.value);
        }
        for t in &terms {
            s = s.add(t);
        }
        if !reaches(&s, target) {
            work *= 2;
            if work > cfg.max_rel {
                return Err(Error::Budget("row sum precision not reached".into()));
            }
            continue 'retry;
        }
        let rows = terms.len() + const_row.is_some() as usize;
        return Ok(RowsValue { value: abs_trunc(&s, target), rows, lead, tail_bound });
    }
}

/// u = e_{Λ'ω'}(ω_1)^{−1} to relative precision R.
pub fn u_parameter(frame: &UFrame, w: &OmegaPoint, rel: i128, cfg: &EvalConfig) -> Result<Tail> {
    let wp = w.tail_point();
    let e = eval_exp_rel(&frame.lambda_prime, &wp, &w.entries()[0], rel, cfg)?;
    e.inv()
}

#[derive(Clone, Debug)]
pub struct USample {
    pub s: i64,
    pub log_u: Exp,
    pub log_e: Option<Exp>,
    /// log_q |observed − expected| − log_q |expected|; None below precision.
    pub rel_residual: Option<Exp>,
}

#[derive(Clone, Debug)]
pub enum UCase {
    /// v_1 ∉ L_1: E·x_1/u → 1.
    OrderOne { x1: RatF },
    /// v_1 ∈ L_1: E → E_{k,v'+L'}(ω').
    ConstantTerm,
}

#[derive(Clone, Debug)]
pub struct UCheck {
    pub case: UCase,
    pub samples: Vec<USample>,
    pub rel: i128,
}

impl UCheck {
    /// |u| shrinks along the schedule, every relative residual is O(u) (the
    /// next term of the expansion), and the last sample agrees to the working
    /// relative precision.
    pub fn pass(&self) -> bool {
        let bound = |s: &USample| s.log_u.max(Exp::int(-self.rel));
        let decays = self.samples.iter().all(|s| s.rel_residual.map_or(true, |r| r <= bound(s)));
        let agree = self.samples.last().is_some_and(|s| s.rel_residual.map_or(true, |r| r <= Exp::int(-self.rel)));
        let agree = agree && decays;
        let shrinking = self.samples.windows(2).all(|p| p[1].log_u < p[0].log_u);
        agree && shrinking
    }
    pub fn to_json(&self) -> Value {
        let case = match &self.case {
            UCase::OrderOne { x1 } => json!({"case": "order_one", "x1": x1.to_string()}),
            UCase::ConstantTerm => json!({"case": "constant_term"}),
        };
        json!({
            "case": case,
            "relative_precision": self.rel,
            "samples": self.samples.iter().map(|s| json!({
                "s": s.s,
                "log_q_u": s.log_u.to_string(),
                "log_q_E": s.log_e.map(|x| x.to_string()),
                "relative_residual": s.rel_residual.map(|x| x.to_string()),
            })).collect::<Vec<_>>(),
            "pass": self.pass(),
        })
    }
}

/// Leading behaviour of E_{k,v+L} at the points ω^{(s)} = (ω_1(1+t^s), ω')
/// approaching the cusp. For v_1 ∉ L_1 (order-one case, k = 1) the ratio
/// E/u is compared with 1/x_1; for v_1 ∈ L_1 the value is compared with
/// E_{k,v'+L'}(ω'), computed by the full-rank ball sum.
pub fn u_order_check(c: &LatticeCoset, w: &OmegaPoint, k: usize, schedule: &[i64], rel: i128, cfg: &EvalConfig) -> Result<UCheck> {
    let frame = UFrame::new(c)?;
    let ctx = w.ctx();
    let e = w.ram();
    let mut samples = vec![];
    let case = if frame.v1_in_l1 {
        UCase::ConstantTerm
    } else {
        let x1 = frame.x1.clone().unwrap();
        if k != 1 || !frame.x1_generates {
            return Err(Error::Invalid("order-one check needs k = 1 and x_1 generating A v_1 + L_1".into()));
        }
        UCase::OrderOne { x1 }
    };
    for &s in schedule {
        let ws = w.toward_cusp(s);
        let u = u_parameter(&frame, &ws, rel + 8, cfg)?;
        let log_u = u.norm_exp().unwrap();
        let (log_e, rel_residual) = match &case {
            UCase::OrderOne { x1 } => {
                let ev = eval_eisenstein_rows(c, &ws, k, rel + 8, cfg)?.value;
                let ratio = ev.mul(&u.inv()?);
                let want = Tail::from_ratf(ctx, &x1.inv()?, e, Some((rel + 16) * e as i128))?;
                let d = ratio.sub(&want);
                let nw = want.norm_exp().unwrap();
                (ev.norm_exp(), d.norm_exp().map(|x| x.sub(nw)))
            }
            UCase::ConstantTerm => {
                let vp = frame.v_prime.clone().unwrap();
                let cst = eval_eisenstein(&frame.l_prime.with_v(vp), &w.tail_point(), k, Exp::int(rel), cfg)?.value;
                let nc = cst.norm_exp().ok_or_else(|| Error::PrecisionExhausted("constant term vanishes".into()))?;
                let p = Exp::int(rel).sub(nc);
                let ev = eval_eisenstein(c, &ws, k, p, cfg)?.value;
                let cst = eval_eisenstein(&frame.l_prime.with_v(frame.v_prime.clone().unwrap()), &w.tail_point(), k, p, cfg)?.value;
                let d = ev.sub(&cst);
                (ev.norm_exp(), d.norm_exp().map(|x| x.sub(nc)))
            }
        };
        samples.push(USample { s, log_u, log_e, rel_residual });
    }
    Ok(UCheck { case, samples, rel })
}

/// One row of the order sweep for k = 1: the lower bound ord_X(G_1)·min index
/// and the order observed from |E| against |u| between two cusp points.
#[derive(Clone, Debug)]
pub struct OrderObservation {
    pub v: Vector,
    pub lower_bound: Option<u64>,
    /// (log|E_b| − log|E_a|) / (log|u_b| − log|u_a|), as a float.
    pub observed: Option<f64>,
}

pub fn observe_order(c: &LatticeCoset, w: &OmegaPoint, s_pair: (i64, i64), rel: i128, cfg: &EvalConfig) -> Result<OrderObservation> {
    let frame = UFrame::new(c)?;
    let lower_bound = match &frame.x1 {
        None => None,
        Some(x1) => {
            let e = frame.index_exp(x1)?;
            Some((c.field().p() as u64).pow(e as u32))
        }
    };
    let mut logs = vec![];
    for s in [s_pair.0, s_pair.1] {
        let ws = w.toward_cusp(s);
        let u = u_parameter(&frame, &ws, rel, cfg)?;
        let ev = eval_eisenstein_rows(c, &ws, 1, rel, cfg)?.value;
        logs.push((u.norm_exp().unwrap(), ev.norm_exp()));
    }
    let observed = match (logs[0].1, logs[1].1) {
        (Some(a), Some(b)) => Some((b.to_f64() - a.to_f64()) / (logs[1].0.to_f64() - logs[0].0.to_f64())),
        _ => None,
    };
    Ok(OrderObservation { v: c.v().clone(), lower_bound, observed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Gf;
    use crate::lattice::PointVariant;
    use crate::tail::tail_ctx;

    fn rf(f: &Gf, s: &str) -> RatF {
        RatF::parse(f, s).unwrap()
    }
    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn reduction_gives_distinct_positions() {
        let ctx = tail_ctx(3, 1).unwrap();
        let f = ctx.base.clone();
        let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
        let b = vec![vec![rf(&f, "t^2+1"), rf(&f, "t^3")], vec![rf(&f, "t"), rf(&f, "t^2+t")]];
        let red = reduce_basis(&b, &w).unwrap();
        assert_ne!(red.pos[0], red.pos[1]);
        let l = LatticeCoset::lattice(b.clone()).unwrap();
        let rl = LatticeCoset::lattice(red.vecs.clone()).unwrap();
        assert_eq!(l.index_of(&rl).unwrap(), 1);
        assert_eq!(rl.index_of(&l).unwrap(), 1);
    }

    #[test]
    fn ball_matches_box_oracle() {
        for q in [2u32, 3] {
            let ctx = tail_ctx(q, 1).unwrap();
            let f = ctx.base.clone();
            let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
            let l = LatticeCoset::standard(&f, 2);
            for (v, k) in [(["1/t", "0"], 1usize), (["1/t", "1/t"], 2), (["0", "0"], q as usize - 1), (["0", "1/t"], 3)] {
                let c = l.with_v(vec![rf(&f, v[0]), rf(&f, v[1])]);
                let dmax = if q == 2 { 4 } else { 2 };
                let boxed = eval_eisenstein_box(&c, &w, k, dmax).unwrap();
                let p = boxed.prec().unwrap();
                let ball = eval_eisenstein(&c, &w, k, p, &cfg()).unwrap();
                let cmp = Comparison::of(&ball.value, &boxed, p);
                assert!(cmp.pass(), "q={q} v={v:?} k={k}: {cmp:?}");
            }
        }
    }

    #[test]
    fn lattice_sum_vanishes_off_weight_class() {
        // Σ_{x∈L∖0} (xω)^{−k} = 0 unless (q−1) | k
        let ctx = tail_ctx(3, 1).unwrap();
        let f = ctx.base.clone();
        let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
        let v = eval_eisenstein(&LatticeCoset::standard(&f, 2), &w, 3, Exp::int(8), &cfg()).unwrap();
        assert!(v.value.is_zero());
        let v2 = eval_eisenstein(&LatticeCoset::standard(&f, 2), &w, 2, Exp::int(8), &cfg()).unwrap();
        assert!(!v2.value.is_zero());
    }

    #[test]
    fn exp_basics() {
        let ctx = tail_ctx(2, 1).unwrap();
        let f = ctx.base.clone();
        let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
        let l = LatticeCoset::standard(&f, 2);
        let p = Exp::int(10);
        let zero = eval_exp(&l, &w, &Tail::zero(&ctx), p, &cfg()).unwrap();
        assert!(zero.value.is_zero());
        // a lattice point is a zero
        let lp = w.pairing(&[rf(&f, "t+1"), rf(&f, "1")], p);
        assert!(eval_exp(&l, &w, &lp, p, &cfg()).unwrap().value.is_zero());
        // F_q-linearity
        let ctx3 = tail_ctx(3, 1).unwrap();
        let w3 = OmegaPoint::standard(&ctx3, 2, PointVariant::Standard);
        let l3 = LatticeCoset::standard(&ctx3.base, 2);
        let z = w3.pairing(&[rf(&ctx3.base, "1/t"), rf(&ctx3.base, "0")], Exp::int(30));
        let a = eval_exp(&l3, &w3, &z, p, &cfg()).unwrap().value;
        let b = eval_exp(&l3, &w3, &z.scale(2), p, &cfg()).unwrap().value;
        assert!(Comparison::of(&b, &a.scale(2), p).pass());
    }

    #[test]
    fn weight_one_inversion_small() {
        let ctx = tail_ctx(2, 1).unwrap();
        let f = ctx.base.clone();
        let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
        let c = LatticeCoset::standard(&f, 2).with_v(vec![rf(&f, "1/t"), rf(&f, "0")]);
        let cmp = weight1_inversion(&c, &w, Exp::int(8), &cfg()).unwrap();
        assert!(cmp.pass(), "{cmp:?}");
    }

    #[test]
    fn transformation_splitting_doubling() {
        for (q, r) in [(2u32, 2usize), (3, 2), (2, 3), (3, 3)] {
            let ctx = tail_ctx(q, 1).unwrap();
            let f = ctx.base.clone();
            let w = OmegaPoint::standard(&ctx, r, PointVariant::Standard);
            let mut v = vec![RatF::zero(&f); r];
            v[0] = rf(&f, "1/t");
            let c = LatticeCoset::standard(&f, r).with_v(v);
            let p = Exp::int(8);
            let mut g = mat::identity(&f, r);
            g[0][1] = rf(&f, "1");
            if r == 3 {
                g[1][2] = rf(&f, "1");
            }
            for k in 1..=3 {
                let cmp = slash_transform_check(&c, &w, k, &g, p, &cfg()).unwrap();
                assert!(cmp.pass(), "q={q} r={r} k={k} {cmp:?}");
                assert!(doubling_check(&c, &w, k, p, &cfg()).unwrap().pass());
            }
            let mut sub = mat::identity(&f, r);
            sub[0][0] = rf(&f, "t");
            let sub = LatticeCoset::lattice(sub).unwrap();
            let (cmp, n) = splitting_check(&c, &sub, &w, 2, p, &cfg()).unwrap();
            assert_eq!(n, q as usize);
            assert!(cmp.pass(), "{cmp:?}");
            assert!(alpha_equivariance(&c, &w, 2, f.from_int(-1), p, &cfg()).unwrap());
        }
    }

    #[test]
    fn goss_inner_sums() {
        let ctx = tail_ctx(3, 1).unwrap();
        let f = ctx.base.clone();
        let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
        let c = LatticeCoset::standard(&f, 2).with_v(vec![rf(&f, "1/t"), rf(&f, "0")]);
        for k in 1..=5 {
            let cmp = goss_consistency_check(&c, &w, k, 2, 20).unwrap();
            assert!(cmp.pass(), "k={k} {cmp:?}");
        }
    }

    #[test]
    fn rows_agree_with_balls() {
        for (q, r) in [(2u32, 2usize), (3, 2), (2, 3)] {
            let ctx = tail_ctx(q, 1).unwrap();
            let f = ctx.base.clone();
            let w = OmegaPoint::standard(&ctx, r, PointVariant::Perturbed);
            for vs in [["1/t", "0", "0"], ["0", "1/t", "0"], ["1/t", "1/t", "1/t"], ["0", "0", "0"]] {
                let v: Vector = vs[..r].iter().map(|s| rf(&f, s)).collect();
                let c = LatticeCoset::standard(&f, r).with_v(v);
                for k in 1..=3 {
                    let rows = eval_eisenstein_rows(&c, &w, k, 10, &cfg());
                    let rows = match rows {
                        Ok(x) => x,
                        Err(Error::PrecisionExhausted(_)) => continue, // a vanishing lattice sum
                        Err(e) => panic!("{e}"),
                    };
                    let p = rows.value.prec().unwrap_or(Exp::int(10));
                    let ball = eval_eisenstein(&c, &w, k, p, &cfg()).unwrap();
                    let cmp = Comparison::of(&rows.value, &ball.value, p);
                    assert!(cmp.pass(), "q={q} r={r} v={vs:?} k={k} {cmp:?}");
                }
            }
        }
    }

    #[test]
    fn order_one_near_cusp() {
        for q in [2u32, 3] {
            let ctx = tail_ctx(q, 1).unwrap();
            let f = ctx.base.clone();
            let w = OmegaPoint::standard(&ctx, 2, PointVariant::Standard);
            let c = LatticeCoset::standard(&f, 2).with_v(vec![rf(&f, "1/t"), rf(&f, "1/t")]);
            let chk = u_order_check(&c, &w, 1, &[2, 4, 6, 8], 8, &cfg()).unwrap();
            assert!(chk.pass(), "{}", chk.to_json());
            let c0 = LatticeCoset::standard(&f, 2).with_v(vec![rf(&f, "0"), rf(&f, "1/t")]);
            let chk = u_order_check(&c0, &w, 1, &[2, 4, 6, 8], 8, &cfg()).unwrap();
            assert!(chk.pass(), "{}", chk.to_json());
        }
    }
}
