//! Acceptance criteria 1–7, one PASS/FAIL line each.
//!
//! A criterion is PASS when every claim it names passes. Statements that are
//! false as printed stay red here; the run only aborts when the set of red
//! claims differs from the known list below, or a claim errors or fails
//! outright.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use drinfeld_core::suite::{run_section, Claim, Section, Status, SuiteConfig};

struct Criterion {
    n: u8,
    title: &'static str,
    /// Claims the criterion names.
    named: Vec<Claim>,
    /// Claims run alongside (corrected forms, cross-checks).
    supporting: Vec<Claim>,
    elapsed: Duration,
    limit: Option<Duration>,
    /// Claim ids known to be false as printed.
    known_red: BTreeSet<String>,
    extra: Option<(bool, String)>,
}

impl Criterion {
    fn red(&self) -> BTreeSet<String> {
        self.named.iter().filter(|c| c.status != Status::Pass).map(|c| c.claim_id.clone()).collect()
    }
    fn in_time(&self) -> bool {
        self.limit.map_or(true, |l| self.elapsed <= l)
    }
    fn pass(&self) -> bool {
        self.red().is_empty() && self.in_time() && self.extra.as_ref().map_or(true, |e| e.0)
    }
    /// Problems that make the run itself fail.
    fn unexpected(&self) -> Vec<String> {
        let mut out = vec![];
        for c in self.named.iter().chain(&self.supporting) {
            let known = self.known_red.contains(&c.claim_id);
            match c.status {
                Status::Pass if known => out.push(format!("{} passed but is listed as red", c.claim_id)),
                Status::Pass => {}
                Status::Refuted if known => {}
                s => out.push(format!("{} is {}: {}", c.claim_id, s.name(), c.details)),
            }
        }
        if !self.in_time() {
            out.push(format!("over the time limit: {:.1} s", self.elapsed.as_secs_f64()));
        }
        if let Some((false, msg)) = &self.extra {
            out.push(msg.clone());
        }
        out
    }
    fn line(&self) -> String {
        let total = self.named.len() + self.supporting.len();
        let mut s = format!(
            "criterion {} {}: {} ({} named claims, {} total, {:.2} s",
            self.n,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.named.len(),
            total,
            self.elapsed.as_secs_f64()
        );
        if let Some(l) = self.limit {
            s += &format!(", limit {} s", l.as_secs());
        }
        s.push(')');
        if let Some((_, msg)) = &self.extra {
            s += &format!("; {msg}");
        }
        for id in self.red() {
            let c = self.named.iter().find(|c| c.claim_id == id).unwrap();
            s += &format!("\n    red: {id} [{}] status={}", c.paper_ref, c.status.name());
        }
        s
    }
}

fn config(q: u32, r: usize, kmax: usize) -> SuiteConfig {
    SuiteConfig { q, r, kmax, ..Default::default() }
}

fn collect(grid: &[(u32, usize, usize)], sections: &[Section]) -> (Vec<Claim>, Duration) {
    let t0 = Instant::now();
    let mut out = vec![];
    for &(q, r, kmax) in grid {
        for &s in sections {
            out.extend(run_section(s, &config(q, r, kmax)));
        }
    }
    (out, t0.elapsed())
}

fn split(claims: Vec<Claim>, named: &[&str]) -> (Vec<Claim>, Vec<Claim>) {
    claims.into_iter().partition(|c| named.iter().any(|p| c.claim_id.starts_with(p)))
}

fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

fn goss() -> Criterion {
    let (named, elapsed) = collect(&[(2, 2, 0), (3, 2, 0), (4, 2, 0)], &[Section::Goss]);
    Criterion {
        n: 1,
        title: "Goss polynomial identities, q in {2,3,4}",
        named,
        supporting: vec![],
        elapsed,
        limit: Some(Duration::from_secs(30)),
        known_red: BTreeSet::new(),
        extra: None,
    }
}

fn eisenstein() -> Criterion {
    let (named, elapsed) = collect(&[(2, 2, 0), (3, 2, 0), (2, 3, 0), (3, 3, 0)], &[Section::Eisenstein]);
    Criterion {
        n: 2,
        title: "Eisenstein inversion, transformation, splitting, doubling at O(t^-8)",
        named,
        supporting: vec![],
        elapsed,
        limit: Some(Duration::from_secs(300)),
        known_red: BTreeSet::new(),
        extra: None,
    }
}

fn u_order() -> Criterion {
    let (named, elapsed) = collect(&[(2, 2, 0), (3, 2, 0)], &[Section::UOrder]);
    Criterion {
        n: 3,
        title: "leading u-behaviour at the cusp, r = 2",
        named,
        supporting: vec![],
        elapsed,
        limit: None,
        known_red: BTreeSet::new(),
        extra: None,
    }
}

fn coefficients() -> Criterion {
    let (claims, elapsed) =
        collect(&[(2, 2, 0), (3, 2, 0), (2, 3, 0)], &[Section::Coefficient, Section::Discriminant, Section::Moore]);
    let (named, supporting) = split(
        claims,
        &["coefficient.recursions", "coefficient.compositional_inverse", "discriminant.iterated", "discriminant.delta_power", "moore."],
    );
    Criterion {
        n: 4,
        title: "coefficient recursions, Delta_(t^2), delta_t^(q-1) = Delta_t, Moore identities",
        named,
        supporting,
        elapsed,
        limit: None,
        known_red: set(&[
            // literal δ^{q−1} = Δ: off by (−1)^{n+1}, n = q + 1 even
            "discriminant.delta_power_printed[q=3,r=2]",
            // product with first nonzero coordinate 1: off by a sign for odd q
            "moore.indeterminates_printed[q=3]",
            "moore.ring_slices_printed[q=3,r=2]",
            // supporting: numeric form of the same sign, and the isogeny ratio
            "discriminant.delta_root_numeric_printed[q=3]",
            "discriminant.isogeny_ratio_printed[q=2]",
            "discriminant.isogeny_ratio_printed[q=3]",
        ]),
        extra: None,
    }
}

fn ring_tables() -> Criterion {
    let (claims, elapsed) =
        collect(&[(2, 2, 6), (3, 2, 6), (2, 3, 6), (3, 3, 4)], &[Section::Dims, Section::Invariants]);
    let (named, supporting) = split(
        claims,
        &["dims.slices", "dims.gl_type[q=2,r=2,m=0]", "dims.gl_type[q=3,r=2,m=0]", "dims.gl_type[q=2,r=3,m=0]", "dims.gl_type[q=3,r=3,m=0]", "dims.sl", "dims.u1_printed", "invariants.dickson_independence"],
    );
    Criterion {
        n: 5,
        title: "ring slices, GL/SL/U1 invariant dimensions, Dickson independence",
        named,
        supporting,
        elapsed,
        limit: Some(Duration::from_secs(600)),
        // U1 invariants of weight k are the degree-k polynomials in r forms:
        // C(k+r−1, r−1), not C(k−1, r−1)
        known_red: set(&["dims.u1_printed[q=2,r=2]", "dims.u1_printed[q=3,r=2]", "dims.u1_printed[q=2,r=3]", "dims.u1_printed[q=3,r=3]"]),
        extra: None,
    }
}

fn hecke() -> Criterion {
    let (named, elapsed) = collect(&[(2, 2, 0), (3, 2, 0), (2, 3, 0)], &[Section::Hecke]);
    Criterion {
        n: 6,
        title: "exhaustive local counts, global identity mod p, rank-2 eigenvalue",
        named,
        supporting: vec![],
        elapsed,
        limit: Some(Duration::from_secs(600)),
        known_red: BTreeSet::new(),
        extra: None,
    }
}

fn run_verify(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_drinfeld")).arg("verify").args(args).output().expect("run drinfeld");
    (out.stdout, out.status.code())
}

fn determinism() -> Criterion {
    let t0 = Instant::now();
    let mut msgs = vec![];
    let mut ok = true;
    for args in [&[][..], &["--suite", "dims", "--q", "3", "--r", "3", "--kmax", "4"][..]] {
        let (a, ca) = run_verify(args);
        let (b, cb) = run_verify(args);
        let same = a == b && !a.is_empty();
        ok &= same && ca == Some(0) && cb == Some(0);
        msgs.push(format!("verify {}: {} bytes, identical={same}, exit={:?}", args.join(" "), a.len(), ca));
    }
    Criterion {
        n: 7,
        title: "byte-identical verify reports",
        named: vec![],
        supporting: vec![],
        elapsed: t0.elapsed(),
        limit: None,
        known_red: BTreeSet::new(),
        extra: Some((ok, msgs.join("; ").replace("verify :", "verify (defaults):"))),
    }
}

fn main() {
    let mut unexpected = vec![];
    for f in [goss, eisenstein, u_order, coefficients, ring_tables, hecke, determinism] {
        let c = f();
        println!("{}", c.line());
        for u in c.unexpected() {
            unexpected.push(format!("criterion {}: {u}", c.n));
        }
    }
    if !unexpected.is_empty() {
        for u in &unexpected {
            println!("UNEXPECTED {u}");
        }
        std::process::exit(1);
    }
}
