//! Verification suites: the representation-side and combinatorial engines against each
//! other, mutation identities, involutions, B-compatibility, the cluster-algebra
//! statements on g-vectors and F-polynomials, and E-invariants.

use crate::error::{GspError, Result};
use crate::exec::Exec;
use crate::fixtures::{oracle_species, random_gsps};
use crate::gsp::{jacobian_basis, Gsp};
use crate::mutation::{b_compat_check, extended_y_seed_mutate, mutate, ExtendedYSeed};
use crate::oracle::{compare_derivatives, GroupBasisModel};
use crate::poly::{IntPoly, SFRational, Tropical};
use crate::reps::*;
use crate::seed::*;
use crate::species::transpose;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseFailure {
    pub case: String,
    pub detail: String,
    pub reproducer: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub skipped: usize,
    pub failures: Vec<CaseFailure>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), cases: 0, skipped: 0, failures: vec![], notes: vec![] }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, case: String, detail: String, reproducer: String) {
        self.failures.push(CaseFailure { case, detail, reproducer });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed())
    }
}

/// Sequences of length ≤ `max_len` over `0..n` without immediate repeats, shortest first.
pub fn sequences(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for k in 0..n {
                if s.last() != Some(&k) {
                    let mut t = s.clone();
                    t.push(k);
                    next.push(t);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn seq_label(g: &Gsp, seq: &[usize]) -> String {
    seq.iter().map(|&i| g.labels[i].clone()).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// Realizations over a ball of sequences

/// `μ_{i_1} … μ_{i_n}(μ_{i_n} … μ_{i_1}(A,S), 0, ρ)` for every character ρ, with the
/// identities checked at each backward step.
#[derive(Clone, Debug)]
pub struct SeqRealization {
    pub seq: Vec<usize>,
    pub end: Gsp,
    /// Indexed by the character carrying the decoration.
    pub reps: Vec<DecoratedRep>,
    pub step_failures: Vec<String>,
    pub thick: bool,
}

pub fn realize_sequence(g: &Gsp, seq: &[usize], check_steps: bool) -> Result<SeqRealization> {
    let mut cur = g.clone();
    for (pos, &k) in seq.iter().enumerate() {
        cur = mutate(&cur, k)
            .map_err(|e| GspError::MutationUndefined { prefix: seq[..pos].iter().map(|&i| g.labels[i].clone()).collect(), reason: e.to_string() })?
            .reduced()
            .clone();
    }
    let n = cur.num_chars();
    let mut reps: Vec<DecoratedRep> = (0..n).map(|c| DecoratedRep::negative(&cur, simple_deco(&cur, c))).collect();
    let mut step_failures = Vec::new();
    let mut thick = false;
    for (pos, &k) in seq.iter().enumerate().rev() {
        let report = mutate(&cur, k).map_err(|e| GspError::MutationUndefined { prefix: seq.iter().map(|&i| g.labels[i].clone()).chain(seq[pos..].iter().rev().map(|&i| g.labels[i].clone())).collect(), reason: e.to_string() })?;
        let next = report.reduced().clone();
        let mut new_reps = Vec::with_capacity(n);
        for (c, x) in reps.iter().enumerate() {
            let y = mutate_rep_with(&cur, x, &report)?;
            if check_steps {
                for f in step_identities(&cur, x, &next, &y, k)? {
                    step_failures.push(format!("decoration {}, step {} at {}: {}", cur.frame().char_name(c), seq.len() - pos, g.labels[k], f));
                }
            }
            thick |= !is_thin(&y);
            new_reps.push(y);
        }
        reps = new_reps;
        cur = next;
    }
    Ok(SeqRealization { seq: seq.to_vec(), end: cur, reps, step_failures, thick })
}

/// Identities relating `(X, V)` over `g` and `μ_k(X, V)` over `g2`:
/// `g_k = h_k − h'_k`, the character-level g recursion, the balanced F identity under
/// extended Y-seed mutation, the tropical relation between F and h, and its reduced form.
pub fn step_identities(g: &Gsp, x: &DecoratedRep, g2: &Gsp, y: &DecoratedRep, k: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let gx = g_vector(g, x)?;
    let hx = h_vector(g, x)?;
    let gy = g_vector(g2, y)?;
    let hy = h_vector(g2, y)?;
    let kb = g.block(k);
    for c in kb.clone() {
        if gx[c] != hx[c] - hy[c] {
            out.push(format!("g_k = h_k − h'_k fails at {}: {} vs {} − {}", g.frame().char_name(c), gx[c], hx[c], hy[c]));
        }
    }
    let sp = g.species();
    for j in 0..g.groups.len() {
        for (s, c) in g.block(j).enumerate() {
            let expect = if j == k {
                -gx[c]
            } else {
                let a_kj = &sp.mult[k][j];
                let a_jk_dual = transpose(&sp.mult[j][k]);
                gx[c]
                    + kb.clone()
                        .enumerate()
                        .map(|(r, kc)| (gx[kc] - hx[kc]) * a_kj[r][s] as i64 + hx[kc] * a_jk_dual[r][s] as i64)
                        .sum::<i64>()
            };
            if gy[c] != expect {
                out.push(format!("g recursion fails at {}: got {}, expected {}", g.frame().char_name(c), gy[c], expect));
            }
        }
    }
    let fx = f_polynomial(g, x, Regime::Counting, Exec::Sequential)?.poly;
    let fy = f_polynomial(g2, y, Regime::Counting, Exec::Sequential)?.poly;
    let seed = ExtendedYSeed::free(g.clone());
    let yv = seed.vars.clone();
    let ym = extended_y_seed_mutate(&seed, k)?.vars;
    let mut lhs = SFRational::eval_poly(&fx, &yv);
    let mut rhs = SFRational::eval_poly(&fy, &ym);
    for c in kb.clone() {
        lhs = lhs.mul(&yv[c].one_plus().powi(hx[c]));
        rhs = rhs.mul(&ym[c].one_plus().powi(hy[c]));
    }
    if lhs != rhs {
        out.push(format!("balanced F identity fails: {:?} vs {:?}", lhs, rhs));
    }
    match tropical_h_char(g, &fx) {
        Ok(h) if h == hx => {}
        Ok(h) => out.push(format!("tropical h {:?} differs from h {:?}", h, hx)),
        Err(e) => out.push(e.to_string()),
    }
    let b = sp.exchange_matrix()?;
    let fz = specialize_poly(&fx, &g.char_vertex(), g.groups.len());
    let hz = tropical_h_from_f(&fz, &b)?;
    if hz != reduce_classes(g, &hx) {
        out.push(format!("reduced tropical h {:?} differs from {:?}", hz, reduce_classes(g, &hx)));
    }
    Ok(out)
}

/// `F_X` evaluated in Trop at `y_{i,ρ} ↦ Y_{i,ρ}^{-1} Y^{[ρ ⊗ E_i A^*]}`.
pub fn tropical_h_char(g: &Gsp, f: &IntPoly) -> Result<Vec<i64>> {
    let n = g.num_chars();
    let mut args: Vec<Tropical> = (0..n)
        .map(|c| {
            let mut e = vec![0i64; n];
            e[c] = -1;
            Tropical(e)
        })
        .collect();
    for a in &g.arrows {
        args[a.tgt].0[a.src] += 1;
    }
    Ok(Tropical::eval(f, &args)?.0)
}

// ---------------------------------------------------------------------------
// Engine comparison

fn rep_case(g: &Gsp, seq: &[usize], c: usize) -> String {
    format!("seq ({}), decoration {}", seq_label(g, seq), g.frame().char_name(c))
}

fn repro(subject: &str, g: &Gsp, seq: &[usize], c: usize) -> String {
    format!("gspecies rep-mutate --species {subject} --seq {} --decoration {}", seq_label(g, seq), g.frame().char_name(c))
}

/// Specialized F and reduced g of every realization against `compute_fg`, plus the per-step identities.
pub fn dual_engine_suite(subject: &str, g: &Gsp, max_len: usize, exec: Exec) -> (SuiteReport, SuiteReport, Vec<SeqRealization>) {
    let mut eng = SuiteReport::new("dual-engine");
    let mut ids = SuiteReport::new("mutation-identities");
    let b = match g.species().exchange_matrix() {
        Ok(b) => b,
        Err(e) => {
            eng.fail("exchange matrix".into(), e.to_string(), String::new());
            return (eng, ids, vec![]);
        }
    };
    let seqs = sequences(g.groups.len(), max_len);
    let results = exec.map(seqs.clone(), |s| (realize_sequence(g, &s, true), compute_fg_all(&b, &s)));
    let mut real = Vec::new();
    let mut thick = 0;
    for (s, (r, comb)) in seqs.iter().zip(results) {
        let (r, comb) = match (r, comb) {
            (Ok(r), Ok(c)) => (r, c),
            (Err(e), _) | (_, Err(e)) => {
                eng.fail(format!("seq ({})", seq_label(g, s)), e.to_string(), format!("gspecies mutate --species {subject} --seq {}", seq_label(g, s)));
                continue;
            }
        };
        ids.cases += 1;
        for f in &r.step_failures {
            ids.fail(format!("seq ({})", seq_label(g, s)), f.clone(), format!("gspecies rep-mutate --species {subject} --seq {}", seq_label(g, s)));
        }
        thick += r.thick as usize;
        let cv = r.end.char_vertex();
        for (c, x) in r.reps.iter().enumerate() {
            eng.cases += 1;
            let k = cv[c];
            let got = f_polynomial(&r.end, x, Regime::Counting, Exec::Sequential)
                .and_then(|f| Ok((specialize_poly(&f.poly, &cv, g.groups.len()), reduce_classes(&r.end, &g_vector(&r.end, x)?))));
            match got {
                Ok((f, gv)) if f == comb[k].f && gv == comb[k].g => {}
                Ok((f, gv)) => eng.fail(
                    rep_case(&r.end, s, c),
                    format!("representation side ({}, {:?}) vs combinatorial ({}, {:?})", f.render(&crate::poly::default_names(b.size())), gv, comb[k].f.render(&crate::poly::default_names(b.size())), comb[k].g),
                    repro(subject, &r.end, s, c),
                ),
                Err(e) => eng.fail(rep_case(&r.end, s, c), e.to_string(), repro(subject, &r.end, s, c)),
            }
        }
        real.push(r);
    }
    if thick > 0 {
        eng.notes.push(format!("{thick} sequences produced representations with a character space of dimension ≥ 2; their F-polynomials come from point counts over prime fields"));
    }
    (eng, ids, real)
}

// ---------------------------------------------------------------------------
// Combinatorial statements on (F, g)

/// Constant term 1 and a divisibility-maximal monomial with coefficient 1.
pub fn check_f_shape(f: &IntPoly) -> (bool, bool) {
    f_shape_ok(f)
}

pub fn conjecture_suites(b: &ExchangeMatrix, max_len: usize, exec: Exec, cluster_bound: u32) -> Vec<SuiteReport> {
    let n = b.size();
    let seqs = sequences(n, max_len);
    let data: Vec<Result<Vec<FGPair>>> = exec.map(seqs.clone(), |s| compute_fg_all(b, &s));
    let lbl = |s: &[usize]| s.iter().map(|&i| b.labels[i].clone()).collect::<Vec<_>>().join(",");
    let m = format!("[{}]", b.rows.iter().map(|r| format!("{r:?}")).collect::<Vec<_>>().join(",")).replace(' ', "");
    let rp = |s: &[usize], k: usize| format!("gspecies fg --matrix '{m}' --seq {} --vertex {}", lbl(s), b.labels[k]);
    let mut f_const = SuiteReport::new("f-constant-term");
    let mut f_top = SuiteReport::new("f-top-monomial");
    let mut sign_coh = SuiteReport::new("g-sign-coherence");
    let mut unimod = SuiteReport::new("g-unimodularity");
    let mut distinct = SuiteReport::new("g-distinct-monomials");
    let mut reseed = SuiteReport::new("g-change-of-seed");
    let mut clusters: Vec<(Vec<usize>, Vec<FGPair>)> = Vec::new();
    for (s, d) in seqs.iter().zip(&data) {
        let pairs = match d {
            Ok(p) => p,
            Err(e) => {
                f_const.fail(format!("seq ({})", lbl(s)), e.to_string(), rp(s, 0));
                continue;
            }
        };
        for (k, p) in pairs.iter().enumerate() {
            let (c1, top) = check_f_shape(&p.f);
            f_const.cases += 1;
            f_top.cases += 1;
            if !c1 {
                f_const.fail(format!("seq ({}), vertex {}", lbl(s), b.labels[k]), format!("constant term of {:?}", p.f), rp(s, k));
            }
            if !top {
                f_top.fail(format!("seq ({}), vertex {}", lbl(s), b.labels[k]), format!("maximal monomials of {:?}", p.f), rp(s, k));
            }
        }
        let gs: Vec<Vec<i64>> = pairs.iter().map(|p| p.g.clone()).collect();
        sign_coh.cases += 1;
        if !is_sign_coherent(&gs) {
            sign_coh.fail(format!("seq ({})", lbl(s)), format!("g-vectors {gs:?}"), rp(s, 0));
        }
        unimod.cases += 1;
        if !abs_det_is_one(&gs) {
            unimod.fail(format!("seq ({})", lbl(s)), format!("det of {gs:?} is {}", int_det(&gs)), rp(s, 0));
        }
        clusters.push((s.clone(), pairs.clone()));
    }
    // g recursion under a change of initial seed; the second reading uses b_jk for the last coefficient
    let mut literal_failures = 0usize;
    let work: Vec<(usize, Vec<usize>)> = (0..n).flat_map(|k| seqs.iter().map(move |s| (k, s.clone()))).collect();
    let res = exec.map(work, |(k, s)| {
        let bk = mutate_matrix(b, k)?;
        let mut ks = vec![k];
        ks.extend(&s);
        Ok((k, s.clone(), compute_fg_all(b, &s)?, compute_fg_all(&bk, &ks)?))
    });
    for r in res {
        let (k, s, base, moved): (usize, Vec<usize>, Vec<FGPair>, Vec<FGPair>) = match r {
            Ok(x) => x,
            Err(e) => {
                let e: GspError = e;
                reseed.fail("change of initial seed".into(), e.to_string(), String::new());
                continue;
            }
        };
        for j in 0..n {
            reseed.cases += 1;
            let g = &base[j].g;
            let gk = g[k];
            let fz: Vec<i64> = (0..n).map(|i| if i == k { -g[i] } else { g[i] + b.get(i, k).max(0) * gk - b.get(i, k) * gk.min(0) }).collect();
            let lit: Vec<i64> = (0..n).map(|i| if i == k { -g[i] } else { g[i] + b.get(i, k).max(0) * gk - b.get(j, k) * gk.min(0) }).collect();
            if moved[j].g != fz {
                reseed.fail(format!("k = {}, seq ({}), vertex {}", b.labels[k], lbl(&s), b.labels[j]), format!("g' = {:?}, predicted {:?}", moved[j].g, fz), rp(&s, j));
            }
            if moved[j].g != lit {
                literal_failures += 1;
            }
        }
    }
    reseed.notes.push(format!("reading the last coefficient as b_jk instead of b_ik disagrees with the computed g-vectors in {literal_failures} of {} cases", reseed.cases));
    // cluster monomials inside the ball
    let mut seen: BTreeMap<Vec<i64>, (Vec<(u32, Vec<i64>, IntPoly)>, Vec<usize>)> = BTreeMap::new();
    for (s, pairs) in &clusters {
        let mut a = vec![0u32; n];
        loop {
            let total: Vec<i64> = (0..n).map(|c| pairs.iter().zip(&a).map(|(p, &x)| x as i64 * p.g[c]).sum()).collect();
            let mut key: Vec<(u32, Vec<i64>, IntPoly)> = pairs.iter().zip(&a).filter(|(_, &x)| x > 0).map(|(p, &x)| (x, p.g.clone(), p.f.clone())).collect();
            key.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
            distinct.cases += 1;
            match seen.get(&total) {
                Some((other, os)) if *other != key => {
                    distinct.fail(format!("seq ({}) vs seq ({})", lbl(s), lbl(os)), format!("g-vector {total:?} from different cluster monomials"), rp(s, 0));
                }
                Some(_) => {}
                None => {
                    seen.insert(total, (key, s.clone()));
                }
            }
            let mut i = 0;
            while i < n && a[i] == cluster_bound {
                a[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            a[i] += 1;
        }
    }
    distinct.notes.push(format!("cluster monomials with exponents ≤ {cluster_bound}; {} distinct g-vectors", seen.len()));
    vec![f_const, f_top, sign_coh, unimod, distinct, reseed]
}

// ---------------------------------------------------------------------------
// E-invariants

pub fn e_invariant_suite(subject: &str, real: &[SeqRealization], exec: Exec) -> SuiteReport {
    let mut rep = SuiteReport::new("e-invariant");
    let results = exec.map(real.iter().collect::<Vec<_>>(), e_checks);
    let mut literal = 0usize;
    let mut literal_example = None;
    for (r, res) in real.iter().zip(results) {
        match res {
            Ok((cases, fails, lit)) => {
                rep.cases += cases;
                for f in fails {
                    rep.fail(format!("seq ({})", seq_label(&r.end, &r.seq)), f, format!("gspecies rep-mutate --species {subject} --seq {}", seq_label(&r.end, &r.seq)));
                }
                if let Some(w) = lit {
                    literal += 1;
                    literal_example.get_or_insert(format!("seq ({}): {w}", seq_label(&r.end, &r.seq)));
                }
            }
            Err(e) => rep.fail(format!("seq ({})", seq_label(&r.end, &r.seq)), e.to_string(), String::new()),
        }
    }
    if literal > 0 {
        rep.notes.push(format!(
            "the reading 'ker γ = 0 or ker γ = im β' fails on {literal} sequences with E = 0 (first: {}); the form 'ker β = 0 or ker γ = im β' holds",
            literal_example.unwrap()
        ));
    }
    rep
}

type EOutcome = (usize, Vec<String>, Option<String>);

fn e_checks(r: &SeqRealization) -> Result<EOutcome> {
    let g = &r.end;
    let mut cases = 0;
    let mut fails = Vec::new();
    let mut literal = None;
    let op = opposite_gsp(g);
    for (c, x) in r.reps.iter().enumerate() {
        cases += 1;
        let name = g.frame().char_name(c);
        let e = e_inv(g, x)?;
        if e != 0 {
            fails.push(format!("E = {e} for decoration {name}"));
        }
        let lb = e_lower_bound(g, x)?;
        if e < lb {
            fails.push(format!("E = {e} below the bound {lb} for decoration {name}"));
        }
        if e == 0 {
            let d = eics_dichotomies(g, x)?;
            if !d.support || !d.kernel_form {
                fails.push(format!("dichotomy fails for decoration {name}: {d:?}"));
            }
            if !d.literal_form && literal.is_none() {
                literal = d.literal_witness.map(|w| format!("decoration {name}, {w}"));
            }
        }
        let ed = e_inv(&op, &dual_rep(g, x))?;
        if ed != e {
            fails.push(format!("E of the dual is {ed}, E is {e}, decoration {name}"));
        }
    }
    for k in 0..g.groups.len() {
        let report = match mutate(g, k) {
            Ok(rp) if rp.two_acyclic.iter().all(|&b| b) => rp,
            _ => continue,
        };
        let moved: Vec<DecoratedRep> = r.reps.iter().map(|x| mutate_rep_with(g, x, &report)).collect::<Result<_>>()?;
        let g2 = report.reduced();
        for a in 0..r.reps.len() {
            for b in a..r.reps.len() {
                cases += 1;
                let before = e_sym(g, &r.reps[a], &r.reps[b])?;
                let after = e_sym(g2, &moved[a], &moved[b])?;
                if before != after {
                    fails.push(format!("E^sym changes from {before} to {after} under μ at {} for decorations {}, {}", g.labels[k], g.frame().char_name(a), g.frame().char_name(b)));
                }
                let s = r.reps[a].direct_sum(&r.reps[b]);
                let lb = e_lower_bound(g, &s)?;
                let es = e_inv(g, &s)?;
                if es < lb {
                    fails.push(format!("E = {es} below the bound {lb} on a direct sum"));
                }
            }
        }
    }
    Ok((cases, fails, literal))
}

/// `F_{X⊕X'} = F_X F_{X'}` on pairs of realized representations over the same GSP.
/// Thick sums are only counted up to total dimension `max_dim`.
pub fn f_multiplicativity_suite(real: &[SeqRealization], max_pairs_per_seq: usize, max_dim: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("f-multiplicativity");
    for r in real {
        let mut done = 0;
        'outer: for a in 0..r.reps.len() {
            for b in a..r.reps.len() {
                if done == max_pairs_per_seq {
                    break 'outer;
                }
                let s = r.reps[a].direct_sum(&r.reps[b]);
                if s.is_zero_module() || (!is_thin(&s) && s.total_dim() > max_dim) {
                    continue;
                }
                done += 1;
                rep.cases += 1;
                let fa = f_polynomial(&r.end, &r.reps[a], Regime::Counting, Exec::Sequential);
                let fb = f_polynomial(&r.end, &r.reps[b], Regime::Counting, Exec::Sequential);
                let fs = f_polynomial(&r.end, &s, Regime::Counting, Exec::Sequential);
                match (fa, fb, fs) {
                    (Ok(fa), Ok(fb), Ok(fs)) if fa.poly.mul(&fb.poly) == fs.poly => {}
                    (Ok(_), Ok(_), Ok(_)) => rep.fail(format!("seq ({}), pair ({a}, {b})", seq_label(&r.end, &r.seq)), "F of the direct sum is not the product".into(), String::new()),
                    _ => rep.skipped += 1,
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Cluster character

/// Laurent expansion of `x_{k;seq}` from coefficient-free exchange relations.
pub fn laurent_of(r: &SFRational) -> Option<Laurent> {
    let den = r.den();
    if den.terms().len() != 1 {
        return None;
    }
    let (de, dc) = den.terms().iter().next().unwrap();
    let mut out = Laurent::new();
    for (e, c) in r.num().terms() {
        let q = num_integer::Integer::div_rem(c, dc);
        if !num_traits::Zero::is_zero(&q.1) {
            return None;
        }
        let exp = e.iter().zip(de).map(|(&a, &b)| a as i64 - b as i64).collect();
        out.insert(exp, num_traits::ToPrimitive::to_i64(&q.0)?);
    }
    Some(out)
}

pub fn cluster_character_suite(subject: &str, g: &Gsp, real: &[SeqRealization]) -> SuiteReport {
    let mut rep = SuiteReport::new("cluster-character");
    let b = match g.species().exchange_matrix() {
        Ok(b) => b,
        Err(e) => {
            rep.fail("exchange matrix".into(), e.to_string(), String::new());
            return rep;
        }
    };
    for r in real {
        let cv = r.end.char_vertex();
        let mut done = vec![false; g.groups.len()];
        for (c, x) in r.reps.iter().enumerate() {
            let k = cv[c];
            if done[k] || x.is_zero_module() {
                continue;
            }
            done[k] = true;
            rep.cases += 1;
            let lhs = cluster_character(&r.end, x, &b, Regime::Counting, Exec::Sequential);
            let rhs = cluster_variable(&b, &r.seq, k).map(|v| laurent_of(&v));
            match (lhs, rhs) {
                (Ok(l), Ok(Some(rv))) if l == rv => {}
                (l, rv) => rep.fail(
                    format!("seq ({}), vertex {}", seq_label(g, &r.seq), g.labels[k]),
                    format!("character {:?} vs exchange relations {:?}", l, rv),
                    format!("gspecies rep-mutate --species {subject} --seq {}", seq_label(g, &r.seq)),
                ),
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Involutions and B-compatibility

fn gsp_invariants(g: &Gsp, jac: usize) -> (Vec<Vec<Vec<Vec<u32>>>>, Option<ExchangeMatrix>, usize) {
    let sp = g.species();
    (sp.mult.clone(), sp.exchange_matrix().ok(), jacobian_basis(g, jac).len())
}

pub fn involution_suites(inputs: &[(String, Gsp)], exec: Exec, jac_degree: usize) -> Vec<SuiteReport> {
    let mut mat = SuiteReport::new("involution-matrix");
    let mut ys = SuiteReport::new("involution-y-seed");
    let mut eys = SuiteReport::new("involution-extended-y-seed");
    let mut gi = SuiteReport::new("involution-gsp-invariants");
    let mut rd = SuiteReport::new("involution-gspdr");
    type Out = Vec<(usize, Option<String>)>;
    let results: Vec<Out> = exec.map(inputs.iter().collect::<Vec<_>>(), |(name, g)| {
        let mut o: Out = Vec::new();
        let n = g.groups.len();
        let b = g.species().exchange_matrix();
        for k in 0..n {
            if let Ok(b) = &b {
                let back = mutate_matrix(b, k).and_then(|m| mutate_matrix(&m, k));
                o.push((0, (back.as_ref().ok() != Some(b)).then(|| format!("{name}: matrix at {k}"))));
                let y0 = YSeed::free(b.clone());
                let y2 = y_seed_mutate(&y0, k).and_then(|y| y_seed_mutate(&y, k));
                o.push((1, (y2.as_ref().ok() != Some(&y0)).then(|| format!("{name}: Y-seed at {k}"))));
            }
            let e0 = ExtendedYSeed::free(g.clone());
            match extended_y_seed_mutate(&e0, k) {
                Ok(e1) => {
                    let back = mutate(g, k).and_then(|r| {
                        let e1 = ExtendedYSeed { vars: e1.vars, gsp: r.reduced().clone() };
                        extended_y_seed_mutate(&e1, k)
                    });
                    match back {
                        Ok(e2) => o.push((2, (e2.vars != e0.vars).then(|| format!("{name}: extended Y-seed at {k}")))),
                        Err(_) => o.push((2 + 100, None)),
                    }
                }
                Err(_) => o.push((2 + 100, None)),
            }
            let twice = mutate(g, k).and_then(|r| {
                if r.two_acyclic.iter().all(|&x| x) {
                    Ok(Some((r.clone(), mutate(r.reduced(), k)?)))
                } else {
                    Ok(None)
                }
            });
            match twice {
                Ok(Some((r1, r2))) => {
                    let before = gsp_invariants(g, jac_degree);
                    let after = gsp_invariants(r2.reduced(), jac_degree);
                    o.push((3, (before != after).then(|| format!("{name}: invariants at {k}: {:?} vs {:?}", before, after))));
                    // representations: realized ones of length ≤ 1 plus the negative simples
                    let mut reps: Vec<DecoratedRep> = (0..g.num_chars()).map(|c| DecoratedRep::negative(g, simple_deco(g, c))).collect();
                    for j in 0..n {
                        if let Ok(real) = realize_sequence(g, &[j], false) {
                            if real.end.arrows == g.arrows {
                                reps.extend(real.reps);
                            }
                        }
                    }
                    for x in reps {
                        let back = mutate_rep_with(g, &x, &r1).and_then(|y| mutate_rep_with(r1.reduced(), &y, &r2));
                        match back {
                            Ok(z) if r2.reduced().arrows == g.arrows => {
                                let iso = is_isomorphic(g, &x, &z, 7);
                                o.push((4, (!iso).then(|| format!("{name}: representation {:?} not recovered at {k}", x.dims))));
                            }
                            Ok(z) => {
                                let same = z.dims == x.dims && z.deco == x.deco;
                                o.push((4, (!same).then(|| format!("{name}: dimension data not recovered at {k}"))));
                            }
                            Err(_) => o.push((4 + 100, None)),
                        }
                    }
                }
                _ => o.push((3 + 100, None)),
            }
        }
        o
    });
    let suites = [&mut mat, &mut ys, &mut eys, &mut gi, &mut rd];
    for o in results {
        for (kind, f) in o {
            if kind >= 100 {
                suites[kind - 100].skipped += 1;
                continue;
            }
            suites[kind].cases += 1;
            if let Some(f) = f {
                suites[kind].fail(f.clone(), "double application differs".into(), String::new());
            }
        }
    }
    vec![mat, ys, eys, gi, rd]
}

pub fn b_compat_suite(inputs: &[(String, Gsp)], exec: Exec) -> SuiteReport {
    let mut rep = SuiteReport::new("b-compatibility");
    let results = exec.map(inputs.iter().collect::<Vec<_>>(), |(name, g)| (0..g.groups.len()).map(|k| (name.clone(), k, b_compat_check(g, k))).collect::<Vec<_>>());
    for (name, k, r) in results.into_iter().flatten() {
        match r {
            Ok(true) => rep.cases += 1,
            Ok(false) => {
                rep.cases += 1;
                rep.fail(format!("{name}, k = {k}"), "μ_k(B) differs from B of the mutated GSP".into(), String::new());
            }
            Err(GspError::MutationNotTwoAcyclic { .. }) => rep.skipped += 1,
            Err(e) => {
                rep.cases += 1;
                rep.fail(format!("{name}, k = {k}"), e.to_string(), String::new());
            }
        }
    }
    rep
}

/// Shipped examples followed by `count` seeded random locally free GSPs.
pub fn involution_inputs(count: usize, seed: u64) -> Vec<(String, Gsp)> {
    let mut v = crate::fixtures::shipped();
    for (i, g) in random_gsps(count, seed, 6).into_iter().enumerate() {
        v.push((format!("random-{seed}-{i}"), g));
    }
    v
}

// ---------------------------------------------------------------------------
// Derivative oracle

pub fn derivative_oracle_suite(max_len: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("derivative-oracle");
    for (name, sp) in oracle_species() {
        let model = GroupBasisModel::new(Gsp::from_species(&sp, 6), seed);
        let (count, fail) = compare_derivatives(&model, max_len);
        rep.cases += count;
        if let Some(f) = fail {
            rep.fail(name, f, String::new());
        }
    }
    rep
}

// ---------------------------------------------------------------------------

/// All suites for one GSP.
pub fn verify_all(subject: &str, g: &Gsp, max_len: usize, exec: Exec) -> VerificationReport {
    let mut suites = Vec::new();
    let (eng, ids, real) = dual_engine_suite(subject, g, max_len, exec);
    suites.push(eng);
    suites.push(ids);
    if let Ok(b) = g.species().exchange_matrix() {
        suites.extend(conjecture_suites(&b, max_len, exec, 2));
    }
    suites.push(e_invariant_suite(subject, &real, exec));
    suites.push(cluster_character_suite(subject, g, &real));
    VerificationReport { subject: subject.into(), suites }
}

/// Seeded random choice used by tests that sample sequences.
pub fn random_sequence(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<usize> {
    let mut s: Vec<usize> = Vec::new();
    while s.len() < len {
        let k = rng.gen_range(0..n);
        if s.last() != Some(&k) {
            s.push(k);
        }
    }
    s
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{c3_gsp, c3_matrix, rank2_gsp};

    #[test]
    fn sequence_enumeration() {
        assert_eq!(sequences(3, 2).len(), 1 + 3 + 6);
        assert_eq!(sequences(2, 8).len(), 17);
    }

    #[test]
    fn c3_short_ball_agrees() {
        let g = c3_gsp();
        let (eng, ids, real) = dual_engine_suite("c3", &g, 3, Exec::Parallel);
        assert!(eng.passed(), "{:?}", eng.failures);
        assert!(ids.passed(), "{:?}", ids.failures);
        let e = e_invariant_suite("c3", &real, Exec::Parallel);
        assert!(e.passed(), "{:?}", e.failures);
        let cc = cluster_character_suite("c3", &g, &real);
        assert!(cc.passed(), "{:?}", cc.failures);
    }

    #[test]
    fn rank2_short_ball_agrees() {
        let (eng, ids, _) = dual_engine_suite("rank2", &rank2_gsp(), 4, Exec::Parallel);
        assert!(eng.passed(), "{:?}", eng.failures);
        assert!(ids.passed(), "{:?}", ids.failures);
    }

    #[test]
    fn conjectures_on_c3_short_ball() {
        for s in conjecture_suites(&c3_matrix(), 3, Exec::Parallel, 2) {
            assert!(s.passed(), "{}: {:?}", s.suite, s.failures);
        }
    }

    #[test]
    fn oracle_agrees_on_two_cycles() {
        let r = derivative_oracle_suite(2, 5);
        assert!(r.passed(), "{:?}", r.failures);
    }
}
