//! Decorated representations: triangle maps, mutation with splitting data,
//! F-polynomials, g/h-vectors, Hom spaces, E-invariants and duality.

use crate::error::{GspError, Result};
use crate::exec::Exec;
use crate::gsp::{cyclic_derivative, path2_derivative, Arrow, Gsp, Potential};
use crate::linalg::{complement, coordinate_matrix, intersection, q, Matrix, Q};
use crate::mutation::{mutate, MutationReport};
use crate::poly::IntPoly;
use crate::reduce::eval_elem_between;
use crate::seed::ExchangeMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Arrow actions on row vectors: arrow `u → v` acts by a `dims[u] × dims[v]` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedRep {
    pub dims: Vec<usize>,
    pub mats: Vec<Matrix>,
    pub deco: Vec<usize>,
}

impl DecoratedRep {
    pub fn zero(g: &Gsp) -> Self {
        Self::negative(g, vec![0; g.num_chars()])
    }

    /// `(0, V)`.
    pub fn negative(g: &Gsp, deco: Vec<usize>) -> Self {
        let n = g.num_chars();
        DecoratedRep { dims: vec![0; n], mats: g.arrows.iter().map(|_| Matrix::zeros(0, 0)).collect(), deco }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero_module(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn check_shape(&self, g: &Gsp) -> Result<()> {
        if self.dims.len() != g.num_chars() || self.deco.len() != g.num_chars() || self.mats.len() != g.arrows.len() {
            return Err(GspError::Invalid("representation does not match the GSP".into()));
        }
        for (a, m) in g.arrows.iter().zip(&self.mats) {
            if m.rows() != self.dims[a.src] || m.cols() != self.dims[a.tgt] {
                return Err(GspError::Invalid(format!("matrix of {} has the wrong shape", a.id)));
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, o: &DecoratedRep) -> DecoratedRep {
        let dims = self.dims.iter().zip(&o.dims).map(|(a, b)| a + b).collect();
        let deco = self.deco.iter().zip(&o.deco).map(|(a, b)| a + b).collect();
        let mats = self
            .mats
            .iter()
            .zip(&o.mats)
            .map(|(a, b)| {
                let mut m = Matrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
                m.set_block(0, 0, a);
                m.set_block(a.rows(), a.cols(), b);
                m
            })
            .collect();
        DecoratedRep { dims, mats, deco }
    }

    /// Sum over the characters of each vertex.
    pub fn reduced_dims(&self, g: &Gsp) -> Vec<i64> {
        reduce_classes(g, &self.dims.iter().map(|&x| x as i64).collect::<Vec<_>>())
    }
}

pub fn reduce_classes(g: &Gsp, v: &[i64]) -> Vec<i64> {
    let cv = g.char_vertex();
    let mut out = vec![0; g.groups.len()];
    for (c, x) in v.iter().enumerate() {
        out[cv[c]] += x;
    }
    out
}

fn action(g: &Gsp, r: &DecoratedRep, e: &crate::gsp::Elem, from: usize, to: usize) -> Matrix {
    eval_elem_between(e, &r.mats, &g.arrows, r.dims[from], r.dims[to])
}

/// Every `∂_a S` acts as zero.
pub fn check_relations(g: &Gsp, r: &DecoratedRep) -> Result<()> {
    r.check_shape(g)?;
    for (i, a) in g.arrows.iter().enumerate() {
        let d = cyclic_derivative(&g.potential, i as u32);
        if d.is_empty() {
            continue;
        }
        if !action(g, r, &d, a.tgt, a.src).is_zero() {
            return Err(GspError::RelationViolation(format!("∂ at {} does not vanish", a.id)));
        }
    }
    Ok(())
}

/// `X_in(κ) →α X(κ) →β X_out(κ) →γ X_in(κ)` at a character vertex κ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleMaps {
    pub ins: Vec<u32>,
    pub outs: Vec<u32>,
    pub alpha: Matrix,
    pub beta: Matrix,
    pub gamma: Matrix,
}

pub fn triangle_at_char(g: &Gsp, r: &DecoratedRep, kappa: usize) -> Result<TriangleMaps> {
    let na = g.arrows.len() as u32;
    let ins: Vec<u32> = (0..na).filter(|&a| g.arrows[a as usize].tgt == kappa).collect();
    let outs: Vec<u32> = (0..na).filter(|&a| g.arrows[a as usize].src == kappa).collect();
    let dk = r.dims[kappa];
    let in_dim: usize = ins.iter().map(|&a| r.dims[g.arrows[a as usize].src]).sum();
    let out_dim: usize = outs.iter().map(|&b| r.dims[g.arrows[b as usize].tgt]).sum();
    let alpha = Matrix::vstack(&ins.iter().map(|&a| &r.mats[a as usize]).collect::<Vec<_>>(), dk);
    let beta = Matrix::hstack(&outs.iter().map(|&b| &r.mats[b as usize]).collect::<Vec<_>>(), dk);
    let mut gamma = Matrix::zeros(out_dim, in_dim);
    let mut ro = 0;
    for &b in &outs {
        let w = g.arrows[b as usize].tgt;
        let mut co = 0;
        for &a in &ins {
            let u = g.arrows[a as usize].src;
            let e = path2_derivative(&g.potential, a, b);
            if e.contains_key(&vec![]) {
                return Err(GspError::NotTwoAcyclicAtK { vertex: g.labels[g.char_vertex()[kappa]].clone(), path: vec![g.arrows[a as usize].id.clone(), g.arrows[b as usize].id.clone()] });
            }
            if !e.is_empty() {
                gamma.set_block(ro, co, &action(g, r, &e, w, u));
            }
            co += r.dims[u];
        }
        ro += r.dims[w];
    }
    if !beta.mul(&gamma).is_zero() || !gamma.mul(&alpha).is_zero() {
        return Err(GspError::RelationViolation(format!("triangle at {} does not compose to zero", g.frame().char_name(kappa))));
    }
    Ok(TriangleMaps { ins, outs, alpha, beta, gamma })
}

/// Triangle maps at every character of block k.
pub fn triangle_maps(g: &Gsp, r: &DecoratedRep, k: usize) -> Result<Vec<TriangleMaps>> {
    g.block(k).map(|c| triangle_at_char(g, r, c)).collect()
}

/// Representation of `μ̃_k(A,S)` built with echelon splitting data, before reduction.
pub fn premutate_rep(g: &Gsp, r: &DecoratedRep, report: &MutationReport) -> Result<DecoratedRep> {
    let pm = &report.premutation;
    let ng = &pm.gsp;
    let mut dims = r.dims.clone();
    let mut deco = r.deco.clone();
    let mut mats: Vec<Matrix> = ng.arrows.iter().map(|_| Matrix::zeros(0, 0)).collect();
    for (&old, &new) in &pm.kept {
        mats[new as usize] = r.mats[old as usize].clone();
    }
    for (&(a, b), &ab) in &pm.composite {
        mats[ab as usize] = r.mats[a as usize].mul(&r.mats[b as usize]);
    }
    for kappa in g.block(pm.k) {
        let t = triangle_at_char(g, r, kappa)?;
        let in_dim = t.alpha.rows();
        let out_dim = t.beta.cols();
        let ker_g = t.gamma.kernel();
        let im_b = t.beta.image();
        let im_g = t.gamma.image();
        let ker_a = t.alpha.kernel();
        let c1 = complement(&im_b, &ker_g);
        let r_out = complement(&ker_g, &Matrix::identity(out_dim));
        let basis = Matrix::vstack(&[&im_b, &c1, &r_out], out_dim);
        let tinv = basis.inverse().expect("basis of X_out");
        let pi_rho = tinv.block(0, out_dim, im_b.rows(), im_b.rows() + c1.rows());
        let g_coords = coordinate_matrix(&im_g, &t.gamma);
        let c3 = complement(&im_g, &ker_a);
        let v = r.deco[kappa];
        let nd = c1.rows() + im_g.rows() + c3.rows() + v;
        let mut alpha_new = Matrix::zeros(out_dim, nd);
        alpha_new.set_block(0, 0, &pi_rho.scale(&q(-1)));
        alpha_new.set_block(0, c1.rows(), &g_coords.scale(&q(-1)));
        let mut beta_new = Matrix::zeros(nd, in_dim);
        beta_new.set_block(c1.rows(), 0, &im_g);
        beta_new.set_block(c1.rows() + im_g.rows(), 0, &c3);
        let ker_b = t.beta.kernel();
        let im_a = t.alpha.image();
        let new_v = ker_b.rows() - intersection(&ker_b, &im_a).rows();
        dims[kappa] = nd;
        deco[kappa] = new_v;
        let mut ro = 0;
        for &b in &t.outs {
            let w = g.arrows[b as usize].tgt;
            mats[pm.dual_out[&b] as usize] = alpha_new.block(ro, ro + r.dims[w], 0, nd);
            ro += r.dims[w];
        }
        let mut co = 0;
        for &a in &t.ins {
            let u = g.arrows[a as usize].src;
            mats[pm.dual_in[&a] as usize] = beta_new.block(0, nd, co, co + r.dims[u]);
            co += r.dims[u];
        }
    }
    let out = DecoratedRep { dims, mats, deco };
    out.check_shape(ng)?;
    Ok(out)
}

/// `μ_k` of a decorated representation; returns the mutated GSP and representation.
pub fn mutate_rep(g: &Gsp, r: &DecoratedRep, k: usize) -> Result<(Gsp, DecoratedRep)> {
    let report = mutate(g, k)?;
    let rep = mutate_rep_with(g, r, &report)?;
    Ok((report.reduced().clone(), rep))
}

pub fn mutate_rep_with(g: &Gsp, r: &DecoratedRep, report: &MutationReport) -> Result<DecoratedRep> {
    if r.total_dim() >= g.trunc {
        return Err(GspError::Invalid(format!("truncation {} too small for a representation of dimension {}", g.trunc, r.total_dim())));
    }
    let pre = premutate_rep(g, r, report)?;
    check_relations(&report.premutation.gsp, &pre)?;
    let mats = report.reduction.transport(&pre.dims, &pre.mats)?;
    let out = DecoratedRep { dims: pre.dims, mats, deco: pre.deco };
    check_relations(report.reduced(), &out)?;
    Ok(out)
}

/// `μ_{i_1} … μ_{i_n}(μ_{i_n} … μ_{i_1}(A,S), 0, V)`.
pub fn mutate_gspdr_sequence(g: &Gsp, deco: &[usize], seq: &[usize]) -> Result<(Gsp, DecoratedRep)> {
    let prefix_err = |pos: usize, e: GspError| GspError::MutationUndefined {
        prefix: seq[..pos].iter().map(|&i| g.labels.get(i).cloned().unwrap_or_else(|| i.to_string())).collect(),
        reason: e.to_string(),
    };
    let mut cur = g.clone();
    for (pos, &k) in seq.iter().enumerate() {
        cur = mutate(&cur, k).map_err(|e| prefix_err(pos, e))?.reduced().clone();
    }
    let mut rep = DecoratedRep::negative(&cur, deco.to_vec());
    for (pos, &k) in seq.iter().enumerate().rev() {
        let (ng, nr) = mutate_rep(&cur, &rep, k).map_err(|e| prefix_err(seq.len() + (seq.len() - pos) - 1, e))?;
        cur = ng;
        rep = nr;
    }
    Ok((cur, rep))
}

/// Decoration `V = ρ` at a single character.
pub fn simple_deco(g: &Gsp, c: usize) -> Vec<usize> {
    let mut v = vec![0; g.num_chars()];
    v[c] = 1;
    v
}

/// `g_κ = dim ker γ − dim X(κ) + dim V(κ)` per character.
pub fn g_vector(g: &Gsp, r: &DecoratedRep) -> Result<Vec<i64>> {
    (0..g.num_chars())
        .map(|c| {
            let t = triangle_at_char(g, r, c)?;
            Ok(t.gamma.kernel().rows() as i64 - r.dims[c] as i64 + r.deco[c] as i64)
        })
        .collect()
}

/// `h_κ = −dim ker β` per character.
pub fn h_vector(g: &Gsp, r: &DecoratedRep) -> Result<Vec<i64>> {
    (0..g.num_chars()).map(|c| Ok(-(triangle_at_char(g, r, c)?.beta.kernel().rows() as i64))).collect()
}

// ---------------------------------------------------------------------------
// Grassmannians of subrepresentations

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Exact enumeration; only for representations with every character space of dimension ≤ 1.
    Thin,
    /// Point counts over prime fields, interpolated at q = 1; assumes polynomial count.
    Counting,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPolynomial {
    pub poly: IntPoly,
    /// True if some coefficient came from the point-counting regime.
    pub assumes_polynomial_count: bool,
}

pub fn is_thin(r: &DecoratedRep) -> bool {
    r.dims.iter().all(|&d| d <= 1)
}

/// `χ(Gr_e(X))` for every class `e` with a nonzero value.
pub fn grassmannian_table(g: &Gsp, r: &DecoratedRep, regime: Regime, exec: Exec) -> Result<(BTreeMap<Vec<usize>, i64>, bool)> {
    if is_thin(r) {
        return Ok((thin_table(g, r), false));
    }
    match regime {
        Regime::Thin => Err(GspError::UnsupportedRegime(format!("representation of dimension vector {:?} is not thin", r.dims))),
        Regime::Counting => Ok((counting_table(g, r, exec)?, true)),
    }
}

pub fn grassmannian_euler(g: &Gsp, r: &DecoratedRep, e: &[usize], regime: Regime) -> Result<i64> {
    let (t, _) = grassmannian_table(g, r, regime, Exec::Sequential)?;
    Ok(*t.get(e).unwrap_or(&0))
}

fn thin_table(g: &Gsp, r: &DecoratedRep) -> BTreeMap<Vec<usize>, i64> {
    let support: Vec<usize> = (0..r.dims.len()).filter(|&c| r.dims[c] == 1).collect();
    let edges: Vec<(usize, usize)> = g
        .arrows
        .iter()
        .zip(&r.mats)
        .filter(|(a, m)| r.dims[a.src] == 1 && r.dims[a.tgt] == 1 && !m.is_zero())
        .map(|(a, _)| (a.src, a.tgt))
        .collect();
    let mut out = BTreeMap::new();
    for mask in 0u64..(1u64 << support.len()) {
        let mut inside = vec![false; r.dims.len()];
        for (i, &c) in support.iter().enumerate() {
            inside[c] = mask >> i & 1 == 1;
        }
        if edges.iter().all(|&(u, v)| !inside[u] || inside[v]) {
            let e: Vec<usize> = inside.iter().map(|&b| b as usize).collect();
            *out.entry(e).or_insert(0) += 1;
        }
    }
    out
}

fn to_fp(x: &Q, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb).to_u64().unwrap();
    let d = x.denom().mod_floor(&pb).to_u64().unwrap();
    n * inv_mod(d, p) % p
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// All subspaces of `F_p^d` of dimension `e`, as reduced echelon row lists.
fn subspaces(d: usize, e: usize, p: u64) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for pivots in combinations(d, e) {
        let mut free = Vec::new();
        for (r, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..d {
                if !pivots.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let total = (p as u128).pow(free.len() as u32);
        for code in 0..total {
            let mut rows = vec![vec![0u64; d]; e];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = 1;
            }
            let mut x = code;
            for &(r, c) in &free {
                rows[r][c] = (x % p as u128) as u64;
                x /= p as u128;
            }
            out.push(rows);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut vec![], &mut out);
    out
}

fn pivot_of(row: &[u64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

fn in_span(rref: &[Vec<u64>], v: &[u64], p: u64) -> bool {
    let mut v = v.to_vec();
    for row in rref {
        let pc = pivot_of(row).unwrap();
        let f = v[pc];
        if f != 0 {
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x + p - f * y % p) % p;
            }
        }
    }
    v.iter().all(|&x| x == 0)
}

fn vec_mat(v: &[u64], m: &[Vec<u64>], p: u64) -> Vec<u64> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0u64; cols];
    for (x, row) in v.iter().zip(m) {
        if *x == 0 {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            *o = (*o + x * y) % p;
        }
    }
    out
}

/// Number of subrepresentations per class over `F_p`.
fn count_over_fp(g: &Gsp, r: &DecoratedRep, p: u64) -> BTreeMap<Vec<usize>, u64> {
    let n = r.dims.len();
    let mats: Vec<Vec<Vec<u64>>> = r
        .mats
        .iter()
        .map(|m| (0..m.rows()).map(|i| m.row_slice(i).iter().map(|x| to_fp(x, p)).collect()).collect())
        .collect();
    let choices: Vec<Vec<(usize, Vec<Vec<u64>>)>> = (0..n)
        .map(|c| (0..=r.dims[c]).flat_map(|e| subspaces(r.dims[c], e, p).into_iter().map(move |s| (e, s))).collect())
        .collect();
    // arrows checked once both endpoints are assigned
    let mut checks: Vec<Vec<usize>> = vec![vec![]; n];
    for (i, a) in g.arrows.iter().enumerate() {
        if r.dims[a.src] > 0 && r.dims[a.tgt] > 0 {
            checks[a.src.max(a.tgt)].push(i);
        }
    }
    let mut out = BTreeMap::new();
    let mut chosen: Vec<usize> = vec![0; n];
    fn rec(
        c: usize,
        g: &[Arrow],
        choices: &[Vec<(usize, Vec<Vec<u64>>)>],
        checks: &[Vec<usize>],
        mats: &[Vec<Vec<u64>>],
        p: u64,
        chosen: &mut Vec<usize>,
        out: &mut BTreeMap<Vec<usize>, u64>,
    ) {
        if c == choices.len() {
            let e: Vec<usize> = chosen.iter().enumerate().map(|(v, &i)| choices[v][i].0).collect();
            *out.entry(e).or_insert(0) += 1;
            return;
        }
        for i in 0..choices[c].len() {
            chosen[c] = i;
            let ok = checks[c].iter().all(|&a| {
                let arr = &g[a];
                let us = &choices[arr.src][chosen[arr.src]].1;
                let vs = &choices[arr.tgt][chosen[arr.tgt]].1;
                us.iter().all(|x| in_span(vs, &vec_mat(x, &mats[a], p), p))
            });
            if ok {
                rec(c + 1, g, choices, checks, mats, p, chosen, out);
            }
        }
    }
    rec(0, &g.arrows, &choices, &checks, &mats, p, &mut chosen, &mut out);
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn counting_table(g: &Gsp, r: &DecoratedRep, exec: Exec) -> Result<BTreeMap<Vec<usize>, i64>> {
    let mut bad: Vec<BigInt> = Vec::new();
    for m in &r.mats {
        for i in 0..m.rows() {
            for x in m.row_slice(i) {
                if !x.is_zero() {
                    bad.push(x.numer().abs());
                    bad.push(x.denom().clone());
                }
            }
        }
    }
    let dmax: usize = r.dims.iter().map(|&d| (d / 2) * (d - d / 2)).sum();
    let needed = dmax + 2;
    let mut primes = Vec::new();
    let mut cand = 5u64;
    while primes.len() < needed {
        if is_prime(cand) && bad.iter().all(|b| (b % BigInt::from(cand)).is_positive()) {
            primes.push(cand);
        }
        cand += 1;
    }
    let counts: Vec<BTreeMap<Vec<usize>, u64>> = exec.map(primes.clone(), |p| count_over_fp(g, r, p));
    let mut classes: Vec<Vec<usize>> = counts.iter().flat_map(|c| c.keys().cloned()).collect();
    classes.sort();
    classes.dedup();
    let mut out = BTreeMap::new();
    for e in classes {
        let deg: usize = e.iter().zip(&r.dims).map(|(&x, &d)| x * (d - x)).sum();
        let pts: Vec<(Q, Q)> = primes[..=deg]
            .iter()
            .zip(&counts)
            .map(|(&p, c)| (q(p as i64), q(*c.get(&e).unwrap_or(&0) as i64)))
            .collect();
        let at = |x: &Q| -> Q {
            let mut s = Q::zero();
            for (i, (xi, yi)) in pts.iter().enumerate() {
                let mut t = yi.clone();
                for (j, (xj, _)) in pts.iter().enumerate() {
                    if i != j {
                        t = t * (x - xj) / (xi - xj);
                    }
                }
                s += t;
            }
            s
        };
        let pcheck = primes[deg + 1];
        let check_count = q(*counts[deg + 1].get(&e).unwrap_or(&0) as i64);
        if at(&q(pcheck as i64)) != check_count {
            return Err(GspError::UnsupportedRegime(format!("point count for class {:?} is not polynomial of degree ≤ {}", e, deg)));
        }
        let chi = at(&Q::one());
        if !chi.is_integer() {
            return Err(GspError::UnsupportedRegime(format!("non-integral Euler characteristic for class {e:?}")));
        }
        let v = chi.to_integer().to_i64().unwrap();
        if v != 0 {
            out.insert(e, v);
        }
    }
    Ok(out)
}

/// `F_X(Y) = Σ_e χ(Gr_e(X)) Y^e` over the character variables.
pub fn f_polynomial(g: &Gsp, r: &DecoratedRep, regime: Regime, exec: Exec) -> Result<FPolynomial> {
    let (t, flag) = grassmannian_table(g, r, regime, exec)?;
    let n = g.num_chars();
    let poly = IntPoly::from_terms(n, t.into_iter().map(|(e, c)| (e.into_iter().map(|x| x as u32).collect(), BigInt::from(c))));
    Ok(FPolynomial { poly, assumes_polynomial_count: flag })
}

// ---------------------------------------------------------------------------
// Hom spaces and E-invariants

/// Basis of `Hom(X, X')` as lists of per-character matrices; with `only` set, maps vanish off those characters.
pub fn hom_basis(g: &Gsp, x: &DecoratedRep, y: &DecoratedRep, only: Option<&[usize]>) -> Vec<Vec<Matrix>> {
    let n = g.num_chars();
    let allowed = |c: usize| only.is_none_or(|s| s.contains(&c));
    let mut offs = vec![0usize; n + 1];
    for c in 0..n {
        offs[c + 1] = offs[c] + if allowed(c) { x.dims[c] * y.dims[c] } else { 0 };
    }
    let nu = offs[n];
    let mut eqs: Vec<Vec<Q>> = Vec::new();
    for (i, a) in g.arrows.iter().enumerate() {
        let (u, v) = (a.src, a.tgt);
        let (ma, mb) = (&x.mats[i], &y.mats[i]);
        // (M_a f_v − f_u M'_a)[r][s] = 0
        for r in 0..x.dims[u] {
            for s in 0..y.dims[v] {
                let mut row = vec![Q::zero(); nu];
                let mut nonzero = false;
                if allowed(v) {
                    for t in 0..x.dims[v] {
                        let c = ma.get(r, t);
                        if !c.is_zero() {
                            row[offs[v] + t * y.dims[v] + s] += c;
                            nonzero = true;
                        }
                    }
                }
                if allowed(u) {
                    for t in 0..y.dims[u] {
                        let c = mb.get(t, s);
                        if !c.is_zero() {
                            row[offs[u] + r * y.dims[u] + t] -= c;
                            nonzero = true;
                        }
                    }
                }
                if nonzero {
                    eqs.push(row);
                }
            }
        }
    }
    let sys = Matrix::from_rows(eqs, nu);
    let sol = sys.right_kernel();
    (0..sol.rows())
        .map(|k| {
            (0..n)
                .map(|c| {
                    let mut m = Matrix::zeros(x.dims[c], y.dims[c]);
                    if allowed(c) {
                        for r in 0..x.dims[c] {
                            for s in 0..y.dims[c] {
                                m.set(r, s, sol.get(k, offs[c] + r * y.dims[c] + s).clone());
                            }
                        }
                    }
                    m
                })
                .collect()
        })
        .collect()
}

pub fn hom_dim(g: &Gsp, x: &DecoratedRep, y: &DecoratedRep) -> usize {
    hom_basis(g, x, y, None).len()
}

/// Homomorphisms vanishing on `X Ē_k`.
pub fn hom_k_dim(g: &Gsp, x: &DecoratedRep, y: &DecoratedRep, k: usize) -> usize {
    let blk: Vec<usize> = g.block(k).collect();
    hom_basis(g, x, y, Some(&blk)).len()
}

pub fn e_inj(g: &Gsp, x: &DecoratedRep, y: &DecoratedRep) -> Result<i64> {
    let gy = g_vector(g, y)?;
    let pair: i64 = x.dims.iter().zip(&gy).map(|(&d, &v)| d as i64 * v).sum();
    Ok(hom_dim(g, x, y) as i64 + pair)
}

pub fn e_sym(g: &Gsp, x: &DecoratedRep, y: &DecoratedRep) -> Result<i64> {
    Ok(e_inj(g, x, y)? + e_inj(g, y, x)?)
}

pub fn e_inv(g: &Gsp, x: &DecoratedRep) -> Result<i64> {
    e_inj(g, x, x)
}

/// `([⊕ ker β] | [⊕ ker γ / im β]) + ([X] | [V])`.
pub fn e_lower_bound(g: &Gsp, r: &DecoratedRep) -> Result<i64> {
    let mut s = 0i64;
    for c in 0..g.num_chars() {
        let t = triangle_at_char(g, r, c)?;
        let kb = t.beta.kernel().rows() as i64;
        let quot = t.gamma.kernel().rows() as i64 - t.beta.rank() as i64;
        s += kb * quot + r.dims[c] as i64 * r.deco[c] as i64;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyReport {
    /// `[X_κ] = 0` or `[V_κ] = 0` everywhere.
    pub support: bool,
    /// `ker β_κ = 0` or `ker γ_κ = im β_κ` everywhere (the form implied by the lower bound).
    pub kernel_form: bool,
    /// `ker γ_κ = 0` or `ker γ_κ = im β_κ` everywhere, read literally.
    pub literal_form: bool,
    pub literal_witness: Option<String>,
}

pub fn eics_dichotomies(g: &Gsp, r: &DecoratedRep) -> Result<DichotomyReport> {
    let mut rep = DichotomyReport { support: true, kernel_form: true, literal_form: true, literal_witness: None };
    let frame = g.frame();
    for c in 0..g.num_chars() {
        let t = triangle_at_char(g, r, c)?;
        if r.dims[c] != 0 && r.deco[c] != 0 {
            rep.support = false;
        }
        let kg = t.gamma.kernel().rows();
        let ib = t.beta.rank();
        let kb = t.beta.kernel().rows();
        if kb != 0 && kg != ib {
            rep.kernel_form = false;
        }
        if kg != 0 && kg != ib && rep.literal_form {
            rep.literal_form = false;
            rep.literal_witness = Some(format!("{}: dim ker γ = {kg}, dim im β = {ib}", frame.char_name(c)));
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Duality, isomorphism, cluster character

/// The opposite GSP: arrows reversed between inverted characters, potential words reversed.
pub fn opposite_gsp(g: &Gsp) -> Gsp {
    let inv = g.frame().char_inversion();
    let arrows = g.arrows.iter().map(|a| Arrow { id: a.id.clone(), src: inv[a.tgt], tgt: inv[a.src] }).collect();
    let mut s = Potential::zero();
    for (w, c) in &g.potential.terms {
        let rev: Vec<u32> = w.iter().rev().copied().collect();
        s.add_cycle(&rev, c.clone());
    }
    Gsp { labels: g.labels.clone(), groups: g.groups.clone(), arrows, potential: s, trunc: g.trunc }
}

/// Contragredient representation over the opposite GSP.
pub fn dual_rep(g: &Gsp, r: &DecoratedRep) -> DecoratedRep {
    let inv = g.frame().char_inversion();
    let n = g.num_chars();
    let mut dims = vec![0; n];
    let mut deco = vec![0; n];
    for c in 0..n {
        dims[inv[c]] = r.dims[c];
        deco[inv[c]] = r.deco[c];
    }
    DecoratedRep { dims, mats: r.mats.iter().map(|m| m.transpose()).collect(), deco }
}

/// Equal dimension data and an invertible homomorphism, searched among seeded random
/// combinations of a Hom basis, then exhaustively for small Hom spaces.
pub fn is_isomorphic(g: &Gsp, x: &DecoratedRep, y: &DecoratedRep, seed: u64) -> bool {
    if x.dims != y.dims || x.deco != y.deco {
        return false;
    }
    let basis = hom_basis(g, x, y, None);
    let invertible = |coeffs: &[i64]| -> bool {
        (0..g.num_chars()).all(|c| {
            let mut m = Matrix::zeros(x.dims[c], y.dims[c]);
            for (b, &k) in basis.iter().zip(coeffs) {
                if k != 0 {
                    m.add_assign_scaled(&b[c], &q(k));
                }
            }
            x.dims[c] == 0 || m.inverse().is_some()
        })
    };
    if basis.is_empty() {
        return x.total_dim() == 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let coeffs: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-50..=50)).collect();
        if invertible(&coeffs) {
            return true;
        }
    }
    if basis.len() <= 4 {
        let mut coeffs = vec![-2i64; basis.len()];
        loop {
            if invertible(&coeffs) {
                return true;
            }
            let mut i = 0;
            while i < coeffs.len() && coeffs[i] == 2 {
                coeffs[i] = -2;
                i += 1;
            }
            if i == coeffs.len() {
                break;
            }
            coeffs[i] += 1;
        }
    }
    false
}

/// Laurent polynomial as exponent vector → coefficient.
pub type Laurent = BTreeMap<Vec<i64>, i64>;

/// `∏ x_i^{-d_i} Σ_e χ(Gr_e(X)) ∏ x_i^{−rg γ_i + Σ_j (max(0,b_ij) e_j + max(0,−b_ij)(d_j − e_j))}`.
pub fn cluster_character(g: &Gsp, r: &DecoratedRep, b: &ExchangeMatrix, regime: Regime, exec: Exec) -> Result<Laurent> {
    let (t, _) = grassmannian_table(g, r, regime, exec)?;
    let n = g.groups.len();
    let d = r.reduced_dims(g);
    let mut rg = vec![0i64; n];
    let cv = g.char_vertex();
    for c in 0..g.num_chars() {
        rg[cv[c]] += triangle_at_char(g, r, c)?.gamma.rank() as i64;
    }
    let mut out = Laurent::new();
    for (e, chi) in t {
        let ev = reduce_classes(g, &e.iter().map(|&x| x as i64).collect::<Vec<_>>());
        let exp: Vec<i64> = (0..n)
            .map(|i| {
                let s: i64 = (0..n).map(|j| b.get(i, j).max(0) * ev[j] + (-b.get(i, j)).max(0) * (d[j] - ev[j])).sum();
                -d[i] - rg[i] + s
            })
            .collect();
        *out.entry(exp).or_insert(0) += chi;
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::{c3_species, FiniteAbelianGroup};

    fn quiver(nv: usize, arrows: &[(usize, usize, &str)]) -> Gsp {
        Gsp {
            labels: (1..=nv).map(|i| i.to_string()).collect(),
            groups: vec![FiniteAbelianGroup::trivial(); nv],
            arrows: arrows.iter().map(|&(s, t, id)| Arrow { id: id.into(), src: s, tgt: t }).collect(),
            potential: Potential::zero(),
            trunc: 6,
        }
    }

    fn c3() -> Gsp {
        Gsp::from_species(&c3_species(), 8)
    }

    #[test]
    fn negative_simple_becomes_positive_simple() {
        let g = quiver(2, &[(0, 1, "a")]);
        let neg = DecoratedRep::negative(&g, vec![0, 1]);
        let (g1, r1) = mutate_rep(&g, &neg, 1).unwrap();
        assert_eq!(r1.dims, vec![0, 1]);
        assert_eq!(r1.deco, vec![0, 0]);
        let (_, r2) = mutate_rep(&g1, &r1, 1).unwrap();
        assert_eq!(r2, neg);
    }

    #[test]
    fn c3_golden_representation() {
        let g = c3();
        let rho = g.block(2).start;
        let (end, x) = mutate_gspdr_sequence(&g, &simple_deco(&g, rho), &[1, 0, 2]).unwrap();
        assert_eq!(x.dims, vec![1, 1, 1, 0]);
        assert!(x.deco.iter().all(|&v| v == 0));
        let f = f_polynomial(&end, &x, Regime::Thin, Exec::Sequential).unwrap();
        let spec = crate::seed::specialize_poly(&f.poly, &end.char_vertex(), 3);
        let z = |e: &[u32]| (e.to_vec(), BigInt::one());
        assert_eq!(spec, IntPoly::from_terms(3, [z(&[0, 0, 0]), z(&[0, 0, 1]), z(&[0, 1, 1]), z(&[1, 1, 1])]));
        assert_eq!(reduce_classes(&end, &g_vector(&end, &x).unwrap()), vec![0, 0, -1]);
        assert!(!f.assumes_polynomial_count);
    }

    #[test]
    fn thin_regime_refuses_thick_input() {
        let g = quiver(2, &[(0, 1, "a")]);
        let r = DecoratedRep { dims: vec![2, 0], mats: vec![Matrix::zeros(2, 0)], deco: vec![0, 0] };
        assert!(matches!(grassmannian_euler(&g, &r, &[1, 0], Regime::Thin), Err(GspError::UnsupportedRegime(_))));
        // Gr(1, 2) = P^1 has Euler characteristic 2
        assert_eq!(grassmannian_euler(&g, &r, &[1, 0], Regime::Counting).unwrap(), 2);
        assert_eq!(grassmannian_euler(&g, &r, &[0, 0], Regime::Counting).unwrap(), 1);
    }

    #[test]
    fn hom_of_simples() {
        let g = quiver(2, &[(0, 1, "a")]);
        let s1 = DecoratedRep { dims: vec![1, 0], mats: vec![Matrix::zeros(1, 0)], deco: vec![0, 0] };
        let s2 = DecoratedRep { dims: vec![0, 1], mats: vec![Matrix::zeros(0, 1)], deco: vec![0, 0] };
        assert_eq!(hom_dim(&g, &s1, &s1), 1);
        assert_eq!(hom_dim(&g, &s1, &s2), 0);
        let p = DecoratedRep { dims: vec![1, 1], mats: vec![Matrix::from_i64(&[vec![1]])], deco: vec![0, 0] };
        assert_eq!(hom_dim(&g, &s2, &p), 1);
        assert_eq!(hom_dim(&g, &p, &s2), 0);
        assert_eq!(hom_dim(&g, &p, &s1), 1);
        assert!(is_isomorphic(&g, &p, &p, 1));
        assert!(!is_isomorphic(&g, &p, &s1.direct_sum(&s2), 1));
    }

    #[test]
    fn relations_are_checked() {
        let mut g = quiver(3, &[(0, 1, "a"), (1, 2, "b"), (2, 0, "c")]);
        g.potential.add_cycle(&[0, 1, 2], q(1));
        let one = Matrix::from_i64(&[vec![1]]);
        let bad = DecoratedRep { dims: vec![1, 1, 1], mats: vec![one.clone(), one.clone(), Matrix::zeros(1, 1)], deco: vec![0; 3] };
        assert!(check_relations(&g, &bad).is_err());
        let good = DecoratedRep { dims: vec![1, 1, 0], mats: vec![one, Matrix::zeros(1, 0), Matrix::zeros(0, 1)], deco: vec![0; 3] };
        check_relations(&g, &good).unwrap();
        let t = triangle_maps(&g, &good, 1).unwrap();
        assert_eq!(t[0].alpha.rank(), 1);
    }

    #[test]
    fn dual_of_dual_restores_dimensions() {
        let g = c3();
        let rho = g.block(2).start;
        let (end, x) = mutate_gspdr_sequence(&g, &simple_deco(&g, rho), &[1, 0, 2]).unwrap();
        let op = opposite_gsp(&end);
        let xd = dual_rep(&end, &x);
        check_relations(&op, &xd).unwrap();
        assert_eq!(e_inv(&end, &x).unwrap(), e_inv(&op, &xd).unwrap());
        assert_eq!(dual_rep(&op, &xd), x);
    }
}
