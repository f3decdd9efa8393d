//! Group-basis cyclic derivative: the double sum over group elements evaluated literally
//! over Q(ζ₁₂), with arrows written in a non-character basis of each bimodule.

use crate::gsp::{cyclic_derivative, Gsp, Path, Potential};
use crate::linalg::{q, Matrix, Q};
use crate::species::FiniteAbelianGroup;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Element of Q(ζ) with ζ a primitive 12th root of unity, stored in the basis 1, ζ, ζ², ζ³
/// (ζ⁴ = ζ² − 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyc12(pub [Q; 4]);

impl Cyc12 {
    pub fn zero() -> Self {
        Cyc12([Q::zero(), Q::zero(), Q::zero(), Q::zero()])
    }

    pub fn from_q(x: Q) -> Self {
        let mut c = Self::zero();
        c.0[0] = x;
        c
    }

    pub fn zeta_pow(e: i64) -> Self {
        let mut out = Self::from_q(Q::one());
        let mut z = Self::zero();
        z.0[1] = Q::one();
        for _ in 0..e.rem_euclid(12) {
            out = out.mul(&z);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Cyc12([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2], &self.0[3] + &o.0[3]])
    }

    pub fn scale(&self, s: &Q) -> Self {
        Cyc12([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s, &self.0[3] * s])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![Q::zero(); 7];
        for i in 0..4 {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                c[i + j] += &self.0[i] * &o.0[j];
            }
        }
        // ζ⁶ = −1, ζ⁵ = ζ³ − ζ, ζ⁴ = ζ² − 1
        let c6 = c[6].clone();
        c[0] -= &c6;
        let c5 = c[5].clone();
        c[3] += &c5;
        c[1] -= &c5;
        let c4 = c[4].clone();
        c[2] += &c4;
        c[0] -= &c4;
        Cyc12([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
    }

    pub fn as_rational(&self) -> Option<Q> {
        self.0[1..].iter().all(|x| x.is_zero()).then(|| self.0[0].clone())
    }
}

fn group_elements(g: &FiniteAbelianGroup) -> Vec<Vec<u32>> {
    g.characters()
}

/// `χ(γ)` for characters and elements written as residue tuples; every factor divides 12.
fn char_value(g: &FiniteAbelianGroup, chi: &[u32], elem: &[u32], inverse: bool) -> Cyc12 {
    let mut e = 0i64;
    for ((&d, &c), &x) in g.factors.iter().zip(chi).zip(elem) {
        assert!(12 % d == 0, "group factor {d} does not divide 12");
        e += (12 / d as i64) * c as i64 * x as i64;
    }
    Cyc12::zeta_pow(if inverse { -e } else { e })
}

/// A bimodule block `A_ij` with a basis `u_m = Σ_c M[m][c] a_c` of character arrows `a_c`.
#[derive(Clone, Debug)]
pub struct Block {
    pub from: usize,
    pub to: usize,
    pub arrows: Vec<u32>,
    pub change: Matrix,
    pub inverse: Matrix,
}

#[derive(Clone, Debug)]
pub struct GroupBasisModel {
    pub gsp: Gsp,
    pub blocks: Vec<Block>,
}

/// Group-basis element `u_m` of block `block`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GElem {
    pub block: usize,
    pub m: usize,
}

impl GroupBasisModel {
    pub fn new(gsp: Gsp, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nv = gsp.groups.len();
        let cv = gsp.char_vertex();
        let mut blocks = Vec::new();
        for i in 0..nv {
            for j in 0..nv {
                let arrows: Vec<u32> = (0..gsp.arrows.len() as u32)
                    .filter(|&a| cv[gsp.arrows[a as usize].src] == i && cv[gsp.arrows[a as usize].tgt] == j)
                    .collect();
                if arrows.is_empty() {
                    continue;
                }
                let n = arrows.len();
                let (change, inverse) = loop {
                    let rows: Vec<Vec<Q>> = (0..n).map(|_| (0..n).map(|_| q(rng.gen_range(-2..=2))).collect()).collect();
                    let m = Matrix::from_rows(rows, n);
                    if let Some(inv) = m.inverse() {
                        break (m, inv);
                    }
                };
                blocks.push(Block { from: i, to: j, arrows, change, inverse });
            }
        }
        GroupBasisModel { gsp, blocks }
    }

    fn local_char(&self, c: usize) -> Vec<u32> {
        let cv = self.gsp.char_vertex();
        let v = cv[c];
        let off = self.gsp.frame().offsets()[v];
        self.gsp.groups[v].characters()[c - off].clone()
    }

    /// Character-basis expansion of a word, composable paths only (tensor products over E).
    fn expand(&self, word: &[GElem]) -> Vec<(Path, Q)> {
        let mut acc: Vec<(Path, Q)> = vec![(vec![], Q::one())];
        for w in word {
            let b = &self.blocks[w.block];
            let mut next = Vec::new();
            for (p, c) in &acc {
                for (col, &a) in b.arrows.iter().enumerate() {
                    let coef = b.change.get(w.m, col);
                    if coef.is_zero() {
                        continue;
                    }
                    if let Some(&last) = p.last() {
                        if self.gsp.arrows[last as usize].tgt != self.gsp.arrows[a as usize].src {
                            continue;
                        }
                    }
                    let mut p2 = p.clone();
                    p2.push(a);
                    next.push((p2, c * coef));
                }
            }
            acc = next;
        }
        acc
    }

    /// The potential in character arrows: closed paths only, since open ones are commutators.
    pub fn potential(&self, terms: &[(Q, Vec<GElem>)]) -> Potential {
        let mut s = Potential::zero();
        for (c, w) in terms {
            for (p, k) in self.expand(w) {
                if self.gsp.arrows[p[p.len() - 1] as usize].tgt == self.gsp.arrows[p[0] as usize].src {
                    s.add_cycle(&p, c * k);
                }
            }
        }
        s
    }

    /// `∂_ξ(a_1 … a_ℓ) = Σ_j Σ_{g,h ∈ ∪Γ_i} ξ(g⁻¹ a_j h) h⁻¹ a_{j+1} … a_{j−1} g` with `ξ = u_m^*`.
    pub fn derivative(&self, terms: &[(Q, Vec<GElem>)], xi: GElem) -> BTreeMap<Path, Cyc12> {
        let mut out: BTreeMap<Path, Cyc12> = BTreeMap::new();
        let xb = &self.blocks[xi.block];
        for (coef, word) in terms {
            let l = word.len();
            for j in 0..l {
                let wj = word[j];
                if wj.block != xi.block {
                    continue;
                }
                let rest: Vec<GElem> = (1..l).map(|t| word[(j + t) % l]).collect();
                let rest_exp = self.expand(&rest);
                let gi = &self.gsp.groups[xb.from];
                let gj = &self.gsp.groups[xb.to];
                for g in group_elements(gi) {
                    for h in group_elements(gj) {
                        // ξ(g⁻¹ u h) = Σ_c M[m][c] ρ_c(g)⁻¹ σ_c(h) ξ(a_c)
                        let mut val = Cyc12::zero();
                        for (col, &a) in xb.arrows.iter().enumerate() {
                            let m = xb.change.get(wj.m, col);
                            let d = xb.inverse.get(col, xi.m);
                            if m.is_zero() || d.is_zero() {
                                continue;
                            }
                            let arr = &self.gsp.arrows[a as usize];
                            let rho = self.local_char(arr.src);
                            let sigma = self.local_char(arr.tgt);
                            let f = char_value(gi, &rho, &g, true).mul(&char_value(gj, &sigma, &h, false));
                            val = val.add(&f.scale(&(m * d)));
                        }
                        if val.is_zero() {
                            continue;
                        }
                        for (p, k) in &rest_exp {
                            let first = &self.gsp.arrows[p[0] as usize];
                            let last = &self.gsp.arrows[p[p.len() - 1] as usize];
                            let cv = self.gsp.char_vertex();
                            if cv[first.src] != xb.to || cv[last.tgt] != xb.from {
                                continue;
                            }
                            let left = char_value(gj, &self.local_char(first.src), &h, true);
                            let right = char_value(gi, &self.local_char(last.tgt), &g, false);
                            let t = val.mul(&left).mul(&right).scale(&(coef * k));
                            let e = out.entry(p.clone()).or_insert_with(Cyc12::zero);
                            *e = e.add(&t);
                        }
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Character-basis counterpart: `#Γ_i #Γ_j Σ_c ξ(a_c) ∂_{a_c} S`.
    pub fn character_side(&self, terms: &[(Q, Vec<GElem>)], xi: GElem) -> BTreeMap<Path, Q> {
        let s = self.potential(terms);
        let xb = &self.blocks[xi.block];
        let scale = q((self.gsp.groups[xb.from].order() * self.gsp.groups[xb.to].order()) as i64);
        let mut out: BTreeMap<Path, Q> = BTreeMap::new();
        for (col, &a) in xb.arrows.iter().enumerate() {
            let d = xb.inverse.get(col, xi.m);
            if d.is_zero() {
                continue;
            }
            for (p, c) in cyclic_derivative(&s, a) {
                *out.entry(p).or_insert_with(Q::zero) += c * d * &scale;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Words following every block-level cycle of length `2..=max_len`, one element per step.
    pub fn cycle_words(&self, max_len: usize) -> Vec<Vec<GElem>> {
        let mut out = Vec::new();
        fn rec(model: &GroupBasisModel, start: usize, cur: &mut Vec<GElem>, max_len: usize, out: &mut Vec<Vec<GElem>>) {
            let at = cur.last().map_or(start, |w| model.blocks[w.block].to);
            if cur.len() >= 2 && at == start {
                out.push(cur.clone());
            }
            if cur.len() == max_len {
                return;
            }
            for (bi, b) in model.blocks.iter().enumerate() {
                if b.from != at {
                    continue;
                }
                for m in 0..b.arrows.len() {
                    cur.push(GElem { block: bi, m });
                    rec(model, start, cur, max_len, out);
                    cur.pop();
                }
            }
        }
        for v in 0..self.gsp.groups.len() {
            rec(self, v, &mut vec![], max_len, &mut out);
        }
        out
    }
}

/// Compares both sides for every single-word potential on the cycle words and every `ξ`.
/// Returns the number of comparisons and the first mismatch.
pub fn compare_derivatives(model: &GroupBasisModel, max_len: usize) -> (usize, Option<String>) {
    let mut count = 0;
    for w in model.cycle_words(max_len) {
        let terms = vec![(Q::one(), w.clone())];
        for (bi, b) in model.blocks.iter().enumerate() {
            for m in 0..b.arrows.len() {
                let xi = GElem { block: bi, m };
                let lhs = model.derivative(&terms, xi);
                let rhs = model.character_side(&terms, xi);
                count += 1;
                let lhs_q: Option<BTreeMap<Path, Q>> = lhs.iter().map(|(p, v)| v.as_rational().map(|x| (p.clone(), x))).collect();
                if lhs_q.as_ref() != Some(&rhs) {
                    return (count, Some(format!("word {:?}, ξ = u_{} of block {}: group side {:?}, character side {:?}", w, m, bi, lhs, rhs)));
                }
            }
        }
    }
    (count, None)
}
