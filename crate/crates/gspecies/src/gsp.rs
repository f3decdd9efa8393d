//! Group species with potential in the character basis: an ordinary quiver on
//! character vertices, truncated path-algebra elements, potentials, cyclic
//! derivatives and E-morphisms.

use crate::error::{GspError, Result};
use crate::linalg::{q, Matrix, Q};
use crate::species::{FiniteAbelianGroup, GroupSpecies};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub type Path = Vec<u32>;

/// Truncated element of the completed path algebra: path → coefficient.
pub type Elem = BTreeMap<Path, Q>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

pub fn add_to(e: &mut Elem, p: Path, c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = e.entry(p.clone()).or_insert_with(Q::zero);
    *entry += c;
    if entry.is_zero() {
        e.remove(&p);
    }
}

pub fn elem_add(a: &Elem, b: &Elem, scale: &Q) -> Elem {
    let mut out = a.clone();
    for (p, c) in b {
        add_to(&mut out, p.clone(), c * scale);
    }
    out
}

/// Product of two elements keeping paths of length ≤ `n`; composability is the caller's business.
pub fn elem_mul(a: &Elem, b: &Elem, n: usize) -> Elem {
    let mut out = Elem::new();
    for (p, c) in a {
        for (r, d) in b {
            if p.len() + r.len() > n {
                continue;
            }
            let mut w = p.clone();
            w.extend_from_slice(r);
            add_to(&mut out, w, c * d);
        }
    }
    out
}

pub fn single(p: Path) -> Elem {
    let mut e = Elem::new();
    e.insert(p, Q::one());
    e
}

/// Lexicographically minimal rotation.
pub fn canonical_rotation(w: &[u32]) -> Path {
    let n = w.len();
    (0..n)
        .map(|s| w[s..].iter().chain(&w[..s]).copied().collect::<Path>())
        .min()
        .unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Potential {
    pub terms: BTreeMap<Path, Q>,
}

impl Potential {
    pub fn zero() -> Self {
        Potential { terms: BTreeMap::new() }
    }

    pub fn add_cycle(&mut self, w: &[u32], c: Q) {
        add_to(&mut self.terms, canonical_rotation(w), c);
    }

    pub fn from_elem(e: &Elem) -> Self {
        let mut p = Potential::zero();
        for (w, c) in e {
            p.add_cycle(w, c.clone());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_part(&self, d: usize) -> Potential {
        Potential { terms: self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn truncate(&self, n: usize) -> Potential {
        Potential { terms: self.terms.iter().filter(|(w, _)| w.len() <= n).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).min()
    }
}

/// `∂_{a^*} S`: every occurrence of `a` rotated to the front, then removed.
pub fn cyclic_derivative(s: &Potential, a: u32) -> Elem {
    let mut out = Elem::new();
    for (w, c) in &s.terms {
        let n = w.len();
        for p in 0..n {
            if w[p] == a {
                let rest: Path = w[p + 1..].iter().chain(&w[..p]).copied().collect();
                add_to(&mut out, rest, c.clone());
            }
        }
    }
    out
}

/// Derivative with respect to the dual of the 2-path `a b`: occurrences of `a` immediately
/// followed (cyclically) by `b`; the remainder after `b`.
pub fn path2_derivative(s: &Potential, a: u32, b: u32) -> Elem {
    let mut out = Elem::new();
    for (w, c) in &s.terms {
        let n = w.len();
        if n < 2 {
            continue;
        }
        for p in 0..n {
            if w[p] == a && w[(p + 1) % n] == b {
                let rest: Path = (2..n).map(|t| w[(p + t) % n]).collect();
                add_to(&mut out, rest, c.clone());
            }
        }
    }
    out
}

/// Per-arrow images: an endomorphism of the truncated path algebra fixing E.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EMorphism {
    pub images: Vec<Elem>,
}

impl EMorphism {
    pub fn identity(narrows: usize) -> Self {
        EMorphism { images: (0..narrows as u32).map(|a| single(vec![a])).collect() }
    }

    pub fn apply_path(&self, w: &[u32], n: usize) -> Elem {
        let mut acc = single(vec![]);
        for &a in w {
            acc = elem_mul(&acc, &self.images[a as usize], n);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    pub fn apply_elem(&self, e: &Elem, n: usize) -> Elem {
        let mut out = Elem::new();
        for (w, c) in e {
            for (p, d) in self.apply_path(w, n) {
                add_to(&mut out, p, c * d);
            }
        }
        out
    }

    pub fn apply_potential(&self, s: &Potential, n: usize) -> Potential {
        let mut out = Potential::zero();
        for (w, c) in &s.terms {
            for (p, d) in self.apply_path(w, n) {
                out.add_cycle(&p, c * d);
            }
        }
        out
    }

    /// `(self ∘ other)(a) = self(other(a))`.
    pub fn compose(&self, other: &EMorphism, n: usize) -> EMorphism {
        EMorphism { images: other.images.iter().map(|e| self.apply_elem(e, n)).collect() }
    }

    /// Matrix of the linear part on the arrow span.
    pub fn linear_part(&self) -> Matrix {
        let n = self.images.len();
        let mut m = Matrix::zeros(n, n);
        for (a, e) in self.images.iter().enumerate() {
            for (w, c) in e {
                if w.len() == 1 {
                    m.set(a, w[0] as usize, c.clone());
                }
            }
        }
        m
    }

    /// Endpoint consistency of every image with the arrow it replaces.
    pub fn check(&self, src: &[Arrow], tgt: &[Arrow]) -> Result<()> {
        for (a, e) in self.images.iter().enumerate() {
            for w in e.keys() {
                if w.is_empty() || !is_composable(tgt, w) || tgt[w[0] as usize].src != src[a].src || tgt[*w.last().unwrap() as usize].tgt != src[a].tgt {
                    return Err(GspError::Invalid(format!("E-morphism image of {} has wrong endpoints", src[a].id)));
                }
            }
        }
        Ok(())
    }
}

pub fn is_composable(arrows: &[Arrow], w: &[u32]) -> bool {
    w.windows(2).all(|p| arrows[p[0] as usize].tgt == arrows[p[1] as usize].src)
}

/// A group species with potential, stored as the character-level quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gsp {
    pub labels: Vec<String>,
    pub groups: Vec<FiniteAbelianGroup>,
    pub arrows: Vec<Arrow>,
    pub potential: Potential,
    pub trunc: usize,
}

impl Gsp {
    /// Arrows of a species in the order `(i, j, ρ, σ, copy)` with ids `i:ρ→j:σ#n`.
    pub fn from_species(sp: &GroupSpecies, trunc: usize) -> Self {
        let off = sp.offsets();
        let mut arrows = Vec::new();
        for i in 0..sp.size() {
            for j in 0..sp.size() {
                for (r, row) in sp.mult[i][j].iter().enumerate() {
                    for (s, &m) in row.iter().enumerate() {
                        for c in 0..m {
                            arrows.push(Arrow {
                                id: format!("{}→{}#{}", sp.char_name(off[i] + r), sp.char_name(off[j] + s), c),
                                src: off[i] + r,
                                tgt: off[j] + s,
                            });
                        }
                    }
                }
            }
        }
        Gsp { labels: sp.labels.clone(), groups: sp.groups.clone(), arrows, potential: Potential::zero(), trunc }
    }

    pub fn frame(&self) -> GroupSpecies {
        GroupSpecies::empty(self.labels.clone(), self.groups.clone())
    }

    pub fn species(&self) -> GroupSpecies {
        let mut sp = self.frame();
        let off = sp.offsets();
        let cv = sp.char_vertex();
        for a in &self.arrows {
            let (i, j) = (cv[a.src], cv[a.tgt]);
            sp.mult[i][j][a.src - off[i]][a.tgt - off[j]] += 1;
        }
        sp
    }

    pub fn num_chars(&self) -> usize {
        self.groups.iter().map(|g| g.order()).sum()
    }

    pub fn char_vertex(&self) -> Vec<usize> {
        self.frame().char_vertex()
    }

    pub fn block(&self, k: usize) -> std::ops::Range<usize> {
        let off = self.frame().offsets();
        off[k]..off[k + 1]
    }

    pub fn arrow_index(&self, id: &str) -> Option<u32> {
        self.arrows.iter().position(|a| a.id == id).map(|p| p as u32)
    }

    pub fn validate(&self) -> Result<()> {
        let nc = self.num_chars();
        let mut ids = BTreeSet::new();
        for a in &self.arrows {
            if a.src >= nc || a.tgt >= nc {
                return Err(GspError::Invalid(format!("arrow {} endpoint out of range", a.id)));
            }
            if !ids.insert(a.id.clone()) {
                return Err(GspError::Invalid(format!("duplicate arrow id {}", a.id)));
            }
        }
        let cv = self.char_vertex();
        if self.arrows.iter().any(|a| cv[a.src] == cv[a.tgt]) {
            return Err(GspError::NotAGsp("species has a loop".into()));
        }
        for w in self.potential.terms.keys() {
            if w.len() < 2 {
                return Err(GspError::NotAGsp("potential has a term of degree < 2".into()));
            }
            if w.iter().any(|&a| a as usize >= self.arrows.len()) {
                return Err(GspError::Invalid("potential refers to an unknown arrow".into()));
            }
            let closed = self.arrows[*w.last().unwrap() as usize].tgt == self.arrows[w[0] as usize].src;
            if !is_composable(&self.arrows, w) || !closed {
                return Err(GspError::NotAGsp("potential term is not a cycle".into()));
            }
        }
        Ok(())
    }

    pub fn path_src(&self, w: &[u32]) -> usize {
        self.arrows[w[0] as usize].src
    }

    pub fn path_tgt(&self, w: &[u32]) -> usize {
        self.arrows[*w.last().unwrap() as usize].tgt
    }

    /// Character-level 2-path from block k back to block k, as a pair of arrow ids.
    pub fn two_cycle_witness(&self, k: usize) -> Option<Vec<String>> {
        let blk = self.block(k);
        for a in &self.arrows {
            if !blk.contains(&a.src) {
                continue;
            }
            if let Some(b) = self.arrows.iter().find(|b| b.src == a.tgt && blk.contains(&b.tgt)) {
                return Some(vec![a.id.clone(), b.id.clone()]);
            }
        }
        None
    }

    pub fn is_2_acyclic_at(&self, k: usize) -> bool {
        self.two_cycle_witness(k).is_none()
    }

    pub fn is_2_acyclic(&self) -> bool {
        (0..self.groups.len()).all(|k| self.is_2_acyclic_at(k))
    }

    pub fn render_path(&self, w: &[u32]) -> String {
        w.iter().map(|&a| self.arrows[a as usize].id.as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// Matrix of `α_{S,ij}` on `A_ij^* × A_ji^*`: rows are arrows from block i to block j,
/// columns arrows from j to i; entries `#Γ_i #Γ_j` times the coefficient of the cycle `ab`.
pub fn alpha_form(g: &Gsp, i: usize, j: usize) -> Matrix {
    let (bi, bj) = (g.block(i), g.block(j));
    let rows: Vec<u32> = (0..g.arrows.len() as u32).filter(|&a| bi.contains(&g.arrows[a as usize].src) && bj.contains(&g.arrows[a as usize].tgt)).collect();
    let cols: Vec<u32> = (0..g.arrows.len() as u32).filter(|&a| bj.contains(&g.arrows[a as usize].src) && bi.contains(&g.arrows[a as usize].tgt)).collect();
    let scale = q((g.groups[i].order() * g.groups[j].order()) as i64);
    let mut m = Matrix::zeros(rows.len(), cols.len());
    for (r, &a) in rows.iter().enumerate() {
        for (c, &b) in cols.iter().enumerate() {
            let key = canonical_rotation(&[a, b]);
            if let Some(v) = g.potential.terms.get(&key) {
                m.set(r, c, v * &scale);
            }
        }
    }
    m
}

pub fn max_rank_check(g: &Gsp, i: usize, j: usize) -> bool {
    let m = alpha_form(g, i, j);
    m.rank() == m.rows().min(m.cols())
}

/// All composable paths of length 1..=n, grouped by length.
pub fn enumerate_paths(arrows: &[Arrow], n: usize) -> Vec<Path> {
    let mut out: Vec<Path> = Vec::new();
    let mut layer: Vec<Path> = (0..arrows.len() as u32).map(|a| vec![a]).collect();
    for _ in 0..n {
        if layer.is_empty() {
            break;
        }
        out.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for w in &layer {
            let t = arrows[*w.last().unwrap() as usize].tgt;
            for (b, arr) in arrows.iter().enumerate() {
                if arr.src == t {
                    let mut w2 = w.clone();
                    w2.push(b as u32);
                    next.push(w2);
                }
            }
        }
        layer = next;
    }
    out
}

/// Sparse row reduction over Q returning the rank; rows are sparse vectors.
pub fn sparse_rank(rows: Vec<BTreeMap<usize, Q>>) -> (usize, BTreeSet<usize>) {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Q>> = BTreeMap::new();
    for mut r in rows {
        loop {
            let Some((&lead, _)) = r.iter().next() else { break };
            match pivots.get(&lead) {
                Some(p) => {
                    let f = r[&lead].clone() / &p[&lead];
                    for (c, v) in p {
                        let e = r.entry(*c).or_insert_with(Q::zero);
                        *e -= &f * v;
                        if e.is_zero() {
                            r.remove(c);
                        }
                    }
                }
                None => {
                    pivots.insert(lead, r);
                    break;
                }
            }
        }
    }
    let set: BTreeSet<usize> = pivots.keys().copied().collect();
    (set.len(), set)
}

/// Basis of `E⟨A⟩_{≤n} / (J(S) + m^{n+1})`: idempotents (rendered as `e:<char>`) and
/// the paths left free by echelon reduction, longer paths eliminated first.
pub fn jacobian_basis(g: &Gsp, n: usize) -> Vec<String> {
    let mut paths = enumerate_paths(&g.arrows, n);
    paths.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let index: BTreeMap<&Path, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let derivs: Vec<Elem> = (0..g.arrows.len() as u32).map(|a| cyclic_derivative(&g.potential, a)).filter(|e| !e.is_empty()).collect();
    let mut rows = Vec::new();
    for r in &derivs {
        // all terms of r share endpoints
        let some = r.keys().next().unwrap();
        let (rs, rt) = if some.is_empty() { continue } else { (g.path_src(some), g.path_tgt(some)) };
        let mut lefts: Vec<Path> = vec![vec![]];
        lefts.extend(paths.iter().filter(|p| g.path_tgt(p) == rs).cloned());
        let mut rights: Vec<Path> = vec![vec![]];
        rights.extend(paths.iter().filter(|p| g.path_src(p) == rt).cloned());
        let minlen = r.keys().map(|w| w.len()).min().unwrap();
        for p in &lefts {
            for s in &rights {
                if p.len() + s.len() + minlen > n {
                    continue;
                }
                let mut row = BTreeMap::new();
                for (w, c) in r {
                    let len = p.len() + w.len() + s.len();
                    if len > n {
                        continue;
                    }
                    let full: Path = p.iter().chain(w).chain(s).copied().collect();
                    row.insert(index[&full], c.clone());
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let (_, piv) = sparse_rank(rows);
    let frame = g.frame();
    let mut out: Vec<String> = (0..g.num_chars()).map(|c| format!("e:{}", frame.char_name(c))).collect();
    let mut free: Vec<&Path> = paths.iter().enumerate().filter(|(i, _)| !piv.contains(i)).map(|(_, p)| p).collect();
    free.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out.extend(free.into_iter().map(|p| g.render_path(p)));
    out
}

/// Cyclic classes of length 1..=n modulo the classes of `w ∂_a S`.
pub fn deformation_space_truncated(g: &Gsp, n: usize) -> usize {
    let paths = enumerate_paths(&g.arrows, n);
    let cycles: BTreeSet<Path> = paths.iter().filter(|w| g.path_tgt(w) == g.path_src(w)).map(|w| canonical_rotation(w)).collect();
    let index: BTreeMap<&Path, usize> = cycles.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut rows = Vec::new();
    for a in 0..g.arrows.len() as u32 {
        let r = cyclic_derivative(&g.potential, a);
        if r.is_empty() {
            continue;
        }
        let arr = &g.arrows[a as usize];
        // ∂_a S runs from tgt(a) to src(a); close it with paths from src(a) to tgt(a)
        let closers = paths.iter().filter(|p| g.path_src(p) == arr.src && g.path_tgt(p) == arr.tgt);
        for p in closers {
            let mut row = BTreeMap::new();
            for (w, c) in &r {
                if w.len() + p.len() > n {
                    continue;
                }
                let full: Path = w.iter().chain(p.iter()).copied().collect();
                let key = canonical_rotation(&full);
                let e = row.entry(index[&key]).or_insert_with(Q::zero);
                *e += c;
            }
            row.retain(|_, v: &mut Q| !v.is_zero());
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    let (rank, _) = sparse_rank(rows);
    cycles.len() - rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::FiniteAbelianGroup;

    /// Trivial groups, arrows listed as (src, tgt).
    pub fn quiver(nv: usize, arrows: &[(usize, usize, &str)]) -> Gsp {
        Gsp {
            labels: (1..=nv).map(|i| i.to_string()).collect(),
            groups: vec![FiniteAbelianGroup::trivial(); nv],
            arrows: arrows.iter().map(|&(s, t, id)| Arrow { id: id.into(), src: s, tgt: t }).collect(),
            potential: Potential::zero(),
            trunc: 6,
        }
    }

    #[test]
    fn rotation_normalisation() {
        assert_eq!(canonical_rotation(&[2, 0, 1]), vec![0, 1, 2]);
        let mut s = Potential::zero();
        s.add_cycle(&[1, 2, 0], q(1));
        s.add_cycle(&[0, 1, 2], q(2));
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.terms[&vec![0, 1, 2]], q(3));
    }

    #[test]
    fn derivative_of_three_cycle() {
        let mut s = Potential::zero();
        s.add_cycle(&[0, 1, 2], q(5));
        let d = cyclic_derivative(&s, 0);
        assert_eq!(d, [(vec![1, 2], q(5))].into_iter().collect());
        assert!(cyclic_derivative(&s, 3).is_empty());
        let d2 = path2_derivative(&s, 2, 0);
        assert_eq!(d2, [(vec![1], q(5))].into_iter().collect());
    }

    #[test]
    fn derivative_counts_repeated_occurrences() {
        let mut s = Potential::zero();
        s.add_cycle(&[0, 1, 0, 1], q(1));
        let d = cyclic_derivative(&s, 0);
        assert_eq!(d, [(vec![1, 0, 1], q(2))].into_iter().collect());
    }

    #[test]
    fn emorphism_scaling_and_substitution() {
        let g = quiver(3, &[(0, 1, "a"), (1, 0, "b"), (1, 2, "c"), (2, 1, "d")]);
        let mut s = Potential::zero();
        s.add_cycle(&[0, 1], q(1));
        let mut phi = EMorphism::identity(4);
        phi.images[0] = [(vec![0], q(2))].into_iter().collect();
        assert_eq!(phi.apply_potential(&s, 6).terms[&vec![0, 1]], q(2));
        // a ↦ a + a c d
        let mut psi = EMorphism::identity(4);
        psi.images[0] = [(vec![0], q(1)), (vec![0, 2, 3], q(1))].into_iter().collect();
        psi.check(&g.arrows, &g.arrows).unwrap();
        let t = psi.apply_potential(&s, 6);
        assert_eq!(t.terms.len(), 2);
        assert_eq!(t.terms[&vec![0, 2, 3, 1]], q(1));
        assert_eq!(psi.apply_potential(&s, 3).terms.len(), 1);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut s = Potential::zero();
        s.add_cycle(&[0, 1], q(1));
        s.add_cycle(&[0, 2, 3, 1], q(3));
        let mut phi = EMorphism::identity(4);
        phi.images[1] = [(vec![1], q(1)), (vec![2, 3, 1], q(-1))].into_iter().collect();
        let mut psi = EMorphism::identity(4);
        psi.images[0] = [(vec![0], q(2)), (vec![0, 2, 3], q(1))].into_iter().collect();
        let both = phi.compose(&psi, 8).apply_potential(&s, 8);
        let seq = phi.apply_potential(&psi.apply_potential(&s, 8), 8);
        assert_eq!(both, seq);
    }

    #[test]
    fn alpha_form_on_two_cycle() {
        let mut g = quiver(2, &[(0, 1, "a"), (1, 0, "b")]);
        assert_eq!(alpha_form(&g, 0, 1).rank(), 0);
        assert!(!max_rank_check(&g, 0, 1));
        g.potential.add_cycle(&[0, 1], q(1));
        assert_eq!(alpha_form(&g, 0, 1), Matrix::from_i64(&[vec![1]]));
        assert!(max_rank_check(&g, 0, 1));
    }

    #[test]
    fn jacobian_of_trivial_and_cyclic_examples() {
        let mut g = quiver(2, &[(0, 1, "a"), (1, 0, "b")]);
        g.potential.add_cycle(&[0, 1], q(1));
        assert_eq!(jacobian_basis(&g, 5).len(), 2);
        let mut t = quiver(3, &[(0, 1, "a"), (1, 2, "b"), (2, 0, "c")]);
        // S = 0: every path survives
        assert_eq!(jacobian_basis(&t, 4).len(), 3 + 3 * 4);
        t.potential.add_cycle(&[0, 1, 2], q(1));
        // relations bc = ca = ab = 0 leave the idempotents and the three arrows
        assert_eq!(jacobian_basis(&t, 4), vec!["e:1:0", "e:2:0", "e:3:0", "a", "b", "c"]);
    }

    #[test]
    fn deformation_examples() {
        let mut g = quiver(2, &[(0, 1, "a"), (1, 0, "b")]);
        g.potential.add_cycle(&[0, 1], q(1));
        assert_eq!(deformation_space_truncated(&g, 5), 0);
        let t = quiver(3, &[(0, 1, "a"), (1, 2, "b"), (2, 0, "c")]);
        assert!(deformation_space_truncated(&t, 4) > 0);
        let acyclic = quiver(3, &[(0, 1, "a"), (1, 2, "b")]);
        assert_eq!(deformation_space_truncated(&acyclic, 6), 0);
    }

    #[test]
    fn species_round_trip() {
        let sp = crate::species::c3_species();
        let g = Gsp::from_species(&sp, 6);
        assert_eq!(g.arrows.len(), 3);
        assert_eq!(g.arrows[1].id, "2:0→3:0#0");
        assert_eq!(g.species(), sp);
        g.validate().unwrap();
    }
}
