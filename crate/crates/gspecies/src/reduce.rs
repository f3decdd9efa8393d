//! Splitting a GSP into trivial and reduced parts by explicit right-equivalences,
//! and transporting representations along them.

use crate::error::{GspError, Result};
use crate::gsp::{add_to, canonical_rotation, single, Arrow, EMorphism, Elem, Gsp, Path, Potential};
use crate::linalg::{Matrix, Q};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionStep {
    /// Change of arrows: `a ↦ forward[a]`, with `inverse` its inverse; both of degree one.
    Linear { forward: BTreeMap<u32, Elem>, inverse: BTreeMap<u32, Elem> },
    /// Unitriangular: `a ↦ a + h[a]`, every `h[a]` of degree ≥ 2.
    Unitri { h: BTreeMap<u32, Elem> },
}

impl ReductionStep {
    pub fn as_morphism(&self, narrows: usize) -> EMorphism {
        let mut phi = EMorphism::identity(narrows);
        match self {
            ReductionStep::Linear { forward, .. } => {
                for (a, e) in forward {
                    phi.images[*a as usize] = e.clone();
                }
            }
            ReductionStep::Unitri { h } => {
                for (a, e) in h {
                    let mut img = single(vec![*a]);
                    for (p, c) in e {
                        add_to(&mut img, p.clone(), c.clone());
                    }
                    phi.images[*a as usize] = img;
                }
            }
        }
        phi
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub source: Gsp,
    /// Potential after all steps, on the source arrows.
    pub normalized: Potential,
    pub trivial_pairs: Vec<(u32, u32)>,
    pub steps: Vec<ReductionStep>,
    /// Source index of every arrow of the reduced part.
    pub kept: Vec<u32>,
    pub reduced: Gsp,
}

impl Reduction {
    /// Composite right-equivalence `φ` with `φ(S) = S_triv + S_rd` up to degree N.
    pub fn witness(&self) -> EMorphism {
        let n = self.source.arrows.len();
        let trunc = self.source.trunc;
        self.steps
            .iter()
            .fold(EMorphism::identity(n), |acc, s| s.as_morphism(n).compose(&acc, trunc))
    }

    pub fn trivial_arrows(&self) -> Vec<Arrow> {
        self.trivial_pairs
            .iter()
            .flat_map(|&(a, b)| [self.source.arrows[a as usize].clone(), self.source.arrows[b as usize].clone()])
            .collect()
    }

    /// `S_triv = Σ a_t b_t` on the source arrows.
    pub fn trivial_potential(&self) -> Potential {
        let mut p = Potential::zero();
        for &(a, b) in &self.trivial_pairs {
            p.add_cycle(&[a, b], Q::one());
        }
        p
    }

    /// Transport arrow actions (row-vector convention) along the steps and restrict to the reduced arrows.
    pub fn transport(&self, dims: &[usize], mats: &[Matrix]) -> Result<Vec<Matrix>> {
        let arrows = &self.source.arrows;
        let total: usize = dims.iter().sum();
        let mut cur: Vec<Matrix> = mats.to_vec();
        for step in &self.steps {
            match step {
                ReductionStep::Linear { inverse, .. } => {
                    let mut next = cur.clone();
                    for (a, e) in inverse {
                        next[*a as usize] = eval_elem(e, &cur, arrows, dims, *a);
                    }
                    cur = next;
                }
                ReductionStep::Unitri { h } => {
                    // M''(a) = M'(a) − M''(h(a)), solved by iteration (h raises degree, X is nilpotent)
                    let mut next = cur.clone();
                    let mut settled = false;
                    for _ in 0..total + 3 {
                        let mut upd = cur.clone();
                        for (a, e) in h {
                            let v = eval_elem(e, &next, arrows, dims, *a);
                            upd[*a as usize] = cur[*a as usize].sub(&v);
                        }
                        if upd == next {
                            settled = true;
                            break;
                        }
                        next = upd;
                    }
                    if !settled {
                        return Err(GspError::RelationViolation("transport along a unitriangular step did not stabilise; representation is not nilpotent at this truncation".into()));
                    }
                    cur = next;
                }
            }
        }
        Ok(self.kept.iter().map(|&a| cur[a as usize].clone()).collect())
    }
}

/// Action of an element whose paths run parallel to arrow `like`.
pub fn eval_elem(e: &Elem, mats: &[Matrix], arrows: &[Arrow], dims: &[usize], like: u32) -> Matrix {
    let a = &arrows[like as usize];
    eval_elem_between(e, mats, arrows, dims[a.src], dims[a.tgt])
}

pub fn eval_elem_between(e: &Elem, mats: &[Matrix], arrows: &[Arrow], rows: usize, cols: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for (p, c) in e {
        if p.is_empty() {
            out = out.add(&Matrix::identity(rows).scale(c));
            continue;
        }
        let m = eval_path(p, mats, arrows);
        out.add_assign_scaled(&m, c);
    }
    out
}

pub fn eval_path(p: &[u32], mats: &[Matrix], _arrows: &[Arrow]) -> Matrix {
    let mut m = mats[p[0] as usize].clone();
    for &x in &p[1..] {
        if m.is_zero() {
            return Matrix::zeros(m.rows(), mats[*p.last().unwrap() as usize].cols());
        }
        m = m.mul(&mats[x as usize]);
    }
    m
}

fn has_trivial(w: &[u32], triv: &BTreeSet<u32>) -> bool {
    w.iter().any(|a| triv.contains(a))
}

/// Degree-2 normal form by changes of arrows, then unitriangular passes removing every
/// higher term through a trivial arrow.
pub fn split_reduce(g: &Gsp) -> Result<Reduction> {
    g.validate()?;
    let n = g.trunc;
    let na = g.arrows.len();
    let mut s = g.potential.truncate(n);
    let mut steps = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();

    // degree-2 part, one block per unordered pair of character vertices
    let mut blocks: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for w in s.terms.keys().filter(|w| w.len() == 2) {
        let (x, y) = (&g.arrows[w[0] as usize], &g.arrows[w[1] as usize]);
        blocks.insert((x.src.min(y.src), x.src.max(y.src)), ());
    }
    let mut forward: BTreeMap<u32, Elem> = BTreeMap::new();
    let mut inverse: BTreeMap<u32, Elem> = BTreeMap::new();
    for &(u, v) in blocks.keys() {
        let xs: Vec<u32> = (0..na as u32).filter(|&a| g.arrows[a as usize].src == u && g.arrows[a as usize].tgt == v).collect();
        let ys: Vec<u32> = (0..na as u32).filter(|&a| g.arrows[a as usize].src == v && g.arrows[a as usize].tgt == u).collect();
        let mut m = Matrix::zeros(xs.len(), ys.len());
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                if let Some(c) = s.terms.get(&canonical_rotation(&[x, y])) {
                    m.set(i, j, c.clone());
                }
            }
        }
        let (p, qm, rank) = normal_form(&m);
        if rank == 0 {
            continue;
        }
        let pt_inv = p.transpose().inverse().expect("invertible");
        let q_inv = qm.inverse().expect("invertible");
        for (i, &x) in xs.iter().enumerate() {
            forward.insert(x, combo(&xs, |j| p.get(j, i).clone()));
            inverse.insert(x, combo(&xs, |j| pt_inv.get(i, j).clone()));
        }
        for (i, &y) in ys.iter().enumerate() {
            forward.insert(y, combo(&ys, |j| qm.get(i, j).clone()));
            inverse.insert(y, combo(&ys, |j| q_inv.get(i, j).clone()));
        }
        for t in 0..rank {
            pairs.push((xs[t], ys[t]));
        }
    }
    if !forward.is_empty() {
        let step = ReductionStep::Linear { forward, inverse };
        s = step.as_morphism(na).apply_potential(&s, n);
        steps.push(step);
    }

    let triv: BTreeSet<u32> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut last_degree = 2;
    loop {
        let offending: Vec<(Path, Q)> = s
            .terms
            .iter()
            .filter(|(w, _)| w.len() >= 3 && has_trivial(w, &triv))
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        let Some(d) = offending.iter().map(|(w, _)| w.len()).min() else { break };
        if d <= last_degree {
            return Err(GspError::Invalid("reduction failed to raise the degree of trivial terms".into()));
        }
        last_degree = d;
        let mut h: BTreeMap<u32, Elem> = BTreeMap::new();
        for (w, c) in offending.iter().filter(|(w, _)| w.len() == d) {
            let len = w.len();
            let (t_pos, &(a, b)) = pairs
                .iter()
                .enumerate()
                .filter(|(_, (a, b))| w.contains(a) || w.contains(b))
                .min_by_key(|(i, _)| *i)
                .expect("term has a trivial arrow");
            let _ = t_pos;
            if let Some(p) = w.iter().position(|&x| x == a) {
                // a u  ⇒  b ↦ b − u
                let u: Path = (1..len).map(|i| w[(p + i) % len]).collect();
                add_to(h.entry(b).or_default(), u, -c.clone());
            } else {
                // v b  ⇒  a ↦ a − v
                let p = w.iter().position(|&x| x == b).unwrap();
                let v: Path = (1..len).map(|i| w[(p + i) % len]).collect();
                add_to(h.entry(a).or_default(), v, -c.clone());
            }
        }
        h.retain(|_, e| !e.is_empty());
        let step = ReductionStep::Unitri { h };
        s = step.as_morphism(na).apply_potential(&s, n);
        steps.push(step);
    }

    // remaining terms through trivial arrows are exactly the a_t b_t
    for (w, c) in &s.terms {
        if has_trivial(w, &triv) {
            let ok = w.len() == 2 && c.is_one() && pairs.iter().any(|&(a, b)| canonical_rotation(&[a, b]) == *w);
            if !ok {
                return Err(GspError::Invalid(format!("reduction left a trivial term {}", g.render_path(w))));
            }
        } else if w.len() == 2 {
            return Err(GspError::Invalid("reduction left a degree-2 term".into()));
        }
    }

    let kept: Vec<u32> = (0..na as u32).filter(|a| !triv.contains(a)).collect();
    let remap: BTreeMap<u32, u32> = kept.iter().enumerate().map(|(i, &a)| (a, i as u32)).collect();
    let mut rd = Potential::zero();
    for (w, c) in &s.terms {
        if !has_trivial(w, &triv) {
            let nw: Path = w.iter().map(|a| remap[a]).collect();
            rd.add_cycle(&nw, c.clone());
        }
    }
    let reduced = Gsp {
        labels: g.labels.clone(),
        groups: g.groups.clone(),
        arrows: kept.iter().map(|&a| g.arrows[a as usize].clone()).collect(),
        potential: rd,
        trunc: n,
    };
    Ok(Reduction { source: g.clone(), normalized: s, trivial_pairs: pairs, steps, kept, reduced })
}

fn combo(arrows: &[u32], coeff: impl Fn(usize) -> Q) -> Elem {
    let mut e = Elem::new();
    for (j, &a) in arrows.iter().enumerate() {
        add_to(&mut e, vec![a], coeff(j));
    }
    e
}

/// Invertible `P`, `Q` with `P M Q = diag(I_r, 0)`.
fn normal_form(m: &Matrix) -> (Matrix, Matrix, usize) {
    let (r, c) = (m.rows(), m.cols());
    let aug = Matrix::hstack(&[m, &Matrix::identity(r)], r);
    let (red, piv) = aug.rref();
    let pivots: Vec<usize> = piv.into_iter().filter(|&p| p < c).collect();
    let rank = pivots.len();
    let p = red.block(0, r, c, c + r);
    let rm = red.block(0, r, 0, c);
    let mut qm = Matrix::zeros(c, c);
    for (s, &pc) in pivots.iter().enumerate() {
        qm.set(pc, s, Q::one());
    }
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    for (t, &j) in free.iter().enumerate() {
        let col = rank + t;
        qm.set(j, col, Q::one());
        for (row, &pc) in pivots.iter().enumerate() {
            let v = rm.get(row, j).clone();
            if !v.is_zero() {
                qm.set(pc, col, -v);
            }
        }
    }
    (p, qm, rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsp::Arrow;
    use crate::linalg::q;
    use crate::species::FiniteAbelianGroup;

    fn quiver(nv: usize, arrows: &[(usize, usize, &str)]) -> Gsp {
        Gsp {
            labels: (1..=nv).map(|i| i.to_string()).collect(),
            groups: vec![FiniteAbelianGroup::trivial(); nv],
            arrows: arrows.iter().map(|&(s, t, id)| Arrow { id: id.into(), src: s, tgt: t }).collect(),
            potential: Potential::zero(),
            trunc: 6,
        }
    }

    #[test]
    fn normal_form_is_diagonal() {
        let m = Matrix::from_i64(&[vec![2, 4, 1], vec![1, 2, 3]]);
        let (p, qm, r) = normal_form(&m);
        assert_eq!(r, 2);
        let d = p.mul(&m).mul(&qm);
        assert_eq!(d, Matrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0]]));
    }

    #[test]
    fn zero_quadratic_part_is_untouched() {
        let mut g = quiver(3, &[(0, 1, "a"), (1, 2, "b"), (2, 0, "c")]);
        g.potential.add_cycle(&[0, 1, 2], q(1));
        let r = split_reduce(&g).unwrap();
        assert!(r.trivial_pairs.is_empty());
        assert_eq!(r.reduced, g);
        assert_eq!(r.witness(), EMorphism::identity(3));
    }

    #[test]
    fn pure_two_cycle_is_trivial() {
        let mut g = quiver(2, &[(0, 1, "a"), (1, 0, "b")]);
        g.potential.add_cycle(&[0, 1], q(3));
        let r = split_reduce(&g).unwrap();
        assert!(r.reduced.arrows.is_empty());
        assert!(r.reduced.potential.is_zero());
    }

    #[test]
    fn two_cycle_with_tail_reduces_to_zero() {
        // a: 1→2, b: 2→1, c: 1→1 is not allowed, use a third vertex: S = ab + a d e
        let mut g = quiver(3, &[(0, 1, "a"), (1, 0, "b"), (1, 2, "d"), (2, 0, "e")]);
        g.potential.add_cycle(&[0, 1], q(1));
        g.potential.add_cycle(&[0, 2, 3], q(1));
        let r = split_reduce(&g).unwrap();
        assert_eq!(r.trivial_pairs, vec![(0, 1)]);
        assert_eq!(r.reduced.arrows.len(), 2);
        assert!(r.reduced.potential.is_zero());
        let phi = r.witness();
        let image = phi.apply_potential(&g.potential, g.trunc);
        let mut expect = r.trivial_potential();
        for (w, c) in &r.normalized.terms {
            if w.len() > 2 {
                expect.add_cycle(w, c.clone());
            }
        }
        assert_eq!(image, expect);
    }

    #[test]
    fn witness_reproduces_normalized_potential() {
        // two parallel 2-cycles with mixed quadratic part and cubic tails
        let mut g = quiver(3, &[(0, 1, "a1"), (0, 1, "a2"), (1, 0, "b1"), (1, 0, "b2"), (1, 2, "c"), (2, 0, "d")]);
        g.potential.add_cycle(&[0, 2], q(1));
        g.potential.add_cycle(&[0, 3], q(2));
        g.potential.add_cycle(&[1, 2], q(3));
        g.potential.add_cycle(&[1, 3], q(1));
        g.potential.add_cycle(&[0, 4, 5], q(1));
        g.potential.add_cycle(&[1, 4, 5], q(-2));
        g.trunc = 7;
        let r = split_reduce(&g).unwrap();
        assert_eq!(r.trivial_pairs.len(), 2);
        assert_eq!(r.witness().apply_potential(&g.potential, 7), r.normalized);
        assert_eq!(r.reduced.arrows.len(), 2);
    }
}
