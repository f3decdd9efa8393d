//! Finite abelian groups, bimodules as character-multiplicity matrices, and group species.

use crate::error::{GspError, Result};
use crate::seed::{check_symmetrizer, ExchangeMatrix};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    pub factors: Vec<u32>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(GspError::Invalid("cyclic factors must be >= 1".into()));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: vec![] }
    }

    pub fn cyclic(n: u32) -> Self {
        if n == 1 {
            Self::trivial()
        } else {
            FiniteAbelianGroup { factors: vec![n] }
        }
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&f| f as usize).product()
    }

    /// Characters as residue tuples in lexicographic order.
    pub fn characters(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &f in &self.factors {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..f).map(move |r| {
                        let mut c2 = c.clone();
                        c2.push(r);
                        c2
                    })
                })
                .collect();
        }
        out
    }

    pub fn char_index(&self, c: &[u32]) -> usize {
        c.iter().zip(&self.factors).fold(0, |acc, (&r, &f)| acc * f as usize + r as usize)
    }

    pub fn inverse(&self, idx: usize) -> usize {
        let c = &self.characters()[idx];
        let inv: Vec<u32> = c.iter().zip(&self.factors).map(|(&r, &f)| (f - r) % f).collect();
        self.char_index(&inv)
    }

    pub fn char_label(&self, idx: usize) -> String {
        let c = &self.characters()[idx];
        if c.is_empty() {
            "0".into()
        } else {
            c.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn parse_char(&self, s: &str) -> Result<usize> {
        (0..self.order())
            .find(|&i| self.char_label(i) == s)
            .ok_or_else(|| GspError::Invalid(format!("unknown character {s}")))
    }
}

pub type Mult = Vec<Vec<u32>>;

pub fn zero_mult(r: usize, c: usize) -> Mult {
    vec![vec![0; c]; r]
}

pub fn mult_is_zero(m: &Mult) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x == 0))
}

pub fn mult_total(m: &Mult) -> u32 {
    m.iter().flatten().sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bimodule {
    pub from: usize,
    pub to: usize,
    pub mult: Mult,
}

/// The dual `M^*` as a (to, from)-bimodule: `a^*` for `a ∈ ρ⊠σ` lies in `σ⊠ρ`.
pub fn dual_bimodule(m: &Bimodule) -> Bimodule {
    Bimodule { from: m.to, to: m.from, mult: transpose(&m.mult) }
}

/// Character-inverted transpose, the bimodule of the opposite species.
pub fn opposite_bimodule(m: &Bimodule, g_from: &FiniteAbelianGroup, g_to: &FiniteAbelianGroup) -> Bimodule {
    let rows = m.mult.len();
    let cols = m.mult.first().map_or(g_to.order(), |r| r.len());
    let mut out = zero_mult(cols, rows);
    for (r, row) in m.mult.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            out[g_to.inverse(c)][g_from.inverse(r)] = x;
        }
    }
    Bimodule { from: m.to, to: m.from, mult: out }
}

pub fn transpose(m: &Mult) -> Mult {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = zero_mult(cols, rows);
    for r in 0..rows {
        for c in 0..cols {
            out[c][r] = m[r][c];
        }
    }
    out
}

pub fn mult_product(a: &Mult, b: &Mult) -> Mult {
    let rows = a.len();
    let mid = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = zero_mult(rows, cols);
    for i in 0..rows {
        assert_eq!(a[i].len(), mid);
        for k in 0..mid {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..cols {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn tensor_bimodule(m: &Bimodule, n: &Bimodule) -> Result<Bimodule> {
    if m.to != n.from {
        return Err(GspError::VertexMismatch(format!("{}->{} then {}->{}", m.from, m.to, n.from, n.to)));
    }
    Ok(Bimodule { from: m.from, to: n.to, mult: mult_product(&m.mult, &n.mult) })
}

/// Left and right ranks if the multiplicity matrix has constant row and column sums.
pub fn local_ranks(m: &Mult) -> Option<(u32, u32)> {
    let rows: Vec<u32> = m.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u32> = transpose(m).iter().map(|r| r.iter().sum()).collect();
    let l = *rows.first().unwrap_or(&0);
    let r = *cols.first().unwrap_or(&0);
    if rows.iter().all(|&x| x == l) && cols.iter().all(|&x| x == r) {
        Some((l, r))
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpecies {
    pub labels: Vec<String>,
    pub groups: Vec<FiniteAbelianGroup>,
    /// `mult[i][j]`: multiplicities of `ρ⊠σ` in `A_ij`, indexed `irr_i × irr_j`.
    pub mult: Vec<Vec<Mult>>,
}

impl GroupSpecies {
    pub fn empty(labels: Vec<String>, groups: Vec<FiniteAbelianGroup>) -> Self {
        let n = groups.len();
        let mult = (0..n)
            .map(|i| (0..n).map(|j| zero_mult(groups[i].order(), groups[j].order())).collect())
            .collect();
        GroupSpecies { labels, groups, mult }
    }

    pub fn with_default_labels(groups: Vec<FiniteAbelianGroup>) -> Self {
        let labels = (1..=groups.len()).map(|i| i.to_string()).collect();
        Self::empty(labels, groups)
    }

    pub fn size(&self) -> usize {
        self.groups.len()
    }

    pub fn set(&mut self, i: usize, j: usize, m: Mult) -> Result<()> {
        let (r, c) = (self.groups[i].order(), self.groups[j].order());
        if m.len() != r || m.iter().any(|row| row.len() != c) {
            return Err(GspError::Invalid(format!("bimodule {i}->{j} must be {r}x{c}")));
        }
        self.mult[i][j] = m;
        Ok(())
    }

    pub fn bimodule(&self, i: usize, j: usize) -> Bimodule {
        Bimodule { from: i, to: j, mult: self.mult[i][j].clone() }
    }

    /// Offsets of each vertex block in the global character numbering.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size() + 1);
        let mut acc = 0;
        for g in &self.groups {
            out.push(acc);
            acc += g.order();
        }
        out.push(acc);
        out
    }

    pub fn num_chars(&self) -> usize {
        self.groups.iter().map(|g| g.order()).sum()
    }

    /// Vertex of each global character.
    pub fn char_vertex(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, g) in self.groups.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, g.order()));
        }
        out
    }

    pub fn char_name(&self, c: usize) -> String {
        let off = self.offsets();
        let v = self.char_vertex()[c];
        format!("{}:{}", self.labels[v], self.groups[v].char_label(c - off[v]))
    }

    pub fn parse_char_name(&self, s: &str) -> Result<usize> {
        let (v, ch) = s.split_once(':').ok_or_else(|| GspError::Invalid(format!("bad character name {s}")))?;
        let vi = self.labels.iter().position(|l| l == v).ok_or_else(|| GspError::Invalid(format!("unknown vertex {v}")))?;
        Ok(self.offsets()[vi] + self.groups[vi].parse_char(ch)?)
    }

    pub fn has_loops(&self) -> bool {
        (0..self.size()).any(|i| !mult_is_zero(&self.mult[i][i]))
    }

    pub fn is_locally_free(&self) -> bool {
        self.mult.iter().flatten().all(|m| local_ranks(m).is_some())
    }

    pub fn is_globally_free(&self) -> bool {
        self.mult.iter().flatten().all(|m| {
            let first = m.first().and_then(|r| r.first()).copied().unwrap_or(0);
            m.iter().flatten().all(|&x| x == first)
        })
    }

    /// Character-level length-2 paths from block k back to block k, as (via-vertex) witnesses.
    pub fn two_cycle_at(&self, k: usize) -> Option<usize> {
        (0..self.size()).find(|&j| {
            let p = mult_product(&self.mult[k][j], &self.mult[j][k]);
            !mult_is_zero(&p)
        })
    }

    pub fn is_2_acyclic_at(&self, k: usize) -> bool {
        self.two_cycle_at(k).is_none()
    }

    pub fn is_2_acyclic(&self) -> bool {
        (0..self.size()).all(|k| self.is_2_acyclic_at(k))
    }

    /// `A_ij^*` is a subbimodule of `A_ji`, or the other way round.
    pub fn is_cancellable_pair(&self, i: usize, j: usize) -> bool {
        let dij = transpose(&self.mult[i][j]);
        let dji = transpose(&self.mult[j][i]);
        dominated(&dij, &self.mult[j][i]) || dominated(&dji, &self.mult[i][j])
    }

    /// `b_ij = dim_{E_j} A_ji − dim_{E_j} A_ij^*` (row sums of `A_ji` minus column sums of `A_ij`).
    pub fn exchange_matrix(&self) -> Result<ExchangeMatrix> {
        let n = self.size();
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (lji, _) = local_ranks(&self.mult[j][i]).ok_or_else(|| self.not_free(j, i))?;
                let (_, rij) = local_ranks(&self.mult[i][j]).ok_or_else(|| self.not_free(i, j))?;
                rows[i][j] = lji as i64 - rij as i64;
            }
        }
        ExchangeMatrix::with_labels(self.labels.clone(), rows)
    }

    fn not_free(&self, i: usize, j: usize) -> GspError {
        GspError::NotLocallyFree { from: self.labels[i].clone(), to: self.labels[j].clone() }
    }

    /// Opposite species: `a: (i,ρ)→(j,σ)` becomes `(j,σ^{-1})→(i,ρ^{-1})`.
    pub fn opposite(&self) -> GroupSpecies {
        let mut out = GroupSpecies::empty(self.labels.clone(), self.groups.clone());
        for i in 0..self.size() {
            for j in 0..self.size() {
                let b = opposite_bimodule(&self.bimodule(i, j), &self.groups[i], &self.groups[j]);
                out.mult[j][i] = b.mult;
            }
        }
        out
    }

    /// Global character permutation `(i,ρ) ↦ (i,ρ^{-1})`.
    pub fn char_inversion(&self) -> Vec<usize> {
        let off = self.offsets();
        let mut out = Vec::with_capacity(self.num_chars());
        for (i, g) in self.groups.iter().enumerate() {
            for c in 0..g.order() {
                out.push(off[i] + g.inverse(c));
            }
        }
        out
    }
}

pub fn dominated(a: &Mult, b: &Mult) -> bool {
    a.iter().zip(b).all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| x <= y))
}

/// `Γ_i = Z/d_i`; for `b_ij > 0`, `A_ji` is `K[Z/n]` with `n = d_j b_ij`, decomposed into characters.
pub fn species_from_matrix(b: &ExchangeMatrix, d: &[i64]) -> Result<GroupSpecies> {
    check_symmetrizer(b, d)?;
    let n = b.size();
    let groups: Vec<FiniteAbelianGroup> = d.iter().map(|&x| FiniteAbelianGroup::cyclic(x as u32)).collect();
    let mut sp = GroupSpecies::empty(b.labels.clone(), groups);
    for i in 0..n {
        for j in 0..n {
            let bij = b.get(i, j);
            if bij <= 0 {
                continue;
            }
            let (dj, di) = (d[j], d[i]);
            let nn = dj * bij;
            let g = dj.gcd(&di);
            let m = nn / dj.lcm(&di);
            let mut mult = zero_mult(dj as usize, di as usize);
            for (u, row) in mult.iter_mut().enumerate() {
                for (v, slot) in row.iter_mut().enumerate() {
                    if (u as i64 - v as i64).rem_euclid(g) == 0 {
                        *slot = m as u32;
                    }
                }
            }
            sp.mult[j][i] = mult;
        }
    }
    Ok(sp)
}

/// The species of the worked type C3 example: `Γ = (1, 1, Z/2)`, `A_12 = K`, `A_23 = K[Z/2]`.
pub fn c3_species() -> GroupSpecies {
    let mut sp = GroupSpecies::with_default_labels(vec![
        FiniteAbelianGroup::trivial(),
        FiniteAbelianGroup::trivial(),
        FiniteAbelianGroup::cyclic(2),
    ]);
    sp.set(0, 1, vec![vec![1]]).unwrap();
    sp.set(1, 2, vec![vec![1, 1]]).unwrap();
    sp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characters_and_inverses() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.char_label(4), "1.1");
        assert_eq!(g.char_label(g.inverse(4)), "1.2");
        assert_eq!(FiniteAbelianGroup::trivial().char_label(0), "0");
    }

    #[test]
    fn dual_and_tensor_examples() {
        let m = Bimodule { from: 0, to: 1, mult: vec![vec![1, 2]] };
        assert_eq!(dual_bimodule(&m).mult, vec![vec![1], vec![2]]);
        let a = Bimodule { from: 0, to: 1, mult: vec![vec![1, 0]] };
        let b = Bimodule { from: 1, to: 2, mult: vec![vec![0], vec![1]] };
        assert_eq!(tensor_bimodule(&a, &b).unwrap().mult, vec![vec![0]]);
        let c = Bimodule { from: 2, to: 0, mult: vec![vec![3]] };
        assert!(matches!(tensor_bimodule(&a, &c), Err(GspError::VertexMismatch(_))));
    }

    #[test]
    fn c3_freeness_and_matrix() {
        let sp = c3_species();
        assert!(sp.is_locally_free());
        assert!(sp.is_globally_free());
        assert_eq!(local_ranks(&sp.mult[1][2]), Some((2, 1)));
        assert_eq!(sp.exchange_matrix().unwrap().rows, vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 2, 0]]);
        assert!(sp.is_2_acyclic());
    }

    #[test]
    fn not_locally_free_detected() {
        let mut sp = GroupSpecies::with_default_labels(vec![FiniteAbelianGroup::cyclic(2), FiniteAbelianGroup::cyclic(2)]);
        sp.set(0, 1, vec![vec![1, 0], vec![0, 0]]).unwrap();
        assert!(!sp.is_locally_free());
        assert!(matches!(sp.exchange_matrix(), Err(GspError::NotLocallyFree { .. })));
    }

    #[test]
    fn species_from_rank_two_matrix() {
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-2, 0]]).unwrap();
        let sp = species_from_matrix(&b, &[1, 2]).unwrap();
        assert_eq!(sp.mult[1][0], vec![vec![1], vec![1]]);
        assert_eq!(sp.exchange_matrix().unwrap(), b);
        let c3 = ExchangeMatrix::new(vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 2, 0]]).unwrap();
        assert_eq!(species_from_matrix(&c3, &[1, 1, 2]).unwrap().exchange_matrix().unwrap(), c3);
        assert!(matches!(species_from_matrix(&c3, &[1, 1, 1]), Err(GspError::SymmetrizerMismatch { .. })));
    }

    #[test]
    fn opposite_inverts_characters() {
        let mut sp = GroupSpecies::with_default_labels(vec![FiniteAbelianGroup::trivial(), FiniteAbelianGroup::cyclic(3)]);
        sp.set(0, 1, vec![vec![1, 2, 0]]).unwrap();
        let op = sp.opposite();
        assert_eq!(op.mult[1][0], vec![vec![1], vec![0], vec![2]]);
        assert_eq!(op.opposite(), sp);
    }
}
