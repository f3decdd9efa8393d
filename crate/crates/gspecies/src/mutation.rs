//! Premutation, mutation by reduction, compatibility with matrix mutation,
//! non-degeneracy probing, rigidity and extended Y-seeds.

use crate::error::{GspError, Result};
use crate::exec::Exec;
use crate::gsp::{canonical_rotation, deformation_space_truncated, enumerate_paths, Arrow, Gsp, Path, Potential};
use crate::linalg::{q, Q};
use crate::poly::SFRational;
use crate::reduce::{split_reduce, Reduction};
use crate::seed::{mutate_matrix, ExchangeMatrix};
use crate::species::transpose;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn dual_name(id: &str) -> String {
    match id.strip_suffix('*') {
        Some(s) => s.to_string(),
        None => format!("{id}*"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premutation {
    pub k: usize,
    pub gsp: Gsp,
    /// Old index → new index for arrows not incident to block k.
    pub kept: BTreeMap<u32, u32>,
    /// `(a, b)` with `a` into block k and `b` out of it → index of `[a|b]`.
    pub composite: BTreeMap<(u32, u32), u32>,
    /// Out-arrow `b` → index of `b^*`.
    pub dual_out: BTreeMap<u32, u32>,
    /// In-arrow `a` → index of `a^*`.
    pub dual_in: BTreeMap<u32, u32>,
}

pub fn not_two_acyclic(g: &Gsp, k: usize) -> Option<GspError> {
    g.two_cycle_witness(k).map(|path| GspError::NotTwoAcyclicAtK { vertex: g.labels[k].clone(), path })
}

/// `μ̃_k`: composites through k, reversed arrows at k, `S̃ = [S] + Σ [a|b] b^* a^*`.
pub fn premutate(g: &Gsp, k: usize) -> Result<Premutation> {
    if k >= g.groups.len() {
        return Err(GspError::IndexOutOfRange { index: k, size: g.groups.len() });
    }
    if let Some(e) = not_two_acyclic(g, k) {
        return Err(e);
    }
    let blk = g.block(k);
    let cv = g.char_vertex();
    let na = g.arrows.len() as u32;
    let ins: Vec<u32> = (0..na).filter(|&a| blk.contains(&g.arrows[a as usize].tgt)).collect();
    let outs: Vec<u32> = (0..na).filter(|&a| blk.contains(&g.arrows[a as usize].src)).collect();
    let mut arrows: Vec<Arrow> = Vec::new();
    let mut kept = BTreeMap::new();
    for a in 0..na {
        let arr = &g.arrows[a as usize];
        if !blk.contains(&arr.src) && !blk.contains(&arr.tgt) {
            kept.insert(a, arrows.len() as u32);
            arrows.push(arr.clone());
        }
    }
    let mut composite = BTreeMap::new();
    for &a in &ins {
        for &b in &outs {
            let (x, y) = (&g.arrows[a as usize], &g.arrows[b as usize]);
            if x.tgt != y.src {
                continue;
            }
            if cv[x.src] == cv[y.tgt] {
                return Err(GspError::NotAGsp(format!("premutation at {} would create a loop [{}|{}]", g.labels[k], x.id, y.id)));
            }
            composite.insert((a, b), arrows.len() as u32);
            arrows.push(Arrow { id: format!("[{}|{}]", x.id, y.id), src: x.src, tgt: y.tgt });
        }
    }
    let mut dual_out = BTreeMap::new();
    for &b in &outs {
        let y = &g.arrows[b as usize];
        dual_out.insert(b, arrows.len() as u32);
        arrows.push(Arrow { id: dual_name(&y.id), src: y.tgt, tgt: y.src });
    }
    let mut dual_in = BTreeMap::new();
    for &a in &ins {
        let x = &g.arrows[a as usize];
        dual_in.insert(a, arrows.len() as u32);
        arrows.push(Arrow { id: dual_name(&x.id), src: x.tgt, tgt: x.src });
    }

    let mut s = Potential::zero();
    for (w, c) in &g.potential.terms {
        s.add_cycle(&bracket(w, g, &blk, &kept, &composite), c.clone());
    }
    for (&(a, b), &ab) in &composite {
        s.add_cycle(&[ab, dual_out[&b], dual_in[&a]], Q::one());
    }
    let gsp = Gsp { labels: g.labels.clone(), groups: g.groups.clone(), arrows, potential: s, trunc: g.trunc };
    gsp.validate()?;
    Ok(Premutation { k, gsp, kept, composite, dual_out, dual_in })
}

/// `[w]`: every passage `a b` through block k replaced by the composite arrow.
fn bracket(w: &[u32], g: &Gsp, blk: &std::ops::Range<usize>, kept: &BTreeMap<u32, u32>, comp: &BTreeMap<(u32, u32), u32>) -> Path {
    let n = w.len();
    let start = (0..n).find(|&p| !blk.contains(&g.arrows[w[p] as usize].src)).expect("cycle leaves block k");
    let rot: Vec<u32> = (0..n).map(|i| w[(start + i) % n]).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let a = rot[i];
        if blk.contains(&g.arrows[a as usize].tgt) {
            out.push(comp[&(a, rot[i + 1])]);
            i += 2;
        } else {
            out.push(kept[&a]);
            i += 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationReport {
    pub k: usize,
    pub premutation: Premutation,
    pub reduction: Reduction,
    pub b_before: Option<ExchangeMatrix>,
    pub b_after: Option<ExchangeMatrix>,
    /// 2-acyclicity of the reduced GSP at every vertex.
    pub two_acyclic: Vec<bool>,
}

impl MutationReport {
    pub fn reduced(&self) -> &Gsp {
        &self.reduction.reduced
    }
}

/// `μ_k`: the reduced part of the premutation.
pub fn mutate(g: &Gsp, k: usize) -> Result<MutationReport> {
    let premutation = premutate(g, k)?;
    let reduction = split_reduce(&premutation.gsp)?;
    let red = &reduction.reduced;
    let two_acyclic = (0..red.groups.len()).map(|i| red.is_2_acyclic_at(i)).collect();
    Ok(MutationReport {
        k,
        b_before: g.species().exchange_matrix().ok(),
        b_after: red.species().exchange_matrix().ok(),
        premutation,
        reduction,
        two_acyclic,
    })
}

/// Mutations applied left to right; a failure reports the prefix that was already applied.
pub fn mutate_sequence(g: &Gsp, seq: &[usize]) -> Result<Vec<MutationReport>> {
    let mut cur = g.clone();
    let mut out = Vec::new();
    for (pos, &k) in seq.iter().enumerate() {
        let r = mutate(&cur, k).map_err(|e| GspError::MutationUndefined {
            prefix: seq[..pos].iter().map(|&i| g.labels.get(i).cloned().unwrap_or_default()).collect(),
            reason: e.to_string(),
        })?;
        cur = r.reduced().clone();
        out.push(r);
    }
    Ok(out)
}

/// `μ_k(B(A,S)) = B(μ_k(A,S))`, asserted only when the mutated GSP is 2-acyclic.
pub fn b_compat_check(g: &Gsp, k: usize) -> Result<bool> {
    let b = g.species().exchange_matrix()?;
    let r = mutate(g, k)?;
    if let Some(i) = r.two_acyclic.iter().position(|&x| !x) {
        let path = r.reduced().two_cycle_witness(i).unwrap_or_default();
        return Err(GspError::MutationNotTwoAcyclic { witness: format!("vertex {}: {}", g.labels[i], path.join(" ")) });
    }
    let after = r.reduced().species().exchange_matrix()?;
    Ok(mutate_matrix(&b, k)? == after)
}

/// Canonical cycles of length 2..=max_deg.
pub fn cycle_basis(g: &Gsp, max_deg: usize) -> Vec<Path> {
    let mut out: Vec<Path> = enumerate_paths(&g.arrows, max_deg)
        .into_iter()
        .filter(|w| w.len() >= 2 && g.path_src(w) == g.path_tgt(w))
        .map(|w| canonical_rotation(&w))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeFailure {
    pub trial: usize,
    pub sequence: Vec<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub trials: usize,
    pub max_len: usize,
    pub sequences_checked: usize,
    pub failures: Vec<ProbeFailure>,
}

impl ProbeReport {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random integer potential on the cycle basis, coefficients in `[-c, c] \ {0}`.
pub fn sample_potential(g: &Gsp, max_deg: usize, c: i64, rng: &mut ChaCha8Rng) -> Potential {
    let mut s = Potential::zero();
    for w in cycle_basis(g, max_deg) {
        let mut v = 0;
        while v == 0 {
            v = rng.gen_range(-c..=c);
        }
        s.add_cycle(&w, q(v));
    }
    s
}

/// Every sequence of length ≤ L without immediate repeats, for T sampled potentials.
/// A trial stops at its first sequence that reaches a GSP which is not 2-acyclic.
pub fn probe_nondegeneracy(g: &Gsp, max_len: usize, trials: usize, max_deg: usize, coeff: i64, seed: u64, exec: Exec) -> ProbeReport {
    let results = exec.map((0..trials).collect(), |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let mut start = g.clone();
        start.potential = sample_potential(g, max_deg, coeff, &mut rng);
        let mut count = 0;
        let fail = probe_from(&start, &mut vec![], max_len, &mut count);
        (count, fail.map(|(sequence, reason)| ProbeFailure { trial: t, sequence, reason }))
    });
    let mut report = ProbeReport { trials, max_len, sequences_checked: 0, failures: vec![] };
    for (c, f) in results {
        report.sequences_checked += c;
        report.failures.extend(f);
    }
    report
}

fn probe_from(g: &Gsp, prefix: &mut Vec<usize>, left: usize, count: &mut usize) -> Option<(Vec<usize>, String)> {
    if left == 0 {
        return None;
    }
    for k in 0..g.groups.len() {
        if prefix.last() == Some(&k) {
            continue;
        }
        prefix.push(k);
        *count += 1;
        let res = mutate(g, k);
        let outcome = match res {
            Err(e) => Some((prefix.clone(), e.to_string())),
            Ok(r) => {
                let red = r.reduced();
                match (0..red.groups.len()).find(|&i| !red.is_2_acyclic_at(i)) {
                    Some(i) => Some((prefix.clone(), format!("not 2-acyclic at {}: {}", red.labels[i], red.two_cycle_witness(i).unwrap().join(" ")))),
                    None => probe_from(red, prefix, left - 1, count),
                }
            }
        };
        prefix.pop();
        if outcome.is_some() {
            return outcome;
        }
    }
    None
}

/// Rigid at truncation: the truncated deformation space vanishes.
pub fn rigidity_check(g: &Gsp) -> bool {
    deformation_space_truncated(g, g.trunc.saturating_sub(1)) == 0
}

/// Variables `y_{i,ρ}` over the characters of a GSP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedYSeed {
    pub vars: Vec<SFRational>,
    pub gsp: Gsp,
}

impl ExtendedYSeed {
    pub fn free(gsp: Gsp) -> Self {
        let n = gsp.num_chars();
        ExtendedYSeed { vars: (0..n).map(|i| SFRational::var(n, i)).collect(), gsp }
    }
}

/// `y'_{k,ρ} = y_{k,ρ}^{-1}`; `y'_{i,ρ} = y_{i,ρ} y_k^{[ρ⊗A_ik]} (1+y_k)^{[ρ⊗A_ki^*] − [ρ⊗A_ik]}`.
pub fn extended_y_seed_mutate(seed: &ExtendedYSeed, k: usize) -> Result<ExtendedYSeed> {
    let g = &seed.gsp;
    if let Some(e) = not_two_acyclic(g, k) {
        return Err(e);
    }
    let sp = g.species();
    let off = sp.offsets();
    let kb = g.block(k);
    let mut vars = seed.vars.clone();
    for c in kb.clone() {
        vars[c] = seed.vars[c].inv();
    }
    for i in 0..sp.size() {
        if i == k {
            continue;
        }
        let a_ik = &sp.mult[i][k];
        let a_ki_dual = transpose(&sp.mult[k][i]);
        for r in 0..sp.groups[i].order() {
            let c = off[i] + r;
            let mut v = seed.vars[c].clone();
            for (s, kc) in kb.clone().enumerate() {
                let plus = a_ik[r][s] as i64;
                let dual = a_ki_dual[r][s] as i64;
                if plus != 0 {
                    v = v.mul(&seed.vars[kc].powi(plus));
                }
                if dual - plus != 0 {
                    v = v.mul(&seed.vars[kc].one_plus().powi(dual - plus));
                }
            }
            vars[c] = v;
        }
    }
    let report = mutate(g, k)?;
    Ok(ExtendedYSeed { vars, gsp: report.reduced().clone() })
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

    #[test]
    fn premutation_of_a_path() {
        let g = quiver(3, &[(0, 1, "a"), (1, 2, "b")]);
        let p = premutate(&g, 1).unwrap();
        let ids: Vec<&str> = p.gsp.arrows.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["[a|b]", "b*", "a*"]);
        assert_eq!(p.gsp.potential.terms.len(), 1);
        assert_eq!(p.gsp.render_path(p.gsp.potential.terms.keys().next().unwrap()), "[a|b] b* a*");
    }

    #[test]
    fn isolated_vertex_is_fixed() {
        let g = quiver(3, &[(0, 1, "a")]);
        let r = mutate(&g, 2).unwrap();
        assert_eq!(*r.reduced(), g);
    }

    #[test]
    fn path_mutated_twice_returns_multiplicities() {
        let g = quiver(3, &[(0, 1, "a"), (1, 2, "b")]);
        let once = mutate(&g, 1).unwrap();
        let twice = mutate(once.reduced(), 1).unwrap();
        assert_eq!(twice.reduced().species(), g.species());
        assert!(twice.reduced().potential.is_zero());
        let ids: Vec<&str> = twice.reduced().arrows.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b"]);
    }

    #[test]
    fn two_cycle_blocks_premutation() {
        let g = quiver(2, &[(0, 1, "a"), (1, 0, "b")]);
        assert!(matches!(premutate(&g, 0), Err(GspError::NotTwoAcyclicAtK { .. })));
    }

    #[test]
    fn c3_b_compatibility() {
        let g = Gsp::from_species(&c3_species(), 8);
        for k in 0..3 {
            assert!(b_compat_check(&g, k).unwrap());
        }
    }

    #[test]
    fn c3_sequence_reaches_expected_species() {
        let g = Gsp::from_species(&c3_species(), 8);
        let reps = mutate_sequence(&g, &[1, 0, 2]).unwrap();
        let last = reps.last().unwrap().reduced();
        assert!(last.is_2_acyclic());
        let b = last.species().exchange_matrix().unwrap();
        let expect = crate::seed::mutate_matrix_seq(&g.species().exchange_matrix().unwrap(), &[1, 0, 2]).unwrap();
        assert_eq!(b, expect);
    }

    #[test]
    fn acyclic_probe_succeeds() {
        let g = Gsp::from_species(&c3_species(), 6);
        let r = probe_nondegeneracy(&g, 3, 2, 4, 3, 7, Exec::Sequential);
        assert!(r.success(), "{:?}", r.failures);
    }

    #[test]
    fn rigidity_examples() {
        assert!(rigidity_check(&Gsp::from_species(&c3_species(), 6)));
        let t = quiver(3, &[(0, 1, "a"), (1, 2, "b"), (2, 0, "c")]);
        assert!(!rigidity_check(&t));
    }

    #[test]
    fn extended_seed_example() {
        let g = Gsp::from_species(&c3_species(), 6);
        let s = ExtendedYSeed::free(g);
        let t = extended_y_seed_mutate(&s, 2).unwrap();
        let y = |i| SFRational::var(4, i);
        let expect = y(1).mul(&y(2)).mul(&y(3)).div(&y(2).one_plus().mul(&y(3).one_plus()));
        assert_eq!(t.vars[1], expect);
        assert_eq!(t.vars[2], y(2).inv());
        assert_eq!(t.vars[0], y(0));
        let back = extended_y_seed_mutate(&t, 2).unwrap();
        assert_eq!(back.vars, s.vars);
    }
}
