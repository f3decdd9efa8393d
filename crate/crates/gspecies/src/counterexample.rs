//! Instance check for a 6×6 exchange matrix with no non-degenerate locally free realization:
//! exhaustive search over locally free multiplicity data, with block-level mutation and
//! cancellation of 2-cycles along the sequences (3,5), (4,5) and (3,4,6).

use crate::exec::Exec;
use crate::seed::ExchangeMatrix;
use crate::species::{mult_product, transpose, zero_mult, FiniteAbelianGroup, GroupSpecies, Mult};
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCOPE: &str = "instance check: cyclic groups Z/d_i with d = (2m,2m,2m,2m,2m,m) for the listed m only; not a proof for arbitrary groups";

pub fn counterexample_matrix() -> ExchangeMatrix {
    ExchangeMatrix::new(vec![
        vec![0, 0, 1, 1, -1, -2],
        vec![0, 0, -1, -1, 1, 2],
        vec![-1, 1, 0, 0, 0, 0],
        vec![-1, 1, 0, 0, 0, 0],
        vec![1, -1, 0, 0, 0, 0],
        vec![1, -1, 0, 0, 0, 0],
    ])
    .unwrap()
}

/// The same pattern with the entries ±2 replaced by ±1.
pub fn control_matrix() -> ExchangeMatrix {
    ExchangeMatrix::new(vec![
        vec![0, 0, 1, 1, -1, -1],
        vec![0, 0, -1, -1, 1, 1],
        vec![-1, 1, 0, 0, 0, 0],
        vec![-1, 1, 0, 0, 0, 0],
        vec![1, -1, 0, 0, 0, 0],
        vec![1, -1, 0, 0, 0, 0],
    ])
    .unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DualConvention {
    /// `mult(M^*) = mult(M)^T`.
    Transpose,
    /// `mult(M^*)[σ⁻¹][ρ⁻¹] = mult(M)[ρ][σ]`.
    InvertedTranspose,
}

fn dual(m: &Mult, gi: &FiniteAbelianGroup, gj: &FiniteAbelianGroup, conv: DualConvention) -> Mult {
    match conv {
        DualConvention::Transpose => transpose(m),
        DualConvention::InvertedTranspose => {
            let mut out = zero_mult(gj.order(), gi.order());
            for (r, row) in m.iter().enumerate() {
                for (s, &x) in row.iter().enumerate() {
                    out[gj.inverse(s)][gi.inverse(r)] = x;
                }
            }
            out
        }
    }
}

fn dominated(a: &Mult, b: &Mult) -> bool {
    a.iter().zip(b).all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| x <= y))
}

fn add(a: &Mult, b: &Mult) -> Mult {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
}

fn sub(a: &Mult, b: &Mult) -> Mult {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect()).collect()
}

fn is_zero(m: &Mult) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x == 0))
}

/// Species-level `μ_k` for a potential generic enough that every 2-cycle which can be
/// cancelled is cancelled: `Ã_ij = A_ij ⊕ A_ik ⊗ A_kj`, arrows at k dualized, then each pair
/// with arrows both ways keeps the difference if one side's dual is a subbimodule of the
/// other. Otherwise the result cannot be 2-acyclic and the pair is returned.
pub fn mutate_blocks(sp: &GroupSpecies, k: usize, conv: DualConvention) -> std::result::Result<GroupSpecies, (usize, usize)> {
    let n = sp.size();
    if let Some(j) = (0..n).find(|&j| !is_zero(&sp.mult[k][j]) && !is_zero(&sp.mult[j][k])) {
        return Err((k, j));
    }
    let g = &sp.groups;
    let mut out = sp.clone();
    for i in 0..n {
        for j in 0..n {
            if i == k || j == k || i == j {
                continue;
            }
            out.mult[i][j] = add(&sp.mult[i][j], &mult_product(&sp.mult[i][k], &sp.mult[k][j]));
        }
    }
    for i in 0..n {
        if i == k {
            continue;
        }
        out.mult[i][k] = dual(&sp.mult[k][i], &g[k], &g[i], conv);
        out.mult[k][i] = dual(&sp.mult[i][k], &g[i], &g[k], conv);
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (out.mult[i][j].clone(), out.mult[j][i].clone());
            if is_zero(&a) || is_zero(&b) {
                continue;
            }
            let db = dual(&b, &g[j], &g[i], conv);
            let da = dual(&a, &g[i], &g[j], conv);
            if dominated(&db, &a) {
                out.mult[i][j] = sub(&a, &db);
                out.mult[j][i] = zero_mult(g[j].order(), g[i].order());
            } else if dominated(&da, &b) {
                out.mult[j][i] = sub(&b, &da);
                out.mult[i][j] = zero_mult(g[i].order(), g[j].order());
            } else {
                return Err((i, j));
            }
        }
    }
    Ok(out)
}

pub fn mutate_blocks_seq(sp: &GroupSpecies, seq: &[usize], conv: DualConvention) -> std::result::Result<GroupSpecies, String> {
    let mut cur = sp.clone();
    for (pos, &k) in seq.iter().enumerate() {
        cur = mutate_blocks(&cur, k, conv).map_err(|(i, j)| {
            let lbl: Vec<String> = seq[..=pos].iter().map(|x| (x + 1).to_string()).collect();
            format!("after μ at ({}) the arrows between {} and {} cannot cancel", lbl.join(","), i + 1, j + 1)
        })?;
    }
    Ok(cur)
}

/// Nonnegative integer matrices of the given shape with constant row sums `r` and column sums `c`.
pub fn locally_free_mults(rows: usize, cols: usize, r: u32, c: u32) -> Vec<Mult> {
    if rows as u32 * r != cols as u32 * c {
        return vec![];
    }
    let mut out = Vec::new();
    let mut m = zero_mult(rows, cols);
    let mut colsum = vec![0u32; cols];
    fn rec(i: usize, j: usize, left: u32, m: &mut Mult, colsum: &mut Vec<u32>, r: u32, c: u32, out: &mut Vec<Mult>) {
        let (rows, cols) = (m.len(), colsum.len());
        if i == rows {
            if colsum.iter().all(|&s| s == c) {
                out.push(m.clone());
            }
            return;
        }
        if j == cols - 1 {
            if colsum[j] + left <= c {
                m[i][j] = left;
                colsum[j] += left;
                rec(i + 1, 0, r, m, colsum, r, c, out);
                colsum[j] -= left;
                m[i][j] = 0;
            }
            return;
        }
        for v in 0..=left.min(c - colsum[j]) {
            m[i][j] = v;
            colsum[j] += v;
            rec(i, j + 1, left - v, m, colsum, r, c, out);
            colsum[j] -= v;
        }
        m[i][j] = 0;
    }
    rec(0, 0, r, &mut m, &mut colsum, r, c, &mut out);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub matrix: Vec<Vec<i64>>,
    pub d: Vec<u32>,
    pub convention: DualConvention,
    /// Number of locally free choices per bimodule, keyed `i→j` (1-based).
    pub block_choices: BTreeMap<String, usize>,
    pub assignments: u128,
    pub product_classes: Vec<usize>,
    pub simulations: usize,
    pub satisfying: u128,
    pub witness: Option<BTreeMap<String, Mult>>,
    pub trace: Vec<String>,
}

/// Blocks `(i, j)` with `b_ji > 0`, i.e. arrows `i → j`; rows sum to `b_ji`, columns to `−b_ij`.
fn blocks_of(b: &ExchangeMatrix) -> Vec<(usize, usize)> {
    let n = b.size();
    let mut v = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if b.get(j, i) > 0 {
                v.push((i, j));
            }
        }
    }
    v
}

/// Exhaustive search over all locally free multiplicity data realizing `b` with `Γ_i = Z/d_i`.
/// Factor pairs `(A_i3, A_3j)`-style are grouped by their tensor product; each combination of
/// product classes is checked by block-level mutation along the three sequences.
pub fn search_instance(b: &ExchangeMatrix, d: &[u32], conv: DualConvention, exec: Exec) -> InstanceReport {
    let groups: Vec<FiniteAbelianGroup> = d.iter().map(|&x| FiniteAbelianGroup::cyclic(x)).collect();
    let mut trace = Vec::new();
    let blocks = blocks_of(b);
    let mut choices: BTreeMap<(usize, usize), Vec<Mult>> = BTreeMap::new();
    let mut block_choices = BTreeMap::new();
    let mut assignments: u128 = 1;
    for &(i, j) in &blocks {
        let opts = locally_free_mults(d[i] as usize, d[j] as usize, b.get(j, i) as u32, (-b.get(i, j)) as u32);
        trace.push(format!("A_{}{}: {} locally free choices of shape {}×{}", i + 1, j + 1, opts.len(), d[i], d[j]));
        block_choices.insert(format!("{}→{}", i + 1, j + 1), opts.len());
        assignments *= opts.len() as u128;
        choices.insert((i, j), opts);
    }
    // factor pairs through the middle vertices 3, 4, 5, 6 (0-based 2..=5)
    let pairs: Vec<(usize, usize, usize)> = vec![(1, 2, 0), (1, 3, 0), (0, 4, 1), (0, 5, 1)];
    let mut classes: Vec<BTreeMap<Mult, (u128, (Mult, Mult))>> = Vec::new();
    for &(i, k, j) in &pairs {
        let mut map: BTreeMap<Mult, (u128, (Mult, Mult))> = BTreeMap::new();
        let empty = vec![];
        let left = choices.get(&(i, k)).unwrap_or(&empty);
        let right = choices.get(&(k, j)).unwrap_or(&empty);
        for x in left {
            for y in right {
                let p = mult_product(x, y);
                let e = map.entry(p).or_insert((0, (x.clone(), y.clone())));
                e.0 += 1;
            }
        }
        trace.push(format!("A_{}{} ⊗ A_{}{}: {} product classes", i + 1, k + 1, k + 1, j + 1, map.len()));
        classes.push(map);
    }
    let product_classes = classes.iter().map(|m| m.len()).collect();
    let build = |parts: &[(usize, &(Mult, Mult))]| {
        let mut sp = GroupSpecies::with_default_labels(groups.clone());
        for &(pi, (x, y)) in parts {
            let (i, k, j) = pairs[pi];
            sp.mult[i][k] = x.clone();
            sp.mult[k][j] = y.clone();
        }
        sp
    };
    let seqs: [(&[usize], &[usize]); 3] = [(&[2, 4], &[0, 2]), (&[3, 4], &[1, 2]), (&[2, 3, 5], &[0, 1, 3])];
    let mut sims = 0usize;
    // (3,5) and (4,5): compatible pairs of classes
    let mut ok35: Vec<Vec<bool>> = Vec::new();
    let mut ok45: Vec<Vec<bool>> = Vec::new();
    let c: Vec<Vec<(&Mult, &(u128, (Mult, Mult)))>> = classes.iter().map(|m| m.iter().collect()).collect();
    for ((seq, parts), store) in [(seqs[0], &mut ok35), (seqs[1], &mut ok45)] {
        let a = parts[0];
        let bb = parts[1];
        let rows: Vec<Vec<bool>> = exec.map(c[a].iter().collect::<Vec<_>>(), |(_, ca)| {
            c[bb].iter().map(|(_, cb)| mutate_blocks_seq(&build(&[(a, &ca.1), (bb, &cb.1)]), seq, conv).is_ok()).collect()
        });
        sims += c[a].len() * c[bb].len();
        *store = rows;
    }
    let mut first_obstruction: BTreeMap<String, usize> = BTreeMap::new();
    let mut satisfying: u128 = 0;
    let mut witness = None;
    for (i0, (_, c0)) in c[0].iter().enumerate() {
        for (i2, (_, c2)) in c[2].iter().enumerate() {
            if !ok35[i0][i2] {
                continue;
            }
            for (i1, (_, c1)) in c[1].iter().enumerate() {
                if !ok45[i1][i2] {
                    continue;
                }
                for (_, c3) in c[3].iter() {
                    sims += 1;
                    let sp = build(&[(0, &c0.1), (1, &c1.1), (3, &c3.1)]);
                    match mutate_blocks_seq(&sp, seqs[2].0, conv) {
                        Ok(_) => {
                            // confirm on the full species
                            let full = build(&[(0, &c0.1), (1, &c1.1), (2, &c2.1), (3, &c3.1)]);
                            sims += 3;
                            if seqs.iter().all(|(s, _)| mutate_blocks_seq(&full, s, conv).is_ok()) {
                                satisfying += c0.0 * c1.0 * c2.0 * c3.0;
                                if witness.is_none() {
                                    let mut w = BTreeMap::new();
                                    for (i, row) in full.mult.iter().enumerate() {
                                        for (j, m) in row.iter().enumerate() {
                                            if !is_zero(m) {
                                                w.insert(format!("{}→{}", i + 1, j + 1), m.clone());
                                            }
                                        }
                                    }
                                    witness = Some(w);
                                }
                            }
                        }
                        Err(e) => *first_obstruction.entry(e).or_insert(0) += 1,
                    }
                }
            }
        }
    }
    let pass35: usize = ok35.iter().flatten().filter(|&&x| x).count();
    let pass45: usize = ok45.iter().flatten().filter(|&&x| x).count();
    trace.push(format!("(3,5): {pass35} of {} class pairs cancel", c[0].len() * c[2].len()));
    trace.push(format!("(4,5): {pass45} of {} class pairs cancel", c[1].len() * c[2].len()));
    for (e, n) in first_obstruction {
        trace.push(format!("(3,4,6): {n} class combinations stop: {e}"));
    }
    trace.push(format!("satisfying assignments: {satisfying} of {assignments}"));
    InstanceReport {
        matrix: b.rows.clone(),
        d: d.to_vec(),
        convention: conv,
        block_choices,
        assignments,
        product_classes,
        simulations: sims,
        satisfying,
        witness,
        trace,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub scope: String,
    pub instances: Vec<InstanceReport>,
    pub controls: Vec<InstanceReport>,
}

impl CounterexampleReport {
    /// Empty satisfying sets for the matrix, nonempty for the controls.
    pub fn confirms(&self) -> bool {
        self.instances.iter().all(|r| r.satisfying == 0) && self.controls.iter().all(|r| r.satisfying > 0)
    }
}

pub fn counterexample_search(ms: &[u32], conv: DualConvention, exec: Exec) -> CounterexampleReport {
    let b = counterexample_matrix();
    let ctrl = control_matrix();
    let instances = ms.iter().map(|&m| search_instance(&b, &[2 * m, 2 * m, 2 * m, 2 * m, 2 * m, m], conv, exec)).collect();
    let controls = ms.iter().map(|&m| search_instance(&ctrl, &[2 * m; 6], conv, exec)).collect();
    CounterexampleReport { scope: SCOPE.into(), instances, controls }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locally_free_counts() {
        assert_eq!(locally_free_mults(2, 2, 1, 1).len(), 2);
        assert_eq!(locally_free_mults(4, 4, 1, 1).len(), 24);
        assert_eq!(locally_free_mults(4, 2, 1, 2).len(), 6);
        assert_eq!(locally_free_mults(2, 1, 1, 2), vec![vec![vec![1], vec![1]]]);
        assert!(locally_free_mults(2, 2, 1, 2).is_empty());
    }

    #[test]
    fn symmetrizer_of_the_matrix() {
        let d = crate::seed::find_skew_symmetrizer(&counterexample_matrix()).unwrap();
        assert_eq!(d, vec![2, 2, 2, 2, 2, 1]);
    }

    #[test]
    fn block_mutation_matches_matrix_mutation_when_it_cancels() {
        let b = control_matrix();
        let sp = crate::species::species_from_matrix(&b, &[1; 6]).unwrap();
        let m = mutate_blocks(&sp, 2, DualConvention::Transpose).unwrap();
        assert!(m.is_2_acyclic());
        assert_eq!(m.exchange_matrix().unwrap(), crate::seed::mutate_matrix(&b, 2).unwrap());
    }

    #[test]
    fn smallest_instance() {
        let r = counterexample_search(&[1], DualConvention::Transpose, Exec::Sequential);
        assert_eq!(r.instances[0].satisfying, 0);
        assert!(r.controls[0].satisfying > 0);
    }
}
