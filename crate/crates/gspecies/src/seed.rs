//! Skew-symmetrizable exchange matrices, Y-seeds and the combinatorial F/g recursion.

use crate::error::{GspError, Result};
use crate::poly::{IntPoly, SFRational, Tropical};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let labels = (1..=rows.len()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, rows)
    }

    pub fn with_labels(labels: Vec<String>, rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(GspError::Invalid("exchange matrix must be square with one label per row".into()));
        }
        Ok(ExchangeMatrix { labels, rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.size() {
            Err(GspError::IndexOutOfRange { index: k, size: self.size() })
        } else {
            Ok(())
        }
    }

    /// Position of a vertex label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GspError::Invalid(format!("unknown vertex label {label}")))
    }
}

/// Minimal positive d with `b_ij d_j = -b_ji d_i`, normalised to gcd 1 per connected component.
pub fn find_skew_symmetrizer(b: &ExchangeMatrix) -> Result<Vec<i64>> {
    let n = b.size();
    for i in 0..n {
        if b.get(i, i) != 0 {
            return Err(GspError::NotSkewSymmetrizable { reason: "nonzero diagonal entry".into(), i, j: i });
        }
        for j in 0..n {
            let (x, y) = (b.get(i, j), b.get(j, i));
            if (x == 0) != (y == 0) || (x != 0 && x.signum() == y.signum()) {
                return Err(GspError::NotSkewSymmetrizable { reason: "sign pattern violation".into(), i, j });
            }
        }
    }
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; n];
    let mut comp = vec![usize::MAX; n];
    let mut out = vec![0i64; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Ratio::one());
        comp[start] = start;
        let mut stack = vec![start];
        let mut members = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if b.get(i, j) == 0 {
                    continue;
                }
                // d_j = -b_ji d_i / b_ij
                let dj = d[i].unwrap() * Ratio::new(-b.get(j, i), b.get(i, j));
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        comp[j] = start;
                        members.push(j);
                        stack.push(j);
                    }
                    Some(old) if old != dj => {
                        return Err(GspError::NotSkewSymmetrizable { reason: "inconsistent cycle of ratios".into(), i, j });
                    }
                    _ => {}
                }
            }
        }
        let lcm = members.iter().fold(1i64, |acc, &m| acc.lcm(d[m].unwrap().denom()));
        let ints: Vec<i64> = members.iter().map(|&m| (d[m].unwrap() * lcm).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x));
        for (&m, v) in members.iter().zip(ints) {
            out[m] = v / g;
        }
    }
    Ok(out)
}

pub fn check_symmetrizer(b: &ExchangeMatrix, d: &[i64]) -> Result<()> {
    if d.len() != b.size() {
        return Err(GspError::Invalid("symmetrizer length mismatch".into()));
    }
    for i in 0..b.size() {
        if d[i] <= 0 {
            return Err(GspError::SymmetrizerMismatch { i, j: i });
        }
        for j in 0..b.size() {
            if b.get(i, j) * d[j] != -b.get(j, i) * d[i] {
                return Err(GspError::SymmetrizerMismatch { i, j });
            }
        }
    }
    Ok(())
}

pub fn mutate_matrix(b: &ExchangeMatrix, k: usize) -> Result<ExchangeMatrix> {
    b.check_index(k)?;
    let n = b.size();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            rows[i][j] = if i == k || j == k {
                -b.get(i, j)
            } else {
                let (bik, bkj) = (b.get(i, k), b.get(k, j));
                b.get(i, j) + (bik * bkj.abs() + bik.abs() * bkj) / 2
            };
        }
    }
    Ok(ExchangeMatrix { labels: b.labels.clone(), rows })
}

pub fn mutate_matrix_seq(b: &ExchangeMatrix, seq: &[usize]) -> Result<ExchangeMatrix> {
    seq.iter().try_fold(b.clone(), |m, &k| mutate_matrix(&m, k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YSeed {
    pub vars: Vec<SFRational>,
    pub matrix: ExchangeMatrix,
}

impl YSeed {
    /// The seed whose variables are the free generators z_1..z_n.
    pub fn free(matrix: ExchangeMatrix) -> Self {
        let n = matrix.size();
        YSeed { vars: (0..n).map(|i| SFRational::var(n, i)).collect(), matrix }
    }
}

/// `y'_k = y_k^{-1}`, `y'_i = y_i y_k^{max(0,b_ki)} (1+y_k)^{-b_ki}`.
pub fn y_seed_mutate(seed: &YSeed, k: usize) -> Result<YSeed> {
    let b = &seed.matrix;
    b.check_index(k)?;
    let yk = &seed.vars[k];
    let one_plus = yk.one_plus();
    let vars = (0..b.size())
        .map(|i| {
            if i == k {
                yk.inv()
            } else {
                let bki = b.get(k, i);
                if bki == 0 {
                    seed.vars[i].clone()
                } else {
                    seed.vars[i].mul(&yk.powi(bki.max(0))).mul(&one_plus.powi(-bki))
                }
            }
        })
        .collect();
    Ok(YSeed { vars, matrix: mutate_matrix(b, k)? })
}

/// `ȟ` of F̌ by tropical evaluation at `z_i ↦ Z_i^{-1} ∏_{j≠i} Z_j^{max(0,-b_ji)}`.
pub fn tropical_h_from_f(f: &IntPoly, b: &ExchangeMatrix) -> Result<Vec<i64>> {
    let n = b.size();
    let args: Vec<Tropical> = (0..n)
        .map(|i| {
            Tropical(
                (0..n)
                    .map(|j| if j == i { -1 } else { (-b.get(j, i)).max(0) })
                    .collect(),
            )
        })
        .collect();
    Ok(Tropical::eval(f, &args)?.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGPair {
    pub f: IntPoly,
    pub g: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGState {
    pub matrix: ExchangeMatrix,
    pub tracked: Vec<FGPair>,
}

impl FGState {
    /// Negative simples: `(1, e_j)` for every vertex.
    pub fn initial(matrix: ExchangeMatrix) -> Self {
        let n = matrix.size();
        let tracked = (0..n)
            .map(|j| {
                let mut g = vec![0; n];
                g[j] = 1;
                FGPair { f: IntPoly::one(n), g }
            })
            .collect();
        FGState { matrix, tracked }
    }
}

/// One step of the recursion at `k`, using the current matrix for ȟ and the ǧ update.
pub fn fg_mutate_pair(pair: &FGPair, b: &ExchangeMatrix, k: usize) -> Result<FGPair> {
    b.check_index(k)?;
    let n = b.size();
    let h = tropical_h_from_f(&pair.f, b)?;
    let h_new: Vec<i64> = h.iter().zip(&pair.g).map(|(a, c)| a - c).collect();
    // z = μ_k^{B'}(w): the inverse substitution expressed in the new variables w
    let b_new = mutate_matrix(b, k)?;
    let z_of_w = y_seed_mutate(&YSeed::free(b_new), k)?.vars;
    let f_z = SFRational::eval_poly(&pair.f, &z_of_w);
    let zk1 = z_of_w[k].one_plus();
    let wk1 = SFRational::var(n, k).one_plus();
    let value = zk1.powi(h[k]).mul(&f_z).div(&wk1.powi(h_new[k]));
    let f = value.as_polynomial().ok_or(GspError::NonPolynomialResult { vertex: k })?;
    let gk = pair.g[k];
    let g = (0..n)
        .map(|j| if j == k { -gk } else { pair.g[j] + b.get(j, k).max(0) * gk - b.get(j, k) * h[k] })
        .collect();
    Ok(FGPair { f, g })
}

pub fn fg_mutate(state: &FGState, k: usize) -> Result<FGState> {
    let tracked = state.tracked.iter().map(|p| fg_mutate_pair(p, &state.matrix, k)).collect::<Result<Vec<_>>>()?;
    Ok(FGState { matrix: mutate_matrix(&state.matrix, k)?, tracked })
}

/// `(F^B_{j;seq}, g^B_{j;seq})` for every vertex j: start from the negative simples at the
/// far seed `μ_{i_n}…μ_{i_1}(B)` and mutate back along `i_n, …, i_1`.
pub fn compute_fg_all(b: &ExchangeMatrix, seq: &[usize]) -> Result<Vec<FGPair>> {
    let far = mutate_matrix_seq(b, seq)?;
    let mut state = FGState::initial(far);
    for &k in seq.iter().rev() {
        state = fg_mutate(&state, k)?;
    }
    debug_assert_eq!(state.matrix, *b);
    Ok(state.tracked)
}

pub fn compute_fg(b: &ExchangeMatrix, seq: &[usize], k: usize) -> Result<FGPair> {
    b.check_index(k)?;
    for &s in seq {
        b.check_index(s)?;
    }
    let far = mutate_matrix_seq(b, seq)?;
    let mut pair = FGState::initial(far.clone()).tracked.swap_remove(k);
    let mut matrices = vec![b.clone()];
    for &s in seq {
        let next = mutate_matrix(matrices.last().unwrap(), s)?;
        matrices.push(next);
    }
    for (pos, &s) in seq.iter().enumerate().rev() {
        pair = fg_mutate_pair(&pair, &matrices[pos + 1], s)?;
    }
    Ok(pair)
}

/// Independent route: principal-coefficient seed mutation with exchange relations,
/// cluster variables kept as rational functions in `x_1..x_n, y_1..y_n`.
pub fn principal_fg(b: &ExchangeMatrix, seq: &[usize], k: usize) -> Result<FGPair> {
    let n = b.size();
    let nv = 2 * n;
    let mut bt: Vec<Vec<i64>> = b.rows.clone();
    for i in 0..n {
        let mut row = vec![0; n];
        row[i] = 1;
        bt.push(row);
    }
    let mut x: Vec<SFRational> = (0..n).map(|i| SFRational::var(nv, i)).collect();
    let mono = |col: &dyn Fn(usize) -> i64| {
        let mut e = vec![0u32; nv];
        for (r, slot) in e.iter_mut().enumerate().skip(n) {
            *slot = col(r).max(0) as u32;
        }
        e
    };
    for &m in seq {
        b.check_index(m)?;
        let mut pos = SFRational::one(nv);
        let mut neg = SFRational::one(nv);
        for i in 0..n {
            let c = bt[i][m];
            if c > 0 {
                pos = pos.mul(&x[i].powi(c));
            } else if c < 0 {
                neg = neg.mul(&x[i].powi(-c));
            }
        }
        let ypos = SFRational::from_poly(IntPoly::monomial(mono(&|r| bt[r][m]), BigInt::one()));
        let yneg = SFRational::from_poly(IntPoly::monomial(mono(&|r| -bt[r][m]), BigInt::one()));
        x[m] = pos.mul(&ypos).add(&neg.mul(&yneg)).div(&x[m]);
        let rows = mutate_extended(&bt, m, n);
        bt = rows;
    }
    let xk = &x[k];
    // denominator is a monomial in x
    let den = xk.den();
    if den.terms().len() != 1 {
        return Err(GspError::Invalid("principal-coefficient oracle produced a non-Laurent variable".into()));
    }
    let (den_exp, den_c) = den.terms().iter().next().unwrap();
    let mut f = IntPoly::zero(n);
    let mut g = None;
    for (e, c) in xk.num().terms() {
        let c = c / den_c;
        let ye: Vec<u32> = e[n..].to_vec();
        if ye.iter().all(|&v| v == 0) {
            g = Some((0..n).map(|i| e[i] as i64 - den_exp[i] as i64).collect::<Vec<_>>());
        }
        f.add_term(ye, c);
    }
    let g = g.ok_or_else(|| GspError::Invalid("no y-free term in cluster variable".into()))?;
    Ok(FGPair { f, g })
}

fn mutate_extended(bt: &[Vec<i64>], k: usize, n: usize) -> Vec<Vec<i64>> {
    let m = bt.len();
    let mut out = vec![vec![0i64; n]; m];
    for i in 0..m {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -bt[i][j]
            } else {
                let (bik, bkj) = (bt[i][k], bt[k][j]);
                bt[i][j] + (bik * bkj.abs() + bik.abs() * bkj) / 2
            };
        }
    }
    out
}

/// Variables are grouped: `groups[v]` lists the global character indices of vertex v.
/// Φ sends `y_{i,ρ}` to `z_i`.
/// Coefficient-free exchange relations `x'_k x_k = ∏ x_i^{[b_ik]_+} + ∏ x_i^{[-b_ik]_+}`,
/// applied along `seq` from the initial cluster; returns `x_{k;seq}`.
pub fn cluster_variable(b: &ExchangeMatrix, seq: &[usize], k: usize) -> Result<SFRational> {
    b.check_index(k)?;
    let n = b.size();
    let mut x: Vec<SFRational> = (0..n).map(|i| SFRational::var(n, i)).collect();
    let mut cur = b.clone();
    for &s in seq {
        cur.check_index(s)?;
        let mut plus = SFRational::one(n);
        let mut minus = SFRational::one(n);
        for i in 0..n {
            let bis = cur.get(i, s);
            if bis > 0 {
                plus = plus.mul(&x[i].powi(bis));
            } else if bis < 0 {
                minus = minus.mul(&x[i].powi(-bis));
            }
        }
        x[s] = plus.add(&minus).div(&x[s]);
        cur = mutate_matrix(&cur, s)?;
    }
    Ok(x.swap_remove(k))
}

pub fn specialize_poly(p: &IntPoly, char_vertex: &[usize], nverts: usize) -> IntPoly {
    p.collapse(char_vertex, nverts)
}

pub fn specialize(r: &SFRational, char_vertex: &[usize], nverts: usize) -> SFRational {
    r.collapse(char_vertex, nverts)
}

/// Constant term 1 and a unique divisibility-maximal monomial with coefficient 1.
pub fn f_shape_ok(f: &IntPoly) -> (bool, bool) {
    let constant = f.constant_term().is_one();
    let max = f.maximal_monomials();
    let unique = max.len() == 1 && max[0].1.is_one();
    (constant, unique)
}

pub fn int_det(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    // Bareiss fraction-free elimination
    let mut a = m;
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

pub fn is_sign_coherent(vectors: &[Vec<i64>]) -> bool {
    let n = vectors.first().map_or(0, |v| v.len());
    (0..n).all(|c| {
        let pos = vectors.iter().any(|v| v[c] > 0);
        let neg = vectors.iter().any(|v| v[c] < 0);
        !(pos && neg)
    })
}

pub fn abs_det_is_one(vectors: &[Vec<i64>]) -> bool {
    int_det(vectors).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> ExchangeMatrix {
        ExchangeMatrix::new(vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 2, 0]]).unwrap()
    }

    fn poly(n: usize, terms: &[&[u32]]) -> IntPoly {
        IntPoly::from_terms(n, terms.iter().map(|e| (e.to_vec(), BigInt::one())))
    }

    #[test]
    fn symmetrizer_examples() {
        assert_eq!(find_skew_symmetrizer(&c3()).unwrap(), vec![1, 1, 2]);
        assert_eq!(find_skew_symmetrizer(&ExchangeMatrix::new(vec![vec![0]]).unwrap()).unwrap(), vec![1]);
        let bad = ExchangeMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(find_skew_symmetrizer(&bad), Err(GspError::NotSkewSymmetrizable { .. })));
    }

    #[test]
    fn matrix_mutation_examples() {
        let m = mutate_matrix(&c3(), 1).unwrap();
        assert_eq!(m.rows, vec![vec![0, 1, -1], vec![-1, 0, 1], vec![2, -2, 0]]);
        assert_eq!(mutate_matrix(&m, 1).unwrap(), c3());
        let one = ExchangeMatrix::new(vec![vec![0]]).unwrap();
        assert_eq!(mutate_matrix(&one, 0).unwrap(), one);
    }

    #[test]
    fn y_seed_example_and_involution() {
        let s = YSeed::free(c3());
        let t = y_seed_mutate(&s, 2).unwrap();
        let z2 = SFRational::var(3, 1);
        let z3 = SFRational::var(3, 2);
        assert_eq!(t.vars[2], z3.inv());
        assert_eq!(t.vars[1], z2.mul(&z3.powi(2)).div(&z3.one_plus().powi(2)));
        assert_eq!(t.vars[0], SFRational::var(3, 0));
        assert_eq!(y_seed_mutate(&t, 2).unwrap(), s);
    }

    #[test]
    fn tropical_h_examples() {
        let one = ExchangeMatrix::new(vec![vec![0]]).unwrap();
        assert_eq!(tropical_h_from_f(&poly(1, &[&[0], &[1]]), &one).unwrap(), vec![-1]);
        assert_eq!(tropical_h_from_f(&IntPoly::one(3), &c3()).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn c3_golden_pair() {
        let p = compute_fg(&c3(), &[1, 0, 2], 2).unwrap();
        assert_eq!(p.f, poly(3, &[&[0, 0, 0], &[0, 0, 1], &[0, 1, 1], &[1, 1, 1]]));
        assert_eq!(p.g, vec![0, 0, -1]);
        assert_eq!(principal_fg(&c3(), &[1, 0, 2], 2).unwrap(), p);
    }

    #[test]
    fn empty_sequence_gives_negative_simple() {
        let p = compute_fg(&c3(), &[], 1).unwrap();
        assert!(p.f.is_one());
        assert_eq!(p.g, vec![0, 1, 0]);
    }

    #[test]
    fn rank_two_single_step_matches_oracle() {
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-2, 0]]).unwrap();
        let p = compute_fg(&b, &[0], 0).unwrap();
        assert_eq!(p.f, poly(2, &[&[0, 0], &[1, 0]]));
        assert_eq!(p.g, vec![-1, 2]);
        assert_eq!(principal_fg(&b, &[0], 0).unwrap(), p);
    }

    #[test]
    fn all_vertices_agree_with_single_tracking() {
        let all = compute_fg_all(&c3(), &[0, 2, 1]).unwrap();
        for (k, pair) in all.iter().enumerate() {
            assert_eq!(*pair, compute_fg(&c3(), &[0, 2, 1], k).unwrap());
        }
    }

    #[test]
    fn integer_determinant() {
        assert_eq!(int_det(&[vec![2, 1], vec![1, 1]]), BigInt::one());
        assert_eq!(int_det(&[vec![0, 1], vec![1, 0]]), -BigInt::one());
    }
}
