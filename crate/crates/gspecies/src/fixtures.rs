//! Shipped examples and seeded random inputs.

use crate::gsp::{Arrow, Gsp, Potential};
use crate::linalg::q;
use crate::mutation::sample_potential;
use crate::seed::ExchangeMatrix;
use crate::species::{c3_species, species_from_matrix, FiniteAbelianGroup, GroupSpecies};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_TRUNC: usize = 8;

pub fn c3_matrix() -> ExchangeMatrix {
    ExchangeMatrix::new(vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 2, 0]]).unwrap()
}

pub fn c3_gsp() -> Gsp {
    Gsp::from_species(&c3_species(), DEFAULT_TRUNC)
}

pub fn rank2_matrix() -> ExchangeMatrix {
    ExchangeMatrix::new(vec![vec![0, 1], vec![-2, 0]]).unwrap()
}

pub fn rank2_gsp() -> Gsp {
    Gsp::from_species(&species_from_matrix(&rank2_matrix(), &[1, 2]).unwrap(), DEFAULT_TRUNC)
}

/// Oriented 3-cycle `a b c` with trivial groups and potential `abc`.
pub fn three_cycle_gsp() -> Gsp {
    let mut s = Potential::zero();
    s.add_cycle(&[0, 1, 2], q(1));
    Gsp {
        labels: vec!["1".into(), "2".into(), "3".into()],
        groups: vec![FiniteAbelianGroup::trivial(); 3],
        arrows: vec![
            Arrow { id: "a".into(), src: 0, tgt: 1 },
            Arrow { id: "b".into(), src: 1, tgt: 2 },
            Arrow { id: "c".into(), src: 2, tgt: 0 },
        ],
        potential: s,
        trunc: DEFAULT_TRUNC,
    }
}

/// Examples checked by the involution and compatibility suites.
pub fn shipped() -> Vec<(String, Gsp)> {
    vec![("c3".into(), c3_gsp()), ("rank2".into(), rank2_gsp()), ("three-cycle".into(), three_cycle_gsp())]
}

fn species(groups: &[Vec<u32>], mults: &[(usize, usize, Vec<Vec<u32>>)]) -> GroupSpecies {
    let mut sp = GroupSpecies::with_default_labels(groups.iter().map(|f| FiniteAbelianGroup::new(f.clone()).unwrap()).collect());
    for (i, j, m) in mults {
        sp.set(*i, *j, m.clone()).unwrap();
    }
    sp
}

/// Species with group orders at most 4 used by the group-basis derivative oracle.
pub fn oracle_species() -> Vec<(String, GroupSpecies)> {
    vec![
        ("z2-z2".into(), species(&[vec![2], vec![2]], &[(0, 1, vec![vec![1, 0], vec![0, 1]]), (1, 0, vec![vec![0, 1], vec![1, 0]])])),
        (
            "z4-1-z3".into(),
            species(
                &[vec![4], vec![], vec![3]],
                &[
                    (0, 1, vec![vec![1], vec![0], vec![1], vec![0]]),
                    (1, 2, vec![vec![1, 1, 0]]),
                    (2, 0, vec![vec![1, 0, 0, 1], vec![0, 1, 0, 0], vec![0, 0, 1, 0]]),
                ],
            ),
        ),
        (
            "z2z2-z2-1".into(),
            species(
                &[vec![2, 2], vec![2], vec![]],
                &[
                    (0, 1, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![0, 0]]),
                    (1, 2, vec![vec![1], vec![1]]),
                    (2, 0, vec![vec![1, 1, 0, 1]]),
                ],
            ),
        ),
        (
            "z3-z4".into(),
            species(
                &[vec![3], vec![4]],
                &[
                    (0, 1, vec![vec![1, 0, 0, 1], vec![0, 1, 0, 0], vec![0, 0, 1, 0]]),
                    (1, 0, vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 0], vec![1, 0, 0]]),
                ],
            ),
        ),
    ]
}

/// `B = D S` with `S` skew-symmetric, entries of `S` in `-2..=2`, `d_i ∈ {1, 2}`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> (ExchangeMatrix, Vec<i64>) {
    let d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let mut s = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.gen_range(-2..=2);
            s[i][j] = x;
            s[j][i] = -x;
        }
    }
    let rows = (0..n).map(|i| (0..n).map(|j| d[i] * s[i][j]).collect()).collect();
    (ExchangeMatrix::new(rows).unwrap(), d)
}

/// Locally free GSP from a random matrix, with a random integer potential on cycles of length ≤ 4.
pub fn random_gsp(rng: &mut ChaCha8Rng, trunc: usize) -> Gsp {
    let n = rng.gen_range(2..=4);
    let (b, d) = random_matrix(rng, n);
    let mut g = Gsp::from_species(&species_from_matrix(&b, &d).unwrap(), trunc);
    g.potential = sample_potential(&g, 4.min(trunc), 3, rng);
    g
}

pub fn random_gsps(count: usize, seed: u64, trunc: usize) -> Vec<Gsp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_gsp(&mut rng, trunc)).collect()
}
