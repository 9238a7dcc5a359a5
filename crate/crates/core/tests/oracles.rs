//! Persistence checked against independent brute-force oracles.

use asgap::ela::pairwise_distances;
use asgap::tla::{h0_diagram, vr_persistence, PersistenceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    // half from Euclidean points, half arbitrary symmetric weights
    if rng.random::<bool>() {
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| rng.random()).collect()).collect();
        pairwise_distances(&pts)
    } else {
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v: f64 = rng.random_range(0.01..1.0);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        d
    }
}

/// Repeatedly add the globally shortest edge joining two different
/// components (component labels relabelled by brute force).
fn mst_weights(d: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    let mut label: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    while out.len() + 1 < n {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..n {
            for j in 0..n {
                if label[i] != label[j] && d[i][j] < best.0 {
                    best = (d[i][j], i, j);
                }
            }
        }
        let (w, i, j) = best;
        let (from, to) = (label[j], label[i]);
        for l in label.iter_mut() {
            if *l == from {
                *l = to;
            }
        }
        out.push(w);
    }
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn h0_deaths_are_mst_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(1..=50);
        let d = random_matrix(&mut rng, n);
        let diagram = h0_diagram(&d);
        assert_eq!(diagram.pairs.len(), n);
        assert_eq!(diagram.pairs.iter().filter(|p| p.death.is_infinite()).count(), 1);
        let mut deaths: Vec<f64> = diagram.pairs.iter().map(|p| p.death).filter(|v| v.is_finite()).collect();
        deaths.sort_by(f64::total_cmp);
        assert_eq!(deaths, mst_weights(&d));
    }
}

/// Rank over Z/2 by Gaussian elimination on dense 0/1 rows.
fn rank_mod2(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// dim H1 of the Rips complex at scale t, from explicit simplex lists.
fn betti_1(d: &[Vec<f64>], t: f64) -> usize {
    let n = d.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| d[i][j] <= t)
        .collect();
    let triangles: Vec<[usize; 3]> = (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| [i, j, k])))
        .filter(|&[i, j, k]| d[i][j] <= t && d[i][k] <= t && d[j][k] <= t)
        .collect();
    let b1: Vec<Vec<u8>> = edges
        .iter()
        .map(|&(i, j)| (0..n).map(|v| u8::from(v == i || v == j)).collect())
        .collect();
    let b2: Vec<Vec<u8>> = triangles
        .iter()
        .map(|&[i, j, k]| {
            edges
                .iter()
                .map(|&e| u8::from(e == (i, j) || e == (i, k) || e == (j, k)))
                .collect()
        })
        .collect();
    let cycles = edges.len() - if edges.is_empty() { 0 } else { rank_mod2(b1) };
    cycles - if triangles.is_empty() { 0 } else { rank_mod2(b2) }
}

#[test]
fn h1_matches_simplicial_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = PersistenceConfig {
        max_dim: 1,
        ..PersistenceConfig::default()
    };
    for _ in 0..300 {
        let n = rng.random_range(2..=6);
        let d = random_matrix(&mut rng, n);
        let h1 = vr_persistence(&d, &cfg).unwrap().remove(1);
        let mut scales: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(|j| d[i][j]).collect::<Vec<_>>()).collect();
        scales.push(0.0);
        scales.sort_by(f64::total_cmp);
        for t in scales {
            let alive = h1.pairs.iter().filter(|p| p.birth <= t && t < p.death).count();
            assert_eq!(alive, betti_1(&d, t), "n={n}, t={t}, pairs={:?}", h1.pairs);
        }
    }
}

#[test]
fn square_has_one_loop() {
    let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let d = pairwise_distances(&pts);
    let cfg = PersistenceConfig {
        max_dim: 1,
        ..PersistenceConfig::default()
    };
    let h1 = &vr_persistence(&d, &cfg).unwrap()[1];
    assert_eq!(h1.pairs.len(), 1);
    assert_eq!(h1.pairs[0].birth, 1.0);
    assert!((h1.pairs[0].death - 2f64.sqrt()).abs() < 1e-15);
}
