//! Instance builders shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qspectral::data_graph::SimilarityGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| r.sample(StandardNormal));
    g.qr().q()
}

/// Symmetric matrix with the given spectrum in a random eigenbasis.
pub fn with_spectrum(values: &[f64], seed: u64) -> DMatrix<f64> {
    let q = random_orthogonal(values.len(), seed);
    let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(values)) * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Small connected graphs with integer Laplacian spectra and degree at most 3:
/// K1, K2, K3, K4, P3, K1,3, C4 and K4 minus an edge.
pub fn piece(id: usize) -> (usize, Vec<(usize, usize)>) {
    match id {
        0 => (1, vec![]),
        1 => (2, vec![(0, 1)]),
        2 => (3, vec![(0, 1), (1, 2), (0, 2)]),
        3 => (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        4 => (3, vec![(0, 1), (1, 2)]),
        5 => (4, vec![(0, 1), (0, 2), (0, 3)]),
        6 => (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
        7 => (4, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]),
        _ => unreachable!(),
    }
}

/// Pieces whose smallest nonzero Laplacian eigenvalue is at least 2.
pub const GAPPED_PIECES: [usize; 5] = [1, 2, 3, 6, 7];

/// Disjoint union of random pieces on `n` shuffled nodes (`d = 4`).
///
/// Returns the graph and its number of components. At most `max_components`
/// pieces are used; size-4 pieces fill the rest.
pub fn piece_union(n: usize, max_components: usize, pieces: &[usize], seed: u64) -> (SimilarityGraph, usize) {
    let mut r = rng(seed);
    for _ in 0..10_000 {
        let smallest = pieces.iter().map(|&id| piece(id).0).min().expect("pieces");
        let mut sizes = Vec::new();
        let mut used = 0;
        while n - used >= smallest {
            let id = pieces[r.random_range(0..pieces.len())];
            let (size, _) = piece(id);
            if used + size <= n {
                sizes.push(id);
                used += size;
            }
        }
        if used < n || sizes.len() > max_components {
            continue;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let mut edges = Vec::new();
        let mut offset = 0;
        for &id in &sizes {
            let (size, local) = piece(id);
            for (a, b) in local {
                edges.push((perm[offset + a], perm[offset + b]));
            }
            offset += size;
        }
        return (SimilarityGraph::from_edges(n, 4, edges).expect("valid pieces"), sizes.len());
    }
    panic!("no union of {pieces:?} fills {n} nodes with at most {max_components} components");
}

/// Random graph on `n` nodes with degree at most `d - 1`.
pub fn random_graph(n: usize, d: usize, edges: usize, seed: u64) -> SimilarityGraph {
    let mut r = rng(seed);
    let mut deg = vec![0usize; n];
    let mut list = Vec::new();
    for _ in 0..edges * 10 {
        if list.len() == edges {
            break;
        }
        let (a, b) = (r.random_range(0..n), r.random_range(0..n));
        let (a, b) = (a.min(b), a.max(b));
        if a == b || deg[a] + 1 >= d || deg[b] + 1 >= d || list.contains(&(a, b)) {
            continue;
        }
        deg[a] += 1;
        deg[b] += 1;
        list.push((a, b));
    }
    SimilarityGraph::from_edges(n, d, list).expect("degree bounded")
}
