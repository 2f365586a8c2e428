use std::collections::VecDeque;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};

/// Unit-weight undirected graph with neighborhood parameter `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityGraph {
    n_nodes: usize,
    d: usize,
    /// Sorted `(i, j)` pairs with `i < j`.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SimilarityGraph {
    /// Builds a graph from an explicit edge list. Every node must have degree
    /// at most `d - 1` so the Laplacian stays `d`-sparse.
    pub fn from_edges(
        n_nodes: usize,
        d: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DataError> {
        if d < 2 {
            return Err(DataError::BadNeighborhood { d, n: n_nodes });
        }
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n_nodes || b >= n_nodes {
                return Err(DataError::BadEdge(a, b));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for (node, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.len() > d - 1 {
                return Err(DataError::DegreeTooHigh { node, degree: nbrs.len(), d });
            }
        }
        Ok(Self { n_nodes, d, edges: list, adjacency })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Writes the debug edge list, one `i,j` pair per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (a, b) in &self.edges {
            writeln!(out, "{a},{b}")?;
        }
        Ok(())
    }
}

/// Indices of the `count` nearest other points to `i`, ranked by squared
/// Euclidean distance with ties broken by lower index.
pub fn nearest_neighbors(points: &[Vec<f64>], i: usize, count: usize) -> Vec<usize> {
    let p = &points[i];
    let mut ranked: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, q)| (p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), j))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked.truncate(count);
    ranked.into_iter().map(|(_, j)| j).collect()
}

/// Mutual `(d-1)`-nearest-neighbor graph: `i ~ j` iff each is among the
/// other's `d - 1` nearest neighbors.
pub fn build_knn_graph(data: &Dataset, d: usize) -> Result<SimilarityGraph, DataError> {
    let n = data.len();
    if d < 2 || d > n {
        return Err(DataError::BadNeighborhood { d, n });
    }
    // per-row results are collected in index order, so thread count cannot
    // change the graph
    let nn: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut v = nearest_neighbors(&data.points, i, d - 1);
            v.sort_unstable();
            v
        })
        .collect();
    let mut edges = Vec::new();
    for (i, list) in nn.iter().enumerate() {
        for &j in list {
            if i < j && nn[j].binary_search(&i).is_ok() {
                edges.push((i, j));
            }
        }
    }
    SimilarityGraph::from_edges(n, d, edges)
}

/// Connected components by breadth-first search. Labels are assigned in
/// order of each component's lowest node index.
pub fn connected_components(graph: &SimilarityGraph) -> (usize, Vec<usize>) {
    let n = graph.n_nodes();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in graph.neighbors(u) {
                if labels[v] == usize::MAX {
                    labels[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (count, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_graph::{BoundingBox, DatasetKind};

    pub(crate) fn dataset_from(points: Vec<Vec<f64>>) -> Dataset {
        let n = points.len();
        Dataset {
            bbox: BoundingBox { min: vec![-1e9; points[0].len()], max: vec![1e9; points[0].len()] },
            points,
            seed: 0,
            kind: DatasetKind::File,
            original_len: n,
            pad_indices: vec![],
            truth: None,
        }
    }

    #[test]
    fn identical_pair_is_connected() {
        let ds = dataset_from(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let g = build_knn_graph(&ds, 2).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        let ds = dataset_from(vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![9.0, 9.0], vec![9.5, 9.0]]);
        let g = build_knn_graph(&ds, 2).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
    }

    /// Independent oracle: full distance matrix and explicit rank test.
    fn brute_force_mutual(points: &[Vec<f64>], d: usize) -> Vec<(usize, usize)> {
        let n = points.len();
        let dist = |a: usize, b: usize| -> f64 {
            points[a].iter().zip(&points[b]).map(|(x, y)| (x - y).powi(2)).sum()
        };
        // j is among i's (d-1) nearest iff fewer than d-1 others strictly precede it
        let is_near = |i: usize, j: usize| -> bool {
            let ahead = (0..n)
                .filter(|&m| m != i && m != j)
                .filter(|&m| dist(i, m) < dist(i, j) || (dist(i, m) == dist(i, j) && m < j))
                .count();
            ahead < d - 1
        };
        let mut out = vec![];
        for i in 0..n {
            for j in i + 1..n {
                if is_near(i, j) && is_near(j, i) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn unit_line_matches_brute_force() {
        let ds = dataset_from((0..8).map(|i| vec![i as f64]).collect());
        let g = build_knn_graph(&ds, 3).unwrap();
        let oracle = brute_force_mutual(&ds.points, 3);
        assert_eq!(g.edges(), oracle.as_slice());
        // path 0-1-...-7 with tie breaking: node i's two nearest are i-1, i+1
        let path: Vec<(usize, usize)> = (0..7).map(|i| (i, i + 1)).collect();
        assert_eq!(g.edges(), path.as_slice());
    }

    #[test]
    fn rejects_bad_d() {
        let ds = dataset_from((0..8).map(|i| vec![i as f64]).collect());
        assert!(build_knn_graph(&ds, 1).is_err());
        assert!(build_knn_graph(&ds, 9).is_err());
        assert!(build_knn_graph(&ds, 8).is_ok());
    }

    #[test]
    fn components_of_edgeless_graph() {
        let g = SimilarityGraph::from_edges(4, 3, []).unwrap();
        assert_eq!(connected_components(&g), (4, vec![0, 1, 2, 3]));
    }

    #[test]
    fn edge_list_format() {
        let g = SimilarityGraph::from_edges(3, 3, [(2, 1), (0, 1)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0,1\n1,2\n");
    }

    #[test]
    fn degree_bound_enforced() {
        let err = SimilarityGraph::from_edges(4, 2, [(0, 1), (0, 2)]).unwrap_err();
        assert!(matches!(err, DataError::DegreeTooHigh { node: 0, degree: 2, d: 2 }));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn random_clouds_match_oracle(
            pts in prop::collection::vec((-5i32..5, -5i32..5), 6..20),
            d in 2usize..5,
        ) {
            let points: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x as f64, y as f64]).collect();
            let ds = dataset_from(points);
            let g = build_knn_graph(&ds, d).unwrap();
            let oracle = brute_force_mutual(&ds.points, d);
            prop_assert_eq!(g.edges(), oracle.as_slice());
            for node in 0..g.n_nodes() {
                prop_assert!(g.degree(node) < d);
            }
        }
    }
}
