use nalgebra::DMatrix;
use rand::Rng;

use super::{ClassicalError, Partition};
use crate::seeding;

pub const MAX_LLOYD_ITERATIONS: usize = 300;

/// Result of a Lloyd run.
#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub partition: Partition,
    /// `k × dim` centroid matrix.
    pub centroids: DMatrix<f64>,
    /// Within-cluster sum of squares after every assignment step.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
}

impl KMeansFit {
    pub fn inertia(&self) -> f64 {
        self.inertia_trace.last().copied().unwrap_or(0.0)
    }
}

fn sq_dist(rows: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    rows.row(i).iter().zip(centroids.row(c).iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// k-means++ seeding: first centroid uniform, then proportional to squared
/// distance from the nearest chosen centroid.
fn seed_centroids<R: Rng>(rows: &DMatrix<f64>, k: usize, rng: &mut R) -> DMatrix<f64> {
    let n = rows.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut best: Vec<f64> = (0..n)
        .map(|i| rows.row(i).iter().zip(rows.row(chosen[0]).iter()).map(|(a, b)| (a - b).powi(2)).sum())
        .collect();
    while chosen.len() < k {
        let total: f64 = best.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in best.iter().enumerate() {
                if w > 0.0 && target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            while best[pick] == 0.0 {
                pick -= 1;
            }
            pick
        } else {
            // fewer distinct rows than clusters
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, b) in best.iter_mut().enumerate() {
            let d: f64 =
                rows.row(i).iter().zip(rows.row(next).iter()).map(|(a, c)| (a - c).powi(2)).sum();
            *b = b.min(d);
        }
    }
    let mut centroids = DMatrix::zeros(k, rows.ncols());
    for (c, &i) in chosen.iter().enumerate() {
        centroids.set_row(c, &rows.row(i));
    }
    centroids
}

fn assign(rows: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize]) -> (f64, Vec<f64>) {
    let mut inertia = 0.0;
    let mut dists = vec![0.0; rows.nrows()];
    for i in 0..rows.nrows() {
        let (best, d) = (0..centroids.nrows())
            .map(|c| (c, sq_dist(rows, i, centroids, c)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        labels[i] = best;
        dists[i] = d;
        inertia += d;
    }
    (inertia, dists)
}

/// Lloyd's algorithm from k-means++ seeding on the rows of `rows`.
///
/// An empty cluster is re-seeded at the point farthest from its centroid.
pub fn kmeans_fit(rows: &DMatrix<f64>, k: usize, seed: u64) -> Result<KMeansFit, ClassicalError> {
    let n = rows.nrows();
    if k == 0 || n < k {
        return Err(ClassicalError::BadK { k, n });
    }
    let mut rng = seeding::rng(seed);
    let mut centroids = seed_centroids(rows, k, &mut rng);
    let mut labels = vec![0; n];
    let mut previous: Option<Vec<usize>> = None;
    let mut trace = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_LLOYD_ITERATIONS {
        iterations += 1;
        let (inertia, dists) = assign(rows, &centroids, &mut labels);
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            // move the empty centroid onto the worst-fitted point of a
            // cluster that can spare it, then reassign
            let donor = (0..n)
                .filter(|&i| sizes[labels[i]] > 1)
                .fold(None, |acc: Option<usize>, i| match acc {
                    Some(j) if dists[j] >= dists[i] => Some(j),
                    _ => Some(i),
                })
                .expect("n >= k guarantees a cluster with two points");
            centroids.set_row(empty, &rows.row(donor));
            trace.push(inertia);
            if dists[donor] == 0.0 {
                // duplicate rows: force assignments so every cluster is occupied
                for c in 0..k {
                    if sizes[c] == 0 {
                        let i = (0..n).find(|&i| sizes[labels[i]] > 1).expect("n >= k");
                        sizes[labels[i]] -= 1;
                        labels[i] = c;
                        sizes[c] = 1;
                    }
                }
                break;
            }
            previous = None;
            continue;
        }
        trace.push(inertia);
        if previous.as_deref() == Some(labels.as_slice()) {
            break;
        }
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            let mut mean = rows.row(members[0]).into_owned();
            for &i in &members[1..] {
                mean += rows.row(i);
            }
            centroids.set_row(c, &(mean / members.len() as f64));
        }
        previous = Some(labels.clone());
    }
    let partition = Partition::new(labels, k)?;
    Ok(KMeansFit { partition, centroids, inertia_trace: trace, iterations })
}

pub fn kmeans(rows: &DMatrix<f64>, k: usize, seed: u64) -> Result<Partition, ClassicalError> {
    kmeans_fit(rows, k, seed).map(|f| f.partition)
}

/// Within-cluster sum of squared distances to cluster means.
pub fn within_cluster_ssq(rows: &DMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<usize> = (0..rows.nrows()).filter(|&i| labels[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        for col in 0..rows.ncols() {
            let mean = members.iter().map(|&i| rows[(i, col)]).sum::<f64>() / members.len() as f64;
            total += members.iter().map(|&i| (rows[(i, col)] - mean).powi(2)).sum::<f64>();
        }
    }
    total
}
