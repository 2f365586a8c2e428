use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DataError;
use crate::seeding;

/// Offset applied to duplicated points when padding a dataset to a power of two.
pub const PAD_OFFSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Moons,
    Blobs,
    Rings,
    File,
}

impl std::str::FromStr for DatasetKind {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "moons" => Ok(Self::Moons),
            "blobs" => Ok(Self::Blobs),
            "rings" => Ok(Self::Rings),
            "file" => Ok(Self::File),
            other => Err(DataError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn contains(&self, point: &[f64]) -> bool {
        point
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(&x, (&lo, &hi))| x >= lo && x <= hi)
    }

    fn of_points(points: &[Vec<f64>]) -> Self {
        let dim = points.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for (c, &x) in p.iter().enumerate() {
                min[c] = min[c].min(x);
                max[c] = max[c].max(x);
            }
        }
        Self { min, max }
    }
}

/// Shape parameters for the bundled generators.
///
/// Moons are two interleaved crescents: each is a band around a unit half
/// circle whose half-width tapers from `moon_half_width` at the apex to
/// `moon_tip_half_width` at the tips. The lower crescent is centred at
/// `(moon_shift, moon_lift)`. Points are placed by best-candidate sampling,
/// which gives a blue-noise layout free of isolated outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub blob_centers: usize,
    pub moon_half_width: f64,
    pub moon_tip_half_width: f64,
    pub moon_lift: f64,
    pub moon_shift: f64,
    pub ring_inner_radius: f64,
    pub ring_outer: (f64, f64),
    /// Candidates drawn per accepted point in best-candidate sampling.
    pub candidates: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            blob_centers: 3,
            moon_half_width: 0.45,
            moon_tip_half_width: 0.15,
            moon_lift: 0.2,
            moon_shift: 1.1,
            ring_inner_radius: 0.3,
            ring_outer: (0.7, 1.0),
            candidates: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub kind: DatasetKind,
    pub bbox: BoundingBox,
    /// Number of points before padding.
    pub original_len: usize,
    /// Indices of points appended to reach a power of two.
    pub pad_indices: Vec<usize>,
    /// Generator ground truth for the first `original_len` points, if known.
    pub truth: Option<Vec<usize>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Number of qubits `n` with `N = 2^n`.
    pub fn qubits(&self) -> u32 {
        self.len().trailing_zeros()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in &self.points[..self.original_len] {
            let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub(crate) fn check_power_of_two(n: usize) -> Result<(), DataError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(DataError::NotPowerOfTwo(n));
    }
    Ok(())
}

type Point2 = [f64; 2];

fn best_candidate<R: Rng>(
    rng: &mut R,
    inside: impl Fn(Point2) -> bool,
    rect: (Point2, Point2),
    count: usize,
    candidates: usize,
) -> Vec<Point2> {
    let (lo, hi) = rect;
    let draw = |rng: &mut R| loop {
        let p = [rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1])];
        if inside(p) {
            return p;
        }
    };
    let mut accepted: Vec<Point2> = Vec::with_capacity(count);
    while accepted.len() < count {
        let mut best = draw(rng);
        if !accepted.is_empty() {
            let mut best_gap = nearest_sq(&accepted, best);
            for _ in 1..candidates.max(1) {
                let c = draw(rng);
                let gap = nearest_sq(&accepted, c);
                if gap > best_gap {
                    best = c;
                    best_gap = gap;
                }
            }
        }
        accepted.push(best);
    }
    accepted
}

fn nearest_sq(points: &[Point2], p: Point2) -> f64 {
    points
        .iter()
        .map(|q| (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2))
        .fold(f64::INFINITY, f64::min)
}

fn crescent(p: Point2, centre: Point2, radius: f64, apex: f64, tip: f64, upper: bool) -> bool {
    let x = p[0] - centre[0];
    let y = p[1] - centre[1];
    if (upper && y < 0.0) || (!upper && y > 0.0) {
        return false;
    }
    let phi = y.abs().atan2(x);
    let half_width = tip + (apex - tip) * phi.sin();
    (x.hypot(y) - radius).abs() <= half_width
}

/// Affinely maps each coordinate of `points` onto the matching bbox interval.
fn fit_to_box(points: &[Point2], bbox: &BoundingBox) -> Vec<Vec<f64>> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for c in 0..2 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    points
        .iter()
        .map(|p| {
            (0..2)
                .map(|c| {
                    let (a, b) = (bbox.min[c], bbox.max[c]);
                    let span = hi[c] - lo[c];
                    let x = if span > 0.0 {
                        a + (p[c] - lo[c]) / span * (b - a)
                    } else {
                        0.5 * (a + b)
                    };
                    x.clamp(a, b)
                })
                .collect()
        })
        .collect()
}

/// Generates a seeded synthetic dataset. `n_points` must be a power of two.
pub fn generate_dataset(
    kind: DatasetKind,
    n_points: usize,
    seed: u64,
    params: &GeneratorParams,
) -> Result<Dataset, DataError> {
    check_power_of_two(n_points)?;
    let mut rng = seeding::rng(seed);
    let cands = params.candidates;
    let (raw, truth, bbox) = match kind {
        DatasetKind::Moons => {
            let (apex, tip) = (params.moon_half_width, params.moon_tip_half_width);
            let lower_centre = [params.moon_shift, params.moon_lift];
            let n_upper = n_points / 2;
            let upper = best_candidate(
                &mut rng,
                |p| crescent(p, [0.0, 0.0], 1.0, apex, tip, true),
                ([-1.0 - apex, 0.0], [1.0 + apex, 1.0 + apex]),
                n_upper,
                cands,
            );
            let lower = best_candidate(
                &mut rng,
                |p| crescent(p, lower_centre, 1.0, apex, tip, false),
                (
                    [lower_centre[0] - 1.0 - apex, lower_centre[1] - 1.0 - apex],
                    [lower_centre[0] + 1.0 + apex, lower_centre[1]],
                ),
                n_points - n_upper,
                cands,
            );
            let truth = [vec![0; upper.len()], vec![1; lower.len()]].concat();
            let bbox = BoundingBox { min: vec![-1.0, -0.5], max: vec![2.0, 1.0] };
            ([upper, lower].concat(), truth, bbox)
        }
        DatasetKind::Blobs => {
            let centres = params.blob_centers;
            if centres == 0 || centres > n_points {
                return Err(DataError::BadParams(format!(
                    "{centres} blob centers for {n_points} points"
                )));
            }
            let (layout, radius0) = if centres == 1 {
                (vec![[0.5, 0.5]], 0.35)
            } else {
                let ring = 0.32;
                let chord = 2.0 * ring * (std::f64::consts::PI / centres as f64).sin();
                let layout = (0..centres)
                    .map(|j| {
                        let a = std::f64::consts::FRAC_PI_2
                            + std::f64::consts::TAU * j as f64 / centres as f64;
                        [0.5 + ring * a.cos(), 0.5 + ring * a.sin()]
                    })
                    .collect();
                (layout, 0.4 * chord)
            };
            let mut points = Vec::with_capacity(n_points);
            let mut truth = Vec::with_capacity(n_points);
            for (j, c) in layout.iter().enumerate() {
                let count = n_points / centres + usize::from(j < n_points % centres);
                // unequal sizes so that centroid boundaries cut the larger blobs
                let r = if centres == 1 {
                    radius0
                } else {
                    radius0 * (1.0 - 0.25 * j as f64 / (centres - 1) as f64)
                };
                let blob = best_candidate(
                    &mut rng,
                    |p| (p[0] - c[0]).hypot(p[1] - c[1]) <= r,
                    ([c[0] - r, c[1] - r], [c[0] + r, c[1] + r]),
                    count,
                    cands,
                );
                truth.extend(std::iter::repeat_n(j, blob.len()));
                points.extend(blob);
            }
            let bbox = BoundingBox { min: vec![-6.0, -2.0], max: vec![8.0, 6.0] };
            (points, truth, bbox)
        }
        DatasetKind::Rings => {
            let n_inner = (n_points / 4).max(1);
            let r_in = params.ring_inner_radius;
            let (a, b) = params.ring_outer;
            let inner = best_candidate(
                &mut rng,
                |p| p[0].hypot(p[1]) <= r_in,
                ([-r_in, -r_in], [r_in, r_in]),
                n_inner,
                cands,
            );
            let outer = best_candidate(
                &mut rng,
                |p| {
                    let r = p[0].hypot(p[1]);
                    r >= a && r <= b
                },
                ([-b, -b], [b, b]),
                n_points - n_inner,
                cands,
            );
            let truth = [vec![0; inner.len()], vec![1; outer.len()]].concat();
            let bbox = BoundingBox { min: vec![-1.0, -1.0], max: vec![1.0, 1.0] };
            ([inner, outer].concat(), truth, bbox)
        }
        DatasetKind::File => {
            return Err(DataError::BadParams("file datasets are loaded, not generated".into()))
        }
    };
    let points = fit_to_box(&raw, &bbox);
    Ok(Dataset {
        points,
        seed,
        kind,
        bbox,
        original_len: n_points,
        pad_indices: Vec::new(),
        truth: Some(truth),
    })
}

/// Loads a CSV point cloud and pads it to a power of two.
pub fn load_dataset(path: &Path) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(path)?;
    parse_dataset(file)
}

/// Parses CSV points: one point per line, comma separated, `#` lines ignored.
pub fn parse_dataset<R: Read>(input: R) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Csv(e.to_string()))?;
        let row = record.position().map_or(points.len() + 1, |p| p.line() as usize);
        let mut point = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let x: f64 = cell.parse().map_err(|_| DataError::Parse {
                row,
                column: col + 1,
                value: cell.to_string(),
            })?;
            if !x.is_finite() {
                return Err(DataError::Parse { row, column: col + 1, value: cell.to_string() });
            }
            point.push(x);
        }
        if let Some(first) = points.first() {
            if first.len() != point.len() {
                return Err(DataError::Ragged { row, expected: first.len(), found: point.len() });
            }
        }
        points.push(point);
    }
    if points.is_empty() || points[0].is_empty() {
        return Err(DataError::Empty);
    }
    let original_len = points.len();
    let pad_indices = pad_to_power_of_two(&mut points);
    let bbox = BoundingBox::of_points(&points);
    Ok(Dataset {
        points,
        seed: 0,
        kind: DatasetKind::File,
        bbox,
        original_len,
        pad_indices,
        truth: None,
    })
}

/// Appends offset duplicates of the points farthest from the centroid.
fn pad_to_power_of_two(points: &mut Vec<Vec<f64>>) -> Vec<usize> {
    let n = points.len();
    let target = n.next_power_of_two().max(2);
    if target == n {
        return Vec::new();
    }
    let dim = points[0].len();
    let centroid: Vec<f64> = (0..dim)
        .map(|c| points.iter().map(|p| p[c]).sum::<f64>() / n as f64)
        .collect();
    let dist = |p: &[f64]| -> f64 { p.iter().zip(&centroid).map(|(a, b)| (a - b).powi(2)).sum() };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dist(&points[b]).total_cmp(&dist(&points[a])).then(a.cmp(&b)));
    let mut pads = Vec::with_capacity(target - n);
    for j in 0..target - n {
        let src = order[j % n];
        let shift = PAD_OFFSET * (1 + j / n) as f64;
        let dup: Vec<f64> = points[src].iter().map(|x| x + shift).collect();
        pads.push(points.len());
        points.push(dup);
    }
    pads
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moons_stay_in_declared_box() {
        let ds = generate_dataset(DatasetKind::Moons, 256, 7, &GeneratorParams::default()).unwrap();
        assert_eq!(ds.len(), 256);
        for p in &ds.points {
            assert!((-1.0..=2.0).contains(&p[0]) && (-0.5..=1.0).contains(&p[1]), "{p:?}");
        }
    }

    #[test]
    fn blobs_stay_in_declared_box() {
        let ds = generate_dataset(DatasetKind::Blobs, 256, 7, &GeneratorParams::default()).unwrap();
        assert_eq!(ds.len(), 256);
        for p in &ds.points {
            assert!((-6.0..=8.0).contains(&p[0]) && (-2.0..=6.0).contains(&p[1]), "{p:?}");
        }
        let truth = ds.truth.unwrap();
        assert_eq!(*truth.iter().max().unwrap(), 2);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = GeneratorParams { blob_centers: 1, ..Default::default() };
        let a = generate_dataset(DatasetKind::Blobs, 4, 0, &params).unwrap();
        let b = generate_dataset(DatasetKind::Blobs, 4, 0, &params).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_power_of_two() {
        let err = generate_dataset(DatasetKind::Moons, 100, 1, &GeneratorParams::default());
        assert!(matches!(err, Err(DataError::NotPowerOfTwo(100))));
        assert!(err.unwrap_err().to_string().contains("power of two"));
    }

    #[test]
    fn rings_in_box() {
        let ds = generate_dataset(DatasetKind::Rings, 64, 3, &GeneratorParams::default()).unwrap();
        assert!(ds.points.iter().all(|p| ds.bbox.contains(p)));
    }

    fn csv_rows(n: usize) -> String {
        let mut s = String::from("# x,y\n");
        for i in 0..n {
            s.push_str(&format!("{},{}\n", i as f64 * 0.5, (i % 7) as f64));
        }
        s
    }

    #[test]
    fn loads_exact_power_of_two() {
        let ds = parse_dataset(csv_rows(256).as_bytes()).unwrap();
        assert_eq!((ds.len(), ds.dim(), ds.original_len), (256, 2, 256));
        assert!(ds.pad_indices.is_empty());
        assert_eq!(ds.kind, DatasetKind::File);
    }

    #[test]
    fn pads_to_next_power_of_two() {
        let ds = parse_dataset(csv_rows(250).as_bytes()).unwrap();
        assert_eq!(ds.len(), 256);
        assert_eq!(ds.original_len, 250);
        assert_eq!(ds.pad_indices, (250..256).collect::<Vec<_>>());
        assert!(ds.points.iter().all(|p| ds.bbox.contains(p)));
        // pads are distinct offset copies of distinct original points
        for &i in &ds.pad_indices {
            let src = ds.points[..250]
                .iter()
                .position(|q| q.iter().zip(&ds.points[i]).all(|(a, b)| (a - b).abs() < 1e-8))
                .expect("pad has a source point");
            assert!(ds.points[i][0] - ds.points[src][0] > 0.0);
        }
    }

    #[test]
    fn text_cell_names_row_and_column() {
        let err = parse_dataset("1,2\n3,abc\n".as_bytes()).unwrap_err();
        match &err {
            DataError::Parse { row, column, value } => {
                assert_eq!((*row, *column, value.as_str()), (2, 2, "abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn ragged_and_empty_rejected() {
        assert!(matches!(
            parse_dataset("1,2\n3\n".as_bytes()),
            Err(DataError::Ragged { row: 2, expected: 2, found: 1 })
        ));
        assert!(matches!(parse_dataset("# only a header\n".as_bytes()), Err(DataError::Empty)));
    }
}
