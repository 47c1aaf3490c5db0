//! Benchmark instance generation: grid, uniform random and clustered task
//! layouts rescaled to a target average nearest-neighbor distance, plus
//! import of external coordinate tables and the `G50_5k_150d` naming scheme.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{avg_nearest_neighbor_distance, write_instance, Instance, Params, Point};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Clustered,
    Random,
    Grid,
}

impl Pattern {
    pub fn letter(self) -> char {
        match self {
            Pattern::Clustered => 'C',
            Pattern::Random => 'R',
            Pattern::Grid => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'C' => Some(Pattern::Clustered),
            'R' => Some(Pattern::Random),
            'G' => Some(Pattern::Grid),
            _ => None,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Clustered => "clustered",
            Pattern::Random => "random",
            Pattern::Grid => "grid",
        })
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grid" | "g" => Ok(Pattern::Grid),
            "random" | "r" => Ok(Pattern::Random),
            "clustered" | "c" => Ok(Pattern::Clustered),
            _ => Err(Error::InvalidParameter(format!(
                "unknown pattern '{s}' (expected grid, random or clustered)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub pattern: Pattern,
    pub n_tasks: usize,
    pub k_max: usize,
    /// meters
    pub d_max: f64,
    /// meters
    pub target_avg_nn: f64,
    pub speed: f64,
    pub service_time: f64,
    pub w_max: f64,
    /// per-coordinate standard deviation of the grid jitter, meters
    pub noise_sigma: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(pattern: Pattern, n_tasks: usize, k_max: usize, d_max: f64, seed: u64) -> Self {
        Self {
            pattern,
            n_tasks,
            k_max,
            d_max,
            target_avg_nn: 40.0,
            speed: 5.0,
            service_time: 8.0,
            w_max: 8.0,
            noise_sigma: 4.0,
            seed,
        }
    }

    pub fn name(&self) -> String {
        format_name(self.pattern, self.n_tasks, self.k_max, self.d_max)
    }

    fn params(&self) -> Params {
        Params {
            k_max: self.k_max,
            speed: self.speed,
            service_time: self.service_time,
            w_max: self.w_max,
            d_max: self.d_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.k_max == 0 {
            return bad("k_max must be at least 1".into());
        }
        if self.n_tasks < self.k_max {
            return bad(format!(
                "n_tasks {} is below k_max {}",
                self.n_tasks, self.k_max
            ));
        }
        if self.n_tasks < 2 {
            return bad("at least 2 tasks are needed to measure spacing".into());
        }
        for (name, v) in [
            ("d_max", self.d_max),
            ("target_avg_nn", self.target_avg_nn),
            ("speed", self.speed),
            ("service_time", self.service_time),
            ("w_max", self.w_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be non-negative, got {}", self.noise_sigma));
        }
        Ok(())
    }
}

/// `[pattern][n]_[k]k_[d_max]d`, e.g. `G50_5k_200d`.
pub fn format_name(pattern: Pattern, n: usize, k: usize, d_max: f64) -> String {
    format!("{}{n}_{k}k_{d_max}d", pattern.letter())
}

pub fn parse_name(name: &str) -> Result<(Pattern, usize, usize, f64)> {
    let bad = || Error::parse(0, format!("'{name}' does not match [C|R|G]<n>_<k>k_<dmax>d"));
    let mut chars = name.chars();
    let pattern = chars.next().and_then(Pattern::from_letter).ok_or_else(bad)?;
    let rest = chars.as_str();
    let mut parts = rest.split('_');
    let (Some(n), Some(k), Some(d), None) = (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(bad());
    };
    let n: usize = n.parse().map_err(|_| bad())?;
    let k: usize = k.strip_suffix('k').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let d: f64 = d.strip_suffix('d').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(bad());
    }
    Ok((pattern, n, k, d))
}

/// Scales every coordinate about the origin so the average nearest-neighbor
/// distance becomes `target`.
pub fn rescale_coordinates(coords: &[Point], target: f64) -> Result<Vec<Point>> {
    let current = avg_nearest_neighbor_distance(coords)?;
    if current == 0.0 {
        return Err(Error::Degenerate(
            "every point coincides with another; spacing is zero".into(),
        ));
    }
    let factor = target / current;
    Ok(coords.iter().map(|p| p.scaled(factor)).collect())
}

fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

fn build(spec: &GeneratorSpec, raw: &[Point]) -> Result<Instance> {
    let tasks = rescale_coordinates(raw, spec.target_avg_nn)?;
    Instance::new(spec.name(), centroid(&tasks), tasks, spec.params())
}

/// Row-major lattice cells `r = ceil(sqrt n)` by `c = ceil(n / r)` before
/// jitter and rescaling.
pub fn grid_cells(n: usize, spacing: f64) -> Vec<Point> {
    let r = (n as f64).sqrt().ceil() as usize;
    let c = n.div_ceil(r);
    (0..n)
        .map(|i| Point::new((i % c) as f64 * spacing, (i / c) as f64 * spacing))
        .collect()
}

/// Jittered lattice, rescaled to the target spacing, depot at the centroid.
pub fn generate_grid(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    if spec.pattern != Pattern::Grid {
        return Err(Error::InvalidParameter(format!(
            "generate_grid called with pattern {}",
            spec.pattern
        )));
    }
    let mut points = grid_cells(spec.n_tasks, spec.target_avg_nn);
    if spec.noise_sigma > 0.0 {
        let mut rng = seeded(spec.seed);
        let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma checked positive");
        for p in &mut points {
            p.x += noise.sample(&mut rng);
            p.y += noise.sample(&mut rng);
        }
    }
    build(spec, &points)
}

/// Blob centers and raw (pre-rescale) points of a clustered layout. Point
/// `i` belongs to blob `i % centers.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredLayout {
    pub centers: Vec<Point>,
    pub points: Vec<Point>,
}

fn square_side(spec: &GeneratorSpec) -> f64 {
    (spec.n_tasks as f64).sqrt() * spec.target_avg_nn / 0.5
}

pub fn clustered_layout(spec: &GeneratorSpec) -> Result<ClusteredLayout> {
    spec.validate()?;
    let side = square_side(spec);
    let mut rng = seeded(spec.seed);
    let centers: Vec<Point> = (0..spec.k_max)
        .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect();
    let blob = Normal::new(0.0, 1.5 * spec.target_avg_nn).expect("positive spread");
    let points = (0..spec.n_tasks)
        .map(|i| {
            let c = centers[i % centers.len()];
            Point::new(c.x + blob.sample(&mut rng), c.y + blob.sample(&mut rng))
        })
        .collect();
    Ok(ClusteredLayout { centers, points })
}

/// Uniform or clustered point cloud, rescaled to the target spacing, depot
/// at the centroid.
pub fn generate_scattered(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let points = match spec.pattern {
        Pattern::Random => {
            let side = square_side(spec);
            let mut rng = seeded(spec.seed);
            (0..spec.n_tasks)
                .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
                .collect()
        }
        Pattern::Clustered => clustered_layout(spec)?.points,
        Pattern::Grid => {
            return Err(Error::InvalidParameter(
                "generate_scattered handles random and clustered patterns".into(),
            ))
        }
    };
    build(spec, &points)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    match spec.pattern {
        Pattern::Grid => generate_grid(spec),
        Pattern::Random | Pattern::Clustered => generate_scattered(spec),
    }
}

/// Instance file text for `spec`, with the generator settings recorded as
/// comments. Identical specs give identical bytes.
pub fn generate_file(spec: &GeneratorSpec) -> Result<(Instance, String)> {
    let inst = generate(spec)?;
    let mut comments = vec![
        format!("generator pattern={} seed={}", spec.pattern, spec.seed),
        format!("target_avg_nn={}", spec.target_avg_nn),
    ];
    if spec.pattern == Pattern::Grid {
        comments.push(format!("noise_sigma={}", spec.noise_sigma));
    }
    let text = write_instance(&inst, &comments);
    Ok((inst, text))
}

/// Coordinates read from an external dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportedCoordinates {
    pub depot: Point,
    /// task points in file order
    pub points: Vec<Point>,
}

/// Reads a TSPLIB coordinate table (full file or bare `id x y` rows) or a
/// Solomon customer table. Solomon customer 0 is the depot and the other
/// rows are tasks. TSPLIB files keep every node as a task and take node 1's
/// position as the depot.
pub fn import_coordinates(text: &str) -> Result<ImportedCoordinates> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    if let Some(pos) = lines.iter().position(|(_, l)| l.starts_with("CUST NO")) {
        let rows = parse_rows(&lines[pos + 1..], 3, None)?;
        let (first_ln, first_id, depot) = *rows
            .first()
            .ok_or_else(|| Error::parse(lines[pos].0, "customer table is empty"))?;
        if first_id != 0 {
            return Err(Error::parse(first_ln, "first customer row must be the depot (customer 0)"));
        }
        let points: Vec<Point> = rows[1..].iter().map(|r| r.2).collect();
        if points.is_empty() {
            return Err(Error::parse(first_ln, "customer table has no tasks"));
        }
        return Ok(ImportedCoordinates { depot, points });
    }

    let body = match lines.iter().position(|(_, l)| l.starts_with("NODE_COORD_SECTION")) {
        Some(pos) => &lines[pos + 1..],
        None => &lines[..],
    };
    let rows = parse_rows(body, 3, Some(3))?;
    let points: Vec<Point> = rows.iter().map(|r| r.2).collect();
    let depot = *points
        .first()
        .ok_or_else(|| Error::parse(0, "no coordinate rows found"))?;
    Ok(ImportedCoordinates { depot, points })
}

/// Parses `id x y ...` rows until EOF, rejecting duplicate ids.
fn parse_rows(
    lines: &[(usize, &str)],
    min_fields: usize,
    max_fields: Option<usize>,
) -> Result<Vec<(usize, i64, Point)>> {
    let mut seen = std::collections::HashSet::new();
    let mut rows = Vec::new();
    for &(ln, l) in lines {
        if l == "EOF" {
            break;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < min_fields || max_fields.is_some_and(|m| toks.len() > m) {
            return Err(Error::parse(
                ln,
                format!("expected 'id x y', found {} field(s)", toks.len()),
            ));
        }
        let id: i64 = toks[0]
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad node id '{}'", toks[0])))?;
        let coord = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(ln, format!("bad coordinate '{t}'")))
        };
        let p = Point::new(coord(toks[1])?, coord(toks[2])?);
        if !seen.insert(id) {
            return Err(Error::parse(ln, format!("duplicate node id {id}")));
        }
        rows.push((ln, id, p));
    }
    Ok(rows)
}

/// Builds an instance from imported coordinates: tasks and depot are scaled
/// by the factor that brings the tasks to the target spacing. A zero
/// `spec.n_tasks` accepts whatever count the file holds.
pub fn instance_from_import(imported: &ImportedCoordinates, spec: &GeneratorSpec) -> Result<Instance> {
    let held = imported.points.len();
    if spec.n_tasks != 0 && spec.n_tasks != held {
        return Err(Error::InvalidParameter(format!(
            "requested {} tasks but the file holds {held}",
            spec.n_tasks
        )));
    }
    let spec = GeneratorSpec {
        n_tasks: held,
        ..spec.clone()
    };
    spec.validate()?;
    let current = avg_nearest_neighbor_distance(&imported.points)?;
    if current == 0.0 {
        return Err(Error::Degenerate("imported points all coincide".into()));
    }
    let factor = spec.target_avg_nn / current;
    let tasks = imported.points.iter().map(|p| p.scaled(factor)).collect();
    Instance::new(spec.name(), imported.depot.scaled(factor), tasks, spec.params())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        assert_eq!(format_name(Pattern::Grid, 50, 5, 200.0), "G50_5k_200d");
        assert_eq!(parse_name("C25_2k_150d").unwrap(), (Pattern::Clustered, 25, 2, 150.0));
        assert_eq!(parse_name("G575_15k_800d").unwrap(), (Pattern::Grid, 575, 15, 800.0));
        assert_eq!(parse_name("R40_3k_62.5d").unwrap(), (Pattern::Random, 40, 3, 62.5));
        for bad in ["X50_5k_200d", "G50_5_200d", "G50_5k_200", "G50_5k", "G_5k_200d", "G50_5k_200d_x"] {
            assert!(matches!(parse_name(bad), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn rescale_examples() {
        let line = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(20.0, 0.0)];
        let out = rescale_coordinates(&line, 40.0).unwrap();
        assert_eq!(out, vec![Point::new(0.0, 0.0), Point::new(40.0, 0.0), Point::new(80.0, 0.0)]);
        assert_eq!(rescale_coordinates(&out, 40.0).unwrap(), out);
        let same = [Point::new(3.0, 3.0); 4];
        assert!(matches!(rescale_coordinates(&same, 40.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn noiseless_grid_is_a_lattice() {
        let mut spec = GeneratorSpec::new(Pattern::Grid, 25, 5, 150.0, 0);
        spec.noise_sigma = 0.0;
        let inst = generate_grid(&spec).unwrap();
        assert_eq!(avg_nearest_neighbor_distance(inst.tasks()).unwrap(), 40.0);
        assert_eq!(inst.tasks()[6], Point::new(40.0, 40.0));
        assert_eq!(inst.depot(), Point::new(80.0, 80.0));
        assert_eq!(inst.name(), "G25_5k_150d");
    }

    #[test]
    fn grid_shape_for_26() {
        let cells = grid_cells(26, 1.0);
        assert_eq!(cells.len(), 26);
        // 6 rows of 5 columns
        assert_eq!(cells[4], Point::new(4.0, 0.0));
        assert_eq!(cells[5], Point::new(0.0, 1.0));
        assert_eq!(cells[25], Point::new(0.0, 5.0));
    }

    #[test]
    fn generators_hit_the_target_and_repeat() {
        for pattern in [Pattern::Grid, Pattern::Random, Pattern::Clustered] {
            let spec = GeneratorSpec::new(pattern, 30, 5, 150.0, 17);
            let (inst, text) = generate_file(&spec).unwrap();
            let nn = avg_nearest_neighbor_distance(inst.tasks()).unwrap();
            assert!((nn - 40.0).abs() < 1e-9, "{pattern}: {nn}");
            assert_eq!(generate_file(&spec).unwrap().1, text);
            let other = generate_file(&GeneratorSpec { seed: 18, ..spec.clone() }).unwrap().1;
            assert_ne!(other, text);
        }
    }

    #[test]
    fn clustered_uses_one_blob_per_vehicle() {
        let spec = GeneratorSpec::new(Pattern::Clustered, 40, 5, 150.0, 3);
        let layout = clustered_layout(&spec).unwrap();
        assert_eq!(layout.centers.len(), 5);
        assert_eq!(layout.points.len(), 40);
    }

    #[test]
    fn spec_errors() {
        let spec = GeneratorSpec::new(Pattern::Grid, 3, 5, 150.0, 0);
        assert!(matches!(generate(&spec), Err(Error::InvalidParameter(_))));
        let spec = GeneratorSpec {
            d_max: 0.0,
            ..GeneratorSpec::new(Pattern::Random, 10, 2, 150.0, 0)
        };
        assert!(matches!(generate(&spec), Err(Error::InvalidParameter(_))));
        assert!("hexagonal".parse::<Pattern>().is_err());
        assert_eq!("Grid".parse::<Pattern>().unwrap(), Pattern::Grid);
    }

    #[test]
    fn tsplib_import() {
        let text = "NAME : tiny\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n\
                    NODE_COORD_SECTION\n1 6 4\n2 15 15\n3 24 18\nEOF\n";
        let imp = import_coordinates(text).unwrap();
        assert_eq!(imp.points, vec![Point::new(6.0, 4.0), Point::new(15.0, 15.0), Point::new(24.0, 18.0)]);
        assert_eq!(imp.depot, Point::new(6.0, 4.0));
        let bare = import_coordinates("1 6 4\n2 15 15\n3 24 18\n").unwrap();
        assert_eq!(bare, imp);
    }

    #[test]
    fn import_errors_name_the_line() {
        match import_coordinates("1 0 0\n\n7 12.0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match import_coordinates("NODE_COORD_SECTION\n1 0 0\n1 5 5\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solomon_import() {
        let text = "C101\n\nVEHICLE\nNUMBER     CAPACITY\n  25         200\n\nCUSTOMER\n\
                    CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n\n\
                    0      40         50          0          0       1236          0\n\
                    1      45         68         10        912        967         90\n\
                    2      45         70         30        825        870         90\n";
        let imp = import_coordinates(text).unwrap();
        assert_eq!(imp.depot, Point::new(40.0, 50.0));
        assert_eq!(imp.points, vec![Point::new(45.0, 68.0), Point::new(45.0, 70.0)]);
    }

    #[test]
    fn imported_instance_is_rescaled() {
        let imp = import_coordinates("1 0 0\n2 10 0\n3 20 0\n").unwrap();
        let spec = GeneratorSpec::new(Pattern::Random, 3, 2, 150.0, 0);
        let inst = instance_from_import(&imp, &spec).unwrap();
        assert_eq!(inst.tasks()[2], Point::new(80.0, 0.0));
        assert_eq!(inst.name(), "R3_2k_150d");
        let wrong = GeneratorSpec { n_tasks: 4, ..spec };
        assert!(instance_from_import(&imp, &wrong).is_err());
    }
}
