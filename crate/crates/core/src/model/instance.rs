use serde::{Deserialize, Serialize};

use super::{slip_time_unchecked, Point};
use crate::error::{Error, Result};

/// Fleet and slip-rule parameters shared by every task of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub k_max: usize,
    /// meters per second
    pub speed: f64,
    /// seconds spent sweeping at every task
    pub service_time: f64,
    /// separation required between co-located sweeps, seconds
    pub w_max: f64,
    /// distance beyond which no separation is required, meters
    pub d_max: f64,
}

impl Params {
    /// Benchmark configuration: 5 m/s, 8 s sweeps, 8 s maximum slip time.
    pub fn standard(k_max: usize, d_max: f64) -> Self {
        Self {
            k_max,
            speed: 5.0,
            service_time: 8.0,
            w_max: 8.0,
            d_max,
        }
    }

    fn check(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(Error::InvalidInstance("fleet must have at least one vehicle".into()));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::InvalidInstance(format!("speed must be positive, got {}", self.speed)));
        }
        if !(self.service_time >= 0.0 && self.service_time.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "service time must be non-negative, got {}",
                self.service_time
            )));
        }
        if !(self.w_max >= 0.0 && self.w_max.is_finite()) {
            return Err(Error::InvalidInstance(format!("w_max must be non-negative, got {}", self.w_max)));
        }
        if !(self.d_max > 0.0 && self.d_max.is_finite()) {
            return Err(Error::InvalidInstance(format!("d_max must be positive, got {}", self.d_max)));
        }
        Ok(())
    }
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    size: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(f(i, j));
            }
        }
        Self { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// An immutable problem definition. Node 0 is the depot, nodes `1..=N` are
/// the tasks in input order.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    depot: Point,
    tasks: Vec<Point>,
    params: Params,
    distance: SquareMatrix,
    travel: SquareMatrix,
    // indexed by task id - 1
    separation: SquareMatrix,
}

impl Instance {
    pub fn new(name: impl Into<String>, depot: Point, tasks: Vec<Point>, params: Params) -> Result<Self> {
        params.check()?;
        if tasks.len() < params.k_max {
            return Err(Error::InvalidInstance(format!(
                "{} tasks cannot keep {} vehicles busy (every vehicle needs a task)",
                tasks.len(),
                params.k_max
            )));
        }
        if std::iter::once(&depot)
            .chain(tasks.iter())
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::InvalidInstance("coordinates must be finite".into()));
        }

        let nodes: Vec<Point> = std::iter::once(depot).chain(tasks.iter().copied()).collect();
        let distance = SquareMatrix::from_fn(nodes.len(), |i, j| {
            if i == j {
                0.0
            } else {
                nodes[i].distance(&nodes[j])
            }
        });
        let travel = SquareMatrix::from_fn(nodes.len(), |i, j| distance.get(i, j) / params.speed);
        let separation = SquareMatrix::from_fn(tasks.len(), |i, j| {
            slip_time_unchecked(distance.get(i + 1, j + 1), params.w_max, params.d_max)
        });

        Ok(Self {
            name: name.into(),
            depot,
            tasks,
            params,
            distance,
            travel,
            separation,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depot(&self) -> Point {
        self.depot
    }

    pub fn tasks(&self) -> &[Point] {
        &self.tasks
    }

    /// Number of tasks, N.
    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn k_max(&self) -> usize {
        self.params.k_max
    }

    pub fn service_time(&self) -> f64 {
        self.params.service_time
    }

    pub fn w_max(&self) -> f64 {
        self.params.w_max
    }

    /// Coordinates of node `id` (0 = depot).
    pub fn node(&self, id: usize) -> Result<Point> {
        match id {
            0 => Ok(self.depot),
            _ if id <= self.tasks.len() => Ok(self.tasks[id - 1]),
            _ => Err(Error::NodeOutOfRange {
                node: id,
                max: self.tasks.len(),
            }),
        }
    }

    /// Travel time in seconds between nodes `i` and `j`.
    pub fn travel_time(&self, i: usize, j: usize) -> Result<f64> {
        self.check_node(i)?;
        self.check_node(j)?;
        Ok(self.travel.get(i, j))
    }

    /// Unchecked variant of [`Instance::travel_time`] for hot loops.
    #[inline]
    pub fn travel(&self, i: usize, j: usize) -> f64 {
        self.travel.get(i, j)
    }

    /// Euclidean distance in meters between nodes `i` and `j`.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance.get(i, j)
    }

    /// Required start separation between tasks `i` and `j` (ids `1..=N`)
    /// when they are served by different vehicles.
    #[inline]
    pub fn separation(&self, i: usize, j: usize) -> f64 {
        self.separation.get(i - 1, j - 1)
    }

    /// Separation matrix over tasks; entry `(i - 1, j - 1)` belongs to tasks `i, j`.
    pub fn separation_matrix(&self) -> &SquareMatrix {
        &self.separation
    }

    pub fn travel_matrix(&self) -> &SquareMatrix {
        &self.travel
    }

    /// Same instance with a different vehicle count.
    pub fn with_k_max(&self, k_max: usize) -> Result<Self> {
        let params = Params { k_max, ..self.params };
        Instance::new(self.name.clone(), self.depot, self.tasks.clone(), params)
    }

    /// Same coordinates under a different constraint distance.
    pub fn with_d_max(&self, d_max: f64) -> Result<Self> {
        let params = Params { d_max, ..self.params };
        Instance::new(self.name.clone(), self.depot, self.tasks.clone(), params)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check_node(&self, id: usize) -> Result<()> {
        if id > self.tasks.len() {
            return Err(Error::NodeOutOfRange {
                node: id,
                max: self.tasks.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(d_max: f64) -> Instance {
        Instance::new(
            "line",
            Point::new(0.0, 0.0),
            vec![Point::new(40.0, 0.0), Point::new(0.0, 40.0), Point::new(120.0, 0.0)],
            Params::standard(1, d_max),
        )
        .unwrap()
    }

    #[test]
    fn travel_time_examples() {
        let inst = line(150.0);
        assert_eq!(inst.travel_time(0, 1).unwrap(), 8.0);
        assert_eq!(inst.travel_time(2, 2).unwrap(), 0.0);
        let diag = inst.travel_time(1, 2).unwrap();
        assert!((diag - 3200f64.sqrt() / 5.0).abs() < 1e-12);
        assert!((diag - 11.313_708).abs() < 1e-6);
    }

    #[test]
    fn travel_time_rejects_unknown_nodes() {
        let inst = line(150.0);
        assert_eq!(
            inst.travel_time(0, 4),
            Err(Error::NodeOutOfRange { node: 4, max: 3 })
        );
        assert!(inst.node(9).is_err());
    }

    #[test]
    fn separation_examples() {
        let inst = Instance::new(
            "sep",
            Point::new(0.0, 0.0),
            vec![
                Point::new(0.0, 0.0),
                Point::new(80.0, 0.0),
                Point::new(0.0, 0.0),
                Point::new(300.0, 0.0),
            ],
            Params::standard(1, 150.0),
        )
        .unwrap();
        assert!((inst.separation(1, 2) - 8.0 * (1.0 - 80.0 / 150.0)).abs() < 1e-12);
        assert_eq!(inst.separation(1, 3), 8.0);
        assert_eq!(inst.separation(2, 2), 8.0);
        assert_eq!(inst.separation(1, 4), 0.0);
        assert!(inst.separation_matrix().is_symmetric());
    }

    #[test]
    fn travel_matrix_is_metric() {
        let inst = line(150.0);
        let c = inst.travel_matrix();
        assert!(c.is_symmetric());
        for i in 0..c.size() {
            assert_eq!(c.get(i, i), 0.0);
            for j in 0..c.size() {
                for k in 0..c.size() {
                    assert!(c.get(i, k) <= (c.get(i, j) + c.get(j, k)) * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        let tasks = vec![Point::new(1.0, 0.0)];
        let depot = Point::default();
        assert!(Instance::new("x", depot, tasks.clone(), Params::standard(2, 150.0)).is_err());
        assert!(Instance::new("x", depot, tasks.clone(), Params::standard(0, 150.0)).is_err());
        assert!(Instance::new("x", depot, tasks.clone(), Params::standard(1, 0.0)).is_err());
        let slow = Params {
            speed: 0.0,
            ..Params::standard(1, 150.0)
        };
        assert!(Instance::new("x", depot, tasks.clone(), slow).is_err());
        let neg = Params {
            service_time: -1.0,
            ..Params::standard(1, 150.0)
        };
        assert!(Instance::new("x", depot, tasks, neg).is_err());
    }
}
