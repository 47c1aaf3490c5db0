use serde::{Deserialize, Serialize};

use super::Solution;
use crate::error::{Error, Result};

/// Per-vehicle decomposition of the completion time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleStats {
    /// time spent sweeping, `route length * service_time`
    pub sweep: f64,
    /// time spent waiting at task points
    pub wait: f64,
    /// time spent travelling, including the return leg
    pub movement: f64,
}

impl VehicleStats {
    /// `sweep + wait + movement`, summed in that order.
    #[inline]
    pub fn total(&self) -> f64 {
        self.sweep + self.wait + self.movement
    }
}

/// Timed outcome of a route set. Per-task vectors are indexed by `task - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub arrival: Vec<f64>,
    pub wait: Vec<f64>,
    pub start: Vec<f64>,
    pub vehicle_completion: Vec<f64>,
    pub makespan: f64,
    pub vehicle_stats: Vec<VehicleStats>,
    pub total_wait: f64,
}

impl Schedule {
    pub fn n_tasks(&self) -> usize {
        self.start.len()
    }

    pub fn start_of(&self, task: usize) -> f64 {
        self.start[task - 1]
    }

    pub fn arrival_of(&self, task: usize) -> f64 {
        self.arrival[task - 1]
    }

    pub fn wait_of(&self, task: usize) -> f64 {
        self.wait[task - 1]
    }

    /// Serializable view with one record per task (ordered by task id) and
    /// per vehicle. Vehicle numbers in the document are 1-based.
    pub fn to_document(&self, solution: &Solution, service_time: f64) -> ScheduleDocument {
        let owner = solution.vehicle_of(self.n_tasks());
        let tasks = (1..=self.n_tasks())
            .map(|task| TaskRecord {
                task,
                vehicle: owner.get(task).copied().flatten().map_or(0, |k| k + 1),
                arrival: self.arrival_of(task),
                wait: self.wait_of(task),
                start: self.start_of(task),
                end: self.start_of(task) + service_time,
            })
            .collect();
        let vehicles = self
            .vehicle_stats
            .iter()
            .zip(&self.vehicle_completion)
            .enumerate()
            .map(|(k, (stats, &completion))| VehicleRecord {
                vehicle: k + 1,
                sweep: stats.sweep,
                wait: stats.wait,
                movement: stats.movement,
                completion,
            })
            .collect();
        ScheduleDocument {
            makespan: self.makespan,
            total_wait: self.total_wait,
            tasks,
            vehicles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: usize,
    pub vehicle: usize,
    pub arrival: f64,
    pub wait: f64,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub vehicle: usize,
    pub sweep: f64,
    pub wait: f64,
    #[serde(rename = "move")]
    pub movement: f64,
    pub completion: f64,
}

/// JSON form of a [`Schedule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub makespan: f64,
    pub total_wait: f64,
    pub tasks: Vec<TaskRecord>,
    pub vehicles: Vec<VehicleRecord>,
}

impl ScheduleDocument {
    /// Rebuilds the dense schedule. Every task `1..=n_tasks` must have exactly one record.
    pub fn into_schedule(self, n_tasks: usize) -> Result<Schedule> {
        let mut arrival = vec![f64::NAN; n_tasks];
        let mut wait = vec![f64::NAN; n_tasks];
        let mut start = vec![f64::NAN; n_tasks];
        let mut seen = vec![false; n_tasks];
        for rec in &self.tasks {
            if rec.task == 0 || rec.task > n_tasks {
                return Err(Error::InvalidInput(format!("schedule names unknown task {}", rec.task)));
            }
            let i = rec.task - 1;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidInput(format!("task {} appears twice in schedule", rec.task)));
            }
            arrival[i] = rec.arrival;
            wait[i] = rec.wait;
            start[i] = rec.start;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!("schedule has no record for task {}", i + 1)));
        }
        let mut vehicles = self.vehicles;
        vehicles.sort_by_key(|v| v.vehicle);
        Ok(Schedule {
            arrival,
            wait,
            start,
            vehicle_completion: vehicles.iter().map(|v| v.completion).collect(),
            makespan: self.makespan,
            vehicle_stats: vehicles
                .iter()
                .map(|v| VehicleStats {
                    sweep: v.sweep,
                    wait: v.wait,
                    movement: v.movement,
                })
                .collect(),
            total_wait: self.total_wait,
        })
    }
}
