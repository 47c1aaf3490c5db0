use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Instance, Schedule, Solution, FEASIBILITY_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Separation,
    Propagation,
    Partition,
}

/// Where a violation was observed. Vehicles are 1-based, route positions 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Tasks { first: usize, second: usize },
    RoutePosition { vehicle: usize, position: usize },
    Vehicle { vehicle: usize },
    Task { task: usize },
    Makespan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    /// bound the observed value had to respect
    pub required: f64,
    pub observed: f64,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}: {} (required {}, observed {})",
            self.kind, self.message, self.required, self.observed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    /// Configuration notes that are not violations by themselves.
    pub warnings: Vec<String>,
}

impl ViolationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn push(&mut self, kind: ViolationKind, location: Location, required: f64, observed: f64, message: String) {
        self.violations.push(Violation {
            kind,
            location,
            required,
            observed,
            message,
        });
    }
}

/// Checks a timed schedule against the route set and instance, independently
/// of how the schedule was produced. All comparisons allow
/// [`FEASIBILITY_TOLERANCE`] seconds of slack.
pub fn validate_schedule(instance: &Instance, solution: &Solution, schedule: &Schedule) -> Result<ViolationReport> {
    let n = instance.n_tasks();
    let k_max = instance.k_max();
    if schedule.n_tasks() != n || schedule.arrival.len() != n || schedule.wait.len() != n {
        return Err(Error::InvalidInput(format!(
            "schedule covers {} tasks, instance has {n}",
            schedule.n_tasks()
        )));
    }
    if solution.n_vehicles() != k_max {
        return Err(Error::InvalidInput(format!(
            "solution has {} routes, instance has {k_max} vehicles",
            solution.n_vehicles()
        )));
    }
    if schedule.vehicle_completion.len() != k_max {
        return Err(Error::InvalidInput(format!(
            "schedule has {} vehicle completions, instance has {k_max} vehicles",
            schedule.vehicle_completion.len()
        )));
    }

    let tol = FEASIBILITY_TOLERANCE;
    let w = instance.service_time();
    let mut report = ViolationReport::default();

    if w < instance.w_max() {
        report.warnings.push(format!(
            "service time {w} is below w_max {}; the scheduler's push rule may leave start separations short",
            instance.w_max()
        ));
    }

    // (a) partition
    let mut count = vec![0usize; n + 1];
    for (k, route) in solution.routes.iter().enumerate() {
        if route.is_empty() {
            report.push(
                ViolationKind::Partition,
                Location::Vehicle { vehicle: k + 1 },
                1.0,
                0.0,
                format!("vehicle {} serves no task", k + 1),
            );
        }
        for (pos, &t) in route.iter().enumerate() {
            if t == 0 || t > n {
                report.push(
                    ViolationKind::Partition,
                    Location::RoutePosition { vehicle: k + 1, position: pos },
                    n as f64,
                    t as f64,
                    format!("unknown task {t}"),
                );
            } else {
                count[t] += 1;
            }
        }
    }
    for (t, &c) in count.iter().enumerate().skip(1) {
        if c != 1 {
            report.push(
                ViolationKind::Partition,
                Location::Task { task: t },
                1.0,
                c as f64,
                format!("task {t} is visited {c} times"),
            );
        }
    }
    if !report.is_feasible() {
        // timing checks are meaningless on a broken partition
        return Ok(report);
    }

    // (b) propagation along each route
    for (k, route) in solution.routes.iter().enumerate() {
        let mut prev: Option<usize> = None;
        for (pos, &t) in route.iter().enumerate() {
            let (b, wt, s) = (schedule.arrival_of(t), schedule.wait_of(t), schedule.start_of(t));
            let here = Location::RoutePosition { vehicle: k + 1, position: pos };
            if wt < -tol {
                report.push(ViolationKind::Propagation, here, 0.0, wt, format!("task {t} has negative wait"));
            }
            if (s - (b + wt)).abs() > tol {
                report.push(
                    ViolationKind::Propagation,
                    here,
                    b + wt,
                    s,
                    format!("task {t} start differs from arrival plus wait"),
                );
            }
            let earliest = match prev {
                None => instance.travel(0, t),
                Some(p) => schedule.start_of(p) + w + instance.travel(p, t),
            };
            if b < earliest - tol {
                let from = prev.map_or_else(|| "depot".to_string(), |p| format!("task {p}"));
                report.push(
                    ViolationKind::Propagation,
                    here,
                    earliest,
                    b,
                    format!("task {t} reached before it can be from {from}"),
                );
            }
            prev = Some(t);
        }
        // (d) completion
        let completion = schedule.vehicle_completion[k];
        let required = prev.map_or(0.0, |p| schedule.start_of(p) + w + instance.travel(p, 0));
        if completion < required - tol {
            report.push(
                ViolationKind::Propagation,
                Location::Vehicle { vehicle: k + 1 },
                required,
                completion,
                format!("vehicle {} completes before returning to the depot", k + 1),
            );
        }
    }
    let max_completion = schedule.vehicle_completion.iter().copied().fold(0.0, f64::max);
    if (schedule.makespan - max_completion).abs() > tol {
        report.push(
            ViolationKind::Propagation,
            Location::Makespan,
            max_completion,
            schedule.makespan,
            "makespan is not the largest vehicle completion".into(),
        );
    }

    // (c) separation between tasks on different vehicles
    let owner = solution.vehicle_of(n);
    for i in 1..=n {
        for j in (i + 1)..=n {
            if owner[i] == owner[j] {
                continue;
            }
            let g = instance.separation(i, j);
            let gap = (schedule.start_of(i) - schedule.start_of(j)).abs();
            if gap < g - tol {
                report.push(
                    ViolationKind::Separation,
                    Location::Tasks { first: i, second: j },
                    g,
                    gap,
                    format!("tasks {i} and {j} start {gap} s apart, need {g} s"),
                );
            }
        }
    }

    Ok(report)
}
