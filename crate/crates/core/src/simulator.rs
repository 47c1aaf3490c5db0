//! Event-driven scheduler with spatio-temporal constraints.
//!
//! Maps a route set to a fully timed [`Schedule`]. Vehicles leave the depot
//! at time zero; each sweep start is the earliest time that keeps the
//! required separation from the windows other vehicles have already
//! committed to. Simultaneous arrivals are resolved in a fixed priority
//! order (fewest completed tasks first, then lowest vehicle id), which makes
//! the evaluation fully deterministic.
//!
//! Each vehicle's clock is tracked as its three components (sweep, wait,
//! movement) and every event time is read back as their sum. The reported
//! completion time therefore decomposes into those components without
//! rounding residue.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::model::{Instance, Schedule, Solution, VehicleStats};

/// Arrivals closer than this are handled as one batch.
pub const BATCH_TOLERANCE: f64 = 1e-9;

/// Event kinds, declared in the order they are processed at equal timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    EndWork,
    StartWork,
    Arrive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    /// 0-based vehicle index
    pub vehicle: usize,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.vehicle.cmp(&other.vehicle))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sweep a vehicle has committed to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub task: usize,
    pub start: f64,
    pub end: f64,
}

/// Result of the conflict-resolution fixpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartResolution {
    pub start: f64,
    /// full passes over the committed windows, including the final one
    /// that confirmed convergence
    pub passes: usize,
}

/// Earliest start at or after `arrival` for `vehicle` sweeping `task`, given
/// every vehicle's current committed window (`windows[vehicle]` is ignored).
///
/// A window `j` only matters while `s_j + g_max` lies beyond the candidate;
/// a conflicting window pushes the candidate to `min(s_j + g, e_j)`. Passes
/// repeat until the candidate stops moving.
pub fn earliest_start<F>(
    vehicle: usize,
    task: usize,
    arrival: f64,
    windows: &[Option<Window>],
    separation: F,
    g_max: f64,
) -> StartResolution
where
    F: Fn(usize, usize) -> f64,
{
    let mut candidate = arrival;
    let mut passes = 0;
    loop {
        passes += 1;
        let before = candidate;
        for (j, w) in windows.iter().enumerate() {
            let Some(w) = w else { continue };
            if j == vehicle || w.start + g_max <= candidate {
                continue;
            }
            let g = separation(task, w.task);
            if (candidate - w.start).abs() < g {
                candidate = candidate.max((w.start + g).min(w.end));
            }
        }
        if candidate == before {
            return StartResolution { start: candidate, passes };
        }
    }
}

/// Vehicle awaiting a start time within one arrival batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchEntry {
    pub vehicle: usize,
    pub tasks_completed: usize,
}

/// Priority order for simultaneous arrivals.
pub fn sort_batch(batch: &mut [BatchEntry]) {
    batch.sort_by_key(|e| (e.tasks_completed, e.vehicle));
}

/// Record of one evaluation, for inspection and tests.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    /// processed events, in order
    pub events: Vec<Event>,
    /// vehicle processing order of every arrival batch
    pub batches: Vec<Vec<usize>>,
    /// largest number of fixpoint passes seen, with the number of windows
    /// committed at the time
    pub max_passes: usize,
    pub windows_at_max_passes: usize,
}

impl Trace {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

#[derive(Debug, Clone)]
struct VehicleState {
    cursor: usize,
    tasks_completed: usize,
    window: Option<Window>,
    working: bool,
    clock: VehicleStats,
    completion: f64,
}

impl VehicleState {
    #[inline]
    fn now(&self) -> f64 {
        self.clock.total()
    }
}

struct Simulation<'a> {
    instance: &'a Instance,
    routes: &'a [Vec<usize>],
    vehicles: Vec<VehicleState>,
    windows: Vec<Option<Window>>,
    queue: BinaryHeap<Reverse<Event>>,
    arrival: Vec<f64>,
    wait: Vec<f64>,
    start: Vec<f64>,
    batch: Vec<BatchEntry>,
}

impl<'a> Simulation<'a> {
    fn new(instance: &'a Instance, solution: &'a Solution) -> Self {
        let n = instance.n_tasks();
        let k = solution.n_vehicles();
        Self {
            instance,
            routes: &solution.routes,
            vehicles: vec![
                VehicleState {
                    cursor: 0,
                    tasks_completed: 0,
                    window: None,
                    working: false,
                    clock: VehicleStats::default(),
                    completion: 0.0,
                };
                k
            ],
            windows: vec![None; k],
            queue: BinaryHeap::with_capacity(2 * k),
            arrival: vec![0.0; n],
            wait: vec![0.0; n],
            start: vec![0.0; n],
            batch: Vec::with_capacity(k),
        }
    }

    fn push(&mut self, time: f64, kind: EventKind, vehicle: usize) {
        self.queue.push(Reverse(Event { time, kind, vehicle }));
    }

    fn run(mut self, mut trace: Option<&mut Trace>) -> Schedule {
        for (k, route) in self.routes.iter().enumerate() {
            if let Some(&first) = route.first() {
                let v = &mut self.vehicles[k];
                v.clock.movement += self.instance.travel(0, first);
                let t = v.now();
                self.push(t, EventKind::Arrive, k);
            }
        }

        while let Some(Reverse(event)) = self.queue.pop() {
            if let Some(tr) = trace.as_deref_mut() {
                tr.events.push(event);
            }
            match event.kind {
                EventKind::Arrive => self.handle_arrive_batch(event, trace.as_deref_mut()),
                EventKind::StartWork => self.handle_start(event),
                EventKind::EndWork => self.handle_end(event),
            }
        }

        let w = self.instance.service_time();
        debug_assert!(self
            .vehicles
            .iter()
            .all(|v| !v.working && v.clock.sweep == v.tasks_completed as f64 * w));
        let vehicle_completion: Vec<f64> = self.vehicles.iter().map(|v| v.completion).collect();
        let makespan = vehicle_completion.iter().copied().fold(0.0, f64::max);
        let total_wait = self.wait.iter().sum();
        Schedule {
            arrival: self.arrival,
            wait: self.wait,
            start: self.start,
            vehicle_completion,
            makespan,
            vehicle_stats: self.vehicles.iter().map(|v| v.clock).collect(),
            total_wait,
        }
    }

    fn handle_arrive_batch(&mut self, first: Event, mut trace: Option<&mut Trace>) {
        self.batch.clear();
        self.batch.push(self.entry(first.vehicle));
        while let Some(Reverse(next)) = self.queue.peek() {
            if next.kind != EventKind::Arrive || next.time - first.time > BATCH_TOLERANCE {
                break;
            }
            let next = *next;
            self.queue.pop();
            if let Some(tr) = trace.as_deref_mut() {
                tr.events.push(next);
            }
            self.batch.push(self.entry(next.vehicle));
        }
        sort_batch(&mut self.batch);
        if let Some(tr) = trace.as_deref_mut() {
            tr.batches.push(self.batch.iter().map(|e| e.vehicle).collect());
        }

        let instance = self.instance;
        let w = instance.service_time();
        for idx in 0..self.batch.len() {
            let k = self.batch[idx].vehicle;
            let task = self.routes[k][self.vehicles[k].cursor];
            let arrival = self.vehicles[k].now();
            let resolved = earliest_start(
                k,
                task,
                arrival,
                &self.windows,
                |a, b| instance.separation(a, b),
                instance.w_max(),
            );
            if let Some(tr) = trace.as_deref_mut() {
                if resolved.passes > tr.max_passes {
                    tr.max_passes = resolved.passes;
                    tr.windows_at_max_passes = self.windows.iter().filter(|w| w.is_some()).count();
                }
            }

            let waited = (resolved.start - arrival).max(0.0);
            let v = &mut self.vehicles[k];
            v.clock.wait += waited;
            let start = v.now();
            let window = Window {
                task,
                start,
                end: start + w,
            };
            v.window = Some(window);
            v.working = true;
            self.windows[k] = Some(window);

            self.arrival[task - 1] = arrival;
            self.wait[task - 1] = waited;
            self.start[task - 1] = start;
            self.push(start, EventKind::StartWork, k);
        }
    }

    fn entry(&self, vehicle: usize) -> BatchEntry {
        BatchEntry {
            vehicle,
            tasks_completed: self.vehicles[vehicle].tasks_completed,
        }
    }

    fn handle_start(&mut self, event: Event) {
        let w = self.instance.service_time();
        let v = &mut self.vehicles[event.vehicle];
        v.working = true;
        let end = VehicleStats {
            sweep: (v.tasks_completed + 1) as f64 * w,
            ..v.clock
        }
        .total();
        self.push(end, EventKind::EndWork, event.vehicle);
    }

    fn handle_end(&mut self, event: Event) {
        let w = self.instance.service_time();
        let route = &self.routes[event.vehicle];
        let v = &mut self.vehicles[event.vehicle];
        v.working = false;
        v.tasks_completed += 1;
        v.clock.sweep = v.tasks_completed as f64 * w;
        let here = route[v.cursor];
        v.cursor += 1;
        match route.get(v.cursor) {
            Some(&next) => {
                v.clock.movement += self.instance.travel(here, next);
                let t = v.now();
                self.push(t, EventKind::Arrive, event.vehicle);
            }
            None => {
                v.clock.movement += self.instance.travel(here, 0);
                v.completion = v.now();
            }
        }
    }
}

/// Simulates `solution` on `instance` and returns the timed schedule.
/// Vehicles with empty routes finish at time zero.
pub fn evaluate(instance: &Instance, solution: &Solution) -> Result<Schedule> {
    solution.check_partition(instance.n_tasks(), instance.k_max())?;
    Ok(Simulation::new(instance, solution).run(None))
}

/// Like [`evaluate`], also returning the processed event log.
pub fn evaluate_traced(instance: &Instance, solution: &Solution) -> Result<(Schedule, Trace)> {
    solution.check_partition(instance.n_tasks(), instance.k_max())?;
    let mut trace = Trace::default();
    let schedule = Simulation::new(instance, solution).run(Some(&mut trace));
    Ok((schedule, trace))
}

/// Makespan only, skipping the partition check. `solution` must already be a
/// valid partition of the instance's tasks.
pub(crate) fn makespan_unchecked(instance: &Instance, solution: &Solution) -> f64 {
    Simulation::new(instance, solution).run(None).makespan
}
