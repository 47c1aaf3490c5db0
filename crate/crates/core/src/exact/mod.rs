//! Exact methods: the mixed-integer model written as an LP file for external
//! solvers, a reader for their solution files, and an exhaustive oracle for
//! tiny instances.
//!
//! Variable names: `x_i_j_k` arc use, `v_i_k` assignment, `u_k` vehicle use,
//! `z_i_j` same-vehicle indicator, `up_i_j_k` linearisation helper, `b_i`,
//! `t_i`, `s_i` arrival, wait and start, `C_k` completion, `T` makespan.
//! Tasks are numbered from 1, the depot is 0, vehicles are numbered from 1.

mod brute;
mod lp;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ga::nearest_neighbor_routes;
use crate::model::{Instance, Schedule, Solution, VehicleStats};
use crate::simulator;

pub use brute::{brute_force, enumeration_size};
pub use lp::{parse_lp, LpBound, LpConstraint, LpModel, Relation, Sense, Term};

use lp::write_row;

/// Variable and row counts per family, keyed by name prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpCounts {
    pub variables: BTreeMap<String, usize>,
    pub constraints: BTreeMap<String, usize>,
}

impl MilpCounts {
    /// Counts implied by the model structure for `n` tasks and `k` vehicles.
    pub fn closed_form(n: usize, k: usize) -> Self {
        let pairs = n * n.saturating_sub(1) / 2;
        let variables = [
            ("x", (n + 1) * n * k),
            ("v", n * k),
            ("u", k),
            ("z", pairs),
            ("up", k * pairs),
            ("b", n),
            ("t", n),
            ("s", n),
            ("C", k),
            ("T", 1),
        ];
        let constraints = [
            ("assign", n),
            ("out", n * k),
            ("in", n * k),
            ("flow", n * k),
            ("use", k),
            ("fleet", k),
            ("start", n),
            ("prop", n * n.saturating_sub(1)),
            ("first", n),
            ("absa", k * pairs),
            ("absb", k * pairs),
            ("same", pairs),
            ("sepa", pairs),
            ("sepb", pairs),
            ("done", n * k),
            ("span", k),
        ];
        Self {
            variables: variables.iter().map(|&(f, c)| (f.to_string(), c)).collect(),
            constraints: constraints.iter().map(|&(f, c)| (f.to_string(), c)).collect(),
        }
    }

    /// Counts found in a parsed model, grouping names by the text before the
    /// first underscore.
    pub fn of_model(model: &LpModel) -> Self {
        let family = |name: &str| name.split('_').next().unwrap_or(name).to_string();
        let mut variables = BTreeMap::new();
        for v in model.variables() {
            *variables.entry(family(&v)).or_insert(0) += 1;
        }
        let mut constraints = BTreeMap::new();
        for c in &model.constraints {
            let name = c.name.as_deref().unwrap_or("");
            *constraints.entry(family(name)).or_insert(0) += 1;
        }
        Self {
            variables,
            constraints,
        }
    }

    pub fn n_variables(&self) -> usize {
        self.variables.values().sum()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.values().sum()
    }
}

/// An exported model with its size summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub n_tasks: usize,
    pub n_vehicles: usize,
    pub big_m: f64,
    pub counts: MilpCounts,
    pub text: String,
}

/// A makespan no optimal schedule exceeds, padded so that every time
/// variable of such a schedule, plus one service and one travel leg, stays
/// below it: the greedy nearest-neighbor route set's simulated makespan
/// plus `w_max`, the service time and the longest travel leg.
pub fn upper_bound_makespan(instance: &Instance) -> f64 {
    let greedy = simulator::makespan_unchecked(instance, &nearest_neighbor_routes(instance));
    let n = instance.n_tasks();
    let mut longest: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            longest = longest.max(instance.travel(i, j));
        }
    }
    greedy + instance.w_max() + instance.service_time() + longest
}

fn term(coef: f64, name: String) -> Term {
    (coef, name)
}

/// Builds the model. `big_m` defaults to [`upper_bound_makespan`] and may
/// not be smaller than it. Output is byte-stable for equal inputs.
pub fn build_milp(instance: &Instance, big_m: Option<f64>) -> Result<MilpModel> {
    let bound = upper_bound_makespan(instance);
    let m = big_m.unwrap_or(bound);
    if !(m >= bound) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "big-M {m} is below the makespan upper bound {bound}"
        )));
    }
    let n = instance.n_tasks();
    let k_max = instance.k_max();
    let w = instance.service_time();
    let tasks = 1..=n;
    let vehicles = 1..=k_max;
    let nodes = 0..=n;
    let x = |i: usize, j: usize, k: usize| format!("x_{i}_{j}_{k}");
    let v = |i: usize, k: usize| format!("v_{i}_{k}");
    let pairs: Vec<(usize, usize)> = tasks
        .clone()
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();

    let mut out = String::new();
    out.push_str(&format!(
        "\\ {}: {n} tasks, {k_max} vehicles, M = {m}\nMinimize\n obj: T\nSubject To\n",
        instance.name()
    ));
    let mut rows: BTreeMap<String, usize> = BTreeMap::new();
    let mut row = |out: &mut String, family: &str, name: String, terms: &[Term], rel: Relation, rhs: f64| {
        *rows.entry(family.to_string()).or_insert(0) += 1;
        write_row(out, &name, terms, rel, rhs);
    };

    // each task on exactly one vehicle
    for i in tasks.clone() {
        let t: Vec<Term> = vehicles.clone().map(|k| term(1.0, v(i, k))).collect();
        row(&mut out, "assign", format!("assign_{i}"), &t, Relation::Eq, 1.0);
    }
    // assigned tasks have one outgoing and one incoming arc on that vehicle
    for i in tasks.clone() {
        for k in vehicles.clone() {
            let mut t = vec![term(1.0, v(i, k))];
            t.extend(nodes.clone().filter(|&j| j != i).map(|j| term(-1.0, x(i, j, k))));
            row(&mut out, "out", format!("out_{i}_{k}"), &t, Relation::Eq, 0.0);
        }
    }
    for i in tasks.clone() {
        for k in vehicles.clone() {
            let mut t = vec![term(1.0, v(i, k))];
            t.extend(nodes.clone().filter(|&j| j != i).map(|j| term(-1.0, x(j, i, k))));
            row(&mut out, "in", format!("in_{i}_{k}"), &t, Relation::Eq, 0.0);
        }
    }
    for h in tasks.clone() {
        for k in vehicles.clone() {
            let mut t: Vec<Term> = nodes.clone().filter(|&i| i != h).map(|i| term(1.0, x(i, h, k))).collect();
            t.extend(nodes.clone().filter(|&j| j != h).map(|j| term(-1.0, x(h, j, k))));
            row(&mut out, "flow", format!("flow_{h}_{k}"), &t, Relation::Eq, 0.0);
        }
    }
    // every vehicle leaves the depot exactly once
    for k in vehicles.clone() {
        let mut t = vec![term(1.0, format!("u_{k}"))];
        t.extend(tasks.clone().map(|j| term(-1.0, x(0, j, k))));
        row(&mut out, "use", format!("use_{k}"), &t, Relation::Eq, 0.0);
    }
    for k in vehicles.clone() {
        row(&mut out, "fleet", format!("fleet_{k}"), &[term(1.0, format!("u_{k}"))], Relation::Eq, 1.0);
    }

    // timing along routes; vehicles leave the depot at time zero
    for i in tasks.clone() {
        let t = [term(1.0, format!("s_{i}")), term(-1.0, format!("b_{i}")), term(-1.0, format!("t_{i}"))];
        row(&mut out, "start", format!("start_{i}"), &t, Relation::Eq, 0.0);
    }
    for i in tasks.clone() {
        for j in tasks.clone().filter(|&j| j != i) {
            let mut t = vec![term(1.0, format!("b_{j}")), term(-1.0, format!("s_{i}"))];
            t.extend(vehicles.clone().map(|k| term(-m, x(i, j, k))));
            let rhs = w + instance.travel(i, j) - m;
            row(&mut out, "prop", format!("prop_{i}_{j}"), &t, Relation::Ge, rhs);
        }
    }
    for j in tasks.clone() {
        let mut t = vec![term(1.0, format!("b_{j}"))];
        t.extend(vehicles.clone().map(|k| term(-m, x(0, j, k))));
        let rhs = instance.travel(0, j) - m;
        row(&mut out, "first", format!("first_{j}"), &t, Relation::Ge, rhs);
    }

    // z_ij = 1 exactly when i and j share a vehicle
    for &(i, j) in &pairs {
        for k in vehicles.clone() {
            let up = format!("up_{i}_{j}_{k}");
            let t = [term(1.0, up.clone()), term(-1.0, v(i, k)), term(1.0, v(j, k))];
            row(&mut out, "absa", format!("absa_{i}_{j}_{k}"), &t, Relation::Ge, 0.0);
            let t = [term(1.0, up), term(1.0, v(i, k)), term(-1.0, v(j, k))];
            row(&mut out, "absb", format!("absb_{i}_{j}_{k}"), &t, Relation::Ge, 0.0);
        }
    }
    for &(i, j) in &pairs {
        let mut t: Vec<Term> = vehicles.clone().map(|k| term(1.0, format!("up_{i}_{j}_{k}"))).collect();
        t.push(term(2.0, format!("z_{i}_{j}")));
        row(&mut out, "same", format!("same_{i}_{j}"), &t, Relation::Eq, 2.0);
    }
    // start separation between tasks on different vehicles
    for &(i, j) in &pairs {
        let g = instance.separation(i, j);
        let z = format!("z_{i}_{j}");
        let t = [term(1.0, format!("s_{j}")), term(-1.0, format!("s_{i}")), term(m, z.clone())];
        row(&mut out, "sepa", format!("sepa_{i}_{j}"), &t, Relation::Ge, g);
        let t = [term(1.0, format!("s_{i}")), term(-1.0, format!("s_{j}")), term(m, z)];
        row(&mut out, "sepb", format!("sepb_{i}_{j}"), &t, Relation::Ge, g);
    }

    // completion after the return leg, makespan over vehicles
    for i in tasks.clone() {
        for k in vehicles.clone() {
            let t = [term(1.0, format!("C_{k}")), term(-1.0, format!("s_{i}")), term(-m, x(i, 0, k))];
            let rhs = w + instance.travel(i, 0) - m;
            row(&mut out, "done", format!("done_{i}_{k}"), &t, Relation::Ge, rhs);
        }
    }
    for k in vehicles.clone() {
        let t = [term(1.0, "T".to_string()), term(-1.0, format!("C_{k}"))];
        row(&mut out, "span", format!("span_{k}"), &t, Relation::Ge, 0.0);
    }

    out.push_str("Binaries\n");
    let mut binaries: Vec<String> = Vec::new();
    for i in nodes.clone() {
        for j in nodes.clone().filter(|&j| j != i) {
            binaries.extend(vehicles.clone().map(|k| x(i, j, k)));
        }
    }
    for i in tasks.clone() {
        binaries.extend(vehicles.clone().map(|k| v(i, k)));
    }
    binaries.extend(vehicles.clone().map(|k| format!("u_{k}")));
    binaries.extend(pairs.iter().map(|(i, j)| format!("z_{i}_{j}")));
    for chunk in binaries.chunks(10) {
        out.push(' ');
        out.push_str(&chunk.join(" "));
        out.push('\n');
    }
    out.push_str("End\n");

    let counts = MilpCounts {
        variables: MilpCounts::closed_form(n, k_max).variables,
        constraints: rows,
    };
    Ok(MilpModel {
        n_tasks: n,
        n_vehicles: k_max,
        big_m: m,
        counts,
        text: out,
    })
}

/// LP text of the model; see [`build_milp`].
pub fn export_milp(instance: &Instance, big_m: Option<f64>) -> Result<String> {
    Ok(build_milp(instance, big_m)?.text)
}

/// Reads variable values from a solver solution file. Accepts `name value`
/// rows and the `index name value [reduced cost]` rows some solvers write;
/// other lines (headers, status) are skipped.
pub fn read_solution_values(text: &str) -> BTreeMap<String, f64> {
    let mut values = BTreeMap::new();
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().filter(|t| *t != "**").collect();
        let is_num = |t: &str| t.parse::<f64>().is_ok();
        let start = match toks.as_slice() {
            [a, b, c, ..] if a.parse::<usize>().is_ok() && !is_num(b) && is_num(c) => 1,
            [a, b, ..] if !is_num(a) && is_num(b) => 0,
            _ => continue,
        };
        let name = toks[start];
        if name.starts_with('#') || name.ends_with(':') {
            continue;
        }
        values.insert(name.to_string(), toks[start + 1].parse().expect("checked numeric"));
    }
    values
}

/// Rebuilds routes and timings from solver values, ready for
/// `validate_schedule`. Routes follow the arcs with value above 0.5.
pub fn solution_from_milp_values(
    instance: &Instance,
    values: &BTreeMap<String, f64>,
) -> Result<(Solution, Schedule)> {
    let n = instance.n_tasks();
    let k_max = instance.k_max();
    let get = |name: String| values.get(&name).copied().unwrap_or(0.0);
    let mut routes = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut route = Vec::new();
        let mut at = 0;
        loop {
            let next = (0..=n).find(|&j| j != at && get(format!("x_{at}_{j}_{k}")) > 0.5);
            match next {
                Some(0) => break,
                Some(j) if route.len() < n => {
                    route.push(j);
                    at = j;
                }
                Some(_) => {
                    return Err(Error::InvalidInput(format!("vehicle {k} arcs form a cycle")));
                }
                None => {
                    if at == 0 {
                        break;
                    }
                    return Err(Error::InvalidInput(format!(
                        "vehicle {k} route stops at task {at} without returning"
                    )));
                }
            }
        }
        routes.push(route);
    }
    let solution = Solution::new(routes);
    solution.validate(n, k_max)?;

    let arrival: Vec<f64> = (1..=n).map(|i| get(format!("b_{i}"))).collect();
    let wait: Vec<f64> = (1..=n).map(|i| get(format!("t_{i}"))).collect();
    let start: Vec<f64> = (1..=n).map(|i| get(format!("s_{i}"))).collect();
    let w = instance.service_time();
    let mut vehicle_stats = Vec::with_capacity(k_max);
    let mut vehicle_completion = Vec::with_capacity(k_max);
    for (k, route) in solution.routes.iter().enumerate() {
        let mut movement = 0.0;
        let mut prev = 0;
        for &t in route {
            movement += instance.travel(prev, t);
            prev = t;
        }
        movement += instance.travel(prev, 0);
        vehicle_stats.push(VehicleStats {
            sweep: route.len() as f64 * w,
            wait: route.iter().map(|&t| wait[t - 1]).sum(),
            movement,
        });
        let own = route.last().map_or(0.0, |&l| start[l - 1] + w + instance.travel(l, 0));
        vehicle_completion.push(values.get(&format!("C_{}", k + 1)).copied().unwrap_or(own));
    }
    let makespan = vehicle_completion.iter().copied().fold(0.0, f64::max);
    let total_wait = wait.iter().sum();
    Ok((
        solution,
        Schedule {
            arrival,
            wait,
            start,
            vehicle_completion,
            makespan,
            vehicle_stats,
            total_wait,
        },
    ))
}
