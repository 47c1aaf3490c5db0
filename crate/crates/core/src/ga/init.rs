//! Initial population: spatial clustering, nearest-neighbor construction,
//! angular balanced allocation and uniform random route sets.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, Point, Solution};

const KMEANS_ITERATIONS: usize = 50;

/// Builds `n` route sets, a quarter from each construction strategy
/// (random takes the remainder). Copies of a deterministic construction
/// beyond the first get one random task swap.
pub fn init_population<R: Rng + ?Sized>(instance: &Instance, n: usize, rng: &mut R) -> Result<Vec<Solution>> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "population needs at least 4 individuals, got {n}"
        )));
    }
    if instance.n_tasks() < instance.k_max() {
        return Err(Error::InvalidInstance(format!(
            "{} tasks for {} vehicles",
            instance.n_tasks(),
            instance.k_max()
        )));
    }
    let share = n / 4;
    let mut pop = Vec::with_capacity(n);

    let bases = [
        kmeans_routes(instance, rng),
        nearest_neighbor_routes(instance),
        balanced_routes(instance),
    ];
    for base in bases {
        pop.push(base.clone());
        for _ in 1..share {
            let mut copy = base.clone();
            swap_two_tasks(&mut copy, rng);
            pop.push(copy);
        }
    }
    while pop.len() < n {
        pop.push(random_routes(instance, rng));
    }
    Ok(pop)
}

/// Exchanges two tasks at random flattened positions; route sizes are kept.
fn swap_two_tasks<R: Rng + ?Sized>(solution: &mut Solution, rng: &mut R) {
    let mut perm = solution.flatten();
    if perm.len() < 2 {
        return;
    }
    let picked = index::sample(rng, perm.len(), 2);
    perm.swap(picked.index(0), picked.index(1));
    *solution = Solution::from_permutation(&perm, &solution.route_lengths());
}

/// Uniform random permutation cut into `k_max` non-empty routes.
pub fn random_routes<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Solution {
    let n = instance.n_tasks();
    let k = instance.k_max();
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    let mut cuts: Vec<usize> = index::sample(rng, n - 1, k - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut lengths = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        lengths.push(c - prev);
        prev = c;
    }
    Solution::from_permutation(&perm, &lengths)
}

/// Vehicles take turns, each extending its route with the unvisited task
/// nearest to its current position (lowest id on ties).
pub fn nearest_neighbor_routes(instance: &Instance) -> Solution {
    let n = instance.n_tasks();
    let k = instance.k_max();
    let mut visited = vec![false; n + 1];
    let mut position = vec![0usize; k];
    let mut routes = vec![Vec::new(); k];
    let mut remaining = n;
    while remaining > 0 {
        for v in 0..k {
            if remaining == 0 {
                break;
            }
            let next = nearest_unvisited(instance, position[v], (1..=n).filter(|&t| !visited[t]));
            visited[next] = true;
            routes[v].push(next);
            position[v] = next;
            remaining -= 1;
        }
    }
    Solution::new(routes)
}

fn nearest_unvisited(instance: &Instance, from: usize, candidates: impl Iterator<Item = usize>) -> usize {
    let mut best = None;
    let mut best_d = f64::INFINITY;
    for t in candidates {
        let d = instance.distance(from, t);
        if d < best_d {
            best_d = d;
            best = Some(t);
        }
    }
    best.expect("at least one candidate")
}

/// Orders `members` by nearest-neighbor chaining from the depot.
fn chain_from_depot(instance: &Instance, members: &[usize]) -> Vec<usize> {
    let mut left: Vec<usize> = members.to_vec();
    left.sort_unstable();
    let mut order = Vec::with_capacity(left.len());
    let mut at = 0;
    while !left.is_empty() {
        let next = nearest_unvisited(instance, at, left.iter().copied());
        left.retain(|&t| t != next);
        order.push(next);
        at = next;
    }
    order
}

/// Tasks sorted by angle around the depot and dealt in contiguous blocks of
/// `ceil(N / K)`; short fleets are topped up by the empty-route repair.
pub fn balanced_routes(instance: &Instance) -> Solution {
    let n = instance.n_tasks();
    let k = instance.k_max();
    let depot = instance.depot();
    let mut order: Vec<(f64, usize)> = instance
        .tasks()
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.y - depot.y).atan2(p.x - depot.x), i + 1))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let block = n.div_ceil(k);
    let mut routes: Vec<Vec<usize>> = order
        .chunks(block)
        .map(|c| c.iter().map(|&(_, t)| t).collect())
        .collect();
    routes.resize(k, Vec::new());
    let mut s = Solution::new(routes);
    s.repair_empty_routes();
    s
}

/// Lloyd's k-means over task coordinates with farthest-point seeding (the
/// first centre is drawn from `rng`). Each cluster becomes one route,
/// ordered by nearest-neighbor chaining from the depot.
pub fn kmeans_routes<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Solution {
    let k = instance.k_max();
    let assignment = kmeans(instance.tasks(), k, rng);
    let mut clusters = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        clusters[c].push(i + 1);
    }
    let routes = clusters.iter().map(|m| chain_from_depot(instance, m)).collect();
    let mut s = Solution::new(routes);
    s.repair_empty_routes();
    s
}

/// Cluster index per point.
pub fn kmeans<R: Rng + ?Sized>(points: &[Point], k: usize, rng: &mut R) -> Vec<usize> {
    let n = points.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..n)]);
    let mut nearest = vec![f64::INFINITY; n];
    while centers.len() < k {
        let last = *centers.last().unwrap();
        let mut far = 0;
        for (i, p) in points.iter().enumerate() {
            nearest[i] = nearest[i].min(p.distance(&last));
            if nearest[i] > nearest[far] {
                far = i;
            }
        }
        centers.push(points[far]);
    }

    let assign = |centers: &[Point]| -> Vec<usize> {
        points
            .iter()
            .map(|p| {
                let mut best = 0;
                for (c, ctr) in centers.iter().enumerate().skip(1) {
                    if p.distance(ctr) < p.distance(&centers[best]) {
                        best = c;
                    }
                }
                best
            })
            .collect()
    };

    let mut assignment = assign(&centers);
    for _ in 0..KMEANS_ITERATIONS {
        let mut sum = vec![(0.0, 0.0, 0usize); k];
        for (p, &c) in points.iter().zip(&assignment) {
            sum[c].0 += p.x;
            sum[c].1 += p.y;
            sum[c].2 += 1;
        }
        for (c, &(sx, sy, m)) in sum.iter().enumerate() {
            if m > 0 {
                centers[c] = Point::new(sx / m as f64, sy / m as f64);
            }
        }
        let next = assign(&centers);
        if next == assignment {
            break;
        }
        assignment = next;
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Params;
    use crate::rng::seeded;

    fn inst(points: &[(f64, f64)], k: usize) -> Instance {
        Instance::new(
            "init",
            Point::new(0.0, 0.0),
            points.iter().map(|&(x, y)| Point::new(x, y)).collect(),
            Params::standard(k, 150.0),
        )
        .unwrap()
    }

    fn scatter(n: usize, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = seeded(seed);
        (0..n)
            .map(|_| (rng.random_range(-200.0..200.0), rng.random_range(-200.0..200.0)))
            .collect()
    }

    #[test]
    fn nearest_neighbor_trace() {
        let i = inst(&[(40.0, 0.0), (80.0, 0.0), (-40.0, 0.0)], 2);
        assert_eq!(nearest_neighbor_routes(&i).routes, vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn kmeans_separates_obvious_clusters() {
        let i = inst(
            &[(100.0, 0.0), (102.0, 1.0), (-100.0, 0.0), (-101.0, 2.0), (0.0, 100.0), (1.0, 99.0)],
            3,
        );
        for seed in 0..10 {
            let s = kmeans_routes(&i, &mut seeded(seed));
            assert_eq!(s.routes.len(), 3);
            let mut groups: Vec<Vec<usize>> = s
                .routes
                .iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.sort();
                    r
                })
                .collect();
            groups.sort();
            assert_eq!(groups, vec![vec![1, 2], vec![3, 4], vec![5, 6]]);
        }
    }

    #[test]
    fn balanced_blocks_are_even() {
        let i = inst(&scatter(23, 4), 5);
        let s = balanced_routes(&i);
        assert!(s.validate(23, 5).is_ok());
        assert_eq!(s.route_lengths(), vec![5, 5, 5, 5, 3]);
        // N = 6, K = 4 leaves the last block empty before repair
        let i = inst(&scatter(6, 9), 4);
        assert!(balanced_routes(&i).validate(6, 4).is_ok());
    }

    #[test]
    fn every_strategy_yields_valid_partitions() {
        for (n, k) in [(4, 4), (5, 2), (25, 5), (50, 8)] {
            let i = inst(&scatter(n, n as u64), k);
            let mut rng = seeded(77);
            let pop = init_population(&i, 50, &mut rng).unwrap();
            assert_eq!(pop.len(), 50);
            for s in &pop {
                s.validate(n, k).unwrap();
            }
            assert_eq!(kmeans_routes(&i, &mut rng).routes.iter().filter(|r| !r.is_empty()).count(), k);
        }
    }

    #[test]
    fn population_size_floor() {
        let i = inst(&scatter(10, 1), 2);
        assert!(matches!(
            init_population(&i, 3, &mut seeded(0)),
            Err(Error::InvalidParameter(_))
        ));
    }
}
