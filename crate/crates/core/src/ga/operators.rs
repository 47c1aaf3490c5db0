//! Selection, crossover and mutation on multi-route chromosomes.

use rand::Rng;

use crate::model::{Instance, Solution};

/// Improvements smaller than this are treated as ties.
const COST_EPS: f64 = 1e-9;

/// Euclidean length in meters of depot -> route -> depot.
pub fn approx_route_cost(route: &[usize], instance: &Instance) -> f64 {
    let Some((&first, _)) = route.split_first() else {
        return 0.0;
    };
    let inner: f64 = route.windows(2).map(|w| instance.distance(w[0], w[1])).sum();
    instance.distance(0, first) + inner + instance.distance(*route.last().unwrap(), 0)
}

/// Index of the tournament winner among `size` uniform draws (with
/// replacement). Lowest makespan wins, lower index on ties.
pub fn tournament_select<R: Rng + ?Sized>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    assert!(!fitness.is_empty(), "tournament over an empty population");
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let challenger = rng.random_range(0..fitness.len());
        let c = fitness[challenger].total_cmp(&fitness[best]);
        if c.is_lt() || (c.is_eq() && challenger < best) {
            best = challenger;
        }
    }
    best
}

/// One OX1 child: `keep[lo..=hi]` stays in place, the remaining positions
/// are filled with the missing tasks in the order they appear in `fill`,
/// reading and writing from `hi + 1` onwards with wrap-around.
pub fn ox1_child(keep: &[usize], fill: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = keep.len();
    debug_assert_eq!(n, fill.len());
    debug_assert!(lo <= hi && hi < n);
    let max_id = keep.iter().copied().max().unwrap_or(0);
    let mut kept = vec![false; max_id + 1];
    let mut child = vec![0; n];
    for p in lo..=hi {
        child[p] = keep[p];
        kept[keep[p]] = true;
    }
    let mut write = (hi + 1) % n;
    for off in 0..n {
        let task = fill[(hi + 1 + off) % n];
        if !kept[task] {
            child[write] = task;
            write = (write + 1) % n;
        }
    }
    child
}

/// Order crossover over the flattened route sets. Each child keeps the route
/// sizes of the parent that donated its preserved segment.
pub fn ox1_crossover<R: Rng + ?Sized>(a: &Solution, b: &Solution, rng: &mut R) -> (Solution, Solution) {
    let pa = a.flatten();
    let pb = b.flatten();
    let n = pa.len();
    if n < 2 {
        return (a.clone(), b.clone());
    }
    let i = rng.random_range(0..n);
    let j = rng.random_range(0..n);
    let (lo, hi) = (i.min(j), i.max(j));
    let mut c1 = Solution::from_permutation(&ox1_child(&pa, &pb, lo, hi), &a.route_lengths());
    let mut c2 = Solution::from_permutation(&ox1_child(&pb, &pa, lo, hi), &b.route_lengths());
    c1.repair_empty_routes();
    c2.repair_empty_routes();
    (c1, c2)
}

/// Reverses `route[i..=j]`.
pub fn reverse_segment(route: &mut [usize], i: usize, j: usize) {
    route[i..=j].reverse();
}

/// Reverses a random segment of a random route with at least three tasks.
/// Returns `false` (leaving the solution untouched) if no route is long enough.
pub fn two_opt_move<R: Rng + ?Sized>(solution: &mut Solution, rng: &mut R) -> bool {
    let eligible: Vec<usize> = (0..solution.routes.len())
        .filter(|&k| solution.routes[k].len() >= 3)
        .collect();
    if eligible.is_empty() {
        return false;
    }
    let route = &mut solution.routes[eligible[rng.random_range(0..eligible.len())]];
    let i = rng.random_range(0..route.len() - 1);
    let j = rng.random_range(i + 1..route.len());
    reverse_segment(route, i, j);
    true
}

/// Cheapest slot for `task` over every route and position, by added
/// Euclidean length. Ties go to the earliest route, then earliest position.
pub fn best_insertion(solution: &Solution, task: usize, instance: &Instance) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_delta = f64::INFINITY;
    for (k, route) in solution.routes.iter().enumerate() {
        for pos in 0..=route.len() {
            let prev = if pos == 0 { 0 } else { route[pos - 1] };
            let next = route.get(pos).copied().unwrap_or(0);
            let delta = instance.distance(prev, task) + instance.distance(task, next)
                - instance.distance(prev, next);
            if delta < best_delta - COST_EPS {
                best_delta = delta;
                best = (k, pos);
            }
        }
    }
    best
}

/// Removes a random task (never the last one of its route) and reinserts it
/// at its cheapest slot. Returns `false` if every route holds a single task.
pub fn insertion_move<R: Rng + ?Sized>(solution: &mut Solution, instance: &Instance, rng: &mut R) -> bool {
    let movable: usize = solution
        .routes
        .iter()
        .filter(|r| r.len() >= 2)
        .map(Vec::len)
        .sum();
    if movable == 0 {
        return false;
    }
    let mut pick = rng.random_range(0..movable);
    let (k, pos) = solution
        .routes
        .iter()
        .enumerate()
        .filter(|(_, r)| r.len() >= 2)
        .find_map(|(k, r)| {
            if pick < r.len() {
                Some((k, pick))
            } else {
                pick -= r.len();
                None
            }
        })
        .expect("pick falls inside a movable route");
    let task = solution.routes[k].remove(pos);
    let (to, at) = best_insertion(solution, task, instance);
    solution.routes[to].insert(at, task);
    true
}

/// Hybrid mutation: a 2-opt segment reversal with probability `mix`,
/// otherwise a best-position reinsertion. Falls back to the other move when
/// the chosen one does not apply.
pub fn mutate<R: Rng + ?Sized>(solution: &mut Solution, instance: &Instance, rng: &mut R, mix: f64) {
    if rng.random::<f64>() < mix {
        if !two_opt_move(solution, rng) {
            insertion_move(solution, instance, rng);
        }
    } else if !insertion_move(solution, instance, rng) {
        two_opt_move(solution, rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Params, Point};
    use crate::rng::seeded;

    fn line3() -> Instance {
        Instance::new(
            "line3",
            Point::new(0.0, 0.0),
            vec![Point::new(40.0, 0.0), Point::new(80.0, 0.0), Point::new(-40.0, 0.0)],
            Params::standard(1, 150.0),
        )
        .unwrap()
    }

    #[test]
    fn route_cost_examples() {
        let inst = line3();
        assert_eq!(approx_route_cost(&[], &inst), 0.0);
        assert_eq!(approx_route_cost(&[1, 2], &inst), 160.0);
        assert_eq!(approx_route_cost(&[2, 1], &inst), 160.0);
        assert_eq!(approx_route_cost(&[1, 3, 2], &inst), 320.0);
    }

    #[test]
    fn ox1_reference_trace() {
        let a = [1, 2, 3, 4, 5, 6, 7];
        let b = [3, 7, 5, 1, 6, 2, 4];
        assert_eq!(ox1_child(&a, &b, 2, 4), vec![1, 6, 3, 4, 5, 2, 7]);
    }

    #[test]
    fn ox1_identical_parents_is_a_fixed_point() {
        let p = Solution::new(vec![vec![3, 1], vec![5, 2, 4]]);
        let mut rng = seeded(11);
        for _ in 0..50 {
            let (c1, c2) = ox1_crossover(&p, &p, &mut rng);
            assert_eq!(c1, p);
            assert_eq!(c2, p);
        }
    }

    #[test]
    fn ox1_children_keep_parent_route_sizes() {
        let a = Solution::new(vec![vec![1, 2, 3], vec![4], vec![5, 6]]);
        let b = Solution::new(vec![vec![6], vec![5, 4, 3], vec![2, 1]]);
        let mut rng = seeded(5);
        for _ in 0..100 {
            let (c1, c2) = ox1_crossover(&a, &b, &mut rng);
            assert_eq!(c1.route_lengths(), a.route_lengths());
            assert_eq!(c2.route_lengths(), b.route_lengths());
            assert!(c1.validate(6, 3).is_ok() && c2.validate(6, 3).is_ok());
        }
    }

    #[test]
    fn segment_reversal() {
        let mut r = vec![1, 2, 3, 4, 5];
        reverse_segment(&mut r, 1, 3);
        assert_eq!(r, vec![1, 4, 3, 2, 5]);
    }

    #[test]
    fn insertion_prefers_earliest_cheapest_slot() {
        // lengths if task 3 goes at 0, 1, 2: 240, 320, 240
        let inst = line3();
        let s = Solution::new(vec![vec![1, 2]]);
        for (pos, expected) in [(0, 240.0), (1, 320.0), (2, 240.0)] {
            let mut r = vec![1, 2];
            r.insert(pos, 3);
            assert_eq!(approx_route_cost(&r, &inst), expected);
        }
        assert_eq!(best_insertion(&s, 3, &inst), (0, 0));
    }

    #[test]
    fn tournament_picks_the_minimum() {
        let fitness = [100.0, 90.0, 120.0];
        let mut rng = seeded(3);
        // with size 64 every index is drawn with overwhelming probability
        assert_eq!(tournament_select(&fitness, 64, &mut rng), 1);
        let tied = [90.0, 90.0];
        for seed in 0..20 {
            let mut rng = seeded(seed);
            let w = tournament_select(&tied, 64, &mut rng);
            assert_eq!(w, 0);
        }
    }

    #[test]
    fn tournament_winner_beats_every_draw() {
        let fitness = [5.0, 3.0, 9.0, 3.0, 7.0];
        for seed in 0..200 {
            let mut draws = seeded(seed);
            let sampled: Vec<usize> = (0..3).map(|_| draws.random_range(0..fitness.len())).collect();
            let mut rng = seeded(seed);
            let w = tournament_select(&fitness, 3, &mut rng);
            let expected = *sampled
                .iter()
                .min_by(|&&a, &&b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)))
                .unwrap();
            assert_eq!(w, expected);
        }
    }

    #[test]
    fn moves_skip_when_not_applicable() {
        let inst = line3();
        let mut rng = seeded(1);
        let mut s = Solution::new(vec![vec![1, 2]]);
        assert!(!two_opt_move(&mut s, &mut rng));
        let mut singles = Solution::new(vec![vec![1], vec![2], vec![3]]);
        assert!(!insertion_move(&mut singles, &inst, &mut rng));
        assert_eq!(singles, Solution::new(vec![vec![1], vec![2], vec![3]]));
    }
}
