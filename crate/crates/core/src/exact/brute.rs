//! Exhaustive search over ordered route partitions.

use crate::error::{Error, Result};
use crate::model::{Instance, Solution};
use crate::simulator;

/// Number of route sets with `k` non-empty ordered routes over `n` tasks,
/// `n! * C(n - 1, k - 1)`, or `None` on overflow.
pub fn enumeration_size(n: usize, k: usize) -> Option<u128> {
    if k == 0 || k > n {
        return Some(0);
    }
    let mut count: u128 = 1;
    for i in 2..=n as u128 {
        count = count.checked_mul(i)?;
    }
    // C(n-1, k-1) built incrementally stays integral at each step
    let mut binom: u128 = 1;
    for i in 0..(k - 1) as u128 {
        binom = binom.checked_mul(n as u128 - 1 - i)? / (i + 1);
    }
    count.checked_mul(binom)
}

/// Rearranges to the next lexicographic permutation; `false` after the last.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Advances `cuts` (strictly increasing, drawn from `1..n`) to the next
/// combination in lexicographic order.
fn next_combination(cuts: &mut [usize], n: usize) -> bool {
    let m = cuts.len();
    for i in (0..m).rev() {
        if cuts[i] < n - m + i {
            cuts[i] += 1;
            for j in i + 1..m {
                cuts[j] = cuts[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn lengths_from_cuts(cuts: &[usize], n: usize) -> Vec<usize> {
    let mut prev = 0;
    let mut lengths: Vec<usize> = cuts
        .iter()
        .map(|&c| {
            let l = c - prev;
            prev = c;
            l
        })
        .collect();
    lengths.push(n - prev);
    lengths
}

/// Evaluates every route set and returns a minimiser. Among equal makespans
/// the lexicographically smallest flattened permutation wins, then the
/// earliest cut positions.
pub fn brute_force(instance: &Instance, limit: u128) -> Result<(Solution, f64)> {
    let n = instance.n_tasks();
    let k = instance.k_max();
    let count = enumeration_size(n, k).unwrap_or(u128::MAX);
    if count > limit {
        return Err(Error::EnumerationTooLarge { count, limit });
    }
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut best: Option<(Solution, f64)> = None;
    loop {
        let mut cuts: Vec<usize> = (1..k).collect();
        loop {
            let candidate = Solution::from_permutation(&perm, &lengths_from_cuts(&cuts, n));
            let t = simulator::makespan_unchecked(instance, &candidate);
            if best.as_ref().is_none_or(|(_, b)| t < *b) {
                best = Some((candidate, t));
            }
            if !next_combination(&mut cuts, n) {
                break;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one route set exists"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Params, Point};
    use crate::rng::seeded;
    use rand::Rng;

    fn inst(tasks: &[(f64, f64)], k: usize) -> Instance {
        Instance::new(
            "tiny",
            Point::new(0.0, 0.0),
            tasks.iter().map(|&(x, y)| Point::new(x, y)).collect(),
            Params::standard(k, 150.0),
        )
        .unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(enumeration_size(3, 2), Some(12));
        assert_eq!(enumeration_size(6, 2), Some(3600));
        assert_eq!(enumeration_size(4, 4), Some(24));
        assert_eq!(enumeration_size(5, 1), Some(120));
        assert_eq!(enumeration_size(40, 3), None);
    }

    #[test]
    fn enumerates_every_route_set_once() {
        for (n, k) in [(3, 2), (4, 2), (4, 3), (5, 3)] {
            let mut seen = std::collections::HashSet::new();
            let mut perm: Vec<usize> = (1..=n).collect();
            loop {
                let mut cuts: Vec<usize> = (1..k).collect();
                loop {
                    let s = Solution::from_permutation(&perm, &lengths_from_cuts(&cuts, n));
                    s.validate(n, k).unwrap();
                    assert!(seen.insert(s.routes));
                    if !next_combination(&mut cuts, n) {
                        break;
                    }
                }
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            assert_eq!(seen.len() as u128, enumeration_size(n, k).unwrap());
        }
    }

    #[test]
    fn line_instance_optimum() {
        let (sol, t) = brute_force(&inst(&[(40.0, 0.0), (80.0, 0.0), (-40.0, 0.0)], 2), 1000).unwrap();
        assert_eq!(t, 48.0);
        assert_eq!(sol.routes, vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn two_task_conflict() {
        let (_, t) = brute_force(&inst(&[(40.0, 0.0), (-40.0, 0.0)], 2), 10).unwrap();
        assert!((t - 27.7333).abs() < 1e-3, "{t}");
    }

    #[test]
    fn refuses_large_enumerations() {
        let i = inst(&[(40.0, 0.0), (80.0, 0.0), (-40.0, 0.0)], 2);
        assert_eq!(
            brute_force(&i, 11),
            Err(Error::EnumerationTooLarge { count: 12, limit: 11 })
        );
    }

    #[test]
    fn never_worse_than_random_samples() {
        let mut rng = seeded(21);
        let pts: Vec<(f64, f64)> = (0..5)
            .map(|_| (rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0)))
            .collect();
        let i = inst(&pts, 2);
        let (_, best) = brute_force(&i, 10_000).unwrap();
        for _ in 0..10_000 {
            let s = crate::ga::random_routes(&i, &mut rng);
            assert!(best <= simulator::evaluate(&i, &s).unwrap().makespan);
        }
    }
}
