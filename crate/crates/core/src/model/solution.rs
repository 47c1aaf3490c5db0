use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One ordered task list per vehicle. Task ids run `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution {
    pub routes: Vec<Vec<usize>>,
}

impl Solution {
    pub fn new(routes: Vec<Vec<usize>>) -> Self {
        Self { routes }
    }

    pub fn n_vehicles(&self) -> usize {
        self.routes.len()
    }

    pub fn n_tasks(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }

    /// Routes concatenated in vehicle order.
    pub fn flatten(&self) -> Vec<usize> {
        self.routes.iter().flatten().copied().collect()
    }

    pub fn route_lengths(&self) -> Vec<usize> {
        self.routes.iter().map(Vec::len).collect()
    }

    /// Splits a task permutation into consecutive routes of the given lengths.
    pub fn from_permutation(perm: &[usize], lengths: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), lengths.iter().sum::<usize>());
        let mut routes = Vec::with_capacity(lengths.len());
        let mut at = 0;
        for &len in lengths {
            routes.push(perm[at..at + len].to_vec());
            at += len;
        }
        Self { routes }
    }

    /// Checks that every task `1..=n_tasks` appears exactly once. Empty
    /// routes are tolerated; see [`Solution::validate`] for the strict form.
    pub fn check_partition(&self, n_tasks: usize, k_max: usize) -> Result<()> {
        if self.routes.len() != k_max {
            return Err(Error::InvalidSolution(format!(
                "expected {k_max} routes, got {}",
                self.routes.len()
            )));
        }
        let mut seen = vec![false; n_tasks + 1];
        for (k, route) in self.routes.iter().enumerate() {
            for &task in route {
                if task == 0 || task > n_tasks {
                    return Err(Error::InvalidSolution(format!(
                        "route {} visits unknown task {task}",
                        k + 1
                    )));
                }
                if std::mem::replace(&mut seen[task], true) {
                    return Err(Error::InvalidSolution(format!("task {task} is visited twice")));
                }
            }
        }
        if let Some(missing) = (1..=n_tasks).find(|&t| !seen[t]) {
            return Err(Error::InvalidSolution(format!("task {missing} is never visited")));
        }
        Ok(())
    }

    /// Partition check plus the requirement that every vehicle serves a task.
    pub fn validate(&self, n_tasks: usize, k_max: usize) -> Result<()> {
        self.check_partition(n_tasks, k_max)?;
        if let Some(k) = self.routes.iter().position(Vec::is_empty) {
            return Err(Error::InvalidSolution(format!("route {} is empty", k + 1)));
        }
        Ok(())
    }

    /// Fills each empty route with the last task of the currently longest
    /// route (lowest index on ties). No-op when there are fewer tasks than routes.
    pub fn repair_empty_routes(&mut self) {
        if self.n_tasks() < self.routes.len() {
            return;
        }
        while let Some(empty) = self.routes.iter().position(Vec::is_empty) {
            let longest = self
                .routes
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .expect("at least one route");
            let task = self.routes[longest].pop().expect("longest route is non-empty");
            self.routes[empty].push(task);
        }
    }

    /// Vehicle index (0-based) serving each task; entry 0 is unused.
    pub fn vehicle_of(&self, n_tasks: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; n_tasks + 1];
        for (k, route) in self.routes.iter().enumerate() {
            for &t in route {
                if t <= n_tasks {
                    owner[t] = Some(k);
                }
            }
        }
        owner
    }
}

impl From<Vec<Vec<usize>>> for Solution {
    fn from(routes: Vec<Vec<usize>>) -> Self {
        Self { routes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_errors() {
        let ok = Solution::new(vec![vec![1, 3], vec![2]]);
        assert!(ok.validate(3, 2).is_ok());
        assert!(Solution::new(vec![vec![1, 1], vec![2, 3]]).validate(3, 2).is_err());
        assert!(Solution::new(vec![vec![1], vec![2]]).validate(3, 2).is_err());
        assert!(Solution::new(vec![vec![1, 4], vec![2, 3]]).validate(3, 2).is_err());
        assert!(Solution::new(vec![vec![1, 2, 3]]).validate(3, 2).is_err());

        let empty = Solution::new(vec![vec![1, 2, 3], vec![]]);
        assert!(empty.check_partition(3, 2).is_ok());
        assert!(empty.validate(3, 2).is_err());
    }

    #[test]
    fn repair_steals_from_longest() {
        let mut s = Solution::new(vec![vec![1, 2], vec![], vec![3, 4, 5], vec![]]);
        s.repair_empty_routes();
        // first gap takes 5 from the 3-task route, second takes 2 from route 1 (tie, lowest index)
        assert_eq!(s.routes, vec![vec![1], vec![5], vec![3, 4], vec![2]]);
        assert!(s.validate(5, 4).is_ok());
    }

    #[test]
    fn permutation_round_trip() {
        let s = Solution::new(vec![vec![4, 1], vec![3], vec![2, 5, 6]]);
        let back = Solution::from_permutation(&s.flatten(), &s.route_lengths());
        assert_eq!(back, s);
    }
}
