//! Generational genetic search over route sets, scored by the event-driven
//! scheduler.

mod init;
mod operators;

use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Solution};
use crate::rng::seeded;
use crate::simulator;

pub use init::{
    balanced_routes, init_population, kmeans, kmeans_routes, nearest_neighbor_routes, random_routes,
};
pub use operators::{
    approx_route_cost, best_insertion, insertion_move, mutate, ox1_child, ox1_crossover,
    reverse_segment, tournament_select, two_opt_move,
};

/// A best-ever drop must exceed this many seconds to reset the stagnation count.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_rate: f64,
    /// probability that a child is mutated once
    pub mutation_rate: f64,
    pub elite_count: usize,
    pub tournament_size: usize,
    /// generations without best-ever improvement before stopping
    pub stagnation_limit: usize,
    pub max_generations: usize,
    pub seed: u64,
    /// probability of choosing the 2-opt move over reinsertion
    pub mutation_mix: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            crossover_rate: 0.8,
            mutation_rate: 0.2,
            elite_count: 2,
            tournament_size: 3,
            stagnation_limit: 1000,
            max_generations: 20_000,
            seed: 0,
            mutation_mix: 0.5,
        }
    }
}

impl GaConfig {
    /// Defaults scaled to the instance: larger population and elite set past 100 tasks.
    pub fn for_instance(instance: &Instance) -> Self {
        if instance.n_tasks() > 100 {
            Self {
                population_size: 100,
                elite_count: 5,
                ..Self::default()
            }
        } else {
            Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        for (name, p) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
            ("mutation_mix", self.mutation_mix),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.population_size < 4 {
            return bad(format!("population_size must be at least 4, got {}", self.population_size));
        }
        if self.elite_count >= self.population_size {
            return bad(format!(
                "elite_count {} must be below population_size {}",
                self.elite_count, self.population_size
            ));
        }
        if self.tournament_size < 2 {
            return bad(format!("tournament_size must be at least 2, got {}", self.tournament_size));
        }
        if self.stagnation_limit < 1 {
            return bad("stagnation_limit must be at least 1".into());
        }
        if self.max_generations < 1 {
            return bad("max_generations must be at least 1".into());
        }
        Ok(())
    }
}

/// Statistics after one generation; generation 0 is the initial population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// best makespan found so far
    pub best_makespan: f64,
    /// mean makespan of the current population
    pub mean_makespan: f64,
    /// cumulative scheduler evaluations
    pub evaluations: u64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best: Solution,
    pub best_makespan: f64,
    /// best makespan in the initial population
    pub initial_best: f64,
    pub generations: usize,
    pub evaluations: u64,
    pub elapsed_s: f64,
    pub log: Vec<GenerationStats>,
}

impl GaResult {
    /// Compares everything except wall-clock measurements.
    pub fn same_search(&self, other: &GaResult) -> bool {
        self.best == other.best
            && self.best_makespan.to_bits() == other.best_makespan.to_bits()
            && self.initial_best.to_bits() == other.initial_best.to_bits()
            && self.generations == other.generations
            && self.evaluations == other.evaluations
            && self.log.len() == other.log.len()
            && self.log.iter().zip(&other.log).all(|(a, b)| {
                a.generation == b.generation
                    && a.best_makespan.to_bits() == b.best_makespan.to_bits()
                    && a.mean_makespan.to_bits() == b.mean_makespan.to_bits()
                    && a.evaluations == b.evaluations
            })
    }
}

/// Convergence log as CSV with a header row.
pub fn convergence_csv(log: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best_makespan,mean_makespan,evaluations,elapsed_s\n");
    for g in log {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            g.generation, g.best_makespan, g.mean_makespan, g.evaluations, g.elapsed_s
        );
    }
    out
}

fn evaluate_all(instance: &Instance, population: &[Solution]) -> Vec<f64> {
    population
        .par_iter()
        .map(|s| simulator::makespan_unchecked(instance, s))
        .collect()
}

fn best_index(fitness: &[f64]) -> usize {
    (0..fitness.len())
        .min_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)))
        .expect("non-empty population")
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Runs the genetic search. Every random draw comes from one generator seeded
/// with `config.seed`, and fitness evaluation (which may run in parallel)
/// consumes none, so a seed fully determines the outcome.
pub fn solve(instance: &Instance, config: &GaConfig) -> Result<GaResult> {
    config.validate()?;
    let clock = Instant::now();
    let mut rng = seeded(config.seed);

    let mut population = init_population(instance, config.population_size, &mut rng)?;
    let mut fitness = evaluate_all(instance, &population);
    let mut evaluations = population.len() as u64;

    let first = best_index(&fitness);
    let initial_best = fitness[first];
    let mut best = population[first].clone();
    let mut best_makespan = initial_best;
    let mut log = vec![GenerationStats {
        generation: 0,
        best_makespan,
        mean_makespan: mean(&fitness),
        evaluations,
        elapsed_s: clock.elapsed().as_secs_f64(),
    }];

    let mut stagnant = 0;
    let mut generation = 0;
    while generation < config.max_generations && stagnant < config.stagnation_limit {
        generation += 1;

        let mut ranked: Vec<usize> = (0..population.len()).collect();
        ranked.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
        let mut next: Vec<Solution> = ranked[..config.elite_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        let mut next_fitness: Vec<f64> = ranked[..config.elite_count].iter().map(|&i| fitness[i]).collect();

        let mut children = Vec::with_capacity(config.population_size - next.len());
        while next.len() + children.len() < config.population_size {
            let p1 = &population[tournament_select(&fitness, config.tournament_size, &mut rng)];
            let p2 = &population[tournament_select(&fitness, config.tournament_size, &mut rng)];
            let (mut c1, mut c2) = if rng.random::<f64>() < config.crossover_rate {
                ox1_crossover(p1, p2, &mut rng)
            } else {
                (p1.clone(), p2.clone())
            };
            for c in [&mut c1, &mut c2] {
                if rng.random::<f64>() < config.mutation_rate {
                    mutate(c, instance, &mut rng, config.mutation_mix);
                }
            }
            children.push(c1);
            if next.len() + children.len() < config.population_size {
                children.push(c2);
            }
        }
        debug_assert!(children
            .iter()
            .all(|c| c.validate(instance.n_tasks(), instance.k_max()).is_ok()));

        next_fitness.extend(evaluate_all(instance, &children));
        evaluations += children.len() as u64;
        next.extend(children);
        population = next;
        fitness = next_fitness;

        let gen_best = best_index(&fitness);
        if fitness[gen_best] < best_makespan - IMPROVEMENT_EPS {
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        if fitness[gen_best] < best_makespan {
            best_makespan = fitness[gen_best];
            best = population[gen_best].clone();
        }
        log.push(GenerationStats {
            generation,
            best_makespan,
            mean_makespan: mean(&fitness),
            evaluations,
            elapsed_s: clock.elapsed().as_secs_f64(),
        });
    }

    Ok(GaResult {
        best,
        best_makespan,
        initial_best,
        generations: generation,
        evaluations,
        elapsed_s: clock.elapsed().as_secs_f64(),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Params, Point};

    fn line3() -> Instance {
        Instance::new(
            "line3",
            Point::new(0.0, 0.0),
            vec![Point::new(40.0, 0.0), Point::new(80.0, 0.0), Point::new(-40.0, 0.0)],
            Params::standard(2, 150.0),
        )
        .unwrap()
    }

    fn grid(n_side: usize, k: usize) -> Instance {
        let tasks = (0..n_side * n_side)
            .map(|i| Point::new((i % n_side) as f64 * 40.0, (i / n_side) as f64 * 40.0))
            .collect();
        let c = (n_side - 1) as f64 * 20.0;
        Instance::new("grid", Point::new(c, c), tasks, Params::standard(k, 150.0)).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        let bad = [
            GaConfig {
                crossover_rate: 1.5,
                ..GaConfig::default()
            },
            GaConfig {
                mutation_rate: -0.1,
                ..GaConfig::default()
            },
            GaConfig {
                elite_count: 50,
                ..GaConfig::default()
            },
            GaConfig {
                tournament_size: 1,
                ..GaConfig::default()
            },
            GaConfig {
                stagnation_limit: 0,
                ..GaConfig::default()
            },
            GaConfig {
                population_size: 3,
                elite_count: 1,
                ..GaConfig::default()
            },
        ];
        for c in bad {
            assert!(matches!(solve(&line3(), &c), Err(Error::InvalidParameter(_))), "{c:?}");
        }
    }

    #[test]
    fn finds_line_optimum() {
        let r = solve(&line3(), &GaConfig::default().with_seed(1)).unwrap();
        assert_eq!(r.best_makespan, 48.0);
        assert_eq!(simulator::evaluate(&line3(), &r.best).unwrap().makespan, 48.0);
    }

    #[test]
    fn deterministic_and_monotone() {
        let inst = grid(5, 3);
        let cfg = GaConfig {
            stagnation_limit: 30,
            seed: 9,
            ..GaConfig::default()
        };
        let a = solve(&inst, &cfg).unwrap();
        let b = solve(&inst, &cfg).unwrap();
        assert!(a.same_search(&b));
        assert!(a.log.windows(2).all(|w| w[1].best_makespan <= w[0].best_makespan));
        assert!(a.best_makespan <= a.initial_best);
        assert_eq!(a.log.len(), a.generations + 1);
        assert_eq!(simulator::evaluate(&inst, &a.best).unwrap().makespan, a.best_makespan);
        assert_eq!(a.evaluations, 50 + a.generations as u64 * 48);
    }

    #[test]
    fn stops_at_generation_cap() {
        let cfg = GaConfig {
            max_generations: 7,
            ..GaConfig::default()
        };
        let r = solve(&grid(4, 2), &cfg).unwrap();
        assert_eq!(r.generations, 7);
    }

    #[test]
    fn csv_layout() {
        let r = solve(
            &line3(),
            &GaConfig {
                max_generations: 2,
                ..GaConfig::default()
            },
        )
        .unwrap();
        let csv = convergence_csv(&r.log);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "generation,best_makespan,mean_makespan,evaluations,elapsed_s");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,48,"));
    }

    #[test]
    fn defaults_scale_with_instance_size() {
        assert_eq!(GaConfig::for_instance(&grid(5, 2)).population_size, 50);
        let big = grid(11, 4);
        let cfg = GaConfig::for_instance(&big);
        assert_eq!((cfg.population_size, cfg.elite_count), (100, 5));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(20))]
            #[test]
            fn operators_preserve_the_partition(seed in any::<u64>(), k in 2usize..6) {
                let inst = grid(4, k);
                let mut rng = seeded(seed);
                let mut pop = init_population(&inst, 8, &mut rng).unwrap();
                for step in 0..500 {
                    let a = step % pop.len();
                    let b = (step * 7 + 3) % pop.len();
                    let (mut c1, c2) = ox1_crossover(&pop[a], &pop[b], &mut rng);
                    mutate(&mut c1, &inst, &mut rng, 0.5);
                    prop_assert!(c1.validate(16, k).is_ok(), "{:?}", c1);
                    prop_assert!(c2.validate(16, k).is_ok(), "{:?}", c2);
                    pop[a] = c1;
                    pop[b] = c2;
                }
            }
        }
    }
}
