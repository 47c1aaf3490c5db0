//! Shared fixtures for the benchmarks.

use stcvrp::ga::random_routes;
use stcvrp::instances::{generate, GeneratorSpec, Pattern};
use stcvrp::rng::seeded;
use stcvrp::{Instance, Solution};

/// Grid instance with the default generator settings.
pub fn grid(n: usize, k: usize, seed: u64) -> Instance {
    generate(&GeneratorSpec::new(Pattern::Grid, n, k, 150.0, seed)).expect("valid spec")
}

/// `count` random route sets for `inst`, reproducible from `seed`.
pub fn random_solutions(inst: &Instance, count: usize, seed: u64) -> Vec<Solution> {
    let mut rng = seeded(seed);
    (0..count).map(|_| random_routes(inst, &mut rng)).collect()
}
