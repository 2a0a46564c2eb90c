//! Shared inputs for the benchmarks.

use czlab::experiments::RandomInput;
use czlab::{GridFunction, Window};

/// The seeded random input used by the experiments, sampled at depth `j`.
pub fn random_input(n: usize, j: u32, seed: u64) -> GridFunction {
    RandomInput::generate(n, seed)
        .sample(&Window::unit(n, j))
        .expect("depth above the finest piece level")
}
