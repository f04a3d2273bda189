// SPDX-License-Identifier: MIT OR Apache-2.0

//! Test signals, noise models, accuracy metrics and the Monte Carlo harness.
//!
//! Random numbers come from ChaCha8 seeded with the master seed; replication
//! `r` reads stream `r` of that generator, so results do not depend on how
//! replications are scheduled.

mod harness;
mod metrics;
mod signals;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use harness::{run_scenario, AccuracyReport, RepRecord, SimScenario, REPORT_SCHEMA};
pub use metrics::{hausdorff, max_location_error, max_norm_partial_sum};
pub use signals::{add_noise, gen_signal, Noise, Signal};

/// Generator for replication `rep` under `master`.
pub fn rng_for(master: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(rep);
    rng
}
