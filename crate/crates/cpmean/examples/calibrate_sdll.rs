// SPDX-License-Identifier: MIT OR Apache-2.0

//! Regenerates the bundled SDLL calibration table.
//!
//! ```text
//! cargo run --release -p cpmean --example calibrate_sdll > crates/cpmean/data/sdll_c1.txt
//! ```
//!
//! Optional arguments: `reps` (default 3000) and `seed` (default 20240).

use cpmean::select::calibrate_sdll_c1;

const N_GRID: [usize; 9] = [50, 100, 200, 300, 500, 1000, 2000, 3000, 5000];
const ALPHAS: [f64; 2] = [0.05, 0.1];

fn main() -> cpmean::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps = args.next().map_or(3000, |a| a.parse().expect("reps must be an integer"));
    let seed = args.next().map_or(20240, |a| a.parse().expect("seed must be an integer"));
    let table = calibrate_sdll_c1(&N_GRID, &ALPHAS, reps, seed)?;
    print!("{}", table.to_text().replacen(
        "# n alpha c1\n",
        &format!("# n alpha c1  (reps = {reps}, seed = {seed})\n"),
        1,
    ));
    Ok(())
}
