//! One line per acceptance criterion. Tolerances are pinned here rather
//! than taken from the library defaults.

use defectchain::checks::{self, Tolerances};

const TOLERANCES: Tolerances = Tolerances { spectral: 1e-10, degeneracy: 1e-8, energy_relative: 1e-3 };

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let results = checks::acceptance(TOLERANCES);
    let mut failed = 0;
    for c in &results {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        println!("{}", c.line());
        if !c.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
