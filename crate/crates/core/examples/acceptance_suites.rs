//! Runs selected acceptance suites by number, e.g. `cargo run --example
//! acceptance_suites -- 1 3 6`. Without arguments runs the fast ones.
use hardy_lab::suites::*;

fn main() -> hardy_lab::Result<()> {
    let mut which: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if which.is_empty() {
        which = vec![1, 3, 6];
    }
    for c in which {
        let r = match c {
            1 => subordinator_suite(&Default::default())?,
            2 => certification_suite(&Default::default())?,
            3 => ledger_suite(&Default::default())?,
            4 => decomposition_suite(&Default::default())?,
            5 => majorization_suite(&Default::default())?,
            6 => grand_oracle_suite(&Default::default())?,
            7 => atom_uniformity_suite(&Default::default())?,
            8 => domination_suite(&Default::default())?,
            _ => continue,
        };
        println!("criterion {} ({}): {}", r.criterion, r.title, if r.passed { "pass" } else { "FAIL" });
        for l in r.lines() {
            println!("  {l}");
        }
    }
    Ok(())
}
