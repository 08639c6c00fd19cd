//! Brute-force probability tables for 2 to 4 nodes and the checks built on
//! them. Prints one line per check.

use srgg::oracle::{run_oracle_suite, OracleSuiteConfig};
use srgg::{ConnectionProfile, DomainSpec};

fn main() -> srgg::Result<()> {
    let cfg = OracleSuiteConfig {
        n: 4,
        domain: DomainSpec::unit_torus(2)?,
        profile: ConnectionProfile::Rayleigh,
        s: 0.3,
        trials: 200_000,
        aep_samples: 100_000,
        h2_trials: 100_000,
        seed: 2024,
    };
    for c in run_oracle_suite(&cfg)?.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("{mark} {:<32} stat {:+.3e} tol {:.3e}  {}", c.name, c.statistic, c.tolerance, c.detail);
    }
    Ok(())
}
