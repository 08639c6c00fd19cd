//! The entropy rate h* and the finite-s conditional entropy on the torus and
//! the square.

use srgg::infotheory::{conditional_entropy, h_star};
use srgg::{check_assumptions, ConnectionProfile, DomainSpec};

fn main() -> srgg::Result<()> {
    for (profile, d) in [
        (ConnectionProfile::Rayleigh, 2),
        (ConnectionProfile::Exponential, 1),
        (ConnectionProfile::scaled_rayleigh(0.5)?, 2),
        (ConnectionProfile::Rayleigh, 3),
    ] {
        let report = check_assumptions(&profile, d)?;
        println!(
            "{profile:<20} d={d}: h* = {:.7} bits (error <= {:.1e}), integrable: {}",
            report.h_star.value,
            report.h_star.error_bound(),
            report.all_finite()
        );
    }
    println!("closed forms: pi^3/(6 ln 2) = {:.7}, pi^2/(3 ln 2) = {:.7}",
        std::f64::consts::PI.powi(3) / (6.0 * std::f64::consts::LN_2),
        std::f64::consts::PI.powi(2) / (3.0 * std::f64::consts::LN_2));

    let profile = ConnectionProfile::Rayleigh;
    let hs = h_star(&profile, 2)?;
    println!("\nH(G|Z) / (C(n,2) s^2) against s");
    for domain in [DomainSpec::unit_torus(2)?, DomainSpec::unit_square()] {
        let mut last: Option<f64> = None;
        for s in [0.2, 0.1, 0.05, 0.025] {
            let ce = conditional_entropy(&domain, &profile, 2, s)?;
            let deficit = hs - ce.normalized;
            // The square's boundary deficit is O(s): halving s should halve it.
            let ratio = match last {
                Some(prev) if deficit > 1e-6 => format!("  ratio {:.3}", prev / deficit),
                _ => String::new(),
            };
            println!("  {domain:<7} s = {s:<6} {:.9}  deficit {deficit:.3e}{ratio}", ce.normalized);
            last = Some(deficit);
        }
    }
    Ok(())
}
