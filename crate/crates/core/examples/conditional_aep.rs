//! Concentration of the normalized information density -log2 P(G | Z).
//!
//! The variance falls like 1 / (C(n,2) s^d); on the torus it is exactly the
//! per-pair variance divided by C(n,2) s^(2d).

use srgg::infotheory::{aep_cell, chebyshev_typical_lower_bound, edge_term_variance, normalization};
use srgg::stats::linear_fit;
use srgg::{ConnectionProfile, DomainSpec};

fn main() -> srgg::Result<()> {
    let domain = DomainSpec::unit_torus(2)?;
    let profile = ConnectionProfile::Rayleigh;
    let trials = 400;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (si, s) in [0.1, 0.05].into_iter().enumerate() {
        let v = edge_term_variance(&domain, &profile, s)?;
        for (ni, n) in [50, 100, 200, 400].into_iter().enumerate() {
            let cell = aep_cell(&domain, &profile, n, s, trials, (si * 10 + ni) as u64)?;
            let exact = srgg::sampler::pair_count(n) as f64 * v.total / normalization(n, s, 2).powi(2);
            println!(
                "n = {n:<4} s = {s:<5} mean {:.4} (H/norm {:.4})  var {:.4e} (exact {exact:.4e})  P(typ, eps=0.5) >= {:.3}",
                cell.mean,
                cell.conditional_entropy,
                cell.variance,
                chebyshev_typical_lower_bound(&v, n, s, 2, 0.5)
            );
            x.push(cell.scale.ln());
            y.push(cell.variance.ln());
        }
    }
    if let Some(fit) = linear_fit(&x, &y) {
        println!("slope of log variance on log C(n,2)s^2: {:.3} +/- {:.3}", fit.slope, fit.slope_std_error);
    }
    Ok(())
}
