//! Random-binning compression of a 6-node SRGG split into two blocks.
//!
//! Usage: `distributed_coding [c] [epsilon] [center: hstar|finite] [trials]`

use srgg::dsc::{corner_rates, injective_gamma, simulate_dsc, BlockPartition, CenterKind, DscConfig};
use srgg::infotheory::h_star;
use srgg::{ConnectionProfile, DomainSpec, SparsitySchedule};

fn main() -> srgg::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let c: f64 = arg(0, "0.8").parse().expect("c");
    let epsilon: f64 = arg(1, "1.5").parse().expect("epsilon");
    let center = if arg(2, "finite") == "hstar" { CenterKind::HStar } else { CenterKind::FiniteN };
    let trials: usize = arg(3, "1000").parse().expect("trials");

    let (n, blocks) = (6, 2);
    let domain = DomainSpec::unit_torus(2)?;
    let profile = ConnectionProfile::Rayleigh;
    let schedule = SparsitySchedule::new(c, 0.25, 2)?;
    let hstar = h_star(&profile, 2)?;
    let rates = corner_rates(blocks, &schedule, hstar)?;
    let s = schedule.sparsity(n)?;
    let partition = BlockPartition::new(n, blocks)?;
    let mut gammas = vec![0.25, 0.5, 1.0, 2.0];
    gammas.push(injective_gamma(&partition, &rates, s, 2)?);

    let cfg = DscConfig {
        n,
        blocks,
        domain,
        profile,
        schedule,
        rates,
        gammas,
        epsilon,
        center,
        trials,
        seed: 17,
    };
    let report = simulate_dsc(&cfg)?;
    println!("s(n) = {:.4}, typical-set center = {:.4} bits", report.s, report.center);
    println!("gamma    bits     P_E     95% CI            atypical collision union-bound");
    for cell in &report.cells {
        println!(
            "{:<8.3} {:<8} {:.3}   [{:.3}, {:.3}]    {:<8} {:<9} {}",
            cell.gamma,
            format!("{:?}", cell.bits),
            cell.p_error,
            cell.ci.0,
            cell.ci.1,
            cell.atypical,
            cell.collisions,
            cell.union_bound.map_or("-".into(), |u| format!("{u:.4}")),
        );
    }
    Ok(())
}
