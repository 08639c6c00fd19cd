//! Rate-region bounds for two and three encoders and a few corner checks.

use srgg::dsc::{is_achievable, rate_region, RateTuple};
use srgg::infotheory::h_star;
use srgg::{ConnectionProfile, SparsitySchedule};

fn main() -> srgg::Result<()> {
    let hs = h_star(&ConnectionProfile::Rayleigh, 2)?;
    let schedule = SparsitySchedule::new(1.0, 0.25, 2)?;
    for blocks in [2, 3] {
        println!("L = {blocks}, beta d = {}", schedule.regime_exponent());
        for (mask, bound) in rate_region(blocks, &schedule, hs)? {
            println!("  subset {mask:0blocks$b}: sum >= {bound:.5}");
        }
    }
    for rates in [vec![hs / 2.0, hs / 2.0], vec![0.0, 0.0], vec![hs / 2.0, 0.0], vec![2.7, 2.7]] {
        let a = is_achievable(&RateTuple::new(rates.clone())?, &schedule, hs)?;
        match a.tightest {
            None => println!("{rates:.4?}: achievable"),
            Some(v) => println!("{rates:.4?}: not achievable, subset {:02b} short by {:.4}", v.subset, v.deficit()),
        }
    }
    Ok(())
}
