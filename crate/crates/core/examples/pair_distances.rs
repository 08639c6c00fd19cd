//! Pair-distance densities of the supported domains, checked against a
//! histogram of sampled point pairs. Bin masses are integrals of the
//! density over each bin.

use rand::Rng;
use srgg::quadrature::{integrate, Tolerance};
use srgg::rng::stream;
use srgg::{DomainSpec, Shape};

fn main() -> srgg::Result<()> {
    let draws = 200_000;
    let bins = 8;
    for d in 1..=3 {
        for shape in [Shape::Cube, Shape::Torus] {
            let domain = DomainSpec::new(d, shape)?;
            let diameter = domain.diameter();
            let width = diameter / bins as f64;
            let mut rng = stream(d as u64 * 10 + (shape == Shape::Torus) as u64);
            let mut hist = vec![0usize; bins];
            for _ in 0..draws {
                let a: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
                let b: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
                let r = domain.distance(&a, &b)?;
                hist[((r / width) as usize).min(bins - 1)] += 1;
            }
            println!("{domain} (diameter {diameter:.4})");
            for (k, &count) in hist.iter().enumerate() {
                let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
                let mass = integrate(
                    |r| domain.pair_distance_density(r).unwrap_or(0.0),
                    lo,
                    hi,
                    Tolerance::new(1e-12, 1e-9),
                )?;
                let empirical = count as f64 / draws as f64;
                println!("  [{lo:.3}, {hi:.3})  density mass {:.4}  histogram {empirical:.4}", mass.value);
            }
        }
    }
    Ok(())
}
