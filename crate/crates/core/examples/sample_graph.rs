//! Draws one SRGG on the unit torus, writes it in the text format and reads
//! it back.

use srgg::{expected_edge_count, sample_srgg, ConnectionProfile, DomainSpec, Shape, SparsitySchedule, Srgg};

fn main() -> srgg::Result<()> {
    let n = 200;
    let schedule = SparsitySchedule::new(0.8, 0.25, 2)?;
    let s = schedule.sparsity(n)?;
    let domain = DomainSpec::unit_torus(2)?;
    let profile = ConnectionProfile::Rayleigh;

    let g = sample_srgg(n, domain, profile, s, 7)?;
    let expected = expected_edge_count(&domain, &profile, n, s)?;
    println!("n = {n}, s(n) = {s:.4}: {} edges (expected {expected:.1})", g.edge_count());

    let text = g.to_text();
    println!("{}", text.lines().next().unwrap_or_default());
    let back = Srgg::read_from(text.as_bytes(), Shape::Torus)?;
    assert_eq!(back, g);
    println!("round trip through the text format preserved the graph");
    Ok(())
}
