//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its verdict whether it passes or not; the process fails if any
//! criterion does.

use std::f64::consts::{LN_2, PI};
use std::fs;
use std::path::Path;
use std::time::Instant;

use srgg::dsc::{self, is_achievable, rate_bound, simulate_dsc, CenterKind, DscConfig, RateTuple};
use srgg::infotheory::{aep_cell, conditional_entropy, h_star};
use srgg::oracle::{
    check_h2_inequality, entropy_of_table_measured, gap_from_table, reduction_subsets, mc_graph_table,
    neighborhood_conditional_entropy, subset_label, table_aep, GraphProbabilityTable, H2_SLACK,
};
use srgg::rng::derive_seed;
use srgg::stats::linear_fit;
use srgg::{ConnectionProfile, DomainSpec, SparsitySchedule};

const SEED: u64 = 20_260_418;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict { passed, detail: detail.into() }
    }
}

fn torus() -> DomainSpec {
    DomainSpec::unit_torus(2).unwrap()
}

fn rayleigh_hstar() -> f64 {
    h_star(&ConnectionProfile::Rayleigh, 2).unwrap()
}

fn criterion_1() -> Verdict {
    let ray = h_star(&ConnectionProfile::Rayleigh, 2).unwrap();
    let ray_exact = PI.powi(3) / (6.0 * LN_2);
    let exp = h_star(&ConnectionProfile::Exponential, 1).unwrap();
    let exp_exact = PI * PI / (3.0 * LN_2);
    let (e1, e2) = ((ray / ray_exact - 1.0).abs(), (exp / exp_exact - 1.0).abs());
    Verdict::new(
        e1 <= 1e-6 && e2 <= 1e-6,
        format!("rayleigh d=2 {ray:.9} (rel err {e1:.1e}), exponential d=1 {exp:.9} (rel err {e2:.1e})"),
    )
}

fn criterion_2() -> Verdict {
    let profile = ConnectionProfile::Rayleigh;
    let h = rayleigh_hstar();
    let sweep = [0.2, 0.1, 0.05];
    let mut ok = true;
    let mut parts = Vec::new();
    for &s in &sweep {
        let v = conditional_entropy(&torus(), &profile, 100, s).unwrap().normalized;
        let err = (v - h).abs();
        ok &= err <= 1e-6;
        parts.push(format!("torus s={s}: |diff| {err:.1e}"));
    }
    let square = DomainSpec::unit_square();
    let deficits: Vec<f64> = sweep
        .iter()
        .map(|&s| h - conditional_entropy(&square, &profile, 100, s).unwrap().normalized)
        .collect();
    ok &= deficits.iter().all(|&d| d > 0.0);
    for w in deficits.windows(2) {
        let ratio = w[0] / w[1];
        ok &= (1.6..=2.4).contains(&ratio);
        parts.push(format!("square ratio {ratio:.3}"));
    }
    parts.push(format!("square deficits {deficits:.4?}"));
    Verdict::new(ok, parts.join(", "))
}

fn criterion_3() -> Verdict {
    let profile = ConnectionProfile::Rayleigh;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (si, s) in [0.1, 0.05].into_iter().enumerate() {
        for (ni, n) in [50, 100, 200, 400, 800].into_iter().enumerate() {
            let seed = derive_seed(derive_seed(SEED, 3 + si as u64), ni as u64);
            let cell = aep_cell(&torus(), &profile, n, s, 1000, seed).unwrap();
            x.push(cell.scale.ln());
            y.push(cell.variance.ln());
        }
    }
    let span = (x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min)) / 10f64.ln();
    let fit = linear_fit(&x, &y).unwrap();
    Verdict::new(
        span >= 2.0 && (fit.slope + 1.0).abs() <= 0.15,
        format!("slope {:.4} (se {:.4}) over {span:.2} decades", fit.slope, fit.slope_std_error),
    )
}

fn table(n: usize, tag: u64) -> GraphProbabilityTable {
    mc_graph_table(n, &torus(), &ConnectionProfile::Rayleigh, 0.3, 1_000_000, derive_seed(SEED, tag)).unwrap()
}

fn criterion_4(t4: &GraphProbabilityTable) -> Verdict {
    let profile = ConnectionProfile::Rayleigh;
    let gap = gap_from_table(t4, &torus(), &profile, 0.3).unwrap();
    let aep = table_aep(t4, &torus(), &profile, 0.3, 100_000, derive_seed(SEED, 40)).unwrap();
    let h = gap.table_entropy;
    let aep_se = aep.se.hypot(h.se);
    let ok = gap.gap >= -4.0 * gap.se && (aep.mean - h.value).abs() <= 3.0 * aep_se;
    Verdict::new(
        ok,
        format!(
            "H(G) {:.6} - H(G|Z) {:.6} = {:.6} (se {:.1e}); mean -log2 P(G) {:.6} vs {:.6} (se {:.1e})",
            h.value, gap.conditional_entropy, gap.gap, gap.se, aep.mean, h.value, aep_se
        ),
    )
}

fn criterion_5(t4: &GraphProbabilityTable) -> Verdict {
    let small = [(2, entropy_of_table_measured(&table(2, 52))), (3, entropy_of_table_measured(&table(3, 53)))];
    let mut ok = true;
    let mut worst = (0.0f64, String::new());
    for subset in reduction_subsets(4) {
        let k = subset.count_ones() as usize;
        let rhs = small.iter().find(|(m, _)| *m == k).unwrap().1;
        let lhs = neighborhood_conditional_entropy(t4, subset).unwrap();
        let z = (lhs.value - rhs.value) / lhs.se.hypot(rhs.se);
        ok &= z.abs() <= 4.0;
        if z.abs() > worst.0.abs() {
            worst = (z, format!("S={} {:.5} vs H(G_{k}) {:.5}", subset_label(subset, 4), lhs.value, rhs.value));
        }
    }
    Verdict::new(ok, format!("largest deviation {:.1} SE at {}", worst.0, worst.1))
}

fn criterion_6() -> Verdict {
    let r = check_h2_inequality(100_000, derive_seed(SEED, 6)).unwrap();
    Verdict::new(
        r.violations == 0,
        format!("{} violations in {} pairs (slack {H2_SLACK:e}, max excess {:.2e})", r.violations, r.trials, r.max_excess),
    )
}

fn criterion_7() -> Verdict {
    let h = rayleigh_hstar();
    let sch = SparsitySchedule::new(0.8, 0.25, 2).unwrap();
    let whole = rate_bound(2, 0b11, &sch, h).unwrap();
    let singles = [rate_bound(2, 0b01, &sch, h).unwrap(), rate_bound(2, 0b10, &sch, h).unwrap()];
    let mut ok = (whole - 3.72770).abs() <= 1e-4 && singles.iter().all(|b| (b - 2.63583).abs() <= 1e-4);

    let even = is_achievable(&RateTuple::uniform(2, h / 2.0).unwrap(), &sch, h).unwrap();
    let zero = is_achievable(&RateTuple::uniform(2, 0.0).unwrap(), &sch, h).unwrap();
    let corner = is_achievable(&RateTuple::new(vec![h / 2.0, 0.0]).unwrap(), &sch, h).unwrap();
    ok &= even.achievable;
    ok &= !zero.achievable && zero.tightest.map(|v| v.subset) == Some(0b11);
    ok &= !corner.achievable && corner.tightest.map(|v| v.subset) == Some(0b10);
    Verdict::new(
        ok,
        format!(
            "bound([2]) {whole:.6}, singletons {:.6} {:.6}; decisions {} {} {}",
            singles[0], singles[1], even.achievable, zero.achievable, corner.achievable
        ),
    )
}

fn dsc_config() -> DscConfig {
    let schedule = SparsitySchedule::new(0.8, 0.25, 2).unwrap();
    let partition = dsc::BlockPartition::new(6, 2).unwrap();
    let rates = dsc::corner_rates(2, &schedule, rayleigh_hstar()).unwrap();
    let s = schedule.sparsity(6).unwrap();
    let mut gammas = vec![0.25, 0.5, 1.0, 2.0];
    gammas.push(dsc::injective_gamma(&partition, &rates, s, 2).unwrap());
    DscConfig {
        n: 6,
        blocks: 2,
        domain: torus(),
        profile: ConnectionProfile::Rayleigh,
        schedule,
        rates,
        gammas,
        epsilon: 1.5,
        center: CenterKind::FiniteN,
        trials: 1000,
        seed: derive_seed(SEED, 8),
    }
}

fn criterion_8() -> Verdict {
    let cfg = dsc_config();
    let report = simulate_dsc(&cfg).unwrap();
    let sweep = &report.cells[..4];
    let mut ok = sweep.windows(2).all(|w| w[1].ci.0 <= w[0].ci.1);
    let injective = &report.cells[4];
    let partition = dsc::BlockPartition::new(6, 2).unwrap();
    ok &= (0..2).all(|l| injective.bits[l] as usize >= partition.block_pairs(l).unwrap().len());
    ok &= injective.collisions == 0;
    ok &= report
        .cells
        .iter()
        .all(|c| c.union_bound.is_some_and(|u| u >= c.collision_ci.0));
    let summary: Vec<String> = report
        .cells
        .iter()
        .map(|c| {
            format!(
                "gamma {:.3}: P_E {:.3} [{:.3}, {:.3}] collisions {} [{:.5}, {:.5}] bound {:.5}",
                c.gamma,
                c.p_error,
                c.ci.0,
                c.ci.1,
                c.collisions,
                c.collision_ci.0,
                c.collision_ci.1,
                c.union_bound.unwrap_or(f64::NAN)
            )
        })
        .collect();
    Verdict::new(ok, summary.join("; "))
}

fn run_cli(out: &Path, config: &Path, command: &str, workers: usize) -> i32 {
    srgg::cli::main_with_args([
        "srgg".to_string(),
        command.to_string(),
        "--config".into(),
        config.display().to_string(),
        "--out".into(),
        out.display().to_string(),
        "--workers".into(),
        workers.to_string(),
    ])
}

fn criterion_9() -> Verdict {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("repro.toml");
    fs::write(
        &config,
        "seed = 77\n[aep_sweep]\nn = [30, 60]\ns = [0.2, 0.1]\ntrials = 200\n\
         [oracle]\ntrials = 20000\naep_samples = 5000\nh2_trials = 5000\n",
    )
    .unwrap();
    let commands = ["sample", "hstar", "limit-sweep", "aep-sweep", "oracle", "rate-region", "dsc-sim"];
    let runs = [(1, "a"), (3, "b"), (3, "c")];
    for (workers, dir) in runs {
        for cmd in commands {
            let code = run_cli(&root.path().join(dir), &config, cmd, workers);
            if code != 0 && !(cmd == "oracle" && code == 4) {
                return Verdict::new(false, format!("{cmd} exited {code}"));
            }
        }
    }
    let mut names: Vec<_> = fs::read_dir(root.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut compared = 0;
    for name in &names {
        let reference = fs::read(root.path().join("a").join(name)).unwrap();
        for (_, dir) in &runs[1..] {
            if fs::read(root.path().join(dir).join(name)).ok().as_ref() != Some(&reference) {
                return Verdict::new(false, format!("{name:?} differs in run {dir}"));
            }
        }
        compared += 1;
    }
    Verdict::new(compared >= 10, format!("{compared} files identical across 1 and 3 workers"))
}

fn report(index: usize, start: Instant, verdict: Verdict) -> bool {
    let tag = if verdict.passed { "PASS" } else { "FAIL" };
    println!("criterion {index}: {tag} ({:.1} s) {}", start.elapsed().as_secs_f64(), verdict.detail);
    verdict.passed
}

fn main() {
    let mut results = Vec::new();
    let timed = |index: usize, f: &dyn Fn() -> Verdict| {
        let start = Instant::now();
        report(index, start, f())
    };
    results.push(timed(1, &criterion_1));
    results.push(timed(2, &criterion_2));
    results.push(timed(3, &criterion_3));
    let start = Instant::now();
    let t4 = table(4, 4);
    println!("n = 4 table: {:.1} s", start.elapsed().as_secs_f64());
    results.push(timed(4, &|| criterion_4(&t4)));
    results.push(timed(5, &|| criterion_5(&t4)));
    results.push(timed(6, &criterion_6));
    results.push(timed(7, &criterion_7));
    results.push(timed(8, &criterion_8));
    results.push(timed(9, &criterion_9));
    let failed: Vec<usize> = (1..=results.len()).filter(|&i| !results[i - 1]).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
