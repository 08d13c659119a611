//! Dyadic sweeps: an indicator `u` loses the Fredholm property as the
//! kernel grows, while `u(t) = 2 + t` stays uniformly invertible.

use condop::condexp::FunctionRule;
use condop::fredholm::{dichotomy_sweep, SweepRow};
use condop::measure::dyadic_level;
use condop::{BlockRule, ExponentPair, OracleConfig};

fn print_rows(rows: &[SweepRow]) {
    println!("level kernel rank codim index bounded_below");
    for r in rows {
        let f = &r.report;
        println!(
            "{:>5} {:>6} {:>4} {:>5} {:>5} {:.6}",
            r.resolution, f.kernel_dim, f.range_rank, f.codim, f.index, f.bounded_below
        );
    }
}

fn main() -> condop::Result<()> {
    let cfg = OracleConfig::default();
    let l2 = ExponentPair::same(2.0)?;

    let levels = (4..=8)
        .map(|l| dyadic_level(l, 1.0, BlockRule::Pairing))
        .collect::<condop::Result<Vec<_>>>()?;
    let sweep = dichotomy_sweep(
        &levels,
        &FunctionRule::Indicator {
            from: 0.0,
            to: 0.5,
            value: 1.0,
        },
        l2,
        &cfg,
    )?;
    print_rows(&sweep.rows);
    println!("verdict: {:?}\n", sweep.verdict);

    let levels = (4..=8)
        .map(|l| dyadic_level(l, 1.0, BlockRule::Singletons))
        .collect::<condop::Result<Vec<_>>>()?;
    let sweep = dichotomy_sweep(
        &levels,
        &FunctionRule::Linear {
            intercept: 2.0,
            slope: 1.0,
        },
        l2,
        &cfg,
    )?;
    print_rows(&sweep.rows);
    println!("verdict: {:?}", sweep.verdict);
    Ok(())
}
