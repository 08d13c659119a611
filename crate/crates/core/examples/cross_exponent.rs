//! `q < p`: per-instance classification, the atom quantities, and the decay
//! of the bounded-below constant along a dyadic family with `u = χ_B`.

use condop::condexp::{FunctionRule, SpaceFunction};
use condop::criteria::{classify_cross_exponent, cross_exponent_family, takagi_quantities};
use condop::measure::{dyadic_level, geometric_atoms};
use condop::{
    BlockRule, CondOperator, ExponentCase, ExponentPair, MeasureSpace, OracleConfig,
    PartitionAlgebra,
};

fn main() -> condop::Result<()> {
    let cfg = OracleConfig::default();
    let down = ExponentPair::new(3.0, 1.5)?;

    let space = MeasureSpace::uniform(4)?;
    let partition = PartitionAlgebra::new(&space, &[0, 0, 1, 1])?;
    let op = CondOperator::em_u(
        space,
        partition,
        SpaceFunction::from_real(&[0.0, 0.0, 1.0, 1.0]),
        down,
    )?;
    let report = classify_cross_exponent(&op, ExponentCase::Down, &cfg)?;
    println!("rank {} with |N_v| = {}", report.rank, report.n_v);
    for c in &report.conditions {
        println!("  {} -> {} ({:?})", c.label, c.holds, c.scope);
    }

    for count in [1, 4, 8, 12] {
        let (space, partition) = geometric_atoms(count)?;
        let op = CondOperator::em_u(space, partition, SpaceFunction::ones(count as usize), down)?;
        println!("{count} atoms: b = {}", takagi_quantities(&op)?.b);
    }

    let rule = FunctionRule::Indicator {
        from: 0.0,
        to: 0.5,
        value: 1.0,
    };
    let levels = (2..=6)
        .map(|l| {
            let level = dyadic_level(l, 1.0, BlockRule::Singletons)?;
            let u = rule.sample(&level.space);
            Ok((
                l,
                CondOperator::em_u(level.space, level.partition, u, down)?,
            ))
        })
        .collect::<condop::Result<Vec<_>>>()?;
    let trend = cross_exponent_family(&levels, ExponentCase::Down, &cfg)?;
    for (m, b) in trend.mesh.iter().zip(&trend.bounded_below) {
        println!(
            "mesh {m:.5}: bounded below {b:.6}, predicted {:.6}",
            m.powf(1.0 / 1.5 - 1.0 / 3.0)
        );
    }
    println!(
        "fitted exponent {:.4}, closed range across the family: {}",
        trend.fitted_exponent, trend.closed_range
    );
    Ok(())
}
