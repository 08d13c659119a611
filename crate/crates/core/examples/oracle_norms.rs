//! Extremal ratios `‖Tf‖_q / ‖f‖_p` against the diagonal closed forms.

use condop::condexp::SpaceFunction;
use condop::oracle::{maximize_ratio, min_modulus};
use condop::{CondOperator, ExponentPair, MeasureSpace, OracleConfig, PartitionAlgebra, PointKind};

fn main() -> condop::Result<()> {
    let mu = vec![0.2, 0.5, 0.3];
    let u = [0.3, 0.7, 2.0];
    let space = MeasureSpace::with_kind(mu.clone(), PointKind::Atom)?;
    let partition = PartitionAlgebra::singletons(&space);
    let cfg = OracleConfig::default();

    for (p, q) in [(3.0, 3.0), (3.0, 1.5), (1.5, 3.0)] {
        let e = ExponentPair::new(p, q)?;
        let op = CondOperator::em_u(
            space.clone(),
            partition.clone(),
            SpaceFunction::from_real(&u),
            e,
        )?
        .matrix();
        let hi = maximize_ratio(&op, e, &cfg);
        let lo = min_modulus(&op, e, false, &cfg);
        let expected = if p == q {
            u.iter().cloned().fold(0.0, f64::max)
        } else if q < p {
            let r = 1.0 / (1.0 / q - 1.0 / p);
            u.iter()
                .zip(&mu)
                .map(|(a, m)| a.powf(r) * m)
                .sum::<f64>()
                .powf(1.0 / r)
        } else {
            u.iter()
                .zip(&mu)
                .map(|(a, m)| a * m.powf(1.0 / q - 1.0 / p))
                .fold(0.0, f64::max)
        };
        println!(
            "p={p} q={q}: norm {:.9} (closed form {expected:.9}, {:?}), min modulus {:.9} ({:?})",
            hi.value, hi.tightness, lo.value, lo.tightness
        );
    }
    Ok(())
}
