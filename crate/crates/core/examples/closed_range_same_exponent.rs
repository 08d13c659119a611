//! Closed range for `p = q`: the bounded-below constant, the preimage
//! construction and the equivalences for an `𝒜`-measurable `u`.

use condop::condexp::SpaceFunction;
use condop::criteria::{
    ameasurable_equivalences, check_same_exponent, preimage, surjectivity_necessary,
};
use condop::{CondOperator, ExponentPair, MeasureSpace, OracleConfig, PartitionAlgebra};

fn main() -> condop::Result<()> {
    let cfg = OracleConfig::default();
    let space = MeasureSpace::uniform(4)?;
    let partition = PartitionAlgebra::new(&space, &[0, 0, 1, 1])?;

    let op = CondOperator::em_u(
        space.clone(),
        partition.clone(),
        SpaceFunction::from_real(&[1.0, 2.0, 3.0, 4.0]),
        ExponentPair::same(2.0)?,
    )?;
    let report = check_same_exponent(&op, &cfg)?;
    println!(
        "delta = {:?}, bounded below = {:?}",
        report.delta, report.bounded_below
    );
    println!("preimage audit: {:?}", report.preimage);

    let g = SpaceFunction::from_real(&[5.0, 5.0, -1.0, -1.0]);
    let f = preimage(&op, &g)?;
    println!(
        "preimage of {:?} is {:?}, maps back to {:?}",
        g.re(),
        f.re(),
        op.apply(&f)?.re()
    );

    let measurable = CondOperator::em_u(
        space.clone(),
        partition.clone(),
        SpaceFunction::from_real(&[0.3, 0.3, 2.0, 2.0]),
        ExponentPair::same(3.0)?,
    )?;
    let r = ameasurable_equivalences(&measurable, &cfg)?;
    println!(
        "A-measurable u: delta = {:?}, bounded below = {:?}",
        r.delta, r.bounded_below
    );
    for c in &r.conditions {
        println!("  {} -> {}", c.label, c.holds);
    }

    let vanishing = CondOperator::em_u(
        space,
        partition,
        SpaceFunction::from_real(&[1.0, -1.0, 2.0, 2.0]),
        ExponentPair::same(2.0)?,
    )?;
    let s = surjectivity_necessary(&vanishing, &cfg)?;
    println!("E(u) vanishes on {:?}; onto L^p(A): {}", s.z, s.passed);
    Ok(())
}
