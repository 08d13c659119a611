//! `f ↦ w E(u f)` and its reduction to `E M_v` with `v = u E(|w|^q)^{1/q}`:
//! both have the same `L^q` norm of the output for every input.

use condop::condexp::SpaceFunction;
use condop::weighted::lp_norm;
use condop::{Codomain, CondOperator, ExponentPair, MeasureSpace, PartitionAlgebra};

fn main() -> condop::Result<()> {
    let space = MeasureSpace::uniform(4)?;
    let partition = PartitionAlgebra::new(&space, &[0, 0, 1, 1])?;
    let u = SpaceFunction::from_real(&[1.0, -2.0, 0.5, 3.0]);
    let w = SpaceFunction::from_real(&[0.0, 2.0, 0.0, 0.0]);
    let q = 2.0;
    let op = CondOperator::new(
        space.clone(),
        partition,
        u,
        w,
        ExponentPair::same(q)?,
        Codomain::Sigma,
    )?;
    let v = op.reduce_to_emv();
    println!("v = {:?}", v.re());

    let reduced = op.reduced();
    for f in [[1.0, 0.0, 0.0, 0.0], [0.3, -1.0, 2.0, 0.7]] {
        let f = SpaceFunction::from_real(&f);
        let a = lp_norm(&space, &op.apply(&f)?, q);
        let b = lp_norm(&space, &reduced.apply(&f)?, q);
        println!("‖M_w E M_u f‖ = {a:.12}, ‖E M_v f‖ = {b:.12}");
    }
    Ok(())
}
