//! Block averages on a weighted four-point space and a few of the axioms.

use condop::condexp::{cond_exp, SpaceFunction};
use condop::{MeasureSpace, PartitionAlgebra, PointKind};

fn main() -> condop::Result<()> {
    let space = MeasureSpace::with_kind(vec![0.1, 0.3, 0.3, 0.3], PointKind::Atom)?;
    let partition = PartitionAlgebra::new(&space, &[0, 0, 1, 1])?;

    let f = SpaceFunction::from_real(&[4.0, 0.0, 0.0, 0.0]);
    let ef = cond_exp(&space, &partition, &f)?;
    println!("E(f)      = {:?}", ef.re());

    let g = SpaceFunction::from_real(&[2.0, 2.0, -1.0, -1.0]);
    println!("g measurable: {}", partition.is_measurable(&g));
    let lhs = cond_exp(&space, &partition, &f.mul(&g))?;
    println!("E(fg)     = {:?}", lhs.re());
    println!("E(f)g     = {:?}", ef.mul(&g).re());

    let twice = cond_exp(&space, &partition, &ef)?;
    println!("E(E(f)) - E(f) = {:e}", twice.sub(&ef).max_abs());

    let p = 3.0;
    let efp = cond_exp(&space, &partition, &f.abs_pow(p))?;
    for x in 0..space.len() {
        println!(
            "x={x}: |E f|^p = {:.4} <= E|f|^p = {:.4}",
            ef[x].norm().powf(p),
            efp[x].re
        );
    }
    Ok(())
}
