//! Recognizing a weighted conditional expectation from its matrix alone.

use condop::condexp::SpaceFunction;
use condop::recognition::{
    build_operator, recover_structure, recover_two_sided, verify_projection_hypotheses,
    AbstractOperator,
};
use condop::{MeasureSpace, PartitionAlgebra};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> condop::Result<()> {
    let space = MeasureSpace::uniform(4)?;
    let partition = PartitionAlgebra::new(&space, &[0, 1, 0, 1])?;
    let w = SpaceFunction::from_real(&[2.0, 0.5, 0.0, 1.5]);
    let t = build_operator(&space, &partition, &w, &SpaceFunction::ones(4))?;

    let hyp = verify_projection_hypotheses(&t, 16, 1)?;
    println!("hypotheses hold: {}", hyp.all_passed());
    let rec = recover_structure(&t)?;
    println!(
        "blocks {:?}, w {:?}, {:?}",
        rec.assignment,
        rec.w.re(),
        rec.normalizations
    );

    let k = SpaceFunction::from_real(&[0.5, 1.0, 1.5, 1.0]);
    let w = SpaceFunction::from_real(&[2.0, 1.0, 2.0 / 3.0, 1.0]);
    let t = build_operator(&space, &partition, &w, &k)?;
    let rec = recover_two_sided(&t)?;
    println!(
        "k {:?}, w {:?}, uniqueness residual {:e}",
        rec.k.unwrap().re(),
        rec.w.re(),
        rec.uniqueness_residual
    );

    let noisy = AbstractOperator::new(
        space,
        t.matrix() + DMatrix::from_element(4, 4, Complex64::new(0.01, 0.0)),
    )?;
    println!(
        "perturbed: hypotheses fail {:?}",
        verify_projection_hypotheses(&noisy, 16, 1)?.failed()
    );
    match recover_structure(&noisy) {
        Ok(_) => println!("perturbed matrix recovered"),
        Err(e) => println!("perturbed matrix rejected: {e}"),
    }
    Ok(())
}
