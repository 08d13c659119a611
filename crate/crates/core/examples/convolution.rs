//! Cyclic convolution on `Z_n` as a weighted conditional-type operator,
//! computed both ways.

use condop::gallery::{kernel_as_condexp, KernelDef};

fn main() -> condop::Result<()> {
    let w = vec![1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.25];
    let f = vec![1.0, 2.0, 3.0, 4.0, 0.0, -1.0, 0.0, 1.0];
    let c = kernel_as_condexp(&KernelDef::Convolution { w }, &f)?;
    println!("via E(uf) {:?}", c.via_condexp);
    println!("direct    {:?}", c.direct);
    println!(
        "largest relative difference {:e}",
        c.max_relative_difference
    );
    Ok(())
}
