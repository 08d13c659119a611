//! Conditional expectation onto the first factor of a product grid:
//! integrating out the second coordinate.

use condop::gallery::{product_condexp, ProductGrid};

fn main() -> condop::Result<()> {
    let grid = ProductGrid::trapezoid((0.0, 1.0), 4, (0.0, std::f64::consts::PI), 2000)?;
    let f = grid.sample(|x, t| x * t.sin());
    let e = product_condexp(&grid, &f)?;
    println!(
        "measurable in x alone: {}",
        grid.partition.is_measurable(&e)
    );
    for (x, v) in grid.x_nodes.iter().zip(grid.column_values(&f)?) {
        println!(
            "x={x:.2}: mean over t {:.9}, expected {:.9}",
            v.re,
            2.0 * x / std::f64::consts::PI
        );
    }
    println!("mass of the t factor: {:.9}", grid.y_normalization);
    Ok(())
}
