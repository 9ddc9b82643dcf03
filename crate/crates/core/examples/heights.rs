// Height estimates of a sparse polynomial, greedy and from the Newton polygon.
//
//   cargo run --example heights

use tierroots::heights::{estimate_heights, newton_polygon_heights};
use tierroots::poly::SparsePolynomial;

fn main() -> tierroots::Result<()> {
    // Two roots near 1e4, three near 1e2, two near 1.
    let poly = SparsePolynomial::new(vec![0, 2, 5, 7], vec![1e14, 1e14, 1e8, 1.0])?;

    let greedy = estimate_heights(&poly)?;
    let hull = newton_polygon_heights(&poly)?;
    println!("{:>3} {:>14} {:>6}", "b", "eta", "roots");
    for b in 0..greedy.len() {
        println!("{:>3} {:>14.6e} {:>6}", b + 1, greedy.etas[b], greedy.gaps[b]);
    }
    println!("breakpoints {:?}", greedy.alphas);
    println!("newton polygon agrees: {}", greedy == hull);
    Ok(())
}
