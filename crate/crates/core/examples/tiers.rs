// Grouping height estimates into well-separated tiers, then the pivot-based
// refinement of the cluster caps.

use tierroots::poly::SparsePolynomial;
use tierroots::tiers::{decompose, normalize_pivot, refine, Refinement};

fn main() -> tierroots::Result<()> {
    let poly = SparsePolynomial::new(vec![0, 2, 3, 5, 7], vec![1e14, 1e14, 3e11, 1e8, 1.0])?;

    for separation in [10.0, 1e3] {
        let (_, dec) = decompose(&poly, separation)?;
        println!("separation {separation:e}: {} tiers", dec.len());
        for (r, t) in dec.tiers.iter().enumerate() {
            println!(
                "  T{} h={:.3e} l={} roots={} local k={:?}",
                r + 1,
                t.height,
                t.l,
                t.root_count,
                t.local_k
            );
        }
        println!("  gap ratios {:?}", dec.gap_ratios);
    }

    let (normalized, sigma) = normalize_pivot(&poly);
    println!("pivot scale sigma = {sigma:.4e}, normalized max coefficient root size 1");
    match refine(&normalized, 1.0, 1e-3, 1e3)? {
        Refinement::Applicable(c) => {
            println!("pivot m={} large tiers {:?}", c.m, c.large);
            println!("caps: large {:?} small {:?}", c.large_cap, c.small_cap);
        }
        Refinement::NotApplicable { m, reason } => println!("refinement skipped (m={m}): {reason}"),
    }
    Ok(())
}
