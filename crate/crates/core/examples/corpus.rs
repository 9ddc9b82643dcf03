// Seeded test corpora: constructed tiered polynomials and random sparse ones.

use tierroots::corpus::{constructed, height_corpus, random_sparse, height_family, rng};
use tierroots::heights::estimate_heights;

fn main() -> tierroots::Result<()> {
    let case = constructed(4, &[1e8, -1.0], &[2, 1])?;
    println!("constructed: exps {:?}", case.poly.exponents());
    println!("  coefs {:?}", case.poly.coefficients());
    println!("  tier heights {:?}, {} roots", case.heights(), case.roots.count());

    let fam = height_family(5, &[1e3, 1.0], &[2, 1])?;
    println!("family: degree {} with {} terms", fam.poly.degree(), fam.poly.l() + 1);

    for (i, c) in height_corpus(7, 3).iter().enumerate() {
        let eta = estimate_heights(&c.poly)?;
        println!("corpus {i}: k={} c={:?} l={:?} eta={:?}", c.k, c.c, c.l, eta.etas);
    }

    let mut r = rng(7);
    let p = random_sparse(&mut r, 5, 10, 6.0);
    println!("random: exps {:?} coefs {:?}", p.exponents(), p.coefficients());
    Ok(())
}
