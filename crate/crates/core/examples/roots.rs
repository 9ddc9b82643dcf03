// Root oracle on a polynomial with a double root and widely spread magnitudes.

use num_complex::Complex64;
use tierroots::oracle::{find_roots, reconstruction_error, RootFindConfig};
use tierroots::poly::{RootMultiset, SparsePolynomial};

fn main() -> tierroots::Result<()> {
    let truth = RootMultiset::new(vec![
        (Complex64::new(-2.0, 0.0), 2),
        (Complex64::new(1e3, 1e3), 1),
        (Complex64::new(1e3, -1e3), 1),
        (Complex64::new(1e-3, 0.0), 1),
    ])?;
    let poly = SparsePolynomial::from_roots(&truth)?;
    println!("degree {} with {} nonzero terms", poly.degree(), poly.l() + 1);

    let roots = find_roots(&poly, &RootFindConfig::default())?;
    for (z, m) in &roots.roots {
        println!("  {:>24.15e} {:>+24.15e}i  x{m}", z.re, z.im);
    }
    println!("reconstruction error {:.2e}", reconstruction_error(&poly, &roots)?);
    println!("conjugate defect     {:.2e}", roots.conjugate_defect());
    Ok(())
}
