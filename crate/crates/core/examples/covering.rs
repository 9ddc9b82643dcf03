// Cells around the roots of each tier, built from the epsilon ladder.

use tierroots::corpus::constructed;
use tierroots::covering::{build_covering, build_ladder, count_roots_in_cells, default_epsilon_f, verify_covering};
use tierroots::oracle::{find_roots, RootFindConfig};
use tierroots::tiers::{assign_roots, decompose};

fn main() -> tierroots::Result<()> {
    // (t^3 - 1e12)^2 (t^3 + 1): a double tier at 1e4 and a simple one at 1.
    let case = constructed(3, &[1e12, -1.0], &[2, 1])?;
    let (_, dec) = decompose(&case.poly, 1e3)?;
    let roots = find_roots(&case.poly, &RootFindConfig::default())?;
    let assignment = assign_roots(&dec, &roots)?;

    let l = case.poly.l();
    let ladder = build_ladder(l, default_epsilon_f(dec.min_gap()))?;
    println!("ladder eps {:?}, eps_c {:.3e}", ladder.eps, ladder.epsilon_c);

    let cov = build_covering(&assignment.tiers, &dec.heights(), &ladder)?;
    for c in &cov.cells {
        println!(
            "  tier {} centre {:>10.4} {:>+10.4}i radius {:.3e} holds {}",
            c.tier + 1,
            c.center.re,
            c.center.im,
            c.radius,
            c.b
        );
    }
    let report = verify_covering(&cov);
    println!("verified: {} (max b {}, centre margin {:.3})", report.passed, report.max_b, report.centre_margin);
    println!("all roots covered: {}", count_roots_in_cells(&cov, &roots).all_covered());
    Ok(())
}
