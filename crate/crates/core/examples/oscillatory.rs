// Oscillatory integrals with polynomial phase: coefficient bound, root-cluster
// bound, a windowed integral, and the decay rate of the sharpness family.

use tierroots::oracle::{find_roots, RootFindConfig};
use tierroots::oscillatory::{
    phong_stein_bound, sharpness_slope, coefficient_bound, windowed_integral_default, ClusterSearch, PolyPhase,
};

fn main() -> tierroots::Result<()> {
    // Phi'(t) = 0.3 + 40 t^3 + t^6
    let phase = PolyPhase::new(0.3, vec![40.0, 1.0], vec![3, 6])?;
    let b = coefficient_bound(&phase)?;
    println!("coefficient bound {:.4} (j={}, pivot={}, applicable {})", b.value, b.argmin, b.pivot, b.applicable());

    let roots = find_roots(&phase.derivative(), &RootFindConfig::default())?;
    let ps = phong_stein_bound(&roots, 1.0, ClusterSearch::Auto)?;
    println!("cluster bound {:.4} (exact search {})", ps.value, ps.exact);

    for t in [1.0, 2.0, 4.0] {
        let v = windowed_integral_default(&phase, t)?;
        println!("T={t:>4}: integral {:.6} {:+.6}i, |I|/bound {:.3}", v.re, v.im, v.norm() / b.value);
    }

    for (k, l) in [(2, 1), (3, 2)] {
        let fit = sharpness_slope(k, l, &[1e2, 1e3, 1e4])?;
        println!("k={k} l={l}: decay slope {:.4}, expected {:.4}", fit.slope, fit.expected);
    }
    Ok(())
}
