// Coefficient tables of the cluster expansion: recurrence against closed form,
// determinant sweep, and the expansion residual as a cluster shrinks.

use num_complex::Complex64;
use tierroots::series::{
    a_closed, a_recurrence_table, cluster_matrix, compare_recurrence_closed, expansion_residual,
    sweep_cluster_determinants,
};

fn main() -> tierroots::Result<()> {
    let (m, d) = (3, 9);
    let table = a_recurrence_table(m, d)?;
    println!("m={m} D={d}: recurrence | closed form");
    for j in 1..=table.j_max() {
        let rec: Vec<String> = (1..=m).map(|l| table.get(j, l).to_string()).collect();
        let closed: Vec<String> = (1..=m).map(|l| a_closed(m, j, l).map(|v| v.to_string()).unwrap_or_default()).collect();
        println!("  j={j:<2} {:<24} | {}", rec.join(" "), closed.join(" "));
    }

    let cmp = compare_recurrence_closed(8, 20);
    println!(
        "m<=8, D<=20: {} entries, {} off-diagonal mismatches, diagonal {}/{} agree",
        cmp.entries_checked,
        cmp.off_diagonal_mismatches.len(),
        cmp.diagonal_checked - cmp.diagonal_mismatches,
        cmp.diagonal_checked
    );

    let mat = cluster_matrix(&[0, 2, 5, 9])?;
    println!("cluster matrix for k~ = {:?}: det {}", mat.ktilde, mat.determinant);
    let sweep = sweep_cluster_determinants(4, 15);
    println!("{} matrices, {} singular, min |det| {}", sweep.matrices, sweep.singular.len(), sweep.min_abs_determinant);

    // Two roots near 1 collapse together; the rest stay put.
    for diam in [1e-1, 1e-2, 1e-3] {
        let tier = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0 + diam, 0.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(-1.0, -0.5),
            Complex64::new(0.3, 1.1),
        ];
        let r = expansion_residual(&tier, &[0, 1])?;
        println!("diameter {diam:e}: |eps| {:.3e}, bound ratio {:?}", r.residual.norm(), r.bound_ratio);
    }
    Ok(())
}
