// Acceptance run: one line per criterion, non-zero exit if any fails.
// Pass a substring to run only matching criteria.

use tierroots::selftest;

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let results = selftest::run_with(&filter, |r| println!("{r}"));
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
}
