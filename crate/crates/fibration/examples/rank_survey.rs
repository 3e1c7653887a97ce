//! A small rank survey: the distribution of analytic ranks of random
//! families over F_7.
//!
//! `cargo run --release --example rank_survey [count]`

use fibration::cli::{cmd_survey, SurveyConfig};

fn main() -> fibration::Result<()> {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let mut cfg = SurveyConfig::new(7, 6, count, 42);
    cfg.check_ambient_smooth = true;
    let table = cmd_survey(&cfg)?;
    for (r, n) in table.counts.iter().enumerate() {
        println!("rank {}{}: {n}", if r == 5 { ">" } else { "" }, r.min(4));
    }
    println!("rank ≥ 1: {:.2} of {} curves", table.positive_rank_fraction(), table.total());
    Ok(())
}
