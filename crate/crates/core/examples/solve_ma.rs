//! Recover a known potential from its Monge-Ampère density on two grids.
//!
//! cargo run --release --example solve_ma -- [amplitude]

use kahler_lab::lab::solve::manufactured_solve;
use kahler_lab::manufactured::Manufactured;

fn main() -> kahler_lab::Result<()> {
    let amp: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let target = Manufactured::smooth_bump(2, amp);
    let mut last = None;
    for points in [8, 16] {
        let s = manufactured_solve(2, points, &target, 1e-9, 200)?;
        print!(
            "N={points:>2}  sup error {:.3e}  residual {:.3e}  newton steps {}  continuation {:?}",
            s.sup_error, s.residual, s.report.iterations, s.report.continuation_path
        );
        if let Some(prev) = last {
            print!("  error ratio {:.1}", prev / s.sup_error);
        }
        println!();
        last = Some(s.sup_error);
    }
    Ok(())
}
