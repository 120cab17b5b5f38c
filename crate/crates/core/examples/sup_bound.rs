//! Sup-norm constant for `p > n` as the entropy bound grows.

use kahler_lab::proof::chain::ChainInputs;
use kahler_lab::proof::sup_bound::SupBound;

fn main() -> kahler_lab::Result<()> {
    let base = ChainInputs::new(2, 3.0, 0.25, 2.0, 1.0, 0.0, 1.0)?;
    for k in [0.0, 0.01, 0.1, 1.0, 10.0, 100.0] {
        let b = SupBound::build(base.clone().with_entropy_bound(k))?;
        println!("Ent_3 <= {k:>6}:  ln C_39 = {:.6e}  ln S_inf = {:.6e}", b.ln_c39, b.ln_s_inf);
    }
    let b = SupBound::build(base)?;
    println!("{}", b.ledger().to_json());
    Ok(())
}
