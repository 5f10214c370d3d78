//! A nonzero matrix that every member of a hitting family misses.

use lowrank::hitting::{hard_tensor, hitting_set_b, pit_test};
use lowrank::tensor::matrix_rank;
use lowrank::FieldCtx;

fn main() -> lowrank::Result<()> {
    let f = FieldCtx::prime(11)?;
    for r in 1..=2 {
        let h = hitting_set_b(&f, r, 4, 4)?;
        let t = hard_tensor(&h)?;
        println!(
            "r = {r}: {} measurements, orthogonal matrix of rank {} (missed: {})",
            h.len(),
            matrix_rank(&t)?,
            !pit_test(&t, &h)?
        );
    }
    Ok(())
}
