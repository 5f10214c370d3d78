//! Recovering a low-rank tensor through the variable-merging reduction.

use lowrank::lrr::TensorPlan;
use lowrank::{FieldCtx, LowRankTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lowrank::Result<()> {
    let f = FieldCtx::prime((1 << 31) - 1)?;
    let (d, n, r) = (3, 4, 1);
    let plan = TensorPlan::new(&f, d, n, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = LowRankTensor::random(&f, &vec![n; d], r, &mut rng).expand();
    let y = plan.measure(&t)?;
    println!("order-{d} tensor of side {n}: {} measurements instead of {}", y.len(), t.len());
    println!("recovery exact: {}", plan.recover(&y)? == t);
    Ok(())
}
