//! The rank-one hitting family for order-d tensors.

use lowrank::hitting::{hitting_set_tensor, pit_test, tensor_order_bound};
use lowrank::{DenseTensor, FieldCtx, LowRankTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lowrank::Result<()> {
    let (d, n, r) = (4, 3, 2);
    println!("need a generator of order >= {}", tensor_order_bound(d, n));
    let f = FieldCtx::prime((1 << 31) - 1)?;
    let h = hitting_set_tensor(&f, d, n, r)?;
    println!("{} rank-one measurements instead of {}", h.len(), n.pow(d as u32));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut missed = 0;
    for _ in 0..100 {
        let t = LowRankTensor::random(&f, &vec![n; d], r, &mut rng);
        if !pit_test(&t, &h)? {
            missed += 1;
        }
    }
    println!("random rank-{r} tensors missed: {missed} of 100");
    println!("zero tensor detected as nonzero: {}", pit_test(&DenseTensor::zeros(&f, &vec![n; d]), &h)?);
    Ok(())
}
