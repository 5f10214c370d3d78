//! Recovering a low-rank matrix from D' and B' measurements.

use lowrank::lrr::{BPrimeConverter, DiagonalDecoder};
use lowrank::{FieldCtx, LowRankTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lowrank::Result<()> {
    let f = FieldCtx::prime((1 << 31) - 1)?;
    let (n, m, r) = (32, 40, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = LowRankTensor::random(&f, &[n, m], r, &mut rng).expand();

    let dec = DiagonalDecoder::new(&f, n, m, r)?;
    let y = dec.measure(&t)?;
    println!("{n}x{m} rank-{r} matrix: {} measurements instead of {}", y.len(), n * m);
    println!("D' recovery exact: {}", dec.recover(&y)? == t);

    // rank-one measurements, converted to diagonal syndromes first
    let conv = BPrimeConverter::new(&f, n, m, r)?;
    let yb = conv.measure(&t)?;
    println!("B' recovery exact: {}", dec.recover(&conv.convert(&yb)?)? == t);
    Ok(())
}
