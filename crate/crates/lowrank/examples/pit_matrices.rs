//! Black-box identity testing of low-rank matrices with the B, D and primed families.

use lowrank::hitting::{build_family, pit_witness};
use lowrank::tensor::matrix_rank;
use lowrank::{Family, FieldCtx, LowRankTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lowrank::Result<()> {
    let f = FieldCtx::prime(101)?;
    let (n, m, r) = (6, 8, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = LowRankTensor::random(&f, &[n, m], r, &mut rng).expand();
    println!("planted {n}x{m} matrix of rank {}", matrix_rank(&t)?);

    for family in [Family::B, Family::D, Family::Bprime, Family::Dprime] {
        let h = build_family(&f, family, r, &[n, m])?;
        let w = pit_witness(&t, &h)?;
        println!("{:>7}: {:3} measurements, first witness {w:?}", family.tag(), h.len());
    }
    println!("naive set would need {} measurements", n * m);
    Ok(())
}
