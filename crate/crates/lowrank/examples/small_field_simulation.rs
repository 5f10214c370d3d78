//! Testing matrices over GF(2) with families built over an extension.

use lowrank::hitting::{build_simulated, pit_test};
use lowrank::tensor::matrix_rank;
use lowrank::{DenseTensor, Family, Fel, FieldCtx};

fn main() -> lowrank::Result<()> {
    let f2 = FieldCtx::prime(2)?;
    let (n, m) = (3, 3);
    let improper = build_simulated(&f2, 3, Family::D, 1, &[n, m], false)?;
    let proper = build_simulated(&f2, 3, Family::B, 1, &[n, m], true)?;
    println!("improper simulation: {} measurements", improper.len());
    println!("proper simulation:   {} rank-one measurements", proper.len());

    let (mut rank_one, mut hit) = (0, 0);
    for code in 1u32..1 << (n * m) {
        let data = (0..n * m).map(|i| Fel::from_raw(u64::from(code >> i & 1))).collect();
        let t = DenseTensor::from_vec(&f2, &[n, m], data)?;
        if matrix_rank(&t)? != 1 {
            continue;
        }
        rank_one += 1;
        if pit_test(&t, &improper)? && pit_test(&t, &proper)? {
            hit += 1;
        }
    }
    println!("rank-one 3x3 matrices over GF(2): {rank_one}, detected by both: {hit}");
    Ok(())
}
