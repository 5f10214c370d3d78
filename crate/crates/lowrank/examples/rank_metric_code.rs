//! Encoding and decoding with a rank-metric code, over a large field and over GF(2).

use lowrank::rankcode::min_distance_brute;
use lowrank::{build_code, build_code_simulated, Family, Fel, FieldCtx, LowRankTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lowrank::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = FieldCtx::prime(13)?;
    let code = build_code(&f, &[6, 6], 1, Family::Dprime)?;
    println!("6x6 code over GF(13) correcting rank-1 errors: dimension {}", code.dimension());
    let msg: Vec<Fel> = (0..code.dimension()).map(|_| f.random(&mut rng)).collect();
    let word = code.encode(&msg)?;
    let err = LowRankTensor::random(&f, &[6, 6], 1, &mut rng).expand();
    let out = code.decode(&word.add(&err)?)?;
    println!("decoded codeword matches: {}", out.codeword == word);
    println!("message recovered: {}", code.extract_message(&out.codeword)? == msg);

    let small = build_code(&FieldCtx::prime(7)?, &[3, 3], 1, Family::Dprime)?;
    println!("3x3 code over GF(7): minimum distance {:?}", min_distance_brute(&small, 1000)?);

    let f2 = FieldCtx::prime(2)?;
    let binary = build_code_simulated(&f2, 3, &[5, 5], 1, Family::Dprime)?;
    let msg: Vec<Fel> = (0..binary.dimension()).map(|_| f2.random(&mut rng)).collect();
    let word = binary.encode(&msg)?;
    let err = LowRankTensor::random(&f2, &[5, 5], 1, &mut rng).expand();
    let out = binary.decode(&word.add(&err)?)?;
    println!("binary 5x5 code, dimension {}: decoded {}", binary.dimension(), out.codeword == word);
    Ok(())
}
