//! Sparse recovery from dual Reed-Solomon measurements, with and without advice.

use lowrank::sparse::{default_points, dual_rs};
use lowrank::{Fel, FieldCtx};

fn main() -> lowrank::Result<()> {
    let f = FieldCtx::prime(10007)?;
    let n = 40;
    let pts = default_points(&f, n)?;
    let v = dual_rs(&f, &pts, 3)?;

    let mut x = vec![Fel::ZERO; n];
    x[4] = f.from_u64(17);
    x[21] = f.from_u64(5);
    x[33] = f.from_u64(9000);
    let y = v.measure(&f, &x)?;
    println!("{} measurements of a length-{n} vector", y.len());
    let back = v.recover(&f, &[], &y)?;
    println!("3-sparse recovery exact: {}", back == x);

    // with two advised positions the budget outside them drops to 2
    let mut z = x.clone();
    z[0] = f.from_u64(1);
    z[1] = f.from_u64(2);
    z[33] = Fel::ZERO;
    let back = v.recover(&f, &[0, 1], &v.measure(&f, &z)?)?;
    println!("recovery with advice {{0, 1}} exact: {}", back == z);
    Ok(())
}
