//! Prime fields, extensions and the canonical enumeration.

use lowrank::FieldCtx;

fn main() -> lowrank::Result<()> {
    let f7 = FieldCtx::prime(7)?;
    let (a, b) = (f7.from_u64(3), f7.from_u64(5));
    println!("in GF(7): 3 * 5 = {}", f7.format_elem(f7.mul(a, b)));
    println!("inverse of 3 = {}", f7.format_elem(f7.inv(a).unwrap()));

    let f8 = FieldCtx::prime(2)?.extension(3)?;
    println!("GF(8) modulus (constant term first): {:?}", f8.modulus().unwrap());
    for i in 0..8 {
        let x = f8.nth_element(i);
        let order = if x.is_zero() { 0 } else { f8.multiplicative_order(x) };
        println!("  element {i}: coeffs {} order {order}", f8.format_elem(x));
    }

    // a generator with a large order, as the tensor families need
    let big = FieldCtx::prime(13)?.extension(6)?;
    let g = big.generator_for(1 << 20)?;
    println!("GF(13^6): g = {} has order {}", big.format_elem(g), big.multiplicative_order(g));

    // multiplication by an element as a matrix over the prime field
    let m = f8.embed_as_matrix(f8.nth_element(3));
    println!("multiplication matrix of element 3 in GF(8):");
    for i in 0..m.rows() {
        println!("  {:?}", m.row(i).iter().map(|x| x.raw()).collect::<Vec<_>>());
    }
    Ok(())
}
