//! Normal-order ladder strings and take commutators.

use trotterr::algebra::{normal_order, LadderOp, LadderTerm, NormalOrderedOperator};

fn main() -> trotterr::error::Result<()> {
    let a = LadderOp::annihilate;
    let c = LadderOp::create;

    let product = LadderTerm::new(1.0, vec![a(2), a(1), c(1), c(3)]);
    println!("a2 a1 a1† a3† = {}", normal_order(&product, 4)?);

    let hop = normal_order(&LadderTerm::new(1.0, vec![c(1), a(2)]), 4)?;
    let number = NormalOrderedOperator::number_operator(4);
    println!("[N, a1† a2] = {}", number.commutator(&hop)?);

    let n1 = normal_order(&LadderTerm::new(1.0, vec![c(1), a(1)]), 4)?;
    println!("[a1† a1, a1† a2] = {}", n1.commutator(&hop)?);
    println!("(a1†)² = {}", normal_order(&LadderTerm::new(1.0, vec![c(1), c(1)]), 4)?);
    Ok(())
}
