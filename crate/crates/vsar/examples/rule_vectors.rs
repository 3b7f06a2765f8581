//! Rule abduction in vector space: rows that follow the same rule produce
//! the same relation vector, rows that do not produce a dissimilar one,
//! and the inverse relation executes the rule to predict a missing value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsar::atomic::NumericCodec;
use vsar::relations::{rel_num, rel_num_inverse, RelationSpec};
use vsar::vsa::{cleanup_index, HdVector};

fn main() -> vsar::Result<()> {
    let d = 3000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let num = NumericCodec::new(d, &mut rng)?;
    let enc = |v: i64| num.encode(v as f64);

    // r = e(v2) / e(v1) is constant across rows iff v2 - v1 is
    let progression = RelationSpec::numerical("Progression", &[-1.0, 1.0]);
    let row1 = rel_num(&[&enc(2)?, &enc(3)?], &progression)?;
    let row2 = rel_num(&[&enc(5)?, &enc(6)?], &progression)?;
    let bad = rel_num(&[&enc(1)?, &enc(4)?], &progression)?;
    println!("progression rows agree:    {:+.4}", row1.similarity(&row2)?);
    println!("violating row disagrees:   {:+.4}", row1.similarity(&bad)?);

    // ternary rules use three exponents: v1 + v2 = v3 becomes r = e3/(e1 e2)
    let arith = RelationSpec::numerical("Arithmetic+", &[-1.0, -1.0, 1.0]);
    let row1 = rel_num(&[&enc(2)?, &enc(3)?, &enc(5)?], &arith)?;
    let row2 = rel_num(&[&enc(4)?, &enc(1)?, &enc(5)?], &arith)?;
    println!("arithmetic rows agree:     {:+.4}", row1.similarity(&row2)?);

    // executing a rule: average the relation vector over complete rows,
    // re-arrange for the unknown, and clean up against the value codebook
    let r_bar = HdVector::bundle(&[&row1, &row2], true)?;
    let book: Vec<HdVector> = (0..10).map(|v| enc(v)).collect::<vsar::Result<_>>()?;
    let predicted = rel_num_inverse(&[&enc(3)?, &enc(4)?], &arith, &r_bar)?;
    let value = cleanup_index(&predicted, &book)?;
    println!("3 + 4 executes to:         {value}");
    println!(
        "prediction sharpness:      {:+.4} vs runner-up {:+.4}",
        predicted.similarity(&book[value])?,
        predicted.similarity(&book[6])?
    );
    Ok(())
}
