//! The three atomic codecs: fractional power encoding of reals, circular
//! (modular) encoding of integers, and boolean codewords whose logic gates
//! are algebraic operations on the vectors themselves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsar::atomic::{BooleanCodec, CircularCodec, LogicOp, NumericCodec};

fn main() -> vsar::Result<()> {
    let d = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // numbers: encode(x) = base^x, so binding adds and powers scale
    let num = NumericCodec::new(d, &mut rng)?;
    let three = num.encode(3.0)?;
    let five = num.encode(5.0)?;
    let eight = three.bind(&five)?;
    println!("sim(e(3)*e(5), e(8))   = {:+.6}", eight.similarity(&num.encode(8.0)?)?);
    println!("sim(e(3)^2,   e(6))    = {:+.6}", three.pow(2.0)?.similarity(&num.encode(6.0)?)?);
    print!("kernel around 3.0:      ");
    for dx in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        print!("{:+.3} ", three.similarity(&num.encode(3.0 + dx)?)?);
    }
    println!();

    // integers mod n: encode_int(x) equals encode_int(x + n) exactly
    let circ = CircularCodec::new(9, d, &mut rng)?;
    println!(
        "sim(c(2), c(11))       = {:+.6}",
        circ.encode_int(2).similarity(&circ.encode_int(11))?
    );
    println!(
        "sim(c(2), c(5))        = {:+.6}",
        circ.encode_int(2).similarity(&circ.encode_int(5))?
    );

    // booleans: NOT is a half-period shift, XOR a binding, AND/OR
    // polynomial combinations of the two
    let bv = BooleanCodec::new(d, &mut rng)?;
    for (op, name) in [(LogicOp::And, "AND"), (LogicOp::Or, "OR "), (LogicOp::Xor, "XOR")] {
        print!("{name}:");
        for a in [false, true] {
            for b in [false, true] {
                let out = bv.logic(op, &bv.encode(a), Some(&bv.encode(b)))?;
                let bit = out.similarity(bv.e1())? > out.similarity(bv.e0())?;
                print!("  {}{} -> {}", a as u8, b as u8, bit as u8);
            }
        }
        println!();
    }
    Ok(())
}
