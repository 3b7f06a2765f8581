//! Abducing the governing rule of an 8-panel context directly from encoded
//! attribute values, then executing its inverse to predict the missing
//! ninth value. Prints the full candidate score table for each sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsar::atomic::NumericCodec;
use vsar::reasoner::{abduce_numeric, execute_numeric};
use vsar::vsa::{cleanup_index, HdVector};

fn main() -> anyhow::Result<()> {
    let d = 3000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let num = NumericCodec::new(d, &mut rng)?;

    // explicit increments tried by the constant/progression candidates
    let steps: Vec<(i8, HdVector)> = [0i8, 1, 2, -1, -2]
        .into_iter()
        .map(|s| Ok((s, num.encode(s as f64)?)))
        .collect::<vsar::Result<_>>()?;
    let book: Vec<HdVector> =
        (0..10).map(|v| num.encode(v as f64)).collect::<vsar::Result<_>>()?;

    // first 8 values of a 3x3 matrix, row-major; the 9th is hidden
    let cases: [(&str, [i64; 8], i64); 4] = [
        ("constant rows", [4, 4, 4, 7, 7, 7, 2, 2], 2),
        ("progression +2", [1, 3, 5, 2, 4, 6, 0, 2], 4),
        ("row arithmetic v1+v2=v3", [2, 3, 5, 4, 1, 5, 3, 3], 6),
        ("three values permuted", [1, 4, 7, 7, 1, 4, 4, 7], 1),
    ];

    for (name, context, hidden) in cases {
        let encoded: Vec<HdVector> =
            context.iter().map(|&v| num.encode(v as f64)).collect::<vsar::Result<_>>()?;
        let vs: [&HdVector; 8] = std::array::from_fn(|i| &encoded[i]);

        let result = abduce_numeric(&vs, &steps, Some(&book))
            .ok_or_else(|| anyhow::anyhow!("no rule reached the score floor"))?;
        let predicted = execute_numeric(&result, vs[6], vs[7])?;
        let value = cleanup_index(&predicted, &book)?;

        println!("{name}: abduced {} (score {:.4})", result.label, result.score);
        let table: Vec<String> =
            result.table.iter().map(|(l, s)| format!("{l}={s:.3}")).collect();
        println!("  candidates: {}", table.join(" "));
        println!(
            "  predicted ninth value: {value} (expected {hidden}){}",
            if value as i64 == hidden { "" } else { "  MISMATCH" }
        );
    }
    Ok(())
}
