//! Generates one matrix puzzle per panel configuration and solves it,
//! printing the abduced rule per attribute next to the generator's ground
//! truth and the similarity score of every answer candidate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsar::codebook::CodebookSet;
use vsar::raven::{generate_puzzle, Configuration};
use vsar::reasoner::{solve, ReasonAttr};

fn main() -> anyhow::Result<()> {
    let books = CodebookSet::build(3000, 0, 20.0)?;
    let mut gen_rng = ChaCha8Rng::seed_from_u64(1);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(2);

    for config in Configuration::ALL {
        let puzzle = generate_puzzle(config, &mut gen_rng);
        let solution = solve(&puzzle, &books, 0.0, &mut noise_rng)?;

        let verdict = if solution.answer == puzzle.answer { "correct" } else { "WRONG" };
        println!("{config}: picked candidate {} ({verdict})", solution.answer);
        for (i, (truth, found)) in
            puzzle.components.iter().zip(&solution.components).enumerate()
        {
            let fmt = |l: Option<vsar::raven::RuleLabel>| {
                l.map_or("-".to_string(), |l| l.to_string())
            };
            print!("  component {i}:");
            print!(" shape={}", fmt(found.label_of(ReasonAttr::Shape)));
            print!(" size={}", fmt(found.label_of(ReasonAttr::Size)));
            print!(" color={}", fmt(found.label_of(ReasonAttr::Color)));
            if truth.n_slots > 1 {
                print!(" number={}", fmt(found.label_of(ReasonAttr::Number)));
                print!(" position={}", fmt(found.label_of(ReasonAttr::Position)));
            }
            println!();
            println!(
                "    truth:    shape={} size={} color={}{}{}",
                truth.rules.shape,
                truth.rules.size,
                truth.rules.color,
                truth.rules.number.map_or(String::new(), |l| format!(" number={l}")),
                truth.rules.position.map_or(String::new(), |l| format!(" position={l}")),
            );
        }
        let scores: Vec<String> =
            solution.candidate_scores.iter().map(|s| format!("{s:.3}")).collect();
        println!("  candidate scores: [{}]\n", scores.join(", "));
    }
    Ok(())
}
