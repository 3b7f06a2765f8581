//! Composing a multi-object scene into a single hypervector and reading
//! attributes back out of it. Each object is a key-filler sum bound to a
//! position vector; all objects are bundled into one panel vector.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsar::structure::{compose_panel, decompose_panel, EntityAttr, ObjectFillers};
use vsar::vsa::{cleanup_index, HdVector};

fn main() -> vsar::Result<()> {
    let d = 3000;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let rv = |rng: &mut ChaCha8Rng| HdVector::random(d, rng);

    // one key per attribute, one position vector per grid slot
    let keys = [rv(&mut rng)?, rv(&mut rng)?, rv(&mut rng)?, rv(&mut rng)?];
    let positions: Vec<HdVector> =
        (0..9).map(|_| rv(&mut rng)).collect::<vsar::Result<_>>()?;

    // a 10-entry codebook per attribute; objects pick entries by index
    let books: Vec<Vec<HdVector>> = (0..4)
        .map(|_| (0..10).map(|_| rv(&mut rng)).collect())
        .collect::<Vec<vsar::Result<Vec<_>>>>()
        .into_iter()
        .collect::<vsar::Result<_>>()?;
    let picks = [(0usize, [3usize, 1, 7, 1]), (4, [5, 2, 2, 1]), (8, [3, 4, 9, 1])];

    let objects: Vec<(usize, ObjectFillers)> = picks
        .iter()
        .map(|(slot, p)| {
            (*slot, [
                books[0][p[0]].clone(),
                books[1][p[1]].clone(),
                books[2][p[2]].clone(),
                books[3][p[3]].clone(),
            ])
        })
        .collect();
    let scene = compose_panel(&objects, &keys, &positions)?;
    println!("scene holds {} objects in one {d}-dim vector\n", picks.len());

    // query every (slot, attribute) pair; cleanup snaps the noisy estimate
    // back to the nearest codebook entry
    for (slot, truth) in &picks {
        print!("slot {slot}:");
        for attr in EntityAttr::ALL {
            let est = decompose_panel(&scene, &positions[*slot], &keys[attr.index()])?;
            let read = cleanup_index(&est, &books[attr.index()])?;
            let ok = if read == truth[attr.index()] { "" } else { " (WRONG)" };
            print!("  {}={read}{ok}", attr.name());
        }
        println!();
    }
    Ok(())
}
