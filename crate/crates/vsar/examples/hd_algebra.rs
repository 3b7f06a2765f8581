//! Core algebra of phasor hypervectors: binding, bundling, inverses, and
//! the fact that elementwise products in the frequency domain are circular
//! convolutions in the time domain.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsar::vsa::{circular_convolution, HdVector};

fn main() -> vsar::Result<()> {
    let d = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = HdVector::random(d, &mut rng)?;
    let b = HdVector::random(d, &mut rng)?;
    let c = HdVector::random(d, &mut rng)?;

    // random vectors are quasi-orthogonal
    println!("sim(a, b)          = {:+.4}", a.similarity(&b)?);

    // binding is invertible and distributes a dissimilar result
    let ab = a.bind(&b)?;
    println!("sim(a*b, a)        = {:+.4}", ab.similarity(&a)?);
    println!("sim(b^-1 * a*b, a) = {:+.4}", b.unbind(&ab)?.similarity(&a)?);

    // bundling keeps the result similar to every member
    let bundle = HdVector::bundle(&[&a, &b, &c], true)?;
    for (name, v) in [("a", &a), ("b", &b), ("c", &c)] {
        println!("sim(a+b+c, {name})     = {:+.4}", bundle.similarity(v)?);
    }

    // a bundle can be probed through a binding: (a*b + c*d) * b^-1 ~ a
    let da = HdVector::random(d, &mut rng)?;
    let noisy = HdVector::bundle(&[&a.bind(&b)?, &c.bind(&da)?], false)?;
    println!("sim(probe, a)      = {:+.4}", b.unbind(&noisy)?.similarity(&a)?);

    // binding in the frequency domain is circular convolution in time
    let direct = circular_convolution(&a.to_time_domain(), &b.to_time_domain());
    let via_bind = ab.to_time_domain();
    let max_err: f64 = direct
        .iter()
        .zip(&via_bind)
        .map(|(p, q): (&Complex64, &Complex64)| (p - q).norm())
        .fold(0.0, f64::max);
    println!("max |conv - bind|  = {max_err:.2e}");
    Ok(())
}
