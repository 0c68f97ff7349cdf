//! Gray-mapped QPSK and zero-padded frames.

use dlcstc::modem::{bit_errors, build_frame, qpsk_demodulate, qpsk_modulate, random_bits, Constellation};
use dlcstc::rng::rng_from_seed;
use num_complex::Complex64;

fn main() -> dlcstc::Result<()> {
    let mut rng = rng_from_seed(3);
    let bits = random_bits(&mut rng, 12);
    let s = qpsk_modulate(&bits)?;
    println!("bits    {bits:?}");
    for z in s.iter() {
        println!("  {:+.4} {:+.4}j", z.re, z.im);
    }

    let frame = build_frame(s.clone(), 3)?;
    println!("frame: N = {}, p = {}, padded length {}", frame.n, frame.p, frame.padded.len());

    // A small rotation does not cross a decision boundary.
    let q = Constellation::qpsk();
    let rot = Complex64::from_polar(1.0, 0.3);
    let sliced: Vec<Complex64> = s.iter().map(|z| q.slice(z * rot)).collect();
    let back = qpsk_demodulate(&sliced);
    println!("bit errors after 0.3 rad rotation: {}", bit_errors(&bits, &back));
    println!("constellation energy {}", q.energy());
    Ok(())
}
