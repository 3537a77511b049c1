//! The classical one-dimensional Schwarzian derivative: fractional-linear
//! maps form its kernel, S(exp) = -1/2, S(tan(a z)) = 2 a^2, and S is
//! invariant under post-composition with Möbius maps.

use finsler::diffengine::Jet;
use finsler::scalar::Scalar;
use finsler::schwarzian::schwarzian_1d;
use finsler::Result;

fn main() -> Result<()> {
    let mobius = |z: &Jet| (z.scale(2.0).add_const(1.0)) / (z.clone().add_const(3.0));
    println!("S((2z+1)/(z+3)) at a few points:");
    for z in [0.0, 0.5, -1.0] {
        println!("  z = {z:+.1}: {:+.3e}", schwarzian_1d(mobius, z)?);
    }

    println!(
        "S(exp) = {:+.12} (expected -0.5)",
        schwarzian_1d(|z: &Jet| z.exp(), 0.4)?
    );

    for a in [0.5, 1.0, 2.0] {
        let s = schwarzian_1d(|z: &Jet| z.scale(a).sin() / z.scale(a).cos(), 0.3)?;
        println!("S(tan({a} z)) = {s:+.12} (expected {})", 2.0 * a * a);
    }

    // Möbius invariance: S(T o g) = S(g).
    let g = |z: &Jet| z.scale(1.3).sin() / z.scale(1.3).cos();
    let tg = |z: &Jet| {
        let w = g(z);
        (w.scale(2.0).add_const(1.0)) / (w.add_const(3.0))
    };
    let (a, b) = (schwarzian_1d(g, 0.4)?, schwarzian_1d(tg, 0.4)?);
    println!(
        "S(g) = {a:+.12}, S(T o g) = {b:+.12}, difference {:.3e}",
        (a - b).abs()
    );
    Ok(())
}
