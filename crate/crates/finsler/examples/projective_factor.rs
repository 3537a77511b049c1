//! Projective relations between sprays: the Funk ball is projectively flat
//! over the Euclidean base with factor p = F/2, while the sphere chart is
//! not projectively related to flat space.

use finsler::dynamics::projective_factor;
use finsler::metrics::MetricSpec;
use finsler::sample;
use finsler::Result;

fn main() -> Result<()> {
    let flat = MetricSpec::euclidean(2)?;
    let funk = MetricSpec::funk(2)?;
    let sphere = MetricSpec::sphere(2, 1.0)?;

    println!("funk vs flat (expect p = F/2):");
    for tp in sample::tangent_points(&funk, 5, 0.8, 42)? {
        let p = projective_factor(&flat, &funk, &tp)?.expect("projectively related");
        let f = funk.eval_f(&tp)?;
        println!(
            "  x = ({:+.3}, {:+.3}): p = {p:+.9}, F/2 = {:+.9}",
            tp.x()[0],
            tp.x()[1],
            f / 2.0
        );
    }

    let tp = sample::tangent_points(&sphere, 1, 0.8, 43)?.remove(0);
    println!(
        "sphere vs flat: projective factor = {:?} (not projectively related)",
        projective_factor(&flat, &sphere, &tp)?
    );
    println!(
        "funk vs funk:  projective factor = {:?}",
        projective_factor(&funk, &funk, &tp)?
    );
    Ok(())
}
