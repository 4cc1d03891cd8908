//! Runs the constructive pipeline on the adapted plane wave and prints
//! the rescaled media metric and the worst residual.
//!
//! ```sh
//! cargo run -p contact-maxwell --example plane_wave
//! ```

use contact_maxwell::{
    parse, verify_theorem1, BoxDomain, KForm64, MaxwellError, Metric64, Point64, SampleSet,
};

fn main() -> Result<(), MaxwellError<f64>> {
    let e = |s: &str| parse::<f64>(s).unwrap();
    let alpha = KForm64::one_form(e("cos(2*z)"), e("-sin(2*z)"), e("0"));
    let samples = SampleSet::generate(BoxDomain::unit_symmetric(), 2000, 7);

    let omega = 5.0;
    let out = verify_theorem1(&alpha, &Metric64::euclidean(), omega, &samples, 1e-9)?;

    let g = out.media.g_eps().evaluate(&Point64::origin()).unwrap();
    println!("omega = {omega}");
    println!("media metric at the origin (expected 4/25 · identity):");
    for row in g {
        println!("  {row:?}");
    }
    for (name, stat) in out.report.stats() {
        println!("{name:>18}: max {:.3e}  mean {:.3e}", stat.max, stat.mean);
    }
    println!("worst residual: {:.3e}", out.report.worst());
    assert!(out.report.all_within(1e-9));
    Ok(())
}
