//! Prints the configuration case and sign of H over a coarse grid of
//! contact angles and cone half-angles.

use capcone::cone::{classify_configuration, sign_of_h, CapCase, HSign};

fn main() -> capcone::Result<()> {
    let phis: Vec<f64> = (1..=8).map(|k| k as f64 * 10.0).collect();
    print!("gamma\\phi");
    for phi in &phis {
        print!("{phi:>5}");
    }
    println!();
    for g in (5..180).step_by(10) {
        print!("{g:>9}");
        for phi in &phis {
            let (gamma, phi) = ((g as f64).to_radians(), phi.to_radians());
            let case = match classify_configuration(gamma, phi)? {
                CapCase::ConcaveA => 'A',
                CapCase::ConvexB => 'B',
                CapCase::TwoCapsC => 'C',
                CapCase::FlatD => 'D',
            };
            let sign = match sign_of_h(gamma, phi)? {
                HSign::Positive => '+',
                HSign::Zero => '0',
                HSign::Negative => '-',
            };
            print!("   {case}{sign}");
        }
        println!();
    }
    Ok(())
}
