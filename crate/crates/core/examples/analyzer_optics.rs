//! Jones calculus for the QWP/HWP/PBS analyzers and Born-rule coincidence
//! probabilities.

use pairlab::optics::{
    coincidence_probability, hwp, qwp, AnalyzerSetting, JointSetting, Polarization, Port,
};
use pairlab::state::PureState;

fn main() -> pairlab::Result<()> {
    println!("HWP at 22.5 deg:\n{:?}", hwp(22.5f64.to_radians()).matrix());
    println!("QWP at 45 deg:\n{:?}", qwp(45f64.to_radians()).matrix());

    println!("\nplate angles selecting each polarization on the V output:");
    for pol in [Polarization::H, Polarization::V, Polarization::D, Polarization::A, Polarization::R, Polarization::L] {
        let s = AnalyzerSetting::projecting_onto(pol, Port::V);
        println!(
            "  {}  QWP {:6.2} deg  HWP {:6.2} deg",
            pol.label(),
            s.qwp_angle().to_degrees(),
            s.hwp_angle().to_degrees()
        );
    }

    // Correlations of Phi+ in two bases.
    let rho = PureState::phi_plus().projector();
    for (a, b) in [(Polarization::H, Polarization::H), (Polarization::H, Polarization::V), (Polarization::D, Polarization::D), (Polarization::R, Polarization::L)] {
        let j = JointSetting::new(
            AnalyzerSetting::projecting_onto(a, Port::V),
            AnalyzerSetting::projecting_onto(b, Port::V),
        );
        println!("P({}{}) = {:.3}", a.label(), b.label(), coincidence_probability(&rho, &j));
    }

    // Linear analyzers at arbitrary angles.
    let j = JointSetting::new(
        AnalyzerSetting::linear(30f64.to_radians(), Port::V)?,
        AnalyzerSetting::linear(30f64.to_radians(), Port::H)?,
    );
    println!("both at 30 deg, Bob on H: P = {:.3}  (label {})", coincidence_probability(&rho, &j), j.label());
    Ok(())
}
