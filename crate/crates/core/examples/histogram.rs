//! One simulated delay histogram: write it as CSV, read it back and reduce
//! it to raw counts, accidental rate, net counts and CAR.

use pairlab::counting::reduce;
use pairlab::optics::{AnalyzerSetting, JointSetting, Polarization, Port};
use pairlab::sim::{paper_reference_model, simulate_histogram, Histogram};

fn main() -> pairlab::Result<()> {
    let model = paper_reference_model();
    // Bob's V detector behind HWP 45 deg sees H: the constructive HH setting.
    let j = JointSetting::new(
        AnalyzerSetting::projecting_onto(Polarization::H, Port::V),
        AnalyzerSetting::projecting_onto(Polarization::H, Port::V),
    );
    let h = simulate_histogram(&model, &j, 1200.0)?;

    let path = std::env::temp_dir().join("pairlab_example_histogram.csv");
    h.write_csv(&path)?;
    let back = Histogram::read_csv(&path)?;
    assert_eq!(back, h);
    println!("wrote {} ({} bins)", path.display(), h.counts.len());

    let peak = h.counts.iter().enumerate().max_by_key(|(_, c)| **c).map(|(i, _)| i).unwrap_or(0);
    println!("peak bin {peak} at {:.2} ns", peak as f64 * h.bin_width * 1e9);

    let r = reduce(&back, back.setting().expect("label encodes the setting"))?;
    println!("N_raw = {:.1}", r.n_raw);
    println!("accidentals in window = {:.2}", r.accidentals);
    println!("N_net = {:.1} +- {:.1}", r.n_net, r.net_variance().sqrt());
    println!("CAR = {:.2}", r.car().ratio);
    Ok(())
}
