//! Two-photon interference: sweep Alice's HWP, fit raw and net fringes on
//! both of Bob's detectors and the singles fringe on Alice's.

use pairlab::counting::visibility_report;
use pairlab::sim::{paper_reference_model, run_campaign_as, visibility_sweep_settings, CAMPAIGN_VISIBILITY};

fn main() -> pairlab::Result<()> {
    let model = paper_reference_model();
    let records = run_campaign_as(&model, CAMPAIGN_VISIBILITY, &visibility_sweep_settings(16), 1200.0)?;
    let report = visibility_report(&records)?;
    for c in &report.channels {
        println!(
            "{}: raw V = {:.3}, net V = {:.3} +- {:.3}, peak CAR = {:.1}",
            c.channel,
            c.raw.visibility,
            c.net.visibility,
            c.net.visibility_sigma.unwrap_or(f64::NAN),
            c.peak_car
        );
    }
    println!("singles: V = {:.4}", report.singles.visibility);
    println!("\n{}", report.fringe_csv().lines().take(6).collect::<Vec<_>>().join("\n"));
    Ok(())
}
