//! Config-driven end-to-end run: simulate every campaign to files, analyze
//! them and print the summary next to the published values.

use pairlab::pipeline::{cmd_pipeline, PipelineConfig};

fn main() -> pairlab::Result<()> {
    let out = std::env::temp_dir().join("pairlab_example_pipeline");
    let config = format!(r#"{{"model": "paper-reference", "seed": 5, "output_dir": {:?}}}"#, out);
    let cfg = PipelineConfig::from_json(&config, "inline.json".as_ref())?;
    let (manifest, summary) = cmd_pipeline(&cfg, false)?;

    let files: usize = manifest.campaigns.iter().map(|c| c.histograms.len()).sum();
    println!("{files} histograms and {} reports under {}", manifest.reports.len(), out.display());
    println!("CAR                 {:.2}   (published {})", summary.car.unwrap_or(f64::NAN), summary.paper_car);
    for v in &summary.visibilities {
        println!("{:20}raw {:.2} net {:.2}", v.channel, v.raw, v.net);
    }
    println!(
        "fidelity            {:.3}  raw {:.3}  (published {} / {})",
        summary.fidelity.unwrap_or(f64::NAN),
        summary.fidelity_raw.unwrap_or(f64::NAN),
        summary.paper_fidelity,
        summary.paper_fidelity_raw
    );
    println!(
        "S                   {:.2} +- {:.2}  predicted {:.2}  (published {} +- {})",
        summary.s.unwrap_or(f64::NAN),
        summary.sigma_s.unwrap_or(f64::NAN),
        summary.predicted_s.unwrap_or(f64::NAN),
        summary.paper_s,
        summary.paper_sigma_s
    );
    Ok(())
}
