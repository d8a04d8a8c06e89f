//! Configuration-driven campaigns: simulate to histogram files, analyze files
//! into reports, or both in one pass.
//!
//! Output layout under the output directory:
//!
//! ```text
//! manifest.json
//! <campaign>/hist_000.csv ...   one histogram per acquisition
//! <campaign>/records.json       the reduced MeasurementRecords
//! <kind>_report.json, *.csv     analysis reports and plot tables
//! summary.json                  pipeline runs only
//! ```
//!
//! Random streams derive from `(seed, campaign id, acquisition index)` only,
//! so a rerun with the same configuration rewrites identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chsh::{
    chsh_from_records, optimal_settings, AngleSearch, ChshReport, ChshSettingPair, REFERENCE_CHSH_DURATION,
};
use crate::counting::{reduce, CountsMode, FringeReportEntry, MeasurementRecord, VisibilityReport};
use crate::error::{Error, Result};
use crate::optics::JointSetting;
use crate::sim::{
    paper_reference_model, simulate_campaign, visibility_sweep_settings, ExperimentModel, Histogram,
    CAMPAIGN_CHSH, CAMPAIGN_TOMOGRAPHY, CAMPAIGN_VISIBILITY, REFERENCE_DURATION,
};
use crate::tomography::{self, james_settings, RecoveryOptions, TomographyOptions, TomographyReport};

/// Name of the built-in reference bench in configs and on the command line.
pub const PAPER_REFERENCE: &str = "paper-reference";

/// Published values of the reference experiment, echoed next to simulated
/// ones in pipeline summaries.
pub mod published {
    pub const S: f64 = 2.37;
    pub const SIGMA_S: f64 = 0.19;
    pub const FIDELITY: f64 = 0.88;
    pub const FIDELITY_RAW: f64 = 0.71;
    pub const FIDELITY_MAXIMAL: f64 = 0.87;
    pub const CAR: f64 = 8.0;
    pub const VISIBILITY_NET: [f64; 2] = [0.99, 0.90];
    pub const VISIBILITY_RAW: [f64; 2] = [0.80, 0.60];
    pub const SINGLES_VISIBILITY: f64 = 0.12;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    VisibilitySweep,
    Tomography,
    Chsh,
    Full,
}

impl Campaign {
    /// Single campaigns this one expands to.
    pub fn expand(self) -> Vec<Campaign> {
        match self {
            Campaign::Full => vec![Campaign::VisibilitySweep, Campaign::Tomography, Campaign::Chsh],
            c => vec![c],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Campaign::VisibilitySweep => "visibility-sweep",
            Campaign::Tomography => "tomography",
            Campaign::Chsh => "chsh",
            Campaign::Full => "full",
        }
    }

    fn id(self) -> u32 {
        match self {
            Campaign::VisibilitySweep => CAMPAIGN_VISIBILITY,
            Campaign::Tomography => CAMPAIGN_TOMOGRAPHY,
            Campaign::Chsh => CAMPAIGN_CHSH,
            Campaign::Full => 0,
        }
    }
}

impl std::str::FromStr for Campaign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.into())).map_err(|_| Error::Config {
            field: "campaign".into(),
            message: format!("unknown campaign `{s}` (visibility-sweep, tomography, chsh, full)"),
        })
    }
}

/// Acquisition time per histogram, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Durations {
    #[serde(default = "default_long")]
    pub visibility: f64,
    #[serde(default = "default_long")]
    pub tomography: f64,
    #[serde(default = "default_chsh")]
    pub chsh: f64,
}

fn default_long() -> f64 {
    REFERENCE_DURATION
}

fn default_chsh() -> f64 {
    REFERENCE_CHSH_DURATION
}

impl Default for Durations {
    fn default() -> Self {
        Self {
            visibility: REFERENCE_DURATION,
            tomography: REFERENCE_DURATION,
            chsh: REFERENCE_CHSH_DURATION,
        }
    }
}

impl Durations {
    fn of(&self, c: Campaign) -> f64 {
        match c {
            Campaign::VisibilitySweep => self.visibility,
            Campaign::Tomography => self.tomography,
            Campaign::Chsh | Campaign::Full => self.chsh,
        }
    }
}

/// Either the built-in reference bench or an explicit model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    PaperReference,
    Custom(Box<ExperimentModel>),
}

impl ModelSpec {
    fn from_value(v: Value) -> Result<Self> {
        match v {
            Value::String(s) if s == PAPER_REFERENCE => Ok(ModelSpec::PaperReference),
            Value::String(s) => Err(Error::Config {
                field: "model".into(),
                message: format!("unknown model `{s}`; use `{PAPER_REFERENCE}` or an object"),
            }),
            obj @ Value::Object(_) => serde_json::from_value(obj)
                .map(|m| ModelSpec::Custom(Box::new(m)))
                .map_err(|e| Error::Config {
                    field: "model".into(),
                    message: e.to_string(),
                }),
            other => Err(Error::Config {
                field: "model".into(),
                message: format!("expected a string or an object, got {other}"),
            }),
        }
    }

    /// Reads `paper-reference` or a JSON model file.
    pub fn parse_arg(arg: &str) -> Result<Self> {
        if arg == PAPER_REFERENCE {
            return Ok(ModelSpec::PaperReference);
        }
        let path = Path::new(arg);
        let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading model {arg}"), e))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| json_parse_error(path, &e))?;
        Self::from_value(v)
    }

    fn resolve(&self) -> ExperimentModel {
        match self {
            ModelSpec::PaperReference => paper_reference_model(),
            ModelSpec::Custom(m) => (**m).clone(),
        }
    }
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ModelSpec::PaperReference => s.serialize_str(PAPER_REFERENCE),
            ModelSpec::Custom(m) => m.serialize(s),
        }
    }
}

fn json_parse_error(path: &Path, e: &serde_json::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub model: ModelSpec,
    pub campaign: Campaign,
    pub durations: Durations,
    pub output_dir: PathBuf,
    /// Replaces the model's own seed.
    pub seed: u64,
    pub counts_mode: CountsMode,
    /// Alice HWP angles in the visibility sweep.
    pub sweep_points: usize,
    pub chsh_search: AngleSearch,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::PaperReference,
            campaign: Campaign::Full,
            durations: Durations::default(),
            output_dir: PathBuf::from("pairlab-out"),
            seed: 1,
            counts_mode: CountsMode::Net,
            sweep_points: 16,
            chsh_search: AngleSearch::Linear,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: Option<Value>,
    campaign: Option<Campaign>,
    durations: Option<Durations>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    counts_mode: Option<CountsMode>,
    sweep_points: Option<usize>,
    chsh_search: Option<AngleSearch>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<ModelSpec>,
    pub campaign: Option<Campaign>,
    pub seed: Option<u64>,
    pub counts_mode: Option<CountsMode>,
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Parses a JSON config. Missing fields take their defaults; syntax
    /// errors carry the line, unknown or mistyped fields their name.
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| json_parse_error(path, &e))?;
        let file: ConfigFile = serde_json::from_value(v).map_err(|e| Error::Config {
            field: field_of(&e.to_string()),
            message: e.to_string(),
        })?;
        let d = Self::default();
        let cfg = Self {
            model: match file.model {
                Some(v) => ModelSpec::from_value(v)?,
                None => d.model,
            },
            campaign: file.campaign.unwrap_or(d.campaign),
            durations: file.durations.unwrap_or(d.durations),
            output_dir: file.output_dir.unwrap_or(d.output_dir),
            seed: file.seed.unwrap_or(d.seed),
            counts_mode: file.counts_mode.unwrap_or(d.counts_mode),
            sweep_points: file.sweep_points.unwrap_or(d.sweep_points),
            chsh_search: file.chsh_search.unwrap_or(d.chsh_search),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_json(&text, path)
    }

    pub fn with_overrides(mut self, o: Overrides) -> Result<Self> {
        if let Some(m) = o.model {
            self.model = m;
        }
        if let Some(c) = o.campaign {
            self.campaign = c;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(m) = o.counts_mode {
            self.counts_mode = m;
        }
        if let Some(d) = o.output_dir {
            self.output_dir = d;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, d) in [
            ("durations.visibility", self.durations.visibility),
            ("durations.tomography", self.durations.tomography),
            ("durations.chsh", self.durations.chsh),
        ] {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Config {
                    field: field.into(),
                    message: format!("must be > 0 seconds, got {d}"),
                });
            }
        }
        if self.sweep_points < 4 {
            return Err(Error::Config {
                field: "sweep_points".into(),
                message: format!("need at least 4, got {}", self.sweep_points),
            });
        }
        self.model().map(|_| ())
    }

    /// The model with the configured seed.
    pub fn model(&self) -> Result<ExperimentModel> {
        let mut m = self.model.resolve();
        m.seed = self.seed;
        m.validate().map_err(|e| Error::Config {
            field: "model".into(),
            message: e.to_string(),
        })?;
        Ok(m)
    }

    /// Acquisition settings of a single campaign.
    pub fn settings(&self, campaign: Campaign) -> Result<Vec<JointSetting>> {
        Ok(match campaign {
            Campaign::VisibilitySweep => visibility_sweep_settings(self.sweep_points),
            Campaign::Tomography => james_settings(),
            Campaign::Chsh => self.chsh_pair()?.acquisitions(),
            Campaign::Full => unreachable!("expanded before use"),
        })
    }

    /// Settings maximizing the predicted S for the state at the analyzers.
    pub fn chsh_pair(&self) -> Result<ChshSettingPair> {
        Ok(optimal_settings(&self.model()?.analyzed_state(), self.chsh_search)?.pair)
    }
}

fn field_of(message: &str) -> String {
    // serde reports e.g. "unknown field `foo`, expected ..." or
    // "invalid type: ... for field `bar`"; pull out the backticked name.
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<root>".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub campaign: String,
    pub campaign_id: u32,
    pub duration_s: f64,
    pub histograms: Vec<String>,
    pub records: String,
}

/// Files written by a run, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub counts_mode: CountsMode,
    pub dry_run: bool,
    pub campaigns: Vec<CampaignManifest>,
    pub reports: Vec<String>,
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn histogram_name(i: usize) -> String {
    format!("hist_{i:03}.csv")
}

/// Simulates the configured campaigns into histogram CSVs and record JSON.
/// With `dry_run` the config is validated and the manifest describes what
/// would be written; nothing touches the filesystem.
pub fn cmd_simulate(cfg: &PipelineConfig, dry_run: bool) -> Result<Manifest> {
    let model = cfg.model()?;
    let mut manifest = Manifest {
        seed: cfg.seed,
        counts_mode: cfg.counts_mode,
        dry_run,
        campaigns: Vec::new(),
        reports: Vec::new(),
    };
    for campaign in cfg.campaign.expand() {
        let stage = format!("simulate {}", campaign.name());
        let settings = cfg.settings(campaign).map_err(|e| e.in_stage(&stage))?;
        let duration = cfg.durations.of(campaign);
        let dir = cfg.output_dir.join(campaign.name());
        let names: Vec<String> = (0..settings.len()).map(histogram_name).collect();
        if !dry_run {
            create_dir(&dir).map_err(|e| e.in_stage(&stage))?;
            let hists =
                simulate_campaign(&model, campaign.id(), &settings, duration).map_err(|e| e.in_stage(&stage))?;
            let mut records = Vec::with_capacity(hists.len());
            for ((h, name), j) in hists.iter().zip(&names).zip(&settings) {
                h.write_csv(&dir.join(name)).map_err(|e| e.in_stage(&stage))?;
                records.push(reduce(h, *j).map_err(|e| e.in_stage(&stage))?);
            }
            write_file(&dir.join("records.json"), &to_json(&records)?).map_err(|e| e.in_stage(&stage))?;
        }
        manifest.campaigns.push(CampaignManifest {
            campaign: campaign.name().into(),
            campaign_id: campaign.id(),
            duration_s: duration,
            histograms: names.iter().map(|n| format!("{}/{n}", campaign.name())).collect(),
            records: format!("{}/records.json", campaign.name()),
        });
    }
    if !dry_run {
        write_file(&cfg.output_dir.join("manifest.json"), &to_json(&manifest)?)?;
    }
    Ok(manifest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisKind {
    Visibility,
    Tomography,
    Chsh,
}

impl AnalysisKind {
    fn of(c: Campaign) -> Self {
        match c {
            Campaign::VisibilitySweep => AnalysisKind::Visibility,
            Campaign::Tomography => AnalysisKind::Tomography,
            Campaign::Chsh | Campaign::Full => AnalysisKind::Chsh,
        }
    }
}

impl std::str::FromStr for AnalysisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "visibility" | "visibility-sweep" => Ok(AnalysisKind::Visibility),
            "tomography" | "tomo" => Ok(AnalysisKind::Tomography),
            "chsh" => Ok(AnalysisKind::Chsh),
            _ => Err(Error::Config {
                field: "kind".into(),
                message: format!("unknown analysis `{s}` (visibility, tomography, chsh)"),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Analysis {
    Visibility(VisibilityReport),
    Tomography(Box<TomographyReport>),
    Chsh(ChshReport),
}

/// Histogram files named by `inputs`; directories contribute their `*.csv`
/// files in name order.
pub fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(format!("listing {}", p.display()), e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "csv"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::EmptySettings);
    }
    Ok(files)
}

/// Reads histogram files and reduces each under the setting in its label.
pub fn load_records(files: &[PathBuf]) -> Result<Vec<MeasurementRecord>> {
    files
        .iter()
        .map(|f| {
            let h = Histogram::read_csv(f)?;
            let setting = h.setting().ok_or_else(|| Error::Parse {
                path: f.clone(),
                line: 2,
                message: format!("label `{}` does not encode an analyzer setting", h.label),
            })?;
            reduce(&h, setting)
        })
        .collect()
}

/// Analyzes histogram files. When `out` is given the report JSON and its
/// plot table are written there.
pub fn cmd_analyze(kind: AnalysisKind, inputs: &[PathBuf], mode: CountsMode, out: Option<&Path>) -> Result<Analysis> {
    let records = load_records(&collect_inputs(inputs)?)?;
    let analysis = analyze_records(kind, records, mode)?;
    if let Some(dir) = out {
        create_dir(dir)?;
        for (name, contents) in report_files(&analysis)? {
            write_file(&dir.join(name), &contents)?;
        }
    }
    Ok(analysis)
}

pub fn analyze_records(kind: AnalysisKind, records: Vec<MeasurementRecord>, mode: CountsMode) -> Result<Analysis> {
    Ok(match kind {
        AnalysisKind::Visibility => Analysis::Visibility(crate::counting::visibility_report(&records)?),
        AnalysisKind::Tomography => {
            let opts = TomographyOptions { mode, ..Default::default() };
            let t = tomography::analyze(records, &opts, &RecoveryOptions::default())?;
            Analysis::Tomography(Box::new(t.report(mode)))
        }
        AnalysisKind::Chsh => Analysis::Chsh(chsh_from_records(&records, mode)?.report()),
    })
}

/// `(file name, contents)` of every file an analysis produces.
pub fn report_files(a: &Analysis) -> Result<Vec<(String, String)>> {
    Ok(match a {
        Analysis::Visibility(r) => {
            let entries: Vec<FringeReportEntry> = r.entries();
            vec![
                ("visibility_report.json".into(), to_json(&entries)?),
                ("fringe.csv".into(), r.fringe_csv()),
            ]
        }
        Analysis::Tomography(r) => vec![
            ("tomography_report.json".into(), to_json(r)?),
            ("tomography_bars.csv".into(), r.bars_csv()),
        ],
        Analysis::Chsh(r) => vec![("chsh_report.json".into(), to_json(r)?)],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelVisibility {
    pub channel: String,
    pub raw: f64,
    pub net: f64,
    pub peak_car: f64,
}

/// Simulated results next to the published ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub seed: u64,
    pub counts_mode: CountsMode,
    pub car: Option<f64>,
    pub visibilities: Vec<ChannelVisibility>,
    pub singles_visibility: Option<f64>,
    pub fidelity: Option<f64>,
    pub fidelity_net: Option<f64>,
    pub fidelity_raw: Option<f64>,
    pub fidelity_to_maximal: Option<f64>,
    pub a_squared: Option<f64>,
    #[serde(rename = "predicted_S")]
    pub predicted_s: Option<f64>,
    #[serde(rename = "S")]
    pub s: Option<f64>,
    #[serde(rename = "sigma_S")]
    pub sigma_s: Option<f64>,
    pub violation_sigmas: Option<f64>,
    #[serde(rename = "paper_S")]
    pub paper_s: f64,
    #[serde(rename = "paper_sigma_S")]
    pub paper_sigma_s: f64,
    pub paper_fidelity: f64,
    pub paper_fidelity_raw: f64,
    pub paper_fidelity_maximal: f64,
    pub paper_car: f64,
    pub paper_visibility_net: [f64; 2],
    pub paper_visibility_raw: [f64; 2],
    pub paper_singles_visibility: f64,
}

impl PipelineSummary {
    fn empty(cfg: &PipelineConfig) -> Self {
        Self {
            seed: cfg.seed,
            counts_mode: cfg.counts_mode,
            car: None,
            visibilities: Vec::new(),
            singles_visibility: None,
            fidelity: None,
            fidelity_net: None,
            fidelity_raw: None,
            fidelity_to_maximal: None,
            a_squared: None,
            predicted_s: None,
            s: None,
            sigma_s: None,
            violation_sigmas: None,
            paper_s: published::S,
            paper_sigma_s: published::SIGMA_S,
            paper_fidelity: published::FIDELITY,
            paper_fidelity_raw: published::FIDELITY_RAW,
            paper_fidelity_maximal: published::FIDELITY_MAXIMAL,
            paper_car: published::CAR,
            paper_visibility_net: published::VISIBILITY_NET,
            paper_visibility_raw: published::VISIBILITY_RAW,
            paper_singles_visibility: published::SINGLES_VISIBILITY,
        }
    }
}

/// Simulates every configured campaign, analyzes the written files and
/// writes `summary.json`. A dry run validates and returns an empty summary.
pub fn cmd_pipeline(cfg: &PipelineConfig, dry_run: bool) -> Result<(Manifest, PipelineSummary)> {
    let mut manifest = cmd_simulate(cfg, dry_run)?;
    let mut summary = PipelineSummary::empty(cfg);
    if dry_run {
        return Ok((manifest, summary));
    }
    for entry in manifest.campaigns.clone() {
        let campaign: Campaign = entry.campaign.parse()?;
        let kind = AnalysisKind::of(campaign);
        let stage = format!("analyze {}", campaign.name());
        let files: Vec<PathBuf> = entry.histograms.iter().map(|h| cfg.output_dir.join(h)).collect();
        let records = load_records(&files).map_err(|e| e.in_stage(&stage))?;
        let analysis = analyze_records(kind, records.clone(), cfg.counts_mode).map_err(|e| e.in_stage(&stage))?;
        for (name, contents) in report_files(&analysis)? {
            write_file(&cfg.output_dir.join(&name), &contents)?;
            manifest.reports.push(name);
        }
        match analysis {
            Analysis::Visibility(r) => {
                summary.car = r.channels.first().map(|c| c.peak_car);
                summary.visibilities = r
                    .channels
                    .iter()
                    .map(|c| ChannelVisibility {
                        channel: c.channel.clone(),
                        raw: c.raw.visibility,
                        net: c.net.visibility,
                        peak_car: c.peak_car,
                    })
                    .collect();
                summary.singles_visibility = Some(r.singles.visibility);
            }
            Analysis::Tomography(r) => {
                // The other counting mode, for the with/without subtraction comparison.
                let other = match cfg.counts_mode {
                    CountsMode::Net => CountsMode::Raw,
                    CountsMode::Raw => CountsMode::Net,
                };
                let alt = match analyze_records(kind, records, other).map_err(|e| e.in_stage(&stage))? {
                    Analysis::Tomography(t) => t.fidelity,
                    _ => unreachable!("same kind"),
                };
                let (net, raw) = match cfg.counts_mode {
                    CountsMode::Net => (r.fidelity, alt),
                    CountsMode::Raw => (alt, r.fidelity),
                };
                summary.fidelity = Some(r.fidelity);
                summary.fidelity_net = Some(net);
                summary.fidelity_raw = Some(raw);
                summary.fidelity_to_maximal = Some(r.fidelity_to_maximal);
                summary.a_squared = Some(r.a_squared);
            }
            Analysis::Chsh(r) => {
                let model = cfg.model()?;
                summary.predicted_s =
                    Some(crate::chsh::predicted_s(&model.analyzed_state(), &r.settings));
                summary.s = Some(r.s);
                summary.sigma_s = Some(r.sigma_s);
                summary.violation_sigmas = Some(r.violation_sigmas);
            }
        }
    }
    manifest.reports.push("summary.json".into());
    write_file(&cfg.output_dir.join("summary.json"), &to_json(&summary)?)?;
    write_file(&cfg.output_dir.join("manifest.json"), &to_json(&manifest)?)?;
    Ok((manifest, summary))
}
