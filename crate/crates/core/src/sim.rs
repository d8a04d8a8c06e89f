//! Forward Monte Carlo model of the bench: chip state, fiber rotations,
//! analyzers, detectors and the time-to-digital converter that histograms
//! Bob−Alice delays.
//!
//! Signal coincidences fall uniformly into the bins lying wholly inside the
//! signal window; accidentals form a flat Poisson floor over every bin.

use std::io::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{reduce, MeasurementRecord};
use crate::error::{Error, Result};
use crate::optics::{coincidence_probability, singles_probability, AnalyzerSetting, Arm, JointSetting, Port};
use crate::state::{kron, re, rotate_unchecked, target_state, DensityMatrix, JonesMatrix, Mat4};

/// Time-bin width of the delay histograms, seconds.
pub const REFERENCE_BIN_WIDTH: f64 = 250e-12;
/// Signal window length `t_f − t_i`, seconds.
pub const REFERENCE_WINDOW_LENGTH: f64 = 0.8e-9;
pub const REFERENCE_DARK_RATE: f64 = 10.0;
/// Detected coincidence rate at the constructive setting, Hz.
pub const REFERENCE_PAIR_RATE: f64 = 0.4;
/// Coincidence-to-accidental ratio at the constructive setting.
pub const REFERENCE_CAR: f64 = 8.0;
pub const REFERENCE_A_SQUARED: f64 = 0.6;
/// Fraction of the HH–VV coherence of the ideal state that survives in the
/// reference chip state. Fidelity to the ideal state is
/// `a⁴ + b⁴ + 2·c·a²b²`, which is 0.88 at this value.
pub const REFERENCE_COHERENCE: f64 = 0.75;
/// Default acquisition time per setting, seconds (20 min per fringe point).
pub const REFERENCE_DURATION: f64 = 1200.0;
/// Alice singles rate at unit detection probability, Hz.
pub const REFERENCE_SINGLES_SCALE: f64 = 1.0e5;

/// Everything needed to forward-simulate acquisitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentModel {
    pub chip_state: DensityMatrix,
    pub fiber_a: JonesMatrix,
    pub fiber_b: JonesMatrix,
    /// Detected coincidence rate at the reference aligned setting, Hz.
    pub pair_rate: f64,
    /// Flat coincidence background: counts per second of acquisition per
    /// second of delay.
    pub accidental_rate: f64,
    pub dark_rate_per_detector: f64,
    pub singles_rate_scale: f64,
    pub bin_width: f64,
    pub t_max: f64,
    /// `[t_i, t_f]`, seconds.
    pub window: [f64; 2],
    pub seed: u64,
    /// Only Alice's V output has a detector.
    #[serde(default)]
    pub alice_v_only: bool,
    /// Uniform HWP misalignment drawn per acquisition, degrees (± this value).
    #[serde(default)]
    pub angle_jitter_deg: f64,
}

/// `a²|HH⟩⟨HH| + b²|VV⟩⟨VV| + c·ab(|HH⟩⟨VV| + |VV⟩⟨HH|)`.
pub fn dephased_target(a_squared: f64, coherence: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&coherence) {
        return Err(Error::InvalidModel(format!("coherence {coherence} outside [0, 1]")));
    }
    let pure = target_state(a_squared.max(0.0).sqrt(), (1.0 - a_squared).max(0.0).sqrt())?;
    let mut m = *pure.projector().matrix();
    m[(0, 3)] *= re(coherence);
    m[(3, 0)] *= re(coherence);
    DensityMatrix::from_hermitian_part(m)
}

/// Parameters of the bench described in the reference experiment.
pub fn paper_reference_model() -> ExperimentModel {
    let t_i = 10.0 * REFERENCE_BIN_WIDTH;
    ExperimentModel {
        chip_state: dephased_target(REFERENCE_A_SQUARED, REFERENCE_COHERENCE)
            .expect("reference state is valid"),
        fiber_a: JonesMatrix::identity(),
        fiber_b: JonesMatrix::identity(),
        pair_rate: REFERENCE_PAIR_RATE,
        accidental_rate: REFERENCE_PAIR_RATE / (REFERENCE_CAR * REFERENCE_WINDOW_LENGTH),
        dark_rate_per_detector: REFERENCE_DARK_RATE,
        singles_rate_scale: REFERENCE_SINGLES_SCALE,
        bin_width: REFERENCE_BIN_WIDTH,
        t_max: 160.0 * REFERENCE_BIN_WIDTH,
        window: [t_i, t_i + REFERENCE_WINDOW_LENGTH],
        seed: 1,
        alice_v_only: true,
        angle_jitter_deg: 0.0,
    }
}

/// Expected values of one acquisition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedCounts {
    pub signal: f64,
    pub accidentals_per_bin: f64,
    pub singles_a: f64,
}

impl ExperimentModel {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("pair_rate", self.pair_rate),
            ("accidental_rate", self.accidental_rate),
            ("dark_rate_per_detector", self.dark_rate_per_detector),
            ("singles_rate_scale", self.singles_rate_scale),
            ("angle_jitter_deg", self.angle_jitter_deg),
        ];
        for (name, v) in rates {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidModel(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        let [t_i, t_f] = self.window;
        if !(self.bin_width.is_finite() && self.bin_width > 0.0) {
            return Err(Error::InvalidModel(format!("bin_width must be > 0, got {}", self.bin_width)));
        }
        if !(0.0 <= t_i && t_i < t_f && t_f <= self.t_max) {
            return Err(Error::InvalidModel(format!(
                "need 0 <= t_i < t_f <= t_max, got [{t_i:e}, {t_f:e}] with t_max {:e}",
                self.t_max
            )));
        }
        for (name, t) in [("t_max", self.t_max), ("t_i", t_i)] {
            let k = t / self.bin_width;
            if (k - k.round()).abs() > 1e-9 {
                return Err(Error::InvalidModel(format!("{name} is not a multiple of bin_width")));
            }
        }
        self.chip_state.check()?;
        JonesMatrix::new(*self.fiber_a.matrix())?;
        JonesMatrix::new(*self.fiber_b.matrix())?;
        Ok(())
    }

    pub fn bins(&self) -> usize {
        (self.t_max / self.bin_width).round() as usize
    }

    /// State arriving at the analyzers.
    pub fn analyzed_state(&self) -> DensityMatrix {
        rotate_unchecked(&self.chip_state, &self.fiber_a, &self.fiber_b)
    }

    /// Coincidence probability at the reference setting: both analyzers
    /// aligned (through the fibers) to the chip state's dominant product axis.
    pub fn reference_probability(&self) -> f64 {
        let m = self.chip_state.matrix();
        (0..4).map(|k| m[(k, k)].re).fold(0.0, f64::max)
    }

    fn signal_scale(&self) -> f64 {
        let p_ref = self.reference_probability();
        if p_ref > 0.0 {
            self.pair_rate / p_ref
        } else {
            0.0
        }
    }

    pub fn expected(&self, j: &JointSetting, duration: f64) -> ExpectedCounts {
        let rho = self.analyzed_state();
        ExpectedCounts {
            signal: self.signal_scale() * duration * coincidence_probability(&rho, j),
            accidentals_per_bin: self.accidental_rate * duration * self.bin_width,
            singles_a: (self.singles_rate_scale * singles_probability(&rho, &j.alice, Arm::A)
                + self.dark_rate_per_detector)
                * duration,
        }
    }

    /// Bins wholly inside the signal window.
    fn signal_bins(&self) -> std::ops::Range<usize> {
        let [t_i, t_f] = self.window;
        let first = (t_i / self.bin_width).round() as usize;
        let end = ((t_f / self.bin_width) + 1e-9).floor() as usize;
        if end > first {
            first..end
        } else {
            first..first + 1
        }
    }
}

/// Delay histogram of one detector pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
    /// `[t_i, t_f]`, seconds.
    pub window: [f64; 2],
    pub t_max: f64,
    pub duration: f64,
    pub singles_a: u64,
    pub label: String,
}

/// Header naming the metadata fields of the histogram CSV.
pub const HISTOGRAM_CSV_HEADER: &str = "# bin_width_s,t_i_s,t_f_s,t_max_s,duration_s,singles_A,label";

impl Histogram {
    /// CSV text: the field-name header, a `#` line with the values, then one
    /// count per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(16 * self.counts.len() + 128);
        s.push_str(HISTOGRAM_CSV_HEADER);
        s.push('\n');
        s.push_str(&format!(
            "# {:e},{:e},{:e},{:e},{:e},{},{}\n",
            self.bin_width, self.window[0], self.window[1], self.t_max, self.duration, self.singles_a, self.label
        ));
        for c in &self.counts {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses [`Histogram::to_csv`] output. `path` is only used in diagnostics.
    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == HISTOGRAM_CSV_HEADER => {}
            Some((i, l)) => return Err(err(i + 1, format!("expected header `{HISTOGRAM_CSV_HEADER}`, found `{l}`"))),
            None => return Err(err(1, "empty file".into())),
        }
        let (i, meta) = lines.next().ok_or_else(|| err(2, "missing metadata line".into()))?;
        let meta = meta
            .strip_prefix('#')
            .ok_or_else(|| err(i + 1, "metadata line must start with `#`".into()))?
            .trim();
        let fields: Vec<&str> = meta.splitn(7, ',').collect();
        if fields.len() != 7 {
            return Err(err(i + 1, format!("expected 7 metadata fields, found {}", fields.len())));
        }
        let num = |k: usize| -> Result<f64> {
            fields[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| err(i + 1, format!("field {}: {e}", k + 1)))
        };
        let (bin_width, t_i, t_f, t_max, duration) = (num(0)?, num(1)?, num(2)?, num(3)?, num(4)?);
        let singles_a = fields[5]
            .trim()
            .parse::<u64>()
            .map_err(|e| err(i + 1, format!("singles_A: {e}")))?;
        let label = fields[6].to_string();
        let mut counts = Vec::new();
        for (i, l) in lines {
            let l = l.trim();
            if l.is_empty() {
                continue;
            }
            counts.push(l.parse::<u64>().map_err(|e| err(i + 1, format!("count `{l}`: {e}")))?);
        }
        let expected = (t_max / bin_width).round() as usize;
        if counts.len() != expected {
            return Err(err(0, format!("{} counts, expected t_max/bin_width = {expected}", counts.len())));
        }
        Ok(Self {
            bin_width,
            counts,
            window: [t_i, t_f],
            t_max,
            duration,
            singles_a,
            label,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        f.write_all(self.to_csv().as_bytes())
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_csv(&text, path)
    }

    pub fn setting(&self) -> Option<JointSetting> {
        JointSetting::parse_label(&self.label)
    }
}

/// Campaign ids used for random-stream derivation.
pub const CAMPAIGN_VISIBILITY: u32 = 1;
pub const CAMPAIGN_TOMOGRAPHY: u32 = 2;
pub const CAMPAIGN_CHSH: u32 = 3;

/// Random stream for acquisition `index` of campaign `campaign`.
pub fn stream_id(campaign: u32, index: u32) -> u64 {
    ((campaign as u64) << 32) | index as u64
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean > 0.0 {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
    } else {
        0
    }
}

fn check_setting(model: &ExperimentModel, j: &JointSetting) -> Result<()> {
    if model.alice_v_only && j.alice.port() != Port::V {
        return Err(Error::UnavailablePort);
    }
    Ok(())
}

/// Simulates one acquisition on random stream 0.
pub fn simulate_histogram(model: &ExperimentModel, j: &JointSetting, duration: f64) -> Result<Histogram> {
    simulate_histogram_on_stream(model, j, duration, 0)
}

/// Simulates one acquisition on an explicit random stream, so that batches
/// can run in any order and still reproduce.
pub fn simulate_histogram_on_stream(
    model: &ExperimentModel,
    j: &JointSetting,
    duration: f64,
    stream: u64,
) -> Result<Histogram> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidDuration(duration));
    }
    model.validate()?;
    check_setting(model, j)?;
    let mut rng = rng_for(model.seed, stream);

    let effective = if model.angle_jitter_deg > 0.0 {
        let amp = model.angle_jitter_deg.to_radians();
        let mut jitter = |s: &AnalyzerSetting| {
            let dh = rng.random_range(-amp..=amp);
            AnalyzerSetting::new(s.qwp_angle(), s.hwp_angle() + dh, s.port())
        };
        JointSetting::new(jitter(&j.alice)?, jitter(&j.bob)?)
    } else {
        *j
    };
    let expected = model.expected(&effective, duration);

    let mut counts = vec![0u64; model.bins()];
    for c in counts.iter_mut() {
        *c = poisson(&mut rng, expected.accidentals_per_bin);
    }
    let mut remaining = poisson(&mut rng, expected.signal);
    let bins = model.signal_bins();
    let n_bins = bins.len();
    for (i, k) in bins.enumerate() {
        let left = (n_bins - i) as f64;
        let take = if left <= 1.0 || remaining == 0 {
            remaining
        } else {
            Binomial::new(remaining, 1.0 / left).expect("valid binomial").sample(&mut rng)
        };
        counts[k] += take;
        remaining -= take;
    }
    let singles_a = poisson(&mut rng, expected.singles_a);

    Ok(Histogram {
        bin_width: model.bin_width,
        counts,
        window: model.window,
        t_max: model.t_max,
        duration,
        singles_a,
        label: j.label(),
    })
}

/// Simulates every setting of a campaign; acquisition `i` uses stream
/// `stream_id(campaign, i)`.
pub fn simulate_campaign(
    model: &ExperimentModel,
    campaign: u32,
    settings: &[JointSetting],
    duration_each: f64,
) -> Result<Vec<Histogram>> {
    if settings.is_empty() {
        return Err(Error::EmptySettings);
    }
    settings
        .par_iter()
        .enumerate()
        .map(|(i, j)| simulate_histogram_on_stream(model, j, duration_each, stream_id(campaign, i as u32)))
        .collect()
}

/// Simulates and reduces a batch of acquisitions (campaign id 0).
pub fn run_campaign(
    model: &ExperimentModel,
    settings: &[JointSetting],
    duration_each: f64,
) -> Result<Vec<MeasurementRecord>> {
    run_campaign_as(model, 0, settings, duration_each)
}

pub fn run_campaign_as(
    model: &ExperimentModel,
    campaign: u32,
    settings: &[JointSetting],
    duration_each: f64,
) -> Result<Vec<MeasurementRecord>> {
    let hists = simulate_campaign(model, campaign, settings, duration_each)?;
    hists.iter().zip(settings).map(|(h, j)| reduce(h, *j)).collect()
}

/// Sweep of Alice's HWP over `points` angles in `[0, 90°)`, recorded on both of
/// Bob's detectors. Alice's QWP stays idle. Bob's HWP sits at 45° so his V
/// detector sees the chip's H polarization, the state's dominant component.
pub fn visibility_sweep_settings(points: usize) -> Vec<JointSetting> {
    let bob = AnalyzerSetting::from_degrees(0.0, 45.0, Port::V).expect("finite");
    let mut out = Vec::with_capacity(2 * points);
    for port in [Port::V, Port::H] {
        for k in 0..points {
            let theta = 90.0 * k as f64 / points as f64;
            let alice = AnalyzerSetting::from_degrees(0.0, theta, Port::V).expect("finite");
            out.push(JointSetting::new(alice, bob.with_port(port)));
        }
    }
    out
}

/// `(F_A ⊗ F_B)† (P_A ⊗ P_B) (F_A ⊗ F_B)`: the analyzer operator pulled back
/// to the chip output.
pub fn pulled_back_projector(model: &ExperimentModel, j: &JointSetting) -> Mat4 {
    let u = kron(model.fiber_a.matrix(), model.fiber_b.matrix());
    u.adjoint() * crate::optics::joint_projector(j) * u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::Polarization;
    use crate::state::{random_unitary, PureState};

    fn generic_model() -> ExperimentModel {
        ExperimentModel {
            chip_state: PureState::phi_plus().projector(),
            alice_v_only: false,
            ..paper_reference_model()
        }
    }

    fn hh() -> JointSetting {
        JointSetting::new(AnalyzerSetting::idle(Port::H), AnalyzerSetting::idle(Port::H))
    }

    #[test]
    fn reference_parameters() {
        let m = paper_reference_model();
        assert_eq!(m.bin_width, 250e-12);
        assert!((m.window[1] - m.window[0] - 0.8e-9).abs() < 1e-21);
        assert_eq!(m.dark_rate_per_detector, 10.0);
        assert_eq!(m.pair_rate, 0.4);
        m.validate().unwrap();
        let target = target_state(0.6f64.sqrt(), 0.4f64.sqrt()).unwrap();
        let f = crate::state::fidelity_pure(&m.chip_state, &target);
        assert!((f - 0.88).abs() < 1e-12);
    }

    #[test]
    fn silent_model_gives_empty_histogram() {
        let m = ExperimentModel {
            pair_rate: 0.0,
            accidental_rate: 0.0,
            dark_rate_per_detector: 0.0,
            singles_rate_scale: 0.0,
            ..generic_model()
        };
        let h = simulate_histogram(&m, &hh(), 100.0).unwrap();
        assert!(h.counts.iter().all(|&c| c == 0));
        assert_eq!(h.singles_a, 0);
        assert_eq!(h.counts.len(), 160);
    }

    #[test]
    fn accidental_floor_mean() {
        let r = 4.0e9;
        let m = ExperimentModel {
            pair_rate: 0.0,
            accidental_rate: r,
            t_max: 10_000.0 * REFERENCE_BIN_WIDTH,
            ..generic_model()
        };
        let d = 2.0;
        let h = simulate_histogram(&m, &hh(), d).unwrap();
        let mean_expected = r * d * m.bin_width;
        let n = h.counts.len() as f64;
        let mean = h.counts.iter().sum::<u64>() as f64 / n;
        let se = (mean_expected / n).sqrt();
        assert!((mean - mean_expected).abs() < 3.0 * se, "{mean} vs {mean_expected}");
    }

    #[test]
    fn deterministic_given_seed() {
        let m = generic_model();
        let a = simulate_histogram(&m, &hh(), 500.0).unwrap();
        let b = simulate_histogram(&m, &hh(), 500.0).unwrap();
        assert_eq!(a, b);
        let c = simulate_histogram(&ExperimentModel { seed: 2, ..m }, &hh(), 500.0).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn errors() {
        let m = generic_model();
        assert!(matches!(simulate_histogram(&m, &hh(), 0.0), Err(Error::InvalidDuration(_))));
        let bad = ExperimentModel { window: [1e-9, 0.5e-9], ..m.clone() };
        assert!(matches!(simulate_histogram(&bad, &hh(), 1.0), Err(Error::InvalidModel(_))));
        let bad = ExperimentModel { pair_rate: -1.0, ..m.clone() };
        assert!(matches!(simulate_histogram(&bad, &hh(), 1.0), Err(Error::InvalidModel(_))));
        let bench = paper_reference_model();
        assert!(matches!(simulate_histogram(&bench, &hh(), 1.0), Err(Error::UnavailablePort)));
        assert!(matches!(run_campaign(&m, &[], 1.0), Err(Error::EmptySettings)));
    }

    #[test]
    fn signal_lands_inside_window() {
        let m = ExperimentModel { accidental_rate: 0.0, pair_rate: 100.0, ..generic_model() };
        let h = simulate_histogram(&m, &hh(), 10.0).unwrap();
        let total: u64 = h.counts.iter().sum();
        assert!(total > 0);
        let first = (m.window[0] / m.bin_width).round() as usize;
        for (k, &c) in h.counts.iter().enumerate() {
            if c > 0 {
                assert!((first..first + 3).contains(&k), "count in bin {k}");
            }
        }
    }

    #[test]
    fn campaign_shapes() {
        let m = generic_model();
        assert_eq!(run_campaign(&m, &[hh()], 10.0).unwrap().len(), 1);
        let a = run_campaign(&m, &[hh(), hh()], 10.0).unwrap();
        let b = run_campaign(&m, &[hh(), hh()], 10.0).unwrap();
        assert_eq!(a, b);
        // Distinct streams per index.
        assert_ne!(simulate_campaign(&m, 0, &[hh(), hh()], 1000.0).unwrap()[0].counts,
                   simulate_campaign(&m, 0, &[hh(), hh()], 1000.0).unwrap()[1].counts);
    }

    #[test]
    fn fiber_rotation_covariance_of_means() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rotated = ExperimentModel {
            chip_state: crate::state::random_density_matrix(&mut rng),
            fiber_a: random_unitary(&mut rng),
            fiber_b: random_unitary(&mut rng),
            ..generic_model()
        };
        let j = JointSetting::new(
            AnalyzerSetting::projecting_onto(Polarization::D, Port::V),
            AnalyzerSetting::projecting_onto(Polarization::R, Port::H),
        );
        let p_pulled = rotated.chip_state.expectation(&pulled_back_projector(&rotated, &j));
        let e = rotated.expected(&j, 1.0);
        let scale = rotated.pair_rate / rotated.reference_probability();
        assert!((e.signal - scale * p_pulled).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_and_diagnostics() {
        let m = generic_model();
        let h = simulate_histogram(&m, &hh(), 100.0).unwrap();
        let text = h.to_csv();
        assert!(text.starts_with(HISTOGRAM_CSV_HEADER));
        let back = Histogram::from_csv(&text, Path::new("x.csv")).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.setting().unwrap().alice.port(), Port::H);

        let broken = text.replacen("\n0\n", "\nzero\n", 1);
        match Histogram::from_csv(&broken, Path::new("x.csv")) {
            Err(Error::Parse { line, .. }) => assert!(line > 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
