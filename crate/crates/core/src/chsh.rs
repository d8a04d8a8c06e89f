//! CHSH evaluation with only one detector on Alice's side.
//!
//! Alice's analyzer has a detector behind its V output only, so the
//! coincidences she would have recorded on the H output are measured in a
//! second acquisition with her HWP turned by 45°. Bob records both outputs.
//! Outcome 1 is a V-output click, outcome 0 an H-output click.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{CountsMode, MeasurementRecord};
use crate::error::{Error, Result};
use crate::optics::{analyzer_projector, AnalyzerSetting, JointSetting, Port};
use crate::optim::{minimize_from_starts, BfgsOptions};
use crate::sim::{run_campaign_as, ExperimentModel, CAMPAIGN_CHSH};
use crate::state::{kron, DensityMatrix, Mat2};

/// Per-acquisition duration at which the reference bench gives `σ_S ≈ 0.19`.
pub const REFERENCE_CHSH_DURATION: f64 = 170.0;

/// `E = ((N00 + N11) − (N01 + N10)) / ΣN`.
pub fn correlator_full(n00: f64, n01: f64, n10: f64, n11: f64) -> Result<f64> {
    let counts = [n00, n01, n10, n11];
    if counts.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(Error::InvalidChsh(format!("counts must be finite and >= 0, got {counts:?}")));
    }
    let total = (n00 + n11) + (n01 + n10);
    if total <= 0.0 {
        return Err(Error::ZeroCounts);
    }
    Ok(((n00 + n11) - (n01 + n10)) / total)
}

/// `E = ((N0ᴮ − 2N10) − (N1ᴮ − 2N11)) / (N0ᴮ + N1ᴮ)` with `Njᴮ = N0j + N1j`,
/// the totals on Bob's detector `j`.
pub fn correlator_three_detector(nb0: f64, nb1: f64, n10: f64, n11: f64) -> Result<f64> {
    let counts = [nb0, nb1, n10, n11];
    if counts.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(Error::InvalidChsh(format!("counts must be finite and >= 0, got {counts:?}")));
    }
    if n10 > nb0 || n11 > nb1 {
        return Err(Error::CountInconsistency(format!(
            "N10 = {n10} > N0B = {nb0} or N11 = {n11} > N1B = {nb1}"
        )));
    }
    let total = nb0 + nb1;
    if total <= 0.0 {
        return Err(Error::ZeroCounts);
    }
    // N0B − 2N10 = N00 − N10 keeps integer inputs exact and equal to the
    // full correlator's numerator.
    let (n00, n01) = (nb0 - n10, nb1 - n11);
    Ok(((n00 + n11) - (n01 + n10)) / ((n00 + n11) + (n01 + n10)))
}

pub fn chsh_s(e11: f64, e12: f64, e21: f64, e22: f64) -> f64 {
    e11 + e12 + e21 - e22
}

/// Counts of one joint combination, ordered `N00, N01, N10, N11`, with
/// their variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinationCounts {
    pub counts: [f64; 4],
    pub variances: [f64; 4],
}

impl CombinationCounts {
    /// Poisson counts: each variance equals its count.
    pub fn poisson(n00: f64, n01: f64, n10: f64, n11: f64) -> Self {
        let counts = [n00, n01, n10, n11];
        Self {
            counts,
            variances: counts.map(|n| n.max(0.0)),
        }
    }

    pub fn correlator(&self) -> Result<f64> {
        let [n00, n01, n10, n11] = self.counts;
        correlator_three_detector(n00 + n10, n01 + n11, n10, n11)
    }

    /// First-order propagation through `E`. Every count is independent, so
    /// the sharing of `N10` and `N11` with Bob's totals is carried exactly.
    pub fn correlator_sigma(&self) -> Result<f64> {
        let e = self.correlator()?;
        let total: f64 = self.counts.iter().sum();
        let signs = [1.0, -1.0, -1.0, 1.0];
        let var: f64 = signs
            .iter()
            .zip(&self.variances)
            .map(|(s, v)| (s - e).powi(2) * v)
            .sum();
        Ok(var.sqrt() / total)
    }
}

/// `σ_S = √(Σ σ_E²)` over the four combinations.
pub fn sigma_s(combinations: &[CombinationCounts; 4]) -> Result<f64> {
    let mut var = 0.0;
    for c in combinations {
        var += c.correlator_sigma()?.powi(2);
    }
    Ok(var.sqrt())
}

/// Alice's `A₁, A₂` and Bob's `B₁, B₂`. Each setting is stored with its V
/// output selected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettingPair {
    pub alice: [AnalyzerSetting; 2],
    pub bob: [AnalyzerSetting; 2],
}

/// `(k, l)` for `E(A_k B_l)` in the order `E11, E12, E21, E22`.
const COMBINATIONS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

impl ChshSettingPair {
    pub fn new(alice: [AnalyzerSetting; 2], bob: [AnalyzerSetting; 2]) -> Result<Self> {
        let pair = Self {
            alice: alice.map(|s| s.with_port(Port::V)),
            bob: bob.map(|s| s.with_port(Port::V)),
        };
        let dist = |a: &AnalyzerSetting, b: &AnalyzerSetting| {
            (analyzer_projector(a) - analyzer_projector(b)).iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        if dist(&pair.alice[0], &pair.alice[1]) < 1e-9 || dist(&pair.bob[0], &pair.bob[1]) < 1e-9 {
            return Err(Error::InvalidChsh("the two settings of a party coincide".into()));
        }
        Ok(pair)
    }

    /// Linear analyzers at polarization angles (radians).
    pub fn linear(alice: [f64; 2], bob: [f64; 2]) -> Result<Self> {
        let lin = |a: f64| AnalyzerSetting::linear(a, Port::V);
        Self::new([lin(alice[0])?, lin(alice[1])?], [lin(bob[0])?, lin(bob[1])?])
    }

    /// The sixteen acquisitions, four per combination in `COMBINATIONS`
    /// order: Alice direct with Bob H then V, Alice complemented with Bob H
    /// then V.
    pub fn acquisitions(&self) -> Vec<JointSetting> {
        let mut out = Vec::with_capacity(16);
        for (k, l) in COMBINATIONS {
            let a = self.alice[k];
            let b = self.bob[l];
            for alice in [a, a.hwp_complement()] {
                for port in [Port::H, Port::V] {
                    out.push(JointSetting::new(alice, b.with_port(port)));
                }
            }
        }
        out
    }

    /// Reads the pair back from a record list in [`Self::acquisitions`] order.
    pub fn from_acquisitions(settings: &[JointSetting]) -> Result<Self> {
        if settings.len() != 16 {
            return Err(Error::InvalidChsh(format!("expected 16 acquisitions, got {}", settings.len())));
        }
        let pair = Self::new(
            [settings[0].alice, settings[8].alice],
            [settings[0].bob, settings[4].bob],
        )?;
        let expected = pair.acquisitions();
        for (i, (got, want)) in settings.iter().zip(&expected).enumerate() {
            if !same_setting(got, want) {
                return Err(Error::InvalidChsh(format!(
                    "acquisition {i} is {}, expected {}",
                    got.label(),
                    want.label()
                )));
            }
        }
        Ok(pair)
    }
}

fn same_setting(a: &JointSetting, b: &JointSetting) -> bool {
    let close = |x: &AnalyzerSetting, y: &AnalyzerSetting| {
        x.port() == y.port()
            && (analyzer_projector(x) - analyzer_projector(y)).iter().all(|z| z.norm() < 1e-9)
    };
    close(&a.alice, &b.alice) && close(&a.bob, &b.bob)
}

/// `P_V − P_H` of one analyzer.
fn observable(s: &AnalyzerSetting) -> Mat2 {
    analyzer_projector(&s.with_port(Port::V)) - analyzer_projector(&s.with_port(Port::H))
}

/// Born-rule correlator.
pub fn predicted_correlator(rho: &DensityMatrix, a: &AnalyzerSetting, b: &AnalyzerSetting) -> f64 {
    rho.expectation(&kron(&observable(a), &observable(b)))
}

pub fn predicted_s(rho: &DensityMatrix, pair: &ChshSettingPair) -> f64 {
    let e = COMBINATIONS.map(|(k, l)| predicted_correlator(rho, &pair.alice[k], &pair.bob[l]));
    chsh_s(e[0], e[1], e[2], e[3])
}

/// Analyzer family searched by [`optimal_settings`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleSearch {
    /// One polarizer angle per setting.
    #[default]
    Linear,
    /// Independent QWP and HWP angles per setting.
    Full,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimalSettings {
    pub pair: ChshSettingPair,
    pub predicted_s: f64,
}

const SEARCH_STARTS: usize = 32;

fn pair_from_params(x: &[f64], search: AngleSearch) -> Option<ChshSettingPair> {
    let s = |i: usize| match search {
        AngleSearch::Linear => AnalyzerSetting::linear(x[i], Port::V).ok(),
        AngleSearch::Full => AnalyzerSetting::new(x[2 * i], x[2 * i + 1], Port::V).ok(),
    };
    Some(ChshSettingPair {
        alice: [s(0)?, s(1)?],
        bob: [s(2)?, s(3)?],
    })
}

/// Settings maximizing the predicted `S`.
pub fn optimal_settings(rho: &DensityMatrix, search: AngleSearch) -> Result<OptimalSettings> {
    rho.check()?;
    // The textbook angles for Φ⁺ seed the first start.
    let textbook = [0.0, FRAC_PI_4, FRAC_PI_8, -FRAC_PI_8];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let starts: Vec<Vec<f64>> = match search {
        AngleSearch::Linear => std::iter::once(textbook.to_vec())
            .chain((1..SEARCH_STARTS).map(|_| (0..4).map(|_| rng.random_range(0.0..PI)).collect()))
            .collect(),
        AngleSearch::Full => {
            // Linear analyzer at angle α is QWP α, HWP (α + π/2)/2.
            let first = textbook.iter().flat_map(|&a| [a, (a + PI / 2.0) / 2.0]).collect();
            std::iter::once(first)
                .chain((1..SEARCH_STARTS).map(|_| (0..8).map(|_| rng.random_range(0.0..PI)).collect()))
                .collect()
        }
    };
    let objective = |x: &[f64]| match pair_from_params(x, search) {
        Some(pair) => -predicted_s(rho, &pair),
        None => f64::INFINITY,
    };
    let results = minimize_from_starts(&objective, &starts, &BfgsOptions::default());
    let best = results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .min_by(|a, b| a.value.total_cmp(&b.value));
    let Some(best) = best else {
        return Err(results.into_iter().find_map(|r| r.err()).expect("all starts failed"));
    };
    let pair = pair_from_params(&best.x, search).ok_or(Error::NonFinite("optimal angle"))?;
    Ok(OptimalSettings {
        pair,
        predicted_s: predicted_s(rho, &pair),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChshResult {
    pub settings: ChshSettingPair,
    /// `E11, E12, E21, E22`.
    pub e_values: [f64; 4],
    pub s: f64,
    pub sigma_s: f64,
    pub mode: CountsMode,
    pub combinations: [CombinationCounts; 4],
    /// Negative net counts set to zero before estimation.
    pub clamped: usize,
}

impl ChshResult {
    /// `(S − 2) / σ_S`.
    pub fn violation_sigmas(&self) -> f64 {
        (self.s - 2.0) / self.sigma_s
    }

    pub fn report(&self) -> ChshReport {
        let rad = |s: &AnalyzerSetting| [s.qwp_angle(), s.hwp_angle()];
        ChshReport {
            settings: self.settings,
            settings_rad: ChshAnglesRad {
                alice: self.settings.alice.each_ref().map(rad),
                bob: self.settings.bob.each_ref().map(rad),
            },
            e: self.e_values,
            s: self.s,
            sigma_s: self.sigma_s,
            violation_sigmas: self.violation_sigmas(),
            mode: self.mode,
            clamped: self.clamped,
        }
    }
}

/// `[QWP, HWP]` radians per setting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChshAnglesRad {
    pub alice: [[f64; 2]; 2],
    pub bob: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChshReport {
    pub settings: ChshSettingPair,
    pub settings_rad: ChshAnglesRad,
    #[serde(rename = "E")]
    pub e: [f64; 4],
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "sigma_S")]
    pub sigma_s: f64,
    pub violation_sigmas: f64,
    pub mode: CountsMode,
    pub clamped: usize,
}

/// Estimates `S` from records in [`ChshSettingPair::acquisitions`] order.
pub fn chsh_from_records(records: &[MeasurementRecord], mode: CountsMode) -> Result<ChshResult> {
    let settings: Vec<JointSetting> = records.iter().map(|r| r.setting).collect();
    let pair = ChshSettingPair::from_acquisitions(&settings)?;
    let mut clamped = 0;
    let mut combinations = [CombinationCounts::poisson(0.0, 0.0, 0.0, 0.0); 4];
    for (c, chunk) in combinations.iter_mut().zip(records.chunks(4)) {
        // chunk: direct·H (N10), direct·V (N11), complement·H (N00), complement·V (N01)
        let get = |r: &MeasurementRecord, clamped: &mut usize| {
            let n = r.counts(mode);
            if n < 0.0 {
                *clamped += 1;
            }
            (n.max(0.0), r.variance(mode))
        };
        let (n10, v10) = get(&chunk[0], &mut clamped);
        let (n11, v11) = get(&chunk[1], &mut clamped);
        let (n00, v00) = get(&chunk[2], &mut clamped);
        let (n01, v01) = get(&chunk[3], &mut clamped);
        *c = CombinationCounts {
            counts: [n00, n01, n10, n11],
            variances: [v00, v01, v10, v11],
        };
    }
    let mut e_values = [0.0; 4];
    for (e, c) in e_values.iter_mut().zip(&combinations) {
        *e = c.correlator()?;
    }
    Ok(ChshResult {
        settings: pair,
        s: chsh_s(e_values[0], e_values[1], e_values[2], e_values[3]),
        sigma_s: sigma_s(&combinations)?,
        e_values,
        mode,
        combinations,
        clamped,
    })
}

/// Simulates the sixteen acquisitions of `pair` and estimates `S`.
pub fn run_chsh(
    model: &ExperimentModel,
    pair: &ChshSettingPair,
    duration: f64,
    mode: CountsMode,
) -> Result<ChshResult> {
    let records = run_campaign_as(model, CAMPAIGN_CHSH, &pair.acquisitions(), duration)?;
    chsh_from_records(&records, mode)
}
