//! Reduction of delay histograms to raw/net coincidence numbers, and
//! sinusoidal fringe fits for interference visibilities.
//!
//! The signal window is `[t_i, t_f)`. `t_i` must sit on a bin edge; `t_f`
//! may not (0.8 ns is 3.2 bins of 250 ps), in which case the straddling bin
//! contributes to the window and to the noise region in proportion to its
//! overlap with each.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{JointSetting, Port};
use crate::sim::Histogram;

const ALIGN_TOL: f64 = 1e-9;

/// Counts are kept on a grid of `2⁻²⁰`. Below `2³²` counts every sum and
/// difference of grid values is exact, so `N_raw = N_net + accidentals`
/// holds bit for bit.
pub const COUNT_QUANTUM: f64 = 1.0 / 1_048_576.0;

pub fn quantize_counts(x: f64) -> f64 {
    (x / COUNT_QUANTUM).round() * COUNT_QUANTUM
}

/// Fraction of bin `[k·w, (k+1)·w)` that overlaps `[lo, hi)`.
fn bin_overlap(k: usize, width: f64, lo: f64, hi: f64) -> f64 {
    let start = k as f64 * width;
    let end = start + width;
    ((end.min(hi) - start.max(lo)) / width).clamp(0.0, 1.0)
}

fn weighted_sum(h: &Histogram, lo: f64, hi: f64) -> f64 {
    let w = h.bin_width;
    let first = ((lo / w).floor().max(0.0)) as usize;
    let last = ((hi / w).ceil() as usize).min(h.counts.len());
    (first..last)
        .map(|k| h.counts[k] as f64 * bin_overlap(k, w, lo, hi))
        .sum()
}

/// `N_raw`: coincidences inside the signal window.
pub fn integrate_window(h: &Histogram) -> Result<f64> {
    let [t_i, _] = h.window;
    let k = t_i / h.bin_width;
    if (k - k.round()).abs() > ALIGN_TOL {
        return Err(Error::MisalignedWindow {
            t_i,
            bin_width: h.bin_width,
        });
    }
    Ok(quantize_counts(weighted_sum(h, h.window[0], h.window[1])))
}

/// `τ_acc`: background coincidences per unit delay, from `(t_f, t_max]`.
pub fn accidental_rate(h: &Histogram) -> Result<f64> {
    let [_, t_f] = h.window;
    let span = h.t_max - t_f;
    if !(span > 0.0) {
        return Err(Error::EmptyNoiseRegion);
    }
    Ok(weighted_sum(h, t_f, h.t_max) / span)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetCounts {
    pub value: f64,
    /// `(t_f − t_i)·τ_acc` on the count grid.
    pub accidentals: f64,
    /// Set when the accidental estimate exceeds the raw count.
    pub low_signal: bool,
}

/// `N_net = N_raw − (t_f − t_i)·τ_acc`.
pub fn net_counts(n_raw: f64, tau_acc: f64, window_length: f64) -> NetCounts {
    let accidentals = quantize_counts(window_length * tau_acc);
    let value = quantize_counts(n_raw) - accidentals;
    NetCounts {
        value,
        accidentals,
        low_signal: value < 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Car {
    /// `+∞` when no accidentals were observed.
    pub ratio: f64,
    pub low_signal: bool,
}

/// Coincidence-to-accidental ratio `N_net / (window·τ_acc)`.
pub fn car(n_raw: f64, tau_acc: f64, window_length: f64) -> Car {
    let acc = window_length * tau_acc;
    let net = net_counts(n_raw, tau_acc, window_length);
    if !(acc > 0.0) {
        return Car {
            ratio: f64::INFINITY,
            low_signal: net.value <= 0.0,
        };
    }
    Car {
        ratio: net.value / acc,
        low_signal: net.value <= 0.0,
    }
}

/// One acquisition reduced to counting statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub setting: JointSetting,
    pub n_raw: f64,
    pub n_net: f64,
    /// Accidentals per second of delay.
    pub tau_acc: f64,
    /// Expected accidentals inside the window, `window_length·τ_acc` on the
    /// count grid; `n_raw = n_net + accidentals` exactly.
    pub accidentals: f64,
    pub duration: f64,
    pub singles_a: u64,
    /// `t_f − t_i`, seconds.
    pub window_length: f64,
    /// `t_max − t_f`, seconds.
    pub noise_length: f64,
}

impl MeasurementRecord {
    pub fn car(&self) -> Car {
        car(self.n_raw, self.tau_acc, self.window_length)
    }

    /// Poisson variance of `n_raw`.
    pub fn raw_variance(&self) -> f64 {
        self.n_raw.max(0.0)
    }

    /// Variance of `n_net`: raw counts plus the scaled noise-region counts.
    pub fn net_variance(&self) -> f64 {
        let noise_term = if self.noise_length > 0.0 {
            self.accidentals * self.window_length / self.noise_length
        } else {
            0.0
        };
        self.raw_variance() + noise_term
    }

    pub fn counts(&self, mode: CountsMode) -> f64 {
        match mode {
            CountsMode::Raw => self.n_raw,
            CountsMode::Net => self.n_net,
        }
    }

    pub fn variance(&self, mode: CountsMode) -> f64 {
        match mode {
            CountsMode::Raw => self.raw_variance(),
            CountsMode::Net => self.net_variance(),
        }
    }
}

/// Whether analyses use accidental-subtracted counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountsMode {
    Raw,
    #[default]
    Net,
}

/// Reduces a histogram to `(N_raw, N_net, τ_acc)`.
pub fn reduce(h: &Histogram, setting: JointSetting) -> Result<MeasurementRecord> {
    let n_raw = integrate_window(h)?;
    let tau_acc = accidental_rate(h)?;
    let window_length = h.window[1] - h.window[0];
    let net = net_counts(n_raw, tau_acc, window_length);
    Ok(MeasurementRecord {
        setting,
        n_raw,
        n_net: net.value,
        tau_acc,
        accidentals: net.accidentals,
        duration: h.duration,
        singles_a: h.singles_a,
        window_length,
        noise_length: h.t_max - h.window[1],
    })
}

/// `c₀ + c₁cos(kθ) + c₂sin(kθ) = c₀(1 + V cos(kθ + φ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub mean_level: f64,
    /// Clamped to `[0, 1]`.
    pub visibility: f64,
    pub phase: f64,
    pub residual_norm: f64,
    pub harmonic: u32,
    /// First-order standard error, when point variances were supplied.
    pub visibility_sigma: Option<f64>,
}

impl FringeFit {
    pub fn evaluate(&self, theta: f64) -> f64 {
        self.mean_level * (1.0 + self.visibility * (self.harmonic as f64 * theta + self.phase).cos())
    }
}

/// Linear least-squares fringe fit at fixed harmonic.
pub fn fit_fringe(angles: &[f64], counts: &[f64], harmonic: u32) -> Result<FringeFit> {
    fit(angles, counts, None, harmonic)
}

/// As [`fit_fringe`], also propagating per-point variances to the visibility.
pub fn fit_fringe_with_variance(
    angles: &[f64],
    counts: &[f64],
    variances: &[f64],
    harmonic: u32,
) -> Result<FringeFit> {
    fit(angles, counts, Some(variances), harmonic)
}

fn fit(angles: &[f64], counts: &[f64], variances: Option<&[f64]>, harmonic: u32) -> Result<FringeFit> {
    let n = angles.len();
    if n != counts.len() || variances.is_some_and(|v| v.len() != n) {
        return Err(Error::CountInconsistency(format!(
            "{} angles for {} counts",
            n,
            counts.len()
        )));
    }
    if n < 4 {
        return Err(Error::TooFewPoints(n));
    }
    if harmonic == 0 {
        return Err(Error::DegenerateFit);
    }
    let k = harmonic as f64;
    let x = DMatrix::from_fn(n, 3, |r, col| match col {
        0 => 1.0,
        1 => (k * angles[r]).cos(),
        _ => (k * angles[r]).sin(),
    });
    let y = DVector::from_column_slice(counts);
    let normal: Matrix3<f64> = (x.transpose() * &x).fixed_view::<3, 3>(0, 0).into_owned();
    let sv = normal.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-10 * smax) {
        return Err(Error::DegenerateFit);
    }
    let inv = normal.try_inverse().ok_or(Error::DegenerateFit)?;
    let rhs: Vector3<f64> = (x.transpose() * &y).fixed_rows::<3>(0).into_owned();
    let coef = inv * rhs;
    let (c0, c1, c2) = (coef[0], coef[1], coef[2]);
    if !(c0 > 0.0) {
        return Err(Error::NonPositiveMean(c0));
    }
    let amp = c1.hypot(c2);
    let raw_visibility = amp / c0;
    let residual = &y - &x * DVector::from_column_slice(coef.as_slice());

    let visibility_sigma = variances.map(|var| {
        // cov(c) = A⁻¹ Xᵀ diag(var) X A⁻¹
        let mut meat = Matrix3::zeros();
        for r in 0..n {
            let row = Vector3::new(x[(r, 0)], x[(r, 1)], x[(r, 2)]);
            meat += row * row.transpose() * var[r].max(0.0);
        }
        let cov = inv * meat * inv;
        let a = amp.max(f64::MIN_POSITIVE);
        let grad = Vector3::new(-raw_visibility / c0, c1 / (c0 * a), c2 / (c0 * a));
        (grad.transpose() * cov * grad)[(0, 0)].max(0.0).sqrt()
    });

    Ok(FringeFit {
        mean_level: c0,
        visibility: raw_visibility.clamp(0.0, 1.0),
        phase: (-c2).atan2(c1),
        residual_norm: residual.norm(),
        harmonic,
        visibility_sigma,
    })
}

/// Harmonic of a HWP sweep: counts repeat every 45° of plate rotation.
pub const HWP_SWEEP_HARMONIC: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringePoint {
    pub theta_deg: f64,
    pub theta_rad: f64,
    pub n_raw: f64,
    pub n_net: f64,
    pub singles_a: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFringe {
    /// e.g. `A_V B_H`: Alice's detector and Bob's detector.
    pub channel: String,
    pub raw: FringeFit,
    pub net: FringeFit,
    /// CAR at the point with the most net counts.
    pub peak_car: f64,
    pub points: Vec<FringePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub channels: Vec<ChannelFringe>,
    pub singles: FringeFit,
}

/// One entry of the fringe report JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeReportEntry {
    pub channel: String,
    pub visibility_raw: f64,
    pub visibility_net: f64,
    pub phase_deg: f64,
    pub points: Vec<FringePoint>,
}

impl VisibilityReport {
    pub fn channel(&self, name: &str) -> Option<&ChannelFringe> {
        self.channels.iter().find(|c| c.channel == name)
    }

    pub fn entries(&self) -> Vec<FringeReportEntry> {
        let mut out: Vec<FringeReportEntry> = self
            .channels
            .iter()
            .map(|c| FringeReportEntry {
                channel: c.channel.clone(),
                visibility_raw: c.raw.visibility,
                visibility_net: c.net.visibility,
                phase_deg: c.net.phase.to_degrees(),
                points: c.points.clone(),
            })
            .collect();
        let first = self.channels.first();
        out.push(FringeReportEntry {
            channel: "singles_A".into(),
            visibility_raw: self.singles.visibility,
            visibility_net: self.singles.visibility,
            phase_deg: self.singles.phase.to_degrees(),
            points: first.map(|c| c.points.clone()).unwrap_or_default(),
        });
        out
    }

    /// Plot table: measured points and fitted curves, one row per point.
    pub fn fringe_csv(&self) -> String {
        let mut s = String::from("channel,theta_deg,n_raw,n_net,fit_raw,fit_net,singles_A,fit_singles_A\n");
        for c in &self.channels {
            for p in &c.points {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    c.channel,
                    p.theta_deg,
                    p.n_raw,
                    p.n_net,
                    c.raw.evaluate(p.theta_rad),
                    c.net.evaluate(p.theta_rad),
                    p.singles_a,
                    self.singles.evaluate(p.theta_rad)
                ));
            }
        }
        s
    }
}

/// Channel name for the detector pair of a setting.
pub fn channel_name(j: &JointSetting) -> String {
    let p = |p: Port| match p {
        Port::H => "H",
        Port::V => "V",
    };
    format!("A_{} B_{}", p(j.alice.port()), p(j.bob.port()))
}

/// Fits raw, net and singles fringes of a sweep over Alice's HWP angle.
/// Records are grouped into channels by their detector pair.
pub fn visibility_report(records: &[MeasurementRecord]) -> Result<VisibilityReport> {
    if records.is_empty() {
        return Err(Error::TooFewPoints(0));
    }
    let mut groups: BTreeMap<String, Vec<&MeasurementRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(channel_name(&r.setting)).or_default().push(r);
    }
    // Sorting puts A_V B_V after A_V B_H; report the V channel first.
    let mut names: Vec<String> = groups.keys().cloned().collect();
    names.sort_by(|a, b| b.cmp(a));

    let mut channels = Vec::with_capacity(names.len());
    for name in names {
        let recs = &groups[&name];
        let angles: Vec<f64> = recs.iter().map(|r| r.setting.alice.hwp_angle()).collect();
        let series = |mode: CountsMode| -> (Vec<f64>, Vec<f64>) {
            (
                recs.iter().map(|r| r.counts(mode)).collect(),
                recs.iter().map(|r| r.variance(mode)).collect(),
            )
        };
        let (raw, raw_var) = series(CountsMode::Raw);
        let (net, net_var) = series(CountsMode::Net);
        let raw_fit = fit_fringe_with_variance(&angles, &raw, &raw_var, HWP_SWEEP_HARMONIC)?;
        let net_fit = fit_fringe_with_variance(&angles, &net, &net_var, HWP_SWEEP_HARMONIC)?;
        let peak = recs
            .iter()
            .max_by(|a, b| a.n_net.total_cmp(&b.n_net))
            .expect("non-empty group");
        channels.push(ChannelFringe {
            channel: name.clone(),
            raw: raw_fit,
            net: net_fit,
            peak_car: peak.car().ratio,
            points: recs
                .iter()
                .map(|r| FringePoint {
                    theta_deg: r.setting.alice.hwp_angle().to_degrees(),
                    theta_rad: r.setting.alice.hwp_angle(),
                    n_raw: r.n_raw,
                    n_net: r.n_net,
                    singles_a: r.singles_a,
                })
                .collect(),
        });
    }

    // Alice's singles are the same detector in every channel; fit them once.
    let first = &groups[&channels[0].channel];
    let angles: Vec<f64> = first.iter().map(|r| r.setting.alice.hwp_angle()).collect();
    let singles: Vec<f64> = first.iter().map(|r| r.singles_a as f64).collect();
    let singles_fit = fit_fringe_with_variance(&angles, &singles, &singles, HWP_SWEEP_HARMONIC)?;

    Ok(VisibilityReport {
        channels,
        singles: singles_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::AnalyzerSetting;
    use std::f64::consts::PI;

    fn flat(per_bin: u64, bins: usize, window: [f64; 2]) -> Histogram {
        Histogram {
            bin_width: 250e-12,
            counts: vec![per_bin; bins],
            window,
            t_max: bins as f64 * 250e-12,
            duration: 1.0,
            singles_a: 0,
            label: String::new(),
        }
    }

    #[test]
    fn integrate_flat_histogram() {
        let h = flat(5, 40, [0.0, 1.0e-9]);
        assert_eq!(integrate_window(&h).unwrap(), 20.0);
        let h = flat(0, 40, [0.0, 1.0e-9]);
        assert_eq!(integrate_window(&h).unwrap(), 0.0);
    }

    #[test]
    fn partial_edge_bin_is_weighted() {
        let h = flat(5, 40, [0.0, 0.8e-9]);
        assert!((integrate_window(&h).unwrap() - 16.0).abs() < 1e-9);
    }

    #[test]
    fn misaligned_window_is_rejected() {
        let h = flat(5, 40, [0.1e-9, 0.9e-9]);
        assert!(matches!(integrate_window(&h), Err(Error::MisalignedWindow { .. })));
    }

    #[test]
    fn accidental_rate_examples() {
        let h = flat(2, 40, [0.0, 1.0e-9]);
        assert!((accidental_rate(&h).unwrap() - 8e9).abs() < 1e-3);
        let h = flat(0, 40, [0.0, 1.0e-9]);
        assert_eq!(accidental_rate(&h).unwrap(), 0.0);
        let h = flat(2, 4, [0.0, 1.0e-9]);
        assert!(matches!(accidental_rate(&h), Err(Error::EmptyNoiseRegion)));
    }

    #[test]
    fn net_and_car_examples() {
        let window = 0.8e-9;
        let tau = 10.0 / window;
        let n = net_counts(90.0, tau, window);
        assert!((n.value - 80.0).abs() < 1e-9 && !n.low_signal);
        assert!(net_counts(10.0, tau, window).value.abs() < 1e-9);
        assert!(net_counts(0.0, tau, window).low_signal);

        assert!((car(90.0, tau, window).ratio - 8.0).abs() < 1e-9);
        assert!(car(10.0, tau, window).ratio.abs() < 1e-9);
        let noise_only = car(0.0, tau, window);
        assert!(noise_only.low_signal && noise_only.ratio <= 0.0);
        assert!(car(5.0, 0.0, window).ratio.is_infinite());
    }

    #[test]
    fn decomposition_is_exact() {
        let mut h = flat(3, 160, [2.5e-9, 3.3e-9]);
        for (k, c) in h.counts.iter_mut().enumerate() {
            *c += (k as u64 * 7919) % 13;
        }
        let r = reduce(&h, JointSetting::new(AnalyzerSetting::idle(Port::V), AnalyzerSetting::idle(Port::V))).unwrap();
        assert_eq!(r.n_net + r.accidentals, r.n_raw);
    }

    fn synthetic(v: f64, phi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let angles: Vec<f64> = (0..n).map(|i| i as f64 * PI / n as f64).collect();
        let counts = angles.iter().map(|t| 100.0 * (1.0 + v * (4.0 * t + phi).cos())).collect();
        (angles, counts)
    }

    #[test]
    fn fringe_examples() {
        let (a, c) = synthetic(0.9, 0.0, 8);
        let f = fit_fringe(&a, &c, 4).unwrap();
        assert!((f.visibility - 0.9).abs() < 1e-12);
        assert!(f.phase.abs() < 1e-12);
        assert!((f.mean_level - 100.0).abs() < 1e-9);
        assert!(f.residual_norm < 1e-9);

        let f = fit_fringe(&a, &[42.0; 8], 4).unwrap();
        assert!(f.visibility < 1e-12);
    }

    #[test]
    fn fringe_errors() {
        assert!(matches!(fit_fringe(&[0.0, 1.0, 2.0], &[1.0; 3], 4), Err(Error::TooFewPoints(3))));
        let same = [0.3, 0.3 + PI / 2.0, 0.3 + PI, 0.3];
        assert!(matches!(fit_fringe(&same, &[1.0, 2.0, 3.0, 4.0], 4), Err(Error::DegenerateFit)));
        let (a, _) = synthetic(0.0, 0.0, 8);
        assert!(matches!(fit_fringe(&a, &[-1.0; 8], 4), Err(Error::NonPositiveMean(_))));
    }

    #[test]
    fn random_fringes_recovered() {
        let mut s: u64 = 12345;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let v = next() * 0.999;
            let phi = (next() - 0.5) * 2.0 * PI * 0.999;
            let (a, c) = synthetic(v, phi, 12);
            let f = fit_fringe(&a, &c, 4).unwrap();
            assert!((f.visibility - v).abs() < 1e-9);
            if v > 1e-3 {
                let dphi = (f.phase - phi + PI).rem_euclid(2.0 * PI) - PI;
                assert!(dphi.abs() < 1e-9, "{} vs {}", f.phase, phi);
            }
        }
    }

    #[test]
    fn net_visibility_exceeds_raw_on_flat_floor() {
        let (a, c) = synthetic(0.7, 0.4, 12);
        let floor = 35.0;
        let raw: Vec<f64> = c.iter().map(|x| x + floor).collect();
        let vr = fit_fringe(&a, &raw, 4).unwrap().visibility;
        let vn = fit_fringe(&a, &c, 4).unwrap().visibility;
        assert!(vn >= vr);
    }

    #[test]
    fn visibility_sigma_scales_with_counts() {
        let (a, c) = synthetic(0.3, 0.0, 12);
        let f1 = fit_fringe_with_variance(&a, &c, &c, 4).unwrap();
        let c100: Vec<f64> = c.iter().map(|x| x * 100.0).collect();
        let f2 = fit_fringe_with_variance(&a, &c100, &c100, 4).unwrap();
        let ratio = f1.visibility_sigma.unwrap() / f2.visibility_sigma.unwrap();
        assert!((ratio - 10.0).abs() < 1e-9);
    }
}
