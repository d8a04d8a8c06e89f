//! Jones calculus for the analyzer chain: quarter-wave plate, then half-wave
//! plate, then a polarizing beam splitter with an H and a V output.
//!
//! Plate conventions, with the fast axis at angle θ from horizontal:
//!
//! ```text
//! hwp(θ) = [[cos2θ,  sin2θ], [sin2θ, -cos2θ]]
//! qwp(θ) = [[cos²θ + i sin²θ, (1-i) sinθ cosθ], [(1-i) sinθ cosθ, sin²θ + i cos²θ]]
//! ```
//!
//! so that `qwp(θ)² = hwp(θ)` exactly.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::state::{c, kron, re, DensityMatrix, JonesMatrix, Mat2, Mat4};

/// Half-wave plate with its fast axis at `theta` radians.
pub fn hwp(theta: f64) -> JonesMatrix {
    let (s, co) = (2.0 * theta).sin_cos();
    JonesMatrix::new(Mat2::new(re(co), re(s), re(s), re(-co))).expect("half-wave plate is unitary")
}

/// Quarter-wave plate with its fast axis at `theta` radians.
pub fn qwp(theta: f64) -> JonesMatrix {
    let (s, co) = theta.sin_cos();
    let off = c(s * co, -s * co);
    JonesMatrix::new(Mat2::new(
        c(co * co, s * s),
        off,
        off,
        c(s * s, co * co),
    ))
    .expect("quarter-wave plate is unitary")
}

/// PBS output port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    H,
    V,
}

impl Port {
    pub fn other(self) -> Self {
        match self {
            Port::H => Port::V,
            Port::V => Port::H,
        }
    }

    fn index(self) -> usize {
        match self {
            Port::H => 0,
            Port::V => 1,
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::H => "H",
            Port::V => "V",
        })
    }
}

/// Which photon a marginal refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    A,
    B,
}

/// Single-photon polarization states used for tomography.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
    /// `(H + V)/√2`
    D,
    /// `(H − V)/√2`
    A,
    /// `(H − iV)/√2`
    R,
    /// `(H + iV)/√2`
    L,
}

impl Polarization {
    pub fn amplitudes(self) -> [crate::state::C64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            Polarization::H => [re(1.0), re(0.0)],
            Polarization::V => [re(0.0), re(1.0)],
            Polarization::D => [re(s), re(s)],
            Polarization::A => [re(s), re(-s)],
            Polarization::R => [re(s), c(0.0, -s)],
            Polarization::L => [re(s), c(0.0, s)],
        }
    }

    pub fn projector(self) -> Mat2 {
        let [x, y] = self.amplitudes();
        let v = nalgebra::Vector2::new(x, y);
        v * v.adjoint()
    }

    pub fn orthogonal(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
            Polarization::D => Polarization::A,
            Polarization::A => Polarization::D,
            Polarization::R => Polarization::L,
            Polarization::L => Polarization::R,
        }
    }

    pub fn label(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
            Polarization::D => 'D',
            Polarization::A => 'A',
            Polarization::R => 'R',
            Polarization::L => 'L',
        }
    }
}

fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    // rem_euclid can round up to exactly π for tiny negative inputs.
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Plate angles (radians, canonicalized to `[0, π)`) plus the PBS port a
/// detector sits behind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSetting {
    qwp: f64,
    hwp: f64,
    port: Port,
}

impl AnalyzerSetting {
    pub fn new(qwp_angle: f64, hwp_angle: f64, port: Port) -> Result<Self> {
        if !(qwp_angle.is_finite() && hwp_angle.is_finite()) {
            return Err(Error::NonFinite("analyzer angle"));
        }
        Ok(Self {
            qwp: canonical_angle(qwp_angle),
            hwp: canonical_angle(hwp_angle),
            port,
        })
    }

    pub fn from_degrees(qwp_deg: f64, hwp_deg: f64, port: Port) -> Result<Self> {
        Self::new(qwp_deg.to_radians(), hwp_deg.to_radians(), port)
    }

    /// Plates idle, detector behind `port`.
    pub fn idle(port: Port) -> Self {
        Self {
            qwp: 0.0,
            hwp: 0.0,
            port,
        }
    }

    /// Setting whose `port` projects onto linear polarization at `angle`.
    ///
    /// The QWP axis is put on the polarization itself so it passes unchanged;
    /// the HWP then reflects it onto the port axis.
    pub fn linear(angle: f64, port: Port) -> Result<Self> {
        let hwp = match port {
            Port::H => angle / 2.0,
            Port::V => (angle + FRAC_PI_2) / 2.0,
        };
        Self::new(angle, hwp, port)
    }

    /// Setting whose `port` projects onto `pol`.
    pub fn projecting_onto(pol: Polarization, port: Port) -> Self {
        // Angles for the V output; the H output of the same plates projects
        // onto the orthogonal state.
        let target = match port {
            Port::V => pol,
            Port::H => pol.orthogonal(),
        };
        let (q, h) = match target {
            Polarization::H => (0.0, FRAC_PI_4),
            Polarization::V => (0.0, 0.0),
            Polarization::D => (FRAC_PI_4, 3.0 * PI / 8.0),
            Polarization::A => (3.0 * FRAC_PI_4, 5.0 * PI / 8.0),
            Polarization::R => (FRAC_PI_4, 0.0),
            Polarization::L => (FRAC_PI_4, FRAC_PI_4),
        };
        Self {
            qwp: q,
            hwp: h,
            port,
        }
    }

    pub fn qwp_angle(&self) -> f64 {
        self.qwp
    }

    pub fn hwp_angle(&self) -> f64 {
        self.hwp
    }

    pub fn port(&self) -> Port {
        self.port
    }

    pub fn with_port(&self, port: Port) -> Self {
        Self { port, ..*self }
    }

    /// Same plates with the HWP turned by 45°. Its V output projects onto the
    /// state the original H output did, and vice versa.
    pub fn hwp_complement(&self) -> Self {
        Self {
            hwp: canonical_angle(self.hwp + FRAC_PI_4),
            ..*self
        }
    }

    /// `hwp · qwp`, the Jones matrix light sees before the PBS.
    pub fn plates(&self) -> JonesMatrix {
        hwp(self.hwp).compose(&qwp(self.qwp))
    }
}

impl fmt::Display for AnalyzerSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={};h={};p={}",
            self.qwp.to_degrees(),
            self.hwp.to_degrees(),
            self.port
        )
    }
}

#[derive(Serialize, Deserialize)]
struct AnalyzerSettingJson {
    qwp_deg: f64,
    hwp_deg: f64,
    port: Port,
}

impl Serialize for AnalyzerSetting {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AnalyzerSettingJson {
            qwp_deg: self.qwp.to_degrees(),
            hwp_deg: self.hwp.to_degrees(),
            port: self.port,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AnalyzerSetting {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = AnalyzerSettingJson::deserialize(deserializer)?;
        AnalyzerSetting::from_degrees(raw.qwp_deg, raw.hwp_deg, raw.port)
            .map_err(serde::de::Error::custom)
    }
}

/// Alice's and Bob's analyzers for one coincidence channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointSetting {
    pub alice: AnalyzerSetting,
    pub bob: AnalyzerSetting,
}

impl JointSetting {
    pub fn new(alice: AnalyzerSetting, bob: AnalyzerSetting) -> Self {
        Self { alice, bob }
    }

    pub fn label(&self) -> String {
        format!("A:{}|B:{}", self.alice, self.bob)
    }

    /// Parses the output of [`JointSetting::label`].
    pub fn parse_label(label: &str) -> Option<Self> {
        fn one(s: &str) -> Option<AnalyzerSetting> {
            let mut q = None;
            let mut h = None;
            let mut p = None;
            for kv in s.split(';') {
                let (k, v) = kv.split_once('=')?;
                match k {
                    "q" => q = v.parse::<f64>().ok(),
                    "h" => h = v.parse::<f64>().ok(),
                    "p" => {
                        p = match v {
                            "H" => Some(Port::H),
                            "V" => Some(Port::V),
                            _ => None,
                        }
                    }
                    _ => return None,
                }
            }
            AnalyzerSetting::from_degrees(q?, h?, p?).ok()
        }
        let (a, b) = label.split_once('|')?;
        Some(Self {
            alice: one(a.strip_prefix("A:")?)?,
            bob: one(b.strip_prefix("B:")?)?,
        })
    }
}

/// `U† |p⟩⟨p| U` with `U = hwp·qwp` and `|p⟩` the port's basis vector.
pub fn analyzer_projector(s: &AnalyzerSetting) -> Mat2 {
    let u = *s.plates().matrix();
    let row = u.row(s.port.index());
    let v = row.adjoint();
    v * v.adjoint()
}

/// Joint measurement operator `P_A ⊗ P_B`.
pub fn joint_projector(j: &JointSetting) -> Mat4 {
    kron(&analyzer_projector(&j.alice), &analyzer_projector(&j.bob))
}

/// Born probability `tr[ρ (P_A ⊗ P_B)]`.
pub fn coincidence_probability(rho: &DensityMatrix, j: &JointSetting) -> f64 {
    rho.expectation(&joint_projector(j)).clamp(0.0, 1.0)
}

/// Marginal detection probability of one photon.
pub fn singles_probability(rho: &DensityMatrix, s: &AnalyzerSetting, arm: Arm) -> f64 {
    let p = analyzer_projector(s);
    let id = Mat2::identity();
    let op = match arm {
        Arm::A => kron(&p, &id),
        Arm::B => kron(&id, &p),
    };
    rho.expectation(&op).clamp(0.0, 1.0)
}
