//! Two-qubit polarization states, Jones rotations and the overlap measures
//! used throughout the analysis.
//!
//! Basis order is fixed to `(HH, HV, VH, VV)`. The first tensor slot is the
//! signal photon sent to Alice, the second the idler photon sent to Bob.

use std::fmt;

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

/// Labels of the product basis, in storage order.
pub const BASIS: [&str; 4] = ["HH", "HV", "VH", "VV"];

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues down to this value are accepted as round-off.
pub const PSD_TOL: f64 = -1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on `a² + b² = 1` for [`target_state`].
pub const AMPLITUDE_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Kronecker product of two single-photon operators.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

fn max_abs(m: impl IntoIterator<Item = C64>) -> f64 {
    m.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Normalized pure two-photon state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amplitudes: Vector4<C64>,
}

impl PureState {
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm_sq = v.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes: v })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: [C64; 4]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized { norm_sq: n * n });
        }
        Ok(Self {
            amplitudes: v.unscale(n),
        })
    }

    /// `(|HH⟩ + |VV⟩)/√2`.
    pub fn phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: Vector4::new(re(s), re(0.0), re(0.0), re(s)),
        }
    }

    /// Product basis state with index in `BASIS` order.
    pub fn basis(index: usize) -> Self {
        let mut v = Vector4::zeros();
        v[index] = re(1.0);
        Self { amplitudes: v }
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        self.amplitudes.into()
    }

    pub fn vector(&self) -> &Vector4<C64> {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = self.amplitudes;
        DensityMatrix {
            m: v * v.adjoint(),
        }
    }
}

/// `a|HH⟩ + b|VV⟩` with real non-negative amplitudes.
pub fn target_state(a: f64, b: f64) -> Result<PureState> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("target amplitudes"));
    }
    let norm_sq = a * a + b * b;
    if (norm_sq - 1.0).abs() > AMPLITUDE_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    if a < 0.0 {
        return Err(Error::NegativeAmplitude(a));
    }
    if b < 0.0 {
        return Err(Error::NegativeAmplitude(b));
    }
    // Absorb the permitted slack so the stored state is normalized to machine precision.
    let n = norm_sq.sqrt();
    Ok(PureState {
        amplitudes: Vector4::new(re(a / n), re(0.0), re(0.0), re(b / n)),
    })
}

/// Hermitian, unit-trace, positive-semidefinite 4×4 operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat4,
}

impl DensityMatrix {
    /// Validates `m` against the density-matrix invariants.
    pub fn new(m: Mat4) -> Result<Self> {
        check_density(&m)?;
        Ok(Self { m })
    }

    /// Symmetrizes and trace-normalizes `m` before validation. Use for matrices
    /// produced by numerical procedures that are physical up to round-off.
    pub fn from_hermitian_part(m: Mat4) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let h = (m + m.adjoint()) * re(0.5);
        let tr = h.trace().re;
        if !(tr > 0.0) {
            return Err(Error::NotUnitTrace { trace: tr });
        }
        Self::new(h.unscale(tr))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Mat4::identity() * re(0.25),
        }
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let mut m = Mat4::zeros();
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::NotPositive { min_eigenvalue: *w });
            }
            m += rho.m * re(*w);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// `tr[ρ O]`, real part.
    pub fn expectation(&self, op: &Mat4) -> f64 {
        (self.m * op).trace().re
    }

    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    /// Re-applies the invariant checks; useful as an assertion on computed states.
    pub fn check(&self) -> Result<()> {
        check_density(&self.m)
    }
}

fn check_density(m: &Mat4) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("density matrix"));
    }
    let deviation = max_abs((m - m.adjoint()).iter().copied());
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotUnitTrace { trace });
    }
    let h = (m + m.adjoint()) * re(0.5);
    let min_eigenvalue = SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(())
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..4 {
            write!(f, "{:>3} ", BASIS[r])?;
            for col in 0..4 {
                let z = self.m[(r, col)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    re: [[f64; 4]; 4],
    im: [[f64; 4]; 4],
    basis: [String; 4],
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut out = DensityMatrixJson {
            re: [[0.0; 4]; 4],
            im: [[0.0; 4]; 4],
            basis: BASIS.map(String::from),
        };
        for r in 0..4 {
            for col in 0..4 {
                out.re[r][col] = self.m[(r, col)].re;
                out.im[r][col] = self.m[(r, col)].im;
            }
        }
        out.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DensityMatrixJson::deserialize(deserializer)?;
        if raw.basis.iter().zip(BASIS).any(|(a, b)| a != b) {
            return Err(D::Error::custom(format!(
                "unsupported basis {:?}, expected {:?}",
                raw.basis, BASIS
            )));
        }
        let m = Mat4::from_fn(|r, col| c(raw.re[r][col], raw.im[r][col]));
        DensityMatrix::new(m).map_err(D::Error::custom)
    }
}

/// Unitary 2×2 polarization transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    m: Mat2,
}

impl JonesMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("Jones matrix"));
        }
        let deviation = max_abs((m.adjoint() * m - Mat2::identity()).iter().copied());
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self {
            m: Mat2::identity(),
        }
    }

    /// Exchanges H and V.
    pub fn flip() -> Self {
        Self {
            m: Mat2::new(re(0.0), re(1.0), re(1.0), re(0.0)),
        }
    }

    /// `Rz(α)·Ry(β)·Rz(γ)`; covers SU(2), which is every rotation up to global phase.
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let rz = |t: f64| {
            Mat2::new(
                C64::from_polar(1.0, -t / 2.0),
                re(0.0),
                re(0.0),
                C64::from_polar(1.0, t / 2.0),
            )
        };
        let (s, co) = (beta / 2.0).sin_cos();
        let ry = Mat2::new(re(co), re(-s), re(s), re(co));
        Self {
            m: rz(alpha) * ry * rz(gamma),
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            m: self.m.conjugate(),
        }
    }

    pub fn compose(&self, rhs: &JonesMatrix) -> Self {
        Self { m: self.m * rhs.m }
    }
}

#[derive(Serialize, Deserialize)]
struct JonesMatrixJson {
    re: [[f64; 2]; 2],
    im: [[f64; 2]; 2],
}

impl Serialize for JonesMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.m;
        JonesMatrixJson {
            re: [[m[(0, 0)].re, m[(0, 1)].re], [m[(1, 0)].re, m[(1, 1)].re]],
            im: [[m[(0, 0)].im, m[(0, 1)].im], [m[(1, 0)].im, m[(1, 1)].im]],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JonesMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = JonesMatrixJson::deserialize(deserializer)?;
        let m = Mat2::from_fn(|r, col| c(raw.re[r][col], raw.im[r][col]));
        JonesMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues below this fraction of the largest are round-off; taking
/// their square root would leak ~1e-8 into fidelities.
const SPECTRAL_FLOOR: f64 = 1e-14;

fn clipped_sqrt(values: impl Iterator<Item = f64> + Clone) -> impl Iterator<Item = f64> {
    let top = values.clone().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    values.map(move |l| if l > SPECTRAL_FLOOR * top { l.sqrt() } else { 0.0 })
}

/// Hermitian square root with round-off eigenvalues clipped to zero.
pub(crate) fn psd_sqrt(m: &Mat4) -> Mat4 {
    let eig = SymmetricEigen::new((m + m.adjoint()) * re(0.5));
    let roots: Vec<f64> = clipped_sqrt(eig.eigenvalues.iter().copied()).collect();
    let d = Mat4::from_diagonal(&Vector4::from_fn(|i, _| re(roots[i])));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `Σ √λ` over the spectrum of `√ρ σ √ρ`.
fn root_fidelity(rho: &Mat4, sigma: &Mat4) -> f64 {
    // Work in ρ's eigenbasis: √ρ σ √ρ ≅ √D (V†σV) √D.
    let eig = SymmetricEigen::new((rho + rho.adjoint()) * re(0.5));
    let roots: Vec<f64> = clipped_sqrt(eig.eigenvalues.iter().copied()).collect();
    let s = eig.eigenvectors.adjoint() * sigma * eig.eigenvectors;
    let inner = Mat4::from_fn(|i, j| s[(i, j)] * re(roots[i] * roots[j]));
    let spectrum = SymmetricEigen::new((inner + inner.adjoint()) * re(0.5)).eigenvalues;
    clipped_sqrt(spectrum.iter().copied()).sum()
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.check()?;
    sigma.check()?;
    let r = root_fidelity(&rho.m, &sigma.m);
    Ok((r * r).clamp(0.0, 1.0))
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity against a pure state.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> f64 {
    let v = psi.vector();
    (v.adjoint() * rho.m * v)[(0, 0)].re.clamp(0.0, 1.0)
}

/// `(J_A ⊗ J_B) ρ (J_A ⊗ J_B)†`.
pub fn apply_local_rotation(
    rho: &DensityMatrix,
    j_a: &JonesMatrix,
    j_b: &JonesMatrix,
) -> Result<DensityMatrix> {
    // Re-validate in case the matrices were built without the constructor checks.
    JonesMatrix::new(j_a.m)?;
    JonesMatrix::new(j_b.m)?;
    Ok(rotate_unchecked(rho, j_a, j_b))
}

pub(crate) fn rotate_unchecked(rho: &DensityMatrix, j_a: &JonesMatrix, j_b: &JonesMatrix) -> DensityMatrix {
    let u = kron(&j_a.m, &j_b.m);
    let out = u * rho.m * u.adjoint();
    DensityMatrix {
        m: (out + out.adjoint()) * re(0.5),
    }
}

/// Wootters concurrence.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    rho.check()?;
    // σy ⊗ σy is real in this basis.
    let mut yy = Mat4::zeros();
    yy[(0, 3)] = re(-1.0);
    yy[(1, 2)] = re(1.0);
    yy[(2, 1)] = re(1.0);
    yy[(3, 0)] = re(-1.0);
    let tilde = yy * rho.m.conjugate() * yy;
    let s = psd_sqrt(&rho.m);
    let r = s * tilde * s;
    let spectrum = SymmetricEigen::new((r + r.adjoint()) * re(0.5)).eigenvalues;
    let mut lambdas: Vec<f64> = clipped_sqrt(spectrum.iter().copied()).collect();
    lambdas.sort_by(|x, y| y.total_cmp(x));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Haar-random element of U(2).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> JonesMatrix {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (c(q[0] / n, q[1] / n), c(q[2] / n, q[3] / n));
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let m = Mat2::new(a, -b.conj(), b, a.conj()) * phase;
    JonesMatrix { m }
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let amps: [C64; 4] = std::array::from_fn(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    PureState::normalized(amps).expect("gaussian vector is non-zero")
}

/// Random density matrix `G G† / tr` from a 4×k Ginibre matrix, with rank `k`
/// drawn uniformly from 1..=4.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let rank = rng.random_range(1..=4);
    let mut m = Mat4::zeros();
    for _ in 0..rank {
        let v = Vector4::from_fn(|_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        m += v * v.adjoint();
    }
    DensityMatrix::from_hermitian_part(m).expect("Ginibre product is positive definite")
}

/// Random product state `|α⟩⟨α| ⊗ |β⟩⟨β|`.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let one = |rng: &mut R| {
        let v = nalgebra::Vector2::new(
            c(rng.sample(StandardNormal), rng.sample(StandardNormal)),
            c(rng.sample(StandardNormal), rng.sample(StandardNormal)),
        )
        .normalize();
        v * v.adjoint()
    };
    let (pa, pb) = (one(rng), one(rng));
    DensityMatrix::from_hermitian_part(kron(&pa, &pb)).expect("product of projectors")
}
