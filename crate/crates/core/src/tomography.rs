//! Two-photon polarization tomography.
//!
//! Sixteen projection pairs drawn from `{H, V, D, R, L}` are measured; the
//! density matrix is first estimated by linear inversion, then by maximum
//! likelihood over a Cholesky parameterization `ρ = T†T / tr(T†T)` that is
//! physical by construction. Finally the reconstruction is unfolded into a
//! chip-output state `a|HH⟩ + b|VV⟩` seen through two unknown local rotations.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use nalgebra::{Cholesky, SMatrix, SVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::counting::{CountsMode, MeasurementRecord};
use crate::error::{Error, Result};
use crate::optics::{joint_projector, AnalyzerSetting, JointSetting, Polarization, Port};
use crate::optim::{minimize_from_starts, BfgsOptions, Minimum};
use crate::state::{c, fidelity_pure, kron, re, rotate_unchecked, target_state, DensityMatrix, JonesMatrix, Mat2, Mat4};

/// Canonical projection order.
pub const JAMES_ORDER: [(Polarization, Polarization); 16] = {
    use Polarization::*;
    [
        (H, H), (H, V), (V, V), (V, H),
        (R, H), (R, V), (D, V), (D, H),
        (D, R), (D, D), (R, D), (H, D),
        (V, D), (V, L), (H, L), (R, L),
    ]
};

/// Indices of `HH, HV, VV, VH` in [`JAMES_ORDER`]; together they resolve the identity.
const NORMALIZATION_SUBSET: [usize; 4] = [0, 1, 2, 3];

/// The sixteen analyzer settings, every detector behind its PBS's V output.
pub fn james_settings() -> Vec<JointSetting> {
    JAMES_ORDER
        .iter()
        .map(|&(a, b)| {
            JointSetting::new(
                AnalyzerSetting::projecting_onto(a, Port::V),
                AnalyzerSetting::projecting_onto(b, Port::V),
            )
        })
        .collect()
}

fn james_projectors() -> Vec<Mat4> {
    JAMES_ORDER
        .iter()
        .map(|&(a, b)| kron(&a.projector(), &b.projector()))
        .collect()
}

/// Sixteen records, one per canonical projection pair, in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographySet {
    records: Vec<MeasurementRecord>,
}

impl TomographySet {
    pub fn new(records: Vec<MeasurementRecord>) -> Result<Self> {
        if records.len() != 16 {
            return Err(Error::InvalidTomographySet(format!(
                "tomography needs 16 records, got {}",
                records.len()
            )));
        }
        for (k, (r, expected)) in records.iter().zip(james_projectors()).enumerate() {
            let got = joint_projector(&r.setting);
            let dev = (got - expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if dev > 1e-9 {
                let (a, b) = JAMES_ORDER[k];
                return Err(Error::InvalidTomographySet(format!(
                    "record {k} does not project onto {}{} (deviation {dev:e})",
                    a.label(),
                    b.label()
                )));
            }
        }
        Ok(Self { records })
    }

    /// Places records in canonical order by the projector each one measures.
    pub fn from_unordered(records: Vec<MeasurementRecord>) -> Result<Self> {
        let projectors = james_projectors();
        let mut slots: Vec<Option<MeasurementRecord>> = vec![None; 16];
        for r in records {
            let p = joint_projector(&r.setting);
            let slot = projectors.iter().enumerate().position(|(k, q)| {
                slots[k].is_none() && (p - q).iter().all(|z| z.norm() < 1e-9)
            });
            match slot {
                Some(k) => slots[k] = Some(r),
                None => {
                    return Err(Error::InvalidTomographySet(format!(
                        "setting {} is not a tomography projection or is repeated",
                        r.setting.label()
                    )))
                }
            }
        }
        let missing: Vec<String> = slots
            .iter()
            .zip(JAMES_ORDER)
            .filter(|(s, _)| s.is_none())
            .map(|(_, (a, b))| format!("{}{}", a.label(), b.label()))
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidTomographySet(format!("missing projections: {}", missing.join(", "))));
        }
        Self::new(slots.into_iter().flatten().collect())
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }
}

#[derive(Debug, Clone)]
pub struct TomographyOptions {
    pub mode: CountsMode,
    /// Relative detection efficiencies of Bob's H and V channels; counts are
    /// divided by the weight of the port they were recorded on.
    pub bob_port_efficiency: Option<[f64; 2]>,
    /// Number of MLE starts (at least 8).
    pub starts: usize,
    pub seed: u64,
    pub bfgs: BfgsOptions,
}

impl Default for TomographyOptions {
    fn default() -> Self {
        Self {
            mode: CountsMode::Net,
            bob_port_efficiency: None,
            starts: 8,
            seed: 0,
            bfgs: BfgsOptions::default(),
        }
    }
}

/// Counts prepared for inversion.
#[derive(Debug, Clone)]
pub struct PreparedCounts {
    pub counts: [f64; 16],
    /// `𝒩`, the summed counts of the HH/HV/VV/VH records.
    pub normalization: f64,
    /// Number of negative net counts set to zero.
    pub clamped: usize,
}

pub fn prepare_counts(set: &TomographySet, opts: &TomographyOptions) -> Result<PreparedCounts> {
    let mut counts = [0.0; 16];
    let mut clamped = 0;
    for (k, r) in set.records.iter().enumerate() {
        let mut n = r.counts(opts.mode);
        if let Some(eff) = opts.bob_port_efficiency {
            let w = match r.setting.bob.port() {
                Port::H => eff[0],
                Port::V => eff[1],
            };
            if !(w > 0.0) {
                return Err(Error::CountInconsistency(format!("efficiency weight {w} must be > 0")));
            }
            n /= w;
        }
        if n < 0.0 {
            n = 0.0;
            clamped += 1;
        }
        counts[k] = n;
    }
    let normalization: f64 = NORMALIZATION_SUBSET.iter().map(|&k| counts[k]).sum();
    if !(normalization > 0.0) {
        return Err(Error::ZeroCounts);
    }
    Ok(PreparedCounts {
        counts,
        normalization,
        clamped,
    })
}

/// `σᵢ ⊗ σⱼ` for i, j ∈ {I, X, Y, Z}, index `4i + j`.
fn pauli_products() -> Vec<Mat4> {
    let paulis = [
        Mat2::identity(),
        Mat2::new(re(0.0), re(1.0), re(1.0), re(0.0)),
        Mat2::new(re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)),
        Mat2::new(re(1.0), re(0.0), re(0.0), re(-1.0)),
    ];
    let mut out = Vec::with_capacity(16);
    for a in &paulis {
        for b in &paulis {
            out.push(kron(a, b));
        }
    }
    out
}

fn linear_inversion_counts(counts: &[f64; 16], normalization: f64) -> Result<Mat4> {
    let projectors = james_projectors();
    let gammas = pauli_products();
    // ρ = Σ r_k Γ_k / 4 with real r, so tr[P_ν ρ] = Σ_k r_k tr[P_ν Γ_k]/4.
    let system = SMatrix::<f64, 16, 16>::from_fn(|nu, k| (projectors[nu] * gammas[k]).trace().re / 4.0);
    let rhs = SVector::<f64, 16>::from_fn(|nu, _| counts[nu] / normalization);
    let svd = system.svd(true, true);
    if svd.singular_values.min() < 1e-10 * svd.singular_values.max() {
        return Err(Error::SingularSystem);
    }
    let r = svd.solve(&rhs, 1e-14).map_err(|_| Error::SingularSystem)?;
    let mut rho = Mat4::zeros();
    for (k, g) in gammas.iter().enumerate() {
        rho += g * re(r[k] / 4.0);
    }
    let rho = (rho + rho.adjoint()) * re(0.5);
    let tr = rho.trace().re;
    if !(tr > 0.0) {
        return Err(Error::ZeroCounts);
    }
    Ok(rho.unscale(tr))
}

/// Solves `tr[P_ν ρ] = n_ν / 𝒩` for a Hermitian, unit-trace `ρ`. The result
/// need not be positive semidefinite.
pub fn linear_inversion(set: &TomographySet, opts: &TomographyOptions) -> Result<Mat4> {
    let prepared = prepare_counts(set, opts)?;
    linear_inversion_counts(&prepared.counts, prepared.normalization)
}

/// Lower-triangular `T` from 16 reals: four real diagonal entries, then the
/// sub-diagonals `(1,0) (2,1) (3,2) (2,0) (3,1) (3,0)` as (re, im) pairs.
fn cholesky_factor(t: &[f64]) -> Mat4 {
    const OFF: [(usize, usize); 6] = [(1, 0), (2, 1), (3, 2), (2, 0), (3, 1), (3, 0)];
    let mut m = Mat4::zeros();
    for i in 0..4 {
        m[(i, i)] = re(t[i]);
    }
    for (k, &(r, col)) in OFF.iter().enumerate() {
        m[(r, col)] = c(t[4 + 2 * k], t[5 + 2 * k]);
    }
    m
}

fn params_from_factor(m: &Mat4) -> Vec<f64> {
    const OFF: [(usize, usize); 6] = [(1, 0), (2, 1), (3, 2), (2, 0), (3, 1), (3, 0)];
    let mut t = vec![0.0; 16];
    for i in 0..4 {
        t[i] = m[(i, i)].re;
    }
    for (k, &(r, col)) in OFF.iter().enumerate() {
        t[4 + 2 * k] = m[(r, col)].re;
        t[5 + 2 * k] = m[(r, col)].im;
    }
    t
}

/// `T†T / tr(T†T)`.
pub fn density_from_params(t: &[f64]) -> Mat4 {
    let f = cholesky_factor(t);
    let m = f.adjoint() * f;
    let tr = m.trace().re;
    m.unscale(tr)
}

/// Lower-triangular `T` with `T†T = ρ` (a reversed Cholesky factorization).
fn params_from_density(rho: &Mat4) -> Option<Vec<f64>> {
    // With J the exchange matrix, JρJ = L L† gives ρ = (J L J)(J L J)†, and
    // T = (J L J)† is lower triangular.
    let flip = Mat4::from_fn(|r, col| m_rev(r, col, rho));
    let l = Cholesky::new(flip)?.unpack();
    let u = Mat4::from_fn(|r, col| l[(3 - r, 3 - col)]);
    Some(params_from_factor(&u.adjoint()))
}

fn m_rev(r: usize, col: usize, m: &Mat4) -> crate::state::C64 {
    m[(3 - r, 3 - col)]
}

/// Gaussian approximation of the negative log-likelihood.
pub fn mle_objective(t: &[f64], counts: &[f64; 16], normalization: f64, projectors: &[Mat4]) -> f64 {
    let rho = density_from_params(t);
    if !rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return f64::INFINITY;
    }
    let floor = 1e-12 * normalization;
    projectors
        .iter()
        .zip(counts)
        .map(|(p, &n)| {
            let expected = normalization * (rho * p).trace().re;
            let diff = expected - n;
            diff * diff / (2.0 * expected.max(floor))
        })
        .sum()
}

/// Positive part of a Hermitian matrix, trace-normalized and mixed with a
/// little of `I/4` so it admits a Cholesky factor.
fn physical_start(m: &Mat4) -> Mat4 {
    let eig = SymmetricEigen::new(*m);
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let total: f64 = clipped.iter().sum();
    let mut rho = if total > 0.0 {
        eig.eigenvectors * Mat4::from_diagonal(&clipped.map(|l| re(l / total))) * eig.eigenvectors.adjoint()
    } else {
        Mat4::identity() * re(0.25)
    };
    let eps = 1e-3;
    rho = rho * re(1.0 - eps) + Mat4::identity() * re(eps / 4.0);
    (rho + rho.adjoint()) * re(0.5)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerDiagnostics {
    pub starts: usize,
    pub converged_starts: usize,
    pub best_start: usize,
    pub iterations: usize,
    pub evaluations: usize,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct MleResult {
    pub rho: DensityMatrix,
    pub linear_inversion: Mat4,
    pub normalization: f64,
    pub clamped: usize,
    pub diagnostics: OptimizerDiagnostics,
    /// Objective at each accepted iteration of the winning start.
    pub history: Vec<f64>,
}

/// Maximum-likelihood density matrix.
pub fn mle_reconstruct(set: &TomographySet, opts: &TomographyOptions) -> Result<MleResult> {
    let prepared = prepare_counts(set, opts)?;
    let li = linear_inversion_counts(&prepared.counts, prepared.normalization)?;
    let projectors = james_projectors();
    let start0 = params_from_density(&physical_start(&li)).ok_or(Error::SingularSystem)?;
    let scale = start0.iter().map(|x| x * x).sum::<f64>().sqrt();

    let n_starts = opts.starts.max(8);
    let mut starts = vec![start0.clone()];
    for k in 1..n_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(k as u64);
        starts.push(
            start0
                .iter()
                .map(|x| x + 0.1 * scale * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
    }

    let counts = prepared.counts;
    let norm = prepared.normalization;
    let objective = |t: &[f64]| mle_objective(t, &counts, norm, &projectors);
    let results = minimize_from_starts(&objective, &starts, &opts.bfgs);
    let (best_start, best) = select_best(&results)?;
    let rho = DensityMatrix::from_hermitian_part(density_from_params(&best.x))?;
    Ok(MleResult {
        rho,
        linear_inversion: li,
        normalization: norm,
        clamped: prepared.clamped,
        diagnostics: OptimizerDiagnostics {
            starts: results.len(),
            converged_starts: results.iter().filter(|r| r.is_ok()).count(),
            best_start,
            iterations: best.iterations,
            evaluations: best.evaluations,
            objective: best.value,
        },
        history: best.history.clone(),
    })
}

/// Lowest objective among converged starts; the first such start wins ties.
/// When no start converged, the error with the best objective is returned.
fn select_best(results: &[Result<Minimum>]) -> Result<(usize, &Minimum)> {
    let best = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().ok().map(|m| (i, m)))
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value));
    if let Some(found) = best {
        return Ok(found);
    }
    let worst_case = results
        .iter()
        .filter_map(|r| match r {
            Err(Error::NotConverged { best, iterations, residual, best_params }) => Some(Error::NotConverged {
                best: *best,
                iterations: *iterations,
                residual: *residual,
                best_params: best_params.clone(),
            }),
            _ => None,
        })
        .min_by(|a, b| match (a, b) {
            (Error::NotConverged { best: x, .. }, Error::NotConverged { best: y, .. }) => x.total_cmp(y),
            _ => std::cmp::Ordering::Equal,
        });
    Err(worst_case.unwrap_or(Error::NotConverged {
        iterations: 0,
        best: f64::NAN,
        residual: f64::NAN,
        best_params: Vec::new(),
    }))
}

/// Chip-output state and fiber rotations recovered from a reconstruction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub rho_in: DensityMatrix,
    pub j_a: JonesMatrix,
    pub j_b: JonesMatrix,
    /// Amplitude of `|HH⟩`; `b = √(1 − a²)` and `a ≥ b` by convention.
    pub a: f64,
    pub fidelity: f64,
    /// `Rz·Ry·Rz` Euler angles of `J_A` and `J_B`, radians in `(−π, π]`.
    pub angles_a: [f64; 3],
    pub angles_b: [f64; 3],
    pub diagnostics: OptimizerDiagnostics,
}

#[derive(Debug, Clone)]
pub struct RecoveryOptions {
    /// Random starts in addition to the identity start (at least 32).
    pub random_starts: usize,
    pub seed: u64,
    /// Pin `a` instead of optimizing it.
    pub fixed_a: Option<f64>,
    pub bfgs: BfgsOptions,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            random_starts: 32,
            seed: 0,
            fixed_a: None,
            bfgs: BfgsOptions::default(),
        }
    }
}

/// Fidelities closer than this count as tied.
const FIDELITY_TIE: f64 = 1e-9;

fn wrap_angle(x: f64) -> f64 {
    let w = (x + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Maps the free amplitude parameter onto `[0, π/4]`, so that `a ≥ b`. The
/// swap `a ↔ b` is itself a local rotation (a flip on both photons), so this
/// loses nothing.
fn amplitude_angle(x: f64) -> f64 {
    FRAC_PI_4 * x.sin().powi(2)
}

/// Rotation angle of an SU(2) element, ignoring its sign.
fn rotation_angle(j: &JonesMatrix) -> f64 {
    let half_trace = (j.matrix().trace() * re(0.5)).norm().min(1.0);
    2.0 * half_trace.acos()
}

fn unpack(x: &[f64], fixed_a: Option<f64>) -> (JonesMatrix, JonesMatrix, f64) {
    let ja = JonesMatrix::from_euler(x[0], x[1], x[2]);
    let jb = JonesMatrix::from_euler(x[3], x[4], x[5]);
    let a = fixed_a.unwrap_or_else(|| amplitude_angle(x[6]).cos());
    (ja, jb, a)
}

/// Maximizes `F((J_A ⊗ J_B)† ρ_out (J_A ⊗ J_B), |Ψ(a,b)⟩⟨Ψ(a,b)|)` over two
/// rotations and `a`.
pub fn recover_chip_state(rho_out: &DensityMatrix, opts: &RecoveryOptions) -> Result<RecoveryResult> {
    rho_out.check()?;
    if let Some(a) = opts.fixed_a {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::NegativeAmplitude(a));
        }
    }
    let m = *rho_out.matrix();
    let fixed_a = opts.fixed_a;
    let objective = move |x: &[f64]| {
        let (ja, jb, a) = unpack(x, fixed_a);
        let b = (1.0 - a * a).max(0.0).sqrt();
        let u = kron(ja.matrix(), jb.matrix());
        // ⟨ψ|U† ρ U|ψ⟩ with U|ψ⟩ = a·U|HH⟩ + b·U|VV⟩.
        let v = u.column(0) * re(a) + u.column(3) * re(b);
        -(v.adjoint() * m * v)[(0, 0)].re
    };

    // Identity start with a² ≈ 0.85; the rest uniform over the angles.
    let mut starts = vec![vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, FRAC_PI_4]];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts.max(32) {
        starts.push((0..7).map(|_| rng.random_range(-PI..PI)).collect());
    }
    let results = minimize_from_starts(&objective, &starts, &opts.bfgs);

    let mut candidates: Vec<(usize, &Minimum, f64)> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().ok().map(|m| (i, m)))
        .map(|(i, m)| {
            let (ja, jb, _) = unpack(&m.x, fixed_a);
            (i, m, rotation_angle(&ja).powi(2) + rotation_angle(&jb).powi(2))
        })
        .collect();
    if candidates.is_empty() {
        return Err(select_best(&results).err().unwrap_or(Error::NotConverged {
            iterations: 0,
            best: f64::NAN,
            residual: f64::NAN,
            best_params: Vec::new(),
        }));
    }
    let top = candidates.iter().map(|c| -c.1.value).fold(f64::NEG_INFINITY, f64::max);
    candidates.retain(|c| -c.1.value >= top - FIDELITY_TIE);
    let (best_start, best, _) = *candidates
        .iter()
        .min_by(|x, y| x.2.total_cmp(&y.2).then(x.0.cmp(&y.0)))
        .expect("non-empty");

    let x: Vec<f64> = best.x.iter().map(|&v| wrap_angle(v)).collect();
    let (ja, jb, a) = unpack(&x, fixed_a);
    let rho_in = rotate_unchecked(rho_out, &ja.adjoint(), &jb.adjoint());
    let rho_in = DensityMatrix::from_hermitian_part(*rho_in.matrix())?;
    let psi = target_state(a, (1.0 - a * a).max(0.0).sqrt())?;
    Ok(RecoveryResult {
        fidelity: fidelity_pure(&rho_in, &psi),
        rho_in,
        j_a: ja,
        j_b: jb,
        a,
        angles_a: [x[0], x[1], x[2]],
        angles_b: [x[3], x[4], x[5]],
        diagnostics: OptimizerDiagnostics {
            starts: results.len(),
            converged_starts: results.iter().filter(|r| r.is_ok()).count(),
            best_start,
            iterations: best.iterations,
            evaluations: best.evaluations,
            objective: best.value,
        },
    })
}

/// Best fidelity to `Φ⁺` reachable with local rotations.
pub fn fidelity_to_maximal(rho: &DensityMatrix, opts: &RecoveryOptions) -> Result<f64> {
    let opts = RecoveryOptions {
        fixed_a: Some(FRAC_1_SQRT_2),
        ..opts.clone()
    };
    Ok(recover_chip_state(rho, &opts)?.fidelity)
}

/// Full reconstruction of one tomography campaign.
#[derive(Debug, Clone)]
pub struct TomographyAnalysis {
    pub mle: MleResult,
    pub recovery: RecoveryResult,
    pub fidelity_to_maximal: f64,
}

pub fn analyze(
    records: Vec<MeasurementRecord>,
    tomo: &TomographyOptions,
    recovery: &RecoveryOptions,
) -> Result<TomographyAnalysis> {
    let set = TomographySet::from_unordered(records)?;
    let mle = mle_reconstruct(&set, tomo)?;
    let rec = recover_chip_state(&mle.rho, recovery)?;
    let fmax = fidelity_to_maximal(&mle.rho, recovery)?;
    Ok(TomographyAnalysis {
        mle,
        recovery: rec,
        fidelity_to_maximal: fmax,
    })
}

/// Euler angles of the recovered fiber rotations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JonesAngles {
    pub alice: [f64; 3],
    pub bob: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TomographyDiagnostics {
    pub mle: OptimizerDiagnostics,
    pub recovery: OptimizerDiagnostics,
}

/// Tomography report JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TomographyReport {
    pub mode: CountsMode,
    /// Reconstructed state at the analyzers.
    pub rho: DensityMatrix,
    /// Chip-output state after undoing the recovered rotations.
    pub rho_in: DensityMatrix,
    pub fidelity: f64,
    pub fidelity_to_maximal: f64,
    pub a_squared: f64,
    pub jones_angles_deg: JonesAngles,
    pub jones_angles_rad: JonesAngles,
    pub j_a: JonesMatrix,
    pub j_b: JonesMatrix,
    pub normalization: f64,
    pub clamped_counts: usize,
    pub optimizer: TomographyDiagnostics,
}

impl TomographyAnalysis {
    pub fn report(&self, mode: CountsMode) -> TomographyReport {
        let r = &self.recovery;
        TomographyReport {
            mode,
            rho: self.mle.rho.clone(),
            rho_in: r.rho_in.clone(),
            fidelity: r.fidelity,
            fidelity_to_maximal: self.fidelity_to_maximal,
            a_squared: r.a * r.a,
            jones_angles_deg: JonesAngles {
                alice: r.angles_a.map(f64::to_degrees),
                bob: r.angles_b.map(f64::to_degrees),
            },
            jones_angles_rad: JonesAngles {
                alice: r.angles_a,
                bob: r.angles_b,
            },
            j_a: r.j_a,
            j_b: r.j_b,
            normalization: self.mle.normalization,
            clamped_counts: self.mle.clamped,
            optimizer: TomographyDiagnostics {
                mle: self.mle.diagnostics.clone(),
                recovery: r.diagnostics.clone(),
            },
        }
    }
}

impl TomographyReport {
    /// Bar-chart table of `Re ρ` and `Im ρ` for the reconstructed and the
    /// unfolded state.
    pub fn bars_csv(&self) -> String {
        const BASIS: [&str; 4] = ["HH", "HV", "VH", "VV"];
        let mut s = String::from("matrix,row,col,re,im\n");
        for (name, rho) in [("rho", &self.rho), ("rho_in", &self.rho_in)] {
            let m = rho.matrix();
            for r in 0..4 {
                for c in 0..4 {
                    s.push_str(&format!("{name},{},{},{},{}\n", BASIS[r], BASIS[c], m[(r, c)].re, m[(r, c)].im));
                }
            }
        }
        s
    }
}

/// Noiseless records: `n_ν = scale · tr[ρ P_ν]`, no accidentals.
pub fn exact_records(rho: &DensityMatrix, scale: f64) -> Vec<MeasurementRecord> {
    james_settings()
        .into_iter()
        .map(|j| {
            let n = scale * rho.expectation(&joint_projector(&j));
            MeasurementRecord {
                setting: j,
                n_raw: n,
                n_net: n,
                tau_acc: 0.0,
                accidentals: 0.0,
                duration: 1.0,
                singles_a: 0,
                window_length: 0.8e-9,
                noise_length: 0.0,
            }
        })
        .collect()
}
