//! Acceptance gate. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use pairlab::chsh::{
    correlator_full, correlator_three_detector, optimal_settings, run_chsh, AngleSearch, REFERENCE_CHSH_DURATION,
};
use pairlab::counting::{quantize_counts, visibility_report, CountsMode, MeasurementRecord, COUNT_QUANTUM};
use pairlab::optics::{coincidence_probability, joint_projector, AnalyzerSetting, JointSetting, Port};
use pairlab::pipeline::{cmd_pipeline, Campaign, PipelineConfig};
use pairlab::sim::{
    paper_reference_model, run_campaign_as, visibility_sweep_settings, CAMPAIGN_CHSH, CAMPAIGN_TOMOGRAPHY, CAMPAIGN_VISIBILITY,
};
use pairlab::state::{
    apply_local_rotation, concurrence, fidelity, random_density_matrix, random_product_state, random_pure_state,
    random_unitary, target_state, DensityMatrix, Mat4, PureState, C64,
};
use pairlab::tomography::{
    exact_records, james_settings, linear_inversion, mle_reconstruct, TomographyOptions, TomographyReport,
    TomographySet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Outcome of one criterion: failures collected by [`Check::ensure`], notes
/// printed after the verdict.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn ensure(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

// ---------------------------------------------------------------------------
// Brute-force oracles: plain index loops, and Hermitian spectra taken through
// the real symmetric 8×8 embedding [[A, −B], [B, A]] of A + iB.

type Cm = [[C64; 4]; 4];

fn to_array(m: &Mat4) -> Cm {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn matmul(a: &Cm, b: &Cm) -> Cm {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

fn embed(h: &Cm) -> DMatrix<f64> {
    DMatrix::from_fn(8, 8, |r, c| {
        let z = h[r % 4][c % 4];
        match (r < 4, c < 4) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Square root of a positive semidefinite Hermitian matrix, tiny eigenvalues
/// treated as zero.
fn oracle_sqrt(h: &Cm) -> Cm {
    let e = SymmetricEigen::new(embed(h));
    let top = e.eigenvalues.max();
    let d = e.eigenvalues.map(|l| if l > 1e-12 * top { l.sqrt() } else { 0.0 });
    let s = &e.eigenvectors * DMatrix::from_diagonal(&d) * e.eigenvectors.transpose();
    std::array::from_fn(|i| std::array::from_fn(|j| C64::new(s[(i, j)], s[(i + 4, j)])))
}

/// Square roots of the eigenvalues of a PSD Hermitian matrix, each once.
fn oracle_sqrt_spectrum(h: &Cm) -> Vec<f64> {
    let mut l: Vec<f64> = SymmetricEigen::new(embed(h)).eigenvalues.iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    let top = l[0].max(0.0);
    // The embedding doubles every eigenvalue.
    l.iter()
        .step_by(2)
        .map(|&x| if x > 1e-12 * top { x.sqrt() } else { 0.0 })
        .collect()
}

fn oracle_fidelity(rho: &Cm, sigma: &Cm) -> f64 {
    let s = oracle_sqrt(sigma);
    let m = matmul(&matmul(&s, rho), &s);
    oracle_sqrt_spectrum(&m).iter().sum::<f64>().powi(2)
}

fn oracle_concurrence(rho: &Cm) -> f64 {
    // σy ⊗ σy in the HH, HV, VH, VV basis.
    let flip: Cm = std::array::from_fn(|i| {
        std::array::from_fn(|j| C64::new(if i + j == 3 { if i == 0 || i == 3 { -1.0 } else { 1.0 } } else { 0.0 }, 0.0))
    });
    let conj: Cm = std::array::from_fn(|i| std::array::from_fn(|j| rho[i][j].conj()));
    let tilde = matmul(&matmul(&flip, &conj), &flip);
    let s = oracle_sqrt(rho);
    let l = oracle_sqrt_spectrum(&matmul(&matmul(&s, &tilde), &s));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

fn oracle_rotation(rho: &Cm, u: &[[C64; 2]; 2], v: &[[C64; 2]; 2]) -> Cm {
    let k = |i: usize, j: usize| u[i / 2][j / 2] * v[i % 2][j % 2];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut z = C64::new(0.0, 0.0);
            for a in 0..4 {
                for b in 0..4 {
                    z += k(i, a) * rho[a][b] * k(j, b).conj();
                }
            }
            z
        })
    })
}

fn oracle_plates(q: f64, h: f64) -> [[C64; 2]; 2] {
    let (c2, s2) = ((2.0 * h).cos(), (2.0 * h).sin());
    let hw = [[C64::new(c2, 0.0), C64::new(s2, 0.0)], [C64::new(s2, 0.0), C64::new(-c2, 0.0)]];
    let (c, s) = (q.cos(), q.sin());
    let qw = [
        [C64::new(c * c, s * s), C64::new(s * c, -s * c)],
        [C64::new(s * c, -s * c), C64::new(s * s, c * c)],
    ];
    std::array::from_fn(|i| std::array::from_fn(|j| hw[i][0] * qw[0][j] + hw[i][1] * qw[1][j]))
}

/// `U†|p⟩⟨p|U` for both analyzers, tensored by index.
fn oracle_joint_projector(j: &JointSetting) -> Cm {
    let single = |s: &AnalyzerSetting| -> [[C64; 2]; 2] {
        let u = oracle_plates(s.qwp_angle(), s.hwp_angle());
        let p = match s.port() {
            Port::H => 0,
            Port::V => 1,
        };
        let w = [u[p][0].conj(), u[p][1].conj()];
        std::array::from_fn(|a| std::array::from_fn(|b| w[a] * w[b].conj()))
    };
    let (a, b) = (single(&j.alice), single(&j.bob));
    std::array::from_fn(|i| std::array::from_fn(|k| a[i / 2][k / 2] * b[i % 2][k % 2]))
}

fn max_dev(a: &Cm, b: &Mat4) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[(i, j)]).norm());
        }
    }
    d
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Check {
    let mut c = Check::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = [0.0f64; 5];
    for _ in 0..100 {
        let rho = random_density_matrix(&mut rng);
        let sigma = if rng.random_bool(0.3) {
            random_pure_state(&mut rng).projector()
        } else {
            random_density_matrix(&mut rng)
        };
        let (r, s) = (to_array(rho.matrix()), to_array(sigma.matrix()));

        worst[0] = worst[0].max((fidelity(&rho, &sigma).unwrap() - oracle_fidelity(&r, &s)).abs());

        let (u, v) = (random_unitary(&mut rng), random_unitary(&mut rng));
        let rot = apply_local_rotation(&rho, &u, &v).unwrap();
        let m2 = |j: &pairlab::state::JonesMatrix| -> [[C64; 2]; 2] {
            std::array::from_fn(|i| std::array::from_fn(|k| j.matrix()[(i, k)]))
        };
        worst[1] = worst[1].max(max_dev(&oracle_rotation(&r, &m2(&u), &m2(&v)), rot.matrix()));

        worst[2] = worst[2].max((concurrence(&rho).unwrap() - oracle_concurrence(&r)).abs());

        let port = |b: bool| if b { Port::V } else { Port::H };
        let setting = |rng: &mut ChaCha8Rng| {
            AnalyzerSetting::new(rng.random_range(0.0..PI), rng.random_range(0.0..PI), port(rng.random_bool(0.5)))
                .unwrap()
        };
        let j = JointSetting::new(setting(&mut rng), setting(&mut rng));
        let p = oracle_joint_projector(&j);
        worst[3] = worst[3].max(max_dev(&p, &joint_projector(&j)));

        let born: f64 = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| (r[a][b] * p[b][a]).re).sum();
        worst[4] = worst[4].max((coincidence_probability(&rho, &j) - born).abs());
    }
    for (name, w) in ["fidelity", "rotation", "concurrence", "projector", "Born probability"].iter().zip(worst) {
        c.ensure(w <= 1e-9, format!("{name} deviates by {w:e}"));
    }
    c.note(format!(
        "max deviations: fidelity {:.1e}, rotation {:.1e}, concurrence {:.1e}, projector {:.1e}, Born {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    ));
    c
}

fn criterion_2() -> Check {
    let mut c = Check::default();
    let (a, b) = (0.6f64.sqrt(), 0.4f64.sqrt());
    let states = [
        ("Phi+", PureState::phi_plus().projector()),
        ("HH", PureState::basis(0).projector()),
        ("target", target_state(a, b).unwrap().projector()),
    ];
    let opts = TomographyOptions::default();
    for (name, truth) in states {
        let set = TomographySet::new(exact_records(&truth, 1e4)).unwrap();
        let mle = mle_reconstruct(&set, &opts).unwrap();
        let li = linear_inversion(&set, &opts).unwrap();
        c.ensure(mle.rho.check().is_ok(), format!("{name}: reconstruction not physical"));
        let f = fidelity(&mle.rho, &truth).unwrap();
        let dev = max_dev(&to_array(&li), mle.rho.matrix());
        c.ensure(f >= 0.999, format!("{name}: fidelity {f:.6}"));
        c.ensure(dev < 1e-6, format!("{name}: MLE vs linear inversion {dev:e}"));
        c.note(format!("{name}: F = {f:.8}, |MLE - LI| = {dev:.1e}"));
    }
    c
}

fn tomography_trials(dir: &Path, trials: u64) -> (Vec<f64>, Vec<f64>, Vec<TomographyReport>) {
    let results: Vec<_> = (0..trials)
        .map(|seed| {
            let cfg = PipelineConfig {
                campaign: Campaign::Tomography,
                seed,
                output_dir: dir.join(format!("tomo-{seed}")),
                ..Default::default()
            };
            let (_, summary) = cmd_pipeline(&cfg, false).unwrap();
            let text = fs::read_to_string(cfg.output_dir.join("tomography_report.json")).unwrap();
            let report: TomographyReport = serde_json::from_str(&text).unwrap();
            (summary.fidelity_net.unwrap(), summary.fidelity_raw.unwrap(), report)
        })
        .collect();
    let mut net = Vec::new();
    let mut raw = Vec::new();
    let mut reports = Vec::new();
    for (n, r, rep) in results {
        net.push(n);
        raw.push(r);
        reports.push(rep);
    }
    (net, raw, reports)
}

fn criterion_3(dir: &Path, reports: &mut Vec<TomographyReport>) -> Check {
    let mut c = Check::default();
    let (net, raw, reps) = tomography_trials(dir, 20);
    reports.extend(reps);
    let (m_net, m_raw) = (median(net), median(raw));
    c.ensure((m_net - 0.88).abs() <= 0.05, format!("median fidelity {m_net:.3} outside 0.88 +- 0.05"));
    c.ensure(m_net - m_raw >= 0.10, format!("raw-count drop {:.3} < 0.10", m_net - m_raw));
    c.note(format!(
        "median fidelity net {m_net:.3}, raw {m_raw:.3} (drop {:.3}); published 0.88 and 0.71",
        m_net - m_raw
    ));
    c
}

/// Best S over linear analyzers: a grid over Alice's two angles, Bob's best
/// response in closed form.
fn grid_oracle(rho: &DensityMatrix, steps: usize) -> f64 {
    let r = to_array(rho.matrix());
    let pauli = |x: bool| -> [[f64; 2]; 2] {
        if x {
            [[0.0, 1.0], [1.0, 0.0]]
        } else {
            [[1.0, 0.0], [0.0, -1.0]]
        }
    };
    let corr = |a: bool, b: bool| {
        let (pa, pb) = (pauli(a), pauli(b));
        let mut t = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                t += r[j][i].re * pa[i / 2][j / 2] * pb[i % 2][j % 2];
            }
        }
        t
    };
    let m = [[corr(false, false), corr(false, true)], [corr(true, false), corr(true, true)]];
    let norm = |u: [f64; 2]| {
        let w = [u[0] * m[0][0] + u[1] * m[1][0], u[0] * m[0][1] + u[1] * m[1][1]];
        w[0].hypot(w[1])
    };
    let mut best = f64::NEG_INFINITY;
    for i in 0..steps {
        let a1 = 2.0 * PI * i as f64 / steps as f64;
        let v1 = [a1.cos(), a1.sin()];
        for j in 0..steps {
            let a2 = 2.0 * PI * j as f64 / steps as f64;
            let v2 = [a2.cos(), a2.sin()];
            best = best.max(norm([v1[0] + v2[0], v1[1] + v2[1]]) + norm([v1[0] - v2[0], v1[1] - v2[1]]));
        }
    }
    best
}

fn criterion_4() -> Check {
    let mut c = Check::default();
    let target = target_state(0.6f64.sqrt(), 0.4f64.sqrt()).unwrap().projector();
    let predicted = optimal_settings(&target, AngleSearch::Linear).unwrap().predicted_s;
    let conc = concurrence(&target).unwrap();
    let closed = 2.0 * (1.0 + conc * conc).sqrt();
    let grid = grid_oracle(&target, 3600);
    for (name, v) in [("2.8", 2.8), ("2 sqrt(1 + C^2)", closed), ("grid search", grid)] {
        c.ensure((predicted - v).abs() < 1e-4, format!("predicted S {predicted:.6} vs {name} {v:.6}"));
    }

    let model = paper_reference_model();
    let reference = optimal_settings(&model.analyzed_state(), AngleSearch::Linear).unwrap();
    let runs: Vec<(f64, f64)> = (0..20u64)
        .map(|seed| {
            let mut m = model.clone();
            m.seed = seed;
            let r = run_chsh(&m, &reference.pair, REFERENCE_CHSH_DURATION, CountsMode::Net).unwrap();
            (r.s, r.sigma_s)
        })
        .collect();
    let violating = runs.iter().filter(|(s, _)| *s > 2.0).count();
    let sigma = median(runs.iter().map(|r| r.1).collect());
    let s_med = median(runs.iter().map(|r| r.0).collect());
    c.ensure((sigma - 0.19).abs() <= 0.5 * 0.19, format!("median sigma_S {sigma:.3} not within 50% of 0.19"));
    c.ensure(violating >= 18, format!("S > 2 in only {violating}/20 trials"));
    c.note(format!(
        "target state: predicted S {predicted:.5} (closed form {closed:.5}, grid {grid:.5})"
    ));
    c.note(format!(
        "reference bench: predicted S {:.3} | simulated median S {s_med:.3}, median sigma_S {sigma:.3}, S > 2 in {violating}/20 | published 2.37 +- 0.19",
        reference.predicted_s
    ));
    c
}

fn criterion_5() -> Check {
    let mut c = Check::default();
    let model = paper_reference_model();
    let records = run_campaign_as(&model, CAMPAIGN_VISIBILITY, &visibility_sweep_settings(16), 1200.0).unwrap();
    let rep = visibility_report(&records).unwrap();
    let vv = rep.channel("A_V B_V").expect("A_V B_V channel");
    c.ensure(vv.net.visibility >= 0.95, format!("net visibility {:.3} < 0.95", vv.net.visibility));
    c.ensure(
        (0.7..=0.9).contains(&vv.raw.visibility),
        format!("raw visibility {:.3} outside [0.7, 0.9]", vv.raw.visibility),
    );
    c.ensure((vv.peak_car - 8.0).abs() <= 2.0, format!("peak CAR {:.2} far from 8", vv.peak_car));
    let sv = rep.singles.visibility;
    let sigma = rep.singles.visibility_sigma.unwrap_or(f64::NAN);
    c.ensure((sv - 0.2).abs() <= 3.0 * sigma, format!("singles visibility {sv:.5} not within 3 sigma ({sigma:.1e}) of 0.2"));
    c.note(format!(
        "A_V B_V: net {:.3}, raw {:.3}, CAR {:.2} (published 0.99 / 0.80 / 8); singles {sv:.5} +- {sigma:.1e} (published 0.12, out of model)",
        vv.net.visibility, vv.raw.visibility, vv.peak_car
    ));
    c
}

fn criterion_6() -> Check {
    let mut c = Check::default();
    let model = paper_reference_model();
    let pair = optimal_settings(&model.analyzed_state(), AngleSearch::Linear).unwrap().pair;
    let mut records: Vec<MeasurementRecord> = Vec::new();
    for seed in 0..5 {
        let mut m = model.clone();
        m.seed = seed;
        records.extend(run_campaign_as(&m, CAMPAIGN_VISIBILITY, &visibility_sweep_settings(16), 1200.0).unwrap());
        records.extend(run_campaign_as(&m, CAMPAIGN_TOMOGRAPHY, &james_settings(), 1200.0).unwrap());
        records.extend(run_campaign_as(&m, CAMPAIGN_CHSH, &pair.acquisitions(), REFERENCE_CHSH_DURATION).unwrap());
    }
    let broken = records.iter().filter(|r| r.n_raw != r.n_net + r.accidentals).count();
    let off_grid = records
        .iter()
        .filter(|r| {
            r.accidentals != quantize_counts(r.window_length * r.tau_acc)
                || (r.window_length * r.tau_acc - r.accidentals).abs() > COUNT_QUANTUM / 2.0
        })
        .count();
    c.ensure(broken == 0, format!("{broken}/{} histograms break N_raw = N_net + window*tau", records.len()));
    c.ensure(off_grid == 0, format!("{off_grid} accidental estimates differ from window*tau"));

    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut mismatches = 0;
    let cases = 10_000;
    for _ in 0..cases {
        let n: [u32; 4] = std::array::from_fn(|_| rng.random_range(0..1_000_000));
        if n.iter().all(|&k| k == 0) {
            continue;
        }
        let [n00, n01, n10, n11] = n.map(f64::from);
        let full = correlator_full(n00, n01, n10, n11).unwrap();
        let three = correlator_three_detector(n00 + n10, n01 + n11, n10, n11).unwrap();
        if full != three {
            mismatches += 1;
        }
    }
    c.ensure(mismatches == 0, format!("{mismatches}/{cases} correlator mismatches"));
    c.note(format!(
        "{} histograms checked bit-exact; {cases} fuzzed count tuples, {mismatches} mismatches",
        records.len()
    ));
    c
}

fn criterion_7(reports: &[TomographyReport]) -> Check {
    let mut c = Check::default();
    let unphysical = reports
        .iter()
        .filter(|r| r.rho.check().is_err() || r.rho_in.check().is_err())
        .count();
    c.ensure(!reports.is_empty(), "no reconstructions to check");
    c.ensure(unphysical == 0, format!("{unphysical} unphysical reconstructions"));

    let tsirelson = 2.0 * SQRT_2 + 1e-6;
    let states: Vec<DensityMatrix> = {
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        (0..1000).map(|_| random_density_matrix(&mut rng)).collect()
    };
    let linear: Vec<f64> = states
        .par_iter()
        .map(|r| optimal_settings(r, AngleSearch::Linear).unwrap().predicted_s)
        .collect();
    let full: Vec<f64> = states[..100]
        .par_iter()
        .map(|r| optimal_settings(r, AngleSearch::Full).unwrap().predicted_s)
        .collect();
    let max_random = linear.iter().chain(&full).copied().fold(f64::NEG_INFINITY, f64::max);
    c.ensure(max_random <= tsirelson, format!("predicted S {max_random} exceeds 2 sqrt 2"));

    let products: Vec<DensityMatrix> = {
        let mut rng = ChaCha8Rng::seed_from_u64(708);
        (0..100).map(|_| random_product_state(&mut rng)).collect()
    };
    let max_product = products
        .par_iter()
        .map(|r| optimal_settings(r, AngleSearch::Full).unwrap().predicted_s)
        .reduce(|| f64::NEG_INFINITY, f64::max);
    c.ensure(max_product <= 2.0 + 1e-6, format!("product state reaches S = {max_product}"));
    c.note(format!(
        "{} reconstructions physical; max S over 1000 random states {max_random:.4}, over 100 product states {max_product:.6}",
        reports.len()
    ));
    c
}

fn files_under(root: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn criterion_8(dir: &Path) -> Check {
    let mut c = Check::default();
    let run = |name: &str| {
        let cfg = PipelineConfig {
            seed: 42,
            output_dir: dir.join(name),
            ..Default::default()
        };
        cmd_pipeline(&cfg, false).unwrap();
        cfg.output_dir
    };
    let (a, b) = (run("first"), run("second"));
    let (fa, fb) = (files_under(&a), files_under(&b));
    c.ensure(fa == fb, "different file sets");
    let differing: Vec<String> = fa
        .iter()
        .filter(|f| fs::read(a.join(f)).unwrap() != fs::read(b.join(f)).unwrap())
        .map(|f| f.display().to_string())
        .collect();
    c.ensure(differing.is_empty(), format!("files differ: {differing:?}"));
    c.note(format!("{} files compared byte for byte", fa.len()));
    c
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut reports: Vec<TomographyReport> = Vec::new();
    // Criterion 7 also checks the reconstructions produced by criterion 3.

    type Run<'a> = Box<dyn FnOnce(&mut Vec<TomographyReport>) -> Check + 'a>;
    let criteria: Vec<(u32, &str, Duration, Run)> = vec![
        (1, "state-model exactness", Duration::from_secs(5), Box::new(|_| criterion_1())),
        (2, "noiseless tomography round-trip", Duration::from_secs(30), Box::new(|_| criterion_2())),
        (3, "fidelity headline", Duration::from_secs(600), Box::new(|r| criterion_3(tmp.path(), r))),
        (4, "CHSH headline", Duration::from_secs(300), Box::new(|_| criterion_4())),
        (5, "visibility headline", Duration::from_secs(300), Box::new(|_| criterion_5())),
        (6, "counting identities", Duration::from_secs(300), Box::new(|_| criterion_6())),
        (7, "physicality suite", Duration::from_secs(600), Box::new(|r| criterion_7(r))),
        (8, "determinism", Duration::from_secs(300), Box::new(|_| criterion_8(tmp.path()))),
    ];

    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut check = run(&mut reports);
        let elapsed = start.elapsed();
        check.ensure(elapsed <= limit, format!("took {elapsed:.1?}, limit {limit:?}"));
        let verdict = if check.failures.is_empty() { "PASS" } else { "FAIL" };
        if !check.failures.is_empty() {
            failed += 1;
        }
        println!("{verdict} criterion {id} ({name}) in {:.1} s", elapsed.as_secs_f64());
        for f in &check.failures {
            println!("    failed: {f}");
        }
        for n in &check.notes {
            println!("    {n}");
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
