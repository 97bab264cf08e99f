//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.
//!
//! Reference values are computed here, independently of the library routes
//! being checked: literal matrices, analytic pulse areas, raw commutator traces.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sun_coherence::algebra::{commutator, structure_constants, GeneratorSet, HermitianMatrix};
use sun_coherence::cli::verify::verify;
use sun_coherence::coherence::{
    eom_matrix_commutator, eom_matrix_torque, hamiltonian_to_torque, rho_to_coherence, CoherenceVector, DensityMatrix,
    EomMatrix, TorqueVector,
};
use sun_coherence::constants::closed_form_f_solution;
use sun_coherence::dynamics::{magnus_propagate, propagate_coherence_rk4, propagate_liouville, Trajectory};
use sun_coherence::pulse::{DetuningMode, PulseProfile, Shape, TimeGrid};
use sun_coherence::wei_norman::{
    adjoint_rotation_generators, bch_conjugate, integrate_wn, m_from_upsilon, wn_propagate, BchMode,
};
use sun_coherence::{CMatrix, RMatrix, C64};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Norm drifts of every trajectory produced along the way, for criterion 8.
#[derive(Default)]
struct NormLog(Vec<(String, f64)>);

impl NormLog {
    fn record(&mut self, label: &str, traj: &Trajectory) {
        let n0 = traj.states[0].norm_sq();
        let drift = traj.states.iter().map(|v| (v.norm_sq() - n0).abs()).fold(0.0, f64::max);
        self.0.push((label.to_string(), drift));
    }
}

fn literal_two_level_h(omega: f64, delta: f64) -> HermitianMatrix {
    let z = C64::new(0.0, 0.0);
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[z, C64::new(omega / 2.0, 0.0), C64::new(omega / 2.0, 0.0), C64::new(delta, 0.0)],
    );
    HermitianMatrix::new(m).unwrap()
}

fn literal_two_level_g(omega: f64, delta: f64) -> RMatrix {
    #[rustfmt::skip]
    let g = RMatrix::from_row_slice(3, 3, &[
        0.0,    delta,  0.0,
        -delta, 0.0,    -omega,
        0.0,    omega,  0.0,
    ]);
    g
}

fn two_level_g(omega: f64, delta: f64) -> EomMatrix {
    EomMatrix::new(literal_two_level_g(omega, delta), sun_coherence::coherence::Provenance::Torque)
}

/// `∫_{t0}^{t} sech((s−c)/w) ds`.
fn sech_area(t0: f64, t: f64, c: f64, w: f64) -> f64 {
    let prim = |s: f64| 2.0 * w * (((s - c) / (2.0 * w)).tanh()).atan();
    prim(t) - prim(t0)
}

/// Rows of the frame in which the proportional-detuning torque is `(ε, 0, 0)`.
fn f_frame_rows(omega0: f64, delta0: f64) -> Matrix3<f64> {
    let e = omega0.hypot(delta0);
    Matrix3::new(omega0 / e, 0.0, -delta0 / e, 0.0, 1.0, 0.0, delta0 / e, 0.0, omega0 / e)
}

fn to_v3(v: &CoherenceVector) -> Vector3<f64> {
    Vector3::new(v.0[0], v.0[1], v.0[2])
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    HermitianMatrix::new((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let report = verify(5, 100, 20_240_601).unwrap();
    let elapsed = start.elapsed();
    let worst = report.rows.iter().map(|r| r.max_route_gap).fold(0.0, f64::max);
    outcome(
        worst < 1e-10 && report.rows.len() == 4 && elapsed < Duration::from_secs(10),
        format!("N=2..5 x 100: max |g_commutator - g_torque| = {worst:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let gens = GeneratorSet::build(2).unwrap();
    let f = structure_constants(&gens).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let omega = rng.gen_range(-10.0..10.0);
        let delta = rng.gen_range(-10.0..10.0);
        let h = literal_two_level_h(omega, delta);
        let expected = literal_two_level_g(omega, delta);
        let by_comm = eom_matrix_commutator(&h, &gens).unwrap();
        let by_torque = eom_matrix_torque(&hamiltonian_to_torque(&h, &gens).unwrap(), &f).unwrap();
        let torque_literal = eom_matrix_torque(&TorqueVector::from_slice(&[omega, 0.0, -delta]), &f).unwrap();
        for g in [&by_comm.matrix, &by_torque.matrix, &torque_literal.matrix] {
            worst = worst.max((g - &expected).amax());
        }
    }
    outcome(worst <= 1e-14, format!("20 (Ω, Δ) pairs: max deviation {worst:.2e}"))
}

/// `Tr([G_a, G_b] G_c) / (4i)` straight from the matrices.
fn raw_structure_tensor(gens: &GeneratorSet) -> (Vec<f64>, f64) {
    let d = gens.len();
    let mut f = vec![0.0; d * d * d];
    let mut imag = 0.0_f64;
    for a in 0..d {
        for b in 0..d {
            let ab = commutator(&gens[a], &gens[b]);
            for c in 0..d {
                let z = (&ab * &gens[c]).trace() / C64::new(0.0, 4.0);
                imag = imag.max(z.im.abs());
                f[(a * d + b) * d + c] = z.re;
            }
        }
    }
    (f, imag)
}

fn criterion_3() -> Outcome {
    let gens = GeneratorSet::build(2).unwrap();
    let f = structure_constants(&gens).unwrap();
    let mut su2_exact = true;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let eps = ((a as i32 - b as i32) * (b as i32 - c as i32) * (c as i32 - a as i32)) as f64 / 2.0;
                su2_exact &= f.get(a, b, c) == eps;
            }
        }
    }

    let mut antisym = 0.0_f64;
    let mut jacobi = 0.0_f64;
    let mut library = 0.0_f64;
    for n in 3..=5 {
        let gens = GeneratorSet::build(n).unwrap();
        let lib = structure_constants(&gens).unwrap();
        let (raw, imag) = raw_structure_tensor(&gens);
        let d = gens.len();
        let at = |a: usize, b: usize, c: usize| raw[(a * d + b) * d + c];
        antisym = antisym.max(imag);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let x = at(a, b, c);
                    for y in [-at(b, a, c), -at(a, c, b), -at(c, b, a), at(b, c, a), at(c, a, b)] {
                        antisym = antisym.max((x - y).abs());
                    }
                    library = library.max((lib.get(a, b, c) - x).abs());
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let s: f64 = (0..d)
                            .map(|k| at(a, b, k) * at(k, c, e) + at(b, c, k) * at(k, a, e) + at(c, a, k) * at(k, b, e))
                            .sum();
                        jacobi = jacobi.max(s.abs());
                    }
                }
            }
        }
    }
    outcome(
        su2_exact && antisym < 1e-10 && jacobi < 1e-10 && library < 1e-10,
        format!(
            "SU(2) ε-tensor exact: {su2_exact}; SU(3..5) antisymmetry {antisym:.2e}, Jacobi {jacobi:.2e}, library vs raw {library:.2e}"
        ),
    )
}

fn criterion_4(log: &mut NormLog) -> Outcome {
    let gens = GeneratorSet::build(2).unwrap();
    let grid = TimeGrid::new(0.0, 10.0, 10_000).unwrap();
    let (omega0, delta0, c, w) = (1.3, 0.4, 5.0, 1.2);
    let q = |t: f64| (-0.5 * ((t - c) / w).powi(2)).exp();
    let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
    let v0 = rho_to_coherence(&rho0, &gens).unwrap();
    let liouville = propagate_liouville(&rho0, |t| literal_two_level_h(omega0 * q(t), delta0), &gens, &grid).unwrap();
    let rk4 = propagate_coherence_rk4(&v0, |t| two_level_g(omega0 * q(t), delta0), &grid).unwrap();
    log.record("liouville, gaussian", &liouville);
    log.record("rk4, gaussian", &rk4);
    let dev = liouville.max_deviation(&rk4);
    let moved = (rk4.last().0[2] - 1.0).abs();
    outcome(dev < 1e-8 && moved > 0.1, format!("Gaussian pulse, 1e4 steps: max deviation {dev:.2e}"))
}

fn criterion_5(log: &mut NormLog) -> Outcome {
    let (omega0, delta0, c, w) = (1.1, -0.6, 5.0, 0.8);
    let grid = TimeGrid::new(0.0, 10.0, 2_000).unwrap();
    let pulse =
        PulseProfile::new(Shape::Sech { center: c, width: w }, omega0, delta0, DetuningMode::Proportional).unwrap();
    let eps0 = omega0.hypot(delta0);
    let r = f_frame_rows(omega0, delta0);

    let v0 = CoherenceVector::from_slice(&[0.0, 0.0, 1.0]);
    let g = |t: f64| two_level_g(pulse.omega(t), pulse.delta(t));
    let magnus = magnus_propagate(&v0, g, &grid).unwrap();
    let rk4 = propagate_coherence_rk4(&v0, g, &grid).unwrap();
    let library_closed = closed_form_f_solution(&pulse, &grid).unwrap();
    log.record("magnus, sech proportional", &magnus);
    log.record("rk4, sech proportional", &rk4);
    log.record("closed form, sech proportional", &library_closed);

    let mut dev = 0.0_f64;
    let mut dev_library = 0.0_f64;
    let mut f1_drift = 0.0_f64;
    let mut f23_drift = 0.0_f64;
    let f1_0 = (delta0 / eps0).powi(2);
    let f23_0 = (omega0 / eps0).powi(2);
    for (k, t) in grid.times().enumerate() {
        let area = eps0 * sech_area(0.0, t, c, w);
        let expected = Vector3::new(-delta0 / eps0, -omega0 * area.sin() / eps0, omega0 * area.cos() / eps0);
        for traj in [&magnus, &rk4] {
            let f = r * to_v3(&traj.states[k]);
            f1_drift = f1_drift.max((f[0] * f[0] - f1_0).abs());
            f23_drift = f23_drift.max((f[1] * f[1] + f[2] * f[2] - f23_0).abs());
        }
        dev = dev.max((r * to_v3(&magnus.states[k]) - expected).amax());
        dev_library = dev_library.max((to_v3(&library_closed.states[k]) - expected).amax());
    }
    outcome(
        dev < 1e-8 && dev_library < 1e-8 && f1_drift < 1e-8 && f23_drift < 1e-8,
        format!(
            "Magnus vs closed form {dev:.2e} (library closed form {dev_library:.2e}); drift |F1|² {f1_drift:.2e}, F2²+F3² {f23_drift:.2e}"
        ),
    )
}

fn criterion_6(log: &mut NormLog) -> Outcome {
    let grid = TimeGrid::new(0.0, 12.0, 4_000).unwrap();
    let (theta, phi) = (1.1_f64, 0.7_f64);
    let v0 = CoherenceVector::from_slice(&[theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
    let q = |t: f64| (-0.5 * ((t - 6.0) / 1.5).powi(2)).exp();
    let rk4 = propagate_coherence_rk4(&v0, |t| two_level_g(2.0 * q(t), 0.0), &grid).unwrap();
    log.record("rk4, resonant gaussian", &rk4);
    let g1_0 = v0.0[0].powi(2);
    let g23_0 = v0.0[1].powi(2) + v0.0[2].powi(2);
    let mut g1 = 0.0_f64;
    let mut g23 = 0.0_f64;
    for v in &rk4.states {
        g1 = g1.max((v.0[0].powi(2) - g1_0).abs());
        g23 = g23.max((v.0[1].powi(2) + v.0[2].powi(2) - g23_0).abs());
    }
    outcome(g1 < 1e-8 && g23 < 1e-8, format!("Δ = 0: drift G1² {g1:.2e}, G2²+G3² {g23:.2e}"))
}

fn criterion_7(log: &mut NormLog) -> Outcome {
    let [f1, f2, f3] = adjoint_rotation_generators();

    // (a) conjugation identities at random angles
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bch = 0.0_f64;
    for _ in 0..100 {
        let u1: f64 = rng.gen_range(-PI..PI);
        let u2: f64 = rng.gen_range(-PI..PI);
        let inner_expected = f2 * u1.cos() + f3 * u1.sin();
        let nested_expected = f1 * u2.sin() - f2 * (u2.cos() * u1.sin()) + f3 * (u2.cos() * u1.cos());
        let reference_inner = (f1 * u1).exp() * f2 * (f1 * -u1).exp();
        let reference_nested = (f1 * u1).exp() * (f2 * u2).exp() * f3 * (f2 * -u2).exp() * (f1 * -u1).exp();
        let exact_inner = bch_conjugate(&(f1 * u1), &f2, BchMode::Exact).unwrap();
        let series_inner = bch_conjugate(&(f1 * u1), &f2, BchMode::Series(40)).unwrap();
        let exact_nested =
            bch_conjugate(&(f1 * u1), &bch_conjugate(&(f2 * u2), &f3, BchMode::Exact).unwrap(), BchMode::Exact)
                .unwrap();
        for m in [reference_inner, exact_inner, series_inner] {
            bch = bch.max((m - inner_expected).amax());
        }
        for m in [reference_nested, exact_nested] {
            bch = bch.max((m - nested_expected).amax());
        }
    }
    let a_ok = bch < 1e-12;

    // (b) torque (ε, 0, 0): only Υ1 moves and equals the pulse area
    let grid = TimeGrid::new(0.0, 10.0, 2_000).unwrap();
    let (eps0, c, w) = (1.7, 5.0, 0.9);
    let params = integrate_wn(|t| Vector3::new(eps0 / ((t - c) / w).cosh(), 0.0, 0.0), &grid, 1e-6).unwrap();
    let mut commuting = 0.0_f64;
    for (t, u) in grid.times().zip(&params.upsilon) {
        let area = eps0 * sech_area(0.0, t, c, w);
        let (s, co) = area.sin_cos();
        let expected = Matrix3::new(1.0, 0.0, 0.0, 0.0, co, -s, 0.0, s, co);
        commuting = commuting
            .max((m_from_upsilon(u) - expected).amax())
            .max((u[0] - area).abs())
            .max(u[1].abs())
            .max(u[2].abs());
    }
    let b_ok = commuting < 1e-10;

    // (c) constant detuning, Gaussian field
    let grid = TimeGrid::new(0.0, 10.0, 4_000).unwrap();
    let (omega0, delta0) = (1.2, 0.15);
    let q = |t: f64| (-0.5 * ((t - 5.0) / 1.0).powi(2)).exp();
    let torque = |t: f64| Vector3::new(omega0 * q(t), 0.0, -delta0);
    let params = integrate_wn(torque, &grid, 1e-6).unwrap();
    let v0 = CoherenceVector::from_slice(&[0.0, 0.0, 1.0]);
    let wn = wn_propagate(&v0, torque, &grid, 1e-6).unwrap();
    let rk4 = propagate_coherence_rk4(&v0, |t| two_level_g(omega0 * q(t), delta0), &grid).unwrap();
    log.record("wei-norman, constant-Δ gaussian", &wn);
    log.record("rk4, constant-Δ gaussian", &rk4);
    let dev = wn.max_deviation(&rk4);
    let c_ok = dev < 1e-6 && params.min_cos_upsilon2 > 1e-3;

    outcome(
        a_ok && b_ok && c_ok,
        format!(
            "(a) BCH {bch:.2e}; (b) commuting case {commuting:.2e}; (c) M v0 vs RK4 {dev:.2e}, min |cos Υ2| {:.3}",
            params.min_cos_upsilon2
        ),
    )
}

fn criterion_8(log: &mut NormLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pure = 0.0_f64;
    for n in 2..=5 {
        let gens = GeneratorSet::build(n).unwrap();
        let expected = 2.0 * (n as f64 - 1.0) / n as f64;
        for _ in 0..20 {
            let psi =
                nalgebra::DVector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let psi = &psi / C64::new(psi.norm(), 0.0);
            let rho = DensityMatrix::new(&psi * psi.adjoint()).unwrap();
            let v = rho_to_coherence(&rho, &gens).unwrap();
            pure = pure.max((v.norm_sq() - expected).abs());
        }
        // a pure state stays on the sphere under a random drive
        let h = random_hermitian(n, &mut rng);
        let grid = TimeGrid::new(0.0, 4.0, 2_000).unwrap();
        let q = |t: f64| (-0.5 * (t - 2.0).powi(2)).exp();
        let rho0 = DensityMatrix::basis_state(n, 0).unwrap();
        let traj = propagate_liouville(
            &rho0,
            |t| HermitianMatrix::hermitize(&(h.matrix() * C64::new(q(t), 0.0))),
            &gens,
            &grid,
        )
        .unwrap();
        let f = structure_constants(&gens).unwrap();
        let torque = hamiltonian_to_torque(&h, &gens).unwrap();
        let rk4 = propagate_coherence_rk4(
            &traj.states[0],
            |t| {
                let scaled = TorqueVector::new(&torque.components * q(t), 0.0);
                eom_matrix_torque(&scaled, &f).unwrap()
            },
            &grid,
        )
        .unwrap();
        for v in &traj.states {
            pure = pure.max((v.norm_sq() - expected).abs());
        }
        log.record(&format!("liouville, N={n} random"), &traj);
        log.record(&format!("rk4, N={n} random"), &rk4);
    }
    let (worst_label, worst) =
        log.0.iter().fold(("", 0.0_f64), |acc, (l, d)| if *d > acc.1 { (l.as_str(), *d) } else { acc });
    outcome(
        worst < 1e-8 && pure < 1e-8,
        format!(
            "{} trajectories: max |v|² drift {worst:.2e} ({worst_label}); pure-state |v|² - 2(N-1)/N {pure:.2e}",
            log.0.len()
        ),
    )
}

fn criterion_9(log: &mut NormLog) -> Outcome {
    let gens = GeneratorSet::build(2).unwrap();
    let omega = 1.7;
    let grid = TimeGrid::new(0.0, 4.0 * PI / omega, 4_000).unwrap();
    let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
    let v0 = CoherenceVector::from_slice(&[0.0, 0.0, 1.0]);
    let rk4 = propagate_coherence_rk4(&v0, |_| two_level_g(omega, 0.0), &grid).unwrap();
    let liouville = propagate_liouville(&rho0, |_| literal_two_level_h(omega, 0.0), &gens, &grid).unwrap();
    log.record("rk4, rabi", &rk4);
    log.record("liouville, rabi", &liouville);
    let rhos = liouville.rhos.as_ref().unwrap();
    let mut worst = 0.0_f64;
    for (k, t) in grid.times().enumerate() {
        let expected = (omega * t / 2.0).sin().powi(2);
        worst = worst
            .max(((1.0 - rk4.states[k].0[2]) / 2.0 - expected).abs())
            .max((rhos[k].matrix()[(1, 1)].re - expected).abs());
    }
    outcome(worst < 1e-6, format!("excited population vs sin²(Ωt/2) over two periods: {worst:.2e}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut log = NormLog::default();
    let results = vec![
        ("1 commutator/torque link", criterion_1()),
        ("2 two-level g matrix", criterion_2()),
        ("3 structure constants", criterion_3()),
        ("4 Liouville vs RK4", criterion_4(&mut log)),
        ("5 Magnus vs closed form", criterion_5(&mut log)),
        ("6 resonant invariants", criterion_6(&mut log)),
        ("7 Wei-Norman", criterion_7(&mut log)),
        ("8 norm conservation", criterion_8(&mut log)),
        ("9 Rabi flopping", criterion_9(&mut log)),
    ];
    let elapsed = start.elapsed();
    let mut all = true;
    for (name, o) in &results {
        println!("[{}] criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        all &= o.passed;
    }
    let fast = elapsed < Duration::from_secs(60);
    println!("[{}] suite runtime {:.2} s (limit 60 s)", if fast { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    if all && fast {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
