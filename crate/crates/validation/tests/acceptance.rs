//! Acceptance criteria 1–13, one PASS/FAIL line each. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use jjsim_cli::{run, Command, Format, HolsteinVerb, RunConfig, UnitSystem};
use jjsim_core::dynamics::evolve;
use jjsim_core::eigen::dense_hermitian_eigen;
use jjsim_core::holstein::{
    adiabatic_ramp, cdw_structure_factor, density_profile, ground_state, holstein_hamiltonian, phase_scan,
    HolsteinSpec, RampPath, RampSchedule,
};
use jjsim_core::models::{free_fermion_hamiltonian, oscillator_hamiltonian, xxz_hamiltonian, Boundary};
use jjsim_core::modes::{analytic_spectrum, array_modes, asymptotic_chain_gap, com_quality, ArraySpec, Topology};
use jjsim_core::operator::{jw_fermion, site_operator, verify_fermion_algebra, SiteOp};
use jjsim_core::qed::{dressed_spectrum, excited_vacuum, jc_hamiltonian, QedSpec};
use jjsim_core::qed::excited_population;
use jjsim_core::units::{JunctionParams, FLUX_QUANTUM};
use jjsim_core::{HilbertSpec, Operator};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Junction with ω_p/2π = 10 GHz at the given bias, C = 1 pF.
fn junction(bias: f64, k: f64) -> JunctionParams {
    let c = 1e-12;
    let omega_p = 2.0 * PI * 10e9;
    let bare = omega_p / (1.0 - bias * bias).powf(0.25);
    let ic = bare * bare * FLUX_QUANTUM * c / (2.0 * PI);
    JunctionParams::new(ic, c, bias, k).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut at = (0, 0.0, 0.0);
    for n in 2..=200 {
        for k in [1.0, 5.0, 20.0] {
            for bias in [0.0, 0.5, 0.97] {
                let spec = ArraySpec::clean(Topology::Chain, n, junction(bias, k)).unwrap();
                let numeric = array_modes(&spec).unwrap().frequencies;
                let exact = analytic_spectrum(&spec).unwrap();
                for (a, b) in numeric.iter().zip(&exact) {
                    let rel = (a - b).abs() / b;
                    if rel > worst {
                        worst = rel;
                        at = (n, k, bias);
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-10 && within(t, 30.0),
        format!(
            "max relative error {worst:.2e} (at N={}, K={}, i_b={}), {:.1} s",
            at.0,
            at.1,
            at.2,
            t.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst_overlap = 0.0f64;
    for n in [2, 3, 10, 50, 100, 200] {
        for k in [1.0, 5.0, 20.0] {
            for bias in [0.0, 0.5, 0.97] {
                let spec = ArraySpec::clean(Topology::Chain, n, junction(bias, k)).unwrap();
                let b0 = array_modes(&spec).unwrap().mode(0);
                let overlap = (b0.sum() / (n as f64).sqrt()).powi(2) / b0.norm_squared();
                worst_overlap = worst_overlap.max(1.0 - overlap);
            }
        }
    }
    let mut worst_complete = 0.0f64;
    for n in 2..=50 {
        for k in [1.0, 5.0, 20.0] {
            for bias in [0.0, 0.5, 0.97] {
                let j = junction(bias, k);
                let spec = ArraySpec::clean(Topology::Complete, n, j).unwrap();
                let nu = array_modes(&spec).unwrap().frequencies;
                let upper = (1.0 + n as f64 * k * k / j.equilibrium_cos()).sqrt();
                worst_complete = worst_complete.max((nu[0] - 1.0).abs());
                for v in &nu[1..] {
                    worst_complete = worst_complete.max((v - upper).abs() / upper);
                }
            }
        }
    }
    outcome(
        worst_overlap <= 1e-12 && worst_complete < 1e-10,
        format!("chain 1 - overlap max {worst_overlap:.2e}; complete network max relative error {worst_complete:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let spec = ArraySpec::clean(Topology::Chain, 100, junction(0.97, 20.0)).unwrap();
    let g_over_omega_p = 50e6 / 10e9;
    let report = com_quality(&spec, g_over_omega_p, 10.0).unwrap();
    let t = start.elapsed();
    let n = report.n_max_for_margin.unwrap_or(0);
    outcome(
        (300..=500).contains(&n) && within(t, 1.0),
        format!("N limit {n}, {:.3} s", t.as_secs_f64()),
    )
}

fn criterion_4() -> Outcome {
    let j = junction(0.97, 20.0);
    let spec = ArraySpec::clean(Topology::Chain, 100, j).unwrap();
    let nu = array_modes(&spec).unwrap().frequencies;
    let exact = nu[1] - nu[0];
    let asym = asymptotic_chain_gap(100, 20.0, j.equilibrium_cos());
    let rel = (exact - asym).abs() / exact;
    // expansion parameter of the asymptotic form; it must be small for 1% agreement
    let x = PI * PI * 400.0 / (1e4 * j.equilibrium_cos());
    let first_ok = (100..100_000)
        .step_by(10)
        .find(|&n| {
            let s = ArraySpec::clean(Topology::Chain, n, j).unwrap();
            let nu = analytic_spectrum(&s).unwrap();
            let a = asymptotic_chain_gap(n, 20.0, j.equilibrium_cos());
            ((nu[1] - nu[0]) - a).abs() / (nu[1] - nu[0]) < 0.01
        })
        .unwrap_or(0);
    outcome(
        rel < 0.01,
        format!(
            "gap {exact:.6} vs asymptotic {asym:.6} ω_p, relative difference {rel:.2e}; \
             π²K²/(N²cosθ) = {x:.3}; 1% agreement first reached at N ≈ {first_ok}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut worst_algebra = 0.0f64;
    let mut worst_number = 0.0f64;
    for n in 1..=6 {
        worst_algebra = worst_algebra.max(verify_fermion_algebra(n).unwrap());
        let space = HilbertSpec::qubits(n).unwrap();
        for i in 0..n {
            let f = jw_fermion(&space, i).unwrap();
            let lhs = &f.adjoint() * &f;
            let rhs = &site_operator(&space, i, SiteOp::Sz).unwrap() + &Operator::identity(&space).scale(0.5.into());
            worst_number = worst_number.max((&lhs - &rhs).max_abs());
        }
    }
    let t = start.elapsed();
    outcome(
        worst_algebra < 1e-12 && worst_number < 1e-12 && within(t, 10.0),
        format!(
            "anticommutator defect {worst_algebra:.1e}, number identity defect {worst_number:.1e}, {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=8 {
        for (jxy, jz) in [(1.0, 0.0), (1.0, 1.0), (1.0, -0.5)] {
            let spin = xxz_hamiltonian(n, jxy, jz, 0.0, Boundary::Open).unwrap();
            let ferm = free_fermion_hamiltonian(n, jxy, jz, Boundary::Open).unwrap();
            let (a, _) = dense_hermitian_eigen(&spin.to_dense().unwrap());
            let (b, _) = dense_hermitian_eigen(&ferm.to_dense().unwrap());
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-10 && within(t, 60.0),
        format!("max spectral difference {worst:.1e}, {:.2} s", t.as_secs_f64()),
    )
}

fn criterion_7() -> Outcome {
    let g = 0.02;
    let spec = QedSpec::resonant(1.0, g);
    let times: Vec<f64> = (0..1000).map(|k| k as f64 * (2.0 * PI / g) / 999.0).collect();
    let h = jc_hamiltonian(&spec).unwrap();
    let pe_op = excited_population(h.space());
    let mut traj = evolve(&h, &excited_vacuum(&spec).unwrap(), &times).unwrap();
    traj.record("P_e", &pe_op).unwrap();
    let rabi = times
        .iter()
        .zip(traj.observable("P_e").unwrap())
        .map(|(t, p)| (p - (g * t).cos().powi(2)).abs())
        .fold(0.0, f64::max);

    let splitting = dressed_spectrum(&spec, &[0.0]).unwrap()[0].splitting;
    let split_err = (splitting - 2.0 * g).abs();

    // minimum of the detuned oscillation located numerically, then compared to 1 − g²/(g² + Δ²/4)
    let delta = 0.03;
    let detuned = QedSpec {
        qubit_bz: 1.0 + delta,
        ..spec
    };
    let hd = jc_hamiltonian(&detuned).unwrap();
    let psi = excited_vacuum(&detuned).unwrap();
    let pe_at = |t: f64| pe_op.expectation(&evolve(&hd, &psi, &[t]).unwrap().states[0]);
    let period = PI / (g * g + delta * delta / 4.0).sqrt();
    let grid: Vec<f64> = (0..1000).map(|k| k as f64 * period / 999.0).collect();
    let coarse = evolve(&hd, &psi, &grid).unwrap();
    let values: Vec<f64> = coarse.states.iter().map(|s| pe_op.expectation(s)).collect();
    let kmin = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    let (mut lo, mut hi) = (grid[kmin.saturating_sub(1)], grid[(kmin + 1).min(grid.len() - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if pe_at(a) < pe_at(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let measured = pe_at(0.5 * (lo + hi));
    let expected = 1.0 - g * g / (g * g + delta * delta / 4.0);
    let detuned_err = (measured - expected).abs();
    outcome(
        rabi < 1e-6 && split_err < 1e-10 && detuned_err < 1e-6,
        format!("cos² deviation {rabi:.1e}; splitting error {split_err:.1e}; detuned minimum {measured:.9} vs {expected:.9}"),
    )
}

/// S_π of the free open-chain ground state at half filling from the
/// occupied single-particle orbitals.
fn wick_structure_factor(n: usize) -> f64 {
    let phi = |k: usize, i: usize| {
        (2.0 / (n as f64 + 1.0)).sqrt() * (k as f64 * PI * (i as f64 + 1.0) / (n as f64 + 1.0)).sin()
    };
    let green = |i: usize, j: usize| (1..=n / 2).map(|k| phi(k, i) * phi(k, j)).sum::<f64>();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let corr = if i == j { 0.25 } else { -green(i, j).powi(2) };
            s += sign * corr;
        }
    }
    4.0 * s / (n * n) as f64
}

fn criterion_8() -> Outcome {
    let spec = HolsteinSpec::new(4, 1.0, 1.0, 0.0, 2);
    let h = holstein_hamiltonian(&spec).unwrap();
    let gs = ground_state(&h, &spec.sector().unwrap(), 1).unwrap();
    let e_err = (gs.energies[0] + 5f64.sqrt()).abs();
    let n_err = density_profile(&gs.states[0]).iter().map(|n| (n - 0.5).abs()).fold(0.0, f64::max);
    let s = cdw_structure_factor(&gs.states[0]);
    let oracle = wick_structure_factor(4);
    let s_err = (s - oracle).abs();
    outcome(
        e_err < 1e-10 && n_err < 1e-10 && s_err < 1e-8,
        format!("E0 error {e_err:.1e}; density deviation {n_err:.1e}; S_π {s:.10} vs Wick {oracle:.10}"),
    )
}

fn criterion_9() -> Outcome {
    let (n, omega, g) = (4, 1.0, 0.5);
    let spec = HolsteinSpec::new(n, 0.0, omega, g, 8);
    let h = holstein_hamiltonian(&spec).unwrap();
    let e0 = ground_state(&h, &spec.sector().unwrap(), 1).unwrap().energies[0];
    let exact = -(n as f64) * g * g / (4.0 * omega);
    let rel = ((e0 - exact) / exact).abs();
    outcome(rel < 1e-4, format!("E0 {e0:.10} vs {exact:.10}, relative error {rel:.1e}"))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let template = HolsteinSpec::new(4, 0.1, 1.0, 0.0, 4);
    let grid: Vec<f64> = (0..=16).map(|k| k as f64 * 0.25).collect();
    let rows = phase_scan(&template, &grid, &[0.1], 0).unwrap();
    let t = start.elapsed();
    let s: Vec<f64> = rows.iter().map(|r| r.cdw_order).collect();
    let monotone = s.windows(2).all(|w| w[1] >= w[0] - 1e-6);
    let s0 = s[0];
    let s4 = *s.last().unwrap();
    let gap4 = rows.last().unwrap().excitation_gap;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let checks = [
        ("monotone", monotone),
        ("S_π(0) < 0.3", s0 < 0.3),
        ("S_π(4) > 0.4", s4 > 0.4),
        ("gap(4) < 0.05ω", gap4 < 0.05),
        ("< 5 min", within(t, 300.0)),
        ("no failed points", failed == 0),
    ];
    let failing: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let curve: Vec<String> = grid.iter().zip(&s).map(|(g, v)| format!("{g}:{v:.4}")).collect();
    outcome(
        failing.is_empty(),
        format!(
            "S_π(0) = {s0:.6} (Wick oracle {:.6}), S_π(4) = {s4:.6}, gap(4) = {gap4:.2e} ω, monotone = {monotone}, {:.1} s; \
             failing: [{}]; curve g/ω:S_π {}",
            wick_structure_factor(4),
            t.as_secs_f64(),
            failing.join(", "),
            curve.join(" ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let spec = HolsteinSpec::new(4, 1.0, 1.0, 0.5, 3);
    let mut curve = Vec::new();
    let mut worst_drift = 0.0f64;
    let mut last = 0.0;
    for total_time in [0.0, 10.0, 20.0, 40.0, 80.0, 100.0] {
        let schedule = RampSchedule {
            total_time,
            steps: ((5.0 * total_time) as usize).max(1),
            path: RampPath::Linear,
            preparation_field: 2.0,
        };
        let out = adiabatic_ramp(&spec, &schedule).unwrap();
        worst_drift = worst_drift.max(out.number_drift);
        curve.push(format!("T={total_time}:{:.5}", out.fidelity));
        last = out.fidelity;
    }
    let bare = adiabatic_ramp(
        &spec,
        &RampSchedule {
            total_time: 40.0,
            steps: 200,
            path: RampPath::Linear,
            preparation_field: 0.0,
        },
    )
    .unwrap();
    outcome(
        last > 0.99 && worst_drift < 1e-10,
        format!(
            "fidelity curve (pinning field h=2) {}; max number drift {worst_drift:.1e}; without pinning field T=40 gives {:.4}",
            curve.join(" "),
            bare.fidelity
        ),
    )
}

fn criterion_12() -> Outcome {
    let (omega, n_max, levels) = (1.0, 60, 4);
    let residual = |lambda: f64| -> Vec<f64> {
        let m = oscillator_hamiltonian(n_max, omega, Some(lambda)).unwrap();
        let (e, _) = dense_hermitian_eigen(&m.hamiltonian.to_dense().unwrap());
        (0..levels)
            .map(|n| {
                let nf = n as f64;
                e[n] - (omega * (nf + 0.5) - lambda * (6.0 * nf * nf + 6.0 * nf + 3.0))
            })
            .collect()
    };
    let (full, half) = (residual(2e-4), residual(1e-4));
    let ratios: Vec<f64> = full.iter().zip(&half).map(|(a, b)| a / b).collect();
    let ok = ratios.iter().all(|r| (r - 4.0).abs() < 0.05);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(
        ok,
        format!("residual ratios on halving λ for n = 0..{}: [{}]", levels - 1, shown.join(", ")),
    )
}

fn run_into(dir: &Path, command: Command, seed: u64) -> Vec<(String, Vec<u8>)> {
    let cfg = RunConfig {
        command,
        output_dir: dir.to_path_buf(),
        seed,
        format: Format::Csv,
        unit_system: UnitSystem::Model,
        worker_count: 0,
        force: false,
        overrides: Vec::new(),
    };
    run(&cfg).expect("CLI run succeeds");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_13() -> Outcome {
    let work = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| -> PathBuf {
        let p = work.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let modes = write("modes.toml", "N = 20\nK = 5.0\nbias = 0.5\ndisorder = 0.02\ncoupling_over_omega_p = 0.005\n");
    let qed = write("qed.toml", "qubit_bz = 1.0\nresonator_freq = 1.0\ncoupling_g = 0.05\n");
    let holstein = write(
        "holstein.toml",
        "N = 4\nhopping = 0.5\nphonon_freq = 1.0\ncoupling = 1.0\nphonon_cutoff = 2\n\
         [ramp]\ntotal_time = 10.0\nsteps = 50\npreparation_field = 2.0\n\
         [scan]\ng_over_omega = [0.0, 1.0, 2.0]\nt_over_omega = [0.1, 0.5]\n",
    );
    let commands = vec![
        ("modes", Command::Modes { config: modes }),
        ("qed", Command::Qed { config: qed }),
        ("ground", Command::Holstein { verb: HolsteinVerb::Ground, config: holstein.clone() }),
        ("ramp", Command::Holstein { verb: HolsteinVerb::Ramp, config: holstein.clone() }),
        ("scan", Command::Holstein { verb: HolsteinVerb::Scan, config: holstein }),
    ];
    let mut mismatched = Vec::new();
    let mut files = 0;
    for (name, command) in commands {
        let a = run_into(&work.path().join(format!("{name}-a")), command.clone(), 42);
        let b = run_into(&work.path().join(format!("{name}-b")), command, 42);
        files += a.len();
        if a != b {
            mismatched.push(name);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("{files} files compared across 5 repeated runs; mismatches: {mismatched:?}"),
    )
}

fn main() {
    // `cargo test` passes harness flags; a filter argument selects criteria by number.
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(usize, &str, fn() -> Outcome); 13] = [
        (1, "spectrum equivalence", criterion_1),
        (2, "COM mode identity", criterion_2),
        (3, "scaling claim", criterion_3),
        (4, "gap asymptotics", criterion_4),
        (5, "fermion algebra", criterion_5),
        (6, "XXZ / Jordan-Wigner spectra", criterion_6),
        (7, "JC dynamics", criterion_7),
        (8, "Holstein free limit", criterion_8),
        (9, "Holstein atomic limit", criterion_9),
        (10, "CDW crossover signature", criterion_10),
        (11, "adiabatic protocol", criterion_11),
        (12, "anharmonic oscillator", criterion_12),
        (13, "determinism", criterion_13),
    ];
    let mut failures = Vec::new();
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let r = check();
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id:>2} ({name}): {}", r.detail);
        if !r.pass {
            failures.push(id);
        }
    }
    if failures.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failures:?}");
        std::process::exit(1);
    }
}
