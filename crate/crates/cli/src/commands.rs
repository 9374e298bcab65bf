//! Subcommand implementations. Each one returns its artifacts in memory so
//! nothing is written unless the whole computation succeeds.

use serde::Serialize;
use serde_json::json;

use jjsim_core::holstein::{
    adiabatic_ramp, cdw_structure_factor, density_profile, ground_state, holstein_hamiltonian, phase_scan,
    RampSchedule, CUTOFF_WARNING_WEIGHT,
};
use jjsim_core::modes::{analytic_spectrum, array_modes, com_quality, ArraySpec};
use jjsim_core::qed::{dressed_spectrum, excited_vacuum, rabi_trajectory, CUTOFF_OCCUPATION_LIMIT};
use jjsim_core::units::{plasma_frequency, JunctionParams};

use crate::config::{load_table, parse, HolsteinConfig, ModesConfig, QedConfig};
use crate::error::CliError;
use crate::output::{to_json_bytes, Cell, OutputDir, Table};
use crate::plot::{emit_plot_data, PlotSpec};
use crate::{Command, Format, HolsteinVerb, RunConfig, RunReport, UnitSystem};

#[derive(Default)]
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    warnings: Vec<String>,
}

impl Artifacts {
    fn table(&mut self, stem: &str, table: &Table, format: Format) -> Result<(), CliError> {
        match format {
            Format::Csv => self.files.push((format!("{stem}.csv"), table.to_csv()?)),
            Format::Json => self.files.push((format!("{stem}.json"), table.to_json()?)),
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.files.push((name.to_string(), to_json_bytes(value)?));
        Ok(())
    }

    fn plot(&mut self, table: &Table, spec: PlotSpec) -> Result<(), CliError> {
        let p = emit_plot_data(table, &spec)?;
        self.files.push((p.data_name, p.data.into_bytes()));
        self.files.push((p.script_name, p.script.into_bytes()));
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: String,
    config_file: String,
    seed: u64,
    format: Format,
    units: UnitSystem,
    workers: usize,
    overrides: &'a [String],
    parameters: serde_json::Value,
    outputs: Vec<String>,
}

pub(crate) fn dispatch(config: &RunConfig) -> Result<RunReport, CliError> {
    let table = load_table(config.input_path(), &config.overrides)?;
    let (command, parameters, artifacts) = match &config.command {
        Command::Modes { .. } => {
            let cfg: ModesConfig = parse(table, "modes")?;
            let (params, a) = modes(&cfg, config)?;
            ("modes".to_string(), params, a)
        }
        Command::Qed { .. } => {
            let cfg: QedConfig = parse(table, "qed")?;
            let (params, a) = qed(cfg.resolved(), config)?;
            ("qed".to_string(), params, a)
        }
        Command::Holstein { verb, .. } => {
            let cfg: HolsteinConfig = parse(table, "holstein")?;
            let cfg = cfg.resolved();
            let a = match verb {
                HolsteinVerb::Ground => holstein_ground(&cfg)?,
                HolsteinVerb::Ramp => holstein_ramp(&cfg, config)?,
                HolsteinVerb::Scan => holstein_scan(&cfg, config)?,
            };
            let verb = serde_json::to_value(verb).expect("enum serializes");
            let name = format!("holstein {}", verb.as_str().unwrap_or_default());
            (name, json!(cfg), a)
        }
    };

    let out = OutputDir::new(&config.output_dir, config.force);
    let mut names: Vec<String> = artifacts.files.iter().map(|(n, _)| n.clone()).collect();
    names.push("manifest.json".to_string());
    out.check_writable(&names)?;

    let manifest = Manifest {
        tool: "jjsim",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config_file: config.input_path().display().to_string(),
        seed: config.seed,
        format: config.format,
        units: config.unit_system,
        workers: config.worker_count,
        overrides: &config.overrides,
        parameters,
        outputs: names.clone(),
    };
    let mut written = Vec::new();
    for (name, bytes) in &artifacts.files {
        written.push(out.write(name, bytes)?);
    }
    written.push(out.write("manifest.json", &to_json_bytes(&manifest)?)?);
    Ok(RunReport {
        written,
        warnings: artifacts.warnings,
    })
}

fn modes(cfg: &ModesConfig, run: &RunConfig) -> Result<(serde_json::Value, Artifacts), CliError> {
    let junction = JunctionParams::new(cfg.critical_current, cfg.capacitance, cfg.bias, cfg.k)?;
    let mut spec = ArraySpec::clean(cfg.topology, cfg.n, junction)?;
    if cfg.disorder != 0.0 {
        spec = spec.with_vertical_disorder(cfg.disorder, run.seed)?;
    }
    let modes = array_modes(&spec)?;
    let omega_p = plasma_frequency(&junction);
    let analytic = if spec.is_clean() { Some(analytic_spectrum(&spec)?) } else { None };

    let (freq_col, scale) = match run.unit_system {
        UnitSystem::Model => ("nu_over_omega_p", 1.0),
        UnitSystem::Si => ("nu_rad_per_s", omega_p),
    };
    let mut columns = vec!["s".to_string(), freq_col.to_string(), "ratio_to_lowest".to_string()];
    if analytic.is_some() {
        columns.push(format!("analytic_{freq_col}"));
    }
    let mut table = Table::new(columns);
    let nu0 = modes.frequencies[0];
    for (s, &nu) in modes.frequencies.iter().enumerate() {
        let mut row = vec![Cell::from(s), Cell::from(nu * scale), Cell::from(nu / nu0)];
        if let Some(a) = &analytic {
            row.push(Cell::from(a[s] * scale));
        }
        table.push(row);
    }

    let mut a = Artifacts::default();
    a.table("modes", &table, run.format)?;
    a.plot(
        &table,
        PlotSpec {
            name: "modes_plot".into(),
            title: "normal-mode frequencies".into(),
            x: "s".into(),
            series: vec![freq_col.to_string()],
            group_by: None,
        },
    )?;
    if let Some(g) = cfg.coupling_over_omega_p {
        let report = com_quality(&spec, g, cfg.margin)?;
        a.json("com_quality.json", &report)?;
    }
    let params = json!({
        "config": cfg,
        "junction": junction,
        "plasma_frequency_rad_per_s": omega_p,
        "vertical_multipliers": spec.vertical_multipliers,
        "horizontal_multipliers": spec.horizontal_multipliers,
    });
    Ok((params, a))
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
    }
}

fn qed(cfg: QedConfig, run: &RunConfig) -> Result<(serde_json::Value, Artifacts), CliError> {
    let spec = cfg.spec();
    let traj_cfg = cfg.trajectory.expect("resolved");
    let spec_cfg = cfg.spectroscopy.expect("resolved");
    if traj_cfg.points < 1 || !(traj_cfg.t_max >= 0.0) {
        return Err(CliError::Schema("trajectory needs points >= 1 and t_max >= 0".into()));
    }
    let times = linspace(0.0, traj_cfg.t_max, traj_cfg.points);
    let traj = rabi_trajectory(&spec, &excited_vacuum(&spec)?, &times)?;
    let mut a = Artifacts::default();

    let mut table = Table::new(["t", "P_e", "n_phot", "N_exc"]);
    let series = |name: &str| traj.observable(name).expect("recorded by rabi_trajectory");
    for (k, &t) in times.iter().enumerate() {
        table.push(vec![
            Cell::from(t),
            Cell::from(series("P_e")[k]),
            Cell::from(series("n_phot")[k]),
            Cell::from(series("N_exc")[k]),
        ]);
    }
    let top = series("p_top").iter().copied().fold(0.0, f64::max);
    if top > CUTOFF_OCCUPATION_LIMIT {
        a.warnings.push(format!(
            "top Fock level population reached {top:e}; raise fock_cutoff"
        ));
    }
    a.table("trajectory", &table, run.format)?;
    a.plot(
        &table,
        PlotSpec {
            name: "trajectory_plot".into(),
            title: "vacuum Rabi oscillation".into(),
            x: "t".into(),
            series: vec!["P_e".into(), "n_phot".into()],
            group_by: None,
        },
    )?;

    let detunings = linspace(spec_cfg.detuning_min, spec_cfg.detuning_max, spec_cfg.points);
    let rows = dressed_spectrum(&spec, &detunings)?;
    let mut table = Table::new(["detuning", "E1", "E2", "E3", "E4", "splitting"]);
    for r in &rows {
        let mut row = vec![Cell::from(r.detuning)];
        row.extend(r.energies.iter().map(|&e| Cell::from(e)));
        row.push(Cell::from(r.splitting));
        table.push(row);
    }
    a.table("spectroscopy", &table, run.format)?;
    a.plot(
        &table,
        PlotSpec {
            name: "spectroscopy_plot".into(),
            title: "dressed single-excitation doublet".into(),
            x: "detuning".into(),
            series: vec!["E2".into(), "E3".into()],
            group_by: None,
        },
    )?;
    Ok((json!(cfg), a))
}

#[derive(Serialize)]
struct GroundReport {
    t_over_omega: f64,
    g_over_omega: f64,
    sector_dimension: usize,
    filling: usize,
    energies: Vec<f64>,
    residuals: Vec<f64>,
    excitation_gap: Option<f64>,
    cdw_order: f64,
    density_profile: Vec<f64>,
    top_level_weight: f64,
}

fn holstein_ground(cfg: &HolsteinConfig) -> Result<Artifacts, CliError> {
    let spec = cfg.spec();
    let h = holstein_hamiltonian(&spec)?;
    let sector = spec.sector()?;
    let k = cfg.states.clamp(1, sector.dim());
    let gs = ground_state(&h, &sector, k)?;
    let psi = &gs.states[0];
    let report = GroundReport {
        t_over_omega: spec.hopping / spec.phonon_freq,
        g_over_omega: spec.coupling / spec.phonon_freq,
        sector_dimension: sector.dim(),
        filling: spec.filling(),
        energies: gs.energies.clone(),
        residuals: gs.residuals.clone(),
        excitation_gap: gs.gap(),
        cdw_order: cdw_structure_factor(psi),
        density_profile: density_profile(psi),
        top_level_weight: psi.max_top_level_population(),
    };
    let mut a = Artifacts::default();
    if report.top_level_weight > CUTOFF_WARNING_WEIGHT {
        a.warnings.push(format!(
            "ground state puts {:e} on the top phonon level; raise phonon_cutoff",
            report.top_level_weight
        ));
    }
    a.json("ground.json", &report)?;
    Ok(a)
}

#[derive(Serialize)]
struct RampReport {
    schedule: RampSchedule,
    fidelity: f64,
    number_drift: f64,
    max_top_weight: f64,
    cutoff_warning: bool,
    final_density_profile: Vec<f64>,
    final_cdw_order: f64,
}

fn holstein_ramp(cfg: &HolsteinConfig, run: &RunConfig) -> Result<Artifacts, CliError> {
    let ramp = cfg
        .ramp
        .ok_or_else(|| CliError::Schema("holstein ramp needs a [ramp] table (missing key `ramp`)".into()))?;
    let schedule: RampSchedule = ramp.into();
    let out = adiabatic_ramp(&cfg.spec(), &schedule)?;
    let mut a = Artifacts::default();
    if out.cutoff_warning {
        a.warnings.push(format!(
            "top phonon level weight reached {:e} during the ramp; raise phonon_cutoff",
            out.max_top_weight
        ));
    }
    let dt = schedule.total_time / schedule.steps as f64;
    let mut table = Table::new(["step", "time", "fermion_number"]);
    for (k, &n) in out.number_history.iter().enumerate() {
        table.push(vec![Cell::from(k), Cell::from(k as f64 * dt), Cell::from(n)]);
    }
    a.table("ramp_number", &table, run.format)?;
    a.json(
        "ramp.json",
        &RampReport {
            schedule,
            fidelity: out.fidelity,
            number_drift: out.number_drift,
            max_top_weight: out.max_top_weight,
            cutoff_warning: out.cutoff_warning,
            final_density_profile: density_profile(&out.final_state),
            final_cdw_order: cdw_structure_factor(&out.final_state),
        },
    )?;
    Ok(a)
}

fn holstein_scan(cfg: &HolsteinConfig, run: &RunConfig) -> Result<Artifacts, CliError> {
    let scan = cfg
        .scan
        .as_ref()
        .ok_or_else(|| CliError::Schema("holstein scan needs a [scan] table (missing key `scan`)".into()))?;
    let points = phase_scan(&cfg.spec(), &scan.g_over_omega, &scan.t_over_omega, run.worker_count)?;
    let mut a = Artifacts::default();
    let mut columns: Vec<String> = ["t_over_omega", "g_over_omega", "E0", "gap", "S_pi"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    columns.extend((1..=cfg.n).map(|i| format!("n_{i}")));
    let mut table = Table::new(columns);
    for p in &points {
        if let Some(e) = &p.error {
            a.warnings.push(format!("scan point t/ω={}, g/ω={} failed: {e}", p.t_over_omega, p.g_over_omega));
        }
        let mut row = vec![
            Cell::from(p.t_over_omega),
            Cell::from(p.g_over_omega),
            Cell::from(p.ground_energy),
            Cell::from(p.excitation_gap),
            Cell::from(p.cdw_order),
        ];
        row.extend((0..cfg.n).map(|i| Cell::from(p.density_profile.get(i).copied().unwrap_or(f64::NAN))));
        table.push(row);
    }
    a.table("scan", &table, run.format)?;
    a.json("points.json", &points)?;
    a.plot(
        &table,
        PlotSpec {
            name: "scan_plot".into(),
            title: "staggered structure factor".into(),
            x: "g_over_omega".into(),
            series: vec!["S_pi".into()],
            group_by: Some("t_over_omega".into()),
        },
    )?;
    Ok(a)
}
