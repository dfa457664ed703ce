//! Run orchestration shared by the command-line tool and the C interface.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{build_algebra, AlgebraId};
use crate::config::{InitialCondition, RunConfig, TimeStep};
use crate::diagnostics::{conserved_so3, energy, mu_par_advect_err, DiagnosticsRecord};
use crate::dynamics::{cfl_dt, perturb, step_rk4, ModelSpec, StrandState, System};
use crate::error::{Error, Result};
use crate::zcr::{curvature_residual, static_state, StaticResiduals};

pub fn build_model(cfg: &RunConfig) -> Result<ModelSpec> {
    let table = Arc::new(build_algebra(cfg.algebra));
    let model = match (cfg.system, cfg.algebra) {
        (System::Chiral, _) => ModelSpec::chiral(table),
        (System::Compact, AlgebraId::So3) => {
            if cfg.a.len() != 1 || cfg.c.len() != 1 {
                return Err(Error::Config {
                    line: None,
                    field: "model.a".into(),
                    message: "so3 takes one a and one c coefficient".into(),
                });
            }
            ModelSpec::so3(table, cfg.r, cfg.a[0], cfg.c[0], cfg.axis.unwrap_or([0.0, 0.0, 1.0]))?
        }
        (system, _) => ModelSpec::hamiltonian(table, system, cfg.r, &cfg.a, &cfg.c)?,
    };
    Ok(model.with_parallel(cfg.parallel))
}

/// Unit direction used for constant backgrounds: the axis for so(3), else `a`
/// normalized, else the first Cartan (or first basis) coordinate.
fn background_direction(model: &ModelSpec) -> Vec<f64> {
    if let Some(p) = model.so3_params() {
        return p.axis.to_vec();
    }
    let len = model.a.norm();
    if len > 0.0 {
        return model.a.coeffs.iter().map(|v| v / len).collect();
    }
    let mut e = vec![0.0; model.dim()];
    let idx = model.table.cartan_indices.first().copied().unwrap_or(0);
    e[idx] = 1.0;
    e
}

fn constant_state(model: &ModelSpec, cfg: &RunConfig, m: f64, n: f64) -> Result<StrandState> {
    let dir = background_direction(model);
    let d = model.dim();
    let mut st = StrandState::zeros(model.algebra(), d, cfg.n, cfg.length)?;
    for j in 0..cfg.n {
        for k in 0..d {
            st.mu[j * d + k] = m * dir[k];
            st.gamma[j * d + k] = n * dir[k];
        }
    }
    Ok(st)
}

fn random_state(model: &ModelSpec, cfg: &RunConfig, amp: f64, max_mode: usize) -> Result<StrandState> {
    let d = model.dim();
    let mut st = StrandState::zeros(model.algebra(), d, cfg.n, cfg.length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let two_pi = 2.0 * std::f64::consts::PI;
    for field in 0..2 {
        for k in 0..d {
            let c0 = rng.gen_range(-amp..=amp);
            let modes: Vec<(f64, f64, f64)> = (1..=max_mode)
                .map(|q| {
                    let q = q as f64;
                    (q, rng.gen_range(-amp..=amp) / q, rng.gen_range(0.0..two_pi))
                })
                .collect();
            for j in 0..cfg.n {
                let s = st.position(j) / cfg.length;
                let v = c0 + modes.iter().map(|(q, a, ph)| a * (two_pi * q * s + ph).sin()).sum::<f64>();
                let target = if field == 0 { &mut st.mu } else { &mut st.gamma };
                target[j * d + k] = v;
            }
        }
    }
    Ok(st)
}

/// Read `j, mu..., gamma...` lines; `#` starts a comment.
pub fn read_state_file(path: &Path, model: &ModelSpec, n: usize, length: f64) -> Result<StrandState> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let d = model.dim();
    let mut st = StrandState::zeros(model.algebra(), d, n, length)?;
    let mut seen = 0;
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Config {
            line: Some(idx + 1),
            field: path.display().to_string(),
            message: msg,
        };
        let vals: Vec<&str> = body.split(',').map(str::trim).collect();
        if vals.len() != 1 + 2 * d {
            return Err(bad(format!("expected {} values, found {}", 1 + 2 * d, vals.len())));
        }
        let j: usize = vals[0].parse().map_err(|_| bad(format!("bad index `{}`", vals[0])))?;
        if j != seen || j >= n {
            return Err(bad(format!("expected point {seen}, found {j}")));
        }
        for (i, v) in vals[1..].iter().enumerate() {
            let x: f64 = v.parse().map_err(|_| bad(format!("`{v}` is not a number")))?;
            if !x.is_finite() {
                return Err(bad("values must be finite".into()));
            }
            if i < d {
                st.mu[j * d + i] = x;
            } else {
                st.gamma[j * d + i - d] = x;
            }
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::Config {
            line: None,
            field: path.display().to_string(),
            message: format!("found {seen} points, grid has {n}"),
        });
    }
    Ok(st)
}

pub fn initial_state(cfg: &RunConfig, model: &ModelSpec) -> Result<StrandState> {
    match &cfg.initial {
        InitialCondition::Equilibrium { m, n } => constant_state(model, cfg, *m, *n),
        InitialCondition::FourierModes { m, n, modes } => {
            let mut st = constant_state(model, cfg, *m, *n)?;
            for md in modes {
                st = perturb(&st, md.field, md.k as f64, md.amplitude, &md.direction)?;
            }
            Ok(st)
        }
        InitialCondition::Random { amplitude, max_mode } => random_state(model, cfg, *amplitude, *max_mode),
        InitialCondition::File(p) => read_state_file(p, model, cfg.n, cfg.length),
    }
}

/// Step size and step count: the count is rounded up to a multiple of the
/// cadence and the step shrunk so the run ends exactly at `t_end`.
pub fn time_grid(cfg: &RunConfig, model: &ModelSpec, initial: &StrandState) -> Result<(f64, usize)> {
    let bound = match cfg.time_step {
        TimeStep::Cfl(cfl) => cfl_dt(initial, model, cfl)?,
        TimeStep::Fixed(dt) => dt,
    };
    let raw = (cfg.t_end / bound - 1e-9).ceil().max(1.0) as usize;
    let steps = raw.div_ceil(cfg.cadence) * cfg.cadence;
    Ok((cfg.t_end / steps as f64, steps))
}

/// A configured run that can be advanced step by step.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: RunConfig,
    model: ModelSpec,
    initial: StrandState,
    state: StrandState,
    dt: f64,
    total_steps: usize,
    steps_done: usize,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let model = build_model(&config)?;
        let initial = initial_state(&config, &model)?;
        let (dt, total_steps) = time_grid(&config, &model, &initial)?;
        Ok(Simulation {
            config,
            model,
            state: initial.clone(),
            initial,
            dt,
            total_steps,
            steps_done: 0,
        })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Simulation::new(RunConfig::parse(text)?)
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn state(&self) -> &StrandState {
        &self.state
    }

    pub fn initial(&self) -> &StrandState {
        &self.initial
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn steps_done(&self) -> usize {
        self.steps_done
    }

    pub fn finished(&self) -> bool {
        self.steps_done >= self.total_steps
    }

    /// Advance up to `count` steps, stopping at the end of the run.
    /// Returns the number of steps taken.
    pub fn advance(&mut self, count: usize) -> Result<usize> {
        let todo = count.min(self.total_steps - self.steps_done);
        for _ in 0..todo {
            self.state = step_rk4(&self.state, &self.model, self.dt)?;
            self.steps_done += 1;
        }
        Ok(todo)
    }

    /// Diagnostics of the current state, without curvature residuals.
    pub fn record(&self) -> Result<DiagnosticsRecord> {
        record_for(&self.initial, &self.state, &self.model)
    }
}

pub fn record_for(initial: &StrandState, state: &StrandState, model: &ModelSpec) -> Result<DiagnosticsRecord> {
    let so3 = model.so3_params().is_some();
    Ok(DiagnosticsRecord {
        t: state.t,
        conserved: if so3 { Some(conserved_so3(state, model)?) } else { None },
        energy: if model.system == System::Chiral { None } else { Some(energy(state, model)?) },
        mu_par_err: if so3 { Some(mu_par_advect_err(initial, state, model)?) } else { None },
        zcr_residuals: Vec::new(),
    })
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn csv_header(lambdas: &[f64]) -> String {
    let mut h = String::from("t,C1,C2,C3,h,mu_par_err");
    for l in lambdas {
        h.push_str(&format!(",zcr_res_{l}"));
    }
    h
}

pub fn csv_row(rec: &DiagnosticsRecord, n_lambdas: usize) -> String {
    let c = rec.conserved;
    let mut fields = vec![
        num(rec.t),
        opt(c.map(|c| c[0])),
        opt(c.map(|c| c[1])),
        opt(c.map(|c| c[2])),
        opt(rec.energy),
        opt(rec.mu_par_err),
    ];
    for i in 0..n_lambdas {
        fields.push(opt(rec.zcr_residuals.get(i).copied()));
    }
    fields.join(",")
}

pub fn write_snapshot(path: &Path, state: &StrandState, hash: &str) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# config_sha256={hash}")?;
    writeln!(w, "# t={}", num(state.t))?;
    for j in 0..state.n {
        let mut line = j.to_string();
        for v in state.mu_at(j).iter().chain(state.gamma_at(j)) {
            line.push_str(", ");
            line.push_str(&num(*v));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub records: usize,
    pub snapshots: usize,
    pub final_t: f64,
    pub steps: usize,
    pub dt: f64,
}

/// Run to completion, writing `diagnostics.csv` and optional snapshots into
/// `dir`. On blow-up the rows recorded so far are written before the error is
/// returned.
pub fn run_to_directory(cfg: &RunConfig, dir: &Path) -> Result<RunSummary> {
    let mut sim = Simulation::new(cfg.clone())?;
    fs::create_dir_all(dir)?;
    let hash = cfg.hash();
    let snap_dir = dir.join("snapshots");
    if cfg.snapshots {
        fs::create_dir_all(&snap_dir)?;
    }
    let csv_path = dir.join("diagnostics.csv");
    let mut csv = BufWriter::new(fs::File::create(&csv_path)?);
    writeln!(csv, "# config_sha256={hash}")?;
    writeln!(csv, "{}", csv_header(&cfg.lambdas))?;
    let quadratic = cfg.system != System::Chiral;
    let nl = cfg.lambdas.len();

    // rows wait for the following record so that the curvature residual can
    // use centered differences
    let mut window: Vec<StrandState> = Vec::with_capacity(3);
    let mut pending: Option<DiagnosticsRecord> = None;
    let mut records = 0;
    let mut snapshots = 0;
    let mut outcome = Ok(());
    loop {
        let st = sim.state().clone();
        if cfg.snapshots {
            write_snapshot(&snap_dir.join(format!("snap_{snapshots:06}.txt")), &st, &hash)?;
            snapshots += 1;
        }
        let rec = sim.record()?;
        window.push(st);
        if window.len() > 3 {
            window.remove(0);
        }
        if let Some(mut prev) = pending.take() {
            if quadratic && window.len() == 3 {
                let res = curvature_residual(&window, sim.model(), &cfg.lambdas)?;
                prev.zcr_residuals = res.residuals[0].clone();
            }
            writeln!(csv, "{}", csv_row(&prev, nl))?;
            records += 1;
        }
        pending = Some(rec);
        if sim.finished() {
            break;
        }
        if let Err(e) = sim.advance(cfg.cadence) {
            outcome = Err(e);
            break;
        }
    }
    if let Some(last) = pending {
        writeln!(csv, "{}", csv_row(&last, nl))?;
        records += 1;
    }
    csv.flush()?;
    outcome?;
    let summary = RunSummary {
        csv: csv_path,
        records,
        snapshots,
        final_t: sim.state().t,
        steps: sim.steps_done(),
        dt: sim.dt(),
    };
    fs::write(dir.join("config.txt"), cfg.serialize())?;
    Ok(summary)
}

/// Snapshots at the configured cadence, kept in memory.
pub fn collect_trajectory(cfg: &RunConfig) -> Result<(ModelSpec, Vec<StrandState>, f64)> {
    let mut sim = Simulation::new(cfg.clone())?;
    let mut out = vec![sim.state().clone()];
    while !sim.finished() {
        sim.advance(cfg.cadence)?;
        out.push(sim.state().clone());
    }
    Ok((sim.model().clone(), out, sim.dt()))
}

/// Decay factor demanded from the dynamic rows between the two resolutions.
pub const MIN_ZCR_FACTOR: f64 = 3.5;
/// Coarse residuals below this are treated as already converged.
pub const ZCR_FLOOR: f64 = 1e-12;
pub const STATIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ZcrVerifyReport {
    pub static_rows: StaticResiduals,
    pub lambdas: Vec<f64>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub factors: Vec<f64>,
    pub coarse_n: usize,
    pub fine_n: usize,
}

impl ZcrVerifyReport {
    pub fn static_pass(&self) -> bool {
        self.static_rows.passes(STATIC_TOL)
    }

    pub fn dynamic_pass(&self) -> bool {
        self.coarse
            .iter()
            .zip(&self.factors)
            .all(|(c, f)| *c <= ZCR_FLOOR || *f >= MIN_ZCR_FACTOR)
    }
}

/// Run the configuration at its own resolution and at twice the points with
/// half the step, then compare curvature residuals. `tamper_r` replaces the
/// `r` in `b = r a` for the static rows.
pub fn zcr_verify(cfg: &RunConfig, tamper_r: Option<f64>) -> Result<ZcrVerifyReport> {
    if cfg.system == System::Chiral {
        return Err(Error::Unsupported("quadratic ZCR not applicable to the chiral model".into()));
    }
    if matches!(cfg.initial, InitialCondition::File(_)) {
        return Err(Error::Unsupported("initial data from a file cannot be refined".into()));
    }
    let (model, coarse_traj, dt) = collect_trajectory(cfg)?;
    if coarse_traj.len() < 3 {
        return Err(Error::InsufficientSnapshots {
            found: coarse_traj.len(),
            min: 3,
        });
    }
    let mut fine_cfg = cfg.clone();
    fine_cfg.n = cfg.n * 2;
    fine_cfg.time_step = TimeStep::Fixed(dt / 2.0);
    let (_, fine_traj, _) = collect_trajectory(&fine_cfg)?;

    let r_b = tamper_r.unwrap_or(model.r);
    let mut static_rows = static_state(&coarse_traj[0], &model, r_b)?;
    for st in coarse_traj.iter().skip(1) {
        let s = static_state(st, &model, r_b)?;
        static_rows = StaticResiduals {
            row2: static_rows.row2.max(s.row2),
            row3: static_rows.row3.max(s.row3),
            row4: static_rows.row4.max(s.row4),
            scale: static_rows.scale.max(s.scale),
        };
    }
    let fine_model = build_model(&fine_cfg)?;
    let coarse = curvature_residual(&coarse_traj, &model, &cfg.lambdas)?.max_per_lambda();
    let fine = curvature_residual(&fine_traj, &fine_model, &cfg.lambdas)?.max_per_lambda();
    let factors = coarse.iter().zip(&fine).map(|(c, f)| c / f).collect();
    Ok(ZcrVerifyReport {
        static_rows,
        lambdas: cfg.lambdas.clone(),
        coarse,
        fine,
        factors,
        coarse_n: cfg.n,
        fine_n: fine_cfg.n,
    })
}
