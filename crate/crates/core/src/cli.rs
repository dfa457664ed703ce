//! Command-line front end. Exit codes: 0 ok, 1 usage or configuration,
//! 2 algebra validation failure, 3 blow-up, 4 static ZCR failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{CommandFactory, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::algebra::{build_algebra, validate_algebra, AlgebraId};
use crate::config::RunConfig;
use crate::dynamics::{ModelSpec, System};
use crate::error::Error;
use crate::run::{run_to_directory, zcr_verify, MIN_ZCR_FACTOR, STATIC_TOL, ZCR_FLOOR};
use crate::stability::{band_edge_so3, compare_formula_so3, dispersion_roots_so3, dispersion_roots_sl2r};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;
pub const EXIT_ZCR_STATIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "gstrand", version, about = "G-Strand simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check antisymmetry, Jacobi, pairing and root data of a catalog algebra.
    AlgebraCheck {
        /// One of so3, sl2r, so4, se3, g2r.
        tag: String,
    },
    /// Run a configuration and write diagnostics.csv plus snapshots.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides `output.directory`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Same as simulate with the chiral system forced.
    Chiral {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the dispersion relation over a range of wavenumbers.
    Stability {
        #[arg(long, default_value = "so3")]
        algebra: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        m: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        n: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        k_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        k_max: f64,
        #[arg(long)]
        k_steps: usize,
        /// Also report the Jacobian growth of a compact so3 model with this c.
        #[arg(long, allow_negative_numbers = true)]
        compare_c: Option<f64>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the zero-curvature rows on a run and on a refined rerun.
    ZcrVerify {
        config: PathBuf,
        /// Use this value instead of r when forming b = r a (fault injection).
        #[arg(long, allow_negative_numbers = true)]
        tamper_r: Option<f64>,
    },
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match cli.command {
        Command::AlgebraCheck { tag } => algebra_check(&tag),
        Command::Simulate { config, out } => simulate(&config, out, false),
        Command::Chiral { config, out } => simulate(&config, out, true),
        Command::Stability {
            algebra,
            m,
            n,
            a,
            r,
            k_min,
            k_max,
            k_steps,
            compare_c,
            out,
        } => stability(&algebra, m, n, a, r, (k_min, k_max, k_steps), compare_c, out),
        Command::ZcrVerify { config, tamper_r } => zcr_verify_cmd(&config, tamper_r),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("GSTRAND_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("GSTRAND_THREADS must be a positive integer, got `{raw}`"))?;
    // a second initialization (e.g. repeated calls in one process) is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        _ => EXIT_USAGE,
    }
}

fn algebra_check(tag: &str) -> i32 {
    let id: AlgebraId = match tag.parse() {
        Ok(id) => id,
        Err(e) => {
            eprintln!("error: {e}\n");
            eprintln!("{}", Cli::command().render_help());
            return EXIT_USAGE;
        }
    };
    let report = validate_algebra(&build_algebra(id));
    print!("{report}");
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })?;
    RunConfig::parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn simulate(path: &PathBuf, out: Option<PathBuf>, chiral: bool) -> i32 {
    let mut cfg = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if chiral {
        cfg.system = System::Chiral;
    }
    let dir = out.unwrap_or_else(|| cfg.directory.clone());
    match run_to_directory(&cfg, &dir) {
        Ok(s) => {
            println!(
                "wrote {} records and {} snapshots to {} (t = {}, {} steps of {:e})",
                s.records,
                s.snapshots,
                dir.display(),
                s.final_t,
                s.steps,
                s.dt
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::BlowUp { t, .. } = e {
                eprintln!("partial diagnostics up to t = {t} are in {}", dir.display());
            }
            exit_code(&e)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn stability(
    algebra: &str,
    m: f64,
    n: f64,
    a: f64,
    r: f64,
    (k_min, k_max, k_steps): (f64, f64, usize),
    compare_c: Option<f64>,
    out: Option<PathBuf>,
) -> i32 {
    let fail = |msg: &str| {
        eprintln!("error: {msg}");
        EXIT_USAGE
    };
    let id: AlgebraId = match algebra.parse() {
        Ok(id) => id,
        Err(e) => return fail(&e.to_string()),
    };
    if ![m, n, a, r, k_min, k_max].iter().all(|v| v.is_finite()) {
        return fail("all numeric flags must be finite");
    }
    if k_steps == 0 || k_min > k_max {
        return fail("need k_min <= k_max and k_steps >= 1");
    }
    match id {
        AlgebraId::So3 => {}
        AlgebraId::Sl2r if m == 0.0 && n == 0.0 => {}
        AlgebraId::Sl2r => return fail("the sl2r relation is available for m = n = 0 only"),
        other => return fail(&format!("no dispersion relation for {other}")),
    }
    let model = match compare_c {
        Some(c) if id == AlgebraId::So3 => {
            match ModelSpec::so3(std::sync::Arc::new(build_algebra(AlgebraId::So3)), r, a, c, [0.0, 0.0, 1.0]) {
                Ok(m) => Some(m),
                Err(e) => return fail(&e.to_string()),
            }
        }
        Some(_) => return fail("--compare-c applies to so3 only"),
        None => None,
    };

    let params = format!("algebra={id} m={m} n={n} a={a} r={r} k_min={k_min} k_max={k_max} k_steps={k_steps}");
    let mut text = String::new();
    text.push_str(&format!("# params_sha256={}\n", hex::encode(Sha256::digest(params.as_bytes()))));
    text.push_str(&format!("# {params}\n"));
    if id == AlgebraId::So3 {
        match band_edge_so3(m, n, a) {
            Some(k) if m * m - 2.0 * a * n > 0.0 => text.push_str(&format!("# band_edge_k={k:.16e}\n")),
            _ => text.push_str("# band_edge_k=none\n"),
        }
    }
    let mut header = String::from("k");
    for i in 0..6 {
        header.push_str(&format!(",re{i},im{i}"));
    }
    header.push_str(",max_growth,stable,edge");
    if model.is_some() {
        header.push_str(",jacobian_max_growth,root_distance");
    }
    text.push_str(&header);
    text.push('\n');
    let mut prev: Option<bool> = None;
    for i in 0..k_steps {
        let k = if k_steps == 1 {
            k_min
        } else {
            k_min + (k_max - k_min) * i as f64 / (k_steps - 1) as f64
        };
        let res = match id {
            AlgebraId::So3 => dispersion_roots_so3(m, n, a, r, k),
            _ => dispersion_roots_sl2r(a, r, k),
        };
        let edge = prev.is_some_and(|p| p != res.stable);
        prev = Some(res.stable);
        let mut row = format!("{k:.16e}");
        for z in res.omega_roots {
            row.push_str(&format!(",{:.16e},{:.16e}", z.re + 0.0, z.im + 0.0));
        }
        row.push_str(&format!(",{:.16e},{},{}", res.max_growth, res.stable as u8, edge as u8));
        if let Some(model) = &model {
            match compare_formula_so3(m, n, model, k) {
                Ok(c) => row.push_str(&format!(",{:.16e},{:.16e}", c.jacobian.max_growth, c.root_distance)),
                Err(e) => return fail(&e.to_string()),
            }
        }
        text.push_str(&row);
        text.push('\n');
    }
    match out {
        Some(p) => {
            if let Err(e) = fs::write(&p, text) {
                return fail(&format!("cannot write {}: {e}", p.display()));
            }
        }
        None => {
            let mut so = std::io::stdout().lock();
            let _ = so.write_all(text.as_bytes());
        }
    }
    EXIT_OK
}

fn zcr_verify_cmd(path: &PathBuf, tamper_r: Option<f64>) -> i32 {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let report = match zcr_verify(&cfg, tamper_r) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let s = &report.static_rows;
    println!("# config_sha256={}", cfg.hash());
    println!(
        "static rows (max over snapshots): l2 {:.3e}  l3 {:.3e}  l4 {:.3e}  scale {:.3e}",
        s.row2, s.row3, s.row4, s.scale
    );
    println!("lambda, residual N={}, residual N={}, factor", report.coarse_n, report.fine_n);
    for i in 0..report.lambdas.len() {
        println!(
            "{}, {:.6e}, {:.6e}, {:.3}",
            report.lambdas[i], report.coarse[i], report.fine[i], report.factors[i]
        );
    }
    if !report.static_pass() {
        let limit = STATIC_TOL * (1.0 + s.scale);
        let failing: Vec<String> = [("l2", s.row2), ("l3", s.row3), ("l4", s.row4)]
            .iter()
            .filter(|(_, v)| !(*v <= limit))
            .map(|(name, v)| format!("{name} ({v:.3e})"))
            .collect();
        eprintln!("static ZCR rows fail: {}; check the b = r a wiring", failing.join(", "));
        return EXIT_ZCR_STATIC;
    }
    if !report.dynamic_pass() {
        eprintln!(
            "dynamic rows decay by less than {MIN_ZCR_FACTOR} under refinement (floor {ZCR_FLOOR:e})"
        );
        return EXIT_USAGE;
    }
    println!("ok");
    EXIT_OK
}
