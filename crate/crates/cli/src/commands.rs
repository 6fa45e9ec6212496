//! Command implementations. Each returns the text summary it also writes
//! next to its CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use tfem_core::elements::validate::default_validation_grid;
use tfem_core::elements::{derive_ehp_matrices, derive_mcap_matrices, validate_printed_matrices};
use tfem_core::integrators::simulate_sampled;
use tfem_core::model::{sample_forcing, ForcingSpec};
use tfem_core::oracle::{convergence_order, exact_solution, series_error_norms};
use tfem_core::spectral::{period_elongation, spectral_report, SpectralReport};
use tfem_core::{build_step_matrices, AlgorithmId, Formalism, OscillatorParams};

use crate::config::{CommandKind, Config, ConfigError, ForcingChoice};
use crate::ingest::{load_record, IngestError};
use crate::output::{num, opt, write_file, Csv};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{0}")]
    Model(#[from] tfem_core::Error),
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    /// 1 for internal validation failures, 2 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Write { .. } => 1,
            _ => 2,
        }
    }
}

/// What a successful command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// Non-fatal notices (record shortfalls and the like).
    pub warnings: Vec<String>,
}

type Result<T> = std::result::Result<T, CliError>;

struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> Self {
        Output { dir: dir.to_path_buf(), files: Vec::new() }
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_file(&path, bytes).map_err(|e| CliError::Write { path: path.clone(), message: e.to_string() })?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run(cmd: CommandKind, cfg: &Config) -> Result<Outcome> {
    match cmd {
        CommandKind::Simulate => simulate(cfg),
        CommandKind::Spectrum => spectrum(cfg),
        CommandKind::PeTable => pe_table(cfg),
        CommandKind::Converge => converge(cfg),
        CommandKind::ValidateMatrices => validate_matrices(cfg),
    }
}

fn header(cmd: &str, cfg: &Config) -> String {
    let mut s = format!("# tfem {cmd}\n# resolved configuration\n");
    s.push_str(&cfg.to_text());
    s.push('\n');
    s
}

fn forcing_spec(cfg: &Config, warnings: &mut Vec<String>) -> Result<ForcingSpec> {
    Ok(match &cfg.forcing {
        ForcingChoice::Zero => ForcingSpec::Zero,
        ForcingChoice::Sinusoid { f0, omega0 } => ForcingSpec::Sinusoid { f0: *f0, omega0: *omega0 },
        ForcingChoice::Record(_) => {
            let src = cfg.record_source().expect("record forcing has a source");
            let (table, meta, w) = load_record(&src)?;
            warnings.extend(w);
            warnings.push(format!(
                "record {}: {} samples, {}, last t = {}",
                meta.source.display(),
                meta.n_points,
                match meta.native_dt {
                    Some(dt) => format!("dt = {dt}"),
                    None => "explicit times".into(),
                },
                table.last_time()
            ));
            ForcingSpec::Tabulated(table)
        }
    })
}

fn simulate(cfg: &Config) -> Result<Outcome> {
    let mut warnings = Vec::new();
    let forcing = forcing_spec(cfg, &mut warnings)?;
    let n = cfg.n_steps();
    let sampled = sample_forcing(&forcing, &cfg.params, cfg.h, n, cfg.jhat0)?;
    let mut out = Output::new(&cfg.out);
    let mut summary = header("simulate", cfg);
    let _ = writeln!(summary, "steps = {n}, final time = {}", n as f64 * cfg.h);

    // Closed form for the displacement when one exists; u does not depend
    // on the prior impulse.
    let reference: Option<Vec<f64>> = exact_solution(&cfg.params, &forcing, &cfg.ics, 0.0)
        .and_then(|r| r.ok())
        .map(|_| {
            (0..=n)
                .map(|k| {
                    exact_solution(&cfg.params, &forcing, &cfg.ics, k as f64 * cfg.h)
                        .expect("closed form exists")
                        .map(|s| s.u)
                })
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .transpose()?;
    if reference.is_none() {
        summary.push_str("no closed-form reference for this system and forcing\n");
    } else {
        summary.push_str("algorithm,final_abs_error,max_rel_error\n");
    }

    for &alg in &cfg.algs {
        let traj = simulate_sampled(alg, &cfg.params, &sampled, &cfg.ics)?;
        let mut csv = Csv::new(&["t", "u", "v", "J", "jhat", "energy"]);
        for k in 0..traj.len() {
            csv.row([traj.t[k], traj.u[k], traj.v[k], traj.j[k], traj.jhat[k], traj.energy[k]].map(num));
        }
        out.put(&format!("{}.csv", alg.name()), csv.as_str().as_bytes())?;
        if let Some(r) = &reference {
            let norms = series_error_norms(&traj.u, r);
            let _ = writeln!(summary, "{},{},{}", alg.name(), num((traj.u[n] - r[n]).abs()), num(norms.max_rel));
        } else {
            let _ = writeln!(summary, "{}: max |u| = {}", alg.name(), num(traj.max_abs_u()));
        }
    }
    out.put("simulate_summary.txt", summary.as_bytes())?;
    Ok(Outcome { summary, files: out.files, warnings })
}

const SPECTRUM_HEADER: [&str; 16] = [
    "alg",
    "h_over_tn",
    "damped",
    "rho",
    "pe",
    "ad",
    "det",
    "reversibility_residual",
    "regime",
    "closed_form_gap",
    "lambda1_re",
    "lambda1_im",
    "lambda2_re",
    "lambda2_im",
    "lambda3_re",
    "lambda3_im",
];

fn spectrum_row(r: &SpectralReport) -> Vec<String> {
    let mut row = vec![
        r.alg.name().to_string(),
        num(r.h_over_tn),
        r.damped.to_string(),
        num(r.rho),
        opt(r.pe),
        opt(r.ad),
        num(r.det),
        opt(r.reversibility_residual),
        r.regime.label().to_string(),
        opt(r.closed_form_gap),
    ];
    for i in 0..3 {
        match r.eigenvalues.get(i) {
            Some(z) => row.extend([num(z.re), num(z.im)]),
            None => row.extend([String::new(), String::new()]),
        }
    }
    row
}

fn spectrum(cfg: &Config) -> Result<Outcome> {
    let grid = cfg.grid.points();
    let mut csv = Csv::new(&SPECTRUM_HEADER);
    let mut summary = header("spectrum", cfg);
    summary.push_str("algorithm,damped,max_rho,h_over_tn_at_max,unstable_points\n");
    for &alg in &cfg.algs {
        for &damped in cfg.damping.flags() {
            let mut worst = (0.0f64, f64::NAN);
            let mut unstable = 0;
            for &x in &grid {
                match spectral_report(alg, &cfg.params, x, damped) {
                    Ok(r) => {
                        if r.rho > worst.0 {
                            worst = (r.rho, x);
                        }
                        if r.rho > 1.0 + 1e-12 {
                            unstable += 1;
                        }
                        csv.row(spectrum_row(&r));
                    }
                    Err(tfem_core::Error::SingularLeftMatrix { .. }) => {
                        let mut row = vec![alg.name().to_string(), num(x), damped.to_string()];
                        row.extend(std::iter::repeat_n(String::new(), 5));
                        row.push("singular".into());
                        row.extend(std::iter::repeat_n(String::new(), 7));
                        csv.row(row);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let _ = writeln!(summary, "{},{},{},{},{}", alg.name(), damped, num(worst.0), num(worst.1), unstable);
        }
    }
    let mut out = Output::new(&cfg.out);
    out.put("spectrum.csv", csv.as_str().as_bytes())?;
    out.put("spectrum_summary.txt", summary.as_bytes())?;
    Ok(Outcome { summary, files: out.files, warnings: Vec::new() })
}

fn pe_table(cfg: &Config) -> Result<Outcome> {
    let grid = cfg.grid.points();
    let mut header_row = vec!["h_over_tn".to_string()];
    header_row.extend(cfg.algs.iter().map(|a| a.name().to_string()));
    let mut csv = Csv::default();
    csv.row(header_row);
    let mut table = Vec::with_capacity(grid.len());
    for &x in &grid {
        let mut pes = Vec::with_capacity(cfg.algs.len());
        for &alg in &cfg.algs {
            let d = period_elongation(alg, x).map_err(|e| match e {
                tfem_core::Error::NoOscillatoryPair => CliError::Usage(format!(
                    "{} has no oscillatory eigenvalue pair at h/Tn = {x}; restrict the grid",
                    alg.name()
                )),
                other => other.into(),
            })?;
            pes.push(d.pe);
        }
        let mut row = vec![num(x)];
        row.extend(pes.iter().copied().map(num));
        csv.row(row);
        table.push(pes);
    }

    let mut summary = header("pe-table", cfg);
    summary.push_str("period elongation (T_numerical − Tn)/Tn as a ratio\n");
    let col = |alg: AlgorithmId| cfg.algs.iter().position(|a| *a == alg);
    if let Some(lin) = col(AlgorithmId::NewmarkLinear) {
        for alg in [AlgorithmId::EhpJquad, AlgorithmId::EhpUquad, AlgorithmId::McapJquad, AlgorithmId::McapUquad] {
            if let Some(i) = col(alg) {
                let gap = table.iter().map(|r| (r[i] - r[lin]).abs()).fold(0.0, f64::max);
                let _ = writeln!(summary, "max |pe({}) − pe(NewmarkLinear)| = {}", alg.name(), num(gap));
            }
        }
        for alg in [AlgorithmId::EhpUJquad, AlgorithmId::McapUJquad] {
            if let Some(i) = col(alg) {
                let below = table.iter().all(|r| r[i] < r[lin]);
                let _ = writeln!(summary, "pe({}) < pe(NewmarkLinear) at every point: {below}", alg.name());
            }
        }
    }
    if let Some(caa) = col(AlgorithmId::NewmarkCAA) {
        let largest = table
            .iter()
            .all(|r| r.iter().enumerate().all(|(i, v)| i == caa || r[caa] > *v));
        let _ = writeln!(summary, "pe(NewmarkCAA) largest at every point: {largest}");
    }
    let mut out = Output::new(&cfg.out);
    out.put("pe_table.csv", csv.as_str().as_bytes())?;
    out.put("pe_table_summary.txt", summary.as_bytes())?;
    Ok(Outcome { summary, files: out.files, warnings: Vec::new() })
}

fn converge(cfg: &Config) -> Result<Outcome> {
    let mut warnings = Vec::new();
    let forcing = forcing_spec(cfg, &mut warnings)?;
    let mut csv = Csv::new(&["alg", "h", "error", "final_error", "order", "excluded"]);
    let mut summary = header("converge", cfg);
    summary.push_str("algorithm,reference,stabilized_order\n");
    for &alg in &cfg.algs {
        let study = convergence_order(alg, &cfg.params, &forcing, &cfg.ics, cfg.h, cfg.levels, cfg.duration)?;
        for l in &study.levels {
            csv.row([
                alg.name().to_string(),
                num(l.h),
                num(l.max_error),
                num(l.final_error),
                opt(l.order),
                l.excluded.to_string(),
            ]);
        }
        let _ = writeln!(
            summary,
            "{},{},{}",
            alg.name(),
            if study.closed_form { "closed-form" } else { "rk4" },
            opt(study.stabilized_order())
        );
    }
    let mut out = Output::new(&cfg.out);
    out.put("convergence.csv", csv.as_str().as_bytes())?;
    out.put("converge_summary.txt", summary.as_bytes())?;
    Ok(Outcome { summary, files: out.files, warnings })
}

/// Parameter sets for the floating-point quadrature cross-check.
fn quadrature_samples() -> Vec<(OscillatorParams, f64)> {
    [(1.0, 0.0, 1.0, 1.0), (1.0, 0.2, 0.025, 0.01), (2.5, 0.7, 0.3, 0.2), (0.4, 1.3, 0.05, 0.05)]
        .into_iter()
        .map(|(m, c, a, h)| (OscillatorParams::new(m, c, a).expect("valid sample"), h))
        .collect()
}

fn validate_matrices(cfg: &Config) -> Result<Outcome> {
    let report = validate_printed_matrices(&default_validation_grid());
    let mut text = format!("{report}\n");
    let mut csv = Csv::default();
    csv.row([tfem_core::elements::ValidationReport::CSV_HEADER.to_string()]);
    for line in report.csv_lines() {
        csv.row([line]);
    }

    // Floating-point quadrature route against the published J-quadratic
    // matrices, which are reproduced exactly in rational arithmetic.
    let mut quad_ok = true;
    for (params, h) in quadrature_samples() {
        for alg in [AlgorithmId::EhpJquad, AlgorithmId::McapJquad] {
            let derived = match alg.formalism() {
                Formalism::Ehp => derive_ehp_matrices(alg, &params, h, false)?,
                _ => derive_mcap_matrices(alg, &params, h, false)?,
            };
            let built = build_step_matrices(alg, &params, h)?;
            let mut gap = 0.0f64;
            for (x, y) in [(&derived.a1, &built.a1), (&derived.a0, &built.a0), (&derived.b, &built.b)] {
                gap = gap.max(x.sub(y).max_abs() / y.max_abs().max(f64::MIN_POSITIVE));
            }
            let ok = gap <= 1e-12;
            quad_ok &= ok;
            let _ = writeln!(
                text,
                "quadrature {} m={} c={} a={} h={}: relative gap {} {}",
                alg.name(),
                params.m(),
                params.c(),
                params.a(),
                h,
                num(gap),
                if ok { "PASS" } else { "MISMATCH" }
            );
        }
    }
    let mut out = Output::new(&cfg.out);
    out.put("validation.csv", csv.as_str().as_bytes())?;
    out.put("validation.txt", text.as_bytes())?;
    if !report.is_consistent() || !quad_ok {
        let defects: Vec<String> = report
            .defects()
            .map(|r| format!("{} {} {} {}: {} vs {}", r.algorithm, r.check, r.sample, r.entry, r.printed, r.derived))
            .collect();
        return Err(CliError::Validation(format!(
            "matrix validation failed ({} defects{}):\n{}",
            defects.len(),
            if quad_ok { "" } else { ", quadrature mismatch" },
            defects.join("\n")
        )));
    }
    Ok(Outcome { summary: text, files: out.files, warnings: Vec::new() })
}
