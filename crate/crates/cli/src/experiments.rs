//! Turns a validated config into tables, plots and a summary.

use std::path::{Path, PathBuf};

use zeno_core::dynamics::energy_variance;
use zeno_core::ld::{
    self, cramer_rate, disorder_gain_with, qze_condition, rate_function_i, survival_estimates,
    survival_estimates_continuous, RateCurve, SurvivalEstimates,
};
use zeno_core::units::parse_time;
use zeno_core::{
    empirical_rate, run_ensemble, DiscreteIntervals, EnsembleConfig, EnsembleMode, Hamiltonian,
    IntervalDistribution, LdProblem, PureState, QuadConfig, SurvivalKernel, ZenoError,
};

use crate::config::{ExperimentConfig, ExperimentKind, ModeSpec};
use crate::error::CliError;
use crate::output::{write_csv, Cell, Plot, Provenance, Series, Style, Table};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for relative output paths.
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub csv: PathBuf,
    pub table: Table,
    pub svg: Option<(PathBuf, Plot)>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub artifacts: Vec<Artifact>,
    pub summary: Vec<(String, String)>,
    pub provenance: Provenance,
}

impl Report {
    pub fn write(&self) -> Result<(), CliError> {
        for a in &self.artifacts {
            write_csv(&a.csv, &self.provenance, &a.table)?;
            if let Some((path, plot)) = &a.svg {
                plot.write(path)?;
            }
        }
        Ok(())
    }

    pub fn summary_table(&self) -> String {
        let width = self.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.summary {
            out.push_str(&format!("{k:width$}  {v}\n"));
        }
        for a in &self.artifacts {
            out.push_str(&format!("{:width$}  {}\n", "wrote", a.csv.display()));
            if let Some((p, _)) = &a.svg {
                out.push_str(&format!("{:width$}  {}\n", "wrote", p.display()));
            }
        }
        out
    }
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    h: Hamiltonian,
    psi: PureState,
    kernel: SurvivalKernel,
    seed: u64,
    workers: Option<usize>,
    out_dir: Option<PathBuf>,
}

impl Context<'_> {
    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn with_suffix(&self, p: &Path, suffix: &str) -> PathBuf {
        let stem = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let ext = p
            .extension()
            .map(|e| format!(".{}", e.to_string_lossy()))
            .unwrap_or_default();
        self.resolve(&p.with_file_name(format!("{stem}{suffix}{ext}")))
    }

    fn ensemble(&self, dist: IntervalDistribution, mode: EnsembleMode) -> EnsembleConfig {
        let mut e = EnsembleConfig::new(
            mode,
            self.cfg.run.realizations,
            self.seed,
            dist,
            self.h.clone(),
            self.psi.clone(),
        );
        e.workers = self.workers;
        e
    }

    fn estimates(
        &self,
        dist: &IntervalDistribution,
        m: usize,
    ) -> Result<SurvivalEstimates, ZenoError> {
        match dist {
            IntervalDistribution::Discrete(d) => Ok(survival_estimates(&LdProblem::from_kernel(
                &self.kernel,
                d,
                m,
            )?)),
            other => survival_estimates_continuous(&self.kernel, other, m, &QuadConfig::default()),
        }
    }
}

pub fn execute(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report, CliError> {
    let h = cfg.hamiltonian()?;
    let psi = cfg.initial_state()?;
    let kernel = SurvivalKernel::new(&h, &psi)?;
    let ctx = Context {
        cfg,
        kernel,
        seed: opts.seed.unwrap_or(cfg.run.seed),
        workers: opts.workers.or(cfg.run.workers),
        out_dir: opts.out_dir.clone(),
        h,
        psi,
    };
    let mut summary = system_summary(&ctx)?;
    let artifacts = match cfg.run.experiment {
        ExperimentKind::MSweep => m_sweep(&ctx, &mut summary)?,
        ExperimentKind::Realizations => realizations(&ctx, &mut summary)?,
        ExperimentKind::P1Sweep => p1_sweep(&ctx, &mut summary)?,
        ExperimentKind::DisorderP1 | ExperimentKind::DisorderMu1 => disorder(&ctx, &mut summary)?,
        ExperimentKind::Rate => rate(&ctx, &mut summary)?,
    };
    let stochastic = !matches!(
        cfg.run.experiment,
        ExperimentKind::DisorderP1 | ExperimentKind::DisorderMu1
    );
    Ok(Report {
        artifacts,
        summary,
        provenance: Provenance {
            seed: stochastic.then_some(ctx.seed),
            preset: cfg.preset.clone(),
        },
    })
}

fn fmt_log(label: &str, log: f64) -> (String, String) {
    (
        label.to_string(),
        format!("{:.6e}  (ln = {log:.10e})", log.exp()),
    )
}

fn system_summary(ctx: &Context) -> Result<Vec<(String, String)>, CliError> {
    let mut s = Vec::new();
    let var = energy_variance(&ctx.h, &ctx.psi)?;
    let tau = if var > 0.0 {
        format!("{:.6e} s", var.powf(-0.5))
    } else {
        "infinite (initial state is stationary)".into()
    };
    s.push(("tau_Z".into(), tau));
    if let Some(spec) = &ctx.cfg.distribution {
        let dist = spec.build().map_err(CliError::from_config)?;
        match qze_condition(&dist, &ctx.h, &ctx.psi) {
            Ok(c) => s.push(("<delta>".into(), format!("{:.6e}", c.mean_delta))),
            Err(ZenoError::InfiniteSecondMoment { .. }) => s.push((
                "<delta>".into(),
                "undefined (infinite second moment)".into(),
            )),
            Err(e) => return Err(e.into()),
        }
        if let Some(m) = ctx.cfg.run.m.or_else(|| {
            ctx.cfg
                .run
                .m_values
                .as_ref()
                .and_then(|v| v.last().copied())
        }) {
            let est = ctx.estimates(&dist, m)?;
            s.push(("m".into(), m.to_string()));
            s.push(fmt_log("P*", est.log_p_star));
            s.push(fmt_log("<P>", est.log_mean));
        }
    }
    Ok(s)
}

fn plot_of(title: &str, x_label: &str, y_label: &str, series: Vec<Series>) -> Plot {
    Plot {
        title: title.into(),
        x_label: x_label.into(),
        y_label: y_label.into(),
        series,
    }
}

fn xy(table: &Table, x: &str, y: &str) -> Vec<(f64, f64)> {
    table.column(x).into_iter().zip(table.column(y)).collect()
}

fn m_sweep(ctx: &Context, summary: &mut Vec<(String, String)>) -> Result<Vec<Artifact>, CliError> {
    let run = &ctx.cfg.run;
    let base = ctx.cfg.distribution()?;
    let variants: Vec<(String, IntervalDistribution)> = match (&run.alphas, &base) {
        (Some(alphas), IntervalDistribution::PowerLaw(p)) => alphas
            .iter()
            .map(|&a| {
                IntervalDistribution::power_law(p.mu0(), a)
                    .map(|d| (format!("_alpha{a}"), d))
                    .map_err(CliError::from_config)
            })
            .collect::<Result<_, _>>()?,
        (Some(_), _) => {
            return Err(CliError::Config(
                "run.alphas needs a power-law distribution".into(),
            ))
        }
        (None, d) => vec![(String::new(), d.clone())],
    };
    let m_values = run.m_values.as_ref().expect("validated");
    let mut out = Vec::new();
    for (suffix, dist) in variants {
        let mut table = Table::new(vec!["m", "log_P_typical", "log_P_star"]);
        for &m in m_values {
            let ens = run_ensemble(&ctx.ensemble(dist.clone(), EnsembleMode::FixedM(m)))?;
            let est = ctx.estimates(&dist, m)?;
            table.push(vec![
                Cell::Int(m as u64),
                Cell::Real(ens.typical().log_survival),
                Cell::Real(est.log_p_star),
            ]);
        }
        if !suffix.is_empty() {
            let last = table.rows.last().expect("non-empty sweep");
            summary.push((
                format!("ln P* ({})", &suffix[1..]),
                format!("{:.10e}", last[2].as_f64()),
            ));
        }
        let plot = plot_of(
            &format!("survival vs m{suffix}"),
            "m",
            "ln P",
            vec![
                Series {
                    label: "typical realization".into(),
                    points: xy(&table, "m", "log_P_typical"),
                    style: Style::Markers,
                },
                Series {
                    label: "most probable".into(),
                    points: xy(&table, "m", "log_P_star"),
                    style: Style::Line,
                },
            ],
        );
        out.push(artifact(ctx, &suffix, table, plot));
    }
    Ok(out)
}

fn artifact(ctx: &Context, suffix: &str, table: Table, plot: Plot) -> Artifact {
    let out = &ctx.cfg.output;
    Artifact {
        csv: ctx.with_suffix(&out.csv, suffix),
        table,
        svg: out.svg.as_ref().map(|p| (ctx.with_suffix(p, suffix), plot)),
    }
}

fn realizations(
    ctx: &Context,
    _summary: &mut Vec<(String, String)>,
) -> Result<Vec<Artifact>, CliError> {
    let run = &ctx.cfg.run;
    let dist = ctx.cfg.distribution()?;
    match run.mode {
        ModeSpec::FixedM => {
            let m = run.m.expect("validated");
            let ens = run_ensemble(&ctx.ensemble(dist.clone(), EnsembleMode::FixedM(m)))?;
            let star = ctx.estimates(&dist, m)?.log_p_star;
            let mut table = Table::new(vec!["realization_index", "log_P", "log_P_star"]);
            for (i, r) in ens.records.iter().enumerate() {
                table.push(vec![
                    Cell::Int(i as u64),
                    Cell::Real(r.log_survival),
                    Cell::Real(star),
                ]);
            }
            let plot = plot_of(
                &format!("{} realizations at m = {m}", ens.len()),
                "realization",
                "ln P",
                vec![
                    Series {
                        label: "realizations".into(),
                        points: xy(&table, "realization_index", "log_P"),
                        style: Style::Markers,
                    },
                    Series {
                        label: "most probable".into(),
                        points: xy(&table, "realization_index", "log_P_star"),
                        style: Style::Line,
                    },
                ],
            );
            Ok(vec![artifact(ctx, "", table, plot)])
        }
        ModeSpec::FixedT => {
            let t = parse_time(run.t_total.as_deref().expect("validated"))
                .map_err(CliError::from_config)?;
            let ens = run_ensemble(&ctx.ensemble(dist, EnsembleMode::FixedT(t)))?;
            let mut table = Table::new(vec!["realization_index", "m", "total_time", "log_P"]);
            for (i, r) in ens.records.iter().enumerate() {
                table.push(vec![
                    Cell::Int(i as u64),
                    Cell::Int(r.m as u64),
                    Cell::Real(r.total_time),
                    Cell::Real(r.log_survival),
                ]);
            }
            let plot = plot_of(
                "fixed total time",
                "m",
                "ln P",
                vec![Series {
                    label: "realizations".into(),
                    points: xy(&table, "m", "log_P"),
                    style: Style::Markers,
                }],
            );
            Ok(vec![artifact(ctx, "", table, plot)])
        }
    }
}

fn two_atoms(ctx: &Context) -> Result<DiscreteIntervals, CliError> {
    match ctx.cfg.distribution()? {
        IntervalDistribution::Discrete(d) if d.len() == 2 => Ok(d),
        _ => Err(CliError::Config(
            "p1_sweep needs a two-atom discrete distribution".into(),
        )),
    }
}

fn p1_sweep(
    ctx: &Context,
    _summary: &mut Vec<(String, String)>,
) -> Result<Vec<Artifact>, CliError> {
    let run = &ctx.cfg.run;
    let atoms = two_atoms(ctx)?;
    let m = run.m.expect("validated");
    let mut table = Table::new(vec!["p1", "log_P_typical", "log_P_star"]);
    for p1 in run.p1_sweep.as_ref().expect("validated").values() {
        let dist = DiscreteIntervals::new(atoms.values().to_vec(), vec![p1, 1.0 - p1])
            .map_err(CliError::from_config)?;
        let star = ctx.estimates(&dist.clone().into(), m)?.log_p_star;
        let ens = run_ensemble(&ctx.ensemble(dist.into(), EnsembleMode::FixedM(m)))?;
        table.push(vec![
            Cell::Real(p1),
            Cell::Real(ens.typical().log_survival),
            Cell::Real(star),
        ]);
    }
    let plot = plot_of(
        &format!("survival vs p1 at m = {m}"),
        "p1",
        "ln P",
        vec![
            Series {
                label: "typical realization".into(),
                points: xy(&table, "p1", "log_P_typical"),
                style: Style::Markers,
            },
            Series {
                label: "most probable".into(),
                points: xy(&table, "p1", "log_P_star"),
                style: Style::Line,
            },
        ],
    );
    Ok(vec![artifact(ctx, "", table, plot)])
}

fn disorder(ctx: &Context, summary: &mut Vec<(String, String)>) -> Result<Vec<Artifact>, CliError> {
    let run = &ctx.cfg.run;
    let m = run.m.expect("validated");
    // (sweep value, p1, mu1, mu_bar)
    let points: Vec<(f64, f64, f64, f64)> = match run.experiment {
        ExperimentKind::DisorderP1 => {
            let mu1 = parse_time(run.mu1.as_deref().expect("validated"))
                .map_err(CliError::from_config)?;
            let mu_bar = parse_time(run.mu_bar.as_deref().expect("validated"))
                .map_err(CliError::from_config)?;
            run.p1_sweep
                .as_ref()
                .expect("validated")
                .values()
                .into_iter()
                .map(|p1| (p1, p1, mu1, mu_bar))
                .collect()
        }
        _ => {
            let sweep = run.mu1_sweep.as_ref().expect("validated");
            let (a, b) = (
                parse_time(&sweep.start).map_err(CliError::from_config)?,
                parse_time(&sweep.stop).map_err(CliError::from_config)?,
            );
            let p1 = run.p1.expect("validated");
            let ratio = run.mu_bar_ratio.expect("validated");
            crate::config::Sweep {
                start: a,
                stop: b,
                points: sweep.points,
            }
            .values()
            .into_iter()
            .map(|mu1| (mu1, p1, mu1, ratio * mu1))
            .collect()
        }
    };
    let mut table = Table::new(vec!["sweep_value", "log_P_star", "log_P_equal", "ratio"]);
    let mut skipped = 0;
    for (x, p1, mu1, mu_bar) in points {
        match disorder_gain_with(&ctx.kernel, p1, mu1, mu_bar, m) {
            Ok(g) => table.push(vec![
                Cell::Real(x),
                Cell::Real(g.log_p_star),
                Cell::Real(g.log_p_equal),
                Cell::Real(g.ratio()),
            ]),
            Err(ZenoError::InvalidMean { .. }) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    if skipped > 0 {
        summary.push((
            "skipped".into(),
            format!("{skipped} sweep points with mu2 <= 0"),
        ));
    }
    let enhanced = table.rows.iter().filter(|r| r[3].as_f64() > 1.0).count();
    summary.push((
        "P*/P(mu_bar) > 1".into(),
        format!("{enhanced} of {} sweep points", table.rows.len()),
    ));
    let x_label = if run.experiment == ExperimentKind::DisorderP1 {
        "p1"
    } else {
        "mu1 [s]"
    };
    let plot = plot_of(
        "random vs equally spaced measurements",
        x_label,
        "ln P",
        vec![
            Series {
                label: "random (most probable)".into(),
                points: xy(&table, "sweep_value", "log_P_star"),
                style: Style::Line,
            },
            Series {
                label: "equally spaced".into(),
                points: xy(&table, "sweep_value", "log_P_equal"),
                style: Style::Line,
            },
        ],
    );
    Ok(vec![artifact(ctx, "", table, plot)])
}

fn rate(ctx: &Context, summary: &mut Vec<(String, String)>) -> Result<Vec<Artifact>, CliError> {
    let run = &ctx.cfg.run;
    let m = run.m.expect("validated");
    let dist = ctx.cfg.distribution()?;
    let bins = run.bins.unwrap_or(40);
    let mut out = Vec::new();
    let mut series = Vec::new();

    if let IntervalDistribution::Discrete(d) = &dist {
        let prob = LdProblem::from_kernel(&ctx.kernel, d, m)?;
        let mut table = Table::new(vec!["x", "rate_closed_form", "rate_tilted"]);
        for x in RateCurve::grid(&prob, run.grid_points.unwrap_or(ld::DEFAULT_GRID_POINTS)) {
            let closed = rate_function_i(&prob, x).unwrap_or(f64::NAN);
            table.push(vec![
                Cell::Real(x),
                Cell::Real(closed),
                Cell::Real(cramer_rate(&prob, x)?),
            ]);
        }
        series.push(Series {
            label: "closed form".into(),
            points: xy(&table, "x", "rate_closed_form"),
            style: Style::Line,
        });
        series.push(Series {
            label: "tilted".into(),
            points: xy(&table, "x", "rate_tilted"),
            style: Style::Line,
        });
        summary.push(("L*/m".into(), format!("{:.10e}", prob.typical_x())));
        out.push(Artifact {
            csv: ctx.resolve(&ctx.cfg.output.csv),
            table,
            svg: None,
        });
    } else {
        summary.push(("analytic rate".into(), "only for discrete laws".into()));
    }

    let ens = run_ensemble(&ctx.ensemble(dist, EnsembleMode::FixedM(m)))?;
    let emp = empirical_rate(&ens, bins)?;
    let mut table = Table::new(vec!["x", "rate_empirical", "count"]);
    for ((&x, &v), &c) in emp.xs.iter().zip(&emp.values).zip(&emp.counts) {
        table.push(vec![Cell::Real(x), Cell::Real(v), Cell::Int(c as u64)]);
    }
    series.push(Series {
        label: "histogram".into(),
        points: xy(&table, "x", "rate_empirical"),
        style: Style::Markers,
    });
    let plot = plot_of(
        &format!("rate function at m = {m}"),
        "ln P / m",
        "I",
        series,
    );
    let svg = ctx.cfg.output.svg.as_ref().map(|p| (ctx.resolve(p), plot));
    out.push(Artifact {
        csv: ctx.with_suffix(&ctx.cfg.output.csv, "_empirical"),
        table,
        svg,
    });
    Ok(out)
}
