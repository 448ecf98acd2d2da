//! Figure presets. Each preset fixes the parameters of one experiment; any
//! value given in `--config` or `--set` still takes precedence. Parameters
//! that had to be inferred rather than read off the experiment description
//! are listed in the emitted `metadata.txt`.

use std::io::Write;

use super::config::ExperimentConfig;
use super::{
    adapt_and_report, approximate_and_report, grid_and_report, plot, problem_for, summary_line, sweep_and_report,
    CliResult, Common, Context, Failure,
};
use crate::diagnostics::{self, ParameterGrid, SweepOptions};
use crate::schedule::TruncationSchedule;

struct Preset {
    id: &'static str,
    title: &'static str,
    defaults: &'static [(&'static str, &'static str)],
    inferred: &'static [&'static str],
    run: fn(&Context) -> CliResult<()>,
}

const LOG_AXIS_10_3: &str = "1e-10,1e-9,1e-8,1e-7,1e-6,1e-5,1e-4,1e-3";

const PRESETS: &[Preset] = &[
    Preset {
        id: "fig1",
        title: "f(x) = x on [-1,1]: Fourier series on [-1,1] versus Fourier extension on [-2,2]",
        defaults: &[
            ("function.name", "x"),
            ("domain.bounds", "-1,1"),
            ("dictionary.kind", "fourier"),
            ("dictionary.support", "-2,2"),
            ("approximate.n", "101"),
            ("criterion.epsilon", "1e-14"),
        ],
        inferred: &["approximate.n", "criterion.epsilon"],
        run: fig1,
    },
    Preset {
        id: "fig2",
        title: "coefficients and uniform error of exp(x): Chebyshev on [-1,1] versus [-2,2]",
        defaults: &[
            ("function.name", "exp"),
            ("domain.bounds", "-1,1"),
            ("dictionary.kind", "chebyshev"),
            ("dictionary.support", "-2,2"),
            ("criterion.epsilon", "1e-14"),
            ("sweep.n", "1:80"),
        ],
        inferred: &["criterion.epsilon", "sweep.n"],
        run: fig2,
    },
    Preset {
        id: "fig3",
        title: "exp(x) with Chebyshev on [-2,2]: plain, cubic-weighted and incrementally weighted solves",
        defaults: &[
            ("function.name", "exp"),
            ("domain.bounds", "-1,1"),
            ("dictionary.kind", "chebyshev"),
            ("dictionary.support", "-2,2"),
            ("criterion.epsilon", "1e-14"),
        ],
        inferred: &[],
        run: fig3,
    },
    Preset {
        id: "fig4",
        title: "H-norm error, residual and coefficient norm of exp(cos(8 pi x)) versus N",
        defaults: &[
            ("function.name", "exp_cos_8pi"),
            ("domain.bounds", "0,0.5"),
            ("dictionary.kind", "fourier"),
            ("dictionary.support", "0,1"),
            ("sweep.epsilon", "1e-12,1e-9,1e-6,1e-3"),
            ("sweep.n", "2:300:2"),
        ],
        inferred: &["domain.bounds", "dictionary.support", "sweep.n"],
        run: fig4,
    },
    Preset {
        id: "fig5",
        title: "optimal N and coefficient norm over (epsilon, delta) for f1 and 1e6 f1",
        defaults: &[
            ("function.name", "exp_cos_8pi"),
            ("domain.bounds", "0,0.5"),
            ("dictionary.kind", "fourier"),
            ("dictionary.support", "0,1"),
            ("strategy", "bisection"),
            ("criterion.q", "3"),
            ("criterion.n_max", "4096"),
            ("grid.axis1", "criterion.epsilon"),
            ("grid.axis1_values", LOG_AXIS_10_3),
            ("grid.axis2", "criterion.delta"),
            ("grid.axis2_values", LOG_AXIS_10_3),
        ],
        inferred: &["grid.axis1_values (grid resolution)", "grid.axis2_values (grid resolution)"],
        run: fig5,
    },
    Preset {
        id: "fig6",
        title: "residual and optimal N over (sigma, delta) for exp(x) + sigma cos(2000 pi x)",
        defaults: &[
            ("function.name", "exp_noise"),
            ("domain.bounds", "0,0.5"),
            ("dictionary.kind", "fourier"),
            ("dictionary.support", "0,1"),
            ("strategy", "bisection"),
            ("criterion.q", "3"),
            ("criterion.n_max", "4096"),
            ("grid.axis1", "function.sigma"),
            ("grid.axis1_values", LOG_AXIS_10_3),
            ("grid.axis2", "criterion.delta"),
            ("grid.axis2_values", LOG_AXIS_10_3),
        ],
        inferred: &["grid.axis1_values", "grid.axis2_values", "criterion.n_max"],
        run: fig6,
    },
    Preset {
        id: "fig7",
        title: "cos(px) on [-1,1] with Fourier extension on [-2,2]: bisection versus incremental",
        defaults: &[
            ("function.name", "cos"),
            ("domain.bounds", "-1,1"),
            ("dictionary.kind", "fourier"),
            ("dictionary.support", "-2,2"),
            ("criterion.delta", "1e-10"),
            ("criterion.epsilon", "1e-12"),
            ("criterion.q", "3"),
            ("timing.repeats", "7"),
            ("family.p_values", "50,100,150,200,250,300,350,400,450,500"),
        ],
        inferred: &["family.p_values (sampling of p in [0,500])"],
        run: fig7,
    },
    Preset {
        id: "fig8",
        title: "2-D point singularity on the disk of radius 0.9 with the weighted Fourier extension frame",
        defaults: &[
            ("function.name", "singular_2d"),
            ("function.p", "3"),
            ("domain.kind", "disk"),
            ("domain.center", "0,0"),
            ("domain.radius", "0.9"),
            ("domain.bounds", "-1,1;-1,1"),
            ("dictionary.kind", "fourier"),
            ("dictionary.support", "-1,1;-1,1"),
            ("dictionary.weighted_copy", "radial"),
            ("criterion.delta", "1e-6"),
            ("criterion.epsilon", "1e-8"),
            ("criterion.q", "3"),
            ("timing.repeats", "7"),
            ("family.p_values", "1,2,3"),
        ],
        inferred: &["family.p_values", "domain.bounds (bounding box of the disk)"],
        run: fig8,
    },
    Preset {
        id: "fig9",
        title: "near-monotone convergence bounds for f = 1 and exp(cos(5x)) with Fourier extension",
        defaults: &[
            ("domain.bounds", "-1,1"),
            ("dictionary.kind", "fourier"),
            ("dictionary.support", "-2,2"),
            ("criterion.epsilon", "1e-5"),
            ("sweep.n", "1:60"),
        ],
        inferred: &["sweep.n", "continuous projection approximated with 8x oversampling"],
        run: fig9,
    },
];

pub(super) fn run(id: &str, common: &Common) -> CliResult<()> {
    let Some(preset) = PRESETS.iter().find(|p| p.id == id) else {
        let ids: Vec<_> = PRESETS.iter().map(|p| p.id).collect();
        return Err(Failure::Config(super::config::ConfigError {
            source: None,
            message: format!("unknown figure `{id}`; expected one of {}", ids.join(", ")),
        }));
    };
    let base = Context::load(common, preset.defaults)?;
    let ctx = base.with_out(preset.id)?;
    let mut meta = ctx.create("metadata.txt")?;
    writeln!(meta, "figure = {}", preset.id)?;
    writeln!(meta, "title = {}", preset.title)?;
    writeln!(meta, "inferred = {}", if preset.inferred.is_empty() { "none".into() } else { preset.inferred.join("; ") })?;
    writeln!(meta, "\n[effective config]")?;
    write!(meta, "{}", ctx.cfg.serialize())?;
    drop(meta);
    (preset.run)(&ctx)
}

fn variant(ctx: &Context, overrides: &[(&str, String)]) -> CliResult<Context> {
    let mut raw = ctx.raw.clone();
    for (k, v) in overrides {
        raw.insert(k, v, super::config::Source::Preset)?;
    }
    let cfg = ExperimentConfig::from_raw(&raw)?;
    Ok(Context { raw, cfg, out: ctx.out.clone() })
}

fn fig1(ctx: &Context) -> CliResult<()> {
    let domain = ctx.cfg.domain()?;
    let basis = variant(ctx, &[("dictionary.support", ExperimentConfig::bounds_text(domain.bounds()))])?;
    println!("basis {}", approximate_and_report(&basis, "basis", domain.bounds())?);
    let support = ctx.cfg.dictionary_support.clone();
    println!("extension {}", approximate_and_report(ctx, "extension", &support)?);
    Ok(())
}

fn fig2(ctx: &Context) -> CliResult<()> {
    let domain = ctx.cfg.domain()?;
    let basis = variant(ctx, &[("dictionary.support", ExperimentConfig::bounds_text(domain.bounds()))])?;
    for (label, c) in [("basis", &basis), ("extension", ctx)] {
        let support = c.cfg.dictionary_support.clone();
        for n in [20, 40] {
            let v = variant(c, &[("approximate.n", n.to_string())])?;
            println!("{label} {}", approximate_and_report(&v, &format!("{label}_n{n}"), &support)?);
        }
        let sweep = variant(c, &[("sweep.epsilon", format!("{:e}", c.cfg.criterion.epsilon))])?;
        sweep_and_report(&sweep, &format!("{label}_sweep"))?;
    }
    Ok(())
}

fn fig3(ctx: &Context) -> CliResult<()> {
    let support = ctx.cfg.dictionary_support.clone();
    for n in [61, 101] {
        for weight in ["none", "cubic", "incremental"] {
            let v = variant(ctx, &[("approximate.n", n.to_string()), ("solver.weight", weight.to_string())])?;
            println!("{weight} {}", approximate_and_report(&v, &format!("{weight}_n{n}"), &support)?);
        }
    }
    Ok(())
}

fn fig4(ctx: &Context) -> CliResult<()> {
    sweep_and_report(ctx, "sweep").map(|_| ())
}

fn write_grid_panels(ctx: &Context, grid: &ParameterGrid, name: &str) -> CliResult<()> {
    let mut out = ctx.create(&format!("{name}_N.csv"))?;
    writeln!(out, "axis1,axis2,N_opt,value")?;
    for c in &grid.cells {
        writeln!(out, "{:e},{:e},{},{}", c.axis1, c.axis2, c.n_opt, c.n_opt)?;
    }
    Ok(())
}

fn fig5(ctx: &Context) -> CliResult<()> {
    let f1 = grid_and_report(ctx, "f1")?;
    write_grid_panels(ctx, &f1, "f1")?;
    let scaled = variant(ctx, &[("function.scale", "1e6".into())])?;
    let f2 = grid_and_report(&scaled, "f2")?;
    write_grid_panels(ctx, &f2, "f2")?;
    Ok(())
}

fn fig6(ctx: &Context) -> CliResult<()> {
    let grid = grid_and_report(ctx, "noise")?;
    write_grid_panels(ctx, &grid, "noise")
}

fn timing_table(ctx: &Context, name: &str) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let mut family = Vec::new();
    for &p in &cfg.family_p {
        let v = variant(ctx, &[("function.p", p.to_string())])?;
        family.push((p, problem_for(&v.cfg)?));
    }
    let schedule = TruncationSchedule::natural(cfg.dictionary()?);
    let rows = diagnostics::timing_comparison(&family, &schedule, &cfg.criterion, cfg.timing_repeats)?;
    diagnostics::write_timing_csv(&rows, ctx.create(&format!("{name}.csv"))?)?;
    for r in &rows {
        println!("p={} N_inc={} N_bis={} ratio={:.3}", r.parameter, r.n_incremental, r.n_bisection, r.ratio);
    }
    if cfg.plot {
        let diff = plot::Series {
            label: "N_bis - N_inc".into(),
            points: rows.iter().map(|r| (r.parameter, r.n_bisection as f64 - r.n_incremental as f64)).collect(),
        };
        let ratio = plot::Series { label: "t_bis / t_Nopt".into(), points: rows.iter().map(|r| (r.parameter, r.ratio)).collect() };
        plot::line_plot(&ctx.path(&format!("{name}_difference.svg")), "N_bis - N_inc", "p", "difference", &[diff], false)?;
        plot::line_plot(&ctx.path(&format!("{name}_ratio.svg")), "timing ratio", "p", "ratio", &[ratio], false)?;
    }
    Ok(())
}

fn fig7(ctx: &Context) -> CliResult<()> {
    timing_table(ctx, "timing")
}

fn fig8(ctx: &Context) -> CliResult<()> {
    let (result, problem) = adapt_and_report(ctx, "adapt")?;
    println!("{}", summary_line(&result, ctx.cfg.criterion.n_max));
    if let Some(desc) = &result.accepted {
        let approximant = problem.approximant(desc, &result.solution)?;
        let bounds = problem.domain.bounds().to_vec();
        super::write_evaluation(&mut ctx.create("approximant.csv")?, &problem, &approximant, &bounds, 101)?;
        let uniform = diagnostics::uniform_error(&problem.target, &approximant, &problem.domain, 200)?;
        println!("uniform_error={uniform:.6e}");
    }
    timing_table(ctx, "timing")
}

fn fig9(ctx: &Context) -> CliResult<()> {
    let eps = ctx.cfg.criterion.epsilon;
    for (label, overrides) in [
        ("constant", vec![("function.name", "constant".to_string()), ("function.value", "1".into())]),
        ("exp_cos_5", vec![("function.name", "exp_cos_5".to_string())]),
    ] {
        // discrete bound with the configured oversampling, continuous one with a fine grid
        for (kind, gamma, factor) in [("discrete", None, eps), ("continuous", Some("8"), eps.sqrt())] {
            let mut o = overrides.clone();
            if let Some(g) = gamma {
                o.push(("sampling.gamma", g.to_string()));
            }
            let v = variant(ctx, &o)?;
            let problem = problem_for(&v.cfg)?;
            let schedule = TruncationSchedule::natural(problem.dictionary.clone());
            let records = diagnostics::convergence_sweep(&problem, &schedule, &v.cfg.sweep_n, eps, SweepOptions::default())?;
            let mut out = ctx.create(&format!("{label}_{kind}.csv"))?;
            writeln!(out, "N,h_error,bound")?;
            for w in records.windows(2) {
                let bound = w[0].h_error + factor * w[0].coefficient_norm;
                writeln!(out, "{},{:e},{:e}", w[1].n, w[1].h_error, bound)?;
            }
        }
    }
    Ok(())
}
