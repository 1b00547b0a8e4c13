use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ebtk::bargmann::{bargmann_eb_report_with, FockSpace, HeterodyneOptions, Quadrature};
use ebtk::channels::random::{random_channel, random_holevo, random_unitary, rng};
use ebtk::channels::{holevo_to_channel, Channel, KrausForm};
use ebtk::criteria::{
    broadcast_feasibility, check_decomposition, eb_report_with, holevo_from_decomposition, n_joint_feasibility, n_joint_feasibility_from,
    product_joint_witness, randomization_order, separable_decomposition, ChannelSearch, JointProblem, ReportOptions, RunConfig,
};
use ebtk::document::{
    from_json, to_json, to_json_pretty, BargmannReportDocument, BatchLineDocument, ChannelDocument, EbReportDocument, HolevoDocument, HolevoReportDocument,
    JointDocument, JointReportDocument, Real, SearchDocument, SearchReportDocument, SeparableDocument, Timings,
};
use ebtk::feasibility::Verdict;
use ebtk::tolerances::TOL_SYNTH;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::{Command, OutputArgs, RandomKind, ReportArgs};

pub fn run(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::CheckEb {
            input,
            batch,
            report,
            config,
            output,
        } => {
            let cfg = config.resolve()?;
            if batch {
                check_eb_batch(&input, &cfg, &report)
            } else {
                let doc = check_eb(&input, &cfg, &report)?;
                emit(&doc, &output);
                Ok(0)
            }
        }
        Command::Joint { input, n, config, output } => {
            let cfg = config.resolve()?;
            let doc = joint(&input, n, &cfg)?;
            emit(&doc, &output);
            Ok(search_code(doc.joint.outcome.verdict))
        }
        Command::Order { lhs, rhs, config, output } => {
            let cfg = config.resolve()?;
            let (_, l) = read_channel(&lhs)?;
            let (_, r) = read_channel(&rhs)?;
            let s = randomization_order(&l, &r, &cfg.solver())?;
            Ok(emit_search(&s, (r.dim_out(), l.dim_out()), cfg, &output))
        }
        Command::Broadcast { input, config, output } => {
            let cfg = config.resolve()?;
            let (_, c) = read_channel(&input)?;
            let s = broadcast_feasibility(&c, &cfg.solver())?;
            let d = c.dim_out();
            Ok(emit_search(&s, (d, d * d), cfg, &output))
        }
        Command::Holevo { input, config, output } => {
            let cfg = config.resolve()?;
            let doc = holevo(&input, &cfg)?;
            emit(&doc, &output);
            Ok(0)
        }
        Command::Bargmann {
            cutoff,
            radial_nodes,
            angular_nodes,
            scale,
            conjugate,
            report,
            config,
            output,
        } => {
            let cfg = config.resolve()?;
            let start = Instant::now();
            let space = FockSpace::new(cutoff)?;
            let quad = Quadrature::new(radial_nodes, angular_nodes)?;
            let opts = HeterodyneOptions { scale, conjugate };
            let r = bargmann_eb_report_with(&space, &quad, &cfg, opts, report_options(&report))?;
            let mut doc = BargmannReportDocument::from_report(&r, &cfg);
            if report.timings {
                doc.report.timings = Some(timings(start));
            }
            emit(&doc, &output);
            Ok(0)
        }
        Command::Random {
            kind,
            dims,
            seed,
            rank,
            effects,
            output,
        } => {
            let doc = random(kind, &dims, seed, rank, effects)?;
            emit(&doc, &output);
            Ok(0)
        }
    }
}

fn emit<T: Serialize>(value: &T, out: &OutputArgs) {
    let s = if out.pretty { to_json_pretty(value) } else { to_json(value) };
    write_line(&s);
}

/// Writes to stdout; a closed pipe ends output quietly.
fn write_line(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}").and_then(|_| out.flush());
}

/// A search that ran out of iterations without stalling is an anomaly.
fn search_code(v: Verdict) -> u8 {
    if v == Verdict::Undecided {
        3
    } else {
        0
    }
}

fn emit_search(s: &ChannelSearch, dims: (usize, usize), config: RunConfig, out: &OutputArgs) -> u8 {
    let doc = SearchReportDocument {
        config,
        search: SearchDocument::from_search(s, dims),
    };
    emit(&doc, out);
    search_code(s.outcome.verdict)
}

fn timings(start: Instant) -> Timings {
    Timings {
        total_seconds: Real(start.elapsed().as_secs_f64()),
    }
}

fn report_options(r: &ReportArgs) -> ReportOptions {
    ReportOptions {
        joint: !r.no_joint,
        broadcast: !r.no_broadcast,
        candidate: None,
    }
}

pub fn read_channel(path: &Path) -> Result<(ChannelDocument, Channel), CliError> {
    let load = || -> Result<_, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        let doc: ChannelDocument = from_json(&text)?;
        let c = doc.to_channel()?;
        Ok((doc, c))
    };
    load().map_err(|e| match e {
        CliError::Input(m) if !m.starts_with(&path.display().to_string()) => CliError::Input(format!("{}: {m}", path.display())),
        e => e,
    })
}

fn check_eb(path: &Path, cfg: &RunConfig, args: &ReportArgs) -> Result<EbReportDocument, CliError> {
    let start = Instant::now();
    let (doc, c) = read_channel(path)?;
    let mut opts = report_options(args);
    opts.candidate = doc.holevo_form()?.map(|h| h.ensemble());
    let r = eb_report_with(&c, cfg, opts).map_err(|e| CliError::from(e).in_file(path))?;
    let mut out = EbReportDocument::from_report(&r, cfg, c.dim_out());
    if args.timings {
        out.timings = Some(timings(start));
    }
    Ok(out)
}

fn check_eb_batch(dir: &Path, cfg: &RunConfig, args: &ReportArgs) -> Result<u8, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::read(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let lines: Vec<BatchLineDocument> = files
        .par_iter()
        .map(|p| {
            let file = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            match check_eb(p, cfg, args) {
                Ok(report) => BatchLineDocument {
                    file,
                    exit_code: 0,
                    report: Some(report),
                    error: None,
                },
                Err(e) => BatchLineDocument {
                    file,
                    exit_code: e.exit_code(),
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut code = 0;
    for line in &lines {
        write_line(&to_json(line));
        code = code.max(line.exit_code);
    }
    Ok(code)
}

fn joint(path: &Path, n: usize, cfg: &RunConfig) -> Result<JointReportDocument, CliError> {
    if !(2..=6).contains(&n) {
        return Err(CliError::Input(format!("--n must be in 2..=6, got {n}")));
    }
    let (doc, c) = read_channel(path)?;
    let problem = JointProblem::new(c, n)?;
    let solver = cfg.solver();
    // a measure-prepare form in the document gives a feasible start point
    let outcome = match doc.holevo_form()? {
        Some(h) => n_joint_feasibility_from(&problem, &solver, &product_joint_witness(&h.ensemble(), n))?,
        None => n_joint_feasibility(&problem, &solver)?,
    };
    Ok(JointReportDocument {
        config: cfg.clone(),
        joint: JointDocument::from_joint(&outcome),
    })
}

fn holevo(path: &Path, cfg: &RunConfig) -> Result<HolevoReportDocument, CliError> {
    let (doc, c) = read_channel(path)?;
    let supplied = match doc.holevo_form()? {
        Some(h) => Some(check_decomposition(&c, &h.ensemble(), cfg.eps_sep)?).filter(|r| r.ensemble.is_some()),
        None => None,
    };
    let separable = match supplied {
        Some(r) => r,
        None => separable_decomposition(&c, None, &cfg.separable())?,
    };
    let mut form = None;
    let mut residual = None;
    if let Some(e) = &separable.ensemble {
        let h = holevo_from_decomposition(e, c.dim_in())?;
        let synth = holevo_to_channel(&h).map_err(|e| CliError::Anomaly(e.to_string()))?;
        let r = synth.basis_state_distance(&c).map_err(|e| CliError::Anomaly(e.to_string()))?;
        if r > TOL_SYNTH {
            eprintln!("warning: synthesized channel differs from the input by {r:.3e}");
        }
        residual = Some(Real(r));
        form = Some(HolevoDocument::from_holevo(&h));
    }
    Ok(HolevoReportDocument {
        config: cfg.clone(),
        separable: SeparableDocument::from_result(&separable),
        holevo: form,
        holevo_residual: residual,
    })
}

fn random(kind: RandomKind, dims: &[usize], seed: u64, rank: usize, effects: usize) -> Result<ChannelDocument, CliError> {
    let input = |e: ebtk::channels::ChannelError| CliError::Input(e.to_string());
    let pair = || match dims {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::Input(format!("dim_in and dim_out expected, got {} dimension(s)", dims.len()))),
    };
    match kind {
        RandomKind::Channel => {
            let (din, dout) = pair()?;
            Ok(ChannelDocument::from_channel(&random_channel(din, dout, rank, seed).map_err(input)?))
        }
        RandomKind::Holevo => {
            let (din, dout) = pair()?;
            let h = random_holevo(din, dout, effects, seed).map_err(input)?;
            let c = holevo_to_channel(&h).map_err(input)?;
            Ok(ChannelDocument::from_channel(&c).with_holevo(&h))
        }
        RandomKind::Unitary => {
            let &[d] = dims else {
                return Err(CliError::Input(format!("unitary needs one dimension, got {}", dims.len())));
            };
            if d == 0 {
                return Err(CliError::Input("dimension must be positive".into()));
            }
            let u = random_unitary(d, &mut rng(seed));
            let c = Channel::unitary(&u).map_err(input)?;
            let k = KrausForm::new(vec![u]).map_err(input)?;
            Ok(ChannelDocument::from_channel(&c).with_kraus(&k))
        }
    }
}
