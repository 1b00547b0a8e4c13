use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{holevo_to_channel, Channel, Ensemble, HolevoForm};
use crate::feasibility::Verdict;
use crate::tolerances::{TOL_PSD, TOL_SYNTH};

use super::broadcast::{broadcast_feasibility, ChannelSearch};
use super::config::RunConfig;
use super::joint::{n_joint_feasibility, n_joint_feasibility_from, product_joint_witness, JointOutcome, JointProblem};
use super::ppt::{ppt_check, ppt_min_eigenvalue_independent, PptResult};
use super::separable::{
    check_decomposition, factorization_from_holevo, holevo_from_decomposition, separable_decomposition, QcFactorization, SeparableResult,
};
use super::CriteriaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EbVerdict {
    EB,
    NotEB,
    Undecided,
}

/// Which optional parts of [`eb_report_with`] to run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportOptions {
    pub joint: bool,
    pub broadcast: bool,
    /// A decomposition known from the construction of the channel. It is
    /// checked against the Choi state like a fitted one and used only if its
    /// residual is within `eps_sep`; otherwise the fitter runs.
    pub candidate: Option<Ensemble>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            joint: true,
            broadcast: true,
            candidate: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EbReport {
    pub ppt: PptResult,
    /// Smallest partial-transpose eigenvalue from the second eigensolver, when
    /// the first one reported a failure.
    pub ppt_confirmation: Option<f64>,
    pub separable: SeparableResult,
    pub holevo: Option<HolevoForm>,
    /// Largest trace distance between the synthesized measure-prepare channel
    /// and the input on the probe states.
    pub holevo_residual: Option<f64>,
    pub joint_feasibility: BTreeMap<usize, JointOutcome>,
    pub qc_factorization: Option<QcFactorization>,
    pub broadcast: Option<ChannelSearch>,
    pub verdict: EbVerdict,
    /// The evidence agrees with the verdict: every joint level is feasible
    /// for `EB`, none is for `NotEB`.
    pub consistent: bool,
    pub notes: Vec<String>,
}

pub fn eb_report(c: &Channel, cfg: &RunConfig) -> Result<EbReport, CriteriaError> {
    eb_report_with(c, cfg, ReportOptions::default())
}

/// Runs the PPT test, a separable decomposition and its measure-prepare
/// synthesis, the joint ladder `cfg.joint_levels` and the broadcasting search,
/// and assembles a verdict.
///
/// `EB` needs a decomposition within `eps_sep` whose synthesized channel
/// reproduces the input; `NotEB` needs a PPT failure confirmed by both
/// eigensolvers. Joint and broadcasting outcomes are evidence only.
pub fn eb_report_with(c: &Channel, cfg: &RunConfig, opts: ReportOptions) -> Result<EbReport, CriteriaError> {
    cfg.validate()?;
    let mut notes = Vec::new();
    let ppt = ppt_check(c)?;
    let mut ppt_confirmation = None;
    let mut refuted = false;
    if !ppt.passed() {
        let second = ppt_min_eigenvalue_independent(c)?;
        ppt_confirmation = Some(second);
        refuted = second < -TOL_PSD;
        if !refuted {
            notes.push(format!(
                "eigensolvers disagree on the partial transpose: {:.3e} vs {second:.3e}",
                ppt.min_eigenvalue()
            ));
        }
    }

    let supplied = match &opts.candidate {
        Some(e) if ppt.passed() => {
            let r = check_decomposition(c, e, cfg.eps_sep)?;
            if r.ensemble.is_some() {
                notes.push("separable decomposition supplied by the caller and verified".to_string());
                Some(r)
            } else {
                notes.push(format!(
                    "supplied decomposition rejected with residual {:.3e}",
                    r.residual.unwrap_or(f64::NAN)
                ));
                None
            }
        }
        _ => None,
    };
    let separable = match supplied {
        Some(r) => r,
        None => separable_decomposition(c, None, &cfg.separable())?,
    };
    let mut holevo = None;
    let mut holevo_residual = None;
    let mut qc = None;
    if let Some(e) = &separable.ensemble {
        match holevo_from_decomposition(e, c.dim_in()) {
            Ok(h) => {
                let synth = holevo_to_channel(&h)?;
                let r = synth.basis_state_distance(c)?;
                holevo_residual = Some(r);
                let f = factorization_from_holevo(c, &h)?;
                qc = Some(f);
                holevo = Some(h);
            }
            Err(err) => notes.push(format!("measure-prepare synthesis failed: {err}")),
        }
    } else if !separable.rejected_by_ppt {
        notes.push(match separable.residual {
            Some(r) => format!("no separable decomposition within eps_sep; best residual {r:.3e}"),
            None => "no separable decomposition attempted".to_string(),
        });
    }
    let constructive = separable.ensemble.is_some() && holevo_residual.is_some_and(|r| r <= TOL_SYNTH);

    let mut joint_feasibility = BTreeMap::new();
    if opts.joint {
        let solver = cfg.solver();
        let results: Vec<(usize, Result<JointOutcome, CriteriaError>)> = cfg
            .joint_levels
            .par_iter()
            .map(|&n| {
                let run = || {
                    let problem = JointProblem::new(c.clone(), n)?;
                    match &separable.ensemble {
                        Some(e) if constructive => n_joint_feasibility_from(&problem, &solver, &product_joint_witness(e, n)),
                        _ => n_joint_feasibility(&problem, &solver),
                    }
                };
                (n, run())
            })
            .collect();
        for (n, r) in results {
            match r {
                Ok(o) => {
                    joint_feasibility.insert(n, o);
                }
                Err(CriteriaError::DimensionCap { dim, cap }) => notes.push(format!("joint level {n} skipped: dimension {dim} exceeds {cap}")),
                Err(e) => return Err(e),
            }
        }
    }

    let mut broadcast = None;
    if opts.broadcast {
        match broadcast_feasibility(c, &cfg.solver()) {
            Ok(b) => broadcast = Some(b),
            Err(CriteriaError::DimensionCap { dim, cap }) => notes.push(format!("broadcasting skipped: dimension {dim} exceeds {cap}")),
            Err(e) => return Err(e),
        }
    }

    let verdict = if refuted {
        EbVerdict::NotEB
    } else if constructive {
        EbVerdict::EB
    } else {
        EbVerdict::Undecided
    };
    let verdicts = joint_feasibility.values().map(|o: &JointOutcome| o.outcome.verdict);
    let consistent = match verdict {
        EbVerdict::EB => verdicts.clone().all(|v| v == Verdict::Feasible),
        EbVerdict::NotEB => verdicts.clone().all(|v| v != Verdict::Feasible),
        EbVerdict::Undecided => true,
    };
    if !consistent {
        notes.push("joint ladder disagrees with the verdict".to_string());
    }
    if verdict == EbVerdict::Undecided && joint_feasibility.values().any(|o| o.outcome.verdict == Verdict::LikelyInfeasible) {
        notes.push("a joint level looks infeasible but the partial transpose is positive".to_string());
    }

    Ok(EbReport {
        ppt,
        ppt_confirmation,
        separable,
        holevo,
        holevo_residual,
        joint_feasibility,
        qc_factorization: qc,
        broadcast,
        verdict,
        consistent,
        notes,
    })
}
