//! The joint solver and the fixed-position comparison strategies.

use std::fmt;
use std::time::Instant;

use jppc_core::agp::{solve_agp, AgpOptions};
use jppc_core::model::restore_position;
use jppc_core::sca::{solve_sca, ScaOptions};
use jppc_core::single_ue::{solve_single_ue, SingleUeOptions};
use jppc_core::{
    control_power, geometry_center, link_params, sum_rate, Decision, Iterate, Scenario, SolverReport, Status,
    SurrogateKind,
};
use serde::{Deserialize, Serialize};

use crate::experiment::SolverChoice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    /// Joint positioning and power control.
    Jppc,
    AboveBsUniPw,
    AboveBsOptPw,
    GeoCenterOptPw,
    GeoCenterUniPw,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] = [
        BaselineKind::Jppc,
        BaselineKind::GeoCenterOptPw,
        BaselineKind::GeoCenterUniPw,
        BaselineKind::AboveBsOptPw,
        BaselineKind::AboveBsUniPw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Jppc => "jppc",
            BaselineKind::AboveBsUniPw => "above-bs-uni-pw",
            BaselineKind::AboveBsOptPw => "above-bs-opt-pw",
            BaselineKind::GeoCenterOptPw => "geo-center-opt-pw",
            BaselineKind::GeoCenterUniPw => "geo-center-uni-pw",
        }
    }

    /// Fixed UAV position, or `None` for the joint solver.
    pub fn pinned_position(self, s: &Scenario) -> Option<[f64; 3]> {
        match self {
            BaselineKind::Jppc => None,
            BaselineKind::AboveBsUniPw | BaselineKind::AboveBsOptPw => {
                Some([s.bs_position[0], s.bs_position[1], s.altitude_h])
            }
            BaselineKind::GeoCenterOptPw | BaselineKind::GeoCenterUniPw => Some(geometry_center(s)),
        }
    }

    fn optimizes_power(self) -> bool {
        matches!(self, BaselineKind::AboveBsOptPw | BaselineKind::GeoCenterOptPw)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Solver of the joint problem. Fixed-position strategies always use AGP.
    pub solver: Option<SolverChoice>,
    pub sca: ScaOptions,
    pub agp: AgpOptions,
    pub single_ue: SingleUeOptions,
}

impl RunOptions {
    pub fn new(solver: SolverChoice, surrogate: SurrogateKind) -> RunOptions {
        let mut o = RunOptions { solver: Some(solver), ..RunOptions::default() };
        o.sca.surrogate_kind = surrogate;
        o
    }
}

/// Solve the joint problem from the uniform split at the geometry center
/// (pulled toward the BS if its control power does not fit the budgets).
pub fn solve_joint(s: &Scenario, opts: &RunOptions) -> jppc_core::Result<SolverReport> {
    let lp = link_params(s);
    let solver = opts.solver.unwrap_or(SolverChoice::Agp);
    if solver == SolverChoice::SingleUe {
        return solve_single_ue(s, &opts.single_ue);
    }
    let Some(x) = restore_position(geometry_center(s), s, &lp) else {
        return Ok(SolverReport::infeasible(&Decision::uniform(geometry_center(s), s, &lp)));
    };
    let init = Decision::uniform(x, s, &lp);
    match solver {
        SolverChoice::Sca => solve_sca(s, &init, &opts.sca),
        _ => solve_agp(s, &init, &opts.agp),
    }
}

/// Run one strategy and record its wall time.
///
/// Fixed positions whose control power leaves no data power in a budget
/// yield an infeasible report.
pub fn run_baseline(kind: BaselineKind, s: &Scenario, opts: &RunOptions) -> jppc_core::Result<SolverReport> {
    s.validate()?;
    let start = Instant::now();
    let mut report = match kind.pinned_position(s) {
        None => solve_joint(s, opts)?,
        Some(x) => {
            let lp = link_params(s);
            let init = Decision::uniform(x, s, &lp);
            let p_c = control_power(&x, s, &lp);
            if !(s.p_uav_max_w - p_c > 0.0) || s.p_bs_max_w - p_c < 0.0 {
                SolverReport::infeasible(&init)
            } else if kind.optimizes_power() {
                solve_agp(s, &init, &AgpOptions { freeze_position: true, ..opts.agp })?
            } else {
                SolverReport {
                    iterates: vec![Iterate { iteration: 0, sum_rate: sum_rate(&init, s, &lp), decision: init.clone() }],
                    final_decision: init,
                    wall_time_s: 0.0,
                    inner_counts: Vec::new(),
                    status: Status::Converged,
                }
            }
        }
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
