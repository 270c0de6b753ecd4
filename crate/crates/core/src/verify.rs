//! Executable checks of the mechanism's guarantees on concrete instances.
//!
//! Every comparison is exact. A failing [`Verdict`] carries a [`Witness`]
//! with the LSE, realization, or deviation involved and the two values that
//! broke the relation, enough to replay the failure through the CLI.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Bid, Instance, LseId, PaymentCase, PaymentSchedule, Selection};
use crate::payments::{
    evaluate_case, expected_payoff, expected_payoff_with, externality_transfer,
    schedule_from_counterfactual, settle,
};
use crate::rational::Rational;
use crate::solver::{
    best_subset, counterfactual, solve_stage1_dp, subset_values, DEFAULT_BRUTE_FORCE_CAP,
};
use crate::welfare::expected_social_welfare;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Ir,
    Ic,
    Efficiency,
    Lemmas,
    Externality,
    /// Case 2 and Case 3 rows agree where the replacement lands on the
    /// removed member's rank. Not part of the default set.
    Boundary,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Ir,
        CheckKind::Ic,
        CheckKind::Efficiency,
        CheckKind::Lemmas,
        CheckKind::Externality,
    ];

    pub fn needs_true_types(self) -> bool {
        matches!(self, CheckKind::Ir | CheckKind::Ic)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Ir => "ir",
            CheckKind::Ic => "ic",
            CheckKind::Efficiency => "efficiency",
            CheckKind::Lemmas => "lemmas",
            CheckKind::Externality => "externality",
            CheckKind::Boundary => "boundary",
        })
    }
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CheckKind::ALL
            .into_iter()
            .chain([CheckKind::Boundary])
            .find(|k| k.to_string() == s.trim())
            .ok_or_else(|| {
                format!("unknown check `{s}` (expected ir, ic, efficiency, lemmas, externality, boundary)")
            })
    }
}

/// The relation that was expected to hold between `lhs` and `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "==",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub what: String,
    pub lse_id: Option<LseId>,
    pub w: Option<usize>,
    /// The deviating report, for incentive-compatibility failures.
    pub deviation: Option<Bid>,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.what)?;
        if let Some(id) = self.lse_id {
            write!(f, " lse={id}")?;
        }
        if let Some(w) = self.w {
            write!(f, " w={w}")?;
        }
        if let Some(d) = &self.deviation {
            write!(f, " deviation=(v={}, c={})", d.v_hat(), d.c_hat())?;
        }
        write!(f, ": expected {} {} {}", self.lhs, self.relation, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub check: CheckKind,
    pub passed: bool,
    /// Number of individual relations evaluated.
    pub evaluated: usize,
    pub witness: Option<Witness>,
    /// Informational findings that do not affect `passed`.
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(check: CheckKind) -> Self {
        Verdict {
            check,
            passed: true,
            evaluated: 0,
            witness: None,
            notes: Vec::new(),
        }
    }

    fn fail(&mut self, witness: Witness) {
        if self.passed {
            self.passed = false;
            self.witness = Some(witness);
        }
    }

    /// Records one relation; keeps the first failure as the witness.
    fn expect(
        &mut self,
        lhs: &Rational,
        relation: Relation,
        rhs: &Rational,
        witness: impl FnOnce() -> Witness,
    ) {
        self.evaluated += 1;
        let holds = match relation {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        };
        if !holds {
            let mut w = witness();
            w.lhs = lhs.clone();
            w.relation = relation;
            w.rhs = rhs.clone();
            self.fail(w);
        }
    }
}

fn witness(what: impl Into<String>) -> Witness {
    Witness {
        what: what.into(),
        lse_id: None,
        w: None,
        deviation: None,
        lhs: Rational::zero(),
        relation: Relation::Eq,
        rhs: Rational::zero(),
    }
}

/// Candidate misreports for each LSE.
///
/// The cartesian product of `values` and `costs` is augmented with the
/// truthful report, every competitor's report, competitors' values and
/// gammas nudged by `±epsilon`, and valuations that sit `±epsilon` from
/// each rank's selection threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationGrid {
    pub values: Vec<Rational>,
    pub costs: Vec<Rational>,
    pub epsilon: Rational,
}

impl Default for DeviationGrid {
    /// 15 x 15 base grid: `v` in `0..=7`, `c` in `-2..=5`, steps of 1/2.
    fn default() -> Self {
        let halves =
            |from: i64, count: i64| (0..count).map(|k| Rational::new(from + k, 2)).collect();
        DeviationGrid {
            values: halves(0, 15),
            costs: halves(-4, 15),
            epsilon: Rational::new(1, 64),
        }
    }
}

impl DeviationGrid {
    /// A grid holding exactly the given points, plus the truthful report.
    pub fn explicit(points: Vec<(Rational, Rational)>) -> ExplicitGrid {
        ExplicitGrid { points }
    }

    /// Deviations considered for `id`, truthful report first.
    pub fn points_for(&self, id: LseId, inst: &Instance) -> Result<Vec<Bid>> {
        let truth = true_type(id, inst)?;
        let eps = &self.epsilon;
        let others: Vec<&Bid> = inst.bids().iter().filter(|b| b.id() != id).collect();

        let mut values: BTreeSet<Rational> = self.values.iter().cloned().collect();
        let mut costs: BTreeSet<Rational> = self.costs.iter().cloned().collect();
        values.insert(truth.v_hat().clone());
        costs.insert(truth.c_hat().clone());
        for b in &others {
            values.insert(b.v_hat().clone());
            values.insert(b.v_hat() + eps);
            values.insert(b.v_hat() - eps);
            costs.insert(b.c_hat().clone());
        }

        let mut pairs: BTreeSet<(Rational, Rational)> = BTreeSet::new();
        for v in &values {
            for c in &costs {
                pairs.insert((v.clone(), c.clone()));
            }
        }
        // Reports that tie or straddle each competitor's gamma.
        for b in &others {
            let g = b.gamma_hat();
            for gamma in [&g - eps, g.clone(), &g + eps] {
                for v in [truth.v_hat(), b.v_hat()] {
                    pairs.insert((v.clone(), &gamma - v));
                }
            }
        }
        // Truthful gamma with v on either side of each rank's break-even value.
        let gamma = truth.gamma_hat();
        for rank in 1..=inst.len() + 1 {
            let threshold = &gamma * inst.pmf().shortfall_probability(rank);
            for v in [&threshold - eps, threshold.clone(), &threshold + eps] {
                pairs.insert((v.clone(), &gamma - &v));
            }
        }
        pairs.insert((Rational::zero(), Rational::zero()));

        let mut points = vec![truth.clone()];
        points.extend(
            pairs
                .into_iter()
                .filter(|(v, _)| !v.is_negative())
                .map(|(v, c)| Bid::new(id, v, c))
                .filter(|b| b != truth),
        );
        Ok(points)
    }
}

/// A fixed list of deviations applied to every LSE.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitGrid {
    pub points: Vec<(Rational, Rational)>,
}

/// Source of candidate deviations for [`check_ic`].
pub trait Deviations: Sync {
    fn points_for(&self, id: LseId, inst: &Instance) -> Result<Vec<Bid>>;
}

impl Deviations for DeviationGrid {
    fn points_for(&self, id: LseId, inst: &Instance) -> Result<Vec<Bid>> {
        DeviationGrid::points_for(self, id, inst)
    }
}

impl Deviations for ExplicitGrid {
    fn points_for(&self, id: LseId, inst: &Instance) -> Result<Vec<Bid>> {
        let truth = true_type(id, inst)?;
        let mut points = vec![truth.clone()];
        for (v, c) in &self.points {
            if v.is_negative() {
                continue;
            }
            let bid = Bid::new(id, v.clone(), c.clone());
            if !points.contains(&bid) {
                points.push(bid);
            }
        }
        Ok(points)
    }
}

/// Specific reports for specific LSEs; every other LSE is only checked at
/// its truthful report. Used to replay a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedDeviations {
    pub reports: Vec<Bid>,
}

impl Deviations for FixedDeviations {
    fn points_for(&self, id: LseId, inst: &Instance) -> Result<Vec<Bid>> {
        let mut points = vec![true_type(id, inst)?.clone()];
        points.extend(self.reports.iter().filter(|b| b.id() == id).cloned());
        Ok(points)
    }
}

fn true_type(id: LseId, inst: &Instance) -> Result<&Bid> {
    let types = inst.true_types().ok_or(Error::MissingTrueTypes)?;
    types.get(id.0 as usize - 1).ok_or(Error::UnknownLse(id))
}

/// Expected payoff (true-type utilities) of `id` when it reports `report`
/// and everyone else keeps their bids.
pub fn expected_payoff_under(inst: &Instance, report: Bid) -> Result<Rational> {
    let id = report.id();
    let profile = inst.with_bid(report)?;
    let sel = solve_stage1_dp(&profile);
    match sel.rank_of(id) {
        None => Ok(Rational::zero()),
        Some(rank) => {
            let cf = counterfactual(rank, &sel, &profile)?;
            let schedule = schedule_from_counterfactual(&cf, &sel, &profile);
            Ok(expected_payoff_with(id, rank, &schedule, &profile))
        }
    }
}

/// Each LSE reporting truthfully (others keep their bids) expects a
/// nonnegative payoff.
pub fn check_ir(inst: &Instance) -> Result<Verdict> {
    let types = inst.true_types().ok_or(Error::MissingTrueTypes)?;
    let mut verdict = Verdict::new(CheckKind::Ir);
    let mut ex_post_negative = 0usize;
    for truth in types {
        let profile = inst.with_bid(truth.clone())?;
        let sel = solve_stage1_dp(&profile);
        let payoff = expected_payoff(truth.id(), &sel, &profile)?;
        verdict.expect(&payoff, Relation::Ge, &Rational::zero(), || Witness {
            lse_id: Some(truth.id()),
            ..witness("expected payoff under truthful report is negative")
        });
        for w in 0..=inst.max_generation() {
            let report = settle(&sel, w, &profile)?;
            if report.rows[truth.id().0 as usize - 1].payoff.is_negative() {
                ex_post_negative += 1;
            }
        }
    }
    if ex_post_negative > 0 {
        verdict.notes.push(format!(
            "{ex_post_negative} (lse, w) pairs have a negative ex-post payoff (allowed; IR holds in expectation)"
        ));
    }
    Ok(verdict)
}

/// No deviation in `grid` gives any LSE a strictly higher expected payoff
/// than its truthful report.
pub fn check_ic(inst: &Instance, grid: &dyn Deviations) -> Result<Verdict> {
    let types = inst.true_types().ok_or(Error::MissingTrueTypes)?;
    let mut verdict = Verdict::new(CheckKind::Ic);
    for truth in types {
        let points = grid.points_for(truth.id(), inst)?;
        let honest = expected_payoff_under(inst, truth.clone())?;
        let outcomes: Vec<(Bid, Rational)> = points
            .into_par_iter()
            .map(|p| expected_payoff_under(inst, p.clone()).map(|v| (p, v)))
            .collect::<Result<_>>()?;
        for (deviation, payoff) in outcomes {
            verdict.expect(&honest, Relation::Ge, &payoff, || Witness {
                lse_id: Some(truth.id()),
                deviation: Some(deviation.clone()),
                ..witness("deviation beats truthful expected payoff")
            });
        }
    }
    Ok(verdict)
}

/// The DP selection attains the power-set maximum of expected welfare.
pub fn check_efficiency(inst: &Instance) -> Result<Verdict> {
    check_efficiency_with_cap(inst, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn check_efficiency_with_cap(inst: &Instance, cap: usize) -> Result<Verdict> {
    let values = subset_values(inst, cap)?;
    let (_, optimum) = best_subset(&values, |_| true);
    let sel = solve_stage1_dp(inst);
    let achieved = expected_social_welfare(&sel, inst).total;
    let mut verdict = Verdict::new(CheckKind::Efficiency);
    verdict.expect(&achieved, Relation::Eq, &optimum, || {
        witness(format!(
            "solver selection {sel} misses the brute-force optimum"
        ))
    });
    Ok(verdict)
}

fn members_gamma(sel: &Selection, inst: &Instance) -> Vec<Rational> {
    sel.members()
        .iter()
        .map(|&id| inst.bid(id).gamma_hat())
        .collect()
}

/// Outsider bounds, the rank-swap inequality, the rank-shift contribution
/// bound, and the closed-form counterfactual against constrained brute force.
pub fn check_lemmas(inst: &Instance) -> Result<Verdict> {
    check_lemmas_with_cap(inst, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn check_lemmas_with_cap(inst: &Instance, cap: usize) -> Result<Verdict> {
    let values = subset_values(inst, cap)?;
    let pmf = inst.pmf();
    let sel = solve_stage1_dp(inst);
    let n = sel.len();
    let gammas = members_gamma(&sel, inst);
    let outsiders: Vec<&Bid> = inst
        .bids()
        .iter()
        .filter(|b| !sel.contains(b.id()))
        .collect();
    let mut verdict = Verdict::new(CheckKind::Lemmas);

    for j in &outsiders {
        let gj = j.gamma_hat();
        let lhs = j.v_hat() - &gj * pmf.prob(0);
        let mid: Rational = (1..=n)
            .map(|w| gj.clone().min(gammas[w - 1].clone()) * pmf.prob(w))
            .sum();
        let rhs: Rational = (1..=n).map(|w| &gj * pmf.prob(w)).sum();
        let tag = || Witness {
            lse_id: Some(j.id()),
            ..witness("outsider bound")
        };
        verdict.expect(&lhs, Relation::Le, &mid, tag);
        verdict.expect(&mid, Relation::Le, &rhs, tag);
    }

    for i in 1..=n {
        let member = inst.bid(sel.members()[i - 1]);
        let shortfall = pmf.shortfall_probability(i);
        let own = member.v_hat() - member.gamma_hat() * &shortfall;
        for j in &outsiders {
            let swapped = j.v_hat() - j.gamma_hat() * &shortfall;
            verdict.expect(&swapped, Relation::Le, &own, || Witness {
                lse_id: Some(j.id()),
                w: Some(i),
                ..witness(format!("swap into rank {i}"))
            });
        }
    }

    // The chain behind the rank-shift bound needs every gamma nonnegative.
    let nonnegative = inst.bids().iter().all(|b| !b.gamma_hat().is_negative());
    if nonnegative {
        for i in 1..=n {
            for j in &outsiders {
                for k in 1..=outsiders.len() {
                    let value = rank_shift_contribution(j, i, k, &gammas, inst);
                    verdict.expect(&value, Relation::Le, &Rational::zero(), || Witness {
                        lse_id: Some(j.id()),
                        ..witness(format!("rank-shift contribution (i={i}, k={k})"))
                    });
                }
            }
        }
    } else {
        verdict
            .notes
            .push("rank-shift bound skipped: some gamma is negative".to_string());
    }

    for i in 1..=n {
        let cf = counterfactual(i, &sel, inst)?;
        let bit = 1u64 << (cf.removed_id.0 - 1);
        let (_, oracle) = best_subset(&values, |m| m & bit == 0);
        verdict.expect(&cf.value, Relation::Eq, &oracle, || Witness {
            lse_id: Some(cf.removed_id),
            ..witness(format!(
                "closed-form counterfactual {} vs constrained optimum",
                cf.selection
            ))
        });
        let expected = if cf.theta_bar.is_positive() { n } else { n - 1 };
        if cf.selection.len() != expected {
            verdict.fail(Witness {
                lse_id: Some(cf.removed_id),
                lhs: Rational::from_integer(cf.selection.len() as i64),
                rhs: Rational::from_integer(expected as i64),
                ..witness("counterfactual selection size")
            });
        }
    }
    Ok(verdict)
}

/// Contribution of an outsider placed `k` slots below the other outsiders,
/// once re-ranked among the members other than rank `i`.
fn rank_shift_contribution(
    j: &Bid,
    i: usize,
    k: usize,
    gammas: &[Rational],
    inst: &Instance,
) -> Rational {
    let pmf = inst.pmf();
    let n = gammas.len();
    let gj = j.gamma_hat();
    let mut value = j.v_hat() - &gj * pmf.cdf(k);
    for w in (k + 1)..(k + i) {
        value -= gj.clone().min(gammas[w - k - 1].clone()) * pmf.prob(w);
    }
    for w in (k + i)..(k + n) {
        value -= gj.clone().min(gammas[w - k].clone()) * pmf.prob(w);
    }
    value
}

/// For every selected LSE and every realization, the table's net transfer
/// equals the externality the LSE imposes on the others.
pub fn check_externality(inst: &Instance) -> Result<Verdict> {
    let sel = solve_stage1_dp(inst);
    let mut verdict = Verdict::new(CheckKind::Externality);
    for i in 1..=sel.len() {
        let cf = counterfactual(i, &sel, inst)?;
        let schedule = schedule_from_counterfactual(&cf, &sel, inst);
        audit_schedule(&mut verdict, &cf, &schedule, &sel, inst);
    }
    Ok(verdict)
}

/// Audits externally supplied schedules (e.g. a published payment table)
/// against the externality identity. Outsiders must have zero schedules.
pub fn check_externality_against(
    inst: &Instance,
    schedules: &[PaymentSchedule],
) -> Result<Verdict> {
    let sel = solve_stage1_dp(inst);
    let mut verdict = Verdict::new(CheckKind::Externality);
    for schedule in schedules {
        let id = schedule.lse_id;
        if inst.get(id).is_none() {
            return Err(Error::UnknownLse(id));
        }
        if schedule.t_realtime.len() != inst.max_generation() + 1 {
            verdict.fail(Witness {
                lse_id: Some(id),
                lhs: Rational::from_integer(schedule.t_realtime.len() as i64),
                rhs: Rational::from_integer(inst.max_generation() as i64 + 1),
                ..witness("real-time schedule length")
            });
            continue;
        }
        match sel.rank_of(id) {
            Some(rank) => {
                let cf = counterfactual(rank, &sel, inst)?;
                audit_schedule(&mut verdict, &cf, schedule, &sel, inst);
            }
            None => {
                for w in 0..=inst.max_generation() {
                    verdict.expect(
                        &schedule.net_transfer(w),
                        Relation::Eq,
                        &Rational::zero(),
                        || Witness {
                            lse_id: Some(id),
                            w: Some(w),
                            ..witness("outsider transfer")
                        },
                    );
                }
            }
        }
    }
    Ok(verdict)
}

fn audit_schedule(
    verdict: &mut Verdict,
    cf: &crate::solver::CounterfactualResult,
    schedule: &PaymentSchedule,
    sel: &Selection,
    inst: &Instance,
) {
    for w in 0..=inst.max_generation() {
        let externality = externality_transfer(cf, sel, w, inst);
        verdict.expect(
            &schedule.net_transfer(w),
            Relation::Eq,
            &externality,
            || Witness {
                lse_id: Some(cf.removed_id),
                w: Some(w),
                ..witness("net transfer vs externality")
            },
        );
    }
}

/// Where the replacement would rank exactly at the removed member's rank,
/// the Case 2 and Case 3 rows must produce the same schedule. Returns the
/// number of boundary members seen alongside the verdict.
pub fn check_case_boundary(inst: &Instance) -> Result<(Verdict, usize)> {
    let sel = solve_stage1_dp(inst);
    let mut verdict = Verdict::new(CheckKind::Boundary);
    let mut hits = 0;
    for i in 1..=sel.len() {
        let cf = counterfactual(i, &sel, inst)?;
        if cf.theta_bar.is_positive() && cf.replacement_rank == Some(i) {
            hits += 1;
            let two =
                evaluate_case(PaymentCase::Case2, &cf, &sel, inst).expect("replacement present");
            let three =
                evaluate_case(PaymentCase::Case3, &cf, &sel, inst).expect("replacement present");
            verdict.expect(&two.t_day_ahead, Relation::Eq, &three.t_day_ahead, || {
                Witness {
                    lse_id: Some(cf.removed_id),
                    ..witness("boundary day-ahead charge")
                }
            });
            for w in 0..two.t_realtime.len() {
                verdict.expect(
                    &two.t_realtime[w],
                    Relation::Eq,
                    &three.t_realtime[w],
                    || Witness {
                        lse_id: Some(cf.removed_id),
                        w: Some(w),
                        ..witness("boundary real-time credit")
                    },
                );
            }
        }
    }
    Ok((verdict, hits))
}

/// Runs the requested checks in order.
pub fn run_checks(
    inst: &Instance,
    checks: &[CheckKind],
    grid: &dyn Deviations,
) -> Result<Vec<Verdict>> {
    checks
        .iter()
        .map(|check| match check {
            CheckKind::Ir => check_ir(inst),
            CheckKind::Ic => check_ic(inst, grid),
            CheckKind::Efficiency => check_efficiency(inst),
            CheckKind::Lemmas => check_lemmas(inst),
            CheckKind::Externality => check_externality(inst),
            CheckKind::Boundary => check_case_boundary(inst).map(|(v, _)| v),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GenerationPmf;
    use crate::payments::all_schedules;
    use crate::rational::q;

    fn example() -> Instance {
        let pmf = GenerationPmf::new(vec![q(1, 2), q(1, 4), q(1, 8), q(1, 8)]).unwrap();
        let bids = vec![
            Bid::from_gamma(LseId(1), q(3, 1), q(2, 1)),
            Bid::from_gamma(LseId(2), q(2, 1), q(1, 1)),
            Bid::from_gamma(LseId(3), q(13, 32), q(1, 2)),
        ];
        Instance::truthful(pmf, bids).unwrap()
    }

    #[test]
    fn example_passes_every_check() {
        let inst = example();
        let verdicts = run_checks(&inst, &CheckKind::ALL, &DeviationGrid::default()).unwrap();
        for v in &verdicts {
            assert!(v.passed, "{}: {:?}", v.check, v.witness);
            assert!(v.evaluated > 0 || v.check == CheckKind::Ir);
        }
    }

    #[test]
    fn ir_and_ic_need_true_types() {
        let inst = example().without_true_types();
        assert_eq!(check_ir(&inst), Err(Error::MissingTrueTypes));
        assert_eq!(
            check_ic(&inst, &DeviationGrid::default()),
            Err(Error::MissingTrueTypes)
        );
    }

    #[test]
    fn empty_market_ir_is_vacuous() {
        let inst = Instance::truthful(GenerationPmf::degenerate(0), vec![]).unwrap();
        let v = check_ir(&inst).unwrap();
        assert!(v.passed);
        assert_eq!(v.evaluated, 0);
    }

    #[test]
    fn named_deviations_on_example() {
        let inst = example();
        let mimic = expected_payoff_under(&inst, Bid::new(LseId(3), q(2, 1), q(-3, 2))).unwrap();
        assert!(mimic <= Rational::zero());
        assert_eq!(mimic, q(-1, 32));

        let drop_out = expected_payoff_under(&inst, Bid::new(LseId(1), q(0, 1), q(0, 1))).unwrap();
        assert_eq!(drop_out, 0);
        let honest = expected_payoff_under(&inst, inst.bid(LseId(1)).clone()).unwrap();
        assert_eq!(honest, q(55, 32));
    }

    #[test]
    fn default_grid_is_large_enough() {
        let inst = example();
        for id in inst.ids() {
            let points = DeviationGrid::default().points_for(id, &inst).unwrap();
            assert!(points.len() >= 225);
            assert_eq!(&points[0], inst.bid(id));
            assert!(points.contains(&Bid::new(id, q(0, 1), q(0, 1))));
        }
    }

    #[test]
    fn drop_out_grid_reduces_to_ir() {
        let inst = example();
        let grid = DeviationGrid::explicit(vec![(q(0, 1), q(0, 1))]);
        let ic = check_ic(&inst, &grid).unwrap();
        let ir = check_ir(&inst).unwrap();
        assert_eq!(ic.passed, ir.passed);
        assert!(ic.passed);
    }

    #[test]
    fn outsider_bound_values_on_example() {
        // j = 3: 13/32 - (1/2)(1/2) = 5/32 <= (1/4 + 1/8)(1/2) = 3/16.
        let inst = example();
        let v = check_lemmas(&inst).unwrap();
        assert!(v.passed);
        let lhs = q(13, 32) - q(1, 2) * q(1, 2);
        let mid = (q(1, 4) + q(1, 8)) * q(1, 2);
        assert_eq!((lhs.clone(), mid.clone()), (q(5, 32), q(3, 16)));
        assert!(lhs <= mid);
    }

    #[test]
    fn corrupted_schedule_is_caught() {
        let inst = example();
        let sel = solve_stage1_dp(&inst);
        let mut schedules = all_schedules(&sel, &inst).unwrap();
        assert!(check_externality_against(&inst, &schedules).unwrap().passed);
        schedules[0].t_realtime[1] = q(-1, 4);
        let v = check_externality_against(&inst, &schedules).unwrap();
        assert!(!v.passed);
        let w = v.witness.unwrap();
        assert_eq!((w.lse_id, w.w), (Some(LseId(1)), Some(1)));
    }

    #[test]
    fn boundary_on_example() {
        let (v, hits) = check_case_boundary(&example()).unwrap();
        assert!(v.passed);
        assert_eq!(hits, 1);
    }
}
