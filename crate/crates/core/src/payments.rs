//! Two-part payments, utilities, and settlement.
//!
//! Each selected LSE is charged a day-ahead amount and receives a
//! real-time credit that depends on the realized generation `w`. Both are
//! read off a three-row table driven by the counterfactual selection that
//! excludes the LSE: whether an outsider would replace it (`theta_bar > 0`)
//! and, if so, where that outsider would rank (`r_bar`) relative to the
//! LSE's own rank `i`.
//!
//! | case | condition               | day-ahead | real-time credit                              |
//! |------|-------------------------|-----------|-----------------------------------------------|
//! | 1    | `theta_bar <= 0`        | 0         | `-gamma_(w+1)` for `i <= w <= n-1`            |
//! | 2    | `theta_bar > 0, r_bar > i`  | `v_bar` | `gamma_bar` for `w < i`, `gamma_bar - gamma_(w+1)` for `i <= w < r_bar` |
//! | 3    | `theta_bar > 0, r_bar <= i` | `v_bar` | `gamma_bar` for `w < r_bar`, `gamma_(w)` for `r_bar <= w < i` |
//!
//! Entries outside the listed ranges are zero. [`externality_transfer`]
//! computes the same net transfer a second way, as the welfare the LSE's
//! presence costs everyone else; it is used only to check the table.

use crate::error::Result;
use crate::model::{Bid, Instance, LseId, PaymentCase, PaymentSchedule, Selection};
use crate::rational::Rational;
use crate::solver::{counterfactual, deallocate, CounterfactualResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettlementRow {
    pub lse_id: LseId,
    pub utility: Rational,
    /// `t^d - t^r(w)`, paid by the LSE to the generator.
    pub net_transfer: Rational,
    pub payoff: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettlementReport {
    pub realized_w: usize,
    pub served: Vec<LseId>,
    pub deselected: Vec<LseId>,
    /// One row per LSE, ordered by id.
    pub rows: Vec<SettlementRow>,
    pub generator_revenue: Rational,
}

fn gamma_at(sel: &Selection, rank: usize, inst: &Instance) -> Rational {
    inst.bid(sel.members()[rank - 1]).gamma_hat()
}

/// The case a counterfactual routes to.
pub fn classify(cf: &CounterfactualResult) -> PaymentCase {
    match cf.replacement_rank {
        Some(r_bar) if cf.theta_bar.is_positive() => {
            if r_bar > cf.removed_rank {
                PaymentCase::Case2
            } else {
                PaymentCase::Case3
            }
        }
        _ => PaymentCase::Case1,
    }
}

/// Evaluates one row of the payment table for the member the counterfactual
/// removed. Returns `None` for Case 2 or 3 when there is no replacement;
/// `NotSelected` yields the zero schedule.
pub fn evaluate_case(
    case: PaymentCase,
    cf: &CounterfactualResult,
    sel: &Selection,
    inst: &Instance,
) -> Option<PaymentSchedule> {
    let i = cf.removed_rank;
    let n = sel.len();
    let max_w = inst.max_generation();
    let mut schedule = PaymentSchedule::zero(cf.removed_id, max_w);
    schedule.case = case;

    match case {
        PaymentCase::NotSelected => {}
        PaymentCase::Case1 => {
            for w in i..n.min(max_w + 1) {
                schedule.t_realtime[w] = -gamma_at(sel, w + 1, inst);
            }
        }
        PaymentCase::Case2 | PaymentCase::Case3 => {
            let replacement = inst.bid(cf.replacement?);
            let r_bar = cf.replacement_rank?;
            let gamma_bar = replacement.gamma_hat();
            schedule.t_day_ahead = replacement.v_hat().clone();
            for w in 0..=max_w {
                schedule.t_realtime[w] = if case == PaymentCase::Case2 {
                    if w < i {
                        gamma_bar.clone()
                    } else if w < r_bar {
                        &gamma_bar - gamma_at(sel, w + 1, inst)
                    } else {
                        Rational::zero()
                    }
                } else if w < r_bar {
                    gamma_bar.clone()
                } else if w < i {
                    gamma_at(sel, w, inst)
                } else {
                    Rational::zero()
                };
            }
        }
    }
    Some(schedule)
}

/// Schedule implied by an already computed counterfactual.
pub fn schedule_from_counterfactual(
    cf: &CounterfactualResult,
    sel: &Selection,
    inst: &Instance,
) -> PaymentSchedule {
    evaluate_case(classify(cf), cf, sel, inst).expect("classified case has its inputs")
}

/// Payment schedule of the member at rank `i`.
pub fn payment_schedule(i: usize, sel: &Selection, inst: &Instance) -> Result<PaymentSchedule> {
    let cf = counterfactual(i, sel, inst)?;
    Ok(schedule_from_counterfactual(&cf, sel, inst))
}

/// Schedule for any LSE; outsiders get the zero schedule.
pub fn schedule_for(id: LseId, sel: &Selection, inst: &Instance) -> Result<PaymentSchedule> {
    match sel.rank_of(id) {
        Some(rank) => payment_schedule(rank, sel, inst),
        None => Ok(PaymentSchedule::zero(id, inst.max_generation())),
    }
}

/// Schedules for every LSE in the instance, ordered by id.
pub fn all_schedules(sel: &Selection, inst: &Instance) -> Result<Vec<PaymentSchedule>> {
    inst.ids().map(|id| schedule_for(id, sel, inst)).collect()
}

fn type_of(id: LseId, types: &[Bid]) -> &Bid {
    let bid = &types[id.0 as usize - 1];
    debug_assert_eq!(bid.id(), id);
    bid
}

/// `x_i * (v_i - gamma_i * [w < r_i])`, evaluated with `types`.
pub fn utility(id: LseId, sel: &Selection, w: usize, types: &[Bid]) -> Rational {
    match sel.rank_of(id) {
        None => Rational::zero(),
        Some(rank) => {
            let t = type_of(id, types);
            if w < rank {
                t.v_hat() - t.gamma_hat()
            } else {
                t.v_hat().clone()
            }
        }
    }
}

/// Settles the market at realization `w`. Utilities use the true types when
/// the instance carries them, otherwise the reports.
pub fn settle(sel: &Selection, w: usize, inst: &Instance) -> Result<SettlementReport> {
    let split = deallocate(sel, w, inst)?;
    let schedules = all_schedules(sel, inst)?;
    Ok(settle_with(
        sel,
        w,
        inst,
        split.served,
        split.deselected,
        &schedules,
    ))
}

fn settle_with(
    sel: &Selection,
    w: usize,
    inst: &Instance,
    served: Vec<LseId>,
    deselected: Vec<LseId>,
    schedules: &[PaymentSchedule],
) -> SettlementReport {
    let types = inst.utility_types();
    let rows: Vec<SettlementRow> = schedules
        .iter()
        .map(|s| {
            let utility = utility(s.lse_id, sel, w, types);
            let net_transfer = s.net_transfer(w);
            let payoff = &utility - &net_transfer;
            SettlementRow {
                lse_id: s.lse_id,
                utility,
                net_transfer,
                payoff,
            }
        })
        .collect();
    let generator_revenue = rows.iter().map(|r| &r.net_transfer).sum();
    SettlementReport {
        realized_w: w,
        served,
        deselected,
        rows,
        generator_revenue,
    }
}

/// `E[pi_i]` in closed form: expected utility minus the day-ahead charge
/// plus the expected real-time credit.
pub fn expected_payoff(id: LseId, sel: &Selection, inst: &Instance) -> Result<Rational> {
    let Some(rank) = sel.rank_of(id) else {
        return Ok(Rational::zero());
    };
    let schedule = payment_schedule(rank, sel, inst)?;
    Ok(expected_payoff_with(id, rank, &schedule, inst))
}

pub(crate) fn expected_payoff_with(
    id: LseId,
    rank: usize,
    schedule: &PaymentSchedule,
    inst: &Instance,
) -> Rational {
    let pmf = inst.pmf();
    let t = type_of(id, inst.utility_types());
    let expected_utility = t.v_hat() - t.gamma_hat() * pmf.shortfall_probability(rank);
    expected_utility - &schedule.t_day_ahead + schedule.expected_realtime(pmf)
}

/// `E[pi_i]` as the pmf-weighted average of per-scenario payoffs.
pub fn expected_payoff_by_scenarios(
    id: LseId,
    sel: &Selection,
    inst: &Instance,
) -> Result<Rational> {
    let schedule = schedule_for(id, sel, inst)?;
    let types = inst.utility_types();
    let pmf = inst.pmf();
    Ok((0..=pmf.max_generation())
        .map(|w| pmf.prob(w) * (utility(id, sel, w, types) - schedule.net_transfer(w)))
        .sum())
}

/// Net transfer the member at rank `i` should pay at realization `w`,
/// computed as its externality on the others:
/// `sum_{j != i} u_j(I^{-i}, w) - sum_{j != i} u_j(I, w)` with reported types.
pub fn externality_transfer(
    cf: &CounterfactualResult,
    sel: &Selection,
    w: usize,
    inst: &Instance,
) -> Rational {
    let reported = inst.bids();
    let others = |s: &Selection| -> Rational {
        s.members()
            .iter()
            .filter(|&&id| id != cf.removed_id)
            .map(|&id| utility(id, s, w, reported))
            .sum()
    };
    others(&cf.selection) - others(sel)
}
