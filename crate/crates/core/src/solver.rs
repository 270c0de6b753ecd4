//! Stage-1 winner determination, stage-2 de-allocation, and the
//! counterfactual selection that excludes one selected LSE.
//!
//! The production solver is [`solve_stage1_dp`]. It sorts every LSE by
//! descending gamma and runs a knapsack-style DP over `(prefix, count)`:
//! the `k`-th chosen LSE in that order sits at rank `k` and adds
//! `v - gamma * P(W < k)`. [`solve_stage1_bruteforce`] scores every subset
//! directly from the two-stage objective and is kept as its oracle.
//!
//! Ties between equally valued selections go to the smaller selection,
//! then to the lexicographically smallest id set.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Bid, Instance, LseId, Selection};
use crate::rational::Rational;
use crate::welfare::{expected_social_welfare, rank_contribution};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;

/// Best outsider contribution when one member is removed. `NegInfinity`
/// when every LSE is already selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaBar {
    NegInfinity,
    Value(Rational),
}

impl ThetaBar {
    pub fn is_positive(&self) -> bool {
        matches!(self, ThetaBar::Value(v) if v.is_positive())
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            ThetaBar::NegInfinity => None,
            ThetaBar::Value(v) => Some(v),
        }
    }
}

impl fmt::Display for ThetaBar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaBar::NegInfinity => f.write_str("-inf"),
            ThetaBar::Value(v) => write!(f, "{v}"),
        }
    }
}

/// The optimal selection once the member at `removed_rank` is excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterfactualResult {
    pub removed_id: LseId,
    pub removed_rank: usize,
    pub theta_bar: ThetaBar,
    /// The outsider that takes the freed slot, present iff `theta_bar > 0`.
    pub replacement: Option<LseId>,
    /// Rank of `replacement` within `selection`.
    pub replacement_rank: Option<usize>,
    pub selection: Selection,
    /// Expected social welfare of `selection`.
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deallocation {
    /// Members with rank `<= w`, in rank order.
    pub served: Vec<LseId>,
    /// Members with rank `> w`, in rank order.
    pub deselected: Vec<LseId>,
}

/// Expected welfare of every subset, scored from the two-stage objective:
/// total reported value minus `sum_{w < n} p_w * (cheapest de-allocation of
/// size n - w)`. Index bit `k` stands for LSE id `k + 1`.
pub fn subset_values(inst: &Instance, cap: usize) -> Result<Vec<Rational>> {
    let n = inst.len();
    if n > cap {
        return Err(Error::InstanceTooLarge { n, cap });
    }
    Ok((0..1u64 << n)
        .into_par_iter()
        .map(|mask| subset_value(inst, mask))
        .collect())
}

fn subset_value(inst: &Instance, mask: u64) -> Rational {
    let pmf = inst.pmf();
    let members: Vec<&Bid> = inst
        .bids()
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, b)| b)
        .collect();
    let mut gammas: Vec<Rational> = members.iter().map(|b| b.gamma_hat()).collect();
    gammas.sort_by(|a, b| b.cmp(a));
    let value: Rational = members.iter().map(|b| b.v_hat()).sum();

    // The cheapest de-allocation of size n - w drops the n - w smallest gammas.
    let mut expected_cost = Rational::zero();
    let mut dropped = Rational::zero();
    for w in (0..gammas.len()).rev() {
        dropped += &gammas[w];
        let p = pmf.prob(w);
        if !p.is_zero() {
            expected_cost += p * &dropped;
        }
    }
    value - expected_cost
}

fn mask_ids(mask: u64) -> Vec<LseId> {
    (0..64)
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| LseId(k as u32 + 1))
        .collect()
}

fn prefers(value: &Rational, mask: u64, best_value: &Rational, best_mask: u64) -> bool {
    match value.cmp(best_value) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let (a, b) = (mask.count_ones(), best_mask.count_ones());
            a < b || (a == b && mask_ids(mask) < mask_ids(best_mask))
        }
    }
}

/// Best subset among those that `allowed` admits, with the solver tie-break.
pub fn best_subset(values: &[Rational], allowed: impl Fn(u64) -> bool) -> (u64, Rational) {
    let mut best: Option<(u64, &Rational)> = None;
    for (mask, value) in values.iter().enumerate() {
        let mask = mask as u64;
        if !allowed(mask) {
            continue;
        }
        match best {
            Some((bm, bv)) if !prefers(value, mask, bv, bm) => {}
            _ => best = Some((mask, value)),
        }
    }
    let (mask, value) = best.expect("the empty subset is always admissible");
    (mask, value.clone())
}

/// Power-set winner determination with the default cap.
pub fn solve_stage1_bruteforce(inst: &Instance) -> Result<Selection> {
    solve_stage1_bruteforce_with_cap(inst, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn solve_stage1_bruteforce_with_cap(inst: &Instance, cap: usize) -> Result<Selection> {
    let values = subset_values(inst, cap)?;
    let (mask, _) = best_subset(&values, |_| true);
    Selection::ranked(mask_ids(mask), inst)
}

/// Power-set optimum over subsets that leave out `excluded`.
pub fn solve_excluding_bruteforce(
    inst: &Instance,
    excluded: LseId,
    cap: usize,
) -> Result<(Selection, Rational)> {
    if inst.get(excluded).is_none() {
        return Err(Error::UnknownLse(excluded));
    }
    let values = subset_values(inst, cap)?;
    let bit = 1u64 << (excluded.0 - 1);
    let (mask, value) = best_subset(&values, |m| m & bit == 0);
    Ok((Selection::ranked(mask_ids(mask), inst)?, value))
}

struct RankedPool<'a> {
    order: Vec<&'a Bid>,
    inst: &'a Instance,
}

impl<'a> RankedPool<'a> {
    fn new(inst: &'a Instance) -> Self {
        let mut order: Vec<&Bid> = inst.bids().iter().collect();
        order.sort_by(|a, b| a.rank_cmp(b));
        RankedPool { order, inst }
    }

    /// Best value for each selection size under the include/exclude
    /// constraints in `forced` (indexed like `order`).
    fn best_by_count(&self, forced: &[Option<bool>]) -> Vec<Option<Rational>> {
        let pmf = self.inst.pmf();
        let mut best: Vec<Option<Rational>> = vec![None; self.order.len() + 1];
        best[0] = Some(Rational::zero());
        for (pos, bid) in self.order.iter().enumerate() {
            let mut next: Vec<Option<Rational>> = vec![None; best.len()];
            for k in 0..=pos {
                let Some(base) = &best[k] else { continue };
                if forced[pos] != Some(true) {
                    keep_max(&mut next[k], base.clone());
                }
                if forced[pos] != Some(false) {
                    keep_max(&mut next[k + 1], base + rank_contribution(bid, k + 1, pmf));
                }
            }
            best = next;
        }
        best
    }
}

fn keep_max(slot: &mut Option<Rational>, candidate: Rational) {
    if slot.as_ref().is_none_or(|b| candidate > *b) {
        *slot = Some(candidate);
    }
}

/// Exact DP winner determination.
pub fn solve_stage1_dp(inst: &Instance) -> Selection {
    let pool = RankedPool::new(inst);
    let mut forced: Vec<Option<bool>> = vec![None; pool.order.len()];
    let best = pool.best_by_count(&forced);

    let optimum = best
        .iter()
        .flatten()
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let size = best
        .iter()
        .position(|b| b.as_ref() == Some(&optimum))
        .expect("optimum is attained by some size");

    // Fix membership id by id, keeping an LSE whenever an optimal selection
    // of the same size still exists; this yields the smallest id set.
    let mut by_id: Vec<usize> = (0..pool.order.len()).collect();
    by_id.sort_by_key(|&pos| pool.order[pos].id());
    for pos in by_id {
        forced[pos] = Some(true);
        if pool.best_by_count(&forced)[size].as_ref() != Some(&optimum) {
            forced[pos] = Some(false);
        }
    }

    let members = pool
        .order
        .iter()
        .zip(&forced)
        .filter(|(_, f)| **f == Some(true))
        .map(|(b, _)| b.id())
        .collect();
    Selection::from_rank_order(members)
}

pub fn deallocate(sel: &Selection, w: usize, inst: &Instance) -> Result<Deallocation> {
    inst.pmf().check_level(w)?;
    let cut = w.min(sel.len());
    Ok(Deallocation {
        served: sel.members()[..cut].to_vec(),
        deselected: sel.members()[cut..].to_vec(),
    })
}

fn gamma_at(sel: &Selection, rank: usize, inst: &Instance) -> Rational {
    inst.bid(sel.members()[rank - 1]).gamma_hat()
}

/// Welfare outsider `j` would add to the selection without the member at
/// rank `i`.
pub fn theta(i: usize, j: LseId, sel: &Selection, inst: &Instance) -> Result<Rational> {
    sel.check_rank(i)?;
    let candidate = inst.get(j).ok_or(Error::UnknownLse(j))?;
    if sel.contains(j) {
        return Err(Error::IsAMember(j));
    }
    Ok(theta_unchecked(i, candidate, sel, inst))
}

fn theta_unchecked(i: usize, candidate: &Bid, sel: &Selection, inst: &Instance) -> Rational {
    let pmf = inst.pmf();
    let gamma_j = candidate.gamma_hat();
    let mut value = candidate.v_hat() - &gamma_j * pmf.prob(0);
    let last = (sel.len() - 1).min(pmf.max_generation());
    for w in 1..=last {
        // The w-th highest gamma among the remaining members.
        let rank = if w < i { w } else { w + 1 };
        let gamma = gamma_at(sel, rank, inst).min(gamma_j.clone());
        value -= pmf.prob(w) * gamma;
    }
    value
}

/// Optimal selection excluding the member at rank `i`: the rest of the
/// selection, plus the best outsider when it contributes positively.
pub fn counterfactual(i: usize, sel: &Selection, inst: &Instance) -> Result<CounterfactualResult> {
    let removed_id = sel.check_rank(i)?;

    let mut best: Option<(&Bid, Rational)> = None;
    for bid in inst.bids().iter().filter(|b| !sel.contains(b.id())) {
        let value = theta_unchecked(i, bid, sel, inst);
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((bid, value));
        }
    }
    let theta_bar = match &best {
        None => ThetaBar::NegInfinity,
        Some((_, v)) => ThetaBar::Value(v.clone()),
    };

    let remaining = sel.members().iter().copied().filter(|&id| id != removed_id);
    let replacement = best
        .filter(|(_, v)| v.is_positive())
        .map(|(bid, _)| bid.id());
    let selection = Selection::ranked(remaining.chain(replacement), inst)?;
    let replacement_rank = replacement.and_then(|id| selection.rank_of(id));
    let value = expected_social_welfare(&selection, inst).total;

    Ok(CounterfactualResult {
        removed_id,
        removed_rank: i,
        theta_bar,
        replacement,
        replacement_rank,
        selection,
        value,
    })
}
