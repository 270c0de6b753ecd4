//! Reference computations used by the integration tests. Everything here is
//! written from the definitions directly and shares no code with the
//! library beyond the data types.

#![allow(dead_code)]

use std::cmp::Ordering;

use svcg::generator::{generate, GeneratorConfig};
use svcg::{Bid, GenerationPmf, Instance, LseId, Rational};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn reference_instance() -> Instance {
    let pmf = GenerationPmf::new(vec![q(1, 2), q(1, 4), q(1, 8), q(1, 8)]).unwrap();
    let bids = vec![
        Bid::from_gamma(LseId(1), q(3, 1), q(2, 1)),
        Bid::from_gamma(LseId(2), q(2, 1), q(1, 1)),
        Bid::from_gamma(LseId(3), q(13, 32), q(1, 2)),
    ];
    Instance::truthful(pmf, bids).unwrap()
}

/// Instances shared by the solver, counterfactual, payment and conservation suites.
pub fn shared_config(seed: u64) -> GeneratorConfig {
    GeneratorConfig::new(seed, (seed % 13) as usize, ((seed / 13) % 9) as usize)
}

pub fn shared_instances() -> Vec<(u64, Instance)> {
    (1..=200)
        .map(|s| (s, generate(&shared_config(s)).unwrap()))
        .collect()
}

/// Smaller instances for the deviation search.
pub fn ic_config(seed: u64) -> GeneratorConfig {
    GeneratorConfig::new(seed, 1 + (seed % 8) as usize, (seed % 6) as usize)
}

fn gamma(b: &Bid) -> Rational {
    b.v_hat().clone() + b.c_hat().clone()
}

/// Higher gamma first, lower id on ties.
fn order(a: &Bid, b: &Bid) -> Ordering {
    gamma(b).cmp(&gamma(a)).then(a.id().cmp(&b.id()))
}

pub fn ranked(ids: &[LseId], bids: &[Bid]) -> Vec<Bid> {
    let mut chosen: Vec<Bid> = ids
        .iter()
        .map(|id| bids.iter().find(|b| b.id() == *id).unwrap().clone())
        .collect();
    chosen.sort_by(order);
    chosen
}

/// Members served when `w` units arrive.
pub fn served(ids: &[LseId], w: usize, bids: &[Bid]) -> Vec<LseId> {
    ranked(ids, bids).iter().take(w).map(Bid::id).collect()
}

/// Realized social welfare: every member's value, less the shortfall cost of
/// everyone who goes unserved.
pub fn welfare_at(ids: &[LseId], w: usize, bids: &[Bid]) -> Rational {
    let order = ranked(ids, bids);
    let mut total = Rational::zero();
    for (k, b) in order.iter().enumerate() {
        total += b.v_hat();
        if k >= w {
            total -= gamma(b);
        }
    }
    total
}

/// Expected social welfare by enumerating generation levels.
pub fn expected_welfare(ids: &[LseId], inst: &Instance) -> Rational {
    inst.pmf()
        .probs()
        .iter()
        .enumerate()
        .map(|(w, p)| p.clone() * welfare_at(ids, w, inst.bids()))
        .sum()
}

pub fn mask_ids(mask: u64, n: usize) -> Vec<LseId> {
    (0..n)
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| LseId(k as u32 + 1))
        .collect()
}

/// Expected welfare of every subset, indexed by bitmask over ids.
pub fn all_subset_values(inst: &Instance) -> Vec<Rational> {
    let n = inst.len();
    (0..1u64 << n)
        .map(|m| expected_welfare(&mask_ids(m, n), inst))
        .collect()
}

/// Best value over subsets avoiding `excluded`.
pub fn best_value(values: &[Rational], excluded: Option<LseId>) -> Rational {
    values
        .iter()
        .enumerate()
        .filter(|(m, _)| excluded.is_none_or(|id| (*m as u64) >> (id.0 - 1) & 1 == 0))
        .map(|(_, v)| v.clone())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Day-ahead utility realized at `w` by `id` under `ids`, with `types`
/// giving values and costs.
pub fn utility(id: LseId, ids: &[LseId], w: usize, types: &[Bid]) -> Rational {
    if !ids.contains(&id) {
        return Rational::zero();
    }
    let me = types.iter().find(|b| b.id() == id).unwrap();
    let mut u = me.v_hat().clone();
    if !served(ids, w, types).contains(&id) {
        u -= gamma(me);
    }
    u
}

pub fn others_utility(id: LseId, ids: &[LseId], w: usize, types: &[Bid]) -> Rational {
    types
        .iter()
        .filter(|b| b.id() != id)
        .map(|b| utility(b.id(), ids, w, types))
        .sum()
}

/// Replacement analysis for the member `removed` of `sel`, by marginal value.
pub struct Replacement {
    pub theta_bar: Option<Rational>,
    pub replacement: Option<Bid>,
    /// Rank of the replacement once it joins `sel` without `removed`.
    pub r_bar: Option<usize>,
}

pub fn replacement(removed: LseId, sel: &[LseId], inst: &Instance) -> Replacement {
    let rest: Vec<LseId> = sel.iter().copied().filter(|id| *id != removed).collect();
    let base = expected_welfare(&rest, inst);
    let mut best: Option<(Rational, Bid)> = None;
    for b in inst.bids() {
        if sel.contains(&b.id()) {
            continue;
        }
        let mut with = rest.clone();
        with.push(b.id());
        let theta = expected_welfare(&with, inst) - base.clone();
        if best.as_ref().is_none_or(|(t, _)| theta > *t) {
            best = Some((theta, b.clone()));
        }
    }
    let Some((theta, bid)) = best else {
        return Replacement {
            theta_bar: None,
            replacement: None,
            r_bar: None,
        };
    };
    if !theta.is_positive() {
        return Replacement {
            theta_bar: Some(theta),
            replacement: None,
            r_bar: None,
        };
    }
    let mut with = rest;
    with.push(bid.id());
    let r_bar = ranked(&with, inst.bids())
        .iter()
        .position(|b| b.id() == bid.id())
        .unwrap()
        + 1;
    Replacement {
        theta_bar: Some(theta),
        replacement: Some(bid),
        r_bar: Some(r_bar),
    }
}

/// The closed-form payment table, straight from its three cases.
/// `gammas` are the selected members' gammas in rank order; `i` is 1-based.
/// Returns `(t_day_ahead, t_realtime)` for levels `0..=max_w`.
pub fn table_payment(
    gammas: &[Rational],
    i: usize,
    replacement: Option<(&Rational, &Rational, usize)>,
    max_w: usize,
    force_case: Option<u8>,
) -> (Rational, Vec<Rational>) {
    let n = gammas.len();
    let g = |rank: usize| gammas[rank - 1].clone();
    let mut t_r = vec![Rational::zero(); max_w + 1];
    match replacement {
        None => {
            for (w, t) in t_r.iter_mut().enumerate() {
                if w >= i && w < n {
                    *t = -g(w + 1);
                }
            }
            (Rational::zero(), t_r)
        }
        Some((v_bar, g_bar, r_bar)) => {
            let case2 = force_case.map_or(r_bar > i, |c| c == 2);
            for (w, t) in t_r.iter_mut().enumerate() {
                *t = if case2 {
                    if w < i {
                        g_bar.clone()
                    } else if w < r_bar {
                        g_bar.clone() - g(w + 1)
                    } else {
                        Rational::zero()
                    }
                } else if w < r_bar {
                    g_bar.clone()
                } else if w < i {
                    g(w)
                } else {
                    Rational::zero()
                };
            }
            (v_bar.clone(), t_r)
        }
    }
}
