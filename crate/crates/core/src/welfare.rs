//! Second-stage cost, realized social welfare, and expected social welfare
//! of a ranked selection.

use crate::error::Result;
use crate::model::{Bid, GenerationPmf, Instance, LseId, Selection};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareBreakdown {
    /// `(id, v - gamma * P(W < rank))` in rank order.
    pub per_member: Vec<(LseId, Rational)>,
    pub total: Rational,
}

/// Expected welfare contributed by `bid` when it occupies `rank`.
pub fn rank_contribution(bid: &Bid, rank: usize, pmf: &GenerationPmf) -> Rational {
    bid.v_hat() - bid.gamma_hat() * pmf.shortfall_probability(rank)
}

/// Minimum total gamma de-allocated when `w` units arrive: the members at
/// ranks `w+1..=n`.
pub fn second_stage_cost(sel: &Selection, w: usize, inst: &Instance) -> Result<Rational> {
    inst.pmf().check_level(w)?;
    Ok(shortfall_cost(sel, w, inst))
}

fn shortfall_cost(sel: &Selection, w: usize, inst: &Instance) -> Rational {
    sel.members()
        .iter()
        .skip(w)
        .map(|&id| inst.bid(id).gamma_hat())
        .sum()
}

pub fn realized_social_welfare(sel: &Selection, w: usize, inst: &Instance) -> Result<Rational> {
    inst.pmf().check_level(w)?;
    Ok(reported_value(sel, inst) - shortfall_cost(sel, w, inst))
}

fn reported_value(sel: &Selection, inst: &Instance) -> Rational {
    sel.members()
        .iter()
        .map(|&id| inst.bid(id).v_hat().clone())
        .sum()
}

/// `sum_w p_w * SW(sel, w)`, scenario by scenario.
pub fn expected_welfare_by_scenarios(sel: &Selection, inst: &Instance) -> Rational {
    let pmf = inst.pmf();
    let expected_cost: Rational = (0..=pmf.max_generation())
        .map(|w| pmf.prob(w) * shortfall_cost(sel, w, inst))
        .sum();
    reported_value(sel, inst) - expected_cost
}

/// Expected social welfare via the per-rank decomposition. In debug builds
/// it is also checked against [`expected_welfare_by_scenarios`].
pub fn expected_social_welfare(sel: &Selection, inst: &Instance) -> WelfareBreakdown {
    let pmf = inst.pmf();
    let per_member: Vec<(LseId, Rational)> = sel
        .members()
        .iter()
        .enumerate()
        .map(|(pos, &id)| (id, rank_contribution(inst.bid(id), pos + 1, pmf)))
        .collect();
    let total: Rational = per_member.iter().map(|(_, c)| c).sum();
    debug_assert_eq!(
        total,
        expected_welfare_by_scenarios(sel, inst),
        "rank decomposition disagrees with scenario expectation for {sel}"
    );
    WelfareBreakdown { per_member, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
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

    fn sel(ids: &[u32], inst: &Instance) -> Selection {
        Selection::ranked(ids.iter().map(|&i| LseId(i)), inst).unwrap()
    }

    #[test]
    fn second_stage_cost_examples() {
        let inst = example();
        let s = sel(&[1, 2], &inst);
        assert_eq!(second_stage_cost(&s, 0, &inst).unwrap(), 3);
        assert_eq!(second_stage_cost(&s, 1, &inst).unwrap(), 1);
        assert_eq!(second_stage_cost(&s, 2, &inst).unwrap(), 0);
        assert_eq!(
            second_stage_cost(&s, 4, &inst),
            Err(Error::WOutOfRange { w: 4, max: 3 })
        );
    }

    #[test]
    fn realized_welfare_examples() {
        let inst = example();
        let s = sel(&[1, 2], &inst);
        assert_eq!(realized_social_welfare(&s, 3, &inst).unwrap(), 5);
        assert_eq!(realized_social_welfare(&s, 0, &inst).unwrap(), 2);
        let empty = Selection::empty();
        for w in 0..=3 {
            assert_eq!(realized_social_welfare(&empty, w, &inst).unwrap(), 0);
        }
    }

    #[test]
    fn expected_welfare_examples() {
        let inst = example();
        let b = expected_social_welfare(&sel(&[1, 2], &inst), &inst);
        assert_eq!(b.total, q(13, 4));
        assert_eq!(b.per_member, vec![(LseId(1), q(2, 1)), (LseId(2), q(5, 4))]);

        let all = expected_social_welfare(&sel(&[1, 2, 3], &inst), &inst);
        assert_eq!(all.per_member[2], (LseId(3), q(-1, 32)));

        assert_eq!(expected_social_welfare(&Selection::empty(), &inst).total, 0);
    }

    #[test]
    fn oversized_selection_uses_clamped_cdf() {
        // w̄ = 1 with three members: rank 3 is always de-allocated.
        let pmf = GenerationPmf::new(vec![q(1, 2), q(1, 2)]).unwrap();
        let bids = vec![
            Bid::new(LseId(1), q(4, 1), q(0, 1)),
            Bid::new(LseId(2), q(3, 1), q(0, 1)),
            Bid::new(LseId(3), q(2, 1), q(1, 1)),
        ];
        let inst = Instance::new(pmf, bids, None).unwrap();
        let s = sel(&[1, 2, 3], &inst);
        let b = expected_social_welfare(&s, &inst);
        assert_eq!(b.per_member[2], (LseId(3), q(-1, 1)));
        assert_eq!(b.total, expected_welfare_by_scenarios(&s, &inst));
    }
}
