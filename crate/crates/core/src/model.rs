//! Domain types: the generation distribution, bids, instances, and ranked
//! selections. All of them are immutable once constructed.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Public identity of a load-serving entity. Ids run from 1 to N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LseId(pub u32);

impl fmt::Display for LseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl LseId {
    fn index(self) -> usize {
        (self.0 as usize).wrapping_sub(1)
    }
}

/// Probability mass function of the integer generation level `W`,
/// indexed by `w = 0..=max_generation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationPmf {
    probs: Vec<Rational>,
    cdf: Vec<Rational>,
}

impl GenerationPmf {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyPmf);
        }
        if let Some((w, value)) = probs.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(Error::NegativeProbability {
                w,
                value: value.clone(),
            });
        }
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = Rational::zero();
        for p in &probs {
            acc += p;
            cdf.push(acc.clone());
        }
        if acc != 1 {
            return Err(Error::PmfNotNormalized { sum: acc });
        }
        Ok(GenerationPmf { probs, cdf })
    }

    /// A point mass at `w`.
    pub fn degenerate(w: usize) -> Self {
        let mut probs = vec![Rational::zero(); w + 1];
        probs[w] = Rational::one();
        GenerationPmf::new(probs).expect("point mass is a valid pmf")
    }

    /// The maximum generation level w̄.
    pub fn max_generation(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// `P(W = w)`, zero above w̄.
    pub fn prob(&self, w: usize) -> Rational {
        self.probs.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// `P(W <= k)`, clamped to 1 above w̄.
    pub fn cdf(&self, k: usize) -> &Rational {
        let last = self.cdf.len() - 1;
        &self.cdf[k.min(last)]
    }

    /// `P(W < rank)`: the probability that the member at `rank` is de-allocated.
    pub fn shortfall_probability(&self, rank: usize) -> Rational {
        match rank {
            0 => Rational::zero(),
            r => self.cdf(r - 1).clone(),
        }
    }

    pub fn check_level(&self, w: usize) -> Result<()> {
        if w > self.max_generation() {
            return Err(Error::WOutOfRange {
                w,
                max: self.max_generation(),
            });
        }
        Ok(())
    }
}

/// One LSE's type: a per-unit valuation and a real-time fulfillment cost.
/// Used both for reported bids and for true types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bid {
    id: LseId,
    v_hat: Rational,
    c_hat: Rational,
}

impl Bid {
    pub fn new(id: LseId, v_hat: Rational, c_hat: Rational) -> Self {
        Bid { id, v_hat, c_hat }
    }

    /// Builds a bid from its valuation and `gamma = v + c`.
    pub fn from_gamma(id: LseId, v_hat: Rational, gamma_hat: Rational) -> Self {
        let c_hat = &gamma_hat - &v_hat;
        Bid { id, v_hat, c_hat }
    }

    pub fn id(&self) -> LseId {
        self.id
    }

    pub fn v_hat(&self) -> &Rational {
        &self.v_hat
    }

    pub fn c_hat(&self) -> &Rational {
        &self.c_hat
    }

    /// Value lost plus cost incurred when this LSE is de-allocated.
    pub fn gamma_hat(&self) -> Rational {
        &self.v_hat + &self.c_hat
    }

    pub fn with_id(&self, id: LseId) -> Bid {
        Bid { id, ..self.clone() }
    }

    /// Rank order: higher gamma first, lower id breaks ties.
    pub fn rank_cmp(&self, other: &Bid) -> Ordering {
        other
            .gamma_hat()
            .cmp(&self.gamma_hat())
            .then(self.id.cmp(&other.id))
    }
}

/// A market: the generation distribution, reported bids, and optionally
/// the LSEs' true types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pmf: GenerationPmf,
    bids: Vec<Bid>,
    true_types: Option<Vec<Bid>>,
}

fn index_by_id(mut bids: Vec<Bid>) -> Result<Vec<Bid>> {
    bids.sort_by_key(Bid::id);
    for pair in bids.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(Error::DuplicateLseId(pair[0].id));
        }
    }
    let count = bids.len();
    for (pos, bid) in bids.iter().enumerate() {
        let expected = LseId(pos as u32 + 1);
        if bid.id != expected {
            return Err(Error::MissingLseId {
                missing: expected,
                count,
            });
        }
    }
    Ok(bids)
}

impl Instance {
    /// Validates and builds an instance. Bids may be given in any order.
    pub fn new(pmf: GenerationPmf, bids: Vec<Bid>, true_types: Option<Vec<Bid>>) -> Result<Self> {
        let bids = index_by_id(bids)?;
        if let Some(bad) = bids.iter().find(|b| b.v_hat.is_negative()) {
            return Err(Error::NegativeValuation {
                id: bad.id,
                value: bad.v_hat.clone(),
            });
        }
        let true_types = match true_types {
            None => None,
            Some(types) => {
                if types.len() != bids.len() {
                    return Err(Error::TrueTypesMismatch);
                }
                let types = index_by_id(types).map_err(|_| Error::TrueTypesMismatch)?;
                if let Some(bad) = types.iter().find(|b| b.v_hat.is_negative()) {
                    return Err(Error::NegativeValuation {
                        id: bad.id,
                        value: bad.v_hat.clone(),
                    });
                }
                Some(types)
            }
        };
        Ok(Instance {
            pmf,
            bids,
            true_types,
        })
    }

    /// An instance whose true types equal its bids.
    pub fn truthful(pmf: GenerationPmf, bids: Vec<Bid>) -> Result<Self> {
        let types = bids.clone();
        Instance::new(pmf, bids, Some(types))
    }

    pub fn pmf(&self) -> &GenerationPmf {
        &self.pmf
    }

    pub fn max_generation(&self) -> usize {
        self.pmf.max_generation()
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    /// Reported bids, ordered by id.
    pub fn bids(&self) -> &[Bid] {
        &self.bids
    }

    pub fn ids(&self) -> impl Iterator<Item = LseId> + '_ {
        self.bids.iter().map(Bid::id)
    }

    pub fn get(&self, id: LseId) -> Option<&Bid> {
        self.bids.get(id.index())
    }

    /// The reported bid of `id`. Panics on an unknown id.
    pub fn bid(&self, id: LseId) -> &Bid {
        self.get(id)
            .unwrap_or_else(|| panic!("unknown LSE id {id}"))
    }

    pub fn true_types(&self) -> Option<&[Bid]> {
        self.true_types.as_deref()
    }

    /// Types used to evaluate utilities: true types when known, otherwise
    /// the reports.
    pub fn utility_types(&self) -> &[Bid] {
        self.true_types.as_deref().unwrap_or(&self.bids)
    }

    /// Same market with bids replaced by the true types.
    pub fn truthful_profile(&self) -> Result<Instance> {
        let types = self.true_types.clone().ok_or(Error::MissingTrueTypes)?;
        Ok(Instance {
            pmf: self.pmf.clone(),
            bids: types.clone(),
            true_types: Some(types),
        })
    }

    /// Same market with one LSE's report replaced.
    pub fn with_bid(&self, bid: Bid) -> Result<Instance> {
        let idx = bid.id.index();
        if idx >= self.bids.len() {
            return Err(Error::UnknownLse(bid.id));
        }
        if bid.v_hat.is_negative() {
            return Err(Error::NegativeValuation {
                id: bid.id,
                value: bid.v_hat.clone(),
            });
        }
        let mut next = self.clone();
        next.bids[idx] = bid;
        Ok(next)
    }

    /// Same market with the true types dropped.
    pub fn without_true_types(&self) -> Instance {
        Instance {
            true_types: None,
            ..self.clone()
        }
    }
}

/// The stage-1 selection, members listed in rank order (rank 1 first).
///
/// A selection is ranked against the bids of the instance that built it;
/// pair it only with that instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    members: Vec<LseId>,
}

impl Selection {
    pub fn empty() -> Self {
        Selection::default()
    }

    /// Ranks `ids` by descending reported gamma, lower id first on ties.
    pub fn ranked<I>(ids: I, inst: &Instance) -> Result<Self>
    where
        I: IntoIterator<Item = LseId>,
    {
        let unique: BTreeSet<LseId> = ids.into_iter().collect();
        let mut bids = Vec::with_capacity(unique.len());
        for id in unique {
            bids.push(inst.get(id).ok_or(Error::UnknownLse(id))?);
        }
        bids.sort_by(|a, b| a.rank_cmp(b));
        Ok(Selection {
            members: bids.into_iter().map(Bid::id).collect(),
        })
    }

    /// Wraps members already listed in rank order.
    pub(crate) fn from_rank_order(members: Vec<LseId>) -> Self {
        Selection { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in rank order.
    pub fn members(&self) -> &[LseId] {
        &self.members
    }

    pub fn contains(&self, id: LseId) -> bool {
        self.members.contains(&id)
    }

    /// 1-based rank of `id`, if selected.
    pub fn rank_of(&self, id: LseId) -> Option<usize> {
        self.members.iter().position(|&m| m == id).map(|p| p + 1)
    }

    /// Rank of `id`, with non-members placed at `max_generation + 1`.
    pub fn rank_or_outside(&self, id: LseId, max_generation: usize) -> usize {
        self.rank_of(id).unwrap_or(max_generation + 1)
    }

    pub fn at_rank(&self, rank: usize) -> Option<LseId> {
        rank.checked_sub(1)
            .and_then(|p| self.members.get(p).copied())
    }

    pub fn check_rank(&self, rank: usize) -> Result<LseId> {
        self.at_rank(rank).ok_or(Error::RankOutOfRange {
            rank,
            n: self.len(),
        })
    }

    /// Member ids in ascending id order.
    pub fn ids_sorted(&self) -> Vec<LseId> {
        let mut ids = self.members.clone();
        ids.sort();
        ids
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, id) in self.ids_sorted().iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("}")
    }
}

/// Which row of the payment table applies to an LSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PaymentCase {
    NotSelected,
    /// No outsider would improve the selection without this LSE.
    Case1,
    /// A replacement exists and ranks below this LSE's position.
    Case2,
    /// A replacement exists and ranks at or above this LSE's position.
    Case3,
}

impl fmt::Display for PaymentCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PaymentCase::NotSelected => "not-selected",
            PaymentCase::Case1 => "case1",
            PaymentCase::Case2 => "case2",
            PaymentCase::Case3 => "case3",
        })
    }
}

/// Day-ahead charge and real-time credit vector for one LSE.
///
/// `t_day_ahead > 0` is paid by the LSE to the generator; `t_realtime[w] > 0`
/// is paid by the generator to the LSE when `W = w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentSchedule {
    pub lse_id: LseId,
    pub t_day_ahead: Rational,
    pub t_realtime: Vec<Rational>,
    pub case: PaymentCase,
}

impl PaymentSchedule {
    pub fn zero(lse_id: LseId, max_generation: usize) -> Self {
        PaymentSchedule {
            lse_id,
            t_day_ahead: Rational::zero(),
            t_realtime: vec![Rational::zero(); max_generation + 1],
            case: PaymentCase::NotSelected,
        }
    }

    /// Net transfer `t^d - t^r(w)` from the LSE to the generator.
    pub fn net_transfer(&self, w: usize) -> Rational {
        &self.t_day_ahead - &self.t_realtime[w]
    }

    /// `E[t^r(W)]`.
    pub fn expected_realtime(&self, pmf: &GenerationPmf) -> Rational {
        self.t_realtime
            .iter()
            .enumerate()
            .map(|(w, t)| t * pmf.prob(w))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn bid(id: u32, v: Rational, c: Rational) -> Bid {
        Bid::new(LseId(id), v, c)
    }

    fn example_pmf() -> GenerationPmf {
        GenerationPmf::new(vec![q(1, 2), q(1, 4), q(1, 8), q(1, 8)]).unwrap()
    }

    #[test]
    fn example_instance_is_valid() {
        let bids = vec![
            bid(2, q(2, 1), q(-1, 1)),
            bid(1, q(3, 1), q(-1, 1)),
            bid(3, q(13, 32), q(3, 32)),
        ];
        let inst = Instance::new(example_pmf(), bids, None).unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(inst.bid(LseId(1)).gamma_hat(), 2);
        assert_eq!(inst.bid(LseId(2)).gamma_hat(), 1);
        assert_eq!(inst.bid(LseId(3)).gamma_hat(), q(1, 2));
        assert_eq!(inst.max_generation(), 3);
    }

    #[test]
    fn empty_market_is_valid() {
        let pmf = GenerationPmf::new(vec![Rational::one()]).unwrap();
        let inst = Instance::new(pmf, vec![], None).unwrap();
        assert!(inst.is_empty());
        assert_eq!(inst.max_generation(), 0);
    }

    #[test]
    fn pmf_errors() {
        assert_eq!(
            GenerationPmf::new(vec![q(1, 2), q(1, 4)]),
            Err(Error::PmfNotNormalized { sum: q(3, 4) })
        );
        assert!(matches!(
            GenerationPmf::new(vec![q(3, 2), q(-1, 2)]),
            Err(Error::NegativeProbability { w: 1, .. })
        ));
        assert_eq!(GenerationPmf::new(vec![]), Err(Error::EmptyPmf));
    }

    #[test]
    fn instance_errors() {
        let dup = vec![bid(1, q(1, 1), q(0, 1)), bid(1, q(2, 1), q(0, 1))];
        assert_eq!(
            Instance::new(example_pmf(), dup, None),
            Err(Error::DuplicateLseId(LseId(1)))
        );
        let gap = vec![bid(1, q(1, 1), q(0, 1)), bid(3, q(2, 1), q(0, 1))];
        assert!(matches!(
            Instance::new(example_pmf(), gap, None),
            Err(Error::MissingLseId {
                missing: LseId(2),
                ..
            })
        ));
        let neg = vec![bid(1, q(-1, 1), q(3, 1))];
        assert!(matches!(
            Instance::new(example_pmf(), neg, None),
            Err(Error::NegativeValuation { .. })
        ));
        let bids = vec![bid(1, q(1, 1), q(0, 1))];
        let types = vec![bid(2, q(1, 1), q(0, 1))];
        assert_eq!(
            Instance::new(example_pmf(), bids, Some(types)),
            Err(Error::TrueTypesMismatch)
        );
    }

    #[test]
    fn cdf_clamps_past_max_generation() {
        let pmf = example_pmf();
        assert_eq!(pmf.cdf(0), &q(1, 2));
        assert_eq!(pmf.cdf(2), &q(7, 8));
        assert_eq!(pmf.cdf(3), &Rational::one());
        assert_eq!(pmf.cdf(10), &Rational::one());
        assert_eq!(pmf.shortfall_probability(1), q(1, 2));
        assert_eq!(pmf.shortfall_probability(0), Rational::zero());
        assert_eq!(pmf.prob(7), Rational::zero());
    }

    #[test]
    fn selection_ranks_by_gamma_then_id() {
        let bids = vec![
            bid(1, q(1, 1), q(0, 1)),
            bid(2, q(3, 1), q(-1, 1)),
            bid(3, q(2, 1), q(0, 1)),
            bid(4, q(5, 1), q(0, 1)),
        ];
        let inst = Instance::new(example_pmf(), bids, None).unwrap();
        let sel = Selection::ranked([LseId(1), LseId(2), LseId(3), LseId(4)], &inst).unwrap();
        assert_eq!(sel.members(), &[LseId(4), LseId(2), LseId(3), LseId(1)]);
        assert_eq!(sel.rank_of(LseId(3)), Some(3));
        assert_eq!(sel.rank_or_outside(LseId(9), 3), 4);
        assert_eq!(sel.to_string(), "{1, 2, 3, 4}");
    }
}
