use std::collections::{BTreeMap, BTreeSet};

use fund_cso::{
    clear_auction, CsoError, CsoKind, CsoPayload, EpochStats, FeeEventKind, FeeModel,
    MarketParams, Marketplace, SubscriptionStatus,
};
use fund_ledger::{asset, cso, dec, strat, AssetId, Dec18, DetRng};

fn market() -> Marketplace {
    Marketplace::new(MarketParams::default())
}

fn alloc_payload(pairs: &[(&str, &str)]) -> CsoPayload {
    CsoPayload::PortfolioAllocation {
        weights: pairs.iter().map(|(a, w)| (asset(a), dec(w))).collect(),
    }
}

fn prices(pairs: &[(&str, &str)]) -> BTreeMap<AssetId, Dec18> {
    pairs.iter().map(|(a, p)| (asset(a), dec(p))).collect()
}

#[test]
fn registration_is_unique() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    assert!(matches!(
        m.register_cso(cso("alpha"), BTreeSet::new()),
        Err(CsoError::DuplicateId(_))
    ));
}

#[test]
fn publish_enforces_declared_kinds_and_nonces() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();

    m.publish_state(&cso("alpha"), 0, alloc_payload(&[("A", "0.5")]), 1).unwrap();
    m.publish_state(&cso("alpha"), 1, alloc_payload(&[("A", "0.6")]), 2).unwrap();

    // same nonce again is stale
    assert!(matches!(
        m.publish_state(&cso("alpha"), 1, alloc_payload(&[("A", "0.1")]), 3),
        Err(CsoError::StaleNonce { .. })
    ));

    // undeclared kind
    assert!(matches!(
        m.publish_state(
            &cso("alpha"),
            2,
            CsoPayload::Categorical { decisions: vec![(asset("A"), 1)] },
            3
        ),
        Err(CsoError::KindNotDeclared { .. })
    ));

    // payload invariant: sum |w| = 1.2 > 1
    assert!(matches!(
        m.publish_state(&cso("alpha"), 2, alloc_payload(&[("A", "0.7"), ("B", "0.5")]), 3),
        Err(CsoError::InvalidPayload(_))
    ));

    // the latest accepted state is the nonce-1 publication
    let latest = m.latest(&cso("alpha"), CsoKind::PortfolioAllocation).unwrap();
    assert_eq!(latest.nonce, 1);
}

#[test]
fn nonce_monotonicity_across_accepted_publications() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    let mut rng = DetRng::new(5, "nonces");
    let mut last_accepted: Option<u64> = None;
    for i in 0..200 {
        let nonce = rng.next_u64() % 50;
        let result = m.publish_state(&cso("alpha"), nonce, alloc_payload(&[("A", "0.5")]), i);
        match last_accepted {
            Some(last) if nonce <= last => assert!(result.is_err()),
            _ => {
                assert!(result.is_ok());
                last_accepted = Some(nonce);
            }
        }
        let latest = m.latest(&cso("alpha"), CsoKind::PortfolioAllocation).unwrap();
        assert_eq!(latest.nonce, last_accepted.unwrap());
    }
}

#[test]
fn subscribe_guards_parties_and_duplicates() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    m.register_strategy(strat("s1"), dec("100")).unwrap();

    m.subscribe(&strat("s1"), &cso("alpha"), FeeModel::Subscription { flat_fee: dec("2") }, 10)
        .unwrap();
    assert!(matches!(
        m.subscribe(&strat("s1"), &cso("alpha"), FeeModel::Subscription { flat_fee: dec("2") }, 10),
        Err(CsoError::AlreadySubscribed { .. })
    ));
    assert!(matches!(
        m.subscribe(&strat("s1"), &cso("ghost"), FeeModel::Subscription { flat_fee: dec("2") }, 10),
        Err(CsoError::UnknownParty(_))
    ));
}

#[test]
fn flat_fee_settles_each_epoch_until_budget_runs_out() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    m.register_strategy(strat("s1"), dec("5")).unwrap();
    m.subscribe(&strat("s1"), &cso("alpha"), FeeModel::Subscription { flat_fee: dec("2") }, 10)
        .unwrap();

    let none = BTreeMap::new();
    // not an epoch boundary
    assert!(m.accrue_signal_fees(7, &none).unwrap().is_empty());

    let ev = m.accrue_signal_fees(10, &none).unwrap();
    assert_eq!(ev.len(), 1);
    assert_eq!(ev[0].kind, FeeEventKind::FlatFee);
    assert_eq!(ev[0].amount, dec("2"));
    assert_eq!(m.fee_budget(&strat("s1")), dec("3"));
    assert_eq!(m.provider_earnings(&cso("alpha")), dec("2"));

    m.accrue_signal_fees(20, &none).unwrap(); // budget 1 left
    let ev = m.accrue_signal_fees(30, &none).unwrap(); // cannot pay 2
    assert_eq!(ev[0].kind, FeeEventKind::Suspended);
    assert_eq!(
        m.subscription(&strat("s1"), &cso("alpha")).unwrap().status,
        SubscriptionStatus::Suspended
    );
    // suspended subscriptions stop settling
    assert!(m.accrue_signal_fees(40, &none).unwrap().is_empty());
}

#[test]
fn participation_carry_clips_at_zero() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    m.register_strategy(strat("s1"), dec("100")).unwrap();
    m.subscribe(
        &strat("s1"),
        &cso("alpha"),
        FeeModel::Participation { co_capital: Dec18::ZERO, carry_rate: dec("0.2") },
        10,
    )
    .unwrap();
    m.note_aggregation_shares(&strat("s1"), &[(cso("alpha"), Dec18::ONE)].into());

    // epoch PnL +10 at carry 0.2 -> fee 2
    let stats: BTreeMap<_, _> =
        [(strat("s1"), EpochStats { pnl: dec("10"), ret: Dec18::ZERO })].into();
    let ev = m.accrue_signal_fees(10, &stats).unwrap();
    assert_eq!(ev.len(), 1);
    assert_eq!(ev[0].kind, FeeEventKind::Carry);
    assert_eq!(ev[0].amount, dec("2"));

    // epoch PnL -5 -> no carry
    let stats: BTreeMap<_, _> =
        [(strat("s1"), EpochStats { pnl: dec("-5"), ret: Dec18::ZERO })].into();
    assert!(m.accrue_signal_fees(20, &stats).unwrap().is_empty());
}

#[test]
fn participation_fee_never_exceeds_carry_times_positive_pnl() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    m.register_strategy(strat("s1"), dec("1000000")).unwrap();
    m.subscribe(
        &strat("s1"),
        &cso("alpha"),
        FeeModel::Participation { co_capital: dec("50"), carry_rate: dec("0.3") },
        1,
    )
    .unwrap();

    let mut rng = DetRng::new(17, "carry");
    for block in 1..=500u64 {
        let pnl = Dec18::from_raw(rng.next_u64() as i128 % (20 * fund_ledger::SCALE) - 10 * fund_ledger::SCALE);
        let share = Dec18::from_raw((rng.next_u64() % fund_ledger::SCALE as u64) as i128);
        m.note_aggregation_shares(&strat("s1"), &[(cso("alpha"), share)].into());
        let stats: BTreeMap<_, _> = [(strat("s1"), EpochStats { pnl, ret: Dec18::ZERO })].into();
        let bound = dec("0.3").try_mul(share.try_mul(pnl).unwrap().max(Dec18::ZERO)).unwrap();
        for ev in m.accrue_signal_fees(block, &stats).unwrap() {
            if ev.kind == FeeEventKind::Carry {
                assert!(ev.amount <= bound, "fee {} over bound {bound} at {block}", ev.amount);
                assert!(!ev.amount.is_negative());
            }
        }
    }
}

#[test]
fn co_capital_marks_pari_passu() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    m.register_strategy(strat("s1"), dec("100")).unwrap();
    m.subscribe(
        &strat("s1"),
        &cso("alpha"),
        FeeModel::Participation { co_capital: dec("50"), carry_rate: Dec18::ZERO },
        10,
    )
    .unwrap();

    // strategy returned +10% this epoch: co-capital 50 -> 55
    let stats: BTreeMap<_, _> =
        [(strat("s1"), EpochStats { pnl: dec("5"), ret: dec("0.1") })].into();
    let ev = m.accrue_signal_fees(10, &stats).unwrap();
    assert_eq!(ev.len(), 1);
    assert_eq!(ev[0].kind, FeeEventKind::CoCapitalMark);
    assert_eq!(ev[0].amount, dec("5"));
    assert_eq!(
        m.subscription(&strat("s1"), &cso("alpha")).unwrap().co_capital_balance,
        dec("55")
    );

    // losses mark down as well
    let stats: BTreeMap<_, _> =
        [(strat("s1"), EpochStats { pnl: dec("-5"), ret: dec("-0.2") })].into();
    let ev = m.accrue_signal_fees(20, &stats).unwrap();
    assert_eq!(ev[0].amount, dec("-11"));
    assert_eq!(
        m.subscription(&strat("s1"), &cso("alpha")).unwrap().co_capital_balance,
        dec("44")
    );
}

#[test]
fn track_record_examples() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();

    // w = [1, 0], price A 100 -> 110: r = 0.10
    m.publish_state(&cso("alpha"), 0, alloc_payload(&[("A", "1"), ("B", "0")]), 1).unwrap();
    let up = m
        .track_signal_performance(&cso("alpha"), &prices(&[("A", "100"), ("B", "7")]), &prices(&[("A", "110"), ("B", "9")]))
        .unwrap()
        .unwrap();
    assert_eq!(up.r, dec("0.1"));

    // all-zero weights give r = 0
    m.publish_state(&cso("alpha"), 1, alloc_payload(&[("A", "0"), ("B", "0")]), 2).unwrap();
    let up = m
        .track_signal_performance(&cso("alpha"), &prices(&[("A", "100")]), &prices(&[("A", "90")]))
        .unwrap()
        .unwrap();
    assert_eq!(up.r, Dec18::ZERO);

    // symmetric moves cancel under equal weights
    m.publish_state(&cso("alpha"), 2, alloc_payload(&[("A", "0.5"), ("B", "0.5")]), 3).unwrap();
    let up = m
        .track_signal_performance(
            &cso("alpha"),
            &prices(&[("A", "100"), ("B", "100")]),
            &prices(&[("A", "110"), ("B", "90")]),
        )
        .unwrap()
        .unwrap();
    assert_eq!(up.r, Dec18::ZERO);

    // missing price surfaces
    assert!(matches!(
        m.track_signal_performance(&cso("alpha"), &prices(&[("A", "1")]), &prices(&[("A", "1")])),
        Err(CsoError::MissingPrice(_))
    ));
}

#[test]
fn signal_return_invariant_under_permutation() {
    let mut rng = DetRng::new(23, "perm");
    for _ in 0..200 {
        let n = 2 + (rng.next_u64() % 5) as usize;
        let assets: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
        let weights: Vec<Dec18> =
            (0..n).map(|_| Dec18::from_raw((rng.next_u64() % (fund_ledger::SCALE as u64 / n as u64)) as i128)).collect();
        let p0: Vec<Dec18> = (0..n)
            .map(|_| Dec18::from_raw(rng.next_u64() as i128 % (100 * fund_ledger::SCALE) + fund_ledger::SCALE))
            .collect();
        let p1: Vec<Dec18> = (0..n)
            .map(|_| Dec18::from_raw(rng.next_u64() as i128 % (100 * fund_ledger::SCALE) + fund_ledger::SCALE))
            .collect();

        let run = |order: Vec<usize>| {
            let mut m = market();
            m.register_cso(cso("x"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
            let payload = CsoPayload::PortfolioAllocation {
                weights: order.iter().map(|&i| (asset(&assets[i]), weights[i])).collect(),
            };
            m.publish_state(&cso("x"), 0, payload, 1).unwrap();
            let prev: BTreeMap<AssetId, Dec18> =
                order.iter().map(|&i| (asset(&assets[i]), p0[i])).collect();
            let now: BTreeMap<AssetId, Dec18> =
                order.iter().map(|&i| (asset(&assets[i]), p1[i])).collect();
            m.track_signal_performance(&cso("x"), &prev, &now).unwrap().unwrap().r
        };

        let forward = run((0..n).collect());
        let mut reversed: Vec<usize> = (0..n).collect();
        reversed.reverse();
        assert_eq!(forward, run(reversed));
    }
}

#[test]
fn auction_examples() {
    // bids {X:5, Y:3, Z:2}, capacity 2 -> winners {X, Y} at price 3
    let bids = vec![(strat("X"), dec("5")), (strat("Y"), dec("3")), (strat("Z"), dec("2"))];
    let clearing = clear_auction(&bids, 2).unwrap();
    assert_eq!(clearing.winners, vec![strat("X"), strat("Y")]);
    assert_eq!(clearing.clearing_price, dec("3"));

    // single bidder wins at own bid
    let clearing = clear_auction(&[(strat("solo"), dec("7"))], 1).unwrap();
    assert_eq!(clearing.winners, vec![strat("solo")]);
    assert_eq!(clearing.clearing_price, dec("7"));

    // exact tie broken toward the lexicographically smaller id
    let clearing = clear_auction(&[(strat("X"), dec("5")), (strat("Y"), dec("5"))], 1).unwrap();
    assert_eq!(clearing.winners, vec![strat("X")]);
    assert_eq!(clearing.clearing_price, dec("5"));

    assert!(matches!(clear_auction(&[], 2), Err(CsoError::NoBids)));
}

/// Brute-force auction properties over all bid subsets with n <= 6.
#[test]
fn auction_properties_brute_force() {
    let ids = ["a", "b", "c", "d", "e", "f"];
    let raw_bids = [5u64, 3, 2, 8, 3, 1];
    for mask in 1u32..(1 << 6) {
        let bids: Vec<_> = (0..6)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| (strat(ids[i]), Dec18::from_int(raw_bids[i] as i64)))
            .collect();
        for capacity in 1..=bids.len() + 1 {
            let clearing = clear_auction(&bids, capacity).unwrap();
            let winner_set: BTreeSet<_> = clearing.winners.iter().cloned().collect();

            // winners form a top-m set: every excluded bid is <= every winning bid
            for (who, bid) in &bids {
                if !winner_set.contains(who) {
                    for w in &clearing.winners {
                        let wbid = bids.iter().find(|(x, _)| x == w).unwrap().1;
                        assert!(*bid <= wbid, "excluded {who} over winner {w}");
                    }
                }
            }
            // clearing price never exceeds a winning bid
            for w in &clearing.winners {
                let wbid = bids.iter().find(|(x, _)| x == w).unwrap().1;
                assert!(clearing.clearing_price <= wbid);
            }
            // raising a losing bid above the clearing price makes it win
            for (who, bid) in &bids {
                if winner_set.contains(who) {
                    continue;
                }
                let mut raised = bids.clone();
                for slot in raised.iter_mut() {
                    if slot.0 == *who {
                        slot.1 = clearing.clearing_price.try_add(bid.try_add(Dec18::ONE).unwrap()).unwrap();
                    }
                }
                let second = clear_auction(&raised, capacity).unwrap();
                assert!(second.winners.contains(who), "raised loser {who} still loses");
            }
        }
    }
}

#[test]
fn auction_creates_subscriptions_and_charges_budgets() {
    let mut m = market();
    m.register_cso(cso("alpha"), BTreeSet::from([CsoKind::PortfolioAllocation])).unwrap();
    m.register_strategy(strat("rich"), dec("100")).unwrap();
    m.register_strategy(strat("poor"), dec("1")).unwrap();

    let outcome = m
        .run_access_auction(
            &cso("alpha"),
            &[(strat("rich"), dec("5")), (strat("poor"), dec("4"))],
            2,
            10,
        )
        .unwrap();
    assert_eq!(outcome.clearing.clearing_price, dec("4"));
    assert_eq!(outcome.subscribed, vec![strat("rich")]);
    assert_eq!(outcome.skipped.len(), 1);
    assert_eq!(m.fee_budget(&strat("rich")), dec("96"));
    let sub = m.subscription(&strat("rich"), &cso("alpha")).unwrap();
    match &sub.model {
        FeeModel::Subscription { flat_fee } => assert_eq!(*flat_fee, dec("4")),
        other => panic!("unexpected model {other:?}"),
    }
}
