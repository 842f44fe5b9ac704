mod common;

use hoo_core::env::{make_garland_env, make_norm_power_env, EnvNorm};
use hoo_core::variants::truncated_depth;
use hoo_core::{CoverTree, Environment, HooConfig, HooTree, LocalHoo, RegimeSchedule, RngStream, TruncatedHoo, ZHoo};
use proptest::prelude::*;

fn env_and_config(two_d: bool) -> (Box<dyn Environment>, CoverTree, HooConfig) {
    if two_d {
        (
            Box::new(make_norm_power_env(2, 2.0, EnvNorm::Supremum).unwrap()),
            CoverTree::new(2).unwrap(),
            HooConfig::new(4.0, 0.5).unwrap(),
        )
    } else {
        (
            Box::new(make_garland_env()),
            CoverTree::new(1).unwrap(),
            HooConfig::new(1.0, 0.5).unwrap(),
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn basic_tree_invariants(seed in any::<u64>(), horizon in 1000u64..1200, two_d in any::<bool>()) {
        let (env, cover, cfg) = env_and_config(two_d);
        let mut tree = HooTree::new(cover, cfg);
        let mut rng = RngStream::new(seed, 0);
        let mut log = Vec::new();
        for t in 1..=horizon {
            let peek = tree.select_node(&mut rng.clone());
            let record = tree.play_round(env.as_ref(), &mut rng);
            prop_assert_eq!(record.node, peek.node);
            prop_assert_eq!(record.round, t);
            log.push(record);
            prop_assert_eq!(tree.len() as u64, t);
            if t % 97 == 0 || t == horizon {
                common::check_bounds(&tree, t).map_err(TestCaseError::fail)?;
                let path = tree.select_node(&mut rng.clone()).path;
                common::check_path(&tree, &path[..path.len() - 1]).map_err(TestCaseError::fail)?;
            }
        }
        common::check_replay(&tree, &log).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn truncated_stays_within_depth(seed in any::<u64>(), n0 in 1000u64..1500, two_d in any::<bool>()) {
        let (env, cover, cfg) = env_and_config(two_d);
        let cap = truncated_depth(n0, cfg.nu1, cfg.rho).unwrap();
        let mut hoo = TruncatedHoo::new(cover, cfg, n0).unwrap();
        let mut rng = RngStream::new(seed, 1);
        let mut log = Vec::new();
        for _ in 0..n0 {
            let r = hoo.play_round(env.as_ref(), &mut rng);
            prop_assert!(r.node.depth <= cap);
            prop_assert!(hoo.touched_last() <= cap as usize + 1);
            log.push(r);
        }
        prop_assert!(hoo.tree().max_depth().unwrap() <= cap);
        prop_assert!(hoo.touched_total() <= (cap as u64 + 1) * n0);
        common::check_replay(hoo.tree(), &log).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn zero_start_depth_matches_basic(seed in any::<u64>(), two_d in any::<bool>()) {
        let (env, cover, cfg) = env_and_config(two_d);
        let mut basic = HooTree::new(cover, cfg);
        let mut z0 = ZHoo::new(cover, cfg, 0).unwrap();
        let (mut ra, mut rb) = (RngStream::new(seed, 4), RngStream::new(seed, 4));
        for _ in 0..1000 {
            prop_assert_eq!(basic.play_round(env.as_ref(), &mut ra), z0.play_round(env.as_ref(), &mut rb));
        }
    }

    #[test]
    fn zhoo_invariants(seed in any::<u64>(), z in 1u32..5, two_d in any::<bool>()) {
        let (env, cover, cfg) = env_and_config(two_d);
        let mut hoo = ZHoo::new(cover, cfg, z).unwrap();
        let mut rng = RngStream::new(seed, 2);
        let mut log = Vec::new();
        for t in 1..=1000u64 {
            let r = hoo.play_round(env.as_ref(), &mut rng);
            prop_assert!(r.node.depth >= z);
            if t <= 1 << z {
                prop_assert_eq!((r.node.depth, r.node.index), (z, t as u128));
            }
            log.push(r);
        }
        prop_assert_eq!(hoo.tree().len(), 1000);
        common::check_bounds(hoo.tree(), 1000).map_err(TestCaseError::fail)?;
        common::check_replay(hoo.tree(), &log).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn local_hoo_restarts_each_regime(seed in any::<u64>(), two_d in any::<bool>()) {
        let (env, cover, cfg) = env_and_config(two_d);
        let mut hoo = LocalHoo::new(cover, cfg);
        let mut rng = RngStream::new(seed, 3);
        for t in 1..=1023u64 {
            let r = hoo.play_round(env.as_ref(), &mut rng);
            let regime = RegimeSchedule::regime_of(t);
            prop_assert_eq!(r.round, t);
            prop_assert_eq!(hoo.regime(), regime);
            prop_assert!(r.node.depth >= RegimeSchedule::depth(regime));
            prop_assert_eq!(hoo.current().tree().len() as u64, t - RegimeSchedule::start(regime) + 1);
        }
    }
}
