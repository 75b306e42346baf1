//! Fixed-complexity sphere decoding over the ORE tree.
//!
//! Level `l` of the tree visits the `l`-th ORE of the energy order. Each node
//! extends its mother node by one joint message of the users first seen on
//! that ORE and adds the full ORE metric (all `d_f` users) to the mother's
//! accumulated metric. Above the last level only the `ρ_l` nodes with the
//! smallest accumulated metric survive; the final decision is the best leaf.

use serde::Serialize;

use super::ordering::{build_tree_levels, ore_energy_order, OreOrder};
use super::sud::known_residual;
use super::{check_inputs, residual_metric, DecodeMeta, DecodeResult, Products};
use crate::complexity::{CostModel, OpCount};
use crate::error::{Error, Result};
use crate::model::{Survivors, System};
use crate::signal::{ChannelRealization, ReceivedSignal, UserMessage};

/// One generated node of the tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeNode {
    #[serde(serialize_with = "level_one_based")]
    pub level: usize,
    /// Metric accumulated from the root down to this node.
    pub metric: f64,
    /// Index of the mother node within the previous level.
    pub parent: Option<usize>,
    /// Messages fixed so far, indexed by user.
    pub assignment: Vec<Option<UserMessage>>,
}

/// Every node generated during one decode, level by level.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TreeTrace {
    #[serde(serialize_with = "crate::one_based::indices")]
    pub ore_order: Vec<usize>,
    pub levels: Vec<Vec<TreeNode>>,
    /// Indices into `levels[l]` of the nodes kept after level `l`; the last
    /// entry holds the single decided leaf.
    pub survivors: Vec<Vec<usize>>,
}

const UNKNOWN: u32 = u32::MAX;

fn level_one_based<S: serde::Serializer>(
    level: &usize,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(*level as u64 + 1)
}

struct Level {
    metrics: Vec<f64>,
    parents: Vec<usize>,
    /// `users` entries per node, `UNKNOWN` where not yet decided.
    assignments: Vec<u32>,
}

struct CoreOutput {
    best: Vec<usize>,
    ops: OpCount,
    clamped: Vec<usize>,
}

fn resolve_survivors(requested: Survivors, available: usize) -> (usize, bool) {
    if requested.is_all() {
        return (available, false);
    }
    let want = requested.0.max(1);
    (want.min(available), want > available)
}

fn fcsd_core(
    system: &System,
    y: &ReceivedSignal,
    products: &Products,
    order: &OreOrder,
    rho: &[Survivors],
    mut trace: Option<&mut TreeTrace>,
) -> Result<CoreOutput> {
    let users = system.users();
    let levels = system.ores();
    if rho.len() + 1 != levels {
        return Err(Error::config(
            "rho",
            format!("expected {} survivor counts, got {}", levels - 1, rho.len()),
        ));
    }
    let plan = build_tree_levels(system.graph(), &order.order)?;
    let node_cost = CostModel::new(system).tree_node();
    let messages = system.messages_per_user();
    let codewords = system.config().codewords;
    let mut ops = order.ops;
    let mut clamped = Vec::new();

    // survivors of the previous level: (metric, assignment)
    let mut kept_metrics = vec![0.0];
    let mut kept_ids: Vec<usize> = vec![0];
    let mut kept_assign = vec![UNKNOWN; users];
    let mut decided = vec![None; users];
    let mut digits = Vec::new();
    let mut parts = Vec::new();

    for (level, (&ore, fresh)) in plan.ores.iter().zip(&plan.new_users).enumerate() {
        let slots: Vec<usize> = fresh
            .iter()
            .map(|&u| system.graph().slot(ore, u).expect("user of this ORE"))
            .collect();
        let combos = messages.pow(fresh.len() as u32);
        digits.resize(fresh.len(), 0);
        let parent_count = kept_metrics.len();
        let mut next = Level {
            metrics: Vec::with_capacity(parent_count * combos),
            parents: Vec::with_capacity(parent_count * combos),
            assignments: Vec::with_capacity(parent_count * combos * users),
        };

        for p in 0..parent_count {
            let assign = &kept_assign[p * users..(p + 1) * users];
            for (d, &a) in decided.iter_mut().zip(assign) {
                *d = (a != UNKNOWN).then_some(a as usize);
            }
            let residual = known_residual(system, products, y, ore, &decided);
            for combo in 0..combos {
                super::digits_into(combo, messages, &mut digits);
                parts.clear();
                parts.extend(
                    slots
                        .iter()
                        .zip(&digits)
                        .map(|(&s, &x)| products.get(ore, s, x)),
                );
                next.metrics
                    .push(kept_metrics[p] + residual_metric(&residual, &parts));
                next.parents.push(kept_ids[p]);
                next.assignments.extend_from_slice(assign);
                let base = next.assignments.len() - users;
                for (&u, &x) in fresh.iter().zip(&digits) {
                    next.assignments[base + u] = x as u32;
                }
            }
        }
        let generated = next.metrics.len();
        ops += node_cost * generated as u64;

        let last = level + 1 == levels;
        let keep = if last {
            1
        } else {
            let (k, was_clamped) = resolve_survivors(rho[level], generated);
            if was_clamped {
                clamped.push(level);
            }
            k
        };
        let chosen = smallest(&next.metrics, keep);

        if let Some(t) = trace.as_deref_mut() {
            t.levels.push(
                (0..generated)
                    .map(|i| TreeNode {
                        level,
                        metric: next.metrics[i],
                        parent: (level > 0).then_some(next.parents[i]),
                        assignment: next.assignments[i * users..(i + 1) * users]
                            .iter()
                            .map(|&a| {
                                (a != UNKNOWN)
                                    .then(|| UserMessage::from_index(a as usize, codewords))
                            })
                            .collect(),
                    })
                    .collect(),
            );
            t.survivors.push(chosen.clone());
        }

        kept_metrics = chosen.iter().map(|&i| next.metrics[i]).collect();
        kept_assign = chosen
            .iter()
            .flat_map(|&i| next.assignments[i * users..(i + 1) * users].iter().copied())
            .collect();
        kept_ids = chosen;
    }

    let best = kept_assign[..users]
        .iter()
        .map(|&a| {
            debug_assert_ne!(a, UNKNOWN);
            a as usize
        })
        .collect();
    Ok(CoreOutput { best, ops, clamped })
}

/// Indices of the `keep` smallest metrics, ties to the lower index, returned
/// in ascending index order.
fn smallest(metrics: &[f64], keep: usize) -> Vec<usize> {
    if keep >= metrics.len() {
        return (0..metrics.len()).collect();
    }
    let mut idx: Vec<usize> = (0..metrics.len()).collect();
    let by_metric = |a: &usize, b: &usize| metrics[*a].total_cmp(&metrics[*b]).then(a.cmp(b));
    idx.select_nth_unstable_by(keep - 1, by_metric);
    idx.truncate(keep);
    idx.sort_unstable();
    idx
}

fn finish(system: &System, order: &OreOrder, out: CoreOutput) -> DecodeResult {
    let codewords = system.config().codewords;
    DecodeResult {
        estimates: out
            .best
            .into_iter()
            .map(|x| UserMessage::from_index(x, codewords))
            .collect(),
        ops: out.ops,
        meta: DecodeMeta {
            decoder: "fcsd".into(),
            ore_order: order.order.clone(),
            clamped_levels: out.clamped,
            ..DecodeMeta::default()
        },
    }
}

pub fn decode_fcsd(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    rho: &[Survivors],
) -> Result<DecodeResult> {
    check_inputs(system, y, channel)?;
    let order = ore_energy_order(system, channel);
    decode_fcsd_ordered(system, y, channel, &order, rho)
}

pub fn decode_fcsd_ordered(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    order: &OreOrder,
    rho: &[Survivors],
) -> Result<DecodeResult> {
    check_inputs(system, y, channel)?;
    let products = Products::new(system, channel);
    let out = fcsd_core(system, y, &products, order, rho, None)?;
    Ok(finish(system, order, out))
}

/// FCSD that also records every generated node.
pub fn decode_fcsd_traced(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    rho: &[Survivors],
) -> Result<(DecodeResult, TreeTrace)> {
    check_inputs(system, y, channel)?;
    let order = ore_energy_order(system, channel);
    let products = Products::new(system, channel);
    let mut trace = TreeTrace {
        ore_order: order.order.clone(),
        ..TreeTrace::default()
    };
    let out = fcsd_core(system, y, &products, &order, rho, Some(&mut trace))?;
    Ok((finish(system, &order, out), trace))
}

/// Metric accumulated along the tree path of a complete `assignment`, one
/// entry per level of `order`. With a noise-free `y` this is the
/// non-centrality of that path relative to the transmitted one.
pub fn path_metrics(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    order: &[usize],
    assignment: &[UserMessage],
) -> Result<Vec<f64>> {
    check_inputs(system, y, channel)?;
    let cfg = system.config();
    for msg in assignment {
        msg.check(cfg)?;
    }
    let products = Products::new(system, channel);
    let plan = build_tree_levels(system.graph(), order)?;
    let mut acc = 0.0;
    Ok(plan
        .ores
        .iter()
        .map(|&r| {
            let parts: Vec<_> = system.graph().lambda[r]
                .iter()
                .enumerate()
                .map(|(slot, &u)| products.get(r, slot, assignment[u].index(cfg.codewords)))
                .collect();
            acc += residual_metric(y.ore(r), &parts);
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::{fcsd_visited_nodes, formula_fcsd, Dimensions};
    use crate::signal::{draw_channel, transmit_and_receive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trial(
        sys: &System,
        seed: u64,
        snr: f64,
    ) -> (Vec<UserMessage>, ChannelRealization, ReceivedSignal) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = sys.config();
        let msgs: Vec<UserMessage> = (0..cfg.users)
            .map(|_| {
                UserMessage::new(
                    rng.gen_range(0..cfg.tx_antennas),
                    rng.gen_range(0..cfg.codewords),
                )
            })
            .collect();
        let h = draw_channel(&mut rng, cfg);
        let y = transmit_and_receive(sys, &msgs, &h, snr, &mut rng).unwrap();
        (msgs, h, y)
    }

    fn rho(v: &[usize]) -> Vec<Survivors> {
        v.iter().map(|&n| Survivors(n)).collect()
    }

    #[test]
    fn smallest_keeps_generation_order() {
        assert_eq!(smallest(&[5.0, 1.0, 3.0, 1.0, 0.5], 3), vec![1, 3, 4]);
        assert_eq!(smallest(&[2.0, 2.0, 2.0], 2), vec![0, 1]);
        assert_eq!(smallest(&[2.0], 4), vec![0]);
    }

    #[test]
    fn ops_and_node_counts_match_closed_form() {
        let sys = System::reference(2, 2);
        let (_, h, y) = trial(&sys, 1, 10.0);
        let dims = Dimensions::of(&sys);
        for r in [[35, 70, 50], [0, 0, 0], [1, 600, 5000], [512, 2, 3]] {
            let (res, tr) = decode_fcsd_traced(&sys, &y, &h, &rho(&r)).unwrap();
            let nodes: usize = tr.levels.iter().map(Vec::len).sum();
            assert_eq!(
                nodes as u64,
                fcsd_visited_nodes(&dims, &[3, 2, 1, 0], &rho(&r))
            );
            assert_eq!(
                res.ops,
                formula_fcsd(&dims, &[3, 2, 1, 0], &rho(&r)),
                "{r:?}"
            );
        }
    }

    #[test]
    fn clamping_is_reported() {
        let sys = System::reference(2, 2);
        let (_, h, y) = trial(&sys, 2, 10.0);
        let res = decode_fcsd(&sys, &y, &h, &rho(&[1000, 10, 100_000])).unwrap();
        assert_eq!(res.meta.clamped_levels, vec![0, 2]);
        let all = decode_fcsd(&sys, &y, &h, &[Survivors::ALL; 3]).unwrap();
        assert!(all.meta.clamped_levels.is_empty());
    }

    #[test]
    fn wrong_rho_length_is_rejected() {
        let sys = System::reference(2, 2);
        let (_, h, y) = trial(&sys, 2, 10.0);
        assert!(decode_fcsd(&sys, &y, &h, &rho(&[3, 3])).is_err());
    }

    #[test]
    fn noiseless_is_exact() {
        for (m, r) in [(2, [35, 70, 50]), (4, [110, 320, 300])] {
            let sys = System::reference(m, 2);
            for seed in 0..10 {
                let (msgs, h, y) = trial(&sys, seed, f64::INFINITY);
                assert_eq!(decode_fcsd(&sys, &y, &h, &rho(&r)).unwrap().estimates, msgs);
            }
        }
    }

    #[test]
    fn trace_is_consistent() {
        let sys = System::reference(2, 2);
        let (_, h, y) = trial(&sys, 4, 5.0);
        let (res, tr) = decode_fcsd_traced(&sys, &y, &h, &rho(&[35, 70, 50])).unwrap();
        assert_eq!(tr.levels.len(), 4);
        for l in 1..4 {
            for node in &tr.levels[l] {
                let p = node.parent.unwrap();
                assert!(tr.survivors[l - 1].contains(&p));
                let mother = &tr.levels[l - 1][p];
                assert!(node.metric >= mother.metric);
                for (a, b) in mother.assignment.iter().zip(&node.assignment) {
                    if a.is_some() {
                        assert_eq!(a, b);
                    }
                }
            }
        }
        let leaf = &tr.levels[3][tr.survivors[3][0]];
        let est: Vec<UserMessage> = leaf.assignment.iter().map(|a| a.unwrap()).collect();
        assert_eq!(est, res.estimates);
        let along = path_metrics(&sys, &y, &h, &tr.ore_order, &est).unwrap();
        assert!((along[3] - leaf.metric).abs() < 1e-9);
    }

    #[test]
    fn path_metric_of_truth_is_zero_without_noise() {
        let sys = System::reference(2, 3);
        let (msgs, h, y) = trial(&sys, 8, f64::INFINITY);
        let along = path_metrics(&sys, &y, &h, &[0, 1, 2, 3], &msgs).unwrap();
        assert!(along.iter().all(|&m| m < 1e-20));
    }
}
