//! Successive user detection: visit OREs in energy order and decide the
//! users first seen on each ORE by exhaustive search over their messages,
//! with earlier decisions held fixed.

use num_complex::Complex64;

use super::ordering::{build_tree_levels, ore_energy_order, OreOrder};
use super::{check_inputs, residual_metric, DecodeMeta, DecodeResult, Products};
use crate::complexity::CostModel;
use crate::error::Result;
use crate::model::System;
use crate::signal::{ChannelRealization, ReceivedSignal, UserMessage};

/// `y_r` minus the contributions of the users of ORE `ore` whose message is
/// already fixed in `decided`.
pub(crate) fn known_residual(
    system: &System,
    products: &Products,
    y: &ReceivedSignal,
    ore: usize,
    decided: &[Option<usize>],
) -> Vec<Complex64> {
    let mut residual = y.ore(ore).to_vec();
    for (slot, &u) in system.graph().lambda[ore].iter().enumerate() {
        if let Some(x) = decided[u] {
            for (e, p) in residual.iter_mut().zip(products.get(ore, slot, x)) {
                *e -= p;
            }
        }
    }
    residual
}

/// Exhaustive search over the messages of `slots` on one ORE. Returns the
/// best message per slot, its metric and the number of hypotheses tried.
/// Combinations are enumerated with the first slot most significant, so
/// ties resolve to the lexicographically smallest assignment.
pub(crate) fn best_on_ore(
    products: &Products,
    residual: &[Complex64],
    ore: usize,
    slots: &[usize],
    messages: usize,
) -> (Vec<usize>, f64, u64) {
    let count = messages.pow(slots.len() as u32);
    let mut digits = vec![0usize; slots.len()];
    let mut best = (vec![0usize; slots.len()], f64::INFINITY);
    let mut parts = Vec::with_capacity(slots.len());
    for combo in 0..count {
        super::digits_into(combo, messages, &mut digits);
        parts.clear();
        parts.extend(
            slots
                .iter()
                .zip(&digits)
                .map(|(&s, &x)| products.get(ore, s, x)),
        );
        let metric = residual_metric(residual, &parts);
        if metric < best.1 {
            best = (digits.clone(), metric);
        }
    }
    (best.0, best.1, count as u64)
}

pub fn decode_sud(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
) -> Result<DecodeResult> {
    check_inputs(system, y, channel)?;
    let order = ore_energy_order(system, channel);
    decode_sud_ordered(system, y, channel, &order)
}

/// SUD along a given ORE order. `order.ops` is charged as the ordering cost.
pub fn decode_sud_ordered(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    order: &OreOrder,
) -> Result<DecodeResult> {
    check_inputs(system, y, channel)?;
    let products = Products::new(system, channel);
    let (decided, ops) = sud_core(system, y, &products, order)?;
    let codewords = system.config().codewords;
    Ok(DecodeResult {
        estimates: decided
            .into_iter()
            .map(|x| UserMessage::from_index(x.expect("every user is visited"), codewords))
            .collect(),
        ops,
        meta: DecodeMeta {
            decoder: "sud".into(),
            ore_order: order.order.clone(),
            ..DecodeMeta::default()
        },
    })
}

pub(crate) fn sud_core(
    system: &System,
    y: &ReceivedSignal,
    products: &Products,
    order: &OreOrder,
) -> Result<(Vec<Option<usize>>, crate::complexity::OpCount)> {
    let plan = build_tree_levels(system.graph(), &order.order)?;
    let cost = CostModel::new(system);
    let messages = system.messages_per_user();
    let mut ops = order.ops;
    let mut decided: Vec<Option<usize>> = vec![None; system.users()];
    for (level, (&ore, fresh)) in plan.ores.iter().zip(&plan.new_users).enumerate() {
        if !fresh.is_empty() {
            let slots: Vec<usize> = fresh
                .iter()
                .map(|&u| system.graph().slot(ore, u).expect("user of this ORE"))
                .collect();
            let residual = known_residual(system, products, y, ore, &decided);
            let (best, _, tried) = best_on_ore(products, &residual, ore, &slots, messages);
            ops += cost.ore_metric() * tried;
            for (&u, x) in fresh.iter().zip(best) {
                decided[u] = Some(x);
            }
        }
        if plan.complete_after(level, system.users()) {
            break;
        }
    }
    Ok((decided, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::{formula_sud, Dimensions};
    use crate::signal::{draw_channel, transmit_and_receive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_trial(
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

    #[test]
    fn noiseless_is_exact() {
        for m in [2, 4] {
            let sys = System::reference(m, 2);
            for seed in 0..20 {
                let (msgs, h, y) = random_trial(&sys, seed, f64::INFINITY);
                assert_eq!(decode_sud(&sys, &y, &h).unwrap().estimates, msgs);
            }
        }
    }

    #[test]
    fn ops_match_closed_form() {
        let sys = System::reference(2, 2);
        let (_, h, y) = random_trial(&sys, 9, 8.0);
        let r = decode_sud(&sys, &y, &h).unwrap();
        assert_eq!(r.ops, formula_sud(&Dimensions::of(&sys), &[3, 2, 1, 0]));
    }

    /// Greedy reference written directly from the definition: at each level
    /// try every joint message of the new users and keep the first minimum
    /// of the full ORE metric.
    #[test]
    fn matches_direct_greedy_oracle() {
        let sys = System::reference(2, 2);
        let cfg = sys.config();
        let nm = cfg.messages_per_user();
        for seed in 0..30 {
            let (_, h, y) = random_trial(&sys, 100 + seed, 6.0);
            let order = ore_energy_order(&sys, &h).order;
            let mut est: Vec<Option<UserMessage>> = vec![None; 6];
            for &r in &order {
                let users = &sys.graph().lambda[r];
                let fresh: Vec<usize> = users
                    .iter()
                    .copied()
                    .filter(|&u| est[u].is_none())
                    .collect();
                if fresh.is_empty() {
                    continue;
                }
                let mut best = (f64::INFINITY, 0usize);
                for combo in 0..nm.pow(fresh.len() as u32) {
                    let mut trial = est.clone();
                    let mut rest = combo;
                    for &u in fresh.iter().rev() {
                        trial[u] = Some(UserMessage::from_index(rest % nm, cfg.codewords));
                        rest /= nm;
                    }
                    let mut metric = 0.0;
                    for n in 0..cfg.rx_antennas {
                        let mut e = y.ore(r)[n];
                        for &u in users {
                            let msg = trial[u].unwrap();
                            e -= h.gain(u, r, msg.antenna, n)
                                * sys.codebooks().entry(u, r, msg.codeword);
                        }
                        metric += e.norm_sqr();
                    }
                    if metric < best.0 {
                        best = (metric, combo);
                    }
                }
                let mut rest = best.1;
                for &u in fresh.iter().rev() {
                    est[u] = Some(UserMessage::from_index(rest % nm, cfg.codewords));
                    rest /= nm;
                }
            }
            let expected: Vec<UserMessage> = est.into_iter().map(Option::unwrap).collect();
            assert_eq!(
                decode_sud(&sys, &y, &h).unwrap().estimates,
                expected,
                "seed {seed}"
            );
        }
    }
}
