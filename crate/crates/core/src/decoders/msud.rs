//! Modified SUD: start from the SUD decision and refine each user's message
//! against the current estimates of all other users.

use serde::Serialize;

use super::ordering::{ore_energy_order, OreOrder};
use super::sud::sud_core;
use super::{argmin, check_inputs, residual_metric, DecodeMeta, DecodeResult, Products};
use crate::complexity::CostModel;
use crate::error::Result;
use crate::model::System;
use crate::signal::{ChannelRealization, ReceivedSignal, UserMessage};

/// Update schedule of the refinement sweeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Schedule {
    /// Every user is refined against the estimates of the previous sweep.
    #[default]
    Jacobi,
    /// Users are refined in index order, each seeing the updates made
    /// earlier in the same sweep.
    GaussSeidel,
}

pub fn decode_msud(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    iterations: usize,
    schedule: Schedule,
) -> Result<DecodeResult> {
    check_inputs(system, y, channel)?;
    let order = ore_energy_order(system, channel);
    decode_msud_ordered(system, y, channel, &order, iterations, schedule)
}

pub fn decode_msud_ordered(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    order: &OreOrder,
    iterations: usize,
    schedule: Schedule,
) -> Result<DecodeResult> {
    check_inputs(system, y, channel)?;
    let products = Products::new(system, channel);
    let (decided, mut ops) = sud_core(system, y, &products, order)?;
    let mut current: Vec<usize> = decided
        .into_iter()
        .map(|x| x.expect("SUD decides all users"))
        .collect();

    let graph = system.graph();
    let cost = CostModel::new(system);
    let messages = system.messages_per_user();
    let mut parts = Vec::with_capacity(system.d_f());
    for _ in 0..iterations {
        let previous = current.clone();
        for u in 0..system.users() {
            let others = match schedule {
                Schedule::Jacobi => &previous,
                Schedule::GaussSeidel => &current,
            };
            let metrics = (0..messages).map(|x| {
                graph.omega[u]
                    .iter()
                    .map(|&r| {
                        parts.clear();
                        parts.extend(graph.lambda[r].iter().enumerate().map(|(slot, &v)| {
                            products.get(r, slot, if v == u { x } else { others[v] })
                        }));
                        residual_metric(y.ore(r), &parts)
                    })
                    .sum::<f64>()
            });
            let (best, _) = argmin(metrics.collect::<Vec<_>>()).expect("at least one message");
            // charged at one single-ORE metric per hypothesis
            ops += cost.ore_metric() * messages as u64;
            current[u] = best;
        }
    }

    let codewords = system.config().codewords;
    Ok(DecodeResult {
        estimates: current
            .into_iter()
            .map(|x| UserMessage::from_index(x, codewords))
            .collect(),
        ops,
        meta: DecodeMeta {
            decoder: "msud".into(),
            iterations,
            ore_order: order.order.clone(),
            ..DecodeMeta::default()
        },
    })
}
