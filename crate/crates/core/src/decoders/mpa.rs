//! Message passing on the SCMA factor graph, in the log domain.
//!
//! Function nodes are OREs and variable nodes are users. Each iteration
//! updates every FN→VN message from the Gaussian likelihood of the ORE and
//! the incoming VN→FN messages, then every VN→FN message as the product of
//! the other incoming FN→VN messages. All messages are normalized log
//! probabilities over the `N_t M` messages of a user and are combined with
//! max-shifted log-sum-exp.

use serde::Serialize;

use super::{check_inputs, residual_metric, DecodeMeta, DecodeResult, Products};
use crate::complexity::CostModel;
use crate::error::{Error, Result};
use crate::model::System;
use crate::signal::{ChannelRealization, ReceivedSignal, UserMessage};

/// Noise variance used in the likelihood when the signal is noiseless.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Snapshot of all edge messages, as probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MessageTable {
    /// Completed iterations when the snapshot was taken.
    pub iteration: usize,
    /// `(ore, user)` for every edge, ORE-major.
    #[serde(serialize_with = "crate::one_based::pairs")]
    pub edges: Vec<(usize, usize)>,
    pub var_to_fn: Vec<Vec<f64>>,
    pub fn_to_var: Vec<Vec<f64>>,
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn normalize(log_probs: &mut [f64]) {
    let z = log_sum_exp(log_probs);
    for v in log_probs.iter_mut() {
        *v -= z;
    }
}

struct Graph {
    /// Edge id of `(ore, slot)`.
    edge: Vec<Vec<usize>>,
    /// For every user, its edges.
    user_edges: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    fn new(system: &System) -> Self {
        let g = system.graph();
        let mut edges = Vec::new();
        let mut user_edges = vec![Vec::new(); system.users()];
        let edge = g
            .lambda
            .iter()
            .enumerate()
            .map(|(r, users)| {
                users
                    .iter()
                    .map(|&u| {
                        user_edges[u].push(edges.len());
                        edges.push((r, u));
                        edges.len() - 1
                    })
                    .collect()
            })
            .collect();
        Graph {
            edge,
            user_edges,
            edges,
        }
    }
}

struct State {
    var_to_fn: Vec<Vec<f64>>,
    fn_to_var: Vec<Vec<f64>>,
}

impl State {
    fn snapshot(&self, graph: &Graph, iteration: usize) -> MessageTable {
        let probs = |m: &Vec<Vec<f64>>| {
            m.iter()
                .map(|v| v.iter().map(|l| l.exp()).collect())
                .collect()
        };
        MessageTable {
            iteration,
            edges: graph.edges.clone(),
            var_to_fn: probs(&self.var_to_fn),
            fn_to_var: probs(&self.fn_to_var),
        }
    }
}

fn run(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    iterations: usize,
    mut snapshots: Option<&mut Vec<MessageTable>>,
) -> Result<DecodeResult> {
    check_inputs(system, y, channel)?;
    if !y.sigma2.is_finite() || y.sigma2 < 0.0 {
        return Err(Error::NonFinite(format!("noise variance {}", y.sigma2)));
    }
    let sigma2 = y.sigma2.max(NOISE_FLOOR);
    let products = Products::new(system, channel);
    let graph = Graph::new(system);
    let cost = CostModel::new(system);
    let messages = system.messages_per_user();
    let d_f = system.d_f();
    let combos = messages.pow(d_f as u32);
    let n_edges = graph.edges.len();
    let mut ops = crate::complexity::OpCount::ZERO;

    // digit table: combination -> message per slot
    let mut digits = vec![0usize; combos * d_f];
    for c in 0..combos {
        super::digits_into(c, messages, &mut digits[c * d_f..(c + 1) * d_f]);
    }

    // log-likelihood of every combination, per ORE
    let mut parts = Vec::with_capacity(d_f);
    let log_lik: Vec<Vec<f64>> = (0..system.ores())
        .map(|r| {
            (0..combos)
                .map(|c| {
                    parts.clear();
                    parts.extend((0..d_f).map(|s| products.get(r, s, digits[c * d_f + s])));
                    -residual_metric(y.ore(r), &parts) / sigma2
                })
                .collect()
        })
        .collect();
    // each FN→VN edge consumes the table
    ops += cost.mpa_likelihood() * (system.ores() * d_f * combos) as u64;

    let uniform = -(messages as f64).ln();
    let mut state = State {
        var_to_fn: vec![vec![uniform; messages]; n_edges],
        fn_to_var: vec![vec![uniform; messages]; n_edges],
    };
    if let Some(s) = snapshots.as_deref_mut() {
        s.push(state.snapshot(&graph, 0));
    }

    let mut scratch = vec![0.0; combos];
    let mut peak = vec![0.0; messages];
    let mut sums = vec![0.0; messages];
    for iteration in 1..=iterations {
        for (r, slots) in graph.edge.iter().enumerate() {
            for (target, &e_out) in slots.iter().enumerate() {
                for c in 0..combos {
                    let d = &digits[c * d_f..(c + 1) * d_f];
                    let mut v = log_lik[r][c];
                    for (s, &e_in) in slots.iter().enumerate() {
                        if s != target {
                            v += state.var_to_fn[e_in][d[s]];
                        }
                    }
                    scratch[c] = v;
                }
                // log-sum-exp grouped by the target user's message
                peak.iter_mut().for_each(|m| *m = f64::NEG_INFINITY);
                for c in 0..combos {
                    let x = digits[c * d_f + target];
                    peak[x] = peak[x].max(scratch[c]);
                }
                sums.iter_mut().for_each(|s| *s = 0.0);
                for c in 0..combos {
                    let x = digits[c * d_f + target];
                    if peak[x] > f64::NEG_INFINITY {
                        sums[x] += (scratch[c] - peak[x]).exp();
                    }
                }
                let out = &mut state.fn_to_var[e_out];
                for x in 0..messages {
                    out[x] = peak[x] + sums[x].ln();
                }
                normalize(out);
                ops += cost.mpa_function_node();
            }
        }
        for edges in &graph.user_edges {
            for &e_out in edges {
                let out = &mut state.var_to_fn[e_out];
                out.iter_mut().for_each(|v| *v = 0.0);
                for &e_in in edges {
                    if e_in != e_out {
                        for (o, i) in out.iter_mut().zip(&state.fn_to_var[e_in]) {
                            *o += i;
                        }
                    }
                }
                normalize(out);
                ops += cost.mpa_variable_node();
            }
        }
        if let Some(s) = snapshots.as_deref_mut() {
            s.push(state.snapshot(&graph, iteration));
        }
    }

    let codewords = system.config().codewords;
    let estimates = graph
        .user_edges
        .iter()
        .map(|edges| {
            ops += cost.mpa_decision();
            let belief: Vec<f64> = (0..messages)
                .map(|x| edges.iter().map(|&e| state.fn_to_var[e][x]).sum())
                .collect();
            // largest belief, lowest index on ties
            let best = super::argmin(belief.iter().map(|b| -b)).map_or(0, |(i, _)| i);
            UserMessage::from_index(best, codewords)
        })
        .collect();

    Ok(DecodeResult {
        estimates,
        ops,
        meta: DecodeMeta {
            decoder: "mpa".into(),
            iterations,
            ..DecodeMeta::default()
        },
    })
}

pub fn decode_mpa(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    iterations: usize,
) -> Result<DecodeResult> {
    run(system, y, channel, iterations, None)
}

/// MPA that also returns the edge messages before the first and after every
/// iteration.
pub fn decode_mpa_traced(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    iterations: usize,
) -> Result<(DecodeResult, Vec<MessageTable>)> {
    let mut snapshots = Vec::with_capacity(iterations + 1);
    let result = run(system, y, channel, iterations, Some(&mut snapshots))?;
    Ok((result, snapshots))
}
