//! Exact maximum-likelihood detection over all `(N_t M)^U` joint messages.
//!
//! The joint metric splits into one term per ORE, each depending only on the
//! `d_f` users of that ORE. The per-ORE terms are tabulated once and the
//! joint space is walked depth-first with branch-and-bound, assigning users
//! in an order that completes OREs early. All terms are non-negative, so a
//! partial sum above the best complete metric cannot lead to a better leaf.

use super::{check_inputs, residual_metric, DecodeMeta, DecodeResult, Products};
use crate::complexity::{CostModel, OpCount};
use crate::error::{Error, Result};
use crate::model::System;
use crate::signal::{ChannelRealization, ReceivedSignal, UserMessage};

/// Largest joint search space accepted by default.
pub const DEFAULT_ML_GUARD: u64 = 1 << 30;

struct Search<'a> {
    tables: Vec<Vec<f64>>,
    lambda: &'a [Vec<usize>],
    /// Users in the order they are assigned.
    visit_order: Vec<usize>,
    /// OREs whose last user is assigned at each depth.
    completes_at: Vec<Vec<usize>>,
    messages: usize,
    assign: Vec<usize>,
    best: f64,
    best_assign: Vec<usize>,
    additions: u64,
}

impl Search<'_> {
    fn table_index(&self, ore: usize) -> usize {
        self.lambda[ore]
            .iter()
            .fold(0, |acc, &u| acc * self.messages + self.assign[u])
    }

    fn visit(&mut self, depth: usize, partial: f64) {
        let user = self.visit_order[depth];
        let last = depth + 1 == self.visit_order.len();
        for x in 0..self.messages {
            self.assign[user] = x;
            let mut metric = partial;
            for i in 0..self.completes_at[depth].len() {
                let r = self.completes_at[depth][i];
                metric += self.tables[r][self.table_index(r)];
                self.additions += 1;
            }
            // an equal partial may still tie and win on joint index
            if metric > self.best {
                continue;
            }
            if last {
                if metric < self.best || self.assign < self.best_assign {
                    self.best = metric;
                    self.best_assign.copy_from_slice(&self.assign);
                }
            } else {
                self.visit(depth + 1, metric);
            }
        }
    }
}

/// Assigns users so that OREs are completed as early as possible: repeatedly
/// take the ORE with the most users already placed and append its remaining
/// users.
fn completion_order(lambda: &[Vec<usize>], users: usize) -> Vec<usize> {
    let mut placed = vec![false; users];
    let mut order = Vec::with_capacity(users);
    let mut open: Vec<usize> = (0..lambda.len()).collect();
    while !open.is_empty() {
        let (pos, _) = open
            .iter()
            .enumerate()
            .max_by_key(|&(i, &r)| {
                let done = lambda[r].iter().filter(|&&u| placed[u]).count();
                // fewer missing users first, then lower ORE index
                (
                    done as isize - lambda[r].len() as isize,
                    std::cmp::Reverse(i),
                )
            })
            .expect("non-empty");
        let r = open.remove(pos);
        for &u in &lambda[r] {
            if !std::mem::replace(&mut placed[u], true) {
                order.push(u);
            }
        }
    }
    // users on no ORE contribute nothing; place them last
    order.extend((0..users).filter(|&u| !placed[u]));
    order
}

/// ML detection. Ties go to the lowest joint index with user 0 most
/// significant. Fails with [`Error::Guard`] when `(N_t M)^U > guard`.
pub fn decode_ml(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
    guard: u64,
) -> Result<DecodeResult> {
    let messages = system.messages_per_user();
    let hypotheses = (messages as f64).powi(system.users() as i32);
    if hypotheses > guard as f64 {
        return Err(Error::Guard { hypotheses, guard });
    }
    check_inputs(system, y, channel)?;
    let products = Products::new(system, channel);
    let graph = system.graph();
    let cost = CostModel::new(system);
    let mut ops = OpCount::ZERO;

    let mut digits = vec![0; system.d_f()];
    let mut parts = Vec::with_capacity(system.d_f());
    let tables: Vec<Vec<f64>> = graph
        .lambda
        .iter()
        .enumerate()
        .map(|(r, users)| {
            let combos = messages.pow(users.len() as u32);
            digits.resize(users.len(), 0);
            ops += cost.ore_metric() * combos as u64;
            (0..combos)
                .map(|c| {
                    super::digits_into(c, messages, &mut digits);
                    parts.clear();
                    parts.extend(
                        digits
                            .iter()
                            .enumerate()
                            .map(|(slot, &x)| products.get(r, slot, x)),
                    );
                    residual_metric(y.ore(r), &parts)
                })
                .collect()
        })
        .collect();

    let visit_order = completion_order(&graph.lambda, system.users());
    let mut depth_of = vec![0; system.users()];
    for (d, &u) in visit_order.iter().enumerate() {
        depth_of[u] = d;
    }
    let mut completes_at = vec![Vec::new(); system.users()];
    for (r, users) in graph.lambda.iter().enumerate() {
        if let Some(d) = users.iter().map(|&u| depth_of[u]).max() {
            completes_at[d].push(r);
        }
    }
    let mut search = Search {
        tables,
        lambda: &graph.lambda,
        visit_order,
        completes_at,
        messages,
        assign: vec![0; system.users()],
        best: f64::INFINITY,
        best_assign: vec![usize::MAX; system.users()],
        additions: 0,
    };
    search.visit(0, 0.0);
    ops += cost.accumulate() * search.additions;

    let codewords = system.config().codewords;
    Ok(DecodeResult {
        estimates: search
            .best_assign
            .iter()
            .map(|&x| UserMessage::from_index(x, codewords))
            .collect(),
        ops,
        meta: DecodeMeta {
            decoder: "ml".into(),
            ..DecodeMeta::default()
        },
    })
}
