//! ORE visiting order and the per-level user plan shared by SUD, MSUD and
//! FCSD.

use serde::Serialize;

use crate::complexity::{CostModel, OpCount};
use crate::error::{Error, Result};
use crate::model::{FactorGraph, System};
use crate::signal::{ChannelRealization, UserMessage};

/// OREs sorted by decreasing channel energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OreOrder {
    #[serde(serialize_with = "crate::one_based::indices")]
    pub order: Vec<usize>,
    /// Energy of each ORE, indexed by ORE.
    pub energies: Vec<f64>,
    /// Cost of computing the energies.
    pub ops: OpCount,
}

fn sort_by_energy(energies: Vec<f64>, system: &System) -> OreOrder {
    let mut order: Vec<usize> = (0..energies.len()).collect();
    // stable: equal energies keep ascending ORE index
    order.sort_by(|&a, &b| energies[b].total_cmp(&energies[a]));
    OreOrder {
        order,
        energies,
        ops: CostModel::new(system).ore_energy() * system.ores() as u64,
    }
}

/// Orders OREs by `Σ_{u∈Λ_r} Σ_{n_t} Σ_{n_r} |h^{r,u}_{n_r,n_t}|²`.
///
/// The receiver does not know which antenna each user activated, so the
/// energy is summed over every candidate transmit antenna.
pub fn ore_energy_order(system: &System, channel: &ChannelRealization) -> OreOrder {
    let energies = system
        .graph()
        .lambda
        .iter()
        .enumerate()
        .map(|(r, users)| {
            users
                .iter()
                .flat_map(|&u| (0..system.tx_antennas()).map(move |t| (u, t)))
                .flat_map(|(u, t)| channel.gains(u, r, t).iter())
                .map(|h| h.norm_sqr())
                .sum()
        })
        .collect();
    sort_by_energy(energies, system)
}

/// Same ordering computed from the antennas that were actually active.
/// Only meaningful in simulation, where the transmitted messages are known.
pub fn ore_energy_order_genie(
    system: &System,
    channel: &ChannelRealization,
    truth: &[UserMessage],
) -> OreOrder {
    let energies = system
        .graph()
        .lambda
        .iter()
        .enumerate()
        .map(|(r, users)| {
            users
                .iter()
                .flat_map(|&u| channel.gains(u, r, truth[u].antenna).iter())
                .map(|h| h.norm_sqr())
                .sum()
        })
        .collect();
    sort_by_energy(energies, system)
}

/// Users first estimated at each level of an ORE visiting order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelPlan {
    /// ORE visited at each level.
    #[serde(serialize_with = "crate::one_based::indices")]
    pub ores: Vec<usize>,
    /// Users of that ORE not seen at any earlier level, ascending.
    #[serde(serialize_with = "crate::one_based::nested")]
    pub new_users: Vec<Vec<usize>>,
}

impl LevelPlan {
    pub fn levels(&self) -> usize {
        self.ores.len()
    }

    /// Number of new users per level.
    pub fn counts(&self) -> Vec<usize> {
        self.new_users.iter().map(Vec::len).collect()
    }

    /// Whether every user has been estimated after `level`.
    pub fn complete_after(&self, level: usize, users: usize) -> bool {
        self.new_users[..=level].iter().map(Vec::len).sum::<usize>() == users
    }
}

/// Splits the users of each visited ORE into those already decided at an
/// earlier level and the new ones.
pub fn build_tree_levels(graph: &FactorGraph, order: &[usize]) -> Result<LevelPlan> {
    let ores = graph.ores();
    let mut seen_ore = vec![false; ores];
    for &r in order {
        if r >= ores || std::mem::replace(&mut seen_ore[r], true) {
            return Err(Error::config(
                "ore order",
                format!("{order:?} is not a permutation of 0..{ores}"),
            ));
        }
    }
    if order.len() != ores {
        return Err(Error::config(
            "ore order",
            format!("{order:?} is not a permutation of 0..{ores}"),
        ));
    }
    let mut known = vec![false; graph.users()];
    let new_users = order
        .iter()
        .map(|&r| {
            graph.lambda[r]
                .iter()
                .copied()
                .filter(|&u| !std::mem::replace(&mut known[u], true))
                .collect()
        })
        .collect();
    Ok(LevelPlan {
        ores: order.to_vec(),
        new_users,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::draw_channel;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_order_of_the_reference_graph_gives_3_2_1_0() {
        let sys = System::reference(2, 2);
        let mut perm = vec![0, 1, 2, 3];
        // all 24 permutations via Heap's algorithm
        fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == 1 {
                out.push(a.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, a, out);
                let j = if k.is_multiple_of(2) { i } else { 0 };
                a.swap(j, k - 1);
            }
        }
        let mut perms = Vec::new();
        heap(4, &mut perm, &mut perms);
        assert_eq!(perms.len(), 24);
        for p in perms {
            let plan = build_tree_levels(sys.graph(), &p).unwrap();
            assert_eq!(plan.counts(), vec![3, 2, 1, 0], "{p:?}");
            assert!(plan.complete_after(2, 6));
        }
    }

    #[test]
    fn new_users_example() {
        let sys = System::reference(2, 2);
        let plan = build_tree_levels(sys.graph(), &[1, 3, 0, 2]).unwrap();
        assert_eq!(
            plan.new_users,
            vec![vec![0, 2, 5], vec![3, 4], vec![1], vec![]]
        );
    }

    #[test]
    fn rejects_non_permutations() {
        let sys = System::reference(2, 2);
        assert!(build_tree_levels(sys.graph(), &[0, 1, 2]).is_err());
        assert!(build_tree_levels(sys.graph(), &[0, 1, 1, 2]).is_err());
        assert!(build_tree_levels(sys.graph(), &[0, 1, 2, 4]).is_err());
    }

    #[test]
    fn energy_order_sorts_descending_and_ties_low() {
        let sys = System::reference(2, 1);
        let flat = ChannelRealization::from_fn(6, 4, 4, 1, |_, _, _, _| Complex64::new(1.0, 0.0));
        assert_eq!(ore_energy_order(&sys, &flat).order, vec![0, 1, 2, 3]);

        // ORE 2 strongest, then ORE 3
        let boosted = ChannelRealization::from_fn(6, 4, 4, 1, |_, r, _, _| {
            let g = match r {
                2 => 3.0,
                3 => 2.0,
                _ => 1.0,
            };
            Complex64::new(g, 0.0)
        });
        let o = ore_energy_order(&sys, &boosted);
        assert_eq!(o.order, vec![2, 3, 0, 1]);
        assert!((o.energies[2] - 3.0 * 4.0 * 9.0).abs() < 1e-12);
    }

    #[test]
    fn energy_matches_direct_sum() {
        let sys = System::reference(4, 3);
        let h = draw_channel(&mut ChaCha8Rng::seed_from_u64(5), sys.config());
        let o = ore_energy_order(&sys, &h);
        for r in 0..4 {
            let mut e = 0.0;
            for u in 0..6 {
                if sys.codebooks().indicator().get(r, u) {
                    for t in 0..4 {
                        for n in 0..3 {
                            e += h.gain(u, r, t, n).norm_sqr();
                        }
                    }
                }
            }
            assert!((o.energies[r] - e).abs() < 1e-12);
        }
        for w in o.order.windows(2) {
            assert!(o.energies[w[0]] >= o.energies[w[1]]);
        }
    }
}
