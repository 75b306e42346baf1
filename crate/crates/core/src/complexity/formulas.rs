//! Closed-form operation counts for MPA, SUD, MSUD and FCSD.
//!
//! These are evaluated directly from the dimensions and are independent of
//! the runtime tally in the decoders.

use super::{Dimensions, OpCount};
use crate::model::Survivors;

fn pow(base: u64, exp: usize) -> u64 {
    base.pow(exp as u32)
}

/// MPA with `iterations` rounds.
pub fn formula_mpa(dims: &Dimensions, iterations: u64) -> OpCount {
    let Dimensions {
        users: u,
        ores: r,
        d_f,
        d_v,
        rx_antennas: n_r,
        ..
    } = *dims;
    let k = iterations;
    let nm = dims.messages();
    let combos = pow(nm, d_f as usize);
    let adds = r * d_f * combos * (2 * n_r * (2 * d_f + 1) - 1) + k * r * d_f * (combos - 1);
    let muls = r * d_f * combos * (2 * n_r * (2 * d_f + 1) + k * d_f + 1)
        + nm * (d_v - 1) * (k * r * d_f + u);
    OpCount::new(adds, muls)
}

/// `Σ_{r: Ǔ^r ≠ 0} (M N_t)^{Ǔ^r}` over a level plan.
fn sud_search_terms(dims: &Dimensions, new_users: &[usize]) -> u64 {
    new_users
        .iter()
        .filter(|&&n| n != 0)
        .map(|&n| pow(dims.messages(), n))
        .sum()
}

fn ordering_cost(dims: &Dimensions) -> OpCount {
    let Dimensions {
        ores: r,
        d_f,
        rx_antennas: n_r,
        ..
    } = *dims;
    OpCount::new(r * (2 * n_r * d_f - 1), 2 * r * n_r * d_f)
}

/// SUD given the per-level counts `Ǔ^r` of newly estimated users.
pub fn formula_sud(dims: &Dimensions, new_users: &[usize]) -> OpCount {
    let per = dims.metric_muls();
    let terms = sud_search_terms(dims, new_users);
    ordering_cost(dims) + OpCount::new((per - 1) * terms, per * terms)
}

/// MSUD with `iterations` refinement sweeps on top of SUD.
pub fn formula_msud(dims: &Dimensions, new_users: &[usize], iterations: u64) -> OpCount {
    let per = dims.metric_muls();
    let terms = iterations * dims.users * dims.messages() + sud_search_terms(dims, new_users);
    ordering_cost(dims) + OpCount::new((per - 1) * terms, per * terms)
}

/// Number of tree nodes FCSD evaluates: `(M N_t)^{d_f}` at the first level
/// plus `ρ_{r−1} (M N_t)^{Ǔ^r}` below it. A survivor count of zero is
/// raised to one and a count above the available nodes is clamped, exactly
/// as the decoder does.
pub fn fcsd_visited_nodes(dims: &Dimensions, new_users: &[usize], rho: &[Survivors]) -> u64 {
    let nm = dims.messages();
    let mut total = pow(nm, dims.d_f as usize);
    let mut available = total;
    for (level, &fresh) in new_users.iter().enumerate().skip(1) {
        let kept = rho
            .get(level - 1)
            .map_or(available, |s| (s.0.max(1) as u64).min(available));
        available = kept * pow(nm, fresh);
        total += available;
    }
    total
}

/// FCSD with survivor counts `rho` (one per level above the last).
pub fn formula_fcsd(dims: &Dimensions, new_users: &[usize], rho: &[Survivors]) -> OpCount {
    let per = dims.metric_muls();
    let nodes = fcsd_visited_nodes(dims, new_users, rho);
    ordering_cost(dims) + OpCount::new((per - dims.ores - 2) * nodes, per * nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(codewords: u64, rx: u64) -> Dimensions {
        Dimensions {
            users: 6,
            ores: 4,
            d_f: 3,
            d_v: 2,
            tx_antennas: 4,
            codewords,
            rx_antennas: rx,
        }
    }

    const PLAN: [usize; 4] = [3, 2, 1, 0];

    fn rho(v: [usize; 3]) -> Vec<Survivors> {
        v.iter().map(|&n| Survivors(n)).collect()
    }

    #[test]
    fn mpa_golden_values() {
        let d = dims(2, 2);
        assert_eq!(formula_mpa(&d, 5), OpCount::new(196_548, 270_864));
        assert_eq!(formula_mpa(&d, 0).real_adds, 165_888);
        assert_eq!(formula_mpa(&d, 5).real_adds, 12 * 512 * 27 + 5 * 12 * 511);
    }

    #[test]
    fn sud_golden_values() {
        assert_eq!(
            formula_sud(&dims(2, 2), &PLAN),
            OpCount::new(15_812, 16_400)
        );
    }

    #[test]
    fn sud_scales_with_receive_antennas() {
        let (a, b) = (
            formula_sud(&dims(2, 2), &PLAN),
            formula_sud(&dims(2, 4), &PLAN),
        );
        // every term is linear in N_r apart from the "- 1" constants
        assert_eq!(b.real_muls, 2 * a.real_muls);
        assert_eq!(b.real_adds + 4 + 584, 2 * (a.real_adds + 4 + 584));
    }

    #[test]
    fn msud_golden_values() {
        let d = dims(2, 2);
        assert_eq!(formula_msud(&d, &PLAN, 4), OpCount::new(20_996, 21_776));
        assert_eq!(formula_msud(&d, &PLAN, 0), formula_sud(&d, &PLAN));
    }

    #[test]
    fn fcsd_golden_values() {
        let d = dims(2, 2);
        assert_eq!(fcsd_visited_nodes(&d, &PLAN, &rho([35, 70, 50])), 3_362);
        assert_eq!(
            formula_fcsd(&d, &PLAN, &rho([35, 70, 50])),
            OpCount::new(74_008, 94_184)
        );
        assert_eq!(
            fcsd_visited_nodes(&d, &PLAN, &rho([0, 0, 0])),
            512 + 64 + 8 + 1
        );
    }

    #[test]
    fn fcsd_keep_all_counts_full_tree() {
        let d = dims(2, 2);
        let all = vec![Survivors::ALL; 3];
        assert_eq!(
            fcsd_visited_nodes(&d, &PLAN, &all),
            512 + 512 * 64 + 512 * 64 * 8 * 2
        );
    }

    #[test]
    fn complexity_ordering_at_reference_configs() {
        for (m, fcsd_rho) in [(2, [35, 70, 50]), (4, [110, 320, 300])] {
            for n_r in [2, 4, 6, 10] {
                let d = dims(m, n_r);
                let sud = formula_sud(&d, &PLAN);
                let msud = formula_msud(&d, &PLAN, 4);
                let fcsd = formula_fcsd(&d, &PLAN, &rho(fcsd_rho));
                let mpa = formula_mpa(&d, 5);
                for pick in [|o: OpCount| o.real_adds, |o: OpCount| o.real_muls] {
                    assert!(pick(sud) < pick(msud));
                    assert!(pick(msud) < pick(fcsd));
                    assert!(pick(fcsd) < pick(mpa), "M={m} N_r={n_r}");
                }
            }
        }
    }
}
