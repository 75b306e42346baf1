//! Decoding complexity in real additions and multiplications.
//!
//! Two independent routes produce an [`OpCount`]:
//!
//! * closed forms in [`formulas`], evaluated from the system dimensions;
//! * a runtime tally that every decoder accumulates while it runs, charging
//!   each kernel invocation through a [`CostModel`].
//!
//! The cost model is built from these primitive conventions:
//!
//! | operation            | real muls | real adds |
//! |----------------------|-----------|-----------|
//! | complex product h·c  | 4         | 2         |
//! | complex subtraction  | 0         | 2         |
//! | squared magnitude    | 2         | 1         |
//!
//! One ORE metric `Σ_{n_r} |y − Σ_{u∈Λ_r} h c|²` over `d_f` users then costs
//! `N_r(4d_f+2)` multiplications and `N_r(4d_f+2) − 1` additions, and one ORE
//! energy `Σ_{u,n_r} |h|²` costs `2N_r d_f` multiplications and
//! `2N_r d_f − 1` additions. Tree nodes, MPA message updates and decisions
//! are charged at the per-event costs of the reference accounting; see the
//! individual [`CostModel`] methods.

pub mod formulas;
pub mod marcum;

use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use serde::Serialize;

use crate::model::System;

pub use formulas::{fcsd_visited_nodes, formula_fcsd, formula_mpa, formula_msud, formula_sud};
pub use marcum::{marcum_q, survival_probability, RadiusDiagnostic};

/// Exact tally of real additions and real multiplications.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct OpCount {
    pub real_adds: u64,
    pub real_muls: u64,
}

impl OpCount {
    pub const ZERO: OpCount = OpCount {
        real_adds: 0,
        real_muls: 0,
    };

    pub const fn new(real_adds: u64, real_muls: u64) -> Self {
        OpCount {
            real_adds,
            real_muls,
        }
    }
}

impl Add for OpCount {
    type Output = OpCount;
    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(
            self.real_adds + rhs.real_adds,
            self.real_muls + rhs.real_muls,
        )
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        *self = *self + rhs;
    }
}

impl Mul<u64> for OpCount {
    type Output = OpCount;
    fn mul(self, n: u64) -> OpCount {
        OpCount::new(self.real_adds * n, self.real_muls * n)
    }
}

impl Sum for OpCount {
    fn sum<I: Iterator<Item = OpCount>>(iter: I) -> OpCount {
        iter.fold(OpCount::ZERO, Add::add)
    }
}

/// Dimensions entering every complexity expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dimensions {
    pub users: u64,
    pub ores: u64,
    pub d_f: u64,
    pub d_v: u64,
    pub tx_antennas: u64,
    pub codewords: u64,
    pub rx_antennas: u64,
}

impl Dimensions {
    pub fn of(system: &System) -> Self {
        Dimensions {
            users: system.users() as u64,
            ores: system.ores() as u64,
            d_f: system.d_f() as u64,
            d_v: system.d_v() as u64,
            tx_antennas: system.tx_antennas() as u64,
            codewords: system.config().codewords as u64,
            rx_antennas: system.rx_antennas() as u64,
        }
    }

    /// `N_t M`.
    pub fn messages(&self) -> u64 {
        self.tx_antennas * self.codewords
    }

    /// `N_r (4 d_f + 2)`, the multiplications of one ORE metric.
    pub fn metric_muls(&self) -> u64 {
        self.rx_antennas * (4 * self.d_f + 2)
    }
}

/// Per-event costs charged by the instrumented decoders.
#[derive(Clone, Copy, Debug)]
pub struct CostModel {
    dims: Dimensions,
}

impl CostModel {
    pub fn new(system: &System) -> Self {
        CostModel {
            dims: Dimensions::of(system),
        }
    }

    pub fn dims(&self) -> &Dimensions {
        &self.dims
    }

    /// Energy of one ORE: `d_f N_r` squared magnitudes summed together.
    pub fn ore_energy(&self) -> OpCount {
        let terms = self.dims.d_f * self.dims.rx_antennas;
        // |h|^2 = 2 muls + 1 add per term, then terms - 1 accumulations
        OpCount::new(terms + (terms - 1), 2 * terms)
    }

    /// One hypothesis metric over a single ORE with all `d_f` users present.
    pub fn ore_metric(&self) -> OpCount {
        let (d_f, n_r) = (self.dims.d_f, self.dims.rx_antennas);
        // per antenna: d_f products, d_f subtractions, one |.|^2
        let per_antenna = OpCount::new(2 * d_f + 2 * d_f + 1, 4 * d_f + 2);
        per_antenna * n_r + OpCount::new(n_r - 1, 0)
    }

    /// One tree node: its ORE metric accumulated onto the mother node,
    /// charged at `N_r(4d_f+2) − R − 2` additions and `N_r(4d_f+2)`
    /// multiplications as in the reference accounting.
    pub fn tree_node(&self) -> OpCount {
        let muls = self.dims.metric_muls();
        OpCount::new(muls.saturating_sub(self.dims.ores + 2), muls)
    }

    /// Gaussian likelihood of one combination as consumed by one FN→VN edge:
    /// the ORE metric plus one scaling by the noise variance.
    pub fn mpa_likelihood(&self) -> OpCount {
        self.ore_metric() + OpCount::new(0, 1)
    }

    /// One FN→VN update in one iteration: each of the `(N_t M)^{d_f}`
    /// combinations is weighted by the incoming messages (`d_f` products),
    /// and the weighted terms are summed.
    pub fn mpa_function_node(&self) -> OpCount {
        let combos = self.dims.messages().pow(self.dims.d_f as u32);
        OpCount::new(combos - 1, combos * self.dims.d_f)
    }

    /// One VN→FN update in one iteration: `d_v − 1` products per message.
    pub fn mpa_variable_node(&self) -> OpCount {
        OpCount::new(0, self.dims.messages() * (self.dims.d_v - 1))
    }

    /// Final decision for one user: product of `d_v` incoming messages.
    pub fn mpa_decision(&self) -> OpCount {
        OpCount::new(0, self.dims.messages() * (self.dims.d_v - 1))
    }

    /// One addition of partial metrics (ML tree walk).
    pub fn accumulate(&self) -> OpCount {
        OpCount::new(1, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_hypothesis_cost_matches_reference_statement() {
        for n_r in [1, 2, 4, 6, 10] {
            let model = CostModel::new(&System::reference(2, n_r));
            let n = n_r as u64;
            assert_eq!(model.ore_metric(), OpCount::new(n * 14 - 1, n * 14));
            assert_eq!(model.ore_energy(), OpCount::new(2 * n * 3 - 1, 2 * n * 3));
        }
    }

    #[test]
    fn opcount_is_additive() {
        let a = OpCount::new(3, 4);
        let b = OpCount::new(10, 1);
        assert_eq!(a + b, OpCount::new(13, 5));
        assert_eq!([a, b, a].into_iter().sum::<OpCount>(), OpCount::new(16, 9));
        assert_eq!(a * 3, OpCount::new(9, 12));
    }
}
