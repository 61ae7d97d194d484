use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

/// Tunable constants. Every run echoes the record it used into its witness.
///
/// `beta*` drive the separator machinery; `c_*` are the unspecified constants
/// of the grid-like and treewidth-bracket bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    /// Exhaustive sparsest-cut search up to this many vertices.
    pub exact_cut_cap: usize,
    /// Subset DP for exact treewidth up to this many vertices.
    pub exact_tw_cap: usize,
    /// Branch-and-bound hitting set limits.
    pub exact_order_max_elements: usize,
    pub exact_order_max_vertices: usize,
    /// Concurrent flow: exact LP while the tableau has at most this many
    /// entries, else the multiplicative-weights approximation.
    pub exact_flow_budget: usize,
    pub flow_delta: f64,
    pub c0: f64,
    /// Mader density threshold `e(G) >= c_deg * p^2 * n`.
    pub c_deg: f64,
    /// Dense-branch average degree threshold `c_top * p^2`.
    pub c_top: f64,
    /// Web size factor `k >= c_web * h^2 * p^2`.
    pub c_web: f64,
    /// Degeneracy factor for the transversal stage, `d = c_lll * p^2`.
    pub c_lll: f64,
    pub min_web_k: usize,
    pub max_resamplings: usize,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            beta0: 1.0,
            beta1: 18.0,
            beta2: 792.0,
            beta3: 1.0,
            exact_cut_cap: 14,
            exact_tw_cap: 18,
            exact_order_max_elements: 64,
            exact_order_max_vertices: 30,
            exact_flow_budget: 60_000,
            flow_delta: 0.1,
            c0: 1.0,
            c_deg: 256.0,
            c_top: 1.0,
            c_web: 1.0,
            c_lll: 1.0,
            min_web_k: 2,
            max_resamplings: 100_000,
        }
    }
}

impl Constants {
    /// Small constants under which desk-sized graphs exercise every branch.
    /// Still satisfies the separator inequalities.
    pub fn desk() -> Self {
        Constants {
            beta0: 1.0 / 18.0,
            beta1: 1.0,
            beta2: 3.0,
            c_deg: 0.25,
            c_web: 0.05,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        let positive = [
            self.beta0, self.beta1, self.beta2, self.beta3, self.c0, self.c_deg, self.c_top,
            self.c_web, self.c_lll, self.flow_delta,
        ];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return input("constants must be positive and finite");
        }
        let eps = 1e-9;
        if self.beta1 + eps < 18.0 * self.beta0 {
            return input("beta1 must be at least 18*beta0");
        }
        if self.beta2 + eps < 44.0 * self.beta0 * self.beta1 {
            return input("beta2 must be at least 44*beta0*beta1");
        }
        Ok(())
    }

    /// Separator budget `s = ceil(beta1 * k)`.
    pub fn sep_budget(&self, k: usize) -> usize {
        (self.beta1 * k as f64 - 1e-9).ceil().max(0.0) as usize
    }
}
