//! Dense tableau simplex for the packing linear program
//! `max Σz  s.t.  Az ≤ 1, z ≥ 0` with a 0/1 constraint matrix given as row
//! bitmasks (one row per candidate point, one column per region).
//!
//! The packing form starts feasible at z = 0, so no phase-1 is needed. The
//! covering weights (the fractional transversal) are the row duals read off
//! the optimal tableau's slack reduced costs; by strong duality both
//! objectives agree up to rounding. Entering columns follow Dantzig pricing
//! with a switch to Bland's rule after a burn-in to rule out cycling.

use thiserror::Error;

const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("simplex iteration cap {0} exceeded before optimality")]
    IterationCap(usize),
    #[error("packing LP unbounded; constraint matrix has an empty column")]
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct PackingSolve {
    /// z per variable (region), the fractional packing.
    pub var_values: Vec<f64>,
    /// y per row (candidate point), the fractional covering weights.
    pub row_duals: Vec<f64>,
}

pub(crate) fn solve_packing(num_vars: usize, rows: &[u64]) -> Result<PackingSolve, LpError> {
    let m = rows.len();
    let total = num_vars + m;
    let mut tableau: Vec<Vec<f64>> = rows
        .iter()
        .enumerate()
        .map(|(i, &mask)| {
            let mut row = vec![0.0; total + 1];
            for (j, v) in row.iter_mut().enumerate().take(num_vars) {
                if mask & (1 << j) != 0 {
                    *v = 1.0;
                }
            }
            row[num_vars + i] = 1.0;
            row[total] = 1.0;
            row
        })
        .collect();
    let mut reduced: Vec<f64> = (0..total).map(|j| if j < num_vars { 1.0 } else { 0.0 }).collect();
    let mut basis: Vec<usize> = (0..m).map(|i| num_vars + i).collect();

    let cap = 4000 + 40 * total;
    let bland_after = 10 * total + 200;
    let mut iterations = 0usize;
    loop {
        let entering = if iterations <= bland_after {
            let mut best = PIVOT_TOL;
            let mut idx = None;
            for (j, &rc) in reduced.iter().enumerate() {
                if rc > best {
                    best = rc;
                    idx = Some(j);
                }
            }
            idx
        } else {
            reduced.iter().position(|&rc| rc > PIVOT_TOL)
        };
        let Some(e) = entering else { break };

        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let a = tableau[i][e];
            if a > PIVOT_TOL {
                let ratio = tableau[i][total] / a;
                let better = ratio < best_ratio - 1e-12
                    || (ratio < best_ratio + 1e-12
                        && leave.is_none_or(|l| basis[i] < basis[l]));
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else { return Err(LpError::Unbounded) };

        let pivot = tableau[r][e];
        for v in tableau[r].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = tableau[r].clone();
        for (i, row) in tableau.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[e];
            if factor != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                row[e] = 0.0; // exact zero in the pivot column
            }
        }
        let factor = reduced[e];
        for (rc, pv) in reduced.iter_mut().zip(&pivot_row) {
            *rc -= factor * pv;
        }
        reduced[e] = 0.0;
        basis[r] = e;

        iterations += 1;
        if iterations > cap {
            return Err(LpError::IterationCap(cap));
        }
    }

    let mut var_values = vec![0.0; num_vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < num_vars {
            var_values[b] = tableau[i][total].max(0.0);
        }
    }
    let row_duals: Vec<f64> = (0..m).map(|i| (-reduced[num_vars + i]).max(0.0)).collect();
    Ok(PackingSolve {
        var_values,
        row_duals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(s: &PackingSolve) -> f64 {
        s.var_values.iter().sum()
    }

    #[test]
    fn single_row_all_vars() {
        // max z0+z1+z2 with z0+z1+z2 ≤ 1
        let s = solve_packing(3, &[0b111]).unwrap();
        assert!((value(&s) - 1.0).abs() < 1e-12);
        assert!((s.row_duals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_singletons() {
        // z0 ≤ 1, z1 ≤ 1 independently
        let s = solve_packing(2, &[0b01, 0b10]).unwrap();
        assert!((value(&s) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn odd_cycle_half_integral() {
        // triangle constraints: z_i + z_j ≤ 1 for the three pairs → 3/2
        let s = solve_packing(3, &[0b011, 0b110, 0b101]).unwrap();
        assert!((value(&s) - 1.5).abs() < 1e-9);
        let dual_total: f64 = s.row_duals.iter().sum();
        assert!((dual_total - 1.5).abs() < 1e-9);
        // covering feasibility: every variable's rows sum to ≥ 1
        for j in 0..3 {
            let cover: f64 = [0b011u64, 0b110, 0b101]
                .iter()
                .zip(&s.row_duals)
                .filter(|(mask, _)| *mask & (1 << j) != 0)
                .map(|(_, y)| y)
                .sum();
            assert!(cover >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn random_instances_duality_holds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(13);
        for trial in 0..50 {
            let n = rng.gen_range(2..=12);
            let m = rng.gen_range(1..=30);
            // every variable needs at least one row so the LP stays bounded
            let rows: Vec<u64> = (0..m)
                .map(|i| {
                    let mut mask = 1u64 << (i % n);
                    for j in 0..n {
                        if rng.gen_bool(0.3) {
                            mask |= 1 << j;
                        }
                    }
                    mask
                })
                .collect();
            let covered = rows.iter().fold(0u64, |a, &b| a | b);
            if covered.count_ones() as usize != n {
                continue;
            }
            let s = solve_packing(n, &rows).unwrap();
            // packing feasibility
            for &row in &rows {
                let load: f64 = (0..n)
                    .filter(|j| row & (1 << j) != 0)
                    .map(|j| s.var_values[j])
                    .sum();
                assert!(load <= 1.0 + 1e-9, "trial {trial}");
            }
            // covering feasibility of the duals
            for j in 0..n {
                let cover: f64 = rows
                    .iter()
                    .zip(&s.row_duals)
                    .filter(|(mask, _)| *mask & (1 << j) != 0)
                    .map(|(_, y)| y)
                    .sum();
                assert!(cover >= 1.0 - 1e-9, "trial {trial}");
            }
            // strong duality
            let primal: f64 = s.row_duals.iter().sum();
            assert!((primal - value(&s)).abs() < 1e-8, "trial {trial}");
        }
    }
}
