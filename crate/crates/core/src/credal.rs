//! Interval credal sets: distributions `θ` over `k` states with
//! `lower[i] <= θ[i] <= upper[i]` and `Σθ = 1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance for comparing bounds and deduplicating vertices.
pub const COMPARE_TOL: f64 = 1e-12;
/// Violations larger than this are rejected rather than repaired.
pub const REJECT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalCredalSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl IntervalCredalSet {
    /// Builds a set from raw bounds, tightening them so that every bound is
    /// attained by some member.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<IntervalCredalSet> {
        let (lower, upper) = normalize_reachable(lower, upper)?;
        Ok(IntervalCredalSet { lower, upper })
    }

    /// Degenerate set holding a single distribution.
    pub fn point(pmf: &[f64]) -> Result<IntervalCredalSet> {
        check_pmf(pmf)?;
        Ok(IntervalCredalSet {
            lower: pmf.to_vec(),
            upper: pmf.to_vec(),
        })
    }

    /// Two-state set for a `⊤` terminal: state 0 is `X = true` with
    /// probability in `[l, u]`, state 1 is `X = false`.
    pub fn binary(l: f64, u: f64) -> Result<IntervalCredalSet> {
        IntervalCredalSet::new(vec![l, 1.0 - u], vec![u, 1.0 - l])
    }

    pub fn k(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn is_degenerate(&self) -> bool {
        (0..self.k()).all(|i| self.width(i) <= COMPARE_TOL)
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.k()
            && (sum(theta) - 1.0).abs() <= REJECT_TOL
            && theta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&t, (&l, &u))| t >= l - REJECT_TOL && t <= u + REJECT_TOL)
    }

    /// Minimum of `Σ c_i θ_i` over the set and the vertex attaining it.
    /// Greedy on the sorted coefficients; ties go to the lower index.
    pub fn minimize_linear(&self, c: &[f64]) -> (f64, Vec<f64>) {
        let mut theta = vec![0.0; self.k()];
        let v = self.optimize_into(c, false, &mut theta);
        (v, theta)
    }

    pub fn maximize_linear(&self, c: &[f64]) -> (f64, Vec<f64>) {
        let mut theta = vec![0.0; self.k()];
        let v = self.optimize_into(c, true, &mut theta);
        (v, theta)
    }

    /// Allocation-free form of [`minimize_linear`](Self::minimize_linear) /
    /// [`maximize_linear`](Self::maximize_linear); writes the vertex into `theta`.
    pub fn optimize_into(&self, c: &[f64], maximize: bool, theta: &mut [f64]) -> f64 {
        let k = self.k();
        assert_eq!(
            c.len(),
            k,
            "coefficient count must match the number of states"
        );
        theta.copy_from_slice(&self.lower);
        let mut rest = 1.0 - sum(&self.lower);
        if rest > 0.0 {
            let mut idx: [usize; 16] = [0; 16];
            let mut heap: Vec<usize>;
            let order: &mut [usize] = if k <= 16 {
                for (i, slot) in idx.iter_mut().enumerate().take(k) {
                    *slot = i;
                }
                &mut idx[..k]
            } else {
                heap = (0..k).collect();
                &mut heap
            };
            // Stable insertion sort keeps equal coefficients in index order.
            for a in 1..order.len() {
                let mut b = a;
                while b > 0 {
                    let (x, y) = (c[order[b - 1]], c[order[b]]);
                    let out_of_order = if maximize { y > x } else { y < x };
                    if !out_of_order {
                        break;
                    }
                    order.swap(b - 1, b);
                    b -= 1;
                }
            }
            for &i in order.iter() {
                if rest <= 0.0 {
                    break;
                }
                let add = self.width(i).min(rest);
                theta[i] += add;
                rest -= add;
            }
        }
        c.iter().zip(theta.iter()).map(|(a, b)| a * b).sum()
    }

    /// All vertices in a fixed order: for each free coordinate `f` among the
    /// non-degenerate states and each lower/upper pattern of the other
    /// non-degenerate states (bit `j` set means upper), in increasing
    /// `(f, pattern)` order, duplicates removed.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        if self.is_degenerate() {
            return Ok(vec![self.lower.clone()]);
        }
        let open: Vec<usize> = (0..self.k())
            .filter(|&i| self.upper[i] > self.lower[i])
            .collect();
        let m = open.len();
        if m > 12 {
            return Err(Error::TooManyStates(m));
        }
        let fixed: f64 = (0..self.k())
            .filter(|&i| self.upper[i] <= self.lower[i])
            .map(|i| self.lower[i])
            .sum();
        let mut out: Vec<Vec<f64>> = Vec::new();
        for &f in &open {
            for mask in 0u32..(1u32 << (m - 1)) {
                let mut theta = self.lower.clone();
                let mut bit = 0;
                let mut total = fixed;
                for &j in &open {
                    if j == f {
                        continue;
                    }
                    if (mask >> bit) & 1 == 1 {
                        theta[j] = self.upper[j];
                    }
                    total += theta[j];
                    bit += 1;
                }
                let free = 1.0 - total;
                if free < self.lower[f] - COMPARE_TOL || free > self.upper[f] + COMPARE_TOL {
                    continue;
                }
                theta[f] = free.clamp(self.lower[f], self.upper[f]);
                if !out.iter().any(|w| same_point(w, &theta)) {
                    out.push(theta);
                }
            }
        }
        Ok(out)
    }

    /// Index of `theta` in [`vertices`](Self::vertices), if it is a vertex.
    pub fn vertex_index(&self, theta: &[f64]) -> Option<usize> {
        self.vertices()
            .ok()?
            .iter()
            .position(|w| same_point(w, theta))
    }

    /// Maximum of `θ_i / θ_j` over the set and a vertex attaining it.
    ///
    /// Both coordinates can be pushed to their extremes at once (the bounds
    /// are reachable), so the maximum sits at the greedy vertex that fills
    /// state `i` first and state `j` last.
    pub fn max_ratio(&self, i: usize, j: usize) -> Result<(f64, Vec<f64>)> {
        let k = self.k();
        if i >= k || j >= k {
            return Err(Error::InvalidArgument(format!(
                "state index out of range for k = {k}"
            )));
        }
        let mut c = vec![0.0; k];
        c[i] = 2.0;
        if i != j {
            c[j] = -1.0;
        }
        let (_, theta) = self.maximize_linear(&c);
        if i == j {
            return Ok((1.0, theta));
        }
        if self.upper[i] <= 0.0 {
            return Ok((0.0, theta));
        }
        if self.lower[j] <= 0.0 {
            return Err(Error::UnboundedRatio { i, j });
        }
        Ok((theta[i] / theta[j], theta))
    }
}

pub fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= COMPARE_TOL)
}

fn sum(xs: &[f64]) -> f64 {
    xs.iter().sum()
}

fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.is_empty() {
        return Err(Error::InvalidCredalSet("no states".into()));
    }
    if pmf
        .iter()
        .any(|&p| !(-REJECT_TOL..=1.0 + REJECT_TOL).contains(&p))
    {
        return Err(Error::InvalidCredalSet(format!(
            "probability outside [0, 1]: {pmf:?}"
        )));
    }
    if (sum(pmf) - 1.0).abs() > REJECT_TOL {
        return Err(Error::InvalidCredalSet(format!(
            "probabilities sum to {}",
            sum(pmf)
        )));
    }
    Ok(())
}

/// Validates interval bounds and tightens each one to the value actually
/// reachable: `l_i ← max(l_i, 1 − Σ_{j≠i} u_j)`, `u_i ← min(u_i, 1 − Σ_{j≠i} l_j)`.
/// Bounds already reachable within [`COMPARE_TOL`] are left bit-for-bit alone.
pub fn normalize_reachable(
    mut lower: Vec<f64>,
    mut upper: Vec<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = lower.len();
    if k == 0 || upper.len() != k {
        return Err(Error::InvalidCredalSet(format!(
            "{} lower vs {} upper bounds",
            k,
            upper.len()
        )));
    }
    for i in 0..k {
        let (l, u) = (lower[i], upper[i]);
        if !(l.is_finite() && u.is_finite())
            || l < -REJECT_TOL
            || u > 1.0 + REJECT_TOL
            || l > u + REJECT_TOL
        {
            return Err(Error::InvalidCredalSet(format!(
                "bad interval [{l}, {u}] for state {i}"
            )));
        }
        lower[i] = l.max(0.0);
        upper[i] = u.min(1.0).max(lower[i]);
    }
    let (sl, su) = (sum(&lower), sum(&upper));
    if sl > 1.0 + REJECT_TOL || su < 1.0 - REJECT_TOL {
        return Err(Error::InvalidCredalSet(format!(
            "empty set: lower sum {sl}, upper sum {su}"
        )));
    }
    let (ol, ou) = (lower.clone(), upper.clone());
    for i in 0..k {
        let lo = 1.0 - (su - ou[i]);
        let hi = 1.0 - (sl - ol[i]);
        if lo > lower[i] + COMPARE_TOL {
            lower[i] = lo.min(upper[i]);
        }
        if hi < upper[i] - COMPARE_TOL {
            upper[i] = hi.max(lower[i]);
        }
    }
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_matches_hand_solution() {
        let s = IntervalCredalSet::new(vec![0.1, 0.2, 0.3], vec![0.5, 0.4, 0.6]).unwrap();
        let (v, th) = s.minimize_linear(&[3.0, 1.0, 2.0]);
        assert!(same_point(&th, &[0.1, 0.4, 0.5]));
        assert!((v - (0.3 + 0.4 + 1.0)).abs() < 1e-15);
        let (_, th) = s.maximize_linear(&[3.0, 1.0, 2.0]);
        assert!(same_point(&th, &[0.5, 0.2, 0.3]));
    }

    #[test]
    fn tightening() {
        let (l, u) = normalize_reachable(vec![0.0, 0.0], vec![0.9, 0.6]).unwrap();
        assert!(same_point(&l, &[0.4, 0.1]));
        assert!(same_point(&u, &[0.9, 0.6]));
        assert!(normalize_reachable(vec![0.6, 0.6], vec![0.7, 0.7]).is_err());
    }

    #[test]
    fn ties_prefer_lower_index() {
        let s = IntervalCredalSet::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let (_, th) = s.minimize_linear(&[1.0, 1.0, 1.0]);
        assert_eq!(th, vec![1.0, 0.0, 0.0]);
        assert_eq!(s.vertices().unwrap().len(), 3);
    }

    #[test]
    fn ratio_unbounded_at_zero_lower() {
        let s = IntervalCredalSet::binary(0.0, 0.5).unwrap();
        assert!(matches!(
            s.max_ratio(1, 0),
            Err(Error::UnboundedRatio { .. })
        ));
        let (r, _) = s.max_ratio(0, 1).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }
}
