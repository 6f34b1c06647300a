//! Sampling schemes: acquired index sets with their raw draw history.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VdsError};
use crate::grid::GridDims;
use crate::sampler_tsp::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// Every index, in order.
    Full,
    Iid,
    Mixed,
    Markov {
        alpha: f64,
    },
    Tsp,
    Spiral,
    Radial,
    RadialRandom,
    Lines3d,
}

/// When a sampler stops drawing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stop {
    /// Exactly this many raw draws (or chain states).
    Draws(usize),
    /// Until `target` distinct indices are acquired, giving up after `max_draws`.
    Distinct { target: usize, max_draws: usize },
}

impl Stop {
    /// Distinct-count rule with the default budget of `1000 n` draws.
    pub fn distinct(target: usize, n: usize) -> Self {
        Stop::Distinct {
            target,
            max_draws: 1000 * n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingScheme {
    pub dims: GridDims,
    /// Distinct acquired indices in order of first acquisition.
    pub omega: Vec<usize>,
    /// Deterministically acquired subset of `omega`.
    pub omega1: Vec<usize>,
    /// Every raw draw or visit, duplicates included.
    pub draw_log: Vec<usize>,
    pub seed: u64,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Trajectory>,
}

impl SamplingScheme {
    /// `omega = omega1 ++ dedup(draws)`.
    pub fn from_draws(
        dims: GridDims,
        omega1: Vec<usize>,
        draws: Vec<usize>,
        seed: u64,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(omega1.len() + draws.len());
        let mut omega = Vec::with_capacity(omega1.len() + draws.len());
        for &i in omega1.iter().chain(&draws) {
            dims.check_index(i)?;
            if seen.insert(i) {
                omega.push(i);
            }
        }
        if omega.len() < omega1.len() {
            return Err(VdsError::InvalidArgument(
                "deterministic set has duplicates".into(),
            ));
        }
        Ok(Self {
            dims,
            omega,
            omega1,
            draw_log: draws,
            seed,
            provenance,
            trajectory: None,
        })
    }

    /// Every index of the grid once.
    pub fn full(dims: GridDims) -> Self {
        let all: Vec<usize> = (0..dims.len()).collect();
        Self {
            dims,
            omega: all.clone(),
            omega1: vec![],
            draw_log: all,
            seed: 0,
            provenance: Provenance::Full,
            trajectory: None,
        }
    }

    pub fn with_trajectory(mut self, trajectory: Trajectory) -> Self {
        self.trajectory = Some(trajectory);
        self
    }

    /// Number of distinct acquired indices.
    pub fn m(&self) -> usize {
        self.omega.len()
    }

    /// Number of raw draws.
    pub fn raw_count(&self) -> usize {
        self.draw_log.len()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.dims.len()];
        for &i in &self.omega {
            mask[i] = true;
        }
        mask
    }

    /// Keeps the deterministic part and the draws up to the point where
    /// `target` distinct indices are reached.
    pub fn truncate_to_distinct(&mut self, target: usize) {
        if self.omega.len() <= target {
            return;
        }
        let keep = target.max(self.omega1.len());
        let mut seen: HashSet<usize> = self.omega1.iter().copied().collect();
        let mut cut = self.draw_log.len();
        for (pos, &i) in self.draw_log.iter().enumerate() {
            if !seen.contains(&i) {
                if seen.len() == keep {
                    cut = pos;
                    break;
                }
                seen.insert(i);
            }
        }
        self.draw_log.truncate(cut);
        self.omega.truncate(keep);
    }

    pub fn check_invariants(&self) -> Result<()> {
        let set: HashSet<usize> = self.omega.iter().copied().collect();
        if set.len() != self.omega.len() {
            return Err(VdsError::InvalidArgument("omega has duplicates".into()));
        }
        if self.omega.len() > self.dims.len() {
            return Err(VdsError::InvalidArgument(
                "omega larger than the grid".into(),
            ));
        }
        if !self.omega1.iter().all(|i| set.contains(i))
            || !self.draw_log.iter().all(|i| set.contains(i))
        {
            return Err(VdsError::InvalidArgument(
                "omega misses a drawn index".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let scheme: SamplingScheme = serde_json::from_str(s)?;
        scheme.check_invariants()?;
        Ok(scheme)
    }

    /// Plain (ASCII) PBM of the mask; 3D grids are written as slices stacked
    /// along the first axis.
    pub fn to_pbm(&self) -> String {
        let dims = self.dims.dims();
        let width = *dims.last().unwrap();
        let height = self.dims.len() / width;
        let mask = self.mask();
        let mut out = format!("P1\n{width} {height}\n");
        for row in mask.chunks(width) {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims() -> GridDims {
        GridDims::new(vec![4, 4]).unwrap()
    }

    #[test]
    fn from_draws_dedups_in_first_seen_order() {
        let s = SamplingScheme::from_draws(dims(), vec![5], vec![3, 5, 3, 9], 1, Provenance::Mixed)
            .unwrap();
        assert_eq!(s.omega, vec![5, 3, 9]);
        assert_eq!(s.raw_count(), 4);
        s.check_invariants().unwrap();
        assert!(SamplingScheme::from_draws(dims(), vec![], vec![16], 1, Provenance::Iid).is_err());
    }

    #[test]
    fn truncation_keeps_prefix() {
        let mut s =
            SamplingScheme::from_draws(dims(), vec![0], vec![1, 1, 2, 3, 2, 4], 1, Provenance::Iid)
                .unwrap();
        s.truncate_to_distinct(3);
        assert_eq!(s.omega, vec![0, 1, 2]);
        assert_eq!(s.draw_log, vec![1, 1, 2]);
        s.check_invariants().unwrap();
    }

    #[test]
    fn json_round_trip_and_pbm() {
        let s = SamplingScheme::from_draws(
            dims(),
            vec![],
            vec![0, 15],
            7,
            Provenance::Markov { alpha: 0.1 },
        )
        .unwrap();
        let back = SamplingScheme::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.to_pbm(), "P1\n4 4\n1 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 1\n");
    }
}
