//! Preferential-attachment trees and the hub-driven gain sequence.
//!
//! Graph time n counts vertices: the tree starts at n = 2 with one edge and
//! vertex n + 1 attaches to vertex i with probability
//! (d_i(n) + delta) / (2(n - 1) + n delta).

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::StepSchedule;
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq)]
pub struct PAGraph {
    /// Degrees of vertices 1..=n, stored 0-based.
    pub degrees: Vec<u64>,
    /// 0-based index of the lowest-numbered vertex of maximal degree.
    pub max_degree_vertex: usize,
    pub delta: f64,
    /// Vertex i appears d_i - 1 times, so weights d_i + delta split into
    /// (d_i - 1) + (1 + delta) and both parts are sampled in O(1).
    excess: Vec<u32>,
}

impl PAGraph {
    /// The two-vertex graph at time n = 2.
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > -1.0) {
            return Err(Error::InvalidInput(format!("delta must exceed -1, got {delta}")));
        }
        Ok(Self {
            degrees: vec![1, 1],
            max_degree_vertex: 0,
            delta,
            excess: Vec::new(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.degrees.len()
    }

    pub fn max_degree(&self) -> u64 {
        self.degrees[self.max_degree_vertex]
    }

    /// Attaches vertex n + 1 and returns the 0-based index it linked to.
    pub fn grow(&mut self, rng: &mut RandomStream) -> usize {
        let n = self.degrees.len();
        let spread = 1.0 + self.delta;
        let excess = self.excess.len() as f64;
        let total = excess + n as f64 * spread;
        let u = rng.uniform() * total;
        let target = if u < excess {
            self.excess[u as usize] as usize
        } else {
            (((u - excess) / spread) as usize).min(n - 1)
        };
        self.degrees[target] += 1;
        self.excess.push(target as u32);
        self.degrees.push(1);
        let best = self.max_degree_vertex;
        if self.degrees[target] > self.degrees[best]
            || (self.degrees[target] == self.degrees[best] && target < best)
        {
            self.max_degree_vertex = target;
        }
        target
    }

    /// Writes `vertex,degree` rows with 1-based vertex labels.
    pub fn write_degrees_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["vertex", "degree"])?;
        for (i, d) in self.degrees.iter().enumerate() {
            w.write_record([(i + 1).to_string(), d.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn export_degrees(&self, path: &Path) -> Result<()> {
        self.write_degrees_csv(std::fs::File::create(path)?)
    }
}

/// Consuming form of [`PAGraph::grow`].
pub fn pa_grow(mut graph: PAGraph, rng: &mut RandomStream) -> PAGraph {
    graph.grow(rng);
    graph
}

/// Grows a tree up to `n_max` vertices and returns the final graph together
/// with the maximal degree at each graph time 2, 3, ..., n_max.
pub fn grow_with_max_degrees(
    delta: f64,
    n_max: u64,
    rng: &mut RandomStream,
) -> Result<(PAGraph, Vec<u64>)> {
    if n_max < 2 {
        return Err(Error::InvalidInput("graph needs n_max >= 2".into()));
    }
    let mut graph = PAGraph::new(delta)?;
    let mut trace = Vec::with_capacity(n_max as usize - 1);
    trace.push(graph.max_degree());
    for _ in 2..n_max {
        graph.grow(rng);
        trace.push(graph.max_degree());
    }
    Ok((graph, trace))
}

/// lambda d / (n + 1), the gain at graph time n for a hub of degree d.
pub fn hub_rate(lambda: f64, max_degree: u64, n: u64) -> f64 {
    lambda * max_degree as f64 / (n as f64 + 1.0)
}

/// Gain schedule from the max-degree trace starting at graph time 2: walk
/// step k uses the hub degree at graph time k + 2.
pub fn graph_to_schedule(max_degrees: Vec<u64>, lambda: f64) -> Result<StepSchedule> {
    let schedule = StepSchedule::GraphDerived {
        lambda,
        max_degrees,
        start_time: 2,
    };
    schedule.validate()?;
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::step_size;
    use approx::assert_relative_eq;

    #[test]
    fn first_attachment_is_fair() {
        for delta in [0.0, 1.0] {
            let m = 100_000;
            let mut hits = 0;
            for rep in 0..m {
                let mut rng = RandomStream::new(9, rep);
                let mut g = PAGraph::new(delta).unwrap();
                if g.grow(&mut rng) == 0 {
                    hits += 1;
                }
            }
            let p = hits as f64 / m as f64;
            assert!((p - 0.5).abs() < 4.0 * (0.25 / m as f64).sqrt(), "p = {p}");
        }
    }

    #[test]
    fn attachment_probabilities_follow_degrees() {
        // From degrees (2, 1, 1) with delta = 0.5 the weights are 2.5, 1.5, 1.5 of 5.5.
        let m = 200_000u64;
        let mut counts = [0u64; 3];
        let mut base = PAGraph::new(0.5).unwrap();
        base.degrees = vec![2, 1, 1];
        base.excess = vec![0];
        for rep in 0..m {
            let mut rng = RandomStream::new(4, rep);
            let mut g = base.clone();
            counts[g.grow(&mut rng)] += 1;
        }
        for (i, w) in [2.5, 1.5, 1.5].iter().enumerate() {
            let p = w / 5.5;
            let se = (p * (1.0 - p) / m as f64).sqrt();
            let phat = counts[i] as f64 / m as f64;
            assert!((phat - p).abs() < 4.0 * se, "vertex {i}: {phat} vs {p}");
        }
    }

    #[test]
    fn degree_sum_and_max_invariants() {
        let mut rng = RandomStream::new(2, 0);
        let mut g = PAGraph::new(0.0).unwrap();
        for _ in 0..2_000 {
            g.grow(&mut rng);
            let n = g.n_vertices() as u64;
            assert_eq!(g.degrees.iter().sum::<u64>(), 2 * (n - 1));
            let max = *g.degrees.iter().max().unwrap();
            assert_eq!(g.max_degree(), max);
            let first = g.degrees.iter().position(|d| *d == max).unwrap();
            assert_eq!(g.max_degree_vertex, first);
        }
    }

    #[test]
    fn hub_rate_examples() {
        let s = graph_to_schedule(vec![1], 0.5).unwrap();
        assert_relative_eq!(step_size(&s, 0).unwrap(), 0.5 / 3.0);
        let n = 50;
        assert_relative_eq!(hub_rate(0.5, n - 1, n), 0.5 * (n - 1) as f64 / (n + 1) as f64);
    }

    #[test]
    fn csv_export() {
        let g = PAGraph::new(0.0).unwrap();
        let mut buf = Vec::new();
        g.write_degrees_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "vertex,degree\n1,1\n2,1\n");
    }
}
