//! Exact law of the walker vector for tiny N and horizons, obtained by
//! expanding all 2^N draw outcomes at every step.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{step_size, ModelParams};

pub const MAX_WALKERS: usize = 4;
pub const MAX_HORIZON: u64 = 8;
/// Atoms whose walker vectors agree to this tolerance are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Upper bound on atoms materialized in a single step before merging.
pub const ATOM_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub z: Vec<f64>,
    pub prob: f64,
}

impl Atom {
    pub fn z_bar(&self) -> f64 {
        self.z.iter().sum::<f64>() / self.z.len() as f64
    }
}

/// Laws of Z_0, ..., Z_horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub n_walkers: usize,
    pub steps: Vec<Vec<Atom>>,
}

/// Sums the probabilities of atoms that agree to [`MERGE_TOL`].
///
/// Atoms are grouped one coordinate at a time: sort on coordinate k, split
/// where consecutive values differ by more than the tolerance, and recurse
/// into each group on coordinate k + 1. Copies of one atom that differ by
/// rounding therefore end up together even when other atoms sort between
/// them lexicographically.
fn merge(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut out = Vec::with_capacity(atoms.len());
    merge_on(atoms, 0, &mut out);
    out
}

fn merge_on(mut atoms: Vec<Atom>, coord: usize, out: &mut Vec<Atom>) {
    let Some(first) = atoms.first() else { return };
    if coord == first.z.len() {
        let prob = atoms.iter().map(|a| a.prob).sum();
        let mut atom = atoms.swap_remove(0);
        atom.prob = prob;
        out.push(atom);
        return;
    }
    atoms.sort_by(|a, b| a.z[coord].total_cmp(&b.z[coord]));
    let mut group = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for atom in atoms {
        if atom.z[coord] - last > MERGE_TOL && !group.is_empty() {
            merge_on(std::mem::take(&mut group), coord + 1, out);
        }
        last = atom.z[coord];
        group.push(atom);
    }
    merge_on(group, coord + 1, out);
}

/// Exact distribution of the walker vector started from `z0`.
pub fn enumerate_distribution(
    params: &ModelParams,
    z0: &[f64],
    horizon: u64,
) -> Result<ExactDistribution> {
    let n = z0.len();
    if n == 0 || n != params.n_walkers {
        return Err(Error::InvalidInput(format!(
            "z0 has {} entries for {} walkers",
            n, params.n_walkers
        )));
    }
    if n > MAX_WALKERS || horizon > MAX_HORIZON {
        return Err(Error::BudgetExceeded(format!(
            "enumeration limited to N <= {MAX_WALKERS} and horizon <= {MAX_HORIZON}"
        )));
    }
    let (rho, alpha, q) = (params.rho, params.alpha, params.q);
    let mut steps = vec![vec![Atom {
        z: z0.to_vec(),
        prob: 1.0,
    }]];
    for k in 0..horizon {
        let r = step_size(&params.schedule, k)?;
        let current = steps.last().expect("at least the initial law");
        if current.len() << n > ATOM_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "{} atoms at step {k} would expand beyond {ATOM_BUDGET}",
                current.len()
            )));
        }
        let mut next = Vec::with_capacity(current.len() << n);
        for atom in current {
            let mean = atom.z.iter().sum::<f64>() / n as f64;
            let p: Vec<f64> = atom
                .z
                .iter()
                .map(|zi| (1.0 - alpha) * zi + alpha * mean)
                .collect();
            for outcome in 0u32..(1 << n) {
                let mut prob = atom.prob;
                let mut z = Vec::with_capacity(n);
                for (i, (pi, zi)) in p.iter().zip(&atom.z).enumerate() {
                    let hit = outcome >> i & 1 == 1;
                    prob *= if hit { *pi } else { 1.0 - pi };
                    let kernel = rho * if hit { 1.0 } else { 0.0 } + (1.0 - rho) * q;
                    z.push((1.0 - r) * zi + r * kernel);
                }
                if prob > 0.0 {
                    next.push(Atom { z, prob });
                }
            }
        }
        steps.push(merge(next));
    }
    Ok(ExactDistribution {
        n_walkers: n,
        steps,
    })
}

impl ExactDistribution {
    pub fn horizon(&self) -> u64 {
        self.steps.len() as u64 - 1
    }

    pub fn at(&self, step: u64) -> &[Atom] {
        &self.steps[step as usize]
    }

    pub fn total_mass(&self, step: u64) -> f64 {
        self.at(step).iter().map(|a| a.prob).sum()
    }

    /// E[f(Z_step)] over the atoms.
    pub fn expect<F: Fn(&Atom) -> f64>(&self, step: u64, f: F) -> f64 {
        self.at(step).iter().map(|a| a.prob * f(a)).sum()
    }

    pub fn mean_zbar(&self, step: u64) -> f64 {
        self.expect(step, Atom::z_bar)
    }

    pub fn var_zbar(&self, step: u64) -> f64 {
        let m = self.mean_zbar(step);
        self.expect(step, |a| (a.z_bar() - m).powi(2))
    }

    /// Rows `step,z_0,...,z_{N-1},probability` for every step.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["step".to_string()];
        header.extend((0..self.n_walkers).map(|i| format!("z_{i}")));
        header.push("probability".into());
        w.write_record(&header)?;
        for (k, atoms) in self.steps.iter().enumerate() {
            for a in atoms {
                let mut row = vec![k.to_string()];
                row.extend(a.z.iter().map(|x| x.to_string()));
                row.push(a.prob.to_string());
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InitialLaw, StepSchedule};
    use approx::assert_relative_eq;

    fn params(n: usize, rho: f64, alpha: f64, r: Vec<f64>) -> ModelParams {
        ModelParams::new(
            n,
            rho,
            alpha,
            0.5,
            StepSchedule::Explicit { values: r },
            InitialLaw::default(),
        )
        .unwrap()
    }

    #[test]
    fn merge_joins_copies_separated_by_other_atoms() {
        let atom = |z: [f64; 2], prob: f64| Atom { z: z.to_vec(), prob };
        let merged = merge(vec![
            atom([0.3, 0.9], 0.25),
            atom([0.3 + 1e-16, 0.1], 0.25),
            atom([0.3 + 2e-16, 0.9], 0.5),
        ]);
        assert_eq!(merged.len(), 2);
        let heavy = merged.iter().find(|a| a.z[1] == 0.9).unwrap();
        assert_eq!(heavy.prob, 0.75);
    }

    #[test]
    fn single_bernoulli() {
        let d = enumerate_distribution(&params(1, 1.0, 0.0, vec![0.5]), &[0.5], 1).unwrap();
        let atoms = d.at(1);
        assert_eq!(atoms.len(), 2);
        assert_relative_eq!(atoms[0].z[0], 0.25);
        assert_relative_eq!(atoms[0].prob, 0.5);
        assert_relative_eq!(atoms[1].z[0], 0.75);
        assert_relative_eq!(atoms[1].prob, 0.5);
    }

    #[test]
    fn two_walkers_mean_law() {
        // Outcomes (0,0), (0,1), (1,0), (1,1) each w.p. 1/4.
        let d = enumerate_distribution(&params(2, 1.0, 0.5, vec![0.5]), &[0.5, 0.5], 1).unwrap();
        let mut law: Vec<(f64, f64)> = Vec::new();
        for a in d.at(1) {
            let zb = a.z_bar();
            match law.iter_mut().find(|(v, _)| (v - zb).abs() < 1e-12) {
                Some(e) => e.1 += a.prob,
                None => law.push((zb, a.prob)),
            }
        }
        law.sort_by(|a, b| a.0.total_cmp(&b.0));
        let expected = [(0.25, 0.25), (0.5, 0.5), (0.75, 0.25)];
        assert_eq!(law.len(), 3);
        for ((v, p), (ev, ep)) in law.iter().zip(expected) {
            assert_relative_eq!(*v, ev, epsilon = 1e-15);
            assert_relative_eq!(*p, ep, epsilon = 1e-15);
        }
    }

    #[test]
    fn horizon_zero_is_point_mass() {
        let d = enumerate_distribution(&params(3, 0.4, 0.2, vec![]), &[0.1, 0.2, 0.3], 0).unwrap();
        assert_eq!(d.steps.len(), 1);
        assert_eq!(d.at(0)[0].z, vec![0.1, 0.2, 0.3]);
        assert_eq!(d.at(0)[0].prob, 1.0);
    }

    #[test]
    fn limits_enforced() {
        let p = params(1, 1.0, 0.0, vec![0.1; 20]);
        assert!(matches!(
            enumerate_distribution(&p, &[0.5], 9),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let d = enumerate_distribution(&params(1, 1.0, 0.0, vec![0.5]), &[0.5], 1).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "step,z_0,probability\n0,0.5,1\n1,0.25,0.5\n1,0.75,0.5\n");
    }
}
