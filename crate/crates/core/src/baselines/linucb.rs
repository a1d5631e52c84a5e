//! LinUCB with one shared linear model, repeated `b` times per task by
//! sequentially removing the chosen candidate.

use nalgebra::{DMatrix, DVector};

use super::{top_k, Observation, Policy, PolicyError, PolicyKind, PolicyOutput};
use crate::env::Round;
use crate::reward::{Phase, ReplicationDecision};
use crate::SimRng;

pub struct MLinUcb {
    alpha: f64,
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    b: DVector<f64>,
}

impl MLinUcb {
    pub fn new(dim: usize, alpha: f64) -> Self {
        Self {
            alpha,
            a: DMatrix::identity(dim, dim),
            a_inv: DMatrix::identity(dim, dim),
            b: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn theta(&self) -> DVector<f64> {
        &self.a_inv * &self.b
    }

    fn vector(&self, phi: &[f64]) -> Result<DVector<f64>, PolicyError> {
        if phi.len() != self.dim() {
            return Err(PolicyError::DimensionMismatch { expected: self.dim(), actual: phi.len() });
        }
        Ok(DVector::from_column_slice(phi))
    }

    /// `theta . phi + alpha sqrt(phi' A^-1 phi)`.
    pub fn score(&self, phi: &[f64]) -> Result<f64, PolicyError> {
        let x = self.vector(phi)?;
        let width = (x.dot(&(&self.a_inv * &x))).max(0.0).sqrt();
        Ok(self.theta().dot(&x) + self.alpha * width)
    }

    /// `A += phi phi'`, `b += q phi`.
    pub fn update(&mut self, phi: &[f64], quality: u8) -> Result<(), PolicyError> {
        let x = self.vector(phi)?;
        self.a += &x * x.transpose();
        self.b += f64::from(quality) * &x;
        // Sherman-Morrison keeps the inverse current
        let ax = &self.a_inv * &x;
        let denom = 1.0 + x.dot(&ax);
        self.a_inv -= (&ax * ax.transpose()) / denom;
        Ok(())
    }

    pub fn design_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl Policy for MLinUcb {
    fn name(&self) -> &'static str {
        PolicyKind::Mlinucb.as_str()
    }

    fn select(&mut self, round: &Round, _t: u64, _rng: &mut SimRng) -> Result<PolicyOutput, PolicyError> {
        let scores = round
            .candidates
            .iter()
            .map(|c| self.score(c.context.coords()))
            .collect::<Result<Vec<_>, _>>()?;
        let selected = top_k(&scores, round.task.budget)
            .into_iter()
            .map(|i| round.candidates[i].id)
            .collect();
        Ok(PolicyOutput {
            decision: ReplicationDecision { task_id: round.task.id, selected, phase: Phase::Baseline },
            misexploitation: false,
        })
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        self.update(obs.context.coords(), obs.quality)
    }
}
