use serde::{Deserialize, Serialize};

use crate::adversary::AdversarySpec;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::vector::Vector;

/// Everything needed to replay one agreement simulation.
///
/// `byzantine_inputs` are the values Byzantine nodes would hold if they
/// followed the protocol; crash and sign-flip behaviours derive their
/// broadcasts from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementInstance {
    pub params: SystemParams,
    pub honest_inputs: Vec<Vector>,
    pub byzantine_inputs: Vec<Vector>,
    pub adversary: AdversarySpec,
    pub seed: u64,
}

impl AgreementInstance {
    /// Byzantine inputs default to copies of honest inputs (node `k` mirrors
    /// honest node `k mod (n − f)`).
    pub fn new(params: SystemParams, honest_inputs: Vec<Vector>, adversary: AdversarySpec, seed: u64) -> Result<Self> {
        let byzantine_inputs = (0..params.f)
            .map(|k| honest_inputs.get(k % honest_inputs.len().max(1)).cloned())
            .collect::<Option<Vec<_>>>()
            .unwrap_or_default();
        let inst = AgreementInstance {
            params,
            honest_inputs,
            byzantine_inputs,
            adversary,
            seed,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_byzantine_inputs(mut self, inputs: Vec<Vector>) -> Result<Self> {
        self.byzantine_inputs = inputs;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        SystemParams::new(p.n, p.t, p.f, p.d)?;
        if self.honest_inputs.len() != p.honest() {
            return Err(Error::InvalidParams(format!(
                "expected n − f = {} honest inputs, got {}",
                p.honest(),
                self.honest_inputs.len()
            )));
        }
        if self.byzantine_inputs.len() != p.f {
            return Err(Error::InvalidParams(format!(
                "expected f = {} byzantine inputs, got {}",
                p.f,
                self.byzantine_inputs.len()
            )));
        }
        if self.adversary.byzantine_count != p.f {
            return Err(Error::InvalidParams(format!(
                "adversary controls {} nodes but f = {}",
                self.adversary.byzantine_count, p.f
            )));
        }
        for v in self.honest_inputs.iter().chain(&self.byzantine_inputs) {
            v.ensure_dim(p.d)?;
        }
        Ok(())
    }
}
