//! Executable XOR protocols over nonlocal boxes.

use serde::{Deserialize, Serialize};

use super::expr::{Expr, Footprint};
use crate::error::{Error, Result};
use crate::twoparty::TargetSpec;

/// Inputs the two parties feed into one box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxInputs {
    pub alice: Expr,
    pub bob: Expr,
}

/// A protocol: boxes are used in order, and each box input may read the
/// party's own input bits, shared and private randomness, and the party's
/// outputs from earlier boxes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTree {
    pub name: String,
    pub alice_bits: usize,
    pub bob_bits: usize,
    #[serde(default)]
    pub shared_bits: usize,
    #[serde(default)]
    pub alice_private_bits: usize,
    #[serde(default)]
    pub bob_private_bits: usize,
    pub boxes: Vec<BoxInputs>,
    pub alice_output: Expr,
    pub bob_output: Expr,
}

/// On-disk protocol description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub schema: String,
    pub target: TargetSpec,
    pub box_count: usize,
    #[serde(flatten)]
    pub protocol: ProtocolTree,
}

impl ProtocolFile {
    pub fn new(protocol: ProtocolTree, target: TargetSpec) -> Self {
        ProtocolFile { schema: crate::SCHEMA.to_string(), box_count: protocol.box_count(), target, protocol }
    }

    pub fn validate(&self) -> Result<()> {
        if self.box_count != self.protocol.boxes.len() {
            return Err(Error::InvalidProtocol(format!(
                "box_count is {} but {} boxes are listed",
                self.box_count,
                self.protocol.boxes.len()
            )));
        }
        self.protocol.validate()
    }
}

impl ProtocolTree {
    pub fn box_count(&self) -> usize {
        self.boxes.len()
    }

    /// True iff no box input reads an earlier box output.
    pub fn is_non_adaptive(&self) -> bool {
        self.boxes.iter().all(|b| b.alice.footprint().outputs == 0 && b.bob.footprint().outputs == 0)
    }

    pub fn randomness_bits(&self) -> usize {
        self.shared_bits + self.alice_private_bits + self.bob_private_bits
    }

    pub fn validate(&self) -> Result<()> {
        let check = |what: &str, e: &Expr, bits: usize, private: usize, outputs: usize| -> Result<()> {
            let fp: Footprint = e.footprint();
            let bad = |msg: String| Err(Error::InvalidProtocol(format!("{}: {what}: {msg}", self.name)));
            if fp.inputs > bits {
                return bad(format!("reads input bit {} of {bits}", fp.inputs - 1));
            }
            if fp.outputs > outputs {
                return bad(format!("reads box output {} but only {outputs} are available", fp.outputs - 1));
            }
            if fp.shared > self.shared_bits {
                return bad(format!("reads shared bit {} of {}", fp.shared - 1, self.shared_bits));
            }
            if fp.private > private {
                return bad(format!("reads private bit {} of {private}", fp.private - 1));
            }
            if e.has_malformed_table() {
                return bad("table arity differs from its input count".into());
            }
            Ok(())
        };
        for (i, b) in self.boxes.iter().enumerate() {
            check(&format!("box {i} (alice)"), &b.alice, self.alice_bits, self.alice_private_bits, i)?;
            check(&format!("box {i} (bob)"), &b.bob, self.bob_bits, self.bob_private_bits, i)?;
        }
        let t = self.boxes.len();
        check("alice output", &self.alice_output, self.alice_bits, self.alice_private_bits, t)?;
        check("bob output", &self.bob_output, self.bob_bits, self.bob_private_bits, t)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_box() -> ProtocolTree {
        ProtocolTree {
            name: "t".into(),
            alice_bits: 1,
            bob_bits: 1,
            shared_bits: 0,
            alice_private_bits: 0,
            bob_private_bits: 0,
            boxes: vec![BoxInputs { alice: Expr::Input(0), bob: Expr::Input(0) }],
            alice_output: Expr::Output(0),
            bob_output: Expr::Output(0),
        }
    }

    #[test]
    fn validation() {
        let p = one_box();
        p.validate().unwrap();
        assert!(p.is_non_adaptive());
        let mut q = p.clone();
        q.boxes[0].alice = Expr::Output(0);
        assert!(q.validate().is_err());
        let mut q = p.clone();
        q.bob_output = Expr::Shared(0);
        assert!(q.validate().is_err());
        let mut q = p.clone();
        q.alice_output = Expr::Input(3);
        assert!(q.validate().is_err());
    }

    #[test]
    fn file_round_trip() {
        let file = ProtocolFile::new(one_box(), TargetSpec::Addr(1));
        let json = serde_json::to_string_pretty(&file).unwrap();
        let back: ProtocolFile = serde_json::from_str(&json).unwrap();
        back.validate().unwrap();
        assert_eq!(back.protocol, file.protocol);
        let mut broken = back.clone();
        broken.box_count = 2;
        assert!(broken.validate().is_err());
    }
}
