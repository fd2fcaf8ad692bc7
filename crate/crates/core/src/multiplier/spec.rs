use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{real, C64};
use crate::seqcore::{build_sequence, SequenceSpec, VectorSequence};

/// Symbol of a multiplier: explicit values or a rule in the member index
/// `n = 1, 2, ...`.
///
/// JSON: either `[[re, im], ...]` or an object tagged by `rule`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Values(Vec<C64>),
    Rule(SymbolRule),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolRule {
    Constant { value: C64 },
    OneOverN,
    /// `scale * n^exponent`.
    Power {
        #[serde(default = "one")]
        scale: C64,
        exponent: f64,
    },
}

fn one() -> C64 {
    real(1.0)
}

impl SymbolSpec {
    pub fn constant(value: C64) -> Self {
        SymbolSpec::Rule(SymbolRule::Constant { value })
    }

    /// The first `count` symbol values.
    pub fn values(&self, count: usize) -> Result<Vec<C64>> {
        match self {
            SymbolSpec::Values(v) => {
                if v.len() < count {
                    return Err(Error::LengthMismatch { expected: count, got: v.len() });
                }
                Ok(v[..count].to_vec())
            }
            SymbolSpec::Rule(rule) => Ok((1..=count)
                .map(|n| match rule {
                    SymbolRule::Constant { value } => *value,
                    SymbolRule::OneOverN => real(1.0 / n as f64),
                    SymbolRule::Power { scale, exponent } => scale * (n as f64).powf(*exponent),
                })
                .collect()),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        let ok = match self {
            SymbolSpec::Values(v) => v.iter().all(finite),
            SymbolSpec::Rule(SymbolRule::Constant { value }) => finite(value),
            SymbolSpec::Rule(SymbolRule::OneOverN) => true,
            SymbolSpec::Rule(SymbolRule::Power { scale, exponent }) => finite(scale) && exponent.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("symbol values must be finite"))
        }
    }
}

/// Symbol plus the two sequences of `M_{m, Phi, Psi}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierSpec {
    pub symbol: SymbolSpec,
    pub phi: SequenceSpec,
    pub psi: SequenceSpec,
}

/// One truncation of a multiplier.
#[derive(Clone, Debug)]
pub struct TruncatedMultiplier {
    pub phi: VectorSequence,
    pub psi: VectorSequence,
    pub symbol: Vec<C64>,
}

impl MultiplierSpec {
    pub fn new(symbol: SymbolSpec, phi: SequenceSpec, psi: SequenceSpec) -> Self {
        MultiplierSpec { symbol, phi, psi }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: MultiplierSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("multiplier serialization is infallible")
    }

    pub fn validate(&self) -> Result<()> {
        self.symbol.validate()?;
        self.phi.validate()?;
        self.psi.validate()
    }

    /// `(dim, count)` at truncation `n`; both sequences must agree.
    pub fn shape(&self, n: usize) -> Result<(usize, usize)> {
        let a = self.phi.shape(n)?;
        let b = self.psi.shape(n)?;
        if a != b {
            return Err(Error::DimensionMismatch(format!(
                "phi has shape {a:?} and psi has shape {b:?} at truncation {n}"
            )));
        }
        Ok(a)
    }

    pub fn truncate(&self, n: usize) -> Result<TruncatedMultiplier> {
        self.validate()?;
        let (_, count) = self.shape(n)?;
        Ok(TruncatedMultiplier {
            phi: build_sequence(&self.phi, n)?,
            psi: build_sequence(&self.psi, n)?,
            symbol: self.symbol.values(count)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::FamilyName;

    #[test]
    fn symbol_json_forms() {
        let list: SymbolSpec = serde_json::from_str("[[1,0],[0,2]]").unwrap();
        assert_eq!(list.values(2).unwrap(), vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)]);
        assert!(list.values(3).is_err());
        let rule: SymbolSpec = serde_json::from_str(r#"{"rule":"one_over_n"}"#).unwrap();
        assert_eq!(rule.values(2).unwrap()[1], real(0.5));
        let c: SymbolSpec = serde_json::from_str(r#"{"rule":"constant","value":[0.5,0]}"#).unwrap();
        assert_eq!(c.values(3).unwrap(), vec![real(0.5); 3]);
    }

    #[test]
    fn spec_roundtrip_and_mismatch() {
        let onb = SequenceSpec::family(FamilyName::OrthonormalBasis);
        let spec = MultiplierSpec::new(SymbolSpec::constant(real(0.5)), onb.clone(), onb);
        assert_eq!(MultiplierSpec::from_json(&spec.to_json()).unwrap(), spec);
        let bad = MultiplierSpec::new(
            SymbolSpec::constant(real(1.0)),
            SequenceSpec::family(FamilyName::OrthonormalBasis),
            SequenceSpec::family(FamilyName::OnePlusEn),
        );
        assert!(matches!(bad.truncate(4), Err(Error::DimensionMismatch(_))));
    }
}
