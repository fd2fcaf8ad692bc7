use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::family::{FamilyName, FAMILY_NAMES};
use super::sequence::{Origin, VectorSequence};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Vector, C64};

/// Declared facts about the infinite sequence. Never inferred from truncations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete_in_limit: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bessel_in_limit: Option<bool>,
}

impl LimitMeta {
    pub fn is_empty(&self) -> bool {
        self.complete_in_limit.is_none() && self.bessel_in_limit.is_none()
    }

    /// Fields of `self` win over `fallback`.
    pub fn or(self, fallback: LimitMeta) -> LimitMeta {
        LimitMeta {
            complete_in_limit: self.complete_in_limit.or(fallback.complete_in_limit),
            bessel_in_limit: self.bessel_in_limit.or(fallback.bessel_in_limit),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpecKind {
    Explicit(Vec<Vector>),
    Family(FamilyName),
}

/// Description of a (possibly infinite) sequence plus its truncation rule.
///
/// JSON form:
///
/// ```json
/// {"kind": "family", "name": "one_plus_en", "params": {}, "meta": {"complete_in_limit": true}}
/// {"kind": "explicit", "vectors": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct SequenceSpec {
    pub kind: SpecKind,
    /// Declared metadata; see [`SequenceSpec::effective_meta`].
    pub meta: LimitMeta,
}

impl SequenceSpec {
    pub fn family(family: FamilyName) -> Self {
        SequenceSpec { kind: SpecKind::Family(family), meta: LimitMeta::default() }
    }

    pub fn explicit(vectors: Vec<Vector>) -> Result<Self> {
        let spec = SequenceSpec { kind: SpecKind::Explicit(vectors), meta: LimitMeta::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_meta(mut self, meta: LimitMeta) -> Self {
        self.meta = meta;
        self
    }

    /// Declared metadata, falling back to what is known for the family.
    pub fn effective_meta(&self) -> LimitMeta {
        match &self.kind {
            SpecKind::Explicit(_) => self.meta,
            SpecKind::Family(f) => self.meta.or(f.known_limit_meta()),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            SpecKind::Explicit(v) => format!("explicit[{}]", v.len()),
            SpecKind::Family(f) => f.label().to_string(),
        }
    }

    pub fn start_index(&self) -> usize {
        match &self.kind {
            SpecKind::Explicit(_) => 1,
            SpecKind::Family(f) => f.start_index(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SpecKind::Explicit(vectors) => {
                let first = vectors
                    .first()
                    .ok_or_else(|| Error::invalid("explicit spec without vectors"))?;
                if first.is_empty() {
                    return Err(Error::invalid("explicit vectors must have positive dimension"));
                }
                if vectors.iter().any(|v| v.len() != first.len()) {
                    return Err(Error::DimensionMismatch(
                        "explicit vectors differ in dimension".into(),
                    ));
                }
                Ok(())
            }
            SpecKind::Family(f) => f.validate(),
        }
    }

    /// `(ambient_dim, count)` at truncation `n` without building the vectors.
    pub fn shape(&self, n: usize) -> Result<(usize, usize)> {
        if n == 0 {
            return Err(Error::invalid("truncation index must be at least 1"));
        }
        match &self.kind {
            SpecKind::Explicit(v) => Ok((v[0].len(), n.min(v.len()))),
            SpecKind::Family(f) => f.shape(n),
        }
    }

    pub(crate) fn build_matrix(&self, n: usize) -> Result<CMatrix> {
        let (dim, count) = self.shape(n)?;
        match &self.kind {
            SpecKind::Explicit(v) => Ok(CMatrix::from_fn(dim, count, |i, j| v[j][i])),
            SpecKind::Family(f) => f.build(n),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        // go through the raw form so top-level errors keep their variant
        let raw: RawSpec = serde_json::from_str(text)?;
        SequenceSpec::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization is infallible")
    }
}

/// Renders the first members of `spec` at truncation `trunc_index`.
///
/// Explicit specs return their first `min(trunc_index, len)` vectors; family
/// specs return `count(N)` members in dimension `dim(N)`.
pub fn build_sequence(spec: &SequenceSpec, trunc_index: usize) -> Result<VectorSequence> {
    spec.validate()?;
    let columns = spec.build_matrix(trunc_index)?;
    Ok(VectorSequence::from_columns(columns)?
        .with_origin(Origin { label: spec.label(), trunc_index }))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawKind {
    Family,
    Explicit,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: RawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "LimitMeta::is_empty")]
    meta: LimitMeta,
}

impl TryFrom<RawSpec> for SequenceSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let kind = match raw.kind {
            RawKind::Explicit => {
                let vectors = raw
                    .vectors
                    .ok_or_else(|| Error::Parse("explicit spec needs `vectors`".into()))?;
                SpecKind::Explicit(
                    vectors
                        .into_iter()
                        .map(|v| Vector::from_iterator(v.len(), v.into_iter().map(|[re, im]| C64::new(re, im))))
                        .collect(),
                )
            }
            RawKind::Family => {
                let name =
                    raw.name.ok_or_else(|| Error::Parse("family spec needs `name`".into()))?;
                if !FAMILY_NAMES.contains(&name.as_str()) {
                    return Err(Error::UnknownFamily(name));
                }
                let mut tagged = serde_json::Map::new();
                tagged.insert("name".into(), Value::String(name));
                match raw.params {
                    None | Some(Value::Null) => {}
                    Some(Value::Object(o)) if o.is_empty() => {}
                    Some(p) => {
                        tagged.insert("params".into(), p);
                    }
                }
                SpecKind::Family(serde_json::from_value(Value::Object(tagged))?)
            }
        };
        let spec = SequenceSpec { kind, meta: raw.meta };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<SequenceSpec> for RawSpec {
    fn from(spec: SequenceSpec) -> Self {
        match spec.kind {
            SpecKind::Explicit(vectors) => RawSpec {
                kind: RawKind::Explicit,
                name: None,
                params: None,
                vectors: Some(
                    vectors.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect(),
                ),
                meta: spec.meta,
            },
            SpecKind::Family(f) => {
                let value = serde_json::to_value(&f).expect("family serialization is infallible");
                let (name, params) = match value {
                    Value::Object(mut o) => (
                        o.remove("name").and_then(|v| v.as_str().map(str::to_owned)),
                        o.remove("params"),
                    ),
                    _ => (None, None),
                };
                RawSpec { kind: RawKind::Family, name, params, vectors: None, meta: spec.meta }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use crate::seqcore::{ScalarRule, SizeRule};

    fn unit(dim: usize, k: usize) -> Vector {
        Vector::from_fn(dim, |i, _| real(if i == k { 1.0 } else { 0.0 }))
    }

    #[test]
    fn onb_three() {
        let s = build_sequence(&SequenceSpec::family(FamilyName::OrthonormalBasis), 3).unwrap();
        assert_eq!(s.ambient_dim(), 3);
        assert_eq!(s.len(), 3);
        assert_eq!(s.columns(), &CMatrix::identity(3, 3));
        assert_eq!(s.origin().unwrap().trunc_index, 3);
    }

    #[test]
    fn one_plus_en_at_four() {
        let s = build_sequence(&SequenceSpec::family(FamilyName::OnePlusEn), 4).unwrap();
        assert_eq!((s.ambient_dim(), s.len()), (4, 3));
        for (j, n) in (2..=4).enumerate() {
            assert_eq!(s.vector(j), unit(4, 0) + unit(4, n - 1));
        }
    }

    #[test]
    fn random_gaussian_is_reproducible() {
        let spec = SequenceSpec::family(FamilyName::RandomGaussian {
            seed: 7,
            dim: SizeRule::identity(),
            count: SizeRule::identity(),
            complex: true,
        });
        let a = build_sequence(&spec, 5).unwrap();
        let b = build_sequence(&spec, 5).unwrap();
        let bits = |s: &VectorSequence| {
            s.columns().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn explicit_clamps_to_length() {
        let spec = SequenceSpec::explicit(vec![unit(2, 0), unit(2, 0), unit(2, 1)]).unwrap();
        assert_eq!(build_sequence(&spec, 100).unwrap().len(), 3);
        assert_eq!(build_sequence(&spec, 2).unwrap().len(), 2);
        assert!(build_sequence(&spec, 0).is_err());
    }

    #[test]
    fn json_family_roundtrip() {
        let text = r#"{"kind":"family","name":"diagonal","params":{"c":{"rule":"power","exponent":1.0}},"meta":{"complete_in_limit":true}}"#;
        let spec = SequenceSpec::from_json(text).unwrap();
        assert_eq!(
            spec.kind,
            SpecKind::Family(FamilyName::Diagonal { c: ScalarRule::Power { scale: 1.0, exponent: 1.0 } })
        );
        assert_eq!(SequenceSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn json_unit_family_and_unknown_name() {
        let spec = SequenceSpec::from_json(r#"{"kind":"family","name":"one_plus_en","params":{}}"#).unwrap();
        assert_eq!(spec.kind, SpecKind::Family(FamilyName::OnePlusEn));
        assert_eq!(spec.to_json(), r#"{"kind":"family","name":"one_plus_en"}"#);
        let err = SequenceSpec::from_json(r#"{"kind":"family","name":"gabor"}"#).unwrap_err();
        assert!(matches!(err, Error::UnknownFamily(_)));
    }

    #[test]
    fn json_rejects_non_positive_params() {
        let text = r#"{"kind":"family","name":"diagonal","params":{"c":{"rule":"constant","value":-1}}}"#;
        assert!(matches!(SequenceSpec::from_json(text), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn nested_interleave_json() {
        let text = r#"{"kind":"family","name":"interleave","params":{"a":{"kind":"family","name":"orthonormal_basis"},"b":{"kind":"family","name":"one_plus_en"}}}"#;
        let spec = SequenceSpec::from_json(text).unwrap();
        let s = build_sequence(&spec, 3).unwrap();
        // min(3, 2) pairs in dimension 3
        assert_eq!((s.ambient_dim(), s.len()), (3, 4));
        assert_eq!(s.vector(1), unit(3, 0) + unit(3, 1));
        assert_eq!(SequenceSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn effective_meta_prefers_declared() {
        let spec = SequenceSpec::family(FamilyName::OnePlusEn);
        assert_eq!(spec.effective_meta().complete_in_limit, Some(true));
        assert_eq!(spec.effective_meta().bessel_in_limit, Some(false));
        let declared = spec.with_meta(LimitMeta { complete_in_limit: Some(false), bessel_in_limit: None });
        assert_eq!(declared.effective_meta().complete_in_limit, Some(false));
        assert_eq!(declared.effective_meta().bessel_in_limit, Some(false));
    }
}
