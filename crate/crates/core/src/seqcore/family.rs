use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::spec::{LimitMeta, SequenceSpec};
use crate::error::{Error, Result};
use crate::linalg::{real, CMatrix, C64};

/// Names accepted in the `name` field of a family spec.
pub(crate) const FAMILY_NAMES: &[&str] = &[
    "orthonormal_basis",
    "diagonal",
    "one_plus_en",
    "n_times_one_plus_en",
    "finite_domain_example",
    "random_gaussian",
    "interleave",
    "weighted",
    "repeated_unit",
];

/// Symbolic infinite families.
///
/// Members are counted from 0 internally; the index used by the rules (the
/// `n` in `c(n)`) starts at [`FamilyName::start_index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyName {
    /// `e_1, e_2, ...`
    OrthonormalBasis,
    /// `c(n) e_n`
    Diagonal { c: ScalarRule },
    /// `e_1 + e_n` for `n >= 2`.
    OnePlusEn,
    /// `n (e_1 + e_n)` for `n >= 2`.
    NTimesOnePlusEn,
    /// `e_1, ..., e_d` followed by `m e_{d+k}` over all pairs `(k, m)`
    /// enumerated along anti-diagonals. The analysis operator of the limit
    /// sequence has domain `span(e_1, ..., e_d)`.
    FiniteDomainExample { d: usize },
    /// Complex Gaussian vectors, reproducible from `seed`.
    RandomGaussian {
        seed: u64,
        #[serde(default = "SizeRule::identity")]
        dim: SizeRule,
        #[serde(default = "SizeRule::identity")]
        count: SizeRule,
        #[serde(default = "default_true")]
        complex: bool,
    },
    /// `(a_1, b_1, a_2, b_2, ...)`
    Interleave { a: Box<SequenceSpec>, b: Box<SequenceSpec> },
    /// `w(n) f_n` for a positive rule `w`.
    Weighted { base: Box<SequenceSpec>, w: ScalarRule },
    /// `e_k, e_k, e_k, ...`
    RepeatedUnit { index: usize },
}

fn default_true() -> bool {
    true
}

/// Positive scalar rule `n -> c(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarRule {
    Constant { value: f64 },
    /// `scale * n^exponent`
    Power {
        #[serde(default = "one")]
        scale: f64,
        exponent: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ScalarRule {
    pub fn eval(&self, n: usize) -> f64 {
        match *self {
            ScalarRule::Constant { value } => value,
            ScalarRule::Power { scale, exponent } => scale * (n as f64).powf(exponent),
        }
    }

    fn validate(&self) -> Result<()> {
        let (label, v) = match *self {
            ScalarRule::Constant { value } => ("constant value", value),
            ScalarRule::Power { scale, exponent } => {
                if !exponent.is_finite() {
                    return Err(Error::invalid("power exponent must be finite"));
                }
                ("power scale", scale)
            }
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("{label} must be positive, got {v}")));
        }
        Ok(())
    }

    /// True when the rule is bounded above on `n >= 1`.
    fn is_bounded(&self) -> bool {
        match *self {
            ScalarRule::Constant { .. } => true,
            ScalarRule::Power { exponent, .. } => exponent <= 0.0,
        }
    }
}

/// Size as a function of the truncation index `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SizeRule {
    Constant(usize),
    /// `slope * N + offset`
    Linear { slope: usize, offset: usize },
}

impl SizeRule {
    pub fn identity() -> Self {
        SizeRule::Linear { slope: 1, offset: 0 }
    }

    pub fn eval(&self, n: usize) -> usize {
        match *self {
            SizeRule::Constant(c) => c,
            SizeRule::Linear { slope, offset } => slope * n + offset,
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.eval(1) == 0 {
            return Err(Error::invalid(format!("{what} rule must be positive at N = 1")));
        }
        Ok(())
    }
}

/// Anti-diagonal enumeration of `(k, m)` with `k, m >= 1`:
/// `(1,1), (1,2), (2,1), (1,3), (2,2), (3,1), ...`
pub(crate) fn antidiagonal_pairs(count: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(count);
    let mut s = 2;
    while out.len() < count {
        for k in 1..s {
            if out.len() == count {
                break;
            }
            out.push((k, s - k));
        }
        s += 1;
    }
    out
}

impl FamilyName {
    pub fn label(&self) -> &'static str {
        match self {
            FamilyName::OrthonormalBasis => "orthonormal_basis",
            FamilyName::Diagonal { .. } => "diagonal",
            FamilyName::OnePlusEn => "one_plus_en",
            FamilyName::NTimesOnePlusEn => "n_times_one_plus_en",
            FamilyName::FiniteDomainExample { .. } => "finite_domain_example",
            FamilyName::RandomGaussian { .. } => "random_gaussian",
            FamilyName::Interleave { .. } => "interleave",
            FamilyName::Weighted { .. } => "weighted",
            FamilyName::RepeatedUnit { .. } => "repeated_unit",
        }
    }

    /// Index of the first member in the family's own numbering.
    pub fn start_index(&self) -> usize {
        match self {
            FamilyName::OnePlusEn | FamilyName::NTimesOnePlusEn => 2,
            _ => 1,
        }
    }

    /// Limit facts that hold for every parameter choice of the family.
    pub fn known_limit_meta(&self) -> LimitMeta {
        let meta = |complete, bessel| LimitMeta { complete_in_limit: complete, bessel_in_limit: bessel };
        match self {
            FamilyName::OrthonormalBasis => meta(Some(true), Some(true)),
            FamilyName::Diagonal { c } => meta(Some(true), Some(c.is_bounded())),
            FamilyName::OnePlusEn | FamilyName::NTimesOnePlusEn => meta(Some(true), Some(false)),
            FamilyName::FiniteDomainExample { .. } => meta(Some(true), Some(false)),
            FamilyName::RandomGaussian { .. } => meta(None, None),
            FamilyName::Interleave { a, b } => {
                let (ma, mb) = (a.effective_meta(), b.effective_meta());
                let complete = match (ma.complete_in_limit, mb.complete_in_limit) {
                    (Some(true), _) | (_, Some(true)) => Some(true),
                    _ => None,
                };
                let bessel = match (ma.bessel_in_limit, mb.bessel_in_limit) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                };
                meta(complete, bessel)
            }
            // positive weights never change the span
            FamilyName::Weighted { base, .. } => meta(base.effective_meta().complete_in_limit, None),
            FamilyName::RepeatedUnit { .. } => meta(Some(false), Some(false)),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            FamilyName::Diagonal { c } => c.validate(),
            FamilyName::FiniteDomainExample { d } if *d == 0 => {
                Err(Error::invalid("finite_domain_example needs d >= 1"))
            }
            FamilyName::RandomGaussian { dim, count, .. } => {
                dim.validate("dim")?;
                count.validate("count")
            }
            FamilyName::Interleave { a, b } => {
                a.validate()?;
                b.validate()
            }
            FamilyName::Weighted { base, w } => {
                base.validate()?;
                w.validate()
            }
            FamilyName::RepeatedUnit { index } if *index == 0 => {
                Err(Error::invalid("repeated_unit index starts at 1"))
            }
            _ => Ok(()),
        }
    }

    /// `(ambient_dim, count)` at truncation `n`.
    pub(crate) fn shape(&self, n: usize) -> Result<(usize, usize)> {
        let shape = match self {
            FamilyName::OrthonormalBasis | FamilyName::Diagonal { .. } => (n, n),
            FamilyName::OnePlusEn | FamilyName::NTimesOnePlusEn => {
                if n < 2 {
                    return Err(Error::invalid(format!(
                        "{} starts at n = 2, truncation index {n} is empty",
                        self.label()
                    )));
                }
                (n, n - 1)
            }
            FamilyName::FiniteDomainExample { d } => {
                let kmax = antidiagonal_pairs(n).iter().map(|&(k, _)| k).max().unwrap_or(0);
                (d + kmax, d + n)
            }
            FamilyName::RandomGaussian { dim, count, .. } => (dim.eval(n), count.eval(n)),
            FamilyName::Interleave { a, b } => {
                let (da, ma) = a.shape(n)?;
                let (db, mb) = b.shape(n)?;
                (da.max(db), 2 * ma.min(mb))
            }
            FamilyName::Weighted { base, .. } => base.shape(n)?,
            FamilyName::RepeatedUnit { index } => (*index, n),
        };
        if shape.0 == 0 || shape.1 == 0 {
            return Err(Error::invalid(format!(
                "{} is empty at truncation index {n}",
                self.label()
            )));
        }
        Ok(shape)
    }

    /// Synthesis matrix (members as columns) at truncation `n`.
    pub(crate) fn build(&self, n: usize) -> Result<CMatrix> {
        let (dim, count) = self.shape(n)?;
        let m = match self {
            FamilyName::OrthonormalBasis => CMatrix::identity(dim, count),
            FamilyName::Diagonal { c } => {
                CMatrix::from_fn(dim, count, |i, j| real(if i == j { c.eval(j + 1) } else { 0.0 }))
            }
            FamilyName::OnePlusEn | FamilyName::NTimesOnePlusEn => {
                let scaled = matches!(self, FamilyName::NTimesOnePlusEn);
                CMatrix::from_fn(dim, count, |i, j| {
                    let idx = j + 2;
                    let factor = if scaled { idx as f64 } else { 1.0 };
                    real(if i == 0 || i == idx - 1 { factor } else { 0.0 })
                })
            }
            FamilyName::FiniteDomainExample { d } => {
                let pairs = antidiagonal_pairs(n);
                CMatrix::from_fn(dim, count, |i, j| {
                    if j < *d {
                        real(if i == j { 1.0 } else { 0.0 })
                    } else {
                        let (k, mult) = pairs[j - d];
                        real(if i == d + k - 1 { mult as f64 } else { 0.0 })
                    }
                })
            }
            FamilyName::RandomGaussian { seed, dim: dim_rule, count: count_rule, complex } => {
                let mut m = CMatrix::zeros(dim, count);
                for j in 0..count {
                    // a member keeps the dimension it was born in so that
                    // truncations extend each other after zero padding
                    let mut first = 1;
                    while count_rule.eval(first) <= j {
                        first += 1;
                    }
                    let born_dim = dim_rule.eval(first).min(dim);
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(j as u64);
                    for i in 0..born_dim {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        m[(i, j)] = if *complex {
                            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                        } else {
                            real(re)
                        };
                    }
                }
                m
            }
            FamilyName::Interleave { a, b } => {
                let ma = a.build_matrix(n)?;
                let mb = b.build_matrix(n)?;
                let mut m = CMatrix::zeros(dim, count);
                for j in 0..count / 2 {
                    m.view_mut((0, 2 * j), (ma.nrows(), 1)).copy_from(&ma.column(j));
                    m.view_mut((0, 2 * j + 1), (mb.nrows(), 1)).copy_from(&mb.column(j));
                }
                m
            }
            FamilyName::Weighted { base, w } => {
                let mut m = base.build_matrix(n)?;
                let start = base.start_index();
                for (j, mut col) in m.column_iter_mut().enumerate() {
                    col *= real(w.eval(start + j));
                }
                m
            }
            FamilyName::RepeatedUnit { index } => {
                CMatrix::from_fn(dim, count, |i, _| real(if i + 1 == *index { 1.0 } else { 0.0 }))
            }
        };
        Ok(m)
    }
}
