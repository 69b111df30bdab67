//! The JSON kernel description read by every command.
//!
//! ```json
//! {
//!   "n": 1,
//!   "triple": { "a": [1.5], "b": [0], "c": [1] },
//!   "terms": [ { "exponents": [0, 0], "coeff": [1, 0] } ],
//!   "norm": 0.56418958354775628,
//!   "partition": { "part1": [1] }
//! }
//! ```
//!
//! Matrices are row-major `n × n`. Each term's `exponents` lists the powers
//! of `x₁..xₙ` then `y₁..yₙ`; `coeff` is `[re, im]`. Partition indices are
//! 1-based.

use std::path::Path;

use polygauss_core::entangle::Bipartition;
use polygauss_core::gaussian::GaussianTriple;
use polygauss_core::poly::{Monomial, MultiPoly, Polynomial};
use polygauss_core::{PolyGaussianKernel, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::numfmt::Num;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{origin}: cannot read: {source}")]
    Io {
        origin: String,
        source: std::io::Error,
    },
    #[error("{origin}: line {line}, column {column}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: field `{field}`: {message}")]
    Field {
        origin: String,
        field: String,
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub a: Vec<Num>,
    pub b: Vec<Num>,
    pub c: Vec<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exponents: Vec<u16>,
    pub coeff: [Num; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    pub part1: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub n: usize,
    pub triple: TripleSpec,
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
}

/// A parsed spec plus where it came from.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub spec: KernelSpec,
    pub origin: String,
    /// SHA-256 of the raw input bytes, lowercase hex.
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl KernelSpec {
    pub fn parse(text: &str, origin: &str) -> Result<Self, SpecError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let spec: KernelSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = if path.is_empty() || path == "." {
                inner.to_string()
            } else {
                format!("field `{path}`: {inner}")
            };
            SpecError::Syntax {
                origin: origin.to_string(),
                line: inner.line(),
                column: inner.column(),
                message,
            }
        })?;
        de.end().map_err(|e| SpecError::Syntax {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        spec.validate(origin)?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<LoadedSpec, SpecError> {
        let origin = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|source| SpecError::Io {
            origin: origin.clone(),
            source,
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| SpecError::Syntax {
            origin: origin.clone(),
            line: 1,
            column: e.utf8_error().valid_up_to() + 1,
            message: "input is not UTF-8".into(),
        })?;
        let spec = Self::parse(&text, &origin)?;
        Ok(LoadedSpec {
            spec,
            origin,
            sha256: sha256_hex(&bytes),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    /// Shape checks that need no numerics.
    fn validate(&self, origin: &str) -> Result<(), SpecError> {
        let err = |field: String, message: String| SpecError::Field {
            origin: origin.to_string(),
            field,
            message,
        };
        let n = self.n;
        if n == 0 {
            return Err(err("n".into(), "must be at least 1".into()));
        }
        for (name, m) in [
            ("a", &self.triple.a),
            ("b", &self.triple.b),
            ("c", &self.triple.c),
        ] {
            if m.len() != n * n {
                return Err(err(
                    format!("triple.{name}"),
                    format!("has {} entries, expected n*n = {}", m.len(), n * n),
                ));
            }
            if let Some(i) = m.iter().position(|v| !v.0.is_finite()) {
                return Err(err(format!("triple.{name}[{i}]"), "not finite".into()));
            }
        }
        if self.terms.is_empty() {
            return Err(err("terms".into(), "polynomial has no terms".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.exponents.len() != 2 * n {
                return Err(err(
                    format!("terms[{i}].exponents"),
                    format!("has {} entries, expected 2n = {}", t.exponents.len(), 2 * n),
                ));
            }
            if !(t.coeff[0].0.is_finite() && t.coeff[1].0.is_finite()) {
                return Err(err(format!("terms[{i}].coeff"), "not finite".into()));
            }
        }
        if let Some(norm) = self.norm {
            if !(norm.0.is_finite() && norm.0 > 0.0) {
                return Err(err(
                    "norm".into(),
                    format!("must be finite and positive, got {}", norm.0),
                ));
            }
        }
        if let Some(p) = &self.partition {
            Bipartition::new(n, &p.part1)
                .map_err(|e| err("partition.part1".into(), e.to_string()))?;
        }
        Ok(())
    }

    pub fn triple(&self) -> Result<GaussianTriple, String> {
        let v = |m: &[Num]| m.iter().map(|x| x.0).collect::<Vec<_>>();
        GaussianTriple::from_row_major(
            self.n,
            &v(&self.triple.a),
            &v(&self.triple.b),
            &v(&self.triple.c),
        )
        .map_err(|e| format!("triple: {e}"))
    }

    /// The polynomial as written, before any self-adjointness check.
    pub fn polynomial(&self) -> Result<MultiPoly, String> {
        let mut p = Polynomial::zero(2 * self.n);
        for t in &self.terms {
            p.add_term(
                Monomial::new(t.exponents.clone()),
                C64::new(t.coeff[0].0, t.coeff[1].0),
            );
        }
        MultiPoly::new(self.n, p).map_err(|e| format!("terms: {e}"))
    }

    pub fn norm_value(&self) -> f64 {
        self.norm.map_or(1.0, |v| v.0)
    }

    pub fn kernel(&self) -> Result<PolyGaussianKernel, String> {
        let triple = self.triple()?;
        triple
            .require_kernel_valid()
            .map_err(|e| format!("triple: {e}"))?;
        PolyGaussianKernel::new(self.polynomial()?, triple, self.norm_value())
            .map_err(|e| e.to_string())
    }

    pub fn bipartition(&self) -> Option<Result<Bipartition, String>> {
        self.partition
            .as_ref()
            .map(|p| Bipartition::new(self.n, &p.part1).map_err(|e| e.to_string()))
    }

    pub fn from_kernel(k: &PolyGaussianKernel) -> Self {
        let g = k.triple();
        let row_major = |m: &polygauss_core::numerics::RealMatrix| {
            m.as_slice().iter().copied().map(Num).collect()
        };
        KernelSpec {
            n: k.n(),
            triple: TripleSpec {
                a: row_major(g.a().matrix()),
                b: row_major(g.b()),
                c: row_major(g.c().matrix()),
            },
            terms: k
                .poly()
                .terms()
                .map(|(m, c)| TermSpec {
                    exponents: m.exponents().to_vec(),
                    coeff: [Num(c.re), Num(c.im)],
                })
                .collect(),
            norm: Some(Num(k.norm())),
            partition: None,
        }
    }
}
