//! JSON form of cones:
//!
//! ```text
//! {"kind":"polyhedral","dim":3,"generators":[["1/1","0/1","1/1"], ...]}
//! {"kind":"lorentz","n":2,"r":"1/1"}
//! {"kind":"psd","n":2}
//! {"kind":"classical","n":3}
//! {"kind":"polygon","vertices":[["-1/1","0/1"], ...]}
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cones::{Cone, Polygon, PolyhedralCone, Radius};
use crate::error::{Error, Result};
use crate::exactnum::rational::{format_rational, parse_rational, serde_rational, QVec};

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ConeFile {
    Polyhedral {
        dim: usize,
        #[serde(with = "serde_rational::vecvec")]
        generators: Vec<QVec>,
    },
    Lorentz {
        n: usize,
        r: Value,
    },
    Psd {
        n: usize,
    },
    Classical {
        n: usize,
    },
    Polygon {
        #[serde(with = "serde_rational::vecvec")]
        vertices: Vec<QVec>,
    },
}

/// Largest PSD size accepted from input files.
const MAX_PSD: usize = 16;

pub fn cone_from_value(v: Value) -> Result<Cone> {
    let file: ConeFile = serde_json::from_value(v).map_err(|e| Error::Parse(format!("cone schema: {e}")))?;
    match file {
        ConeFile::Polyhedral { dim, generators } => Ok(Cone::Polyhedral(PolyhedralCone::with_dim(dim, generators)?)),
        ConeFile::Lorentz { n, r } => match r {
            Value::String(s) => Cone::lorentz(n, parse_rational(&s)?),
            Value::Number(x) => Cone::lorentz_float(n, x.as_f64().ok_or_else(|| Error::Parse("bad radius".into()))?),
            _ => Err(Error::Parse("Lorentz radius must be a \"p/q\" string or a number".into())),
        },
        ConeFile::Psd { n } => {
            if n == 0 || n > MAX_PSD {
                return Err(Error::CapExceeded(format!("PSD size must be in 1..={MAX_PSD}")));
            }
            Ok(Cone::Psd { n })
        }
        ConeFile::Classical { n } => {
            if n == 0 || n > super::polyhedral::MAX_DIM {
                return Err(Error::CapExceeded(format!("orthant dimension must be in 1..={}", super::polyhedral::MAX_DIM)));
            }
            Ok(Cone::Classical { n })
        }
        ConeFile::Polygon { vertices } => Ok(Cone::ConeOverPolygon(Polygon::new(vertices)?)),
    }
}

pub fn cone_from_str(text: &str) -> Result<Cone> {
    cone_from_value(serde_json::from_str(text)?)
}

pub fn cone_from_path(path: &std::path::Path) -> Result<Cone> {
    cone_from_str(&std::fs::read_to_string(path)?)
}

pub fn cone_to_value(c: &Cone) -> Value {
    let file = match c {
        Cone::Polyhedral(p) => ConeFile::Polyhedral { dim: p.dim(), generators: p.generators().to_vec() },
        Cone::Lorentz { n, r } => ConeFile::Lorentz {
            n: *n,
            r: match r {
                Radius::Exact(r) => Value::String(format_rational(r)),
                Radius::Float(r) => serde_json::json!(r),
            },
        },
        Cone::Psd { n } => ConeFile::Psd { n: *n },
        Cone::Classical { n } => ConeFile::Classical { n: *n },
        Cone::ConeOverPolygon(p) => ConeFile::Polygon { vertices: p.vertices().to_vec() },
    };
    serde_json::to_value(file).expect("cone serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let texts = [
            r#"{"kind":"polyhedral","dim":3,"generators":[["1/1","0/1","1/1"],["0/1","1/1","1/1"],["-1/1","0/1","1/1"],["0/1","-1/1","1/1"]]}"#,
            r#"{"kind":"lorentz","n":2,"r":"1/1"}"#,
            r#"{"kind":"psd","n":2}"#,
            r#"{"kind":"classical","n":3}"#,
            r#"{"kind":"polygon","vertices":[["−1/1","0/1"],["0/1","−1/1"],["1/1","0/1"],["0/1","1/1"]]}"#,
        ];
        for t in texts {
            let c = cone_from_str(t).unwrap();
            let again = cone_from_value(cone_to_value(&c)).unwrap();
            assert_eq!(c, again);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(cone_from_str(r#"{"kind":"lorentz","n":2,"r":"-1/1"}"#).is_err());
        assert!(cone_from_str(r#"{"kind":"polyhedral","dim":2,"generators":[["1/1","0/1"],["-1/1","0/1"]]}"#).is_err());
        assert!(cone_from_str(r#"{"kind":"banana"}"#).is_err());
        assert!(cone_from_str(r#"{"kind":"polygon","vertices":[["0/1","0/1"],["1/1","0/1"]]}"#).is_err());
    }
}
