//! JSON system descriptors: an affine toral map, optional Lie algebra data,
//! and symbol approximations.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact::{IntMatrix, Rat, RatMatrix};
use crate::json;
use crate::nilpotent::RationalLieAlgebra;
use crate::toral::{AffineToralMap, SymReal, SymbolContext};

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDescriptor {
    pub map: AffineToralMap,
    pub lie_algebra: Option<RationalLieAlgebra>,
    /// Automorphism of the Lie algebra when it differs from the linear part.
    pub automorphism: Option<RatMatrix>,
}

const KEYS: [&str; 6] = ["n", "matrix", "translation", "symbols", "lie_algebra", "automorphism"];

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::InvalidInput(format!("descriptor is missing {key:?}")))
}

fn parse_symbols(v: &Value) -> Result<SymbolContext> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("\"symbols\" must be an array".into()))?;
    let mut ctx = SymbolContext::new();
    for s in arr {
        let o = s
            .as_object()
            .ok_or_else(|| Error::InvalidInput(format!("symbol entry must be an object: {s}")))?;
        if let Some(k) = o.keys().find(|k| !matches!(k.as_str(), "name" | "approx")) {
            return Err(Error::InvalidInput(format!("unknown symbol field {k:?}")));
        }
        let name = o
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidInput("symbol needs a string \"name\"".into()))?;
        let approx = match o.get("approx") {
            None => None,
            Some(a) => Some(a.as_f64().ok_or_else(|| {
                Error::InvalidInput(format!("approx for {name:?} must be a number"))
            })?),
        };
        ctx.declare(name, approx)?;
    }
    Ok(ctx)
}

/// An entry-level `"approx"` gives the numeric value of the whole entry; it
/// fixes the symbol's value when exactly one symbol appears.
fn entry_approx(entry: &Value, value: &SymReal, ctx: &mut SymbolContext) -> Result<()> {
    let Some(a) = entry.get("approx") else {
        return Ok(());
    };
    let a = a
        .as_f64()
        .ok_or_else(|| Error::InvalidInput("\"approx\" must be a number".into()))?;
    let syms: Vec<(&String, &Rat)> = value.irrational_parts().iter().collect();
    let [(name, c)] = syms.as_slice() else {
        return Err(Error::InvalidInput(
            "entry-level \"approx\" needs exactly one symbol".into(),
        ));
    };
    let r = num_traits::ToPrimitive::to_f64(value.rational_part()).unwrap_or(f64::NAN);
    let c = num_traits::ToPrimitive::to_f64(*c).unwrap_or(f64::NAN);
    ctx.declare(name, Some((a - r) / c))
}

impl SystemDescriptor {
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidInput("descriptor must be a JSON object".into()))?;
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidInput(format!("unknown descriptor field {k:?}")));
        }
        let n = field(obj, "n")?
            .as_u64()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidInput("\"n\" must be a positive integer".into()))?
            as usize;
        let matrix = json::parse_int_matrix(field(obj, "matrix")?)?;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected {n}x{n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let mut ctx = match obj.get("symbols") {
            Some(s) => parse_symbols(s)?,
            None => SymbolContext::new(),
        };
        let translation = match obj.get("translation") {
            None => vec![SymReal::zero(); n],
            Some(Value::Array(entries)) => {
                let mut out = Vec::with_capacity(entries.len());
                for e in entries {
                    let t = SymReal::from_json(e)?;
                    entry_approx(e, &t, &mut ctx)?;
                    out.push(t);
                }
                out
            }
            Some(_) => return Err(Error::InvalidInput("\"translation\" must be an array".into())),
        };
        let map = AffineToralMap::with_context(matrix, translation, ctx)?;
        let lie_algebra = obj
            .get("lie_algebra")
            .map(|t| parse_lie_algebra(n, t))
            .transpose()?;
        let automorphism = obj
            .get("automorphism")
            .map(json::parse_rat_matrix)
            .transpose()?;
        if let Some(a) = &automorphism {
            if a.rows() != n || a.cols() != n {
                return Err(Error::DimensionMismatch("automorphism must be n x n".into()));
            }
        }
        Ok(SystemDescriptor {
            map,
            lie_algebra,
            automorphism,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn from_map(map: AffineToralMap) -> Self {
        SystemDescriptor {
            map,
            lie_algebra: None,
            automorphism: None,
        }
    }

    /// Canonical form: sorted keys, reduced fractions, symbols declared once.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("n".into(), json!(self.map.dim()));
        obj.insert("matrix".into(), json::int_matrix(self.map.linear()));
        obj.insert(
            "translation".into(),
            Value::Array(self.map.translation().iter().map(SymReal::to_json).collect()),
        );
        if !self.map.context().is_empty() {
            let mut syms = self.map.context().to_json();
            if let Value::Array(a) = &mut syms {
                a.sort_by(|x, y| x["name"].as_str().cmp(&y["name"].as_str()));
            }
            obj.insert("symbols".into(), syms);
        }
        if let Some(l) = &self.lie_algebra {
            obj.insert("lie_algebra".into(), l.to_json());
        }
        if let Some(a) = &self.automorphism {
            obj.insert("automorphism".into(), json::rat_matrix(a));
        }
        Value::Object(obj)
    }

    pub fn to_canonical_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("JSON values serialize")
    }

    /// Lie algebra automorphism: the explicit one, else the linear part.
    pub fn lie_automorphism(&self) -> RatMatrix {
        self.automorphism
            .clone()
            .unwrap_or_else(|| self.map.linear().to_rat())
    }

    pub fn linear(&self) -> &IntMatrix {
        self.map.linear()
    }
}

/// Triples `[i, j, k, "c"]` meaning `[e_i, e_j]` has `e_k`-coefficient `c`.
/// Jacobi is not checked here so that callers can report the failing triple.
pub fn parse_lie_algebra(n: usize, v: &Value) -> Result<RationalLieAlgebra> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("\"lie_algebra\" must be an array of triples".into()))?;
    let idx = |x: &Value| {
        x.as_u64()
            .map(|i| i as usize)
            .ok_or_else(|| Error::InvalidInput(format!("bad index {x}")))
    };
    let triples = arr
        .iter()
        .map(|t| {
            let t = t
                .as_array()
                .filter(|t| t.len() == 4)
                .ok_or_else(|| Error::InvalidInput(format!("expected [i, j, k, value]: {t}")))?;
            Ok((idx(&t[0])?, idx(&t[1])?, idx(&t[2])?, json::parse_rat(&t[3])?))
        })
        .collect::<Result<Vec<_>>>()?;
    RationalLieAlgebra::from_triples_unchecked(n, &triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_one;

    const EX1: &str = r#"{"n": 3, "matrix": [[1,0,0],[1,1,0],[2,1,1]],
        "translation": [{"rational": "2/4"}, {"rational": "0"}, {"rational": "3"}]}"#;

    #[test]
    fn loads_example_one() {
        let d = SystemDescriptor::parse(EX1).unwrap();
        assert_eq!(d.map, example_one());
        assert_eq!(
            d.to_canonical_string(),
            r#"{"matrix":[[1,0,0],[1,1,0],[2,1,1]],"n":3,"translation":[{"rational":"1/2"},{"rational":"0"},{"rational":"0"}]}"#
        );
    }

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"symbols": [{"name": "beta", "approx": 0.25}],
            "n": 2, "matrix": [[1,0],[0,1]],
            "translation": [{"symbolic": [["alpha", "2/4"]], "approx": 0.4, "rational": "1/10"},
                            {"symbolic": [["beta", "1"]]}],
            "lie_algebra": [[0, 1, 1, "0"]]}"#;
        let d = SystemDescriptor::parse(text).unwrap();
        assert_eq!(d.map.context().approx("alpha"), Some((0.4 - 0.1) / 0.5));
        let s = d.to_canonical_string();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"beta\"").unwrap());
        let again = SystemDescriptor::parse(&s).unwrap();
        assert_eq!(again.to_canonical_string(), s);
    }

    #[test]
    fn schema_errors() {
        let bad = [
            r#"{"n": 2, "matrix": [[2,0],[0,1]]}"#,
            r#"{"n": 2, "matrix": [[1,0]]}"#,
            r#"{"n": 0, "matrix": []}"#,
            r#"{"n": 1, "matrix": [[1]], "extra": 1}"#,
            r#"{"n": 1, "matrix": [[1]], "translation": [{"rational": 0.5}]}"#,
            r#"{"n": 1, "matrix": [[1]], "translation": [{"rational": "1/2", "approx": 0.5}]}"#,
            r#"[1, 2]"#,
            r#"{"n": 1,"#,
        ];
        for b in bad {
            assert!(SystemDescriptor::parse(b).is_err(), "{b}");
        }
        let conflict = r#"{"n": 1, "matrix": [[1]], "symbols": [{"name": "a", "approx": 0.1}],
            "translation": [{"symbolic": [["a", "1"]], "approx": 0.2}]}"#;
        assert!(SystemDescriptor::parse(conflict).is_err());
    }

    #[test]
    fn lie_algebra_field() {
        let text = r#"{"n": 3, "matrix": [[2,1,0],[1,1,0],[0,0,1]], "lie_algebra": [[0,1,2,"1"]]}"#;
        let d = SystemDescriptor::parse(text).unwrap();
        assert_eq!(d.lie_algebra.unwrap(), RationalLieAlgebra::heisenberg());
    }
}
