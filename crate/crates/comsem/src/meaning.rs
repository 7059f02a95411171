//! Semantic values and meaning assignments.
//!
//! A [`MeaningValue`] is an arbitrary semantic object: an exact integer or
//! rational, a boolean, a symbolic constructor application, or a tuple.
//! Equality is structural. A [`MeaningAssignment`] maps terms to values with
//! no constraint relating the value of a composition to the values of its
//! parts.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational};
use serde::de::Error as _;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeaningValue {
    Int(BigInt),
    Rat(BigRational),
    Bool(bool),
    Sym { name: String, args: Vec<MeaningValue> },
    Tuple(Vec<MeaningValue>),
}

impl MeaningValue {
    pub fn int(v: impl Into<BigInt>) -> Self {
        MeaningValue::Int(v.into())
    }

    pub fn rat(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        MeaningValue::Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn sym(name: &str, args: impl IntoIterator<Item = MeaningValue>) -> Self {
        MeaningValue::Sym {
            name: name.to_string(),
            args: args.into_iter().collect(),
        }
    }

    pub fn tuple(items: impl IntoIterator<Item = MeaningValue>) -> Self {
        MeaningValue::Tuple(items.into_iter().collect())
    }

    /// Numeric view: integers widen to rationals, everything else is `None`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            MeaningValue::Int(i) => Some(BigRational::from_integer(i.clone())),
            MeaningValue::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            MeaningValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for MeaningValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeaningValue::Int(i) => write!(f, "{i}"),
            MeaningValue::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            MeaningValue::Bool(b) => write!(f, "{b}"),
            MeaningValue::Sym { name, args } => {
                if args.is_empty() {
                    write!(f, "{name}")
                } else {
                    write!(f, "{name}(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")
                }
            }
            MeaningValue::Tuple(items) => {
                write!(f, "<")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ">")
            }
        }
    }
}

// Canonical encoding: one-key maps tagging the variant, big integers as
// decimal strings, rationals as [numerator, denominator] string pairs.
impl Serialize for MeaningValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            MeaningValue::Int(i) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("int", &i.to_string())?;
                m.end()
            }
            MeaningValue::Rat(r) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("rat", &[r.numer().to_string(), r.denom().to_string()])?;
                m.end()
            }
            MeaningValue::Bool(b) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("bool", b)?;
                m.end()
            }
            MeaningValue::Sym { name, args } => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("sym", &SymRepr { name, args })?;
                m.end()
            }
            MeaningValue::Tuple(items) => {
                let mut m = serializer.serialize_map(Some(1))?;
                let mut seq_friendly = Vec::with_capacity(items.len());
                seq_friendly.extend(items.iter());
                m.serialize_entry("tuple", &SeqRepr(&seq_friendly))?;
                m.end()
            }
        }
    }
}

#[derive(Serialize)]
struct SymRepr<'a> {
    name: &'a str,
    args: &'a [MeaningValue],
}

struct SeqRepr<'a>(&'a [&'a MeaningValue]);

impl Serialize for SeqRepr<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for item in self.0 {
            seq.serialize_element(item)?;
        }
        seq.end()
    }
}

// Deserialization accepts the canonical form plus convenient shorthands:
// bare JSON integers and booleans, and `{"sym": "name"}` for constants.
impl<'de> Deserialize<'de> for MeaningValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        from_json(&value).map_err(D::Error::custom)
    }
}

pub(crate) fn from_json(value: &serde_json::Value) -> Result<MeaningValue, String> {
    use serde_json::Value;
    match value {
        Value::Bool(b) => Ok(MeaningValue::Bool(*b)),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(MeaningValue::int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(MeaningValue::int(u))
            } else {
                Err(format!("non-integer number {n}; use {{\"rat\": [num, den]}}"))
            }
        }
        Value::Object(map) if map.len() == 1 => {
            let (key, inner) = map.iter().next().expect("len checked");
            match key.as_str() {
                "int" => parse_bigint(inner).map(MeaningValue::Int),
                "rat" => match inner.as_array() {
                    Some(pair) if pair.len() == 2 => {
                        let num = parse_bigint(&pair[0])?;
                        let den = parse_bigint(&pair[1])?;
                        if den == BigInt::from(0) {
                            return Err("rational with zero denominator".into());
                        }
                        Ok(MeaningValue::Rat(BigRational::new(num, den)))
                    }
                    _ => Err("\"rat\" expects a [numerator, denominator] pair".into()),
                },
                "bool" => inner
                    .as_bool()
                    .map(MeaningValue::Bool)
                    .ok_or_else(|| "\"bool\" expects true or false".into()),
                "sym" => match inner {
                    Value::String(name) => Ok(MeaningValue::sym(name, [])),
                    Value::Object(o) => {
                        let name = o
                            .get("name")
                            .and_then(|v| v.as_str())
                            .ok_or("\"sym\" object needs a \"name\" string")?;
                        let args = match o.get("args") {
                            None => Vec::new(),
                            Some(Value::Array(items)) => items
                                .iter()
                                .map(from_json)
                                .collect::<Result<Vec<_>, _>>()?,
                            Some(_) => return Err("\"args\" must be an array".into()),
                        };
                        Ok(MeaningValue::Sym {
                            name: name.to_string(),
                            args,
                        })
                    }
                    _ => Err("\"sym\" expects a name or {name, args}".into()),
                },
                "tuple" => match inner.as_array() {
                    Some(items) => Ok(MeaningValue::Tuple(
                        items.iter().map(from_json).collect::<Result<Vec<_>, _>>()?,
                    )),
                    None => Err("\"tuple\" expects an array".into()),
                },
                other => Err(format!("unknown meaning tag {other:?}")),
            }
        }
        other => Err(format!("cannot read a meaning value from {other}")),
    }
}

/// Field-level serde for `Vec<BigRational>`: each rational becomes a
/// `[numerator, denominator]` pair of decimal strings, the crate-wide exact
/// encoding. Use as `#[serde(with = "crate::meaning::rational_pairs")]`.
pub mod rational_pairs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[String; 2]> = v
            .iter()
            .map(|r| [r.numer().to_string(), r.denom().to_string()])
            .collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let pairs: Vec<[String; 2]> = Vec::deserialize(d)?;
        pairs
            .into_iter()
            .map(|[n, den]| {
                let n: BigInt = n.parse().map_err(D::Error::custom)?;
                let den: BigInt = den.parse().map_err(D::Error::custom)?;
                if den == BigInt::from(0) {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(n, den))
            })
            .collect()
    }
}

fn parse_bigint(value: &serde_json::Value) -> Result<BigInt, String> {
    use serde_json::Value;
    match value {
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| format!("bad integer {s:?}: {e}")),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(format!("non-integer number {n}"))
            }
        }
        other => Err(format!("expected an integer, found {other}")),
    }
}

/// A total meaning assignment on a fragment's terms. Iteration order is the
/// term order, so serialization is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MeaningAssignment {
    map: BTreeMap<Term, MeaningValue>,
}

impl MeaningAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, term: Term, value: MeaningValue) {
        self.map.insert(term, value);
    }

    pub fn with(mut self, term: Term, value: MeaningValue) -> Self {
        self.assign(term, value);
        self
    }

    pub fn get(&self, term: &Term) -> Option<&MeaningValue> {
        self.map.get(term)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &MeaningValue)> {
        self.map.iter()
    }

    /// The values in key order, for shuffling experiments.
    pub fn values(&self) -> Vec<MeaningValue> {
        self.map.values().cloned().collect()
    }

    /// Rebuild with the same keys and the given values (in key order).
    pub fn with_values(&self, values: Vec<MeaningValue>) -> Self {
        assert_eq!(values.len(), self.map.len());
        MeaningAssignment {
            map: self.map.keys().cloned().zip(values).collect(),
        }
    }
}

impl FromIterator<(Term, MeaningValue)> for MeaningAssignment {
    fn from_iter<I: IntoIterator<Item = (Term, MeaningValue)>>(iter: I) -> Self {
        MeaningAssignment {
            map: iter.into_iter().collect(),
        }
    }
}

/// Meanings computable on demand, the interface effective table enumeration
/// works against. A finite [`MeaningAssignment`] is one such source; numeral
/// semantics over an unbounded stream is another.
pub trait MeaningSource {
    fn meaning_of(&self, term: &Term) -> Option<MeaningValue>;
}

impl MeaningSource for MeaningAssignment {
    fn meaning_of(&self, term: &Term) -> Option<MeaningValue> {
        self.get(term).cloned()
    }
}

impl<F> MeaningSource for F
where
    F: Fn(&Term) -> Option<MeaningValue>,
{
    fn meaning_of(&self, term: &Term) -> Option<MeaningValue> {
        self(term)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let v = MeaningValue::sym(
            "open",
            [MeaningValue::sym("m", [MeaningValue::sym("seas", [])])],
        );
        assert_eq!(v.to_string(), "open(m(seas))");
        assert_eq!(MeaningValue::rat(1, 2).to_string(), "1/2");
        assert_eq!(
            MeaningValue::tuple([MeaningValue::Bool(true), MeaningValue::int(3)]).to_string(),
            "<true, 3>"
        );
    }

    #[test]
    fn canonical_json_round_trip() {
        let v = MeaningValue::tuple([
            MeaningValue::int(-7),
            MeaningValue::rat(22, 7),
            MeaningValue::Bool(false),
            MeaningValue::sym("f", [MeaningValue::int(1)]),
        ]);
        let s = serde_json::to_string(&v).unwrap();
        let back: MeaningValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn shorthand_forms_accepted() {
        let v: MeaningValue = serde_json::from_str("7").unwrap();
        assert_eq!(v, MeaningValue::int(7));
        let v: MeaningValue = serde_json::from_str("true").unwrap();
        assert_eq!(v, MeaningValue::Bool(true));
        let v: MeaningValue = serde_json::from_str(r#"{"sym":"wall"}"#).unwrap();
        assert_eq!(v, MeaningValue::sym("wall", []));
        let v: MeaningValue = serde_json::from_str(r#"{"int":"123456789012345678901234567890"}"#)
            .unwrap();
        assert_eq!(
            v,
            MeaningValue::Int("123456789012345678901234567890".parse().unwrap())
        );
    }

    #[test]
    fn structural_equality_distinguishes_kinds() {
        assert_ne!(MeaningValue::int(2), MeaningValue::rat(2, 1));
        assert_eq!(
            MeaningValue::int(2).as_rational(),
            MeaningValue::rat(2, 1).as_rational()
        );
    }
}
