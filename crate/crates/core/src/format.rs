//! Tensor file format.
//!
//! ```json
//! {"shape":[2,2,2],"entries":[{"idx":[1,1,1],"val":"2"},{"idx":[1,2,2],"val":"3/4"}]}
//! ```
//!
//! `val` is a decimal integer or `"p/q"` string (a bare JSON integer is also
//! accepted). Omitted indices are zero and a repeated `idx` is an error.
//! Writers emit nonzero entries only, in lexicographic index order, with
//! canonical rationals, so equal tensors serialize to identical bytes.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::qualitative::Sign;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::tensor::{Entry, FactorList, Shape, Tensor};

/// Entry types with a text form in tensor files.
pub trait TextEntry: Entry + Sized {
    fn to_text(&self) -> String;
    /// `Ok(None)` for an explicit zero.
    fn from_text(text: &str) -> Result<Option<Self>>;
}

impl TextEntry for Rational {
    fn to_text(&self) -> String {
        format_rational(self)
    }

    fn from_text(text: &str) -> Result<Option<Self>> {
        let q = parse_rational(text)?;
        Ok((!q.is_zero_entry()).then_some(q))
    }
}

impl TextEntry for Sign {
    fn to_text(&self) -> String {
        self.as_i8().to_string()
    }

    fn from_text(text: &str) -> Result<Option<Self>> {
        match text.trim() {
            "1" | "+1" => Ok(Some(Sign::Plus)),
            "-1" => Ok(Some(Sign::Minus)),
            "0" => Ok(None),
            other => Err(Error::Parse(format!("sign value must be -1, 0 or 1, got {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TensorRecord {
    shape: Vec<usize>,
    entries: Vec<EntryRecord>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    idx: Vec<usize>,
    val: ValueText,
}

#[derive(Serialize)]
#[serde(transparent)]
struct ValueText(String);

impl<'de> Deserialize<'de> for ValueText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => Ok(ValueText(s)),
            serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => Ok(ValueText(n.to_string())),
            other => Err(D::Error::custom(format!(
                "\"val\" must be an integer or a \"p/q\" string, got {other}"
            ))),
        }
    }
}

impl<T: TextEntry> Tensor<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let record: TensorRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let shape = Shape::new(record.shape)?;
        let mut parsed = Vec::with_capacity(record.entries.len());
        let mut zero_indices = Vec::new();
        for entry in record.entries {
            match T::from_text(&entry.val.0)? {
                Some(v) => parsed.push((entry.idx, v)),
                None => zero_indices.push(entry.idx),
            }
        }
        for idx in &zero_indices {
            if !shape.contains(idx) {
                return Err(Error::IndexOutOfBounds { index: idx.clone(), shape: shape.dims().to_vec() });
            }
        }
        let mut all: Vec<&Vec<usize>> = parsed.iter().map(|(i, _)| i).chain(&zero_indices).collect();
        all.sort();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0].clone()));
        }
        Tensor::from_entries(shape, parsed)
    }

    fn record(&self) -> TensorRecord {
        TensorRecord {
            shape: self.dims().to_vec(),
            entries: self
                .iter()
                .map(|(idx, v)| EntryRecord { idx: idx.clone(), val: ValueText(v.to_text()) })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("tensor records always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("tensor records always serialize")
    }
}

impl<T: TextEntry> Serialize for Tensor<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.record().serialize(s)
    }
}

/// Terms as nested lists of canonical rational strings, one list of `k`
/// vectors per rank-one term.
impl Serialize for FactorList {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<Vec<Vec<String>>> = self
            .terms()
            .iter()
            .map(|term| term.iter().map(|v| v.iter().map(format_rational).collect()).collect())
            .collect();
        text.serialize(s)
    }
}

/// Rows of canonical rational strings.
impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Serializes a rational as its canonical string.
pub fn serialize_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn serialize_rational_opt<S: Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&format_rational(q)),
        None => s.serialize_none(),
    }
}
