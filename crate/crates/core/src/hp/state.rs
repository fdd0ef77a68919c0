use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::AstError;

/// Valuation of program variables. Unbound lookups are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(BTreeMap<String, f64>);

impl State {
    pub fn new() -> Self {
        State(BTreeMap::new())
    }

    pub fn get(&self, name: &str) -> Result<f64, AstError> {
        self.0
            .get(name)
            .copied()
            .ok_or_else(|| AstError::UnboundVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn set(&mut self, name: &str, value: f64) {
        if let Some(slot) = self.0.get_mut(name) {
            *slot = value;
        } else {
            self.0.insert(name.to_string(), value);
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    /// Copies every binding of `other` into `self`, overwriting.
    pub fn extend_from(&mut self, other: &State) {
        for (k, v) in other.iter() {
            self.set(k, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bitwise equality on every binding (distinguishes `0.0` from `-0.0`).
    pub fn bit_eq(&self, other: &State) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(other.0.iter())
                .all(|((ka, va), (kb, vb))| ka == kb && va.to_bits() == vb.to_bits())
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for State {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        State(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbound_lookup_is_error() {
        let s = State::new().with("x", 1.0);
        assert_eq!(s.get("x"), Ok(1.0));
        assert_eq!(s.get("y"), Err(AstError::UnboundVariable("y".into())));
    }

    #[test]
    fn bit_eq_distinguishes_signed_zero() {
        let a = State::new().with("x", 0.0);
        let b = State::new().with("x", -0.0);
        assert_eq!(a, b);
        assert!(!a.bit_eq(&b));
    }
}
