//! Serde helpers: syntax objects serialize as their text form.

use std::fmt::Display;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serializer;

use crate::subsumption::Substitution;

pub(crate) fn display<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

pub(crate) fn display_seq<T: Display, S: Serializer>(items: &[T], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(items.len()))?;
    for item in items {
        seq.serialize_element(&item.to_string())?;
    }
    seq.end()
}

pub(crate) fn display_layers<T: Display, S: Serializer>(
    layers: &[Vec<T>],
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(layers.len()))?;
    for layer in layers {
        let texts: Vec<String> = layer.iter().map(ToString::to_string).collect();
        seq.serialize_element(&texts)?;
    }
    seq.end()
}

pub(crate) fn substitution<S: Serializer>(theta: &Substitution, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(theta.len()))?;
    for (v, t) in theta.iter() {
        map.serialize_entry(v, &t.to_string())?;
    }
    map.end()
}
