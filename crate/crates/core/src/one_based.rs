//! Serializers that write 0-based user, ORE, antenna and codeword indices
//! as 1-based numbers, the convention of every file this crate emits.

use serde::ser::{SerializeSeq, Serializer};

pub(crate) fn indices<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for i in v {
        seq.serialize_element(&(i + 1))?;
    }
    seq.end()
}

pub(crate) fn nested<S: Serializer>(v: &[Vec<usize>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for inner in v {
        let shifted: Vec<usize> = inner.iter().map(|i| i + 1).collect();
        seq.serialize_element(&shifted)?;
    }
    seq.end()
}

pub(crate) fn pairs<S: Serializer>(v: &[(usize, usize)], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (a, b) in v {
        seq.serialize_element(&(a + 1, b + 1))?;
    }
    seq.end()
}
