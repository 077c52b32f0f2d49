//! Serde adapters for the JSON wire formats: rationals are strings `"p/q"`,
//! complex values are `{"re": "p/q", "im": "p/q"}`.

use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{parse_rational, Cq};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Real(String),
    Complex { re: String, im: String },
}

fn to_repr(q: &Cq) -> ScalarRepr {
    if q.is_real() {
        ScalarRepr::Real(q.re.to_string())
    } else {
        ScalarRepr::Complex {
            re: q.re.to_string(),
            im: q.im.to_string(),
        }
    }
}

fn from_repr(r: ScalarRepr) -> crate::Result<Cq> {
    match r {
        ScalarRepr::Real(s) => Ok(Cq::real(parse_rational(&s)?)),
        ScalarRepr::Complex { re, im } => Ok(Cq::new(parse_rational(&re)?, parse_rational(&im)?)),
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

pub mod scalar_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Cq], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(to_repr))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Cq>, D::Error> {
        let reprs = Vec::<ScalarRepr>::deserialize(d)?;
        reprs
            .into_iter()
            .map(|r| from_repr(r).map_err(D::Error::custom))
            .collect()
    }
}
