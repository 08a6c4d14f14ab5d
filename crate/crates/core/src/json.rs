//! File formats.
//!
//! * polynomial: `{"dim", "trunc", "coeffs": [{"alpha", "re", "im"}]}`,
//!   `"im"` optional
//! * operator: `{"dim", "max_order", "terms": [{"alpha", "coeff"}]}`
//! * black-box table: `{"dim", "entries": [{"beta", "value"}]}`
//!
//! Numbers go through `f64`, so a rational polynomial is written rounded.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extraction::TableBlackBox;
use crate::multiindex::MultiIndex;
use crate::operator::{ApplyReport, OperatorSymbol, TailParams};
use crate::scalar::{complex_from_f64, complex_to_f64, Scalar};
use crate::series::TaylorPoly;

#[derive(Serialize, Deserialize)]
struct CoeffDto {
    alpha: MultiIndex,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyDto {
    dim: usize,
    trunc: usize,
    coeffs: Vec<CoeffDto>,
}

impl<S: Scalar> From<&TaylorPoly<S>> for PolyDto {
    fn from(f: &TaylorPoly<S>) -> Self {
        PolyDto {
            dim: f.dim(),
            trunc: f.trunc(),
            coeffs: f
                .coeffs()
                .iter()
                .map(|(alpha, c)| {
                    let c = complex_to_f64(c);
                    CoeffDto {
                        alpha: alpha.clone(),
                        re: c.re,
                        im: c.im,
                    }
                })
                .collect(),
        }
    }
}

impl PolyDto {
    fn into_poly<S: Scalar>(self) -> Result<TaylorPoly<S>> {
        TaylorPoly::from_terms(
            self.dim,
            self.trunc,
            self.coeffs
                .into_iter()
                .map(|c| (c.alpha, complex_from_f64(Complex::new(c.re, c.im)))),
        )
    }
}

impl<S: Scalar> Serialize for TaylorPoly<S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        PolyDto::from(self).serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for TaylorPoly<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PolyDto::deserialize(d)?
            .into_poly()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermDto<S: Scalar> {
    alpha: MultiIndex,
    #[serde(bound = "")]
    coeff: TaylorPoly<S>,
}

#[derive(Serialize, Deserialize)]
struct OperatorDto<S: Scalar> {
    dim: usize,
    max_order: usize,
    #[serde(bound = "")]
    terms: Vec<TermDto<S>>,
}

impl<S: Scalar> Serialize for OperatorSymbol<S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        OperatorDto {
            dim: self.dim(),
            max_order: self.max_order(),
            terms: self
                .terms()
                .map(|(a, c)| TermDto {
                    alpha: a.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for OperatorSymbol<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = OperatorDto::<S>::deserialize(d)?;
        let mut s = OperatorSymbol::new(dto.dim, dto.max_order);
        for t in dto.terms {
            s.insert(t.alpha, t.coeff).map_err(serde::de::Error::custom)?;
        }
        Ok(s)
    }
}

#[derive(Serialize, Deserialize)]
struct EntryDto<S: Scalar> {
    beta: MultiIndex,
    #[serde(bound = "")]
    value: TaylorPoly<S>,
}

#[derive(Serialize, Deserialize)]
struct TableDto<S: Scalar> {
    dim: usize,
    #[serde(bound = "")]
    entries: Vec<EntryDto<S>>,
}

impl<S: Scalar> Serialize for TableBlackBox<S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        TableDto {
            dim: crate::extraction::BlackBox::<S>::dim(self),
            entries: self
                .entries()
                .iter()
                .map(|(b, v)| EntryDto {
                    beta: b.clone(),
                    value: v.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for TableBlackBox<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = TableDto::<S>::deserialize(d)?;
        let mut t = TableBlackBox::new(dto.dim);
        for e in dto.entries {
            t.insert(e.beta, e.value).map_err(serde::de::Error::custom)?;
        }
        Ok(t)
    }
}

impl<S: Scalar> Serialize for ApplyReport<S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        #[derive(Serialize)]
        #[serde(bound = "")]
        struct Dto<'a, S: Scalar> {
            result: &'a TaylorPoly<S>,
            terms_used: usize,
            tail_bound: Option<f64>,
            tail_params: Option<&'a TailParams>,
        }
        Dto {
            result: &self.result,
            terms_used: self.terms_used,
            tail_bound: self.tail_bound,
            tail_params: self.tail_params.as_ref(),
        }
        .serialize(s)
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn poly_from_json<S: Scalar>(text: &str) -> Result<TaylorPoly<S>> {
    serde_json::from_str(text).map_err(parse_err)
}

pub fn operator_from_json<S: Scalar>(text: &str) -> Result<OperatorSymbol<S>> {
    serde_json::from_str(text).map_err(parse_err)
}

pub fn table_from_json<S: Scalar>(text: &str) -> Result<TableBlackBox<S>> {
    serde_json::from_str(text).map_err(parse_err)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(parse_err)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::translation_symbol;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn poly_roundtrip_and_order() {
        let f = TaylorPoly::from_terms(
            2,
            3,
            [
                (mi(&[0, 2]), Complex::new(1.5, 0.0)),
                (mi(&[2, 0]), Complex::new(-0.25, 1.0)),
                (mi(&[0, 0]), Complex::new(0.1, 0.0)),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"dim":2,"trunc":3,"coeffs":[{"alpha":[0,0],"re":0.1,"im":0.0},{"alpha":[2,0],"re":-0.25,"im":1.0},{"alpha":[0,2],"re":1.5,"im":0.0}]}"#
        );
        let back: TaylorPoly<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn floats_reparse_exactly() {
        let f = TaylorPoly::from_terms(1, 1, [(mi(&[1]), Complex::new(0.21017480113324893, -2.168404344971009e-19))]).unwrap();
        let back: TaylorPoly<f64> = poly_from_json(&to_json_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn missing_im_defaults() {
        let f: TaylorPoly<f64> = poly_from_json(r#"{"dim":1,"trunc":2,"coeffs":[{"alpha":[2],"re":3}]}"#).unwrap();
        assert_eq!(f.coeff(&mi(&[2])), Complex::new(3.0, 0.0));
    }

    #[test]
    fn missing_dim_named() {
        let e = poly_from_json::<f64>(r#"{"trunc":2,"coeffs":[]}"#).unwrap_err();
        assert!(e.to_string().contains("dim"), "{e}");
    }

    #[test]
    fn bad_polys_rejected() {
        assert!(poly_from_json::<f64>(r#"{"dim":1,"trunc":1,"coeffs":[{"alpha":[2],"re":1}]}"#).is_err());
        assert!(poly_from_json::<f64>(r#"{"dim":2,"trunc":3,"coeffs":[{"alpha":[2],"re":1}]}"#).is_err());
    }

    #[test]
    fn operator_roundtrip() {
        let t = translation_symbol(&[Complex::new(2.0, 0.0)], 4, 3);
        let s = to_json_string(&t).unwrap();
        let back: OperatorSymbol<f64> = operator_from_json(&s).unwrap();
        assert_eq!(back, t);
        assert!(operator_from_json::<f64>(r#"{"dim":1,"max_order":1,"terms":[{"alpha":[2],"coeff":{"dim":1,"trunc":0,"coeffs":[]}}]}"#).is_err());
    }

    #[test]
    fn table_roundtrip() {
        let t = translation_symbol(&[Complex::new(1.0, 0.0)], 3, 3);
        let table = TableBlackBox::from_black_box(&crate::extraction::SymbolBlackBox::new(&t), 3).unwrap();
        let s = to_json_string(&table).unwrap();
        let back: TableBlackBox<f64> = table_from_json(&s).unwrap();
        assert_eq!(back, table);
    }
}
