//! Text format for groups:
//!
//! ```text
//! REGAFF v1
//! FIELD 2 1 0,1
//! DIM 3
//! SPLIT 2 1            (optional description of R)
//! D 1
//! QF 2 0,1;0,0
//! HOM example2_n3q2 3
//! GEN <matrix>         (generators)
//! <matrix>             (elements, when listed)
//! ```
//!
//! Matrices use the linalg encoding; `#` starts a comment line.

use crate::affine::{closure, AffineElem};
use crate::construct::RegularSubgroupDesc;
use crate::error::{Error, Result};
use crate::field::{Field, FieldValue};
use crate::linalg::Mat;
use crate::quadform::{builtin, decode_vector, encode_vector, with_kernel, HomKind, QuadraticForm, SubspaceBasis};

/// Elements are written out only up to this group order.
pub const LIST_LIMIT: u64 = 4096;

#[derive(Clone, Debug)]
pub struct GroupFile {
    pub field: Field,
    pub n: usize,
    pub desc: Option<RegularSubgroupDesc>,
    pub gens: Vec<AffineElem>,
    pub elements: Vec<AffineElem>,
}

impl GroupFile {
    /// Generators always; elements when `q^n ≤ LIST_LIMIT`.
    pub fn from_desc(desc: &RegularSubgroupDesc) -> Result<GroupFile> {
        let elements = match desc.order() {
            Some(o) if o <= LIST_LIMIT => desc.elements()?.collect(),
            _ => Vec::new(),
        };
        Ok(GroupFile {
            field: desc.field().clone(),
            n: desc.dim(),
            desc: Some(desc.clone()),
            gens: desc.generators(),
            elements,
        })
    }

    /// A group given by generators; the closure is listed when small.
    pub fn from_generators(field: &Field, n: usize, gens: Vec<AffineElem>) -> Result<GroupFile> {
        let elements = closure(field, n, &gens, LIST_LIMIT as usize)?;
        Ok(GroupFile {
            field: field.clone(),
            n,
            desc: None,
            gens,
            elements,
        })
    }

    pub fn encode(&self) -> String {
        let mut out = vec!["REGAFF v1".to_string()];
        if let Some(desc) = &self.desc {
            out.extend(desc_comments(desc));
        }
        out.push(self.field.header());
        out.push(format!("DIM {}", self.n));
        if let Some(desc) = &self.desc {
            let (m, k) = desc.split();
            out.push(format!("SPLIT {m} {k}"));
            out.push(format!("D {}", encode_vector(&self.field, desc.d())));
            out.push(desc.form().encode());
            if let Some(line) = desc.hom().encode(self.n, desc.w()) {
                out.push(line);
            }
        }
        for g in &self.gens {
            out.push(format!("GEN {}", g.matrix().encode()));
        }
        for g in &self.elements {
            out.push(g.matrix().encode());
        }
        let mut s = out.join("\n");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<GroupFile> {
        let mut field: Option<Field> = None;
        let mut n: Option<usize> = None;
        let mut split: Option<(usize, usize)> = None;
        let mut d: Option<Vec<FieldValue>> = None;
        let mut form: Option<QuadraticForm> = None;
        let mut hom: Option<(HomKind, usize, Vec<Vec<FieldValue>>, usize)> = None;
        let mut gens = Vec::new();
        let mut elements = Vec::new();
        let mut saw_version = false;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::parse(lineno, msg);
            if !saw_version {
                if line != "REGAFF v1" {
                    return Err(err(format!("expected `REGAFF v1`, found `{line}`")));
                }
                saw_version = true;
                continue;
            }
            let (tag, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            if tag == "FIELD" {
                field = Some(Field::parse_header(line).map_err(|e| err(e.to_string()))?);
                continue;
            }
            let f = field
                .clone()
                .ok_or_else(|| err("FIELD must come before the group data".into()))?;
            let number = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad number `{s}`")));
            match tag {
                "DIM" => n = Some(number(rest)?),
                "SPLIT" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(err("expected `SPLIT m k`".into()));
                    }
                    split = Some((number(parts[0])?, number(parts[1])?));
                }
                "D" => d = Some(decode_vector(&f, rest).map_err(|e| err(e.to_string()))?),
                "QF" => form = Some(QuadraticForm::decode(&f, line).map_err(|e| err(e.to_string()))?),
                "HOM" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() < 2 {
                        return Err(err("expected `HOM kind n [W vectors]`".into()));
                    }
                    let kind: HomKind = parts[0].parse().map_err(|e: Error| err(e.to_string()))?;
                    let hn = number(parts[1])?;
                    let w = parts[2..]
                        .iter()
                        .map(|v| decode_vector(&f, v))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| err(e.to_string()))?;
                    hom = Some((kind, hn, w, lineno));
                }
                "GEN" => gens.push(parse_elem(&f, n, rest).map_err(|e| err(e.to_string()))?),
                _ => elements.push(parse_elem(&f, n, line).map_err(|e| err(e.to_string()))?),
            }
        }
        if !saw_version {
            return Err(Error::parse(0, "empty file"));
        }
        let field = field.ok_or_else(|| Error::parse(0, "missing FIELD line"))?;
        let n = n.ok_or_else(|| Error::parse(0, "missing DIM line"))?;
        let desc = match (split, d, form, hom) {
            (None, None, None, None) => None,
            (Some(split), Some(d), Some(form), Some((kind, hn, w, lineno))) => {
                let err = |msg: String| Error::parse(lineno, msg);
                if hn != n || split.0 + split.1 != n {
                    return Err(err(format!("description is for n = {hn}, file has DIM {n}")));
                }
                let b = builtin(kind, &field, n).map_err(|e| err(e.to_string()))?;
                if (b.m, b.k) != split {
                    return Err(err(format!(
                        "{kind} splits {n} as ({}, {}), not {split:?}",
                        b.m, b.k
                    )));
                }
                let w = SubspaceBasis::new(&field, b.k, w).map_err(|e| err(e.to_string()))?;
                let phi = with_kernel(&b.hom, &w).map_err(|e| err(e.to_string()))?;
                Some(RegularSubgroupDesc::new(d, form, phi, w).map_err(|e| err(e.to_string()))?)
            }
            _ => {
                return Err(Error::parse(
                    0,
                    "a description needs all of SPLIT, D, QF and HOM",
                ))
            }
        };
        Ok(GroupFile {
            field,
            n,
            desc,
            gens,
            elements,
        })
    }
}

fn parse_elem(field: &Field, n: Option<usize>, s: &str) -> Result<AffineElem> {
    let n = n.ok_or_else(|| Error::NotAffine("DIM must come before matrices".into()))?;
    let m = Mat::decode(field, s)?;
    if m.rows() != n + 1 {
        return Err(Error::Dimension(format!(
            "{}x{} matrix in a file with DIM {n}",
            m.rows(),
            m.cols()
        )));
    }
    AffineElem::from_matrix(m)
}

/// `x^2 + x + 1` style rendering of a modulus, highest degree first.
pub fn modulus_poly(field: &Field) -> String {
    let Some(gf) = field.galois_field() else {
        return "none (rationals)".into();
    };
    let terms: Vec<String> = gf
        .modulus()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(e, &c)| {
            let coef = if c == 1 && e > 0 { String::new() } else { c.to_string() };
            match e {
                0 => c.to_string(),
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{e}"),
            }
        })
        .collect();
    terms.join(" + ")
}

fn desc_comments(desc: &RegularSubgroupDesc) -> Vec<String> {
    let f = desc.field();
    let (m, k) = desc.split();
    let w = if desc.w().is_empty() {
        "{0}".to_string()
    } else {
        desc.w()
            .vectors()
            .iter()
            .map(|v| format!("({})", encode_vector(f, v)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let kind = desc.hom().kind().map_or("custom".to_string(), |k| k.to_string());
    vec![
        format!("# (m, k) = ({m}, {k})"),
        format!("# d = ({})", encode_vector(f, desc.d())),
        format!("# Q upper-triangular coefficients = {}", desc.form().coefficients().encode()),
        format!("# hom kind = {kind}"),
        format!("# W basis = {w}"),
        format!("# modulus = {}", modulus_poly(f)),
    ]
}
