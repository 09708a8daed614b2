//! The affine group AGL_n(F) as (n+1)×(n+1) matrices `(1 v; 0 A)` acting on
//! row vectors, basis e₀, e₁, …, e_n.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::field::{Field, FieldValue};
use crate::linalg::Mat;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElem {
    mat: Mat,
}

impl fmt::Debug for AffineElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Affine({})", self.mat.encode())
    }
}

impl AffineElem {
    /// The block matrix `(1 v; 0 A)`.
    pub fn new(v: &[FieldValue], a: &Mat) -> Result<AffineElem> {
        let n = a.rows();
        if !a.is_square() || v.len() != n {
            return Err(Error::Dimension(format!(
                "vector of length {} with {}x{} linear part",
                v.len(),
                a.rows(),
                a.cols()
            )));
        }
        let field = a.field();
        if a.det()? == field.zero() {
            return Err(Error::Singular);
        }
        let mut m = Mat::zeros(field, n + 1, n + 1);
        m.set(0, 0, field.one());
        for (j, x) in v.iter().enumerate() {
            if !field.contains(x) {
                return Err(Error::FieldMismatch);
            }
            m.set(0, j + 1, x.clone());
        }
        m.set_block(1, 1, a);
        Ok(AffineElem { mat: m })
    }

    /// Validates that `mat` has first column (1, 0, …, 0)ᵀ and an invertible
    /// linear part.
    pub fn from_matrix(mat: Mat) -> Result<AffineElem> {
        if !mat.is_square() || mat.rows() < 2 {
            return Err(Error::NotAffine(format!(
                "{}x{} matrix",
                mat.rows(),
                mat.cols()
            )));
        }
        let field = mat.field().clone();
        if *mat.get(0, 0) != field.one() || (1..mat.rows()).any(|i| !field.is_zero(mat.get(i, 0)))
        {
            return Err(Error::NotAffine("first column is not (1,0,...,0)".into()));
        }
        let n = mat.rows() - 1;
        if mat.submatrix(1, 1, n, n).det()? == field.zero() {
            return Err(Error::NotAffine("linear part is singular".into()));
        }
        Ok(AffineElem { mat })
    }

    /// For matrices already known to be affine (closed products etc.).
    pub(crate) fn from_matrix_unchecked(mat: Mat) -> AffineElem {
        debug_assert!(mat.is_square() && *mat.get(0, 0) == mat.field().one());
        AffineElem { mat }
    }

    pub fn identity(field: &Field, n: usize) -> AffineElem {
        AffineElem {
            mat: Mat::identity(field, n + 1),
        }
    }

    pub fn translation(field: &Field, v: &[FieldValue]) -> AffineElem {
        AffineElem::new(v, &Mat::identity(field, v.len())).expect("identity is invertible")
    }

    /// Affine element permuting the basis vectors e₁…e_n: e_i ↦ e_{perm[i-1]}
    /// (1-based, e₀ fixed).
    pub fn permutation(field: &Field, perm: &[usize]) -> Result<AffineElem> {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut a = Mat::zeros(field, n, n);
        for (i, &j) in perm.iter().enumerate() {
            if j == 0 || j > n || seen[j - 1] {
                return Err(Error::Dimension(format!("{perm:?} is not a permutation")));
            }
            seen[j - 1] = true;
            a.set(i, j - 1, field.one());
        }
        AffineElem::new(&vec![field.zero(); n], &a)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows() - 1
    }

    pub fn field(&self) -> &Field {
        self.mat.field()
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn into_matrix(self) -> Mat {
        self.mat
    }

    /// `(1, v)`.
    pub fn first_row(&self) -> &[FieldValue] {
        self.mat.row(0)
    }

    /// `v`, the image of the affine origin.
    pub fn vector_part(&self) -> &[FieldValue] {
        &self.mat.row(0)[1..]
    }

    /// π: the linear part `A`.
    pub fn linear_part(&self) -> Mat {
        let n = self.dim();
        self.mat.submatrix(1, 1, n, n)
    }

    pub fn is_translation(&self) -> bool {
        let n = self.dim();
        let f = self.field();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let x = self.mat.get(i + 1, j + 1);
                if i == j {
                    *x == f.one()
                } else {
                    f.is_zero(x)
                }
            })
        })
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    /// `(g − I)^(n+1) = 0`.
    pub fn is_unipotent(&self) -> bool {
        let n = self.dim();
        let nil = &self.mat - &Mat::identity(self.field(), n + 1);
        nil.pow((n + 1) as i64).expect("square").is_zero()
    }

    pub fn checked_mul(&self, other: &AffineElem) -> Result<AffineElem> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "AGL_{} times AGL_{}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(AffineElem {
            mat: self.mat.checked_mul(&other.mat)?,
        })
    }

    pub fn inverse(&self) -> AffineElem {
        AffineElem {
            mat: self.mat.inverse().expect("affine elements are invertible"),
        }
    }

    pub fn pow(&self, e: i64) -> AffineElem {
        AffineElem {
            mat: self.mat.pow(e).expect("square"),
        }
    }

    /// `h⁻¹ g h`.
    pub fn conjugate(&self, h: &AffineElem) -> Result<AffineElem> {
        h.inverse().checked_mul(self)?.checked_mul(h)
    }

    /// Block combination: vector parts concatenated, linear parts
    /// block-diagonal.
    pub fn direct_sum(&self, other: &AffineElem) -> Result<AffineElem> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        let (n1, n2) = (self.dim(), other.dim());
        let field = self.field();
        let mut v = self.vector_part().to_vec();
        v.extend_from_slice(other.vector_part());
        let mut a = Mat::zeros(field, n1 + n2, n1 + n2);
        a.set_block(0, 0, &self.linear_part());
        a.set_block(n1, n1, &other.linear_part());
        AffineElem::new(&v, &a)
    }
}

impl Mul for &AffineElem {
    type Output = AffineElem;

    fn mul(self, rhs: &AffineElem) -> AffineElem {
        self.checked_mul(rhs)
            .unwrap_or_else(|e| panic!("affine product: {e}"))
    }
}

/// π as a free function.
pub fn project_pi(g: &AffineElem) -> Mat {
    g.linear_part()
}

/// Breadth-first closure of `gens` under multiplication, identity first.
/// Gives up with [`Error::Unsupported`] once more than `limit` elements
/// have been produced.
pub fn closure(field: &Field, n: usize, gens: &[AffineElem], limit: usize) -> Result<Vec<AffineElem>> {
    let id = AffineElem::identity(field, n);
    let mut seen: HashSet<AffineElem> = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let p = elems[i].checked_mul(g)?;
            if !seen.contains(&p) {
                if elems.len() >= limit {
                    return Err(Error::Unsupported(format!(
                        "closure exceeds {limit} elements"
                    )));
                }
                seen.insert(p.clone());
                elems.push(p);
            }
        }
        i += 1;
    }
    Ok(elems)
}

/// All pairwise block combinations of two element sets.
pub fn direct_product(s1: &[AffineElem], s2: &[AffineElem]) -> Result<Vec<AffineElem>> {
    let mut out = Vec::with_capacity(s1.len() * s2.len());
    for a in s1 {
        for b in s2 {
            out.push(a.direct_sum(b)?);
        }
    }
    Ok(out)
}

/// The elements of `set` lying in Tr.
pub fn translations(set: &[AffineElem]) -> Vec<AffineElem> {
    set.iter().filter(|g| g.is_translation()).cloned().collect()
}

/// Index from first row to element; `None` if two elements share a first
/// row.
pub fn first_row_index(set: &[AffineElem]) -> Option<HashMap<Vec<FieldValue>, usize>> {
    let mut idx = HashMap::with_capacity(set.len());
    for (i, g) in set.iter().enumerate() {
        if idx.insert(g.vector_part().to_vec(), i).is_some() {
            return None;
        }
    }
    Some(idx)
}
