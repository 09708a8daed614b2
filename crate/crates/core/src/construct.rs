//! The semidirect-product construction `R = M⋉N` inside AGL_{m+k}(F) and the
//! regular subgroups `R_W` with prescribed translation part.

use rand::Rng;

use crate::affine::{closure, AffineElem};
use crate::error::{Error, Result};
use crate::field::{Field, FieldValue};
use crate::linalg::Mat;
use crate::quadform::{builtin, with_kernel, AdditiveHom, HomKind, QuadraticForm, SubspaceBasis};

/// Everything needed to write down `r(v, a)` for `v ∈ F^m`, `a ∈ F^k`.
#[derive(Clone, Debug)]
pub struct RegularSubgroupDesc {
    field: Field,
    n: usize,
    m: usize,
    k: usize,
    d: Vec<FieldValue>,
    form: QuadraticForm,
    gram: Mat,
    hom: AdditiveHom,
    w: SubspaceBasis,
}

impl RegularSubgroupDesc {
    /// Checks the cheap invariants: sizes, `d ≠ 0`, `Q` non-degenerate and
    /// `φ(0) = I`. Additivity of `φ` is left to the verifier.
    pub fn new(
        d: Vec<FieldValue>,
        form: QuadraticForm,
        hom: AdditiveHom,
        w: SubspaceBasis,
    ) -> Result<RegularSubgroupDesc> {
        let field = form.field().clone();
        let m = form.dim();
        let k = d.len();
        if hom.field() != &field || w.field() != &field {
            return Err(Error::FieldMismatch);
        }
        if hom.size() != m || hom.domain_dim() != k || w.ambient_dim() != k {
            return Err(Error::Dimension(format!(
                "form on F^{m}, d in F^{k}, hom F^{} -> GL_{}, W in F^{}",
                hom.domain_dim(),
                hom.size(),
                w.ambient_dim()
            )));
        }
        if k == 0 || d.iter().all(|x| field.is_zero(x)) {
            return Err(Error::Inadmissible("d must be a nonzero vector".into()));
        }
        if d.iter().any(|x| !field.contains(x)) {
            return Err(Error::FieldMismatch);
        }
        if !form.is_nondegenerate() {
            return Err(Error::Inadmissible("quadratic form is degenerate".into()));
        }
        if !hom.eval(&vec![field.zero(); k])?.is_identity() {
            return Err(Error::Inadmissible("phi(0) is not the identity".into()));
        }
        let gram = form.polar_gram();
        Ok(RegularSubgroupDesc {
            n: m + k,
            field,
            m,
            k,
            d,
            form,
            gram,
            hom,
            w,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn split(&self) -> (usize, usize) {
        (self.m, self.k)
    }

    pub fn d(&self) -> &[FieldValue] {
        &self.d
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn hom(&self) -> &AdditiveHom {
        &self.hom
    }

    pub fn w(&self) -> &SubspaceBasis {
        &self.w
    }

    /// `q^n`, if the field is finite and the number fits.
    pub fn order(&self) -> Option<u64> {
        self.field.order()?.checked_pow(self.n as u32)
    }

    fn check_len(&self, what: &str, x: &[FieldValue], want: usize) -> Result<()> {
        if x.len() != want {
            return Err(Error::Dimension(format!(
                "{what} has length {}, expected {want}",
                x.len()
            )));
        }
        if x.iter().any(|c| !self.field.contains(c)) {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// `Jvᵀ ⊗ d`, an m×k block.
    fn column_block(&self, v: &[FieldValue]) -> Mat {
        let jv = self.gram.left_mul_vec(v).expect("length checked");
        Mat::outer(
            &Mat::col_vector(&self.field, &jv),
            &Mat::row_vector(&self.field, &self.d),
        )
        .expect("shapes agree")
    }

    fn assemble(&self, v: &[FieldValue], a: &[FieldValue], lin: &Mat, block: &Mat) -> AffineElem {
        let f = &self.field;
        let mut mat = Mat::identity(f, self.n + 1);
        for (j, x) in v.iter().chain(a).enumerate() {
            mat.set(0, j + 1, x.clone());
        }
        mat.set_block(1, 1, lin);
        mat.set_block(1, 1 + self.m, block);
        AffineElem::from_matrix_unchecked(mat)
    }

    /// `(1, v, Q(v)d; 0, I_m, Jvᵀ⊗d; 0, 0, I_k)`.
    pub fn n_element(&self, v: &[FieldValue]) -> Result<AffineElem> {
        self.check_len("v", v, self.m)?;
        let qv = self.form.eval(v)?;
        let top: Vec<FieldValue> = self.d.iter().map(|x| self.field.mul(&qv, x)).collect();
        Ok(self.assemble(
            v,
            &top,
            &Mat::identity(&self.field, self.m),
            &self.column_block(v),
        ))
    }

    /// `(1, 0, a; 0, φ(a), 0; 0, 0, I_k)`.
    pub fn m_element(&self, a: &[FieldValue]) -> Result<AffineElem> {
        self.check_len("a", a, self.k)?;
        let zero_v = vec![self.field.zero(); self.m];
        Ok(self.assemble(
            &zero_v,
            a,
            &self.hom.eval(a)?,
            &Mat::zeros(&self.field, self.m, self.k),
        ))
    }

    /// The element of R with first row `(1, v, a)`:
    /// `(1, v, a; 0, φ(a−Q(v)d), φ(a−Q(v)d)·(Jvᵀ⊗d); 0, 0, I_k)`.
    pub fn r_element(&self, v: &[FieldValue], a: &[FieldValue]) -> Result<AffineElem> {
        self.check_len("v", v, self.m)?;
        self.check_len("a", a, self.k)?;
        let f = &self.field;
        let qv = self.form.eval(v)?;
        let shifted: Vec<FieldValue> = a
            .iter()
            .zip(&self.d)
            .map(|(x, y)| f.sub(x, &f.mul(&qv, y)))
            .collect();
        let phi = self.hom.eval(&shifted)?;
        let block = &phi * &self.column_block(v);
        Ok(self.assemble(v, a, &phi, &block))
    }

    /// `r` at the point `x = (v, a) ∈ F^n`.
    pub fn element_at_point(&self, x: &[FieldValue]) -> Result<AffineElem> {
        self.check_len("point", x, self.n)?;
        self.r_element(&x[..self.m], &x[self.m..])
    }

    /// The element whose first row is the `idx`-th vector of F^n in
    /// lexicographic order.
    pub fn element_at(&self, idx: u64) -> Result<AffineElem> {
        if !self.field.is_finite() {
            return Err(Error::RationalUnsupported("indexing elements"));
        }
        self.element_at_point(&self.field.vector_at(idx, self.n))
    }

    /// All `q^n` elements, in the order of their first rows.
    pub fn elements(&self) -> Result<impl Iterator<Item = AffineElem> + '_> {
        let points = self.field.vectors(self.n)?;
        Ok(points.map(move |x| self.element_at_point(&x).expect("valid point")))
    }

    /// An element with a random first row.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AffineElem {
        let x: Vec<FieldValue> = (0..self.n).map(|_| self.field.random(rng)).collect();
        self.element_at_point(&x).expect("valid point")
    }

    /// Generators of `R = M·N`: `n(b·e_i)` and `m(b·e_j)` with `b` running
    /// over an F₀-basis of F (over ℚ, just `b = 1`).
    pub fn generators(&self) -> Vec<AffineElem> {
        let f = &self.field;
        let scalars: Vec<FieldValue> = match f.degree() {
            Some(ell) => (0..ell as usize)
                .map(|i| {
                    let mut c = vec![0; ell as usize];
                    c[i] = 1;
                    f.from_prime_coords(&c).expect("unit coordinates")
                })
                .collect(),
            None => vec![f.one()],
        };
        let unit = |len: usize, i: usize, b: &FieldValue| {
            let mut v = vec![f.zero(); len];
            v[i] = b.clone();
            v
        };
        let mut gens = Vec::new();
        for i in 0..self.m {
            for b in &scalars {
                gens.push(self.n_element(&unit(self.m, i, b)).expect("valid"));
            }
        }
        for j in 0..self.k {
            for b in &scalars {
                gens.push(self.m_element(&unit(self.k, j, b)).expect("valid"));
            }
        }
        gens
    }
}

/// The family chosen for AGL_n(F) and its split `(m, k)`.
pub fn family_for(field: &Field, n: usize) -> Result<(HomKind, usize, usize)> {
    let kind = HomKind::auto(field, n)?;
    let (m, k) = kind.split(n);
    Ok((kind, m, k))
}

/// `R_W` inside AGL_n(F) with `R_W ∩ Tr ≅ (W, +)`.
///
/// `w` may live in F^k or, when k = 2, in F = F^1, in which case it is
/// embedded as `W × {0}`.
pub fn build_rw(field: &Field, n: usize, w: &SubspaceBasis) -> Result<RegularSubgroupDesc> {
    let kind = HomKind::auto(field, n)?;
    build_with(field, n, kind, w, None)
}

/// Like [`build_rw`] with an explicit family and optionally a custom `d`.
pub fn build_with(
    field: &Field,
    n: usize,
    kind: HomKind,
    w: &SubspaceBasis,
    d: Option<Vec<FieldValue>>,
) -> Result<RegularSubgroupDesc> {
    let b = builtin(kind, field, n)?;
    let w = if w.ambient_dim() == b.k {
        w.clone()
    } else if w.ambient_dim() == 1 {
        let firsts: Vec<FieldValue> = w.vectors().iter().map(|v| v[0].clone()).collect();
        SubspaceBasis::embed_first(field, b.k, &firsts)?
    } else {
        return Err(Error::Dimension(format!(
            "W lives in F^{}, expected F^{} or F",
            w.ambient_dim(),
            b.k
        )));
    };
    if !field.is_finite() && !w.is_empty() {
        return Err(Error::Unsupported(
            "over Q only W = {0} is supported".into(),
        ));
    }
    let hom = with_kernel(&b.hom, &w)?;
    let d = match d {
        Some(d) => d,
        None => {
            let mut d = vec![field.zero(); b.k];
            d[0] = field.one();
            d
        }
    };
    RegularSubgroupDesc::new(d, b.form, hom, w)
}

/// Two generators over F₂ of a translation-free regular subgroup of
/// AGL₃(2): `I₄+E₁₂+E₂₃+E₃₄` and `I₄+E₁₄+E₂₃+E₂₄`.
pub fn hegedus_agl32() -> (AffineElem, AffineElem) {
    let f = Field::galois(2, 1).expect("GF(2)");
    let make = |pairs: &[(usize, usize)]| {
        let mut m = Mat::identity(&f, 4);
        for &(i, j) in pairs {
            m = &m + &Mat::elementary(&f, 4, i, j).expect("in range");
        }
        AffineElem::from_matrix(m).expect("affine")
    };
    (
        make(&[(1, 2), (2, 3), (3, 4)]),
        make(&[(1, 4), (2, 3), (2, 4)]),
    )
}

/// The subgroup generated by [`hegedus_agl32`].
pub fn hegedus_group() -> Vec<AffineElem> {
    let (g, h) = hegedus_agl32();
    let f = g.field().clone();
    closure(&f, 3, &[g, h], 64).expect("finite closure")
}
