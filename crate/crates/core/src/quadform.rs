//! Quadratic forms, their isometries, and additive homomorphisms
//! `(F^k, +) → O_m(F, Q)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Field, FieldValue};
use crate::linalg::Mat;

/// `Q(v) = v U vᵀ` with `U` upper triangular. This representation works in
/// every characteristic, including 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    u: Mat,
}

impl QuadraticForm {
    pub fn new(u: Mat) -> Result<QuadraticForm> {
        if !u.is_square() {
            return Err(Error::NotQuadraticForm(format!(
                "{}x{} coefficient matrix",
                u.rows(),
                u.cols()
            )));
        }
        if !u.is_upper_triangular() {
            return Err(Error::NotQuadraticForm(
                "coefficient matrix must be upper triangular".into(),
            ));
        }
        Ok(QuadraticForm { u })
    }

    /// Builds `Σ c·x_i x_j` from 1-based `(i, j, c)` terms with `i ≤ j`.
    pub fn from_terms(field: &Field, m: usize, terms: &[(usize, usize, FieldValue)]) -> Result<QuadraticForm> {
        let mut u = Mat::zeros(field, m, m);
        for (i, j, c) in terms {
            if *i == 0 || *j == 0 || i > j || *j > m {
                return Err(Error::NotQuadraticForm(format!("bad term x{i}x{j}")));
            }
            let cur = u.get(i - 1, j - 1).clone();
            u.set(i - 1, j - 1, field.add(&cur, c));
        }
        QuadraticForm::new(u)
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn field(&self) -> &Field {
        self.u.field()
    }

    pub fn coefficients(&self) -> &Mat {
        &self.u
    }

    pub fn eval(&self, v: &[FieldValue]) -> Result<FieldValue> {
        let m = self.dim();
        if v.len() != m {
            return Err(Error::Dimension(format!(
                "vector of length {} for a form in {m} variables",
                v.len()
            )));
        }
        let f = self.field();
        let mut acc = f.zero();
        for i in 0..m {
            if f.is_zero(&v[i]) {
                continue;
            }
            for j in i..m {
                let c = self.u.get(i, j);
                if !f.is_zero(c) {
                    acc = f.add(&acc, &f.mul(&f.mul(&v[i], c), &v[j]));
                }
            }
        }
        Ok(acc)
    }

    /// `B(u, v) = Q(u+v) − Q(u) − Q(v)`, straight from the definition.
    pub fn polar(&self, u: &[FieldValue], v: &[FieldValue]) -> Result<FieldValue> {
        let f = self.field();
        if u.len() != v.len() {
            return Err(Error::Dimension("polar form of vectors of different length".into()));
        }
        let sum: Vec<FieldValue> = u.iter().zip(v).map(|(a, b)| f.add(a, b)).collect();
        Ok(f.sub(&f.sub(&self.eval(&sum)?, &self.eval(u)?), &self.eval(v)?))
    }

    /// Gram matrix `J = U + Uᵀ` of the polar form.
    pub fn polar_gram(&self) -> Mat {
        &self.u + &self.u.transpose()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.polar_gram().det().map(|d| d != self.field().zero()).unwrap_or(false)
    }

    /// `A J Aᵀ = J` together with `Q(e_i A) = Q(e_i)` on the basis, which
    /// together force `Q(vA) = Q(v)` everywhere.
    pub fn is_isometry(&self, a: &Mat) -> Result<bool> {
        let m = self.dim();
        if a.rows() != m || a.cols() != m {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for a form in {m} variables",
                a.rows(),
                a.cols()
            )));
        }
        let j = self.polar_gram();
        if &(a * &j) * &a.transpose() != j {
            return Ok(false);
        }
        for i in 0..m {
            if self.eval(a.row(i))? != *self.u.get(i, i) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `QF m <U>`.
    pub fn encode(&self) -> String {
        format!("QF {} {}", self.dim(), self.u.encode())
    }

    pub fn decode(field: &Field, line: &str) -> Result<QuadraticForm> {
        let mut toks = line.split_whitespace();
        let bad = || Error::NotQuadraticForm(format!("expected `QF m <matrix>`: `{line}`"));
        if toks.next() != Some("QF") {
            return Err(bad());
        }
        let m: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let u = Mat::decode(field, toks.next().ok_or_else(bad)?)?;
        if u.rows() != m || toks.next().is_some() {
            return Err(bad());
        }
        QuadraticForm::new(u)
    }
}

/// The explicit homomorphism families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HomKind {
    /// char ≠ 2, `Q = x1x3 − x2² + ½Σ_{i≥4} x_i²` on F^(n−1), k = 1.
    Example1,
    /// char 2, `Q = Σ x_i x_{t+i}` on F^(2t), n = 2t+1 ≥ 5, k = 1.
    Example2Odd,
    /// F = F₂, n = 3: `Q = x1x2`, φ(1) swaps the coordinates.
    Example2N3Q2,
    /// char 2, `Q = Σ x_i x_{t+i}` on F^(2t), n = 2t+2 ≥ 6, k = 2.
    Example3,
}

impl HomKind {
    pub const ALL: [HomKind; 4] = [
        HomKind::Example1,
        HomKind::Example2Odd,
        HomKind::Example2N3Q2,
        HomKind::Example3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HomKind::Example1 => "example1",
            HomKind::Example2Odd => "example2_odd",
            HomKind::Example2N3Q2 => "example2_n3q2",
            HomKind::Example3 => "example3",
        }
    }

    /// The family used for AGL_n(F), or a diagnostic naming the condition
    /// under which no translation-free regular subgroup is constructed.
    pub fn auto(field: &Field, n: usize) -> Result<HomKind> {
        let char2 = field.characteristic() == 2;
        let is_f2 = field.order() == Some(2);
        match (n, char2) {
            (0..=2, _) => Err(Error::Inadmissible(format!(
                "n = {n} <= 2: every regular subgroup of AGL_{n}({field}) contains a nontrivial translation"
            ))),
            (3, _) if !is_f2 => Err(Error::Inadmissible(format!(
                "n = 3 and F = {field} != GF(2): every regular subgroup of AGL_3 contains a nontrivial translation"
            ))),
            (3, _) => Ok(HomKind::Example2N3Q2),
            (4, true) => Err(Error::Inadmissible(format!(
                "n = 4 and char F = 2: every regular subgroup of AGL_4({field}) contains a nontrivial translation"
            ))),
            (_, false) => Ok(HomKind::Example1),
            (n, true) if n % 2 == 1 => Ok(HomKind::Example2Odd),
            (_, true) => Ok(HomKind::Example3),
        }
    }

    /// `(m, k)` for AGL_n.
    pub fn split(self, n: usize) -> (usize, usize) {
        match self {
            HomKind::Example3 => (n - 2, 2),
            _ => (n - 1, 1),
        }
    }
}

impl fmt::Display for HomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<HomKind> {
        HomKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown homomorphism kind `{s}`")))
    }
}

type CustomRule = Arc<dyn Fn(&[FieldValue]) -> Mat + Send + Sync>;

#[derive(Clone)]
enum Rule {
    Trivial,
    Example1,
    Example2 { t: usize },
    Swap,
    Example3 { t: usize },
    Custom(CustomRule),
}

/// Projection of F^k onto a complement of an F₀-subspace, expressed on
/// prime-field coordinates.
#[derive(Clone, Debug)]
struct Projection {
    /// (k·ℓ)×(k·ℓ) matrix over F₀ acting on coordinate row vectors.
    matrix: Mat,
}

/// A map `a ↦ φ(a)` from `F^k` into `GL_m(F)` meant to be additive.
#[derive(Clone)]
pub struct AdditiveHom {
    field: Field,
    k: usize,
    m: usize,
    rule: Rule,
    kind: Option<HomKind>,
    projection: Option<Projection>,
}

impl fmt::Debug for AdditiveHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdditiveHom")
            .field("field", &self.field.to_string())
            .field("k", &self.k)
            .field("m", &self.m)
            .field("kind", &self.kind)
            .field("projected", &self.projection.is_some())
            .finish()
    }
}

/// Why a homomorphism check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomFailure {
    NotIdentityAtZero,
    NotAdditive { a: Vec<FieldValue>, b: Vec<FieldValue> },
    NotIsometry { a: Vec<FieldValue> },
    NotInjective { a: Vec<FieldValue> },
}

/// Number of random pairs used when the field is infinite.
pub const SAMPLED_PAIRS: usize = 256;

impl AdditiveHom {
    /// The constant map to `I_m`.
    pub fn trivial(field: &Field, k: usize, m: usize) -> AdditiveHom {
        AdditiveHom {
            field: field.clone(),
            k,
            m,
            rule: Rule::Trivial,
            kind: None,
            projection: None,
        }
    }

    /// An arbitrary rule; nothing about it is assumed.
    pub fn custom<F>(field: &Field, k: usize, m: usize, rule: F) -> AdditiveHom
    where
        F: Fn(&[FieldValue]) -> Mat + Send + Sync + 'static,
    {
        AdditiveHom {
            field: field.clone(),
            k,
            m,
            rule: Rule::Custom(Arc::new(rule)),
            kind: None,
            projection: None,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn domain_dim(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> Option<HomKind> {
        self.kind
    }

    pub fn eval(&self, a: &[FieldValue]) -> Result<Mat> {
        if a.len() != self.k {
            return Err(Error::Dimension(format!(
                "argument of length {} for a map on F^{}",
                a.len(),
                self.k
            )));
        }
        match &self.projection {
            Some(p) => Ok(self.apply_rule(&self.project(p, a)?)),
            None => Ok(self.apply_rule(a)),
        }
    }

    fn project(&self, p: &Projection, a: &[FieldValue]) -> Result<Vec<FieldValue>> {
        let coords = vector_coords(&self.field, a)?;
        let f0 = p.matrix.field().clone();
        let row: Vec<FieldValue> = coords.iter().map(|&c| f0.from_int(c as i64)).collect();
        let out = p.matrix.left_mul_vec(&row)?;
        let ell = self.field.degree().unwrap() as usize;
        out.chunks(ell)
            .map(|chunk| {
                let cs: Vec<u32> = chunk.iter().map(|x| x.code().unwrap()).collect();
                self.field.from_prime_coords(&cs)
            })
            .collect()
    }

    fn apply_rule(&self, a: &[FieldValue]) -> Mat {
        let f = &self.field;
        let m = self.m;
        let e = |i, j| Mat::elementary(f, m, i, j).expect("index within size");
        let id = Mat::identity(f, m);
        match &self.rule {
            Rule::Trivial => id,
            Rule::Example1 => {
                let a0 = &a[0];
                let two_a = f.mul(&f.from_int(2), a0);
                let a_sq = f.mul(a0, a0);
                let mut r = id;
                r = &r + &e(2, 1).scale(&two_a);
                r = &r + &e(3, 1).scale(&a_sq);
                &r + &e(3, 2).scale(a0)
            }
            Rule::Example2 { t } => {
                let n1 = &e(1, *t) + &e(2 * t, t + 1);
                &id + &n1.scale(&a[0])
            }
            Rule::Swap => {
                if f.is_zero(&a[0]) {
                    id
                } else {
                    &e(1, 2) + &e(2, 1)
                }
            }
            Rule::Example3 { t } => {
                let t = *t;
                let n1 = &e(1, t) + &e(2 * t, t + 1);
                let n2 = &e(1, 2 * t) + &e(t, t + 1);
                let ab = f.mul(&a[0], &a[1]);
                let r = &(&id + &n1.scale(&a[0])) + &n2.scale(&a[1]);
                &r + &e(1, t + 1).scale(&ab)
            }
            Rule::Custom(rule) => rule(a),
        }
    }

    /// Pairs to test: every pair over a finite field, otherwise
    /// [`SAMPLED_PAIRS`] seeded random pairs.
    fn test_pairs(&self, seed: u64) -> Result<Vec<(Vec<FieldValue>, Vec<FieldValue>)>> {
        if self.field.is_finite() {
            let all: Vec<_> = self.field.vectors(self.k)?.collect();
            let mut out = Vec::with_capacity(all.len() * all.len());
            for a in &all {
                for b in &all {
                    out.push((a.clone(), b.clone()));
                }
            }
            Ok(out)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..SAMPLED_PAIRS)
                .map(|_| {
                    let a = (0..self.k).map(|_| self.field.random(&mut rng)).collect();
                    let b = (0..self.k).map(|_| self.field.random(&mut rng)).collect();
                    (a, b)
                })
                .collect())
        }
    }

    /// `φ(0) = I` and `φ(a+b) = φ(a)φ(b)` on every pair (finite fields) or
    /// on seeded random pairs (ℚ). Returns the number of pairs checked.
    pub fn check_additive(&self, seed: u64) -> Result<usize, HomFailure> {
        let f = &self.field;
        let zero = vec![f.zero(); self.k];
        if !self.eval(&zero).map(|m| m.is_identity()).unwrap_or(false) {
            return Err(HomFailure::NotIdentityAtZero);
        }
        let pairs = self.test_pairs(seed).map_err(|_| HomFailure::NotIdentityAtZero)?;
        let cache: Option<Vec<Mat>> = if f.is_finite() {
            Some(
                f.vectors(self.k)
                    .unwrap()
                    .map(|a| self.eval(&a).unwrap())
                    .collect(),
            )
        } else {
            None
        };
        let value = |a: &[FieldValue]| match &cache {
            Some(c) => c[f.vector_index(a) as usize].clone(),
            None => self.eval(a).unwrap(),
        };
        for (a, b) in &pairs {
            let sum: Vec<FieldValue> = a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect();
            if value(&sum) != &value(a) * &value(b) {
                return Err(HomFailure::NotAdditive {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
        Ok(pairs.len())
    }

    pub fn is_additive(&self) -> bool {
        self.check_additive(0).is_ok()
    }

    /// Every value is an isometry of `q` (all arguments when finite,
    /// seeded samples otherwise).
    pub fn check_isometries(&self, q: &QuadraticForm, seed: u64) -> Result<usize, HomFailure> {
        let args: Vec<Vec<FieldValue>> = if self.field.is_finite() {
            self.field.vectors(self.k).unwrap().collect()
        } else {
            self.test_pairs(seed).unwrap().into_iter().map(|(a, _)| a).collect()
        };
        for a in &args {
            let m = self.eval(a).map_err(|_| HomFailure::NotIsometry { a: a.clone() })?;
            if !q.is_isometry(&m).unwrap_or(false) {
                return Err(HomFailure::NotIsometry { a: a.clone() });
            }
        }
        Ok(args.len())
    }

    /// All `a` with `φ(a) = I` (finite fields only).
    pub fn kernel(&self) -> Result<Vec<Vec<FieldValue>>> {
        let mut out = Vec::new();
        for a in self.field.vectors(self.k)? {
            if self.eval(&a)?.is_identity() {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// `φ(a) = I` only for `a = 0` (finite fields only).
    pub fn check_injective(&self) -> Result<(), HomFailure> {
        let kernel = self.kernel().map_err(|_| HomFailure::NotIdentityAtZero)?;
        match kernel.into_iter().find(|a| a.iter().any(|x| !self.field.is_zero(x))) {
            Some(a) => Err(HomFailure::NotInjective { a }),
            None => Ok(()),
        }
    }

    /// `HOM kind n [W basis vectors]`, for the built-in families.
    pub fn encode(&self, n: usize, w: &SubspaceBasis) -> Option<String> {
        let kind = self.kind?;
        let mut s = format!("HOM {kind} {n}");
        for v in w.vectors() {
            s.push(' ');
            s.push_str(&encode_vector(&self.field, v));
        }
        Some(s)
    }
}

/// Concatenated prime-field coordinates of a vector in F^k.
pub fn vector_coords(field: &Field, v: &[FieldValue]) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for x in v {
        out.extend(field.prime_coords(x)?);
    }
    Ok(out)
}

pub fn encode_vector(field: &Field, v: &[FieldValue]) -> String {
    v.iter().map(|x| field.format(x)).collect::<Vec<_>>().join(",")
}

pub fn decode_vector(field: &Field, s: &str) -> Result<Vec<FieldValue>> {
    s.split(',').map(|t| field.parse(t)).collect()
}

/// The quadratic form and homomorphism of one of the explicit families.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub form: QuadraticForm,
    pub hom: AdditiveHom,
    pub m: usize,
    pub k: usize,
}

pub fn builtin(kind: HomKind, field: &Field, n: usize) -> Result<Builtin> {
    let char2 = field.characteristic() == 2;
    let inadmissible = |msg: String| Err(Error::Inadmissible(format!("{kind}: {msg}")));
    let (m, k) = match kind {
        HomKind::Example1 => {
            if char2 {
                return inadmissible(format!("needs char F != 2, got {field}"));
            }
            if n < 4 {
                return inadmissible(format!("needs n >= 4, got n = {n}"));
            }
            (n - 1, 1)
        }
        HomKind::Example2Odd => {
            if !char2 {
                return inadmissible(format!("needs char F = 2, got {field}"));
            }
            if n.is_multiple_of(2) || n < 5 {
                return inadmissible(format!("needs odd n >= 5, got n = {n}"));
            }
            (n - 1, 1)
        }
        HomKind::Example2N3Q2 => {
            if field.order() != Some(2) {
                return inadmissible(format!("needs F = GF(2), got {field}"));
            }
            if n != 3 {
                return inadmissible(format!("needs n = 3, got n = {n}"));
            }
            (2, 1)
        }
        HomKind::Example3 => {
            if !char2 {
                return inadmissible(format!("needs char F = 2, got {field}"));
            }
            if n % 2 == 1 || n < 6 {
                return inadmissible(format!("needs even n >= 6, got n = {n}"));
            }
            (n - 2, 2)
        }
    };
    let (form, rule) = match kind {
        HomKind::Example1 => {
            let half = field.inv(&field.from_int(2))?;
            let mut terms = vec![(1, 3, field.one()), (2, 2, field.from_int(-1))];
            terms.extend((4..=m).map(|i| (i, i, half.clone())));
            (QuadraticForm::from_terms(field, m, &terms)?, Rule::Example1)
        }
        HomKind::Example2Odd | HomKind::Example3 => {
            let t = m / 2;
            let terms: Vec<_> = (1..=t).map(|i| (i, t + i, field.one())).collect();
            let form = QuadraticForm::from_terms(field, m, &terms)?;
            let rule = if kind == HomKind::Example3 {
                Rule::Example3 { t }
            } else {
                Rule::Example2 { t }
            };
            (form, rule)
        }
        HomKind::Example2N3Q2 => (
            QuadraticForm::from_terms(field, 2, &[(1, 2, field.one())])?,
            Rule::Swap,
        ),
    };
    Ok(Builtin {
        form,
        hom: AdditiveHom {
            field: field.clone(),
            k,
            m,
            rule,
            kind: Some(kind),
            projection: None,
        },
        m,
        k,
    })
}

/// A list of vectors in F^k, linearly independent over the prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    field: Field,
    k: usize,
    vectors: Vec<Vec<FieldValue>>,
}

impl SubspaceBasis {
    pub fn new(field: &Field, k: usize, vectors: Vec<Vec<FieldValue>>) -> Result<SubspaceBasis> {
        if let Some(v) = vectors.iter().find(|v| v.len() != k) {
            return Err(Error::Dimension(format!(
                "basis vector of length {} in F^{k}",
                v.len()
            )));
        }
        if vectors.iter().flatten().any(|x| !field.contains(x)) {
            return Err(Error::FieldMismatch);
        }
        let basis = SubspaceBasis {
            field: field.clone(),
            k,
            vectors,
        };
        if !basis.vectors.is_empty() && basis.prime_matrix()?.rank() < basis.vectors.len() {
            return Err(Error::DependentBasis);
        }
        Ok(basis)
    }

    pub fn empty(field: &Field, k: usize) -> SubspaceBasis {
        SubspaceBasis {
            field: field.clone(),
            k,
            vectors: Vec::new(),
        }
    }

    /// `W × {0}` inside F^k for a subspace W of F given by a basis.
    pub fn embed_first(field: &Field, k: usize, w: &[FieldValue]) -> Result<SubspaceBasis> {
        let vectors = w
            .iter()
            .map(|x| {
                let mut v = vec![field.zero(); k];
                v[0] = x.clone();
                v
            })
            .collect();
        SubspaceBasis::new(field, k, vectors)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<FieldValue>] {
        &self.vectors
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Rows of prime-field coordinates; over ℚ the vectors themselves.
    fn prime_matrix(&self) -> Result<Mat> {
        match self.field.degree() {
            Some(ell) => {
                let f0 = self.field.prime_field();
                let cols = self.k * ell as usize;
                let mut data = Vec::with_capacity(self.vectors.len() * cols);
                for v in &self.vectors {
                    data.extend(
                        vector_coords(&self.field, v)?
                            .into_iter()
                            .map(|c| f0.from_int(c as i64)),
                    );
                }
                Mat::from_vec(&f0, self.vectors.len(), cols, data)
            }
            None => Mat::from_vec(
                &self.field,
                self.vectors.len(),
                self.k,
                self.vectors.iter().flatten().cloned().collect(),
            ),
        }
    }

    /// Every F₀-linear combination of the basis (finite fields only).
    pub fn span(&self) -> Result<Vec<Vec<FieldValue>>> {
        let f0 = self.field.prime_field();
        let p = f0.order().ok_or(Error::RationalUnsupported("enumerating a span"))?;
        let f = &self.field;
        let mut out = Vec::new();
        for coeffs in f0.vectors(self.dim())? {
            let mut v = vec![f.zero(); self.k];
            for (c, b) in coeffs.iter().zip(&self.vectors) {
                // c lives in F₀ = {0, …, p−1}; its image in F is c·1
                let c = f.from_int(c.code().unwrap() as i64 % p as i64);
                for (slot, x) in v.iter_mut().zip(b) {
                    *slot = f.add(slot, &f.mul(&c, x));
                }
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Whether `v` lies in the F₀-span.
    pub fn contains(&self, v: &[FieldValue]) -> Result<bool> {
        let mut with = self.clone();
        with.vectors.push(v.to_vec());
        Ok(with.prime_matrix()?.rank() == self.dim())
    }
}

/// `φ = ψ∘ϖ` where ϖ projects F^k onto a complement of span(W); the
/// kernel of φ is exactly span(W) when ψ is injective.
///
/// The complement is spanned by the standard F₀-basis vectors of F^k (in
/// coordinate order) that are independent of W and of those already taken.
pub fn with_kernel(psi: &AdditiveHom, w: &SubspaceBasis) -> Result<AdditiveHom> {
    if psi.projection.is_some() {
        return Err(Error::Unsupported(
            "homomorphism already has a nontrivial kernel".into(),
        ));
    }
    if w.field() != psi.field() || w.ambient_dim() != psi.domain_dim() {
        return Err(Error::Dimension("subspace does not live in the domain".into()));
    }
    if w.is_empty() {
        return Ok(psi.clone());
    }
    let ell = psi
        .field
        .degree()
        .ok_or_else(|| Error::Unsupported("over Q only W = {0} is supported".into()))?
        as usize;
    let f0 = psi.field.prime_field();
    let total = psi.k * ell;
    let mut basis = w.prime_matrix()?;
    let dim_w = basis.rows();
    for idx in 0..total {
        if basis.rows() == total {
            break;
        }
        let mut e = vec![f0.zero(); total];
        e[idx] = f0.one();
        let mut data = basis.data().to_vec();
        data.extend(e);
        let cand = Mat::from_vec(&f0, basis.rows() + 1, total, data)?;
        if cand.rank() == cand.rows() {
            basis = cand;
        }
    }
    // coordinates c = λ·B; keep only the complement part of λ
    let mut keep = Mat::zeros(&f0, total, total);
    for i in dim_w..total {
        keep.set(i, i, f0.one());
    }
    let matrix = &(&basis.inverse()? * &keep) * &basis;
    Ok(AdditiveHom {
        projection: Some(Projection { matrix }),
        ..psi.clone()
    })
}

/// Seed used by default for sampled homomorphism checks.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, ell: u32) -> Field {
        Field::galois(p, ell).unwrap()
    }

    fn ints(field: &Field, xs: &[i64]) -> Vec<FieldValue> {
        xs.iter().map(|&x| field.from_int(x)).collect()
    }

    #[test]
    fn example1_values() {
        let f = gf(3, 1);
        let b = builtin(HomKind::Example1, &f, 4).unwrap();
        assert_eq!(b.form.eval(&ints(&f, &[0, 0, 0])).unwrap(), f.zero());
        assert_eq!(b.form.eval(&ints(&f, &[0, 1, 0])).unwrap(), f.from_int(2));
        let one = b.hom.eval(&[f.one()]).unwrap();
        let two = b.hom.eval(&[f.from_int(2)]).unwrap();
        assert_eq!(&one * &one, two);
        assert_eq!(
            two,
            Mat::from_ints(&f, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 1]])
        );
    }

    #[test]
    fn example1_gram_over_f5() {
        let f = gf(5, 1);
        let b = builtin(HomKind::Example1, &f, 4).unwrap();
        assert_eq!(
            b.form.polar_gram(),
            Mat::from_ints(&f, &[&[0, 0, 1], &[0, 3, 0], &[1, 0, 0]])
        );
    }

    #[test]
    fn example1_tail_has_half_coefficients() {
        let q = Field::rational();
        let b = builtin(HomKind::Example1, &q, 6).unwrap();
        let j = b.form.polar_gram();
        assert_eq!(j.submatrix(3, 3, 2, 2), Mat::identity(&q, 2));
        let v = vec![q.zero(), q.zero(), q.zero(), q.from_int(2), q.zero()];
        assert_eq!(b.form.eval(&v).unwrap(), q.from_int(2));
    }

    #[test]
    fn example2_values() {
        let f = gf(2, 1);
        let b = builtin(HomKind::Example2Odd, &f, 5).unwrap();
        assert_eq!(b.form.eval(&ints(&f, &[1, 0, 1, 0])).unwrap(), f.one());
        assert_eq!(
            b.form.polar_gram(),
            Mat::from_ints(&f, &[&[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, 1, 0, 0]])
        );
        let phi1 = b.hom.eval(&[f.one()]).unwrap();
        let e = |i, j| Mat::elementary(&f, 4, i, j).unwrap();
        assert_eq!(phi1, &(&Mat::identity(&f, 4) + &e(1, 2)) + &e(4, 3));
        assert!(b.form.is_isometry(&phi1).unwrap());
        // exhaustive Q(vA) = Q(v) as an independent check of is_isometry
        for v in f.vectors(4).unwrap() {
            let va = phi1.left_mul_vec(&v).unwrap();
            assert_eq!(b.form.eval(&va).unwrap(), b.form.eval(&v).unwrap());
        }
    }

    #[test]
    fn swap_on_hyperbolic_plane() {
        let f = gf(2, 1);
        let b = builtin(HomKind::Example2N3Q2, &f, 3).unwrap();
        let phi1 = b.hom.eval(&[f.one()]).unwrap();
        assert_eq!(phi1, Mat::from_ints(&f, &[&[0, 1], &[1, 0]]));
        assert!(b.form.is_isometry(&phi1).unwrap());
        assert!(b.form.is_isometry(&Mat::identity(&f, 2)).unwrap());
    }

    #[test]
    fn example3_value_at_one_one() {
        let f = gf(2, 1);
        let b = builtin(HomKind::Example3, &f, 6).unwrap();
        let e = |i, j| Mat::elementary(&f, 4, i, j).unwrap();
        let mut want = Mat::identity(&f, 4);
        for (i, j) in [(1, 2), (4, 3), (1, 4), (2, 3), (1, 3)] {
            want = &want + &e(i, j);
        }
        let phi = b.hom.eval(&[f.one(), f.one()]).unwrap();
        assert_eq!(phi, want);
        for v in f.vectors(4).unwrap() {
            let va = phi.left_mul_vec(&v).unwrap();
            assert_eq!(b.form.eval(&va).unwrap(), b.form.eval(&v).unwrap());
        }
    }

    #[test]
    fn isometry_rejects_scaling() {
        let f = gf(5, 1);
        let b = builtin(HomKind::Example1, &f, 4).unwrap();
        assert!(!b.form.is_isometry(&Mat::identity(&f, 3).scale(&f.from_int(2))).unwrap());
        assert!(b.form.is_isometry(&Mat::identity(&f, 2)).is_err());
    }

    #[test]
    fn builtin_constraints_have_distinct_messages() {
        let f2 = gf(2, 1);
        let f3 = gf(3, 1);
        let errs = [
            builtin(HomKind::Example1, &f2, 5).unwrap_err(),
            builtin(HomKind::Example1, &f3, 3).unwrap_err(),
            builtin(HomKind::Example2Odd, &f3, 5).unwrap_err(),
            builtin(HomKind::Example2Odd, &f2, 6).unwrap_err(),
            builtin(HomKind::Example2N3Q2, &gf(2, 2), 3).unwrap_err(),
            builtin(HomKind::Example2N3Q2, &f2, 5).unwrap_err(),
            builtin(HomKind::Example3, &f3, 6).unwrap_err(),
            builtin(HomKind::Example3, &f2, 4).unwrap_err(),
        ];
        let msgs: std::collections::HashSet<String> = errs.iter().map(|e| e.to_string()).collect();
        assert_eq!(msgs.len(), errs.len());
    }

    #[test]
    fn auto_selection() {
        let f2 = gf(2, 1);
        assert_eq!(HomKind::auto(&f2, 3).unwrap(), HomKind::Example2N3Q2);
        assert_eq!(HomKind::auto(&f2, 7).unwrap(), HomKind::Example2Odd);
        assert_eq!(HomKind::auto(&gf(2, 2), 6).unwrap(), HomKind::Example3);
        assert_eq!(HomKind::auto(&gf(3, 1), 4).unwrap(), HomKind::Example1);
        assert_eq!(HomKind::auto(&Field::rational(), 5).unwrap(), HomKind::Example1);
        assert!(HomKind::auto(&gf(3, 1), 2).is_err());
        assert!(HomKind::auto(&gf(2, 2), 3).is_err());
        assert!(HomKind::auto(&f2, 4).is_err());
        assert!(HomKind::auto(&gf(5, 1), 3).is_err());
    }

    #[test]
    fn additivity_checks() {
        let f5 = gf(5, 1);
        let b = builtin(HomKind::Example1, &f5, 4).unwrap();
        assert_eq!(b.hom.check_additive(0), Ok(25));
        assert!(AdditiveHom::trivial(&f5, 2, 3).is_additive());
        // corrupt the a^2 term into a^3
        let field = f5.clone();
        let bad = AdditiveHom::custom(&f5, 1, 3, move |a| {
            let f = &field;
            let e = |i, j| Mat::elementary(f, 3, i, j).unwrap();
            let a0 = &a[0];
            let r = &Mat::identity(f, 3) + &e(2, 1).scale(&f.mul(&f.from_int(2), a0));
            let r = &r + &e(3, 1).scale(&f.pow(a0, 3));
            &r + &e(3, 2).scale(a0)
        });
        assert!(matches!(bad.check_additive(0), Err(HomFailure::NotAdditive { .. })));
    }

    #[test]
    fn rational_additivity_is_sampled() {
        let q = Field::rational();
        let b = builtin(HomKind::Example1, &q, 4).unwrap();
        assert_eq!(b.hom.check_additive(7), Ok(SAMPLED_PAIRS));
        assert_eq!(b.hom.check_isometries(&b.form, 7), Ok(SAMPLED_PAIRS));
    }

    #[test]
    fn kernel_projection_gf4() {
        let f = gf(2, 2);
        let b = builtin(HomKind::Example2Odd, &f, 5).unwrap();
        let w = SubspaceBasis::new(&f, 1, vec![vec![f.one()]]).unwrap();
        let phi = with_kernel(&b.hom, &w).unwrap();
        let omega = f.omega();
        let omega1 = f.add(&omega, &f.one());
        assert!(phi.eval(&[f.one()]).unwrap().is_identity());
        let psi_omega = b.hom.eval(std::slice::from_ref(&omega)).unwrap();
        assert_eq!(phi.eval(&[omega]).unwrap(), psi_omega);
        assert_eq!(phi.eval(&[omega1]).unwrap(), psi_omega);
        assert_eq!(phi.kernel().unwrap(), vec![vec![f.zero()], vec![f.one()]]);
    }

    #[test]
    fn kernel_extremes() {
        let f = gf(2, 3);
        let b = builtin(HomKind::Example2Odd, &f, 5).unwrap();
        let empty = SubspaceBasis::empty(&f, 1);
        assert_eq!(with_kernel(&b.hom, &empty).unwrap().kernel().unwrap().len(), 1);
        let all = SubspaceBasis::new(
            &f,
            1,
            vec![vec![f.element(1)], vec![f.element(2)], vec![f.element(4)]],
        )
        .unwrap();
        let phi = with_kernel(&b.hom, &all).unwrap();
        assert!(f.vectors(1).unwrap().all(|a| phi.eval(&a).unwrap().is_identity()));
    }

    #[test]
    fn dependent_basis_rejected() {
        let f = gf(3, 2);
        let x = f.element(4);
        let two_x = f.add(&x, &x);
        assert_eq!(
            SubspaceBasis::new(&f, 1, vec![vec![x], vec![two_x]]).unwrap_err(),
            Error::DependentBasis
        );
    }

    #[test]
    fn rational_kernel_unsupported() {
        let q = Field::rational();
        let b = builtin(HomKind::Example1, &q, 4).unwrap();
        let w = SubspaceBasis::new(&q, 1, vec![vec![q.one()]]).unwrap();
        assert!(with_kernel(&b.hom, &w).is_err());
        assert!(with_kernel(&b.hom, &SubspaceBasis::empty(&q, 1)).is_ok());
    }

    #[test]
    fn qf_text_roundtrip() {
        let f = gf(3, 1);
        let b = builtin(HomKind::Example1, &f, 5).unwrap();
        let line = b.form.encode();
        assert_eq!(QuadraticForm::decode(&f, &line).unwrap(), b.form);
        assert!(QuadraticForm::decode(&f, "QF 2 1,0;0,1;0,0").is_err());
        let lower = Mat::from_ints(&f, &[&[1, 0], &[1, 1]]);
        assert!(QuadraticForm::new(lower).is_err());
    }
}
