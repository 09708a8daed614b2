//! Algebraic properties shared by the property tests and the acceptance run.
//! Each check returns `Err(description)` on the first counterexample.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regaff::affine::AffineElem;
use regaff::quadform::builtin;
use regaff::{Field, FieldValue, HomKind, Mat, QuadraticForm};

pub type Check = Result<(), String>;

pub fn gf(p: u32, ell: u32) -> Field {
    Field::galois(p, ell).unwrap()
}

/// Fields swept exhaustively.
pub fn small_fields() -> Vec<Field> {
    vec![gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1), gf(2, 3), gf(3, 2)]
}

/// GF(9) and ℚ, the two fields used for random cases.
pub fn random_fields() -> Vec<Field> {
    vec![gf(3, 2), Field::rational()]
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn field_axioms(f: &Field, x: &FieldValue, y: &FieldValue, z: &FieldValue) -> Check {
    let s = |v: &FieldValue| f.format(v);
    let ctx = || format!("x={} y={} z={}", s(x), s(y), s(z));
    ensure(f.add(&f.add(x, y), z) == f.add(x, &f.add(y, z)), || format!("add assoc {}", ctx()))?;
    ensure(f.mul(&f.mul(x, y), z) == f.mul(x, &f.mul(y, z)), || format!("mul assoc {}", ctx()))?;
    ensure(f.add(x, y) == f.add(y, x), || format!("add comm {}", ctx()))?;
    ensure(f.mul(x, y) == f.mul(y, x), || format!("mul comm {}", ctx()))?;
    ensure(
        f.mul(x, &f.add(y, z)) == f.add(&f.mul(x, y), &f.mul(x, z)),
        || format!("distributivity {}", ctx()),
    )?;
    ensure(f.add(x, &f.zero()) == *x && f.mul(x, &f.one()) == *x, || format!("identities {}", ctx()))?;
    ensure(f.is_zero(&f.add(x, &f.neg(x))), || format!("negation {}", ctx()))?;
    if !f.is_zero(x) {
        let inv = f.inv(x).map_err(|e| e.to_string())?;
        ensure(f.mul(x, &inv) == f.one(), || format!("inverse {}", ctx()))?;
    } else {
        ensure(f.inv(x).is_err(), || "inverse of zero accepted".into())?;
    }
    if let Some(p) = f.galois_field().map(|g| g.p()) {
        let frob = |v: &FieldValue| f.pow(v, p as u64);
        ensure(frob(&f.add(x, y)) == f.add(&frob(x), &frob(y)), || format!("frobenius {}", ctx()))?;
    }
    Ok(())
}

pub fn field_axioms_exhaustive(f: &Field) -> Check {
    let els = f.elements().unwrap();
    for x in &els {
        for y in &els {
            for z in &els {
                field_axioms(f, x, y, z)?;
            }
        }
    }
    Ok(())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(f: &Field, len: usize, r: &mut ChaCha8Rng) -> Vec<FieldValue> {
    (0..len).map(|_| f.random(r)).collect()
}

fn random_upper(f: &Field, m: usize, r: &mut ChaCha8Rng) -> Mat {
    let mut u = Mat::zeros(f, m, m);
    for i in 0..m {
        for j in i..m {
            u.set(i, j, f.random(r));
        }
    }
    u
}

fn random_invertible(f: &Field, n: usize, r: &mut ChaCha8Rng) -> Mat {
    loop {
        let data = random_vec(f, n * n, r);
        let a = Mat::from_vec(f, n, n, data).unwrap();
        if a.rank() == n {
            return a;
        }
    }
}

pub fn random_affine(f: &Field, n: usize, r: &mut ChaCha8Rng) -> AffineElem {
    let v = random_vec(f, n, r);
    AffineElem::new(&v, &random_invertible(f, n, r)).unwrap()
}

fn vec_add(f: &Field, u: &[FieldValue], v: &[FieldValue]) -> Vec<FieldValue> {
    u.iter().zip(v).map(|(x, y)| f.add(x, y)).collect()
}

/// Q(u+v) − Q(u) − Q(v) = u J vᵀ, with u J vᵀ computed by matrix products.
pub fn polar_identity(q: &QuadraticForm, u: &[FieldValue], v: &[FieldValue]) -> Check {
    let f = q.field();
    let lhs = f.sub(
        &f.sub(&q.eval(&vec_add(f, u, v)).unwrap(), &q.eval(u).unwrap()),
        &q.eval(v).unwrap(),
    );
    let uj = Mat::row_vector(f, u).checked_mul(&q.polar_gram()).unwrap();
    let rhs = uj.checked_mul(&Mat::col_vector(f, v)).unwrap();
    ensure(lhs == *rhs.get(0, 0), || {
        format!("polar identity fails at u={:?} v={:?}", fmt(f, u), fmt(f, v))
    })
}

fn fmt(f: &Field, v: &[FieldValue]) -> Vec<String> {
    v.iter().map(|x| f.format(x)).collect()
}

pub fn polar_identity_random(f: &Field, seed: u64) -> Check {
    let mut r = rng(seed);
    let m = r.gen_range(1..=4);
    let q = QuadraticForm::new(random_upper(f, m, &mut r)).unwrap();
    let u = random_vec(f, m, &mut r);
    let v = random_vec(f, m, &mut r);
    polar_identity(&q, &u, &v)
}

/// Every U over a tiny field, all pairs of vectors.
pub fn polar_identity_exhaustive(f: &Field, m: usize) -> Check {
    let coords: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let vs: Vec<_> = f.vectors(m).unwrap().collect();
    for entries in f.vectors(coords.len()).unwrap() {
        let mut u = Mat::zeros(f, m, m);
        for (&(i, j), x) in coords.iter().zip(entries) {
            u.set(i, j, x);
        }
        let q = QuadraticForm::new(u).unwrap();
        for a in &vs {
            for b in &vs {
                polar_identity(&q, a, b)?;
            }
        }
    }
    Ok(())
}

/// Builtin family for `f` at a small dimension, if any.
fn family(f: &Field) -> (HomKind, usize) {
    if f.characteristic() != 2 {
        (HomKind::Example1, 4)
    } else {
        (HomKind::Example2Odd, 5)
    }
}

/// φ(a)·φ(b) is again an isometry of Q.
pub fn isometry_closure_random(f: &Field, seed: u64) -> Check {
    let (kind, n) = family(f);
    let b = builtin(kind, f, n).unwrap();
    let mut r = rng(seed);
    let x = b.hom.eval(&random_vec(f, b.k, &mut r)).unwrap();
    let y = b.hom.eval(&random_vec(f, b.k, &mut r)).unwrap();
    let ok = b.form.is_isometry(&x).unwrap()
        && b.form.is_isometry(&y).unwrap()
        && b.form.is_isometry(&(&x * &y)).unwrap();
    ensure(ok, || format!("isometry closure fails for {kind} over {f}"))
}

/// All isometries of a form in dimension `m` over a tiny field, closed under products.
pub fn isometry_closure_exhaustive(q: &QuadraticForm) -> Check {
    let f = q.field();
    let m = q.dim();
    let mut isos = Vec::new();
    for data in f.vectors(m * m).unwrap() {
        let a = Mat::from_vec(f, m, m, data).unwrap();
        if a.rank() == m && q.is_isometry(&a).unwrap() {
            isos.push(a);
        }
    }
    ensure(!isos.is_empty(), || "no isometries found".into())?;
    for a in &isos {
        for b in &isos {
            ensure(q.is_isometry(&(a * b)).unwrap(), || {
                format!("product of isometries {} and {} is not one", a.encode(), b.encode())
            })?;
        }
    }
    Ok(())
}

/// π(gh) = π(g)π(h) and the first row of gh is w + uB.
pub fn product_laws(g: &AffineElem, h: &AffineElem) -> Check {
    let f = g.field();
    let gh = g * h;
    let pi = gh.linear_part() == &g.linear_part() * &h.linear_part();
    ensure(pi, || format!("pi law fails for {} * {}", g.matrix().encode(), h.matrix().encode()))?;
    let ub = h.linear_part().left_mul_vec(g.vector_part()).unwrap();
    let want = vec_add(f, h.vector_part(), &ub);
    ensure(gh.vector_part() == want.as_slice(), || {
        format!("first-row law fails for {} * {}", g.matrix().encode(), h.matrix().encode())
    })
}

pub fn product_laws_random(f: &Field, seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let g = random_affine(f, n, &mut r);
    let h = random_affine(f, n, &mut r);
    product_laws(&g, &h)
}

/// Every pair in AGL_n over a tiny field.
pub fn product_laws_exhaustive(f: &Field, n: usize) -> Check {
    let mut all = Vec::new();
    for data in f.vectors(n * n).unwrap() {
        let a = Mat::from_vec(f, n, n, data).unwrap();
        if a.rank() == n {
            for v in f.vectors(n).unwrap() {
                all.push(AffineElem::new(&v, &a).unwrap());
            }
        }
    }
    for g in &all {
        for h in &all {
            product_laws(g, h)?;
        }
    }
    Ok(())
}

/// Random triple of field elements from a seed.
pub fn field_axioms_random(f: &Field, seed: u64) -> Check {
    let mut r = rng(seed);
    let (x, y, z) = (f.random(&mut r), f.random(&mut r), f.random(&mut r));
    field_axioms(f, &x, &y, &z)
}

/// A fixed nondegenerate form for the isometry sweeps: x1 x2 (+ x3^2 when m = 3).
pub fn sweep_form(f: &Field, m: usize) -> QuadraticForm {
    let mut terms = vec![(1, 2, f.one())];
    if m == 3 {
        terms.push((3, 3, f.one()));
    }
    QuadraticForm::from_terms(f, m, &terms).unwrap()
}
