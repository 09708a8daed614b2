//! Checks for regularity, unipotency and the translation part of a group,
//! given either as an explicit element set or as a [`RegularSubgroupDesc`].

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::affine::AffineElem;
use crate::construct::RegularSubgroupDesc;
use crate::error::{Error, Result};
use crate::field::{Field, FieldValue};
use crate::quadform::{encode_vector, HomFailure};

/// Above this many elements verification samples instead of sweeping.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

/// Random product identities checked in sampled mode.
pub const SAMPLE_TRIALS: usize = 256;

/// Outcome of [`check_regular`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularityVerdict {
    Regular,
    /// `left · right` is not in the set.
    NotClosed { left: AffineElem, right: AffineElem },
    /// Closed, but the wrong number of elements.
    WrongOrder { found: u64, expected: u64 },
    /// Two elements with the same first row.
    RepeatedFirstRow { first: AffineElem, second: AffineElem },
}

impl RegularityVerdict {
    pub fn is_regular(&self) -> bool {
        matches!(self, RegularityVerdict::Regular)
    }
}

impl fmt::Display for RegularityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityVerdict::Regular => write!(f, "regular"),
            RegularityVerdict::NotClosed { left, right } => write!(
                f,
                "not closed: {} * {} escapes the set",
                left.matrix().encode(),
                right.matrix().encode()
            ),
            RegularityVerdict::WrongOrder { found, expected } => {
                write!(f, "closed but has {found} elements, expected {expected}")
            }
            RegularityVerdict::RepeatedFirstRow { first, second } => write!(
                f,
                "first row repeated by {} and {}",
                first.matrix().encode(),
                second.matrix().encode()
            ),
        }
    }
}

fn check_shape(set: &[AffineElem], field: &Field, n: usize) -> Result<()> {
    for g in set {
        if g.field() != field {
            return Err(Error::FieldMismatch);
        }
        if g.dim() != n {
            return Err(Error::Dimension(format!("element of AGL_{} in AGL_{n}", g.dim())));
        }
    }
    Ok(())
}

/// Closure first, then order `q^n` and pairwise distinct first rows.
///
/// Closure is tested by growing a generating set: every element not yet in
/// the subgroup generated so far becomes a generator, and the subgroup is
/// recomputed; a product leaving `set` is returned as the witness.
pub fn check_regular(set: &[AffineElem], field: &Field, n: usize) -> Result<RegularityVerdict> {
    check_shape(set, field, n)?;
    let q = field
        .order()
        .ok_or(Error::RationalUnsupported("regularity of a finite set"))?;
    let expected = q
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Unsupported(format!("{q}^{n} elements")))?;
    let members: HashSet<&AffineElem> = set.iter().collect();
    let id = AffineElem::identity(field, n);
    let mut group: HashSet<AffineElem> = HashSet::from([id.clone()]);
    let mut elems = vec![id.clone()];
    let mut gens: Vec<AffineElem> = Vec::new();
    for s in set {
        if group.contains(s) {
            continue;
        }
        gens.push(s.clone());
        // old elements are already closed under the old generators, so they
        // only need the new one; new elements need all of them
        let old_len = elems.len();
        let mut i = 0;
        while i < elems.len() {
            let using: &[AffineElem] = if i < old_len {
                std::slice::from_ref(gens.last().unwrap())
            } else {
                &gens
            };
            for g in using {
                let p = &elems[i] * g;
                if !group.contains(&p) {
                    if !members.contains(&p) {
                        return Ok(RegularityVerdict::NotClosed {
                            left: elems[i].clone(),
                            right: g.clone(),
                        });
                    }
                    group.insert(p.clone());
                    elems.push(p);
                }
            }
            i += 1;
        }
    }
    if !members.contains(&id) && !set.is_empty() {
        // a nonempty closed finite set contains the identity, so this cannot
        // happen once closure passed; kept as a guard for the empty set
        return Ok(RegularityVerdict::WrongOrder {
            found: members.len() as u64,
            expected,
        });
    }
    let found = members.len() as u64;
    if found != expected {
        return Ok(RegularityVerdict::WrongOrder { found, expected });
    }
    let mut rows: HashMap<&[FieldValue], &AffineElem> = HashMap::with_capacity(set.len());
    for g in members {
        if let Some(prev) = rows.insert(g.vector_part(), g) {
            return Ok(RegularityVerdict::RepeatedFirstRow {
                first: prev.clone(),
                second: g.clone(),
            });
        }
    }
    Ok(RegularityVerdict::Regular)
}

/// `S ∩ Tr` for an explicit set.
pub fn translation_subgroup(set: &[AffineElem]) -> Vec<AffineElem> {
    set.iter().filter(|g| g.is_translation()).cloned().collect()
}

/// `R ∩ Tr` for a description over a finite field. A translation needs
/// `Jvᵀ⊗d = 0`, which forces `v = 0`, so only the `q^k` elements `r(0, a)`
/// are scanned.
pub fn translation_subgroup_desc(desc: &RegularSubgroupDesc) -> Result<Vec<AffineElem>> {
    let (m, k) = desc.split();
    let zero = vec![desc.field().zero(); m];
    let mut out = Vec::new();
    for a in desc.field().vectors(k)? {
        let g = desc.r_element(&zero, &a)?;
        if g.is_translation() {
            out.push(g);
        }
    }
    Ok(out)
}

/// `R ∩ Tr` by scanning all `q^n` elements.
pub fn translation_subgroup_bruteforce(desc: &RegularSubgroupDesc) -> Result<Vec<AffineElem>> {
    Ok(desc.elements()?.filter(|g| g.is_translation()).collect())
}

/// `w ↦ r(0, w)` maps span(W) bijectively and additively onto `R ∩ Tr`.
pub fn translations_match_w(desc: &RegularSubgroupDesc) -> Result<bool> {
    let f = desc.field();
    let (m, _) = desc.split();
    let zero = vec![f.zero(); m];
    let span = desc.w().span()?;
    let image: Vec<AffineElem> = span
        .iter()
        .map(|w| desc.r_element(&zero, w))
        .collect::<Result<_>>()?;
    let image_set: HashSet<&AffineElem> = image.iter().collect();
    let found: HashSet<AffineElem> = translation_subgroup_desc(desc)?.into_iter().collect();
    if image_set.len() != span.len() || image_set.len() != found.len() {
        return Ok(false);
    }
    if !image.iter().all(|g| found.contains(g)) {
        return Ok(false);
    }
    for (w1, g1) in span.iter().zip(&image) {
        for (w2, g2) in span.iter().zip(&image) {
            let sum: Vec<FieldValue> = w1.iter().zip(w2).map(|(x, y)| f.add(x, y)).collect();
            if g1 * g2 != desc.r_element(&zero, &sum)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// How closure was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureMode {
    Exhaustive,
    Sampled { seed: u64, trials: usize },
}

impl fmt::Display for ClosureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureMode::Exhaustive => write!(f, "exhaustive"),
            ClosureMode::Sampled { seed, trials } => write!(f, "sampled(seed={seed}, trials={trials})"),
        }
    }
}

/// A failed check and the smallest evidence found for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `r(x)·r(y)` differs from the element with the product's first row.
    ProductEscapes { left: Vec<FieldValue>, right: Vec<FieldValue> },
    /// `r(x)` does not have first row `(1, x)`.
    FirstRow { point: Vec<FieldValue> },
    /// The generators reach only this many elements.
    Generates { reached: u64, expected: u64 },
    NotUnipotent { point: Vec<FieldValue> },
    Hom(HomFailure),
    UnexpectedTranslation { point: Vec<FieldValue> },
    TranslationsMismatch,
}

impl Witness {
    pub fn describe(&self, field: &Field) -> String {
        let v = |x: &[FieldValue]| format!("({})", encode_vector(field, x));
        match self {
            Witness::ProductEscapes { left, right } => {
                format!("closure: r{} * r{} is not r at its first row", v(left), v(right))
            }
            Witness::FirstRow { point } => format!("regularity: r{} has the wrong first row", v(point)),
            Witness::Generates { reached, expected } => {
                format!("closure: generators reach {reached} of {expected} elements")
            }
            Witness::NotUnipotent { point } => format!("unipotency: r{} is not unipotent", v(point)),
            Witness::Hom(HomFailure::NotIdentityAtZero) => "additivity: phi(0) != I".into(),
            Witness::Hom(HomFailure::NotAdditive { a, b }) => {
                format!("additivity: phi{} phi{} != phi of the sum", v(a), v(b))
            }
            Witness::Hom(HomFailure::NotIsometry { a }) => {
                format!("isometry: phi{} does not preserve Q", v(a))
            }
            Witness::Hom(HomFailure::NotInjective { a }) => {
                format!("kernel: phi{} = I", v(a))
            }
            Witness::UnexpectedTranslation { point } => {
                format!("translations: r{} is a translation outside W", v(point))
            }
            Witness::TranslationsMismatch => "translations: R ∩ Tr does not match W".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub field: Field,
    pub n: usize,
    /// `q^n` when finite.
    pub order: Option<u64>,
    pub regular: bool,
    pub unipotent: bool,
    pub isometry: bool,
    pub additive: bool,
    /// Elements of `R ∩ Tr` found (the sampled ones over ℚ).
    pub translations: Vec<AffineElem>,
    pub w_match: bool,
    pub closure: ClosureMode,
    pub failures: Vec<Witness>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn translation_free(&self) -> bool {
        self.translations.iter().all(|g| g.is_identity())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "NO" };
        writeln!(f, "field        {}", self.field)?;
        writeln!(f, "dimension    {}", self.n)?;
        match self.order {
            Some(o) => writeln!(f, "order        {o}")?,
            None => writeln!(f, "order        infinite")?,
        }
        writeln!(f, "closure      {}", self.closure)?;
        writeln!(f, "regular      {}", yn(self.regular))?;
        writeln!(f, "unipotent    {}", yn(self.unipotent))?;
        writeln!(f, "isometries   {}", yn(self.isometry))?;
        writeln!(f, "additive     {}", yn(self.additive))?;
        writeln!(f, "|R ∩ Tr|     {}", self.translations.len())?;
        writeln!(f, "W match      {}", yn(self.w_match))?;
        for w in &self.failures {
            writeln!(f, "FAIL {}", w.describe(&self.field))?;
        }
        write!(f, "verdict      {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Every check on a description: closure, regularity, unipotency,
/// isometries, additivity and the translation part. Exhaustive when
/// `q^n ≤ 2²⁰`, otherwise [`SAMPLE_TRIALS`] random products from `seed`.
pub fn full_suite(desc: &RegularSubgroupDesc, seed: u64) -> Result<VerifyReport> {
    let field = desc.field().clone();
    let n = desc.dim();
    let order = desc.order();
    let mut failures = Vec::new();

    let exhaustive = matches!(order, Some(o) if o <= EXHAUSTIVE_LIMIT);
    let (closure, regular, unipotent) = if exhaustive {
        sweep(desc, &mut failures)?
    } else {
        sample(desc, seed, &mut failures)?
    };

    let additive = match desc.hom().check_additive(seed) {
        Ok(_) => true,
        Err(e) => {
            failures.push(Witness::Hom(e));
            false
        }
    };
    let isometry = match desc.hom().check_isometries(desc.form(), seed) {
        Ok(_) => true,
        Err(e) => {
            failures.push(Witness::Hom(e));
            false
        }
    };

    let (translations, w_match) = if field.is_finite() {
        let found = translation_subgroup_desc(desc)?;
        let ok = translations_match_w(desc)?;
        if !ok {
            failures.push(Witness::TranslationsMismatch);
        }
        (found, ok)
    } else {
        // only W = {0} over ℚ: no sampled r(0, a) with a ≠ 0 is a translation
        let (m, k) = desc.split();
        let zero = vec![field.zero(); m];
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7472);
        let mut ok = true;
        for _ in 0..SAMPLE_TRIALS {
            let a: Vec<FieldValue> = (0..k).map(|_| field.random(&mut rng)).collect();
            if a.iter().all(|x| field.is_zero(x)) {
                continue;
            }
            if desc.r_element(&zero, &a)?.is_translation() {
                failures.push(Witness::UnexpectedTranslation {
                    point: zero.iter().chain(&a).cloned().collect(),
                });
                ok = false;
                break;
            }
        }
        (vec![AffineElem::identity(&field, n)], ok)
    };

    Ok(VerifyReport {
        field,
        n,
        order,
        regular,
        unipotent,
        isometry,
        additive,
        translations,
        w_match,
        closure,
        failures,
    })
}

/// Exhaustive pass. For every point x and generator g, `r(x)·g` must be the
/// element at its own first row; this makes the set closed under right
/// multiplication by the generators, and a breadth-first walk from the
/// identity over those edges must then reach all `q^n` points.
fn sweep(desc: &RegularSubgroupDesc, failures: &mut Vec<Witness>) -> Result<(ClosureMode, bool, bool)> {
    let field = desc.field();
    let n = desc.dim();
    let total = desc.order().expect("finite");
    let gens = desc.generators();
    let gen_points: Vec<Vec<FieldValue>> = gens.iter().map(|g| g.vector_part().to_vec()).collect();

    struct Row {
        edges: Vec<u64>,
        first_row_ok: bool,
        unipotent: bool,
        escape: Option<usize>,
    }
    let rows: Vec<Row> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let x = field.vector_at(idx, n);
            let r = desc.element_at_point(&x).expect("valid point");
            let first_row_ok = r.vector_part() == x.as_slice();
            let unipotent = r.is_unipotent();
            let mut edges = Vec::with_capacity(gens.len());
            let mut escape = None;
            for (gi, g) in gens.iter().enumerate() {
                let p = &r * g;
                let target = desc.element_at_point(p.vector_part()).expect("valid point");
                if p != target && escape.is_none() {
                    escape = Some(gi);
                }
                edges.push(field.vector_index(p.vector_part()));
            }
            Row {
                edges,
                first_row_ok,
                unipotent,
                escape,
            }
        })
        .collect();

    let mut regular = true;
    let mut unipotent = true;
    let mut closed = true;
    for (idx, row) in rows.iter().enumerate() {
        let point = || field.vector_at(idx as u64, n);
        if !row.first_row_ok && regular {
            regular = false;
            failures.push(Witness::FirstRow { point: point() });
        }
        if !row.unipotent && unipotent {
            unipotent = false;
            failures.push(Witness::NotUnipotent { point: point() });
        }
        if let (Some(gi), true) = (row.escape, closed) {
            closed = false;
            failures.push(Witness::ProductEscapes {
                left: point(),
                right: gen_points[gi].clone(),
            });
        }
    }
    if closed {
        let mut seen = vec![false; total as usize];
        let start = 0usize; // the zero point, where r is the identity
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1u64;
        while let Some(i) = queue.pop_front() {
            for &j in &rows[i].edges {
                let j = j as usize;
                if !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    queue.push_back(j);
                }
            }
        }
        if reached != total {
            closed = false;
            failures.push(Witness::Generates {
                reached,
                expected: total,
            });
        }
    }
    Ok((ClosureMode::Exhaustive, regular && closed, unipotent))
}

/// Sampled pass: random pairs `(x, y)` with `r(x)·r(y) = r(first row)`,
/// plus first-row and unipotency checks on the sampled elements.
fn sample(desc: &RegularSubgroupDesc, seed: u64, failures: &mut Vec<Witness>) -> Result<(ClosureMode, bool, bool)> {
    let field = desc.field();
    let n = desc.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Vec<FieldValue>, Vec<FieldValue>)> = (0..SAMPLE_TRIALS)
        .map(|_| {
            let x = (0..n).map(|_| field.random(&mut rng)).collect();
            let y = (0..n).map(|_| field.random(&mut rng)).collect();
            (x, y)
        })
        .collect();
    let mut closed = true;
    let mut regular = true;
    let mut unipotent = true;
    for (x, y) in &pairs {
        let rx = desc.element_at_point(x)?;
        let ry = desc.element_at_point(y)?;
        if regular && rx.vector_part() != x.as_slice() {
            regular = false;
            failures.push(Witness::FirstRow { point: x.clone() });
        }
        if unipotent && !rx.is_unipotent() {
            unipotent = false;
            failures.push(Witness::NotUnipotent { point: x.clone() });
        }
        let p = &rx * &ry;
        if closed && p != desc.element_at_point(p.vector_part())? {
            closed = false;
            failures.push(Witness::ProductEscapes {
                left: x.clone(),
                right: y.clone(),
            });
        }
    }
    Ok((
        ClosureMode::Sampled {
            seed,
            trials: SAMPLE_TRIALS,
        },
        regular && closed,
        unipotent,
    ))
}

/// Verification of an explicit element set (group files without a
/// description): regularity, unipotency and the translation part.
#[derive(Clone, Debug)]
pub struct SetReport {
    pub order: u64,
    pub verdict: RegularityVerdict,
    pub unipotent: bool,
    pub translations: Vec<AffineElem>,
}

impl SetReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_regular() && self.unipotent
    }
}

pub fn verify_set(set: &[AffineElem], field: &Field, n: usize) -> Result<SetReport> {
    let verdict = check_regular(set, field, n)?;
    let unipotent = set.par_iter().all(|g| g.is_unipotent());
    Ok(SetReport {
        order: set.len() as u64,
        verdict,
        unipotent,
        translations: translation_subgroup(set),
    })
}

/// π is injective on `set`.
pub fn pi_injective(set: &[AffineElem]) -> bool {
    let lin: HashSet<_> = set.iter().map(|g| g.linear_part()).collect();
    lin.len() == set.len()
}
