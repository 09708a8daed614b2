//! One line per acceptance criterion. Exit status is nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use regaff::affine::{direct_product, AffineElem};
use regaff::construct::{build_with, hegedus_group};
use regaff::search::{
    existence_table, naive_oracle, resume, search_regular, SearchConfig, SearchMode, SearchResult,
    TableConfig,
};
use regaff::verify::{check_regular, full_suite, translation_subgroup, translation_subgroup_desc, verify_set};
use regaff::{build_rw, Field, FieldValue, HomKind, RegularSubgroupDesc, SubspaceBasis};

type Outcome = Result<String, String>;

fn gf(q: u64) -> Field {
    Field::of_order(q).unwrap()
}

fn empty_w(f: &Field, desc_k: usize) -> SubspaceBasis {
    SubspaceBasis::empty(f, desc_k)
}

fn built(f: &Field, n: usize) -> Result<RegularSubgroupDesc, String> {
    let kind = HomKind::auto(f, n).map_err(|e| e.to_string())?;
    build_with(f, n, kind, &empty_w(f, 1), None).map_err(|e| e.to_string())
}

fn add(f: &Field, u: &[FieldValue], v: &[FieldValue]) -> Vec<FieldValue> {
    u.iter().zip(v).map(|(x, y)| f.add(x, y)).collect()
}

fn closure_and_normalization(f: &Field, n: usize) -> Result<u64, String> {
    let desc = built(f, n)?;
    let (m, k) = desc.split();
    let vs: Vec<_> = f.vectors(m).unwrap().collect();
    let as_: Vec<_> = f.vectors(k).unwrap().collect();
    let ns: Vec<AffineElem> = vs.iter().map(|v| desc.n_element(v).unwrap()).collect();
    let ms: Vec<AffineElem> = as_.iter().map(|a| desc.m_element(a).unwrap()).collect();
    let mut checks = 0u64;
    for (u, nu) in vs.iter().zip(&ns) {
        for (v, nv) in vs.iter().zip(&ns) {
            if nu * nv != desc.n_element(&add(f, u, v)).unwrap() {
                return Err(format!("N closure fails over {f}, n = {n}"));
            }
            checks += 1;
        }
    }
    for (a, ma) in as_.iter().zip(&ms) {
        for (b, mb) in as_.iter().zip(&ms) {
            if ma * mb != desc.m_element(&add(f, a, b)).unwrap() {
                return Err(format!("M closure fails over {f}, n = {n}"));
            }
            checks += 1;
        }
        let phi = desc.hom().eval(a).unwrap();
        let ma_inv = ma.inverse();
        for (v, nv) in vs.iter().zip(&ns) {
            let lhs = &(&ma_inv * nv) * ma;
            let rhs = desc.n_element(&phi.left_mul_vec(v).unwrap()).unwrap();
            if lhs != rhs {
                return Err(format!("normalization fails over {f}, n = {n}"));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

fn criterion1() -> Outcome {
    let cases = [(3, 4), (5, 4), (2, 5), (4, 5), (2, 3), (2, 6), (4, 6)];
    let mut total = 0;
    for (q, n) in cases {
        total += closure_and_normalization(&gf(q), n)?;
    }
    Ok(format!("{} (q, n) cases, {total} identities, exhaustive", cases.len()))
}

fn criterion2() -> Outcome {
    let cases: Vec<(Field, usize)> = [(2, 3), (3, 4), (5, 4), (9, 4), (2, 5), (8, 5), (2, 6), (4, 6), (2, 7)]
        .into_iter()
        .map(|(q, n)| (gf(q), n))
        .chain([(Field::rational(), 4)])
        .collect();
    let mut notes = Vec::new();
    for (f, n) in &cases {
        let desc = built(f, *n)?;
        let rep = full_suite(&desc, 0).map_err(|e| e.to_string())?;
        if !rep.passed() || !rep.translation_free() || !rep.unipotent {
            return Err(format!("({f}, {n}) failed:\n{rep}"));
        }
        if let (Some(q), Some(order)) = (f.order(), desc.order()) {
            if order != q.pow(*n as u32) {
                return Err(format!("({f}, {n}) order {order}"));
            }
        }
        notes.push(format!("({f},{n}) {}", rep.closure));
    }
    Ok(notes.join(", "))
}

/// F₀-subspace of dimension `dim` spanned by 1, ω, ω², ...
fn w_of_dim(f: &Field, dim: usize) -> SubspaceBasis {
    let omega = f.omega();
    let basis = (0..dim).map(|i| vec![f.pow(&omega, i as u64)]).collect();
    SubspaceBasis::new(f, 1, basis).unwrap()
}

fn criterion3() -> Outcome {
    let mut notes = Vec::new();
    for (q, n) in [(8u64, 5usize), (9, 4)] {
        let f = gf(q);
        let p = f.characteristic() as u64;
        let ell = f.degree().unwrap() as usize;
        for dim in 0..=ell {
            let w = w_of_dim(&f, dim);
            let desc = build_rw(&f, n, &w).map_err(|e| e.to_string())?;
            let trs = translation_subgroup_desc(&desc).map_err(|e| e.to_string())?;
            let want = p.pow(dim as u32);
            if trs.len() as u64 != want {
                return Err(format!("GF({q}) dim W {dim}: |R ∩ Tr| = {}, expected {want}", trs.len()));
            }
            // w ↦ r(0, w): injective, additive, onto the translations of R
            let span = w.span().map_err(|e| e.to_string())?;
            let zero = vec![f.zero(); n - 1];
            let image: Vec<AffineElem> = span.iter().map(|a| desc.r_element(&zero, a).unwrap()).collect();
            let distinct: BTreeSet<String> = image.iter().map(|g| g.matrix().encode()).collect();
            let onto: BTreeSet<String> = trs.iter().map(|g| g.matrix().encode()).collect();
            if distinct.len() != span.len() || distinct != onto {
                return Err(format!("GF({q}) dim W {dim}: w ↦ r(0, w) is not a bijection onto R ∩ Tr"));
            }
            for (a, ra) in span.iter().zip(&image) {
                for (b, rb) in span.iter().zip(&image) {
                    if ra * rb != desc.r_element(&zero, &add(&f, a, b)).unwrap() {
                        return Err(format!("GF({q}) dim W {dim}: map is not additive"));
                    }
                }
            }
        }
        notes.push(format!("GF({q}) n={n} dim W 0..={ell}"));
    }
    Ok(notes.join(", "))
}

fn criterion4() -> Outcome {
    let g = hegedus_group();
    let f = g[0].field().clone();
    let verdict = check_regular(&g, &f, 3).map_err(|e| e.to_string())?;
    let trs = translation_subgroup(&g).len();
    if g.len() != 8 || !verdict.is_regular() || trs != 1 {
        return Err(format!("order {}, {verdict}, |R ∩ Tr| = {trs}", g.len()));
    }
    Ok("order 8, regular, |R ∩ Tr| = 1".into())
}

fn tf_search(n: usize, f: &Field) -> Result<SearchResult, String> {
    let r = search_regular(n, f, &SearchConfig::new(SearchMode::FindTranslationFree)).map_err(|e| e.to_string())?;
    if !r.complete() {
        return Err(format!("({n}, {f}) did not finish within the default budget"));
    }
    Ok(r)
}

fn group_key(g: &[AffineElem]) -> BTreeSet<String> {
    g.iter().map(|e| e.matrix().encode()).collect()
}

fn criterion5() -> Outcome {
    let mut none = Vec::new();
    for (n, q) in [(1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (2, 4), (2, 5), (3, 3)] {
        let f = gf(q);
        let r = tf_search(n, &f)?;
        if r.translation_free != 0 {
            return Err(format!("({n}, {q}): {} translation-free groups", r.translation_free));
        }
        none.push(format!("({n},{q})"));
    }
    let f2 = gf(2);
    let r = tf_search(3, &f2)?;
    if r.translation_free == 0 {
        return Err("(3, 2): no translation-free witness".into());
    }
    for g in r.group_elements().map_err(|e| e.to_string())? {
        let rep = verify_set(&g, &f2, 3).map_err(|e| e.to_string())?;
        if !rep.passed() || rep.translations.len() != 1 {
            return Err("(3, 2): a witness fails verification".into());
        }
    }

    // (2, 2): the derived count is 2 regular subgroups of unitriangular shape
    let all = search_regular(2, &f2, &SearchConfig::new(SearchMode::EnumerateAll)).map_err(|e| e.to_string())?;
    let oracle = naive_oracle(2, &f2).map_err(|e| e.to_string())?;
    let searched: BTreeSet<_> = all.group_elements().map_err(|e| e.to_string())?.iter().map(|g| group_key(g)).collect();
    let brute: BTreeSet<_> = oracle.unitriangular.iter().map(|g| group_key(g)).collect();
    if searched != brute {
        return Err(format!("(2, 2): search {} groups, oracle {}", searched.len(), brute.len()));
    }
    if searched.len() != 2 {
        return Err(format!("(2, 2): {} regular subgroups, derived count is 2", searched.len()));
    }
    Ok(format!(
        "NONE on {}; (3,2) {} witnesses; (2,2) search = oracle = 2 groups",
        none.join(" "),
        r.translation_free
    ))
}

/// Interrupt every `slice` nodes, round-trip the checkpoint through text, and resume.
fn chunked(n: usize, f: &Field, slice: u64) -> Result<(SearchResult, usize), String> {
    let cfg = SearchConfig::new(SearchMode::FindTranslationFree).budget(slice);
    let mut cur = search_regular(n, f, &cfg).map_err(|e| e.to_string())?;
    let mut stops = 0;
    while let Some(cp) = cur.checkpoint.clone() {
        let cp = regaff::search::Checkpoint::decode(&cp.encode()).map_err(|e| e.to_string())?;
        cur = resume(&cp, &cfg).map_err(|e| e.to_string())?;
        stops += 1;
    }
    Ok((cur, stops))
}

fn criterion6() -> Outcome {
    let mut notes = Vec::new();
    for (n, q, slice) in [(4usize, 2u64, 10_000u64), (3, 4, 400_000)] {
        let f = gf(q);
        let full = tf_search(n, &f)?;
        let (parts, stops) = chunked(n, &f, slice)?;
        if !parts.same_outcome(&full) {
            return Err(format!("({n}, {q}): resumed run differs from the uninterrupted one"));
        }
        if full.translation_free != 0 {
            return Err(format!("({n}, {q}): {} translation-free groups", full.translation_free));
        }
        notes.push(format!("({n},{q}) NONE, {} nodes, {stops} resumes", full.nodes));
    }
    Ok(notes.join("; "))
}

fn criterion7() -> Outcome {
    let f = gf(4);
    let desc = built(&f, 6)?;
    let rep = full_suite(&desc, 0).map_err(|e| e.to_string())?;
    if !rep.passed() || !rep.translation_free() {
        return Err(format!("GF(4) n = 6 failed:\n{rep}"));
    }
    let r = tf_search(3, &f)?;
    if r.translation_free != 0 {
        return Err("(3, 4) has translation-free groups".into());
    }
    let cfg = TableConfig {
        max_points: 64,
        ..TableConfig::default()
    };
    let rows = existence_table(6, std::slice::from_ref(&f), &cfg).map_err(|e| e.to_string())?;
    let note = regaff::search::direct_product_note(&rows).ok_or("no direct-product remark")?;
    println!("    {note}");
    Ok("(6,4) translation-free, exhaustive; (3,4) NONE by search".into())
}

fn criterion8() -> Outcome {
    let h = hegedus_group();
    let prod = direct_product(&h, &h).map_err(|e| e.to_string())?;
    let f = prod[0].field().clone();
    let rep = verify_set(&prod, &f, 6).map_err(|e| e.to_string())?;
    if prod.len() != 64 || !rep.passed() || rep.translations.len() != 1 {
        return Err(format!("order {}, {:?}", prod.len(), rep.verdict));
    }
    Ok("order 64 in AGL_6(2), regular, unipotent, |R ∩ Tr| = 1".into())
}

fn run_random(name: &str, check: fn(&Field, u64) -> common::Check) -> Result<(), String> {
    for f in common::random_fields() {
        let config = Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        };
        let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
        let mut runner = TestRunner::new_with_rng(config, rng);
        runner
            .run(&proptest::num::u64::ANY, |seed| {
                check(&f, seed).map_err(proptest::test_runner::TestCaseError::fail)
            })
            .map_err(|e| format!("{name} over {f}: {e}"))?;
    }
    Ok(())
}

fn criterion9() -> Outcome {
    for f in common::small_fields() {
        common::field_axioms_exhaustive(&f)?;
    }
    common::polar_identity_exhaustive(&gf(2), 3)?;
    common::polar_identity_exhaustive(&gf(3), 2)?;
    common::polar_identity_exhaustive(&gf(4), 2)?;
    common::isometry_closure_exhaustive(&common::sweep_form(&gf(2), 3))?;
    common::isometry_closure_exhaustive(&common::sweep_form(&gf(3), 3))?;
    common::isometry_closure_exhaustive(&common::sweep_form(&gf(4), 2))?;
    common::product_laws_exhaustive(&gf(2), 2)?;
    common::product_laws_exhaustive(&gf(3), 1)?;
    common::product_laws_exhaustive(&gf(4), 1)?;
    run_random("field axioms", common::field_axioms_random)?;
    run_random("polar identity", common::polar_identity_random)?;
    run_random("isometry closure", common::isometry_closure_random)?;
    run_random("product laws", common::product_laws_random)?;
    Ok("5 properties, exhaustive sweeps + 1000 cases each over GF(9) and Q".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("N/M closure and normalization identities", criterion1),
        ("positive cases regular, unipotent, translation-free", criterion2),
        ("translation intersection equals W", criterion3),
        ("two-generator AGL_3(2) group", criterion4),
        ("nonexistence by exhaustive search", criterion5),
        ("stretch searches with checkpoint/resume", criterion6),
        ("GF(4) n = 6 versus direct products from n = 3", criterion7),
        ("direct product of two AGL_3(2) groups", criterion8),
        ("property suites", criterion9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
