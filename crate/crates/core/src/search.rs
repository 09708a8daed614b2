//! Exhaustive search for regular subgroups of AGL_n(q) of unitriangular
//! shape, i.e. subgroups of `U_{n+1}(q)`.
//!
//! In positive characteristic every regular subgroup is unipotent, hence
//! conjugate into `U_{n+1}(q)`; Tr is normal, so conjugation preserves
//! whether the subgroup meets Tr trivially. A translation-free regular
//! subgroup exists iff one of unitriangular shape does, and that is what is
//! enumerated here.
//!
//! A regular subgroup of this shape is the same as a map `A: F^n → U_n(q)`
//! with `A(0) = I` and `A(w + u·A(w)) = A(u)·A(w)` for all `u, w`. The map is
//! built point by point in lexicographic order, each choice is closed under
//! the product law, and conflicts prune the branch.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::affine::AffineElem;
use crate::construct::{build_rw, hegedus_group};
use crate::error::{Error, Result};
use crate::field::{Field, FieldValue, GaloisField};
use crate::linalg::Mat;
use crate::quadform::SubspaceBasis;
use crate::verify::{check_regular, full_suite};

/// Default cap on the number of points `q^n`.
pub const DEFAULT_MAX_POINTS: u64 = 64;

/// Default node budget.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchMode {
    EnumerateAll,
    FindTranslationFree,
}

impl SearchMode {
    pub fn name(self) -> &'static str {
        match self {
            SearchMode::EnumerateAll => "enumerate_all",
            SearchMode::FindTranslationFree => "find_translation_free",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<SearchMode> {
        match s {
            "enumerate_all" | "all" => Ok(SearchMode::EnumerateAll),
            "find_translation_free" | "tf" => Ok(SearchMode::FindTranslationFree),
            _ => Err(Error::Unsupported(format!("unknown search mode `{s}`"))),
        }
    }
}

/// Strictly-upper positions `(i, j)`, row-major.
fn upper_positions(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Product of two unitriangular GF(2) matrices given as candidate indices
/// (strictly-upper bits row-major, first entry in the most significant
/// bit). Rows are packed into words and combined by XOR.
pub fn gf2_unitri_mul(n: usize, a: u64, b: u64) -> u64 {
    let pos = upper_positions(n);
    let e = pos.len();
    let unpack = |x: u64| -> Vec<u64> {
        let mut rows: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for (k, &(i, j)) in pos.iter().enumerate() {
            if x >> (e - 1 - k) & 1 == 1 {
                rows[i] |= 1 << j;
            }
        }
        rows
    };
    let (ra, rb) = (unpack(a), unpack(b));
    let mut out = 0u64;
    for (k, &(i, j)) in pos.iter().enumerate() {
        let mut row = 0u64;
        let mut bits = ra[i];
        while bits != 0 {
            let t = bits.trailing_zeros() as usize;
            row ^= rb[t];
            bits &= bits - 1;
        }
        if row >> j & 1 == 1 {
            out |= 1 << (e - 1 - k);
        }
    }
    out
}

/// Cayley data for `U_n(q)` acting on `F^n`.
pub struct Tables {
    field: Field,
    n: usize,
    npoints: usize,
    ncand: usize,
    /// `mul[a·ncand + b]` = index of `A_a · A_b`.
    mul: Vec<u32>,
    /// `act[x·ncand + c]` = index of `x · A_c`.
    act: Vec<u32>,
    /// `add[x·npoints + y]` = index of `x + y`.
    add: Vec<u32>,
}

impl Tables {
    pub fn new(field: &Field, n: usize) -> Result<Tables> {
        let gf = field
            .galois_field()
            .ok_or(Error::RationalUnsupported("search"))?;
        let q = gf.order() as u64;
        let npoints = q
            .checked_pow(n as u32)
            .filter(|&x| x <= 1 << 16)
            .ok_or_else(|| Error::Unsupported(format!("{q}^{n} points")))? as usize;
        let pos = upper_positions(n);
        let ncand = q
            .checked_pow(pos.len() as u32)
            .filter(|&x| x <= 1 << 12)
            .ok_or_else(|| Error::Unsupported(format!("|U_{n}({q})| too large")))?
            as usize;
        let cands: Vec<Vec<u32>> = (0..ncand).map(|c| unitri_entries(gf, n, &pos, c)).collect();
        let index_of = |m: &[u32]| -> u32 {
            pos.iter()
                .fold(0u64, |acc, &(i, j)| acc * q + m[i * n + j] as u64) as u32
        };
        let mul: Vec<u32> = if gf.p() == 2 && gf.ell() == 1 {
            (0..ncand * ncand)
                .map(|ab| gf2_unitri_mul(n, (ab / ncand) as u64, (ab % ncand) as u64) as u32)
                .collect()
        } else {
            (0..ncand * ncand)
                .into_par_iter()
                .map(|ab| index_of(&mat_mul_raw(gf, n, &cands[ab / ncand], &cands[ab % ncand])))
                .collect()
        };
        let points: Vec<Vec<u32>> = (0..npoints)
            .map(|x| {
                field
                    .vector_at(x as u64, n)
                    .iter()
                    .map(|v| v.code().unwrap())
                    .collect()
            })
            .collect();
        let point_index = |v: &[u32]| v.iter().fold(0u64, |acc, &c| acc * q + c as u64) as u32;
        let act: Vec<u32> = (0..npoints * ncand)
            .into_par_iter()
            .map(|xc| {
                let (x, c) = (&points[xc / ncand], &cands[xc % ncand]);
                let mut out = vec![0u32; n];
                for (j, o) in out.iter_mut().enumerate() {
                    for (i, &xi) in x.iter().enumerate().take(j + 1) {
                        *o = gf.add_raw(*o, gf.mul_raw(xi, c[i * n + j]));
                    }
                }
                point_index(&out)
            })
            .collect();
        let add: Vec<u32> = (0..npoints * npoints)
            .into_par_iter()
            .map(|xy| {
                let (x, y) = (&points[xy / npoints], &points[xy % npoints]);
                let s: Vec<u32> = x.iter().zip(y).map(|(&a, &b)| gf.add_raw(a, b)).collect();
                point_index(&s)
            })
            .collect();
        Ok(Tables {
            field: field.clone(),
            n,
            npoints,
            ncand,
            mul,
            act,
            add,
        })
    }

    pub fn num_points(&self) -> usize {
        self.npoints
    }

    pub fn num_candidates(&self) -> usize {
        self.ncand
    }

    /// The candidate matrix with index `c`.
    pub fn candidate(&self, c: u32) -> Mat {
        let gf = self.field.galois_field().unwrap();
        let entries = unitri_entries(gf, self.n, &upper_positions(self.n), c as usize);
        let data = entries.into_iter().map(FieldValue::Finite).collect();
        Mat::from_vec(&self.field, self.n, self.n, data).unwrap()
    }

    /// Point `w + u·A_c`, the first row of `(u, ·)·(w, A_c)`.
    #[inline]
    fn product_point(&self, u: u32, w: u32, aw: u32) -> u32 {
        let ua = self.act[u as usize * self.ncand + aw as usize];
        self.add[w as usize * self.npoints + ua as usize]
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.ncand + b as usize]
    }

    /// The element set of a complete map.
    pub fn elements(&self, map: &[u32]) -> Vec<AffineElem> {
        map.iter()
            .enumerate()
            .map(|(x, &c)| {
                let v = self.field.vector_at(x as u64, self.n);
                AffineElem::new(&v, &self.candidate(c)).expect("unitriangular")
            })
            .collect()
    }
}

fn unitri_entries(gf: &GaloisField, n: usize, pos: &[(usize, usize)], mut c: usize) -> Vec<u32> {
    let q = gf.order() as usize;
    let mut m = vec![0u32; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    for &(i, j) in pos.iter().rev() {
        m[i * n + j] = (c % q) as u32;
        c /= q;
    }
    m
}

fn mat_mul_raw(gf: &GaloisField, n: usize, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = gf.add_raw(out[i * n + j], gf.mul_raw(x, b[k * n + j]));
            }
        }
    }
    out
}

/// Saved position of an interrupted search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub field: Field,
    pub n: usize,
    pub mode: SearchMode,
    pub nodes: u64,
    pub total: u64,
    pub translation_free: u64,
    pub groups: Vec<Vec<u32>>,
    /// Choices `(point, candidate)` on the current branch, outermost first.
    pub frames: Vec<(u32, u32)>,
    /// Where to continue: candidate `next.1` at point `next.0`.
    pub next: (u32, u32),
}

impl Checkpoint {
    pub fn encode(&self) -> String {
        let mut s = String::from("REGAFF v1\n");
        s.push_str(&self.field.header());
        s.push('\n');
        s.push_str(&format!("CHECKPOINT {} {}\n", self.n, self.mode));
        s.push_str("ORDER lex\n");
        s.push_str(&format!("NODES {}\n", self.nodes));
        s.push_str(&format!("FOUND {} {}\n", self.total, self.translation_free));
        for g in &self.groups {
            let parts: Vec<String> = g.iter().map(|c| c.to_string()).collect();
            s.push_str(&format!("GROUP {}\n", parts.join(",")));
        }
        for (p, c) in &self.frames {
            s.push_str(&format!("FRAME {p} {c}\n"));
        }
        s.push_str(&format!("NEXT {} {}\n", self.next.0, self.next.1));
        s
    }

    pub fn decode(text: &str) -> Result<Checkpoint> {
        let mut field = None;
        let mut head = None;
        let mut nodes = None;
        let mut found = None;
        let mut groups = Vec::new();
        let mut frames = Vec::new();
        let mut next = None;
        let mut saw_version = false;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::parse(lineno, format!("{msg}: `{line}`"));
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |k: usize| -> Result<u64> {
                toks.get(k)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("expected a number"))
            };
            match toks[0] {
                "REGAFF" => {
                    if toks.get(1) != Some(&"v1") {
                        return Err(bad("unsupported version"));
                    }
                    saw_version = true;
                }
                "FIELD" => {
                    field = Some(Field::parse_header(line).map_err(|e| bad(&e.to_string()))?)
                }
                "CHECKPOINT" => {
                    let mode = toks
                        .get(2)
                        .ok_or_else(|| bad("missing mode"))?
                        .parse::<SearchMode>()
                        .map_err(|_| bad("unknown mode"))?;
                    head = Some((num(1)? as usize, mode));
                }
                "ORDER" => {
                    if toks.get(1) != Some(&"lex") {
                        return Err(bad("unsupported point order"));
                    }
                }
                "NODES" => nodes = Some(num(1)?),
                "FOUND" => found = Some((num(1)?, num(2)?)),
                "GROUP" => {
                    let g = toks
                        .get(1)
                        .ok_or_else(|| bad("empty group"))?
                        .split(',')
                        .map(|t| t.parse::<u32>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad("bad group map"))?;
                    groups.push(g);
                }
                "FRAME" => frames.push((num(1)? as u32, num(2)? as u32)),
                "NEXT" => next = Some((num(1)? as u32, num(2)? as u32)),
                _ => return Err(bad("unknown record")),
            }
        }
        let missing = |what: &str| Error::parse(0, format!("checkpoint lacks {what}"));
        if !saw_version {
            return Err(missing("the REGAFF v1 line"));
        }
        let (n, mode) = head.ok_or_else(|| missing("CHECKPOINT"))?;
        let (total, translation_free) = found.ok_or_else(|| missing("FOUND"))?;
        Ok(Checkpoint {
            field: field.ok_or_else(|| missing("FIELD"))?,
            n,
            mode,
            nodes: nodes.ok_or_else(|| missing("NODES"))?,
            total,
            translation_free,
            groups,
            frames,
            next: next.ok_or_else(|| missing("NEXT"))?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Stop after this many nodes (single-threaded only).
    pub budget: Option<u64>,
    pub threads: usize,
    pub max_points: u64,
}

impl SearchConfig {
    pub fn new(mode: SearchMode) -> SearchConfig {
        SearchConfig {
            mode,
            budget: None,
            threads: 1,
            max_points: DEFAULT_MAX_POINTS,
        }
    }

    pub fn budget(mut self, nodes: u64) -> SearchConfig {
        self.budget = Some(nodes);
        self
    }

    pub fn threads(mut self, threads: usize) -> SearchConfig {
        self.threads = threads.max(1);
        self
    }

    pub fn max_points(mut self, max: u64) -> SearchConfig {
        self.max_points = max;
        self
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub field: Field,
    pub n: usize,
    pub mode: SearchMode,
    /// Regular subgroups found (translation-free ones only in
    /// [`SearchMode::FindTranslationFree`]).
    pub total: u64,
    pub translation_free: u64,
    /// The maps `A`, indexed by point, sorted.
    pub groups: Vec<Vec<u32>>,
    pub nodes: u64,
    pub elapsed: Duration,
    /// `None` when the search ran to the end.
    pub checkpoint: Option<Checkpoint>,
}

impl SearchResult {
    pub fn complete(&self) -> bool {
        self.checkpoint.is_none()
    }

    /// Element sets of the groups found.
    pub fn group_elements(&self) -> Result<Vec<Vec<AffineElem>>> {
        let t = Tables::new(&self.field, self.n)?;
        Ok(self.groups.iter().map(|g| t.elements(g)).collect())
    }

    /// Everything except wall time.
    pub fn same_outcome(&self, other: &SearchResult) -> bool {
        self.field == other.field
            && self.n == other.n
            && self.mode == other.mode
            && self.total == other.total
            && self.translation_free == other.translation_free
            && self.groups == other.groups
            && self.nodes == other.nodes
            && self.checkpoint == other.checkpoint
    }
}

struct Frame {
    point: u32,
    cand: u32,
    mark: usize,
}

enum Step {
    Descend,
    Try(u32, u32, usize),
    Backtrack,
    Done,
}

struct Searcher<'t> {
    t: &'t Tables,
    tf_only: bool,
    map: Vec<u32>,
    /// Points in the order they were defined; doubles as the undo trail.
    defined: Vec<u32>,
    stack: Vec<Frame>,
    floor: usize,
    nodes: u64,
    total: u64,
    translation_free: u64,
    groups: Vec<Vec<u32>>,
}

impl<'t> Searcher<'t> {
    fn new(t: &'t Tables, mode: SearchMode) -> Searcher<'t> {
        let mut map = vec![NONE; t.npoints];
        map[0] = 0;
        Searcher {
            t,
            tf_only: mode == SearchMode::FindTranslationFree,
            map,
            defined: vec![0],
            stack: Vec::new(),
            floor: 0,
            nodes: 0,
            total: 0,
            translation_free: 0,
            groups: Vec::new(),
        }
    }

    fn undo(&mut self, mark: usize) {
        for &p in &self.defined[mark..] {
            self.map[p as usize] = NONE;
        }
        self.defined.truncate(mark);
    }

    #[inline]
    fn define(&mut self, p: u32, c: u32) -> bool {
        let cur = self.map[p as usize];
        if cur == NONE {
            if self.tf_only && c == 0 && p != 0 {
                return false;
            }
            self.map[p as usize] = c;
            self.defined.push(p);
            true
        } else {
            cur == c
        }
    }

    /// Sets `A(p) = c` and closes the defined set under products.
    fn assign(&mut self, p: u32, c: u32) -> bool {
        let start = self.defined.len();
        if !self.define(p, c) {
            return false;
        }
        let mut i = start;
        while i < self.defined.len() {
            let x = self.defined[i];
            let ax = self.map[x as usize];
            for j in 0..=i {
                let y = self.defined[j];
                let ay = self.map[y as usize];
                let t1 = self.t.product_point(x, y, ay);
                if !self.define(t1, self.t.mul(ax, ay)) {
                    return false;
                }
                if j != i {
                    let t2 = self.t.product_point(y, x, ax);
                    if !self.define(t2, self.t.mul(ay, ax)) {
                        return false;
                    }
                }
            }
            i += 1;
        }
        true
    }

    fn first_undefined(&self) -> Option<u32> {
        self.map.iter().position(|&c| c == NONE).map(|p| p as u32)
    }

    fn record(&mut self) {
        let tf = self.map[1..].iter().all(|&c| c != 0);
        self.total += 1;
        if tf {
            self.translation_free += 1;
        }
        self.groups.push(self.map.clone());
    }

    fn first_candidate(&self) -> u32 {
        u32::from(self.tf_only)
    }

    /// Runs until the subtree above `floor` is exhausted or the budget
    /// runs out; on exhaustion returns the resume position.
    fn run(&mut self, mut step: Step, budget: Option<u64>) -> Option<(u32, u32)> {
        let limit = budget.map(|b| self.nodes.saturating_add(b));
        loop {
            step = match step {
                Step::Descend => match self.first_undefined() {
                    Some(p) => Step::Try(p, self.first_candidate(), self.defined.len()),
                    None => {
                        self.record();
                        Step::Backtrack
                    }
                },
                Step::Try(p, c0, mark) => {
                    let mut next = Step::Backtrack;
                    for c in c0..self.t.ncand as u32 {
                        if self.tf_only && c == 0 {
                            continue;
                        }
                        if limit.is_some_and(|l| self.nodes >= l) {
                            return Some((p, c));
                        }
                        self.nodes += 1;
                        if self.assign(p, c) {
                            self.stack.push(Frame { point: p, cand: c, mark });
                            next = Step::Descend;
                            break;
                        }
                        self.undo(mark);
                    }
                    next
                }
                Step::Backtrack => {
                    if self.stack.len() <= self.floor {
                        Step::Done
                    } else {
                        let f = self.stack.pop().unwrap();
                        self.undo(f.mark);
                        Step::Try(f.point, f.cand + 1, f.mark)
                    }
                }
                Step::Done => return None,
            }
        }
    }

    /// Re-applies saved choices without counting nodes.
    fn replay(&mut self, frames: &[(u32, u32)]) -> Result<()> {
        for &(p, c) in frames {
            let mark = self.defined.len();
            if p as usize >= self.t.npoints
                || c as usize >= self.t.ncand
                || self.map[p as usize] != NONE
                || !self.assign(p, c)
            {
                return Err(Error::Unsupported(format!(
                    "checkpoint frame ({p}, {c}) does not replay"
                )));
            }
            self.stack.push(Frame { point: p, cand: c, mark });
        }
        Ok(())
    }
}

fn check_size(field: &Field, n: usize, cfg: &SearchConfig) -> Result<()> {
    let q = field.order().ok_or(Error::RationalUnsupported("search"))?;
    match q.checked_pow(n as u32) {
        Some(points) if points <= cfg.max_points => Ok(()),
        _ => Err(Error::Unsupported(format!(
            "{q}^{n} points exceeds the limit of {}",
            cfg.max_points
        ))),
    }
}

/// Enumerates regular subgroups of unitriangular shape in AGL_n(F).
pub fn search_regular(n: usize, field: &Field, cfg: &SearchConfig) -> Result<SearchResult> {
    run_search(n, field, cfg, None)
}

/// Continues an interrupted search.
pub fn resume(cp: &Checkpoint, cfg: &SearchConfig) -> Result<SearchResult> {
    if cp.mode != cfg.mode {
        return Err(Error::Unsupported(format!(
            "checkpoint was taken in mode {}, not {}",
            cp.mode, cfg.mode
        )));
    }
    run_search(cp.n, &cp.field.clone(), cfg, Some(cp))
}

fn run_search(n: usize, field: &Field, cfg: &SearchConfig, cp: Option<&Checkpoint>) -> Result<SearchResult> {
    if n == 0 {
        return Err(Error::Dimension("n must be positive".into()));
    }
    check_size(field, n, cfg)?;
    if cfg.threads > 1 && (cfg.budget.is_some() || cp.is_some()) {
        return Err(Error::Unsupported(
            "a node budget or checkpoint needs a single thread".into(),
        ));
    }
    let started = Instant::now();
    let t = Tables::new(field, n)?;
    let mut result = SearchResult {
        field: field.clone(),
        n,
        mode: cfg.mode,
        total: 0,
        translation_free: 0,
        groups: Vec::new(),
        nodes: 0,
        elapsed: Duration::ZERO,
        checkpoint: None,
    };
    if t.npoints == 1 {
        result.total = 1;
        result.translation_free = 1;
        result.groups.push(vec![0]);
        result.elapsed = started.elapsed();
        return Ok(result);
    }
    if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Unsupported(e.to_string()))?;
        let parts: Vec<Searcher> = pool.install(|| {
            (0..t.ncand as u32)
                .into_par_iter()
                .filter_map(|c| {
                    let mut s = Searcher::new(&t, cfg.mode);
                    if s.tf_only && c == 0 {
                        return None;
                    }
                    let p = s.first_undefined().unwrap();
                    s.nodes = 1;
                    if !s.assign(p, c) {
                        return Some(s);
                    }
                    s.stack.push(Frame { point: p, cand: c, mark: 1 });
                    s.floor = 1;
                    s.run(Step::Descend, None);
                    Some(s)
                })
                .collect()
        });
        for s in parts {
            result.nodes += s.nodes;
            result.total += s.total;
            result.translation_free += s.translation_free;
            result.groups.extend(s.groups);
        }
    } else {
        let mut s = Searcher::new(&t, cfg.mode);
        let step = match cp {
            Some(cp) => {
                if cp.field != *field || cp.n != n {
                    return Err(Error::Unsupported("checkpoint is for a different search".into()));
                }
                s.replay(&cp.frames)?;
                s.nodes = cp.nodes;
                s.total = cp.total;
                s.translation_free = cp.translation_free;
                s.groups = cp.groups.clone();
                let mark = s.defined.len();
                Step::Try(cp.next.0, cp.next.1, mark)
            }
            None => Step::Descend,
        };
        let stopped = s.run(step, cfg.budget);
        result.nodes = s.nodes;
        result.total = s.total;
        result.translation_free = s.translation_free;
        result.checkpoint = stopped.map(|next| Checkpoint {
            field: field.clone(),
            n,
            mode: cfg.mode,
            nodes: s.nodes,
            total: s.total,
            translation_free: s.translation_free,
            groups: s.groups.clone(),
            frames: s.stack.iter().map(|f| (f.point, f.cand)).collect(),
            next,
        });
        result.groups = s.groups;
    }
    if result.checkpoint.is_none() {
        result.groups.sort();
    }
    result.elapsed = started.elapsed();
    Ok(result)
}

/// Brute-force reference: every regular subgroup of AGL_n(q), found by
/// growing subgroups one generator at a time inside the full group.
#[derive(Clone, Debug)]
pub struct OracleResult {
    /// All regular subgroups, each as a sorted element list.
    pub all: Vec<Vec<AffineElem>>,
    /// Those contained in the unitriangular group.
    pub unitriangular: Vec<Vec<AffineElem>>,
    pub translation_free: u64,
}

/// Largest `|AGL_n(q)|` the oracle accepts.
pub const ORACLE_LIMIT: usize = 4096;

fn full_affine_group(field: &Field, n: usize) -> Result<Vec<AffineElem>> {
    let q = field.order().ok_or(Error::RationalUnsupported("naive oracle"))?;
    let mut order: u128 = (q as u128).pow(n as u32);
    for i in 0..n as u32 {
        order *= (q as u128).pow(n as u32) - (q as u128).pow(i);
    }
    if order > ORACLE_LIMIT as u128 {
        return Err(Error::Unsupported(format!(
            "|AGL_{n}({q})| = {order} is beyond the oracle limit {ORACLE_LIMIT}"
        )));
    }
    let mut out = Vec::new();
    let vs: Vec<_> = field.vectors(n)?.collect();
    for entries in field.vectors(n * n)? {
        let a = Mat::from_vec(field, n, n, entries)?;
        if a.det()? == field.zero() {
            continue;
        }
        for v in &vs {
            out.push(AffineElem::new(v, &a)?);
        }
    }
    Ok(out)
}

pub fn naive_oracle(n: usize, field: &Field) -> Result<OracleResult> {
    let group = full_affine_group(field, n)?;
    let size = group.len();
    let q = field.order().unwrap();
    let target = q.pow(n as u32) as usize;
    let p = field.characteristic() as usize;
    let index: HashMap<&AffineElem, u16> = group.iter().enumerate().map(|(i, g)| (g, i as u16)).collect();
    let table: Vec<u16> = (0..size * size)
        .into_par_iter()
        .map(|ij| index[&(&group[ij / size] * &group[ij % size])])
        .collect();
    let identity = index[&AffineElem::identity(field, n)];
    // elements whose order is a power of p
    let p_elems: Vec<u16> = (0..size as u16)
        .filter(|&g| {
            let mut x = g;
            let mut steps = 1usize;
            while x != identity {
                x = table[x as usize * size + g as usize];
                steps += 1;
            }
            let mut s = steps;
            while s.is_multiple_of(p) {
                s /= p;
            }
            s == 1
        })
        .collect();
    let close = |set: &[u16], g: u16| -> Option<Vec<u16>> {
        let mut member = vec![false; size];
        let mut elems: Vec<u16> = set.to_vec();
        for &x in set {
            member[x as usize] = true;
        }
        let mut gens: Vec<u16> = vec![g];
        gens.extend(set.iter().copied().filter(|&x| x != identity));
        if !member[g as usize] {
            member[g as usize] = true;
            elems.push(g);
        }
        let mut i = 0;
        while i < elems.len() {
            for &h in &gens {
                let prod = table[elems[i] as usize * size + h as usize];
                if !member[prod as usize] {
                    if elems.len() == target {
                        return None;
                    }
                    member[prod as usize] = true;
                    elems.push(prod);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Some(elems)
    };
    let mut layer: HashSet<Vec<u16>> = HashSet::from([vec![identity]]);
    let mut seen: HashSet<Vec<u16>> = layer.clone();
    let mut full: Vec<Vec<u16>> = Vec::new();
    while !layer.is_empty() {
        let mut next = HashSet::new();
        for h in &layer {
            if h.len() == target {
                full.push(h.clone());
                continue;
            }
            let member: HashSet<u16> = h.iter().copied().collect();
            for &g in &p_elems {
                if member.contains(&g) {
                    continue;
                }
                if let Some(k) = close(h, g) {
                    if target.is_multiple_of(k.len()) && seen.insert(k.clone()) {
                        next.insert(k);
                    }
                }
            }
        }
        layer = next;
    }
    let mut all = Vec::new();
    for h in full {
        let mut elems: Vec<AffineElem> = h.iter().map(|&i| group[i as usize].clone()).collect();
        if check_regular(&elems, field, n)?.is_regular() {
            elems.sort();
            all.push(elems);
        }
    }
    all.sort();
    let unitriangular: Vec<_> = all
        .iter()
        .filter(|g| g.iter().all(|e| e.matrix().is_upper_triangular()))
        .cloned()
        .collect();
    let translation_free = all
        .iter()
        .filter(|g| g.iter().filter(|e| e.is_translation()).count() == 1)
        .count() as u64;
    Ok(OracleResult {
        all,
        unitriangular,
        translation_free,
    })
}

/// Verdict for one cell of the existence table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Built and verified, and a witness also found by search.
    ExistsConstructedAndSearch,
    ExistsConstructed,
    ExistsSearch,
    NoneExhaustive,
    /// Outside what is checked here; the verdict is the published one.
    NoneUnverified,
}

impl Verdict {
    pub fn exists(&self) -> bool {
        matches!(
            self,
            Verdict::ExistsConstructedAndSearch | Verdict::ExistsConstructed | Verdict::ExistsSearch
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::ExistsConstructedAndSearch => "EXISTS(constructed + search)",
            Verdict::ExistsConstructed => "EXISTS(constructed)",
            Verdict::ExistsSearch => "EXISTS(search)",
            Verdict::NoneExhaustive => "NONE(exhaustive)",
            Verdict::NoneUnverified => "NONE(paper, unverified)",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub n: usize,
    pub field: String,
    pub verdict: Verdict,
    /// How the verdict was reached.
    pub provenance: String,
}

impl TableRow {
    /// Tab-separated `n field verdict provenance`.
    pub fn machine(&self) -> String {
        format!("ROW\t{}\t{}\t{}\t{}", self.n, self.field, self.verdict.label(), self.provenance)
    }
}

#[derive(Clone, Debug)]
pub struct TableConfig {
    pub budget: u64,
    pub max_points: u64,
    pub seed: u64,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            budget: DEFAULT_BUDGET,
            max_points: 128,
            seed: 0,
        }
    }
}

/// A complete search, or the reason none was possible.
fn search_cell(n: usize, field: &Field, cfg: &TableConfig) -> std::result::Result<SearchResult, String> {
    let Some(q) = field.order() else {
        return Err("infinite field, not searched".into());
    };
    if q.checked_pow(n as u32).is_none_or(|pts| pts > cfg.max_points) {
        return Err(format!("{q}^{n} points beyond the limit {}", cfg.max_points));
    }
    let sc = SearchConfig::new(SearchMode::FindTranslationFree)
        .budget(cfg.budget)
        .max_points(cfg.max_points);
    match search_regular(n, field, &sc) {
        Ok(r) if r.complete() => Ok(r),
        Ok(r) => Err(format!("node budget {} exhausted", r.nodes)),
        Err(e) => Err(e.to_string()),
    }
}

fn constructed_cell(n: usize, field: &Field, cfg: &TableConfig) -> Result<String> {
    let k = if n.is_multiple_of(2) && field.characteristic() == 2 { 2 } else { 1 };
    let desc = build_rw(field, n, &SubspaceBasis::empty(field, k))?;
    let rep = full_suite(&desc, cfg.seed)?;
    if !rep.passed() || !rep.translation_free() {
        return Err(Error::Inadmissible(format!(
            "construction over {field} for n = {n} failed verification"
        )));
    }
    Ok(format!("{} verified {}", desc.hom().kind().unwrap(), rep.closure))
}

/// One row per `(n, field)` with `1 ≤ n ≤ max_n`.
pub fn existence_table(max_n: usize, fields: &[Field], cfg: &TableConfig) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for field in fields {
        for n in 1..=max_n {
            let (verdict, provenance) = cell(n, field, cfg)?;
            rows.push(TableRow {
                n,
                field: field.to_string(),
                verdict,
                provenance,
            });
        }
    }
    Ok(rows)
}

fn cell(n: usize, field: &Field, cfg: &TableConfig) -> Result<(Verdict, String)> {
    let char2 = field.characteristic() == 2;
    let searched = |r: &SearchResult| format!("search, {} nodes", r.nodes);
    let by_search = |n| -> (Verdict, String) {
        match search_cell(n, field, cfg) {
            Ok(r) if r.translation_free > 0 => (Verdict::ExistsSearch, searched(&r)),
            Ok(r) => (Verdict::NoneExhaustive, searched(&r)),
            Err(why) => (Verdict::NoneUnverified, format!("{why}; published nonexistence")),
        }
    };
    Ok(match n {
        1 | 2 => by_search(n),
        3 if field.order() == Some(2) => {
            let built = constructed_cell(3, field, cfg)?;
            let group = hegedus_group();
            let explicit = check_regular(&group, field, 3)?.is_regular()
                && group.iter().filter(|g| g.is_translation()).count() == 1;
            match search_cell(3, field, cfg) {
                Ok(r) if r.translation_free > 0 && explicit => (
                    Verdict::ExistsConstructedAndSearch,
                    format!("{built}; {}, {} witnesses", searched(&r), r.translation_free),
                ),
                _ => (Verdict::ExistsConstructed, built),
            }
        }
        3 => by_search(3),
        4 if char2 => by_search(4),
        _ => (Verdict::ExistsConstructed, constructed_cell(n, field, cfg)?),
    })
}

/// The two facts behind the direct-product remark: the (6, GF(4)) group
/// from the k = 2 family is translation-free, while the (3, GF(4)) cell
/// has no translation-free candidate to take a direct product of.
pub fn direct_product_note(rows: &[TableRow]) -> Option<String> {
    let find = |n: usize| rows.iter().find(|r| r.n == n && r.field == "GF(2^2)");
    let (r3, r6) = (find(3)?, find(6)?);
    Some(format!(
        "direct-product remark: (6, GF(2^2)) is {} [{}], while (3, GF(2^2)) is {} [{}], \
         so the (6, GF(2^2)) group is not a direct product of two translation-free \
         regular subgroups of AGL_3(GF(2^2))",
        r6.verdict, r6.provenance, r3.verdict, r3.provenance
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, ell: u32) -> Field {
        Field::galois(p, ell).unwrap()
    }

    fn all(n: usize, f: &Field) -> SearchResult {
        search_regular(n, f, &SearchConfig::new(SearchMode::EnumerateAll)).unwrap()
    }

    fn tf(n: usize, f: &Field) -> SearchResult {
        search_regular(n, f, &SearchConfig::new(SearchMode::FindTranslationFree)).unwrap()
    }

    #[test]
    fn packed_gf2_matches_generic() {
        let f = gf(2, 1);
        for n in 2..=4 {
            let t = Tables::new(&f, n).unwrap();
            for a in 0..t.ncand as u32 {
                for b in 0..t.ncand as u32 {
                    let want = &t.candidate(a) * &t.candidate(b);
                    let got = gf2_unitri_mul(n, a as u64, b as u64) as u32;
                    assert_eq!(t.candidate(got), want);
                }
            }
        }
    }

    #[test]
    fn tables_match_matrices_gf4() {
        let f = gf(2, 2);
        let t = Tables::new(&f, 2).unwrap();
        for a in 0..t.ncand as u32 {
            for b in 0..t.ncand as u32 {
                assert_eq!(t.candidate(t.mul(a, b)), &t.candidate(a) * &t.candidate(b));
            }
            for x in 0..t.npoints as u32 {
                let v = f.vector_at(x as u64, 2);
                let want = t.candidate(a).left_mul_vec(&v).unwrap();
                assert_eq!(t.act[x as usize * t.ncand + a as usize] as u64, f.vector_index(&want));
            }
        }
    }

    #[test]
    fn candidate_order_is_lexicographic() {
        let f = gf(3, 1);
        let t = Tables::new(&f, 3).unwrap();
        assert!(t.candidate(0).is_identity());
        // entries (1,2), (1,3), (2,3): index 1 sets (2,3), index 9 sets (1,2)
        assert_eq!(*t.candidate(1).get(1, 2), f.one());
        assert_eq!(*t.candidate(9).get(0, 1), f.one());
    }

    #[test]
    fn dimension_one() {
        for q in [2, 3, 4, 5] {
            let f = Field::of_order(q).unwrap();
            let r = all(1, &f);
            assert_eq!((r.total, r.translation_free), (1, 0));
        }
    }

    #[test]
    fn dimension_two_over_f2() {
        let r = all(2, &gf(2, 1));
        assert_eq!(r.total, 2);
        assert_eq!(r.translation_free, 0);
        for g in r.group_elements().unwrap() {
            assert!(check_regular(&g, &gf(2, 1), 2).unwrap().is_regular());
        }
        assert_eq!(tf(2, &gf(3, 1)).translation_free, 0);
    }

    #[test]
    fn witness_in_dimension_three() {
        let f = gf(2, 1);
        let r = tf(3, &f);
        assert!(r.translation_free > 0);
        assert_eq!(r.total, r.translation_free);
        for g in r.group_elements().unwrap() {
            assert!(check_regular(&g, &f, 3).unwrap().is_regular());
            assert_eq!(g.iter().filter(|e| e.is_translation()).count(), 1);
        }
    }

    #[test]
    fn closure_law_on_results() {
        let f = gf(3, 1);
        let r = all(2, &f);
        let t = Tables::new(&f, 2).unwrap();
        for map in &r.groups {
            for u in 0..t.npoints as u32 {
                for w in 0..t.npoints as u32 {
                    let p = t.product_point(u, w, map[w as usize]);
                    assert_eq!(map[p as usize], t.mul(map[u as usize], map[w as usize]));
                }
            }
        }
    }

    #[test]
    fn oracle_agrees_on_small_cases() {
        for (n, q) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let f = Field::of_order(q).unwrap();
            let o = naive_oracle(n, &f).unwrap();
            let s = all(n, &f);
            let mut found = s.group_elements().unwrap();
            for g in &mut found {
                g.sort();
            }
            found.sort();
            assert_eq!(found, o.unitriangular, "(n, q) = ({n}, {q})");
            assert_eq!(o.translation_free, 0);
        }
    }

    #[test]
    fn oracle_full_counts() {
        let o = naive_oracle(2, &gf(2, 1)).unwrap();
        assert_eq!(o.all.len(), 4);
        assert_eq!(o.unitriangular.len(), 2);
        assert!(naive_oracle(2, &gf(5, 1)).is_err());
    }

    #[test]
    fn threads_agree() {
        let f = gf(2, 1);
        let one = all(3, &f);
        let four = search_regular(3, &f, &SearchConfig::new(SearchMode::EnumerateAll).threads(4)).unwrap();
        assert_eq!(one.groups, four.groups);
        assert_eq!(one.total, four.total);
        assert_eq!(one.nodes, four.nodes);
    }

    #[test]
    fn deterministic_nodes() {
        let f = gf(3, 1);
        let a = all(2, &f);
        let b = all(2, &f);
        assert!(a.same_outcome(&b));
    }

    #[test]
    fn checkpoint_resume_matches() {
        let f = gf(2, 1);
        let cfg = SearchConfig::new(SearchMode::EnumerateAll);
        let full = search_regular(3, &f, &cfg).unwrap();
        let part = search_regular(3, &f, &cfg.clone().budget(full.nodes / 3)).unwrap();
        let cp = part.checkpoint.clone().expect("interrupted");
        let text = cp.encode();
        let cp2 = Checkpoint::decode(&text).unwrap();
        assert_eq!(cp, cp2);
        let mut cur = resume(&cp2, &cfg.clone().budget(full.nodes / 3)).unwrap();
        while let Some(cp) = cur.checkpoint.clone() {
            cur = resume(&cp, &cfg.clone().budget(full.nodes / 3)).unwrap();
        }
        assert!(cur.same_outcome(&full));
    }

    #[test]
    fn budget_with_threads_is_rejected() {
        let cfg = SearchConfig::new(SearchMode::EnumerateAll).budget(10).threads(2);
        assert!(search_regular(2, &gf(2, 1), &cfg).is_err());
        assert!(search_regular(2, &Field::rational(), &SearchConfig::new(SearchMode::EnumerateAll)).is_err());
        assert!(search_regular(4, &gf(3, 1), &SearchConfig::new(SearchMode::EnumerateAll)).is_err());
    }
}
