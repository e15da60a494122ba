use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::abelian::{subgroup, IntMatrix};
use crate::arith::{RingElem, Tower};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::ramification::{q, ramification_breaks, ClosePairCertificate, Q};
use crate::tori::{diagonal_and_norm, TorusPointsQuotient, TorusSpec};
use crate::transfer::{
    build_congruent_iso, build_standard_iso, uniqueness_scan, verify_choice_independence, verify_congruent_coherence,
    verify_equivariance, verify_functoriality, verify_kottwitz, verify_level_reduction, verify_self_identity, verify_symmetry,
    CheckLine, ClosePairDatum, IsoOutcome, Report, SplitTransfer,
};
use crate::units::UnitElem;

use super::parse::{Entry, Scenario, Section, SectionKind};
use super::ScenarioError;

pub const TIMING_MARK: &str = "--- timings (ignored by --compare) ---";

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub stage_degree: Option<usize>,
    pub max_enumeration: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { stage_degree: None, max_enumeration: crate::units::MAX_UNITS as usize }
    }
}

#[derive(Clone, Debug)]
pub struct TaskOutcome {
    pub name: String,
    pub op: String,
    pub report: Report,
    pub expected: String,
    pub observed: String,
    pub elapsed: Duration,
}

impl TaskOutcome {
    pub fn passed(&self) -> bool {
        self.expected == self.observed
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub title: String,
    pub outcomes: Vec<TaskOutcome>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(TaskOutcome::passed)
    }

    pub fn pass_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed()).count()
    }

    /// The deterministic part of the report.
    pub fn body(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.title);
        for o in &self.outcomes {
            let _ = writeln!(s, "[TASK] {} ({})", o.name, o.op);
            for l in &o.report.lines {
                let _ = writeln!(s, "  {l}");
            }
            for n in &o.report.notes {
                let _ = writeln!(s, "  note: {n}");
            }
            if o.expected != "pass" || !o.passed() {
                let _ = writeln!(s, "  expected {}, observed {}", o.expected, o.observed);
            }
            let _ = writeln!(s, "RESULT {}: {}", o.name, if o.passed() { "PASS" } else { "FAIL" });
        }
        let _ = writeln!(s, "SUMMARY: {}/{}", self.pass_count(), self.outcomes.len());
        s
    }

    pub fn render(&self) -> String {
        let mut s = self.body();
        let _ = writeln!(s, "{TIMING_MARK}");
        for o in &self.outcomes {
            let _ = writeln!(s, "{}: {} ms", o.name, o.elapsed.as_millis());
        }
        s
    }
}

/// First differing line of two reports, ignoring the timing footer.
pub fn compare_reports(a: &str, b: &str) -> Option<(usize, String, String)> {
    let body = |s: &str| s.lines().take_while(|l| *l != TIMING_MARK).map(str::to_string).collect::<Vec<_>>();
    let (x, y) = (body(a), body(b));
    for i in 0..x.len().max(y.len()) {
        let (l, r) = (x.get(i).cloned().unwrap_or_default(), y.get(i).cloned().unwrap_or_default());
        if l != r {
            return Some((i + 1, l, r));
        }
    }
    None
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotClose { .. } => "not_close",
        Error::NotWeaklyInduced => "not_weakly_induced",
        Error::LevelCondition(_) => "level_condition",
        Error::NotEquivariant(_) => "not_equivariant",
        Error::TransferFailed(_) => "transfer_failed",
        Error::Unsupported(_) => "unsupported",
        Error::NotAtMostRamified(..) => "not_at_most_ramified",
        Error::ResidueMismatch(_) => "residue_mismatch",
        Error::PrecisionExceeded { .. } => "precision_exceeded",
        Error::EnumerationLimit { .. } => "enumeration_limit",
        Error::Undetermined(_) => "undetermined",
        Error::InvalidParameter(_) => "invalid_parameter",
        _ => "error",
    }
}

struct Env {
    fields: HashMap<String, Arc<Tower>>,
    certs: HashMap<String, ClosePairCertificate>,
    tori: HashMap<String, TorusSpec>,
    transfers: HashMap<(String, String), Arc<SplitTransfer>>,
}

fn bad_value(e: &Entry, msg: impl Into<String>) -> Error {
    Error::Parse { line: e.line, column: e.column, message: msg.into() }
}

fn parse_num<T: std::str::FromStr>(e: &Entry, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| bad_value(e, format!("'{tok}' is not a valid number for '{}'", e.key)))
}

fn parse_q(e: &Entry, tok: &str) -> Result<Q> {
    let tok = tok.trim();
    match tok.split_once('/') {
        Some((a, b)) => {
            let d: i64 = parse_num(e, b)?;
            if d == 0 {
                return Err(bad_value(e, "zero denominator"));
            }
            Ok(Q::new(parse_num(e, a)?, d))
        }
        None => Ok(Q::from_integer(parse_num(e, tok)?)),
    }
}

/// "2", "3/2", "1,2", "1..4"
fn parse_levels(e: &Entry) -> Result<Vec<Q>> {
    if let Some((a, b)) = e.value.split_once("..") {
        let (a, b): (i64, i64) = (parse_num(e, a.trim())?, parse_num(e, b.trim())?);
        if a > b {
            return Err(bad_value(e, "empty range"));
        }
        return Ok((a..=b).map(Q::from_integer).collect());
    }
    e.value.split(',').map(|t| parse_q(e, t)).collect()
}

/// Products like "2*pi^3", "-1", "t"; names are step generators, or t/p for the base uniformizer.
fn parse_elem(tower: &Arc<Tower>, e: &Entry, text: &str) -> Result<RingElem> {
    let mut acc = tower.one();
    for factor in text.split('*') {
        let factor = factor.trim();
        let (base, exp) = match factor.split_once('^') {
            Some((b, x)) => (b.trim(), parse_num::<u64>(e, x.trim())?),
            None => (factor, 1),
        };
        let v = if let Ok(c) = base.parse::<i64>() {
            tower.from_int(c)
        } else if let Some(g) = tower.generator_named(base) {
            g
        } else if base == "t" || base == "p" || base == "varpi" {
            tower.base_uniformizer()
        } else if base == "uniformizer" {
            tower.uniformizer()
        } else {
            return Err(bad_value(e, format!("unknown symbol '{base}' in {}", tower.name)));
        };
        acc = acc.mul(&v.pow(exp))?;
    }
    Ok(acc)
}

impl Env {
    fn build(sc: &Scenario) -> std::result::Result<Env, ScenarioError> {
        let mut env = Env { fields: HashMap::new(), certs: HashMap::new(), tori: HashMap::new(), transfers: HashMap::new() };
        let decls: Vec<&Section> = sc.sections.iter().filter(|s| !matches!(s.kind, SectionKind::Task | SectionKind::Options)).collect();
        let mut done = vec![false; decls.len()];
        loop {
            let mut progressed = false;
            for (i, s) in decls.iter().enumerate() {
                if done[i] || !super::parse::dependencies(s).iter().all(|d| env.has(d)) {
                    continue;
                }
                env.declare(s).map_err(|error| match error {
                    Error::Parse { .. } => ScenarioError::Parse(error),
                    error => ScenarioError::Setup { kind: s.kind.to_string(), name: s.name.clone(), line: s.line, module: module_of(s.kind), error },
                })?;
                done[i] = true;
                progressed = true;
            }
            if !progressed {
                break;
            }
        }
        Ok(env)
    }

    fn has(&self, name: &str) -> bool {
        self.fields.contains_key(name) || self.certs.contains_key(name) || self.tori.contains_key(name)
    }

    fn field(&self, e: &Entry) -> Result<Arc<Tower>> {
        self.fields.get(&e.value).cloned().ok_or_else(|| bad_value(e, format!("undeclared field '{}'", e.value)))
    }

    fn declare(&mut self, s: &Section) -> Result<()> {
        match s.kind {
            SectionKind::Field => {
                let t = if let Some(e) = s.get("base") {
                    let w: Vec<&str> = e.value.split_whitespace().collect();
                    match w.as_slice() {
                        ["padic", p, d] => Tower::new(&s.name, crate::arith::BaseField::mixed(parse_num(e, p)?, parse_num(e, d)?)?)?,
                        ["laurent", p, d] => Tower::new(&s.name, crate::arith::BaseField::equal(parse_num(e, p)?, parse_num(e, d)?)?)?,
                        _ => return Err(bad_value(e, "expected 'padic <p> <digits>' or 'laurent <p> <digits>'")),
                    }
                } else {
                    let e = s.require("extend")?;
                    let w: Vec<&str> = e.value.split_whitespace().collect();
                    let parent = self.fields[w[0]].clone();
                    match &w[1..] {
                        ["eisenstein", g, d] => fixtures::eisenstein(&parent, &s.name, g, parse_num(e, d)?, 1)?,
                        ["eisenstein", g, d, c] => fixtures::eisenstein(&parent, &s.name, g, parse_num(e, d)?, parse_num(e, c)?)?,
                        ["unramified", g, d] => parent.extend_unramified(&s.name, g, parse_num(e, d)?)?,
                        _ => return Err(bad_value(e, "expected '<field> eisenstein <gen> <degree> [c]' or '<field> unramified <gen> <degree>'")),
                    }
                };
                self.fields.insert(s.name.clone(), t);
            }
            SectionKind::Close => {
                let (le, re) = (s.require("left")?, s.require("right")?);
                let (l, r) = (self.field(le)?, self.field(re)?);
                let lv = s.require("level")?;
                let level = parse_num(lv, &lv.value)?;
                let lu = match s.get("left_uniformizer") {
                    Some(e) => parse_elem(&l, e, &e.value)?,
                    None => l.uniformizer(),
                };
                let ru = match s.get("right_uniformizer") {
                    Some(e) => parse_elem(&r, e, &e.value)?,
                    None => r.uniformizer(),
                };
                let cert = ClosePairCertificate::certify_with(&l, &r, level, &lu, &ru)?;
                self.certs.insert(s.name.clone(), cert);
            }
            SectionKind::Torus => {
                let ke = s.require("kind")?;
                let field = self.field(s.require("field")?)?;
                let rank = match s.get("rank") {
                    Some(e) => parse_num(e, &e.value)?,
                    None => 1,
                };
                let spec = match ke.value.as_str() {
                    "split" => match s.get("splitting") {
                        Some(e) => TorusSpec::split_over(&s.name, &field, &self.field(e)?, rank)?,
                        None => TorusSpec::split(&s.name, &field, rank)?,
                    },
                    "weil_restriction" => TorusSpec::weil_restriction(&s.name, &field, &self.field(s.require("ext")?)?, rank)?,
                    "norm_one" => TorusSpec::norm_one(&s.name, &field, &self.field(s.require("ext")?)?)?,
                    "general" => {
                        let splitting = self.field(s.require("splitting")?)?;
                        let mut gens = vec![];
                        for e in s.all("generator") {
                            let (idx, rows) = e.value.split_once(':').ok_or_else(|| bad_value(e, "expected '<index>: <row>; <row>'"))?;
                            let idx: usize = parse_num(e, idx.trim())?;
                            let rows: Vec<Vec<i64>> = rows
                                .split(';')
                                .map(|r| r.split_whitespace().map(|x| parse_num(e, x)).collect::<Result<Vec<i64>>>())
                                .collect::<Result<_>>()?;
                            if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
                                return Err(bad_value(e, format!("generator matrix must be {rank} x {rank}")));
                            }
                            gens.push((idx, IntMatrix::from_rows(&rows)));
                        }
                        TorusSpec::general(&s.name, &field, &splitting, rank, &gens)?
                    }
                    other => return Err(bad_value(ke, format!("unknown torus kind '{other}' (split, weil_restriction, norm_one, general)"))),
                };
                self.tori.insert(s.name.clone(), spec);
            }
            _ => {}
        }
        Ok(())
    }

    fn datum(&mut self, pair: &str, torus: &str) -> Result<ClosePairDatum> {
        let cert = self.certs[pair].clone();
        let spec = self.tori[torus].clone();
        let key = (pair.to_string(), spec.splitting.name.clone());
        let tr = match self.transfers.get(&key) {
            Some(t) => t.clone(),
            None => {
                let t = Arc::new(SplitTransfer::new(&cert, &spec.galois)?);
                self.transfers.insert(key, t.clone());
                t
            }
        };
        ClosePairDatum::with_transfer(&tr, &spec)
    }
}

fn module_of(kind: SectionKind) -> &'static str {
    match kind {
        SectionKind::Field => "truncated_arith",
        SectionKind::Close => "extensions_ramification",
        SectionKind::Torus => "tori",
        _ => "cli",
    }
}

struct TaskCtx<'a> {
    s: &'a Section,
    opts: &'a RunOptions,
}

impl TaskCtx<'_> {
    fn get(&self, key: &str) -> Result<&Entry> {
        self.s.require(key)
    }

    fn levels(&self, key: &str) -> Result<Vec<Q>> {
        parse_levels(self.get(key)?)
    }

    fn level(&self, key: &str) -> Result<Q> {
        let v = self.levels(key)?;
        match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(bad_value(self.get(key)?, format!("'{key}' takes a single level"))),
        }
    }

    fn stage(&self) -> Result<Option<usize>> {
        match self.s.get("stage") {
            Some(e) => Ok(Some(parse_num(e, &e.value)?)),
            None => Ok(self.opts.stage_degree),
        }
    }

    fn cap(&self) -> usize {
        self.opts.max_enumeration
    }
}

fn tuple(q: &TorusPointsQuotient, e: &Entry) -> Result<Vec<UnitElem>> {
    let tower = &q.split.units.tower().clone();
    let parts: Vec<&str> = e.value.split(',').collect();
    if parts.len() != q.split.rank() {
        return Err(bad_value(e, format!("expected {} comma-separated entries", q.split.rank())));
    }
    parts
        .iter()
        .map(|p| {
            let x = parse_elem(tower, e, p)?;
            q.split.units.project(&x)
        })
        .collect()
}

fn run_task(env: &mut Env, ctx: &TaskCtx) -> Result<Report> {
    let s = ctx.s;
    let op = s.require("op")?.value.clone();
    let cap = ctx.cap();
    let mut rep = Report::new(format!("{} ({op})", s.name));
    match op.as_str() {
        "certify" => {
            let (l, r) = (env.field(ctx.get("left")?)?, env.field(ctx.get("right")?)?);
            let le = ctx.get("level")?;
            let level: usize = parse_num(le, &le.value)?;
            let c = ClosePairCertificate::certify(&l, &r, level)?;
            rep.push(CheckLine::pass(format!("{} and {} are {level}-close", l.name, r.name), (c.left.q() * c.left.q()) as usize));
        }
        "herbrand" => {
            let f = env.field(ctx.get("field")?)?;
            if f.levels() == 0 {
                return Err(Error::InvalidParameter(format!("{} has no extension step", f.name)));
            }
            let h = ramification_breaks(&f, f.levels() - 1)?;
            let grid: Vec<Q> = (0..20).map(|i| Q::new(i, 3)).collect();
            rep.push(crate::transfer::check_all("phi(psi(x)) = x on the grid", &grid, |x| {
                let y = h.phi.eval(h.psi.eval(*x));
                (y != *x).then(|| format!("x = {x}: {y}"))
            }));
            let l = match s.get("l") {
                Some(e) => parse_num(e, &e.value)?,
                None => 4usize,
            };
            let l1 = h.l_one(l)?;
            let ok = l <= l1 && l1 <= l * h.e && ((l1 == l * h.e) == h.is_tame());
            rep.push(if ok {
                CheckLine::pass(format!("l(1) = psi({l}) = {l1} with equality l(1) = le iff tame"), 1)
            } else {
                CheckLine::fail("l <= l(1) <= le, equality iff tame", 1, format!("l(1) = {l1}, e = {}", h.e))
            });
            let d = crate::ramification::different_from_polynomial(&f, f.levels() - 1)?;
            rep.push(if d == h.different_val {
                CheckLine::pass(format!("different exponent {d} agrees with the break formula"), 1)
            } else {
                CheckLine::fail("different exponent agrees with the break formula", 1, format!("{d} vs {}", h.different_val))
            });
        }
        "correspondence" => {
            let d = env.datum(&ctx.get("pair")?.value, &ctx.get("torus")?.value)?;
            let p = d.pair(ctx.level("r")?)?;
            let t = tuple(&p.left, ctx.get("left")?)?;
            let t2 = tuple(&p.right, ctx.get("right")?)?;
            let he = ctx.get("holds")?;
            let want = match he.value.as_str() {
                "true" => true,
                "false" => false,
                _ => return Err(bad_value(he, "expected true or false")),
            };
            let got = p.is_standard_correspondent(&t, &t2);
            let label = format!("{} ~ {} standard correspondents: {want}", ctx.get("left")?.value, ctx.get("right")?.value);
            rep.push(if got == want {
                CheckLine::pass(label, 1)
            } else {
                let img: Vec<String> = p.correspondent_tuple(&t).iter().map(|u| u.to_string()).collect();
                CheckLine::fail(label, 1, format!("correspondent of the left point is [{}]", img.join(" ")))
            });
        }
        "standard_iso" => {
            let d = env.datum(&ctx.get("pair")?.value, &ctx.get("torus")?.value)?;
            for r in ctx.levels("r")? {
                match build_standard_iso(&d, r)? {
                    IsoOutcome::Built(iso) => {
                        rep.note(format!("r = {r}: {} -> {}", iso.source().group(), iso.target().group()));
                        rep.push(tag(iso.check_correspondence(cap), r));
                        rep.push(tag(uniqueness_scan(&iso.pair, cap), r));
                        rep.push(tag(verify_symmetry(&iso, cap)?, r));
                    }
                    IsoOutcome::NotOnto { witness } => rep.push(CheckLine::fail(format!("standard isomorphism exists at r = {r}"), 1, witness)),
                }
            }
        }
        "congruent_iso" => {
            let d = env.datum(&ctx.get("pair")?.value, &ctx.get("torus")?.value)?;
            let me = ctx.get("m")?;
            let m: usize = parse_num(me, &me.value)?;
            match build_congruent_iso(&d, m, ctx.stage()?, cap)? {
                IsoOutcome::Built(iso) => {
                    if let Some(st) = &iso.stage {
                        rep.note(st.title.clone());
                        rep.extend(st.clone());
                    }
                    rep.extend(verify_congruent_coherence(&iso, cap)?);
                }
                IsoOutcome::NotOnto { witness } => rep.push(CheckLine::fail(format!("congruent isomorphism exists at m = {m}"), 1, witness)),
            }
        }
        "functoriality" => {
            let pair = ctx.get("pair")?.value.clone();
            let (from, to) = (ctx.get("from")?.value.clone(), ctx.get("to")?.value.clone());
            let (d1, d2) = (env.datum(&pair, &from)?, env.datum(&pair, &to)?);
            let me = ctx.get("map")?;
            let f = match me.value.as_str() {
                "diagonal" => diagonal_and_norm(&d1.left.lattice, &[d1.left.galois.identity()])?.diagonal_dual,
                "norm" => diagonal_and_norm(&d2.left.lattice, &[d2.left.galois.identity()])?.norm_dual,
                rows => {
                    let rows: Vec<Vec<i64>> = rows
                        .split(';')
                        .map(|r| r.split_whitespace().map(|x| parse_num(me, x)).collect::<Result<Vec<i64>>>())
                        .collect::<Result<_>>()?;
                    IntMatrix::from_rows(&rows)
                }
            };
            for r in ctx.levels("r")? {
                rep.extend(verify_functoriality(&d1, &d2, &f, r, cap)?);
            }
        }
        "equivariance" => {
            let d = env.datum(&ctx.get("pair")?.value, &ctx.get("torus")?.value)?;
            for r in ctx.levels("r")? {
                rep.extend(verify_equivariance(&d, r, ctx.stage()?, cap)?);
            }
        }
        "kottwitz" => {
            let d = env.datum(&ctx.get("pair")?.value, &ctx.get("torus")?.value)?;
            for r in ctx.levels("r")? {
                let iso = build_standard_iso(&d, r)?.built()?;
                let k = verify_kottwitz(&iso, cap)?;
                rep.notes.extend(k.notes.iter().map(|n| format!("r = {r}: {n}")));
                for l in k.lines {
                    rep.push(tag(l, r));
                }
            }
        }
        "level_reduction" => {
            let d = env.datum(&ctx.get("pair")?.value, &ctx.get("torus")?.value)?;
            let r = ctx.level("r")?;
            for s_ in ctx.levels("s")? {
                let k = verify_level_reduction(&d, r, s_, cap)?;
                for mut l in k.lines {
                    l.label = format!("{} ({r} -> {s_})", l.label);
                    rep.push(l);
                }
            }
        }
        "filtrations" => {
            let spec = env.tori[&ctx.get("torus")?.value].clone();
            for r in ctx.levels("r")? {
                filtration_lines(&mut rep, &spec, r)?;
            }
        }
        "self_identity" => {
            let d = env.datum(&ctx.get("pair")?.value, &ctx.get("torus")?.value)?;
            if !d.transfer.cert.same_as(&crate::ramification::certify_close(&d.transfer.cert.left, &d.transfer.cert.left, d.level())?) {
                return Err(Error::InvalidParameter("self_identity needs a certificate of a field with itself".into()));
            }
            for r in ctx.levels("r")? {
                let iso = build_standard_iso(&d, r)?.built()?;
                rep.push(tag(verify_self_identity(&iso, cap), r));
            }
        }
        "choice_independence" => {
            let pair = ctx.get("pair")?.value.clone();
            let d1 = env.datum(&pair, &ctx.get("torus")?.value)?;
            let d2 = env.datum(&pair, &ctx.get("other")?.value)?;
            for r in ctx.levels("r")? {
                rep.push(tag(verify_choice_independence(&d1, &d2, r, cap)?, r));
            }
        }
        other => {
            return Err(bad_value(
                s.get("op").expect("checked"),
                format!("unknown op '{other}'; available: {}", OPS.join(", ")),
            ))
        }
    }
    Ok(rep)
}

pub const OPS: &[&str] = &[
    "certify",
    "herbrand",
    "correspondence",
    "standard_iso",
    "congruent_iso",
    "functoriality",
    "equivariance",
    "kottwitz",
    "level_reduction",
    "filtrations",
    "self_identity",
    "choice_independence",
];

fn tag(mut l: CheckLine, r: Q) -> CheckLine {
    l.label = format!("{} [r = {r}]", l.label);
    l
}

/// naive_0 = bounded, T^0 inside bounded, and for weakly induced tori congruent = standard = naive.
pub fn filtration_lines(rep: &mut Report, spec: &TorusSpec, r: Q) -> Result<()> {
    let qt = TorusPointsQuotient::new(spec, r)?;
    let b = qt.bounded();
    let n0 = qt.naive(q(0))?;
    rep.push(eq_line(format!("naive_0 equals the bounded part [r = {r}]"), subgroup::equal(&n0, &b), &qt, &n0, &b));
    let t0 = qt.iwahori()?;
    rep.push(if subgroup::contains(&b, &t0) {
        CheckLine::pass(format!("parahoric part lies in the bounded part [r = {r}]"), t0.source.ngens())
    } else {
        CheckLine::fail(format!("parahoric part lies in the bounded part [r = {r}]"), t0.source.ngens(), "generator outside")
    });
    rep.note(format!("r = {r}: points {}, bounded {}, parahoric {}", qt.group(), b.source, t0.source));
    if spec.is_weakly_induced() {
        let mut s = Q::from_integer(1);
        while s <= r {
            let (nv, st, cg) = (qt.naive(s)?, qt.standard(s)?, qt.congruent(s)?);
            let ok = subgroup::equal(&nv, &st) && subgroup::equal(&st, &cg);
            rep.push(eq_line(format!("congruent = standard = naive at s = {s} [r = {r}]"), ok, &qt, &nv, &st));
            s += Q::from_integer(1);
        }
    } else {
        rep.note(format!("{} is not weakly induced; congruent filtration not computed", spec.name));
    }
    Ok(())
}

fn eq_line(label: String, ok: bool, qt: &TorusPointsQuotient, a: &crate::abelian::GroupHom, b: &crate::abelian::GroupHom) -> CheckLine {
    if ok {
        CheckLine::pass(label, a.source.ngens() + b.source.ngens())
    } else {
        let w = (0..a.source.ngens())
            .map(|i| a.apply(&a.source.generator(i)))
            .find(|x| !subgroup::contains_elem(b, x))
            .map(|x| qt.format(&x))
            .unwrap_or_else(|| "subgroups differ".into());
        CheckLine::fail(label, a.source.ngens() + b.source.ngens(), w)
    }
}

pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> std::result::Result<RunOutput, ScenarioError> {
    let mut env = Env::build(sc)?;
    let title = sc.options().and_then(|o| o.get("title")).map(|e| e.value.clone()).unwrap_or_else(|| "scenario".into());
    let mut opts = opts.clone();
    if let Some(o) = sc.options() {
        if let (Some(e), None) = (o.get("stage_degree"), opts.stage_degree) {
            opts.stage_degree = Some(parse_num(e, &e.value).map_err(ScenarioError::Parse)?);
        }
        if let Some(e) = o.get("max_enumeration") {
            if opts.max_enumeration == RunOptions::default().max_enumeration {
                opts.max_enumeration = parse_num(e, &e.value).map_err(ScenarioError::Parse)?;
            }
        }
    }
    let mut outcomes = vec![];
    for s in sc.tasks() {
        let start = Instant::now();
        let ctx = TaskCtx { s, opts: &opts };
        let expected = s.get("expect").map(|e| e.value.clone()).unwrap_or_else(|| "pass".into());
        let (report, observed) = match run_task(&mut env, &ctx) {
            Ok(rep) => {
                let obs = if rep.passed() { "pass" } else { "fail" };
                (rep, obs.to_string())
            }
            Err(e @ Error::Parse { .. }) => return Err(ScenarioError::Parse(e)),
            Err(e) => {
                let mut rep = Report::new(s.name.clone());
                rep.push(CheckLine::fail(format!("{} completes", s.require("op").map(|o| o.value.clone()).unwrap_or_default()), 0, format!("{e}")));
                (rep, error_kind(&e).to_string())
            }
        };
        outcomes.push(TaskOutcome { name: s.name.clone(), op: s.require("op").map(|o| o.value.clone()).unwrap_or_default(), report, expected, observed, elapsed: start.elapsed() });
    }
    Ok(RunOutput { title, outcomes })
}
