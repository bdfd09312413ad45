//! Text formats for groups (`.grp`), equation systems (`.sys`), towers
//! (`.twr`), homomorphisms (`.hom`) and NTQ systems (`.ntq`).
//!
//! Every format is a block `kind name { key: value; ... }`, where a value
//! runs to the next `;` outside brackets and may itself be an inline block
//! (for example `base: group F2 { generators: a, b; relators: ; };`).
//! Lines starting with `#` between entries are comments.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::embeddings::{NtqLevel, NtqSystem};
use crate::equations::{Assignment, EqSystem};
use crate::error::{Error, Result};
use crate::parse::{parse_error, parse_name_list, parse_word_in, parse_word_list, split_top_level};
use crate::presentation::Presentation;
use crate::tower::{GroupHom, Tower};
use crate::word::{Symbol, Word};

/// Loads the group named by a non-inline `base:`/`over:` value (usually a
/// file path).
pub type Resolver<'a> = &'a dyn Fn(&str) -> Result<Presentation>;

/// A resolver that accepts inline groups only.
pub fn inline_only(name: &str) -> Result<Presentation> {
    Err(Error::Invalid(format!(
        "group `{name}` is not inline and no file resolver is available"
    )))
}

#[derive(Debug)]
struct Field {
    key: String,
    key_at: usize,
    start: usize,
    end: usize,
}

#[derive(Debug)]
enum Item {
    Field(Field),
    Block(Block),
}

#[derive(Debug)]
struct Block {
    kind: String,
    name: Option<String>,
    at: usize,
    items: Vec<Item>,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        parse_error(self.src, self.pos, msg)
    }

    fn skip(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    /// A key or block kind: letters, digits, `_` and `-`.
    fn ident(&mut self) -> Result<String> {
        self.skip();
        let rest = &self.src[self.pos..];
        let n = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(rest.len());
        if n == 0 {
            return Err(self.err("expected an identifier"));
        }
        self.pos += n;
        Ok(rest[..n].to_string())
    }

    /// A block name: anything up to whitespace or `{`.
    fn name(&mut self) -> Option<String> {
        self.skip();
        let rest = &self.src[self.pos..];
        let n = rest
            .find(|c: char| c.is_whitespace() || c == '{')
            .unwrap_or(rest.len());
        if n == 0 {
            return None;
        }
        self.pos += n;
        Some(rest[..n].to_string())
    }

    fn block(&mut self) -> Result<Block> {
        self.skip();
        let at = self.pos;
        let kind = self.ident()?;
        let name = self.name();
        self.expect('{')?;
        let mut items = Vec::new();
        loop {
            self.skip();
            match self.peek() {
                None => return Err(self.err(format!("unterminated `{kind}` block"))),
                Some('}') => {
                    self.pos += 1;
                    break;
                }
                _ => {}
            }
            let key_at = self.pos;
            let key = self.ident()?;
            self.skip();
            match self.peek() {
                Some(':') => {
                    self.pos += 1;
                    let (start, end) = self.value()?;
                    items.push(Item::Field(Field {
                        key,
                        key_at,
                        start,
                        end,
                    }));
                }
                _ => {
                    self.pos = key_at;
                    items.push(Item::Block(self.block()?));
                }
            }
        }
        Ok(Block {
            kind,
            name,
            at,
            items,
        })
    }

    /// Scans to the `;` ending a value (consumed) or the `}` ending the
    /// enclosing block (left in place).
    fn value(&mut self) -> Result<(usize, usize)> {
        let start = self.pos;
        let mut depth = 0i32;
        for (i, c) in self.src[start..].char_indices() {
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' => depth -= 1,
                '}' if depth == 0 => {
                    self.pos = start + i;
                    return Ok((start, start + i));
                }
                '}' => depth -= 1,
                ';' if depth == 0 => {
                    self.pos = start + i + 1;
                    return Ok((start, start + i));
                }
                _ => {}
            }
        }
        Err(self.err("unterminated value"))
    }
}

fn parse_top(src: &str, kind: &str) -> Result<Block> {
    let mut lx = Lexer { src, pos: 0 };
    let b = lx.block()?;
    if b.kind != kind {
        return Err(parse_error(
            src,
            b.at,
            format!("expected a `{kind}` block, found `{}`", b.kind),
        ));
    }
    lx.skip();
    if lx.pos < src.len() {
        return Err(lx.err("trailing input after block"));
    }
    Ok(b)
}

impl Block {
    fn fields(&self) -> impl Iterator<Item = &Field> {
        self.items.iter().filter_map(|i| match i {
            Item::Field(f) => Some(f),
            _ => None,
        })
    }

    fn get(&self, key: &str) -> Option<&Field> {
        self.fields().find(|f| f.key == key)
    }

    fn require(&self, src: &str, key: &str) -> Result<&Field> {
        self.get(key).ok_or_else(|| {
            parse_error(
                src,
                self.at,
                format!("`{}` block is missing `{key}:`", self.kind),
            )
        })
    }

    fn check_keys(&self, src: &str, allowed: &[&str]) -> Result<()> {
        match self.fields().find(|f| !allowed.contains(&f.key.as_str())) {
            Some(f) => Err(parse_error(
                src,
                f.key_at,
                format!("unknown key `{}`", f.key),
            )),
            None => Ok(()),
        }
    }

    fn name_or(&self, default: &str) -> String {
        self.name.clone().unwrap_or_else(|| default.to_string())
    }
}

fn text<'s>(src: &'s str, f: &Field) -> &'s str {
    src[f.start..f.end].trim()
}

fn parse_bool(src: &str, f: &Field) -> Result<bool> {
    match text(src, f) {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(parse_error(
            src,
            f.start,
            format!("expected `true` or `false`, found `{other}`"),
        )),
    }
}

fn parse_usize(src: &str, f: &Field) -> Result<usize> {
    text(src, f).parse().map_err(|_| {
        parse_error(
            src,
            f.start,
            format!("expected a non-negative integer, found `{}`", text(src, f)),
        )
    })
}

fn group_from_block(src: &str, b: &Block) -> Result<Presentation> {
    b.check_keys(src, &["generators", "relators", "dehn_override"])?;
    let g = b.require(src, "generators")?;
    let generators = parse_name_list(src, g.start, g.end)?;
    let relators = match b.get("relators") {
        Some(r) => parse_word_list(src, r.start, r.end)?,
        None => Vec::new(),
    };
    let p =
        Presentation::new(&b.name_or("G"), generators, relators).map_err(|e| at(src, b.at, e))?;
    Ok(match b.get("dehn_override") {
        Some(f) => p.with_dehn_override(parse_bool(src, f)?),
        None => p,
    })
}

/// Attaches a position to validation errors raised while building a value.
fn at(src: &str, offset: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => parse_error(src, offset, other.to_string()),
    }
}

/// A group given inline or by reference.
fn group_value(src: &str, f: &Field, resolve: Resolver) -> Result<Presentation> {
    let t = text(src, f);
    if t.starts_with("group") && t.contains('{') {
        let lead = src[f.start..f.end].len() - src[f.start..f.end].trim_start().len();
        let mut lx = Lexer {
            src: &src[..f.end],
            pos: f.start + lead,
        };
        let b = lx.block()?;
        if b.kind != "group" {
            return Err(parse_error(src, b.at, "expected an inline `group` block"));
        }
        group_from_block(src, &b)
    } else {
        resolve(t).map_err(|e| at(src, f.start, e))
    }
}

pub fn parse_group(src: &str) -> Result<Presentation> {
    group_from_block(src, &parse_top(src, "group")?)
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn group_body(g: &Presentation, indent: &str) -> String {
    let mut s = format!("group {} {{\n", g.name());
    let _ = writeln!(s, "{indent}  generators: {};", join(g.generators()));
    let _ = writeln!(s, "{indent}  relators: {};", join(g.relators()));
    if g.dehn_override() {
        let _ = writeln!(s, "{indent}  dehn_override: true;");
    }
    s.push_str(indent);
    s.push('}');
    s
}

pub fn write_group(g: &Presentation) -> String {
    group_body(g, "") + "\n"
}

pub fn parse_system(src: &str, resolve: Resolver) -> Result<EqSystem> {
    let b = parse_top(src, "system")?;
    b.check_keys(src, &["over", "vars", "equations"])?;
    let group = Arc::new(group_value(src, b.require(src, "over")?, resolve)?);
    let v = b.require(src, "vars")?;
    let vars = parse_name_list(src, v.start, v.end)?;
    let equations = match b.get("equations") {
        Some(e) => parse_word_list(src, e.start, e.end)?,
        None => Vec::new(),
    };
    EqSystem::new(&b.name_or("S"), group, vars, equations).map_err(|e| at(src, b.at, e))
}

pub fn write_system(s: &EqSystem) -> String {
    let mut out = format!("system {} {{\n", s.name);
    let _ = writeln!(out, "  over: {};", group_body(&s.group, "  "));
    let _ = writeln!(out, "  vars: {};", join(&s.variables));
    let _ = writeln!(out, "  equations: {};", join(&s.equations));
    out.push_str("}\n");
    out
}

/// Levels with the same `center_of` that follow each other are read back as
/// one extension of higher rank, which is how a rank-k extension is written.
pub fn parse_tower(src: &str, resolve: Resolver) -> Result<Tower> {
    let b = parse_top(src, "tower")?;
    b.check_keys(src, &["base", "search_bound"])?;
    let base = group_value(src, b.require(src, "base")?, resolve)?;
    let mut tower = Tower::new(&b.name_or("H"), Arc::new(base));
    if let Some(f) = b.get("search_bound") {
        tower = tower.with_search_bound(parse_usize(src, f)?);
    }
    let mut pending: Vec<(Word, Symbol, usize)> = Vec::new();
    for item in &b.items {
        let Item::Block(l) = item else { continue };
        if l.kind != "level" {
            return Err(parse_error(
                src,
                l.at,
                format!("unexpected `{}` block in a tower", l.kind),
            ));
        }
        l.check_keys(src, &["letter", "center_of"])?;
        let lf = l.require(src, "letter")?;
        let letter = parse_name_list(src, lf.start, lf.end)?;
        if letter.len() != 1 {
            return Err(parse_error(
                src,
                lf.start,
                "expected exactly one stable letter",
            ));
        }
        let cf = l.require(src, "center_of")?;
        let u = parse_word_in(src, cf.start, cf.end)?;
        pending.push((u, letter[0].clone(), l.at));
    }
    let mut i = 0;
    while i < pending.len() {
        let mut j = i + 1;
        while j < pending.len() && pending[j].0 == pending[i].0 {
            j += 1;
        }
        let names: Vec<Symbol> = pending[i..j].iter().map(|p| p.1.clone()).collect();
        tower = tower
            .extend_centralizer(&pending[i].0, names.len(), Some(&names))
            .map_err(|e| at(src, pending[i].2, e))?;
        i = j;
    }
    Ok(tower)
}

pub fn write_tower(t: &Tower) -> String {
    let mut out = format!("tower {} {{\n", t.name());
    let _ = writeln!(out, "  base: {};", group_body(t.base(), "  "));
    let _ = writeln!(out, "  search_bound: {};", t.search_bound());
    for l in t.levels() {
        let _ = writeln!(
            out,
            "  level {{ letter: {}; center_of: {}; }}",
            l.letter, l.center_witness
        );
    }
    out.push_str("}\n");
    out
}

/// A homomorphism as written to disk: group names and generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpec {
    pub source: String,
    pub target: String,
    pub map: Assignment,
}

impl From<&GroupHom> for HomSpec {
    fn from(h: &GroupHom) -> Self {
        HomSpec {
            source: h.source.name().to_string(),
            target: h.target.name().to_string(),
            map: h.images.clone(),
        }
    }
}

pub fn parse_hom(src: &str) -> Result<HomSpec> {
    let b = parse_top(src, "hom")?;
    b.check_keys(src, &["source", "target", "map"])?;
    let source = text(src, b.require(src, "source")?).to_string();
    let target = text(src, b.require(src, "target")?).to_string();
    let m = b.require(src, "map")?;
    let mut map = Assignment::new();
    for (s, e) in split_top_level(src, m.start, m.end, ',') {
        if src[s..e].trim().is_empty() {
            continue;
        }
        let Some(arrow) = src[s..e].find("->") else {
            return Err(parse_error(src, s, "expected `generator -> word`"));
        };
        let name = parse_name_list(src, s, s + arrow)?;
        if name.len() != 1 {
            return Err(parse_error(src, s, "expected one generator before `->`"));
        }
        let img = parse_word_in(src, s + arrow + 2, e)?;
        if map.insert(name[0].clone(), img).is_some() {
            return Err(parse_error(
                src,
                s,
                format!("`{}` is mapped twice", name[0]),
            ));
        }
    }
    Ok(HomSpec {
        source,
        target,
        map,
    })
}

pub fn write_hom(h: &HomSpec) -> String {
    let map: Vec<String> = h.map.iter().map(|(k, v)| format!("{k} -> {v}")).collect();
    format!(
        "hom {{\n  source: {};\n  target: {};\n  map: {};\n}}\n",
        h.source,
        h.target,
        map.join(", ")
    )
}

pub fn parse_ntq(src: &str, resolve: Resolver) -> Result<NtqSystem> {
    let b = parse_top(src, "ntq")?;
    b.check_keys(src, &["base"])?;
    let base = Arc::new(group_value(src, b.require(src, "base")?, resolve)?);
    let mut levels = Vec::new();
    for item in &b.items {
        let Item::Block(l) = item else { continue };
        if l.kind != "level" {
            return Err(parse_error(
                src,
                l.at,
                format!("unexpected `{}` block in an ntq system", l.kind),
            ));
        }
        let form = l.require(src, "form")?;
        let vars = |l: &Block| -> Result<Vec<Symbol>> {
            let v = l.require(src, "vars")?;
            parse_name_list(src, v.start, v.end)
        };
        let level = match text(src, form) {
            "I" => {
                l.check_keys(src, &["form", "equation"])?;
                let e = l.require(src, "equation")?;
                NtqLevel::Quadratic {
                    equation: parse_word_in(src, e.start, e.end)?,
                }
            }
            "II" => {
                l.check_keys(src, &["form", "center_of", "vars"])?;
                let c = l.require(src, "center_of")?;
                NtqLevel::CentralizerExt {
                    center_of: parse_word_in(src, c.start, c.end)?,
                    vars: vars(l)?,
                }
            }
            "III" => {
                l.check_keys(src, &["form", "vars"])?;
                NtqLevel::FreeAbelian { vars: vars(l)? }
            }
            "IV" => {
                l.check_keys(src, &["form", "vars"])?;
                NtqLevel::Free { vars: vars(l)? }
            }
            other => {
                return Err(parse_error(
                    src,
                    form.start,
                    format!("unknown form `{other}`; expected I, II, III or IV"),
                ))
            }
        };
        levels.push(level);
    }
    NtqSystem::new(&b.name_or("S"), base, levels).map_err(|e| at(src, b.at, e))
}

pub fn write_ntq(s: &NtqSystem) -> String {
    let mut out = format!("ntq {} {{\n", s.name);
    let _ = writeln!(out, "  base: {};", group_body(&s.base, "  "));
    for l in &s.levels {
        let body = match l {
            NtqLevel::Quadratic { equation } => format!("equation: {equation};"),
            NtqLevel::CentralizerExt { center_of, vars } => {
                format!("center_of: {center_of}; vars: {};", join(vars))
            }
            NtqLevel::FreeAbelian { vars } | NtqLevel::Free { vars } => {
                format!("vars: {};", join(vars))
            }
        };
        let _ = writeln!(out, "  level {{ form: {}; {body} }}", l.form());
    }
    out.push_str("}\n");
    out
}
