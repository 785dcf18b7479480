//! The `.fincat` text format for categories (with optional presheaf and
//! coverage blocks) and the companion functor format.
//!
//! ```text
//! # comments run to end of line
//! category arrow
//! objects a b
//! morphism f : a -> b
//! identity a = id_a          # optional; auto-named id_<obj> otherwise
//! compose g f = h            # g ∘ f = h; entries with an identity are implied
//! presheaf P { at a = 2; at b = 1; along f = [0]; }
//! coverage K { on b : {f} {id_b}; }
//! ```
//!
//! Functor documents:
//!
//! ```text
//! functor F : arrow -> other
//! object a => x
//! morphism f => g
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::category::{Caps, FinCat, FinCatBuilder, MorId, ObjId};
use crate::error::{Error, Result};
use crate::functor::{validate_functor, FinFunctor};
use crate::presheaf::Presheaf;
use crate::sieve::Presieve;
use crate::topology::Coverage;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(char),
    Arrow,
    FatArrow,
    Newline,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(ch: char) -> bool {
    ch.is_ascii_alphanumeric() || matches!(ch, '_' | '.' | '\'')
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = li + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let col = i + 1;
            if ch == '#' {
                break;
            }
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            if is_word_char(ch) {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line: line_no,
                    col,
                });
                continue;
            }
            let next = chars.get(i + 1).copied();
            let tok = match (ch, next) {
                ('-', Some('>')) => {
                    i += 1;
                    Tok::Arrow
                }
                ('=', Some('>')) => {
                    i += 1;
                    Tok::FatArrow
                }
                ('{' | '}' | '[' | ']' | ':' | ';' | '=', _) => Tok::Sym(ch),
                _ => return Err(Error::parse(line_no, col, format!("unexpected character {ch:?}"))),
            };
            i += 1;
            out.push(Token { tok, line: line_no, col });
        }
        out.push(Token {
            tok: Tok::Newline,
            line: line_no,
            col: chars.len() + 1,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Name {
    text: String,
    line: usize,
    col: usize,
}

impl Name {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col, msg)
    }
}

#[derive(Debug)]
enum PresheafEntry {
    At(Name, Name),
    Along(Name, Vec<Name>),
}

#[derive(Debug)]
enum Stmt {
    Category(Name),
    Objects(Vec<Name>),
    Morphism(Name, Name, Name),
    Identity(Name, Name),
    Compose(Name, Name, Name),
    Presheaf(Name, Vec<PresheafEntry>),
    Coverage(Name, Vec<(Name, Vec<Vec<Name>>)>),
    Functor(Name, Name, Name),
    ObjectMap(Name, Name),
    MorphismMap(Name, Name),
}

impl Stmt {
    /// The first name in the statement, used to locate errors.
    fn anchor(&self) -> &Name {
        match self {
            Stmt::Category(n)
            | Stmt::Morphism(n, ..)
            | Stmt::Identity(n, _)
            | Stmt::Compose(n, ..)
            | Stmt::Presheaf(n, _)
            | Stmt::Coverage(n, _)
            | Stmt::Functor(n, ..)
            | Stmt::ObjectMap(n, _)
            | Stmt::MorphismMap(n, _) => n,
            Stmt::Objects(names) => names.first().unwrap_or(&EMPTY_NAME),
        }
    }
}

static EMPTY_NAME: Name = Name {
    text: String::new(),
    line: 1,
    col: 1,
};

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn eof_error(&self) -> Error {
        let (line, col) = self
            .toks
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        Error::parse(line, col, "unexpected end of input")
    }

    fn next(&mut self) -> Result<Token> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| self.eof_error())?;
        self.pos += 1;
        Ok(t)
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Some(Token { tok: Tok::Newline, .. })) {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> Result<Name> {
        let t = self.next()?;
        match t.tok {
            Tok::Word(text) => Ok(Name {
                text,
                line: t.line,
                col: t.col,
            }),
            other => Err(Error::parse(t.line, t.col, format!("expected a name, found {}", show(&other)))),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let t = self.next()?;
        if t.tok == want {
            Ok(())
        } else {
            Err(Error::parse(
                t.line,
                t.col,
                format!("expected {}, found {}", show(&want), show(&t.tok)),
            ))
        }
    }

    /// Like [`Parser::expect`], skipping newlines first (inside blocks).
    fn expect_in_block(&mut self, want: Tok) -> Result<()> {
        self.skip_newlines();
        self.expect(want)
    }

    fn word_in_block(&mut self) -> Result<Name> {
        self.skip_newlines();
        self.word()
    }

    fn peek_in_block(&mut self) -> Option<Tok> {
        self.skip_newlines();
        self.peek().map(|t| t.tok.clone())
    }

    fn end_of_statement(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(Token { tok: Tok::Newline, .. }) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(Error::parse(
                t.line,
                t.col,
                format!("expected end of line, found {}", show(&t.tok)),
            )),
        }
    }

    fn statements(&mut self) -> Result<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            self.skip_newlines();
            if self.peek().is_none() {
                return Ok(out);
            }
            let kw = self.word()?;
            let stmt = match kw.text.as_str() {
                "category" => Stmt::Category(self.word()?),
                "objects" => {
                    let mut names = Vec::new();
                    while let Some(Token { tok: Tok::Word(_), .. }) = self.peek() {
                        names.push(self.word()?);
                    }
                    Stmt::Objects(names)
                }
                "morphism" => {
                    let name = self.word()?;
                    match self.peek().map(|t| &t.tok) {
                        Some(Tok::FatArrow) => {
                            self.pos += 1;
                            Stmt::MorphismMap(name, self.word()?)
                        }
                        _ => {
                            self.expect(Tok::Sym(':'))?;
                            let dom = self.word()?;
                            self.expect(Tok::Arrow)?;
                            Stmt::Morphism(name, dom, self.word()?)
                        }
                    }
                }
                "object" => {
                    let name = self.word()?;
                    self.expect(Tok::FatArrow)?;
                    Stmt::ObjectMap(name, self.word()?)
                }
                "functor" => {
                    let name = self.word()?;
                    self.expect(Tok::Sym(':'))?;
                    let src = self.word()?;
                    self.expect(Tok::Arrow)?;
                    Stmt::Functor(name, src, self.word()?)
                }
                "identity" => {
                    let obj = self.word()?;
                    self.expect(Tok::Sym('='))?;
                    Stmt::Identity(obj, self.word()?)
                }
                "compose" => {
                    let g = self.word()?;
                    let f = self.word()?;
                    self.expect(Tok::Sym('='))?;
                    Stmt::Compose(g, f, self.word()?)
                }
                "presheaf" => self.presheaf_block()?,
                "coverage" => self.coverage_block()?,
                _ => return Err(kw.err(format!("unknown statement {:?}", kw.text))),
            };
            self.end_of_statement()?;
            out.push(stmt);
        }
    }

    fn presheaf_block(&mut self) -> Result<Stmt> {
        let name = self.word()?;
        self.expect_in_block(Tok::Sym('{'))?;
        let mut entries = Vec::new();
        loop {
            if self.peek_in_block() == Some(Tok::Sym('}')) {
                self.pos += 1;
                return Ok(Stmt::Presheaf(name, entries));
            }
            let kw = self.word_in_block()?;
            match kw.text.as_str() {
                "at" => {
                    let obj = self.word_in_block()?;
                    self.expect_in_block(Tok::Sym('='))?;
                    entries.push(PresheafEntry::At(obj, self.word_in_block()?));
                }
                "along" => {
                    let mor = self.word_in_block()?;
                    self.expect_in_block(Tok::Sym('='))?;
                    self.expect_in_block(Tok::Sym('['))?;
                    let mut values = Vec::new();
                    while self.peek_in_block() != Some(Tok::Sym(']')) {
                        values.push(self.word_in_block()?);
                    }
                    self.pos += 1;
                    entries.push(PresheafEntry::Along(mor, values));
                }
                _ => return Err(kw.err("expected `at` or `along`")),
            }
            self.expect_in_block(Tok::Sym(';'))?;
        }
    }

    fn coverage_block(&mut self) -> Result<Stmt> {
        let name = self.word()?;
        self.expect_in_block(Tok::Sym('{'))?;
        let mut entries = Vec::new();
        loop {
            if self.peek_in_block() == Some(Tok::Sym('}')) {
                self.pos += 1;
                return Ok(Stmt::Coverage(name, entries));
            }
            let kw = self.word_in_block()?;
            if kw.text != "on" {
                return Err(kw.err("expected `on`"));
            }
            let obj = self.word_in_block()?;
            self.expect_in_block(Tok::Sym(':'))?;
            let mut families = Vec::new();
            while self.peek_in_block() == Some(Tok::Sym('{')) {
                self.pos += 1;
                let mut members = Vec::new();
                while self.peek_in_block() != Some(Tok::Sym('}')) {
                    members.push(self.word_in_block()?);
                }
                self.pos += 1;
                families.push(members);
            }
            self.expect_in_block(Tok::Sym(';'))?;
            entries.push((obj, families));
        }
    }
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("{w:?}"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Arrow => "`->`".into(),
        Tok::FatArrow => "`=>`".into(),
        Tok::Newline => "end of line".into(),
    }
}

fn parse_statements(text: &str) -> Result<Vec<Stmt>> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.statements()
}

fn number(n: &Name) -> Result<usize> {
    n.text
        .parse()
        .map_err(|_| n.err(format!("expected a number, found {:?}", n.text)))
}

/// A parsed category document.
#[derive(Debug, Clone)]
pub struct CategoryDoc {
    pub category: Arc<FinCat>,
    pub presheaves: Vec<(String, Presheaf)>,
    pub coverages: Vec<(String, Coverage)>,
}

impl CategoryDoc {
    pub fn presheaf(&self, name: &str) -> Option<&Presheaf> {
        self.presheaves.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn coverage(&self, name: &str) -> Option<&Coverage> {
        self.coverages.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}

pub fn parse_document(text: &str) -> Result<CategoryDoc> {
    parse_document_with_caps(text, &Caps::default())
}

pub fn parse_document_with_caps(text: &str, caps: &Caps) -> Result<CategoryDoc> {
    let stmts = parse_statements(text)?;
    let mut name: Option<String> = None;
    for stmt in &stmts {
        if let Stmt::Category(n) = stmt {
            if name.is_some() {
                return Err(n.err("second `category` statement"));
            }
            name = Some(n.text.clone());
        }
    }
    let mut objects: HashMap<String, ObjId> = HashMap::new();
    let mut morphisms: HashMap<String, MorId> = HashMap::new();
    let mut b = FinCatBuilder::new(name.unwrap_or_else(|| "unnamed".into())).with_caps(*caps);
    let mut seen_pairs = HashSet::new();
    let mut blocks = Vec::new();
    let mut composes = Vec::new();
    for stmt in stmts {
        match stmt {
            Stmt::Category(_) => {}
            Stmt::Objects(names) => {
                for n in names {
                    if objects.contains_key(&n.text) {
                        return Err(n.err(format!("object {:?} declared twice", n.text)));
                    }
                    if objects.len() >= caps.max_objects {
                        return Err(Error::CapExceeded {
                            what: "objects",
                            limit: caps.max_objects,
                            actual: objects.len() + 1,
                        });
                    }
                    let id = b.add_object(n.text.clone());
                    objects.insert(n.text, id);
                }
            }
            Stmt::Morphism(n, d, c) => {
                if morphisms.contains_key(&n.text) {
                    return Err(n.err(format!("morphism {:?} declared twice", n.text)));
                }
                let dom = *objects.get(&d.text).ok_or_else(|| d.err("unknown object"))?;
                let cod = *objects.get(&c.text).ok_or_else(|| c.err("unknown object"))?;
                if morphisms.len() >= caps.max_morphisms {
                    return Err(Error::CapExceeded {
                        what: "morphisms",
                        limit: caps.max_morphisms,
                        actual: morphisms.len() + 1,
                    });
                }
                let id = b.add_morphism(n.text.clone(), dom, cod);
                morphisms.insert(n.text, id);
            }
            Stmt::Identity(o, m) => {
                let x = *objects.get(&o.text).ok_or_else(|| o.err("unknown object"))?;
                if b.identity_of(x).is_some() {
                    return Err(o.err("identity declared twice"));
                }
                let f = match morphisms.get(&m.text) {
                    Some(&f) => {
                        if b.dom_cod(f) != Some((x, x)) {
                            return Err(m.err("identity must be an endomorphism of its object"));
                        }
                        f
                    }
                    None => {
                        let f = b.add_morphism(m.text.clone(), x, x);
                        morphisms.insert(m.text.clone(), f);
                        f
                    }
                };
                b.set_identity(x, f);
            }
            Stmt::Compose(..) => composes.push(stmt),
            Stmt::Presheaf(..) | Stmt::Coverage(..) => blocks.push(stmt),
            Stmt::Functor(n, ..) | Stmt::ObjectMap(n, _) | Stmt::MorphismMap(n, _) => {
                return Err(n.err("functor statement in a category document"));
            }
        }
    }
    // Identities left implicit get their `id_<obj>` names now so that
    // composition entries may refer to them.
    let mut by_id: Vec<(ObjId, &String)> = objects.iter().map(|(n, &x)| (x, n)).collect();
    by_id.sort();
    for (x, name) in by_id {
        if b.identity_of(x).is_none() {
            let id_name = format!("id_{name}");
            if let std::collections::hash_map::Entry::Vacant(slot) = morphisms.entry(id_name) {
                let f = b.add_morphism(slot.key().clone(), x, x);
                slot.insert(f);
                b.set_identity(x, f);
            }
        }
    }
    for stmt in composes {
        let Stmt::Compose(g, f, h) = stmt else { unreachable!("only compositions are collected") };
        let look = |n: &Name| morphisms.get(&n.text).copied().ok_or_else(|| n.err("unknown morphism"));
        let (gi, fi, hi) = (look(&g)?, look(&f)?, look(&h)?);
        if !seen_pairs.insert((gi, fi)) {
            return Err(g.err(format!("duplicate composition entry for {} {}", g.text, f.text)));
        }
        b.set_compose(gi, fi, hi);
    }
    let c = Arc::new(b.build()?);
    let mut presheaves = Vec::new();
    let mut coverages = Vec::new();
    for stmt in blocks {
        match stmt {
            Stmt::Presheaf(n, entries) => {
                if presheaves.iter().any(|(m, _)| *m == n.text) {
                    return Err(n.err("presheaf declared twice"));
                }
                let p = resolve_presheaf(&c, &n, entries)?;
                presheaves.push((n.text, p));
            }
            Stmt::Coverage(n, entries) => {
                if coverages.iter().any(|(m, _)| *m == n.text) {
                    return Err(n.err("coverage declared twice"));
                }
                let cov = resolve_coverage(&c, entries)?;
                coverages.push((n.text, cov));
            }
            _ => unreachable!("only blocks are deferred"),
        }
    }
    Ok(CategoryDoc {
        category: c,
        presheaves,
        coverages,
    })
}

fn resolve_presheaf(c: &Arc<FinCat>, name: &Name, entries: Vec<PresheafEntry>) -> Result<Presheaf> {
    let mut carrier: Vec<Option<usize>> = vec![None; c.object_count()];
    let mut tables: Vec<Option<Vec<u32>>> = vec![None; c.morphism_count()];
    for e in entries {
        match e {
            PresheafEntry::At(o, k) => {
                let x = c.object_by_name(&o.text).ok_or_else(|| o.err("unknown object"))?;
                if carrier[x.index()].replace(number(&k)?).is_some() {
                    return Err(o.err("carrier given twice"));
                }
            }
            PresheafEntry::Along(m, values) => {
                let f = c.morphism_by_name(&m.text).ok_or_else(|| m.err("unknown morphism"))?;
                let vals = values
                    .iter()
                    .map(|v| {
                        number(v).and_then(|n| u32::try_from(n).map_err(|_| v.err("value too large")))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                if tables[f.index()].replace(vals).is_some() {
                    return Err(m.err("restriction given twice"));
                }
            }
        }
    }
    let carrier: Vec<usize> = c
        .objects()
        .map(|x| {
            carrier[x.index()].ok_or_else(|| {
                name.err(format!("no carrier given at {}", c.object_name(x)))
            })
        })
        .collect::<Result<_>>()?;
    let restriction = c
        .morphisms()
        .map(|f| match tables[f.index()].take() {
            Some(t) => Ok(t),
            None if c.is_identity(f) => Ok((0..carrier[c.cod(f).index()] as u32).collect()),
            None if carrier[c.cod(f).index()] == 0 => Ok(Vec::new()),
            None => Err(name.err(format!("no restriction given along {}", c.morphism_name(f)))),
        })
        .collect::<Result<_>>()?;
    Presheaf::new_validated(c.clone(), carrier, restriction)
}

fn resolve_coverage(c: &Arc<FinCat>, entries: Vec<(Name, Vec<Vec<Name>>)>) -> Result<Coverage> {
    let mut cov = Coverage::empty(c.clone());
    for (o, families) in entries {
        let x = c.object_by_name(&o.text).ok_or_else(|| o.err("unknown object"))?;
        for fam in families {
            let mut members = Vec::with_capacity(fam.len());
            for m in &fam {
                let f = c.morphism_by_name(&m.text).ok_or_else(|| m.err("unknown morphism"))?;
                if c.cod(f) != x {
                    return Err(m.err(format!("{} does not land in {}", m.text, o.text)));
                }
                members.push(f);
            }
            cov.insert(Presieve::new(c, x, members)?);
        }
    }
    Ok(cov)
}

pub fn parse_category(text: &str) -> Result<FinCat> {
    let doc = parse_document(text)?;
    Ok(Arc::try_unwrap(doc.category).unwrap_or_else(|arc| (*arc).clone()))
}

pub fn emit_category(c: &FinCat) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "category {}", c.name());
    let objs: Vec<&str> = c.objects().map(|x| c.object_name(x)).collect();
    let _ = writeln!(out, "objects {}", objs.join(" "));
    for f in c.morphisms() {
        let _ = writeln!(
            out,
            "morphism {} : {} -> {}",
            c.morphism_name(f),
            c.object_name(c.dom(f)),
            c.object_name(c.cod(f))
        );
    }
    for x in c.objects() {
        let _ = writeln!(out, "identity {} = {}", c.object_name(x), c.morphism_name(c.identity(x)));
    }
    for g in c.morphisms().filter(|&g| !c.is_identity(g)) {
        for &f in c.incoming(c.dom(g)) {
            if c.is_identity(f) {
                continue;
            }
            let _ = writeln!(
                out,
                "compose {} {} = {}",
                c.morphism_name(g),
                c.morphism_name(f),
                c.morphism_name(c.compose(g, f))
            );
        }
    }
    out
}

pub fn emit_presheaf(name: &str, p: &Presheaf) -> String {
    let c = p.base();
    let mut out = format!("presheaf {name} {{\n");
    for x in c.objects() {
        let _ = writeln!(out, "  at {} = {};", c.object_name(x), p.carrier(x));
    }
    for f in c.morphisms().filter(|&f| !c.is_identity(f)) {
        let vals: Vec<String> = p.table(f).iter().map(u32::to_string).collect();
        let _ = writeln!(out, "  along {} = [{}];", c.morphism_name(f), vals.join(" "));
    }
    out.push_str("}\n");
    out
}

pub fn emit_coverage(name: &str, cov: &Coverage) -> String {
    let c = cov.base();
    let mut out = format!("coverage {name} {{\n");
    for x in c.objects() {
        let fams = cov.covering(x);
        if fams.is_empty() {
            continue;
        }
        let _ = write!(out, "  on {} :", c.object_name(x));
        for p in fams {
            let names: Vec<&str> = p.iter().map(|f| c.morphism_name(f)).collect();
            let _ = write!(out, " {{{}}}", names.join(" "));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

pub fn emit_document(doc: &CategoryDoc) -> String {
    let mut out = emit_category(&doc.category);
    for (n, p) in &doc.presheaves {
        out.push_str(&emit_presheaf(n, p));
    }
    for (n, cov) in &doc.coverages {
        out.push_str(&emit_coverage(n, cov));
    }
    out
}

/// Parses a functor document between two given categories. Identity
/// morphisms may be left unmapped.
pub fn parse_functor(text: &str, source: &Arc<FinCat>, target: &Arc<FinCat>) -> Result<FinFunctor> {
    let stmts = parse_statements(text)?;
    let mut header: Option<Name> = None;
    let mut object_map: Vec<Option<ObjId>> = vec![None; source.object_count()];
    let mut morphism_map: Vec<Option<MorId>> = vec![None; source.morphism_count()];
    for stmt in stmts {
        match stmt {
            Stmt::Functor(n, s, t) => {
                if header.is_some() {
                    return Err(n.err("second `functor` header"));
                }
                if s.text != source.name() {
                    return Err(s.err(format!("source category is {:?}", source.name())));
                }
                if t.text != target.name() {
                    return Err(t.err(format!("target category is {:?}", target.name())));
                }
                header = Some(n);
            }
            Stmt::ObjectMap(a, x) => {
                let ai = source.object_by_name(&a.text).ok_or_else(|| a.err("unknown source object"))?;
                let xi = target.object_by_name(&x.text).ok_or_else(|| x.err("unknown target object"))?;
                if object_map[ai.index()].replace(xi).is_some() {
                    return Err(a.err("object mapped twice"));
                }
            }
            Stmt::MorphismMap(f, g) => {
                let fi = source.morphism_by_name(&f.text).ok_or_else(|| f.err("unknown source morphism"))?;
                let gi = target.morphism_by_name(&g.text).ok_or_else(|| g.err("unknown target morphism"))?;
                if morphism_map[fi.index()].replace(gi).is_some() {
                    return Err(f.err("morphism mapped twice"));
                }
            }
            other => {
                return Err(other.anchor().err("category statement in a functor document"));
            }
        }
    }
    let header = header.ok_or_else(|| Error::parse(1, 1, "missing `functor` header"))?;
    let objects: Vec<ObjId> = source
        .objects()
        .map(|x| {
            object_map[x.index()]
                .ok_or_else(|| header.err(format!("object {} is not mapped", source.object_name(x))))
        })
        .collect::<Result<_>>()?;
    let morphisms: Vec<MorId> = source
        .morphisms()
        .map(|f| match morphism_map[f.index()] {
            Some(g) => Ok(g),
            None if source.is_identity(f) => Ok(target.identity(objects[source.dom(f).index()])),
            None => Err(header.err(format!("morphism {} is not mapped", source.morphism_name(f)))),
        })
        .collect::<Result<_>>()?;
    let functor = FinFunctor::new(header.text, source.clone(), target.clone(), objects, morphisms)?;
    validate_functor(&functor).into_result()?;
    Ok(functor)
}

pub fn emit_functor(f: &FinFunctor) -> String {
    let (s, t) = (&*f.source, &*f.target);
    let mut out = format!("functor {} : {} -> {}\n", f.name, s.name(), t.name());
    for x in s.objects() {
        let _ = writeln!(out, "object {} => {}", s.object_name(x), t.object_name(f.obj(x)));
    }
    for m in s.morphisms() {
        let _ = writeln!(out, "morphism {} => {}", s.morphism_name(m), t.morphism_name(f.mor(m)));
    }
    out
}
