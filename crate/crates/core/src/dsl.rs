//! Textual syntax for field descriptors and models.
//!
//! ```text
//! field := "algclosed"
//!        | "finite(" INT ")"
//!        | "custom(r=" INT ",hyp=" BOOL ")"
//!        | "laurent(" field ")"
//!        | "ratfn(" field ")"
//!        | "semiglobal(" field ";" model ")"
//! model := "{" item ("," item)* "}"
//! item  := "tree:" BOOL
//!        | "graph:{v:" INT ",e:[" pair ("," pair)* "]}"
//!        | "components:[" comp ("," comp)* "]"
//! comp  := "leaf" | "ratleaf" | model
//! pair  := "(" INT "," INT ")"
//! ```
//!
//! `Display` on descriptors emits the same syntax, so printing and
//! re-parsing round-trips structurally.

use std::fmt;

use crate::descriptor::{BaseClass, FieldDescriptor};
use crate::error::Error;
use crate::graphs::{ComponentField, Model, ReductionGraph};

/// Parses a descriptor and checks its validity; violations are reported as
/// an [`Error::InvalidDescriptor`].
pub fn parse_field(text: &str) -> Result<FieldDescriptor, Error> {
    let f = parse_field_unchecked(text)?;
    f.ensure_valid()?;
    Ok(f)
}

/// Parses a descriptor without running validation.
pub fn parse_field_unchecked(text: &str) -> Result<FieldDescriptor, Error> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let f = field(&mut cur)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.err("trailing input after descriptor"));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Base(b) => write!(f, "{b}"),
            FieldDescriptor::Cdvf(inner) => write!(f, "laurent({inner})"),
            FieldDescriptor::RationalFnField(inner) => write!(f, "ratfn({inner})"),
            FieldDescriptor::SemiGlobal { over, model } => {
                write!(f, "semiglobal({over}; {model})")
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut wrote = false;
        if let Some(g) = &self.graph {
            write!(f, "graph:{{v:{},e:[", g.vertex_count)?;
            for (i, (a, b)) in g.edges.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "({a},{b})")?;
            }
            write!(f, "]}}")?;
            wrote = true;
        }
        if let Some(t) = self.tree_flag {
            if wrote {
                write!(f, ",")?;
            }
            write!(f, "tree:{t}")?;
            wrote = true;
        }
        if wrote {
            write!(f, ",")?;
        }
        write!(f, "components:[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match c {
                ComponentField::Leaf => write!(f, "leaf")?,
                ComponentField::RationalLeaf => write!(f, "ratleaf")?,
                ComponentField::Nested(m) => write!(f, "{m}")?,
            }
        }
        write!(f, "]}}")
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.bump();
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, self.col, message)
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        self.skip_ws();
        match self.peek() {
            Some(b) if b == c => {
                self.bump();
                Ok(())
            }
            Some(b) => Err(self.err(format!("expected `{}`, found `{}`", c as char, b as char))),
            None => Err(self.err(format!("expected `{}`, found end of input", c as char))),
        }
    }

    /// Consumes the literal `word` if it is next (after whitespace).
    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        let end = self.pos + word.len();
        if end <= self.bytes.len() && &self.bytes[self.pos..end] == word.as_bytes() {
            // the next char must not extend the identifier
            let boundary = self
                .bytes
                .get(end)
                .is_none_or(|b| !b.is_ascii_alphanumeric() && *b != b'_');
            if boundary || !word.chars().last().unwrap().is_ascii_alphanumeric() {
                for _ in 0..word.len() {
                    self.bump();
                }
                return true;
            }
        }
        false
    }

    fn integer(&mut self) -> Result<i64, Error> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.bump();
        }
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start || (self.pos == start + 1 && self.bytes[start] == b'-') {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn boolean(&mut self) -> Result<bool, Error> {
        if self.eat_word("true") {
            Ok(true)
        } else if self.eat_word("false") {
            Ok(false)
        } else {
            Err(self.err("expected `true` or `false`"))
        }
    }
}

fn field(cur: &mut Cursor) -> Result<FieldDescriptor, Error> {
    cur.skip_ws();
    if cur.eat_word("algclosed") {
        return Ok(FieldDescriptor::base(BaseClass::AlgebraicallyClosed));
    }
    if cur.eat_word("finite") {
        cur.expect(b'(')?;
        let p = cur.integer()?;
        cur.expect(b')')?;
        if p < 0 {
            return Err(cur.err("field order must be non-negative"));
        }
        return Ok(FieldDescriptor::base(BaseClass::Finite(p as u64)));
    }
    if cur.eat_word("custom") {
        cur.expect(b'(')?;
        if !cur.eat_word("r") {
            return Err(cur.err("expected `r=`"));
        }
        cur.expect(b'=')?;
        let r = cur.integer()?;
        if r < 0 {
            return Err(cur.err("exponent r must be non-negative"));
        }
        cur.expect(b',')?;
        if !cur.eat_word("hyp") {
            return Err(cur.err("expected `hyp=`"));
        }
        cur.expect(b'=')?;
        let hyp = cur.boolean()?;
        cur.expect(b')')?;
        return Ok(FieldDescriptor::base(BaseClass::Custom {
            r: r as u32,
            fnfield_hypothesis: hyp,
        }));
    }
    if cur.eat_word("laurent") {
        cur.expect(b'(')?;
        let inner = field(cur)?;
        cur.expect(b')')?;
        return Ok(FieldDescriptor::cdvf(inner));
    }
    if cur.eat_word("ratfn") {
        cur.expect(b'(')?;
        let inner = field(cur)?;
        cur.expect(b')')?;
        return Ok(FieldDescriptor::rational_fn_field(inner));
    }
    if cur.eat_word("semiglobal") {
        cur.expect(b'(')?;
        let over = field(cur)?;
        cur.expect(b';')?;
        let m = model(cur)?;
        cur.expect(b')')?;
        return Ok(FieldDescriptor::semi_global(over, m));
    }
    Err(cur.err(
        "expected a field: algclosed, finite(..), custom(..), laurent(..), ratfn(..) or semiglobal(..)",
    ))
}

fn model(cur: &mut Cursor) -> Result<Model, Error> {
    cur.expect(b'{')?;
    let mut tree_flag = None;
    let mut graph = None;
    let mut components: Option<Vec<ComponentField>> = None;
    loop {
        cur.skip_ws();
        if cur.eat_word("tree") {
            cur.expect(b':')?;
            if tree_flag.replace(cur.boolean()?).is_some() {
                return Err(cur.err("duplicate `tree` item"));
            }
        } else if cur.eat_word("graph") {
            cur.expect(b':')?;
            if graph.replace(graph_literal(cur)?).is_some() {
                return Err(cur.err("duplicate `graph` item"));
            }
        } else if cur.eat_word("components") {
            cur.expect(b':')?;
            cur.expect(b'[')?;
            let mut comps = Vec::new();
            loop {
                cur.skip_ws();
                if cur.eat_word("leaf") {
                    comps.push(ComponentField::Leaf);
                } else if cur.eat_word("ratleaf") {
                    comps.push(ComponentField::RationalLeaf);
                } else if matches!(cur.peek(), Some(b'{')) {
                    comps.push(ComponentField::Nested(model(cur)?));
                } else {
                    return Err(cur.err("expected a component: leaf, ratleaf or a nested model"));
                }
                cur.skip_ws();
                match cur.peek() {
                    Some(b',') => {
                        cur.bump();
                    }
                    _ => break,
                }
            }
            cur.expect(b']')?;
            if components.replace(comps).is_some() {
                return Err(cur.err("duplicate `components` item"));
            }
        } else {
            return Err(cur.err("expected `tree`, `graph` or `components`"));
        }
        cur.skip_ws();
        match cur.peek() {
            Some(b',') => {
                cur.bump();
            }
            _ => break,
        }
    }
    cur.expect(b'}')?;
    let components = components.ok_or_else(|| cur.err("model needs a `components` list"))?;
    Ok(Model {
        tree_flag,
        graph,
        components,
    })
}

fn graph_literal(cur: &mut Cursor) -> Result<ReductionGraph, Error> {
    cur.expect(b'{')?;
    if !cur.eat_word("v") {
        return Err(cur.err("expected `v:`"));
    }
    cur.expect(b':')?;
    let v = cur.integer()?;
    if v < 1 {
        return Err(cur.err("graph needs at least one vertex"));
    }
    cur.expect(b',')?;
    if !cur.eat_word("e") {
        return Err(cur.err("expected `e:`"));
    }
    cur.expect(b':')?;
    cur.expect(b'[')?;
    let mut edges = Vec::new();
    loop {
        cur.skip_ws();
        if matches!(cur.peek(), Some(b']')) {
            break;
        }
        cur.expect(b'(')?;
        let a = cur.integer()?;
        cur.expect(b',')?;
        let b = cur.integer()?;
        cur.expect(b')')?;
        if a < 0 || b < 0 {
            return Err(cur.err("vertex indices must be non-negative"));
        }
        edges.push((a as usize, b as usize));
        cur.skip_ws();
        if matches!(cur.peek(), Some(b',')) {
            cur.bump();
        }
    }
    cur.expect(b']')?;
    cur.expect(b'}')?;
    Ok(ReductionGraph::new(v as usize, edges))
}

// ---------------------------------------------------------------------------
