//! Line-oriented doctrine description language.
//!
//! ```text
//! object A;
//! arrow f : A -> B;
//! compose g f = h;
//! product A B = P [pr1=p, pr2=q];
//! fiber A { elems e1 e2; top e2; order e1 <= e2; }
//! reindex f { e -> e', ... }
//! delta A = e;
//! ```
//!
//! The arrow `id_A : A -> A` is the identity of `A`; it is synthesized when not declared,
//! together with its composites and its reindexing.

use doctrines::doctrine::Doctrine;
use doctrines::fincat::{ArrowInfo, CatWindow, ProductCell};
use doctrines::infsl::InfSemilattice;
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Reference { pos: Pos, msg: String },
    #[error("{pos}: duplicate {msg}")]
    Duplicate { pos: Pos, msg: String },
    #[error("totality: {0}")]
    Totality(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowDecl {
    pub name: Name,
    pub dom: Name,
    pub cod: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeDecl {
    pub g: Name,
    pub f: Name,
    pub h: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductDecl {
    pub left: Name,
    pub right: Name,
    pub apex: Name,
    pub pr1: Name,
    pub pr2: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberDecl {
    pub object: Name,
    pub elems: Vec<Name>,
    pub top: Option<Name>,
    pub order: Vec<(Name, Name)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReindexDecl {
    pub arrow: Name,
    pub map: Vec<(Name, Name)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaDecl {
    pub object: Name,
    pub elem: Name,
}

/// Parsed, not yet elaborated, declarations in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DoctrineDocument {
    pub objects: Vec<Name>,
    pub arrows: Vec<ArrowDecl>,
    pub composes: Vec<ComposeDecl>,
    pub products: Vec<ProductDecl>,
    pub fibers: Vec<FiberDecl>,
    pub reindex: Vec<ReindexDecl>,
    pub deltas: Vec<DeltaDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Punct(&'static str),
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "_.'@|+*^!?/$%&~".contains(c)
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos {
                line: ln + 1,
                col: i + 1,
            };
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                break;
            } else if c == '"' {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(DslError::Syntax {
                                pos,
                                msg: "unterminated quoted name".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                _ => {
                                    return Err(DslError::Syntax {
                                        pos: Pos {
                                            line: ln + 1,
                                            col: i + 1,
                                        },
                                        msg: "bad escape in quoted name".into(),
                                    })
                                }
                            }
                            i += 1;
                        }
                        Some(&ch) => s.push(ch),
                    }
                    i += 1;
                }
                i += 1;
                out.push((Tok::Ident(s), pos));
            } else if ident_char(c) {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            } else {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let p = match two.as_str() {
                    "->" => Some("->"),
                    "<=" => Some("<="),
                    _ => None,
                };
                if let Some(p) = p {
                    out.push((Tok::Punct(p), pos));
                    i += 2;
                    continue;
                }
                let p = match c {
                    ';' => ";",
                    ':' => ":",
                    '{' => "{",
                    '}' => "}",
                    '[' => "[",
                    ']' => "]",
                    '=' => "=",
                    ',' => ",",
                    _ => {
                        return Err(DslError::Syntax {
                            pos,
                            msg: format!("unexpected character '{c}'"),
                        })
                    }
                };
                out.push((Tok::Punct(p), pos));
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn peek_punct(&self, p: &str) -> bool {
        matches!(self.toks.get(self.at), Some((Tok::Punct(q), _)) if *q == p)
    }

    fn peek_word(&self, w: &str) -> bool {
        matches!(self.toks.get(self.at), Some((Tok::Ident(s), _)) if s == w)
    }

    fn punct(&mut self, p: &str) -> Result<(), DslError> {
        if self.peek_punct(p) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected '{p}'{}", self.found()))
        }
    }

    fn found(&self) -> String {
        match self.toks.get(self.at) {
            Some((Tok::Ident(s), _)) => format!(", found '{s}'"),
            Some((Tok::Punct(p), _)) => format!(", found '{p}'"),
            None => ", found end of input".into(),
        }
    }

    fn name(&mut self) -> Result<Name, DslError> {
        match self.toks.get(self.at) {
            Some((Tok::Ident(s), pos)) => {
                let n = Name {
                    text: s.clone(),
                    pos: *pos,
                };
                self.at += 1;
                Ok(n)
            }
            _ => self.err(format!("expected a name{}", self.found())),
        }
    }

    fn word(&mut self, w: &str) -> Result<(), DslError> {
        if self.peek_word(w) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected '{w}'{}", self.found()))
        }
    }
}

pub fn parse(text: &str) -> Result<DoctrineDocument, DslError> {
    let toks = lex(text)?;
    let end = Pos {
        line: text.lines().count().max(1),
        col: text.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    let mut p = Parser { toks, at: 0, end };
    let mut doc = DoctrineDocument::default();
    while p.at < p.toks.len() {
        let kw = p.name()?;
        match kw.text.as_str() {
            "object" => {
                doc.objects.push(p.name()?);
                p.punct(";")?;
            }
            "arrow" => {
                let name = p.name()?;
                p.punct(":")?;
                let dom = p.name()?;
                p.punct("->")?;
                let cod = p.name()?;
                p.punct(";")?;
                doc.arrows.push(ArrowDecl { name, dom, cod });
            }
            "compose" => {
                let g = p.name()?;
                let f = p.name()?;
                p.punct("=")?;
                let h = p.name()?;
                p.punct(";")?;
                doc.composes.push(ComposeDecl { g, f, h });
            }
            "product" => {
                let left = p.name()?;
                let right = p.name()?;
                p.punct("=")?;
                let apex = p.name()?;
                p.punct("[")?;
                p.word("pr1")?;
                p.punct("=")?;
                let pr1 = p.name()?;
                p.punct(",")?;
                p.word("pr2")?;
                p.punct("=")?;
                let pr2 = p.name()?;
                p.punct("]")?;
                p.punct(";")?;
                doc.products.push(ProductDecl {
                    left,
                    right,
                    apex,
                    pr1,
                    pr2,
                });
            }
            "fiber" => {
                let object = p.name()?;
                p.punct("{")?;
                let mut fd = FiberDecl {
                    object,
                    elems: Vec::new(),
                    top: None,
                    order: Vec::new(),
                };
                let mut seen_elems = false;
                while !p.peek_punct("}") {
                    let st = p.name()?;
                    match st.text.as_str() {
                        "elems" => {
                            if seen_elems {
                                return Err(DslError::Duplicate {
                                    pos: st.pos,
                                    msg: "'elems' in fiber block".into(),
                                });
                            }
                            seen_elems = true;
                            while !p.peek_punct(";") {
                                fd.elems.push(p.name()?);
                            }
                        }
                        "top" => {
                            if fd.top.is_some() {
                                return Err(DslError::Duplicate {
                                    pos: st.pos,
                                    msg: "'top' in fiber block".into(),
                                });
                            }
                            fd.top = Some(p.name()?);
                        }
                        "order" => {
                            let a = p.name()?;
                            p.punct("<=")?;
                            let b = p.name()?;
                            fd.order.push((a, b));
                        }
                        other => {
                            return Err(DslError::Syntax {
                                pos: st.pos,
                                msg: format!("unknown fiber statement '{other}'"),
                            })
                        }
                    }
                    p.punct(";")?;
                }
                p.punct("}")?;
                if p.peek_punct(";") {
                    p.at += 1;
                }
                doc.fibers.push(fd);
            }
            "reindex" => {
                let arrow = p.name()?;
                p.punct("{")?;
                let mut map = Vec::new();
                while !p.peek_punct("}") {
                    let a = p.name()?;
                    p.punct("->")?;
                    let b = p.name()?;
                    map.push((a, b));
                    if !p.peek_punct("}") {
                        p.punct(",")?;
                    }
                }
                p.punct("}")?;
                if p.peek_punct(";") {
                    p.at += 1;
                }
                doc.reindex.push(ReindexDecl { arrow, map });
            }
            "delta" => {
                let object = p.name()?;
                p.punct("=")?;
                let elem = p.name()?;
                p.punct(";")?;
                doc.deltas.push(DeltaDecl { object, elem });
            }
            other => {
                return Err(DslError::Syntax {
                    pos: kw.pos,
                    msg: format!("unknown directive '{other}'"),
                })
            }
        }
    }
    Ok(doc)
}

fn lookup(table: &HashMap<String, usize>, n: &Name, what: &str) -> Result<usize, DslError> {
    table
        .get(&n.text)
        .copied()
        .ok_or_else(|| DslError::Reference {
            pos: n.pos,
            msg: format!("unknown {what} '{}'", n.text),
        })
}

fn reference<T>(pos: Pos, msg: String) -> Result<T, DslError> {
    Err(DslError::Reference { pos, msg })
}

/// Resolve names, synthesize identities, and build the doctrine.
pub fn elaborate(doc: &DoctrineDocument, name: &str) -> Result<Doctrine, DslError> {
    let mut objects: Vec<String> = Vec::new();
    let mut obj_ix: HashMap<String, usize> = HashMap::new();
    for o in &doc.objects {
        if obj_ix.insert(o.text.clone(), objects.len()).is_some() {
            return Err(DslError::Duplicate {
                pos: o.pos,
                msg: format!("object '{}'", o.text),
            });
        }
        objects.push(o.text.clone());
    }
    let mut arrows: Vec<ArrowInfo> = Vec::new();
    let mut arr_ix: HashMap<String, usize> = HashMap::new();
    for a in &doc.arrows {
        let dom = lookup(&obj_ix, &a.dom, "object")?;
        let cod = lookup(&obj_ix, &a.cod, "object")?;
        if arr_ix.insert(a.name.text.clone(), arrows.len()).is_some() {
            return Err(DslError::Duplicate {
                pos: a.name.pos,
                msg: format!("arrow '{}'", a.name.text),
            });
        }
        arrows.push(ArrowInfo {
            name: a.name.text.clone(),
            dom,
            cod,
        });
    }
    let mut identity = Vec::with_capacity(objects.len());
    for (i, o) in objects.iter().enumerate() {
        let id_name = format!("id_{o}");
        match arr_ix.get(&id_name) {
            Some(&k) => {
                if arrows[k].dom != i || arrows[k].cod != i {
                    let pos = doc.arrows[k].name.pos;
                    return reference(pos, format!("'{id_name}' must be an arrow {o} -> {o}"));
                }
                identity.push(k);
            }
            None => {
                arr_ix.insert(id_name.clone(), arrows.len());
                identity.push(arrows.len());
                arrows.push(ArrowInfo {
                    name: id_name,
                    dom: i,
                    cod: i,
                });
            }
        }
    }
    let is_id = |f: usize| identity[arrows[f].dom] == f;
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    for c in &doc.composes {
        let g = lookup(&arr_ix, &c.g, "arrow")?;
        let f = lookup(&arr_ix, &c.f, "arrow")?;
        let h = lookup(&arr_ix, &c.h, "arrow")?;
        if arrows[f].cod != arrows[g].dom {
            return reference(
                c.g.pos,
                format!("'{}' and '{}' are not composable", c.g.text, c.f.text),
            );
        }
        if arrows[h].dom != arrows[f].dom || arrows[h].cod != arrows[g].cod {
            return reference(
                c.h.pos,
                format!(
                    "'{}' has the wrong type for {} . {}",
                    c.h.text, c.g.text, c.f.text
                ),
            );
        }
        let forced = if is_id(g) {
            Some(f)
        } else if is_id(f) {
            Some(g)
        } else {
            None
        };
        if forced.is_some_and(|x| x != h) {
            return reference(
                c.h.pos,
                format!(
                    "{} . {} must be the non-identity factor",
                    c.g.text, c.f.text
                ),
            );
        }
        if table.insert((g, f), h).is_some() {
            return Err(DslError::Duplicate {
                pos: c.g.pos,
                msg: format!("composite {} . {}", c.g.text, c.f.text),
            });
        }
    }
    let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); objects.len()];
    for (k, a) in arrows.iter().enumerate() {
        out_of[a.dom].push(k);
    }
    for f in 0..arrows.len() {
        for &g in &out_of[arrows[f].cod] {
            if is_id(f) || is_id(g) || table.contains_key(&(g, f)) {
                continue;
            }
            return Err(DslError::Totality(format!(
                "missing composite {} . {} ({} : {} -> {}, {} : {} -> {})",
                arrows[g].name,
                arrows[f].name,
                arrows[f].name,
                objects[arrows[f].dom],
                objects[arrows[f].cod],
                arrows[g].name,
                objects[arrows[g].dom],
                objects[arrows[g].cod]
            )));
        }
    }
    let mut products = BTreeMap::new();
    for pd in &doc.products {
        let l = lookup(&obj_ix, &pd.left, "object")?;
        let r = lookup(&obj_ix, &pd.right, "object")?;
        let apex = lookup(&obj_ix, &pd.apex, "object")?;
        let pr1 = lookup(&arr_ix, &pd.pr1, "arrow")?;
        let pr2 = lookup(&arr_ix, &pd.pr2, "arrow")?;
        if (arrows[pr1].dom, arrows[pr1].cod) != (apex, l)
            || (arrows[pr2].dom, arrows[pr2].cod) != (apex, r)
        {
            return reference(
                pd.pr1.pos,
                format!(
                    "projections must be arrows {0} -> {1} and {0} -> {2}",
                    pd.apex.text, pd.left.text, pd.right.text
                ),
            );
        }
        if products
            .insert((l, r), ProductCell { apex, pr1, pr2 })
            .is_some()
        {
            return Err(DslError::Duplicate {
                pos: pd.left.pos,
                msg: format!("product {} {}", pd.left.text, pd.right.text),
            });
        }
    }
    let window = CatWindow::dense(
        objects.clone(),
        arrows.clone(),
        identity.clone(),
        products,
        |g, f| {
            if is_id(g) {
                Some(f)
            } else if is_id(f) {
                Some(g)
            } else {
                table.get(&(g, f)).copied()
            }
        },
    )
    .map_err(|e| DslError::Invalid(e.to_string()))?;
    let mut fibers: Vec<Option<(Arc<InfSemilattice>, HashMap<String, usize>)>> =
        vec![None; objects.len()];
    for fd in &doc.fibers {
        let o = lookup(&obj_ix, &fd.object, "object")?;
        if fibers[o].is_some() {
            return Err(DslError::Duplicate {
                pos: fd.object.pos,
                msg: format!("fiber of '{}'", fd.object.text),
            });
        }
        let mut ix: HashMap<String, usize> = HashMap::new();
        let labels: Vec<String> = fd.elems.iter().map(|e| e.text.clone()).collect();
        for (i, e) in fd.elems.iter().enumerate() {
            if ix.insert(e.text.clone(), i).is_some() {
                return Err(DslError::Duplicate {
                    pos: e.pos,
                    msg: format!("element '{}'", e.text),
                });
            }
        }
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in &fd.order {
            let (i, j) = (lookup(&ix, a, "element")?, lookup(&ix, b, "element")?);
            leq[i * n + j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        let Some(top) = &fd.top else {
            return reference(
                fd.object.pos,
                format!("fiber of '{}' declares no top", fd.object.text),
            );
        };
        let t = lookup(&ix, top, "element")?;
        let l = InfSemilattice::new(labels, leq, t)
            .map_err(|e| DslError::Invalid(format!("fiber of '{}': {e}", fd.object.text)))?;
        fibers[o] = Some((Arc::new(l), ix));
    }
    let fibers: Vec<(Arc<InfSemilattice>, HashMap<String, usize>)> = fibers
        .into_iter()
        .enumerate()
        .map(|(o, f)| {
            f.ok_or_else(|| DslError::Totality(format!("object '{}' has no fiber", objects[o])))
        })
        .collect::<Result<_, _>>()?;
    let mut reindex: Vec<Option<Vec<usize>>> = vec![None; arrows.len()];
    for rd in &doc.reindex {
        let f = lookup(&arr_ix, &rd.arrow, "arrow")?;
        if reindex[f].is_some() {
            return Err(DslError::Duplicate {
                pos: rd.arrow.pos,
                msg: format!("reindexing of '{}'", rd.arrow.text),
            });
        }
        let (src, dst) = (&fibers[arrows[f].cod], &fibers[arrows[f].dom]);
        let mut m = vec![usize::MAX; src.0.len()];
        for (a, b) in &rd.map {
            let i = lookup(&src.1, a, "element")?;
            let j = lookup(&dst.1, b, "element")?;
            if m[i] != usize::MAX {
                return Err(DslError::Duplicate {
                    pos: a.pos,
                    msg: format!("image of '{}'", a.text),
                });
            }
            m[i] = j;
        }
        if let Some(i) = m.iter().position(|&x| x == usize::MAX) {
            return Err(DslError::Totality(format!(
                "reindexing of '{}' has no image for '{}'",
                rd.arrow.text,
                src.0.label(i)
            )));
        }
        reindex[f] = Some(m);
    }
    let reindex: Vec<Vec<usize>> = reindex
        .into_iter()
        .enumerate()
        .map(|(f, m)| match m {
            Some(m) => Ok(m),
            None if is_id(f) => Ok(fibers[arrows[f].dom].0.elements().collect()),
            None => Err(DslError::Totality(format!(
                "arrow '{}' has no reindexing",
                arrows[f].name
            ))),
        })
        .collect::<Result<_, _>>()?;
    let mut delta = vec![None; objects.len()];
    for dd in &doc.deltas {
        let o = lookup(&obj_ix, &dd.object, "object")?;
        let Ok(cell) = window.product(o, o) else {
            return reference(
                dd.object.pos,
                format!("delta of '{}' needs a product {0} {0}", dd.object.text),
            );
        };
        if delta[o].is_some() {
            return Err(DslError::Duplicate {
                pos: dd.object.pos,
                msg: format!("delta of '{}'", dd.object.text),
            });
        }
        delta[o] = Some(lookup(&fibers[cell.apex].1, &dd.elem, "element")?);
    }
    Doctrine::new(
        name,
        Arc::new(window),
        fibers.into_iter().map(|f| f.0).collect(),
        reindex,
        delta,
    )
    .map_err(|e| DslError::Invalid(e.to_string()))
}

pub fn parse_doctrine(text: &str, name: &str) -> Result<Doctrine, DslError> {
    elaborate(&parse(text)?, name)
}

/// A name as written in a file: bare when it lexes as one identifier, quoted otherwise.
pub fn quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(ident_char) {
        s.to_string()
    } else {
        let mut q = String::from("\"");
        for c in s.chars() {
            if c == '"' || c == '\\' {
                q.push('\\');
            }
            q.push(c);
        }
        q.push('"');
        q
    }
}

/// Render a doctrine in the description language. Identities must be named `id_A`.
pub fn to_dsl(p: &Doctrine) -> Result<String, DslError> {
    let c = p.base();
    let mut s = String::new();
    let _ = writeln!(s, "# {}", p.name);
    for o in c.objects() {
        let _ = writeln!(s, "object {};", quote(c.object_name(o)));
    }
    for f in c.arrows() {
        if c.is_identity(f) && c.arrow_name(f) != format!("id_{}", c.object_name(c.dom(f))) {
            return Err(DslError::Invalid(format!(
                "identity '{}' of '{}' is not named id_{}",
                c.arrow_name(f),
                c.object_name(c.dom(f)),
                c.object_name(c.dom(f))
            )));
        }
        let _ = writeln!(
            s,
            "arrow {} : {} -> {};",
            quote(c.arrow_name(f)),
            quote(c.object_name(c.dom(f))),
            quote(c.object_name(c.cod(f)))
        );
    }
    for f in c.arrows() {
        if c.is_identity(f) {
            continue;
        }
        for &g in c.out_of(c.cod(f)) {
            if c.is_identity(g) {
                continue;
            }
            let _ = writeln!(
                s,
                "compose {} {} = {};",
                quote(c.arrow_name(g)),
                quote(c.arrow_name(f)),
                quote(c.arrow_name(c.compose(g, f)))
            );
        }
    }
    for (&(l, r), cell) in c.products() {
        let _ = writeln!(
            s,
            "product {} {} = {} [pr1={}, pr2={}];",
            quote(c.object_name(l)),
            quote(c.object_name(r)),
            quote(c.object_name(cell.apex)),
            quote(c.arrow_name(cell.pr1)),
            quote(c.arrow_name(cell.pr2))
        );
    }
    for o in c.objects() {
        let l = p.fiber(o);
        let elems: Vec<String> = l.elements().map(|e| quote(l.label(e))).collect();
        let _ = write!(
            s,
            "fiber {} {{ elems {}; top {};",
            quote(c.object_name(o)),
            elems.join(" "),
            quote(l.label(l.top()))
        );
        for x in l.elements() {
            for y in l.elements() {
                // covering pairs only
                if x != y
                    && l.leq(x, y)
                    && !l
                        .elements()
                        .any(|z| z != x && z != y && l.leq(x, z) && l.leq(z, y))
                {
                    let _ = write!(s, " order {} <= {};", quote(l.label(x)), quote(l.label(y)));
                }
            }
        }
        s.push_str(" }\n");
    }
    for f in c.arrows() {
        if c.is_identity(f) {
            continue;
        }
        let (src, dst) = (p.fiber(c.cod(f)), p.fiber(c.dom(f)));
        let pairs: Vec<String> = src
            .elements()
            .map(|e| {
                format!(
                    "{} -> {}",
                    quote(src.label(e)),
                    quote(dst.label(p.re(f, e)))
                )
            })
            .collect();
        let _ = writeln!(
            s,
            "reindex {} {{ {} }}",
            quote(c.arrow_name(f)),
            pairs.join(", ")
        );
    }
    for o in c.objects() {
        if let (Some(d), Ok(cell)) = (p.delta(o), c.product(o, o)) {
            let _ = writeln!(
                s,
                "delta {} = {};",
                quote(c.object_name(o)),
                quote(p.fiber(cell.apex).label(d))
            );
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use doctrines::doctrine::{check_doctrine, check_elementary};
    use doctrines::fixtures::{blur, finset_sub};

    #[test]
    fn empty_file_is_empty_window() {
        let p = parse_doctrine("# nothing\n", "empty").unwrap();
        assert_eq!(p.base().n_objects(), 0);
        assert!(check_doctrine(&p).passed());
    }

    #[test]
    fn blur_round_trips_through_text() {
        let p = blur();
        let text = to_dsl(&p).unwrap();
        let q = parse_doctrine(&text, &p.name).unwrap();
        assert_eq!(q.to_data(), p.to_data());
        assert!(check_elementary(&q).passed());
        assert_eq!(to_dsl(&q).unwrap(), text);
    }

    #[test]
    fn identities_are_synthesized() {
        let text = "object A; object B; arrow f : A -> B;\n\
                    fiber A { elems t; top t; } fiber B { elems t; top t; }\n\
                    reindex f { t -> t }";
        let p = parse_doctrine(text, "s").unwrap();
        assert_eq!(p.base().n_arrows(), 3);
        assert_eq!(p.base().arrow_name(p.base().id(1)), "id_B");
        assert!(check_doctrine(&p).passed());
    }

    #[test]
    fn missing_composite_names_the_pair() {
        let text = "object A; arrow e : A -> A; fiber A { elems t; top t; } reindex e { t -> t }";
        match parse_doctrine(text, "s") {
            Err(DslError::Totality(m)) => assert!(m.contains("e . e"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("object A;\narrow f A -> A;") {
            Err(DslError::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 2, col: 9 }),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("objekt A;"), Err(DslError::Syntax { .. })));
        assert!(matches!(
            parse_doctrine("object A; object A;", "d"),
            Err(DslError::Duplicate { .. })
        ));
    }

    #[test]
    fn quoted_names() {
        assert_eq!(quote("{0,1}"), "\"{0,1}\"");
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
        let p = finset_sub(2);
        let q = parse_doctrine(&to_dsl(&p).unwrap(), &p.name).unwrap();
        assert_eq!(q.to_data(), p.to_data());
    }
}
