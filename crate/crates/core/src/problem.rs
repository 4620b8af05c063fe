//! Problem files: a small line-based text format declaring a quiver, a
//! coalgebra basis and a localization set.
//!
//! ```text
//! # comment
//! quiver
//! vertex x
//! vertex y
//! arrow a : y -> x
//! coalgebra full            # or: coalgebra paths a a*b y
//! localize x
//! cap 16                    # optional, default 16
//! ```
//!
//! Tokens are whitespace-insensitive; a path expression is either a
//! vertex id (the trivial path) or arrow ids joined by `*`, composed
//! left to right. Declared path lists are closed under subpaths
//! automatically; the additions are reported so the caller can print a
//! notice.

use crate::coalgebra::PathCoalgebra;
use crate::error::{Error, Result};
use crate::localization::LocalizationContext;
use crate::quiver::{Path, Quiver, VertexId};
use std::sync::Arc;

pub const DEFAULT_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoalgebraDecl {
    Full,
    /// Declared path expressions, in declaration order.
    Paths(Vec<Path>),
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub quiver: Quiver,
    pub coalgebra: CoalgebraDecl,
    pub localize: Vec<VertexId>,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    text: String,
    line: usize,
    col: usize,
}

fn tokenize_line(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let bytes: Vec<char> = line.chars().collect();
    let mut i = 0usize;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let col = i + 1;
        if ch == ':' || ch == '*' {
            tokens.push(Token {
                text: ch.to_string(),
                line: lineno,
                col,
            });
            i += 1;
        } else if ch == '-' {
            if i + 1 < bytes.len() && bytes[i + 1] == '>' {
                tokens.push(Token {
                    text: "->".into(),
                    line: lineno,
                    col,
                });
                i += 2;
            } else {
                return Err(Error::Syntax {
                    line: lineno,
                    col,
                    expected: "`->`".into(),
                });
            }
        } else if ch.is_alphanumeric() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            tokens.push(Token {
                text: bytes[start..i].iter().collect(),
                line: lineno,
                col,
            });
        } else {
            return Err(Error::Syntax {
                line: lineno,
                col,
                expected: "identifier, `:`, `->` or `*`".into(),
            });
        }
    }
    Ok(tokens)
}

struct LineParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn new(tokens: &'a [Token]) -> Self {
        LineParser {
            tokens,
            pos: 0,
            line: tokens[0].line,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, expected: &str) -> Result<&Token> {
        let t = self.tokens.get(self.pos).ok_or(Error::Syntax {
            line: self.line,
            col: self
                .tokens
                .last()
                .map(|t| t.col + t.text.len())
                .unwrap_or(1),
            expected: expected.into(),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, literal: &str) -> Result<()> {
        let line = self.line;
        let t = self.next(&format!("`{literal}`"))?;
        if t.text != literal {
            return Err(Error::Syntax {
                line,
                col: t.col,
                expected: format!("`{literal}`"),
            });
        }
        Ok(())
    }

    fn ident(&mut self, what: &str) -> Result<Token> {
        let line = self.line;
        let t = self.next(what)?.clone();
        if matches!(t.text.as_str(), ":" | "->" | "*") {
            return Err(Error::Syntax {
                line,
                col: t.col,
                expected: what.into(),
            });
        }
        Ok(t)
    }

    fn end(&self) -> Result<()> {
        if let Some(t) = self.peek() {
            return Err(Error::Syntax {
                line: self.line,
                col: t.col,
                expected: "end of line".into(),
            });
        }
        Ok(())
    }
}

/// Parses one path expression: a vertex id, or arrow ids joined by `*`.
fn parse_path_expr(p: &mut LineParser, q: &Quiver) -> Result<Path> {
    let first = p.ident("path expression")?;
    let mut names = vec![first.clone()];
    while matches!(p.peek(), Some(t) if t.text == "*") {
        p.expect("*")?;
        names.push(p.ident("arrow id")?);
    }
    if names.len() == 1 {
        let t = &names[0];
        if let Ok(v) = q.vertex(&t.text) {
            return Ok(Path::trivial(v));
        }
        if let Ok(a) = q.arrow(&t.text) {
            return Path::from_arrows(q, vec![a]);
        }
        return Err(Error::Semantic {
            line: t.line,
            msg: "unknown vertex or arrow in path".into(),
            token: t.text.clone(),
        });
    }
    let mut arrows = Vec::new();
    for t in &names {
        let a = q.arrow(&t.text).map_err(|_| Error::Semantic {
            line: t.line,
            msg: "unknown arrow in path".into(),
            token: t.text.clone(),
        })?;
        arrows.push(a);
    }
    Path::from_arrows(q, arrows.clone()).map_err(|_| Error::Semantic {
        line: names[0].line,
        msg: "path is not composable".into(),
        token: names
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join("*"),
    })
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile> {
        let mut lines: Vec<Vec<Token>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let toks = tokenize_line(raw, i + 1)?;
            if !toks.is_empty() {
                lines.push(toks);
            }
        }
        let total_lines = text.lines().count();
        if lines.is_empty() {
            return Err(Error::Syntax {
                line: 1,
                col: 1,
                expected: "`quiver`".into(),
            });
        }
        {
            let head = &lines[0][0];
            if head.text != "quiver" {
                return Err(Error::Syntax {
                    line: head.line,
                    col: head.col,
                    expected: "`quiver`".into(),
                });
            }
            let mut p = LineParser::new(&lines[0]);
            p.expect("quiver")?;
            p.end()?;
        }

        let mut quiver = Quiver::new();
        let mut coalgebra: Option<CoalgebraDecl> = None;
        let mut pending_paths: Option<Vec<(usize, Vec<Token>)>> = None;
        let mut localize: Option<Vec<Token>> = None;
        let mut cap: Option<usize> = None;

        for toks in &lines[1..] {
            let mut p = LineParser::new(toks);
            let head = p.next("statement")?.clone();
            match head.text.as_str() {
                "vertex" => {
                    let id = p.ident("vertex id")?;
                    p.end()?;
                    quiver.add_vertex(&id.text).map_err(|_| Error::Semantic {
                        line: id.line,
                        msg: "duplicate identifier".into(),
                        token: id.text.clone(),
                    })?;
                }
                "arrow" => {
                    let id = p.ident("arrow id")?;
                    p.expect(":")?;
                    let src = p.ident("source vertex")?;
                    p.expect("->")?;
                    let tgt = p.ident("target vertex")?;
                    p.end()?;
                    for v in [&src, &tgt] {
                        if quiver.vertex(&v.text).is_err() {
                            return Err(Error::Semantic {
                                line: v.line,
                                msg: "unknown vertex in arrow".into(),
                                token: v.text.clone(),
                            });
                        }
                    }
                    quiver
                        .add_arrow(&id.text, &src.text, &tgt.text)
                        .map_err(|_| Error::Semantic {
                            line: id.line,
                            msg: "duplicate identifier".into(),
                            token: id.text.clone(),
                        })?;
                }
                "coalgebra" => {
                    if coalgebra.is_some() || pending_paths.is_some() {
                        return Err(Error::Semantic {
                            line: head.line,
                            msg: "duplicate coalgebra declaration".into(),
                            token: head.text.clone(),
                        });
                    }
                    let kind = p.ident("`full` or `paths`")?;
                    match kind.text.as_str() {
                        "full" => {
                            p.end()?;
                            coalgebra = Some(CoalgebraDecl::Full);
                        }
                        "paths" => {
                            // Path expressions are resolved after all
                            // declarations, so record the raw tokens.
                            let rest: Vec<Token> = toks[p.pos..].to_vec();
                            pending_paths = Some(vec![(head.line, rest)]);
                        }
                        _ => {
                            return Err(Error::Syntax {
                                line: kind.line,
                                col: kind.col,
                                expected: "`full` or `paths`".into(),
                            })
                        }
                    }
                }
                "localize" => {
                    if localize.is_some() {
                        return Err(Error::Semantic {
                            line: head.line,
                            msg: "duplicate localize declaration".into(),
                            token: head.text.clone(),
                        });
                    }
                    let mut ids = Vec::new();
                    while p.peek().is_some() {
                        ids.push(p.ident("vertex id")?);
                    }
                    if ids.is_empty() {
                        return Err(Error::Syntax {
                            line: head.line,
                            col: head.col + head.text.len(),
                            expected: "at least one vertex id".into(),
                        });
                    }
                    localize = Some(ids);
                }
                "cap" => {
                    if cap.is_some() {
                        return Err(Error::Semantic {
                            line: head.line,
                            msg: "duplicate cap declaration".into(),
                            token: head.text.clone(),
                        });
                    }
                    let n = p.ident("nonnegative integer")?;
                    p.end()?;
                    cap = Some(n.text.parse().map_err(|_| Error::Syntax {
                        line: n.line,
                        col: n.col,
                        expected: "nonnegative integer".into(),
                    })?);
                }
                other => {
                    return Err(Error::Syntax {
                        line: head.line,
                        col: head.col,
                        expected: format!(
                            "`vertex`, `arrow`, `coalgebra`, `localize` or `cap`, found `{other}`"
                        ),
                    })
                }
            }
        }

        if let Some(chunks) = pending_paths {
            let mut paths = Vec::new();
            for (_, toks) in &chunks {
                if toks.is_empty() {
                    continue; // trivial-paths-only coalgebra
                }
                let mut p = LineParser::new(toks);
                while p.peek().is_some() {
                    paths.push(parse_path_expr(&mut p, &quiver)?);
                }
            }
            coalgebra = Some(CoalgebraDecl::Paths(paths));
        }

        let coalgebra = coalgebra.ok_or(Error::Syntax {
            line: total_lines + 1,
            col: 1,
            expected: "`coalgebra` declaration".into(),
        })?;
        let localize = localize.ok_or(Error::Syntax {
            line: total_lines + 1,
            col: 1,
            expected: "`localize` declaration".into(),
        })?;
        if quiver.vertex_count() == 0 {
            return Err(Error::Syntax {
                line: total_lines + 1,
                col: 1,
                expected: "at least one `vertex` declaration".into(),
            });
        }
        let mut xs = Vec::new();
        for t in &localize {
            let v = quiver.vertex(&t.text).map_err(|_| Error::Semantic {
                line: t.line,
                msg: "unknown vertex in localize".into(),
                token: t.text.clone(),
            })?;
            if !xs.contains(&v) {
                xs.push(v);
            }
        }

        Ok(ProblemFile {
            quiver,
            coalgebra,
            localize: xs,
            cap: cap.unwrap_or(DEFAULT_CAP),
        })
    }

    /// Builds the validated coalgebra and localization context. Returns
    /// also the subpaths that closure added, for a user-facing notice.
    pub fn build(&self) -> Result<(Arc<PathCoalgebra>, LocalizationContext, Vec<Path>)> {
        let (coalgebra, added) = match &self.coalgebra {
            CoalgebraDecl::Full => (PathCoalgebra::full(self.quiver.clone()), Vec::new()),
            CoalgebraDecl::Paths(paths) => {
                PathCoalgebra::finite_closed(self.quiver.clone(), paths.iter().cloned())?
            }
        };
        let coalgebra = Arc::new(coalgebra);
        let ctx = LocalizationContext::new(coalgebra.clone(), self.localize.iter().copied())?;
        Ok((coalgebra, ctx, added))
    }

    /// Canonical text form; parsing it back reproduces the same problem.
    pub fn print_canonical(&self) -> String {
        let q = &self.quiver;
        let mut s = String::from("quiver\n");
        for v in q.vertices() {
            s.push_str(&format!("vertex {}\n", q.vertex_name(v)));
        }
        for a in q.arrow_ids() {
            s.push_str(&format!(
                "arrow {} : {} -> {}\n",
                q.arrow_name(a),
                q.vertex_name(q.source(a)),
                q.vertex_name(q.target(a))
            ));
        }
        match &self.coalgebra {
            CoalgebraDecl::Full => s.push_str("coalgebra full\n"),
            CoalgebraDecl::Paths(paths) => {
                // Canonical form: the nontrivial paths of the closed
                // basis, sorted; trivial paths are implicit.
                let (c, _) = PathCoalgebra::finite_closed(q.clone(), paths.iter().cloned())
                    .expect("paths validated at parse time");
                let mut nontrivial: Vec<Path> = match c.basis() {
                    crate::coalgebra::BasisSpec::Finite(set) => {
                        set.iter().filter(|p| !p.is_trivial()).cloned().collect()
                    }
                    crate::coalgebra::BasisSpec::Full => unreachable!(),
                };
                q.sort_paths(&mut nontrivial);
                s.push_str("coalgebra paths");
                for p in &nontrivial {
                    s.push_str(&format!(" {}", q.path_string(p)));
                }
                s.push('\n');
            }
        }
        s.push_str("localize");
        let mut xs = self.localize.clone();
        xs.sort();
        for v in xs {
            s.push_str(&format!(" {}", q.vertex_name(v)));
        }
        s.push('\n');
        s.push_str(&format!("cap {}\n", self.cap));
        s
    }
}
