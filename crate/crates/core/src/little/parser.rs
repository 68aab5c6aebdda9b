//! Lexer and recursive-descent parser for `little`.

use super::ast::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at {pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    LBrack,
    RBrack,
    Num(f64, String, Annotation),
    Str(String),
    Ident(String),
    Comment(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: Pos,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '-' | '+' | '*' | '/' | '<' | '>' | '=' | '!' | '?' | '.' | '\\' | 'λ')
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        match c {
            c if c.is_whitespace() => advance(&mut i, &mut line, &mut col, c),
            ';' => {
                let start = i + 1;
                while i < chars.len() && chars[i] != '\n' {
                    { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
                }
                let text: String = chars[start..i].iter().collect();
                toks.push(Token {
                    tok: Tok::Comment(text.trim().to_string()),
                    pos,
                });
            }
            '(' | ')' | '[' | ']' => {
                let tok = match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    '[' => Tok::LBrack,
                    _ => Tok::RBrack,
                };
                toks.push(Token { tok, pos });
                advance(&mut i, &mut line, &mut col, c);
            }
            '\'' => {
                advance(&mut i, &mut line, &mut col, c);
                let start = i;
                while i < chars.len() && chars[i] != '\'' {
                    if chars[i] == '\n' {
                        return err(pos, "unterminated string literal");
                    }
                    { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
                }
                if i >= chars.len() {
                    return err(pos, "unterminated string literal");
                }
                let text: String = chars[start..i].iter().collect();
                advance(&mut i, &mut line, &mut col, '\'');
                toks.push(Token {
                    tok: Tok::Str(text),
                    pos,
                });
            }
            _ if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
                }
                let word: String = chars[start..i].iter().collect();
                toks.push(Token {
                    tok: classify_word(&word, pos)?,
                    pos,
                });
            }
            _ => return err(pos, format!("unexpected character {c:?}")),
        }
    }
    Ok(toks)
}

fn classify_word(word: &str, pos: Pos) -> Result<Tok, ParseError> {
    let starts_numeric = {
        let mut cs = word.chars();
        match cs.next() {
            Some(d) if d.is_ascii_digit() => true,
            Some('-') | Some('.') => cs.next().is_some_and(|d| d.is_ascii_digit() || d == '.'),
            _ => false,
        }
    };
    if !starts_numeric {
        return Ok(Tok::Ident(word.to_string()));
    }
    let (body, annot) = if let Some(b) = word.strip_suffix('!') {
        (b, Annotation::Frozen)
    } else if let Some(b) = word.strip_suffix('?') {
        (b, Annotation::Thawed)
    } else {
        (word, Annotation::Plain)
    };
    let valid = {
        let digits = body.strip_prefix('-').unwrap_or(body);
        let mut parts = digits.splitn(2, '.');
        let int = parts.next().unwrap_or("");
        let frac = parts.next();
        int.chars().all(|c| c.is_ascii_digit())
            && frac.is_none_or(|f| !f.is_empty() && f.chars().all(|c| c.is_ascii_digit()))
            && !(int.is_empty() && frac.is_none())
    };
    match body.parse::<f64>() {
        Ok(v) if valid => Ok(Tok::Num(v, body.to_string(), annot)),
        _ => err(pos, format!("bad number {word:?}")),
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    end: Pos,
}

const KEYWORDS: &[&str] = &["def", "let", "letrec", "if", "λ", "\\", "lambda", "true", "false"];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|t| t.pos).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn comments(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(Tok::Comment(c)) = self.peek() {
            out.push(c.clone());
            self.i += 1;
        }
        out
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(t) if t.tok == want => Ok(()),
            Some(t) => err(pos, format!("expected {what}, found {:?}", t.tok)),
            None => err(pos, format!("expected {what}, found end of input")),
        }
    }

    fn at_def(&self) -> bool {
        let mut j = self.i;
        while let Some(Tok::Comment(_)) = self.toks.get(j).map(|t| &t.tok) {
            j += 1;
        }
        matches!(self.toks.get(j).map(|t| &t.tok), Some(Tok::Open))
            && matches!(self.toks.get(j + 1).map(|t| &t.tok), Some(Tok::Ident(w)) if w == "def")
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let pos = self.pos();
        match self.next().map(|t| t.tok) {
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) && OpName::from_symbol(&name).is_none() => {
                Ok(Pattern::Var(name))
            }
            Some(Tok::LBrack) => {
                let mut ps = Vec::new();
                loop {
                    match self.peek() {
                        Some(Tok::RBrack) => {
                            self.i += 1;
                            return Ok(Pattern::List(ps));
                        }
                        None => return err(pos, "unbalanced brackets in pattern"),
                        _ => ps.push(self.pattern()?),
                    }
                }
            }
            Some(t) => err(pos, format!("bad pattern {t:?}")),
            None => err(pos, "expected pattern, found end of input"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let comments = self.comments();
        let pos = self.pos();
        let mut e = match self.next().map(|t| t.tok) {
            None => return err(pos, "expected expression, found end of input"),
            Some(Tok::Num(v, text, annot)) => Expr::lit(NumLit::with_text(v, text, annot)),
            Some(Tok::Str(s)) => Expr::str(s),
            Some(Tok::Ident(w)) => match w.as_str() {
                "true" => Expr::new(ExprKind::Bool(true)),
                "false" => Expr::new(ExprKind::Bool(false)),
                _ if KEYWORDS.contains(&w.as_str()) => return err(pos, format!("unexpected keyword {w}")),
                _ => Expr::var(w),
            },
            Some(Tok::LBrack) => {
                let mut items = Vec::new();
                let trailing = loop {
                    let cs = self.comments();
                    match self.peek() {
                        Some(Tok::RBrack) => {
                            self.i += 1;
                            break cs;
                        }
                        None => return err(pos, "unbalanced brackets: missing ]"),
                        _ => {
                            self.i -= cs.len();
                            items.push(self.expr()?);
                        }
                    }
                };
                let mut e = Expr::list(items);
                e.trailing = trailing;
                e
            }
            Some(Tok::Open) => self.compound(pos)?,
            Some(Tok::Close) | Some(Tok::RBrack) => return err(pos, "unbalanced parentheses: unexpected closing bracket"),
            Some(Tok::Comment(_)) => unreachable!("comments are consumed above"),
        };
        e.pos = pos;
        e.comments = comments;
        Ok(e)
    }

    /// Items up to the closing paren, plus dangling comments before it.
    fn rest_items(&mut self, open: Pos) -> Result<(Vec<Expr>, Vec<String>), ParseError> {
        let mut items = Vec::new();
        loop {
            let cs = self.comments();
            match self.peek() {
                Some(Tok::Close) => {
                    self.i += 1;
                    return Ok((items, cs));
                }
                None => return err(open, "unbalanced parentheses: missing )"),
                _ => {
                    self.i -= cs.len();
                    items.push(self.expr()?);
                }
            }
        }
    }

    /// A block of `(def p e)` forms ending in one expression, then `)`.
    fn block(&mut self, open: Pos) -> Result<(Expr, Vec<String>), ParseError> {
        let mut defs = Vec::new();
        while self.at_def() {
            let cs = self.comments();
            let pos = self.pos();
            self.expect(Tok::Open, "(")?;
            self.i += 1;
            let (pat, bound, trailing) = self.def_rest(pos)?;
            defs.push((cs, pos, pat, bound, trailing));
        }
        let last = self.expr()?;
        let cs = self.comments();
        self.expect(Tok::Close, ")")?;
        let mut body = last;
        for (cs, pos, pat, bound, trailing) in defs.into_iter().rev() {
            let mut e = Expr::def_in(pat, bound, body);
            e.comments = cs;
            e.trailing = trailing;
            e.pos = pos;
            body = e;
        }
        let _ = open;
        Ok((body, cs))
    }

    /// After `(def`: pattern, bound (possibly a block), closing paren.
    fn def_rest(&mut self, pos: Pos) -> Result<(Pattern, Expr, Vec<String>), ParseError> {
        let pat = self.pattern()?;
        if self.at_def() {
            let (body, trailing) = self.block(pos)?;
            return Ok((pat, body, trailing));
        }
        let bound = self.expr()?;
        let trailing = self.comments();
        self.expect(Tok::Close, ")")?;
        Ok((pat, bound, trailing))
    }

    fn compound(&mut self, open: Pos) -> Result<Expr, ParseError> {
        if let Some(Tok::Ident(w)) = self.peek().cloned() {
            match w.as_str() {
                "def" => {
                    return err(open, "def is only allowed at top level or at the start of a block");
                }
                "let" | "letrec" => {
                    self.i += 1;
                    let pat = self.pattern()?;
                    let bound = self.expr()?;
                    let body = self.expr()?;
                    let trailing = self.comments();
                    self.expect(Tok::Close, ")")?;
                    let mut e = Expr::new(ExprKind::Let {
                        rec: w == "letrec",
                        style: LetStyle::Let,
                        pat,
                        bound: Box::new(bound),
                        body: Box::new(body),
                    });
                    e.trailing = trailing;
                    return Ok(e);
                }
                "λ" | "\\" | "lambda" => {
                    self.i += 1;
                    let ppos = self.pos();
                    let params = match self.peek() {
                        Some(Tok::Open) => {
                            self.i += 1;
                            let mut ps = Vec::new();
                            loop {
                                match self.peek() {
                                    Some(Tok::Close) => {
                                        self.i += 1;
                                        break ps;
                                    }
                                    None => return err(ppos, "unbalanced parameter list"),
                                    _ => ps.push(self.pattern()?),
                                }
                            }
                        }
                        _ => vec![self.pattern()?],
                    };
                    let (body, trailing) = self.block(open)?;
                    let mut e = Expr::lambda(params, body);
                    e.trailing = trailing;
                    return Ok(e);
                }
                "if" => {
                    self.i += 1;
                    let (items, trailing) = self.rest_items(open)?;
                    let Ok([c, a, b]) = <[Expr; 3]>::try_from(items) else {
                        return err(open, "if takes exactly three expressions");
                    };
                    let mut e = Expr::new(ExprKind::If(Box::new(c), Box::new(a), Box::new(b)));
                    e.trailing = trailing;
                    return Ok(e);
                }
                _ => {}
            }
            if let Some(op) = OpName::from_symbol(&w) {
                self.i += 1;
                let (args, trailing) = self.rest_items(open)?;
                if args.len() != 2 {
                    return err(open, format!("operator {w} takes two arguments, got {}", args.len()));
                }
                let mut e = Expr::new(ExprKind::Op(op, args));
                e.trailing = trailing;
                return Ok(e);
            }
        }
        let (mut items, trailing) = self.rest_items(open)?;
        if items.is_empty() {
            return err(open, "empty application ()");
        }
        let f = items.remove(0);
        let mut e = Expr::app(f, items);
        e.trailing = trailing;
        Ok(e)
    }

}

/// Parse a whole program: `(def p e)*` followed by one main expression.
pub fn parse(src: &str) -> Result<Program, ParseError> {
    let toks = lex(src)?;
    let end = toks.last().map(|t| t.pos).unwrap_or_default();
    let mut p = Parser { toks, i: 0, end };
    let mut defs = Vec::new();
    while p.at_def() {
        let comments = p.comments();
        let open = p.pos();
        p.expect(Tok::Open, "(")?;
        p.i += 1;
        let (pat, mut bound, trailing) = p.def_rest(open)?;
        bound.trailing.extend(trailing);
        if bound.pos == Pos::default() {
            bound.pos = open;
        }
        let mut def = Def::new(pat, bound);
        def.comments = comments;
        defs.push(def);
    }
    if p.peek().is_none() || matches!(p.peek(), Some(Tok::Comment(_))) && p.toks[p.i..].iter().all(|t| matches!(t.tok, Tok::Comment(_))) {
        return err(p.pos(), "program has no main expression");
    }
    let main = p.expr()?;
    let trailing = p.comments();
    if p.i < p.toks.len() {
        return err(p.pos(), "unexpected input after main expression (unbalanced parentheses?)");
    }
    let mut prog = Program {
        defs,
        main,
        trailing,
        lambda_defaults: Default::default(),
    };
    prog.renumber();
    Ok(prog)
}

/// Parse a single expression (used for tests and for the prelude helpers).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let end = toks.last().map(|t| t.pos).unwrap_or_default();
    let mut p = Parser { toks, i: 0, end };
    let mut e = p.expr()?;
    if p.i < p.toks.len() {
        return err(p.pos(), "unexpected input after expression");
    }
    let mut next = 0u32;
    e.walk_mut(&mut |n| {
        if let ExprKind::Num(lit) = &mut n.kind {
            lit.loc = LocId(next);
            next += 1;
        }
    });
    Ok(e)
}
