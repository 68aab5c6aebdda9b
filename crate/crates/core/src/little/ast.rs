//! Syntax tree for `little` programs.

use std::collections::BTreeMap;
use std::fmt;

/// Identity of a numeric literal inside one [`Program`].
///
/// Ids are assigned in pre-order over the program text, so re-parsing the
/// canonical rendering of a program reproduces the same ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct LocId(pub u32);

impl LocId {
    /// Placeholder for literals created by a transformation before renumbering.
    pub const FRESH: LocId = LocId(u32::MAX);
}

impl fmt::Display for LocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize)]
pub enum Annotation {
    #[default]
    Plain,
    /// `n!`: never changed by the solver or live synchronization.
    Frozen,
    /// `n?`: preferred by the solver when it has to pick a constant.
    Thawed,
}

impl Annotation {
    pub fn suffix(self) -> &'static str {
        match self {
            Annotation::Plain => "",
            Annotation::Frozen => "!",
            Annotation::Thawed => "?",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumLit {
    pub value: f64,
    /// Source spelling without the annotation suffix, e.g. `0.90`.
    pub text: String,
    pub annot: Annotation,
    pub loc: LocId,
}

impl NumLit {
    pub fn new(value: f64, annot: Annotation) -> Self {
        NumLit {
            value,
            text: format_number(value),
            annot,
            loc: LocId::FRESH,
        }
    }

    pub fn with_text(value: f64, text: String, annot: Annotation) -> Self {
        NumLit {
            value,
            text,
            annot,
            loc: LocId::FRESH,
        }
    }
}

/// Shortest decimal spelling that reads back as the same `f64`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    format!("{v}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpName {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
}

impl OpName {
    pub fn symbol(self) -> &'static str {
        match self {
            OpName::Add => "+",
            OpName::Sub => "-",
            OpName::Mul => "*",
            OpName::Div => "/",
            OpName::Lt => "<",
            OpName::Gt => ">",
            OpName::Le => "<=",
            OpName::Ge => ">=",
            OpName::Eq => "=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<OpName> {
        Some(match s {
            "+" => OpName::Add,
            "-" => OpName::Sub,
            "*" => OpName::Mul,
            "/" => OpName::Div,
            "<" => OpName::Lt,
            ">" => OpName::Gt,
            "<=" => OpName::Le,
            ">=" => OpName::Ge,
            "=" => OpName::Eq,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Var(String),
    List(Vec<Pattern>),
}

impl Pattern {
    pub fn var(name: impl Into<String>) -> Self {
        Pattern::Var(name.into())
    }

    pub fn vars(names: &[&str]) -> Self {
        Pattern::List(names.iter().map(|n| Pattern::var(*n)).collect())
    }

    /// All variable names bound by this pattern, left to right.
    pub fn binders(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_binders(&mut out);
        out
    }

    fn collect_binders<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Pattern::Var(v) => out.push(v),
            Pattern::List(ps) => ps.iter().for_each(|p| p.collect_binders(out)),
        }
    }

    pub fn binds(&self, name: &str) -> bool {
        match self {
            Pattern::Var(v) => v == name,
            Pattern::List(ps) => ps.iter().any(|p| p.binds(name)),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Pattern::Var(v) => Some(v),
            Pattern::List(_) => None,
        }
    }

    /// `[a b c d]` with four plain variables: the bounding-box shape.
    pub fn is_bounds_pattern(&self) -> bool {
        matches!(self, Pattern::List(ps) if ps.len() == 4 && ps.iter().all(|p| p.as_var().is_some()))
    }
}

/// How a `let` node is written in source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LetStyle {
    /// `(let p e body)`
    Let,
    /// `(def p e)` followed by the rest of the enclosing block.
    Def,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    /// `;` comment lines written directly before this expression.
    pub comments: Vec<String>,
    /// Comment lines written before the closing bracket of a compound form.
    pub trailing: Vec<String>,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.comments == other.comments && self.trailing == other.trailing
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(NumLit),
    Str(String),
    Bool(bool),
    Var(String),
    List(Vec<Expr>),
    Op(OpName, Vec<Expr>),
    Lambda(Vec<Pattern>, Box<Expr>),
    App(Box<Expr>, Vec<Expr>),
    Let {
        rec: bool,
        style: LetStyle,
        pat: Pattern,
        bound: Box<Expr>,
        body: Box<Expr>,
    },
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            comments: Vec::new(),
            trailing: Vec::new(),
            pos: Pos::default(),
        }
    }

    pub fn num(value: f64) -> Self {
        Expr::new(ExprKind::Num(NumLit::new(value, Annotation::Plain)))
    }

    pub fn num_annot(value: f64, annot: Annotation) -> Self {
        Expr::new(ExprKind::Num(NumLit::new(value, annot)))
    }

    pub fn lit(lit: NumLit) -> Self {
        Expr::new(ExprKind::Num(lit))
    }

    pub fn str(s: impl Into<String>) -> Self {
        Expr::new(ExprKind::Str(s.into()))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Var(name.into()))
    }

    pub fn list(items: Vec<Expr>) -> Self {
        Expr::new(ExprKind::List(items))
    }

    pub fn op(op: OpName, a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Op(op, vec![a, b]))
    }

    pub fn app(f: Expr, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::App(Box::new(f), args))
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Self {
        Expr::app(Expr::var(name), args)
    }

    pub fn lambda(params: Vec<Pattern>, body: Expr) -> Self {
        Expr::new(ExprKind::Lambda(params, Box::new(body)))
    }

    pub fn let_(pat: Pattern, bound: Expr, body: Expr) -> Self {
        Expr::new(ExprKind::Let {
            rec: false,
            style: LetStyle::Let,
            pat,
            bound: Box::new(bound),
            body: Box::new(body),
        })
    }

    pub fn def_in(pat: Pattern, bound: Expr, rest: Expr) -> Self {
        let rec = matches!(bound.kind, ExprKind::Lambda(..));
        Expr::new(ExprKind::Let {
            rec,
            style: LetStyle::Def,
            pat,
            bound: Box::new(bound),
            body: Box::new(rest),
        })
    }

    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<&NumLit> {
        match &self.kind {
            ExprKind::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Expr]> {
        match &self.kind {
            ExprKind::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Num(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::Var(_)
        )
    }

    /// Direct children in evaluation (and pre-order) order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::Var(_) => vec![],
            ExprKind::List(items) | ExprKind::Op(_, items) => items.iter().collect(),
            ExprKind::Lambda(_, body) => vec![body],
            ExprKind::App(f, args) => std::iter::once(&**f).chain(args.iter()).collect(),
            ExprKind::Let { bound, body, .. } => vec![bound, body],
            ExprKind::If(c, a, b) => vec![c, a, b],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            ExprKind::Num(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::Var(_) => vec![],
            ExprKind::List(items) | ExprKind::Op(_, items) => items.iter_mut().collect(),
            ExprKind::Lambda(_, body) => vec![&mut **body],
            ExprKind::App(f, args) => std::iter::once(&mut **f).chain(args.iter_mut()).collect(),
            ExprKind::Let { bound, body, .. } => vec![&mut **bound, &mut **body],
            ExprKind::If(c, a, b) => vec![&mut **c, &mut **a, &mut **b],
        }
    }

    /// Pre-order walk over every sub-expression, including `self`.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        f(self);
        for c in self.children_mut() {
            c.walk_mut(f);
        }
    }

    pub fn literals(&self) -> Vec<&NumLit> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Num(n) = &e.kind {
                out.push(n);
            }
        });
        out
    }

    pub fn find_literal_mut(&mut self, loc: LocId) -> Option<&mut Expr> {
        if matches!(&self.kind, ExprKind::Num(n) if n.loc == loc) {
            return Some(self);
        }
        for c in self.children_mut() {
            if let Some(found) = c.find_literal_mut(loc) {
                return Some(found);
            }
        }
        None
    }

    pub fn contains_loc(&self, loc: LocId) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(&e.kind, ExprKind::Num(n) if n.loc == loc) {
                found = true;
            }
        });
        found
    }

    /// Strip comments and source positions, keeping structure only.
    pub fn without_comments(&self) -> Expr {
        let mut e = self.clone();
        e.walk_mut(&mut |n| {
            n.comments.clear();
            n.trailing.clear();
        });
        e
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Def {
    pub pat: Pattern,
    pub bound: Expr,
    /// Functions bound by `def` may refer to themselves.
    pub rec: bool,
    pub comments: Vec<String>,
}

impl Def {
    pub fn new(pat: Pattern, bound: Expr) -> Self {
        let rec = matches!(bound.kind, ExprKind::Lambda(..));
        Def {
            pat,
            bound,
            rec,
            comments: Vec::new(),
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.pat.as_var()
    }
}

/// A whole `little` program: top-level definitions followed by a main
/// expression.
#[derive(Clone, Debug)]
pub struct Program {
    pub defs: Vec<Def>,
    pub main: Expr,
    /// Comment lines after the main expression.
    pub trailing: Vec<String>,
    /// Argument lists recorded when a definition was abstracted into a
    /// function; used to stamp new instances when no call exists.
    pub lambda_defaults: BTreeMap<String, Vec<Expr>>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.defs == other.defs && self.main == other.main && self.trailing == other.trailing
    }
}

impl Program {
    pub fn new(defs: Vec<Def>, main: Expr) -> Self {
        let mut p = Program {
            defs,
            main,
            trailing: Vec::new(),
            lambda_defaults: BTreeMap::new(),
        };
        p.renumber();
        p
    }

    /// `(blobs [])`
    pub fn empty() -> Self {
        Program::new(Vec::new(), Expr::call("blobs", vec![Expr::list(Vec::new())]))
    }

    /// Reassign literal ids in pre-order.
    pub fn renumber(&mut self) {
        let mut next = 0u32;
        let mut assign = |e: &mut Expr| {
            if let ExprKind::Num(n) = &mut e.kind {
                n.loc = LocId(next);
                next += 1;
            }
        };
        for d in &mut self.defs {
            d.bound.walk_mut(&mut assign);
        }
        self.main.walk_mut(&mut assign);
    }

    pub fn exprs(&self) -> impl Iterator<Item = &Expr> {
        self.defs.iter().map(|d| &d.bound).chain(std::iter::once(&self.main))
    }

    pub fn exprs_mut(&mut self) -> impl Iterator<Item = &mut Expr> {
        self.defs
            .iter_mut()
            .map(|d| &mut d.bound)
            .chain(std::iter::once(&mut self.main))
    }

    pub fn literals(&self) -> Vec<&NumLit> {
        self.exprs().flat_map(|e| e.literals()).collect()
    }

    pub fn literal(&self, loc: LocId) -> Option<&NumLit> {
        self.literals().into_iter().find(|n| n.loc == loc)
    }

    pub fn find_literal_mut(&mut self, loc: LocId) -> Option<&mut Expr> {
        self.exprs_mut().find_map(|e| e.find_literal_mut(loc))
    }

    /// Index of the top-level definition containing literal `loc`; `None`
    /// when it is in the main expression or absent.
    pub fn def_index_of(&self, loc: LocId) -> Option<usize> {
        self.defs.iter().position(|d| d.bound.contains_loc(loc))
    }

    pub fn def_index(&self, name: &str) -> Option<usize> {
        self.defs.iter().position(|d| d.name() == Some(name))
    }

    pub fn def(&self, name: &str) -> Option<&Def> {
        self.defs.iter().find(|d| d.name() == Some(name))
    }

    /// The `e1 ... em` of a main expression `(blobs [ e1 ... em ])`.
    pub fn blobs(&self) -> Option<&[Expr]> {
        blobs_list(&self.main)
    }

    pub fn blobs_mut(&mut self) -> Option<&mut Vec<Expr>> {
        match &mut self.main.kind {
            ExprKind::App(f, args) if f.as_var() == Some("blobs") && args.len() == 1 => {
                match &mut args[0].kind {
                    ExprKind::List(items) => Some(items),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Definitions followed by `(blobs [ ... ])`.
    pub fn is_simple(&self) -> bool {
        self.blobs().is_some()
    }
}

pub fn blobs_list(main: &Expr) -> Option<&[Expr]> {
    match &main.kind {
        ExprKind::App(f, args) if f.as_var() == Some("blobs") && args.len() == 1 => args[0].as_list(),
        _ => None,
    }
}
