use std::rc::Rc;
use std::sync::OnceLock;

use thiserror::Error;

use super::svg::{AttrVal, BlobSpan, Canvas, PathCmd, Point, SvgNode};
use super::trace::{apply_arith, NumVal, Trace};
use crate::little::{parse, Annotation, Expr, ExprKind, LocId, OpName, Pattern, Pos, Program};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{pos}: unbound variable `{name}`")]
    Unbound { name: String, pos: Pos },
    #[error("{pos}: {what} expects {expected} argument(s), got {got}")]
    Arity {
        what: String,
        expected: usize,
        got: usize,
        pos: Pos,
    },
    #[error("{pos}: type error: {message}")]
    Type { message: String, pos: Pos },
    #[error("{pos}: division by zero")]
    DivisionByZero { pos: Pos },
}

fn type_err<T>(pos: Pos, message: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Type {
        message: message.into(),
        pos,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Map,
    Concat,
    Cons,
    First,
    Rest,
    Len,
    Nth,
    Node,
    Ghost,
    Blobs,
}

impl Builtin {
    const ALL: [(&'static str, Builtin); 10] = [
        ("map", Builtin::Map),
        ("concat", Builtin::Concat),
        ("cons", Builtin::Cons),
        ("first", Builtin::First),
        ("rest", Builtin::Rest),
        ("len", Builtin::Len),
        ("nth", Builtin::Nth),
        ("node", Builtin::Node),
        ("ghost", Builtin::Ghost),
        ("blobs", Builtin::Blobs),
    ];

    fn arity(self) -> usize {
        match self {
            Builtin::Node => 3,
            Builtin::Map | Builtin::Cons | Builtin::Nth => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        Builtin::ALL.iter().find(|(_, b)| *b == self).map(|(n, _)| *n).unwrap_or("?")
    }
}

pub struct Closure<'a> {
    params: &'a [Pattern],
    body: &'a Expr,
    env: Env<'a>,
    /// Name under which the closure can call itself.
    self_name: Option<&'a str>,
    applied: Vec<Value<'a>>,
}

#[derive(Clone)]
pub enum Value<'a> {
    Num(NumVal),
    Str(Rc<str>),
    Bool(bool),
    List(Rc<Vec<Value<'a>>>),
    Closure(Rc<Closure<'a>>),
    Builtin(Builtin, Rc<Vec<Value<'a>>>),
    Node(Rc<SvgNode>),
}

impl Value<'_> {
    fn kind(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Str(_) => "string",
            Value::Bool(_) => "boolean",
            Value::List(_) => "list",
            Value::Closure(_) | Value::Builtin(..) => "function",
            Value::Node(_) => "shape",
        }
    }

    pub fn as_num(&self) -> Option<&NumVal> {
        match self {
            Value::Num(n) => Some(n),
            _ => None,
        }
    }
}

struct Frame<'a> {
    name: &'a str,
    value: Value<'a>,
    next: Env<'a>,
}

#[derive(Clone, Default)]
pub struct Env<'a>(Option<Rc<Frame<'a>>>);

impl<'a> Env<'a> {
    fn bind(&self, name: &'a str, value: Value<'a>) -> Env<'a> {
        Env(Some(Rc::new(Frame {
            name,
            value,
            next: self.clone(),
        })))
    }

    fn lookup(&self, name: &str) -> Option<&Value<'a>> {
        let mut cur = &self.0;
        while let Some(f) = cur {
            if f.name == name {
                return Some(&f.value);
            }
            cur = &f.next.0;
        }
        None
    }
}

fn prelude_program() -> &'static Program {
    static PRELUDE: OnceLock<Program> = OnceLock::new();
    PRELUDE.get_or_init(|| {
        let mut p = parse(include_str!("prelude.little")).expect("prelude parses");
        for e in p.exprs_mut() {
            e.walk_mut(&mut |n| {
                if let ExprKind::Num(lit) = &mut n.kind {
                    lit.loc = LocId::FRESH;
                }
            });
        }
        p
    })
}

/// Names defined by the library, for scoping checks in transformations.
pub fn prelude_names() -> Vec<String> {
    let mut names: Vec<String> = Builtin::ALL.iter().map(|(n, _)| n.to_string()).collect();
    for d in &prelude_program().defs {
        names.extend(d.pat.binders().into_iter().map(String::from));
    }
    names
}

fn base_env() -> Result<Env<'static>, EvalError> {
    let mut env = Env::default();
    for (name, b) in Builtin::ALL {
        env = env.bind(name, Value::Builtin(b, Rc::new(Vec::new())));
    }
    let prelude = prelude_program();
    for d in &prelude.defs {
        env = bind_def(env, &d.pat, &d.bound, d.rec)?;
    }
    Ok(env)
}

fn bind_def<'a>(env: Env<'a>, pat: &'a Pattern, bound: &'a Expr, rec: bool) -> Result<Env<'a>, EvalError> {
    let v = match (&bound.kind, pat.as_var()) {
        (ExprKind::Lambda(params, body), Some(name)) if rec => Value::Closure(Rc::new(Closure {
            params,
            body,
            env: env.clone(),
            self_name: Some(name),
            applied: Vec::new(),
        })),
        _ => eval(bound, &env)?,
    };
    bind_pattern(env, pat, v, bound.pos)
}

fn bind_pattern<'a>(env: Env<'a>, pat: &'a Pattern, v: Value<'a>, pos: Pos) -> Result<Env<'a>, EvalError> {
    match pat {
        Pattern::Var(name) => Ok(env.bind(name, v)),
        Pattern::List(ps) => {
            let Value::List(items) = &v else {
                return type_err(pos, format!("cannot destructure a {} with a list pattern", v.kind()));
            };
            if items.len() != ps.len() {
                return type_err(
                    pos,
                    format!("list pattern of {} elements matched against {} values", ps.len(), items.len()),
                );
            }
            let mut env = env;
            for (p, item) in ps.iter().zip(items.iter()) {
                env = bind_pattern(env, p, item.clone(), pos)?;
            }
            Ok(env)
        }
    }
}

fn literal_value(n: &crate::little::NumLit) -> NumVal {
    if n.annot == Annotation::Frozen || n.loc == LocId::FRESH {
        NumVal::opaque(n.value)
    } else {
        NumVal {
            value: n.value,
            trace: Trace::Loc(n.loc),
        }
    }
}

pub fn eval<'a>(e: &'a Expr, env: &Env<'a>) -> Result<Value<'a>, EvalError> {
    match &e.kind {
        ExprKind::Num(n) => Ok(Value::Num(literal_value(n))),
        ExprKind::Str(s) => Ok(Value::Str(Rc::from(s.as_str()))),
        ExprKind::Bool(b) => Ok(Value::Bool(*b)),
        ExprKind::Var(v) => env.lookup(v).cloned().ok_or_else(|| EvalError::Unbound {
            name: v.clone(),
            pos: e.pos,
        }),
        ExprKind::List(items) => Ok(Value::List(Rc::new(
            items.iter().map(|i| eval(i, env)).collect::<Result<_, _>>()?,
        ))),
        ExprKind::Op(op, args) => {
            let a = eval(&args[0], env)?;
            let b = eval(&args[1], env)?;
            binop(*op, a, b, e.pos)
        }
        ExprKind::Lambda(params, body) => Ok(Value::Closure(Rc::new(Closure {
            params,
            body,
            env: env.clone(),
            self_name: None,
            applied: Vec::new(),
        }))),
        ExprKind::App(f, args) => {
            let fv = eval(f, env)?;
            let argv = args.iter().map(|a| eval(a, env)).collect::<Result<Vec<_>, _>>()?;
            apply(fv, argv, e.pos)
        }
        ExprKind::Let {
            rec, pat, bound, body, ..
        } => {
            let env2 = bind_def(env.clone(), pat, bound, *rec)?;
            eval(body, &env2)
        }
        ExprKind::If(c, a, b) => match eval(c, env)? {
            Value::Bool(true) => eval(a, env),
            Value::Bool(false) => eval(b, env),
            other => type_err(c.pos, format!("condition must be a boolean, found a {}", other.kind())),
        },
    }
}

fn binop<'a>(op: OpName, a: Value<'a>, b: Value<'a>, pos: Pos) -> Result<Value<'a>, EvalError> {
    match (op, &a, &b) {
        (OpName::Add | OpName::Sub | OpName::Mul | OpName::Div, Value::Num(x), Value::Num(y)) => {
            if op == OpName::Div && y.value == 0.0 {
                return Err(EvalError::DivisionByZero { pos });
            }
            Ok(Value::Num(NumVal {
                value: apply_arith(op, x.value, y.value),
                trace: Trace::op(op, x.trace.clone(), y.trace.clone()),
            }))
        }
        (OpName::Add, Value::Str(x), Value::Str(y)) => Ok(Value::Str(Rc::from(format!("{x}{y}")))),
        (OpName::Eq, Value::Num(x), Value::Num(y)) => Ok(Value::Bool(x.value == y.value)),
        (OpName::Eq, Value::Str(x), Value::Str(y)) => Ok(Value::Bool(x == y)),
        (OpName::Eq, Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool(x == y)),
        (OpName::Lt | OpName::Gt | OpName::Le | OpName::Ge, Value::Num(x), Value::Num(y)) => {
            let (x, y) = (x.value, y.value);
            Ok(Value::Bool(match op {
                OpName::Lt => x < y,
                OpName::Gt => x > y,
                OpName::Le => x <= y,
                _ => x >= y,
            }))
        }
        _ => type_err(
            pos,
            format!("`{}` cannot combine a {} and a {}", op.symbol(), a.kind(), b.kind()),
        ),
    }
}

pub fn apply<'a>(f: Value<'a>, mut args: Vec<Value<'a>>, pos: Pos) -> Result<Value<'a>, EvalError> {
    match f {
        Value::Closure(c) => {
            let mut all = c.applied.clone();
            all.append(&mut args);
            let n = c.params.len();
            if all.len() < n {
                return Ok(Value::Closure(Rc::new(Closure {
                    params: c.params,
                    body: c.body,
                    env: c.env.clone(),
                    self_name: c.self_name,
                    applied: all,
                })));
            }
            let extra = all.split_off(n);
            let mut env = c.env.clone();
            if let Some(name) = c.self_name {
                env = env.bind(
                    name,
                    Value::Closure(Rc::new(Closure {
                        params: c.params,
                        body: c.body,
                        env: c.env.clone(),
                        self_name: c.self_name,
                        applied: Vec::new(),
                    })),
                );
            }
            for (p, v) in c.params.iter().zip(all) {
                env = bind_pattern(env, p, v, pos)?;
            }
            let result = eval(c.body, &env)?;
            if extra.is_empty() {
                Ok(result)
            } else {
                apply(result, extra, pos)
            }
        }
        Value::Builtin(b, applied) => {
            let mut all = (*applied).clone();
            all.append(&mut args);
            let n = b.arity();
            if all.len() < n {
                return Ok(Value::Builtin(b, Rc::new(all)));
            }
            let extra = all.split_off(n);
            let result = call_builtin(b, all, pos)?;
            if extra.is_empty() {
                Ok(result)
            } else {
                apply(result, extra, pos)
            }
        }
        other => {
            if args.is_empty() {
                return Ok(other);
            }
            type_err(pos, format!("cannot call a {}", other.kind()))
        }
    }
}

fn list_arg<'v, 'a>(b: Builtin, v: &'v Value<'a>, pos: Pos) -> Result<&'v [Value<'a>], EvalError> {
    match v {
        Value::List(items) => Ok(items),
        other => type_err(pos, format!("{} expects a list, found a {}", b.name(), other.kind())),
    }
}

fn call_builtin<'a>(b: Builtin, args: Vec<Value<'a>>, pos: Pos) -> Result<Value<'a>, EvalError> {
    let list = |items: Vec<Value<'a>>| Value::List(Rc::new(items));
    match b {
        Builtin::Map => {
            let items = list_arg(b, &args[1], pos)?;
            let out = items
                .iter()
                .map(|x| apply(args[0].clone(), vec![x.clone()], pos))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(list(out))
        }
        Builtin::Concat => {
            let mut out = Vec::new();
            for part in list_arg(b, &args[0], pos)? {
                match part {
                    Value::List(xs) => out.extend(xs.iter().cloned()),
                    other => out.push(other.clone()),
                }
            }
            Ok(list(out))
        }
        Builtin::Blobs => {
            let mut out = Vec::new();
            flatten_values(&args[0], &mut out);
            Ok(list(out))
        }
        Builtin::Cons => {
            let mut out = vec![args[0].clone()];
            out.extend(list_arg(b, &args[1], pos)?.iter().cloned());
            Ok(list(out))
        }
        Builtin::First => list_arg(b, &args[0], pos)?
            .first()
            .cloned()
            .map_or_else(|| type_err(pos, "first of an empty list"), Ok),
        Builtin::Rest => {
            let items = list_arg(b, &args[0], pos)?;
            if items.is_empty() {
                return type_err(pos, "rest of an empty list");
            }
            Ok(list(items[1..].to_vec()))
        }
        Builtin::Len => Ok(Value::Num(NumVal::opaque(list_arg(b, &args[0], pos)?.len() as f64))),
        Builtin::Nth => {
            let items = list_arg(b, &args[0], pos)?;
            let Some(i) = args[1].as_num() else {
                return type_err(pos, "nth expects a number index");
            };
            items
                .get(i.value as usize)
                .cloned()
                .map_or_else(|| type_err(pos, format!("index {} out of range", i.value)), Ok)
        }
        Builtin::Node => make_node(&args[0], &args[1], &args[2], pos),
        Builtin::Ghost => Ok(ghostify(&args[0])),
    }
}

fn flatten_values<'a>(v: &Value<'a>, out: &mut Vec<Value<'a>>) {
    match v {
        Value::List(xs) => xs.iter().for_each(|x| flatten_values(x, out)),
        other => out.push(other.clone()),
    }
}

fn ghostify<'a>(v: &Value<'a>) -> Value<'a> {
    match v {
        Value::Node(n) => {
            let mut n = (**n).clone();
            n.ghost = true;
            Value::Node(Rc::new(n))
        }
        Value::List(xs) => Value::List(Rc::new(xs.iter().map(ghostify).collect())),
        other => other.clone(),
    }
}

fn to_point(v: &Value<'_>, pos: Pos) -> Result<Point, EvalError> {
    if let Value::List(xy) = v {
        if let [Value::Num(x), Value::Num(y)] = xy.as_slice() {
            return Ok(Point {
                x: x.clone(),
                y: y.clone(),
            });
        }
    }
    type_err(pos, "a point must be a list of two numbers")
}

fn to_attr(name: &str, v: &Value<'_>, pos: Pos) -> Result<AttrVal, EvalError> {
    match (name, v) {
        (_, Value::Num(n)) => Ok(AttrVal::Num(n.clone())),
        (_, Value::Str(s)) => Ok(AttrVal::Str(s.to_string())),
        ("points", Value::List(ps)) => Ok(AttrVal::Points(
            ps.iter().map(|p| to_point(p, pos)).collect::<Result<_, _>>()?,
        )),
        ("d", Value::List(cmds)) => {
            let mut out = Vec::new();
            for c in cmds.iter() {
                let Value::List(parts) = c else {
                    return type_err(pos, "a path command must be a list");
                };
                let Some((Value::Str(verb), pts)) = parts.split_first() else {
                    return type_err(pos, "a path command starts with its verb");
                };
                out.push(PathCmd {
                    verb: verb.to_string(),
                    points: pts.iter().map(|p| to_point(p, pos)).collect::<Result<_, _>>()?,
                });
            }
            Ok(AttrVal::Path(out))
        }
        _ => type_err(pos, format!("attribute `{name}` cannot hold a {}", v.kind())),
    }
}

fn make_node<'a>(tag: &Value<'a>, attrs: &Value<'a>, children: &Value<'a>, pos: Pos) -> Result<Value<'a>, EvalError> {
    let Value::Str(tag) = tag else {
        return type_err(pos, "node tag must be a string");
    };
    let mut out_attrs = Vec::new();
    for a in list_arg(Builtin::Node, attrs, pos)? {
        match a {
            Value::List(kv) if kv.len() == 2 => {
                let Value::Str(name) = &kv[0] else {
                    return type_err(pos, "attribute name must be a string");
                };
                out_attrs.push((name.to_string(), to_attr(name, &kv[1], pos)?));
            }
            _ => return type_err(pos, "attributes are [name value] pairs"),
        }
    }
    let mut flat = Vec::new();
    flatten_values(children, &mut flat);
    let kids = flat
        .into_iter()
        .map(|c| match c {
            Value::Node(n) => Ok((*n).clone()),
            other => type_err(pos, format!("a shape's children must be shapes, found a {}", other.kind())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Value::Node(Rc::new(SvgNode {
        tag: tag.to_string(),
        attrs: out_attrs,
        children: kids,
        ghost: false,
    })))
}

fn collect_nodes(v: &Value<'_>, pos: Pos, out: &mut Vec<SvgNode>) -> Result<(), EvalError> {
    match v {
        Value::Node(n) => out.push((**n).clone()),
        Value::List(xs) => {
            for x in xs.iter() {
                collect_nodes(x, pos, out)?;
            }
        }
        other => return type_err(pos, format!("the canvas must hold shapes, found a {}", other.kind())),
    }
    Ok(())
}

/// Evaluate a program to its canvas.
pub fn evaluate(p: &Program) -> Result<Canvas, EvalError> {
    let mut env = base_env()?;
    for d in &p.defs {
        env = bind_def(env, &d.pat, &d.bound, d.rec)?;
    }
    let mut roots = Vec::new();
    let blobs = match p.blobs() {
        Some(items) if env.lookup("blobs").is_some_and(|v| matches!(v, Value::Builtin(Builtin::Blobs, _))) => {
            let mut spans = Vec::new();
            for (index, item) in items.iter().enumerate() {
                let start = roots.len();
                collect_nodes(&eval(item, &env)?, item.pos, &mut roots)?;
                spans.push(BlobSpan {
                    index,
                    name: item.as_var().map(String::from),
                    nodes: start..roots.len(),
                });
            }
            Some(spans)
        }
        _ => {
            collect_nodes(&eval(&p.main, &env)?, p.main.pos, &mut roots)?;
            None
        }
    };
    let store = p.literals().into_iter().map(|n| (n.loc, (n.value, n.annot))).collect();
    Ok(Canvas { roots, store, blobs })
}

/// Evaluate a standalone expression against the library; for tests and
/// tooling.
pub fn eval_number(e: &Expr) -> Result<NumVal, EvalError> {
    let env = base_env()?;
    match eval(e, &env)? {
        Value::Num(n) => Ok(n),
        other => type_err(e.pos, format!("expected a number, found a {}", other.kind())),
    }
}
