use std::fmt;
use std::rc::Rc;

use chrono::NaiveDate;

use super::cast::Cast;
use super::eval::{Env, Expr};
use super::prices::PriceTable;
use super::RuntimeError;
use crate::syntax::Currency;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a / b,
        }
    }
}

/// A time-varying double, sampled against a price table.
#[derive(Debug, Clone, PartialEq)]
pub enum Obs {
    Const(f64),
    /// The price of a stock on one fixed date.
    Fixing { date: NaiveDate, company: String },
    /// The price of a stock on whatever date it is sampled.
    Spot { company: String },
    Binary(ArithOp, Rc<Obs>, Rc<Obs>),
}

impl Obs {
    pub fn sample(&self, date: NaiveDate, prices: &PriceTable) -> Result<f64, RuntimeError> {
        match self {
            Obs::Const(x) => Ok(*x),
            Obs::Fixing { date: fixed, company } => prices.lookup(company, *fixed),
            Obs::Spot { company } => prices.lookup(company, date),
            Obs::Binary(op, a, b) => Ok(op.apply(a.sample(date, prices)?, b.sample(date, prices)?)),
        }
    }
}

impl fmt::Display for Obs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obs::Const(x) => write!(f, "const {x:?}"),
            Obs::Fixing { date, company } => write!(f, "stock_price {date} {company:?}"),
            Obs::Spot { company } => write!(f, "spot {company:?}"),
            Obs::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

/// Contract combinators. Contracts are inert data.
#[derive(Debug, Clone, PartialEq)]
pub enum Contract {
    Zero,
    One(Currency),
    Give(Rc<Contract>),
    And(Rc<Contract>, Rc<Contract>),
    Scale(Rc<Obs>, Rc<Contract>),
    European(NaiveDate, Rc<Contract>),
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn arg(c: &Contract) -> String {
            match c {
                Contract::Zero => c.to_string(),
                _ => format!("({c})"),
            }
        }
        match self {
            Contract::Zero => write!(f, "Zero"),
            Contract::One(c) => write!(f, "One {}", c.0),
            Contract::Give(c) => write!(f, "Give {}", arg(c)),
            Contract::And(a, b) => write!(f, "And {} {}", arg(a), arg(b)),
            // Binary observables print their own parentheses.
            Contract::Scale(o, c) if matches!(**o, Obs::Binary(..)) => write!(f, "Scale {o} {}", arg(c)),
            Contract::Scale(o, c) => write!(f, "Scale ({o}) {}", arg(c)),
            Contract::European(d, c) => write!(f, "European {d} {}", arg(c)),
        }
    }
}

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Double(f64),
    Str(Rc<str>),
    Date(NaiveDate),
    Currency(Currency),
    Record(Rc<Vec<(String, Value)>>),
    Variant(Rc<str>, Rc<Value>),
    Closure(Rc<Closure>),
    Prim(Rc<PrimApp>),
    Guard(Rc<Guard>),
    Obs(Rc<Obs>),
    Contract(Rc<Contract>),
}

pub struct Closure {
    pub param: String,
    pub body: Rc<Expr>,
    pub env: Env,
}

/// A builtin and the arguments it has received so far.
#[derive(Clone)]
pub struct PrimApp {
    pub prim: super::builtins::Prim,
    pub args: Vec<Value>,
}

/// A function that crossed a `?` boundary: arguments and results are
/// checked on every call.
pub struct Guard {
    pub inner: Value,
    pub dom: Cast,
    pub cod: Cast,
}

impl Value {
    pub fn unit() -> Value {
        Value::Record(Rc::new(Vec::new()))
    }

    pub fn str(s: &str) -> Value {
        Value::Str(s.into())
    }

    pub fn variant(label: &str, payload: Value) -> Value {
        Value::Variant(label.into(), Rc::new(payload))
    }

    pub fn bool(b: bool) -> Value {
        Value::variant(if b { "True" } else { "False" }, Value::unit())
    }

    pub fn record(fields: Vec<(&str, Value)>) -> Value {
        Value::Record(Rc::new(fields.into_iter().map(|(l, v)| (l.to_string(), v)).collect()))
    }

    pub fn contract(c: Contract) -> Value {
        Value::Contract(Rc::new(c))
    }

    pub fn obs(o: Obs) -> Value {
        Value::Obs(Rc::new(o))
    }

    pub fn field(&self, label: &str) -> Option<&Value> {
        match self {
            Value::Record(fields) => fields.iter().find(|(l, _)| l == label).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(self, Value::Closure(_) | Value::Prim(_) | Value::Guard(_))
    }

    /// Short name of the value's runtime type, for error messages.
    pub fn tag(&self) -> String {
        match self {
            Value::Int(_) => "Int".into(),
            Value::Double(_) => "Double".into(),
            Value::Str(_) => "String".into(),
            Value::Date(_) => "Date".into(),
            Value::Currency(_) => "Currency".into(),
            Value::Record(fields) => {
                let labels: Vec<&str> = fields.iter().map(|(l, _)| l.as_str()).collect();
                format!("record {{{}}}", labels.join(", "))
            }
            Value::Variant(l, _) => format!("variant {l}"),
            Value::Closure(_) | Value::Prim(_) | Value::Guard(_) => "function".into(),
            Value::Obs(_) => "Obs Double".into(),
            Value::Contract(_) => "Contract".into(),
        }
    }

    /// Builds a list value from its elements.
    pub fn list(items: Vec<Value>) -> Value {
        items.into_iter().rev().fold(Value::variant("Nil", Value::unit()), |tail, head| {
            Value::variant("Cons", Value::record(vec![("head", head), ("tail", tail)]))
        })
    }

    /// Renders the value the way `any_to_string` does: top-level strings
    /// are printed raw, everything else as by `Display`.
    pub fn render(&self) -> String {
        match self {
            Value::Str(s) => s.to_string(),
            other => other.to_string(),
        }
    }

    fn is_unit(&self) -> bool {
        matches!(self, Value::Record(f) if f.is_empty())
    }
}

/// Structural equality on data; functions are equal only to themselves.
impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Double(a), Value::Double(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Date(a), Value::Date(b)) => a == b,
            (Value::Currency(a), Value::Currency(b)) => a == b,
            (Value::Record(a), Value::Record(b)) => {
                a.len() == b.len() && a.iter().all(|(l, v)| other.field(l) == Some(v))
            }
            (Value::Variant(l1, p1), Value::Variant(l2, p2)) => l1 == l2 && p1 == p2,
            (Value::Obs(a), Value::Obs(b)) => a == b,
            (Value::Contract(a), Value::Contract(b)) => a == b,
            (Value::Closure(a), Value::Closure(b)) => Rc::ptr_eq(a, b),
            (Value::Prim(a), Value::Prim(b)) => Rc::ptr_eq(a, b),
            (Value::Guard(a), Value::Guard(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Double(x) => write!(f, "{x:?}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Date(d) => write!(f, "{d}"),
            Value::Currency(c) => write!(f, "{}", c.0),
            Value::Record(fields) => {
                write!(f, "{{")?;
                for (i, (l, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{l} = {v}")?;
                }
                write!(f, "}}")
            }
            Value::Variant(l, p) if p.is_unit() => write!(f, "{l}"),
            Value::Variant(l, p) => match &**p {
                Value::Variant(_, inner) if !inner.is_unit() => write!(f, "{l} ({p})"),
                Value::Int(n) if *n < 0 => write!(f, "{l} ({p})"),
                Value::Double(x) if x.is_sign_negative() => write!(f, "{l} ({p})"),
                Value::Contract(_) => write!(f, "{l} ({p})"),
                _ => write!(f, "{l} {p}"),
            },
            Value::Closure(_) | Value::Prim(_) | Value::Guard(_) => write!(f, "<fun>"),
            Value::Obs(o) => write!(f, "{o}"),
            Value::Contract(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
